//! The two explicit families: the `N × N` grid of cone matrices (dimension
//! above 1) and the two-map Lipschitz-curve family (dimension below 1), with
//! their certificate checks and perturbation tools.

pub mod curve;
pub mod grid;
pub mod perturb;

pub use curve::{
    check_conds, curve_ifs, distal_check, distal_constants, lipschitz_graph_check,
    lipschitz_graph_check_in, CondsReport, CurveFamilyParams, DistalReport, LipschitzReport,
};
pub use grid::{
    affinity_lower_sN, check_final_inequality, check_final_inequality_with, cone_matrix,
    cone_singular_values, dimH_mu_lower, find_min_N, furstenberg_dim_lower, grid_ifs,
    FinalInequality, GridFamilyParams, SnSource,
};
pub use perturb::{
    certify_curve, certify_grid, perturb_ifs, perturbation_survival, Certificate, Family,
    SurvivalReport,
};
