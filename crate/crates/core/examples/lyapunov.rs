//! Lyapunov exponents and dimension of level-n Gibbs measures on the grid
//! family, against the affinity dimension bracket.

use affinedim::constructions::{grid_ifs, GridFamilyParams};
use affinedim::dimension::{
    affinity_dimension, entropy, gibbs_weights, lyapunov_dimension, lyapunov_dimension_se, lyapunov_exponents,
    MeasureWeights,
};
use affinedim::rng::DEFAULT_SEED;

fn main() -> affinedim::Result<()> {
    let ifs = grid_ifs(&GridFamilyParams::new(0.1, 1.0, std::f64::consts::FRAC_PI_8, 3))?;
    let aff = affinity_dimension(&ifs, 10, 1e-6)?;
    println!("affinity bracket [{:.4}, {:.4}]", aff.bracket_lo, aff.bracket_hi);

    let uniform = MeasureWeights::uniform(ifs.len());
    let mut measures = vec![("uniform".to_string(), uniform)];
    for n in [2, 4, 8] {
        measures.push((format!("Gibbs n={n}"), gibbs_weights(&ifs, n, aff.bracket_hi)?));
    }
    for (name, w) in &measures {
        let h = entropy(w);
        let est = lyapunov_exponents(&ifs, w, 160, 10_000, DEFAULT_SEED)?;
        let d = lyapunov_dimension(h, est.l1, est.l2)?;
        let se = lyapunov_dimension_se(h, est.l1, est.l2, est.se1, est.se2);
        println!(
            "{name:<12} h = {h:.4}  λ₁ = {:.4}  λ₂ = {:.4}  D = {:.4} ± {se:.1e}",
            est.l1, est.l2, d.value
        );
    }
    Ok(())
}
