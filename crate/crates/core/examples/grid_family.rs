//! The N × N cone-matrix grid: construction, the dimension inequality, and
//! the smallest N for which it holds.

use std::f64::consts::FRAC_PI_8;

use affinedim::constructions::{
    check_final_inequality, check_final_inequality_with, find_min_N, grid_ifs, GridFamilyParams, SnSource,
};
use affinedim::ifs::check_separation;
use affinedim::ifs::polygon::ConvexPolygon;

fn main() -> affinedim::Result<()> {
    let p = GridFamilyParams::new(0.1, 1.0, FRAC_PI_8, 4);
    let ifs = grid_ifs(&p)?;
    let sep = check_separation(&ifs, &ConvexPolygon::unit_square(), 1)?;
    println!("N = 4: {} maps, positive {}, min gap {:.4}", ifs.len(), ifs.check_positivity(), sep.min_gap);

    for source in [SnSource::ClosedForm, SnSource::Solver { depth: 6 }] {
        let f = check_final_inequality_with(&p, source)?;
        println!(
            "{source:?}: s_N = {:.4}, dim μ ≥ {:.4}, dim μ_F ≥ {:.4}, margin {:+.4}",
            f.s_n, f.dim_mu_lower, f.furstenberg_lower, f.margin
        );
    }

    // Narrow cones need astronomically many cells; wide ones merely very many.
    let wide = GridFamilyParams::new(0.001, 0.782, 0.78, 2);
    match find_min_N(&wide, 1_000_000, SnSource::ClosedForm)? {
        Some(n) => {
            let f = check_final_inequality(&wide.with_n(n))?;
            println!("τ = 0.78: smallest N = {n} (margin {:.2e})", f.margin);
        }
        None => println!("τ = 0.78: no N ≤ 10⁶"),
    }
    println!(
        "τ = π/8: inequality holds at N = 10⁶? {}",
        check_final_inequality(&p.with_n(1_000_000))?.pass
    );
    Ok(())
}
