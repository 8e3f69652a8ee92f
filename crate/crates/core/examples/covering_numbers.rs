//! Stopping sets and the covering-number comparisons between stopping-set
//! components, their projections and the whole attractor.

use affinedim::constructions::{grid_ifs, GridFamilyParams};
use affinedim::dimension::{covering_number_checks, stopping_set_W};
use affinedim::ifs::polygon::ConvexPolygon;
use affinedim::projective::invariant_interval_J;
use affinedim::rng::DEFAULT_SEED;

fn main() -> affinedim::Result<()> {
    let ifs = grid_ifs(&GridFamilyParams::new(0.1, 1.0, std::f64::consts::FRAC_PI_8, 2))?;
    for k in [3, 5, 7, 9] {
        let eps = 0.5f64.powi(k);
        let w = stopping_set_W(&ifs, eps)?;
        println!(
            "W(2^-{k}): {} words, lengths {}..={}, Kraft sum {:.6}",
            w.words.len(),
            w.min_len(),
            w.max_len(),
            w.kraft_sum(ifs.len())
        );
    }

    let theta = invariant_interval_J(&ifs)?.midpoint();
    let rep = covering_number_checks(
        &ifs,
        &ConvexPolygon::unit_square(),
        1.0 / 64.0,
        theta,
        4096,
        1_000_000,
        DEFAULT_SEED,
    )?;
    println!(
        "Σ N(ε, E_w) = {:.0}, N(ε, E) = {}, M = 24/d² = {:.1}",
        rep.component_sum, rep.total_count, rep.m_const
    );
    println!(
        "projection never increases the count: {} (worst margin {}); reverse constant {:.2}",
        rep.projection_violations == 0,
        rep.worst_projection_margin,
        rep.left_constant
    );
    Ok(())
}
