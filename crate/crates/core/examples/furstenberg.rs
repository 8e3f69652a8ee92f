//! The projective chain θ ↦ φ_a(θ) for the grid family with its invariant arc
//! J, then J against the separation directions S for the curve family.

use affinedim::constructions::{curve_ifs, grid_ifs, CurveFamilyParams, GridFamilyParams};
use affinedim::dimension::MeasureWeights;
use affinedim::ifs::chaos_game;
use affinedim::ifs::polygon::ConvexPolygon;
use affinedim::projective::{check_J_S_disjoint, furstenberg_sample, invariant_interval_J};
use affinedim::rng::DEFAULT_SEED;

fn main() -> affinedim::Result<()> {
    let ifs = grid_ifs(&GridFamilyParams::new(0.1, 1.0, std::f64::consts::FRAC_PI_8, 3))?;
    let uniform = MeasureWeights::uniform(ifs.len());

    let j = invariant_interval_J(&ifs)?;
    println!("J = [{:.4}, {:.4}]", j.lo().angle(), j.hi_angle());

    let sample = furstenberg_sample(&ifs, &uniform, 1000, 200_000, DEFAULT_SEED)?;
    let hist = sample.histogram();
    // 256 bins over [π/2, π], folded to 16 for printing.
    let peak = hist.chunks(16).map(|c| c.iter().sum::<usize>()).max().unwrap_or(1).max(1);
    for (k, chunk) in hist.chunks(16).enumerate() {
        let total: usize = chunk.iter().sum();
        let lo = std::f64::consts::FRAC_PI_2 * (1.0 + k as f64 / 16.0);
        println!("{lo:.3} {}", "#".repeat(60 * total / peak));
    }

    let curve = curve_ifs(&CurveFamilyParams::default())?;
    let cloud = chaos_game(&curve, &MeasureWeights::uniform(2), 100_000, DEFAULT_SEED)?;
    let js = check_J_S_disjoint(&curve, &cloud, &ConvexPolygon::unit_square())?;
    println!("curve family: J = [{:.4}, {:.4}]", js.j.lo().angle(), js.j.hi_angle());
    match js.s_outer {
        Some(s) => println!("S ⊂ [{:.4}, {:.4}], gap to J {:.4}", s.lo().angle(), s.hi_angle(), js.gap),
        None => println!("first-level hull images meet; S is unbounded"),
    }
    Ok(())
}
