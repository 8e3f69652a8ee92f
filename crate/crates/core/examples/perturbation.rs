//! How much random noise the curve family's certificate tolerates.

use affinedim::constructions::{perturbation_survival, CurveFamilyParams, Family};
use affinedim::rng::DEFAULT_SEED;

fn main() -> affinedim::Result<()> {
    let family = Family::Curve(CurveFamilyParams::default());
    println!("{:>8} {:>6} {:>9} {:>10} {:>6} {:>4}", "δ", "valid", "positive", "separated", "window", "all");
    for delta in [1e-5, 1e-3, 1e-2, 5e-2, 1e-1] {
        let r = perturbation_survival(&family, delta, 32, DEFAULT_SEED)?;
        println!(
            "{delta:>8.0e} {:>6} {:>9} {:>10} {:>6} {:>4}",
            r.valid, r.positivity, r.separation, r.family_condition, r.all
        );
    }
    Ok(())
}
