//! Local dimension of a projected Bernoulli measure at a coded point, as the
//! prefix length grows.

use affinedim::constructions::{curve_ifs, CurveFamilyParams};
use affinedim::dimension::{local_dimension_stat, slice_scale_rho, MeasureWeights};
use affinedim::ifs::Word;
use affinedim::projective::invariant_interval_J;
use affinedim::rng::DEFAULT_SEED;

fn main() -> affinedim::Result<()> {
    let ifs = curve_ifs(&CurveFamilyParams::default())?;
    let weights = MeasureWeights::uniform(2);
    let theta = invariant_interval_J(&ifs)?.midpoint();
    let a = Word::new(vec![0, 1, 1, 0, 1, 0, 0, 1]);
    println!("θ = {:.4}, a = {:?}", theta.angle(), a.letters());
    for n in 1..=a.len() {
        let rho = slice_scale_rho(&ifs, &a.prefix(n), theta)?;
        let stat = local_dimension_stat(&ifs, &weights, theta, &a, n, 400_000, DEFAULT_SEED)?;
        match stat.value {
            Some(v) => println!(
                "n = {n}: r = {:.2e}, mass {:.2e} ({} hits), local dim {v:.3}, ρ = {rho:.3}",
                stat.radius, stat.fraction, stat.hits
            ),
            None => println!("n = {n}: r = {:.2e}, ball empty", stat.radius),
        }
    }
    Ok(())
}
