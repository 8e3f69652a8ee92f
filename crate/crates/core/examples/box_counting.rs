//! Box-counting dimension of chaos-game clouds, with the raw count series.

use affinedim::dimension::{box_count_series, box_dimension, EpsLadder, MeasureWeights};
use affinedim::ifs::{chaos_game, AffineMap2, IFS2};
use affinedim::linalg2::{Matrix2, Vec2};
use affinedim::rng::DEFAULT_SEED;

fn main() -> affinedim::Result<()> {
    let third = Matrix2::IDENTITY.scale(1.0 / 3.0);
    let carpet = IFS2::new(
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| (i, j) != (1, 1))
            .map(|(i, j)| AffineMap2::new(third, Vec2::new(i as f64 / 3.0, j as f64 / 3.0)))
            .collect(),
    )?;
    let cloud = chaos_game(&carpet, &MeasureWeights::uniform(carpet.len()), 1_000_000, DEFAULT_SEED)?;

    let ladder = EpsLadder::default();
    for (eps, count) in box_count_series(&cloud.points, ladder)?.pairs {
        println!("ε = {eps:<10} N = {count}");
    }
    let rep = box_dimension(&cloud.points, ladder)?;
    println!(
        "carpet: {:.4} ± {:.4} (log 8 / log 3 = {:.4}), r² = {:.5}",
        rep.value,
        rep.extra["slope_se"],
        8f64.ln() / 3f64.ln(),
        rep.extra["r2"]
    );
    for w in &rep.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
