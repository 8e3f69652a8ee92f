//! Affinity dimension brackets for a similarity system, a diagonal system and
//! the cone-matrix grid.

use affinedim::constructions::{grid_ifs, GridFamilyParams};
use affinedim::dimension::{affinity_dimension, pressure_curve};
use affinedim::ifs::{AffineMap2, IFS2};
use affinedim::linalg2::{Matrix2, Vec2};

fn main() -> affinedim::Result<()> {
    let half = Matrix2::IDENTITY.scale(0.5);
    let gasket = IFS2::new(vec![
        AffineMap2::new(half, Vec2::new(0.0, 0.0)),
        AffineMap2::new(half, Vec2::new(0.5, 0.0)),
        AffineMap2::new(half, Vec2::new(0.25, 0.5)),
    ])?;
    let rep = affinity_dimension(&gasket, 12, 1e-6)?;
    println!("gasket      {:.6}  (log 3 / log 2 = {:.6})", rep.value, 3f64.ln() / 2f64.ln());

    let d = Matrix2::diag(0.8, 0.4);
    let diag = IFS2::new(vec![
        AffineMap2::new(d, Vec2::new(0.0, 0.0)),
        AffineMap2::new(d, Vec2::new(0.2, 0.6)),
    ])?;
    let rep = affinity_dimension(&diag, 12, 1e-6)?;
    println!("diagonal    upper root {:.6}", rep.bracket_hi);
    for w in &rep.warnings {
        println!("            warning: {w}");
    }

    // Positive matrices get a two-sided bracket that tightens with depth.
    let grid = grid_ifs(&GridFamilyParams::new(0.1, 1.0, std::f64::consts::FRAC_PI_8, 3))?;
    for depth in [4, 6, 8, 10] {
        let rep = affinity_dimension(&grid, depth, 1e-6)?;
        println!(
            "grid N=3    depth {depth:>2}: [{:.5}, {:.5}]  width {:.5}",
            rep.bracket_lo,
            rep.bracket_hi,
            rep.bracket_hi - rep.bracket_lo
        );
    }

    let curve = pressure_curve(&grid, 8, &[1.2, 1.4, 1.6])?;
    for (i, s) in curve.s.iter().enumerate() {
        println!("P({s:.1}) ∈ [{:+.4}, {:+.4}]", curve.lower[i].unwrap_or(f64::NAN), curve.upper[i]);
    }
    Ok(())
}
