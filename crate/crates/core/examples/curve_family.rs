//! The two-map family whose attractor is a Lipschitz graph: translation
//! window, J/S gap, graph check, distal constants and dimension.

use affinedim::constructions::{check_conds, curve_ifs, distal_check, lipschitz_graph_check, CurveFamilyParams};
use affinedim::dimension::{affinity_dimension, box_dimension, EpsLadder, MeasureWeights};
use affinedim::ifs::chaos_game;
use affinedim::ifs::polygon::ConvexPolygon;
use affinedim::rng::DEFAULT_SEED;

fn main() -> affinedim::Result<()> {
    let p = CurveFamilyParams::default();
    let ifs = curve_ifs(&p)?;
    let hull = ConvexPolygon::unit_square();
    for (i, m) in ifs.maps().iter().enumerate() {
        println!("A{} = {:?}", i + 1, m.linear.entries());
    }

    let conds = check_conds(&p);
    println!("translation window ({:.4}, {:.4}) holds: {}", conds.lo, conds.hi, conds.pass);

    let cloud = chaos_game(&ifs, &MeasureWeights::uniform(2), 500_000, DEFAULT_SEED)?;
    let lip = lipschitz_graph_check(&ifs, &cloud, &hull, 100_000, DEFAULT_SEED)?;
    println!(
        "Lipschitz graph: {} (L = {:.3}, closest chord to J {:.4} rad)",
        lip.pass, lip.lipschitz_constant, lip.min_distance_to_j
    );

    let distal = distal_check(&ifs, &cloud, &hull, 4..=8, 16, 64, DEFAULT_SEED)?;
    for level in &distal.levels {
        println!("  n = {}: B = {:.4}", level.n, level.b);
    }
    println!("distal ratio {:.3}, pass {}", distal.worst_ratio, distal.pass);

    let aff = affinity_dimension(&ifs, 16, 1e-6)?;
    let boxd = box_dimension(&cloud.points, EpsLadder::new(8, 40)?)?;
    println!(
        "affinity [{:.4}, {:.4}], box {:.4}",
        aff.bracket_lo, aff.bracket_hi, boxd.value
    );
    Ok(())
}
