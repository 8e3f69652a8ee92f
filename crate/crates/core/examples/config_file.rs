//! Loading an IFS from the JSON config format and running the same checks as
//! `affinedim verify`.

use affinedim::cli::parse_config;
use affinedim::dimension::affinity_dimension;
use affinedim::ifs::check_separation;

const CONFIG: &str = r#"{
  "schema": 1,
  "maps": [
    {"a11": 0.45, "a12": 0.05, "a21": 0.05, "a22": 0.3, "dx": 0.0, "dy": 0.0},
    {"a11": 0.3, "a12": 0.1, "a21": 0.1, "a22": 0.45, "dx": 0.6, "dy": 0.45}
  ],
  "weights": [0.6, 0.4]
}"#;

fn main() -> affinedim::Result<()> {
    let resolved = parse_config(CONFIG)?.resolve()?;
    println!("hull {:?}, rescaled: {}", resolved.hull, resolved.rescaling.is_some());
    println!("positive: {}", resolved.ifs.check_positivity());
    let sep = check_separation(&resolved.ifs, &resolved.hull.polygon(), 2)?;
    println!("separated at depth 2: {} (gap {:.4})", sep.pass, sep.min_gap);
    let rep = affinity_dimension(&resolved.ifs, 12, 1e-6)?;
    println!("affinity dimension in [{:.5}, {:.5}]", rep.bracket_lo, rep.bracket_hi);

    match parse_config(r#"{"schema": 1, "maps": [{"a11": "x"}], "hull": "circle"}"#) {
        Err(e) => println!("rejected:\n{e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
