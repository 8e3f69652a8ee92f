//! Writes three images to the temp directory: the depth-2 template of the
//! grid family, its attractor coloured by first map, and a projection CSV.

use affinedim::constructions::{grid_ifs, GridFamilyParams};
use affinedim::dimension::MeasureWeights;
use affinedim::ifs::chaos_game;
use affinedim::projective::invariant_interval_J;
use affinedim::render::{render_points, render_projection, render_template, write_csv, write_ppm, RasterSpec};
use affinedim::rng::DEFAULT_SEED;

fn main() -> affinedim::Result<()> {
    let ifs = grid_ifs(&GridFamilyParams::new(0.1, 1.0, std::f64::consts::FRAC_PI_8, 3))?;
    let dir = std::env::temp_dir();
    let spec = RasterSpec::unit(600, 600);

    let template = render_template(&ifs, 2, spec)?;
    let path = dir.join("grid_template.ppm");
    write_ppm(&template, &path)?;
    println!("{} ({} lit pixels)", path.display(), template.lit().len());

    let uniform = MeasureWeights::uniform(ifs.len());
    let cloud = chaos_game(&ifs, &uniform, 400_000, DEFAULT_SEED)?;
    let points = render_points(&cloud, spec)?;
    let path = dir.join("grid_points.ppm");
    write_ppm(&points, &path)?;
    println!("{} ({} lit pixels)", path.display(), points.lit().len());

    let theta = invariant_interval_J(&ifs)?.midpoint();
    let occ = render_projection(&ifs, &uniform, theta, 1.0 / 512.0, 200_000, DEFAULT_SEED)?;
    let path = dir.join("grid_projection.csv");
    write_csv(&occ.csv_rows(), &path)?;
    println!(
        "{} ({} of {} cells occupied along θ = {:.4})",
        path.display(),
        occ.count(),
        occ.occupied.len(),
        occ.theta
    );
    Ok(())
}
