//! The `affinedim` command line: subcommands over a JSON IFS config, each
//! writing a [`RunReport`]. Exit codes: 0 success, 1 a check failed, 2 usage
//! or configuration error.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::constructions::{
    check_conds, check_final_inequality_with, curve_ifs, find_min_N, grid_ifs, lipschitz_graph_check_in,
    perturb_ifs, perturbation_survival, CurveFamilyParams, Family, GridFamilyParams, SnSource,
};
use crate::dimension::{
    affinity_dimension, box_count_series, box_dimension, covering_number_checks, entropy, gibbs_weights,
    local_dimension_stat, lyapunov_dimension, lyapunov_dimension_se, lyapunov_exponents, pressure_curve,
    stopping_set_W, DimensionReport, EpsLadder, MeasureWeights, Method,
};
use crate::error::{Error, Result};
use crate::ifs::{chaos_game, check_separation, Hull, Word, IFS2};
use crate::projective::{check_J_S_disjoint, furstenberg_sample, invariant_interval_J, Direction};
use crate::render::{render_points, render_projection, render_template, write_csv, write_ppm, RasterSpec, Viewport};
use crate::rng::DEFAULT_SEED;

pub use config::{load_config, parse_config, IfsConfig, Resolved, Source};
pub use report::RunReport;

/// Largest `N` for which `example grid` builds the `2N²` maps.
pub const GRID_BUILD_LIMIT: usize = 500;

#[derive(Debug, Parser)]
#[command(name = "affinedim", version, about = "Dimension estimates for planar self-affine sets")]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "AFFINEDIM_THREADS")]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimension estimates.
    #[command(subcommand)]
    Dim(DimCmd),
    /// Projective dynamics of the inverse linear parts.
    #[command(subcommand)]
    Furstenberg(FurstenbergCmd),
    /// Occupancy of an ε-grid by the attractor projected along θ.
    Project(ProjectArgs),
    /// PPM images.
    #[command(subcommand)]
    Render(RenderCmd),
    /// Stopping set W(ε).
    Stopset(StopsetArgs),
    /// The two built-in families and their certificates.
    #[command(subcommand)]
    Example(ExampleCmd),
    /// Certificate survival under random perturbation.
    Perturb(PerturbArgs),
    /// Positivity, separation and J/S disjointness.
    Verify(VerifyArgs),
    /// Empirical local dimension of a projected measure.
    #[command(subcommand)]
    Diagnose(DiagnoseCmd),
    /// Covering-number comparisons.
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Debug, Args)]
struct IfsArg {
    /// IFS config (JSON).
    #[arg(long)]
    ifs: PathBuf,
}

#[derive(Debug, Args)]
struct SeedArg {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum DimCmd {
    /// Affinity dimension bracket from the pressure bounds.
    Affinity {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Also write the pressure curves over s ∈ [0, 2].
        #[arg(long)]
        pressure_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
    },
    /// Box-counting dimension of a chaos-game cloud.
    Box {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 1_000_000)]
        points: usize,
        #[arg(long, default_value_t = 4)]
        k_min: u32,
        #[arg(long, default_value_t = 9)]
        k_max: u32,
        /// Write the (ε, count) series.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Lyapunov dimension of a Bernoulli or level-n Gibbs measure.
    Lyapunov {
        #[command(flatten)]
        ifs: IfsArg,
        /// Word length per sample.
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Use the level-n Gibbs measure at the upper affinity root instead of
        /// the configured weights.
        #[arg(long)]
        gibbs: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Debug, Subcommand)]
enum FurstenbergCmd {
    /// Samples the chain θ ↦ φ_a(θ).
    Sample {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 1000)]
        burnin: usize,
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        /// Write a 256-bin histogram over [π/2, π].
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[command(flatten)]
    ifs: IfsArg,
    /// Direction angle in radians (mod π).
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 1.0 / 256.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 100_000)]
    points: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct RasterArgs {
    #[arg(long, default_value_t = 512)]
    width: usize,
    #[arg(long, default_value_t = 512)]
    height: usize,
    #[arg(long)]
    ppm: PathBuf,
}

#[derive(Debug, Subcommand)]
enum RenderCmd {
    /// Chaos-game cloud coloured by first map.
    Points {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 200_000)]
        points: usize,
        #[command(flatten)]
        raster: RasterArgs,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Outlines of the images of the unit square up to `depth`.
    Template {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[command(flatten)]
        raster: RasterArgs,
    },
}

#[derive(Debug, Args)]
struct StopsetArgs {
    #[command(flatten)]
    ifs: IfsArg,
    #[arg(long)]
    epsilon: f64,
    /// Write the words, one per line.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SnKind {
    ClosedForm,
    Solver,
}

#[derive(Debug, Subcommand)]
enum ExampleCmd {
    /// The N × N grid of cone matrices.
    Grid(GridArgs),
    /// The two-map Lipschitz-curve family.
    Curve(CurveArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Config with a `family.grid` block; overrides the angle flags.
    #[arg(long)]
    ifs: Option<PathBuf>,
    /// Lower angle of the flat cone.
    #[arg(long, default_value_t = 0.1)]
    t1: f64,
    /// Lower angle of the steep cone.
    #[arg(long, default_value_t = 1.0)]
    t2: f64,
    /// Cone width.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_8)]
    tau: f64,
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    /// Search for the smallest N passing the inequality.
    #[arg(long = "find-N")]
    find_n: bool,
    #[arg(long, default_value_t = 10_000)]
    n_max: usize,
    #[arg(long, value_enum, default_value_t = SnKind::ClosedForm)]
    sn_source: SnKind,
    #[arg(long, default_value_t = 6)]
    sn_depth: usize,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Config with a `family.curve` block; default parameters otherwise.
    #[arg(long)]
    ifs: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    points: usize,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    #[command(flatten)]
    ifs: IfsArg,
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    ifs: IfsArg,
    /// Word length for the separation check.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 100_000)]
    points: usize,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Subcommand)]
enum DiagnoseCmd {
    /// Empirical local dimension of a projected measure.
    LocalDim {
        #[command(flatten)]
        ifs: IfsArg,
        /// Letters separated by dots, e.g. `0.1.1`.
        #[arg(long)]
        word: String,
        /// Prefix length; defaults to the whole word.
        #[arg(long)]
        n: Option<usize>,
        /// Defaults to the midpoint of J.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCmd {
    /// Covering numbers of stopping-set components and their projections.
    Covering {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, default_value_t = 1.0 / 64.0)]
        epsilon: f64,
        /// Defaults to the midpoint of J.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 4096)]
        budget: usize,
        #[arg(long, default_value_t = 200_000)]
        points: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
}

/// What a subcommand produced before it is wrapped in a report.
struct Outcome {
    seed: Option<u64>,
    result: Value,
    artifacts: Vec<PathBuf>,
    warnings: Vec<String>,
    pass: bool,
}

impl Outcome {
    fn new(seed: Option<u64>, result: Value) -> Self {
        Outcome {
            seed,
            result,
            artifacts: Vec::new(),
            warnings: Vec::new(),
            pass: true,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Exit code for an error: mathematical preconditions that fail are check
/// failures, everything else is a usage problem.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precondition(_)
        | Error::NotPositive { .. }
        | Error::HullNotInvariant { .. }
        | Error::PlacementFailed(_)
        | Error::OutOfPlanarRange { .. }
        | Error::NonNegativeExponent(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return 2;
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let start = Instant::now();
    let outcome = pool.install(|| dispatch(&cli.command));
    match outcome.and_then(|o| {
        let mut rep = RunReport::new(report::command_echo(&args), o.seed, o.result);
        rep.artifacts = o.artifacts;
        rep.warnings = o.warnings;
        if cli.timing {
            rep.timing_ms = Some(start.elapsed().as_millis());
        }
        rep.write(cli.out.as_deref())?;
        Ok(o.pass)
    }) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load(path: &Path) -> Result<Resolved> {
    load_config(path)?.resolve()
}

fn frame_json(r: &Resolved) -> Value {
    json!({ "hull": r.hull, "rescaling": r.rescaling })
}

fn frame_warning(r: &Resolved, warnings: &mut Vec<String>) {
    if let Some(s) = r.rescaling {
        warnings.push(format!(
            "maps conjugated into the unit-disc frame (center ({}, {}), radius {})",
            s.center.x, s.center.y, s.radius
        ));
    }
}

fn viewport_for(hull: Hull) -> Viewport {
    match hull {
        Hull::UnitSquare => Viewport::UNIT,
        Hull::UnitDisc => Viewport {
            xmin: -1.0,
            xmax: 1.0,
            ymin: -1.0,
            ymax: 1.0,
        },
    }
}

fn default_theta(ifs: &IFS2, theta: Option<f64>) -> Result<Direction> {
    match theta {
        Some(t) => Ok(Direction::new(t)),
        None => {
            ifs.require_positive()?;
            Ok(invariant_interval_J(ifs)?.midpoint())
        }
    }
}

fn parse_word(s: &str, alphabet: usize) -> Result<Word> {
    let letters = s
        .split('.')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let a: usize = t
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad letter {t:?} in word {s:?}")))?;
            if a >= alphabet {
                return Err(Error::LetterOutOfRange { letter: a, alphabet });
            }
            Ok(a)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Word::new(letters))
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Dim(c) => dim(c),
        Command::Furstenberg(FurstenbergCmd::Sample {
            ifs,
            burnin,
            count,
            csv,
            seed,
        }) => furstenberg(&ifs.ifs, *burnin, *count, csv.as_deref(), seed.seed),
        Command::Project(a) => project(a),
        Command::Render(c) => render(c),
        Command::Stopset(a) => stopset(a),
        Command::Example(ExampleCmd::Grid(a)) => example_grid(a),
        Command::Example(ExampleCmd::Curve(a)) => example_curve(a),
        Command::Perturb(a) => perturb(a),
        Command::Verify(a) => verify(a),
        Command::Diagnose(DiagnoseCmd::LocalDim {
            ifs,
            word,
            n,
            theta,
            samples,
            seed,
        }) => {
            let r = load(&ifs.ifs)?;
            let a = parse_word(word, r.ifs.len())?;
            let theta = default_theta(&r.ifs, *theta)?;
            let n = n.unwrap_or(a.len());
            let stat = local_dimension_stat(&r.ifs, &r.weights, theta, &a, n, *samples, seed.seed)?;
            let mut o = Outcome::new(
                Some(seed.seed),
                json!({ "theta": theta.angle(), "word": a, "n": n, "local": stat, "frame": frame_json(&r) }),
            );
            if stat.undersampled {
                o.warnings.push(format!("only {} samples in the ball", stat.hits));
            }
            frame_warning(&r, &mut o.warnings);
            Ok(o)
        }
        Command::Check(CheckCmd::Covering {
            ifs,
            epsilon,
            theta,
            budget,
            points,
            seed,
        }) => {
            let r = load(&ifs.ifs)?;
            let theta = default_theta(&r.ifs, *theta)?;
            let rep = covering_number_checks(
                &r.ifs,
                &r.hull.polygon(),
                *epsilon,
                theta,
                *budget,
                *points,
                seed.seed,
            )?;
            let mut o = Outcome::new(Some(seed.seed), json!({ "covering": rep, "frame": frame_json(&r) }));
            o.pass = rep.pass;
            frame_warning(&r, &mut o.warnings);
            Ok(o)
        }
    }
}

fn dim(c: &DimCmd) -> Result<Outcome> {
    match c {
        DimCmd::Affinity {
            ifs,
            depth,
            tol,
            pressure_csv,
            grid_step,
        } => {
            let r = load(&ifs.ifs)?;
            let rep = affinity_dimension(&r.ifs, *depth, *tol)?;
            let mut o = Outcome::new(None, to_value(&rep));
            o.warnings.extend(rep.warnings.iter().cloned());
            if let Some(path) = pressure_csv {
                if !(*grid_step > 0.0 && *grid_step <= 2.0) {
                    return Err(Error::invalid(format!("grid step {grid_step} must lie in (0, 2]")));
                }
                let steps = (2.0 / grid_step).round() as usize;
                let grid: Vec<f64> = (0..=steps).map(|k| (k as f64 * grid_step).min(2.0)).collect();
                write_csv(&pressure_curve(&r.ifs, *depth, &grid)?.csv_rows(), path)?;
                o.artifacts.push(path.clone());
            }
            Ok(o)
        }
        DimCmd::Box {
            ifs,
            points,
            k_min,
            k_max,
            csv,
            seed,
        } => {
            let r = load(&ifs.ifs)?;
            let ladder = EpsLadder::new(*k_min, *k_max)?;
            let cloud = chaos_game(&r.ifs, &r.weights, *points, seed.seed)?;
            let mut rep = box_dimension(&cloud.points, ladder)?;
            rep.seed = Some(seed.seed);
            let mut o = Outcome::new(Some(seed.seed), to_value(&rep));
            o.warnings.extend(rep.warnings.iter().cloned());
            if let Some(path) = csv {
                write_csv(&box_count_series(&cloud.points, ladder)?.csv_rows(), path)?;
                o.artifacts.push(path.clone());
            }
            Ok(o)
        }
        DimCmd::Lyapunov {
            ifs,
            n,
            samples,
            gibbs,
            seed,
        } => {
            let r = load(&ifs.ifs)?;
            let weights = match gibbs {
                Some(level) => {
                    let s = affinity_dimension(&r.ifs, *level, 1e-6)?.bracket_hi;
                    gibbs_weights(&r.ifs, *level, s)?
                }
                None => r.weights.clone(),
            };
            let h = entropy(&weights);
            let est = lyapunov_exponents(&r.ifs, &weights, *n, *samples, seed.seed)?;
            let d = lyapunov_dimension(h, est.l1, est.l2)?;
            let se = lyapunov_dimension_se(h, est.l1, est.l2, est.se1, est.se2);
            let mut rep = DimensionReport::new(Method::Lyapunov, d.value, d.value - 2.0 * se, d.value + 2.0 * se);
            rep.depth = Some(est.n);
            rep.seed = Some(seed.seed);
            for (k, v) in [
                ("entropy", h),
                ("l1", est.l1),
                ("l2", est.l2),
                ("se1", est.se1),
                ("se2", est.se2),
                ("se", se),
                ("samples", est.samples as f64),
            ] {
                rep.extra.insert(k.into(), v);
            }
            if let MeasureWeights::Gibbs(g) = &weights {
                rep.extra.insert("gibbs_level".into(), g.n as f64);
                rep.extra.insert("gibbs_s".into(), g.s);
            }
            if d.capped {
                rep.warnings.push("Lyapunov dimension capped at 2".into());
            }
            let mut o = Outcome::new(Some(seed.seed), to_value(&rep));
            o.warnings.extend(rep.warnings.iter().cloned());
            Ok(o)
        }
    }
}

fn furstenberg(path: &Path, burnin: usize, count: usize, csv: Option<&Path>, seed: u64) -> Result<Outcome> {
    let r = load(path)?;
    let sample = furstenberg_sample(&r.ifs, &r.weights, burnin, count, seed)?;
    let hist = sample.histogram();
    let j = if r.ifs.check_positivity() {
        Some(invariant_interval_J(&r.ifs)?)
    } else {
        None
    };
    let in_j = j.map(|j| {
        sample.angles.iter().filter(|&&d| j.contains_tol(d, 1e-12)).count() as f64 / count.max(1) as f64
    });
    let mut o = Outcome::new(
        Some(seed),
        json!({
            "burnin": burnin,
            "count": count,
            "J": j,
            "fraction_in_J": in_j,
            "occupied_bins": hist.iter().filter(|&&h| h > 0).count(),
            "frame": frame_json(&r),
        }),
    );
    if let Some(path) = csv {
        let width = std::f64::consts::FRAC_PI_2 / hist.len() as f64;
        let mut rows = vec![vec!["bin_lo".to_string(), "count".to_string()]];
        rows.extend(hist.iter().enumerate().map(|(k, c)| {
            vec![(std::f64::consts::FRAC_PI_2 + k as f64 * width).to_string(), c.to_string()]
        }));
        write_csv(&rows, path)?;
        o.artifacts.push(path.to_path_buf());
    }
    frame_warning(&r, &mut o.warnings);
    Ok(o)
}

fn project(a: &ProjectArgs) -> Result<Outcome> {
    let r = load(&a.ifs.ifs)?;
    let occ = render_projection(&r.ifs, &r.weights, Direction::new(a.theta), a.epsilon, a.points, a.seed.seed)?;
    let mut o = Outcome::new(
        Some(a.seed.seed),
        json!({
            "theta": occ.theta,
            "epsilon": occ.epsilon,
            "points": occ.points,
            "first_cell": occ.first_cell,
            "cells_spanned": occ.occupied.len(),
            "cells_occupied": occ.count(),
            "frame": frame_json(&r),
        }),
    );
    if let Some(path) = &a.csv {
        write_csv(&occ.csv_rows(), path)?;
        o.artifacts.push(path.clone());
    }
    frame_warning(&r, &mut o.warnings);
    Ok(o)
}

fn render(c: &RenderCmd) -> Result<Outcome> {
    let (path, raster, seed, r) = match c {
        RenderCmd::Points {
            ifs,
            points,
            raster,
            seed,
        } => {
            let r = load(&ifs.ifs)?;
            let spec = RasterSpec {
                width: raster.width,
                height: raster.height,
                viewport: viewport_for(r.hull),
            };
            let cloud = chaos_game(&r.ifs, &r.weights, *points, seed.seed)?;
            (&raster.ppm, render_points(&cloud, spec)?, Some(seed.seed), r)
        }
        RenderCmd::Template { ifs, depth, raster } => {
            let r = load(&ifs.ifs)?;
            let spec = RasterSpec {
                width: raster.width,
                height: raster.height,
                viewport: viewport_for(r.hull),
            };
            (&raster.ppm, render_template(&r.ifs, *depth, spec)?, None, r)
        }
    };
    write_ppm(&raster, path)?;
    let mut o = Outcome::new(
        seed,
        json!({
            "width": raster.width(),
            "height": raster.height(),
            "lit_pixels": raster.lit().len(),
            "frame": frame_json(&r),
        }),
    );
    o.artifacts.push(path.clone());
    frame_warning(&r, &mut o.warnings);
    Ok(o)
}

fn stopset(a: &StopsetArgs) -> Result<Outcome> {
    let r = load(&a.ifs.ifs)?;
    let stop = stopping_set_W(&r.ifs, a.epsilon)?;
    let mut o = Outcome::new(
        None,
        json!({
            "epsilon": a.epsilon,
            "words": stop.words.len(),
            "min_len": stop.min_len(),
            "max_len": stop.max_len(),
            "kraft_sum": stop.kraft_sum(r.ifs.len()),
        }),
    );
    if let Some(path) = &a.csv {
        let mut rows = vec![vec!["word".to_string(), "length".to_string()]];
        rows.extend(stop.words.iter().map(|w| {
            let s: Vec<String> = w.letters().iter().map(usize::to_string).collect();
            vec![s.join("."), w.len().to_string()]
        }));
        write_csv(&rows, path)?;
        o.artifacts.push(path.clone());
    }
    Ok(o)
}

fn family_from(path: &Path) -> Result<Source> {
    Ok(load_config(path)?.source)
}

fn example_grid(a: &GridArgs) -> Result<Outcome> {
    let mut p = match &a.ifs {
        Some(path) => match family_from(path)? {
            Source::Grid(p) => p,
            _ => return Err(Error::Config(vec!["family: expected a grid block".into()])),
        },
        None => GridFamilyParams::new(a.t1, a.t2, a.tau, a.n),
    };
    let source = match a.sn_source {
        SnKind::ClosedForm => SnSource::ClosedForm,
        SnKind::Solver => SnSource::Solver { depth: a.sn_depth },
    };
    let mut warnings = Vec::new();
    let mut n_star = None;
    if a.find_n {
        p.with_n(2).validate()?;
        match find_min_N(&p, a.n_max, source)? {
            Some(n) => {
                p = p.with_n(n);
                n_star = Some(n);
            }
            None => {
                let mut o = Outcome::new(
                    None,
                    json!({ "params": p, "N_star": null, "n_max": a.n_max, "pass": false }),
                );
                o.warnings.push(format!("no N ≤ {} satisfies the inequality", a.n_max));
                o.pass = false;
                return Ok(o);
            }
        }
    }
    let fin = check_final_inequality_with(&p, source)?;
    let (positivity, separation) = if p.n <= GRID_BUILD_LIMIT {
        let ifs = grid_ifs(&p)?;
        let sep = check_separation(&ifs, &Hull::UnitSquare.polygon(), 1)?;
        (Some(ifs.check_positivity()), Some(sep.pass))
    } else {
        warnings.push(format!(
            "N = {} exceeds the build limit {GRID_BUILD_LIMIT}; maps not constructed",
            p.n
        ));
        (None, None)
    };
    let pass = fin.pass && positivity != Some(false) && separation != Some(false);
    let mut o = Outcome::new(
        None,
        json!({
            "params": p,
            "N_star": n_star,
            "checks": {
                "positivity": positivity,
                "separation": separation,
                "final_or_conds": fin,
                "J_S_gap": null,
            },
            "pass": pass,
        }),
    );
    o.warnings = warnings;
    o.pass = pass;
    Ok(o)
}

fn example_curve(a: &CurveArgs) -> Result<Outcome> {
    let p = match &a.ifs {
        Some(path) => match family_from(path)? {
            Source::Curve(p) => p,
            _ => return Err(Error::Config(vec!["family: expected a curve block".into()])),
        },
        None => CurveFamilyParams::default(),
    };
    let seed = a.seed.seed;
    let ifs = curve_ifs(&p)?;
    let hull = Hull::UnitSquare.polygon();
    let conds = check_conds(&p);
    let sep = check_separation(&ifs, &hull, 1)?;
    let cloud = chaos_game(&ifs, &MeasureWeights::uniform(ifs.len()), a.points, seed)?;
    let js = check_J_S_disjoint(&ifs, &cloud, &hull)?;
    let lip = lipschitz_graph_check_in(&js.j, &cloud, a.pairs, seed)?;
    let positivity = ifs.check_positivity();
    let pass = positivity && sep.pass && conds.pass && js.pass && lip.pass;
    let mut o = Outcome::new(
        Some(seed),
        json!({
            "params": p,
            "checks": {
                "positivity": positivity,
                "separation": sep.pass,
                "final_or_conds": conds,
                "J_S_gap": js.gap,
                "lipschitz": lip,
            },
            "pass": pass,
        }),
    );
    o.pass = pass;
    Ok(o)
}

fn perturb(a: &PerturbArgs) -> Result<Outcome> {
    let cfg = load_config(&a.ifs.ifs)?;
    let seed = a.seed.seed;
    let family = match cfg.source {
        Source::Grid(p) => {
            if p.n > GRID_BUILD_LIMIT {
                return Err(Error::invalid(format!(
                    "N = {} exceeds the build limit {GRID_BUILD_LIMIT}",
                    p.n
                )));
            }
            Some(Family::Grid(p))
        }
        Source::Curve(p) => Some(Family::Curve(p)),
        Source::Maps(_) => None,
    };
    let result = match family {
        Some(f) => to_value(&perturbation_survival(&f, a.delta, a.trials, seed)?),
        None => {
            let r = cfg.resolve()?;
            let hull = r.hull.polygon();
            let base_positive = r.ifs.check_positivity();
            let mut valid = 0;
            let mut positivity = 0;
            let mut separation = 0;
            let mut all = 0;
            for t in 0..a.trials {
                let Ok(q) = perturb_ifs(&r.ifs, a.delta, seed.wrapping_add(t as u64)) else {
                    continue;
                };
                valid += 1;
                let pos = !base_positive || q.check_positivity();
                let sep = check_separation(&q, &hull, 1).is_ok_and(|s| s.pass);
                positivity += usize::from(pos);
                separation += usize::from(sep);
                all += usize::from(pos && sep);
            }
            json!({
                "delta": a.delta,
                "trials": a.trials,
                "valid": valid,
                "positivity": positivity,
                "separation": separation,
                "all": all,
            })
        }
    };
    let kept = result["all"].as_u64() == Some(a.trials as u64);
    let mut o = Outcome::new(Some(seed), result);
    o.pass = kept;
    Ok(o)
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let r = load(&a.ifs.ifs)?;
    let seed = a.seed.seed;
    let positivity = r.ifs.check_positivity();
    let sep = check_separation(&r.ifs, &r.hull.polygon(), a.depth)?;
    let mut notes = Vec::new();
    let js = if positivity {
        let cloud = chaos_game(&r.ifs, &r.weights, a.points, seed)?;
        match check_J_S_disjoint(&r.ifs, &cloud, &r.hull.polygon()) {
            Ok(js) => Some(js),
            Err(Error::Precondition(m)) => {
                notes.push(format!("J/S not evaluated: {m}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        notes.push("J/S not evaluated: matrices not positive".into());
        None
    };
    let pass = positivity && sep.pass && js.as_ref().is_some_and(|j| j.pass);
    let mut o = Outcome::new(
        Some(seed),
        json!({
            "positivity": positivity,
            "separation": sep,
            "J_S": js,
            "frame": frame_json(&r),
            "pass": pass,
        }),
    );
    o.warnings = notes;
    o.pass = pass;
    frame_warning(&r, &mut o.warnings);
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_parsing() {
        assert_eq!(parse_word("0.1.1", 2).unwrap().letters(), &[0, 1, 1]);
        assert!(parse_word("", 2).unwrap().is_empty());
        assert!(matches!(parse_word("0.2", 2), Err(Error::LetterOutOfRange { .. })));
        assert!(parse_word("0.x", 2).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["affinedim", "no-such-command"]), 2);
        assert_eq!(run(["affinedim", "dim", "affinity"]), 2);
        assert_eq!(run(["affinedim", "--help"]), 0);
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Precondition("x".into())), 1);
        assert_eq!(exit_code(&Error::Config(vec![])), 2);
        assert_eq!(exit_code(&Error::invalid("x")), 2);
    }
}
