//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines always print; exits 1 if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use affinedim::constructions::{
    check_conds, check_final_inequality, curve_ifs, find_min_N, grid_ifs, lipschitz_graph_check, CurveFamilyParams,
    GridFamilyParams, SnSource,
};
use affinedim::dimension::{
    affinity_dimension, box_dimension, covering_number_checks, entropy, gibbs_weights, lyapunov_dimension,
    lyapunov_dimension_se, lyapunov_exponents, EpsLadder, MeasureWeights,
};
use affinedim::ifs::polygon::ConvexPolygon;
use affinedim::ifs::projection::{f_theta, project_points, self_similarity_defect};
use affinedim::ifs::{chaos_game, cloud_covering_radius, AffineMap2, IFS2};
use affinedim::linalg2::{eigen_real, singular_values, Matrix2, Vec2};
use affinedim::projective::{
    empirical_contraction_ratio, furstenberg_sample, invariant_interval_J, phi, phi_matrix, Direction,
};
use affinedim::constructions::cone_matrix;
use rand::Rng;
use serde_json::json;

const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
    /// Deterministic numbers behind the verdict, compared across thread counts.
    report: String,
}

fn similarity_ifs(ratio: f64, translations: &[(f64, f64)]) -> IFS2 {
    IFS2::new(
        translations
            .iter()
            .map(|&(x, y)| AffineMap2::new(Matrix2::IDENTITY.scale(ratio), Vec2::new(x, y)))
            .collect(),
    )
    .unwrap()
}

fn grid_example(n: usize) -> GridFamilyParams {
    GridFamilyParams::new(0.1, 1.0, FRAC_PI_8, n)
}

/// Angular distance on RP¹ from raw angles, written out independently.
fn rp1_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Root of a decreasing function by plain bisection.
fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn c1_similarity_closed_forms() -> Verdict {
    let cases = [
        (similarity_ifs(1.0 / 3.0, &[(0.0, 0.0), (2.0 / 3.0, 0.0)]), 2f64.ln() / 3f64.ln()),
        (
            similarity_ifs(0.5, &[(0.0, 0.0), (0.5, 0.0), (0.25, 0.5)]),
            3f64.ln() / 2f64.ln(),
        ),
    ];
    let mut errs = Vec::new();
    let mut times = Vec::new();
    for (ifs, exact) in &cases {
        let t = Instant::now();
        let rep = affinity_dimension(ifs, 16, 1e-6).unwrap();
        times.push(t.elapsed());
        errs.push((rep.value - exact).abs().max((rep.bracket_hi - exact).abs()));
    }
    let pass = errs.iter().all(|&e| e < 1e-4) && times.iter().all(|t| t.as_secs_f64() < 10.0);
    Verdict {
        pass,
        detail: format!(
            "|err| = {:.1e}, {:.1e} (tol 1e-4, depth 16); {}, {} (limit 10 s)",
            errs[0],
            errs[1],
            secs(times[0]),
            secs(times[1])
        ),
        report: format!("{errs:?}"),
    }
}

fn c2_equal_matrix_closed_form() -> Verdict {
    let m = Matrix2::diag(0.8, 0.4);
    let ifs = IFS2::new(vec![
        AffineMap2::new(m, Vec2::new(0.0, 0.0)),
        AffineMap2::new(m, Vec2::new(0.2, 0.6)),
    ])
    .unwrap();
    let oracle = bisect_root(|s| 2.0 * 0.8 * 0.4f64.powf(s - 1.0) - 1.0, 1.0, 2.0);
    let rep = affinity_dimension(&ifs, 12, 1e-6).unwrap();
    let err = (rep.bracket_hi - oracle).abs();
    let flagged = rep.bracket_lo == 0.0 && !rep.warnings.is_empty();
    Verdict {
        pass: err < 1e-3 && flagged,
        detail: format!(
            "upper root {:.6} vs oracle {oracle:.6}, |err| = {err:.1e} (tol 1e-3); lower bracket flagged: {flagged}",
            rep.bracket_hi
        ),
        report: format!("{:?} {oracle:?} {flagged}", rep.bracket_hi),
    }
}

fn c3_pressure_bracket_nesting() -> Verdict {
    let ifs = grid_ifs(&grid_example(3)).unwrap();
    let t = Instant::now();
    let shallow = affinity_dimension(&ifs, 6, 1e-6).unwrap();
    let deep = affinity_dimension(&ifs, 10, 1e-6).unwrap();
    let elapsed = t.elapsed();
    let tol = 1e-9;
    let nested = shallow.bracket_lo <= deep.bracket_lo + tol && deep.bracket_hi <= shallow.bracket_hi + tol;
    let w6 = shallow.bracket_hi - shallow.bracket_lo;
    let w10 = deep.bracket_hi - deep.bracket_lo;
    let shrink = 1.0 - w10 / w6;
    Verdict {
        pass: nested && shrink >= 0.3 && elapsed.as_secs_f64() < 60.0,
        detail: format!(
            "depth 6 [{:.5}, {:.5}] ⊇ depth 10 [{:.5}, {:.5}]: {nested}; width shrink {:.1}% (need ≥ 30%); {} (limit 60 s)",
            shallow.bracket_lo,
            shallow.bracket_hi,
            deep.bracket_lo,
            deep.bracket_hi,
            100.0 * shrink,
            secs(elapsed)
        ),
        report: format!("{:?}", [shallow.bracket_lo, shallow.bracket_hi, deep.bracket_lo, deep.bracket_hi]),
    }
}

fn c4_furstenberg_fixed_point() -> Verdict {
    let m = Matrix2::new(2.0, 1.0, 1.0, 1.0);
    let mut theta = Direction::new(3.0 * PI / 4.0);
    for _ in 0..200 {
        theta = phi_matrix(&m, theta).unwrap();
    }
    // Eigenvector of the smaller eigenvalue λ = (3 − √5)/2 solves (2 − λ)x + y = 0.
    let lambda = (3.0 - 5f64.sqrt()) / 2.0;
    let oracle = (lambda - 2.0).atan2(1.0);
    let err = rp1_distance(theta.angle(), oracle);
    Verdict {
        pass: err < 1e-8,
        detail: format!("distance to contracting eigendirection {err:.1e} (tol 1e-8, 200 iterations)"),
        report: format!("{:?}", theta.angle()),
    }
}

fn c5_contraction_bound() -> Verdict {
    let (lo, hi) = (PI / 6.0, PI / 6.0 + FRAC_PI_8);
    let m = cone_matrix(lo, hi).unwrap();
    let bound = PI / 64.0;
    let adj = [[m.a22, -m.a12], [-m.a21, m.a11]];
    let image = |t: f64| {
        let (c, s) = (t.cos(), t.sin());
        (adj[1][0] * c + adj[1][1] * s).atan2(adj[0][0] * c + adj[0][1] * s)
    };
    let mut rng = affinedim::rng::stream_rng(SEED, 5);
    let mut min_ratio = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..10_000 {
        let t1 = rng.gen_range(FRAC_PI_2..PI);
        let t2 = rng.gen_range(FRAC_PI_2..PI);
        let d = rp1_distance(t1, t2);
        if d == 0.0 {
            continue;
        }
        let r = rp1_distance(image(t1), image(t2)) / d;
        min_ratio = min_ratio.min(r);
        if r < bound {
            violations += 1;
        }
    }
    let lib = empirical_contraction_ratio(&m, 10_000, SEED).unwrap();
    Verdict {
        pass: violations == 0 && lib >= bound,
        detail: format!(
            "min ratio {min_ratio:.5} (oracle), {lib:.5} (library) ≥ π/64 = {bound:.5}; {violations} exceptions in 10⁴ pairs"
        ),
        report: format!("{min_ratio:?} {lib:?}"),
    }
}

fn c6_eigen_singular_bound() -> Verdict {
    let mut rng = affinedim::rng::stream_rng(SEED, 6);
    let mut violations = 0;
    let mut worst_slack = f64::INFINITY;
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let e: [f64; 4] = std::array::from_fn(|_| rng.gen_range(1e-3..1.0));
        let (a, b, c, d) = (e[0], e[1], e[2], e[3]);
        // Eigenvalues of [[a, b], [c, d]] and eigenvectors (b, λ − a).
        let tr = a + d;
        let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
        let l1 = (tr + disc) / 2.0;
        let lam = [l1, (a * d - b * c) / l1];
        let vec = |l: f64| {
            let (x, y) = (b, l - a);
            let n = x.hypot(y);
            (x / n, y / n)
        };
        let (v1, v2) = (vec(lam[0]), vec(lam[1]));
        let dot = v1.0 * v2.0 + v1.1 * v2.1;
        // Singular values from the eigenvalues of AᵀA.
        let (p, q, r) = (a * a + c * c, a * b + c * d, b * b + d * d);
        let sd = ((p - r) * (p - r) + 4.0 * q * q).sqrt();
        let top = (p + r + sd) / 2.0;
        let alpha = [top.sqrt(), ((p * r - q * q) / top).sqrt()];
        let bound = 4.0 / (1.0 - dot * dot);
        let worst = (0..2)
            .map(|i| (alpha[i] / lam[i].abs()).max(lam[i].abs() / alpha[i]))
            .fold(0.0, f64::max);
        if worst > bound * (1.0 + 1e-12) {
            violations += 1;
        }
        worst_slack = worst_slack.min(bound - worst);

        let m = Matrix2::new(a, b, c, d);
        let sv = singular_values(&m).unwrap();
        let eg = eigen_real(&m).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-300);
        if rel(sv.alpha1, alpha[0]) > 1e-8
            || rel(sv.alpha2, alpha[1]) > 1e-6
            || rel(eg.lambda1, lam[0]) > 1e-8
            || rel(eg.lambda2, lam[1]) > 1e-6
        {
            mismatches += 1;
        }
    }
    Verdict {
        pass: violations == 0 && mismatches == 0,
        detail: format!(
            "{violations} violations of max(αᵢ/|λᵢ|, |λᵢ|/αᵢ) ≤ 4/(1 − |e₁·e₂|²) in 10⁴ matrices; min slack {worst_slack:.3}; library disagreements {mismatches}"
        ),
        report: format!("{violations} {worst_slack:?} {mismatches}"),
    }
}

fn c7_box_calibration() -> Verdict {
    let segment = similarity_ifs(0.5, &[(0.0, 0.0), (0.5, 0.0)]);
    let gasket = similarity_ifs(0.5, &[(0.0, 0.0), (0.5, 0.0), (0.25, 0.5)]);
    let cases = [(segment, 1.0, 0.03), (gasket, 3f64.ln() / 2f64.ln(), 0.05)];
    let mut values = Vec::new();
    let mut times = Vec::new();
    let mut pass = true;
    for (ifs, exact, tol) in &cases {
        let t = Instant::now();
        let cloud = chaos_game(ifs, &MeasureWeights::uniform(ifs.len()), 1_000_000, SEED).unwrap();
        let rep = box_dimension(&cloud.points, EpsLadder::new(4, 9).unwrap()).unwrap();
        let el = t.elapsed();
        pass &= (rep.value - exact).abs() <= *tol && el.as_secs_f64() < 30.0;
        values.push(rep.value);
        times.push(el);
    }
    Verdict {
        pass,
        detail: format!(
            "segment {:.4} (1 ± 0.03), gasket {:.4} ({:.4} ± 0.05); 10⁶ points, ε = 2⁻⁴..2⁻⁹; {}, {} (limit 30 s)",
            values[0],
            values[1],
            3f64.ln() / 2f64.ln(),
            secs(times[0]),
            secs(times[1])
        ),
        report: format!("{values:?}"),
    }
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/grid_certificate.json")
}

/// Smallest passing `N` found by doubling then bisection; a diagnostic for
/// when the linear scan gives up.
fn locate_threshold(p: &GridFamilyParams) -> Option<u64> {
    let passes = |n: u64| check_final_inequality(&p.with_n(n as usize)).is_ok_and(|f| f.pass);
    let mut hi = 2u64;
    while !passes(hi) {
        hi = hi.checked_mul(2)?;
        if hi > 1 << 60 {
            return None;
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn c8_grid_certificate() -> Verdict {
    let p = grid_example(2);
    let n_max = 1_000_000;
    let found = find_min_N(&p, n_max, SnSource::ClosedForm).unwrap();
    let record = json!({
        "angles": [p.tau1_minus, p.tau1_plus, p.tau2_minus, p.tau2_plus],
        "n_max": n_max,
        "N_star": found,
    });
    let path = golden_path();
    let golden_ok = match std::fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str::<serde_json::Value>(&text).is_ok_and(|g| g["N_star"] == record["N_star"] && g["n_max"] == record["n_max"]),
        Err(_) => {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, serde_json::to_string_pretty(&record).unwrap() + "\n").unwrap();
            true
        }
    };
    let (detail, pass) = match found {
        Some(n) => {
            let fin = check_final_inequality(&p.with_n(n)).unwrap();
            let survive = if n <= 500 {
                let fam = affinedim::constructions::Family::Grid(p.with_n(n));
                let s = affinedim::constructions::perturbation_survival(&fam, 1e-5, 100, SEED).unwrap();
                s.all == 100
            } else {
                false
            };
            (
                format!("N* = {n}, margin {:.3e}; 100 perturbations at δ = 1e-5 kept: {survive}", fin.margin),
                fin.margin > 0.0 && survive && golden_ok,
            )
        }
        None => {
            let beyond = locate_threshold(&p);
            (
                format!(
                    "no N ≤ 10⁶ passes; the inequality first holds at N ≈ {}; perturbation check not run; golden record matches: {golden_ok}",
                    beyond.map_or("> 2⁶⁰".into(), |n| format!("{n:.3e}", n = n as f64))
                ),
                false,
            )
        }
    };
    Verdict {
        pass,
        detail,
        report: record.to_string(),
    }
}

/// The pieces shrink by about 1/20 per level, so a long ladder is needed to
/// average over several levels of the construction.
const CURVE_LADDER: (u32, u32) = (8, 40);

fn c9_curve_certificate() -> Verdict {
    let p = CurveFamilyParams::default();
    let ifs = curve_ifs(&p).unwrap();
    let hull = ConvexPolygon::unit_square();
    let conds = check_conds(&p);
    let lo = 0.05 * 1.1f64.powi(2);
    let hi = 1.0 - lo;
    let window_ok = conds.pass && (conds.lo - lo).abs() < 1e-12 && (conds.hi - hi).abs() < 1e-12;
    let cloud = chaos_game(&ifs, &MeasureWeights::uniform(2), 1_000_000, SEED).unwrap();
    let lip = lipschitz_graph_check(&ifs, &cloud, &hull, 100_000, SEED).unwrap();
    let js = affinedim::projective::check_J_S_disjoint(&ifs, &cloud, &hull).unwrap();
    let aff = affinity_dimension(&ifs, 16, 1e-6).unwrap();
    let width = aff.bracket_hi - aff.bracket_lo;
    let boxd = box_dimension(&cloud.points, EpsLadder::new(CURVE_LADDER.0, CURVE_LADDER.1).unwrap()).unwrap();
    let in_bracket = boxd.value >= aff.bracket_lo - 0.05 && boxd.value <= aff.bracket_hi + 0.05;
    Verdict {
        pass: window_ok && js.gap > 0.0 && lip.pass && width < 0.02 && in_bracket,
        detail: format!(
            "window ({:.4}, {:.4}) vs ({lo:.4}, {hi:.4}); J/S gap {:.4}; Lipschitz on 10⁵ pairs: {} (L = {:.3}); affinity [{:.4}, {:.4}] width {:.1e} (< 0.02); box {:.4} (ε = 2^-{}..2^-{}) within bracket ± 0.05: {in_bracket}",
            conds.lo, conds.hi, js.gap, lip.pass, lip.lipschitz_constant, aff.bracket_lo, aff.bracket_hi, width, boxd.value, CURVE_LADDER.0, CURVE_LADDER.1
        ),
        report: format!(
            "{:?}",
            [conds.lo, conds.hi, js.gap, lip.lipschitz_constant, aff.bracket_lo, aff.bracket_hi, boxd.value]
        ),
    }
}

fn c10_projection_identity() -> Verdict {
    let ifs = grid_ifs(&grid_example(3)).unwrap();
    let uniform = MeasureWeights::uniform(ifs.len());
    let cloud = chaos_game(&ifs, &uniform, 200_000, SEED).unwrap();
    let radius = cloud_covering_radius(&ifs, &cloud, &ConvexPolygon::unit_square(), 1 << 14);
    let thetas = furstenberg_sample(&ifs, &uniform, 100, 20, SEED).unwrap().angles;
    let mut worst_defect = 0.0f64;
    let mut worst_identity = 0.0f64;
    for &theta in &thetas {
        worst_defect = worst_defect.max(self_similarity_defect(&ifs, &cloud, theta).unwrap());
        // π_θ(Tᵢx) computed directly must match fᵢ,θ(π_{φᵢθ}(x)) pointwise.
        for i in 0..ifs.len() {
            let f = f_theta(&ifs, i, theta).unwrap();
            let psi = phi(&ifs, i, theta).unwrap();
            let direct = project_points(&cloud.mapped(ifs.map(i).unwrap()), theta);
            let via = project_points(&cloud, psi);
            for (x, y) in direct.iter().zip(&via).step_by(97) {
                worst_identity = worst_identity.max((x - f.apply(*y)).abs());
            }
        }
    }
    let pass = radius.is_some_and(|r| worst_defect < 2.0 * r) && worst_identity < 1e-12;
    Verdict {
        pass,
        detail: format!(
            "max Hausdorff defect {worst_defect:.2e} over 20 θ vs 2 × covering radius {}; pointwise identity error {worst_identity:.1e}",
            radius.map_or("unavailable".into(), |r| format!("{:.2e}", 2.0 * r))
        ),
        report: format!("{worst_defect:?} {radius:?}"),
    }
}

fn c11_lyapunov_vs_affinity() -> Verdict {
    let ifs = grid_ifs(&grid_example(3)).unwrap();
    let aff = affinity_dimension(&ifs, 10, 1e-6).unwrap();
    let w = gibbs_weights(&ifs, 8, aff.bracket_hi).unwrap();
    let MeasureWeights::Gibbs(g) = &w else { unreachable!() };
    let h_oracle: f64 = g
        .weights
        .iter()
        .zip(&g.multiplicity)
        .map(|(&p, &k)| -k * p * p.ln())
        .sum::<f64>()
        / 8.0;
    let h = entropy(&w);
    let est = lyapunov_exponents(&ifs, &w, 160, 20_000, SEED).unwrap();
    let d = lyapunov_dimension(h, est.l1, est.l2).unwrap();
    let se = lyapunov_dimension_se(h, est.l1, est.l2, est.se1, est.se2);
    let inside = d.value >= aff.bracket_lo - 3.0 * se && d.value <= aff.bracket_hi + 3.0 * se;
    let h_ok = (h - h_oracle).abs() < 1e-12 * h_oracle;
    Verdict {
        pass: inside && h_ok,
        detail: format!(
            "D(μ) = {:.4} ± {se:.1e} vs affinity [{:.4}, {:.4}] ± 3 SE: {inside}; entropy {h:.5} matches oracle: {h_ok}",
            d.value, aff.bracket_lo, aff.bracket_hi
        ),
        report: format!("{:?}", [d.value, se, est.l1, est.l2, h]),
    }
}

fn c12_covering_numbers() -> Verdict {
    let ifs = grid_ifs(&grid_example(2)).unwrap();
    let theta = invariant_interval_J(&ifs).unwrap().midpoint();
    let rep = covering_number_checks(
        &ifs,
        &ConvexPolygon::unit_square(),
        1.0 / 64.0,
        theta,
        1 << 20,
        2_000_000,
        SEED,
    )
    .unwrap();
    let all = rep.words_checked == rep.words_total;
    Verdict {
        pass: rep.pass && all,
        detail: format!(
            "|W(2⁻⁶)| = {} (all checked: {all}); Σ N(ε, E_w) = {:.0} ≤ M·N(ε, E) = {:.3e}·{}; projection violations {}",
            rep.words_total, rep.component_sum, rep.m_const, rep.total_count, rep.projection_violations
        ),
        report: format!(
            "{} {:?} {} {} {}",
            rep.words_total, rep.component_sum, rep.total_count, rep.projection_violations, rep.worst_projection_margin
        ),
    }
}

type Criterion = (u8, &'static str, fn() -> Verdict);

const CRITERIA: [Criterion; 12] = [
    (1, "affinity dimension vs similarity closed forms", c1_similarity_closed_forms),
    (2, "affinity dimension vs equal-matrix closed form", c2_equal_matrix_closed_form),
    (3, "pressure bracket nesting and shrinkage", c3_pressure_bracket_nesting),
    (4, "Furstenberg chain fixed point", c4_furstenberg_fixed_point),
    (5, "projective contraction lower bound", c5_contraction_bound),
    (6, "eigenvalue vs singular value bound", c6_eigen_singular_bound),
    (7, "box-dimension calibration", c7_box_calibration),
    (8, "grid family certificate and openness", c8_grid_certificate),
    (9, "curve family certificate", c9_curve_certificate),
    (10, "projection self-similarity identity", c10_projection_identity),
    (11, "Lyapunov dimension of Gibbs measure vs affinity dimension", c11_lyapunov_vs_affinity),
    (12, "covering-number inequalities", c12_covering_numbers),
];

fn reports_in_pool(threads: usize) -> Vec<String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        CRITERIA
            .iter()
            .map(|c| (c.2)().report)
            .collect()
    })
}

fn main() {
    let mut failed = Vec::new();
    let mut reports = Vec::new();
    let line = |id: u8, name: &str, pass: bool, detail: &str| {
        println!("{} {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    };
    for (id, name, f) in CRITERIA {
        let v = f();
        line(id, name, v.pass, &v.detail);
        if !v.pass {
            failed.push(id);
        }
        reports.push(v.report);
    }

    // The golden file is rewritten only when absent, so criterion 8 is stable across runs.
    let one = reports_in_pool(1);
    let three = reports_in_pool(3);
    let differing: Vec<u8> = (0..CRITERIA.len())
        .filter(|&k| reports[k] != one[k] || reports[k] != three[k])
        .map(|k| CRITERIA[k].0)
        .collect();
    let pass13 = differing.is_empty();
    line(
        13,
        "determinism across thread counts",
        pass13,
        &format!("reports of criteria 1-12 under default, 1 and 3 threads; differing: {differing:?}"),
    );
    if !pass13 {
        failed.push(13);
    }

    if failed.is_empty() {
        println!("acceptance: all 13 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
