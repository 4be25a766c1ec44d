//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fixscan_core::analysis::{alpha_sequence, cesaro_refine, fr_closedness_probe, planar_cesaro_residuals};
use fixscan_core::construction::{verify_construction, ConstructedScene, FSigmaSpec, VerifyGrid};
use fixscan_core::dynamics::IterationConfig;
use fixscan_core::geometry::{brute_force_project, ConvexSetDescriptor, PointN, SquareInX, Window};
use fixscan_core::planar::{phi, planar_fixed_point_closed_form, planar_fixed_point_iterative, psi};
use fixscan_core::seed::test_seed;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BETA_INDEPENDENCE_TOL: f64 = 1e-8;
const PHI_TOL: f64 = 1e-12;
const CLOSED_VS_ITERATIVE_TOL: f64 = 1e-9;
const VERIFY_TOL: f64 = 1e-15;
const ORACLE_STEP: f64 = 1e-4;
const ORACLE_TOL: f64 = 2e-4;
const VI_TOL: f64 = 1e-8;
const MEAN_IDENTITY_TOL: f64 = 1e-12;
const CESARO_NOISE: f64 = 0.10;

const PLANAR_BUDGET: Duration = Duration::from_secs(1);
const VERIFY_BUDGET: Duration = Duration::from_secs(30);
const SCAN_BUDGET: Duration = Duration::from_secs(300);

type Verdict = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn scene(name: &str) -> ConstructedScene {
    let text = std::fs::read_to_string(spec_path(name)).unwrap();
    ConstructedScene::new(FSigmaSpec::from_json(&text).unwrap()).unwrap()
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect()
}

struct ScanRun {
    code: i32,
    csv: String,
    elapsed: Duration,
    rows: Vec<(f64, String, bool)>,
}

fn scan(spec: &str, k: u32, workers: usize) -> ScanRun {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_fixscan"))
        .args(["scan", "--spec"])
        .arg(spec_path(spec))
        .args(["--alpha-step", "0.01", "--k", &k.to_string(), "--workers", &workers.to_string()])
        .output()
        .expect("scanner runs");
    let elapsed = start.elapsed();
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes());
    let rows = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[2].to_string(), &r[8] == "true")
        })
        .collect();
    ScanRun {
        code: out.status.code().unwrap_or(-1),
        csv,
        elapsed,
        rows,
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for alpha in grid(0.05, 0.95, 0.05) {
        let p = phi(alpha).unwrap();
        for beta in grid(0.1, 1.0, 0.1) {
            let fp = planar_fixed_point_closed_form(alpha, beta).unwrap();
            let proj = ConvexSetDescriptor::ParabolaEpigraph.project(&fp.u).unwrap();
            worst = worst.max((proj[0] - p).abs());
        }
    }
    let t = start.elapsed();
    let msg = format!("max |P(u)_x - phi| = {worst:.3e}, {:.3} s", t.as_secs_f64());
    if worst <= BETA_INDEPENDENCE_TOL && t < PLANAR_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_2() -> Verdict {
    let at_one = phi(1.0).unwrap();
    let at_zero = phi(0.0).unwrap();
    let alphas: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
    let values: Vec<f64> = alphas.iter().map(|&a| phi(a).unwrap()).collect();
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let residual = alphas
        .iter()
        .zip(&values)
        .map(|(&a, &x)| (2.0 * x * x * x + x - psi(a).unwrap()).abs())
        .fold(0.0, f64::max);
    let msg = format!("phi(1) = {at_one:e}, phi(0) = {at_zero:.17}, decreasing = {decreasing}, max residual = {residual:.3e}");
    if at_one.abs() <= PHI_TOL && at_zero > 0.38545 && at_zero < 0.38546 && decreasing && residual <= PHI_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_3() -> Verdict {
    let cfg = IterationConfig {
        eps_fix: 1e-13,
        ..IterationConfig::default()
    };
    let mut worst = 0.0f64;
    for alpha in grid(0.05, 0.95, 0.05) {
        for beta in grid(0.1, 1.0, 0.1) {
            let closed = planar_fixed_point_closed_form(alpha, beta).unwrap();
            let iter = planar_fixed_point_iterative(alpha, beta, &PointN::from([0.0, 0.0]), &cfg)
                .map_err(|e| format!("alpha = {alpha}, beta = {beta}: {e}"))?;
            worst = worst.max(closed.u.dist(&iter.u));
        }
    }
    let msg = format!("max |closed - iterative| = {worst:.3e}");
    if worst <= CLOSED_VS_ITERATIVE_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["point.json", "full.json", "point_and_interval.json"] {
        let s = scene(name);
        let start = Instant::now();
        let rep = verify_construction(&s, &VerifyGrid::default(), VERIFY_TOL).unwrap();
        let t = start.elapsed();
        ok &= rep.passed && rep.grid.nx == 200 && rep.grid.nz == 100 && t < VERIFY_BUDGET;
        let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        parts.push(format!("{name}: {} in {:.1} s{}", if rep.passed { "ok" } else { "failed" }, t.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) }));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn collar(alpha: f64, boundary: &[f64]) -> bool {
    boundary.iter().any(|b| (alpha - b).abs() <= 0.01 * (1.0 + 1e-9))
}

fn criterion_5(point: &ScanRun) -> Verdict {
    let full = scan("full.json", 3, 4);
    let pi = scan("point_and_interval.json", 3, 4);
    let mut problems = Vec::new();
    for (name, run) in [("point", point), ("full", &full), ("point_and_interval", &pi)] {
        if run.code != 0 {
            problems.push(format!("{name} exit {}", run.code));
        }
        if run.elapsed > SCAN_BUDGET {
            problems.push(format!("{name} took {:.0} s", run.elapsed.as_secs_f64()));
        }
        if run.rows.len() != 101 {
            problems.push(format!("{name} has {} rows", run.rows.len()));
        }
    }
    for (a, class, _) in &point.rows {
        let want = if *a == 0.0 { "exists" } else { "not_exists" };
        if class != want {
            problems.push(format!("point: {class} at {a}"));
        }
    }
    for (a, class, _) in &full.rows {
        if class != "exists" {
            problems.push(format!("full: {class} at {a}"));
        }
    }
    for (a, class, member) in &pi.rows {
        if !collar(*a, &[0.2, 0.4]) && (class == "exists") != *member {
            problems.push(format!("point_and_interval: {class} at {a}"));
        }
    }
    let msg = format!(
        "scan times {:.1} s / {:.1} s / {:.1} s",
        point.elapsed.as_secs_f64(),
        full.elapsed.as_secs_f64(),
        pi.elapsed.as_secs_f64()
    );
    if problems.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; {}", problems.join(", ")))
    }
}

fn criterion_6() -> Verdict {
    let runs: Vec<ScanRun> = [3, 4, 5].iter().map(|&k| scan("point_and_interval.json", k, 4)).collect();
    let mut problems = Vec::new();
    for (k, run) in [3, 4, 5].iter().zip(&runs) {
        if run.code != 0 {
            problems.push(format!("k = {k} exit {}", run.code));
        }
        for (a, class, member) in &run.rows {
            if !collar(*a, &[0.2, 0.4]) && (class == "exists") != *member {
                problems.push(format!("k = {k}: {class} at {a}"));
            }
        }
    }
    let classes = |r: &ScanRun| r.rows.iter().map(|(a, c, _)| (a.to_bits(), c.clone())).collect::<Vec<_>>();
    let differing = classes(&runs[0])
        .iter()
        .zip(classes(&runs[1]).iter().zip(classes(&runs[2]).iter()))
        .filter(|(a, (b, c))| a != b || a != c)
        .count();
    if differing > 0 {
        problems.push(format!("{differing} alphas classified differently across k"));
    }
    if problems.is_empty() {
        Ok("k = 3, 4, 5 classify every alpha identically".into())
    } else {
        Err(problems.join(", "))
    }
}

fn member(set: &ConvexSetDescriptor, rng: &mut StdRng) -> PointN {
    let x: f64 = rng.random_range(-2.0..2.0);
    let lift: f64 = rng.random_range(0.0..1.0);
    let z: f64 = rng.random_range(0.0..4.0);
    match set {
        ConvexSetDescriptor::Singleton(q) => q.clone(),
        ConvexSetDescriptor::VerticalRay { base } => PointN::from([base[0], base[1], z]),
        ConvexSetDescriptor::ParabolaEpigraph => PointN::from([x, x * x + lift]),
        ConvexSetDescriptor::SmoothEpigraph(f) => PointN::from([x, f.value(x, z) + lift, z]),
        ConvexSetDescriptor::ProductWithHalfLine(_) => PointN::from([x, x * x + lift, z]),
    }
}

fn criterion_7() -> Verdict {
    let pi = scene("point_and_interval.json");
    let variants = vec![
        ("singleton", ConvexSetDescriptor::singleton(vec![1.0, 0.0]).unwrap()),
        ("vertical_ray", ConvexSetDescriptor::vertical_ray(0.0, 0.0)),
        ("parabola", ConvexSetDescriptor::ParabolaEpigraph),
        ("square_epigraph", ConvexSetDescriptor::SmoothEpigraph(Arc::new(SquareInX))),
        ("scene_epigraph", pi.a1().clone()),
        (
            "parabola_x_half_line",
            ConvexSetDescriptor::product_with_half_line(ConvexSetDescriptor::ParabolaEpigraph).unwrap(),
        ),
    ];
    let mut rng = StdRng::seed_from_u64(test_seed());
    let mut worst_gap = 0.0f64;
    let mut worst_vi = f64::NEG_INFINITY;
    for (name, set) in &variants {
        let dim = set.dim();
        let points: Vec<PointN> = (0..100)
            .map(|_| PointN::new((0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap())
            .collect();
        for p in &points {
            let q = set.project(p).map_err(|e| format!("{name}: {e}"))?;
            let r = q.dist(p).max(0.5) + 0.5;
            let w = Window::new((0..dim).map(|i| p[i] - r).collect(), (0..dim).map(|i| p[i] + r).collect()).unwrap();
            let b = brute_force_project(set, p, &w, ORACLE_STEP).map_err(|e| format!("{name}: {e}"))?;
            worst_gap = worst_gap.max(b.dist(&q));
        }
        let members: Vec<PointN> = (0..100).map(|_| member(set, &mut rng)).collect();
        for p in &points {
            let q = set.project(p).unwrap();
            let v = p - &q;
            for a in &members {
                worst_vi = worst_vi.max((a - &q).dot(&v));
            }
        }
    }
    let msg = format!("{} variants, max oracle gap = {worst_gap:.3e}, max <a - Pp, p - Pp> = {worst_vi:.3e}", variants.len());
    if worst_gap <= ORACLE_TOL && worst_vi <= VI_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Verdict {
    let mut problems = Vec::new();
    let lambda = 0.7;
    let x0 = PointN::zeros(128);
    let mut worst = 0.0f64;
    for m in [4usize, 16, 64] {
        let pts: Vec<PointN> = (0..m)
            .map(|i| {
                let mut v = vec![0.0; 128];
                v[i] = lambda;
                PointN::new(v).unwrap()
            })
            .collect();
        let r = cesaro_refine(|p| Ok(p.clone()), &pts, &x0).unwrap();
        worst = worst.max((r.dist - lambda / (m as f64).sqrt()).abs());
    }
    if worst > MEAN_IDENTITY_TOL {
        problems.push(format!("mean identity off by {worst:e}"));
    }

    let rs = planar_cesaro_residuals(0.5, 0.1, 1.0, &[4, 16, 64]).unwrap();
    let monotone = rs.windows(2).all(|w| w[1].1 <= (1.0 + CESARO_NOISE) * w[0].1) && rs[2].1 < rs[0].1;
    if !monotone {
        problems.push(format!("planar residuals {rs:?}"));
    }

    let full = scene("full.json");
    let rep = fr_closedness_probe(&full, &alpha_sequence(0.5, 0.1, 10), 0.5, 3, 1.0, &IterationConfig::default()).unwrap();
    if !rep.confirmed {
        problems.push("closedness probe not confirmed".into());
    }

    let msg = format!(
        "mean identity error {worst:.1e}; residuals M=4,16,64: {:.3e}, {:.3e}, {:.3e}; probe limit {}",
        rs[0].1, rs[1].1, rs[2].1, rep.limit.class
    );
    if problems.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; {}", problems.join(", ")))
    }
}

fn criterion_9(first: &ScanRun) -> Verdict {
    let second = scan("point.json", 3, 4);
    let one = scan("point.json", 3, 1);
    let eight = scan("point.json", 3, 8);
    let repeat = first.csv == second.csv;
    let workers = one.csv == eight.csv && one.csv == first.csv;
    let msg = format!("repeat identical = {repeat}, 1 vs 8 workers identical = {workers}");
    if repeat && workers && !first.csv.is_empty() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let point = scan("point.json", 3, 4);
    let criteria: Vec<(u32, &str, Check)> = vec![
        (1, "planar beta-independence", Box::new(criterion_1)),
        (2, "phi correctness", Box::new(criterion_2)),
        (3, "closed form vs iteration", Box::new(criterion_3)),
        (4, "construction verification", Box::new(criterion_4)),
        (5, "dichotomy reproduction", Box::new(|| criterion_5(&point))),
        (6, "k-reduction consistency", Box::new(criterion_6)),
        (7, "projection oracle equivalence", Box::new(criterion_7)),
        (8, "Cesaro machinery", Box::new(criterion_8)),
        (9, "determinism", Box::new(|| criterion_9(&point))),
    ];
    let mut failed = 0;
    for (n, name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {n}: {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n}: {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
