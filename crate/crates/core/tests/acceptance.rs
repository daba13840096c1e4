//! Acceptance run: one PASS/FAIL line per criterion, followed by the numbers
//! behind it. Exits non-zero when any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::Command;
use std::time::Instant;

use nevlab::blaschke_verify::{verify_theorem, TheoremInput};
use nevlab::boundary_set::ArcSet;
use nevlab::function_zoo::{AnalyticTestFunction, Factor};
use nevlab::green_verify::{
    boundary_coefficient, default_u, normalization_self_test, verify_integral_estimate, zero_mass_identity,
    EstimateInput, EstimateKind, COEFFICIENT_TOL,
};
use nevlab::quadrature::{CircleGrid, DiskGrid, SGrid};
use nevlab::weight::bounds::check_bound;
use nevlab::weight::{Weight, WeightParams};
use nevlab::Status;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Line {
    n: u32,
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn polar(r: f64, t: f64) -> Complex64 {
    Complex64::from_polar(r, t)
}

fn sandwich() -> Line {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let qs = [0.5, 1.0, 2.0];
    let (mut short, mut long) = ((0usize, 0usize), (0usize, 0usize));
    // Gap length where ψ/d² at an endpoint, |a−b|²/δ², drops to 1/3.
    let (mut lo, mut hi) = (1.0f64, PI);
    for _ in 0..60 {
        let x = 0.5 * (lo + hi);
        if 2.0 * x.sin() / x >= 1.0 / 3f64.sqrt() {
            lo = x;
        } else {
            hi = x;
        }
    }
    let critical = 2.0 * lo;
    for i in 0..10_000u64 {
        let start = TAU * rng.gen::<f64>();
        let len = TAU * (1.0 - rng.gen::<f64>());
        let q = qs[rng.gen_range(0..3)];
        let e = ArcSet::new(&[(start, start + len)]).unwrap();
        let r = check_bound("CI25", &e, &WeightParams::with_q(1.0, q).unwrap(), 1, i).unwrap();
        let slot = if len <= critical { &mut short } else { &mut long };
        slot.0 += 1;
        slot.1 += r.violations;
    }
    let secs = t0.elapsed().as_secs_f64();
    let violations = short.1 + long.1;
    Line {
        n: 1,
        pass: violations == 0 && secs < 1.0,
        summary: format!("CI25 sandwich over 10^4 random (z, gap in (0, 2π], q): {violations} violations, {secs:.2} s"),
        notes: vec![
            format!(
                "gaps ≤ {critical:.4} rad: {} draws, {} violations; longer gaps: {} draws, {} violations",
                short.0, short.1, long.0, long.1
            ),
            "for a gap longer than that, ψ_j/d² tends to |a−b|²/δ² < 1/3 at an endpoint, so the lower bound is false there"
                .into(),
        ],
    }
}

fn five_point(f: &dyn Fn(f64) -> f64, h: f64) -> (f64, f64) {
    let (p1, m1, p2, m2, z) = (f(h), f(-h), f(2.0 * h), f(-2.0 * h), f(0.0));
    ((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h), (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h))
}

/// Stencil `∂̄g` and `Δg` at `z` with step `h`.
fn stencil(w: &Weight, s: f64, z: Complex64, h: f64) -> (Complex64, f64) {
    let g = |dx: f64, dy: f64| w.g_s(s, z + c(dx, dy)).g.v;
    let (gx, gxx) = five_point(&|t| g(t, 0.0), h);
    let (gy, gyy) = five_point(&|t| g(0.0, t), h);
    (c(0.5 * gx, 0.5 * gy), gxx + gyy)
}

#[derive(Default)]
struct FdStats {
    points: usize,
    worst_dbar: f64,
    worst_lap: f64,
    worst_at: String,
    over: usize,
    /// Over tolerance with `|error| ≤ 2 · 10.7 ε |g| / h²`.
    roundoff: usize,
    /// Over tolerance with `e(2h)/e(h)` within 16 ± 2.
    truncation: usize,
    unexplained: usize,
}

/// Closed forms against 5-point differences at step `h` on 10³ points per
/// `(s, p, q)`; points over tolerance are classified by their error source.
fn derivative_errors(h: f64) -> FdStats {
    let e = ArcSet::points(&[0.0, 2.0, 4.0]).unwrap();
    let mut st = FdStats::default();
    for (k, &s) in [0.6, 0.9].iter().enumerate() {
        for &p in &[0.0, 0.5, 1.0] {
            for &q in &[0.5, 1.0, 2.0] {
                let w = Weight::new(&e, WeightParams::with_q(p, q).unwrap());
                let mut rng = ChaCha8Rng::seed_from_u64(11 + k as u64);
                for _ in 0..1000 {
                    let z = polar(0.95 * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
                    let exact = w.g_s(s, z);
                    let (dbar, lap) = stencil(&w, s, z, h);
                    let ed = (dbar - exact.g.dbar).norm() / exact.g.dbar.norm();
                    let err = lap - exact.laplacian();
                    let el = err.abs() / exact.laplacian().abs();
                    st.points += 1;
                    st.worst_dbar = st.worst_dbar.max(ed);
                    if el > st.worst_lap {
                        st.worst_lap = el;
                        st.worst_at = format!("s={s} p={p} q={q} z={z:.4}");
                    }
                    if el <= 1e-6 {
                        continue;
                    }
                    st.over += 1;
                    let floor = 64.0 / 6.0 * f64::EPSILON * exact.g.v.abs() / (h * h);
                    let ratio = (stencil(&w, s, z, 2.0 * h).1 - exact.laplacian()) / err;
                    if err.abs() <= 2.0 * floor {
                        st.roundoff += 1;
                    } else if (ratio - 16.0).abs() <= 2.0 {
                        st.truncation += 1;
                    } else {
                        st.unexplained += 1;
                    }
                }
            }
        }
    }
    st
}

fn derivatives() -> Line {
    let st = derivative_errors(1e-4);
    Line {
        n: 2,
        pass: st.worst_dbar < 1e-6 && st.worst_lap < 1e-6,
        summary: format!(
            "5-point differences at h = 1e-4 on {} points: worst relative error ∂̄ {:.2e}, Δ {:.2e} (tolerance 1e-6)",
            st.points, st.worst_dbar, st.worst_lap
        ),
        notes: vec![
            format!("worst Δ point: {}", st.worst_at),
            format!(
                "{} points over tolerance: {} at the roundoff floor 10.7 ε |g|/h² (|Δg| ≪ |g|), {} with e(2h)/e(h) ≈ 16 (h⁴ truncation), {} unexplained",
                st.over, st.roundoff, st.truncation, st.unexplained
            ),
            format!(
                "worst Δ error at other steps: {}",
                [2.5e-5, 5e-5, 2e-4, 1e-3]
                    .iter()
                    .map(|&h| format!("h = {h:e}: {:.2e}", derivative_errors(h).worst_lap))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ],
    }
}

fn self_test() -> Line {
    let t0 = Instant::now();
    let r = normalization_self_test(&DiskGrid::default(), 1).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    Line {
        n: 3,
        pass: r.residual < 1e-8 && secs < 1.0,
        summary: format!("f = z, g = 1−|z|²: residual {:.2e} on 32×64, {secs:.2} s", r.residual),
        notes: vec![format!("lhs {:.15} rhs {:.15}", r.lhs, r.rhs)],
    }
}

fn blaschke_cases() -> Vec<(ArcSet, f64, f64, f64, Vec<Complex64>)> {
    vec![
        (ArcSet::single_point(0.0), 1.0, 1.0, 0.85, vec![c(0.3, 0.2), c(-0.5, 0.4), c(0.1, -0.7)]),
        (
            ArcSet::points(&[0.0, 2.0, 4.0]).unwrap(),
            0.5,
            0.5,
            0.9,
            vec![c(0.6, 0.1), c(-0.2, 0.5), c(0.0, -0.8), c(-0.7, -0.3), c(0.25, 0.25)],
        ),
        (ArcSet::closed_arc(0.0, 2.0).unwrap(), 0.0, 1.0, 0.8, vec![c(0.4, 0.4), c(-0.6, 0.1)]),
        (
            ArcSet::cantor(0.0, 2.0, 5).unwrap(),
            1.0,
            2.0,
            0.9,
            (0..8).map(|k| polar(0.2 + 0.08 * k as f64, 0.9 * k as f64 + 0.3)).collect(),
        ),
        (
            ArcSet::points(&[0.0, PI]).unwrap(),
            0.0,
            0.5,
            0.7,
            vec![c(0.5, 0.1), c(-0.3, -0.3), c(0.1, 0.6), c(-0.55, 0.2)],
        ),
        (
            ArcSet::single_point(0.0),
            2.0,
            1.0,
            0.9,
            (0..6).map(|k| polar(0.3 + 0.1 * k as f64, 1.1 * k as f64)).collect(),
        ),
        (
            ArcSet::points(&[0.0, 2.0, 4.0]).unwrap(),
            0.0,
            2.0,
            0.9,
            (0..8).map(|k| polar(0.15 + 0.09 * k as f64, 0.8 * k as f64 + 0.1)).collect(),
        ),
        (ArcSet::closed_arc(1.0, 1.5).unwrap(), 1.0, 0.5, 0.6, vec![c(0.3, -0.2)]),
        (
            ArcSet::points(&[0.5, 2.5, 4.5]).unwrap(),
            0.5,
            1.0,
            0.75,
            vec![c(0.05, 0.02), c(0.4, -0.4), c(-0.6, 0.3)],
        ),
        (
            ArcSet::single_point(0.0),
            0.0,
            1.0,
            0.95,
            (0..7).map(|k| polar(0.25 + 0.1 * k as f64, 0.9 * k as f64 + 0.5)).collect(),
        ),
    ]
}

fn zero_mass() -> Line {
    let t0 = Instant::now();
    let base = DiskGrid::new(64, 128).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for (e, p, q, s, zeros) in blaschke_cases() {
        let f = AnalyticTestFunction::new(Factor::blaschke(&zeros)).unwrap();
        let params = WeightParams::with_q(p, q).unwrap();
        let r = zero_mass_identity(&f, &e, &params, s, &base, 3).unwrap();
        let red = r.reductions();
        let good = r.residual < 1e-3 && red.iter().all(|&x| x >= 4.0);
        ok &= good;
        let ladder: Vec<String> = r.history.iter().map(|l| format!("{:.2e}", l.residual)).collect();
        notes.push(format!(
            "{} {} zeros, p={p} q={q} s={s}: residuals [{}] reductions [{}]{}",
            r.identity_id,
            zeros.len(),
            ladder.join(", "),
            red.iter().map(|x| format!("{x:.1}")).collect::<Vec<_>>().join(", "),
            if good { "" } else { "  <-- fails" }
        ));
    }
    let secs = t0.elapsed().as_secs_f64();
    Line {
        n: 4,
        pass: ok && secs < 60.0,
        summary: format!("zero-mass identities, 10 Blaschke scenarios on 64, 128, 256 radial nodes: {secs:.1} s"),
        notes,
    }
}

fn signs() -> Line {
    let sets = [ArcSet::points(&[0.0, 2.0, 4.0]).unwrap(), ArcSet::cantor(0.0, 2.0, 5).unwrap()];
    let mut notes = Vec::new();
    let mut ok = true;
    for id in ["CI24", "CI6", "eOP1"] {
        for (k, e) in sets.iter().enumerate() {
            let q = [1.0, 0.5][k];
            let r = check_bound(id, e, &WeightParams::with_q(1.0, q).unwrap(), 10_000, 77).unwrap();
            ok &= r.violations == 0 && r.samples == 10_000;
            notes.push(format!("{id} on set {k}, q={q}: {} samples, {} violations", r.samples, r.violations));
        }
    }
    Line { n: 5, pass: ok, summary: "CI24, CI6, eOP1 over 10^4 samples each".into(), notes }
}

fn theorem_suite() -> Line {
    let t0 = Instant::now();
    let zk: Vec<Complex64> = (1..=10).map(|k| polar(1.0 - 0.5f64.powi(k), 0.5f64.powi(k))).collect();
    let seq = |angle: f64| {
        AnalyticTestFunction::new(Factor::Product {
            factors: vec![
                Factor::blaschke(&zk.iter().map(|z| z * polar(1.0, angle)).collect::<Vec<_>>()),
                Factor::SingularExponential { masses: vec![(0.5, angle)] },
            ],
        })
        .unwrap()
    };
    let finite = AnalyticTestFunction::new(Factor::blaschke(&[c(0.5, 0.2), c(-0.3, 0.6), c(0.1, -0.8)])).unwrap();
    let zero_free = AnalyticTestFunction::new(Factor::SingularExponential { masses: vec![(0.5, 0.0)] }).unwrap();
    let sets: Vec<(&str, ArcSet, Option<f64>)> = vec![
        ("{1}", ArcSet::single_point(0.0), Some(1.0)),
        ("3 points", ArcSet::points(&[0.0, 2.0, 4.0]).unwrap(), Some(1.0)),
        ("arc", ArcSet::closed_arc(0.0, 2.0).unwrap(), Some(0.0)),
        ("cantor", ArcSet::cantor(0.0, 2.0, 6).unwrap(), None),
    ];
    let mut count = 0;
    let mut ok = true;
    let mut notes = Vec::new();
    let mut worst_drift = 0.0f64;
    for (name, e, alpha) in &sets {
        let moved = seq_on(&seq, e);
        for (fname, f) in [("sequence", &moved), ("finite", &finite), ("zero-free", &zero_free)] {
            for (id, p) in [("eP1", 1.0), ("eP2", 1.0), ("L∞-p>0", 1.0), ("0_NI0", 0.0), ("L∞-p=0", 0.0)] {
                if fname == "zero-free" && id.starts_with("L∞") {
                    continue;
                }
                let inp = TheoremInput {
                    f,
                    e,
                    params: WeightParams::with_q(p, 1.0).unwrap(),
                    eps: 0.5,
                    envelope: None,
                    alpha: *alpha,
                    alpha_window: (3, 12),
                    s_grid: SGrid { delta: 0.5, k_max: 3 },
                    grid: DiskGrid::new(64, 128).unwrap(),
                    circle: CircleGrid::new(256).unwrap(),
                };
                count += 1;
                match verify_theorem(id, &inp) {
                    Ok(r) => {
                        let good = r.lhs.is_finite() && r.partial_sums_nondecreasing && r.drift < 0.2;
                        ok &= good;
                        worst_drift = worst_drift.max(r.drift);
                        if !good || r.status != Status::Pass {
                            notes.push(format!(
                                "{id} on {name} with {fname}: lhs {:.3e} constant {:.3e} drift {:.3} {}",
                                r.lhs, r.constant, r.drift, r.status
                            ));
                        }
                    }
                    Err(err) => {
                        ok = false;
                        notes.push(format!("{id} on {name} with {fname}: {err}"));
                    }
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    notes.insert(0, format!("worst drift {worst_drift:.3}"));
    Line {
        n: 6,
        pass: ok && count >= 20 && secs < 600.0,
        summary: format!("theorem suite: {count} scenarios, {secs:.1} s"),
        notes,
    }
}

/// The sequence function moved so that its singular point lies on `E`.
fn seq_on(seq: &dyn Fn(f64) -> AnalyticTestFunction, e: &ArcSet) -> AnalyticTestFunction {
    let t = (0..64)
        .map(|k| TAU * k as f64 / 64.0)
        .find(|&t| e.circle_distance(t) == 0.0)
        .unwrap_or(e.gaps()[0].beta());
    seq(t)
}

/// `|{t : d(e^{it}, E) < x}|` for a union of closed arcs, by merging.
fn measure_oracle(arcs: &[(f64, f64)], x: f64) -> f64 {
    let r = 2.0 * (0.5 * x).asin();
    let mut iv: Vec<(f64, f64)> = arcs.iter().map(|&(a, b)| (a - r, b + r)).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur = iv[0];
    for &(a, b) in &iv[1..] {
        if a <= cur.1 {
            cur.1 = cur.1.max(b);
        } else {
            total += cur.1 - cur.0;
            cur = (a, b);
        }
    }
    total + cur.1 - cur.0
}

fn cantor_arcs(depth: u32) -> Vec<(f64, f64)> {
    let mut arcs = vec![(0.0, 1.0)];
    for _ in 0..depth {
        arcs = arcs
            .iter()
            .flat_map(|&(a, b)| {
                let l = (b - a) / 3.0;
                [(a, a + l), (b - l, b)]
            })
            .collect();
    }
    arcs
}

fn alpha_estimator() -> Line {
    let mut notes = Vec::new();
    let mut ok = true;
    for pts in [vec![0.0], vec![0.0, 2.0, 4.0], vec![0.1, 0.2, 1.0, 3.0, 5.0]] {
        let a = ArcSet::points(&pts).unwrap().estimate_alpha(3, 12).unwrap().alpha_hat;
        ok &= (a - 1.0).abs() <= 0.05;
        notes.push(format!("{} points: α̂ = {a:.4}", pts.len()));
    }
    let full = ArcSet::full_circle().estimate_alpha(3, 12).unwrap();
    ok &= full.alpha_hat == 0.0 && full.is_degenerate();
    notes.push(format!("full circle: α̂ = {} (degenerate fit: {})", full.alpha_hat, full.is_degenerate()));
    let e = ArcSet::cantor(0.0, 1.0, 8).unwrap();
    let prof = e.estimate_alpha(3, 12).unwrap();
    let arcs = cantor_arcs(8);
    let worst_rel = prof
        .levels
        .iter()
        .map(|l| (l.measure - measure_oracle(&arcs, l.x)).abs() / l.measure)
        .fold(0.0, f64::max);
    let target = 1.0 - 2f64.ln() / 3f64.ln();
    ok &= (prof.alpha_hat - target).abs() <= 0.05 && worst_rel < 1e-12;
    notes.push(format!(
        "cantor depth 8: α̂ = {:.4}, target {target:.4}; ladder matches the interval oracle to {worst_rel:.1e}",
        prof.alpha_hat
    ));
    Line { n: 7, pass: ok, summary: "α(E) estimator on finite sets, the full circle and a Cantor set".into(), notes }
}

fn estimate_registry() -> Line {
    let t0 = Instant::now();
    let e = ArcSet::points(&[0.0, 2.0, 4.0]).unwrap();
    let f = AnalyticTestFunction::new(Factor::Product {
        factors: vec![
            Factor::blaschke(&[c(0.5, 0.2), c(-0.3, 0.6)]),
            Factor::SingularExponential { masses: vec![(0.3, 0.0)] },
        ],
    })
    .unwrap();
    let grid = DiskGrid::new(128, 256).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    let mut exact = 0;
    let mut upto = 0;
    let cases: Vec<(&str, f64, f64, f64)> = vec![
        ("CI7", 1.0, 1.0, 0.8),
        ("CI7", 0.5, 2.0, 0.9),
        ("CI7", 0.0, 1.0, 0.7),
        ("CI7", 0.0, 0.5, 0.5),
        ("CI4", 1.0, 1.0, 0.8),
        ("CI4", 2.0, 0.5, 0.5),
        ("CI4", 0.0, 1.0, 0.9),
        ("CI2", 1.0, 1.0, 0.8),
        ("3_CIZ5", 1.0, 1.0, 0.8),
        ("eOP4", 1.0, 1.0, 0.8),
        ("eOP5", 1.0, 1.0, 0.8),
        ("eOP6", 1.0, 1.0, 0.8),
        ("eOP7", 0.0, 1.0, 0.8),
        ("eP0", 1.0, 1.0, 0.8),
        ("eP4", 0.0, 1.0, 0.8),
    ];
    for (id, p, q, s) in cases {
        let inp = EstimateInput { f: &f, e: &e, params: WeightParams::with_q(p, q).unwrap(), s, u: default_u(), grid };
        match verify_integral_estimate(id, &inp) {
            Ok(r) => {
                match r.kind {
                    EstimateKind::Exact => exact += 1,
                    EstimateKind::UpToConstant => upto += 1,
                }
                ok &= r.status == Status::Pass;
                notes.push(format!(
                    "{id} p={p} q={q} s={s}: lhs {:.4e} rhs {:.4e} constant {:.4} drift {:.3} {}",
                    r.lhs, r.rhs, r.constant, r.drift, r.status
                ));
            }
            Err(err) => {
                ok = false;
                notes.push(format!("{id} p={p} q={q} s={s}: {err}"));
            }
        }
    }
    let coef = boundary_coefficient(default_u());
    ok &= coef.abs() <= COEFFICIENT_TOL;
    notes.push(format!("8(1−u²)^(1/2) − 2 at u = √(15/16): {coef:.3e} (bound {COEFFICIENT_TOL:.2e})"));
    Line {
        n: 8,
        pass: ok,
        summary: format!(
            "integral estimates: {exact} exact-constant and {upto} up-to-constant checks, {:.1} s",
            t0.elapsed().as_secs_f64()
        ),
        notes,
    }
}

fn cli_determinism() -> Line {
    let bin = env!("CARGO_BIN_EXE_nevlab");
    let scenario = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/bounds_three_points.json");
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        Command::new(bin)
            .args(["run", scenario, "--out"])
            .arg(dir.path().join(out))
            .args(["--seed", "5"])
            .output()
            .unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    let ca = std::fs::read(dir.path().join("a/summary.csv")).unwrap_or_default();
    let cb = std::fs::read(dir.path().join("b/summary.csv")).unwrap_or_default();
    let same = !ca.is_empty() && ca == cb && a.status.code() == b.status.code();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema_version\": 1, \"name\": 3}").unwrap();
    let invalid = Command::new(bin).args(["run"]).arg(&bad).arg("--out").arg(dir.path().join("c")).output().unwrap();
    let code = invalid.status.code();
    Line {
        n: 9,
        pass: same && code == Some(1),
        summary: format!(
            "CLI: repeated run gives identical summary ({same}, {} bytes); invalid scenario exits {code:?}",
            ca.len()
        ),
        notes: vec![String::from_utf8_lossy(&invalid.stderr).trim().to_string()],
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // Under `cargo test`, a filter argument selects criteria by number.
    let wanted: Vec<u32> = args.iter().skip(1).filter_map(|a| a.parse().ok()).collect();
    let all: Vec<(u32, fn() -> Line)> = vec![
        (1, sandwich),
        (2, derivatives),
        (3, self_test),
        (4, zero_mass),
        (5, signs),
        (6, theorem_suite),
        (7, alpha_estimator),
        (8, estimate_registry),
        (9, cli_determinism),
    ];
    let mut failed = 0;
    for (n, run) in all {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let line = run();
        println!("criterion {}: {} {}", line.n, if line.pass { "PASS" } else { "FAIL" }, line.summary);
        for note in &line.notes {
            println!("    {note}");
        }
        if !line.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
