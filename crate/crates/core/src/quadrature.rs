//! Product quadrature on the disc and the circle, and the two class norms.
//!
//! Disc integrals use Gauss–Legendre in the radius (graded towards `|z| = 1`
//! when the region reaches the circle) times an angular rule built from
//! graded Gauss–Legendre panels between feature angles. Integrands carrying
//! `log|f(sz)|` are split at the zeros of `f_s`: a smooth bump times
//! `log|z − a|` is integrated on a local polar grid around each zero, and the
//! remainder is smooth.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::collections::HashMap;
use std::sync::{Mutex, Once, OnceLock};

use crate::boundary_set::ArcSet;
use crate::error::{NevError, Result};
use crate::function_zoo::AnalyticTestFunction;
use crate::weight::{smoothstep, Weight, WeightParams};

static POOL: Once = Once::new();

/// Sizes the global thread pool from `NEVLAB_THREADS` (once per process).
pub fn init_thread_pool() {
    POOL.call_once(|| {
        if let Some(n) = std::env::var("NEVLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    });
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache lock").get(&n) {
        return v.clone();
    }
    let v = gauss_legendre_uncached(n);
    cache.lock().expect("cache lock").insert(n, v.clone());
    v
}

fn gauss_legendre_uncached(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = t;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = 0.5 * (1.0 - t);
        x[n - 1 - i] = 0.5 * (1.0 + t);
        w[i] = 0.5 * wt;
        w[n - 1 - i] = 0.5 * wt;
    }
    (x, w)
}

/// Polar product grid parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub n_r: usize,
    pub n_theta: usize,
    /// Largest radius of the local disc around a zero.
    #[serde(default = "default_rho_excl")]
    pub rho_excl: f64,
    /// Grading exponent towards the circle and towards panel ends.
    #[serde(default = "default_grading")]
    pub grading: f64,
}

fn default_rho_excl() -> f64 {
    0.1
}
fn default_grading() -> f64 {
    2.0
}

impl Default for DiskGrid {
    fn default() -> Self {
        DiskGrid { n_r: 32, n_theta: 64, rho_excl: 0.1, grading: 2.0 }
    }
}

impl DiskGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        let g = DiskGrid { n_r, n_theta, ..Default::default() };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r < 8 || self.n_theta < 8 {
            return Err(NevError::InvalidInput(format!(
                "grid needs n_r, n_theta ≥ 8, got {} × {}",
                self.n_r, self.n_theta
            )));
        }
        if !(self.rho_excl >= 0.0) || !(self.grading >= 1.0) {
            return Err(NevError::InvalidInput("rho_excl ≥ 0 and grading ≥ 1 required".into()));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        DiskGrid { n_r: 2 * self.n_r, n_theta: 2 * self.n_theta, ..*self }
    }

    /// The grid doubled `k` times.
    pub fn refined(&self, k: u32) -> Self {
        (0..k).fold(*self, |g, _| g.doubled())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleGrid {
    pub n_theta: usize,
}

impl CircleGrid {
    pub fn new(n_theta: usize) -> Result<Self> {
        if n_theta < 16 {
            return Err(NevError::InvalidInput(format!("circle grid needs ≥ 16 nodes, got {n_theta}")));
        }
        Ok(CircleGrid { n_theta })
    }
}

/// Angular nodes and weights on `[0, 2π)`.
///
/// Without features this is the periodic trapezoid rule. Otherwise the
/// circle is cut at the feature angles and each panel gets graded
/// Gauss–Legendre nodes, roughly `n` per full turn.
pub fn angular_rule(n: usize, features: &[f64], grading: f64) -> Vec<(f64, f64)> {
    angular_rule_soft(n, features, &[], grading)
}

fn normalize_angles(angles: &[f64]) -> Vec<f64> {
    let mut f: Vec<f64> = angles.iter().map(|t| t.rem_euclid(TAU)).collect();
    f.sort_by(f64::total_cmp);
    f.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if f.len() > 1 && f[0] + TAU - f[f.len() - 1] < 1e-9 {
        f.pop();
    }
    f
}

/// [`angular_rule`] with extra `soft` cuts where the integrand is smooth
/// but changes quickly. Panels between two soft cuts are plain
/// Gauss–Legendre with a node count proportional to their length.
pub fn angular_rule_soft(n: usize, features: &[f64], soft: &[f64], grading: f64) -> Vec<(f64, f64)> {
    let hard = normalize_angles(features);
    let mut cuts: Vec<(f64, bool)> = hard.iter().map(|&t| (t, true)).collect();
    for t in normalize_angles(soft) {
        if !hard.iter().any(|&h| (h - t).abs() < 1e-9 || (h - t).abs() > TAU - 1e-9) {
            cuts.push((t, false));
        }
    }
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if cuts.is_empty() {
        let h = TAU / n as f64;
        return (0..n).map(|k| (k as f64 * h, h)).collect();
    }
    let k = grading.round().max(1.0) as u32;
    let mut out = Vec::new();
    for i in 0..cuts.len() {
        let (a, ha) = cuts[i];
        let (b, hb) = if i + 1 < cuts.len() { cuts[i + 1] } else { (cuts[0].0 + TAU, cuts[0].1) };
        let len = b - a;
        let prop = (n as f64 * len / TAU).ceil() as usize;
        let (m, kk) = if ha || hb {
            (prop.max(4 + 2 * k as usize).max(n / 4), k)
        } else {
            (prop.max(n / 4).max(4), 1)
        };
        let (x, w) = gauss_legendre(m);
        for (t, wt) in x.into_iter().zip(w) {
            let (g, dg) = two_sided_grade(t, kk);
            out.push(((a + len * g).rem_euclid(TAU), len * dg * wt));
        }
    }
    out
}

/// The map `t ↦ I_t(k, k)` (regularized incomplete beta) and its
/// derivative, a polynomial flattening both ends to order `k − 1`.
fn two_sided_grade(t: f64, k: u32) -> (f64, f64) {
    if k <= 1 {
        return (t, 1.0);
    }
    let n = 2 * k - 1;
    let mut g = 0.0;
    let mut c = 1.0;
    for j in 0..=n {
        if j >= k {
            g += c * t.powi(j as i32) * (1.0 - t).powi((n - j) as i32);
        }
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    // 1/B(k, k) = (2k−1)!/((k−1)!)^2
    let mut inv_beta = 1.0;
    for j in 0..k - 1 {
        inv_beta *= (n - j) as f64 / (j + 1) as f64;
    }
    inv_beta *= k as f64;
    let dg = inv_beta * (t * (1.0 - t)).powi(k as i32 - 1);
    (g, dg)
}

/// Radial nodes on `[r0, r1]` with weights including the factor `r`.
///
/// The interval is cut at `breaks`. When `r1 = 1` the last panel uses the
/// map `1 − r = h(1 − t)^κ`, with `κ` chosen so that `(1−r)^β` becomes a
/// polynomial in `t`.
fn radial_rule(
    n: usize,
    r0: f64,
    r1: f64,
    grading: f64,
    edge_power: f64,
    breaks: &[f64],
) -> Vec<(f64, f64, f64)> {
    let mut cuts: Vec<f64> = breaks.iter().cloned().filter(|&b| b > r0 + 1e-12 && b < r1 - 1e-12).collect();
    cuts.push(r0);
    cuts.push(r1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut out = Vec::new();
    let total = r1 - r0;
    for i in 0..cuts.len() - 1 {
        let (a, b) = (cuts[i], cuts[i + 1]);
        let h = b - a;
        let m = if cuts.len() == 2 {
            n
        } else {
            ((n as f64 * h / total).ceil() as usize).max(8).max(n / 2)
        };
        let (x, w) = gauss_legendre(m);
        if b < 1.0 {
            out.extend(x.iter().zip(&w).map(|(&t, &wt)| {
                let r = a + h * t;
                (r, h * wt * r, (1.0 - r) * (1.0 + r))
            }));
            continue;
        }
        let b1 = (1.0 + edge_power).max(1e-3);
        let kappa = (grading * b1).ceil() / b1;
        out.extend(x.iter().zip(&w).map(|(&t, &wt)| {
            let u = 1.0 - t;
            // 1 − r is kept exactly; r itself may round to 1.
            let gap = h * u.powf(kappa);
            let r = 1.0 - gap;
            (r, h * kappa * u.powf(kappa - 1.0) * wt * r, gap * (2.0 - gap))
        }));
    }
    out
}

/// Soft angular cuts as a function of the radius.
pub type RingCuts<'a> = dyn Fn(f64) -> Vec<f64> + Sync + 'a;

/// No soft cuts on any ring.
pub fn no_rings(_: f64) -> Vec<f64> {
    Vec::new()
}

/// A quadrature rule `Σ w_k F(z_k)`.
#[derive(Clone, Debug)]
pub struct QuadRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    /// `1 − |z_k|²` without the cancellation of computing it from `z_k`.
    pub edge: Vec<f64>,
}

impl QuadRule {
    /// Polar product rule on the annulus `r0 ≤ |z| ≤ r1`.
    pub fn polar(grid: &DiskGrid, r0: f64, r1: f64, edge_power: f64, features: &[f64]) -> Self {
        Self::polar_with_breaks(grid, r0, r1, edge_power, features, &[], &no_rings)
    }

    /// [`QuadRule::polar`] with extra radial panel boundaries and, for each
    /// radius `r`, soft angular cuts `rings(r)`.
    pub fn polar_with_breaks(
        grid: &DiskGrid,
        r0: f64,
        r1: f64,
        edge_power: f64,
        features: &[f64],
        breaks: &[f64],
        rings: &RingCuts<'_>,
    ) -> Self {
        let rad = radial_rule(grid.n_r, r0, r1, grid.grading, edge_power, breaks);
        let base = angular_rule(grid.n_theta, features, grid.grading);
        let mut nodes = Vec::with_capacity(rad.len() * base.len());
        let mut weights = Vec::with_capacity(rad.len() * base.len());
        let mut edge = Vec::with_capacity(rad.len() * base.len());
        for &(r, wr, om) in &rad {
            let soft = rings(r);
            let own;
            let ang = if soft.is_empty() {
                &base
            } else {
                own = angular_rule_soft(grid.n_theta, features, &soft, grid.grading);
                &own
            };
            for &(t, wt) in ang {
                nodes.push(Complex64::from_polar(r, t));
                weights.push(wr * wt);
                edge.push(om);
            }
        }
        QuadRule { nodes, weights, edge }
    }

    /// Rule on the circle `|z| = radius` (weights are `dθ`).
    pub fn circle(grid: &CircleGrid, radius: f64, features: &[f64], grading: f64) -> Self {
        let ang = angular_rule(grid.n_theta, features, grading);
        QuadRule {
            nodes: ang.iter().map(|&(t, _)| Complex64::from_polar(radius, t)).collect(),
            weights: ang.iter().map(|&(_, w)| w).collect(),
            edge: vec![(1.0 - radius) * (1.0 + radius); ang.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule; a non-finite integrand value is an error.
    pub fn integrate<F: Fn(Complex64) -> f64 + Sync>(&self, f: F) -> Result<f64> {
        self.integrate_edge(|z, _| f(z))
    }

    /// Like [`QuadRule::integrate`], passing `1 − |z|²` along with `z`.
    pub fn integrate_edge<F: Fn(Complex64, f64) -> f64 + Sync>(&self, f: F) -> Result<f64> {
        init_thread_pool();
        let vals: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .zip(self.edge.par_iter())
            .map(|((&z, &w), &om)| {
                let v = f(z, om);
                if v == 0.0 {
                    0.0
                } else {
                    w * v
                }
            })
            .collect();
        let mut sum = 0.0;
        for (k, v) in vals.iter().enumerate() {
            if !v.is_finite() {
                return Err(NevError::Integration(format!(
                    "non-finite integrand at node {}",
                    self.nodes[k]
                )));
            }
            sum += v;
        }
        Ok(sum)
    }
}

/// The annulus `r0 ≤ |z| ≤ r1`; `(0, 1)` is the disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub r0: f64,
    pub r1: f64,
}

impl Region {
    pub const DISC: Region = Region { r0: 0.0, r1: 1.0 };

    pub fn disc(u: f64) -> Self {
        Region { r0: 0.0, r1: u }
    }

    pub fn annulus(r0: f64, r1: f64) -> Self {
        Region { r0, r1 }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0 <= self.r0 && self.r0 < self.r1 && self.r1 <= 1.0) {
            return Err(NevError::InvalidInput(format!("bad region [{}, {}]", self.r0, self.r1)));
        }
        Ok(())
    }
}

/// Value of an integral with its change under one grid doubling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub delta: f64,
}

impl Estimate {
    pub fn relative_delta(&self) -> f64 {
        if self.value == 0.0 {
            if self.delta == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.delta / self.value.abs()
        }
    }
}

/// `∫_region F dm` at `grid` and at the doubled grid.
pub fn integrate_disk<F: Fn(Complex64) -> f64 + Sync>(
    f: F,
    grid: &DiskGrid,
    region: Region,
    edge_power: f64,
    features: &[f64],
) -> Result<Estimate> {
    grid.validate()?;
    region.validate()?;
    let a = QuadRule::polar(grid, region.r0, region.r1, edge_power, features).integrate(&f)?;
    let fine = grid.doubled();
    let b = QuadRule::polar(&fine, region.r0, region.r1, edge_power, features).integrate(&f)?;
    Ok(Estimate { value: b, delta: (b - a).abs() })
}

/// Which part of `log|f|` enters an integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogPart {
    Full,
    Plus,
    Minus,
}

/// Angles where integrands built from `E` and `f` change character.
pub fn feature_angles(e: &ArcSet, f: &AnalyticTestFunction) -> Vec<f64> {
    let mut out: Vec<f64> = e.gaps().iter().flat_map(|g| [g.start, g.beta()]).collect();
    out.extend(f.singular_angles());
    out
}

/// `∫_region W(z)·part(log|f(sz)|) dm` on one grid; `W` also receives `1 − |z|²`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_log<W: Fn(Complex64, f64) -> f64 + Sync>(
    f: &AnalyticTestFunction,
    s: f64,
    weight: W,
    part: LogPart,
    grid: &DiskGrid,
    region: Region,
    edge_power: f64,
    features: &[f64],
) -> Result<f64> {
    integrate_log_rings(f, s, weight, part, grid, region, edge_power, features, &[], &no_rings)
}

/// [`integrate_log`] with extra radial panel boundaries and soft angular
/// cuts `rings(r)` for transitions of `W`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_log_rings<W: Fn(Complex64, f64) -> f64 + Sync>(
    f: &AnalyticTestFunction,
    s: f64,
    weight: W,
    part: LogPart,
    grid: &DiskGrid,
    region: Region,
    edge_power: f64,
    features: &[f64],
    radial_breaks: &[f64],
    rings: &RingCuts<'_>,
) -> Result<f64> {
    grid.validate()?;
    region.validate()?;
    let plus = |rule: &QuadRule| {
        rule.integrate_edge(|z, om| {
            let w = weight(z, om);
            if w == 0.0 {
                0.0
            } else {
                w * f.log_plus(z * s)
            }
        })
    };
    if part == LogPart::Plus {
        let rule = QuadRule::polar_with_breaks(grid, region.r0, region.r1, edge_power, features, radial_breaks, rings);
        return plus(&rule);
    }
    let (sing, outside) = singular_points(f, s, grid, region)?;
    let mut breaks = radial_breaks.to_vec();
    for p in &sing {
        let r = p.a.norm();
        breaks.extend([r - p.rho, r + p.rho]);
    }
    // Each ring is also cut where it crosses the edge of a zero's bump.
    let all_rings = |r: f64| {
        let mut out = rings(r);
        for p in &sing {
            let ra = p.a.norm();
            if r <= 0.0 || ra <= 0.0 {
                continue;
            }
            let c = (r * r + ra * ra - p.rho * p.rho) / (2.0 * r * ra);
            if c.abs() < 1.0 {
                let d = c.acos();
                out.extend([p.a.arg() - d, p.a.arg() + d]);
            }
        }
        out
    };
    let rule = QuadRule::polar_with_breaks(grid, region.r0, region.r1, edge_power, features, &breaks, &all_rings);
    let full = integrate_log_full(f, s, &weight, grid, &sing, &outside, &rule)?;
    match part {
        LogPart::Full => Ok(full),
        _ => Ok(plus(&rule)? - full),
    }
}

struct Singular {
    a: Complex64,
    mult: f64,
    rho: f64,
}

fn bump(r: f64, rho: f64) -> f64 {
    1.0 - smoothstep(r / rho).0
}

fn singular_points(
    f: &AnalyticTestFunction,
    s: f64,
    grid: &DiskGrid,
    region: Region,
) -> Result<(Vec<Singular>, Vec<Complex64>)> {
    let mut inside: Vec<(Complex64, f64)> = Vec::new();
    let mut outside = Vec::new();
    for a in f.zeros(s) {
        let r = a.norm();
        if (r - region.r0).abs() < 1e-12 && region.r0 > 0.0 || (r - region.r1).abs() < 1e-12 {
            return Err(NevError::Integration(format!("zero {a} on the region boundary")));
        }
        if (r > region.r0 || region.r0 == 0.0) && r < region.r1 {
            match inside.iter_mut().find(|(b, _)| (*b - a).norm() < 1e-14) {
                Some(x) => x.1 += 1.0,
                None => inside.push((a, 1.0)),
            }
        } else {
            outside.push(a);
        }
    }
    let mut out = Vec::with_capacity(inside.len());
    for (i, &(a, m)) in inside.iter().enumerate() {
        let r = a.norm();
        let mut rho = grid.rho_excl.min(0.5 * (1.0 - r)).min(0.5 * (region.r1 - r));
        if region.r0 > 0.0 {
            rho = rho.min(0.5 * (r - region.r0));
        }
        for (j, &(b, _)) in inside.iter().enumerate() {
            if i != j {
                rho = rho.min(0.5 * (a - b).norm());
            }
        }
        if !(rho > 1e-12) {
            return Err(NevError::Integration(format!("zero {a} leaves no room for its local disc")));
        }
        out.push(Singular { a, mult: m, rho });
    }
    Ok((out, outside))
}

fn integrate_log_full<W: Fn(Complex64, f64) -> f64 + Sync>(
    f: &AnalyticTestFunction,
    s: f64,
    weight: &W,
    grid: &DiskGrid,
    sing: &[Singular],
    outside: &[Complex64],
    rule: &QuadRule,
) -> Result<f64> {
    let global = rule.integrate_edge(|z, om| {
        let w = weight(z, om);
        if w == 0.0 {
            return 0.0;
        }
        let mut l = f.log_abs_scaled_regular(s, z);
        for a in outside {
            l += (z - a).norm().ln();
        }
        for p in sing {
            let r = (z - p.a).norm();
            let k = bump(r, p.rho);
            if k < 1.0 {
                l += (1.0 - k) * p.mult * r.ln();
            }
        }
        w * l
    })?;
    let n_r = grid.n_r.max(12);
    let n_t = (grid.n_theta / 2).max(16);
    let (x, wx) = gauss_legendre(n_r);
    let mut local = 0.0;
    for p in sing {
        let mut nodes = Vec::with_capacity(n_r * n_t);
        let mut weights = Vec::with_capacity(n_r * n_t);
        let mut edge = Vec::with_capacity(n_r * n_t);
        for (&t, &wt) in x.iter().zip(&wx) {
            // r = ρt² makes r·log r smooth enough for Gauss–Legendre.
            let r = p.rho * t * t;
            let wr = 2.0 * p.rho * t * wt * r * bump(r, p.rho) * r.ln();
            for k in 0..n_t {
                let th = TAU * k as f64 / n_t as f64;
                let z = p.a + Complex64::from_polar(r, th);
                nodes.push(z);
                weights.push(wr * TAU / n_t as f64);
                edge.push(1.0 - z.norm_sqr());
            }
        }
        let lr = QuadRule { nodes, weights, edge };
        local += p.mult * lr.integrate_edge(weight)?;
    }
    Ok(global + local)
}

/// Which weight multiplies `(1−|z|²)^{p−1}` in the `p > 0` norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormWeight {
    /// `φ(sz)`.
    Phi,
    /// `d(sz, E)^exponent`.
    DistPower { exponent: f64 },
}

/// The radii `1 − δ 2^{−k}`, `k = 0..=k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SGrid {
    pub delta: f64,
    pub k_max: u32,
}

impl Default for SGrid {
    fn default() -> Self {
        SGrid { delta: 0.5, k_max: 6 }
    }
}

impl SGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(NevError::InvalidInput(format!("δ = {} not in (0, 1]", self.delta)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..=self.k_max).map(|k| 1.0 - self.delta * 0.5f64.powi(k as i32)).collect()
    }

    /// One more point towards `s = 1`.
    pub fn refined(&self) -> Self {
        SGrid { k_max: self.k_max + 1, ..*self }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormPoint {
    pub s: f64,
    pub value: f64,
    pub refinement_delta: f64,
    /// Individual terms for the three-part `p = 0` norm.
    pub terms: Vec<f64>,
}

/// A norm as a function of `s`, and its sup over the sampled window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormCurve {
    pub points: Vec<NormPoint>,
    pub windowed_sup: f64,
    /// Values keep growing geometrically towards `s = 1`.
    pub diverging: bool,
    /// Every point changed by less than 1% under grid doubling.
    pub converged: bool,
}

impl NormCurve {
    fn from_points(points: Vec<NormPoint>) -> Self {
        let v: Vec<f64> = points.iter().map(|p| p.value).collect();
        let diverging = v.len() >= 4
            && v[v.len() - 4..].windows(2).all(|w| w[0] > 0.0 && w[1] >= 1.5 * w[0]);
        let sup = if diverging {
            f64::INFINITY
        } else {
            v.iter().cloned().fold(0.0, f64::max)
        };
        let converged = points.iter().all(|p| p.refinement_delta < 0.01);
        NormCurve { points, windowed_sup: sup, diverging, converged }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("s,value,refinement_delta\n");
        for p in &self.points {
            s.push_str(&format!("{:.12e},{:.12e},{:.6e}\n", p.s, p.value, p.refinement_delta));
        }
        s
    }

    /// Whether the sampled values are nondecreasing in `s` up to `tol`
    /// (relative).
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| w[1].value >= w[0].value - tol * w[0].value.abs())
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

/// `sup_s ∫_D (1−|z|²)^{p−1} ω(sz) log⁺|f(sz)| dm` over the `s` window.
pub fn nevanlinna_norm_p_pos(
    f: &AnalyticTestFunction,
    e: &ArcSet,
    params: &WeightParams,
    weight: NormWeight,
    s_grid: &SGrid,
    grid: &DiskGrid,
) -> Result<NormCurve> {
    params.validate()?;
    s_grid.validate()?;
    let p = params.p;
    if !(p > 0.0) {
        return Err(NevError::InvalidInput("this norm needs p > 0".into()));
    }
    let w = Weight::new(e, *params);
    let feats = feature_angles(e, f);
    let mut points = Vec::new();
    for s in s_grid.values() {
        let om = |z: Complex64, w1: f64| -> f64 {
            let base = w1.powf(p - 1.0);
            match weight {
                NormWeight::Phi => base * w.phi_value(z * s),
                NormWeight::DistPower { exponent } => {
                    base * e.distance_unchecked(z * s).powf(exponent)
                }
            }
        };
        let a = integrate_log(f, s, om, LogPart::Plus, grid, Region::DISC, p - 1.0, &feats)?;
        let b = integrate_log(f, s, om, LogPart::Plus, &grid.doubled(), Region::DISC, p - 1.0, &feats)?;
        points.push(NormPoint { s, value: b, refinement_delta: relative(a, b), terms: vec![b] });
    }
    Ok(NormCurve::from_points(points))
}

/// The three `p = 0` terms at one `s`.
pub fn norm_p0_terms(
    f: &AnalyticTestFunction,
    e: &ArcSet,
    q: f64,
    s: f64,
    grid: &DiskGrid,
    circle: &CircleGrid,
) -> Result<[f64; 3]> {
    let feats = feature_angles(e, f);
    let t1 = QuadRule::circle(circle, s, &feats, grid.grading)
        .integrate(|z| e.distance_unchecked(z).powf(q) * f.log_plus(z))?;
    let t2 = integrate_log(
        f,
        s,
        |z, _| e.distance_unchecked(z * s).powf(q - 1.0),
        LogPart::Plus,
        grid,
        Region::DISC,
        0.0,
        &feats,
    )?;
    let t3 = integrate_log(
        f,
        s,
        |z, _| (1.0 - (z * s).norm_sqr()).powf(q - 1.0),
        LogPart::Plus,
        grid,
        Region::DISC,
        0.0,
        &feats,
    )?;
    Ok([t1, t2, t3])
}

/// `sup_s` of the three-part `p = 0` norm with exponent `q`.
pub fn nevanlinna_norm_p0(
    f: &AnalyticTestFunction,
    e: &ArcSet,
    q: f64,
    s_grid: &SGrid,
    grid: &DiskGrid,
    circle: &CircleGrid,
) -> Result<NormCurve> {
    if !(q > 0.0) {
        return Err(NevError::InvalidInput(format!("q = {q} must be > 0")));
    }
    s_grid.validate()?;
    grid.validate()?;
    let fine_c = CircleGrid { n_theta: 2 * circle.n_theta };
    let mut points = Vec::new();
    for s in s_grid.values() {
        let a = norm_p0_terms(f, e, q, s, grid, circle)?;
        let b = norm_p0_terms(f, e, q, s, &grid.doubled(), &fine_c)?;
        let (va, vb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
        points.push(NormPoint { s, value: vb, refinement_delta: relative(va, vb), terms: b.to_vec() });
    }
    Ok(NormCurve::from_points(points))
}

/// Samples of `γ(s) = ∫_T φ(se^{iθ}) log⁻|f(se^{iθ})| dθ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityProbe {
    pub samples: Vec<(f64, f64)>,
    pub max_jump: f64,
}

pub fn continuity_probe(
    f: &AnalyticTestFunction,
    e: &ArcSet,
    params: &WeightParams,
    s_range: (f64, f64),
    step: f64,
    circle: &CircleGrid,
) -> Result<ContinuityProbe> {
    let (s0, s1) = s_range;
    if !(0.0 < s0 && s0 < s1 && s1 < 1.0 && step > 0.0) {
        return Err(NevError::InvalidInput("need 0 < s0 < s1 < 1 and step > 0".into()));
    }
    let w = Weight::new(e, *params);
    let feats = feature_angles(e, f);
    let n = ((s1 - s0) / step).round() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let s = s0 + (s1 - s0) * k as f64 / n.max(1) as f64;
        let g = QuadRule::circle(circle, s, &feats, 2.0)
            .integrate(|z| w.phi_value(z) * f.log_minus(z))?;
        samples.push((s, g));
    }
    let max_jump = samples.windows(2).map(|w| (w[1].1 - w[0].1).abs()).fold(0.0, f64::max);
    Ok(ContinuityProbe { samples, max_jump })
}
