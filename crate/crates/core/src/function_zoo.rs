//! Holomorphic test functions with exact zero sets.
//!
//! Every function is a product of factors whose logarithms are known in
//! closed form, so `log|f|`, its regular part near zeros, the phase and the
//! logarithmic derivative are all evaluated factor by factor.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::boundary_set::ArcSet;
use crate::error::{NevError, Result};

/// A factor of a test function. Singular points are given by their angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factor {
    /// `Π (|a|/a)(a−z)/(1−āz)`.
    FiniteBlaschke { zeros: Vec<Complex64> },
    /// Monic polynomial `Π (z−r)`.
    Polynomial { roots: Vec<Complex64> },
    /// `exp(Σ c (ζ+z)/(ζ−z))`, masses given as `(c, angle of ζ)`.
    SingularExponential { masses: Vec<(f64, f64)> },
    /// `exp(K'(1−ζ̄z)^{−m})`, principal branch.
    PowerGrowth { k: f64, m: f64, angle: f64 },
    Product { factors: Vec<Factor> },
}

impl Factor {
    pub fn blaschke(zeros: &[Complex64]) -> Self {
        Factor::FiniteBlaschke { zeros: zeros.to_vec() }
    }

    /// Blaschke product with `n` zeros drawn uniformly by area from the
    /// annulus `r_min < |a| < r_max`.
    pub fn random_blaschke(n: usize, r_min: f64, r_max: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeros = (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                let r = (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt();
                Complex64::from_polar(r, TAU * rng.gen::<f64>())
            })
            .collect();
        Factor::FiniteBlaschke { zeros }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NevError::InvalidInput(m));
        match self {
            Factor::FiniteBlaschke { zeros } => {
                for a in zeros {
                    if !(a.norm() < 1.0) {
                        return bad(format!("Blaschke zero {a} not in the open disc"));
                    }
                }
            }
            Factor::Polynomial { roots } => {
                if roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
                    return bad("non-finite polynomial root".into());
                }
            }
            Factor::SingularExponential { masses } => {
                for &(c, t) in masses {
                    if !(c >= 0.0) || !t.is_finite() {
                        return bad(format!("singular mass ({c}, {t}) invalid"));
                    }
                }
            }
            Factor::PowerGrowth { k, m, angle } => {
                if !(*k > 0.0) || !(*m > 0.0) || !angle.is_finite() {
                    return bad(format!("power growth needs K' > 0 and m > 0, got {k}, {m}"));
                }
            }
            Factor::Product { factors } => {
                for f in factors {
                    f.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Complex logarithm of the factor at `z` (any branch; the real part is
    /// `log|·|`).
    fn log_value(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Factor::FiniteBlaschke { zeros } => zeros
                .iter()
                .map(|&a| {
                    if a.norm() == 0.0 {
                        z.ln()
                    } else {
                        (a.norm() / a * (a - z) / (one - a.conj() * z)).ln()
                    }
                })
                .sum(),
            Factor::Polynomial { roots } => roots.iter().map(|&r| (z - r).ln()).sum(),
            Factor::SingularExponential { masses } => masses
                .iter()
                .map(|&(c, t)| {
                    let zeta = Complex64::from_polar(1.0, t);
                    c * (zeta + z) / (zeta - z)
                })
                .sum(),
            Factor::PowerGrowth { k, m, angle } => {
                let zeta = Complex64::from_polar(1.0, *angle);
                *k * (one - zeta.conj() * z).powf(-*m)
            }
            Factor::Product { factors } => factors.iter().map(|f| f.log_value(z)).sum(),
        }
    }

    fn log_abs(&self, z: Complex64) -> f64 {
        match self {
            Factor::FiniteBlaschke { zeros } => zeros
                .iter()
                .map(|&a| (a - z).norm().ln() - (1.0 - a.conj() * z).norm().ln())
                .sum(),
            Factor::Polynomial { roots } => roots.iter().map(|&r| (z - r).norm().ln()).sum(),
            Factor::SingularExponential { masses } => masses
                .iter()
                .map(|&(c, t)| {
                    if c == 0.0 {
                        return 0.0;
                    }
                    let zeta = Complex64::from_polar(1.0, t);
                    c * (1.0 - z.norm_sqr()) / (zeta - z).norm_sqr()
                })
                .sum(),
            _ => self.log_value(z).re,
        }
    }

    /// `log|F(sz)| − Σ log|z − a/s|` over the zeros `a` of `F` with `|a| < s`.
    fn log_abs_scaled_regular(&self, s: f64, z: Complex64) -> f64 {
        let w = z * s;
        match self {
            Factor::FiniteBlaschke { zeros } => zeros
                .iter()
                .map(|&a| {
                    let tail = -(1.0 - a.conj() * w).norm().ln();
                    if a.norm() < s {
                        s.ln() + tail
                    } else {
                        (a - w).norm().ln() + tail
                    }
                })
                .sum(),
            Factor::Polynomial { roots } => roots
                .iter()
                .map(|&r| if r.norm() < s { s.ln() } else { (w - r).norm().ln() })
                .sum(),
            Factor::Product { factors } => {
                factors.iter().map(|f| f.log_abs_scaled_regular(s, z)).sum()
            }
            _ => self.log_abs(w),
        }
    }

    fn log_derivative(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Factor::FiniteBlaschke { zeros } => zeros
                .iter()
                .map(|&a| one / (z - a) + a.conj() / (one - a.conj() * z))
                .sum(),
            Factor::Polynomial { roots } => roots.iter().map(|&r| one / (z - r)).sum(),
            Factor::SingularExponential { masses } => masses
                .iter()
                .map(|&(c, t)| {
                    let zeta = Complex64::from_polar(1.0, t);
                    2.0 * c * zeta / ((zeta - z) * (zeta - z))
                })
                .sum(),
            Factor::PowerGrowth { k, m, angle } => {
                let zc = Complex64::from_polar(1.0, -*angle);
                *k * *m * zc * (one - zc * z).powf(-*m - 1.0)
            }
            Factor::Product { factors } => factors.iter().map(|f| f.log_derivative(z)).sum(),
        }
    }

    fn collect_zeros(&self, out: &mut Vec<Complex64>) {
        match self {
            Factor::FiniteBlaschke { zeros } => out.extend(zeros),
            Factor::Polynomial { roots } => out.extend(roots.iter().filter(|r| r.norm() < 1.0)),
            Factor::Product { factors } => factors.iter().for_each(|f| f.collect_zeros(out)),
            _ => {}
        }
    }

    /// Singular points on `T` with their envelope constants `(angle, K, q)`.
    fn singular_points(&self, out: &mut Vec<(f64, f64, f64)>) {
        match self {
            Factor::SingularExponential { masses } => {
                out.extend(masses.iter().filter(|m| m.0 > 0.0).map(|&(c, t)| (t, 2.0 * c, 1.0)))
            }
            Factor::PowerGrowth { k, m, angle } => out.push((*angle, *k, *m)),
            Factor::Product { factors } => factors.iter().for_each(|f| f.singular_points(out)),
            _ => {}
        }
    }

    fn has_polynomial(&self) -> bool {
        match self {
            Factor::Polynomial { .. } => true,
            Factor::Product { factors } => factors.iter().any(Factor::has_polynomial),
            _ => false,
        }
    }
}

/// A test function `f = e^{log_norm}·F`, with `log_norm` chosen so that
/// `|f(0)| = 1` unless built with [`AnalyticTestFunction::unnormalized`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Factor", into = "Factor")]
pub struct AnalyticTestFunction {
    factor: Factor,
    log_norm: f64,
}

impl TryFrom<Factor> for AnalyticTestFunction {
    type Error = NevError;
    fn try_from(f: Factor) -> Result<Self> {
        AnalyticTestFunction::new(f)
    }
}

impl From<AnalyticTestFunction> for Factor {
    fn from(f: AnalyticTestFunction) -> Factor {
        f.factor
    }
}

impl AnalyticTestFunction {
    /// Normalizes `F` by `1/|F(0)|`. Fails if `F(0) = 0`.
    pub fn new(factor: Factor) -> Result<Self> {
        factor.validate()?;
        let l0 = factor.log_abs(Complex64::new(0.0, 0.0));
        if !l0.is_finite() {
            return Err(NevError::InvalidInput(
                "function vanishes at the origin and cannot be normalized".into(),
            ));
        }
        Ok(AnalyticTestFunction { factor, log_norm: -l0 })
    }

    /// `F` itself, zeros at the origin allowed.
    pub fn unnormalized(factor: Factor) -> Result<Self> {
        factor.validate()?;
        Ok(AnalyticTestFunction { factor, log_norm: 0.0 })
    }

    /// `f ≡ 1`.
    pub fn one() -> Self {
        AnalyticTestFunction { factor: Factor::Product { factors: vec![] }, log_norm: 0.0 }
    }

    pub fn factor(&self) -> &Factor {
        &self.factor
    }

    /// `log|f(0)| − log|F(0)|`.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// `log|f(z)|`, `−∞` at zeros.
    pub fn log_abs(&self, z: Complex64) -> f64 {
        self.factor.log_abs(z) + self.log_norm
    }

    pub fn log_plus(&self, z: Complex64) -> f64 {
        self.log_abs(z).max(0.0)
    }

    pub fn log_minus(&self, z: Complex64) -> f64 {
        (-self.log_abs(z)).max(0.0)
    }

    /// `log|f(sz)| − Σ_{a ∈ Z(f_s)} log|z − a|`, finite at the zeros of `f_s`.
    pub fn log_abs_scaled_regular(&self, s: f64, z: Complex64) -> f64 {
        self.factor.log_abs_scaled_regular(s, z) + self.log_norm
    }

    /// `arg f(z)` modulo `2π`.
    pub fn phase(&self, z: Complex64) -> f64 {
        self.factor.log_value(z).im.rem_euclid(TAU)
    }

    /// `f'(z)/f(z)`.
    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        self.factor.log_derivative(z)
    }

    /// Outward normal derivative of `log|f(sz)|` at `z = e^{iθ}`.
    pub fn normal_derivative_scaled(&self, s: f64, theta: f64) -> f64 {
        let z = Complex64::from_polar(1.0, theta);
        (z * s * self.log_derivative(z * s)).re
    }

    /// All zeros of `f` in the disc, with multiplicity.
    pub fn zeros_all(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        self.factor.collect_zeros(&mut out);
        out
    }

    /// Zeros of `f_s(z) = f(sz)` in the disc: `{a/s : |a| < s}`.
    pub fn zeros(&self, s: f64) -> Vec<Complex64> {
        self.zeros_all().into_iter().filter(|a| a.norm() < s).map(|a| a / s).collect()
    }

    /// Angles of the boundary singular points of `f`.
    pub fn singular_angles(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.factor.singular_points(&mut out);
        out.into_iter().map(|x| x.0).collect()
    }

    pub fn is_zero_free(&self) -> bool {
        self.zeros_all().is_empty()
    }

    /// Growth envelope implied by the factor structure, or `None` when the
    /// function has a polynomial factor or a singular point off `E`.
    ///
    /// Bounded factors contribute `log(1/|B(0)|) ≤ 2^q log(1/|B(0)|)/d^q`.
    /// A mass `c` at `ζ ∈ E` gives `c(1−|z|²)/|ζ−z|² ≤ 2c/|ζ−z| ≤ 2c/d(z,E)`,
    /// and `K'(1−ζ̄z)^{−m}` gives `K'/d(z,E)^m`.
    pub fn natural_envelope(&self, e: &ArcSet) -> Option<GrowthEnvelope> {
        if self.factor.has_polynomial() {
            return None;
        }
        let mut sing = Vec::new();
        self.factor.singular_points(&mut sing);
        for &(t, _, _) in &sing {
            if e.circle_distance(t) > 1e-12 {
                return None;
            }
        }
        let q = sing.iter().map(|x| x.2).fold(1.0, f64::max);
        let mut k: f64 = sing.iter().map(|&(_, ki, qi)| ki * 2f64.powf(q - qi)).sum();
        let lb: f64 = self.zeros_all().iter().map(|a| -a.norm().ln()).sum();
        k += 2f64.powf(q) * lb;
        if k == 0.0 {
            k = 1.0;
        }
        Some(GrowthEnvelope { k, p: 0.0, q, e: e.clone() })
    }

    /// Number of zeros in `|z| < ρ` from the winding of `f` around `|z| = ρ`.
    ///
    /// The phase is sampled at `n` points and the count doubles until no
    /// step exceeds `π/2`.
    pub fn argument_principle_count(&self, rho: f64, n: usize) -> Result<usize> {
        if n < 256 {
            return Err(NevError::InvalidInput(format!("need at least 256 nodes, got {n}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(NevError::InvalidInput(format!("contour radius {rho} not in (0,1)")));
        }
        if let Some(a) = self.zeros_all().iter().find(|a| (a.norm() - rho).abs() < 1e-6) {
            return Err(NevError::Contour(format!("zero {a} within 1e-6 of |z| = {rho}")));
        }
        let mut n = n;
        while n <= 1 << 22 {
            let phase = |k: usize| self.phase(Complex64::from_polar(rho, TAU * k as f64 / n as f64));
            let mut total = 0.0;
            let mut smooth = true;
            let mut prev = phase(0);
            for k in 1..=n {
                let cur = phase(k % n);
                let d = (cur - prev + PI).rem_euclid(TAU) - PI;
                if d.abs() > 0.5 * PI {
                    smooth = false;
                    break;
                }
                total += d;
                prev = cur;
            }
            if smooth {
                let w = total / TAU;
                let r = w.round();
                if (w - r).abs() > 1e-3 || r < 0.0 {
                    return Err(NevError::Contour(format!("winding number {w} not a count")));
                }
                return Ok(r as usize);
            }
            n *= 2;
        }
        Err(NevError::Contour(format!("phase unresolved on |z| = {rho}")))
    }
}

/// `log⁺|f(z)| ≤ K (1−|z|²)^{−p} d(z,E)^{−q}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEnvelope {
    pub k: f64,
    pub p: f64,
    pub q: f64,
    pub e: ArcSet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub nodes: usize,
    pub worst_ratio: f64,
    pub worst_node: Option<Complex64>,
    pub holds: bool,
}

/// Evaluates `log⁺|f|·(1−|z|²)^p d(z,E)^q / K` on `grid`.
pub fn check_growth_envelope(
    f: &AnalyticTestFunction,
    env: &GrowthEnvelope,
    grid: &[Complex64],
) -> Result<EnvelopeReport> {
    if !(env.k > 0.0 && env.q > 0.0 && env.p >= 0.0) {
        return Err(NevError::InvalidInput("envelope needs K, q > 0 and p ≥ 0".into()));
    }
    let mut worst = 0.0;
    let mut node = None;
    for &z in grid {
        if !(z.norm() < 1.0) {
            return Err(NevError::Domain(format!("grid node {z} not interior")));
        }
        let lp = f.log_plus(z);
        if lp == 0.0 {
            continue;
        }
        let d = env.e.distance_unchecked(z);
        let r = lp * (1.0 - z.norm_sqr()).powf(env.p) * d.powf(env.q) / env.k;
        if r > worst {
            worst = r;
            node = Some(z);
        }
    }
    Ok(EnvelopeReport { nodes: grid.len(), worst_ratio: worst, worst_node: node, holds: worst <= 1.0 })
}

/// Polar test grid with nodes accumulating at the circle and at angle 0.
pub fn envelope_grid(n_r: usize, n_t: usize) -> Vec<Complex64> {
    let mut g = Vec::with_capacity(n_r * n_t);
    for i in 0..n_r {
        let r = 1.0 - 10f64.powf(-6.0 * (i as f64 + 0.5) / n_r as f64);
        for j in 0..n_t {
            let u = (j as f64 + 0.5) / n_t as f64 - 0.5;
            let t = PI * u.signum() * (2.0 * u.abs()).powi(3);
            g.push(Complex64::from_polar(r, t));
        }
    }
    g
}
