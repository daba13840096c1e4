//! The smooth weight `φ` attached to `E` and the test functions
//! `g_s(z) = (1−|z|²)^{p+1} φ(sz)`.
//!
//! On the cone `Γ_j` over gap `j`,
//! `φ_j = η_j ψ_j^q + (1−|z|²)^{2q}` with
//! `ψ_j = |z−a_j|²|z−b_j|²/δ_j²` and
//! `η_j = χ(|z−a_j|²/(1−|z|²)²) χ(|z−b_j|²/(1−|z|²)²)`;
//! on the cone over `E` only `(1−|z|²)^{2q}` remains.
//!
//! All derivatives are closed forms assembled with [`jet::Jet`].

pub mod bounds;
pub mod jet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary_set::{ArcSet, Gap};
use crate::error::{NevError, Result};
use jet::{cross_term, Jet};

/// Largest `|χ'|` of the cutoff below (attained at `t = 2.5`).
pub const CHI_D1_MAX: f64 = 2.0;
/// Largest `|χ''|` of the cutoff below, rounded up (attained near `t ≈ 2.218`).
pub const CHI_D2_MAX: f64 = 9.8411;

/// Exponents of the weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub p: f64,
    /// Distance exponent of the weight, `r = 2q`.
    pub r: f64,
    #[serde(default = "default_lo")]
    pub cutoff_lo: f64,
    #[serde(default = "default_hi")]
    pub cutoff_hi: f64,
}

fn default_lo() -> f64 {
    2.0
}
fn default_hi() -> f64 {
    3.0
}

impl WeightParams {
    pub fn new(p: f64, r: f64) -> Result<Self> {
        let w = WeightParams { p, r, cutoff_lo: 2.0, cutoff_hi: 3.0 };
        w.validate()?;
        Ok(w)
    }

    /// Parameters from `p` and the exponent `q` of `ψ^q`.
    pub fn with_q(p: f64, q: f64) -> Result<Self> {
        Self::new(p, 2.0 * q)
    }

    pub fn q(&self) -> f64 {
        0.5 * self.r
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 0.0 && self.p.is_finite()) {
            return Err(NevError::InvalidInput(format!("p = {} must be ≥ 0", self.p)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(NevError::InvalidInput(format!("r = {} must be > 0", self.r)));
        }
        if !(self.cutoff_lo < self.cutoff_hi) {
            return Err(NevError::InvalidInput("cutoff_lo must be < cutoff_hi".into()));
        }
        Ok(())
    }

    fn cutoff(&self) -> Cutoff {
        Cutoff { lo: self.cutoff_lo, hi: self.cutoff_hi }
    }
}

/// `σ(u) = g(u)/(g(u)+g(1−u))`, `g(u) = e^{-1/u}`, with two derivatives.
pub fn smoothstep(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if u >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let v = 1.0 - u;
    let h = 1.0 / u - 1.0 / v;
    let e = (-h.abs()).exp();
    let s = if h > 0.0 { e / (1.0 + e) } else { 1.0 / (1.0 + e) };
    // σ(1−σ) written so that it does not cancel.
    let ss = e / ((1.0 + e) * (1.0 + e));
    let k = 1.0 / (u * u) + 1.0 / (v * v);
    let k1 = -2.0 / (u * u * u) + 2.0 / (v * v * v);
    let d1 = ss * k;
    let d2 = d1 * (1.0 - 2.0 * s) * k + ss * k1;
    (s, d1, d2)
}

/// `χ(t) = σ((t − lo)/(hi − lo))`.
#[derive(Clone, Copy, Debug)]
pub struct Cutoff {
    pub lo: f64,
    pub hi: f64,
}

impl Cutoff {
    pub const STANDARD: Cutoff = Cutoff { lo: 2.0, hi: 3.0 };

    /// `(χ, χ', χ'')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let w = self.hi - self.lo;
        let (s, d1, d2) = smoothstep((t - self.lo) / w);
        (s, d1 / w, d2 / (w * w))
    }
}

/// `χ(t)` for the standard thresholds 2 and 3.
pub fn chi(t: f64) -> f64 {
    Cutoff::STANDARD.eval(t).0
}

/// `φ` and its derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightValue {
    pub phi: f64,
    /// `∂̄φ`.
    pub grad: Complex64,
    pub laplacian: f64,
    pub phi_a: f64,
    pub phi_c: f64,
    /// Gap whose cone contains the point; `None` on the cone over `E`.
    pub gap: Option<usize>,
}

/// Cone-local pieces of `φ_A = η ψ^q` at `ζ = sz`, as jets in `z`.
#[derive(Clone, Copy, Debug)]
pub struct ConePieces {
    pub chi_a: Jet,
    pub chi_b: Jet,
    pub eta: Jet,
    pub psi_q: Jet,
    /// Arguments `|ζ−a|²/(1−|ζ|²)²`, `|ζ−b|²/(1−|ζ|²)²` of the two cutoffs.
    pub t_a: f64,
    pub t_b: f64,
}

/// `Δ g_s` split into the pieces used by the pointwise estimates.
///
/// With `w = 1−|z|²` and `F = φ(sz)`: `A1 = F Δw^{p+1}`, `A2 = w^{p+1} ΔF`,
/// `A3 = 8 Re(∂w^{p+1} ∂̄F)`. Suffix `_c` uses `F = φ_C(sz)`, suffix `_a`
/// uses `F = φ_A(sz)`, and `A2_a = a21 + a22 + a23` splits `Δ(ηψ^q)`.
#[derive(Clone, Copy, Debug)]
pub struct GsTerms {
    pub g: Jet,
    pub phi: Jet,
    pub phi_a: Jet,
    pub phi_c: Jet,
    pub w_p1: Jet,
    pub a1_c: f64,
    pub a2_c: f64,
    pub a3_c: f64,
    pub a1_a: f64,
    pub a2_a: f64,
    pub a3_a: f64,
    pub a21: f64,
    pub a22: f64,
    pub a23: f64,
    pub cone: Option<(usize, ConePieces)>,
}

impl GsTerms {
    pub fn laplacian(&self) -> f64 {
        self.g.laplacian()
    }

    /// `Δ g_{C,s}`.
    pub fn laplacian_c(&self) -> f64 {
        self.a1_c + self.a2_c + self.a3_c
    }

    /// `Δ g_{A,s}`.
    pub fn laplacian_a(&self) -> f64 {
        self.a1_a + self.a2_a + self.a3_a
    }
}

/// The weight for a fixed `E` and parameters.
#[derive(Clone, Debug)]
pub struct Weight<'a> {
    pub e: &'a ArcSet,
    pub params: WeightParams,
}

impl<'a> Weight<'a> {
    pub fn new(e: &'a ArcSet, params: WeightParams) -> Self {
        Weight { e, params }
    }

    fn gap(&self, j: usize) -> Result<&Gap> {
        self.e
            .gaps()
            .get(j)
            .ok_or_else(|| NevError::Domain(format!("no gap with index {j}")))
    }

    fn in_closed_cone(g: &Gap, z: Complex64) -> bool {
        z.norm() == 0.0 || g.offset(z.arg()) <= g.len
    }

    /// `ψ_j(z)`; `z` must lie in the closed cone over gap `j`.
    pub fn psi(&self, j: usize, z: Complex64) -> Result<f64> {
        let g = self.gap(j)?;
        if !Self::in_closed_cone(g, z) {
            return Err(NevError::Domain(format!("z = {z} is outside cone {j}")));
        }
        let d = g.delta();
        Ok((z - g.a()).norm_sqr() * (z - g.b()).norm_sqr() / (d * d))
    }

    /// `η_j(z)`; the limit value 1 is returned on the circle.
    pub fn eta(&self, j: usize, z: Complex64) -> Result<f64> {
        let g = self.gap(j)?;
        let r2 = z.norm_sqr();
        if r2 > 1.0 {
            return Err(NevError::Domain(format!("|z| = {} > 1", r2.sqrt())));
        }
        if r2 == 1.0 {
            return Ok(1.0);
        }
        let w = 1.0 - r2;
        let c = self.params.cutoff();
        let ta = (z - g.a()).norm_sqr() / (w * w);
        let tb = (z - g.b()).norm_sqr() / (w * w);
        Ok(c.eval(ta).0 * c.eval(tb).0)
    }

    /// `φ(z)` on the closed disc, value only. On the circle this is the
    /// continuous extension `ψ_j^q` over gaps and `0` on `E`.
    pub fn phi_value(&self, z: Complex64) -> f64 {
        let (a, c) = self.phi_parts(z);
        a + c
    }

    /// `(φ_A(z), φ_C(z))`.
    pub fn phi_parts(&self, z: Complex64) -> (f64, f64) {
        let q = self.params.q();
        let r2 = z.norm_sqr();
        let w = (1.0 - r2).max(0.0);
        let phi_c = w.powf(self.params.r);
        let j = match self.e.gap_index(z.arg()) {
            Some(j) if r2 > 0.0 => j,
            _ => return (0.0, phi_c),
        };
        let g = &self.e.gaps()[j];
        let ua = (z - g.a()).norm_sqr();
        let ub = (z - g.b()).norm_sqr();
        let eta = if w == 0.0 {
            1.0
        } else {
            let c = self.params.cutoff();
            let w2 = w * w;
            let ta = ua / w2;
            if ta <= c.lo {
                return (0.0, phi_c);
            }
            let tb = ub / w2;
            if tb <= c.lo {
                return (0.0, phi_c);
            }
            c.eval(ta).0 * c.eval(tb).0
        };
        let d = g.delta();
        let psi = ua * ub / (d * d);
        (eta * psi.powf(q), phi_c)
    }

    /// Angles on the circle `|ζ| = ρ` where a cutoff argument
    /// `|ζ − e|²/(1−ρ²)²` crosses `cutoff_lo` or `cutoff_hi`, for the
    /// endpoints `e` of every gap, restricted to the gap's own cone.
    pub fn cutoff_ring_angles(&self, rho: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if !(rho > 0.0 && rho < 1.0) {
            return out;
        }
        let w2 = (1.0 - rho * rho).powi(2);
        for g in self.e.gaps() {
            for t in [self.params.cutoff_lo, self.params.cutoff_hi] {
                // |ρe^{iθ} − e^{iα}|² = 1 + ρ² − 2ρ cos(θ − α)
                let c = (1.0 + rho * rho - t * w2) / (2.0 * rho);
                if !(c.abs() < 1.0) {
                    continue;
                }
                let d = c.acos();
                for th in [g.start + d, g.start - d, g.beta() + d, g.beta() - d] {
                    if g.contains(th) {
                        out.push(th.rem_euclid(std::f64::consts::TAU));
                    }
                }
            }
        }
        out
    }

    /// Radii `|ζ|` where a cutoff level set first meets the circle `|ζ| = ρ`,
    /// opposite its endpoint, if that direction lies in a gap.
    pub fn cutoff_tangent_radii(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for g in self.e.gaps() {
            for t in [self.params.cutoff_lo, self.params.cutoff_hi] {
                let rho = 1.0 - 1.0 / t.sqrt();
                if rho > 0.0 && [g.start, g.beta()].iter().any(|&e| g.contains(e + std::f64::consts::PI)) {
                    out.push(rho);
                }
            }
        }
        out
    }

    /// Cone pieces at `ζ = sz` for gap `j`, as jets in `z`.
    pub fn cone_pieces(&self, j: usize, s: f64, z: Complex64) -> ConePieces {
        let g = &self.e.gaps()[j];
        let q = self.params.q();
        let c = self.params.cutoff();
        let (a, b) = (g.a(), g.b());
        let da = Jet::sq_dist(z, s, a);
        let db = Jet::sq_dist(z, s, b);
        let w = Jet::one_minus_sq(z, s);
        let winv2 = w.powf(-2.0);
        let ta = da * winv2;
        let tb = db * winv2;
        let (ca, ca1, ca2) = c.eval(ta.v);
        let (cb, cb1, cb2) = c.eval(tb.v);
        let chi_a = ta.chain(ca, ca1, ca2);
        let chi_b = tb.chain(cb, cb1, cb2);
        let eta = chi_a * chi_b;
        let psi_q = psi_power_jet(s * z, a, b, g.delta(), q, s);
        ConePieces { chi_a, chi_b, eta, psi_q, t_a: ta.v, t_b: tb.v }
    }

    /// `φ` with derivatives at `z`, `|z| < 1`.
    pub fn phi(&self, z: Complex64) -> Result<WeightValue> {
        if z.norm_sqr() >= 1.0 {
            return Err(NevError::Domain(format!("|z| = {} ≥ 1", z.norm())));
        }
        let (phi_a, phi_c, gap) = self.phi_jets(1.0, z);
        let phi = phi_a + phi_c;
        Ok(WeightValue {
            phi: phi.v,
            grad: phi.dbar,
            laplacian: phi.laplacian(),
            phi_a: phi_a.v,
            phi_c: phi_c.v,
            gap: gap.map(|g| g.0),
        })
    }

    fn phi_jets(&self, s: f64, z: Complex64) -> (Jet, Jet, Option<(usize, ConePieces)>) {
        let phi_c = Jet::one_minus_sq(z, s).powf(self.params.r);
        let zeta = s * z;
        let j = match self.e.gap_index(zeta.arg()) {
            Some(j) if zeta.norm_sqr() > 0.0 => j,
            _ => return (Jet::ZERO, phi_c, None),
        };
        let pieces = self.cone_pieces(j, s, z);
        let phi_a = pieces.eta * pieces.psi_q;
        (phi_a, phi_c, Some((j, pieces)))
    }

    /// `g_s(z)` with all derivative pieces; needs `|z| < 1`, `0 < s ≤ 1`.
    pub fn g_s(&self, s: f64, z: Complex64) -> GsTerms {
        let p = self.params.p;
        let w_p1 = Jet::one_minus_sq(z, 1.0).powf(p + 1.0);
        let (phi_a, phi_c, cone) = self.phi_jets(s, z);
        let phi = phi_a + phi_c;
        let lw = w_p1.laplacian();
        let a1_c = phi_c.v * lw;
        let a2_c = w_p1.v * phi_c.laplacian();
        let a3_c = cross_term(&w_p1, &phi_c);
        let a1_a = phi_a.v * lw;
        let a2_a = w_p1.v * phi_a.laplacian();
        let a3_a = cross_term(&w_p1, &phi_a);
        let (a21, a22, a23) = match &cone {
            Some((_, pc)) => (
                w_p1.v * pc.eta.v * pc.psi_q.laplacian(),
                w_p1.v * pc.psi_q.v * pc.eta.laplacian(),
                w_p1.v * cross_term(&pc.eta, &pc.psi_q),
            ),
            None => (0.0, 0.0, 0.0),
        };
        GsTerms {
            g: w_p1 * phi,
            phi,
            phi_a,
            phi_c,
            w_p1,
            a1_c,
            a2_c,
            a3_c,
            a1_a,
            a2_a,
            a3_a,
            a21,
            a22,
            a23,
            cone,
        }
    }

    /// Outward normal derivative of `g_s` at `e^{iθ}`: `−2φ(se^{iθ})` when
    /// `p = 0`, otherwise `0`.
    pub fn g_s_normal_derivative(&self, s: f64, theta: f64) -> f64 {
        if self.params.p == 0.0 {
            -2.0 * self.phi_value(Complex64::from_polar(s, theta))
        } else {
            0.0
        }
    }
}

/// Jet of `ψ^q(ζ)`, `ζ = sz`, from the closed forms
/// `∂̄ψ^q = q[(ζ−a)|ζ−a|^{2q−2}|ζ−b|^{2q} + (ζ−b)|ζ−a|^{2q}|ζ−b|^{2q−2}]/δ^{2q}` and
/// `∂∂̄ψ^q = q²|ζ−a|^{2q−2}|ζ−b|^{2q−2}|(ζ−a)+(ζ−b)|²/δ^{2q}`.
pub fn psi_power_jet(zeta: Complex64, a: Complex64, b: Complex64, delta: f64, q: f64, s: f64) -> Jet {
    let u = zeta - a;
    let v = zeta - b;
    let ua = u.norm_sqr();
    let vb = v.norm_sqr();
    let d2q = delta.powf(2.0 * q);
    let ua_q = ua.powf(q);
    let vb_q = vb.powf(q);
    let ua_q1 = ua.powf(q - 1.0);
    let vb_q1 = vb.powf(q - 1.0);
    let value = ua_q * vb_q / d2q;
    let dbar = q * (u * (ua_q1 * vb_q) + v * (ua_q * vb_q1)) / d2q;
    let ddbar = q * q * ua_q1 * vb_q1 * (u + v).norm_sqr() / d2q;
    Jet { v: value, dbar: s * dbar, ddbar: s * s * ddbar }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn quarter() -> ArcSet {
        ArcSet::new(&[(0.0, FRAC_PI_2)]).unwrap()
    }

    #[test]
    fn cutoff_values_and_constants() {
        assert_eq!(chi(1.9), 0.0);
        assert_eq!(chi(3.5), 1.0);
        assert_relative_eq!(chi(2.5), 0.5, epsilon = 1e-15);
        let mut m1: f64 = 0.0;
        let mut m2: f64 = 0.0;
        let mut prev = 0.0;
        for k in 0..=200_000 {
            let t = 2.0 + k as f64 / 200_000.0;
            let (c, d1, d2) = Cutoff::STANDARD.eval(t);
            assert!(c >= prev);
            prev = c;
            m1 = m1.max(d1.abs());
            m2 = m2.max(d2.abs());
        }
        assert!(m1 <= CHI_D1_MAX && m1 > 0.999 * CHI_D1_MAX);
        assert!(m2 <= CHI_D2_MAX && m2 > 0.999 * CHI_D2_MAX, "{m2}");
    }

    #[test]
    fn cutoff_derivatives_match_differences() {
        let h = 1e-6;
        for &t in &[2.1, 2.3, 2.5, 2.77, 2.95] {
            let (_, d1, d2) = Cutoff::STANDARD.eval(t);
            let fd1 = (chi(t + h) - chi(t - h)) / (2.0 * h);
            let (_, a, _) = Cutoff::STANDARD.eval(t + h);
            let (_, b, _) = Cutoff::STANDARD.eval(t - h);
            assert_relative_eq!(d1, fd1, epsilon = 1e-7);
            assert_relative_eq!(d2, (a - b) / (2.0 * h), epsilon = 1e-6);
        }
    }

    #[test]
    fn psi_examples() {
        let e = quarter();
        let w = Weight::new(&e, WeightParams::with_q(1.0, 1.0).unwrap());
        let z = Complex64::from_polar(0.5, FRAC_PI_4);
        let expect = 0.542_893_218_8_f64.powi(2) / FRAC_PI_4.powi(2);
        assert_relative_eq!(w.psi(0, z).unwrap(), expect, epsilon = 1e-9);
        assert_relative_eq!(w.psi(0, z).unwrap(), 0.47780, epsilon = 1e-5);
        assert_eq!(w.psi(0, Complex64::new(1.0, 0.0)).unwrap(), 0.0);
        let mid = Complex64::from_polar(1.0, FRAC_PI_4);
        let expect_mid = (2.0 - 2f64.sqrt()).powi(2) / FRAC_PI_4.powi(2);
        assert_relative_eq!(w.psi(0, mid).unwrap(), expect_mid, epsilon = 1e-12);
        assert_relative_eq!(w.psi(0, mid).unwrap(), 0.556287, epsilon = 1e-6);
        assert!(w.psi(0, Complex64::from_polar(0.5, 3.0)).is_err());
    }

    #[test]
    fn cutoff_rings_sit_on_the_thresholds() {
        let e = ArcSet::closed_arc(0.0, 2.0).unwrap();
        let w = Weight::new(&e, WeightParams::with_q(1.0, 1.0).unwrap());
        let g = e.gaps()[0];
        let t_at = |z: Complex64| {
            let w2 = (1.0 - z.norm_sqr()).powi(2);
            [(z - g.a()).norm_sqr() / w2, (z - g.b()).norm_sqr() / w2]
        };
        let mut seen = 0;
        for rho in [0.2, 0.45, 0.7, 0.9, 0.99] {
            for th in w.cutoff_ring_angles(rho) {
                assert!(g.contains(th));
                let t = t_at(Complex64::from_polar(rho, th));
                let hit = t.iter().any(|&x| (x - 2.0).abs() < 1e-9 || (x - 3.0).abs() < 1e-9);
                assert!(hit, "rho {rho} theta {th}: {t:?}");
                seen += 1;
            }
        }
        assert!(seen >= 8);
        // The gap (2, 2π) contains the direction π opposite the endpoint 1.
        let radii = w.cutoff_tangent_radii();
        assert_eq!(radii.len(), 2);
        for (rho, t) in radii.iter().zip([2.0, 3.0]) {
            let z = Complex64::from_polar(*rho, std::f64::consts::PI);
            assert_relative_eq!(t_at(z)[1], t, epsilon = 1e-12);
        }
        assert!(w.cutoff_ring_angles(0.1).is_empty());
    }

    #[test]
    fn eta_and_phi_examples() {
        let e = quarter();
        let w = Weight::new(&e, WeightParams::with_q(1.0, 1.0).unwrap());
        assert_eq!(w.eta(0, Complex64::from_polar(0.1, FRAC_PI_4)).unwrap(), 0.0);
        assert_eq!(w.eta(0, Complex64::from_polar(0.99, FRAC_PI_4)).unwrap(), 1.0);
        assert_eq!(w.eta(0, Complex64::from_polar(1.0, FRAC_PI_4)).unwrap(), 1.0);
        assert!(w.eta(0, Complex64::new(1.5, 0.0)).is_err());
        let v = w.phi(Complex64::from_polar(0.1, FRAC_PI_4)).unwrap();
        assert_relative_eq!(v.phi, 0.9801, epsilon = 1e-14);
        assert_eq!(v.phi_a, 0.0);
        let on_e = w.phi(Complex64::from_polar(0.7, 3.0)).unwrap();
        assert_eq!(on_e.gap, None);
        assert_relative_eq!(on_e.phi, (1.0f64 - 0.49).powi(2), epsilon = 1e-15);
    }

    #[test]
    fn phi_is_continuous_across_cone_edges() {
        let e = ArcSet::points(&[0.0, 1.0, 2.5]).unwrap();
        let w = Weight::new(&e, WeightParams::with_q(1.0, 1.5).unwrap());
        for &r in &[0.3, 0.8, 0.97, 0.999] {
            for &t in &[0.0, 1.0, 2.5] {
                let lo = w.phi_value(Complex64::from_polar(r, t - 1e-10));
                let hi = w.phi_value(Complex64::from_polar(r, t + 1e-10));
                assert!((lo - hi).abs() < 1e-8, "{r} {t}: {lo} {hi}");
            }
        }
    }

    #[test]
    fn closed_form_psi_matches_jet_arithmetic() {
        let e = ArcSet::new(&[(0.4, 2.9)]).unwrap();
        let g = e.gaps()[0];
        for &q in &[0.25, 0.5, 1.0, 2.0] {
            for &(r, t, s) in &[(0.5, 1.0, 1.0), (0.9, 2.0, 0.7), (0.95, 0.6, 0.9)] {
                let z = Complex64::from_polar(r, t);
                let closed = psi_power_jet(s * z, g.a(), g.b(), g.delta(), q, s);
                let d = g.delta();
                let psi = (Jet::sq_dist(z, s, g.a()) * Jet::sq_dist(z, s, g.b())).scale(1.0 / (d * d));
                let via = psi.powf(q);
                assert_relative_eq!(closed.v, via.v, max_relative = 1e-12);
                assert_relative_eq!(closed.dbar.re, via.dbar.re, max_relative = 1e-10, epsilon = 1e-14);
                assert_relative_eq!(closed.dbar.im, via.dbar.im, max_relative = 1e-10, epsilon = 1e-14);
                assert_relative_eq!(closed.ddbar, via.ddbar, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn g_s_vanishes_on_the_circle_and_normal_derivative() {
        let e = ArcSet::single_point(0.0);
        for &p in &[0.0, 0.5, 1.0] {
            let w = Weight::new(&e, WeightParams::with_q(p, 1.0).unwrap());
            for k in 0..16 {
                let t = 0.3 + k as f64 * 0.39;
                let z = Complex64::from_polar(1.0 - 1e-13, t);
                assert!(w.g_s(0.9, z).g.v.abs() < 1e-12);
                // One-sided radial difference against the closed form.
                let h = 1e-6;
                let inner = w.g_s(0.9, Complex64::from_polar(1.0 - h, t)).g.v;
                let fd = (0.0 - inner) / h;
                let exact = w.g_s_normal_derivative(0.9, t);
                if p == 0.0 {
                    assert_relative_eq!(fd, exact, max_relative = 1e-4);
                } else {
                    assert_eq!(exact, 0.0);
                    assert!(fd.abs() < 1e-2);
                }
            }
        }
    }

    #[test]
    fn a_terms_add_up() {
        let e = ArcSet::points(&[0.0, 2.0]).unwrap();
        let w = Weight::new(&e, WeightParams::with_q(0.5, 1.0).unwrap());
        for &(r, t) in &[(0.9, 0.3), (0.97, 1.0), (0.5, 4.0), (0.99, 1.9)] {
            let g = w.g_s(0.95, Complex64::from_polar(r, t));
            let total = g.laplacian_a() + g.laplacian_c();
            assert_relative_eq!(total, g.laplacian(), max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(g.a2_a, g.a21 + g.a22 + g.a23, max_relative = 1e-10, epsilon = 1e-12);
        }
    }
}
