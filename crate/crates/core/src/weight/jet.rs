//! Second-order Wirtinger jets of real functions: value, `∂̄F` and `∂∂̄F`.
//!
//! For real `F` we have `∂F = conj(∂̄F)`, so these three numbers carry the
//! gradient (`F_x = 2 Re ∂̄F`, `F_y = 2 Im ∂̄F`) and the Laplacian
//! (`ΔF = 4 ∂∂̄F`), and they compose by the usual product and chain rules.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    /// `∂̄F`.
    pub dbar: Complex64,
    /// `∂∂̄F`.
    pub ddbar: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet { v: 0.0, dbar: Complex64 { re: 0.0, im: 0.0 }, ddbar: 0.0 };

    pub fn constant(v: f64) -> Self {
        Jet { v, ..Self::ZERO }
    }

    /// `|sz − c|²` as a function of `z`.
    pub fn sq_dist(z: Complex64, s: f64, c: Complex64) -> Self {
        let u = s * z - c;
        Jet { v: u.norm_sqr(), dbar: s * u, ddbar: s * s }
    }

    /// `1 − |sz|²` as a function of `z`.
    pub fn one_minus_sq(z: Complex64, s: f64) -> Self {
        let zeta = s * z;
        Jet { v: 1.0 - zeta.norm_sqr(), dbar: -s * zeta, ddbar: -s * s }
    }

    pub fn laplacian(&self) -> f64 {
        4.0 * self.ddbar
    }

    /// `(∂_x F, ∂_y F)`.
    pub fn gradient(&self) -> (f64, f64) {
        (2.0 * self.dbar.re, 2.0 * self.dbar.im)
    }

    /// `h(F)` given `h`, `h'`, `h''` at `F`.
    pub fn chain(&self, h: f64, h1: f64, h2: f64) -> Self {
        let d2 = if h2 == 0.0 { 0.0 } else { h2 * self.dbar.norm_sqr() };
        let l = if h1 == 0.0 { 0.0 } else { h1 * self.ddbar };
        Jet { v: h, dbar: h1 * self.dbar, ddbar: d2 + l }
    }

    /// `F^a` for `F > 0`.
    pub fn powf(&self, a: f64) -> Self {
        if a == 0.0 {
            return Jet::constant(1.0);
        }
        if a == 1.0 {
            return *self;
        }
        let x = self.v;
        let h = x.powf(a);
        let h1 = a * x.powf(a - 1.0);
        let c2 = a * (a - 1.0);
        let h2 = if c2 == 0.0 { 0.0 } else { c2 * x.powf(a - 2.0) };
        self.chain(h, h1, h2)
    }

    pub fn scale(&self, c: f64) -> Self {
        Jet { v: c * self.v, dbar: c * self.dbar, ddbar: c * self.ddbar }
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0.0 && self.dbar == Complex64::new(0.0, 0.0) && self.ddbar == 0.0
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, dbar: self.dbar + o.dbar, ddbar: self.ddbar + o.ddbar }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    /// `∂∂̄(GH) = H ∂∂̄G + G ∂∂̄H + 2 Re(∂G ∂̄H)`.
    fn mul(self, o: Jet) -> Jet {
        if self.is_zero() || o.is_zero() {
            return Jet::ZERO;
        }
        Jet {
            v: self.v * o.v,
            dbar: self.dbar * o.v + self.v * o.dbar,
            ddbar: self.ddbar * o.v
                + self.v * o.ddbar
                + 2.0 * (self.dbar.conj() * o.dbar).re,
        }
    }
}

/// `8 Re(∂G ∂̄H)`, the cross term of `Δ(GH)`.
pub fn cross_term(g: &Jet, h: &Jet) -> f64 {
    8.0 * (g.dbar.conj() * h.dbar).re
}
