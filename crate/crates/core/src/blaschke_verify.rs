//! Weighted zero sums and the Blaschke-type theorems they satisfy.
//!
//! Every theorem asserts `LHS ≤ c·RHS` for an unknown constant `c`, so a
//! check can only report `LHS/RHS` and how much it moves under refinement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary_set::ArcSet;
use crate::error::{NevError, Result};
use crate::function_zoo::{check_growth_envelope, envelope_grid, AnalyticTestFunction, GrowthEnvelope};
use crate::quadrature::{
    nevanlinna_norm_p0, nevanlinna_norm_p_pos, CircleGrid, DiskGrid, NormCurve, NormWeight, SGrid,
};
use crate::report::Status;
use crate::weight::bounds::MAX_DRIFT;
use crate::weight::{Weight, WeightParams};

/// Registered theorems with the bound each one asserts.
pub const THEOREMS: &[(&str, &str)] = &[
    ("eP1", "Σ(1−|a|²)^{1+p} φ(a) ≤ c(φ)·‖f‖_{N_{φ,p}}, p > 0"),
    ("eP2", "Σ(1−|a|²)^{1+p} d(a,E)^{2q} ≤ c·‖f‖_{N_{d^{2q},p}}, p > 0"),
    ("0_NI0", "Σ(1−|a|²) d(a,E)^{2q} ≤ c(E,q)·‖f‖_{N_{d^{2q},0}}"),
    ("L∞-p>0", "log⁺|f| ≤ K(1−|z|²)^{−p}d^{−q} ⇒ Σ(1−|a|²)^{1+p} d(a,E)^{(q−α(E)+ε)₊} ≤ c(p,q,ε)K"),
    ("L∞-p=0", "log⁺|f| ≤ K d^{−q} ⇒ Σ(1−|a|²) d(a,E)^{(q−α(E)+ε)₊} ≤ c(q,ε)K"),
];

/// Accepts the ASCII spellings of the `L∞` ids.
pub fn canonical_theorem_id(id: &str) -> Option<&'static str> {
    let id = match id {
        "Linf-p>0" => "L∞-p>0",
        "Linf-p=0" => "L∞-p=0",
        other => other,
    };
    THEOREMS.iter().map(|t| t.0).find(|t| *t == id)
}

/// Weight attached to each zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SumWeight {
    Phi,
    DistPower { exponent: f64 },
}

fn zero_weight(w: &Weight, e: &ArcSet, variant: SumWeight, a: Complex64) -> f64 {
    match variant {
        SumWeight::Phi => w.phi_value(a),
        SumWeight::DistPower { exponent } => {
            if exponent == 0.0 {
                1.0
            } else {
                e.distance_unchecked(a).powf(exponent)
            }
        }
    }
}

fn check_zeros(zeros: &[Complex64]) -> Result<()> {
    match zeros.iter().find(|a| !(a.norm() < 1.0)) {
        Some(a) => Err(NevError::Domain(format!("zero {a} not in the open disc"))),
        None => Ok(()),
    }
}

/// `Σ_a (1−|a|²)^{1+p} w(a)` with `w = φ` or `d(·,E)^exponent`.
pub fn blaschke_sum(zeros: &[Complex64], e: &ArcSet, params: &WeightParams, variant: SumWeight) -> Result<f64> {
    check_zeros(zeros)?;
    let w = Weight::new(e, *params);
    Ok(zeros
        .iter()
        .map(|&a| (1.0 - a.norm_sqr()).powf(1.0 + params.p) * zero_weight(&w, e, variant, a))
        .fold(0.0, |acc, t| acc + t))
}

/// `S(r_k)` at the sorted zero moduli `r_k`.
pub fn partial_sums(
    zeros: &[Complex64],
    e: &ArcSet,
    params: &WeightParams,
    variant: SumWeight,
) -> Result<Vec<(f64, f64)>> {
    check_zeros(zeros)?;
    let w = Weight::new(e, *params);
    let mut terms: Vec<(f64, f64)> = zeros
        .iter()
        .map(|&a| (a.norm(), (1.0 - a.norm_sqr()).powf(1.0 + params.p) * zero_weight(&w, e, variant, a)))
        .collect();
    terms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut acc = 0.0;
    Ok(terms
        .into_iter()
        .map(|(r, t)| {
            acc += t;
            (r, acc)
        })
        .collect())
}

/// Majorant of `∫_D (1−|z|²)^{ε−1} d(z,E)^{−α} dm` over dyadic cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicBound {
    /// Contribution of each shell `1−|z| ∈ [2^{−n−1}, 2^{−n}]`.
    pub levels: Vec<f64>,
    pub partial: f64,
    /// Geometric extrapolation of the shells beyond `n_max`.
    pub tail: f64,
    pub majorant: f64,
    /// `K · majorant`.
    pub bound: f64,
    pub diverging: bool,
}

/// Bounds each shell by its worst radial factor and splits its angles into
/// bands `2^{−m−1} ≤ d(e^{it},E) < 2^{−m}`, using
/// `d(ρe^{it},E)² ≥ (1−ρ)² + ρ d(e^{it},E)²` on each band.
pub fn dyadic_rhs_bound(e: &ArcSet, alpha: f64, eps: f64, k: f64, n_max: u32) -> Result<DyadicBound> {
    if !(alpha >= 0.0 && alpha.is_finite() && k >= 0.0 && eps.is_finite()) {
        return Err(NevError::InvalidInput("need α ≥ 0, K ≥ 0 and finite ε".into()));
    }
    let mut levels = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let (r_in, r_out) = if n == 0 {
            (0.0, 0.5)
        } else {
            (1.0 - 0.5f64.powi(n as i32), 1.0 - 0.5f64.powi(n as i32 + 1))
        };
        let radial = (1.0 - r_in * r_in).powf(eps - 1.0).max((1.0 - r_out * r_out).powf(eps - 1.0));
        let area = 0.5 * (r_out * r_out - r_in * r_in);
        let gap = 1.0 - r_out;
        let mut angular = 0.0;
        // Bands m = −1 ..= n, then the near band d < 2^{−n−1}.
        let mut hi = 2.0f64;
        for m in -1..=(n as i32) {
            let lo = 0.5f64.powi(m + 1);
            let meas = e.neighborhood_measure(hi) - e.neighborhood_measure(lo);
            if meas > 0.0 {
                let d = (gap * gap + r_in * lo * lo).sqrt();
                angular += meas * d.powf(-alpha);
            }
            hi = lo;
        }
        let near = if hi > 0.0 { e.neighborhood_measure(hi) } else { 0.0 };
        if near > 0.0 {
            angular += near * gap.powf(-alpha);
        }
        levels.push(radial * area * angular);
    }
    let partial: f64 = levels.iter().sum();
    let ratio = match levels.len() {
        0 | 1 => f64::NAN,
        l => levels[l - 1] / levels[l - 2],
    };
    let diverging = eps <= 0.0 || !(ratio < 1.0);
    let (tail, majorant) = if diverging {
        (f64::INFINITY, f64::INFINITY)
    } else {
        let t = levels[levels.len() - 1] * ratio / (1.0 - ratio);
        (t, partial + t)
    };
    Ok(DyadicBound { levels, partial, tail, majorant, bound: k * majorant, diverging })
}

/// Inputs of one theorem check.
#[derive(Clone, Debug)]
pub struct TheoremInput<'a> {
    pub f: &'a AnalyticTestFunction,
    pub e: &'a ArcSet,
    /// `p` and the exponent of `φ`.
    pub params: WeightParams,
    pub eps: f64,
    /// Growth envelope for the `L∞` theorems; the function's own one if `None`.
    pub envelope: Option<GrowthEnvelope>,
    /// Known exact `α(E)`; the estimate is always computed as well.
    pub alpha: Option<f64>,
    pub alpha_window: (i32, i32),
    pub s_grid: SGrid,
    pub grid: DiskGrid,
    pub circle: CircleGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub lhs: f64,
    /// The norm, or `K` for the `L∞` theorems.
    pub rhs: f64,
    pub constant: f64,
    /// Relative change of the norm-based constant under one refinement of
    /// the grid and the `s` window.
    pub drift: f64,
    pub converged: bool,
    pub partial_sums_nondecreasing: bool,
    pub details: Vec<(String, f64)>,
    pub status: Status,
}

impl TheoremReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str = "theorem_id,lhs,rhs,constant,drift,status";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.12e},{:.12e},{:.12e},{:.6e},{}",
            self.theorem_id, self.lhs, self.rhs, self.constant, self.drift, self.status
        )
    }
}

fn ratio(l: f64, r: f64) -> f64 {
    if l == 0.0 {
        0.0
    } else if r > 0.0 {
        l / r
    } else {
        f64::INFINITY
    }
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if b.is_finite() && b != 0.0 {
        ((a - b) / b).abs()
    } else {
        f64::INFINITY
    }
}

/// Norm of `f` for the sum weight at `(grid, s_grid)`.
fn norm(inp: &TheoremInput, variant: SumWeight, grid: &DiskGrid, s_grid: &SGrid, circle: &CircleGrid) -> Result<NormCurve> {
    let p = inp.params.p;
    if p > 0.0 {
        let weight = match variant {
            SumWeight::Phi => NormWeight::Phi,
            SumWeight::DistPower { exponent } => NormWeight::DistPower { exponent },
        };
        nevanlinna_norm_p_pos(inp.f, inp.e, &inp.params, weight, s_grid, grid)
    } else {
        let q = match variant {
            SumWeight::DistPower { exponent } => exponent,
            SumWeight::Phi => inp.params.r,
        };
        nevanlinna_norm_p0(inp.f, inp.e, q, s_grid, grid, circle)
    }
}

struct NormPair {
    coarse: NormCurve,
    fine: NormCurve,
}

fn norm_pair(inp: &TheoremInput, variant: SumWeight) -> Result<NormPair> {
    let coarse = norm(inp, variant, &inp.grid, &inp.s_grid, &inp.circle)?;
    let fine_circle = CircleGrid { n_theta: 2 * inp.circle.n_theta };
    let fine = norm(inp, variant, &inp.grid.doubled(), &inp.s_grid.refined(), &fine_circle)?;
    Ok(NormPair { coarse, fine })
}

/// Runs one registered theorem on `inp`.
pub fn verify_theorem(id: &str, inp: &TheoremInput) -> Result<TheoremReport> {
    let id = canonical_theorem_id(id).ok_or_else(|| NevError::UnknownId(id.to_string()))?;
    inp.params.validate()?;
    inp.grid.validate()?;
    inp.s_grid.validate()?;
    let log0 = inp.f.log_abs(Complex64::new(0.0, 0.0));
    if !(log0.abs() < 1e-12) {
        return Err(NevError::Rejected(format!("{id} needs |f(0)| = 1, got log|f(0)| = {log0}")));
    }
    let p = inp.params.p;
    let zeros = inp.f.zeros_all();
    let mut details = Vec::new();
    let (variant, k) = match id {
        "eP1" => {
            require(p > 0.0, id, "p > 0")?;
            (SumWeight::Phi, None)
        }
        "eP2" => {
            require(p > 0.0, id, "p > 0")?;
            (SumWeight::DistPower { exponent: inp.params.r }, None)
        }
        "0_NI0" => {
            require(p == 0.0, id, "p = 0")?;
            (SumWeight::DistPower { exponent: inp.params.r }, None)
        }
        _ => {
            let p_pos = id == "L∞-p>0";
            require(if p_pos { p > 0.0 } else { p == 0.0 }, id, if p_pos { "p > 0" } else { "p = 0" })?;
            require(inp.eps > 0.0, id, "ε > 0")?;
            let env = match &inp.envelope {
                Some(env) => env.clone(),
                None => inp
                    .f
                    .natural_envelope(inp.e)
                    .ok_or_else(|| NevError::Rejected(format!("{id}: no growth envelope for this function and E")))?,
            };
            if env.e != *inp.e {
                return Err(NevError::Rejected(format!("{id}: envelope is for a different E")));
            }
            if env.p > p {
                return Err(NevError::Rejected(format!("{id}: envelope exponent p = {} exceeds {p}", env.p)));
            }
            let check = check_growth_envelope(inp.f, &env, &envelope_grid(96, 512))?;
            details.push(("envelope_worst_ratio".to_string(), check.worst_ratio));
            if !check.holds {
                return Err(NevError::Rejected(format!(
                    "{id}: growth envelope fails (worst ratio {:.4} at {:?})",
                    check.worst_ratio, check.worst_node
                )));
            }
            let hat = inp.e.estimate_alpha(inp.alpha_window.0, inp.alpha_window.1)?.alpha_hat;
            let alpha = inp.alpha.unwrap_or(hat);
            details.push(("alpha".to_string(), alpha));
            details.push(("alpha_hat".to_string(), hat));
            let gamma = (env.q - alpha + inp.eps).max(0.0);
            let gamma_hat = (env.q - hat + inp.eps).max(0.0);
            details.push(("exponent".to_string(), gamma));
            let lhs_hat = blaschke_sum(&zeros, inp.e, &inp.params, SumWeight::DistPower { exponent: gamma_hat })?;
            details.push(("lhs_with_alpha_hat".to_string(), lhs_hat));
            details.push(("K".to_string(), env.k));
            let dy = dyadic_rhs_bound(inp.e, alpha, inp.eps, env.k, 12)?;
            details.push(("dyadic_bound".to_string(), dy.bound));
            (SumWeight::DistPower { exponent: gamma }, Some(env.k))
        }
    };
    let lhs = blaschke_sum(&zeros, inp.e, &inp.params, variant)?;
    let sums = partial_sums(&zeros, inp.e, &inp.params, variant)?;
    let nondecreasing = sums.windows(2).all(|w| w[1].1 >= w[0].1);
    // A zero exponent in the p = 0 norm leaves nothing to integrate against.
    let skip_norm = p == 0.0 && matches!(variant, SumWeight::DistPower { exponent } if exponent <= 0.0);
    let (norm_c, norm_f, converged) = if skip_norm {
        (f64::NAN, f64::NAN, true)
    } else {
        let np = norm_pair(inp, variant)?;
        let conv = np.coarse.converged && np.fine.converged && !np.fine.diverging;
        (np.coarse.windowed_sup, np.fine.windowed_sup, conv)
    };
    details.push(("norm".to_string(), norm_f));
    details.push(("norm_coarse".to_string(), norm_c));
    let (c_coarse, c_fine) = (ratio(lhs, norm_c), ratio(lhs, norm_f));
    let drift = if skip_norm { 0.0 } else { rel_change(c_coarse, c_fine) };
    let (rhs, constant) = match k {
        Some(k) => {
            details.push(("norm_constant".to_string(), c_fine));
            (k, ratio(lhs, k))
        }
        None => (norm_f, c_fine),
    };
    let status = if lhs.is_finite() && nondecreasing && converged && constant.is_finite() && drift < MAX_DRIFT {
        Status::Pass
    } else {
        Status::Inconclusive
    };
    Ok(TheoremReport {
        theorem_id: id.to_string(),
        lhs,
        rhs,
        constant,
        drift,
        converged,
        partial_sums_nondecreasing: nondecreasing,
        details,
        status,
    })
}

fn require(cond: bool, id: &str, why: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(NevError::Rejected(format!("{id} requires {why}")))
    }
}
