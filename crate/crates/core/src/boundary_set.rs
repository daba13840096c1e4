//! Closed sets `E` on the unit circle, stored through their complementary
//! open arcs (the gaps of `T \ E`).
//!
//! Angles are radians. A gap is kept as `(start, len)` with `start` in
//! `[0, 2π)` and `len` in `(0, 2π]`, so a gap may run past `2π`. A one-point
//! set is a single gap of length `2π` whose two endpoints coincide.
//!
//! ```
//! use nevlab::boundary_set::ArcSet;
//! use num_complex::Complex64;
//!
//! let e = ArcSet::single_point(0.0);
//! assert!((e.distance(Complex64::new(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
//! assert!((e.neighborhood_measure(0.1) - 4.0 * (0.05f64).asin()).abs() < 1e-14);
//! ```

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NevError, Result};

/// Slack used when comparing accumulated angle sums against `2π`.
const ANGLE_TOL: f64 = 1e-12;

/// One open arc `(start, start + len)` of the complement of `E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gap {
    pub start: f64,
    pub len: f64,
}

impl Gap {
    pub fn alpha(&self) -> f64 {
        self.start
    }

    pub fn beta(&self) -> f64 {
        self.start + self.len
    }

    /// Half the arc length.
    pub fn delta(&self) -> f64 {
        0.5 * self.len
    }

    /// Endpoint `e^{iα}`.
    pub fn a(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.start)
    }

    /// Endpoint `e^{iβ}`.
    pub fn b(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.beta())
    }

    /// Counterclockwise offset of angle `t` from the start, in `[0, 2π)`.
    pub fn offset(&self, t: f64) -> f64 {
        (t - self.start).rem_euclid(TAU)
    }

    /// True when `t` lies in the open arc.
    pub fn contains(&self, t: f64) -> bool {
        let o = self.offset(t);
        o > 0.0 && o < self.len
    }

    /// Chordal distance from `e^{it}` to the nearer endpoint, for `t` inside.
    fn chord_to_ends(&self, t: f64) -> f64 {
        let o = self.offset(t);
        let m = o.min(self.len - o).max(0.0);
        2.0 * (0.5 * m).sin()
    }
}

/// The closed set `E ⊂ T`, as the sorted list of its gaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArcSetRepr", into = "ArcSetRepr")]
pub struct ArcSet {
    gaps: Vec<Gap>,
}

#[derive(Serialize, Deserialize)]
struct ArcSetRepr {
    gaps: Vec<[f64; 2]>,
}

impl TryFrom<ArcSetRepr> for ArcSet {
    type Error = NevError;
    fn try_from(r: ArcSetRepr) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = r.gaps.iter().map(|g| (g[0], g[1])).collect();
        ArcSet::new(&pairs)
    }
}

impl From<ArcSet> for ArcSetRepr {
    fn from(e: ArcSet) -> Self {
        ArcSetRepr {
            gaps: e.gaps.iter().map(|g| [g.start, g.beta()]).collect(),
        }
    }
}

impl ArcSet {
    /// Builds `E` from its gaps given as `(start, end)` angle pairs.
    ///
    /// `end - start` in `(0, 2π]` is taken literally; anything else is
    /// reduced mod `2π`. Gaps may touch but not overlap, and the total length
    /// may reach `2π` (finite sets), never exceed it.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut gaps = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if !a.is_finite() || !b.is_finite() {
                return Err(NevError::InvalidInput(format!("non-finite gap ({a}, {b})")));
            }
            let raw = b - a;
            let len = if raw > 0.0 && raw <= TAU + ANGLE_TOL {
                raw.min(TAU)
            } else {
                raw.rem_euclid(TAU)
            };
            if len <= 0.0 {
                return Err(NevError::InvalidInput(format!("gap ({a}, {b}) has zero length")));
            }
            gaps.push(Gap { start: a.rem_euclid(TAU), len });
        }
        gaps.sort_by(|x, y| x.start.total_cmp(&y.start));
        let total: f64 = gaps.iter().map(|g| g.len).sum();
        if total > TAU + ANGLE_TOL * (1.0 + gaps.len() as f64) {
            // Disjoint open arcs cannot exceed the circle, so this is an overlap.
            if gaps.len() == 1 {
                return Err(NevError::EmptySet);
            }
            return Err(NevError::InvalidInput(format!(
                "gaps overlap (total length {total} > 2π)"
            )));
        }
        for w in gaps.windows(2) {
            if w[0].beta() > w[1].start + ANGLE_TOL {
                return Err(NevError::InvalidInput(format!(
                    "gaps starting at {} and {} overlap",
                    w[0].start, w[1].start
                )));
            }
        }
        if let (Some(first), Some(last)) = (gaps.first(), gaps.last()) {
            if gaps.len() > 1 && last.beta() > first.start + TAU + ANGLE_TOL {
                return Err(NevError::InvalidInput("last gap wraps over the first".into()));
            }
        }
        Ok(ArcSet { gaps })
    }

    /// `E = T`.
    pub fn full_circle() -> Self {
        ArcSet { gaps: Vec::new() }
    }

    /// `E = {e^{iθ}}`.
    pub fn single_point(theta: f64) -> Self {
        ArcSet {
            gaps: vec![Gap { start: theta.rem_euclid(TAU), len: TAU }],
        }
    }

    /// A finite set of points, given by angles.
    pub fn points(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(NevError::InvalidInput("empty point list".into()));
        }
        let mut t: Vec<f64> = angles.iter().map(|a| a.rem_euclid(TAU)).collect();
        t.sort_by(f64::total_cmp);
        t.dedup_by(|x, y| (*x - *y).abs() < ANGLE_TOL);
        if t.len() == 1 {
            return Ok(Self::single_point(t[0]));
        }
        let mut gaps = Vec::with_capacity(t.len());
        for i in 0..t.len() {
            let next = if i + 1 < t.len() { t[i + 1] } else { t[0] + TAU };
            gaps.push(Gap { start: t[i], len: next - t[i] });
        }
        Ok(ArcSet { gaps })
    }

    /// The closed arc `[a, b]` (counterclockwise) as `E`.
    pub fn closed_arc(a: f64, b: f64) -> Result<Self> {
        let len = (b - a).rem_euclid(TAU);
        if len <= 0.0 {
            return Err(NevError::InvalidInput("closed arc must have positive length".into()));
        }
        Self::new(&[(b, a + TAU)])
    }

    /// Middle-thirds Cantor set built on the arc `[a, b]` to `depth` levels.
    pub fn cantor(a: f64, b: f64, depth: u32) -> Result<Self> {
        let mut arcs = vec![(a, b)];
        let mut pairs = Vec::new();
        for _ in 0..depth {
            let mut next = Vec::with_capacity(2 * arcs.len());
            for &(x, y) in &arcs {
                let l = (y - x) / 3.0;
                pairs.push((x + l, y - l));
                next.push((x, x + l));
                next.push((y - l, y));
            }
            arcs = next;
        }
        pairs.push((b, a + TAU));
        Self::new(&pairs)
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn is_full_circle(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Arc-length measure of `E`.
    pub fn measure(&self) -> f64 {
        (TAU - self.gaps.iter().map(|g| g.len).sum::<f64>()).max(0.0)
    }

    /// Index of the open gap containing angle `t`; `None` when `t ∈ E`.
    pub fn gap_index(&self, t: f64) -> Option<usize> {
        if self.gaps.is_empty() {
            return None;
        }
        let t = t.rem_euclid(TAU);
        let k = self.gaps.partition_point(|g| g.start <= t);
        // Candidates: the last gap starting at or before t, and the last gap
        // overall (it may wrap past 2π).
        if k > 0 && self.gaps[k - 1].contains(t) {
            return Some(k - 1);
        }
        let last = self.gaps.len() - 1;
        if self.gaps[last].contains(t) {
            return Some(last);
        }
        None
    }

    /// Chordal distance from `e^{it}` to `E`.
    pub fn circle_distance(&self, t: f64) -> f64 {
        match self.gap_index(t) {
            Some(j) => self.gaps[j].chord_to_ends(t),
            None => 0.0,
        }
    }

    /// Euclidean distance from `z` (with `|z| ≤ 1`) to `E`.
    ///
    /// Uses `|ρe^{it} − e^{is}|² = (1−ρ)² + ρ|e^{it} − e^{is}|²`, so the
    /// nearest point of `E` is the angularly nearest one.
    pub fn distance(&self, z: Complex64) -> Result<f64> {
        let rho = z.norm();
        if rho > 1.0 + 1e-12 {
            return Err(NevError::Domain(format!("|z| = {rho} > 1")));
        }
        Ok(self.distance_unchecked(z))
    }

    /// [`ArcSet::distance`] without the domain check.
    pub fn distance_unchecked(&self, z: Complex64) -> f64 {
        let rho = z.norm();
        if rho == 0.0 {
            return 1.0;
        }
        let dt = self.circle_distance(z.arg());
        let one = 1.0 - rho;
        (one * one + rho * dt * dt).sqrt()
    }

    /// Measure of `{t : d(e^{it}, E) < x}`.
    pub fn neighborhood_measure(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.measure();
        }
        let r = 2.0 * (0.5 * x.min(2.0)).asin();
        let uncovered: f64 = self.gaps.iter().map(|g| (g.len - 2.0 * r).max(0.0)).sum();
        (TAU - uncovered).clamp(0.0, TAU)
    }

    /// Closed arcs `(start, len)` making up `{t : d(e^{it}, E) ≥ x}`.
    pub fn far_set(&self, x: f64) -> Vec<(f64, f64)> {
        if x > 2.0 {
            return Vec::new();
        }
        let r = 2.0 * (0.5 * x).asin();
        self.gaps
            .iter()
            .filter(|g| g.len >= 2.0 * r && x > 0.0)
            .map(|g| ((g.start + r).rem_euclid(TAU), g.len - 2.0 * r))
            .collect()
    }

    /// Least-squares estimate of the Ahern–Clark type from the ladder
    /// `x = 2^{-n}`, `n_min ≤ n ≤ n_max`.
    pub fn estimate_alpha(&self, n_min: i32, n_max: i32) -> Result<NeighborhoodProfile> {
        if n_min >= n_max {
            return Err(NevError::InvalidInput("need n_min < n_max".into()));
        }
        if 2f64.powi(-n_min) >= 2.0 {
            return Err(NevError::InvalidInput("need 2^-n_min < 2".into()));
        }
        let levels: Vec<Level> = (n_min..=n_max)
            .map(|n| {
                let x = 2f64.powi(-n);
                Level { n, x, measure: self.neighborhood_measure(x) }
            })
            .collect();
        let used: Vec<usize> = (0..levels.len())
            .filter(|&i| levels[i].measure < TAU - ANGLE_TOL && levels[i].measure > 0.0)
            .collect();
        if used.len() < 2 {
            return Ok(NeighborhoodProfile { levels, alpha_hat: 0.0, fit_window: None });
        }
        let pts: Vec<(f64, f64)> = used
            .iter()
            .map(|&i| (levels[i].x.ln(), levels[i].measure.ln()))
            .collect();
        let slope = least_squares_slope(&pts);
        let window = (used[0], *used.last().unwrap());
        Ok(NeighborhoodProfile {
            levels,
            alpha_hat: slope.clamp(0.0, 1.0),
            fit_window: Some(window),
        })
    }

    /// Dyadic cells `E_n`, `γ_n` for `0 ≤ n ≤ n_max`.
    pub fn dyadic_cells(&self, n_max: u32) -> Vec<DyadicCell> {
        (0..=n_max)
            .map(|n| {
                let x = 2f64.powi(-(n as i32));
                let arcs = self.far_set(x);
                let measure = arcs.iter().map(|a| a.1).sum();
                DyadicCell {
                    n,
                    far_arcs: arcs,
                    far_measure: measure,
                    r_inner: 1.0 - x,
                    r_outer: 1.0 - 0.5 * x,
                }
            })
            .collect()
    }
}

/// Slope of the least-squares line through `pts`.
pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: i32,
    pub x: f64,
    pub measure: f64,
}

/// The measure ladder and the fitted type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodProfile {
    pub levels: Vec<Level>,
    pub alpha_hat: f64,
    /// Index range of `levels` used in the fit; `None` for a degenerate fit.
    pub fit_window: Option<(usize, usize)>,
}

impl NeighborhoodProfile {
    pub fn is_degenerate(&self) -> bool {
        self.fit_window.is_none()
    }

    /// CSV with columns `n,x,measure`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,x,measure\n");
        for l in &self.levels {
            let _ = writeln!(s, "{},{:e},{:.17e}", l.n, l.x, l.measure);
        }
        s
    }
}

/// Level-`n` cell: `E_n = {d ≥ 2^{-n}}` and the shell `γ_n = E_n × (1−2^{-n}, 1−2^{-n-1}]`.
///
/// `E_n` can be empty, so it is kept as a plain list of closed arcs
/// `(start, len)` rather than as an [`ArcSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicCell {
    pub n: u32,
    pub far_arcs: Vec<(f64, f64)>,
    pub far_measure: f64,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl DyadicCell {
    /// Area of `γ_n`.
    pub fn shell_area(&self) -> f64 {
        0.5 * self.far_measure * (self.r_outer.powi(2) - self.r_inner.powi(2))
    }

    /// True when the polar point `(ρ, t)` lies in `γ_n`.
    pub fn contains(&self, rho: f64, t: f64) -> bool {
        if !(rho > self.r_inner && rho <= self.r_outer) {
            return false;
        }
        self.far_arcs.iter().any(|&(s, l)| {
            let o = (t - s).rem_euclid(TAU);
            o <= l
        })
    }
}

/// `c(ε) = Σ_{n ≥ 0} 2^{-εn}`; infinite for `ε ≤ 0`.
pub fn geometric_factor(eps: f64) -> f64 {
    if eps <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / (1.0 - 2f64.powf(-eps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn quarter_gap() -> ArcSet {
        ArcSet::new(&[(0.0, FRAC_PI_2)]).unwrap()
    }

    #[test]
    fn construction_edge_cases() {
        assert!(ArcSet::new(&[]).unwrap().is_full_circle());
        let one = ArcSet::new(&[(0.0, TAU)]).unwrap();
        assert_eq!(one.gaps().len(), 1);
        assert_eq!(one.gaps()[0].len, TAU);
        assert!(matches!(
            ArcSet::new(&[(0.1, 0.2), (0.15, 0.3)]),
            Err(NevError::InvalidInput(_))
        ));
        assert!(ArcSet::new(&[(0.3, 0.3)]).is_err());
        // Wrapped pair (5, 1) means the arc through 0.
        let w = ArcSet::new(&[(5.0, 1.0)]).unwrap();
        assert_relative_eq!(w.gaps()[0].len, 1.0 + TAU - 5.0, epsilon = 1e-14);
        assert!(w.gap_index(0.0).is_some());
        assert!(w.gap_index(3.0).is_none());
    }

    #[test]
    fn json_round_trip() {
        let e = ArcSet::cantor(0.0, PI, 3).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: ArcSet = serde_json::from_str(&s).unwrap();
        assert_eq!(e.gaps().len(), back.gaps().len());
        for (g, h) in e.gaps().iter().zip(back.gaps()) {
            assert_relative_eq!(g.start, h.start, epsilon = 1e-15);
            assert_relative_eq!(g.len, h.len, epsilon = 1e-14);
        }
        assert!(serde_json::from_str::<ArcSet>(r#"{"gaps":[[0.1,0.2],[0.15,0.3]]}"#).is_err());
    }

    #[test]
    fn distance_examples() {
        let one = ArcSet::single_point(0.0);
        assert_eq!(one.distance(Complex64::new(0.0, 0.0)).unwrap(), 1.0);
        let full = ArcSet::full_circle();
        assert_relative_eq!(full.distance(Complex64::new(0.5, 0.0)).unwrap(), 0.5);
        let z = Complex64::from_polar(0.5, PI / 4.0);
        let d = quarter_gap().distance(z).unwrap();
        assert_relative_eq!(d, 0.54289f64.sqrt(), epsilon = 1e-5);
        assert!(one.distance(Complex64::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn distance_matches_dense_sampling() {
        // Brute force over a fine sample of E.
        let e = ArcSet::new(&[(0.3, 1.4), (2.0, 2.2), (4.0, 6.0)]).unwrap();
        let mut pts = Vec::new();
        for k in 0..200_000 {
            let t = TAU * k as f64 / 200_000.0;
            if e.gap_index(t).is_none() {
                pts.push(Complex64::from_polar(1.0, t));
            }
        }
        for g in e.gaps() {
            pts.push(g.a());
            pts.push(g.b());
        }
        for &(r, t) in &[(0.3, 0.9), (0.95, 5.0), (0.7, 2.1), (0.99, 3.0), (0.2, 4.5)] {
            let z = Complex64::from_polar(r, t);
            let brute = pts.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
            assert_relative_eq!(e.distance(z).unwrap(), brute, epsilon = 1e-4);
        }
    }

    #[test]
    fn neighborhood_measure_examples() {
        assert_eq!(ArcSet::full_circle().neighborhood_measure(0.01), TAU);
        let one = ArcSet::single_point(0.0);
        assert_relative_eq!(one.neighborhood_measure(0.1), 0.200083, epsilon = 1e-6);
        let l = 1.0;
        let arc = ArcSet::closed_arc(0.0, l).unwrap();
        let x = 0.3;
        assert_relative_eq!(
            arc.neighborhood_measure(x),
            l + 4.0 * (x / 2.0).asin(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn neighborhood_measure_matches_sampling() {
        let e = ArcSet::points(&[0.0, 1.0, 1.1, 4.0]).unwrap();
        let n = 400_000;
        for &x in &[0.05, 0.3, 1.2] {
            let hits = (0..n)
                .filter(|k| e.circle_distance(TAU * (*k as f64 + 0.5) / n as f64) < x)
                .count();
            let sampled = TAU * hits as f64 / n as f64;
            assert_relative_eq!(e.neighborhood_measure(x), sampled, epsilon = 1e-4);
        }
    }

    #[test]
    fn alpha_examples() {
        let full = ArcSet::full_circle().estimate_alpha(3, 12).unwrap();
        assert!(full.is_degenerate());
        assert_eq!(full.alpha_hat, 0.0);
        let four = ArcSet::points(&[0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]).unwrap();
        let a = four.estimate_alpha(3, 12).unwrap().alpha_hat;
        assert!((a - 1.0).abs() < 0.05, "{a}");
        let cantor = ArcSet::cantor(0.0, PI, 8).unwrap();
        let a = cantor.estimate_alpha(3, 10).unwrap().alpha_hat;
        let target = 1.0 - 2f64.ln() / 3f64.ln();
        assert!((a - target).abs() < 0.05, "{a}");
        let csv = cantor.estimate_alpha(3, 10).unwrap().to_csv();
        assert!(csv.starts_with("n,x,measure\n"));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn dyadic_cells_examples() {
        let cells = ArcSet::single_point(0.0).dyadic_cells(6);
        assert_relative_eq!(cells[0].far_measure, TAU - TAU / 3.0, epsilon = 1e-13);
        for w in cells.windows(2) {
            assert!(w[0].far_measure <= w[1].far_measure);
        }
        assert_relative_eq!(geometric_factor(1.0), 2.0);
        assert!(geometric_factor(0.0).is_infinite());
    }

    #[test]
    fn shells_are_disjoint_and_cover() {
        let e = ArcSet::points(&[0.0, 2.0, 4.0]).unwrap();
        let cells = e.dyadic_cells(10);
        let n0 = 2usize;
        for k in 0..2000 {
            let t = TAU * (k as f64 * 0.618_033_988_75).fract();
            let rho = 1.0 - 0.25 * ((k as f64 * 0.414_213_562).fract()).powi(3) - 1e-9;
            let inside: Vec<usize> = (0..cells.len()).filter(|&n| cells[n].contains(rho, t)).collect();
            assert!(inside.len() <= 1);
            let in_gamma_n0 = e.circle_distance(t) >= 0.25 && rho > 0.75;
            if in_gamma_n0 && rho <= cells.last().unwrap().r_outer {
                assert_eq!(inside.len(), 1);
                assert!(inside[0] >= n0);
            }
        }
    }
}
