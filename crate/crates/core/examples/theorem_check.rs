//! Weighted zero sums against their right-hand sides for a finite Blaschke
//! product, plus the dyadic majorant behind the distance-power sums.

use nevlab::blaschke_verify::{dyadic_rhs_bound, verify_theorem, TheoremInput, THEOREMS};
use nevlab::boundary_set::ArcSet;
use nevlab::function_zoo::{AnalyticTestFunction, Factor};
use nevlab::quadrature::{CircleGrid, DiskGrid, SGrid};
use nevlab::weight::WeightParams;
use num_complex::Complex64;

fn main() -> nevlab::Result<()> {
    let zeros = [Complex64::new(0.5, 0.2), Complex64::new(-0.3, 0.6), Complex64::new(0.1, -0.8)];
    let f = AnalyticTestFunction::new(Factor::blaschke(&zeros))?;
    let e = ArcSet::points(&[0.0, 2.0, 4.0])?;
    for &(id, _) in THEOREMS {
        let p = if id == "0_NI0" || id == "L∞-p=0" { 0.0 } else { 1.0 };
        let inp = TheoremInput {
            f: &f,
            e: &e,
            params: WeightParams::with_q(p, 1.0)?,
            eps: 0.5,
            envelope: None,
            alpha: Some(1.0),
            alpha_window: (3, 12),
            s_grid: SGrid { delta: 0.5, k_max: 3 },
            grid: DiskGrid::new(48, 96)?,
            circle: CircleGrid::new(192)?,
        };
        let r = verify_theorem(id, &inp)?;
        println!("{}", r.csv_row());
    }

    let b = dyadic_rhs_bound(&e, 1.0, 0.5, 1.0, 12)?;
    println!("dyadic bound: partial {:.4e} tail {:.4e} total {:.4e}", b.partial, b.tail, b.bound);
    Ok(())
}
