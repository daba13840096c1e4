//! Every registered integral estimate on one function, with both sides and
//! the observed constant.

use nevlab::boundary_set::ArcSet;
use nevlab::function_zoo::{AnalyticTestFunction, Factor};
use nevlab::green_verify::{default_u, verify_integral_estimate, EstimateInput, ESTIMATES};
use nevlab::quadrature::DiskGrid;
use nevlab::weight::WeightParams;
use num_complex::Complex64;

fn main() -> nevlab::Result<()> {
    let f = AnalyticTestFunction::new(Factor::Product {
        factors: vec![
            Factor::blaschke(&[Complex64::new(0.5, 0.2), Complex64::new(-0.3, 0.6)]),
            Factor::SingularExponential { masses: vec![(0.3, 0.0)] },
        ],
    })?;
    let e = ArcSet::points(&[0.0, 2.0, 4.0])?;
    let grid = DiskGrid::new(64, 128)?;
    for &(id, anchor) in ESTIMATES {
        // p = 0 estimates need p = 0; the rest are run at p = 1.
        let p = if matches!(id, "eOP7" | "eP4") { 0.0 } else { 1.0 };
        let inp = EstimateInput { f: &f, e: &e, params: WeightParams::with_q(p, 1.0)?, s: 0.8, u: default_u(), grid };
        match verify_integral_estimate(id, &inp) {
            Ok(r) => println!(
                "{id:7} {:5} lhs {:>11.4e} rhs {:>11.4e} constant {:.3} drift {:.3}",
                r.status, r.lhs, r.rhs, r.constant, r.drift
            ),
            Err(err) => println!("{id:7} error {err}"),
        }
        println!("        {anchor}");
    }
    Ok(())
}
