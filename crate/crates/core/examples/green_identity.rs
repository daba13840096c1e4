//! Green identities on a ladder of grids: the normalization self-test and
//! the zero-mass identity for a Blaschke product.

use nevlab::boundary_set::ArcSet;
use nevlab::function_zoo::{AnalyticTestFunction, Factor};
use nevlab::green_verify::{normalization_self_test, zero_mass_identity};
use nevlab::quadrature::DiskGrid;
use nevlab::weight::WeightParams;
use num_complex::Complex64;

fn main() -> nevlab::Result<()> {
    let r = normalization_self_test(&DiskGrid::default(), 2)?;
    println!("self-test residual {:.2e}", r.residual);

    let zeros = [Complex64::new(0.3, 0.2), Complex64::new(-0.5, 0.4), Complex64::new(0.1, -0.7)];
    let f = AnalyticTestFunction::new(Factor::blaschke(&zeros))?;
    let e = ArcSet::points(&[0.0, 2.0, 4.0])?;
    for p in [0.0, 1.0] {
        let params = WeightParams::with_q(p, 1.0)?;
        let r = zero_mass_identity(&f, &e, &params, 0.85, &DiskGrid::new(64, 128)?, 3)?;
        println!("{} (p = {p}): lhs {:.10}", r.identity_id, r.lhs);
        for l in &r.history {
            println!("  {:4} x {:4}  rhs {:.10}  residual {:.2e}", l.n_r, l.n_theta, l.rhs, l.residual);
        }
        println!("  reductions {:?} converged {}", r.reductions(), r.converged);
    }
    Ok(())
}
