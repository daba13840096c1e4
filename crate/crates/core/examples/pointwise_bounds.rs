//! Runs every registered pointwise bound on a few boundary sets and prints a
//! summary line per check.

use nevlab::boundary_set::ArcSet;
use nevlab::weight::bounds::{check_bound, BOUNDS};
use nevlab::weight::WeightParams;

fn main() -> nevlab::Result<()> {
    let samples: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);
    let sets = [
        ("quarter gap", ArcSet::new(&[(0.0, std::f64::consts::FRAC_PI_2)])?),
        ("two points", ArcSet::points(&[0.0, 2.0])?),
        ("cantor", ArcSet::cantor(0.0, 1.0, 5)?),
    ];
    for (name, e) in &sets {
        for (p, q) in [(0.0, 1.0), (1.0, 1.0), (0.5, 0.75), (2.0, 0.5)] {
            let params = WeightParams::with_q(p, q)?;
            for b in BOUNDS {
                let c = check_bound(b.id, e, &params, samples, 7)?;
                println!(
                    "{name:12} p={p:<4} q={q:<5} {:10} pass={} viol={} worst={:.3e} const={:?} drift={:?}",
                    b.id, c.passed, c.violations, c.worst_margin, c.coarse_constant, c.drift
                );
            }
        }
    }
    Ok(())
}
