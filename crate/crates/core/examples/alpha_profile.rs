//! Neighborhood profile of a middle-thirds Cantor set and the fitted
//! exponent, next to its exact value `1 − ln 2/ln 3`.
//!
//! `cargo run --release --example alpha_profile -- 8`

use nevlab::boundary_set::ArcSet;

fn main() -> nevlab::Result<()> {
    let depth: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let e = ArcSet::cantor(0.0, 2.0, depth)?;
    let prof = e.estimate_alpha(3, 12)?;
    print!("{}", prof.to_csv());
    println!("alpha_hat {:.4}", prof.alpha_hat);
    println!("exact     {:.4}", 1.0 - 2f64.ln() / 3f64.ln());

    let circle = ArcSet::full_circle().estimate_alpha(3, 12)?;
    println!("full circle: alpha_hat {} degenerate {}", circle.alpha_hat, circle.is_degenerate());
    Ok(())
}
