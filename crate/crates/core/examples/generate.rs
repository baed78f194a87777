//! Generate closed-form entropy cumulants up to a given order and print
//! them with timings.
//!
//! Usage: `cargo run --release --example generate -- [MAX_ORDER]`

use std::time::Instant;

use entropy_cumulants::convert;
use entropy_cumulants::engine::Engine;
use entropy_cumulants::symexpr::EmitFormat;

fn main() {
    let max: u32 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);
    let t0 = Instant::now();
    let mut engine = Engine::new();
    let state = convert::convert(&mut engine, max).expect("pipeline runs");
    for (i, ks) in state.cumulants_s.iter().enumerate() {
        println!("kappa_{}(S) = {}", i + 1, ks.emit(EmitFormat::Text));
        println!();
    }
    eprintln!(
        "generated {} orders in {:?} ({} joint cumulants)",
        max,
        t0.elapsed(),
        engine.store().len()
    );
}
