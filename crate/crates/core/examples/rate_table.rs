//! Theoretical per-iteration factors over a range of condition numbers, and
//! where the DGDA rate beats `1 − 1/(4κ)`.
//!
//! ```bash
//! cargo run -p dgda --example rate_table
//! ```

use dgda::harness::{rate_table, write_rate_table};

fn main() -> dgda::Result<()> {
    let rows = rate_table(1.0, 1e4, 13)?;
    write_rate_table(&rows, std::io::stdout().lock())?;
    let first = rows.iter().find(|r| r.corollary_gap >= 0.0).expect("gap turns positive");
    println!("# gap first non-negative on this grid at kappa = {:.4}", first.kappa);
    Ok(())
}
