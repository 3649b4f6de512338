//! Run DGDA, write its trace, and compare the fitted contraction factor with
//! the certificate.
//!
//! ```bash
//! cargo run -p dgda --example empirical_rate -- [out_dir]
//! ```

use std::env;
use std::path::PathBuf;

use dgda::certify::certify;
use dgda::harness::initial_point;
use dgda::problems::{gen_scsc, ShiftMode};
use dgda::solvers::{default_config, read_trace_csv, run, write_trace, Method};

fn main() -> dgda::Result<()> {
    let dir = env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| env::temp_dir().join("dgda-empirical"));
    std::fs::create_dir_all(&dir).expect("output directory");

    let p = gen_scsc(20, 8, 31.0, 4, ShiftMode::Random)?;
    let cfg = default_config(Method::Dgda, &p);
    let trace = run(&p, &cfg, &initial_point(4, p.dim()), 5)?;
    let csv = dir.join("dgda.csv");
    write_trace(&trace, &csv)?;
    println!(
        "{} after {} iterations, final dist_sq {:.2e}",
        trace.verdict.as_str(),
        trace.last().k,
        trace.last().dist_sq
    );

    let cert = certify(&p, None, None)?.with_trace(&read_trace_csv(&csv)?)?;
    println!(
        "certified {:?}, fitted {:.5}, within slack: {:?}",
        cert.theoretical_factor.factor(),
        cert.empirical_factor.unwrap_or(f64::NAN),
        cert.empirical_pass
    );
    Ok(())
}
