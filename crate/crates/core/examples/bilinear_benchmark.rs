//! Twenty-trial benchmark on bilinear games with `κ = 25`: GDA diverges, DGDA
//! beats EG and OGDA per gradient evaluation.
//!
//! ```bash
//! cargo run --release -p dgda --example bilinear_benchmark -- [out_dir]
//! ```

use std::env;
use std::path::PathBuf;

use dgda::harness::{dominance, run_bench, write_outputs, BenchSpec};
use dgda::problems::ProblemKind;
use dgda::solvers::Method;

fn main() -> dgda::Result<()> {
    let out = env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| env::temp_dir().join("dgda-bench-bilinear"));
    let spec = BenchSpec::new(ProblemKind::Bilinear, 10, 10, 25.0);
    let run = run_bench(&spec)?;
    let art = write_outputs(&out, &run)?;

    let s = &run.summary;
    for m in &s.methods {
        println!(
            "{:<5} converged {:>2}/{}  diverged {:>2}  fitted factor {}",
            m.method.as_str(),
            m.converged,
            spec.trials,
            m.diverged,
            m.factor_mean.map_or("-".into(), |f| format!("{f:.5}"))
        );
    }
    let dgda = s.method(Method::Dgda).expect("dgda ran");
    for other in [Method::Eg, Method::Ogda] {
        let d = dominance(dgda, s.method(other).expect("ran"), 0.2);
        println!(
            "dgda below {other} at {}/{} abscissae past burn-in",
            d.checked - d.violations,
            d.checked
        );
    }
    println!("plot: {}", art.plot_svg.display());
    Ok(())
}
