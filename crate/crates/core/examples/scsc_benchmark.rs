//! Twenty-trial benchmark on strongly convex–strongly concave quadratics
//! with `κ = L/μ = 31`, compared against the certified DGDA factor.
//!
//! ```bash
//! cargo run --release -p dgda --example scsc_benchmark -- [out_dir]
//! ```

use std::env;
use std::path::PathBuf;

use dgda::certify::scsc_alpha_sq;
use dgda::harness::{run_bench, write_outputs, Abscissa, BenchSpec};
use dgda::problems::ProblemKind;

fn main() -> dgda::Result<()> {
    let out = env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| env::temp_dir().join("dgda-bench-scsc"));
    let spec = BenchSpec {
        abscissa: Abscissa::GradEvals,
        ..BenchSpec::new(ProblemKind::Scsc, 50, 10, 31.0)
    };
    let run = run_bench(&spec)?;
    write_outputs(&out, &run)?;

    println!("certified DGDA factor alpha^2(31, 1) = {:.6}", scsc_alpha_sq(31.0, 1.0)?);
    for m in &run.summary.methods {
        println!(
            "{:<5} converged {:>2}/{}  per-iteration {:.5}  per-evaluation {:.5}  reference {}",
            m.method.as_str(),
            m.converged,
            spec.trials,
            m.factor_mean.unwrap_or(f64::NAN),
            m.factor_per_eval().unwrap_or(f64::NAN),
            m.theoretical.factor().map_or("none".into(), |f| format!("{f:.5}"))
        );
    }
    println!("outputs in {}", out.display());
    Ok(())
}
