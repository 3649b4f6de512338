//! `f(x, y) = x·y`: GDA spirals away from the saddle at rate `1 + η²` while
//! dissipative GDA converges.
//!
//! ```bash
//! cargo run -p dgda --example bilinear_game
//! ```

use dgda::numerics::DenseMatrix;
use dgda::problems::{BilinearProblem, Problem, ProblemInstance};
use dgda::solvers::{init_state, lyapunov, step, Method, SolverConfig};

fn main() -> dgda::Result<()> {
    let b = BilinearProblem::new(DenseMatrix::identity(1), vec![0.0, 0.0])?;
    let p = ProblemInstance::new(Problem::Bilinear(b), 0, 1.0);
    let z0 = [1.0, 0.0];

    let eta = 0.5;
    let gda = SolverConfig::new(Method::Gda, eta, 0.0);
    let mut s = init_state(Method::Gda, &z0)?;
    println!("GDA, eta = {eta}: dist_sq grows by {} per step", 1.0 + eta * eta);
    for k in 1..=10 {
        step(&p, &mut s, &gda)?;
        println!("  k={k:>2}  z=({:+.4}, {:+.4})  dist_sq={:.6}", s.z[0], s.z[1], p.saddle_distance_sq(&s.z));
    }

    // ρ = ½, η = 1 is the critically damped point: dist_sq = (k+1)²/2ᵏ
    let dgda = SolverConfig::new(Method::Dgda, 1.0, 0.5);
    let mut s = init_state(Method::Dgda, &z0)?;
    println!("DGDA, rho = 0.5, eta = 1:");
    for k in 1..=60 {
        step(&p, &mut s, &dgda)?;
        if k % 10 == 0 {
            let exact = ((k + 1) as f64).powi(2) * 0.5f64.powi(k);
            println!(
                "  k={k:>2}  dist_sq={:.3e}  (k+1)^2/2^k={exact:.3e}  V={:.3e}",
                p.saddle_distance_sq(&s.z),
                lyapunov(&p, &s)
            );
        }
    }
    Ok(())
}
