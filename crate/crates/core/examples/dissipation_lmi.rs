//! The DGDA dissipation inequality for strongly monotone quadratics: pick
//! the supply-rate sign by probing, then evaluate the 3×3 LMI at its
//! closed-form feasible point.
//!
//! ```bash
//! cargo run -p dgda --example dissipation_lmi
//! ```

use dgda::certify::{scsc_alpha_sq, supply_rate_sign_probe, LmiParams, SignConvention};
use dgda::numerics::SeededRng;

fn main() -> dgda::Result<()> {
    let mut rng = SeededRng::new(1);
    for conv in SignConvention::ALL {
        let worst = supply_rate_sign_probe(5.0, 1.0, conv, 1000, &mut rng)?;
        println!("{conv:<17} worst supply rate over 1000 probes: {worst:+.3e}");
    }

    println!("{:>6} {:>4} {:>10} {:>14} {:>14}", "L", "mu", "alpha^2", "sector", "printed");
    for (l, mu) in [(2.0, 1.0), (10.0, 1.0), (31.0, 1.0), (100.0, 3.0)] {
        let sector = LmiParams::feasible_point(l, mu, SignConvention::SymmetricSector)?.residual()?;
        let printed = LmiParams::feasible_point(l, mu, SignConvention::PaperExact)?.residual()?;
        println!(
            "{l:>6} {mu:>4} {:>10.6} {sector:>+14.3e} {printed:>+14.3e}",
            scsc_alpha_sq(l, mu)?
        );
    }
    Ok(())
}
