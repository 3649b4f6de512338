//! Closed-form DGDA spectrum on a bilinear game, checked against a numerical
//! eigensolve, and the resulting rate certificate.
//!
//! ```bash
//! cargo run -p dgda --example spectral_certificate
//! ```

use dgda::certify::{
    bilinear_rate_bound, certify, dgda_bilinear_eig_magnitudes, verify_spectrum, RateBound,
};
use dgda::numerics::singular_values;
use dgda::problems::{gen_bilinear, ShiftMode};

fn main() -> dgda::Result<()> {
    let p = gen_bilinear(6, 6, 25.0, 7, ShiftMode::Zero)?;
    let b = p.as_bilinear().expect("bilinear");
    let sigmas = singular_values(b.coupling())?;

    for (rho, eta) in [(0.5, 0.6 / b.sigma_max()), (0.25, 2.0 / b.sigma_min()), (0.0, 0.1)] {
        let mags = dgda_bilinear_eig_magnitudes(&sigmas, rho, eta);
        let max = mags.iter().cloned().fold(f64::MIN, f64::max);
        let check = verify_spectrum(b, rho, eta)?;
        let bound = match bilinear_rate_bound(b.sigma_min(), b.sigma_max(), rho, eta) {
            RateBound::Factor(f) => format!("{f:.6}"),
            RateBound::Divergent(_) => "no guarantee".into(),
        };
        println!(
            "rho={rho:<4} eta={eta:.4}: max |mu|^2 = {max:.6}, numerical deviation {:.1e}, bound {bound}",
            check.deviation
        );
    }

    let cert = certify(&p, None, None)?;
    print!("{}", cert.to_json());
    Ok(())
}
