//! Generate one instance of each problem family, save it, load it back and
//! print its spectral summary.
//!
//! ```bash
//! cargo run -p dgda --example generate_problems -- [out_dir]
//! ```

use std::env;
use std::path::PathBuf;

use dgda::problems::{gen_bilinear, gen_scsc, load_problem, save_problem, ShiftMode};

fn main() -> dgda::Result<()> {
    let dir = env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| env::temp_dir().join("dgda-problems"));
    std::fs::create_dir_all(&dir).expect("output directory");

    let bilinear = gen_bilinear(10, 10, 25.0, 1, ShiftMode::Zero)?;
    let b = bilinear.as_bilinear().expect("bilinear");
    println!(
        "bilinear 10x10: sigma_min {:.6} sigma_max {:.6} kappa {:.12}",
        b.sigma_min(),
        b.sigma_max(),
        b.kappa()
    );

    let scsc = gen_scsc(50, 10, 31.0, 1, ShiftMode::Random)?;
    let q = scsc.as_scsc().expect("scsc");
    println!(
        "scsc 50+10: mu {:.6} L {:.6} kappa {:.12}",
        q.mu(),
        q.lipschitz(),
        q.kappa()
    );

    for (name, p) in [("bilinear.json", &bilinear), ("scsc.json", &scsc)] {
        let path = dir.join(name);
        save_problem(p, &path)?;
        let back = load_problem(&path)?;
        assert_eq!(&back, p);
        println!("{} digest {} (round trip exact)", path.display(), p.digest());
    }

    // F vanishes at the saddle, which equals the shift
    let g = scsc.grad(scsc.saddle())?;
    println!("max |F(saddle)| = {:e}", g.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    Ok(())
}
