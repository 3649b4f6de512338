//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p dgda --test acceptance -- --nocapture --test-threads=1`.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dgda::certify::{
    check_dissipation, corollary_gap, log_grid, scsc_alpha_sq, validated_convention, verify_spectrum,
    LmiParams, LMI_TOLERANCE,
};
use dgda::harness::{dominance, run_bench, BenchSpec};
use dgda::numerics::{DenseMatrix, SeededRng};
use dgda::problems::{
    gen_bilinear, gen_scsc, BilinearProblem, Problem, ProblemInstance, ProblemKind, ShiftMode,
};
use dgda::solvers::{default_config, init_state, run, step, Method, SolverConfig, Verdict};

fn report(id: &str, title: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] AC{id} {title}: {detail}");
}

#[test]
fn ac1_bilinear_benchmark() {
    let spec = BenchSpec::new(ProblemKind::Bilinear, 10, 10, 25.0);
    let start = Instant::now();
    let run = run_bench(&spec).unwrap();
    let elapsed = start.elapsed();
    let s = &run.summary;
    let get = |m| s.method(m).unwrap();

    let gda_diverged = get(Method::Gda).diverged == 20;
    let others_converged = [Method::Eg, Method::Ogda, Method::Dgda]
        .into_iter()
        .all(|m| get(m).converged == 20);
    let dgda = get(Method::Dgda);
    let factor_max = dgda.factor_max.unwrap_or(f64::INFINITY);
    let factor_ok = dgda.factors.iter().all(Option::is_some) && factor_max <= 0.99 + 0.005;
    let vs_eg = dominance(dgda, get(Method::Eg), 0.2);
    let vs_ogda = dominance(dgda, get(Method::Ogda), 0.2);
    let below = vs_eg.checked > 0 && vs_eg.violations == 0 && vs_ogda.checked > 0 && vs_ogda.violations == 0;
    let fast = elapsed <= Duration::from_secs(30);

    let ok = gda_diverged && others_converged && factor_ok && below && fast;
    report(
        "1",
        "bilinear benchmark",
        ok,
        &format!(
            "gda diverged {}/20, eg/ogda/dgda converged {}/{}/{}, dgda factor max {factor_max:.5} (<= 0.995), \
             dgda below eg at {}/{} and ogda at {}/{} abscissae, {:.1}s",
            get(Method::Gda).diverged,
            get(Method::Eg).converged,
            get(Method::Ogda).converged,
            dgda.converged,
            vs_eg.checked - vs_eg.violations,
            vs_eg.checked,
            vs_ogda.checked - vs_ogda.violations,
            vs_ogda.checked,
            elapsed.as_secs_f64()
        ),
    );
    assert!(ok);
}

#[test]
fn ac2_spectral_oracle_equivalence() {
    let mut rng = SeededRng::new(2024);
    let rhos = [0.25, 0.5, 0.75];
    let mut worst: f64 = 0.0;
    let mut regimes = [0usize; 2];
    for i in 0..100 {
        let n = 1 + i % 8;
        let kappa = if n == 1 { 1.0 } else { (rng.uniform() * 100f64.ln()).exp() };
        let p = gen_bilinear(n, n, kappa, 1000 + i as u64, ShiftMode::Zero).unwrap();
        let b = p.as_bilinear().unwrap();
        let rho = rhos[i % 3];
        // keep every ησ_j strictly on one side of 2ρ
        let regime = (i / 3) % 2;
        let eta = if regime == 0 {
            rng.uniform_range(0.3, 0.9) * 2.0 * rho / b.sigma_max()
        } else {
            rng.uniform_range(1.1, 3.0) * 2.0 * rho / b.sigma_min()
        };
        regimes[regime] += 1;
        worst = worst.max(verify_spectrum(b, rho, eta).unwrap().deviation);
    }
    let ok = worst <= 1e-9;
    report(
        "2",
        "spectral oracle equivalence",
        ok,
        &format!(
            "100 instances ({} real-discriminant, {} complex), max deviation {worst:.3e} (<= 1e-9)",
            regimes[0], regimes[1]
        ),
    );
    assert!(ok);
}

#[test]
fn ac3_gda_divergence_law() {
    let b = BilinearProblem::new(DenseMatrix::identity(1), vec![0.0, 0.0]).unwrap();
    let p = ProblemInstance::new(Problem::Bilinear(b), 0, 1.0);
    let mut worst: f64 = 0.0;
    for eta in [0.01, 0.1, 0.5] {
        let cfg = SolverConfig::new(Method::Gda, eta, 0.0);
        let mut state = init_state(Method::Gda, &[0.7, -0.3]).unwrap();
        let mut d = p.saddle_distance_sq(&state.z);
        for _ in 0..200 {
            step(&p, &mut state, &cfg).unwrap();
            let next = p.saddle_distance_sq(&state.z);
            let rel = (next / d / (1.0 + eta * eta) - 1.0).abs();
            worst = worst.max(rel);
            d = next;
        }
    }
    let ok = worst <= 1e-14;
    report(
        "3",
        "GDA divergence law",
        ok,
        &format!("eta in {{0.01, 0.1, 0.5}}, 200 steps each, max relative deviation {worst:.2e} (<= 1e-14)"),
    );
    assert!(ok);
}

#[test]
fn ac4_scsc_benchmark() {
    let spec = BenchSpec::new(ProblemKind::Scsc, 50, 10, 31.0);
    let start = Instant::now();
    let run = run_bench(&spec).unwrap();
    let elapsed = start.elapsed();
    let s = &run.summary;
    let get = |m| s.method(m).unwrap();

    let all_converged = Method::ALL.into_iter().all(|m| get(m).converged == 20);
    let alpha_sq = scsc_alpha_sq(31.0, 1.0).unwrap();
    let dgda = get(Method::Dgda);
    let dgda_max = dgda.factor_max.unwrap_or(f64::INFINITY);
    let bound_ok = dgda.factors.iter().all(Option::is_some) && dgda_max <= alpha_sq + 1e-3;
    // strictly smallest in every trial
    let mut smallest = true;
    for t in 0..spec.trials {
        let d = dgda.factors[t].unwrap_or(f64::INFINITY);
        for m in [Method::Gda, Method::Eg, Method::Ogda] {
            smallest &= get(m).factors[t].is_some_and(|f| d < f);
        }
    }
    let fast = elapsed <= Duration::from_secs(60);

    let ok = all_converged && bound_ok && smallest && fast;
    let mean = |m| get(m).factor_mean.unwrap_or(f64::NAN);
    report(
        "4",
        "SCSC benchmark",
        ok,
        &format!(
            "converged gda/eg/ogda/dgda {}/{}/{}/{}, dgda factor max {dgda_max:.5} (<= {:.5}), \
             mean factors gda {:.5} eg {:.5} ogda {:.5} dgda {:.5}, {:.1}s",
            get(Method::Gda).converged,
            get(Method::Eg).converged,
            get(Method::Ogda).converged,
            dgda.converged,
            alpha_sq + 1e-3,
            mean(Method::Gda),
            mean(Method::Eg),
            mean(Method::Ogda),
            mean(Method::Dgda),
            elapsed.as_secs_f64()
        ),
    );
    assert!(ok);
}

#[test]
fn ac5_dissipation_certificate() {
    let mut lmi_worst = f64::NEG_INFINITY;
    let mut conventions = Vec::new();
    for (l, mu) in [(2.0, 1.0), (10.0, 1.0), (31.0, 1.0), (100.0, 3.0)] {
        let conv = validated_convention(l, mu, 1000, &mut SeededRng::new(5)).unwrap();
        conventions.push(conv);
        let r = LmiParams::feasible_point(l, mu, conv).unwrap().residual().unwrap();
        lmi_worst = lmi_worst.max(r);
    }
    let lmi_ok = lmi_worst <= LMI_TOLERANCE;

    let mut rng = SeededRng::new(55);
    let mut failing = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..50u64 {
        let n = rng.uniform_int(2, 12);
        let m = rng.uniform_int(1, n);
        let kappa = rng.uniform_range(2.0, 50.0);
        let p = gen_scsc(n, m, kappa, 500 + i, ShiftMode::Random).unwrap();
        let q = p.as_scsc().unwrap();
        let alpha_sq = scsc_alpha_sq(q.lipschitz(), q.mu()).unwrap();
        let cfg = default_config(Method::Dgda, &p).with_max_iters(100).with_stop(0.0);
        let z0: Vec<f64> = (0..p.dim()).map(|_| rng.uniform_range(-1.0, 2.0)).collect();
        let t = run(&p, &cfg, &z0, 1).unwrap();
        let v: Vec<f64> = t.records.iter().map(|r| r.lyapunov).collect();
        let check = check_dissipation(&v, alpha_sq, 1e-9);
        if !check.holds() {
            failing += 1;
        }
        worst_ratio = worst_ratio.max(check.worst_ratio);
        worst_excess = worst_excess.max(check.worst_excess);
    }
    let traj_ok = failing == 0;

    let ok = lmi_ok && traj_ok;
    report(
        "5",
        "dissipation certificate",
        ok,
        &format!(
            "LMI max eigenvalue {lmi_worst:.2e} (<= 1e-8) under {:?}; trajectories violating \
             V(k+1) <= a2 V(k) + 1e-9 V(0): {failing}/50, worst one-step ratio {worst_ratio:.4}, \
             worst excess {worst_excess:.3e}",
            conventions[0]
        ),
    );
    assert!(lmi_ok, "LMI part failed");
    assert!(traj_ok, "trajectory part failed on {failing}/50 instances");
}

#[test]
fn ac6_rate_comparison() {
    let grid = log_grid(2.0, 1e4, 200);
    let min_gap = grid
        .iter()
        .map(|&k| corollary_gap(k).unwrap())
        .fold(f64::INFINITY, f64::min);
    let g2 = corollary_gap(2.0).unwrap();
    let independent = (1.0 - 1.0 / 8.0) - (3.0 * 4.0 + 2.0 * 2.0 + 3.0 + (81.0f64 + 64.0).sqrt()) / 36.0;
    let ok = min_gap >= -1e-12 && (g2 - independent).abs() <= 1e-15 && (g2 - 0.0127).abs() < 5e-5;
    report(
        "6",
        "rate comparison gap",
        ok,
        &format!("min gap over 200 points in [2, 1e4] = {min_gap:.3e}, gap(2) = {g2:.6}"),
    );
    assert!(ok);
}

#[test]
fn ac7_reductions_and_invariances() {
    let instances = [
        gen_bilinear(6, 6, 16.0, 3, ShiftMode::Zero).unwrap(),
        gen_bilinear(7, 4, 9.0, 4, ShiftMode::Zero).unwrap(),
        gen_scsc(6, 4, 12.0, 5, ShiftMode::Zero).unwrap(),
    ];

    // ρ = 0 DGDA against GDA on the z-track
    let mut bitwise = true;
    for p in &instances {
        let eta = default_config(Method::Gda, p).eta;
        let z0 = SeededRng::new(9).normal_vec(p.dim());
        let (gda_cfg, dgda_cfg) = (
            SolverConfig::new(Method::Gda, eta, 0.0),
            SolverConfig::new(Method::Dgda, eta, 0.0),
        );
        let mut a = init_state(Method::Gda, &z0).unwrap();
        let mut b = init_state(Method::Dgda, &z0).unwrap();
        for _ in 0..40 {
            step(p, &mut a, &gda_cfg).unwrap();
            step(p, &mut b, &dgda_cfg).unwrap();
            bitwise &= a.z.iter().zip(&b.z).all(|(x, y)| x.to_bits() == y.to_bits());
        }
    }

    // the saddle is a fixed point
    let mut fixed = true;
    for kind in [ProblemKind::Bilinear, ProblemKind::Scsc] {
        let p = dgda::problems::generate(kind, 5, 5, 9.0, 6, ShiftMode::Random).unwrap();
        for method in Method::ALL {
            let cfg = default_config(method, &p);
            let mut s = init_state(method, p.saddle()).unwrap();
            for _ in 0..50 {
                step(&p, &mut s, &cfg).unwrap();
            }
            fixed &= s.z == p.saddle();
        }
    }

    // shifted instances translate trajectories
    let mut worst: f64 = 0.0;
    for (kind, n, m) in [(ProblemKind::Bilinear, 6, 6), (ProblemKind::Bilinear, 6, 3), (ProblemKind::Scsc, 6, 4)] {
        let base = dgda::problems::generate(kind, n, m, 9.0, 8, ShiftMode::Zero).unwrap();
        let shifted = dgda::problems::generate(kind, n, m, 9.0, 8, ShiftMode::Random).unwrap();
        let z0 = SeededRng::new(2).normal_vec(n + m);
        let z0s: Vec<f64> = z0.iter().zip(shifted.saddle()).map(|(a, b)| a + b).collect();
        for method in Method::ALL {
            let cfg = default_config(method, &base).with_max_iters(200);
            let a = run(&base, &cfg, &z0, 1).unwrap();
            let b = run(&shifted, &cfg, &z0s, 1).unwrap();
            for (ra, rb) in a.records.iter().zip(&b.records) {
                worst = worst.max((ra.dist_sq - rb.dist_sq).abs() / ra.dist_sq.max(1.0));
            }
        }
    }

    let ok = bitwise && fixed && worst <= 1e-12;
    report(
        "7",
        "reductions and invariances",
        ok,
        &format!(
            "rho=0 bitwise match: {bitwise}, saddle fixed for all methods: {fixed}, \
             max translation deviation {worst:.2e} (<= 1e-12)"
        ),
    );
    assert!(ok);
}

fn dgda_cli(dir: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_dgda"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if matches!(path.extension().and_then(|s| s.to_str()), Some("csv" | "json")) {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn ac8_determinism() {
    let invocations: [&[&str]; 6] = [
        &["gen", "--kind", "bilinear", "--n", "10", "--m", "10", "--kappa", "25", "--seed", "1", "-o", "p.json"],
        &["gen", "--kind", "scsc", "--n", "20", "--m", "10", "--kappa", "31", "--seed", "1", "-o", "q.json"],
        &["run", "-p", "p.json", "--method", "dgda", "--eta", "auto", "--iters", "2000", "-o", "t.csv"],
        &["run", "-p", "q.json", "--method", "ogda", "--eta", "auto", "--stride", "5", "-o", "u.csv"],
        &[
            "bench", "--kind", "bilinear", "--n", "5", "--m", "5", "--kappa", "9", "--trials", "4",
            "--base-seed", "3", "--out-dir", "bench",
        ],
        &["certify", "-p", "q.json", "--trace", "u.csv", "-o", "cert.json"],
    ];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut codes_ok = true;
    for d in &dirs {
        for args in invocations {
            codes_ok &= dgda_cli(d.path(), args) == 0;
        }
    }
    let a = artifacts(dirs[0].path());
    let b = artifacts(dirs[1].path());
    let identical = a == b;
    let count = a.len();
    let ok = codes_ok && identical && count > 10;
    report(
        "8",
        "determinism",
        ok,
        &format!("{count} CSV/JSON artifacts from gen/run/bench/certify, byte-identical across two runs: {identical}"),
    );
    assert!(ok);
    assert_eq!(
        Verdict::Converged.as_str(),
        serde_json::from_slice::<serde_json::Value>(&a.iter().find(|f| f.0 == "u.json").unwrap().1).unwrap()
            ["verdict"]
    );
}
