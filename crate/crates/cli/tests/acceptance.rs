//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use lambda_herald::herald::{
    count_rate, delta_c_scan, generated_state, realize_setpoint, ExperimentConfig, QuadratureSpec,
};
use lambda_herald::optics::{
    concurrence_analytic, heralded_state, heralded_state_via_operators, visibility, JonesVector,
    PolarizerSpec,
};
use lambda_herald::qcore::{concurrence_mixed, concurrence_pure, DensityMatrix4, TwoQubitPure};
use lambda_herald::HeraldError;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_jones(rng: &mut ChaCha8Rng) -> JonesVector {
    JonesVector::normalized(gaussian(rng), gaussian(rng)).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn analytic_equals_constructed() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inputs: Vec<_> = (0..10_000)
        .map(|_| {
            (
                random_jones(&mut rng),
                random_jones(&mut rng),
                rng.random_range(0.0..TAU),
            )
        })
        .collect();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (e1, e2, delta) in &inputs {
        let out = heralded_state(e1, e2, *delta).map_err(|e| e.to_string())?;
        let c_state = concurrence_pure(&out.state).map_err(|e| e.to_string())?;
        let c_formula = concurrence_analytic(*delta, out.v12).map_err(|e| e.to_string())?;
        worst = worst.max((c_state - c_formula).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst < 1e-10 && elapsed < Duration::from_secs(1),
        format!("max |dC| = {worst:.2e} over 1e4 samples in {elapsed:.2?}"),
    )
}

fn operator_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut amp_err, mut g2_err) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (e1, e2) = (random_jones(&mut rng), random_jones(&mut rng));
        let d1 = rng.random_range(-PI..PI);
        let d2 = rng.random_range(-PI..PI);
        let via_ops = heralded_state_via_operators(&e1, &e2, d1, d2).map_err(|e| e.to_string())?;
        let closed = heralded_state(&e1, &e2, d2 - d1).map_err(|e| e.to_string())?;
        for (x, y) in via_ops
            .state
            .amplitudes()
            .iter()
            .zip(closed.state.amplitudes())
        {
            amp_err = amp_err.max((x - y).norm());
        }
        let v = visibility(&e1, &e2);
        g2_err = g2_err.max((via_ops.g2 - 2.0 * (1.0 + v * (d2 - d1).cos())).abs());
    }
    check(
        amp_err < 1e-12 && g2_err < 1e-12,
        format!("max amplitude deviation {amp_err:.2e}, max G2 deviation {g2_err:.2e}"),
    )
}

fn extrema() -> Outcome {
    // 200 phases with step 2 pi / 200 contain both cos = 1 and cos = -1.
    let deltas: Vec<f64> = (0..200).map(|i| TAU * i as f64 / 200.0).collect();
    let vs: Vec<f64> = (0..200).map(|j| j as f64 / 199.0).collect();
    let (mut min_err, mut max_err) = (0.0f64, 0.0f64);
    let mut singular = 0;
    for &v in &vs {
        let values: Vec<f64> = deltas
            .iter()
            .filter_map(|&d| match concurrence_analytic(d, v) {
                Ok(c) => Some(Ok(c)),
                Err(HeraldError::ZeroProbabilityHerald { .. }) => {
                    singular += 1;
                    None
                }
                Err(e) => Some(Err(e.to_string())),
            })
            .collect::<Result<_, _>>()?;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        min_err = min_err.max((lo - (1.0 - v) / (1.0 + v)).abs());
        // At V = 1 the maximum sits on the excluded singular point.
        if v < 1.0 {
            max_err = max_err.max((hi - 1.0).abs());
        }
    }
    check(
        min_err < 1e-9 && max_err < 1e-9 && singular == 1,
        format!("min-curve error {min_err:.2e}, max-curve error {max_err:.2e}, singular points {singular}"),
    )
}

fn malus_law() -> Outcome {
    let fixed = PolarizerSpec::Linear { angle: 0.0 }.jones();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let alpha = FRAC_PI_2 * i as f64 / 99.0;
        let rotated = PolarizerSpec::Linear { angle: alpha }.jones();
        let out = heralded_state(&fixed, &rotated, FRAC_PI_2).map_err(|e| e.to_string())?;
        let c = concurrence_pure(&out.state).map_err(|e| e.to_string())?;
        worst = worst.max((c - alpha.sin().powi(2)).abs());
    }
    check(
        worst < 1e-12,
        format!("max |C - sin^2 alpha| = {worst:.2e} over 100 angles"),
    )
}

fn wootters() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_pure = 0.0f64;
    for _ in 0..10_000 {
        let psi =
            TwoQubitPure::normalized_from(std::array::from_fn(|_| gaussian(&mut rng))).unwrap();
        let rho = psi.projector().map_err(|e| e.to_string())?;
        let c = concurrence_mixed(&rho).map_err(|e| e.to_string())?;
        worst_pure = worst_pure.max((c - concurrence_pure(&psi).unwrap()).abs());
    }
    let s = 0.5f64.sqrt();
    let singlet = TwoQubitPure::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    )
    .unwrap()
    .projector()
    .unwrap();
    let mut worst_werner = 0.0f64;
    for p in [0.0, 0.25, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let rho: DensityMatrix4 = singlet
            .mix(&DensityMatrix4::maximally_mixed(), p)
            .map_err(|e| e.to_string())?;
        let c = concurrence_mixed(&rho).map_err(|e| e.to_string())?;
        worst_werner = worst_werner.max((c - f64::max(0.0, (3.0 * p - 1.0) / 2.0)).abs());
    }
    check(
        worst_pure < 1e-10 && worst_werner < 1e-10,
        format!("rank-1 max deviation {worst_pure:.2e}, Werner max deviation {worst_werner:.2e}"),
    )
}

fn scan_grids() -> (Vec<f64>, Vec<f64>) {
    let deltas = (0..21).map(|i| -FRAC_PI_2 + PI * i as f64 / 20.0).collect();
    (deltas, vec![0.0, 0.25, 0.5, 0.75, 1.0])
}

fn error_bound() -> Outcome {
    let cfg = ExperimentConfig::reference_setup();
    let (deltas, vs) = scan_grids();
    let start = Instant::now();
    let table =
        delta_c_scan(&cfg, &QuadratureSpec::default(), &deltas, &vs).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        table.max_delta_c <= 0.03
            && table.min_fidelity >= 0.95
            && elapsed < Duration::from_secs(300),
        format!(
            "max dC = {:.4e}, min F = {:.6} over {} points in {elapsed:.2?}",
            table.max_delta_c,
            table.min_fidelity,
            table.rows.len()
        ),
    )
}

fn quadrature_convergence() -> Outcome {
    let base = ExperimentConfig::reference_setup();
    let quad = QuadratureSpec::default();
    let mut worst = 0.0f64;
    // The nominal setup and the worst point of the error-bound scan.
    for (delta, v) in [(0.0, 1.0), (0.0, 0.5), (FRAC_PI_2, 0.25), (-FRAC_PI_2, 0.0)] {
        let cfg = realize_setpoint(&base, delta, v).map_err(|e| e.to_string())?;
        let coarse = generated_state(&cfg, &quad).map_err(|e| e.to_string())?;
        let fine = generated_state(&cfg, &quad.doubled()).map_err(|e| e.to_string())?;
        worst = worst.max((coarse.delta_c - fine.delta_c).abs());
    }
    check(worst < 1e-3, format!("max |dC(2N) - dC(N)| = {worst:.2e}"))
}

fn count_rate_magnitude() -> Outcome {
    let cfg = ExperimentConfig::reference_setup();
    let v = visibility(
        &cfg.detector1.polarizer.jones(),
        &cfg.detector2.polarizer.jones(),
    );
    let rate = count_rate(&cfg, v, 0.0);
    let ratio = rate.corrected / rate.raw;
    check(
        (0.1..=10.0).contains(&rate.raw) && (ratio - 0.09).abs() < 1e-15,
        format!(
            "raw {:.4} /s, corrected {:.4} /s, ratio {ratio:.15}",
            rate.raw, rate.corrected
        ),
    )
}

fn degenerate_limits() -> Outcome {
    let mut base = ExperimentConfig::reference_setup();
    base.trap.confinement = 0.0;
    for d in [&mut base.detector1, &mut base.detector2] {
        d.alpha_d = 0.0;
        d.phi_d = 0.0;
    }
    let (deltas, vs) = scan_grids();
    let table =
        delta_c_scan(&base, &QuadratureSpec::default(), &deltas, &vs).map_err(|e| e.to_string())?;
    let fid_err = table
        .rows
        .iter()
        .map(|r| (r.fidelity - 1.0).abs())
        .fold(0.0, f64::max);
    let ideal_ok = table.max_delta_c < 1e-12 && fid_err < 1e-12;

    let e = PolarizerSpec::Linear { angle: 0.3 }.jones();
    let analytic = concurrence_analytic(PI, 1.0);
    let state = heralded_state(&e, &e, PI);
    let singular_cfg = realize_setpoint(&base, PI, 1.0).map_err(|e| e.to_string())?;
    let integrated = generated_state(&singular_cfg, &QuadratureSpec::default());
    let zero =
        |r: Result<(), HeraldError>| matches!(r, Err(HeraldError::ZeroProbabilityHerald { .. }));
    let singular_ok =
        zero(analytic.map(|_| ())) && zero(state.map(|_| ())) && zero(integrated.map(|_| ()));
    check(
        ideal_ok && singular_ok,
        format!(
            "ideal max dC = {:.2e}, max |1 - F| = {fid_err:.2e}; singular input rejected: {singular_ok}",
            table.max_delta_c
        ),
    )
}

fn deterministic_csv() -> Outcome {
    let scenario = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scan.toml");
    let dir = std::env::temp_dir().join(format!("lambda-herald-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.join(format!("run{run}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_lambda-herald"))
            .arg("uncertainty")
            .arg("--config")
            .arg(&scenario)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!(
                "run {run} failed: {}",
                String::from_utf8_lossy(&status.stderr)
            ));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(
        outputs[0] == outputs[1] && !outputs[0].is_empty(),
        format!(
            "two runs, {} bytes each, identical: {}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "analytic vs constructed concurrence",
            analytic_equals_constructed,
        ),
        ("operator construction oracle", operator_oracle),
        ("concurrence extrema", extrema),
        ("Malus-law analog", malus_law),
        ("Wootters consistency", wootters),
        ("realistic error bound", error_bound),
        ("quadrature convergence", quadrature_convergence),
        ("count rate magnitude", count_rate_magnitude),
        ("degenerate limits", degenerate_limits),
        ("CSV determinism", deterministic_csv),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
