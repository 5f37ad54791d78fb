use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use lambda_herald::geometry::{
    farfield_phase, fiber_phase, reduce_phase, AtomPairLayout, FiberChannel,
};
use lambda_herald::herald::{
    accidental_fraction, count_rate, delta_c_scan, generated_state, generated_state_monte_carlo,
    realize_setpoint, ExperimentConfig, QuadratureSpec, ScanRow,
};
use lambda_herald::optics::{
    concurrence_analytic, heralded_state, heralded_state_via_operators, visibility, JonesVector,
    PolarizerSpec,
};
use lambda_herald::qcore::concurrence_pure;
use lambda_herald::HeraldError;
use num_complex::Complex64;

use crate::grid::Grid;
use crate::output::{fmt_f64, CsvTable};
use crate::scenario::{ScenarioFile, SchemeKey, TrapIntegrationKey};
use crate::UsageError;

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn scenario(&self) -> anyhow::Result<Option<ScenarioFile>> {
        self.config.as_deref().map(ScenarioFile::load).transpose()
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct QuadratureArgs {
    /// Node counts as `THETA,CHI,TRAP`.
    #[arg(long, value_name = "THETA,CHI,TRAP")]
    pub quadrature: Option<String>,
    #[arg(long)]
    pub points_theta: Option<usize>,
    #[arg(long)]
    pub points_chi: Option<usize>,
    #[arg(long)]
    pub points_trap: Option<usize>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeKey>,
    #[arg(long, value_enum)]
    pub trap_integration: Option<TrapIntegrationKey>,
    /// Trap Gaussian truncation in standard deviations.
    #[arg(long)]
    pub trap_truncation: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ScenarioOverrides {
    #[arg(long)]
    pub separation_um: Option<f64>,
    #[arg(long)]
    pub wavelength_nm: Option<f64>,
    #[arg(long)]
    pub confinement_nm: Option<f64>,
    /// Azimuthal extent of both detectors.
    #[arg(long)]
    pub alpha_mrad: Option<f64>,
    /// Polar extent of both detectors.
    #[arg(long)]
    pub phi_rad: Option<f64>,
    #[arg(long)]
    pub repetition_rate_mhz: Option<f64>,
    #[arg(long)]
    pub efficiency: Option<f64>,
    #[arg(long)]
    pub dark_count_rate_hz: Option<f64>,
    #[arg(long)]
    pub coincidence_window_ns: Option<f64>,
    /// Target phase differences (comma separated list, radians).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub delta21: Option<Vec<f64>>,
    /// Target visibilities (comma separated list).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub v12: Option<Vec<f64>>,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
}

impl ScenarioOverrides {
    fn apply(&self, s: &mut ScenarioFile) -> anyhow::Result<()> {
        if let Some(v) = self.separation_um {
            s.layout.separation_um = v;
        }
        if let Some(v) = self.wavelength_nm {
            s.layout.wavelength_nm = v;
        }
        if let Some(v) = self.confinement_nm {
            s.trap.confinement_nm = v;
            s.sweep.confinement_nm = None;
        }
        if let Some(v) = self.alpha_mrad {
            s.detector1.alpha_mrad = v;
            s.detector2.alpha_mrad = v;
            s.sweep.alpha_d_mrad = None;
        }
        if let Some(v) = self.phi_rad {
            s.detector1.phi_rad = v;
            s.detector2.phi_rad = v;
        }
        if let Some(v) = self.repetition_rate_mhz {
            s.rates.repetition_rate_mhz = v;
        }
        if let Some(v) = self.efficiency {
            s.rates.detector_efficiency = v;
        }
        if let Some(v) = self.dark_count_rate_hz {
            s.rates.dark_count_rate_hz = v;
        }
        if let Some(v) = self.coincidence_window_ns {
            s.rates.coincidence_window_ns = v;
        }
        if let Some(v) = &self.delta21 {
            s.sweep.delta21_rad = Some(Grid::values(v.clone()));
        }
        if let Some(v) = &self.v12 {
            s.sweep.v12 = Some(Grid::values(v.clone()));
        }
        let q = &self.quadrature;
        if let Some(text) = &q.quadrature {
            let counts: Vec<usize> = text
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| {
                    UsageError::new(format!("--quadrature expects THETA,CHI,TRAP, got {text:?}"))
                })?;
            let [t, c, u] = counts[..] else {
                bail!(UsageError::new(format!(
                    "--quadrature expects three counts, got {text:?}"
                )));
            };
            s.quadrature.points_theta = t;
            s.quadrature.points_chi = c;
            s.quadrature.points_trap = u;
        }
        if let Some(v) = q.points_theta {
            s.quadrature.points_theta = v;
        }
        if let Some(v) = q.points_chi {
            s.quadrature.points_chi = v;
        }
        if let Some(v) = q.points_trap {
            s.quadrature.points_trap = v;
        }
        if let Some(v) = q.scheme {
            s.quadrature.scheme = v;
        }
        if let Some(v) = q.trap_integration {
            s.quadrature.trap_integration = v;
        }
        if let Some(v) = q.trap_truncation {
            s.quadrature.trap_truncation_sigma = v;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- surface

#[derive(Args, Debug, Clone)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub delta_points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub v_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v_max: Option<f64>,
    #[arg(long)]
    pub v_points: Option<usize>,
}

/// Flag values override the scenario grid, which overrides the defaults.
fn range_grid(
    from_file: Option<&Grid>,
    min: Option<f64>,
    max: Option<f64>,
    points: Option<usize>,
    default: (f64, f64, usize),
) -> Grid {
    if min.is_none() && max.is_none() && points.is_none() {
        if let Some(g) = from_file {
            return g.clone();
        }
    }
    Grid::linspace(
        min.unwrap_or(default.0),
        max.unwrap_or(default.1),
        points.unwrap_or(default.2),
    )
}

pub fn surface(args: &SurfaceArgs) -> anyhow::Result<()> {
    let scenario = args.common.scenario()?;
    let sweep = scenario.as_ref().map(|s| &s.sweep);
    let deltas = range_grid(
        sweep.and_then(|s| s.delta21_rad.as_ref()),
        args.delta_min,
        args.delta_max,
        args.delta_points,
        (0.0, TAU, 101),
    )
    .resolve("delta21")?;
    let vs = range_grid(
        sweep.and_then(|s| s.v12.as_ref()),
        args.v_min,
        args.v_max,
        args.v_points,
        (0.0, 1.0, 101),
    )
    .resolve_within("v12", 0.0, 1.0)?;

    let mut table = CsvTable::new(&["delta21", "v12", "concurrence", "singular"]);
    for &d in &deltas {
        for &v in &vs {
            let (value, flag) = match concurrence_analytic(d, v) {
                Ok(c) => (fmt_f64(c), "0"),
                Err(HeraldError::ZeroProbabilityHerald { .. }) => (String::new(), "1"),
                Err(e) => return Err(e.into()),
            };
            table.row(&[fmt_f64(d), fmt_f64(v), value, flag.to_string()]);
        }
    }
    table.emit(args.common.out.as_deref())
}

// ------------------------------------------------------------------ state

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Polarizer at detector 1: `linear:<rad>`, `circular:+`, `circular:-`
    /// or `jones:<re+>,<im+>,<re->,<im->`.
    #[arg(long)]
    pub pol1: Option<String>,
    /// Polarizer at detector 2, same syntax as `--pol1`.
    #[arg(long)]
    pub pol2: Option<String>,
    /// Phase difference delta2 - delta1 (radians).
    #[arg(long, allow_negative_numbers = true)]
    pub delta21: Option<f64>,
    /// Fiber path lengths to detector 1 as `W_A,W_B` in micrometres.
    #[arg(long, value_name = "W_A,W_B")]
    pub fiber1_um: Option<String>,
    /// Fiber path lengths to detector 2 as `W_A,W_B` in micrometres.
    #[arg(long, value_name = "W_A,W_B")]
    pub fiber2_um: Option<String>,
    /// Wavelength for the fiber phases when no scenario is given.
    #[arg(long, default_value_t = 650.0)]
    pub wavelength_nm: f64,
}

pub fn parse_polarizer(text: &str) -> anyhow::Result<PolarizerSpec> {
    let bad = || UsageError::new(format!("cannot parse polarizer {text:?}"));
    let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
    Ok(match kind.trim() {
        "linear" => PolarizerSpec::Linear {
            angle: rest.trim().parse().map_err(|_| bad())?,
        },
        "circular" => match rest.trim() {
            "+" => PolarizerSpec::Circular(lambda_herald::optics::Handedness::Plus),
            "-" => PolarizerSpec::Circular(lambda_herald::optics::Handedness::Minus),
            _ => bail!(bad()),
        },
        "jones" => {
            let v: Vec<f64> = rest
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?;
            let [pr, pi, mr, mi] = v[..] else {
                bail!(bad())
            };
            PolarizerSpec::General(
                JonesVector::normalized(Complex64::new(pr, pi), Complex64::new(mr, mi))
                    .map_err(|e| UsageError::new(e.to_string()))?,
            )
        }
        _ => bail!(bad()),
    })
}

fn parse_fiber(text: &str) -> anyhow::Result<FiberChannel> {
    let v: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError::new(format!("cannot parse fiber lengths {text:?}")))?;
    let [a, b] = v[..] else {
        bail!(UsageError::new(format!(
            "fiber lengths need two values, got {text:?}"
        )));
    };
    FiberChannel::new(a * 1e-6, b * 1e-6).map_err(|e| UsageError::new(e.to_string()).into())
}

pub fn state(args: &StateArgs) -> anyhow::Result<()> {
    let scenario = args.common.scenario()?;
    let config = scenario.as_ref().map(|s| s.experiment()).transpose()?;
    let polarizer = |flag: &Option<String>, from_cfg: Option<PolarizerSpec>, name: &str| match flag
    {
        Some(t) => parse_polarizer(t),
        None => from_cfg
            .ok_or_else(|| UsageError::new(format!("--{name} or --config is required")).into()),
    };
    let p1 = polarizer(&args.pol1, config.map(|c| c.detector1.polarizer), "pol1")?;
    let p2 = polarizer(&args.pol2, config.map(|c| c.detector2.polarizer), "pol2")?;

    let delta21 = match (&args.delta21, &args.fiber1_um, &args.fiber2_um) {
        (Some(d), None, None) => *d,
        (None, Some(f1), Some(f2)) => {
            let layout = match config {
                Some(c) => c.layout,
                None => AtomPairLayout::new(1.0, args.wavelength_nm * 1e-9)
                    .map_err(|e| UsageError::new(e.to_string()))?,
            };
            fiber_phase(&layout, &parse_fiber(f2)?) - fiber_phase(&layout, &parse_fiber(f1)?)
        }
        (None, None, None) => match config {
            Some(c) => {
                farfield_phase(&c.layout, c.detector2.theta_center, c.detector2.chi_center)
                    - farfield_phase(&c.layout, c.detector1.theta_center, c.detector1.chi_center)
            }
            None => bail!(UsageError::new(
                "give --delta21, both --fiber1-um and --fiber2-um, or a --config with detector positions"
            )),
        },
        _ => bail!(UsageError::new(
            "--delta21 and the fiber options are mutually exclusive; fibers need both channels"
        )),
    };
    if !delta21.is_finite() {
        bail!(UsageError::new("delta21 must be finite"));
    }

    let (e1, e2) = (p1.jones(), p2.jones());
    let outcome = heralded_state(&e1, &e2, delta21)?;
    let analytic = concurrence_analytic(delta21, outcome.v12)?;
    let from_state = concurrence_pure(&outcome.state)?;
    let operator_check = heralded_state_via_operators(&e1, &e2, 0.0, delta21)?;
    let names = ["++", "+-", "-+", "--"];

    println!("delta21 (reduced)    {:>+.12} rad", reduce_phase(delta21));
    println!("V12                  {:.12}", outcome.v12);
    println!("G2                   {:.12}", outcome.g2);
    println!("amplitudes:");
    for (name, z) in names.iter().zip(outcome.state.amplitudes()) {
        println!(
            "  |{name}>  {:>+.12} {:>+.12}i   |.| = {:.12}",
            z.re,
            z.im,
            z.norm()
        );
    }
    println!("concurrence (analytic) {analytic:.15}");
    println!("concurrence (state)    {from_state:.15}");
    println!(
        "difference             {:.3e}",
        (analytic - from_state).abs()
    );
    println!(
        "operator construction deviation {:.3e}",
        operator_check.state.distance_up_to_phase(&outcome.state)
    );

    if let Some(path) = &args.common.out {
        let mut header = vec![
            "delta21",
            "v12",
            "g2",
            "concurrence_analytic",
            "concurrence_state",
            "difference",
        ];
        let amp_cols = [
            "pp_re", "pp_im", "pm_re", "pm_im", "mp_re", "mp_im", "mm_re", "mm_im",
        ];
        header.extend(amp_cols);
        let mut table = CsvTable::new(&header);
        let mut row = vec![
            fmt_f64(delta21),
            fmt_f64(outcome.v12),
            fmt_f64(outcome.g2),
            fmt_f64(analytic),
            fmt_f64(from_state),
            fmt_f64((analytic - from_state).abs()),
        ];
        for z in outcome.state.amplitudes() {
            row.push(fmt_f64(z.re));
            row.push(fmt_f64(z.im));
        }
        table.row(&row);
        table.emit(Some(path))?;
    }
    Ok(())
}

// ------------------------------------------------------------ uncertainty

#[derive(Args, Debug, Clone)]
pub struct UncertaintyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub overrides: ScenarioOverrides,
    /// Replace the quadrature by a Monte Carlo estimate with this many samples.
    #[arg(long)]
    pub monte_carlo: Option<usize>,
    /// Seed of the Monte Carlo mode.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

const SCAN_HEADER: [&str; 10] = [
    "confinement_nm",
    "alpha_d_mrad",
    "delta21",
    "v12",
    "theta2",
    "concurrence_target",
    "concurrence_generated",
    "delta_c",
    "fidelity",
    "heralding_weight",
];

struct Evaluated {
    confinement_nm: f64,
    alpha_d_mrad: f64,
    row: ScanRow,
}

fn evaluate_point(
    cfg: &ExperimentConfig,
    quad: &QuadratureSpec,
    monte_carlo: Option<(usize, u64)>,
    delta21: f64,
    v12: f64,
    theta2: f64,
) -> anyhow::Result<ScanRow> {
    let report = match monte_carlo {
        Some((n, seed)) => generated_state_monte_carlo(cfg, n, seed)?,
        None => generated_state(cfg, quad)?,
    };
    Ok(ScanRow {
        delta21,
        v12,
        delta_c: report.delta_c,
        fidelity: report.fidelity,
        concurrence_target: report.concurrence_target,
        concurrence_generated: report.concurrence_generated,
        heralding_weight: report.heralding_weight,
        theta2,
    })
}

pub fn uncertainty(args: &UncertaintyArgs) -> anyhow::Result<()> {
    let mut scenario = args
        .common
        .scenario()?
        .unwrap_or_else(ScenarioFile::reference);
    args.overrides.apply(&mut scenario)?;
    let base = scenario.experiment()?;
    let quad = scenario.quadrature_spec()?;
    if args.monte_carlo == Some(0) {
        bail!(UsageError::new("--monte-carlo needs at least one sample"));
    }

    let sweep = &scenario.sweep;
    let mu_grid = match &sweep.confinement_nm {
        Some(g) => g.resolve_within("confinement_nm", 0.0, f64::INFINITY)?,
        None => vec![scenario.trap.confinement_nm],
    };
    let alpha_grid = match &sweep.alpha_d_mrad {
        Some(g) => g.resolve_within("alpha_d_mrad", 0.0, f64::INFINITY)?,
        None => vec![scenario.detector1.alpha_mrad],
    };
    let delta_grid = sweep
        .delta21_rad
        .as_ref()
        .map(|g| g.resolve("delta21"))
        .transpose()?;
    let v_grid = sweep
        .v12
        .as_ref()
        .map(|g| g.resolve_within("v12", 0.0, 1.0))
        .transpose()?;
    let scanning = delta_grid.is_some() || v_grid.is_some();

    let mut results = Vec::new();
    let mut point_index = 0u64;
    for &mu_nm in &mu_grid {
        for &alpha_mrad in &alpha_grid {
            let mut cfg = base;
            cfg.trap.confinement = mu_nm * 1e-9;
            cfg.detector1.alpha_d = alpha_mrad * 1e-3;
            cfg.detector2.alpha_d = alpha_mrad * 1e-3;
            cfg.validate().map_err(|e| UsageError::new(e.to_string()))?;
            let rows: Vec<ScanRow> = if scanning {
                let deltas = delta_grid
                    .clone()
                    .unwrap_or_else(|| vec![cfg.nominal_delta21()]);
                let nominal_v = visibility(
                    &cfg.detector1.polarizer.jones(),
                    &cfg.detector2.polarizer.jones(),
                );
                let vs = v_grid.clone().unwrap_or_else(|| vec![nominal_v]);
                match args.monte_carlo {
                    None => {
                        delta_c_scan(&cfg, &quad, &deltas, &vs)
                            .context("uncertainty scan")?
                            .rows
                    }
                    Some(n) => {
                        let mut rows = Vec::new();
                        for &d in &deltas {
                            for &v in &vs {
                                let point = realize_setpoint(&cfg, d, v).map_err(|e| {
                                    UsageError::new(format!("setpoint ({d}, {v}): {e}"))
                                })?;
                                let seed = args.seed.wrapping_add(point_index);
                                point_index += 1;
                                rows.push(evaluate_point(
                                    &point,
                                    &quad,
                                    Some((n, seed)),
                                    d,
                                    v,
                                    point.detector2.theta_center,
                                )?);
                            }
                        }
                        rows
                    }
                }
            } else {
                let v = visibility(
                    &cfg.detector1.polarizer.jones(),
                    &cfg.detector2.polarizer.jones(),
                );
                let seed = args.seed.wrapping_add(point_index);
                point_index += 1;
                vec![evaluate_point(
                    &cfg,
                    &quad,
                    args.monte_carlo.map(|n| (n, seed)),
                    cfg.nominal_delta21(),
                    v,
                    cfg.detector2.theta_center,
                )?]
            };
            results.extend(rows.into_iter().map(|row| Evaluated {
                confinement_nm: mu_nm,
                alpha_d_mrad: alpha_mrad,
                row,
            }));
        }
    }

    print_uncertainty_report(&base, &results, args.monte_carlo);

    if let Some(path) = &args.common.out {
        let mut table = CsvTable::new(&SCAN_HEADER);
        for e in &results {
            let r = &e.row;
            table.row(&[
                fmt_f64(e.confinement_nm),
                fmt_f64(e.alpha_d_mrad),
                fmt_f64(r.delta21),
                fmt_f64(r.v12),
                fmt_f64(r.theta2),
                fmt_f64(r.concurrence_target),
                fmt_f64(r.concurrence_generated),
                fmt_f64(r.delta_c),
                fmt_f64(r.fidelity),
                fmt_f64(r.heralding_weight),
            ]);
        }
        table.emit(Some(path))?;
    }
    Ok(())
}

fn print_uncertainty_report(
    base: &ExperimentConfig,
    results: &[Evaluated],
    monte_carlo: Option<usize>,
) {
    let method = match monte_carlo {
        Some(n) => format!("Monte Carlo, {n} samples"),
        None => "quadrature".to_string(),
    };
    println!("integration          {method}");
    println!("grid points          {}", results.len());
    if let [single] = results {
        let r = &single.row;
        println!("delta21              {:+.9} rad", r.delta21);
        println!("V12                  {:.9}", r.v12);
        println!("concurrence target   {:.9}", r.concurrence_target);
        println!("concurrence real     {:.9}", r.concurrence_generated);
        println!("delta C              {:.6e}", r.delta_c);
        println!("fidelity             {:.9}", r.fidelity);
        println!("heralding weight     {:.6e}", r.heralding_weight);
    } else if let Some(worst) = results
        .iter()
        .max_by(|a, b| a.row.delta_c.total_cmp(&b.row.delta_c))
    {
        let min_f = results.iter().map(|e| e.row.fidelity).fold(1.0, f64::min);
        println!(
            "max delta C          {:.6e}  (delta21 = {:+.6}, V12 = {:.4}, mu = {} nm, alpha_D = {} mrad)",
            worst.row.delta_c, worst.row.delta21, worst.row.v12, worst.confinement_nm, worst.alpha_d_mrad
        );
        println!("min fidelity         {min_f:.9}");
    }

    let v = visibility(
        &base.detector1.polarizer.jones(),
        &base.detector2.polarizer.jones(),
    );
    let nominal = count_rate(base, v, base.nominal_delta21());
    let constructive = count_rate(base, v, 0.0);
    println!(
        "count rate (nominal)        raw {:.4} /s, with efficiency {:.4} /s",
        nominal.raw, nominal.corrected
    );
    println!(
        "count rate (delta21 = 0)    raw {:.4} /s, with efficiency {:.4} /s",
        constructive.raw, constructive.corrected
    );
    println!(
        "accidental fraction         {:.3e}",
        accidental_fraction(base, nominal.corrected)
    );
}

// ------------------------------------------------------------------ malus

#[derive(Args, Debug, Clone)]
pub struct MalusArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Phase difference; must be an odd multiple of pi/2.
    #[arg(long, default_value_t = FRAC_PI_2, allow_negative_numbers = true)]
    pub delta21: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_points: Option<usize>,
}

pub fn malus(args: &MalusArgs) -> anyhow::Result<()> {
    if !args.delta21.is_finite() || args.delta21.cos().abs() > 1e-9 {
        bail!(UsageError::new(format!(
            "delta21 = {} is not an odd multiple of pi/2",
            args.delta21
        )));
    }
    let scenario = args.common.scenario()?;
    let alphas = range_grid(
        scenario.as_ref().and_then(|s| s.sweep.alpha_rad.as_ref()),
        args.alpha_min,
        args.alpha_max,
        args.alpha_points,
        (0.0, FRAC_PI_2, 91),
    )
    .resolve("alpha")?;
    let fixed = PolarizerSpec::Linear { angle: 0.0 }.jones();
    let mut table = CsvTable::new(&["alpha", "v12", "concurrence", "sin2_alpha", "difference"]);
    for &alpha in &alphas {
        let v = visibility(&fixed, &PolarizerSpec::Linear { angle: alpha }.jones());
        let c = concurrence_analytic(args.delta21, v)?;
        let malus = alpha.sin().powi(2);
        table.row(&[
            fmt_f64(alpha),
            fmt_f64(v),
            fmt_f64(c),
            fmt_f64(malus),
            fmt_f64((c - malus).abs()),
        ]);
    }
    table.emit(args.common.out.as_deref())
}

// --------------------------------------------------------------- scenario

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub overrides: ScenarioOverrides,
}

pub fn scenario(args: &ScenarioArgs) -> anyhow::Result<()> {
    let mut scenario = args
        .common
        .scenario()?
        .unwrap_or_else(ScenarioFile::reference);
    args.overrides.apply(&mut scenario)?;
    scenario.experiment()?;
    scenario.quadrature_spec()?;
    let text = scenario.to_toml()?;
    match &args.common.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
