//! Count rates and the state actually produced by a realistic setup.
//!
//! The generated state is the post-selected ensemble average over everything
//! that smears the interference phase: the angular extent of both detector
//! patches and the position spread of the atoms in their traps. Each
//! configuration contributes `G2 * |psi><psi|`, i.e. the unnormalized
//! two-photon amplitude outer product, weighted by its geometric and
//! statistical measure; the sum is then normalized to unit trace.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nalgebra::{Matrix4, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{invalid, HeraldError, Result};
use crate::geometry::{farfield_phase, AtomPairLayout, DetectorPatch, TrapModel};
use crate::optics::{heralded_state, PolarizerSpec, TwoPhotonAmplitudes};
use crate::qcore::{
    concurrence_mixed, concurrence_pure, fidelity_pure_target, DensityMatrix4, TwoQubitPure,
};
use crate::quadrature::{Rule, Scheme};

/// Full physical scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub layout: AtomPairLayout,
    pub trap: TrapModel,
    pub detector1: DetectorPatch,
    pub detector2: DetectorPatch,
    /// Excitation repetition rate, 1/s.
    pub repetition_rate: f64,
    pub detector_efficiency: f64,
    /// Dark counts per detector, 1/s.
    pub dark_count_rate: f64,
    /// Coincidence window, s.
    pub coincidence_window: f64,
}

impl ExperimentConfig {
    /// d = 5 um, lambda = 650 nm, mu = 10 nm, 5 mrad x pi/6 patches centred on
    /// theta = pi/2 in adjacent chi strips, parallel linear polarizers,
    /// r = 5 MHz, 30 % efficiency, 100 Hz dark counts, 10 ns window.
    pub fn reference_setup() -> Self {
        let phi_d = PI / 6.0;
        let pol = PolarizerSpec::Linear { angle: 0.0 };
        let patch = |chi| DetectorPatch {
            theta_center: FRAC_PI_2,
            chi_center: chi,
            alpha_d: 5e-3,
            phi_d,
            polarizer: pol,
        };
        Self {
            layout: AtomPairLayout::new(5e-6, 650e-9).expect("valid layout"),
            trap: TrapModel { confinement: 10e-9 },
            detector1: patch(-phi_d / 2.0),
            detector2: patch(phi_d / 2.0),
            repetition_rate: 5e6,
            detector_efficiency: 0.3,
            dark_count_rate: 100.0,
            coincidence_window: 10e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.detector1.validate()?;
        self.detector2.validate()?;
        if !(self.trap.confinement >= 0.0) || !self.trap.confinement.is_finite() {
            return invalid("trap confinement must be >= 0");
        }
        for (name, v) in [
            ("repetition rate", self.repetition_rate),
            ("dark count rate", self.dark_count_rate),
            ("coincidence window", self.coincidence_window),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return invalid(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.detector_efficiency) {
            return invalid(format!(
                "detector efficiency {} outside [0, 1]",
                self.detector_efficiency
            ));
        }
        Ok(())
    }

    /// Phase difference between the detector centres with the atoms at rest.
    pub fn nominal_delta21(&self) -> f64 {
        farfield_phase(
            &self.layout,
            self.detector2.theta_center,
            self.detector2.chi_center,
        ) - farfield_phase(
            &self.layout,
            self.detector1.theta_center,
            self.detector1.chi_center,
        )
    }
}

/// How the trap displacements are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrapIntegration {
    /// Over the relative displacement `u_B - u_A` (3 dims, std `mu sqrt 2`).
    #[default]
    Difference,
    /// Over both displacements independently (6 dims, std `mu`).
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub points_theta: usize,
    pub points_chi: usize,
    /// Nodes per trap dimension.
    pub points_trap: usize,
    pub scheme: Scheme,
    /// Trap Gaussian is truncated at this many standard deviations.
    pub trap_truncation: f64,
    pub trap_integration: TrapIntegration,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points_theta: 8,
            points_chi: 4,
            // Gauss-Legendre over +-5 sigma resolves the Gaussian variance to
            // ~1e-3 with 12 nodes (9 % error with 8)
            points_trap: 12,
            scheme: Scheme::GaussLegendre,
            trap_truncation: 5.0,
            trap_integration: TrapIntegration::Difference,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points_theta == 0 || self.points_chi == 0 || self.points_trap == 0 {
            return invalid("quadrature point counts must be >= 1");
        }
        if !(self.trap_truncation > 0.0) || !self.trap_truncation.is_finite() {
            return invalid("trap truncation must be positive");
        }
        Ok(())
    }

    /// Same rule with every node count doubled.
    pub fn doubled(&self) -> Self {
        Self {
            points_theta: 2 * self.points_theta,
            points_chi: 2 * self.points_chi,
            points_trap: 2 * self.points_trap,
            ..*self
        }
    }
}

/// Result of integrating the heralded projector over the setup's uncertainties.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyReport {
    pub rho_generated: DensityMatrix4,
    pub target_state: TwoQubitPure,
    pub concurrence_target: f64,
    pub concurrence_generated: f64,
    pub delta_c: f64,
    pub fidelity: f64,
    /// Integrated `G2` over both patches (sphere measure), trap-averaged.
    pub heralding_weight: f64,
    pub nominal_delta21: f64,
    pub v12: f64,
}

/// Single-photon detection probability `alpha_D phi_D / 4 pi` of one patch.
pub fn detection_probability(patch: &DetectorPatch) -> f64 {
    if patch.alpha_d >= 0.1 {
        log::warn!(
            "alpha_D = {} rad is outside the small-patch regime of the solid-angle estimate",
            patch.alpha_d
        );
    }
    patch.alpha_d * patch.phi_d / (4.0 * PI)
}

/// Two-photon herald rate with and without detector efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRate {
    /// `2 r P1 P2 G2`.
    pub raw: f64,
    /// `2 r (eta P1)(eta P2) G2`.
    pub corrected: f64,
}

pub fn count_rate(config: &ExperimentConfig, v12: f64, delta21: f64) -> CountRate {
    let p1 = detection_probability(&config.detector1);
    let p2 = detection_probability(&config.detector2);
    let raw = 2.0 * config.repetition_rate * p1 * p2 * crate::optics::g2(delta21, v12);
    let eta = config.detector_efficiency;
    CountRate {
        raw,
        corrected: raw * eta * eta,
    }
}

/// Fraction of heralds that are accidental coincidences involving a dark count.
///
/// Approximation: `R_acc = 2 D S tau + D^2 tau` with `D` the dark-count rate,
/// `tau` the coincidence window and `S = 2 r eta P` the photon click rate of one
/// detector (two photons per shot, each reaching it with probability `P`).
pub fn accidental_fraction(config: &ExperimentConfig, true_rate: f64) -> f64 {
    let dark = config.dark_count_rate;
    let window = config.coincidence_window;
    let p =
        0.5 * (detection_probability(&config.detector1) + detection_probability(&config.detector2));
    let singles = 2.0 * config.repetition_rate * config.detector_efficiency * p;
    let accidental = 2.0 * dark * singles * window + dark * dark * window;
    let total = accidental + true_rate.max(0.0);
    if total > 0.0 {
        accidental / total
    } else {
        0.0
    }
}

/// Detection direction of one quadrature node and its sphere measure.
#[derive(Debug, Clone, Copy)]
struct PatchNode {
    direction: Vector3<f64>,
    phase: f64,
    weight: f64,
}

fn patch_nodes(
    layout: &AtomPairLayout,
    patch: &DetectorPatch,
    quad: &QuadratureSpec,
) -> Vec<PatchNode> {
    let axis_nodes = |center: f64, extent: f64, n: usize| -> Vec<(f64, f64)> {
        if extent == 0.0 {
            // point-like in this direction: a delta of unit weight
            vec![(center, 1.0)]
        } else {
            Rule::new(quad.scheme, n)
                .mapped(center, extent / 2.0)
                .collect()
        }
    };
    let thetas = axis_nodes(patch.theta_center, patch.alpha_d, quad.points_theta);
    let chis = axis_nodes(patch.chi_center, patch.phi_d, quad.points_chi);
    let mut nodes = Vec::with_capacity(thetas.len() * chis.len());
    for &(theta, wt) in &thetas {
        for &(chi, wc) in &chis {
            nodes.push(PatchNode {
                direction: layout.direction(theta, chi),
                phase: farfield_phase(layout, theta, chi),
                weight: wt * wc * chi.cos(),
            });
        }
    }
    nodes
}

/// Relative displacement `u_B - u_A` with its probability weight.
#[derive(Debug, Clone, Copy)]
struct TrapNode {
    relative: Vector3<f64>,
    weight: f64,
}

/// Truncated-Gaussian rule for one Cartesian axis; weights sum to one.
fn gaussian_axis(sigma: f64, quad: &QuadratureSpec) -> Vec<(f64, f64)> {
    let rule = Rule::new(quad.scheme, quad.points_trap);
    let half = quad.trap_truncation * sigma;
    let raw: Vec<(f64, f64)> = rule
        .mapped(0.0, half)
        .map(|(x, w)| (x, w * (-0.5 * (x / sigma).powi(2)).exp()))
        .collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    raw.into_iter().map(|(x, w)| (x, w / total)).collect()
}

fn trap_nodes(trap: &TrapModel, quad: &QuadratureSpec) -> Vec<TrapNode> {
    let mu = trap.confinement;
    if mu == 0.0 {
        return vec![TrapNode {
            relative: Vector3::zeros(),
            weight: 1.0,
        }];
    }
    match quad.trap_integration {
        TrapIntegration::Difference => {
            let axis = gaussian_axis(mu * SQRT_2, quad);
            let mut nodes = Vec::with_capacity(axis.len().pow(3));
            for &(x, wx) in &axis {
                for &(y, wy) in &axis {
                    for &(z, wz) in &axis {
                        nodes.push(TrapNode {
                            relative: Vector3::new(x, y, z),
                            weight: wx * wy * wz,
                        });
                    }
                }
            }
            nodes
        }
        TrapIntegration::Full => {
            let axis = gaussian_axis(mu, quad);
            let mut per_atom = Vec::with_capacity(axis.len().pow(3));
            for &(x, wx) in &axis {
                for &(y, wy) in &axis {
                    for &(z, wz) in &axis {
                        per_atom.push((Vector3::new(x, y, z), wx * wy * wz));
                    }
                }
            }
            let mut nodes = Vec::with_capacity(per_atom.len().pow(2));
            for (ua, wa) in &per_atom {
                for (ub, wb) in &per_atom {
                    nodes.push(TrapNode {
                        relative: ub - ua,
                        weight: wa * wb,
                    });
                }
            }
            nodes
        }
    }
}

/// Running sum of `weight * |phi><phi|` (upper triangle only).
#[derive(Debug, Clone, Copy)]
struct ProjectorSum {
    upper: [[Complex64; 4]; 4],
}

impl ProjectorSum {
    fn zero() -> Self {
        Self {
            upper: [[Complex64::new(0.0, 0.0); 4]; 4],
        }
    }

    #[inline]
    fn add(&mut self, phi: &[Complex64; 4], weight: f64) {
        for i in 0..4 {
            let wi = phi[i] * weight;
            for (j, pj) in phi.iter().enumerate().skip(i) {
                self.upper[i][j] += wi * pj.conj();
            }
        }
    }

    fn merge(&mut self, other: &ProjectorSum) {
        for i in 0..4 {
            for j in i..4 {
                self.upper[i][j] += other.upper[i][j];
            }
        }
    }

    fn trace(&self) -> f64 {
        (0..4).map(|i| self.upper[i][i].re).sum()
    }

    /// Normalized Hermitian matrix; the diagonal is forced real.
    fn normalized(&self) -> Matrix4<Complex64> {
        let t = self.trace();
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            m[(i, i)] = Complex64::new(self.upper[i][i].re / t, 0.0);
            for j in (i + 1)..4 {
                let z = self.upper[i][j] / t;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }
}

fn finish_report(
    config: &ExperimentConfig,
    sum: &ProjectorSum,
    target: &crate::optics::HeraldedOutcome,
) -> Result<UncertaintyReport> {
    let heralding_weight = sum.trace();
    if !(heralding_weight > 0.0) || !heralding_weight.is_finite() {
        return Err(HeraldError::ZeroProbabilityHerald {
            g2: heralding_weight,
        });
    }
    let rho = DensityMatrix4::new(sum.normalized()).map_err(|e| {
        HeraldError::QuadratureFailure(format!("integrated state is not a density matrix: {e}"))
    })?;
    let concurrence_target = concurrence_pure(&target.state)?;
    let concurrence_generated = concurrence_mixed(&rho)?;
    let fidelity = fidelity_pure_target(&rho, &target.state)?;
    Ok(UncertaintyReport {
        rho_generated: rho,
        target_state: target.state,
        concurrence_target,
        concurrence_generated,
        delta_c: (concurrence_generated - concurrence_target).abs(),
        fidelity,
        heralding_weight,
        nominal_delta21: config.nominal_delta21(),
        v12: target.v12,
    })
}

/// Post-selected state of the atoms integrated over both detector patches
/// and the trap position spread, compared against the nominal target.
pub fn generated_state(
    config: &ExperimentConfig,
    quad: &QuadratureSpec,
) -> Result<UncertaintyReport> {
    config.validate()?;
    quad.validate()?;
    let e1 = config.detector1.polarizer.jones();
    let e2 = config.detector2.polarizer.jones();
    let target = heralded_state(&e1, &e2, config.nominal_delta21())?;
    let amps = TwoPhotonAmplitudes::new(&e1, &e2);

    let k = config.layout.wavenumber();
    let nodes1 = patch_nodes(&config.layout, &config.detector1, quad);
    let nodes2 = patch_nodes(&config.layout, &config.detector2, quad);
    let trap = trap_nodes(&config.trap, quad);

    // Parallel over trap nodes; partial sums are merged in node order so the
    // result does not depend on scheduling.
    let partials: Vec<ProjectorSum> = trap
        .par_iter()
        .map(|t| {
            let phases2: Vec<f64> = nodes2
                .iter()
                .map(|n| n.phase + k * t.relative.dot(&n.direction))
                .collect();
            let mut sum = ProjectorSum::zero();
            for n1 in &nodes1 {
                let phase1 = n1.phase + k * t.relative.dot(&n1.direction);
                let w1 = t.weight * n1.weight;
                for (n2, phase2) in nodes2.iter().zip(&phases2) {
                    sum.add(&amps.at(phase2 - phase1), w1 * n2.weight);
                }
            }
            sum
        })
        .collect();
    let mut total = ProjectorSum::zero();
    for p in &partials {
        total.merge(p);
    }
    finish_report(config, &total, &target)
}

/// Monte Carlo estimate of [`generated_state`] for cross-validation.
///
/// Patch points are drawn uniformly in `(theta, chi)` and weighted by the
/// sphere measure; trap displacements are drawn from the untruncated Gaussian.
pub fn generated_state_monte_carlo(
    config: &ExperimentConfig,
    samples: usize,
    seed: u64,
) -> Result<UncertaintyReport> {
    config.validate()?;
    if samples == 0 {
        return invalid("Monte Carlo needs at least one sample");
    }
    let e1 = config.detector1.polarizer.jones();
    let e2 = config.detector2.polarizer.jones();
    let target = heralded_state(&e1, &e2, config.nominal_delta21())?;
    let amps = TwoPhotonAmplitudes::new(&e1, &e2);
    let layout = &config.layout;
    let k = layout.wavenumber();
    let sigma = config.trap.confinement * SQRT_2;
    let normal = Normal::new(0.0, 1.0).map_err(|e| HeraldError::NumericalFailure(e.to_string()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_point = |rng: &mut ChaCha8Rng, patch: &DetectorPatch| -> (Vector3<f64>, f64, f64) {
        let theta = patch.theta_center + patch.alpha_d * (rng.random::<f64>() - 0.5);
        let chi = patch.chi_center + patch.phi_d * (rng.random::<f64>() - 0.5);
        // zero extent is a unit-weight delta, as in the quadrature
        let extent = |x: f64| if x == 0.0 { 1.0 } else { x };
        let area = extent(patch.alpha_d) * extent(patch.phi_d);
        (
            layout.direction(theta, chi),
            farfield_phase(layout, theta, chi),
            area * chi.cos(),
        )
    };
    let mut sum = ProjectorSum::zero();
    for _ in 0..samples {
        let (dir1, phase1, w1) = draw_point(&mut rng, &config.detector1);
        let (dir2, phase2, w2) = draw_point(&mut rng, &config.detector2);
        let relative = Vector3::from_fn(|_, _| sigma * normal.sample(&mut rng));
        let delta = (phase2 + k * relative.dot(&dir2)) - (phase1 + k * relative.dot(&dir1));
        sum.add(&amps.at(delta), w1 * w2 / samples as f64);
    }
    finish_report(config, &sum, &target)
}

/// Configuration realizing a requested `(delta21, V12)`: detector 2 is moved
/// in `theta` to set the phase, and both polarizers become linear with
/// relative angle `arccos(sqrt(V12))`.
pub fn realize_setpoint(
    config: &ExperimentConfig,
    delta21: f64,
    v12: f64,
) -> Result<ExperimentConfig> {
    if !(0.0..=1.0).contains(&v12) {
        return invalid(format!("V12 = {v12} outside [0, 1]"));
    }
    let layout = &config.layout;
    let phase1 = farfield_phase(
        layout,
        config.detector1.theta_center,
        config.detector1.chi_center,
    );
    let theta2 = layout.theta_for_phase(phase1 + delta21, config.detector2.chi_center)?;
    let angle1 = match config.detector1.polarizer {
        PolarizerSpec::Linear { angle } => angle,
        _ => 0.0,
    };
    let mut out = *config;
    out.detector1.polarizer = PolarizerSpec::Linear { angle: angle1 };
    out.detector2.theta_center = theta2;
    out.detector2.polarizer = PolarizerSpec::Linear {
        angle: angle1 + v12.sqrt().acos(),
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub delta21: f64,
    pub v12: f64,
    pub delta_c: f64,
    pub fidelity: f64,
    pub concurrence_target: f64,
    pub concurrence_generated: f64,
    pub heralding_weight: f64,
    pub theta2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    /// `delta21`-major, in grid order.
    pub rows: Vec<ScanRow>,
    pub max_delta_c: f64,
    pub min_fidelity: f64,
}

/// Runs [`generated_state`] on every `(delta21, V12)` grid point.
pub fn delta_c_scan(
    config: &ExperimentConfig,
    quad: &QuadratureSpec,
    delta21_grid: &[f64],
    v12_grid: &[f64],
) -> Result<ScanTable> {
    if delta21_grid.is_empty() || v12_grid.is_empty() {
        return invalid("scan grids must be nonempty");
    }
    let points: Vec<(f64, f64)> = delta21_grid
        .iter()
        .flat_map(|&d| v12_grid.iter().map(move |&v| (d, v)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(delta21, v12)| {
            let cfg = realize_setpoint(config, delta21, v12)?;
            let report = generated_state(&cfg, quad)?;
            Ok(ScanRow {
                delta21,
                v12,
                delta_c: report.delta_c,
                fidelity: report.fidelity,
                concurrence_target: report.concurrence_target,
                concurrence_generated: report.concurrence_generated,
                heralding_weight: report.heralding_weight,
                theta2: cfg.detector2.theta_center,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_delta_c = rows.iter().map(|r| r.delta_c).fold(0.0, f64::max);
    let min_fidelity = rows.iter().map(|r| r.fidelity).fold(1.0, f64::min);
    Ok(ScanTable {
        rows,
        max_delta_c,
        min_fidelity,
    })
}
