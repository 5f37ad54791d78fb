//! Polarization analyzers, photon detection operators and the heralded
//! two-atom state.
//!
//! Polarizers are expressed directly in the circular emission basis: a Jones
//! vector `(eps_plus, eps_minus)` holds the projections of the analyzer onto
//! the sigma-minus and sigma-plus dipoles, so `eps_plus` couples to decays
//! ending in `|->` and `eps_minus` to decays ending in `|+>`.

use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{invalid, HeraldError, Result};
use crate::qcore::{project_to_ground_manifold, AtomLevel, JointAtomState9, TwoQubitPure};

/// Two-photon rates below this value are treated as an impossible herald.
pub const MIN_HERALD_G2: f64 = 1e-12;
/// Unit-norm tolerance for Jones vectors.
pub const JONES_NORM_TOLERANCE: f64 = 1e-12;

/// Normalized analyzer vector `(eps_plus, eps_minus)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesVector {
    eps_plus: Complex64,
    eps_minus: Complex64,
}

impl JonesVector {
    /// Accepts only vectors that are already unit norm.
    pub fn new(eps_plus: Complex64, eps_minus: Complex64) -> Result<Self> {
        if ![eps_plus.re, eps_plus.im, eps_minus.re, eps_minus.im]
            .iter()
            .all(|v| v.is_finite())
        {
            return invalid("Jones vector components must be finite");
        }
        let norm = eps_plus.norm_sqr() + eps_minus.norm_sqr();
        if (norm - 1.0).abs() > JONES_NORM_TOLERANCE {
            return invalid(format!("Jones vector is not normalized (|eps|^2 = {norm})"));
        }
        Ok(Self {
            eps_plus,
            eps_minus,
        })
    }

    /// Normalizes arbitrary (nonzero) components.
    pub fn normalized(eps_plus: Complex64, eps_minus: Complex64) -> Result<Self> {
        let norm = (eps_plus.norm_sqr() + eps_minus.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return invalid("cannot normalize a zero or non-finite Jones vector");
        }
        Self::new(eps_plus / norm, eps_minus / norm)
    }

    pub fn eps_plus(&self) -> Complex64 {
        self.eps_plus
    }

    pub fn eps_minus(&self) -> Complex64 {
        self.eps_minus
    }

    /// Projection of the analyzer on the dipole of the decay `|e> -> |level>`.
    pub fn coupling(&self, level: AtomLevel) -> Complex64 {
        match level {
            AtomLevel::Plus => self.eps_minus,
            AtomLevel::Minus => self.eps_plus,
            AtomLevel::Excited => Complex64::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    Plus,
    Minus,
}

/// Polarization filter in front of a detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolarizerSpec {
    /// Linear polarizer at a lab angle (radians).
    Linear {
        angle: f64,
    },
    Circular(Handedness),
    General(JonesVector),
}

impl PolarizerSpec {
    pub fn jones(&self) -> JonesVector {
        polarizer_to_jones(self)
    }
}

/// Linear at angle `phi` maps to `(e^{-i phi}, e^{+i phi}) / sqrt(2)`.
pub fn polarizer_to_jones(spec: &PolarizerSpec) -> JonesVector {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match *spec {
        PolarizerSpec::Linear { angle } => JonesVector {
            eps_plus: Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -angle),
            eps_minus: Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, angle),
        },
        PolarizerSpec::Circular(Handedness::Plus) => JonesVector {
            eps_plus: one,
            eps_minus: zero,
        },
        PolarizerSpec::Circular(Handedness::Minus) => JonesVector {
            eps_plus: zero,
            eps_minus: one,
        },
        PolarizerSpec::General(j) => j,
    }
}

/// `V12 = |eps_2 . eps_1^*|^2`.
///
/// Normalization of both analyzers is enforced by [`JonesVector`].
pub fn visibility(e1: &JonesVector, e2: &JonesVector) -> f64 {
    let overlap = e2.eps_plus * e1.eps_plus.conj() + e2.eps_minus * e1.eps_minus.conj();
    overlap.norm_sqr().min(1.0)
}

/// `|eps_2+ eps_1- - eps_2- eps_1+|^2`, the numerator of the analytic
/// concurrence. Equals `1 - V12` for normalized analyzers.
pub fn antisymmetric_overlap(e1: &JonesVector, e2: &JonesVector) -> f64 {
    (e2.eps_plus * e1.eps_minus - e2.eps_minus * e1.eps_plus).norm_sqr()
}

/// Second-order correlation `G2 = 2 (1 + V12 cos delta21)` in the
/// unnormalized convention of the detection operators.
pub fn g2(delta21: f64, v12: f64) -> f64 {
    2.0 * (1.0 + v12 * delta21.cos())
}

fn check_visibility(v12: f64) -> Result<f64> {
    if !v12.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&v12) {
        return invalid(format!("visibility {v12} outside [0, 1]"));
    }
    Ok(v12.clamp(0.0, 1.0))
}

/// Closed-form concurrence `(1 - V12) / (1 + V12 cos delta21)`.
///
/// The point `V12 = 1, cos delta21 = -1` is an impossible herald and is an
/// error rather than a limit value.
pub fn concurrence_analytic(delta21: f64, v12: f64) -> Result<f64> {
    let v = check_visibility(v12)?;
    let denom = 1.0 + v * delta21.cos();
    if denom < MIN_HERALD_G2 {
        return Err(HeraldError::ZeroProbabilityHerald { g2: 2.0 * denom });
    }
    Ok(((1.0 - v) / denom).clamp(0.0, 1.0))
}

/// The unnormalized two-photon amplitudes split by which atom emitted the
/// photon seen at detector 1.
///
/// `amplitudes(delta21) = direct + e^{-i delta21} exchanged`, with a global
/// phase `e^{-i delta1}` dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonAmplitudes {
    pub direct: [Complex64; 4],
    pub exchanged: [Complex64; 4],
}

impl TwoPhotonAmplitudes {
    pub fn new(e1: &JonesVector, e2: &JonesVector) -> Self {
        let (p1, m1) = (e1.eps_plus, e1.eps_minus);
        let (p2, m2) = (e2.eps_plus, e2.eps_minus);
        Self {
            direct: [m2 * m1, m2 * p1, p2 * m1, p2 * p1],
            exchanged: [m2 * m1, p2 * m1, m2 * p1, p2 * p1],
        }
    }

    pub fn at(&self, delta21: f64) -> [Complex64; 4] {
        let phase = Complex64::from_polar(1.0, -delta21);
        std::array::from_fn(|i| self.direct[i] + phase * self.exchanged[i])
    }
}

/// Heralded ground state together with the rate of the herald.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldedOutcome {
    /// Normalized, first nonzero amplitude real and nonnegative.
    pub state: TwoQubitPure,
    pub g2: f64,
    pub delta21: f64,
    pub v12: f64,
}

fn finish_outcome(
    amps: [Complex64; 4],
    g2: f64,
    delta21: f64,
    v12: f64,
) -> Result<HeraldedOutcome> {
    if !(g2 >= MIN_HERALD_G2) {
        return Err(HeraldError::ZeroProbabilityHerald { g2 });
    }
    let state = TwoQubitPure::normalized_from(amps)?.with_canonical_phase();
    Ok(HeraldedOutcome {
        state,
        g2,
        delta21,
        v12,
    })
}

/// Closed-form state after both detectors register a photon.
pub fn heralded_state(e1: &JonesVector, e2: &JonesVector, delta21: f64) -> Result<HeraldedOutcome> {
    let v12 = visibility(e1, e2);
    let amps = TwoPhotonAmplitudes::new(e1, e2).at(delta21);
    finish_outcome(amps, g2(delta21, v12), delta21, v12)
}

/// Photon detection operator `D = sum_m coupling(m) (|m>_A<e| + e^{-i delta} |m>_B<e|)`
/// on the nine-dimensional two-atom space.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOperator {
    matrix: SMatrix<Complex64, 9, 9>,
}

impl DetectionOperator {
    pub fn new(analyzer: &JonesVector, phase: f64) -> Self {
        let mut lowering = Matrix3::<Complex64>::zeros();
        for level in [AtomLevel::Plus, AtomLevel::Minus] {
            lowering[(level.index(), AtomLevel::Excited.index())] = analyzer.coupling(level);
        }
        let id = Matrix3::<Complex64>::identity();
        let on_a = lowering.kronecker(&id);
        let on_b = id.kronecker(&lowering) * Complex64::from_polar(1.0, -phase);
        let mut matrix = SMatrix::<Complex64, 9, 9>::zeros();
        matrix.copy_from(&(on_a + on_b));
        Self { matrix }
    }

    pub fn matrix(&self) -> &SMatrix<Complex64, 9, 9> {
        &self.matrix
    }

    pub fn apply(&self, state: &JointAtomState9) -> JointAtomState9 {
        let v = self.matrix * SVector::<Complex64, 9>::from(*state.amplitudes());
        JointAtomState9::from_array(std::array::from_fn(|i| v[i]))
    }
}

/// Heralded state built by applying `D1 D2` to `|ee>` and projecting on the
/// ground manifold. Independent of the closed form in [`heralded_state`].
pub fn heralded_state_via_operators(
    e1: &JonesVector,
    e2: &JonesVector,
    delta1: f64,
    delta2: f64,
) -> Result<HeraldedOutcome> {
    let d1 = DetectionOperator::new(e1, delta1);
    let d2 = DetectionOperator::new(e2, delta2);
    let after = d1.apply(&d2.apply(&JointAtomState9::doubly_excited()));
    let g2 = after.norm_sqr();
    let (ground, _) = project_to_ground_manifold(&after);
    finish_outcome(ground.amplitudes(), g2, delta2 - delta1, visibility(e1, e2))
}
