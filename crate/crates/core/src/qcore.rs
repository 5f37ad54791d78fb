//! Two-qubit state arithmetic on the atomic ground manifold.
//!
//! Basis order everywhere is `(++, +-, -+, --)`, i.e. index `2 * a + b` with
//! `+ -> 0`, `- -> 1` for atom A (`a`) and atom B (`b`).

use nalgebra::{Matrix2, Matrix4, Schur, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, HeraldError, Result};

/// Complex amplitude of a basis state.
pub type Amplitude = Complex64;

/// Maximum deviation from unit norm accepted by operations that require
/// normalized input.
pub const NORM_TOLERANCE: f64 = 1e-6;
/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density matrix.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// Largest imaginary part accepted for an eigenvalue of `rho * rho_tilde`.
pub const SPECTRUM_IMAG_TOLERANCE: f64 = 1e-9;
/// Amplitudes below this magnitude are skipped when fixing the global phase.
pub const PHASE_REFERENCE_FLOOR: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `sigma_y (x) sigma_y` in the `(++, +-, -+, --)` basis.
fn sigma_yy() -> Matrix4<Complex64> {
    let m = ONE;
    Matrix4::new(
        ZERO, ZERO, ZERO, -m, //
        ZERO, ZERO, m, ZERO, //
        ZERO, m, ZERO, ZERO, //
        -m, ZERO, ZERO, ZERO,
    )
}

/// Pure two-qubit state `a|++> + b|+-> + c|-+> + d|-->`.
///
/// The amplitudes are not required to be normalized; operations that need a
/// physical state check the norm themselves and reject otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitPure {
    amps: [Amplitude; 4],
}

impl TwoQubitPure {
    pub fn new(a: Amplitude, b: Amplitude, c: Amplitude, d: Amplitude) -> Result<Self> {
        Self::from_array([a, b, c, d])
    }

    pub fn from_array(amps: [Amplitude; 4]) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("two-qubit amplitudes must be finite");
        }
        Ok(Self { amps })
    }

    /// Builds the state and normalizes it in one step.
    pub fn normalized_from(amps: [Amplitude; 4]) -> Result<Self> {
        Self::from_array(amps)?.normalized()
    }

    pub fn amplitudes(&self) -> [Amplitude; 4] {
        self.amps
    }

    pub fn a(&self) -> Amplitude {
        self.amps[0]
    }
    pub fn b(&self) -> Amplitude {
        self.amps[1]
    }
    pub fn c(&self) -> Amplitude {
        self.amps[2]
    }
    pub fn d(&self) -> Amplitude {
        self.amps[3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr().sqrt() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Returns the unit-norm version of this state. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return invalid("cannot normalize a zero or non-finite state");
        }
        Ok(Self {
            amps: self.amps.map(|z| z / norm),
        })
    }

    /// Removes the global phase: the first amplitude (in basis order) whose
    /// magnitude exceeds [`PHASE_REFERENCE_FLOOR`] becomes real and nonnegative.
    pub fn with_canonical_phase(&self) -> Self {
        let Some(idx) = self
            .amps
            .iter()
            .position(|z| z.norm() > PHASE_REFERENCE_FLOOR)
        else {
            return *self;
        };
        let z = self.amps[idx];
        let phase = z.conj() / z.norm();
        let mut amps = self.amps.map(|w| w * phase);
        amps[idx] = Complex64::new(z.norm(), 0.0);
        Self { amps }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &TwoQubitPure) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    pub fn to_vector(&self) -> Vector4<Complex64> {
        Vector4::from(self.amps)
    }

    /// Applies the local operation `u_a (x) u_b`.
    pub fn apply_local(&self, u_a: &Matrix2<Complex64>, u_b: &Matrix2<Complex64>) -> Self {
        let v = u_a.kronecker(u_b) * self.to_vector();
        Self {
            amps: [v[0], v[1], v[2], v[3]],
        }
    }

    /// `|psi><psi|` for a normalized state.
    pub fn projector(&self) -> Result<DensityMatrix4> {
        if !self.is_normalized() {
            return invalid(format!(
                "projector needs a normalized state (norm^2 = {})",
                self.norm_sqr()
            ));
        }
        let v = self.to_vector();
        DensityMatrix4::new(v * v.adjoint())
    }

    /// Largest amplitude-wise distance to `other` after removing the relative
    /// global phase between the two states.
    pub fn distance_up_to_phase(&self, other: &TwoQubitPure) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(x, y)| (x * phase - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Density matrix of two qubits, basis order `(++, +-, -+, --)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    m: Matrix4<Complex64>,
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity before accepting `m`.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("density matrix has non-finite entries");
        }
        let herm_dev = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_dev > DENSITY_TOLERANCE {
            return invalid(format!(
                "density matrix is not Hermitian (deviation {herm_dev:e})"
            ));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOLERANCE || trace.im.abs() > DENSITY_TOLERANCE {
            return invalid(format!("density matrix trace is {trace}, expected 1"));
        }
        let min_eig = m.symmetric_eigenvalues().min();
        if min_eig < EIGENVALUE_FLOOR {
            return invalid(format!(
                "density matrix has negative eigenvalue {min_eig:e}"
            ));
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Matrix4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    /// Convex combination `p * self + (1 - p) * other`.
    pub fn mix(&self, other: &DensityMatrix4, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid(format!("mixing weight {p} outside [0, 1]"));
        }
        Self::new(self.m * Complex64::new(p, 0.0) + other.m * Complex64::new(1.0 - p, 0.0))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = self.m.symmetric_eigenvalues();
        [e[0], e[1], e[2], e[3]]
    }

    /// `rho_tilde = (sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y)`.
    pub fn spin_flipped(&self) -> Matrix4<Complex64> {
        let s = sigma_yy();
        s * self.m.conjugate() * s
    }
}

/// Joint state of the two three-level atoms in `{e, +, -} (x) {e, +, -}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointAtomState9 {
    amps: [Amplitude; 9],
}

/// Atomic level of a single Lambda atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomLevel {
    Excited,
    Plus,
    Minus,
}

impl AtomLevel {
    pub const ALL: [AtomLevel; 3] = [AtomLevel::Excited, AtomLevel::Plus, AtomLevel::Minus];

    pub fn index(self) -> usize {
        match self {
            AtomLevel::Excited => 0,
            AtomLevel::Plus => 1,
            AtomLevel::Minus => 2,
        }
    }
}

impl JointAtomState9 {
    pub fn from_array(amps: [Amplitude; 9]) -> Self {
        Self { amps }
    }

    /// The doubly excited state `|ee>`.
    pub fn doubly_excited() -> Self {
        Self::basis(AtomLevel::Excited, AtomLevel::Excited)
    }

    pub fn basis(a: AtomLevel, b: AtomLevel) -> Self {
        let mut amps = [ZERO; 9];
        amps[Self::index(a, b)] = ONE;
        Self { amps }
    }

    pub fn index(a: AtomLevel, b: AtomLevel) -> usize {
        3 * a.index() + b.index()
    }

    pub fn amplitude(&self, a: AtomLevel, b: AtomLevel) -> Amplitude {
        self.amps[Self::index(a, b)]
    }

    pub fn amplitudes(&self) -> &[Amplitude; 9] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Whether this vector can stand for a physical state; intermediate
    /// results of detection operators are generally not normalized.
    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= DENSITY_TOLERANCE
    }
}

/// Extracts the four ground-manifold amplitudes and their squared norm.
/// The returned state is not normalized.
pub fn project_to_ground_manifold(state: &JointAtomState9) -> (TwoQubitPure, f64) {
    use AtomLevel::{Minus, Plus};
    let amps = [
        state.amplitude(Plus, Plus),
        state.amplitude(Plus, Minus),
        state.amplitude(Minus, Plus),
        state.amplitude(Minus, Minus),
    ];
    let ground = TwoQubitPure { amps };
    let norm = ground.norm_sqr();
    (ground, norm)
}

/// Pure-state concurrence `2|ad - bc|`.
pub fn concurrence_pure(state: &TwoQubitPure) -> Result<f64> {
    if !state.is_normalized() {
        return invalid(format!(
            "concurrence needs a normalized state (norm^2 = {})",
            state.norm_sqr()
        ));
    }
    let c = 2.0 * (state.a() * state.d() - state.b() * state.c()).norm();
    Ok(c.min(1.0))
}

/// Wootters concurrence of a mixed two-qubit state.
///
/// With `rho = X X^dagger` (`X = V sqrt(Lambda)` from the eigendecomposition),
/// the Wootters numbers `lambda_i` are the singular values of the complex
/// symmetric matrix `X^T (sigma_y (x) sigma_y) X`. Working with singular values
/// keeps the small `lambda_i` at absolute accuracy ~1e-16 instead of the
/// ~1e-8 obtained from square roots of eigenvalues of `rho * rho_tilde`.
pub fn concurrence_mixed(rho: &DensityMatrix4) -> Result<f64> {
    let eig = rho.m.symmetric_eigen();
    let mut x = eig.eigenvectors;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let w = Complex64::new(lambda.max(0.0).sqrt(), 0.0);
        for i in 0..4 {
            x[(i, j)] *= w;
        }
    }
    let tau = x.transpose() * sigma_yy() * x;
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(HeraldError::NumericalFailure(
            "singular values of the spin-flip overlap are not finite".into(),
        ));
    }
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// Wootters concurrence from the spectrum of `rho * rho_tilde`.
///
/// Direct route: general complex eigenvalues of the non-Hermitian product,
/// tiny negative real parts clamped to zero. Accurate to ~1e-8 on
/// rank-deficient inputs; [`concurrence_mixed`] is the precise variant.
pub fn concurrence_mixed_spectral(rho: &DensityMatrix4) -> Result<f64> {
    let product = rho.m * rho.spin_flipped();
    let schur = Schur::try_new(product, 1e-15, 10_000).ok_or_else(|| {
        HeraldError::NumericalFailure(
            "Schur decomposition of rho * rho_tilde did not converge".into(),
        )
    })?;
    let eigs = schur.eigenvalues().ok_or_else(|| {
        HeraldError::NumericalFailure("eigenvalues of rho * rho_tilde unavailable".into())
    })?;
    let mut roots = Vec::with_capacity(4);
    for z in eigs.iter() {
        if z.im.abs() >= SPECTRUM_IMAG_TOLERANCE {
            return Err(HeraldError::NumericalFailure(format!(
                "rho * rho_tilde has eigenvalue {z} with non-negligible imaginary part"
            )));
        }
        if z.re < EIGENVALUE_FLOOR {
            return Err(HeraldError::NumericalFailure(format!(
                "rho * rho_tilde has negative eigenvalue {}",
                z.re
            )));
        }
        roots.push(z.re.max(0.0).sqrt());
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0))
}

/// Fidelity `<psi|rho|psi>` with a pure target.
pub fn fidelity_pure_target(rho: &DensityMatrix4, target: &TwoQubitPure) -> Result<f64> {
    if !target.is_normalized() {
        return invalid("fidelity target must be normalized");
    }
    let v = target.to_vector();
    let f = (v.adjoint() * rho.m * v)[(0, 0)];
    Ok(f.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_phi_plus() -> TwoQubitPure {
        TwoQubitPure::new(c(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, c(FRAC_1_SQRT_2, 0.0)).unwrap()
    }

    #[test]
    fn pure_concurrence_examples() {
        assert!((concurrence_pure(&bell_phi_plus()).unwrap() - 1.0).abs() < 1e-12);
        let product =
            TwoQubitPure::new(c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert!(concurrence_pure(&product).unwrap().abs() < 1e-12);
        for delta in [0.0, 0.3, 1.7, -2.9, std::f64::consts::PI] {
            let s = TwoQubitPure::new(
                ZERO,
                c(FRAC_1_SQRT_2, 0.0),
                Complex64::from_polar(FRAC_1_SQRT_2, -delta),
                ZERO,
            )
            .unwrap();
            assert!((concurrence_pure(&s).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_concurrence_rejects_unnormalized() {
        let s = TwoQubitPure::new(ONE, ONE, ZERO, ZERO).unwrap();
        assert!(matches!(
            concurrence_pure(&s),
            Err(HeraldError::InvalidInput(_))
        ));
    }

    #[test]
    fn nonfinite_amplitudes_rejected() {
        assert!(TwoQubitPure::new(c(f64::NAN, 0.0), ZERO, ZERO, ZERO).is_err());
    }

    #[test]
    fn mixed_concurrence_examples() {
        let bell = bell_phi_plus().projector().unwrap();
        assert!((concurrence_mixed(&bell).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            concurrence_mixed(&DensityMatrix4::maximally_mixed()).unwrap(),
            0.0
        );
        let werner = bell.mix(&DensityMatrix4::maximally_mixed(), 0.8).unwrap();
        assert!((concurrence_mixed(&werner).unwrap() - 0.7).abs() < 1e-12);
        assert!((concurrence_mixed_spectral(&werner).unwrap() - 0.7).abs() < 1e-9);
    }

    #[test]
    fn density_validation() {
        let mut m = Matrix4::<Complex64>::identity() * c(0.25, 0.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix4::new(m).is_err(), "non-Hermitian accepted");
        let m = Matrix4::<Complex64>::identity() * c(0.3, 0.0);
        assert!(DensityMatrix4::new(m).is_err(), "trace 1.2 accepted");
        let m = Matrix4::from_diagonal(&Vector4::new(c(0.6, 0.0), c(0.6, 0.0), c(-0.2, 0.0), ZERO));
        assert!(
            DensityMatrix4::new(m).is_err(),
            "negative eigenvalue accepted"
        );
    }

    #[test]
    fn fidelity_examples() {
        let bell = bell_phi_plus();
        let rho = bell.projector().unwrap();
        assert!((fidelity_pure_target(&rho, &bell).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix4::maximally_mixed();
        assert!((fidelity_pure_target(&mixed, &bell).unwrap() - 0.25).abs() < 1e-12);
        let bell_minus =
            TwoQubitPure::new(c(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, c(-FRAC_1_SQRT_2, 0.0)).unwrap();
        assert!(fidelity_pure_target(&rho, &bell_minus).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ground_projection() {
        let (g, n) = project_to_ground_manifold(&JointAtomState9::doubly_excited());
        assert_eq!(n, 0.0);
        assert_eq!(g.amplitudes(), [ZERO; 4]);
        let s = JointAtomState9::basis(AtomLevel::Plus, AtomLevel::Minus);
        let (g, n) = project_to_ground_manifold(&s);
        assert_eq!(n, 1.0);
        assert_eq!(g.amplitudes(), [ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn canonical_phase_skips_zero_leading_amplitudes() {
        let s = TwoQubitPure::new(ZERO, c(0.0, -0.6), c(0.8, 0.0), ZERO).unwrap();
        let t = s.with_canonical_phase();
        assert_eq!(t.b(), c(0.6, 0.0));
        assert!((t.c() - c(0.0, 0.8)).norm() < 1e-15);
    }
}
