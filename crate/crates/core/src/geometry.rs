//! Optical phases from the atom/detector geometry.
//!
//! Detection directions are parametrized by an azimuth `theta` measured from
//! the interatomic axis and an out-of-plane angle `chi`:
//! `e = cos(theta) cos(chi) axis + sin(theta) cos(chi) p + sin(chi) q`,
//! with `(axis, p, q)` a right-handed orthonormal frame.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use crate::error::{invalid, Result};
use crate::optics::PolarizerSpec;

/// Two trapped atoms and the wavelength of the scattered photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPairLayout {
    separation: f64,
    wavelength: f64,
    axis: Vector3<f64>,
    perp: Vector3<f64>,
    normal: Vector3<f64>,
}

impl AtomPairLayout {
    /// Atoms separated by `separation` meters along the x axis.
    pub fn new(separation: f64, wavelength: f64) -> Result<Self> {
        Self::with_axis(separation, wavelength, Vector3::x())
    }

    pub fn with_axis(separation: f64, wavelength: f64, axis: Vector3<f64>) -> Result<Self> {
        if !(separation > 0.0) || !separation.is_finite() {
            return invalid(format!(
                "atom separation must be positive, got {separation}"
            ));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return invalid(format!("wavelength must be positive, got {wavelength}"));
        }
        let len = axis.norm();
        if !(len > 0.0) || !len.is_finite() {
            return invalid("interatomic axis must be a nonzero finite vector");
        }
        let axis = axis / len;
        // helper: the coordinate direction least aligned with the axis
        let k = (0..3)
            .min_by(|&i, &j| axis[i].abs().total_cmp(&axis[j].abs()))
            .unwrap_or(0);
        let mut helper = Vector3::zeros();
        helper[k] = 1.0;
        let perp = (helper - axis * axis.dot(&helper)).normalize();
        let normal = axis.cross(&perp);
        Ok(Self {
            separation,
            wavelength,
            axis,
            perp,
            normal,
        })
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn axis(&self) -> Vector3<f64> {
        self.axis
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    /// Unit vector from the atoms towards the far-field point `(theta, chi)`.
    pub fn direction(&self, theta: f64, chi: f64) -> Vector3<f64> {
        let (st, ct) = theta.sin_cos();
        let (sc, cc) = chi.sin_cos();
        self.axis * (ct * cc) + self.perp * (st * cc) + self.normal * sc
    }

    /// `theta` in `(0, pi)` at which the far-field phase equals `phase`
    /// for the given `chi`.
    pub fn theta_for_phase(&self, phase: f64, chi: f64) -> Result<f64> {
        let scale = self.wavenumber() * self.separation * chi.cos();
        let cos_theta = phase / scale;
        if !cos_theta.is_finite() || cos_theta.abs() >= 1.0 {
            return invalid(format!(
                "phase {phase} rad is out of reach at chi = {chi} (max |phase| = {})",
                scale.abs()
            ));
        }
        Ok(cos_theta.acos())
    }
}

/// Rectangular detector patch on the far-field sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorPatch {
    pub theta_center: f64,
    pub chi_center: f64,
    /// Extent along `theta`. Zero means a point-like detector in this direction.
    pub alpha_d: f64,
    /// Extent along `chi`. Zero means a point-like detector in this direction.
    pub phi_d: f64,
    pub polarizer: PolarizerSpec,
}

impl DetectorPatch {
    pub fn new(
        theta_center: f64,
        chi_center: f64,
        alpha_d: f64,
        phi_d: f64,
        polarizer: PolarizerSpec,
    ) -> Result<Self> {
        let patch = Self {
            theta_center,
            chi_center,
            alpha_d,
            phi_d,
            polarizer,
        };
        patch.validate()?;
        Ok(patch)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_center > 0.0 && self.theta_center < PI) {
            return invalid(format!(
                "detector theta {} outside (0, pi)",
                self.theta_center
            ));
        }
        if !self.chi_center.is_finite() || self.chi_center.abs() >= PI / 2.0 {
            return invalid(format!(
                "detector chi {} outside (-pi/2, pi/2)",
                self.chi_center
            ));
        }
        if !(self.alpha_d >= 0.0) || !self.alpha_d.is_finite() {
            return invalid(format!("detector alpha_D {} must be >= 0", self.alpha_d));
        }
        if !(self.phi_d >= 0.0) || !self.phi_d.is_finite() {
            return invalid(format!("detector phi_D {} must be >= 0", self.phi_d));
        }
        Ok(())
    }

    pub fn is_point(&self) -> bool {
        self.alpha_d == 0.0 && self.phi_d == 0.0
    }
}

/// Optical fibers guiding the photon from each atom to one detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberChannel {
    pub path_length_from_a: f64,
    pub path_length_from_b: f64,
}

impl FiberChannel {
    pub fn new(path_length_from_a: f64, path_length_from_b: f64) -> Result<Self> {
        if !(path_length_from_a >= 0.0 && path_length_from_b >= 0.0)
            || !path_length_from_a.is_finite()
            || !path_length_from_b.is_finite()
        {
            return invalid("fiber path lengths must be finite and >= 0");
        }
        Ok(Self {
            path_length_from_a,
            path_length_from_b,
        })
    }
}

/// Gaussian position spread of each atom in its trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapModel {
    /// rms displacement per Cartesian axis, per atom, in meters.
    pub confinement: f64,
}

impl TrapModel {
    pub fn new(confinement: f64) -> Result<Self> {
        if !(confinement >= 0.0) || !confinement.is_finite() {
            return invalid(format!("trap confinement must be >= 0, got {confinement}"));
        }
        Ok(Self { confinement })
    }
}

/// Far-field phase `k (R_B - R_A) . e(theta, chi) = k d cos(theta) cos(chi)`.
pub fn farfield_phase(layout: &AtomPairLayout, theta: f64, chi: f64) -> f64 {
    layout.wavenumber() * layout.separation * theta.cos() * chi.cos()
}

/// Phase `k (w_B - w_A)` accumulated along two fibers.
pub fn fiber_phase(layout: &AtomPairLayout, channel: &FiberChannel) -> f64 {
    layout.wavenumber() * (channel.path_length_from_b - channel.path_length_from_a)
}

/// Far-field phase with the atoms displaced from their nominal positions.
/// Both atoms share the same emission direction.
pub fn perturbed_phase(
    layout: &AtomPairLayout,
    theta: f64,
    chi: f64,
    displacement_a: &Vector3<f64>,
    displacement_b: &Vector3<f64>,
) -> f64 {
    let limit = layout.separation / 10.0;
    if displacement_a.norm() > limit || displacement_b.norm() > limit {
        log::warn!(
            "atom displacement exceeds d/10 ({limit:e} m); far-field phase model is stretched"
        );
    }
    let shift =
        layout.wavenumber() * (displacement_b - displacement_a).dot(&layout.direction(theta, chi));
    farfield_phase(layout, theta, chi) + shift
}

/// Phase difference `delta2 - delta1` between the two detection channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDifference {
    raw: f64,
}

impl PhaseDifference {
    /// Unreduced value.
    pub fn value(&self) -> f64 {
        self.raw
    }

    /// Value folded into `(-pi, pi]`.
    pub fn reduced(&self) -> f64 {
        reduce_phase(self.raw)
    }
}

pub fn delta21(phase1: f64, phase2: f64) -> PhaseDifference {
    PhaseDifference {
        raw: phase2 - phase1,
    }
}

/// Folds an angle into `(-pi, pi]`.
pub fn reduce_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}
