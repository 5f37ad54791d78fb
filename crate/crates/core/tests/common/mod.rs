#![allow(dead_code)]

use lambda_herald::optics::JonesVector;
use lambda_herald::qcore::TwoQubitPure;
use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure two-qubit state.
pub fn random_pure<R: Rng>(rng: &mut R) -> TwoQubitPure {
    let amps = std::array::from_fn(|_| gaussian_complex(rng));
    TwoQubitPure::normalized_from(amps).unwrap()
}

pub fn random_jones<R: Rng>(rng: &mut R) -> JonesVector {
    JonesVector::normalized(gaussian_complex(rng), gaussian_complex(rng)).unwrap()
}

/// Random element of U(2).
pub fn random_unitary<R: Rng>(rng: &mut R) -> Matrix2<Complex64> {
    let a = gaussian_complex(rng);
    let b = gaussian_complex(rng);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    Matrix2::new(a, -b.conj(), b, a.conj()) * phase
}
