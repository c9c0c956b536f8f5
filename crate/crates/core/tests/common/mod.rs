//! Shared oracles for the integration suites. Everything here is an
//! independent route to the quantities the library computes: truncated
//! power series, explicit logarithms, quadrature, and enumeration.

#![allow(dead_code)]

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};
use rand::Rng;
use scoutplan_core::pose::{hat, skew, Pose, Twist};

/// Truncated matrix-power series of `exp(hat(xi))`, 20 multiplicative
/// terms.
pub fn series_exp(xi: &Twist) -> Matrix4<f64> {
    let a = hat(xi);
    let mut sum = Matrix4::identity();
    let mut term = Matrix4::identity();
    for k in 1..=20 {
        term = term * a / k as f64;
        sum += term;
    }
    sum
}

/// SE(3) logarithm: rotation log plus left-Jacobian inverse on the
/// translation. Accurate for the small error twists the Monte Carlo
/// oracles extract.
pub fn log_se3(pose: &Pose) -> Twist {
    let r = pose.rotation();
    let cos_theta = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let antisym = (r - r.transpose()) * 0.5;
    let axis_vec = Vector3::new(antisym[(2, 1)], antisym[(0, 2)], antisym[(1, 0)]);
    let phi = if theta < 1e-7 {
        // R ~ I + phi^x, so the antisymmetric part is already phi
        axis_vec
    } else {
        axis_vec * (theta / theta.sin())
    };

    let k = skew(&phi);
    let k2 = k * k;
    let coeff = if theta < 1e-4 {
        1.0 / 12.0 + theta * theta / 720.0
    } else {
        1.0 / (theta * theta) - (1.0 + theta.cos()) / (2.0 * theta * theta.sin())
    };
    let jl_inv = Matrix3::identity() - k * 0.5 + k2 * coeff;
    Twist::new(jl_inv * pose.translation(), phi)
}

pub fn random_twist(rng: &mut impl Rng, scale: f64) -> Twist {
    let mut v = Vector6::zeros();
    for i in 0..6 {
        v[i] = rng.random_range(-scale..scale);
    }
    Twist::from_vector(&v)
}

/// Random 6x6 factor `A` with entries in `[-scale, scale)`; `A A^T` is the
/// PSD matrix it generates and `A z` samples from it.
pub fn random_factor(rng: &mut impl Rng, scale: f64) -> Matrix6<f64> {
    let mut a = Matrix6::zeros();
    for i in 0..6 {
        for j in 0..6 {
            a[(i, j)] = rng.random_range(-scale..scale);
        }
    }
    a
}

pub fn sample_gaussian_twist(rng: &mut impl Rng, factor: &Matrix6<f64>) -> Twist {
    let mut z = Vector6::zeros();
    for i in 0..6 {
        z[i] = rng.sample::<f64, _>(rand_distr::StandardNormal);
    }
    Twist::from_vector(&(factor * z))
}

/// Trapezoid quadrature over the product of the prior density
/// `N(mu, sigma^2)` and likelihood `N(z, w)`: posterior mean and std.
/// The range covers the [mu, z] interval plus 12 prior sigmas each side,
/// which contains the posterior (its mean is a convex combination of mu
/// and z and its std is below sigma).
pub fn quadrature_posterior(mu: f64, sigma: f64, z: f64, w: f64) -> (f64, f64) {
    let lo = mu.min(z) - 12.0 * sigma;
    let hi = mu.max(z) + 12.0 * sigma;
    let n = 400_000;
    let h = (hi - lo) / n as f64;
    let sqrt_w = w.sqrt();
    let (mut mass, mut first, mut second) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let x = lo + i as f64 * h;
        let weight = if i == 0 || i == n { 0.5 } else { 1.0 };
        let d1 = (x - mu) / sigma;
        let d2 = (x - z) / sqrt_w;
        let f = weight * (-0.5 * (d1 * d1 + d2 * d2)).exp();
        mass += f;
        first += f * x;
        second += f * x * x;
    }
    let mean = first / mass;
    (mean, (second / mass - mean * mean).sqrt())
}
