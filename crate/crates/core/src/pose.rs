//! SE(3) poses and pose-belief propagation.
//!
//! A pose is a 4x4 homogeneous transform; uncertainty lives in the 6-dof
//! tangent space as a twist `(rho, phi)` with a 6x6 covariance. Beliefs are
//! the pair `{mean, cov}` and compound along a path by transporting each
//! motion covariance through the adjoint of the nominal pose.

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};

use crate::{Error, Result};

/// Orthonormality tolerance for accepting a rotation block.
const ROT_TOL: f64 = 1e-9;
/// Below this rotation angle the closed-form exp coefficients switch to
/// their Taylor expansions.
const SMALL_ANGLE: f64 = 1e-6;

/// Tangent-space perturbation `(rho, phi)`: translational part in meters,
/// rotational part in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist {
    pub rho: Vector3<f64>,
    pub phi: Vector3<f64>,
}

impl Twist {
    pub fn new(rho: Vector3<f64>, phi: Vector3<f64>) -> Self {
        Self { rho, phi }
    }

    pub fn zero() -> Self {
        Self { rho: Vector3::zeros(), phi: Vector3::zeros() }
    }

    /// Stack as the 6-vector `(rho, phi)`.
    pub fn as_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.rho.x, self.rho.y, self.rho.z,
            self.phi.x, self.phi.y, self.phi.z,
        )
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            rho: Vector3::new(v[0], v[1], v[2]),
            phi: Vector3::new(v[3], v[4], v[5]),
        }
    }
}

/// Skew-symmetric cross-product matrix: `skew(phi) * v == phi x v`.
pub fn skew(phi: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -phi.z, phi.y,
        phi.z, 0.0, -phi.x,
        -phi.y, phi.x, 0.0,
    )
}

/// Lie-algebra element of a twist: `[[skew(phi), rho], [0, 0]]`.
pub fn hat(xi: &Twist) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&xi.phi));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&xi.rho);
    m
}

/// Inverse of [`hat`]: extract `(rho, phi)` from an algebra element.
pub fn vee(m: &Matrix4<f64>) -> Twist {
    Twist {
        rho: Vector3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)]),
        phi: Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]),
    }
}

/// Closed-form SE(3) exponential map (Rodrigues rotation plus left Jacobian
/// applied to the translational part), with a Taylor fallback below
/// [`SMALL_ANGLE`].
pub fn exp_se3(xi: &Twist) -> Pose {
    let theta = xi.phi.norm();
    let k = skew(&xi.phi);
    let k2 = k * k;

    // sin(t)/t, (1-cos(t))/t^2, (t-sin(t))/t^3
    let (a, b, c) = if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0)
    } else {
        let t2 = theta * theta;
        (
            theta.sin() / theta,
            (1.0 - theta.cos()) / t2,
            (theta - theta.sin()) / (t2 * theta),
        )
    };

    let rot = Matrix3::identity() + k * a + k2 * b;
    let left_jacobian = Matrix3::identity() + k * b + k2 * c;
    let trans = left_jacobian * xi.rho;
    Pose::from_parts_unchecked(rot, trans)
}

/// 6x6 adjoint of a pose: `[[R, skew(t) R], [0, R]]`.
pub fn adjoint(pose: &Pose) -> Matrix6<f64> {
    let r = pose.rotation();
    let tr = skew(&pose.translation()) * r;
    let mut adj = Matrix6::zeros();
    adj.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    adj.fixed_view_mut::<3, 3>(0, 3).copy_from(&tr);
    adj.fixed_view_mut::<3, 3>(3, 3).copy_from(&r);
    adj
}

/// Rigid transform in SE(3), stored as a 4x4 homogeneous matrix.
///
/// The rotation block is orthonormal with determinant +1 (within `1e-9`)
/// and the bottom row is exactly `(0, 0, 0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    matrix: Matrix4<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self { matrix: Matrix4::identity() }
    }

    /// Validate and wrap a homogeneous matrix.
    pub fn from_matrix(matrix: Matrix4<f64>) -> Result<Self> {
        let r = matrix.fixed_view::<3, 3>(0, 0).into_owned();
        let ortho_err = (r.transpose() * r - Matrix3::identity()).abs().max();
        if ortho_err > ROT_TOL {
            return Err(Error::InvalidPose(format!(
                "rotation block not orthonormal (|R'R - I| = {ortho_err:.3e})"
            )));
        }
        let det_err = (r.determinant() - 1.0).abs();
        if det_err > ROT_TOL {
            return Err(Error::InvalidPose(format!(
                "rotation determinant off by {det_err:.3e}"
            )));
        }
        if matrix[(3, 0)] != 0.0 || matrix[(3, 1)] != 0.0 || matrix[(3, 2)] != 0.0
            || matrix[(3, 3)] != 1.0
        {
            return Err(Error::InvalidPose("bottom row must be (0,0,0,1)".into()));
        }
        Ok(Self { matrix })
    }

    /// Build from a rotation block and translation, trusting the caller.
    pub(crate) fn from_parts_unchecked(rot: Matrix3<f64>, trans: Vector3<f64>) -> Self {
        let mut matrix = Matrix4::identity();
        matrix.fixed_view_mut::<3, 3>(0, 0).copy_from(&rot);
        matrix.fixed_view_mut::<3, 1>(0, 3).copy_from(&trans);
        Self { matrix }
    }

    /// Planar pose: position `(x, y)` at zero height with the given yaw.
    pub fn from_planar(x: f64, y: f64, yaw: f64) -> Self {
        let (s, c) = yaw.sin_cos();
        let rot = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        Self::from_parts_unchecked(rot, Vector3::new(x, y, 0.0))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn translation(&self) -> Vector3<f64> {
        Vector3::new(self.matrix[(0, 3)], self.matrix[(1, 3)], self.matrix[(2, 3)])
    }

    /// Group composition `self * other`.
    pub fn compose(&self, other: &Pose) -> Pose {
        let rot = self.rotation() * other.rotation();
        let trans = self.rotation() * other.translation() + self.translation();
        Self::from_parts_unchecked(rot, trans)
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation().transpose();
        Self::from_parts_unchecked(rt, -(rt * self.translation()))
    }
}

fn symmetrize(m: &Matrix6<f64>) -> Matrix6<f64> {
    (m + m.transpose()) * 0.5
}

/// Square root factor of a PSD matrix via symmetric eigendecomposition.
/// Eigenvalues slightly negative from roundoff are clamped; anything beyond
/// the tolerance is rejected.
fn psd_sqrt(m: &Matrix6<f64>) -> Result<Matrix6<f64>> {
    let eig = nalgebra::SymmetricEigen::new(symmetrize(m));
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let tol = 1e-12 * max_ev.max(1.0);
    let mut sqrt_vals = Vector6::zeros();
    for (i, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev < -tol {
            return Err(Error::InvalidCovariance(format!(
                "eigenvalue {ev:.3e} below -{tol:.1e}"
            )));
        }
        sqrt_vals[i] = ev.max(0.0).sqrt();
    }
    let mut scaled = eig.eigenvectors;
    for i in 0..6 {
        scaled.column_mut(i).scale_mut(sqrt_vals[i]);
    }
    Ok(scaled)
}

/// Gaussian belief over a pose: nominal mean and 6x6 twist covariance.
#[derive(Clone, Copy, Debug)]
pub struct PoseBelief {
    mean: Pose,
    cov: Matrix6<f64>,
}

impl PoseBelief {
    /// Requires `cov` symmetric (within `1e-12`, scale-relative) and PSD
    /// (eigenvalues above `-1e-12`). The stored covariance is symmetrized.
    pub fn new(mean: Pose, cov: Matrix6<f64>) -> Result<Self> {
        let scale = cov.abs().max().max(1.0);
        let asym = (cov - cov.transpose()).abs().max();
        if asym > 1e-12 * scale {
            return Err(Error::InvalidCovariance(format!(
                "asymmetry {asym:.3e} exceeds tolerance"
            )));
        }
        let sym = symmetrize(&cov);
        // Rejects covariances with meaningfully negative eigenvalues.
        psd_sqrt(&sym)?;
        Ok(Self { mean, cov: sym })
    }

    pub fn certain(mean: Pose) -> Self {
        Self { mean, cov: Matrix6::zeros() }
    }

    pub fn mean(&self) -> &Pose {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix6<f64> {
        &self.cov
    }

    /// Draw `exp(xi) * mean` with `xi ~ N(0, cov)`, deterministic per seed.
    pub fn sample_pose(&self, seed: u64) -> Result<Pose> {
        let factor = psd_sqrt(&self.cov)?;
        let mut rng = crate::seeded_rng(seed);
        Ok(sample_with(&mut rng, &self.mean, &factor))
    }

    /// Propagate through a relative motion `{motion_mean, motion_cov}`:
    /// the mean composes on the right and the motion covariance is carried
    /// into the global frame by the adjoint of the current mean.
    pub fn propagate(&self, motion_mean: &Pose, motion_cov: &Matrix6<f64>) -> PoseBelief {
        let adj = adjoint(&self.mean);
        PoseBelief {
            mean: self.mean.compose(motion_mean),
            cov: symmetrize(&(self.cov + adj * motion_cov * adj.transpose())),
        }
    }
}

pub(crate) fn sample_with<R: rand::Rng>(rng: &mut R, mean: &Pose, factor: &Matrix6<f64>) -> Pose {
    let mut z = Vector6::zeros();
    for i in 0..6 {
        z[i] = rng.sample::<f64, _>(rand_distr::StandardNormal);
    }
    let xi = Twist::from_vector(&(factor * z));
    exp_se3(&xi).compose(mean)
}

/// One leg of a candidate path: travel distance within a cell, that cell's
/// normalized motion covariance, and the nominal pose while crossing it.
#[derive(Clone, Debug)]
pub struct PathSegment {
    pub distance: f64,
    pub sigma_tilde: Matrix6<f64>,
    pub nominal_pose: Pose,
}

/// Terminal covariance prediction along a path:
/// `P_g = P_0 + sum_i d_i * Adj_i * Sigma_i * Adj_i'`.
pub fn accumulate_path_covariance(
    p0: &Matrix6<f64>,
    segments: &[PathSegment],
) -> Result<Matrix6<f64>> {
    let mut total = *p0;
    for seg in segments {
        if seg.distance < 0.0 {
            return Err(Error::NegativeDistance(seg.distance));
        }
        let adj = adjoint(&seg.nominal_pose);
        total += adj * seg.sigma_tilde * adj.transpose() * seg.distance;
    }
    Ok(symmetrize(&total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_twist(rng: &mut impl Rng, scale: f64) -> Twist {
        let mut v = Vector6::zeros();
        for i in 0..6 {
            v[i] = rng.random_range(-scale..scale);
        }
        Twist::from_vector(&v)
    }

    #[test]
    fn skew_zero_vector_is_zero_matrix() {
        assert_eq!(skew(&Vector3::zeros()), Matrix3::zeros());
    }

    #[test]
    fn skew_matches_definition() {
        let m = skew(&Vector3::new(1.0, 2.0, 3.0));
        let expected = Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0);
        assert_eq!(m, expected);
    }

    #[test]
    fn skew_is_antisymmetric_and_acts_as_cross_product() {
        let phi = Vector3::new(0.3, -1.1, 2.2);
        let m = skew(&phi);
        assert_eq!(m.transpose(), -m);
        let v = Vector3::new(-0.4, 0.9, 1.3);
        assert_abs_diff_eq!(m * v, phi.cross(&v), epsilon = 1e-15);
    }

    #[test]
    fn hat_zero_twist_is_zero() {
        assert_eq!(hat(&Twist::zero()), Matrix4::zeros());
    }

    #[test]
    fn hat_pure_translation_has_single_entry() {
        let xi = Twist::new(Vector3::new(1.0, 0.0, 0.0), Vector3::zeros());
        let mut expected = Matrix4::zeros();
        expected[(0, 3)] = 1.0;
        assert_eq!(hat(&xi), expected);
    }

    #[test]
    fn vee_inverts_hat() {
        let mut rng = crate::seeded_rng(7);
        for _ in 0..20 {
            let xi = random_twist(&mut rng, 3.0);
            let back = vee(&hat(&xi));
            assert_abs_diff_eq!(back.as_vector(), xi.as_vector(), epsilon = 0.0);
        }
    }

    #[test]
    fn exp_zero_twist_is_identity() {
        let pose = exp_se3(&Twist::zero());
        assert_eq!(*pose.matrix(), Matrix4::identity());
    }

    #[test]
    fn exp_pure_translation() {
        let xi = Twist::new(Vector3::new(1.0, 2.0, 3.0), Vector3::zeros());
        let pose = exp_se3(&xi);
        assert_eq!(pose.rotation(), Matrix3::identity());
        assert_abs_diff_eq!(pose.translation(), Vector3::new(1.0, 2.0, 3.0), epsilon = 0.0);
    }

    // 20-term truncated power series of exp(hat(xi)); independent of the
    // closed form under test.
    fn series_exp(xi: &Twist) -> Matrix4<f64> {
        let a = hat(xi);
        let mut sum = Matrix4::identity();
        let mut term = Matrix4::identity();
        for k in 1..=20 {
            term = term * a / k as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn exp_matches_series_oracle() {
        let mut rng = crate::seeded_rng(11);
        for _ in 0..50 {
            let xi = random_twist(&mut rng, 1.5);
            let err = (exp_se3(&xi).matrix() - series_exp(&xi)).abs().max();
            assert!(err < 1e-10, "series mismatch {err:.2e}");
        }
    }

    #[test]
    fn adjoint_of_identity_is_identity() {
        assert_eq!(adjoint(&Pose::identity()), Matrix6::identity());
    }

    #[test]
    fn adjoint_of_pure_rotation_is_block_diagonal() {
        let pose = exp_se3(&Twist::new(Vector3::zeros(), Vector3::new(0.4, -0.2, 0.9)));
        let adj = adjoint(&pose);
        let r = pose.rotation();
        assert_abs_diff_eq!(adj.fixed_view::<3, 3>(0, 0).into_owned(), r, epsilon = 0.0);
        assert_abs_diff_eq!(adj.fixed_view::<3, 3>(3, 3).into_owned(), r, epsilon = 0.0);
        assert_eq!(adj.fixed_view::<3, 3>(0, 3).into_owned(), Matrix3::zeros());
    }

    #[test]
    fn adjoint_satisfies_conjugation_identity() {
        let mut rng = crate::seeded_rng(13);
        for _ in 0..30 {
            let pose = exp_se3(&random_twist(&mut rng, 1.2));
            let xi = random_twist(&mut rng, 1.0);
            let lhs = adjoint(&pose) * xi.as_vector();
            let conj = pose.matrix() * hat(&xi) * pose.inverse().matrix();
            let rhs = vee(&conj).as_vector();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    #[test]
    fn pose_from_matrix_rejects_bad_rotation() {
        let mut m = Matrix4::identity();
        m[(0, 0)] = 1.5;
        assert!(matches!(Pose::from_matrix(m), Err(Error::InvalidPose(_))));
    }

    #[test]
    fn sample_with_zero_covariance_returns_mean() {
        let mean = Pose::from_planar(3.0, -2.0, 0.7);
        let belief = PoseBelief::certain(mean);
        let s = belief.sample_pose(99).unwrap();
        assert_abs_diff_eq!(s.matrix(), mean.matrix(), epsilon = 0.0);
    }

    #[test]
    fn sample_is_deterministic_per_seed() {
        let belief = PoseBelief::new(Pose::identity(), Matrix6::identity() * 0.3).unwrap();
        let a = belief.sample_pose(42).unwrap();
        let b = belief.sample_pose(42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = belief.sample_pose(43).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn sample_rejects_non_psd_covariance() {
        let mut cov = Matrix6::identity();
        cov[(0, 0)] = -0.5;
        let err = PoseBelief::new(Pose::identity(), cov).unwrap_err();
        assert!(err.to_string().contains("invalid covariance"));
    }

    #[test]
    fn sample_mean_translation_obeys_law_of_large_numbers() {
        let n = 100_000;
        let var = 0.01;
        // translation-only noise: rotational noise would bias the mean
        // translation at second order and break the exact-mean oracle
        let mut cov = Matrix6::zeros();
        for i in 0..3 {
            cov[(i, i)] = var;
        }
        let belief = PoseBelief::new(Pose::from_planar(5.0, 7.0, 0.0), cov).unwrap();
        let factor = psd_sqrt(&cov).unwrap();
        let mut rng = crate::seeded_rng(1234);
        let mut sum = Vector3::zeros();
        for _ in 0..n {
            sum += sample_with(&mut rng, &belief.mean, &factor).translation();
        }
        let avg = sum / n as f64;
        let bound = 3.0 * var.sqrt() / (n as f64).sqrt();
        assert!((avg.x - 5.0).abs() < bound, "x off by {}", avg.x - 5.0);
        assert!((avg.y - 7.0).abs() < bound, "y off by {}", avg.y - 7.0);
        assert!(avg.z.abs() < bound);
    }

    #[test]
    fn propagate_with_identity_motion_and_zero_cov_is_noop() {
        let belief =
            PoseBelief::new(Pose::from_planar(1.0, 2.0, 0.3), Matrix6::identity() * 0.2).unwrap();
        let out = belief.propagate(&Pose::identity(), &Matrix6::zeros());
        assert_abs_diff_eq!(out.mean().matrix(), belief.mean().matrix(), epsilon = 0.0);
        assert_abs_diff_eq!(out.cov(), belief.cov(), epsilon = 0.0);
    }

    #[test]
    fn propagate_from_identity_adds_covariances_exactly() {
        let p = Matrix6::identity() * 0.4;
        let sigma = Matrix6::identity() * 0.1;
        let belief = PoseBelief::new(Pose::identity(), p).unwrap();
        let out = belief.propagate(&Pose::from_planar(1.0, 0.0, 0.2), &sigma);
        assert_abs_diff_eq!(*out.cov(), p + sigma, epsilon = 1e-15);
    }

    #[test]
    fn accumulate_empty_returns_initial() {
        let p0 = Matrix6::identity() * 0.3;
        assert_eq!(accumulate_path_covariance(&p0, &[]).unwrap(), p0);
    }

    #[test]
    fn accumulate_single_identity_segment() {
        let p0 = Matrix6::identity() * 0.5;
        let seg = PathSegment {
            distance: 2.0,
            sigma_tilde: Matrix6::identity(),
            nominal_pose: Pose::identity(),
        };
        let out = accumulate_path_covariance(&p0, &[seg]).unwrap();
        assert_abs_diff_eq!(out, p0 + Matrix6::identity() * 2.0, epsilon = 1e-15);
    }

    #[test]
    fn accumulate_rejects_negative_distance() {
        let seg = PathSegment {
            distance: -1.0,
            sigma_tilde: Matrix6::identity(),
            nominal_pose: Pose::identity(),
        };
        assert!(matches!(
            accumulate_path_covariance(&Matrix6::zeros(), &[seg]),
            Err(Error::NegativeDistance(_))
        ));
    }

    fn random_psd(rng: &mut impl Rng, scale: f64) -> Matrix6<f64> {
        let mut a = Matrix6::zeros();
        for i in 0..6 {
            for j in 0..6 {
                a[(i, j)] = rng.random_range(-scale..scale);
            }
        }
        a * a.transpose()
    }

    #[test]
    fn accumulate_trace_matches_per_segment_traces() {
        let mut rng = crate::seeded_rng(21);
        let p0 = random_psd(&mut rng, 0.4);
        let segments: Vec<PathSegment> = (0..5)
            .map(|_| PathSegment {
                distance: rng.random_range(0.0..3.0),
                sigma_tilde: random_psd(&mut rng, 0.5),
                nominal_pose: exp_se3(&random_twist(&mut rng, 1.0)),
            })
            .collect();
        let total = accumulate_path_covariance(&p0, &segments).unwrap();
        let expected: f64 = p0.trace()
            + segments
                .iter()
                .map(|s| {
                    let adj = adjoint(&s.nominal_pose);
                    s.distance * (adj * s.sigma_tilde * adj.transpose()).trace()
                })
                .sum::<f64>();
        assert_abs_diff_eq!(total.trace(), expected, epsilon = 1e-9 * expected.abs());
    }

    #[test]
    fn accumulate_is_permutation_invariant() {
        let mut rng = crate::seeded_rng(31);
        let p0 = random_psd(&mut rng, 0.3);
        let segments: Vec<PathSegment> = (0..4)
            .map(|_| PathSegment {
                distance: rng.random_range(0.0..2.0),
                sigma_tilde: random_psd(&mut rng, 0.5),
                nominal_pose: exp_se3(&random_twist(&mut rng, 1.0)),
            })
            .collect();
        let fwd = accumulate_path_covariance(&p0, &segments).unwrap();
        let mut rev = segments.clone();
        rev.reverse();
        let bwd = accumulate_path_covariance(&p0, &rev).unwrap();
        assert_abs_diff_eq!(fwd, bwd, epsilon = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exp_output_satisfies_pose_invariants(
            v in proptest::array::uniform6(-4.0_f64..4.0),
        ) {
            // |xi| <= sqrt(6)*4 < 10
            let xi = Twist::from_vector(&Vector6::from_row_slice(&v));
            let pose = exp_se3(&xi);
            prop_assert!(Pose::from_matrix(*pose.matrix()).is_ok());
        }

        #[test]
        fn propagate_never_decreases_covariance(
            seed in 0u64..1000,
            scale in 0.01f64..0.5,
        ) {
            let mut rng = crate::seeded_rng(seed);
            let p = random_psd(&mut rng, scale);
            let sigma = random_psd(&mut rng, scale);
            let start = exp_se3(&random_twist(&mut rng, 1.5));
            let belief = PoseBelief::new(start, p).unwrap();
            let out = belief.propagate(&exp_se3(&random_twist(&mut rng, 1.0)), &sigma);
            let diff = out.cov() - belief.cov();
            let eig = nalgebra::SymmetricEigen::new(diff);
            for ev in eig.eigenvalues.iter() {
                prop_assert!(*ev >= -1e-12);
            }
        }

        #[test]
        fn adjoint_is_multiplicative(seed in 0u64..1000) {
            let mut rng = crate::seeded_rng(seed);
            let t1 = exp_se3(&random_twist(&mut rng, 1.5));
            let t2 = exp_se3(&random_twist(&mut rng, 1.5));
            let lhs = adjoint(&t1.compose(&t2));
            let rhs = adjoint(&t1) * adjoint(&t2);
            prop_assert!((lhs - rhs).abs().max() < 1e-10);
        }
    }
}
