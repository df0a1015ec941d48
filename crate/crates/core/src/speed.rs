//! Speed laws: harmonic mean curvature, its regularization, the switched
//! speed used for viscosity solutions, and the level-set operator built on it.
//!
//! Positive speed moves the surface inward along the outer normal.

use nalgebra::{Matrix3, Vector3};

use crate::error::{HmcfError, Result};

/// Parameters shared by the solver and its monitors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    /// Regularization weight of the `eps H` term.
    pub epsilon: f64,
    /// Switching threshold of [`modified_speed`], in `(0, 1)`.
    pub delta1: f64,
    /// Time offset of the shifted monotone quantity `q_eta`.
    pub eta: f64,
    /// Fraction of the explicit stability limit used per step.
    pub dt_safety: f64,
    /// Extinction threshold as a fraction of the initial area.
    pub area_floor_fraction: f64,
    /// Relative tolerance on uniform node spacing.
    pub grid_tol: f64,
    /// Tolerance for quadrature identities such as total curvature.
    pub quadrature_tol: f64,
    /// Slack of monotonicity checks relative to the initial value.
    pub monotone_slack: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            epsilon: 0.0,
            delta1: 0.2,
            eta: 0.1,
            dt_safety: 0.4,
            area_floor_fraction: 1e-4,
            grid_tol: 1e-8,
            quadrature_tol: 5e-3,
            monotone_slack: 1e-6,
        }
    }
}

impl FlowParams {
    pub fn with_epsilon(epsilon: f64) -> Self {
        FlowParams { epsilon, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HmcfError::InvalidParameter(msg));
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be >= 0, got {}", self.epsilon));
        }
        if !(self.delta1 > 0.0 && self.delta1 < 1.0) {
            return bad(format!("delta1 out of (0,1): {}", self.delta1));
        }
        if !self.eta.is_finite() {
            return bad(format!("eta must be finite, got {}", self.eta));
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return bad(format!("dt_safety out of (0,1]: {}", self.dt_safety));
        }
        if !(self.area_floor_fraction > 0.0 && self.area_floor_fraction < 1.0) {
            return bad(format!("area_floor out of (0,1): {}", self.area_floor_fraction));
        }
        for (name, v) in [
            ("grid_tol", self.grid_tol),
            ("quadrature_tol", self.quadrature_tol),
            ("monotone_slack", self.monotone_slack),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be >= 0, got {v}"));
            }
        }
        Ok(())
    }
}

/// Harmonic mean curvature `G/H`.
pub fn kappa(lambda1: f64, lambda2: f64) -> Result<f64> {
    let h = lambda1 + lambda2;
    if !(h > 0.0) {
        return Err(HmcfError::SpeedUndefined(h));
    }
    Ok(lambda1 * lambda2 / h)
}

/// Regularized speed `G/H + eps H`.
pub fn kappa_eps(lambda1: f64, lambda2: f64, epsilon: f64) -> Result<f64> {
    Ok(kappa(lambda1, lambda2)? + epsilon * (lambda1 + lambda2))
}

/// Switched speed: `G/H` while `lambda_min / lambda_max >= -delta1`,
/// `lambda_min / (1 - delta1)` beyond. Both branches agree on the switch.
/// The arguments may come in either order.
pub fn modified_speed(lambda1: f64, lambda2: f64, delta1: f64) -> Result<f64> {
    let (hi, lo) = if lambda1 >= lambda2 { (lambda1, lambda2) } else { (lambda2, lambda1) };
    if !(hi > 0.0) {
        return Err(HmcfError::NotMeanConvexAtScale(hi));
    }
    if lo / hi >= -delta1 {
        kappa(hi, lo)
    } else {
        Ok(lo / (1.0 - delta1))
    }
}

const GRADIENT_FLOOR: f64 = 1e-12;

fn unit_gradient(p: &Vector3<f64>) -> Result<(f64, Vector3<f64>)> {
    let norm = p.norm();
    if !(norm > GRADIENT_FLOOR) {
        return Err(HmcfError::GradientDegenerate(norm));
    }
    Ok((norm, p / norm))
}

/// Principal curvatures `(lambda1 >= lambda2)` of the level set of `u`
/// through a point with `grad u = p`, `hess u = x`, oriented by `p`.
pub fn levelset_curvatures(p: &Vector3<f64>, x: &Matrix3<f64>) -> Result<(f64, f64)> {
    let (norm, n) = unit_gradient(p)?;
    let proj = Matrix3::identity() - n * n.transpose();
    let m = proj * x * proj / norm;
    // orthonormal basis of the tangent plane, seeded by the axis least aligned with n
    let axis = n.iamin();
    let mut seed = Vector3::zeros();
    seed[axis] = 1.0;
    let e1 = n.cross(&seed).normalize();
    let e2 = n.cross(&e1);
    let a = e1.dot(&(m * e1));
    let b = 0.5 * (e1.dot(&(m * e2)) + e2.dot(&(m * e1)));
    let d = e2.dot(&(m * e2));
    let mid = 0.5 * (a + d);
    let rad = (0.5 * (a - d)).hypot(b);
    Ok((mid + rad, mid - rad))
}

/// Level-set operator `F_1(p, X)`: minus the switched speed of the level set,
/// so that `u_t + F_1 = 0` moves level sets with that speed.
pub fn levelset_speed_f1(p: &Vector3<f64>, x: &Matrix3<f64>, delta1: f64) -> Result<f64> {
    let (l1, l2) = levelset_curvatures(p, x)?;
    if l1 == 0.0 && l2 == 0.0 {
        return Ok(0.0);
    }
    Ok(-modified_speed(l1, l2, delta1)?)
}

/// The first branch of `F_1` from invariants of the projected Hessian,
/// `-sigma_2(PXP) / (|p| tr(PX))`, without any eigen-decomposition.
pub fn levelset_speed_f1_trace_det(p: &Vector3<f64>, x: &Matrix3<f64>) -> Result<f64> {
    let (norm, n) = unit_gradient(p)?;
    let proj = Matrix3::identity() - n * n.transpose();
    let m = proj * x * proj;
    let tr = (proj * x).trace();
    let sigma2 = 0.5 * (tr * tr - (m * m).trace());
    if tr == 0.0 && sigma2 == 0.0 {
        return Ok(0.0);
    }
    if !(tr > 0.0) {
        return Err(HmcfError::SpeedUndefined(tr / norm));
    }
    Ok(-sigma2 / (norm * tr))
}
