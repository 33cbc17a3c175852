use crate::error::{Error, Result};
use crate::point::ParameterPoint;

/// `r(theta) = tau * ||theta||_1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct L1Regularizer {
    pub tau: f64,
}

impl L1Regularizer {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::Argument(format!("tau must be >= 0, got {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        self.tau * theta.iter().map(|v| v.abs()).sum::<f64>()
    }
}

#[inline]
pub fn soft_threshold(v: f64, threshold: f64) -> f64 {
    v.signum() * (v.abs() - threshold).max(0.0)
}

/// `argmin_u 1/2 ||u - v||^2 + kappa * tau * ||u||_1`, componentwise.
pub fn l1_prox(reg: &L1Regularizer, v: &ParameterPoint, kappa: f64) -> Result<ParameterPoint> {
    if !(kappa > 0.0) {
        return Err(Error::Argument(format!("prox scale must be positive, got {kappa}")));
    }
    let thr = kappa * reg.tau;
    let values = v.as_slice().iter().map(|x| soft_threshold(*x, thr)).collect();
    Ok(ParameterPoint::from_parts(values, v.shape()))
}
