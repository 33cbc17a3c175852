//! Composite losses `l_t = f_t + r`.

mod ising;
mod l1;
mod least_squares;

pub use ising::{
    ising_pl_components, ising_pl_gradient, ising_pl_value, IsingPseudolikelihood, VoteDatum,
};
pub use l1::{l1_prox, soft_threshold, L1Regularizer};
pub use least_squares::{ls_gradient, ls_value, LeastSquaresDatum};

use crate::error::Result;
use crate::point::{ParameterPoint, Shape};

/// Smooth, convex, time-indexed data-fit term `f_t`.
pub trait DataFit: Send + Sync {
    /// Shape of the parameter the term is defined on.
    fn shape(&self) -> Shape;

    fn value(&self, theta: &ParameterPoint) -> Result<f64>;

    fn gradient(&self, theta: &ParameterPoint) -> Result<ParameterPoint>;

    /// Value and gradient, sharing intermediate work where possible.
    fn value_and_gradient(&self, theta: &ParameterPoint) -> Result<(f64, ParameterPoint)> {
        Ok((self.value(theta)?, self.gradient(theta)?))
    }
}

impl<F: DataFit + ?Sized> DataFit for &F {
    fn shape(&self) -> Shape {
        (**self).shape()
    }
    fn value(&self, theta: &ParameterPoint) -> Result<f64> {
        (**self).value(theta)
    }
    fn gradient(&self, theta: &ParameterPoint) -> Result<ParameterPoint> {
        (**self).gradient(theta)
    }
    fn value_and_gradient(&self, theta: &ParameterPoint) -> Result<(f64, ParameterPoint)> {
        (**self).value_and_gradient(theta)
    }
}

/// Time-invariant regularizer `r`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Regularizer {
    #[default]
    None,
    L1(L1Regularizer),
}

impl Regularizer {
    pub fn value(&self, theta: &[f64]) -> f64 {
        match self {
            Regularizer::None => 0.0,
            Regularizer::L1(l1) => l1.value(theta),
        }
    }

    /// Adds the subgradient `tau * sign(theta)` (0 at 0) into `grad`.
    pub(crate) fn add_subgradient(&self, theta: &[f64], grad: &mut [f64]) {
        if let Regularizer::L1(l1) = self {
            for (g, v) in grad.iter_mut().zip(theta) {
                if *v != 0.0 {
                    *g += l1.tau * v.signum();
                }
            }
        }
    }

    pub(crate) fn prox_in_place(&self, v: &mut [f64], kappa: f64) {
        if let Regularizer::L1(l1) = self {
            let thr = kappa * l1.tau;
            for x in v.iter_mut() {
                *x = soft_threshold(*x, thr);
            }
        }
    }

    pub fn is_none(&self) -> bool {
        match self {
            Regularizer::None => true,
            Regularizer::L1(l1) => l1.tau == 0.0,
        }
    }
}

/// `l(theta) = f(theta) + r(theta)`.
#[derive(Clone, Debug)]
pub struct CompositeLoss<F> {
    pub fit: F,
    pub reg: Regularizer,
}

impl<F: DataFit> CompositeLoss<F> {
    pub fn new(fit: F, reg: Regularizer) -> Self {
        Self { fit, reg }
    }

    pub fn shape(&self) -> Shape {
        self.fit.shape()
    }

    pub fn value(&self, theta: &ParameterPoint) -> Result<f64> {
        Ok(self.fit.value(theta)? + self.reg.value(theta.as_slice()))
    }

    /// `grad f(theta) + tau * sign(theta)`.
    pub fn subgradient(&self, theta: &ParameterPoint) -> Result<ParameterPoint> {
        let mut g = self.fit.gradient(theta)?;
        self.reg.add_subgradient(theta.as_slice(), g.as_mut_slice());
        Ok(g)
    }

    pub fn subgradient_norm(&self, theta: &ParameterPoint) -> Result<f64> {
        Ok(self.subgradient(theta)?.norm())
    }

    /// `(l(theta), grad f(theta))`.
    pub fn value_and_fit_gradient(&self, theta: &ParameterPoint) -> Result<(f64, ParameterPoint)> {
        let (f, g) = self.fit.value_and_gradient(theta)?;
        Ok((f + self.reg.value(theta.as_slice()), g))
    }
}
