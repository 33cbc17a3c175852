//! Dynamic mirror descent.
//!
//! One round:
//!
//! ```text
//! theta~_{t+1} = argmin_{theta in Theta} eta_t <grad f_t(theta^_t), theta> + eta_t r(theta) + D(theta || theta^_t)
//! theta^_{t+1} = Phi_t(theta~_{t+1})
//! ```
//!
//! With the identity model this is composite objective mirror descent
//! (COMID). For `psi = c ||.||^2` and an l1 (or absent) regularizer on a
//! box or unconstrained set the argmin is a gradient step with step
//! `eta / 2c`, a soft threshold at `eta tau / 2c`, and a clamp. Because
//! the problem is separable, the clamp of the one-dimensional minimizer is
//! the constrained minimizer, for any box. Other combinations use a
//! projected subgradient loop.

use crate::dynamics::DynamicalModel;
use crate::error::{Error, Result};
use crate::geometry::{BoundConstants, BregmanGeometry, FeasibleSet, StepSchedule};
use crate::losses::{CompositeLoss, DataFit, Regularizer};
use crate::point::{self, ParameterPoint, Shape};

const INNER_ITERATIONS: usize = 200;
const INNER_REL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct DmdConfig {
    pub geometry: BregmanGeometry,
    pub set: FeasibleSet,
    pub schedule: StepSchedule,
    pub model: DynamicalModel,
    /// Apply the regularizer's prox only when `t % reg_period == 0`.
    pub reg_period: u64,
}

impl DmdConfig {
    pub fn new(geometry: BregmanGeometry, set: FeasibleSet, schedule: StepSchedule, model: DynamicalModel) -> Self {
        Self {
            geometry,
            set,
            schedule,
            model,
            reg_period: 1,
        }
    }

    pub fn with_reg_period(mut self, reg_period: u64) -> Self {
        self.reg_period = reg_period;
        self
    }
}

/// Learner state `(theta^_t, theta~_t)` plus its configuration.
#[derive(Clone, Debug)]
pub struct DmdState {
    theta_hat: ParameterPoint,
    theta_tilde: ParameterPoint,
    config: DmdConfig,
    diagnostics: bool,
}

/// Per-step output. `loss` is `l_t(theta^_t)`, the loss of the prediction
/// held when the round started.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub eta: f64,
    pub loss: f64,
    pub diagnostics: Option<StepDiagnostics>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepDiagnostics {
    /// `||grad f_t(theta^_t) + tau sign(theta^_t)||`.
    pub subgradient_norm: f64,
    /// `D(theta~_{t+1} || theta^_t)`.
    pub step_divergence: f64,
    pub prox_applied: bool,
}

impl DmdState {
    /// Starts at `theta^_1 = 0` (projected onto the feasible set).
    pub fn new(config: DmdConfig, shape: Shape) -> Result<Self> {
        if config.reg_period == 0 {
            return Err(Error::Argument("reg_period must be >= 1".into()));
        }
        if config.set.dim() != shape.len() {
            return Err(Error::dimension(config.set.dim(), shape));
        }
        if let Some(model_shape) = config.model.shape() {
            if model_shape != shape {
                return Err(Error::dimension(model_shape, shape));
            }
        }
        let mut start = ParameterPoint::zeros(shape);
        config.set.project_in_place(start.as_mut_slice());
        Ok(Self {
            theta_hat: start.clone(),
            theta_tilde: start,
            config,
            diagnostics: false,
        })
    }

    /// Warm start: `theta^_1` is the projection of `start`.
    pub fn starting_at(mut self, start: &ParameterPoint) -> Result<Self> {
        start.check_shape(self.theta_hat.shape())?;
        let mut p = start.clone();
        self.config.set.project_in_place(p.as_mut_slice());
        self.theta_tilde = p.clone();
        self.theta_hat = p;
        Ok(self)
    }

    pub fn with_diagnostics(mut self, enabled: bool) -> Self {
        self.diagnostics = enabled;
        self
    }

    /// Current prediction `theta^_t`.
    pub fn prediction(&self) -> &ParameterPoint {
        &self.theta_hat
    }

    pub fn theta_tilde(&self) -> &ParameterPoint {
        &self.theta_tilde
    }

    pub fn config(&self) -> &DmdConfig {
        &self.config
    }

    pub fn model(&self) -> &DynamicalModel {
        &self.config.model
    }

    pub fn shape(&self) -> Shape {
        self.theta_hat.shape()
    }

    /// One DMD round at time `t`.
    pub fn step<F: DataFit>(&mut self, loss: &CompositeLoss<F>, t: u64) -> Result<StepReport> {
        let apply_prox = t.is_multiple_of(self.config.reg_period);
        let report = self.composite_step(loss, t, apply_prox)?;
        self.theta_hat = self.config.model.apply(&self.theta_tilde, t)?;
        Ok(report)
    }

    /// One COMID round: prox every step, no dynamics.
    pub fn comid_step<F: DataFit>(&mut self, loss: &CompositeLoss<F>, t: u64) -> Result<StepReport> {
        let report = self.composite_step(loss, t, true)?;
        self.theta_hat = self.theta_tilde.clone();
        Ok(report)
    }

    fn composite_step<F: DataFit>(&mut self, loss: &CompositeLoss<F>, t: u64, apply_prox: bool) -> Result<StepReport> {
        self.theta_hat.check_shape(loss.shape())?;
        let eta = self.config.schedule.step_size(t)?;
        let (value, grad) = loss.value_and_fit_gradient(&self.theta_hat)?;
        if !grad.is_finite() {
            return Err(Error::Numeric { step: t, what: "gradient" });
        }
        if !value.is_finite() {
            return Err(Error::Numeric { step: t, what: "loss" });
        }
        let reg = if apply_prox { loss.reg } else { Regularizer::None };
        let next = self.solve_composite(grad.as_slice(), reg, eta);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric { step: t, what: "iterate" });
        }

        let diagnostics = self.diagnostics.then(|| {
            let mut sub = grad.as_slice().to_vec();
            loss.reg.add_subgradient(self.theta_hat.as_slice(), &mut sub);
            StepDiagnostics {
                subgradient_norm: point::norm(&sub),
                step_divergence: self.config.geometry.divergence(&next, self.theta_hat.as_slice()),
                prox_applied: apply_prox,
            }
        });
        self.theta_tilde = ParameterPoint::from_parts(next, self.theta_hat.shape());
        Ok(StepReport {
            eta,
            loss: value,
            diagnostics,
        })
    }

    /// `argmin_{theta in Theta} eta <g, theta> + eta r(theta) + D(theta || theta^)`.
    fn solve_composite(&self, grad: &[f64], reg: Regularizer, eta: f64) -> Vec<f64> {
        let cfg = &self.config;
        let hat = self.theta_hat.as_slice();
        if let Some(c) = cfg.geometry.euclidean_scale() {
            let kappa = eta / (2.0 * c);
            let mut v: Vec<f64> = hat.iter().zip(grad).map(|(h, g)| h - kappa * g).collect();
            reg.prox_in_place(&mut v, kappa);
            cfg.set.project_in_place(&mut v);
            if reg.is_none() || cfg.set.is_separable() {
                return v;
            }
            return inner_loop(&cfg.geometry, &cfg.set, hat, grad, reg, eta, v);
        }
        inner_loop(&cfg.geometry, &cfg.set, hat, grad, reg, eta, hat.to_vec())
    }
}

/// Projected subgradient descent on the composite objective with steps
/// `1 / (sigma k)`; returns the best iterate seen.
fn inner_loop(
    geom: &BregmanGeometry,
    set: &FeasibleSet,
    hat: &[f64],
    grad: &[f64],
    reg: Regularizer,
    eta: f64,
    start: Vec<f64>,
) -> Vec<f64> {
    let objective = |x: &[f64]| eta * point::dot(grad, x) + eta * reg.value(x) + geom.divergence(x, hat);
    let grad_psi_hat = geom.grad_psi(hat);
    let mut x = start;
    set.project_in_place(&mut x);
    let mut best_val = objective(&x);
    let mut best = x.clone();
    let mut prev = best_val;
    for k in 1..=INNER_ITERATIONS {
        let mut s: Vec<f64> = geom
            .grad_psi(&x)
            .iter()
            .zip(&grad_psi_hat)
            .zip(grad)
            .map(|((gx, gh), g)| eta * g + gx - gh)
            .collect();
        let mut reg_sub = vec![0.0; x.len()];
        reg.add_subgradient(&x, &mut reg_sub);
        for (si, ri) in s.iter_mut().zip(&reg_sub) {
            *si += eta * ri;
        }
        let step = 1.0 / (geom.sigma() * k as f64);
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi -= step * si;
        }
        set.project_in_place(&mut x);
        let val = objective(&x);
        if val < best_val {
            best_val = val;
            best.copy_from_slice(&x);
        }
        if (prev - val).abs() <= INNER_REL_TOL * prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        prev = val;
    }
    best
}

pub fn dmd_step<F: DataFit>(state: &mut DmdState, loss: &CompositeLoss<F>, t: u64) -> Result<StepReport> {
    state.step(loss, t)
}

pub fn comid_step<F: DataFit>(state: &mut DmdState, loss: &CompositeLoss<F>, t: u64) -> Result<StepReport> {
    state.comid_step(loss, t)
}

/// Quantities of the per-round tracking inequality that do not depend on
/// the bound constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaTerms {
    pub eta: f64,
    /// `l_t(theta^_t) - l_t(theta_t)`.
    pub excess_loss: f64,
    /// `D(theta_t || theta^_t)`.
    pub divergence_now: f64,
    /// `D(theta_{t+1} || theta^_{t+1})`.
    pub divergence_next: f64,
    /// `||theta_{t+1} - Phi_t(theta_t)||`.
    pub deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaCheck {
    pub holds: bool,
    /// `rhs - lhs`.
    pub slack: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Relative tolerance for floating-point rounding in [`LemmaTerms::check`].
pub const LEMMA_TOLERANCE: f64 = 1e-10;

impl LemmaTerms {
    /// Evaluates
    /// `l_t(theta^_t) - l_t(theta_t) <= [D_t - D_{t+1}] / eta + 4M/eta ||theta_{t+1} - Phi(theta_t)|| + eta G^2 / (2 sigma)`.
    pub fn check(&self, c: &BoundConstants) -> LemmaCheck {
        let rhs = (self.divergence_now - self.divergence_next) / self.eta
            + 4.0 * c.m / self.eta * self.deviation
            + self.eta / (2.0 * c.sigma) * c.g_ell * c.g_ell;
        let lhs = self.excess_loss;
        let slack = rhs - lhs;
        let scale = 1.0f64.max(lhs.abs()).max((self.divergence_now / self.eta).abs());
        LemmaCheck {
            holds: slack >= -LEMMA_TOLERANCE * scale,
            slack,
            lhs,
            rhs,
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn lemma1_terms<F: DataFit>(
    geom: &BregmanGeometry,
    model: &DynamicalModel,
    loss: &CompositeLoss<F>,
    eta: f64,
    prediction_now: &ParameterPoint,
    prediction_next: &ParameterPoint,
    comparator_now: &ParameterPoint,
    comparator_next: &ParameterPoint,
    t: u64,
) -> Result<LemmaTerms> {
    comparator_now.check_same_shape(prediction_now)?;
    comparator_next.check_same_shape(prediction_next)?;
    let followed = model.apply(comparator_now, t)?;
    Ok(LemmaTerms {
        eta,
        excess_loss: loss.value(prediction_now)? - loss.value(comparator_now)?,
        divergence_now: geom.divergence(comparator_now.as_slice(), prediction_now.as_slice()),
        divergence_next: geom.divergence(comparator_next.as_slice(), prediction_next.as_slice()),
        deviation: comparator_next.distance(&followed),
    })
}

/// Checks the per-round inequality for the step that took `before` to
/// `after` at time `t`, against the comparator pair `(theta_t, theta_{t+1})`.
/// Assumes the model's contraction audit passed (the `Delta_Phi` term is
/// dropped). A failure is reported in the result, not as an error.
pub fn lemma1_check<F: DataFit>(
    before: &DmdState,
    after: &DmdState,
    loss: &CompositeLoss<F>,
    comparator: (&ParameterPoint, &ParameterPoint),
    constants: &BoundConstants,
    t: u64,
) -> Result<LemmaCheck> {
    let eta = before.config.schedule.step_size(t)?;
    let terms = lemma1_terms(
        &before.config.geometry,
        &before.config.model,
        loss,
        eta,
        before.prediction(),
        after.prediction(),
        comparator.0,
        comparator.1,
        t,
    )?;
    Ok(terms.check(constants))
}
