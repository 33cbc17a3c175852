//! Dynamic fixed share: exponentially weighted aggregation of DMD experts,
//! one per candidate dynamical model, with a uniform sharing step so that
//! demoted experts can recover.

use crate::dmd::{DmdState, StepReport};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::StepSchedule;
use crate::losses::{CompositeLoss, DataFit};
use crate::point::ParameterPoint;

#[derive(Clone, Debug)]
pub struct FixedShareState {
    weights: Vec<f64>,
    eta_r: StepSchedule,
    lambda: f64,
    experts: Vec<DmdState>,
    exec: Execution,
}

/// What happened in one round.
#[derive(Clone, Debug)]
pub struct DfsRound {
    /// Aggregated prediction `theta^_t` (formed from the weights before this
    /// round's losses were seen).
    pub prediction: ParameterPoint,
    /// `l_t(theta^_t)`.
    pub loss: f64,
    /// `l_t(theta^_t^(i))` per expert.
    pub expert_losses: Vec<f64>,
    pub expert_reports: Vec<StepReport>,
}

impl FixedShareState {
    /// Starts from uniform weights. All experts must share a shape and a
    /// feasible set.
    pub fn new(experts: Vec<DmdState>, eta_r: StepSchedule, lambda: f64) -> Result<Self> {
        let first = experts
            .first()
            .ok_or_else(|| Error::Argument("fixed share needs at least one expert".into()))?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Argument(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        for e in &experts[1..] {
            if e.shape() != first.shape() {
                return Err(Error::dimension(first.shape(), e.shape()));
            }
            if e.config().set != first.config().set {
                return Err(Error::Argument("experts must share a feasible set".into()));
            }
        }
        let n = experts.len();
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
            eta_r,
            lambda,
            experts,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn experts(&self) -> &[DmdState] {
        &self.experts
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    /// `sum_i w_i theta^(i) / sum_i w_i` under the current weights.
    pub fn aggregate_prediction(&self) -> ParameterPoint {
        let preds: Vec<&ParameterPoint> = self.experts.iter().map(DmdState::prediction).collect();
        weighted_mean(&self.weights, &preds)
    }

    /// One round at time `t`: predict, let every expert suffer its loss and
    /// advance, then reweight.
    pub fn step<F: DataFit>(&mut self, loss: &CompositeLoss<F>, t: u64) -> Result<DfsRound> {
        let prediction = self.aggregate_prediction();
        let value = loss.value(&prediction)?;
        let reports: Vec<StepReport> = exec::map_mut(self.exec, &mut self.experts, |_, e| e.step(loss, t))
            .into_iter()
            .collect::<Result<_>>()?;
        let expert_losses: Vec<f64> = reports.iter().map(|r| r.loss).collect();
        let eta_r = self.eta_r.step_size(t)?;
        update_weights(&mut self.weights, &expert_losses, eta_r, self.lambda)
            .map_err(|e| match e {
                Error::Numeric { what, .. } => Error::Numeric { step: t, what },
                other => other,
            })?;
        Ok(DfsRound {
            prediction,
            loss: value,
            expert_losses,
            expert_reports: reports,
        })
    }
}

fn weighted_mean(weights: &[f64], points: &[&ParameterPoint]) -> ParameterPoint {
    let shape = points[0].shape();
    let total: f64 = weights.iter().sum();
    let mut out = vec![0.0; shape.len()];
    for (w, p) in weights.iter().zip(points) {
        for (o, v) in out.iter_mut().zip(p.as_slice()) {
            *o += w * v;
        }
    }
    for o in &mut out {
        *o /= total;
    }
    ParameterPoint::from_parts(out, shape)
}

/// Exponential reweighting followed by sharing:
///
/// ```text
/// w~_i = w_i exp(-eta_r l_i)
/// w_i  = (lambda / N) sum_j w~_j + (1 - lambda) w~_i
/// ```
///
/// computed in log space with max subtraction and renormalized to sum 1.
pub fn update_weights(weights: &mut [f64], losses: &[f64], eta_r: f64, lambda: f64) -> Result<()> {
    if weights.len() != losses.len() {
        return Err(Error::dimension(weights.len(), losses.len()));
    }
    if weights.is_empty() {
        return Err(Error::Argument("no weights to update".into()));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Argument(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    if !(eta_r >= 0.0 && eta_r.is_finite()) {
        return Err(Error::Argument(format!("eta_r must be nonnegative, got {eta_r}")));
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(Error::Numeric { step: 0, what: "expert loss" });
    }
    let logs: Vec<f64> = weights
        .iter()
        .zip(losses)
        .map(|(w, l)| w.ln() - eta_r * l)
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::Numeric { step: 0, what: "weights" });
    }
    for (w, lw) in weights.iter_mut().zip(&logs) {
        *w = (lw - top).exp();
    }
    let n = weights.len() as f64;
    let sum: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w = lambda / n + (1.0 - lambda) * (*w / sum);
    }
    let sum: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= sum;
    }
    Ok(())
}

/// `m / T`, the usual sharing rate for `m` expected switches over `T` rounds.
pub fn default_lambda(m: u64, horizon: u64) -> Result<f64> {
    if m >= horizon {
        return Err(Error::Argument(format!(
            "expected switch count {m} must be below the horizon {horizon}"
        )));
    }
    Ok(m as f64 / horizon as f64)
}

pub fn dfs_step<F: DataFit>(state: &mut FixedShareState, loss: &CompositeLoss<F>, t: u64) -> Result<DfsRound> {
    state.step(loss, t)
}

pub fn aggregate_prediction(state: &FixedShareState) -> ParameterPoint {
    state.aggregate_prediction()
}
