use super::{BregmanGeometry, FeasibleSet};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::losses::{CompositeLoss, DataFit};
use crate::point::ParameterPoint;

/// Constants of the tracking-regret bounds.
///
/// Suprema over the feasible set are not computable in general; the values
/// here are maxima over a sample and therefore lower bounds on the true
/// constants.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundConstants {
    /// Largest loss subgradient norm `||grad f + tau sign||`.
    pub g_ell: f64,
    /// Half the largest `||grad psi||`.
    pub m: f64,
    /// Largest Bregman divergence between two sampled points.
    pub d_max: f64,
    pub sigma: f64,
}

/// Running maxima for [`BoundConstants`]; estimates only grow as samples
/// are added.
#[derive(Clone, Debug)]
pub struct BoundConstantsEstimator {
    geom: BregmanGeometry,
    g_ell: f64,
    m: f64,
    d_max: f64,
    observations: usize,
}

impl BoundConstantsEstimator {
    pub fn new(geom: BregmanGeometry) -> Self {
        Self {
            geom,
            g_ell: 0.0,
            m: 0.0,
            d_max: 0.0,
            observations: 0,
        }
    }

    /// Records `||subgradient of loss at point||`.
    pub fn observe_loss<F: DataFit>(&mut self, loss: &CompositeLoss<F>, point: &ParameterPoint) -> Result<()> {
        let n = loss.subgradient_norm(point)?;
        self.observe_subgradient_norm(n);
        Ok(())
    }

    pub fn observe_subgradient_norm(&mut self, norm: f64) {
        self.g_ell = self.g_ell.max(norm);
        self.observations += 1;
    }

    pub fn observe_point(&mut self, point: &[f64]) {
        self.m = self.m.max(0.5 * self.geom.grad_psi_norm(point));
        self.observations += 1;
    }

    /// Records `D(a || b)` and `D(b || a)`.
    pub fn observe_pair(&mut self, a: &[f64], b: &[f64]) {
        let d = self.geom.divergence(a, b).max(self.geom.divergence(b, a));
        self.d_max = self.d_max.max(d);
        self.observations += 1;
    }

    /// Records every ordered pair among `points`.
    pub fn observe_all_pairs(&mut self, points: &[&[f64]], exec: Execution) {
        let geom = self.geom;
        let best = exec::max_indexed(exec, points.len(), |i| {
            points[..i]
                .iter()
                .map(|q| geom.divergence(points[i], q).max(geom.divergence(q, points[i])))
                .fold(0.0, f64::max)
        });
        self.d_max = self.d_max.max(best);
        self.observations += points.len();
    }

    pub fn observations(&self) -> usize {
        self.observations
    }

    pub fn current(&self) -> BoundConstants {
        BoundConstants {
            g_ell: self.g_ell,
            m: self.m,
            d_max: self.d_max,
            sigma: self.geom.sigma(),
        }
    }
}

/// Sampled constants over every (loss, point) pair and every pair of points.
///
/// All points must lie in `set`; the result is deterministic in the sample.
pub fn estimate_bound_constants<F: DataFit>(
    geom: &BregmanGeometry,
    set: &FeasibleSet,
    losses: &[CompositeLoss<F>],
    points: &[ParameterPoint],
    exec: Execution,
) -> Result<BoundConstants> {
    if losses.is_empty() || points.is_empty() {
        return Err(Error::Argument(
            "bound constants need at least one loss and one point".into(),
        ));
    }
    if let Some(i) = points.iter().position(|p| !set.contains(p.as_slice())) {
        return Err(Error::Domain(format!("sample point {i} is outside the feasible set")));
    }
    let mut est = BoundConstantsEstimator::new(*geom);
    let norms = exec::map_indexed(exec, losses.len() * points.len(), |k| {
        losses[k / points.len()].subgradient_norm(&points[k % points.len()])
    });
    for n in norms {
        est.observe_subgradient_norm(n?);
    }
    for p in points {
        est.observe_point(p.as_slice());
    }
    let slices: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    est.observe_all_pairs(&slices, exec);
    Ok(est.current())
}
