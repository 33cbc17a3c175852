//! Regret, comparator variation and bound evaluation.

mod bounds;
mod segmentation;

pub use bounds::{dfs_tracking_bound, theorem2_bound, theorem2_bound_profile, DfsBound};
pub use segmentation::{
    best_segmentation, best_segmentation_from_costs, deviation_table, tracking_decomposition,
    SegmentationResult, TrackingDecomposition,
};

use nalgebra::{DMatrix, DVector};

use crate::dynamics::DynamicalModel;
use crate::error::{Error, Result};
use crate::losses::{CompositeLoss, DataFit, LeastSquaresDatum};
use crate::point::ParameterPoint;

/// `theta_1 .. theta_{T+1}`. The regret sums use the first `T` points; the
/// last one enters only the variation measures.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparatorSequence {
    points: Vec<ParameterPoint>,
    label: String,
}

impl ComparatorSequence {
    pub fn new(points: Vec<ParameterPoint>, label: impl Into<String>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Argument("comparator sequence is empty".into()))?;
        for p in &points[1..] {
            p.check_same_shape(first)?;
        }
        Ok(Self {
            points,
            label: label.into(),
        })
    }

    /// Repeats one point `len` times.
    pub fn constant(point: ParameterPoint, len: usize, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![point; len], label)
    }

    pub fn points(&self) -> &[ParameterPoint] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of transitions, `len - 1`.
    pub fn transitions(&self) -> usize {
        self.points.len() - 1
    }
}

fn check_horizon(comparator: &ComparatorSequence, horizon: usize) -> Result<()> {
    if comparator.len() < horizon {
        return Err(Error::Argument(format!(
            "comparator has {} points, need at least {horizon}",
            comparator.len()
        )));
    }
    Ok(())
}

/// `sum_t l_t(theta^_t) - sum_t l_t(theta_t)` over the `T` rounds covered by
/// `losses` and `predictions`.
pub fn regret<F: DataFit>(
    losses: &[CompositeLoss<F>],
    predictions: &[ParameterPoint],
    comparator: &ComparatorSequence,
) -> Result<f64> {
    Ok(cumulative_regret(losses, predictions, comparator)?
        .last()
        .copied()
        .unwrap_or(0.0))
}

/// Running regret `R_1, .., R_T`.
pub fn cumulative_regret<F: DataFit>(
    losses: &[CompositeLoss<F>],
    predictions: &[ParameterPoint],
    comparator: &ComparatorSequence,
) -> Result<Vec<f64>> {
    if losses.len() != predictions.len() {
        return Err(Error::dimension(losses.len(), predictions.len()));
    }
    check_horizon(comparator, losses.len())?;
    let mut acc = 0.0;
    losses
        .iter()
        .zip(predictions)
        .zip(comparator.points())
        .map(|((l, p), c)| {
            acc += l.value(p)? - l.value(c)?;
            Ok(acc)
        })
        .collect()
}

/// Running differences of two per-round loss traces.
pub fn cumulative_difference(ours: &[f64], theirs: &[f64]) -> Result<Vec<f64>> {
    if ours.len() != theirs.len() {
        return Err(Error::dimension(ours.len(), theirs.len()));
    }
    let mut acc = 0.0;
    Ok(ours
        .iter()
        .zip(theirs)
        .map(|(a, b)| {
            acc += a - b;
            acc
        })
        .collect())
}

/// Regret against the best fixed point among `candidates`.
pub fn static_regret<F: DataFit>(
    losses: &[CompositeLoss<F>],
    predictions: &[ParameterPoint],
    candidates: &[ParameterPoint],
) -> Result<f64> {
    if losses.len() != predictions.len() {
        return Err(Error::dimension(losses.len(), predictions.len()));
    }
    if candidates.is_empty() {
        return Err(Error::Argument("no candidate points".into()));
    }
    let ours: f64 = losses
        .iter()
        .zip(predictions)
        .map(|(l, p)| l.value(p))
        .sum::<Result<f64>>()?;
    let mut best = f64::INFINITY;
    for c in candidates {
        let total: f64 = losses.iter().map(|l| l.value(c)).sum::<Result<f64>>()?;
        best = best.min(total);
    }
    Ok(ours - best)
}

/// Minimizer of `sum_t 1/2 ||x_t - A_t theta||^2` over all `theta`, from the
/// normal equations (pseudo-inverse when they are singular).
pub fn least_squares_batch_minimizer(data: &[LeastSquaresDatum]) -> Result<ParameterPoint> {
    let first = data
        .first()
        .ok_or_else(|| Error::Argument("no least-squares data".into()))?;
    let shape = first.shape();
    let d = shape.len();
    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    for datum in data {
        if datum.shape() != shape {
            return Err(Error::dimension(shape, datum.shape()));
        }
        gram += datum.matrix().tr_mul(datum.matrix());
        rhs += datum.matrix().tr_mul(datum.observation());
    }
    let solution = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::Domain(e.to_string()))?
            * rhs,
    };
    ParameterPoint::new(solution.as_slice().to_vec(), shape)
}

/// Static regret of an unregularized least-squares stream against its batch
/// minimizer.
pub fn static_regret_least_squares(
    data: &[LeastSquaresDatum],
    predictions: &[ParameterPoint],
) -> Result<f64> {
    if data.len() != predictions.len() {
        return Err(Error::dimension(data.len(), predictions.len()));
    }
    let best = least_squares_batch_minimizer(data)?;
    let mut total = 0.0;
    for (datum, p) in data.iter().zip(predictions) {
        total += datum.value(p)? - datum.value(&best)?;
    }
    Ok(total)
}

/// `sum_t ||theta_{t+1} - theta_t||`.
pub fn variation(comparator: &ComparatorSequence) -> f64 {
    comparator
        .points()
        .windows(2)
        .map(|w| w[1].distance(&w[0]))
        .sum()
}

/// `sum_t ||theta_{t+1} - Phi_t(theta_t)||`.
pub fn variation_phi(comparator: &ComparatorSequence, model: &DynamicalModel) -> Result<f64> {
    Ok(variation_phi_profile(comparator, model)?
        .last()
        .copied()
        .unwrap_or(0.0))
}

/// Running sums of [`variation_phi`]: entry `t - 1` covers transitions
/// `1..=t`.
pub fn variation_phi_profile(comparator: &ComparatorSequence, model: &DynamicalModel) -> Result<Vec<f64>> {
    let mut acc = 0.0;
    comparator
        .points()
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            acc += w[1].distance(&model.apply(&w[0], i as u64 + 1)?);
            Ok(acc)
        })
        .collect()
}
