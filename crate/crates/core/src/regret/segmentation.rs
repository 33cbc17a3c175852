use crate::dynamics::DynamicalModel;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

use super::ComparatorSequence;

/// Best assignment of per-step costs to at most `m + 1` constant-model
/// segments.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationResult {
    /// Steps (1-based) at which a new segment starts, excluding step 1.
    pub switch_times: Vec<usize>,
    /// Model index of each segment, in order.
    pub models: Vec<usize>,
    /// Summed cost of the chosen segmentation.
    pub total: f64,
    /// Switch budget.
    pub m: usize,
    /// Number of steps covered.
    pub steps: usize,
}

impl SegmentationResult {
    /// Model index used at step `t` (1-based).
    pub fn model_at(&self, t: usize) -> usize {
        let k = self.switch_times.partition_point(|&s| s <= t);
        self.models[k]
    }

    /// Model index for every step.
    pub fn path(&self) -> Vec<usize> {
        (1..=self.steps).map(|t| self.model_at(t)).collect()
    }
}

/// `d[i][t] = ||theta_{t+2} - Phi^(i)_{t+1}(theta_{t+1})||` (0-based `t`),
/// one row per model.
pub fn deviation_table(
    comparator: &ComparatorSequence,
    models: &[DynamicalModel],
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    let pts = comparator.points();
    exec::map_indexed(exec, models.len(), |i| {
        pts.windows(2)
            .enumerate()
            .map(|(t, w)| Ok(w[1].distance(&models[i].apply(&w[0], t as u64 + 1)?)))
            .collect::<Result<Vec<f64>>>()
    })
    .into_iter()
    .collect()
}

/// `V^(m+1)`: the smallest total deviation of the comparator from a
/// sequence of models with at most `m` switches.
pub fn best_segmentation(
    comparator: &ComparatorSequence,
    models: &[DynamicalModel],
    m: usize,
    exec: Execution,
) -> Result<SegmentationResult> {
    if models.is_empty() {
        return Err(Error::Argument("no models to segment with".into()));
    }
    let costs = deviation_table(comparator, models, exec)?;
    best_segmentation_from_costs(&costs, m)
}

/// Minimizes `sum_t costs[i_t][t]` over index sequences with at most `m`
/// changes. Runs in `O(T m N)` time.
#[allow(clippy::needless_range_loop)]
pub fn best_segmentation_from_costs(costs: &[Vec<f64>], m: usize) -> Result<SegmentationResult> {
    let n = costs.len();
    if n == 0 {
        return Err(Error::Argument("no cost rows".into()));
    }
    let steps = costs[0].len();
    if let Some(bad) = costs.iter().find(|c| c.len() != steps) {
        return Err(Error::dimension(steps, bad.len()));
    }
    if steps == 0 {
        return Err(Error::Argument("no steps to segment".into()));
    }
    if m >= steps {
        return Err(Error::Argument(format!(
            "switch budget {m} must be below the number of steps {steps}"
        )));
    }
    let width = m + 1;
    // best[k * n + i]: cheapest prefix ending in model i using at most k switches.
    let mut best: Vec<f64> = (0..width).flat_map(|_| (0..n).map(|i| costs[i][0])).collect();
    // came_from[t][k * n + i]: model at step t - 1 on that optimal prefix.
    let mut came_from: Vec<Vec<u32>> = Vec::with_capacity(steps);
    came_from.push((0..width * n).map(|ki| (ki % n) as u32).collect());
    for t in 1..steps {
        let mut next = vec![0.0; width * n];
        let mut from = vec![0u32; width * n];
        for k in 0..width {
            let switch_in = if k > 0 {
                let row = &best[(k - 1) * n..k * n];
                let (arg, val) = argmin(row);
                Some((arg, val))
            } else {
                None
            };
            for i in 0..n {
                let stay = best[k * n + i];
                let (prev, val) = match switch_in {
                    Some((arg, val)) if val < stay => (arg, val),
                    _ => (i, stay),
                };
                next[k * n + i] = val + costs[i][t];
                from[k * n + i] = prev as u32;
            }
        }
        best = next;
        came_from.push(from);
    }

    let (mut model, total) = argmin(&best[m * n..]);
    let mut k = m;
    let mut path = vec![0usize; steps];
    for t in (0..steps).rev() {
        path[t] = model;
        let prev = came_from[t][k * n + model] as usize;
        if t > 0 && prev != model {
            k -= 1;
        }
        model = prev;
    }

    let mut switch_times = Vec::new();
    let mut models = vec![path[0]];
    for t in 1..steps {
        if path[t] != path[t - 1] {
            switch_times.push(t + 1);
            models.push(path[t]);
        }
    }
    Ok(SegmentationResult {
        switch_times,
        models,
        total,
        m,
        steps,
    })
}

fn argmin(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < best.1 {
            best = (i, *v);
        }
    }
    best
}

/// Split of tracking regret into the aggregation gap `t1` (forecaster vs.
/// best switching sequence of experts) and the expert-level regret `t2`
/// (that sequence vs. the comparator).
#[derive(Clone, Debug, PartialEq)]
pub struct TrackingDecomposition {
    pub t1: f64,
    pub t2: f64,
    pub total: f64,
    pub best_experts: SegmentationResult,
}

/// `expert_losses[i][t]` is the loss of expert `i` at round `t + 1`.
pub fn tracking_decomposition(
    forecaster_losses: &[f64],
    expert_losses: &[Vec<f64>],
    comparator_losses: &[f64],
    m: usize,
) -> Result<TrackingDecomposition> {
    if forecaster_losses.len() != comparator_losses.len() {
        return Err(Error::dimension(forecaster_losses.len(), comparator_losses.len()));
    }
    let best_experts = best_segmentation_from_costs(expert_losses, m)?;
    if best_experts.steps != forecaster_losses.len() {
        return Err(Error::dimension(forecaster_losses.len(), best_experts.steps));
    }
    let ours: f64 = forecaster_losses.iter().sum();
    let theirs: f64 = comparator_losses.iter().sum();
    let t1 = ours - best_experts.total;
    let t2 = best_experts.total - theirs;
    Ok(TrackingDecomposition {
        t1,
        t2,
        total: ours - theirs,
        best_experts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Boundary, Motion, PixelShift};
    use crate::point::ParameterPoint;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Enumerates every index sequence in `N^T` with at most `m` changes.
    fn brute_force(costs: &[Vec<f64>], m: usize) -> f64 {
        let n = costs.len();
        let steps = costs[0].len();
        let mut best = f64::INFINITY;
        let mut seq = vec![0usize; steps];
        loop {
            let changes = seq.windows(2).filter(|w| w[0] != w[1]).count();
            if changes <= m {
                let c: f64 = seq.iter().enumerate().map(|(t, &i)| costs[i][t]).sum();
                best = best.min(c);
            }
            let mut pos = 0;
            loop {
                if pos == steps {
                    return best;
                }
                seq[pos] += 1;
                if seq[pos] < n {
                    break;
                }
                seq[pos] = 0;
                pos += 1;
            }
        }
    }

    fn path_cost(costs: &[Vec<f64>], r: &SegmentationResult) -> f64 {
        r.path().iter().enumerate().map(|(t, &i)| costs[i][t]).sum()
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let n = rng.random_range(1..=3);
            let steps = rng.random_range(1..=9);
            let m = rng.random_range(0..=2usize).min(steps - 1);
            let costs: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..steps).map(|_| rng.random_range(0.0..1.0)).collect())
                .collect();
            let r = best_segmentation_from_costs(&costs, m).unwrap();
            assert!((r.total - brute_force(&costs, m)).abs() < 1e-12);
            assert!((path_cost(&costs, &r) - r.total).abs() < 1e-12);
            assert!(r.switch_times.len() <= m);
            assert_eq!(r.models.len(), r.switch_times.len() + 1);
        }
    }

    #[test]
    fn zero_switches_is_best_single_model() {
        let costs = vec![vec![1.0, 1.0, 1.0], vec![0.5, 2.0, 0.1], vec![0.9, 0.9, 0.9]];
        let r = best_segmentation_from_costs(&costs, 0).unwrap();
        assert!((r.total - 2.6).abs() < 1e-15);
        assert_eq!(r.models, vec![1]);
        assert!(r.switch_times.is_empty());
    }

    #[test]
    fn exact_following_with_one_switch() {
        // East for 5 steps, then south for 5 steps, on a wrapped grid.
        let east = DynamicalModel::PixelShift(PixelShift::new(Motion { drow: 0, dcol: 1 }, 6, 6, Boundary::Wrap).unwrap());
        let south = DynamicalModel::PixelShift(PixelShift::new(Motion { drow: 1, dcol: 0 }, 6, 6, Boundary::Wrap).unwrap());
        let mut v = vec![0.0; 36];
        v[7] = 1.0;
        let mut pts = vec![ParameterPoint::matrix(v, 6, 6).unwrap()];
        for t in 1..=10u64 {
            let model = if t <= 5 { &east } else { &south };
            pts.push(model.apply(pts.last().unwrap(), t).unwrap());
        }
        let c = ComparatorSequence::new(pts, "truth").unwrap();
        let models = vec![DynamicalModel::Identity, east, south];
        let r = best_segmentation(&c, &models, 1, Execution::Sequential).unwrap();
        assert_eq!(r.total, 0.0);
        assert_eq!(r.switch_times, vec![6]);
        assert_eq!(r.models, vec![1, 2]);
        let r0 = best_segmentation(&c, &models, 0, Execution::Parallel).unwrap();
        assert!(r0.total > 0.0);
    }

    #[test]
    fn budget_must_be_below_steps() {
        assert!(best_segmentation_from_costs(&[vec![1.0, 2.0]], 2).is_err());
        assert!(best_segmentation_from_costs(&[vec![1.0, 2.0], vec![1.0]], 0).is_err());
    }

    #[test]
    fn decomposition_examples() {
        // Single expert, no switches: t1 is the forecaster's gap to it.
        let d = tracking_decomposition(&[3.0, 2.0], &[vec![1.0, 1.0]], &[0.5, 0.5], 0).unwrap();
        assert_eq!(d.t1, 3.0);
        assert_eq!(d.t2, 1.0);
        assert_eq!(d.total, 4.0);
        // Forecaster equal to the best switching path.
        let experts = vec![vec![0.1, 5.0, 5.0], vec![4.0, 0.2, 0.3]];
        let d = tracking_decomposition(&[0.1, 0.2, 0.3], &experts, &[0.0; 3], 1).unwrap();
        assert!(d.t1.abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn monotone_in_budget_and_bounded_by_fixed_models(
            costs in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 8), 1..4)
        ) {
            let mut prev = f64::INFINITY;
            for m in 0..8 {
                let r = best_segmentation_from_costs(&costs, m).unwrap();
                prop_assert!(r.total <= prev + 1e-12);
                for row in &costs {
                    prop_assert!(r.total <= row.iter().sum::<f64>() + 1e-12);
                }
                prev = r.total;
            }
        }

        #[test]
        fn decomposition_sums_to_total(
            experts in prop::collection::vec(prop::collection::vec(0.0f64..3.0, 6), 1..4),
            ours in prop::collection::vec(0.0f64..3.0, 6),
            cmp in prop::collection::vec(0.0f64..3.0, 6),
            m in 0usize..3,
        ) {
            let d = tracking_decomposition(&ours, &experts, &cmp, m).unwrap();
            prop_assert!((d.t1 + d.t2 - d.total).abs() <= 1e-10);
        }
    }
}
