use crate::error::{Error, Result};
use crate::geometry::{BoundConstants, StepSchedule};

fn check_constants(c: &BoundConstants) -> Result<()> {
    if !(c.sigma > 0.0) {
        return Err(Error::Argument(format!("sigma must be positive, got {}", c.sigma)));
    }
    Ok(())
}

/// `D_max / eta_{T+1} + 4M / eta_T * v_phi + G^2 / (2 sigma) * sum_{t<=T} eta_t`.
pub fn theorem2_bound(c: &BoundConstants, schedule: &StepSchedule, v_phi: f64, horizon: u64) -> Result<f64> {
    check_constants(c)?;
    if horizon < 1 {
        return Err(Error::Argument("horizon must be >= 1".into()));
    }
    let last = schedule.step_size(horizon)?;
    let next = schedule.step_size(horizon + 1)?;
    Ok(c.d_max / next + 4.0 * c.m / last * v_phi + c.g_ell * c.g_ell / (2.0 * c.sigma) * schedule.cumulative(horizon)?)
}

/// [`theorem2_bound`] at every `t = 1..=v_phi.len()`, where `v_phi[t - 1]`
/// is the comparator deviation accumulated through time `t`.
pub fn theorem2_bound_profile(c: &BoundConstants, schedule: &StepSchedule, v_phi: &[f64]) -> Result<Vec<f64>> {
    check_constants(c)?;
    let mut sum_eta = 0.0;
    let mut out = Vec::with_capacity(v_phi.len());
    for (k, v) in v_phi.iter().enumerate() {
        let t = k as u64 + 1;
        let eta = schedule.step_size(t)?;
        sum_eta += eta;
        let next = schedule.step_size(t + 1)?;
        out.push(c.d_max / next + 4.0 * c.m / eta * v + c.g_ell * c.g_ell / (2.0 * c.sigma) * sum_eta);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DfsBound {
    /// Bound on the aggregation gap.
    pub t1: f64,
    /// Bound on the regret of the best switching expert sequence.
    pub t2: f64,
    pub total: f64,
}

/// `a log y`, taken as 0 when `a = 0` whatever `y` is.
fn xlog(a: f64, y: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * y.ln()
    }
}

/// Tracking bound for fixed share over `n_experts` DMD experts with at most
/// `m` switches and segmented deviation `v_segmented`.
#[allow(clippy::too_many_arguments)]
pub fn dfs_tracking_bound(
    c: &BoundConstants,
    schedule: &StepSchedule,
    eta_r: f64,
    lambda: f64,
    n_experts: usize,
    m: u64,
    v_segmented: f64,
    horizon: u64,
) -> Result<DfsBound> {
    check_constants(c)?;
    if !(eta_r > 0.0) {
        return Err(Error::Argument(format!("eta_r must be positive, got {eta_r}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Argument(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    if n_experts == 0 {
        return Err(Error::Argument("no experts".into()));
    }
    if m >= horizon {
        return Err(Error::Argument(format!("switch budget {m} must be below the horizon {horizon}")));
    }
    let segments = (m + 1) as f64;
    let stay = (horizon - m - 1) as f64;
    let share_penalty = -xlog(m as f64, lambda) - xlog(stay, 1.0 - lambda);
    let t1 = segments / eta_r * (n_experts as f64).ln() + share_penalty / eta_r + eta_r * horizon as f64 / 8.0;
    let last = schedule.step_size(horizon)?;
    let next = schedule.step_size(horizon + 1)?;
    let t2 = segments * c.d_max / next
        + 4.0 * c.m / last * v_segmented
        + c.g_ell * c.g_ell / (2.0 * c.sigma) * schedule.cumulative(horizon)?;
    Ok(DfsBound { t1, t2, total: t1 + t2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts(g: f64, m: f64, d: f64, sigma: f64) -> BoundConstants {
        BoundConstants {
            g_ell: g,
            m,
            d_max: d,
            sigma,
        }
    }

    #[test]
    fn constant_schedule_static_case() {
        let c = consts(2.0, 1.0, 3.0, 2.0);
        let s = StepSchedule::constant(0.1).unwrap();
        let b = theorem2_bound(&c, &s, 0.0, 50).unwrap();
        assert!((b - (3.0 / 0.1 + 4.0 * 0.1 * 50.0 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_constants_give_zero() {
        let c = consts(0.0, 0.0, 0.0, 1.0);
        let s = StepSchedule::doubling(1, 2, 1.0).unwrap();
        assert_eq!(theorem2_bound(&c, &s, 5.0, 100).unwrap(), 0.0);
    }

    #[test]
    fn doubling_term_by_term() {
        let c = consts(1.5, 0.7, 2.0, 2.0);
        let s = StepSchedule::doubling(1, 2, 1.0).unwrap();
        // Segments [1], [2,3], [4..7], [8..15]; eta = 1, 1/sqrt2, 1/2, 1/sqrt8.
        let h = 6u64;
        let eta6 = 0.5;
        let eta7 = 0.5;
        let sum = 1.0 + 2.0 / 2f64.sqrt() + 3.0 * 0.5;
        let expected = 2.0 / eta7 + 4.0 * 0.7 / eta6 * 1.25 + 1.5 * 1.5 / 4.0 * sum;
        assert!((theorem2_bound(&c, &s, 1.25, h).unwrap() - expected).abs() < 1e-12);
        let profile = theorem2_bound_profile(&c, &s, &[0.0, 0.5, 0.5, 1.0, 1.0, 1.25]).unwrap();
        assert!((profile[5] - expected).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_inputs() {
        let s = StepSchedule::doubling(2, 2, 0.5).unwrap();
        let base = consts(1.0, 1.0, 1.0, 1.0);
        let b0 = theorem2_bound(&base, &s, 1.0, 40).unwrap();
        assert!(theorem2_bound(&base, &s, 2.0, 40).unwrap() > b0);
        assert!(theorem2_bound(&consts(2.0, 1.0, 1.0, 1.0), &s, 1.0, 40).unwrap() > b0);
        assert!(theorem2_bound(&consts(1.0, 2.0, 1.0, 1.0), &s, 1.0, 40).unwrap() > b0);
        assert!(theorem2_bound(&consts(1.0, 1.0, 2.0, 1.0), &s, 1.0, 40).unwrap() > b0);
    }

    #[test]
    fn dfs_bound_terms() {
        let c = consts(1.0, 0.5, 2.0, 2.0);
        let s = StepSchedule::constant(0.1).unwrap();
        let b = dfs_tracking_bound(&c, &s, 0.2, 0.01, 9, 1, 3.0, 100).unwrap();
        let t1 = 2.0 / 0.2 * 9f64.ln() + (-(0.01f64.ln()) - 98.0 * 0.99f64.ln()) / 0.2 + 0.2 * 100.0 / 8.0;
        let t2 = 2.0 * 2.0 / 0.1 + 4.0 * 0.5 / 0.1 * 3.0 + 1.0 / 4.0 * 10.0;
        assert!((b.t1 - t1).abs() < 1e-10);
        assert!((b.t2 - t2).abs() < 1e-10);
        // No switches, no sharing: the penalty vanishes.
        let b = dfs_tracking_bound(&c, &s, 0.2, 0.0, 1, 0, 0.0, 10).unwrap();
        assert!((b.t1 - 0.2 * 10.0 / 8.0).abs() < 1e-15);
        // Switches with lambda = 0 are impossible for fixed share.
        let b = dfs_tracking_bound(&c, &s, 0.2, 0.0, 2, 1, 0.0, 10).unwrap();
        assert!(b.t1.is_infinite());
    }
}
