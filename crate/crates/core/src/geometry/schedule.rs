use crate::error::{Error, Result};

/// Step-size schedule `eta_t`.
///
/// `Doubling` splits time into consecutive segments of length
/// `base * growth^k` and uses `scale / sqrt(segment length)` on segment `k`.
/// `growth = 2` is the classical doubling trick; `growth = 10` with
/// `base = 10` gives horizons at increasing powers of ten.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    Doubling { base: u64, growth: u64, scale: f64 },
}

/// A horizon segment of a doubling schedule: `start..start + len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub index: u32,
    pub start: u64,
    pub len: u64,
}

impl StepSchedule {
    pub fn constant(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Argument(format!("step size must be positive, got {eta}")));
        }
        Ok(StepSchedule::Constant(eta))
    }

    pub fn doubling(base: u64, growth: u64, scale: f64) -> Result<Self> {
        if base == 0 || growth == 0 {
            return Err(Error::Argument(
                "doubling schedule needs base >= 1 and growth >= 1".into(),
            ));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Argument(format!(
                "doubling scale must be positive, got {scale}"
            )));
        }
        Ok(StepSchedule::Doubling { base, growth, scale })
    }

    /// Segment containing `t` (doubling schedules only).
    pub fn segment(&self, t: u64) -> Result<Option<Segment>> {
        if t < 1 {
            return Err(Error::Domain("time index must be >= 1".into()));
        }
        let StepSchedule::Doubling { base, growth, .. } = *self else {
            return Ok(None);
        };
        let (mut start, mut len, mut index) = (1u64, base, 0u32);
        loop {
            let end = start.checked_add(len).ok_or(Error::Schedule(t))?;
            if t < end {
                return Ok(Some(Segment { index, start, len }));
            }
            start = end;
            len = len.checked_mul(growth).ok_or(Error::Schedule(t))?;
            index += 1;
        }
    }

    pub fn step_size(&self, t: u64) -> Result<f64> {
        match *self {
            StepSchedule::Constant(eta) => {
                if t < 1 {
                    return Err(Error::Domain("time index must be >= 1".into()));
                }
                Ok(eta)
            }
            StepSchedule::Doubling { scale, .. } => {
                let seg = self.segment(t)?.expect("doubling schedule has segments");
                Ok(scale / (seg.len as f64).sqrt())
            }
        }
    }

    /// `sum_{s=1}^{t} eta_s`.
    pub fn cumulative(&self, t: u64) -> Result<f64> {
        match *self {
            StepSchedule::Constant(eta) => Ok(eta * t as f64),
            StepSchedule::Doubling { .. } => {
                let mut total = 0.0;
                let mut s = 1;
                while s <= t {
                    let seg = self.segment(s)?.expect("doubling schedule has segments");
                    let end = (seg.start + seg.len - 1).min(t);
                    total += (end - s + 1) as f64 * self.step_size(s)?;
                    s = end + 1;
                }
                Ok(total)
            }
        }
    }
}

pub fn step_size(sched: &StepSchedule, t: u64) -> Result<f64> {
    sched.step_size(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant() {
        let s = StepSchedule::constant(0.1).unwrap();
        assert_eq!(s.step_size(17).unwrap(), 0.1);
        assert!(StepSchedule::constant(0.0).is_err());
    }

    #[test]
    fn zero_time_is_a_domain_error() {
        for s in [
            StepSchedule::constant(0.1).unwrap(),
            StepSchedule::doubling(1, 2, 1.0).unwrap(),
        ] {
            assert!(matches!(s.step_size(0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn doubling_by_two() {
        let s = StepSchedule::doubling(1, 2, 1.0).unwrap();
        // Segments by hand: {1}, {2,3}, {4..7}, {8..15}.
        let table: [(u64, f64); 8] = [
            (1, 1.0),
            (2, 1.0 / 2f64.sqrt()),
            (3, 1.0 / 2f64.sqrt()),
            (4, 0.5),
            (5, 0.5),
            (7, 0.5),
            (8, 1.0 / 8f64.sqrt()),
            (15, 1.0 / 8f64.sqrt()),
        ];
        for (t, eta) in table {
            assert_eq!(s.step_size(t).unwrap(), eta, "t = {t}");
        }
    }

    #[test]
    fn doubling_by_ten() {
        let s = StepSchedule::doubling(10, 10, 1.0).unwrap();
        // {1..10}, {11..110}, {111..1110}
        assert_eq!(s.step_size(10).unwrap(), 1.0 / 10f64.sqrt());
        assert_eq!(s.step_size(11).unwrap(), 0.1);
        assert_eq!(s.step_size(110).unwrap(), 0.1);
        assert_eq!(s.step_size(111).unwrap(), 1.0 / 1000f64.sqrt());
    }

    #[test]
    fn non_increasing_and_positive() {
        let s = StepSchedule::doubling(3, 2, 0.7).unwrap();
        let mut prev = f64::INFINITY;
        for t in 1..5000 {
            let eta = s.step_size(t).unwrap();
            assert!(eta > 0.0 && eta <= prev);
            prev = eta;
        }
    }

    #[test]
    fn cumulative_matches_summation() {
        for s in [
            StepSchedule::doubling(1, 2, 1.0).unwrap(),
            StepSchedule::doubling(10, 10, 0.5).unwrap(),
            StepSchedule::constant(0.3).unwrap(),
        ] {
            let mut sum = 0.0;
            for t in 1..=300u64 {
                sum += s.step_size(t).unwrap();
                let c = s.cumulative(t).unwrap();
                assert!((c - sum).abs() < 1e-9, "t = {t}: {c} vs {sum}");
            }
        }
    }

    #[test]
    fn overflow_is_a_schedule_error() {
        let s = StepSchedule::doubling(u64::MAX / 2, 4, 1.0).unwrap();
        assert!(matches!(s.step_size(u64::MAX - 1), Err(Error::Schedule(_))));
    }
}
