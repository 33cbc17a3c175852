use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::point::{self, ParameterPoint};

/// Convex feasible set with Euclidean projection.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet {
    Unconstrained { dim: usize },
    /// Componentwise bounds `lo <= x <= hi`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
}

const MEMBERSHIP_TOL: f64 = 1e-9;

impl FeasibleSet {
    pub fn unconstrained(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("feasible set dimension must be positive".into()));
        }
        Ok(FeasibleSet::Unconstrained { dim })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::dimension(lo.len(), hi.len()));
        }
        if let Some(j) = (0..lo.len()).find(|&j| !(lo[j] <= hi[j])) {
            return Err(Error::Argument(format!(
                "box bounds violate lo <= hi at {j}: {} > {}",
                lo[j], hi[j]
            )));
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    /// The box `[lo, hi]^dim`.
    pub fn uniform_box(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::Argument("ball center must be non-empty".into()));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Argument(format!("ball radius must be >= 0, got {radius}")));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Unconstrained { dim } => *dim,
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::Ball { center, .. } => center.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, FeasibleSet::Unconstrained { .. })
    }

    /// Projection and separable proximal maps commute on these sets, so a
    /// soft-threshold followed by projection solves the composite step.
    pub fn is_separable(&self) -> bool {
        !matches!(self, FeasibleSet::Ball { .. })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            FeasibleSet::Unconstrained { .. } => true,
            FeasibleSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= *l && *v <= *h),
            FeasibleSet::Ball { center, radius } => {
                point::distance(x, center) <= radius * (1.0 + MEMBERSHIP_TOL) + MEMBERSHIP_TOL
            }
        }
    }

    pub(crate) fn project_in_place(&self, x: &mut [f64]) {
        match self {
            FeasibleSet::Unconstrained { .. } => {}
            FeasibleSet::Box { lo, hi } => {
                for (v, (l, h)) in x.iter_mut().zip(lo.iter().zip(hi)) {
                    *v = v.clamp(*l, *h);
                }
            }
            FeasibleSet::Ball { center, radius } => {
                let dist = point::distance(x, center);
                if dist > *radius {
                    let shrink = radius / dist;
                    for (v, c) in x.iter_mut().zip(center) {
                        *v = c + (*v - c) * shrink;
                    }
                }
            }
        }
    }

    /// Draws a point of the set. Boxes and balls are sampled uniformly,
    /// the unconstrained set from a standard normal.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            FeasibleSet::Unconstrained { dim } => {
                (0..*dim).map(|_| rng.sample(StandardNormal)).collect()
            }
            FeasibleSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| if l == h { *l } else { rng.random_range(*l..*h) })
                .collect(),
            FeasibleSet::Ball { center, radius } => {
                let dir: Vec<f64> = (0..center.len()).map(|_| rng.sample(StandardNormal)).collect();
                let n = point::norm(&dir).max(f64::MIN_POSITIVE);
                let r = radius * rng.random::<f64>().powf(1.0 / center.len() as f64);
                center.iter().zip(&dir).map(|(c, d)| c + r * d / n).collect()
            }
        }
    }
}

/// Euclidean projection of `p` onto `set`.
pub fn project(set: &FeasibleSet, p: &ParameterPoint) -> Result<ParameterPoint> {
    if p.len() != set.dim() {
        return Err(Error::dimension(set.dim(), p.len()));
    }
    if !p.is_finite() {
        return Err(Error::Domain("cannot project a non-finite point".into()));
    }
    let mut out = p.clone();
    set.project_in_place(out.as_mut_slice());
    Ok(out)
}
