use crate::error::{Error, Result};
use crate::point::ParameterPoint;

/// Generating function of a Bregman divergence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psi {
    /// `psi(x) = scale * ||x||^2`.
    ScaledSquaredEuclidean { scale: f64 },
}

/// A strongly convex `psi` together with its strong-convexity constant.
///
/// `sigma` is recorded with the generating function rather than estimated:
/// for `scale * ||x||^2` it is `2 * scale` with respect to the Euclidean norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BregmanGeometry {
    psi: Psi,
    sigma: f64,
}

impl BregmanGeometry {
    pub fn scaled_euclidean(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Argument(format!(
                "psi scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self {
            psi: Psi::ScaledSquaredEuclidean { scale },
            sigma: 2.0 * scale,
        })
    }

    /// `psi(x) = ||x||^2`, giving `D(a||b) = ||a - b||^2`.
    pub fn squared_euclidean() -> Self {
        Self::scaled_euclidean(1.0).expect("valid scale")
    }

    /// `psi(x) = ||x||^2 / 2`, giving `D(a||b) = ||a - b||^2 / 2`.
    pub fn half_squared_euclidean() -> Self {
        Self::scaled_euclidean(0.5).expect("valid scale")
    }

    pub fn psi_kind(&self) -> Psi {
        self.psi
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The scale `c` when `psi = c ||.||^2`.
    pub fn euclidean_scale(&self) -> Option<f64> {
        match self.psi {
            Psi::ScaledSquaredEuclidean { scale } => Some(scale),
        }
    }

    pub fn psi(&self, x: &[f64]) -> f64 {
        match self.psi {
            Psi::ScaledSquaredEuclidean { scale } => scale * x.iter().map(|v| v * v).sum::<f64>(),
        }
    }

    pub fn grad_psi(&self, x: &[f64]) -> Vec<f64> {
        match self.psi {
            Psi::ScaledSquaredEuclidean { scale } => x.iter().map(|v| 2.0 * scale * v).collect(),
        }
    }

    /// `||grad psi(x)||` without allocating.
    pub fn grad_psi_norm(&self, x: &[f64]) -> f64 {
        match self.psi {
            Psi::ScaledSquaredEuclidean { scale } => 2.0 * scale * crate::point::norm(x),
        }
    }

    /// `D(a || b)` on raw slices of equal length.
    pub fn divergence(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self.psi {
            // Closed form of psi(a) - psi(b) - <grad psi(b), a - b>; exact zero on a == b.
            Psi::ScaledSquaredEuclidean { scale } => {
                scale
                    * a.iter()
                        .zip(b)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
            }
        }
    }
}

/// `D(a || b) = psi(a) - psi(b) - <grad psi(b), a - b>`.
pub fn bregman_divergence(
    geom: &BregmanGeometry,
    a: &ParameterPoint,
    b: &ParameterPoint,
) -> Result<f64> {
    a.check_same_shape(b)?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("non-finite point".into()));
    }
    Ok(geom.divergence(a.as_slice(), b.as_slice()))
}
