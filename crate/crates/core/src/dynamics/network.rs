use super::DynamicalModel;
use crate::error::{Error, Result};
use crate::point::{ParameterPoint, Shape};

/// Triadic-closure dynamic on a `p x p` influence matrix.
///
/// For each pair `(a, b)` the strongest common neighbour is
/// `c* = argmax_{c not in {a, b}} |theta_ac theta_bc|` (lowest index on ties).
/// When `|theta_ac* theta_bc*| > |theta_ab|` the entry moves toward the
/// product: `(1 - alpha) theta_ab + alpha theta_ac* theta_bc*`. Otherwise it
/// is left unchanged. Diagonal entries follow the same rule with `c != a`.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkAttraction {
    pub alpha: f64,
    pub p: usize,
}

impl NetworkAttraction {
    pub fn new(alpha: f64, p: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Argument(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if p == 0 {
            return Err(Error::Argument("network needs at least one agent".into()));
        }
        Ok(Self { alpha, p })
    }

    pub fn apply(&self, theta: &ParameterPoint) -> Result<ParameterPoint> {
        let p = self.p;
        theta.check_shape(Shape::Matrix { rows: p, cols: p })?;
        if self.alpha == 0.0 {
            return Ok(theta.clone());
        }
        let th = theta.as_slice();
        let mut out = th.to_vec();
        for a in 0..p {
            let row_a = &th[a * p..(a + 1) * p];
            for b in 0..p {
                let row_b = &th[b * p..(b + 1) * p];
                let mut best = None::<(f64, f64)>;
                for c in 0..p {
                    if c == a || c == b {
                        continue;
                    }
                    let prod = row_a[c] * row_b[c];
                    if best.is_none_or(|(mag, _)| prod.abs() > mag) {
                        best = Some((prod.abs(), prod));
                    }
                }
                if let Some((mag, prod)) = best {
                    let current = row_a[b];
                    if mag > current.abs() {
                        out[a * p + b] = (1.0 - self.alpha) * current + self.alpha * prod;
                    }
                }
            }
        }
        Ok(ParameterPoint::from_parts(out, theta.shape()))
    }
}

/// One triadic-closure model per `alpha`.
pub fn network_family(alphas: &[f64], p: usize) -> Result<Vec<DynamicalModel>> {
    alphas
        .iter()
        .map(|&alpha| NetworkAttraction::new(alpha, p).map(DynamicalModel::NetworkAttraction))
        .collect()
}
