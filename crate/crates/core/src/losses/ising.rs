use super::DataFit;
use crate::error::{Error, Result};
use crate::point::{ParameterPoint, Shape};

/// One round of votes: entries in `{-1, 0, +1}`, 0 marking a missing vote.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteDatum {
    votes: Vec<i8>,
}

impl VoteDatum {
    pub fn new(votes: Vec<i8>) -> Result<Self> {
        if let Some(j) = votes.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(Error::Domain(format!(
                "vote {j} is {}, expected -1, 0 or +1",
                votes[j]
            )));
        }
        Ok(Self { votes })
    }

    pub fn p(&self) -> usize {
        self.votes.len()
    }

    pub fn votes(&self) -> &[i8] {
        &self.votes
    }
}

/// Negative log pseudolikelihood of an Ising model over `p` agents, viewed
/// as a loss on the `p x p` influence matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsingPseudolikelihood {
    datum: VoteDatum,
}

impl IsingPseudolikelihood {
    pub fn new(datum: VoteDatum) -> Self {
        Self { datum }
    }

    pub fn datum(&self) -> &VoteDatum {
        &self.datum
    }

    fn check(&self, theta: &ParameterPoint) -> Result<()> {
        let p = self.datum.p();
        theta.check_shape(Shape::Matrix { rows: p, cols: p })?;
        if let Some(j) = theta.as_slice().iter().position(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::Domain(format!(
                "influence entry ({}, {}) = {} outside [-1, 1]",
                j / p,
                j % p,
                theta.as_slice()[j]
            )));
        }
        Ok(())
    }

    /// `z_a = 2 theta_aa x_a + 2 sum_{b != a} theta_ab x_a x_b`.
    fn activations(&self, theta: &ParameterPoint) -> Vec<f64> {
        let p = self.datum.p();
        let x = &self.datum.votes;
        let th = theta.as_slice();
        (0..p)
            .map(|a| {
                if x[a] == 0 {
                    return 0.0;
                }
                let xa = f64::from(x[a]);
                let row = &th[a * p..(a + 1) * p];
                let mut field = row[a];
                for (b, (&tab, &xb)) in row.iter().zip(x).enumerate() {
                    if b != a {
                        field += tab * f64::from(xb);
                    }
                }
                2.0 * xa * field
            })
            .collect()
    }
}

/// `log(e^z + 1)` without overflow.
#[inline]
fn log1p_exp(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[inline]
fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl DataFit for IsingPseudolikelihood {
    fn shape(&self) -> Shape {
        let p = self.datum.p();
        Shape::Matrix { rows: p, cols: p }
    }

    fn value(&self, theta: &ParameterPoint) -> Result<f64> {
        Ok(ising_pl_components(self, theta)?.iter().sum())
    }

    fn gradient(&self, theta: &ParameterPoint) -> Result<ParameterPoint> {
        Ok(self.value_and_gradient(theta)?.1)
    }

    fn value_and_gradient(&self, theta: &ParameterPoint) -> Result<(f64, ParameterPoint)> {
        self.check(theta)?;
        let p = self.datum.p();
        let x = &self.datum.votes;
        let z = self.activations(theta);
        let mut value = 0.0;
        let mut grad = vec![0.0; p * p];
        for a in 0..p {
            value += log1p_exp(z[a]) - z[a];
            if x[a] == 0 {
                continue;
            }
            let xa = f64::from(x[a]);
            // d f^(a) / d z_a = -(1 - logistic(z_a))
            let scale = -2.0 * (1.0 - logistic(z[a]));
            let row = &mut grad[a * p..(a + 1) * p];
            for (b, g) in row.iter_mut().enumerate() {
                *g = if b == a {
                    scale * xa
                } else {
                    scale * xa * f64::from(x[b])
                };
            }
        }
        Ok((value, ParameterPoint::from_parts(grad, theta.shape())))
    }
}

/// Per-agent terms `f^(a)(theta_a; x)`.
pub fn ising_pl_components(loss: &IsingPseudolikelihood, theta: &ParameterPoint) -> Result<Vec<f64>> {
    loss.check(theta)?;
    Ok(loss
        .activations(theta)
        .into_iter()
        .map(|z| log1p_exp(z) - z)
        .collect())
}

pub fn ising_pl_value(datum: &VoteDatum, theta: &ParameterPoint) -> Result<f64> {
    IsingPseudolikelihood::new(datum.clone()).value(theta)
}

pub fn ising_pl_gradient(datum: &VoteDatum, theta: &ParameterPoint) -> Result<ParameterPoint> {
    IsingPseudolikelihood::new(datum.clone()).gradient(theta)
}
