use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::DynamicalModel;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::{BregmanGeometry, FeasibleSet};
use crate::point::{ParameterPoint, Shape};

/// Estimates above this are reported as violations of `Delta_Phi <= 0`.
pub const VIOLATION_TOLERANCE: f64 = 1e-10;

/// Sampled estimate of `Delta_Phi = max D(Phi a || Phi b) - D(a || b)`.
///
/// The estimate is a lower bound on the true supremum.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionAudit {
    pub estimate: f64,
    pub samples: usize,
    pub worst_pair: Option<(ParameterPoint, ParameterPoint)>,
    pub violation: bool,
}

/// Samples `n_samples` pairs from `set`. Pair `i` is drawn from its own
/// ChaCha stream, so the result depends only on `seed`.
pub fn audit_contraction(
    model: &DynamicalModel,
    geom: &BregmanGeometry,
    set: &FeasibleSet,
    shape: Shape,
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<ContractionAudit> {
    if n_samples == 0 {
        return Err(Error::Argument("audit needs at least one sample".into()));
    }
    if shape.len() != set.dim() {
        return Err(Error::dimension(set.dim(), shape));
    }
    let gaps = exec::map_indexed(exec, n_samples, |i| -> Result<f64> {
        let (a, b) = sample_pair(set, shape, seed, i);
        let pa = model.apply(&a, 1)?;
        let pb = model.apply(&b, 1)?;
        Ok(geom.divergence(pa.as_slice(), pb.as_slice()) - geom.divergence(a.as_slice(), b.as_slice()))
    });
    let mut worst = (f64::NEG_INFINITY, 0);
    for (i, gap) in gaps.into_iter().enumerate() {
        let gap = gap?;
        if gap > worst.0 {
            worst = (gap, i);
        }
    }
    let (estimate, idx) = worst;
    Ok(ContractionAudit {
        estimate,
        samples: n_samples,
        worst_pair: Some(sample_pair(set, shape, seed, idx)),
        violation: estimate > VIOLATION_TOLERANCE,
    })
}

fn sample_pair(set: &FeasibleSet, shape: Shape, seed: u64, i: usize) -> (ParameterPoint, ParameterPoint) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let a = ParameterPoint::from_parts(set.sample(&mut rng), shape);
    let b = ParameterPoint::from_parts(set.sample(&mut rng), shape);
    (a, b)
}
