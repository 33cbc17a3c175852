//! Dynamical models `Phi_t` applied between the composite step and the next
//! prediction.
//!
//! All models in this crate are time-invariant; `apply` still takes `t` so
//! time-varying models fit the same interface.

mod audit;
mod network;
mod shift;

pub use audit::{audit_contraction, ContractionAudit, VIOLATION_TOLERANCE};
pub use network::{network_family, NetworkAttraction};
pub use shift::{shift_family, shift_family_with, Boundary, Motion, PixelShift};

use crate::error::Result;
use crate::point::{ParameterPoint, Shape};

#[derive(Clone, Debug, PartialEq)]
pub enum DynamicalModel {
    Identity,
    PixelShift(PixelShift),
    NetworkAttraction(NetworkAttraction),
}

impl DynamicalModel {
    pub fn apply(&self, theta: &ParameterPoint, t: u64) -> Result<ParameterPoint> {
        let _ = t;
        match self {
            DynamicalModel::Identity => Ok(theta.clone()),
            DynamicalModel::PixelShift(s) => s.apply(theta),
            DynamicalModel::NetworkAttraction(n) => n.apply(theta),
        }
    }

    /// True when the model is the identity map.
    pub fn is_identity(&self) -> bool {
        match self {
            DynamicalModel::Identity => true,
            DynamicalModel::PixelShift(s) => s.motion.is_static(),
            DynamicalModel::NetworkAttraction(n) => n.alpha == 0.0,
        }
    }

    /// Parameter shape the model acts on, if fixed.
    pub fn shape(&self) -> Option<Shape> {
        match self {
            DynamicalModel::Identity => None,
            DynamicalModel::PixelShift(s) => Some(Shape::Matrix {
                rows: s.rows,
                cols: s.cols,
            }),
            DynamicalModel::NetworkAttraction(n) => Some(Shape::Matrix { rows: n.p, cols: n.p }),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DynamicalModel::Identity => "static".into(),
            DynamicalModel::PixelShift(s) => s.motion.label().into(),
            DynamicalModel::NetworkAttraction(n) => format!("alpha={}", n.alpha),
        }
    }
}
