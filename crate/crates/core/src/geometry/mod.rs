//! Mirror-descent geometry: Bregman divergences, feasible sets, step-size
//! schedules and the constants that enter the regret bounds.

mod bregman;
mod constants;
mod feasible;
mod schedule;

pub use bregman::{bregman_divergence, BregmanGeometry, Psi};
pub use constants::{estimate_bound_constants, BoundConstants, BoundConstantsEstimator};
pub use feasible::{project, FeasibleSet};
pub use schedule::{step_size, Segment, StepSchedule};
