//! Synthetic compressive video: a unit-intensity square block translated one
//! pixel per frame, observed through fresh Gaussian sensing matrices.

use log::info;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::scenario::LossStream;
use crate::dynamics::{Boundary, Motion};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::losses::{CompositeLoss, L1Regularizer, LeastSquaresDatum, Regularizer};
use crate::point::{ParameterPoint, Shape};

/// Motion in force from frame `start` until the next leg begins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Leg {
    pub start: u64,
    pub motion: Motion,
}

impl Leg {
    /// Parses `start:label`, e.g. `101:SE`.
    pub fn parse(s: &str) -> Result<Self> {
        let (start, label) = s
            .split_once(':')
            .ok_or_else(|| Error::config("trajectory", format!("leg {s:?} must look like start:direction")))?;
        let start = start
            .trim()
            .parse()
            .map_err(|_| Error::config("trajectory", format!("bad leg start in {s:?}")))?;
        let motion = Motion::parse(label.trim())
            .ok_or_else(|| Error::config("trajectory", format!("unknown direction in {s:?}")))?;
        Ok(Leg { start, motion })
    }
}

impl std::fmt::Display for Leg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.start, self.motion.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VideoScenario {
    pub rows: usize,
    pub cols: usize,
    pub block: usize,
    /// Top-left corner of the block in frame 1.
    pub start: (usize, usize),
    pub legs: Vec<Leg>,
    pub horizon: u64,
    pub measurements: usize,
    pub noise_variance: f64,
    pub boundary: Boundary,
    /// Use `A_t = I` (needs `measurements == rows * cols`).
    pub identity_sensing: bool,
    pub seed: u64,
}

impl VideoScenario {
    /// 32x32 frames, 128 measurements, 200 frames, NE then SE from frame 101.
    pub fn desk(seed: u64) -> Self {
        Self {
            rows: 32,
            cols: 32,
            block: 6,
            start: (13, 13),
            legs: vec![
                Leg { start: 1, motion: Motion::parse("NE").unwrap() },
                Leg { start: 101, motion: Motion::parse("SE").unwrap() },
            ],
            horizon: 200,
            measurements: 128,
            noise_variance: 0.01,
            boundary: Boundary::Wrap,
            identity_sensing: false,
            seed,
        }
    }

    pub fn shape(&self) -> Shape {
        Shape::Matrix {
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::config("rows", "frames must be at least 2x2"));
        }
        if self.block == 0 || self.block > self.rows.min(self.cols) {
            return Err(Error::config("block", format!("block side {} does not fit the frame", self.block)));
        }
        if self.start.0 >= self.rows || self.start.1 >= self.cols {
            return Err(Error::config("start_row", "block start lies outside the frame"));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon", "horizon must be >= 1"));
        }
        if self.measurements == 0 {
            return Err(Error::config("measurements", "need at least one measurement"));
        }
        if self.identity_sensing && self.measurements != self.rows * self.cols {
            return Err(Error::config("measurements", "identity sensing needs measurements = rows * cols"));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::config("noise_variance", "noise variance must be >= 0"));
        }
        if self.legs.first().map(|l| l.start) != Some(1) {
            return Err(Error::config("trajectory", "the first leg must start at frame 1"));
        }
        if self.legs.windows(2).any(|w| w[0].start >= w[1].start) {
            return Err(Error::config("trajectory", "leg starts must increase"));
        }
        Ok(())
    }

    /// Motion applied between frame `t` and frame `t + 1`.
    pub fn motion_at(&self, t: u64) -> Motion {
        let k = self.legs.partition_point(|l| l.start <= t);
        self.legs[k.max(1) - 1].motion
    }

    /// Block corners for frames `1..=horizon + 1`.
    fn positions(&self) -> Vec<(usize, usize)> {
        let (rows, cols, b) = (self.rows as isize, self.cols as isize, self.block as isize);
        let mut out = Vec::with_capacity(self.horizon as usize + 1);
        let (mut r, mut c) = (self.start.0 as isize, self.start.1 as isize);
        if self.boundary == Boundary::ZeroFill {
            r = r.min(rows - b);
            c = c.min(cols - b);
        }
        let mut clipped = false;
        for t in 1..=self.horizon + 1 {
            out.push((r as usize, c as usize));
            let m = self.motion_at(t);
            match self.boundary {
                Boundary::Wrap => {
                    r = (r + m.drow).rem_euclid(rows);
                    c = (c + m.dcol).rem_euclid(cols);
                }
                Boundary::ZeroFill => {
                    let (nr, nc) = (r + m.drow, c + m.dcol);
                    r = nr.clamp(0, rows - b);
                    c = nc.clamp(0, cols - b);
                    clipped |= r != nr || c != nc;
                }
            }
        }
        if clipped {
            info!("video block reached the frame edge; positions were clipped");
        }
        out
    }
}

/// Lazily generated video stream. Frame `t` and its sensing data depend
/// only on the seed and `t`, so any subset can be regenerated in any order.
#[derive(Clone, Debug)]
pub struct VideoStream {
    scenario: VideoScenario,
    positions: Vec<(usize, usize)>,
    tau: f64,
}

impl VideoStream {
    /// `tau = None` picks `0.01 * max |A_1^T x_1|`.
    pub fn new(scenario: VideoScenario, tau: Option<f64>) -> Result<Self> {
        scenario.validate()?;
        let positions = scenario.positions();
        let mut stream = Self {
            scenario,
            positions,
            tau: 0.0,
        };
        stream.tau = match tau {
            Some(t) if t >= 0.0 => t,
            Some(t) => return Err(Error::config("tau", format!("tau must be >= 0, got {t}"))),
            None => {
                let d = stream.datum(1)?;
                let corr = d.matrix().tr_mul(d.observation());
                0.01 * corr.amax()
            }
        };
        Ok(stream)
    }

    pub fn scenario(&self) -> &VideoScenario {
        &self.scenario
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Ground-truth frame `t` (`1..=horizon + 1`).
    pub fn frame(&self, t: u64) -> Result<ParameterPoint> {
        let (r0, c0) = *self
            .positions
            .get((t as usize).wrapping_sub(1))
            .ok_or_else(|| Error::Domain(format!("frame {t} outside 1..={}", self.positions.len())))?;
        let s = &self.scenario;
        let mut v = vec![0.0; s.rows * s.cols];
        for i in 0..s.block {
            for j in 0..s.block {
                let (r, c) = ((r0 + i) % s.rows, (c0 + j) % s.cols);
                v[r * s.cols + c] = 1.0;
            }
        }
        ParameterPoint::new(v, s.shape())
    }

    /// `(A_t, x_t)` with `x_t = A_t theta_t + n_t`.
    pub fn datum(&self, t: u64) -> Result<LeastSquaresDatum> {
        let s = &self.scenario;
        let frame = self.frame(t)?;
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        rng.set_stream(t);
        let d = s.rows * s.cols;
        let a = if s.identity_sensing {
            DMatrix::identity(d, d)
        } else {
            let scale = 1.0 / (s.measurements as f64).sqrt();
            DMatrix::from_fn(s.measurements, d, |_, _| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * scale
            })
        };
        let mut x = &a * DVector::from_column_slice(frame.as_slice());
        if s.noise_variance > 0.0 {
            let noise = Normal::new(0.0, s.noise_variance.sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
            for xi in x.iter_mut() {
                *xi += noise.sample(&mut rng);
            }
        }
        LeastSquaresDatum::with_shape(a, x, s.shape())
    }
}

impl LossStream for VideoStream {
    type Fit = LeastSquaresDatum;

    fn horizon(&self) -> u64 {
        self.scenario.horizon
    }

    fn shape(&self) -> Shape {
        self.scenario.shape()
    }

    fn loss(&self, t: u64) -> Result<CompositeLoss<LeastSquaresDatum>> {
        let reg = if self.tau > 0.0 {
            Regularizer::L1(L1Regularizer::new(self.tau)?)
        } else {
            Regularizer::None
        };
        Ok(CompositeLoss::new(self.datum(t)?, reg))
    }

    fn truth(&self, t: u64) -> Option<ParameterPoint> {
        self.frame(t).ok()
    }
}

/// Everything for frames `1..=horizon`, materialized.
#[derive(Clone, Debug)]
pub struct VideoData {
    pub frames: Vec<ParameterPoint>,
    pub observations: Vec<DVector<f64>>,
    pub matrices: Vec<DMatrix<f64>>,
}

pub fn generate_video(scenario: &VideoScenario, exec: Execution) -> Result<VideoData> {
    let stream = VideoStream::new(scenario.clone(), Some(0.0))?;
    let items = exec::map_indexed(exec, scenario.horizon as usize, |i| -> Result<(ParameterPoint, LeastSquaresDatum)> {
        let t = i as u64 + 1;
        Ok((stream.frame(t)?, stream.datum(t)?))
    });
    let mut data = VideoData {
        frames: Vec::with_capacity(items.len()),
        observations: Vec::with_capacity(items.len()),
        matrices: Vec::with_capacity(items.len()),
    };
    for item in items {
        let (frame, datum) = item?;
        data.frames.push(frame);
        data.observations.push(datum.observation().clone());
        data.matrices.push(datum.matrix().clone());
    }
    Ok(data)
}
