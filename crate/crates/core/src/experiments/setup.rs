//! Builds runnable scenarios from a [`ConfigMap`].

use std::path::PathBuf;

use super::config::{ConfigMap, Resolver};
use super::scenario::{describe_schedule, LearnerSettings};
use super::video::{Leg, VideoScenario, VideoStream};
use super::votes::{load_votes, PlantedNetwork, VoteLossStream};
use crate::dfs::default_lambda;
use crate::dynamics::{network_family, shift_family_with};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{BregmanGeometry, FeasibleSet, StepSchedule};

/// Options shared by both scenarios that do not affect the learners.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputOptions {
    pub out_dir: Option<PathBuf>,
    pub ma_window: usize,
}

pub struct VideoSetup {
    pub stream: VideoStream,
    pub settings: LearnerSettings,
    pub output: OutputOptions,
    pub meta: Vec<(String, String)>,
}

pub struct VotesSetup {
    pub stream: VoteLossStream,
    pub settings: LearnerSettings,
    pub output: OutputOptions,
    pub meta: Vec<(String, String)>,
}

struct Defaults {
    psi_scale: f64,
    lo: f64,
    hi: f64,
    schedule: &'static str,
    eta: f64,
    base: u64,
    growth: u64,
    scale: f64,
    reg_period: u64,
    lambda: Option<f64>,
    eta_r: Option<f64>,
    switch_budget: usize,
    lemma_checks: bool,
}

struct Common {
    geometry: BregmanGeometry,
    box_bounds: (f64, f64),
    schedule: StepSchedule,
    reg_period: u64,
    lambda: f64,
    eta_r: StepSchedule,
    switch_budget: usize,
    execution: Execution,
    lemma_checks: bool,
    snapshot_every: u64,
    output: OutputOptions,
}

fn common(r: &mut Resolver, d: Defaults, horizon: u64) -> Result<Common> {
    let _ = r.take_str("scenario");
    let psi_scale = r.take_or("psi_scale", d.psi_scale)?;
    let geometry = BregmanGeometry::scaled_euclidean(psi_scale).map_err(|e| Error::config("psi_scale", e.to_string()))?;
    let lo = r.take_or("box_lo", d.lo)?;
    let hi = r.take_or("box_hi", d.hi)?;
    if !(lo <= hi) {
        return Err(Error::config("box_lo", "box_lo must not exceed box_hi"));
    }
    let kind = r.take_str("schedule").unwrap_or_else(|| d.schedule.to_string());
    let eta = r.take_or("eta", d.eta)?;
    let base = r.take_or("schedule_base", d.base)?;
    let growth = r.take_or("schedule_growth", d.growth)?;
    let scale = r.take_or("schedule_scale", d.scale)?;
    let schedule = match kind.as_str() {
        "constant" => StepSchedule::constant(eta),
        "doubling" => StepSchedule::doubling(base, growth, scale),
        other => return Err(Error::config("schedule", format!("unknown schedule `{other}` (constant|doubling)"))),
    }
    .map_err(|e| Error::config("schedule", e.to_string()))?;
    let reg_period = r.take_or("reg_period", d.reg_period)?;
    if reg_period == 0 {
        return Err(Error::config("reg_period", "reg_period must be >= 1"));
    }
    let switch_budget = r.take_or("switch_budget", d.switch_budget)?;
    let lambda = match r.take::<f64>("lambda")?.or(d.lambda) {
        Some(l) if (0.0..=1.0).contains(&l) => l,
        Some(l) => return Err(Error::config("lambda", format!("lambda must lie in [0, 1], got {l}"))),
        None => default_lambda(switch_budget.max(1) as u64, horizon.max(2))
            .map_err(|e| Error::config("lambda", e.to_string()))?,
    };
    let eta_r_value = match r.take_str("eta_r").as_deref() {
        None | Some("auto") => d.eta_r.unwrap_or(1.0 / (horizon as f64).sqrt()),
        Some(v) => v
            .parse::<f64>()
            .map_err(|e| Error::config("eta_r", format!("cannot parse {v:?}: {e}")))?,
    };
    let eta_r = StepSchedule::constant(eta_r_value).map_err(|e| Error::config("eta_r", e.to_string()))?;
    let execution = r
        .take::<Execution>("execution")?
        .unwrap_or_default();
    let lemma_checks = r.take_bool("lemma_checks", d.lemma_checks)?;
    let snapshot_every = r.take_or("snapshot_every", 0u64)?;
    let out_dir = r.take_str("out_dir").map(PathBuf::from);
    let ma_window = r.take_or("ma_window", 30usize)?;
    if ma_window == 0 {
        return Err(Error::config("ma_window", "window must be >= 1"));
    }
    Ok(Common {
        geometry,
        box_bounds: (lo, hi),
        schedule,
        reg_period,
        lambda,
        eta_r,
        switch_budget,
        execution,
        lemma_checks,
        snapshot_every,
        output: OutputOptions { out_dir, ma_window },
    })
}

fn common_meta(c: &Common, meta: &mut Vec<(String, String)>) {
    meta.push(("psi".into(), format!("{} * ||.||^2", c.geometry.euclidean_scale().unwrap_or(f64::NAN))));
    meta.push(("box".into(), format!("[{}, {}]", c.box_bounds.0, c.box_bounds.1)));
    meta.push(("step_schedule".into(), describe_schedule(&c.schedule)));
    meta.push(("ma_window".into(), c.output.ma_window.to_string()));
}

/// Video scenario. Keys not listed in the README are rejected.
pub fn video_setup(config: &ConfigMap) -> Result<VideoSetup> {
    let mut r = config.resolver();
    let seed = r.take_or("seed", 1u64)?;
    let mut sc = VideoScenario::desk(seed);
    sc.rows = r.take_or("rows", sc.rows)?;
    sc.cols = r.take_or("cols", sc.cols)?;
    sc.block = r.take_or("block", sc.block)?;
    sc.start = (
        r.take_or("start_row", sc.start.0.min(sc.rows.saturating_sub(1)))?,
        r.take_or("start_col", sc.start.1.min(sc.cols.saturating_sub(1)))?,
    );
    sc.horizon = r.take_or("horizon", sc.horizon)?;
    sc.legs = match r.take_list::<String>("trajectory")? {
        Some(legs) => legs.iter().map(|s| Leg::parse(s)).collect::<Result<_>>()?,
        None => {
            let mut legs = sc.legs.clone();
            legs[1].start = sc.horizon / 2 + 1;
            if sc.horizon < 2 {
                legs.truncate(1);
            }
            legs
        }
    };
    sc.measurements = r.take_or("measurements", sc.measurements)?;
    sc.noise_variance = r.take_or("noise_variance", sc.noise_variance)?;
    sc.boundary = r.take_or("boundary", sc.boundary)?;
    sc.identity_sensing = r.take_bool("identity_sensing", sc.identity_sensing)?;
    let tau = match r.take_str("tau").as_deref() {
        None | Some("auto") => None,
        Some(v) => Some(
            v.parse::<f64>()
                .map_err(|e| Error::config("tau", format!("cannot parse {v:?}: {e}")))?,
        ),
    };
    let c = common(
        &mut r,
        Defaults {
            psi_scale: 1.0,
            lo: 0.0,
            hi: 1.0,
            schedule: "constant",
            eta: 0.2,
            base: 1,
            growth: 2,
            scale: 1.0,
            reg_period: 1,
            lambda: Some(0.01),
            eta_r: Some(0.5),
            switch_budget: sc.legs.len().saturating_sub(1),
            lemma_checks: true,
        },
        sc.horizon,
    )?;
    r.finish()?;

    let stream = VideoStream::new(sc.clone(), tau)?;
    let models = shift_family_with(sc.rows, sc.cols, sc.boundary)?;
    let settings = LearnerSettings {
        geometry: c.geometry,
        set: FeasibleSet::uniform_box(sc.rows * sc.cols, c.box_bounds.0, c.box_bounds.1)?,
        schedule: c.schedule,
        models,
        reg_period: c.reg_period,
        lambda: c.lambda,
        eta_r: c.eta_r,
        switch_budget: c.switch_budget,
        execution: c.execution,
        lemma_checks: c.lemma_checks,
        snapshot_every: c.snapshot_every,
    };
    let mut meta = vec![
        ("scenario".to_string(), "video".to_string()),
        ("seed".into(), seed.to_string()),
        ("rows".into(), sc.rows.to_string()),
        ("cols".into(), sc.cols.to_string()),
        ("object".into(), format!("unit-intensity {0}x{0} square block", sc.block)),
        ("start".into(), format!("{},{}", sc.start.0, sc.start.1)),
        (
            "trajectory".into(),
            sc.legs.iter().map(Leg::to_string).collect::<Vec<_>>().join(","),
        ),
        ("measurements".into(), sc.measurements.to_string()),
        ("sensing".into(), if sc.identity_sensing { "identity".into() } else { format!("gaussian, entry variance 1/{}", sc.measurements) }),
        ("noise_variance".into(), sc.noise_variance.to_string()),
        ("boundary".into(), format!("{:?}", sc.boundary).to_lowercase()),
        ("tau".into(), stream.tau().to_string()),
        ("tau_source".into(), if tau.is_some() { "configured".into() } else { "0.01 * max|A_1^T x_1|".to_string() }),
    ];
    common_meta(&c, &mut meta);
    Ok(VideoSetup {
        stream,
        settings,
        output: c.output,
        meta,
    })
}

/// Vote scenario: reads `input` when given, otherwise samples a planted
/// network.
pub fn votes_setup(config: &ConfigMap) -> Result<VotesSetup> {
    let mut r = config.resolver();
    let seed = r.take_or("seed", 1u64)?;
    let input = r.take_str("input").map(PathBuf::from);
    let mut planted = PlantedNetwork::desk(seed);
    planted.p = r.take_or("p", planted.p)?;
    planted.factions = r.take_or("factions", planted.factions)?;
    planted.strength = r.take_or("strength", planted.strength)?;
    planted.alpha = r.take_or("planted_alpha", planted.alpha)?;
    planted.sweeps = r.take_or("gibbs_sweeps", planted.sweeps)?;
    planted.missing_rate = r.take_or("missing_rate", planted.missing_rate)?;
    let horizon: Option<u64> = r.take("horizon")?;
    let alphas = r
        .take_list::<f64>("alphas")?
        .unwrap_or_else(|| vec![0.0, 0.001, 0.002, 0.003, 0.004]);
    let tau = r.take_or("tau", 0.1)?;

    let mut meta = vec![("scenario".to_string(), "votes".to_string())];
    let (votes, truth) = match &input {
        Some(path) => {
            let mut v = load_votes(path)?;
            if let Some(h) = horizon {
                v.truncate(h as usize);
            }
            meta.push(("input".into(), path.display().to_string()));
            (v, None)
        }
        None => {
            planted.horizon = horizon.unwrap_or(planted.horizon);
            let data = planted.generate(Execution::default())?;
            meta.extend([
                ("source".to_string(), "synthetic planted network".to_string()),
                ("seed".into(), seed.to_string()),
                ("factions".into(), planted.factions.to_string()),
                ("strength".into(), planted.strength.to_string()),
                ("planted_alpha".into(), planted.alpha.to_string()),
                ("gibbs_sweeps".into(), planted.sweeps.to_string()),
                ("missing_rate".into(), planted.missing_rate.to_string()),
            ]);
            (data.stream, Some(data.truth))
        }
    };
    let horizon = votes.len() as u64;
    let p = votes.p();
    let c = common(
        &mut r,
        Defaults {
            psi_scale: 0.5,
            lo: -1.0,
            hi: 1.0,
            schedule: "doubling",
            eta: 0.1,
            base: 10,
            growth: 10,
            scale: 1.0,
            reg_period: 10,
            lambda: None,
            eta_r: None,
            switch_budget: 1,
            lemma_checks: false,
        },
        horizon,
    )?;
    r.finish()?;
    if c.box_bounds.0 < -1.0 || c.box_bounds.1 > 1.0 {
        return Err(Error::config("box_lo", "influence entries must stay within [-1, 1]"));
    }

    let stream = VoteLossStream::new(votes, tau, truth)?;
    let settings = LearnerSettings {
        geometry: c.geometry,
        set: FeasibleSet::uniform_box(p * p, c.box_bounds.0, c.box_bounds.1)?,
        schedule: c.schedule,
        models: network_family(&alphas, p)?,
        reg_period: c.reg_period,
        lambda: c.lambda,
        eta_r: c.eta_r,
        switch_budget: c.switch_budget,
        execution: c.execution,
        lemma_checks: c.lemma_checks,
        snapshot_every: c.snapshot_every,
    };
    meta.push(("p".into(), p.to_string()));
    meta.push(("seats".into(), stream.votes().labels().join(",")));
    meta.push(("tau".into(), tau.to_string()));
    common_meta(&c, &mut meta);
    Ok(VotesSetup {
        stream,
        settings,
        output: c.output,
        meta,
    })
}

impl std::str::FromStr for Leg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Leg::parse(s)
    }
}
