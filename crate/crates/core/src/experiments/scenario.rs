//! Runs COMID, every single-model DMD expert and DFS over one loss stream
//! and collects traces, sampled constants and bound checks.

use log::debug;

use crate::dfs::FixedShareState;
use crate::dmd::{DmdConfig, DmdState, LemmaCheck, LemmaTerms};
use crate::dynamics::DynamicalModel;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::geometry::{BoundConstants, BoundConstantsEstimator, BregmanGeometry, FeasibleSet, StepSchedule};
use crate::losses::{CompositeLoss, DataFit};
use crate::point::{ParameterPoint, Shape};
use crate::regret::{
    best_segmentation, cumulative_difference, dfs_tracking_bound, theorem2_bound_profile, tracking_decomposition,
    ComparatorSequence, DfsBound, SegmentationResult, TrackingDecomposition,
};

/// Source of per-round losses for [`run_scenario`].
pub trait LossStream: Sync {
    type Fit: DataFit;

    fn horizon(&self) -> u64;
    fn shape(&self) -> Shape;
    fn loss(&self, t: u64) -> Result<CompositeLoss<Self::Fit>>;

    /// Ground-truth parameter at time `t`, for `t` up to `horizon + 1`.
    fn truth(&self, _t: u64) -> Option<ParameterPoint> {
        None
    }

    /// Per-component breakdown of the loss (per-agent terms for votes).
    fn components(&self, _loss: &CompositeLoss<Self::Fit>, _theta: &ParameterPoint) -> Option<Vec<f64>> {
        None
    }

    fn component_labels(&self) -> Option<Vec<String>> {
        None
    }

    fn time_label(&self, t: u64) -> String {
        t.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct LearnerSettings {
    pub geometry: BregmanGeometry,
    pub set: FeasibleSet,
    pub schedule: StepSchedule,
    pub models: Vec<DynamicalModel>,
    pub reg_period: u64,
    pub lambda: f64,
    pub eta_r: StepSchedule,
    /// Switch budget `m` for the segmented bounds and the decomposition.
    pub switch_budget: usize,
    pub execution: Execution,
    /// Evaluate the per-round tracking inequality against the ground truth.
    pub lemma_checks: bool,
    /// Keep a snapshot of the predictions every this many rounds (0: never).
    pub snapshot_every: u64,
}

/// Outcome of the per-round inequality checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LemmaSummary {
    pub checks: usize,
    pub violations: usize,
    pub min_slack: f64,
    /// `(expert, t)` of the smallest slack.
    pub tightest: Option<(usize, u64)>,
}

/// Regret against the ground truth, with bounds.
#[derive(Clone, Debug)]
pub struct TruthRegret {
    /// `[t]` cumulative regret of DFS.
    pub dfs: Vec<f64>,
    /// `[i][t]` cumulative regret of expert `i`.
    pub experts: Vec<Vec<f64>>,
    /// `[i][t]` regret bound for expert `i` with its own model.
    pub bounds: Vec<Vec<f64>>,
    /// Final `V_Phi` of the truth for each expert's model.
    pub variation: Vec<f64>,
    /// Best `m`-switch segmentation of the truth over the model family.
    pub segmentation: SegmentationResult,
    pub dfs_bound: DfsBound,
    pub decomposition: TrackingDecomposition,
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: u64,
    pub dfs: ParameterPoint,
    pub experts: Vec<ParameterPoint>,
    pub truth: Option<ParameterPoint>,
}

#[derive(Clone, Debug)]
pub struct ResultBundle {
    pub labels: Vec<String>,
    pub time_labels: Vec<String>,
    /// Index of the static expert, when the family has one.
    pub comid_index: Option<usize>,
    /// `[t][i]`.
    pub expert_losses: Vec<Vec<f64>>,
    pub dfs_losses: Vec<f64>,
    pub comid_losses: Vec<f64>,
    pub truth_losses: Option<Vec<f64>>,
    /// `[t][i]`, weights after round `t`.
    pub weights: Vec<Vec<f64>>,
    pub constants: BoundConstants,
    pub lemma: Option<LemmaSummary>,
    pub truth_regret: Option<TruthRegret>,
    /// `[t][a]` per-component losses of the DFS prediction.
    pub components: Option<Vec<Vec<f64>>>,
    pub component_labels: Option<Vec<String>>,
    pub snapshots: Vec<Snapshot>,
    pub final_prediction: ParameterPoint,
    pub meta: Vec<(String, String)>,
}

impl ResultBundle {
    pub fn horizon(&self) -> usize {
        self.dfs_losses.len()
    }

    pub fn expert_total(&self, i: usize) -> f64 {
        self.expert_losses.iter().map(|row| row[i]).sum()
    }

    pub fn dfs_total(&self) -> f64 {
        self.dfs_losses.iter().sum()
    }

    pub fn comid_total(&self) -> f64 {
        self.comid_losses.iter().sum()
    }

    /// Index and total loss of the best single expert in hindsight.
    pub fn best_expert(&self) -> (usize, f64) {
        (0..self.labels.len())
            .map(|i| (i, self.expert_total(i)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
    }

    /// Loss trace of expert `i`.
    pub fn expert_trace(&self, i: usize) -> Vec<f64> {
        self.expert_losses.iter().map(|row| row[i]).collect()
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }
}

/// Runs DFS over `settings.models` on `stream`. The expert trajectories are
/// the single-model DMD runs; the static expert doubles as the COMID
/// baseline, and a separate COMID learner is run when the family has none.
pub fn run_scenario<S: LossStream>(stream: &S, settings: &LearnerSettings) -> Result<ResultBundle> {
    let horizon = stream.horizon();
    if horizon == 0 {
        return Err(Error::Argument("stream is empty".into()));
    }
    if settings.models.is_empty() {
        return Err(Error::config("models", "the model family is empty"));
    }
    let shape = stream.shape();
    let make = |model: DynamicalModel| {
        let cfg = DmdConfig::new(settings.geometry, settings.set.clone(), settings.schedule, model)
            .with_reg_period(settings.reg_period);
        DmdState::new(cfg, shape).map(|s| s.with_diagnostics(true))
    };
    let experts = settings
        .models
        .iter()
        .cloned()
        .map(make)
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = settings.models.iter().map(DynamicalModel::label).collect();
    let comid_index = settings.models.iter().position(DynamicalModel::is_identity);
    let mut standalone_comid = match comid_index {
        Some(_) => None,
        None => Some(make(DynamicalModel::Identity)?),
    };
    let mut dfs = FixedShareState::new(experts, settings.eta_r, settings.lambda)?.with_execution(settings.execution);
    let n = settings.models.len();

    let mut estimator = BoundConstantsEstimator::new(settings.geometry);
    let t_cap = horizon as usize;
    let mut expert_losses = Vec::with_capacity(t_cap);
    let mut dfs_losses = Vec::with_capacity(t_cap);
    let mut comid_losses = Vec::with_capacity(t_cap);
    let mut weights = Vec::with_capacity(t_cap);
    let mut time_labels = Vec::with_capacity(t_cap);
    let mut snapshots = Vec::new();
    let mut components: Option<Vec<Vec<f64>>> = None;

    let mut truth_now = stream.truth(1);
    let has_truth = truth_now.is_some();
    let mut truths: Vec<ParameterPoint> = Vec::new();
    let mut truth_losses = Vec::new();
    let mut lemma_terms: Vec<Vec<LemmaTerms>> = Vec::new();
    let mut deviations: Vec<Vec<f64>> = vec![Vec::with_capacity(t_cap); n];

    for t in 1..=horizon {
        let loss = stream.loss(t)?;
        let before: Vec<ParameterPoint> = dfs.experts().iter().map(|e| e.prediction().clone()).collect();
        let round = dfs.step(&loss, t)?;
        let comid_loss = match (&mut standalone_comid, comid_index) {
            (Some(c), _) => c.comid_step(&loss, t)?.loss,
            (None, Some(i)) => round.expert_losses[i],
            (None, None) => unreachable!("a COMID learner always exists"),
        };

        for r in &round.expert_reports {
            if let Some(d) = &r.diagnostics {
                estimator.observe_subgradient_norm(d.subgradient_norm);
            }
        }
        for p in &before {
            estimator.observe_point(p.as_slice());
        }

        if let (Some(truth), true) = (&truth_now, has_truth) {
            let truth_next = stream
                .truth(t + 1)
                .ok_or_else(|| Error::Argument(format!("stream has no ground truth for t = {}", t + 1)))?;
            let truth_loss = loss.value(truth)?;
            estimator.observe_point(truth.as_slice());
            for p in &before {
                estimator.observe_pair(truth.as_slice(), p.as_slice());
            }
            let after = dfs.experts();
            let geom = settings.geometry;
            let terms = exec::map_indexed(settings.execution, n, |i| -> Result<LemmaTerms> {
                let followed = settings.models[i].apply(truth, t)?;
                Ok(LemmaTerms {
                    eta: round.expert_reports[i].eta,
                    excess_loss: round.expert_losses[i] - truth_loss,
                    divergence_now: geom.divergence(truth.as_slice(), before[i].as_slice()),
                    divergence_next: geom.divergence(truth_next.as_slice(), after[i].prediction().as_slice()),
                    deviation: truth_next.distance(&followed),
                })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            for (i, term) in terms.iter().enumerate() {
                deviations[i].push(term.deviation);
            }
            if t == horizon {
                estimator.observe_point(truth_next.as_slice());
                for e in after {
                    estimator.observe_point(e.prediction().as_slice());
                    estimator.observe_pair(truth_next.as_slice(), e.prediction().as_slice());
                }
            }
            if settings.lemma_checks {
                lemma_terms.push(terms);
            }
            truth_losses.push(truth_loss);
            truths.push(truth.clone());
            truth_now = Some(truth_next);
        }

        if let Some(parts) = stream.components(&loss, &round.prediction) {
            components.get_or_insert_with(Vec::new).push(parts);
        }
        if settings.snapshot_every > 0 && t % settings.snapshot_every == 0 {
            snapshots.push(Snapshot {
                t,
                dfs: round.prediction.clone(),
                experts: before.clone(),
                truth: truths.last().cloned(),
            });
        }
        debug!("t={t} dfs={:.6} weights={:?}", round.loss, dfs.weights());
        expert_losses.push(round.expert_losses);
        dfs_losses.push(round.loss);
        comid_losses.push(comid_loss);
        weights.push(dfs.weights().to_vec());
        time_labels.push(stream.time_label(t));
    }

    let mut constants = estimator.current();
    constants.sigma = settings.geometry.sigma();

    let lemma = settings.lemma_checks.then(|| summarize_lemma(&lemma_terms, &constants));

    let truth_regret = if has_truth {
        if let Some(last) = truth_now.take() {
            truths.push(last);
        }
        Some(truth_regret(
            settings,
            &constants,
            &truths,
            &truth_losses,
            &dfs_losses,
            &expert_losses,
            &deviations,
        )?)
    } else {
        None
    };

    let mut bundle = ResultBundle {
        labels,
        time_labels,
        comid_index,
        expert_losses,
        dfs_losses,
        comid_losses,
        truth_losses: has_truth.then_some(truth_losses),
        weights,
        constants,
        lemma,
        truth_regret,
        component_labels: components.as_ref().and_then(|_| stream.component_labels()),
        components,
        snapshots,
        final_prediction: dfs.aggregate_prediction(),
        meta: Vec::new(),
    };
    fill_meta(&mut bundle, settings);
    Ok(bundle)
}

fn summarize_lemma(terms: &[Vec<LemmaTerms>], c: &BoundConstants) -> LemmaSummary {
    let mut s = LemmaSummary {
        min_slack: f64::INFINITY,
        ..Default::default()
    };
    for (k, row) in terms.iter().enumerate() {
        for (i, term) in row.iter().enumerate() {
            let LemmaCheck { holds, slack, .. } = term.check(c);
            s.checks += 1;
            if !holds {
                s.violations += 1;
            }
            if slack < s.min_slack {
                s.min_slack = slack;
                s.tightest = Some((i, k as u64 + 1));
            }
        }
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn truth_regret(
    settings: &LearnerSettings,
    constants: &BoundConstants,
    truths: &[ParameterPoint],
    truth_losses: &[f64],
    dfs_losses: &[f64],
    expert_losses: &[Vec<f64>],
    deviations: &[Vec<f64>],
) -> Result<TruthRegret> {
    let n = settings.models.len();
    let horizon = dfs_losses.len();
    let by_expert: Vec<Vec<f64>> = (0..n)
        .map(|i| expert_losses.iter().map(|row| row[i]).collect())
        .collect();
    let experts = by_expert
        .iter()
        .map(|trace| cumulative_difference(trace, truth_losses))
        .collect::<Result<Vec<_>>>()?;
    let bounds = deviations
        .iter()
        .map(|dev| {
            let mut acc = 0.0;
            let profile: Vec<f64> = dev
                .iter()
                .map(|d| {
                    acc += d;
                    acc
                })
                .collect();
            theorem2_bound_profile(constants, &settings.schedule, &profile)
        })
        .collect::<Result<Vec<_>>>()?;
    let variation = deviations.iter().map(|d| d.iter().sum()).collect();
    let comparator = ComparatorSequence::new(truths.to_vec(), "ground truth")?;
    let m = settings.switch_budget.min(horizon - 1);
    let segmentation = best_segmentation(&comparator, &settings.models, m, settings.execution)?;
    let eta_r = settings.eta_r.step_size(horizon as u64)?;
    let dfs_bound = dfs_tracking_bound(
        constants,
        &settings.schedule,
        eta_r,
        settings.lambda,
        n,
        m as u64,
        segmentation.total,
        horizon as u64,
    )?;
    let decomposition = tracking_decomposition(dfs_losses, &by_expert, truth_losses, m)?;
    Ok(TruthRegret {
        dfs: cumulative_difference(dfs_losses, truth_losses)?,
        experts,
        bounds,
        variation,
        segmentation,
        dfs_bound,
        decomposition,
    })
}

fn fill_meta(b: &mut ResultBundle, s: &LearnerSettings) {
    b.push_meta("horizon", b.horizon());
    b.push_meta("models", b.labels.join(","));
    b.push_meta("psi_scale", s.geometry.euclidean_scale().unwrap_or(f64::NAN));
    b.push_meta("sigma", s.geometry.sigma());
    b.push_meta("feasible_set", describe_set(&s.set));
    b.push_meta("schedule", describe_schedule(&s.schedule));
    b.push_meta("eta_r", describe_schedule(&s.eta_r));
    b.push_meta("lambda", s.lambda);
    b.push_meta("reg_period", s.reg_period);
    b.push_meta("switch_budget", s.switch_budget);
    b.push_meta("execution", s.execution);
    let c = b.constants;
    b.push_meta("constant_g_ell", c.g_ell);
    b.push_meta("constant_m", c.m);
    b.push_meta("constant_d_max", c.d_max);
    b.push_meta("dfs_total_loss", b.dfs_total());
    b.push_meta("comid_total_loss", b.comid_total());
    for i in 0..b.labels.len() {
        let key = format!("expert_total_loss[{}]", b.labels[i]);
        let v = b.expert_total(i);
        b.push_meta(key, v);
    }
    let (best, total) = b.best_expert();
    let label = b.labels[best].clone();
    b.push_meta("best_expert", label);
    b.push_meta("best_expert_total_loss", total);
    if let Some(l) = b.lemma.clone() {
        b.push_meta("lemma_checks", l.checks);
        b.push_meta("lemma_violations", l.violations);
        b.push_meta("lemma_min_slack", l.min_slack);
    }
    if let Some(r) = &b.truth_regret {
        let seg = r.segmentation.clone();
        let (dfs_bound, dec) = (r.dfs_bound, r.decomposition.clone());
        b.push_meta("segmented_variation", seg.total);
        b.push_meta(
            "segmentation",
            seg.models
                .iter()
                .enumerate()
                .map(|(k, &i)| {
                    let start = if k == 0 { 1 } else { seg.switch_times[k - 1] };
                    format!("{start}:{}", b.labels[i])
                })
                .collect::<Vec<_>>()
                .join(","),
        );
        b.push_meta("dfs_bound_t1", dfs_bound.t1);
        b.push_meta("dfs_bound_t2", dfs_bound.t2);
        b.push_meta("dfs_bound_total", dfs_bound.total);
        b.push_meta("decomposition_t1", dec.t1);
        b.push_meta("decomposition_t2", dec.t2);
        b.push_meta("decomposition_total", dec.total);
    }
}

pub fn describe_set(set: &FeasibleSet) -> String {
    match set {
        FeasibleSet::Unconstrained { dim } => format!("unconstrained(dim={dim})"),
        FeasibleSet::Box { lo, hi } => {
            let (lmin, lmax) = minmax(lo);
            let (hmin, hmax) = minmax(hi);
            if lmin == lmax && hmin == hmax {
                format!("box([{lmin}, {hmin}]^{})", lo.len())
            } else {
                format!("box(dim={})", lo.len())
            }
        }
        FeasibleSet::Ball { center, radius } => format!("ball(dim={}, radius={radius})", center.len()),
    }
}

fn minmax(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
}

pub fn describe_schedule(s: &StepSchedule) -> String {
    match s {
        StepSchedule::Constant(eta) => format!("constant({eta})"),
        StepSchedule::Doubling { base, growth, scale } => {
            format!("doubling(base={base}, growth={growth}, scale={scale})")
        }
    }
}
