//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use dynmirror::dfs::{update_weights, FixedShareState};
use dynmirror::dmd::{DmdConfig, DmdState};
use dynmirror::dynamics::{
    audit_contraction, shift_family_with, Boundary, DynamicalModel, Motion, PixelShift,
};
use dynmirror::experiments::{
    moving_average, run_scenario, video_setup, votes_setup, ConfigMap, ResultBundle,
};
use dynmirror::geometry::{BregmanGeometry, FeasibleSet, StepSchedule};
use dynmirror::losses::{
    ising_pl_gradient, ising_pl_value, ls_gradient, ls_value, CompositeLoss, L1Regularizer,
    LeastSquaresDatum, Regularizer, VoteDatum,
};
use dynmirror::regret::{best_segmentation, ComparatorSequence};
use dynmirror::{Execution, ParameterPoint, Shape};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: dynmirror::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, sd: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| sd * Distribution::<f64>::sample(&StandardNormal, rng))
}

fn random_ls(rng: &mut ChaCha8Rng, rows: usize, dim: usize) -> LeastSquaresDatum {
    let a = gaussian_matrix(rng, rows, dim, 1.0 / (rows as f64).sqrt());
    let x = DVector::from_fn(rows, |_, _| Distribution::<f64>::sample(&StandardNormal, rng));
    LeastSquaresDatum::new(a, x).unwrap()
}

// ---------------------------------------------------------------------------

/// Plain COMID for `psi = c ||.||^2` on a box, written out by hand.
fn reference_comid(
    data: &[LeastSquaresDatum],
    scale: f64,
    eta: f64,
    tau: f64,
    lo: f64,
    hi: f64,
    dim: usize,
) -> Vec<Vec<f64>> {
    let mut theta = vec![0.0_f64.clamp(lo, hi); dim];
    let mut trace = Vec::with_capacity(data.len());
    for d in data {
        trace.push(theta.clone());
        let g = ls_gradient(d, &ParameterPoint::vector(theta.clone()).unwrap()).unwrap();
        let kappa = eta / (2.0 * scale);
        for (th, gi) in theta.iter_mut().zip(g.as_slice()) {
            let v = *th - kappa * gi;
            let shrunk = v.signum() * (v.abs() - kappa * tau).max(0.0);
            *th = shrunk.clamp(lo, hi);
        }
    }
    trace
}

fn comid_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let streams = 20;
    for s in 0..streams {
        let dim = rng.random_range(2..=16);
        let rows = rng.random_range(1..=12);
        let scale = [0.5, 1.0, 2.0][s % 3];
        let eta = rng.random_range(0.01..0.5);
        let tau = rng.random_range(0.0..0.3);
        let (lo, hi) = (-rng.random_range(0.2..2.0), rng.random_range(0.2..2.0));
        let data: Vec<_> = (0..100).map(|_| random_ls(&mut rng, rows, dim)).collect();
        let expected = reference_comid(&data, scale, eta, tau, lo, hi, dim);

        let config = DmdConfig::new(
            lib(BregmanGeometry::scaled_euclidean(scale))?,
            lib(FeasibleSet::uniform_box(dim, lo, hi))?,
            lib(StepSchedule::constant(eta))?,
            DynamicalModel::Identity,
        );
        let reg = Regularizer::L1(lib(L1Regularizer::new(tau))?);
        let mut dmd = lib(DmdState::new(config.clone(), Shape::Vector(dim)))?;
        let mut comid = lib(DmdState::new(config.clone(), Shape::Vector(dim)))?;
        let single = lib(DmdState::new(config, Shape::Vector(dim)))?;
        let mut dfs = lib(FixedShareState::new(vec![single], lib(StepSchedule::constant(0.3))?, 0.05))?;
        for (t, d) in data.iter().enumerate() {
            let loss = CompositeLoss::new(d, reg);
            let step = t as u64 + 1;
            let want = &expected[t];
            ensure(dmd.prediction().as_slice() == want.as_slice(), || {
                format!("stream {s}: DMD(identity) differs at t={step}")
            })?;
            ensure(comid.prediction().as_slice() == want.as_slice(), || {
                format!("stream {s}: COMID step differs at t={step}")
            })?;
            let round = lib(dfs.step(&loss, step))?;
            ensure(round.prediction.as_slice() == want.as_slice(), || {
                format!("stream {s}: DFS(N=1) differs at t={step}")
            })?;
            lib(dmd.step(&loss, step))?;
            lib(comid.comid_step(&loss, step))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{streams} streams x 100 steps bit-identical in {elapsed:.2?}"))
}

// ---------------------------------------------------------------------------

fn rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = numeric.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / scale.max(1e-8)
}

fn central_difference(f: impl Fn(&[f64]) -> f64, at: &[f64], h: f64) -> Vec<f64> {
    let mut x = at.to_vec();
    (0..at.len())
        .map(|j| {
            x[j] = at[j] + h;
            let up = f(&x);
            x[j] = at[j] - h;
            let down = f(&x);
            x[j] = at[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn gradient_correctness() -> Outcome {
    const H: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_ls = 0.0_f64;
    for i in 0..50 {
        let dim = rng.random_range(1..=64);
        let rows = rng.random_range(1..=40);
        let d = random_ls(&mut rng, rows, dim);
        let theta: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let analytic = lib(ls_gradient(&d, &ParameterPoint::vector(theta.clone()).unwrap()))?;
        let numeric = central_difference(
            |x| ls_value(&d, &ParameterPoint::vector(x.to_vec()).unwrap()).unwrap(),
            &theta,
            H,
        );
        let err = rel_error(analytic.as_slice(), &numeric);
        worst_ls = worst_ls.max(err);
        ensure(err <= 1e-5, || format!("least squares instance {i}: relative error {err:.2e}"))?;
    }
    let mut worst_ising = 0.0_f64;
    for i in 0..50 {
        let p = rng.random_range(2..=8);
        let votes: Vec<i8> = (0..p).map(|_| [-1, 0, 1, 1, -1][rng.random_range(0..5)]).collect();
        let datum = VoteDatum::new(votes).unwrap();
        let theta: Vec<f64> = (0..p * p).map(|_| rng.random_range(-0.9..0.9)).collect();
        let at = ParameterPoint::matrix(theta.clone(), p, p).unwrap();
        let analytic = lib(ising_pl_gradient(&datum, &at))?;
        let numeric = central_difference(
            |x| ising_pl_value(&datum, &ParameterPoint::matrix(x.to_vec(), p, p).unwrap()).unwrap(),
            &theta,
            H,
        );
        let err = rel_error(analytic.as_slice(), &numeric);
        worst_ising = worst_ising.max(err);
        ensure(err <= 1e-5, || format!("ising instance {i}: relative error {err:.2e}"))?;
    }
    Ok(format!("worst relative error: least squares {worst_ls:.1e}, ising {worst_ising:.1e}"))
}

// ---------------------------------------------------------------------------

fn step_objective(eta: f64, g: &[f64], tau: f64, scale: f64, hat: &[f64], x: &[f64]) -> f64 {
    let lin: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    let div: f64 = x.iter().zip(hat).map(|(a, b)| scale * (a - b).powi(2)).sum();
    eta * lin + eta * tau * l1 + div
}

/// Coarse grid over the box followed by successively finer local grids.
fn grid_minimize(f: impl Fn(&[f64]) -> f64, lo: [f64; 2], hi: [f64; 2]) -> [f64; 2] {
    let n = 400;
    let mut best = [lo[0], lo[1]];
    let mut best_val = f64::INFINITY;
    let search = |lo: [f64; 2], hi: [f64; 2], best: &mut [f64; 2], best_val: &mut f64| {
        for i in 0..=n {
            let x = lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64;
            for j in 0..=n {
                let y = lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64;
                let v = f(&[x, y]);
                if v < *best_val {
                    *best_val = v;
                    *best = [x, y];
                }
            }
        }
    };
    search(lo, hi, &mut best, &mut best_val);
    let mut half = [(hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64];
    for _ in 0..3 {
        let c = best;
        let l = [(c[0] - half[0]).max(lo[0]), (c[1] - half[1]).max(lo[1])];
        let h = [(c[0] + half[0]).min(hi[0]), (c[1] + half[1]).min(hi[1])];
        search(l, h, &mut best, &mut best_val);
        half = [half[0] * 4.0 / n as f64, half[1] * 4.0 / n as f64];
    }
    best
}

fn prox_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0_f64;
    for i in 0..25 {
        let scale = [0.5, 1.0, 2.0][i % 3];
        let eta = rng.random_range(0.05..1.0);
        let tau = rng.random_range(0.0..1.0);
        let lo = [-rng.random_range(0.1..1.5), -rng.random_range(0.1..1.5)];
        let hi = [rng.random_range(0.1..1.5), rng.random_range(0.1..1.5)];
        let hat = [rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1])];
        let rows = rng.random_range(1..=4);
        let d = random_ls(&mut rng, rows, 2);
        let g = lib(ls_gradient(&d, &ParameterPoint::vector(hat.to_vec()).unwrap()))?;

        let config = DmdConfig::new(
            lib(BregmanGeometry::scaled_euclidean(scale))?,
            lib(FeasibleSet::boxed(lo.to_vec(), hi.to_vec()))?,
            lib(StepSchedule::constant(eta))?,
            DynamicalModel::Identity,
        );
        let mut state =
            lib(lib(DmdState::new(config, Shape::Vector(2)))?.starting_at(&ParameterPoint::vector(hat.to_vec()).unwrap()))?;
        let loss = CompositeLoss::new(&d, Regularizer::L1(lib(L1Regularizer::new(tau))?));
        lib(state.step(&loss, 1))?;
        let got = state.theta_tilde().as_slice().to_vec();
        let want = grid_minimize(|x| step_objective(eta, g.as_slice(), tau, scale, &hat, x), lo, hi);
        let err = (got[0] - want[0]).abs().max((got[1] - want[1]).abs());
        worst = worst.max(err);
        ensure(err <= 2e-3, || format!("instance {i}: closed form {got:?}, grid {want:?}"))?;
    }
    Ok(format!("25 instances, worst coordinate gap {worst:.1e}"))
}

// ---------------------------------------------------------------------------

fn simplex_invariants() -> Outcome {
    // Raw weight update: one expert alternately costs nothing and a fortune.
    let n = 5;
    let mut w = vec![1.0 / n as f64; n];
    let mut min_weight = f64::INFINITY;
    for t in 0..10_000 {
        let losses: Vec<f64> = (0..n)
            .map(|i| if (i + t) % 2 == 0 { 0.0 } else { 1e6 * (1 + i) as f64 })
            .collect();
        lib(update_weights(&mut w, &losses, 1.0, 1e-4))?;
        let sum: f64 = w.iter().sum();
        ensure(w.iter().all(|v| *v >= 0.0 && v.is_finite()), || format!("t={t}: invalid weight {w:?}"))?;
        ensure((sum - 1.0).abs() <= 1e-12, || format!("t={t}: weights sum to {sum}"))?;
        ensure(w.iter().any(|v| *v > 0.0), || format!("t={t}: all weights vanished"))?;
        min_weight = min_weight.min(w.iter().cloned().fold(f64::INFINITY, f64::min));
    }

    // Full forecaster on a target that jumps between opposite corners.
    let dim = 6;
    let set = lib(FeasibleSet::uniform_box(dim, -1.0, 1.0))?;
    let models: Vec<DynamicalModel> = [Motion::parse("static"), Motion::parse("E"), Motion::parse("W")]
        .into_iter()
        .map(|m| PixelShift::new(m.unwrap(), 1, dim, Boundary::ZeroFill).map(DynamicalModel::PixelShift))
        .collect::<dynmirror::Result<_>>()
        .map_err(|e| e.to_string())?;
    let experts = models
        .into_iter()
        .map(|m| {
            DmdState::new(
                DmdConfig::new(
                    BregmanGeometry::squared_euclidean(),
                    set.clone(),
                    StepSchedule::Constant(0.4),
                    m,
                ),
                Shape::Matrix { rows: 1, cols: dim },
            )
        })
        .collect::<dynmirror::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let mut dfs = lib(FixedShareState::new(experts, StepSchedule::Constant(50.0), 1e-6))?;
    let a = DMatrix::<f64>::identity(dim, dim) * 30.0;
    for t in 1..=10_000u64 {
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        let x = DVector::from_fn(dim, |j, _| sign * 30.0 * if j % 2 == 0 { 1.0 } else { -1.0 });
        let d = LeastSquaresDatum::with_shape(a.clone(), x, Shape::Matrix { rows: 1, cols: dim }).unwrap();
        lib(dfs.step(&CompositeLoss::new(&d, Regularizer::None), t))?;
        let w = dfs.weights();
        let sum: f64 = w.iter().sum();
        ensure(w.iter().all(|v| *v >= 0.0 && v.is_finite()), || format!("forecaster t={t}: {w:?}"))?;
        ensure((sum - 1.0).abs() <= 1e-12, || format!("forecaster t={t}: sum {sum}"))?;
        ensure(w.iter().any(|v| *v > 0.0), || format!("forecaster t={t}: all zero"))?;
    }
    Ok(format!("10000 rounds, two runs, smallest raw-update weight {min_weight:.1e}"))
}

// ---------------------------------------------------------------------------

/// Every index path with at most `m` changes, scored directly from the models.
fn brute_force_segmentation(points: &[ParameterPoint], models: &[DynamicalModel], m: usize) -> f64 {
    let steps = points.len() - 1;
    let n = models.len();
    let cost = |i: usize, t: usize| points[t + 1].distance(&models[i].apply(&points[t], t as u64 + 1).unwrap());
    let mut best = f64::INFINITY;
    let mut path = vec![0usize; steps];
    let total_paths = n.pow(steps as u32);
    for code in 0..total_paths {
        let mut c = code;
        for slot in path.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let switches = path.windows(2).filter(|w| w[0] != w[1]).count();
        if switches > m {
            continue;
        }
        let total: f64 = path.iter().enumerate().map(|(t, &i)| cost(i, t)).sum();
        best = best.min(total);
    }
    best
}

fn segmentation_dp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let family = ["static", "E", "W", "N", "S"];
    for k in 0..50 {
        let steps = rng.random_range(2..=12usize);
        let n = rng.random_range(1..=3usize);
        let m = rng.random_range(0..=2usize).min(steps - 1);
        let (rows, cols) = (2, 3);
        let models: Vec<DynamicalModel> = (0..n)
            .map(|_| {
                let motion = Motion::parse(family[rng.random_range(0..family.len())]).unwrap();
                DynamicalModel::PixelShift(PixelShift::new(motion, rows, cols, Boundary::ZeroFill).unwrap())
            })
            .collect();
        let points: Vec<ParameterPoint> = (0..=steps)
            .map(|_| ParameterPoint::matrix((0..rows * cols).map(|_| rng.random::<f64>()).collect(), rows, cols).unwrap())
            .collect();
        let comparator = lib(ComparatorSequence::new(points.clone(), "random"))?;
        let dp = lib(best_segmentation(&comparator, &models, m, Execution::Sequential))?;
        let brute = brute_force_segmentation(&points, &models, m);
        ensure((dp.total - brute).abs() <= 1e-12 * brute.max(1.0), || {
            format!("instance {k} (T={steps}, N={n}, m={m}): dp {} vs brute force {brute}", dp.total)
        })?;
        let replay: f64 = dp
            .path()
            .iter()
            .enumerate()
            .map(|(t, &i)| points[t + 1].distance(&models[i].apply(&points[t], t as u64 + 1).unwrap()))
            .sum();
        ensure((replay - dp.total).abs() <= 1e-12 * brute.max(1.0), || {
            format!("instance {k}: reported path costs {replay}, total says {}", dp.total)
        })?;
        ensure(dp.switch_times.len() <= m, || format!("instance {k}: too many switches"))?;
    }
    Ok("50 instances match exhaustive enumeration".into())
}

// ---------------------------------------------------------------------------

struct VideoRun {
    bundle: ResultBundle,
    elapsed: Duration,
}

fn desk_video() -> Result<VideoRun, String> {
    let config = ConfigMap::new();
    let setup = lib(video_setup(&config))?;
    let start = Instant::now();
    let bundle = lib(run_scenario(&setup.stream, &setup.settings))?;
    Ok(VideoRun { bundle, elapsed: start.elapsed() })
}

fn lemma_per_step(run: &VideoRun) -> Outcome {
    let lemma = run.bundle.lemma.as_ref().ok_or("lemma checks were not recorded")?;
    ensure(lemma.checks == 200 * run.bundle.labels.len(), || format!("only {} checks ran", lemma.checks))?;
    ensure(lemma.violations == 0, || {
        format!("{} of {} violated, tightest {:?}", lemma.violations, lemma.checks, lemma.tightest)
    })?;
    Ok(format!("{} checks, 0 violations, min slack {:.3}", lemma.checks, lemma.min_slack))
}

/// `R_T` of a single correctly-specified learner against a truth that
/// follows the learner's dynamic exactly.
fn matched_regret(horizon: u64, seed: u64) -> Result<f64, String> {
    let mut config = ConfigMap::new();
    for (k, v) in [
        ("seed", seed.to_string()),
        ("rows", "16".into()),
        ("cols", "16".into()),
        ("block", "4".into()),
        ("start_row", "6".into()),
        ("start_col", "6".into()),
        ("measurements", "64".into()),
        ("horizon", horizon.to_string()),
        ("trajectory", "1:NE".into()),
        ("eta", (2.0 / (horizon as f64).sqrt()).to_string()),
        ("lemma_checks", "false".into()),
    ] {
        config.set(k, v);
    }
    let mut setup = lib(video_setup(&config))?;
    let matched = setup
        .settings
        .models
        .iter()
        .find(|m| m.label() == "NE")
        .cloned()
        .ok_or("no NE model in the family")?;
    setup.settings.models = vec![DynamicalModel::Identity, matched];
    setup.settings.switch_budget = 0;
    let bundle = lib(run_scenario(&setup.stream, &setup.settings))?;
    let truth = bundle.truth_regret.as_ref().ok_or("no ground truth regret")?;
    ensure(truth.variation[1] == 0.0, || format!("truth deviates from its dynamic by {}", truth.variation[1]))?;
    Ok(*truth.experts[1].last().unwrap())
}

fn theorem_bound(run: &VideoRun) -> Outcome {
    let truth = run.bundle.truth_regret.as_ref().ok_or("no ground truth regret")?;
    for (i, (reg, bound)) in truth.experts.iter().zip(&truth.bounds).enumerate() {
        if let Some(t) = reg.iter().zip(bound).position(|(r, b)| r > b) {
            return Err(format!(
                "expert {} exceeds its bound at t={}: {} > {}",
                run.bundle.labels[i],
                t + 1,
                reg[t],
                bound[t]
            ));
        }
    }

    let horizons = [128u64, 256, 512, 1024];
    let seeds = 1..=5u64;
    let mut ratios = Vec::new();
    for &t in &horizons {
        let mut acc = 0.0;
        for seed in seeds.clone() {
            acc += matched_regret(t, seed)? / (t as f64).sqrt();
        }
        ratios.push(acc / seeds.clone().count() as f64);
    }
    for w in ratios.windows(2) {
        ensure(w[1] <= 1.1 * w[0], || format!("R_T/sqrt(T) grew: {ratios:?}"))?;
    }
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok(format!(
        "regret under bound for all {} experts; mean R_T/sqrt(T) at T=128..1024: {}",
        truth.experts.len(),
        shown.join(", ")
    ))
}

fn video_tracking(run: &VideoRun) -> Outcome {
    let b = &run.bundle;
    let horizon = b.horizon();
    let window = 30;
    let switch = horizon / 2;
    let ma: Vec<Vec<f64>> = (0..b.labels.len()).map(|i| moving_average(&b.expert_trace(i), window)).collect();
    let index_of = |label: &str| b.labels.iter().position(|l| l == label).ok_or(format!("no expert {label}"));
    let before = index_of("NE")?;
    let after = index_of("SE")?;
    let leader = |t: usize| {
        (0..ma.len())
            .min_by(|&i, &j| ma[i][t].total_cmp(&ma[j][t]))
            .unwrap()
    };
    for t in window - 1..switch {
        let l = leader(t);
        ensure(l == before, || format!("t={}: {} leads before the switch", t + 1, b.labels[l]))?;
    }
    for t in switch + window - 1..horizon {
        let l = leader(t);
        ensure(l == after, || format!("t={}: {} leads after the switch", t + 1, b.labels[l]))?;
    }
    let (best, best_total) = b.best_expert();
    let dfs = b.dfs_total();
    let comid = b.comid_total();
    ensure(dfs <= 1.1 * best_total, || {
        format!("DFS {dfs:.3} above 1.1 x best expert {} ({best_total:.3})", b.labels[best])
    })?;
    ensure(dfs < comid, || format!("DFS {dfs:.3} not below COMID {comid:.3}"))?;
    ensure(run.elapsed < Duration::from_secs(60), || format!("run took {:?}", run.elapsed))?;
    Ok(format!(
        "NE then SE lead the 30-step average; DFS {dfs:.1}, best single {} {best_total:.1}, COMID {comid:.1}; {:.2?}",
        b.labels[best], run.elapsed
    ))
}

// ---------------------------------------------------------------------------

fn vote_tracking() -> Outcome {
    let mut lines = Vec::new();
    for seed in 1..=3u64 {
        let mut config = ConfigMap::new();
        config.set("seed", seed.to_string());
        config.set("p", "20");
        config.set("horizon", "2000");
        let setup = lib(votes_setup(&config))?;
        let b = lib(run_scenario(&setup.stream, &setup.settings))?;
        let comid = b.comid_index.ok_or("no alpha = 0 expert")?;
        let tail = b.horizon() * 3 / 4;
        let n = (b.horizon() - tail) as f64;
        let dfs: f64 = b.dfs_losses[tail..].iter().sum::<f64>() / n;
        let base: f64 = b.comid_losses[tail..].iter().sum::<f64>() / n;
        ensure(b.labels[comid] == "alpha=0", || format!("comid expert is {}", b.labels[comid]))?;
        ensure(dfs <= base, || format!("seed {seed}: DFS {dfs:.4} above COMID {base:.4} in the final quarter"))?;
        lines.push(format!("seed {seed}: {dfs:.3} vs {base:.3}"));
    }
    Ok(format!("final-quarter mean loss, DFS vs COMID: {}", lines.join("; ")))
}

// ---------------------------------------------------------------------------

fn contraction_audits() -> Outcome {
    let (rows, cols) = (32, 32);
    let shape = Shape::Matrix { rows, cols };
    let geom = BregmanGeometry::squared_euclidean();
    let set = lib(FeasibleSet::uniform_box(rows * cols, 0.0, 1.0))?;
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for boundary in [Boundary::ZeroFill, Boundary::Wrap] {
        let mut models = vec![DynamicalModel::Identity];
        models.extend(lib(shift_family_with(rows, cols, boundary))?);
        for model in &models {
            let audit = lib(audit_contraction(model, &geom, &set, shape, 1000, 7, Execution::Parallel))?;
            ensure(audit.samples == 1000, || format!("{} audited {} pairs", model.label(), audit.samples))?;
            ensure(audit.estimate <= 1e-10, || {
                format!("{} ({boundary:?}) estimate {:.3e}", model.label(), audit.estimate)
            })?;
            worst = worst.max(audit.estimate);
            count += 1;
        }
    }
    Ok(format!("{count} audits over 1000 pairs, largest estimate {worst:.2e}"))
}

// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |name: &str, outcome: Outcome, elapsed: Duration| match outcome {
        Ok(detail) => println!("PASS  {name:<28} [{elapsed:>9.2?}] {detail}"),
        Err(why) => {
            failures += 1;
            println!("FAIL  {name:<28} [{elapsed:>9.2?}] {why}");
        }
    };
    let timed = |f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        (out, start.elapsed())
    };

    let (o, e) = timed(&comid_equivalence);
    report("1  comid equivalence", o, e);
    let (o, e) = timed(&gradient_correctness);
    report("2  gradient correctness", o, e);
    let (o, e) = timed(&prox_optimality);
    report("3  step optimality", o, e);
    let (o, e) = timed(&simplex_invariants);
    report("4  simplex invariants", o, e);
    let (o, e) = timed(&segmentation_dp);
    report("5  segmentation dp", o, e);

    match desk_video() {
        Ok(run) => {
            let (o, e) = timed(&|| lemma_per_step(&run));
            report("6  per-step inequality", o, e);
            let (o, e) = timed(&|| theorem_bound(&run));
            report("7  regret bound and growth", o, e);
            let (o, e) = timed(&|| video_tracking(&run));
            report("8  video tracking", o, e + run.elapsed);
        }
        Err(why) => {
            for name in ["6  per-step inequality", "7  regret bound and growth", "8  video tracking"] {
                report(name, Err(format!("desk video run failed: {why}")), Duration::ZERO);
            }
        }
    }

    let (o, e) = timed(&vote_tracking);
    report("9  vote tracking", o, e);
    let (o, e) = timed(&contraction_audits);
    report("10 contraction audits", o, e);

    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
