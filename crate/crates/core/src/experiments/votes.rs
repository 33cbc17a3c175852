//! Roll-call vote streams: CSV I/O and a synthetic planted-network
//! generator.
//!
//! CSV layout: a header `t,<seat labels...>` and one row per round with a
//! time label followed by `-1`, `0` or `1` per seat.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scenario::LossStream;
use crate::dynamics::NetworkAttraction;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::losses::{ising_pl_components, CompositeLoss, IsingPseudolikelihood, L1Regularizer, Regularizer, VoteDatum};
use crate::point::{ParameterPoint, Shape};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteStream {
    labels: Vec<String>,
    records: Vec<(String, VoteDatum)>,
}

impl VoteStream {
    pub fn new(labels: Vec<String>, records: Vec<(String, VoteDatum)>) -> Result<Self> {
        for (t, d) in &records {
            if d.p() != labels.len() {
                return Err(Error::Argument(format!(
                    "round {t} has {} votes for {} seats",
                    d.p(),
                    labels.len()
                )));
            }
        }
        Ok(Self { labels, records })
    }

    pub fn p(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn records(&self) -> &[(String, VoteDatum)] {
        &self.records
    }

    /// Truncates to the first `n` rounds.
    pub fn truncate(&mut self, n: usize) {
        self.records.truncate(n);
    }
}

pub fn load_votes(path: impl AsRef<Path>) -> Result<VoteStream> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_votes(file, path)
}

pub fn read_votes<R: Read>(reader: R, path: &Path) -> Result<VoteStream> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("t") {
        return Err(parse_err("header must start with `t`".into()));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut records = Vec::new();
    let mut bad_width = Vec::new();
    let mut bad_token = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != labels.len() + 1 {
            bad_width.push(line);
            continue;
        }
        let votes: Option<Vec<i8>> = row
            .iter()
            .skip(1)
            .map(|tok| match tok {
                "1" | "+1" => Some(1),
                "0" => Some(0),
                "-1" => Some(-1),
                _ => None,
            })
            .collect();
        match votes {
            Some(v) => records.push((row[0].to_string(), VoteDatum::new(v)?)),
            None => bad_token.push(line),
        }
    }
    let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
    if !bad_width.is_empty() {
        return Err(parse_err(format!(
            "expected {} fields on line(s) {}",
            labels.len() + 1,
            list(&bad_width)
        )));
    }
    if !bad_token.is_empty() {
        return Err(parse_err(format!(
            "votes must be -1, 0 or 1; bad token on line(s) {}",
            list(&bad_token)
        )));
    }
    VoteStream::new(labels, records)
}

pub fn save_votes(path: impl AsRef<Path>, stream: &VoteStream) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_votes(file, stream)
}

pub fn write_votes<W: Write>(writer: W, stream: &VoteStream) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend(stream.labels.iter().cloned());
    w.write_record(&header)?;
    for (t, d) in &stream.records {
        let mut row = vec![t.clone()];
        row.extend(d.votes().iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Ising influence matrix that evolves by triadic closure, sampled with
/// Gibbs sweeps to produce votes.
///
/// Agents are split into contiguous factions. The first agent of each
/// faction is its hub, tied to every member with weight `strength`; hubs
/// oppose each other with weight `-strength / 2`. Members start unlinked
/// and are drawn together by the dynamic at rate `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedNetwork {
    pub p: usize,
    pub factions: usize,
    pub strength: f64,
    pub alpha: f64,
    pub horizon: u64,
    pub sweeps: usize,
    pub missing_rate: f64,
    pub seed: u64,
}

/// Generated votes plus the influence matrices they were drawn from
/// (`horizon + 1` of them).
#[derive(Clone, Debug)]
pub struct SyntheticVotes {
    pub stream: VoteStream,
    pub truth: Vec<ParameterPoint>,
}

impl PlantedNetwork {
    pub fn desk(seed: u64) -> Self {
        Self {
            p: 20,
            factions: 2,
            strength: 0.3,
            alpha: 0.002,
            horizon: 2000,
            sweeps: 10,
            missing_rate: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::config("p", "need at least two agents"));
        }
        if self.factions == 0 || self.factions > self.p {
            return Err(Error::config("factions", "factions must lie in 1..=p"));
        }
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(Error::config("strength", "strength must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::config("planted_alpha", "alpha must lie in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return Err(Error::config("missing_rate", "missing rate must lie in [0, 1)"));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon", "horizon must be >= 1"));
        }
        Ok(())
    }

    pub fn initial(&self) -> ParameterPoint {
        let p = self.p;
        let size = p.div_ceil(self.factions);
        let faction = |a: usize| a / size;
        let hub = |f: usize| f * size;
        let mut v = vec![0.0; p * p];
        for a in 0..p {
            let h = hub(faction(a));
            if a != h {
                v[a * p + h] = self.strength;
                v[h * p + a] = self.strength;
            }
        }
        for f in 0..self.factions {
            for g in 0..self.factions {
                let (a, b) = (hub(f), hub(g));
                if f != g && a < p && b < p {
                    v[a * p + b] = -self.strength / 2.0;
                }
            }
        }
        ParameterPoint::from_parts(v, Shape::Matrix { rows: p, cols: p })
    }

    /// `theta*_1 .. theta*_{horizon + 1}`.
    pub fn trajectory(&self) -> Result<Vec<ParameterPoint>> {
        self.validate()?;
        let model = NetworkAttraction::new(self.alpha, self.p)?;
        let mut out = Vec::with_capacity(self.horizon as usize + 1);
        out.push(self.initial());
        for _ in 0..self.horizon {
            let next = model.apply(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn generate(&self, exec: Execution) -> Result<SyntheticVotes> {
        let truth = self.trajectory()?;
        let rounds = exec::map_indexed(exec, self.horizon as usize, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(i as u64 + 1);
            gibbs_votes(&truth[i], self.p, self.sweeps, self.missing_rate, &mut rng)
        });
        let records = rounds
            .into_iter()
            .enumerate()
            .map(|(i, v)| Ok(((i + 1).to_string(), VoteDatum::new(v)?)))
            .collect::<Result<Vec<_>>>()?;
        let labels = (1..=self.p).map(|a| format!("s{a}")).collect();
        Ok(SyntheticVotes {
            stream: VoteStream::new(labels, records)?,
            truth,
        })
    }
}

/// One draw from the Ising model with couplings `theta` after `sweeps`
/// Gibbs sweeps from a uniform random start; each agent is then marked
/// missing with probability `missing_rate`.
fn gibbs_votes(theta: &ParameterPoint, p: usize, sweeps: usize, missing_rate: f64, rng: &mut ChaCha8Rng) -> Vec<i8> {
    let th = theta.as_slice();
    let mut x: Vec<f64> = (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    for _ in 0..sweeps {
        for a in 0..p {
            let mut field = th[a * p + a];
            for b in 0..p {
                if b != a {
                    field += th[a * p + b] * x[b];
                }
            }
            let up = 1.0 / (1.0 + (-2.0 * field).exp());
            x[a] = if rng.random::<f64>() < up { 1.0 } else { -1.0 };
        }
    }
    x.iter()
        .map(|&v| {
            if missing_rate > 0.0 && rng.random::<f64>() < missing_rate {
                0
            } else {
                v as i8
            }
        })
        .collect()
}

/// Vote rounds as Ising pseudolikelihood losses with an l1 penalty.
#[derive(Clone, Debug)]
pub struct VoteLossStream {
    votes: VoteStream,
    tau: f64,
    truth: Option<Vec<ParameterPoint>>,
}

impl VoteLossStream {
    pub fn new(votes: VoteStream, tau: f64, truth: Option<Vec<ParameterPoint>>) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::config("tau", format!("tau must be >= 0, got {tau}")));
        }
        if votes.is_empty() {
            return Err(Error::Argument("vote stream is empty".into()));
        }
        if let Some(tr) = &truth {
            if tr.len() < votes.len() {
                return Err(Error::dimension(votes.len(), tr.len()));
            }
        }
        Ok(Self { votes, tau, truth })
    }

    pub fn votes(&self) -> &VoteStream {
        &self.votes
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

impl LossStream for VoteLossStream {
    type Fit = IsingPseudolikelihood;

    fn horizon(&self) -> u64 {
        self.votes.len() as u64
    }

    fn shape(&self) -> Shape {
        let p = self.votes.p();
        Shape::Matrix { rows: p, cols: p }
    }

    fn loss(&self, t: u64) -> Result<CompositeLoss<IsingPseudolikelihood>> {
        let (_, datum) = self
            .votes
            .records()
            .get((t as usize).wrapping_sub(1))
            .ok_or_else(|| Error::Domain(format!("round {t} outside 1..={}", self.votes.len())))?;
        let reg = if self.tau > 0.0 {
            Regularizer::L1(L1Regularizer::new(self.tau)?)
        } else {
            Regularizer::None
        };
        Ok(CompositeLoss::new(IsingPseudolikelihood::new(datum.clone()), reg))
    }

    fn truth(&self, t: u64) -> Option<ParameterPoint> {
        self.truth.as_ref()?.get((t as usize).wrapping_sub(1)).cloned()
    }

    fn components(&self, loss: &CompositeLoss<IsingPseudolikelihood>, theta: &ParameterPoint) -> Option<Vec<f64>> {
        ising_pl_components(&loss.fit, theta).ok()
    }

    fn component_labels(&self) -> Option<Vec<String>> {
        Some(self.votes.labels().to_vec())
    }

    fn time_label(&self, t: u64) -> String {
        self.votes
            .records()
            .get((t as usize).wrapping_sub(1))
            .map(|(l, _)| l.clone())
            .unwrap_or_else(|| t.to_string())
    }
}
