//! Random-matrix experiments.
//!
//! Columns are drawn uniformly from `F_2^k`, requests iid from a point mass
//! or uniformly from the nonzero vectors. Trial `i` of a run seeded with `s`
//! draws everything from its own generator seeded with `s ^ i`, so results
//! do not depend on how trials are scheduled across threads.

mod bounds;
mod estimators;
mod fb_gap;
mod sweep;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gf2::{check_dim, Gf2Error, GroupVector, Matrix, RequestSeq};
use crate::solver::{t_param, Budget, Regime, SolverError, TParamKind};

pub use bounds::{mcdiarmid_radius, mean_variance, moment_bound, BoundError};
pub use estimators::{
    bound_subset_size, greedy_subset_size, largest_servable_subset, longest_servable_prefix, Bracket, L_EXACT_LIMIT,
};
pub use fb_gap::{fb_gap_search, GapHit, GapReport};
pub use sweep::{sweep, write_csv, ConfigSpec, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Dimension(#[from] Gf2Error),
    #[error("unknown statistic `{0}`")]
    UnknownStat(String),
    #[error("unknown request distribution `{0}`")]
    UnknownDistribution(String),
    #[error("{0} needs a request vector")]
    MissingRequest(String),
    #[error("a point-mass request distribution cannot be the zero vector")]
    ZeroRequest,
    #[error("request vector has dimension {got}, expected {k}")]
    RequestDimension { k: u8, got: u8 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("csv output failed: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RequestDist {
    Point(GroupVector),
    /// uniform over the nonzero vectors
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    TParam(TParamKind),
    /// longest servable prefix of the request stream
    LongestPrefix,
    /// largest servable subset of the first `n` requests
    LargestSubset,
}

impl Statistic {
    /// Parses names such as `trp`, `fp`, `fb2`, `b`, `v`, `l`. A trailing
    /// number on a t-parameter caps recovery sets at that size.
    pub fn parse(name: &str, r: Option<GroupVector>) -> Result<Self, MonteCarloError> {
        let unknown = || MonteCarloError::UnknownStat(name.to_string());
        match name {
            "v" => return Ok(Statistic::LongestPrefix),
            "l" => return Ok(Statistic::LargestSubset),
            _ => {}
        }
        let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
        let (head, digits) = name.split_at(split);
        let weight_cap = if digits.is_empty() { None } else { Some(digits.parse::<usize>().map_err(|_| unknown())?) };
        if weight_cap == Some(0) {
            return Err(unknown());
        }
        let regime = match head {
            "b" => Regime::Batch,
            "p" => Regime::Pir,
            "fb" => Regime::FunctionalBatch,
            "fp" => Regime::FunctionalPir,
            "trp" | "rp" => Regime::RequestPir(r.ok_or_else(|| MonteCarloError::MissingRequest(name.to_string()))?),
            _ => return Err(unknown()),
        };
        Ok(Statistic::TParam(TParamKind { regime, weight_cap }))
    }

    pub fn name(&self) -> String {
        match self {
            Statistic::LongestPrefix => "v".into(),
            Statistic::LargestSubset => "l".into(),
            Statistic::TParam(kind) => {
                let head = match kind.regime {
                    Regime::RequestPir(_) => "trp",
                    other => other.short_name(),
                };
                match kind.weight_cap {
                    Some(w) => format!("{head}{w}"),
                    None => head.to_string(),
                }
            }
        }
    }

    fn uses_requests(&self) -> bool {
        !matches!(self, Statistic::TParam(_))
    }
}

impl Serialize for Statistic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub k: u8,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub request_dist: RequestDist,
    pub stat: Statistic,
    /// significance level of the reported McDiarmid radius
    pub alpha: f64,
    pub budget: Budget,
}

impl SimConfig {
    pub const DEFAULT_ALPHA: f64 = 0.05;

    pub fn new(k: u8, n: usize, trials: usize, seed: u64, stat: Statistic) -> Self {
        Self {
            k,
            n,
            trials,
            seed,
            request_dist: RequestDist::Uniform,
            stat,
            alpha: Self::DEFAULT_ALPHA,
            budget: Budget::default(),
        }
    }

    pub fn with_requests(mut self, q: RequestDist) -> Self {
        self.request_dist = q;
        self
    }

    pub fn validate(&self) -> Result<(), MonteCarloError> {
        check_dim(self.k as u32)?;
        if self.trials == 0 {
            return Err(MonteCarloError::NoTrials);
        }
        mcdiarmid_radius(1, self.alpha, false)?;
        let mut vectors = Vec::new();
        if let RequestDist::Point(r) = self.request_dist {
            vectors.push(r);
        }
        if let Statistic::TParam(TParamKind { regime: Regime::RequestPir(r), .. }) = self.stat {
            vectors.push(r);
        }
        for r in vectors {
            if r.k() != self.k {
                return Err(MonteCarloError::RequestDimension { k: self.k, got: r.k() });
            }
            if r.is_zero() {
                return Err(MonteCarloError::ZeroRequest);
            }
        }
        Ok(())
    }
}

/// Generator for one trial, seeded with `seed ^ trial`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial as u64)
}

/// `n` columns drawn independently and uniformly from `F_2^k`.
pub fn sample_matrix(k: u8, n: usize, rng: &mut impl Rng) -> Result<Matrix, Gf2Error> {
    check_dim(k as u32)?;
    let columns = (0..n).map(|_| GroupVector::from_raw(k, rng.gen_range(0..1u32 << k))).collect();
    Matrix::new(k, columns)
}

/// `count` iid requests of dimension `k`.
pub fn sample_requests(k: u8, q: RequestDist, count: usize, rng: &mut impl Rng) -> Result<RequestSeq, Gf2Error> {
    check_dim(k as u32)?;
    let requests = match q {
        RequestDist::Point(r) => vec![r; count],
        RequestDist::Uniform => (0..count).map(|_| GroupVector::from_raw(k, rng.gen_range(1..1u32 << k))).collect(),
    };
    RequestSeq::new(k, requests)
}

/// The matrix and, for request statistics, the `n` requests of one trial.
pub fn trial_instance(cfg: &SimConfig, trial: usize) -> Result<(Matrix, Option<RequestSeq>), Gf2Error> {
    let mut rng = trial_rng(cfg.seed, trial);
    let g = sample_matrix(cfg.k, cfg.n, &mut rng)?;
    let r = if cfg.stat.uses_requests() { Some(sample_requests(cfg.k, cfg.request_dist, cfg.n, &mut rng)?) } else { None };
    Ok((g, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Exact,
    /// only bounds were established
    Interval,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialSample {
    pub trial: usize,
    pub lower: u64,
    pub upper: u64,
    pub status: TrialStatus,
}

impl TrialSample {
    /// The exact value, or the midpoint of an interval; `None` if the
    /// trial ran out of budget.
    pub fn value(&self) -> Option<f64> {
        match self.status {
            TrialStatus::BudgetExceeded => None,
            _ => Some((self.lower + self.upper) as f64 / 2.0),
        }
    }
}

/// Runs one trial of `cfg`.
pub fn run_trial(cfg: &SimConfig, trial: usize) -> Result<TrialSample, MonteCarloError> {
    let (g, r) = trial_instance(cfg, trial)?;
    let gp = g.profile();
    let bracket = match cfg.stat {
        Statistic::TParam(kind) => match t_param(&gp, &kind, cfg.budget) {
            Ok(out) => Ok(Bracket::exact(out.value)),
            Err(e) => Err(e),
        },
        Statistic::LongestPrefix => longest_servable_prefix(&gp, r.as_ref().expect("requests sampled").requests(), cfg.budget),
        Statistic::LargestSubset => largest_servable_subset(&gp, r.as_ref().expect("requests sampled").requests(), cfg.budget),
    };
    match bracket {
        Ok(b) => {
            let status = if b.is_exact() { TrialStatus::Exact } else { TrialStatus::Interval };
            Ok(TrialSample { trial, lower: b.lower, upper: b.upper, status })
        }
        Err(SolverError::BudgetExceeded { .. }) => {
            Ok(TrialSample { trial, lower: 0, upper: cfg.n as u64, status: TrialStatus::BudgetExceeded })
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub stat: Statistic,
    pub k: u8,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub samples: Vec<TrialSample>,
    /// over trials that did not run out of budget, intervals at midpoints
    pub mean: f64,
    pub variance: f64,
    /// one-sided for t-parameters, two-sided for `L`, absent for `V`
    pub mcdiarmid_radius: Option<f64>,
    pub alpha: f64,
    pub ratio_mean: f64,
    pub mean_lower: f64,
    pub mean_upper: f64,
    pub exact_trials: usize,
    pub interval_trials: usize,
    pub budget_exceeded_trials: usize,
}

/// Runs every trial of `cfg` in parallel on the current rayon pool.
pub fn estimate_stat(cfg: &SimConfig) -> Result<SimResult, MonteCarloError> {
    cfg.validate()?;
    let samples = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Result<Vec<_>, _>>()?;
    summarize(cfg, samples)
}

fn summarize(cfg: &SimConfig, samples: Vec<TrialSample>) -> Result<SimResult, MonteCarloError> {
    let count = |s: TrialStatus| samples.iter().filter(|x| x.status == s).count();
    let done: Vec<&TrialSample> = samples.iter().filter(|s| s.status != TrialStatus::BudgetExceeded).collect();
    let values: Vec<f64> = done.iter().filter_map(|s| s.value()).collect();
    let (mean, variance) = mean_variance(&values);
    let avg = |f: fn(&TrialSample) -> u64| {
        if done.is_empty() {
            f64::NAN
        } else {
            done.iter().map(|s| f(s) as f64).sum::<f64>() / done.len() as f64
        }
    };
    let n = cfg.n as u64;
    let mcdiarmid = match cfg.stat {
        Statistic::TParam(_) => Some(mcdiarmid_radius(n, cfg.alpha, false)?),
        Statistic::LargestSubset => Some(mcdiarmid_radius(n, cfg.alpha, true)?),
        Statistic::LongestPrefix => None,
    };
    let ratio = |x: f64| if cfg.n == 0 { 0.0 } else { x / cfg.n as f64 };
    Ok(SimResult {
        stat: cfg.stat,
        k: cfg.k,
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        mean,
        variance,
        mcdiarmid_radius: mcdiarmid,
        alpha: cfg.alpha,
        ratio_mean: ratio(mean),
        mean_lower: avg(|s| s.lower),
        mean_upper: avg(|s| s.upper),
        exact_trials: count(TrialStatus::Exact),
        interval_trials: count(TrialStatus::Interval),
        budget_exceeded_trials: count(TrialStatus::BudgetExceeded),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gv(s: &str) -> GroupVector {
        GroupVector::parse(s).unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_matrix(4, 50, &mut trial_rng(7, 3)).unwrap();
        let b = sample_matrix(4, 50, &mut trial_rng(7, 3)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_matrix(4, 50, &mut trial_rng(7, 4)).unwrap());
        assert_eq!(sample_matrix(3, 0, &mut trial_rng(0, 0)).unwrap().n(), 0);
    }

    #[test]
    fn column_frequencies() {
        let g = sample_matrix(3, 8000, &mut trial_rng(11, 0)).unwrap().profile();
        for &c in g.counts() {
            assert!((c as f64 / 8000.0 - 0.125).abs() <= 0.02, "{c}");
        }
    }

    #[test]
    fn request_frequencies() {
        let mut rng = trial_rng(5, 0);
        assert!(sample_requests(2, RequestDist::Uniform, 0, &mut rng).unwrap().is_empty());
        let r = sample_requests(2, RequestDist::Point(gv("10")), 20, &mut rng).unwrap();
        assert!(r.requests().iter().all(|&v| v == gv("10")));
        let r = sample_requests(2, RequestDist::Uniform, 9000, &mut rng).unwrap().profile();
        assert_eq!(r.zero_count(), 0);
        for t in 1..4 {
            assert!((r.counts()[t] as f64 / 9000.0 - 1.0 / 3.0).abs() < 0.03);
        }
    }

    #[test]
    fn statistic_names_round_trip() {
        let r = Some(gv("011"));
        for name in ["trp", "fp", "fb2", "fb", "b", "p", "v", "l", "trp2"] {
            assert_eq!(Statistic::parse(name, r).unwrap().name(), name);
        }
        assert!(matches!(Statistic::parse("trp", None), Err(MonteCarloError::MissingRequest(_))));
        assert!(Statistic::parse("fb0", None).is_err());
        assert!(Statistic::parse("x", None).is_err());
    }

    #[test]
    fn k1_prefix_found_by_seed_search() {
        let base = SimConfig::new(1, 3, 1, 0, Statistic::LongestPrefix).with_requests(RequestDist::Point(gv("1")));
        let want = [gv("1"), gv("1"), gv("0")];
        let cfg = (0..10_000u64)
            .map(|seed| SimConfig { seed, ..base.clone() })
            .find(|cfg| trial_instance(cfg, 0).unwrap().0.columns() == want)
            .expect("some seed yields the matrix");
        let sample = run_trial(&cfg, 0).unwrap();
        assert_eq!((sample.lower, sample.status), (2, TrialStatus::Exact));
    }

    #[test]
    fn estimate_fills_summary() {
        let cfg = SimConfig::new(2, 12, 20, 99, Statistic::parse("fp", None).unwrap());
        let res = estimate_stat(&cfg).unwrap();
        assert_eq!(res.samples.len(), 20);
        assert!(res.samples.iter().all(|s| s.upper <= 12 && s.status == TrialStatus::Exact));
        assert!((res.ratio_mean - res.mean / 12.0).abs() < 1e-12);
        assert!((res.mcdiarmid_radius.unwrap() - mcdiarmid_radius(12, 0.05, false).unwrap()).abs() < 1e-12);
        assert_eq!(res, estimate_stat(&cfg).unwrap());
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let cfg = SimConfig::new(3, 40, 16, 1234, Statistic::LargestSubset);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        assert_eq!(one.install(|| estimate_stat(&cfg)).unwrap(), four.install(|| estimate_stat(&cfg)).unwrap());
    }

    #[test]
    fn invalid_configs() {
        let stat = Statistic::LongestPrefix;
        assert_eq!(SimConfig::new(3, 5, 0, 0, stat).validate(), Err(MonteCarloError::NoTrials));
        let cfg = SimConfig { alpha: 1.5, ..SimConfig::new(3, 5, 1, 0, stat) };
        assert!(matches!(cfg.validate(), Err(MonteCarloError::Bound(_))));
        let cfg = SimConfig::new(3, 5, 1, 0, stat).with_requests(RequestDist::Point(gv("01")));
        assert_eq!(cfg.validate(), Err(MonteCarloError::RequestDimension { k: 3, got: 2 }));
        assert!(SimConfig::new(0, 5, 1, 0, stat).validate().is_err());
    }
}
