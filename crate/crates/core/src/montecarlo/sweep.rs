//! Batches of configurations and their CSV rendering.

use std::io::Write;

use serde::Deserialize;

use super::{estimate_stat, MonteCarloError, RequestDist, SimConfig, SimResult, Statistic, TrialStatus};
use crate::gf2::GroupVector;
use crate::solver::Budget;

pub const CSV_HEADER: [&str; 7] = ["n", "k", "stat", "trial", "value", "ratio", "status"];

/// One configuration as written in a sweep file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub k: u8,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub stat: String,
    #[serde(default)]
    pub r: Option<String>,
    /// `uniform` (default) or `point`
    #[serde(default)]
    pub q: Option<String>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub budget: Option<u64>,
}

impl ConfigSpec {
    pub fn into_config(self, default_budget: Budget) -> Result<SimConfig, MonteCarloError> {
        let r = self.r.as_deref().map(GroupVector::parse).transpose()?;
        let stat = Statistic::parse(&self.stat, r)?;
        let request_dist = match self.q.as_deref() {
            None | Some("uniform") => RequestDist::Uniform,
            Some("point") => RequestDist::Point(r.ok_or_else(|| MonteCarloError::MissingRequest("point".into()))?),
            Some(other) => return Err(MonteCarloError::UnknownDistribution(other.to_string())),
        };
        let cfg = SimConfig {
            k: self.k,
            n: self.n,
            trials: self.trials,
            seed: self.seed,
            request_dist,
            stat,
            alpha: self.alpha.unwrap_or(SimConfig::DEFAULT_ALPHA),
            budget: self.budget.map(Budget::new).unwrap_or(default_budget),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs each configuration in order.
pub fn sweep(cfgs: &[SimConfig]) -> Result<Vec<SimResult>, MonteCarloError> {
    cfgs.iter().map(estimate_stat).collect()
}

fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        String::new()
    }
}

/// One row per trial and one `summary` row per result. Interval trials
/// report their midpoint and carry the bounds in the status column.
pub fn write_csv(results: &[SimResult], out: impl Write) -> Result<(), MonteCarloError> {
    let err = |e: csv::Error| MonteCarloError::Csv(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(err)?;
    for res in results {
        let (n, k, stat) = (res.n.to_string(), res.k.to_string(), res.stat.name());
        let ratio = |v: f64| if res.n == 0 { 0.0 } else { v / res.n as f64 };
        for s in &res.samples {
            let (value, ratio, status) = match (s.status, s.value()) {
                (TrialStatus::Exact, Some(v)) => (s.lower.to_string(), fmt_real(ratio(v)), "exact".to_string()),
                (TrialStatus::Interval, Some(v)) => {
                    (fmt_real(v), fmt_real(ratio(v)), format!("interval:{}..{}", s.lower, s.upper))
                }
                _ => (String::new(), String::new(), "budget_exceeded".to_string()),
            };
            w.write_record([&n, &k, &stat, &s.trial.to_string(), &value, &ratio, &status]).map_err(err)?;
        }
        w.write_record([&n, &k, &stat, "summary", &fmt_real(res.mean), &fmt_real(res.ratio_mean), "summary"])
            .map_err(err)?;
    }
    w.flush().map_err(|e| MonteCarloError::Csv(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_of(results: &[SimResult]) -> String {
        let mut buf = Vec::new();
        write_csv(results, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_sweep_is_header_only() {
        assert_eq!(csv_of(&sweep(&[]).unwrap()), "n,k,stat,trial,value,ratio,status\n");
    }

    #[test]
    fn single_config_rows() {
        let spec: ConfigSpec =
            serde_json::from_str(r#"{"k":3,"n":16,"trials":3,"seed":5,"stat":"trp","r":"001"}"#).unwrap();
        let cfg = spec.into_config(Budget::default()).unwrap();
        let res = sweep(std::slice::from_ref(&cfg)).unwrap();
        assert_eq!(res[0], estimate_stat(&cfg).unwrap());
        let text = csv_of(&res);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        for (i, line) in lines[1..4].iter().enumerate() {
            let s = res[0].samples[i];
            assert_eq!(*line, format!("16,3,trp,{i},{},{:.6},exact", s.lower, s.lower as f64 / 16.0));
        }
        assert_eq!(lines[4], format!("16,3,trp,summary,{:.6},{:.6},summary", res[0].mean, res[0].ratio_mean));
    }

    #[test]
    fn spec_errors() {
        let parse = |s: &str| serde_json::from_str::<ConfigSpec>(s);
        assert!(parse(r#"{"k":3,"n":16,"trials":3,"stat":"v"}"#).is_err(), "seed is required");
        assert!(parse(r#"{"k":3,"n":16,"trials":3,"seed":1,"stat":"v","extra":1}"#).is_err());
        let spec = parse(r#"{"k":3,"n":16,"trials":3,"seed":1,"stat":"v","q":"point"}"#).unwrap();
        assert!(matches!(spec.into_config(Budget::default()), Err(MonteCarloError::MissingRequest(_))));
        let spec = parse(r#"{"k":3,"n":16,"trials":3,"seed":1,"stat":"v","q":"zipf"}"#).unwrap();
        assert!(matches!(spec.into_config(Budget::default()), Err(MonteCarloError::UnknownDistribution(_))));
    }
}
