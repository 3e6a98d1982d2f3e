//! Random search for matrices with `t_fb < t_fP`.
//!
//! `t_fb <= t_fP` always holds. Equality is known for `k <= 2`; for larger
//! `k` this looks for random matrices where it fails.

use rayon::prelude::*;
use serde::Serialize;

use super::{sample_matrix, trial_rng, MonteCarloError};
use crate::gf2::{check_dim, Matrix};
use crate::solver::{t_param, Budget, Regime, SolverError, TParamKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapHit {
    pub trial: usize,
    pub matrix: Vec<crate::gf2::GroupVector>,
    pub t_fp: u64,
    pub t_fb: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub k: u8,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub checked: usize,
    pub budget_exceeded: usize,
    pub hits: Vec<GapHit>,
}

enum Outcome {
    Equal,
    Gap(GapHit),
    GaveUp,
}

fn check(g: &Matrix, trial: usize, budget: Budget) -> Result<Outcome, SolverError> {
    let p = g.profile();
    let run = |regime| t_param(&p, &TParamKind::new(regime), budget).map(|o| o.value);
    let (fp, fb) = match (run(Regime::FunctionalPir), run(Regime::FunctionalBatch)) {
        (Ok(fp), Ok(fb)) => (fp, fb),
        (Err(SolverError::BudgetExceeded { .. }), _) | (_, Err(SolverError::BudgetExceeded { .. })) => {
            return Ok(Outcome::GaveUp)
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(if fp == fb {
        Outcome::Equal
    } else {
        Outcome::Gap(GapHit { trial, matrix: g.columns().to_vec(), t_fp: fp, t_fb: fb })
    })
}

/// Samples `trials` uniform `k x n` matrices and reports every one where
/// the functional batch and functional PIR parameters differ.
pub fn fb_gap_search(
    k: u8,
    n: usize,
    trials: usize,
    seed: u64,
    budget: Budget,
) -> Result<GapReport, MonteCarloError> {
    check_dim(k as u32)?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = sample_matrix(k, n, &mut trial_rng(seed, t))?;
            Ok(check(&g, t, budget)?)
        })
        .collect::<Result<Vec<_>, MonteCarloError>>()?;
    let mut report = GapReport { k, n, trials, seed, checked: 0, budget_exceeded: 0, hits: Vec::new() };
    for o in outcomes {
        match o {
            Outcome::Equal => report.checked += 1,
            Outcome::Gap(hit) => {
                report.checked += 1;
                report.hits.push(hit);
            }
            Outcome::GaveUp => report.budget_exceeded += 1,
        }
    }
    Ok(report)
}
