//! Exact servability and t-parameters.
//!
//! Everything here works on [`Profile`](crate::gf2::Profile)s: a service
//! depends only on how many copies of each vector are stored and requested.
//! Witnesses are type-level; [`lift_witness`] turns one into an index-level
//! [`Service`](crate::batch::Service).
//!
//! Searches are exact. Each call carries a node [`Budget`], and running out
//! of it is reported as [`SolverError::BudgetExceeded`], never as a negative
//! answer.

mod pir;
mod recovery;
mod servable;
mod tparam;

use serde::Serialize;
use thiserror::Error;

use crate::gf2::{Gf2Error, GroupVector};

pub use pir::{residual_after_le2, rp_packing, t_rp, t_rp_le2, RpPacking};
pub use servable::{is_servable, lift_witness, Servability, TypedRecovery};
pub use tparam::{t_param, TParamOutcome, TParamWitness};

pub(crate) use recovery::minimal_sets;

/// Search-node cap for a single solver call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 5_000_000;

    pub fn new(max_nodes: u64) -> Self {
        Self { max_nodes }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_nodes: Self::DEFAULT_NODES }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("search budget of {limit} nodes exceeded")]
    BudgetExceeded { limit: u64 },
    #[error(transparent)]
    Dimension(#[from] Gf2Error),
    #[error("request profile contains the zero vector")]
    ZeroRequest,
    #[error("target request must be nonzero")]
    ZeroTarget,
    #[error("weight cap must be positive")]
    InvalidCap,
}

/// Which requests a t-parameter quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// any multiset of unit vectors (`t_b`)
    Batch,
    /// copies of one unit vector (`t_P`)
    Pir,
    /// any multiset of nonzero vectors (`t_fb`)
    FunctionalBatch,
    /// copies of one nonzero vector (`t_fP`)
    FunctionalPir,
    /// copies of the given vector (`t_rP`)
    RequestPir(GroupVector),
}

impl Regime {
    pub fn short_name(&self) -> &'static str {
        match self {
            Regime::Batch => "b",
            Regime::Pir => "p",
            Regime::FunctionalBatch => "fb",
            Regime::FunctionalPir => "fp",
            Regime::RequestPir(_) => "rp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TParamKind {
    pub regime: Regime,
    /// Recovery sets limited to at most this many columns.
    pub weight_cap: Option<usize>,
}

impl TParamKind {
    pub fn new(regime: Regime) -> Self {
        Self { regime, weight_cap: None }
    }

    pub fn capped(regime: Regime, w: usize) -> Self {
        Self { regime, weight_cap: Some(w) }
    }
}

/// Normalizes a weight cap: `None` if it cannot bind (minimal sets never
/// exceed `k` columns), an error if it is zero.
pub(crate) fn effective_cap(k: u8, cap: Option<usize>) -> Result<Option<usize>, SolverError> {
    match cap {
        Some(0) => Err(SolverError::InvalidCap),
        Some(w) if w < k as usize => Ok(Some(w)),
        _ => Ok(None),
    }
}

/// Counts a node against the budget.
pub(crate) struct NodeMeter {
    used: u64,
    limit: u64,
}

impl NodeMeter {
    pub(crate) fn new(budget: Budget) -> Self {
        Self { used: 0, limit: budget.max_nodes }
    }

    pub(crate) fn tick(&mut self) -> Result<(), SolverError> {
        self.used += 1;
        if self.used > self.limit {
            Err(SolverError::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}
