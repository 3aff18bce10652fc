//! Weighted peer nomination: strategyproof peer selection with reviewer
//! reweighting, plus the assignment, noise and simulation machinery around it.

pub mod assignment;
pub mod error;
pub mod harness;
pub mod mechanism;
pub mod metrics;
pub mod noise;
pub mod theory;
pub mod types;

pub use error::{Error, Result};
pub use mechanism::{nominate, select, weighted_choice, Nominations, SelectionResult, WeightScheme};
pub use types::{AgentId, ApprovalProfile, Assignment, GroundTruth, Params, RankingProfile, WeightVector};
