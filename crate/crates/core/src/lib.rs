//! Worst-case adaptive optimization under a budget.
//!
//! Items are selected one at a time; selecting an item reveals its state.
//! A policy is judged by its worst-case utility over all realizations while
//! the cost of everything it selects must stay within the budget. The crate
//! provides the two greedy policies (cost-average and cost-insensitive), the
//! combined half-budget policy, an exact optimal-policy search for small
//! instances, exhaustive property checkers, and a budgeted active-learning
//! simulator built on the version space reduction utility.

pub mod active;
pub mod cost;
pub mod error;
pub mod itemset;
pub mod model;
pub mod policy;
pub mod schema;
pub mod utility;
pub mod verify;

pub use cost::{combine_costs, CostModel, InnerSetFunction, SetFunction};
pub use error::{Error, Result};
pub use itemset::ItemSet;
pub use model::{Instance, PartialRealization, PolicyTree, Realization};
pub use policy::PolicyKind;
pub use utility::{Utility, UtilityModel};
