//! From checked mutants to a diagnosis: balanced filtering, decision-tree
//! learning, export, and tree agreement.

pub mod agreement;
pub mod dataset;
pub mod export;
pub mod tree;

pub use agreement::{agreement, Confusion};
pub use dataset::{filter, Class, Dataset, FilterError, Schema};
pub use tree::{learn, DecisionTree, LearnParams, Node};
