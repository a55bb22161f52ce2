//! Agreement between two trees over a grid of slot assignments.
//!
//! Each numeric attribute contributes `grid_points` evenly spaced values
//! spanning its declared range (endpoints included); each categorical
//! attribute contributes all of its symbols. A point is positive for a tree
//! when the tree classifies it as satisfied. Tree `a` plays the tool, `b`
//! the reference.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::dataset::{AttrKind, Class, Schema, Value};
use super::tree::DecisionTree;

pub const DEFAULT_GRID_POINTS: usize = 101;
pub const DEFAULT_GRID_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgreementError {
    #[error("the trees are not over the same slot schema")]
    SchemaMismatch,
    #[error("grid has {points} points, more than the limit of {limit}")]
    GridTooLarge { points: u128, limit: u64 },
    #[error("grid needs at least one point per numeric slot")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// `None` when `a` has no positive point.
    pub fn precision(&self) -> Option<f64> {
        let d = self.tp + self.fp;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }

    /// `None` when `b` has no positive point.
    pub fn recall(&self) -> Option<f64> {
        let d = self.tp + self.fn_;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }

    fn add(self, o: Confusion) -> Confusion {
        Confusion { tp: self.tp + o.tp, tn: self.tn + o.tn, fp: self.fp + o.fp, fn_: self.fn_ + o.fn_ }
    }
}

/// The values one attribute takes on the grid.
pub fn axis(kind: &AttrKind, grid_points: usize) -> Vec<Value> {
    match kind {
        AttrKind::Numeric { lo, hi } => {
            if grid_points == 1 {
                return vec![Value::Num(*lo)];
            }
            let steps = (grid_points - 1) as f64;
            (0..grid_points).map(|k| Value::Num(lo + (hi - lo) * k as f64 / steps)).collect()
        }
        AttrKind::Categorical { symbols } => (0..symbols.len()).map(Value::Cat).collect(),
    }
}

/// Number of grid points, saturating at `u128::MAX`.
pub fn grid_size(schema: &Schema, grid_points: usize) -> u128 {
    schema
        .attributes
        .iter()
        .map(|a| match &a.kind {
            AttrKind::Numeric { .. } => grid_points as u128,
            AttrKind::Categorical { symbols } => symbols.len() as u128,
        })
        .fold(1u128, |acc, n| acc.saturating_mul(n))
}

pub fn agreement(
    a: &DecisionTree,
    b: &DecisionTree,
    schema: &Schema,
    grid_points: usize,
    limit: u64,
) -> Result<Confusion, AgreementError> {
    if a.schema != *schema || b.schema != *schema {
        return Err(AgreementError::SchemaMismatch);
    }
    if grid_points == 0 {
        return Err(AgreementError::EmptyGrid);
    }
    let points = grid_size(schema, grid_points);
    if points > u128::from(limit) {
        return Err(AgreementError::GridTooLarge { points, limit });
    }
    let axes: Vec<Vec<Value>> = schema.attributes.iter().map(|at| axis(&at.kind, grid_points)).collect();
    let total = points as u64;
    let counts = (0..total)
        .into_par_iter()
        .fold(
            || (Confusion::default(), vec![Value::Cat(0); axes.len()]),
            |(mut c, mut buf), mut idx| {
                for (slot, ax) in buf.iter_mut().zip(&axes).rev() {
                    let n = ax.len() as u64;
                    *slot = ax[(idx % n) as usize];
                    idx /= n;
                }
                let pa = a.classify(&buf) == Class::Satisfied;
                let pb = b.classify(&buf) == Class::Satisfied;
                match (pa, pb) {
                    (true, true) => c.tp += 1,
                    (false, false) => c.tn += 1,
                    (true, false) => c.fp += 1,
                    (false, true) => c.fn_ += 1,
                }
                (c, buf)
            },
        )
        .map(|(c, _)| c)
        .reduce(Confusion::default, Confusion::add);
    Ok(counts)
}
