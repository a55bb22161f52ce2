//! Requirements in the Hybrid Logic of Signals: syntax tree, parser,
//! canonical rendering, and mutable-slot annotations.
//!
//! A requirement document holds the formula text, optionally followed by a
//! line `---` and slot declarations:
//!
//! ```text
//! forall t0 in [0, 20] such that v @t (t0) <= 120
//! ---
//! slot 0 at 120 op OP13 range [100, 140]
//! ```
//!
//! See `docs/requirement-syntax.md` for the full grammar.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod render;
pub mod slot;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

pub use ast::{NodePath, NodeRef, Prop, Sort, Term};
pub use slot::{AssignError, Domain, MutationOp, SlotId, SlotRef, SlotValue, ValueKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("sort error at byte {pos}: expected a {expected} term, found a {found} term")]
    Sort { pos: usize, expected: Sort, found: Sort },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{0}` is bound more than once")]
    Rebound(String),
    #[error("bad slot: {0}")]
    BadSlot(String),
}

impl ParseError {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax { pos, msg: msg.into() }
    }
}

/// Slot values in slot order; one entry per slot of the formula it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment(pub Vec<SlotValue>);

impl Assignment {
    pub fn values(&self) -> &[SlotValue] {
        &self.0
    }

    pub fn key(&self) -> Vec<slot::ValueKey> {
        self.0.iter().map(SlotValue::key).collect()
    }
}

/// A requirement together with its mutable slots.
///
/// Slots are kept in document order. A `Formula` is immutable; [`Formula::assign`]
/// returns a new one.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    root: Prop,
    slots: Vec<SlotRef>,
}

impl Formula {
    /// Build a formula from a root and slot declarations, validating every
    /// slot against the node it points to.
    pub fn new(root: Prop, mut slots: Vec<SlotRef>) -> Result<Self, ParseError> {
        let mut ids = HashSet::new();
        let mut sites = HashSet::new();
        for s in &slots {
            s.validate(&root).map_err(ParseError::BadSlot)?;
            if !ids.insert(s.id) {
                return Err(ParseError::BadSlot(format!("duplicate slot id {}", s.id)));
            }
            let negation = matches!(s.op, MutationOp::Op1 | MutationOp::Op3);
            let site = (s.path.clone(), if negation { None } else { Some(s.op) });
            if !sites.insert(site) {
                return Err(ParseError::BadSlot(format!(
                    "slot {} targets a node that already carries a slot of the same kind",
                    s.id
                )));
            }
        }
        let order = document_order(&root);
        slots.sort_by_key(|s| order.iter().position(|p| *p == s.path).unwrap_or(usize::MAX));
        Ok(Formula { root, slots })
    }

    /// Parse a requirement document (formula text plus optional sidecar).
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        parser::parse_document(src)
    }

    pub fn root(&self) -> &Prop {
        &self.root
    }

    pub fn slots(&self) -> &[SlotRef] {
        &self.slots
    }

    pub fn slot(&self, id: SlotId) -> Option<&SlotRef> {
        self.slots.iter().find(|s| s.id == id)
    }

    /// Current slot contents, in slot order.
    pub fn values(&self) -> Assignment {
        Assignment(
            self.slots
                .iter()
                .map(|s| {
                    let node = ast::node_at(&self.root, &s.path).expect("validated slot path");
                    s.op.read(node)
                })
                .collect(),
        )
    }

    /// Replace the contents of the addressed slots. Unaddressed slots keep
    /// their values.
    pub fn assign(&self, values: &BTreeMap<SlotId, SlotValue>) -> Result<Formula, AssignError> {
        let mut per_slot = vec![None; self.slots.len()];
        for (id, v) in values {
            let k = self
                .slots
                .iter()
                .position(|s| s.id == *id)
                .ok_or(AssignError::UnknownSlot(*id))?;
            self.check_value(k, v)?;
            per_slot[k] = Some(v);
        }
        let (root, placed) = slot::rebuild(&self.root, &self.slots, &per_slot);
        let slots = self
            .slots
            .iter()
            .zip(placed)
            .map(|(s, (path, op))| SlotRef { id: s.id, path, op, domain: s.domain.clone() })
            .collect();
        Ok(Formula { root, slots })
    }

    /// Root of the formula with every slot set from `a` (slot order).
    pub fn instantiate(&self, a: &Assignment) -> Result<Prop, AssignError> {
        if a.0.len() != self.slots.len() {
            return Err(AssignError::Arity { expected: self.slots.len(), found: a.0.len() });
        }
        let current = self.values();
        let mut per_slot = Vec::with_capacity(a.0.len());
        for (k, v) in a.0.iter().enumerate() {
            if *v == current.0[k] {
                per_slot.push(None);
            } else {
                self.check_value(k, v)?;
                per_slot.push(Some(v));
            }
        }
        Ok(slot::rebuild(&self.root, &self.slots, &per_slot).0)
    }

    fn check_value(&self, k: usize, v: &SlotValue) -> Result<(), AssignError> {
        let s = &self.slots[k];
        if s.op.value_kind() == v.kind() && s.domain.contains(v) {
            Ok(())
        } else {
            Err(AssignError::DomainViolation { slot: s.id, value: v.to_string() })
        }
    }

    /// Requirement text without the sidecar.
    pub fn text(&self) -> String {
        render::prop_to_string(&self.root)
    }

    /// Number of distinct assignments, if every slot domain is finite.
    pub fn assignment_space(&self) -> Option<u128> {
        self.slots
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.domain.cardinality()?))
    }
}

/// Full document: requirement text, then `---` and slot declarations.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())?;
        if self.slots.is_empty() {
            return Ok(());
        }
        f.write_str("\n---\n")?;
        for s in &self.slots {
            write!(f, "slot {} at {} op {}", s.id, parser::locator_for(&self.root, &s.path), s.op)?;
            match &s.domain {
                Domain::Unit => {}
                Domain::Real { lo, hi } => write!(f, " range [{lo}, {hi}]")?,
                Domain::Integer { lo, hi } => write!(f, " range [{lo}, {hi}]")?,
                Domain::Symbols(set) => write!(f, " set {{{}}}", set.join(", "))?,
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

fn document_order(root: &Prop) -> Vec<NodePath> {
    let mut out = Vec::new();
    ast::visit_in_order(root, |p, _| out.push(p.to_vec()));
    out
}
