//! Mutable slots: engineer-designated nodes of a requirement, each paired
//! with the mutation operator allowed on it and the domain of values the
//! operator may draw from.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{ArithOp, BoolOp, NodePath, NodeRef, Prop, Quantifier, RelOp, Sort, Term};

pub type SlotId = u32;

/// The fifteen mutation operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationOp {
    /// `p` becomes `not p`.
    Op1,
    /// Relational operator replacement.
    Op2,
    /// `not p` becomes `p`.
    Op3,
    /// Boolean connective replacement.
    Op4,
    /// Quantifier flip over a time variable.
    Op5,
    /// Quantifier flip over an index variable.
    Op6,
    /// Quantifier flip over a real variable.
    Op7,
    /// Arithmetic operator replacement in a time term.
    Op8,
    /// Arithmetic operator replacement in an index term.
    Op9,
    /// Arithmetic operator replacement in a value term.
    Op10,
    /// New time literal.
    Op11,
    /// New index literal.
    Op12,
    /// New value literal.
    Op13,
    /// New signal under `@i`.
    Op14,
    /// New signal under `@t`.
    Op15,
}

impl MutationOp {
    pub const ALL: [MutationOp; 15] = [
        MutationOp::Op1,
        MutationOp::Op2,
        MutationOp::Op3,
        MutationOp::Op4,
        MutationOp::Op5,
        MutationOp::Op6,
        MutationOp::Op7,
        MutationOp::Op8,
        MutationOp::Op9,
        MutationOp::Op10,
        MutationOp::Op11,
        MutationOp::Op12,
        MutationOp::Op13,
        MutationOp::Op14,
        MutationOp::Op15,
    ];

    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&o| o == self).unwrap() + 1
    }

    pub fn value_kind(self) -> ValueKind {
        match self {
            MutationOp::Op1 | MutationOp::Op3 => ValueKind::Flag,
            MutationOp::Op11 | MutationOp::Op13 => ValueKind::Real,
            MutationOp::Op12 => ValueKind::Integer,
            _ => ValueKind::Symbol,
        }
    }

    /// Symbols an operator may choose from when no explicit set is given.
    /// Signal replacement has no default: the set must be declared.
    pub fn default_symbols(self) -> Option<Vec<String>> {
        fn names<T: fmt::Display>(all: &[T]) -> Option<Vec<String>> {
            Some(all.iter().map(|s| s.to_string()).collect())
        }
        match self {
            MutationOp::Op2 => names(RelOp::ALL),
            MutationOp::Op4 => names(BoolOp::ALL),
            MutationOp::Op5 | MutationOp::Op6 | MutationOp::Op7 => names(Quantifier::ALL),
            MutationOp::Op8 | MutationOp::Op9 | MutationOp::Op10 => names(ArithOp::ALL),
            _ => None,
        }
    }

    fn accepts_symbol(self, s: &str) -> bool {
        match self {
            MutationOp::Op2 => RelOp::from_symbol(s).is_some(),
            MutationOp::Op4 => BoolOp::from_symbol(s).is_some(),
            MutationOp::Op5 | MutationOp::Op6 | MutationOp::Op7 => {
                Quantifier::from_symbol(s).is_some()
            }
            MutationOp::Op8 | MutationOp::Op9 | MutationOp::Op10 => {
                ArithOp::from_symbol(s).is_some()
            }
            MutationOp::Op14 | MutationOp::Op15 => super::lexer::is_identifier(s),
            _ => false,
        }
    }

    /// Whether the operator may be attached to `node`.
    pub fn applies_to(self, node: NodeRef<'_>) -> bool {
        matches!(
            (self, node),
            (MutationOp::Op1, NodeRef::Prop(_))
                | (MutationOp::Op2, NodeRef::Prop(Prop::Rel { .. }))
                | (MutationOp::Op3, NodeRef::Prop(Prop::Not(_)))
                | (MutationOp::Op4, NodeRef::Prop(Prop::Binary { .. }))
                | (MutationOp::Op5, NodeRef::Prop(Prop::QuantTime { .. }))
                | (MutationOp::Op6, NodeRef::Prop(Prop::QuantIndex { .. }))
                | (MutationOp::Op7, NodeRef::Prop(Prop::QuantReal { .. }))
                | (MutationOp::Op8, NodeRef::Term(Term::Arith { sort: Sort::Time, .. }))
                | (MutationOp::Op9, NodeRef::Term(Term::Arith { sort: Sort::Index, .. }))
                | (MutationOp::Op10, NodeRef::Term(Term::Arith { sort: Sort::Value, .. }))
                | (MutationOp::Op11, NodeRef::Term(Term::TimeLit(_)))
                | (MutationOp::Op12, NodeRef::Term(Term::IndexLit(_)))
                | (MutationOp::Op13, NodeRef::Term(Term::ValueLit(_)))
                | (MutationOp::Op14, NodeRef::Term(Term::SignalAtIndex { .. }))
                | (MutationOp::Op15, NodeRef::Term(Term::SignalAtTime { .. }))
        )
    }

    /// Current value of the slot content at `node`. `node` must satisfy
    /// [`MutationOp::applies_to`].
    pub fn read(self, node: NodeRef<'_>) -> SlotValue {
        match (self, node) {
            (MutationOp::Op1, _) => SlotValue::Flag(false),
            (MutationOp::Op3, _) => SlotValue::Flag(true),
            (_, NodeRef::Prop(Prop::Rel { op, .. })) => SlotValue::Sym(op.to_string()),
            (_, NodeRef::Prop(Prop::Binary { op, .. })) => SlotValue::Sym(op.to_string()),
            (
                _,
                NodeRef::Prop(
                    Prop::QuantTime { q, .. } | Prop::QuantIndex { q, .. } | Prop::QuantReal { q, .. },
                ),
            ) => SlotValue::Sym(q.to_string()),
            (_, NodeRef::Term(Term::Arith { op, .. })) => SlotValue::Sym(op.to_string()),
            (_, NodeRef::Term(Term::TimeLit(v) | Term::ValueLit(v))) => SlotValue::Num(*v),
            (_, NodeRef::Term(Term::IndexLit(v))) => SlotValue::Int(*v),
            (
                _,
                NodeRef::Term(
                    Term::SignalAtIndex { signal, .. } | Term::SignalAtTime { signal, .. },
                ),
            ) => SlotValue::Sym(signal.clone()),
            (op, _) => unreachable!("operator {op} read on incompatible node"),
        }
    }
}

impl fmt::Display for MutationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OP{}", self.number())
    }
}

impl FromStr for MutationOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix("OP")
            .or_else(|| s.strip_prefix("op"))
            .ok_or_else(|| format!("unknown mutation operator `{s}`"))?;
        match digits.parse::<usize>() {
            Ok(n) if (1..=15).contains(&n) => Ok(Self::ALL[n - 1]),
            _ => Err(format!("unknown mutation operator `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Flag,
    Real,
    Integer,
    Symbol,
}

/// Values a slot may take.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// Negation toggles carry no range.
    Unit,
    Real { lo: f64, hi: f64 },
    Integer { lo: i64, hi: i64 },
    Symbols(Vec<String>),
}

impl Domain {
    pub fn contains(&self, v: &SlotValue) -> bool {
        match (self, v) {
            (Domain::Unit, SlotValue::Flag(_)) => true,
            (Domain::Real { lo, hi }, SlotValue::Num(x)) => x.is_finite() && lo <= x && x <= hi,
            (Domain::Integer { lo, hi }, SlotValue::Int(x)) => lo <= x && x <= hi,
            (Domain::Symbols(set), SlotValue::Sym(s)) => set.iter().any(|e| e == s),
            _ => false,
        }
    }

    /// Number of distinct values, `None` for continuous ranges.
    pub fn cardinality(&self) -> Option<u128> {
        match self {
            Domain::Unit => Some(2),
            Domain::Real { lo, hi } => (lo == hi).then_some(1),
            Domain::Integer { lo, hi } => Some((*hi as i128 - *lo as i128 + 1) as u128),
            Domain::Symbols(set) => Some(set.len() as u128),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SlotValue {
    Num(f64),
    Int(i64),
    Sym(String),
    Flag(bool),
}

impl SlotValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            SlotValue::Num(_) => ValueKind::Real,
            SlotValue::Int(_) => ValueKind::Integer,
            SlotValue::Sym(_) => ValueKind::Symbol,
            SlotValue::Flag(_) => ValueKind::Flag,
        }
    }

    /// Numeric view used by the learner for ordered attributes.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            SlotValue::Num(x) => Some(*x),
            SlotValue::Int(x) => Some(*x as f64),
            _ => None,
        }
    }

    /// Hashable identity with exact float equality (by bit pattern, with
    /// `-0.0` folded onto `0.0`).
    pub fn key(&self) -> ValueKey {
        match self {
            SlotValue::Num(x) => ValueKey::Num(if *x == 0.0 { 0 } else { x.to_bits() }),
            SlotValue::Int(x) => ValueKey::Int(*x),
            SlotValue::Sym(s) => ValueKey::Sym(s.clone()),
            SlotValue::Flag(b) => ValueKey::Flag(*b),
        }
    }

    /// Parse the textual form produced by `Display`, for a slot whose values
    /// are of `kind`.
    pub fn parse(kind: ValueKind, text: &str) -> Result<SlotValue, String> {
        let text = text.trim();
        match kind {
            ValueKind::Real => text
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(SlotValue::Num)
                .ok_or_else(|| format!("`{text}` is not a finite number")),
            ValueKind::Integer => text
                .parse::<i64>()
                .map(SlotValue::Int)
                .map_err(|_| format!("`{text}` is not an integer")),
            ValueKind::Flag => match text {
                "true" => Ok(SlotValue::Flag(true)),
                "false" => Ok(SlotValue::Flag(false)),
                _ => Err(format!("`{text}` is not a flag")),
            },
            ValueKind::Symbol if !text.is_empty() => Ok(SlotValue::Sym(text.to_string())),
            ValueKind::Symbol => Err("empty symbol".into()),
        }
    }
}

impl fmt::Display for SlotValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotValue::Num(x) => write!(f, "{x}"),
            SlotValue::Int(x) => write!(f, "{x}"),
            SlotValue::Sym(s) => f.write_str(s),
            SlotValue::Flag(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKey {
    Num(u64),
    Int(i64),
    Sym(String),
    Flag(bool),
}

/// A designated mutable node.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRef {
    pub id: SlotId,
    pub path: NodePath,
    pub op: MutationOp,
    pub domain: Domain,
}

impl SlotRef {
    pub fn name(&self) -> String {
        format!("slot_{}", self.id)
    }

    /// Check operator/node and operator/domain compatibility.
    pub fn validate(&self, root: &Prop) -> Result<(), String> {
        let node = super::ast::node_at(root, &self.path)
            .ok_or_else(|| format!("slot {}: no node at path {:?}", self.id, self.path))?;
        if !self.op.applies_to(node) {
            return Err(format!(
                "slot {}: operator {} cannot be applied to a `{}` node",
                self.id,
                self.op,
                node.kind_tag()
            ));
        }
        match (self.op.value_kind(), &self.domain) {
            (ValueKind::Flag, Domain::Unit) => Ok(()),
            (ValueKind::Real, Domain::Real { lo, hi }) => {
                if lo.is_finite() && hi.is_finite() && lo <= hi {
                    Ok(())
                } else {
                    Err(format!("slot {}: invalid range [{lo}, {hi}]", self.id))
                }
            }
            (ValueKind::Integer, Domain::Integer { lo, hi }) => {
                if lo <= hi && *lo >= 0 {
                    Ok(())
                } else {
                    Err(format!("slot {}: invalid index range [{lo}, {hi}]", self.id))
                }
            }
            (ValueKind::Symbol, Domain::Symbols(set)) => {
                if set.is_empty() {
                    return Err(format!("slot {}: empty symbol set", self.id));
                }
                if let Some(bad) = set.iter().find(|s| !self.op.accepts_symbol(s)) {
                    return Err(format!(
                        "slot {}: `{bad}` is not a valid choice for {}",
                        self.id, self.op
                    ));
                }
                for (i, s) in set.iter().enumerate() {
                    if set[..i].contains(s) {
                        return Err(format!("slot {}: duplicate symbol `{s}`", self.id));
                    }
                }
                Ok(())
            }
            (_, d) => Err(format!(
                "slot {}: domain {d:?} does not fit operator {}",
                self.id, self.op
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssignError {
    #[error("value `{value}` outside the domain of slot {slot}")]
    DomainViolation { slot: SlotId, value: String },
    #[error("unknown slot {0}")]
    UnknownSlot(SlotId),
    #[error("assignment covers {found} slots, formula has {expected}")]
    Arity { expected: usize, found: usize },
}

/// Rebuild `root` with slot contents replaced.
///
/// `values[k]` is the new value of `slots[k]`, or `None` to keep the node
/// as is. Returns the new root and, for each slot, the path of its node in the
/// new tree together with the operator that now applies there (a negation
/// inserted by OP1 can afterwards be removed by OP3, and vice versa).
pub(crate) fn rebuild(
    root: &Prop,
    slots: &[SlotRef],
    values: &[Option<&SlotValue>],
) -> (Prop, Vec<(NodePath, MutationOp)>) {
    let mut by_path: HashMap<&[usize], Vec<usize>> = HashMap::new();
    for (k, slot) in slots.iter().enumerate() {
        by_path.entry(slot.path.as_slice()).or_default().push(k);
    }
    let mut ctx = Rebuild {
        slots,
        values,
        by_path,
        old: Vec::new(),
        new: Vec::new(),
        placed: slots.iter().map(|s| (s.path.clone(), s.op)).collect(),
    };
    let out = ctx.prop(root);
    (out, ctx.placed)
}

struct Rebuild<'a> {
    slots: &'a [SlotRef],
    values: &'a [Option<&'a SlotValue>],
    by_path: HashMap<&'a [usize], Vec<usize>>,
    old: Vec<usize>,
    new: Vec<usize>,
    placed: Vec<(NodePath, MutationOp)>,
}

impl Rebuild<'_> {
    fn here(&self) -> Vec<usize> {
        self.by_path.get(self.old.as_slice()).cloned().unwrap_or_default()
    }

    fn value(&self, k: usize) -> Option<&SlotValue> {
        self.values.get(k).copied().flatten()
    }

    fn child_prop(&mut self, old_idx: usize, new_idx: usize, p: &Prop) -> Prop {
        self.old.push(old_idx);
        self.new.push(new_idx);
        let out = self.prop(p);
        self.old.pop();
        self.new.pop();
        out
    }

    fn child_term(&mut self, idx: usize, t: &Term) -> Term {
        self.old.push(idx);
        self.new.push(idx);
        let out = self.term(t);
        self.old.pop();
        self.new.pop();
        out
    }

    fn prop(&mut self, p: &Prop) -> Prop {
        let here = self.here();
        let mut wrap = None;
        let mut unwrap = None;
        let mut content: Vec<usize> = Vec::new();
        for &k in &here {
            match (self.slots[k].op, self.value(k)) {
                (MutationOp::Op1, Some(SlotValue::Flag(true))) => wrap = Some(k),
                (MutationOp::Op3, Some(SlotValue::Flag(false))) => unwrap = Some(k),
                (MutationOp::Op1 | MutationOp::Op3, _) => {}
                _ => content.push(k),
            }
        }
        // A wrapped node moves one level down under the new negation.
        if let Some(k) = wrap {
            self.placed[k] = (self.new.clone(), MutationOp::Op3);
            self.new.push(0);
        }
        let rebuilt = if let (Some(k), Prop::Not(inner)) = (unwrap, p) {
            self.placed[k] = (self.new.clone(), MutationOp::Op1);
            self.old.push(0);
            let out = self.prop(inner);
            self.old.pop();
            out
        } else {
            self.record(&content);
            let mut out = self.prop_children(p);
            for &k in &content {
                if let Some(v) = self.value(k) {
                    set_prop_content(&mut out, v);
                }
            }
            out
        };
        if wrap.is_some() {
            self.new.pop();
            Prop::Not(Box::new(rebuilt))
        } else {
            rebuilt
        }
    }

    fn record(&mut self, ks: &[usize]) {
        for &k in ks {
            self.placed[k].0 = self.new.clone();
        }
    }

    fn prop_children(&mut self, p: &Prop) -> Prop {
        match p {
            Prop::Const(b) => Prop::Const(*b),
            Prop::Rel { op, lhs, rhs } => Prop::Rel {
                op: *op,
                lhs: self.child_term(0, lhs),
                rhs: self.child_term(1, rhs),
            },
            Prop::Not(inner) => Prop::Not(Box::new(self.child_prop(0, 0, inner))),
            Prop::Binary { op, lhs, rhs } => Prop::Binary {
                op: *op,
                lhs: Box::new(self.child_prop(0, 0, lhs)),
                rhs: Box::new(self.child_prop(1, 1, rhs)),
            },
            Prop::QuantTime { q, var, interval, body } => Prop::QuantTime {
                q: *q,
                var: var.clone(),
                interval: self.interval(interval),
                body: Box::new(self.child_prop(2, 2, body)),
            },
            Prop::QuantIndex { q, var, interval, body } => Prop::QuantIndex {
                q: *q,
                var: var.clone(),
                interval: self.interval(interval),
                body: Box::new(self.child_prop(2, 2, body)),
            },
            Prop::QuantReal { q, var, body } => Prop::QuantReal {
                q: *q,
                var: var.clone(),
                body: Box::new(self.child_prop(0, 0, body)),
            },
        }
    }

    fn interval(&mut self, i: &super::ast::Interval) -> super::ast::Interval {
        use super::ast::Bound;
        super::ast::Interval {
            lo: self.child_term(0, &i.lo),
            hi: match &i.hi {
                Bound::Finite(t) => Bound::Finite(self.child_term(1, t)),
                Bound::Infinite => Bound::Infinite,
            },
            lo_closed: i.lo_closed,
            hi_closed: i.hi_closed,
        }
    }

    fn term(&mut self, t: &Term) -> Term {
        let here = self.here();
        self.record(&here);
        let mut out = match t {
            Term::TimeLit(_) | Term::IndexLit(_) | Term::ValueLit(_) | Term::Var { .. } => t.clone(),
            Term::SignalAtTime { signal, at } => Term::SignalAtTime {
                signal: signal.clone(),
                at: Box::new(self.child_term(0, at)),
            },
            Term::SignalAtIndex { signal, at } => Term::SignalAtIndex {
                signal: signal.clone(),
                at: Box::new(self.child_term(0, at)),
            },
            Term::T2I(a) => Term::T2I(Box::new(self.child_term(0, a))),
            Term::I2T(a) => Term::I2T(Box::new(self.child_term(0, a))),
            Term::Arith { op, sort, lhs, rhs } => Term::Arith {
                op: *op,
                sort: *sort,
                lhs: Box::new(self.child_term(0, lhs)),
                rhs: Box::new(self.child_term(1, rhs)),
            },
        };
        for &k in &here {
            if let Some(v) = self.value(k) {
                set_term_content(&mut out, v);
            }
        }
        out
    }
}

fn set_prop_content(p: &mut Prop, v: &SlotValue) {
    let SlotValue::Sym(s) = v else { return };
    match p {
        Prop::Rel { op, .. } => {
            if let Some(new) = RelOp::from_symbol(s) {
                *op = new;
            }
        }
        Prop::Binary { op, .. } => {
            if let Some(new) = BoolOp::from_symbol(s) {
                *op = new;
            }
        }
        Prop::QuantTime { q, .. } | Prop::QuantIndex { q, .. } | Prop::QuantReal { q, .. } => {
            if let Some(new) = Quantifier::from_symbol(s) {
                *q = new;
            }
        }
        _ => {}
    }
}

fn set_term_content(t: &mut Term, v: &SlotValue) {
    match (t, v) {
        (Term::TimeLit(x) | Term::ValueLit(x), SlotValue::Num(new)) => *x = *new,
        (Term::IndexLit(x), SlotValue::Int(new)) => *x = *new,
        (Term::Arith { op, .. }, SlotValue::Sym(s)) => {
            if let Some(new) = ArithOp::from_symbol(s) {
                *op = new;
            }
        }
        (
            Term::SignalAtTime { signal, .. } | Term::SignalAtIndex { signal, .. },
            SlotValue::Sym(s),
        ) => *signal = s.clone(),
        _ => {}
    }
}
