//! Abstract syntax of requirements.
//!
//! Formulas (`Prop`) and terms (`Term`) are separate enums. Every node can be
//! addressed by a [`NodePath`]: a sequence of child positions from the root.
//! Child numbering is fixed per node kind:
//!
//! | node                     | children                          |
//! |--------------------------|-----------------------------------|
//! | `Rel`                    | 0 = lhs, 1 = rhs                  |
//! | `Not`                    | 0 = operand                       |
//! | `Binary`                 | 0 = lhs, 1 = rhs                  |
//! | `QuantTime`/`QuantIndex` | 0 = lower bound, 1 = upper bound, 2 = body |
//! | `QuantReal`              | 0 = body                          |
//! | `SignalAt*`, `T2I`, `I2T`| 0 = argument                      |
//! | `Arith`                  | 0 = lhs, 1 = rhs                  |
//!
//! An infinite upper bound has no node, so child 1 of such a quantifier does
//! not resolve.

use std::fmt;

use serde::{Deserialize, Serialize};

pub type NodePath = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sort {
    Time,
    Index,
    Value,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Time => "time",
            Sort::Index => "index",
            Sort::Value => "value",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Implies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Gt,
    Lt,
    Le,
    Ge,
    Eq,
    Ne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

macro_rules! symbol_table {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn symbol(self) -> &'static str {
                match self {
                    $($ty::$variant => $text),+
                }
            }

            pub fn from_symbol(s: &str) -> Option<Self> {
                match s {
                    $($text => Some($ty::$variant),)+
                    _ => None,
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.symbol())
            }
        }
    };
}

symbol_table!(Quantifier { Forall => "forall", Exists => "exists" });
symbol_table!(BoolOp { And => "and", Or => "or", Implies => "implies" });
symbol_table!(RelOp { Gt => ">", Lt => "<", Le => "<=", Ge => ">=", Eq => "=", Ne => "!=" });
symbol_table!(ArithOp { Add => "+", Sub => "-", Mul => "*", Div => "/" });

impl RelOp {
    pub fn holds<T: PartialOrd>(self, lhs: T, rhs: T) -> bool {
        match self {
            RelOp::Gt => lhs > rhs,
            RelOp::Lt => lhs < rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Ge => lhs >= rhs,
            RelOp::Eq => lhs == rhs,
            RelOp::Ne => lhs != rhs,
        }
    }
}

impl BoolOp {
    pub fn apply(self, lhs: bool, rhs: bool) -> bool {
        match self {
            BoolOp::And => lhs && rhs,
            BoolOp::Or => lhs || rhs,
            BoolOp::Implies => !lhs || rhs,
        }
    }
}

/// Upper bound of a quantification interval.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Finite(Term),
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: Term,
    pub hi: Bound,
    pub lo_closed: bool,
    /// Always `false` when `hi` is infinite.
    pub hi_closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prop {
    /// `true` / `false`.
    Const(bool),
    Rel {
        op: RelOp,
        lhs: Term,
        rhs: Term,
    },
    Not(Box<Prop>),
    Binary {
        op: BoolOp,
        lhs: Box<Prop>,
        rhs: Box<Prop>,
    },
    QuantTime {
        q: Quantifier,
        var: String,
        interval: Interval,
        body: Box<Prop>,
    },
    QuantIndex {
        q: Quantifier,
        var: String,
        interval: Interval,
        body: Box<Prop>,
    },
    QuantReal {
        q: Quantifier,
        var: String,
        body: Box<Prop>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    TimeLit(f64),
    IndexLit(i64),
    ValueLit(f64),
    Var {
        name: String,
        sort: Sort,
    },
    SignalAtTime {
        signal: String,
        at: Box<Term>,
    },
    SignalAtIndex {
        signal: String,
        at: Box<Term>,
    },
    T2I(Box<Term>),
    I2T(Box<Term>),
    Arith {
        op: ArithOp,
        sort: Sort,
        lhs: Box<Term>,
        rhs: Box<Term>,
    },
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::TimeLit(_) | Term::I2T(_) => Sort::Time,
            Term::IndexLit(_) | Term::T2I(_) => Sort::Index,
            Term::ValueLit(_) | Term::SignalAtTime { .. } | Term::SignalAtIndex { .. } => {
                Sort::Value
            }
            Term::Var { sort, .. } | Term::Arith { sort, .. } => *sort,
        }
    }
}

/// Borrowed view of any node in a formula.
#[derive(Debug, Clone, Copy)]
pub enum NodeRef<'a> {
    Prop(&'a Prop),
    Term(&'a Term),
}

impl<'a> NodeRef<'a> {
    /// Children with their child positions.
    pub fn children(self) -> Vec<(usize, NodeRef<'a>)> {
        match self {
            NodeRef::Prop(p) => match p {
                Prop::Const(_) => vec![],
                Prop::Rel { lhs, rhs, .. } => vec![(0, NodeRef::Term(lhs)), (1, NodeRef::Term(rhs))],
                Prop::Not(inner) => vec![(0, NodeRef::Prop(inner))],
                Prop::Binary { lhs, rhs, .. } => {
                    vec![(0, NodeRef::Prop(lhs)), (1, NodeRef::Prop(rhs))]
                }
                Prop::QuantTime { interval, body, .. } | Prop::QuantIndex { interval, body, .. } => {
                    let mut out = vec![(0, NodeRef::Term(&interval.lo))];
                    if let Bound::Finite(hi) = &interval.hi {
                        out.push((1, NodeRef::Term(hi)));
                    }
                    out.push((2, NodeRef::Prop(body)));
                    out
                }
                Prop::QuantReal { body, .. } => vec![(0, NodeRef::Prop(body))],
            },
            NodeRef::Term(t) => match t {
                Term::TimeLit(_) | Term::IndexLit(_) | Term::ValueLit(_) | Term::Var { .. } => {
                    vec![]
                }
                Term::SignalAtTime { at, .. } | Term::SignalAtIndex { at, .. } => {
                    vec![(0, NodeRef::Term(at))]
                }
                Term::T2I(arg) | Term::I2T(arg) => vec![(0, NodeRef::Term(arg))],
                Term::Arith { lhs, rhs, .. } => {
                    vec![(0, NodeRef::Term(lhs)), (1, NodeRef::Term(rhs))]
                }
            },
        }
    }

    pub fn child(self, idx: usize) -> Option<NodeRef<'a>> {
        self.children().into_iter().find(|(i, _)| *i == idx).map(|(_, n)| n)
    }

    /// Node kind tag, ignoring contents (operators, literals, names).
    pub fn kind_tag(self) -> &'static str {
        match self {
            NodeRef::Prop(p) => match p {
                Prop::Const(_) => "C",
                Prop::Rel { .. } => "R",
                Prop::Not(_) => "N",
                Prop::Binary { .. } => "B",
                Prop::QuantTime { .. } => "QT",
                Prop::QuantIndex { .. } => "QI",
                Prop::QuantReal { .. } => "QR",
            },
            NodeRef::Term(t) => match t {
                Term::TimeLit(_) => "t",
                Term::IndexLit(_) => "j",
                Term::ValueLit(_) => "x",
                Term::Var { .. } => "v",
                Term::SignalAtTime { .. } => "@t",
                Term::SignalAtIndex { .. } => "@i",
                Term::T2I(_) => "t2i",
                Term::I2T(_) => "i2t",
                Term::Arith { .. } => "A",
            },
        }
    }

    /// Text of the token that introduces this node in source order, used to
    /// locate slots by token occurrence.
    pub fn anchor(self) -> Anchor<'a> {
        match self {
            NodeRef::Prop(p) => match p {
                Prop::Const(true) => Anchor::Word("true"),
                Prop::Const(false) => Anchor::Word("false"),
                Prop::Rel { op, .. } => Anchor::Word(op.symbol()),
                Prop::Not(_) => Anchor::Word("not"),
                Prop::Binary { op, .. } => Anchor::Word(op.symbol()),
                Prop::QuantTime { q, .. }
                | Prop::QuantIndex { q, .. }
                | Prop::QuantReal { q, .. } => Anchor::Word(q.symbol()),
            },
            NodeRef::Term(t) => match t {
                Term::TimeLit(v) | Term::ValueLit(v) => Anchor::Number(*v),
                Term::IndexLit(v) => Anchor::Number(*v as f64),
                Term::Var { name, .. } => Anchor::Name(name),
                Term::SignalAtTime { signal, .. } | Term::SignalAtIndex { signal, .. } => {
                    Anchor::Name(signal)
                }
                Term::T2I(_) => Anchor::Word("t2i"),
                Term::I2T(_) => Anchor::Word("i2t"),
                Term::Arith { op, .. } => Anchor::Word(op.symbol()),
            },
        }
    }

    /// Whether the anchor token sits between the first and second child
    /// (infix) rather than before all children.
    fn is_infix(self) -> bool {
        matches!(
            self,
            NodeRef::Prop(Prop::Rel { .. })
                | NodeRef::Prop(Prop::Binary { .. })
                | NodeRef::Term(Term::Arith { .. })
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anchor<'a> {
    Word(&'static str),
    Name(&'a str),
    Number(f64),
}

/// Visit every node in the order its anchor token appears in rendered text.
pub fn visit_in_order<'a>(root: &'a Prop, mut f: impl FnMut(&[usize], NodeRef<'a>)) {
    fn go<'a>(node: NodeRef<'a>, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], NodeRef<'a>)) {
        let children = node.children();
        if node.is_infix() {
            let mut it = children.into_iter();
            if let Some((i, c)) = it.next() {
                path.push(i);
                go(c, path, f);
                path.pop();
            }
            f(path, node);
            for (i, c) in it {
                path.push(i);
                go(c, path, f);
                path.pop();
            }
        } else {
            f(path, node);
            for (i, c) in children {
                path.push(i);
                go(c, path, f);
                path.pop();
            }
        }
    }
    go(NodeRef::Prop(root), &mut Vec::new(), &mut f);
}

pub fn node_at<'a>(root: &'a Prop, path: &[usize]) -> Option<NodeRef<'a>> {
    path.iter()
        .try_fold(NodeRef::Prop(root), |node, &idx| node.child(idx))
}

/// Shape of the tree with all node contents erased.
pub fn skeleton(root: &Prop) -> String {
    fn go(node: NodeRef<'_>, out: &mut String) {
        out.push_str(node.kind_tag());
        let children = node.children();
        if !children.is_empty() {
            out.push('(');
            for (k, (i, c)) in children.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&i.to_string());
                out.push(':');
                go(c, out);
            }
            out.push(')');
        }
    }
    let mut out = String::new();
    go(NodeRef::Prop(root), &mut out);
    out
}

/// Names of all signals referenced anywhere in the formula.
pub fn signals(root: &Prop) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    visit_in_order(root, |_, node| {
        if let NodeRef::Term(Term::SignalAtTime { signal, .. } | Term::SignalAtIndex { signal, .. }) =
            node
        {
            if !out.iter().any(|s| s == signal) {
                out.push(signal.clone());
            }
        }
    });
    out
}

pub fn contains_real_quantifier(root: &Prop) -> bool {
    let mut found = false;
    visit_in_order(root, |_, node| {
        if let NodeRef::Prop(Prop::QuantReal { .. }) = node {
            found = true;
        }
    });
    found
}
