//! Canonical text form of formulas.

use std::fmt::Write;

use super::ast::{ArithOp, BoolOp, Bound, Interval, Prop, Term};

fn bool_prec(op: BoolOp) -> u8 {
    match op {
        BoolOp::Implies => 1,
        BoolOp::Or => 2,
        BoolOp::And => 3,
    }
}

fn arith_prec(op: ArithOp) -> u8 {
    match op {
        ArithOp::Add | ArithOp::Sub => 1,
        ArithOp::Mul | ArithOp::Div => 2,
    }
}

fn is_quant(p: &Prop) -> bool {
    matches!(p, Prop::QuantTime { .. } | Prop::QuantIndex { .. } | Prop::QuantReal { .. })
}

pub fn prop_to_string(p: &Prop) -> String {
    let mut out = String::new();
    prop(p, &mut out);
    out
}

pub fn term_to_string(t: &Term) -> String {
    let mut out = String::new();
    term(t, &mut out);
    out
}

fn paren_prop(p: &Prop, wrap: bool, out: &mut String) {
    if wrap {
        out.push('(');
        prop(p, out);
        out.push(')');
    } else {
        prop(p, out);
    }
}

fn prop(p: &Prop, out: &mut String) {
    match p {
        Prop::Const(b) => out.push_str(if *b { "true" } else { "false" }),
        Prop::Rel { op, lhs, rhs } => {
            term(lhs, out);
            let _ = write!(out, " {op} ");
            term(rhs, out);
        }
        Prop::Not(inner) => {
            out.push_str("not ");
            let wrap = matches!(**inner, Prop::Binary { .. }) || is_quant(inner);
            paren_prop(inner, wrap, out);
        }
        Prop::Binary { op, lhs, rhs } => {
            let prec = bool_prec(*op);
            let wrap_lhs = match &**lhs {
                Prop::Binary { op: l, .. } => {
                    bool_prec(*l) < prec || (bool_prec(*l) == prec && *op == BoolOp::Implies)
                }
                other => is_quant(other),
            };
            let wrap_rhs = match &**rhs {
                Prop::Binary { op: r, .. } => {
                    bool_prec(*r) < prec || (bool_prec(*r) == prec && *op != BoolOp::Implies)
                }
                other => is_quant(other),
            };
            paren_prop(lhs, wrap_lhs, out);
            let _ = write!(out, " {op} ");
            paren_prop(rhs, wrap_rhs, out);
        }
        Prop::QuantTime { q, var, interval: i, body } | Prop::QuantIndex { q, var, interval: i, body } => {
            let _ = write!(out, "{q} {var} in ");
            interval(i, out);
            out.push_str(" such that ");
            prop(body, out);
        }
        Prop::QuantReal { q, var, body } => {
            let _ = write!(out, "{q} {var} such that ");
            prop(body, out);
        }
    }
}

fn interval(i: &Interval, out: &mut String) {
    out.push(if i.lo_closed { '[' } else { '(' });
    term(&i.lo, out);
    out.push_str(", ");
    match &i.hi {
        Bound::Finite(t) => {
            term(t, out);
            out.push(if i.hi_closed { ']' } else { ')' });
        }
        Bound::Infinite => out.push_str("inf)"),
    }
}

fn term(t: &Term, out: &mut String) {
    match t {
        Term::TimeLit(x) | Term::ValueLit(x) => {
            let _ = write!(out, "{x}");
        }
        Term::IndexLit(j) => {
            let _ = write!(out, "{j}");
        }
        Term::Var { name, .. } => out.push_str(name),
        Term::SignalAtTime { signal, at } => {
            let _ = write!(out, "{signal} @t (");
            term(at, out);
            out.push(')');
        }
        Term::SignalAtIndex { signal, at } => {
            let _ = write!(out, "{signal} @i (");
            term(at, out);
            out.push(')');
        }
        Term::T2I(a) => {
            out.push_str("t2i(");
            term(a, out);
            out.push(')');
        }
        Term::I2T(a) => {
            out.push_str("i2t(");
            term(a, out);
            out.push(')');
        }
        Term::Arith { op, lhs, rhs, .. } => {
            let prec = arith_prec(*op);
            let wrap_lhs = matches!(&**lhs, Term::Arith { op: l, .. } if arith_prec(*l) < prec);
            let wrap_rhs = matches!(&**rhs, Term::Arith { op: r, .. } if arith_prec(*r) <= prec);
            paren_term(lhs, wrap_lhs, out);
            let _ = write!(out, " {op} ");
            paren_term(rhs, wrap_rhs, out);
        }
    }
}

fn paren_term(t: &Term, wrap: bool, out: &mut String) {
    if wrap {
        out.push('(');
        term(t, out);
        out.push(')');
    } else {
        term(t, out);
    }
}
