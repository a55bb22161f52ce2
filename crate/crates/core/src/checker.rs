//! Direct evaluation of requirements over finite traces.
//!
//! Quantifiers over time range over a finite set of instants: the lower
//! bound of the interval (clamped to the trace start) plus every timestamp
//! inside the interval. Under last-sample hold this is exact for bodies that
//! only read signals at the bound variable. An open lower bound is
//! represented by the midpoint between it and the next instant of interest.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::hls::ast::{self, BoolOp, Bound, Interval, Quantifier};
use crate::hls::{Prop, Sort, Term};
use crate::trace::{Trace, TraceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    Timeout,
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Satisfied,
    Violated,
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    }

    pub fn is_known(self) -> bool {
        !matches!(self, Verdict::Unknown(_))
    }

    /// Stable lowercase spelling used in files.
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Unknown(UnknownReason::Timeout) => "unknown:timeout",
            Verdict::Unknown(UnknownReason::Unsupported) => "unknown:unsupported",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Self> {
        Some(match s {
            "satisfied" => Verdict::Satisfied,
            "violated" => Verdict::Violated,
            "unknown:timeout" => Verdict::Unknown(UnknownReason::Timeout),
            "unknown:unsupported" => Verdict::Unknown(UnknownReason::Unsupported),
            _ => return None,
        })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "Satisfied",
            Verdict::Violated => "Violated",
            Verdict::Unknown(UnknownReason::Timeout) => "Unknown (timeout)",
            Verdict::Unknown(UnknownReason::Unsupported) => "Unknown (unsupported)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("time {0} is before the start of the trace")]
    BeforeTraceStart(f64),
    #[error("index {0} is outside the trace")]
    IndexOutOfRange(i64),
    #[error("division by zero")]
    DivZero,
    #[error("non-finite quantifier bound")]
    NonFiniteBound,
    #[error("unbound variable `{0}`")]
    Unbound(String),
}

impl From<TraceError> for EvalError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::UnknownSignal(s) => EvalError::UnknownSignal(s),
            TraceError::BeforeTraceStart(t) => EvalError::BeforeTraceStart(t),
            TraceError::IndexOutOfRange(i) => EvalError::IndexOutOfRange(i),
            other => unreachable!("trace query returned {other}"),
        }
    }
}

enum Stop {
    Timeout,
    Unsupported,
    Error(EvalError),
}

impl From<EvalError> for Stop {
    fn from(e: EvalError) -> Self {
        Stop::Error(e)
    }
}

#[derive(Debug, Clone, Copy)]
enum Val {
    Real(f64),
    Index(i64),
}

struct Eval<'a> {
    trace: &'a Trace,
    env: Vec<(&'a str, Val)>,
    deadline: Option<Instant>,
    ticks: u32,
}

const TICKS_PER_CLOCK_READ: u32 = 1024;

/// Check `f` against `tr` within `budget` (`None` for no limit).
///
/// Signals are resolved before evaluation starts, so a missing signal is an
/// error even when the offending sub-formula would never be reached.
pub fn check(f: &Prop, tr: &Trace, budget: Option<Duration>) -> Result<Verdict, EvalError> {
    for s in ast::signals(f) {
        if !tr.has_signal(&s) {
            return Err(EvalError::UnknownSignal(s));
        }
    }
    let mut ev = Eval {
        trace: tr,
        env: Vec::new(),
        deadline: budget.and_then(|b| Instant::now().checked_add(b)),
        ticks: 0,
    };
    if budget == Some(Duration::ZERO) {
        return Ok(Verdict::Unknown(UnknownReason::Timeout));
    }
    match ev.prop(f) {
        Ok(b) => Ok(Verdict::from_bool(b)),
        Err(Stop::Timeout) => Ok(Verdict::Unknown(UnknownReason::Timeout)),
        Err(Stop::Unsupported) => Ok(Verdict::Unknown(UnknownReason::Unsupported)),
        Err(Stop::Error(e)) => Err(e),
    }
}

/// Like [`check`], but evaluation errors become `Unknown(Unsupported)`.
pub fn check_lenient(f: &Prop, tr: &Trace, budget: Option<Duration>) -> Verdict {
    check(f, tr, budget).unwrap_or(Verdict::Unknown(UnknownReason::Unsupported))
}

/// Check every formula, in parallel on the current rayon pool. Results are
/// in input order and equal to sequential [`check`] calls.
pub fn check_batch(
    fs: &[Prop],
    tr: &Trace,
    budget: Option<Duration>,
) -> Vec<Result<Verdict, EvalError>> {
    fs.par_iter().map(|f| check(f, tr, budget)).collect()
}

impl<'a> Eval<'a> {
    fn tick(&mut self) -> Result<(), Stop> {
        self.ticks += 1;
        if self.ticks >= TICKS_PER_CLOCK_READ {
            self.ticks = 0;
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(Stop::Timeout);
            }
        }
        Ok(())
    }

    fn prop(&mut self, p: &'a Prop) -> Result<bool, Stop> {
        self.tick()?;
        match p {
            Prop::Const(b) => Ok(*b),
            Prop::Rel { op, lhs, rhs } => {
                let (a, b) = (self.term(lhs)?, self.term(rhs)?);
                Ok(match (a, b) {
                    (Val::Index(x), Val::Index(y)) => op.holds(x, y),
                    (x, y) => op.holds(real(x), real(y)),
                })
            }
            Prop::Not(inner) => Ok(!self.prop(inner)?),
            Prop::Binary { op, lhs, rhs } => {
                // Left to right with short-circuit, so `s0 > 0 implies x @i (s0 - 1) ...`
                // style guards protect the right operand.
                let a = self.prop(lhs)?;
                match (op, a) {
                    (BoolOp::And, false) => Ok(false),
                    (BoolOp::Or, true) => Ok(true),
                    (BoolOp::Implies, false) => Ok(true),
                    _ => Ok(op.apply(a, self.prop(rhs)?)),
                }
            }
            Prop::QuantTime { q, var, interval, body } => {
                let points = self.time_domain(interval)?;
                self.quantify(*q, var, points.into_iter().map(Val::Real), body)
            }
            Prop::QuantIndex { q, var, interval, body } => {
                let (lo, hi) = self.index_domain(interval)?;
                self.quantify(*q, var, (lo..=hi).map(Val::Index), body)
            }
            Prop::QuantReal { .. } => Err(Stop::Unsupported),
        }
    }

    fn quantify(
        &mut self,
        q: Quantifier,
        var: &'a str,
        domain: impl Iterator<Item = Val>,
        body: &'a Prop,
    ) -> Result<bool, Stop> {
        let want = q == Quantifier::Exists;
        for v in domain {
            self.env.push((var, v));
            let r = self.prop(body);
            self.env.pop();
            if r? == want {
                return Ok(want);
            }
        }
        Ok(!want)
    }

    fn time_domain(&mut self, i: &'a Interval) -> Result<Vec<f64>, Stop> {
        let lo = self.real_term(&i.lo)?;
        let hi = match &i.hi {
            Bound::Finite(t) => self.real_term(t)?,
            Bound::Infinite => f64::INFINITY,
        };
        if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY {
            return Err(EvalError::NonFiniteBound.into());
        }
        let ts = self.trace.timestamps();
        let below_hi = |t: f64| t < hi || (i.hi_closed && t == hi && hi.is_finite());
        let start = lo.max(ts[0]);
        // First timestamp strictly after `start`.
        let next = ts.partition_point(|&t| t <= start);
        let first = if start > lo || i.lo_closed {
            start
        } else {
            let upper = ts.get(next).copied().unwrap_or(start + 1.0).min(hi);
            start + (upper - start) / 2.0
        };
        let mut out = Vec::new();
        if (first > lo || (i.lo_closed && first == lo)) && below_hi(first) {
            out.push(first);
        }
        out.extend(ts[next..].iter().copied().filter(|&t| t > first).take_while(|&t| below_hi(t)));
        Ok(out)
    }

    fn index_domain(&mut self, i: &'a Interval) -> Result<(i64, i64), Stop> {
        let last = self.trace.len() as i64 - 1;
        let mut lo = self.index_term(&i.lo)?;
        let mut hi = match &i.hi {
            Bound::Finite(t) => self.index_term(t)?,
            Bound::Infinite => last,
        };
        if !i.lo_closed {
            lo = lo.saturating_add(1);
        }
        if !i.hi_closed && matches!(i.hi, Bound::Finite(_)) {
            hi = hi.saturating_sub(1);
        }
        Ok((lo.max(0), hi.min(last)))
    }

    fn real_term(&mut self, t: &'a Term) -> Result<f64, Stop> {
        self.term(t).map(real)
    }

    fn index_term(&mut self, t: &'a Term) -> Result<i64, Stop> {
        match self.term(t)? {
            Val::Index(i) => Ok(i),
            Val::Real(_) => unreachable!("sort-checked index term"),
        }
    }

    fn term(&mut self, t: &'a Term) -> Result<Val, Stop> {
        match t {
            Term::TimeLit(x) | Term::ValueLit(x) => Ok(Val::Real(*x)),
            Term::IndexLit(i) => Ok(Val::Index(*i)),
            Term::Var { name, .. } => self
                .env
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| EvalError::Unbound(name.clone()).into()),
            Term::SignalAtTime { signal, at } => {
                let when = self.real_term(at)?;
                Ok(Val::Real(self.trace.at_time(signal, when).map_err(EvalError::from)?))
            }
            Term::SignalAtIndex { signal, at } => {
                let k = self.index_term(at)?;
                Ok(Val::Real(self.trace.at_index(signal, k).map_err(EvalError::from)?))
            }
            Term::T2I(at) => {
                let when = self.real_term(at)?;
                Ok(Val::Index(self.trace.t2i(when).map_err(EvalError::from)? as i64))
            }
            Term::I2T(at) => {
                let k = self.index_term(at)?;
                Ok(Val::Real(self.trace.i2t(k).map_err(EvalError::from)?))
            }
            Term::Arith { op, sort, lhs, rhs } => {
                let (a, b) = (self.term(lhs)?, self.term(rhs)?);
                if *sort == Sort::Index {
                    let (Val::Index(x), Val::Index(y)) = (a, b) else {
                        unreachable!("sort-checked index arithmetic")
                    };
                    Ok(Val::Index(index_arith(*op, x, y)?))
                } else {
                    let (x, y) = (real(a), real(b));
                    use crate::hls::ast::ArithOp::*;
                    Ok(Val::Real(match op {
                        Add => x + y,
                        Sub => x - y,
                        Mul => x * y,
                        Div if y == 0.0 => return Err(EvalError::DivZero.into()),
                        Div => x / y,
                    }))
                }
            }
        }
    }
}

fn real(v: Val) -> f64 {
    match v {
        Val::Real(x) => x,
        Val::Index(i) => i as f64,
    }
}

fn index_arith(op: ast::ArithOp, x: i64, y: i64) -> Result<i64, EvalError> {
    use crate::hls::ast::ArithOp::*;
    Ok(match op {
        Add => x.saturating_add(y),
        Sub => x.saturating_sub(y),
        Mul => x.saturating_mul(y),
        Div if y == 0 => return Err(EvalError::DivZero),
        Div => x.div_euclid(y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hls::Formula;

    const FRAGMENT: &str = "\
timestamp,v_pos_x,d_pos_x,d2obs
0,-0.15,-0.15,6.05
1.0,-0.16,-0.16,7.05
5.0,5.66,7.86,0.007
11.0,11.87,14.56,2.23
12.5,17.49,19.09,8.44
15.0,19.31,19.31,8.15
";

    fn fragment() -> Trace {
        Trace::from_reader(FRAGMENT.as_bytes()).unwrap()
    }

    fn verdict(src: &str, tr: &Trace) -> Verdict {
        check(Formula::parse(src).unwrap().root(), tr, None).unwrap()
    }

    #[test]
    fn running_example_is_violated() {
        let tr = fragment();
        let phi = "forall t0 in [0, inf) such that d_pos_x @t (t0) - v_pos_x @t (t0) < 0.2 and d2obs @t (t0) > 0.5";
        assert_eq!(verdict(phi, &tr), Verdict::Violated);
        // Only the gap clause, restricted to the 0.007 record.
        assert_eq!(verdict("forall t0 in [5, 5] such that d2obs @t (t0) > 0.5", &tr), Verdict::Violated);
        assert_eq!(verdict("forall t0 in [0, 5) such that d2obs @t (t0) > 0.5", &tr), Verdict::Satisfied);
    }

    #[test]
    fn vacuous_quantifiers() {
        let tr = fragment();
        assert_eq!(verdict("forall t0 in [5, 4] such that false", &tr), Verdict::Satisfied);
        assert_eq!(verdict("exists t0 in [5, 4] such that true", &tr), Verdict::Violated);
        assert_eq!(verdict("forall s0 in [9, 20] such that false", &tr), Verdict::Satisfied);
        assert_eq!(verdict("forall t0 in (5, 5] such that false", &tr), Verdict::Satisfied);
    }

    #[test]
    fn ramp_threshold() {
        let tr = crate::trace::synth("ramp peak=120.0226 duration=20 dt=0.01", 1).unwrap();
        let at = |c: &str| verdict(&format!("forall t0 in [0,20] such that speed @t (t0) <= {c}"), &tr);
        assert_eq!(at("120"), Verdict::Violated);
        assert_eq!(at("120.0226"), Verdict::Satisfied);
        assert_eq!(at("120.02259999"), Verdict::Violated);
    }

    #[test]
    fn index_quantifiers_and_conversions() {
        let tr = fragment();
        assert_eq!(verdict("forall s0 in [0, inf) such that i2t(s0) <= 15", &tr), Verdict::Satisfied);
        assert_eq!(verdict("exists s0 in [0, 5] such that v_pos_x @i (s0) = 11.87", &tr), Verdict::Satisfied);
        assert_eq!(verdict("forall s0 in [1, 5] such that i2t(s0) > i2t(s0 - 1)", &tr), Verdict::Satisfied);
        assert_eq!(verdict("t2i(6) = 2", &tr), Verdict::Satisfied);
        assert_eq!(verdict("t2i(6) / 4 = 0", &tr), Verdict::Satisfied);
        assert_eq!(verdict("exists t0 in (1, 5) such that d2obs @t (t0) = 7.05", &tr), Verdict::Satisfied);
    }

    #[test]
    fn at51_style_window() {
        let tr = Trace::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            vec![("gear".into(), vec![0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0])],
        )
        .unwrap();
        let req = |hold: &str| {
            format!(
                "forall s0 in [t2i(0)+1, t2i(6)] such that ((gear @i (s0 - 1) != 1) and (gear @i (s0) = 1)) \
                 implies (forall t0 in [i2t(s0), i2t(s0)+{hold}] such that (gear @t (t0) = 1))"
            )
        };
        assert_eq!(verdict(&req("2.5"), &tr), Verdict::Satisfied);
        assert_eq!(verdict(&req("3"), &tr), Verdict::Violated);
    }

    #[test]
    fn errors_and_unknowns() {
        let tr = fragment();
        let run = |src: &str| check(Formula::parse(src).unwrap().root(), &tr, None);
        assert_eq!(run("speed @t (0) > 1"), Err(EvalError::UnknownSignal("speed".into())));
        assert_eq!(run("d2obs @t (0 - 1) > 1"), Err(EvalError::BeforeTraceStart(-1.0)));
        assert_eq!(run("d2obs @t (0) / 0 > 1"), Err(EvalError::DivZero));
        assert_eq!(run("d2obs @i (6) > 1"), Err(EvalError::IndexOutOfRange(6)));
        assert_eq!(run("forall s0 in [0, 5] such that s0 > 0 implies d2obs @i (s0 - 1) > 0"), Ok(Verdict::Satisfied));
        assert_eq!(run("exists r0 such that d2obs @t (0) > r0"), Ok(Verdict::Unknown(UnknownReason::Unsupported)));
        let f = Formula::parse("true").unwrap();
        assert_eq!(
            check(f.root(), &tr, Some(Duration::ZERO)),
            Ok(Verdict::Unknown(UnknownReason::Timeout))
        );
    }

    #[test]
    fn slow_formula_times_out() {
        let n = 400;
        let tr = Trace::new((0..n).map(f64::from).collect(), vec![("x".into(), vec![0.0; n as usize])]).unwrap();
        let f = Formula::parse(
            "forall t0 in [0, inf) such that forall t1 in [0, inf) such that forall t2 in [0, inf) such that x @t (t0) + x @t (t1) <= x @t (t2)",
        )
        .unwrap();
        let v = check(f.root(), &tr, Some(Duration::from_millis(20))).unwrap();
        assert_eq!(v, Verdict::Unknown(UnknownReason::Timeout));
    }

    #[test]
    fn batch_preserves_order() {
        let tr = fragment();
        let phi = Formula::parse("forall t0 in [0, inf) such that d2obs @t (t0) > 0.5").unwrap();
        let phi2 = Formula::parse("forall t0 in [0, inf) such that d2obs @t (t0) > 0.005").unwrap();
        let real = Formula::parse("exists r0 such that true").unwrap();
        let fs = vec![phi.root().clone(), real.root().clone(), phi2.root().clone()];
        let out = check_batch(&fs, &tr, None);
        assert_eq!(
            out,
            vec![Ok(Verdict::Violated), Ok(Verdict::Unknown(UnknownReason::Unsupported)), Ok(Verdict::Satisfied)]
        );
        assert!(check_batch(&[], &tr, None).is_empty());
    }

    #[test]
    fn verdict_spelling_roundtrips() {
        for v in [
            Verdict::Satisfied,
            Verdict::Violated,
            Verdict::Unknown(UnknownReason::Timeout),
            Verdict::Unknown(UnknownReason::Unsupported),
        ] {
            assert_eq!(Verdict::from_str_opt(v.as_str()), Some(v));
        }
    }
}
