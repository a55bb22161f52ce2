#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tracediag::hls::ast::{ArithOp, BoolOp, Bound, Interval, Quantifier};
use tracediag::hls::{Prop, Sort, Term};
use tracediag::trace::Trace;

pub const SIGNALS: [&str; 2] = ["x", "y"];

/// A trace of 1..=20 samples with small integer values, so equality tests
/// and ties are common.
pub fn random_trace(rng: &mut impl Rng) -> Trace {
    let n = rng.gen_range(1..=20);
    let mut t = *[0.0, 0.5, 2.0].choose(rng).unwrap();
    let mut ts = Vec::with_capacity(n);
    for _ in 0..n {
        ts.push(t);
        t += *[0.5, 1.0, 1.5].choose(rng).unwrap();
    }
    let cols = SIGNALS
        .iter()
        .map(|s| (s.to_string(), (0..n).map(|_| rng.gen_range(-2..=3) as f64).collect()))
        .collect();
    Trace::new(ts, cols).unwrap()
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    times: Vec<String>,
    indices: Vec<String>,
}

impl<R: Rng> Gen<'_, R> {
    fn half(&mut self) -> String {
        format!("{}", self.rng.gen_range(0..=24) as f64 / 2.0)
    }

    fn value(&mut self) -> String {
        let sig = *SIGNALS.choose(self.rng).unwrap();
        let use_time = !self.times.is_empty() && (self.indices.is_empty() || self.rng.gen_bool(0.5));
        if use_time {
            let v = self.times.choose(self.rng).unwrap().clone();
            format!("{sig} @t ({v})")
        } else if !self.indices.is_empty() {
            let v = self.indices.choose(self.rng).unwrap().clone();
            format!("{sig} @i ({v})")
        } else {
            format!("{}", self.rng.gen_range(-2..=3))
        }
    }

    fn rel(&mut self) -> String {
        let op = *["<", ">", "<=", ">=", "=", "!="].choose(self.rng).unwrap();
        let lhs = self.value();
        let rhs = if self.rng.gen_bool(0.5) { self.value() } else { format!("{}", self.rng.gen_range(-2..=3)) };
        format!("{lhs} {op} {rhs}")
    }

    fn time_bound(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 if !self.times.is_empty() => {
                let v = self.times.choose(self.rng).unwrap().clone();
                format!("{v} + {}", self.half())
            }
            1 if !self.indices.is_empty() => {
                let v = self.indices.choose(self.rng).unwrap().clone();
                format!("i2t({v})")
            }
            _ => self.half(),
        }
    }

    fn index_bound(&mut self) -> String {
        match self.rng.gen_range(0..3) {
            0 if !self.times.is_empty() => {
                let v = self.times.choose(self.rng).unwrap().clone();
                format!("t2i({v})")
            }
            _ => format!("{}", self.rng.gen_range(0..=22)),
        }
    }

    fn brackets(&mut self) -> (&'static str, &'static str) {
        (if self.rng.gen_bool(0.5) { "[" } else { "(" }, if self.rng.gen_bool(0.5) { "]" } else { ")" })
    }

    fn prop(&mut self, depth: u32) -> String {
        let choice = if depth == 0 { 0 } else { self.rng.gen_range(0..6) };
        match choice {
            0 => match self.rng.gen_range(0..10) {
                0 => "true".into(),
                1 => "false".into(),
                _ => self.rel(),
            },
            1 => format!("not ({})", self.prop(depth - 1)),
            2 => {
                let op = *["and", "or", "implies"].choose(self.rng).unwrap();
                format!("({}) {op} ({})", self.prop(depth - 1), self.prop(depth - 1))
            }
            3 | 4 => {
                let q = if self.rng.gen_bool(0.5) { "forall" } else { "exists" };
                let var = format!("t{}", self.times.len());
                let lo = self.time_bound();
                let (open, close) = self.brackets();
                let hi = if self.rng.gen_ratio(1, 5) {
                    return self.time_body(q, var, format!("{open}{lo}, inf)"), depth);
                } else {
                    format!("{lo} + {}", self.half())
                };
                self.time_body(q, var, format!("{open}{lo}, {hi}{close}"), depth)
            }
            _ => {
                let q = if self.rng.gen_bool(0.5) { "forall" } else { "exists" };
                let var = format!("s{}", self.indices.len());
                let lo = self.index_bound();
                let hi = format!("{lo} + {}", self.rng.gen_range(0..6));
                let (open, close) = self.brackets();
                self.indices.push(var.clone());
                let body = self.prop(depth - 1);
                self.indices.pop();
                format!("{q} {var} in {open}{lo}, {hi}{close} such that ({body})")
            }
        }
    }

    fn time_body(&mut self, q: &str, var: String, interval: String, depth: u32) -> String {
        self.times.push(var.clone());
        let body = self.prop(depth - 1);
        self.times.pop();
        format!("{q} {var} in {interval} such that ({body})")
    }
}

/// A requirement of nesting depth at most `depth` over the signals `x` and
/// `y`. Signals are read only at bound variables, so evaluation never
/// leaves the trace.
pub fn random_formula(rng: &mut impl Rng, depth: u32) -> String {
    let mut g = Gen { rng, times: Vec::new(), indices: Vec::new() };
    g.prop(depth)
}

pub fn random_pair(seed: u64) -> (String, Trace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.gen_range(1..=4);
    let f = random_formula(&mut rng, depth);
    (f, random_trace(&mut rng))
}

#[derive(Clone, Copy)]
enum V {
    R(f64),
    I(i64),
}

impl V {
    fn r(self) -> f64 {
        match self {
            V::R(x) => x,
            V::I(i) => i as f64,
        }
    }

    fn i(self) -> i64 {
        match self {
            V::I(i) => i,
            V::R(_) => panic!("index expected"),
        }
    }
}

/// Expand every quantifier over an explicit point set and evaluate without
/// short-circuiting.
pub struct Naive<'a> {
    tr: &'a Trace,
    env: Vec<(String, V)>,
}

impl<'a> Naive<'a> {
    pub fn eval(tr: &'a Trace, p: &Prop) -> bool {
        Naive { tr, env: Vec::new() }.prop(p)
    }

    fn hold(&self, sig: &str, t: f64) -> f64 {
        let ts = self.tr.timestamps();
        let mut k = None;
        for (i, &s) in ts.iter().enumerate() {
            if s <= t {
                k = Some(i);
            }
        }
        self.tr.signal(sig).unwrap()[k.expect("time before trace start")]
    }

    fn term(&self, t: &Term) -> V {
        match t {
            Term::TimeLit(x) | Term::ValueLit(x) => V::R(*x),
            Term::IndexLit(i) => V::I(*i),
            Term::Var { name, .. } => self.env.iter().rev().find(|(n, _)| n == name).unwrap().1,
            Term::SignalAtTime { signal, at } => V::R(self.hold(signal, self.term(at).r())),
            Term::SignalAtIndex { signal, at } => {
                V::R(self.tr.signal(signal).unwrap()[self.term(at).i() as usize])
            }
            Term::T2I(at) => {
                let t = self.term(at).r();
                V::I(self.tr.timestamps().iter().filter(|&&s| s <= t).count() as i64 - 1)
            }
            Term::I2T(at) => V::R(self.tr.timestamps()[self.term(at).i() as usize]),
            Term::Arith { op, sort, lhs, rhs } => {
                let (a, b) = (self.term(lhs), self.term(rhs));
                if *sort == Sort::Index {
                    let (a, b) = (a.i(), b.i());
                    V::I(match op {
                        ArithOp::Add => a + b,
                        ArithOp::Sub => a - b,
                        ArithOp::Mul => a * b,
                        ArithOp::Div => a.div_euclid(b),
                    })
                } else {
                    let (a, b) = (a.r(), b.r());
                    V::R(match op {
                        ArithOp::Add => a + b,
                        ArithOp::Sub => a - b,
                        ArithOp::Mul => a * b,
                        ArithOp::Div => a / b,
                    })
                }
            }
        }
    }

    fn inside(i: &Interval, lo: f64, hi: f64, x: f64) -> bool {
        let above = if i.lo_closed { x >= lo } else { x > lo };
        let below = match i.hi {
            Bound::Infinite => true,
            Bound::Finite(_) if i.hi_closed => x <= hi,
            Bound::Finite(_) => x < hi,
        };
        above && below
    }

    /// The lower bound's representative together with every timestamp in the
    /// interval, sorted and deduplicated.
    pub fn time_points(tr: &Trace, i: &Interval, lo: f64, hi: f64) -> Vec<f64> {
        let ts = tr.timestamps();
        let rep = if lo < ts[0] {
            ts[0]
        } else if i.lo_closed {
            lo
        } else {
            let next = ts.iter().copied().find(|&t| t > lo).unwrap_or(lo + 1.0);
            lo + (next.min(hi) - lo) / 2.0
        };
        let mut d: Vec<f64> =
            ts.iter().copied().chain([rep]).filter(|&x| Self::inside(i, lo, hi, x)).collect();
        d.sort_by(f64::total_cmp);
        d.dedup();
        d
    }

    fn bounds(&self, i: &Interval) -> (V, Option<V>) {
        let hi = match &i.hi {
            Bound::Finite(t) => Some(self.term(t)),
            Bound::Infinite => None,
        };
        (self.term(&i.lo), hi)
    }

    fn all(&mut self, q: Quantifier, var: &str, dom: Vec<V>, body: &Prop) -> bool {
        let results: Vec<bool> = dom
            .into_iter()
            .map(|v| {
                self.env.push((var.to_string(), v));
                let r = self.prop(body);
                self.env.pop();
                r
            })
            .collect();
        match q {
            Quantifier::Forall => results.iter().all(|&b| b),
            Quantifier::Exists => results.iter().any(|&b| b),
        }
    }

    fn prop(&mut self, p: &Prop) -> bool {
        match p {
            Prop::Const(b) => *b,
            Prop::Rel { op, lhs, rhs } => op.holds(self.term(lhs).r(), self.term(rhs).r()),
            Prop::Not(q) => !self.prop(q),
            Prop::Binary { op, lhs, rhs } => {
                let (a, b) = (self.prop(lhs), self.prop(rhs));
                match op {
                    BoolOp::And => a && b,
                    BoolOp::Or => a || b,
                    BoolOp::Implies => !a || b,
                }
            }
            Prop::QuantTime { q, var, interval, body } => {
                let (lo, hi) = self.bounds(interval);
                let hi = hi.map_or(f64::INFINITY, V::r);
                let dom = Self::time_points(self.tr, interval, lo.r(), hi).into_iter().map(V::R).collect();
                self.all(*q, var, dom, body)
            }
            Prop::QuantIndex { q, var, interval, body } => {
                let (lo, hi) = self.bounds(interval);
                let n = self.tr.len() as i64;
                let hi = hi.map_or(n - 1, V::i);
                let dom = (lo.i() - 1..=hi + 1)
                    .filter(|&k| (0..n).contains(&k))
                    .filter(|&k| Self::inside(interval, lo.i() as f64, hi as f64, k as f64))
                    .map(V::I)
                    .collect();
                self.all(*q, var, dom, body)
            }
            Prop::QuantReal { .. } => panic!("real quantifiers are out of scope"),
        }
    }
}
