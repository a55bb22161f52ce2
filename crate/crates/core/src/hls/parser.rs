//! Recursive-descent parser for requirement text and the slot sidecar.
//!
//! Parsing runs in two passes: the token stream is first turned into an
//! untyped syntax tree, which is then elaborated against the binder scope so
//! that literals receive the sort their context demands.

use super::ast::{
    ArithOp, BoolOp, Bound, Interval, NodePath, NodeRef, Prop, Quantifier, RelOp, Sort, Term,
};
use super::lexer::{tokenize, Tok, Token, KEYWORDS};
use super::slot::{Domain, MutationOp, SlotId, SlotRef, ValueKind};
use super::{Formula, ParseError};

/// Maximum nesting depth accepted by the parser.
const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone)]
enum RawProp {
    Const(bool),
    Rel { op: RelOp, lhs: RawTerm, rhs: RawTerm },
    Not(Box<RawProp>),
    Binary { op: BoolOp, lhs: Box<RawProp>, rhs: Box<RawProp> },
    Quant {
        q: Quantifier,
        var: String,
        pos: usize,
        interval: Option<RawInterval>,
        body: Box<RawProp>,
    },
}

#[derive(Debug, Clone)]
struct RawInterval {
    lo: RawTerm,
    hi: Option<RawTerm>,
    lo_closed: bool,
    hi_closed: bool,
}

#[derive(Debug, Clone)]
enum RawTerm {
    Num { value: f64, pos: usize },
    Ident { name: String, pos: usize },
    At { signal: String, by_index: bool, arg: Box<RawTerm>, pos: usize },
    T2I(Box<RawTerm>, usize),
    I2T(Box<RawTerm>, usize),
    Arith { op: ArithOp, lhs: Box<RawTerm>, rhs: Box<RawTerm>, pos: usize },
}

impl RawTerm {
    fn pos(&self) -> usize {
        match self {
            RawTerm::Num { pos, .. }
            | RawTerm::Ident { pos, .. }
            | RawTerm::At { pos, .. }
            | RawTerm::T2I(_, pos)
            | RawTerm::I2T(_, pos)
            | RawTerm::Arith { pos, .. } => *pos,
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(x) => format!("`{x}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::AtTime => "`@t`".into(),
            Tok::AtIndex => "`@i`".into(),
            Tok::Eof => "end of input".into(),
        };
        ParseError::syntax(self.pos(), format!("expected {wanted}, found {found}"))
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseError::syntax(self.pos(), "nesting too deep"))
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn formula(&mut self) -> Result<RawProp, ParseError> {
        self.enter()?;
        let out = self.implication();
        self.leave();
        out
    }

    fn implication(&mut self) -> Result<RawProp, ParseError> {
        let lhs = self.disjunction()?;
        if self.is_word("implies") {
            self.bump();
            let rhs = self.formula()?;
            return Ok(RawProp::Binary { op: BoolOp::Implies, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<RawProp, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.is_word("or") {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = RawProp::Binary { op: BoolOp::Or, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<RawProp, ParseError> {
        let mut lhs = self.unary()?;
        while self.is_word("and") {
            self.bump();
            let rhs = self.unary()?;
            lhs = RawProp::Binary { op: BoolOp::And, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RawProp, ParseError> {
        self.enter()?;
        let out = if self.is_word("not") {
            self.bump();
            self.unary().map(|p| RawProp::Not(Box::new(p)))
        } else if self.is_word("forall") || self.is_word("exists") {
            self.quantified()
        } else {
            self.atom()
        };
        self.leave();
        out
    }

    fn quantified(&mut self) -> Result<RawProp, ParseError> {
        let q = if self.is_word("forall") { Quantifier::Forall } else { Quantifier::Exists };
        self.bump();
        let pos = self.pos();
        let var = match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                name
            }
            _ => return Err(self.unexpected("a variable name")),
        };
        let interval = if self.is_word("in") {
            self.bump();
            Some(self.interval()?)
        } else {
            None
        };
        self.expect_word("such")?;
        self.expect_word("that")?;
        let body = self.formula()?;
        Ok(RawProp::Quant { q, var, pos, interval, body: Box::new(body) })
    }

    fn interval(&mut self) -> Result<RawInterval, ParseError> {
        let lo_closed = if self.is_sym("[") {
            true
        } else if self.is_sym("(") {
            false
        } else {
            return Err(self.unexpected("`[` or `(`"));
        };
        self.bump();
        let lo = self.term()?;
        self.expect_sym(",")?;
        let hi = if self.is_word("inf") {
            self.bump();
            None
        } else {
            Some(self.term()?)
        };
        let hi_closed = if self.is_sym("]") {
            true
        } else if self.is_sym(")") {
            false
        } else {
            return Err(self.unexpected("`]` or `)`"));
        };
        self.bump();
        Ok(RawInterval { lo, hi_closed: hi_closed && hi.is_some(), hi, lo_closed })
    }

    /// At a `(`, decide whether it opens a parenthesized formula or the
    /// left-hand term of a relation by looking past the matching closer.
    /// Interval delimiters may mix `[`/`(` with `]`/`)`, so all four count.
    fn paren_is_formula(&self) -> bool {
        let mut depth = 0usize;
        let mut k = self.i;
        while k < self.toks.len() {
            match &self.toks[k].tok {
                Tok::Sym("(") | Tok::Sym("[") => depth += 1,
                Tok::Sym(")") | Tok::Sym("]") => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        let next = &self.toks[(k + 1).min(self.toks.len() - 1)].tok;
                        return !matches!(
                            next,
                            Tok::Sym("<" | ">" | "<=" | ">=" | "=" | "!=" | "+" | "-" | "*" | "/")
                        );
                    }
                }
                Tok::Eof => return true,
                _ => {}
            }
            k += 1;
        }
        true
    }

    fn atom(&mut self) -> Result<RawProp, ParseError> {
        if self.is_word("true") || self.is_word("false") {
            let b = self.is_word("true");
            self.bump();
            return Ok(RawProp::Const(b));
        }
        if self.is_sym("(") && self.paren_is_formula() {
            self.bump();
            let inner = self.formula()?;
            self.expect_sym(")")?;
            return Ok(inner);
        }
        let lhs = self.term()?;
        let op = match self.peek() {
            Tok::Sym(s) => RelOp::from_symbol(s),
            _ => None,
        }
        .ok_or_else(|| self.unexpected("a relational operator"))?;
        self.bump();
        let rhs = self.term()?;
        Ok(RawProp::Rel { op, lhs, rhs })
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        self.enter()?;
        let out = self.additive();
        self.leave();
        out
    }

    fn additive(&mut self) -> Result<RawTerm, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.is_sym("+") {
                ArithOp::Add
            } else if self.is_sym("-") {
                ArithOp::Sub
            } else {
                return Ok(lhs);
            };
            let pos = self.bump().pos;
            let rhs = self.multiplicative()?;
            lhs = RawTerm::Arith { op, lhs: Box::new(lhs), rhs: Box::new(rhs), pos };
        }
    }

    fn multiplicative(&mut self) -> Result<RawTerm, ParseError> {
        let mut lhs = self.primary()?;
        loop {
            let op = if self.is_sym("*") {
                ArithOp::Mul
            } else if self.is_sym("/") {
                ArithOp::Div
            } else {
                return Ok(lhs);
            };
            let pos = self.bump().pos;
            let rhs = self.primary()?;
            lhs = RawTerm::Arith { op, lhs: Box::new(lhs), rhs: Box::new(rhs), pos };
        }
    }

    fn parenthesized_term(&mut self) -> Result<RawTerm, ParseError> {
        self.expect_sym("(")?;
        let t = self.term()?;
        self.expect_sym(")")?;
        Ok(t)
    }

    fn primary(&mut self) -> Result<RawTerm, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number(value) => {
                self.bump();
                Ok(RawTerm::Num { value, pos })
            }
            Tok::Sym("-") if matches!(self.peek_at(1), Tok::Number(_)) => {
                self.bump();
                let Tok::Number(value) = self.bump().tok else { unreachable!() };
                Ok(RawTerm::Num { value: -value, pos })
            }
            Tok::Sym("(") => self.parenthesized_term(),
            Tok::Ident(w) if w == "t2i" || w == "i2t" => {
                self.bump();
                let arg = Box::new(self.parenthesized_term()?);
                Ok(if w == "t2i" { RawTerm::T2I(arg, pos) } else { RawTerm::I2T(arg, pos) })
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                let by_index = match self.peek() {
                    Tok::AtTime => false,
                    Tok::AtIndex => true,
                    _ => return Ok(RawTerm::Ident { name, pos }),
                };
                self.bump();
                let arg = self.parenthesized_term()?;
                Ok(RawTerm::At { signal: name, by_index, arg: Box::new(arg), pos })
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

/// Sort of a quantified variable, from the first letter of its name:
/// `t`/`τ` for timestamps, `s`/`σ` for indices, `r`/`ρ` for reals.
pub fn binder_sort(name: &str) -> Option<Sort> {
    match name.chars().next()? {
        't' | 'τ' => Some(Sort::Time),
        's' | 'σ' => Some(Sort::Index),
        'r' | 'ρ' => Some(Sort::Value),
        _ => None,
    }
}

struct Elaborator {
    scope: Vec<(String, Sort)>,
}

impl Elaborator {
    fn lookup(&self, name: &str) -> Option<Sort> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    fn prop(&mut self, raw: &RawProp) -> Result<Prop, ParseError> {
        Ok(match raw {
            RawProp::Const(b) => Prop::Const(*b),
            RawProp::Not(p) => Prop::Not(Box::new(self.prop(p)?)),
            RawProp::Binary { op, lhs, rhs } => Prop::Binary {
                op: *op,
                lhs: Box::new(self.prop(lhs)?),
                rhs: Box::new(self.prop(rhs)?),
            },
            RawProp::Rel { op, lhs, rhs } => {
                let sort = self
                    .infer(lhs)
                    .or_else(|| self.infer(rhs))
                    .unwrap_or(Sort::Value);
                Prop::Rel { op: *op, lhs: self.term(lhs, sort)?, rhs: self.term(rhs, sort)? }
            }
            RawProp::Quant { q, var, pos, interval, body } => {
                if self.lookup(var).is_some() {
                    return Err(ParseError::Rebound(var.clone()));
                }
                let sort = binder_sort(var).ok_or_else(|| {
                    ParseError::syntax(
                        *pos,
                        format!("variable `{var}` must start with t (time), s (index) or r (real)"),
                    )
                })?;
                let interval = match (sort, interval) {
                    (Sort::Value, None) => None,
                    (Sort::Value, Some(_)) => {
                        return Err(ParseError::syntax(
                            *pos,
                            format!("real variable `{var}` takes no interval"),
                        ))
                    }
                    (_, None) => {
                        return Err(ParseError::syntax(
                            *pos,
                            format!("variable `{var}` needs an `in` interval"),
                        ))
                    }
                    (s, Some(i)) => Some(self.interval(i, s)?),
                };
                self.scope.push((var.clone(), sort));
                let body = self.prop(body);
                self.scope.pop();
                let body = Box::new(body?);
                let var = var.clone();
                match (sort, interval) {
                    (Sort::Time, Some(interval)) => Prop::QuantTime { q: *q, var, interval, body },
                    (Sort::Index, Some(interval)) => Prop::QuantIndex { q: *q, var, interval, body },
                    _ => Prop::QuantReal { q: *q, var, body },
                }
            }
        })
    }

    fn interval(&mut self, raw: &RawInterval, sort: Sort) -> Result<Interval, ParseError> {
        Ok(Interval {
            lo: self.term(&raw.lo, sort)?,
            hi: match &raw.hi {
                Some(t) => Bound::Finite(self.term(t, sort)?),
                None => Bound::Infinite,
            },
            lo_closed: raw.lo_closed,
            hi_closed: raw.hi_closed,
        })
    }

    fn infer(&self, raw: &RawTerm) -> Option<Sort> {
        match raw {
            RawTerm::Num { .. } => None,
            RawTerm::Ident { name, .. } => self.lookup(name),
            RawTerm::At { .. } => Some(Sort::Value),
            RawTerm::T2I(..) => Some(Sort::Index),
            RawTerm::I2T(..) => Some(Sort::Time),
            RawTerm::Arith { lhs, rhs, .. } => self.infer(lhs).or_else(|| self.infer(rhs)),
        }
    }

    fn mismatch(raw: &RawTerm, expected: Sort, found: Sort) -> ParseError {
        ParseError::Sort { pos: raw.pos(), expected, found }
    }

    fn term(&self, raw: &RawTerm, expected: Sort) -> Result<Term, ParseError> {
        Ok(match raw {
            RawTerm::Num { value, pos } => match expected {
                Sort::Time => Term::TimeLit(*value),
                Sort::Value => Term::ValueLit(*value),
                Sort::Index => {
                    if value.fract() != 0.0 || *value < 0.0 || *value > (1u64 << 53) as f64 {
                        return Err(ParseError::syntax(
                            *pos,
                            format!("index literal must be a natural number, found {value}"),
                        ));
                    }
                    Term::IndexLit(*value as i64)
                }
            },
            RawTerm::Ident { name, .. } => {
                let sort = self.lookup(name).ok_or_else(|| ParseError::UnboundVariable(name.clone()))?;
                if sort != expected {
                    return Err(Self::mismatch(raw, expected, sort));
                }
                Term::Var { name: name.clone(), sort }
            }
            RawTerm::At { signal, by_index, arg, .. } => {
                if expected != Sort::Value {
                    return Err(Self::mismatch(raw, expected, Sort::Value));
                }
                if *by_index {
                    Term::SignalAtIndex { signal: signal.clone(), at: Box::new(self.term(arg, Sort::Index)?) }
                } else {
                    Term::SignalAtTime { signal: signal.clone(), at: Box::new(self.term(arg, Sort::Time)?) }
                }
            }
            RawTerm::T2I(arg, _) => {
                if expected != Sort::Index {
                    return Err(Self::mismatch(raw, expected, Sort::Index));
                }
                Term::T2I(Box::new(self.term(arg, Sort::Time)?))
            }
            RawTerm::I2T(arg, _) => {
                if expected != Sort::Time {
                    return Err(Self::mismatch(raw, expected, Sort::Time));
                }
                Term::I2T(Box::new(self.term(arg, Sort::Index)?))
            }
            RawTerm::Arith { op, lhs, rhs, .. } => Term::Arith {
                op: *op,
                sort: expected,
                lhs: Box::new(self.term(lhs, expected)?),
                rhs: Box::new(self.term(rhs, expected)?),
            },
        })
    }
}

/// Parse requirement text (without sidecar) into a sort-checked formula root.
pub fn parse_prop(src: &str) -> Result<Prop, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, i: 0, depth: 0 };
    let raw = p.formula()?;
    if !matches!(p.peek(), Tok::Eof) {
        return Err(p.unexpected("end of input"));
    }
    Elaborator { scope: Vec::new() }.prop(&raw)
}

/// Split a requirement document into the requirement text and the slot
/// sidecar (everything after a line consisting of `---`).
pub fn split_document(src: &str) -> (&str, &str) {
    let mut offset = 0;
    for line in src.split_inclusive('\n') {
        if line.trim() == "---" {
            return (&src[..offset], &src[offset + line.len()..]);
        }
        offset += line.len();
    }
    (src, "")
}

/// Parse a full requirement document: requirement text, optionally followed
/// by `---` and one `slot` declaration per line.
pub fn parse_document(src: &str) -> Result<Formula, ParseError> {
    let (text, sidecar) = split_document(src);
    let root = parse_prop(text)?;
    let mut slots = Vec::new();
    for line in sidecar.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        slots.push(parse_slot(line, &root)?);
    }
    Formula::new(root, slots)
}

/// Resolve a slot locator: either `/i/j/...` (child positions from the root,
/// `/` alone for the root) or `<token>[#k]`, the k-th (0-based) node whose
/// introducing token is `<token>`.
pub fn resolve_locator(root: &Prop, loc: &str) -> Result<NodePath, String> {
    if let Some(rest) = loc.strip_prefix('/') {
        let path: NodePath = rest
            .split('/')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| format!("bad path component `{s}` in `{loc}`")))
            .collect::<Result<_, _>>()?;
        return super::ast::node_at(root, &path)
            .map(|_| path)
            .ok_or_else(|| format!("no node at path `{loc}`"));
    }
    let (text, nth) = match loc.rsplit_once('#') {
        Some((t, k)) => (t, k.parse::<usize>().map_err(|_| format!("bad occurrence `{k}` in `{loc}`"))?),
        None => (loc, 0),
    };
    let text = match text {
        "≤" => "<=",
        "≥" => ">=",
        "≠" => "!=",
        other => other,
    };
    let number = text.parse::<f64>().ok().filter(|x| x.is_finite());
    let mut seen = 0usize;
    let mut found = None;
    super::ast::visit_in_order(root, |path, node| {
        if found.is_some() {
            return;
        }
        let hit = match node.anchor() {
            super::ast::Anchor::Word(w) => w == text,
            super::ast::Anchor::Name(n) => n == text,
            super::ast::Anchor::Number(x) => number == Some(x),
        };
        if hit {
            if seen == nth {
                found = Some(path.to_vec());
            }
            seen += 1;
        }
    });
    found.ok_or_else(|| format!("token `{text}` occurrence #{nth} not found"))
}

/// Locator that [`resolve_locator`] maps back to `path`.
pub fn locator_for(root: &Prop, path: &[usize]) -> String {
    let target = super::ast::node_at(root, path).map(NodeRef::anchor);
    let mut nth = 0usize;
    let mut done = false;
    super::ast::visit_in_order(root, |p, node| {
        if done {
            return;
        }
        if p == path {
            done = true;
        } else if Some(node.anchor()) == target {
            nth += 1;
        }
    });
    let text = match target {
        Some(super::ast::Anchor::Word(w)) => w.to_string(),
        Some(super::ast::Anchor::Name(n)) => n.to_string(),
        Some(super::ast::Anchor::Number(x)) => format!("{x}"),
        None => return "/".into(),
    };
    // Locating by anchor is ambiguous when a variable shares its name with a
    // signal at an earlier position; fall back to the explicit path.
    let loc = format!("{text}#{nth}");
    match resolve_locator(root, &loc) {
        Ok(p) if p == path => loc,
        _ => {
            let mut s = String::new();
            for i in path {
                s.push('/');
                s.push_str(&i.to_string());
            }
            if s.is_empty() {
                s.push('/');
            }
            s
        }
    }
}

fn parse_slot(line: &str, root: &Prop) -> Result<SlotRef, ParseError> {
    let bad = |msg: String| ParseError::BadSlot(format!("{msg} (in `{line}`)"));
    let mut words = line.splitn(7, char::is_whitespace).filter(|s| !s.is_empty());
    let mut next = |what: &str| words.next().ok_or_else(|| bad(format!("missing {what}")));
    if next("`slot`")? != "slot" {
        return Err(bad("expected `slot`".into()));
    }
    let id: SlotId = next("slot id")?
        .parse()
        .map_err(|_| bad("slot id must be a small non-negative integer".into()))?;
    if next("`at`")? != "at" {
        return Err(bad("expected `at`".into()));
    }
    let loc = next("locator")?;
    if next("`op`")? != "op" {
        return Err(bad("expected `op`".into()));
    }
    let op: MutationOp = next("operator")?.parse().map_err(bad)?;
    let rest: String = words.collect::<Vec<_>>().join(" ");
    let path = resolve_locator(root, loc).map_err(bad)?;
    let domain = parse_domain(op, rest.trim()).map_err(bad)?;
    let slot = SlotRef { id, path, op, domain };
    slot.validate(root).map_err(bad)?;
    Ok(slot)
}

fn parse_domain(op: MutationOp, spec: &str) -> Result<Domain, String> {
    let kind = op.value_kind();
    if spec.is_empty() {
        return match kind {
            ValueKind::Flag => Ok(Domain::Unit),
            ValueKind::Symbol => op
                .default_symbols()
                .map(Domain::Symbols)
                .ok_or_else(|| format!("{op} needs an explicit `set {{...}}`")),
            _ => Err(format!("{op} needs a `range [lo, hi]`")),
        };
    }
    if let Some(r) = spec.strip_prefix("range") {
        let inner = r
            .trim()
            .trim_start_matches(['[', '<'])
            .trim_end_matches([']', '>'])
            .trim();
        let (lo, hi) = inner.split_once(',').ok_or_else(|| format!("bad range `{r}`"))?;
        return match kind {
            ValueKind::Real => {
                let lo: f64 = lo.trim().parse().map_err(|_| format!("bad range bound `{lo}`"))?;
                let hi: f64 = hi.trim().parse().map_err(|_| format!("bad range bound `{hi}`"))?;
                Ok(Domain::Real { lo, hi })
            }
            ValueKind::Integer => {
                let lo: i64 = lo.trim().parse().map_err(|_| format!("bad index bound `{lo}`"))?;
                let hi: i64 = hi.trim().parse().map_err(|_| format!("bad index bound `{hi}`"))?;
                Ok(Domain::Integer { lo, hi })
            }
            _ => Err(format!("{op} does not take a range")),
        };
    }
    if let Some(s) = spec.strip_prefix("set") {
        if kind != ValueKind::Symbol {
            return Err(format!("{op} does not take a symbol set"));
        }
        let inner = s.trim();
        let inner = inner
            .strip_prefix('{')
            .and_then(|x| x.strip_suffix('}'))
            .ok_or_else(|| format!("symbol set must be written `{{a, b}}`, found `{inner}`"))?;
        let symbols: Vec<String> = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s {
                "≤" => "<=".to_string(),
                "≥" => ">=".to_string(),
                "≠" => "!=".to_string(),
                other => other.to_string(),
            })
            .collect();
        return Ok(Domain::Symbols(symbols));
    }
    Err(format!("unrecognized domain `{spec}`"))
}
