use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::Verdict;
use crate::hls::{Domain, Formula, SlotId, SlotValue};
use crate::search::{CheckedSet, DeltaRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Satisfied,
    Violated,
    Unknown,
}

impl Class {
    pub const ALL: [Class; 3] = [Class::Satisfied, Class::Violated, Class::Unknown];

    pub fn of(v: Verdict) -> Class {
        match v {
            Verdict::Satisfied => Class::Satisfied,
            Verdict::Violated => Class::Violated,
            Verdict::Unknown(_) => Class::Unknown,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Label used in tree text output.
    pub fn label(self) -> &'static str {
        match self {
            Class::Satisfied => "True",
            Class::Violated => "False",
            Class::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Satisfied => "satisfied",
            Class::Violated => "violated",
            Class::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttrKind {
    Numeric { lo: f64, hi: f64 },
    Categorical { symbols: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub slot: SlotId,
    pub kind: AttrKind,
}

impl Attribute {
    pub fn name(&self) -> String {
        format!("slot_{}", self.slot)
    }
}

/// Ordered attributes, one per slot of the requirement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub attributes: Vec<Attribute>,
}

impl Schema {
    pub fn from_formula(f: &Formula) -> Self {
        let attributes = f
            .slots()
            .iter()
            .map(|s| Attribute {
                slot: s.id,
                kind: match &s.domain {
                    Domain::Real { lo, hi } => AttrKind::Numeric { lo: *lo, hi: *hi },
                    Domain::Integer { lo, hi } => AttrKind::Numeric { lo: *lo as f64, hi: *hi as f64 },
                    Domain::Symbols(set) => AttrKind::Categorical { symbols: set.clone() },
                    Domain::Unit => AttrKind::Categorical { symbols: vec!["false".into(), "true".into()] },
                },
            })
            .collect();
        Schema { attributes }
    }

    pub fn position(&self, slot: SlotId) -> Option<usize> {
        self.attributes.iter().position(|a| a.slot == slot)
    }
}

/// One attribute value: a number, or an index into the declared symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(usize),
}

impl Value {
    pub fn num(self) -> f64 {
        match self {
            Value::Num(x) => x,
            Value::Cat(_) => panic!("categorical value used as a number"),
        }
    }

    pub fn cat(self) -> usize {
        match self {
            Value::Cat(k) => k,
            Value::Num(_) => panic!("numeric value used as a category"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<Value>,
    pub class: Class,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: Schema,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("value `{value}` does not fit attribute {attr}")]
    BadValue { attr: String, value: String },
    #[error("row has {found} values, schema has {expected}")]
    Arity { expected: usize, found: usize },
}

impl Dataset {
    pub fn new(schema: Schema) -> Self {
        Dataset { schema, rows: Vec::new() }
    }

    /// Convert a slot assignment to an attribute row.
    pub fn encode(&self, values: &[SlotValue]) -> Result<Vec<Value>, DatasetError> {
        if values.len() != self.schema.attributes.len() {
            return Err(DatasetError::Arity { expected: self.schema.attributes.len(), found: values.len() });
        }
        self.schema
            .attributes
            .iter()
            .zip(values)
            .map(|(a, v)| {
                let bad = || DatasetError::BadValue { attr: a.name(), value: v.to_string() };
                match &a.kind {
                    AttrKind::Numeric { .. } => v.as_f64().filter(|x| x.is_finite()).map(Value::Num).ok_or_else(bad),
                    AttrKind::Categorical { symbols } => {
                        let text = v.to_string();
                        symbols.iter().position(|s| *s == text).map(Value::Cat).ok_or_else(bad)
                    }
                }
            })
            .collect()
    }

    pub fn push_record(&mut self, r: &DeltaRecord) -> Result<(), DatasetError> {
        let values = self.encode(&r.assignment.0)?;
        self.rows.push(Row { values, class: Class::of(r.verdict) });
        Ok(())
    }

    pub fn count(&self, c: Class) -> usize {
        self.rows.iter().filter(|r| r.class == c).count()
    }

    /// CSV with one column per slot and a final `class` column.
    pub fn write_csv(&self, out: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut head: Vec<String> = self.schema.attributes.iter().map(Attribute::name).collect();
        head.push("class".into());
        w.write_record(&head)?;
        for r in &self.rows {
            let mut line: Vec<String> = r
                .values
                .iter()
                .zip(&self.schema.attributes)
                .map(|(v, a)| match (v, &a.kind) {
                    (Value::Num(x), _) => x.to_string(),
                    (Value::Cat(k), AttrKind::Categorical { symbols }) => symbols[*k].clone(),
                    (Value::Cat(k), _) => k.to_string(),
                })
                .collect();
            line.push(r.class.to_string());
            w.write_record(&line)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("no satisfied mutant was found")]
    NoSatisfied,
    #[error("no violated mutant was found")]
    NoViolated,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Balanced learning set: the `n` fittest satisfied and `n` fittest violated
/// records, `n` being the smaller class size (optionally capped). Ties in
/// fitness go to the earlier generation, then to the earlier record.
/// Selected records keep their order in the checked set; unknown records are
/// appended after them when `include_unknown` is set.
pub fn filter(
    delta: &CheckedSet,
    schema: Schema,
    cap: Option<usize>,
    include_unknown: bool,
) -> Result<Dataset, FilterError> {
    let recs = delta.records();
    let of = |v: Verdict| -> Vec<usize> { (0..recs.len()).filter(|&i| recs[i].verdict == v).collect() };
    let (mut sat, mut viol) = (of(Verdict::Satisfied), of(Verdict::Violated));
    if sat.is_empty() {
        return Err(FilterError::NoSatisfied);
    }
    if viol.is_empty() {
        return Err(FilterError::NoViolated);
    }
    let n = sat.len().min(viol.len()).min(cap.unwrap_or(usize::MAX));
    for idx in [&mut sat, &mut viol] {
        idx.sort_by(|&i, &j| {
            recs[j]
                .fitness
                .total_cmp(&recs[i].fitness)
                .then(recs[i].generation.cmp(&recs[j].generation))
                .then(i.cmp(&j))
        });
        idx.truncate(n);
    }
    let mut keep: Vec<usize> = sat.into_iter().chain(viol).collect();
    keep.sort_unstable();
    let mut ds = Dataset::new(schema);
    for i in keep {
        ds.push_record(&recs[i])?;
    }
    if include_unknown {
        for r in recs.iter().filter(|r| !r.verdict.is_known()) {
            ds.push_record(r)?;
        }
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::UnknownReason;
    use crate::hls::Assignment;

    fn schema() -> Schema {
        Schema {
            attributes: vec![Attribute { slot: 0, kind: AttrKind::Numeric { lo: 0.0, hi: 10.0 } }],
        }
    }

    fn rec(x: f64, verdict: Verdict, fitness: f64, generation: u64) -> DeltaRecord {
        DeltaRecord { assignment: Assignment(vec![SlotValue::Num(x)]), verdict, fitness, generation }
    }

    #[test]
    fn balances_to_smaller_class() {
        let mut d = CheckedSet::new();
        for k in 0..5 {
            d.push(rec(k as f64, Verdict::Violated, 0.0, 0));
        }
        d.push(rec(9.0, Verdict::Satisfied, 0.0, 0));
        d.push(rec(8.0, Verdict::Satisfied, 0.0, 1));
        d.push(rec(7.0, Verdict::Unknown(UnknownReason::Timeout), 0.0, 1));
        let ds = filter(&d, schema(), None, false).unwrap();
        assert_eq!((ds.count(Class::Satisfied), ds.count(Class::Violated), ds.count(Class::Unknown)), (2, 2, 0));
        let ds = filter(&d, schema(), None, true).unwrap();
        assert_eq!(ds.count(Class::Unknown), 1);
        assert_eq!(ds.rows.last().unwrap().class, Class::Unknown);
        let ds = filter(&d, schema(), Some(1), false).unwrap();
        assert_eq!(ds.rows.len(), 2);
    }

    #[test]
    fn ties_prefer_earlier_generation_then_insertion() {
        let mut d = CheckedSet::new();
        d.push(rec(1.0, Verdict::Violated, 3.0, 2));
        d.push(rec(2.0, Verdict::Violated, 3.0, 1));
        d.push(rec(3.0, Verdict::Violated, 3.0, 1));
        d.push(rec(4.0, Verdict::Violated, 5.0, 3));
        d.push(rec(9.0, Verdict::Satisfied, 0.0, 0));
        d.push(rec(8.0, Verdict::Satisfied, 0.0, 0));
        d.push(rec(7.0, Verdict::Satisfied, 0.0, 0));
        let ds = filter(&d, schema(), None, false).unwrap();
        let xs: Vec<f64> = ds.rows.iter().map(|r| r.values[0].num()).collect();
        assert_eq!(xs, vec![2.0, 3.0, 4.0, 9.0, 8.0, 7.0]);
    }

    #[test]
    fn missing_class_is_reported() {
        let mut d = CheckedSet::new();
        d.push(rec(1.0, Verdict::Violated, 0.0, 0));
        assert_eq!(filter(&d, schema(), None, false), Err(FilterError::NoSatisfied));
        let mut d = CheckedSet::new();
        d.push(rec(1.0, Verdict::Satisfied, 0.0, 0));
        assert_eq!(filter(&d, schema(), None, false), Err(FilterError::NoViolated));
    }

    #[test]
    fn csv_layout() {
        let f = Formula::parse(
            "forall t0 in [0, 1] such that x @t (t0) < 2 and x @t (t0) > 1\n---\nslot 0 at 2 op OP13 range [0, 3]\nslot 1 at and op OP4\n",
        )
        .unwrap();
        let mut ds = Dataset::new(Schema::from_formula(&f));
        ds.push_record(&DeltaRecord {
            assignment: Assignment(vec![SlotValue::Num(2.5), SlotValue::Sym("or".into())]),
            verdict: Verdict::Satisfied,
            fitness: 0.0,
            generation: 0,
        })
        .unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "slot_0,slot_1,class\n2.5,or,satisfied\n");
    }
}
