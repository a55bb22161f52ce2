//! The checked set: every mutant evaluated during a search, with its
//! verdict, fitness and generation. Persisted as CSV with one `slot_<id>`
//! column per slot followed by `verdict`, `fitness` and `generation`.

use std::collections::HashSet;
use std::io::{Read, Write};

use thiserror::Error;

use crate::checker::Verdict;
use crate::hls::slot::ValueKey;
use crate::hls::{Assignment, Formula, SlotRef, SlotValue};

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRecord {
    pub assignment: Assignment,
    pub verdict: Verdict,
    pub fitness: f64,
    pub generation: u64,
}

/// Append-only set of records with no two equal assignments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckedSet {
    records: Vec<DeltaRecord>,
    keys: HashSet<Vec<ValueKey>>,
}

impl CheckedSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append `r` unless its assignment is already present.
    pub fn push(&mut self, r: DeltaRecord) -> bool {
        if !self.keys.insert(r.assignment.key()) {
            return false;
        }
        self.records.push(r);
        true
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.keys.contains(&a.key())
    }

    pub fn records(&self) -> &[DeltaRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == v).count()
    }
}

#[derive(Debug, Error)]
pub enum DeltaError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("header does not match the requirement's slots: expected `{expected}`")]
    Header { expected: String },
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
}

fn header(slots: &[SlotRef]) -> Vec<String> {
    let mut h: Vec<String> = slots.iter().map(SlotRef::name).collect();
    h.extend(["verdict", "fitness", "generation"].map(String::from));
    h
}

/// Incremental writer; call [`DeltaWriter::append`] once per generation.
pub struct DeltaWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> DeltaWriter<W> {
    pub fn new(out: W, slots: &[SlotRef]) -> Result<Self, DeltaError> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(header(slots))?;
        inner.flush()?;
        Ok(DeltaWriter { inner })
    }

    /// Write and flush `records`.
    pub fn append(&mut self, records: &[DeltaRecord]) -> Result<(), DeltaError> {
        for r in records {
            let mut row: Vec<String> = r.assignment.0.iter().map(SlotValue::to_string).collect();
            row.push(r.verdict.as_str().to_string());
            row.push(r.fitness.to_string());
            row.push(r.generation.to_string());
            self.inner.write_record(&row)?;
        }
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W, DeltaError> {
        self.inner.into_inner().map_err(|e| DeltaError::Io(e.into_error()))
    }
}

pub fn write_delta(out: impl Write, slots: &[SlotRef], records: &[DeltaRecord]) -> Result<(), DeltaError> {
    let mut w = DeltaWriter::new(out, slots)?;
    w.append(records)?;
    Ok(())
}

/// Read a checked set written for `f`, validating every value against the
/// slot domains.
pub fn read_delta(input: impl Read, f: &Formula) -> Result<CheckedSet, DeltaError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let expected = header(f.slots());
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if got != expected {
        return Err(DeltaError::Header { expected: expected.join(",") });
    }
    let n = f.slots().len();
    let mut set = CheckedSet::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |msg: String| DeltaError::Row { row, msg };
        if rec.len() != n + 3 {
            return Err(bad(format!("expected {} fields, found {}", n + 3, rec.len())));
        }
        let mut values = Vec::with_capacity(n);
        for (s, cell) in f.slots().iter().zip(rec.iter()) {
            let v = SlotValue::parse(s.op.value_kind(), cell).map_err(bad)?;
            if !s.domain.contains(&v) {
                return Err(bad(format!("{} = {v} is outside its domain", s.name())));
            }
            values.push(v);
        }
        let verdict =
            Verdict::from_str_opt(&rec[n]).ok_or_else(|| bad(format!("bad verdict `{}`", &rec[n])))?;
        let fitness: f64 = rec[n + 1]
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| bad(format!("bad fitness `{}`", &rec[n + 1])))?;
        let generation: u64 =
            rec[n + 2].parse().map_err(|_| bad(format!("bad generation `{}`", &rec[n + 2])))?;
        let r = DeltaRecord { assignment: Assignment(values), verdict, fitness, generation };
        if !set.push(r) {
            return Err(bad("duplicate assignment".into()));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::UnknownReason;

    fn formula() -> Formula {
        Formula::parse(
            "forall t0 in [0, 5] such that x @t (t0) < 2 and not x @t (t0) > 1\n---\n\
             slot 0 at 5 op OP11 range [0, 10]\nslot 1 at 2 op OP13 range [0, 3]\nslot 2 at and op OP4\nslot 3 at not op OP3\n",
        )
        .unwrap()
    }

    fn rec(sym: &str, x: f64, flag: bool, verdict: Verdict, generation: u64) -> DeltaRecord {
        DeltaRecord {
            assignment: Assignment(vec![
                SlotValue::Num(5.0),
                SlotValue::Num(x),
                SlotValue::Sym(sym.into()),
                SlotValue::Flag(flag),
            ]),
            verdict,
            fitness: 6.0,
            generation,
        }
    }

    #[test]
    fn csv_roundtrip() {
        let f = formula();
        let mut set = CheckedSet::new();
        assert!(set.push(rec("or", 0.1 + 0.2, true, Verdict::Satisfied, 0)));
        assert!(set.push(rec("and", 2.5, false, Verdict::Unknown(UnknownReason::Timeout), 1)));
        assert!(!set.push(rec("or", 0.1 + 0.2, true, Verdict::Violated, 2)));
        let mut buf = Vec::new();
        write_delta(&mut buf, f.slots(), set.records()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("slot_0,slot_1,slot_2,slot_3,verdict,fitness,generation\n"), "{text}");
        assert!(text.contains("5,0.30000000000000004,or,true,satisfied,6,0\n"));
        assert_eq!(read_delta(buf.as_slice(), &f).unwrap(), set);
    }

    #[test]
    fn rejects_bad_rows() {
        let f = formula();
        let head = "slot_0,slot_1,slot_2,slot_3,verdict,fitness,generation\n";
        for body in [
            "5,1,xor,true,satisfied,6,0\n",
            "5,9,or,true,satisfied,6,0\n",
            "5,1,or,maybe,satisfied,6,0\n",
            "5,1,or,true,sat,6,0\n",
            "5,1,or,true,satisfied,x,0\n",
            "5,1,or,true,satisfied,6,-1\n",
            "5,1,or,true,satisfied\n",
            "5,1,or,true,satisfied,6,0\n5,1,or,true,violated,6,1\n",
        ] {
            let doc = format!("{head}{body}");
            assert!(matches!(read_delta(doc.as_bytes(), &f), Err(DeltaError::Row { .. })), "{body}");
        }
        assert!(matches!(read_delta("slot_0,verdict\n".as_bytes(), &f), Err(DeltaError::Header { .. })));
        assert!(read_delta(head.as_bytes(), &f).unwrap().is_empty());
    }
}
