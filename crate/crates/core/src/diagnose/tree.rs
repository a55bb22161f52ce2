//! Unpruned C4.5-style decision trees.

use serde::{Deserialize, Serialize};

use super::dataset::{AttrKind, Class, Dataset, Row, Schema, Value};
use crate::hls::SlotId;

/// Per-class row counts, indexed by [`Class::index`].
pub type Counts = [usize; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        label: Class,
        counts: Counts,
    },
    Numeric {
        slot: SlotId,
        threshold: f64,
        /// Rows with value `<= threshold`.
        le: Box<Node>,
        gt: Box<Node>,
    },
    Categorical {
        slot: SlotId,
        /// One branch per declared symbol, in declaration order.
        branches: Vec<(String, Node)>,
    },
}

impl Node {
    /// Rows that reached this node during training.
    pub fn size(&self) -> usize {
        match self {
            Node::Leaf { counts, .. } => counts.iter().sum(),
            Node::Numeric { le, gt, .. } => le.size() + gt.size(),
            Node::Categorical { branches, .. } => branches.iter().map(|(_, n)| n.size()).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub schema: Schema,
    pub root: Node,
    /// Set when the training data held a single class.
    #[serde(default)]
    pub degenerate: bool,
}

impl DecisionTree {
    /// Leaf reached by `values` (one per schema attribute).
    pub fn leaf(&self, values: &[Value]) -> &Node {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { .. } => return node,
                Node::Numeric { slot, threshold, le, gt } => {
                    let k = self.schema.position(*slot).expect("split on a schema slot");
                    node = if values[k].num() <= *threshold { le } else { gt };
                }
                Node::Categorical { slot, branches } => {
                    let k = self.schema.position(*slot).expect("split on a schema slot");
                    node = &branches[values[k].cat()].1;
                }
            }
        }
    }

    /// Check that every split refers to a schema slot of the right kind and
    /// that categorical splits have one branch per declared symbol.
    pub fn validate(&self) -> Result<(), String> {
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            match node {
                Node::Leaf { .. } => {}
                Node::Numeric { slot, threshold, le, gt } => {
                    let k = self.schema.position(*slot).ok_or(format!("split on unknown slot {slot}"))?;
                    if !matches!(self.schema.attributes[k].kind, AttrKind::Numeric { .. }) {
                        return Err(format!("numeric split on categorical slot {slot}"));
                    }
                    if threshold.is_nan() {
                        return Err(format!("split on slot {slot} has no threshold"));
                    }
                    stack.extend([&**le, &**gt]);
                }
                Node::Categorical { slot, branches } => {
                    let k = self.schema.position(*slot).ok_or(format!("split on unknown slot {slot}"))?;
                    let AttrKind::Categorical { symbols } = &self.schema.attributes[k].kind else {
                        return Err(format!("categorical split on numeric slot {slot}"));
                    };
                    if branches.len() != symbols.len() || branches.iter().zip(symbols).any(|((b, _), s)| b != s) {
                        return Err(format!("branches of slot {slot} do not match its symbols"));
                    }
                    stack.extend(branches.iter().map(|(_, n)| n));
                }
            }
        }
        Ok(())
    }

    pub fn classify(&self, values: &[Value]) -> Class {
        match self.leaf(values) {
            Node::Leaf { label, .. } => *label,
            _ => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnParams {
    /// Minimum rows on each side of a split.
    pub min_leaf: usize,
}

impl Default for LearnParams {
    fn default() -> Self {
        LearnParams { min_leaf: 2 }
    }
}

/// A candidate test at a node.
#[derive(Debug, Clone, PartialEq)]
pub enum Split {
    Numeric { attr: usize, threshold: f64 },
    Categorical { attr: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub split: Split,
    pub gain: f64,
    pub gain_ratio: f64,
}

pub fn counts(rows: &[&Row]) -> Counts {
    let mut c = [0; 3];
    for r in rows {
        c[r.class.index()] += 1;
    }
    c
}

pub fn entropy(c: &Counts) -> f64 {
    let n: usize = c.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    c.iter()
        .filter(|&&k| k > 0)
        .map(|&k| {
            let p = k as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Information gain and gain ratio of partitioning `parent` into `parts`.
pub fn gain_and_ratio(parent: &Counts, parts: &[Counts]) -> (f64, f64) {
    let n: usize = parent.iter().sum();
    let n = n as f64;
    let mut remainder = 0.0;
    let mut split_info = 0.0;
    for p in parts {
        let m: usize = p.iter().sum();
        if m == 0 {
            continue;
        }
        let w = m as f64 / n;
        remainder += w * entropy(p);
        split_info -= w * w.log2();
    }
    let gain = entropy(parent) - remainder;
    let ratio = if split_info > 0.0 { gain / split_info } else { 0.0 };
    (gain, ratio)
}

fn majority(c: &Counts, fallback: Class) -> Class {
    let best = *c.iter().max().unwrap();
    if best == 0 {
        return fallback;
    }
    Class::ALL.into_iter().find(|k| c[k.index()] == best).unwrap()
}

/// Every admissible split at a node, with its gain and gain ratio.
///
/// Numeric thresholds sit midway between adjacent distinct values, skipping
/// boundaries where both neighbouring value groups hold the same single
/// class. Every split must leave at least two branches with `min_leaf` rows.
pub fn candidates(schema: &Schema, rows: &[&Row], p: &LearnParams) -> Vec<Scored> {
    let parent = counts(rows);
    let mut out = Vec::new();
    for (attr, a) in schema.attributes.iter().enumerate() {
        match &a.kind {
            AttrKind::Numeric { .. } => {
                let mut sorted: Vec<(f64, Class)> = rows.iter().map(|r| (r.values[attr].num(), r.class)).collect();
                sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
                // Groups of equal values with their class counts.
                let mut groups: Vec<(f64, Counts)> = Vec::new();
                for (v, c) in sorted {
                    match groups.last_mut() {
                        Some((g, counts)) if *g == v => counts[c.index()] += 1,
                        _ => {
                            let mut counts = [0; 3];
                            counts[c.index()] += 1;
                            groups.push((v, counts));
                        }
                    }
                }
                let mut left = [0usize; 3];
                for w in groups.windows(2) {
                    let (lo, lc) = &w[0];
                    let (hi, hc) = &w[1];
                    for k in 0..3 {
                        left[k] += lc[k];
                    }
                    if is_pure_same(lc, hc) {
                        continue;
                    }
                    let right = [parent[0] - left[0], parent[1] - left[1], parent[2] - left[2]];
                    let (nl, nr): (usize, usize) = (left.iter().sum(), right.iter().sum());
                    if nl < p.min_leaf || nr < p.min_leaf {
                        continue;
                    }
                    let threshold = lo + (hi - lo) / 2.0;
                    let (gain, gain_ratio) = gain_and_ratio(&parent, &[left, right]);
                    out.push(Scored { split: Split::Numeric { attr, threshold }, gain, gain_ratio });
                }
            }
            AttrKind::Categorical { symbols } => {
                let mut parts = vec![[0usize; 3]; symbols.len()];
                for r in rows {
                    parts[r.values[attr].cat()][r.class.index()] += 1;
                }
                let big = parts.iter().filter(|c| c.iter().sum::<usize>() >= p.min_leaf).count();
                if big < 2 {
                    continue;
                }
                let (gain, gain_ratio) = gain_and_ratio(&parent, &parts);
                out.push(Scored { split: Split::Categorical { attr }, gain, gain_ratio });
            }
        }
    }
    out
}

fn is_pure_same(a: &Counts, b: &Counts) -> bool {
    let single = |c: &Counts| {
        let nz: Vec<usize> = (0..3).filter(|&k| c[k] > 0).collect();
        (nz.len() == 1).then(|| nz[0])
    };
    matches!((single(a), single(b)), (Some(x), Some(y)) if x == y)
}

const EPS: f64 = 1e-12;

/// The split C4.5 would choose: highest gain ratio among candidates with
/// positive gain at least the mean gain. Earlier candidates win ties.
pub fn choose(cands: &[Scored]) -> Option<&Scored> {
    let positive: Vec<&Scored> = cands.iter().filter(|c| c.gain > EPS).collect();
    if positive.is_empty() {
        return None;
    }
    let mean = positive.iter().map(|c| c.gain).sum::<f64>() / positive.len() as f64;
    let mut best: Option<&Scored> = None;
    for c in positive.into_iter().filter(|c| c.gain >= mean - EPS) {
        if best.is_none_or(|b| c.gain_ratio > b.gain_ratio + EPS) {
            best = Some(c);
        }
    }
    best
}

/// Grow a tree over `ds`. A dataset holding a single class yields a single
/// leaf with `degenerate` set.
pub fn learn(ds: &Dataset, p: &LearnParams) -> DecisionTree {
    let rows: Vec<&Row> = ds.rows.iter().collect();
    let classes = counts(&rows).iter().filter(|&&k| k > 0).count();
    let root = grow(&ds.schema, &rows, p, Class::Violated);
    DecisionTree { schema: ds.schema.clone(), root, degenerate: classes < 2 }
}

fn grow(schema: &Schema, rows: &[&Row], p: &LearnParams, fallback: Class) -> Node {
    let c = counts(rows);
    let label = majority(&c, fallback);
    let leaf = Node::Leaf { label, counts: c };
    let n: usize = c.iter().sum();
    if c.iter().filter(|&&k| k > 0).count() <= 1 || n < 2 * p.min_leaf {
        return leaf;
    }
    let cands = candidates(schema, rows, p);
    let Some(best) = choose(&cands) else { return leaf };
    match best.split {
        Split::Numeric { attr, threshold } => {
            let (le, gt): (Vec<&Row>, Vec<&Row>) = rows.iter().partition(|r| r.values[attr].num() <= threshold);
            Node::Numeric {
                slot: schema.attributes[attr].slot,
                threshold,
                le: Box::new(grow(schema, &le, p, label)),
                gt: Box::new(grow(schema, &gt, p, label)),
            }
        }
        Split::Categorical { attr } => {
            let AttrKind::Categorical { symbols } = &schema.attributes[attr].kind else { unreachable!() };
            let branches = symbols
                .iter()
                .enumerate()
                .map(|(k, sym)| {
                    let part: Vec<&Row> = rows.iter().copied().filter(|r| r.values[attr].cat() == k).collect();
                    (sym.clone(), grow(schema, &part, p, label))
                })
                .collect();
            Node::Categorical { slot: schema.attributes[attr].slot, branches }
        }
    }
}
