//! Evolutionary search for mutated requirements.
//!
//! Each generation is checked against the trace and merged into the checked
//! set; the next generation is bred by selection, crossover and mutation.
//! All random draws happen on the loop thread before a generation is handed
//! to the checker, so results do not depend on checker parallelism.

pub mod config;
pub mod delta;
pub mod fitness;
pub mod operators;

use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checker::{self, UnknownReason, Verdict};
use crate::hls::slot::ValueKey;
use crate::hls::{Assignment, Formula};
use crate::trace::Trace;

pub use config::{Config, ConfigError, Selection};
pub use delta::{CheckedSet, DeltaRecord};
pub use fitness::FitnessParams;

/// Generations in a row without a new mutant after which the search gives up.
pub const STALL_LIMIT: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub assignment: Assignment,
    pub fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The checked set holds the requested number of satisfied mutants.
    SatisfiedTarget,
    Timeout,
    /// Every assignment of the (finite) slot domains has been checked.
    DomainExhausted,
    MaxGenerations,
    /// No new mutant appeared for [`STALL_LIMIT`] generations.
    Stalled,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::SatisfiedTarget => "satisfied-target",
            Termination::Timeout => "timeout",
            Termination::DomainExhausted => "domain-exhausted",
            Termination::MaxGenerations => "max-generations",
            Termination::Stalled => "stalled",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub delta: CheckedSet,
    pub termination: Termination,
    /// Number of generations checked.
    pub generations: u64,
    /// Verdict of the unmutated requirement.
    pub original: Verdict,
}

/// Run the search to completion.
pub fn run(orig: &Formula, tr: &Trace, cfg: &Config) -> RunOutcome {
    match run_with(orig, tr, cfg, |_| Ok::<(), std::convert::Infallible>(())) {
        Ok(o) => o,
        Err(e) => match e {},
    }
}

/// Run the search, handing each generation's new records to `on_generation`
/// as soon as they are checked. An error from the callback aborts the run.
pub fn run_with<E>(
    orig: &Formula,
    tr: &Trace,
    cfg: &Config,
    mut on_generation: impl FnMut(&[DeltaRecord]) -> Result<(), E>,
) -> Result<RunOutcome, E> {
    let started = Instant::now();
    let deadline = cfg.pgto_budget().and_then(|d| started.checked_add(d));
    let tcto = cfg.tcto_budget();
    let slots = orig.slots();
    let base = orig.values();

    let original = checker::check_lenient(orig.root(), tr, tcto);
    if original != Verdict::Violated {
        warn!("the original requirement is not violated by the trace ({original})");
    }

    let space = orig.assignment_space();
    let base_in_domain = slots.iter().zip(&base.0).all(|(s, v)| s.domain.contains(v)) as u128;
    let exhausted = |d: &CheckedSet| space.is_some_and(|n| d.len() as u128 + base_in_domain >= n);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut seen: HashSet<Vec<ValueKey>> = HashSet::from([base.key()]);
    let mut delta = CheckedSet::new();
    let mut candidates: Vec<Assignment> =
        (0..cfg.ps).map(|_| operators::mutate_forced(&base, slots, cfg.mr, &mut rng)).collect();
    let mut generation = 0u64;
    let mut stall = 0u64;

    let termination = loop {
        if exhausted(&delta) {
            break Termination::DomainExhausted;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break Termination::Timeout;
        }

        let fresh: Vec<Assignment> =
            candidates.iter().filter(|a| seen.insert(a.key())).cloned().collect();
        let props: Vec<_> = fresh
            .iter()
            .map(|a| orig.instantiate(a).expect("mutants respect slot domains"))
            .collect();
        let verdicts = checker::check_batch(&props, tr, tcto);
        let records: Vec<DeltaRecord> = fresh
            .into_iter()
            .zip(verdicts)
            .map(|(assignment, v)| DeltaRecord {
                fitness: fitness::fitness(&base, &assignment, &cfg.fitness),
                verdict: v.unwrap_or(Verdict::Unknown(UnknownReason::Unsupported)),
                assignment,
                generation,
            })
            .collect();
        stall = if records.is_empty() { stall + 1 } else { 0 };
        for r in &records {
            delta.push(r.clone());
        }
        on_generation(&records)?;
        info!(
            "generation {generation}: {} new, {} satisfied, {} checked in total",
            records.len(),
            delta.count(Verdict::Satisfied),
            delta.len()
        );
        generation += 1;

        if delta.count(Verdict::Satisfied) >= cfg.mg {
            break Termination::SatisfiedTarget;
        }
        if exhausted(&delta) {
            break Termination::DomainExhausted;
        }
        if cfg.max_generations.is_some_and(|m| generation >= m) {
            break Termination::MaxGenerations;
        }
        if stall >= STALL_LIMIT {
            break Termination::Stalled;
        }

        let population: Vec<Individual> = candidates
            .into_iter()
            .map(|a| Individual { fitness: fitness::fitness(&base, &a, &cfg.fitness), assignment: a })
            .collect();
        let mut next = Vec::with_capacity(cfg.ps);
        while next.len() < cfg.ps {
            let (i, j) = operators::select(&population, cfg.sa, cfg.ptbc, &mut rng)
                .expect("population is never empty");
            let (c, d) =
                operators::crossover(&population[i].assignment, &population[j].assignment, cfg.cr, &mut rng);
            next.push(operators::mutate(&c, slots, cfg.mr, &mut rng));
            if next.len() < cfg.ps {
                next.push(operators::mutate(&d, slots, cfg.mr, &mut rng));
            }
        }
        candidates = next;
    };

    Ok(RunOutcome { delta, termination, generations: generation, original })
}
