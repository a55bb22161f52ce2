//! Genetic operators over slot assignments.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::config::Selection;
use super::Individual;
use crate::hls::{Assignment, Domain, SlotRef, SlotValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("cannot select from an empty population")]
    EmptyPopulation,
}

/// A fresh value for one slot, different from `current` whenever the
/// domain allows it.
pub fn redraw(domain: &Domain, current: &SlotValue, rng: &mut impl Rng) -> SlotValue {
    match (domain, current) {
        (Domain::Unit, SlotValue::Flag(b)) => SlotValue::Flag(!b),
        (Domain::Real { lo, hi }, _) => {
            SlotValue::Num(if lo < hi { rng.gen_range(*lo..=*hi) } else { *lo })
        }
        (Domain::Integer { lo, hi }, _) => SlotValue::Int(rng.gen_range(*lo..=*hi)),
        (Domain::Symbols(set), cur) => {
            let others: Vec<&String> =
                set.iter().filter(|s| !matches!(cur, SlotValue::Sym(c) if c == *s)).collect();
            match others.choose(rng) {
                Some(s) => SlotValue::Sym((*s).clone()),
                None => cur.clone(),
            }
        }
        (Domain::Unit, other) => other.clone(),
    }
}

/// Each slot independently receives a new value with probability `mr`.
/// Slots whose value lies outside their domain are always redrawn.
pub fn mutate(a: &Assignment, slots: &[SlotRef], mr: f64, rng: &mut impl Rng) -> Assignment {
    let fire: Vec<bool> = slots.iter().map(|_| rng.gen_bool(mr)).collect();
    apply(a, slots, &fire, rng)
}

/// As [`mutate`], but at least one slot is redrawn: if no slot fires, one is
/// chosen uniformly.
pub fn mutate_forced(a: &Assignment, slots: &[SlotRef], mr: f64, rng: &mut impl Rng) -> Assignment {
    let mut fire: Vec<bool> = slots.iter().map(|_| rng.gen_bool(mr)).collect();
    if !slots.is_empty() && !fire.iter().any(|&f| f) {
        fire[rng.gen_range(0..slots.len())] = true;
    }
    apply(a, slots, &fire, rng)
}

fn apply(a: &Assignment, slots: &[SlotRef], fire: &[bool], rng: &mut impl Rng) -> Assignment {
    Assignment(
        slots
            .iter()
            .zip(&a.0)
            .zip(fire)
            .map(|((s, v), &f)| {
                if f || !s.domain.contains(v) {
                    redraw(&s.domain, v, rng)
                } else {
                    v.clone()
                }
            })
            .collect(),
    )
}

/// With probability `cr`, swap the values of one uniformly chosen slot.
pub fn crossover(
    a: &Assignment,
    b: &Assignment,
    cr: f64,
    rng: &mut impl Rng,
) -> (Assignment, Assignment) {
    let (mut x, mut y) = (a.clone(), b.clone());
    if !x.0.is_empty() && rng.gen_bool(cr) {
        let k = rng.gen_range(0..x.0.len());
        std::mem::swap(&mut x.0[k], &mut y.0[k]);
    }
    (x, y)
}

/// Indices of the `k` fittest individuals, best first, ties by position.
pub fn top_k(pop: &[Individual], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&i, &j| pop[j].fitness.total_cmp(&pop[i].fitness));
    idx.truncate(k);
    idx
}

/// Pick one index with probability proportional to its weight, uniformly
/// if all weights are zero.
pub fn roulette(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
    if total <= 0.0 || !total.is_finite() {
        return rng.gen_range(0..weights.len());
    }
    let mut r = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        let w = w.max(0.0);
        if r < w {
            return i;
        }
        r -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
}

/// Two parents, drawn with replacement.
pub fn select(
    pop: &[Individual],
    sa: Selection,
    ptbc: usize,
    rng: &mut impl Rng,
) -> Result<(usize, usize), SelectError> {
    if pop.is_empty() {
        return Err(SelectError::EmptyPopulation);
    }
    Ok(match sa {
        Selection::Elitism => {
            let pool = top_k(pop, ptbc.max(1));
            (*pool.choose(rng).unwrap(), *pool.choose(rng).unwrap())
        }
        Selection::Roulette => {
            let w: Vec<f64> = pop.iter().map(|i| i.fitness).collect();
            (roulette(&w, rng), roulette(&w, rng))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hls::Formula;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn running() -> Formula {
        Formula::parse(
            "forall t0 in [0, inf) such that d_pos_x @t (t0) - v_pos_x @t (t0) < 20 and d2obs @t (t0) > 50\n---\n\
             slot 0 at 20 op OP13 range [500, 700]\n\
             slot 1 at and op OP4\n\
             slot 2 at 50 op OP13 range [0, 2.5]\n",
        )
        .unwrap()
    }

    fn ind(fitness: f64) -> Individual {
        Individual { assignment: Assignment(vec![]), fitness }
    }

    #[test]
    fn connective_redraw_excludes_current() {
        let f = running();
        let mut r = rng(1);
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..10_000 {
            let v = redraw(&f.slots()[1].domain, &SlotValue::Sym("and".into()), &mut r);
            *counts.entry(v.to_string()).or_insert(0) += 1;
        }
        assert_eq!(counts.keys().collect::<Vec<_>>(), vec!["implies", "or"]);
        assert!((counts["or"] - 5000i32).abs() < 300, "{counts:?}");
    }

    #[test]
    fn zero_rate_is_identity() {
        let f = Formula::parse("forall t0 in [0, 1] such that x @t (t0) < 2 and x @t (t0) > 1\n---\nslot 0 at and op OP4\nslot 1 at 2 op OP13 range [0, 3]\n").unwrap();
        let a = f.values();
        let mut r = rng(2);
        for _ in 0..100 {
            assert_eq!(mutate(&a, f.slots(), 0.0, &mut r), a);
        }
    }

    #[test]
    fn out_of_domain_values_are_always_redrawn() {
        let f = running();
        let a = f.values();
        let mut r = rng(3);
        for _ in 0..1000 {
            let m = mutate(&a, f.slots(), 0.0, &mut r);
            for (s, v) in f.slots().iter().zip(&m.0) {
                assert!(s.domain.contains(v));
            }
            assert_eq!(m.0[1], SlotValue::Sym("and".into()));
        }
    }

    #[test]
    fn forced_mutation_changes_something() {
        let f = Formula::parse("forall t0 in [0, 1] such that x @t (t0) < 2 and x @t (t0) > 1\n---\nslot 0 at and op OP4\nslot 1 at < op OP2\n").unwrap();
        let a = f.values();
        let mut r = rng(4);
        for _ in 0..1000 {
            assert_ne!(mutate_forced(&a, f.slots(), 0.0, &mut r), a);
        }
    }

    #[test]
    fn crossover_examples() {
        let a = Assignment(vec![SlotValue::Num(20.0), SlotValue::Sym("and".into()), SlotValue::Num(50.0)]);
        let b = Assignment(vec![SlotValue::Num(20.0), SlotValue::Sym("or".into()), SlotValue::Num(45.0)]);
        let mut r = rng(5);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let (x, y) = crossover(&a, &b, 1.0, &mut r);
            seen.insert((x.0[1].to_string(), y.0[2].to_string()));
            if x.0[1] == SlotValue::Sym("or".into()) {
                assert_eq!(x.0, vec![SlotValue::Num(20.0), SlotValue::Sym("or".into()), SlotValue::Num(50.0)]);
                assert_eq!(y.0, vec![SlotValue::Num(20.0), SlotValue::Sym("and".into()), SlotValue::Num(45.0)]);
            }
            assert_eq!(crossover(&a, &b, 0.0, &mut r), (a.clone(), b.clone()));
            assert_eq!(crossover(&a, &a, 1.0, &mut r), (a.clone(), a.clone()));
        }
        assert!(seen.contains(&("or".to_string(), "45".to_string())));
    }

    #[test]
    fn roulette_proportions() {
        let mut r = rng(6);
        let n = 100_000;
        let first = (0..n).filter(|_| roulette(&[3.0, 1.0], &mut r) == 0).count();
        assert!((first as f64 / n as f64 - 0.75).abs() < 0.01);
    }

    #[test]
    fn roulette_all_zero_is_uniform() {
        let mut r = rng(7);
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[roulette(&[0.0, 0.0, 0.0], &mut r)] += 1;
        }
        let e = n as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // Critical value of chi-squared with 2 degrees of freedom at 0.01.
        assert!(chi2 < 9.21, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn elitism_with_single_slot_pool() {
        let pop = vec![ind(1.0), ind(7.0), ind(7.0), ind(3.0)];
        let mut r = rng(8);
        for _ in 0..100 {
            assert_eq!(select(&pop, Selection::Elitism, 1, &mut r).unwrap(), (1, 1));
        }
        assert_eq!(select(&[], Selection::Roulette, 1, &mut r), Err(SelectError::EmptyPopulation));
    }

    proptest! {
        #[test]
        fn top_k_invariant_under_positive_scaling(
            fit in proptest::collection::vec(0.0f64..100.0, 1..40),
            k in 1usize..10,
            scale in 0.01f64..100.0,
        ) {
            let pop: Vec<Individual> = fit.iter().map(|&f| ind(f.round())).collect();
            let scaled: Vec<Individual> = fit.iter().map(|&f| ind(f.round() * scale)).collect();
            prop_assert_eq!(top_k(&pop, k), top_k(&scaled, k));
        }

        #[test]
        fn mutants_stay_in_domain(seed in any::<u64>(), mr in 0.0f64..=1.0) {
            let f = running();
            let mut r = rng(seed);
            let m = mutate_forced(&f.values(), f.slots(), mr, &mut r);
            for (s, v) in f.slots().iter().zip(&m.0) {
                prop_assert!(s.domain.contains(v));
            }
            let g = f.instantiate(&m).unwrap();
            prop_assert_eq!(crate::hls::ast::skeleton(&g), crate::hls::ast::skeleton(f.root()));
        }
    }
}
