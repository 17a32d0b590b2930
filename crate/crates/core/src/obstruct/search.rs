//! Exhaustive witness search.
//!
//! For `n = 1, 2, …, m(Λ′)` and each unordered decomposition of `Λ′` into
//! `n` factors, we assign to every factor `Λᵢ′` one of its candidates `Λᵢ`
//! by backtracking. Equal target factors are adjacent in the decomposition,
//! so taking their candidate indices non-decreasing visits each multiset of
//! assignments once. At each step the new factor is checked against all
//! earlier ones (no shared `h`, so the product stays a convex generator;
//! the shared-`e` rule for distinct pairs), and the subset-index condition
//! is checked incrementally: we keep the set of distinct subset products
//! so far, and a new pair `(Λ, Λ′)` only adds the products `s·(Λ, Λ′)`.

use std::collections::{HashMap, HashSet};

use super::{candidates, require_elliptic, Certificate, SearchOptions, SearchTrace};
use crate::capacities::{is_minimal, NodeBudget};
use crate::domains::ToricDomain;
use crate::error::{Error, Result};
use crate::lattice::{ConvexGenerator, Factorizations};

type Pair = (ConvexGenerator, ConvexGenerator);

/// A certificate for `target`, or `None` if none exists. `None` is a proof:
/// the search space was enumerated completely within the budget.
pub fn find_witness(
    domain: &ToricDomain,
    target_domain: &ToricDomain,
    target: &ConvexGenerator,
    opts: &SearchOptions,
) -> Result<Option<Certificate>> {
    find_witness_traced(domain, target_domain, target, opts, &mut SearchTrace::default())
}

pub(super) fn find_witness_traced(
    domain: &ToricDomain,
    target_domain: &ToricDomain,
    target: &ConvexGenerator,
    opts: &SearchOptions,
    trace: &mut SearchTrace,
) -> Result<Option<Certificate>> {
    require_elliptic(target)?;
    let mut budget = NodeBudget::new(opts.node_budget);
    let result = search(domain, target_domain, target, opts, trace, &mut budget);
    trace.nodes = budget.used();
    result
}

fn search(
    domain: &ToricDomain,
    target_domain: &ToricDomain,
    target: &ConvexGenerator,
    opts: &SearchOptions,
    trace: &mut SearchTrace,
    budget: &mut NodeBudget,
) -> Result<Option<Certificate>> {
    if !opts.conjectural_mode && !is_minimal(target_domain, target, budget)? {
        return Err(Error::NotMinimal(target.to_string(), target_domain.to_string()));
    }
    let certify = |pairs: Vec<Pair>| {
        Certificate::new(domain.clone(), target_domain.clone(), target.clone(), pairs, opts.conjectural_mode)
    };
    if target.is_one() {
        return certify(Vec::new()).map(Some);
    }
    let max_n = opts.max_n.map_or(target.total_multiplicity(), |n| (n as u64).min(target.total_multiplicity()));
    let mut lists: HashMap<ConvexGenerator, Vec<ConvexGenerator>> = HashMap::new();
    for n in 1..=max_n as usize {
        for factors in Factorizations::new(target, n) {
            trace.factorizations += 1;
            for f in &factors {
                if !lists.contains_key(f) {
                    trace.candidate_lists += 1;
                    lists.insert(f.clone(), candidates(domain, target_domain, f, budget)?);
                }
            }
            let options: Vec<&Vec<ConvexGenerator>> = factors.iter().map(|f| &lists[f]).collect();
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            let mut walk = Assign { factors: &factors, options: &options, chosen: Vec::new(), trace, budget };
            let start = vec![(ConvexGenerator::one(), ConvexGenerator::one())];
            if walk.extend(&start)? {
                let pairs = (0..n).map(|i| (walk.pick(i).clone(), factors[i].clone())).collect();
                return certify(pairs).map(Some);
            }
        }
    }
    Ok(None)
}

struct Assign<'a> {
    factors: &'a [ConvexGenerator],
    options: &'a [&'a Vec<ConvexGenerator>],
    chosen: Vec<usize>,
    trace: &'a mut SearchTrace,
    budget: &'a mut NodeBudget,
}

impl Assign<'_> {
    fn pick(&self, i: usize) -> &ConvexGenerator {
        &self.options[i][self.chosen[i]]
    }

    /// Tries to complete the assignment; `subsets` holds the distinct
    /// products over subsets of the pairs chosen so far.
    fn extend(&mut self, subsets: &[Pair]) -> Result<bool> {
        let i = self.chosen.len();
        if i == self.factors.len() {
            return Ok(true);
        }
        let target = &self.factors[i];
        let first = match i {
            0 => 0,
            _ if self.factors[i - 1] == *target => self.chosen[i - 1],
            _ => 0,
        };
        for c in first..self.options[i].len() {
            if !self.budget.tick() {
                return Err(self.budget.exceeded());
            }
            self.trace.assignments += 1;
            let gen = &self.options[i][c];
            let compatible = (0..i).all(|j| {
                let other = self.pick(j);
                let same_pair = other == gen && self.factors[j] == *target;
                !other.shares_hyperbolic(gen) && (same_pair || !other.shares_elliptic(gen))
            });
            if !compatible {
                continue;
            }
            let Some(grown) = grow_subsets(subsets, gen, target) else {
                continue;
            };
            self.chosen.push(c);
            if self.extend(&grown)? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}

/// Adds the pair to every subset product; `None` if some new product has
/// unequal indices on the two sides.
fn grow_subsets(subsets: &[Pair], gen: &ConvexGenerator, target: &ConvexGenerator) -> Option<Vec<Pair>> {
    let mut out = subsets.to_vec();
    let mut seen: HashSet<Pair> = subsets.iter().cloned().collect();
    for (l, t) in subsets {
        let l = l.product(gen).expect("no shared h was checked");
        let t = t.product(target).expect("targets are all-e");
        if l.ech_index() != t.ech_index() {
            return None;
        }
        if seen.insert((l.clone(), t.clone())) {
            out.push((l, t));
        }
    }
    Some(out)
}
