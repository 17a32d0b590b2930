//! The relation `Λ ≤_{Ω,Ω′} Λ′` and the witness search behind embedding
//! obstructions.
//!
//! An embedding `X_Ω → X_{Ω′}` forces, for each minimal target `Λ′` of
//! `Ω′`, a convex generator `Λ` and paired decompositions
//! `Λ = Λ₁⋯Λₙ`, `Λ′ = Λ₁′⋯Λₙ′` such that
//!
//! 1. `Λᵢ ≤_{Ω,Ω′} Λᵢ′` for each `i`;
//! 2. if `Λᵢ ≠ Λⱼ` or `Λᵢ′ ≠ Λⱼ′`, then `Λᵢ` and `Λⱼ` share no `e` factor;
//! 3. `I(∏_{i∈S} Λᵢ) = I(∏_{i∈S} Λᵢ′)` for every subset `S`.
//!
//! The search space is finite, so failing to find such data (within the node
//! budget) proves that no embedding exists. Running out of budget proves
//! nothing and is reported as [`Error::BudgetExceeded`].

mod certificate;
mod search;

pub use certificate::{verify_certificate, Certificate, CERTIFICATE_SCHEMA};
pub use search::find_witness;

use crate::capacities::{generators_below, NodeBudget};
use crate::domains::ToricDomain;
use crate::error::{Error, Result};
use crate::lattice::ConvexGenerator;

/// Default cap on search nodes for one witness search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Accept any all-`e` target instead of requiring a minimal one. Results
    /// then depend on an unproven conjecture and are marked conditional.
    pub conjectural_mode: bool,
    /// Largest number of factor pairs to try; `m(Λ′)` when absent.
    pub max_n: Option<usize>,
    pub node_budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { conjectural_mode: false, max_n: None, node_budget: DEFAULT_SEARCH_BUDGET }
    }
}

/// Counters describing a completed search.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct SearchTrace {
    pub factorizations: u64,
    pub candidate_lists: u64,
    pub assignments: u64,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// No witness exists for `target`: the embedding is impossible (or, in
    /// conjectural mode, impossible if the conjecture holds).
    Excluded { target: ConvexGenerator, trace: SearchTrace, conditional: bool },
    /// Every target has a witness; the criterion does not obstruct.
    NotExcluded { certificates: Vec<Certificate> },
}

impl Verdict {
    pub fn is_excluded(&self) -> bool {
        matches!(self, Verdict::Excluded { .. })
    }
}

fn require_elliptic(gen: &ConvexGenerator) -> Result<()> {
    if gen.is_all_elliptic() {
        Ok(())
    } else {
        Err(Error::HLabeledTarget(gen.to_string()))
    }
}

/// `Λ ≤_{Ω,Ω′} Λ′`: equal index, `A_Ω(Λ) ≤ A_{Ω′}(Λ′)`, and
/// `2x(Λ) + 2y(Λ) − h(Λ) ≥ 2(x(Λ′) + y(Λ′) + m(Λ′) − 1)`.
pub fn le(
    domain: &ToricDomain,
    target_domain: &ToricDomain,
    gen: &ConvexGenerator,
    target: &ConvexGenerator,
) -> Result<bool> {
    require_elliptic(target)?;
    Ok(gen.ech_index() == target.ech_index()
        && count_condition(gen.x(), gen.y(), gen.h_count(), target)
        && domain.action(gen) <= target_domain.action(target))
}

fn count_condition(x: u64, y: u64, h: u64, target: &ConvexGenerator) -> bool {
    let left = 2 * (x + y) as i128 - h as i128;
    let right = 2 * (target.x() + target.y() + target.total_multiplicity()) as i128 - 2;
    left >= right
}

/// True if some `e(a,b)` divides both.
pub fn shares_elliptic(first: &ConvexGenerator, second: &ConvexGenerator) -> bool {
    first.shares_elliptic(second)
}

/// Every `Λ` with `Λ ≤_{Ω,Ω′} target`, ordered by action and then
/// canonically. Finite because the action is capped by `A_{Ω′}(target)`.
pub fn candidates(
    domain: &ToricDomain,
    target_domain: &ToricDomain,
    target: &ConvexGenerator,
    budget: &mut NodeBudget,
) -> Result<Vec<ConvexGenerator>> {
    require_elliptic(target)?;
    if target.is_one() {
        return Err(Error::EmptyGenerator);
    }
    let cap = target_domain.action(target);
    let mut found = generators_below(domain, target.ech_index(), &cap, budget, &mut |x, y, h| {
        count_condition(x, y, h, target)
    })?;
    found.sort_by(|(g, a), (h, b)| a.cmp(b).then_with(|| g.cmp(h)));
    Ok(found.into_iter().map(|(g, _)| g).collect())
}

/// Runs the witness search for each target in turn and stops at the first
/// one without a witness.
pub fn check_embedding(
    domain: &ToricDomain,
    target_domain: &ToricDomain,
    targets: &[ConvexGenerator],
    opts: &SearchOptions,
) -> Result<Verdict> {
    let mut certificates = Vec::new();
    for target in targets {
        let mut trace = SearchTrace::default();
        match search::find_witness_traced(domain, target_domain, target, opts, &mut trace)? {
            Some(cert) => certificates.push(cert),
            None => {
                return Ok(Verdict::Excluded {
                    target: target.clone(),
                    trace,
                    conditional: opts.conjectural_mode,
                })
            }
        }
    }
    Ok(Verdict::NotExcluded { certificates })
}
