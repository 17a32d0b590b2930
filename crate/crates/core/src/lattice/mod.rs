//! Convex integral paths and their labeled versions (convex generators).
//!
//! A path runs from `(0, y)` down to `(x, 0)` as the graph of a concave
//! function, with lattice vertices and possibly a final vertical drop. Each
//! edge is stored as a primitive [`Direction`] `(a, b)` (displacement
//! `(m·a, −m·b)`) together with its multiplicity `m` and the number `l` of
//! `h` labels it carries. Equivalently a generator is a commutative formal
//! product of symbols `e(a,b)` and `h(a,b)`; that is also the text syntax.

mod factor;
mod generator;
mod walk;

pub use factor::{enumerate_factorizations, Factorizations};
pub use generator::{ConvexGenerator, Direction, LabeledEdge};
pub(crate) use walk::{directions_within, walk_paths, PathState, Walk};

use crate::error::Result;

/// Every convex generator (`h` labels at most once per edge, never on
/// axis-parallel edges) whose ECH index equals `index`, in canonical order.
///
/// The set is finite: an index `I` path has `x, y ≤ I`.
pub fn generators_with_index(index: u64) -> Vec<ConvexGenerator> {
    let bound = index as i64;
    let dirs = directions_within(bound, bound);
    let mut out = Vec::new();
    if index == 0 {
        out.push(ConvexGenerator::one());
    }
    let costs = vec![0i64; dirs.len()];
    walk_paths(&dirs, &costs, &mut |state: &PathState<i64>| {
        let slack = 2 * (state.lattice_points - 1) - state.nonaxis_edges as i64;
        if slack > bound {
            return Walk::Prune;
        }
        let h = 2 * (state.lattice_points - 1) - bound;
        if h >= 0 && h <= state.nonaxis_edges as i64 {
            out.extend(state.labelings(&dirs, h as usize));
        }
        Walk::Descend
    });
    out.sort();
    out
}

/// Parses a formal product; see [`ConvexGenerator::parse`].
pub fn parse_product(text: &str, extended: bool) -> Result<ConvexGenerator> {
    ConvexGenerator::parse(text, extended)
}

/// Canonical formal-product text of a generator.
pub fn format_product(gen: &ConvexGenerator) -> String {
    gen.to_string()
}
