//! Depth-first enumeration of convex integral paths.
//!
//! Paths are grown one edge at a time in canonical slope order. The running
//! lattice count is kept translation-free: appending an edge at the
//! bottom-right end lifts the old path by the edge's drop, so we track the
//! area between the path and its bounding box instead of the area under it.
//! `L` then strictly increases with every appended unit of multiplicity,
//! which is what makes pruning on `L` (and on any cost that grows with the
//! edges) sound.

use std::ops::Add;

use num_integer::Integer;

use super::generator::{ConvexGenerator, Direction, LabeledEdge};

/// Visitor verdict for the path just reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Walk {
    /// Explore extensions and the next multiplicity of the last edge.
    Descend,
    /// Dead end: skip extensions and every larger multiplicity of the last
    /// edge. Only valid for conditions monotone in the path.
    Prune,
    /// Abort the whole walk.
    Stop,
}

#[derive(Debug, Clone)]
pub(crate) struct PathState<T> {
    /// `(direction index, multiplicity)` in slope order.
    pub edges: Vec<(usize, u64)>,
    pub x: i64,
    pub y: i64,
    pub multiplicity: i64,
    pub lattice_points: i64,
    pub nonaxis_edges: u32,
    pub cost: T,
    /// Twice the area between the path and the top edge of its bounding box.
    twice_gap: i64,
}

impl<T> PathState<T> {
    pub fn generator(&self, dirs: &[Direction]) -> ConvexGenerator {
        let edges =
            self.edges.iter().map(|&(i, m)| LabeledEdge::elliptic(dirs[i], m)).collect();
        ConvexGenerator::from_canonical(edges, false)
    }

    /// Every way of putting exactly `h` labels `h` on distinct non-axis edges.
    pub fn labelings(&self, dirs: &[Direction], h: usize) -> Vec<ConvexGenerator> {
        let base: Vec<LabeledEdge> =
            self.edges.iter().map(|&(i, m)| LabeledEdge::elliptic(dirs[i], m)).collect();
        let slots: Vec<usize> = (0..base.len()).filter(|&k| !base[k].dir.is_axis()).collect();
        let mut out = Vec::new();
        if h > slots.len() {
            return out;
        }
        let mut pick: Vec<usize> = (0..h).collect();
        loop {
            let mut edges = base.clone();
            for &p in &pick {
                edges[slots[p]].hcount = 1;
            }
            out.push(ConvexGenerator::from_canonical(edges, false));
            // Next h-combination of the slots, lexicographic.
            let Some(i) = (0..h).rev().find(|&i| pick[i] < slots.len() - h + i) else {
                break;
            };
            pick[i] += 1;
            for k in i + 1..h {
                pick[k] = pick[k - 1] + 1;
            }
        }
        out
    }
}

/// All primitive directions with `a ≤ max_a`, `b ≤ max_b`, in slope order.
pub(crate) fn directions_within(max_a: i64, max_b: i64) -> Vec<Direction> {
    let max_a = max_a.max(0) as u64;
    let max_b = max_b.max(0) as u64;
    let mut dirs = Vec::new();
    for a in 0..=max_a {
        for b in 0..=max_b {
            if a.gcd(&b) == 1 {
                dirs.push(Direction::new(a, b).expect("coprime"));
            }
        }
    }
    dirs.sort();
    dirs
}

/// Walks every nonempty path over `dirs` (each edge a distinct direction,
/// in slope order) that the visitor does not prune. `unit_costs[i]` is the
/// cost of one unit of multiplicity along `dirs[i]`; the state's `cost` is
/// the running total. Returns `false` if the visitor stopped the walk.
pub(crate) fn walk_paths<T, F>(dirs: &[Direction], unit_costs: &[T], visit: &mut F) -> bool
where
    T: Clone + Add<Output = T> + Default,
    F: FnMut(&PathState<T>) -> Walk,
{
    assert_eq!(dirs.len(), unit_costs.len());
    let mut state = PathState {
        edges: Vec::new(),
        x: 0,
        y: 0,
        multiplicity: 0,
        lattice_points: 1,
        nonaxis_edges: 0,
        cost: T::default(),
        twice_gap: 0,
    };
    extend(dirs, unit_costs, 0, &mut state, visit)
}

fn extend<T, F>(
    dirs: &[Direction],
    unit_costs: &[T],
    start: usize,
    state: &mut PathState<T>,
    visit: &mut F,
) -> bool
where
    T: Clone + Add<Output = T> + Default,
    F: FnMut(&PathState<T>) -> Walk,
{
    let saved = (state.x, state.y, state.multiplicity, state.twice_gap, state.nonaxis_edges);
    let saved_cost = state.cost.clone();
    for j in start..dirs.len() {
        let (a, b) = (dirs[j].a() as i64, dirs[j].b() as i64);
        let (x0, y0, m0, gap0, na0) = saved;
        state.nonaxis_edges = na0 + u32::from(!dirs[j].is_axis());
        state.edges.push((j, 0));
        let mut cost = saved_cost.clone();
        let mut m = 0i64;
        let keep_going = loop {
            m += 1;
            cost = cost + unit_costs[j].clone();
            state.edges.last_mut().expect("pushed").1 = m as u64;
            state.x = x0 + m * a;
            state.y = y0 + m * b;
            state.multiplicity = m0 + m;
            state.twice_gap = gap0 + m * a * (2 * y0 + m * b);
            let twice_area = 2 * state.x * state.y - state.twice_gap;
            state.lattice_points =
                (twice_area + state.multiplicity + state.x + state.y + 2) / 2;
            state.cost = cost.clone();
            match visit(state) {
                Walk::Stop => break false,
                Walk::Prune => break true,
                Walk::Descend => {
                    if !extend(dirs, unit_costs, j + 1, state, visit) {
                        break false;
                    }
                }
            }
        };
        state.edges.pop();
        if !keep_going {
            return false;
        }
    }
    state.x = saved.0;
    state.y = saved.1;
    state.multiplicity = saved.2;
    state.twice_gap = saved.3;
    state.nonaxis_edges = saved.4;
    state.cost = saved_cost;
    true
}
