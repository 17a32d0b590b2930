//! Unordered product decompositions `Λ = Λ₁⋯Λₙ` into nonempty factors.
//!
//! A generator is a multiset of atoms (one `e` or `h` symbol per unit of
//! multiplicity). A decomposition into `n` factors is a multiset partition
//! into `n` nonempty blocks; we emit each exactly once as the sequence of
//! blocks sorted in non-increasing lexicographic order of their atom-count
//! vectors. The enumeration keeps only the current partial partition on a
//! stack, so it runs in memory linear in `n`.

use super::generator::{ConvexGenerator, Direction, LabeledEdge};

#[derive(Debug, Clone, Copy)]
struct Atom {
    dir: Direction,
    hyperbolic: bool,
}

#[derive(Debug, Clone)]
struct Level {
    part: Vec<u64>,
    before: Vec<u64>,
}

/// Iterator over the `n`-factor decompositions of a generator, in canonical
/// order (first factor lexicographically largest).
#[derive(Debug, Clone)]
pub struct Factorizations {
    atoms: Vec<Atom>,
    total: Vec<u64>,
    n: usize,
    extended: bool,
    levels: Vec<Level>,
    pinned_first: bool,
    started: bool,
    done: bool,
}

/// Decompositions of `gen` into exactly `n` nonempty factors.
pub fn enumerate_factorizations(gen: &ConvexGenerator, n: usize) -> Factorizations {
    Factorizations::new(gen, n)
}

impl Factorizations {
    pub fn new(gen: &ConvexGenerator, n: usize) -> Self {
        let mut atoms = Vec::new();
        let mut total = Vec::new();
        for e in gen.edges() {
            if e.ecount() > 0 {
                atoms.push(Atom { dir: e.dir, hyperbolic: false });
                total.push(e.ecount());
            }
            if e.hcount > 0 {
                atoms.push(Atom { dir: e.dir, hyperbolic: true });
                total.push(e.hcount);
            }
        }
        let size: u64 = total.iter().sum();
        Factorizations {
            atoms,
            total,
            n,
            extended: gen.is_extended(),
            levels: Vec::new(),
            pinned_first: false,
            started: false,
            done: n == 0 || size < n as u64,
        }
    }

    /// Restricts the stream to decompositions whose first (largest) factor is
    /// `first`. The streams for the distinct first factors partition the full
    /// stream, so a search can be split across workers this way.
    pub fn with_first_factor(gen: &ConvexGenerator, n: usize, first: &ConvexGenerator) -> Self {
        let mut it = Self::new(gen, n);
        if it.done {
            return it;
        }
        let Some(part) = it.counts_of(first) else {
            it.done = true;
            return it;
        };
        if part.iter().all(|&c| c == 0) || (n == 1 && part != it.total) {
            it.done = true;
            return it;
        }
        it.levels.push(Level { part, before: it.total.clone() });
        it.pinned_first = true;
        it
    }

    /// Distinct factors that can open a decomposition, in stream order.
    pub fn first_factors(gen: &ConvexGenerator, n: usize) -> Vec<ConvexGenerator> {
        let mut out: Vec<ConvexGenerator> = Vec::new();
        for f in Self::new(gen, n) {
            if out.last() != Some(&f[0]) {
                out.push(f[0].clone());
            }
        }
        out
    }

    fn counts_of(&self, factor: &ConvexGenerator) -> Option<Vec<u64>> {
        let mut part = vec![0u64; self.atoms.len()];
        for e in factor.edges() {
            for (want, hyperbolic) in [(e.ecount(), false), (e.hcount, true)] {
                if want == 0 {
                    continue;
                }
                let k = self.atoms.iter().position(|a| a.dir == e.dir && a.hyperbolic == hyperbolic)?;
                if want > self.total[k] {
                    return None;
                }
                part[k] = want;
            }
        }
        Some(part)
    }

    fn factor(&self, part: &[u64]) -> ConvexGenerator {
        let mut edges: Vec<LabeledEdge> = Vec::new();
        for (atom, &c) in self.atoms.iter().zip(part) {
            if c == 0 {
                continue;
            }
            match edges.last_mut() {
                Some(last) if last.dir == atom.dir => {
                    last.mult += c;
                    if atom.hyperbolic {
                        last.hcount += c;
                    }
                }
                _ => edges.push(LabeledEdge {
                    dir: atom.dir,
                    mult: c,
                    hcount: if atom.hyperbolic { c } else { 0 },
                }),
            }
        }
        ConvexGenerator::from_canonical(edges, self.extended)
    }

    fn remaining_after(&self, k: usize) -> Vec<u64> {
        let l = &self.levels[k];
        l.before.iter().zip(&l.part).map(|(b, p)| b - p).collect()
    }

    /// Pushes levels until the partition is complete; false on a dead end.
    fn fill(&mut self) -> bool {
        while self.levels.len() < self.n {
            let k = self.levels.len();
            let before = if k == 0 { self.total.clone() } else { self.remaining_after(k - 1) };
            let bound = if k == 0 { self.total.clone() } else { self.levels[k - 1].part.clone() };
            let left = self.n - k;
            let size: u64 = before.iter().sum();
            if size < left as u64 {
                return false;
            }
            let part = if left == 1 {
                if before > bound {
                    return false;
                }
                before.clone()
            } else {
                let p = largest_below(&before, &bound);
                if p.iter().all(|&c| c == 0) {
                    return false;
                }
                p
            };
            self.levels.push(Level { part, before });
        }
        true
    }

    /// Moves the deepest level with an alternative to its next part.
    fn step(&mut self) -> bool {
        let floor = usize::from(self.pinned_first);
        while self.levels.len() > floor {
            let k = self.levels.len() - 1;
            let forced = k + 1 == self.n;
            if !forced {
                let level = &mut self.levels[k];
                if predecessor(&mut level.part, &level.before) {
                    return true;
                }
            }
            self.levels.pop();
        }
        false
    }
}

impl Iterator for Factorizations {
    type Item = Vec<ConvexGenerator>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut ready = false;
        if !self.started {
            self.started = true;
            ready = self.fill();
        }
        while !ready {
            if !self.step() {
                self.done = true;
                return None;
            }
            ready = self.fill();
        }
        Some(self.levels.iter().map(|l| self.factor(&l.part)).collect())
    }
}

/// Lexicographically largest `v` with `0 ≤ v ≤ avail` componentwise and
/// `v ≤ bound` lexicographically.
fn largest_below(avail: &[u64], bound: &[u64]) -> Vec<u64> {
    let mut tight = true;
    avail
        .iter()
        .zip(bound)
        .map(|(&a, &b)| {
            if tight {
                if a < b {
                    tight = false;
                }
                a.min(b)
            } else {
                a
            }
        })
        .collect()
}

/// Replaces `v` with the next smaller nonzero vector in the box
/// `[0, avail]`, lexicographically. False when `v` was the smallest.
fn predecessor(v: &mut [u64], avail: &[u64]) -> bool {
    let Some(i) = v.iter().rposition(|&c| c > 0) else {
        return false;
    };
    v[i] -= 1;
    v[i + 1..].copy_from_slice(&avail[i + 1..]);
    v.iter().any(|&c| c > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> ConvexGenerator {
        s.parse().unwrap()
    }

    fn strings(gen: &str, n: usize) -> Vec<Vec<String>> {
        enumerate_factorizations(&g(gen), n)
            .map(|f| f.iter().map(ToString::to_string).collect())
            .collect()
    }

    #[test]
    fn single_split() {
        assert_eq!(strings("e(1,1)^2", 2), vec![vec!["e(1,1)", "e(1,1)"]]);
        assert!(strings("e(1,1)^2", 3).is_empty());
        assert_eq!(strings("e(1,1)^2", 1), vec![vec!["e(1,1)^2"]]);
    }

    #[test]
    fn nine_into_three_contains_equal_cubes() {
        let all = strings("e(1,1)^9", 3);
        // Partitions of 9 into exactly 3 parts.
        assert_eq!(all.len(), 7);
        assert!(all.contains(&vec!["e(1,1)^3".into(), "e(1,1)^3".into(), "e(1,1)^3".into()]));
    }

    #[test]
    fn vertical_factors_can_separate() {
        let all = strings("e(1,0)^3 e(0,1)^2", 2);
        assert!(all.contains(&vec!["e(1,0)^2 e(0,1)".into(), "e(1,0) e(0,1)".into()]));
        assert!(all.contains(&vec!["e(1,0)^3 e(0,1)".into(), "e(0,1)".into()]));
    }

    #[test]
    fn products_reassemble() {
        let gen = g("e(1,0)^2 h(2,1) e(1,1)^2 e(0,1)");
        for n in 1..=gen.total_multiplicity() as usize {
            for f in enumerate_factorizations(&gen, n) {
                assert_eq!(f.len(), n);
                assert!(f.iter().all(|p| !p.is_one()));
                assert_eq!(ConvexGenerator::product_all(&f).unwrap(), gen);
            }
        }
    }

    #[test]
    fn first_factor_split_partitions_the_stream() {
        let gen = g("e(1,0)^3 e(1,1)^2 e(0,1)^2");
        for n in 1..=4 {
            let full: Vec<_> = enumerate_factorizations(&gen, n).collect();
            let mut joined = Vec::new();
            for first in Factorizations::first_factors(&gen, n) {
                joined.extend(Factorizations::with_first_factor(&gen, n, &first));
            }
            assert_eq!(full, joined, "n = {n}");
        }
    }

    #[test]
    fn degenerate_requests_are_empty() {
        assert_eq!(enumerate_factorizations(&g("e(1,1)"), 0).count(), 0);
        assert_eq!(enumerate_factorizations(&g("1"), 1).count(), 0);
    }
}
