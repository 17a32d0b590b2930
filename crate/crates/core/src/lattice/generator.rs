use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Primitive edge direction `(a, b)`; the edge itself travels along
/// `(a, −b)`. `(1, 0)` is horizontal, `(0, 1)` vertical.
///
/// Directions are ordered by steepness `b/a`, horizontal first and vertical
/// last, which is the order in which the edges of a convex path occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction {
    a: u64,
    b: u64,
}

impl Direction {
    pub const HORIZONTAL: Direction = Direction { a: 1, b: 0 };
    pub const VERTICAL: Direction = Direction { a: 0, b: 1 };

    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(Error::InvalidEdge("direction (0,0)".into()));
        }
        if a.gcd(&b) != 1 {
            return Err(Error::InvalidEdge(format!("direction ({a},{b}) is not primitive")));
        }
        Ok(Direction { a, b })
    }

    /// `(a, b)` scaled down by their gcd, with the gcd.
    pub fn primitive(a: u64, b: u64) -> Result<(Self, u64)> {
        let g = a.gcd(&b);
        if g == 0 {
            return Err(Error::InvalidEdge("zero displacement".into()));
        }
        Ok((Direction { a: a / g, b: b / g }, g))
    }

    pub fn a(self) -> u64 {
        self.a
    }

    pub fn b(self) -> u64 {
        self.b
    }

    pub fn is_axis(self) -> bool {
        self.a == 0 || self.b == 0
    }
}

impl Ord for Direction {
    fn cmp(&self, other: &Self) -> Ordering {
        // b1/a1 vs b2/a2 without division; a = 0 acts as +infinity.
        let lhs = u128::from(self.b) * u128::from(other.a);
        let rhs = u128::from(other.b) * u128::from(self.a);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Direction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One edge: direction, multiplicity `m ≥ 1`, and `l ≤ m` labels `h`.
/// As a formal product this is `e(a,b)^(m−l) h(a,b)^l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledEdge {
    pub dir: Direction,
    pub mult: u64,
    pub hcount: u64,
}

impl LabeledEdge {
    pub fn elliptic(dir: Direction, mult: u64) -> Self {
        LabeledEdge { dir, mult, hcount: 0 }
    }

    pub fn new(dir: Direction, mult: u64, hcount: u64) -> Self {
        LabeledEdge { dir, mult, hcount }
    }

    /// Exponent of `e(a,b)` in the formal product.
    pub fn ecount(&self) -> u64 {
        self.mult - self.hcount
    }
}

/// A convex generator, or an extended one when `extended` is set (then an
/// edge may carry up to `m` labels `h`).
///
/// Equality, hashing and ordering look only at the edges, so a generator
/// compares equal to its extended counterpart.
#[derive(Debug, Clone)]
pub struct ConvexGenerator {
    edges: Vec<LabeledEdge>,
    extended: bool,
}

impl ConvexGenerator {
    /// The empty product `1`: no edges, the path is the origin.
    pub fn one() -> Self {
        ConvexGenerator { edges: Vec::new(), extended: false }
    }

    /// Validates raw edges and returns them in canonical order.
    pub fn new(edges: impl IntoIterator<Item = LabeledEdge>, extended: bool) -> Result<Self> {
        let mut edges: Vec<LabeledEdge> = edges.into_iter().collect();
        edges.sort_by_key(|e| e.dir);
        for pair in edges.windows(2) {
            if pair[0].dir == pair[1].dir {
                let d = pair[0].dir;
                return Err(Error::InvalidEdge(format!("duplicate direction ({},{})", d.a, d.b)));
            }
        }
        for e in &edges {
            let (a, b) = (e.dir.a, e.dir.b);
            if e.mult == 0 {
                return Err(Error::InvalidEdge(format!("zero multiplicity on ({a},{b})")));
            }
            if e.hcount > e.mult {
                return Err(Error::InvalidEdge(format!(
                    "{} h labels on ({a},{b}) exceed multiplicity {}",
                    e.hcount, e.mult
                )));
            }
            if e.dir.is_axis() && e.hcount > 0 {
                return Err(Error::InvalidEdge(format!(
                    "axis-parallel edge ({a},{b}) can only be labeled e"
                )));
            }
            if !extended && e.hcount > 1 {
                return Err(Error::InvalidEdge(format!(
                    "factor h({a},{b}) repeated in a convex generator"
                )));
            }
        }
        Ok(ConvexGenerator { edges, extended })
    }

    /// Skips validation; callers guarantee canonical, valid edges.
    pub(crate) fn from_canonical(edges: Vec<LabeledEdge>, extended: bool) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0].dir < w[1].dir));
        ConvexGenerator { edges, extended }
    }

    /// `e(a,b)^m`.
    pub fn elliptic_power(a: u64, b: u64, m: u64) -> Result<Self> {
        if m == 0 {
            return Ok(Self::one());
        }
        Self::new([LabeledEdge::elliptic(Direction::new(a, b)?, m)], false)
    }

    /// `e(1,0)^x e(0,1)^y`, the rectangle path.
    pub fn rectangle(x: u64, y: u64) -> Self {
        let mut edges = Vec::new();
        if x > 0 {
            edges.push(LabeledEdge::elliptic(Direction::HORIZONTAL, x));
        }
        if y > 0 {
            edges.push(LabeledEdge::elliptic(Direction::VERTICAL, y));
        }
        Self::from_canonical(edges, false)
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn is_one(&self) -> bool {
        self.edges.is_empty()
    }

    /// True when no edge is labeled `h`.
    pub fn is_all_elliptic(&self) -> bool {
        self.edges.iter().all(|e| e.hcount == 0)
    }

    /// Same edges, every label reset to `e`.
    pub fn underlying_path(&self) -> Self {
        let edges = self.edges.iter().map(|e| LabeledEdge::elliptic(e.dir, e.mult)).collect();
        Self::from_canonical(edges, false)
    }

    /// `x(Λ)`: horizontal extent.
    pub fn x(&self) -> u64 {
        self.edges.iter().map(|e| e.mult * e.dir.a).sum()
    }

    /// `y(Λ)`: vertical extent.
    pub fn y(&self) -> u64 {
        self.edges.iter().map(|e| e.mult * e.dir.b).sum()
    }

    pub fn endpoints(&self) -> (u64, u64) {
        (self.x(), self.y())
    }

    /// `m(Λ)`: lattice points on the path minus one.
    pub fn total_multiplicity(&self) -> u64 {
        self.edges.iter().map(|e| e.mult).sum()
    }

    /// `h(Λ)`: total exponent of the `h` factors.
    pub fn h_count(&self) -> u64 {
        self.edges.iter().map(|e| e.hcount).sum()
    }

    /// `e(Λ)`: number of distinct `e` factors.
    pub fn e_distinct(&self) -> u64 {
        self.edges.iter().filter(|e| e.hcount < e.mult).count() as u64
    }

    /// Twice the area enclosed by the path and the axes (shoelace).
    pub fn twice_area(&self) -> u64 {
        // Walk from (0, y) to (x, 0); each edge adds its trapezoid dx·(y0+y1).
        let mut height = self.y();
        let mut twice = 0u64;
        for e in &self.edges {
            let dx = e.mult * e.dir.a;
            let next = height - e.mult * e.dir.b;
            twice += dx * (height + next);
            height = next;
        }
        twice
    }

    /// Exact area under the path. The empty generator has no region.
    pub fn area_under(&self) -> Result<Rational> {
        if self.is_one() {
            return Err(Error::EmptyGenerator);
        }
        Ok(Rational::new(self.twice_area().into(), 2u64.into()))
    }

    /// `L(Λ)`: lattice points in the closed region bounded by the path and
    /// the axes, via Pick's formula `2·Area = 2L − m − x − y − 2`.
    pub fn lattice_count(&self) -> u64 {
        let boundary = self.total_multiplicity() + self.x() + self.y();
        (self.twice_area() + boundary + 2) / 2
    }

    /// `L(Λ)` again, by summing column heights. O(x) instead of O(edges);
    /// kept as an independent cross-check of [`Self::lattice_count`].
    pub fn lattice_count_by_columns(&self) -> u64 {
        let mut total = 0u64;
        let (mut x0, mut y0) = (0u64, self.y());
        let mut column = 0u64;
        for e in &self.edges {
            let (a, b) = (e.dir.a, e.dir.b);
            let x1 = x0 + e.mult * a;
            // Columns in [x0, x1) take their height from this edge; a
            // vertical drop can only sit at the last column.
            while column < x1 {
                let run = column - x0;
                // y0 − b·run/a, floored.
                total += y0 - (b * run).div_ceil(a) + 1;
                column += 1;
            }
            x0 = x1;
            y0 -= e.mult * b;
        }
        // Last column x = x(Λ): its top is the top of the final vertical
        // segment, or the endpoint itself.
        let last_top = match self.edges.last() {
            Some(e) if e.dir == Direction::VERTICAL => e.mult,
            _ => 0,
        };
        total + last_top + 1
    }

    /// `I(Λ) = 2(L(Λ) − 1) − h(Λ)`.
    pub fn ech_index(&self) -> u64 {
        let twice = 2 * (self.lattice_count() - 1);
        let h = self.h_count();
        debug_assert!(twice >= h);
        twice - h
    }

    /// `J₀ = I − 2x − 2y − e(Λ)`.
    pub fn j_zero(&self) -> i64 {
        self.ech_index() as i64
            - 2 * self.x() as i64
            - 2 * self.y() as i64
            - self.e_distinct() as i64
    }

    /// True if some direction carries an `e` factor in both.
    pub fn shares_elliptic(&self, other: &Self) -> bool {
        self.common_directions(other).any(|(p, q)| p.ecount() > 0 && q.ecount() > 0)
    }

    /// True if some direction carries an `h` factor in both.
    pub fn shares_hyperbolic(&self, other: &Self) -> bool {
        self.common_directions(other).any(|(p, q)| p.hcount > 0 && q.hcount > 0)
    }

    fn common_directions<'a>(
        &'a self,
        other: &'a Self,
    ) -> impl Iterator<Item = (&'a LabeledEdge, &'a LabeledEdge)> + 'a {
        // Both edge lists are sorted by direction: merge-join.
        let mut i = 0;
        let mut j = 0;
        std::iter::from_fn(move || {
            while i < self.edges.len() && j < other.edges.len() {
                let (p, q) = (&self.edges[i], &other.edges[j]);
                match p.dir.cmp(&q.dir) {
                    Ordering::Less => i += 1,
                    Ordering::Greater => j += 1,
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        return Some((p, q));
                    }
                }
            }
            None
        })
    }

    /// Concatenation of formal products. In convex mode the factors may not
    /// share an `h`; the result is extended if either input is.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let extended = self.extended || other.extended;
        if !extended {
            if let Some((p, _)) =
                self.common_directions(other).find(|(p, q)| p.hcount > 0 && q.hcount > 0)
            {
                return Err(Error::SharedHyperbolic(p.dir.a, p.dir.b));
            }
        }
        let mut merged: BTreeMap<Direction, (u64, u64)> = BTreeMap::new();
        for e in self.edges.iter().chain(&other.edges) {
            let slot = merged.entry(e.dir).or_default();
            slot.0 += e.mult;
            slot.1 += e.hcount;
        }
        let edges =
            merged.into_iter().map(|(dir, (mult, hcount))| LabeledEdge { dir, mult, hcount }).collect();
        Ok(Self::from_canonical(edges, extended))
    }

    /// Product of a sequence of generators; `1` for the empty sequence.
    pub fn product_all<'a>(gens: impl IntoIterator<Item = &'a ConvexGenerator>) -> Result<Self> {
        gens.into_iter().try_fold(Self::one(), |acc, g| acc.product(g))
    }

    /// Parses the formal-product grammar
    /// `term := "1" | factor (" " factor)*`,
    /// `factor := ("e"|"h") "(" int "," int ")" ["^" int]`.
    /// Repeated factors multiply; repeated `h` is an error unless `extended`.
    pub fn parse(text: &str, extended: bool) -> Result<Self> {
        let s = text.trim();
        if s == "1" {
            return Ok(ConvexGenerator { edges: Vec::new(), extended });
        }
        if s.is_empty() {
            return Err(Error::Parse("empty product (write \"1\")".into()));
        }
        let mut counts: BTreeMap<Direction, (u64, u64)> = BTreeMap::new();
        let mut rest = s;
        while !rest.is_empty() {
            let (label, dir, power, tail) = parse_factor(rest)?;
            let slot = counts.entry(dir).or_default();
            if label == 'e' {
                slot.0 += power;
            } else {
                if !extended && (slot.1 > 0 || power > 1) {
                    return Err(Error::InvalidEdge(format!(
                        "factor h({},{}) repeated in a convex generator",
                        dir.a, dir.b
                    )));
                }
                slot.1 += power;
            }
            rest = tail.trim_start();
        }
        let edges = counts
            .into_iter()
            .map(|(dir, (e, h))| LabeledEdge { dir, mult: e + h, hcount: h });
        Self::new(edges, extended)
    }
}

fn parse_factor(s: &str) -> Result<(char, Direction, u64, &str)> {
    let bad = |why: &str| Error::Parse(format!("{why} at {s:?}"));
    let label = s.chars().next().ok_or_else(|| bad("expected factor"))?;
    if label != 'e' && label != 'h' {
        return Err(bad("expected 'e' or 'h'"));
    }
    let body = s[1..].strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
    let close = body.find(')').ok_or_else(|| bad("expected ')'"))?;
    let (a, b) = body[..close].split_once(',').ok_or_else(|| bad("expected 'a,b'"))?;
    let a: u64 = a.trim().parse().map_err(|_| bad("bad integer"))?;
    let b: u64 = b.trim().parse().map_err(|_| bad("bad integer"))?;
    let mut tail = &body[close + 1..];
    let mut power = 1;
    if let Some(exp) = tail.strip_prefix('^') {
        let end = exp.find(|c: char| !c.is_ascii_digit()).unwrap_or(exp.len());
        power = exp[..end].parse().map_err(|_| bad("bad exponent"))?;
        if power == 0 {
            return Err(Error::InvalidEdge("zero exponent".into()));
        }
        tail = &exp[end..];
    }
    if !tail.is_empty() && !tail.starts_with(char::is_whitespace) {
        return Err(bad("expected whitespace between factors"));
    }
    Ok((label, Direction::new(a, b)?, power, tail))
}

impl fmt::Display for ConvexGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut factor = |f: &mut fmt::Formatter<'_>, label: char, d: Direction, k: u64| {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{label}({},{})", d.a, d.b)?;
            if k > 1 {
                write!(f, "^{k}")?;
            }
            Ok(())
        };
        for e in &self.edges {
            if e.ecount() > 0 {
                factor(f, 'e', e.dir, e.ecount())?;
            }
            if e.hcount > 0 {
                factor(f, 'h', e.dir, e.hcount)?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for ConvexGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, false)
    }
}

impl PartialEq for ConvexGenerator {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges
    }
}

impl Eq for ConvexGenerator {}

impl Hash for ConvexGenerator {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.edges.hash(state);
    }
}

impl Ord for ConvexGenerator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges.cmp(&other.edges)
    }
}

impl PartialOrd for ConvexGenerator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
