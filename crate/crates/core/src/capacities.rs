//! ECH capacities `c_k(X_Ω) = min { A_Ω(Λ) : L(Λ) = k + 1 }` over convex
//! integral paths, minimal generators, and closed-form checks.
//!
//! All searches share one engine: a depth-first walk over paths in slope
//! order with two monotone prunes, on the lattice count and on the action.
//! Actions are rescaled to integers by a common denominator before the walk,
//! so comparisons in the hot loop are plain integer comparisons (`i128`
//! when everything fits, `BigInt` otherwise).

use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::domains::ToricDomain;
use crate::error::{Error, Result};
use crate::lattice::{directions_within, walk_paths, ConvexGenerator, Direction, LabeledEdge, PathState, Walk};
use crate::rational::Rational;

/// Default cap on visited path nodes for one capacity query.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000;

/// Counts visited search nodes against a fixed limit.
#[derive(Debug, Clone)]
pub struct NodeBudget {
    limit: u64,
    used: u64,
}

impl NodeBudget {
    pub fn new(limit: u64) -> Self {
        NodeBudget { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Charges one node; false once the limit is passed.
    pub fn tick(&mut self) -> bool {
        self.used += 1;
        self.used <= self.limit
    }

    pub fn exceeded(&self) -> Error {
        Error::BudgetExceeded { budget: self.limit }
    }
}

impl Default for NodeBudget {
    fn default() -> Self {
        NodeBudget::new(DEFAULT_NODE_BUDGET)
    }
}

/// Bounds that make a path search finite: a path with action at most
/// `action_cap` has `x ≤ x_cap` and `y ≤ y_cap`, because the domain contains
/// the corner rectangle `[0, w] × [0, h]` and so `A_Ω(Λ) ≥ h·x + w·y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSearchBudget {
    pub action_cap: Rational,
    pub x_cap: u64,
    pub y_cap: u64,
}

impl PathSearchBudget {
    pub fn new(domain: &ToricDomain, action_cap: Rational) -> Self {
        let (w, h) = domain.inscribed_rectangle();
        let floor = |r: Rational| r.floor().to_integer().to_u64().unwrap_or(u64::MAX);
        PathSearchBudget {
            x_cap: floor(&action_cap / &h),
            y_cap: floor(&action_cap / &w),
            action_cap,
        }
    }
}

pub(crate) trait Cost: Clone + Ord + Add<Output = Self> + Default {
    fn from_big(n: &BigInt) -> Option<Self>;
}

impl Cost for i128 {
    fn from_big(n: &BigInt) -> Option<Self> {
        // Leave headroom so sums of a few hundred terms cannot overflow.
        n.to_i128().filter(|v| v.abs() < 1i128 << 100)
    }
}

impl Cost for BigInt {
    fn from_big(n: &BigInt) -> Option<Self> {
        Some(n.clone())
    }
}

/// Rational costs and cap over a common denominator.
pub(crate) struct ScaledCosts {
    denominator: BigInt,
    costs: Vec<BigInt>,
    cap: BigInt,
}

impl ScaledCosts {
    pub fn new(costs: &[Rational], cap: &Rational) -> Self {
        let denominator = costs
            .iter()
            .chain(std::iter::once(cap))
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let scale = |r: &Rational| (r * Rational::from_integer(denominator.clone())).to_integer();
        ScaledCosts { costs: costs.iter().map(scale).collect(), cap: scale(cap), denominator }
    }

    pub fn unscale<T: Into<BigInt>>(&self, v: T) -> Rational {
        Rational::new(v.into(), self.denominator.clone())
    }

    fn typed<T: Cost>(&self) -> Option<(Vec<T>, T)> {
        let costs = self.costs.iter().map(T::from_big).collect::<Option<Vec<T>>>()?;
        Some((costs, T::from_big(&self.cap)?))
    }
}

/// Unit action `h_Ω(b, a)` of each direction.
fn unit_actions(domain: &ToricDomain, dirs: &[Direction]) -> Vec<Rational> {
    dirs.iter().map(|d| domain.support(d.b(), d.a())).collect()
}

/// Result of a minimum search over paths with a fixed lattice count.
struct Minimum {
    value: Rational,
    argmin: Vec<ConvexGenerator>,
}

/// All-`e` paths with `L = target` and action `≤ cap`: returns the minimum
/// action and every path attaining it, or `None` if no path is under the cap.
fn minimize_with_cap(
    domain: &ToricDomain,
    target: u64,
    cap: &Rational,
    budget: &mut NodeBudget,
) -> Result<Option<Minimum>> {
    let bounds = PathSearchBudget::new(domain, cap.clone());
    let limit = target.saturating_sub(1);
    let dirs = directions_within(
        bounds.x_cap.min(limit) as i64,
        bounds.y_cap.min(limit) as i64,
    );
    let scaled = ScaledCosts::new(&unit_actions(domain, &dirs), cap);
    match scaled.typed::<i128>() {
        Some((costs, cap)) => minimize_typed(&dirs, &costs, cap, target, &scaled, budget),
        None => {
            let (costs, cap) = scaled.typed::<BigInt>().expect("BigInt always fits");
            minimize_typed(&dirs, &costs, cap, target, &scaled, budget)
        }
    }
}

fn minimize_typed<T: Cost + Into<BigInt>>(
    dirs: &[Direction],
    costs: &[T],
    mut cap: T,
    target: u64,
    scaled: &ScaledCosts,
    budget: &mut NodeBudget,
) -> Result<Option<Minimum>> {
    let target = target as i64;
    // Cheapest single unit among directions at or after each index.
    let mut cheapest_from: Vec<Option<T>> = vec![None; dirs.len() + 1];
    for j in (0..dirs.len()).rev() {
        cheapest_from[j] = Some(match &cheapest_from[j + 1] {
            Some(c) if *c < costs[j] => c.clone(),
            _ => costs[j].clone(),
        });
    }
    let mut best: Option<T> = None;
    let mut argmin: Vec<ConvexGenerator> = Vec::new();
    let mut out_of_budget = false;
    walk_paths(dirs, costs, &mut |s: &PathState<T>| {
        if !budget.tick() {
            out_of_budget = true;
            return Walk::Stop;
        }
        if s.lattice_points > target || s.cost > cap {
            return Walk::Prune;
        }
        if s.lattice_points == target {
            let gen = s.generator(dirs);
            match &best {
                Some(b) if s.cost == *b => argmin.push(gen),
                _ => {
                    best = Some(s.cost.clone());
                    cap = s.cost.clone();
                    argmin = vec![gen];
                }
            }
            // Any extension adds lattice points.
            return Walk::Prune;
        }
        // Reaching the target needs at least one more unit, either along the
        // last edge or along a later direction.
        let j = s.edges.last().expect("nonempty").0;
        let next = match &cheapest_from[j + 1] {
            Some(c) if *c < costs[j] => c.clone(),
            _ => costs[j].clone(),
        };
        if s.cost.clone() + next > cap {
            return Walk::Prune;
        }
        Walk::Descend
    });
    if out_of_budget {
        return Err(budget.exceeded());
    }
    Ok(best.map(|b| Minimum { value: scaled.unscale(b), argmin }))
}

/// Exact minimum of `A_Ω` over paths with `L = k + 1`, with every minimizer.
fn minimize(domain: &ToricDomain, k: u64, budget: &mut NodeBudget) -> Result<Minimum> {
    if k == 0 {
        return Ok(Minimum { value: Rational::zero(), argmin: vec![ConvexGenerator::one()] });
    }
    // c_1 = min(W, H) ≤ c_k, and e(1,0)^k or e(0,1)^k gives c_k ≤ k·min(W, H).
    let floor = domain.width().min(domain.height());
    let ceiling = &floor * Rational::from_integer(k.into());
    let mut cap = floor;
    loop {
        if cap > ceiling {
            cap = ceiling.clone();
        }
        if let Some(found) = minimize_with_cap(domain, k + 1, &cap, budget)? {
            return Ok(found);
        }
        assert!(cap < ceiling, "the axis path always fits under the ceiling");
        cap *= Rational::from_integer(2.into());
    }
}

/// `c_k(X_Ω)` with the default node budget.
pub fn capacity(domain: &ToricDomain, k: u64) -> Result<Rational> {
    capacity_with_budget(domain, k, &mut NodeBudget::default())
}

pub fn capacity_with_budget(domain: &ToricDomain, k: u64, budget: &mut NodeBudget) -> Result<Rational> {
    Ok(minimize(domain, k, budget)?.value)
}

/// The unique all-`e` minimizer of `A_Ω` among paths with `L = k + 1`, if
/// the minimum is attained exactly once; `None` on a tie.
pub fn find_minimal_generator(domain: &ToricDomain, k: u64) -> Result<Option<ConvexGenerator>> {
    find_minimal_generator_with_budget(domain, k, &mut NodeBudget::default())
}

pub fn find_minimal_generator_with_budget(
    domain: &ToricDomain,
    k: u64,
    budget: &mut NodeBudget,
) -> Result<Option<ConvexGenerator>> {
    let mut found = minimize(domain, k, budget)?;
    Ok(if found.argmin.len() == 1 { found.argmin.pop() } else { None })
}

/// Decides whether `gen` is minimal for `domain` by enumerating every path
/// with the same lattice count at action `≤ A_Ω(gen)`.
pub fn is_minimal(domain: &ToricDomain, gen: &ConvexGenerator, budget: &mut NodeBudget) -> Result<bool> {
    if !gen.is_all_elliptic() {
        return Ok(false);
    }
    if gen.is_one() {
        return Ok(true);
    }
    let cap = domain.action(gen);
    let found = minimize_with_cap(domain, gen.lattice_count(), &cap, budget)?;
    Ok(matches!(found, Some(m) if m.argmin.len() == 1 && m.argmin[0] == *gen))
}

/// Every convex generator (labels included) with ECH index `index` and
/// `A_Ω ≤ cap` that passes `keep`, paired with its action. `keep` sees the
/// underlying path's `(x, y)` and the number of `h` labels the index forces,
/// before any labeling is materialized.
pub fn generators_below(
    domain: &ToricDomain,
    index: u64,
    cap: &Rational,
    budget: &mut NodeBudget,
    keep: &mut dyn FnMut(u64, u64, u64) -> bool,
) -> Result<Vec<(ConvexGenerator, Rational)>> {
    let mut out = Vec::new();
    if index == 0 {
        if keep(0, 0, 0) {
            out.push((ConvexGenerator::one(), Rational::zero()));
        }
        return Ok(out);
    }
    let bounds = PathSearchBudget::new(domain, cap.clone());
    // x, y ≤ L − 1 ≤ index.
    let dirs = directions_within(bounds.x_cap.min(index) as i64, bounds.y_cap.min(index) as i64);
    let scaled = ScaledCosts::new(&unit_actions(domain, &dirs), cap);
    match scaled.typed::<i128>() {
        Some((costs, cap)) => {
            labeled_typed(&dirs, &costs, cap, index, &scaled, budget, keep, &mut out)?
        }
        None => {
            let (costs, cap) = scaled.typed::<BigInt>().expect("BigInt always fits");
            labeled_typed(&dirs, &costs, cap, index, &scaled, budget, keep, &mut out)?
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn labeled_typed<T: Cost + Into<BigInt>>(
    dirs: &[Direction],
    costs: &[T],
    cap: T,
    index: u64,
    scaled: &ScaledCosts,
    budget: &mut NodeBudget,
    keep: &mut dyn FnMut(u64, u64, u64) -> bool,
    out: &mut Vec<(ConvexGenerator, Rational)>,
) -> Result<()> {
    let index = index as i64;
    let mut out_of_budget = false;
    walk_paths(dirs, costs, &mut |s: &PathState<T>| {
        if !budget.tick() {
            out_of_budget = true;
            return Walk::Stop;
        }
        if s.cost > cap {
            return Walk::Prune;
        }
        // I = 2(L − 1) − h with h ≤ #non-axis edges; 2(L − 1) − #edges only
        // grows as edges are added.
        let twice = 2 * (s.lattice_points - 1);
        if twice - i64::from(s.nonaxis_edges) > index {
            return Walk::Prune;
        }
        let h = twice - index;
        if h >= 0 && h <= i64::from(s.nonaxis_edges) && keep(s.x as u64, s.y as u64, h as u64) {
            let action = scaled.unscale(s.cost.clone());
            out.extend(s.labelings(dirs, h as usize).into_iter().map(|g| (g, action.clone())));
        }
        Walk::Descend
    });
    if out_of_budget {
        return Err(budget.exceeded());
    }
    Ok(())
}

/// `N_k(a, b)`: the `k`-th smallest (from 0) of `m·a + n·b`, `m, n ≥ 0`,
/// counted with repetition.
pub fn capacity_oracle_ellipsoid(a: &Rational, b: &Rational, k: u64) -> Rational {
    // The k + 1 values j·min(a, b), j ≤ k, already lie below this bound.
    let bound = a.clone().min(b.clone()) * Rational::from_integer(k.into());
    let mut values = Vec::new();
    let mut m = Rational::zero();
    while m <= bound {
        let mut v = m.clone();
        while v <= bound {
            values.push(v.clone());
            v += b;
        }
        m += a;
    }
    values.sort();
    values.swap_remove(k as usize)
}

/// `min { a·m + b·n : (m + 1)(n + 1) ≥ k + 1 }`.
pub fn capacity_oracle_polydisk(a: &Rational, b: &Rational, k: u64) -> Rational {
    let mut best: Option<Rational> = None;
    for m in 0..=k {
        // Smallest n with (m + 1)(n + 1) ≥ k + 1.
        let n = (k + 1).div_ceil(m + 1) - 1;
        let v = a * Rational::from_integer(m.into()) + b * Rational::from_integer(n.into());
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    best.expect("m = 0 is always a candidate")
}

/// The maximal convex integral path under the line of slope `−b/a` through
/// the lattice point `p`, all edges `e`: the upper hull of the lattice
/// points in the triangle cut off by that line.
pub fn minimal_ellipsoid_family(a: &Rational, b: &Rational, p: (u64, u64)) -> Result<ConvexGenerator> {
    if a <= &Rational::zero() || b <= &Rational::zero() {
        return Err(Error::InvalidArgument("ellipsoid family needs a, b > 0".into()));
    }
    // Integer normal (B, A) proportional to (b, a).
    let big_a = a.numer() * b.denom();
    let big_b = b.numer() * a.denom();
    let level = &big_b * BigInt::from(p.0) + &big_a * BigInt::from(p.1);
    let last_column = (&level / &big_b).to_u64().ok_or_else(|| Error::InvalidArgument("point too large".into()))?;
    let tops: Vec<(i128, i128)> = (0..=last_column)
        .map(|u| {
            let top = (&level - &big_b * BigInt::from(u)).div_floor(&big_a);
            (i128::from(u), top.to_i128().expect("top fits"))
        })
        .collect();
    let mut hull: Vec<(i128, i128)> = Vec::new();
    for &q in &tops {
        while hull.len() >= 2 {
            let (o, r) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let turn = (r.0 - o.0) * (q.1 - r.1) - (r.1 - o.1) * (q.0 - r.0);
            if turn >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    let end = *hull.last().expect("at least the first column");
    if end.1 > 0 {
        hull.push((end.0, 0));
    }
    let mut edges = Vec::new();
    for w in hull.windows(2) {
        let (dx, dy) = ((w[1].0 - w[0].0) as u64, (w[0].1 - w[1].1) as u64);
        let (dir, mult) = Direction::primitive(dx, dy)?;
        edges.push(LabeledEdge::elliptic(dir, mult));
    }
    ConvexGenerator::new(edges, false)
}

/// Sufficient condition for `e(1,0)^x e(0,1)^y` to be minimal for `P(a, b)`:
/// every other pair with `(x'+1)(y'+1) ≥ (x+1)(y+1)` has `b·x' + a·y' >
/// b·x + a·y`. Decided by a finite scan.
pub fn is_minimal_polydisk(x: u64, y: u64, a: &Rational, b: &Rational) -> bool {
    let r = |n: u64| Rational::from_integer(n.into());
    let value = b * r(x) + a * r(y);
    let need = (x + 1) * (y + 1);
    let max_x = (&value / b).floor().to_integer().to_u64().expect("small");
    let max_y = (&value / a).floor().to_integer().to_u64().expect("small");
    for xp in 0..=max_x {
        for yp in 0..=max_y {
            if (xp, yp) != (x, y) && (xp + 1) * (yp + 1) >= need && b * r(xp) + a * r(yp) <= value {
                return false;
            }
        }
    }
    true
}
