//! Sharp scale thresholds from the obstruction criterion.
//!
//! For a family of targets `c ↦ c·Ω₁′` the verdict of
//! [`check_embedding`] is monotone in `c` (target actions grow linearly,
//! indices do not move), so the smallest non-excluded scale can be found by
//! bisection. Monotonicity is not taken on faith: the bracket ends are
//! re-checked and three more probes are run before a value is returned.

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::capacities::is_minimal_polydisk;
use crate::domains::ToricDomain;
use crate::error::{Error, Result};
use crate::lattice::ConvexGenerator;
use crate::obstruct::{check_embedding, SearchOptions};
use crate::rational::{format_rational, simplest_between, Rational};

/// A one-parameter family of targets, each member a scaling of the `c = 1`
/// member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetFamily {
    /// `B(c)`.
    Ball,
    /// `E(b·c, c)`.
    EllipsoidRatio(Rational),
    /// `P(c, c)`.
    SquarePolydisk,
    /// `P(b·c, c)`.
    PolydiskRatio(Rational),
}

impl TargetFamily {
    pub fn member(&self, c: &Rational) -> Result<ToricDomain> {
        match self {
            TargetFamily::Ball => ToricDomain::ball(c.clone()),
            TargetFamily::EllipsoidRatio(b) => ToricDomain::ellipsoid(b * c, c.clone()),
            TargetFamily::SquarePolydisk => ToricDomain::polydisk(c.clone(), c.clone()),
            TargetFamily::PolydiskRatio(b) => ToricDomain::polydisk(b * c, c.clone()),
        }
    }

    /// The minimal generators used as targets, up to size `d_max`:
    /// `e(1,1)^d` for balls, `e(b,1)^d` for ellipsoids with integer `b`, and
    /// the minimal `e(1,0)^x e(0,1)^y` with `x, y ≤ d_max` for polydisks.
    pub fn targets(&self, d_max: u64) -> Result<Vec<ConvexGenerator>> {
        match self {
            TargetFamily::Ball => (1..=d_max).map(|d| ConvexGenerator::elliptic_power(1, 1, d)).collect(),
            TargetFamily::EllipsoidRatio(b) => {
                if !b.is_integer() || b < &Rational::one() {
                    return Err(Error::InvalidArgument(format!(
                        "ellipsoid targets need an integer ratio b ≥ 1, got {}",
                        format_rational(b)
                    )));
                }
                let b = b.to_integer().to_u64().expect("small ratio");
                (1..=d_max).map(|d| ConvexGenerator::elliptic_power(b, 1, d)).collect()
            }
            TargetFamily::SquarePolydisk | TargetFamily::PolydiskRatio(_) => {
                let ratio = match self {
                    TargetFamily::PolydiskRatio(b) => b.clone(),
                    _ => Rational::one(),
                };
                let mut out: Vec<(u64, u64)> = Vec::new();
                for x in 0..=d_max {
                    for y in 0..=d_max {
                        if (x, y) != (0, 0) && is_minimal_polydisk(x, y, &ratio, &Rational::one()) {
                            out.push((x, y));
                        }
                    }
                }
                out.sort_by_key(|&(x, y)| ((x + 1) * (y + 1), x));
                Ok(out.into_iter().map(|(x, y)| ConvexGenerator::rectangle(x, y)).collect())
            }
        }
    }

    /// Smallest `c` with `Ω ⊆ member(c)`; nothing is excluded from there on.
    pub fn inclusion_scale(&self, domain: &ToricDomain) -> Result<Rational> {
        let unit = self.member(&Rational::one())?;
        Ok(domain.fit_scale(&unit).recip())
    }
}

impl std::fmt::Display for TargetFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetFamily::Ball => write!(f, "ball"),
            TargetFamily::EllipsoidRatio(b) => write!(f, "ellipsoid:{}", format_rational(b)),
            TargetFamily::SquarePolydisk => write!(f, "square-polydisk"),
            TargetFamily::PolydiskRatio(b) => write!(f, "polydisk:{}", format_rational(b)),
        }
    }
}

impl std::str::FromStr for TargetFamily {
    type Err = Error;

    /// `ball`, `square-polydisk`, `ellipsoid:<b>` or `polydisk:<b>`.
    fn from_str(s: &str) -> Result<Self> {
        let ratio = |r: &str| crate::rational::parse_rational(r);
        match s.trim().split_once(':') {
            None if s.trim() == "ball" => Ok(TargetFamily::Ball),
            None if s.trim() == "square-polydisk" => Ok(TargetFamily::SquarePolydisk),
            Some(("ellipsoid", b)) => Ok(TargetFamily::EllipsoidRatio(ratio(b)?)),
            Some(("polydisk", b)) => Ok(TargetFamily::PolydiskRatio(ratio(b)?)),
            _ => Err(Error::Parse(format!("unknown target family {s:?}"))),
        }
    }
}

/// A threshold with the bracket that proves it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    /// `ĉ`: excluded at `ĉ − tol`, not excluded at `ĉ + tol`.
    pub value: Rational,
    /// Largest scale seen excluded.
    pub excluded_at: Rational,
    /// Smallest scale seen not excluded.
    pub allowed_at: Rational,
    pub evaluations: u64,
}

struct Oracle<'a> {
    domain: &'a ToricDomain,
    family: &'a TargetFamily,
    targets: &'a [ConvexGenerator],
    opts: &'a SearchOptions,
    evaluations: u64,
}

impl Oracle<'_> {
    fn excluded(&mut self, c: &Rational) -> Result<bool> {
        self.evaluations += 1;
        let member = self.family.member(c)?;
        Ok(check_embedding(self.domain, &member, self.targets, self.opts)?.is_excluded())
    }

    fn expect(&mut self, c: &Rational, excluded: bool) -> Result<()> {
        if self.excluded(c)? == excluded {
            return Ok(());
        }
        Err(Error::NotMonotone(format!(
            "expected {} at c = {}",
            if excluded { "an exclusion" } else { "no exclusion" },
            format_rational(c)
        )))
    }
}

/// Bisects for the scale where the verdict flips, to within `tol`.
pub fn exclusion_threshold(
    domain: &ToricDomain,
    family: &TargetFamily,
    targets: &[ConvexGenerator],
    tol: &Rational,
    opts: &SearchOptions,
) -> Result<Threshold> {
    if tol <= &Rational::zero() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let mut oracle = Oracle { domain, family, targets, opts, evaluations: 0 };
    let two = Rational::from_integer(2.into());
    let three = Rational::from_integer(3.into());

    let mut hi = family.inclusion_scale(domain)?;
    if oracle.excluded(&hi)? {
        return Err(Error::NoBracket(format!(
            "excluded at the inclusion scale {}",
            format_rational(&hi)
        )));
    }
    let mut lo = &hi / &two;
    let mut halvings = 0;
    while !oracle.excluded(&lo)? {
        hi = lo.clone();
        lo = &lo / &two;
        halvings += 1;
        if halvings == 64 {
            return Err(Error::NoBracket("no exclusion at any tested scale".into()));
        }
    }
    let (lo0, hi0) = (lo.clone(), hi.clone());

    // Narrowing to `tol` (not `2·tol`) makes the final interval contain the
    // whole bracket, so the simplest value in it is the natural answer.
    while &hi - &lo > *tol {
        let third = (&hi - &lo) / &three;
        let mid = simplest_between(&(&lo + &third), &(&hi - &third));
        if oracle.excluded(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = simplest_between(&(&hi - tol), &(&lo + tol));

    oracle.expect(&(&value - tol), true)?;
    oracle.expect(&(&value + tol), false)?;
    let below = (&lo0 + &(&value - tol)) / &two;
    let above = (&hi0 + &(&value + tol)) / &two;
    let further = (&hi0 * &three + &(&value + tol)) / Rational::from_integer(4.into());
    if below < &value - tol {
        oracle.expect(&below, true)?;
    }
    oracle.expect(&above, false)?;
    oracle.expect(&further, false)?;

    Ok(Threshold { value, excluded_at: lo, allowed_at: hi, evaluations: oracle.evaluations })
}

/// `min(1 + a, (3d − 2 + a)/d, (d + 3)/2)`: the ball bound obtained from the
/// target `e(1,1)^d` for the polydisk `P(a, 1)`.
pub fn y1_bound(a: &Rational, d: u64) -> Rational {
    let r = |n: u64| Rational::from_integer(n.into());
    let first = r(1) + a;
    let second = (r(3 * d) - r(2) + a) / r(d);
    let third = r(d + 3) / r(2);
    first.min(second).min(third)
}

/// One row of a parameter scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    #[serde(serialize_with = "ser_rational")]
    pub a: Rational,
    pub domain: String,
    /// Largest per-target threshold.
    #[serde(serialize_with = "ser_rational")]
    pub bound: Rational,
    /// The target attaining `bound`.
    pub binding_target: String,
    pub thresholds: Vec<TargetThreshold>,
    /// `vol(Ω) / vol(member(1))`: the volume constraint is `c² ≥` this.
    #[serde(serialize_with = "ser_rational")]
    pub volume_bound_squared: Rational,
    /// True when `bound² > volume_bound_squared`.
    pub beats_volume: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetThreshold {
    pub target: String,
    #[serde(serialize_with = "ser_rational")]
    pub threshold: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Per-target thresholds for one domain; the row's bound is their maximum.
pub fn scan_row(
    a: &Rational,
    domain: &ToricDomain,
    family: &TargetFamily,
    d_max: u64,
    tol: &Rational,
    opts: &SearchOptions,
) -> Result<ScanRow> {
    let mut thresholds = Vec::new();
    for target in family.targets(d_max)? {
        let t = exclusion_threshold(domain, family, std::slice::from_ref(&target), tol, opts)?;
        thresholds.push(TargetThreshold { target: target.to_string(), threshold: t.value });
    }
    let best = thresholds
        .iter()
        .max_by(|x, y| x.threshold.cmp(&y.threshold))
        .ok_or_else(|| Error::InvalidArgument("no targets in the family recipe".into()))?
        .clone();
    let volume_bound_squared = domain.area() / family.member(&Rational::one())?.area();
    Ok(ScanRow {
        a: a.clone(),
        domain: domain.to_string(),
        beats_volume: &best.threshold * &best.threshold > volume_bound_squared,
        bound: best.threshold,
        binding_target: best.target,
        thresholds,
        volume_bound_squared,
    })
}

/// `scan_row` over `P(a, 1)` for each `a` in the grid, in grid order.
pub fn scan(
    grid: &[Rational],
    family: &TargetFamily,
    d_max: u64,
    tol: &Rational,
    opts: &SearchOptions,
) -> Result<Vec<ScanRow>> {
    grid.iter()
        .map(|a| scan_row(a, &ToricDomain::polydisk(a.clone(), Rational::one())?, family, d_max, tol, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn y1_bound_examples() {
        assert_eq!(y1_bound(&int(2), 4), int(3));
        assert_eq!(y1_bound(&int(4), 4), ratio(7, 2));
        assert_eq!(y1_bound(&int(7), 5), int(4));
    }

    #[test]
    fn inclusion_scales() {
        let p = ToricDomain::polydisk(int(2), int(1)).unwrap();
        assert_eq!(TargetFamily::Ball.inclusion_scale(&p).unwrap(), int(3));
        assert_eq!(TargetFamily::SquarePolydisk.inclusion_scale(&p).unwrap(), int(2));
        assert_eq!(TargetFamily::EllipsoidRatio(int(2)).inclusion_scale(&p).unwrap(), int(2));
    }

    #[test]
    fn recipes() {
        let balls = TargetFamily::Ball.targets(3).unwrap();
        assert_eq!(balls.last().unwrap().to_string(), "e(1,1)^3");
        let ell = TargetFamily::EllipsoidRatio(int(2)).targets(2).unwrap();
        assert_eq!(ell[1].to_string(), "e(2,1)^2");
        assert!(TargetFamily::EllipsoidRatio(ratio(3, 2)).targets(2).is_err());
        let square = TargetFamily::SquarePolydisk.targets(2).unwrap();
        assert!(square.contains(&"e(1,0)^2 e(0,1)^2".parse().unwrap()));
        assert!(!square.contains(&"e(1,0)".parse().unwrap()));
    }

    #[test]
    fn family_text_round_trips() {
        for f in [TargetFamily::Ball, TargetFamily::SquarePolydisk, TargetFamily::EllipsoidRatio(ratio(5, 2))] {
            assert_eq!(f.to_string().parse::<TargetFamily>().unwrap(), f);
        }
        assert!("cube".parse::<TargetFamily>().is_err());
    }

    #[test]
    fn ball_threshold_for_the_square() {
        let p = ToricDomain::polydisk(int(1), int(1)).unwrap();
        let targets = TargetFamily::Ball.targets(2).unwrap();
        let t = exclusion_threshold(&p, &TargetFamily::Ball, &targets, &ratio(1, 100), &SearchOptions::default())
            .unwrap();
        assert!((&t.value - int(2)) <= ratio(1, 100) && (int(2) - &t.value) <= ratio(1, 100), "{}", t.value);
    }

    #[test]
    fn square_polydisk_identity_row() {
        let rows = scan(&[int(1)], &TargetFamily::SquarePolydisk, 2, &ratio(1, 100), &SearchOptions::default()).unwrap();
        assert_eq!(rows[0].bound, int(1));
    }
}
