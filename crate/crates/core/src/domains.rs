//! Convex toric domains and the action functional.
//!
//! A domain is described by its moment image `Ω`: the region under a
//! nonincreasing concave function `f : [0, A] → ℝ≥0`. Everything the rest of
//! the crate needs from `Ω` goes through its support function
//! `h_Ω(u, v) = max_{(x,y) ∈ Ω} (u·x + v·y)` for `u, v ≥ 0`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::ConvexGenerator;
use crate::rational::{format_rational, parse_rational, Rational};

/// Moment image of a convex toric domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ToricDomain {
    /// `P(a, b)`: the rectangle `[0, a] × [0, b]`.
    Polydisk { a: Rational, b: Rational },
    /// `E(a, b)`: the triangle with legs `a` (horizontal) and `b` (vertical).
    Ellipsoid { a: Rational, b: Rational },
    /// Upper boundary vertices from `(0, f(0))` to `(A, 0)`, left to right.
    /// A vertical drop is allowed only as the final segment.
    Polygon { vertices: Vec<(Rational, Rational)> },
}

impl ToricDomain {
    pub fn polydisk(a: Rational, b: Rational) -> Result<Self> {
        positive(&a, "P")?;
        positive(&b, "P")?;
        Ok(ToricDomain::Polydisk { a, b })
    }

    pub fn ellipsoid(a: Rational, b: Rational) -> Result<Self> {
        positive(&a, "E")?;
        positive(&b, "E")?;
        Ok(ToricDomain::Ellipsoid { a, b })
    }

    /// The ball `B(c) = E(c, c)`.
    pub fn ball(c: Rational) -> Result<Self> {
        Self::ellipsoid(c.clone(), c)
    }

    /// Validates and normalizes a polygon: collinear interior vertices are
    /// dropped so that every remaining boundary edge is a genuine facet.
    pub fn polygon(vertices: Vec<(Rational, Rational)>) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidDomain(format!("polygon {why}")));
        if vertices.len() < 2 {
            return bad("needs at least two vertices");
        }
        let (x0, y0) = &vertices[0];
        let (xn, yn) = &vertices[vertices.len() - 1];
        if !x0.is_zero() {
            return bad("must start on the y-axis");
        }
        if !y0.is_positive() {
            return bad("must have f(0) > 0");
        }
        if !yn.is_zero() || !xn.is_positive() {
            return bad("must end at (A, 0) with A > 0");
        }
        for (k, w) in vertices.windows(2).enumerate() {
            let (dx, dy) = (&w[1].0 - &w[0].0, &w[1].1 - &w[0].1);
            let last = k + 2 == vertices.len();
            if dx.is_negative() || (dx.is_zero() && !last) {
                return bad("vertices must be listed left to right");
            }
            if dy.is_positive() {
                return bad("boundary must be nonincreasing");
            }
            if dx.is_zero() && dy.is_zero() {
                return bad("has a repeated vertex");
            }
        }
        let mut kept: Vec<(Rational, Rational)> = vec![vertices[0].clone()];
        for v in &vertices[1..] {
            while kept.len() >= 2 {
                let turn = cross(&kept[kept.len() - 2], &kept[kept.len() - 1], v);
                if turn.is_positive() {
                    return bad("boundary must be concave");
                }
                if turn.is_zero() {
                    kept.pop();
                } else {
                    break;
                }
            }
            kept.push(v.clone());
        }
        Ok(ToricDomain::Polygon { vertices: kept })
    }

    /// Upper boundary vertices, `(0, f(0))` first and `(A, 0)` last.
    pub fn boundary(&self) -> Vec<(Rational, Rational)> {
        let zero = Rational::zero;
        match self {
            ToricDomain::Polydisk { a, b } => {
                vec![(zero(), b.clone()), (a.clone(), b.clone()), (a.clone(), zero())]
            }
            ToricDomain::Ellipsoid { a, b } => vec![(zero(), b.clone()), (a.clone(), zero())],
            ToricDomain::Polygon { vertices } => vertices.clone(),
        }
    }

    /// Outward normals `(u, v) ≥ 0` of the upper boundary edges.
    pub fn facet_normals(&self) -> Vec<(Rational, Rational)> {
        self.boundary()
            .windows(2)
            .map(|w| (&w[0].1 - &w[1].1, &w[1].0 - &w[0].0))
            .collect()
    }

    /// `h_Ω(u, v)` for integer directions.
    pub fn support(&self, u: u64, v: u64) -> Rational {
        self.support_rational(&Rational::from_integer(u.into()), &Rational::from_integer(v.into()))
    }

    /// `h_Ω(u, v)` for rational directions with `u, v ≥ 0`.
    pub fn support_rational(&self, u: &Rational, v: &Rational) -> Rational {
        match self {
            ToricDomain::Polydisk { a, b } => u * a + v * b,
            ToricDomain::Ellipsoid { a, b } => (u * a).max(v * b),
            ToricDomain::Polygon { vertices } => vertices
                .iter()
                .map(|(x, y)| u * x + v * y)
                .max()
                .expect("validated polygon has vertices"),
        }
    }

    /// Horizontal extent `A`.
    pub fn width(&self) -> Rational {
        self.support(1, 0)
    }

    /// `f(0)`.
    pub fn height(&self) -> Rational {
        self.support(0, 1)
    }

    /// `A_Ω(Λ) = Σ m · h_Ω(b, a)` over edges `m·(a, −b)`. The tangent line
    /// parallel to an edge `(a, −b)` has normal `(b, a)`.
    pub fn action(&self, gen: &ConvexGenerator) -> Rational {
        gen.edges()
            .iter()
            .map(|e| self.support(e.dir.b(), e.dir.a()) * Rational::from_integer(e.mult.into()))
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    /// True when `other ⊆ self`. For down-closed convex regions it is
    /// enough to compare support values on the facet normals of `self`.
    pub fn contains(&self, other: &ToricDomain) -> bool {
        self.facet_normals()
            .iter()
            .all(|(u, v)| other.support_rational(u, v) <= self.support_rational(u, v))
    }

    /// Multiplies every length by `t > 0`.
    pub fn scale(&self, t: &Rational) -> Self {
        match self {
            ToricDomain::Polydisk { a, b } => ToricDomain::Polydisk { a: a * t, b: b * t },
            ToricDomain::Ellipsoid { a, b } => ToricDomain::Ellipsoid { a: a * t, b: b * t },
            ToricDomain::Polygon { vertices } => ToricDomain::Polygon {
                vertices: vertices.iter().map(|(x, y)| (x * t, y * t)).collect(),
            },
        }
    }

    /// Planar area of `Ω`, which is also the volume of the domain.
    pub fn area(&self) -> Rational {
        let two = Rational::from_integer(2.into());
        self.boundary()
            .windows(2)
            .map(|w| (&w[1].0 - &w[0].0) * (&w[0].1 + &w[1].1) / &two)
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    /// A corner rectangle `[0, w] × [0, h] ⊆ Ω` of maximal area. Since
    /// `h_Ω ≥ h_rect`, it gives `A_Ω(Λ) ≥ h·x(Λ) + w·y(Λ)`.
    pub fn inscribed_rectangle(&self) -> (Rational, Rational) {
        let boundary = self.boundary();
        let mut best = (boundary[0].0.clone(), boundary[0].1.clone());
        let mut best_area = Rational::zero();
        let mut consider = |w: Rational, h: Rational| {
            let area = &w * &h;
            if area > best_area {
                best_area = area;
                best = (w, h);
            }
        };
        for v in &boundary {
            consider(v.0.clone(), v.1.clone());
        }
        // On an edge y = p + s·x (s < 0) the product x·y peaks at x = −p/(2s).
        for w in boundary.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if x1 == x0 || y1 == y0 {
                continue;
            }
            let slope = (y1 - y0) / (x1 - x0);
            let intercept = y0 - &slope * x0;
            let peak = -&intercept / (Rational::from_integer(2.into()) * &slope);
            if &peak > x0 && &peak < x1 {
                let h = &intercept + &slope * &peak;
                consider(peak, h);
            }
        }
        if best_area.is_zero() {
            // Only reachable for degenerate input; fall back to a thin box.
            return (boundary[boundary.len() - 1].0.clone(), Rational::zero());
        }
        best
    }

    /// Largest `t` with `t·self ⊆ other`, i.e. `min_n h_other(n) / h_self(n)`
    /// over the facet normals of `other`.
    pub fn fit_scale(&self, other: &ToricDomain) -> Rational {
        other
            .facet_normals()
            .iter()
            .map(|(u, v)| other.support_rational(u, v) / self.support_rational(u, v))
            .min()
            .unwrap_or_else(Rational::one)
    }
}

fn positive(r: &Rational, what: &str) -> Result<()> {
    if r.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{what} needs positive parameters, got {}", format_rational(r))))
    }
}

/// z-component of `(q − p) × (r − q)`; negative for a clockwise (concave) turn.
fn cross(p: &(Rational, Rational), q: &(Rational, Rational), r: &(Rational, Rational)) -> Rational {
    (&q.0 - &p.0) * (&r.1 - &q.1) - (&q.1 - &p.1) * (&r.0 - &q.0)
}

impl fmt::Display for ToricDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = format_rational;
        match self {
            ToricDomain::Polydisk { a, b } => write!(f, "P({},{})", r(a), r(b)),
            ToricDomain::Ellipsoid { a, b } if a == b => write!(f, "B({})", r(a)),
            ToricDomain::Ellipsoid { a, b } => write!(f, "E({},{})", r(a), r(b)),
            ToricDomain::Polygon { vertices } => {
                f.write_str("poly[")?;
                for (k, (x, y)) in vertices.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "({},{})", r(x), r(y))?;
                }
                f.write_str("]")
            }
        }
    }
}

impl FromStr for ToricDomain {
    type Err = Error;

    /// `P(a,b)`, `E(a,b)`, `B(c)` or `poly[(x0,y0),(x1,y1),...]`.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("not a domain literal: {text:?}"));
        if let Some(body) = s.strip_prefix("poly[").and_then(|b| b.strip_suffix(']')) {
            let mut vertices = Vec::new();
            let mut rest = body;
            while !rest.is_empty() {
                let inner = rest.strip_prefix('(').ok_or_else(bad)?;
                let close = inner.find(')').ok_or_else(bad)?;
                let (x, y) = inner[..close].split_once(',').ok_or_else(bad)?;
                vertices.push((parse_rational(x)?, parse_rational(y)?));
                rest = &inner[close + 1..];
                rest = rest.strip_prefix(',').unwrap_or(rest);
            }
            return Self::polygon(vertices);
        }
        let open = s.find('(').ok_or_else(bad)?;
        let args = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let args: Vec<&str> = args.split(',').collect();
        match (&s[..open], args.as_slice()) {
            ("P", [a, b]) => Self::polydisk(parse_rational(a)?, parse_rational(b)?),
            ("E", [a, b]) => Self::ellipsoid(parse_rational(a)?, parse_rational(b)?),
            ("B", [c]) => Self::ball(parse_rational(c)?),
            _ => Err(bad()),
        }
    }
}

impl serde::Serialize for ToricDomain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
