//! ECH capacities and embedding obstructions for four-dimensional convex
//! toric domains, in exact arithmetic.
//!
//! - [`lattice`]: convex generators (labeled lattice paths), their indices,
//!   products and factorizations.
//! - [`domains`]: polydisks, ellipsoids, balls and polygonal regions, with
//!   the action functional.
//! - [`capacities`]: `c_k` and minimal generators by branch and bound.
//! - [`obstruct`]: the witness search, verdicts and certificates.
//! - [`bounds`]: thresholds by bisection, and parameter scans.
//!
//! ```
//! use toric_ech::domains::ToricDomain;
//! use toric_ech::lattice::ConvexGenerator;
//! use toric_ech::obstruct::{check_embedding, SearchOptions};
//!
//! let p: ToricDomain = "P(2,1)".parse()?;
//! let ball: ToricDomain = "B(299/100)".parse()?;
//! let target: ConvexGenerator = "e(1,1)^3".parse()?;
//! assert!(check_embedding(&p, &ball, &[target], &SearchOptions::default())?.is_excluded());
//! # Ok::<(), toric_ech::error::Error>(())
//! ```

pub mod bounds;
pub mod capacities;
pub mod domains;
pub mod error;
pub mod lattice;
pub mod obstruct;
pub mod rational;

// The book's snippets run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/domains.md")]
    mod domains {}
    #[doc = include_str!("../../../book/src/capacities.md")]
    mod capacities {}
    #[doc = include_str!("../../../book/src/obstructions.md")]
    mod obstructions {}
    #[doc = include_str!("../../../book/src/thresholds.md")]
    mod thresholds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
