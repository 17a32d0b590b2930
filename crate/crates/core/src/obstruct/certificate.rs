use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::le;
use crate::domains::ToricDomain;
use crate::error::{Error, Result};
use crate::lattice::ConvexGenerator;

pub const CERTIFICATE_SCHEMA: &str = "toric-ech/certificate/v1";

/// Witness data for one target: `Λ`, and paired decompositions of `Λ` and
/// of the target. Constructed values always pass [`verify_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    domain: ToricDomain,
    target_domain: ToricDomain,
    target: ConvexGenerator,
    lambda: ConvexGenerator,
    pairs: Vec<(ConvexGenerator, ConvexGenerator)>,
    conditional: bool,
}

impl Certificate {
    /// Assembles and checks a certificate. `conditional` marks a target that
    /// was only required to be all-`e`, not minimal.
    pub fn new(
        domain: ToricDomain,
        target_domain: ToricDomain,
        target: ConvexGenerator,
        pairs: Vec<(ConvexGenerator, ConvexGenerator)>,
        conditional: bool,
    ) -> Result<Self> {
        let lambda = ConvexGenerator::product_all(pairs.iter().map(|(l, _)| l))
            .map_err(|e| Error::InvalidCertificate(format!("factors do not multiply: {e}")))?;
        let cert = Certificate { domain, target_domain, target, lambda, pairs, conditional };
        verify_certificate(&cert)?;
        Ok(cert)
    }

    pub fn domain(&self) -> &ToricDomain {
        &self.domain
    }

    pub fn target_domain(&self) -> &ToricDomain {
        &self.target_domain
    }

    pub fn target(&self) -> &ConvexGenerator {
        &self.target
    }

    pub fn lambda(&self) -> &ConvexGenerator {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(ConvexGenerator, ConvexGenerator)] {
        &self.pairs
    }

    pub fn is_conditional(&self) -> bool {
        self.conditional
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(Document::from(self)).expect("plain strings")
    }

    /// Parses a certificate document and re-verifies it.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document =
            serde_json::from_str(text).map_err(|e| Error::InvalidCertificate(e.to_string()))?;
        if doc.schema != CERTIFICATE_SCHEMA {
            return Err(Error::InvalidCertificate(format!("unknown schema {:?}", doc.schema)));
        }
        let domain: ToricDomain = doc.domain.parse()?;
        let target_domain: ToricDomain = doc.target.parse()?;
        let target: ConvexGenerator = doc.target_generator.parse()?;
        let pairs = doc
            .pairs
            .iter()
            .map(|p| Ok((p.factor.parse()?, p.target_factor.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        if pairs.len() != doc.n {
            return Err(Error::InvalidCertificate(format!("n = {} but {} pairs", doc.n, pairs.len())));
        }
        let cert = Certificate::new(domain, target_domain, target, pairs, doc.conditional)?;
        let claimed: ConvexGenerator = doc.lambda.parse()?;
        if claimed != cert.lambda {
            return Err(Error::InvalidCertificate(format!(
                "lambda {claimed} is not the product of the factors ({})",
                cert.lambda
            )));
        }
        Ok(cert)
    }
}

#[derive(Serialize, Deserialize)]
struct Pair {
    factor: String,
    target_factor: String,
}

#[derive(Serialize, Deserialize)]
struct Document {
    schema: String,
    domain: String,
    target: String,
    target_generator: String,
    lambda: String,
    n: usize,
    pairs: Vec<Pair>,
    conditional: bool,
}

impl From<&Certificate> for Document {
    fn from(c: &Certificate) -> Self {
        Document {
            schema: CERTIFICATE_SCHEMA.into(),
            domain: c.domain.to_string(),
            target: c.target_domain.to_string(),
            target_generator: c.target.to_string(),
            lambda: c.lambda.to_string(),
            n: c.pairs.len(),
            pairs: c
                .pairs
                .iter()
                .map(|(f, t)| Pair { factor: f.to_string(), target_factor: t.to_string() })
                .collect(),
            conditional: c.conditional,
        }
    }
}

/// Largest `n` for which the subset condition is checked over all `2ⁿ`
/// subsets; above it, over sub-multisets of the distinct pairs.
const RAW_SUBSET_LIMIT: usize = 16;

/// Checks every condition from scratch. Independent of the search: products
/// are recomputed and the subset condition is checked subset by subset.
pub fn verify_certificate(cert: &Certificate) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidCertificate(msg));
    if !cert.target.is_all_elliptic() {
        return bad(format!("target {} has an h label", cert.target));
    }
    let lambda = ConvexGenerator::product_all(cert.pairs.iter().map(|(l, _)| l))
        .map_err(|e| Error::InvalidCertificate(e.to_string()))?;
    if lambda != cert.lambda {
        return bad(format!("factors multiply to {lambda}, not {}", cert.lambda));
    }
    let target = ConvexGenerator::product_all(cert.pairs.iter().map(|(_, t)| t))
        .map_err(|e| Error::InvalidCertificate(e.to_string()))?;
    if target != cert.target {
        return bad(format!("target factors multiply to {target}, not {}", cert.target));
    }
    for (i, (l, t)) in cert.pairs.iter().enumerate() {
        if l.is_one() || t.is_one() {
            return bad(format!("pair {i} has an empty factor"));
        }
        if !le(&cert.domain, &cert.target_domain, l, t)? {
            return bad(format!("pair {i}: {l} is not below {t}"));
        }
    }
    for (i, p) in cert.pairs.iter().enumerate() {
        for q in &cert.pairs[i + 1..] {
            if p != q && p.0.shares_elliptic(&q.0) {
                return bad(format!("distinct pairs with factors {} and {} share an e factor", p.0, q.0));
            }
        }
    }
    let n = cert.pairs.len();
    if n <= RAW_SUBSET_LIMIT {
        for mask in 1u32..(1 << n) {
            let chosen = || (0..n).filter(move |i| mask & (1 << i) != 0).map(|i| &cert.pairs[i]);
            let l = ConvexGenerator::product_all(chosen().map(|p| &p.0))
                .map_err(|e| Error::InvalidCertificate(e.to_string()))?;
            let t = ConvexGenerator::product_all(chosen().map(|p| &p.1))
                .map_err(|e| Error::InvalidCertificate(e.to_string()))?;
            if l.ech_index() != t.ech_index() {
                return bad(format!("subset {mask:#b}: I({l}) ≠ I({t})"));
            }
        }
    } else {
        let mut seen: HashSet<(ConvexGenerator, ConvexGenerator)> = HashSet::new();
        seen.insert((ConvexGenerator::one(), ConvexGenerator::one()));
        for (l, t) in &cert.pairs {
            let grown: Vec<_> = seen
                .iter()
                .map(|(a, b)| Ok((a.product(l)?, b.product(t)?)))
                .collect::<Result<_>>()
                .map_err(|e: Error| Error::InvalidCertificate(e.to_string()))?;
            for (a, b) in grown {
                if a.ech_index() != b.ech_index() {
                    return bad(format!("subset product: I({a}) ≠ I({b})"));
                }
                seen.insert((a, b));
            }
        }
    }
    Ok(())
}
