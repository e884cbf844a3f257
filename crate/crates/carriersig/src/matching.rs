//! Signature distances and interferer ranking.
//!
//! Signatures live on the unit sphere, and the sign of a singular vector is
//! arbitrary, so similarity is measured through the squared projection:
//! `D(r, s) = sqrt(1 - (r^T s)^2)`. Identical (or opposite) signatures give
//! 0, orthogonal ones give 1. An unknown interferer is identified by
//! ranking all known carriers by distance and keeping those below a
//! threshold — the result set that an operator would then inspect.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::signature::Signature;

/// Distance between two unit vectors of equal length.
pub fn distance_vectors(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "signature lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::ShapeMismatch("signatures are empty".into()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    // Guard against |dot| creeping past 1 by rounding before the sqrt.
    Ok((1.0 - dot * dot).clamp(0.0, 1.0).sqrt())
}

/// Distance between two carrier signatures.
pub fn distance(r: &Signature, s: &Signature) -> Result<f64> {
    distance_vectors(r.vector(), s.vector())
}

/// One pairwise distance; `same_antenna` is present only when the antenna
/// of both carriers is known.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRecord {
    pub carrier_a: String,
    pub carrier_b: String,
    pub distance: f64,
    pub same_antenna: Option<bool>,
}

/// All pairwise distances between the given signatures.
///
/// Pairs are emitted in input order — `(0,1), (0,2), ..., (1,2), ...` — and
/// the computation is parallelized without affecting that order.
/// `assignments` maps carrier ids to antenna ids; carriers missing from it
/// get records without the `same_antenna` flag.
pub fn all_pairs(
    signatures: &[Signature],
    assignments: &HashMap<String, String>,
) -> Result<Vec<DistanceRecord>> {
    let mut seen = std::collections::HashSet::new();
    for sig in signatures {
        if !seen.insert(sig.carrier_id.as_str()) {
            return Err(Error::InvalidParameter(format!(
                "duplicate carrier id {} in signature set",
                sig.carrier_id
            )));
        }
    }

    let mut pairs = Vec::new();
    for i in 0..signatures.len() {
        for j in (i + 1)..signatures.len() {
            pairs.push((i, j));
        }
    }

    pairs
        .par_iter()
        .map(|&(i, j)| {
            let a = &signatures[i];
            let b = &signatures[j];
            let d = distance(a, b)?;
            let same_antenna = match (
                assignments.get(&a.carrier_id),
                assignments.get(&b.carrier_id),
            ) {
                (Some(x), Some(y)) => Some(x == y),
                _ => None,
            };
            Ok(DistanceRecord {
                carrier_a: a.carrier_id.clone(),
                carrier_b: b.carrier_id.clone(),
                distance: d,
                same_antenna,
            })
        })
        .collect()
}

/// One known carrier scored against the interferer.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    pub carrier_id: String,
    pub antenna_id: Option<String>,
    pub distance: f64,
    /// Strictly below the threshold.
    pub in_result_set: bool,
}

/// Every known carrier ranked by distance to the interferer.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub interferer_id: String,
    pub threshold: f64,
    /// Ascending by distance; ties broken by carrier id.
    pub candidates: Vec<RankedCandidate>,
}

impl Ranking {
    /// The candidates with distance strictly below the threshold.
    pub fn result_set(&self) -> Vec<&RankedCandidate> {
        self.candidates
            .iter()
            .filter(|c| c.in_result_set)
            .collect()
    }
}

/// Rank all known carriers against the interferer.
///
/// A known carrier sharing the interferer's id is skipped, so a signature
/// set may safely contain the interferer itself. An empty known set yields
/// an empty ranking. Membership in the result set uses strict `<`, making
/// a zero threshold select nothing.
pub fn rank_candidates(
    interferer: &Signature,
    known: &[Signature],
    threshold: f64,
    assignments: &HashMap<String, String>,
) -> Result<Ranking> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!(
            "threshold {threshold} is outside [0, 1]"
        )));
    }
    let mut candidates: Vec<RankedCandidate> = known
        .par_iter()
        .filter(|s| s.carrier_id != interferer.carrier_id)
        .map(|s| {
            let d = distance(interferer, s)?;
            Ok(RankedCandidate {
                carrier_id: s.carrier_id.clone(),
                antenna_id: assignments.get(&s.carrier_id).cloned(),
                distance: d,
                in_result_set: d < threshold,
            })
        })
        .collect::<Result<_>>()?;
    candidates.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .expect("distances are never NaN")
            .then_with(|| a.carrier_id.cmp(&b.carrier_id))
    });
    Ok(Ranking {
        interferer_id: interferer.carrier_id.clone(),
        threshold,
        candidates,
    })
}
