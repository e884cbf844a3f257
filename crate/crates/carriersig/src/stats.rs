//! Distance distributions and closed-form identification statistics.
//!
//! Pairwise distances split by whether the two carriers share an uplink
//! antenna. From the two empirical distributions and a census of how many
//! carriers each antenna transmits, a handful of closed-form estimators
//! predict how threshold-based identification behaves: the probability
//! `p_id` that the true antenna shows up in the result set, the expected
//! numbers of positives `n_i` and false positives `n_f`, and the
//! probability `p_f` of at least one false positive.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::DistanceRecord;

// --------------------------------------------------------------------------
// Distributions
// --------------------------------------------------------------------------

/// Fixed-width histogram of distances over [0, 1].
///
/// The last bin absorbs the upper boundary, so a distance of exactly 1
/// is still counted.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    bin_width: f64,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(distances: &[f64], bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "bin width {bin_width} is outside (0, 1]"
            )));
        }
        let num_bins = ((1.0 / bin_width) - 1e-9).ceil().max(1.0) as usize;
        let mut counts = vec![0u64; num_bins];
        for &d in distances {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::InvalidParameter(format!(
                    "distance {d} is outside [0, 1]"
                )));
            }
            let idx = ((d / bin_width) as usize).min(num_bins - 1);
            counts[idx] += 1;
        }
        Ok(Histogram { bin_width, counts })
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    /// `[lo, hi)` edges of bin `i` (the last bin is closed at 1).
    pub fn bin_bounds(&self, i: usize) -> (f64, f64) {
        let lo = i as f64 * self.bin_width;
        let hi = ((i + 1) as f64 * self.bin_width).min(1.0);
        (lo, hi)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Right-continuous empirical CDF built from the raw distances, so
/// evaluating exactly at a sample includes that sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDistribution(
                "no distances to build a distribution from".into(),
            ));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("distance is NaN".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(EmpiricalCdf { sorted: values })
    }

    /// Fraction of samples `<= x`.
    pub fn value(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|v| *v <= x);
        below as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

/// Histograms and CDFs of the same-antenna and different-antenna distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceDistributions {
    pub histogram_same: Histogram,
    pub histogram_different: Histogram,
    pub cdf_same: EmpiricalCdf,
    pub cdf_different: EmpiricalCdf,
}

/// Split records by the `same_antenna` flag and build both distributions.
///
/// Every record must carry the flag, and both groups must be non-empty —
/// without same-antenna pairs `F_s` (and everything downstream) is
/// undefined.
pub fn build_distributions(
    records: &[DistanceRecord],
    bin_width: f64,
) -> Result<DistanceDistributions> {
    let mut same = Vec::new();
    let mut different = Vec::new();
    for record in records {
        match record.same_antenna {
            Some(true) => same.push(record.distance),
            Some(false) => different.push(record.distance),
            None => {
                return Err(Error::InvalidParameter(format!(
                    "pair ({}, {}) has no same-antenna flag; distributions need antenna \
                     assignments for every carrier",
                    record.carrier_a, record.carrier_b
                )))
            }
        }
    }
    if same.is_empty() {
        return Err(Error::EmptyDistribution(
            "no same-antenna pairs: F_s is undefined".into(),
        ));
    }
    if different.is_empty() {
        return Err(Error::EmptyDistribution(
            "no different-antenna pairs: F_d is undefined".into(),
        ));
    }
    Ok(DistanceDistributions {
        histogram_same: Histogram::new(&same, bin_width)?,
        histogram_different: Histogram::new(&different, bin_width)?,
        cdf_same: EmpiricalCdf::new(same)?,
        cdf_different: EmpiricalCdf::new(different)?,
    })
}

// --------------------------------------------------------------------------
// Antenna census
// --------------------------------------------------------------------------

/// How many antennas transmit exactly `k` known carriers: `k -> n(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntennaCensus {
    counts: BTreeMap<usize, usize>,
}

impl AntennaCensus {
    pub fn new(counts: BTreeMap<usize, usize>) -> Result<Self> {
        let counts: BTreeMap<usize, usize> =
            counts.into_iter().filter(|&(_, n)| n > 0).collect();
        if counts.keys().any(|&k| k == 0) {
            return Err(Error::InvalidParameter(
                "census carrier counts must be at least 1".into(),
            ));
        }
        if counts.is_empty() {
            return Err(Error::InvalidParameter("census has no antennas".into()));
        }
        Ok(AntennaCensus { counts })
    }

    /// Parse `"1:27,2:1,9:1"` — carrier count, colon, antenna count.
    pub fn parse(text: &str) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for part in text.split(',') {
            let part = part.trim();
            let (k, n) = part.split_once(':').ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "census entry {part:?} is not of the form carriers:antennas"
                ))
            })?;
            let k: usize = k.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("bad carrier count in census entry {part:?}"))
            })?;
            let n: usize = n.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("bad antenna count in census entry {part:?}"))
            })?;
            if counts.insert(k, n).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "carrier count {k} appears twice in the census"
                )));
            }
        }
        Self::new(counts)
    }

    /// Derive the census from carrier-to-antenna assignments.
    pub fn from_assignments(assignments: &HashMap<String, String>) -> Result<Self> {
        let mut per_antenna: HashMap<&str, usize> = HashMap::new();
        for antenna in assignments.values() {
            *per_antenna.entry(antenna.as_str()).or_insert(0) += 1;
        }
        let mut counts = BTreeMap::new();
        for k in per_antenna.into_values() {
            *counts.entry(k).or_insert(0) += 1;
        }
        Self::new(counts)
    }

    /// `(k, n(k))` pairs in increasing `k`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&k, &n)| (k, n))
    }

    /// Total number of antennas `N_a`.
    pub fn num_antennas(&self) -> usize {
        self.counts.values().sum()
    }

    /// Total number of carriers `N_s`.
    pub fn num_carriers(&self) -> usize {
        self.counts.iter().map(|(&k, &n)| k * n).sum()
    }

    /// Average carriers per antenna `n_s`.
    pub fn mean_carriers(&self) -> f64 {
        self.num_carriers() as f64 / self.num_antennas() as f64
    }
}

impl fmt::Display for AntennaCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, n) in self.entries() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{k}:{n}")?;
            first = false;
        }
        Ok(())
    }
}

/// Numbers of unordered carrier pairs implied by a census.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub same: u64,
    pub different: u64,
    pub total: u64,
}

/// Same-antenna pairs are `sum n(k) * k(k-1)/2`; the rest of the
/// `N_s(N_s-1)/2` pairs cross antennas.
pub fn count_pairs(census: &AntennaCensus) -> PairCounts {
    let same: u64 = census
        .entries()
        .map(|(k, n)| (n as u64) * (k as u64) * (k as u64 - 1) / 2)
        .sum();
    let n_s = census.num_carriers() as u64;
    let total = n_s * (n_s - 1) / 2;
    PairCounts {
        same,
        different: total - same,
        total,
    }
}

// --------------------------------------------------------------------------
// Closed-form estimators
// --------------------------------------------------------------------------

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {p} is not a probability"
        )));
    }
    Ok(())
}

/// Probability that at least one same-antenna carrier enters the result
/// set: `p_id = 1 - (1/N_a) sum_k n(k) (1 - F_s)^k`.
///
/// An antenna with k carriers is missed only if all k independently stay
/// above the threshold; averaging over the census gives the fleet-wide
/// identification probability.
pub fn prob_identification(census: &AntennaCensus, f_s_at_threshold: f64) -> Result<f64> {
    check_probability("F_s(D_t)", f_s_at_threshold)?;
    let miss = 1.0 - f_s_at_threshold;
    let sum: f64 = census
        .entries()
        .map(|(k, n)| n as f64 * miss.powi(k as i32))
        .sum();
    Ok(1.0 - sum / census.num_antennas() as f64)
}

/// Expected number of same-antenna carriers in the result set:
/// `n_i = n_s * F_s(D_t)`.
pub fn expected_positives(mean_carriers: f64, f_s_at_threshold: f64) -> Result<f64> {
    check_probability("F_s(D_t)", f_s_at_threshold)?;
    if !mean_carriers.is_finite() || mean_carriers <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mean carriers per antenna {mean_carriers} must be positive"
        )));
    }
    Ok(mean_carriers * f_s_at_threshold)
}

/// Probability that exactly `k` of the `k_total` same-antenna carriers
/// land in the result set, each independently with probability `p`.
pub fn binomial_positives(k_total: u64, k: u64, p: f64) -> Result<f64> {
    check_probability("p", p)?;
    if k > k_total {
        return Ok(0.0);
    }
    // Multiplicative binomial coefficient; fine in f64 at census scales.
    let mut coefficient = 1.0;
    for i in 1..=k {
        coefficient *= (k_total - k + i) as f64 / i as f64;
    }
    Ok(coefficient * p.powi(k as i32) * (1.0 - p).powi((k_total - k) as i32))
}

/// Expected number of false positives:
/// `n_f = n_d * F_d(D_t)` with `n_d = N_s - n_s`.
pub fn expected_false_positives(
    num_carriers: usize,
    mean_carriers: f64,
    f_d_at_threshold: f64,
) -> Result<f64> {
    check_probability("F_d(D_t)", f_d_at_threshold)?;
    let n_d = num_carriers as f64 - mean_carriers;
    if n_d < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mean carriers per antenna {mean_carriers} exceeds the fleet size {num_carriers}"
        )));
    }
    Ok(n_d * f_d_at_threshold)
}

/// How to estimate the probability of at least one false positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FalsePositiveMode {
    /// `1 - (1 - p)^(N_s - K)` for an interferer whose antenna carries
    /// `K` known carriers.
    Exact,
    /// `N_s * p`, the small-p linearization; ignores `K` and can exceed 1.
    Approximate,
}

/// Probability that the result set contains at least one carrier from the
/// wrong antenna.
pub fn prob_false_positive(
    num_carriers: usize,
    same_antenna_carriers: usize,
    f_d_at_threshold: f64,
    mode: FalsePositiveMode,
) -> Result<f64> {
    check_probability("F_d(D_t)", f_d_at_threshold)?;
    match mode {
        FalsePositiveMode::Exact => {
            if same_antenna_carriers > num_carriers {
                return Err(Error::InvalidParameter(format!(
                    "antenna carrier count {same_antenna_carriers} exceeds fleet size {num_carriers}"
                )));
            }
            let others = (num_carriers - same_antenna_carriers) as i32;
            Ok(1.0 - (1.0 - f_d_at_threshold).powi(others))
        }
        FalsePositiveMode::Approximate => Ok(num_carriers as f64 * f_d_at_threshold),
    }
}

// --------------------------------------------------------------------------
// Evaluation report
// --------------------------------------------------------------------------

/// All identification-performance quantities at one threshold.
///
/// `p_f` uses the approximate (fleet-size-times-probability) form, which
/// is the headline small-`F_d` estimate and can exceed 1. Since the exact
/// form depends on the interferer's antenna size `K`, `p_f_exact` reports
/// it at the fleet average `K = n_s`, i.e. `1 - (1 - F_d)^(N_s - n_s)`;
/// per-antenna values are available through [`prob_false_positive`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceReport {
    pub threshold: f64,
    pub num_antennas: usize,
    pub num_carriers: usize,
    pub mean_carriers_per_antenna: f64,
    pub f_s: f64,
    pub f_d: f64,
    pub p_id: f64,
    pub n_i: f64,
    pub n_f: f64,
    pub p_f: f64,
    pub p_f_exact: f64,
}

/// Evaluate the closed-form estimators from already-known CDF values.
pub fn evaluate_at(
    census: &AntennaCensus,
    f_s_at_threshold: f64,
    f_d_at_threshold: f64,
    threshold: f64,
) -> Result<PerformanceReport> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!(
            "threshold {threshold} is outside [0, 1]"
        )));
    }
    let n_s = census.mean_carriers();
    let num_carriers = census.num_carriers();
    Ok(PerformanceReport {
        threshold,
        num_antennas: census.num_antennas(),
        num_carriers,
        mean_carriers_per_antenna: n_s,
        f_s: f_s_at_threshold,
        f_d: f_d_at_threshold,
        p_id: prob_identification(census, f_s_at_threshold)?,
        n_i: expected_positives(n_s, f_s_at_threshold)?,
        n_f: expected_false_positives(num_carriers, n_s, f_d_at_threshold)?,
        p_f: prob_false_positive(
            num_carriers,
            0,
            f_d_at_threshold,
            FalsePositiveMode::Approximate,
        )?,
        p_f_exact: 1.0 - (1.0 - f_d_at_threshold).powf(num_carriers as f64 - n_s),
    })
}

/// Evaluate performance from raw pairwise distances.
///
/// Builds the empirical CDFs from the flagged records, reads them at the
/// threshold, and applies the estimators. Disagreement between the record
/// counts and the census pair counts is reported as a warning, not an
/// error, so externally produced distance sets remain usable.
pub fn evaluate(
    records: &[DistanceRecord],
    census: &AntennaCensus,
    threshold: f64,
) -> Result<PerformanceReport> {
    // Bin width does not influence the CDF values; any valid one works here.
    let distributions = build_distributions(records, 0.05)?;
    let expected = count_pairs(census);
    let got_same = distributions.cdf_same.len() as u64;
    let got_different = distributions.cdf_different.len() as u64;
    if got_same != expected.same || got_different != expected.different {
        log::warn!(
            "census implies {} same / {} different pairs but records hold {} / {}",
            expected.same,
            expected.different,
            got_same,
            got_different
        );
    }
    evaluate_at(
        census,
        distributions.cdf_same.value(threshold),
        distributions.cdf_different.value(threshold),
        threshold,
    )
}
