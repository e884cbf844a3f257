//! Encoding of a fluctuation series as a unit-norm state vector.
//!
//! The detrended values `E` are first mapped into `[0, 1]` by
//! `e_i = (E_i + E_max) / (2 E_max)` with `E_max = max_i |E_i|`. From there
//! two unit vectors can be built:
//!
//! * amplitude encoding: `p_i = e_i / sum(e)` is a probability
//!   distribution and `q_i = sqrt(p_i)` its amplitude vector, so the
//!   squared entries of `q` sum to one;
//! * direct normalization: `r = e / ||e||`.
//!
//! The amplitude form separates same-antenna and different-antenna carrier
//! pairs slightly better, but both are exposed so the alternatives can be
//! compared.

use crate::error::{Error, Result};
use crate::timeseries::FluctuationSeries;

/// Which map from fluctuations to a unit vector was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingKind {
    /// Square-root-of-probability amplitudes.
    Amplitude,
    /// `e` normalized by its Euclidean norm.
    L2Direct,
}

impl std::fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EncodingKind::Amplitude => write!(f, "amplitude"),
            EncodingKind::L2Direct => write!(f, "l2"),
        }
    }
}

/// A unit-norm vector encoding one fluctuation series.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    kind: EncodingKind,
}

impl StateVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean norm; one by construction, up to rounding.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `e_i = (E_i + E_max) / (2 E_max)`, or `None` for a flat series where
/// `E_max = 0` and the ratio has no limit to take.
fn range_map(values: &[f64]) -> Option<Vec<f64>> {
    let e_max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if e_max == 0.0 {
        return None;
    }
    Some(values.iter().map(|v| (v + e_max) / (2.0 * e_max)).collect())
}

fn uniform(n: usize, kind: EncodingKind) -> StateVector {
    StateVector {
        values: vec![1.0 / (n as f64).sqrt(); n],
        kind,
    }
}

/// Encode fluctuations as probability amplitudes (`q_i = sqrt(p_i)`).
///
/// Every entry lies in `[0, 1]` and the squared entries form a probability
/// distribution. A flat series (all values equal) has no preferred
/// direction and encodes as the uniform vector `1/sqrt(N)`.
pub fn encode_amplitude(series: &FluctuationSeries) -> Result<StateVector> {
    let n = series.values.len();
    if n == 0 {
        return Err(Error::InsufficientData(
            "cannot encode an empty series".into(),
        ));
    }
    let Some(e) = range_map(&series.values) else {
        return Ok(uniform(n, EncodingKind::Amplitude));
    };
    let sum: f64 = e.iter().sum();
    if sum == 0.0 {
        // Every value sits at -E_max, i.e. the series is constant.
        return Ok(uniform(n, EncodingKind::Amplitude));
    }
    let values = e.iter().map(|&ei| (ei / sum).sqrt()).collect();
    Ok(StateVector {
        values,
        kind: EncodingKind::Amplitude,
    })
}

/// Encode fluctuations by normalizing `e` directly (`r = e / ||e||`).
///
/// A flat series with `E_max = 0` encodes as the uniform vector, matching
/// [`encode_amplitude`]; a series whose values all sit at `-E_max != 0`
/// yields the zero vector and is rejected as degenerate.
pub fn encode_l2(series: &FluctuationSeries) -> Result<StateVector> {
    let n = series.values.len();
    if n == 0 {
        return Err(Error::InsufficientData(
            "cannot encode an empty series".into(),
        ));
    }
    let Some(e) = range_map(&series.values) else {
        return Ok(uniform(n, EncodingKind::L2Direct));
    };
    let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateInput(
            "all values at -E_max encode to the zero vector".into(),
        ));
    }
    let values = e.iter().map(|&ei| ei / norm).collect();
    Ok(StateVector {
        values,
        kind: EncodingKind::L2Direct,
    })
}

/// Dispatch on [`EncodingKind`].
pub fn encode(series: &FluctuationSeries, kind: EncodingKind) -> Result<StateVector> {
    match kind {
        EncodingKind::Amplitude => encode_amplitude(series),
        EncodingKind::L2Direct => encode_l2(series),
    }
}
