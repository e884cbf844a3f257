//! Identify which uplink antenna an interfering satellite carrier comes
//! from, using only its downlink power history.
//!
//! Carriers transmitted from the same antenna share small, slow EIRP
//! fluctuations (pointing jitter, local weather) on top of the large
//! diurnal variation that affects every carrier on the downlink. This
//! crate turns that observation into a pipeline:
//!
//! 1. [`timeseries`] — interpolate raw EIRP readings onto a uniform grid
//!    (default 3 min) and subtract a Gaussian-weighted running average
//!    (default sigma 6 h), keeping only the fluctuations.
//! 2. [`encoding`] — map the fluctuation series to a unit-norm state
//!    vector.
//! 3. [`signature`] — cut the state vector into one row per period
//!    (default 24 h) and take the second right-singular vector of that
//!    matrix as the carrier's signature: the first singular vector
//!    absorbs what all carriers share, the second is antenna-specific.
//! 4. [`matching`] — compare signatures with the sign-blind sphere
//!    distance `D(r, s) = sqrt(1 - (r^T s)^2)` and rank known carriers
//!    against an interferer.
//! 5. [`stats`] — estimate identification performance (probability of
//!    identification, expected positives and false positives) from the
//!    empirical distance distributions and an antenna census.
//! 6. [`simgen`] — generate deterministic synthetic fleets with known
//!    ground truth, since measured fleet logs are not redistributable.
//!
//! The `carriersig` binary (see [`cli`]) wires these stages into
//! file-based subcommands; the `examples/` directory shows each major
//! capability as a runnable program.
//!
//! # Example
//!
//! ```
//! use carriersig::matching::distance;
//! use carriersig::simgen::{generate, FleetSpec};
//! use carriersig::stats::AntennaCensus;
//! use carriersig::timeseries::split_by_carrier;
//! use carriersig::{fleet_signatures, PipelineConfig};
//! use chrono::Duration;
//!
//! // Three carriers: C1 alone on antenna A1, C2 and C3 sharing A2.
//! let spec = FleetSpec {
//!     census: AntennaCensus::parse("1:1,2:1")?,
//!     duration: Duration::days(2),
//!     ..FleetSpec::default()
//! };
//! let fleet = generate(&spec)?;
//! let groups = split_by_carrier(fleet.measurements);
//! let signatures = fleet_signatures(&groups, &PipelineConfig::default())?;
//!
//! let same_antenna = distance(&signatures[1], &signatures[2])?;
//! let different_antenna = distance(&signatures[0], &signatures[1])?;
//! assert!(same_antenna < different_antenna);
//! # Ok::<(), carriersig::Error>(())
//! ```

pub mod cli;
pub mod encoding;
pub mod error;
pub mod io;
pub mod matching;
pub mod signature;
pub mod simgen;
pub mod stats;
pub mod timeseries;

use std::collections::BTreeMap;

use chrono::Duration;
use rayon::prelude::*;

pub use error::{Error, Result};

use encoding::EncodingKind;
use signature::Signature;
use timeseries::RawMeasurement;

/// Knobs of the measurements-to-signature pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Uniform resampling grid spacing.
    pub interval: Duration,
    /// Standard deviation of the Gaussian detrending window.
    pub window_sigma: Duration,
    /// Length of one period-matrix row.
    pub period: Duration,
    /// State-vector encoding.
    pub encoding: EncodingKind,
    /// Largest tolerated gap between raw measurements; carriers with a
    /// larger one were not present for the whole period and are rejected.
    pub max_gap: Duration,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            interval: Duration::minutes(3),
            window_sigma: Duration::hours(6),
            period: Duration::hours(24),
            encoding: EncodingKind::Amplitude,
            max_gap: Duration::hours(2),
        }
    }
}

/// Compute one carrier's signature from its raw measurements: gap check,
/// resample, detrend, encode, decompose.
pub fn carrier_signature(
    measurements: &[RawMeasurement],
    config: &PipelineConfig,
) -> Result<Signature> {
    if config.max_gap.num_seconds() <= 0 {
        return Err(Error::InvalidParameter(
            "maximum gap must be positive".into(),
        ));
    }
    if let Some(gap) = timeseries::max_gap(measurements) {
        if gap > config.max_gap {
            return Err(Error::InsufficientData(format!(
                "carrier {}: a {:.2} h measurement gap exceeds the {:.2} h limit",
                measurements[0].carrier_id,
                gap.num_seconds() as f64 / 3600.0,
                config.max_gap.num_seconds() as f64 / 3600.0
            )));
        }
    }
    let series = timeseries::resample_uniform(measurements, config.interval)?;
    let fluctuations = timeseries::gaussian_detrend(&series, config.window_sigma)?;
    signature::compute_signature(&fluctuations, config.period, config.encoding)
}

/// Compute signatures for a whole fleet, in parallel, in carrier-id order.
/// Fails on the first carrier (in id order) that cannot be processed.
pub fn fleet_signatures(
    groups: &BTreeMap<String, Vec<RawMeasurement>>,
    config: &PipelineConfig,
) -> Result<Vec<Signature>> {
    groups
        .par_iter()
        .map(|(_, measurements)| carrier_signature(measurements, config))
        .collect()
}
