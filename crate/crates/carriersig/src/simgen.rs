//! Synthetic carrier-fleet generator.
//!
//! Measured fleet logs are not redistributable, so tests and examples run
//! on synthetic ones. Each carrier's EIRP series is a sum of the causes a
//! monitoring station actually sees: a diurnal satellite term shared by
//! every carrier on the downlink (inclined-orbit motion through the
//! station's antenna pattern), an antenna-specific slow random component
//! shared by all carriers transmitted from the same uplink antenna
//! (pointing jitter, local weather), and independent per-carrier noise.
//! The antenna term is what identification exploits; the default
//! amplitudes (1.0 / 0.3 / 0.1 dB) are calibration knobs chosen so the
//! separation is visible but not trivial, not measured values.
//!
//! Generation is deterministic: one ChaCha stream per satellite, antenna,
//! and carrier, all derived from a single seed, so fleets are reproducible
//! bit for bit regardless of thread scheduling.

use std::f64::consts::TAU;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stats::AntennaCensus;
use crate::timeseries::{MeasurementValue, RawMeasurement};

/// Everything that determines a synthetic fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetSpec {
    /// Antennas and how many carriers each transmits.
    pub census: AntennaCensus,
    /// Timestamp of the first sample.
    pub start: DateTime<Utc>,
    /// Covered span; the end instant is exclusive, so a whole number of
    /// default periods fits exactly.
    pub duration: Duration,
    /// Sample spacing.
    pub interval: Duration,
    /// Amplitude of the shared 24 h sinusoid (plus a weaker second
    /// harmonic), in dB.
    pub diurnal_db: f64,
    /// Stationary standard deviation of the per-antenna colored noise, dB.
    pub antenna_db: f64,
    /// Standard deviation of the per-carrier white noise, dB.
    pub carrier_db: f64,
    /// Correlation time of the antenna component.
    pub antenna_correlation: Duration,
    pub seed: u64,
}

impl Default for FleetSpec {
    fn default() -> Self {
        FleetSpec {
            census: AntennaCensus::parse("1:27,2:1,3:1,6:2,9:1")
                .expect("default census is well-formed"),
            start: Utc.with_ymd_and_hms(2023, 12, 1, 0, 0, 0).unwrap(),
            duration: Duration::days(31),
            interval: Duration::minutes(3),
            diurnal_db: 1.0,
            antenna_db: 0.3,
            carrier_db: 0.1,
            antenna_correlation: Duration::hours(4),
            seed: 42,
        }
    }
}

impl FleetSpec {
    /// Parse a plain `key = value` config (one entry per line, `#`
    /// comments). Unset keys keep their defaults.
    ///
    /// Keys: `census`, `start`, `days`, `interval_minutes`, `diurnal_db`,
    /// `antenna_db`, `carrier_db`, `correlation_hours`, `seed`.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut spec = FleetSpec::default();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Malformed(format!(
                    "config line {}: expected key = value, got {line:?}",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::Malformed(format!("config line {}: bad {what} {value:?}", lineno + 1))
            };
            match key {
                "census" => spec.census = AntennaCensus::parse(value)?,
                "start" => {
                    spec.start = value
                        .parse::<DateTime<Utc>>()
                        .map_err(|_| bad("timestamp"))?
                }
                "days" => {
                    let days: f64 = value.parse().map_err(|_| bad("number"))?;
                    if !(days.is_finite() && days > 0.0) {
                        return Err(bad("duration"));
                    }
                    spec.duration = Duration::seconds((days * 86_400.0).round() as i64);
                }
                "interval_minutes" => {
                    let minutes: f64 = value.parse().map_err(|_| bad("number"))?;
                    if !(minutes.is_finite() && minutes > 0.0) {
                        return Err(bad("interval"));
                    }
                    spec.interval = Duration::seconds((minutes * 60.0).round() as i64);
                }
                "diurnal_db" => spec.diurnal_db = value.parse().map_err(|_| bad("number"))?,
                "antenna_db" => spec.antenna_db = value.parse().map_err(|_| bad("number"))?,
                "carrier_db" => spec.carrier_db = value.parse().map_err(|_| bad("number"))?,
                "correlation_hours" => {
                    let hours: f64 = value.parse().map_err(|_| bad("number"))?;
                    if !(hours.is_finite() && hours > 0.0) {
                        return Err(bad("correlation time"));
                    }
                    spec.antenna_correlation = Duration::seconds((hours * 3600.0).round() as i64);
                }
                "seed" => spec.seed = value.parse().map_err(|_| bad("integer"))?,
                _ => {
                    return Err(Error::Malformed(format!(
                        "config line {}: unknown key {key:?}",
                        lineno + 1
                    )))
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("diurnal_db", self.diurnal_db),
            ("antenna_db", self.antenna_db),
            ("carrier_db", self.carrier_db),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {value} must be a non-negative amplitude"
                )));
            }
        }
        if self.interval.num_seconds() <= 0 {
            return Err(Error::InvalidParameter(
                "sample interval must be positive".into(),
            ));
        }
        if self.antenna_correlation.num_seconds() <= 0 {
            return Err(Error::InvalidParameter(
                "antenna correlation time must be positive".into(),
            ));
        }
        if self.num_samples() < 2 {
            return Err(Error::InvalidParameter(format!(
                "duration of {} s covers fewer than 2 samples at {} s spacing",
                self.duration.num_seconds(),
                self.interval.num_seconds()
            )));
        }
        Ok(())
    }

    /// Samples per carrier: floor(duration / interval), end exclusive.
    pub fn num_samples(&self) -> usize {
        let d = self.duration.num_seconds();
        let i = self.interval.num_seconds();
        if d <= 0 || i <= 0 {
            return 0;
        }
        (d / i) as usize
    }
}

/// A generated fleet: the measurement log plus the ground truth that a
/// real monitoring station would get from its carrier database.
#[derive(Debug, Clone, PartialEq)]
pub struct Fleet {
    /// Sorted by carrier id, then time.
    pub measurements: Vec<RawMeasurement>,
    /// `(carrier_id, antenna_id)` pairs in carrier order.
    pub assignments: Vec<(String, String)>,
}

fn id_width(count: usize) -> usize {
    count.max(1).to_string().len()
}

// RNG stream layout: stream 0 draws the satellite-level diurnal phases,
// streams 1..=N_a the antenna paths, and streams N_a+1.. the carriers.
// Keeping them separate makes every component reproducible on its own.
const SATELLITE_STREAM: u64 = 0;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generate the fleet described by `spec`.
pub fn generate(spec: &FleetSpec) -> Result<Fleet> {
    spec.validate()?;

    let num_antennas = spec.census.num_antennas();
    let num_carriers = spec.census.num_carriers();
    let n = spec.num_samples();
    let dt_hours = spec.interval.num_seconds() as f64 / 3600.0;

    // Antenna ids in census order (ascending carriers-per-antenna), then
    // carriers numbered across antennas.
    let antenna_width = id_width(num_antennas);
    let carrier_width = id_width(num_carriers);
    let mut antenna_of: Vec<usize> = Vec::with_capacity(num_carriers);
    let mut antenna_ids: Vec<String> = Vec::with_capacity(num_antennas);
    for (k, count) in spec.census.entries() {
        for _ in 0..count {
            let a = antenna_ids.len();
            antenna_ids.push(format!("A{:0antenna_width$}", a + 1));
            for _ in 0..k {
                antenna_of.push(a);
            }
        }
    }
    let carrier_ids: Vec<String> = (0..num_carriers)
        .map(|c| format!("C{:0carrier_width$}", c + 1))
        .collect();

    // Shared diurnal term: 24 h fundamental plus a weaker second harmonic
    // with satellite-specific phases and weight.
    let mut sat_rng = stream_rng(spec.seed, SATELLITE_STREAM);
    let phase1: f64 = sat_rng.random_range(0.0..TAU);
    let phase2: f64 = sat_rng.random_range(0.0..TAU);
    let harmonic_weight: f64 = sat_rng.random_range(0.2..0.5);
    let diurnal: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 * dt_hours;
            spec.diurnal_db
                * ((TAU * t / 24.0 + phase1).sin()
                    + harmonic_weight * (2.0 * TAU * t / 24.0 + phase2).sin())
        })
        .collect();

    // Antenna components: stationary first-order autoregressive (an
    // Ornstein-Uhlenbeck process sampled on the grid), so the component
    // survives 6 h detrending without being a pure drift.
    let alpha = (-dt_hours / (spec.antenna_correlation.num_seconds() as f64 / 3600.0)).exp();
    let innovation_scale = spec.antenna_db * (1.0 - alpha * alpha).sqrt();
    let antenna_paths: Vec<Vec<f64>> = (0..num_antennas)
        .into_par_iter()
        .map(|a| {
            let mut rng = stream_rng(spec.seed, 1 + a as u64);
            let mut x: f64 = spec.antenna_db * rng.sample::<f64, _>(StandardNormal);
            let mut path = Vec::with_capacity(n);
            for _ in 0..n {
                path.push(x);
                x = alpha * x + innovation_scale * rng.sample::<f64, _>(StandardNormal);
            }
            path
        })
        .collect();

    let per_carrier: Vec<Vec<RawMeasurement>> = (0..num_carriers)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(spec.seed, 1 + num_antennas as u64 + c as u64);
            let baseline: f64 = rng.random_range(40.0..60.0);
            let path = &antenna_paths[antenna_of[c]];
            (0..n)
                .map(|k| {
                    let eirp = baseline
                        + diurnal[k]
                        + path[k]
                        + spec.carrier_db * rng.sample::<f64, _>(StandardNormal);
                    RawMeasurement {
                        carrier_id: carrier_ids[c].clone(),
                        timestamp: spec.start + spec.interval * (k as i32),
                        value: MeasurementValue::EirpDbw(eirp),
                    }
                })
                .collect()
        })
        .collect();

    let assignments: Vec<(String, String)> = (0..num_carriers)
        .map(|c| (carrier_ids[c].clone(), antenna_ids[antenna_of[c]].clone()))
        .collect();

    Ok(Fleet {
        measurements: per_carrier.into_iter().flatten().collect(),
        assignments,
    })
}
