//! Carrier power time series: EIRP computation, resampling to a uniform
//! grid, and removal of the slow running average.
//!
//! Raw monitoring data arrives as timestamped power readings per carrier,
//! either as ready-made EIRP values or as a link-budget tuple that is
//! converted with [`compute_eirp`]. The readings are interpolated onto a
//! uniform grid (default three minutes) and a Gaussian-weighted running
//! average (default standard deviation six hours) is subtracted, leaving
//! only the fluctuations that carry antenna-specific information.

use chrono::{DateTime, Duration, Utc};

use crate::error::{Error, Result};

/// dBm to dBW conversion offset.
const DBM_TO_DBW: f64 = 30.0;

/// The power reading attached to a raw measurement: either a downlink EIRP
/// value, or the link-budget terms it is computed from.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementValue {
    /// EIRP in dBW.
    EirpDbw(f64),
    /// Link-budget terms: power at the analyzer input plus the gains and
    /// losses between the antenna and the analyzer.
    LinkBudget {
        /// Power at the analyzer input, dBm.
        p_sa_dbm: f64,
        /// Free-space loss, dB.
        l_fs_db: f64,
        /// Receive antenna gain, dB.
        g_ant_db: f64,
        /// Path gain from the antenna feed to the analyzer, dB.
        g_path_db: f64,
    },
}

/// One timestamped power reading for one carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMeasurement {
    pub carrier_id: String,
    pub timestamp: DateTime<Utc>,
    pub value: MeasurementValue,
}

impl RawMeasurement {
    /// The measurement's EIRP in dBW, evaluating the link budget if needed.
    pub fn eirp_dbw(&self) -> Result<f64> {
        match self.value {
            MeasurementValue::EirpDbw(v) => {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::InvalidMeasurement(format!(
                        "non-finite EIRP for carrier {}",
                        self.carrier_id
                    )))
                }
            }
            MeasurementValue::LinkBudget {
                p_sa_dbm,
                l_fs_db,
                g_ant_db,
                g_path_db,
            } => compute_eirp(p_sa_dbm, l_fs_db, g_ant_db, g_path_db),
        }
    }
}

/// Downlink EIRP in dBW from the link-budget terms:
/// analyzer input power plus free-space loss, minus the receive antenna and
/// feed-path gains, minus the 30 dB conversion from dBm to dBW.
pub fn compute_eirp(p_sa_dbm: f64, l_fs_db: f64, g_ant_db: f64, g_path_db: f64) -> Result<f64> {
    for (name, v) in [
        ("p_sa_dbm", p_sa_dbm),
        ("l_fs_db", l_fs_db),
        ("g_ant_db", g_ant_db),
        ("g_path_db", g_path_db),
    ] {
        if !v.is_finite() {
            return Err(Error::InvalidMeasurement(format!("non-finite {name}: {v}")));
        }
    }
    Ok(p_sa_dbm + l_fs_db - g_ant_db - g_path_db - DBM_TO_DBW)
}

/// Uniformly sampled EIRP values for one carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierSeries {
    pub carrier_id: String,
    /// Uplink antenna, when known. Unknown for an interferer.
    pub antenna_id: Option<String>,
    pub start: DateTime<Utc>,
    pub interval: Duration,
    /// EIRP in dBW at `start`, `start + interval`, ...
    pub values: Vec<f64>,
}

impl CarrierSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// EIRP fluctuations after subtraction of the running average, on the same
/// grid as the source [`CarrierSeries`].
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSeries {
    pub carrier_id: String,
    pub antenna_id: Option<String>,
    pub start: DateTime<Utc>,
    pub interval: Duration,
    /// Detrended fluctuation values in dB.
    pub values: Vec<f64>,
}

impl FluctuationSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Largest gap between consecutive measurements, or `None` for fewer than
/// two measurements. Used to reject carriers that were not present for the
/// whole analysis period.
pub fn max_gap(measurements: &[RawMeasurement]) -> Option<Duration> {
    measurements
        .windows(2)
        .map(|w| w[1].timestamp - w[0].timestamp)
        .max()
}

/// Group a measurement log by carrier, preserving the per-carrier row
/// order. Keys iterate in sorted carrier-id order.
pub fn split_by_carrier(
    measurements: Vec<RawMeasurement>,
) -> std::collections::BTreeMap<String, Vec<RawMeasurement>> {
    let mut groups: std::collections::BTreeMap<String, Vec<RawMeasurement>> =
        std::collections::BTreeMap::new();
    for m in measurements {
        groups.entry(m.carrier_id.clone()).or_default().push(m);
    }
    groups
}

/// Interpolate irregular measurements onto a uniform grid.
///
/// The grid starts at the first measurement and steps by `interval`; only
/// grid points inside the measured span are produced, so no extrapolation
/// ever happens. Values are linearly interpolated between the neighbouring
/// measurements, which reproduces the inputs exactly at coinciding times.
///
/// The measurements must belong to a single carrier and be sorted with
/// strictly increasing timestamps.
pub fn resample_uniform(
    measurements: &[RawMeasurement],
    interval: Duration,
) -> Result<CarrierSeries> {
    if interval <= Duration::zero() {
        return Err(Error::InvalidParameter(format!(
            "interval must be positive, got {interval}"
        )));
    }
    if measurements.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "resampling needs at least 2 measurements, got {}",
            measurements.len()
        )));
    }
    let carrier_id = measurements[0].carrier_id.clone();
    for pair in measurements.windows(2) {
        if pair[1].carrier_id != carrier_id {
            return Err(Error::InvalidMeasurement(format!(
                "mixed carriers in one series: {} and {}",
                carrier_id, pair[1].carrier_id
            )));
        }
        if pair[1].timestamp <= pair[0].timestamp {
            return Err(Error::InvalidMeasurement(format!(
                "timestamps not strictly increasing for carrier {} at {}",
                carrier_id, pair[1].timestamp
            )));
        }
    }

    let start = measurements[0].timestamp;
    let span_s = (measurements[measurements.len() - 1].timestamp - start).num_seconds();
    let interval_s = interval.num_seconds();
    if interval_s == 0 {
        return Err(Error::InvalidParameter(
            "interval must be at least one second".into(),
        ));
    }
    if span_s < 2 * interval_s {
        return Err(Error::InsufficientData(format!(
            "measured span of carrier {carrier_id} ({span_s} s) covers fewer than 2 intervals"
        )));
    }

    let eirp: Vec<f64> = measurements
        .iter()
        .map(|m| m.eirp_dbw())
        .collect::<Result<_>>()?;
    let times: Vec<i64> = measurements
        .iter()
        .map(|m| (m.timestamp - start).num_seconds())
        .collect();

    let n_points = (span_s / interval_s) as usize + 1;
    let mut values = Vec::with_capacity(n_points);
    let mut seg = 0usize; // index of the segment's left measurement
    for k in 0..n_points {
        let t = k as i64 * interval_s;
        while times[seg + 1] < t {
            seg += 1;
        }
        let (t0, t1) = (times[seg], times[seg + 1]);
        let (v0, v1) = (eirp[seg], eirp[seg + 1]);
        let value = if t == t0 {
            v0
        } else if t == t1 {
            v1
        } else {
            v0 + (v1 - v0) * ((t - t0) as f64 / (t1 - t0) as f64)
        };
        values.push(value);
    }

    Ok(CarrierSeries {
        carrier_id,
        antenna_id: None,
        start,
        interval,
        values,
    })
}

/// Subtract a Gaussian-weighted running average from the series.
///
/// The weight of sample `j` in the average at sample `i` is
/// `exp(-(t_i - t_j)^2 / (2 sigma^2))`, truncated at `|t_i - t_j| <= 4
/// sigma`, with the weights renormalized over whatever part of the window
/// exists near the series edges. Constant offsets and slow drifts (slower
/// than roughly `sigma`) are removed; the result has the same grid as the
/// input.
pub fn gaussian_detrend(series: &CarrierSeries, sigma: Duration) -> Result<FluctuationSeries> {
    let sigma_s = sigma.num_milliseconds() as f64 / 1000.0;
    if !sigma_s.is_finite() || sigma_s <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "window sigma must be positive, got {sigma_s} s"
        )));
    }
    let n = series.values.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "detrending needs at least 2 samples, got {n}"
        )));
    }
    let step_s = series.interval.num_milliseconds() as f64 / 1000.0;
    if !step_s.is_finite() || step_s <= 0.0 {
        return Err(Error::InvalidParameter(
            "series interval must be positive".into(),
        ));
    }

    // Lag d contributes iff d * step <= 4 sigma.
    let width = ((4.0 * sigma_s / step_s).floor() as usize).min(n - 1);
    let kernel: Vec<f64> = (0..=width)
        .map(|d| {
            let dt = d as f64 * step_s;
            (-dt * dt / (2.0 * sigma_s * sigma_s)).exp()
        })
        .collect();

    let x = &series.values;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let mut num = kernel[0] * x[i];
        let mut den = kernel[0];
        for d in 1..=width {
            let k = kernel[d];
            if i >= d {
                num += k * x[i - d];
                den += k;
            }
            if i + d < n {
                num += k * x[i + d];
                den += k;
            }
        }
        values.push(x[i] - num / den);
    }

    Ok(FluctuationSeries {
        carrier_id: series.carrier_id.clone(),
        antenna_id: series.antenna_id.clone(),
        start: series.start,
        interval: series.interval,
        values,
    })
}
