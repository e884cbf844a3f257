//! CSV and JSON artifact formats.
//!
//! Everything written here is deterministic: fixed column orders, floats
//! at 17 significant digits (`{:.16e}`, enough to round-trip any f64
//! exactly), `\n` line endings, and RFC 3339 UTC timestamps. Reading is
//! strict — unknown headers, bad field counts, unparsable values, and
//! duplicate keys are all rejected with the offending line.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, SecondsFormat, Utc};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::DistanceRecord;
use crate::signature::Signature;
use crate::stats::Histogram;
use crate::timeseries::{MeasurementValue, RawMeasurement};

/// Format a float with 17 significant digits, exact under round-trip.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Round to `digits` significant digits, for human-facing report fields.
pub fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() || digits == 0 {
        return x;
    }
    format!("{:.*e}", digits as usize - 1, x)
        .parse()
        .expect("scientific notation round-trips")
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(reader)
}

fn malformed(path: &Path, line: u64, what: impl std::fmt::Display) -> Error {
    Error::Malformed(format!("{} line {line}: {what}", path.display()))
}

fn parse_f64(path: &Path, line: u64, name: &str, text: &str) -> Result<f64> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| malformed(path, line, format!("bad {name} value {text:?}")))?;
    if !value.is_finite() {
        return Err(malformed(path, line, format!("{name} is not finite")));
    }
    Ok(value)
}

fn parse_timestamp(path: &Path, line: u64, text: &str) -> Result<DateTime<Utc>> {
    text.trim()
        .parse::<DateTime<Utc>>()
        .map_err(|_| malformed(path, line, format!("bad timestamp {text:?}")))
}

// --------------------------------------------------------------------------
// Measurements
// --------------------------------------------------------------------------

/// Read a measurements CSV.
///
/// Two header forms are accepted: `carrier_id,timestamp,eirp_dbw` with
/// pre-computed EIRP, or the link-budget form
/// `carrier_id,timestamp,p_sa_dbm,l_fs_db,g_ant_db,g_path_db`. Either may
/// carry a trailing `snr_db` column; when it is present and `min_snr` is
/// set, rows below the threshold are dropped at ingestion.
///
/// Rows are returned sorted by carrier id and timestamp; two rows for the
/// same carrier and instant are an error.
pub fn read_measurements(
    path: impl AsRef<Path>,
    min_snr: Option<f64>,
) -> Result<Vec<RawMeasurement>> {
    let path = path.as_ref();
    let mut reader = csv_reader(open(path)?);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(path, 1, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    const EIRP: [&str; 3] = ["carrier_id", "timestamp", "eirp_dbw"];
    const BUDGET: [&str; 6] = [
        "carrier_id",
        "timestamp",
        "p_sa_dbm",
        "l_fs_db",
        "g_ant_db",
        "g_path_db",
    ];
    let (budget_form, has_snr) = if headers == EIRP {
        (false, false)
    } else if headers == BUDGET {
        (true, false)
    } else if headers.len() == EIRP.len() + 1 && headers[..3] == EIRP && headers[3] == "snr_db" {
        (false, true)
    } else if headers.len() == BUDGET.len() + 1 && headers[..6] == BUDGET && headers[6] == "snr_db"
    {
        (true, true)
    } else {
        return Err(malformed(
            path,
            1,
            format!("unrecognized measurement header {headers:?}"),
        ));
    };

    let mut measurements = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(malformed(
                path,
                line,
                format!("expected {} fields, got {}", headers.len(), record.len()),
            ));
        }
        if let (true, Some(gate)) = (has_snr, min_snr) {
            let snr = parse_f64(path, line, "snr_db", &record[headers.len() - 1])?;
            if snr < gate {
                continue;
            }
        }
        let carrier_id = record[0].trim().to_string();
        if carrier_id.is_empty() {
            return Err(malformed(path, line, "empty carrier id"));
        }
        let timestamp = parse_timestamp(path, line, &record[1])?;
        let value = if budget_form {
            MeasurementValue::LinkBudget {
                p_sa_dbm: parse_f64(path, line, "p_sa_dbm", &record[2])?,
                l_fs_db: parse_f64(path, line, "l_fs_db", &record[3])?,
                g_ant_db: parse_f64(path, line, "g_ant_db", &record[4])?,
                g_path_db: parse_f64(path, line, "g_path_db", &record[5])?,
            }
        } else {
            MeasurementValue::EirpDbw(parse_f64(path, line, "eirp_dbw", &record[2])?)
        };
        measurements.push(RawMeasurement {
            carrier_id,
            timestamp,
            value,
        });
    }

    measurements.sort_by(|a, b| {
        a.carrier_id
            .cmp(&b.carrier_id)
            .then(a.timestamp.cmp(&b.timestamp))
    });
    for pair in measurements.windows(2) {
        if pair[0].carrier_id == pair[1].carrier_id && pair[0].timestamp == pair[1].timestamp {
            return Err(Error::Malformed(format!(
                "{}: duplicate measurement for carrier {} at {}",
                path.display(),
                pair[0].carrier_id,
                pair[0].timestamp.to_rfc3339_opts(SecondsFormat::Secs, true)
            )));
        }
    }
    Ok(measurements)
}

/// Write measurements in the pre-computed EIRP form.
pub fn write_measurements(
    path: impl AsRef<Path>,
    measurements: &[RawMeasurement],
) -> Result<()> {
    let path = path.as_ref();
    let rows: Vec<[String; 3]> = measurements
        .iter()
        .map(|m| {
            Ok([
                m.carrier_id.clone(),
                m.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
                full(m.eirp_dbw()?),
            ])
        })
        .collect::<Result<_>>()?;
    let mut writer = csv::Writer::from_writer(create(path)?);
    let mut run = || -> std::result::Result<(), csv::Error> {
        writer.write_record(["carrier_id", "timestamp", "eirp_dbw"])?;
        for row in &rows {
            writer.write_record(row)?;
        }
        writer.flush().map_err(csv::Error::from)
    };
    run().map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

// --------------------------------------------------------------------------
// Carrier assignments
// --------------------------------------------------------------------------

/// One row of the carrier database: which antenna (and optionally which
/// satellite) a carrier belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarrierRecord {
    pub carrier_id: String,
    pub antenna_id: String,
    /// Set when the fleet spans several satellites; carriers relayed by a
    /// different satellite than the interferer are not candidates unless
    /// explicitly requested.
    pub satellite_id: Option<String>,
}

/// Read the carriers CSV: `carrier_id,antenna_id` plus an optional
/// `satellite_id` column.
pub fn read_carriers(path: impl AsRef<Path>) -> Result<Vec<CarrierRecord>> {
    let path = path.as_ref();
    let mut reader = csv_reader(open(path)?);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(path, 1, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let has_satellite = match headers.len() {
        2 if headers == ["carrier_id", "antenna_id"] => false,
        3 if headers == ["carrier_id", "antenna_id", "satellite_id"] => true,
        _ => {
            return Err(malformed(
                path,
                1,
                format!("unrecognized carriers header {headers:?}"),
            ))
        }
    };

    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(malformed(
                path,
                line,
                format!("expected {} fields, got {}", headers.len(), record.len()),
            ));
        }
        let carrier_id = record[0].trim().to_string();
        let antenna_id = record[1].trim().to_string();
        if carrier_id.is_empty() || antenna_id.is_empty() {
            return Err(malformed(path, line, "empty carrier or antenna id"));
        }
        if !seen.insert(carrier_id.clone()) {
            return Err(malformed(
                path,
                line,
                format!("carrier {carrier_id} assigned twice"),
            ));
        }
        let satellite_id = if has_satellite {
            let s = record[2].trim();
            (!s.is_empty()).then(|| s.to_string())
        } else {
            None
        };
        records.push(CarrierRecord {
            carrier_id,
            antenna_id,
            satellite_id,
        });
    }
    Ok(records)
}

/// Write the carriers CSV; the `satellite_id` column appears only when
/// some record carries one.
pub fn write_carriers(path: impl AsRef<Path>, records: &[CarrierRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_writer(create(path)?);
    let with_satellite = records.iter().any(|r| r.satellite_id.is_some());
    let mut run = || -> std::result::Result<(), csv::Error> {
        if with_satellite {
            writer.write_record(["carrier_id", "antenna_id", "satellite_id"])?;
            for r in records {
                writer.write_record([
                    r.carrier_id.as_str(),
                    r.antenna_id.as_str(),
                    r.satellite_id.as_deref().unwrap_or(""),
                ])?;
            }
        } else {
            writer.write_record(["carrier_id", "antenna_id"])?;
            for r in records {
                writer.write_record([r.carrier_id.as_str(), r.antenna_id.as_str()])?;
            }
        }
        writer.flush().map_err(csv::Error::from)
    };
    run().map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

// --------------------------------------------------------------------------
// Signatures
// --------------------------------------------------------------------------

/// Write signatures as `carrier_id,period_hours,samples_per_period,v2_0,…`.
///
/// All signatures in one file must share the period and vector length,
/// since the component columns live in the header. The low-rank flag is a
/// runtime diagnostic and is not persisted.
pub fn write_signatures(path: impl AsRef<Path>, signatures: &[Signature]) -> Result<()> {
    let path = path.as_ref();
    let first = signatures.first().ok_or_else(|| {
        Error::InvalidParameter("refusing to write an empty signature set".into())
    })?;
    let n = first.period_samples();
    let period = first.period;
    for s in signatures {
        if s.period_samples() != n || s.period != period {
            return Err(Error::ShapeMismatch(format!(
                "carrier {}: signature shape {} x {} h differs from {} x {} h",
                s.carrier_id,
                s.period_samples(),
                s.period_hours(),
                n,
                first.period_hours()
            )));
        }
    }

    let mut writer = csv::Writer::from_writer(create(path)?);
    let mut run = || -> std::result::Result<(), csv::Error> {
        let mut header = vec![
            "carrier_id".to_string(),
            "period_hours".to_string(),
            "samples_per_period".to_string(),
        ];
        header.extend((0..n).map(|i| format!("v2_{i}")));
        writer.write_record(&header)?;
        for s in signatures {
            let mut row = vec![
                s.carrier_id.clone(),
                format!("{}", s.period_hours()),
                n.to_string(),
            ];
            row.extend(s.vector().iter().map(|&x| full(x)));
            writer.write_record(&row)?;
        }
        writer.flush().map_err(csv::Error::from)
    };
    run().map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

/// Read a signatures CSV written by [`write_signatures`].
pub fn read_signatures(path: impl AsRef<Path>) -> Result<Vec<Signature>> {
    let path = path.as_ref();
    let mut reader = csv_reader(open(path)?);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(path, 1, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.len() < 4
        || headers[..3] != ["carrier_id", "period_hours", "samples_per_period"]
        || headers[3..]
            .iter()
            .enumerate()
            .any(|(i, h)| h != &format!("v2_{i}"))
    {
        return Err(malformed(
            path,
            1,
            format!("unrecognized signature header {headers:?}"),
        ));
    }
    let n = headers.len() - 3;

    let mut signatures = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(malformed(
                path,
                line,
                format!("expected {} fields, got {}", headers.len(), record.len()),
            ));
        }
        let carrier_id = record[0].trim().to_string();
        let period_hours = parse_f64(path, line, "period_hours", &record[1])?;
        if !period_hours.is_finite() || period_hours <= 0.0 {
            return Err(malformed(path, line, "period_hours must be positive"));
        }
        let samples: usize = record[2]
            .trim()
            .parse()
            .map_err(|_| malformed(path, line, "bad samples_per_period"))?;
        if samples != n {
            return Err(malformed(
                path,
                line,
                format!("samples_per_period {samples} does not match the {n} header columns"),
            ));
        }
        let mut vector = Vec::with_capacity(n);
        for i in 0..n {
            vector.push(parse_f64(path, line, &format!("v2_{i}"), &record[3 + i])?);
        }
        let period = Duration::seconds((period_hours * 3600.0).round() as i64);
        signatures.push(
            Signature::new(carrier_id, period, vector, false)
                .map_err(|e| malformed(path, line, e))?,
        );
    }
    Ok(signatures)
}

// --------------------------------------------------------------------------
// Distances
// --------------------------------------------------------------------------

/// Write pairwise distances as `carrier_a,carrier_b,distance,same_antenna`;
/// the flag column is empty when antenna assignments were unavailable.
pub fn write_distances(path: impl AsRef<Path>, records: &[DistanceRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_writer(create(path)?);
    let mut run = || -> std::result::Result<(), csv::Error> {
        writer.write_record(["carrier_a", "carrier_b", "distance", "same_antenna"])?;
        for r in records {
            writer.write_record([
                r.carrier_a.as_str(),
                r.carrier_b.as_str(),
                &full(r.distance),
                match r.same_antenna {
                    Some(true) => "true",
                    Some(false) => "false",
                    None => "",
                },
            ])?;
        }
        writer.flush().map_err(csv::Error::from)
    };
    run().map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

/// Read a distances CSV written by [`write_distances`].
pub fn read_distances(path: impl AsRef<Path>) -> Result<Vec<DistanceRecord>> {
    let path = path.as_ref();
    let mut reader = csv_reader(open(path)?);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(path, 1, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers != ["carrier_a", "carrier_b", "distance", "same_antenna"] {
        return Err(malformed(
            path,
            1,
            format!("unrecognized distances header {headers:?}"),
        ));
    }

    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(malformed(
                path,
                line,
                format!("expected 4 fields, got {}", record.len()),
            ));
        }
        let distance = parse_f64(path, line, "distance", &record[2])?;
        if !(-1e-12..=1.0 + 1e-12).contains(&distance) {
            return Err(malformed(
                path,
                line,
                format!("distance {distance} is outside [0, 1]"),
            ));
        }
        let same_antenna = match record[3].trim() {
            "" => None,
            "true" => Some(true),
            "false" => Some(false),
            other => {
                return Err(malformed(
                    path,
                    line,
                    format!("bad same_antenna value {other:?}"),
                ))
            }
        };
        records.push(DistanceRecord {
            carrier_a: record[0].trim().to_string(),
            carrier_b: record[1].trim().to_string(),
            distance: distance.clamp(0.0, 1.0),
            same_antenna,
        });
    }
    Ok(records)
}

// --------------------------------------------------------------------------
// Histograms and reports
// --------------------------------------------------------------------------

/// Write the two distance histograms side by side:
/// `bin_lo,bin_hi,count_same,count_different`.
pub fn write_histograms(
    path: impl AsRef<Path>,
    same: &Histogram,
    different: &Histogram,
) -> Result<()> {
    let path = path.as_ref();
    if same.bin_width() != different.bin_width() || same.num_bins() != different.num_bins() {
        return Err(Error::ShapeMismatch(
            "histograms have different binning".into(),
        ));
    }
    let mut writer = csv::Writer::from_writer(create(path)?);
    let mut run = || -> std::result::Result<(), csv::Error> {
        writer.write_record(["bin_lo", "bin_hi", "count_same", "count_different"])?;
        for i in 0..same.num_bins() {
            let (lo, hi) = same.bin_bounds(i);
            writer.write_record([
                full(lo),
                full(hi),
                same.counts()[i].to_string(),
                different.counts()[i].to_string(),
            ])?;
        }
        writer.flush().map_err(csv::Error::from)
    };
    run().map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

/// Write a JSON report: pretty-printed, trailing newline.
pub fn write_json(path: impl AsRef<Path>, value: &impl Serialize) -> Result<()> {
    let path = path.as_ref();
    let mut writer = create(path)?;
    serde_json::to_writer_pretty(&mut writer, value)
        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}
