//! Command-line pipeline: simulate, signatures, distances, identify,
//! evaluate.
//!
//! Every subcommand reads and writes the CSV/JSON formats from [`crate::io`]
//! and is deterministic: a fixed seed and identical inputs reproduce every
//! artifact byte for byte. JSON reports embed a `config` block echoing the
//! parameters that influenced them, so a report is reproducible from the
//! artifact alone.

use std::collections::HashMap;
use std::path::PathBuf;

use chrono::Duration;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::encoding::EncodingKind;
use crate::error::{Error, Result};
use crate::io::{self, round_significant, CarrierRecord};
use crate::matching::{all_pairs, rank_candidates};
use crate::signature::Signature;
use crate::stats::{self, AntennaCensus};
use crate::timeseries::split_by_carrier;
use crate::{carrier_signature, simgen, PipelineConfig};

/// SNR gate applied at ingestion when the measurements file carries an
/// `snr_db` column: readings this far below clean reception are noise-
/// dominated and are dropped.
const MIN_SNR_DB: f64 = 3.0;

/// Carrier-signature toolkit: SVD signatures of satellite carrier EIRP
/// series, interferer identification, and performance statistics.
#[derive(Debug, Parser)]
#[command(name = "carriersig", version, max_term_width = 100)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

/// Parameters shared by the pipeline stages.
#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Resampling grid spacing in minutes.
    #[arg(long, global = true, default_value_t = 3.0)]
    pub interval_minutes: f64,

    /// Standard deviation of the Gaussian detrending window, in hours.
    #[arg(long, global = true, default_value_t = 6.0)]
    pub window_sigma_hours: f64,

    /// Length of one period row of the period matrix, in hours.
    #[arg(long, global = true, default_value_t = 24.0)]
    pub period_hours: f64,

    /// State-vector encoding.
    #[arg(long, global = true, value_enum, default_value_t = EncodingArg::Amplitude)]
    pub encoding: EncodingArg,

    /// Result-set distance threshold D_t.
    #[arg(long, global = true, default_value_t = 0.4)]
    pub threshold: f64,

    /// Histogram bin width.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub bin_width: f64,

    /// Largest tolerated gap between measurements, in hours; carriers
    /// with a larger one are skipped as not present for the whole period.
    #[arg(long, global = true, default_value_t = 2.0)]
    pub max_gap_hours: f64,

    /// Seed for `simulate`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Keep identification candidates relayed by other satellites
    /// (excluded by default: they inflate the false-positive rate).
    #[arg(long, global = true)]
    pub include_other_satellites: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    /// Shifted-amplitude probability encoding.
    Amplitude,
    /// Direct l2 normalization.
    L2,
}

impl From<EncodingArg> for EncodingKind {
    fn from(arg: EncodingArg) -> Self {
        match arg {
            EncodingArg::Amplitude => EncodingKind::Amplitude,
            EncodingArg::L2 => EncodingKind::L2Direct,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic carrier fleet with known ground truth.
    Simulate {
        /// Fleet config file (key = value lines); flags override it.
        #[arg(long)]
        config: Option<PathBuf>,

        /// Covered timespan in days (fractions allowed).
        #[arg(long)]
        days: Option<f64>,

        /// Antenna census as carriers:antennas pairs, e.g. 1:27,2:1.
        #[arg(long)]
        census: Option<String>,

        /// Diurnal amplitude in dB.
        #[arg(long)]
        diurnal_db: Option<f64>,

        /// Antenna-component amplitude in dB.
        #[arg(long)]
        antenna_db: Option<f64>,

        /// Per-carrier noise amplitude in dB.
        #[arg(long)]
        carrier_db: Option<f64>,

        /// Output measurements CSV.
        #[arg(long, default_value = "measurements.csv")]
        out_measurements: PathBuf,

        /// Output ground-truth carriers CSV.
        #[arg(long, default_value = "carriers.csv")]
        out_carriers: PathBuf,
    },

    /// Compute one signature per carrier from a measurements CSV.
    Signatures {
        /// Input measurements CSV.
        #[arg(long)]
        measurements: PathBuf,

        /// Output signatures CSV.
        #[arg(long, default_value = "signatures.csv")]
        out: PathBuf,
    },

    /// Compute all pairwise distances between signatures.
    Distances {
        /// Input signatures CSV.
        #[arg(long)]
        signatures: PathBuf,

        /// Carrier database for the same-antenna ground truth column.
        #[arg(long)]
        carriers: Option<PathBuf>,

        /// Output distances CSV.
        #[arg(long, default_value = "distances.csv")]
        out: PathBuf,
    },

    /// Rank known carriers against one interferer.
    Identify {
        /// Input signatures CSV (must contain the interferer).
        #[arg(long)]
        signatures: PathBuf,

        /// Carrier database with antenna (and optionally satellite) ids.
        #[arg(long)]
        carriers: Option<PathBuf>,

        /// Carrier id of the interferer.
        #[arg(long)]
        interferer: String,

        /// Output report JSON.
        #[arg(long, default_value = "identify.json")]
        out: PathBuf,
    },

    /// Evaluate identification performance from pairwise distances.
    Evaluate {
        /// Input distances CSV with same-antenna flags.
        #[arg(long)]
        distances: PathBuf,

        /// Antenna census as carriers:antennas pairs, e.g. 1:27,2:1.
        #[arg(long)]
        census: Option<String>,

        /// Carrier database to derive the census from instead.
        #[arg(long)]
        carriers: Option<PathBuf>,

        /// Output report JSON.
        #[arg(long, default_value = "evaluate.json")]
        out_report: PathBuf,

        /// Output histogram CSV.
        #[arg(long, default_value = "histogram.csv")]
        out_histogram: PathBuf,
    },
}

fn duration_from(value: f64, unit_seconds: f64, name: &str) -> Result<Duration> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {value} must be positive"
        )));
    }
    let seconds = (value * unit_seconds).round();
    if seconds < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} = {value} is below one second"
        )));
    }
    Ok(Duration::seconds(seconds as i64))
}

impl GlobalOpts {
    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        Ok(PipelineConfig {
            interval: duration_from(self.interval_minutes, 60.0, "--interval-minutes")?,
            window_sigma: duration_from(self.window_sigma_hours, 3600.0, "--window-sigma-hours")?,
            period: duration_from(self.period_hours, 3600.0, "--period-hours")?,
            encoding: self.encoding.into(),
            max_gap: duration_from(self.max_gap_hours, 3600.0, "--max-gap-hours")?,
        })
    }
}

/// Execute one parsed invocation.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            ref config,
            days,
            ref census,
            diurnal_db,
            antenna_db,
            carrier_db,
            ref out_measurements,
            ref out_carriers,
        } => {
            let mut spec = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        Error::Io(std::io::Error::new(
                            e.kind(),
                            format!("{}: {e}", path.display()),
                        ))
                    })?;
                    simgen::FleetSpec::from_key_values(&text)?
                }
                None => simgen::FleetSpec::default(),
            };
            spec.interval = duration_from(cli.global.interval_minutes, 60.0, "--interval-minutes")?;
            if let Some(days) = days {
                spec.duration = duration_from(days, 86_400.0, "--days")?;
            }
            if let Some(census) = census {
                spec.census = AntennaCensus::parse(census)?;
            }
            if let Some(v) = diurnal_db {
                spec.diurnal_db = v;
            }
            if let Some(v) = antenna_db {
                spec.antenna_db = v;
            }
            if let Some(v) = carrier_db {
                spec.carrier_db = v;
            }
            if let Some(seed) = cli.global.seed {
                spec.seed = seed;
            }
            let fleet = simgen::generate(&spec)?;
            io::write_measurements(out_measurements, &fleet.measurements)?;
            let records: Vec<CarrierRecord> = fleet
                .assignments
                .iter()
                .map(|(carrier_id, antenna_id)| CarrierRecord {
                    carrier_id: carrier_id.clone(),
                    antenna_id: antenna_id.clone(),
                    satellite_id: None,
                })
                .collect();
            io::write_carriers(out_carriers, &records)?;
            log::info!(
                "simulated {} carriers on {} antennas, {} samples each",
                spec.census.num_carriers(),
                spec.census.num_antennas(),
                spec.num_samples()
            );
            Ok(())
        }

        Command::Signatures {
            ref measurements,
            ref out,
        } => {
            let config = cli.global.pipeline_config()?;
            let raw = io::read_measurements(measurements, Some(MIN_SNR_DB))?;
            if raw.is_empty() {
                return Err(Error::InsufficientData(format!(
                    "{}: no measurements",
                    measurements.display()
                )));
            }
            let groups = split_by_carrier(raw);
            let results: Vec<(String, Result<Signature>)> = {
                use rayon::prelude::*;
                groups
                    .par_iter()
                    .map(|(id, m)| (id.clone(), carrier_signature(m, &config)))
                    .collect()
            };
            let mut signatures = Vec::new();
            let mut first_error = None;
            for (id, result) in results {
                match result {
                    Ok(s) => signatures.push(s),
                    Err(e) => {
                        log::warn!("skipping carrier {id}: {e}");
                        first_error.get_or_insert(e);
                    }
                }
            }
            if signatures.is_empty() {
                return Err(first_error.expect("at least one carrier was processed"));
            }
            io::write_signatures(out, &signatures)?;
            log::info!("wrote {} signatures to {}", signatures.len(), out.display());
            Ok(())
        }

        Command::Distances {
            ref signatures,
            ref carriers,
            ref out,
        } => {
            let signatures = io::read_signatures(signatures)?;
            let assignments = match carriers {
                Some(path) => antenna_assignments(&io::read_carriers(path)?),
                None => HashMap::new(),
            };
            let records = all_pairs(&signatures, &assignments)?;
            io::write_distances(out, &records)?;
            log::info!("wrote {} pair distances to {}", records.len(), out.display());
            Ok(())
        }

        Command::Identify {
            ref signatures,
            ref carriers,
            ref interferer,
            ref out,
        } => {
            let all = io::read_signatures(signatures)?;
            let carrier_records = match carriers {
                Some(path) => io::read_carriers(path)?,
                None => Vec::new(),
            };
            let assignments = antenna_assignments(&carrier_records);
            let satellites: HashMap<&str, &str> = carrier_records
                .iter()
                .filter_map(|r| {
                    r.satellite_id
                        .as_deref()
                        .map(|s| (r.carrier_id.as_str(), s))
                })
                .collect();

            let interferer_sig = all
                .iter()
                .find(|s| &s.carrier_id == interferer)
                .cloned()
                .ok_or_else(|| {
                    Error::UnknownCarrier(format!(
                        "interferer {interferer} is not in the signature set"
                    ))
                })?;
            let interferer_satellite = satellites.get(interferer.as_str()).copied();
            let known: Vec<Signature> = all
                .into_iter()
                .filter(|s| s.carrier_id != *interferer)
                .filter(|s| {
                    if cli.global.include_other_satellites {
                        return true;
                    }
                    // Exclude only when both satellites are known and differ.
                    match (interferer_satellite, satellites.get(s.carrier_id.as_str())) {
                        (Some(a), Some(&b)) => a == b,
                        _ => true,
                    }
                })
                .collect();

            let ranking =
                rank_candidates(&interferer_sig, &known, cli.global.threshold, &assignments)?;
            let candidates: Vec<serde_json::Value> = ranking
                .candidates
                .iter()
                .map(|c| {
                    json!({
                        "carrier_id": c.carrier_id,
                        "antenna_id": c.antenna_id,
                        "distance": round_significant(c.distance, 6),
                        "in_result_set": c.in_result_set,
                    })
                })
                .collect();
            let report = json!({
                "config": {
                    "threshold": cli.global.threshold,
                    "include_other_satellites": cli.global.include_other_satellites,
                },
                "interferer_id": ranking.interferer_id,
                "threshold": ranking.threshold,
                "candidates": candidates,
            });
            io::write_json(out, &report)?;
            log::info!(
                "ranked {} candidates, {} in the result set",
                ranking.candidates.len(),
                ranking.result_set().len()
            );
            Ok(())
        }

        Command::Evaluate {
            ref distances,
            ref census,
            ref carriers,
            ref out_report,
            ref out_histogram,
        } => {
            let census = match (census, carriers) {
                (Some(text), None) => AntennaCensus::parse(text)?,
                (None, Some(path)) => {
                    AntennaCensus::from_assignments(&antenna_assignments(&io::read_carriers(
                        path,
                    )?))?
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "provide the antenna census with exactly one of --census or --carriers"
                            .into(),
                    ))
                }
            };
            let records = io::read_distances(distances)?;
            let distributions = stats::build_distributions(&records, cli.global.bin_width)?;
            let threshold = cli.global.threshold;
            let report = stats::evaluate_at(
                &census,
                distributions.cdf_same.value(threshold),
                distributions.cdf_different.value(threshold),
                threshold,
            )?;
            let expected = stats::count_pairs(&census);
            if distributions.cdf_same.len() as u64 != expected.same
                || distributions.cdf_different.len() as u64 != expected.different
            {
                log::warn!(
                    "census implies {} same / {} different pairs but the file holds {} / {}",
                    expected.same,
                    expected.different,
                    distributions.cdf_same.len(),
                    distributions.cdf_different.len()
                );
            }

            let report_json = json!({
                "config": {
                    "threshold": threshold,
                    "bin_width": cli.global.bin_width,
                    "census": census.to_string(),
                },
                "num_antennas": report.num_antennas,
                "num_carriers": report.num_carriers,
                "mean_carriers_per_antenna":
                    round_significant(report.mean_carriers_per_antenna, 6),
                "f_s": round_significant(report.f_s, 6),
                "f_d": round_significant(report.f_d, 6),
                "p_id": round_significant(report.p_id, 6),
                "n_i": round_significant(report.n_i, 6),
                "n_f": round_significant(report.n_f, 6),
                "p_f": round_significant(report.p_f, 6),
                "p_f_exact": round_significant(report.p_f_exact, 6),
            });
            io::write_json(out_report, &report_json)?;
            io::write_histograms(
                out_histogram,
                &distributions.histogram_same,
                &distributions.histogram_different,
            )?;
            Ok(())
        }
    }
}

fn antenna_assignments(records: &[CarrierRecord]) -> HashMap<String, String> {
    records
        .iter()
        .map(|r| (r.carrier_id.clone(), r.antenna_id.clone()))
        .collect()
}
