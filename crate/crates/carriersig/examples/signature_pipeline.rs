//! Walk a single carrier through every stage of the signature pipeline.
//!
//! Stages: uniform resampling, Gaussian detrending, state-vector encoding,
//! period-matrix assembly, singular value decomposition, and finally the
//! signature itself -- the right singular vector belonging to the second
//! largest singular value. The first component captures the shape shared by
//! all days; the second captures how the days deviate from it, which is the
//! part driven by the uplink antenna.
//!
//! Run with: cargo run --example signature_pipeline

use carriersig::encoding::{encode, EncodingKind};
use carriersig::signature::{build_period_matrix, decompose, extract_signature};
use carriersig::simgen::{generate, FleetSpec};
use carriersig::stats::AntennaCensus;
use carriersig::timeseries::{gaussian_detrend, max_gap, resample_uniform, split_by_carrier};
use chrono::Duration;

fn main() -> carriersig::Result<()> {
    // One antenna, one carrier, two days of data: the smallest fleet that
    // still yields a (2 x 480) period matrix.
    let spec = FleetSpec {
        census: AntennaCensus::parse("1:1")?,
        duration: Duration::days(2),
        seed: 11,
        ..FleetSpec::default()
    };
    let fleet = generate(&spec)?;
    let mut groups = split_by_carrier(fleet.measurements);
    let (carrier_id, raw) = groups.pop_first().expect("one carrier was generated");

    println!("carrier {carrier_id}: {} raw measurements", raw.len());
    if let Some(gap) = max_gap(&raw) {
        println!("largest gap between measurements: {} s", gap.num_seconds());
    }

    // Stage 1: snap onto a uniform 3-minute grid.
    let interval = Duration::minutes(3);
    let series = resample_uniform(&raw, interval)?;
    println!("resampled to {} samples starting {}", series.len(), series.start);

    // Stage 2: subtract a 6-hour Gaussian-weighted local mean. What is left
    // is the short-term fluctuation around the daily trend.
    let fluct = gaussian_detrend(&series, Duration::hours(6))?;
    let mean = fluct.values.iter().sum::<f64>() / fluct.values.len() as f64;
    println!("detrended; residual mean {mean:+.2e} dB");

    // Stage 3: encode the fluctuations as a unit-norm state vector.
    let state = encode(&fluct, EncodingKind::Amplitude)?;
    println!(
        "encoded as {} state vector, norm {:.12}",
        state.kind(),
        state.norm()
    );

    // Stage 4: fold the state vector into one row per 24-hour period.
    let samples_per_period = (Duration::hours(24).num_seconds()
        / interval.num_seconds()) as usize;
    let matrix = build_period_matrix(&state, samples_per_period)?;
    println!(
        "period matrix: {} periods x {} samples",
        matrix.periods(),
        matrix.samples_per_period()
    );

    // Stage 5: decompose. The singular values show how much energy the
    // common daily shape carries versus the day-to-day deviations.
    let eigen = decompose(&matrix)?;
    let sv = eigen.singular_values();
    println!("singular values: {:?}", &sv[..sv.len().min(4)]);
    println!(
        "spectral gap sigma_1/sigma_2 = {:.2}",
        sv[0] / sv[1].max(f64::MIN_POSITIVE)
    );

    // Stage 6: the signature is the second right singular vector.
    let signature = extract_signature(&eigen, &carrier_id, Duration::hours(24))?;
    let head: Vec<String> = signature.vector()[..6]
        .iter()
        .map(|v| format!("{v:+.4}"))
        .collect();
    println!(
        "signature: {} components, first few [{}, ...], low rank: {}",
        signature.vector().len(),
        head.join(", "),
        signature.low_rank
    );
    Ok(())
}
