//! Identify which known carrier shares an antenna with an interferer.
//!
//! An interfering carrier is received without any metadata, but its EIRP
//! fluctuations still carry the imprint of the uplink antenna that
//! transmits it. This example takes one carrier of a simulated fleet,
//! strips its identity, and ranks all remaining carriers by signature
//! distance. Carriers on the same antenna should surface at the top,
//! inside the decision threshold.
//!
//! Run with: cargo run --example identify_interferer

use carriersig::matching::rank_candidates;
use carriersig::simgen::{generate, FleetSpec};
use carriersig::stats::AntennaCensus;
use carriersig::timeseries::split_by_carrier;
use carriersig::{fleet_signatures, PipelineConfig};
use chrono::Duration;
use std::collections::HashMap;

fn main() -> carriersig::Result<()> {
    let spec = FleetSpec {
        census: AntennaCensus::parse("1:4,3:2")?,
        duration: Duration::days(7),
        seed: 21,
        ..FleetSpec::default()
    };
    let fleet = generate(&spec)?;
    let assignments: HashMap<String, String> = fleet.assignments.iter().cloned().collect();

    let groups = split_by_carrier(fleet.measurements);
    let mut signatures = fleet_signatures(&groups, &PipelineConfig::default())?;

    // Pretend the last carrier is the interferer: remove it from the known
    // set and forget its antenna.
    let interferer = signatures.pop().expect("fleet is not empty");
    let true_antenna = &assignments[&interferer.carrier_id];
    println!(
        "interferer: {} (truly on antenna {true_antenna})",
        interferer.carrier_id
    );

    let threshold = 0.4;
    let ranking = rank_candidates(&interferer, &signatures, threshold, &assignments)?;

    println!("candidates ranked by signature distance (threshold {threshold}):");
    for candidate in &ranking.candidates {
        let antenna = candidate.antenna_id.as_deref().unwrap_or("?");
        let marker = if candidate.in_result_set { "->" } else { "  " };
        println!(
            " {marker} {}  on {antenna}  distance {:.4}",
            candidate.carrier_id, candidate.distance
        );
    }

    let hits = ranking.result_set();
    let correct = hits
        .iter()
        .filter(|c| c.antenna_id.as_deref() == Some(true_antenna.as_str()))
        .count();
    println!(
        "result set holds {} carrier(s), {correct} on the true antenna",
        hits.len()
    );
    Ok(())
}
