//! Generate a synthetic satellite fleet and write it to disk.
//!
//! The generator builds EIRP time series for every carrier of a fleet
//! described by an antenna census ("how many antennas carry how many
//! carriers"). Carriers sharing an uplink antenna share its slowly varying
//! gain fluctuations, which is exactly the structure the signature pipeline
//! later exploits. The output is a pair of CSV files: the measurements and
//! the ground-truth carrier-to-antenna table.
//!
//! Run with: cargo run --example simulate_fleet

use carriersig::io::{write_carriers, write_measurements, CarrierRecord};
use carriersig::simgen::{generate, FleetSpec};
use carriersig::stats::AntennaCensus;
use chrono::Duration;
use std::path::Path;

fn main() -> carriersig::Result<()> {
    // Six antennas: four carry a single carrier, two carry three each.
    let spec = FleetSpec {
        census: AntennaCensus::parse("1:4,3:2")?,
        duration: Duration::days(3),
        seed: 7,
        ..FleetSpec::default()
    };

    let fleet = generate(&spec)?;

    let per_carrier = spec.num_samples();
    println!(
        "generated {} carriers x {} samples = {} measurements",
        fleet.assignments.len(),
        per_carrier,
        fleet.measurements.len()
    );
    println!("ground truth (carrier -> antenna):");
    for (carrier, antenna) in &fleet.assignments {
        println!("  {carrier} -> {antenna}");
    }

    let out = Path::new("target/example-output");
    std::fs::create_dir_all(out)?;

    let measurements_path = out.join("measurements.csv");
    write_measurements(&measurements_path, &fleet.measurements)?;

    let carriers: Vec<CarrierRecord> = fleet
        .assignments
        .iter()
        .map(|(carrier, antenna)| CarrierRecord {
            carrier_id: carrier.clone(),
            antenna_id: antenna.clone(),
            satellite_id: None,
        })
        .collect();
    let carriers_path = out.join("carriers.csv");
    write_carriers(&carriers_path, &carriers)?;

    println!("wrote {}", measurements_path.display());
    println!("wrote {}", carriers_path.display());
    Ok(())
}
