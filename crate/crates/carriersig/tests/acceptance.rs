//! Acceptance suite: one test per top-level guarantee of the library.
//! Each test prints a PASS line with the measured values; the harness
//! reports one ok/FAILED line per guarantee.

mod common;

use carriersig::encoding::{encode, EncodingKind};
use carriersig::matching::{all_pairs, distance_vectors};
use carriersig::signature::{decompose, PeriodMatrix};
use carriersig::simgen::{generate, FleetSpec};
use carriersig::stats::{build_distributions, count_pairs, evaluate_at, AntennaCensus};
use carriersig::timeseries::{split_by_carrier, FluctuationSeries};
use carriersig::{carrier_signature, fleet_signatures, Error, PipelineConfig};
use chrono::{Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// A 32-antenna, 53-carrier fleet used by several tests below.
fn reference_census() -> AntennaCensus {
    AntennaCensus::parse("1:27,2:1,3:1,6:2,9:1").unwrap()
}

#[test]
fn statistical_model_reproduction() {
    let census = reference_census();
    let report = evaluate_at(&census, 0.714, 0.0061, 0.4).unwrap();

    assert!(
        (report.p_id - 0.76).abs() <= 0.01,
        "p_id {} not within 0.01 of 0.76",
        report.p_id
    );
    assert!(
        (report.n_i - 1.2).abs() <= 0.05,
        "n_i {} not within 0.05 of 1.2",
        report.n_i
    );
    assert!(
        (report.n_f - 0.31).abs() <= 0.01,
        "n_f {} not within 0.01 of 0.31",
        report.n_f
    );
    assert!(
        (report.p_f - 0.32).abs() <= 0.01,
        "p_f {} not within 0.01 of 0.32",
        report.p_f
    );
    println!(
        "PASS statistical model reproduction: p_id {:.4}, n_i {:.4}, n_f {:.4}, p_f {:.4}",
        report.p_id, report.n_i, report.n_f, report.p_f
    );
}

#[test]
fn pair_counting() {
    let counts = count_pairs(&reference_census());
    assert_eq!(counts.same, 70, "same-antenna pairs");
    assert_eq!(counts.different, 1308, "different-antenna pairs");
    assert_eq!(counts.total, 1378, "total pairs");
    println!(
        "PASS pair counting: {} same, {} different, {} total",
        counts.same, counts.different, counts.total
    );
}

#[test]
fn threshold_sensitivity() {
    let census = reference_census();
    // CDF values at threshold 0.5 chosen so the estimators should land on
    // n_i = 1.25 and n_f = 2.7; this checks the formula wiring.
    let n_s = census.mean_carriers();
    let f_s = 1.25 / n_s;
    let f_d = 2.7 / (census.num_carriers() as f64 - n_s);
    let report = evaluate_at(&census, f_s, f_d, 0.5).unwrap();

    assert!(
        (report.n_i - 1.25).abs() <= 0.01,
        "n_i {} not within 0.01 of 1.25",
        report.n_i
    );
    assert!(
        (report.n_f - 2.7).abs() <= 0.05,
        "n_f {} not within 0.05 of 2.7",
        report.n_f
    );
    println!(
        "PASS threshold sensitivity: n_i {:.4}, n_f {:.4} at threshold 0.5",
        report.n_i, report.n_f
    );
}

#[test]
fn encoding_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed4);
    let start = Utc.with_ymd_and_hms(2023, 12, 1, 0, 0, 0).unwrap();
    let series = |values: Vec<f64>| FluctuationSeries {
        carrier_id: "C".into(),
        antenna_id: None,
        start,
        interval: Duration::minutes(3),
        values,
    };

    for case in 0..1000 {
        let len = rng.random_range(2..=2000usize);
        let values: Vec<f64> = (0..len).map(|_| rng.random_range(-5.0..5.0)).collect();
        let encoded = encode(&series(values.clone()), EncodingKind::Amplitude).unwrap();

        let norm: f64 = encoded.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(
            (norm - 1.0).abs() <= 1e-10,
            "case {case}: norm {norm} is not 1 within 1e-10"
        );
        for &v in encoded.values() {
            assert!(
                (0.0..=1.0).contains(&v),
                "case {case}: entry {v} outside [0, 1]"
            );
        }

        for scale in [0.5, 3.0, 100.0] {
            let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
            let rescaled = encode(&series(scaled), EncodingKind::Amplitude).unwrap();
            let dev = encoded
                .values()
                .iter()
                .zip(rescaled.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(
                dev <= 1e-12,
                "case {case}: scale {scale} changed the encoding by {dev}"
            );
        }
    }
    println!("PASS encoding invariants: 1000 series, lengths 2-2000, scales 0.5/3/100");
}

#[test]
fn svd_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed5);
    let random_matrix = |rng: &mut ChaCha8Rng, m: usize, n: usize| -> Vec<Vec<f64>> {
        (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect()
    };

    // Reconstruction and orthonormality over random shapes.
    for case in 0..200 {
        let m = rng.random_range(2..=8usize);
        let n = rng.random_range(2..=16usize);
        let rows = random_matrix(&mut rng, m, n);
        let matrix = PeriodMatrix::from_rows(&rows).unwrap();
        let eigen = decompose(&matrix).unwrap();

        let norm = common::frobenius(&rows);
        let mut reconstruction_err: f64 = 0.0;
        for (i, row) in rows.iter().enumerate() {
            for (j, &want) in row.iter().enumerate() {
                let got: f64 = (0..eigen.num_components())
                    .map(|k| {
                        eigen.singular_values()[k]
                            * eigen.left_vectors()[k][i]
                            * eigen.right_vectors()[k][j]
                    })
                    .sum();
                reconstruction_err = reconstruction_err.max((got - want).abs());
            }
        }
        assert!(
            reconstruction_err < 1e-10 * norm,
            "case {case} ({m}x{n}): reconstruction error {reconstruction_err}"
        );

        for a in 0..eigen.num_components() {
            for b in 0..eigen.num_components() {
                let dot: f64 = eigen.right_vectors()[a]
                    .iter()
                    .zip(&eigen.right_vectors()[b])
                    .map(|(x, y)| x * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (dot - want).abs() <= 1e-10,
                    "case {case}: V^T V [{a}][{b}] = {dot}"
                );
            }
        }
    }

    // Cross-check against an independent Jacobi eigensolver of M^T M.
    let mut compared = 0;
    for _ in 0..200 {
        let rows = random_matrix(&mut rng, 6, 6);
        let mut gram = vec![vec![0.0; 6]; 6];
        #[allow(clippy::needless_range_loop)]
        for i in 0..6 {
            for j in 0..6 {
                gram[i][j] = (0..6).map(|k| rows[k][i] * rows[k][j]).sum();
            }
        }
        let (eigenvalues, eigenvectors) = common::jacobi_eigen_symmetric(&gram);

        // Skip near-degenerate spectra where the eigenvector basis is not
        // unique enough for a component-wise comparison.
        let scale = eigenvalues[0].max(f64::MIN_POSITIVE);
        let degenerate = eigenvalues
            .windows(2)
            .any(|w| (w[0] - w[1]).abs() < 1e-3 * scale);
        if degenerate {
            continue;
        }
        compared += 1;

        let matrix = PeriodMatrix::from_rows(&rows).unwrap();
        let eigen = decompose(&matrix).unwrap();
        for k in 0..6 {
            let sigma = eigen.singular_values()[k];
            let want = eigenvalues[k].max(0.0).sqrt();
            assert!(
                (sigma - want).abs() <= 1e-8,
                "singular value {k}: {sigma} vs Jacobi {want}"
            );
            let dev = common::max_abs_diff_up_to_sign(
                &eigen.right_vectors()[k],
                &eigenvectors[k],
            );
            assert!(dev <= 1e-8, "right vector {k} deviates by {dev}");
        }
    }
    assert!(compared >= 150, "only {compared} of 200 spectra were non-degenerate");
    println!(
        "PASS SVD correctness: 200 random shapes reconstructed, {compared} Jacobi cross-checks"
    );
}

#[test]
fn distance_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed6);
    let unit_vector = |rng: &mut ChaCha8Rng, dim: usize| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..dim)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect();
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-3 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    };

    for case in 0..1000 {
        let dim = rng.random_range(2..=64usize);
        let r = unit_vector(&mut rng, dim);
        let s = unit_vector(&mut rng, dim);

        let d_rs = distance_vectors(&r, &s).unwrap();
        let d_sr = distance_vectors(&s, &r).unwrap();
        assert_eq!(d_rs.to_bits(), d_sr.to_bits(), "case {case}: asymmetric");
        assert!((0.0..=1.0).contains(&d_rs), "case {case}: {d_rs} outside [0, 1]");

        let d_rr = distance_vectors(&r, &r).unwrap();
        assert!(d_rr <= 1e-6, "case {case}: self distance {d_rr}");

        let neg_r: Vec<f64> = r.iter().map(|x| -x).collect();
        let neg_s: Vec<f64> = s.iter().map(|x| -x).collect();
        assert_eq!(
            distance_vectors(&neg_r, &s).unwrap().to_bits(),
            d_rs.to_bits(),
            "case {case}: negating r changed the distance"
        );
        assert_eq!(
            distance_vectors(&r, &neg_s).unwrap().to_bits(),
            d_rs.to_bits(),
            "case {case}: negating s changed the distance"
        );
    }

    // Exact constructions: basis vectors give a bit-exact zero, and an
    // inner product of exactly 0.6 gives a bit-exact 0.8.
    let e1 = vec![1.0, 0.0];
    assert_eq!(distance_vectors(&e1, &e1).unwrap(), 0.0);
    let s = vec![0.6, 0.8];
    assert_eq!(distance_vectors(&e1, &s).unwrap(), 0.8);

    println!("PASS distance properties: 1000 random pairs plus exact constructions");
}

#[test]
fn end_to_end_separation() {
    let started = std::time::Instant::now();
    let mut worst_gap = f64::INFINITY;
    for seed in 1..=20u64 {
        let spec = FleetSpec {
            seed,
            ..FleetSpec::default()
        };
        let fleet = generate(&spec).unwrap();
        let assignments: HashMap<String, String> = fleet.assignments.iter().cloned().collect();
        let groups = split_by_carrier(fleet.measurements);
        let signatures = fleet_signatures(&groups, &PipelineConfig::default()).unwrap();
        let records = all_pairs(&signatures, &assignments).unwrap();

        let mean = |flag: bool| -> f64 {
            let group: Vec<f64> = records
                .iter()
                .filter(|r| r.same_antenna == Some(flag))
                .map(|r| r.distance)
                .collect();
            group.iter().sum::<f64>() / group.len() as f64
        };
        let mean_same = mean(true);
        let mean_different = mean(false);
        assert!(
            mean_same < mean_different,
            "seed {seed}: mean same {mean_same} >= mean different {mean_different}"
        );

        let distributions = build_distributions(&records, 0.05).unwrap();
        let best_gap = (0..=1000)
            .map(|i| {
                let t = i as f64 / 1000.0;
                distributions.cdf_same.value(t) - distributions.cdf_different.value(t)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            best_gap >= 0.3,
            "seed {seed}: best CDF separation {best_gap} below 0.3"
        );
        worst_gap = worst_gap.min(best_gap);
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "20 seeds took {elapsed:?}, over the five-minute target"
    );
    println!(
        "PASS end-to-end separation: 20 seeds in {elapsed:.1?}, worst CDF gap {worst_gap:.3}"
    );
}

#[test]
fn variable_period_operation() {
    let configurations = [
        (Duration::days(2), Duration::hours(24)),
        (Duration::days(1), Duration::hours(12)),
        (Duration::hours(12), Duration::hours(6)),
    ];
    for (duration, period) in configurations {
        let spec = FleetSpec {
            census: AntennaCensus::parse("1:1").unwrap(),
            duration,
            seed: 8,
            ..FleetSpec::default()
        };
        let fleet = generate(&spec).unwrap();
        let config = PipelineConfig {
            period,
            ..PipelineConfig::default()
        };
        let signature = carrier_signature(&fleet.measurements, &config).unwrap();
        let samples = (period.num_seconds() / config.interval.num_seconds()) as usize;
        assert_eq!(signature.vector().len(), samples);
    }

    // One period of data is not enough to compare periods against each other.
    let spec = FleetSpec {
        census: AntennaCensus::parse("1:1").unwrap(),
        duration: Duration::days(1),
        seed: 8,
        ..FleetSpec::default()
    };
    let fleet = generate(&spec).unwrap();
    let err = carrier_signature(&fleet.measurements, &PipelineConfig::default()).unwrap_err();
    assert!(
        matches!(err, Error::InsufficientData(_)),
        "expected the insufficient-data error, got {err:?}"
    );
    assert!(
        err.to_string().contains("minimum of two periods"),
        "unexpected message: {err}"
    );
    println!("PASS variable period operation: 24 h, 12 h, 6 h accepted; single period rejected");
}

#[test]
fn determinism() {
    let exe = env!("CARGO_BIN_EXE_carriersig");
    let artifacts = [
        "measurements.csv",
        "carriers.csv",
        "signatures.csv",
        "distances.csv",
        "evaluate.json",
        "histogram.csv",
    ];
    let run_pipeline = |dir: &std::path::Path| {
        let steps: [&[&str]; 4] = [
            &["simulate", "--census", "1:2,2:1", "--days", "2", "--seed", "123"],
            &["signatures", "--measurements", "measurements.csv"],
            &["distances", "--signatures", "signatures.csv", "--carriers", "carriers.csv"],
            &["evaluate", "--distances", "distances.csv", "--carriers", "carriers.csv"],
        ];
        for step in steps {
            let output = std::process::Command::new(exe)
                .args(step)
                .current_dir(dir)
                .output()
                .expect("binary runs");
            assert!(
                output.status.success(),
                "{step:?} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
        }
    };

    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    run_pipeline(first.path());
    run_pipeline(second.path());

    for name in artifacts {
        let a = std::fs::read(first.path().join(name)).unwrap();
        let b = std::fs::read(second.path().join(name)).unwrap();
        assert!(!a.is_empty(), "{name} is empty");
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    println!("PASS determinism: {} artifacts byte-identical across runs", artifacts.len());
}
