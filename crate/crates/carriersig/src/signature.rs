//! Carrier signatures from the singular value decomposition of the period
//! matrix.
//!
//! The encoded state vector is cut into `m` equal periods of `n` samples
//! (one row per period, 24 hours by default) and decomposed as
//! `M = U S V^T`. The right-singular vectors are the principal components
//! of the rows; they are eigenvectors of `M^T M`, so we call them
//! eigensignals. The first one captures the variation common to every
//! carrier on the downlink (dominated by the daily satellite motion) and
//! carries little identity; the second one is characteristic of the uplink
//! antenna and serves as the carrier's signature.

use chrono::Duration;
use nalgebra::DMatrix;

use crate::encoding::{encode, EncodingKind, StateVector};
use crate::error::{Error, Result};
use crate::timeseries::FluctuationSeries;

/// State-vector samples arranged as one row per period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    periods: usize,
    samples_per_period: usize,
    /// Row-major entries; row `r` is period `r` in time order.
    data: Vec<f64>,
}

impl PeriodMatrix {
    /// Build directly from rows of equal length. At least two rows of at
    /// least one sample each are required.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "a period matrix needs at least 2 periods, got {}",
                rows.len()
            )));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::ShapeMismatch("periods must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("period rows differ in length".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * n);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(PeriodMatrix {
            periods: rows.len(),
            samples_per_period: n,
            data,
        })
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples_per_period
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.periods && col < self.samples_per_period);
        self.data[row * self.samples_per_period + col]
    }

    fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.periods, self.samples_per_period, &self.data)
    }
}

/// Cut a state vector into `samples_per_period`-wide rows.
///
/// The vector length must be an exact multiple of the period width, and at
/// least two full periods are required.
pub fn build_period_matrix(q: &StateVector, samples_per_period: usize) -> Result<PeriodMatrix> {
    if samples_per_period == 0 {
        return Err(Error::InvalidParameter(
            "samples_per_period must be positive".into(),
        ));
    }
    let total = q.len();
    if !total.is_multiple_of(samples_per_period) {
        return Err(Error::ShapeMismatch(format!(
            "vector length {total} is not a multiple of the period width {samples_per_period}"
        )));
    }
    let periods = total / samples_per_period;
    if periods < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 full periods, got {periods}"
        )));
    }
    Ok(PeriodMatrix {
        periods,
        samples_per_period,
        data: q.values().to_vec(),
    })
}

/// The singular value decomposition of a period matrix.
///
/// Singular values are sorted non-increasing. Every singular vector is
/// flipped so that its largest-magnitude component is positive (ties go to
/// the first such component); the matching left vector is flipped with it,
/// so `M = U S V^T` always reconstructs.
#[derive(Debug, Clone, PartialEq)]
pub struct EigensignalSet {
    singular_values: Vec<f64>,
    right: Vec<Vec<f64>>,
    left: Vec<Vec<f64>>,
}

impl EigensignalSet {
    /// Diagonal of `S`, non-increasing.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Right-singular vectors `v_1, v_2, ...`, each of period length.
    pub fn right_vectors(&self) -> &[Vec<f64>] {
        &self.right
    }

    /// Left-singular vectors, one weight per period.
    pub fn left_vectors(&self) -> &[Vec<f64>] {
        &self.left
    }

    pub fn num_components(&self) -> usize {
        self.singular_values.len()
    }
}

/// Compute the SVD of the period matrix.
///
/// Non-convergence of the iteration is surfaced as an error rather than
/// silently zeroing components.
pub fn decompose(matrix: &PeriodMatrix) -> Result<EigensignalSet> {
    let m = matrix.to_dmatrix();
    let svd = m
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Decomposition("SVD iteration did not converge".into()))?;
    let u = svd.u.expect("left singular vectors were requested");
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sigma = svd.singular_values;

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap());

    let mut singular_values = Vec::with_capacity(order.len());
    let mut right = Vec::with_capacity(order.len());
    let mut left = Vec::with_capacity(order.len());
    for &idx in &order {
        singular_values.push(sigma[idx]);
        let mut v: Vec<f64> = v_t.row(idx).iter().copied().collect();
        let mut u_col: Vec<f64> = u.column(idx).iter().copied().collect();
        let mut arg_max = 0;
        for (j, value) in v.iter().enumerate() {
            if value.abs() > v[arg_max].abs() {
                arg_max = j;
            }
        }
        if v[arg_max] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
            u_col.iter_mut().for_each(|x| *x = -*x);
        }
        right.push(v);
        left.push(u_col);
    }

    Ok(EigensignalSet {
        singular_values,
        right,
        left,
    })
}

/// The second eigensignal of one carrier; unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    pub carrier_id: String,
    /// Length of one period.
    pub period: Duration,
    /// Set when the period matrix had rank below two, i.e. `v_2` spans an
    /// arbitrary direction of the orthogonal complement of `v_1`.
    pub low_rank: bool,
    vector: Vec<f64>,
}

impl Signature {
    /// Wrap a raw signature vector, checking it has unit norm.
    pub fn new(
        carrier_id: impl Into<String>,
        period: Duration,
        vector: Vec<f64>,
        low_rank: bool,
    ) -> Result<Self> {
        let norm: f64 = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "signature vector norm {norm} is not 1"
            )));
        }
        Ok(Signature {
            carrier_id: carrier_id.into(),
            period,
            low_rank,
            vector,
        })
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn period_samples(&self) -> usize {
        self.vector.len()
    }

    pub fn period_hours(&self) -> f64 {
        self.period.num_seconds() as f64 / 3600.0
    }
}

/// Take `v_2` as the carrier's signature.
///
/// When the second singular value vanishes the decomposition still yields a
/// unit vector orthogonal to `v_1`; it is returned with the `low_rank` flag
/// set since its direction within the complement is arbitrary.
pub fn extract_signature(
    eigensignals: &EigensignalSet,
    carrier_id: impl Into<String>,
    period: Duration,
) -> Result<Signature> {
    if eigensignals.num_components() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 eigensignals to take the second one, got {}",
            eigensignals.num_components()
        )));
    }
    let sigma = eigensignals.singular_values();
    let low_rank = sigma[1] <= sigma[0] * 1e-12;
    Signature::new(
        carrier_id,
        period,
        eigensignals.right_vectors()[1].clone(),
        low_rank,
    )
}

/// Full signature computation for one detrended series: encode, reshape
/// into periods, decompose, take `v_2`.
///
/// The period must be an exact multiple of the sample interval; trailing
/// samples that do not fill a whole period are dropped with a warning. At
/// least two full periods of data are required.
pub fn compute_signature(
    series: &FluctuationSeries,
    period: Duration,
    encoding: EncodingKind,
) -> Result<Signature> {
    let interval_s = series.interval.num_seconds();
    let period_s = period.num_seconds();
    if interval_s <= 0 {
        return Err(Error::InvalidParameter(
            "series interval must be positive".into(),
        ));
    }
    if period_s <= 0 || period_s % interval_s != 0 {
        return Err(Error::InvalidParameter(format!(
            "period of {period_s} s is not a positive multiple of the {interval_s} s interval"
        )));
    }
    let samples_per_period = (period_s / interval_s) as usize;
    if samples_per_period < 2 {
        return Err(Error::InvalidParameter(
            "period must span at least 2 samples".into(),
        ));
    }

    let total = series.values.len();
    let periods = total / samples_per_period;
    if periods < 2 {
        return Err(Error::InsufficientData(format!(
            "carrier {}: {total} samples hold {periods} full period(s); a minimum of two periods is required",
            series.carrier_id
        )));
    }

    let remainder = total % samples_per_period;
    let q = if remainder > 0 {
        log::warn!(
            "carrier {}: dropping {remainder} trailing samples that do not fill a period",
            series.carrier_id
        );
        let truncated = FluctuationSeries {
            carrier_id: series.carrier_id.clone(),
            antenna_id: series.antenna_id.clone(),
            start: series.start,
            interval: series.interval,
            values: series.values[..periods * samples_per_period].to_vec(),
        };
        encode(&truncated, encoding)?
    } else {
        encode(series, encoding)?
    };

    let matrix = build_period_matrix(&q, samples_per_period)?;
    let eigensignals = decompose(&matrix)?;
    extract_signature(&eigensignals, series.carrier_id.clone(), period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::encode_amplitude;
    use chrono::{TimeZone, Utc};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn fluct(values: Vec<f64>, interval: Duration) -> FluctuationSeries {
        FluctuationSeries {
            carrier_id: "C1".into(),
            antenna_id: None,
            start: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
            interval,
            values,
        }
    }

    fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> PeriodMatrix {
        let data: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        PeriodMatrix::from_rows(&data).unwrap()
    }

    fn frobenius(m: &DMatrix<f64>) -> f64 {
        m.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn reconstruction(es: &EigensignalSet, rows: usize, cols: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(rows, cols);
        for (i, sigma) in es.singular_values().iter().enumerate() {
            for r in 0..rows {
                for c in 0..cols {
                    m[(r, c)] += sigma * es.left_vectors()[i][r] * es.right_vectors()[i][c];
                }
            }
        }
        m
    }

    #[test]
    fn period_matrix_layout() {
        let e = fluct(vec![0.5, 1.0, 1.5, -0.5, -1.0, 2.0], Duration::minutes(3));
        let q = encode_amplitude(&e).unwrap();
        let m = build_period_matrix(&q, 3).unwrap();
        assert_eq!(m.periods(), 2);
        assert_eq!(m.samples_per_period(), 3);
        for c in 0..3 {
            assert_eq!(m.get(0, c), q.values()[c]);
            assert_eq!(m.get(1, c), q.values()[3 + c]);
        }
    }

    #[test]
    fn period_matrix_shape_errors() {
        let e = fluct(vec![1.0; 7], Duration::minutes(3));
        let q = encode_amplitude(&e).unwrap();
        assert!(matches!(
            build_period_matrix(&q, 3),
            Err(Error::ShapeMismatch(_))
        ));

        let e = fluct(vec![1.0, 2.0, 3.0], Duration::minutes(3));
        let q = encode_amplitude(&e).unwrap();
        assert!(matches!(
            build_period_matrix(&q, 3),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn month_of_days_shape() {
        // 31 days on a 3-minute grid: 31 * 24 * 60 / 3 samples.
        let n_samples = 31 * 24 * 60 / 3;
        assert_eq!(n_samples, 14880);
        let values: Vec<f64> = (0..n_samples).map(|i| (i as f64 * 0.01).sin()).collect();
        let q = encode_amplitude(&fluct(values, Duration::minutes(3))).unwrap();
        let m = build_period_matrix(&q, 480).unwrap();
        assert_eq!(m.periods(), 31);
        assert_eq!(m.samples_per_period(), 480);
    }

    #[test]
    fn rank_one_matrix_by_hand() {
        // Both rows (0.6, 0.8): M^T M has eigenpairs
        // ((0.6, 0.8), 2) and ((0.8, -0.6), 0), so sigma = (sqrt 2, 0).
        let m = PeriodMatrix::from_rows(&[vec![0.6, 0.8], vec![0.6, 0.8]]).unwrap();
        let es = decompose(&m).unwrap();
        assert!((es.singular_values()[0] - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!(es.singular_values()[1].abs() < 1e-12);
        let v1 = &es.right_vectors()[0];
        let v2 = &es.right_vectors()[1];
        assert!((v1[0] - 0.6).abs() < 1e-10 && (v1[1] - 0.8).abs() < 1e-10);
        assert!((v2[0] - 0.8).abs() < 1e-10 && (v2[1] + 0.6).abs() < 1e-10);

        let sig = extract_signature(&es, "C1", Duration::hours(24)).unwrap();
        assert!(sig.low_rank);
        assert!((sig.vector()[0] - 0.8).abs() < 1e-10);
        assert!((sig.vector()[1] + 0.6).abs() < 1e-10);
    }

    #[test]
    fn identity_matrix_invariants() {
        // Degenerate spectrum: only invariants are testable, not vectors.
        let m = PeriodMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let es = decompose(&m).unwrap();
        assert!((es.singular_values()[0] - 1.0).abs() < 1e-12);
        assert!((es.singular_values()[1] - 1.0).abs() < 1e-12);
        let v1 = &es.right_vectors()[0];
        let v2 = &es.right_vectors()[1];
        let dot: f64 = v1.iter().zip(v2).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-10);
        let err = frobenius(&(reconstruction(&es, 2, 2) - m.to_dmatrix()));
        assert!(err < 1e-12);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 5, 8);
            let es = decompose(&m).unwrap();
            let dm = m.to_dmatrix();
            let err = frobenius(&(reconstruction(&es, 5, 8) - dm.clone()));
            assert!(err < 1e-10 * frobenius(&dm));
            for i in 0..es.num_components() {
                for j in 0..es.num_components() {
                    let dot: f64 = es.right_vectors()[i]
                        .iter()
                        .zip(&es.right_vectors()[j])
                        .map(|(a, b)| a * b)
                        .sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-10);
                }
            }
            // Non-increasing singular values.
            for w in es.singular_values().windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn row_permutation_leaves_eigensignals() {
        let mut rng = StdRng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let m = PeriodMatrix::from_rows(&rows).unwrap();
        let permuted =
            PeriodMatrix::from_rows(&[rows[2].clone(), rows[0].clone(), rows[3].clone(), rows[1].clone()])
                .unwrap();
        let a = decompose(&m).unwrap();
        let b = decompose(&permuted).unwrap();
        for (sa, sb) in a.singular_values().iter().zip(b.singular_values()) {
            assert!((sa - sb).abs() < 1e-10);
        }
        for i in 0..a.num_components() {
            let dot: f64 = a.right_vectors()[i]
                .iter()
                .zip(&b.right_vectors()[i])
                .map(|(x, y)| x * y)
                .sum();
            assert!((dot.abs() - 1.0).abs() < 1e-8, "component {i}: |dot| = {}", dot.abs());
        }
    }

    #[test]
    fn sign_flip_of_matrix_is_absorbed() {
        let mut rng = StdRng::seed_from_u64(13);
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let flipped: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        let a = decompose(&PeriodMatrix::from_rows(&rows).unwrap()).unwrap();
        let b = decompose(&PeriodMatrix::from_rows(&flipped).unwrap()).unwrap();
        for i in 0..a.num_components() {
            for (x, y) in a.right_vectors()[i].iter().zip(&b.right_vectors()[i]) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compute_signature_period_shapes() {
        let day = 24 * 60 / 3; // samples per 24 h at 3-minute spacing
        let make = |n: usize| {
            fluct(
                (0..n).map(|i| (i as f64 * 0.05).sin() * 0.5).collect(),
                Duration::minutes(3),
            )
        };

        // Two days split into 24 h periods.
        let sig = compute_signature(&make(2 * day), Duration::hours(24), EncodingKind::Amplitude)
            .unwrap();
        assert_eq!(sig.period_samples(), 480);

        // One day split into two 12 h periods.
        let sig =
            compute_signature(&make(day), Duration::hours(12), EncodingKind::Amplitude).unwrap();
        assert_eq!(sig.period_samples(), 240);

        // Half a day split into two 6 h periods.
        let sig =
            compute_signature(&make(day / 2), Duration::hours(6), EncodingKind::Amplitude).unwrap();
        assert_eq!(sig.period_samples(), 120);
    }

    #[test]
    fn compute_signature_rejects_single_period() {
        let values: Vec<f64> = (0..480).map(|i| (i as f64 * 0.01).cos()).collect();
        let e = fluct(values, Duration::minutes(3));
        assert!(matches!(
            compute_signature(&e, Duration::hours(24), EncodingKind::Amplitude),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn compute_signature_truncates_partial_period() {
        let values: Vec<f64> = (0..1010).map(|i| (i as f64 * 0.02).sin()).collect();
        let e = fluct(values, Duration::minutes(3));
        let sig = compute_signature(&e, Duration::hours(12), EncodingKind::Amplitude).unwrap();
        // 1010 samples at 3 min = 4 full 12 h periods of 240 samples + 50 left over.
        assert_eq!(sig.period_samples(), 240);
    }

    #[test]
    fn compute_signature_rejects_misaligned_period() {
        let e = fluct(vec![0.1; 100], Duration::minutes(7));
        assert!(matches!(
            compute_signature(&e, Duration::hours(24), EncodingKind::Amplitude),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn signature_requires_unit_norm() {
        assert!(Signature::new("C1", Duration::hours(24), vec![0.6, 0.8], false).is_ok());
        assert!(matches!(
            Signature::new("C1", Duration::hours(24), vec![0.6, 0.9], false),
            Err(Error::InvalidParameter(_))
        ));
    }
}
