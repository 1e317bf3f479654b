//! Randomized invariants checked with proptest.

use nalgebra::{DMatrix, DVector};
use proptest::collection::vec;
use proptest::prelude::*;

use gfri_core::{
    is_circulant_matrix, nearest_circulant, prony_reconstruct, read_matrix_csv, read_signal_csv,
    read_sparse_csv, sample_gft, write_matrix_csv, write_signal_csv, write_sparse_csv,
    SparseSignal, C64,
};

fn finite(range: f64) -> impl Strategy<Value = f64> {
    (-range..range).prop_filter("finite", |v| v.is_finite())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The nearest circulant matrix is an orthogonal projection: its output
    /// is circulant, idempotent, and the error is Frobenius-orthogonal to
    /// every circulant, in particular to the projection itself.
    #[test]
    fn nearest_circulant_is_a_projection(
        n in 2usize..8,
        entries in vec(finite(5.0), 64),
    ) {
        let a = DMatrix::from_fn(n, n, |i, j| entries[(i * n + j) % entries.len()]);
        let p = nearest_circulant(&a).unwrap();
        prop_assert!(is_circulant_matrix(&p, 1e-9));
        let pp = nearest_circulant(&p).unwrap();
        prop_assert!((&pp - &p).amax() < 1e-10);
        let err = &a - &p;
        let inner: f64 = err.iter().zip(p.iter()).map(|(x, y)| x * y).sum();
        prop_assert!(inner.abs() < 1e-8 * (1.0 + a.amax()));
    }

    /// Exact sparse signals round-trip through minimal spectral sampling.
    #[test]
    fn prony_round_trip_small(
        n_pow in 3u32..6,
        raw_support in vec(0usize..1000, 1..4),
        amps in vec((finite(2.0), finite(2.0)), 3),
    ) {
        let n = 1usize << n_pow;
        let mut support: Vec<usize> = raw_support.iter().map(|&c| c % n).collect();
        support.sort_unstable();
        support.dedup();
        let k = support.len();
        let amplitudes: Vec<C64> = amps[..k]
            .iter()
            // Keep amplitudes away from zero so the sparsity is exactly k.
            .map(|&(re, im)| C64::new(re + re.signum() * 0.1, im))
            .collect();
        let x = SparseSignal::new(n, support, amplitudes).unwrap();
        let y = sample_gft(&x, 2 * k).unwrap();
        let r = prony_reconstruct(&y, k).unwrap();
        prop_assert_eq!(&r.support, &x.support);
        let err = (x.dense() - r.dense()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9, "error {}", err);
    }

    /// The 17-significant-digit CSV format preserves f64 exactly.
    #[test]
    fn signal_csv_round_trip(values in vec((finite(1e6), finite(1e6)), 1..20)) {
        let x = DVector::from_iterator(values.len(), values.iter().map(|&(re, im)| C64::new(re, im)));
        let back = read_signal_csv(&write_signal_csv(&x)).unwrap();
        prop_assert_eq!(back.len(), x.len());
        for (a, b) in back.iter().zip(x.iter()) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn sparse_csv_round_trip(
        raw in vec((0usize..64, finite(10.0), finite(10.0)), 1..8),
    ) {
        let mut seen = std::collections::BTreeMap::new();
        for &(c, re, im) in &raw {
            seen.entry(c).or_insert(C64::new(re, im));
        }
        let (support, amplitudes): (Vec<usize>, Vec<C64>) = seen.into_iter().unzip();
        let x = SparseSignal::new(64, support, amplitudes).unwrap();
        let back = read_sparse_csv(&write_sparse_csv(&x), 64).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn matrix_csv_round_trip(
        rows in 1usize..5,
        cols in 1usize..5,
        entries in vec(finite(1e3), 16),
    ) {
        let m = DMatrix::from_fn(rows, cols, |i, j| entries[(i * cols + j) % entries.len()]);
        let back = read_matrix_csv(&write_matrix_csv(&m)).unwrap();
        prop_assert_eq!(back, m);
    }
}
