//! DFT and DCT-III bases, the graph-frequency permutation, and spectral
//! downsampling of circulant graphs.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

use crate::error::{GfriError, Result};
use crate::graph::{CirculantGraph, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Dft,
    DctIii,
}

/// An orthonormal sampling basis with rows accessible by index.
#[derive(Debug, Clone)]
pub struct UnitaryBasis {
    pub kind: BasisKind,
    pub n: usize,
    pub matrix: DMatrix<C64>,
}

/// Full unitary DFT matrix, entry `(m, k) = e^{-i 2 pi m k / n} / sqrt(n)`.
pub fn dft_matrix(n: usize) -> DMatrix<C64> {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |m, k| {
        C64::from_polar(s, -2.0 * PI * (m as f64) * (k as f64) / n as f64)
    })
}

/// First `m` rows of the unitary DFT matrix.
pub fn dft_rows(n: usize, m: usize) -> Result<DMatrix<C64>> {
    if m == 0 || m > n {
        return Err(GfriError::Precondition(format!(
            "row count {m} outside 1..={n}"
        )));
    }
    let s = 1.0 / (n as f64).sqrt();
    Ok(DMatrix::from_fn(m, n, |r, k| {
        C64::from_polar(s, -2.0 * PI * (r as f64) * (k as f64) / n as f64)
    }))
}

/// Real DCT-III matrix: `Q[m][k] = c(m) sqrt(2/n) cos(pi m (k + 1/2) / n)`
/// with `c(0) = 1/sqrt(2)`, `c(m) = 1` otherwise. Rows are orthonormal.
pub fn dct_matrix(n: usize) -> DMatrix<f64> {
    let s = (2.0 / n as f64).sqrt();
    DMatrix::from_fn(n, n, |m, k| {
        let c = if m == 0 { 1.0 / 2.0f64.sqrt() } else { 1.0 };
        c * s * (PI * m as f64 * (k as f64 + 0.5) / n as f64).cos()
    })
}

/// DCT-III scaling constant `c(m) sqrt(2/n)` applied to row `m`.
pub fn dct_row_scale(n: usize, m: usize) -> f64 {
    let c = if m == 0 { 1.0 / 2.0f64.sqrt() } else { 1.0 };
    c * (2.0 / n as f64).sqrt()
}

pub fn dct_basis(n: usize) -> Result<UnitaryBasis> {
    if n == 0 {
        return Err(GfriError::Precondition("dimension must be positive".into()));
    }
    let q = dct_matrix(n);
    Ok(UnitaryBasis {
        kind: BasisKind::DctIii,
        n,
        matrix: q.map(|v| C64::new(v, 0.0)),
    })
}

pub fn dft_basis(n: usize) -> Result<UnitaryBasis> {
    if n == 0 {
        return Err(GfriError::Precondition("dimension must be positive".into()));
    }
    Ok(UnitaryBasis {
        kind: BasisKind::Dft,
        n,
        matrix: dft_matrix(n),
    })
}

/// Laplacian spectrum of a circulant graph in DFT order, with the
/// graph-frequency permutation.
#[derive(Debug, Clone)]
pub struct SpectrumInfo {
    /// Eigenvalues indexed by DFT frequency.
    pub eigenvalues: Vec<f64>,
    /// Distinct eigenvalues paired with their DFT positions.
    pub multiplicity_map: Vec<(f64, Vec<usize>)>,
    /// `sigma[r]` is the DFT position of the `r`-th smallest eigenvalue;
    /// ties broken by ascending DFT index.
    pub sigma: Vec<usize>,
}

/// Computes the DFT-ordered Laplacian spectrum and the permutation linking
/// graph-frequency order to DFT order.
pub fn gft_permutation(g: &CirculantGraph) -> SpectrumInfo {
    let n = g.n();
    let rep = g.laplacian_representer();
    let eigenvalues: Vec<f64> = (0..n).map(|k| rep.eval_at_frequency(k, n)).collect();

    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.sort_by(|&a, &b| {
        eigenvalues[a]
            .partial_cmp(&eigenvalues[b])
            .unwrap()
            .then(a.cmp(&b))
    });

    let scale = eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale;
    let mut multiplicity_map: Vec<(f64, Vec<usize>)> = Vec::new();
    for &k in &sigma {
        match multiplicity_map.last_mut() {
            Some((v, ks)) if (eigenvalues[k] - *v).abs() <= tol => ks.push(k),
            _ => multiplicity_map.push((eigenvalues[k], vec![k])),
        }
    }
    for (_, ks) in multiplicity_map.iter_mut() {
        ks.sort_unstable();
    }

    SpectrumInfo {
        eigenvalues,
        multiplicity_map,
        sigma,
    }
}

/// Groups the DFT-ordered values of `A/d` into (value, positions) classes.
pub fn group_spectrum(values: &[f64], tol: f64) -> Vec<(f64, Vec<usize>)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for &k in &order {
        match out.last_mut() {
            Some((v, ks)) if (values[k] - *v).abs() <= tol => ks.push(k),
            _ => out.push((values[k], vec![k])),
        }
    }
    for (_, ks) in out.iter_mut() {
        ks.sort_unstable();
    }
    out
}

/// Spectral downsampling of Lemma-4.2 type: keeps the first `n/2` DFT rows at
/// even columns and the even-indexed eigenvalues, then reads the circulant
/// graph of dimension `n/2` off the reconstructed adjacency matrix.
pub fn spectral_downsample(g: &CirculantGraph) -> Result<CirculantGraph> {
    let n = g.n();
    if n % 2 != 0 {
        return Err(GfriError::Precondition(format!(
            "dimension {n} must be even for spectral downsampling"
        )));
    }
    let b = g.bandwidth();
    if 2 * b >= n / 2 {
        return Err(GfriError::Precondition(format!(
            "bandwidth {b} violates 2B < n/2 = {}",
            n / 2
        )));
    }
    let half = n / 2;
    let rep = g.adjacency_representer();
    let lam = DVector::from_fn(half, |j, _| rep.eval_at_frequency(2 * j, n));

    // A~ = (2/n) F^H Lam F with F the unnormalized DFT of dimension n/2.
    let f = dft_matrix(half) * C64::new((half as f64).sqrt(), 0.0);
    let lam_c = DMatrix::from_fn(half, half, |i, j| {
        if i == j {
            C64::new(lam[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let a_tilde = f.adjoint() * lam_c * &f * C64::new(2.0 / n as f64, 0.0);

    let mut first_row = vec![0.0; half];
    for j in 0..half {
        let v = a_tilde[(0, j)];
        if v.im.abs() > 1e-9 {
            return Err(GfriError::Numerical(format!(
                "downsampled adjacency not real at column {j}: {v}"
            )));
        }
        first_row[j] = v.re;
    }
    if first_row[0].abs() > 1e-9 {
        return Err(GfriError::Numerical(
            "downsampled adjacency has nonzero diagonal".into(),
        ));
    }
    first_row[0] = 0.0;
    CirculantGraph::from_adjacency_first_row(&first_row, 1e-9)
}
