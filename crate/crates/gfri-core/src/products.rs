//! Graph products, tensor signals and separable sampling.
//!
//! Covers the four standard graph products, row-stacking tensor
//! decomposition of signals on product graphs, per-factor Prony sampling,
//! circulant projections and the separable two-level wavelet transform.

use nalgebra::{DMatrix, DVector};

use crate::error::{GfriError, Result};
use crate::graph::{GraphSignal, C64};
use crate::multires::{analyze, MultilevelPlan, WaveletCoefficients};
use crate::sampling::{prony_dct_reconstruct, prony_reconstruct, SpectralSamples};
use crate::spectral::{dct_matrix, dft_rows, BasisKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    Kronecker,
    Cartesian,
    Strong,
    Lexicographic,
}

impl std::str::FromStr for ProductKind {
    type Err = GfriError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kronecker" => Ok(Self::Kronecker),
            "cartesian" => Ok(Self::Cartesian),
            "strong" => Ok(Self::Strong),
            "lexicographic" => Ok(Self::Lexicographic),
            other => Err(GfriError::Precondition(format!(
                "unknown product kind '{other}'"
            ))),
        }
    }
}

/// Product of two graphs given by their adjacency matrices.
#[derive(Debug, Clone)]
pub struct ProductGraph {
    pub kind: ProductKind,
    pub factor1: DMatrix<f64>,
    pub factor2: DMatrix<f64>,
    pub adjacency: DMatrix<f64>,
}

impl ProductGraph {
    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }
}

/// Builds the product adjacency for the requested kind.
///
/// Kronecker `A1 (x) A2`, Cartesian `A1 (x) I + I (x) A2`, strong is the sum
/// of both, lexicographic `A1 (x) J + I (x) A2` with `J` all ones.
pub fn graph_product(a1: &DMatrix<f64>, a2: &DMatrix<f64>, kind: ProductKind) -> Result<ProductGraph> {
    if a1.nrows() != a1.ncols() || a2.nrows() != a2.ncols() {
        return Err(GfriError::Precondition(
            "factor adjacency matrices must be square".into(),
        ));
    }
    let (n1, n2) = (a1.nrows(), a2.nrows());
    let i1 = DMatrix::<f64>::identity(n1, n1);
    let i2 = DMatrix::<f64>::identity(n2, n2);
    let adjacency = match kind {
        ProductKind::Kronecker => a1.kronecker(a2),
        ProductKind::Cartesian => a1.kronecker(&i2) + i1.kronecker(a2),
        ProductKind::Strong => a1.kronecker(a2) + a1.kronecker(&i2) + i1.kronecker(a2),
        ProductKind::Lexicographic => {
            let j = DMatrix::<f64>::from_element(n2, n2, 1.0);
            a1.kronecker(&j) + i1.kronecker(a2)
        }
    };
    Ok(ProductGraph {
        kind,
        factor1: a1.clone(),
        factor2: a2.clone(),
        adjacency,
    })
}

/// Signal on a product graph stored as a sum of separable terms.
///
/// Row-stacking convention: the ambient signal at vertex `(i, j)` lives at
/// index `i * n2 + j`, so each term contributes `x1[i] * x2[j]`.
#[derive(Debug, Clone)]
pub struct TensorSignal {
    pub n1: usize,
    pub n2: usize,
    pub factors: Vec<(DVector<C64>, DVector<C64>)>,
}

impl TensorSignal {
    pub fn new(n1: usize, n2: usize, factors: Vec<(DVector<C64>, DVector<C64>)>) -> Result<Self> {
        for (x1, x2) in &factors {
            if x1.len() != n1 || x2.len() != n2 {
                return Err(GfriError::DimensionMismatch {
                    expected: n1.max(n2),
                    actual: if x1.len() != n1 { x1.len() } else { x2.len() },
                });
            }
        }
        Ok(Self { n1, n2, factors })
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Ambient signal `sum_s x_{s,1} (x) x_{s,2}` of length `n1 * n2`.
    pub fn reassemble(&self) -> DVector<C64> {
        let mut out = DVector::from_element(self.n1 * self.n2, C64::new(0.0, 0.0));
        for (x1, x2) in &self.factors {
            for i in 0..self.n1 {
                for j in 0..self.n2 {
                    out[i * self.n2 + j] += x1[i] * x2[j];
                }
            }
        }
        out
    }
}

/// Unit-norm first factor with nonnegative real leading amplitude; scale
/// and phase move to the second factor.
fn canonicalize_pair(x1: &mut DVector<C64>, x2: &mut DVector<C64>) {
    let nrm = x1.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if nrm < 1e-300 {
        return;
    }
    *x1 /= C64::new(nrm, 0.0);
    *x2 *= C64::new(nrm, 0.0);
    if let Some(lead) = x1.iter().find(|v| v.norm() > 1e-12).copied() {
        let phase = lead / lead.norm();
        *x1 /= phase;
        *x2 *= phase;
    }
}

/// Rank factorization of an ambient product-graph signal.
///
/// The signal is reshaped row-wise to `n1 x n2` and factored by SVD; the
/// numerical rank keeps singular values above `1e-9` of the largest.
pub fn tensor_decompose(x: &DVector<C64>, n1: usize, n2: usize) -> Result<TensorSignal> {
    if x.len() != n1 * n2 {
        return Err(GfriError::DimensionMismatch {
            expected: n1 * n2,
            actual: x.len(),
        });
    }
    let mat = DMatrix::from_fn(n1, n2, |i, j| x[i * n2 + j]);
    let svd = mat.svd(true, true);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| GfriError::Numerical("SVD failed on reshaped signal".into()))?;
    let vt = svd
        .v_t
        .as_ref()
        .ok_or_else(|| GfriError::Numerical("SVD failed on reshaped signal".into()))?;
    let smax = svd.singular_values.max().max(1e-300);
    // Unsorted singular values: order columns by magnitude explicitly.
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let mut factors = Vec::new();
    for &s in &order {
        let sigma = svd.singular_values[s];
        if sigma / smax <= 1e-9 {
            break;
        }
        let mut x1: DVector<C64> = u.column(s).into_owned();
        // A = U S V^H and v_t already holds V^H, so the row goes in as is.
        let mut x2: DVector<C64> = vt.row(s).transpose() * C64::new(sigma, 0.0);
        canonicalize_pair(&mut x1, &mut x2);
        factors.push((x1, x2));
    }
    TensorSignal::new(n1, n2, factors)
}

/// Samples and reconstructs a rank-1 tensor signal factor by factor.
///
/// Each factor is reduced to `2K_i` DFT rows (or `4K_i` DCT rows for path
/// factors) and recovered with the matching Prony routine; the scale
/// exchange between factors is fixed by [`canonicalize_pair`].
pub fn multidim_sample_reconstruct(
    x: &TensorSignal,
    sparsity: (usize, usize),
    basis: (BasisKind, BasisKind),
) -> Result<TensorSignal> {
    if x.rank() != 1 {
        return Err(GfriError::Precondition(format!(
            "separable sampling needs a rank-1 signal, have rank {}",
            x.rank()
        )));
    }
    let (x1, x2) = &x.factors[0];
    let r1 = factor_sample_reconstruct(x1, sparsity.0, basis.0)?;
    let r2 = factor_sample_reconstruct(x2, sparsity.1, basis.1)?;
    let mut y1 = r1.dense();
    let mut y2 = r2.dense();
    canonicalize_pair(&mut y1, &mut y2);
    TensorSignal::new(x.n1, x.n2, vec![(y1, y2)])
}

fn factor_sample_reconstruct(
    x: &DVector<C64>,
    k: usize,
    basis: BasisKind,
) -> Result<crate::sampling::SparseSignal> {
    let n = x.len();
    match basis {
        BasisKind::Dft => {
            let m = (2 * k).min(n);
            let y = dft_rows(n, m)? * x;
            prony_reconstruct(
                &SpectralSamples {
                    y,
                    n,
                    basis: BasisKind::Dft,
                },
                k,
            )
        }
        BasisKind::DctIii => {
            let m = (4 * k).min(n);
            let q = dct_matrix(n);
            let y = q.rows(0, m).map(|v| C64::new(v, 0.0)) * x;
            prony_dct_reconstruct(
                &SpectralSamples {
                    y,
                    n,
                    basis: BasisKind::DctIii,
                },
                k,
            )
        }
    }
}

/// Orthogonal projection onto the circulant subspace.
///
/// Averages over the cyclic diagonals: the output's first row carries
/// `c_i = (1/n) <A, P^i>_F` where `P` is the cyclic shift.
pub fn nearest_circulant(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(GfriError::Precondition(
            "circulant projection needs a square matrix".into(),
        ));
    }
    let n = a.nrows();
    let mut c = vec![0.0f64; n];
    for (i, ci) in c.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..n {
            acc += a[(j, (j + i) % n)];
        }
        *ci = acc / n as f64;
    }
    Ok(DMatrix::from_fn(n, n, |j, l| c[(l + n - j) % n]))
}

/// Best Kronecker product of two circulant factors.
#[derive(Debug, Clone)]
pub struct KroneckerApproximation {
    pub factor1: DMatrix<f64>,
    pub factor2: DMatrix<f64>,
    /// Frobenius residual after each iteration, monotone non-increasing.
    pub residuals: Vec<f64>,
}

/// Approximates a symmetric matrix by `A1 (x) A2` with circulant,
/// zero-diagonal factors.
///
/// Van Loan's rearrangement turns the problem into a rank-1 fit, which
/// seeds an alternating scheme: each step solves the constrained least
/// squares for one factor exactly (a scaled circulant projection), so the
/// residual never increases. Stops on relative change below 1e-10 or 500
/// rounds.
pub fn nearest_kronecker_circulant(
    a: &DMatrix<f64>,
    n1: usize,
    n2: usize,
) -> Result<KroneckerApproximation> {
    let n = n1 * n2;
    if a.nrows() != n || a.ncols() != n {
        return Err(GfriError::Precondition(format!(
            "matrix is {}x{}, expected {n}x{n} for factors {n1} and {n2}",
            a.nrows(),
            a.ncols()
        )));
    }
    if n1 == 0 || n2 == 0 {
        return Err(GfriError::Precondition("factor sizes must be positive".into()));
    }
    // Van Loan rearrangement: row (i1, j1) holds vec(A_{i1 j1}) for the
    // (i1, j1) block of size n2 x n2; then |A - A1 (x) A2|_F =
    // |R - vec(A1) vec(A2)^T|_F.
    let r = DMatrix::from_fn(n1 * n1, n2 * n2, |row, col| {
        let (i1, j1) = (row / n1, row % n1);
        let (i2, j2) = (col / n2, col % n2);
        a[(i1 * n2 + i2, j1 * n2 + j2)]
    });
    let svd = r.svd(true, true);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| GfriError::Numerical("SVD failed on rearranged matrix".into()))?;
    let vt = svd
        .v_t
        .as_ref()
        .ok_or_else(|| GfriError::Numerical("SVD failed on rearranged matrix".into()))?;
    let lead = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let scale = svd.singular_values[lead].sqrt();
    let seed1 = DMatrix::from_fn(n1, n1, |i, j| scale * u[(j * n1 + i, lead)]);
    let seed2 = DMatrix::from_fn(n2, n2, |i, j| scale * vt[(lead, j * n2 + i)]);
    let mut a1 = zero_diagonal(&nearest_circulant(&seed1)?);
    let mut a2 = zero_diagonal(&nearest_circulant(&seed2)?);

    let mut residuals = Vec::new();
    let mut prev = f64::INFINITY;
    for _ in 0..500 {
        // Factor 1 update: basis P^i (x) A2 is Frobenius-orthogonal over i,
        // so the constrained least squares is a weighted diagonal average.
        let w2 = a2.iter().map(|v| v * v).sum::<f64>();
        if w2 > 1e-300 {
            a1 = circulant_factor_fit(a, n1, n2, &a2, w2, true);
        }
        let w1 = a1.iter().map(|v| v * v).sum::<f64>();
        if w1 > 1e-300 {
            a2 = circulant_factor_fit(a, n1, n2, &a1, w1, false);
        }
        let resid = (a - a1.kronecker(&a2)).norm();
        residuals.push(resid);
        if prev.is_finite() && (prev - resid).abs() <= 1e-10 * prev.max(1.0) {
            break;
        }
        prev = resid;
    }
    Ok(KroneckerApproximation {
        factor1: a1,
        factor2: a2,
        residuals,
    })
}

fn zero_diagonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for i in 0..out.nrows() {
        out[(i, i)] = 0.0;
    }
    out
}

/// Exact minimizer over zero-diagonal circulants of one factor, the other
/// held fixed. `first` selects whether the free factor multiplies from the
/// left of the Kronecker product.
fn circulant_factor_fit(
    a: &DMatrix<f64>,
    n1: usize,
    n2: usize,
    fixed: &DMatrix<f64>,
    fixed_norm_sq: f64,
    first: bool,
) -> DMatrix<f64> {
    let nf = if first { n1 } else { n2 };
    let mut coeffs = vec![0.0f64; nf];
    for (off, c) in coeffs.iter_mut().enumerate() {
        if off == 0 {
            continue;
        }
        let mut acc = 0.0;
        if first {
            // <A, P^off (x) fixed>: blocks (i1, i1 + off) dotted with fixed.
            for i1 in 0..n1 {
                let j1 = (i1 + off) % n1;
                for i2 in 0..n2 {
                    for j2 in 0..n2 {
                        acc += a[(i1 * n2 + i2, j1 * n2 + j2)] * fixed[(i2, j2)];
                    }
                }
            }
            *c = acc / (n1 as f64 * fixed_norm_sq);
        } else {
            // <A, fixed (x) P^off>: entry (i2, i2 + off) of every block,
            // weighted by the block's coefficient in `fixed`.
            for i1 in 0..n1 {
                for j1 in 0..n1 {
                    let w = fixed[(i1, j1)];
                    if w == 0.0 {
                        continue;
                    }
                    for i2 in 0..n2 {
                        let j2 = (i2 + off) % n2;
                        acc += a[(i1 * n2 + i2, j1 * n2 + j2)] * w;
                    }
                }
            }
            *c = acc / (n2 as f64 * fixed_norm_sq);
        }
    }
    DMatrix::from_fn(nf, nf, |j, l| coeffs[(l + nf - j) % nf])
}

/// Separable wavelet transform: each factor runs through its own plan and
/// the stacked coefficients are placed at their vertex slots.
pub fn separable_gwt(
    x: &TensorSignal,
    plan1: &MultilevelPlan,
    plan2: &MultilevelPlan,
) -> Result<TensorSignal> {
    let mut out = Vec::with_capacity(x.rank());
    for (x1, x2) in &x.factors {
        out.push((
            factor_gwt(x1, plan1)?,
            factor_gwt(x2, plan2)?,
        ));
    }
    TensorSignal::new(x.n1, x.n2, out)
}

fn factor_gwt(x: &DVector<C64>, plan: &MultilevelPlan) -> Result<DVector<C64>> {
    let coeffs = analyze(&GraphSignal::new(x.clone()), plan)?;
    let stacked = coeffs.to_stacked();
    let perm = plan.permutation();
    let mut out = DVector::from_element(x.len(), C64::new(0.0, 0.0));
    for (slot, &vertex) in perm.iter().enumerate() {
        out[vertex] = stacked[slot];
    }
    Ok(out)
}

/// Inverse of [`separable_gwt`] on each factor.
pub fn separable_igwt(
    w: &TensorSignal,
    plan1: &MultilevelPlan,
    plan2: &MultilevelPlan,
) -> Result<TensorSignal> {
    let mut out = Vec::with_capacity(w.rank());
    for (w1, w2) in &w.factors {
        out.push((factor_igwt(w1, plan1)?, factor_igwt(w2, plan2)?));
    }
    TensorSignal::new(w.n1, w.n2, out)
}

fn factor_igwt(w: &DVector<C64>, plan: &MultilevelPlan) -> Result<DVector<C64>> {
    let perm = plan.permutation();
    let mut stacked = DVector::from_element(w.len(), C64::new(0.0, 0.0));
    for (slot, &vertex) in perm.iter().enumerate() {
        stacked[slot] = w[vertex];
    }
    let coeffs = WaveletCoefficients::from_stacked(&stacked, plan)?;
    Ok(crate::multires::synthesize(&coeffs, plan)?.values().clone())
}
