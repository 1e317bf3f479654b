//! Graph coarsening: Kron (Schur complement) reduction, spectral reduction,
//! and the same-generating-set shortcut they agree with on circulants.

use nalgebra::DMatrix;

use crate::error::{GfriError, Result};
use crate::graph::CirculantGraph;
use crate::spectral::spectral_downsample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarseningScheme {
    Kron,
    Spectral,
    SameGeneratingSet,
}

/// Output of a coarsening step: the coarse Laplacian, and the coarse graph
/// when the scheme guarantees circulant structure.
#[derive(Debug, Clone)]
pub struct CoarseningResult {
    pub scheme: CoarseningScheme,
    pub kept: Vec<usize>,
    pub laplacian: DMatrix<f64>,
    pub graph: Option<CirculantGraph>,
}

fn validate_laplacian(l: &DMatrix<f64>) -> Result<()> {
    if l.nrows() != l.ncols() {
        return Err(GfriError::Precondition("Laplacian must be square".into()));
    }
    let scale = l.amax().max(1.0);
    for i in 0..l.nrows() {
        for j in i + 1..l.ncols() {
            if (l[(i, j)] - l[(j, i)]).abs() > 1e-8 * scale {
                return Err(GfriError::Precondition(format!(
                    "Laplacian not symmetric at ({i}, {j})"
                )));
            }
        }
        if l.row(i).sum().abs() > 1e-8 * scale {
            return Err(GfriError::Precondition(format!(
                "Laplacian row {i} does not sum to zero"
            )));
        }
    }
    Ok(())
}

/// Kron reduction: Schur complement of the discarded block.
///
/// `L~ = L_aa - L_ab L_bb^{-1} L_ab^T` over the kept set `v_alpha`.
pub fn kron_reduce(l: &DMatrix<f64>, v_alpha: &[usize]) -> Result<DMatrix<f64>> {
    validate_laplacian(l)?;
    let n = l.nrows();
    let mut kept: Vec<usize> = v_alpha.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(GfriError::Precondition("kept vertex set is empty".into()));
    }
    if *kept.last().unwrap() >= n {
        return Err(GfriError::Precondition(format!(
            "kept vertex {} outside 0..{n}",
            kept.last().unwrap()
        )));
    }
    let dropped: Vec<usize> = (0..n).filter(|v| !kept.contains(v)).collect();
    let a = kept.len();
    let b = dropped.len();
    if b == 0 {
        return Ok(l.clone());
    }
    let l_aa = DMatrix::from_fn(a, a, |i, j| l[(kept[i], kept[j])]);
    let l_ab = DMatrix::from_fn(a, b, |i, j| l[(kept[i], dropped[j])]);
    let l_bb = DMatrix::from_fn(b, b, |i, j| l[(dropped[i], dropped[j])]);
    let lu = l_bb.lu();
    let solved = lu
        .solve(&l_ab.transpose())
        .ok_or_else(|| GfriError::Singular("discarded block of the Laplacian is singular".into()))?;
    let schur = &l_aa - &l_ab * solved;
    // Symmetrize away the solve's rounding skew.
    Ok((&schur + schur.transpose()) * 0.5)
}

/// Kron reduction packaged with scheme metadata and circulant detection.
pub fn kron_reduce_graph(g: &CirculantGraph, v_alpha: &[usize]) -> Result<CoarseningResult> {
    let lap = kron_reduce(&g.laplacian(), v_alpha)?;
    let graph = circulant_from_laplacian(&lap, 1e-9).ok();
    let mut kept = v_alpha.to_vec();
    kept.sort_unstable();
    kept.dedup();
    Ok(CoarseningResult {
        scheme: CoarseningScheme::Kron,
        kept,
        laplacian: lap,
        graph,
    })
}

/// Row-shift test for circulant structure.
pub fn is_circulant_matrix(m: &DMatrix<f64>, tol: f64) -> bool {
    let n = m.nrows();
    if n != m.ncols() {
        return false;
    }
    for i in 1..n {
        for j in 0..n {
            if (m[(i, j)] - m[(0, (j + n - i) % n)]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Reads a circulant graph off a circulant Laplacian, if it is one.
pub fn circulant_from_laplacian(l: &DMatrix<f64>, tol: f64) -> Result<CirculantGraph> {
    let n = l.nrows();
    // Row-shift test: every row must be the first row rotated.
    for i in 1..n {
        for j in 0..n {
            if (l[(i, j)] - l[(0, (j + n - i) % n)]).abs() > tol {
                return Err(GfriError::InvalidGraph(format!(
                    "matrix is not circulant at row {i}"
                )));
            }
        }
    }
    let row: Vec<f64> = (0..n).map(|j| -l[(0, j)]).collect();
    let mut adj_row = row;
    adj_row[0] = 0.0;
    CirculantGraph::from_adjacency_first_row(&adj_row, tol)
}

/// Applies spectral downsampling `j` times; dimension `n/2^j`, same
/// generating set throughout.
pub fn spectral_reduce(g: &CirculantGraph, j_levels: usize) -> Result<CirculantGraph> {
    let mut cur = g.clone();
    for level in 0..j_levels {
        cur = spectral_downsample(&cur).map_err(|e| {
            GfriError::Precondition(format!("spectral reduction failed at level {level}: {e}"))
        })?;
    }
    Ok(cur)
}

/// Halves the dimension keeping the generating set and weights.
///
/// Agrees with one step of spectral reduction on every admissible input.
pub fn same_generating_set_coarsen(g: &CirculantGraph) -> Result<CirculantGraph> {
    let n = g.n();
    if n % 2 != 0 {
        return Err(GfriError::Precondition(format!(
            "dimension {n} must be even to halve"
        )));
    }
    let b = g.bandwidth();
    if 2 * b >= n / 2 {
        return Err(GfriError::Precondition(format!(
            "bandwidth {b} violates 2B < n/2 = {}",
            n / 2
        )));
    }
    CirculantGraph::new(n / 2, g.generators().to_vec())
}
