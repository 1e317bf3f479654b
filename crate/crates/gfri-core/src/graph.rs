//! Circulant and path graphs with their matrix operators.
//!
//! A circulant graph on `n` vertices connects node `i` to `(i +/- s) mod n`
//! for every generator offset `s`, all with the same weight per offset. Its
//! adjacency and Laplacian matrices are symmetric circulant, which is what
//! the rest of the crate exploits.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{GfriError, Result};

pub type C64 = Complex<f64>;

/// Undirected circulant graph described by its generating set.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantGraph {
    n: usize,
    /// Offsets with weights, strictly increasing in the offset.
    generators: Vec<(usize, f64)>,
}

impl CirculantGraph {
    /// Builds a circulant graph, validating the generating set.
    ///
    /// Offsets must be strictly increasing, lie in `1..=n/2`, carry positive
    /// weights, and the bandwidth `B = max(s)` must satisfy `2B < n`.
    pub fn new(n: usize, generators: Vec<(usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(GfriError::InvalidGraph("vertex count must be positive".into()));
        }
        if generators.is_empty() {
            return Err(GfriError::InvalidGraph("generating set must be nonempty".into()));
        }
        let mut prev = 0usize;
        for &(s, w) in &generators {
            if s == 0 || 2 * s > n {
                return Err(GfriError::InvalidGraph(format!(
                    "generator offset {s} outside 1..={}",
                    n / 2
                )));
            }
            if s <= prev {
                return Err(GfriError::InvalidGraph(
                    "generator offsets must be strictly increasing".into(),
                ));
            }
            if !(w > 0.0) {
                return Err(GfriError::InvalidGraph(format!(
                    "generator weight for offset {s} must be positive"
                )));
            }
            prev = s;
        }
        let b = generators.last().unwrap().0;
        if 2 * b >= n {
            return Err(GfriError::InvalidGraph(format!(
                "bandwidth {b} violates 2B < n for n = {n}"
            )));
        }
        Ok(Self { n, generators })
    }

    /// Unweighted cycle graph `C_n`.
    pub fn cycle(n: usize) -> Result<Self> {
        Self::new(n, vec![(1, 1.0)])
    }

    /// Unweighted circulant graph from a list of offsets.
    pub fn unweighted(n: usize, offsets: &[usize]) -> Result<Self> {
        Self::new(n, offsets.iter().map(|&s| (s, 1.0)).collect())
    }

    /// Reads a circulant graph off the first row of a symmetric circulant
    /// adjacency matrix, thresholding entries at `tol`.
    pub fn from_adjacency_first_row(row: &[f64], tol: f64) -> Result<Self> {
        let n = row.len();
        let mut generators = Vec::new();
        for s in 1..=n / 2 {
            let w = row[s];
            let w_mirror = row[n - s];
            if (w - w_mirror).abs() > tol && 2 * s != n {
                return Err(GfriError::InvalidGraph(format!(
                    "first row not symmetric at offset {s}: {w} vs {w_mirror}"
                )));
            }
            if w.abs() > tol {
                generators.push((s, w));
            }
        }
        Self::new(n, generators)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[(usize, f64)] {
        &self.generators
    }

    /// Bandwidth `B = max(s)`.
    pub fn bandwidth(&self) -> usize {
        self.generators.last().unwrap().0
    }

    /// Degree `d` of every node. An offset `s = n/2` pairs with itself and
    /// contributes its weight once.
    pub fn degree(&self) -> f64 {
        self.generators
            .iter()
            .map(|&(s, w)| if 2 * s == self.n { w } else { 2.0 * w })
            .sum()
    }

    /// Dense adjacency matrix.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for &(s, w) in &self.generators {
                a[(i, (i + s) % n)] = w;
                a[(i, (i + n - s % n) % n)] = w;
            }
        }
        a
    }

    /// Combinatorial Laplacian `L = D - A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adjacency();
        let d = self.degree();
        for i in 0..self.n {
            l[(i, i)] += d;
        }
        l
    }

    /// Exponential degree `d~_alpha = sum_j 2 d_j cos(alpha s_j)`.
    ///
    /// A self-paired offset `s = n/2` contributes once, mirroring `degree`.
    pub fn exponential_degree(&self, alpha: f64) -> f64 {
        self.generators
            .iter()
            .map(|&(s, w)| {
                let c = (alpha * s as f64).cos();
                if 2 * s == self.n {
                    w * c
                } else {
                    2.0 * w * c
                }
            })
            .sum()
    }

    /// E-graph Laplacian `L~_alpha = d~_alpha I - A`.
    pub fn e_graph_laplacian(&self, alpha: f64) -> DMatrix<f64> {
        let mut l = -self.adjacency();
        let da = self.exponential_degree(alpha);
        for i in 0..self.n {
            l[(i, i)] += da;
        }
        l
    }

    /// A circulant graph is bipartite iff `n` is even and all offsets odd.
    pub fn is_bipartite(&self) -> bool {
        self.n % 2 == 0 && self.generators.iter().all(|&(s, _)| s % 2 == 1)
    }

    /// Representer polynomial of the adjacency matrix.
    pub fn adjacency_representer(&self) -> RepresenterPolynomial {
        let b = self.bandwidth();
        let mut coeffs = vec![0.0; b + 1];
        for &(s, w) in &self.generators {
            // s = n/2 appears as a single edge; splitting its weight keeps
            // l(z) = w(z^s + z^-s)/... consistent with the matrix first row,
            // because z^s and z^-s coincide on the ring there.
            if 2 * s == self.n {
                coeffs[s] += w / 2.0;
            } else {
                coeffs[s] += w;
            }
        }
        RepresenterPolynomial::new(coeffs)
    }

    /// Representer polynomial of the Laplacian.
    pub fn laplacian_representer(&self) -> RepresenterPolynomial {
        let mut rep = self.adjacency_representer();
        for c in rep.coeffs.iter_mut() {
            *c = -*c;
        }
        rep.coeffs[0] += self.degree();
        rep
    }

    /// DFT-ordered eigenvalues of `A / d`.
    pub fn normalized_adjacency_spectrum(&self) -> Vec<f64> {
        let d = self.degree();
        let rep = self.adjacency_representer();
        (0..self.n)
            .map(|k| rep.eval_at_frequency(k, self.n) / d)
            .collect()
    }
}

/// Unweighted path graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathGraph {
    n: usize,
}

impl PathGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GfriError::InvalidGraph("vertex count must be positive".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Tridiagonal 0/1 adjacency.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n.saturating_sub(1) {
            a[(i, i + 1)] = 1.0;
            a[(i + 1, i)] = 1.0;
        }
        a
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        let a = self.adjacency();
        let mut l = -a.clone();
        for i in 0..self.n {
            l[(i, i)] = a.row(i).sum();
        }
        l
    }

    /// Symmetric normalized adjacency `D^{-1/2} A D^{-1/2}`.
    pub fn normalized_adjacency(&self) -> DMatrix<f64> {
        let a = self.adjacency();
        let dinv: Vec<f64> = (0..self.n)
            .map(|i| {
                let d = a.row(i).sum();
                if d > 0.0 {
                    1.0 / d.sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        DMatrix::from_fn(self.n, self.n, |i, j| dinv[i] * a[(i, j)] * dinv[j])
    }

    /// `D^{1/2} 1`, the nullspace direction of `I - A_n`.
    pub fn sqrt_degree_vector(&self) -> DVector<f64> {
        let a = self.adjacency();
        DVector::from_fn(self.n, |i, _| a.row(i).sum().sqrt())
    }
}

/// Symmetric circulant first-row encoding `l(z) = l_0 + sum_i l_i (z^i + z^-i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresenterPolynomial {
    coeffs: Vec<f64>,
}

impl RepresenterPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn identity() -> Self {
        Self { coeffs: vec![1.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Half-degree `B` of the Laurent polynomial.
    pub fn half_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates at `z = e^{-i 2 pi k / n}`; real by symmetry.
    pub fn eval_at_frequency(&self, k: usize, n: usize) -> f64 {
        self.eval_at_angle(2.0 * std::f64::consts::PI * k as f64 / n as f64)
    }

    /// Evaluates at `z = e^{-i theta}`.
    pub fn eval_at_angle(&self, theta: f64) -> f64 {
        self.coeffs[0]
            + self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| 2.0 * c * (theta * i as f64).cos())
                .sum::<f64>()
    }

    /// First row of the circulant matrix of dimension `n`, wrapping indices.
    pub fn to_first_row(&self, n: usize) -> Vec<f64> {
        let mut row = vec![0.0; n];
        row[0] = self.coeffs[0];
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            row[i % n] += c;
            row[(n - i % n) % n] += c;
        }
        row
    }

    /// Dense circulant matrix of dimension `n`.
    pub fn to_circulant(&self, n: usize) -> DMatrix<f64> {
        let row = self.to_first_row(n);
        DMatrix::from_fn(n, n, |i, j| row[(j + n - i % n) % n])
    }
}

/// A complex vertex signal.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal {
    values: DVector<C64>,
}

impl GraphSignal {
    pub fn new(values: DVector<C64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            values: DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))),
        }
    }

    /// `x(j) = e^{i alpha j}`.
    pub fn complex_exponential(n: usize, alpha: f64) -> Self {
        Self {
            values: DVector::from_fn(n, |j, _| C64::from_polar(1.0, alpha * j as f64)),
        }
    }

    /// `x(j) = a + b j`.
    pub fn linear(n: usize, a: f64, b: f64) -> Self {
        Self {
            values: DVector::from_fn(n, |j, _| C64::new(a + b * j as f64, 0.0)),
        }
    }

    /// `x(j) = sum_d coeffs[d] j^d`.
    pub fn polynomial(n: usize, coeffs: &[f64]) -> Self {
        Self {
            values: DVector::from_fn(n, |j, _| {
                let t = j as f64;
                C64::new(coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c), 0.0)
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.len() == 0
    }

    pub fn values(&self) -> &DVector<C64> {
        &self.values
    }

    pub fn inf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Applies a circulant filter given by its symmetric first row to a signal.
///
/// Exact cyclic convolution; `y = C x` for the circulant matrix `C` with the
/// given representer.
pub fn apply_circulant_filter(rep: &RepresenterPolynomial, x: &GraphSignal) -> Result<GraphSignal> {
    let n = x.len();
    if rep.half_degree() >= n {
        return Err(GfriError::DimensionMismatch {
            expected: n,
            actual: rep.half_degree() + 1,
        });
    }
    let row = rep.to_first_row(n);
    let v = x.values();
    let mut out = DVector::from_element(n, C64::new(0.0, 0.0));
    for i in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for (t, &c) in row.iter().enumerate() {
            if c != 0.0 {
                acc += v[(i + t) % n] * c;
            }
        }
        out[i] = acc;
    }
    Ok(GraphSignal::new(out))
}

/// Wrap-around border index set: `width` entries on each side of vertex 0.
///
/// Annihilation statements hold outside this set; `width` is the relevant
/// filter matrix bandwidth (graph bandwidth times the filter order).
pub fn border_indices(n: usize, width: usize) -> Vec<usize> {
    let mut set = std::collections::BTreeSet::new();
    for t in 0..width.min(n) {
        set.insert(t);
        set.insert((n - 1 + n - t) % n);
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inf_norm_vec(v: &DVector<C64>) -> f64 {
        v.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn cycle_adjacency_first_row() {
        let g = CirculantGraph::cycle(4).unwrap();
        let a = g.adjacency();
        assert_eq!(a.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn reference_graph_is_six_regular_bandwidth_five() {
        let g = CirculantGraph::unweighted(64, &[1, 3, 5]).unwrap();
        assert_eq!(g.degree(), 6.0);
        assert_eq!(g.bandwidth(), 5);
        let a = g.adjacency();
        for i in 0..64 {
            assert_abs_diff_eq!(a.row(i).sum(), 6.0, epsilon = 1e-14);
        }
        assert_eq!(&a, &a.transpose());
    }

    #[test]
    fn path_adjacency() {
        let p = PathGraph::new(3).unwrap();
        let a = p.adjacency();
        let expect = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 1., 0., 1., 0., 1., 0.]);
        assert_eq!(a, expect);
    }

    #[test]
    fn cycle_laplacian_first_row() {
        let g = CirculantGraph::cycle(4).unwrap();
        let l = g.laplacian();
        assert_eq!(l.row(0).iter().copied().collect::<Vec<_>>(), vec![2.0, -1.0, 0.0, -1.0]);
    }

    #[test]
    fn laplacian_row_sums_zero() {
        let g = CirculantGraph::new(12, vec![(1, 0.5), (3, 2.0), (5, 1.0)]).unwrap();
        let l = g.laplacian();
        let ones = DVector::from_element(12, 1.0);
        assert!((&l * ones).amax() < 1e-12);
    }

    #[test]
    fn path_laplacian_endpoints() {
        let p = PathGraph::new(4).unwrap();
        let l = p.laplacian();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[1., -1., 0., 0., -1., 2., -1., 0., 0., -1., 2., -1., 0., 0., -1., 1.],
        );
        assert_eq!(l, expect);
    }

    #[test]
    fn exponential_degree_limits() {
        let g = CirculantGraph::cycle(8).unwrap();
        assert_abs_diff_eq!(g.exponential_degree(0.0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            g.exponential_degree(std::f64::consts::PI),
            -2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn known_exponential_degree_ratio() {
        // S = {1,3,5}, n = 64, alpha = 2 pi 15/64 gives the known ratio 0.093.
        let g = CirculantGraph::unweighted(64, &[1, 3, 5]).unwrap();
        let alpha = 2.0 * std::f64::consts::PI * 15.0 / 64.0;
        let ratio = g.exponential_degree(alpha) / g.degree();
        assert_abs_diff_eq!(ratio, 0.093, epsilon = 5e-4);
    }

    #[test]
    fn e_laplacian_at_zero_is_laplacian() {
        let g = CirculantGraph::unweighted(16, &[1, 2]).unwrap();
        assert_eq!(g.e_graph_laplacian(0.0), g.laplacian());
    }

    #[test]
    fn e_laplacian_annihilates_fourier_exponential() {
        let n = 8;
        let g = CirculantGraph::cycle(n).unwrap();
        let alpha = 2.0 * std::f64::consts::PI / n as f64;
        let l = g.e_graph_laplacian(alpha);
        let x = GraphSignal::complex_exponential(n, alpha);
        let y = DMatrix::from_fn(n, n, |i, j| C64::new(l[(i, j)], 0.0)) * x.values();
        assert!(inf_norm_vec(&y) < 1e-12);
    }

    #[test]
    fn e_laplacian_border_effect_off_grid() {
        // alpha = 0.3 is not a Fourier frequency; nonzeros confined to the
        // 2B = 4 wrap-around border {0, 1, 14, 15}.
        let n = 16;
        let g = CirculantGraph::unweighted(n, &[1, 2]).unwrap();
        let alpha = 0.3;
        let l = g.e_graph_laplacian(alpha);
        let x = GraphSignal::complex_exponential(n, alpha);
        let y = DMatrix::from_fn(n, n, |i, j| C64::new(l[(i, j)], 0.0)) * x.values();
        let border = border_indices(n, g.bandwidth());
        assert_eq!(border, vec![0, 1, 14, 15]);
        for i in 0..n {
            if border.contains(&i) {
                continue;
            }
            assert!(y[i].norm() < 1e-12, "index {i} not annihilated: {}", y[i]);
        }
    }

    #[test]
    fn laplacian_annihilates_linear_outside_border() {
        let n = 24;
        let g = CirculantGraph::unweighted(n, &[1, 3]).unwrap();
        let l = g.laplacian();
        let x = GraphSignal::linear(n, 0.7, -1.3);
        let y = DMatrix::from_fn(n, n, |i, j| C64::new(l[(i, j)], 0.0)) * x.values();
        let border = border_indices(n, g.bandwidth());
        for i in 0..n {
            if !border.contains(&i) {
                assert!(y[i].norm() < 1e-10);
            }
        }
        // Constant signal: exactly zero everywhere.
        let c = GraphSignal::from_real(&vec![3.5; n]);
        let yc = DMatrix::from_fn(n, n, |i, j| C64::new(l[(i, j)], 0.0)) * c.values();
        assert!(inf_norm_vec(&yc) < 1e-12);
    }

    #[test]
    fn bipartite_detection() {
        assert!(CirculantGraph::unweighted(64, &[1, 3, 5]).unwrap().is_bipartite());
        assert!(!CirculantGraph::unweighted(8, &[1, 2]).unwrap().is_bipartite());
        assert!(!CirculantGraph::cycle(5).unwrap().is_bipartite());
    }

    #[test]
    fn representer_matches_dense_eigenvalues() {
        let g = CirculantGraph::new(12, vec![(1, 1.0), (2, 0.25)]).unwrap();
        let rep = g.laplacian_representer();
        let mut evs: Vec<f64> = (0..12).map(|k| rep.eval_at_frequency(k, 12)).collect();
        let mut dense: Vec<f64> = g.laplacian().symmetric_eigen().eigenvalues.iter().copied().collect();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        dense.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in evs.iter().zip(&dense) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn half_offset_rejected_by_bandwidth_rule() {
        // s = n/2 gives 2B = n, outside the standing assumption.
        assert!(CirculantGraph::new(8, vec![(1, 1.0), (4, 2.0)]).is_err());
        // Largest admissible offset: 2B = n - 1.
        let g = CirculantGraph::new(9, vec![(1, 1.0), (4, 1.0)]).unwrap();
        assert_eq!(g.degree(), 4.0);
        let a = g.adjacency();
        for i in 0..9 {
            assert_abs_diff_eq!(a.row(i).sum(), 4.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn filter_identity_and_laplacian() {
        let n = 16;
        let g = CirculantGraph::unweighted(n, &[1, 2]).unwrap();
        let x = GraphSignal::complex_exponential(n, 0.41);
        let id = RepresenterPolynomial::identity();
        let y = apply_circulant_filter(&id, &x).unwrap();
        assert_eq!(y, x);
        let lap = g.laplacian_representer();
        let ones = GraphSignal::from_real(&vec![1.0; n]);
        let z = apply_circulant_filter(&lap, &ones).unwrap();
        assert!(z.inf_norm() < 1e-12);
    }

    #[test]
    fn filter_matches_dense_matmul() {
        let n = 16;
        let rep = RepresenterPolynomial::new(vec![0.3, -1.2, 0.5, 0.07]);
        let x = GraphSignal::new(DVector::from_fn(n, |i, _| {
            C64::new((i as f64 * 0.77).sin(), (i as f64 * 1.3).cos())
        }));
        let y = apply_circulant_filter(&rep, &x).unwrap();
        let m = rep.to_circulant(n);
        let dense = DMatrix::from_fn(n, n, |i, j| C64::new(m[(i, j)], 0.0)) * x.values();
        assert!(inf_norm_vec(&(y.values() - dense)) < 1e-12);
    }
}
