//! Symmetric Laurent polynomial arithmetic for circulant filter design.
//!
//! Filters are carried as `p(z) = c_0 + sum_i c_i (z^i + z^{-i})` so that
//! products, the substitution `z -> -z` and root analysis can be done at the
//! polynomial level before reducing onto the circulant ring.

use nalgebra::{Complex, DMatrix};

use crate::error::{GfriError, Result};
use crate::graph::{RepresenterPolynomial, C64};

/// Symmetric Laurent polynomial; `c[i]` is the coefficient of `z^i + z^{-i}`
/// for `i >= 1`, `c[0]` the constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct SymLaurent {
    c: Vec<f64>,
}

impl SymLaurent {
    pub fn new(c: Vec<f64>) -> Self {
        assert!(!c.is_empty());
        Self { c }
    }

    pub fn constant(v: f64) -> Self {
        Self { c: vec![v] }
    }

    /// `z + 2 cos(alpha) + z^{-1}`, the e-spline factor.
    pub fn espline_factor(alpha: f64) -> Self {
        Self {
            c: vec![2.0 * alpha.cos(), 1.0],
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn half_degree(&self) -> usize {
        self.c.len() - 1
    }

    /// Full coefficient of `z^t` for any integer `t` (symmetric extension).
    pub fn coeff(&self, t: i64) -> f64 {
        let a = t.unsigned_abs() as usize;
        if a < self.c.len() {
            self.c[a]
        } else {
            0.0
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            c: self.c.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.c.len().max(other.c.len());
        let mut c = vec![0.0; len];
        for (i, v) in c.iter_mut().enumerate() {
            *v = self.coeff(i as i64) + other.coeff(i as i64);
        }
        Self { c }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let q = self.half_degree() + other.half_degree();
        let mut c = vec![0.0; q + 1];
        for (t, v) in c.iter_mut().enumerate() {
            let mut acc = 0.0;
            let t = t as i64;
            for i in -(self.half_degree() as i64)..=self.half_degree() as i64 {
                acc += self.coeff(i) * other.coeff(t - i);
            }
            *v = acc;
        }
        Self { c }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::constant(1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Substitution `z -> -z`; flips the sign of odd coefficients.
    pub fn negate_argument(&self) -> Self {
        Self {
            c: self
                .c
                .iter()
                .enumerate()
                .map(|(i, &v)| if i % 2 == 1 { -v } else { v })
                .collect(),
        }
    }

    /// Evaluates at `z = e^{-i theta}`; real by symmetry.
    pub fn eval_at_angle(&self, theta: f64) -> f64 {
        self.c[0]
            + self
                .c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &v)| 2.0 * v * (theta * i as f64).cos())
                .sum::<f64>()
    }

    /// Coefficients of the ordinary polynomial `z^q p(z)`, ascending degree.
    pub fn to_ordinary(&self) -> Vec<f64> {
        let q = self.half_degree();
        (0..=2 * q).map(|j| self.coeff(j as i64 - q as i64)).collect()
    }

    /// Roots of `z^q p(z)` via the companion matrix.
    pub fn roots(&self) -> Result<Vec<C64>> {
        real_poly_roots(&self.to_ordinary())
    }

    pub fn to_representer(&self) -> RepresenterPolynomial {
        RepresenterPolynomial::new(self.c.clone())
    }

    pub fn to_circulant(&self, n: usize) -> DMatrix<f64> {
        self.to_representer().to_circulant(n)
    }
}

fn strip_leading_zeros(coeffs: &[f64]) -> &[f64] {
    let mut end = coeffs.len();
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    while end > 1 && coeffs[end - 1].abs() <= 1e-14 * scale {
        end -= 1;
    }
    &coeffs[..end]
}

/// Roots of a real polynomial given by ascending coefficients.
pub fn real_poly_roots(coeffs: &[f64]) -> Result<Vec<C64>> {
    let coeffs = strip_leading_zeros(coeffs);
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let ev = m.complex_eigenvalues();
    Ok(ev.iter().copied().collect())
}

/// Roots of a complex polynomial given by ascending coefficients.
pub fn complex_poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let mut end = coeffs.len();
    while end > 1 && coeffs[end - 1].norm() <= 1e-14 * scale {
        end -= 1;
    }
    let coeffs = &coeffs[..end];
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let zero = Complex::new(0.0, 0.0);
    let mut m = DMatrix::<C64>::from_element(deg, deg, zero);
    for i in 1..deg {
        m[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-14, 0)
        .ok_or_else(|| GfriError::Numerical("companion Schur iteration failed".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..deg).map(|i| t[(i, i)]).collect())
}

/// Looks for a pair of opposing roots `(r, -r)` or a root at zero.
///
/// Returns the offending pair when found; tolerances are relative to the
/// root magnitudes.
pub fn find_opposing_or_zero_roots(roots: &[C64], tol: f64) -> Option<(C64, C64)> {
    for (a, &r) in roots.iter().enumerate() {
        if r.norm() < tol {
            return Some((r, r));
        }
        for &s in roots.iter().skip(a + 1) {
            let scale = r.norm().max(s.norm()).max(1e-300);
            if (r + s).norm() < tol * scale {
                return Some((r, s));
            }
        }
    }
    None
}
