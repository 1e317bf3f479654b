//! Multilevel graph wavelet transforms: per-level filterbanks on coarsened
//! graphs with frequency parameters doubled at each level.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

use crate::coarsen::{kron_reduce_graph, same_generating_set_coarsen, spectral_reduce, CoarseningScheme};
use crate::error::{GfriError, Result};
use crate::filterbank::{
    build_hgeswt, build_hgswt, check_invertibility, transform_matrix, DownsamplePattern,
    FilterBank, Verdict,
};
use crate::graph::{CirculantGraph, GraphSignal, C64};

/// One decomposition level: the graph it acts on, its filterbank, and the
/// sampled transform with its complex factorization for synthesis.
#[derive(Debug, Clone)]
pub struct PlanLevel {
    pub graph: CirculantGraph,
    pub bank: FilterBank,
    pub pattern: DownsamplePattern,
    pub w: DMatrix<f64>,
}

/// A validated J-level wavelet transform plan.
#[derive(Debug, Clone)]
pub struct MultilevelPlan {
    pub n: usize,
    pub scheme: CoarseningScheme,
    /// Levels 0..J; level j acts on `n / 2^j` vertices.
    pub levels: Vec<PlanLevel>,
    /// Graph left after the final coarsening step.
    pub final_graph: CirculantGraph,
}

impl MultilevelPlan {
    pub fn j_levels(&self) -> usize {
        self.levels.len()
    }

    /// Length of the low-pass band, `n / 2^J`.
    pub fn lowpass_len(&self) -> usize {
        self.n >> self.levels.len()
    }

    /// Maps stacked coefficient positions to original vertex indices.
    ///
    /// Ordering: low-pass block first, then high-pass bands by descending
    /// level. Low-pass slot `v` sits at vertex `v 2^J`; level-j high-pass
    /// slot `i` at vertex `(2i+1) 2^j`.
    pub fn permutation(&self) -> Vec<usize> {
        let j_levels = self.levels.len();
        let mut perm = Vec::with_capacity(self.n);
        for v in 0..self.lowpass_len() {
            perm.push(v << j_levels);
        }
        for j in (0..j_levels).rev() {
            for i in 0..self.n >> (j + 1) {
                perm.push((2 * i + 1) << j);
            }
        }
        perm
    }
}

/// Banded multiresolution coefficients of one signal.
#[derive(Debug, Clone)]
pub struct WaveletCoefficients {
    pub lowpass: DVector<C64>,
    /// `highpass[j]` has length `n / 2^{j+1}`.
    pub highpass: Vec<DVector<C64>>,
}

impl WaveletCoefficients {
    /// Stacks bands as `[lowpass, hp_{J-1}, ..., hp_0]`.
    pub fn to_stacked(&self) -> DVector<C64> {
        let total = self.lowpass.len() + self.highpass.iter().map(|h| h.len()).sum::<usize>();
        let mut out = DVector::from_element(total, C64::new(0.0, 0.0));
        let mut at = 0;
        for v in self.lowpass.iter() {
            out[at] = *v;
            at += 1;
        }
        for h in self.highpass.iter().rev() {
            for v in h.iter() {
                out[at] = *v;
                at += 1;
            }
        }
        out
    }

    pub fn from_stacked(stacked: &DVector<C64>, plan: &MultilevelPlan) -> Result<Self> {
        if stacked.len() != plan.n {
            return Err(GfriError::DimensionMismatch {
                expected: plan.n,
                actual: stacked.len(),
            });
        }
        let j_levels = plan.j_levels();
        let mut at = plan.lowpass_len();
        let lowpass = DVector::from_fn(at, |i, _| stacked[i]);
        let mut highpass = vec![DVector::from_element(0, C64::new(0.0, 0.0)); j_levels];
        for j in (0..j_levels).rev() {
            let len = plan.n >> (j + 1);
            highpass[j] = DVector::from_fn(len, |i, _| stacked[at + i]);
            at += len;
        }
        Ok(Self { lowpass, highpass })
    }

    /// Number of entries above `1e-9` times the largest modulus.
    pub fn sparsity(&self) -> usize {
        let stacked = self.to_stacked();
        let peak = stacked.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0;
        }
        stacked.iter().filter(|v| v.norm() > 1e-9 * peak).count()
    }
}

fn coarsen_once(g: &CirculantGraph, scheme: CoarseningScheme) -> Result<CirculantGraph> {
    match scheme {
        CoarseningScheme::SameGeneratingSet => same_generating_set_coarsen(g),
        CoarseningScheme::Spectral => spectral_reduce(g, 1),
        CoarseningScheme::Kron => {
            let kept: Vec<usize> = (0..g.n()).step_by(2).collect();
            let result = kron_reduce_graph(g, &kept)?;
            result.graph.ok_or_else(|| {
                GfriError::Precondition(
                    "Kron reduction left the admissible circulant family".into(),
                )
            })
        }
    }
}

/// Builds and validates a J-level plan with alphas dilated by `2^j` per level.
///
/// Every level's filterbank must pass the invertibility check, and every
/// dilated frequency must stay below the half-band limit `pi` at the final
/// level, so the coarsest low-pass band remains identifiable.
pub fn plan_mrt(
    g: &CirculantGraph,
    k: usize,
    alphas: &[f64],
    j_levels: usize,
    scheme: CoarseningScheme,
) -> Result<MultilevelPlan> {
    let n = g.n();
    if j_levels > 0 && n % (1 << j_levels) != 0 {
        return Err(GfriError::Precondition(format!(
            "n = {n} is not divisible by 2^{j_levels}"
        )));
    }
    for &a in alphas {
        let dilated = 2f64.powi(j_levels as i32) * a.abs();
        if a != 0.0 && dilated >= PI - 1e-12 {
            return Err(GfriError::Precondition(format!(
                "frequency {a:.6} dilated over {j_levels} levels reaches {dilated:.6} >= pi"
            )));
        }
    }
    let mut levels = Vec::with_capacity(j_levels);
    let mut cur = g.clone();
    for j in 0..j_levels {
        let scaled: Vec<f64> = alphas.iter().map(|&a| a * 2f64.powi(j as i32)).collect();
        let bank = if scaled == [0.0] {
            build_hgswt(&cur, k)?
        } else {
            build_hgeswt(&cur, k, &scaled)?
        };
        let pattern = DownsamplePattern::standard_even(cur.n());
        match check_invertibility(&bank, &pattern)? {
            Verdict::Invertible => {}
            Verdict::NotInvertible(reason) => {
                return Err(GfriError::NotInvertible(format!(
                    "level {j} transform is singular: {reason}"
                )));
            }
        }
        let w = transform_matrix(&bank, &pattern)?;
        let next = coarsen_once(&cur, scheme)
            .map_err(|e| GfriError::Precondition(format!("coarsening after level {j}: {e}")))?;
        levels.push(PlanLevel {
            graph: cur,
            bank,
            pattern,
            w,
        });
        cur = next;
    }
    Ok(MultilevelPlan {
        n,
        scheme,
        levels,
        final_graph: cur,
    })
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// Runs the plan: low-pass even samples feed the next level, high-pass odd
/// samples are stored per level.
pub fn analyze(x: &GraphSignal, plan: &MultilevelPlan) -> Result<WaveletCoefficients> {
    if x.len() != plan.n {
        return Err(GfriError::DimensionMismatch {
            expected: plan.n,
            actual: x.len(),
        });
    }
    let mut cur = x.values().clone();
    let mut highpass = Vec::with_capacity(plan.levels.len());
    for level in &plan.levels {
        let y = complexify(&level.w) * &cur;
        let half = y.len() / 2;
        highpass.push(DVector::from_fn(half, |i, _| y[2 * i + 1]));
        cur = DVector::from_fn(half, |i, _| y[2 * i]);
    }
    Ok(WaveletCoefficients {
        lowpass: cur,
        highpass,
    })
}

/// Exact inverse of `analyze` for invertible plans.
pub fn synthesize(coeffs: &WaveletCoefficients, plan: &MultilevelPlan) -> Result<GraphSignal> {
    let j_levels = plan.levels.len();
    if coeffs.highpass.len() != j_levels || coeffs.lowpass.len() != plan.lowpass_len() {
        return Err(GfriError::DimensionMismatch {
            expected: plan.lowpass_len(),
            actual: coeffs.lowpass.len(),
        });
    }
    let mut cur = coeffs.lowpass.clone();
    for j in (0..j_levels).rev() {
        let level = &plan.levels[j];
        let full = cur.len() * 2;
        if coeffs.highpass[j].len() != cur.len() {
            return Err(GfriError::DimensionMismatch {
                expected: cur.len(),
                actual: coeffs.highpass[j].len(),
            });
        }
        let mut y = DVector::from_element(full, C64::new(0.0, 0.0));
        for i in 0..cur.len() {
            y[2 * i] = cur[i];
            y[2 * i + 1] = coeffs.highpass[j][i];
        }
        cur = complexify(&level.w)
            .lu()
            .solve(&y)
            .ok_or_else(|| GfriError::Singular(format!("level {j} transform is singular")))?;
    }
    Ok(GraphSignal::new(cur))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsityVariant {
    /// Spline filterbank on polynomial signals.
    HgswtI,
    /// Complementary filterbank variant.
    HcgswtII,
    /// Single-level alternative pattern minimum.
    MinimumIII,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityPrediction {
    pub k: usize,
    /// Set when the closed form's preconditions fail and the value carries
    /// the border-parity correction uncertainty.
    pub approximate: bool,
}

/// Closed-form sparsity of the J-level decomposition of a low-degree
/// polynomial signal.
pub fn predicted_sparsity(
    n: usize,
    b: usize,
    t_lp: usize,
    j: usize,
    variant: SparsityVariant,
) -> Result<SparsityPrediction> {
    if n == 0 || b == 0 {
        return Err(GfriError::Precondition("need n > 0 and B > 0".into()));
    }
    match variant {
        SparsityVariant::MinimumIII => {
            if j != 0 {
                return Err(GfriError::Precondition(
                    "minimum-pattern variant applies to a single level (j = 0)".into(),
                ));
            }
            Ok(SparsityPrediction {
                k: 2 * b,
                approximate: false,
            })
        }
        SparsityVariant::HgswtI => {
            if j == 0 {
                return Err(GfriError::Precondition("variant needs j >= 1".into()));
            }
            if n % (1 << j) != 0 {
                return Err(GfriError::Precondition(format!(
                    "n = {n} not divisible by 2^{j}"
                )));
            }
            let pow = 2f64.powi(1 - j as i32);
            let exact = (n >> j) as f64 + b as f64 * (2.0 * (j as f64 - 1.0) + pow);
            let ok = dyadic_bandwidth_ok(n, b, j);
            Ok(SparsityPrediction {
                k: exact.round() as usize,
                approximate: !ok,
            })
        }
        SparsityVariant::HcgswtII => {
            if j == 0 {
                return Err(GfriError::Precondition("variant needs j >= 1".into()));
            }
            if n % (1 << j) != 0 {
                return Err(GfriError::Precondition(format!(
                    "n = {n} not divisible by 2^{j}"
                )));
            }
            let pow = 2f64.powi(1 - j as i32);
            let exact =
                (n >> j) as f64 + (b * j) as f64 + t_lp as f64 * (j as f64 + pow - 2.0);
            let ok = dyadic_bandwidth_ok(n, b, j) && t_lp % (1 << (j - 1)) == 0;
            Ok(SparsityPrediction {
                k: exact.round() as usize,
                approximate: !ok,
            })
        }
    }
}

/// Checks `B = 2^{j-1} r` and the per-level support bound
/// `sum_{m<=l} B/2^m <= n/2^{l+1}`.
fn dyadic_bandwidth_ok(n: usize, b: usize, j: usize) -> bool {
    if b % (1 << (j - 1)) != 0 {
        return false;
    }
    let mut acc = 0.0;
    for l in 0..j {
        acc += b as f64 / 2f64.powi(l as i32);
        if acc > (n as f64) / 2f64.powi(l as i32 + 1) {
            return false;
        }
    }
    true
}
