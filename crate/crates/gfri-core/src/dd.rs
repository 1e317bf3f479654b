//! Double-double arithmetic kernels for ill-conditioned Prony solves.
//!
//! Clustered spectral supports drive the Vandermonde conditioning of the
//! minimal 2K-sample problem past what f64 eigen-solvers can resolve, even
//! though the data itself is exact. A ~31-digit working precision restores
//! the lost headroom: errors of order `kappa * 1e-31` stay far below the
//! reconstruction tolerance. Only small dense solves and grid evaluations
//! are needed, so a compact Dekker-style two-float implementation suffices.

use crate::graph::C64;

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// 2*pi to double-double accuracy.
    pub const TWO_PI: Dd = Dd {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };
    /// pi/2 to double-double accuracy.
    pub const FRAC_PI_2: Dd = Dd {
        hi: 1.5707963267948966,
        lo: 6.123233995736766e-17,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    /// One dd Newton step on the f64 square root.
    pub fn sqrt(self) -> Dd {
        let y = self.hi.sqrt();
        if y == 0.0 {
            return Dd::ZERO;
        }
        let yd = Dd::from_f64(y);
        let corr = self.sub(yd.mul(yd)).div(yd.mul(Dd::from_f64(2.0)));
        yd.add(corr)
    }
}

/// `(cos, sin)` of `2 pi num / den` with `0 <= num < den`.
///
/// The angle is folded by quadrants of `pi/2` and both series are summed in
/// double-double, so the result is accurate to ~1e-32 absolute.
pub(crate) fn sincos_frac(num: u64, den: u64) -> (Dd, Dd) {
    debug_assert!(num < den);
    let theta = Dd::from_f64(num as f64)
        .div(Dd::from_f64(den as f64))
        .mul(Dd::TWO_PI);
    let quadrant = (theta.hi / Dd::FRAC_PI_2.hi).floor();
    let x = theta.sub(Dd::FRAC_PI_2.mul(Dd::from_f64(quadrant)));
    // Taylor series on |x| <= pi/2 (+rounding slack); terms below 1e-35
    // after ~20 iterations.
    let x2 = x.mul(x);
    let mut cos = Dd::ONE;
    let mut sin = x;
    let mut cos_term = Dd::ONE;
    let mut sin_term = x;
    for i in 1..24u64 {
        cos_term = cos_term
            .mul(x2)
            .div(Dd::from_f64(((2 * i - 1) * (2 * i)) as f64))
            .neg();
        cos = cos.add(cos_term);
        sin_term = sin_term
            .mul(x2)
            .div(Dd::from_f64(((2 * i) * (2 * i + 1)) as f64))
            .neg();
        sin = sin.add(sin_term);
    }
    match (quadrant as i64).rem_euclid(4) {
        0 => (cos, sin),
        1 => (sin.neg(), cos),
        2 => (cos.neg(), sin.neg()),
        _ => (sin, cos.neg()),
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn from_c64(z: C64) -> Cdd {
        Cdd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    #[inline]
    pub fn to_c64(self) -> C64 {
        C64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }

    #[inline]
    pub fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    #[inline]
    pub fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    #[inline]
    pub fn neg(self) -> Cdd {
        Cdd {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    #[inline]
    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    #[inline]
    pub fn div(self, o: Cdd) -> Cdd {
        let denom = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(Cdd {
            re: o.re,
            im: o.im.neg(),
        });
        Cdd {
            re: num.re.div(denom),
            im: num.im.div(denom),
        }
    }

    #[inline]
    pub fn scale(self, s: Dd) -> Cdd {
        Cdd {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    /// `|z|^2` rounded to f64; enough resolution for pivoting and ranking.
    #[inline]
    pub fn abs_sq(self) -> f64 {
        let n = self.re.mul(self.re).add(self.im.mul(self.im));
        n.hi + n.lo
    }
}

/// Solves the dense square system `A x = b` by Gaussian elimination with
/// partial pivoting, everything in complex double-double. Returns `None`
/// when a pivot falls below `1e-28` of the largest entry, i.e. when the
/// system is singular beyond even this working precision.
pub(crate) fn solve_dense(mut a: Vec<Vec<Cdd>>, mut b: Vec<Cdd>) -> Option<Vec<Cdd>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|z| z.abs_sq()))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs_sq()
                    .partial_cmp(&a[j][col].abs_sq())
                    .unwrap()
            })
            .unwrap();
        if a[pivot_row][col].abs_sq() < 1e-56 * scale {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col].div(a[col][col]);
            for k in col..n {
                let t = factor.mul(a[col][k]);
                a[row][k] = a[row][k].sub(t);
            }
            let t = factor.mul(b[col]);
            b[row] = b[row].sub(t);
        }
    }
    let mut x = vec![Cdd::ZERO; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc = acc.sub(a[col][k].mul(x[k]));
        }
        x[col] = acc.div(a[col][col]);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_arithmetic_keeps_extra_digits() {
        // (1 + 2^-60) - 1 vanishes in f64 but survives in dd.
        let tiny = 2f64.powi(-60);
        let x = Dd::ONE.add(Dd::from_f64(tiny));
        let d = x.sub(Dd::ONE);
        assert_eq!(d.hi, tiny);
        // Division round trip.
        let a = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        let r = a.mul(Dd::from_f64(3.0)).sub(Dd::ONE);
        assert!(r.hi.abs() < 1e-31);
    }

    #[test]
    fn sincos_matches_f64_and_refines_it() {
        for den in [8u64, 12, 128, 360] {
            for num in 0..den {
                let (c, s) = sincos_frac(num, den);
                let theta = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
                assert!((c.hi - theta.cos()).abs() < 1e-15, "cos {num}/{den}");
                assert!((s.hi - theta.sin()).abs() < 1e-15, "sin {num}/{den}");
                // Pythagoras to dd accuracy.
                let p = c.mul(c).add(s.mul(s)).sub(Dd::ONE);
                assert!((p.hi + p.lo).abs() < 1e-30, "unit {num}/{den}");
            }
        }
        // Exact values at the quadrant boundaries.
        let (c, s) = sincos_frac(1, 4);
        assert!(c.hi.abs() < 1e-32 && (s.hi - 1.0).abs() < 1e-32);
        let (c, s) = sincos_frac(1, 2);
        assert!((c.hi + 1.0).abs() < 1e-32 && s.hi.abs() < 1e-32);
    }

    #[test]
    fn sincos_angle_addition_oracle() {
        // cos(a+b), sin(a+b) from the addition formulas must match the
        // directly computed values to dd accuracy.
        let den = 96u64;
        for (na, nb) in [(5u64, 17u64), (31, 40), (1, 94)] {
            let (ca, sa) = sincos_frac(na, den);
            let (cb, sb) = sincos_frac(nb, den);
            let (c_sum, s_sum) = sincos_frac((na + nb) % den, den);
            let c_ref = ca.mul(cb).sub(sa.mul(sb));
            let s_ref = sa.mul(cb).add(ca.mul(sb));
            assert!(c_sum.sub(c_ref).hi.abs() < 1e-30);
            assert!(s_sum.sub(s_ref).hi.abs() < 1e-30);
        }
    }

    #[test]
    fn solver_beats_f64_on_hilbert() {
        // Hilbert 10x10 (kappa ~ 1e13): dd recovers the known solution of
        // H x = b with b = H * ones to ~1e-18, far beyond f64.
        let n = 10;
        let a: Vec<Vec<Cdd>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Cdd {
                        re: Dd::ONE.div(Dd::from_f64((i + j + 1) as f64)),
                        im: Dd::ZERO,
                    })
                    .collect()
            })
            .collect();
        let b: Vec<Cdd> = (0..n)
            .map(|i| {
                let mut acc = Cdd::ZERO;
                for j in 0..n {
                    acc = acc.add(a[i][j]);
                }
                acc
            })
            .collect();
        let x = solve_dense(a, b).unwrap();
        for xi in x {
            assert!((xi.re.hi - 1.0).abs() < 1e-15 && xi.im.hi.abs() < 1e-15);
        }
    }

    #[test]
    fn solver_reports_singularity() {
        let row = vec![
            Cdd::from_c64(C64::new(1.0, 0.0)),
            Cdd::from_c64(C64::new(2.0, 0.0)),
        ];
        let a = vec![row.clone(), row];
        let b = vec![Cdd::from_c64(C64::new(1.0, 0.0)); 2];
        assert!(solve_dense(a, b).is_none());
    }

    #[test]
    fn sqrt_refines() {
        let s = Dd::from_f64(2.0).sqrt();
        let r = s.mul(s).sub(Dd::from_f64(2.0));
        assert!((r.hi + r.lo).abs() < 1e-31);
    }
}
