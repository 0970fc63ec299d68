//! Tridiagonal kernels: the Thomas solver used by every implicit step, and
//! Sturm-sequence bisection plus inverse iteration for the lowest eigenpair
//! of a symmetric tridiagonal pencil `T x = lambda W x` with `W` diagonal
//! and positive.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

/// Solves `A x = rhs` in place for a tridiagonal `A` without pivoting.
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (`lower[0]` ignored), `upper[i]`
/// multiplies `x[i+1]` (`upper[n-1]` ignored). `scratch` must have length `n`.
/// Returns `false` on a zero or non-finite pivot.
pub fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) -> bool {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n && scratch.len() == n);
    if n == 0 {
        return true;
    }
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return false;
    }
    scratch[0] = upper[0] / pivot;
    rhs[0] /= pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * scratch[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return false;
        }
        scratch[i] = upper[i] / pivot;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
    true
}

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off.len() == diag.len() - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Lowest eigenpair of a pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalised to unit sup-norm with a positive largest entry.
    pub vector: Vec<f64>,
    pub sweeps: usize,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn weight(weight: Option<&[f64]>, i: usize) -> f64 {
        weight.map_or(1.0, |w| w[i])
    }

    /// Number of eigenvalues of `T x = lambda W x` strictly below `shift`,
    /// i.e. the number of negative pivots of `T - shift W` (Sylvester inertia).
    pub fn count_below(&self, shift: f64, weight: Option<&[f64]>) -> usize {
        let n = self.len();
        if n == 0 {
            return 0;
        }
        let scale = self.scale();
        let guard = f64::EPSILON * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut count = 0;
        let mut q = self.diag[0] - shift * Self::weight(weight, 0);
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let q_safe = if q.abs() < guard {
                if q < 0.0 {
                    -guard
                } else {
                    guard
                }
            } else {
                q
            };
            q = self.diag[i] - shift * Self::weight(weight, i) - self.off[i - 1] * self.off[i - 1] / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn scale(&self) -> f64 {
        let d = self.diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let e = self.off.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        d + 2.0 * e
    }

    /// Bracket `[lo, hi]` for the lowest eigenvalue of the pencil.
    fn lowest_bracket(&self, weight: Option<&[f64]>) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..n {
            let e_left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let e_right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            let w = Self::weight(weight, i);
            lo = lo.min((self.diag[i] - e_left - e_right) / w);
            // Rayleigh quotient of a unit vector
            hi = hi.min(self.diag[i] / w);
        }
        let pad = 1e-12 * (lo.abs() + hi.abs()) + f64::MIN_POSITIVE;
        (lo - pad, hi + pad)
    }

    /// Lowest eigenvalue by Sturm bisection to relative tolerance `rtol`.
    pub fn lowest_eigenvalue(&self, weight: Option<&[f64]>, rtol: f64) -> (f64, f64) {
        let (mut lo, mut hi) = self.lowest_bracket(weight);
        let wmax = weight.map_or(1.0, |w| w.iter().fold(0.0f64, |m, v| m.max(*v)));
        let wmin = weight.map_or(1.0, |w| w.iter().fold(f64::INFINITY, |m, v| m.min(*v)));
        let abs_floor = 4.0 * f64::EPSILON * self.scale() / wmin.min(wmax);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= (rtol * mid.abs()).max(abs_floor) {
                break;
            }
            if self.count_below(mid, weight) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    /// `y = T x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
    }

    /// Lowest eigenpair: Sturm bisection locates the eigenvalue, inverse
    /// iteration shifted just below it recovers the eigenvector, and the
    /// Rayleigh quotient refines the value. Iterates until the relative
    /// change of the quotient is below `rtol`, at most `max_sweeps` times.
    pub fn lowest_eigenpair(
        &self,
        weight: Option<&[f64]>,
        rtol: f64,
        max_sweeps: usize,
    ) -> Result<Eigenpair, (usize, f64)> {
        let n = self.len();
        let (lo, hi) = self.lowest_eigenvalue(weight, rtol.min(1e-12));
        let gap = (hi - lo).max(1e-10 * (lo.abs() + self.scale() * f64::EPSILON));
        let shift = lo - gap;

        let lower: Vec<f64> = core::iter::once(0.0).chain(self.off.iter().copied()).collect();
        let mut upper: Vec<f64> = self.off.clone();
        upper.push(0.0);
        let diag: Vec<f64> = (0..n).map(|i| self.diag[i] - shift * Self::weight(weight, i)).collect();

        let mut v = vec![1.0; n];
        let mut rhs = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        let mut tv = vec![0.0; n];
        let mut previous = f64::NAN;
        let mut rel = f64::INFINITY;
        for sweep in 1..=max_sweeps {
            for i in 0..n {
                rhs[i] = Self::weight(weight, i) * v[i];
            }
            if !thomas_solve(&lower, &diag, &upper, &mut rhs, &mut scratch) {
                return Err((sweep, f64::NAN));
            }
            let norm = rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if !(norm > 0.0) || !norm.is_finite() {
                return Err((sweep, f64::NAN));
            }
            for i in 0..n {
                v[i] = rhs[i] / norm;
            }
            self.mul_vec(&v, &mut tv);
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                num += v[i] * tv[i];
                den += Self::weight(weight, i) * v[i] * v[i];
            }
            let value = num / den;
            let delta = (value - previous).abs();
            rel = delta / value.abs().max(f64::MIN_POSITIVE);
            previous = value;
            if sweep > 1 && (rel <= rtol || delta <= 4.0 * f64::EPSILON * self.scale()) {
                let sign = if v.iter().fold(0.0f64, |s, x| s + x) < 0.0 {
                    -1.0
                } else {
                    1.0
                };
                for x in &mut v {
                    *x *= sign;
                }
                // prefer the Sturm midpoint when the quotient is less accurate
                let value = if value < lo || value > hi {
                    0.5 * (lo + hi)
                } else {
                    value
                };
                return Ok(Eigenpair {
                    value,
                    vector: v,
                    sweeps: sweep,
                });
            }
        }
        Err((max_sweeps, rel))
    }
}
