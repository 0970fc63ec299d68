//! Embedded Dormand-Prince 5(4) Runge-Kutta steps with adaptive step control.

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// differences between the 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Tolerances for [`Dopri5`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

/// Adaptive Dormand-Prince integrator for an autonomous system in `N` unknowns.
pub struct Dopri5<F, const N: usize> {
    rhs: F,
    tol: Tolerances,
    pub h_min: f64,
    pub h_max: f64,
}

/// Result of one trial step.
#[derive(Debug, Clone, Copy)]
pub struct Trial<const N: usize> {
    pub y: [f64; N],
    /// Scaled error; the step is acceptable when `error <= 1`.
    pub error: f64,
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: FnMut(&[f64; N]) -> [f64; N],
{
    pub fn new(rhs: F, tol: Tolerances) -> Self {
        Dopri5 {
            rhs,
            tol,
            h_min: 1e-14,
            h_max: f64::INFINITY,
        }
    }

    /// One step of signed size `h` from `y`.
    pub fn trial(&mut self, y: &[f64; N], h: f64) -> Trial<N> {
        let k1 = (self.rhs)(y);
        let k2 = (self.rhs)(&axpy(y, &[(h * A21, &k1)]));
        let k3 = (self.rhs)(&axpy(y, &[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = (self.rhs)(&axpy(y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = (self.rhs)(&axpy(
            y,
            &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)],
        ));
        let k6 = (self.rhs)(&axpy(
            y,
            &[
                (h * A61, &k1),
                (h * A62, &k2),
                (h * A63, &k3),
                (h * A64, &k4),
                (h * A65, &k5),
            ],
        ));
        let y_new = axpy(
            y,
            &[
                (h * B1, &k1),
                (h * B3, &k3),
                (h * B4, &k4),
                (h * B5, &k5),
                (h * B6, &k6),
            ],
        );
        let k7 = (self.rhs)(&y_new);
        let mut error = 0.0f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.tol.atol + self.tol.rtol * y[i].abs().max(y_new[i].abs());
            error = error.max((e / scale).abs());
        }
        Trial { y: y_new, error }
    }

    /// Takes one accepted adaptive step starting with the signed trial size
    /// `h`. Returns `(y_new, h_used, h_next)`, or `None` when the step size
    /// underflows `h_min` or the state turns non-finite.
    pub fn adaptive_step(&mut self, y: &[f64; N], mut h: f64) -> Option<([f64; N], f64, f64)> {
        loop {
            if h.abs() < self.h_min {
                return None;
            }
            let trial = self.trial(y, h);
            if !trial.error.is_finite() || trial.y.iter().any(|v| !v.is_finite()) {
                h *= 0.25;
                continue;
            }
            if trial.error <= 1.0 {
                let factor = if trial.error == 0.0 {
                    5.0
                } else {
                    (0.9 * trial.error.powf(-0.2)).clamp(0.2, 5.0)
                };
                let next = (h * factor).abs().min(self.h_max) * h.signum();
                return Some((trial.y, h, next));
            }
            h *= (0.9 * trial.error.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let mut solver = Dopri5::new(
            |y: &[f64; 2]| [y[1], -y[0]],
            Tolerances {
                rtol: 1e-11,
                atol: 1e-13,
            },
        );
        let mut y = [1.0, 0.0];
        let mut t = 0.0;
        let mut h = 0.1;
        let period = 2.0 * core::f64::consts::PI;
        while t < period {
            let h_try = h.min(period - t);
            let (next, used, h_next) = solver.adaptive_step(&y, h_try).unwrap();
            y = next;
            t += used;
            h = h_next;
        }
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9, "{y:?}");
    }

    #[test]
    fn fifth_order_convergence() {
        // y' = y: error ratio for halved h should be close to 2^5
        let mut solver = Dopri5::new(|y: &[f64; 1]| [y[0]], Tolerances { rtol: 1.0, atol: 1.0 });
        let err = |s: &mut Dopri5<_, 1>, h: f64| {
            let mut y = [1.0];
            let steps = (1.0 / h).round() as usize;
            for _ in 0..steps {
                y = s.trial(&y, h).y;
            }
            (y[0] - core::f64::consts::E).abs()
        };
        let e1 = err(&mut solver, 0.1);
        let e2 = err(&mut solver, 0.05);
        let order = (e1 / e2).log2();
        assert!((order - 5.0).abs() < 0.3, "{order}");
    }
}
