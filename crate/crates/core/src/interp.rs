//! Interpolation on uniform grids.

/// Four-point Lagrange interpolation of uniformly spaced samples.
///
/// `node(k)` for `k in 0..count` is the sample at `origin + k * spacing`.
/// Near the ends the stencil is shifted inward, so the result stays
/// third-order accurate everywhere. Needs `count >= 4`.
pub fn uniform_cubic<F: Fn(usize) -> f64>(node: F, count: usize, origin: f64, spacing: f64, x: f64) -> f64 {
    debug_assert!(count >= 4);
    let s = (x - origin) / spacing;
    let base = if s < 1.0 {
        0
    } else {
        let k = s as usize;
        (k - 1).min(count - 4)
    };
    let t = s - base as f64;
    let (p0, p1, p2, p3) = (node(base), node(base + 1), node(base + 2), node(base + 3));
    // Lagrange basis on abscissae 0, 1, 2, 3
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    p0 * l0 + p1 * l1 + p2 * l2 + p3 * l3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
        let origin = -1.0;
        let h = 0.1;
        let count = 21;
        for k in 0..=200 {
            let x = origin + 2.0 * k as f64 / 200.0;
            let v = uniform_cubic(|i| f(origin + i as f64 * h), count, origin, h, x);
            assert!((v - f(x)).abs() < 1e-12, "{x}");
        }
    }
}
