//! Finite-difference weights on arbitrary nodes (Fornberg's recursion) and
//! the one-sided boundary stencils built from them.

use crate::scalar::Real;

/// Weights `w[d][j]` such that `f^(d)(x0) ≈ Σ_j w[d][j] f(xs[j])` for `d = 0..=max_deriv`.
pub fn fornberg_weights<T: Real>(x0: T, xs: &[T], max_deriv: usize) -> Vec<Vec<T>> {
    let n = xs.len();
    let mut w = vec![vec![T::zero(); n]; max_deriv + 1];
    if n == 0 {
        return w;
    }
    w[0][0] = T::one();
    let mut c1 = T::one();
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    let kk = T::from_usize_lossy(k);
                    w[k][i] = c1 * (kk * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                let kk = T::from_usize_lossy(k);
                w[k][j] = (c4 * w[k][j] - kk * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// Forward stencil for the `deriv`-th derivative at node 0 on unit-spaced
/// nodes `0, 1, …`, accurate to `accuracy` order. Uses `deriv + accuracy` points.
pub fn forward_weights<T: Real>(deriv: usize, accuracy: usize) -> Vec<T> {
    let npts = deriv + accuracy;
    let xs: Vec<T> = (0..npts).map(T::from_usize_lossy).collect();
    fornberg_weights(T::zero(), &xs, deriv).swap_remove(deriv)
}

/// Centered stencil for the `deriv`-th derivative on unit-spaced nodes
/// `−p..=p`, accurate to `accuracy` (even) order. Weight `k` belongs to offset `k − p`.
pub fn centered_weights<T: Real>(deriv: usize, accuracy: usize) -> Vec<T> {
    let p = (deriv + accuracy - 1) / 2;
    let xs: Vec<T> = (0..=2 * p).map(|k| T::from_usize_lossy(k) - T::from_usize_lossy(p)).collect();
    fornberg_weights(T::zero(), &xs, deriv).swap_remove(deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn central_second_derivative() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!(close(&w[1], &[-0.5, 0.0, 0.5]));
        assert!(close(&w[2], &[1.0, -2.0, 1.0]));
    }

    #[test]
    fn classic_one_sided_stencils() {
        assert!(close(&forward_weights::<f64>(1, 2), &[-1.5, 2.0, -0.5]));
        assert!(close(&forward_weights::<f64>(2, 2), &[2.0, -5.0, 4.0, -1.0]));
        assert!(close(
            &forward_weights::<f64>(1, 4),
            &[-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25]
        ));
        assert!(close(
            &forward_weights::<f64>(3, 2),
            &[-2.5, 9.0, -12.0, 7.0, -1.5]
        ));
    }

    #[test]
    fn forward_weights_reproduce_polynomials() {
        // a stencil of accuracy p for derivative d is exact on polynomials of degree < d + p
        for (d, p) in [(1, 4), (2, 4), (3, 2), (3, 4)] {
            let w: Vec<f64> = forward_weights(d, p);
            for deg in 0..(d + p) {
                let approx: f64 = w
                    .iter()
                    .enumerate()
                    .map(|(j, wj)| wj * (j as f64).powi(deg as i32))
                    .sum();
                let exact = if deg == d {
                    (1..=d).product::<usize>() as f64
                } else {
                    0.0
                };
                assert!((approx - exact).abs() < 1e-9, "d={d} p={p} deg={deg}");
            }
        }
    }

    #[test]
    fn centered_stencils() {
        assert!(close(&centered_weights::<f64>(1, 4), &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0]));
        assert!(close(&centered_weights::<f64>(2, 2), &[1.0, -2.0, 1.0]));
        assert!(close(&centered_weights::<f64>(3, 2), &[-0.5, 1.0, 0.0, -1.0, 0.5]));
        assert!(close(
            &centered_weights::<f64>(3, 4),
            &[0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125]
        ));
    }
}
