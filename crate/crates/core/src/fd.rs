//! Finite-difference weights on arbitrary (non-uniform) stencils.

/// Fornberg's recursion: weights `c[k][j]` such that
/// `f^{(k)}(x0) ~ sum_j c[k][j] f(x[j])` for `k = 0..=order`.
pub fn fornberg_weights(x0: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Start index of a `width`-point stencil centred on node `i` and clamped to `0..n`.
pub fn stencil_start(i: usize, n: usize, width: usize) -> usize {
    let half = width / 2;
    i.saturating_sub(half).min(n.saturating_sub(width))
}

/// `order`-th derivative of sampled data at every node using `width`-point stencils.
pub fn differentiate(x: &[f64], f: &[f64], order: usize, width: usize) -> Vec<f64> {
    let n = x.len();
    let width = width.min(n);
    (0..n)
        .map(|i| {
            let s = stencil_start(i, n, width);
            let w = fornberg_weights(x[i], &x[s..s + width], order);
            w[order].iter().zip(&f[s..s + width]).map(|(c, v)| c * v).sum()
        })
        .collect()
}
