//! Finite-difference weights on arbitrary stencils and fourth-order
//! derivative estimates on uniform samples.

/// Weights `w[k][j]` of the `k`-th derivative at `z` from values at `xs[j]`,
/// for `k = 0..=m` (Fornberg's recursion).
pub fn fornberg(z: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
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
            c[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

const WIDTH: usize = 5;

/// `(v', v'')` on uniform samples from five-point stencils, centered where
/// possible and shifted inward at the ends.
pub fn derivatives4(v: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = v.len();
    assert!(n >= WIDTH, "need at least {WIDTH} samples");
    let nodes: Vec<f64> = (0..WIDTH).map(|k| k as f64).collect();
    let weights: Vec<Vec<Vec<f64>>> = (0..WIDTH).map(|p| fornberg(p as f64, &nodes, 2)).collect();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let start = i.saturating_sub(WIDTH / 2).min(n - WIDTH);
        let w = &weights[i - start];
        let window = &v[start..start + WIDTH];
        d1[i] = w[1].iter().zip(window).map(|(a, b)| a * b).sum::<f64>() / h;
        d2[i] = w[2].iter().zip(window).map(|(a, b)| a * b).sum::<f64>() / (h * h);
    }
    (d1, d2)
}

/// Like [`derivatives4`] for a function even about the first sample.
pub fn derivatives4_even(v: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let ghosts = WIDTH / 2;
    let mut ext = Vec::with_capacity(v.len() + ghosts);
    ext.extend(v[1..=ghosts].iter().rev());
    ext.extend_from_slice(v);
    let (mut d1, mut d2) = derivatives4(&ext, h);
    d1.drain(..ghosts);
    d2.drain(..ghosts);
    d1[0] = 0.0;
    (d1, d2)
}
