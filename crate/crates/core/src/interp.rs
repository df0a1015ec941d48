//! Local polynomial interpolation on sorted abscissas.
//!
//! Resampling between charts uses sliding-window Lagrange interpolation.
//! With six points the resampled values carry O(h^6) errors, so finite
//! differences of resampled data stay accurate to O(h^4).

/// Number of points in the default interpolation stencil.
pub const STENCIL: usize = 6;

/// Evaluates the Lagrange polynomial through `(xs[k], ys[k])` at `x`.
pub fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mut acc = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis *= (x - xj) / (xi - xj);
            }
        }
        acc += basis * yi;
    }
    acc
}

/// Index of the first point of a `width`-point window around `x` in the
/// sorted slice `xs`, shifted inward at the ends.
fn window_start(xs: &[f64], x: f64, width: usize) -> usize {
    let n = xs.len();
    if n <= width {
        return 0;
    }
    // first index with xs[i] > x
    let upper = xs.partition_point(|&v| v <= x);
    let start = upper.saturating_sub(width / 2);
    start.min(n - width)
}

/// Sliding-window interpolation of sorted data `(xs, ys)` at `x` using
/// `width` neighbouring points (fewer if the data is shorter).
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64, width: usize) -> f64 {
    let width = width.min(xs.len()).max(1);
    let s = window_start(xs, x, width);
    lagrange(&xs[s..s + width], &ys[s..s + width], x)
}

/// Sorted-data interpolant with a fixed stencil width.
#[derive(Debug, Clone)]
pub struct Interpolant {
    xs: Vec<f64>,
    ys: Vec<f64>,
    width: usize,
}

impl Interpolant {
    /// `xs` must be strictly increasing.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, width: usize) -> Self {
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        Interpolant { xs, ys, width }
    }

    pub fn eval(&self, x: f64) -> f64 {
        interpolate(&self.xs, &self.ys, x, self.width)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }
}

/// Finds a root of `func` in `[lo, hi]` by bisection, assuming a sign
/// change. Returns `None` when the endpoints have the same strict sign.
pub fn bisect<F: Fn(f64) -> f64>(func: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = func(lo);
    let fhi = func(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = func(mid);
        if fm == 0.0 || (hi - lo) < tol {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_quintic_exactly() {
        let xs: Vec<f64> = (0..12).map(|i| 0.1 * i as f64 + 0.01 * (i * i) as f64).collect();
        let poly = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.25 * x.powi(5);
        let ys: Vec<f64> = xs.iter().map(|&x| poly(x)).collect();
        for k in 0..50 {
            let x = 0.02 * k as f64;
            assert!((interpolate(&xs, &ys, x, STENCIL) - poly(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn sixth_order_convergence_on_sine() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let xs: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
            let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
            (0..n)
                .map(|i| {
                    let x = (i as f64 + 0.37) * h;
                    (interpolate(&xs, &ys, x, STENCIL) - x.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let rate = (err(20) / err(40)).log2();
        assert!(rate > 5.5, "observed order {rate}");
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-12).is_none());
    }
}
