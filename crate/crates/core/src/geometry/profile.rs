use crate::error::{HmcfError, Result};

/// Minimum number of differentiated (non-tip) nodes.
pub const MIN_INTERIOR_NODES: usize = 5;

/// Relative spacing deviation tolerated by [`derivatives`].
const UNIFORM_TOL: f64 = 1e-8;

/// Sampled generating curve `r = f(x)` of a surface of revolution about the
/// x-axis.
///
/// Endpoint nodes with `f == 0` are the tips of the surface. Everything
/// between them is the interior chart, sampled at uniform spacing when the
/// grid comes out of the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileGrid {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// Flow time of this snapshot.
    pub t: f64,
    /// Abscissa of the star-shape center `(x0, 0, 0)`.
    pub center: f64,
}

impl ProfileGrid {
    /// Builds a grid, checking only that the samples are finite, non-negative
    /// and strictly increasing in `x`.
    pub fn new(x: Vec<f64>, f: Vec<f64>, t: f64, center: f64) -> Result<Self> {
        if x.len() != f.len() {
            return Err(HmcfError::InvalidGrid(format!(
                "{} abscissas but {} values",
                x.len(),
                f.len()
            )));
        }
        if x.len() < 2 {
            return Err(HmcfError::InvalidGrid("fewer than two nodes".into()));
        }
        for (i, w) in x.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(HmcfError::InvalidGrid(format!(
                    "abscissas not strictly increasing at node {}",
                    i + 1
                )));
            }
        }
        if let Some((i, v)) = x
            .iter()
            .chain(f.iter())
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(HmcfError::InvalidGrid(format!("non-finite value {v} at entry {i}")));
        }
        if let Some(i) = f.iter().position(|&v| v < 0.0) {
            return Err(HmcfError::DegenerateProfile { x: x[i], value: f[i] });
        }
        Ok(ProfileGrid { x, f, t: 0.0, center }.at_time(t))
    }

    /// Uniform samples of `profile` on `[a, b]` with `n` nodes; the endpoint
    /// values are pinned to zero.
    pub fn from_fn(a: f64, b: f64, n: usize, center: f64, profile: impl Fn(f64) -> f64) -> Self {
        assert!(n >= 2 && b > a);
        let h = (b - a) / (n - 1) as f64;
        let x: Vec<f64> = (0..n)
            .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
            .collect();
        let mut f: Vec<f64> = x.iter().map(|&xi| profile(xi).max(0.0)).collect();
        f[0] = 0.0;
        f[n - 1] = 0.0;
        ProfileGrid { x, f, t: 0.0, center }
    }

    fn at_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Left tip abscissa (first node).
    pub fn a(&self) -> f64 {
        self.x[0]
    }

    /// Right tip abscissa (last node).
    pub fn b(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn has_left_tip(&self) -> bool {
        self.f[0] == 0.0
    }

    pub fn has_right_tip(&self) -> bool {
        self.f[self.f.len() - 1] == 0.0
    }

    /// Index range of the non-tip nodes.
    pub fn interior_range(&self) -> std::ops::Range<usize> {
        let start = usize::from(self.has_left_tip());
        let end = self.len() - usize::from(self.has_right_tip());
        start..end.max(start)
    }

    pub fn max_f(&self) -> f64 {
        self.f.iter().copied().fold(0.0, f64::max)
    }

    /// Checks the closed-profile invariants: zero tips, positive interior.
    pub fn check_closed(&self) -> Result<()> {
        if !self.has_left_tip() || !self.has_right_tip() {
            return Err(HmcfError::InvalidGrid("profile is not closed by tip nodes".into()));
        }
        for i in self.interior_range() {
            if self.f[i] <= 0.0 {
                return Err(HmcfError::DegenerateProfile { x: self.x[i], value: self.f[i] });
            }
        }
        Ok(())
    }

    /// Mirror image under `x -> a + b - x`; the center is mirrored too.
    pub fn reflect(&self) -> ProfileGrid {
        let s = self.a() + self.b();
        ProfileGrid {
            x: self.x.iter().rev().map(|&x| s - x).collect(),
            f: self.f.iter().rev().copied().collect(),
            t: self.t,
            center: s - self.center,
        }
    }

    pub fn translate(&self, dx: f64) -> ProfileGrid {
        ProfileGrid {
            x: self.x.iter().map(|&x| x + dx).collect(),
            f: self.f.clone(),
            t: self.t,
            center: self.center + dx,
        }
    }
}

/// First and second x-derivatives at the non-tip nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    /// Index of the first differentiated node in the grid.
    pub offset: usize,
    pub h: f64,
    pub fx: Vec<f64>,
    pub fxx: Vec<f64>,
}

/// Second-order finite differences on uniformly spaced samples: centered in
/// the interior, one-sided at both ends.
pub fn uniform_derivatives(v: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = v.len();
    debug_assert!(n >= 4);
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    let inv2h = 0.5 / h;
    let invh2 = 1.0 / (h * h);
    for i in 1..n - 1 {
        d1[i] = (v[i + 1] - v[i - 1]) * inv2h;
        d2[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * invh2;
    }
    d1[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2h;
    d2[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) * invh2;
    let l = n - 1;
    d1[l] = (3.0 * v[l] - 4.0 * v[l - 1] + v[l - 2]) * inv2h;
    d2[l] = (2.0 * v[l] - 5.0 * v[l - 1] + 4.0 * v[l - 2] - v[l - 3]) * invh2;
    (d1, d2)
}

/// Finite-difference `(f_x, f_xx)` at the non-tip nodes; tip nodes belong to
/// the tip charts and are excluded.
pub fn derivatives(grid: &ProfileGrid) -> Result<Derivatives> {
    let range = grid.interior_range();
    let count = range.len();
    if count < MIN_INTERIOR_NODES {
        return Err(HmcfError::GridTooCoarse { interior: count, required: MIN_INTERIOR_NODES });
    }
    let xs = &grid.x[range.clone()];
    let h = (xs[count - 1] - xs[0]) / (count - 1) as f64;
    for (i, w) in xs.windows(2).enumerate() {
        let deviation = ((w[1] - w[0]) - h).abs() / h;
        if deviation > UNIFORM_TOL {
            return Err(HmcfError::NonUniformGrid { index: range.start + i + 1, deviation });
        }
    }
    let (fx, fxx) = uniform_derivatives(&grid.f[range.clone()], h);
    Ok(Derivatives { offset: range.start, h, fx, fxx })
}

/// Curvature data of a point of a revolution graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCurvature {
    /// Curvature of the parallel circle.
    pub lambda1: f64,
    /// Curvature of the meridian.
    pub lambda2: f64,
    pub h: f64,
    pub g: f64,
    /// `-f f_xx + f_x^2 + 1`, the numerator of `H`.
    pub h_tilde: f64,
}

/// Principal curvatures of the graph `r = f(x)` at one point.
pub fn curvatures_at(f: f64, fx: f64, fxx: f64) -> PointCurvature {
    let q = 1.0 + fx * fx;
    let sq = q.sqrt();
    let lambda1 = 1.0 / (f * sq);
    let lambda2 = -fxx / (q * sq);
    PointCurvature {
        lambda1,
        lambda2,
        h: lambda1 + lambda2,
        g: lambda1 * lambda2,
        h_tilde: -f * fxx + fx * fx + 1.0,
    }
}

/// `<F - c, nu>` for the outer normal of a revolution graph, with the center
/// on the axis at `center`.
pub fn support_at(x: f64, f: f64, fx: f64, center: f64) -> f64 {
    (-(x - center) * fx + f) / (1.0 + fx * fx).sqrt()
}

/// Per-node curvature data on the non-tip nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub fx: Vec<f64>,
    pub fxx: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    pub h_tilde: Vec<f64>,
    /// Harmonic mean curvature `G/H`.
    pub speed: Vec<f64>,
}

impl CurvatureField {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Principal curvatures at every non-tip node.
pub fn principal_curvatures(grid: &ProfileGrid) -> Result<CurvatureField> {
    let d = derivatives(grid)?;
    let n = d.fx.len();
    let mut field = CurvatureField {
        x: grid.x[d.offset..d.offset + n].to_vec(),
        f: grid.f[d.offset..d.offset + n].to_vec(),
        fx: d.fx,
        fxx: d.fxx,
        lambda1: Vec::with_capacity(n),
        lambda2: Vec::with_capacity(n),
        h: Vec::with_capacity(n),
        g: Vec::with_capacity(n),
        h_tilde: Vec::with_capacity(n),
        speed: Vec::with_capacity(n),
    };
    for i in 0..n {
        let (x, f) = (field.x[i], field.f[i]);
        if f <= 0.0 {
            return Err(HmcfError::DegenerateProfile { x, value: f });
        }
        let c = curvatures_at(f, field.fx[i], field.fxx[i]);
        if c.h_tilde <= 0.0 {
            return Err(HmcfError::MeanConvexityLost { x, value: c.h_tilde });
        }
        debug_assert!({
            let alt = c.h_tilde / (f * (1.0 + field.fx[i].powi(2)).powf(1.5));
            (alt - c.h).abs() <= 1e-10 * c.h.abs().max(1.0)
        });
        field.lambda1.push(c.lambda1);
        field.lambda2.push(c.lambda2);
        field.h.push(c.h);
        field.g.push(c.g);
        field.h_tilde.push(c.h_tilde);
        field.speed.push(c.g / c.h);
    }
    Ok(field)
}

/// `<F - c, nu>` at every non-tip node.
pub fn support_inner(grid: &ProfileGrid) -> Result<Vec<f64>> {
    let d = derivatives(grid)?;
    Ok(d.fx
        .iter()
        .enumerate()
        .map(|(k, &fx)| {
            let i = d.offset + k;
            support_at(grid.x[i], grid.f[i], fx, grid.center)
        })
        .collect())
}
