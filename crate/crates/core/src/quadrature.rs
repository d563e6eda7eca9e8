//! Gauss-Legendre rules and the polar grid used for acceptance-window
//! integrals over the dual-homodyne outcome β.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0, "empty quadrature rule");
    let mut rule = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    rule
}

/// Rule mapped onto [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Polar quadrature grid over a disc in the complex plane: Gauss-Legendre in
/// the radius, uniform (trapezoidal) in the angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    pub radius: f64,
    pub n_radial: usize,
    pub n_angular: usize,
}

impl PolarGrid {
    pub const DEFAULT_RADIAL: usize = 60;
    pub const DEFAULT_ANGULAR: usize = 48;
    /// Window radius in units of σ.
    pub const RADIUS_IN_SIGMA: f64 = 5.0;

    /// Default grid for a Gaussian acceptance window of width σ.
    pub fn for_window(sigma: f64) -> Self {
        Self {
            radius: Self::RADIUS_IN_SIGMA * sigma,
            n_radial: Self::DEFAULT_RADIAL,
            n_angular: Self::DEFAULT_ANGULAR,
        }
    }

    /// Largest gap between consecutive radial nodes (including the origin).
    pub fn max_radial_spacing(&self) -> f64 {
        let nodes = gauss_legendre_on(self.n_radial, 0.0, self.radius);
        let mut prev = 0.0;
        let mut gap: f64 = 0.0;
        for (r, _) in nodes {
            gap = gap.max(r - prev);
            prev = r;
        }
        gap.max(self.radius - prev)
    }

    /// Points (Re β, Im β, weight) with the area element r dr dθ folded in.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let radial = gauss_legendre_on(self.n_radial, 0.0, self.radius);
        let dtheta = 2.0 * PI / self.n_angular as f64;
        let mut out = Vec::with_capacity(self.n_radial * self.n_angular);
        for &(r, w) in &radial {
            for j in 0..self.n_angular {
                let th = j as f64 * dtheta;
                out.push((r * th.cos(), r * th.sin(), w * r * dtheta));
            }
        }
        out
    }
}
