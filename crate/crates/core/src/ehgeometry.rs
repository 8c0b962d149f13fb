//! Eguchi–Hanson potential on C²/±1, its metric and curvature, and the
//! glued potential family interpolating to the flat metric.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EhError {
    #[error("singular point z = 0")]
    SingularPoint,
    #[error("grid too coarse: Richardson estimates differ by {0:e}")]
    GridTooCoarse(f64),
    #[error("no positive epsilon found on grid")]
    NoPositiveEpsilon,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Representative of a ±1 orbit in C² \ {0}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConePoint {
    pub z: [C64; 2],
}

impl ConePoint {
    pub fn new(z1: C64, z2: C64) -> Result<Self, EhError> {
        if z1.norm_sqr() + z2.norm_sqr() == 0.0 {
            return Err(EhError::SingularPoint);
        }
        Ok(ConePoint { z: [z1, z2] })
    }

    pub fn radial(r: f64) -> Self {
        ConePoint { z: [C64::new(r, 0.0), C64::new(0.0, 0.0)] }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z[0].norm_sqr() + self.z[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, t: f64) -> Self {
        ConePoint { z: [self.z[0] * t, self.z[1] * t] }
    }

    fn from_real(x: &[f64; 4]) -> Self {
        ConePoint { z: [C64::new(x[0], x[1]), C64::new(x[2], x[3])] }
    }

    fn to_real(self) -> [f64; 4] {
        [self.z[0].re, self.z[0].im, self.z[1].re, self.z[1].im]
    }
}

/// `m[a][b] = g_{a b̄}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HermitianForm2(pub [[C64; 2]; 2]);

impl HermitianForm2 {
    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        HermitianForm2([[o, z], [z, o]])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re
    }

    pub fn trace(&self) -> f64 {
        (self.0[0][0] + self.0[1][1]).re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.0;
        (0..2).all(|a| (0..2).all(|b| (m[a][b] - m[b][a].conj()).norm() <= tol))
    }

    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.trace();
        let disc = ((tr * tr - 4.0 * self.det()).max(0.0)).sqrt();
        ((tr - disc) / 2.0, (tr + disc) / 2.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                d = d.max((self.0[a][b] - other.0[a][b]).norm());
            }
        }
        d
    }

    fn inverse(&self) -> [[C64; 2]; 2] {
        let m = &self.0;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
    }

    /// Roots of `det(self − λ·base) = 0`, increasing.
    pub fn relative_eigenvalues(&self, base: &Self) -> (f64, f64) {
        let (a, b) = (&self.0, &base.0);
        let qa = base.det();
        let qb = -(a[0][0] * b[1][1] + a[1][1] * b[0][0] - a[0][1] * b[1][0] - a[1][0] * b[0][1]).re;
        let qc = self.det();
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        ((-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa))
    }
}

fn radius_term(s: f64, eps: f64) -> f64 {
    s.hypot(eps)
}

/// `F_ε(z) = √(s²+ε²) + ε log(s/(√(s²+ε²)+ε))` with `s = ∥z∥²`.
pub fn eh_potential(z: &ConePoint, eps: f64) -> f64 {
    let s = z.norm_sqr();
    if eps == 0.0 {
        return s;
    }
    let r = radius_term(s, eps);
    r + eps * (s / (r + eps)).ln()
}

/// Closed-form `i∂∂̄F_ε`: `F'(s) δ_ab + F''(s) z̄_a z_b` with `F' = R/s`,
/// `F'' = −ε²/(R s²)`.
pub fn eh_metric(z: &ConePoint, eps: f64) -> Result<HermitianForm2, EhError> {
    let s = z.norm_sqr();
    if s == 0.0 {
        return Err(EhError::SingularPoint);
    }
    let r = radius_term(s, eps);
    let f1 = r / s;
    let f2 = -eps * eps / (r * s * s);
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            m[a][b] = z.z[a].conj() * z.z[b] * f2;
        }
        m[a][a] += f1;
    }
    Ok(HermitianForm2(m))
}

/// `E(z, ε) = F_ε(z) − ∥z∥²`, evaluated without cancellation.
pub fn error_term(z: &ConePoint, eps: f64) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    let s = z.norm_sqr();
    let r = radius_term(s, eps);
    eps * eps / (r + s) + eps * (s / (r + eps)).ln()
}

/// The split `E(·,1) = E₁ + E₂`.
pub fn error_split(z: &ConePoint) -> (f64, f64) {
    let s = z.norm_sqr();
    let r = radius_term(s, 1.0);
    (1.0 / (r + s), (s / (r + 1.0)).ln())
}

/// Cutoff profiles: 1 on `t ≤ 1`, 0 on `t ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cutoff {
    /// Degree-7 smoothstep on [1, 2], C³ at the junctions.
    Smoothstep7,
    /// The standard C^∞ transition built from `exp(−1/x)`.
    Smooth,
}

impl Cutoff {
    pub fn rho(self, t: f64) -> f64 {
        if t <= 1.0 {
            return 1.0;
        }
        if t >= 2.0 {
            return 0.0;
        }
        let x = t - 1.0;
        match self {
            Cutoff::Smoothstep7 => {
                let x4 = x * x * x * x;
                1.0 - x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
            }
            Cutoff::Smooth => {
                let f = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
                let a = f(1.0 - x);
                a / (a + f(x))
            }
        }
    }

    pub fn rho_delta(self, t: f64, delta: f64) -> f64 {
        self.rho(t / delta)
    }
}

/// `φ_{ε,δ}(z) = ∥z∥² + ρ_δ(∥z∥) E(z, ε)`.
pub fn glued_potential(z: &ConePoint, eps: f64, delta: f64, cutoff: Cutoff) -> f64 {
    let rho = cutoff.rho_delta(z.norm(), delta);
    let e = if rho == 0.0 { 0.0 } else { error_term(z, eps) };
    z.norm_sqr() + rho * e
}

/// Central-difference complex Hessian `∂_a ∂_b̄ f` with real step `h`.
pub fn complex_hessian(f: impl Fn(&ConePoint) -> f64, z: &ConePoint, h: f64) -> HermitianForm2 {
    let x0 = z.to_real();
    let eval = |d: &[(usize, f64)]| {
        let mut x = x0;
        for &(i, t) in d {
            x[i] += t;
        }
        f(&ConePoint::from_real(&x))
    };
    let f0 = eval(&[]);
    // real Hessian
    let mut hr = [[0.0f64; 4]; 4];
    for i in 0..4 {
        hr[i][i] = (eval(&[(i, h)]) - 2.0 * f0 + eval(&[(i, -h)])) / (h * h);
        for j in i + 1..4 {
            let v = (eval(&[(i, h), (j, h)]) - eval(&[(i, h), (j, -h)]) - eval(&[(i, -h), (j, h)])
                + eval(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            hr[i][j] = v;
            hr[j][i] = v;
        }
    }
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            m[a][b] = C64::new(hr[xa][xb] + hr[ya][yb], hr[xa][yb] - hr[ya][xb]) * 0.25;
        }
    }
    HermitianForm2(m)
}

fn default_step(z: &ConePoint) -> f64 {
    z.norm() * 1e-3
}

pub fn glued_metric(z: &ConePoint, eps: f64, delta: f64, cutoff: Cutoff) -> Result<HermitianForm2, EhError> {
    if z.norm_sqr() == 0.0 {
        return Err(EhError::SingularPoint);
    }
    if !(eps > 0.0 && delta > 0.0 && delta <= 1.0) {
        return Err(EhError::InvalidParameter("need ε > 0 and 0 < δ ≤ 1"));
    }
    Ok(complex_hessian(|p| glued_potential(p, eps, delta, cutoff), z, default_step(z)))
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub cutoff: Cutoff,
    pub delta: f64,
    pub eps_grid: Vec<f64>,
    /// Minimum eigenvalue of the glued metric over the radial grid, per ε.
    pub margins: Vec<f64>,
    pub eps_rho: f64,
    pub monotone: bool,
}

pub fn min_eigenvalue_on_annulus(eps: f64, delta: f64, cutoff: Cutoff, radii: &[f64]) -> Result<f64, EhError> {
    let mut m = f64::INFINITY;
    for &r in radii {
        let g = glued_metric(&ConePoint::radial(r), eps, delta, cutoff)?;
        m = m.min(g.eigenvalues().0);
    }
    Ok(m)
}

pub fn annulus_grid(delta: f64, n: usize) -> Vec<f64> {
    let (a, b) = ((delta / 2.0).ln(), (4.0 * delta).ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Largest grid ε with a positive glued metric on `[δ/2, 4δ]`; the
/// threshold depends on the grid.
pub fn positivity_probe(cutoff: Cutoff, delta: f64, eps_grid: &[f64]) -> Result<PositivityReport, EhError> {
    let radii = annulus_grid(delta, 161);
    let mut grid = eps_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite ε"));
    let margins = grid
        .iter()
        .map(|&e| min_eigenvalue_on_annulus(e, delta, cutoff, &radii))
        .collect::<Result<Vec<_>, _>>()?;
    let monotone = margins.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let eps_rho = grid
        .iter()
        .zip(&margins)
        .filter(|(_, &m)| m > 0.0)
        .map(|(&e, _)| e)
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.max(e))))
        .ok_or(EhError::NoPositiveEpsilon)?;
    Ok(PositivityReport { cutoff, delta, eps_grid: grid, margins, eps_rho, monotone })
}

/// Extremes of the generalized eigenvalues of the glued metric against the
/// Eguchi–Hanson metric over the given radii.
pub fn quasi_isometry_bounds(eps: f64, delta: f64, cutoff: Cutoff, radii: &[f64]) -> Result<(f64, f64), EhError> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &r in radii {
        let z = ConePoint::radial(r);
        let g = glued_metric(&z, eps, delta, cutoff)?;
        let h = eh_metric(&z, eps)?;
        let (a, b) = g.relative_eigenvalues(&h);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}

type Mat = [[C64; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Direction `∂_i` (holomorphic) or `∂_ī` (antiholomorphic) as a pair of
/// real coordinate indices.
fn real_dirs(i: usize) -> (usize, usize) {
    (2 * i, 2 * i + 1)
}

fn shifted(z: &ConePoint, k: usize, t: f64) -> ConePoint {
    let mut x = z.to_real();
    x[k] += t;
    ConePoint::from_real(&x)
}

/// `A_i = (∂_i G) G⁻¹` by central differences.
fn connection(metric: &dyn Fn(&ConePoint) -> HermitianForm2, z: &ConePoint, h: f64) -> [Mat; 2] {
    let g = metric(z);
    let ginv = g.inverse();
    let mut out = [[[C64::new(0.0, 0.0); 2]; 2]; 2];
    for (i, slot) in out.iter_mut().enumerate() {
        let (kx, ky) = real_dirs(i);
        let dx = |k: usize| {
            let (p, m) = (metric(&shifted(z, k, h)).0, metric(&shifted(z, k, -h)).0);
            let mut d = [[C64::new(0.0, 0.0); 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    d[a][b] = (p[a][b] - m[a][b]) / (2.0 * h);
                }
            }
            d
        };
        let (gx, gy) = (dx(kx), dx(ky));
        let mut di = [[C64::new(0.0, 0.0); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                di[a][b] = (gx[a][b] - C64::i() * gy[a][b]) * 0.5;
            }
        }
        *slot = mat_mul(&di, &ginv);
    }
    out
}

/// Coefficient of `dz¹∧dz̄¹∧dz²∧dz̄²` in `α∧β` for (1,1)-forms.
fn wedge(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> C64 {
    a[0][0] * b[1][1] + a[1][1] * b[0][0] - a[0][1] * b[1][0] - a[1][0] * b[0][1]
}

/// Chern–Weil `c₂` of the Chern connection as a density against Euclidean
/// Lebesgue measure on C², by nested central differences with step `h`.
pub fn chern2_density(metric: &dyn Fn(&ConePoint) -> HermitianForm2, z: &ConePoint, h: f64) -> f64 {
    // theta[j][i] = ∂_j̄ A_i
    let mut dbar = [[[[C64::new(0.0, 0.0); 2]; 2]; 2]; 2];
    for j in 0..2 {
        let (kx, ky) = real_dirs(j);
        let ap = connection(metric, &shifted(z, kx, h), h);
        let am = connection(metric, &shifted(z, kx, -h), h);
        let bp = connection(metric, &shifted(z, ky, h), h);
        let bm = connection(metric, &shifted(z, ky, -h), h);
        for i in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let dx = (ap[i][a][b] - am[i][a][b]) / (2.0 * h);
                    let dy = (bp[i][a][b] - bm[i][a][b]) / (2.0 * h);
                    dbar[j][i][a][b] = (dx + C64::i() * dy) * 0.5;
                }
            }
        }
    }
    // Θ^a_b as a (1,1)-form: coefficient of dz^i∧dz̄^j is −∂_j̄ (A_i)^a_b.
    let form = |a: usize, b: usize| {
        let mut f = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                f[i][j] = -dbar[j][i][a][b];
            }
        }
        f
    };
    let mut tr_sq = C64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            tr_sq += wedge(&form(a, b), &form(b, a));
        }
    }
    let (t0, t1) = (form(0, 0), form(1, 1));
    let mut tr = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            tr[i][j] = t0[i][j] + t1[i][j];
        }
    }
    let coeff = (tr_sq - wedge(&tr, &tr)) / (8.0 * PI * PI);
    // dz¹∧dz̄¹∧dz²∧dz̄² = −4 dV
    -4.0 * coeff.re
}

#[derive(Debug, Clone, Serialize)]
pub struct Chern2Report {
    pub eps: f64,
    pub r_max: f64,
    pub grid: usize,
    /// `∫_{C²}` (before the ±1 quotient), including the tail.
    pub full_integral: f64,
    pub inner: f64,
    pub tail: f64,
    pub value: f64,
    pub richardson_diff: f64,
    /// Fitted power of the pointwise density on the last decade.
    pub decay_exponent: f64,
}

/// `2π² r³ · density(r)`, the radial integrand of a U(2)-invariant density.
pub fn radial_c2_integrand(metric: &dyn Fn(&ConePoint) -> HermitianForm2, r: f64) -> f64 {
    let z = ConePoint::radial(r);
    2.0 * PI * PI * r.powi(3) * chern2_density(metric, &z, default_step(&z))
}

fn simpson_log(f: &dyn Fn(f64) -> f64, r_min: f64, r_max: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let (a, b) = (r_min.ln(), r_max.ln());
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let u = a + h * i as f64;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let r = u.exp();
        s += w * f(r) * r;
    }
    s * h / 3.0
}

/// Integrates a U(2)-invariant `c₂` density over `{r_min < ∥z∥ ≤ r_max}`
/// in `log r` (Simpson, Richardson-checked) and adds a power-law tail.
pub fn chern2_radial_integral_of(
    metric: &dyn Fn(&ConePoint) -> HermitianForm2,
    r_min: f64,
    r_max: f64,
    grid: usize,
    tol: f64,
) -> Result<RadialIntegral, EhError> {
    if !(r_min > 0.0 && r_max > r_min && grid >= 4) {
        return Err(EhError::InvalidParameter("need 0 < r_min < r_max and grid ≥ 4"));
    }
    let f = |r: f64| radial_c2_integrand(metric, r);
    let fine = simpson_log(&f, r_min, r_max, 2 * grid);
    let coarse = simpson_log(&f, r_min, r_max, grid);
    let diff = (fine - coarse).abs();
    if diff > tol {
        return Err(EhError::GridTooCoarse(diff));
    }
    let tail = power_tail(f(r_max / 10.0), r_max / 10.0, f(r_max), r_max);
    let inner = power_tail(f(2.0 * r_min), 2.0 * r_min, f(r_min), r_min);
    let (f1, f2) = (f(r_max / 10.0), f(r_max));
    let p = if f1 > 0.0 && f2 > 0.0 { (f2 / f1).ln() / 10f64.ln() } else { f64::NEG_INFINITY };
    // pointwise exponent = radial exponent − 3
    Ok(RadialIntegral { body: fine + (fine - coarse) / 15.0, inner, tail, richardson_diff: diff, decay_exponent: p - 3.0 })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialIntegral {
    pub body: f64,
    /// Power-law estimate of `∫_0^{r_min}`.
    pub inner: f64,
    /// Power-law estimate of `∫_{r_max}^∞`.
    pub tail: f64,
    pub richardson_diff: f64,
    pub decay_exponent: f64,
}

impl RadialIntegral {
    pub fn total(&self) -> f64 {
        self.body + self.inner + self.tail
    }
}

/// `∫` of `a r^p` fitted through `(r0, f0)` and `(r1, f1)`, over the
/// half-line on the far side of `r1`.
fn power_tail(f0: f64, r0: f64, f1: f64, r1: f64) -> f64 {
    if f0 == 0.0 || f1 == 0.0 || f0.signum() != f1.signum() {
        return 0.0;
    }
    let p = (f1 / f0).ln() / (r1 / r0).ln();
    if r1 > r0 && p < -1.0 {
        f1 * r1 / (p + 1.0).abs()
    } else if r1 < r0 && p > -1.0 {
        f1 * r1 / (p + 1.0)
    } else {
        0.0
    }
}

/// `∫ c₂(T*P¹, γ^EH_ε)` as a radial integral on C²/±1.
pub fn chern2_radial_integral(eps: f64, r_max: f64, grid: usize) -> Result<Chern2Report, EhError> {
    if eps <= 0.0 {
        return Err(EhError::InvalidParameter("ε must be positive"));
    }
    let metric = move |z: &ConePoint| eh_metric(z, eps).expect("nonzero point");
    let r_min = 0.1 * eps.sqrt();
    let ri = chern2_radial_integral_of(&metric, r_min, r_max, grid, 1e-3)?;
    let full = ri.total();
    Ok(Chern2Report {
        eps,
        r_max,
        grid,
        full_integral: full,
        inner: ri.inner,
        tail: ri.tail,
        value: full / 2.0,
        richardson_diff: ri.richardson_diff,
        decay_exponent: ri.decay_exponent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalRow {
    pub t: [f64; 2],
    pub fs_value: f64,
    pub sigmas: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Fitted power of σ in the relative deviation.
    pub order: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalReport {
    pub eps: f64,
    pub rows: Vec<ExceptionalRow>,
}

/// In the chart `(σ, t) ↦ (σ, σt)`, compares `g_{tt̄}` as σ → 0 with
/// `ε/(1+|t|²)²`, the value for `2πε ω_FS`.
pub fn exceptional_restriction_check(eps: f64, ts: &[C64]) -> Result<ExceptionalReport, EhError> {
    if eps <= 0.0 {
        return Err(EhError::InvalidParameter("ε must be positive"));
    }
    let sigmas: Vec<f64> = (0..6).map(|i| eps.sqrt() * 0.2 * 0.5f64.powi(i)).collect();
    let mut rows = Vec::new();
    for &t in ts {
        let fs = eps / (1.0 + t.norm_sqr()).powi(2);
        let mut devs = Vec::new();
        for &s in &sigmas {
            let z = ConePoint { z: [C64::new(s, 0.0), t * s] };
            let g = eh_metric(&z, eps)?;
            let gtt = s * s * g.0[1][1].re;
            devs.push((gtt - fs) / fs);
        }
        let n = sigmas.len();
        let order = (devs[n - 2].abs() / devs[n - 1].abs()).ln() / (sigmas[n - 2] / sigmas[n - 1]).ln();
        rows.push(ExceptionalRow { t: [t.re, t.im], fs_value: fs, sigmas: sigmas.clone(), deviations: devs, order });
    }
    Ok(ExceptionalReport { eps, rows })
}
