//! Evaluation of the Borcherds products `Φ_V` on the tube domain
//! `Pic(V)⊗R + i·K_V`, with truncation control, symmetry checks, Heegner
//! exponents and quasi-pullbacks along blow-ups.
//!
//! The product is evaluated in log form,
//!
//! ```text
//! log Φ = πi⟨c1, z⟩ + Σ_α c⁽⁰⁾(α²) log(1 - e^{2πi⟨α,z⟩})
//!                   + Σ_β c⁽¹⁾(β²/4) log(1 - e^{πi⟨β,z⟩}),
//! ```
//!
//! with `α` over effective classes and `β` over effective classes congruent
//! to `c1` mod 2.  Only `α² ≥ -1` and `β² ≥ k` carry nonzero exponents.
//! Phases `⟨α, x⟩ mod 1` are reduced exactly before any float appears.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::delpezzo::{
    apply_matrix_rational, check_symmetry, integral_multiple, BlowDown, DelPezzoError, DelPezzoModel, Variant,
};
use crate::lattice::{IntMatrix, LatticeError, LatticeVector};
use crate::qseries::{CoefficientCache, QExponent, QSeriesError};

/// Multiplier applied to the extrapolated tail.
pub const TAIL_SAFETY: f64 = 10.0;

#[derive(Debug, Error)]
pub enum BorcherdsError {
    #[error("cap too small: need at least {0}")]
    CapTooSmall(String),
    #[error("series truncation insufficient: {0}")]
    SeriesTruncation(#[from] QSeriesError),
    #[error("factor vanishes at class {0}")]
    FactorVanishes(LatticeVector),
    #[error("Im z too shallow: |w| = {0} for class {1}")]
    TooShallow(f64, LatticeVector),
    #[error("y not in Kähler cone")]
    NotKaehler,
    #[error("z not on the wall")]
    NotOnWall,
    #[error("t-range and effectivity disagree at {0}")]
    Inconsistent(LatticeVector),
    #[error("could not reach truncation bound {0:e} (last {1:e})")]
    BoundNotReached(f64, f64),
    #[error("dimension mismatch")]
    Dimension,
    #[error("<c1, λ> is odd for λ = {0}: the half-integral factors change sign")]
    OddTranslation(LatticeVector),
    #[error(transparent)]
    DelPezzo(#[from] DelPezzoError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `z = x + iy` with rational coordinates in the Picard basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubePoint {
    pub x: Vec<BigRational>,
    pub y: Vec<BigRational>,
}

impl TubePoint {
    pub fn new(m: &DelPezzoModel, x: Vec<BigRational>, y: Vec<BigRational>) -> Result<Self, BorcherdsError> {
        if x.len() != m.rank() || y.len() != m.rank() {
            return Err(BorcherdsError::Dimension);
        }
        if !m.kaehler_cone_contains(&y) {
            return Err(BorcherdsError::NotKaehler);
        }
        Ok(TubePoint { x, y })
    }

    /// `z + λ`.
    pub fn translate(&self, lambda: &LatticeVector) -> TubePoint {
        let x = self
            .x
            .iter()
            .zip(&lambda.0)
            .map(|(a, &l)| a + BigRational::from_integer(l.into()))
            .collect();
        TubePoint { x, y: self.y.clone() }
    }

    /// `σ z`.
    pub fn transform(&self, sigma: &IntMatrix) -> TubePoint {
        TubePoint {
            x: apply_matrix_rational(sigma, &self.x),
            y: apply_matrix_rational(sigma, &self.y),
        }
    }

    pub fn y_f64(&self) -> Vec<f64> {
        self.y.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalResult {
    pub log_value: Complex64,
    pub value: Complex64,
    /// Bound on `|log Φ_true - log_value|` from the omitted classes.
    pub truncation_bound: f64,
    /// Bound on accumulated floating point error in `log_value`.
    pub rounding_bound: f64,
    #[serde(serialize_with = "ser_rational")]
    pub cap_used: BigRational,
    pub terms_used: usize,
    pub flags: Vec<String>,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl EvalResult {
    pub fn total_bound(&self) -> f64 {
        self.truncation_bound + self.rounding_bound
    }
}

/// `log(1 - w)` on the principal branch, accurate for small `|w|`.
pub fn log1m(w: Complex64) -> Complex64 {
    let re = 0.5 * (-2.0 * w.re + w.norm_sqr()).ln_1p();
    let im = (-w.im).atan2(1.0 - w.re);
    Complex64::new(re, im)
}

/// Exponents attached to one enumerated class.
struct Exponents {
    alpha: BigInt,
    beta: BigInt,
}

/// One class with nonzero exponent: its contribution to `log Φ`, and the
/// tail weight `Σ |c|·|w|/(1-|w|)` that bounds that contribution.
struct Term {
    sy: i64,
    contrib: Complex64,
    abs: f64,
    weight: f64,
}

/// Classes `a` of `m.picard` with `a² ≥ -1`, `0 < ⟨a, y⟩ ≤ outer`, sorted
/// by `⟨a, y⟩`.
struct TermList {
    terms: Vec<Term>,
    dy: i64,
    outer: BigRational,
}

fn collect_terms(
    m: &DelPezzoModel,
    z: &TubePoint,
    outer: &BigRational,
    mut exps: impl FnMut(&LatticeVector, i64) -> Result<Exponents, BorcherdsError>,
) -> Result<TermList, BorcherdsError> {
    let classes = m.enumerate_min_norm_rational(-1, &z.y, outer)?;
    let (xi, dx) = integral_multiple(&z.x);
    let (yi, dy) = integral_multiple(&z.y);
    let mut terms = Vec::new();
    for a in &classes {
        let n = m.pair(a, a);
        let e = exps(a, n)?;
        if e.alpha.is_zero() && e.beta.is_zero() {
            continue;
        }
        let sx = m.picard.inner_unchecked(&a.0, &xi) as i128;
        let sy = m.picard.inner_unchecked(&a.0, &yi);
        let p = sy as f64 / dy as f64;
        let mut t = Term {
            sy,
            contrib: Complex64::zero(),
            abs: 0.0,
            weight: 0.0,
        };
        for (coeff, half) in [(&e.alpha, false), (&e.beta, true)] {
            if coeff.is_zero() {
                continue;
            }
            // phase ⟨a,x⟩ (or ⟨a,x⟩/2) mod 1, exactly
            let den = if half { 2 * dx as i128 } else { dx as i128 };
            let frac = sx.rem_euclid(den) as f64 / den as f64;
            let r = if half { PI * p } else { 2.0 * PI * p };
            let modulus = (-r).exp();
            if modulus >= 1.0 {
                return Err(BorcherdsError::TooShallow(modulus, a.clone()));
            }
            let w = Complex64::from_polar(modulus, 2.0 * PI * frac);
            let c = coeff.to_f64().expect("finite coefficient");
            let l = log1m(w);
            if !l.re.is_finite() {
                return Err(BorcherdsError::FactorVanishes(a.clone()));
            }
            t.contrib += l * c;
            t.abs += (l * c).norm();
            t.weight += c.abs() * modulus / (1.0 - modulus);
        }
        terms.push(t);
    }
    terms.sort_by_key(|t| t.sy);
    Ok(TermList {
        terms,
        dy,
        outer: outer.clone(),
    })
}

struct ProductSum {
    log: Complex64,
    abs_sum: f64,
    terms: usize,
    shells: [f64; 2],
}

fn rational_i128(r: &BigRational) -> Result<(i128, i128), BorcherdsError> {
    let n = r.numer().to_i128().ok_or(LatticeError::Overflow)?;
    let d = r.denom().to_i128().ok_or(LatticeError::Overflow)?;
    Ok((n, d))
}

/// Sums the terms with `⟨a, y⟩ ≤ cap` and the weights of the two shells
/// `(cap, cap+Δ]`, `(cap+Δ, cap+2Δ]`; requires `cap + 2Δ ≤ outer`.
fn assemble(list: &TermList, cap: &BigRational, delta: &BigRational) -> Result<ProductSum, BorcherdsError> {
    debug_assert!(cap + delta + delta <= list.outer);
    let c_in = rational_i128(cap)?;
    let c_mid = rational_i128(&(cap + delta))?;
    let c_out = rational_i128(&(cap + delta + delta))?;
    // sy/dy ≤ n/d  ⇔  sy·d ≤ n·dy
    let below = |sy: i64, (n, d): (i128, i128)| (sy as i128) * d <= n * list.dy as i128;
    let mut out = ProductSum {
        log: Complex64::zero(),
        abs_sum: 0.0,
        terms: 0,
        shells: [0.0; 2],
    };
    for t in &list.terms {
        if below(t.sy, c_in) {
            out.log += t.contrib;
            out.abs_sum += t.abs;
            out.terms += 1;
        } else if below(t.sy, c_mid) {
            out.shells[0] += t.weight;
        } else if below(t.sy, c_out) {
            out.shells[1] += t.weight;
        } else {
            break;
        }
    }
    Ok(out)
}

/// Geometric extrapolation of the two shell weights, times [`TAIL_SAFETY`];
/// infinite when the shells do not show clear decay.
fn tail_from_shells(shells: [f64; 2]) -> f64 {
    let [s1, s2] = shells;
    if s1 == 0.0 && s2 == 0.0 {
        return 0.0;
    }
    if s1 == 0.0 || s2 == 0.0 {
        return f64::INFINITY;
    }
    let rho = s2 / s1;
    if rho >= 0.75 {
        return f64::INFINITY;
    }
    TAIL_SAFETY * (s1 + s2 / (1.0 - rho))
}

/// Shell width: wide enough in sparse low-rank lattices that consecutive
/// shells see both product families, thin otherwise.  The values `⟨a, y⟩`
/// lie in `(1/dy)Z` and may skip every other step (`⟨a, c1⟩ ≡ a² mod 2`), so
/// the width is never below `2/dy`.
fn shell_width(m: &DelPezzoModel, y: &[BigRational]) -> BigRational {
    if m.rank() <= 3 {
        m.max_generator_pairing(y) * BigInt::from(2)
    } else {
        let (_, dy) = integral_multiple(y);
        BigRational::new(1.into(), 2.into()).max(BigRational::new(2.into(), dy.into()))
    }
}

fn finish(pre: Complex64, s: ProductSum, cap: &BigRational, flags: Vec<String>) -> EvalResult {
    let log_value = pre + s.log;
    let rounding = f64::EPSILON * (s.terms as f64 + 8.0) * (s.abs_sum + pre.norm());
    EvalResult {
        log_value,
        value: log_value.exp(),
        truncation_bound: tail_from_shells(s.shells),
        rounding_bound: rounding,
        cap_used: cap.clone(),
        terms_used: s.terms,
        flags,
    }
}

/// `πi⟨c1, z⟩`.
fn prefactor(m: &DelPezzoModel, z: &TubePoint) -> Complex64 {
    let cx = m.picard.inner_rational(&m.c1.0, &z.x).to_f64().expect("finite");
    let cy = m.picard.inner_rational(&m.c1.0, &z.y).to_f64().expect("finite");
    Complex64::new(-PI * cy, PI * cx)
}

fn is_congruent_mod2(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).rem_euclid(2) == 0)
}

fn check_cap(m: &DelPezzoModel, z: &TubePoint, cap: &BigRational) -> Result<(), BorcherdsError> {
    if !m.kaehler_cone_contains(&z.y) {
        return Err(BorcherdsError::NotKaehler);
    }
    let need = m.max_generator_pairing(&z.y);
    if *cap < need {
        return Err(BorcherdsError::CapTooSmall(need.to_string()));
    }
    Ok(())
}

/// Coefficient table for degree `k` covering every `α² ≤ outer²/y²`, the
/// reverse Cauchy–Schwarz bound on the positive cone.
fn coefficient_table_for(
    m: &DelPezzoModel,
    k: u32,
    z: &TubePoint,
    outer: &BigRational,
) -> Result<std::sync::Arc<crate::qseries::CoefficientTable>, BorcherdsError> {
    let yy = m.picard.inner_rr(&z.y, &z.y);
    let nmax = (outer * outer / yy).ceil().to_integer();
    let nmax = nmax.to_i64().ok_or(LatticeError::Overflow)?;
    Ok(CoefficientCache::global().table(k, QExponent::integer(nmax + 2))?)
}

fn phi_terms(m: &DelPezzoModel, z: &TubePoint, outer: &BigRational) -> Result<TermList, BorcherdsError> {
    let k = m.degree;
    let table = coefficient_table_for(m, k, z, outer)?;
    let c1 = m.c1.0.clone();
    collect_terms(m, z, outer, |a, n| {
        let eff = m.in_effective_cone(a);
        let alpha = if eff { table.coeff_c0(QExponent::integer(n))? } else { BigInt::zero() };
        let beta = if eff && n >= k as i64 && is_congruent_mod2(&a.0, &c1) {
            table.coeff_c1(QExponent::quarter(n))?
        } else {
            BigInt::zero()
        };
        Ok(Exponents { alpha, beta })
    })
}

fn phi_flags(m: &DelPezzoModel) -> Vec<String> {
    if m.variant == Variant::Sigma0 {
        vec!["beta-congruence c1 = 0 mod 2: beta ranges over 2L".to_string()]
    } else {
        Vec::new()
    }
}

/// `Φ_V(z)` from all classes with `⟨α, y⟩ ≤ cap`.
pub fn phi_eval(m: &DelPezzoModel, z: &TubePoint, cap: &BigRational) -> Result<EvalResult, BorcherdsError> {
    check_cap(m, z, cap)?;
    let delta = shell_width(m, &z.y);
    let list = phi_terms(m, z, &(cap + &delta + &delta))?;
    let s = assemble(&list, cap, &delta)?;
    Ok(finish(prefactor(m, z), s, cap, phi_flags(m)))
}

/// Scans caps `g_max, g_max + Δ, …` over one enumeration (enlarged as
/// needed) and returns the first evaluation with bound ≤ `target`.
fn scan_caps(
    m: &DelPezzoModel,
    z: &TubePoint,
    target: f64,
    mut terms: impl FnMut(&BigRational) -> Result<TermList, BorcherdsError>,
    pre: Complex64,
    flags: Vec<String>,
) -> Result<EvalResult, BorcherdsError> {
    let delta = shell_width(m, &z.y);
    let start = m.max_generator_pairing(&z.y);
    let three_halves = BigRational::new(3.into(), 2.into());
    let mut outer = &start + &delta * BigInt::from(2) + BigRational::from_integer(4.into());
    let mut last = f64::INFINITY;
    for _ in 0..8 {
        let list = terms(&outer)?;
        let mut cap = start.clone();
        while &cap + &delta + &delta <= outer {
            let s = assemble(&list, &cap, &delta)?;
            let r = finish(pre, s, &cap, flags.clone());
            if r.truncation_bound <= target {
                return Ok(r);
            }
            last = r.truncation_bound;
            cap += &delta;
        }
        outer = &outer * &three_halves;
    }
    Err(BorcherdsError::BoundNotReached(target, last))
}

/// Smallest cap on the grid `g_max + jΔ` whose truncation bound is at most
/// `target`.
pub fn phi_eval_to_bound(m: &DelPezzoModel, z: &TubePoint, target: f64) -> Result<EvalResult, BorcherdsError> {
    check_cap(m, z, &m.max_generator_pairing(&z.y))?;
    scan_caps(m, z, target, |outer| phi_terms(m, z, outer), prefactor(m, z), phi_flags(m))
}

/// `log ∥Φ(z)∥² = (4+k) log⟨y,y⟩ + 2 Re log Φ` and the associated bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormResult {
    pub log_norm_sq: f64,
    pub norm_sq: f64,
    pub bound: f64,
}

pub fn petersson_norm(m: &DelPezzoModel, z: &TubePoint, cap: &BigRational) -> Result<NormResult, BorcherdsError> {
    let r = phi_eval(m, z, cap)?;
    Ok(norm_from_eval(m, z, &r))
}

pub fn norm_from_eval(m: &DelPezzoModel, z: &TubePoint, r: &EvalResult) -> NormResult {
    let yy = m.picard.inner_rr(&z.y, &z.y).to_f64().expect("finite");
    let l = (4.0 + m.degree as f64) * yy.ln() + 2.0 * r.log_value.re;
    NormResult {
        log_norm_sq: l,
        norm_sq: l.exp(),
        bound: 2.0 * r.total_bound(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub discrepancy: f64,
    pub tolerance: f64,
    pub truncation_bound: f64,
    pub passed: bool,
}

fn wrap_phase(d: Complex64) -> Complex64 {
    let im = d.im - 2.0 * PI * (d.im / (2.0 * PI)).round();
    Complex64::new(d.re, im)
}

/// Compares `Φ(z+λ)` with `e^{πi⟨c1,λ⟩} Φ(z)` in log form modulo `2πi`.
///
/// The factors `1 - e^{πi⟨β,z⟩}` with `β ≡ c1 mod 2` pick up
/// `(-1)^{⟨c1,λ⟩}`, so only translations with `⟨c1,λ⟩` even are periods.
pub fn translation_check(
    m: &DelPezzoModel,
    z: &TubePoint,
    lambda: &LatticeVector,
    cap: &BigRational,
) -> Result<SymmetryReport, BorcherdsError> {
    if m.pair(&m.c1, lambda).rem_euclid(2) != 0 {
        return Err(BorcherdsError::OddTranslation(lambda.clone()));
    }
    let a = phi_eval(m, z, cap)?;
    let b = phi_eval(m, &z.translate(lambda), cap)?;
    let shift = Complex64::new(0.0, PI * m.pair(&m.c1, lambda) as f64);
    let d = wrap_phase(b.log_value - a.log_value - shift).norm();
    Ok(report(d, &a, &b, 1.0))
}

fn report(d: f64, a: &EvalResult, b: &EvalResult, scale: f64) -> SymmetryReport {
    let trunc = a.truncation_bound + b.truncation_bound;
    let tol = scale * (10.0 * trunc + a.rounding_bound + b.rounding_bound);
    SymmetryReport {
        discrepancy: d,
        tolerance: tol,
        truncation_bound: trunc,
        passed: d <= tol,
    }
}

/// Compares `∥Φ(σz)∥` with `∥Φ(z)∥` for an isometry `σ` fixing `c1` and
/// permuting the effective generators.
pub fn weyl_symmetry_check(
    m: &DelPezzoModel,
    z: &TubePoint,
    sigma: &IntMatrix,
    cap: &BigRational,
) -> Result<SymmetryReport, BorcherdsError> {
    check_symmetry(m, sigma)?;
    let sz = z.transform(sigma);
    let a = phi_eval(m, z, cap)?;
    let b = phi_eval(m, &sz, cap)?;
    let na = norm_from_eval(m, z, &a);
    let nb = norm_from_eval(m, &sz, &b);
    let d = (na.log_norm_sq - nb.log_norm_sq).abs();
    // the log-norm carries 2 Re log Φ
    Ok(report(d, &a, &b, 2.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct HeegnerRow {
    pub ell: LatticeVector,
    pub c1_pairing: i64,
    /// `(m, sign, c⁽⁰⁾(-m²))` for each effective `sign·m·ℓ`.
    pub contributions: Vec<(i64, i64, String)>,
    pub exponent: String,
}

/// Total product exponent along each wall `ℓ^⊥` with `ℓ² = -1` and
/// `|⟨ℓ, c1⟩| ≤ height_cap`; classes `±mℓ` contribute `c⁽⁰⁾(-m²)`.
pub fn heegner_exponent_scan(m: &DelPezzoModel, height_cap: i64) -> Result<Vec<HeegnerRow>, BorcherdsError> {
    let table = CoefficientCache::global().table(m.degree, QExponent::integer(2))?;
    let ells = m.picard.enumerate_norm_vectors_symmetric(
        -1,
        &m.c1,
        num_rational::Rational64::from_integer(height_cap),
    )?;
    let mut rows = Vec::new();
    for ell in ells {
        // ℓ and -ℓ cut out the same wall
        if ell.0.iter().find(|&&c| c != 0).copied().unwrap_or(0) < 0 {
            continue;
        }
        let mut total = BigInt::zero();
        let mut contributions = Vec::new();
        // (mℓ)² = -m² and c⁽⁰⁾ vanishes below -1
        let mut mult = 1i64;
        while -mult * mult >= -1 {
            for sign in [1i64, -1] {
                let a = ell.scale(sign * mult);
                if m.in_effective_cone(&a) {
                    let c = table.coeff_c0(QExponent::integer(-mult * mult))?;
                    total += &c;
                    contributions.push((mult, sign, c.to_string()));
                }
            }
            mult += 1;
        }
        rows.push(HeegnerRow {
            c1_pairing: m.pair(&ell, &m.c1),
            ell,
            contributions,
            exponent: total.to_string(),
        });
    }
    Ok(rows)
}

fn qp_terms(bd: &BlowDown, z: &TubePoint, outer: &BigRational) -> Result<TermList, BorcherdsError> {
    let small = &bd.small;
    let big = &bd.big;
    let kb = big.degree;
    let table = coefficient_table_for(small, kb, z, outer)?;
    let c1s = small.c1.0.clone();
    let e = &bd.exceptional;
    collect_terms(small, z, outer, |a, n| {
        let lifted = bd.lift(a);
        // α = ιa + tE with α² = n - t² ≥ -1
        let tmax = isqrt(n + 1);
        let mut alpha = BigInt::zero();
        let mut seen = (false, false);
        for t in -tmax..=tmax {
            if big.in_effective_cone(&lifted.add(&e.scale(t))) {
                alpha += table.coeff_c0(QExponent::integer(n - t * t))?;
                seen.0 = true;
            } else {
                seen.1 = true;
            }
        }
        if seen.0 && seen.1 {
            return Err(BorcherdsError::Inconsistent(a.clone()));
        }
        // β = ιb + sE with b ≡ c1(V) mod 2, s odd, β² = n - s² ≥ k(Ṽ)
        let mut beta = BigInt::zero();
        if is_congruent_mod2(&a.0, &c1s) && n - 1 >= kb as i64 {
            let smax = isqrt(n - kb as i64);
            let mut seen = (false, false);
            for s in (-smax..=smax).filter(|s| s.rem_euclid(2) == 1) {
                if big.in_effective_cone(&lifted.add(&e.scale(s))) {
                    beta += table.coeff_c1(QExponent::quarter(n - s * s))?;
                    seen.0 = true;
                } else {
                    seen.1 = true;
                }
            }
            if seen.0 && seen.1 {
                return Err(BorcherdsError::Inconsistent(a.clone()));
            }
        }
        Ok(Exponents { alpha, beta })
    })
}

/// `log(-2πi) + πi⟨c1(Ṽ), ιz⟩`.
fn qp_prefactor(bd: &BlowDown, z: &TubePoint) -> Result<Complex64, BorcherdsError> {
    let lz = TubePoint {
        x: bd.lift_rational(&z.x),
        y: bd.lift_rational(&z.y),
    };
    if !bd.big.picard.inner_rational(&bd.exceptional.0, &lz.y).is_zero() {
        return Err(BorcherdsError::NotOnWall);
    }
    Ok(prefactor(&bd.big, &lz) + Complex64::new((2.0 * PI).ln(), -PI / 2.0))
}

const QP_FLAG: &str = "constant -2*pi*i from the removed factor";

/// Quasi-pullback of `Φ_Ṽ` (the larger Picard lattice of `bd`) to the wall
/// `[E]^⊥ ≅ Pic(V)`, evaluated at `z` in the tube of `V`:
/// `(-2πi) e^{πi⟨c1(Ṽ), z⟩} ∏` over classes regrouped by their projection
/// `α' = α + ⟨α,E⟩E`.  Each projection `a` carries the exponent
/// `Σ_t c⁽⁰⁾_{Ṽ}(a² - t²)` over the `t` with `ιa + tE` effective.
pub fn quasi_pullback(bd: &BlowDown, z: &TubePoint, cap: &BigRational) -> Result<EvalResult, BorcherdsError> {
    check_cap(&bd.small, z, cap)?;
    let delta = shell_width(&bd.small, &z.y);
    let list = qp_terms(bd, z, &(cap + &delta + &delta))?;
    let s = assemble(&list, cap, &delta)?;
    Ok(finish(qp_prefactor(bd, z)?, s, cap, vec![QP_FLAG.into()]))
}

pub fn quasi_pullback_to_bound(bd: &BlowDown, z: &TubePoint, target: f64) -> Result<EvalResult, BorcherdsError> {
    check_cap(&bd.small, z, &bd.small.max_generator_pairing(&z.y))?;
    scan_caps(
        &bd.small,
        z,
        target,
        |outer| qp_terms(bd, z, outer),
        qp_prefactor(bd, z)?,
        vec![QP_FLAG.into()],
    )
}

fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiPullbackComparison {
    pub ratios: Vec<Complex64>,
    pub mean_ratio: Complex64,
    pub spread: f64,
    pub max_bound: f64,
}

/// `Φ_V(z) / QP(Φ_Ṽ)(z)` at each sample, with its relative spread.
pub fn compare_quasi_pullback(
    bd: &BlowDown,
    points: &[TubePoint],
    target_bound: f64,
) -> Result<QuasiPullbackComparison, BorcherdsError> {
    let mut ratios = Vec::new();
    let mut max_bound: f64 = 0.0;
    for z in points {
        let a = phi_eval_to_bound(&bd.small, z, target_bound)?;
        let b = quasi_pullback(bd, z, &a.cap_used)?;
        max_bound = max_bound.max(a.truncation_bound).max(b.truncation_bound);
        ratios.push(wrap_phase(a.log_value - b.log_value).exp());
    }
    let mean = ratios.iter().sum::<Complex64>() / ratios.len().max(1) as f64;
    let spread = ratios.iter().map(|r| (r / mean - 1.0).norm()).fold(0.0, f64::max);
    Ok(QuasiPullbackComparison {
        ratios,
        mean_ratio: mean,
        spread,
        max_bound,
    })
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Default `y²` for sampled points: low-rank lattices can afford points
/// close to the convergence boundary `y² = 1`.
pub fn default_y_norm(m: &DelPezzoModel) -> BigRational {
    match m.rank() {
        1..=2 => rat(3, 1),
        3..=5 => rat(5, 1),
        _ => rat(7, 1),
    }
}

/// Random tube points `y ≈ s·c1` pushed towards some walls, with
/// `y² ≥ y_norm`, `x` uniform on a `1/64` grid.
pub fn sample_tube_points(m: &DelPezzoModel, count: usize, seed: u64, y_norm: &BigRational) -> Vec<TubePoint> {
    let mut rng = StdRng::seed_from_u64(seed);
    let r = m.rank();
    let mut out = Vec::new();
    let s = (y_norm.to_f64().expect("finite") / m.degree as f64).sqrt();
    let grid = |v: f64| rat((v * 64.0).round() as i64, 64);
    while out.len() < count {
        let x: Vec<BigRational> = (0..r).map(|_| rat(rng.gen_range(0..64), 64)).collect();
        let mut y: Vec<BigRational> = match m.variant {
            Variant::Sigma0 => {
                let p = s * rng.gen_range(0.4..1.0);
                vec![grid(2.0 * s), grid(p)]
            }
            _ => {
                // many generators in high rank: stay near the c1 ray so that
                // the largest generator pairing (the minimal cap) stays small
                let lo = match r {
                    1..=3 => 0.35,
                    4..=6 => 0.6,
                    _ => 0.85,
                };
                let mut y = vec![grid(3.0 * s)];
                for _ in 1..r {
                    y.push(grid(-s * rng.gen_range(lo..1.0)));
                }
                y
            }
        };
        // raise the leading coordinate until y is Kähler with y² ≥ y_norm
        for _ in 0..4096 {
            if m.kaehler_cone_contains(&y) && m.picard.inner_rr(&y, &y) >= *y_norm {
                break;
            }
            y[0] += rat(1, 16);
        }
        y[0] += rat(rng.gen_range(0..16), 64);
        if let Ok(p) = TubePoint::new(m, x, y) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delpezzo::{blow_down, model, permutation_isometry};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn log1m_matches_naive() {
        for w in [Complex64::new(0.3, -0.2), Complex64::new(1e-12, 3e-13), Complex64::new(-0.6, 0.1)] {
            let a = log1m(w);
            let b = (Complex64::new(1.0, 0.0) - w).ln();
            assert!((a - b).norm() < 1e-15 * (1.0 + b.norm()) + 1e-28);
        }
    }

    #[test]
    fn p2_deep_point_is_prefactor() {
        let m = model(9, Variant::P2).unwrap();
        let z = TubePoint::new(&m, vec![q(0)], vec![q(20)]).unwrap();
        let r = phi_eval(&m, &z, &q(40)).unwrap();
        assert!((r.log_value.re + 60.0 * PI).abs() / (60.0 * PI) < 1e-12);
        assert!(r.truncation_bound < 1e-40);
    }

    #[test]
    fn cap_too_small_is_rejected() {
        let m = model(6, Variant::Generic).unwrap();
        let z = &sample_tube_points(&m, 1, 3, &default_y_norm(&m))[0];
        assert!(matches!(phi_eval(&m, z, &rat(1, 100)), Err(BorcherdsError::CapTooSmall(_))));
    }

    #[test]
    fn nested_caps_respect_bound() {
        let m = model(7, Variant::Generic).unwrap();
        for z in sample_tube_points(&m, 3, 11, &default_y_norm(&m)) {
            let c1 = m.max_generator_pairing(&z.y) + q(2);
            let a = phi_eval(&m, &z, &c1).unwrap();
            let b = phi_eval(&m, &z, &(c1 + q(3))).unwrap();
            let d = wrap_phase(a.log_value - b.log_value).norm();
            assert!(d <= a.truncation_bound + a.rounding_bound + b.rounding_bound, "{d} vs {}", a.truncation_bound);
        }
    }

    #[test]
    fn translation_and_swap() {
        let m = model(7, Variant::Generic).unwrap();
        let z = &sample_tube_points(&m, 1, 5, &default_y_norm(&m))[0];
        let r = phi_eval_to_bound(&m, z, 1e-10).unwrap();
        let cap = r.cap_used.clone();
        let zero = LatticeVector::zero(3);
        assert_eq!(translation_check(&m, z, &zero, &cap).unwrap().discrepancy, 0.0);
        let rep = translation_check(&m, z, &LatticeVector(vec![1, -2, 3]), &cap).unwrap();
        assert!(rep.passed, "{rep:?}");
        // ⟨c1, H⟩ = 3
        assert!(matches!(
            translation_check(&m, z, &LatticeVector(vec![1, 0, 0]), &cap),
            Err(BorcherdsError::OddTranslation(_))
        ));
        let rep = weyl_symmetry_check(&m, z, &permutation_isometry(&m, &[2, 1]), &cap).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn heegner_sigma1_and_degree6() {
        let m = model(8, Variant::Sigma1).unwrap();
        let rows = heegner_exponent_scan(&m, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].exponent, "1");
        let m = model(6, Variant::Generic).unwrap();
        let rows = heegner_exponent_scan(&m, 1).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.exponent == "1"));
    }

    #[test]
    fn quasi_pullback_ratio_p2() {
        let bd = blow_down(9, Variant::P2).unwrap();
        let pts = sample_tube_points(&bd.small, 3, 1, &default_y_norm(&bd.small));
        let c = compare_quasi_pullback(&bd, &pts, 1e-10).unwrap();
        assert!(c.spread < 1e-6, "{c:?}");
        // Φ_V = QP / (-2πi)
        let want = Complex64::new(0.0, 1.0 / (2.0 * PI));
        assert!((c.mean_ratio - want).norm() < 1e-9 * want.norm(), "{:?}", c.mean_ratio);
    }
}
