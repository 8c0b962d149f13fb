//! Scalar assemblers for τ_k, τ_BCOV and τ_M, and the lattice bookkeeping of
//! the BCOV comparison.  Unknown universal constants stay symbolic.

use crate::lattice::{embedding_search, lambda_k, Lattice, LatticeError, SearchOptions};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error("k = {0} out of range 1..=10")]
    Range(i64),
    #[error("nonpositive input: {0}")]
    Nonpositive(&'static str),
    #[error("expected {expected} singular ratios, got {got}")]
    RatioCount { expected: usize, got: usize },
    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),
    #[error("|disc(M_k)| is only computed for k = 1..9 (got {0}); supply it explicitly")]
    NoDefaultDisc(i64),
    #[error("lattice: {0}")]
    Lattice(#[from] LatticeError),
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check_k(k: i64, lo: i64) -> Result<(), InvariantError> {
    if k < lo || k > 10 {
        Err(InvariantError::Range(k))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C2Integrals {
    pub k: i64,
    /// `(1/24)∫_Y c₂ = (16−k)/32`.
    pub int_c2_y_over_24: BigRational,
    pub int_c2_y: BigRational,
    /// `∫_X c₂ = 24 − (3/2)k`.
    pub int_c2_x: BigRational,
}

/// Accepts `k = 0` as the Enriques value.
pub fn c2_integrals(k: i64) -> Result<C2Integrals, InvariantError> {
    check_k(k, 0)?;
    let y24 = q(16 - k, 32);
    Ok(C2Integrals {
        k,
        int_c2_y: &y24 * BigInt::from(24),
        int_c2_y_over_24: y24,
        int_c2_x: q(24, 1) - q(3 * k, 2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantInputs {
    pub k: i64,
    pub tau_y_gamma: f64,
    pub vol_y_gamma: f64,
    /// `∥Ξ∥_{L¹(Y)}`.
    pub xi_l1_norm: f64,
    /// `(γ²/2!)/|Ξ|` at each singular point.
    pub singular_ratios: Vec<f64>,
    /// `∫_Y log(|Ξ|/(γ²/2!)) c₂(Y, γ)`.
    pub bott_chern_integral: f64,
}

impl InvariantInputs {
    pub fn validate(&self) -> Result<(), InvariantError> {
        check_k(self.k, 1)?;
        if self.singular_ratios.len() != self.k as usize {
            return Err(InvariantError::RatioCount { expected: self.k as usize, got: self.singular_ratios.len() });
        }
        let pos = |x: f64, name| if x > 0.0 && x.is_finite() { Ok(()) } else { Err(InvariantError::Nonpositive(name)) };
        pos(self.tau_y_gamma, "tau_y_gamma")?;
        pos(self.vol_y_gamma, "vol_y_gamma")?;
        pos(self.xi_l1_norm, "xi_l1_norm")?;
        for &r in &self.singular_ratios {
            pos(r, "singular_ratios")?;
        }
        if !self.bott_chern_integral.is_finite() {
            return Err(InvariantError::Nonpositive("bott_chern_integral"));
        }
        Ok(())
    }

    /// The inputs after `Ξ ↦ cΞ`.
    pub fn rescale_xi(&self, c: f64) -> Result<Self, InvariantError> {
        if c <= 0.0 {
            return Err(InvariantError::Nonpositive("scale"));
        }
        let c2y = c2_integrals(self.k)?.int_c2_y.to_f64().expect("small rational");
        Ok(InvariantInputs {
            xi_l1_norm: self.xi_l1_norm * c,
            singular_ratios: self.singular_ratios.iter().map(|r| r / c).collect(),
            bott_chern_integral: self.bott_chern_integral + c.ln() * c2y,
            ..self.clone()
        })
    }
}

/// `log τ_k = log(τ Vol) − ((4+k)/8) log∥Ξ∥ − (5/32) Σ log r_p + (1/24) ∫ log(|Ξ|/(γ²/2!)) c₂`.
///
/// The ratio product enters with exponent `−5/32`: with `r_p = (γ²/2!)/|Ξ|`
/// this is the sign for which `Ξ ↦ cΞ` leaves `τ_k` unchanged.
pub fn log_tau_k(inp: &InvariantInputs) -> Result<f64, InvariantError> {
    inp.validate()?;
    let k = inp.k as f64;
    let sum_log: f64 = inp.singular_ratios.iter().map(|r| r.ln()).sum();
    Ok(inp.tau_y_gamma.ln() + inp.vol_y_gamma.ln() - (4.0 + k) / 8.0 * inp.xi_l1_norm.ln() - 5.0 / 32.0 * sum_log
        + inp.bott_chern_integral / 24.0)
}

pub fn tau_k_assemble(inp: &InvariantInputs) -> Result<f64, InvariantError> {
    log_tau_k(inp).map(f64::exp)
}

/// Net power of `c` picked up by `τ_k` under `Ξ ↦ cΞ`:
/// `−(4+k)/8 + (5/32)k + (1/24)∫_Y c₂`.
pub fn xi_scaling_exponent(k: i64) -> Result<BigRational, InvariantError> {
    let c2 = c2_integrals(k)?;
    Ok(-q(4 + k, 8) + q(5 * k, 32) + c2.int_c2_y_over_24)
}

/// Moves the inputs from the metric `γ` to a metric `γ′` with
/// `(γ′²/2!)/|Ξ|` equal to `new_ratios` at the singular points, Bott–Chern
/// integral `new_integral` and volume `new_volume`, using the anomaly
/// formula through the reference metric `ω` with `ω²/2! = |Ξ|`.
pub fn anomaly_transport(
    inp: &InvariantInputs,
    new_ratios: &[f64],
    new_integral: f64,
    new_volume: f64,
) -> Result<InvariantInputs, InvariantError> {
    inp.validate()?;
    // τ(γ)Vol(γ) = τ(ω)Vol(ω) {∏ r_p}^{5/32} exp(−I/24)
    let anomaly = |r: &[f64], i: f64| 5.0 / 32.0 * r.iter().map(|x| x.ln()).sum::<f64>() - i / 24.0;
    let log_ref = inp.tau_y_gamma.ln() + inp.vol_y_gamma.ln() - anomaly(&inp.singular_ratios, inp.bott_chern_integral);
    let log_new = log_ref + anomaly(new_ratios, new_integral);
    let out = InvariantInputs {
        k: inp.k,
        tau_y_gamma: (log_new - new_volume.ln()).exp(),
        vol_y_gamma: new_volume,
        xi_l1_norm: inp.xi_l1_norm,
        singular_ratios: new_ratios.to_vec(),
        bott_chern_integral: new_integral,
    };
    out.validate()?;
    Ok(out)
}

/// `τ_BCOV = τ_k^{−2}`.
pub fn tau_bcov_from_tau_k(tau_k: f64) -> Result<f64, InvariantError> {
    if tau_k <= 0.0 {
        return Err(InvariantError::Nonpositive("tau_k"));
    }
    Ok(tau_k.powi(-2))
}

/// `log τ_BCOV − (1/2) log∥Φ∥`, which equals `−2 log C_k` at every moduli
/// point.
pub fn bcov_petersson_constant(tau_bcov: f64, phi_norm: f64) -> Result<f64, InvariantError> {
    if tau_bcov <= 0.0 || phi_norm <= 0.0 {
        return Err(InvariantError::Nonpositive("tau_bcov, phi_norm"));
    }
    Ok(tau_bcov.ln() - 0.5 * phi_norm.ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauMInputs {
    pub volume: f64,
    pub equivariant_torsion: f64,
    /// `τ(Z^ι)` of the fixed curve.
    pub torsion: f64,
    /// `Vol(Z^ι)` of the fixed curve.
    pub fixed_curve_volume: f64,
    pub a_m: f64,
    pub r_m: i64,
}

/// `Vol^{(14−r)/4} · τ_{Z₂}(ι) · A_M · Vol(Z^ι) · τ(Z^ι)`.
pub fn tau_m_assemble(inp: &TauMInputs) -> Result<f64, InvariantError> {
    for (x, name) in [
        (inp.volume, "volume"),
        (inp.equivariant_torsion, "equivariant_torsion"),
        (inp.torsion, "torsion"),
        (inp.fixed_curve_volume, "fixed_curve_volume"),
        (inp.a_m, "a_m"),
    ] {
        if !(x > 0.0) {
            return Err(InvariantError::Nonpositive(name));
        }
    }
    let e = (14 - inp.r_m) as f64 / 4.0;
    Ok(inp.volume.powf(e) * inp.equivariant_torsion * inp.a_m * inp.fixed_curve_volume * inp.torsion)
}

/// A value known up to an undetermined universal constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Opaque<T> {
    pub numeric: T,
    pub symbol: String,
}

/// `τ_k = C(k)^{−1} τ_M^{1/2}`.
pub fn tau_k_from_tau_m(k: i64, tau_m: f64) -> Result<Opaque<f64>, InvariantError> {
    check_k(k, 1)?;
    if tau_m <= 0.0 {
        return Err(InvariantError::Nonpositive("tau_m"));
    }
    Ok(Opaque { numeric: tau_m.sqrt(), symbol: format!("C({k})^-1") })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRatio {
    pub k: i64,
    /// `2^{−k−4} (|Coker q*|/|Coker q̃*|)^{−2} (|disc⁺_X|/|disc⁺_X̃|)^{−1}`.
    pub numeric: BigRational,
    pub symbol: String,
    pub disc_plus_xtilde: BigInt,
    pub r: i64,
    pub r_tilde: i64,
}

/// `|disc(M_k)|` with `M_k = Λ_k(2)^⊥ ⊂ L_K3`, computed from an explicit
/// primitive embedding.
pub fn disc_m_k(k: i64) -> Result<BigInt, InvariantError> {
    if !(1..=9).contains(&k) {
        return Err(InvariantError::NoDefaultDisc(k));
    }
    let src = lambda_k(k as u32, false).rescale(2)?;
    let emb = embedding_search(&src, &Lattice::k3(), SearchOptions::default())?;
    let (comp, _) = emb.orthogonal_complement()?;
    Ok(comp.discriminant().abs())
}

pub fn bcov_comparison_ratio(
    k: i64,
    disc_plus_x: i64,
    disc_plus_xtilde: Option<i64>,
    coker_q: i64,
    coker_qtilde: i64,
) -> Result<ComparisonRatio, InvariantError> {
    check_k(k, 1)?;
    let dt = match disc_plus_xtilde {
        Some(d) => BigInt::from(d),
        None => disc_m_k(k)?,
    };
    if disc_plus_x == 0 || dt.is_zero() || coker_q == 0 || coker_qtilde == 0 {
        return Err(InvariantError::ZeroDenominator("discriminants and cokernel orders must be nonzero"));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let base = BigRational::one() / num_traits::pow(two, (k + 4) as usize);
    let coker = q(coker_q, coker_qtilde);
    let disc = BigRational::new(BigInt::from(disc_plus_x), dt.clone());
    let numeric = base / (&coker * &coker) / disc;
    Ok(ComparisonRatio {
        k,
        numeric: numeric.abs(),
        symbol: format!("C({k})^8"),
        disc_plus_xtilde: dt,
        r: 10,
        r_tilde: 10 + k,
    })
}

/// `Vol_{L²}(H²(V,Z), γ) = 2^{−(r+1)} |Coker q*|² |disc| Vol(X, γ_X)`.
pub fn covolume(r: i64, coker_q: i64, disc: i64, vol_x: f64) -> Result<f64, InvariantError> {
    if vol_x <= 0.0 {
        return Err(InvariantError::Nonpositive("vol_x"));
    }
    Ok(2f64.powi(-(r as i32 + 1)) * (coker_q as f64).powi(2) * (disc as f64).abs() * vol_x)
}

/// `χ^orb = 12k`.
pub fn chi_orb(k: i64) -> Result<i64, InvariantError> {
    check_k(k, 1)?;
    Ok(12 * k)
}

/// `(1/2)χ(X̃×T) + (3/2)χ(X̃^θ×T[2])` with `χ(T) = 0`, `X̃^θ` a union of `2k`
/// rational curves and `|T[2]| = 4`.
pub fn chi_orb_from_fixed_locus(k: i64) -> Result<BigRational, InvariantError> {
    check_k(k, 1)?;
    let fixed = BigInt::from(2 * k) * BigInt::from(2) * BigInt::from(4);
    Ok(q(3, 2) * BigRational::from_integer(fixed) / BigRational::from_integer(BigInt::from(2)))
}
