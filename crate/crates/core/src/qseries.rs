//! Exact Laurent series in `q` with exponents on the `(1/24)·Z` grid.
//!
//! The grid is the smallest one that holds every factor used by the
//! Borcherds exponents: `η` contributes `q^{1/24}` and the shifted theta
//! series `θ_{A₁+1/2}` contributes `q^{1/4}`.
//!
//! A [`QSeries`] carries a truncation order: every exponent at or above it is
//! *unknown*, not zero.  Products and inverses shrink the valid range
//! conservatively, so a coefficient read below the truncation order is always
//! exact.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exponent denominator shared by every series in this module.
pub const DENOM: i64 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("non-unit leading coefficient {0}")]
    NonUnitLeading(BigInt),
    #[error("cannot invert the zero series")]
    ZeroSeries,
    #[error("exponent {requested} is beyond truncation order {truncation}")]
    BeyondTruncation {
        requested: QExponent,
        truncation: QExponent,
    },
    #[error("k = {0} outside 0..=9")]
    InvalidK(u32),
    #[error("theta shift must be 0 or 1, got {0}")]
    InvalidShift(u32),
}

/// An exponent `numerator_24 / 24`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QExponent(pub i64);

impl QExponent {
    pub const fn from_num24(numerator_24: i64) -> Self {
        QExponent(numerator_24)
    }

    pub const fn integer(n: i64) -> Self {
        QExponent(n * DENOM)
    }

    /// `n / 4`, the grid used by `c_k^{(1)}`.
    pub const fn quarter(n: i64) -> Self {
        QExponent(n * (DENOM / 4))
    }

    pub const fn num24(self) -> i64 {
        self.0
    }

    /// Returns `Some(n)` when the exponent is the integer `n`.
    pub fn as_integer(self) -> Option<i64> {
        (self.0 % DENOM == 0).then(|| self.0 / DENOM)
    }

    /// Returns `Some(n)` when the exponent equals `n / 4`.
    pub fn as_quarter(self) -> Option<i64> {
        (self.0 % (DENOM / 4) == 0).then(|| self.0 / (DENOM / 4))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / DENOM as f64
    }
}

impl fmt::Display for QExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0.gcd(&DENOM);
        let (n, d) = (self.0 / g, DENOM / g);
        if d == 1 {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

/// A truncated Laurent series `Σ c_e q^e + O(q^truncation)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    terms: BTreeMap<i64, BigInt>,
    truncation: i64,
}

impl QSeries {
    /// Builds a series from `(numerator_24, coefficient)` pairs.  Terms at or
    /// beyond `truncation` and zero coefficients are dropped; repeated
    /// exponents are summed.
    pub fn from_terms<I, C>(terms: I, truncation: QExponent) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut map: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            if e < truncation.0 {
                *map.entry(e).or_default() += c.into();
            }
        }
        map.retain(|_, c| !c.is_zero());
        QSeries {
            terms: map,
            truncation: truncation.0,
        }
    }

    /// Polynomial in integer powers of `q`: `coeffs[i]` multiplies `q^i`.
    pub fn from_integer_coeffs(coeffs: &[i64], truncation: QExponent) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as i64 * DENOM, c)),
            truncation,
        )
    }

    pub fn one(truncation: QExponent) -> Self {
        Self::from_terms([(0, 1)], truncation)
    }

    pub fn zero(truncation: QExponent) -> Self {
        Self::from_terms(std::iter::empty::<(i64, i64)>(), truncation)
    }

    pub fn truncation_order(&self) -> QExponent {
        QExponent(self.truncation)
    }

    /// Lowest exponent with a nonzero coefficient, if any is known.
    pub fn leading_exponent(&self) -> Option<QExponent> {
        self.terms.keys().next().map(|&e| QExponent(e))
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.terms.values().next()
    }

    /// Lowest exponent that could carry a nonzero coefficient; the truncation
    /// order when no term is known.
    fn valuation_bound(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.truncation)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (QExponent, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (QExponent(e), c))
    }

    /// Exact coefficient of `q^e`; zero when `e` is below the truncation
    /// order and absent.
    pub fn coeff(&self, e: QExponent) -> Result<BigInt, QSeriesError> {
        if e.0 >= self.truncation {
            return Err(QSeriesError::BeyondTruncation {
                requested: e,
                truncation: QExponent(self.truncation),
            });
        }
        Ok(self.terms.get(&e.0).cloned().unwrap_or_default())
    }

    /// Drops everything at or beyond `order` (never extends the known range).
    pub fn truncate(&self, order: QExponent) -> QSeries {
        let t = order.0.min(self.truncation);
        QSeries {
            terms: self
                .terms
                .range(..t)
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
            truncation: t,
        }
    }

    /// Multiplies by `q^shift`.
    pub fn shift(&self, shift: QExponent) -> QSeries {
        QSeries {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e + shift.0, c.clone()))
                .collect(),
            truncation: self.truncation.saturating_add(shift.0),
        }
    }

    pub fn scale(&self, factor: &BigInt) -> QSeries {
        if factor.is_zero() {
            return QSeries::zero(self.truncation_order());
        }
        QSeries {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e, c * factor))
                .collect(),
            truncation: self.truncation,
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let t = self.truncation.min(other.truncation);
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(&e, c)| (e, c.clone())),
            QExponent(t),
        )
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    /// Product; the result is known below
    /// `min(trunc(a) + val(b), trunc(b) + val(a))`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let t = self
            .truncation
            .saturating_add(other.valuation_bound())
            .min(other.truncation.saturating_add(self.valuation_bound()));
        let mut out: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= t {
                    break;
                }
                *out.entry(e).or_default() += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        QSeries {
            terms: out,
            truncation: t,
        }
    }

    /// Multiplicative inverse by long division against the unit leading term.
    pub fn inverse(&self) -> Result<QSeries, QSeriesError> {
        let (&e0, c0) = self.terms.iter().next().ok_or(QSeriesError::ZeroSeries)?;
        if !c0.abs().is_one() {
            return Err(QSeriesError::NonUnitLeading(c0.clone()));
        }
        // The unit part 1 + u lives on e0 + g·Z; its inverse lives on g·Z.
        let g = self
            .terms
            .keys()
            .skip(1)
            .fold(0i64, |acc, &e| acc.gcd(&(e - e0)));
        let rel_prec = self.truncation - e0;
        let new_trunc = self.truncation - 2 * e0;
        if g == 0 {
            // Monomial: exact inverse.
            return Ok(QSeries::from_terms([(-e0, c0.clone())], QExponent(new_trunc)));
        }
        let n = (rel_prec + g - 1).div_euclid(g).max(0) as usize;
        let mut unit = vec![BigInt::zero(); n];
        for (&e, c) in &self.terms {
            let j = ((e - e0) / g) as usize;
            if j < n {
                unit[j] = c.clone();
            }
        }
        // c0 = ±1, so dividing by it is multiplying by it.
        let mut inv = vec![BigInt::zero(); n];
        if n > 0 {
            inv[0] = c0.clone();
        }
        for j in 1..n {
            let mut acc = BigInt::zero();
            for i in 1..=j {
                if !unit[i].is_zero() && !inv[j - i].is_zero() {
                    acc += &unit[i] * &inv[j - i];
                }
            }
            inv[j] = -(acc * c0);
        }
        Ok(QSeries::from_terms(
            inv.into_iter()
                .enumerate()
                .map(|(j, c)| (-e0 + j as i64 * g, c)),
            QExponent(new_trunc),
        ))
    }

    /// Integer power; negative powers require a unit leading coefficient.
    pub fn pow(&self, n: i64) -> Result<QSeries, QSeriesError> {
        if n < 0 {
            return self.inverse()?.pow(-n);
        }
        if n == 0 {
            let rel = self.truncation - self.valuation_bound();
            return Ok(QSeries::one(QExponent(rel)));
        }
        let mut result: Option<QSeries> = None;
        let mut base = self.clone();
        let mut e = n as u64;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        Ok(result.expect("n > 0"))
    }

    /// Renders the series as `c q^e + … + O(q^t)`.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        for (i, (&e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                s.push('-');
            }
            let _ = write!(s, "{}*q^({})", c.abs(), QExponent(e));
        }
        if !s.is_empty() {
            s.push_str(" + ");
        }
        let _ = write!(s, "O(q^({}))", QExponent(self.truncation));
        s
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

/// `η(m τ)^p` truncated at `order`.
///
/// Uses Euler's pentagonal expansion `η(τ) = Σ_j (-1)^j q^{(6j-1)²/24}`.
pub fn eta_series(scale: u32, power: i64, order: QExponent) -> QSeries {
    assert!(scale > 0, "eta scale must be positive");
    let m = scale as i64;
    if power == 0 {
        return QSeries::one(order);
    }
    let base_order = order.0 + (power.abs() + 2) * m + DENOM;
    let mut terms = Vec::new();
    // j ranges over all integers; (6j-1)² grows in |j|.
    let mut j: i64 = 0;
    loop {
        let mut any = false;
        for jj in [j, -j - 1] {
            let e = m * (6 * jj - 1).pow(2);
            if e < base_order {
                any = true;
                terms.push((e, if jj.rem_euclid(2) == 0 { 1 } else { -1 }));
            }
        }
        if !any {
            break;
        }
        j += 1;
    }
    let eta = QSeries::from_terms(terms, QExponent(base_order));
    let out = eta.pow(power).expect("eta has unit leading coefficient");
    debug_assert!(out.truncation >= order.0);
    out.truncate(order)
}

/// `θ_{A₁ + shift/2}(τ) = Σ_{n∈Z} q^{(n + shift/2)²}`.
pub fn theta_series(shift: u32, order: QExponent) -> Result<QSeries, QSeriesError> {
    let mut terms = Vec::new();
    match shift {
        0 => {
            // exponent 24 n²
            let mut n: i64 = 0;
            while DENOM * n * n < order.0 {
                terms.push((DENOM * n * n, if n == 0 { 1 } else { 2 }));
                n += 1;
            }
        }
        1 => {
            // exponent 24 (n + 1/2)² = 6 (2n+1)², n ≥ 0 counted twice
            let mut n: i64 = 0;
            while 6 * (2 * n + 1).pow(2) < order.0 {
                terms.push((6 * (2 * n + 1).pow(2), 2));
                n += 1;
            }
        }
        s => return Err(QSeriesError::InvalidShift(s)),
    }
    Ok(QSeries::from_terms(terms, order))
}

fn check_k(k: u32) -> Result<(), QSeriesError> {
    if k > 9 {
        Err(QSeriesError::InvalidK(k))
    } else {
        Ok(())
    }
}

/// `Σ c_k^{(0)}(l) q^l = η(2τ)^8 θ_{A₁}(τ)^k / (η(τ)^8 η(4τ)^8)`.
pub fn c0_series(k: u32, order: QExponent) -> Result<QSeries, QSeriesError> {
    check_k(k)?;
    let work = QExponent(order.0.max(0) + 4 * DENOM);
    let num = eta_series(2, 8, work).mul(&theta_series(0, work)?.pow(k as i64)?);
    let den = eta_series(1, 8, work).mul(&eta_series(4, 8, work));
    let out = num.mul(&den.inverse()?);
    debug_assert!(out.truncation >= order.0);
    Ok(out.truncate(order))
}

/// `Σ c_k^{(1)}(l) q^l = -8 η(4τ)^8 θ_{A₁+1/2}(τ)^k / η(2τ)^16`.
pub fn c1_series(k: u32, order: QExponent) -> Result<QSeries, QSeriesError> {
    check_k(k)?;
    let work = QExponent(order.0.max(0) + 4 * DENOM);
    let num = eta_series(4, 8, work).mul(&theta_series(1, work)?.pow(k as i64)?);
    let den = eta_series(2, 16, work);
    let out = num.mul(&den.inverse()?).scale(&BigInt::from(-8));
    debug_assert!(out.truncation >= order.0);
    Ok(out.truncate(order))
}

/// Both Borcherds exponent series for one `k`, computed to a fixed order.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    k: u32,
    c0: QSeries,
    c1: QSeries,
}

impl CoefficientTable {
    pub fn new(k: u32, order: QExponent) -> Result<Self, QSeriesError> {
        Ok(CoefficientTable {
            k,
            c0: c0_series(k, order)?,
            c1: c1_series(k, order)?,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> QExponent {
        QExponent(self.c0.truncation.min(self.c1.truncation))
    }

    pub fn c0(&self) -> &QSeries {
        &self.c0
    }

    pub fn c1(&self) -> &QSeries {
        &self.c1
    }

    /// `c_k^{(0)}(l)`; zero below `-1` and off the integers.
    pub fn coeff_c0(&self, l: QExponent) -> Result<BigInt, QSeriesError> {
        if l.0 < -DENOM {
            return Ok(BigInt::zero());
        }
        self.c0.coeff(l)
    }

    /// `c_k^{(1)}(l)`; zero below `k/4` and off `k/4 + Z`.
    pub fn coeff_c1(&self, l: QExponent) -> Result<BigInt, QSeriesError> {
        let start = QExponent::quarter(self.k as i64);
        if l < start || (l.0 - start.0).rem_euclid(DENOM) != 0 {
            return Ok(BigInt::zero());
        }
        self.c1.coeff(l)
    }

    /// CSV rows `l_times_4,c0,c1` for `l = -1, -3/4, …` below the order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("l_times_4,c0,c1\n");
        let end = self.order().0;
        let mut l4 = -4i64;
        while QExponent::quarter(l4).0 < end {
            let l = QExponent::quarter(l4);
            let a = self.coeff_c0(l).expect("below order");
            let b = self.coeff_c1(l).expect("below order");
            let _ = writeln!(s, "{l4},{a},{b}");
            l4 += 1;
        }
        s
    }
}

/// Process-wide memo of coefficient tables that grows on demand.
#[derive(Debug, Default)]
pub struct CoefficientCache {
    tables: Mutex<[Option<Arc<CoefficientTable>>; 10]>,
}

impl CoefficientCache {
    pub fn global() -> &'static CoefficientCache {
        static CACHE: OnceLock<CoefficientCache> = OnceLock::new();
        CACHE.get_or_init(CoefficientCache::default)
    }

    /// A table for `k` valid strictly below `order` (possibly further).
    pub fn table(&self, k: u32, order: QExponent) -> Result<Arc<CoefficientTable>, QSeriesError> {
        check_k(k)?;
        let mut guard = self.tables.lock().expect("coefficient cache poisoned");
        let slot = &mut guard[k as usize];
        if let Some(t) = slot {
            if t.order() >= order {
                return Ok(Arc::clone(t));
            }
        }
        let current = slot.as_ref().map(|t| t.order().0).unwrap_or(0);
        let target = order.0.max(2 * current).max(8 * DENOM);
        let table = Arc::new(CoefficientTable::new(k, QExponent(target))?);
        *slot = Some(Arc::clone(&table));
        Ok(table)
    }

    pub fn coeff_c0(&self, k: u32, l: QExponent) -> Result<BigInt, QSeriesError> {
        self.table(k, QExponent(l.0 + 1))?.coeff_c0(l)
    }

    pub fn coeff_c1(&self, k: u32, l: QExponent) -> Result<BigInt, QSeriesError> {
        self.table(k, QExponent(l.0 + 1))?.coeff_c1(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_coeffs(s: &QSeries, shift: i64, n: usize) -> Vec<i64> {
        (0..n)
            .map(|i| {
                let c = s.coeff(QExponent(shift + i as i64 * DENOM)).unwrap();
                i64::try_from(c).unwrap()
            })
            .collect()
    }

    #[test]
    fn eta_first_terms() {
        // ∏_{n≤5}(1-q^n) multiplied out by hand: 1 - q - q² + q⁵ + …
        let e = eta_series(1, 1, QExponent(145));
        assert_eq!(e.leading_exponent(), Some(QExponent(1)));
        assert_eq!(int_coeffs(&e, 1, 5), vec![1, -1, -1, 0, 0]);
        assert_eq!(e.coeff(QExponent(1 + 5 * 24)).unwrap(), BigInt::from(1));
    }

    #[test]
    fn eta_zero_power_is_one() {
        let e = eta_series(3, 0, QExponent(100));
        assert_eq!(e, QSeries::one(QExponent(100)));
    }

    #[test]
    fn eta_inverse_partitions() {
        let e = eta_series(1, -1, QExponent(73));
        assert_eq!(e.leading_exponent(), Some(QExponent(-1)));
        assert_eq!(int_coeffs(&e, -1, 3), vec![1, 1, 2]);
        // re-multiply against the order-3 truncation of η.
        let prod = e.mul(&eta_series(1, 1, QExponent(73)));
        assert_eq!(prod.iter().count(), 1);
        assert_eq!(prod.coeff(QExponent(0)).unwrap(), BigInt::one());
    }

    #[test]
    fn theta_examples() {
        let t = theta_series(0, QExponent::integer(10)).unwrap();
        let expect = QSeries::from_terms(
            [(0, 1), (24, 2), (96, 2), (216, 2)],
            QExponent::integer(10),
        );
        assert_eq!(t, expect);
        let t1 = theta_series(1, QExponent::integer(3)).unwrap();
        assert_eq!(
            t1,
            QSeries::from_terms([(6, 2), (54, 2)], QExponent::integer(3))
        );
        let t0 = theta_series(0, QExponent(12)).unwrap();
        assert_eq!(t0, QSeries::one(QExponent(12)));
        assert!(theta_series(2, QExponent(12)).is_err());
    }

    #[test]
    fn mul_pow_examples() {
        let t = QExponent::integer(6);
        let a = QSeries::from_integer_coeffs(&[1, -1], t);
        let b = QSeries::from_integer_coeffs(&[1, 1, 1], t);
        assert_eq!(a.mul(&b), QSeries::from_integer_coeffs(&[1, 0, 0, -1], t));
        let inv = a.pow(-1).unwrap().truncate(QExponent::integer(3));
        assert_eq!(inv, QSeries::from_integer_coeffs(&[1, 1, 1], QExponent::integer(3)));
        assert_eq!(b.pow(0).unwrap().iter().count(), 1);
    }

    #[test]
    fn non_unit_inverse_rejected() {
        let a = QSeries::from_integer_coeffs(&[2, 1], QExponent::integer(4));
        assert!(matches!(a.inverse(), Err(QSeriesError::NonUnitLeading(_))));
        assert!(QSeries::zero(QExponent(0)).inverse().is_err());
    }

    #[test]
    fn truncation_is_unknown_not_zero() {
        let a = QSeries::from_integer_coeffs(&[1, 1], QExponent::integer(2));
        let sq = a.mul(&a);
        assert_eq!(sq.truncation_order(), QExponent::integer(2));
        assert!(sq.coeff(QExponent::integer(2)).is_err());
        assert_eq!(sq.coeff(QExponent::integer(1)).unwrap(), BigInt::from(2));
    }

    #[test]
    fn c0_leading_term() {
        for k in 0..=9 {
            let s = c0_series(k, QExponent::integer(3)).unwrap();
            assert_eq!(s.leading_exponent(), Some(QExponent::integer(-1)));
            assert_eq!(s.leading_coefficient(), Some(&BigInt::one()));
        }
    }

    #[test]
    fn c1_leading_term_and_support() {
        for k in 0..=9u32 {
            let s = c1_series(k, QExponent::integer(6)).unwrap();
            assert_eq!(s.leading_exponent(), Some(QExponent::quarter(k as i64)));
            assert_eq!(
                s.leading_coefficient().cloned(),
                Some(BigInt::from(-8 * (1i64 << k)))
            );
            for (e, _) in s.iter() {
                assert_eq!((e.0 - QExponent::quarter(k as i64).0).rem_euclid(DENOM), 0);
            }
        }
        let s1 = c1_series(1, QExponent::integer(2)).unwrap();
        assert_eq!(s1.coeff(QExponent::quarter(1)).unwrap(), BigInt::from(-16));
        let s0 = c1_series(0, QExponent::integer(2)).unwrap();
        assert_eq!(s0.coeff(QExponent(0)).unwrap(), BigInt::from(-8));
    }

    #[test]
    fn coefficient_lookups() {
        let t = CoefficientTable::new(2, QExponent::integer(4)).unwrap();
        assert_eq!(t.coeff_c0(QExponent::integer(-2)).unwrap(), BigInt::zero());
        assert_eq!(t.coeff_c1(QExponent::quarter(2)).unwrap(), BigInt::from(-32));
        assert_eq!(t.coeff_c1(QExponent::quarter(1)).unwrap(), BigInt::zero());
        assert!(t.coeff_c0(QExponent::integer(4)).is_err());
        let t0 = CoefficientTable::new(0, QExponent::integer(2)).unwrap();
        assert_eq!(t0.coeff_c0(QExponent::integer(-1)).unwrap(), BigInt::one());
        assert_eq!(t0.coeff_c1(QExponent::quarter(2)).unwrap(), BigInt::zero());
    }

    #[test]
    fn cache_grows() {
        let cache = CoefficientCache::default();
        let a = cache.coeff_c0(3, QExponent::integer(5)).unwrap();
        let b = cache.coeff_c0(3, QExponent::integer(40)).unwrap();
        let t = CoefficientTable::new(3, QExponent::integer(41)).unwrap();
        assert_eq!(a, t.coeff_c0(QExponent::integer(5)).unwrap());
        assert_eq!(b, t.coeff_c0(QExponent::integer(40)).unwrap());
    }

    #[test]
    fn csv_header_and_rows() {
        let t = CoefficientTable::new(1, QExponent::integer(1)).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("l_times_4,c0,c1"));
        assert_eq!(lines.next(), Some("-4,1,0"));
        assert_eq!(csv.lines().count(), 1 + 8);
        assert!(csv.contains("\n1,0,-16\n"));
    }

    #[test]
    fn exponent_display() {
        assert_eq!(QExponent(6).to_string(), "1/4");
        assert_eq!(QExponent(-24).to_string(), "-1");
        assert_eq!(QExponent::quarter(3).as_quarter(), Some(3));
    }
}
