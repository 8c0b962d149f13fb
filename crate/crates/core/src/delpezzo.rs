//! Lattice models of Del Pezzo surfaces.
//!
//! Blow-up models use the basis `(H, E_1, …, E_{9-k})` with Gram
//! `diag(1, -1, …, -1)`; the quadric `Σ₀ = P¹×P¹` uses the rulings `(e, f)`
//! with Gram `U`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{lambda_k, IntMatrix, Lattice, LatticeEmbedding, LatticeError, LatticeVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DelPezzoError {
    #[error("inconsistent variant {variant} for degree {degree}")]
    InconsistentVariant { degree: u32, variant: Variant },
    #[error("y not in Kähler cone")]
    NotKaehler,
    #[error("matrix is not an isometry of the Picard lattice")]
    NotAnIsometry,
    #[error("isometry does not fix c1")]
    MovesC1,
    #[error("isometry does not preserve the effective generators")]
    DoesNotPreserveEff,
    #[error("no blow-down pair for degree {0} ({1})")]
    NoChainPair(u32, Variant),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Generic,
    Sigma0,
    Sigma1,
    P2,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::Generic => "generic",
            Variant::Sigma0 => "Sigma0",
            Variant::Sigma1 => "Sigma1",
            Variant::P2 => "P2",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "generic" | "generic-blowup" | "blowup" => Ok(Variant::Generic),
            "sigma0" | "s0" => Ok(Variant::Sigma0),
            "sigma1" | "s1" => Ok(Variant::Sigma1),
            "p2" => Ok(Variant::P2),
            _ => Err(format!("unknown variant '{s}'")),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DelPezzoModel {
    pub degree: u32,
    pub variant: Variant,
    pub picard: Lattice,
    pub c1: LatticeVector,
    pub minus_one_classes: Vec<LatticeVector>,
    pub eff_generators: Vec<LatticeVector>,
    #[serde(skip)]
    cone_cache: Mutex<HashMap<Vec<i64>, bool>>,
}

impl Clone for DelPezzoModel {
    fn clone(&self) -> Self {
        DelPezzoModel {
            degree: self.degree,
            variant: self.variant,
            picard: self.picard.clone(),
            c1: self.c1.clone(),
            minus_one_classes: self.minus_one_classes.clone(),
            eff_generators: self.eff_generators.clone(),
            cone_cache: Mutex::new(HashMap::new()),
        }
    }
}

/// Builds the model of the given degree.  `Generic` at degree 8 or 9 is
/// normalised to `Sigma1` or `P2`.
pub fn model(degree: u32, variant: Variant) -> Result<DelPezzoModel, DelPezzoError> {
    let bad = Err(DelPezzoError::InconsistentVariant { degree, variant });
    let variant = match (degree, variant) {
        (1..=7, Variant::Generic) => Variant::Generic,
        (8, Variant::Generic | Variant::Sigma1) => Variant::Sigma1,
        (8, Variant::Sigma0) => Variant::Sigma0,
        (9, Variant::Generic | Variant::P2) => Variant::P2,
        _ => return bad,
    };
    let (picard, c1) = if variant == Variant::Sigma0 {
        (Lattice::u().named("L_8(even)"), LatticeVector(vec![2, 2]))
    } else {
        let n = 9 - degree as usize;
        let mut c = vec![-1i64; n + 1];
        c[0] = 3;
        (Lattice::diag(1, n).named(format!("L_{degree}")), LatticeVector(c))
    };
    let minus_one = minus_one_classes_lorentzian(&picard, &c1)?;
    let rank = picard.rank();
    let eff = match variant {
        Variant::Generic => minus_one.clone(),
        Variant::Sigma1 => vec![LatticeVector(vec![0, 1]), LatticeVector(vec![1, -1])],
        Variant::Sigma0 => vec![LatticeVector::unit(rank, 0), LatticeVector::unit(rank, 1)],
        Variant::P2 => vec![LatticeVector(vec![1])],
    };
    assert!(!eff.is_empty(), "empty generator list");
    Ok(DelPezzoModel {
        degree,
        variant,
        picard,
        c1,
        minus_one_classes: minus_one,
        eff_generators: eff,
        cone_cache: Mutex::new(HashMap::new()),
    })
}

/// `α² = -1`, `⟨α, c1⟩ = 1` by Fincke–Pohst against `c1`.
fn minus_one_classes_lorentzian(picard: &Lattice, c1: &LatticeVector) -> Result<Vec<LatticeVector>, LatticeError> {
    let all = picard.enumerate_norm_vectors(-1, c1, Rational64::from_integer(1))?;
    Ok(all
        .into_iter()
        .filter(|a| picard.inner_unchecked(&a.0, &c1.0) == 1)
        .collect())
}

/// Second enumerator for the (−1)-classes, sharing no code with the
/// Fincke–Pohst path: in blow-up coordinates `α = aH - Σ b_i E_i`, the
/// conditions read `Σ b_i² = a² + 1`, `Σ b_i = 3a - 1`, and Cauchy–Schwarz
/// bounds `a`.  On `U` the classes are found by direct search.
pub fn minus_one_classes_by_squares(m: &DelPezzoModel) -> Vec<LatticeVector> {
    let mut out = Vec::new();
    if m.variant == Variant::Sigma0 {
        // ⟨(a,b),(a,b)⟩ = 2ab is even, so the scan is empty; kept explicit.
        for a in -8i64..=8 {
            for b in -8i64..=8 {
                if 2 * a * b == -1 && 2 * a + 2 * b == 1 {
                    out.push(LatticeVector(vec![a, b]));
                }
            }
        }
        return out;
    }
    let n = 9 - m.degree as i64;
    if n == 0 {
        return out;
    }
    // (3a-1)² ≤ n(a²+1)  ⇔  (9-n)a² - 6a + 1 - n ≤ 0
    let feasible = |a: i64| (9 - n) * a * a - 6 * a + 1 - n <= 0;
    let mut a = 0i64;
    while feasible(a - 1) {
        a -= 1;
    }
    let a_lo = a;
    let mut a = 0i64;
    while feasible(a + 1) {
        a += 1;
    }
    let a_hi = a;
    for a in a_lo..=a_hi {
        if !feasible(a) {
            continue;
        }
        let mut b = vec![0i64; n as usize];
        split_squares(0, a * a + 1, 3 * a - 1, &mut b, &mut |bs| {
            let mut v = vec![a];
            v.extend(bs.iter().map(|x| -x));
            out.push(LatticeVector(v));
        });
    }
    out.sort();
    out
}

fn split_squares(i: usize, sq: i64, sum: i64, b: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
    let n = b.len();
    if i == n {
        if sq == 0 && sum == 0 {
            emit(b);
        }
        return;
    }
    let left = (n - i) as i64;
    // remaining needs sum² ≤ left·sq
    if sq < 0 || sum * sum > left * sq {
        return;
    }
    let r = (sq as f64).sqrt() as i64 + 1;
    for x in -r..=r {
        if x * x > sq {
            continue;
        }
        b[i] = x;
        split_squares(i + 1, sq - x * x, sum - x, b, emit);
    }
    b[i] = 0;
}

impl DelPezzoModel {
    pub fn rank(&self) -> usize {
        self.picard.rank()
    }

    pub fn is_even(&self) -> bool {
        self.variant == Variant::Sigma0
    }

    /// `H` for blow-up models.
    pub fn hyperplane(&self) -> Option<LatticeVector> {
        (self.variant != Variant::Sigma0).then(|| LatticeVector::unit(self.rank(), 0))
    }

    /// `E_i` (1-based) for blow-up models.
    pub fn exceptional(&self, i: usize) -> Option<LatticeVector> {
        (self.variant != Variant::Sigma0 && i >= 1 && i < self.rank()).then(|| LatticeVector::unit(self.rank(), i))
    }

    pub fn mukai(&self) -> MukaiLattice {
        MukaiLattice {
            degree: self.degree,
            even: self.is_even(),
            full: lambda_k(self.degree, self.is_even()),
        }
    }

    pub fn pair(&self, a: &LatticeVector, b: &LatticeVector) -> i64 {
        self.picard.inner_unchecked(&a.0, &b.0)
    }

    pub fn kaehler_cone_contains(&self, y: &[BigRational]) -> bool {
        if y.len() != self.rank() {
            return false;
        }
        if !self.picard.inner_rr(y, y).is_positive() {
            return false;
        }
        self.eff_generators
            .iter()
            .all(|g| self.picard.inner_rational(&g.0, y).is_positive())
    }

    /// Exact membership of `α` in the rational cone spanned by the
    /// effective generators.
    pub fn in_effective_cone(&self, alpha: &LatticeVector) -> bool {
        if alpha.is_zero() {
            return true;
        }
        if let Some(&r) = self.cone_cache.lock().expect("cache").get(&alpha.0) {
            return r;
        }
        let r = self.cone_membership_uncached(alpha);
        self.cone_cache.lock().expect("cache").insert(alpha.0.clone(), r);
        r
    }

    fn cone_membership_uncached(&self, alpha: &LatticeVector) -> bool {
        // The closed positive cone on the side of c1 lies in the closure of
        // Eff, which is polyhedral and hence closed.
        if self.pair(alpha, &self.c1) <= 0 {
            return false;
        }
        // α = g + (α - g): split off a generator meeting α negatively and
        // repeat (the c1-degree drops each time).  Reaching a generator or the
        // positive cone gives an explicit decomposition; otherwise the LP
        // decides.
        let mut a = alpha.clone();
        while self.pair(&a, &self.c1) > 0 {
            if self.pair(&a, &a) >= 0 || self.eff_generators.contains(&a) {
                return true;
            }
            match self.eff_generators.iter().find(|g| self.pair(&a, g) < 0) {
                Some(g) => a = a.sub(g),
                None => break,
            }
        }
        in_rational_cone(&self.eff_generators, &alpha.0)
    }

    /// Membership by linear programming only, for cross-checks.
    pub fn in_effective_cone_lp(&self, alpha: &LatticeVector) -> bool {
        alpha.is_zero() || in_rational_cone(&self.eff_generators, &alpha.0)
    }

    /// Smallest pairing of an effective generator with `y`.
    pub fn min_generator_pairing(&self, y: &[BigRational]) -> BigRational {
        self.eff_generators
            .iter()
            .map(|g| self.picard.inner_rational(&g.0, y))
            .min()
            .expect("nonempty")
    }

    /// Largest pairing of an effective generator with `y`.
    pub fn max_generator_pairing(&self, y: &[BigRational]) -> BigRational {
        self.eff_generators
            .iter()
            .map(|g| self.picard.inner_rational(&g.0, y))
            .max()
            .expect("nonempty")
    }

    /// All nonzero lattice points of `Eff` with `⟨α, y⟩ ≤ cap`, sorted.
    pub fn enumerate_effective(&self, y: &[BigRational], cap: &BigRational) -> Result<Vec<LatticeVector>, DelPezzoError> {
        if !self.kaehler_cone_contains(y) {
            return Err(DelPezzoError::NotKaehler);
        }
        // α = Σ λ_i g_i with Σ λ_i ≤ cap / m, so α² ≥ -(cap/m)²·M where M
        // bounds the negative generator pairings.
        let m = self.min_generator_pairing(y);
        let mut worst = 0i64;
        for g in &self.eff_generators {
            for h in &self.eff_generators {
                worst = worst.max(-self.pair(g, h));
            }
        }
        let lam = cap / &m;
        let min_norm_q = -(&lam * &lam) * BigInt::from(worst);
        let min_norm = min_norm_q.floor().to_integer();
        let min_norm = i64::try_from(min_norm).map_err(|_| LatticeError::Overflow)?;
        let cands = self.enumerate_min_norm_rational(min_norm, y, cap)?;
        Ok(cands.into_iter().filter(|a| self.in_effective_cone(a)).collect())
    }

    /// Every `α` with `α² ≥ min_norm` and `0 < ⟨α, y⟩ ≤ cap` for rational `y`.
    pub fn enumerate_min_norm_rational(
        &self,
        min_norm: i64,
        y: &[BigRational],
        cap: &BigRational,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        let (yi, den) = integral_multiple(y);
        let capd = cap * BigInt::from(den);
        let capr = to_rational64(&capd).ok_or(LatticeError::Overflow)?;
        self.picard
            .enumerate_min_norm_vectors(min_norm, &LatticeVector(yi), capr)
    }
}

/// Writes a rational vector as `Y / d` with `Y` integral.
pub fn integral_multiple(y: &[BigRational]) -> (Vec<i64>, i64) {
    let mut d = BigInt::from(1);
    for c in y {
        d = num_integer::Integer::lcm(&d, c.denom());
    }
    let yi = y
        .iter()
        .map(|c| {
            let v = c * &d;
            i64::try_from(v.to_integer()).expect("tube point coordinates fit in i64")
        })
        .collect();
    (yi, i64::try_from(d).expect("denominator fits in i64"))
}

fn to_rational64(x: &BigRational) -> Option<Rational64> {
    let n = i64::try_from(x.numer().clone()).ok()?;
    let d = i64::try_from(x.denom().clone()).ok()?;
    Some(Rational64::new(n, d))
}

/// Feasibility of `Σ λ_j g_j = target`, `λ ≥ 0`, by a phase-one simplex over
/// exact rationals with Bland's rule.
pub fn in_rational_cone(generators: &[LatticeVector], target: &[i64]) -> bool {
    let n = target.len();
    let m = generators.len();
    if m == 0 {
        return target.iter().all(|&x| x == 0);
    }
    // tableau rows: [A | I | b], columns 0..m are λ, m..m+n artificial
    let width = m + n + 1;
    let mut t: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let sign = if target[i] < 0 { -1 } else { 1 };
            let mut row = vec![BigRational::zero(); width];
            for (j, g) in generators.iter().enumerate() {
                row[j] = BigRational::from_integer((sign * g.0[i]).into());
            }
            row[m + i] = BigRational::from_integer(1.into());
            row[width - 1] = BigRational::from_integer((sign * target[i]).into());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (m..m + n).collect();
    // objective: minimize Σ artificial = Σ_i (b_i - A_i λ); reduced costs
    let mut obj = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..width {
            if j < m || j == width - 1 {
                obj[j] -= &row[j];
            }
        }
    }
    loop {
        // Bland: smallest index with negative reduced cost
        let enter = (0..m + n).find(|&j| obj[j].is_negative());
        let Some(e) = enter else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..n {
            if t[i][e].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let piv = t[r][e].clone();
        for v in t[r].iter_mut() {
            *v /= &piv;
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[e].is_zero() {
                let f = row[e].clone();
                for j in 0..width {
                    if !prow[j].is_zero() {
                        row[j] -= &f * &prow[j];
                    }
                }
            }
        }
        if !obj[e].is_zero() {
            let f = obj[e].clone();
            for j in 0..width {
                if !prow[j].is_zero() {
                    obj[j] -= &f * &prow[j];
                }
            }
        }
        basis[r] = e;
    }
    obj[width - 1].is_zero()
}

/// `Λ_k = U(-1) ⊕ picard`, coordinates `(u_0, u_1, picard…)`.
#[derive(Debug, Clone, Serialize)]
pub struct MukaiLattice {
    pub degree: u32,
    pub even: bool,
    pub full: Lattice,
}

impl MukaiLattice {
    /// Complex bilinear Mukai pairing.
    pub fn pair_complex(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let g = self.full.gram();
        let mut s = Complex64::zero();
        for i in 0..a.len() {
            for j in 0..b.len() {
                if g[i][j] != 0 {
                    s += a[i] * b[j] * g[i][j] as f64;
                }
            }
        }
        s
    }
}

/// The image `(1, b²/2, b)` of `b ∈ picard ⊗ C` in the Mukai lattice; it is
/// isotropic for the bilinear pairing.
pub fn mukai_point(m: &DelPezzoModel, b: &[Complex64]) -> Vec<Complex64> {
    let g = m.picard.gram();
    let mut bb = Complex64::zero();
    for i in 0..b.len() {
        for j in 0..b.len() {
            if g[i][j] != 0 {
                bb += b[i] * b[j] * g[i][j] as f64;
            }
        }
    }
    let mut w = vec![Complex64::new(1.0, 0.0), bb / 2.0];
    w.extend_from_slice(b);
    w
}

/// Column matrix of the isometry permuting the exceptional classes:
/// `E_i ↦ E_{perm[i-1]}`.
pub fn permutation_isometry(m: &DelPezzoModel, perm: &[usize]) -> IntMatrix {
    let r = m.rank();
    let mut mat = vec![vec![0i64; r]; r];
    mat[0][0] = 1;
    for (i, &p) in perm.iter().enumerate() {
        mat[p][i + 1] = 1;
    }
    mat
}

/// The quadratic transformation centred at `E_i, E_j, E_l` (1-based):
/// `H ↦ 2H - E_i - E_j - E_l`, `E_i ↦ H - E_j - E_l`, and so on.
pub fn cremona_isometry(m: &DelPezzoModel, i: usize, j: usize, l: usize) -> IntMatrix {
    let r = m.rank();
    let mut mat: IntMatrix = (0..r).map(|a| (0..r).map(|b| (a == b) as i64).collect()).collect();
    let idx = [i, j, l];
    // column 0: 2H - E_i - E_j - E_l
    mat[0][0] = 2;
    for &a in &idx {
        mat[a][0] = -1;
    }
    for &a in &idx {
        for row in mat.iter_mut() {
            row[a] = 0;
        }
        mat[0][a] = 1;
        for &b in &idx {
            if b != a {
                mat[b][a] = -1;
            }
        }
    }
    mat
}

pub fn apply_matrix(mat: &IntMatrix, v: &[i64]) -> Vec<i64> {
    mat.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn apply_matrix_rational(mat: &IntMatrix, v: &[BigRational]) -> Vec<BigRational> {
    mat.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, _)| **a != 0)
                .fold(BigRational::zero(), |s, (a, b)| s + b * BigInt::from(*a))
        })
        .collect()
}

/// Checks that `mat` is an isometry fixing `c1` and permuting the effective
/// generators.
pub fn check_symmetry(m: &DelPezzoModel, mat: &IntMatrix) -> Result<(), DelPezzoError> {
    let r = m.rank();
    if mat.len() != r || mat.iter().any(|row| row.len() != r) {
        return Err(DelPezzoError::NotAnIsometry);
    }
    let cols: Vec<Vec<i64>> = (0..r).map(|j| mat.iter().map(|row| row[j]).collect()).collect();
    for a in 0..r {
        for b in 0..r {
            if m.picard.inner_unchecked(&cols[a], &cols[b]) != m.picard.gram()[a][b] {
                return Err(DelPezzoError::NotAnIsometry);
            }
        }
    }
    if apply_matrix(mat, &m.c1.0) != m.c1.0 {
        return Err(DelPezzoError::MovesC1);
    }
    let mut gens: Vec<Vec<i64>> = m.eff_generators.iter().map(|g| g.0.clone()).collect();
    let mut imgs: Vec<Vec<i64>> = gens.iter().map(|g| apply_matrix(mat, g)).collect();
    gens.sort();
    imgs.sort();
    if gens != imgs {
        return Err(DelPezzoError::DoesNotPreserveEff);
    }
    Ok(())
}

/// A blow-up `Ṽ → V` seen on Picard lattices: `ι : Pic V ≅ [E]^⊥`.
#[derive(Debug, Clone)]
pub struct BlowDown {
    pub small: DelPezzoModel,
    pub big: DelPezzoModel,
    pub exceptional: LatticeVector,
    pub embedding: LatticeEmbedding,
}

impl BlowDown {
    pub fn lift(&self, a: &LatticeVector) -> LatticeVector {
        self.embedding.apply(a)
    }

    pub fn lift_rational(&self, a: &[BigRational]) -> Vec<BigRational> {
        apply_matrix_rational(&self.embedding.matrix, a)
    }
}

/// The blow-up pair with the given smaller-Picard-rank end.
pub fn blow_down(small_degree: u32, small_variant: Variant) -> Result<BlowDown, DelPezzoError> {
    let small = model(small_degree, small_variant)?;
    let err = Err(DelPezzoError::NoChainPair(small_degree, small.variant));
    let big = match small_degree {
        2..=8 => model(small_degree - 1, Variant::Generic)?,
        9 => model(8, Variant::Sigma1)?,
        _ => return err,
    };
    let rb = big.rank();
    let (e, images) = match small.variant {
        Variant::Sigma0 => {
            // e = H - E1, f = H - E2, contracted curve H - E1 - E2
            (
                LatticeVector(vec![1, -1, -1]),
                vec![LatticeVector(vec![1, -1, 0]), LatticeVector(vec![1, 0, -1])],
            )
        }
        _ => {
            let e = LatticeVector::unit(rb, rb - 1);
            let imgs = (0..small.rank()).map(|i| LatticeVector::unit(rb, i)).collect();
            (e, imgs)
        }
    };
    let embedding = LatticeEmbedding::from_images(small.picard.clone(), big.picard.clone(), &images)?;
    let bd = BlowDown {
        small,
        big,
        exceptional: e,
        embedding,
    };
    // c1(Ṽ) = ι c1(V) - E, and ι lands in [E]^⊥
    let lifted = bd.lift(&bd.small.c1);
    debug_assert_eq!(lifted.sub(&bd.exceptional), bd.big.c1);
    debug_assert!(bd.embedding.images().iter().all(|v| bd.big.pair(v, &bd.exceptional) == 0));
    Ok(bd)
}

/// All adjacent pairs of the degree chain, small end first.
pub fn chain_pairs() -> Vec<(u32, Variant)> {
    let mut v = vec![(9, Variant::P2), (8, Variant::Sigma1), (8, Variant::Sigma0)];
    for d in (2..=7).rev() {
        v.push((d, Variant::Generic));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn model_basics() {
        let p2 = model(9, Variant::P2).unwrap();
        assert_eq!(p2.pair(&p2.c1, &p2.c1), 9);
        let s0 = model(8, Variant::Sigma0).unwrap();
        assert_eq!(s0.c1, LatticeVector(vec![2, 2]));
        assert_eq!(s0.pair(&s0.c1, &s0.c1), 8);
        let d6 = model(6, Variant::Generic).unwrap();
        assert_eq!(d6.pair(&d6.c1, &d6.c1), 6);
        assert!(model(5, Variant::Sigma0).is_err());
        assert!(model(9, Variant::Sigma1).is_err());
        assert_eq!(model(8, Variant::Generic).unwrap().variant, Variant::Sigma1);
    }

    #[test]
    fn minus_one_counts_two_ways() {
        let want = [(1, 240), (2, 56), (3, 27), (4, 16), (5, 10), (6, 6), (7, 3)];
        for (d, n) in want {
            let m = model(d, Variant::Generic).unwrap();
            assert_eq!(m.minus_one_classes.len(), n, "degree {d}");
            assert_eq!(minus_one_classes_by_squares(&m), m.minus_one_classes);
        }
        let s1 = model(8, Variant::Sigma1).unwrap();
        assert_eq!(s1.minus_one_classes, vec![LatticeVector(vec![0, 1])]);
        assert!(model(8, Variant::Sigma0).unwrap().minus_one_classes.is_empty());
        assert!(model(9, Variant::P2).unwrap().minus_one_classes.is_empty());
    }

    #[test]
    fn kaehler_and_cone_examples() {
        let s1 = model(8, Variant::Sigma1).unwrap();
        assert!(s1.kaehler_cone_contains(&[q(2), q(-1)]));
        assert!(!s1.kaehler_cone_contains(&[q(1), q(1)]));
        let p2 = model(9, Variant::P2).unwrap();
        assert!(p2.in_effective_cone(&LatticeVector(vec![1])));
        assert!(!p2.in_effective_cone(&LatticeVector(vec![-1])));
        let d6 = model(6, Variant::Generic).unwrap();
        assert!(d6.in_effective_cone_lp(&d6.c1));
        assert!(!d6.in_effective_cone_lp(&d6.c1.neg()));
    }

    #[test]
    fn effective_enumeration_examples() {
        let p2 = model(9, Variant::P2).unwrap();
        let got = p2.enumerate_effective(&[q(1)], &q(2)).unwrap();
        assert_eq!(got, vec![LatticeVector(vec![1]), LatticeVector(vec![2])]);
        let s0 = model(8, Variant::Sigma0).unwrap();
        let got = s0.enumerate_effective(&[q(1), q(1)], &q(1)).unwrap();
        assert_eq!(got, vec![LatticeVector(vec![0, 1]), LatticeVector(vec![1, 0])]);
        let d6 = model(6, Variant::Generic).unwrap();
        let y: Vec<BigRational> = d6.c1.0.iter().map(|&c| q(c)).collect();
        assert!(d6.enumerate_effective(&y, &BigRational::new(1.into(), 2.into())).unwrap().is_empty());
        assert!(matches!(
            s0.enumerate_effective(&[q(1), q(-1)], &q(1)),
            Err(DelPezzoError::NotKaehler)
        ));
    }

    #[test]
    fn mukai_isotropy() {
        let m = model(6, Variant::Generic).unwrap();
        let b: Vec<Complex64> = (0..4).map(|i| Complex64::new(0.3 * i as f64 - 0.2, 0.7 - 0.1 * i as f64)).collect();
        let w = mukai_point(&m, &b);
        assert!(m.mukai().pair_complex(&w, &w).norm() < 1e-12);
        let w0 = mukai_point(&m, &[Complex64::zero(); 4]);
        assert_eq!(w0[0], Complex64::new(1.0, 0.0));
        assert!(w0[1..].iter().all(|c| c.norm() == 0.0));
        let mk = m.mukai();
        let s = mk.full.signature();
        assert_eq!((s.positive, s.negative), (2, 4));
    }

    #[test]
    fn symmetries() {
        let d6 = model(6, Variant::Generic).unwrap();
        let cr = cremona_isometry(&d6, 1, 2, 3);
        check_symmetry(&d6, &cr).unwrap();
        let d7 = model(7, Variant::Generic).unwrap();
        check_symmetry(&d7, &permutation_isometry(&d7, &[2, 1])).unwrap();
        // Cremona needs three points; on degree 7 it is not a symmetry of Eff
        let mut bad = permutation_isometry(&d7, &[1, 2]);
        bad[0][0] = -1;
        assert!(check_symmetry(&d7, &bad).is_err());
    }

    #[test]
    fn blow_downs_are_consistent() {
        for (d, v) in chain_pairs() {
            let bd = blow_down(d, v).unwrap();
            assert_eq!(bd.big.pair(&bd.exceptional, &bd.exceptional), -1);
            assert_eq!(bd.lift(&bd.small.c1).sub(&bd.exceptional), bd.big.c1);
            assert!(bd.embedding.verify());
            assert!(bd.embedding.is_primitive().unwrap());
        }
    }
}
