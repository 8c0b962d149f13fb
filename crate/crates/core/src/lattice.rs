//! Integral lattices given by exact Gram matrices.
//!
//! Everything here is exact: determinants use fraction-free elimination over
//! `BigInt`, signatures use symmetric Gaussian reduction over the rationals,
//! and complements are integer kernels computed from a column Hermite normal
//! form.  The only floating point appears inside the Fincke–Pohst search,
//! where it merely bounds the search box; every returned vector is checked
//! exactly.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("Gram matrix is not square")]
    NotSquare,
    #[error("Gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("rescale factor must be nonzero")]
    ZeroScale,
    #[error("functional is not in the positive cone (norm {0})")]
    FunctionalNotPositive(i64),
    #[error("lattice is not Lorentzian: signature ({0}, {1})")]
    NotLorentzian(usize, usize),
    #[error("matrix does not define an isometric embedding")]
    NotAnEmbedding,
    #[error("degenerate complement")]
    DegenerateComplement,
    #[error("no embedding found within coefficient bound {0}")]
    NotFound(i64),
    #[error("integer overflow in exact lattice arithmetic")]
    Overflow,
}

/// A nondegenerate integral symmetric bilinear form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub name: String,
    gram: IntMatrix,
}

/// Integer coordinates in a lattice basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: i64) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> LatticeVector {
        self.scale(-1)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Signed cardinalities of a real quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Lattice {
    pub fn from_gram(name: impl Into<String>, gram: IntMatrix) -> Result<Self, LatticeError> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotSquare);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }
        if determinant(&gram).is_zero() {
            return Err(LatticeError::Degenerate);
        }
        Ok(Lattice {
            name: name.into(),
            gram,
        })
    }

    /// The hyperbolic plane `U = [[0,1],[1,0]]`.
    pub fn u() -> Self {
        Lattice::from_gram("U", vec![vec![0, 1], vec![1, 0]]).expect("valid")
    }

    /// `U(-1)`.
    pub fn u_minus() -> Self {
        Lattice::u().rescale(-1).expect("valid").named("U(-1)")
    }

    /// The negated `E8` Cartan matrix (Bourbaki numbering, node 2 on node 4).
    pub fn e8_minus() -> Self {
        let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = -2;
        }
        for &(a, b) in &edges {
            g[a][b] = 1;
            g[b][a] = 1;
        }
        Lattice::from_gram("E8(-1)", g).expect("valid")
    }

    /// `diag(+1^p, -1^q)`.
    pub fn diag(p: usize, q: usize) -> Self {
        let n = p + q;
        let mut g = vec![vec![0i64; n]; n];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = if i < p { 1 } else { -1 };
        }
        Lattice::from_gram(format!("I({p},{q})"), g).expect("valid")
    }

    /// `diag(d_1, …, d_n)`.
    pub fn diagonal(entries: &[i64]) -> Result<Self, LatticeError> {
        let n = entries.len();
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = entries[i];
        }
        Lattice::from_gram(format!("diag{entries:?}"), g)
    }

    /// `U³ ⊕ E8(-1)²`.
    pub fn k3() -> Self {
        let u = Lattice::u();
        let e = Lattice::e8_minus();
        u.direct_sum(&u)
            .direct_sum(&u)
            .direct_sum(&e)
            .direct_sum(&e)
            .named("L_K3")
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rescale(&self, n: i64) -> Result<Lattice, LatticeError> {
        if n == 0 {
            return Err(LatticeError::ZeroScale);
        }
        let gram = self
            .gram
            .iter()
            .map(|r| r.iter().map(|x| x * n).collect())
            .collect();
        Ok(Lattice {
            name: format!("{}({n})", self.name),
            gram,
        })
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let (a, b) = (self.rank(), other.rank());
        let mut g = vec![vec![0i64; a + b]; a + b];
        for i in 0..a {
            g[i][..a].copy_from_slice(&self.gram[i]);
        }
        for i in 0..b {
            g[a + i][a..].copy_from_slice(&other.gram[i]);
        }
        Lattice {
            name: format!("{}+{}", self.name, other.name),
            gram: g,
        }
    }

    fn check_dim(&self, v: &LatticeVector) -> Result<(), LatticeError> {
        if v.rank() != self.rank() {
            Err(LatticeError::DimensionMismatch(v.rank(), self.rank()))
        } else {
            Ok(())
        }
    }

    pub fn inner(&self, v: &LatticeVector, w: &LatticeVector) -> Result<i64, LatticeError> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(self.inner_unchecked(v.coords(), w.coords()))
    }

    pub(crate) fn inner_unchecked(&self, v: &[i64], w: &[i64]) -> i64 {
        let mut s = 0i64;
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            let row = &self.gram[i];
            let mut t = 0i64;
            for (j, &wj) in w.iter().enumerate() {
                t += row[j] * wj;
            }
            s += vi * t;
        }
        s
    }

    pub fn norm(&self, v: &LatticeVector) -> Result<i64, LatticeError> {
        self.inner(v, v)
    }

    /// `G v`, the pairing functional of `v` in coordinates.
    pub fn dual_coords(&self, v: &[i64]) -> Vec<i64> {
        self.gram
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Pairing of an integer vector with a rational vector.
    pub fn inner_rational(&self, v: &[i64], w: &[BigRational]) -> BigRational {
        let gv = self.dual_coords(v);
        gv.iter()
            .zip(w)
            .filter(|(a, _)| **a != 0)
            .map(|(a, b)| b * BigInt::from(*a))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    /// Pairing of two rational vectors.
    pub fn inner_rr(&self, v: &[BigRational], w: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, wj) in w.iter().enumerate() {
                let g = self.gram[i][j];
                if g != 0 && !wj.is_zero() {
                    s += vi * wj * BigInt::from(g);
                }
            }
        }
        s
    }

    pub fn discriminant(&self) -> BigInt {
        determinant(&self.gram)
    }

    /// Signature by exact symmetric Gaussian reduction.
    pub fn signature(&self) -> Signature {
        signature_of(&self.gram)
    }

    /// Every `v` with `v² = target_norm` and `0 < ⟨v, f⟩ ≤ cap`, sorted.
    ///
    /// In signature `(1, r-1)` with `f² > 0`, the form
    /// `Q(v) = 2⟨v,f⟩²/f² - v²` is positive definite, and on the requested
    /// set `Q(v) ≤ 2 cap²/f² - target_norm`; a Fincke–Pohst search on `Q`
    /// is therefore complete.
    pub fn enumerate_norm_vectors(
        &self,
        target_norm: i64,
        functional: &LatticeVector,
        cap: Rational64,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        self.enumerate_pairing_window(functional, cap, |n| n == target_norm, target_norm, false)
    }

    /// Every `v` with `v² = target_norm` and `|⟨v, f⟩| ≤ cap`, sorted.
    pub fn enumerate_norm_vectors_symmetric(
        &self,
        target_norm: i64,
        functional: &LatticeVector,
        cap: Rational64,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        self.enumerate_pairing_window(functional, cap, |n| n == target_norm, target_norm, true)
    }

    /// Every `v` with `v² ≥ min_norm` and `0 < ⟨v, f⟩ ≤ cap`, sorted.
    pub fn enumerate_min_norm_vectors(
        &self,
        min_norm: i64,
        functional: &LatticeVector,
        cap: Rational64,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        self.enumerate_pairing_window(functional, cap, |n| n >= min_norm, min_norm, false)
    }

    fn enumerate_pairing_window(
        &self,
        functional: &LatticeVector,
        cap: Rational64,
        accept_norm: impl Fn(i64) -> bool,
        min_norm: i64,
        symmetric: bool,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        self.check_dim(functional)?;
        let sig = self.signature();
        if sig.positive != 1 {
            return Err(LatticeError::NotLorentzian(sig.positive, sig.negative));
        }
        let ff = self.norm(functional)?;
        if ff <= 0 {
            return Err(LatticeError::FunctionalNotPositive(ff));
        }
        let n = self.rank();
        let gf = self.dual_coords(functional.coords());
        let capf = *cap.numer() as f64 / *cap.denom() as f64;
        if capf < 0.0 || (capf == 0.0 && !symmetric) {
            return Ok(Vec::new());
        }
        let smax = cap.numer().div_euclid(*cap.denom());
        // Slice by s = ⟨v,f⟩: v = (s/g) p + K x with K a basis of f^⊥ ∩ L.
        let (h, u, _) = column_echelon(&[gf.clone()], n)?;
        let g = h[0][0];
        let sign = if g < 0 { -1 } else { 1 };
        let g = (g * sign as i128) as i64;
        let p: Vec<i64> = (0..n)
            .map(|i| i64::try_from(u[i][0] * sign as i128).map_err(|_| LatticeError::Overflow))
            .collect::<Result<_, _>>()?;
        let kernel: Vec<Vec<i64>> = (1..n)
            .map(|c| (0..n).map(|i| i64::try_from(u[i][c]).map_err(|_| LatticeError::Overflow)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let kernel = lll_reduce_columns(kernel);
        let r = kernel.len();
        let gk: Vec<Vec<i64>> = kernel.iter().map(|k| self.dual_coords(k)).collect();
        // N = -KᵀGK, positive definite on f^⊥.
        let nform: Vec<Vec<f64>> = (0..r)
            .map(|i| (0..r).map(|j| -(dot_i64(&gk[i], &kernel[j]) as f64)).collect())
            .collect();
        let mut out = Vec::new();
        let lo = if symmetric { -smax } else { 1 };
        for s in lo..=smax {
            if s % g != 0 {
                continue;
            }
            let t = s / g;
            let mut v0: Vec<i64> = p.iter().map(|&x| x * t).collect();
            // Move v0 next to the f-axis so the center is small.
            for _ in 0..2 {
                let b: Vec<f64> = gk.iter().map(|row| dot_i64(row, &v0) as f64).collect();
                let c = solve_spd(&nform, &b);
                for (ci, k) in c.iter().zip(&kernel) {
                    let r = ci.round() as i64;
                    if r != 0 {
                        for (vj, kj) in v0.iter_mut().zip(k) {
                            *vj += r * kj;
                        }
                    }
                }
            }
            let b: Vec<f64> = gk.iter().map(|row| dot_i64(row, &v0) as f64).collect();
            let c = solve_spd(&nform, &b);
            // On the slice, (x-c)ᵀN(x-c) = s²/f² - v² exactly.
            let bound = (s as f64) * (s as f64) / ff as f64 - min_norm as f64;
            if bound < 0.0 {
                continue;
            }
            let mut v = vec![0i64; n];
            fincke_pohst_centered(&nform, &c, bound, |x| {
                v.copy_from_slice(&v0);
                for (xi, k) in x.iter().zip(&kernel) {
                    if *xi != 0 {
                        for (vj, kj) in v.iter_mut().zip(k) {
                            *vj += xi * kj;
                        }
                    }
                }
                let nv = self.inner_unchecked(&v, &v);
                if accept_norm(nv) {
                    out.push(LatticeVector(v.clone()));
                }
            });
        }
        out.sort();
        Ok(out)
    }
}

/// Enumerates every integer `x` with `xᵀ q x ≤ bound` (q positive definite).
#[cfg(test)]
pub(crate) fn fincke_pohst(q: &[Vec<f64>], bound: f64, visit: impl FnMut(&[i64])) {
    fincke_pohst_centered(q, &vec![0.0; q.len()], bound, visit)
}

fn dot_i64(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `a c = b` for symmetric positive definite `a` (Gaussian elimination).
fn solve_spd(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi);
        r
    }).collect();
    for i in 0..n {
        let piv = m[i][i];
        for k in i + 1..n {
            let f = m[k][i] / piv;
            if f != 0.0 {
                for j in i..=n {
                    m[k][j] -= f * m[i][j];
                }
            }
        }
    }
    let mut c = vec![0.0; n];
    for i in (0..n).rev() {
        let t: f64 = (i + 1..n).map(|j| m[i][j] * c[j]).sum();
        c[i] = (m[i][n] - t) / m[i][i];
    }
    c
}

/// Enumerates every integer `x` with `(x-c)ᵀ q (x-c) ≤ bound`.
pub(crate) fn fincke_pohst_centered(q: &[Vec<f64>], c: &[f64], bound: f64, mut visit: impl FnMut(&[i64])) {
    let n = q.len();
    if n == 0 {
        visit(&[]);
        return;
    }
    // q = Rᵀ R, written as q(x) = Σ_i d_i (x_i + Σ_{j>i} m_ij x_j)².
    let mut m = vec![vec![0.0f64; n]; n];
    let mut d = vec![0.0f64; n];
    let mut a: Vec<Vec<f64>> = q.to_vec();
    for i in 0..n {
        d[i] = a[i][i];
        assert!(d[i] > 0.0, "fincke_pohst: form not positive definite");
        for j in i + 1..n {
            m[i][j] = a[i][j] / d[i];
        }
        for j in i + 1..n {
            for k in j..n {
                a[j][k] -= m[i][j] * m[i][k] * d[i];
                a[k][j] = a[j][k];
            }
        }
    }
    let slack = 1e-9 * (1.0 + bound.abs());
    let mut x = vec![0i64; n];
    let mut partial = vec![0.0f64; n + 1];
    fn rec(
        i: usize,
        n: usize,
        m: &[Vec<f64>],
        d: &[f64],
        bound: f64,
        slack: f64,
        c: &[f64],
        x: &mut Vec<i64>,
        partial: &mut Vec<f64>,
        visit: &mut dyn FnMut(&[i64]),
    ) {
        let center: f64 = c[i] - (i + 1..n).map(|j| m[i][j] * (x[j] as f64 - c[j])).sum::<f64>();
        let rem = bound - partial[i + 1] + slack;
        if rem < 0.0 {
            return;
        }
        let r = (rem / d[i]).sqrt();
        let lo = (center - r).ceil() as i64;
        let hi = (center + r).floor() as i64;
        for v in lo..=hi {
            x[i] = v;
            let t = v as f64 - center;
            partial[i] = partial[i + 1] + d[i] * t * t;
            if partial[i] > bound + slack {
                continue;
            }
            if i == 0 {
                visit(x);
            } else {
                rec(i - 1, n, m, d, bound, slack, c, x, partial, visit);
            }
        }
        x[i] = 0;
    }
    rec(n - 1, n, &m, &d, bound, slack, c, &mut x, &mut partial, &mut visit);
}

/// Exact determinant by Bareiss fraction-free elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

pub(crate) fn signature_of(gram: &IntMatrix) -> Signature {
    let n = gram.len();
    let mut a: Vec<Vec<BigRational>> = gram
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let mut pos = 0;
    let mut neg = 0;
    let mut alive: Vec<usize> = (0..n).collect();
    while !alive.is_empty() {
        // pick a nonzero diagonal pivot, or create one from an off-diagonal
        let pivot = alive.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair = alive.iter().copied().find_map(|i| {
                    alive
                        .iter()
                        .copied()
                        .find(|&j| j != i && !a[i][j].is_zero())
                        .map(|j| (i, j))
                });
                match pair {
                    None => break, // remaining block is zero (degenerate)
                    Some((i, j)) => {
                        // e_i ← e_i + e_j : a_ii ← a_ii + 2a_ij + a_jj = 2a_ij
                        for k in 0..n {
                            let v = a[j][k].clone();
                            a[i][k] += v;
                        }
                        for k in 0..n {
                            let v = a[k][j].clone();
                            a[k][i] += v;
                        }
                        i
                    }
                }
            }
        };
        let d = a[p][p].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        alive.retain(|&i| i != p);
        for &i in &alive {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for &j in &alive {
                let v = &f * &a[p][j];
                a[i][j] -= v;
            }
        }
        for &i in &alive {
            a[i][p] = BigRational::zero();
            a[p][i] = BigRational::zero();
        }
    }
    Signature {
        positive: pos,
        negative: neg,
    }
}

/// Column Hermite reduction: returns `(h, u)` with `a · u = h`, `u`
/// unimodular, and `h` in column echelon form.  The number of nonzero
/// columns of `h` is the rank; the trailing columns of `u` span the integer
/// kernel of `a`.
pub(crate) fn column_echelon(a: &[Vec<i64>], ncols: usize) -> Result<(Vec<Vec<i128>>, Vec<Vec<i128>>, usize), LatticeError> {
    let rows = a.len();
    let mut h: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| (i == j) as i128).collect())
        .collect();
    let ck = |x: Option<i128>| x.ok_or(LatticeError::Overflow);
    // column operation helpers: col_j ← α col_j + β col_k, col_k ← γ col_j + δ col_k
    let mut pivot_col = 0usize;
    for r in 0..rows {
        if pivot_col >= ncols {
            break;
        }
        loop {
            // find nonzero entries in row r at columns ≥ pivot_col
            let nz: Vec<usize> = (pivot_col..ncols).filter(|&c| h[r][c] != 0).collect();
            if nz.is_empty() {
                break;
            }
            // move smallest |entry| to pivot_col
            let &best = nz.iter().min_by_key(|&&c| h[r][c].abs()).expect("nonempty");
            if best != pivot_col {
                for row in h.iter_mut() {
                    row.swap(best, pivot_col);
                }
                for row in u.iter_mut() {
                    row.swap(best, pivot_col);
                }
            }
            if nz.len() == 1 {
                break;
            }
            let p = h[r][pivot_col];
            for c in pivot_col + 1..ncols {
                let q = h[r][c].div_euclid(p);
                if q != 0 {
                    for row in h.iter_mut() {
                        row[c] = ck(row[c].checked_sub(ck(q.checked_mul(row[pivot_col]))?))?;
                    }
                    for row in u.iter_mut() {
                        row[c] = ck(row[c].checked_sub(ck(q.checked_mul(row[pivot_col]))?))?;
                    }
                }
            }
        }
        if h[r][pivot_col] != 0 {
            if h[r][pivot_col] < 0 {
                for row in h.iter_mut() {
                    row[pivot_col] = -row[pivot_col];
                }
                for row in u.iter_mut() {
                    row[pivot_col] = -row[pivot_col];
                }
            }
            pivot_col += 1;
        }
    }
    Ok((h, u, pivot_col))
}

/// Basis (as column vectors) of `{x ∈ Z^ncols : a x = 0}`; always saturated.
pub fn integer_kernel(a: &[Vec<i64>], ncols: usize) -> Result<Vec<Vec<i64>>, LatticeError> {
    let (_, u, rank) = column_echelon(a, ncols)?;
    let mut basis = Vec::new();
    for c in rank..ncols {
        let v: Result<Vec<i64>, _> = (0..ncols)
            .map(|i| i64::try_from(u[i][c]).map_err(|_| LatticeError::Overflow))
            .collect();
        basis.push(v?);
    }
    Ok(lll_reduce_columns(basis))
}

/// Size-reduces a list of integer vectors (pairwise Euclidean reduction);
/// keeps kernels readable without changing the spanned lattice.
fn lll_reduce_columns(mut basis: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let dot = |a: &[i64], b: &[i64]| -> i128 { a.iter().zip(b).map(|(x, y)| *x as i128 * *y as i128).sum() };
    let mut changed = true;
    let mut guard = 0;
    while changed && guard < 200 {
        changed = false;
        guard += 1;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let nj = dot(&basis[j], &basis[j]);
                if nj == 0 {
                    continue;
                }
                let num = dot(&basis[i], &basis[j]);
                let q = ((2 * num + nj).div_euclid(2 * nj)) as i64;
                if q != 0 {
                    let bj = basis[j].clone();
                    let cand: Vec<i64> = basis[i].iter().zip(&bj).map(|(a, b)| a - q * b).collect();
                    if dot(&cand, &cand) < dot(&basis[i], &basis[i]) {
                        basis[i] = cand;
                        changed = true;
                    }
                }
            }
        }
    }
    basis
}

/// Index of the span of the columns of `m` (n × s) inside its saturation;
/// `1` exactly when the columns span a primitive sublattice.
pub fn saturation_index(columns: &[Vec<i64>], n: usize) -> Result<BigInt, LatticeError> {
    // rows of the s × n matrix are the column vectors
    let s = columns.len();
    if s == 0 {
        return Ok(BigInt::one());
    }
    let (h, _, rank) = column_echelon(columns, n)?;
    if rank < s {
        return Ok(BigInt::zero());
    }
    let mut d = BigInt::one();
    for i in 0..s {
        d *= BigInt::from(h[i][i]);
    }
    Ok(d.abs())
}

/// Basis of the saturation `(span ⊗ Q) ∩ Z^n` of the given columns.
pub fn saturate(columns: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>, LatticeError> {
    let ann = integer_kernel(columns, n)?; // y with yᵀ c = 0 for all columns
    if ann.is_empty() {
        return Ok((0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect());
    }
    integer_kernel(&ann, n)
}

/// An isometric embedding `source ↪ target`; `matrix[i][j]` is the `i`-th
/// target coordinate of the image of the `j`-th source basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEmbedding {
    pub source: Lattice,
    pub target: Lattice,
    pub matrix: IntMatrix,
}

impl LatticeEmbedding {
    pub fn new(source: Lattice, target: Lattice, matrix: IntMatrix) -> Result<Self, LatticeError> {
        if matrix.len() != target.rank() || matrix.iter().any(|r| r.len() != source.rank()) {
            return Err(LatticeError::DimensionMismatch(matrix.len(), target.rank()));
        }
        let emb = LatticeEmbedding {
            source,
            target,
            matrix,
        };
        if !emb.verify() {
            return Err(LatticeError::NotAnEmbedding);
        }
        Ok(emb)
    }

    /// Builds from image vectors (columns).
    pub fn from_images(source: Lattice, target: Lattice, images: &[LatticeVector]) -> Result<Self, LatticeError> {
        let n = target.rank();
        let m = (0..n).map(|i| images.iter().map(|v| v.0[i]).collect()).collect();
        LatticeEmbedding::new(source, target, m)
    }

    pub fn image(&self, j: usize) -> LatticeVector {
        LatticeVector(self.matrix.iter().map(|r| r[j]).collect())
    }

    pub fn images(&self) -> Vec<LatticeVector> {
        (0..self.source.rank()).map(|j| self.image(j)).collect()
    }

    /// Maps source coordinates into target coordinates.
    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector(
            self.matrix
                .iter()
                .map(|r| r.iter().zip(&v.0).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// `Mᵀ G_target M = G_source` exactly.
    pub fn verify(&self) -> bool {
        let imgs = self.images();
        for i in 0..imgs.len() {
            for j in 0..imgs.len() {
                if self.target.inner_unchecked(&imgs[i].0, &imgs[j].0) != self.source.gram[i][j] {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_primitive(&self) -> Result<bool, LatticeError> {
        let cols: Vec<Vec<i64>> = self.images().into_iter().map(|v| v.0).collect();
        Ok(saturation_index(&cols, self.target.rank())?.is_one())
    }

    /// `{x ∈ target : ⟨x, image⟩ = 0}` with its induced form, and the
    /// inclusion into the target.
    pub fn orthogonal_complement(&self) -> Result<(Lattice, LatticeEmbedding), LatticeError> {
        let n = self.target.rank();
        let rows: Vec<Vec<i64>> = self
            .images()
            .iter()
            .map(|v| self.target.dual_coords(&v.0))
            .collect();
        let kernel = integer_kernel(&rows, n)?;
        let k = kernel.len();
        let mut g = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in 0..k {
                g[i][j] = self.target.inner_unchecked(&kernel[i], &kernel[j]);
            }
        }
        let comp = Lattice::from_gram(format!("({})^perp", self.source.name), g)
            .map_err(|_| LatticeError::DegenerateComplement)?;
        let images: Vec<LatticeVector> = kernel.into_iter().map(LatticeVector).collect();
        let inc = LatticeEmbedding::from_images(comp.clone(), self.target.clone(), &images)?;
        Ok((comp, inc))
    }
}

/// Tunables for [`embedding_search`].
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub coefficient_bound: i64,
    /// Maximal number of nonzero coordinates of a candidate image.
    pub max_support: usize,
    pub require_primitive: bool,
    /// Abort after this many candidate tests.
    pub node_limit: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            coefficient_bound: 3,
            max_support: 3,
            require_primitive: true,
            node_limit: 50_000_000,
        }
    }
}

fn sparse_candidates(t: &Lattice, norm: i64, bound: i64, max_support: usize) -> Vec<Vec<i64>> {
    let n = t.rank();
    let mut out = Vec::new();
    let vals: Vec<i64> = (1..=bound).flat_map(|c| [c, -c]).collect();
    let mut idx: Vec<usize> = Vec::new();
    let mut coeffs: Vec<i64> = Vec::new();
    fn rec(
        start: usize,
        n: usize,
        max_support: usize,
        vals: &[i64],
        idx: &mut Vec<usize>,
        coeffs: &mut Vec<i64>,
        t: &Lattice,
        norm: i64,
        out: &mut Vec<Vec<i64>>,
    ) {
        if !idx.is_empty() {
            let mut s = 0i64;
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    s += coeffs[a] * coeffs[b] * t.gram[i][j];
                }
            }
            if s == norm {
                let mut v = vec![0i64; n];
                for (a, &i) in idx.iter().enumerate() {
                    v[i] = coeffs[a];
                }
                out.push(v);
            }
        }
        if idx.len() == max_support {
            return;
        }
        for i in start..n {
            for &c in vals {
                idx.push(i);
                coeffs.push(c);
                rec(i + 1, n, max_support, vals, idx, coeffs, t, norm, out);
                idx.pop();
                coeffs.pop();
            }
        }
    }
    rec(0, n, max_support, &vals, &mut idx, &mut coeffs, t, norm, &mut out);
    // sparse first, then small coefficients, then lexicographic
    out.sort_by_key(|v| {
        let supp = v.iter().filter(|&&c| c != 0).count();
        let l1: i64 = v.iter().map(|c| c.abs()).sum();
        (supp, l1, v.iter().map(|c| -c).collect::<Vec<_>>())
    });
    out
}

/// Backtracking search for `S ↪ T` over sparse candidate images with
/// coordinates bounded by `coefficient_bound`, pruned by partial Gram
/// agreement (and partial primitivity when requested).
pub fn embedding_search(s: &Lattice, t: &Lattice, opts: SearchOptions) -> Result<LatticeEmbedding, LatticeError> {
    if s.rank() > t.rank() {
        return Err(LatticeError::NotFound(opts.coefficient_bound));
    }
    let mut cache: std::collections::HashMap<i64, Vec<Vec<i64>>> = Default::default();
    for i in 0..s.rank() {
        let nrm = s.gram[i][i];
        cache
            .entry(nrm)
            .or_insert_with(|| sparse_candidates(t, nrm, opts.coefficient_bound, opts.max_support));
    }
    let n = t.rank();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut duals: Vec<Vec<i64>> = Vec::new();
    let mut nodes = 0u64;
    fn dfs(
        s: &Lattice,
        t: &Lattice,
        n: usize,
        cache: &std::collections::HashMap<i64, Vec<Vec<i64>>>,
        chosen: &mut Vec<Vec<i64>>,
        duals: &mut Vec<Vec<i64>>,
        nodes: &mut u64,
        opts: &SearchOptions,
    ) -> Result<bool, LatticeError> {
        let d = chosen.len();
        if d == s.rank() {
            return Ok(true);
        }
        for cand in &cache[&s.gram[d][d]] {
            *nodes += 1;
            if *nodes > opts.node_limit {
                return Ok(false);
            }
            let ok = (0..d).all(|j| {
                cand.iter().zip(&duals[j]).map(|(a, b)| a * b).sum::<i64>() == s.gram[d][j]
            });
            if !ok {
                continue;
            }
            chosen.push(cand.clone());
            if opts.require_primitive && !saturation_index(chosen, n)?.is_one() {
                chosen.pop();
                continue;
            }
            duals.push(t.dual_coords(cand));
            if dfs(s, t, n, cache, chosen, duals, nodes, opts)? {
                return Ok(true);
            }
            chosen.pop();
            duals.pop();
        }
        Ok(false)
    }
    if dfs(s, t, n, &cache, &mut chosen, &mut duals, &mut nodes, &opts)? {
        let images: Vec<LatticeVector> = chosen.into_iter().map(LatticeVector).collect();
        LatticeEmbedding::from_images(s.clone(), t.clone(), &images)
    } else {
        Err(LatticeError::NotFound(opts.coefficient_bound))
    }
}

/// The Lorentzian lattice `L_k`: `diag(1, -1^{9-k})`, or `U` for the even
/// degree-8 model.
pub fn l_k(k: u32, even: bool) -> Lattice {
    assert!((1..=9).contains(&k), "k in 1..=9");
    if even {
        Lattice::u().named("L_8(even)")
    } else {
        Lattice::diag(1, 9 - k as usize).named(format!("L_{k}"))
    }
}

/// `Λ_k = U(-1) ⊕ L_k`, of signature `(2, 10-k)`.
pub fn lambda_k(k: u32, even: bool) -> Lattice {
    let name = if even { format!("Lambda_{k}(even)") } else { format!("Lambda_{k}") };
    Lattice::u_minus().direct_sum(&l_k(k, even)).named(name)
}

/// Converts a `BigInt` to `i64`, reporting overflow.
pub fn to_i64(x: &BigInt) -> Result<i64, LatticeError> {
    x.to_i64().ok_or(LatticeError::Overflow)
}

/// `gcd` of the coordinates.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

#[cfg(test)]
pub(crate) fn ball_window(
    l: &Lattice,
    f: &LatticeVector,
    cap: Rational64,
    accept_norm: impl Fn(i64) -> bool,
    min_norm: i64,
    symmetric: bool,
) -> Vec<LatticeVector> {
    let ff = l.norm(f).unwrap();
    let n = l.rank();
    let gf = l.dual_coords(f.coords());
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (2 * gf[i] * gf[j] - ff * l.gram[i][j]) as f64).collect())
        .collect();
    let capf = *cap.numer() as f64 / *cap.denom() as f64;
    let bound = 2.0 * capf * capf - (ff as f64) * (min_norm as f64);
    let mut out = Vec::new();
    if bound < 0.0 || capf < 0.0 {
        return out;
    }
    fincke_pohst(&q, bound, |x| {
        let s: i64 = gf.iter().zip(x).map(|(a, b)| a * b).sum();
        let lo_ok = if symmetric { true } else { s > 0 };
        if lo_ok && (s.abs() as i128) * (*cap.denom() as i128) <= *cap.numer() as i128 && accept_norm(l.inner_unchecked(x, x)) {
            out.push(LatticeVector(x.to_vec()));
        }
    });
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector(c.to_vec())
    }

    #[test]
    fn constructors_and_discriminants() {
        assert_eq!(Lattice::u().discriminant(), BigInt::from(-1));
        assert_eq!(Lattice::e8_minus().discriminant(), BigInt::from(1));
        let s = Lattice::u_minus().direct_sum(&Lattice::diag(1, 1));
        assert_eq!(s.signature(), Signature { positive: 2, negative: 2 });
        assert_eq!(Lattice::e8_minus().signature(), Signature { positive: 0, negative: 8 });
        assert_eq!(Lattice::k3().signature(), Signature { positive: 3, negative: 19 });
        assert_eq!(Lattice::k3().discriminant().abs(), BigInt::one());
        assert!(Lattice::u().rescale(0).is_err());
        assert!(Lattice::from_gram("x", vec![vec![1, 2], vec![3, 1]]).is_err());
        assert!(Lattice::from_gram("x", vec![vec![1, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn pairings() {
        let u = Lattice::u();
        assert_eq!(u.inner(&v(&[1, 0]), &v(&[0, 1])).unwrap(), 1);
        assert_eq!(Lattice::diag(1, 1).norm(&v(&[1, 1])).unwrap(), 0);
        assert!(matches!(
            u.inner(&v(&[1]), &v(&[0, 1])),
            Err(LatticeError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn lambda_signatures_and_rescaled_discriminants() {
        for k in 1..=9u32 {
            let l = lambda_k(k, false);
            assert_eq!(
                l.signature(),
                Signature { positive: 2, negative: 10 - k as usize }
            );
            let d = l.rescale(2).unwrap().discriminant();
            assert_eq!(d.abs(), BigInt::from(1u64 << (12 - k)));
        }
        assert_eq!(lambda_k(8, true).signature(), Signature { positive: 2, negative: 2 });
    }

    #[test]
    fn complement_examples() {
        let uu = Lattice::u().direct_sum(&Lattice::u());
        let emb = LatticeEmbedding::from_images(Lattice::u(), uu.clone(), &[v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0])]).unwrap();
        let (c, inc) = emb.orthogonal_complement().unwrap();
        assert_eq!(c.discriminant(), BigInt::from(-1));
        assert_eq!(c.signature(), Signature { positive: 1, negative: 1 });
        assert!((0..2).all(|i| c.gram()[i][i] % 2 == 0));
        assert!(inc.verify());

        let two = Lattice::diagonal(&[2]).unwrap();
        let emb = LatticeEmbedding::from_images(two, Lattice::u(), &[v(&[1, 1])]).unwrap();
        let (c, inc) = emb.orthogonal_complement().unwrap();
        assert_eq!(c.gram(), &vec![vec![-2]]);
        let img = inc.image(0);
        assert!(img == v(&[1, -1]) || img == v(&[-1, 1]));
    }

    #[test]
    fn embedding_search_small() {
        let two = Lattice::diagonal(&[2]).unwrap();
        let e = embedding_search(&two, &Lattice::u(), SearchOptions::default()).unwrap();
        assert_eq!(e.image(0), v(&[1, 1]));
        let m2 = Lattice::diagonal(&[-2]).unwrap();
        let e = embedding_search(&m2, &Lattice::e8_minus(), SearchOptions::default()).unwrap();
        assert!(e.verify());
        assert_eq!(Lattice::e8_minus().norm(&e.image(0)).unwrap(), -2);
        // no norm 1 vector in an even lattice
        let one = Lattice::diagonal(&[1]).unwrap();
        assert!(matches!(
            embedding_search(&one, &Lattice::u(), SearchOptions::default()),
            Err(LatticeError::NotFound(3))
        ));
    }

    #[test]
    fn saturation() {
        assert_eq!(saturation_index(&[vec![2, 0], vec![0, 1]], 2).unwrap(), BigInt::from(2));
        assert_eq!(saturation_index(&[vec![1, 1, 0]], 3).unwrap(), BigInt::one());
        let sat = saturate(&[vec![2, 2, 0]], 3).unwrap();
        assert_eq!(sat.len(), 1);
        assert_eq!(content(&sat[0]), 1);
    }

    #[test]
    fn norm_zero_vectors_hand_enumeration() {
        let l = Lattice::diag(1, 1);
        let got = l
            .enumerate_norm_vectors(0, &v(&[2, 0]), Rational64::from_integer(4))
            .unwrap();
        // ⟨(a,b),(2,0)⟩ = 2a ∈ (0,4], a² = b²
        let want = vec![v(&[1, -1]), v(&[1, 1]), v(&[2, -2]), v(&[2, 2])];
        assert_eq!(got, want);
        let empty = l
            .enumerate_norm_vectors(0, &v(&[2, 0]), Rational64::new(1, 2))
            .unwrap();
        assert!(empty.is_empty());
        assert!(matches!(
            l.enumerate_norm_vectors(0, &v(&[0, 1]), Rational64::from_integer(1)),
            Err(LatticeError::FunctionalNotPositive(-1))
        ));
    }

    #[test]
    fn determinant_matches_hand_values() {
        assert_eq!(determinant(&vec![vec![2, 1], vec![1, 2]]), BigInt::from(3));
        assert_eq!(determinant(&vec![vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(determinant(&vec![vec![0, 0], vec![0, 5]]), BigInt::zero());
    }
}
