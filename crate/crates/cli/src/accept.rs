//! The acceptance suite: twelve checks, each reporting its measured values
//! and tolerances.  Reports are a pure function of the seed; wall-clock time
//! only enters the pass/fail decision of the criteria with a time budget.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dptorsion::borcherds::{
    compare_quasi_pullback, default_y_norm, heegner_exponent_scan, phi_eval_to_bound, sample_tube_points,
    translation_check, weyl_symmetry_check, SymmetryReport,
};
use dptorsion::delpezzo::{
    blow_down, chain_pairs, cremona_isometry, minus_one_classes_by_squares, model, permutation_isometry, DelPezzoModel,
    Variant,
};
use dptorsion::ehgeometry::{
    chern2_radial_integral, eh_metric, eh_potential, error_term, glued_potential, ConePoint, Cutoff,
};
use dptorsion::invariants::{
    anomaly_transport, c2_integrals, chi_orb, chi_orb_from_fixed_locus, log_tau_k, xi_scaling_exponent,
    InvariantInputs,
};
use dptorsion::lattice::{embedding_search, lambda_k, LatticeVector, Lattice, SearchOptions};
use dptorsion::qseries::{c0_series, c1_series, theta_series, QExponent, QSeries};
use dptorsion::spectral::{
    alternating_factor, bcov_surface_identity, cone_divergence_fit, cone_zeta_derivative, p1_torsion_zeta,
    ConeZetaParams, HodgeSpectrum,
};

pub const CRITERIA: u32 = 12;

/// Target truncation bound for every Φ evaluation in the suite.
pub const PHI_BOUND: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub measured: Value,
    pub notes: Vec<String>,
    pub budget: Option<Duration>,
    /// Not part of the report.
    pub elapsed: Duration,
}

impl Outcome {
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "notes": self.notes,
            "budget_s": self.budget.map(|b| b.as_secs()),
        })
    }

    /// One human-readable line; includes the elapsed time.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            summary(&self.measured)
        )
    }
}

fn summary(v: &Value) -> String {
    let mut s = v.to_string();
    if s.len() > 160 {
        s.truncate(157);
        s.push_str("...");
    }
    s
}

/// A float with its acceptance tolerance.
pub fn fl(value: f64, tol: f64) -> Value {
    json!({ "value": value, "tol": tol })
}

struct Check {
    passed: bool,
    measured: Value,
    notes: Vec<String>,
}

impl Check {
    fn new(passed: bool, measured: Value) -> Self {
        Check { passed, measured, notes: Vec::new() }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

type CheckResult = Result<Check, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn name(id: u32) -> &'static str {
    match id {
        1 => "q-series oracle",
        2 => "q-series multiplicativity",
        3 => "(-1)-class counts",
        4 => "K3 embeddings",
        5 => "Phi symmetries",
        6 => "Heegner exponents",
        7 => "quasi-pullback",
        8 => "Eguchi-Hanson",
        9 => "P1 torsion scaling",
        10 => "cone zeta",
        11 => "BCOV surface identity",
        12 => "invariant assembly",
        _ => "unknown",
    }
}

fn budget(id: u32) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(30)),
        3 => Some(Duration::from_secs(60)),
        8 => Some(Duration::from_secs(120)),
        _ => None,
    }
}

fn rng_for(seed: u64, id: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(id as u64 + 1)))
}

pub fn run_criterion(id: u32, seed: u64) -> Outcome {
    let start = Instant::now();
    let res = match id {
        1 => qseries_oracle(),
        2 => multiplicativity(),
        3 => minus_one_counts(),
        4 => k3_embeddings(),
        5 => phi_symmetries(seed),
        6 => heegner(),
        7 => quasi_pullback(seed),
        8 => eguchi_hanson(seed),
        9 => p1_scaling(),
        10 => cone_zeta(),
        11 => bcov_surface(seed),
        12 => invariant_assembly(seed),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let budget = budget(id);
    let (mut passed, measured, mut notes) = match res {
        Ok(c) => (c.passed, c.measured, c.notes),
        Err(e) => (false, json!({ "error": e }), Vec::new()),
    };
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            notes.push(format!("time budget of {} s exceeded", b.as_secs()));
        }
    }
    Outcome { id, name: name(id), passed, measured, notes, budget, elapsed }
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    (1..=CRITERIA).map(|id| run_criterion(id, seed)).collect()
}

pub fn report(seed: u64, outcomes: &[Outcome]) -> Value {
    json!({
        "seed": seed,
        "passed": outcomes.iter().filter(|o| o.passed).count(),
        "total": outcomes.len(),
        "criteria": outcomes.iter().map(Outcome::to_json).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------- 1, 2

/// Plain integer power series in `q`, kept deliberately separate from
/// `QSeries`: every factor `(1 - q^n)^{±1}` is applied one at a time.
struct Naive(Vec<BigInt>);

impl Naive {
    fn one(len: usize) -> Self {
        let mut v = vec![BigInt::zero(); len];
        v[0] = BigInt::one();
        Naive(v)
    }

    fn times_one_minus(&mut self, step: usize) {
        for i in (step..self.0.len()).rev() {
            let t = self.0[i - step].clone();
            self.0[i] -= t;
        }
    }

    fn over_one_minus(&mut self, step: usize) {
        for i in step..self.0.len() {
            let t = self.0[i - step].clone();
            self.0[i] += t;
        }
    }

    fn times(&mut self, other: &[BigInt]) {
        let n = self.0.len();
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.0.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        self.0 = out;
    }

    fn eta_quotient(&mut self, factors: &[(usize, i32)]) {
        for n in 1..self.0.len() {
            for &(scale, power) in factors {
                let step = scale * n;
                if step >= self.0.len() {
                    continue;
                }
                for _ in 0..power.abs() {
                    if power > 0 {
                        self.times_one_minus(step);
                    } else {
                        self.over_one_minus(step);
                    }
                }
            }
        }
    }
}

/// Coefficients keyed by `24·exponent`.
type Coeffs = BTreeMap<i64, BigInt>;

fn naive_c0(k: u32, order: i64) -> Coeffs {
    // q^{-1} ∏(1-q^{2n})^8 / (∏(1-q^n)^8 ∏(1-q^{4n})^8) · (Σ q^{m²})^k
    let len = (order + 1) as usize;
    let mut p = Naive::one(len);
    p.eta_quotient(&[(2, 8), (1, -8), (4, -8)]);
    let mut theta = vec![BigInt::zero(); len];
    for m in -(len as i64)..=(len as i64) {
        if ((m * m) as usize) < len {
            theta[(m * m) as usize] += 1;
        }
    }
    for _ in 0..k {
        p.times(&theta);
    }
    p.0.into_iter()
        .enumerate()
        .map(|(i, c)| (24 * (i as i64 - 1), c))
        .filter(|(e, c)| *e < 24 * order && !c.is_zero())
        .collect()
}

fn naive_c1(k: u32, order: i64) -> Coeffs {
    // -8·2^k q^{k/4} ∏(1-q^{4n})^8 / ∏(1-q^{2n})^16 · (Σ_{m≥0} q^{m(m+1)})^k
    let len = order as usize + 1;
    let mut p = Naive::one(len);
    p.eta_quotient(&[(4, 8), (2, -16)]);
    let mut t = vec![BigInt::zero(); len];
    let mut m = 0usize;
    while m * (m + 1) < len {
        t[m * (m + 1)] += 1;
        m += 1;
    }
    for _ in 0..k {
        p.times(&t);
    }
    let scale = BigInt::from(-8) * BigInt::from(2).pow(k);
    p.0.into_iter()
        .enumerate()
        .map(|(i, c)| (6 * k as i64 + 24 * i as i64, c * &scale))
        .filter(|(e, c)| *e < 24 * order && !c.is_zero())
        .collect()
}

fn coeffs_of(s: &QSeries) -> Coeffs {
    s.iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e.num24(), c.clone())).collect()
}

fn mismatches(a: &Coeffs, b: &Coeffs) -> usize {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter().filter(|k| a.get(k) != b.get(k)).count()
}

const ORDER: i64 = 50;

fn qseries_oracle() -> CheckResult {
    let order = QExponent::integer(ORDER);
    let mut rows = Vec::new();
    let mut bad = 0;
    let mut compared = 0;
    for k in 0..=9u32 {
        let c0 = coeffs_of(&c0_series(k, order).map_err(err)?);
        let c1 = coeffs_of(&c1_series(k, order).map_err(err)?);
        let (m0, m1) = (mismatches(&c0, &naive_c0(k, ORDER)), mismatches(&c1, &naive_c1(k, ORDER)));
        bad += m0 + m1;
        compared += c0.len() + c1.len();
        rows.push(json!({ "k": k, "c0_terms": c0.len(), "c1_terms": c1.len(), "mismatches": m0 + m1 }));
    }
    Ok(Check::new(
        bad == 0,
        json!({ "order": ORDER, "nonzero_coefficients": compared, "mismatches": bad, "per_k": rows }),
    ))
}

fn multiplicativity() -> CheckResult {
    let order = QExponent::integer(ORDER);
    let base0 = c0_series(0, order).map_err(err)?;
    let base1 = c1_series(0, order).map_err(err)?;
    // c0 starts at q^{-1}, so θ^k is needed one order further
    let wide = QExponent::integer(ORDER + 1);
    let th0 = theta_series(0, wide).map_err(err)?;
    let th1 = theta_series(1, wide).map_err(err)?;
    let mut bad = Vec::new();
    for k in 0..=9i64 {
        let lhs0 = coeffs_of(&c0_series(k as u32, order).map_err(err)?);
        let rhs0 = coeffs_of(&base0.mul(&th0.pow(k).map_err(err)?).truncate(order));
        let lhs1 = coeffs_of(&c1_series(k as u32, order).map_err(err)?);
        let rhs1 = coeffs_of(&base1.mul(&th1.pow(k).map_err(err)?).truncate(order));
        let n = mismatches(&lhs0, &rhs0) + mismatches(&lhs1, &rhs1);
        if n > 0 {
            bad.push(json!({ "k": k, "mismatches": n }));
        }
    }
    Ok(Check::new(bad.is_empty(), json!({ "order": ORDER, "k_range": "0..=9", "failures": bad })))
}

// ---------------------------------------------------------------- 3, 4

/// Verified counts of `α² = α·K = -1`, per model.
pub const MINUS_ONE_COUNTS: [(u32, Variant, usize); 10] = [
    (1, Variant::Generic, 240),
    (2, Variant::Generic, 56),
    (3, Variant::Generic, 27),
    (4, Variant::Generic, 16),
    (5, Variant::Generic, 10),
    (6, Variant::Generic, 6),
    (7, Variant::Generic, 3),
    (8, Variant::Sigma1, 1),
    (8, Variant::Sigma0, 0),
    (9, Variant::P2, 0),
];

fn minus_one_counts() -> CheckResult {
    let mut rows = Vec::new();
    let mut ok = true;
    for (d, v, golden) in MINUS_ONE_COUNTS {
        let m = model(d, v).map_err(err)?;
        let mut a: Vec<_> = m.minus_one_classes.iter().map(|x| x.0.clone()).collect();
        let mut b: Vec<_> = minus_one_classes_by_squares(&m).into_iter().map(|x| x.0).collect();
        a.sort();
        b.sort();
        let agree = a == b;
        ok &= agree && a.len() == golden;
        rows.push(json!({
            "degree": d, "variant": v.to_string(),
            "fincke_pohst": a.len().to_string(), "squares": b.len().to_string(),
            "expected": golden.to_string(), "sets_equal": agree,
        }));
    }
    Ok(Check::new(ok, json!({ "models": rows })))
}

fn k3_embeddings() -> CheckResult {
    let k3 = Lattice::k3();
    let mut rows = Vec::new();
    let mut ok = true;
    let cases: Vec<(u32, bool)> = (1..=9).map(|k| (k, false)).chain([(8, true)]).collect();
    for (k, even) in cases {
        let src = lambda_k(k, even).rescale(2).map_err(err)?;
        let emb = embedding_search(&src, &k3, SearchOptions::default()).map_err(err)?;
        let primitive = emb.is_primitive().map_err(err)?;
        let (comp, inc) = emb.orthogonal_complement().map_err(err)?;
        let disc = comp.discriminant().abs();
        let expected = BigInt::from(1u64 << (12 - k));
        let good = emb.verify() && inc.verify() && primitive && disc == expected;
        ok &= good;
        rows.push(json!({
            "k": k, "even": even, "primitive": primitive,
            "complement_rank": comp.rank().to_string(),
            "disc": disc.to_string(), "expected": expected.to_string(),
        }));
    }
    Ok(Check::new(ok, json!({ "embeddings": rows }))
        .note("the even rank-2 Lorentzian factor U only exists in the degree-8 slot, so the second parity is Λ_8(2)"))
}

// ---------------------------------------------------------------- 5, 6, 7

fn all_models() -> Vec<(u32, Variant)> {
    let mut v = vec![(9, Variant::P2), (8, Variant::Sigma1), (8, Variant::Sigma0)];
    v.extend((1..=7).rev().map(|d| (d, Variant::Generic)));
    v
}

/// Isometries fixing `c1` and the effective generators, for use in the
/// Weyl/Cremona check.
fn symmetries(m: &DelPezzoModel, rng: &mut impl Rng) -> Vec<(String, Vec<Vec<i64>>)> {
    match m.variant {
        Variant::Sigma0 => vec![("swap".into(), vec![vec![0, 1], vec![1, 0]])],
        Variant::Generic => {
            let n = m.rank() - 1;
            let mut out = Vec::new();
            let mut perm: Vec<usize> = (1..=n).collect();
            while perm.iter().enumerate().all(|(i, &p)| p == i + 1) {
                for i in (1..n).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
            }
            out.push((format!("perm{perm:?}"), permutation_isometry(m, &perm)));
            if n >= 3 {
                let mut idx: Vec<usize> = (1..=n).collect();
                for i in (1..n).rev() {
                    idx.swap(i, rng.gen_range(0..=i));
                }
                let (a, b, c) = (idx[0], idx[1], idx[2]);
                out.push((format!("cremona({a},{b},{c})"), cremona_isometry(m, a, b, c)));
            }
            out
        }
        _ => Vec::new(),
    }
}

/// A random `λ` with `|λ_i| ≤ 2` and `⟨c1, λ⟩` even.
pub fn even_translation(m: &DelPezzoModel, rng: &mut impl Rng) -> LatticeVector {
    loop {
        let l = LatticeVector((0..m.rank()).map(|_| rng.gen_range(-2..=2)).collect());
        if m.pair(&m.c1, &l) % 2 == 0 {
            return l;
        }
    }
}

fn sym_json(r: &SymmetryReport) -> Value {
    json!({
        "discrepancy": r.discrepancy,
        "tolerance": r.tolerance,
        "truncation_bound": r.truncation_bound,
    })
}

fn phi_symmetries(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 5);
    let mut rows = Vec::new();
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_bound: f64 = 0.0;
    for (d, v) in all_models() {
        let m = model(d, v).map_err(err)?;
        let pts = sample_tube_points(&m, 5, rng.gen(), &default_y_norm(&m));
        let syms = symmetries(&m, &mut rng);
        let mut checks = Vec::new();
        for z in &pts {
            let cap = phi_eval_to_bound(&m, z, PHI_BOUND).map_err(err)?.cap_used;
            let lambda = even_translation(&m, &mut rng);
            let mut reports = vec![("translation".to_string(), translation_check(&m, z, &lambda, &cap).map_err(err)?)];
            for (label, s) in &syms {
                reports.push((label.clone(), weyl_symmetry_check(&m, z, s, &cap).map_err(err)?));
            }
            for (label, r) in reports {
                // each report sums the bounds of two evaluations
                let per_eval = r.truncation_bound / 2.0;
                ok &= r.passed && per_eval <= PHI_BOUND;
                let scale = r.tolerance.max(f64::MIN_POSITIVE);
                worst_ratio = worst_ratio.max(r.discrepancy / scale);
                worst_bound = worst_bound.max(per_eval);
                checks.push(json!({ "check": label, "report": sym_json(&r), "passed": r.passed }));
            }
        }
        rows.push(json!({ "degree": d, "variant": v.to_string(), "points": pts.len(), "checks": checks }));
    }
    Ok(Check::new(
        ok,
        json!({
            "max_discrepancy_over_tolerance": fl(worst_ratio, 1.0),
            "max_truncation_bound": fl(worst_bound, PHI_BOUND),
            "models": rows,
        }),
    )
    .note("tolerance = 10 x (sum of truncation bounds) + accumulated rounding bound; P2 and Sigma1 have no nontrivial symmetry")
    .note("translations are drawn with <c1, lambda> even; odd ones flip the sign of the half-integral factors"))
}

fn sigma3(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum()
}

fn heegner() -> CheckResult {
    const HEIGHT: i64 = 6;
    let mut rows = Vec::new();
    let mut ok = true;
    for (d, v) in all_models().into_iter().filter(|(d, _)| *d <= 8) {
        let m = model(d, v).map_err(err)?;
        let scan = heegner_exponent_scan(&m, HEIGHT).map_err(err)?;
        let bad = scan.iter().filter(|r| r.exponent != "1").count();
        let unit_height = scan.iter().filter(|r| r.c1_pairing.abs() == 1).count();
        let golden = MINUS_ONE_COUNTS.iter().find(|(a, b, _)| *a == d && *b == v).map(|t| t.2).unwrap_or(0);
        let mut row = json!({
            "degree": d, "variant": v.to_string(), "walls": scan.len().to_string(),
            "exponent_not_one": bad.to_string(), "height_one_walls": unit_height.to_string(),
        });
        ok &= bad == 0 && unit_height == golden;
        if d == 1 {
            // c1² = 1 splits off E8(-1): walls at height s are E8 vectors of norm s² + 1
            let expected: u64 = (1..=HEIGHT as u64).step_by(2).map(|s| 240 * sigma3((s * s + 1) / 2)).sum();
            ok &= scan.len() as u64 == expected;
            row["e8_theta_count"] = json!(expected.to_string());
        }
        rows.push(row);
    }
    Ok(Check::new(ok, json!({ "height_cap": HEIGHT, "models": rows }))
        .note("height is |<l, c1>|; walls l and -l are counted once"))
}

fn quasi_pullback(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 7);
    let mut rows = Vec::new();
    let mut ok = true;
    let (mut worst_spread, mut worst_bound) = (0.0f64, 0.0f64);
    for (d, v) in chain_pairs() {
        let bd = blow_down(d, v).map_err(err)?;
        let pts = sample_tube_points(&bd.small, 5, rng.gen(), &default_y_norm(&bd.small));
        let cmp = compare_quasi_pullback(&bd, &pts, PHI_BOUND).map_err(err)?;
        ok &= pts.len() >= 5 && cmp.spread <= 1e-6 && cmp.max_bound <= PHI_BOUND;
        worst_spread = worst_spread.max(cmp.spread);
        worst_bound = worst_bound.max(cmp.max_bound);
        rows.push(json!({
            "small": format!("{d}({v})"),
            "big": format!("{}({})", bd.big.degree, bd.big.variant),
            "points": pts.len(),
            "mean_ratio": [cmp.mean_ratio.re, cmp.mean_ratio.im],
            "spread": fl(cmp.spread, 1e-6),
            "max_bound": fl(cmp.max_bound, PHI_BOUND),
        }));
    }
    Ok(Check::new(
        ok,
        json!({ "max_spread": fl(worst_spread, 1e-6), "max_bound": fl(worst_bound, PHI_BOUND), "pairs": rows }),
    ))
}

// ---------------------------------------------------------------- 8

fn random_point(rng: &mut impl Rng, r_lo: f64, r_hi: f64) -> ConePoint {
    loop {
        let v: [f64; 4] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            let r = (r_lo.ln() + (r_hi / r_lo).ln() * rng.gen::<f64>()).exp();
            let s = r / n;
            return ConePoint::new(Complex64::new(v[0] * s, v[1] * s), Complex64::new(v[2] * s, v[3] * s))
                .expect("nonzero point");
        }
    }
}

fn box_point(rng: &mut impl Rng, half: f64) -> ConePoint {
    loop {
        let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-half..half)).collect();
        if let Ok(z) = ConePoint::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])) {
            if z.norm() > 1e-3 {
                return z;
            }
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn eguchi_hanson(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 8);
    let mut det_dev: f64 = 0.0;
    for i in 0..1000 {
        let eps = if i % 2 == 0 { 0.1 } else { 1.0 };
        let z = box_point(&mut rng, 2.0);
        det_dev = det_dev.max((eh_metric(&z, eps).map_err(err)?.det() - 1.0).abs());
    }
    // near the exceptional curve the eigenvalues are R/s and s/R, so rounding
    // in the entries alone moves det by about cond·u
    let mut det_cond: f64 = 0.0;
    for i in 0..1000 {
        let eps = if i % 2 == 0 { 0.1 } else { 1.0 };
        let z = random_point(&mut rng, 1e-3, 1e2);
        let g = eh_metric(&z, eps).map_err(err)?;
        let (lo, hi) = g.eigenvalues();
        det_cond = det_cond.max((g.det() - 1.0).abs() / (hi / lo * f64::EPSILON));
    }
    let (mut pot, mut errs, mut glued) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let z = random_point(&mut rng, 0.05, 5.0);
        let eps: f64 = rng.gen_range(0.01..1.0);
        let d: f64 = rng.gen_range(0.2..1.0);
        pot = pot.max(rel(eh_potential(&z.scale(d), eps), d * d * eh_potential(&z, eps / (d * d))));
        errs = errs.max(rel(error_term(&z, eps), eps * error_term(&z.scale(1.0 / eps.sqrt()), 1.0)));
        for cutoff in [Cutoff::Smoothstep7, Cutoff::Smooth] {
            let lhs = glued_potential(&z, eps, d, cutoff);
            let rhs = d * d * glued_potential(&z.scale(1.0 / d), eps / (d * d), 1.0, cutoff);
            glued = glued.max(rel(lhs, rhs));
        }
    }
    let c2 = chern2_radial_integral(1.0, 40.0, 400).map_err(err)?;
    let ok = det_dev <= 1e-8 && det_cond <= 16.0 && pot <= 1e-10 && errs <= 1e-10 && glued <= 1e-10 && (c2.value - 1.5).abs() <= 0.02;
    Ok(Check::new(
        ok,
        json!({
            "det_max_deviation": fl(det_dev, 1e-8),
            "det_deviation_over_cond_u": fl(det_cond, 16.0),
            "potential_scaling": fl(pot, 1e-10),
            "error_term_scaling": fl(errs, 1e-10),
            "glued_scaling": fl(glued, 1e-10),
            "c2_integral": fl(c2.value, 0.02),
            "c2_expected": "3/2",
            "c2_richardson_diff": c2.richardson_diff,
            "c2_decay_exponent": c2.decay_exponent,
        }),
    )
    .note("det sampled uniformly on [-2,2]^4; the second det figure covers radii 1e-3..1e2 relative to the conditioning")
    .note("c2 integral over C^2 halved for the ±1 quotient; eps = 1, r_max = 40, 400 log-spaced panels plus power-law inner and tail pieces"))
}

// ---------------------------------------------------------------- 9, 10, 11

const J_MAX: usize = 60;

fn p1_scaling() -> CheckResult {
    let mut zeta0 = Vec::new();
    let mut ok = true;
    for c in [0.5, 1.0, std::f64::consts::PI] {
        let t = p1_torsion_zeta(c, J_MAX).map_err(err)?;
        ok &= (t.zeta0 + 2.0 / 3.0).abs() <= 1e-6;
        zeta0.push(json!({ "c": c, "zeta0": fl(t.zeta0, 1e-6) }));
    }
    let base = p1_torsion_zeta(1.0, J_MAX).map_err(err)?;
    let mut ratios = Vec::new();
    for lambda in [2.0f64, 10.0] {
        // metric λg scales the spectrum by 1/λ
        let t = p1_torsion_zeta(1.0 / lambda, J_MAX).map_err(err)?;
        let r = t.tau / base.tau;
        let expected = lambda.powf(-2.0 / 3.0);
        let d = rel(r, expected);
        ok &= d <= 1e-8;
        ratios.push(json!({ "lambda": lambda, "ratio": r, "expected": expected, "rel_diff": fl(d, 1e-8) }));
    }
    Ok(Check::new(ok, json!({ "zeta0_expected": "-2/3", "zeta0": zeta0, "tau_ratios": ratios }))
        .note("tau = exp(zeta'(0)) and tau(lambda g)/tau(g) = lambda^zeta(0); the exponent -2/3 fixes the sign of zeta(0)"))
}

fn cone_zeta() -> CheckResult {
    let mut factors = Vec::new();
    let mut ok = true;
    for n in 2..=10u32 {
        let f = alternating_factor(n);
        ok &= f == 0;
        factors.push(json!({ "n": n, "factor": f.to_string() }));
    }
    let mut partial = Vec::new();
    for delta in [1e-1, 1e-2, 1e-3, 1e-4] {
        let r = cone_zeta_derivative(&ConeZetaParams { n: 2, delta, tol: 1e-12 }).map_err(err)?;
        ok &= r.partial_torsion == 0.0;
        partial.push(json!({ "delta": delta, "zeta_prime": r.zeta_prime_delta_0, "partial_torsion": r.partial_torsion.abs().to_string() }));
    }
    let fit = cone_divergence_fit(2, &[1e-1, 1e-2, 1e-3, 1e-4], 1e-12).map_err(err)?;
    ok &= fit.relative_error <= 1e-3;
    Ok(Check::new(
        ok,
        json!({
            "alternating_factors": factors,
            "partial_torsion": partial,
            "coefficient": fit.coefficient,
            "expected_2d_prime": fit.expected,
            "relative_error": fl(fit.relative_error, 1e-3),
            "global_slope": fit.global_slope,
            "decade_slopes": fit.slopes,
        }),
    )
    .note("coefficient is the slope of zeta'_delta(0) against log(1/(3 delta)) on the last decade"))
}

fn bcov_surface(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 11);
    let mut equal = 0usize;
    for _ in 0..100 {
        let s = HodgeSpectrum::random(&mut rng);
        if bcov_surface_identity(&s).map_err(err)?.equal {
            equal += 1;
        }
    }
    // a spectrum violating Hodge symmetry must be rejected
    let mut broken = HodgeSpectrum::random(&mut rng);
    broken.zeta_prime0[0][1] += BigRational::one();
    let rejected = bcov_surface_identity(&broken).is_err();
    Ok(Check::new(
        equal == 100 && rejected,
        json!({ "spectra": "100", "exact_equalities": equal.to_string(), "unconstrained_rejected": rejected }),
    ))
}

// ---------------------------------------------------------------- 12

fn log_uniform(rng: &mut impl Rng, spread: f64) -> f64 {
    rng.gen_range(-spread..spread).exp()
}

fn random_inputs(rng: &mut impl Rng) -> InvariantInputs {
    let k = rng.gen_range(1..=10i64);
    InvariantInputs {
        k,
        tau_y_gamma: log_uniform(rng, 3.0),
        vol_y_gamma: log_uniform(rng, 3.0),
        xi_l1_norm: log_uniform(rng, 3.0),
        singular_ratios: (0..k).map(|_| log_uniform(rng, 2.0)).collect(),
        bott_chern_integral: rng.gen_range(-5.0..5.0),
    }
}

fn invariant_assembly(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 12);
    let (mut xi, mut anomaly) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let inp = random_inputs(&mut rng);
        let base = log_tau_k(&inp).map_err(err)?;
        let c = log_uniform(&mut rng, 3.0);
        xi = xi.max((log_tau_k(&inp.rescale_xi(c).map_err(err)?).map_err(err)? - base).abs());
        let ratios: Vec<f64> = (0..inp.k).map(|_| log_uniform(&mut rng, 2.0)).collect();
        let moved = anomaly_transport(&inp, &ratios, rng.gen_range(-5.0..5.0), log_uniform(&mut rng, 3.0))
            .map_err(err)?;
        anomaly = anomaly.max((log_tau_k(&moved).map_err(err)? - base).abs());
    }
    let mut exact = true;
    let mut c2_rows = Vec::new();
    for k in 1..=10i64 {
        let c2 = c2_integrals(k).map_err(err)?;
        let expected = BigRational::new(BigInt::from(16 - k), BigInt::from(32));
        let half_x = &c2.int_c2_x / BigInt::from(2);
        let exp0 = xi_scaling_exponent(k).map_err(err)?.is_zero();
        let chi = chi_orb(k).map_err(err)?;
        let chi_fixed = chi_orb_from_fixed_locus(k).map_err(err)?;
        let good = c2.int_c2_y_over_24 == expected
            && c2.int_c2_y == half_x
            && exp0
            && chi == 12 * k
            && chi_fixed == BigRational::from_integer(BigInt::from(12 * k));
        exact &= good;
        c2_rows.push(json!({
            "k": k, "c2_over_24": c2.int_c2_y_over_24.to_string(), "chi_orb": chi.to_string(),
            "chi_orb_fixed_locus": chi_fixed.to_string(), "xi_exponent_zero": exp0,
        }));
    }
    let ok = xi <= 1e-10 && anomaly <= 1e-10 && exact;
    Ok(Check::new(
        ok,
        json!({
            "bundles": "100",
            "xi_rescaling_log_diff": fl(xi, 1e-10),
            "anomaly_log_diff": fl(anomaly, 1e-10),
            "exact": c2_rows,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_series_leading_terms() {
        // q^{-1} + 8 + ... at k = 0 and -8·2^k q^{k/4} + ...
        let c0 = naive_c0(0, 3);
        assert_eq!(c0[&-24], BigInt::from(1));
        assert_eq!(c0[&0], BigInt::from(8));
        let c1 = naive_c1(2, 3);
        assert_eq!(c1[&12], BigInt::from(-32));
    }

    #[test]
    fn sigma3_values() {
        assert_eq!(sigma3(1), 1);
        assert_eq!(sigma3(5), 126);
        assert_eq!(sigma3(13), 2198);
    }

    #[test]
    fn cheap_criteria_pass_and_are_deterministic() {
        for id in [2, 9, 10, 11, 12] {
            let a = run_criterion(id, 3);
            let b = run_criterion(id, 3);
            assert!(a.passed, "{}", a.line());
            assert_eq!(a.to_json(), b.to_json());
        }
    }
}
