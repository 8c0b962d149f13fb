use std::f64::consts::PI;

use dptorsion::spectral::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const CATALAN: f64 = 0.915_965_594_177_219;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `Σ_{k<n} f(k)` plus the integral tail `∫_n^∞ f` by the midpoint rule.
fn direct_sum(f: impl Fn(f64) -> f64, n: usize, tail: impl Fn(f64) -> f64) -> f64 {
    (0..n).map(|k| f(k as f64)).sum::<f64>() + tail(n as f64 - 0.5)
}

#[test]
fn hurwitz_special_values() {
    assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
    assert!((hurwitz_zeta(-1.0, 1.0) + 1.0 / 12.0).abs() < 1e-14);
    for a in [0.25, 0.5, 1.5, 3.0] {
        assert!((hurwitz_zeta(0.0, a) - (0.5 - a)).abs() < 1e-13);
    }
    // ζ′(0, a) = ln Γ(a) − ½ ln 2π
    let (_, d) = hurwitz_zeta_with_derivative(0.0, 0.5);
    assert!((d + 0.5 * 2f64.ln()).abs() < 1e-13);
    let (_, d) = hurwitz_zeta_with_derivative(0.0, 1.0);
    assert!((d + 0.5 * (2.0 * PI).ln()).abs() < 1e-13);
    assert!((gamma_prime_one() + EULER_GAMMA).abs() < 1e-14);
    assert!((digamma(0.5) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-13);
}

#[test]
fn hurwitz_matches_direct_sum() {
    for (s, a) in [(3.0, 0.7), (2.5, 1.5), (4.0, 0.25)] {
        let direct = direct_sum(|k| (k + a).powf(-s), 100_000, |x| (x + a).powf(1.0 - s) / (s - 1.0));
        assert!((hurwitz_zeta(s, a) - direct).abs() < 1e-10, "s = {s}, a = {a}");
    }
}

#[test]
fn p1_zeta_matches_direct_sum() {
    for c in [0.5, 1.0, 2.0] {
        // Σ (2k+1)/(c k(k+1))², tail ≈ ∫ 2x/x⁴
        let direct = direct_sum(
            |k| if k == 0.0 { 0.0 } else { (2.0 * k + 1.0) / (c * k * (k + 1.0)).powi(2) },
            200_000,
            |x| 1.0 / (c * c * x * x),
        );
        let z = p1_zeta(2.0, c, 60).unwrap();
        assert!((z - direct).abs() < 1e-9, "c = {c}: {z} vs {direct}");
    }
    assert!(matches!(p1_zeta(2.0, 1.0, 1), Err(SpectralError::JMaxTooSmall(_))));
}

#[test]
fn p1_zeta0_from_heat_trace() {
    // Σ_{k≥1}(2k+1)e^{−tk(k+1)} = 1/t − 2/3 + t/15 + O(t²)
    for t in [1e-2, 3e-3, 1e-3] {
        let r = p1_heat_trace(t) - 1.0 / t;
        assert!((r + 2.0 / 3.0 - t / 15.0).abs() < 10.0 * t * t, "t = {t}: {r}");
    }
    let p = p1_torsion_zeta(1.0, 60).unwrap();
    assert!((p.zeta0 + 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn p1_zeta_derivative_by_difference() {
    for c in [0.5, 1.0, PI] {
        let p = p1_torsion_zeta(c, 60).unwrap();
        let h = 1e-4;
        let d = (p1_zeta(h, c, 60).unwrap() - p1_zeta(-h, c, 60).unwrap()) / (2.0 * h);
        assert!((d - p.zeta_prime0).abs() < 5e-8, "c = {c}: {d} vs {}", p.zeta_prime0);
        assert!((p1_zeta(1e-9, c, 60).unwrap() - p.zeta0).abs() < 1e-7);
        assert!((p.tau - p.zeta_prime0.exp()).abs() < 1e-15 * p.tau);
    }
}

#[test]
fn p1_scaling_exponent_agrees_with_td_prime() {
    // Td′(x) = 1/2 + x/6 − x³/180 + x⁵/5040 + …
    let td = td_prime_series(6).unwrap();
    assert_eq!(td[0], q(1, 2));
    assert_eq!(td[1], q(1, 6));
    assert_eq!(td[2], q(0, 1));
    assert_eq!(td[3], q(-1, 180));
    for x in [0.1f64, 0.3] {
        let exact = x / (1.0 - (-x).exp()) * (1.0 / x - 1.0 / (x.exp() - 1.0));
        let series: f64 = td.iter().enumerate().map(|(k, c)| num_traits::ToPrimitive::to_f64(c).unwrap() * x.powi(k as i32)).sum();
        assert!((exact - series).abs() < 1e-5 * x.powi(7), "{x}");
    }
    // P¹: ∫ Td′ = 2 · td[1]
    let e = bost_scaling_exponent(1, &[1, 0], &(&td[1] * BigRational::from_integer(BigInt::from(2)))).unwrap();
    assert_eq!(e, q(-2, 3));
    assert!(bost_scaling_exponent(2, &[1, 0], &td[1]).is_err());
    assert!(td_prime_series(9).is_err());
}

#[test]
fn square_torus() {
    assert!((square_torus_zeta(0.0) + 1.0).abs() < 1e-13);
    assert!((square_torus_zeta(2.0) - 4.0 * PI * PI / 6.0 * CATALAN).abs() < 1e-12);
    // lattice sum in a disc of radius R, tail ≈ ∫_R^∞ 2πr·r⁻⁴ dr = π/R²
    let r = 600i64;
    let mut direct = 0.0;
    for m in -r..=r {
        for n in -r..=r {
            let s = (m * m + n * n) as f64;
            if s > 0.0 && s <= (r * r) as f64 {
                direct += 1.0 / (s * s);
            }
        }
    }
    direct += PI / (r * r) as f64;
    assert!((square_torus_zeta(2.0) - direct).abs() < 1e-4, "{direct}");
}

#[test]
fn cone_constants_in_dimension_two() {
    let k = cone_constants(2);
    assert!((k.omega - 2.0 * PI).abs() < 1e-14);
    assert!((k.d_n - 0.5).abs() < 1e-15);
    assert!((k.d_n_prime - 0.25).abs() < 1e-15);
    assert!((k.c_n - 2.25).abs() < 1e-14);
    // ω₃ = 4π, ω₄ = 2π²
    assert!((cone_constants(3).omega - 4.0 * PI).abs() < 1e-13);
    assert!((cone_constants(4).omega - 2.0 * PI * PI).abs() < 1e-13);
}

#[test]
fn alternating_factor_vanishes() {
    assert_eq!(alternating_factor(1), -1);
    for n in 2..=20 {
        assert_eq!(alternating_factor(n), 0, "n = {n}");
    }
}

#[test]
fn cone_divergence_coefficient() {
    let deltas = [1e-1, 1e-2, 1e-3, 1e-4];
    for n in [2, 3, 4] {
        let fit = cone_divergence_fit(n, &deltas, 1e-12).unwrap();
        assert!(fit.relative_error < 1e-3, "n = {n}: {fit:?}");
        assert!(fit.coefficient > 0.0);
    }
    let r = cone_zeta_derivative(&ConeZetaParams { n: 2, delta: 1e-2, tol: 1e-12 }).unwrap();
    assert_eq!(r.partial_torsion, 0.0);
    assert!(r.quad_error < 1e-10);
    assert!(cone_zeta_derivative(&ConeZetaParams { n: 2, delta: 2.0, tol: 1e-12 }).is_err());
    assert!(cone_divergence_fit(2, &[0.1], 1e-12).is_err());
}

#[test]
fn broken_spectrum_is_rejected() {
    let mut s = HodgeSpectrum::zero();
    assert!(bcov_surface_identity(&s).unwrap().equal);
    s.zeta_prime0[0][1] = q(1, 1);
    assert!(matches!(bcov_surface_identity(&s), Err(SpectralError::ConstraintsViolated(_))));
    let mut s = HodgeSpectrum::zero();
    s.zeta0[1][1] = q(3, 1);
    assert!(bcov_surface_identity(&s).is_err());
}

proptest! {
    #[test]
    fn bcov_identity_holds(seed in any::<u64>()) {
        let s = HodgeSpectrum::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let r = bcov_surface_identity(&s).unwrap();
        prop_assert!(r.equal);
        prop_assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn p1_rescaling(c in 0.1f64..5.0, lambda in 0.1f64..20.0) {
        // τ(λg)/τ(g) = λ^{ζ(0)}: the spectrum of λg is that of g divided by λ
        let a = p1_torsion_zeta(c, 60).unwrap();
        let b = p1_torsion_zeta(c / lambda, 60).unwrap();
        prop_assert!((b.zeta_prime0 - a.zeta_prime0 - a.zeta0 * lambda.ln()).abs() < 1e-12);
    }
}
