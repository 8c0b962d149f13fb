use std::f64::consts::PI;

use dptorsion::ehgeometry::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn point(v: [f64; 4]) -> ConePoint {
    ConePoint::new(C64::new(v[0], v[1]), C64::new(v[2], v[3])).unwrap()
}

fn point_strategy() -> impl Strategy<Value = ConePoint> {
    prop::array::uniform4(-3.0f64..3.0)
        .prop_filter("away from the origin", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(point)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Fubini–Study on the affine chart of P², from `log(1 + ∥z∥²)`.
fn fubini_study(z: &ConePoint) -> HermitianForm2 {
    let s = z.norm_sqr();
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            m[a][b] = -z.z[a].conj() * z.z[b] / ((1.0 + s) * (1.0 + s));
        }
        m[a][a] += 1.0 / (1.0 + s);
    }
    HermitianForm2(m)
}

#[test]
fn fubini_study_density_and_total() {
    // c₂ density of FS with respect to Lebesgue measure: 6/(π²(1+s)³)
    for r in [0.1, 0.7, 1.0, 2.5, 4.0] {
        let z = ConePoint::radial(r);
        let d = chern2_density(&fubini_study, &z, r.min(1.0 / r) * 1e-3);
        let exact = 6.0 / (PI * PI * (1.0 + r * r).powi(3));
        assert!(rel(d, exact) < 1e-4, "r = {r}: {d} vs {exact}");
    }
    // ∫ c₂ = χ(P²) = 3; the line at infinity has measure zero
    let ri = chern2_radial_integral_of(&fubini_study, 1e-3, 1e3, 400, 1e-3).unwrap();
    assert!((ri.total() - 3.0).abs() < 1e-3, "{ri:?}");
}

#[test]
fn chern2_is_three_halves_for_every_eps() {
    let vals: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&e| {
            let r = chern2_radial_integral(e, 40.0 * e.sqrt(), 400).unwrap();
            assert!(r.decay_exponent <= -6.0, "{r:?}");
            assert!(r.full_integral > 0.0);
            r.value
        })
        .collect();
    for v in &vals {
        assert!((v - 1.5).abs() < 0.02, "{vals:?}");
    }
    let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-3, "{vals:?}");
}

#[test]
fn chern2_density_is_positive() {
    let g = |z: &ConePoint| eh_metric(z, 1.0).unwrap();
    for r in [0.2, 0.5, 1.0, 3.0, 10.0] {
        assert!(chern2_density(&g, &ConePoint::radial(r), r * 1e-3) > 0.0);
    }
}

#[test]
fn finite_difference_hessian_is_second_order() {
    let z = point([0.4, -0.3, 0.8, 0.2]);
    let exact = eh_metric(&z, 0.6).unwrap();
    let err = |h: f64| complex_hessian(|p| eh_potential(p, 0.6), &z, h).max_abs_diff(&exact);
    let (e1, e2) = (err(2e-2), err(1e-2));
    let slope = (e1 / e2).log2();
    assert!((slope - 2.0).abs() < 0.2, "slope {slope} from {e1:e}, {e2:e}");
}

#[test]
fn glued_metric_matches_pieces() {
    let (eps, delta) = (0.01, 0.5);
    for c in [Cutoff::Smoothstep7, Cutoff::Smooth] {
        // ρ_δ ≡ 1 inside ∥z∥ ≤ δ
        let z = ConePoint::radial(0.3);
        let g = glued_metric(&z, eps, delta, c).unwrap();
        assert!(g.max_abs_diff(&eh_metric(&z, eps).unwrap()) < 1e-6);
        // ρ_δ ≡ 0 outside 2δ
        let z = point([0.9, 0.3, -0.4, 0.2]);
        let g = glued_metric(&z, eps, delta, c).unwrap();
        assert!(g.max_abs_diff(&HermitianForm2::identity()) < 1e-8);
    }
}

#[test]
fn error_term_decays() {
    // sup over shells r ∈ [2, 40] of |E(z,1)|(1+r)² stays bounded
    let mut sup: f64 = 0.0;
    for i in 0..=200 {
        let r = 2.0 * 20f64.powf(i as f64 / 200.0);
        sup = sup.max(error_term(&ConePoint::radial(r), 1.0).abs() * (1.0 + r).powi(2));
    }
    assert!(sup < 1.5, "{sup}");
    // E(z,1) = −1/(2s) + O(s⁻²)
    let r = 1e3;
    let e = error_term(&ConePoint::radial(r), 1.0);
    assert!((e * r * r + 0.5).abs() < 1e-5, "{e}");
    assert_eq!(error_term(&ConePoint::radial(1.0), 0.0), 0.0);
}

#[test]
fn positivity_probe_is_monotone_with_margin() {
    let grid: Vec<f64> = (0..12).map(|i| 1e-3 * 2f64.powi(i)).collect();
    for c in [Cutoff::Smoothstep7, Cutoff::Smooth] {
        let rep = positivity_probe(c, 0.5, &grid).unwrap();
        assert!(rep.monotone, "{rep:?}");
        assert!(rep.margins[0] > 0.9, "ε → 0 should approach the Euclidean metric");
        let half = min_eigenvalue_on_annulus(rep.eps_rho / 2.0, 0.5, c, &annulus_grid(0.5, 161)).unwrap();
        assert!(half >= 0.1, "{c:?}: ε(ρ) = {}, margin at half = {half}", rep.eps_rho);
    }
    assert_eq!(positivity_probe(Cutoff::Smooth, 0.5, &[50.0]).unwrap_err(), EhError::NoPositiveEpsilon);
}

#[test]
fn quasi_isometry_constants_stabilise() {
    let delta = 0.5;
    let radii = annulus_grid(delta, 81);
    let mut prev: Option<(f64, f64)> = None;
    for ratio in [1e-2, 1e-3, 1e-4] {
        let (lo, hi) = quasi_isometry_bounds(ratio * delta * delta, delta, Cutoff::Smoothstep7, &radii).unwrap();
        assert!(lo > 0.5 && hi < 2.0, "{lo} {hi}");
        if let Some((a, b)) = prev {
            // the constants only tighten as ε/δ² → 0
            assert!(lo >= a - 1e-9 && hi <= b + 1e-9);
        }
        prev = Some((lo, hi));
    }
}

#[test]
fn exceptional_curve_restriction() {
    let eps = 0.8;
    let ts: Vec<C64> = [0.0, 0.5, 1.0, 3.0].iter().map(|&t| C64::new(t, 0.0)).collect();
    let rep = exceptional_restriction_check(eps, &ts).unwrap();
    for row in &rep.rows {
        let last = *row.deviations.last().unwrap();
        assert!(last.abs() < 1e-5, "{row:?}");
        // g_tt̄ - ε/(1+|t|²)² is quartic in σ
        assert!((row.order - 4.0).abs() < 0.05, "{row:?}");
        let t2 = row.t[0] * row.t[0] + row.t[1] * row.t[1];
        let s = *row.sigmas.last().unwrap();
        let lead = s.powi(4) * (1.0 + 2.0 * t2) * (1.0 + t2).powi(2) / (2.0 * eps * eps);
        assert!(rel(last.abs(), lead) < 1e-2, "{last} vs {lead}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monge_ampere(z in point_strategy(), eps in 0.01f64..1.0) {
        let g = eh_metric(&z, eps).unwrap();
        prop_assert!(g.is_hermitian(1e-12));
        prop_assert!((g.det() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn potential_scaling(z in point_strategy(), eps in 0.01f64..1.0, d in 0.1f64..3.0) {
        prop_assert!(rel(eh_potential(&z.scale(d), eps), d * d * eh_potential(&z, eps / (d * d))) < 1e-12);
    }

    #[test]
    fn error_term_scaling(z in point_strategy(), eps in 0.01f64..1.0) {
        let lhs = error_term(&z, eps);
        prop_assert!(rel(lhs, eps * error_term(&z.scale(1.0 / eps.sqrt()), 1.0)) < 1e-12);
        prop_assert!(rel(lhs, eh_potential(&z, eps) - z.norm_sqr()) < 1e-6);
        let (e1, e2) = error_split(&z.scale(1.0 / eps.sqrt()));
        prop_assert!(rel(lhs, eps * (e1 + e2)) < 1e-12);
    }

    #[test]
    fn glued_scaling(z in point_strategy(), eps in 0.001f64..0.5, d in 0.1f64..1.0, smooth in any::<bool>()) {
        let c = if smooth { Cutoff::Smooth } else { Cutoff::Smoothstep7 };
        let lhs = glued_potential(&z, eps, d, c);
        let rhs = d * d * glued_potential(&z.scale(1.0 / d), eps / (d * d), 1.0, c);
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn cutoffs_are_monotone(t in 0.0f64..3.0, dt in 0.0f64..0.5) {
        for c in [Cutoff::Smoothstep7, Cutoff::Smooth] {
            let (a, b) = (c.rho(t), c.rho(t + dt));
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b <= a + 1e-15);
        }
    }
}
