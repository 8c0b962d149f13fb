use dptorsion::invariants::*;
use dptorsion::lattice::lambda_k;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn inputs() -> impl Strategy<Value = InvariantInputs> {
    (1i64..=10)
        .prop_flat_map(|k| {
            (
                Just(k),
                0.01f64..100.0,
                0.01f64..100.0,
                0.01f64..100.0,
                prop::collection::vec(0.01f64..100.0, k as usize),
                -10.0f64..10.0,
            )
        })
        .prop_map(|(k, t, v, x, r, b)| InvariantInputs {
            k,
            tau_y_gamma: t,
            vol_y_gamma: v,
            xi_l1_norm: x,
            singular_ratios: r,
            bott_chern_integral: b,
        })
}

#[test]
fn c2_endpoints() {
    // k = 0 is the Enriques surface with its K3 cover
    let e = c2_integrals(0).unwrap();
    assert_eq!(e.int_c2_y, q(12, 1));
    assert_eq!(e.int_c2_x, q(24, 1));
    for k in 1..=10 {
        let c = c2_integrals(k).unwrap();
        // each A₁ point lowers ∫c₂ of the quotient by 3/4
        assert_eq!(c.int_c2_y, q(12, 1) - q(3 * k, 4));
        assert_eq!(c.int_c2_y_over_24 * BigInt::from(24), c.int_c2_y);
    }
}

#[test]
fn xi_exponent_vanishes() {
    for k in 1..=10 {
        assert!(xi_scaling_exponent(k).unwrap().is_zero(), "k = {k}");
    }
}

#[test]
fn disc_m_k_is_disc_of_rescaled_lambda() {
    // the K3 lattice is unimodular, so |disc(M_k)| = |disc(Λ_k(2))|
    for k in 1..=9 {
        let src = lambda_k(k as u32, false).rescale(2).unwrap();
        assert_eq!(disc_m_k(k).unwrap(), src.discriminant().abs(), "k = {k}");
        assert_eq!(disc_m_k(k).unwrap(), BigInt::from(1) << (12 - k), "k = {k}");
    }
    assert!(disc_m_k(10).is_err());
}

#[test]
fn comparison_ratio_defaults() {
    let r = bcov_comparison_ratio(1, 1, None, 1, 1).unwrap();
    assert_eq!(r.disc_plus_xtilde, BigInt::from(2048));
    assert_eq!(r.numeric, q(2048, 32));
    let r = bcov_comparison_ratio(3, 4, Some(8), 2, 1).unwrap();
    assert_eq!(r.numeric, q(1, 128) / q(4, 1) / q(1, 2));
    assert_eq!(r.symbol, "C(3)^8");
    assert!(bcov_comparison_ratio(3, 0, Some(8), 1, 1).is_err());
    assert!(bcov_comparison_ratio(10, 1, None, 1, 1).is_err());
}

#[test]
fn covolume_formula() {
    let v = covolume(10, 2, 16, 3.0).unwrap();
    assert!((v - 4.0 * 16.0 * 3.0 / 2048.0).abs() < 1e-15);
    assert!(covolume(10, 2, 16, 0.0).is_err());
}

#[test]
fn euler_numbers() {
    for k in 1..=10 {
        assert_eq!(BigRational::from_integer(BigInt::from(chi_orb(k).unwrap())), chi_orb_from_fixed_locus(k).unwrap());
    }
    assert!(chi_orb(0).is_err());
}

#[test]
fn rejects_bad_inputs() {
    let good = InvariantInputs {
        k: 2,
        tau_y_gamma: 1.0,
        vol_y_gamma: 1.0,
        xi_l1_norm: 1.0,
        singular_ratios: vec![1.0, 2.0],
        bott_chern_integral: 0.0,
    };
    assert!(log_tau_k(&good).is_ok());
    let bad = InvariantInputs { singular_ratios: vec![1.0], ..good.clone() };
    assert_eq!(log_tau_k(&bad).unwrap_err(), InvariantError::RatioCount { expected: 2, got: 1 });
    let bad = InvariantInputs { xi_l1_norm: -1.0, ..good.clone() };
    assert!(log_tau_k(&bad).is_err());
    assert!(good.rescale_xi(0.0).is_err());
}

proptest! {
    #[test]
    fn tau_k_is_invariant_under_xi_rescaling(inp in inputs(), c in 0.01f64..100.0) {
        let a = log_tau_k(&inp).unwrap();
        let b = log_tau_k(&inp.rescale_xi(c).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn tau_k_is_invariant_under_metric_change(
        inp in inputs(),
        seed in prop::collection::vec(0.01f64..100.0, 10),
        i in -10.0f64..10.0,
        v in 0.01f64..100.0,
    ) {
        let moved = anomaly_transport(&inp, &seed[..inp.k as usize], i, v).unwrap();
        let a = log_tau_k(&inp).unwrap();
        let b = log_tau_k(&moved).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        prop_assert_eq!(moved.vol_y_gamma, v);
    }

    #[test]
    fn bcov_from_tau_k(t in 0.01f64..100.0, phi in 0.01f64..100.0) {
        let b = tau_bcov_from_tau_k(t).unwrap();
        prop_assert!((b.ln() + 2.0 * t.ln()).abs() < 1e-12);
        let c = bcov_petersson_constant(b, phi).unwrap();
        prop_assert!((c - b.ln() + 0.5 * phi.ln()).abs() < 1e-12);
    }

    #[test]
    fn tau_k_from_tau_m_is_a_square_root(k in 1i64..=10, m in 0.01f64..100.0) {
        let o = tau_k_from_tau_m(k, m).unwrap();
        prop_assert!((o.numeric * o.numeric - m).abs() < 1e-12 * m);
        prop_assert_eq!(o.symbol, format!("C({k})^-1"));
    }
}
