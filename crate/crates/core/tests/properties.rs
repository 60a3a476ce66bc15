use proptest::prelude::*;

use planestar::algebra::{rat, MultiIndex, Poly2, Rational};
use planestar::berezin::{berezin, verify_density, verify_exactness, verify_s};
use planestar::certify::{associativity_counterexample, monomials_up_to};
use planestar::diffop::{hochschild_b_ktable, in_admissible_class, DiffOp};
use planestar::quantize::{quantize, quantize_series, QuantizeConfig};
use planestar::starprod::{
    classify_p2, extract_poisson_p3, gauge_transform, normalize, GaugeOp, NormalizeConfig,
    PoissonSeries,
};

fn small_poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly2> {
    prop::collection::vec(
        (-3i64..=3, 1i64..=2, 0..=max_deg, 0..=max_deg),
        1..=max_terms,
    )
    .prop_map(move |ts| {
        Poly2::from_terms(
            ts.into_iter()
                .filter(|(_, _, i, j)| i + j <= max_deg)
                .map(|(n, d, i, j)| (MultiIndex::new(i, j), rat(n, d))),
        )
    })
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    (prop_oneof![-3i64..=-1, 1i64..=3], 1i64..=2).prop_map(|(n, d)| rat(n, d))
}

/// `U_k` that kill 1, x and y: every term has total order at least 2.
fn polar_gauge(order: usize) -> impl Strategy<Value = GaugeOp> {
    let term = (0u32..=2, 0u32..=2, small_poly(1, 2));
    prop::collection::vec(prop::collection::vec(term, 0..=2), order).prop_map(|orders| {
        GaugeOp::new(
            orders
                .into_iter()
                .map(|ts| {
                    DiffOp::from_terms(
                        ts.into_iter()
                            .map(|(a, b, c)| (MultiIndex::new(a, b.max(2 - a.min(2))), c)),
                    )
                })
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn quantization_is_associative_admissible_and_polarized(phi in small_poly(2, 3)) {
        let q = quantize(&phi, &QuantizeConfig::new(3)).unwrap();
        prop_assert!(q.product.is_associative());
        prop_assert!(q.product.spq_membership());
        prop_assert!(associativity_counterexample(q.product.orders(), 2).is_none());
        prop_assert_eq!(q.product.order_op(1), &planestar::diffop::KTable::dx_dy().to_bidiff().mul_poly(&phi));
        for k in 2..=3 {
            prop_assert!(in_admissible_class(q.k_table(k)));
            prop_assert!(!hochschild_b_ktable(q.k_table(k)).is_zero() || q.k_table(k).is_zero());
        }
        prop_assert!(q.solves.iter().all(|s| s.kernel_dim == 0));
        prop_assert_eq!(extract_poisson_p3(&q.product).coeff(0), phi);
    }

    #[test]
    fn affine_equivariance(phi in small_poly(2, 3), a in nonzero_rat(), b in -2i64..=2, c in nonzero_rat(), d in -2i64..=2) {
        let (b, d) = (rat(b, 1), rat(d, 1));
        let push = |f: &Poly2| f.affine_substitute(&a, &b, &c, &d).unwrap();
        let (ai, ci) = (a.recip(), c.recip());
        let pulled = phi.affine_substitute(&ai, &-(&b * &ai), &ci, &-(&d * &ci)).unwrap().scale(&(&a * &c));
        let m = quantize(&phi, &QuantizeConfig::new(3)).unwrap().product;
        let mp = quantize(&pulled, &QuantizeConfig::new(3)).unwrap().product;
        for f in monomials_up_to(3) {
            for g in monomials_up_to(3) {
                for k in 1..=3 {
                    prop_assert_eq!(push(&mp.order_op(k).apply(&f, &g)), m.order_op(k).apply(&push(&f), &push(&g)));
                }
            }
        }
    }

    #[test]
    fn classify_inverts_quantize_series(psi in prop::collection::vec(small_poly(2, 2), 1..=3)) {
        let psi = PoissonSeries::new(psi);
        let q = quantize_series(&psi, &QuantizeConfig::new(3)).unwrap();
        let back = classify_p2(&q.product, &QuantizeConfig::new(3)).unwrap();
        prop_assert_eq!(back, psi.truncate(2));
    }

    #[test]
    fn gauge_then_normalize_recovers_quantization(phi in small_poly(1, 2), u in polar_gauge(3)) {
        let q = quantize(&phi, &QuantizeConfig::new(3)).unwrap();
        let moved = gauge_transform(&q.product, &u).unwrap();
        prop_assert!(moved.is_associative());
        let out = normalize(&moved, &NormalizeConfig::default()).unwrap();
        prop_assert_eq!(&out.product, &q.product);
        for f in [Poly2::one(), Poly2::x(), Poly2::y()] {
            prop_assert!(out.gauge.orders().iter().all(|uk| uk.apply(&f).is_zero()));
        }
        let psi = classify_p2(&out.product, &QuantizeConfig::new(3)).unwrap();
        prop_assert_eq!(psi, PoissonSeries::constant(phi, 2));
    }

    #[test]
    fn berezin_identities(phi in small_poly(2, 2).prop_filter("nonzero", |p| !p.is_zero())) {
        let data = berezin(&phi, 2).unwrap();
        prop_assert!(data.s.at(0).is_empty());
        prop_assert!(verify_density(&data));
        prop_assert!(verify_exactness(&data));
        prop_assert!(verify_s(&data));
    }
}
