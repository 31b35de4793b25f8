//! Property tests over randomized inputs.

use freeform_core::functionals::{check_main_inequality, Tolerances};
use freeform_core::geometry::{make_cap, make_profile_shape, BaseShape, Layout, Perturbation};
use freeform_core::math::Mat;
use freeform_core::quadrature::{gauss_legendre, QuadratureSpec};
use freeform_core::reilly::{reilly_residual, PolynomialField};
use freeform_core::spaceform::{BallDomain, Potential, SpaceForm};
use freeform_core::symalg::{mean_curvatures, newton_maclaurin_check, newton_tensor_by_delta, SymmetricState};
use proptest::prelude::*;

fn space() -> impl Strategy<Value = SpaceForm> {
    prop_oneof![Just(SpaceForm::Hyperbolic), Just(SpaceForm::Euclidean), Just(SpaceForm::Spherical)]
}

/// Symmetric second fundamental form and SPD metric of size `n`.
fn forms(n: usize) -> impl Strategy<Value = (Mat, Mat)> {
    (
        prop::collection::vec(-2.0..2.0f64, n * n),
        prop::collection::vec(-0.4..0.4f64, n * n),
        prop::collection::vec(0.5..1.5f64, n),
    )
        .prop_map(move |(h, l, d)| {
            let h = Mat::from_fn(n, n, |i, j| h[i * n + j]).symmetrized();
            let l = Mat::from_fn(n, n, |i, j| match i.cmp(&j) {
                core::cmp::Ordering::Equal => d[i],
                core::cmp::Ordering::Greater => l[i * n + j],
                core::cmp::Ordering::Less => 0.0,
            });
            (h, l.mul(&l.transpose()))
        })
}

fn unit_vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 3).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newton_recursion_matches_delta((h, g) in (2usize..=5).prop_flat_map(forms)) {
        let st = SymmetricState::from_forms(&h, &g).unwrap();
        let n = h.rows();
        for (m, t) in st.newton.iter().enumerate() {
            let scale = 1.0 + t.max_abs();
            prop_assert!(newton_tensor_by_delta(&st.shape_operator, m).sub(t).max_abs() <= 1e-10 * scale);
            prop_assert!((t.trace() - (n - m) as f64 * st.mean[m]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn newton_maclaurin_in_the_positive_cone(kappa in prop::collection::vec(0.01..3.0f64, 2..=6)) {
        let h = mean_curvatures(&kappa);
        for k in 1..kappa.len() {
            let r = newton_maclaurin_check(&kappa, k).unwrap();
            prop_assert!(r.slack >= -1e-12 * (1.0 + r.lhs.abs()), "{kappa:?} k={k} {r:?}");
            prop_assert!(h[k] > 0.0);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1(n in 1usize..=20, c in prop::collection::vec(-1.0..1.0f64, 40)) {
        let (x, w) = gauss_legendre(n);
        let degree = 2 * n - 1;
        let poly = |t: f64| c[..=degree].iter().rev().fold(0.0, |acc, a| acc * t + a);
        let exact: f64 = (0..=degree).step_by(2).map(|j| 2.0 * c[j] / (j + 1) as f64).sum();
        let got: f64 = x.iter().zip(&w).map(|(t, wt)| wt * poly(*t)).sum();
        prop_assert!((got - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn model_radius_round_trips(s in space(), r in 0.05..2.5f64) {
        let m = s.radius_to_model(r).unwrap();
        prop_assert!((s.model_to_radius(m).unwrap() - r).abs() <= 1e-12 * r.max(1.0));
    }

    #[test]
    fn boundary_ratio_is_the_umbilicity(s in space(), r in 0.2..2.5f64, a in unit_vector(), p in unit_vector()) {
        let ball = BallDomain::new(s, r).unwrap();
        let pot = Potential::new(s, &a).unwrap();
        let len = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        let x: Vec<f64> = p.iter().map(|c| c / len * ball.model_radius).collect();
        prop_assume!(pot.value(&x).unwrap().abs() > 1e-2 * ball.model_radius);
        let ratio = pot.boundary_ratio(&ball, &x).unwrap();
        prop_assert!((ratio - ball.boundary_umbilicity()).abs() <= 1e-9 * (1.0 + ratio.abs()));
    }

    #[test]
    fn potentials_are_linear_in_the_direction(s in space(), a in unit_vector(), b in unit_vector(), p in unit_vector()) {
        let x: Vec<f64> = p.iter().map(|c| 0.5 * c).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
        let va = Potential::unnormalized(s, &a).value(&x).unwrap();
        let vb = Potential::unnormalized(s, &b).value(&x).unwrap();
        let vs = Potential::unnormalized(s, &sum).value(&x).unwrap();
        prop_assert!((vs - va - vb).abs() <= 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn caps_are_equality_cases(s in space(), frac in 0.2..4.0f64, k in 1usize..=2) {
        let ball = BallDomain::new(s, 1.0).unwrap();
        let cap = make_cap(s, &ball, frac * ball.model_radius, Layout::Reduced(3)).unwrap();
        let c = check_main_inequality(&cap, k, None, &QuadratureSpec::default(), &Tolerances::default()).unwrap();
        prop_assert!(c.normalized(c.lhs.abs().max(c.rhs.abs()), 3) <= 1e-10, "{c:?}");
    }

    #[test]
    fn reilly_identity_for_random_fields(
        s in space(),
        q in prop::collection::vec(-1.0..1.0f64, 9),
        lin in prop::collection::vec(-1.0..1.0f64, 3),
        cubic in prop::collection::vec(-0.5..0.5f64, 3),
    ) {
        let ball = BallDomain::new(s, 1.0).unwrap();
        let pert = Perturbation { r: vec![0.2, -0.1], z: vec![0.3, 0.1] };
        let imm = make_profile_shape(s, &ball, BaseShape::Cap(0.7 * ball.model_radius), &pert, 0.2, Layout::Full).unwrap();
        let f = PolynomialField {
            constant: 0.1,
            linear: lin,
            quadratic: Mat::from_fn(3, 3, |i, j| q[3 * i + j]).symmetrized(),
            cubic,
        };
        let v = PolynomialField {
            constant: 2.0,
            linear: vec![0.1, -0.2, 0.1],
            quadratic: Mat::identity(3).scale(0.3),
            cubic: vec![0.0; 3],
        };
        let led = reilly_residual(&imm, &v, &f, &QuadratureSpec::default()).unwrap();
        prop_assert!(led.relative() <= 1e-8, "{led:?}");
    }
}
