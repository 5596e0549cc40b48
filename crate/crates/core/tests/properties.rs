use ericksen_core::leslie::{dissipation_density, leslie_stress, leslie_stress_discrete, leslie_stress_unsorted};
use ericksen_core::{check_dissipativity, contract42, outer, LeslieCoefficients, Mat3, Tensor4, Vec3};
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-2.0..2.0f64).prop_map(Vec3)
}

fn mat3() -> impl Strategy<Value = Mat3> {
    prop::array::uniform3(prop::array::uniform3(-2.0..2.0f64)).prop_map(Mat3)
}

fn mus() -> impl Strategy<Value = [f64; 6]> {
    (
        prop::array::uniform6(-2.0..2.0f64),
        0.05..2.0f64,
        0.1..2.0f64,
    )
        .prop_map(|(mut m, gap, mu4)| {
            m[2] = m[1] + gap.max(0.1);
            m[3] = mu4;
            m
        })
}

/// Parodi sets with `μ₁ ≥ 0` and a large `μ₅`, most of which are dissipative.
fn likely_dissipative() -> impl Strategy<Value = [f64; 6]> {
    mus().prop_map(|mut m| {
        m[0] = m[0].abs();
        m[4] = m[4].abs() + 2.0;
        m[5] = m[4] + m[1] + m[2];
        m
    })
}

fn close(a: &Mat3, b: &Mat3, tol: f64) -> bool {
    (*a - *b).max_abs() <= tol * a.max_abs().max(1.0)
}

proptest! {
    #[test]
    fn sym_and_skw_split_orthogonally(a in mat3(), b in mat3()) {
        prop_assert!(close(&(a.sym() + a.skw()), &a, 1e-15));
        prop_assert!(close(&a.sym(), &a.sym().transpose(), 0.0));
        prop_assert!(close(&a.skw(), &a.skw().transpose().scale(-1.0), 0.0));
        prop_assert!(a.sym().frob(&b.skw()).abs() <= 1e-14 * (a.norm() * b.norm()).max(1.0));
    }

    #[test]
    fn frobenius_pairing_of_outer_products(a in vec3(), b in vec3(), m in mat3()) {
        let lhs = outer(&a, &b).frob(&m);
        let rhs = a.dot(&m.mul_vec(&b));
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
        prop_assert!((m.tr_mul_vec(&a) - m.transpose().mul_vec(&a)).max_abs() <= 1e-15);
    }

    #[test]
    fn fourth_order_quadratic_form_matches_contraction(a in mat3(), w in prop::array::uniform3(0.0..3.0f64)) {
        let g = Tensor4::identity().scale(w[0]) + Tensor4::trace_trace().scale(w[1]) + Tensor4::transposition().scale(w[2]);
        let q = g.quadratic(&a);
        prop_assert!((q - a.frob(&contract42(&g, &a))).abs() <= 1e-12 * q.abs().max(1.0));
        prop_assert!(close(&contract42(&Tensor4::identity(), &a), &a, 1e-15));
        prop_assert!(g.is_pair_symmetric());
    }

    #[test]
    fn stress_forms_agree(mu in mus(), d in vec3(), q in vec3(), e in vec3(), gv in mat3()) {
        let c = LeslieCoefficients::new(mu).unwrap();
        let e_sub = gv.sym().mul_vec(&d).scale(-c.lambda) - q.scale(c.gamma);
        prop_assert!(close(&leslie_stress(&c, &d, &e_sub, &gv), &leslie_stress_discrete(&c, &d, &q, &gv), 1e-12));
        prop_assert!(close(&leslie_stress(&c, &d, &e, &gv), &leslie_stress_unsorted(&c, &d, &e, &gv), 1e-12));
    }

    #[test]
    fn parodi_sets_have_no_cross_term(mu in mus()) {
        let mut mu = mu;
        mu[5] = mu[4] + mu[1] + mu[2];
        let c = LeslieCoefficients::new(mu).unwrap();
        prop_assert!(c.kappa().abs() <= 1e-14);
    }

    #[test]
    fn accepted_sets_dissipate(mu in likely_dissipative(), d in vec3(), q in vec3(), gv in mat3()) {
        let c = LeslieCoefficients::new(mu).unwrap();
        prop_assume!(check_dissipativity(&c).accepted());
        let scale = gv.norm_sq() * (1.0 + d.norm_sq()).powi(2) + q.norm_sq();
        prop_assert!(dissipation_density(&c, &d, &q, &gv) >= -1e-12 * scale);
    }
}
