//! Property suites for the module invariants: algebraic laws of the
//! exterior algebra, serialization round trips, boundary nilpotency,
//! convergence orders, and the identities that back the derivative
//! machinery (Palais formula, d.d = 0, pull-back commutation).

use emforms_core::chains::{
    boundary, integrate_inner, parse_chain, refine, write_chain, Chain, Simplex,
};
use emforms_core::exterior::{
    cross_identity_check, mu_contract, multi_indices, two_form_to_vector, KCovector, Metric,
    Parity, VolumeForm,
};
use emforms_core::fields::{
    exterior_derivative, lattice, max_difference, FormField, PolyForm, PolyVector, VectorField,
};
use emforms_core::flows::{covariance_residual, pullback, Motion, RelativeMotion};
use emforms_core::induction::{poynting_residual, state_from_vector_fields, EMState};
use emforms_core::poly::Poly;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coeff() -> impl Strategy<Value = f64> {
    (-100i32..=100).prop_map(|x| f64::from(x) / 25.0)
}

fn covector(dim: usize, degree: usize, parity: Parity) -> impl Strategy<Value = KCovector> {
    let n = multi_indices(dim, degree).len();
    proptest::collection::vec(coeff(), n)
        .prop_map(move |c| KCovector::from_coeffs(dim, degree, parity, c).unwrap())
}

fn vector3() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(coeff(), 3)
}

proptest! {
    #[test]
    fn wedge_graded_anticommutativity(
        a in covector(3, 1, Parity::Even),
        b in covector(3, 2, Parity::Odd),
        c in covector(3, 1, Parity::Odd),
    ) {
        // (-1)^{1*2} = +1 and (-1)^{1*1} = -1, exactly
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        prop_assert_eq!(ab.coeffs(), ba.coeffs());
        let ac = a.wedge(&c).unwrap();
        let ca_neg = c.wedge(&a).unwrap().scaled(-1.0);
        prop_assert_eq!(ac.coeffs(), ca_neg.coeffs());
        // parity algebra
        prop_assert_eq!(ab.parity(), Parity::Odd);
        prop_assert_eq!(ac.parity(), Parity::Odd);
        prop_assert_eq!(c.wedge(&b).unwrap().parity(), Parity::Even);
    }

    #[test]
    fn repeated_contraction_annihilates(
        w in covector(4, 3, Parity::Even),
        v in proptest::collection::vec(coeff(), 4),
    ) {
        let once = w.contract(&v).unwrap();
        let twice = once.contract(&v).unwrap();
        prop_assert!(twice.norm() < 1e-12 * (1.0 + w.norm()));
        prop_assert_eq!(once.parity(), w.parity());
    }

    #[test]
    fn flux_map_round_trips(u in vector3()) {
        let mu = VolumeForm::standard(3);
        let w = mu_contract(&mu, &u, Parity::Odd).unwrap();
        let back = two_form_to_vector(&w, &mu).unwrap();
        for i in 0..3 {
            prop_assert!((back[i] - u[i]).abs() <= 1e-14 * (1.0 + u[i].abs()));
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn cross_identity_holds(u in vector3(), v in vector3()) {
        prop_assert!(cross_identity_check(&u, &v) <= 1e-12);
    }

    #[test]
    fn evaluation_is_alternating(
        w in covector(3, 2, Parity::Even),
        a in vector3(),
        b in vector3(),
    ) {
        let ab = w.apply(&[&a, &b]).unwrap();
        let ba = w.apply(&[&b, &a]).unwrap();
        prop_assert!((ab + ba).abs() <= 1e-12 * (1.0 + ab.abs()));
        prop_assert_eq!(w.apply(&[&a, &a]).unwrap(), 0.0);
    }

    #[test]
    fn chain_text_round_trip(
        verts in proptest::collection::vec(vector3(), 3),
        frame in vector3(),
        weight in -5i64..=5,
        flip in proptest::bool::ANY,
    ) {
        let mut s = Simplex::new(verts);
        if flip {
            s = s.with_inner_sign(-1);
        }
        s = s.with_outer_frame(vec![frame]);
        let mut chain = Chain::empty(3, 2);
        chain.push(weight, s);
        let back = parse_chain(&write_chain(&chain)).unwrap();
        prop_assert_eq!(chain, back);
    }

    #[test]
    fn boundary_is_nilpotent(
        verts in proptest::collection::vec(vector3(), 4),
        weight in -3i64..=3,
    ) {
        let mut chain = Chain::empty(3, 3);
        chain.push(weight, Simplex::new(verts));
        let bb = boundary(&boundary(&chain));
        prop_assert!(bb.terms().is_empty());
    }
}

// ---------------------------------------------------------------------------
// Seeded numeric invariants
// ---------------------------------------------------------------------------

fn random_poly(rng: &mut ChaCha8Rng, max_degree: u32) -> Poly {
    let mut p = Poly::constant(rng.random_range(-1.0..1.0));
    for var in 0..3 {
        for d in 1..=max_degree {
            if rng.random_bool(0.5) {
                p = p.add(&Poly::var(var).pow(d).scale(rng.random_range(-1.0..1.0)));
            }
        }
    }
    p
}

fn random_poly_form(rng: &mut ChaCha8Rng, degree: usize) -> PolyForm {
    let n = multi_indices(3, degree).len();
    PolyForm::new(3, degree, Parity::Even, (0..n).map(|_| random_poly(rng, 3)).collect()).unwrap()
}

#[test]
fn dd_vanishes_in_both_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..200 {
        let degree = i % 2; // 0- and 1-forms have nontrivial dd
        let pf = random_poly_form(&mut rng, degree);
        let points: Vec<Vec<f64>> =
            (0..20).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        // finite-difference mode
        let fd = FormField::new(3, degree, Parity::Even, {
            let pf = pf.clone();
            move |x, t| pf.eval(x, t)
        });
        let dd = exterior_derivative(&exterior_derivative(&fd));
        let worst = points.iter().map(|p| dd.sample(p, 0.0).norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-5, "fd-mode dd residual {worst}");
        // analytic mode
        let dd = exterior_derivative(&exterior_derivative(&pf.as_field()));
        let worst = points.iter().map(|p| dd.sample(p, 0.0).norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-12, "analytic dd residual {worst}");
    }
}

#[test]
fn palais_formula_agrees_with_coefficient_derivative() {
    // for constant argument fields the bracket vanishes and the Palais
    // formula reads dw(v, u) = d_v(w.u) - d_u(w.v); evaluate the right side
    // by directional finite differences, fully independent of the
    // coefficient-partial assembly used by exterior_derivative
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let h = 1e-5;
    for _ in 0..50 {
        let pf = random_poly_form(&mut rng, 1);
        let field = pf.clone().as_field();
        let d_field = exterior_derivative(&field);
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let u: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..10 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let pair = |y: &[f64], a: &[f64]| pf.eval(y, 0.0).apply(&[a]).unwrap();
            let shift = |dir: &[f64], s: f64| -> Vec<f64> {
                x.iter().zip(dir).map(|(xi, di)| xi + s * di).collect()
            };
            let d_v = (pair(&shift(&v, h), &u) - pair(&shift(&v, -h), &u)) / (2.0 * h);
            let d_u = (pair(&shift(&u, h), &v) - pair(&shift(&u, -h), &v)) / (2.0 * h);
            let palais = d_v - d_u;
            let direct = d_field.sample(&x, 0.0).apply(&[&v, &u]).unwrap();
            assert!(
                (palais - direct).abs() <= 1e-6 * (1.0 + direct.abs()),
                "palais {palais} vs direct {direct}"
            );
        }
    }
}

#[test]
fn pullback_commutes_with_d_for_affine_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let pts = lattice(3, 2, -0.6, 0.6);
    for _ in 0..20 {
        let f = random_poly_form(&mut rng, 1).as_field();
        // random affine motion: constant matrix close to the identity plus
        // a translation, interpolated in time
        let a: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { 1.0 } else { 0.0 } + rng.random_range(-0.3..0.3))
                    .collect()
            })
            .collect();
        let b: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
        let (a2, b2) = (a.clone(), b.clone());
        let affine = Motion::custom(3, move |x, t, tau| {
            let s = tau - t;
            let lin = emforms_core::linalg::mat_vec(&a2, x);
            (0..3).map(|i| x[i] + s * (lin[i] - x[i] + b2[i])).collect()
        });
        let tau = 1.0;
        let lhs = exterior_derivative(&pullback(&f, &affine, 0.0, tau));
        let rhs = pullback(&exterior_derivative(&f), &affine, 0.0, tau);
        let gap = max_difference(&lhs, &rhs, &pts, 0.0);
        assert!(gap <= 1e-6, "commutation gap {gap}");
        let _ = (&a, &b);
    }
}

#[test]
fn refinement_converges_at_second_order() {
    // once depth >= 3 the refinement differences shrink by at least a
    // factor 3 per level (midpoint rule is second order: factor ~4)
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..10 {
        let f = random_poly_form(&mut rng, 3).with_parity(Parity::Even);
        let tri = loop {
            let vs: Vec<Vec<f64>> =
                (0..3).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let s = Simplex::new(vs);
            if !s.is_degenerate() {
                break Chain::from_simplex(s);
            }
        };
        let field = f.as_field();
        let values: Vec<f64> = (2..=6)
            .map(|d| integrate_inner(&field, &tri, 0.0, d).unwrap())
            .collect();
        let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for k in 1..diffs.len() {
            if diffs[k - 1] > 1e-12 {
                assert!(
                    diffs[k] <= diffs[k - 1] / 3.0,
                    "difference did not shrink by 3x: {:?}",
                    diffs
                );
            }
        }
    }
}

#[test]
fn refine_preserves_signed_measure() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let area = PolyForm::new(
        3,
        2,
        Parity::Even,
        vec![Poly::constant(1.0), Poly::constant(-0.5), Poly::constant(0.25)],
    )
    .unwrap()
    .as_field();
    for _ in 0..20 {
        let vs: Vec<Vec<f64>> =
            (0..3).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let chain = Chain::from_simplex(Simplex::new(vs));
        let coarse = integrate_inner(&area, &chain, 0.0, 0).unwrap();
        let fine = integrate_inner(&area, &refine(&chain), 0.0, 0).unwrap();
        assert!((coarse - fine).abs() <= 1e-13 * (1.0 + coarse.abs()));
    }
}

#[test]
fn invariant_fields_have_covariant_derivatives() {
    // a field invariant under the relative motion (dz under any rotation
    // about z) satisfies the invariance form of the covariance lemma
    let f = FormField::constant(KCovector::basis(3, &[2], Parity::Even));
    let r = covariance_residual(
        &f,
        &Motion::translation(vec![0.2, -0.4, 0.6]),
        &RelativeMotion::rotation_z(0.9),
        0.3,
        &lattice(3, 2, -0.5, 0.5),
    )
    .unwrap();
    assert!(r <= 1e-4, "residual {r}");
}

#[test]
fn poynting_balances_for_identity_built_states() {
    // all-zero state balances trivially
    let zero_state = state_from_vector_fields(
        Some(VectorField::zero(3)),
        Some(VectorField::zero(3).with_parity(Parity::Odd)),
        Some(VectorField::zero(3).with_parity(Parity::Odd)),
        Some(VectorField::zero(3)),
        Some(VectorField::zero(3)),
        None,
    )
    .unwrap();
    let window = emforms_core::chains::unit_cube();
    let r = poynting_residual(&zero_state, &window, 0.0, 2).unwrap();
    assert_eq!(r.residual, 0.0);

    // random polynomial E, H with J := rot H - dD/dt and B evolving by
    // dB/dt = -rot E satisfy the static-frame laws by construction
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let g = Metric::euclidean(3);
    let mu = VolumeForm::standard(3);
    for _ in 0..5 {
        let e = PolyVector::new((0..3).map(|_| random_poly(&mut rng, 2)).collect(), Parity::Even);
        let h = PolyVector::new((0..3).map(|_| random_poly(&mut rng, 2)).collect(), Parity::Odd);
        let rot = |v: &PolyVector, parity: Parity| {
            let comps = v.comps();
            PolyVector::new(
                vec![
                    comps[2].partial(1).sub(&comps[1].partial(2)),
                    comps[0].partial(2).sub(&comps[2].partial(0)),
                    comps[1].partial(0).sub(&comps[0].partial(1)),
                ],
                parity,
            )
        };
        // D static, so J = rot H; B(t) = -t rot E
        let j = rot(&h, Parity::Even);
        let rot_e = rot(&e, Parity::Odd);
        let b = PolyVector::new(
            rot_e.comps().iter().map(|c| c.mul(&Poly::var(4)).scale(-1.0)).collect(),
            Parity::Odd,
        );
        let state = state_from_vector_fields(
            Some(e.as_field()),
            Some(b.as_field()),
            Some(h.as_field()),
            Some(PolyVector::new(vec![Poly::zero(); 3], Parity::Even).as_field()),
            Some(j.as_field()),
            None,
        )
        .unwrap();
        let r = poynting_residual(&state, &window, 0.0, 3).unwrap();
        assert!(r.residual <= 1e-3, "poynting residual {}", r.residual);
        assert!(r.faraday_precondition <= 1e-4, "faraday pre {}", r.faraday_precondition);
        assert!(r.ampere_precondition <= 1e-4, "ampere pre {}", r.ampere_precondition);
        let _ = (&g, &mu);
    }
}

#[test]
fn state_shape_gates() {
    // wrong degree or parity is rejected at insertion
    let odd_one = FormField::zero(3, 1, Parity::Odd);
    assert!(EMState::new().with_electric(odd_one.clone()).is_err());
    assert!(EMState::new().with_magnetic_winding(odd_one).is_ok());
    let even_two = FormField::zero(3, 2, Parity::Even);
    assert!(EMState::new().with_displacement_flux(even_two.clone()).is_err());
    assert!(EMState::new().with_magnetic_vortex(even_two).is_ok());
    let wrong_degree = FormField::zero(3, 2, Parity::Even);
    assert!(EMState::new().with_electric(wrong_degree).is_err());
}
