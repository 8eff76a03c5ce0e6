//! Cross-checks of the closed-form and solver paths against independent
//! oracles: series expansions, scalar Möbius maps, finite differences and
//! plain matrix algebra.

mod common;

use jbtriple::boundary::{
    algebraic_inner, algebraic_inner_frame, algebraic_norm, delta_for_epsilon, mean_value_check,
    random_maximal_tripotent, russo_dye_reconstruct, TestFunction, TestFunctionId,
};
use jbtriple::linalg::{condition_number, psd_sqrt};
use jbtriple::moebius::{
    k_isometry, random_automorphism, transvection_apply, transvection_derivative, BallAutomorphism,
};
use jbtriple::operators::{
    bergmann, bergmann_sqrt, bergmann_sqrt_operator_norm, quasi_inverse, quasi_inverse_series,
    verify_identity, Identity, IdentityOutcome,
};
use jbtriple::sampling::{random_element, seeded_rng, trial_rng, Radius};
use jbtriple::spectral::{classify_tripotent, spectral_decomposition};
use jbtriple::{Complex64, Element, Factor};
use nalgebra::DMatrix;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn quasi_inverse_matches_series() {
    for f in common::factors() {
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let x = random_element(&f, &mut rng, Radius::Uniform(0.95));
            let y = random_element(&f, &mut rng, Radius::Uniform(0.95));
            let direct = quasi_inverse(&f, &x, &y).unwrap();
            assert!(direct.residual <= 1e-9 * (1.0 + x.norm()));
            let series = quasi_inverse_series(&f, &x, &y, 1e-14).unwrap();
            assert!(direct.value.max_abs_diff(&series) <= 1e-10, "{f}");
        }
    }
}

#[test]
fn scalar_quasi_inverse_is_geometric() {
    let f = Factor::commutative(1).unwrap();
    let mut rng = seeded_rng(5);
    for _ in 0..100 {
        let x = random_element(&f, &mut rng, Radius::Uniform(0.9));
        let y = random_element(&f, &mut rng, Radius::Uniform(0.9));
        let (xs, ys) = (x.coords()[0], y.coords()[0]);
        let expected = xs / (1.0 - xs * ys.conj());
        let got = quasi_inverse(&f, &x, &y).unwrap().value.coords()[0];
        assert!((got - expected).norm() <= 1e-13);
    }
}

#[test]
fn invertibility_is_symmetric() {
    for f in common::factors() {
        let mut rng = seeded_rng(17);
        for _ in 0..100 {
            let x = random_element(&f, &mut rng, Radius::Uniform(1.2));
            let y = random_element(&f, &mut rng, Radius::Uniform(1.2));
            let cxy = condition_number(bergmann(&f, &x, &y).unwrap().matrix());
            let cyx = condition_number(bergmann(&f, &y, &x).unwrap().matrix());
            assert_eq!(cxy > 1e12, cyx > 1e12);
            if cxy.is_finite() && cyx.is_finite() {
                assert!((cxy.log10() - cyx.log10()).abs() < 1.0);
            }
        }
    }
}

fn matrix_of(x: &Element) -> DMatrix<Complex64> {
    x.to_matrix().unwrap()
}

#[test]
fn bergmann_sqrt_closed_form() {
    let f = Factor::matrix(2, 3).unwrap();
    let mut rng = seeded_rng(23);
    for _ in 0..50 {
        let a = random_element(&f, &mut rng, Radius::Uniform(0.95));
        let z = random_element(&f, &mut rng, Radius::Uniform(1.0));
        let am = matrix_of(&a);
        let left = psd_sqrt(&(DMatrix::identity(2, 2) - &am * am.adjoint())).unwrap();
        let right = psd_sqrt(&(DMatrix::identity(3, 3) - am.adjoint() * &am)).unwrap();
        let expected = left * matrix_of(&z) * right;
        let got = matrix_of(&bergmann_sqrt(&f, &a).unwrap().map.apply(&z).unwrap());
        assert!((got - expected).camax() <= 1e-10);
    }
}

#[test]
fn catalogue_holds_at_radius_point_six() {
    for f in common::factors() {
        for id in Identity::ALL {
            let mut rng = seeded_rng(29);
            for _ in 0..40 {
                let inputs: Vec<Element> = (0..id.arity())
                    .map(|_| random_element(&f, &mut rng, Radius::Uniform(0.6)))
                    .collect();
                match verify_identity(&f, id, &inputs).unwrap() {
                    o @ IdentityOutcome::Checked { .. } => assert!(o.passes(1e-9), "{id} in {f}"),
                    IdentityOutcome::Skipped { reason } => panic!("{id} skipped: {reason}"),
                }
            }
        }
    }
}

#[test]
fn scalar_transvection_is_mobius() {
    let f = Factor::commutative(1).unwrap();
    let mut rng = seeded_rng(31);
    for _ in 0..100 {
        let a = random_element(&f, &mut rng, Radius::Uniform(0.95));
        let x = random_element(&f, &mut rng, Radius::Uniform(1.0));
        let (av, xv) = (a.coords()[0], x.coords()[0]);
        let expected = (av + xv) / (1.0 + av.conj() * xv);
        let got = transvection_apply(&f, &a, &x).unwrap().coords()[0];
        assert!((got - expected).norm() <= 1e-12);
    }
}

#[test]
fn automorphisms_send_sphere_to_sphere() {
    for f in common::factors() {
        let mut rng = seeded_rng(37);
        for _ in 0..100 {
            let g = random_automorphism(&f, &mut rng, 0.9);
            let x = random_element(&f, &mut rng, Radius::Exact(1.0));
            assert!((g.apply(&x).unwrap().norm() - 1.0).abs() <= 1e-9);
            let back = g.inverse().unwrap().apply(&g.apply(&x).unwrap()).unwrap();
            assert!(back.max_abs_diff(&x) <= 1e-9);
        }
    }
}

#[test]
fn composition_and_swap_laws() {
    for f in common::factors() {
        let mut rng = seeded_rng(41);
        for _ in 0..30 {
            let a = random_element(&f, &mut rng, Radius::Uniform(0.9));
            let b = random_element(&f, &mut rng, Radius::Uniform(0.9));
            let x = random_element(&f, &mut rng, Radius::Uniform(1.0));
            let k = k_isometry(&f, &a, &b).unwrap();
            let gab = transvection_apply(&f, &a, &b).unwrap();
            let lhs = transvection_apply(&f, &a, &transvection_apply(&f, &b, &x).unwrap()).unwrap();
            let rhs = transvection_apply(&f, &gab, &k.apply(&x).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) <= 1e-9);
            let kba = k_isometry(&f, &b, &a).unwrap();
            let gba = transvection_apply(&f, &b, &a).unwrap();
            let swapped = kba.inverse().unwrap().apply(&gba).unwrap();
            assert!(gab.max_abs_diff(&swapped) <= 1e-9);
            // normal-form composition agrees pointwise
            let ga = BallAutomorphism::transvection(&a).unwrap();
            let gb = BallAutomorphism::transvection(&b).unwrap();
            let composed = ga.compose(&gb).unwrap();
            assert!(composed.apply(&x).unwrap().max_abs_diff(&lhs) <= 1e-9);
        }
    }
}

#[test]
fn derivative_matches_finite_differences() {
    let h = 1e-6;
    for f in common::factors() {
        let mut rng = seeded_rng(43);
        for _ in 0..20 {
            let a = random_element(&f, &mut rng, Radius::Uniform(0.8));
            let x0 = random_element(&f, &mut rng, Radius::Uniform(0.8));
            let d = transvection_derivative(&f, &a, &x0).unwrap();
            for j in 0..f.dim() {
                let e = Element::basis(&f, j).scale_real(h);
                let plus = transvection_apply(&f, &a, &(&x0 + &e)).unwrap();
                let minus = transvection_apply(&f, &a, &(&x0 - &e)).unwrap();
                let fd = (plus - &minus).scale_real(0.5 / h);
                let col = d.apply(&Element::basis(&f, j)).unwrap();
                let err = (&fd - &col).coord_norm() / col.coord_norm().max(1e-300);
                assert!(err <= 1e-5, "{f} col {j}: {err:e}");
            }
        }
    }
}

#[test]
fn example_non_preservation_of_tripotents() {
    let f = Factor::commutative(2).unwrap();
    let a = Element::from_reals(&f, &[0.5, 0.5]).unwrap();
    let e = Element::from_reals(&f, &[1.0, 0.0]).unwrap();
    let image = transvection_apply(&f, &a, &e).unwrap();
    assert!(image.max_abs_diff(&Element::from_reals(&f, &[1.0, 0.5]).unwrap()) <= 1e-15);
    let flags = classify_tripotent(&f, &image, 1e-9).unwrap();
    assert!(!flags.is_tripotent);
    assert!((flags.tripotent_residual - 0.375).abs() <= 1e-15);
}

#[test]
fn kaup_sauter_bound() {
    for f in common::factors() {
        let mut rng = seeded_rng(47);
        let u = random_maximal_tripotent(&f, &mut rng);
        for t in [0.9, 0.99, 0.999] {
            let n = bergmann_sqrt_operator_norm(&f, &u.scale_real(t)).unwrap();
            assert!(n <= 2.0 * (1.0 - t * t).sqrt());
        }
    }
}

#[test]
fn russo_dye_scalar_and_convergence() {
    let f = Factor::commutative(1).unwrap();
    let b = Element::from_reals(&f, &[0.3]).unwrap();
    let a = Element::from_reals(&f, &[1.0]).unwrap();
    assert!(russo_dye_reconstruct(&f, &b, &a, 512).unwrap().error <= 1e-10);

    for f in common::factors() {
        let mut rng = seeded_rng(53);
        for _ in 0..5 {
            let b = random_element(&f, &mut rng, Radius::Uniform(0.9));
            let a = random_maximal_tripotent(&f, &mut rng);
            let errs: Vec<f64> = [16, 64, 512]
                .iter()
                .map(|&n| russo_dye_reconstruct(&f, &b, &a, n).unwrap().error)
                .collect();
            // trapezoid error decays like ‖b‖^N down to rounding
            assert!(errs[1] <= errs[0] + 1e-14 && errs[2] <= errs[1] + 1e-14);
            assert!(errs[2] <= 1e-8);
        }
    }
}

#[test]
fn mean_value_for_linear_and_cubic() {
    for f in common::factors() {
        let mut rng = seeded_rng(59);
        for _ in 0..5 {
            let b = random_element(&f, &mut rng, Radius::Uniform(0.9));
            let a = random_element(&f, &mut rng, Radius::Exact(1.0));
            let lin = TestFunction::registered(TestFunctionId::Linear, &f, &mut rng);
            assert!(mean_value_check(&f, &lin, &b, &a, 256).unwrap() <= 1e-9);
            let cubic = TestFunction::registered(TestFunctionId::Cubic, &f, &mut rng);
            assert!(mean_value_check(&f, &cubic, &b, &a, 512).unwrap() <= 1e-8);
        }
    }
}

#[test]
fn algebraic_inner_product() {
    for f in common::factors() {
        let mut rng = seeded_rng(61);
        let e = random_maximal_tripotent(&f, &mut rng);
        let ee = algebraic_inner(&f, &e, &e).unwrap();
        assert!((ee - c(f.rank() as f64, 0.0)).norm() <= 1e-12);
        for _ in 0..1000 {
            let x = random_element(&f, &mut rng, Radius::Uniform(2.0));
            let n = x.norm();
            let na = algebraic_norm(&f, &x).unwrap();
            assert!(n * n <= na * na + 1e-12 && na * na <= f.rank() as f64 * n * n + 1e-12);
        }
        for _ in 0..50 {
            let x = random_element(&f, &mut rng, Radius::Uniform(1.0));
            let y = random_element(&f, &mut rng, Radius::Uniform(1.0));
            let canonical = algebraic_inner(&f, &x, &y).unwrap();
            let framed = algebraic_inner_frame(&f, &x, &y).unwrap();
            assert!((canonical - framed).norm() <= 1e-10, "{f}");
        }
    }
}

#[test]
fn delta_implication_in_inner_product_space() {
    // ‖z‖ ≤ ‖e‖ and |1 − ⟨z,e⟩/⟨e,e⟩| < δ imply ‖z − e‖ < ε
    let f = Factor::matrix(2, 2).unwrap();
    let mut rng = seeded_rng(67);
    let mut hits = 0;
    for trial in 0..10_000u64 {
        let e = random_maximal_tripotent(&f, &mut rng);
        let ne = algebraic_norm(&f, &e).unwrap();
        let eps = 0.05 + 0.5 * (trial % 10) as f64 / 10.0;
        let delta = delta_for_epsilon(ne, eps).unwrap();
        let w = random_element(&f, &mut rng, Radius::Uniform(3.0 * eps));
        let mut z = &e + &w;
        let nz = algebraic_norm(&f, &z).unwrap();
        if nz > ne {
            z = z.scale_real(ne / nz);
        }
        let mu = algebraic_inner(&f, &z, &e).unwrap() / (ne * ne);
        if (1.0 - mu).norm() < delta {
            hits += 1;
            let dist = algebraic_norm(&f, &(&z - &e)).unwrap();
            assert!(dist < eps);
        }
    }
    assert!(hits > 100, "only {hits} samples exercised the implication");
}

#[test]
fn trial_streams_are_independent_of_order() {
    let f = Factor::matrix(2, 2).unwrap();
    let a = random_element(&f, &mut trial_rng(9, 3), Radius::Uniform(1.0));
    let _ = random_element(&f, &mut trial_rng(9, 2), Radius::Uniform(1.0));
    let b = random_element(&f, &mut trial_rng(9, 3), Radius::Uniform(1.0));
    assert_eq!(a, b);
}

#[test]
fn frames_survive_repeated_singular_values() {
    // U·diag(1,1,s)·V* has a repeated top value; the frame must still
    // reconstruct it and its tripotent part must be exact
    let f = Factor::matrix(3, 3).unwrap();
    let mut rng = seeded_rng(71);
    for _ in 0..200 {
        let u = jbtriple::sampling::haar_unitary(3, &mut rng);
        let v = jbtriple::sampling::haar_unitary(3, &mut rng);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.3, 0.0),
        ]));
        let x = Element::from_matrix(&f, &(&u * d * v.adjoint())).unwrap();
        let s = spectral_decomposition(&f, &x).unwrap();
        assert!(s.reconstruct().max_abs_diff(&x) <= 1e-12);
        let e = s.frame[0].clone() + &s.frame[1];
        let expected =
            Element::from_matrix(&f, &(u.columns(0, 2) * v.columns(0, 2).adjoint())).unwrap();
        assert!(e.max_abs_diff(&expected) <= 1e-12);
    }
}
