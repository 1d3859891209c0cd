//! Property-based checks of the operator, the tensor form, fixed points and
//! the Jacobian.

use plankton_qso::fixed_points::{enumerate_fixed_points, Family};
use plankton_qso::simplex::{SimplexPoint, DIM};
use plankton_qso::stability::{bacteria_dim_spectrum, eigenvalues, jacobian};
use plankton_qso::tensor::{check_simplex_criterion, QsoTensor};
use plankton_qso::{Parameters, Qso};
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = f64> {
    (1u32..=1000).prop_map(|k| k as f64 / 1000.0)
}

fn qso() -> impl Strategy<Value = Qso> {
    proptest::array::uniform12(rate())
        .prop_filter_map("invalid rates", |r| Qso::new(Parameters::new(r).ok()?).ok())
}

fn point() -> impl Strategy<Value = SimplexPoint> {
    proptest::array::uniform6(0.0f64..1.0).prop_filter_map("degenerate", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3)
            .then(|| SimplexPoint::new(w.map(|v| v / s)).ok())
            .flatten()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn image_stays_on_simplex(q in qso(), x in point()) {
        let y = q.image(x.coords());
        prop_assert!(y.iter().all(|&v| v >= -1e-12));
        prop_assert!((y.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tensor_form_agrees(q in qso(), x in point()) {
        let t = QsoTensor::build(&q);
        prop_assert!(t.check_invariants().is_ok());
        let y = t.apply(&x).unwrap();
        let z = q.apply(&x).unwrap();
        prop_assert!(y.distance(&z) <= 1e-12);
        prop_assert!(t.is_l_volterra(4));
        prop_assert!(!t.is_l_volterra(5));
    }

    #[test]
    fn dom_never_drops_without_bacteria(q in qso(), x in point()) {
        let mut c = *x.coords();
        c[3] = 0.0;
        let s: f64 = c.iter().sum();
        prop_assume!(s > 1e-3);
        let x = SimplexPoint::new(c.map(|v| v / s)).unwrap();
        let y = q.apply(&x).unwrap();
        prop_assert_eq!(y[3], 0.0);
        prop_assert!(y[4] >= x[4]);
    }

    #[test]
    fn enumerated_points_are_fixed(q in qso()) {
        for fp in enumerate_fixed_points(&q, None) {
            prop_assert!(fp.feasible);
            prop_assert!(fp.residual <= 1e-10, "{} residual {}", fp.family, fp.residual);
            prop_assert!((fp.coordinates.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn determinant_is_product_of_eigenvalues(q in qso(), x in point()) {
        let j = jacobian(&q, x.coords());
        let det = nalgebra::Matrix6::from_fn(|r, c| j[r][c]).determinant();
        let prod = eigenvalues(&j).unwrap().iter().product::<num_complex::Complex64>();
        prop_assert!((prod.re - det).abs() <= 1e-9 * (1.0 + det.abs()));
        prop_assert!(prod.im.abs() <= 1e-9);
    }

    #[test]
    fn bacteria_dim_spectrum_matches(q in qso()) {
        prop_assume!(q.a(12) <= q.a(11));
        let l2 = enumerate_fixed_points(&q, None)
            .into_iter()
            .find(|f| f.family == Family::Lambda2)
            .unwrap();
        let mut numeric: Vec<f64> = eigenvalues(&jacobian(&q, &l2.coordinates)).unwrap().iter().map(|z| z.re).collect();
        let mut analytic = bacteria_dim_spectrum(&q).to_vec();
        numeric.sort_by(f64::total_cmp);
        analytic.sort_by(f64::total_cmp);
        for (n, a) in numeric.iter().zip(&analytic) {
            prop_assert!((n - a).abs() <= 1e-8);
        }
    }
}

#[test]
fn simplex_criterion_accepts_operator_tensor() {
    let q = Qso::new(Parameters::uniform(0.3).unwrap()).unwrap();
    let t = QsoTensor::build(&q);
    assert!(check_simplex_criterion(t.as_cubic()).unwrap());
    assert_eq!(DIM, t.as_cubic().dim());
}
