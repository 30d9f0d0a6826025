use poslab::decide::{
    contains_positive, contains_strictly_positive, hull_contains_origin, sign_oracle_hyperplane, sign_oracle_line,
    verify_hull_certificate, verify_positive_certificate, verify_strict_certificate, DEFAULT_TOL,
};
use poslab::linalg::{gaussian_matrix, haar_subspace, kernel_basis, random_orthogonal, RngStream, SamplingMethod};
use poslab::{Matrix, PointCloud};
use proptest::prelude::*;

const TOL: f64 = DEFAULT_TOL;

#[test]
fn lines_agree_with_sign_oracle() {
    for n in 2..=10usize {
        let root = RngStream::new(100 + n as u64);
        for i in 0..2000 {
            let b = haar_subspace::<f64, _>(n, 1, &mut root.derive(i), SamplingMethod::Span).unwrap();
            let v = b.basis().column(0);
            let d = contains_positive(&b, TOL).unwrap();
            assert_eq!(d.feasible, sign_oracle_line(&v).unwrap(), "n={n} i={i}");
            if let Some(t) = &d.certificate {
                assert!(verify_positive_certificate(&b, t, TOL));
            }
        }
    }
}

#[test]
fn hyperplanes_agree_with_sign_oracle() {
    for n in 2..=10usize {
        let root = RngStream::new(200 + n as u64);
        for i in 0..2000 {
            let a: Matrix<f64> = gaussian_matrix(1, n, &mut root.derive(i));
            let b = kernel_basis(&a).unwrap();
            let d = contains_positive(&b, TOL).unwrap();
            assert_eq!(d.feasible, sign_oracle_hyperplane(a.row(0)).unwrap(), "n={n} i={i}");
            if let Some(t) = &d.certificate {
                assert!(verify_positive_certificate(&b, t, TOL));
            }
        }
    }
}

#[test]
fn hull_agrees_with_kernel() {
    for n in 2..=7usize {
        for d in 1..n {
            let root = RngStream::new((n * 10 + d) as u64);
            for i in 0..500 {
                let a: Matrix<f64> = gaussian_matrix(d, n, &mut root.derive(i));
                let h = hull_contains_origin(&PointCloud::from_columns(&a), TOL).unwrap();
                let k = contains_positive(&kernel_basis(&a).unwrap(), TOL).unwrap();
                if !h.boundary && !k.boundary {
                    assert_eq!(h.feasible, k.feasible, "n={n} d={d} i={i}");
                }
            }
        }
    }
}

fn max_angular_gap(a: &Matrix<f64>) -> f64 {
    let mut angles: Vec<f64> = (0..a.cols()).map(|j| a[(1, j)].atan2(a[(0, j)])).collect();
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
    angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
}

#[test]
fn hull_agrees_with_planar_angle_oracle() {
    let root = RngStream::new(77);
    for n in 2..=8usize {
        for i in 0..500 {
            let a: Matrix<f64> = gaussian_matrix(2, n, &mut root.derive(i * 16 + n as u64));
            let h = hull_contains_origin(&PointCloud::from_columns(&a), TOL).unwrap();
            // Origin outside the hull iff some gap between consecutive directions exceeds π.
            assert_eq!(h.feasible, max_angular_gap(&a) <= std::f64::consts::PI, "n={n} i={i}");
            if let Some(l) = &h.certificate {
                assert!(verify_hull_certificate(&PointCloud::from_columns(&a), l, TOL));
            }
        }
    }
}

#[test]
fn strict_and_weak_decisions_are_consistent() {
    let root = RngStream::new(9);
    for i in 0..2000 {
        let b = haar_subspace::<f64, _>(6, 3, &mut root.derive(i), SamplingMethod::Kernel).unwrap();
        let weak = contains_positive(&b, TOL).unwrap();
        let strict = contains_strictly_positive(&b, TOL).unwrap();
        if strict.feasible {
            assert!(weak.feasible);
            assert!(verify_strict_certificate(&b, strict.certificate.as_ref().unwrap(), TOL));
        }
        if !weak.boundary {
            // Off the boundary a positive vector can be perturbed inside the subspace.
            assert_eq!(weak.feasible, strict.feasible);
        }
    }
}

proptest! {
    #[test]
    fn hull_verdict_is_scale_invariant(seed: u64, scale in 1e-3f64..1e3, n in 2usize..8, d_frac in 0.0f64..1.0) {
        let d = 1 + ((n - 2) as f64 * d_frac) as usize;
        let a: Matrix<f64> = gaussian_matrix(d, n, &mut RngStream::new(seed));
        let h1 = hull_contains_origin(&PointCloud::from_columns(&a), TOL).unwrap();
        let h2 = hull_contains_origin(&PointCloud::from_columns(&a.scale(scale)), TOL).unwrap();
        prop_assume!(!h1.boundary && !h2.boundary);
        prop_assert_eq!(h1.feasible, h2.feasible);
        if let Some(l) = &h2.certificate {
            prop_assert!(verify_hull_certificate(&PointCloud::from_columns(&a.scale(scale)), l, TOL));
        }
    }

    #[test]
    fn verdict_ignores_basis_choice(seed: u64, n in 2usize..9, k_frac in 0.0f64..1.0) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let mut rng = RngStream::new(seed);
        let b = haar_subspace::<f64, _>(n, k, &mut rng, SamplingMethod::Span).unwrap();
        let q: Matrix<f64> = random_orthogonal(k, &mut rng).unwrap();
        let d1 = contains_positive(&b, TOL).unwrap();
        let d2 = contains_positive(&b.rotate_basis(&q).unwrap(), TOL).unwrap();
        prop_assume!(!d1.boundary && !d2.boundary);
        prop_assert_eq!(d1.feasible, d2.feasible);
        prop_assert!((d1.margin - d2.margin).abs() < 1e-8);
    }

    #[test]
    fn feasible_certificates_validate(seed: u64, n in 2usize..9, k_frac in 0.0f64..1.0) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let b = haar_subspace::<f64, _>(n, k, &mut RngStream::new(seed), SamplingMethod::Span).unwrap();
        let d = contains_positive(&b, TOL).unwrap();
        prop_assert_eq!(d.feasible, d.certificate.is_some());
        if let Some(t) = &d.certificate {
            prop_assert!(verify_positive_certificate(&b, t, TOL));
        }
    }
}
