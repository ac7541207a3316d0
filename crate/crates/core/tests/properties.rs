//! Property tests for the linear algebra, Weyl groups and the actions on `K`
//! and the flag manifold, each against an independent oracle.

use std::collections::BTreeSet;

use flagdyn_core::k_action::iterate_to_attractor;
use flagdyn_core::verify::{nu_pattern, verify_nu_decomposition};
use flagdyn_core::*;
use proptest::prelude::*;

/// Classical Gram–Schmidt on the columns; `k` is the orthonormalized basis and
/// `r = kᵀ g`.
fn gram_schmidt(g: &Matrix) -> (Matrix, Matrix) {
    let n = g.dim();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for q in &cols {
            let dot: f64 = q.iter().zip(&g.column(j)).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= dot * qi);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    let k = Matrix::from_columns(&cols).unwrap();
    let r = &k.transpose() * g;
    (k, r)
}

fn matrix_strategy(n: usize) -> impl Strategy<Value = GroupElement> {
    prop::collection::vec(-3.0f64..3.0, n * n).prop_filter_map("near singular", move |data| {
        let mut m = Matrix::from_row_slice(n, &data).ok()?;
        let det = m.det();
        if det.abs() < 0.05 {
            return None;
        }
        if det < 0.0 {
            let c: Vec<f64> = m.column(0).iter().map(|x| -x).collect();
            m.set_column(0, &c);
        }
        GroupElement::normalized(m).ok()
    })
}

fn group_element() -> impl Strategy<Value = GroupElement> {
    (2usize..=4).prop_flat_map(matrix_strategy)
}

fn rotation(n: usize) -> impl Strategy<Value = PointOnK> {
    matrix_strategy(n).prop_map(|g| PointOnK::new(iwasawa_project(&g).unwrap()).unwrap())
}

/// `g · diag(exp(logs)) · g⁻¹` with well separated logs.
fn regular_element(n: usize) -> impl Strategy<Value = GroupElement> {
    (matrix_strategy(n), prop::collection::vec(0.4f64..1.2, n - 1)).prop_map(move |(g, gaps)| {
        let mut logs = vec![0.0; n];
        for i in 1..n {
            logs[i] = logs[i - 1] - gaps[i - 1];
        }
        let mean = logs.iter().sum::<f64>() / n as f64;
        let d: Vec<f64> = logs.iter().map(|l| (l - mean).exp()).collect();
        let m = &g.matrix().mul_diag(&d) * &g.inverse().unwrap().into_matrix();
        GroupElement::normalized(m).unwrap()
    })
}

fn is_unit_upper(m: &Matrix, tol: f64) -> bool {
    let n = m.dim();
    (0..n).all(|i| (m[(i, i)] - 1.0).abs() <= tol && (0..i).all(|j| m[(i, j)].abs() <= tol))
}

fn assert_rotation(k: &Matrix) {
    assert!(k.orthogonality_defect() < 1e-10, "not orthogonal: {k:?}");
    assert!((k.det() - 1.0).abs() < 1e-10, "det {}", k.det());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn iwasawa_reconstructs_and_matches_gram_schmidt(g in group_element()) {
        let t = iwasawa_decompose(&g).unwrap();
        let back = &(&t.k * &t.a) * &t.nfac;
        let rel = back.distance(g.matrix()) / g.matrix().frobenius_norm();
        prop_assert!(rel <= 1e-10, "relative error {rel:e}");

        assert_rotation(&t.k);
        let d = t.a.diagonal();
        prop_assert!(d.iter().all(|&x| x > 0.0));
        prop_assert!((d.iter().product::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((t.a.distance(&Matrix::diag(&d))) == 0.0);
        prop_assert!(is_unit_upper(&t.nfac, 1e-12));

        let (k, r) = gram_schmidt(g.matrix());
        prop_assert!(k.distance(&t.k) < 1e-8, "κ differs from Gram–Schmidt by {:e}", k.distance(&t.k));
        let r_ours = &t.a * &t.nfac;
        prop_assert!(r.distance(&r_ours) / r.frobenius_norm() < 1e-8);

        prop_assert_eq!(iwasawa_decompose(&g).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn regular_split_round_trip(h in (2usize..=4).prop_flat_map(regular_element)) {
        let split = regular_split_decompose(&h, REGULARITY_TOL).unwrap();
        let back = split.reconstruct().unwrap();
        prop_assert!(back.distance(h.matrix()) / h.matrix().frobenius_norm() < 1e-8);
        prop_assert!(split.logs.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(split.logs.iter().sum::<f64>().abs() < 1e-9);
        prop_assert!((split.conjugator.matrix().det() - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn action_is_a_cocycle(
        (g, h, k) in (2usize..=4).prop_flat_map(|n| (matrix_strategy(n), matrix_strategy(n), rotation(n)))
    ) {
        let gh = g.compose(&h);
        let lhs = act_on_k(&gh, &k).unwrap();
        let rhs = act_on_k(&g, &act_on_k(&h, &k).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-9);
        assert_rotation(lhs.matrix());
        let id = GroupElement::identity(k.dim());
        prop_assert!(act_on_k(&id, &k).unwrap().distance(&k) < 1e-12);
    }

    #[test]
    fn action_commutes_with_m_and_the_fibration(
        (g, k) in (2usize..=4).prop_flat_map(|n| (matrix_strategy(n), rotation(n)))
    ) {
        let gk = act_on_k(&g, &k).unwrap();
        for m in enumerate_m(k.dim()) {
            let lhs = act_on_k(&g, &right_translate(&k, &m)).unwrap();
            prop_assert!(lhs.distance(&right_translate(&gk, &m)) < 1e-9);
            prop_assert!(project_to_flag(&right_translate(&k, &m)).distance(&project_to_flag(&k)) < 1e-12);
        }
        let flag = act_on_flag(&g, &project_to_flag(&k)).unwrap();
        prop_assert!(flag.distance(&project_to_flag(&gk)) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn fixed_point_counts_and_projection(h in (2usize..=3).prop_flat_map(regular_element)) {
        let n = h.dim();
        let on_k = fixed_points_on_k(&h, REGULARITY_TOL).unwrap();
        let fact: usize = (1..=n).product();
        prop_assert_eq!(on_k.len(), (1 << (n - 1)) * fact);
        for (i, a) in on_k.iter().enumerate() {
            prop_assert!(act_on_k(&h, &a.point).unwrap().distance(&a.point) < 1e-8);
            for b in &on_k[i + 1..] {
                prop_assert!(a.point.distance(&b.point) > 1e-3);
            }
        }
        let labels: BTreeSet<_> = on_k.iter().map(|f| f.u_label.clone()).collect();
        prop_assert_eq!(labels.len(), on_k.len());

        let on_flag = fixed_points_on_flag(&h, REGULARITY_TOL).unwrap();
        prop_assert_eq!(on_flag.len(), fact);
        for f in &on_k {
            let w = weyl_class(&f.u_label);
            let (_, target) = on_flag.iter().find(|(v, _)| *v == w).unwrap();
            prop_assert!(project_to_flag(&f.point).distance(target) < 1e-8);
        }

        let lines = fixed_points_on_projective(&h, REGULARITY_TOL).unwrap();
        prop_assert_eq!(lines.len(), n);
        for (_, p) in &lines {
            prop_assert!(act_on_projective(&h, p).distance(p) < 1e-8);
        }
    }

    #[test]
    fn attractors_are_typed_by_m(
        (h, k0) in (2usize..=3).prop_flat_map(|n| (regular_element(n), rotation(n)))
    ) {
        let (fixed, _) = iterate_to_attractor(&h, &k0, 5000, 1e-7).unwrap();
        prop_assert!(fixed.u_label.as_sign_vector().is_some(), "label {:?}", fixed.u_label);
        prop_assert!(weyl_class(&fixed.u_label).is_identity());

        let flags = fixed_points_on_flag(&h, REGULARITY_TOL).unwrap();
        let mut f = project_to_flag(&k0);
        for _ in 0..5000 {
            f = act_on_flag(&h, &f).unwrap();
        }
        let (w, _) = flags.iter().min_by(|a, b| a.1.distance(&f).total_cmp(&b.1.distance(&f))).unwrap();
        prop_assert!(w.is_identity());
    }
}

#[test]
fn weyl_groups_satisfy_the_group_axioms() {
    fn axioms<T: FiniteGroupElement>(group: &[T], id: &T) {
        assert!(group.contains(id));
        for a in group {
            assert_eq!(&a.compose(id), a);
            assert_eq!(&id.compose(a), a);
            assert_eq!(&a.compose(&a.inverse()), id);
            for b in group {
                let ab = a.compose(b);
                assert!(group.contains(&ab));
                for c in group {
                    assert_eq!(ab.compose(c), a.compose(&b.compose(c)));
                }
            }
        }
    }
    for n in 2..=4 {
        axioms(&enumerate_w(n), &WeylElement::identity(n));
        axioms(&enumerate_m(n), &SignVector::identity(n));
    }
    for n in 2..=3 {
        axioms(&enumerate_mstar(n), &SignedPermutation::identity(n));
    }
}

#[test]
fn mstar_is_signed_permutation_matrices() {
    for n in 2..=4 {
        let mstar = enumerate_mstar(n);
        let fact: usize = (1..=n).product();
        assert_eq!(mstar.len(), (1 << (n - 1)) * fact);
        assert_eq!(enumerate_m(n).len(), 1 << (n - 1));
        assert_eq!(enumerate_w(n).len(), fact);
        let distinct: BTreeSet<_> = mstar.iter().cloned().collect();
        assert_eq!(distinct.len(), mstar.len());
        for u in &mstar {
            let m = u.matrix();
            assert!((m.det() - 1.0).abs() < 1e-12);
            assert!(m.orthogonality_defect() < 1e-12);
            assert_eq!(SignedPermutation::from_matrix(&m, 1e-9).as_ref(), Some(u));
            for v in mstar.iter().take(24) {
                assert!((&m * &v.matrix()).distance(&u.compose(v).matrix()) < 1e-12);
            }
        }
    }
}

#[test]
fn weyl_class_is_a_homomorphism_with_kernel_m() {
    for n in 2..=3 {
        let mstar = enumerate_mstar(n);
        for u in &mstar {
            for v in &mstar {
                assert_eq!(weyl_class(&u.compose(v)), weyl_class(u).compose(&weyl_class(v)));
            }
        }
        let kernel: BTreeSet<Vec<i8>> =
            mstar.iter().filter(|u| weyl_class(u).is_identity()).map(|u| u.signs().to_vec()).collect();
        let m: BTreeSet<Vec<i8>> = enumerate_m(n).into_iter().map(Vec::from).collect();
        assert_eq!(kernel, m);
        for w in enumerate_w(n) {
            assert_eq!(weyl_class(&w.lift()), w);
        }
    }
}

#[test]
fn conjugation_of_m_by_w_is_an_action() {
    let n = 3;
    let ws = enumerate_w(n);
    let ms = enumerate_m(n);
    for w in &ws {
        let lift = w.lift().matrix();
        for c in &ms {
            // Matrix oracle: w̄ diag(c) w̄⁻¹ is diagonal and equals the conjugate.
            let conj = &(&lift * &c.matrix()) * &lift.transpose();
            assert!(conj.distance(&conjugate_c_by_w(w, c).matrix()) < 1e-12);
            for v in &ws {
                assert_eq!(conjugate_c_by_w(&w.compose(v), c), conjugate_c_by_w(w, &conjugate_c_by_w(v, c)));
            }
        }
    }
    for a in &ms {
        for b in &ms {
            assert_eq!(a.compose(b), b.compose(a));
        }
    }
}

#[test]
fn n_u_factors_into_lower_and_upper_parts() {
    for u in enumerate_mstar(3) {
        let report = verify_nu_decomposition(&u, 100, 7).unwrap();
        assert!(report.passed, "{report:?}");
        // Independent membership check: u⁻¹ ν u must be unit upper triangular.
        let um = u.matrix();
        let allowed: BTreeSet<_> = nu_pattern(&u).into_iter().collect();
        for (i, j) in (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|(i, j)| i != j) {
            let mut e = Matrix::identity(3);
            e[(i, j)] = 1.0;
            let back = &(&um.transpose() * &e) * &um;
            assert_eq!(is_unit_upper(&back, 1e-12), allowed.contains(&(i, j)), "u = {u:?}, ({i}, {j})");
        }
    }
}
