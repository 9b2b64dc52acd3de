use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rcpos::linalg::{
    generalized_sign_counts, hermitian_eig, sample_unit_sphere, CMatrix, Tensor4, UnitVector,
};
use rcpos::Tolerances;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let raw = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)));
    raw.add(&raw.adjoint()).scale(c(0.5, 0.0))
}

/// Monic characteristic polynomial coefficients by Faddeev-LeVerrier:
/// p(x) = x^n + c[0] x^(n-1) + ... + c[n-1].
fn char_poly(a: &CMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut coeffs = Vec::with_capacity(n);
    let mut m = a.clone();
    let mut ck = -m.trace();
    coeffs.push(ck);
    for k in 2..=n {
        let shifted = CMatrix::from_fn(n, n, |i, j| {
            m[(i, j)] + if i == j { ck } else { c(0.0, 0.0) }
        });
        m = a.matmul(&shifted);
        ck = -m.trace() / k as f64;
        coeffs.push(ck);
    }
    coeffs
}

/// Durand-Kerner simultaneous root iteration for a monic polynomial given by
/// the descending coefficients from `char_poly`.
fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let eval = |x: Complex64| {
        let mut acc = c(1.0, 0.0);
        for &ck in coeffs {
            acc = acc * x + ck;
        }
        acc
    };
    let spread = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| spread.powu(k as u32 + 1))
        .collect();
    for _ in 0..500 {
        let mut worst = 0.0f64;
        let prev = roots.clone();
        for i in 0..n {
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= prev[i] - prev[j];
                }
            }
            let delta = eval(prev[i]) / denom;
            roots[i] = prev[i] - delta;
            worst = worst.max(delta.norm());
        }
        if worst < 1e-13 {
            break;
        }
    }
    roots
}

#[test]
fn eig_identity_is_all_ones() {
    let tol = Tolerances::default();
    let eig = hermitian_eig(&CMatrix::identity(3), &tol).unwrap();
    for v in &eig.values {
        assert!((v - 1.0).abs() < 1e-14);
    }
}

#[test]
fn eig_diagonal_sorts_ascending_with_coordinate_vectors() {
    let tol = Tolerances::default();
    let mut m = CMatrix::zeros(3, 3);
    m[(0, 0)] = c(-1.0, 0.0);
    m[(1, 1)] = c(0.0, 0.0);
    m[(2, 2)] = c(2.0, 0.0);
    let eig = hermitian_eig(&m, &tol).unwrap();
    assert_eq!(eig.values, vec![-1.0, 0.0, 2.0]);
    // Eigenvector of -1 must be e_0 up to phase.
    let v0 = eig.eigenvector(0);
    assert!(v0[0].norm() > 1.0 - 1e-12);
    assert!(v0[1].norm() < 1e-12 && v0[2].norm() < 1e-12);
}

#[test]
fn eig_matches_characteristic_polynomial_roots() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let m = random_hermitian(5, &mut rng);
        let eig = hermitian_eig(&m, &tol).unwrap();
        let mut roots: Vec<f64> = poly_roots(&char_poly(&m))
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-7, "characteristic root should be real, got {z}");
                z.re
            })
            .collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (lam, root) in eig.values.iter().zip(roots.iter()) {
            assert!(
                (lam - root).abs() <= 1e-8,
                "eigenvalue {lam} vs characteristic root {root}"
            );
        }
    }
}

#[test]
fn eig_rejects_non_hermitian() {
    let tol = Tolerances::default();
    let mut m = CMatrix::identity(2);
    m[(0, 1)] = c(1.0, 0.0);
    assert!(hermitian_eig(&m, &tol).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn eig_reconstructs_and_is_unitary(seed in 0u64..1u64 << 48, n in 1usize..=8) {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_hermitian(n, &mut rng);
        let eig = hermitian_eig(&m, &tol).unwrap();
        prop_assert!(eig.residual <= tol.eig_residual);
        for w in eig.values.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let vtv = eig.vectors.adjoint().matmul(&eig.vectors);
        prop_assert!(vtv.max_abs_diff(&CMatrix::identity(n)) <= 1e-10);
    }
}

#[test]
fn sphere_dim_one_has_unit_modulus() {
    for v in sample_unit_sphere(1, 50, 3) {
        assert!((v[0].norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sphere_sampling_is_deterministic() {
    let a = sample_unit_sphere(3, 10, 99);
    let b = sample_unit_sphere(3, 10, 99);
    for (x, y) in a.iter().zip(b.iter()) {
        for (p, q) in x.iter().zip(y.iter()) {
            assert_eq!(p, q);
        }
    }
}

#[test]
fn sphere_fourth_moment_matches_beta_law() {
    // |v_1|^2 on the unit sphere of C^2 is uniform on [0, 1], so the fourth
    // moment of |v_1| is 1/3.
    let samples = sample_unit_sphere(2, 100_000, 7);
    let vals: Vec<f64> = samples.iter().map(|v| v[0].norm_sqr().powi(2)).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!(
        (mean - 1.0 / 3.0).abs() <= 3.0 * se,
        "mean {mean} vs 1/3, se {se}"
    );
}

#[test]
fn sign_counts_with_zero_band() {
    let tol = Tolerances::default();
    let mut m = CMatrix::zeros(3, 3);
    m[(0, 0)] = c(2.0, 0.0);
    m[(1, 1)] = c(-1.0, 0.0);
    let (counts, _) = generalized_sign_counts(&m, &CMatrix::identity(3), &tol).unwrap();
    assert_eq!((counts.positive, counts.zero, counts.negative), (1, 1, 1));
}

#[test]
fn sign_counts_respect_the_metric() {
    let tol = Tolerances::default();
    // Against g = diag(1, 100) the form diag(3, -1) still counts (1, 0, 1):
    // sign counts are invariant under the metric, only magnitudes move.
    let mut g = CMatrix::identity(2);
    g[(1, 1)] = c(100.0, 0.0);
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = c(3.0, 0.0);
    m[(1, 1)] = c(-1.0, 0.0);
    let (counts, values) = generalized_sign_counts(&m, &g, &tol).unwrap();
    assert_eq!((counts.positive, counts.zero, counts.negative), (1, 0, 1));
    assert!((values[0] + 0.01).abs() < 1e-12 && (values[1] - 3.0).abs() < 1e-12);
}

#[test]
fn unit_vector_normalizes_in_metric() {
    let mut g = CMatrix::identity(2);
    g[(0, 0)] = c(4.0, 0.0);
    let v = UnitVector::new(&[c(1.0, 0.0), c(0.0, 0.0)], Some(&g)).unwrap();
    assert!((v.components()[0].re - 0.5).abs() < 1e-14);
    assert!(UnitVector::new(&[c(0.0, 0.0)], None).is_err());
}

#[test]
fn tensor_blocks_are_hermitian_and_pairings_real() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 2;
    let r = 3;
    let raw = Tensor4::from_fn(n, r, |_, _, _, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    // Symmetrize into a valid curvature-type tensor.
    let t = Tensor4::from_fn(n, r, |i, j, a, b| {
        (raw.get(i, j, a, b) + raw.get(j, i, b, a).conj()) * 0.5
    });
    assert!(t.conj_symmetry_residual() < 1e-14);
    let a: Vec<Complex64> = (0..r).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let v: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let b = t.section_block(&a);
    let d = t.direction_block(&v);
    assert!(b.hermitian_residual() < 1e-13);
    assert!(d.hermitian_residual() < 1e-13);
    assert!(t.quartic(&v, &v, &a, &a).im.abs() < 1e-13);
    // The quadratic forms of both blocks agree with the full contraction.
    let q = t.pairing(&v, &a);
    let via_b: Complex64 = {
        let bv = b.mul_vec(&v);
        v.iter().zip(bv.iter()).map(|(x, y)| x.conj() * y).sum()
    };
    let via_d: Complex64 = {
        let da = d.mul_vec(&a);
        a.iter().zip(da.iter()).map(|(x, y)| x.conj() * y).sum()
    };
    assert!((via_b.re - q).abs() < 1e-12 && (via_d.re - q).abs() < 1e-12);
}

#[test]
fn tensor_transforms_are_congruences() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 2;
    let r = 2;
    let raw = Tensor4::from_fn(n, r, |_, _, _, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let t = Tensor4::from_fn(n, r, |i, j, a, b| {
        (raw.get(i, j, a, b) + raw.get(j, i, b, a).conj()) * 0.5
    });
    let tb = CMatrix::from_fn(r, r, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let tg = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let moved = t.transform_bundle(&tb).transform_base(&tg);
    let u: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), 0.0)).collect();
    let s: Vec<Complex64> = (0..r).map(|_| c(rng.gen_range(-1.0..1.0), 0.0)).collect();
    let direct = t.pairing(&tg.mul_vec(&u), &tb.mul_vec(&s));
    let via = moved.pairing(&u, &s);
    assert!((direct - via).abs() < 1e-12, "{direct} vs {via}");
}
