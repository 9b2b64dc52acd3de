use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcpos::curvature::{
    chern_curvature, conj_symmetry_ok, curvature_of_jets, kahler_check, orthonormal_base_frame,
    ricci_signs, scalar_panel, sphere_average_hsc, CurvatureError,
};
use rcpos::linalg::{CMatrix, Tensor4};
use rcpos::metric::catalog;
use rcpos::metric::expr::{self, ExprNode};
use rcpos::metric::{Domain, MetricField};
use rcpos::Tolerances;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn flat_curvature_is_exactly_zero() {
    let t = tol();
    let flat = catalog::flat(3).unwrap();
    for z in flat.sample_points(5, 1, 0.9) {
        let c = chern_curvature(&flat, &z, &t).unwrap();
        assert_eq!(c.tensor.max_abs(), 0.0);
    }
}

#[test]
fn model_space_curvature_at_the_origin() {
    let t = tol();
    let fs = catalog::fubini_study(1).unwrap();
    let r = chern_curvature(&fs, &catalog::origin(1), &t).unwrap();
    assert!((r.tensor.get(0, 0, 0, 0) - c(2.0, 0.0)).norm() < 1e-9);

    let pd = catalog::poincare_disc(1).unwrap();
    let r = chern_curvature(&pd, &catalog::origin(1), &t).unwrap();
    assert!((r.tensor.get(0, 0, 0, 0) - c(-2.0, 0.0)).norm() < 1e-9);
}

// The space forms have curvature +-(g (x) g + swap); this closed form is an
// oracle independent of the jet pipeline.
fn space_form_tensor(g: &CMatrix, sign: f64) -> Tensor4 {
    let n = g.rows();
    Tensor4::from_fn(n, n, |i, j, k, l| (g[(i, j)] * g[(k, l)] + g[(i, l)] * g[(k, j)]) * sign)
}

#[test]
fn projective_space_matches_the_product_formula() {
    let t = tol();
    for n in [2usize, 3] {
        let fs = catalog::fubini_study(n).unwrap();
        for z in fs.sample_points(10, 2, 0.9) {
            let r = chern_curvature(&fs, &z, &t).unwrap();
            let oracle = space_form_tensor(&r.bundle_metric, 1.0);
            let scale = oracle.max_abs();
            assert!(
                r.tensor.max_abs_diff(&oracle) <= 1e-12 * scale,
                "n={n}: defect {:.3e} at {z:?}",
                r.tensor.max_abs_diff(&oracle)
            );
            assert!(conj_symmetry_ok(&r.tensor, &t));
        }
    }
}

#[test]
fn hyperbolic_space_matches_the_negated_formula() {
    let t = tol();
    let pd = catalog::poincare_disc(2).unwrap();
    for z in pd.sample_points(10, 3, 0.9) {
        let r = chern_curvature(&pd, &z, &t).unwrap();
        let oracle = space_form_tensor(&r.bundle_metric, -1.0);
        assert!(r.tensor.max_abs_diff(&oracle) <= 1e-12 * oracle.max_abs());
    }
}

// delta_ij / |z|^2 has R[i,j,k,l] = delta_kl (delta_ij / S^2 - conj(z_i) z_j / S^3)
// with S = |z|^2; both scalar traces are constant on the chart.
#[test]
fn hopf_curvature_and_scalars() {
    let t = tol();
    let hopf = catalog::hopf(2).unwrap();
    for z in hopf.sample_points(10, 4, 0.9) {
        let r = chern_curvature(&hopf, &z, &t).unwrap();
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let oracle = Tensor4::from_fn(2, 2, |i, j, k, l| {
            if k != l {
                return c(0.0, 0.0);
            }
            let delta = if i == j { 1.0 } else { 0.0 };
            c(delta / (s * s), 0.0) - z[i].conj() * z[j] / (s * s * s)
        });
        assert!(r.tensor.max_abs_diff(&oracle) <= 1e-12 * oracle.max_abs().max(1.0));

        let panel = scalar_panel(&r, &t).unwrap();
        assert!((panel.s - 2.0).abs() < 1e-10, "s = {}", panel.s);
        assert!((panel.s_hat - 1.0).abs() < 1e-10, "s_hat = {}", panel.s_hat);
    }
}

#[test]
fn projective_space_scalars_and_ricci() {
    let t = tol();
    for n in [1usize, 2, 3] {
        let fs = catalog::fubini_study(n).unwrap();
        for z in fs.sample_points(5, 5, 0.9) {
            let r = chern_curvature(&fs, &z, &t).unwrap();
            let panel = scalar_panel(&r, &t).unwrap();
            let want = (n * (n + 1)) as f64;
            assert!((panel.s - want).abs() < 1e-9);
            assert!((panel.s_hat - want).abs() < 1e-9);
            // Einstein property: ricci1 = (n+1) g.
            let scaled = r.bundle_metric.scale(c((n + 1) as f64, 0.0));
            assert!(panel.ricci1.max_abs_diff(&scaled) < 1e-10);
        }
    }
}

// An independent contraction of the same tensor must reproduce s: this
// guards the panel's bookkeeping, not the tensor itself.
#[test]
fn scalar_trace_recomputation_agrees() {
    let t = tol();
    let hopf = catalog::hopf(3).unwrap();
    for z in hopf.sample_points(5, 6, 0.9) {
        let r = chern_curvature(&hopf, &z, &t).unwrap();
        let panel = scalar_panel(&r, &t).unwrap();
        let ginv = r.base_metric.inverse(t.singular_pivot).unwrap();
        let n = 3;
        let mut s = c(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        s += ginv[(j, i)] * ginv[(l, k)] * r.tensor.get(i, j, k, l);
                    }
                }
            }
        }
        assert!((s.re - panel.s).abs() <= 1e-10 * (1.0 + panel.s.abs()));
        assert!(s.im.abs() < 1e-10);
    }
}

// h^{ab} R_{ij a b} = -d_i dbar_j log det h ties the curvature trace to the
// jet determinant, two code paths that share nothing but the jet algebra.
#[test]
fn bundle_trace_matches_log_det_derivative() {
    let t = tol();
    let fields = [
        catalog::fubini_study(2).unwrap(),
        catalog::hopf(2).unwrap(),
        catalog::fs_perturbed(2, 0.05, &t).unwrap(),
    ];
    for field in &fields {
        for z in field.sample_points(5, 7, 0.9) {
            let jets = field.eval_jets(&z, &t).unwrap();
            let tensor = curvature_of_jets(&jets, t.singular_pivot).unwrap();
            let hinv = jets.value().inverse(t.singular_pivot).unwrap();
            let logdet = jets.determinant(t.singular_division).unwrap().ln(t.singular_division).unwrap();
            let n = field.dim;
            let r = field.rank;
            for i in 0..n {
                for j in 0..n {
                    let mut trace = c(0.0, 0.0);
                    for a in 0..r {
                        for b in 0..r {
                            trace += hinv[(b, a)] * tensor.get(i, j, a, b);
                        }
                    }
                    let want = -logdet.dzdzbar[(i, j)];
                    assert!(
                        (trace - want).norm() <= 1e-10 * (1.0 + want.norm()),
                        "{}: trace defect {:.3e}",
                        field.name,
                        (trace - want).norm()
                    );
                }
            }
        }
    }
}

#[test]
fn kahler_verdicts_across_the_catalog() {
    let t = tol();

    let fs = catalog::fubini_study(3).unwrap();
    let verdict = kahler_check(&fs, &fs.sample_points(30, 8, 0.9), &t).unwrap();
    assert!(verdict.is_kahler);
    assert!(verdict.worst_residual <= 1e-10);

    let flat = catalog::flat(2).unwrap();
    let verdict = kahler_check(&flat, &flat.sample_points(10, 8, 0.9), &t).unwrap();
    assert!(verdict.is_kahler);
    assert_eq!(verdict.worst_residual, 0.0);

    let hopf = catalog::hopf(2).unwrap();
    let verdict = kahler_check(&hopf, &hopf.sample_points(30, 8, 0.9), &t).unwrap();
    assert!(!verdict.is_kahler);
    assert!(verdict.worst_residual > 1e-3);
    assert!(verdict.worst_point.is_some());

    let perturbed = catalog::fs_perturbed(2, 0.05, &t).unwrap();
    let verdict = kahler_check(&perturbed, &perturbed.sample_points(30, 8, 0.9), &t).unwrap();
    assert!(!verdict.is_kahler);

    let tall = MetricField::parse("metric m dim=2 rank=1\nh[1][1] = 1\n", &t).unwrap();
    assert!(matches!(
        kahler_check(&tall, &[vec![c(0.0, 0.0); 2]], &t),
        Err(CurvatureError::RankMismatch { .. })
    ));
}

fn random_complex_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let bump = if i == j { 1.0 } else { 0.0 };
        c(bump + 0.4 * (rng.gen::<f64>() - 0.5), 0.4 * (rng.gen::<f64>() - 0.5))
    })
}

// Changing the bundle frame by a constant matrix must commute with the
// curvature formula: curvature of A^T H conj(A) equals the congruence
// transform of the curvature of H.
#[test]
fn curvature_is_frame_covariant_in_the_bundle() {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let field = catalog::fubini_study(2).unwrap();
    for z in field.sample_points(5, 22, 0.9) {
        let jets = field.eval_jets(&z, &t).unwrap();
        let a = random_complex_matrix(2, &mut rng);
        let a_jets = rcpos::metric::JetMatrix::constant(&a, 2);
        let transformed = a_jets.transpose().matmul(&jets).matmul(&a_jets.conj());
        let direct = curvature_of_jets(&transformed, t.singular_pivot).unwrap();
        let reference = curvature_of_jets(&jets, t.singular_pivot)
            .unwrap()
            .transform_bundle(&a);
        let scale = reference.max_abs().max(1e-300);
        assert!(direct.max_abs_diff(&reference) <= 1e-9 * scale);
    }
}

// Pulling the metric back along constant linear coordinates z = B w (bundle
// frame fixed) transforms only the base pair of the tensor.
#[test]
fn curvature_is_covariant_in_the_base() {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let field = catalog::fubini_study(2).unwrap();
    for z in field.sample_points(5, 24, 0.9) {
        let jets = field.eval_jets(&z, &t).unwrap();
        let b = random_complex_matrix(2, &mut rng);
        let pulled = jets.pullback_linear(&b);
        let direct = curvature_of_jets(&pulled, t.singular_pivot).unwrap();
        let reference = curvature_of_jets(&jets, t.singular_pivot).unwrap().transform_base(&b);
        assert!(direct.max_abs_diff(&reference) <= 1e-9 * reference.max_abs().max(1e-300));
    }
}

fn linear_substitution_field(base: &MetricField, b: &[Vec<f64>]) -> MetricField {
    let n = base.dim;
    let map: Vec<ExprNode> = (0..n)
        .map(|k| {
            let mut acc = expr::num(0.0);
            for j in 0..n {
                acc = expr::add(acc, expr::mul(expr::num(b[k][j]), expr::coord(j)));
            }
            acc
        })
        .collect();
    let mut entries = Vec::with_capacity(n * n);
    for a in 0..n {
        for c_ in 0..n {
            let mut acc = expr::num(0.0);
            for p in 0..n {
                for q in 0..n {
                    let coeff = b[p][a] * b[q][c_];
                    if coeff == 0.0 {
                        continue;
                    }
                    acc = expr::add(
                        acc,
                        expr::mul(expr::num(coeff), base.entry(p, q).substitute(&map)),
                    );
                }
            }
            entries.push(acc);
        }
    }
    MetricField::new("pullback", n, n, entries, Domain::Entire)
}

// End-to-end invariance: a real linear change of chart coordinates, applied
// at the expression level so no jet code is shared, leaves s, s_hat, and
// the Ricci signatures unchanged.
#[test]
fn scalars_survive_a_change_of_coordinates() {
    let t = tol();
    let fs = catalog::fubini_study(2).unwrap();
    let b = vec![vec![1.0, 0.3], vec![-0.2, 0.9]];
    let pulled = linear_substitution_field(&fs, &b);
    pulled.validate(&t).unwrap();

    for w in pulled.sample_points(5, 25, 0.5) {
        let z: Vec<Complex64> = (0..2)
            .map(|k| b[k][0] * w[0] + b[k][1] * w[1])
            .collect();
        let original = scalar_panel(&chern_curvature(&fs, &z, &t).unwrap(), &t).unwrap();
        let moved = scalar_panel(&chern_curvature(&pulled, &w, &t).unwrap(), &t).unwrap();
        assert!((original.s - moved.s).abs() <= 1e-9 * (1.0 + original.s.abs()));
        assert!((original.s_hat - moved.s_hat).abs() <= 1e-9 * (1.0 + original.s_hat.abs()));

        let sig_a = ricci_signs(&chern_curvature(&fs, &z, &t).unwrap(), &t).unwrap();
        let sig_b = ricci_signs(&chern_curvature(&pulled, &w, &t).unwrap(), &t).unwrap();
        assert_eq!(
            (sig_a.0.positive, sig_a.0.zero, sig_a.0.negative),
            (sig_b.0.positive, sig_b.0.zero, sig_b.0.negative)
        );
        assert_eq!(
            (sig_a.1.positive, sig_a.1.zero, sig_a.1.negative),
            (sig_b.1.positive, sig_b.1.zero, sig_b.1.negative)
        );
    }
}

#[test]
fn hopf_ricci_signatures() {
    let t = tol();
    let hopf = catalog::hopf(2).unwrap();
    for z in hopf.sample_points(5, 26, 0.9) {
        let r = chern_curvature(&hopf, &z, &t).unwrap();
        let (first, second) = ricci_signs(&r, &t).unwrap();
        // First Chern-Ricci degenerates along z, stays positive across it.
        assert_eq!((first.positive, first.zero, first.negative), (1, 1, 0));
        // Second Chern-Ricci is a positive multiple of the identity.
        assert_eq!((second.positive, second.zero, second.negative), (2, 0, 0));
    }
}

#[test]
fn sphere_average_matches_prediction() {
    let t = tol();

    // Constant holomorphic sectional curvature: zero variance, exact match.
    let fs1 = catalog::fubini_study(1).unwrap();
    let avg = sphere_average_hsc(&fs1, &[c(0.3, -0.1)], 500, 11, &t).unwrap();
    assert!(avg.z_score <= 3.0);
    assert!((avg.mean - avg.prediction).abs() < 1e-10);

    let flat = catalog::flat(2).unwrap();
    let avg = sphere_average_hsc(&flat, &catalog::origin(2), 500, 11, &t).unwrap();
    assert_eq!(avg.mean, 0.0);
    assert_eq!(avg.prediction, 0.0);

    // Product metric: the sectional curvature genuinely varies over the
    // sphere; prediction (s + s_hat)/(n(n+1)) = 4/3 at the origin.
    let prod =
        catalog::product(catalog::fubini_study(1).unwrap(), catalog::fubini_study(1).unwrap())
            .unwrap();
    let avg = sphere_average_hsc(&prod, &catalog::origin(2), 20_000, 11, &t).unwrap();
    assert!((avg.prediction - 4.0 / 3.0).abs() < 1e-12);
    assert!(avg.std_error > 0.0);
    assert!(avg.z_score <= 3.0, "z = {}", avg.z_score);

    // Non-Kahler case: s and s_hat enter the prediction separately.
    let hopf = catalog::hopf(2).unwrap();
    let z = [c(0.8, 0.1), c(-0.3, 0.4)];
    let avg = sphere_average_hsc(&hopf, &z, 20_000, 11, &t).unwrap();
    assert!((avg.prediction - 0.5).abs() < 1e-10);
    assert!(avg.z_score <= 3.0, "z = {}", avg.z_score);
}

#[test]
fn nontangent_bundle_gets_flat_base_metric() {
    let t = tol();
    let line = MetricField::parse(
        "metric line dim=2 rank=1\nh[1][1] = exp(absq(z1) + absq(z2))\n",
        &t,
    )
    .unwrap()
    .with_domain(Domain::Polydisc { radius: 1.5 });
    let z = [c(0.2, 0.1), c(-0.3, 0.05)];
    let r = chern_curvature(&line, &z, &t).unwrap();
    assert_eq!(r.base_metric, CMatrix::identity(2));
    // For h = e^S with S = |z|^2 the cross terms cancel and
    // R[i,j] = -delta_ij h: the curvature form is -d dbar log h = -delta.
    let h = z.iter().map(|w| w.norm_sqr()).sum::<f64>().exp();
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { -h } else { 0.0 };
            assert!(
                (r.tensor.get(i, j, 0, 0) - c(want, 0.0)).norm() < 1e-12,
                "entry ({i},{j}) = {:?}",
                r.tensor.get(i, j, 0, 0)
            );
        }
    }
}

#[test]
fn orthonormal_frame_matches_the_tensor_pairing() {
    // Away from the origin the eigenvectors of the projective metric are
    // genuinely complex, which pins the conjugation in the frame contract:
    // T^t g conj(T) = I rather than T^* g T = I. The two only agree for
    // real eigenvector matrices, so this point would mask nothing.
    let t = tol();
    let fs = catalog::fubini_study(2).unwrap();
    let z = [c(0.3, 0.2), c(-0.1, 0.4)];
    let cp = chern_curvature(&fs, &z, &t).unwrap();
    let frame = orthonormal_base_frame(&cp, &t).unwrap();

    let mut max_im = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            max_im = max_im.max(frame[(i, j)].im.abs());
        }
    }
    assert!(max_im > 1e-3, "test point degenerated to a real frame");

    let reduced = frame.transpose().matmul(&cp.base_metric).matmul(&frame.conj());
    let defect = reduced.sub(&CMatrix::identity(2)).frobenius();
    assert!(defect < 1e-12, "pairing defect {defect:.3e}");

    // The projective metric has constant holomorphic sectional curvature 2,
    // so after the frame reduction every unit direction must give exactly 2.
    let normalized = cp.tensor.transform_base(&frame).transform_bundle(&frame);
    let e0 = [c(1.0, 0.0), c(0.0, 0.0)];
    let mix = [c(0.6, 0.0), c(0.0, 0.8)];
    for v in [&e0, &mix] {
        let h = normalized.quartic(v, v, v, v);
        assert!((h - c(2.0, 0.0)).norm() < 1e-10, "H = {h:?}");
    }

    let avg = sphere_average_hsc(&fs, &z, 500, 7, &t).unwrap();
    assert!((avg.mean - 2.0).abs() < 1e-9, "mean = {}", avg.mean);
    assert!((avg.prediction - 2.0).abs() < 1e-9);
    assert!(avg.z_score <= 3.0, "z = {}", avg.z_score);
}
