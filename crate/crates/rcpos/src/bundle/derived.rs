//! Curvature of algebraically derived bundles, two independent ways.
//!
//! Fast route: once the fiber frame is normalized so h(p) = I, the curvature
//! for a fixed base pair (i, j) is a single r x r block, and every
//! construction acts on that block by the derivation rule. A tensor power
//! differentiates one factor at a time, exterior and symmetric powers
//! restrict the same rule to their subspaces, the dual negates and
//! transposes, the determinant line keeps the trace. No new differentiation
//! happens; the cost per block is combinatorial.
//!
//! Slow route: each construction also induces an honest metric whose jets
//! follow from the base jets by matrix algebra (entry products, minors, the
//! inverse transpose, a Schur complement). [`derived_metric_jets`] computes
//! those and the generic curvature formula applies unchanged. The two routes
//! land in different frames; the pushforward matrices at the bottom of this
//! file translate between them so tests can compare entrywise.

use num_complex::Complex64;

use crate::curvature::{curvature_of_jets, CurvaturePoint};
use crate::linalg::{metric_orthonormal_frame, CMatrix, LinalgError, Tensor4};
use crate::metric::{JetMatrix, MetricField, WirtingerJet};
use crate::Tolerances;

use super::expr::BundleExpr;
use super::indices::{
    factorial, lex_subsets, multiset_arrangements, multiset_multiplicity, permutations_signed,
    sorted_multisets, tuples,
};
use super::subquot::sub_quotient_curvature;
use super::BundleError;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn degenerate(e: LinalgError) -> BundleError {
    match e {
        LinalgError::NotPositiveDefinite { pivot, .. } => BundleError::FrameDegenerate { pivot },
        other => other.into(),
    }
}

/// Rewrites a curvature point in a fiber frame where the bundle metric is the
/// identity, returning the rewritten point together with the frame used.
/// The frame satisfies T^t h conj(T) = I, matching the tensor transforms.
pub fn normalized_bundle(
    c: &CurvaturePoint,
    tol: &Tolerances,
) -> Result<(CurvaturePoint, CMatrix), BundleError> {
    let t = metric_orthonormal_frame(&c.bundle_metric, tol).map_err(degenerate)?;
    let point = CurvaturePoint {
        point: c.point.clone(),
        tensor: c.tensor.transform_bundle(&t),
        base_metric: c.base_metric.clone(),
        bundle_metric: CMatrix::identity(c.tensor.rank()),
    };
    Ok((point, t))
}

fn normalized_curvature(jets: &JetMatrix, tol: &Tolerances) -> Result<Tensor4, BundleError> {
    let tensor = curvature_of_jets(jets, tol.singular_pivot)?;
    let t = metric_orthonormal_frame(&jets.value(), tol).map_err(degenerate)?;
    Ok(tensor.transform_bundle(&t))
}

/// Curvature of the bundle described by `expr` over the metric field, at `z`.
///
/// The result is expressed in an orthonormal fiber frame (bundle metric
/// identity), so positivity questions read off the tensor directly. The
/// declared rank of the expression is validated against the tensor produced.
pub fn derived_curvature(
    expr: &BundleExpr,
    field: &MetricField,
    z: &[Complex64],
    tol: &Tolerances,
) -> Result<CurvaturePoint, BundleError> {
    let rank = expr.rank(field.rank, tol.rank_cap)?;
    let jets = field.eval_jets(z, tol)?;
    let tensor = eval_on_jets(expr, &jets, z, tol)?;
    assert_eq!(
        tensor.rank(),
        rank,
        "declared rank disagrees with the tensor produced"
    );
    let base_metric = if field.rank == field.dim {
        jets.value()
    } else {
        CMatrix::identity(field.dim)
    };
    Ok(CurvaturePoint {
        point: z.to_vec(),
        tensor,
        base_metric,
        bundle_metric: CMatrix::identity(rank),
    })
}

fn eval_on_jets(
    expr: &BundleExpr,
    jets: &JetMatrix,
    z: &[Complex64],
    tol: &Tolerances,
) -> Result<Tensor4, BundleError> {
    match expr {
        BundleExpr::Base => normalized_curvature(jets, tol),
        BundleExpr::Dual(e) => {
            let inner = eval_on_jets(e, jets, z, tol)?;
            let r = inner.rank();
            Ok(blockwise(&inner, r, |m| {
                CMatrix::from_fn(r, r, |a, b| -m[(b, a)])
            }))
        }
        BundleExpr::TensorPow(e, k) => {
            let inner = eval_on_jets(e, jets, z, tol)?;
            let basis = tuples(inner.rank(), *k);
            let nb = basis.len();
            Ok(blockwise(&inner, nb, |m| {
                CMatrix::from_fn(nb, nb, |ii, jj| tensor_entry(m, &basis[ii], &basis[jj]))
            }))
        }
        BundleExpr::ExtPow(e, p) => {
            let inner = eval_on_jets(e, jets, z, tol)?;
            let basis = lex_subsets(inner.rank(), *p);
            let nb = basis.len();
            Ok(blockwise(&inner, nb, |m| {
                CMatrix::from_fn(nb, nb, |ii, jj| ext_entry(m, &basis[ii], &basis[jj]))
            }))
        }
        BundleExpr::SymPow(e, p) => {
            let inner = eval_on_jets(e, jets, z, tol)?;
            let basis = SymBasis::new(inner.rank(), *p);
            let nb = basis.len();
            Ok(blockwise(&inner, nb, |m| {
                CMatrix::from_fn(nb, nb, |ii, jj| basis.derivation_entry(m, ii, jj))
            }))
        }
        BundleExpr::Det(e) => {
            let inner = eval_on_jets(e, jets, z, tol)?;
            Ok(blockwise(&inner, 1, |m| {
                CMatrix::from_fn(1, 1, |_, _| m.trace())
            }))
        }
        BundleExpr::Sub(e, set) => {
            let h = derived_metric_jets(e, jets, tol)?;
            if set.len() == h.rows() {
                return normalized_curvature(&h, tol);
            }
            let perm = permute_front(set, h.rows());
            let ph = h.submatrix(&perm, &perm);
            Ok(sub_quotient_curvature(&ph, set.len(), z, tol)?.sub.tensor)
        }
        BundleExpr::Quot(e, set) => {
            let h = derived_metric_jets(e, jets, tol)?;
            let perm = permute_front(set, h.rows());
            let ph = h.submatrix(&perm, &perm);
            Ok(sub_quotient_curvature(&ph, set.len(), z, tol)?.quot.tensor)
        }
    }
}

/// Index permutation placing `set` first and its complement after, both in
/// increasing order.
fn permute_front(set: &[usize], r: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = set.to_vec();
    perm.extend((0..r).filter(|i| !set.contains(i)));
    perm
}

/// Applies `f` to every (i, j) curvature block of a tensor already expressed
/// in an orthonormal fiber frame.
fn blockwise(
    inner: &Tensor4,
    out_rank: usize,
    mut f: impl FnMut(&CMatrix) -> CMatrix,
) -> Tensor4 {
    let n = inner.base_dim();
    let r = inner.rank();
    let mut out = Tensor4::zeros(n, out_rank);
    for i in 0..n {
        for j in 0..n {
            let m = CMatrix::from_fn(r, r, |a, b| inner.get(i, j, a, b));
            let block = f(&m);
            for a in 0..out_rank {
                for b in 0..out_rank {
                    out.set(i, j, a, b, block[(a, b)]);
                }
            }
        }
    }
    out
}

/// Derivation rule on a tensor-power basis: entries vanish unless the index
/// tuples agree in all slots or in all but one; one mismatch picks the block
/// entry at that slot, full agreement sums the diagonal over the slots.
fn tensor_entry(m: &CMatrix, wi: &[usize], wj: &[usize]) -> Complex64 {
    let mut mismatch = 0usize;
    let mut count = 0usize;
    for u in 0..wi.len() {
        if wi[u] != wj[u] {
            count += 1;
            if count > 1 {
                return ZERO;
            }
            mismatch = u;
        }
    }
    if count == 1 {
        m[(wi[mismatch], wj[mismatch])]
    } else {
        wi.iter().map(|&t| m[(t, t)]).sum()
    }
}

/// Derivation rule on strictly increasing index sets. Sets equal: diagonal
/// sum over members. Sets differing by one exchange x -> y: block entry
/// m[x][y] with the sign of the positions of x and y in their sets. Anything
/// further apart: zero.
fn ext_entry(m: &CMatrix, si: &[usize], sj: &[usize]) -> Complex64 {
    let p = si.len();
    let mut only_i: Option<(usize, usize)> = None;
    let mut only_j: Option<(usize, usize)> = None;
    let (mut a, mut b) = (0usize, 0usize);
    while a < p || b < p {
        if a < p && b < p && si[a] == sj[b] {
            a += 1;
            b += 1;
        } else if b == p || (a < p && si[a] < sj[b]) {
            if only_i.is_some() {
                return ZERO;
            }
            only_i = Some((si[a], a));
            a += 1;
        } else {
            if only_j.is_some() {
                return ZERO;
            }
            only_j = Some((sj[b], b));
            b += 1;
        }
    }
    match (only_i, only_j) {
        (None, None) => si.iter().map(|&u| m[(u, u)]).sum(),
        (Some((x, px)), Some((y, py))) => {
            let sign = if (px + py) % 2 == 0 { 1.0 } else { -1.0 };
            m[(x, y)] * sign
        }
        // Equal-length sets differ in pairs, so exactly one side is never alone.
        _ => unreachable!(),
    }
}

/// Orthonormal basis data for a symmetric power: sorted multisets, their
/// distinct arrangements, and the normalizing constants sqrt(mult/p!).
struct SymBasis {
    arrangements: Vec<Vec<Vec<usize>>>,
    coef: Vec<f64>,
}

impl SymBasis {
    fn new(r: usize, p: usize) -> Self {
        let sets = sorted_multisets(r, p);
        let fact = factorial(p);
        let coef = sets
            .iter()
            .map(|ms| (multiset_multiplicity(ms) / fact).sqrt())
            .collect();
        let arrangements = sets.iter().map(|ms| multiset_arrangements(ms)).collect();
        SymBasis { arrangements, coef }
    }

    fn len(&self) -> usize {
        self.coef.len()
    }

    /// Derivation rule pushed through the embedding into the tensor power:
    /// sum the tensor-power rule over all arrangement pairs and scale by the
    /// two normalizing constants.
    fn derivation_entry(&self, m: &CMatrix, ii: usize, jj: usize) -> Complex64 {
        let mut acc = ZERO;
        for w in &self.arrangements[ii] {
            for w2 in &self.arrangements[jj] {
                acc += tensor_entry(m, w, w2);
            }
        }
        acc * (self.coef[ii] * self.coef[jj])
    }

    /// Same pushforward with plain entry products instead of the derivation
    /// rule; this is the induced-metric entry and the frame pushforward.
    fn product_entry(&self, t: &CMatrix, ii: usize, jj: usize) -> Complex64 {
        let mut acc = ZERO;
        for w in &self.arrangements[ii] {
            for w2 in &self.arrangements[jj] {
                let mut term = ONE;
                for (&x, &y) in w.iter().zip(w2.iter()) {
                    term *= t[(x, y)];
                }
                acc += term;
            }
        }
        acc * (self.coef[ii] * self.coef[jj])
    }
}

/// Jets of the metric induced on the derived bundle, computed purely by
/// matrix algebra on the base jets. This is the slow reference route and the
/// only route for subbundles and quotients.
pub fn derived_metric_jets(
    expr: &BundleExpr,
    base: &JetMatrix,
    tol: &Tolerances,
) -> Result<JetMatrix, BundleError> {
    let n = base.vars();
    match expr {
        BundleExpr::Base => Ok(base.clone()),
        BundleExpr::Dual(e) => {
            let h = derived_metric_jets(e, base, tol)?;
            Ok(h.inverse(tol.singular_pivot)?.transpose())
        }
        BundleExpr::TensorPow(e, k) => {
            let h = derived_metric_jets(e, base, tol)?;
            let basis = tuples(h.rows(), *k);
            Ok(JetMatrix::from_fn(basis.len(), basis.len(), n, |ii, jj| {
                jet_entry_product(&h, &basis[ii], &basis[jj])
            }))
        }
        BundleExpr::ExtPow(e, p) => {
            let h = derived_metric_jets(e, base, tol)?;
            let basis = lex_subsets(h.rows(), *p);
            let perms = permutations_signed(*p);
            Ok(JetMatrix::from_fn(basis.len(), basis.len(), n, |ii, jj| {
                minor_jet(&h, &basis[ii], &basis[jj], &perms)
            }))
        }
        BundleExpr::SymPow(e, p) => {
            let h = derived_metric_jets(e, base, tol)?;
            let sets = sorted_multisets(h.rows(), *p);
            let fact = factorial(*p);
            Ok(JetMatrix::from_fn(sets.len(), sets.len(), n, |ii, jj| {
                let ci = (multiset_multiplicity(&sets[ii]) / fact).sqrt();
                let cj = (multiset_multiplicity(&sets[jj]) / fact).sqrt();
                let mut acc = WirtingerJet::constant(ZERO, n);
                for w in multiset_arrangements(&sets[ii]) {
                    for w2 in multiset_arrangements(&sets[jj]) {
                        acc = &acc + &jet_entry_product(&h, &w, &w2);
                    }
                }
                acc.scale(Complex64::new(ci * cj, 0.0))
            }))
        }
        BundleExpr::Det(e) => {
            let h = derived_metric_jets(e, base, tol)?;
            let det = h
                .determinant(tol.singular_division)
                .map_err(|s| BundleError::Metric(s.into()))?;
            Ok(JetMatrix::from_fn(1, 1, n, |_, _| det.clone()))
        }
        BundleExpr::Sub(e, set) => {
            let h = derived_metric_jets(e, base, tol)?;
            Ok(h.submatrix(set, set))
        }
        BundleExpr::Quot(e, set) => {
            let h = derived_metric_jets(e, base, tol)?;
            schur_jets(&h, set, tol)
        }
    }
}

fn jet_entry_product(h: &JetMatrix, wi: &[usize], wj: &[usize]) -> WirtingerJet {
    let mut acc = WirtingerJet::constant(ONE, h.vars());
    for t in 0..wi.len() {
        acc = &acc * h.entry(wi[t], wj[t]);
    }
    acc
}

/// Leibniz expansion of the minor on `rows` x `cols`. Mixed-set minors are
/// legitimately singular matrices, so no elimination shortcut applies.
fn minor_jet(
    h: &JetMatrix,
    rows: &[usize],
    cols: &[usize],
    perms: &[(Vec<usize>, f64)],
) -> WirtingerJet {
    let n = h.vars();
    let mut acc = WirtingerJet::constant(ZERO, n);
    for (perm, sign) in perms {
        let mut term = WirtingerJet::constant(Complex64::new(*sign, 0.0), n);
        for t in 0..rows.len() {
            term = &term * h.entry(rows[t], cols[perm[t]]);
        }
        acc = &acc + &term;
    }
    acc
}

/// Schur complement of the `set` block: the metric induced on the quotient
/// by the orthogonal-complement identification.
pub(crate) fn schur_jets(
    h: &JetMatrix,
    set: &[usize],
    tol: &Tolerances,
) -> Result<JetMatrix, BundleError> {
    let comp: Vec<usize> = (0..h.rows()).filter(|i| !set.contains(i)).collect();
    let a = h.submatrix(set, set);
    let b = h.submatrix(set, &comp);
    let c = h.submatrix(&comp, set);
    let d = h.submatrix(&comp, &comp);
    Ok(d.sub(&c.matmul(&a.inverse(tol.singular_pivot)?).matmul(&b)))
}

/// Matrix of the induced map on the k-th tensor power of a frame change:
/// entries are products of the original entries, slot by slot.
pub fn tensor_power_matrix(t: &CMatrix, k: usize) -> CMatrix {
    assert_eq!(t.rows(), t.cols());
    let basis = tuples(t.rows(), k);
    CMatrix::from_fn(basis.len(), basis.len(), |ii, jj| {
        let mut term = ONE;
        for (&x, &y) in basis[ii].iter().zip(basis[jj].iter()) {
            term *= t[(x, y)];
        }
        term
    })
}

/// Matrix of the induced map on the p-th exterior power: p x p minors in
/// lexicographic subset order.
pub fn compound_matrix(t: &CMatrix, p: usize) -> CMatrix {
    assert_eq!(t.rows(), t.cols());
    let basis = lex_subsets(t.rows(), p);
    CMatrix::from_fn(basis.len(), basis.len(), |ii, jj| {
        t.submatrix(&basis[ii], &basis[jj])
            .determinant()
            .expect("minor is square")
    })
}

/// Matrix of the induced map on the p-th symmetric power in the orthonormal
/// multiset basis.
pub fn sym_power_matrix(t: &CMatrix, p: usize) -> CMatrix {
    assert_eq!(t.rows(), t.cols());
    let basis = SymBasis::new(t.rows(), p);
    CMatrix::from_fn(basis.len(), basis.len(), |ii, jj| {
        basis.product_entry(t, ii, jj)
    })
}
