use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::ExprNode;
use super::jet::{JetMatrix, WirtingerJet};
use super::parse::parse_source_raw;
use super::MetricError;
use crate::linalg::{hermitian_eig, CMatrix};
use crate::Tolerances;

/// Region of C^n on which a metric is defined and sampled.
///
/// `Entire` metrics are sampled from the polydisc of radius 1.25 so that
/// sweeps exercise points away from the origin without blowing up entries.
#[derive(Clone, Debug)]
pub enum Domain {
    Entire,
    Polydisc { radius: f64 },
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    /// Split domain for product metrics: first `split` coordinates live in
    /// the left factor's domain, the rest in the right factor's.
    Product(Box<Domain>, Box<Domain>, usize),
}

impl Domain {
    pub fn contains(&self, z: &[Complex64]) -> bool {
        match self {
            Domain::Entire => true,
            Domain::Polydisc { radius } => z.iter().all(|c| c.norm() < *radius),
            Domain::Ball { radius } => {
                z.iter().map(|c| c.norm_sqr()).sum::<f64>() < radius * radius
            }
            Domain::Annulus { inner, outer } => {
                let r = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                r > *inner && r < *outer
            }
            Domain::Product(a, b, split) => {
                a.contains(&z[..*split]) && b.contains(&z[*split..])
            }
        }
    }

    /// Draws one point with all radii shrunk by `margin` so that finite
    /// difference stencils around sampled points stay inside the domain.
    fn sample_into(&self, rng: &mut ChaCha8Rng, margin: f64, out: &mut Vec<Complex64>) {
        match self {
            Domain::Entire => {
                Domain::Polydisc { radius: 1.25 }.sample_into(rng, margin, out)
            }
            Domain::Polydisc { radius } => {
                let r = radius * margin;
                // Rejection-free: uniform modulus^2 then phase gives the
                // uniform law on the disc per coordinate.
                let remaining = out.capacity() - out.len();
                for _ in 0..remaining {
                    let u: f64 = rng.gen();
                    let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                    let modulus = r * u.sqrt();
                    out.push(Complex64::from_polar(modulus, theta));
                }
            }
            Domain::Ball { radius } => {
                let n = out.capacity() - out.len();
                // Gaussian direction with radius ~ U^(1/2n) gives the
                // uniform law on the complex ball.
                let mut v = Vec::with_capacity(n);
                let mut norm_sq = 0.0;
                for _ in 0..n {
                    let re: f64 = rng.gen::<f64>() - 0.5;
                    let im: f64 = rng.gen::<f64>() - 0.5;
                    let mut c = Complex64::new(re, im);
                    if norm_sq == 0.0 && c.norm_sqr() < 1e-12 {
                        c = Complex64::new(0.1, 0.0);
                    }
                    norm_sq += c.norm_sqr();
                    v.push(c);
                }
                let u: f64 = rng.gen();
                let target = radius * margin * u.powf(1.0 / (2.0 * n as f64));
                let scale = target / norm_sq.sqrt().max(1e-12);
                for c in v {
                    out.push(c * scale);
                }
            }
            Domain::Annulus { inner, outer } => {
                let n = out.capacity() - out.len();
                // Keep clear of both boundaries by the margin factor.
                let lo = inner + (1.0 - margin) * (outer - inner) * 0.5;
                let hi = outer - (1.0 - margin) * (outer - inner) * 0.5;
                let mut v = Vec::with_capacity(n);
                let mut norm_sq = 0.0;
                for _ in 0..n {
                    let re: f64 = rng.gen::<f64>() - 0.5;
                    let im: f64 = rng.gen::<f64>() - 0.5;
                    let mut c = Complex64::new(re, im);
                    if norm_sq == 0.0 && c.norm_sqr() < 1e-12 {
                        c = Complex64::new(0.1, 0.0);
                    }
                    norm_sq += c.norm_sqr();
                    v.push(c);
                }
                let target = lo + rng.gen::<f64>() * (hi - lo);
                let scale = target / norm_sq.sqrt().max(1e-12);
                for c in v {
                    out.push(c * scale);
                }
            }
            Domain::Product(a, b, split) => {
                let total = out.capacity() - out.len();
                let mut left = Vec::with_capacity(*split);
                a.sample_into(rng, margin, &mut left);
                let mut right = Vec::with_capacity(total - *split);
                b.sample_into(rng, margin, &mut right);
                out.extend(left);
                out.extend(right);
            }
        }
    }
}

/// A Hermitian metric on a trivialized rank-r holomorphic bundle over a
/// domain in C^n, given by closed-form entries h[a][b].
///
/// Only entries with a <= b are stored after parsing; the lower triangle is
/// completed as the structural conjugate so the evaluated matrix is exactly
/// Hermitian, not Hermitian up to roundoff.
#[derive(Clone, Debug)]
pub struct MetricField {
    pub name: String,
    pub dim: usize,
    pub rank: usize,
    entries: Vec<ExprNode>,
    pub domain: Domain,
    /// Set for catalog metrics known to be Kahler (checked, not trusted,
    /// by the curvature layer).
    pub kahler_hint: Option<bool>,
}

impl MetricField {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        rank: usize,
        entries: Vec<ExprNode>,
        domain: Domain,
    ) -> Self {
        assert_eq!(entries.len(), rank * rank, "entry grid must be rank x rank");
        MetricField { name: name.into(), dim, rank, entries, domain, kahler_hint: None }
    }

    pub fn with_kahler_hint(mut self, hint: bool) -> Self {
        self.kahler_hint = Some(hint);
        self
    }

    pub fn entry(&self, a: usize, b: usize) -> &ExprNode {
        &self.entries[a * self.rank + b]
    }

    /// Parses the text format and completes the Hermitian lower triangle.
    ///
    /// When both h[a][b] and h[b][a] are given for a != b, they are checked
    /// against each other numerically at a handful of points; diagonal
    /// entries are checked for real values the same way.
    pub fn parse(src: &str, tol: &Tolerances) -> Result<Self, MetricError> {
        let parsed = parse_source_raw(src)?;
        let (dim, rank) = (parsed.dim, parsed.rank);
        let mut grid: Vec<Option<ExprNode>> = vec![None; rank * rank];
        for (a, b, e) in parsed.entries {
            grid[a * rank + b] = Some(e);
        }

        // Probe points for consistency checks, fixed and well inside the
        // unit polydisc so every catalog-style expression is finite there.
        let mut rng = ChaCha8Rng::seed_from_u64(0x686d6574);
        let probes: Vec<Vec<Complex64>> = (0..5)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 0.6
                    })
                    .collect()
            })
            .collect();

        for a in 0..rank {
            if grid[a * rank + a].is_none() {
                return Err(MetricError::MissingDiagonal { index: a + 1 });
            }
        }

        // Realness of diagonals and positivity are validation concerns, not
        // parse errors; only an explicitly inconsistent mirror pair is
        // rejected here.
        let mut entries = Vec::with_capacity(rank * rank);
        for a in 0..rank {
            for b in 0..rank {
                let e = match (&grid[a * rank + b], &grid[b * rank + a]) {
                    (Some(e), Some(f)) if a < b => {
                        // Both triangles given: verify they agree as
                        // conjugates before keeping the upper expression.
                        let mut residual = 0.0f64;
                        for p in &probes {
                            if let (Ok(u), Ok(v)) = (
                                e.eval_value(p, tol.singular_division),
                                f.eval_value(p, tol.singular_division),
                            ) {
                                residual =
                                    residual.max((u - v.conj()).norm() / (1.0 + u.norm()));
                            }
                        }
                        if residual > tol.hermitian.max(1e-9) {
                            return Err(MetricError::NonHermitianSpec {
                                row: b + 1,
                                col: a + 1,
                                residual,
                            });
                        }
                        e.clone()
                    }
                    (Some(e), _) => e.clone(),
                    (None, Some(f)) => f.conjugated(),
                    (None, None) => ExprNode::Const(0.0),
                };
                entries.push(e);
            }
        }

        Ok(MetricField {
            name: parsed.name,
            dim,
            rank,
            entries,
            domain: Domain::Entire,
            kahler_hint: None,
        })
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Evaluates the full second-order jet of h at a point.
    ///
    /// Entries with a <= b are evaluated from their expressions; each lower
    /// entry is the exact jet-level conjugate of its mirror, so the returned
    /// matrix is Hermitian to the last bit even when the stored lower
    /// expression would round differently.
    pub fn eval_jets(&self, z: &[Complex64], tol: &Tolerances) -> Result<JetMatrix, MetricError> {
        if z.len() != self.dim {
            return Err(MetricError::BadParameter {
                message: format!("point has {} coordinates, metric expects {}", z.len(), self.dim),
            });
        }
        if !self.domain.contains(z) {
            return Err(MetricError::OutOfDomain {
                detail: format!("point outside the domain of '{}'", self.name),
            });
        }
        let r = self.rank;
        let mut m = JetMatrix::constant(&CMatrix::zeros(r, r), self.dim);
        for a in 0..r {
            for b in a..r {
                let jet = self.entry(a, b).eval_jet(z, tol.singular_division)?;
                if a == b {
                    // Diagonal jets are Hermitian-symmetrized so tiny
                    // imaginary parts from rounding cannot leak in.
                    let herm = hermitize_diag(&jet);
                    *m.entry_mut(a, a) = herm;
                } else {
                    let conj = jet.conj();
                    *m.entry_mut(a, b) = jet;
                    *m.entry_mut(b, a) = conj;
                }
            }
        }
        Ok(m)
    }

    /// Metric value h(z) without derivatives.
    pub fn value(&self, z: &[Complex64], tol: &Tolerances) -> Result<CMatrix, MetricError> {
        if z.len() != self.dim {
            return Err(MetricError::BadParameter {
                message: format!("point has {} coordinates, metric expects {}", z.len(), self.dim),
            });
        }
        if !self.domain.contains(z) {
            return Err(MetricError::OutOfDomain {
                detail: format!("point outside the domain of '{}'", self.name),
            });
        }
        let r = self.rank;
        let mut m = CMatrix::zeros(r, r);
        for a in 0..r {
            for b in a..r {
                let v = self.entry(a, b).eval_value(z, tol.singular_division)?;
                if a == b {
                    m[(a, a)] = Complex64::new(v.re, 0.0);
                } else {
                    m[(a, b)] = v;
                    m[(b, a)] = v.conj();
                }
            }
        }
        Ok(m)
    }

    /// Draws deterministic sample points inside the domain, shrunk by
    /// `margin` to keep difference stencils interior.
    pub fn sample_points(&self, count: usize, seed: u64, margin: f64) -> Vec<Vec<Complex64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let mut z = Vec::with_capacity(self.dim);
                self.domain.sample_into(&mut rng, margin, &mut z);
                debug_assert!(self.domain.contains(&z));
                z
            })
            .collect()
    }

    /// Entry values exactly as the expressions evaluate, without the
    /// Hermitian symmetrization applied by `value`. Validation needs this
    /// to catch entries that are not actually Hermitian.
    fn raw_value(&self, z: &[Complex64], tol: &Tolerances) -> Result<CMatrix, MetricError> {
        let r = self.rank;
        let mut m = CMatrix::zeros(r, r);
        for a in 0..r {
            for b in 0..r {
                m[(a, b)] = self.entry(a, b).eval_value(z, tol.singular_division)?;
            }
        }
        Ok(m)
    }

    /// Checks that the metric is Hermitian positive definite at sampled
    /// points. Cheap sanity pass run before any sweep.
    pub fn validate(&self, tol: &Tolerances) -> Result<(), MetricError> {
        let points = self.sample_points(16, 0x76616c69, 0.9);
        for z in points.iter().chain(std::iter::once(&vec![
            Complex64::new(0.0, 0.0);
            self.dim
        ])) {
            if !self.domain.contains(z) {
                continue;
            }
            let raw = self.raw_value(z, tol)?;
            let scale = raw.max_abs().max(1e-300);
            for a in 0..self.rank {
                for b in a..self.rank {
                    let res = (raw[(a, b)] - raw[(b, a)].conj()).norm() / scale;
                    if res > tol.hermitian.max(1e-9) {
                        return Err(MetricError::NonHermitianSpec {
                            row: a + 1,
                            col: b + 1,
                            residual: res,
                        });
                    }
                }
            }
            let eig = hermitian_eig(&self.value(z, tol)?, tol)?;
            if eig.min() <= 0.0 {
                return Err(MetricError::NotPositive {
                    point: z.clone(),
                    eigenvalue: eig.min(),
                });
            }
        }
        Ok(())
    }
}

fn hermitize_diag(jet: &WirtingerJet) -> WirtingerJet {
    let mut out = jet.clone();
    let c = jet.conj();
    out.value = (jet.value + c.value) * 0.5;
    for i in 0..out.dz.len() {
        out.dz[i] = (jet.dz[i] + c.dz[i]) * 0.5;
        out.dzbar[i] = (jet.dzbar[i] + c.dzbar[i]) * 0.5;
    }
    out.dzdzbar = jet.dzdzbar.add(&c.dzdzbar).scale(Complex64::new(0.5, 0.0));
    out
}
