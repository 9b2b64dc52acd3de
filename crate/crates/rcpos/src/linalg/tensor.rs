use num_complex::Complex64;

use super::CMatrix;

/// Curvature-type tensor R[i, j, a, b] over an n-dimensional base and a
/// rank-r bundle.
///
/// Index convention: (i, j) pair base directions (holomorphic,
/// antiholomorphic) and (a, b) pair bundle frame indices the same way, so the
/// scalar R(v, a) = sum R[i,j,a,b] v_i conj(v_j) s_a conj(s_b) is real for any
/// direction v and section s. Conjugate symmetry reads
/// R[i,j,a,b] = conj(R[j,i,b,a]).
#[derive(Clone, Debug)]
pub struct Tensor4 {
    base_dim: usize,
    rank: usize,
    data: Vec<Complex64>,
}

impl Tensor4 {
    pub fn zeros(base_dim: usize, rank: usize) -> Self {
        Tensor4 { base_dim, rank, data: vec![Complex64::new(0.0, 0.0); base_dim * base_dim * rank * rank] }
    }

    pub fn from_fn(
        base_dim: usize,
        rank: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Self {
        let mut t = Tensor4::zeros(base_dim, rank);
        for i in 0..base_dim {
            for j in 0..base_dim {
                for a in 0..rank {
                    for b in 0..rank {
                        let v = f(i, j, a, b);
                        t.set(i, j, a, b, v);
                    }
                }
            }
        }
        t
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        ((i * self.base_dim + j) * self.rank + a) * self.rank + b
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> Complex64 {
        self.data[self.offset(i, j, a, b)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, a: usize, b: usize, v: Complex64) {
        let o = self.offset(i, j, a, b);
        self.data[o] = v;
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Sup norm over all entries.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest violation of R[i,j,a,b] = conj(R[j,i,b,a]), relative to the
    /// sup norm.
    pub fn conj_symmetry_residual(&self) -> f64 {
        let scale = self.max_abs().max(1e-300);
        let mut worst = 0.0f64;
        for i in 0..self.base_dim {
            for j in 0..self.base_dim {
                for a in 0..self.rank {
                    for b in 0..self.rank {
                        let d = (self.get(i, j, a, b) - self.get(j, i, b, a).conj()).norm();
                        worst = worst.max(d);
                    }
                }
            }
        }
        worst / scale
    }

    /// Largest violation of the extra symmetry R[i,j,k,l] = R[k,j,i,l] that
    /// holds for tangent-bundle curvature of Kahler metrics. Relative to the
    /// sup norm; requires rank == base_dim.
    pub fn kahler_symmetry_residual(&self) -> f64 {
        assert_eq!(self.rank, self.base_dim);
        let scale = self.max_abs().max(1e-300);
        let mut worst = 0.0f64;
        for i in 0..self.base_dim {
            for j in 0..self.base_dim {
                for k in 0..self.rank {
                    for l in 0..self.rank {
                        let d = (self.get(i, j, k, l) - self.get(k, j, i, l)).norm();
                        worst = worst.max(d);
                    }
                }
            }
        }
        worst / scale
    }

    /// Full contraction R(v, conj w, s, conj t).
    pub fn quartic(&self, v: &[Complex64], w: &[Complex64], s: &[Complex64], t: &[Complex64]) -> Complex64 {
        assert_eq!(v.len(), self.base_dim);
        assert_eq!(w.len(), self.base_dim);
        assert_eq!(s.len(), self.rank);
        assert_eq!(t.len(), self.rank);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.base_dim {
            if v[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..self.base_dim {
                let vw = v[i] * w[j].conj();
                if vw.norm_sqr() == 0.0 {
                    continue;
                }
                for a in 0..self.rank {
                    for b in 0..self.rank {
                        acc += self.get(i, j, a, b) * vw * s[a] * t[b].conj();
                    }
                }
            }
        }
        acc
    }

    /// Real value R(v, conj v, s, conj s).
    pub fn pairing(&self, v: &[Complex64], s: &[Complex64]) -> f64 {
        self.quartic(v, v, s, s).re
    }

    /// Hermitian matrix B over base directions with v^* B v = R(v, conj v, a, conj a).
    pub fn section_block(&self, a: &[Complex64]) -> CMatrix {
        assert_eq!(a.len(), self.rank);
        CMatrix::from_fn(self.base_dim, self.base_dim, |row, col| {
            // v^* B v sums conj(v_row) B[row][col] v_col, so B[row][col]
            // carries the (i = col, j = row) entry of the contraction.
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..self.rank {
                for q in 0..self.rank {
                    acc += self.get(col, row, p, q) * a[p] * a[q].conj();
                }
            }
            acc
        })
    }

    /// Hermitian matrix D over bundle indices with s^* D s = R(v, conj v, s, conj s).
    pub fn direction_block(&self, v: &[Complex64]) -> CMatrix {
        assert_eq!(v.len(), self.base_dim);
        CMatrix::from_fn(self.rank, self.rank, |row, col| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..self.base_dim {
                for j in 0..self.base_dim {
                    acc += self.get(i, j, col, row) * v[i] * v[j].conj();
                }
            }
            acc
        })
    }

    /// Trace over bundle indices per base pair: M[i][j] = sum_a R[i,j,a,a].
    pub fn bundle_trace(&self) -> CMatrix {
        CMatrix::from_fn(self.base_dim, self.base_dim, |i, j| {
            (0..self.rank).map(|a| self.get(i, j, a, a)).sum()
        })
    }

    /// Congruence transform of the bundle indices: sections s = T u.
    pub fn transform_bundle(&self, t: &CMatrix) -> Tensor4 {
        assert_eq!(t.rows(), self.rank);
        let new_rank = t.cols();
        let mut out = Tensor4::zeros(self.base_dim, new_rank);
        for i in 0..self.base_dim {
            for j in 0..self.base_dim {
                // out[i,j] = T^T R[i,j] conj(T) on the bundle block.
                for a in 0..new_rank {
                    for b in 0..new_rank {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for p in 0..self.rank {
                            for q in 0..self.rank {
                                acc += self.get(i, j, p, q) * t[(p, a)] * t[(q, b)].conj();
                            }
                        }
                        out.set(i, j, a, b, acc);
                    }
                }
            }
        }
        out
    }

    /// Congruence transform of the base indices: directions v = T u.
    pub fn transform_base(&self, t: &CMatrix) -> Tensor4 {
        assert_eq!(t.rows(), self.base_dim);
        let new_dim = t.cols();
        let mut out = Tensor4::zeros(new_dim, self.rank);
        for a in 0..new_dim {
            for b in 0..new_dim {
                for p in 0..self.rank {
                    for q in 0..self.rank {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for i in 0..self.base_dim {
                            for j in 0..self.base_dim {
                                acc += self.get(i, j, p, q) * t[(i, a)] * t[(j, b)].conj();
                            }
                        }
                        out.set(a, b, p, q, acc);
                    }
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Tensor4 {
        Tensor4 {
            base_dim: self.base_dim,
            rank: self.rank,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Tensor4) -> Tensor4 {
        assert_eq!(self.base_dim, other.base_dim);
        assert_eq!(self.rank, other.rank);
        Tensor4 {
            base_dim: self.base_dim,
            rank: self.rank,
            data: self.data.iter().zip(other.data.iter()).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        self.add(&other.scaled(-1.0))
    }

    pub fn max_abs_diff(&self, other: &Tensor4) -> f64 {
        assert_eq!(self.base_dim, other.base_dim);
        assert_eq!(self.rank, other.rank);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
