use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use crate::linalg::CMatrix;

/// Forward-mode jet of a function of (z^1..z^n) and their conjugates,
/// truncated at the mixed second order that curvature needs.
///
/// The coordinates and their conjugates are treated as independent
/// variables, so `dz` and `dzbar` are unrelated for a general expression and
/// `dzdzbar[(i, j)]` holds d^2 / dz^i dzbar^j. Pure second derivatives are
/// never formed; nothing downstream consumes them.
#[derive(Clone, Debug)]
pub struct WirtingerJet {
    pub value: Complex64,
    pub dz: Vec<Complex64>,
    pub dzbar: Vec<Complex64>,
    pub dzdzbar: CMatrix,
}

/// Evaluation hit a pole or a logarithmic singularity.
#[derive(Clone, Copy, Debug)]
pub struct Singularity {
    pub magnitude: f64,
}

impl WirtingerJet {
    pub fn vars(&self) -> usize {
        self.dz.len()
    }

    pub fn constant(value: Complex64, n: usize) -> Self {
        WirtingerJet {
            value,
            dz: vec![Complex64::new(0.0, 0.0); n],
            dzbar: vec![Complex64::new(0.0, 0.0); n],
            dzdzbar: CMatrix::zeros(n, n),
        }
    }

    /// The coordinate z^k as a jet.
    pub fn coordinate(k: usize, value: Complex64, n: usize) -> Self {
        let mut jet = WirtingerJet::constant(value, n);
        jet.dz[k] = Complex64::new(1.0, 0.0);
        jet
    }

    /// Complex conjugation swaps the two derivative slots:
    /// d(conj f)/dz^i = conj(df/dzbar^i) and the mixed block transposes.
    pub fn conj(&self) -> Self {
        let n = self.vars();
        WirtingerJet {
            value: self.value.conj(),
            dz: self.dzbar.iter().map(|z| z.conj()).collect(),
            dzbar: self.dz.iter().map(|z| z.conj()).collect(),
            dzdzbar: CMatrix::from_fn(n, n, |i, j| self.dzdzbar[(j, i)].conj()),
        }
    }

    /// Reciprocal; fails when the value is within `floor` of zero.
    pub fn recip(&self, floor: f64) -> Result<Self, Singularity> {
        let v = self.value;
        if v.norm() <= floor {
            return Err(Singularity { magnitude: v.norm() });
        }
        let n = self.vars();
        let inv = 1.0 / v;
        let inv2 = inv * inv;
        let inv3 = inv2 * inv;
        let two = Complex64::new(2.0, 0.0);
        Ok(WirtingerJet {
            value: inv,
            dz: self.dz.iter().map(|d| -d * inv2).collect(),
            dzbar: self.dzbar.iter().map(|d| -d * inv2).collect(),
            dzdzbar: CMatrix::from_fn(n, n, |i, j| {
                -self.dzdzbar[(i, j)] * inv2 + two * self.dz[i] * self.dzbar[j] * inv3
            }),
        })
    }

    pub fn div(&self, other: &Self, floor: f64) -> Result<Self, Singularity> {
        Ok(self * &other.recip(floor)?)
    }

    /// Principal branch logarithm; fails within `floor` of the origin.
    pub fn ln(&self, floor: f64) -> Result<Self, Singularity> {
        let v = self.value;
        if v.norm() <= floor {
            return Err(Singularity { magnitude: v.norm() });
        }
        let n = self.vars();
        let inv = 1.0 / v;
        let inv2 = inv * inv;
        Ok(WirtingerJet {
            value: v.ln(),
            dz: self.dz.iter().map(|d| d * inv).collect(),
            dzbar: self.dzbar.iter().map(|d| d * inv).collect(),
            dzdzbar: CMatrix::from_fn(n, n, |i, j| {
                self.dzdzbar[(i, j)] * inv - self.dz[i] * self.dzbar[j] * inv2
            }),
        })
    }

    pub fn exp(&self) -> Self {
        let n = self.vars();
        let e = self.value.exp();
        WirtingerJet {
            value: e,
            dz: self.dz.iter().map(|d| d * e).collect(),
            dzbar: self.dzbar.iter().map(|d| d * e).collect(),
            dzdzbar: CMatrix::from_fn(n, n, |i, j| {
                e * (self.dzdzbar[(i, j)] + self.dz[i] * self.dzbar[j])
            }),
        }
    }

    /// Integer power; negative exponents fail within `floor` of zero.
    pub fn powi(&self, k: i32, floor: f64) -> Result<Self, Singularity> {
        let n = self.vars();
        if k == 0 {
            return Ok(WirtingerJet::constant(Complex64::new(1.0, 0.0), n));
        }
        if k < 0 && self.value.norm() <= floor {
            return Err(Singularity { magnitude: self.value.norm() });
        }
        let kk = Complex64::new(k as f64, 0.0);
        let km1 = Complex64::new((k - 1) as f64, 0.0);
        let p = int_pow(self.value, k);
        // v^(k-1) and v^(k-2) with the k = 1 corner handled so that 0^0
        // never arises from the second-order coefficient.
        let pm1 = int_pow(self.value, k - 1);
        let pm2 = if k == 1 { Complex64::new(0.0, 0.0) } else { int_pow(self.value, k - 2) };
        Ok(WirtingerJet {
            value: p,
            dz: self.dz.iter().map(|d| kk * pm1 * d).collect(),
            dzbar: self.dzbar.iter().map(|d| kk * pm1 * d).collect(),
            dzdzbar: CMatrix::from_fn(n, n, |i, j| {
                kk * pm1 * self.dzdzbar[(i, j)] + kk * km1 * pm2 * self.dz[i] * self.dzbar[j]
            }),
        })
    }
}

fn int_pow(v: Complex64, k: i32) -> Complex64 {
    if k >= 0 {
        v.powu(k as u32)
    } else {
        v.powu((-k) as u32).finv()
    }
}

impl Add for &WirtingerJet {
    type Output = WirtingerJet;
    fn add(self, rhs: &WirtingerJet) -> WirtingerJet {
        let n = self.vars();
        assert_eq!(n, rhs.vars());
        WirtingerJet {
            value: self.value + rhs.value,
            dz: self.dz.iter().zip(&rhs.dz).map(|(a, b)| a + b).collect(),
            dzbar: self.dzbar.iter().zip(&rhs.dzbar).map(|(a, b)| a + b).collect(),
            dzdzbar: self.dzdzbar.add(&rhs.dzdzbar),
        }
    }
}

impl Sub for &WirtingerJet {
    type Output = WirtingerJet;
    fn sub(self, rhs: &WirtingerJet) -> WirtingerJet {
        self + &(-rhs)
    }
}

impl Neg for &WirtingerJet {
    type Output = WirtingerJet;
    fn neg(self) -> WirtingerJet {
        let m1 = Complex64::new(-1.0, 0.0);
        self.scale(m1)
    }
}

impl Mul for &WirtingerJet {
    type Output = WirtingerJet;
    fn mul(self, rhs: &WirtingerJet) -> WirtingerJet {
        let n = self.vars();
        assert_eq!(n, rhs.vars());
        WirtingerJet {
            value: self.value * rhs.value,
            dz: (0..n).map(|i| self.dz[i] * rhs.value + self.value * rhs.dz[i]).collect(),
            dzbar: (0..n)
                .map(|j| self.dzbar[j] * rhs.value + self.value * rhs.dzbar[j])
                .collect(),
            dzdzbar: CMatrix::from_fn(n, n, |i, j| {
                self.dzdzbar[(i, j)] * rhs.value
                    + self.dz[i] * rhs.dzbar[j]
                    + self.dzbar[j] * rhs.dz[i]
                    + self.value * rhs.dzdzbar[(i, j)]
            }),
        }
    }
}

impl WirtingerJet {
    pub fn scale(&self, c: Complex64) -> WirtingerJet {
        let n = self.vars();
        WirtingerJet {
            value: self.value * c,
            dz: self.dz.iter().map(|d| d * c).collect(),
            dzbar: self.dzbar.iter().map(|d| d * c).collect(),
            dzdzbar: CMatrix::from_fn(n, n, |i, j| self.dzdzbar[(i, j)] * c),
        }
    }

    /// Largest entry magnitude across all jet slots; the natural scale for
    /// relative comparisons.
    pub fn magnitude(&self) -> f64 {
        let mut m = self.value.norm();
        for d in self.dz.iter().chain(self.dzbar.iter()) {
            m = m.max(d.norm());
        }
        m.max(self.dzdzbar.max_abs())
    }

    /// Reinterprets the jet in a larger variable space; the function does not
    /// depend on the new variables, so their slots are exactly zero.
    pub fn extend_vars(&self, total: usize) -> WirtingerJet {
        let n = self.vars();
        assert!(total >= n, "cannot shrink the variable space");
        let mut out = WirtingerJet::constant(self.value, total);
        out.dz[..n].copy_from_slice(&self.dz);
        out.dzbar[..n].copy_from_slice(&self.dzbar);
        for i in 0..n {
            for j in 0..n {
                out.dzdzbar[(i, j)] = self.dzdzbar[(i, j)];
            }
        }
        out
    }
}

/// Matrix whose entries are jets. This is the working representation of a
/// metric around a point: value, first derivatives in each direction, and
/// the mixed second derivative block.
#[derive(Clone, Debug)]
pub struct JetMatrix {
    rows: usize,
    cols: usize,
    vars: usize,
    entries: Vec<WirtingerJet>,
}

impl JetMatrix {
    pub fn from_fn(rows: usize, cols: usize, vars: usize, mut f: impl FnMut(usize, usize) -> WirtingerJet) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let jet = f(i, j);
                assert_eq!(jet.vars(), vars);
                entries.push(jet);
            }
        }
        JetMatrix { rows, cols, vars, entries }
    }

    pub fn constant(m: &CMatrix, vars: usize) -> Self {
        JetMatrix::from_fn(m.rows(), m.cols(), vars, |i, j| WirtingerJet::constant(m[(i, j)], vars))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn entry(&self, i: usize, j: usize) -> &WirtingerJet {
        &self.entries[i * self.cols + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut WirtingerJet {
        &mut self.entries[i * self.cols + j]
    }

    /// Matrix of values.
    pub fn value(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j).value)
    }

    /// Matrix of d/dz^i derivatives.
    pub fn d(&self, i: usize) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |r, c| self.entry(r, c).dz[i])
    }

    /// Matrix of d/dzbar^j derivatives.
    pub fn dbar(&self, j: usize) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |r, c| self.entry(r, c).dzbar[j])
    }

    /// Matrix of mixed second derivatives d^2/dz^i dzbar^j.
    pub fn ddbar(&self, i: usize, j: usize) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |r, c| self.entry(r, c).dzdzbar[(i, j)])
    }

    pub fn transpose(&self) -> JetMatrix {
        JetMatrix::from_fn(self.cols, self.rows, self.vars, |i, j| self.entry(j, i).clone())
    }

    /// Chain rule for a constant linear change of base coordinates z = B w:
    /// the w-derivative slots are linear recombinations of the z-slots,
    /// values untouched. B must be square of size `vars`.
    pub fn pullback_linear(&self, b: &CMatrix) -> JetMatrix {
        assert_eq!((b.rows(), b.cols()), (self.vars, self.vars));
        let n = self.vars;
        JetMatrix::from_fn(self.rows, self.cols, n, |r, c| {
            let e = self.entry(r, c);
            let mut out = WirtingerJet::constant(e.value, n);
            for i in 0..n {
                for k in 0..n {
                    out.dz[i] += b[(k, i)] * e.dz[k];
                    out.dzbar[i] += b[(k, i)].conj() * e.dzbar[k];
                }
            }
            out.dzdzbar = CMatrix::from_fn(n, n, |i, j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    for l in 0..n {
                        acc += b[(k, i)] * b[(l, j)].conj() * e.dzdzbar[(k, l)];
                    }
                }
                acc
            });
            out
        })
    }

    /// Pads every entry into a larger variable space (slots for the new
    /// variables are zero).
    pub fn extend_vars(&self, total: usize) -> JetMatrix {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            vars: total,
            entries: self.entries.iter().map(|e| e.extend_vars(total)).collect(),
        }
    }

    pub fn conj(&self) -> JetMatrix {
        JetMatrix::from_fn(self.rows, self.cols, self.vars, |i, j| self.entry(i, j).conj())
    }

    pub fn add(&self, other: &JetMatrix) -> JetMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        JetMatrix::from_fn(self.rows, self.cols, self.vars, |i, j| self.entry(i, j) + other.entry(i, j))
    }

    pub fn sub(&self, other: &JetMatrix) -> JetMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        JetMatrix::from_fn(self.rows, self.cols, self.vars, |i, j| self.entry(i, j) - other.entry(i, j))
    }

    pub fn matmul(&self, other: &JetMatrix) -> JetMatrix {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.vars, other.vars);
        JetMatrix::from_fn(self.rows, other.cols, self.vars, |i, j| {
            let mut acc = WirtingerJet::constant(Complex64::new(0.0, 0.0), self.vars);
            for k in 0..self.cols {
                acc = &acc + &(self.entry(i, k) * other.entry(k, j));
            }
            acc
        })
    }

    /// Jet of the matrix inverse, propagated from the inverse at the value
    /// level: dK = -K (dA) K and the corresponding mixed second-order rule.
    pub fn inverse(&self, pivot_tol: f64) -> Result<JetMatrix, crate::linalg::LinalgError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let vars = self.vars;
        let k0 = self.value().inverse(pivot_tol)?;
        let di: Vec<CMatrix> = (0..vars).map(|i| k0.matmul(&self.d(i)).matmul(&k0).scale(Complex64::new(-1.0, 0.0))).collect();
        let dbi: Vec<CMatrix> =
            (0..vars).map(|j| k0.matmul(&self.dbar(j)).matmul(&k0).scale(Complex64::new(-1.0, 0.0))).collect();
        let mut out = JetMatrix::constant(&k0, vars);
        for r in 0..n {
            for c in 0..n {
                for i in 0..vars {
                    out.entry_mut(r, c).dz[i] = di[i][(r, c)];
                    out.entry_mut(r, c).dzbar[i] = dbi[i][(r, c)];
                }
            }
        }
        for i in 0..vars {
            for j in 0..vars {
                // d_i dbar_j K = -K (d_i dbar_j A) K
                //               + K (d_i A) K (dbar_j A) K
                //               + K (dbar_j A) K (d_i A) K
                let a_i = self.d(i);
                let a_j = self.dbar(j);
                let m = k0
                    .matmul(&self.ddbar(i, j))
                    .matmul(&k0)
                    .scale(Complex64::new(-1.0, 0.0))
                    .add(&k0.matmul(&a_i).matmul(&k0).matmul(&a_j).matmul(&k0))
                    .add(&k0.matmul(&a_j).matmul(&k0).matmul(&a_i).matmul(&k0));
                for r in 0..n {
                    for c in 0..n {
                        out.entry_mut(r, c).dzdzbar[(i, j)] = m[(r, c)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Determinant as a jet, by LU elimination with value-magnitude pivoting.
    pub fn determinant(&self, floor: f64) -> Result<WirtingerJet, Singularity> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut work = self.clone();
        let mut det = WirtingerJet::constant(Complex64::new(1.0, 0.0), self.vars);
        let mut sign = 1.0;
        for col in 0..n {
            let mut pivot = col;
            let mut best = work.entry(col, col).value.norm();
            for r in col + 1..n {
                let mag = work.entry(r, col).value.norm();
                if mag > best {
                    best = mag;
                    pivot = r;
                }
            }
            if best <= floor {
                // Singular value part: determinant jet of an exactly rank
                // deficient matrix is still well defined (zero value), but
                // elimination cannot continue reliably.
                return Err(Singularity { magnitude: best });
            }
            if pivot != col {
                for j in 0..n {
                    let a = work.entry(col, j).clone();
                    let b = work.entry(pivot, j).clone();
                    *work.entry_mut(col, j) = b;
                    *work.entry_mut(pivot, j) = a;
                }
                sign = -sign;
            }
            let diag = work.entry(col, col).clone();
            det = &det * &diag;
            let inv = diag.recip(floor)?;
            for r in col + 1..n {
                let factor = &work.entry(r, col).clone() * &inv;
                for j in col..n {
                    let sub = &factor * work.entry(col, j);
                    *work.entry_mut(r, j) = &work.entry(r, j).clone() - &sub;
                }
            }
        }
        Ok(det.scale(Complex64::new(sign, 0.0)))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> JetMatrix {
        JetMatrix::from_fn(rows.len(), cols.len(), self.vars, |i, j| {
            self.entry(rows[i], cols[j]).clone()
        })
    }

    /// Largest violation of the Hermitian jet structure: value symmetry,
    /// conj(d h_ab / dz^i) = d h_ba / dzbar^i, and the mixed block relation.
    /// Relative to the value scale.
    pub fn hermitian_jet_residual(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut scale: f64 = 1e-300;
        for e in &self.entries {
            scale = scale.max(e.value.norm());
            for d in e.dz.iter().chain(e.dzbar.iter()) {
                scale = scale.max(d.norm());
            }
            scale = scale.max(e.dzdzbar.max_abs());
        }
        let mut worst = 0.0f64;
        for a in 0..self.rows {
            for b in 0..self.cols {
                let e = self.entry(a, b);
                let f = self.entry(b, a);
                worst = worst.max((e.value - f.value.conj()).norm());
                for i in 0..self.vars {
                    worst = worst.max((e.dz[i].conj() - f.dzbar[i]).norm());
                }
                for i in 0..self.vars {
                    for j in 0..self.vars {
                        worst = worst.max((e.dzdzbar[(i, j)].conj() - f.dzdzbar[(j, i)]).norm());
                    }
                }
            }
        }
        worst / scale
    }
}
