use num_complex::Complex64;
use std::fmt::Write as _;

use super::jet::{Singularity, WirtingerJet};

/// Expression tree for metric entries.
///
/// Coordinates are 0-based internally; the text format writes z1..zn.
/// Subtraction and unary minus normalize to addition with a (-1) factor at
/// parse time, so the tree stays on this closed set of operators.
#[derive(Clone, Debug, PartialEq)]
pub enum ExprNode {
    Const(f64),
    Coord(usize),
    Conj(Box<ExprNode>),
    Add(Box<ExprNode>, Box<ExprNode>),
    Mul(Box<ExprNode>, Box<ExprNode>),
    Div(Box<ExprNode>, Box<ExprNode>),
    PowInt(Box<ExprNode>, i32),
    Log(Box<ExprNode>),
    Exp(Box<ExprNode>),
    AbsQ(Box<ExprNode>),
}

impl ExprNode {
    /// Structural complex conjugate: real constants are fixed, coordinates
    /// pick up a conjugation, and conjugations cancel.
    pub fn conjugated(&self) -> ExprNode {
        match self {
            ExprNode::Const(c) => ExprNode::Const(*c),
            ExprNode::Coord(k) => ExprNode::Conj(Box::new(ExprNode::Coord(*k))),
            ExprNode::Conj(x) => (**x).clone(),
            ExprNode::Add(a, b) => ExprNode::Add(Box::new(a.conjugated()), Box::new(b.conjugated())),
            ExprNode::Mul(a, b) => ExprNode::Mul(Box::new(a.conjugated()), Box::new(b.conjugated())),
            ExprNode::Div(a, b) => ExprNode::Div(Box::new(a.conjugated()), Box::new(b.conjugated())),
            ExprNode::PowInt(x, k) => ExprNode::PowInt(Box::new(x.conjugated()), *k),
            ExprNode::Log(x) => ExprNode::Log(Box::new(x.conjugated())),
            ExprNode::Exp(x) => ExprNode::Exp(Box::new(x.conjugated())),
            ExprNode::AbsQ(x) => ExprNode::AbsQ(Box::new((**x).clone())),
        }
    }

    /// Renumbers coordinates z^k -> z^(k + offset).
    pub fn shift_coords(&self, offset: usize) -> ExprNode {
        match self {
            ExprNode::Const(c) => ExprNode::Const(*c),
            ExprNode::Coord(k) => ExprNode::Coord(k + offset),
            ExprNode::Conj(x) => ExprNode::Conj(Box::new(x.shift_coords(offset))),
            ExprNode::Add(a, b) => {
                ExprNode::Add(Box::new(a.shift_coords(offset)), Box::new(b.shift_coords(offset)))
            }
            ExprNode::Mul(a, b) => {
                ExprNode::Mul(Box::new(a.shift_coords(offset)), Box::new(b.shift_coords(offset)))
            }
            ExprNode::Div(a, b) => {
                ExprNode::Div(Box::new(a.shift_coords(offset)), Box::new(b.shift_coords(offset)))
            }
            ExprNode::PowInt(x, k) => ExprNode::PowInt(Box::new(x.shift_coords(offset)), *k),
            ExprNode::Log(x) => ExprNode::Log(Box::new(x.shift_coords(offset))),
            ExprNode::Exp(x) => ExprNode::Exp(Box::new(x.shift_coords(offset))),
            ExprNode::AbsQ(x) => ExprNode::AbsQ(Box::new(x.shift_coords(offset))),
        }
    }

    /// Substitutes map[k] for the coordinate z^(k+1). The replacement enters
    /// conjugation nodes structurally, so substituting holomorphic
    /// expressions keeps Wirtinger structure intact.
    pub fn substitute(&self, map: &[ExprNode]) -> ExprNode {
        match self {
            ExprNode::Const(c) => ExprNode::Const(*c),
            ExprNode::Coord(k) => map[*k].clone(),
            ExprNode::Conj(x) => ExprNode::Conj(Box::new(x.substitute(map))),
            ExprNode::Add(a, b) => {
                ExprNode::Add(Box::new(a.substitute(map)), Box::new(b.substitute(map)))
            }
            ExprNode::Mul(a, b) => {
                ExprNode::Mul(Box::new(a.substitute(map)), Box::new(b.substitute(map)))
            }
            ExprNode::Div(a, b) => {
                ExprNode::Div(Box::new(a.substitute(map)), Box::new(b.substitute(map)))
            }
            ExprNode::PowInt(x, k) => ExprNode::PowInt(Box::new(x.substitute(map)), *k),
            ExprNode::Log(x) => ExprNode::Log(Box::new(x.substitute(map))),
            ExprNode::Exp(x) => ExprNode::Exp(Box::new(x.substitute(map))),
            ExprNode::AbsQ(x) => ExprNode::AbsQ(Box::new(x.substitute(map))),
        }
    }

    pub fn max_coord(&self) -> Option<usize> {
        match self {
            ExprNode::Const(_) => None,
            ExprNode::Coord(k) => Some(*k),
            ExprNode::Conj(x) | ExprNode::PowInt(x, _) | ExprNode::Log(x) | ExprNode::Exp(x) | ExprNode::AbsQ(x) => {
                x.max_coord()
            }
            ExprNode::Add(a, b) | ExprNode::Mul(a, b) | ExprNode::Div(a, b) => {
                match (a.max_coord(), b.max_coord()) {
                    (None, m) | (m, None) => m,
                    (Some(x), Some(y)) => Some(x.max(y)),
                }
            }
        }
    }

    /// Plain value evaluation, used by the finite-difference probe so that
    /// the cross-check shares no derivative code with the jet path.
    pub fn eval_value(&self, z: &[Complex64], floor: f64) -> Result<Complex64, Singularity> {
        Ok(match self {
            ExprNode::Const(c) => Complex64::new(*c, 0.0),
            ExprNode::Coord(k) => z[*k],
            ExprNode::Conj(x) => x.eval_value(z, floor)?.conj(),
            ExprNode::Add(a, b) => a.eval_value(z, floor)? + b.eval_value(z, floor)?,
            ExprNode::Mul(a, b) => a.eval_value(z, floor)? * b.eval_value(z, floor)?,
            ExprNode::Div(a, b) => {
                let den = b.eval_value(z, floor)?;
                if den.norm() <= floor {
                    return Err(Singularity { magnitude: den.norm() });
                }
                a.eval_value(z, floor)? / den
            }
            ExprNode::PowInt(x, k) => {
                let v = x.eval_value(z, floor)?;
                if *k < 0 && v.norm() <= floor {
                    return Err(Singularity { magnitude: v.norm() });
                }
                if *k >= 0 {
                    v.powu(*k as u32)
                } else {
                    v.powu((-*k) as u32).finv()
                }
            }
            ExprNode::Log(x) => {
                let v = x.eval_value(z, floor)?;
                if v.norm() <= floor {
                    return Err(Singularity { magnitude: v.norm() });
                }
                v.ln()
            }
            ExprNode::Exp(x) => x.eval_value(z, floor)?.exp(),
            ExprNode::AbsQ(x) => {
                let v = x.eval_value(z, floor)?;
                Complex64::new(v.norm_sqr(), 0.0)
            }
        })
    }

    /// Exact jet evaluation at a point with `n` coordinates.
    pub fn eval_jet(&self, z: &[Complex64], floor: f64) -> Result<WirtingerJet, Singularity> {
        let n = z.len();
        Ok(match self {
            ExprNode::Const(c) => WirtingerJet::constant(Complex64::new(*c, 0.0), n),
            ExprNode::Coord(k) => WirtingerJet::coordinate(*k, z[*k], n),
            ExprNode::Conj(x) => x.eval_jet(z, floor)?.conj(),
            ExprNode::Add(a, b) => &a.eval_jet(z, floor)? + &b.eval_jet(z, floor)?,
            ExprNode::Mul(a, b) => &a.eval_jet(z, floor)? * &b.eval_jet(z, floor)?,
            ExprNode::Div(a, b) => a.eval_jet(z, floor)?.div(&b.eval_jet(z, floor)?, floor)?,
            ExprNode::PowInt(x, k) => x.eval_jet(z, floor)?.powi(*k, floor)?,
            ExprNode::Log(x) => x.eval_jet(z, floor)?.ln(floor)?,
            ExprNode::Exp(x) => x.eval_jet(z, floor)?.exp(),
            ExprNode::AbsQ(x) => {
                let j = x.eval_jet(z, floor)?;
                &j * &j.conj()
            }
        })
    }

    /// Canonical text form; parses back to a numerically identical tree.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn write(&self, out: &mut String) {
        match self {
            ExprNode::Const(c) => {
                if *c < 0.0 {
                    let _ = write!(out, "({c:?})");
                } else {
                    let _ = write!(out, "{c:?}");
                }
            }
            ExprNode::Coord(k) => {
                let _ = write!(out, "z{}", k + 1);
            }
            ExprNode::Conj(x) => {
                out.push_str("conj(");
                x.write(out);
                out.push(')');
            }
            ExprNode::Add(a, b) => {
                out.push('(');
                a.write(out);
                out.push_str(" + ");
                b.write(out);
                out.push(')');
            }
            ExprNode::Mul(a, b) => {
                out.push('(');
                a.write(out);
                out.push_str(" * ");
                b.write(out);
                out.push(')');
            }
            ExprNode::Div(a, b) => {
                out.push('(');
                a.write(out);
                out.push_str(" / ");
                b.write(out);
                out.push(')');
            }
            ExprNode::PowInt(x, k) => {
                x.write_pow_base(out);
                let _ = write!(out, "^{k}");
            }
            ExprNode::Log(x) => {
                out.push_str("log(");
                x.write(out);
                out.push(')');
            }
            ExprNode::Exp(x) => {
                out.push_str("exp(");
                x.write(out);
                out.push(')');
            }
            ExprNode::AbsQ(x) => {
                out.push_str("absq(");
                x.write(out);
                out.push(')');
            }
        }
    }

    fn write_pow_base(&self, out: &mut String) {
        match self {
            // Already self-delimiting forms can stand bare before '^'.
            ExprNode::Coord(_) | ExprNode::Conj(_) | ExprNode::Log(_) | ExprNode::Exp(_) | ExprNode::AbsQ(_) => {
                self.write(out)
            }
            _ => {
                out.push('(');
                self.write(out);
                out.push(')');
            }
        }
    }
}

// Convenience constructors, used heavily by the catalog.
pub fn num(c: f64) -> ExprNode {
    ExprNode::Const(c)
}

pub fn coord(k: usize) -> ExprNode {
    ExprNode::Coord(k)
}

pub fn conj(x: ExprNode) -> ExprNode {
    ExprNode::Conj(Box::new(x))
}

pub fn add(a: ExprNode, b: ExprNode) -> ExprNode {
    ExprNode::Add(Box::new(a), Box::new(b))
}

pub fn sub(a: ExprNode, b: ExprNode) -> ExprNode {
    add(a, mul(num(-1.0), b))
}

pub fn mul(a: ExprNode, b: ExprNode) -> ExprNode {
    ExprNode::Mul(Box::new(a), Box::new(b))
}

pub fn div(a: ExprNode, b: ExprNode) -> ExprNode {
    ExprNode::Div(Box::new(a), Box::new(b))
}

pub fn powi(x: ExprNode, k: i32) -> ExprNode {
    ExprNode::PowInt(Box::new(x), k)
}

pub fn absq(x: ExprNode) -> ExprNode {
    ExprNode::AbsQ(Box::new(x))
}

/// 1 + |z|^2 style helper: c + sum_k absq(z^k) over k in 0..n.
pub fn const_plus_norm_sq(c: f64, n: usize) -> ExprNode {
    let mut acc = num(c);
    for k in 0..n {
        acc = add(acc, absq(coord(k)));
    }
    acc
}

/// 1 - |z|^2 style helper: c - sum_k absq(z^k) over k in 0..n.
pub fn const_minus_norm_sq(c: f64, n: usize) -> ExprNode {
    let mut acc = num(c);
    for k in 0..n {
        acc = sub(acc, absq(coord(k)));
    }
    acc
}
