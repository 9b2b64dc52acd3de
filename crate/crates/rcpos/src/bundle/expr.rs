//! Symbolic descriptions of derived bundles.
//!
//! An expression is evaluated against a metric field; `Base` stands for the
//! bundle the field describes (the tangent bundle when the field is square).
//! Index sets for sub- and quotient bundles refer to frame positions and are
//! kept sorted and 0-based internally; the textual form is 1-based to match
//! the metric entry syntax.

use std::fmt;

use super::indices::binomial;
use super::BundleError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleExpr {
    Base,
    Dual(Box<BundleExpr>),
    TensorPow(Box<BundleExpr>, usize),
    ExtPow(Box<BundleExpr>, usize),
    SymPow(Box<BundleExpr>, usize),
    Sub(Box<BundleExpr>, Vec<usize>),
    Quot(Box<BundleExpr>, Vec<usize>),
    Det(Box<BundleExpr>),
}

impl BundleExpr {
    /// Rank of the derived bundle over a base bundle of rank `base_rank`,
    /// validating the whole expression: exponents, index sets, and the cap on
    /// every intermediate rank.
    pub fn rank(&self, base_rank: usize, cap: usize) -> Result<usize, BundleError> {
        let overflow = |r: Option<usize>| -> Result<usize, BundleError> {
            match r {
                Some(r) if r <= cap => Ok(r),
                Some(r) => Err(BundleError::RankOverflow { rank: r, cap }),
                None => Err(BundleError::RankOverflow { rank: usize::MAX, cap }),
            }
        };
        match self {
            BundleExpr::Base => overflow(Some(base_rank)),
            BundleExpr::Dual(e) => e.rank(base_rank, cap),
            BundleExpr::TensorPow(e, k) => {
                let r = e.rank(base_rank, cap)?;
                if *k == 0 {
                    return Err(BundleError::Parse {
                        message: "tensor power exponent must be at least 1".into(),
                    });
                }
                overflow(r.checked_pow(*k as u32))
            }
            BundleExpr::ExtPow(e, p) => {
                let r = e.rank(base_rank, cap)?;
                if *p == 0 || *p > r {
                    return Err(BundleError::Parse {
                        message: format!("exterior power degree must be in 1..={r}, got {p}"),
                    });
                }
                overflow(binomial(r, *p))
            }
            BundleExpr::SymPow(e, p) => {
                let r = e.rank(base_rank, cap)?;
                if *p == 0 {
                    return Err(BundleError::Parse {
                        message: "symmetric power degree must be at least 1".into(),
                    });
                }
                overflow(r.checked_add(*p - 1).and_then(|n| binomial(n, *p)))
            }
            BundleExpr::Sub(e, set) => {
                let r = e.rank(base_rank, cap)?;
                check_index_set(set, r, false)?;
                Ok(set.len())
            }
            BundleExpr::Quot(e, set) => {
                let r = e.rank(base_rank, cap)?;
                check_index_set(set, r, true)?;
                Ok(r - set.len())
            }
            BundleExpr::Det(e) => {
                e.rank(base_rank, cap)?;
                Ok(1)
            }
        }
    }

    /// Parses the textual form: `base` (or `tangent`), `dual(e)`, `det(e)`,
    /// `tensorpow(e, k)`, `extpow(e, p)`, `sympow(e, p)`, `sub(e, i, ...)`,
    /// `quot(e, i, ...)` with 1-based frame indices.
    pub fn parse(src: &str) -> Result<BundleExpr, BundleError> {
        let (expr, rest) = parse_expr(src)?;
        let rest = rest.trim_start();
        if !rest.is_empty() {
            return Err(err(format!("unexpected trailing input `{rest}`")));
        }
        Ok(expr)
    }
}

fn check_index_set(set: &[usize], rank: usize, proper: bool) -> Result<(), BundleError> {
    let bad = |detail: String| Err(BundleError::BadIndexSet { detail });
    if set.is_empty() {
        return bad("index set is empty".into());
    }
    for w in 0..set.len() {
        if set[w] >= rank {
            return bad(format!("index {} out of range for rank {rank}", set[w] + 1));
        }
        if w > 0 && set[w] <= set[w - 1] {
            return bad("indices must be strictly increasing".into());
        }
    }
    if proper && set.len() == rank {
        return bad(format!("quotient by all {rank} frame indices leaves rank 0"));
    }
    Ok(())
}

fn err(message: String) -> BundleError {
    BundleError::Parse { message }
}

fn parse_expr(s: &str) -> Result<(BundleExpr, &str), BundleError> {
    let s = s.trim_start();
    let split = s
        .char_indices()
        .find(|(_, c)| !c.is_ascii_alphanumeric() && *c != '_')
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let name = &s[..split];
    let rest = &s[split..];
    match name {
        "base" | "tangent" => Ok((BundleExpr::Base, rest)),
        "dual" => {
            let (inner, rest) = parse_unary(rest)?;
            Ok((BundleExpr::Dual(Box::new(inner)), rest))
        }
        "det" => {
            let (inner, rest) = parse_unary(rest)?;
            Ok((BundleExpr::Det(Box::new(inner)), rest))
        }
        "tensorpow" | "extpow" | "sympow" => {
            let (inner, k, rest) = parse_power(rest, name)?;
            let e = Box::new(inner);
            let expr = match name {
                "tensorpow" => BundleExpr::TensorPow(e, k),
                "extpow" => BundleExpr::ExtPow(e, k),
                _ => BundleExpr::SymPow(e, k),
            };
            Ok((expr, rest))
        }
        "sub" | "quot" => {
            let (inner, set, rest) = parse_indexed(rest, name)?;
            let e = Box::new(inner);
            let expr =
                if name == "sub" { BundleExpr::Sub(e, set) } else { BundleExpr::Quot(e, set) };
            Ok((expr, rest))
        }
        "" => Err(err(format!("expected a bundle expression at `{s}`"))),
        other => Err(err(format!("unknown bundle constructor `{other}`"))),
    }
}

fn expect<'a>(s: &'a str, c: char, ctx: &str) -> Result<&'a str, BundleError> {
    let s = s.trim_start();
    match s.strip_prefix(c) {
        Some(rest) => Ok(rest),
        None => Err(err(format!("expected `{c}` {ctx}"))),
    }
}

fn parse_unary(s: &str) -> Result<(BundleExpr, &str), BundleError> {
    let s = expect(s, '(', "after the constructor name")?;
    let (inner, rest) = parse_expr(s)?;
    let rest = expect(rest, ')', "to close the argument list")?;
    Ok((inner, rest))
}

fn parse_power<'a>(s: &'a str, name: &str) -> Result<(BundleExpr, usize, &'a str), BundleError> {
    let s = expect(s, '(', "after the constructor name")?;
    let (inner, rest) = parse_expr(s)?;
    let rest = expect(rest, ',', &format!("between the `{name}` argument and its exponent"))?;
    let (k, rest) = parse_integer(rest)?;
    let rest = expect(rest, ')', "to close the argument list")?;
    Ok((inner, k, rest))
}

fn parse_indexed<'a>(
    s: &'a str,
    name: &str,
) -> Result<(BundleExpr, Vec<usize>, &'a str), BundleError> {
    let s = expect(s, '(', "after the constructor name")?;
    let (inner, mut rest) = parse_expr(s)?;
    let mut set = Vec::new();
    loop {
        let t = rest.trim_start();
        if let Some(t) = t.strip_prefix(',') {
            let (k, t) = parse_integer(t)?;
            if k == 0 {
                return Err(err(format!("`{name}` indices are 1-based; 0 is out of range")));
            }
            set.push(k - 1);
            rest = t;
        } else {
            break;
        }
    }
    let rest = expect(rest, ')', "to close the argument list")?;
    if set.is_empty() {
        return Err(err(format!("`{name}` needs at least one frame index")));
    }
    set.sort_unstable();
    Ok((inner, set, rest))
}

fn parse_integer(s: &str) -> Result<(usize, &str), BundleError> {
    let s = s.trim_start();
    let split = s
        .char_indices()
        .find(|(_, c)| !c.is_ascii_digit())
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    if split == 0 {
        return Err(err(format!("expected an integer at `{s}`")));
    }
    let k: usize = s[..split]
        .parse()
        .map_err(|_| err(format!("integer `{}` is out of range", &s[..split])))?;
    Ok((k, &s[split..]))
}

impl fmt::Display for BundleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleExpr::Base => write!(f, "base"),
            BundleExpr::Dual(e) => write!(f, "dual({e})"),
            BundleExpr::TensorPow(e, k) => write!(f, "tensorpow({e}, {k})"),
            BundleExpr::ExtPow(e, p) => write!(f, "extpow({e}, {p})"),
            BundleExpr::SymPow(e, p) => write!(f, "sympow({e}, {p})"),
            BundleExpr::Sub(e, set) => write_indexed(f, "sub", e, set),
            BundleExpr::Quot(e, set) => write_indexed(f, "quot", e, set),
            BundleExpr::Det(e) => write!(f, "det({e})"),
        }
    }
}

fn write_indexed(
    f: &mut fmt::Formatter<'_>,
    name: &str,
    e: &BundleExpr,
    set: &[usize],
) -> fmt::Result {
    write!(f, "{name}({e}")?;
    for i in set {
        write!(f, ", {}", i + 1)?;
    }
    write!(f, ")")
}
