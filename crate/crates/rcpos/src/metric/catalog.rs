use num_complex::Complex64;

use super::expr::{self, ExprNode};
use super::field::{Domain, MetricField};
use super::MetricError;
use crate::Tolerances;

/// Tangent-bundle chart metric of complex projective space:
/// h[i][j] = delta_ij / q - conj(z_i) z_j / q^2 with q = 1 + |z|^2.
pub fn fubini_study(n: usize) -> Result<MetricField, MetricError> {
    if n < 1 {
        return Err(MetricError::BadParameter { message: "fubini_study needs n >= 1".into() });
    }
    let q = || expr::const_plus_norm_sq(1.0, n);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let cross = expr::div(
                expr::mul(expr::conj(expr::coord(i)), expr::coord(j)),
                expr::powi(q(), 2),
            );
            let e = if i == j {
                expr::sub(expr::div(expr::num(1.0), q()), cross)
            } else {
                expr::mul(expr::num(-1.0), cross)
            };
            entries.push(e);
        }
    }
    Ok(MetricField::new("fubini_study", n, n, entries, Domain::Entire).with_kahler_hint(true))
}

/// Identity metric on the trivial rank-n bundle over C^n.
pub fn flat(n: usize) -> Result<MetricField, MetricError> {
    if n < 1 {
        return Err(MetricError::BadParameter { message: "flat needs n >= 1".into() });
    }
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(expr::num(if i == j { 1.0 } else { 0.0 }));
        }
    }
    Ok(MetricField::new("flat", n, n, entries, Domain::Entire).with_kahler_hint(true))
}

/// Tangent metric of the unit ball with the hyperbolic metric:
/// h[i][j] = delta_ij / p + conj(z_i) z_j / p^2 with p = 1 - |z|^2.
pub fn poincare_disc(n: usize) -> Result<MetricField, MetricError> {
    if n < 1 {
        return Err(MetricError::BadParameter { message: "poincare_disc needs n >= 1".into() });
    }
    let p = || expr::const_minus_norm_sq(1.0, n);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let cross = expr::div(
                expr::mul(expr::conj(expr::coord(i)), expr::coord(j)),
                expr::powi(p(), 2),
            );
            let e = if i == j {
                expr::add(expr::div(expr::num(1.0), p()), cross)
            } else {
                cross
            };
            entries.push(e);
        }
    }
    Ok(MetricField::new("poincare_disc", n, n, entries, Domain::Ball { radius: 1.0 })
        .with_kahler_hint(true))
}

/// Standard non-Kahler metric on the Hopf chart: h[i][j] = delta_ij / |z|^2,
/// defined on the annulus 1/2 < |z| < 2.
pub fn hopf(n: usize) -> Result<MetricField, MetricError> {
    if n < 2 {
        return Err(MetricError::BadParameter {
            message: "hopf needs n >= 2 (|z|^-2 is Kahler-flat in one variable)".into(),
        });
    }
    let norm_sq = || expr::const_plus_norm_sq(0.0, n);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let e = if i == j {
                expr::div(expr::num(1.0), norm_sq())
            } else {
                expr::num(0.0)
            };
            entries.push(e);
        }
    }
    Ok(
        MetricField::new("hopf", n, n, entries, Domain::Annulus { inner: 0.5, outer: 2.0 })
            .with_kahler_hint(false),
    )
}

/// Block-diagonal metric on the direct sum over the product domain. The
/// second factor's coordinates are shifted past the first factor's.
pub fn product(left: MetricField, right: MetricField) -> Result<MetricField, MetricError> {
    let dim = left.dim + right.dim;
    let rank = left.rank + right.rank;
    let mut entries = Vec::with_capacity(rank * rank);
    for a in 0..rank {
        for b in 0..rank {
            let e = match (a < left.rank, b < left.rank) {
                (true, true) => left.entry(a, b).clone(),
                (false, false) => {
                    right.entry(a - left.rank, b - left.rank).shift_coords(left.dim)
                }
                _ => expr::num(0.0),
            };
            entries.push(e);
        }
    }
    let kahler = match (left.kahler_hint, right.kahler_hint) {
        (Some(a), Some(b)) => Some(a && b),
        _ => None,
    };
    let name = format!("product({},{})", left.name, right.name);
    let domain =
        Domain::Product(Box::new(left.domain.clone()), Box::new(right.domain.clone()), left.dim);
    let mut m = MetricField::new(name, dim, rank, entries, domain);
    m.kahler_hint = kahler;
    Ok(m)
}

/// Conformal rescaling h' = factor * h by a real positive scalar expression.
pub fn conformal(base: MetricField, factor: ExprNode) -> Result<MetricField, MetricError> {
    if let Some(k) = factor.max_coord() {
        if k >= base.dim {
            return Err(MetricError::BadParameter {
                message: format!("conformal factor uses z{} but dim={}", k + 1, base.dim),
            });
        }
    }
    // A conformal factor must be real: require f = conj(f) structurally by
    // symmetrizing, then let validation catch any residual imaginary part.
    let sym = expr::mul(
        expr::num(0.5),
        expr::add(factor.clone(), factor.conjugated()),
    );
    let rank = base.rank;
    let mut entries = Vec::with_capacity(rank * rank);
    for a in 0..rank {
        for b in 0..rank {
            entries.push(expr::mul(sym.clone(), base.entry(a, b).clone()));
        }
    }
    let name = format!("conformal({})", base.name);
    let mut m = MetricField::new(name, base.dim, rank, entries, base.domain.clone());
    m.kahler_hint = None;
    Ok(m)
}

/// Fubini-Study tangent metric plus eps * |z|^2 * identity. Kahler for
/// eps = 0 only; the perturbation keeps the metric positive definite on the
/// sampling polydisc for moderate eps.
pub fn fs_perturbed(n: usize, eps: f64, tol: &Tolerances) -> Result<MetricField, MetricError> {
    if !eps.is_finite() || eps.abs() > 10.0 {
        return Err(MetricError::BadParameter {
            message: format!("fs_perturbed needs |eps| <= 10, got {eps}"),
        });
    }
    let fs = fubini_study(n)?;
    let bump = expr::mul(expr::num(eps), expr::const_plus_norm_sq(0.0, n));
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let base = fs.entry(i, j).clone();
            entries.push(if i == j { expr::add(base, bump.clone()) } else { base });
        }
    }
    let m = MetricField::new(
        format!("fs_perturbed(eps={eps})"),
        n,
        n,
        entries,
        Domain::Polydisc { radius: 2.0 },
    )
    .with_kahler_hint(eps == 0.0);
    m.validate(tol).map_err(|e| match e {
        MetricError::NotPositive { point, eigenvalue } => MetricError::BadParameter {
            message: format!(
                "fs_perturbed(eps={eps}) loses positivity at {point:?} (eigenvalue {eigenvalue:.3e})"
            ),
        },
        other => other,
    })?;
    Ok(m)
}

/// Resolves a metric selector. Two forms are accepted:
///
/// - `name:k` shorthand for a single integer parameter, e.g. `fubini_study:2`
/// - `name(arg, ...)` with integers, floats, nested selectors, or expression
///   text (for the conformal factor), e.g. `product(fubini_study(1), flat(2))`
pub fn by_selector(selector: &str, tol: &Tolerances) -> Result<MetricField, MetricError> {
    let s = selector.trim();
    if let Some((name, arg)) = s.split_once(':') {
        if !arg.contains('(') && !arg.contains(',') {
            return dispatch(name.trim(), &[arg.trim().to_string()], tol);
        }
    }
    if let Some(open) = s.find('(') {
        if !s.ends_with(')') {
            return Err(MetricError::BadParameter {
                message: format!("unbalanced parentheses in selector '{s}'"),
            });
        }
        let name = s[..open].trim();
        let inner = &s[open + 1..s.len() - 1];
        let args = split_top_level(inner)?;
        return dispatch(name, &args, tol);
    }
    dispatch(s, &[], tol)
}

fn split_top_level(s: &str) -> Result<Vec<String>, MetricError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(MetricError::BadParameter {
                        message: format!("unbalanced parentheses in '{s}'"),
                    });
                }
            }
            ',' if depth == 0 => {
                out.push(s[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() {
        out.push(last.to_string());
    }
    Ok(out)
}

fn want_usize(args: &[String], name: &str) -> Result<usize, MetricError> {
    if args.len() != 1 {
        return Err(MetricError::BadParameter {
            message: format!("{name} takes one integer parameter, got {}", args.len()),
        });
    }
    args[0].parse().map_err(|_| MetricError::BadParameter {
        message: format!("{name}: '{}' is not a dimension", args[0]),
    })
}

fn dispatch(name: &str, args: &[String], tol: &Tolerances) -> Result<MetricField, MetricError> {
    match name {
        "fubini_study" | "fs" => fubini_study(want_usize(args, name)?),
        "flat" => flat(want_usize(args, name)?),
        "poincare_disc" => poincare_disc(want_usize(args, name)?),
        "hopf" => hopf(want_usize(args, name)?),
        "product" => {
            if args.len() != 2 {
                return Err(MetricError::BadParameter {
                    message: format!("product takes two metric selectors, got {}", args.len()),
                });
            }
            product(by_selector(&args[0], tol)?, by_selector(&args[1], tol)?)
        }
        "conformal" => {
            if args.len() != 2 {
                return Err(MetricError::BadParameter {
                    message: "conformal takes a metric selector and a factor expression".into(),
                });
            }
            let base = by_selector(&args[0], tol)?;
            let factor = super::parse_expression(&args[1], base.dim)?;
            conformal(base, factor)
        }
        "fs_perturbed" => {
            if args.len() != 2 {
                return Err(MetricError::BadParameter {
                    message: "fs_perturbed takes a dimension and a perturbation size".into(),
                });
            }
            let n: usize = args[0].parse().map_err(|_| MetricError::BadParameter {
                message: format!("fs_perturbed: '{}' is not a dimension", args[0]),
            })?;
            let eps: f64 = args[1].parse().map_err(|_| MetricError::BadParameter {
                message: format!("fs_perturbed: '{}' is not a number", args[1]),
            })?;
            fs_perturbed(n, eps, tol)
        }
        other => Err(MetricError::UnknownCatalogEntry { name: other.to_string() }),
    }
}

/// Names and signatures for `catalog list`.
pub fn catalog_entries() -> Vec<(&'static str, &'static str)> {
    vec![
        ("fubini_study(n)", "projective-space tangent metric on the affine chart"),
        ("flat(n)", "identity metric on the trivial bundle over C^n"),
        ("poincare_disc(n)", "hyperbolic tangent metric on the unit ball"),
        ("hopf(n)", "delta_ij/|z|^2 on the annulus 1/2 < |z| < 2, non-Kahler"),
        ("product(m1, m2)", "block-diagonal metric on the product domain"),
        ("conformal(m, f)", "entrywise rescaling of m by a real factor f"),
        ("fs_perturbed(n, eps)", "Fubini-Study plus eps*|z|^2*identity, non-Kahler"),
    ]
}

/// Fixed reference points used by tests and docs.
pub fn origin(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}
