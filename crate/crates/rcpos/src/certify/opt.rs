//! Projected-gradient descent on the complex unit sphere, shared by every
//! certifier. Objectives are real-valued with a Wirtinger gradient taken
//! with respect to the conjugate coordinates, so the steepest-descent step
//! is `u - eta * grad` followed by renormalization.

use num_complex::Complex64;

use crate::linalg::{inner, sample_unit_sphere, vec_norm};

use super::CertifyError;

const MAX_STEPS: usize = 400;
const BACKTRACKS: usize = 40;
const ARMIJO: f64 = 1e-4;
const STALL: f64 = 1e-13;
const MEMORY: usize = 8;

pub(crate) struct SphereMin {
    pub argmin: Vec<Complex64>,
    pub restarts: usize,
    pub iterations: usize,
}

/// Coordinate axes plus all two-coordinate diagonals with fourth-root
/// phases. These catch extremizers aligned with the chart structure that
/// random seeds only find approximately. Capped to keep restart counts
/// bounded in high rank.
pub(crate) fn structured_seeds(dim: usize, cap: usize) -> Vec<Vec<Complex64>> {
    let mut seeds = Vec::new();
    let one = Complex64::new(1.0, 0.0);
    for i in 0..dim {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[i] = one;
        seeds.push(v);
    }
    let invrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    'outer: for i in 0..dim {
        for j in (i + 1)..dim {
            for ph in phases {
                if seeds.len() >= cap {
                    break 'outer;
                }
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[i] = invrt2;
                v[j] = ph * invrt2;
                seeds.push(v);
            }
        }
    }
    seeds
}

pub(crate) fn seed_bank(dim: usize, random: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut seeds = structured_seeds(dim, 32);
    seeds.extend(sample_unit_sphere(dim, random, seed));
    seeds
}

fn renormalize(v: &[Complex64]) -> Vec<Complex64> {
    let n = vec_norm(v);
    v.iter().map(|z| z / n).collect()
}

fn re_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Minimize `eval` over the unit sphere from every seed, keeping the best
/// terminal value. `eval` returns the objective and its Wirtinger gradient
/// with respect to the conjugated vector; both are recomputed after each
/// accepted step.
///
/// Steps are spectral (Barzilai-Borwein) with backtracking against the
/// worst of the last few accepted values. Plain monotone descent with a
/// fixed initial step crawls on ill-conditioned valleys, of which the
/// sectional-curvature landscape has real instances; the nonmonotone rule
/// keeps the spectral step, which adapts to the local curvature, effective
/// there.
pub(crate) fn minimize_on_sphere<F>(seeds: &[Vec<Complex64>], mut eval: F) -> Result<SphereMin, CertifyError>
where
    F: FnMut(&[Complex64]) -> Result<(f64, Vec<Complex64>), CertifyError>,
{
    assert!(!seeds.is_empty(), "sphere minimization needs at least one seed");
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut iterations = 0usize;
    for seed in seeds {
        let mut u = renormalize(seed);
        let (mut value, mut grad) = eval(&u)?;
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, u.clone()));
        }
        let mut recent = vec![value];
        let mut prev: Option<(Vec<Complex64>, Vec<Complex64>)> = None;
        for _ in 0..MAX_STEPS {
            // Tangent projection; removing the radial component also kills
            // the phase direction, along which the objective is constant.
            let radial = inner(&u, &grad);
            let tangent: Vec<Complex64> =
                grad.iter().zip(u.iter()).map(|(g, ui)| g - ui * radial).collect();
            let gnorm = vec_norm(&tangent);
            if gnorm <= STALL * (1.0 + value.abs()) {
                break;
            }
            // Spectral step from the previous accepted move, ignoring the
            // curvature of the sphere itself; the backtracking guard below
            // absorbs the transport error.
            let mut step = match &prev {
                Some((pu, pt)) => {
                    let s: Vec<Complex64> =
                        u.iter().zip(pu.iter()).map(|(a, b)| a - b).collect();
                    let y: Vec<Complex64> =
                        tangent.iter().zip(pt.iter()).map(|(a, b)| a - b).collect();
                    let sy = re_dot(&s, &y);
                    if sy > 0.0 {
                        (re_dot(&s, &s) / sy).clamp(1e-10, 1e10)
                    } else {
                        1.0 / (1.0 + gnorm)
                    }
                }
                None => 1.0 / (1.0 + gnorm),
            };
            let reference = recent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut accepted = false;
            for _ in 0..BACKTRACKS {
                let cand: Vec<Complex64> =
                    u.iter().zip(tangent.iter()).map(|(ui, g)| ui - g * step).collect();
                let cand = renormalize(&cand);
                let (cv, cg) = eval(&cand)?;
                iterations += 1;
                if cv <= reference - ARMIJO * step * gnorm * gnorm {
                    prev = Some((u, tangent));
                    u = cand;
                    value = cv;
                    grad = cg;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            recent.push(value);
            if recent.len() > MEMORY {
                recent.remove(0);
            }
            // Nonmonotone acceptance can end a restart above its best
            // visited point, so the running best tracks every iterate.
            if best.as_ref().map_or(true, |(b, _)| value < *b) {
                best = Some((value, u.clone()));
            }
        }
    }
    let (_, argmin) = best.expect("at least one seed was evaluated");
    Ok(SphereMin { argmin, restarts: seeds.len(), iterations })
}

/// Two-parameter grid minimization with iterated refinement around the
/// best cell, for unit vectors parametrized as `(cos α, sin α e^{iφ})`
/// with α ∈ [0, π/2] and φ periodic. The coarse pass brackets the
/// minimum; each refinement round rescans a ±step window at ten times
/// the resolution. Three rounds are needed because the objectives fed
/// in here are not always smooth: an eigenvalue envelope has |x|-like
/// kinks at crossings, where a single pass only gains one digit.
pub(crate) fn polar_grid_min<F>(resolution: usize, mut f: F) -> Result<(f64, usize), CertifyError>
where
    F: FnMut(f64, f64) -> Result<f64, CertifyError>,
{
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut da = half_pi / resolution as f64;
    let mut dp = std::f64::consts::TAU / resolution as f64;
    let mut best = f64::INFINITY;
    let mut at = (0.0f64, 0.0f64);
    let mut evals = 0usize;
    for ai in 0..=resolution {
        let alpha = da * ai as f64;
        for pi in 0..resolution {
            let phi = dp * pi as f64;
            let v = f(alpha, phi)?;
            evals += 1;
            if v < best {
                best = v;
                at = (alpha, phi);
            }
        }
    }
    let sub = 20usize;
    for _ in 0..3 {
        let center = at;
        for ai in 0..=sub {
            let alpha =
                (center.0 - da + 2.0 * da * ai as f64 / sub as f64).clamp(0.0, half_pi);
            for pi in 0..=sub {
                let phi = center.1 - dp + 2.0 * dp * pi as f64 / sub as f64;
                let v = f(alpha, phi)?;
                evals += 1;
                if v < best {
                    best = v;
                    at = (alpha, phi);
                }
            }
        }
        da /= 10.0;
        dp /= 10.0;
    }
    Ok((best, evals))
}
