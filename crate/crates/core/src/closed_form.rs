//! Exact reference formulas and the quadrature form of the general solution.

use libm::lgamma;

use crate::engine::{alpha_ratio, AimEngine};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::problems::{AsymptoticFactor, Problem};

/// Roots of `r² + λ₀ r − s₀ = 0`, larger first.
///
/// For constant coefficients `sₙ/λₙ` tends to one of these and the solutions
/// of `y'' = λ₀ y' + s₀ y` are `e^{−r x}` for each root `r`.
pub fn constant_coeff_alpha(lambda0: f64, s0: f64) -> Result<(f64, f64)> {
    let disc = lambda0 * lambda0 + 4.0 * s0;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "λ₀² + 4s₀ = {disc} < 0 gives complex roots"
        )));
    }
    let sq = disc.sqrt();
    // Cancellation-free pairing.
    let q = -0.5 * (lambda0 + lambda0.signum() * sq);
    if q == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (r1, r2) = (q, -s0 / q);
    Ok(if r1 >= r2 { (r1, r2) } else { (r2, r1) })
}

/// Coefficients of `f_k` in ascending powers, normalized as `H_k / 2^{⌈k/2⌉}`
/// (`f₂ = 2x² − 1`, `f₃ = 2x³ − 3x`), which is not the physicists' scaling.
pub fn hermite_f_coeffs(k: u32) -> Vec<f64> {
    // H_{j+1} = 2x H_j − 2j H_{j−1}
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 2.0];
    for j in 1..k as usize {
        let mut next = vec![0.0; j + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= 2.0 * j as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    let scale = 0.5f64.powi(k.div_ceil(2) as i32);
    cur.iter().map(|c| c * scale).collect()
}

pub fn hermite_f(k: u32, x: f64) -> f64 {
    hermite_f_coeffs(k).iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Pochhammer symbol `(a)_n` by direct product.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).map(|i| a + i as f64).product()
}

const KUMMER_MAX_TERMS: usize = 500;
const KUMMER_TOL: f64 = 1e-14;

/// Confluent hypergeometric `₁F₁(a; b; z)` by its power series.
///
/// Terminates exactly when `a` is a non-positive integer.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::Usage(format!("₁F₁ is undefined for b = {b}")));
    }
    let terminating = a <= 0.0 && a.fract() == 0.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..KUMMER_MAX_TERMS {
        let jf = j as f64;
        term *= (a + jf) * z / ((b + jf) * (jf + 1.0));
        sum += term;
        if !sum.is_finite() {
            break;
        }
        if terminating && term == 0.0 {
            return Ok(sum);
        }
        if !terminating && term.abs() <= KUMMER_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    if terminating && sum.is_finite() {
        return Ok(sum);
    }
    Err(Error::NotConverged(format!(
        "₁F₁({a}; {b}; {z}) did not converge in {KUMMER_MAX_TERMS} terms"
    )))
}

/// Normalized Gol'dman–Krivchenkov eigenfunction `ψ_n(r)` for
/// `V = r² + γ(γ+1)/r²`.
pub fn gk_wavefunction(n: u32, gamma: f64, r: f64) -> Result<f64> {
    if !(gamma > -1.5) {
        return Err(Error::Domain(format!("γ = {gamma} must exceed −3/2")));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("r = {r} must be non-negative")));
    }
    let a = gamma + 1.5;
    let nf = n as f64;
    // 2 (a)_n / (n! Γ(a)) = 2 Γ(a+n) / (Γ(n+1) Γ(a)²)
    let ln_norm = 0.5
        * (std::f64::consts::LN_2 + lgamma(a + nf) - lgamma(nf + 1.0) - 2.0 * lgamma(a));
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let radial = if r == 0.0 {
        if gamma + 1.0 > 0.0 {
            0.0
        } else if gamma + 1.0 == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        r.powf(gamma + 1.0)
    };
    Ok(sign * ln_norm.exp() * radial * (-0.5 * r * r).exp() * kummer_1f1(-nf, a, r * r)?)
}

/// Energy of level `n` when the problem is exactly solvable.
pub fn exact_energy(p: &Problem, n: u32) -> Option<f64> {
    let nf = n as f64;
    match p {
        Problem::Harmonic1d => Some(2.0 * nf + 1.0),
        Problem::GoldmanKrivchenkov { gamma } => Some(4.0 * nf + 2.0 * gamma + 3.0),
        Problem::Spiked { gamma, a, .. } if *a == 0.0 => Some(4.0 * nf + 2.0 * gamma + 3.0),
        Problem::Quartic { a } if *a == 0.0 => Some(2.0 * nf + 1.0),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub xs: Vec<f64>,
    pub y_vals: Vec<f64>,
    pub psi_vals: Vec<f64>,
    pub constants: (f64, f64),
}

/// `∫ over [a, b]` of the quadratic through `(t[j], f[j])`.
fn quadratic_integral(t: [f64; 3], f: [f64; 3], a: f64, b: f64) -> f64 {
    // ∫₀ᴴ (u − P)(u − Q) du in coordinates local to a
    let span = b - a;
    let basis = |p: f64, q: f64| {
        let (p, q) = (p - a, q - a);
        span * (span * span / 3.0 - 0.5 * (p + q) * span + p * q)
    };
    let mut total = 0.0;
    for j in 0..3 {
        let (p, q) = (t[(j + 1) % 3], t[(j + 2) % 3]);
        total += basis(p, q) / ((t[j] - p) * (t[j] - q)) * f[j];
    }
    total
}

/// Running integral `F(x_i) = ∫_{x_0}^{x_i} f`, piecewise quadratic.
///
/// Each interval averages the fits through its left and right node triples,
/// which on a uniform grid is the four-point cubic rule.
pub fn cumulative_integral(xs: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), f.len());
    let m = xs.len();
    assert!(m >= 3, "need at least three nodes");
    let mut out = vec![0.0; m];
    let triple = |s: usize| ([xs[s], xs[s + 1], xs[s + 2]], [f[s], f[s + 1], f[s + 2]]);
    for i in 0..m - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        let left = (i >= 1).then(|| {
            let (t, v) = triple(i - 1);
            quadratic_integral(t, v, a, b)
        });
        let right = (i + 2 < m).then(|| {
            let (t, v) = triple(i);
            quadratic_integral(t, v, a, b)
        });
        let piece = match (left, right) {
            (Some(l), Some(r)) => 0.5 * (l + r),
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => unreachable!(),
        };
        out[i + 1] = out[i] + piece;
    }
    out
}

/// `y = exp(−∫α) [C₂ + C₁ ∫ exp(∫(λ₀ + 2α))]`, all integrals from `xs[0]`.
///
/// `envelope` multiplies `y` to give the wavefunction column; `None` copies `y`.
pub fn reconstruct_solution(
    lambda0: impl Fn(f64) -> f64,
    alpha: &[f64],
    xs: &[f64],
    c1: f64,
    c2: f64,
    envelope: Option<AsymptoticFactor>,
) -> Result<ReconstructionResult> {
    if xs.len() < 3 || alpha.len() != xs.len() {
        return Err(Error::Usage(format!(
            "need at least 3 grid points and one α sample per point (got {} and {})",
            xs.len(),
            alpha.len()
        )));
    }
    if let Some(w) = xs.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Usage(format!(
            "grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    for (i, (&x, &a)) in xs.iter().zip(alpha).enumerate() {
        if !a.is_finite() {
            return Err(Error::NonFinite { index: i, x });
        }
    }
    let int_alpha = cumulative_integral(xs, alpha);
    let inner: Vec<f64> = xs
        .iter()
        .zip(alpha)
        .map(|(&x, &a)| lambda0(x) + 2.0 * a)
        .collect();
    let int_inner = cumulative_integral(xs, &inner);
    let integrand: Vec<f64> = int_inner.iter().map(|v| v.exp()).collect();
    let outer = cumulative_integral(xs, &integrand);
    let y_vals: Vec<f64> = int_alpha
        .iter()
        .zip(&outer)
        .map(|(ia, o)| (-ia).exp() * (c2 + c1 * o))
        .collect();
    let psi_vals = match envelope {
        Some(env) => xs.iter().zip(&y_vals).map(|(&x, y)| env.eval(x) * y).collect(),
        None => y_vals.clone(),
    };
    for (i, (&x, (y, psi))) in xs.iter().zip(y_vals.iter().zip(&psi_vals)).enumerate() {
        if !y.is_finite() || !psi.is_finite() {
            return Err(Error::NonFinite { index: i, x });
        }
    }
    Ok(ReconstructionResult {
        xs: xs.to_vec(),
        y_vals,
        psi_vals,
        constants: (c1, c2),
    })
}

/// `sₙ/λₙ` after `n` iterations at every grid point, with jets built about
/// each point by `build`. Fails if `λₙ` changes sign between grid points,
/// since `α` has a pole there.
pub fn alpha_samples(
    build: impl Fn(f64) -> Result<(Jet, Jet)>,
    n: usize,
    xs: &[f64],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(xs.len());
    let mut last_lambda: Option<(f64, f64)> = None;
    for &x in xs {
        let (lambda0, s0) = build(x)?;
        let engine = AimEngine::new(lambda0, s0)?;
        let mut state = engine.initial();
        for _ in 0..n {
            state = engine.step(&state)?;
        }
        let lam = state.lambda.value();
        if let Some((x_prev, l_prev)) = last_lambda {
            if l_prev.signum() != lam.signum() {
                return Err(Error::DivisionDegeneracy {
                    x: 0.5 * (x_prev + x),
                    value: lam,
                });
            }
        }
        last_lambda = Some((x, lam));
        out.push(alpha_ratio(&state, x)?);
    }
    Ok(out)
}
