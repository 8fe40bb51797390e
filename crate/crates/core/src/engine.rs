//! The asymptotic iteration itself.
//!
//! Starting from `y'' = λ₀ y' + s₀ y`, repeated differentiation gives
//! `y^(n+2) = λₙ y' + sₙ y` with
//!
//! ```text
//! λₙ = λₙ₋₁' + sₙ₋₁ + λ₀ λₙ₋₁
//! sₙ = sₙ₋₁' + s₀ λₙ₋₁
//! ```
//!
//! The iteration terminates when `sₙ/λₙ = sₙ₋₁/λₙ₋₁`, i.e. when
//! `δₙ = sₙ λₙ₋₁ − sₙ₋₁ λₙ` vanishes. Coefficients grow factorially, so the
//! pair `(λₙ, sₙ)` is rescaled jointly by a positive factor whenever it gets
//! large; neither the sign of δ nor the ratio α is affected.
//!
//! Each step consumes one order of the truncated expansion: after `n` steps
//! only coefficients up to `M − n` are exact. The rest are zeroed, so the
//! rescale and termination tests look at exact coefficients only. Past
//! `n = M` the value alone is carried, which is exact only when λ₀ and s₀
//! are constant.

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Joint rescale is applied once the largest coefficient exceeds this.
pub const RESCALE_THRESHOLD: f64 = 1e100;

/// An iteration counts as terminated when `|δₙ(x)|` is below this multiple
/// of the largest coefficient of λₙ.
pub const TERMINATION_TOL: f64 = 1e-12;

/// Consecutive terminated iterations required to flag success in [`run`].
pub const TERMINATION_STREAK: usize = 3;

/// Below this |λₙ(x)| the ratio sₙ/λₙ is refused.
pub const LAMBDA_FLOOR: f64 = 1e-300;

/// `(λₙ, sₙ)` at iteration `n`, possibly rescaled.
#[derive(Debug, Clone, PartialEq)]
pub struct AimState {
    pub lambda: Jet,
    pub s: Jet,
    pub n: usize,
    /// Sum of `ln(factor)` over every joint rescale applied so far.
    pub scale_log: f64,
}

impl AimState {
    /// Multiplies both jets by `c > 0`.
    pub fn rescaled(&self, c: f64) -> AimState {
        assert!(c > 0.0 && c.is_finite(), "rescale factor must be positive");
        AimState {
            lambda: self.lambda.scale(c),
            s: self.s.scale(c),
            n: self.n,
            scale_log: self.scale_log + c.ln(),
        }
    }

    fn max_abs(&self) -> f64 {
        self.lambda.max_abs().max(self.s.max_abs())
    }
}

/// Diagnostics for one iteration depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    /// δₙ at the evaluation point, in rescaled units.
    pub delta_at_x0: f64,
    /// sₙ/λₙ at the evaluation point; NaN when λₙ vanishes there.
    pub alpha_at_x0: f64,
    /// δₙ divided by the magnitude of the products it cancels.
    pub relative_delta: f64,
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub records: Vec<IterationRecord>,
    /// First `n` of a streak of [`TERMINATION_STREAK`] terminated iterations.
    pub terminated_at: Option<usize>,
    pub final_state: AimState,
}

/// Holds `λ₀, s₀` and advances states.
#[derive(Debug, Clone)]
pub struct AimEngine {
    lambda0: Jet,
    s0: Jet,
}

impl AimEngine {
    pub fn new(lambda0: Jet, s0: Jet) -> Result<Self> {
        if lambda0.x0() != s0.x0() || lambda0.order() != s0.order() {
            return Err(Error::Usage(format!(
                "λ₀ (x0 = {}, order {}) and s₀ (x0 = {}, order {}) must share expansion point and order",
                lambda0.x0(),
                lambda0.order(),
                s0.x0(),
                s0.order()
            )));
        }
        if !lambda0.is_finite() || !s0.is_finite() {
            return Err(Error::Usage("λ₀ and s₀ must be finite".into()));
        }
        Ok(Self { lambda0, s0 })
    }

    pub fn lambda0(&self) -> &Jet {
        &self.lambda0
    }

    pub fn s0(&self) -> &Jet {
        &self.s0
    }

    pub fn initial(&self) -> AimState {
        AimState {
            lambda: self.lambda0.clone(),
            s: self.s0.clone(),
            n: 0,
            scale_log: 0.0,
        }
    }

    /// One application of the recurrence, followed by a joint rescale when
    /// the pair has grown past [`RESCALE_THRESHOLD`].
    pub fn step(&self, state: &AimState) -> Result<AimState> {
        let n = state.n + 1;
        let exact = self.lambda0.order().saturating_sub(n);
        let lambda = (&(&state.lambda.derive() + &state.s) + &(&self.lambda0 * &state.lambda))
            .zeroed_above(exact);
        let s = (&state.s.derive() + &(&self.s0 * &state.lambda)).zeroed_above(exact);
        if !lambda.is_finite() || !s.is_finite() {
            return Err(Error::Overflow { n });
        }
        let next = AimState {
            lambda,
            s,
            n,
            scale_log: state.scale_log,
        };
        let big = next.max_abs();
        if big > RESCALE_THRESHOLD {
            return Ok(next.rescaled(1.0 / big));
        }
        Ok(next)
    }

    /// States `0..=n_max`.
    pub fn iterate(&self, n_max: usize) -> Result<Vec<AimState>> {
        let mut states = Vec::with_capacity(n_max + 1);
        states.push(self.initial());
        for _ in 0..n_max {
            let next = self.step(states.last().expect("non-empty"))?;
            states.push(next);
        }
        Ok(states)
    }
}

/// `sₙ λₙ₋₁ − sₙ₋₁ λₙ` as a jet.
pub fn delta_jet(prev: &AimState, cur: &AimState) -> Jet {
    assert_eq!(cur.n, prev.n + 1, "δ needs consecutive iterations");
    &(&cur.s * &prev.lambda) - &(&prev.s * &cur.lambda)
}

/// δₙ evaluated at `x`. Only its sign and zeros are meaningful: the value
/// carries whatever rescaling the states have accumulated.
pub fn delta(prev: &AimState, cur: &AimState, x: f64) -> f64 {
    delta_jet(prev, cur).eval(x)
}

/// |δₙ(x)| relative to `|sₙ λₙ₋₁| + |sₙ₋₁ λₙ|`. Zero when both products vanish.
pub fn relative_delta(prev: &AimState, cur: &AimState, x: f64) -> f64 {
    let a = cur.s.eval(x) * prev.lambda.eval(x);
    let b = prev.s.eval(x) * cur.lambda.eval(x);
    let mag = a.abs() + b.abs();
    if mag == 0.0 {
        0.0
    } else {
        (a - b).abs() / mag
    }
}

/// The ratio `sₙ(x)/λₙ(x)`.
pub fn alpha_ratio(state: &AimState, x: f64) -> Result<f64> {
    let l = state.lambda.eval(x);
    if l.abs() < LAMBDA_FLOOR {
        return Err(Error::DivisionDegeneracy { x, value: l.abs() });
    }
    Ok(state.s.eval(x) / l)
}

/// Iterates up to `max_iter`, recording δₙ and αₙ at `x_eval` for every
/// `n ≥ 1`. Stops early once δ has been negligible for
/// [`TERMINATION_STREAK`] consecutive iterations.
pub fn run(lambda0: Jet, s0: Jet, max_iter: usize, x_eval: f64) -> Result<RunReport> {
    if max_iter < 1 {
        return Err(Error::Usage("max_iter must be at least 1".into()));
    }
    let engine = AimEngine::new(lambda0, s0)?;
    let mut prev = engine.initial();
    let mut records = Vec::with_capacity(max_iter);
    let mut streak = 0;
    let mut terminated_at = None;
    for _ in 0..max_iter {
        let cur = engine.step(&prev)?;
        let rel = relative_delta(&prev, &cur, x_eval);
        let d = delta(&prev, &cur, x_eval);
        let done = d.abs() < TERMINATION_TOL * cur.lambda.max_abs();
        records.push(IterationRecord {
            n: cur.n,
            delta_at_x0: d,
            alpha_at_x0: alpha_ratio(&cur, x_eval).unwrap_or(f64::NAN),
            relative_delta: rel,
        });
        prev = cur;
        if done {
            streak += 1;
            if streak == TERMINATION_STREAK {
                terminated_at = Some(prev.n + 1 - TERMINATION_STREAK);
                break;
            }
        } else {
            streak = 0;
        }
    }
    Ok(RunReport {
        records,
        terminated_at,
        final_state: prev,
    })
}
