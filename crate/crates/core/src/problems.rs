//! Catalog of Schrödinger-type problems `(−d²/dx² + V) ψ = E ψ`.
//!
//! Each problem factors `ψ = x^p e^{−x²/2} · y` so that `y` satisfies
//! `y'' = λ₀ y' + s₀ y`, and supplies jets of `λ₀, s₀` for a trial energy.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::potential::PotentialExpression;

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    /// `f'' = 2x f' − 2k f`. Not an eigenproblem in E.
    Hermite { k: u32 },
    /// `V = x²` on the real line.
    Harmonic1d,
    /// `V = r² + γ(γ+1)/r²` on the half-line.
    GoldmanKrivchenkov { gamma: f64 },
    /// `V = x² + γ(γ+1)/x² + A/x^α` on the half-line.
    Spiked { gamma: f64, a: f64, alpha: f64 },
    /// `V = x² + A x⁴` on the real line.
    Quartic { a: f64 },
    /// A user potential, factored with the Gaussian only.
    Custom { potential: PotentialExpression },
}

/// Where the eigenfunctions live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    RealLine,
    /// `[0, ∞)` with `ψ(0) = 0`.
    HalfLine,
}

/// `f_asym(x) = x^power · e^{−x²/2}` when `gaussian`, else `x^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFactor {
    pub power: f64,
    pub gaussian: bool,
}

impl AsymptoticFactor {
    pub fn eval(&self, x: f64) -> f64 {
        let p = if self.power == 0.0 { 1.0 } else { x.powf(self.power) };
        if self.gaussian {
            p * (-0.5 * x * x).exp()
        } else {
            p
        }
    }
}

/// `γ = l + (N − 3)/2`.
pub fn gamma_from_dimension(n_dim: u32, l: u32) -> Result<f64> {
    if n_dim < 2 {
        return Err(Error::Usage(format!("dimension N = {n_dim} must be at least 2")));
    }
    Ok(l as f64 + (n_dim as f64 - 3.0) / 2.0)
}

impl Problem {
    pub fn goldman_krivchenkov(gamma: f64) -> Result<Self> {
        if !(gamma >= -1.0) || !gamma.is_finite() {
            return Err(Error::Usage(format!("γ = {gamma} must be ≥ −1")));
        }
        Ok(Problem::GoldmanKrivchenkov { gamma })
    }

    pub fn spiked(gamma: f64, a: f64, alpha: f64) -> Result<Self> {
        if !(gamma >= -1.0) || !gamma.is_finite() {
            return Err(Error::Usage(format!("γ = {gamma} must be ≥ −1")));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Usage(format!("A = {a} must be ≥ 0")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Usage(format!("α = {alpha} must be > 0")));
        }
        Ok(Problem::Spiked { gamma, a, alpha })
    }

    /// The spiked oscillator in `N` dimensions with angular momentum `l`.
    pub fn spiked_in_dimension(n_dim: u32, l: u32, a: f64, alpha: f64) -> Result<Self> {
        Self::spiked(gamma_from_dimension(n_dim, l)?, a, alpha)
    }

    pub fn quartic(a: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Usage(format!("A = {a} must be ≥ 0")));
        }
        Ok(Problem::Quartic { a })
    }

    /// A user potential. Singular potentials of the spiked shape
    /// `x² + γ(γ+1)/x² + A/x^α` become [`Problem::Spiked`]; any other term
    /// more singular than `x^-2` is rejected.
    pub fn custom(potential: PotentialExpression) -> Result<Self> {
        if potential.is_singular() {
            if let Some((gamma, a, alpha)) = potential.as_spiked() {
                return Self::spiked(gamma, a, alpha);
            }
        }
        if let Some(beta) = potential.min_exponent() {
            if beta < -2.0 {
                return Err(Error::Domain(format!(
                    "term x^{beta} is more singular than x^-2; not covered by the Gaussian factorization"
                )));
            }
        }
        Ok(Problem::Custom { potential })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Problem::Hermite { .. } => "hermite",
            Problem::Harmonic1d => "harmonic1d",
            Problem::GoldmanKrivchenkov { .. } => "gk",
            Problem::Spiked { .. } => "spiked",
            Problem::Quartic { .. } => "quartic",
            Problem::Custom { .. } => "custom",
        }
    }

    /// Compact JSON object of the parameters, keys in a fixed order.
    pub fn params_json(&self) -> String {
        match self {
            Problem::Hermite { k } => format!("{{\"k\":{k}}}"),
            Problem::Harmonic1d => "{}".into(),
            Problem::GoldmanKrivchenkov { gamma } => format!("{{\"gamma\":{gamma}}}"),
            Problem::Spiked { gamma, a, alpha } => {
                format!("{{\"gamma\":{gamma},\"A\":{a},\"alpha\":{alpha}}}")
            }
            Problem::Quartic { a } => format!("{{\"A\":{a}}}"),
            Problem::Custom { potential } => format!("{{\"potential\":\"{potential}\"}}"),
        }
    }

    pub fn is_eigenproblem(&self) -> bool {
        !matches!(self, Problem::Hermite { .. })
    }

    pub fn domain(&self) -> Domain {
        match self {
            Problem::Hermite { .. } | Problem::Harmonic1d | Problem::Quartic { .. } => {
                Domain::RealLine
            }
            Problem::GoldmanKrivchenkov { .. } | Problem::Spiked { .. } => Domain::HalfLine,
            Problem::Custom { potential } => {
                if potential.is_singular() {
                    Domain::HalfLine
                } else {
                    Domain::RealLine
                }
            }
        }
    }

    /// True when λ₀ or s₀ has a term singular at the origin.
    pub fn needs_positive_x0(&self) -> bool {
        match self {
            Problem::Spiked { .. } => true,
            Problem::GoldmanKrivchenkov { gamma } => *gamma != -1.0,
            Problem::Custom { potential } => potential
                .terms()
                .iter()
                .any(|t| t.exponent < 0.0 || t.exponent.fract() != 0.0),
            _ => false,
        }
    }

    /// `V(x)`; `None` for the Hermite equation.
    pub fn potential(&self, x: f64) -> Option<f64> {
        let x2 = x * x;
        Some(match self {
            Problem::Hermite { .. } => return None,
            Problem::Harmonic1d => x2,
            Problem::GoldmanKrivchenkov { gamma } => x2 + gamma * (gamma + 1.0) / x2,
            Problem::Spiked { gamma, a, alpha } => {
                let mut v = x2;
                if *gamma != 0.0 {
                    v += gamma * (gamma + 1.0) / x2;
                }
                if *a != 0.0 {
                    v += a * x.powf(-alpha);
                }
                v
            }
            Problem::Quartic { a } => x2 + a * x2 * x2,
            Problem::Custom { potential } => potential.eval(x),
        })
    }

    pub fn asymptotic_factor(&self) -> AsymptoticFactor {
        match self {
            Problem::Hermite { .. } => AsymptoticFactor {
                power: 0.0,
                gaussian: false,
            },
            Problem::GoldmanKrivchenkov { gamma } => AsymptoticFactor {
                power: gamma + 1.0,
                gaussian: true,
            },
            _ => AsymptoticFactor {
                power: 0.0,
                gaussian: true,
            },
        }
    }

    /// Jets of `(λ₀, s₀)` about `x0` for the trial energy `energy`
    /// (ignored by the Hermite equation).
    pub fn build_coefficients(&self, energy: f64, x0: f64, order: usize) -> Result<(Jet, Jet)> {
        if !x0.is_finite() || !energy.is_finite() {
            return Err(Error::Usage("x0 and E must be finite".into()));
        }
        if self.needs_positive_x0() && !(x0 > 0.0) {
            return Err(Error::Domain(format!(
                "{} has a singular term at the origin; x0 = {x0} must be > 0",
                self.name()
            )));
        }
        let two_x = Jet::power(1.0, 2.0, x0, order)?;
        let sum = |constant: f64, terms: &[(f64, f64)]| -> Result<Jet> {
            let mut jet = Jet::constant(constant, x0, order);
            for &(c, beta) in terms {
                if c != 0.0 {
                    jet = &jet + &Jet::power(beta, c, x0, order)?;
                }
            }
            Ok(jet)
        };
        Ok(match self {
            Problem::Hermite { k } => (two_x, Jet::constant(-2.0 * *k as f64, x0, order)),
            Problem::Harmonic1d => (two_x, Jet::constant(1.0 - energy, x0, order)),
            Problem::GoldmanKrivchenkov { gamma } => (
                sum(0.0, &[(2.0, 1.0), (-2.0 * (gamma + 1.0), -1.0)])?,
                Jet::constant(2.0 * gamma + 3.0 - energy, x0, order),
            ),
            Problem::Spiked { gamma, a, alpha } => (
                two_x,
                sum(
                    1.0 - energy,
                    &[(*a, -alpha), (gamma * (gamma + 1.0), -2.0)],
                )?,
            ),
            Problem::Quartic { a } => (two_x, sum(1.0 - energy, &[(*a, 4.0)])?),
            Problem::Custom { potential } => {
                let mut terms: Vec<(f64, f64)> = potential
                    .terms()
                    .iter()
                    .map(|t| (t.coefficient, t.exponent))
                    .collect();
                terms.push((-1.0, 2.0));
                let merged = PotentialExpression::from_terms(terms)?;
                let pairs: Vec<(f64, f64)> = merged
                    .terms()
                    .iter()
                    .map(|t| (t.coefficient, t.exponent))
                    .collect();
                (two_x, sum(1.0 - energy, &pairs)?)
            }
        })
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name(), self.params_json())
    }
}
