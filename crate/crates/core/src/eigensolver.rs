//! Energies from the zeros of `δₙ(E; x0)`.
//!
//! A grid scan brackets sign changes of δ at the configured depth, each
//! bracket is bisected, and the root is re-found at the preceding depths to
//! judge whether it has stabilized.

use rayon::prelude::*;

use crate::engine::{delta, relative_delta, AimEngine};
use crate::error::{Error, Result};
use crate::problems::{Domain, Problem};

/// How the expansion point x0 is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum X0Policy {
    Fixed(f64),
    /// Minimum of the potential.
    PotentialMin,
    /// A zero of `s₀(x; E)` for the current energy guess.
    S0Zero,
    Zero,
}

impl X0Policy {
    /// Per-problem default: the origin for even potentials on the real line,
    /// the potential minimum for singular ones.
    pub fn default_for(p: &Problem) -> X0Policy {
        match p {
            Problem::GoldmanKrivchenkov { gamma } if gamma * (gamma + 1.0) <= 0.0 => {
                X0Policy::Fixed(1.0)
            }
            _ if p.needs_positive_x0() || p.domain() == Domain::HalfLine => X0Policy::PotentialMin,
            _ => X0Policy::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub x0_policy: X0Policy,
    pub max_iter: usize,
    /// Jet truncation order; `None` means `2 * max_iter + 8`.
    pub jet_order: Option<usize>,
    pub e_min: f64,
    pub e_max: f64,
    pub e_step: f64,
    /// Number of consecutive depths whose roots must agree.
    pub stab_window: usize,
    /// Absolute tolerance on E.
    pub root_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            x0_policy: X0Policy::Zero,
            max_iter: 12,
            jet_order: None,
            e_min: 0.0,
            e_max: 20.0,
            e_step: 0.25,
            stab_window: 3,
            root_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    /// Defaults with the problem's preferred x0 policy.
    pub fn for_problem(p: &Problem) -> Self {
        Self {
            x0_policy: X0Policy::default_for(p),
            ..Self::default()
        }
    }

    pub fn order(&self) -> usize {
        self.jet_order.unwrap_or(2 * self.max_iter + 8)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Usage(m));
        if !(self.e_min < self.e_max) {
            return bad(format!("e_min = {} must be below e_max = {}", self.e_min, self.e_max));
        }
        if !(self.e_step > 0.0) {
            return bad(format!("e_step = {} must be positive", self.e_step));
        }
        if self.max_iter < 2 {
            return bad(format!("max_iter = {} must be at least 2", self.max_iter));
        }
        if self.stab_window < 1 || self.stab_window > self.max_iter {
            return bad(format!(
                "stab_window = {} must lie in 1..={}",
                self.stab_window, self.max_iter
            ));
        }
        if self.order() < self.max_iter {
            return bad(format!(
                "jet order {} cannot support {} iterations",
                self.order(),
                self.max_iter
            ));
        }
        if !(self.root_tol > 0.0) {
            return bad(format!("root_tol = {} must be positive", self.root_tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueResult {
    pub energy: f64,
    pub n_used: usize,
    /// `|δ(E)|` over the larger of `|δ(E ± e_step/2)|`.
    pub delta_residual: f64,
    pub x0_used: f64,
    pub stabilized: bool,
    /// Root found at each depth, deepest first; `None` where the bracket
    /// had no sign change.
    pub history: Vec<(usize, Option<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Outcome of [`scan`]: brackets plus grid energies that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub brackets: Vec<Bracket>,
    pub skipped: Vec<(f64, Error)>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const X_HI: f64 = 10.0;

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Lowest interior local minimum of `f` on `(0, X_HI]`.
fn interior_min(f: impl Fn(f64) -> f64) -> Option<f64> {
    const SAMPLES: usize = 2000;
    let xs: Vec<f64> = (1..=SAMPLES).map(|i| X_HI * i as f64 / SAMPLES as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let best = (1..SAMPLES - 1)
        .filter(|&i| vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1] && vs[i].is_finite())
        .min_by(|&i, &j| vs[i].total_cmp(&vs[j]))?;
    Some(golden_min(&f, xs[best - 1], xs[best + 1], 1e-10))
}

/// x0 at the minimum of the potential.
///
/// For the spiked family without a centrifugal term this is
/// `(αA/2)^{1/(α+2)}`; otherwise the full potential is minimized numerically.
pub fn x0_potential_min(p: &Problem) -> Result<f64> {
    match p {
        Problem::Hermite { .. } => Err(Error::Usage("the Hermite equation has no potential".into())),
        Problem::Harmonic1d | Problem::Quartic { .. } => Ok(0.0),
        Problem::Spiked { gamma, a, alpha } if gamma * (gamma + 1.0) == 0.0 => {
            if *a == 0.0 {
                return Err(Error::Domain(
                    "A = 0 leaves no interior potential minimum; choose another x0 policy".into(),
                ));
            }
            Ok((alpha * a / 2.0).powf(1.0 / (alpha + 2.0)))
        }
        _ => interior_min(|x| p.potential(x).unwrap_or(f64::NAN)).ok_or_else(|| {
            Error::Domain(format!(
                "no interior minimum of V on (0, {X_HI}]; choose another x0 policy"
            ))
        }),
    }
}

/// A zero of `s₀(x; e_guess)`.
///
/// Uses the closed form `x0 = √(p + √(p² + A/(E−1)))`, `p = γ(γ+1)/(2(E−1))`
/// for the spiked α = 4 case and bisection on `(0, 10]` otherwise.
pub fn x0_s0_zero(p: &Problem, e_guess: f64) -> Result<f64> {
    if let Problem::Spiked { gamma, a, alpha } = p {
        if *alpha == 4.0 {
            if !(e_guess > 1.0) {
                return Err(Error::Domain(format!(
                    "s₀ = 0 has no solution for E = {e_guess} ≤ 1; use the potential_min policy"
                )));
            }
            let q = gamma * (gamma + 1.0) / (2.0 * (e_guess - 1.0));
            let inner = q * q + a / (e_guess - 1.0);
            let x0 = (q + inner.sqrt()).sqrt();
            if x0 > 0.0 && x0.is_finite() {
                return Ok(x0);
            }
        }
    }
    let s0 = |x: f64| -> f64 {
        match p.build_coefficients(e_guess, x, 0) {
            Ok((_, s)) => s.value(),
            Err(_) => f64::NAN,
        }
    };
    const SAMPLES: usize = 4000;
    let xs: Vec<f64> = (1..=SAMPLES).map(|i| X_HI * i as f64 / SAMPLES as f64).collect();
    for w in xs.windows(2) {
        let (fa, fb) = (s0(w[0]), s0(w[1]));
        if fa == 0.0 {
            return Ok(w[0]);
        }
        if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
            let (mut lo, mut hi, flo) = (w[0], w[1], fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = s0(mid);
                if fm == 0.0 || hi - lo < 1e-15 * hi {
                    return Ok(mid);
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NoSignChange(format!(
        "s₀(x; E = {e_guess}) has no sign change on (0, {X_HI}]; use the potential_min policy"
    )))
}

/// Resolves the policy to a number. `e_guess` is only used by
/// [`X0Policy::S0Zero`].
pub fn resolve_x0(p: &Problem, policy: X0Policy, e_guess: f64) -> Result<f64> {
    match policy {
        X0Policy::Fixed(x) => Ok(x),
        X0Policy::Zero => Ok(0.0),
        X0Policy::PotentialMin => x0_potential_min(p),
        X0Policy::S0Zero => x0_s0_zero(p, e_guess),
    }
}

/// `(δₙ(E; x0), relative |δₙ|)` at depth `n`.
pub fn delta_at(p: &Problem, energy: f64, x0: f64, n: usize, order: usize) -> Result<(f64, f64)> {
    let (lambda0, s0) = p.build_coefficients(energy, x0, order)?;
    let engine = AimEngine::new(lambda0, s0)?;
    let mut prev = engine.initial();
    for _ in 1..n {
        prev = engine.step(&prev)?;
    }
    let cur = engine.step(&prev)?;
    Ok((delta(&prev, &cur, x0), relative_delta(&prev, &cur, x0)))
}

fn require_eigenproblem(p: &Problem) -> Result<()> {
    if p.is_eigenproblem() {
        Ok(())
    } else {
        Err(Error::Usage(format!(
            "{} is not an eigenvalue problem in E",
            p.name()
        )))
    }
}

/// Brackets of sign changes of `δ_{max_iter}(E)` over the configured grid.
/// Grid points where δ is exactly zero yield a degenerate bracket.
pub fn scan(p: &Problem, cfg: &SolverConfig) -> Result<ScanReport> {
    require_eigenproblem(p)?;
    cfg.validate()?;
    let order = cfg.order();
    let steps = ((cfg.e_max - cfg.e_min) / cfg.e_step).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| cfg.e_min + i as f64 * cfg.e_step).collect();
    let fixed_x0 = match cfg.x0_policy {
        X0Policy::S0Zero => None,
        policy => Some(resolve_x0(p, policy, 0.0)?),
    };
    let values: Vec<Result<f64>> = grid
        .par_iter()
        .map(|&e| {
            let x0 = match fixed_x0 {
                Some(x0) => x0,
                None => x0_s0_zero(p, e)?,
            };
            delta_at(p, e, x0, cfg.max_iter, order).map(|(d, _)| d)
        })
        .collect();

    let mut brackets = Vec::new();
    let mut skipped = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&e, value) in grid.iter().zip(values) {
        let d = match value {
            Ok(d) => d,
            Err(err) => {
                skipped.push((e, err));
                continue;
            }
        };
        if d == 0.0 {
            brackets.push(Bracket { lo: e, hi: e });
            last = None;
            continue;
        }
        if let Some((e_prev, d_prev)) = last {
            if d_prev.signum() != d.signum() {
                brackets.push(Bracket { lo: e_prev, hi: e });
            }
        }
        last = Some((e, d));
    }
    Ok(ScanReport { brackets, skipped })
}

/// Bisection for a zero of δ at depth `n` inside `[lo, hi]`. `None` when
/// the endpoints share a sign.
fn bisect(
    p: &Problem,
    x0: f64,
    n: usize,
    order: usize,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<Option<f64>> {
    let f = |e: f64| delta_at(p, e, x0, n, order).map(|(d, _)| d);
    let mut f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if lo == hi {
        return Ok(None);
    }
    let f_hi = f(hi)?;
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(Some(mid));
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Bisects the bracket at `max_iter`, then re-locates the root at the
/// previous `stab_window − 1` depths.
pub fn refine(p: &Problem, cfg: &SolverConfig, bracket: Bracket) -> Result<EigenvalueResult> {
    require_eigenproblem(p)?;
    cfg.validate()?;
    let order = cfg.order();
    let x0 = resolve_x0(p, cfg.x0_policy, bracket.mid())?;
    let n = cfg.max_iter;
    let energy = bisect(p, x0, n, order, bracket.lo, bracket.hi, cfg.root_tol)?.ok_or_else(|| {
        Error::NoSignChange(format!(
            "δ does not change sign on [{}, {}] at n = {n}",
            bracket.lo, bracket.hi
        ))
    })?;
    let half = 0.5 * cfg.e_step;
    let (d, _) = delta_at(p, energy, x0, n, order)?;
    let (d_lo, _) = delta_at(p, energy - half, x0, n, order)?;
    let (d_hi, _) = delta_at(p, energy + half, x0, n, order)?;
    let scale = d_lo.abs().max(d_hi.abs());
    let residual = if scale > 0.0 { d.abs() / scale } else { d.abs() };

    let mut history = vec![(n, Some(energy))];
    for depth in (n + 1 - cfg.stab_window..n).rev() {
        let mut root = bisect(p, x0, depth, order, bracket.lo, bracket.hi, cfg.root_tol)?;
        if root.is_none() {
            root = bisect(
                p,
                x0,
                depth,
                order,
                bracket.lo - half,
                bracket.hi + half,
                cfg.root_tol,
            )?;
        }
        history.push((depth, root));
    }
    let roots: Vec<f64> = history.iter().filter_map(|(_, r)| *r).collect();
    let spread = roots.iter().fold(0.0_f64, |m, r| m.max((r - energy).abs()));
    let stabilized = roots.len() == history.len() && spread <= 10.0 * cfg.root_tol;
    Ok(EigenvalueResult {
        energy,
        n_used: n,
        delta_residual: residual,
        x0_used: x0,
        stabilized,
        history,
    })
}

/// The lowest `count` roots, sorted ascending. The scan window is widened
/// (up to four times) until enough brackets are found.
pub fn solve_spectrum(p: &Problem, cfg: &SolverConfig, count: usize) -> Result<Vec<EigenvalueResult>> {
    require_eigenproblem(p)?;
    cfg.validate()?;
    let mut window = cfg.clone();
    let mut brackets = scan(p, &window)?.brackets;
    for _ in 0..4 {
        if brackets.len() >= count {
            break;
        }
        let width = window.e_max - window.e_min;
        let next = SolverConfig {
            e_min: window.e_max,
            e_max: window.e_max + width,
            ..window.clone()
        };
        // The shared endpoint is evaluated twice; a root exactly there is
        // merged below.
        brackets.extend(scan(p, &next)?.brackets);
        window.e_max = next.e_max;
    }
    let mut results: Vec<EigenvalueResult> = brackets
        .par_iter()
        .map(|b| refine(p, cfg, *b))
        .collect::<Result<_>>()?;
    results.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    results.dedup_by(|b, a| (b.energy - a.energy).abs() <= cfg.root_tol);
    results.truncate(count);
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_min_closed_form() {
        let p = Problem::spiked(0.0, 1.0, 4.0).unwrap();
        assert!((x0_potential_min(&p).unwrap() - 2f64.powf(1.0 / 6.0)).abs() < 1e-15);
        let q = Problem::spiked(0.0, 2.0, 2.0).unwrap();
        assert!((x0_potential_min(&q).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        let r = Problem::spiked(0.0, 0.0, 4.0).unwrap();
        assert!(x0_potential_min(&r).is_err());
    }

    #[test]
    fn potential_min_numeric() {
        // V = x² + 12/x² has its minimum at 12^{1/4}.
        let p = Problem::goldman_krivchenkov(3.0).unwrap();
        let x = x0_potential_min(&p).unwrap();
        assert!((x - 12f64.powf(0.25)).abs() < 1e-8, "{x}");
        let s = Problem::spiked(3.0, 0.001, 4.0).unwrap();
        let x = x0_potential_min(&s).unwrap();
        let dv = 2.0 * x - 24.0 / x.powi(3) - 0.004 / x.powi(5);
        assert!(dv.abs() < 1e-7, "{dv}");
    }

    #[test]
    fn s0_zero_points() {
        let p = Problem::spiked(0.0, 1.0, 4.0).unwrap();
        assert!((x0_s0_zero(&p, 5.0).unwrap() - 0.25f64.powf(0.25)).abs() < 1e-14);

        let q = Problem::spiked(3.0, 0.001, 4.0).unwrap();
        let x = x0_s0_zero(&q, 9.0).unwrap();
        let (_, s) = q.build_coefficients(9.0, x, 0).unwrap();
        assert!(s.value().abs() < 1e-12);

        let r = Problem::spiked(0.0, 0.1, 4.0).unwrap();
        assert!(x0_s0_zero(&r, 1.0).is_err());

        // numeric route: α ≠ 4
        let t = Problem::spiked(1.0, 0.5, 1.9).unwrap();
        let x = x0_s0_zero(&t, 6.0).unwrap();
        let (_, s) = t.build_coefficients(6.0, x, 0).unwrap();
        assert!(s.value().abs() < 1e-12, "{}", s.value());

        let gk = Problem::goldman_krivchenkov(1.0).unwrap();
        assert!(matches!(x0_s0_zero(&gk, 6.0), Err(Error::NoSignChange(_))));
    }

    #[test]
    fn harmonic_scan_brackets() {
        let cfg = SolverConfig {
            e_max: 10.0,
            e_step: 0.5,
            ..SolverConfig::for_problem(&Problem::Harmonic1d)
        };
        let report = scan(&Problem::Harmonic1d, &cfg).unwrap();
        let mids: Vec<f64> = report.brackets.iter().map(Bracket::mid).collect();
        assert_eq!(mids.len(), 5, "{mids:?}");
        for (m, e) in mids.iter().zip([1.0, 3.0, 5.0, 7.0, 9.0]) {
            assert!((m - e).abs() <= 0.25, "{mids:?}");
        }
    }

    #[test]
    fn harmonic_refine() {
        let cfg = SolverConfig::for_problem(&Problem::Harmonic1d);
        let r = refine(&Problem::Harmonic1d, &cfg, Bracket { lo: 0.5, hi: 1.5 }).unwrap();
        assert!((r.energy - 1.0).abs() < 1e-10);
        assert!(r.stabilized);
        assert_eq!(r.n_used, 12);
    }

    #[test]
    fn hermite_is_not_an_eigenproblem() {
        let p = Problem::Hermite { k: 3 };
        assert!(matches!(
            solve_spectrum(&p, &SolverConfig::default(), 2),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn config_validation() {
        let ok = SolverConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SolverConfig { e_min: 3.0, e_max: 3.0, ..ok.clone() },
            SolverConfig { e_step: 0.0, ..ok.clone() },
            SolverConfig { max_iter: 1, ..ok.clone() },
            SolverConfig { jet_order: Some(4), ..ok.clone() },
            SolverConfig { stab_window: 0, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn default_policies() {
        assert_eq!(X0Policy::default_for(&Problem::quartic(0.1).unwrap()), X0Policy::Zero);
        assert_eq!(X0Policy::default_for(&Problem::Harmonic1d), X0Policy::Zero);
        assert_eq!(
            X0Policy::default_for(&Problem::spiked(3.0, 0.1, 4.0).unwrap()),
            X0Policy::PotentialMin
        );
        assert_eq!(
            X0Policy::default_for(&Problem::goldman_krivchenkov(0.0).unwrap()),
            X0Policy::Fixed(1.0)
        );
    }
}
