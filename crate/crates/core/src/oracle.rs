//! Reference eigenvalues from a second-order finite-difference Hamiltonian.
//!
//! `−ψ''` uses the three-point stencil on a uniform grid; the lowest
//! eigenvalues of the symmetric tridiagonal matrix are isolated by Sturm
//! sequence bisection and extrapolated in `h²` from grids `m` and `2m`.
//! No code is shared with the iteration engine.

use crate::error::{Error, Result};
use crate::problems::{Domain, Problem};

pub const DEFAULT_R_MAX: f64 = 12.0;
pub const DEFAULT_M: usize = 4000;
pub const MIN_M: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `ψ = 0` at both ends of `[origin, origin + r_max]`.
    DirichletBoth,
    /// `ψ'(0) = 0`, `ψ(r_max) = 0`.
    EvenAtZero,
    /// `ψ(0) = 0`, `ψ(r_max) = 0`.
    OddAtZero,
}

pub type PotentialFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

pub struct GridEigenProblem {
    pub r_max: f64,
    pub m: usize,
    pub potential: PotentialFn,
    pub boundary: Boundary,
    /// Left end of the grid; only meaningful for [`Boundary::DirichletBoth`].
    pub origin: f64,
}

impl std::fmt::Debug for GridEigenProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridEigenProblem")
            .field("r_max", &self.r_max)
            .field("m", &self.m)
            .field("boundary", &self.boundary)
            .field("origin", &self.origin)
            .finish_non_exhaustive()
    }
}

/// Symmetric tridiagonal matrix: `diag` and the first off-diagonal.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / q };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based).
    fn eigenvalue(&self, k: usize, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl GridEigenProblem {
    pub fn new(r_max: f64, m: usize, potential: PotentialFn, boundary: Boundary) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::Usage(format!("r_max = {r_max} must be positive")));
        }
        if m < MIN_M {
            return Err(Error::Usage(format!("m = {m} must be at least {MIN_M}")));
        }
        Ok(Self {
            r_max,
            m,
            potential,
            boundary,
            origin: 0.0,
        })
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn spacing(&self, m: usize) -> f64 {
        self.r_max / (m + 1) as f64
    }

    fn matrix(&self, m: usize) -> Result<Tridiagonal> {
        let h = self.spacing(m);
        let inv_h2 = 1.0 / (h * h);
        let (first, origin) = match self.boundary {
            Boundary::EvenAtZero => (0, 0.0),
            Boundary::OddAtZero => (1, 0.0),
            Boundary::DirichletBoth => (1, self.origin),
        };
        let mut diag = Vec::with_capacity(m + 1);
        for i in first..=m {
            let x = origin + i as f64 * h;
            let v = (self.potential)(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i, x });
            }
            diag.push(2.0 * inv_h2 + v);
        }
        let mut off = vec![-inv_h2; diag.len() - 1];
        if self.boundary == Boundary::EvenAtZero {
            // Ghost point ψ₋₁ = ψ₁, symmetrized by scaling row 0 by 1/√2.
            off[0] = -std::f64::consts::SQRT_2 * inv_h2;
        }
        Ok(Tridiagonal { diag, off })
    }

    /// Lowest `count` eigenvalues on the `m`-point grid, no extrapolation.
    pub fn eigenvalues_raw(&self, m: usize, count: usize) -> Result<Vec<f64>> {
        if count > m {
            return Err(Error::Usage(format!(
                "requested {count} eigenvalues from a {m}-point grid"
            )));
        }
        let t = self.matrix(m)?;
        let (lo, hi) = t.gershgorin();
        Ok((0..count).map(|k| t.eigenvalue(k, lo, hi)).collect())
    }
}

/// Lowest `count` eigenvalues, Richardson-extrapolated from grids `m` and `2m`.
pub fn fd_eigenvalues(gp: &GridEigenProblem, count: usize) -> Result<Vec<f64>> {
    let (m1, m2) = (gp.m, 2 * gp.m);
    let (coarse, fine) = rayon::join(
        || gp.eigenvalues_raw(m1, count),
        || gp.eigenvalues_raw(m2, count),
    );
    let (coarse, fine) = (coarse?, fine?);
    let h1 = gp.spacing(m1).powi(2);
    let h2 = gp.spacing(m2).powi(2);
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(e1, e2)| (e2 * h1 - e1 * h2) / (h1 - h2))
        .collect())
}

fn potential_fn(p: &Problem) -> Result<PotentialFn> {
    if p.potential(1.0).is_none() {
        return Err(Error::Usage(format!("{} has no potential", p.name())));
    }
    let owned = p.clone();
    Ok(Box::new(move |x| owned.potential(x).unwrap_or(f64::NAN)))
}

fn is_even(p: &Problem) -> bool {
    match p {
        Problem::Harmonic1d | Problem::Quartic { .. } => true,
        Problem::Custom { potential } => potential
            .terms()
            .iter()
            .all(|t| t.exponent.fract() == 0.0 && (t.exponent as i64) % 2 == 0),
        _ => false,
    }
}

/// Lowest `count` oracle energies for a catalog problem.
///
/// Half-line problems use Dirichlet at 0. Even potentials on the real line
/// merge the even and odd half-line spectra; others use `[−r_max, r_max]`.
pub fn oracle_spectrum(p: &Problem, count: usize, r_max: f64, m: usize) -> Result<Vec<f64>> {
    let v = potential_fn(p)?;
    if p.domain() == Domain::HalfLine {
        return fd_eigenvalues(&GridEigenProblem::new(r_max, m, v, Boundary::OddAtZero)?, count);
    }
    if is_even(p) {
        let even = GridEigenProblem::new(r_max, m, v, Boundary::EvenAtZero)?;
        let odd = GridEigenProblem::new(r_max, m, potential_fn(p)?, Boundary::OddAtZero)?;
        let half = count.div_ceil(2);
        let (e, o) = rayon::join(|| fd_eigenvalues(&even, half), || fd_eigenvalues(&odd, half));
        let mut all = e?;
        all.extend(o?);
        all.sort_by(f64::total_cmp);
        all.truncate(count);
        return Ok(all);
    }
    let gp = GridEigenProblem::new(2.0 * r_max, 2 * m, v, Boundary::DirichletBoth)?.with_origin(-r_max);
    fd_eigenvalues(&gp, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(boundary: Boundary, m: usize) -> GridEigenProblem {
        GridEigenProblem::new(DEFAULT_R_MAX, m, Box::new(|x| x * x), boundary).unwrap()
    }

    #[test]
    fn gk_gamma_zero_spectrum() {
        let gp = harmonic(Boundary::OddAtZero, 4000);
        let e = fd_eigenvalues(&gp, 3).unwrap();
        for (got, want) in e.iter().zip([3.0, 7.0, 11.0]) {
            assert!((got - want).abs() < 1e-6, "{e:?}");
        }
    }

    #[test]
    fn even_parity_harmonic() {
        let gp = harmonic(Boundary::EvenAtZero, 4000);
        let e = fd_eigenvalues(&gp, 3).unwrap();
        for (got, want) in e.iter().zip([1.0, 5.0, 9.0]) {
            assert!((got - want).abs() < 1e-6, "{e:?}");
        }
    }

    #[test]
    fn second_order_convergence() {
        for boundary in [Boundary::EvenAtZero, Boundary::OddAtZero] {
            let gp = harmonic(boundary, 400);
            let e = |m: usize| gp.eigenvalues_raw(m, 1).unwrap()[0];
            let (a, b, c) = (e(200), e(400), e(800));
            let ratio = (a - b) / (b - c);
            assert!((ratio - 4.0).abs() < 0.1, "{boundary:?}: {ratio}");
        }
    }

    #[test]
    fn shifted_dirichlet_grid() {
        let gp = GridEigenProblem::new(16.0, 4000, Box::new(|x| x * x), Boundary::DirichletBoth)
            .unwrap()
            .with_origin(-8.0);
        let e = fd_eigenvalues(&gp, 4).unwrap();
        for (got, want) in e.iter().zip([1.0, 3.0, 5.0, 7.0]) {
            assert!((got - want).abs() < 1e-6, "{e:?}");
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridEigenProblem::new(12.0, 50, Box::new(|x| x), Boundary::OddAtZero).is_err());
        assert!(GridEigenProblem::new(0.0, 500, Box::new(|x| x), Boundary::OddAtZero).is_err());
        let gp = harmonic(Boundary::OddAtZero, 100);
        assert!(gp.eigenvalues_raw(100, 101).is_err());
        let singular = GridEigenProblem::new(12.0, 100, Box::new(|x| 1.0 / x), Boundary::EvenAtZero)
            .unwrap();
        assert!(matches!(singular.eigenvalues_raw(100, 1), Err(Error::NonFinite { index: 0, .. })));
    }

    #[test]
    fn matches_exact_spectra() {
        let e = oracle_spectrum(&Problem::Harmonic1d, 5, DEFAULT_R_MAX, DEFAULT_M).unwrap();
        for (n, got) in e.iter().enumerate() {
            assert!((got - (2 * n + 1) as f64).abs() < 1e-6, "{e:?}");
        }
        for gamma in [0.0, 1.0, 3.0] {
            let p = Problem::goldman_krivchenkov(gamma).unwrap();
            let e = oracle_spectrum(&p, 3, DEFAULT_R_MAX, DEFAULT_M).unwrap();
            for (n, got) in e.iter().enumerate() {
                let want = 4.0 * n as f64 + 2.0 * gamma + 3.0;
                assert!((got - want).abs() < 1e-6, "γ={gamma}: {e:?}");
            }
        }
    }

    #[test]
    fn quartic_ground_state() {
        let p = Problem::quartic(0.1).unwrap();
        let e = oracle_spectrum(&p, 1, 10.0, DEFAULT_M).unwrap();
        assert!((e[0] - 1.065286).abs() < 5e-6, "{e:?}");
    }
}
