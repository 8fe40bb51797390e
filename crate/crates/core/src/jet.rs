//! Truncated Taylor series ("jets") about a fixed expansion point.
//!
//! A [`Jet`] of order `M` stores `c_0..c_M` with `c_j = f^(j)(x0) / j!`.
//! Arithmetic truncates at order `M`; operands must agree on both the
//! expansion point and the order. The `checked_*` methods report a
//! mismatch as [`Error::Usage`]; the operator impls panic on it.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    x0: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Builds a jet from raw Taylor coefficients. `coeffs` must be non-empty
    /// and finite.
    pub fn from_coeffs(x0: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Usage("a jet needs at least one coefficient".into()));
        }
        if !x0.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Usage("jet coefficients must be finite".into()));
        }
        Ok(Self { x0, coeffs })
    }

    /// The constant function `v`.
    pub fn constant(v: f64, x0: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = v;
        Self { x0, coeffs }
    }

    pub fn zero(x0: f64, order: usize) -> Self {
        Self::constant(0.0, x0, order)
    }

    /// The identity function `x`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut jet = Self::constant(x0, x0, order);
        if order >= 1 {
            jet.coeffs[1] = 1.0;
        }
        jet
    }

    /// `coefficient * x^beta` expanded about `x0`.
    ///
    /// Non-negative integer exponents are expanded exactly and accept any
    /// `x0`. Other exponents use the binomial recurrence
    /// `c_j = c_{j-1} (beta - j + 1) / (j x0)` and need `x0 > 0`.
    pub fn power(beta: f64, coefficient: f64, x0: f64, order: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; order + 1];
        if beta >= 0.0 && beta.fract() == 0.0 {
            // c_j = coefficient * C(beta, j) * x0^(beta - j)
            let b = beta as usize;
            let mut binom = 1.0;
            for (j, c) in coeffs.iter_mut().enumerate().take(b.min(order) + 1) {
                if j > 0 {
                    binom = binom * (b - j + 1) as f64 / j as f64;
                }
                *c = coefficient * binom * x0.powi((b - j) as i32);
            }
        } else {
            if !(x0 > 0.0) {
                return Err(Error::Domain(format!(
                    "x^{beta} is singular at or left of the expansion point x0 = {x0}"
                )));
            }
            coeffs[0] = coefficient * x0.powf(beta);
            for j in 1..=order {
                coeffs[j] = coeffs[j - 1] * (beta - j as f64 + 1.0) / (j as f64 * x0);
            }
        }
        Self::from_coeffs(x0, coeffs)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at the expansion point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.x0 != other.x0 || self.order() != other.order() {
            return Err(Error::Usage(format!(
                "jet mismatch: (x0 = {}, order {}) vs (x0 = {}, order {})",
                self.x0,
                self.order(),
                other.x0,
                other.order()
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet { x0: self.x0, coeffs })
    }

    /// Cauchy product truncated at the common order.
    pub fn checked_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let m = self.order();
        let mut coeffs = vec![0.0; m + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (c, &b) in coeffs[i..].iter_mut().zip(&other.coeffs) {
                *c += a * b;
            }
        }
        Ok(Jet { x0: self.x0, coeffs })
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            x0: self.x0,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Derivative, padded back to the same order with a trailing zero.
    pub fn derive(&self) -> Jet {
        let m = self.order();
        let mut coeffs = vec![0.0; m + 1];
        for j in 0..m {
            coeffs[j] = (j + 1) as f64 * self.coeffs[j + 1];
        }
        Jet { x0: self.x0, coeffs }
    }

    /// Copy with every coefficient above `j` set to zero; the order is kept.
    pub fn zeroed_above(&self, j: usize) -> Jet {
        let mut coeffs = self.coeffs.clone();
        for c in coeffs.iter_mut().skip(j + 1) {
            *c = 0.0;
        }
        Jet { x0: self.x0, coeffs }
    }

    /// Horner evaluation of the truncated series at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let h = x - self.x0;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * h + c)
    }
}

impl Add for &Jet {
    type Output = Jet;

    fn add(self, rhs: &Jet) -> Jet {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Jet {
    type Output = Jet;

    fn sub(self, rhs: &Jet) -> Jet {
        self.checked_add(&rhs.scale(-1.0))
            .unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Jet {
    type Output = Jet;

    fn mul(self, rhs: &Jet) -> Jet {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Jet {
    type Output = Jet;

    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn jet(x0: f64, c: &[f64]) -> Jet {
        Jet::from_coeffs(x0, c.to_vec()).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(Jet::constant(5.0, 0.0, 3).coeffs(), &[5.0, 0.0, 0.0, 0.0]);
        assert_eq!(Jet::constant(0.0, 1.0, 2).coeffs(), &[0.0, 0.0, 0.0]);
        let e = 3.0;
        assert_eq!(Jet::constant(1.0 - e, 0.0, 2).coeffs(), &[-2.0, 0.0, 0.0]);
    }

    #[test]
    fn product_truncates() {
        let p = &jet(0.0, &[1.0, 2.0]) * &jet(0.0, &[3.0, 1.0]);
        assert_eq!(p.coeffs(), &[3.0, 7.0]);
        let a = jet(0.5, &[1.5, -2.0, 4.0]);
        assert_eq!(&a * &Jet::constant(1.0, 0.5, 2), a);
        assert_eq!((&a + &a.scale(-1.0)), Jet::zero(0.5, 2));
    }

    #[test]
    fn mismatch_is_usage_error() {
        let a = Jet::constant(1.0, 0.0, 2);
        let b = Jet::constant(1.0, 0.0, 3);
        let c = Jet::constant(1.0, 1.0, 2);
        assert!(matches!(a.checked_add(&b), Err(Error::Usage(_))));
        assert!(matches!(a.checked_mul(&c), Err(Error::Usage(_))));
    }

    #[test]
    #[should_panic(expected = "jet mismatch")]
    fn operator_mismatch_panics() {
        let _ = &Jet::constant(1.0, 0.0, 2) + &Jet::constant(1.0, 0.0, 4);
    }

    #[test]
    fn derivatives() {
        assert_eq!(jet(0.0, &[1.0, 2.0, 3.0]).derive().coeffs(), &[2.0, 6.0, 0.0]);
        assert_eq!(jet(0.0, &[0.0, 2.0, 0.0]).derive().coeffs(), &[2.0, 0.0, 0.0]);
        let sq = Jet::power(2.0, 1.0, 1.0, 4).unwrap();
        assert_eq!(sq.derive().derive().coeffs(), &[2.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn powers() {
        assert_eq!(
            Jet::power(2.0, 1.0, 0.0, 4).unwrap().coeffs(),
            &[0.0, 0.0, 1.0, 0.0, 0.0]
        );
        assert_eq!(
            Jet::power(-1.0, 1.0, 1.0, 2).unwrap().coeffs(),
            &[1.0, -1.0, 1.0]
        );
        assert!(matches!(
            Jet::power(-2.0, 1.0, 0.0, 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            Jet::power(0.5, 1.0, -1.0, 3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fractional_power_matches_finite_differences() {
        // Taylor coefficients of x^-1.9 at 1.2 from high-order central differences
        // of the closed form, independent of the binomial recurrence.
        let f = |x: f64| x.powf(-1.9);
        let x0 = 1.2;
        let jet = Jet::power(-1.9, 1.0, x0, 6).unwrap();
        let h = 1e-2;
        // 7-point stencils (error O(h^6)) for f, f', f''.
        let d1 = (f(x0 + 3.0 * h) - 9.0 * f(x0 + 2.0 * h) + 45.0 * f(x0 + h)
            - 45.0 * f(x0 - h)
            + 9.0 * f(x0 - 2.0 * h)
            - f(x0 - 3.0 * h))
            / (60.0 * h);
        let d2 = (2.0 * f(x0 + 3.0 * h) - 27.0 * f(x0 + 2.0 * h) + 270.0 * f(x0 + h)
            - 490.0 * f(x0)
            + 270.0 * f(x0 - h)
            - 27.0 * f(x0 - 2.0 * h)
            + 2.0 * f(x0 - 3.0 * h))
            / (180.0 * h * h);
        assert!((jet.coeffs()[0] - f(x0)).abs() < 1e-14);
        assert!((jet.coeffs()[1] - d1).abs() < 1e-8, "{} vs {d1}", jet.coeffs()[1]);
        assert!(
            (jet.coeffs()[2] - d2 / 2.0).abs() < 1e-8,
            "{} vs {}",
            jet.coeffs()[2],
            d2 / 2.0
        );
        // Higher coefficients: compare against finite differences of the
        // analytic first derivative family, c_j = f^(j)/j!.
        let mut fact = 1.0;
        let mut falling = 1.0;
        for j in 0..=6 {
            if j > 0 {
                fact *= j as f64;
                falling *= -1.9 - (j as f64 - 1.0);
            }
            let exact = falling * x0.powf(-1.9 - j as f64) / fact;
            assert!((jet.coeffs()[j] - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn evaluation() {
        assert_eq!(jet(0.0, &[1.0, 2.0, 3.0]).eval(0.0), 1.0);
        let v = Jet::power(-2.0, 12.0, 2.0, 10).unwrap();
        assert_eq!(v.eval(2.0), 3.0);
        let sq = Jet::power(2.0, 1.0, 1.0, 3).unwrap();
        assert!((sq.eval(1.5) - 2.25).abs() < 1e-15);
    }

    fn coeff_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3..1e3f64, len)
    }

    fn close(a: &Jet, b: &Jet, rel: f64) -> bool {
        let scale = a.max_abs().max(b.max_abs()).max(1.0);
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .all(|(x, y)| (x - y).abs() <= rel * scale)
    }

    proptest! {
        #[test]
        fn ring_laws(a in coeff_vec(7), b in coeff_vec(7), c in coeff_vec(7)) {
            let (a, b, c) = (jet(0.3, &a), jet(0.3, &b), jet(0.3, &c));
            prop_assert!(close(&(&a + &b), &(&b + &a), 1e-12));
            prop_assert!(close(&(&a * &b), &(&b * &a), 1e-12));
            prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), 1e-12));
            prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), 1e-12));
        }

        #[test]
        fn leibniz_rule(a in coeff_vec(9), b in coeff_vec(9)) {
            let (a, b) = (jet(-0.7, &a), jet(-0.7, &b));
            let lhs = (&a * &b).derive();
            let rhs = &(&a.derive() * &b) + &(&a * &b.derive());
            let m = lhs.order();
            let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
            // The truncated product loses the top coefficient.
            for j in 0..m {
                prop_assert!((lhs.coeffs()[j] - rhs.coeffs()[j]).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn power_series_tracks_function(beta in -3.0..3.0f64, x0 in 0.5..4.0f64, t in -0.45..0.45f64) {
            let order = 24;
            let h = t * x0;
            let jet = Jet::power(beta, 1.7, x0, order).unwrap();
            let exact = 1.7 * (x0 + h).powf(beta);
            let bound = 1.7 * x0.powf(beta).abs() * (t.abs()).powi(order as i32 + 1) * 1e3 + 1e-12 * exact.abs();
            prop_assert!((jet.eval(x0 + h) - exact).abs() <= bound.max(1e-12));
        }

        #[test]
        fn derive_of_power(beta in -3.0..3.0f64, x0 in 0.5..4.0f64) {
            let m = 10;
            let d = Jet::power(beta, 1.0, x0, m).unwrap().derive();
            let expected = Jet::power(beta - 1.0, beta, x0, m).unwrap();
            for j in 0..m {
                let e = expected.coeffs()[j];
                prop_assert!((d.coeffs()[j] - e).abs() <= 1e-10 * e.abs().max(1.0));
            }
        }
    }
}
