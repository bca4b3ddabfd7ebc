use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{below, cap_min};
use crate::coefficients::Rational;
use crate::error::{Error, Result};

/// A slice of k((u)): exact coefficients for exponents below `cap`, nothing
/// known at or beyond it. Missing exponents below the cap are zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentWindow {
    coeffs: BTreeMap<i64, Rational>,
    cap: Option<i64>,
}

impl LaurentWindow {
    pub fn new(terms: impl IntoIterator<Item = (i64, Rational)>, cap: Option<i64>) -> Self {
        let mut w = Self { coeffs: BTreeMap::new(), cap };
        for (e, c) in terms {
            w.accumulate(e, c);
        }
        w
    }

    pub fn exact(terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        Self::new(terms, None)
    }

    pub fn monomial(e: i64, c: Rational) -> Self {
        Self::exact([(e, c)])
    }

    pub fn cap(&self) -> Option<i64> {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i64) -> Option<Rational> {
        below(e, self.cap).then(|| self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.cap.is_none()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Lower bound on the valuation: the valuation, or the cap for an
    /// element only known to vanish below it.
    fn order_bound(&self) -> Option<i64> {
        self.valuation().or(self.cap)
    }

    pub fn truncate(&self, cap: i64) -> Self {
        Self::new(self.coeffs.clone(), cap_min(self.cap, Some(cap)))
    }

    pub(crate) fn accumulate(&mut self, e: i64, c: Rational) {
        if c.is_zero() || !below(e, self.cap) {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::new(self.coeffs.clone(), cap_min(self.cap, other.cap));
        for (e, c) in &other.coeffs {
            out.accumulate(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(), cap: self.cap }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|(e, v)| (*e, v * c)), self.cap)
    }

    /// Multiplication by u^k.
    pub fn shift(&self, k: i64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(), cap: self.cap.map(|c| c + k) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::default();
        }
        let (va, vb) = (self.order_bound().unwrap(), other.order_bound().unwrap());
        let cap = cap_min(self.cap.map(|c| c + vb), other.cap.map(|c| c + va));
        let mut out = Self::new([], cap);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                out.accumulate(ea + eb, ca * cb);
            }
        }
        out
    }

    /// Inverse of an element with a known leading term. `rel_cap` bounds the
    /// number of computed terms past the leading one when the input does not
    /// already limit it.
    pub fn inverse(&self, rel_cap: i64) -> Result<Self> {
        let v =
            self.valuation().ok_or_else(|| Error::NotInvertible("Laurent window with no known nonzero term".into()))?;
        let lead = self.coeffs[&v].clone();
        let lead_inv = lead.recip();
        if self.coeffs.len() == 1 && self.cap.is_none() {
            return Ok(Self::monomial(-v, lead_inv));
        }
        let rel = self.cap.map_or(rel_cap, |c| (c - v).min(rel_cap));
        let mut z: Vec<Rational> = Vec::with_capacity(rel.max(0) as usize);
        for m in 0..rel {
            if m == 0 {
                z.push(lead_inv.clone());
                continue;
            }
            let mut acc = Rational::zero();
            for k in 1..=m {
                if let Some(x) = self.coeffs.get(&(v + k)) {
                    acc += x * &z[(m - k) as usize];
                }
            }
            z.push(-(&lead_inv * acc));
        }
        Ok(Self::new(z.into_iter().enumerate().map(|(m, c)| (m as i64 - v, c)), Some(rel - v)))
    }

    pub fn one() -> Self {
        Self::monomial(0, Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::int;

    #[test]
    fn geometric_cancellation() {
        // (1 + u)(1 - u + u^2 - u^3 + u^4 + O(u^5)) = 1 + O(u^5)
        let a = LaurentWindow::exact([(0, int(1)), (1, int(1))]);
        let b = LaurentWindow::new((0..5).map(|k| (k, int(if k % 2 == 0 { 1 } else { -1 }))), Some(5));
        let p = a.mul(&b);
        assert_eq!(p, LaurentWindow::new([(0, int(1))], Some(5)));
    }

    #[test]
    fn inverse_round_trip() {
        let a = LaurentWindow::exact([(-2, int(3)), (0, int(1)), (1, int(-2))]);
        let inv = a.inverse(10).unwrap();
        assert_eq!(inv.cap(), Some(12));
        let p = a.mul(&inv);
        assert_eq!(p.coeff(0), Some(int(1)));
        assert!(p.sub(&LaurentWindow::one()).is_zero());
        assert!(LaurentWindow::default().inverse(4).is_err());
    }
}
