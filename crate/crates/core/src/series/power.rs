use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{below, cap_min, DiffRing};
use crate::coefficients::{format_rational, int, Rational};

/// Power series in N commuting variables truncated by total degree: terms of
/// total degree `>= cap` are unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries<const N: usize> {
    terms: BTreeMap<[u32; N], Rational>,
    cap: Option<i64>,
}

fn degree<const N: usize>(m: &[u32; N]) -> i64 {
    m.iter().map(|&e| e as i64).sum()
}

impl<const N: usize> TruncatedSeries<N> {
    pub fn exact(terms: impl IntoIterator<Item = ([u32; N], Rational)>) -> Self {
        Self::with_cap(terms, None)
    }

    pub fn with_cap(terms: impl IntoIterator<Item = ([u32; N], Rational)>, cap: Option<i64>) -> Self {
        let mut s = Self { terms: BTreeMap::new(), cap };
        for (m, c) in terms {
            s.accumulate(m, c);
        }
        s
    }

    pub fn constant(c: Rational) -> Self {
        Self::exact([([0; N], c)])
    }

    /// The coordinate function x_var.
    pub fn variable(var: usize) -> Self {
        let mut m = [0; N];
        m[var] = 1;
        Self::exact([(m, Rational::one())])
    }

    pub fn cap(&self) -> Option<i64> {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; N], &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial, `None` when it lies beyond the cap.
    pub fn coeff(&self, m: &[u32; N]) -> Option<Rational> {
        below(degree(m), self.cap).then(|| self.terms.get(m).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn truncate(&self, cap: i64) -> Self {
        Self::with_cap(self.terms.clone(), cap_min(self.cap, Some(cap)))
    }

    fn accumulate(&mut self, m: [u32; N], c: Rational) {
        if c.is_zero() || !below(degree(&m), self.cap) {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn order(&self) -> Option<i64> {
        self.terms.keys().map(degree).min().or(self.cap)
    }

    fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.cap.is_none()
    }
}

impl<const N: usize> DiffRing for TruncatedSeries<N> {
    fn zero() -> Self {
        Self::exact([])
    }

    fn one() -> Self {
        Self::constant(Rational::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_exact(&self) -> bool {
        self.cap.is_none()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = Self::with_cap(self.terms.clone(), cap_min(self.cap, other.cap));
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        out
    }

    fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(), cap: self.cap }
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let (oa, ob) = (self.order().unwrap(), other.order().unwrap());
        let cap = cap_min(self.cap.map(|c| c + ob), other.cap.map(|c| c + oa));
        let mut out = Self::with_cap([], cap);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = *ma;
                for (x, y) in m.iter_mut().zip(mb) {
                    *x += y;
                }
                out.accumulate(m, ca * cb);
            }
        }
        out
    }

    fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::with_cap([], self.cap);
        }
        Self { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(), cap: self.cap }
    }

    fn derive(&self, var: usize) -> Self {
        if var >= N {
            return Self::zero();
        }
        let cap = self.cap.map(|c| c - 1);
        let mut out = Self::with_cap([], cap);
        for (m, c) in &self.terms {
            if m[var] == 0 {
                continue;
            }
            let mut d = *m;
            d[var] -= 1;
            out.accumulate(d, c * int(m[var] as i64));
        }
        out
    }
}

impl<const N: usize> fmt::Display for TruncatedSeries<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut s = format_rational(c);
            for (v, e) in m.iter().enumerate() {
                if *e > 0 {
                    let name = if N == 1 { "x".to_string() } else { format!("x{}", v + 1) };
                    s.push_str(&format!("*{name}^{e}"));
                }
            }
            parts.push(s);
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        if let Some(c) = self.cap {
            parts.push(format!("O(deg {c})"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// d/dx on Q[[x]]; the cap drops by one.
pub fn derivation_x(f: &TruncatedSeries<1>) -> TruncatedSeries<1> {
    f.derive(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> TruncatedSeries<1> {
        TruncatedSeries::variable(0)
    }

    #[test]
    fn derivative_examples() {
        let x2 = x().mul(&x());
        assert_eq!(derivation_x(&x2), x().scale(&int(2)));
        assert!(derivation_x(&TruncatedSeries::constant(int(7))).is_zero());
        let f = TruncatedSeries::<1>::with_cap([([0], int(1)), ([2], int(3)), ([3], int(-1))], Some(6));
        let lhs = derivation_x(&x().mul(&f));
        let rhs = f.add(&x().mul(&derivation_x(&f)));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.cap(), Some(6));
    }

    #[test]
    fn product_cap_uses_orders() {
        // (x + O(x^4)) * (x^2 + O(x^3)) = x^3 + O(x^4)
        let a = TruncatedSeries::<1>::with_cap([([1], int(1))], Some(4));
        let b = TruncatedSeries::<1>::with_cap([([2], int(1))], Some(3));
        let p = a.mul(&b);
        assert_eq!(p.cap(), Some(4));
        assert_eq!(p.coeff(&[3]), Some(int(1)));
        assert_eq!(p.coeff(&[4]), None);
    }

    #[test]
    fn two_variable_derivations_commute() {
        let p = TruncatedSeries::<2>::exact([([2, 1], int(3)), ([0, 3], int(-2)), ([1, 1], int(5))]);
        assert_eq!(p.derive(0).derive(1), p.derive(1).derive(0));
        assert!(p.derive(2).is_zero());
    }
}
