//! Pseudodifferential operators Σ a_i δ^i over a [`DiffRing`].
//!
//! Operators are windows: coefficients of δ^i for i below `floor` are
//! unknown. An operator with `floor == None` is an exact finite sum. The
//! const parameter `VAR` selects which derivation of the base ring δ acts by,
//! so `OperatorWindow<OperatorWindow<R, 0>, 1>` is the ring of δ₂-operators
//! whose coefficients are δ₁-operators.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::coefficients::{int, Rational};
use crate::error::{Error, Result};
use crate::series::DiffRing;

/// Floor imposed when the composition of two exact operators is an infinite
/// expansion.
pub const DEFAULT_OPERATOR_FLOOR: i64 = -8;

/// C_i^k = i(i-1)…(i-k+1) / k!, for any integer i.
pub fn binomial(i: i64, k: u32) -> Rational {
    let mut acc = Rational::one();
    for m in 0..k as i64 {
        acc = acc * int(i - m) / int(m + 1);
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorWindow<R, const VAR: usize = 0> {
    coeffs: BTreeMap<i64, R>,
    floor: Option<i64>,
}

fn floor_max(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<R: DiffRing, const VAR: usize> OperatorWindow<R, VAR> {
    pub fn new(terms: impl IntoIterator<Item = (i64, R)>, floor: Option<i64>) -> Self {
        let mut op = Self { coeffs: BTreeMap::new(), floor };
        for (e, c) in terms {
            op.accumulate(e, c);
        }
        op
    }

    pub fn exact(terms: impl IntoIterator<Item = (i64, R)>) -> Self {
        Self::new(terms, None)
    }

    /// δ^e
    pub fn delta_pow(e: i64) -> Self {
        Self::exact([(e, R::one())])
    }

    /// The multiplication operator by a ring element.
    pub fn scalar(c: R) -> Self {
        Self::exact([(0, c)])
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &R)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of δ^e; `None` when e is below the floor.
    pub fn coeff(&self, e: i64) -> Option<R> {
        if self.floor.is_some_and(|f| e < f) {
            return None;
        }
        Some(self.coeffs.get(&e).cloned().unwrap_or_else(R::zero))
    }

    fn accumulate(&mut self, e: i64, c: R) {
        if self.floor.is_some_and(|f| e < f) || (c.is_zero() && c.is_exact()) {
            return;
        }
        let next = match self.coeffs.get(&e) {
            Some(old) => old.add(&c),
            None => c,
        };
        if next.is_zero() && next.is_exact() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, next);
        }
    }

    fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.floor.is_none()
    }

    /// Highest exponent that may carry a nonzero coefficient.
    pub fn top_bound(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied().or(self.floor.map(|f| f - 1))
    }

    /// Highest exponent with a known nonzero coefficient.
    pub fn top_degree(&self) -> Option<i64> {
        self.coeffs.iter().rev().find(|(_, c)| !c.is_zero()).map(|(e, _)| *e)
    }

    /// Nothing nonzero is known and the operator is not exactly zero.
    pub fn is_exhausted(&self) -> bool {
        self.coeffs.values().all(R::is_zero) && !DiffRing::is_exact(self)
    }

    /// Lower the precision to `floor` (drops coefficients below it).
    pub fn with_floor(&self, floor: i64) -> Self {
        Self::new(self.coeffs.clone(), floor_max(self.floor, Some(floor)))
    }

    pub fn compose(&self, other: &Self) -> Self {
        self.compose_with_fallback(other, DEFAULT_OPERATOR_FLOOR)
    }

    /// Composition via δ^i ∘ b = Σ_k C_i^k δ^k(b) δ^{i-k}. The result floor is
    /// max(floor(A) + top(B), top(A) + floor(B)); when both inputs are exact and
    /// the expansion does not terminate, `fallback` becomes the floor.
    pub fn compose_with_fallback(&self, other: &Self, fallback: i64) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let (na, nb) = (self.top_bound().unwrap(), other.top_bound().unwrap());
        let floor = floor_max(self.floor.map(|f| f + nb), other.floor.map(|f| f + na));
        let mut out = Self::new([], floor);
        let mut needs_floor = false;
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let mut d = b.clone();
                let mut k: u32 = 0;
                loop {
                    let deg = i + j - k as i64;
                    if floor.is_some_and(|f| deg < f) || (d.is_zero() && d.is_exact()) {
                        break;
                    }
                    if floor.is_none() && deg < fallback {
                        needs_floor = true;
                        break;
                    }
                    let c = binomial(*i, k);
                    if !c.is_zero() {
                        out.accumulate(deg, a.mul(&d).scale(&c));
                    }
                    if *i >= 0 && k as i64 >= *i {
                        break;
                    }
                    d = d.derive(VAR);
                    k += 1;
                }
            }
        }
        if needs_floor {
            out = out.with_floor(fallback);
        }
        out
    }

    /// (plus, minus): exponents ≥ 0 and < 0. The plus part is exact when the
    /// floor is ≤ 0.
    pub fn split(&self) -> (Self, Self) {
        let plus_floor = self.floor.filter(|f| *f > 0);
        let plus = Self::new(self.coeffs.range(0..).map(|(e, c)| (*e, c.clone())), plus_floor);
        let minus = Self::new(
            self.coeffs.range(..0).map(|(e, c)| (*e, c.clone())),
            self.floor.filter(|f| *f < 0).or(self.floor.map(|_| 0)),
        );
        (plus, minus)
    }

    pub fn plus(&self) -> Self {
        self.split().0
    }

    pub fn minus(&self) -> Self {
        self.split().1
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn power(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("operator power requires n >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.compose(self);
        }
        Ok(acc)
    }

    fn is_monic_unit(&self) -> bool {
        let lead_ok = self.coeffs.get(&0).is_some_and(|c| c.sub(&R::one()).is_zero());
        lead_ok && self.coeffs.range(1..).all(|(_, c)| c.is_zero())
    }

    /// Inverse of S ∈ 1 + R[[δ⁻¹]]δ⁻¹ by Neumann iteration S⁻¹ = Σ (1 - S)^k.
    pub fn monic_inverse(&self) -> Result<Self> {
        if !self.is_monic_unit() {
            return Err(Error::NotInvertible("operator is not of the form 1 + (negative-exponent part)".into()));
        }
        let tail = self.minus();
        if tail.is_exact_zero() {
            return Ok(Self::one());
        }
        let floor = self.floor.unwrap_or(DEFAULT_OPERATOR_FLOOR).min(0);
        let tail = tail.with_floor(floor);
        let one = Self::one();
        let mut inv = one.clone();
        for _ in 0..=(-floor) {
            inv = one.sub(&tail.compose_with_fallback(&inv, floor)).with_floor(floor);
        }
        Ok(inv)
    }

    /// Agreement on every coefficient known in both windows.
    pub fn agrees_with(&self, other: &Self) -> bool {
        DiffRing::is_zero(&self.sub(other))
    }
}

/// Terms from the top down, e.g. `(1)*d1^1 + (2*x^1)*d1^-1 + O(d1^-4)`.
impl<R: DiffRing + fmt::Display, const VAR: usize> fmt::Display for OperatorWindow<R, VAR> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = VAR + 1;
        let mut parts: Vec<String> = self.coeffs.iter().rev().map(|(e, c)| format!("({c})*d{d}^{e}")).collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        if let Some(fl) = self.floor {
            parts.push(format!("O(d{d}^{})", fl - 1));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl<R: DiffRing, const VAR: usize> DiffRing for OperatorWindow<R, VAR> {
    fn zero() -> Self {
        Self { coeffs: BTreeMap::new(), floor: None }
    }

    fn one() -> Self {
        Self::delta_pow(0)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.values().all(R::is_zero)
    }

    fn is_exact(&self) -> bool {
        self.floor.is_none() && self.coeffs.values().all(R::is_exact)
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = Self::new(self.coeffs.clone(), floor_max(self.floor, other.floor));
        for (e, c) in &other.coeffs {
            out.accumulate(*e, c.clone());
        }
        out
    }

    fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.neg())).collect(), floor: self.floor }
    }

    fn mul(&self, other: &Self) -> Self {
        self.compose(other)
    }

    fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|(e, v)| (*e, v.scale(c))), self.floor)
    }

    /// Coefficientwise derivation; for `var == VAR` this is ad δ.
    fn derive(&self, var: usize) -> Self {
        Self::new(self.coeffs.iter().map(|(e, c)| (*e, c.derive(var))), self.floor)
    }
}

pub fn compose<R: DiffRing, const V: usize>(
    a: &OperatorWindow<R, V>,
    b: &OperatorWindow<R, V>,
) -> OperatorWindow<R, V> {
    a.compose(b)
}

pub fn commutator<R: DiffRing, const V: usize>(
    a: &OperatorWindow<R, V>,
    b: &OperatorWindow<R, V>,
) -> OperatorWindow<R, V> {
    a.commutator(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::frac;
    use crate::series::TruncatedSeries;

    type Q1 = TruncatedSeries<1>;
    type Op = OperatorWindow<Q1>;

    fn x() -> Q1 {
        Q1::variable(0)
    }

    fn c(v: i64) -> Q1 {
        Q1::constant(int(v))
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(17, 0), int(1));
        assert_eq!(binomial(-5, 0), int(1));
        assert_eq!(binomial(-1, 1), int(-1));
        assert_eq!(binomial(-1, 2), int(1));
        assert_eq!(binomial(3, 2), int(3));
        assert_eq!(binomial(3, 4), int(0));
        assert_eq!(binomial(-2, 3), int(-4));
        assert_eq!(binomial(1, 1), frac(1, 1));
    }

    #[test]
    fn delta_commutes_with_x_by_derivative() {
        let d = Op::delta_pow(1);
        let xop = Op::scalar(x());
        assert_eq!(d.commutator(&xop), Op::one());
        // [δ², x] = 2δ
        assert_eq!(Op::delta_pow(2).commutator(&xop), Op::exact([(1, c(2))]));
    }

    #[test]
    fn inverse_delta_past_x() {
        let p = Op::delta_pow(-1).compose(&Op::scalar(x()));
        assert_eq!(p, Op::exact([(-1, x()), (-2, c(-1))]));
    }

    #[test]
    fn identity_and_split() {
        let a = Op::new([(2, c(1)), (1, x()), (-1, x())], Some(-6));
        assert_eq!(Op::one().compose(&a), a);
        let (p, m) = a.split();
        assert_eq!(p, Op::exact([(2, c(1)), (1, x())]));
        assert_eq!(m, Op::new([(-1, x())], Some(-6)));
        assert_eq!(p.add(&m), a);
        let (p, m) = Op::scalar(c(4)).split();
        assert_eq!(p, Op::scalar(c(4)));
        assert!(m.is_zero());
    }

    #[test]
    fn square_of_first_order_operator() {
        // (δ + a δ^{-1})^2 with a = x^2 at floor -2:
        // δ² + 2a + a' δ^{-1} + (a² - ... ) ; terms ≥ -1 are pinned
        let a = Q1::exact([([2], int(1))]);
        let l = Op::new([(1, c(1)), (-1, a.clone())], Some(-2));
        let sq = l.power(2).unwrap();
        assert_eq!(sq.floor(), Some(-1));
        assert_eq!(sq.coeff(2), Some(c(1)));
        assert_eq!(sq.coeff(1), Some(Q1::zero()));
        assert_eq!(sq.coeff(0), Some(a.scale(&int(2))));
        assert_eq!(sq.coeff(-1), Some(a.derive(0)));
        assert_eq!(sq.coeff(-2), None);
    }

    #[test]
    fn monic_inverse_examples() {
        assert_eq!(Op::one().monic_inverse().unwrap(), Op::one());
        let s = Op::new([(0, c(1)), (-1, x())], Some(-5));
        let inv = s.monic_inverse().unwrap();
        assert_eq!(inv.coeff(-1), Some(x().neg()));
        // second coefficient: a² + a'·C(-1,1)·(-1)... checked by composing back
        assert!(s.compose(&inv).agrees_with(&Op::one()));
        assert!(inv.compose(&s).agrees_with(&Op::one()));
        assert_eq!(inv.floor(), Some(-5));
        assert!(Op::exact([(1, c(1)), (0, c(1))]).monic_inverse().is_err());
    }

    #[test]
    fn exact_expansion_terminates_or_gets_floor() {
        let p = Op::delta_pow(-1).compose(&Op::scalar(x().mul(&x())));
        assert_eq!(p.floor(), None);
        assert_eq!(p.coeff(-3), Some(c(2)));
        let trunc = Q1::with_cap([([1], int(1))], Some(5));
        let q = Op::delta_pow(-1).compose(&Op::scalar(trunc));
        assert_eq!(q.floor(), Some(DEFAULT_OPERATOR_FLOOR));
    }
}
