use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::coefficients::{int, Rational};
use crate::error::{Error, Result};
use crate::psdo::{binomial, OperatorWindow};
use crate::series::{cap_min, BiSeriesWindow, DiffRing, LaurentWindow, TruncatedSeries};

/// Coefficients Q[[x1, x2]].
pub type Coefficient = TruncatedSeries<2>;
/// Operators in δ1 over Q[[x1, x2]].
pub type InnerOperator = OperatorWindow<Coefficient, 0>;
/// Operators in δ2 whose coefficients are δ1-operators: the ring E.
pub type TwoVarOperator = OperatorWindow<InnerOperator, 1>;

/// Outer floor used when dressing exact operators.
pub const DEFAULT_DRESSING_FLOOR: i64 = -4;

pub fn delta1_pow(e: i64) -> TwoVarOperator {
    TwoVarOperator::scalar(InnerOperator::delta_pow(e))
}

pub fn delta2_pow(e: i64) -> TwoVarOperator {
    TwoVarOperator::delta_pow(e)
}

/// The two-variable operator with a single coefficient c·x1^i x2^j δ1^a δ2^b.
pub fn two_var_monomial(c: Rational, x: [u32; 2], d1: i64, d2: i64) -> TwoVarOperator {
    let coeff = Coefficient::exact([(x, c)]);
    TwoVarOperator::exact([(d2, InnerOperator::exact([(d1, coeff)]))])
}

/// A commuting pair (L, M) in E, optionally with the dressing operator S such
/// that L = S⁻¹δ1S and M = S⁻¹δ2S.
#[derive(Clone, Debug, PartialEq)]
pub struct ParshinPair {
    pub l: TwoVarOperator,
    pub m: TwoVarOperator,
    pub dressing: Option<TwoVarOperator>,
}

impl ParshinPair {
    /// (δ1, δ2).
    pub fn trivial() -> Self {
        Self { l: delta1_pow(1), m: delta2_pow(1), dressing: Some(TwoVarOperator::one()) }
    }

    pub fn new(l: TwoVarOperator, m: TwoVarOperator) -> Self {
        Self { l, m, dressing: None }
    }

    /// Conjugates (δ1, δ2) by a monic S = 1 + (negative δ2-part).
    pub fn dress(s: &TwoVarOperator, floor: i64) -> Result<Self> {
        let s = if s.floor().is_none() { s.clone() } else { s.with_floor(floor) };
        let s_inv = s.with_floor(floor).monic_inverse()?;
        let conj = |x: &TwoVarOperator| {
            s_inv.compose_with_fallback(x, floor).compose_with_fallback(&s, floor).with_floor(floor)
        };
        Ok(Self { l: conj(&delta1_pow(1)), m: conj(&delta2_pow(1)), dressing: Some(s) })
    }

    /// [L, M] on the known window.
    pub fn bracket(&self) -> TwoVarOperator {
        self.l.commutator(&self.m)
    }

    pub fn is_commuting(&self) -> bool {
        DiffRing::is_zero(&self.bracket())
    }

    fn floor_hint(&self) -> i64 {
        [self.l.floor(), self.m.floor()].into_iter().flatten().max().unwrap_or(DEFAULT_DRESSING_FLOOR)
    }

    /// L^i M^j. Negative exponents need the dressing.
    pub fn monomial(&self, i: i64, j: i64) -> Result<TwoVarOperator> {
        let floor = self.floor_hint();
        if let Some(s) = self.dressing.as_ref().filter(|_| i < 0 || j < 0) {
            let s_inv = s.with_floor(floor).monic_inverse()?;
            let core = delta1_pow(i).compose_with_fallback(&delta2_pow(j), floor);
            return Ok(s_inv.compose_with_fallback(&core, floor).compose_with_fallback(s, floor).with_floor(floor));
        }
        if i < 0 || j < 0 {
            return Err(Error::Invalid(format!("L^{i} M^{j} needs a dressing operator for negative powers")));
        }
        let mut acc = TwoVarOperator::one();
        for _ in 0..i {
            acc = acc.compose_with_fallback(&self.l, floor);
        }
        for _ in 0..j {
            acc = acc.compose_with_fallback(&self.m, floor);
        }
        Ok(acc)
    }
}

/// Images (D L, D M) = ([(L^i M^j)₊, L], [(L^i M^j)₊, M]), the plus part
/// taken in δ2. With `alpha`, only pairs in the cone i ≤ α·j are accepted.
pub fn parshin_flow(
    pair: &ParshinPair,
    i: i64,
    j: i64,
    alpha: Option<&Rational>,
) -> Result<(TwoVarOperator, TwoVarOperator)> {
    if let Some(a) = alpha {
        if Rational::from_integer(i.into()) > a * Rational::from_integer(j.into()) {
            return Err(Error::Invalid(format!("({i}, {j}) lies outside the cone i <= {a} j")));
        }
    }
    let p = pair.monomial(i, j)?;
    let plus = p.plus();
    if plus.floor().is_some() {
        return Err(Error::Precision(format!("(L^{i} M^{j})+ is not determined at this precision")));
    }
    let floor = pair.floor_hint();
    let dl = plus.compose_with_fallback(&pair.l, floor).sub(&pair.l.compose_with_fallback(&plus, floor));
    let dm = plus.compose_with_fallback(&pair.m, floor).sub(&pair.m.compose_with_fallback(&plus, floor));
    Ok((dl, dm))
}

/// Σ c u^a t^n ↦ Σ c δ1^{-a} δ2^{-n}.
pub fn lift_field(f: &BiSeriesWindow) -> TwoVarOperator {
    let mut outer = Vec::new();
    for (n, level) in f.levels() {
        let terms: Vec<(i64, Coefficient)> =
            level.terms().map(|(a, c)| (-a, Coefficient::constant(c.clone()))).collect();
        let floor = level.cap().map(|c| 1 - c);
        outer.push((-n, InnerOperator::new(terms, floor)));
    }
    TwoVarOperator::new(outer, f.t_cap().map(|c| 1 - c))
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

/// The field element represented by an operator: x1^k x2^l δ1^α δ2^β maps to
/// (−1)^{k+l} C(α,k) C(β,l) k! l! u^{k−α} t^{l−β}.
pub fn operator_image(op: &TwoVarOperator) -> Result<BiSeriesWindow> {
    let mut t_cap = op.floor().map(|f| 1 - f);
    let mut level_caps: Vec<(i64, i64)> = Vec::new();
    let mut acc: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
    for (beta, inner) in op.terms() {
        if let Some(f1) = inner.floor() {
            level_caps.push((-beta, 1 - f1));
        }
        for (alpha, p) in inner.terms() {
            if p.cap().is_some() {
                return Err(Error::Precision("operator coefficient is not an exact polynomial".into()));
            }
            for (&[k, l], c) in p.terms() {
                let sign = if (k + l) % 2 == 0 { int(1) } else { int(-1) };
                let w = sign * binomial(alpha, k) * binomial(beta, l) * factorial(k) * factorial(l) * c;
                if !w.is_zero() {
                    *acc.entry((l as i64 - beta, k as i64 - alpha)).or_insert_with(Rational::zero) += w;
                }
            }
        }
    }
    if t_cap.is_none() && !level_caps.is_empty() {
        let top = acc.keys().map(|(n, _)| *n).chain(level_caps.iter().map(|(n, _)| *n)).max().unwrap();
        t_cap = Some(top + 1);
    }
    let u_cap_at =
        |n: i64| level_caps.iter().filter(|(from, _)| n >= *from).fold(None, |c, (_, cap)| cap_min(c, Some(*cap)));
    let mut levels: BTreeMap<i64, LaurentWindow> = BTreeMap::new();
    for ((n, a), c) in acc {
        levels.entry(n).or_insert_with(|| LaurentWindow::new([], u_cap_at(n))).accumulate(a, c);
    }
    if let Some(tc) = t_cap {
        if let Some(lo) = level_caps.iter().map(|(n, _)| *n).min() {
            for n in lo..tc {
                levels.entry(n).or_insert_with(|| LaurentWindow::new([], u_cap_at(n)));
            }
        }
    }
    Ok(BiSeriesWindow::from_levels(levels, t_cap))
}

/// The action of E on k((u))((t)): A·f is the image of A∘f.
pub fn apply_to_field(a: &TwoVarOperator, f: &BiSeriesWindow) -> Result<BiSeriesWindow> {
    operator_image(&a.compose(&lift_field(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::frac;

    fn field(terms: &[(i64, i64, i64)]) -> BiSeriesWindow {
        BiSeriesWindow::from_terms(terms.iter().map(|&(n, a, c)| (n, a, int(c))))
    }

    #[test]
    fn basic_actions() {
        let one = BiSeriesWindow::one();
        assert_eq!(apply_to_field(&delta2_pow(-1), &one).unwrap(), field(&[(1, 0, 1)]));
        assert_eq!(apply_to_field(&delta1_pow(-1), &one).unwrap(), field(&[(0, 1, 1)]));
        assert_eq!(apply_to_field(&delta1_pow(1), &field(&[(0, 1, 1)])).unwrap(), one);
        let x1 = two_var_monomial(int(1), [1, 0], 0, 0);
        assert!(apply_to_field(&x1, &one).unwrap().is_exact_zero());
        // x1 acts as u^2 d/du
        assert_eq!(apply_to_field(&x1, &field(&[(0, 3, 1)])).unwrap(), field(&[(0, 4, 3)]));
        let x2 = two_var_monomial(int(1), [0, 1], 0, 0);
        assert_eq!(apply_to_field(&x2, &field(&[(2, 0, 1)])).unwrap(), field(&[(3, 0, 2)]));
    }

    #[test]
    fn action_is_multiplicative() {
        let a = two_var_monomial(int(2), [1, 0], -1, 0)
            .add(&two_var_monomial(int(1), [0, 1], 1, -1))
            .add(&two_var_monomial(frac(1, 3), [1, 1], 0, 0));
        let b = two_var_monomial(int(1), [0, 0], -2, 1).add(&two_var_monomial(int(-1), [2, 0], 0, -1));
        let f = field(&[(0, 0, 1), (1, -1, 2), (-1, 2, -3)]);
        let lhs = apply_to_field(&a.compose(&b), &f).unwrap();
        let rhs = apply_to_field(&a, &apply_to_field(&b, &f).unwrap()).unwrap();
        assert!(lhs.is_exact() && rhs.is_exact());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dressed_pair_commutes() {
        let s = TwoVarOperator::one().add(&two_var_monomial(int(1), [1, 0], -1, -1)).add(&two_var_monomial(
            int(2),
            [0, 1],
            0,
            -2,
        ));
        let pair = ParshinPair::dress(&s, -3).unwrap();
        assert!(pair.is_commuting());
        let (dl, dm) = parshin_flow(&pair, 1, 1, None).unwrap();
        let lhs = dl.commutator(&pair.m).add(&pair.l.commutator(&dm));
        assert!(DiffRing::is_zero(&lhs));
        assert!(parshin_flow(&pair, -1, 1, None).is_ok());
        assert!(parshin_flow(&ParshinPair::new(pair.l.clone(), pair.m.clone()), -1, 1, None).is_err());
        assert!(parshin_flow(&pair, 3, 1, Some(&int(2))).is_err());
    }

    #[test]
    fn trivial_pair_is_stationary() {
        let (dl, dm) = parshin_flow(&ParshinPair::trivial(), 2, 1, None).unwrap();
        assert!(DiffRing::is_zero(&dl) && DiffRing::is_zero(&dm));
    }
}
