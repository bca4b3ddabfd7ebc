use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{below, cap_min, LaurentWindow};
use crate::coefficients::{format_rational, QStr, Rational};
use crate::error::{Error, Result};

/// Relative precision used when an operation would otherwise produce an
/// infinite expansion (inverses of non-monomial elements).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPrecision {
    /// u-terms computed past the leading u-exponent of each level.
    pub u_terms: i64,
    /// t-levels computed past the leading t-level.
    pub t_levels: i64,
}

impl Default for SeriesPrecision {
    fn default() -> Self {
        Self { u_terms: 16, t_levels: 8 }
    }
}

/// A window of k((u))((t)): per t-level a [`LaurentWindow`], levels at or
/// beyond `t_cap` unknown. Levels below the cap that are not stored are
/// exactly zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiSeriesWindow {
    levels: BTreeMap<i64, LaurentWindow>,
    t_cap: Option<i64>,
}

impl BiSeriesWindow {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Rational::one())
    }

    /// c · u^u_exp · t^t_exp
    pub fn monomial(t_exp: i64, u_exp: i64, c: Rational) -> Self {
        Self::from_terms([(t_exp, u_exp, c)])
    }

    /// Exact finite sum of (t-exponent, u-exponent, coefficient) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64, Rational)>) -> Self {
        let mut s = Self::zero();
        for (n, a, c) in terms {
            s.levels.entry(n).or_default().accumulate(a, c);
        }
        s.normalize();
        s
    }

    pub fn from_levels(levels: impl IntoIterator<Item = (i64, LaurentWindow)>, t_cap: Option<i64>) -> Self {
        let mut s = Self { levels: BTreeMap::new(), t_cap };
        for (n, l) in levels {
            if below(n, t_cap) {
                let merged = s.levels.get(&n).map_or(l.clone(), |old| old.add(&l));
                s.levels.insert(n, merged);
            }
        }
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        self.levels.retain(|_, l| !l.is_exact_zero());
    }

    pub fn t_cap(&self) -> Option<i64> {
        self.t_cap
    }

    pub fn levels(&self) -> impl Iterator<Item = (i64, &LaurentWindow)> {
        self.levels.iter().map(|(n, l)| (*n, l))
    }

    pub fn level(&self, n: i64) -> Option<LaurentWindow> {
        below(n, self.t_cap).then(|| self.levels.get(&n).cloned().unwrap_or_default())
    }

    /// Known nonzero terms as (t, u, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, &Rational)> {
        self.levels.iter().flat_map(|(n, l)| l.terms().map(move |(a, c)| (*n, a, c)))
    }

    pub fn coeff(&self, t_exp: i64, u_exp: i64) -> Option<Rational> {
        self.level(t_exp).and_then(|l| l.coeff(u_exp))
    }

    /// No nonzero coefficient is known.
    pub fn is_zero(&self) -> bool {
        self.levels.values().all(LaurentWindow::is_zero)
    }

    pub fn is_exact(&self) -> bool {
        self.t_cap.is_none() && self.levels.values().all(|l| l.cap().is_none())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.levels.is_empty() && self.t_cap.is_none()
    }

    /// The "no information" element: nothing nonzero is known and the value
    /// is not certified to be exactly zero.
    pub fn is_exhausted(&self) -> bool {
        self.is_zero() && !self.is_exact()
    }

    /// Levels whose u-window is truncated, with their caps.
    pub fn u_caps(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.levels.iter().filter_map(|(n, l)| l.cap().map(|c| (*n, c)))
    }

    fn lowest_level(&self) -> Option<i64> {
        self.levels.keys().next().copied()
    }

    fn order_bound(&self) -> Option<i64> {
        self.lowest_level().or(self.t_cap)
    }

    pub fn truncate(&self, t_cap: i64, u_cap: i64) -> Self {
        Self::from_levels(self.levels.iter().map(|(n, l)| (*n, l.truncate(u_cap))), cap_min(self.t_cap, Some(t_cap)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let t_cap = cap_min(self.t_cap, other.t_cap);
        let mut out: BTreeMap<i64, LaurentWindow> = BTreeMap::new();
        for (n, l) in self.levels.iter().chain(other.levels.iter()) {
            if below(*n, t_cap) {
                let merged = out.get(n).map_or(l.clone(), |old| old.add(l));
                out.insert(*n, merged);
            }
        }
        let mut s = Self { levels: out, t_cap };
        s.normalize();
        s
    }

    pub fn neg(&self) -> Self {
        Self { levels: self.levels.iter().map(|(n, l)| (*n, l.neg())).collect(), t_cap: self.t_cap }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut s = Self { levels: self.levels.iter().map(|(n, l)| (*n, l.scale(c))).collect(), t_cap: self.t_cap };
        s.normalize();
        s
    }

    /// Multiplication by u^du t^dt.
    pub fn shift(&self, dt: i64, du: i64) -> Self {
        Self {
            levels: self.levels.iter().map(|(n, l)| (n + dt, l.shift(du))).collect(),
            t_cap: self.t_cap.map(|c| c + dt),
        }
    }

    /// Agreement on every coefficient known in both windows.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let (va, vb) = (self.order_bound().unwrap(), other.order_bound().unwrap());
        let t_cap = cap_min(self.t_cap.map(|c| c + vb), other.t_cap.map(|c| c + va));
        let mut out: BTreeMap<i64, LaurentWindow> = BTreeMap::new();
        for (i, a) in &self.levels {
            for (j, b) in &other.levels {
                let n = i + j;
                if !below(n, t_cap) {
                    continue;
                }
                let p = a.mul(b);
                let merged = out.get(&n).map_or_else(|| p.clone(), |old| old.add(&p));
                out.insert(n, merged);
            }
        }
        let mut s = Self { levels: out, t_cap };
        s.normalize();
        s
    }

    /// Least t-exponent carrying a nonzero coefficient.
    pub fn t_order(&self) -> Result<i64> {
        for (n, l) in &self.levels {
            if !l.is_zero() {
                return Ok(*n);
            }
            if l.cap().is_some() {
                return Err(Error::UndefinedOrder(format!("t-level {n} is truncated before any nonzero coefficient")));
            }
        }
        Err(Error::UndefinedOrder("zero element has no t-order".into()))
    }

    /// Inverse in k((u))((t)). Leading level must have a known nonzero
    /// leading u-term.
    pub fn inverse(&self, prec: SeriesPrecision) -> Result<Self> {
        let v = self.t_order().map_err(|e| Error::NotInvertible(format!("no invertible leading term ({e})")))?;
        let lead = &self.levels[&v];
        let lead_inv = lead.inverse(prec.u_terms)?;
        let single_level = self.levels.len() == 1 && self.t_cap.is_none();
        if single_level {
            return Ok(Self::from_levels([(-v, lead_inv)], None));
        }
        let rel = self.t_cap.map_or(prec.t_levels, |c| (c - v).min(prec.t_levels));
        let neg_lead_inv = lead_inv.neg();
        let mut ys: Vec<LaurentWindow> = Vec::new();
        for m in 0..rel {
            if m == 0 {
                ys.push(lead_inv.clone());
                continue;
            }
            let mut acc = LaurentWindow::default();
            for k in 1..=m {
                if let Some(x) = self.levels.get(&(v + k)) {
                    acc = acc.add(&x.mul(&ys[(m - k) as usize]));
                }
            }
            ys.push(neg_lead_inv.mul(&acc));
        }
        Ok(Self::from_levels(ys.into_iter().enumerate().map(|(m, l)| (m as i64 - v, l)), Some(rel - v)))
    }

    /// All known coefficients lie in t-levels ≥ 0 (membership in k((u))[[t]]).
    pub fn in_t_nonnegative(&self) -> bool {
        self.levels.iter().all(|(n, l)| *n >= 0 || l.is_zero() && l.cap().is_none())
    }

    pub fn to_doc(&self) -> SeriesDoc {
        SeriesDoc {
            kind: Some("series".into()),
            terms: self.terms().map(|(n, a, c)| (n, a, QStr(c.clone()))).collect(),
            t_cap: self.t_cap,
            u_caps: self.u_caps().collect(),
        }
    }

    pub fn from_doc(doc: &SeriesDoc) -> Result<Self> {
        let mut levels: BTreeMap<i64, LaurentWindow> = BTreeMap::new();
        let caps: BTreeMap<i64, i64> = doc.u_caps.iter().copied().collect();
        for (n, cap) in &caps {
            levels.insert(*n, LaurentWindow::new([], Some(*cap)));
        }
        for (n, a, c) in &doc.terms {
            if !below(*n, doc.t_cap) {
                return Err(Error::Invalid(format!("term at t^{n} lies beyond t_cap")));
            }
            if caps.get(n).is_some_and(|cap| a >= cap) {
                return Err(Error::Invalid(format!("term u^{a} t^{n} lies beyond its level cap")));
            }
            levels.entry(*n).or_default().accumulate(*a, c.0.clone());
        }
        Ok(Self::from_levels(levels, doc.t_cap))
    }
}

pub fn bi_mul(x: &BiSeriesWindow, y: &BiSeriesWindow) -> BiSeriesWindow {
    x.mul(y)
}

/// Serialized form: `[t_exp, u_exp, "p/q"]` triples plus window fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub terms: Vec<(i64, i64, QStr)>,
    #[serde(default)]
    pub t_cap: Option<i64>,
    #[serde(default)]
    pub u_caps: Vec<(i64, i64)>,
}

impl fmt::Display for BiSeriesWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> =
            self.terms().map(|(n, a, c)| format!("{}*u^{a}*t^{n}", format_rational(c))).collect();
        for (n, c) in self.u_caps() {
            parts.push(format!("O(u^{c})*t^{n}"));
        }
        if let Some(c) = self.t_cap {
            parts.push(format!("O(t^{c})"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::int;

    fn m(t: i64, u: i64) -> BiSeriesWindow {
        BiSeriesWindow::monomial(t, u, int(1))
    }

    #[test]
    fn monomial_products() {
        let x = m(0, -1).add(&m(1, 0));
        let p = x.mul(&m(1, 0));
        assert_eq!(p, m(1, -1).add(&m(2, 0)));
        assert_eq!(x.mul(&BiSeriesWindow::one()), x);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(m(1, 0).inverse(SeriesPrecision::default()).unwrap(), m(-1, 0));
        let x = BiSeriesWindow::one().add(&m(1, 1));
        let inv = x.inverse(SeriesPrecision::default()).unwrap();
        assert_eq!(inv.t_cap(), Some(8));
        for k in 0..8 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(inv.coeff(k, k), Some(int(sign)));
        }
        assert!(x.mul(&inv).agrees_with(&BiSeriesWindow::one()));
        assert!(BiSeriesWindow::zero().inverse(SeriesPrecision::default()).is_err());
    }

    #[test]
    fn t_order_examples() {
        let x = m(3, 0).add(&m(3, 1));
        assert_eq!(x.t_order().unwrap(), 3);
        assert_eq!(m(0, -2).add(&m(1, 0)).t_order().unwrap(), 0);
        assert!(BiSeriesWindow::zero().t_order().is_err());
        let hidden = BiSeriesWindow::from_levels([(0, LaurentWindow::new([], Some(2)))], None).add(&m(1, 0));
        assert!(hidden.t_order().is_err());
    }

    #[test]
    fn doc_round_trip() {
        let x = BiSeriesWindow::one().add(&m(1, 1)).inverse(SeriesPrecision { u_terms: 3, t_levels: 3 }).unwrap();
        let doc = x.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back = BiSeriesWindow::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, x);
    }
}
