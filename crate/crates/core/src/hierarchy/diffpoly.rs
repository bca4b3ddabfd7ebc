use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::{format_rational, int, QStr, Rational};
use crate::error::{Error, Result};
use crate::series::DiffRing;

/// The indeterminate a_index^{(order)}: the order-th x-derivative of the
/// index-th coefficient of L.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiffVar {
    pub index: u32,
    pub order: u32,
}

/// Sorted (variable, power) list with positive powers.
pub type Monomial = Vec<(DiffVar, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<DiffVar, u32> = a.iter().copied().collect();
    for (v, p) in b {
        *out.entry(*v).or_insert(0) += p;
    }
    out.into_iter().collect()
}

/// Element of Q{a_1, a_2, …} with the derivation ∂ a_i^{(m)} = a_i^{(m+1)}.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPolynomial {
    pub fn constant(c: Rational) -> Self {
        let mut p = Self::default();
        p.accumulate(Vec::new(), c);
        p
    }

    /// a_index^{(order)}
    pub fn var(index: u32, order: u32) -> Self {
        let mut p = Self::default();
        p.accumulate(vec![(DiffVar { index, order }, 1)], Rational::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::default();
        for (m, c) in terms {
            let canon: BTreeMap<DiffVar, u32> =
                m.into_iter().filter(|(_, e)| *e > 0).fold(BTreeMap::new(), |mut acc, (v, e)| {
                    *acc.entry(v).or_insert(0) += e;
                    acc
                });
            p.accumulate(canon.into_iter().collect(), c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Value with every a_i^{(m)} set to zero.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&Vec::new())
    }

    /// Largest coefficient index occurring.
    pub fn max_index(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v.index)).max().unwrap_or(0)
    }

    fn accumulate(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// ∂^k
    pub fn derive_n(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derive(0))
    }

    /// Replace every a_i^{(m)} by ∂^m σ(a_i); indices absent from σ stay.
    pub fn substitute(&self, sigma: &BTreeMap<u32, DiffPolynomial>) -> Self {
        let mut cache: HashMap<DiffVar, DiffPolynomial> = HashMap::new();
        let mut out = Self::default();
        for (m, c) in &self.terms {
            let mut acc = Self::constant(c.clone());
            for (v, p) in m {
                let image = cache
                    .entry(*v)
                    .or_insert_with(|| match sigma.get(&v.index) {
                        Some(s) => s.derive_n(v.order),
                        None => Self::var(v.index, v.order),
                    })
                    .clone();
                acc = acc.mul(&image.pow(*p));
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn to_doc(&self) -> DiffPolyDoc {
        DiffPolyDoc(
            self.terms
                .iter()
                .map(|(m, c)| {
                    let desc = m.iter().map(|(v, p)| (v.index, v.order, *p)).collect();
                    (desc, QStr(c.clone()))
                })
                .collect(),
        )
    }

    pub fn from_doc(doc: &DiffPolyDoc) -> Result<Self> {
        let mut terms = Vec::new();
        for (desc, c) in &doc.0 {
            let mut m = Vec::new();
            for &(index, order, power) in desc {
                if index == 0 {
                    return Err(Error::Invalid("coefficient index must be >= 1".into()));
                }
                m.push((DiffVar { index, order }, power));
            }
            terms.push((m, c.0.clone()));
        }
        Ok(Self::from_terms(terms))
    }
}

/// `[i, m, power]`: the factor (a_i^(m))^power.
pub type FactorDoc = (u32, u32, u32);

/// `[[[i, m, power], …], "p/q"]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffPolyDoc(pub Vec<(Vec<FactorDoc>, QStr)>);

impl DiffRing for DiffPolynomial {
    fn zero() -> Self {
        Self::default()
    }

    fn one() -> Self {
        Self::constant(Rational::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.accumulate(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::default();
        for (m, v) in &self.terms {
            out.accumulate(m.clone(), v * c);
        }
        out
    }

    fn derive(&self, var: usize) -> Self {
        if var != 0 {
            return Self::zero();
        }
        let mut out = Self::default();
        for (m, c) in &self.terms {
            for (pos, (v, p)) in m.iter().enumerate() {
                let mut rest = m.clone();
                if *p == 1 {
                    rest.remove(pos);
                } else {
                    rest[pos].1 -= 1;
                }
                let bumped = vec![(DiffVar { index: v.index, order: v.order + 1 }, 1)];
                out.accumulate(mono_mul(&rest, &bumped), c * int(*p as i64));
            }
        }
        out
    }
}

impl fmt::Display for DiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = format_rational(c);
                for (v, p) in m {
                    s.push('*');
                    s.push_str(&format!("a{}", v.index));
                    if v.order > 0 {
                        s.push_str(&format!("^({})", v.order));
                    }
                    if *p > 1 {
                        s.push_str(&format!("**{p}"));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A derivation D on Q{a_i} commuting with ∂, given by D(a_i) for the
/// indices it determines.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EvolutionaryDerivation {
    images: BTreeMap<u32, DiffPolynomial>,
}

impl EvolutionaryDerivation {
    pub fn new(images: BTreeMap<u32, DiffPolynomial>) -> Self {
        Self { images }
    }

    pub fn image(&self, index: u32) -> Option<&DiffPolynomial> {
        self.images.get(&index)
    }

    pub fn images(&self) -> impl Iterator<Item = (u32, &DiffPolynomial)> {
        self.images.iter().map(|(i, p)| (*i, p))
    }

    /// Highest index whose image is determined.
    pub fn depth(&self) -> u32 {
        self.images.keys().next_back().copied().unwrap_or(0)
    }

    /// D(p) by the Leibniz rule with D(a_i^{(m)}) = ∂^m D(a_i).
    pub fn apply(&self, p: &DiffPolynomial) -> Result<DiffPolynomial> {
        let mut cache: HashMap<DiffVar, DiffPolynomial> = HashMap::new();
        let mut out = DiffPolynomial::zero();
        for (m, c) in p.terms() {
            for (pos, (v, pw)) in m.iter().enumerate() {
                if !cache.contains_key(v) {
                    let base = self.images.get(&v.index).ok_or_else(|| {
                        Error::Precision(format!("flow image of a{} is not determined at this depth", v.index))
                    })?;
                    cache.insert(*v, base.derive_n(v.order));
                }
                let mut rest = m.clone();
                if *pw == 1 {
                    rest.remove(pos);
                } else {
                    rest[pos].1 -= 1;
                }
                let factor = DiffPolynomial::from_terms([(rest, c * int(*pw as i64))]);
                out = out.add(&factor.mul(&cache[v]));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: u32, m: u32) -> DiffPolynomial {
        DiffPolynomial::var(i, m)
    }

    #[test]
    fn derivation_is_leibniz() {
        let p = a(1, 0).mul(&a(1, 0)).add(&a(2, 1).scale(&int(3)));
        let q = a(1, 2).mul(&a(3, 0)).add(&DiffPolynomial::constant(int(5)));
        let lhs = p.mul(&q).derive(0);
        let rhs = p.derive(0).mul(&q).add(&p.mul(&q.derive(0)));
        assert_eq!(lhs, rhs);
        assert_eq!(a(1, 0).pow(2).derive(0), a(1, 0).mul(&a(1, 1)).scale(&int(2)));
    }

    #[test]
    fn substitution_commutes_with_derivative() {
        let sigma = BTreeMap::from([(2, a(1, 1).scale(&int(-1)))]);
        let p = a(2, 1).mul(&a(1, 0));
        let lhs = p.substitute(&sigma).derive(0);
        let rhs = p.derive(0).substitute(&sigma);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivation_commutes_with_d() {
        let d = EvolutionaryDerivation::new(BTreeMap::from([
            (1, a(1, 3).add(&a(2, 0).mul(&a(1, 1)))),
            (2, a(1, 0).pow(2)),
        ]));
        let p = a(1, 2).mul(&a(2, 1)).add(&a(1, 0).pow(3));
        let lhs = d.apply(&p.derive(0)).unwrap();
        let rhs = d.apply(&p).unwrap().derive(0);
        assert_eq!(lhs, rhs);
        assert!(d.apply(&a(3, 0)).is_err());
    }

    #[test]
    fn doc_round_trip() {
        let p = a(1, 0).mul(&a(2, 3)).scale(&int(-7)).add(&DiffPolynomial::constant(int(2)));
        let json = serde_json::to_string(&p.to_doc()).unwrap();
        assert_eq!(json, r#"[[[],"2"],[[[1,0,1],[2,3,1]],"-7"]]"#);
        let back = DiffPolynomial::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
