//! Exact scalars: arbitrary-precision rationals and the dual numbers k[ε]/(ε²).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Ground field scalar. `BigRational` keeps every value in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rational_arith(x: &Rational, y: &Rational, op: ArithOp) -> Result<Rational> {
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => {
            if y.is_zero() {
                return Err(Error::DivisionByZero);
            }
            x / y
        }
    })
}

/// "p/q", with "/q" omitted for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("malformed rational {s:?}"));
    match s.split_once('/') {
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Serde adapter storing a rational as its "p/q" string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QStr(pub Rational);

impl Serialize for QStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for QStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        match Raw::deserialize(d)? {
            Raw::S(s) => parse_rational(&s).map(QStr).map_err(serde::de::Error::custom),
            Raw::I(i) => Ok(QStr(int(i))),
        }
    }
}

/// a + bε with ε² = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualNumber {
    pub value: Rational,
    pub infinitesimal: Rational,
}

impl DualNumber {
    pub fn new(value: Rational, infinitesimal: Rational) -> Self {
        Self { value, infinitesimal }
    }

    pub fn from_value(value: Rational) -> Self {
        Self::new(value, Rational::zero())
    }

    pub fn zero() -> Self {
        Self::from_value(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_value(Rational::one())
    }

    pub fn epsilon() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero() && self.infinitesimal.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_zero()
    }

    /// (a + bε)⁻¹ = a⁻¹ − a⁻²bε.
    pub fn inverse(&self) -> Result<Self> {
        if self.value.is_zero() {
            return Err(Error::NotInvertible(format!("dual number {self} has zero value part")));
        }
        let inv = self.value.recip();
        let eps = -(&inv * &inv * &self.infinitesimal);
        Ok(Self::new(inv, eps))
    }
}

pub fn dual_inverse(x: &DualNumber) -> Result<DualNumber> {
    x.inverse()
}

impl fmt::Display for DualNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.infinitesimal.is_negative() { "-" } else { "+" };
        write!(f, "{} {} {}ε", format_rational(&self.value), sign, format_rational(&self.infinitesimal.abs()))
    }
}

impl Add for &DualNumber {
    type Output = DualNumber;
    fn add(self, o: &DualNumber) -> DualNumber {
        DualNumber::new(&self.value + &o.value, &self.infinitesimal + &o.infinitesimal)
    }
}

impl Sub for &DualNumber {
    type Output = DualNumber;
    fn sub(self, o: &DualNumber) -> DualNumber {
        DualNumber::new(&self.value - &o.value, &self.infinitesimal - &o.infinitesimal)
    }
}

impl Mul for &DualNumber {
    type Output = DualNumber;
    fn mul(self, o: &DualNumber) -> DualNumber {
        DualNumber::new(&self.value * &o.value, &self.value * &o.infinitesimal + &self.infinitesimal * &o.value)
    }
}

impl Neg for &DualNumber {
    type Output = DualNumber;
    fn neg(self) -> DualNumber {
        DualNumber::new(-&self.value, -&self.infinitesimal)
    }
}

#[derive(Serialize, Deserialize)]
struct DualDoc {
    v: QStr,
    eps: QStr,
}

impl Serialize for DualNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DualDoc { v: QStr(self.value.clone()), eps: QStr(self.infinitesimal.clone()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DualDoc::deserialize(d)?;
        Ok(DualNumber::new(doc.v.0, doc.eps.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fraction_addition() {
        let r = rational_arith(&frac(1, 2), &frac(1, 3), ArithOp::Add).unwrap();
        assert_eq!(r, frac(5, 6));
        let x = frac(-7, 12);
        assert_eq!(rational_arith(&x, &int(1), ArithOp::Mul).unwrap(), x);
        assert_eq!(rational_arith(&int(1), &int(0), ArithOp::Div), Err(Error::DivisionByZero));
    }

    #[test]
    fn lowest_terms() {
        let x = frac(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&x), "-3/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(parse_rational(" 10/4").unwrap(), frac(5, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn dual_inverse_examples() {
        let x = DualNumber::new(int(1), int(3));
        assert_eq!(dual_inverse(&x).unwrap(), DualNumber::new(int(1), int(-3)));
        let y = DualNumber::from_value(int(2));
        assert_eq!(dual_inverse(&y).unwrap(), DualNumber::from_value(frac(1, 2)));
        assert!(dual_inverse(&DualNumber::new(int(0), int(5))).is_err());
    }

    #[test]
    fn dual_serde() {
        let x = DualNumber::new(frac(1, 2), int(-3));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"v":"1/2","eps":"-3"}"#);
        let back: DualNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    fn rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(p, q)| frac(p, q))
    }

    fn dual() -> impl Strategy<Value = DualNumber> {
        (rat(), rat()).prop_map(|(a, b)| DualNumber::new(a, b))
    }

    proptest! {
        #[test]
        fn rational_reciprocal(x in rat()) {
            prop_assume!(!x.is_zero());
            prop_assert_eq!(rational_arith(&x, &x.recip(), ArithOp::Mul).unwrap(), int(1));
        }

        #[test]
        fn dual_inverse_is_two_sided(x in dual()) {
            prop_assume!(x.is_unit());
            let inv = x.inverse().unwrap();
            prop_assert_eq!(&x * &inv, DualNumber::one());
            prop_assert_eq!(&inv * &x, DualNumber::one());
        }

        #[test]
        fn dual_mul_commutative_associative(x in dual(), y in dual(), z in dual()) {
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        }
    }
}
