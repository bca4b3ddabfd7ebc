use serde::Serialize;

use super::picture_cohomology;
use crate::coefficients::{frac, int, DualNumber, Rational};
use crate::error::{Error, Result};
use crate::series::{BiSeriesWindow, SeriesPrecision};
use crate::subspace::{schur_check, Decision, Dim, WindowedSubspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TangentReport {
    /// dim H¹(A), the kernel of the tangent map.
    pub pic_kernel_dim: Dim,
    /// dim H²(A), the tangent space of the formal Brauer group.
    pub brauer_dim: Dim,
    /// H¹(A) = 0.
    pub representable: Decision,
    pub fredholm: bool,
    pub schur: Decision,
}

pub fn tangent_report(a: &WindowedSubspace) -> Result<TangentReport> {
    if a.rank() != 1 {
        return Err(Error::Invalid("tangent report needs a rank-1 subspace".into()));
    }
    let coh = picture_cohomology(a);
    let representable = match coh.h1 {
        Dim::Finite(0) => Decision::Yes,
        Dim::Finite(_) => Decision::No,
        Dim::Unbounded => Decision::Undecided,
    };
    Ok(TangentReport {
        pic_kernel_dim: coh.h1,
        brauer_dim: coh.h2,
        representable,
        fredholm: a.fredholm_check().fredholm,
        schur: schur_check(a, a)?.verdict,
    })
}

/// value + ε·eps over k((u))((t)) ⊗ k[ε].
#[derive(Clone, Debug, PartialEq)]
pub struct DualSeries {
    pub value: BiSeriesWindow,
    pub eps: BiSeriesWindow,
}

impl DualSeries {
    pub fn new(value: BiSeriesWindow, eps: BiSeriesWindow) -> Self {
        Self { value, eps }
    }

    pub fn one() -> Self {
        Self::new(BiSeriesWindow::one(), BiSeriesWindow::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.value.add(&o.value), self.eps.add(&o.eps))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.value.scale(c), self.eps.scale(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.value.mul(&o.value), self.value.mul(&o.eps).add(&self.eps.mul(&o.value)))
    }

    pub fn coeff(&self, t: i64, u: i64) -> Option<DualNumber> {
        Some(DualNumber::new(self.value.coeff(t, u)?, self.eps.coeff(t, u)?))
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.value.agrees_with(&o.value) && self.eps.agrees_with(&o.eps)
    }

    /// Σ_{k<terms} x^k/k! for x with zero value part.
    fn exp_nilpotent(&self, terms: u32) -> Self {
        let mut acc = Self::one();
        let mut power = Self::one();
        let mut fact = int(1);
        for k in 1..terms {
            power = power.mul(self);
            fact *= int(k as i64);
            acc = acc.add(&power.scale(&fact.recip()));
        }
        acc
    }

    /// Σ_{1≤k<terms} (−1)^{k+1} x^k/k, the logarithm of 1 + x.
    fn log_one_plus(&self, terms: u32) -> Self {
        let mut acc = Self::new(BiSeriesWindow::zero(), BiSeriesWindow::zero());
        let mut power = Self::one();
        for k in 1..terms {
            power = power.mul(self);
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&power.scale(&frac(sign, k as i64)));
        }
        acc
    }
}

/// a = a₀·(1 + εb) with a₀ a unit over k.
#[derive(Clone, Debug, PartialEq)]
pub struct Splitting {
    pub unit: BiSeriesWindow,
    pub b: BiSeriesWindow,
}

pub fn split_dual_unit(a: &DualSeries, prec: SeriesPrecision) -> Result<Splitting> {
    let n = a.value.t_order().map_err(|_| Error::NotInvertible("value part has no leading term".into()))?;
    let lead_u = a
        .value
        .level(n)
        .and_then(|l| l.valuation())
        .ok_or_else(|| Error::NotInvertible("value part has no leading term".into()))?;
    let lead = a.coeff(n, lead_u).unwrap_or_else(DualNumber::zero);
    if !lead.is_unit() {
        return Err(Error::NotInvertible("leading coefficient is not a unit".into()));
    }
    let inv = a.value.inverse(prec)?;
    Ok(Splitting { unit: a.value.clone(), b: a.eps.mul(&inv) })
}

/// Checks A'^* = A^* × (1 + εA) on the given units: the factorization
/// recomposes to a, b lies in A, and exp/log of εb are 1 + εb and εb.
pub fn dual_number_splitting(a_ring: &WindowedSubspace, samples: &[DualSeries], prec: SeriesPrecision) -> bool {
    samples.iter().all(|a| {
        let Ok(s) = split_dual_unit(a, prec) else {
            return false;
        };
        let factor = DualSeries::new(BiSeriesWindow::one(), s.b.clone());
        let recomposed = DualSeries::new(s.unit.clone(), BiSeriesWindow::zero()).mul(&factor);
        if !recomposed.agrees_with(a) {
            return false;
        }
        if a_ring.membership_series(&s.b) != Decision::Yes {
            return false;
        }
        let eb = DualSeries::new(BiSeriesWindow::zero(), s.b.clone());
        let exp_ok = eb.exp_nilpotent(4).agrees_with(&factor);
        let log_ok = eb.log_one_plus(4).agrees_with(&eb);
        exp_ok && log_ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{HighMode, LowMode, MonomialBox, TailProfile, Threshold};

    fn full_ring() -> WindowedSubspace {
        let bx = MonomialBox::new(-4, 4, -4, 4, 1).unwrap();
        let tail = TailProfile::uniform(&bx, Threshold::Full, LowMode::Full, HighMode::Empty);
        WindowedSubspace::new(bx, tail, vec![]).unwrap()
    }

    #[test]
    fn splits_one_plus_u() {
        let value = BiSeriesWindow::from_terms([(0, 0, int(1)), (0, 1, int(1))]);
        let eps = BiSeriesWindow::monomial(1, 0, int(1));
        let a = DualSeries::new(value.clone(), eps);
        let prec = SeriesPrecision::default();
        let s = split_dual_unit(&a, prec).unwrap();
        assert_eq!(s.unit, value);
        assert_eq!(s.b.coeff(1, 0), Some(int(1)));
        assert_eq!(s.b.coeff(1, 1), Some(int(-1)));
        assert_eq!(s.b.coeff(1, 5), Some(int(-1)));
        assert!(dual_number_splitting(&full_ring(), &[a], prec));
    }

    #[test]
    fn rejects_non_units() {
        let a = DualSeries::new(BiSeriesWindow::zero(), BiSeriesWindow::one());
        assert!(split_dual_unit(&a, SeriesPrecision::default()).is_err());
        assert!(!dual_number_splitting(&full_ring(), &[a], SeriesPrecision::default()));
        let b = DualSeries::new(BiSeriesWindow::monomial(0, 2, int(3)), BiSeriesWindow::zero());
        assert!(split_dual_unit(&b, SeriesPrecision::default()).unwrap().b.is_exact_zero());
    }
}
