use num_traits::One;

use super::{scalar_times, vector, Decision, SparseVector, WindowedSubspace};
use crate::coefficients::Rational;
use crate::error::{Error, Result};
use crate::par;
use crate::series::{BiSeriesWindow, SeriesPrecision};

/// A pair (a, w) of representatives whose product was tested.
pub type Product = (SparseVector, SparseVector);

#[derive(Clone, Debug, PartialEq)]
pub struct SchurOutcome {
    /// No on a violation, Undecided when some product escapes the window,
    /// otherwise Yes.
    pub verdict: Decision,
    /// A pair (a, w) with a·w ∉ W.
    pub witness: Option<Product>,
    pub undecided: Vec<Product>,
    /// Whether A·A ⊂ A within the window.
    pub algebra_closed: Decision,
}

fn representatives(w: &WindowedSubspace) -> Vec<SparseVector> {
    let mut reps = w.generators();
    reps.extend(w.box_tail().map(|m| vector([(m, Rational::one())])));
    reps
}

fn check_products(a: &WindowedSubspace, w: &WindowedSubspace) -> (Decision, Option<Product>, Vec<Product>) {
    let a_reps = representatives(a);
    let w_reps = representatives(w);
    let per_a = par::map(&a_reps, |x| {
        let mut bad = None;
        let mut open = Vec::new();
        for y in &w_reps {
            match w.membership(&scalar_times(x, y)) {
                Decision::Yes => {}
                Decision::No => {
                    bad = Some((x.clone(), y.clone()));
                    break;
                }
                Decision::Undecided => open.push((x.clone(), y.clone())),
            }
        }
        (bad, open)
    });
    let mut witness = None;
    let mut undecided = Vec::new();
    for (bad, open) in per_a {
        if witness.is_none() {
            witness = bad;
        }
        undecided.extend(open);
    }
    let verdict = if witness.is_some() {
        Decision::No
    } else if !undecided.is_empty() {
        Decision::Undecided
    } else {
        Decision::Yes
    };
    (verdict, witness, undecided)
}

/// Checks A·W ⊂ W on generator and box-tail representatives.
pub fn schur_check(a: &WindowedSubspace, w: &WindowedSubspace) -> Result<SchurOutcome> {
    if a.rank() != 1 {
        return Err(Error::Invalid("the ring A must have rank 1".into()));
    }
    let (algebra_closed, _, _) = check_products(a, a);
    let (verdict, witness, undecided) = check_products(a, w);
    Ok(SchurOutcome { verdict, witness, undecided, algebra_closed })
}

/// a ∈ A₁ with a⁻¹ ∈ A₋₁, where A_j = A ∩ t^j·O₁.
pub fn condition_star_star(a_ring: &WindowedSubspace, a: &BiSeriesWindow, prec: SeriesPrecision) -> Decision {
    match a.t_order() {
        Ok(1) => {}
        _ => return Decision::No,
    }
    match a_ring.membership_series(a) {
        Decision::Yes => {}
        other => return other,
    }
    match a.inverse(prec) {
        Ok(inv) => a_ring.membership_series(&inv),
        Err(_) => Decision::No,
    }
}

/// (ord a, ord b, ord ab) for units of the field window.
pub fn ord_unit(a: &BiSeriesWindow, b: &BiSeriesWindow) -> Result<(i64, i64, i64)> {
    let ord = |x: &BiSeriesWindow| {
        x.t_order().map_err(|e| Error::NotInvertible(format!("not a unit of the field window: {e}")))
    };
    let (oa, ob) = (ord(a)?, ord(b)?);
    let oab = ord(&a.mul(b))?;
    Ok((oa, ob, oab))
}

#[cfg(test)]
mod tests {
    use super::super::{HighMode, LowMode, Mono, MonomialBox, TailProfile, Threshold};
    use super::*;
    use crate::coefficients::int;

    fn monomial_vector(t: i64, u: i64) -> SparseVector {
        vector([(Mono::new(t, u, 0), Rational::one())])
    }

    fn bx() -> MonomialBox {
        MonomialBox::new(-3, 3, -3, 3, 1).unwrap()
    }

    #[test]
    fn constants_act_trivially() {
        let one = WindowedSubspace::new(bx(), TailProfile::empty(&bx()), vec![monomial_vector(0, 0)]).unwrap();
        let w = WindowedSubspace::new(
            bx(),
            TailProfile::empty(&bx()),
            vec![monomial_vector(-1, -1), monomial_vector(1, 2)],
        )
        .unwrap();
        let r = schur_check(&one, &w).unwrap();
        assert_eq!(r.verdict, Decision::Yes);
        assert_eq!(r.algebra_closed, Decision::Yes);
    }

    #[test]
    fn shift_witness() {
        let a =
            WindowedSubspace::new(bx(), TailProfile::empty(&bx()), vec![monomial_vector(0, 0), monomial_vector(-1, 0)])
                .unwrap();
        let w = WindowedSubspace::new(bx(), TailProfile::empty(&bx()), vec![monomial_vector(-1, -1)]).unwrap();
        let r = schur_check(&a, &w).unwrap();
        assert_eq!(r.verdict, Decision::No);
        assert_eq!(r.witness, Some((monomial_vector(-1, 0), monomial_vector(-1, -1))));
        assert_eq!(r.algebra_closed, Decision::No);
    }

    #[test]
    fn shifted_tails_are_stable() {
        let a =
            WindowedSubspace::new(bx(), TailProfile::empty(&bx()), vec![monomial_vector(0, 0), monomial_vector(-1, 0)])
                .unwrap();
        // d(n) = -n, so d(n-1) >= d(n)
        let tail = TailProfile::from_modes(
            &bx(),
            LowMode::Affine { slope: -1, intercept: 0 },
            HighMode::Affine { slope: -1, intercept: 0 },
        );
        let w = WindowedSubspace::new(bx(), tail, vec![]).unwrap();
        assert_eq!(schur_check(&a, &w).unwrap().verdict, Decision::Yes);
    }

    #[test]
    fn star_star() {
        let full = TailProfile::uniform(&bx(), Threshold::Full, LowMode::Full, HighMode::Empty);
        let field = WindowedSubspace::new(bx(), full, vec![]).unwrap();
        let t = BiSeriesWindow::monomial(1, 0, int(1));
        let prec = SeriesPrecision::default();
        assert_eq!(condition_star_star(&field, &t, prec), Decision::Yes);
        let mut tail = TailProfile::empty(&bx());
        for n in 1..3 {
            tail.set(n, 0, Threshold::Full);
        }
        let ring = WindowedSubspace::new(bx(), tail, vec![monomial_vector(0, 0)]).unwrap();
        assert_eq!(condition_star_star(&ring, &t, prec), Decision::No);
        assert_eq!(condition_star_star(&field, &BiSeriesWindow::zero(), prec), Decision::No);
    }

    #[test]
    fn order_map() {
        let a = BiSeriesWindow::from_terms([(3, 0, int(1)), (3, 1, int(1))]);
        let b = BiSeriesWindow::monomial(-1, 2, int(1));
        assert_eq!(ord_unit(&a, &b).unwrap(), (3, -1, 2));
        assert_eq!(ord_unit(&BiSeriesWindow::one(), &b).unwrap(), (0, -1, -1));
        assert!(ord_unit(&BiSeriesWindow::zero(), &b).is_err());
    }
}
