use std::collections::BTreeMap;

use super::diffpoly::{DiffPolynomial, DiffVar, EvolutionaryDerivation};
use crate::coefficients::{frac, int, Rational};
use crate::error::{Error, Result};
use crate::par;
use crate::psdo::OperatorWindow;
use crate::series::DiffRing;

pub type SymbolicOperator = OperatorWindow<DiffPolynomial>;

/// Largest depth tried by the escalating derivations.
pub const DEFAULT_DEPTH_CAP: u32 = 12;

/// The coefficient of u''' printed for the reduced flow in the source
/// derivation; compared against the computed one in [`derive_kdv`].
pub const PRINTED_KDV_COEFFICIENT: i64 = 7;

fn a(i: u32, m: u32) -> DiffPolynomial {
    DiffPolynomial::var(i, m)
}

/// L = δ + a_1 δ⁻¹ + … + a_depth δ^{-depth}, unknown below δ^{-depth}.
pub fn generic_lax(depth: u32) -> SymbolicOperator {
    let mut terms = vec![(1, DiffPolynomial::one())];
    terms.extend((1..=depth).map(|i| (-(i as i64), a(i, 0))));
    OperatorWindow::new(terms, Some(-(depth as i64)))
}

/// The n-th KP flow D_n(L) = [(Lⁿ)₊, L], read off coefficientwise as
/// D_n(a_i) for every i the depth determines.
pub fn kp_flow(n: u32, depth: u32) -> Result<EvolutionaryDerivation> {
    if n == 0 {
        return Err(Error::Invalid("flow index must be >= 1".into()));
    }
    let lax = generic_lax(depth);
    let ln = lax.power(n)?;
    let (plus, _) = ln.split();
    if plus.floor().is_some() {
        return Err(Error::Precision(format!("depth {depth} does not determine (L^{n})+")));
    }
    let bracket = plus.commutator(&lax);
    if bracket.terms().any(|(e, c)| e >= 0 && !c.is_zero()) {
        return Err(Error::Invalid(format!("[(L^{n})+, L] has a nonnegative part")));
    }
    let mut images = BTreeMap::new();
    for i in 1..=depth {
        match bracket.coeff(-(i as i64)) {
            Some(c) => {
                images.insert(i, c);
            }
            None => break,
        }
    }
    if images.is_empty() {
        return Err(Error::Precision(format!("depth {depth} determines no coefficient of the flow D_{n}")));
    }
    Ok(EvolutionaryDerivation::new(images))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KpDerivation {
    pub depth: u32,
    pub u_t: DiffPolynomial,
    pub u_y: DiffPolynomial,
    pub u_yy: DiffPolynomial,
    /// ∂(4u_t − u''' − 12uu') − c·u_yy with the requested c.
    pub residual: DiffPolynomial,
}

impl KpDerivation {
    pub fn holds(&self) -> bool {
        self.residual.is_empty()
    }
}

fn kp_at_depth(depth: u32, yy_coefficient: &Rational) -> Result<KpDerivation> {
    let (d2, d3) = par::join(|| kp_flow(2, depth), || kp_flow(3, depth));
    let (d2, d3) = (d2?, d3?);
    let u = a(1, 0);
    let u_y = d2.apply(&u)?;
    let u_yy = d2.apply(&u_y)?;
    let u_t = d3.apply(&u)?;
    let inner = u_t.scale(&int(4)).sub(&a(1, 3)).sub(&u.mul(&a(1, 1)).scale(&int(12)));
    let residual = inner.derive(0).sub(&u_yy.scale(yy_coefficient));
    Ok(KpDerivation { depth, u_t, u_y, u_yy, residual })
}

/// Derives the KP equation for u = a_1 from the t_2 and t_3 flows,
/// increasing the depth until every coefficient needed is determined.
pub fn derive_kp(depth_cap: u32) -> Result<KpDerivation> {
    kp_with_coefficient(&int(3), depth_cap)
}

/// As [`derive_kp`], but with `c` in place of the coefficient 3 of u_yy.
pub fn kp_with_coefficient(c: &Rational, depth_cap: u32) -> Result<KpDerivation> {
    let mut last = None;
    for depth in 1..=depth_cap {
        match kp_at_depth(depth, c) {
            Ok(d) => return Ok(d),
            Err(e @ Error::Precision(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Precision("depth cap is zero".into())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KdvReport {
    pub depth: u32,
    /// 4u_t after imposing (L²)₋ = 0.
    pub evolution: DiffPolynomial,
    /// c in 4u_t = c·u''' + e·uu'.
    pub third_derivative_coefficient: Rational,
    /// e in 4u_t = c·u''' + e·uu'.
    pub nonlinear_coefficient: Rational,
    pub printed_coefficient: Rational,
    pub matches_printed: bool,
}

/// Solves (L²)₋ = 0 for a_2, …, a_depth in terms of u = a_1.
pub fn kdv_reduction(depth: u32) -> Result<BTreeMap<u32, DiffPolynomial>> {
    let lax = generic_lax(depth);
    let sq = lax.power(2)?;
    let mut sigma = BTreeMap::new();
    for k in 1..depth {
        let c = sq.coeff(-(k as i64)).ok_or_else(|| Error::Precision(format!("(L^2) unknown at degree -{k}")))?;
        let lead = vec![(DiffVar { index: k + 1, order: 0 }, 1)];
        if c.coeff(&lead) != int(2) {
            return Err(Error::Invalid(format!("(L^2) at degree -{k} is not 2 a{} + ...", k + 1)));
        }
        let rest = c.sub(&DiffPolynomial::from_terms([(lead, int(2))]));
        let solved = rest.substitute(&sigma).scale(&frac(-1, 2));
        sigma.insert(k + 1, solved);
    }
    Ok(sigma)
}

/// Imposes L² = (L²)₊ on the t_3 flow and reads off the KdV coefficients.
pub fn derive_kdv(depth: u32) -> Result<KdvReport> {
    let sigma = kdv_reduction(depth)?;
    let d3 = kp_flow(3, depth)?;
    let u_t = d3.image(1).ok_or_else(|| Error::Precision("D_3(a1) not determined".into()))?;
    let evolution = u_t.substitute(&sigma).scale(&int(4));
    let uppp = vec![(DiffVar { index: 1, order: 3 }, 1)];
    let uup = vec![(DiffVar { index: 1, order: 0 }, 1), (DiffVar { index: 1, order: 1 }, 1)];
    let c = evolution.coeff(&uppp);
    let e = evolution.coeff(&uup);
    let fitted = DiffPolynomial::from_terms([(uppp, c.clone()), (uup, e.clone())]);
    if !evolution.sub(&fitted).is_empty() {
        return Err(Error::Invalid(format!("reduced t_3 flow is not of the form c u''' + e u u': {evolution}")));
    }
    let printed = int(PRINTED_KDV_COEFFICIENT);
    Ok(KdvReport {
        depth,
        evolution,
        matches_printed: c == printed,
        third_derivative_coefficient: c,
        nonlinear_coefficient: e,
        printed_coefficient: printed,
    })
}

/// Value of 4u_t at the zero solution.
pub fn kdv_at_zero(report: &KdvReport) -> Rational {
    report.evolution.constant_term()
}
