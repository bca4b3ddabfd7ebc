//! Symbolic KP hierarchy over differential polynomials, and the
//! two-variable (Parshin) hierarchy over Q[[x1, x2]].

mod diffpoly;
mod kp;
mod parshin;

pub use diffpoly::{DiffPolyDoc, DiffPolynomial, DiffVar, EvolutionaryDerivation, Monomial};
pub use kp::{
    derive_kdv, derive_kp, generic_lax, kdv_at_zero, kdv_reduction, kp_flow, kp_with_coefficient, KdvReport,
    KpDerivation, SymbolicOperator, DEFAULT_DEPTH_CAP, PRINTED_KDV_COEFFICIENT,
};
pub use parshin::{
    apply_to_field, delta1_pow, delta2_pow, lift_field, operator_image, parshin_flow, two_var_monomial, Coefficient,
    InnerOperator, ParshinPair, TwoVarOperator, DEFAULT_DRESSING_FLOOR,
};
