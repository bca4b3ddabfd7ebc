//! Truncated exact series: power series over Q in a few variables, Laurent
//! windows in u, and bi-Laurent windows of k((u))((t)).
//!
//! Every window carries an explicit cap: coefficients at or beyond the cap are
//! unknown, never assumed zero. A cap of `None` means the value is exact.

mod bi;
mod laurent;
mod power;

use std::fmt::Debug;

pub use bi::{bi_mul, BiSeriesWindow, SeriesDoc, SeriesPrecision};
pub use laurent::LaurentWindow;
pub use power::{derivation_x, TruncatedSeries};

use crate::coefficients::Rational;

/// A commutative ring with distinguished derivations, as consumed by the
/// operator module. `derive(v)` is the v-th derivation; rings that do not
/// depend on variable `v` return zero. Leibniz holds exactly on every known
/// coefficient.
pub trait DiffRing: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    /// True when no nonzero coefficient is known (exact zero, or zero up to
    /// the element's own precision).
    fn is_zero(&self) -> bool;
    /// True when the element carries no truncation.
    fn is_exact(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn derive(&self, var: usize) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

pub(crate) fn cap_min(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

pub(crate) fn below(e: i64, cap: Option<i64>) -> bool {
    cap.is_none_or(|c| e < c)
}
