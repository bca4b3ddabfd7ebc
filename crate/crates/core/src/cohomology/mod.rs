//! Picture cohomology of windowed subspaces, by the closed formulas and by
//! the explicit three-term complex
//! (W∩O₂) ⊕ (W∩O₁) ⊕ (O₁∩O₂) → W ⊕ O₂ ⊕ O₁ → K.

mod tangent;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coefficients::{int, Rational};
use crate::linalg::{projected_rank, rank, Echelon, SparseRow};
use crate::par;
use crate::subspace::{Dim, HighMode, LowMode, Mono, MonomialBox, Threshold, WindowedSubspace};

pub use tangent::{dual_number_splitting, split_dual_unit, tangent_report, DualSeries, Splitting, TangentReport};

/// Stability margin used when a report is produced.
pub const DEFAULT_MARGIN: i64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub h0: Dim,
    pub h1: Dim,
    pub h2: Dim,
}

impl Dims {
    pub fn all_finite(&self) -> bool {
        self.h0.is_finite() && self.h1.is_finite() && self.h2.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub h0: Dim,
    pub h1: Dim,
    pub h2: Dim,
    pub stable: bool,
    pub certified: bool,
}

impl CohomologyReport {
    pub fn dims(&self) -> Dims {
        Dims { h0: self.h0, h1: self.h1, h2: self.h2 }
    }
}

/// The regions of a monomial relative to O₁ = {t ≥ 0} and O₂ = {u ≥ 0}.
fn in_o1(m: &Mono) -> bool {
    m.t >= 0
}

fn in_o2(m: &Mono) -> bool {
    m.u >= 0
}

fn in_both(m: &Mono) -> bool {
    in_o1(m) && in_o2(m)
}

fn in_neither(m: &Mono) -> bool {
    !in_o1(m) && !in_o2(m)
}

fn times(d: Dim, r: usize) -> Dim {
    match d {
        Dim::Finite(x) => Dim::Finite(x * r as u64),
        Dim::Unbounded => Dim::Unbounded,
    }
}

/// Σ_{k ≥ 0} max(0, α + βk).
fn ray_sum(alpha: i64, beta: i64) -> Dim {
    if beta > 0 || (beta == 0 && alpha > 0) {
        return Dim::Unbounded;
    }
    let mut total = 0u64;
    let mut v = alpha;
    while v > 0 {
        total += v as u64;
        v += beta;
    }
    Dim::Finite(total)
}

/// Tail monomials with u ≥ 0 on the levels n ≥ `from`, per component.
fn above_nonnegative(mode: HighMode, from: i64) -> Dim {
    match mode {
        HighMode::Empty => Dim::Finite(0),
        HighMode::Affine { slope, intercept } => ray_sum(slope * from + intercept + 1, slope),
    }
}

/// Non-tail monomials with u < 0 on the levels n < `below`, per component.
fn below_negative_gap(mode: LowMode, below: i64) -> Dim {
    match mode {
        LowMode::Empty => Dim::Unbounded,
        LowMode::Full => Dim::Finite(0),
        LowMode::Affine { slope, intercept } => ray_sum(-1 - slope * (below - 1) - intercept, slope),
    }
}

/// Tail monomials with u ≥ 0 on the levels n < `below`, per component.
fn below_nonnegative(mode: LowMode, below: i64) -> Dim {
    match mode {
        LowMode::Empty => Dim::Finite(0),
        LowMode::Full => Dim::Unbounded,
        LowMode::Affine { slope, intercept } => ray_sum(slope * (below - 1) + intercept + 1, -slope),
    }
}

fn generator_rows(w: &WindowedSubspace) -> Vec<SparseRow> {
    w.echelon().rows().map(|(_, r)| r.clone()).collect()
}

/// dim(span(rows) ∩ coordinates satisfying `keep`).
fn dim_in(rows: &[SparseRow], keep: impl Fn(usize) -> bool) -> u64 {
    (rank(rows.iter().cloned()) - projected_rank(rows, |c| !keep(c))) as u64
}

/// Cohomology from the closed formulas: H⁰ = W∩O₁∩O₂, H¹ = W∩(O₁+O₂) modulo
/// W∩O₁ + W∩O₂, H² = K/(W+O₁+O₂). The tail is a coordinate subspace disjoint
/// from the reduced generators, so every space splits into a generator part
/// and a monomial count.
pub fn closed_form_dims(w: &WindowedSubspace) -> Dims {
    let bx = *w.bx();
    let tail = w.tail();
    let g = generator_rows(w);
    let col = |c: usize| bx.mono(c);

    let mut h0: Dim = (0..bx.t_hi)
        .flat_map(|n| (0..bx.rank).map(move |j| (n, j)))
        .map(|(n, j)| tail.threshold(n, j).nonnegative_count())
        .sum();
    h0 = h0 + times(above_nonnegative(tail.high, bx.t_hi), bx.rank);
    h0 = h0 + Dim::Finite(dim_in(&g, |c| in_both(&col(c))));

    let q1 = dim_in(&g, |c| in_o1(&col(c)));
    let q2 = dim_in(&g, |c| in_o2(&col(c)));
    let q12 = dim_in(&g, |c| in_both(&col(c)));
    let sum = dim_in(&g, |c| !in_neither(&col(c)));
    let h1 = Dim::Finite(sum - (q1 + q2 - q12));

    let mut h2: Dim = (bx.t_lo..0)
        .flat_map(|n| (0..bx.rank).map(move |j| (n, j)))
        .map(|(n, j)| tail.threshold(n, j).negative_gap())
        .sum();
    h2 = h2 + times(below_negative_gap(tail.low, bx.t_lo), bx.rank);
    if let Dim::Finite(x) = h2 {
        let r = projected_rank(&g, |c| in_neither(&col(c))) as u64;
        h2 = Dim::Finite(x - r);
    }
    Dims { h0, h1, h2 }
}

/// Spanning rows of W inside the box, from the raw generators and the box
/// tail.
fn raw_box_rows(w: &WindowedSubspace) -> Vec<SparseRow> {
    let bx = *w.bx();
    let mut rows: Vec<SparseRow> =
        w.raw_generators().iter().map(|g| g.iter().map(|(m, c)| (bx.index(m), c.clone())).collect()).collect();
    rows.extend(w.box_tail().map(|m| SparseRow::from([(bx.index(&m), Rational::one())])));
    rows
}

/// A basis of span(rows) ∩ {coordinates in S}: eliminate the columns outside
/// S first and keep the rows that survive inside S.
fn basis_within(rows: &[SparseRow], len: usize, in_s: impl Fn(usize) -> bool) -> Vec<SparseRow> {
    let key = |c: usize| if in_s(c) { c + len } else { c };
    let e = Echelon::from_rows(rows.iter().map(|r| r.iter().map(|(c, v)| (key(*c), v.clone())).collect()));
    e.rows().filter(|(p, _)| *p >= len).map(|(_, r)| r.iter().map(|(k, v)| (k - len, v.clone())).collect()).collect()
}

fn place(row: &SparseRow, block: usize, len: usize, sign: i64) -> impl Iterator<Item = (usize, Rational)> + '_ {
    row.iter().map(move |(c, v)| (block * len + c, v * int(sign)))
}

/// Contributions of monomials outside the box: each is its own one-monomial
/// complex, with H⁰ iff it lies in T∩O₁∩O₂ and H² iff it lies in neither W,
/// O₁ nor O₂.
fn outside_dims(bx: &MonomialBox, w: &WindowedSubspace) -> (Dim, Dim) {
    let tail = w.tail();
    let mut h0 = times(above_nonnegative(tail.high, bx.t_hi), bx.rank);
    let mut h2 = times(below_negative_gap(tail.low, bx.t_lo), bx.rank);
    for n in bx.t_lo..bx.t_hi {
        for j in 0..bx.rank {
            let th = tail.threshold(n, j);
            if n >= 0 {
                h0 = h0
                    + match th {
                        Threshold::None => Dim::Finite(0),
                        Threshold::At(d) => Dim::Finite((d - bx.u_hi + 1).max(0) as u64),
                        Threshold::Full => Dim::Unbounded,
                    };
            } else {
                h2 = h2
                    + match th {
                        Threshold::None => Dim::Unbounded,
                        Threshold::At(d) => Dim::Finite((bx.u_lo - 1 - d).max(0) as u64),
                        Threshold::Full => Dim::Finite(0),
                    };
            }
        }
    }
    (h0, h2)
}

/// Cohomology of the explicit complex: both boundary maps as matrices over
/// the box coordinates, plus the monomial contributions outside the box.
pub fn complex_dims(w: &WindowedSubspace) -> Dims {
    let bx = *w.bx();
    let len = bx.len();
    let col = |c: usize| bx.mono(c);
    let wrows = raw_box_rows(w);
    let w_o2 = basis_within(&wrows, len, |c| in_o2(&col(c)));
    let w_o1 = basis_within(&wrows, len, |c| in_o1(&col(c)));
    let q12: Vec<usize> = (0..len).filter(|c| in_both(&col(*c))).collect();
    let o2: Vec<usize> = (0..len).filter(|c| in_o2(&col(*c))).collect();
    let o1: Vec<usize> = (0..len).filter(|c| in_o1(&col(*c))).collect();
    let unit = |c: usize| SparseRow::from([(c, Rational::one())]);

    // d0: a0 ↦ (−a0, −a0, 0), a1 ↦ (a1, 0, −a1), a2 ↦ (0, a2, a2)
    let mut d0: Vec<SparseRow> = Vec::new();
    for b in &w_o2 {
        d0.push(place(b, 0, len, -1).chain(place(b, 1, len, -1)).collect());
    }
    for b in &w_o1 {
        d0.push(place(b, 0, len, 1).chain(place(b, 2, len, -1)).collect());
    }
    for &c in &q12 {
        let e = unit(c);
        d0.push(place(&e, 1, len, 1).chain(place(&e, 2, len, 1)).collect());
    }
    let dim_c0 = (w_o2.len() + w_o1.len() + q12.len()) as u64;

    // d1: (a01, a02, a12) ↦ a01 − a02 + a12 has image W + O₂ + O₁.
    let dim_w = rank(wrows.iter().cloned());
    let dim_c1 = (dim_w + o2.len() + o1.len()) as u64;
    let (rank_d0, rank_d1) = par::join(
        || rank(d0) as u64,
        || rank(wrows.iter().cloned().chain(o2.iter().chain(&o1).map(|&c| unit(c)))) as u64,
    );
    let h0_box = dim_c0 - rank_d0;
    let h1_box = dim_c1 - rank_d1 - rank_d0;
    let h2_box = len as u64 - rank_d1;
    let (h0_out, h2_out) = outside_dims(&bx, w);
    Dims { h0: Dim::Finite(h0_box) + h0_out, h1: Dim::Finite(h1_box), h2: Dim::Finite(h2_box) + h2_out }
}

fn report(w: &WindowedSubspace, dims: Dims) -> CohomologyReport {
    CohomologyReport {
        h0: dims.h0,
        h1: dims.h1,
        h2: dims.h2,
        stable: stability_probe(w, DEFAULT_MARGIN),
        certified: dims.all_finite(),
    }
}

pub fn picture_cohomology(w: &WindowedSubspace) -> CohomologyReport {
    report(w, closed_form_dims(w))
}

pub fn complex_cohomology(w: &WindowedSubspace) -> CohomologyReport {
    report(w, complex_dims(w))
}

/// Both routes, computed concurrently.
pub fn both_routes(w: &WindowedSubspace) -> (CohomologyReport, CohomologyReport) {
    par::join(|| picture_cohomology(w), || complex_cohomology(w))
}

/// Whether two windows give the same dimensions.
pub fn same_dims(a: &Dims, b: &Dims) -> bool {
    a == b
}

/// Recomputes both routes over the box enlarged by `margin` on all four sides.
pub fn stability_probe(w: &WindowedSubspace, margin: i64) -> bool {
    if margin <= 0 {
        return true;
    }
    let Ok(big) = w.enlarged(margin) else {
        return false;
    };
    let ((a, b), (c, d)) =
        par::join(|| (closed_form_dims(w), complex_dims(w)), || (closed_form_dims(&big), complex_dims(&big)));
    same_dims(&a, &c) && same_dims(&b, &d)
}

/// dim H¹ against dim (W∩(O₁+O₂))/(W∩O₁) − dim (W∩O₂)/(W∩O₁∩O₂).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CrossIdentity {
    pub h1: Dim,
    /// In-box part of (W∩(O₁+O₂))/(W∩O₁).
    pub first_quotient: u64,
    /// In-box part of (W∩O₂)/(W∩O₁∩O₂).
    pub second_quotient: u64,
    /// Tail monomials in O₂ \ O₁ outside the box, common to both quotients.
    pub outside: Dim,
    pub holds: bool,
}

pub fn pc_cross_identity(w: &WindowedSubspace) -> CrossIdentity {
    let bx = *w.bx();
    let col = |c: usize| bx.mono(c);
    let rows = raw_box_rows(w);
    let num1 = dim_in(&rows, |c| !in_neither(&col(c)));
    let den1 = dim_in(&rows, |c| in_o1(&col(c)));
    let num2 = dim_in(&rows, |c| in_o2(&col(c)));
    let den2 = dim_in(&rows, |c| in_both(&col(c)));
    let (first, second) = (num1 - den1, num2 - den2);
    let mut outside = times(below_nonnegative(w.tail().low, bx.t_lo), bx.rank);
    for n in bx.t_lo..0 {
        for j in 0..bx.rank {
            outside = outside
                + match w.tail().threshold(n, j) {
                    Threshold::None => Dim::Finite(0),
                    Threshold::At(d) => Dim::Finite((d - bx.u_hi + 1).max(0) as u64),
                    Threshold::Full => Dim::Unbounded,
                };
        }
    }
    let h1 = closed_form_dims(w).h1;
    let holds = h1.finite().is_some_and(|h| first >= second && h == first - second);
    CrossIdentity { h1, first_quotient: first, second_quotient: second, outside, holds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::int;
    use crate::subspace::{vector, TailProfile};

    fn bx() -> MonomialBox {
        MonomialBox::new(-3, 3, -3, 3, 1).unwrap()
    }

    #[test]
    fn single_generator() {
        let g = vector([(Mono::new(0, -1, 0), int(1)), (Mono::new(-1, 0, 0), int(1))]);
        let w = WindowedSubspace::new(bx(), TailProfile::empty(&bx()), vec![g]).unwrap();
        let (a, b) = both_routes(&w);
        assert_eq!(a, b);
        assert_eq!(a.h0, Dim::Finite(0));
        assert_eq!(a.h1, Dim::Finite(1));
        assert_eq!(a.h2, Dim::Unbounded);
        assert!(a.stable);
        let x = pc_cross_identity(&w);
        assert!(x.holds);
        assert_eq!((x.first_quotient, x.second_quotient), (1, 0));
    }

    #[test]
    fn zero_subspace() {
        let w = WindowedSubspace::zero(bx()).unwrap();
        let a = picture_cohomology(&w);
        assert_eq!((a.h0, a.h1, a.h2), (Dim::Finite(0), Dim::Finite(0), Dim::Unbounded));
        assert!(!a.certified);
        assert_eq!(complex_cohomology(&w).dims(), a.dims());
    }

    #[test]
    fn affine_tails_are_counted() {
        // d(n) = -n: h0 counts 0 <= a <= -n for n >= 0, i.e. just u^0 t^0;
        // h2 counts -n < a < 0 for n < 0, which is empty.
        let tail = TailProfile::from_modes(
            &bx(),
            LowMode::Affine { slope: -1, intercept: 0 },
            HighMode::Affine { slope: -1, intercept: 0 },
        );
        let w = WindowedSubspace::new(bx(), tail, vec![]).unwrap();
        let d = closed_form_dims(&w);
        assert_eq!(d, Dims { h0: Dim::Finite(1), h1: Dim::Finite(0), h2: Dim::Finite(0) });
        assert_eq!(complex_dims(&w), d);
        // above the box d(n) = 4 - n reaches past u_hi; below, d(-1) = -2 leaves u^-1
        let tail = TailProfile::from_modes(
            &bx(),
            LowMode::Affine { slope: -1, intercept: -3 },
            HighMode::Affine { slope: -1, intercept: 4 },
        );
        let w = WindowedSubspace::new(bx(), tail, vec![]).unwrap();
        let d = closed_form_dims(&w);
        assert_eq!(d.h0, Dim::Finite(5 + 4 + 3 + 2 + 1));
        assert_eq!(d.h2, Dim::Finite(1));
        assert_eq!(complex_dims(&w), d);
        assert!(stability_probe(&w, 2));
    }

    #[test]
    fn ray_sums() {
        assert_eq!(ray_sum(3, -1), Dim::Finite(6));
        assert_eq!(ray_sum(0, 0), Dim::Finite(0));
        assert_eq!(ray_sum(1, 0), Dim::Unbounded);
        assert_eq!(ray_sum(-5, 1), Dim::Unbounded);
    }
}
