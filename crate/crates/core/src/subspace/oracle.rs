//! Brute-force checks of the slice machinery: they start from the raw
//! generators and the box tail, use a different column order, and never look
//! at the stored echelon form.

use num_traits::One;

use super::{Dim, LevelReport, Mono, MonomialBox, Threshold, WindowedSubspace};

use crate::coefficients::Rational;
use crate::linalg::{projected_rank, Echelon, SparseRow};

/// Spanning rows of W ∩ box, columns keyed by `key`.
fn box_rows(w: &WindowedSubspace, key: impl Fn(&Mono) -> usize) -> Vec<SparseRow> {
    let mut rows: Vec<SparseRow> =
        w.raw_generators().iter().map(|g| g.iter().map(|(m, c)| (key(m), c.clone())).collect()).collect();
    rows.extend(w.box_tail().map(|m| SparseRow::from([(key(&m), Rational::one())])));
    rows
}

fn dim_in_levels_from(w: &WindowedSubspace, n: i64) -> usize {
    let bx = *w.bx();
    let rows = box_rows(w, |m| bx.index(m));
    let total = Echelon::from_rows(rows.iter().cloned()).rank();
    total - projected_rank(&rows, |c| bx.mono(c).t < n)
}

/// dim (W ∩ tⁿO₁)/(W ∩ tⁿ⁺¹O₁) inside the box, from two intersections.
pub fn two_pass_slice_dim(w: &WindowedSubspace, n: i64) -> usize {
    dim_in_levels_from(w, n) - dim_in_levels_from(w, n + 1)
}

/// Per-component counts of tail monomials outside the box's u-range.
fn outside_counts(bx: &MonomialBox, th: Threshold) -> (Dim, Dim) {
    match th {
        Threshold::None => (Dim::Finite(0), Dim::Unbounded),
        Threshold::Full => (Dim::Unbounded, Dim::Finite(0)),
        Threshold::At(d) => {
            (Dim::Finite((d - bx.u_hi + 1).max(0) as u64), Dim::Finite((bx.u_lo - 1 - d).max(0) as u64))
        }
    }
}

/// (h0_n, h1_n) by writing down W(n) ∩ box as explicit vectors: echelonize
/// with the levels below n eliminated first, keep the rows living in levels
/// ≥ n, and project them to level n.
pub fn materialized_level_dims(w: &WindowedSubspace, n: i64) -> LevelReport {
    let bx = *w.bx();
    if !bx.contains_level(n) {
        return w.level_dims(n);
    }
    let len = bx.len();
    let key = |m: &Mono| {
        let rev = len - 1 - bx.index(m);
        if m.t < n {
            rev
        } else {
            len + rev
        }
    };
    let unkey = |k: usize| bx.mono(len - 1 - (k % len));
    let e = Echelon::from_rows(box_rows(w, key));
    let image: Vec<SparseRow> = e
        .rows()
        .filter(|(p, _)| *p >= len)
        .map(|(_, r)| r.iter().filter(|(k, _)| unkey(**k).t == n).map(|(k, v)| (*k, v.clone())).collect())
        .collect();
    let dim_image = Echelon::from_rows(image.iter().cloned()).rank() as u64;
    let neg_rank = projected_rank(&image, |k| unkey(k).u < 0) as u64;
    let neg_coords = (bx.u_lo..0).count() as u64 * bx.rank as u64;
    let mut h0 = Dim::Finite(dim_image - neg_rank);
    let mut h1 = Dim::Finite(neg_coords - neg_rank);
    for j in 0..bx.rank {
        let (a, b) = outside_counts(&bx, w.tail().threshold(n, j));
        h0 = h0 + a;
        h1 = h1 + b;
    }
    LevelReport { n, h0, h1 }
}
