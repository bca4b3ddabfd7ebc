//! Sparse exact row echelon forms over Q.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::coefficients::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

/// Reduced row echelon form; each row is keyed by its pivot, the lowest
/// column it touches, and has coefficient 1 there and 0 at every other pivot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseRow>,
}

fn axpy(target: &mut SparseRow, scale: &Rational, row: &SparseRow) {
    for (c, v) in row {
        let slot = target.entry(*c).or_insert_with(Rational::zero);
        *slot -= scale * v;
        if slot.is_zero() {
            target.remove(c);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows(rows: impl IntoIterator<Item = SparseRow>) -> Self {
        let mut e = Self::new();
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseRow)> {
        self.rows.iter().map(|(p, r)| (*p, r))
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseRow) -> SparseRow {
        let mut out: SparseRow = v.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k, c.clone())).collect();
        let hits: Vec<usize> = out.keys().filter(|c| self.rows.contains_key(c)).copied().collect();
        for p in hits {
            if let Some(s) = out.get(&p).cloned() {
                axpy(&mut out, &s, &self.rows[&p]);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseRow) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; false when it was already there.
    pub fn insert(&mut self, v: SparseRow) -> bool {
        let mut r = self.reduce(&v);
        let Some((&p, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        for c in r.values_mut() {
            *c *= &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(s) = row.get(&p).cloned() {
                axpy(row, &s, &r);
            }
        }
        r.retain(|_, c| !c.is_zero());
        self.rows.insert(p, r);
        true
    }
}

pub fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    Echelon::from_rows(rows).rank()
}

/// Restriction of a row to the columns satisfying `keep`.
pub fn project(row: &SparseRow, keep: impl Fn(usize) -> bool) -> SparseRow {
    row.iter().filter(|(c, _)| keep(**c)).map(|(c, v)| (*c, v.clone())).collect()
}

/// Rank of the projection of `rows` onto the columns satisfying `keep`.
pub fn projected_rank<'a>(rows: impl IntoIterator<Item = &'a SparseRow>, keep: impl Fn(usize) -> bool) -> usize {
    rank(rows.into_iter().map(|r| project(r, &keep)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::int;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(c, v)| (c, int(v))).collect()
    }

    #[test]
    fn rank_and_membership() {
        let rows = vec![row(&[(0, 1), (1, 2)]), row(&[(1, 1), (2, 1)]), row(&[(0, 1), (1, 3), (2, 1)])];
        let e = Echelon::from_rows(rows);
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&row(&[(0, 2), (1, 5), (2, 1)])));
        assert!(!e.contains(&row(&[(2, 1)])));
    }

    #[test]
    fn reduced_form_is_order_independent() {
        let rows = vec![row(&[(0, 2), (3, 1)]), row(&[(1, 1), (3, -1)]), row(&[(0, 1), (1, 1), (2, 5)])];
        let a = Echelon::from_rows(rows.clone());
        let b = Echelon::from_rows(rows.into_iter().rev());
        assert_eq!(a, b);
    }

    #[test]
    fn projection_rank() {
        let rows = vec![row(&[(0, 1), (2, 1)]), row(&[(1, 1), (2, 1)])];
        assert_eq!(projected_rank(&rows, |c| c == 2), 1);
        assert_eq!(projected_rank(&rows, |c| c < 2), 2);
    }
}
