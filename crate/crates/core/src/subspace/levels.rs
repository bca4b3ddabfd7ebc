use serde::Serialize;

use super::{Dim, HighMode, LowMode, SparseVector, Threshold, WindowedSubspace};
use crate::linalg::{projected_rank, rank, SparseRow};

/// W(n): tail thresholds at level n plus, inside the box, the level-n parts
/// of the echelon rows whose pivot sits at level n.
#[derive(Clone, Debug, PartialEq)]
pub enum Slice {
    Window { n: i64, thresholds: Vec<Threshold>, leading: Vec<SparseVector> },
    Boundary { n: i64, thresholds: Vec<Threshold> },
}

impl Slice {
    pub fn level(&self) -> i64 {
        match self {
            Slice::Window { n, .. } | Slice::Boundary { n, .. } => *n,
        }
    }

    pub fn thresholds(&self) -> &[Threshold] {
        match self {
            Slice::Window { thresholds, .. } | Slice::Boundary { thresholds, .. } => thresholds,
        }
    }

    /// Number of leading terms beyond the tail; `None` outside the box.
    pub fn extra_dim(&self) -> Option<usize> {
        match self {
            Slice::Window { leading, .. } => Some(leading.len()),
            Slice::Boundary { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub n: i64,
    pub h0: Dim,
    pub h1: Dim,
}

impl LevelReport {
    pub fn is_fredholm(&self) -> bool {
        self.h0.is_finite() && self.h1.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    pub description: String,
    pub fredholm: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FredholmReport {
    pub levels: Vec<LevelReport>,
    pub below: BoundaryReport,
    pub above: BoundaryReport,
    pub fredholm: bool,
}

fn low_report(mode: LowMode) -> BoundaryReport {
    match mode {
        LowMode::Empty => BoundaryReport {
            description: "empty: every lower level has (h0, h1) = (0, unbounded)".into(),
            fredholm: false,
        },
        LowMode::Full => BoundaryReport {
            description: "full: every lower level has (h0, h1) = (unbounded, 0)".into(),
            fredholm: false,
        },
        LowMode::Affine { slope, intercept } => BoundaryReport {
            description: format!(
                "affine d(n) = {slope}n + {intercept}: (h0, h1) = (max(0, d+1), max(0, -1-d)) per component"
            ),
            fredholm: true,
        },
    }
}

fn high_report(mode: HighMode) -> BoundaryReport {
    match mode {
        HighMode::Empty => BoundaryReport {
            description: "empty: every upper level has (h0, h1) = (0, unbounded)".into(),
            fredholm: false,
        },
        HighMode::Affine { slope, intercept } => BoundaryReport {
            description: format!(
                "affine d(n) = {slope}n + {intercept}: (h0, h1) = (max(0, d+1), max(0, -1-d)) per component"
            ),
            fredholm: true,
        },
    }
}

impl WindowedSubspace {
    fn thresholds_at(&self, n: i64) -> Vec<Threshold> {
        (0..self.rank()).map(|j| self.tail().threshold(n, j)).collect()
    }

    /// Echelon rows restricted to level n, for rows whose pivot is at n.
    fn leading_rows(&self, n: i64) -> Vec<SparseRow> {
        let bx = self.bx();
        self.echelon()
            .rows()
            .filter(|(p, _)| bx.mono(*p).t == n)
            .map(|(_, r)| r.iter().filter(|(c, _)| bx.mono(**c).t == n).map(|(c, v)| (*c, v.clone())).collect())
            .collect()
    }

    pub fn slice(&self, n: i64) -> Slice {
        let thresholds = self.thresholds_at(n);
        if !self.bx().contains_level(n) {
            return Slice::Boundary { n, thresholds };
        }
        let leading = self.leading_rows(n).iter().map(|r| self.row_vector(r)).collect();
        Slice::Window { n, thresholds, leading }
    }

    /// (dim W(n) ∩ k[[u]]^r, codim of W(n) + k[[u]]^r).
    pub fn level_dims(&self, n: i64) -> LevelReport {
        let thresholds = self.thresholds_at(n);
        let mut h0: Dim = thresholds.iter().map(|t| t.nonnegative_count()).sum();
        let mut h1: Dim = thresholds.iter().map(|t| t.negative_gap()).sum();
        if self.bx().contains_level(n) {
            let bx = *self.bx();
            let rows = self.leading_rows(n);
            let total = rank(rows.iter().cloned()) as u64;
            let neg = projected_rank(&rows, |c| bx.mono(c).u < 0) as u64;
            h0 = h0 + Dim::Finite(total - neg);
            if let Dim::Finite(g) = h1 {
                h1 = Dim::Finite(g - neg);
            }
        }
        LevelReport { n, h0, h1 }
    }

    pub fn fredholm_check(&self) -> FredholmReport {
        let bx = *self.bx();
        let levels: Vec<LevelReport> = (bx.t_lo..bx.t_hi).map(|n| self.level_dims(n)).collect();
        let below = low_report(self.tail().low);
        let above = high_report(self.tail().high);
        let fredholm = levels.iter().all(LevelReport::is_fredholm) && below.fredholm && above.fredholm;
        FredholmReport { levels, below, above, fredholm }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{vector, HighMode, LowMode, Mono, MonomialBox, TailProfile};
    use super::*;
    use crate::coefficients::int;

    fn bx() -> MonomialBox {
        MonomialBox::new(-2, 3, -4, 5, 1).unwrap()
    }

    #[test]
    fn slices_follow_the_quotient() {
        let g = vector([(Mono::new(0, -1, 0), int(1)), (Mono::new(1, 3, 0), int(1))]);
        let w = WindowedSubspace::new(bx(), TailProfile::empty(&bx()), vec![g]).unwrap();
        match w.slice(0) {
            Slice::Window { leading, .. } => {
                assert_eq!(leading, vec![vector([(Mono::new(0, -1, 0), int(1))])]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(w.slice(1).extra_dim(), Some(0));
        assert_eq!(w.slice(7).extra_dim(), None);
    }

    #[test]
    fn level_counts() {
        let mut tail = TailProfile::uniform(
            &bx(),
            Threshold::At(-1),
            LowMode::Affine { slope: 0, intercept: -1 },
            HighMode::Affine { slope: 0, intercept: -1 },
        );
        tail.set(0, 0, Threshold::At(-2));
        let g = vector([(Mono::new(0, 3, 0), int(1))]);
        let w = WindowedSubspace::new(bx(), tail, vec![g]).unwrap();
        assert_eq!(w.level_dims(0), LevelReport { n: 0, h0: Dim::Finite(1), h1: Dim::Finite(1) });
        assert_eq!(w.level_dims(1), LevelReport { n: 1, h0: Dim::Finite(0), h1: Dim::Finite(0) });
        assert!(w.fredholm_check().fredholm);

        let z = WindowedSubspace::zero(bx()).unwrap();
        let r = z.fredholm_check();
        assert_eq!(r.levels[0].h1, Dim::Unbounded);
        assert!(!r.fredholm);
    }
}
