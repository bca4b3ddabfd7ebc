//! Windowed subspaces W ⊂ k((u))((t))^⊕r: exact generators inside a finite
//! monomial box plus a downward-closed monomial tail extrapolated past the box
//! by boundary modes.

mod levels;
mod oracle;
mod schur;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coefficients::Rational;
use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};
use crate::series::BiSeriesWindow;

pub use levels::{BoundaryReport, FredholmReport, LevelReport, Slice};
pub use oracle::{materialized_level_dims, two_pass_slice_dim};
pub use schur::{condition_star_star, ord_unit, schur_check, SchurOutcome};

/// The monomial u^u t^t e_comp. Ordered by t, then u, then component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mono {
    pub t: i64,
    pub u: i64,
    pub comp: usize,
}

impl Mono {
    pub fn new(t: i64, u: i64, comp: usize) -> Self {
        Self { t, u, comp }
    }
}

pub type SparseVector = BTreeMap<Mono, Rational>;

pub fn vector(terms: impl IntoIterator<Item = (Mono, Rational)>) -> SparseVector {
    let mut v = SparseVector::new();
    for (m, c) in terms {
        let slot = v.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            v.remove(&m);
        }
    }
    v
}

/// Exact scalar series as a vector in component 0.
pub fn vector_from_series(s: &BiSeriesWindow) -> Result<SparseVector> {
    if !s.is_exact() {
        return Err(Error::Precision("series is not exact".into()));
    }
    Ok(vector(s.terms().map(|(t, u, c)| (Mono::new(t, u, 0), c.clone()))))
}

pub fn series_from_vector(v: &SparseVector) -> Result<BiSeriesWindow> {
    if v.keys().any(|m| m.comp != 0) {
        return Err(Error::Invalid("vector has components beyond the first".into()));
    }
    Ok(BiSeriesWindow::from_terms(v.iter().map(|(m, c)| (m.t, m.u, c.clone()))))
}

/// Product of a scalar series (component 0) with a vector.
pub fn scalar_times(a: &SparseVector, w: &SparseVector) -> SparseVector {
    let mut out = SparseVector::new();
    for (ma, ca) in a {
        for (mw, cw) in w {
            let m = Mono::new(ma.t + mw.t, ma.u + mw.u, mw.comp);
            let slot = out.entry(m).or_insert_with(Rational::zero);
            *slot += ca * cw;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A dimension that may be unbounded in the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dim {
    Finite(u64),
    Unbounded,
}

impl Dim {
    pub fn finite(self) -> Option<u64> {
        match self {
            Dim::Finite(d) => Some(d),
            Dim::Unbounded => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dim::Finite(_))
    }

    pub fn is_zero(self) -> bool {
        self == Dim::Finite(0)
    }
}

impl std::ops::Add for Dim {
    type Output = Dim;
    fn add(self, o: Dim) -> Dim {
        match (self, o) {
            (Dim::Finite(a), Dim::Finite(b)) => Dim::Finite(a + b),
            _ => Dim::Unbounded,
        }
    }
}

impl std::iter::Sum for Dim {
    fn sum<I: Iterator<Item = Dim>>(iter: I) -> Dim {
        iter.fold(Dim::Finite(0), |a, b| a + b)
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Finite(d) => write!(f, "{d}"),
            Dim::Unbounded => write!(f, "unbounded-in-window"),
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dim::Finite(d) => s.serialize_u64(*d),
            Dim::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Dim {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Dim::Finite(n)),
            Raw::S(s) if s == "unbounded" => Ok(Dim::Unbounded),
            Raw::S(s) => Err(serde::de::Error::custom(format!("expected integer or \"unbounded\", got {s:?}"))),
        }
    }
}

/// Tri-state answer for window-limited questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Undecided,
}

/// The finite window [t_lo, t_hi) × [u_lo, u_hi) × {0..rank}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialBox {
    pub t_lo: i64,
    pub t_hi: i64,
    pub u_lo: i64,
    pub u_hi: i64,
    pub rank: usize,
}

impl MonomialBox {
    pub fn new(t_lo: i64, t_hi: i64, u_lo: i64, u_hi: i64, rank: usize) -> Result<Self> {
        let b = Self { t_lo, t_hi, u_lo, u_hi, rank };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Invalid("box rank must be >= 1".into()));
        }
        if self.t_lo > -1 || self.t_hi < 1 || self.u_lo > -1 || self.u_hi < 1 {
            return Err(Error::Invalid(format!(
                "box must contain t and u exponents -1 and 0, got t in [{}, {}), u in [{}, {})",
                self.t_lo, self.t_hi, self.u_lo, self.u_hi
            )));
        }
        Ok(())
    }

    pub fn u_width(&self) -> usize {
        (self.u_hi - self.u_lo) as usize
    }

    pub fn t_width(&self) -> usize {
        (self.t_hi - self.t_lo) as usize
    }

    pub fn len(&self) -> usize {
        self.t_width() * self.u_width() * self.rank
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains_level(&self, n: i64) -> bool {
        (self.t_lo..self.t_hi).contains(&n)
    }

    pub fn contains(&self, m: &Mono) -> bool {
        self.contains_level(m.t) && (self.u_lo..self.u_hi).contains(&m.u) && m.comp < self.rank
    }

    /// Column of `m` in the monomial order.
    pub fn index(&self, m: &Mono) -> usize {
        (((m.t - self.t_lo) as usize * self.u_width()) + (m.u - self.u_lo) as usize) * self.rank + m.comp
    }

    pub fn mono(&self, idx: usize) -> Mono {
        let comp = idx % self.rank;
        let rest = idx / self.rank;
        let u = (rest % self.u_width()) as i64 + self.u_lo;
        let t = (rest / self.u_width()) as i64 + self.t_lo;
        Mono::new(t, u, comp)
    }

    pub fn monos(&self) -> impl Iterator<Item = Mono> + '_ {
        (0..self.len()).map(|i| self.mono(i))
    }

    pub fn enlarged(&self, margin: i64) -> Self {
        Self {
            t_lo: self.t_lo - margin,
            t_hi: self.t_hi + margin,
            u_lo: self.u_lo - margin,
            u_hi: self.u_hi + margin,
            rank: self.rank,
        }
    }
}

/// Tail threshold at one level and component: the tail holds u^a for a ≤ d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Threshold {
    None,
    At(i64),
    Full,
}

impl Threshold {
    pub fn covers(self, a: i64) -> bool {
        match self {
            Threshold::None => false,
            Threshold::At(d) => a <= d,
            Threshold::Full => true,
        }
    }

    /// #{0 ≤ a ≤ d}
    pub fn nonnegative_count(self) -> Dim {
        match self {
            Threshold::None => Dim::Finite(0),
            Threshold::At(d) => Dim::Finite((d + 1).max(0) as u64),
            Threshold::Full => Dim::Unbounded,
        }
    }

    /// #{a < 0 : a > d}
    pub fn negative_gap(self) -> Dim {
        match self {
            Threshold::None => Dim::Unbounded,
            Threshold::At(d) => Dim::Finite((-1 - d).max(0) as u64),
            Threshold::Full => Dim::Finite(0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LowMode {
    Empty,
    Full,
    Affine { slope: i64, intercept: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HighMode {
    Empty,
    Affine { slope: i64, intercept: i64 },
}

impl LowMode {
    pub fn at(self, n: i64) -> Threshold {
        match self {
            LowMode::Empty => Threshold::None,
            LowMode::Full => Threshold::Full,
            LowMode::Affine { slope, intercept } => Threshold::At(slope * n + intercept),
        }
    }
}

impl HighMode {
    pub fn at(self, n: i64) -> Threshold {
        match self {
            HighMode::Empty => Threshold::None,
            HighMode::Affine { slope, intercept } => Threshold::At(slope * n + intercept),
        }
    }
}

/// Thresholds inside the box (indexed by level, then component) and the
/// modes extrapolating them below and above it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TailProfile {
    pub t_lo: i64,
    pub levels: Vec<Vec<Threshold>>,
    pub low: LowMode,
    pub high: HighMode,
}

impl TailProfile {
    /// No tail anywhere.
    pub fn empty(bx: &MonomialBox) -> Self {
        Self::uniform(bx, Threshold::None, LowMode::Empty, HighMode::Empty)
    }

    pub fn uniform(bx: &MonomialBox, th: Threshold, low: LowMode, high: HighMode) -> Self {
        Self { t_lo: bx.t_lo, levels: vec![vec![th; bx.rank]; bx.t_width()], low, high }
    }

    /// Box thresholds filled from the modes: the same line everywhere.
    pub fn from_modes(bx: &MonomialBox, low: LowMode, high: HighMode) -> Self {
        let levels = (bx.t_lo..bx.t_hi).map(|n| vec![if n < 0 { low.at(n) } else { high.at(n) }; bx.rank]).collect();
        Self { t_lo: bx.t_lo, levels, low, high }
    }

    pub fn threshold(&self, n: i64, comp: usize) -> Threshold {
        if n < self.t_lo {
            return self.low.at(n);
        }
        match self.levels.get((n - self.t_lo) as usize) {
            Some(row) => row[comp],
            None => self.high.at(n),
        }
    }

    pub fn covers(&self, m: &Mono) -> bool {
        self.threshold(m.t, m.comp).covers(m.u)
    }

    pub fn t_hi(&self) -> i64 {
        self.t_lo + self.levels.len() as i64
    }

    /// The same tail over a larger box, new levels taken from the modes.
    pub fn extended(&self, bx: &MonomialBox) -> Self {
        let levels = (bx.t_lo..bx.t_hi).map(|n| (0..bx.rank).map(|j| self.threshold(n, j)).collect()).collect();
        Self { t_lo: bx.t_lo, levels, low: self.low, high: self.high }
    }

    pub fn set(&mut self, n: i64, comp: usize, th: Threshold) {
        self.levels[(n - self.t_lo) as usize][comp] = th;
    }
}

/// W = span(generators) + span(tail monomials).
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedSubspace {
    bx: MonomialBox,
    tail: TailProfile,
    raw: Vec<SparseVector>,
    echelon: Echelon,
}

impl WindowedSubspace {
    pub fn new(bx: MonomialBox, tail: TailProfile, generators: Vec<SparseVector>) -> Result<Self> {
        bx.validate()?;
        if tail.t_lo != bx.t_lo
            || tail.levels.len() != bx.t_width()
            || tail.levels.iter().any(|row| row.len() != bx.rank)
        {
            return Err(Error::Invalid("tail thresholds do not match the box shape".into()));
        }
        let mut echelon = Echelon::new();
        for (i, g) in generators.iter().enumerate() {
            let mut row = SparseRow::new();
            for (m, c) in g {
                if !bx.contains(m) {
                    return Err(Error::Invalid(format!(
                        "generator {i} has support u^{} t^{} e{} outside the box",
                        m.u, m.t, m.comp
                    )));
                }
                if !tail.covers(m) && !c.is_zero() {
                    row.insert(bx.index(m), c.clone());
                }
            }
            echelon.insert(row);
        }
        Ok(Self { bx, tail, raw: generators, echelon })
    }

    pub fn zero(bx: MonomialBox) -> Result<Self> {
        let tail = TailProfile::empty(&bx);
        Self::new(bx, tail, Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.bx.rank
    }

    pub fn bx(&self) -> &MonomialBox {
        &self.bx
    }

    pub fn tail(&self) -> &TailProfile {
        &self.tail
    }

    /// Generators as supplied.
    pub fn raw_generators(&self) -> &[SparseVector] {
        &self.raw
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    pub fn row_vector(&self, row: &SparseRow) -> SparseVector {
        row.iter().map(|(c, v)| (self.bx.mono(*c), v.clone())).collect()
    }

    /// Tail-reduced generators in reduced echelon form.
    pub fn generators(&self) -> Vec<SparseVector> {
        self.echelon.rows().map(|(_, r)| self.row_vector(r)).collect()
    }

    /// Tail monomials inside the box.
    pub fn box_tail(&self) -> impl Iterator<Item = Mono> + '_ {
        self.bx.monos().filter(|m| self.tail.covers(m))
    }

    /// The same subspace over a box enlarged by `margin`, the new levels'
    /// thresholds taken from the boundary modes.
    pub fn enlarged(&self, margin: i64) -> Result<Self> {
        let bx = self.bx.enlarged(margin);
        let tail = self.tail.extended(&bx);
        Self::new(bx, tail, self.raw.clone())
    }

    /// The same generators over another tail.
    pub fn with_tail(&self, tail: TailProfile) -> Result<Self> {
        Self::new(self.bx, tail, self.raw.clone())
    }

    pub fn membership(&self, v: &SparseVector) -> Decision {
        let mut row = SparseRow::new();
        for (m, c) in v {
            if c.is_zero() || self.tail.covers(m) {
                continue;
            }
            if m.comp >= self.bx.rank || !self.bx.contains(m) {
                return Decision::Undecided;
            }
            row.insert(self.bx.index(m), c.clone());
        }
        if self.echelon.contains(&row) {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    /// Membership of a scalar series window (rank 1). Unknown coefficients
    /// count as covered only at levels the tail fills completely.
    pub fn membership_series(&self, s: &BiSeriesWindow) -> Decision {
        if s.t_cap().is_some() {
            return Decision::Undecided;
        }
        for (n, _) in s.u_caps() {
            if self.tail.threshold(n, 0) != Threshold::Full {
                return Decision::Undecided;
            }
        }
        let v = vector(s.terms().map(|(t, u, c)| (Mono::new(t, u, 0), c.clone())));
        self.membership(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::int;

    fn small_box() -> MonomialBox {
        MonomialBox::new(-2, 3, -3, 4, 1).unwrap()
    }

    #[test]
    fn box_indexing_round_trips() {
        let b = MonomialBox::new(-2, 2, -1, 3, 2).unwrap();
        for i in 0..b.len() {
            assert_eq!(b.index(&b.mono(i)), i);
        }
        let order: Vec<Mono> = b.monos().collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
        assert!(MonomialBox::new(0, 3, -1, 2, 1).is_err());
    }

    #[test]
    fn membership_cases() {
        let b = small_box();
        let mut tail = TailProfile::empty(&b);
        tail.set(1, 0, Threshold::At(0));
        let g = vector([(Mono::new(0, -1, 0), int(1)), (Mono::new(1, 3, 0), int(1))]);
        let w = WindowedSubspace::new(b, tail, vec![g.clone()]).unwrap();
        assert_eq!(w.membership(&g), Decision::Yes);
        assert_eq!(w.membership(&vector([(Mono::new(1, -2, 0), int(5))])), Decision::Yes);
        assert_eq!(w.membership(&vector([(Mono::new(0, 2, 0), int(1))])), Decision::No);
        assert_eq!(w.membership(&vector([(Mono::new(0, 9, 0), int(1))])), Decision::Undecided);
        // the generator minus its tail-free part is still a member
        let shifted =
            vector([(Mono::new(0, -1, 0), int(2)), (Mono::new(1, 3, 0), int(2)), (Mono::new(1, -7, 0), int(1))]);
        assert_eq!(w.membership(&shifted), Decision::Yes);
    }

    #[test]
    fn generators_are_canonical() {
        let b = small_box();
        let gs = vec![
            vector([(Mono::new(0, -1, 0), int(1)), (Mono::new(1, 1, 0), int(2))]),
            vector([(Mono::new(0, -1, 0), int(1)), (Mono::new(-1, 2, 0), int(1))]),
            vector([(Mono::new(1, 1, 0), int(3))]),
        ];
        let a = WindowedSubspace::new(b, TailProfile::empty(&b), gs.clone()).unwrap();
        let rev: Vec<_> = gs.into_iter().rev().collect();
        let c = WindowedSubspace::new(b, TailProfile::empty(&b), rev).unwrap();
        assert_eq!(a.generators(), c.generators());
    }

    #[test]
    fn dim_serialization() {
        assert_eq!(serde_json::to_string(&Dim::Finite(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&Dim::Unbounded).unwrap(), "\"unbounded\"");
        let d: Dim = serde_json::from_str("\"unbounded\"").unwrap();
        assert_eq!(d, Dim::Unbounded);
    }
}
