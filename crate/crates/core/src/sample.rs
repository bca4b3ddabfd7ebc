//! Seeded random inputs for property sweeps and the corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefficients::{int, Rational};
use crate::cohomology::DualSeries;
use crate::hierarchy::{two_var_monomial, TwoVarOperator};
use crate::psdo::OperatorWindow;
use crate::series::{BiSeriesWindow, DiffRing, TruncatedSeries};
use crate::subspace::{
    vector, HighMode, LowMode, Mono, MonomialBox, SparseVector, TailProfile, Threshold, WindowedSubspace,
};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero(rng: &mut SampleRng, bound: i64) -> Rational {
    let v = rng.gen_range(1..=bound);
    int(if rng.gen_bool(0.5) { v } else { -v })
}

/// A polynomial in x of degree ≤ 2 with small integer coefficients.
fn poly_x(rng: &mut SampleRng) -> TruncatedSeries<1> {
    let terms: Vec<([u32; 1], Rational)> = (0..=2u32).map(|d| ([d], int(rng.gen_range(-3..=3)))).collect();
    TruncatedSeries::exact(terms)
}

/// L = δ + a_1δ⁻¹ + … + a_depth δ^{-depth}, polynomial a_i, known down to δ^floor.
pub fn random_lax(rng: &mut SampleRng, depth: u32, floor: i64) -> OperatorWindow<TruncatedSeries<1>> {
    let mut terms = vec![(1, TruncatedSeries::one())];
    terms.extend((1..=depth).map(|i| (-(i as i64), poly_x(rng))));
    OperatorWindow::new(terms, Some(floor))
}

fn poly_x1x2(rng: &mut SampleRng, max_deg: u32) -> (Rational, [u32; 2]) {
    let i = rng.gen_range(0..=max_deg);
    let j = rng.gen_range(0..=max_deg - i);
    (nonzero(rng, 3), [i, j])
}

/// 1 + (three terms c·x^α δ1^a δ2^{-k}, k ≥ 1).
pub fn random_dressing(rng: &mut SampleRng) -> TwoVarOperator {
    let mut s = TwoVarOperator::one();
    for _ in 0..3 {
        let (c, x) = poly_x1x2(rng, 1);
        let d1 = rng.gen_range(-2..=1);
        let d2 = -rng.gen_range(1..=2);
        s = s.add(&two_var_monomial(c, x, d1, d2));
    }
    s
}

/// One to three terms c·x^α δ1^a δ2^b with a, b ∈ [−2, 1], deg α ≤ 2.
pub fn random_two_var_operator(rng: &mut SampleRng) -> TwoVarOperator {
    let n = rng.gen_range(1..=3);
    (0..n).fold(TwoVarOperator::zero(), |acc, _| {
        let (c, x) = poly_x1x2(rng, 2);
        acc.add(&two_var_monomial(c, x, rng.gen_range(-2..=1), rng.gen_range(-2..=1)))
    })
}

/// Exact Laurent polynomial in u, t with one to three terms in [−2, 2]².
pub fn random_field(rng: &mut SampleRng) -> BiSeriesWindow {
    let n = rng.gen_range(1..=3);
    BiSeriesWindow::from_terms((0..n).map(|_| (rng.gen_range(-2..=2), rng.gen_range(-2..=2), nonzero(rng, 4))))
}

/// A unit t^k(c u^j + …) with a few higher terms, exact.
pub fn random_unit(rng: &mut SampleRng) -> BiSeriesWindow {
    let k = rng.gen_range(-3..=3);
    let j = rng.gen_range(-2..=2);
    let mut terms = vec![(k, j, nonzero(rng, 5))];
    for _ in 0..rng.gen_range(0..=3) {
        let (dt, du) = (rng.gen_range(0..=2), rng.gen_range(1..=3));
        terms.push((k + dt, j + du, nonzero(rng, 5)));
    }
    BiSeriesWindow::from_terms(terms)
}

/// A dual-number unit: a single-level unit plus ε times a Laurent polynomial.
pub fn random_dual_unit(rng: &mut SampleRng) -> DualSeries {
    let j = rng.gen_range(-1..=1);
    let mut value = vec![(0, j, nonzero(rng, 4))];
    for du in 1..=rng.gen_range(0..=2) {
        value.push((0, j + du, int(rng.gen_range(-3..=3))));
    }
    let eps = if rng.gen_bool(0.2) { BiSeriesWindow::zero() } else { random_field(rng) };
    DualSeries::new(BiSeriesWindow::from_terms(value), eps)
}

fn random_vector(rng: &mut SampleRng, bx: &MonomialBox, terms: usize) -> SparseVector {
    vector((0..terms).map(|_| {
        let m = Mono::new(rng.gen_range(bx.t_lo..bx.t_hi), rng.gen_range(bx.u_lo..bx.u_hi), rng.gen_range(0..bx.rank));
        (m, nonzero(rng, 3))
    }))
}

fn random_low(rng: &mut SampleRng, finite: bool) -> LowMode {
    let options: &[u8] = if finite { &[1, 2] } else { &[0, 1, 2] };
    match options.choose(rng).unwrap() {
        0 => LowMode::Empty,
        1 => LowMode::Full,
        _ => {
            let slope = -rng.gen_range(0..=1);
            let intercept = if slope == 0 { rng.gen_range(-1..=2) } else { rng.gen_range(-3..=1) };
            LowMode::Affine { slope, intercept }
        }
    }
}

fn random_high(rng: &mut SampleRng) -> HighMode {
    if rng.gen_bool(0.4) {
        HighMode::Empty
    } else {
        let slope = -rng.gen_range(0..=1);
        let intercept = if slope == 0 { rng.gen_range(-3..=-1) } else { rng.gen_range(-2..=3) };
        HighMode::Affine { slope, intercept }
    }
}

/// A tail whose counts are finite when `finite` is set: every negative
/// level has a threshold and no nonnegative level is full.
fn random_tail(rng: &mut SampleRng, bx: &MonomialBox, finite: bool) -> TailProfile {
    let mut tail = TailProfile::from_modes(bx, random_low(rng, finite), random_high(rng));
    for n in bx.t_lo..bx.t_hi {
        for j in 0..bx.rank {
            let roll = rng.gen_range(0..10);
            let th = match roll {
                0 if !finite || n >= 0 => Threshold::None,
                1 if !finite && n < 0 => Threshold::Full,
                2..=4 => continue,
                _ => Threshold::At(rng.gen_range(bx.u_lo - 2..=bx.u_hi)),
            };
            tail.set(n, j, th);
        }
    }
    tail
}

/// A box of random shape around the origin.
pub fn random_box(rng: &mut SampleRng, rank: usize) -> MonomialBox {
    MonomialBox::new(-rng.gen_range(1..=3), rng.gen_range(1..=3), -rng.gen_range(1..=3), rng.gen_range(1..=3), rank)
        .expect("box contains the origin region")
}

/// Generators with mixed support plus a random tail.
pub fn random_subspace(rng: &mut SampleRng, finite: bool) -> WindowedSubspace {
    let rank = if rng.gen_bool(0.25) { 2 } else { 1 };
    let bx = random_box(rng, rank);
    let tail = random_tail(rng, &bx, finite);
    let gens = (0..rng.gen_range(0..=4)).map(|_| {
        let k = rng.gen_range(1..=3);
        random_vector(rng, &bx, k)
    });
    WindowedSubspace::new(bx, tail, gens.collect()).expect("generators lie in the box")
}

/// Single-monomial generators plus a tail with finite counts.
pub fn random_monomial_subspace(rng: &mut SampleRng) -> WindowedSubspace {
    let rank = if rng.gen_bool(0.25) { 2 } else { 1 };
    let bx = random_box(rng, rank);
    let tail = random_tail(rng, &bx, true);
    let gens = (0..rng.gen_range(0..=5)).map(|_| {
        let mut v = random_vector(rng, &bx, 1);
        for c in v.values_mut() {
            *c = int(1);
        }
        v
    });
    WindowedSubspace::new(bx, tail, gens.collect()).expect("generators lie in the box")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let a = random_subspace(&mut rng(7), false);
        let b = random_subspace(&mut rng(7), false);
        assert_eq!(a, b);
        assert_eq!(random_dressing(&mut rng(3)), random_dressing(&mut rng(3)));
    }
}
