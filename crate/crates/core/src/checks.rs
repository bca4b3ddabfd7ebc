//! The property suite: one check per acceptance criterion, each seeded and
//! exact. Shared by `fkp selfcheck` and the acceptance tests.

use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::coefficients::{int, Rational};
use crate::cohomology::{
    closed_form_dims, complex_dims, dual_number_splitting, pc_cross_identity, picture_cohomology, stability_probe,
    tangent_report, Dims,
};
use crate::hierarchy::{
    apply_to_field, delta1_pow, delta2_pow, derive_kdv, derive_kp, parshin_flow, ParshinPair, DEFAULT_DEPTH_CAP,
    DEFAULT_DRESSING_FLOOR,
};
use crate::par;
use crate::sample::{self, rng};
use crate::series::{BiSeriesWindow, DiffRing, SeriesPrecision};
use crate::subspace::{
    materialized_level_dims, ord_unit, two_pass_slice_dim, vector, Decision, Dim, HighMode, LowMode, Mono, MonomialBox,
    Slice, TailProfile, Threshold, WindowedSubspace,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(id: u32, name: &'static str, f: impl FnOnce() -> (bool, String)) -> CheckOutcome {
    let (passed, detail) = f();
    CheckOutcome { id, name, passed, detail }
}

fn mono(t: i64, u: i64) -> Mono {
    Mono::new(t, u, 0)
}

/// W = span{u⁻¹ + t⁻¹} with no tail.
pub fn single_generator_example() -> WindowedSubspace {
    let bx = MonomialBox::new(-3, 3, -3, 3, 1).unwrap();
    let g = vector([(mono(0, -1), int(1)), (mono(-1, 0), int(1))]);
    WindowedSubspace::new(bx, TailProfile::empty(&bx), vec![g]).unwrap()
}

/// A = span{1} + {u^a t^n : a ≤ −1}: a ring with H¹ = 0.
pub fn representable_ring() -> WindowedSubspace {
    let bx = MonomialBox::new(-3, 3, -3, 3, 1).unwrap();
    let line = Threshold::At(-1);
    let tail = TailProfile::uniform(
        &bx,
        line,
        LowMode::Affine { slope: 0, intercept: -1 },
        HighMode::Affine { slope: 0, intercept: -1 },
    );
    WindowedSubspace::new(bx, tail, vec![vector([(mono(0, 0), int(1))])]).unwrap()
}

/// A = span{1, u⁻¹ + t⁻¹} + {u^a t^n : a ≤ −n − 2}: a ring with H¹ = 1.
pub fn non_representable_ring() -> WindowedSubspace {
    let bx = MonomialBox::new(-3, 3, -3, 3, 1).unwrap();
    let line = (LowMode::Affine { slope: -1, intercept: -2 }, HighMode::Affine { slope: -1, intercept: -2 });
    let tail = TailProfile::from_modes(&bx, line.0, line.1);
    let gens = vec![vector([(mono(0, 0), int(1))]), vector([(mono(0, -1), int(1)), (mono(-1, 0), int(1))])];
    WindowedSubspace::new(bx, tail, gens).unwrap()
}

/// Hand-built subspaces covering every boundary mode.
pub fn hand_built_corpus() -> Vec<(&'static str, WindowedSubspace)> {
    let bx = MonomialBox::new(-3, 3, -3, 3, 1).unwrap();
    let bx2 = MonomialBox::new(-2, 2, -2, 3, 2).unwrap();
    let mut out = vec![
        ("single-generator", single_generator_example()),
        ("zero", WindowedSubspace::zero(bx).unwrap()),
        ("representable-ring", representable_ring()),
        ("non-representable-ring", non_representable_ring()),
    ];
    let staircase = TailProfile::from_modes(
        &bx,
        LowMode::Affine { slope: -1, intercept: 0 },
        HighMode::Affine { slope: -1, intercept: 0 },
    );
    out.push(("staircase", WindowedSubspace::new(bx, staircase.clone(), vec![]).unwrap()));
    out.push((
        "staircase-with-defect",
        WindowedSubspace::new(
            bx,
            staircase,
            vec![
                vector([(mono(-2, -1), int(1)), (mono(1, 1), int(2))]),
                vector([(mono(-1, 2), int(1)), (mono(0, -3), int(-1))]),
            ],
        )
        .unwrap(),
    ));
    let full_below = TailProfile::from_modes(&bx, LowMode::Full, HighMode::Empty);
    out.push((
        "full-below",
        WindowedSubspace::new(bx, full_below, vec![vector([(mono(1, -2), int(1)), (mono(2, 0), int(3))])]).unwrap(),
    ));
    let mut rank2 = TailProfile::from_modes(
        &bx2,
        LowMode::Affine { slope: 0, intercept: -1 },
        HighMode::Affine { slope: 0, intercept: -2 },
    );
    rank2.set(0, 1, Threshold::At(1));
    out.push((
        "rank-two",
        WindowedSubspace::new(
            bx2,
            rank2,
            vec![
                vector([(Mono::new(-1, -1, 0), int(1)), (Mono::new(-1, -1, 1), int(1))]),
                vector([(Mono::new(1, 0, 1), int(1)), (Mono::new(-2, 2, 0), int(-2))]),
            ],
        )
        .unwrap(),
    ));
    out
}

/// The corpus used by the route and identity checks: hand-built entries
/// followed by `count` seeded random ones, half with finite counts.
pub fn corpus(seed: u64, count: usize) -> Vec<(String, WindowedSubspace)> {
    let mut r = rng(seed);
    let mut out: Vec<(String, WindowedSubspace)> =
        hand_built_corpus().into_iter().map(|(n, w)| (n.to_string(), w)).collect();
    for i in 0..count {
        let finite = i % 2 == 0;
        out.push((format!("random-{i}"), sample::random_subspace(&mut r, finite)));
    }
    out
}

/// h0, h2 by counting lattice points of a monomial subspace over a region
/// large enough that the boundary lines have left the quadrants.
pub fn lattice_oracle(w: &WindowedSubspace, radius: i64) -> Dims {
    let bx = w.bx();
    let gens: Vec<Mono> = w.raw_generators().iter().flat_map(|g| g.keys().copied()).collect();
    let in_w = |m: &Mono| w.tail().covers(m) || gens.contains(m);
    let (mut h0, mut h2) = (0u64, 0u64);
    for n in (bx.t_lo - radius)..(bx.t_hi + radius) {
        for a in -radius..radius {
            for j in 0..bx.rank {
                let m = Mono::new(n, a, j);
                if n >= 0 && a >= 0 && in_w(&m) {
                    h0 += 1;
                }
                if n < 0 && a < 0 && !in_w(&m) {
                    h2 += 1;
                }
            }
        }
    }
    Dims { h0: Dim::Finite(h0), h1: Dim::Finite(0), h2: Dim::Finite(h2) }
}

pub fn check_kp_identity() -> CheckOutcome {
    outcome(1, "KP identity", || match derive_kp(DEFAULT_DEPTH_CAP) {
        Ok(d) => (d.holds(), format!("residual = {}, depth {}", d.residual, d.depth)),
        Err(e) => (false, e.to_string()),
    })
}

pub fn check_kdv_reduction() -> CheckOutcome {
    outcome(2, "KdV reduction", || match (derive_kdv(4), derive_kdv(6)) {
        (Ok(a), Ok(b)) => {
            let same = a.third_derivative_coefficient == b.third_derivative_coefficient
                && a.nonlinear_coefficient == b.nonlinear_coefficient;
            (
                same,
                format!(
                    "c = {} at depths 4 and 6 (printed coefficient {}), uu' coefficient {}",
                    a.third_derivative_coefficient, a.printed_coefficient, a.nonlinear_coefficient
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
    })
}

pub fn check_flow_well_posed(seed: u64, samples: usize) -> CheckOutcome {
    outcome(3, "flow well-posedness", || {
        let mut r = rng(seed);
        let laxes: Vec<_> = (0..samples)
            .map(|_| {
                let depth = r.gen_range(1..=6);
                sample::random_lax(&mut r, depth, -8)
            })
            .collect();
        let bad = par::map(&laxes, |l| {
            (1..=5u32)
                .filter(|&n| {
                    let Ok(p) = l.power(n) else { return true };
                    let plus = p.plus();
                    if plus.floor().is_some() {
                        return true;
                    }
                    let rhs = plus.commutator(l).plus();
                    rhs.floor().is_some() || !DiffRing::is_zero(&rhs)
                })
                .count()
        })
        .into_iter()
        .sum::<usize>();
        (bad == 0, format!("{} operators x 5 flows, {bad} with a nonnegative part", samples))
    })
}

pub fn check_dressing(seed: u64, samples: usize) -> CheckOutcome {
    outcome(4, "dressing", || {
        let mut r = rng(seed);
        let ss: Vec<_> = (0..samples).map(|_| sample::random_dressing(&mut r)).collect();
        let failures = par::map(&ss, |s| match ParshinPair::dress(s, DEFAULT_DRESSING_FLOOR) {
            Ok(p) => !p.is_commuting(),
            Err(_) => true,
        })
        .into_iter()
        .filter(|b| *b)
        .count();
        (failures == 0, format!("{samples} dressings, {failures} with [L, M] != 0"))
    })
}

pub fn check_route_equality(seed: u64, count: usize) -> CheckOutcome {
    outcome(5, "route equality", || {
        let c = corpus(seed, count);
        let mismatches: Vec<String> =
            par::map(&c, |(name, w)| (closed_form_dims(w) != complex_dims(w)).then(|| name.clone()))
                .into_iter()
                .flatten()
                .collect();
        (mismatches.is_empty(), format!("{} subspaces, mismatches: {:?}", c.len(), mismatches))
    })
}

pub fn check_monomial_oracle(seed: u64, count: usize) -> CheckOutcome {
    outcome(6, "monomial oracle", || {
        let mut r = rng(seed);
        let ws: Vec<_> = (0..count).map(|_| sample::random_monomial_subspace(&mut r)).collect();
        let bad = par::map(&ws, |w| {
            let d = closed_form_dims(w);
            d != lattice_oracle(w, 40) || d.h1 != Dim::Finite(0) || complex_dims(w) != d
        })
        .into_iter()
        .filter(|b| *b)
        .count();
        (bad == 0, format!("{count} monomial subspaces, {bad} mismatches"))
    })
}

pub fn check_h1_detection() -> CheckOutcome {
    outcome(7, "H1 detection", || {
        let w = single_generator_example();
        let (a, b) = (picture_cohomology(&w), crate::cohomology::complex_cohomology(&w));
        let t = tangent_report(&w);
        let ring = tangent_report(&non_representable_ring());
        let good = tangent_report(&representable_ring());
        let ok = a.h1 == Dim::Finite(1)
            && b.h1 == Dim::Finite(1)
            && t.as_ref().is_ok_and(|t| t.representable == Decision::No)
            && ring.as_ref().is_ok_and(|t| t.representable == Decision::No && t.fredholm && t.schur == Decision::Yes)
            && good.as_ref().is_ok_and(|t| t.representable == Decision::Yes && t.fredholm && t.schur == Decision::Yes);
        (ok, format!("h1 = {} / {}, ring h1 = {:?}", a.h1, b.h1, ring.map(|t| t.pic_kernel_dim)))
    })
}

fn certified(c: &[(String, WindowedSubspace)]) -> Vec<(String, WindowedSubspace)> {
    c.iter().filter(|(_, w)| closed_form_dims(w).all_finite()).cloned().collect()
}

pub fn check_cross_identity(seed: u64, count: usize) -> CheckOutcome {
    outcome(8, "cross identity", || {
        let c = certified(&corpus(seed, count));
        let bad: Vec<String> =
            par::map(&c, |(n, w)| (!pc_cross_identity(w).holds).then(|| n.clone())).into_iter().flatten().collect();
        (bad.is_empty() && !c.is_empty(), format!("{} certified subspaces, failures: {:?}", c.len(), bad))
    })
}

pub fn check_stability(seed: u64, count: usize) -> CheckOutcome {
    outcome(9, "window stability", || {
        let c = certified(&corpus(seed, count));
        let bad: Vec<String> =
            par::map(&c, |(n, w)| (!stability_probe(w, 2)).then(|| n.clone())).into_iter().flatten().collect();
        (bad.is_empty() && !c.is_empty(), format!("{} certified subspaces, unstable: {:?}", c.len(), bad))
    })
}

pub fn check_order_map(seed: u64, pairs: usize) -> CheckOutcome {
    outcome(10, "order map", || {
        let mut r = rng(seed);
        let prec = SeriesPrecision::default();
        let mut additive = 0;
        let mut kernel = 0;
        for _ in 0..pairs {
            let (a, b) = (sample::random_unit(&mut r), sample::random_unit(&mut r));
            if let Ok((oa, ob, oab)) = ord_unit(&a, &b) {
                if oa + ob == oab {
                    additive += 1;
                }
            }
            let Ok(inv) = a.inverse(prec) else { continue };
            let zero_order = a.t_order().is_ok_and(|o| o == 0);
            if zero_order == (a.in_t_nonnegative() && inv.in_t_nonnegative()) {
                kernel += 1;
            }
        }
        (
            additive == pairs && kernel == pairs,
            format!("additive {additive}/{pairs}, kernel characterization {kernel}/{pairs}"),
        )
    })
}

pub fn check_dual_splitting(seed: u64, samples: usize) -> CheckOutcome {
    outcome(11, "dual-number splitting", || {
        let bx = MonomialBox::new(-4, 4, -4, 4, 1).unwrap();
        let tail = TailProfile::uniform(&bx, Threshold::Full, LowMode::Full, HighMode::Empty);
        let a = WindowedSubspace::new(bx, tail, vec![]).unwrap();
        let mut r = rng(seed);
        let units: Vec<_> = (0..samples).map(|_| sample::random_dual_unit(&mut r)).collect();
        let ok = dual_number_splitting(&a, &units, SeriesPrecision::default());
        (ok, format!("{samples} dual units"))
    })
}

pub fn check_fredholm_slices(seed: u64, min_levels: usize) -> CheckOutcome {
    outcome(12, "Fredholm slices", || {
        let mut r = rng(seed);
        let mut levels = 0;
        let mut bad = 0;
        while levels < min_levels {
            let finite = r.gen_bool(0.5);
            let w = sample::random_subspace(&mut r, finite);
            let report = w.fredholm_check();
            for lr in &report.levels {
                levels += 1;
                let slice_ok = match w.slice(lr.n) {
                    Slice::Window { leading, .. } => {
                        let tail_in_box = w.box_tail().filter(|m| m.t == lr.n).count();
                        tail_in_box + leading.len() == two_pass_slice_dim(&w, lr.n)
                    }
                    Slice::Boundary { .. } => false,
                };
                if *lr != materialized_level_dims(&w, lr.n) || !slice_ok {
                    bad += 1;
                }
            }
        }
        (bad == 0, format!("{levels} levels, {bad} mismatches"))
    })
}

pub fn check_quotient_action(seed: u64, samples: usize) -> CheckOutcome {
    outcome(13, "quotient action", || {
        let mut r = rng(seed);
        let triples: Vec<_> = (0..samples)
            .map(|_| {
                (
                    sample::random_two_var_operator(&mut r),
                    sample::random_two_var_operator(&mut r),
                    sample::random_field(&mut r),
                )
            })
            .collect();
        let bad = par::map(&triples, |(a, b, f)| {
            let lhs = apply_to_field(&a.compose(b), f);
            let rhs = apply_to_field(b, f).and_then(|bf| apply_to_field(a, &bf));
            !matches!((lhs, rhs), (Ok(x), Ok(y)) if x.agrees_with(&y))
        })
        .into_iter()
        .filter(|b| *b)
        .count();
        let one = BiSeriesWindow::one();
        let t = BiSeriesWindow::monomial(1, 0, Rational::one());
        let u = BiSeriesWindow::monomial(0, 1, Rational::one());
        let base = apply_to_field(&delta2_pow(-1), &one).is_ok_and(|x| x == t)
            && apply_to_field(&delta1_pow(-1), &one).is_ok_and(|x| x == u);
        (
            bad == 0 && base,
            format!("{samples} triples, {bad} failures, base cases {}", if base { "ok" } else { "FAILED" }),
        )
    })
}

/// A flow on a dressed pair stays tangent to [L, M] = 0.
pub fn check_parshin_tangency(seed: u64, samples: usize) -> bool {
    let mut r = rng(seed);
    (0..samples).all(|_| {
        let s = sample::random_dressing(&mut r);
        let Ok(pair) = ParshinPair::dress(&s, -3) else { return false };
        let Ok((dl, dm)) = parshin_flow(&pair, 0, 1, None) else { return false };
        DiffRing::is_zero(&dl.commutator(&pair.m).add(&pair.l.commutator(&dm)))
    })
}

/// Every criterion with its default sample sizes.
pub fn all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_kp_identity(),
        check_kdv_reduction(),
        check_flow_well_posed(seed, 50),
        check_dressing(seed, 25),
        check_route_equality(seed, 30),
        check_monomial_oracle(seed, 100),
        check_h1_detection(),
        check_cross_identity(seed, 30),
        check_stability(seed, 30),
        check_order_map(seed, 100),
        check_dual_splitting(seed, 50),
        check_fredholm_slices(seed, 50),
        check_quotient_action(seed, 25),
    ]
}
