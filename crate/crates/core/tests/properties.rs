use fredholm_kp::checks::{check_parshin_tangency, lattice_oracle};
use fredholm_kp::cohomology::{closed_form_dims, complex_dims};
use fredholm_kp::io::{parse_document, to_json, Document, Operator};
use fredholm_kp::sample::{self, rng};
use fredholm_kp::series::{BiSeriesWindow, DiffRing, SeriesPrecision};
use fredholm_kp::subspace::{vector, Mono, TailProfile, WindowedSubspace};
use proptest::prelude::*;

fn swap_components(w: &WindowedSubspace) -> WindowedSubspace {
    let tail = w.tail();
    let swapped = TailProfile {
        levels: tail.levels.iter().map(|row| row.iter().rev().copied().collect()).collect(),
        ..tail.clone()
    };
    let gens = w
        .raw_generators()
        .iter()
        .map(|g| vector(g.iter().map(|(m, c)| (Mono::new(m.t, m.u, 1 - m.comp), c.clone()))))
        .collect();
    WindowedSubspace::new(*w.bx(), swapped, gens).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subspace_documents_round_trip(seed in any::<u64>(), finite in any::<bool>()) {
        let w = sample::random_subspace(&mut rng(seed), finite);
        let doc = Document::Subspace(w);
        let text = to_json(&doc);
        let back = parse_document(&text).unwrap();
        prop_assert_eq!(to_json(&back), text);
        prop_assert_eq!(back, doc);
    }

    #[test]
    fn operator_documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        for doc in [
            Document::Operator(Operator::Two(sample::random_two_var_operator(&mut r))),
            Document::Operator(Operator::One(sample::random_lax(&mut r, 3, -6))),
            Document::Series(sample::random_unit(&mut r)),
        ] {
            let text = to_json(&doc);
            prop_assert_eq!(to_json(&parse_document(&text).unwrap()), text);
        }
    }

    #[test]
    fn routes_agree(seed in any::<u64>(), finite in any::<bool>()) {
        let w = sample::random_subspace(&mut rng(seed), finite);
        prop_assert_eq!(closed_form_dims(&w), complex_dims(&w));
    }

    #[test]
    fn monomial_subspaces_match_lattice_counts(seed in any::<u64>()) {
        let w = sample::random_monomial_subspace(&mut rng(seed));
        prop_assert_eq!(closed_form_dims(&w), lattice_oracle(&w, 40));
    }

    #[test]
    fn dims_are_invariant_under_component_swap(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = loop {
            let w = sample::random_subspace(&mut r, true);
            if w.rank() == 2 {
                break w;
            }
        };
        let s = swap_components(&w);
        prop_assert_eq!(closed_form_dims(&w), closed_form_dims(&s));
        prop_assert_eq!(complex_dims(&w), complex_dims(&s));
    }

    #[test]
    fn operator_composition_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (
            sample::random_two_var_operator(&mut r),
            sample::random_two_var_operator(&mut r),
            sample::random_two_var_operator(&mut r),
        );
        prop_assert!(a.compose(&b).compose(&c).agrees_with(&a.compose(&b.compose(&c))));
    }

    #[test]
    fn derivations_obey_leibniz(seed in any::<u64>(), var in 0usize..2) {
        let mut r = rng(seed);
        let (a, b) = (sample::random_two_var_operator(&mut r), sample::random_two_var_operator(&mut r));
        let lhs = a.compose(&b).derive(var);
        let rhs = a.derive(var).compose(&b).add(&a.compose(&b.derive(var)));
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn series_inverse_is_two_sided(seed in any::<u64>()) {
        let x = sample::random_unit(&mut rng(seed));
        let inv = x.inverse(SeriesPrecision::default()).unwrap();
        prop_assert!(x.mul(&inv).agrees_with(&BiSeriesWindow::one()));
        prop_assert!(inv.mul(&x).agrees_with(&BiSeriesWindow::one()));
    }

    #[test]
    fn lax_powers_commute_with_lax(seed in any::<u64>(), n in 1u32..4) {
        let l = sample::random_lax(&mut rng(seed), 3, -6);
        let p = l.power(n).unwrap();
        prop_assert!(DiffRing::is_zero(&p.commutator(&l)));
    }
}

#[test]
fn parshin_flows_stay_tangent() {
    assert!(check_parshin_tangency(11, 6));
}
