use proptest::prelude::*;
use setsquare::card::{is_set, set_order, third_card};
use setsquare::game::GameState;
use setsquare::symmetry::{GroupElement, GROUP_ORDER};
use setsquare::{Card, Family, MagicSquare, SetTriple};

fn card() -> impl Strategy<Value = Card> {
    (0usize..81).prop_map(Card::from_index)
}

fn distinct_pair() -> impl Strategy<Value = (Card, Card)> {
    (card(), card()).prop_filter("distinct", |(a, b)| a != b)
}

fn element() -> impl Strategy<Value = GroupElement> {
    (0..GROUP_ORDER).prop_map(GroupElement::from_index)
}

fn square() -> impl Strategy<Value = MagicSquare> {
    (card(), card(), card()).prop_filter_map("degenerate corners", |(a, b, c)| {
        MagicSquare::build_from_corners(a, b, c).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn third_card_completes_a_set((a, b) in distinct_pair()) {
        let c = third_card(a, b).unwrap();
        prop_assert!(is_set(a, b, c));
        prop_assert_eq!(third_card(b, a).unwrap(), c);
        prop_assert_eq!(third_card(a, c).unwrap(), b);
        prop_assert_eq!(third_card(c, b).unwrap(), a);
    }

    #[test]
    fn set_membership_ignores_order(a in card(), b in card(), c in card()) {
        let x = is_set(a, b, c);
        for (p, q, r) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            prop_assert_eq!(is_set(p, q, r), x);
        }
    }

    #[test]
    fn set_iff_each_feature_same_or_all_different(a in card(), b in card(), c in card()) {
        let (x, y, z) = (a.coords(), b.coords(), c.coords());
        let per_feature = (0..4).all(|f| {
            (x[f] == y[f] && y[f] == z[f]) || (x[f] != y[f] && y[f] != z[f] && x[f] != z[f])
        });
        prop_assert_eq!(is_set(a, b, c), a != b && per_feature);
    }

    #[test]
    fn order_counts_all_different_features((a, b) in distinct_pair()) {
        let c = third_card(a, b).unwrap();
        let differing = (0..4).filter(|&f| a.coords()[f] != b.coords()[f]).count() as u8;
        prop_assert_eq!(set_order([a, b, c]).unwrap(), differing);
        prop_assert_eq!(SetTriple::new(c, a, b).unwrap().order(), differing);
    }

    #[test]
    fn composition_is_associative(f in element(), g in element(), h in element()) {
        prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
    }

    #[test]
    fn inverse_and_identity(g in element(), x in card()) {
        prop_assert_eq!(g.compose(&g.inverse()), GroupElement::IDENTITY);
        prop_assert_eq!(g.inverse().compose(&g), GroupElement::IDENTITY);
        prop_assert_eq!(g.compose(&GroupElement::IDENTITY), g);
        prop_assert_eq!(GroupElement::IDENTITY.apply(x), x);
    }

    #[test]
    fn action_respects_composition(g in element(), h in element(), x in card()) {
        prop_assert_eq!(g.compose(&h).apply(x), g.apply(h.apply(x)));
    }

    #[test]
    fn group_preserves_sets_and_their_order((a, b) in distinct_pair(), g in element()) {
        let c = third_card(a, b).unwrap();
        let (ga, gb, gc) = (g.apply(a), g.apply(b), g.apply(c));
        prop_assert!(is_set(ga, gb, gc));
        prop_assert_eq!(set_order([ga, gb, gc]).unwrap(), set_order([a, b, c]).unwrap());
    }

    #[test]
    fn group_preserves_squares_and_their_type(sq in square(), g in element()) {
        let image = g.apply_square(&sq);
        prop_assert!(MagicSquare::from_cells(image.cells()).is_ok());
        prop_assert_eq!(image.family_orders(), sq.family_orders());
    }

    #[test]
    fn squares_have_magic_structure(sq in square()) {
        for family in Family::ALL {
            let orders: Vec<u8> = (0..3).map(|i| sq.line(family, i).order()).collect();
            prop_assert!(orders.iter().all(|&o| o == orders[0]));
        }
        let profile = sq.profile();
        prop_assert_eq!(*profile.diversity.numer() * 4, *profile.diversity.denom() * 3 * u32::from(sq.order()));
        prop_assert!(sq.family_orders().is_admissible());
        let (a, b, c) = sq.corners();
        prop_assert_eq!(MagicSquare::build_from_corners(a, b, c).unwrap(), sq);
    }

    #[test]
    fn text_round_trips(sq in square(), g in element(), x in card()) {
        prop_assert_eq!(x.to_string().parse::<Card>().unwrap(), x);
        prop_assert_eq!(sq.to_string().parse::<MagicSquare>().unwrap(), sq);
        prop_assert_eq!(g.to_string().parse::<GroupElement>().unwrap(), g);
    }

    #[test]
    fn transcripts_round_trip(sq in square(), picks in proptest::collection::vec(0usize..9, 0..9)) {
        let mut state = GameState::new(sq);
        for p in picks {
            if state.is_over() {
                break;
            }
            let moves = state.legal_moves();
            state = state.apply_move(moves[p % moves.len()]).unwrap();
        }
        let parsed = GameState::from_transcript(&state.transcript()).unwrap();
        prop_assert_eq!(parsed, state);
    }
}

#[test]
fn malformed_text_is_rejected() {
    for bad in ["", "012", "00000", "0003", "00a0", " 0000"] {
        assert!(bad.parse::<Card>().is_err(), "{bad:?}");
    }
    assert!("0000 0000 0000".parse::<SetTriple>().is_err());
    assert!("0000 0001 0010".parse::<SetTriple>().is_err());
    assert!("0001 0000 0002 0010 0011 0012 0020 0021 0022".parse::<MagicSquare>().is_err());
    for bad in ["", "0123", "0113|012|012|012|012", "0123|011|012|012|012", "0123|012|012|012"] {
        assert!(bad.parse::<GroupElement>().is_err(), "{bad:?}");
    }
}
