//! The group of feature and value shuffles, and rearrangements of a grid.
//!
//! A [`GroupElement`] permutes the four features and, independently for each
//! feature, the three values. There are 24·6⁴ = 31104 of them. Elements act
//! on cards, sets and squares; stabilizers are counted by brute force and
//! orbits by closure under a small generating set.
//!
//! [`GeometricTransform`] moves cells of a square around instead. Those
//! rearrangements permute the four line families, and together they reach
//! all 432 squares on a fixed set of nine cards.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::Ratio;

use crate::card::{Card, SetTriple, FEATURES};
use crate::error::{Error, Result};
use crate::square::{Family, MagicSquare, OrderTuple};

/// Order of the group.
pub const GROUP_ORDER: usize = 31104;

type Perm3 = [u8; 3];

const IDENTITY3: Perm3 = [0, 1, 2];

fn perm3_from_index(i: usize) -> Perm3 {
    const ALL: [Perm3; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    ALL[i]
}

fn invert3(p: Perm3) -> Perm3 {
    let mut inv = [0u8; 3];
    for (i, &image) in p.iter().enumerate() {
        inv[image as usize] = i as u8;
    }
    inv
}

fn is_permutation<const N: usize>(p: &[u8; N]) -> bool {
    let mut seen = [false; N];
    p.iter().all(|&x| (x as usize) < N && !std::mem::replace(&mut seen[x as usize], true))
}

/// A feature permutation followed by per-feature value permutations.
///
/// Applied to a card, the coordinate at feature `i` moves to feature
/// `features[i]` and is then relabeled by `values[features[i]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    features: [u8; FEATURES],
    /// Indexed by target feature.
    values: [Perm3; FEATURES],
}

impl GroupElement {
    pub const IDENTITY: GroupElement =
        GroupElement { features: [0, 1, 2, 3], values: [IDENTITY3; FEATURES] };

    pub fn new(features: [u8; FEATURES], values: [[u8; 3]; FEATURES]) -> Result<GroupElement> {
        if !is_permutation(&features) {
            return Err(Error::GroupElement(format!("{features:?}"), "feature map is not a permutation"));
        }
        if !values.iter().all(is_permutation) {
            return Err(Error::GroupElement(format!("{values:?}"), "value map is not a permutation"));
        }
        Ok(GroupElement { features, values })
    }

    /// The `n`-th element (0..31104) in a fixed enumeration order.
    pub fn from_index(n: usize) -> GroupElement {
        assert!(n < GROUP_ORDER, "group element index {n} out of range");
        let feature_perm = (0..FEATURES as u8)
            .permutations(FEATURES)
            .nth(n / 1296)
            .expect("24 feature permutations");
        let mut rest = n % 1296;
        let mut values = [IDENTITY3; FEATURES];
        for slot in values.iter_mut().rev() {
            *slot = perm3_from_index(rest % 6);
            rest /= 6;
        }
        GroupElement { features: std::array::from_fn(|i| feature_perm[i]), values }
    }

    /// Every element of the group.
    pub fn all() -> impl Iterator<Item = GroupElement> {
        let feature_perms: Vec<Vec<u8>> = (0..FEATURES as u8).permutations(FEATURES).collect();
        feature_perms.into_iter().flat_map(|fp| {
            let features: [u8; FEATURES] = std::array::from_fn(|i| fp[i]);
            (0..1296).map(move |mut rest| {
                let mut values = [IDENTITY3; FEATURES];
                for slot in values.iter_mut().rev() {
                    *slot = perm3_from_index(rest % 6);
                    rest /= 6;
                }
                GroupElement { features, values }
            })
        })
    }

    /// Swaps two features without relabeling values.
    pub fn feature_swap(a: usize, b: usize) -> GroupElement {
        let mut g = GroupElement::IDENTITY;
        g.features.swap(a, b);
        g
    }

    /// Swaps two values of one feature.
    pub fn value_swap(feature: usize, u: u8, v: u8) -> GroupElement {
        let mut g = GroupElement::IDENTITY;
        g.values[feature].swap(u as usize, v as usize);
        g
    }

    /// A generating set: adjacent feature swaps and adjacent value swaps.
    pub fn generators() -> Vec<GroupElement> {
        let mut gens: Vec<GroupElement> =
            (0..FEATURES - 1).map(|f| GroupElement::feature_swap(f, f + 1)).collect();
        for f in 0..FEATURES {
            gens.push(GroupElement::value_swap(f, 0, 1));
            gens.push(GroupElement::value_swap(f, 1, 2));
        }
        gens
    }

    pub fn feature_map(&self) -> [u8; FEATURES] {
        self.features
    }

    pub fn value_maps(&self) -> [[u8; 3]; FEATURES] {
        self.values
    }

    pub fn apply(&self, card: Card) -> Card {
        let coords = card.coords();
        let mut out = [0u8; FEATURES];
        for (&value, &target) in coords.iter().zip(&self.features) {
            let target = target as usize;
            out[target] = self.values[target][value as usize];
        }
        Card::new(out).expect("permuted trits stay in range")
    }

    pub fn apply_set(&self, set: SetTriple) -> SetTriple {
        let [a, b, c] = set.cards().map(|x| self.apply(x));
        SetTriple::new(a, b, c).expect("the group maps sets to sets")
    }

    pub fn apply_square(&self, sq: &MagicSquare) -> MagicSquare {
        MagicSquare::from_cells_unchecked(sq.cells().map(|row| row.map(|x| self.apply(x))))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let inverse = self.inverse();
        GroupElement {
            features: other.features.map(|f| self.features[f as usize]),
            values: std::array::from_fn(|target| {
                let before = &other.values[inverse.features[target] as usize];
                before.map(|v| self.values[target][v as usize])
            }),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        let mut features = [0u8; FEATURES];
        for (i, &image) in self.features.iter().enumerate() {
            features[image as usize] = i as u8;
        }
        GroupElement {
            features,
            values: std::array::from_fn(|i| invert3(self.values[self.features[i] as usize])),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.features {
            write!(f, "{p}")?;
        }
        for v in self.values {
            write!(f, "|{}{}{}", v[0], v[1], v[2])?;
        }
        Ok(())
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    /// `"p0p1p2p3|v0|v1|v2|v3"`, e.g. `"0123|012|012|012|012"` for the identity.
    fn from_str(text: &str) -> Result<GroupElement> {
        let bad = |why| Error::GroupElement(text.to_string(), why);
        let parts: Vec<&str> = text.split('|').collect();
        if parts.len() != 1 + FEATURES {
            return Err(bad("expected five '|'-separated fields"));
        }
        let digits = |s: &str, n: usize, max: u32| -> Option<Vec<u8>> {
            (s.len() == n)
                .then(|| s.chars().map(|c| c.to_digit(10).filter(|&d| d < max).map(|d| d as u8)).collect())
                .flatten()
        };
        let features = digits(parts[0], FEATURES, FEATURES as u32).ok_or_else(|| bad("bad feature map"))?;
        let mut values = [IDENTITY3; FEATURES];
        for (slot, part) in values.iter_mut().zip(&parts[1..]) {
            let v = digits(part, 3, 3).ok_or_else(|| bad("bad value map"))?;
            *slot = [v[0], v[1], v[2]];
        }
        let features = [features[0], features[1], features[2], features[3]];
        if !is_permutation(&features) {
            return Err(bad("feature map is not a permutation"));
        }
        if !values.iter().all(is_permutation) {
            return Err(bad("value map is not a permutation"));
        }
        Ok(GroupElement { features, values })
    }
}

/// Size of the orbit of `start`, found by closure under the generators.
pub fn orbit<T, F>(start: T, act: F) -> HashSet<T>
where
    T: Clone + Eq + Hash,
    F: Fn(&GroupElement, &T) -> T,
{
    let gens = GroupElement::generators();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = act(g, &x);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Number of group elements fixing `x`, by checking all of them.
pub fn stabilizer_order<T, F>(x: &T, act: F) -> usize
where
    T: Eq,
    F: Fn(&GroupElement, &T) -> T,
{
    GroupElement::all().filter(|g| act(g, x) == *x).count()
}

pub fn stabilizer_order_card(card: Card) -> usize {
    stabilizer_order(&card, |g, &c| g.apply(c))
}

/// Elements mapping the set onto itself as an unordered set.
pub fn stabilizer_order_set(set: SetTriple) -> usize {
    stabilizer_order(&set, |g, &s| g.apply_set(s))
}

/// Elements fixing every cell of the grid.
pub fn stabilizer_order_square(sq: &MagicSquare) -> usize {
    stabilizer_order(sq, |g, s| g.apply_square(s))
}

/// Stabilizer order of a set of order `k`: 6·2^(4−k)·(4−k)!·k!.
pub fn set_stabilizer_formula(k: u8) -> Result<u64> {
    if !(1..=4).contains(&k) {
        return Err(Error::OrderOutOfRange(u32::from(k)));
    }
    let k = u32::from(k);
    Ok(6 * 2u64.pow(4 - k) * factorial(4 - k) * factorial(k))
}

fn factorial(n: u32) -> u64 {
    (1..=u64::from(n)).product()
}

/// Stabilizer order of a square with the given family orders:
/// 2^(4−k)·(4−k)!·∏(k − orderᵢ)!, with k the square order.
pub fn square_stabilizer_formula(orders: OrderTuple) -> Result<u64> {
    if !orders.is_admissible() {
        return Err(Error::Inadmissible(orders.0));
    }
    let k = u32::from(orders.square_order());
    let per_family: u64 = orders.0.iter().map(|&a| factorial(k - u32::from(a))).product();
    Ok(2u64.pow(4 - k) * factorial(4 - k) * per_family)
}

/// Number of squares with exactly these (rows, cols, diag, anti) orders.
pub fn orbit_count_squares(orders: OrderTuple) -> Result<u64> {
    Ok(GROUP_ORDER as u64 / square_stabilizer_formula(orders)?)
}

/// The closed form as it appears in print,
/// 3888·2^k / ((4−k)!·∏(4 − orderᵢ)!). It disagrees with the census and is
/// kept only so verification can report the discrepancy.
pub fn printed_orbit_formula(orders: OrderTuple) -> Result<Ratio<u64>> {
    if !orders.is_admissible() {
        return Err(Error::Inadmissible(orders.0));
    }
    let k = u32::from(orders.square_order());
    let denom: u64 =
        factorial(4 - k) * orders.0.iter().map(|&a| factorial(4 - u32::from(a))).product::<u64>();
    Ok(Ratio::new(3888 * 2u64.pow(k), denom))
}

/// Rearrangements of the cells of a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometricTransform {
    ReflectMainDiag,
    ReflectAntiDiag,
    ReflectMidRow,
    ReflectMidCol,
    Rotate180,
    /// Every row moves up one place; the top row wraps to the bottom.
    CycleRows,
    /// Every column moves left one place; the left column wraps to the right.
    CycleCols,
    /// Reflect about the middle column, then shift the middle row right by
    /// one and the bottom row right by two, wrapping around. Exchanges the
    /// column and diagonal families.
    ShearWrap,
}

impl GeometricTransform {
    pub const ALL: [GeometricTransform; 8] = [
        GeometricTransform::ReflectMainDiag,
        GeometricTransform::ReflectAntiDiag,
        GeometricTransform::ReflectMidRow,
        GeometricTransform::ReflectMidCol,
        GeometricTransform::Rotate180,
        GeometricTransform::CycleRows,
        GeometricTransform::CycleCols,
        GeometricTransform::ShearWrap,
    ];

    /// The source cell that lands at `(row, col)`.
    fn source(self, row: usize, col: usize) -> (usize, usize) {
        match self {
            GeometricTransform::ReflectMainDiag => (col, row),
            GeometricTransform::ReflectAntiDiag => (2 - col, 2 - row),
            GeometricTransform::ReflectMidRow => (2 - row, col),
            GeometricTransform::ReflectMidCol => (row, 2 - col),
            GeometricTransform::Rotate180 => (2 - row, 2 - col),
            GeometricTransform::CycleRows => ((row + 1) % 3, col),
            GeometricTransform::CycleCols => (row, (col + 1) % 3),
            GeometricTransform::ShearWrap => (row, (2 + row + 3 - col) % 3),
        }
    }

    pub fn apply_grid<T: Copy>(self, grid: [[T; 3]; 3]) -> [[T; 3]; 3] {
        std::array::from_fn(|r| {
            std::array::from_fn(|c| {
                let (sr, sc) = self.source(r, c);
                grid[sr][sc]
            })
        })
    }

    pub fn apply(self, sq: &MagicSquare) -> MagicSquare {
        MagicSquare::from_cells_unchecked(self.apply_grid(sq.cells()))
    }

    /// Where each family of the input ends up, indexed by `Family::index()`.
    pub fn family_map(self) -> [Family; 4] {
        let probe = MagicSquare::build_from_corners(
            Card::ZERO,
            "1000".parse().expect("card"),
            "0100".parse().expect("card"),
        )
        .expect("probe square");
        family_permutation(&probe, &self.apply(&probe)).expect("rearrangement of the same cards")
    }
}

pub fn apply_geometric(t: GeometricTransform, sq: &MagicSquare) -> MagicSquare {
    t.apply(sq)
}

/// The lines of each family as a sorted triple of sets.
pub fn family_line_sets(sq: &MagicSquare) -> [[SetTriple; 3]; 4] {
    sq.lines().map(|mut family| {
        family.sort_unstable();
        family
    })
}

/// For two squares on the same cards, the family of `to` that holds the
/// lines of each family of `from`. `None` if some family has no match.
pub fn family_permutation(from: &MagicSquare, to: &MagicSquare) -> Option<[Family; 4]> {
    let source = family_line_sets(from);
    let target = family_line_sets(to);
    let mut map = [Family::Rows; 4];
    for (slot, lines) in map.iter_mut().zip(&source) {
        let j = target.iter().position(|t| t == lines)?;
        *slot = Family::ALL[j];
    }
    Some(map)
}

/// Every magic square on the same nine cards, in construction order.
///
/// Any two cards can sit in the bottom corners (72 ways) and any of the six
/// cards off their line can take the center, giving 432 squares.
pub fn rearrangements_same_cards(sq: &MagicSquare) -> Vec<MagicSquare> {
    let cards = sq.cards();
    let mut out = Vec::with_capacity(432);
    for &a in &cards {
        for &b in &cards {
            if a == b {
                continue;
            }
            let completion = -(a + b);
            for &c in &cards {
                if c != a && c != b && c != completion {
                    out.push(MagicSquare::from_corners_unchecked(a, b, c));
                }
            }
        }
    }
    out
}

/// The rearrangements that keep every family's lines in that family.
pub fn triplet_fixing_rearrangements(sq: &MagicSquare) -> Vec<MagicSquare> {
    rearrangements_same_cards(sq)
        .into_iter()
        .filter(|other| family_permutation(sq, other) == Some(Family::ALL))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn card(s: &str) -> Card {
        s.parse().unwrap()
    }

    fn order4_square() -> MagicSquare {
        "0000 1010 2020 0101 1111 2121 0202 1212 2222".parse().unwrap()
    }

    fn order2_square() -> MagicSquare {
        "0000 1000 2000 0100 1100 2100 0200 1200 2200".parse().unwrap()
    }

    #[test]
    fn enumeration_is_complete_and_consistent() {
        let all: Vec<GroupElement> = GroupElement::all().collect();
        assert_eq!(all.len(), GROUP_ORDER);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), GROUP_ORDER);
        for n in [0, 1, 1295, 1296, 17000, GROUP_ORDER - 1] {
            assert_eq!(GroupElement::from_index(n), all[n]);
        }
        assert_eq!(all[0], GroupElement::IDENTITY);
    }

    #[test]
    fn identity_text_form() {
        assert_eq!(GroupElement::IDENTITY.to_string(), "0123|012|012|012|012");
        assert_eq!("0123|012|012|012|012".parse::<GroupElement>(), Ok(GroupElement::IDENTITY));
        assert_eq!(GroupElement::IDENTITY.apply(card("0120")), card("0120"));
    }

    #[test]
    fn malformed_elements_are_rejected() {
        for bad in ["0123|012|012|012", "0113|012|012|012|012", "0123|011|012|012|012", "0124|012|012|012|012", "0123|012|012|012|0123"] {
            assert!(matches!(bad.parse::<GroupElement>(), Err(Error::GroupElement(..))), "{bad}");
        }
    }

    #[test]
    fn swapping_color_and_shading() {
        // Features 2 and 3 exchanged; both value maps are the involution 0<->1.
        let g: GroupElement = "0132|012|012|102|102".parse().unwrap();
        assert_eq!(g.apply(card("1202")), card("1221"));
        assert_eq!(g.apply(card("0012")), card("0020"));
        assert_eq!(g.compose(&g), GroupElement::IDENTITY);
    }

    #[test]
    fn card_orbit_and_stabilizer() {
        let orbit = orbit(card("1201"), |g, &c| g.apply(c));
        assert_eq!(orbit.len(), 81);
        assert_eq!(stabilizer_order_card(card("0000")), 384);
        assert_eq!(stabilizer_order_card(card("2102")), 384);
    }

    #[test]
    fn set_stabilizers() {
        let reps = ["0000 0001 0002", "0000 0011 0022", "0000 0111 0222", "0000 1111 2222"];
        for (k, rep) in (1..=4).zip(reps) {
            let set: SetTriple = rep.parse().unwrap();
            assert_eq!(set.order(), k);
            let stab = stabilizer_order_set(set) as u64;
            assert_eq!(stab, set_stabilizer_formula(k).unwrap());
        }
        assert_eq!(set_stabilizer_formula(1), Ok(288));
    }

    #[test]
    fn order2_square_group_data() {
        let sq = order2_square();
        assert_eq!(stabilizer_order_square(&sq), 8);
        assert_eq!(orbit(sq, |g, s| g.apply_square(s)).len(), 3888);
    }

    #[test]
    fn corrected_orbit_counts() {
        assert_eq!(orbit_count_squares(OrderTuple([1, 2, 3, 3])), Ok(7776));
        assert_eq!(orbit_count_squares(OrderTuple([3, 3, 3, 3])), Ok(31104));
        assert_eq!(orbit_count_squares(OrderTuple([1, 1, 2, 2])), Ok(3888));
        assert_eq!(
            orbit_count_squares(OrderTuple([1, 1, 1, 1])),
            Err(Error::Inadmissible([1, 1, 1, 1]))
        );
        assert_eq!(
            orbit_count_squares(OrderTuple([4, 4, 4, 4])),
            Err(Error::Inadmissible([4, 4, 4, 4]))
        );
    }

    #[test]
    fn printed_formula_disagrees() {
        assert_eq!(printed_orbit_formula(OrderTuple([3, 3, 3, 3])), Ok(Ratio::from_integer(62208)));
        assert_eq!(printed_orbit_formula(OrderTuple([1, 1, 2, 2])), Ok(Ratio::from_integer(54)));
    }

    #[test]
    fn shear_wrap_schematic() {
        let start = [
            ["A", "B", "C"],
            ["A+X", "B+X", "C+X"],
            ["A+2X", "B+2X", "C+2X"],
        ];
        let expected = [
            ["C", "B", "A"],
            ["A+X", "C+X", "B+X"],
            ["B+2X", "A+2X", "C+2X"],
        ];
        assert_eq!(GeometricTransform::ShearWrap.apply_grid(start), expected);
    }

    #[test]
    fn family_maps() {
        use Family::*;
        use GeometricTransform as T;
        assert_eq!(T::ShearWrap.family_map(), [Rows, Diag, Cols, Anti]);
        assert_eq!(T::ReflectMainDiag.family_map(), [Cols, Rows, Diag, Anti]);
        assert_eq!(T::ReflectAntiDiag.family_map(), [Cols, Rows, Diag, Anti]);
        assert_eq!(T::ReflectMidCol.family_map(), [Rows, Cols, Anti, Diag]);
        assert_eq!(T::ReflectMidRow.family_map(), [Rows, Cols, Anti, Diag]);
        for t in [T::Rotate180, T::CycleRows, T::CycleCols] {
            assert_eq!(t.family_map(), Family::ALL);
        }
    }

    #[test]
    fn transforms_keep_squares_magic() {
        for t in GeometricTransform::ALL {
            let out = t.apply(&order4_square());
            assert!(MagicSquare::validate(out.cells()).is_ok(), "{t:?}");
        }
        let twice = GeometricTransform::Rotate180.apply(&GeometricTransform::Rotate180.apply(&order4_square()));
        assert_eq!(twice, order4_square());
    }

    #[test]
    fn reflection_exchanges_row_and_column_orders() {
        let sq: MagicSquare = "1002 1021 1010 1102 1121 1110 1202 1221 1210".parse().unwrap();
        let before = sq.profile();
        let after = GeometricTransform::ReflectMainDiag.apply(&sq).profile();
        assert_eq!(before.square_type.to_string(), "(1-2;3-3)");
        assert_eq!(after.square_type, before.square_type);
        let [r, c, d, a] = before.family_orders.0;
        assert_ne!(r, c);
        assert_eq!(after.family_orders, OrderTuple([c, r, d, a]));
    }

    #[test]
    fn same_card_rearrangements() {
        let sq = order4_square();
        let all = rearrangements_same_cards(&sq);
        assert_eq!(all.len(), 432);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 432);
        assert!(all.iter().all(|s| s.support() == sq.support()));
        assert_eq!(triplet_fixing_rearrangements(&sq).len(), 18);
        let buckets = all.iter().map(|s| family_permutation(&sq, s).unwrap()).counts();
        assert_eq!(buckets.len(), 24);
        assert!(buckets.values().all(|&n| n == 18));
    }
}
