//! SET cards as vectors over the three-element field.
//!
//! A card is a point of F₃⁴. Coordinates are stored in the fixed feature
//! order shape, number, color, shading, and every text format uses that
//! order. Three distinct cards form a set exactly when their coordinatewise
//! sum vanishes mod 3.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of features on a card.
pub const FEATURES: usize = 4;

/// Number of cards in the deck.
pub const DECK_SIZE: usize = 81;

/// Number of sets in the deck.
pub const SET_COUNT: usize = 1080;

/// A coordinate value in {0, 1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trit(u8);

impl Trit {
    pub const ZERO: Trit = Trit(0);
    pub const ONE: Trit = Trit(1);
    pub const TWO: Trit = Trit(2);

    pub const fn new(value: u8) -> Option<Trit> {
        if value < 3 {
            Some(Trit(value))
        } else {
            None
        }
    }

    pub const fn value(self) -> u8 {
        self.0
    }
}

/// The four card features, in coordinate order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    Shape,
    Number,
    Color,
    Shading,
}

impl Feature {
    pub const ALL: [Feature; FEATURES] =
        [Feature::Shape, Feature::Number, Feature::Color, Feature::Shading];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Shape => "shape",
            Feature::Number => "number",
            Feature::Color => "color",
            Feature::Shading => "shading",
        }
    }

    /// Word for a value of this feature. Shapes are given in the singular.
    pub fn value_name(self, value: Trit) -> &'static str {
        let names: [&str; 3] = match self {
            Feature::Shape => ["oval", "diamond", "squiggle"],
            Feature::Number => ["one", "two", "three"],
            Feature::Color => ["red", "green", "purple"],
            Feature::Shading => ["empty", "striped", "filled"],
        };
        names[value.value() as usize]
    }
}

/// A SET card: four trits in feature order.
///
/// Cards order lexicographically by their text form, so `"0000" < "0001"`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Card([u8; FEATURES]);

impl Card {
    pub const ZERO: Card = Card([0; FEATURES]);

    pub fn new(coords: [u8; FEATURES]) -> Result<Card> {
        for (position, &v) in coords.iter().enumerate() {
            if v > 2 {
                return Err(Error::CardDigit {
                    position,
                    found: char::from_digit(u32::from(v), 36).unwrap_or('?'),
                });
            }
        }
        Ok(Card(coords))
    }

    pub const fn from_trits(trits: [Trit; FEATURES]) -> Card {
        Card([trits[0].0, trits[1].0, trits[2].0, trits[3].0])
    }

    /// Card with base-3 digits of `index` (most significant first).
    ///
    /// # Panics
    /// Panics if `index >= 81`.
    pub fn from_index(index: usize) -> Card {
        assert!(index < DECK_SIZE, "card index {index} out of range");
        let mut coords = [0u8; FEATURES];
        let mut rem = index;
        for slot in coords.iter_mut().rev() {
            *slot = (rem % 3) as u8;
            rem /= 3;
        }
        Card(coords)
    }

    /// Position of this card in the sorted deck, 0..81.
    pub fn index(self) -> usize {
        self.0.iter().fold(0, |acc, &d| acc * 3 + d as usize)
    }

    pub fn coords(self) -> [u8; FEATURES] {
        self.0
    }

    pub fn coord(self, feature: Feature) -> Trit {
        Trit(self.0[feature.index()])
    }

    /// All 81 cards in ascending order.
    pub fn all() -> impl Iterator<Item = Card> + Clone {
        (0..DECK_SIZE).map(Card::from_index)
    }

    /// Plain-English description, e.g. `"two filled red ovals"`.
    pub fn describe(self) -> String {
        let count = self.coord(Feature::Number);
        let shape = Feature::Shape.value_name(self.coord(Feature::Shape));
        format!(
            "{} {} {} {}{}",
            Feature::Number.value_name(count),
            Feature::Shading.value_name(self.coord(Feature::Shading)),
            Feature::Color.value_name(self.coord(Feature::Color)),
            shape,
            if count.value() == 0 { "" } else { "s" },
        )
    }
}

impl Add for Card {
    type Output = Card;

    fn add(self, rhs: Card) -> Card {
        let mut out = [0u8; FEATURES];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (self.0[i] + rhs.0[i]) % 3;
        }
        Card(out)
    }
}

impl Neg for Card {
    type Output = Card;

    fn neg(self) -> Card {
        let mut out = [0u8; FEATURES];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (3 - self.0[i]) % 3;
        }
        Card(out)
    }
}

impl Sub for Card {
    type Output = Card;

    fn sub(self, rhs: Card) -> Card {
        self + (-rhs)
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Card({self})")
    }
}

impl FromStr for Card {
    type Err = Error;

    fn from_str(text: &str) -> Result<Card> {
        let chars: Vec<char> = text.chars().collect();
        if chars.len() != FEATURES {
            return Err(Error::CardLength(chars.len()));
        }
        let mut coords = [0u8; FEATURES];
        for (position, (&ch, slot)) in chars.iter().zip(coords.iter_mut()).enumerate() {
            *slot = match ch {
                '0' => 0,
                '1' => 1,
                '2' => 2,
                found => return Err(Error::CardDigit { position, found }),
            };
        }
        Ok(Card(coords))
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Card, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

pub fn parse_card(text: &str) -> Result<Card> {
    text.parse()
}

/// True iff the three cards are pairwise distinct and sum to zero.
pub fn is_set(a: Card, b: Card, c: Card) -> bool {
    a != b && b != c && a != c && a + b + c == Card::ZERO
}

/// The unique card completing `a` and `b` to a set, `-a-b`.
pub fn third_card(a: Card, b: Card) -> Result<Card> {
    if a == b {
        return Err(Error::SameCards(a));
    }
    Ok(-(a + b))
}

/// Number of features in which the three cards are pairwise different.
pub fn set_order(cards: [Card; 3]) -> Result<u8> {
    SetTriple::new(cards[0], cards[1], cards[2]).map(SetTriple::order)
}

/// A set, stored with its cards sorted ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetTriple([Card; 3]);

impl SetTriple {
    pub fn new(a: Card, b: Card, c: Card) -> Result<SetTriple> {
        if !is_set(a, b, c) {
            return Err(Error::NotASet(a, b, c));
        }
        let mut cards = [a, b, c];
        cards.sort_unstable();
        Ok(SetTriple(cards))
    }

    pub fn cards(&self) -> [Card; 3] {
        self.0
    }

    pub fn contains(&self, card: Card) -> bool {
        self.0.contains(&card)
    }

    /// The order of the set, 1..=4.
    pub fn order(self) -> u8 {
        let [a, b, c] = self.0.map(Card::coords);
        (0..FEATURES).filter(|&f| a[f] != b[f] && b[f] != c[f] && a[f] != c[f]).count() as u8
    }
}

impl fmt::Display for SetTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for SetTriple {
    type Err = Error;

    fn from_str(text: &str) -> Result<SetTriple> {
        let cards: Vec<Card> = text.split_whitespace().map(str::parse).collect::<Result<_>>()?;
        match cards[..] {
            [a, b, c] => SetTriple::new(a, b, c),
            _ => Err(Error::SetLength(cards.len())),
        }
    }
}

impl Serialize for SetTriple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Every set in the deck, each once, in ascending order.
pub fn enumerate_sets() -> impl Iterator<Item = SetTriple> {
    Card::all().flat_map(|a| {
        Card::all().filter(move |&b| b > a).filter_map(move |b| {
            let c = -(a + b);
            (c > b).then_some(SetTriple([a, b, c]))
        })
    })
}

/// Closed-form number of sets of order `k`: C(4,k)·3^(4−k)·6^(k−1).
pub fn count_sets_by_order(k: u32) -> Result<u64> {
    if !(1..=4).contains(&k) {
        return Err(Error::OrderOutOfRange(k));
    }
    let choose = [1u64, 4, 6, 4, 1][k as usize];
    Ok(choose * 3u64.pow(4 - k) * 6u64.pow(k - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn card(s: &str) -> Card {
        s.parse().unwrap()
    }

    #[test]
    fn parses_trit_strings() {
        assert_eq!(card("0000").coords(), [0, 0, 0, 0]);
        assert_eq!(card("2222").coords(), [2, 2, 2, 2]);
        assert_eq!(card("0102").coords(), [0, 1, 0, 2]);
        assert_eq!(card("0102").to_string(), "0102");
    }

    #[test]
    fn parse_errors_name_the_position() {
        assert_eq!("000".parse::<Card>(), Err(Error::CardLength(3)));
        assert_eq!("00000".parse::<Card>(), Err(Error::CardLength(5)));
        assert_eq!(
            "0130".parse::<Card>(),
            Err(Error::CardDigit { position: 2, found: '3' })
        );
        assert_eq!(
            "9999".parse::<Card>(),
            Err(Error::CardDigit { position: 0, found: '9' })
        );
    }

    #[test]
    fn descriptions() {
        assert_eq!(card("0000").describe(), "one empty red oval");
        assert_eq!(card("2222").describe(), "three filled purple squiggles");
        assert_eq!(card("0102").describe(), "two filled red ovals");
    }

    #[test]
    fn arithmetic() {
        assert_eq!(card("0000") + card("1010"), card("1010"));
        assert_eq!(card("2222") + card("1111"), card("0000"));
        assert_eq!(-card("1201"), card("2102"));
    }

    #[test]
    fn set_predicate() {
        assert!(is_set(card("0000"), card("1010"), card("2020")));
        assert!(is_set(card("0000"), card("1111"), card("2222")));
        assert!(!is_set(card("0000"), card("0000"), card("0000")));
        assert!(!is_set(card("0000"), card("0001"), card("0001")));
    }

    #[test]
    fn completion() {
        assert_eq!(third_card(card("0000"), card("1010")), Ok(card("2020")));
        assert_eq!(third_card(card("0202"), card("2222")), Ok(card("1212")));
        assert_eq!(third_card(card("1111"), card("1111")), Err(Error::SameCards(card("1111"))));
    }

    #[test]
    fn orders() {
        assert_eq!(set_order([card("0000"), card("0001"), card("0002")]), Ok(1));
        assert_eq!(set_order([card("0000"), card("1111"), card("2222")]), Ok(4));
        assert_eq!(set_order([card("0000"), card("1010"), card("2020")]), Ok(2));
        assert!(matches!(
            set_order([card("0000"), card("0001"), card("0000")]),
            Err(Error::NotASet(..))
        ));
    }

    #[test]
    fn closed_form_counts() {
        let counts: Vec<u64> = (1..=4).map(|k| count_sets_by_order(k).unwrap()).collect();
        assert_eq!(counts, [108, 324, 432, 216]);
        assert_eq!(counts.iter().sum::<u64>(), 1080);
        assert_eq!(count_sets_by_order(0), Err(Error::OrderOutOfRange(0)));
        assert_eq!(count_sets_by_order(5), Err(Error::OrderOutOfRange(5)));
    }

    #[test]
    fn index_roundtrip_and_ordering() {
        let deck: Vec<Card> = Card::all().collect();
        assert_eq!(deck.len(), DECK_SIZE);
        assert!(deck.windows(2).all(|w| w[0] < w[1] && w[0].to_string() < w[1].to_string()));
        for (i, c) in deck.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }

    #[test]
    fn set_triple_text_form_is_sorted() {
        let s = SetTriple::new(card("2020"), card("0000"), card("1010")).unwrap();
        assert_eq!(s.to_string(), "0000 1010 2020");
        assert_eq!("2020 1010 0000".parse::<SetTriple>(), Ok(s));
    }
}
