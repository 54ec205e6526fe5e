//! Magic SET squares: construction from three corners, validation, the
//! four triplet families of lines, and the intrinsic classification data
//! (order, triplet orders, diversity, type, feature distribution).
//!
//! Grid coordinates put row 0 at the top and column 0 on the left.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::card::{is_set, Card, SetTriple, FEATURES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPos {
    pub row: usize,
    pub col: usize,
}

impl GridPos {
    pub const fn new(row: usize, col: usize) -> GridPos {
        GridPos { row, col }
    }

    /// All nine positions in row-major order.
    pub fn all() -> impl Iterator<Item = GridPos> {
        (0..9).map(|i| GridPos::new(i / 3, i % 3))
    }

    pub fn index(self) -> usize {
        self.row * 3 + self.col
    }
}

/// One of the four families of three parallel lines.
///
/// `Diag` lines have constant `(col - row) mod 3` and `Anti` lines constant
/// `(col + row) mod 3`; each family includes the two broken lines that wrap
/// around the edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rows,
    Cols,
    Diag,
    Anti,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Rows, Family::Cols, Family::Diag, Family::Anti];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Rows => "rows",
            Family::Cols => "cols",
            Family::Diag => "diag",
            Family::Anti => "anti",
        }
    }

    /// Positions of line `i` (0..3) of this family, top to bottom.
    pub fn line(self, i: usize) -> [GridPos; 3] {
        assert!(i < 3, "line index {i} out of range");
        std::array::from_fn(|r| match self {
            Family::Rows => GridPos::new(i, r),
            Family::Cols => GridPos::new(r, i),
            Family::Diag => GridPos::new(r, (r + i) % 3),
            Family::Anti => GridPos::new(r, (i + 3 - r) % 3),
        })
    }

    pub fn lines(self) -> [[GridPos; 3]; 3] {
        std::array::from_fn(|i| self.line(i))
    }
}

/// The twelve lines of a square as (family, index within family, positions).
pub fn all_lines() -> [(Family, usize, [GridPos; 3]); 12] {
    std::array::from_fn(|n| {
        let family = Family::ALL[n / 3];
        (family, n % 3, family.line(n % 3))
    })
}

/// A line that fails to be a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineViolation {
    pub family: Family,
    pub index: usize,
    pub cards: [Card; 3],
}

/// Everything wrong with a candidate grid.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ViolationReport {
    pub duplicate_cards: Vec<Card>,
    pub failing_lines: Vec<LineViolation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.duplicate_cards.is_empty() && self.failing_lines.is_empty()
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.duplicate_cards.is_empty() {
            parts.push(format!("repeated cards {}", self.duplicate_cards.iter().join(" ")));
        }
        for v in &self.failing_lines {
            parts.push(format!(
                "{} line {} ({}) is not a set",
                v.family.name(),
                v.index,
                v.cards.iter().join(" ")
            ));
        }
        f.write_str(&parts.join("; "))
    }
}

/// A 3×3 grid of nine distinct cards in which all twelve lines are sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MagicSquare {
    cells: [[Card; 3]; 3],
}

impl MagicSquare {
    /// Builds the square with `a` bottom-left, `b` bottom-right and `c` in
    /// the center.
    pub fn build_from_corners(a: Card, b: Card, c: Card) -> Result<MagicSquare> {
        if a == b {
            return Err(Error::Corners("bottom corners are equal"));
        }
        if c == a || c == b {
            return Err(Error::Corners("center repeats a bottom corner"));
        }
        if is_set(a, b, c) {
            return Err(Error::Corners("center completes the bottom corners to a set"));
        }
        Ok(MagicSquare::from_corners_unchecked(a, b, c))
    }

    pub(crate) fn from_corners_unchecked(a: Card, b: Card, c: Card) -> MagicSquare {
        MagicSquare {
            cells: [
                [-b - c, a + b - c, -a - c],
                [-a + b + c, c, a - b + c],
                [a, -a - b, b],
            ],
        }
    }

    /// Checks distinctness and all twelve lines.
    pub fn validate(cells: [[Card; 3]; 3]) -> std::result::Result<MagicSquare, ViolationReport> {
        let mut report = ViolationReport::default();
        let flat: Vec<Card> = cells.iter().flatten().copied().collect();
        report.duplicate_cards = flat.iter().copied().duplicates().sorted().collect();
        for (family, index, line) in all_lines() {
            let cards = line.map(|p| cells[p.row][p.col]);
            if !is_set(cards[0], cards[1], cards[2]) {
                report.failing_lines.push(LineViolation { family, index, cards });
            }
        }
        if report.is_empty() {
            Ok(MagicSquare { cells })
        } else {
            Err(report)
        }
    }

    pub fn from_cells(cells: [[Card; 3]; 3]) -> Result<MagicSquare> {
        MagicSquare::validate(cells).map_err(Error::InvalidSquare)
    }

    /// Nine cards in row-major order.
    pub fn from_row_major(cards: &[Card]) -> Result<MagicSquare> {
        if cards.len() != 9 {
            return Err(Error::SquareFormat(format!("expected 9 cards, got {}", cards.len())));
        }
        MagicSquare::from_cells(std::array::from_fn(|r| std::array::from_fn(|c| cards[r * 3 + c])))
    }

    pub(crate) fn from_cells_unchecked(cells: [[Card; 3]; 3]) -> MagicSquare {
        MagicSquare { cells }
    }

    pub fn cells(&self) -> [[Card; 3]; 3] {
        self.cells
    }

    pub fn get(&self, pos: GridPos) -> Card {
        self.cells[pos.row][pos.col]
    }

    /// Cards in row-major order.
    pub fn cards(&self) -> [Card; 9] {
        std::array::from_fn(|i| self.cells[i / 3][i % 3])
    }

    pub fn position_of(&self, card: Card) -> Option<GridPos> {
        GridPos::all().find(|&p| self.get(p) == card)
    }

    /// The construction corners: (bottom-left, bottom-right, center).
    pub fn corners(&self) -> (Card, Card, Card) {
        (self.cells[2][0], self.cells[2][2], self.cells[1][1])
    }

    pub fn line(&self, family: Family, index: usize) -> SetTriple {
        let [a, b, c] = family.line(index).map(|p| self.get(p));
        SetTriple::new(a, b, c).expect("lines of a magic square are sets")
    }

    /// The twelve lines, grouped by family in `Family::ALL` order.
    pub fn lines(&self) -> [[SetTriple; 3]; 4] {
        Family::ALL.map(|family| std::array::from_fn(|i| self.line(family, i)))
    }

    pub fn family_order(&self, family: Family) -> u8 {
        let order = self.line(family, 0).order();
        debug_assert!(
            (1..3).all(|i| self.line(family, i).order() == order),
            "parallel lines of {self} differ in order"
        );
        order
    }

    /// True when the three lines of every family share one order.
    pub fn parallel_orders_agree(&self) -> bool {
        Family::ALL.iter().all(|&family| {
            let order = self.line(family, 0).order();
            (1..3).all(|i| self.line(family, i).order() == order)
        })
    }

    /// Orders of the (rows, cols, diag, anti) families.
    pub fn family_orders(&self) -> OrderTuple {
        OrderTuple(Family::ALL.map(|f| self.family_order(f)))
    }

    /// Bitmask of the features that are not constant across the nine cards.
    pub fn varying_features(&self) -> u8 {
        let first = self.cells[0][0].coords();
        let mut mask = 0u8;
        for card in self.cards() {
            let coords = card.coords();
            for f in 0..FEATURES {
                if coords[f] != first[f] {
                    mask |= 1 << f;
                }
            }
        }
        mask
    }

    /// Number of features that vary across the square.
    pub fn order(&self) -> u8 {
        self.varying_features().count_ones() as u8
    }

    pub fn profile(&self) -> SquareProfile {
        let order = self.order();
        let family_orders = self.family_orders();
        let orders = family_orders.0.map(u32::from);
        SquareProfile {
            order,
            family_orders,
            diversity: Ratio::new(3 * orders.iter().sum::<u32>(), 12),
            rc_diversity: Ratio::new(3 * (orders[0] + orders[1]), 6),
            square_type: SquareType::from_orders(family_orders),
        }
    }

    pub fn feature_distribution(&self) -> FeatureDistribution {
        let mut varying_in = [0u8; FEATURES];
        for family in Family::ALL {
            let [a, b, c] = self.line(family, 0).cards().map(Card::coords);
            for f in 0..FEATURES {
                if a[f] != b[f] {
                    debug_assert!(a[f] != c[f] && b[f] != c[f]);
                    varying_in[f] |= 1 << family.index();
                }
            }
        }
        FeatureDistribution { varying_in }
    }

    pub fn support(&self) -> Support {
        let mut cards = self.cards();
        cards.sort_unstable();
        Support(cards)
    }

    pub fn to_document(&self, with_profile: bool) -> SquareDocument {
        SquareDocument {
            cells: self.cells,
            profile: with_profile.then(|| ProfileDocument::from(&self.profile())),
        }
    }
}

impl fmt::Display for MagicSquare {
    /// Nine card strings, row-major, separated by single spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cards().iter().join(" "))
    }
}

impl FromStr for MagicSquare {
    type Err = Error;

    fn from_str(text: &str) -> Result<MagicSquare> {
        let cards: Vec<Card> = text.split_whitespace().map(str::parse).collect::<Result<_>>()?;
        MagicSquare::from_row_major(&cards)
    }
}

pub fn build_from_corners(a: Card, b: Card, c: Card) -> Result<MagicSquare> {
    MagicSquare::build_from_corners(a, b, c)
}

/// Family orders indexed by `Family`: (rows, cols, diag, anti).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderTuple(pub [u8; 4]);

impl OrderTuple {
    pub fn get(self, family: Family) -> u8 {
        self.0[family.index()]
    }

    pub fn sorted(self) -> [u8; 4] {
        let mut m = self.0;
        m.sort_unstable();
        m
    }

    /// Square order implied by the triplet orders (their sum is three times it).
    pub fn square_order(self) -> u8 {
        self.0.iter().sum::<u8>() / 3
    }

    pub fn is_admissible(self) -> bool {
        let sorted = self.sorted();
        let sum: u8 = sorted.iter().sum();
        sum.is_multiple_of(3)
            && admissible_distributions(sum / 3).is_ok_and(|d| d.contains(&sorted))
    }
}

impl fmt::Display for OrderTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [r, c, d, a] = self.0;
        write!(f, "({r},{c},{d},{a})")
    }
}

impl Serialize for OrderTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Triplet-order multisets (sorted) that occur for a square of `order`.
pub fn admissible_distributions(order: u8) -> Result<&'static [[u8; 4]]> {
    match order {
        2 => Ok(&[[1, 1, 2, 2]]),
        3 => Ok(&[[1, 2, 3, 3], [2, 2, 2, 3]]),
        4 => Ok(&[[1, 3, 4, 4], [2, 2, 4, 4], [2, 3, 3, 4], [3, 3, 3, 3]]),
        other => Err(Error::OrderOutOfRange(u32::from(other))),
    }
}

/// Canonical type label `(x-y;z-w)`: unordered row/column orders and
/// unordered diagonal/anti-diagonal orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareType {
    x: u8,
    y: u8,
    z: u8,
    w: u8,
}

impl SquareType {
    pub fn from_orders(orders: OrderTuple) -> SquareType {
        let [r, c, d, a] = orders.0;
        SquareType { x: r.min(c), y: r.max(c), z: d.min(a), w: d.max(a) }
    }

    pub fn rc_pair(self) -> (u8, u8) {
        (self.x, self.y)
    }

    pub fn da_pair(self) -> (u8, u8) {
        (self.z, self.w)
    }

    pub fn order(self) -> u8 {
        (self.x + self.y + self.z + self.w) / 3
    }

    pub fn rc_diversity(self) -> Ratio<u32> {
        Ratio::new(u32::from(self.x + self.y), 2)
    }

    /// The type with row/column and diagonal/anti-diagonal pairs exchanged.
    pub fn transposed(self) -> SquareType {
        SquareType { x: self.z, y: self.w, z: self.x, w: self.y }
    }

    /// Number of ordered family-order tuples with this type (1, 2 or 4).
    pub fn multiplicity(self) -> u64 {
        match (self.x == self.y, self.z == self.w) {
            (true, true) => 1,
            (true, false) | (false, true) => 2,
            (false, false) => 4,
        }
    }

    /// The ordered tuples (rows, cols, diag, anti) carrying this type.
    pub fn ordered_tuples(self) -> Vec<OrderTuple> {
        let mut out: Vec<OrderTuple> = [(self.x, self.y), (self.y, self.x)]
            .into_iter()
            .cartesian_product([(self.z, self.w), (self.w, self.z)])
            .map(|((r, c), (d, a))| OrderTuple([r, c, d, a]))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_realizable(self) -> bool {
        OrderTuple([self.x, self.y, self.z, self.w]).is_admissible()
    }

    /// All types admitted by the triplet-order distributions, sorted.
    pub fn realizable() -> Vec<SquareType> {
        let mut types: Vec<SquareType> = (2..=4)
            .flat_map(|k| admissible_distributions(k).unwrap().iter())
            .flat_map(|m| m.iter().copied().permutations(4))
            .map(|p| SquareType::from_orders(OrderTuple([p[0], p[1], p[2], p[3]])))
            .collect();
        types.sort_unstable();
        types.dedup();
        types
    }

    fn parse_error(text: &str) -> Error {
        Error::SquareType(text.to_string(), SquareType::realizable().iter().join(", "))
    }
}

impl fmt::Display for SquareType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}-{};{}-{})", self.x, self.y, self.z, self.w)
    }
}

impl FromStr for SquareType {
    type Err = Error;

    /// Accepts only canonical (`x <= y`, `z <= w`) realizable labels.
    fn from_str(text: &str) -> Result<SquareType> {
        let inner = text
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| SquareType::parse_error(text))?;
        let digits: Vec<u8> = inner
            .split([';', '-'])
            .map(|s| s.parse::<u8>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| SquareType::parse_error(text))?;
        let [x, y, z, w] = digits[..] else {
            return Err(SquareType::parse_error(text));
        };
        let ty = SquareType { x, y, z, w };
        if x > y || z > w || !ty.is_realizable() || ty.to_string() != text {
            return Err(SquareType::parse_error(text));
        }
        Ok(ty)
    }
}

impl Serialize for SquareType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SquareType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<SquareType, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquareProfile {
    pub order: u8,
    pub family_orders: OrderTuple,
    pub diversity: Ratio<u32>,
    pub rc_diversity: Ratio<u32>,
    pub square_type: SquareType,
}

/// Exact decimal text for ratios whose denominator divides a power of ten,
/// `p/q` otherwise.
pub fn ratio_text(r: Ratio<u32>) -> String {
    let (numer, denom) = (*r.numer(), *r.denom());
    let mut scale = 1u32;
    let mut digits = 0usize;
    while !scale.is_multiple_of(denom) && digits < 9 {
        scale *= 10;
        digits += 1;
    }
    if !scale.is_multiple_of(denom) {
        return format!("{numer}/{denom}");
    }
    if digits == 0 {
        return (numer / denom).to_string();
    }
    let scaled = numer * (scale / denom);
    let text = format!("{}.{:0width$}", scaled / scale, scaled % scale, width = digits);
    text.trim_end_matches('0').to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyOrdersDocument {
    pub rows: u8,
    pub cols: u8,
    pub diag: u8,
    pub anti: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProfileDocument {
    pub order: u8,
    pub family_orders: FamilyOrdersDocument,
    pub diversity: String,
    pub rc_diversity: String,
    #[serde(rename = "type")]
    pub square_type: String,
}

impl From<&SquareProfile> for ProfileDocument {
    fn from(p: &SquareProfile) -> ProfileDocument {
        let [rows, cols, diag, anti] = p.family_orders.0;
        ProfileDocument {
            order: p.order,
            family_orders: FamilyOrdersDocument { rows, cols, diag, anti },
            diversity: ratio_text(p.diversity),
            rc_diversity: ratio_text(p.rc_diversity),
            square_type: p.square_type.to_string(),
        }
    }
}

/// Structured square format: a 3×3 array of card strings, top row first,
/// with an optional profile block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareDocument {
    pub cells: [[Card; 3]; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileDocument>,
}

impl TryFrom<SquareDocument> for MagicSquare {
    type Error = Error;

    fn try_from(doc: SquareDocument) -> Result<MagicSquare> {
        MagicSquare::from_cells(doc.cells)
    }
}

/// Which families each feature varies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureDistribution {
    /// Per feature, a bitmask over `Family::index()`; zero for constant features.
    pub varying_in: [u8; FEATURES],
}

impl FeatureDistribution {
    /// Bitmask of the features that vary along lines of `family`.
    pub fn family_features(&self, family: Family) -> u8 {
        (0..FEATURES)
            .filter(|&f| self.varying_in[f] & (1 << family.index()) != 0)
            .fold(0, |mask, f| mask | (1 << f))
    }

    /// Number of features that vary in both families.
    pub fn both_different(&self, a: Family, b: Family) -> u32 {
        (self.family_features(a) & self.family_features(b)).count_ones()
    }

    pub fn pattern(&self) -> FeaturePattern {
        FeaturePattern::canonical(Family::ALL.map(|f| self.family_features(f)))
    }
}

/// Per-family sets of varying features, up to renaming the features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeaturePattern([u8; 4]);

impl FeaturePattern {
    fn canonical(masks: [u8; 4]) -> FeaturePattern {
        (0..FEATURES)
            .permutations(FEATURES)
            .map(|perm| {
                let mut renamed = masks.map(|m| {
                    (0..FEATURES)
                        .filter(|&f| m & (1 << f) != 0)
                        .fold(0u8, |acc, f| acc | (1 << perm[f]))
                });
                renamed.sort_unstable();
                FeaturePattern(renamed)
            })
            .min()
            .expect("24 permutations")
    }

    /// Parses a letter pattern such as `"x, yz, xyz, xyz"`.
    pub fn parse(text: &str) -> Option<FeaturePattern> {
        let groups: Vec<&str> = text.split(',').map(str::trim).collect();
        if groups.len() != 4 {
            return None;
        }
        let mut masks = [0u8; 4];
        for (mask, group) in masks.iter_mut().zip(&groups) {
            for ch in group.chars() {
                *mask |= 1 << "xyzw".find(ch)?;
            }
        }
        Some(FeaturePattern::canonical(masks))
    }
}

/// Feature distributions for each triplet-order multiset.
pub const KNOWN_FEATURE_PATTERNS: [([u8; 4], &str); 7] = [
    ([1, 1, 2, 2], "x, y, xy, xy"),
    ([1, 2, 3, 3], "x, yz, xyz, xyz"),
    ([2, 2, 2, 3], "xy, xz, yz, xyz"),
    ([1, 3, 4, 4], "x, yzw, xyzw, xyzw"),
    ([2, 2, 4, 4], "xy, zw, xyzw, xyzw"),
    ([2, 3, 3, 4], "xy, xzw, yzw, xyzw"),
    ([3, 3, 3, 3], "xyz, xyw, xzw, yzw"),
];

/// The expected pattern for a sorted triplet-order multiset.
pub fn expected_feature_pattern(distribution: [u8; 4]) -> Option<FeaturePattern> {
    KNOWN_FEATURE_PATTERNS
        .iter()
        .find(|(d, _)| *d == distribution)
        .and_then(|(_, text)| FeaturePattern::parse(text))
}

/// The nine cards of a square, sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support([Card; 9]);

impl Support {
    pub fn cards(&self) -> [Card; 9] {
        self.0
    }

    /// One bit per deck index.
    pub fn bits(&self) -> u128 {
        self.0.iter().fold(0u128, |acc, c| acc | (1u128 << c.index()))
    }

    pub fn contains(&self, card: Card) -> bool {
        self.0.binary_search(&card).is_ok()
    }

    /// Every pair completes to a set inside the support.
    pub fn is_closed(&self) -> bool {
        self.0.iter().tuple_combinations().all(|(&a, &b)| self.contains(-(a + b)))
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.iter().join(" "))
    }
}
