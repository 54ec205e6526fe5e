//! End-to-end verification: recomputes every count and theorem from
//! scratch and compares it with the published values.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::card::{count_sets_by_order, enumerate_sets, is_set, Card, SetTriple, DECK_SIZE, SET_COUNT};
use crate::census::{
    classify_census, support_representatives, CensusReport, Check, CheckStatus, ARRANGEMENTS_PER_SUPPORT,
};
use crate::game::{audit_literal_strategy, audit_strategy, exact_solve, max_setfree_subset, sets_within, GameState, Outcome};
use crate::square::{MagicSquare, OrderTuple, SquareType};
use crate::symmetry::{
    family_permutation, orbit, orbit_count_squares, rearrangements_same_cards, set_stabilizer_formula,
    square_stabilizer_formula, stabilizer_order_card, stabilizer_order_set, stabilizer_order_square,
    GroupElement, GROUP_ORDER,
};

/// A group of checks with its wall-clock time and time budget.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Criterion {
    pub name: &'static str,
    pub checks: Vec<Check>,
    #[serde(with = "seconds")]
    pub elapsed: Duration,
    #[serde(with = "seconds")]
    pub budget: Duration,
}

mod seconds {
    use std::time::Duration;

    pub fn serialize<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.elapsed <= self.budget && self.checks.iter().all(Check::passed)
    }
}

fn timed(name: &'static str, budget_secs: u64, run: impl FnOnce() -> Vec<Check>) -> Criterion {
    let start = Instant::now();
    let checks = run();
    Criterion { name, checks, elapsed: start.elapsed(), budget: Duration::from_secs(budget_secs) }
}

pub fn set_census() -> Vec<Check> {
    let sets: Vec<SetTriple> = enumerate_sets().collect();
    let mut checks = vec![
        Check::compare("cards in the deck", DECK_SIZE, Card::all().count()),
        Check::compare("sets in the deck", SET_COUNT, sets.len()),
        Check::compare("enumerated sets are distinct", sets.len(), sets.iter().unique().count()),
    ];
    let counts = sets.iter().map(|s| s.order()).counts();
    for (k, published) in (1u8..=4).zip([108u64, 324, 432, 216]) {
        let brute = counts.get(&k).copied().unwrap_or(0) as u64;
        checks.push(Check::compare(format!("sets of order {k}"), published, brute));
        checks.push(Check::compare(
            format!("closed form for order {k}"),
            brute,
            count_sets_by_order(u32::from(k)).expect("1..=4"),
        ));
    }
    // A triple is a set iff every feature is all-same or all-different.
    let by_features = |a: Card, b: Card, c: Card| {
        let (a, b, c) = (a.coords(), b.coords(), c.coords());
        a != b && (0..4).all(|f| (a[f] == b[f]) == (b[f] == c[f]) && (a[f] == b[f]) == (a[f] == c[f]))
    };
    let disagreements = Card::all()
        .tuple_combinations()
        .filter(|&(a, b)| a < b)
        .flat_map(|(a, b)| Card::all().filter(move |&c| c > b).map(move |c| (a, b, c)))
        .filter(|&(a, b, c)| is_set(a, b, c) != by_features(a, b, c))
        .count();
    checks.push(Check::compare("triples where the two set definitions disagree", 0usize, disagreements));
    checks
}

pub fn square_census(report: &CensusReport) -> Vec<Check> {
    let mut checks = vec![Check::compare("total squares", 505_440u64, report.total_squares)];
    for (order, published) in [(2u8, 23_328u64), (3, 155_520), (4, 326_592)] {
        let computed = report.by_order.get(&order).copied().unwrap_or(0);
        checks.push(Check::compare(format!("squares of order {order}"), published, computed));
    }
    checks.push(Check::compare("distinct labeled grids", report.total_squares, report.distinct_grids));
    checks
}

fn checks_matching(report: &CensusReport, keep: impl Fn(&str) -> bool) -> Vec<Check> {
    report.formula_checks.iter().filter(|c| keep(&c.claim)).cloned().collect()
}

pub fn type_census(report: &CensusReport) -> Vec<Check> {
    checks_matching(report, |claim| {
        claim == "number of types"
            || claim == "type counts sum to total"
            || claim.starts_with("rc-diversity of")
            || (claim.starts_with("N(") && !claim.contains('='))
    })
}

pub fn relations(report: &CensusReport) -> Vec<Check> {
    checks_matching(report, |claim| {
        claim.starts_with("ordered tuples behind")
            || claim == "ordered triplet-order tuples present"
            || claim.contains(" = N")
    })
}

/// Per support: 432 arrangements, 18 keeping every family in place, and
/// all 24 family permutations realized equally often.
pub fn same_support_structure(report: &CensusReport, reps: &[MagicSquare]) -> Vec<Check> {
    struct Shape {
        distinct: usize,
        family_fixing: usize,
        permutations_evenly_realized: bool,
    }
    let shapes: Vec<Shape> = reps
        .par_iter()
        .map(|sq| {
            let all = rearrangements_same_cards(sq);
            let buckets = all.iter().map(|other| family_permutation(sq, other)).counts();
            Shape {
                distinct: all.iter().unique().count(),
                family_fixing: buckets.get(&Some(crate::square::Family::ALL)).copied().unwrap_or(0),
                permutations_evenly_realized: buckets.len() == 24
                    && buckets.iter().all(|(k, &n)| k.is_some() && n == 18),
            }
        })
        .collect();
    let bad = |ok: fn(&Shape) -> bool| shapes.iter().filter(|s| !ok(s)).count();
    vec![
        Check::compare("supports", 1170usize, reps.len()),
        Check::compare(
            "census arrangements per support",
            ARRANGEMENTS_PER_SUPPORT.to_string(),
            report.support_class_sizes.keys().join(","),
        ),
        Check::compare("supports without 432 distinct rearrangements", 0usize, bad(|s| s.distinct == 432)),
        Check::compare("supports without 18 family-fixing rearrangements", 0usize, bad(|s| s.family_fixing == 18)),
        Check::compare("supports not realizing all 24 family permutations 18 times each", 0usize, bad(|s| s.permutations_evenly_realized)),
    ]
}

pub fn diversity_law(report: &CensusReport) -> Vec<Check> {
    let total = report.total_squares;
    let laws = &report.laws;
    vec![
        Check::compare("squares with diversity 3k/4", total, laws.diversity_is_three_quarters_order),
        Check::compare("squares with admissible triplet orders", total, laws.admissible_distribution),
        Check::compare("squares matching the feature-distribution table", total, laws.feature_pattern_matches),
        Check::compare("squares with a+b-k both-different features", total, laws.both_different_counts),
        Check::compare("squares whose parallel lines share an order", total, laws.parallel_orders_agree),
    ]
}

/// The first square of each type in census construction order.
pub fn sample_per_type() -> BTreeMap<SquareType, MagicSquare> {
    let mut samples = BTreeMap::new();
    for sq in (0..DECK_SIZE).flat_map(|i| crate::census::squares_with_corner(Card::from_index(i))) {
        samples.entry(sq.profile().square_type).or_insert(sq);
        if samples.len() == 21 {
            break;
        }
    }
    samples
}

pub fn group_checks(report: &CensusReport) -> Vec<Check> {
    let mut checks = Vec::new();
    let zero = Card::ZERO;
    checks.push(Check::compare("group order", GROUP_ORDER, GroupElement::all().count()));
    checks.push(Check::compare("card stabilizer", 384usize, stabilizer_order_card(zero)));
    checks.push(Check::compare("card orbit", 81usize, orbit(zero, |g, &c| g.apply(c)).len()));

    for rep in ["0000 0001 0002", "0000 0011 0022", "0000 0111 0222", "0000 1111 2222"] {
        let set: SetTriple = rep.parse().expect("set");
        let k = set.order();
        let stab = stabilizer_order_set(set) as u64;
        checks.push(Check::compare(
            format!("stabilizer of order-{k} set"),
            set_stabilizer_formula(k).expect("1..=4"),
            stab,
        ));
        let orbit_size = orbit(set, |g, s| g.apply_set(*s)).len() as u64;
        checks.push(Check::compare(
            format!("orbit of order-{k} set"),
            count_sets_by_order(u32::from(k)).expect("1..=4"),
            orbit_size,
        ));
    }

    let by_type: Vec<(SquareType, MagicSquare)> = sample_per_type().into_iter().collect();
    checks.push(Check::compare("types with a sample square", 21usize, by_type.len()));
    let results: Vec<(SquareType, OrderTuple, usize, usize)> = by_type
        .par_iter()
        .map(|(ty, sq)| {
            let stab = stabilizer_order_square(sq);
            let orb = orbit(*sq, |g, s| g.apply_square(s)).len();
            (*ty, sq.family_orders(), stab, orb)
        })
        .collect();
    for (ty, tuple, stab, orb) in results {
        checks.push(Check::compare(format!("{ty}: orbit x stabilizer"), GROUP_ORDER, orb * stab));
        checks.push(Check::compare(
            format!("{ty}: stabilizer of sample {tuple}"),
            square_stabilizer_formula(tuple).expect("admissible"),
            stab as u64,
        ));
        checks.push(Check::compare(
            format!("{ty}: orbit covers every census square with orders {tuple}"),
            report.count_tuple(tuple.0),
            orb as u64,
        ));
    }

    checks.extend(
        report
            .formula_checks
            .iter()
            .filter(|c| c.claim.starts_with("orbit formula") || c.claim.starts_with("printed closed form"))
            .cloned(),
    );
    for tuple in report.by_ordered_tuple.keys() {
        if orbit_count_squares(*tuple).is_err() {
            checks.push(Check::compare(format!("census tuple {tuple} is admissible"), "yes", "no"));
        }
    }
    checks
}

pub fn game_theorems(reps: &[MagicSquare]) -> Vec<Check> {
    #[derive(Default)]
    struct Tally {
        lines_only: usize,
        setfree_four: usize,
        solver_first_in_four: usize,
        strategy_sound: usize,
        max_strategy_picks: usize,
    }
    let tally = reps
        .par_iter()
        .map(|sq| {
            let lines: Vec<SetTriple> = sq.lines().into_iter().flatten().sorted().collect();
            let solution = exact_solve(&GameState::new(*sq)).expect("fresh game");
            let audit = audit_strategy(sq);
            Tally {
                lines_only: usize::from(sets_within(sq) == lines),
                setfree_four: usize::from(max_setfree_subset(sq) == 4),
                solver_first_in_four: usize::from(
                    solution.value.outcome == Outcome::FirstWins && solution.first_player_picks <= 4,
                ),
                strategy_sound: usize::from(audit.always_wins_within_four()),
                max_strategy_picks: audit.max_first_player_picks,
            }
        })
        .reduce(Tally::default, |a, b| Tally {
            lines_only: a.lines_only + b.lines_only,
            setfree_four: a.setfree_four + b.setfree_four,
            solver_first_in_four: a.solver_first_in_four + b.solver_first_in_four,
            strategy_sound: a.strategy_sound + b.strategy_sound,
            max_strategy_picks: a.max_strategy_picks.max(b.max_strategy_picks),
        });
    let n = reps.len();
    let mut checks = vec![
        Check::compare("supports checked", 1170usize, n),
        Check::compare("supports whose only sets are the 12 lines", n, tally.lines_only),
        Check::compare("supports with largest set-free subset 4 (no draws)", n, tally.setfree_four),
        Check::compare("supports where perfect play wins for the first player within 4 picks", n, tally.solver_first_in_four),
        Check::compare("supports where the strategy wins within 4 picks against every reply", n, tally.strategy_sound),
        Check::compare("most first-player picks needed by the strategy", 4usize, tally.max_strategy_picks),
    ];
    // Every pool has the same line structure, so one pool settles the
    // literal "any card" rule for all of them.
    if let Some(sq) = reps.first() {
        let literal = audit_literal_strategy(sq);
        checks.push(Check {
            claim: "literal rule (complete, else block, else any card) wins within 4 picks in every explored game".into(),
            expected: "measured".into(),
            computed: format!(
                "{} ({} games, {} lost, {} won after 4 picks)",
                literal.always_wins_within_four(),
                literal.games,
                literal.second_player_wins,
                literal.slow_wins
            ),
            status: CheckStatus::Info,
        });
    }
    checks
}

/// Deterministic round trips over exhaustive or structured inputs.
pub fn round_trips(reps: &[MagicSquare]) -> Vec<Check> {
    let card_failures = Card::all().filter(|c| c.to_string().parse::<Card>() != Ok(*c)).count();
    let set_failures = enumerate_sets().filter(|s| s.to_string().parse::<SetTriple>() != Ok(*s)).count();
    let group_failures = (0..GROUP_ORDER)
        .into_par_iter()
        .map(GroupElement::from_index)
        .filter(|g| g.to_string().parse::<GroupElement>() != Ok(*g))
        .count();
    let square_failures = crate::census::enumerate_all_squares()
        .filter(|sq| sq.to_string().parse::<MagicSquare>() != Ok(*sq))
        .count();
    let mut transcripts = 0usize;
    let mut transcript_failures = 0usize;
    for (n, sq) in reps.iter().enumerate() {
        let mut state = GameState::new(*sq);
        let mut step = n;
        while !state.is_over() {
            let moves = state.legal_moves();
            step = step * 7 + 3;
            state = state.apply_move(moves[step % moves.len()]).expect("legal");
            transcripts += 1;
            let text = state.transcript();
            if GameState::from_transcript(&text).as_ref() != Ok(&state) {
                transcript_failures += 1;
            }
        }
    }
    vec![
        Check::compare("card round-trip failures (81 cards)", 0usize, card_failures),
        Check::compare("set round-trip failures (1080 sets)", 0usize, set_failures),
        Check::compare("group element round-trip failures (31104 elements)", 0usize, group_failures),
        Check::compare("square round-trip failures (505440 squares)", 0usize, square_failures),
        Check::compare(format!("transcript round-trip failures ({transcripts} positions)"), 0usize, transcript_failures),
    ]
}

/// Runs every criterion, reusing `census` when one is supplied.
pub fn run_verification(census: Option<&CensusReport>) -> Vec<Criterion> {
    let mut out = vec![timed("set census", 1, set_census)];
    let start = Instant::now();
    let owned;
    let report = match census {
        Some(r) => r,
        None => {
            owned = classify_census();
            &owned
        }
    };
    let census_time = start.elapsed();
    let mut square = timed("square census", 60, || square_census(report));
    square.elapsed += census_time;
    out.push(square);
    out.push(timed("type census", 60, || type_census(report)));
    out.push(timed("multiplicity and symmetry relations", 60, || relations(report)));
    let reps = support_representatives();
    out.push(timed("same-support structure", 60, || same_support_structure(report, &reps)));
    out.push(timed("diversity law and feature distributions", 60, || diversity_law(report)));
    out.push(timed("group checks", 120, || group_checks(report)));
    out.push(timed("game theorems", 300, || game_theorems(&reps)));
    out.push(timed("round trips", 60, || round_trips(&reps)));
    out
}
