//! Built-in worked examples addressable by name.

use std::sync::OnceLock;

use serde::Serialize;

use crate::game::{CorrelatedStrategy, MixedStrategy, Monfg, StrategyProfile};
use crate::{Error, Result, UtilitySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Game,
    UtilityPair,
    Profile,
    CorrelatedStrategy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Game(Monfg),
    UtilityPair(Vec<UtilitySpec>),
    Profile(StrategyProfile),
    Correlated(CorrelatedStrategy),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub provenance: &'static str,
    pub payload: Payload,
}

impl CatalogEntry {
    /// The payload in the JSON schema of its type.
    pub fn to_json(&self) -> serde_json::Value {
        match &self.payload {
            Payload::Game(g) => crate::json::game_to_value(g),
            Payload::UtilityPair(us) => serde_json::to_value(us).expect("utilities serialize"),
            Payload::Profile(p) => serde_json::to_value(p).expect("profiles serialize"),
            Payload::Correlated(s) => crate::json::correlated_to_value(s),
        }
    }
}

fn labels(names: &[&str]) -> Vec<Vec<String>> {
    let row: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    vec![row.clone(), row]
}

/// Two-player game where both players receive the same payoff vector.
fn shared_payoff_game(names: &[&str], table: &[&[[f64; 2]]]) -> Monfg {
    Monfg::from_fn(labels(names), 2, |a| {
        let p = table[a[0]][a[1]].to_vec();
        vec![p.clone(), p]
    })
    .expect("catalog game is well formed")
}

fn chicken() -> Monfg {
    let table = [[(6.0, 6.0), (2.0, 7.0)], [(7.0, 2.0), (0.0, 0.0)]];
    Monfg::from_fn(labels(&["S", "D"]), 1, |a| {
        let (r, c) = table[a[0]][a[1]];
        vec![vec![r], vec![c]]
    })
    .expect("catalog game is well formed")
}

fn imbalancing() -> Monfg {
    shared_payoff_game(
        &["L", "M", "R"],
        &[
            &[[4.0, 0.0], [3.0, 1.0], [2.0, 2.0]],
            &[[3.0, 1.0], [2.0, 2.0], [1.0, 3.0]],
            &[[2.0, 2.0], [1.0, 3.0], [0.0, 4.0]],
        ],
    )
}

fn imbalancing_tradeoff() -> Monfg {
    let table = [
        [(16.0, 0.0), (10.0, 3.0), (8.0, 4.0)],
        [(10.0, 3.0), (8.0, 4.0), (10.0, 3.0)],
        [(8.0, 4.0), (10.0, 3.0), (16.0, 0.0)],
    ];
    Monfg::from_fn(labels(&["L", "M", "R"]), 1, |a| {
        let (r, c) = table[a[0]][a[1]];
        vec![vec![r], vec![c]]
    })
    .expect("catalog game is well formed")
}

fn game2() -> Monfg {
    shared_payoff_game(
        &["L", "R"],
        &[&[[4.0, 0.0], [2.0, 2.0]], &[[2.0, 2.0], [0.0, 4.0]]],
    )
}

fn game3() -> Monfg {
    shared_payoff_game(
        &["L", "M", "R"],
        &[
            &[[4.0, 1.0], [1.0, 2.0], [2.0, 1.0]],
            &[[3.0, 1.0], [3.0, 2.0], [1.0, 2.0]],
            &[[1.0, 2.0], [2.0, 1.0], [1.0, 3.0]],
        ],
    )
}

fn correlated(game: &Monfg, entries: &[(&[usize], f64)]) -> CorrelatedStrategy {
    CorrelatedStrategy::from_entries(game, entries).expect("catalog strategy is a distribution")
}

/// `u1(p) = p1^2 + p2^2` for the row player and `u2(p) = p1 * p2` for the
/// column player, both clipped to zero on negative payoffs.
pub fn polysum_product() -> [UtilitySpec; 2] {
    [
        UtilitySpec::poly_sum(vec![1.0, 1.0], vec![2, 2]).expect("valid polysum"),
        UtilitySpec::product(),
    ]
}

fn build() -> Vec<CatalogEntry> {
    let chicken = chicken();
    let imbalancing = imbalancing();
    let game2 = game2();
    let game3 = game3();
    let entry = |name, kind, provenance, payload| CatalogEntry {
        name,
        kind,
        provenance,
        payload,
    };
    vec![
        entry(
            "chicken",
            EntryKind::Game,
            "Chicken: 2x2 single-objective game, actions S(werve)/D(rive)",
            Payload::Game(chicken.clone()),
        ),
        entry(
            "chicken_ce",
            EntryKind::CorrelatedStrategy,
            "Chicken correlated equilibrium with (S,S)=0.5, (S,D)=(D,S)=0.25",
            Payload::Correlated(correlated(&chicken, &[(&[0, 0], 0.5), (&[0, 1], 0.25), (&[1, 0], 0.25)])),
        ),
        entry(
            "imbalancing",
            EntryKind::Game,
            "(Im)balancing act: 3x3 two-objective game, identical payoff vectors for both players",
            Payload::Game(imbalancing.clone()),
        ),
        entry(
            "imbalancing_tradeoff",
            EntryKind::Game,
            "(Im)balancing act scalarised by u1 = p1^2 + p2^2 and u2 = p1*p2 (ESR trade-off game)",
            Payload::Game(imbalancing_tradeoff()),
        ),
        entry(
            "imbalancing_ce",
            EntryKind::CorrelatedStrategy,
            "(Im)balancing act single-signal SER correlated equilibrium, (L,M)=0.75 and (R,M)=0.25",
            Payload::Correlated(correlated(&imbalancing, &[(&[0, 1], 0.75), (&[2, 1], 0.25)])),
        ),
        entry(
            "imbalancing_esr_ne",
            EntryKind::Profile,
            "(Im)balancing act mixed ESR equilibrium: row (0.5, 0, 0.5), column M",
            Payload::Profile(StrategyProfile::new(vec![
                MixedStrategy::new(vec![0.5, 0.0, 0.5]).expect("distribution"),
                MixedStrategy::pure(3, 1),
            ])),
        ),
        entry(
            "game2",
            EntryKind::Game,
            "(Im)balancing act with action M removed: 2x2 two-objective game",
            Payload::Game(game2.clone()),
        ),
        entry(
            "game2_ce",
            EntryKind::CorrelatedStrategy,
            "Uniform correlated strategy over the four joint actions of game2",
            Payload::Correlated(correlated(
                &game2,
                &[(&[0, 0], 0.25), (&[0, 1], 0.25), (&[1, 0], 0.25), (&[1, 1], 0.25)],
            )),
        ),
        entry(
            "game3",
            EntryKind::Game,
            "3x3 two-objective game with pure candidate equilibria (L,L), (M,M), (R,R)",
            Payload::Game(game3.clone()),
        ),
        entry(
            "game3_ce",
            EntryKind::CorrelatedStrategy,
            "game3 correlated strategy mixing (L,L) and (M,M) with probability 0.5 each",
            Payload::Correlated(correlated(&game3, &[(&[0, 0], 0.5), (&[1, 1], 0.5)])),
        ),
        entry(
            "paper",
            EntryKind::UtilityPair,
            "u1(p) = p1*p1 + p2*p2 (row), u2(p) = p1*p2 (column), zero on negative payoffs",
            Payload::UtilityPair(polysum_product().to_vec()),
        ),
        entry(
            "identity",
            EntryKind::UtilityPair,
            "Linear([1]) for both players of a two-player single-objective game",
            Payload::UtilityPair(vec![UtilitySpec::identity(), UtilitySpec::identity()]),
        ),
    ]
}

fn entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(build)
}

pub fn get(name: &str) -> Result<&'static CatalogEntry> {
    entries()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

/// `(name, kind, provenance)` of every entry, in catalog order.
pub fn list() -> Vec<(&'static str, EntryKind, &'static str)> {
    entries().iter().map(|e| (e.name, e.kind, e.provenance)).collect()
}

fn wrong_kind(name: &str, wanted: &str) -> Error {
    Error::parse(name, format!("catalog entry is not a {wanted}"))
}

pub fn game(name: &str) -> Result<Monfg> {
    match &get(name)?.payload {
        Payload::Game(g) => Ok(g.clone()),
        _ => Err(wrong_kind(name, "game")),
    }
}

pub fn utility_pair(name: &str) -> Result<Vec<UtilitySpec>> {
    match &get(name)?.payload {
        Payload::UtilityPair(u) => Ok(u.clone()),
        _ => Err(wrong_kind(name, "utility pair")),
    }
}

pub fn profile(name: &str) -> Result<StrategyProfile> {
    match &get(name)?.payload {
        Payload::Profile(p) => Ok(p.clone()),
        _ => Err(wrong_kind(name, "strategy profile")),
    }
}

pub fn correlated_strategy(name: &str) -> Result<CorrelatedStrategy> {
    match &get(name)?.payload {
        Payload::Correlated(s) => Ok(s.clone()),
        _ => Err(wrong_kind(name, "correlated strategy")),
    }
}
