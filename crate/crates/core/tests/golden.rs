mod common;

use common::*;
use levelk::complete::{cognitive_hierarchy, level_k, rationalizability};
use levelk::lifted::{consistent_types, delta_grid, limit_sets};
use levelk::lp::EbrsOptions;
use levelk::robust::{restricted_ebrs, robust_level_k};
use levelk::{fixtures, Anchor, LevelDistribution, Player, RestrictionModel};
use std::collections::BTreeSet;

fn geometric_half() -> LevelDistribution {
    LevelDistribution::geometric(fixtures::ratio(1, 2)).unwrap()
}

#[test]
fn downward_grid_under_dominated_anchor() {
    let g = fixtures::iterated();
    let grid = delta_grid(
        &g,
        &RestrictionModel::Downward,
        &Anchor::dirac(&g, "D", "r").unwrap(),
        4,
        4,
    )
    .unwrap();
    assert_eq!(
        grid_mismatches(&g, &grid, &DOWNWARD_DR),
        Vec::<String>::new()
    );
    let limits = limit_sets(&grid).unwrap();
    assert_eq!(limits[0][1], set(&g, Player::One, "D"));
    assert_eq!(limits[0][2], set(&g, Player::One, "MD"));
    assert_eq!(limits[0][3], set(&g, Player::One, "MD"));
}

#[test]
fn downward_grid_under_equilibrium_anchor() {
    let g = fixtures::iterated();
    let grid = delta_grid(
        &g,
        &RestrictionModel::Downward,
        &Anchor::dirac(&g, "U", "l").unwrap(),
        4,
        4,
    )
    .unwrap();
    assert_eq!(
        grid_mismatches(&g, &grid, &DOWNWARD_UL),
        Vec::<String>::new()
    );
}

#[test]
fn level_k_grid_and_limits() {
    let g = fixtures::iterated();
    let anchor = Anchor::dirac(&g, "D", "r").unwrap();
    let grid = delta_grid(&g, &RestrictionModel::LevelK, &anchor, 4, 4).unwrap();
    assert_eq!(grid_mismatches(&g, &grid, &LEVELK_DR), Vec::<String>::new());
    let limits = limit_sets(&grid).unwrap();
    let trace = level_k(&g, &anchor, 4).unwrap();
    for p in Player::BOTH {
        assert_eq!(limits[p.index()][1..], trace.levels[p.index()][..]);
    }
}

#[test]
fn level_k_consistent_types_drop_row_one() {
    let g = fixtures::iterated();
    let grid = delta_grid(
        &g,
        &RestrictionModel::LevelK,
        &Anchor::dirac(&g, "D", "r").unwrap(),
        4,
        4,
    )
    .unwrap();
    let trace = rationalizability(&g).unwrap();
    let types = consistent_types(&grid, &trace, 2).unwrap();
    assert_eq!(types[0], BTreeSet::from([2, 3, 4]));
}

#[test]
fn geometric_ch_grid_off_the_fourth_row() {
    let g = fixtures::iterated();
    let anchor = Anchor::dirac(&g, "D", "r").unwrap();
    let grid = delta_grid(
        &g,
        &RestrictionModel::CognitiveHierarchy(geometric_half()),
        &anchor,
        4,
        4,
    )
    .unwrap();
    let mismatches = grid_mismatches(&g, &grid, &CH_GEOMETRIC_DR);
    assert_eq!(
        mismatches,
        vec!["player 2 cell (4, 1): got {c} want {l, c}".to_string()]
    );
    let ch = cognitive_hierarchy(&g, &anchor, &geometric_half(), 4).unwrap();
    assert_eq!(ch.level(Player::One, 2), set(&g, Player::One, "MD"));
    assert_eq!(ch.level(Player::One, 3), set(&g, Player::One, "M"));
    assert_eq!(ch.level(Player::Two, 4), set(&g, Player::Two, "c"));
}

/// With mass 8/15 on δ_D, l pays 2 − d and c pays 1 + d, so only c survives.
#[test]
fn fourth_level_type_at_first_order_plays_c() {
    let g = fixtures::iterated();
    let anchor = Anchor::dirac(&g, "D", "r").unwrap();
    let grid = delta_grid(
        &g,
        &RestrictionModel::CognitiveHierarchy(geometric_half()),
        &anchor,
        4,
        1,
    )
    .unwrap();
    assert_eq!(grid.cell(Player::Two, 4, 1), set(&g, Player::Two, "c"));
    assert_eq!(grid.cell(Player::One, 4, 1), set(&g, Player::One, "MD"));
}

#[test]
fn robust_level_two_regions() {
    let g = fixtures::robust_gap();
    let opts = EbrsOptions::default();
    let regions = restricted_ebrs(&g, Player::Two, &opts).unwrap();
    let rendered: Vec<(String, Vec<String>)> = regions
        .iter()
        .map(|(b, inner)| {
            (
                b.display(&g),
                inner.iter().map(|e| e.set.display(&g)).collect(),
            )
        })
        .collect();
    let expect = |b: &str, sets: &[&str]| {
        (
            b.to_string(),
            sets.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        )
    };
    assert!(rendered.contains(&expect("{U}", &["{c}"])));
    assert!(rendered.contains(&expect("{M}", &["{r}"])));
    assert!(rendered.contains(&expect("{D}", &["{c, r}"])));
    assert!(rendered.contains(&expect("{U, D}", &["{c}", "{c, r}"])));
    assert!(rendered.contains(&expect("{M, D}", &["{r}", "{c, r}"])));
    let robust = robust_level_k(&g, 2, &opts).unwrap();
    assert_eq!(robust.unions[1][1], set(&g, Player::Two, "cr"));
    assert_eq!(robust.unions[0][1], g.full_set(Player::One));
}

#[test]
fn anchor_chains_reproduce_family_members() {
    let g = fixtures::robust_gap();
    let robust = robust_level_k(&g, 3, &EbrsOptions::default()).unwrap();
    for p in Player::BOTH {
        for t in 1..=3 {
            for (idx, member) in robust.family.members(p, t).iter().enumerate() {
                let anchor = robust.family.anchor_for(&g, p, t, idx);
                assert_eq!(level_k(&g, &anchor, t).unwrap().level(p, t), member.set);
            }
        }
    }
}
