//! Complete-information solution concepts: iterated strict dominance,
//! classic level-k and Cognitive Hierarchy.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::lp::{justifiable_in_polytope, strictly_dominated, BeliefPolytope, TypeBlock, Witness};
use crate::model::{
    truncate_levels, ActionSet, Anchor, Conjecture, Game, LevelDistribution, LiftedConjecture,
    Player,
};
use crate::scalar::Scalar;

/// The sequence `Rⁿ` for both players, up to its fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTrace<T> {
    /// `rounds[i][n] = R_iⁿ` for `n = 0..=fixpoint`.
    pub rounds: [Vec<ActionSet>; 2],
    /// First `n` with `Rⁿ⁺¹ = Rⁿ`.
    pub fixpoint: usize,
    /// Dominating mixture for every eliminated action, keyed by
    /// `(player, round in which it is removed, action)`.
    pub eliminations: BTreeMap<(Player, usize, usize), Witness<T>>,
}

impl<T> EliminationTrace<T> {
    /// `R_iⁿ`, clamped at the fixpoint.
    pub fn at(&self, player: Player, n: usize) -> ActionSet {
        let rounds = &self.rounds[player.index()];
        rounds[n.min(rounds.len() - 1)]
    }

    pub fn limit(&self, player: Player) -> ActionSet {
        self.at(player, self.fixpoint)
    }

    /// True when the fixpoint is a single action profile.
    pub fn dominance_solvable(&self) -> bool {
        Player::BOTH.iter().all(|&p| self.limit(p).len() == 1)
    }
}

/// Iterated elimination of strictly dominated actions.
pub fn rationalizability<T: Scalar>(game: &Game<T>) -> Result<EliminationTrace<T>> {
    let mut rounds = [
        vec![game.full_set(Player::One)],
        vec![game.full_set(Player::Two)],
    ];
    let mut eliminations = BTreeMap::new();
    let mut n = 0;
    loop {
        let current = [rounds[0][n], rounds[1][n]];
        let mut next = current;
        for player in Player::BOTH {
            let own = current[player.index()];
            let opp = current[player.opponent().index()];
            let verdicts: Vec<_> = own
                .iter()
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|a| strictly_dominated(game, player, a, &own, &opp).map(|d| (a, d)))
                .collect::<Result<_>>()?;
            for (a, d) in verdicts {
                if d.dominated {
                    next[player.index()].remove(a);
                    let witness = d.witness.expect("dominated verdict carries a witness");
                    eliminations.insert((player, n + 1, a), witness);
                }
            }
        }
        if next == current {
            return Ok(EliminationTrace {
                rounds,
                fixpoint: n,
                eliminations,
            });
        }
        rounds[0].push(next[0]);
        rounds[1].push(next[1]);
        n += 1;
    }
}

/// The actions of `player` that are best replies to some conjecture supported
/// within `opp_set`, with one justifying conjecture each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Justified<T> {
    pub set: ActionSet,
    pub witnesses: BTreeMap<usize, Conjecture<T>>,
}

pub fn justifiable_set<T: Scalar>(
    game: &Game<T>,
    player: Player,
    opp_set: &ActionSet,
) -> Result<Justified<T>> {
    if opp_set.player() != player.opponent() || opp_set.is_empty() {
        return Err(invalid(
            "justifiable set needs a non-empty set of opponent actions",
        ));
    }
    let poly = BeliefPolytope::simplex(player, *opp_set);
    justify_all(game, player, &game.full_set(player), &poly).map(|found| {
        let mut set = ActionSet::empty(player);
        let mut witnesses = BTreeMap::new();
        for (a, mu) in found {
            set.insert(a);
            witnesses.insert(a, mu.action_marginal(game));
        }
        Justified { set, witnesses }
    })
}

/// Every candidate with a justifying lifted conjecture in `poly`.
pub(crate) fn justify_all<T: Scalar>(
    game: &Game<T>,
    player: Player,
    candidates: &ActionSet,
    poly: &BeliefPolytope<T>,
) -> Result<Vec<(usize, LiftedConjecture<T>)>> {
    let found: Vec<Option<(usize, LiftedConjecture<T>)>> = candidates
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| justifiable_in_polytope(game, player, a, poly).map(|w| w.map(|mu| (a, mu))))
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Classic level-k behavior `L¹ … L^{k_max}` for both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTrace<T> {
    pub anchor: Anchor<T>,
    /// `levels[i][k − 1] = L_iᵏ`.
    pub levels: [Vec<ActionSet>; 2],
}

impl<T> LevelTrace<T> {
    /// `L_iᵏ` for `k ≥ 1`.
    pub fn level(&self, player: Player, k: usize) -> ActionSet {
        self.levels[player.index()][k - 1]
    }

    pub fn k_max(&self) -> usize {
        self.levels[0].len()
    }
}

pub fn level_k<T: Scalar>(
    game: &Game<T>,
    anchor: &Anchor<T>,
    k_max: usize,
) -> Result<LevelTrace<T>> {
    if k_max == 0 {
        return Err(invalid("k_max must be at least 1"));
    }
    validate_anchor(game, anchor)?;
    let mut levels: [Vec<ActionSet>; 2] = [Vec::new(), Vec::new()];
    for player in Player::BOTH {
        let poly = anchored_point(player, game, anchor);
        let found = justify_all(game, player, &game.full_set(player), &poly)?;
        levels[player.index()].push(ActionSet::from_indices(
            player,
            found.into_iter().map(|(a, _)| a),
        ));
    }
    for k in 1..k_max {
        let prev = [levels[0][k - 1], levels[1][k - 1]];
        for player in Player::BOTH {
            let j = justifiable_set(game, player, &prev[player.opponent().index()])?;
            levels[player.index()].push(j.set);
        }
    }
    Ok(LevelTrace {
        anchor: anchor.clone(),
        levels,
    })
}

/// Cognitive Hierarchy behavior `CH¹ … CH^{k_max}` for both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CHTrace<T> {
    pub anchor: Anchor<T>,
    pub distribution: LevelDistribution<T>,
    /// `levels[i][k − 1] = CH_iᵏ`.
    pub levels: [Vec<ActionSet>; 2],
}

impl<T> CHTrace<T> {
    pub fn level(&self, player: Player, k: usize) -> ActionSet {
        self.levels[player.index()][k - 1]
    }

    pub fn k_max(&self) -> usize {
        self.levels[0].len()
    }
}

/// Step `m` believes level `t < m` with probability `f^m(t)`: level 0 plays
/// the anchor, level `t ≥ 1` plays within `CH^t`.
pub fn cognitive_hierarchy<T: Scalar>(
    game: &Game<T>,
    anchor: &Anchor<T>,
    dist: &LevelDistribution<T>,
    k_max: usize,
) -> Result<CHTrace<T>> {
    if k_max == 0 {
        return Err(invalid("k_max must be at least 1"));
    }
    validate_anchor(game, anchor)?;
    let mut levels: [Vec<ActionSet>; 2] = [Vec::new(), Vec::new()];
    for m in 1..=k_max {
        let masses = truncate_levels(dist, m)?;
        let mut step = [ActionSet::empty(Player::One), ActionSet::empty(Player::Two)];
        for player in Player::BOTH {
            let opp = player.opponent();
            let blocks = masses
                .iter()
                .enumerate()
                .map(|(t, mass)| TypeBlock {
                    level: t,
                    support: if t == 0 {
                        game.full_set(opp)
                    } else {
                        levels[opp.index()][t - 1]
                    },
                    mass: Some(mass.clone()),
                    conditional: (t == 0).then(|| anchor.of(opp).to_vec()),
                })
                .collect();
            let poly = BeliefPolytope {
                owner: None,
                holder: player,
                blocks,
            };
            let found = justify_all(game, player, &game.full_set(player), &poly)?;
            step[player.index()] =
                ActionSet::from_indices(player, found.into_iter().map(|(a, _)| a));
        }
        levels[0].push(step[0]);
        levels[1].push(step[1]);
    }
    Ok(CHTrace {
        anchor: anchor.clone(),
        distribution: dist.clone(),
        levels,
    })
}

/// The single-point polytope of a level-1 belief: all mass on level 0 at the
/// anchor.
pub(crate) fn anchored_point<T: Scalar>(
    player: Player,
    game: &Game<T>,
    anchor: &Anchor<T>,
) -> BeliefPolytope<T> {
    let opp = player.opponent();
    BeliefPolytope {
        owner: None,
        holder: player,
        blocks: vec![TypeBlock {
            level: 0,
            support: game.full_set(opp),
            mass: Some(T::one()),
            conditional: Some(anchor.of(opp).to_vec()),
        }],
    }
}

pub(crate) fn validate_anchor<T: Scalar>(game: &Game<T>, anchor: &Anchor<T>) -> Result<()> {
    Anchor::new(
        game,
        anchor.of(Player::One).to_vec(),
        anchor.of(Player::Two).to_vec(),
    )
    .map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, ratio};

    fn set(g: &Game<crate::Rational>, p: Player, labels: &[&str]) -> ActionSet {
        g.set_of(p, labels).unwrap()
    }

    #[test]
    fn iterated_elimination() {
        let g = fixtures::iterated();
        let tr = rationalizability(&g).unwrap();
        assert_eq!(tr.fixpoint, 4);
        let expect = [
            (&["U", "M", "D"][..], &["l", "c"][..]),
            (&["U", "M"], &["l", "c"]),
            (&["U", "M"], &["l"]),
            (&["U"], &["l"]),
        ];
        for (n, (a1, a2)) in expect.iter().enumerate() {
            assert_eq!(
                tr.at(Player::One, n + 1),
                set(&g, Player::One, a1),
                "R{}",
                n + 1
            );
            assert_eq!(
                tr.at(Player::Two, n + 1),
                set(&g, Player::Two, a2),
                "R{}",
                n + 1
            );
        }
        assert_eq!(tr.at(Player::One, 99), set(&g, Player::One, &["U"]));
        assert!(tr.dominance_solvable());
        assert_eq!(tr.eliminations.len(), 4);
    }

    #[test]
    fn trivial_games() {
        let tr = rationalizability(&fixtures::singleton()).unwrap();
        assert_eq!(tr.fixpoint, 0);
        let tr = rationalizability(&fixtures::robust_gap()).unwrap();
        assert_eq!(tr.fixpoint, 0);
        assert!(!tr.dominance_solvable());
    }

    #[test]
    fn example3_level_list() {
        let g = fixtures::iterated();
        let p = Anchor::dirac(&g, "D", "r").unwrap();
        let tr = level_k(&g, &p, 4).unwrap();
        let expect = [("D", "c"), ("M", "c"), ("M", "l"), ("U", "l")];
        for (k, (a1, a2)) in expect.iter().enumerate() {
            assert_eq!(tr.level(Player::One, k + 1), set(&g, Player::One, &[a1]));
            assert_eq!(tr.level(Player::Two, k + 1), set(&g, Player::Two, &[a2]));
        }
    }

    #[test]
    fn equilibrium_anchor_is_fixed() {
        let g = fixtures::iterated();
        let p = Anchor::dirac(&g, "U", "l").unwrap();
        let tr = level_k(&g, &p, 6).unwrap();
        for k in 1..=6 {
            assert_eq!(tr.level(Player::One, k), set(&g, Player::One, &["U"]));
            assert_eq!(tr.level(Player::Two, k), set(&g, Player::Two, &["l"]));
        }
    }

    #[test]
    fn matching_pennies_cycles() {
        let g = fixtures::matching_pennies();
        let p = Anchor::dirac(&g, "H", "h").unwrap();
        let tr = level_k(&g, &p, 12).unwrap();
        let seq: Vec<String> = (1..=8)
            .map(|k| tr.level(Player::One, k).display(&g))
            .collect();
        assert_eq!(
            seq,
            ["{H}", "{T}", "{T}", "{H}", "{H}", "{T}", "{T}", "{H}"]
        );
        for player in Player::BOTH {
            for k in 1..=8 {
                assert_eq!(tr.level(player, k), tr.level(player, k + 4));
            }
            assert!((1..=8).any(|k| tr.level(player, k) != tr.level(player, k + 2)));
        }
    }

    #[test]
    fn iterated_ch_geometric() {
        let g = fixtures::iterated();
        let p = Anchor::dirac(&g, "D", "r").unwrap();
        let f = LevelDistribution::geometric(ratio(1, 2)).unwrap();
        let tr = cognitive_hierarchy(&g, &p, &f, 5).unwrap();
        assert_eq!(tr.level(Player::One, 1), set(&g, Player::One, &["D"]));
        assert_eq!(tr.level(Player::Two, 1), set(&g, Player::Two, &["c"]));
        assert_eq!(tr.level(Player::One, 2), set(&g, Player::One, &["M", "D"]));
        assert_eq!(tr.level(Player::Two, 2), set(&g, Player::Two, &["c"]));
        for k in 3..=5 {
            assert_eq!(tr.level(Player::One, k), set(&g, Player::One, &["M"]));
            assert_eq!(tr.level(Player::Two, k), set(&g, Player::Two, &["c"]));
        }
    }

    #[test]
    fn iterated_ch_lexicographic_stays_at_d() {
        let g = fixtures::iterated();
        let p = Anchor::dirac(&g, "D", "r").unwrap();
        let f = LevelDistribution::lexicographic(ratio(1, 5)).unwrap();
        let tr = cognitive_hierarchy(&g, &p, &f, 6).unwrap();
        for k in 1..=6 {
            assert_eq!(tr.level(Player::One, k), set(&g, Player::One, &["D"]));
        }
    }

    #[test]
    fn first_step_agrees_across_concepts() {
        let g = fixtures::robust_gap();
        let p = Anchor::uniform(&g);
        let f = LevelDistribution::weights(vec![ratio(1, 1)]).unwrap();
        let ch = cognitive_hierarchy(&g, &p, &f, 1).unwrap();
        let lk = level_k(&g, &p, 1).unwrap();
        assert_eq!(ch.levels, lk.levels);
    }

    #[test]
    fn bad_arguments() {
        let g = fixtures::iterated();
        let p = Anchor::uniform(&g);
        assert!(level_k(&g, &p, 0).is_err());
        let f = LevelDistribution::weights(vec![ratio(1, 1)]).unwrap();
        assert!(cognitive_hierarchy(&g, &p, &f, 2).is_err());
        assert!(justifiable_set(&g, Player::One, &ActionSet::empty(Player::Two)).is_err());
    }
}
