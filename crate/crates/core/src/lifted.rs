//! The lifted game: level types, first-order belief restrictions and the
//! Δ-rationalizability grid engine.

use std::collections::{BTreeMap, BTreeSet};

use log::debug;
use rayon::prelude::*;

use crate::complete::{validate_anchor, EliminationTrace};
use crate::error::{invalid, Error, Result};
use crate::lp::{justifiable_in_polytope, BeliefPolytope, TypeBlock};
use crate::model::{
    truncate_levels, ActionSet, Anchor, CellMember, Game, LiftedConjecture, Player,
    RestrictionModel, SolutionGrid, TypeIndex,
};
use crate::scalar::Scalar;

/// Surviving actions of every type at one reasoning order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepSurvivors {
    /// `sets[i][k]` for `k = 0..=k_max`; `sets[i][0]` is always the full set.
    pub sets: [Vec<ActionSet>; 2],
}

impl StepSurvivors {
    /// Every type keeps every action.
    pub fn full<T>(game: &Game<T>, k_max: usize) -> Self {
        StepSurvivors {
            sets: [
                vec![game.full_set(Player::One); k_max + 1],
                vec![game.full_set(Player::Two); k_max + 1],
            ],
        }
    }

    pub fn get(&self, player: Player, k: usize) -> ActionSet {
        self.sets[player.index()][k]
    }

    pub fn k_max(&self) -> usize {
        self.sets[0].len() - 1
    }
}

/// The Ĝ-conjectures type `owner` may hold given the opponent survivors.
pub fn build_restriction_polytope<T: Scalar>(
    game: &Game<T>,
    model: &RestrictionModel<T>,
    anchor: &Anchor<T>,
    owner: TypeIndex,
    survivors: &StepSurvivors,
) -> Result<BeliefPolytope<T>> {
    let k = owner.k;
    if k == 0 {
        return Err(invalid("level-0 types have no belief restriction"));
    }
    if k > survivors.k_max() {
        return Err(invalid(format!(
            "survivors only cover levels up to {}",
            survivors.k_max()
        )));
    }
    let opp = owner.player.opponent();
    let masses = match model {
        RestrictionModel::CognitiveHierarchy(dist) => Some(truncate_levels(dist, k)?),
        _ => None,
    };
    let blocks = model
        .allowed_levels(k)
        .map(|t| TypeBlock {
            level: t,
            support: survivors.get(opp, t),
            mass: masses.as_ref().map(|m| m[t].clone()),
            conditional: (t == 0).then(|| anchor.of(opp).to_vec()),
        })
        .collect();
    let poly = BeliefPolytope {
        owner: Some(owner),
        holder: owner.player,
        blocks,
    };
    poly.validate(game)?;
    Ok(poly)
}

#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    /// Upper bound on `k_max · n_max · (|A₁| + |A₂|)`.
    pub max_queries: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            max_queries: 250_000,
        }
    }
}

pub fn delta_grid<T: Scalar>(
    game: &Game<T>,
    model: &RestrictionModel<T>,
    anchor: &Anchor<T>,
    k_max: usize,
    n_max: usize,
) -> Result<SolutionGrid<T>> {
    delta_grid_with(game, model, anchor, k_max, n_max, &GridOptions::default())
}

/// Runs the Δ-rationalizability steps for types `0..=k_max` up to order
/// `n_max`.
pub fn delta_grid_with<T: Scalar>(
    game: &Game<T>,
    model: &RestrictionModel<T>,
    anchor: &Anchor<T>,
    k_max: usize,
    n_max: usize,
    opts: &GridOptions,
) -> Result<SolutionGrid<T>> {
    if k_max == 0 || n_max == 0 {
        return Err(invalid("k_max and n_max must be at least 1"));
    }
    validate_anchor(game, anchor)?;
    if let RestrictionModel::CognitiveHierarchy(dist) = model {
        if !dist.supports(k_max) {
            return Err(invalid(format!(
                "level distribution does not cover levels below {k_max}"
            )));
        }
    }
    let actions = game.num_actions(Player::One) + game.num_actions(Player::Two);
    let queries = k_max.saturating_mul(n_max).saturating_mul(actions);
    if queries > opts.max_queries {
        return Err(Error::Capacity(format!(
            "grid needs up to {queries} feasibility queries; the limit is {}",
            opts.max_queries
        )));
    }

    let mut columns = vec![StepSurvivors::full(game, k_max)];
    let mut witnesses: BTreeMap<CellMember, LiftedConjecture<T>> = BTreeMap::new();
    for n in 1..=n_max {
        let prev = &columns[n - 1];
        let mut next = prev.clone();
        let mut tasks = Vec::new();
        for player in Player::BOTH {
            for k in 1..=k_max {
                if n >= 2 && references_unchanged(model, player, k, &columns[n - 2], prev) {
                    for a in prev.get(player, k).iter() {
                        let key = CellMember {
                            player,
                            k,
                            n: n - 1,
                            action: a,
                        };
                        let w = witnesses[&key].clone();
                        witnesses.insert(CellMember { n, ..key }, w);
                    }
                    continue;
                }
                let poly = build_restriction_polytope(
                    game,
                    model,
                    anchor,
                    TypeIndex::new(player, k),
                    prev,
                )?;
                tasks.push((player, k, poly));
            }
        }
        debug!("column {n}: {} polytopes to test", tasks.len());
        let jobs: Vec<(usize, usize)> = tasks
            .iter()
            .enumerate()
            .flat_map(|(ti, (player, k, _))| {
                prev.get(*player, *k)
                    .iter()
                    .map(move |a| (ti, a))
                    .collect::<Vec<_>>()
            })
            .collect();
        let results: Vec<(usize, usize, Option<LiftedConjecture<T>>)> = jobs
            .into_par_iter()
            .map(|(ti, a)| {
                let (player, _, poly) = &tasks[ti];
                justifiable_in_polytope(game, *player, a, poly).map(|w| (ti, a, w))
            })
            .collect::<Result<_>>()?;
        for (player, k, _) in &tasks {
            next.sets[player.index()][*k] = ActionSet::empty(*player);
        }
        for (ti, a, w) in results {
            let (player, k, _) = &tasks[ti];
            if let Some(mu) = w {
                next.sets[player.index()][*k].insert(a);
                witnesses.insert(
                    CellMember {
                        player: *player,
                        k: *k,
                        n,
                        action: a,
                    },
                    mu,
                );
            }
        }
        columns.push(next);
    }

    let cells = Player::BOTH.map(|p| {
        (0..=k_max)
            .map(|k| columns.iter().map(|c| c.get(p, k)).collect())
            .collect()
    });
    Ok(SolutionGrid {
        model: model.clone(),
        anchor: anchor.clone(),
        k_max,
        n_max,
        cells,
        witnesses,
    })
}

/// True when every opponent level that type `k` may believe in has the same
/// survivors in both columns, so the polytope is unchanged.
fn references_unchanged<T>(
    model: &RestrictionModel<T>,
    player: Player,
    k: usize,
    before: &StepSurvivors,
    after: &StepSurvivors,
) -> bool {
    let opp = player.opponent();
    model
        .allowed_levels(k)
        .all(|t| before.get(opp, t) == after.get(opp, t))
}

/// Per-player limit behavior of each type, `cell(k, k)`.
pub fn limit_sets<T>(grid: &SolutionGrid<T>) -> Result<[Vec<ActionSet>; 2]> {
    if grid.n_max < grid.k_max {
        return Err(invalid(format!(
            "limits need n_max ≥ k_max (got n_max = {}, k_max = {})",
            grid.n_max, grid.k_max
        )));
    }
    let mut out: [Vec<ActionSet>; 2] = [Vec::new(), Vec::new()];
    for p in Player::BOTH {
        for k in 0..=grid.k_max {
            let limit = grid.cell(p, k, k);
            if let Some(n) = (k..=grid.n_max).find(|&n| grid.cell(p, k, n) != limit) {
                return Err(Error::Verification(format!(
                    "row {k} of {p} changes after order {k} (at n = {n})"
                )));
            }
            out[p.index()].push(limit);
        }
    }
    Ok(out)
}

/// `{k ∈ 1..=k_max : cell(k, n) ⊆ Rⁿ}` per player.
pub fn consistent_types<T, U>(
    grid: &SolutionGrid<T>,
    trace: &EliminationTrace<U>,
    n: usize,
) -> Result<[BTreeSet<usize>; 2]> {
    if n > grid.n_max {
        return Err(invalid(format!(
            "order {n} exceeds the grid's n_max = {}",
            grid.n_max
        )));
    }
    Ok(Player::BOTH.map(|p| {
        let r = trace.at(p, n);
        (1..=grid.k_max)
            .filter(|&k| grid.cell(p, k, n).is_subset(&r))
            .collect()
    }))
}
