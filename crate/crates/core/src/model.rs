//! Domain types for finite two-player games and the pure payoff arithmetic
//! the solvers are built on.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{is_probability_vector, sum, Scalar};

/// Upper bound on actions per player; action sets are stored as bit masks.
pub const MAX_ACTIONS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.index() + 1)
    }
}

/// A subset of one player's actions.
///
/// Members are action indices in the game's declared order, so iteration and
/// serialization are deterministic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionSet {
    player: Player,
    mask: u64,
}

impl ActionSet {
    pub fn empty(player: Player) -> Self {
        ActionSet { player, mask: 0 }
    }

    pub fn full(player: Player, count: usize) -> Self {
        assert!(count <= MAX_ACTIONS);
        let mask = if count == MAX_ACTIONS {
            u64::MAX
        } else {
            (1u64 << count) - 1
        };
        ActionSet { player, mask }
    }

    pub fn from_mask(player: Player, mask: u64) -> Self {
        ActionSet { player, mask }
    }

    pub fn from_indices(player: Player, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = ActionSet::empty(player);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn insert(&mut self, action: usize) {
        assert!(action < MAX_ACTIONS);
        self.mask |= 1 << action;
    }

    pub fn remove(&mut self, action: usize) {
        self.mask &= !(1 << action);
    }

    pub fn contains(&self, action: usize) -> bool {
        action < MAX_ACTIONS && self.mask & (1 << action) != 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_subset(&self, other: &ActionSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn union(&self, other: &ActionSet) -> ActionSet {
        debug_assert_eq!(self.player, other.player);
        ActionSet {
            player: self.player,
            mask: self.mask | other.mask,
        }
    }

    pub fn intersection(&self, other: &ActionSet) -> ActionSet {
        debug_assert_eq!(self.player, other.player);
        ActionSet {
            player: self.player,
            mask: self.mask & other.mask,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.mask;
        (0..MAX_ACTIONS).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn names<'g, T>(&self, game: &'g Game<T>) -> Vec<&'g str> {
        self.iter()
            .map(|a| game.action_name(self.player, a))
            .collect()
    }

    /// `{M, D}` style rendering with the game's labels.
    pub fn display<T>(&self, game: &Game<T>) -> String {
        format!("{{{}}}", self.names(game).join(", "))
    }
}

/// A finite two-player game in normal form.
///
/// `payoffs[i][own][opp]` is player `i`'s payoff when they play `own` and the
/// opponent plays `opp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game<T> {
    player_names: [String; 2],
    actions: [Vec<String>; 2],
    payoffs: [Vec<Vec<T>>; 2],
}

impl<T: Scalar> Game<T> {
    pub fn new(
        player_names: [String; 2],
        actions: [Vec<String>; 2],
        payoffs: [Vec<Vec<T>>; 2],
    ) -> Result<Self> {
        for p in Player::BOTH {
            let own = &actions[p.index()];
            if own.is_empty() {
                return Err(invalid(format!("{p} has no actions")));
            }
            if own.len() > MAX_ACTIONS {
                return Err(invalid(format!("{p} has more than {MAX_ACTIONS} actions")));
            }
            for (i, name) in own.iter().enumerate() {
                if own[..i].contains(name) {
                    return Err(invalid(format!("{p} has duplicate action label {name:?}")));
                }
            }
        }
        for p in Player::BOTH {
            let rows = &payoffs[p.index()];
            let (n_own, n_opp) = (
                actions[p.index()].len(),
                actions[p.opponent().index()].len(),
            );
            if rows.len() != n_own || rows.iter().any(|r| r.len() != n_opp) {
                return Err(invalid(format!(
                    "payoff matrix of {p} must be {n_own}x{n_opp} (own x opponent)"
                )));
            }
        }
        Ok(Game {
            player_names,
            actions,
            payoffs,
        })
    }

    /// Builds a game from the usual bimatrix layout: `cells[row][col] = (π₁, π₂)`
    /// with player 1 choosing rows.
    pub fn bimatrix(
        row_actions: &[&str],
        col_actions: &[&str],
        cells: &[Vec<(T, T)>],
    ) -> Result<Self> {
        let p1 = cells
            .iter()
            .map(|row| row.iter().map(|(a, _)| a.clone()).collect())
            .collect();
        let mut p2 = vec![Vec::with_capacity(row_actions.len()); col_actions.len()];
        for row in cells {
            for (c, (_, b)) in row.iter().enumerate() {
                if c < p2.len() {
                    p2[c].push(b.clone());
                }
            }
        }
        Game::new(
            ["Player 1".to_string(), "Player 2".to_string()],
            [
                row_actions.iter().map(|s| s.to_string()).collect(),
                col_actions.iter().map(|s| s.to_string()).collect(),
            ],
            [p1, p2],
        )
    }

    /// Integer bimatrix shorthand, mostly for tests and fixtures.
    pub fn from_integers(
        row_actions: &[&str],
        col_actions: &[&str],
        cells: &[&[(i64, i64)]],
    ) -> Result<Self> {
        let cells: Vec<Vec<(T, T)>> = cells
            .iter()
            .map(|row| row.iter().map(|&(a, b)| (T::int(a), T::int(b))).collect())
            .collect();
        Game::bimatrix(row_actions, col_actions, &cells)
    }
}

impl<T> Game<T> {
    pub fn player_name(&self, player: Player) -> &str {
        &self.player_names[player.index()]
    }

    pub fn num_actions(&self, player: Player) -> usize {
        self.actions[player.index()].len()
    }

    pub fn actions(&self, player: Player) -> &[String] {
        &self.actions[player.index()]
    }

    pub fn action_name(&self, player: Player, action: usize) -> &str {
        &self.actions[player.index()][action]
    }

    pub fn action_index(&self, player: Player, name: &str) -> Option<usize> {
        self.actions[player.index()].iter().position(|a| a == name)
    }

    pub fn full_set(&self, player: Player) -> ActionSet {
        ActionSet::full(player, self.num_actions(player))
    }

    pub fn payoff(&self, player: Player, own: usize, opp: usize) -> &T {
        &self.payoffs[player.index()][own][opp]
    }

    pub fn payoff_matrix(&self, player: Player) -> &[Vec<T>] {
        &self.payoffs[player.index()]
    }

    /// Action set from labels; fails on unknown labels.
    pub fn set_of(&self, player: Player, labels: &[&str]) -> Result<ActionSet> {
        let mut set = ActionSet::empty(player);
        for l in labels {
            let idx = self
                .action_index(player, l)
                .ok_or_else(|| invalid(format!("{player} has no action {l:?}")))?;
            set.insert(idx);
        }
        Ok(set)
    }

    pub fn map_payoffs<U>(&self, f: impl Fn(Player, &T) -> U) -> Game<U> {
        let map = |p: Player| {
            self.payoffs[p.index()]
                .iter()
                .map(|row| row.iter().map(|v| f(p, v)).collect())
                .collect()
        };
        Game {
            player_names: self.player_names.clone(),
            actions: self.actions.clone(),
            payoffs: [map(Player::One), map(Player::Two)],
        }
    }
}

impl<T: Scalar> Game<T> {
    /// `max π_i − min π_i` over all profiles.
    pub fn payoff_range(&self, player: Player) -> T {
        let mut values = self.payoffs[player.index()].iter().flatten();
        let first = values
            .next()
            .expect("games have at least one profile")
            .clone();
        let (lo, hi) = values.fold((first.clone(), first), |(lo, hi), v| {
            (
                if *v < lo { v.clone() } else { lo },
                if *v > hi { v.clone() } else { hi },
            )
        });
        hi - lo
    }
}

/// A player's belief about the opponent's action: `weights[a]` is the
/// probability of opponent action `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Conjecture<T> {
    pub holder: Player,
    pub weights: Vec<T>,
}

impl<T: Scalar> Conjecture<T> {
    pub fn new<G>(game: &Game<G>, holder: Player, weights: Vec<T>) -> Result<Self> {
        let c = Conjecture { holder, weights };
        c.validate(game)?;
        Ok(c)
    }

    pub fn dirac<G>(game: &Game<G>, holder: Player, opp_action: usize) -> Self {
        let n = game.num_actions(holder.opponent());
        let weights = (0..n)
            .map(|a| if a == opp_action { T::one() } else { T::zero() })
            .collect();
        Conjecture { holder, weights }
    }

    pub fn uniform_on<G>(game: &Game<G>, holder: Player, support: &ActionSet) -> Self {
        let n = game.num_actions(holder.opponent());
        let share = T::ratio(1, support.len() as i64);
        let weights = (0..n)
            .map(|a| {
                if support.contains(a) {
                    share.clone()
                } else {
                    T::zero()
                }
            })
            .collect();
        Conjecture { holder, weights }
    }

    pub fn validate<G>(&self, game: &Game<G>) -> Result<()> {
        let n = game.num_actions(self.holder.opponent());
        if self.weights.len() != n {
            return Err(invalid(format!(
                "conjecture of {} has {} weights, opponent has {} actions",
                self.holder,
                self.weights.len(),
                n
            )));
        }
        if !is_probability_vector(&self.weights) {
            return Err(invalid(
                "conjecture weights must be non-negative and sum to 1",
            ));
        }
        Ok(())
    }

    pub fn support(&self) -> ActionSet {
        ActionSet::from_indices(
            self.holder.opponent(),
            self.weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(a, _)| a),
        )
    }

    /// Total-variation distance `½‖self − other‖₁`.
    pub fn total_variation(&self, other: &Conjecture<T>) -> T {
        let mut acc = T::zero();
        for (a, b) in self.weights.iter().zip(&other.weights) {
            acc += &(a.clone() - b.clone()).abs();
        }
        acc / T::int(2)
    }
}

/// Level-0 behavior: `p[i]` is a distribution over player `i`'s own actions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Anchor<T> {
    p: [Vec<T>; 2],
}

impl<T: Scalar> Anchor<T> {
    pub fn new<G>(game: &Game<G>, p1: Vec<T>, p2: Vec<T>) -> Result<Self> {
        let a = Anchor { p: [p1, p2] };
        for p in Player::BOTH {
            let w = &a.p[p.index()];
            if w.len() != game.num_actions(p) {
                return Err(invalid(format!(
                    "anchor of {p} has {} weights, expected {}",
                    w.len(),
                    game.num_actions(p)
                )));
            }
            if !is_probability_vector(w) {
                return Err(invalid(format!(
                    "anchor of {p} must be non-negative and sum to 1 (sums to {})",
                    sum(w)
                )));
            }
        }
        Ok(a)
    }

    /// Point masses on the named actions.
    pub fn dirac<G>(game: &Game<G>, a1: &str, a2: &str) -> Result<Self> {
        let pick = |p: Player, name: &str| -> Result<Vec<T>> {
            let idx = game
                .action_index(p, name)
                .ok_or_else(|| invalid(format!("{p} has no action {name:?}")))?;
            Ok((0..game.num_actions(p))
                .map(|a| if a == idx { T::one() } else { T::zero() })
                .collect())
        };
        Anchor::new(game, pick(Player::One, a1)?, pick(Player::Two, a2)?)
    }

    pub fn uniform<G>(game: &Game<G>) -> Self {
        let u = |p: Player| {
            let n = game.num_actions(p);
            vec![T::ratio(1, n as i64); n]
        };
        Anchor {
            p: [u(Player::One), u(Player::Two)],
        }
    }

    /// Replaces the component for `player`.
    pub fn with(&self, player: Player, weights: Vec<T>) -> Self {
        let mut a = self.clone();
        a.p[player.index()] = weights;
        a
    }

    /// Level-0 play of `player`.
    pub fn of(&self, player: Player) -> &[T] {
        &self.p[player.index()]
    }

    /// The conjecture a level-1 `holder` forms: the opponent's anchor.
    pub fn conjecture_for(&self, holder: Player) -> Conjecture<T> {
        Conjecture {
            holder,
            weights: self.p[holder.opponent().index()].clone(),
        }
    }

    pub fn support(&self, player: Player) -> ActionSet {
        ActionSet::from_indices(
            player,
            self.p[player.index()]
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(a, _)| a),
        )
    }
}

/// A full-support distribution over levels, represented only through what the
/// truncations need: positive weights on a prefix of levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LevelDistribution<T> {
    /// `f(t) = q (1 − q)^t` with `q ∈ (0, 1)`.
    Geometric(T),
    /// `f(0) = (1 − 2ε)/(1 − ε)`, `f(t) = ε^t` for `t ≥ 1`, with `ε ∈ (0, ½)`.
    Lexicographic(T),
    /// Explicit positive weights for levels `0..len`; need not be normalized.
    Weights(Vec<T>),
}

impl<T: Scalar> LevelDistribution<T> {
    pub fn geometric(q: T) -> Result<Self> {
        if !(q.is_positive() && q < T::one()) {
            return Err(invalid(format!(
                "geometric parameter must lie in (0, 1), got {q}"
            )));
        }
        Ok(LevelDistribution::Geometric(q))
    }

    pub fn lexicographic(epsilon: T) -> Result<Self> {
        if !(epsilon.is_positive() && epsilon < T::ratio(1, 2)) {
            return Err(invalid(format!(
                "lexicographic epsilon must lie in (0, 1/2), got {epsilon}"
            )));
        }
        Ok(LevelDistribution::Lexicographic(epsilon))
    }

    pub fn weights(prefix: Vec<T>) -> Result<Self> {
        if prefix.is_empty() || prefix.iter().any(|w| !w.is_positive()) {
            return Err(invalid(
                "level weights must be a non-empty list of positive values",
            ));
        }
        Ok(LevelDistribution::Weights(prefix))
    }

    /// Number of levels with a defined weight, `None` when unbounded.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            LevelDistribution::Weights(w) => Some(w.len()),
            _ => None,
        }
    }

    /// The (unnormalized for `Weights`) weight of level `t`.
    pub fn weight(&self, t: usize) -> Option<T> {
        match self {
            LevelDistribution::Geometric(q) => {
                let fail = T::one() - q.clone();
                Some(q.clone() * pow(&fail, t))
            }
            LevelDistribution::Lexicographic(eps) => {
                if t == 0 {
                    let one = T::one();
                    Some((one.clone() - T::int(2) * eps.clone()) / (one - eps.clone()))
                } else {
                    Some(pow(eps, t))
                }
            }
            LevelDistribution::Weights(w) => w.get(t).cloned(),
        }
    }

    /// True when levels `0..k_max` all carry a weight.
    pub fn supports(&self, k_max: usize) -> bool {
        self.horizon().is_none_or(|h| k_max <= h)
    }
}

fn pow<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

/// `fᵏ(t) = f(t) / Σ_{t' < k} f(t')` for `t = 0..k−1`.
pub fn truncate_levels<T: Scalar>(dist: &LevelDistribution<T>, k: usize) -> Result<Vec<T>> {
    if k == 0 {
        return Err(invalid("truncation order must be at least 1"));
    }
    let raw: Vec<T> = (0..k)
        .map(|t| {
            dist.weight(t)
                .ok_or_else(|| invalid(format!("level distribution has no weight for level {t}")))
        })
        .collect::<Result<_>>()?;
    if raw.iter().any(|w| !w.is_positive()) {
        return Err(invalid("level weights must be strictly positive"));
    }
    let total = sum(&raw);
    Ok(raw.into_iter().map(|w| w / total.clone()).collect())
}

/// `θ_{i,k}`: the level-`k` type of `player`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeIndex {
    pub player: Player,
    pub k: usize,
}

impl TypeIndex {
    pub fn new(player: Player, k: usize) -> Self {
        TypeIndex { player, k }
    }
}

impl fmt::Display for TypeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "θ({},{})", self.player.index() + 1, self.k)
    }
}

/// Which first-order belief restrictions the lifted-game types obey.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RestrictionModel<T> {
    /// Anchor on level 0, only strictly lower levels possible.
    Downward,
    /// Additionally only level `k − 1` possible.
    LevelK,
    /// Additionally the level marginal is the truncated distribution.
    CognitiveHierarchy(LevelDistribution<T>),
}

impl<T> RestrictionModel<T> {
    pub fn name(&self) -> &'static str {
        match self {
            RestrictionModel::Downward => "downward",
            RestrictionModel::LevelK => "levelk",
            RestrictionModel::CognitiveHierarchy(_) => "ch",
        }
    }

    /// Opponent levels a type of level `k ≥ 1` deems possible.
    pub fn allowed_levels(&self, k: usize) -> std::ops::Range<usize> {
        match self {
            RestrictionModel::LevelK => k - 1..k,
            _ => 0..k,
        }
    }
}

/// A distribution over opponent (level, action) pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiftedConjecture<T> {
    pub holder: Player,
    /// `(level, opponent action, weight)` with positive weights only.
    pub entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> LiftedConjecture<T> {
    /// Marginal on opponent actions.
    pub fn action_marginal<G>(&self, game: &Game<G>) -> Conjecture<T> {
        let mut weights = vec![T::zero(); game.num_actions(self.holder.opponent())];
        for (_, a, w) in &self.entries {
            weights[*a] += w;
        }
        Conjecture {
            holder: self.holder,
            weights,
        }
    }

    /// Mass on each opponent level.
    pub fn level_marginal(&self) -> BTreeMap<usize, T> {
        let mut out = BTreeMap::new();
        for (t, _, w) in &self.entries {
            *out.entry(*t).or_insert_with(T::zero) += w;
        }
        out
    }

    pub fn total(&self) -> T {
        sum(self.entries.iter().map(|(_, _, w)| w))
    }
}

/// Per-player `(k, n)` table of action sets produced by the lifted-game engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionGrid<T> {
    pub model: RestrictionModel<T>,
    pub anchor: Anchor<T>,
    pub k_max: usize,
    pub n_max: usize,
    /// `cells[player][k][n]` for `k ∈ 0..=k_max`, `n ∈ 0..=n_max`.
    pub cells: [Vec<Vec<ActionSet>>; 2],
    /// Justifying conjecture for every member of every cell with `k, n ≥ 1`.
    pub witnesses: BTreeMap<CellMember, LiftedConjecture<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellMember {
    pub player: Player,
    pub k: usize,
    pub n: usize,
    pub action: usize,
}

impl<T> SolutionGrid<T> {
    pub fn cell(&self, player: Player, k: usize, n: usize) -> ActionSet {
        self.cells[player.index()][k][n]
    }

    pub fn row(&self, player: Player, k: usize) -> &[ActionSet] {
        &self.cells[player.index()][k]
    }
}

/// `Σ_b ν(b)·π_i(a, b)` without validation; callers guarantee shapes.
pub(crate) fn expected_payoff_raw<T: Scalar>(
    game: &Game<T>,
    player: Player,
    action: usize,
    weights: &[T],
) -> T {
    let row = &game.payoff_matrix(player)[action];
    let mut acc = T::zero();
    for (w, v) in weights.iter().zip(row) {
        if !w.is_zero() {
            acc += &(w.clone() * v.clone());
        }
    }
    acc
}

pub fn expected_payoff<T: Scalar>(
    game: &Game<T>,
    player: Player,
    action: usize,
    conjecture: &Conjecture<T>,
) -> Result<T> {
    if conjecture.holder != player {
        return Err(invalid(format!(
            "conjecture is held by {} but payoff requested for {player}",
            conjecture.holder
        )));
    }
    if action >= game.num_actions(player) {
        return Err(invalid(format!(
            "{player} has no action with index {action}"
        )));
    }
    conjecture.validate(game)?;
    Ok(expected_payoff_raw(
        game,
        player,
        action,
        &conjecture.weights,
    ))
}

pub(crate) fn best_reply_raw<T: Scalar>(
    game: &Game<T>,
    player: Player,
    weights: &[T],
) -> ActionSet {
    let values: Vec<T> = (0..game.num_actions(player))
        .map(|a| expected_payoff_raw(game, player, a, weights))
        .collect();
    let max = values.iter().max().expect("at least one action").clone();
    ActionSet::from_indices(
        player,
        values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == max)
            .map(|(a, _)| a),
    )
}

/// The exact argmax set `r_i(ν)`.
pub fn best_reply<T: Scalar>(
    game: &Game<T>,
    player: Player,
    conjecture: &Conjecture<T>,
) -> Result<ActionSet> {
    if conjecture.holder != player {
        return Err(Error::InvalidInput(format!(
            "conjecture is held by {} but best reply requested for {player}",
            conjecture.holder
        )));
    }
    conjecture.validate(game)?;
    Ok(best_reply_raw(game, player, &conjecture.weights))
}
