//! Exact linear-programming kernel.
//!
//! A dense two-phase simplex with Bland's rule over any [`Scalar`]. Strict
//! inequalities are handled by [`LinearSystem::max_slack`]: every strict row
//! `expr > 0` becomes `expr ≥ t` and `t` is maximized; the row set is strictly
//! satisfiable iff the optimum is positive.

use log::warn;

use crate::error::{invalid, Error, Result};
use crate::model::{
    best_reply_raw, expected_payoff_raw, ActionSet, Conjecture, Game, LiftedConjecture, Player,
    TypeIndex,
};
use crate::scalar::{is_probability_vector, sum, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

#[derive(Clone, Debug)]
struct Row<T> {
    coeffs: Vec<(usize, T)>,
    rel: Relation,
    rhs: T,
}

/// Linear constraints over named variables. Variables are non-negative unless
/// declared free.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem<T> {
    names: Vec<String>,
    free: Vec<bool>,
    rows: Vec<Row<T>>,
    strict: Vec<Vec<(usize, T)>>,
    objective: Option<Vec<(usize, T)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome<T> {
    Infeasible,
    /// Objective unbounded above; `point` is some feasible assignment.
    Unbounded {
        point: Vec<T>,
    },
    Optimal {
        value: T,
        point: Vec<T>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlackOutcome<T> {
    Infeasible,
    /// The slack can be made arbitrarily large (always the case when there
    /// are no strict rows and the system is feasible).
    Unbounded {
        point: Vec<T>,
    },
    Optimal {
        slack: T,
        point: Vec<T>,
    },
}

impl<T> SlackOutcome<T> {
    /// The strict rows can all hold simultaneously.
    pub fn strictly_feasible(&self) -> bool
    where
        T: Scalar,
    {
        match self {
            SlackOutcome::Infeasible => false,
            SlackOutcome::Unbounded { .. } => true,
            SlackOutcome::Optimal { slack, .. } => slack.is_positive(),
        }
    }

    pub fn point(&self) -> Option<&[T]> {
        match self {
            SlackOutcome::Infeasible => None,
            SlackOutcome::Unbounded { point } | SlackOutcome::Optimal { point, .. } => Some(point),
        }
    }
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new() -> Self {
        LinearSystem {
            names: Vec::new(),
            free: Vec::new(),
            rows: Vec::new(),
            strict: Vec::new(),
            objective: None,
        }
    }

    pub fn var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.free.push(false);
        self.names.len() - 1
    }

    pub fn free_var(&mut self, name: impl Into<String>) -> usize {
        let v = self.var(name);
        self.free[v] = true;
        v
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constrain(&mut self, coeffs: Vec<(usize, T)>, rel: Relation, rhs: T) {
        self.rows.push(Row { coeffs, rel, rhs });
    }

    /// Adds `Σ coeffs·x > 0`, realized through the slack in [`Self::max_slack`].
    pub fn strict(&mut self, coeffs: Vec<(usize, T)>) {
        self.strict.push(coeffs);
    }

    pub fn maximize(&mut self, coeffs: Vec<(usize, T)>) {
        self.objective = Some(coeffs);
    }

    fn check(&self) -> Result<()> {
        let n = self.names.len();
        let rows = self.rows.iter().map(|r| &r.coeffs);
        let all = rows.chain(self.strict.iter()).chain(self.objective.iter());
        for coeffs in all {
            if let Some((v, _)) = coeffs.iter().find(|(v, _)| *v >= n) {
                return Err(invalid(format!(
                    "constraint references undeclared variable {v}"
                )));
            }
        }
        Ok(())
    }

    /// Maximizes the objective (zero when unset) over the weak constraints.
    pub fn solve(&self) -> Result<LpOutcome<T>> {
        self.check()?;
        let zero = Vec::new();
        let objective = self.objective.as_ref().unwrap_or(&zero);
        Ok(simplex(self.names.len(), &self.free, &self.rows, objective))
    }

    /// Maximizes the common slack `t` of the strict rows.
    pub fn max_slack(&self) -> Result<SlackOutcome<T>> {
        self.check()?;
        let n = self.names.len();
        let mut free = self.free.clone();
        free.push(true);
        let t = n;
        let mut rows = self.rows.clone();
        for s in &self.strict {
            let mut coeffs = s.clone();
            coeffs.push((t, -T::one()));
            rows.push(Row {
                coeffs,
                rel: Relation::Ge,
                rhs: T::zero(),
            });
        }
        let outcome = simplex(n + 1, &free, &rows, &[(t, T::one())]);
        Ok(match outcome {
            LpOutcome::Infeasible => SlackOutcome::Infeasible,
            LpOutcome::Unbounded { mut point } => {
                point.truncate(n);
                SlackOutcome::Unbounded { point }
            }
            LpOutcome::Optimal { value, mut point } => {
                point.truncate(n);
                SlackOutcome::Optimal {
                    slack: value,
                    point,
                }
            }
        })
    }

    /// Checks a point against every weak row and returns the minimum strict
    /// margin (`None` when a weak row fails or there are no strict rows).
    pub fn evaluate(&self, point: &[T]) -> Option<Option<T>> {
        let dot = |coeffs: &[(usize, T)]| {
            let mut acc = T::zero();
            for (v, c) in coeffs {
                acc += &(c.clone() * point[*v].clone());
            }
            acc
        };
        for (v, is_free) in self.free.iter().enumerate() {
            if !is_free && point[v].is_negative() {
                return None;
            }
        }
        for row in &self.rows {
            let lhs = dot(&row.coeffs);
            let ok = match row.rel {
                Relation::Eq => lhs == row.rhs,
                Relation::Ge => lhs >= row.rhs,
                Relation::Le => lhs <= row.rhs,
            };
            if !ok {
                return None;
            }
        }
        Some(self.strict.iter().map(|s| dot(s)).min())
    }
}

/// Dense simplex tableau. Column `ncols` holds the right-hand side.
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize, cost: &mut [T]) {
        let inv = T::one() / self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    row[j] -= &(f.clone() * pv.clone());
                }
            }
        }
        if !cost[c].is_zero() {
            let f = cost[c].clone();
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    cost[j] -= &(f.clone() * pv.clone());
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for maximizing `c·x` at the current basis; the last
    /// entry is `−z`.
    fn reduced_costs(&self, c: &[T]) -> Vec<T> {
        let mut cost: Vec<T> = c.to_vec();
        cost.push(T::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if c[b].is_zero() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    cost[j] -= &(c[b].clone() * v.clone());
                }
            }
        }
        cost
    }

    /// Bland's rule iterations over the allowed columns; `false` on unbounded.
    fn optimize(&mut self, c: &[T], allowed: &[bool]) -> bool {
        let mut cost = self.reduced_costs(c);
        loop {
            let entering = (0..self.ncols).find(|&j| allowed[j] && cost[j].is_positive());
            let Some(e) = entering else { return true };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = row[self.ncols].clone() / row[e].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, e, &mut cost),
            }
        }
    }

    fn value_of(&self, col: usize) -> T {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map(|r| self.rows[r][self.ncols].clone())
            .unwrap_or_else(T::zero)
    }
}

fn simplex<T: Scalar>(
    nvars: usize,
    free: &[bool],
    rows: &[Row<T>],
    objective: &[(usize, T)],
) -> LpOutcome<T> {
    // structural columns: one per non-negative variable, two per free one
    let mut col_of = Vec::with_capacity(nvars);
    let mut ncols = 0;
    for &f in free.iter().take(nvars) {
        col_of.push(ncols);
        ncols += if f { 2 } else { 1 };
    }
    let structural = ncols;
    let slack_cols = rows.iter().filter(|r| r.rel != Relation::Eq).count();
    let m = rows.len();
    let total = structural + slack_cols + m;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols: total,
    };
    let mut next_slack = structural;
    for (i, row) in rows.iter().enumerate() {
        let mut dense = vec![T::zero(); total + 1];
        for (v, c) in &row.coeffs {
            dense[col_of[*v]] += c;
            if free[*v] {
                dense[col_of[*v] + 1] -= c;
            }
        }
        match row.rel {
            Relation::Ge => {
                dense[next_slack] = -T::one();
                next_slack += 1;
            }
            Relation::Le => {
                dense[next_slack] = T::one();
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        dense[total] = row.rhs.clone();
        if dense[total].is_negative() {
            for v in dense.iter_mut() {
                *v = -v.clone();
            }
        }
        let art = structural + slack_cols + i;
        dense[art] = T::one();
        tab.rows.push(dense);
        tab.basis.push(art);
    }

    // phase 1: drive artificial mass to zero
    let mut phase1 = vec![T::zero(); total];
    for c in phase1.iter_mut().skip(structural + slack_cols) {
        *c = -T::one();
    }
    let all = vec![true; total];
    tab.optimize(&phase1, &all);
    let infeasibility: T = sum((structural + slack_cols..total)
        .map(|c| tab.value_of(c))
        .collect::<Vec<_>>()
        .iter());
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }

    // pivot remaining (zero-valued) artificials out; drop redundant rows
    let first_art = structural + slack_cols;
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= first_art {
            match (0..first_art).find(|&j| !tab.rows[r][j].is_zero()) {
                Some(j) => {
                    let mut dummy = vec![T::zero(); total + 1];
                    tab.pivot(r, j, &mut dummy);
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    let mut phase2 = vec![T::zero(); total];
    for (v, c) in objective {
        phase2[col_of[*v]] += c;
        if free[*v] {
            phase2[col_of[*v] + 1] -= c;
        }
    }
    let mut allowed = vec![true; total];
    for a in allowed.iter_mut().skip(first_art) {
        *a = false;
    }
    let bounded = tab.optimize(&phase2, &allowed);

    let point: Vec<T> = (0..nvars)
        .map(|v| {
            let pos = tab.value_of(col_of[v]);
            if free[v] {
                pos - tab.value_of(col_of[v] + 1)
            } else {
                pos
            }
        })
        .collect();
    if !bounded {
        return LpOutcome::Unbounded { point };
    }
    let mut value = T::zero();
    for (v, c) in objective {
        value += &(c.clone() * point[*v].clone());
    }
    LpOutcome::Optimal { value, point }
}

/// An exact certificate for a kernel verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness<T> {
    /// A dominating mixture over the player's own actions.
    MixedStrategy {
        player: Player,
        weights: Vec<T>,
    },
    LiftedConjecture(LiftedConjecture<T>),
    PlainConjecture(Conjecture<T>),
}

/// One opponent level inside a belief polytope.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeBlock<T> {
    pub level: usize,
    /// Opponent actions this level may be believed to play.
    pub support: ActionSet,
    /// Fixed probability of this level, if restricted.
    pub mass: Option<T>,
    /// Fixed conditional distribution over opponent actions, if restricted.
    pub conditional: Option<Vec<T>>,
}

/// Feasible lifted conjectures of one type: a product of per-level blocks
/// glued by total mass one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BeliefPolytope<T> {
    /// The type holding the belief; `None` for a plain conjecture simplex.
    pub owner: Option<TypeIndex>,
    pub holder: Player,
    pub blocks: Vec<TypeBlock<T>>,
}

impl<T: Scalar> BeliefPolytope<T> {
    /// The unrestricted simplex of conjectures supported on `support`.
    pub fn simplex(holder: Player, support: ActionSet) -> Self {
        BeliefPolytope {
            owner: None,
            holder,
            blocks: vec![TypeBlock {
                level: 0,
                support,
                mass: None,
                conditional: None,
            }],
        }
    }

    pub fn validate<G>(&self, game: &Game<G>) -> Result<()> {
        let opp = self.holder.opponent();
        let n_opp = game.num_actions(opp);
        if let Some(owner) = self.owner {
            if owner.player != self.holder {
                return Err(invalid("polytope owner and holder disagree"));
            }
        }
        if self.blocks.is_empty() {
            return Err(invalid("belief polytope has no blocks"));
        }
        let mut fixed = T::zero();
        for (i, b) in self.blocks.iter().enumerate() {
            if self.blocks[..i].iter().any(|o| o.level == b.level) {
                return Err(invalid(format!(
                    "level {} appears twice in polytope",
                    b.level
                )));
            }
            if b.support.player() != opp || b.support.iter().any(|a| a >= n_opp) {
                return Err(invalid("block support is not a set of opponent actions"));
            }
            if let Some(m) = &b.mass {
                if m.is_negative() || *m > T::one() {
                    return Err(invalid(format!("block mass {m} outside [0, 1]")));
                }
                fixed += m;
            }
            if let Some(c) = &b.conditional {
                if c.len() != n_opp || !is_probability_vector(c) {
                    return Err(invalid(
                        "block conditional is not a distribution over opponent actions",
                    ));
                }
            }
        }
        if fixed > T::one() || (self.blocks.iter().all(|b| b.mass.is_some()) && !fixed.is_one()) {
            return Err(invalid("fixed level masses must sum to one"));
        }
        Ok(())
    }

    /// Variable layout: `(block index, action)` in block order then action order.
    pub fn variables(&self) -> Vec<(usize, usize)> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.support.iter().map(move |a| (i, a)))
            .collect()
    }

    /// The polytope as a linear system over [`Self::variables`].
    pub fn linear_system(&self) -> LinearSystem<T> {
        let vars = self.variables();
        let mut sys = LinearSystem::new();
        for (b, a) in &vars {
            sys.var(format!("mu[{},{}]", self.blocks[*b].level, a));
        }
        sys.constrain(
            (0..vars.len()).map(|v| (v, T::one())).collect(),
            Relation::Eq,
            T::one(),
        );
        for (bi, block) in self.blocks.iter().enumerate() {
            let own: Vec<usize> = (0..vars.len()).filter(|&v| vars[v].0 == bi).collect();
            if let Some(m) = &block.mass {
                sys.constrain(
                    own.iter().map(|&v| (v, T::one())).collect(),
                    Relation::Eq,
                    m.clone(),
                );
            }
            if let Some(cond) = &block.conditional {
                // μ(t, a) = c(a) · Σ_b μ(t, b)
                for (a, ca) in cond.iter().enumerate() {
                    let mut coeffs: Vec<(usize, T)> =
                        own.iter().map(|&v| (v, -ca.clone())).collect();
                    if let Some(&v) = own.iter().find(|&&v| vars[v].1 == a) {
                        coeffs.retain(|(w, _)| *w != v);
                        coeffs.push((v, T::one() - ca.clone()));
                    } else if ca.is_zero() {
                        continue;
                    }
                    sys.constrain(coeffs, Relation::Eq, T::zero());
                }
            }
        }
        sys
    }

    /// Exact membership test for a lifted conjecture.
    pub fn contains(&self, mu: &LiftedConjecture<T>) -> bool {
        if mu.holder != self.holder || mu.entries.iter().any(|(_, _, w)| w.is_negative()) {
            return false;
        }
        if !mu.total().is_one() {
            return false;
        }
        for (t, a, w) in &mu.entries {
            let ok = self
                .blocks
                .iter()
                .any(|b| b.level == *t && b.support.contains(*a));
            if !ok && !w.is_zero() {
                return false;
            }
        }
        let levels = mu.level_marginal();
        for b in &self.blocks {
            let mass = levels.get(&b.level).cloned().unwrap_or_else(T::zero);
            if let Some(m) = &b.mass {
                if mass != *m {
                    return false;
                }
            }
            if let Some(c) = &b.conditional {
                for (a, ca) in c.iter().enumerate() {
                    let w = sum(mu
                        .entries
                        .iter()
                        .filter(|(t, x, _)| *t == b.level && *x == a)
                        .map(|(_, _, w)| w));
                    if w != ca.clone() * mass.clone() {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn lift(&self, point: &[T]) -> LiftedConjecture<T> {
        let entries = self
            .variables()
            .into_iter()
            .zip(point)
            .filter(|(_, w)| !w.is_zero())
            .map(|((b, a), w)| (self.blocks[b].level, a, w.clone()))
            .collect();
        LiftedConjecture {
            holder: self.holder,
            entries,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dominance<T> {
    pub dominated: bool,
    /// A mixture over the own support with positive margin against every
    /// opponent action in the set; present iff `dominated`.
    pub witness: Option<Witness<T>>,
    pub margin: Option<T>,
}

/// Is `action` strictly dominated by a mixture over `own_support`, against
/// every opponent action in `opp_set`?
pub fn strictly_dominated<T: Scalar>(
    game: &Game<T>,
    player: Player,
    action: usize,
    own_support: &ActionSet,
    opp_set: &ActionSet,
) -> Result<Dominance<T>> {
    if own_support.player() != player || opp_set.player() != player.opponent() {
        return Err(invalid("action sets belong to the wrong players"));
    }
    if !own_support.contains(action) {
        return Err(invalid(
            "dominance check for an action outside its own support",
        ));
    }
    if opp_set.is_empty() {
        return Err(invalid("dominance check against an empty opponent set"));
    }
    let own: Vec<usize> = own_support.iter().collect();
    let mut sys = LinearSystem::new();
    for a in &own {
        sys.var(format!("alpha[{a}]"));
    }
    sys.constrain(
        (0..own.len()).map(|v| (v, T::one())).collect(),
        Relation::Eq,
        T::one(),
    );
    for b in opp_set.iter() {
        // Σ α(a')·π(a', b) − π(a, b) > 0, written with Σα = 1
        let target = game.payoff(player, action, b).clone();
        sys.strict(
            own.iter()
                .enumerate()
                .map(|(v, &a)| (v, game.payoff(player, a, b).clone() - target.clone()))
                .collect(),
        );
    }
    let outcome = sys.max_slack()?;
    let dominated = outcome.strictly_feasible();
    if !dominated {
        return Ok(Dominance {
            dominated,
            witness: None,
            margin: None,
        });
    }
    let point = outcome.point().expect("feasible outcome has a point");
    let mut weights = vec![T::zero(); game.num_actions(player)];
    for (v, &a) in own.iter().enumerate() {
        weights[a] = point[v].clone();
    }
    let margin = dominance_margin(game, player, action, &weights, opp_set);
    if !margin.is_positive() {
        return Err(Error::Verification(format!(
            "dominance witness for {} has non-positive margin {margin}",
            game.action_name(player, action)
        )));
    }
    Ok(Dominance {
        dominated,
        witness: Some(Witness::MixedStrategy { player, weights }),
        margin: Some(margin),
    })
}

/// `min_b Σ α(a')π(a', b) − π(a, b)` over `opp_set`, by direct arithmetic.
pub fn dominance_margin<T: Scalar>(
    game: &Game<T>,
    player: Player,
    action: usize,
    mixture: &[T],
    opp_set: &ActionSet,
) -> T {
    opp_set
        .iter()
        .map(|b| {
            let mut acc = -game.payoff(player, action, b).clone();
            for (a, w) in mixture.iter().enumerate() {
                if !w.is_zero() {
                    acc += &(w.clone() * game.payoff(player, a, b).clone());
                }
            }
            acc
        })
        .min()
        .expect("non-empty opponent set")
}

/// A lifted conjecture in the polytope whose action marginal makes `action` a
/// best reply, or `None`.
pub fn justifiable_in_polytope<T: Scalar>(
    game: &Game<T>,
    player: Player,
    action: usize,
    polytope: &BeliefPolytope<T>,
) -> Result<Option<LiftedConjecture<T>>> {
    if polytope.holder != player {
        return Err(invalid("polytope belongs to the other player"));
    }
    if action >= game.num_actions(player) {
        return Err(invalid(format!(
            "{player} has no action with index {action}"
        )));
    }
    polytope.validate(game)?;
    let vars = polytope.variables();
    let mut sys = polytope.linear_system();
    for other in 0..game.num_actions(player) {
        if other == action {
            continue;
        }
        let coeffs = vars
            .iter()
            .enumerate()
            .map(|(v, &(_, b))| {
                (
                    v,
                    game.payoff(player, action, b).clone() - game.payoff(player, other, b).clone(),
                )
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        sys.constrain(coeffs, Relation::Ge, T::zero());
    }
    let point = match sys.solve()? {
        LpOutcome::Infeasible => return Ok(None),
        LpOutcome::Unbounded { point } | LpOutcome::Optimal { point, .. } => point,
    };
    let mu = polytope.lift(&point);
    let marginal = mu.action_marginal(game);
    if !polytope.contains(&mu) || !best_reply_raw(game, player, &marginal.weights).contains(action)
    {
        return Err(Error::Verification(format!(
            "justifying conjecture for {} failed re-verification",
            game.action_name(player, action)
        )));
    }
    Ok(Some(mu))
}

/// One exact best-reply set with a conjecture attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ebrs<T> {
    pub set: ActionSet,
    pub witness: Conjecture<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct EbrsOptions {
    /// Refuse players with more actions than this.
    pub max_actions: usize,
    /// Warn when the number of candidate subsets exceeds this.
    pub warn_subsets: usize,
}

impl Default for EbrsOptions {
    fn default() -> Self {
        EbrsOptions {
            max_actions: 12,
            warn_subsets: 1 << 10,
        }
    }
}

/// All exact best-reply sets of `player` over conjectures on the full
/// opponent action set.
pub fn ebrs_enumerate<T: Scalar>(
    game: &Game<T>,
    player: Player,
    opts: &EbrsOptions,
) -> Result<Vec<Ebrs<T>>> {
    ebrs_within(game, player, &game.full_set(player.opponent()), opts)
}

/// Exact best-reply sets over conjectures supported within `opp_support`.
pub fn ebrs_within<T: Scalar>(
    game: &Game<T>,
    player: Player,
    opp_support: &ActionSet,
    opts: &EbrsOptions,
) -> Result<Vec<Ebrs<T>>> {
    let n = game.num_actions(player);
    if n > opts.max_actions {
        return Err(Error::Capacity(format!(
            "{player} has {n} actions; exact best-reply enumeration is limited to {}",
            opts.max_actions
        )));
    }
    if opp_support.is_empty() {
        return Err(invalid(
            "exact best-reply sets need a non-empty opponent support",
        ));
    }
    let subsets = 1usize << n;
    if subsets > opts.warn_subsets {
        warn!("enumerating {subsets} candidate best-reply sets for {player}");
    }
    let opp: Vec<usize> = opp_support.iter().collect();
    let n_opp = game.num_actions(player.opponent());
    let mut out = Vec::new();
    for mask in 1..subsets as u64 {
        let set = ActionSet::from_mask(player, mask);
        let members: Vec<usize> = set.iter().collect();
        let mut sys = LinearSystem::new();
        for b in &opp {
            sys.var(format!("nu[{b}]"));
        }
        sys.constrain(
            (0..opp.len()).map(|v| (v, T::one())).collect(),
            Relation::Eq,
            T::one(),
        );
        let diff = |a: usize, c: usize| -> Vec<(usize, T)> {
            opp.iter()
                .enumerate()
                .map(|(v, &b)| {
                    (
                        v,
                        game.payoff(player, a, b).clone() - game.payoff(player, c, b).clone(),
                    )
                })
                .filter(|(_, x)| !x.is_zero())
                .collect()
        };
        let lead = members[0];
        for &a in &members[1..] {
            sys.constrain(diff(lead, a), Relation::Eq, T::zero());
        }
        for c in (0..n).filter(|c| !set.contains(*c)) {
            sys.strict(diff(lead, c));
        }
        let outcome = sys.max_slack()?;
        if !outcome.strictly_feasible() {
            continue;
        }
        let point = outcome.point().expect("feasible");
        let mut weights = vec![T::zero(); n_opp];
        for (v, &b) in opp.iter().enumerate() {
            weights[b] = point[v].clone();
        }
        let witness = Conjecture {
            holder: player,
            weights,
        };
        if best_reply_raw(game, player, &witness.weights) != set {
            return Err(Error::Verification(format!(
                "exact best-reply witness for {} failed re-verification",
                set.display(game)
            )));
        }
        out.push(Ebrs { set, witness });
    }
    Ok(out)
}

/// The conjecture maximizing the margin by which `action` beats every other
/// action, with that margin. `None` when no conjecture makes it the unique best
/// reply.
pub fn strict_best_reply_witness<T: Scalar>(
    game: &Game<T>,
    player: Player,
    action: usize,
) -> Result<Option<(Conjecture<T>, Option<T>)>> {
    let n_opp = game.num_actions(player.opponent());
    let mut sys = LinearSystem::new();
    for b in 0..n_opp {
        sys.var(format!("nu[{b}]"));
    }
    sys.constrain(
        (0..n_opp).map(|v| (v, T::one())).collect(),
        Relation::Eq,
        T::one(),
    );
    for other in (0..game.num_actions(player)).filter(|&o| o != action) {
        sys.strict(
            (0..n_opp)
                .map(|b| {
                    (
                        b,
                        game.payoff(player, action, b).clone()
                            - game.payoff(player, other, b).clone(),
                    )
                })
                .collect(),
        );
    }
    let outcome = sys.max_slack()?;
    if !outcome.strictly_feasible() {
        return Ok(None);
    }
    let weights = outcome.point().expect("feasible").to_vec();
    let slack = match outcome {
        SlackOutcome::Optimal { slack, .. } => Some(slack),
        _ => None,
    };
    let witness = Conjecture {
        holder: player,
        weights,
    };
    if best_reply_raw(game, player, &witness.weights) != ActionSet::from_indices(player, [action]) {
        return Err(Error::Verification(
            "strict best-reply witness failed re-verification".into(),
        ));
    }
    if let Some(s) = &slack {
        let v = expected_payoff_raw(game, player, action, &witness.weights);
        for other in (0..game.num_actions(player)).filter(|&o| o != action) {
            if v.clone() - expected_payoff_raw(game, player, other, &witness.weights) < *s {
                return Err(Error::Verification(
                    "strict witness margin below reported slack".into(),
                ));
            }
        }
    }
    Ok(Some((witness, slack)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, ratio};
    use crate::Rational;
    use num_traits::Signed;

    #[test]
    fn max_slack_single_variable() {
        let mut sys = LinearSystem::<Rational>::new();
        let x = sys.var("x");
        sys.constrain(vec![(x, ratio(1, 1))], Relation::Le, ratio(1, 1));
        sys.strict(vec![(x, ratio(1, 1))]);
        match sys.max_slack().unwrap() {
            SlackOutcome::Optimal { slack, point } => {
                assert_eq!(slack, ratio(1, 1));
                assert_eq!(point, vec![ratio(1, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn max_slack_symmetric_zero() {
        let mut sys = LinearSystem::<Rational>::new();
        let x = sys.var("x");
        let y = sys.var("y");
        sys.constrain(
            vec![(x, ratio(1, 1)), (y, ratio(1, 1))],
            Relation::Eq,
            ratio(1, 1),
        );
        sys.strict(vec![(x, ratio(1, 1)), (y, ratio(-1, 1))]);
        sys.strict(vec![(y, ratio(1, 1)), (x, ratio(-1, 1))]);
        match sys.max_slack().unwrap() {
            SlackOutcome::Optimal { slack, point } => {
                assert_eq!(slack, ratio(0, 1));
                assert_eq!(point, vec![ratio(1, 2), ratio(1, 2)]);
                assert!(!SlackOutcome::Optimal { slack, point }.strictly_feasible());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn max_slack_on_iterated_simplex() {
        // maximize t with EP(D) − EP(U) ≥ t and EP(D) − EP(M) ≥ t over ν ∈ Δ{l,c,r}
        let g = fixtures::iterated();
        let mut sys = LinearSystem::<Rational>::new();
        let vars: Vec<usize> = (0..3).map(|b| sys.var(format!("nu{b}"))).collect();
        sys.constrain(
            vars.iter().map(|&v| (v, ratio(1, 1))).collect(),
            Relation::Eq,
            ratio(1, 1),
        );
        for other in [0, 1] {
            sys.strict(
                (0..3)
                    .map(|b| {
                        (
                            b,
                            g.payoff(Player::One, 2, b).clone()
                                - g.payoff(Player::One, other, b).clone(),
                        )
                    })
                    .collect(),
            );
        }
        match sys.max_slack().unwrap() {
            SlackOutcome::Optimal { slack, point } => {
                assert_eq!(slack, ratio(1, 1));
                assert_eq!(point, vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut sys = LinearSystem::<Rational>::new();
        let x = sys.var("x");
        sys.constrain(vec![(x, ratio(1, 1))], Relation::Ge, ratio(2, 1));
        sys.constrain(vec![(x, ratio(1, 1))], Relation::Le, ratio(1, 1));
        assert_eq!(sys.solve().unwrap(), LpOutcome::Infeasible);
        assert_eq!(sys.max_slack().unwrap(), SlackOutcome::Infeasible);

        let mut sys = LinearSystem::<Rational>::new();
        let x = sys.var("x");
        sys.strict(vec![(x, ratio(1, 1))]);
        assert!(matches!(
            sys.max_slack().unwrap(),
            SlackOutcome::Unbounded { .. }
        ));

        let mut sys = LinearSystem::<Rational>::new();
        let _ = sys.var("x");
        sys.constrain(vec![(5, ratio(1, 1))], Relation::Eq, ratio(0, 1));
        assert!(sys.solve().is_err());
    }

    #[test]
    fn free_variables_and_redundant_rows() {
        let mut sys = LinearSystem::<Rational>::new();
        let x = sys.free_var("x");
        let y = sys.var("y");
        sys.constrain(
            vec![(x, ratio(1, 1)), (y, ratio(1, 1))],
            Relation::Eq,
            ratio(-2, 1),
        );
        sys.constrain(
            vec![(x, ratio(2, 1)), (y, ratio(2, 1))],
            Relation::Eq,
            ratio(-4, 1),
        );
        sys.constrain(vec![(y, ratio(1, 1))], Relation::Le, ratio(3, 1));
        sys.maximize(vec![(y, ratio(1, 1))]);
        match sys.solve().unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, ratio(3, 1));
                assert_eq!(point, vec![ratio(-5, 1), ratio(3, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dominance_examples() {
        let g = fixtures::iterated();
        let d = strictly_dominated(
            &g,
            Player::Two,
            2,
            &g.full_set(Player::Two),
            &g.full_set(Player::One),
        )
        .unwrap();
        assert!(d.dominated);
        assert!(d.margin.unwrap().is_positive());

        let lc = g.set_of(Player::Two, &["l", "c"]).unwrap();
        let d = strictly_dominated(&g, Player::One, 2, &g.full_set(Player::One), &lc).unwrap();
        assert!(d.dominated);
        if let Some(Witness::MixedStrategy { weights, .. }) = d.witness {
            assert!(dominance_margin(&g, Player::One, 2, &weights, &lc).is_positive());
        } else {
            panic!("missing witness");
        }

        // against a singleton the best reply survives
        let only_r = g.set_of(Player::Two, &["r"]).unwrap();
        let d = strictly_dominated(&g, Player::One, 2, &g.full_set(Player::One), &only_r).unwrap();
        assert!(!d.dominated && d.witness.is_none());

        assert!(strictly_dominated(
            &g,
            Player::One,
            0,
            &g.full_set(Player::One),
            &ActionSet::empty(Player::Two)
        )
        .is_err());
        let only_u = g.set_of(Player::One, &["U"]).unwrap();
        assert!(strictly_dominated(&g, Player::One, 2, &only_u, &only_r).is_err());
    }

    #[test]
    fn justifiable_on_simplex() {
        let g = fixtures::iterated();
        let poly = BeliefPolytope::simplex(Player::One, g.full_set(Player::Two));
        for a in 0..3 {
            let w = justifiable_in_polytope(&g, Player::One, a, &poly).unwrap();
            assert!(w.is_some());
        }
        let poly = BeliefPolytope::simplex(Player::Two, g.full_set(Player::One));
        assert!(justifiable_in_polytope(&g, Player::Two, 2, &poly)
            .unwrap()
            .is_none());
        assert!(justifiable_in_polytope(&g, Player::One, 0, &poly).is_err());
    }

    #[test]
    fn malformed_polytopes_are_rejected() {
        let g = fixtures::iterated();
        let mut poly = BeliefPolytope::simplex(Player::One, g.full_set(Player::Two));
        poly.blocks[0].mass = Some(ratio(1, 2));
        assert!(justifiable_in_polytope(&g, Player::One, 0, &poly).is_err());
        let mut poly = BeliefPolytope::simplex(Player::One, g.full_set(Player::Two));
        poly.blocks[0].conditional = Some(vec![ratio(1, 2), ratio(1, 2)]);
        assert!(justifiable_in_polytope(&g, Player::One, 0, &poly).is_err());
        let poly = BeliefPolytope::simplex(Player::One, g.full_set(Player::One));
        assert!(justifiable_in_polytope(&g, Player::One, 0, &poly).is_err());
    }

    #[test]
    fn empty_support_block_is_infeasible_not_an_error() {
        let g = fixtures::iterated();
        let poly = BeliefPolytope::simplex(Player::One, ActionSet::empty(Player::Two));
        assert_eq!(
            justifiable_in_polytope(&g, Player::One, 0, &poly).unwrap(),
            None
        );
    }

    #[test]
    fn ebrs_robust_gap() {
        let g = fixtures::robust_gap();
        let sets = |p: Player| -> Vec<ActionSet> {
            let mut s: Vec<ActionSet> = ebrs_enumerate(&g, p, &EbrsOptions::default())
                .unwrap()
                .into_iter()
                .map(|e| e.set)
                .collect();
            s.sort();
            s
        };
        let mut want1: Vec<ActionSet> = [&["U"][..], &["M"], &["D"], &["U", "D"], &["M", "D"]]
            .iter()
            .map(|l| g.set_of(Player::One, l).unwrap())
            .collect();
        want1.sort();
        assert_eq!(sets(Player::One), want1);
        let mut want2: Vec<ActionSet> = [&["c"][..], &["r"], &["c", "r"], &["l", "c", "r"]]
            .iter()
            .map(|l| g.set_of(Player::Two, l).unwrap())
            .collect();
        want2.sort();
        assert_eq!(sets(Player::Two), want2);
    }

    #[test]
    fn ebrs_nongeneric_dominant() {
        let g = fixtures::nongeneric();
        let e = ebrs_enumerate(&g, Player::One, &EbrsOptions::default()).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].set, g.set_of(Player::One, &["D"]).unwrap());
    }

    #[test]
    fn ebrs_capacity_guard() {
        let g = fixtures::iterated();
        let opts = EbrsOptions {
            max_actions: 2,
            ..Default::default()
        };
        assert!(matches!(
            ebrs_enumerate(&g, Player::One, &opts),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn fixed_width_scalars_agree() {
        use num_rational::Ratio;
        let g = fixtures::robust_gap().map_payoffs(|_, v| Ratio::<i64>::from_big(v).unwrap());
        let e = ebrs_enumerate(&g, Player::Two, &EbrsOptions::default()).unwrap();
        assert_eq!(e.len(), 4);
    }
}
