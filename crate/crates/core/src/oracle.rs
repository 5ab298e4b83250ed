//! Grid-sampling oracle: an LP-free check of justifiability.
//!
//! Enumerates lifted conjectures of a belief polytope whose free weights are
//! multiples of `1/N` and tests the best-reply inequalities by integer
//! arithmetic. A hit is a proof of membership; a miss only means no grid
//! point up to `N` works.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::lifted::build_restriction_polytope;
use crate::lifted::StepSurvivors;
use crate::lp::BeliefPolytope;
use crate::model::{
    best_reply_raw, ActionSet, CellMember, Game, LiftedConjecture, Player, SolutionGrid, TypeIndex,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict<T> {
    Found(LiftedConjecture<T>),
    /// No grid point justifies the action; `points` were examined.
    NotFound {
        points: u64,
    },
}

impl<T> OracleVerdict<T> {
    pub fn found(&self) -> bool {
        matches!(self, OracleVerdict::Found(_))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub bound: u32,
    /// Refuse searches with more grid points than this.
    pub max_points: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            bound: 60,
            max_points: 50_000_000,
        }
    }
}

/// Where the weight of one grid variable goes: `(block, action, share)` with
/// `share` the exact weight of one grid unit.
#[derive(Clone, Debug)]
struct Unit {
    targets: Vec<(usize, usize, BigRational)>,
}

/// One composition space: `parts` variables summing to `total` units.
#[derive(Clone, Debug)]
struct Space {
    units: Vec<Unit>,
    total: u32,
}

pub fn oracle_grid_sample<T: Scalar>(
    game: &Game<T>,
    player: Player,
    action: usize,
    polytope: &BeliefPolytope<T>,
    opts: &OracleOptions,
) -> Result<OracleVerdict<T>> {
    if opts.bound == 0 {
        return Err(invalid("denominator bound must be at least 1"));
    }
    if polytope.holder != player || action >= game.num_actions(player) {
        return Err(invalid("oracle query does not match the polytope"));
    }
    polytope.validate(game)?;
    let n = opts.bound;
    let big = |v: &T| v.to_big();
    let unit = BigRational::new(BigInt::one(), BigInt::from(n));

    let mut fixed: Vec<(usize, usize, BigRational)> = Vec::new();
    let mut free_units: Vec<Unit> = Vec::new();
    let mut spaces: Vec<Space> = Vec::new();
    let mut fixed_mass = BigRational::zero();
    let mut pooled: Vec<(usize, usize)> = Vec::new();
    // fixed-mass blocks without a conditional, grouped by support
    let mut groups: Vec<(ActionSet, BigRational, Vec<usize>)> = Vec::new();

    for (bi, b) in polytope.blocks.iter().enumerate() {
        match (&b.mass, &b.conditional) {
            (Some(m), Some(c)) => {
                let m = big(m);
                fixed_mass += &m;
                if m.is_zero() {
                    continue;
                }
                for (a, ca) in c.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    if !b.support.contains(a) {
                        return Ok(OracleVerdict::NotFound { points: 0 });
                    }
                    fixed.push((bi, a, m.clone() * big(ca)));
                }
            }
            (None, Some(c)) => {
                if c.iter()
                    .enumerate()
                    .all(|(a, ca)| ca.is_zero() || b.support.contains(a))
                {
                    let targets = c
                        .iter()
                        .enumerate()
                        .filter(|(_, ca)| !ca.is_zero())
                        .map(|(a, ca)| (bi, a, big(ca)))
                        .collect();
                    free_units.push(Unit { targets });
                }
            }
            (Some(m), None) => {
                let m = big(m);
                fixed_mass += &m;
                if m.is_zero() {
                    continue;
                }
                if b.support.is_empty() {
                    return Ok(OracleVerdict::NotFound { points: 0 });
                }
                match groups.iter_mut().find(|g| g.0 == b.support) {
                    Some(g) => {
                        g.1 += &m;
                        g.2.push(bi);
                    }
                    None => groups.push((b.support, m, vec![bi])),
                }
            }
            (None, None) => {
                for a in b.support.iter() {
                    if !pooled.iter().any(|(_, x)| *x == a) {
                        pooled.push((bi, a));
                    }
                }
            }
        }
    }
    for (bi, a) in pooled {
        free_units.push(Unit {
            targets: vec![(bi, a, BigRational::one())],
        });
    }

    let free_mass = BigRational::one() - fixed_mass;
    if free_mass.is_negative() {
        return Ok(OracleVerdict::NotFound { points: 0 });
    }
    if free_mass.is_positive() {
        if free_units.is_empty() {
            return Ok(OracleVerdict::NotFound { points: 0 });
        }
        let scale = free_mass * &unit;
        for u in free_units.iter_mut() {
            for t in u.targets.iter_mut() {
                t.2 = t.2.clone() * &scale;
            }
        }
        spaces.push(Space {
            units: free_units,
            total: n,
        });
    }
    for (support, _, blocks) in &groups {
        let units = support
            .iter()
            .map(|a| Unit {
                // one unit of the shared conditional, split across the blocks
                targets: blocks
                    .iter()
                    .map(|&bi| {
                        let m = polytope.blocks[bi]
                            .mass
                            .as_ref()
                            .map(big)
                            .expect("fixed mass");
                        (bi, a, m * &unit)
                    })
                    .collect(),
            })
            .collect();
        spaces.push(Space { units, total: n });
    }

    let points = spaces.iter().try_fold(1u64, |acc, s| {
        let c = binomial(
            s.total as u64 + s.units.len() as u64 - 1,
            s.units.len() as u64 - 1,
        )?;
        acc.checked_mul(c)
    });
    match points {
        Some(p) if p <= opts.max_points => {}
        _ => {
            return Err(Error::Capacity(format!(
                "oracle search at bound {n} exceeds {} grid points",
                opts.max_points
            )))
        }
    }

    // integer form of Σ_b ν(b)·(π(a,b) − π(a',b)) ≥ 0 for every a' ≠ a
    let rivals: Vec<usize> = (0..game.num_actions(player))
        .filter(|&o| o != action)
        .collect();
    let diff = |b: usize, o: usize| -> BigRational {
        big(game.payoff(player, action, b)) - big(game.payoff(player, o, b))
    };
    let mut denoms = BigInt::one();
    let mut rational_rows: Vec<(BigRational, Vec<Vec<BigRational>>)> = Vec::new();
    for &o in &rivals {
        let c0: BigRational = fixed.iter().map(|(_, b, w)| w.clone() * diff(*b, o)).sum();
        denoms = denoms.lcm(c0.denom());
        let per_space: Vec<Vec<BigRational>> = spaces
            .iter()
            .map(|s| {
                s.units
                    .iter()
                    .map(|u| {
                        let v: BigRational = u
                            .targets
                            .iter()
                            .map(|(_, b, w)| w.clone() * diff(*b, o))
                            .sum();
                        v
                    })
                    .collect()
            })
            .collect();
        for row in &per_space {
            for v in row {
                denoms = denoms.lcm(v.denom());
            }
        }
        rational_rows.push((c0, per_space));
    }
    let to_int = |v: &BigRational| -> Result<i128> {
        (v * BigRational::from_integer(denoms.clone()))
            .to_integer()
            .to_i128()
            .ok_or_else(|| Error::Capacity("oracle coefficients overflow 128-bit integers".into()))
    };
    let mut base = Vec::with_capacity(rivals.len());
    let mut coeffs: Vec<Vec<Vec<i128>>> = spaces.iter().map(|_| Vec::new()).collect();
    for (c0, per_space) in &rational_rows {
        base.push(to_int(c0)?);
        for (si, row) in per_space.iter().enumerate() {
            coeffs[si].push(row.iter().map(&to_int).collect::<Result<_>>()?);
        }
    }
    // coeffs[space][rival][unit]

    let mut search = Search {
        spaces: &spaces,
        coeffs: &coeffs,
        choice: spaces.iter().map(|s| vec![0u32; s.units.len()]).collect(),
        examined: 0,
    };
    let found = search.run(0, base)?;
    if !found {
        return Ok(OracleVerdict::NotFound {
            points: search.examined,
        });
    }

    let mut entries: Vec<(usize, usize, BigRational)> = fixed.clone();
    for (si, s) in spaces.iter().enumerate() {
        for (ui, u) in s.units.iter().enumerate() {
            let count = search.choice[si][ui];
            if count == 0 {
                continue;
            }
            for (bi, b, w) in &u.targets {
                entries.push((*bi, *b, w.clone() * BigRational::from_integer(count.into())));
            }
        }
    }
    let mut merged: Vec<(usize, usize, T)> = Vec::new();
    for (bi, b, w) in entries {
        let level = polytope.blocks[bi].level;
        let w = T::from_big(&w)
            .ok_or_else(|| Error::Capacity("oracle weight does not fit the scalar".into()))?;
        match merged.iter_mut().find(|(l, x, _)| *l == level && *x == b) {
            Some(e) => e.2 += &w,
            None => merged.push((level, b, w)),
        }
    }
    merged.retain(|(_, _, w)| !w.is_zero());
    merged.sort_by_key(|x| (x.0, x.1));
    let mu = LiftedConjecture {
        holder: player,
        entries: merged,
    };
    let marginal = mu.action_marginal(game);
    if !polytope.contains(&mu) || !best_reply_raw(game, player, &marginal.weights).contains(action)
    {
        return Err(Error::Verification(
            "oracle grid point failed exact re-verification".into(),
        ));
    }
    Ok(OracleVerdict::Found(mu))
}

struct Search<'a> {
    spaces: &'a [Space],
    coeffs: &'a [Vec<Vec<i128>>],
    choice: Vec<Vec<u32>>,
    examined: u64,
}

impl Search<'_> {
    /// Depth-first over spaces; `partial[r]` is the running left-hand side for
    /// rival `r`.
    fn run(&mut self, space: usize, partial: Vec<i128>) -> Result<bool> {
        if space == self.spaces.len() {
            self.examined += 1;
            return Ok(partial.iter().all(|v| *v >= 0));
        }
        let s = &self.spaces[space];
        let parts = s.units.len();
        let mut comp = vec![0u32; parts];
        comp[parts - 1] = s.total;
        loop {
            let mut lhs = partial.clone();
            for (r, row) in self.coeffs[space].iter().enumerate() {
                for (u, &c) in comp.iter().enumerate() {
                    if c != 0 {
                        let term = row[u]
                            .checked_mul(c as i128)
                            .ok_or_else(|| Error::Capacity("oracle arithmetic overflow".into()))?;
                        lhs[r] = lhs[r]
                            .checked_add(term)
                            .ok_or_else(|| Error::Capacity("oracle arithmetic overflow".into()))?;
                    }
                }
            }
            if self.run(space + 1, lhs)? {
                self.choice[space] = comp;
                return Ok(true);
            }
            if !next_composition(&mut comp) {
                return Ok(false);
            }
        }
    }
}

/// Advances to the next composition of the same total in colex order;
/// `false` after the last one.
fn next_composition(c: &mut [u32]) -> bool {
    let k = c.len();
    if k <= 1 {
        return false;
    }
    // find the last nonzero entry excluding position 0
    let Some(j) = (1..k).rev().find(|&i| c[i] > 0) else {
        return false;
    };
    let moved = c[j];
    c[j] = 0;
    c[j - 1] += 1;
    c[k - 1] += moved - 1;
    true
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Agreement between the LP kernel and the oracle over a whole grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub checked: usize,
    pub agreed: usize,
    /// Kernel members the oracle found no grid witness for.
    pub inconclusive: Vec<CellMember>,
    /// Oracle witnesses for actions the kernel excluded.
    pub conflicts: Vec<CellMember>,
}

impl OracleReport {
    pub fn consistent(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn full_agreement(&self) -> bool {
        self.conflicts.is_empty() && self.inconclusive.is_empty()
    }
}

/// Survivors of every type at order `n` of a grid.
pub fn grid_column<T>(grid: &SolutionGrid<T>, n: usize) -> StepSurvivors {
    StepSurvivors {
        sets: Player::BOTH.map(|p| (0..=grid.k_max).map(|k| grid.cell(p, k, n)).collect()),
    }
}

/// Re-derives every cell `(k ≥ 1, n ≥ 1)` with the oracle and compares.
pub fn oracle_check_grid<T: Scalar>(
    game: &Game<T>,
    grid: &SolutionGrid<T>,
    opts: &OracleOptions,
) -> Result<OracleReport> {
    let mut report = OracleReport::default();
    for n in 1..=grid.n_max {
        let prev = grid_column(grid, n - 1);
        for p in Player::BOTH {
            for k in 1..=grid.k_max {
                let poly = build_restriction_polytope(
                    game,
                    &grid.model,
                    &grid.anchor,
                    TypeIndex::new(p, k),
                    &prev,
                )?;
                for a in 0..game.num_actions(p) {
                    let kernel = grid.cell(p, k, n).contains(a);
                    let oracle = prev.get(p, k).contains(a)
                        && oracle_grid_sample(game, p, a, &poly, opts)?.found();
                    report.checked += 1;
                    let member = CellMember {
                        player: p,
                        k,
                        n,
                        action: a,
                    };
                    match (kernel, oracle) {
                        (true, true) | (false, false) => report.agreed += 1,
                        (true, false) => report.inconclusive.push(member),
                        (false, true) => report.conflicts.push(member),
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Anchor, RestrictionModel};

    #[test]
    fn compositions_enumerate_all() {
        let mut c = vec![0, 0, 4];
        let mut count = 1;
        while next_composition(&mut c) {
            assert_eq!(c.iter().sum::<u32>(), 4);
            count += 1;
        }
        assert_eq!(count, 15);
        assert_eq!(binomial(6, 2), Some(15));
        let mut single = vec![5];
        assert!(!next_composition(&mut single));
    }

    fn downward_poly() -> (Game<crate::Rational>, BeliefPolytope<crate::Rational>) {
        let g = fixtures::iterated();
        let p = Anchor::dirac(&g, "D", "r").unwrap();
        let mut s = StepSurvivors::full(&g, 2);
        s.sets[1][1] = g.set_of(Player::Two, &["c"]).unwrap();
        let poly = build_restriction_polytope(
            &g,
            &RestrictionModel::Downward,
            &p,
            TypeIndex::new(Player::One, 2),
            &s,
        )
        .unwrap();
        (g, poly)
    }

    #[test]
    fn finds_downward_member() {
        let (g, poly) = downward_poly();
        let opts = OracleOptions {
            bound: 12,
            ..Default::default()
        };
        let v = oracle_grid_sample(&g, Player::One, 1, &poly, &opts).unwrap();
        assert!(v.found());
    }

    #[test]
    fn misses_downward_non_member() {
        let (g, poly) = downward_poly();
        let v = oracle_grid_sample(&g, Player::One, 0, &poly, &OracleOptions::default()).unwrap();
        assert!(matches!(v, OracleVerdict::NotFound { points } if points == 61));
    }

    #[test]
    fn single_point_polytope() {
        let g = fixtures::iterated();
        let p = Anchor::dirac(&g, "D", "r").unwrap();
        let s = StepSurvivors::full(&g, 1);
        let poly = build_restriction_polytope(
            &g,
            &RestrictionModel::LevelK,
            &p,
            TypeIndex::new(Player::One, 1),
            &s,
        )
        .unwrap();
        let opts = OracleOptions::default();
        assert!(oracle_grid_sample(&g, Player::One, 2, &poly, &opts)
            .unwrap()
            .found());
        assert_eq!(
            oracle_grid_sample(&g, Player::One, 0, &poly, &opts).unwrap(),
            OracleVerdict::NotFound { points: 1 }
        );
    }

    #[test]
    fn rejects_zero_bound() {
        let (g, poly) = downward_poly();
        let opts = OracleOptions {
            bound: 0,
            ..Default::default()
        };
        assert!(oracle_grid_sample(&g, Player::One, 0, &poly, &opts).is_err());
    }
}
