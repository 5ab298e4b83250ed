//! Robustness of the bounded-reasoning predictions across anchors and level
//! distributions.

use log::info;

use crate::complete::{justifiable_set, level_k};
use crate::error::{invalid, Error, Result};
use crate::lifted::{delta_grid, limit_sets};
use crate::lp::{ebrs_enumerate, ebrs_within, strict_best_reply_witness, Ebrs, EbrsOptions};
use crate::model::{
    best_reply_raw, truncate_levels, ActionSet, Anchor, Conjecture, Game, LevelDistribution,
    Player, RestrictionModel,
};
use crate::scalar::Scalar;

/// One achievable level-`t` behavior set and how it was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember<T> {
    pub set: ActionSet,
    /// For `t = 1` the conjecture (the opponent's anchor) making `set` the
    /// exact best-reply set.
    pub seed: Option<Conjecture<T>>,
    /// For `t ≥ 2` the index of the opponent's level-`(t−1)` member it answers.
    pub parent: Option<usize>,
}

/// `F_t` for both players and `t = 1..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EbrsFamily<T> {
    /// `levels[i][t − 1]` lists the members of `F_{t,i}`.
    pub levels: [Vec<Vec<FamilyMember<T>>>; 2],
}

impl<T: Scalar> EbrsFamily<T> {
    pub fn members(&self, player: Player, t: usize) -> &[FamilyMember<T>] {
        &self.levels[player.index()][t - 1]
    }

    /// `U_t`: every action some anchor makes level-`t` behavior.
    pub fn union(&self, player: Player, t: usize) -> ActionSet {
        self.members(player, t)
            .iter()
            .fold(ActionSet::empty(player), |acc, m| acc.union(&m.set))
    }

    /// An anchor under which classic level-`t` behavior of `player` is
    /// exactly member `idx` of `F_t`.
    pub fn anchor_for<G>(&self, game: &Game<G>, player: Player, t: usize, idx: usize) -> Anchor<T> {
        let (mut p, mut level, mut i) = (player, t, idx);
        while level > 1 {
            i = self.members(p, level)[i]
                .parent
                .expect("members above level 1 have a parent");
            p = p.opponent();
            level -= 1;
        }
        let seed = self.members(p, 1)[i]
            .seed
            .clone()
            .expect("level-1 members carry a seed");
        Anchor::uniform(game).with(p.opponent(), seed.weights)
    }
}

/// Union of classic level-`t` behavior over all anchors, for `t = 1..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RobustLevelK<T> {
    pub family: EbrsFamily<T>,
    /// `unions[i][t − 1] = U_t` of player `i`.
    pub unions: [Vec<ActionSet>; 2],
}

/// Propagates exact best-reply sets: `F₁ = EBRS`, `F_{t+1,i} = { J_i(S) : S ∈ F_{t,−i} }`.
pub fn robust_level_k<T: Scalar>(
    game: &Game<T>,
    k_max: usize,
    opts: &EbrsOptions,
) -> Result<RobustLevelK<T>> {
    if k_max == 0 {
        return Err(invalid("k_max must be at least 1"));
    }
    let mut levels: [Vec<Vec<FamilyMember<T>>>; 2] = [Vec::new(), Vec::new()];
    for p in Player::BOTH {
        let first = ebrs_enumerate(game, p, opts)?
            .into_iter()
            .map(|e| FamilyMember {
                set: e.set,
                seed: Some(e.witness),
                parent: None,
            })
            .collect();
        levels[p.index()].push(first);
    }
    for t in 1..k_max {
        for p in Player::BOTH {
            let mut next: Vec<FamilyMember<T>> = Vec::new();
            for (idx, source) in levels[p.opponent().index()][t - 1].iter().enumerate() {
                let set = justifiable_set(game, p, &source.set)?.set;
                if !next.iter().any(|m| m.set == set) {
                    next.push(FamilyMember {
                        set,
                        seed: None,
                        parent: Some(idx),
                    });
                }
            }
            next.sort_by_key(|m| m.set);
            levels[p.index()].push(next);
        }
    }
    let family = EbrsFamily { levels };
    let unions = Player::BOTH.map(|p| (1..=k_max).map(|t| family.union(p, t)).collect());
    Ok(RobustLevelK { family, unions })
}

/// For each opponent exact best-reply set `S`, the exact best-reply sets of
/// `player` over conjectures supported within `S` (level-2 behavior per
/// anchor region).
pub fn restricted_ebrs<T: Scalar>(
    game: &Game<T>,
    player: Player,
    opts: &EbrsOptions,
) -> Result<Vec<(ActionSet, Vec<Ebrs<T>>)>> {
    ebrs_enumerate(game, player.opponent(), opts)?
        .into_iter()
        .map(|e| ebrs_within(game, player, &e.set, opts).map(|inner| (e.set, inner)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    /// Some actions lacked a constructive witness; see the report entries.
    Partial,
    Counterexample,
}

/// Evidence for one action in a robustness claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionEvidence<T> {
    pub player: Player,
    pub action: usize,
    pub conjecture: Option<Conjecture<T>>,
    pub anchor: Option<Anchor<T>>,
    pub distribution: Option<LevelDistribution<T>>,
    pub epsilon: Option<T>,
    /// Whether the action was confirmed in the relevant cell.
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RobustnessReport<T> {
    pub claim: String,
    pub status: Status,
    /// `R¹` per player.
    pub target: [ActionSet; 2],
    /// Union of confirmed actions per player.
    pub union: [ActionSet; 2],
    /// Union over the tested anchors of every row's behavior, when the claim
    /// has that second form.
    pub union_of_rows: Option<[ActionSet; 2]>,
    pub evidence: Vec<ActionEvidence<T>>,
    pub notes: Vec<String>,
}

/// Checks that the union over anchors of downward-rationalizable behavior is
/// `R¹`, both as `⋃_p ⋂_k` and as `⋃_p ⋃_k`, over types `1..=k_max`.
pub fn robust_downward_check<T: Scalar>(
    game: &Game<T>,
    k_max: usize,
) -> Result<RobustnessReport<T>> {
    if k_max == 0 {
        return Err(invalid("k_max must be at least 1"));
    }
    let mut evidence = Vec::new();
    let mut target = [ActionSet::empty(Player::One), ActionSet::empty(Player::Two)];
    let mut inter_union = target;
    let mut union_union = target;
    let mut notes = Vec::new();
    for p in Player::BOTH {
        let r1 = justifiable_set(game, p, &game.full_set(p.opponent()))?;
        target[p.index()] = r1.set;
        for (&a, found) in &r1.witnesses {
            let nu = pure_justification(game, p, a).unwrap_or_else(|| found.clone());
            let anchor = Anchor::uniform(game).with(p.opponent(), nu.weights.clone());
            let grid = delta_grid(game, &RestrictionModel::Downward, &anchor, k_max, k_max)?;
            let limits = limit_sets(&grid)?;
            let in_all = (1..=k_max).all(|k| limits[p.index()][k].contains(a));
            if in_all {
                inter_union[p.index()].insert(a);
            }
            // every row of both players under this anchor counts towards ⋃⋃
            for q in Player::BOTH {
                for row in &limits[q.index()][1..=k_max] {
                    union_union[q.index()] = union_union[q.index()].union(row);
                }
            }
            evidence.push(ActionEvidence {
                player: p,
                action: a,
                conjecture: Some(nu),
                anchor: Some(anchor),
                distribution: None,
                epsilon: None,
                confirmed: in_all,
            });
        }
    }
    let both_equal = Player::BOTH.iter().all(|&p| {
        inter_union[p.index()] == target[p.index()] && union_union[p.index()] == target[p.index()]
    });
    if !both_equal {
        notes.push("union over anchors differs from the justifiable set".into());
    }
    info!(
        "robust downward check: {}",
        if both_equal {
            "verified"
        } else {
            "counterexample"
        }
    );
    Ok(RobustnessReport {
        claim: "union over anchors of downward-rationalizable behavior equals R¹".into(),
        status: if both_equal {
            Status::Verified
        } else {
            Status::Counterexample
        },
        target,
        union: inter_union,
        union_of_rows: Some(union_union),
        evidence,
        notes,
    })
}

/// A point-mass conjecture making `action` a best reply, if one exists.
fn pure_justification<T: Scalar>(
    game: &Game<T>,
    player: Player,
    action: usize,
) -> Option<Conjecture<T>> {
    (0..game.num_actions(player.opponent()))
        .map(|b| Conjecture::dirac(game, player, b))
        .find(|nu| best_reply_raw(game, player, &nu.weights).contains(action))
}

/// Strict witness for one justifiable action: a conjecture making it the
/// unique best reply and the margin achieved (`None` when unbounded).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictWitness<T> {
    pub conjecture: Conjecture<T>,
    pub slack: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Genericity<T> {
    /// `(action, strict witness)` for every justifiable action of each player.
    pub actions: [Vec<(usize, Option<StrictWitness<T>>)>; 2],
}

impl<T> Genericity<T> {
    pub fn is_generic(&self) -> bool {
        self.actions.iter().flatten().all(|(_, w)| w.is_some())
    }

    /// Justifiable actions that are never a unique best reply.
    pub fn lacking(&self, player: Player) -> ActionSet {
        ActionSet::from_indices(
            player,
            self.actions[player.index()]
                .iter()
                .filter(|(_, w)| w.is_none())
                .map(|(a, _)| *a),
        )
    }
}

pub fn genericity_check<T: Scalar>(game: &Game<T>) -> Result<Genericity<T>> {
    let mut actions: [Vec<(usize, Option<StrictWitness<T>>)>; 2] = [Vec::new(), Vec::new()];
    for p in Player::BOTH {
        let r1 = justifiable_set(game, p, &game.full_set(p.opponent()))?;
        for a in r1.set.iter() {
            let w = strict_best_reply_witness(game, p, a)?
                .map(|(conjecture, slack)| StrictWitness { conjecture, slack });
            actions[p.index()].push((a, w));
        }
    }
    Ok(Genericity { actions })
}

/// `ε = min(1/4, r / (2(1 + r)))` with `r = s / (2W)`, which gives
/// `ε / (1 − ε) < r`.
pub fn epsilon_for<T: Scalar>(slack: Option<&T>, range: &T) -> T {
    let quarter = T::ratio(1, 4);
    let Some(s) = slack else { return quarter };
    if range.is_zero() {
        return quarter;
    }
    let r = s.clone() / (T::int(2) * range.clone());
    let e = r.clone() / (T::int(2) * (T::one() + r));
    e.min(quarter)
}

/// A level-distribution/anchor probe for actions without a strict witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe<T> {
    pub anchor: Anchor<T>,
    pub distribution: LevelDistribution<T>,
}

/// Confirms every justifiable action in CH-rationalizability cell `(k, n)`
/// under an anchor and lexicographic distribution built from its strict
/// witness. Actions without one are checked at the supplied probes.
pub fn robust_ch_generic<T: Scalar>(
    game: &Game<T>,
    k: usize,
    n: usize,
    probes: &[Probe<T>],
) -> Result<RobustnessReport<T>> {
    if k == 0 || n == 0 {
        return Err(invalid("k and n must be at least 1"));
    }
    let gen = genericity_check(game)?;
    let mut evidence = Vec::new();
    let mut union = [ActionSet::empty(Player::One), ActionSet::empty(Player::Two)];
    let mut target = union;
    let mut notes = Vec::new();
    for p in Player::BOTH {
        let range = game.payoff_range(p);
        for (a, w) in &gen.actions[p.index()] {
            target[p.index()].insert(*a);
            let Some(w) = w else { continue };
            let eps = epsilon_for(w.slack.as_ref(), &range);
            verify_epsilon(&eps, w.slack.as_ref(), &range, k)?;
            let dist = LevelDistribution::lexicographic(eps.clone())?;
            let anchor = Anchor::uniform(game).with(p.opponent(), w.conjecture.weights.clone());
            let model = RestrictionModel::CognitiveHierarchy(dist.clone());
            let grid = delta_grid(game, &model, &anchor, k, n)?;
            let confirmed = grid.cell(p, k, n).contains(*a);
            if confirmed {
                union[p.index()].insert(*a);
                let key = crate::model::CellMember {
                    player: p,
                    k,
                    n,
                    action: *a,
                };
                let marginal = grid.witnesses[&key].action_marginal(game);
                let bound = eps.clone() / (T::one() - eps.clone());
                if marginal.total_variation(&w.conjecture) > bound {
                    return Err(Error::Verification(format!(
                        "witness marginal for {} drifts beyond ε/(1−ε)",
                        game.action_name(p, *a)
                    )));
                }
            }
            evidence.push(ActionEvidence {
                player: p,
                action: *a,
                conjecture: Some(w.conjecture.clone()),
                anchor: Some(anchor),
                distribution: Some(dist),
                epsilon: Some(eps),
                confirmed,
            });
        }
        for a in gen.lacking(p).iter() {
            notes.push(format!(
                "{} of {p} is never a unique best reply",
                game.action_name(p, a)
            ));
            let mut confirmed_at = None;
            for (pi, probe) in probes.iter().enumerate() {
                let model = RestrictionModel::CognitiveHierarchy(probe.distribution.clone());
                let grid = delta_grid(game, &model, &probe.anchor, k, n)?;
                if grid.cell(p, k, n).contains(a) {
                    confirmed_at = Some(pi);
                    break;
                }
            }
            if confirmed_at.is_some() {
                union[p.index()].insert(a);
            }
            evidence.push(ActionEvidence {
                player: p,
                action: a,
                conjecture: None,
                anchor: confirmed_at.map(|pi| probes[pi].anchor.clone()),
                distribution: confirmed_at.map(|pi| probes[pi].distribution.clone()),
                epsilon: None,
                confirmed: confirmed_at.is_some(),
            });
        }
    }
    let status = if union == target {
        Status::Verified
    } else if gen.is_generic() {
        Status::Counterexample
    } else {
        Status::Partial
    };
    Ok(RobustnessReport {
        claim: format!(
            "union over anchors and distributions of CH-rationalizable cell ({k}, {n}) equals R¹"
        ),
        status,
        target,
        union,
        union_of_rows: None,
        evidence,
        notes,
    })
}

/// The type-0 mass of every truncation is at least `f(0)`, so any feasible
/// marginal lies within `1 − f(0) = ε/(1−ε)` of the witness; this must stay
/// below `s / (2W)`.
fn verify_epsilon<T: Scalar>(eps: &T, slack: Option<&T>, range: &T, k: usize) -> Result<()> {
    let dist = LevelDistribution::lexicographic(eps.clone())?;
    let f0 = dist.weight(0).expect("level 0 weight");
    let drift = T::one() - f0.clone();
    if drift != eps.clone() / (T::one() - eps.clone()) {
        return Err(Error::Verification(
            "lexicographic level-0 weight mismatch".into(),
        ));
    }
    if truncate_levels(&dist, k)?[0] < f0 {
        return Err(Error::Verification(
            "truncation lowered the level-0 weight".into(),
        ));
    }
    if let Some(s) = slack {
        if !range.is_zero() && T::int(2) * drift * range.clone() >= s.clone() {
            return Err(Error::Verification(format!(
                "ε = {eps} violates the slack bound"
            )));
        }
    }
    Ok(())
}

/// Re-runs classic level-k at the reconstructed anchor of every family member
/// and confirms it yields exactly that set.
pub fn verify_family<T: Scalar>(game: &Game<T>, robust: &RobustLevelK<T>) -> Result<()> {
    for p in Player::BOTH {
        for (t, members) in robust.family.levels[p.index()].iter().enumerate() {
            for (idx, m) in members.iter().enumerate() {
                let anchor = robust.family.anchor_for(game, p, t + 1, idx);
                let trace = level_k(game, &anchor, t + 1)?;
                if trace.level(p, t + 1) != m.set {
                    return Err(Error::Verification(format!(
                        "level-{} member {} of {p} not reproduced by its anchor",
                        t + 1,
                        m.set.display(game)
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, ratio};

    #[test]
    fn robust_gap_level_two_union() {
        let g = fixtures::robust_gap();
        let r = robust_level_k(&g, 2, &EbrsOptions::default()).unwrap();
        assert_eq!(r.unions[1][1], g.set_of(Player::Two, &["c", "r"]).unwrap());
        assert_eq!(r.unions[0][1], g.full_set(Player::One));
        assert_eq!(r.unions[1][0], g.full_set(Player::Two));
        verify_family(&g, &r).unwrap();
    }

    #[test]
    fn robust_gap_regions() {
        let g = fixtures::robust_gap();
        let regions = restricted_ebrs(&g, Player::Two, &EbrsOptions::default()).unwrap();
        let show = |s: &ActionSet| s.display(&g);
        let mut listing: Vec<(String, Vec<String>)> = regions
            .iter()
            .map(|(b, inner)| {
                let mut v: Vec<String> = inner.iter().map(|e| show(&e.set)).collect();
                v.sort();
                (show(b), v)
            })
            .collect();
        listing.sort();
        let want: Vec<(String, Vec<String>)> = vec![
            ("{D}".into(), vec!["{c, r}".into()]),
            ("{M, D}".into(), vec!["{c, r}".into(), "{r}".into()]),
            ("{M}".into(), vec!["{r}".into()]),
            ("{U, D}".into(), vec!["{c, r}".into(), "{c}".into()]),
            ("{U}".into(), vec!["{c}".into()]),
        ];
        assert_eq!(listing, want);
    }

    #[test]
    fn downward_iterated() {
        let g = fixtures::iterated();
        let rep = robust_downward_check(&g, 4).unwrap();
        assert_eq!(rep.status, Status::Verified);
        assert_eq!(rep.union[1], g.set_of(Player::Two, &["l", "c"]).unwrap());
        assert_eq!(rep.union_of_rows, Some(rep.target));
        assert!(rep.evidence.iter().all(|e| e.confirmed));
    }

    #[test]
    fn genericity_examples() {
        let g = fixtures::nongeneric();
        let gen = genericity_check(&g).unwrap();
        assert!(!gen.is_generic());
        assert_eq!(
            gen.lacking(Player::Two),
            g.set_of(Player::Two, &["r"]).unwrap()
        );
        assert!(genericity_check(&fixtures::iterated())
            .unwrap()
            .is_generic());
        assert!(genericity_check(&fixtures::singleton())
            .unwrap()
            .is_generic());
    }

    #[test]
    fn epsilon_choice() {
        let e = epsilon_for(Some(&ratio(1, 1)), &ratio(3, 1));
        // r = 1/6, ε = (1/6)/(2·7/6) = 1/14
        assert_eq!(e, ratio(1, 14));
        assert_eq!(
            epsilon_for::<crate::Rational>(None, &ratio(3, 1)),
            ratio(1, 4)
        );
        verify_epsilon(&e, Some(&ratio(1, 1)), &ratio(3, 1), 5).unwrap();
        assert!(verify_epsilon(&ratio(1, 4), Some(&ratio(1, 1)), &ratio(3, 1), 5).is_err());
    }

    #[test]
    fn robust_ch_iterated() {
        let g = fixtures::iterated();
        let rep = robust_ch_generic(&g, 3, 3, &[]).unwrap();
        assert_eq!(rep.status, Status::Verified);
        assert_eq!(rep.union, rep.target);
    }

    #[test]
    fn robust_ch_dominant_player() {
        let g = fixtures::nongeneric();
        let rep = robust_ch_generic(&g, 2, 2, &[]).unwrap();
        assert_eq!(rep.union[0], g.set_of(Player::One, &["D"]).unwrap());
        assert_eq!(rep.status, Status::Partial);
    }
}
