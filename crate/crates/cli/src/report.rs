//! Turns solver results into renderable documents.

use levelk::complete::{CHTrace, EliminationTrace, LevelTrace};
use levelk::io::{anchor_json, game_json, levels_json, model_json, ResultDocument};
use levelk::lp::{Ebrs, Witness};
use levelk::oracle::OracleReport;
use levelk::robust::{Genericity, RobustLevelK, RobustnessReport, Status};
use levelk::{ActionSet, Conjecture, Game, Player, Rational, SolutionGrid};
use num_traits::Zero;
use serde_json::{json, Value};
use std::collections::BTreeSet;

fn both(game: &Game, a: ActionSet, b: ActionSet) -> [String; 2] {
    [a.display(game), b.display(game)]
}

fn conj_text(game: &Game, c: &Conjecture) -> String {
    let opp = c.holder.opponent();
    let parts: Vec<String> = c
        .weights
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(b, w)| format!("{w}·{}", game.action_name(opp, b)))
        .collect();
    parts.join(" + ")
}

fn conj_json(game: &Game, c: &Conjecture) -> Value {
    let opp = c.holder.opponent();
    let mut m = serde_json::Map::new();
    for (b, w) in c.weights.iter().enumerate() {
        m.insert(game.action_name(opp, b).to_string(), json!(w.to_string()));
    }
    Value::Object(m)
}

fn set_json(game: &Game, s: &ActionSet) -> Value {
    json!(s.names(game))
}

fn players_header(game: &Game, first: &str) -> Vec<String> {
    vec![
        first.into(),
        game.player_name(Player::One).into(),
        game.player_name(Player::Two).into(),
    ]
}

pub fn elimination(game: &Game, trace: &EliminationTrace<Rational>) -> ResultDocument {
    let rows = (0..=trace.fixpoint)
        .map(|n| {
            let [a, b] = both(game, trace.at(Player::One, n), trace.at(Player::Two, n));
            vec![n.to_string(), a, b]
        })
        .collect();
    let eliminated: Vec<Value> = trace
        .eliminations
        .iter()
        .map(|((p, round, a), w)| {
            let weights = match w {
                Witness::MixedStrategy { weights, .. } => weights.iter().map(|x| x.to_string()).collect(),
                _ => Vec::new(),
            };
            json!({"player": p.index() + 1, "round": round, "action": game.action_name(*p, *a), "dominated_by": weights})
        })
        .collect();
    ResultDocument {
        title: "iterated strict dominance".into(),
        header: players_header(game, "n"),
        rows,
        notes: vec![format!("fixpoint reached at n = {}", trace.fixpoint)],
        data: json!({
            "kind": "rationalizability",
            "game": game_json(game),
            "fixpoint": trace.fixpoint,
            "rounds": (0..=trace.fixpoint).map(|n| json!({
                "n": n,
                "player1": set_json(game, &trace.at(Player::One, n)),
                "player2": set_json(game, &trace.at(Player::Two, n)),
            })).collect::<Vec<_>>(),
            "eliminations": eliminated,
        }),
    }
}

fn level_rows(game: &Game, levels: &[Vec<ActionSet>; 2]) -> (Vec<Vec<String>>, Vec<Value>) {
    let mut rows = Vec::new();
    let mut data = Vec::new();
    for k in 1..=levels[0].len() {
        let (a, b) = (levels[0][k - 1], levels[1][k - 1]);
        let [x, y] = both(game, a, b);
        rows.push(vec![k.to_string(), x, y]);
        data.push(json!({"k": k, "player1": set_json(game, &a), "player2": set_json(game, &b)}));
    }
    (rows, data)
}

pub fn level_k(game: &Game, trace: &LevelTrace<Rational>) -> ResultDocument {
    let (rows, levels) = level_rows(game, &trace.levels);
    ResultDocument {
        title: "classic level-k".into(),
        header: players_header(game, "k"),
        rows,
        notes: vec![],
        data: json!({"kind": "level-k", "game": game_json(game), "anchor": anchor_json(game, &trace.anchor), "levels": levels}),
    }
}

pub fn ch(game: &Game, trace: &CHTrace<Rational>) -> ResultDocument {
    let (rows, levels) = level_rows(game, &trace.levels);
    ResultDocument {
        title: "cognitive hierarchy".into(),
        header: players_header(game, "k"),
        rows,
        notes: vec![],
        data: json!({
            "kind": "ch",
            "game": game_json(game),
            "anchor": anchor_json(game, &trace.anchor),
            "levels_distribution": levels_json(&trace.distribution),
            "levels": levels,
        }),
    }
}

pub fn limits(game: &Game, grid: &SolutionGrid, limits: &[Vec<ActionSet>; 2]) -> ResultDocument {
    let trimmed = [limits[0][1..].to_vec(), limits[1][1..].to_vec()];
    let (rows, data) = level_rows(game, &trimmed);
    ResultDocument {
        title: format!("{} limits", grid.model.name()),
        header: players_header(game, "k"),
        rows,
        notes: vec![],
        data: json!({
            "kind": "limits",
            "game": game_json(game),
            "model": model_json(&grid.model),
            "anchor": anchor_json(game, &grid.anchor),
            "k_max": grid.k_max,
            "n_max": grid.n_max,
            "limits": data,
        }),
    }
}

pub fn consistent(
    game: &Game,
    grid: &SolutionGrid,
    per_n: &[(usize, [BTreeSet<usize>; 2])],
) -> ResultDocument {
    let fmt = |s: &BTreeSet<usize>| {
        let v: Vec<String> = s.iter().map(|k| k.to_string()).collect();
        format!("{{{}}}", v.join(", "))
    };
    let rows = per_n
        .iter()
        .map(|(n, s)| vec![n.to_string(), fmt(&s[0]), fmt(&s[1])])
        .collect();
    let data: Vec<Value> = per_n
        .iter()
        .map(|(n, s)| json!({"n": n, "player1": s[0], "player2": s[1]}))
        .collect();
    ResultDocument {
        title: "consistent types".into(),
        header: players_header(game, "n"),
        rows,
        notes: vec![],
        data: json!({
            "kind": "consistent-types",
            "game": game_json(game),
            "model": model_json(&grid.model),
            "anchor": anchor_json(game, &grid.anchor),
            "k_max": grid.k_max,
            "types": data,
        }),
    }
}

pub fn ebrs(game: &Game, sets: &[(Player, Vec<Ebrs<Rational>>)]) -> ResultDocument {
    let mut rows = Vec::new();
    let mut data = Vec::new();
    for (p, list) in sets {
        for e in list {
            rows.push(vec![
                game.player_name(*p).to_string(),
                e.set.display(game),
                conj_text(game, &e.witness),
            ]);
            data.push(json!({"player": p.index() + 1, "set": set_json(game, &e.set), "witness": conj_json(game, &e.witness)}));
        }
    }
    ResultDocument {
        title: "exact best-reply sets".into(),
        header: vec!["player".into(), "set".into(), "witness".into()],
        rows,
        notes: vec![],
        data: json!({"kind": "ebrs", "game": game_json(game), "sets": data}),
    }
}

pub fn robust_level_k(
    game: &Game,
    r: &RobustLevelK<Rational>,
    player: Player,
    regions: &[(ActionSet, Vec<Ebrs<Rational>>)],
) -> ResultDocument {
    let mut rows = Vec::new();
    let mut levels = Vec::new();
    for p in Player::BOTH {
        for (ti, union) in r.unions[p.index()].iter().enumerate() {
            let t = ti + 1;
            let members: Vec<String> = r
                .family
                .members(p, t)
                .iter()
                .map(|m| m.set.display(game))
                .collect();
            rows.push(vec![
                game.player_name(p).to_string(),
                t.to_string(),
                members.join(" "),
                union.display(game),
            ]);
            let anchors: Vec<Value> = (0..r.family.members(p, t).len())
                .map(|i| anchor_json(game, &r.family.anchor_for(game, p, t, i)))
                .collect();
            levels.push(json!({
                "player": p.index() + 1,
                "t": t,
                "members": r.family.members(p, t).iter().map(|m| set_json(game, &m.set)).collect::<Vec<_>>(),
                "anchors": anchors,
                "union": set_json(game, union),
            }));
        }
    }
    let notes = regions
        .iter()
        .map(|(b, inner)| {
            let sets: Vec<String> = inner.iter().map(|e| e.set.display(game)).collect();
            let union = inner
                .iter()
                .fold(ActionSet::empty(player), |acc, e| acc.union(&e.set));
            format!(
                "opponent region {}: level-2 sets {} (union {})",
                b.display(game),
                sets.join(", "),
                union.display(game)
            )
        })
        .collect();
    ResultDocument {
        title: "robust level-k".into(),
        header: vec![
            "player".into(),
            "t".into(),
            "achievable sets".into(),
            "union".into(),
        ],
        rows,
        notes,
        data: json!({
            "kind": "robust-level-k",
            "game": game_json(game),
            "levels": levels,
            "region_player": player.index() + 1,
            "regions": regions.iter().map(|(b, inner)| json!({
                "opponent_set": set_json(game, b),
                "sets": inner.iter().map(|e| set_json(game, &e.set)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Verified => "verified",
        Status::Partial => "partial",
        Status::Counterexample => "counterexample",
    }
}

pub fn robustness(game: &Game, kind: &str, r: &RobustnessReport<Rational>) -> ResultDocument {
    let rows = r
        .evidence
        .iter()
        .map(|e| {
            vec![
                game.player_name(e.player).to_string(),
                game.action_name(e.player, e.action).to_string(),
                e.conjecture
                    .as_ref()
                    .map(|c| conj_text(game, c))
                    .unwrap_or_default(),
                e.epsilon
                    .as_ref()
                    .map(|x| x.to_string())
                    .unwrap_or_default(),
                if e.confirmed { "yes" } else { "no" }.to_string(),
            ]
        })
        .collect();
    let evidence: Vec<Value> = r
        .evidence
        .iter()
        .map(|e| {
            json!({
                "player": e.player.index() + 1,
                "action": game.action_name(e.player, e.action),
                "conjecture": e.conjecture.as_ref().map(|c| conj_json(game, c)),
                "anchor": e.anchor.as_ref().map(|a| anchor_json(game, a)),
                "levels": e.distribution.as_ref().map(levels_json),
                "epsilon": e.epsilon.as_ref().map(|x| x.to_string()),
                "confirmed": e.confirmed,
            })
        })
        .collect();
    let mut notes = vec![format!(
        "status: {}; target {} , {}; union {} , {}",
        status_text(r.status),
        r.target[0].display(game),
        r.target[1].display(game),
        r.union[0].display(game),
        r.union[1].display(game)
    )];
    notes.extend(r.notes.iter().cloned());
    ResultDocument {
        title: r.claim.clone(),
        header: vec![
            "player".into(),
            "action".into(),
            "conjecture".into(),
            "epsilon".into(),
            "confirmed".into(),
        ],
        rows,
        notes,
        data: json!({
            "kind": kind,
            "game": game_json(game),
            "claim": r.claim,
            "status": status_text(r.status),
            "target": r.target.iter().map(|s| set_json(game, s)).collect::<Vec<_>>(),
            "union": r.union.iter().map(|s| set_json(game, s)).collect::<Vec<_>>(),
            "union_of_rows": r.union_of_rows.map(|u| u.iter().map(|s| set_json(game, s)).collect::<Vec<_>>()),
            "evidence": evidence,
            "notes": r.notes,
        }),
    }
}

pub fn genericity(game: &Game, g: &Genericity<Rational>) -> ResultDocument {
    let mut rows = Vec::new();
    let mut data = Vec::new();
    for p in Player::BOTH {
        for (a, w) in &g.actions[p.index()] {
            let (conj, slack) = match w {
                Some(w) => (
                    conj_text(game, &w.conjecture),
                    w.slack
                        .as_ref()
                        .map_or("unbounded".to_string(), |s| s.to_string()),
                ),
                None => ("none".into(), String::new()),
            };
            rows.push(vec![
                game.player_name(p).into(),
                game.action_name(p, *a).into(),
                conj,
                slack,
            ]);
            data.push(json!({
                "player": p.index() + 1,
                "action": game.action_name(p, *a),
                "witness": w.as_ref().map(|w| conj_json(game, &w.conjecture)),
                "slack": w.as_ref().and_then(|w| w.slack.as_ref().map(|s| s.to_string())),
            }));
        }
    }
    let generic = g.is_generic();
    ResultDocument {
        title: "genericity".into(),
        header: vec![
            "player".into(),
            "action".into(),
            "strict witness".into(),
            "slack".into(),
        ],
        rows,
        notes: vec![if generic {
            "generic".into()
        } else {
            "not generic".into()
        }],
        data: json!({"kind": "genericity", "game": game_json(game), "generic": generic, "actions": data}),
    }
}

pub fn oracle(
    game: &Game,
    grid: &SolutionGrid,
    report: &OracleReport,
    bound: u32,
) -> ResultDocument {
    let member = |m: &levelk::CellMember| json!({"player": m.player.index() + 1, "k": m.k, "n": m.n, "action": game.action_name(m.player, m.action)});
    let verdict = if report.consistent() {
        "consistent"
    } else {
        "inconsistent"
    };
    let mut rows = vec![
        vec!["checked".into(), report.checked.to_string()],
        vec!["agreed".into(), report.agreed.to_string()],
        vec!["inconclusive".into(), report.inconclusive.len().to_string()],
        vec!["conflicts".into(), report.conflicts.len().to_string()],
    ];
    rows.push(vec!["verdict".into(), verdict.into()]);
    ResultDocument {
        title: format!("oracle check at bound {bound}"),
        header: vec!["item".into(), "value".into()],
        rows,
        notes: vec![verdict.into()],
        data: json!({
            "kind": "oracle-check",
            "game": game_json(game),
            "model": model_json(&grid.model),
            "anchor": anchor_json(game, &grid.anchor),
            "k_max": grid.k_max,
            "n_max": grid.n_max,
            "bound": bound,
            "verdict": verdict,
            "checked": report.checked,
            "agreed": report.agreed,
            "inconclusive": report.inconclusive.iter().map(member).collect::<Vec<_>>(),
            "conflicts": report.conflicts.iter().map(member).collect::<Vec<_>>(),
        }),
    }
}
