//! File formats and result rendering.
//!
//! Game files:
//!
//! ```toml
//! players = ["Row", "Column"]
//! actions = [["U", "M", "D"], ["l", "c", "r"]]
//! # payoffsI[own action][opponent action]; integers or "a/b" strings
//! payoffs1 = [[3, 2, 1], [2, 3, 2], [1, 1, 3]]
//! payoffs2 = [[2, 2, 1], [1, 1, 2], [0, 0, 0]]
//! ```
//!
//! Scenario files:
//!
//! ```toml
//! model = "ch"          # downward | levelk | ch
//! k_max = 4
//! n_max = 4             # defaults to k_max
//!
//! [anchor]
//! player1 = { D = 1 }   # unlisted actions get weight 0
//! player2 = { r = 1 }
//!
//! [levels]              # required for ch
//! kind = "geometric"    # geometric | lexicographic | weights
//! param = "1/2"         # weights take `weights = [...]` instead
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use serde::Deserialize;
use serde_json::{json, Value};
use toml::Spanned;

use crate::error::{Error, ParseErrorKind, Result};
use crate::model::{
    ActionSet, Anchor, Game, LevelDistribution, LiftedConjecture, Player, RestrictionModel,
    SolutionGrid,
};
use crate::scalar::{parse_literal, Scalar};

#[derive(Deserialize, Clone, Debug)]
#[serde(untagged)]
enum Literal {
    Int(i64),
    Text(String),
    Float(f64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    players: Option<Spanned<Vec<String>>>,
    actions: Spanned<Vec<Vec<Spanned<String>>>>,
    payoffs1: Spanned<Vec<Spanned<Vec<Spanned<Literal>>>>>,
    payoffs2: Spanned<Vec<Spanned<Vec<Spanned<Literal>>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnchor {
    player1: Spanned<BTreeMap<String, Spanned<Literal>>>,
    player2: Spanned<BTreeMap<String, Spanned<Literal>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevels {
    kind: Spanned<String>,
    param: Option<Spanned<Literal>>,
    weights: Option<Vec<Spanned<Literal>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    model: Spanned<String>,
    k_max: Spanned<i64>,
    n_max: Option<Spanned<i64>>,
    anchor: Spanned<RawAnchor>,
    levels: Option<Spanned<RawLevels>>,
}

/// Builds positioned diagnostics for one source text.
struct Source<'a> {
    name: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn position(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn error(&self, span: Range<usize>, kind: ParseErrorKind, message: impl Into<String>) -> Error {
        let (line, column) = self.position(span.start);
        Error::Parse {
            file: self.name.to_string(),
            line,
            column,
            kind,
            message: message.into(),
        }
    }

    fn syntax(&self, e: toml::de::Error) -> Error {
        let span = e.span().unwrap_or(0..0);
        self.error(span, ParseErrorKind::Syntax, e.message().trim().to_string())
    }

    fn literal<T: Scalar>(&self, lit: &Spanned<Literal>) -> Result<T> {
        let span = lit.span();
        match lit.get_ref() {
            Literal::Int(i) => Ok(T::int(*i)),
            Literal::Text(s) => parse_literal(s).ok_or_else(|| {
                self.error(
                    span,
                    ParseErrorKind::InvalidRational,
                    format!("{s:?} is not an integer or a/b fraction"),
                )
            }),
            Literal::Float(f) => Err(self.error(
                span,
                ParseErrorKind::InvalidRational,
                format!("decimal {f} is not exact; write it as a fraction string such as \"1/2\""),
            )),
        }
    }
}

pub fn parse_game<T: Scalar>(text: &str) -> Result<Game<T>> {
    parse_game_named("<game>", text)
}

/// Parses a game file; `name` labels diagnostics.
pub fn parse_game_named<T: Scalar>(name: &str, text: &str) -> Result<Game<T>> {
    let src = Source { name, text };
    let raw: RawGame = toml::from_str(text).map_err(|e| src.syntax(e))?;

    let players = match &raw.players {
        None => ["P1".to_string(), "P2".to_string()],
        Some(p) => {
            let v = p.get_ref();
            if v.len() != 2 {
                return Err(src.error(
                    p.span(),
                    ParseErrorKind::ShapeMismatch,
                    "exactly two player names expected",
                ));
            }
            [v[0].clone(), v[1].clone()]
        }
    };
    let actions = raw.actions.get_ref();
    if actions.len() != 2 {
        return Err(src.error(
            raw.actions.span(),
            ParseErrorKind::ShapeMismatch,
            "exactly two action lists expected",
        ));
    }
    for list in actions {
        if list.is_empty() {
            return Err(src.error(
                raw.actions.span(),
                ParseErrorKind::ShapeMismatch,
                "every player needs an action",
            ));
        }
        for (i, label) in list.iter().enumerate() {
            if list[..i].iter().any(|l| l.get_ref() == label.get_ref()) {
                return Err(src.error(
                    label.span(),
                    ParseErrorKind::DuplicateLabel,
                    format!("action {:?} declared twice", label.get_ref()),
                ));
            }
        }
    }
    let labels: [Vec<String>; 2] =
        [0, 1].map(|i| actions[i].iter().map(|s| s.get_ref().clone()).collect());
    let sizes = [labels[0].len(), labels[1].len()];

    let mut payoffs: [Vec<Vec<T>>; 2] = [Vec::new(), Vec::new()];
    for (i, matrix) in [&raw.payoffs1, &raw.payoffs2].into_iter().enumerate() {
        let (own, opp) = (sizes[i], sizes[1 - i]);
        if matrix.get_ref().len() != own {
            return Err(src.error(
                matrix.span(),
                ParseErrorKind::ShapeMismatch,
                format!(
                    "payoffs{} needs {own} rows (one per own action), found {}",
                    i + 1,
                    matrix.get_ref().len()
                ),
            ));
        }
        for row in matrix.get_ref() {
            if row.get_ref().len() != opp {
                return Err(src.error(
                    row.span(),
                    ParseErrorKind::ShapeMismatch,
                    format!(
                        "payoffs{} rows need {opp} entries (one per opponent action), found {}",
                        i + 1,
                        row.get_ref().len()
                    ),
                ));
            }
            let parsed = row
                .get_ref()
                .iter()
                .map(|v| src.literal(v))
                .collect::<Result<Vec<T>>>()?;
            payoffs[i].push(parsed);
        }
    }
    Game::new(players, labels, payoffs)
}

/// Canonical text form: integers stay bare, other values become `"a/b"`.
pub fn serialize_game<T: Scalar>(game: &Game<T>) -> String {
    let quote = |s: &str| serde_json::to_string(s).expect("string serializes");
    let list = |items: &[String]| {
        items
            .iter()
            .map(|s| quote(s))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut out = String::new();
    let names = [
        game.player_name(Player::One).to_string(),
        game.player_name(Player::Two).to_string(),
    ];
    writeln!(out, "players = [{}]", list(&names)).unwrap();
    writeln!(
        out,
        "actions = [[{}], [{}]]",
        list(game.actions(Player::One)),
        list(game.actions(Player::Two))
    )
    .unwrap();
    for p in Player::BOTH {
        let rows: Vec<String> = game
            .payoff_matrix(p)
            .iter()
            .map(|row| {
                let cells: Vec<String> = row.iter().map(literal_text).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        writeln!(out, "payoffs{} = [{}]", p.index() + 1, rows.join(", ")).unwrap();
    }
    out
}

fn literal_text<T: Scalar>(v: &T) -> String {
    let s = v.to_string();
    if s.contains('/') {
        format!("\"{s}\"")
    } else {
        s
    }
}

/// A validated scenario file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario<T> {
    pub model: RestrictionModel<T>,
    pub anchor: Anchor<T>,
    pub levels: Option<LevelDistribution<T>>,
    pub k_max: usize,
    pub n_max: usize,
}

pub fn parse_scenario<T: Scalar, G>(text: &str, game: &Game<G>) -> Result<Scenario<T>> {
    parse_scenario_named("<scenario>", text, game)
}

pub fn parse_scenario_named<T: Scalar, G>(
    name: &str,
    text: &str,
    game: &Game<G>,
) -> Result<Scenario<T>> {
    let src = Source { name, text };
    let raw: RawScenario = toml::from_str(text).map_err(|e| src.syntax(e))?;
    let anchor = anchor_from_raw(&src, raw.anchor.get_ref(), raw.anchor.span(), game)?;
    let levels = match &raw.levels {
        None => None,
        Some(l) => Some(levels_from_raw(&src, l.get_ref(), l.span())?),
    };
    let positive = |v: &Spanned<i64>, what: &str| -> Result<usize> {
        usize::try_from(*v.get_ref())
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| {
                src.error(
                    v.span(),
                    ParseErrorKind::Model,
                    format!("{what} must be a positive integer"),
                )
            })
    };
    let k_max = positive(&raw.k_max, "k_max")?;
    let n_max = match &raw.n_max {
        Some(n) => positive(n, "n_max")?,
        None => k_max,
    };
    let model = match raw.model.get_ref().as_str() {
        "downward" => RestrictionModel::Downward,
        "levelk" | "level-k" => RestrictionModel::LevelK,
        "ch" | "cognitive-hierarchy" => {
            let dist = levels.clone().ok_or_else(|| {
                src.error(
                    raw.model.span(),
                    ParseErrorKind::Model,
                    "model ch needs a [levels] table",
                )
            })?;
            if !dist.supports(k_max) {
                return Err(src.error(
                    raw.levels.as_ref().map_or(0..0, |l| l.span()),
                    ParseErrorKind::Distribution,
                    format!("level weights must cover levels 0..{k_max}"),
                ));
            }
            RestrictionModel::CognitiveHierarchy(dist)
        }
        other => {
            return Err(src.error(
                raw.model.span(),
                ParseErrorKind::Model,
                format!("unknown model {other:?}; expected downward, levelk or ch"),
            ))
        }
    };
    Ok(Scenario {
        model,
        anchor,
        levels,
        k_max,
        n_max,
    })
}

/// Parses a standalone anchor file with `player1`/`player2` tables.
pub fn parse_anchor<T: Scalar, G>(name: &str, text: &str, game: &Game<G>) -> Result<Anchor<T>> {
    let src = Source { name, text };
    let raw: RawAnchor = toml::from_str(text).map_err(|e| src.syntax(e))?;
    anchor_from_raw(&src, &raw, 0..text.len(), game)
}

fn anchor_from_raw<T: Scalar, G>(
    src: &Source,
    raw: &RawAnchor,
    span: Range<usize>,
    game: &Game<G>,
) -> Result<Anchor<T>> {
    let mut parts: [Vec<T>; 2] = [Vec::new(), Vec::new()];
    for (p, table) in [(Player::One, &raw.player1), (Player::Two, &raw.player2)] {
        let mut w = vec![T::zero(); game.num_actions(p)];
        for (label, value) in table.get_ref() {
            let a = game.action_index(p, label).ok_or_else(|| {
                src.error(
                    table.span(),
                    ParseErrorKind::UnknownLabel,
                    format!("{p} has no action {label:?}"),
                )
            })?;
            let v: T = src.literal(value)?;
            if v.is_negative() {
                return Err(src.error(
                    value.span(),
                    ParseErrorKind::Distribution,
                    "anchor weights must be non-negative",
                ));
            }
            w[a] = v;
        }
        let total = crate::scalar::sum(&w);
        if !total.is_one() {
            return Err(src.error(
                table.span(),
                ParseErrorKind::Distribution,
                format!("anchor of {p} sums to {total}, not 1"),
            ));
        }
        parts[p.index()] = w;
    }
    let [p1, p2] = parts;
    Anchor::new(game, p1, p2)
        .map_err(|e| src.error(span, ParseErrorKind::Distribution, e.to_string()))
}

fn levels_from_raw<T: Scalar>(
    src: &Source,
    raw: &RawLevels,
    span: Range<usize>,
) -> Result<LevelDistribution<T>> {
    let dist_err = |e: Error, span: Range<usize>| match e {
        Error::InvalidInput(m) => src.error(span, ParseErrorKind::Distribution, m),
        other => other,
    };
    let param = |name: &str| -> Result<(T, Range<usize>)> {
        let p = raw.param.as_ref().ok_or_else(|| {
            src.error(
                span.clone(),
                ParseErrorKind::Distribution,
                format!("{name} distribution needs `param`"),
            )
        })?;
        Ok((src.literal(p)?, p.span()))
    };
    match raw.kind.get_ref().as_str() {
        "geometric" => {
            let (q, s) = param("geometric")?;
            LevelDistribution::geometric(q).map_err(|e| dist_err(e, s))
        }
        "lexicographic" => {
            let (e, s) = param("lexicographic")?;
            LevelDistribution::lexicographic(e).map_err(|err| dist_err(err, s))
        }
        "weights" => {
            let list = raw.weights.as_ref().ok_or_else(|| {
                src.error(span.clone(), ParseErrorKind::Distribution, "weights distribution needs `weights = [...]`")
            })?;
            let values = list.iter().map(|v| src.literal(v)).collect::<Result<Vec<T>>>()?;
            LevelDistribution::weights(values).map_err(|e| dist_err(e, span.clone()))
        }
        other => Err(src.error(
            raw.kind.span(),
            ParseErrorKind::Distribution,
            format!("unknown level distribution {other:?}; expected geometric, lexicographic or weights"),
        )),
    }
}

/// Parses `geometric:1/2`, `lexicographic:1/5` or `weights:1,1/2,1/4`.
pub fn parse_levels_spec<T: Scalar>(spec: &str) -> Result<LevelDistribution<T>> {
    let bad = |m: String| Error::InvalidInput(m);
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("level spec {spec:?} must look like kind:value")))?;
    let lit = |s: &str| {
        parse_literal::<T>(s).ok_or_else(|| bad(format!("{s:?} is not an exact rational")))
    };
    match kind.trim() {
        "geometric" => LevelDistribution::geometric(lit(rest)?),
        "lexicographic" => LevelDistribution::lexicographic(lit(rest)?),
        "weights" => LevelDistribution::weights(rest.split(',').map(lit).collect::<Result<_>>()?),
        other => Err(bad(format!("unknown level distribution {other:?}"))),
    }
}

pub fn parse_model_name<T>(
    name: &str,
    levels: Option<LevelDistribution<T>>,
) -> Result<RestrictionModel<T>> {
    match name {
        "downward" => Ok(RestrictionModel::Downward),
        "levelk" | "level-k" => Ok(RestrictionModel::LevelK),
        "ch" => levels
            .map(RestrictionModel::CognitiveHierarchy)
            .ok_or_else(|| Error::InvalidInput("model ch needs a level distribution".into())),
        other => Err(Error::InvalidInput(format!("unknown model {other:?}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidInput(format!("unknown format {other:?}"))),
        }
    }
}

/// A command result: a table for people and a self-describing JSON value.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultDocument {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
    pub data: Value,
}

impl ResultDocument {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Markdown => self.markdown(),
            Format::Csv => self.csv(),
            Format::Json => {
                serde_json::to_string_pretty(&self.data).expect("json value serializes") + "\n"
            }
        }
    }

    pub fn markdown(&self) -> String {
        let mut out = format!("## {}\n\n", self.title);
        let esc = |s: &str| s.replace('|', "\\|");
        let line = |cells: &[String]| {
            format!(
                "| {} |\n",
                cells.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | ")
            )
        };
        out += &line(&self.header);
        out += &format!("|{}\n", "---|".repeat(self.header.len()));
        for row in &self.rows {
            out += &line(row);
        }
        for n in &self.notes {
            out += &format!("\n{n}\n");
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn set_json<T>(game: &Game<T>, set: &ActionSet) -> Value {
    json!(set.names(game))
}

fn weights_json<T: Scalar>(labels: &[String], weights: &[T]) -> Value {
    let mut m = serde_json::Map::new();
    for (l, w) in labels.iter().zip(weights) {
        if !w.is_zero() {
            m.insert(l.clone(), json!(w.to_string()));
        }
    }
    Value::Object(m)
}

pub fn anchor_json<T: Scalar, G>(game: &Game<G>, anchor: &Anchor<T>) -> Value {
    json!({
        "player1": weights_json(game.actions(Player::One), anchor.of(Player::One)),
        "player2": weights_json(game.actions(Player::Two), anchor.of(Player::Two)),
    })
}

pub fn levels_json<T: Scalar>(dist: &LevelDistribution<T>) -> Value {
    match dist {
        LevelDistribution::Geometric(q) => json!({"kind": "geometric", "param": q.to_string()}),
        LevelDistribution::Lexicographic(e) => {
            json!({"kind": "lexicographic", "param": e.to_string()})
        }
        LevelDistribution::Weights(w) => {
            json!({"kind": "weights", "weights": w.iter().map(|x| x.to_string()).collect::<Vec<_>>()})
        }
    }
}

pub fn model_json<T: Scalar>(model: &RestrictionModel<T>) -> Value {
    match model {
        RestrictionModel::CognitiveHierarchy(d) => json!({"name": "ch", "levels": levels_json(d)}),
        other => json!({"name": other.name()}),
    }
}

pub fn game_json<T: Scalar>(game: &Game<T>) -> Value {
    let matrix = |p: Player| -> Vec<Vec<String>> {
        game.payoff_matrix(p)
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect()
    };
    json!({
        "players": [game.player_name(Player::One), game.player_name(Player::Two)],
        "actions": [game.actions(Player::One), game.actions(Player::Two)],
        "payoffs1": matrix(Player::One),
        "payoffs2": matrix(Player::Two),
    })
}

pub fn lifted_json<T: Scalar, G>(game: &Game<G>, mu: &LiftedConjecture<T>) -> Value {
    let opp = mu.holder.opponent();
    json!(mu
        .entries
        .iter()
        .map(|(t, a, w)| json!({"level": t, "action": game.action_name(opp, *a), "weight": w.to_string()}))
        .collect::<Vec<_>>())
}

/// Rows `k`, columns `n`, cells `"P1-set , P2-set"`, plus every cell
/// and witness in the JSON form.
pub fn grid_document<T: Scalar>(game: &Game<T>, grid: &SolutionGrid<T>) -> ResultDocument {
    let mut header = vec!["k \\ n".to_string()];
    header.extend((1..=grid.n_max).map(|n| n.to_string()));
    let rows = (1..=grid.k_max)
        .map(|k| {
            let mut row = vec![k.to_string()];
            row.extend((1..=grid.n_max).map(|n| {
                format!(
                    "{} , {}",
                    grid.cell(Player::One, k, n).display(game),
                    grid.cell(Player::Two, k, n).display(game)
                )
            }));
            row
        })
        .collect();
    let cells: Vec<Value> = Player::BOTH
        .iter()
        .flat_map(|&p| {
            (0..=grid.k_max).flat_map(move |k| {
                (0..=grid.n_max).map(move |n| json!({"player": p.index() + 1, "k": k, "n": n, "actions": set_json(game, &grid.cell(p, k, n))}))
            })
        })
        .collect();
    let witnesses: Vec<Value> = grid
        .witnesses
        .iter()
        .map(|(m, mu)| {
            json!({
                "player": m.player.index() + 1,
                "k": m.k,
                "n": m.n,
                "action": game.action_name(m.player, m.action),
                "conjecture": lifted_json(game, mu),
            })
        })
        .collect();
    ResultDocument {
        title: format!("{} rationalizability", grid.model.name()),
        header,
        rows,
        notes: vec![],
        data: json!({
            "kind": "delta-grid",
            "game": game_json(game),
            "model": model_json(&grid.model),
            "anchor": anchor_json(game, &grid.anchor),
            "k_max": grid.k_max,
            "n_max": grid.n_max,
            "cells": cells,
            "witnesses": witnesses,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, ratio};
    use crate::Rational;

    const ITERATED: &str = r#"
players = ["Row", "Column"]
actions = [["U", "M", "D"], ["l", "c", "r"]]
payoffs1 = [[3, 2, 1], [2, 3, 2], [1, 1, 3]]
payoffs2 = [[2, 2, 1], [1, 1, 2], [0, 0, 0]]
"#;

    #[test]
    fn parses_iterated() {
        let g: Game<Rational> = parse_game(ITERATED).unwrap();
        assert_eq!(g.payoff(Player::One, 0, 0), &ratio(3, 1));
        assert_eq!(g.payoff(Player::Two, 0, 0), &ratio(2, 1));
        assert_eq!(
            g.payoff_matrix(Player::One),
            fixtures::iterated().payoff_matrix(Player::One)
        );
        assert_eq!(
            g.payoff_matrix(Player::Two),
            fixtures::iterated().payoff_matrix(Player::Two)
        );
    }

    #[test]
    fn round_trip_normalizes() {
        let text = ITERATED.replace("[3, 2, 1]", "[\"6/2\", \"4/2\", \"1/3\"]");
        let g: Game<Rational> = parse_game(&text).unwrap();
        let out = serialize_game(&g);
        assert!(out.contains("[3, 2, \"1/3\"]"));
        let again: Game<Rational> = parse_game(&out).unwrap();
        assert_eq!(again, g);
        assert_eq!(serialize_game(&again), out);
    }

    fn parse_kind(text: &str) -> (ParseErrorKind, usize, usize) {
        match parse_game::<Rational>(text) {
            Err(Error::Parse {
                kind, line, column, ..
            }) => (kind, line, column),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics() {
        let (k, line, col) = parse_kind(&ITERATED.replace("[1, 1, 3]", "[1, \"1/0\", 3]"));
        assert_eq!(k, ParseErrorKind::InvalidRational);
        assert_eq!(line, 4);
        assert_eq!(col, 39);
        assert_eq!(
            parse_kind(&ITERATED.replace("[1, 1, 3]", "[1, 1]")).0,
            ParseErrorKind::ShapeMismatch
        );
        assert_eq!(
            parse_kind(&ITERATED.replace("\"M\"", "\"U\"")).0,
            ParseErrorKind::DuplicateLabel
        );
        assert_eq!(
            parse_kind(&ITERATED.replace("[1, 1, 3]", "[1, 1.5, 3]")).0,
            ParseErrorKind::InvalidRational
        );
        assert_eq!(parse_kind("actions = [").0, ParseErrorKind::Syntax);
    }

    const SCENARIO: &str = r#"
model = "downward"
k_max = 4
n_max = 4

[anchor]
player1 = { D = 1 }
player2 = { r = "1" }
"#;

    #[test]
    fn scenario_parses() {
        let g = fixtures::iterated();
        let s: Scenario<Rational> = parse_scenario(SCENARIO, &g).unwrap();
        assert_eq!(s.model, RestrictionModel::Downward);
        assert_eq!(s.anchor, Anchor::dirac(&g, "D", "r").unwrap());
        assert_eq!((s.k_max, s.n_max), (4, 4));
    }

    #[test]
    fn scenario_errors() {
        let g = fixtures::iterated();
        let kind = |text: &str| match parse_scenario::<Rational, _>(text, &g) {
            Err(Error::Parse { kind, .. }) => kind,
            other => panic!("expected parse error, got {other:?}"),
        };
        let half_third = SCENARIO.replace("{ D = 1 }", "{ U = \"1/2\", M = \"1/3\" }");
        assert_eq!(kind(&half_third), ParseErrorKind::Distribution);
        assert_eq!(
            kind(&SCENARIO.replace("\"downward\"", "\"ch\"")),
            ParseErrorKind::Model
        );
        let lex = SCENARIO.replace("\"downward\"", "\"ch\"")
            + "\n[levels]\nkind = \"lexicographic\"\nparam = \"1/2\"\n";
        assert_eq!(kind(&lex), ParseErrorKind::Distribution);
        assert_eq!(
            kind(&SCENARIO.replace("{ D = 1 }", "{ X = 1 }")),
            ParseErrorKind::UnknownLabel
        );
        let geo = SCENARIO.replace("\"downward\"", "\"ch\"")
            + "\n[levels]\nkind = \"geometric\"\nparam = \"1/2\"\n";
        let s: Scenario<Rational> = parse_scenario(&geo, &g).unwrap();
        assert!(matches!(
            s.model,
            RestrictionModel::CognitiveHierarchy(LevelDistribution::Geometric(_))
        ));
    }

    #[test]
    fn level_specs() {
        let d: LevelDistribution<Rational> = parse_levels_spec("weights:1,1/2").unwrap();
        assert_eq!(
            d,
            LevelDistribution::Weights(vec![ratio(1, 1), ratio(1, 2)])
        );
        assert!(parse_levels_spec::<Rational>("geometric:3/2").is_err());
        assert!(parse_levels_spec::<Rational>("poisson:1").is_err());
    }

    #[test]
    fn grid_rendering() {
        let g = fixtures::iterated();
        let p = Anchor::dirac(&g, "D", "r").unwrap();
        let grid = crate::lifted::delta_grid(&g, &RestrictionModel::Downward, &p, 2, 2).unwrap();
        let doc = grid_document(&g, &grid);
        let md = doc.render(Format::Markdown);
        assert!(
            md.contains("| 2 | {U, M, D} , {l, c} | {M, D} , {c} |"),
            "{md}"
        );
        let csv = doc.render(Format::Csv);
        assert!(
            csv.lines().nth(1).unwrap().starts_with("1,\"{D} , {c}\""),
            "{csv}"
        );
        let v: Value = serde_json::from_str(&doc.render(Format::Json)).unwrap();
        assert_eq!(v["kind"], "delta-grid");
        assert_eq!(v["anchor"]["player1"]["D"], "1");
        assert_eq!(
            doc.render(Format::Json),
            grid_document(&g, &grid).render(Format::Json)
        );
    }
}
