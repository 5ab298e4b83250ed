#![allow(dead_code)]

use levelk::complete::rationalizability;
use levelk::{ActionSet, Anchor, Game, Player, Rational, Scalar, SolutionGrid};
use rand::seq::SliceRandom;
use rand::Rng;

/// Action set from single-letter labels, e.g. `"MD"` or `"lc"`; `"*"` is the full set.
pub fn set(game: &Game, player: Player, letters: &str) -> ActionSet {
    if letters == "*" {
        return game.full_set(player);
    }
    let names: Vec<String> = letters.chars().map(|c| c.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    game.set_of(player, &refs).expect("known labels")
}

/// Expected grid as `rows[k - 1][n - 1] = "P1/P2"`, e.g. `"MD/c"`.
pub fn grid_mismatches(game: &Game, grid: &SolutionGrid, rows: &[[&str; 4]; 4]) -> Vec<String> {
    let mut out = Vec::new();
    for (ki, row) in rows.iter().enumerate() {
        for (ni, cell) in row.iter().enumerate() {
            let (k, n) = (ki + 1, ni + 1);
            let (a, b) = cell.split_once('/').expect("cell spec");
            let want = [set(game, Player::One, a), set(game, Player::Two, b)];
            for p in Player::BOTH {
                let got = grid.cell(p, k, n);
                if got != want[p.index()] {
                    out.push(format!(
                        "player {} cell ({k}, {n}): got {} want {}",
                        p.index() + 1,
                        got.display(game),
                        want[p.index()].display(game)
                    ));
                }
            }
        }
    }
    out
}

pub const DOWNWARD_DR: [[&str; 4]; 4] = [
    ["D/c", "D/c", "D/c", "D/c"],
    ["*/lc", "MD/c", "MD/c", "MD/c"],
    ["*/lc", "*/lc", "MD/lc", "MD/lc"],
    ["*/lc", "*/lc", "*/lc", "*/lc"],
];

pub const DOWNWARD_UL: [[&str; 4]; 4] = [
    ["U/l", "U/l", "U/l", "U/l"],
    ["*/lc", "U/l", "U/l", "U/l"],
    ["*/lc", "UM/lc", "U/l", "U/l"],
    ["*/lc", "UM/lc", "UM/l", "U/l"],
];

pub const LEVELK_DR: [[&str; 4]; 4] = [
    ["D/c", "D/c", "D/c", "D/c"],
    ["*/lc", "M/c", "M/c", "M/c"],
    ["*/lc", "UM/lc", "M/l", "M/l"],
    ["*/lc", "UM/lc", "UM/l", "U/l"],
];

pub const CH_GEOMETRIC_DR: [[&str; 4]; 4] = [
    ["D/c", "D/c", "D/c", "D/c"],
    ["MD/c", "MD/c", "MD/c", "MD/c"],
    ["MD/c", "M/c", "M/c", "M/c"],
    ["MD/lc", "M/c", "M/c", "M/c"],
];

/// Random game with `rows × cols` actions and integer payoffs in `[-9, 9]`.
pub fn random_game<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Game {
    let row_labels: Vec<String> = (0..rows).map(|i| format!("a{i}")).collect();
    let col_labels: Vec<String> = (0..cols).map(|j| format!("b{j}")).collect();
    let mut draw = |n: usize, m: usize| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| Rational::int(rng.gen_range(-9..=9)))
                    .collect()
            })
            .collect()
    };
    let p1 = draw(rows, cols);
    let p2 = draw(cols, rows);
    Game::new(
        ["P1".into(), "P2".into()],
        [row_labels, col_labels],
        [p1, p2],
    )
    .expect("valid game")
}

pub fn random_sized_game<R: Rng>(rng: &mut R) -> Game {
    let rows = rng.gen_range(2..=4);
    let cols = rng.gen_range(2..=4);
    random_game(rng, rows, cols)
}

/// Distribution over `n` actions with a common denominator in `1..=6`.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let d = rng.gen_range(1..=6i64);
    let mut counts = vec![0i64; n];
    for _ in 0..d {
        counts[rng.gen_range(0..n)] += 1;
    }
    counts.into_iter().map(|c| Rational::ratio(c, d)).collect()
}

/// Distribution over a given support, again with denominator at most 6.
pub fn random_distribution_on<R: Rng>(rng: &mut R, n: usize, support: &ActionSet) -> Vec<Rational> {
    let members: Vec<usize> = support.iter().collect();
    let d = rng.gen_range(1..=6i64);
    let mut counts = vec![0i64; n];
    for _ in 0..d {
        counts[*members.choose(rng).expect("nonempty support")] += 1;
    }
    counts.into_iter().map(|c| Rational::ratio(c, d)).collect()
}

pub fn random_anchor<R: Rng>(rng: &mut R, game: &Game) -> Anchor {
    let p1 = random_distribution(rng, game.num_actions(Player::One));
    let p2 = random_distribution(rng, game.num_actions(Player::Two));
    Anchor::new(game, p1, p2).expect("valid anchor")
}

/// Anchor supported on the rationalizable actions of both players.
pub fn rationalizable_anchor<R: Rng>(rng: &mut R, game: &Game) -> Anchor {
    let trace = rationalizability(game).expect("rationalizability");
    let p1 = random_distribution_on(
        rng,
        game.num_actions(Player::One),
        &trace.limit(Player::One),
    );
    let p2 = random_distribution_on(
        rng,
        game.num_actions(Player::Two),
        &trace.limit(Player::Two),
    );
    Anchor::new(game, p1, p2).expect("valid anchor")
}

/// Perturbs random games until iterated dominance ends in a single profile.
pub fn random_dominance_solvable<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Game {
    let mut game = random_game(rng, rows, cols);
    loop {
        let trace = rationalizability(&game).expect("rationalizability");
        if trace.limit(Player::One).len() == 1 && trace.limit(Player::Two).len() == 1 {
            return game;
        }
        // nudge one surviving payoff so that ties and cycles break
        let p = if rng.gen_bool(0.5) {
            Player::One
        } else {
            Player::Two
        };
        let own: Vec<usize> = trace.limit(p).iter().collect();
        let opp: Vec<usize> = trace.limit(p.opponent()).iter().collect();
        let a = *own.choose(rng).expect("nonempty");
        let b = *opp.choose(rng).expect("nonempty");
        let bump = Rational::int(rng.gen_range(1..=5));
        let mut payoffs = [
            game.payoff_matrix(Player::One).to_vec(),
            game.payoff_matrix(Player::Two).to_vec(),
        ];
        payoffs[p.index()][a][b] += bump;
        let labels = [
            game.actions(Player::One).to_vec(),
            game.actions(Player::Two).to_vec(),
        ];
        game = Game::new(["P1".into(), "P2".into()], labels, payoffs).expect("valid game");
    }
}
