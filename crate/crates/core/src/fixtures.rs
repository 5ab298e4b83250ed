//! The worked example games, built in code so tests and the CLI share one
//! definition. The same games ship as TOML files under `fixtures/`.

use crate::{Game, Rational};

/// 3×3 running example; dominance solvable to `(U, l)` in four rounds.
pub fn iterated() -> Game {
    Game::from_integers(
        &["U", "M", "D"],
        &["l", "c", "r"],
        &[
            &[(3, 2), (2, 1), (1, 0)],
            &[(2, 2), (3, 1), (2, 0)],
            &[(1, 1), (1, 2), (3, 0)],
        ],
    )
    .expect("valid fixture")
}

/// Every action rationalizable, yet `l` is never level-2 behavior.
pub fn robust_gap() -> Game {
    Game::from_integers(
        &["U", "M", "D"],
        &["l", "c", "r"],
        &[
            &[(6, 3), (0, 6), (0, 0)],
            &[(0, 3), (6, 0), (0, 6)],
            &[(4, 0), (4, 6), (4, 6)],
        ],
    )
    .expect("valid fixture")
}

/// Non-generic game: `r` is justified only by the ½U + ½M conjecture.
pub fn nongeneric() -> Game {
    Game::from_integers(
        &["U", "M", "D"],
        &["l", "c", "r"],
        &[
            &[(3, 2), (0, 0), (0, 1)],
            &[(0, 0), (3, 2), (0, 1)],
            &[(9, 2), (9, 2), (9, 0)],
        ],
    )
    .expect("valid fixture")
}

/// Matching pennies; the level-k sequence cycles under a pure anchor.
pub fn matching_pennies() -> Game {
    Game::from_integers(
        &["H", "T"],
        &["h", "t"],
        &[&[(1, -1), (-1, 1)], &[(-1, 1), (1, -1)]],
    )
    .expect("valid fixture")
}

/// Trivial game with one action per player.
pub fn singleton() -> Game {
    Game::from_integers(&["a"], &["b"], &[&[(0, 0)]]).expect("valid fixture")
}

pub fn ratio(n: i64, d: i64) -> Rational {
    use crate::Scalar;
    Rational::ratio(n, d)
}
