//! Textbook games used as fixtures by tests, docs and the CLI.

use crate::game::NormalFormGame;

/// Matching pennies. Action 0 = Heads, 1 = Tails; player 0 wins on a match.
pub fn matching_pennies() -> NormalFormGame {
    NormalFormGame::bimatrix(2, 2, &[(1.0, -1.0), (-1.0, 1.0), (-1.0, 1.0), (1.0, -1.0)])
        .expect("static game")
}

/// Prisoner's dilemma. Action 0 = Cooperate, 1 = Defect.
pub fn prisoners_dilemma() -> NormalFormGame {
    NormalFormGame::bimatrix(2, 2, &[(3.0, 3.0), (0.0, 5.0), (5.0, 0.0), (1.0, 1.0)]).expect("static game")
}

/// Game of chicken. Action 0 = Dare, 1 = Chicken.
pub fn chicken() -> NormalFormGame {
    NormalFormGame::bimatrix(2, 2, &[(0.0, 0.0), (7.0, 2.0), (2.0, 7.0), (6.0, 6.0)]).expect("static game")
}

/// Pure coordination with diagonal payoffs `high` and `low`.
pub fn coordination(high: f64, low: f64) -> NormalFormGame {
    NormalFormGame::bimatrix(2, 2, &[(high, high), (0.0, 0.0), (0.0, 0.0), (low, low)]).expect("static game")
}
