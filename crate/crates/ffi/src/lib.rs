//! C interface to `equilearn`.
//!
//! Games and runs are opaque heap handles created by `eql_*_new` style
//! functions and released with the matching `eql_*_free`. Every fallible
//! function returns an [`EqlStatus`]; on failure a message is available from
//! [`eql_last_error`] on the same thread. Output pointers are written only
//! on success.
//!
//! The header `include/equilearn.h` is generated by the build script.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;
use std::sync::Arc;

use equilearn::dynamics::{detect_steady_state, run_dynamics, DynamicsRun, SteadyState};
use equilearn::equilibria::{self, EquilibriumReport};
use equilearn::harness::schedule_for;
use equilearn::learners::{parse_algorithm_list, AlgorithmSpec};
use equilearn::wireless::{build_ic_game, IcScenario};
use equilearn::{Error, JointDistribution, MixedProfile, MixedStrategy, NormalFormGame};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqlStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    DimensionMismatch = 3,
    InformationModel = 4,
    Capacity = 5,
    NotFound = 6,
    EmptyHistory = 7,
    Uninitialized = 8,
    Config = 9,
    Parse = 10,
    /// The caller's buffer is too small; the required size was reported.
    BufferTooSmall = 11,
    Panic = 12,
}

/// Which equilibrium a report refers to.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqlKind {
    Pne = 0,
    EpsNe = 1,
    Ce = 2,
    Cce = 3,
}

/// Long-run behaviour of a run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqlSteadyState {
    Converged = 0,
    Cycle = 1,
    None = 2,
}

/// Outcome of an equilibrium check. `witness_player` is -1 when the
/// condition holds; `witness_from` is -1 for unconditional deviations.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqlReport {
    pub kind: EqlKind,
    pub holds: bool,
    pub worst_violation: f64,
    pub witness_player: i64,
    pub witness_from: i64,
    pub witness_to: i64,
}

/// Opaque game handle.
pub struct EqlGame {
    game: Arc<NormalFormGame>,
}

/// Opaque handle to a finished learning run.
pub struct EqlRun {
    run: DynamicsRun,
    num_players: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> EqlStatus {
    match e {
        Error::InvalidArgument(_) => EqlStatus::InvalidArgument,
        Error::DimensionMismatch { .. } => EqlStatus::DimensionMismatch,
        Error::EmptyHistory => EqlStatus::EmptyHistory,
        Error::Capacity { .. } => EqlStatus::Capacity,
        Error::NotFound(_) => EqlStatus::NotFound,
        Error::Uninitialized(_) => EqlStatus::Uninitialized,
        Error::InformationModel(_) => EqlStatus::InformationModel,
        Error::Config(_) => EqlStatus::Config,
        Error::Serde(_) => EqlStatus::Parse,
    }
}

struct Failure(EqlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EqlStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EqlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EqlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {msg}"));
            EqlStatus::Panic
        }
    }
}

unsafe fn slice_in<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { slice::from_raw_parts(p, len) })
}

unsafe fn game_ref<'a>(g: *const EqlGame) -> Result<&'a NormalFormGame, Failure> {
    unsafe { g.as_ref() }.map(|h| h.game.as_ref()).ok_or_else(|| null("game"))
}

unsafe fn str_in<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| Failure(EqlStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    unsafe { out.write(value) };
    Ok(())
}

fn boxed_game(game: NormalFormGame) -> *mut EqlGame {
    Box::into_raw(Box::new(EqlGame { game: Arc::new(game) }))
}

fn report_out(r: &EquilibriumReport) -> EqlReport {
    let kind = match r.kind {
        equilibria::EquilibriumKind::Pne => EqlKind::Pne,
        equilibria::EquilibriumKind::EpsNe => EqlKind::EpsNe,
        equilibria::EquilibriumKind::Ce => EqlKind::Ce,
        equilibria::EquilibriumKind::Cce => EqlKind::Cce,
    };
    let (player, from, to) = match r.witness {
        Some(w) => (w.player as i64, w.from_action.map_or(-1, |a| a as i64), w.to_action as i64),
        None => (-1, -1, -1),
    };
    EqlReport { kind, holds: r.holds, worst_violation: r.worst_violation, witness_player: player, witness_from: from, witness_to: to }
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn eql_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a game from per-player utility tables.
///
/// `utilities` holds `num_players * prod(action_counts)` values: player 0's
/// table first, each table indexed row-major with player 0 as the slowest
/// digit.
#[no_mangle]
pub unsafe extern "C" fn eql_game_new(
    num_players: usize,
    action_counts: *const usize,
    utilities: *const f64,
    utilities_len: usize,
    out: *mut *mut EqlGame,
) -> EqlStatus {
    guard(|| {
        let counts = unsafe { slice_in(action_counts, num_players, "action_counts") }?.to_vec();
        let size = counts.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).ok_or_else(|| {
            Failure(EqlStatus::Capacity, "profile count overflows".into())
        })?;
        let expected = size * num_players;
        if utilities_len != expected {
            return Err(Error::DimensionMismatch { expected, actual: utilities_len }.into());
        }
        let flat = unsafe { slice_in(utilities, utilities_len, "utilities") }?;
        let tables = if size == 0 { vec![Vec::new(); num_players] } else { flat.chunks(size).map(<[f64]>::to_vec).collect() };
        let game = NormalFormGame::new(counts, tables)?;
        unsafe { write_out(out, boxed_game(game), "out") }
    })
}

/// Parses a game document (`{"players", "action_counts", "utilities"}`).
#[no_mangle]
pub unsafe extern "C" fn eql_game_from_json(json: *const c_char, out: *mut *mut EqlGame) -> EqlStatus {
    guard(|| {
        let text = unsafe { str_in(json, "json") }?;
        let game = NormalFormGame::from_json(text)?;
        unsafe { write_out(out, boxed_game(game), "out") }
    })
}

/// Channel-selection game of a parallel interference channel with `k`
/// pairs and `s` bands. `gains[(j * k + i) * s + band]` is the gain from
/// transmitter `j` to receiver `i`.
#[no_mangle]
pub unsafe extern "C" fn eql_ic_game_new(
    k: usize,
    s: usize,
    snr_db: f64,
    gains: *const f64,
    gains_len: usize,
    out: *mut *mut EqlGame,
) -> EqlStatus {
    guard(|| {
        let g = unsafe { slice_in(gains, gains_len, "gains") }?.to_vec();
        let scenario = IcScenario::new(k, s, snr_db, g)?;
        unsafe { write_out(out, boxed_game(build_ic_game(&scenario)?), "out") }
    })
}

/// Same as [`eql_ic_game_new`] with unit-mean exponential gains drawn from
/// `seed`.
#[no_mangle]
pub unsafe extern "C" fn eql_ic_game_random(k: usize, s: usize, snr_db: f64, seed: u64, out: *mut *mut EqlGame) -> EqlStatus {
    guard(|| {
        let scenario = IcScenario::random(k, s, snr_db, seed)?;
        unsafe { write_out(out, boxed_game(build_ic_game(&scenario)?), "out") }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eql_game_free(game: *mut EqlGame) {
    if !game.is_null() {
        drop(unsafe { Box::from_raw(game) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn eql_game_num_players(game: *const EqlGame, out: *mut usize) -> EqlStatus {
    guard(|| {
        let g = unsafe { game_ref(game) }?;
        unsafe { write_out(out, g.num_players(), "out") }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eql_game_num_actions(game: *const EqlGame, player: usize, out: *mut usize) -> EqlStatus {
    guard(|| {
        let g = unsafe { game_ref(game) }?;
        if player >= g.num_players() {
            return Err(Failure(EqlStatus::InvalidArgument, format!("player {player} out of range")));
        }
        unsafe { write_out(out, g.num_actions(player), "out") }
    })
}

/// Utility of `player` at the action profile `profile[0..len]`.
#[no_mangle]
pub unsafe extern "C" fn eql_game_utility(
    game: *const EqlGame,
    profile: *const usize,
    len: usize,
    player: usize,
    out: *mut f64,
) -> EqlStatus {
    guard(|| {
        let g = unsafe { game_ref(game) }?;
        let p = unsafe { slice_in(profile, len, "profile") }?;
        unsafe { write_out(out, g.utility(p, player)?, "out") }
    })
}

/// Checks whether the joint distribution `probs` (row-major over profiles)
/// is a coarse correlated (`kind == CCE`) or correlated (`kind == CE`)
/// equilibrium within `tol`.
#[no_mangle]
pub unsafe extern "C" fn eql_check_correlated(
    game: *const EqlGame,
    kind: EqlKind,
    probs: *const f64,
    len: usize,
    tol: f64,
    out: *mut EqlReport,
) -> EqlStatus {
    guard(|| {
        let g = unsafe { game_ref(game) }?;
        let phi = JointDistribution::new(g.action_counts(), unsafe { slice_in(probs, len, "probs") }?.to_vec())?;
        let report = match kind {
            EqlKind::Cce => equilibria::is_cce(g, &phi, tol)?,
            EqlKind::Ce => equilibria::is_ce(g, &phi, tol)?,
            _ => return Err(Failure(EqlStatus::InvalidArgument, "kind must be CE or CCE".into())),
        };
        unsafe { write_out(out, report_out(&report), "out") }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eql_check_pure_ne(
    game: *const EqlGame,
    profile: *const usize,
    len: usize,
    tol: f64,
    out: *mut EqlReport,
) -> EqlStatus {
    guard(|| {
        let g = unsafe { game_ref(game) }?;
        let p = unsafe { slice_in(profile, len, "profile") }?;
        let report = equilibria::is_pure_ne(g, p, tol)?;
        unsafe { write_out(out, report_out(&report), "out") }
    })
}

/// ε-Nash check of independent mixed strategies, concatenated player by
/// player in `strategies`.
#[no_mangle]
pub unsafe extern "C" fn eql_check_epsilon_ne(
    game: *const EqlGame,
    strategies: *const f64,
    len: usize,
    epsilon: f64,
    out: *mut EqlReport,
) -> EqlStatus {
    guard(|| {
        let g = unsafe { game_ref(game) }?;
        let flat = unsafe { slice_in(strategies, len, "strategies") }?;
        let expected: usize = g.action_counts().iter().sum();
        if len != expected {
            return Err(Error::DimensionMismatch { expected, actual: len }.into());
        }
        let mut offset = 0;
        let mut parts = Vec::with_capacity(g.num_players());
        for &n in g.action_counts() {
            parts.push(MixedStrategy::new(flat[offset..offset + n].to_vec())?);
            offset += n;
        }
        let report = equilibria::is_epsilon_ne(g, &MixedProfile::new(parts), epsilon)?;
        unsafe { write_out(out, report_out(&report), "out") }
    })
}

/// Writes every pure Nash equilibrium into `profiles`, `num_players`
/// entries per equilibrium, in row-major order. `count` always receives the
/// number of equilibria; when `capacity` (in equilibria) is too small
/// nothing is written to `profiles` and `BufferTooSmall` is returned.
#[no_mangle]
pub unsafe extern "C" fn eql_enumerate_pure_ne(
    game: *const EqlGame,
    tol: f64,
    profiles: *mut usize,
    capacity: usize,
    count: *mut usize,
) -> EqlStatus {
    guard(|| {
        let g = unsafe { game_ref(game) }?;
        let all = equilibria::enumerate_pure_ne(g, tol)?;
        unsafe { write_out(count, all.len(), "count") }?;
        if all.len() > capacity {
            return Err(Failure(
                EqlStatus::BufferTooSmall,
                format!("{} equilibria do not fit in a buffer of {capacity}", all.len()),
            ));
        }
        if all.is_empty() {
            return Ok(());
        }
        if profiles.is_null() {
            return Err(null("profiles"));
        }
        let k = g.num_players();
        let buf = unsafe { slice::from_raw_parts_mut(profiles, all.len() * k) };
        for (dst, p) in buf.chunks_mut(k).zip(&all) {
            dst.copy_from_slice(p);
        }
        Ok(())
    })
}

/// Plays `iterations` stages of learning. `algorithms` is a comma-separated
/// list of learner specs (`"rm"`, `"brd:seq"`, `"juste:kappa=0.1,pmin=0.01"`,
/// ...), one per player, or a single spec used by every player.
#[no_mangle]
pub unsafe extern "C" fn eql_run_dynamics(
    game: *const EqlGame,
    algorithms: *const c_char,
    iterations: usize,
    seed: u64,
    out: *mut *mut EqlRun,
) -> EqlStatus {
    guard(|| {
        let handle = unsafe { game.as_ref() }.ok_or_else(|| null("game"))?;
        let k = handle.game.num_players();
        let mut specs: Vec<AlgorithmSpec> = parse_algorithm_list(unsafe { str_in(algorithms, "algorithms") }?)?;
        if specs.len() == 1 {
            specs = vec![specs[0]; k];
        }
        let run = run_dynamics(&handle.game, &specs, iterations, seed, schedule_for(&specs))?;
        let boxed = Box::into_raw(Box::new(EqlRun { run, num_players: k }));
        unsafe { write_out(out, boxed, "out") }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eql_run_free(run: *mut EqlRun) {
    if !run.is_null() {
        drop(unsafe { Box::from_raw(run) });
    }
}

unsafe fn run_ref<'a>(r: *const EqlRun) -> Result<&'a EqlRun, Failure> {
    unsafe { r.as_ref() }.ok_or_else(|| null("run"))
}

fn stage_check(r: &EqlRun, stage: usize, player: usize) -> Result<(), Failure> {
    if stage >= r.run.history.len() || player >= r.num_players {
        return Err(Failure(EqlStatus::InvalidArgument, format!("stage {stage} / player {player} out of range")));
    }
    Ok(())
}

#[no_mangle]
pub unsafe extern "C" fn eql_run_len(run: *const EqlRun, out: *mut usize) -> EqlStatus {
    guard(|| {
        let r = unsafe { run_ref(run) }?;
        unsafe { write_out(out, r.run.history.len(), "out") }
    })
}

/// Action of `player` at zero-based `stage`.
#[no_mangle]
pub unsafe extern "C" fn eql_run_action(run: *const EqlRun, stage: usize, player: usize, out: *mut usize) -> EqlStatus {
    guard(|| {
        let r = unsafe { run_ref(run) }?;
        stage_check(r, stage, player)?;
        unsafe { write_out(out, r.run.history.records()[stage].profile[player], "out") }
    })
}

#[no_mangle]
pub unsafe extern "C" fn eql_run_utility(run: *const EqlRun, stage: usize, player: usize, out: *mut f64) -> EqlStatus {
    guard(|| {
        let r = unsafe { run_ref(run) }?;
        stage_check(r, stage, player)?;
        unsafe { write_out(out, r.run.history.records()[stage].utilities[player], "out") }
    })
}

/// Steady-state verdict over the last `window` stages; `period` receives 0
/// unless the verdict is a cycle.
#[no_mangle]
pub unsafe extern "C" fn eql_run_steady_state(
    run: *const EqlRun,
    window: usize,
    tol: f64,
    state: *mut EqlSteadyState,
    period: *mut usize,
) -> EqlStatus {
    guard(|| {
        let r = unsafe { run_ref(run) }?;
        let verdict = detect_steady_state(&r.run.trace, window, tol)?;
        let (s, p) = match verdict {
            SteadyState::Converged { .. } => (EqlSteadyState::Converged, 0),
            SteadyState::Cycle { period } => (EqlSteadyState::Cycle, period),
            SteadyState::None => (EqlSteadyState::None, 0),
        };
        unsafe { write_out(state, s, "state") }?;
        if !period.is_null() {
            unsafe { period.write(p) };
        }
        Ok(())
    })
}
