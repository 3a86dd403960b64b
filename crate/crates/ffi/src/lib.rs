//! C ABI over the gridworld and the paired statistics.
//!
//! Every function returns a [`GpStatus`]. On failure a message is kept per
//! thread and can be copied out with [`gp_last_error`]. Handles are opaque and
//! must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use gridpursuit::env::{reset, step_in_place, Action, GridConfig, StateCodec, Transition, WorldState};
use gridpursuit::harness::SpeedRegime;
use gridpursuit::io::parse_config;
use gridpursuit::stats::{cliffs_delta, holm_bonferroni, wilcoxon_signed_rank_exact, PairedSample};
use gridpursuit::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Contract = 4,
    /// The episode has ended; call `gp_env_reset` before stepping again.
    EpisodeOver = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: GpStatus, msg: impl Into<String>) -> GpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn from_error(err: Error) -> GpStatus {
    let status = match err {
        Error::Config { .. } | Error::Parse(_) => GpStatus::Config,
        _ => GpStatus::Contract,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> GpStatus) -> GpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(GpStatus::Panic, "internal panic"))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(GpStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string. `*needed` receives the size including the NUL.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null with `len == 0`; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn gp_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> GpStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    if !needed.is_null() {
        *needed = msg.len() + 1;
    }
    if len < msg.len() + 1 {
        return GpStatus::BufferTooSmall;
    }
    non_null!(buf);
    ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
    *buf.add(msg.len()) = 0;
    GpStatus::Ok
}

/// An environment instance with its own placement stream.
pub struct GpEnv {
    config: GridConfig,
    codec: StateCodec,
    state: WorldState,
    rng: ChaCha8Rng,
    scratch: Transition,
    done: bool,
}

impl GpEnv {
    fn new(config: GridConfig, seed: u64) -> Result<Self, Error> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = reset(&config, &mut rng)?;
        Ok(GpEnv {
            codec: StateCodec::new(&config),
            config,
            state,
            rng,
            scratch: Transition::default(),
            done: false,
        })
    }
}

fn regime(index: u32) -> Option<SpeedRegime> {
    SpeedRegime::ALL.get(index as usize).copied()
}

/// Creates an environment from an experiment document (TOML; empty for all
/// defaults). `regime` is 0 for equal speeds, 1 for faster predators and 2 for
/// faster prey.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_env_new(toml: *const c_char, regime: u32, seed: u64, out: *mut *mut GpEnv) -> GpStatus {
    non_null!(toml, out);
    guard(|| {
        let Ok(text) = CStr::from_ptr(toml).to_str() else {
            return fail(GpStatus::InvalidArgument, "configuration is not UTF-8");
        };
        let Some(r) = self::regime(regime) else {
            return fail(GpStatus::InvalidArgument, format!("unknown regime {regime}"));
        };
        let experiment = match parse_config(text) {
            Ok(e) => e,
            Err(e) => return from_error(e),
        };
        let mut grid = experiment.plan.grid;
        (grid.predator_speed, grid.prey_speed) = r.speeds();
        match GpEnv::new(grid, seed) {
            Ok(env) => {
                *out = Box::into_raw(Box::new(env));
                GpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `env` must come from `gp_env_new` and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn gp_env_free(env: *mut GpEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// Number of agents; predators come first, then prey.
///
/// # Safety
/// `env` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gp_env_agent_count(env: *const GpEnv, out: *mut usize) -> GpStatus {
    non_null!(env, out);
    *out = (*env).state.agents.len();
    GpStatus::Ok
}

/// Starts a new episode from a fresh random placement.
///
/// # Safety
/// `env` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_env_reset(env: *mut GpEnv) -> GpStatus {
    non_null!(env);
    let env = &mut *env;
    guard(|| match reset(&env.config, &mut env.rng) {
        Ok(s) => {
            env.state = s;
            env.done = false;
            GpStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Advances one step. `actions[i]` is 0..4 (up, down, left, right, stay) for
/// agent `i`. `rewards` receives base plus shaping reward per agent.
///
/// # Safety
/// `actions` and `rewards` must hold `n` elements, `done` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_env_step(
    env: *mut GpEnv,
    actions: *const u8,
    n: usize,
    rewards: *mut f64,
    done: *mut bool,
) -> GpStatus {
    non_null!(env, actions, rewards, done);
    let env = &mut *env;
    if env.done {
        return fail(GpStatus::EpisodeOver, "episode has ended");
    }
    if n != env.state.agents.len() {
        return fail(GpStatus::InvalidArgument, format!("expected {} actions, got {n}", env.state.agents.len()));
    }
    let mut joint = Vec::with_capacity(n);
    for &a in slice::from_raw_parts(actions, n) {
        match Action::from_index(a as usize) {
            Some(a) => joint.push(a),
            None => return fail(GpStatus::InvalidArgument, format!("unknown action {a}")),
        }
    }
    guard(|| {
        if let Err(e) = step_in_place(&mut env.state, &joint, &env.config, &mut env.scratch) {
            return from_error(e);
        }
        let out = slice::from_raw_parts_mut(rewards, n);
        for (i, r) in out.iter_mut().enumerate() {
            *r = env.scratch.base_rewards[i] + env.scratch.shaping[i];
        }
        env.done = env.scratch.terminal();
        *done = env.done;
        GpStatus::Ok
    })
}

/// Per-agent observation: x, y, stamina and alive flag, in four arrays of `n`.
///
/// # Safety
/// Each output array must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn gp_env_agents(
    env: *const GpEnv,
    n: usize,
    x: *mut u16,
    y: *mut u16,
    stamina: *mut u32,
    alive: *mut bool,
) -> GpStatus {
    non_null!(env, x, y, stamina, alive);
    let agents = &(*env).state.agents;
    if n != agents.len() {
        return fail(GpStatus::BufferTooSmall, format!("need {} slots, got {n}", agents.len()));
    }
    for (i, a) in agents.iter().enumerate() {
        *x.add(i) = a.position.x;
        *y.add(i) = a.position.y;
        *stamina.add(i) = a.stamina;
        *alive.add(i) = a.alive;
    }
    GpStatus::Ok
}

/// The tabular state key of the current state.
///
/// # Safety
/// `env` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gp_env_state_key(env: *const GpEnv, out: *mut u64) -> GpStatus {
    non_null!(env, out);
    *out = (*env).codec.encode(&(*env).state).0;
    GpStatus::Ok
}

unsafe fn pair<'a>(x: *const f64, y: *const f64, n: usize) -> (&'a [f64], &'a [f64]) {
    (slice::from_raw_parts(x, n), slice::from_raw_parts(y, n))
}

/// Exact two-sided Wilcoxon signed-rank p-value for paired samples.
///
/// # Safety
/// `x` and `y` must hold `n` elements; `p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_wilcoxon_exact(x: *const f64, y: *const f64, n: usize, p: *mut f64) -> GpStatus {
    non_null!(x, y, p);
    let (x, y) = pair(x, y, n);
    guard(|| match PairedSample::new(x.to_vec(), y.to_vec()).and_then(|s| wilcoxon_signed_rank_exact(&s)) {
        Ok(r) => {
            *p = r.p_two_sided;
            GpStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Cliff's delta of `x` against `y`.
///
/// # Safety
/// `x` must hold `nx` and `y` `ny` elements; `delta` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gp_cliffs_delta(
    x: *const f64,
    nx: usize,
    y: *const f64,
    ny: usize,
    delta: *mut f64,
) -> GpStatus {
    non_null!(x, y, delta);
    let (x, y) = (slice::from_raw_parts(x, nx), slice::from_raw_parts(y, ny));
    guard(|| match cliffs_delta(x, y) {
        Ok(d) => {
            *delta = d;
            GpStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Holm step-down adjusted p-values, written in input order.
///
/// # Safety
/// `p` and `adjusted` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn gp_holm(p: *const f64, n: usize, adjusted: *mut f64) -> GpStatus {
    non_null!(p, adjusted);
    let input = slice::from_raw_parts(p, n);
    guard(|| match holm_bonferroni(input) {
        Ok(h) => {
            slice::from_raw_parts_mut(adjusted, n).copy_from_slice(&h.adjusted);
            GpStatus::Ok
        }
        Err(e) => from_error(e),
    })
}
