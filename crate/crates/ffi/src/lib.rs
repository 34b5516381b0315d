//! C ABI for the filmgrp solvers.
//!
//! Every function returns an [`FgStatus`]. Objects are passed as opaque
//! handles that the caller releases with the matching `*_free` function.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use filmgrp::experiments::builtin_case;
use filmgrp::grp::grp_interface;
use filmgrp::riemann::{solve_star_states, WaveFan};
use filmgrp::scheme::{run_simulation, GridState, SchemeConfig, SchemeKind};
use filmgrp::state::flux;
use filmgrp::{ConservedState, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DegenerateState = 3,
    OutsideDomain = 4,
    NoRoot = 5,
    ConfigMismatch = 6,
    SingularSystem = 7,
    StateSpaceViolation = 8,
    Sonic = 9,
    Internal = 10,
}

/// Conserved variables (f, b, g, q).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgState {
    pub f: f64,
    pub b: f64,
    pub g: f64,
    pub q: f64,
}

pub const FG_SCHEME_GRP: u32 = 0;
pub const FG_SCHEME_GODUNOV: u32 = 1;
pub const FG_SCHEME_MUSCL: u32 = 2;

/// Solved Riemann problem.
pub struct FgFan {
    fan: WaveFan,
}

/// Grid, scheme settings and current time of a running simulation.
pub struct FgSimulation {
    grid: GridState,
    config: SchemeConfig,
}

impl From<FgState> for ConservedState {
    fn from(s: FgState) -> Self {
        ConservedState::from_array([s.f, s.b, s.g, s.q])
    }
}

impl From<ConservedState> for FgState {
    fn from(s: ConservedState) -> Self {
        let [f, b, g, q] = s.to_array();
        FgState { f, b, g, q }
    }
}

fn status_of(e: &Error) -> FgStatus {
    match e {
        Error::DegenerateState(_) => FgStatus::DegenerateState,
        Error::DomainError(_) => FgStatus::OutsideDomain,
        Error::NoRoot(_) => FgStatus::NoRoot,
        Error::ConfigMismatch(_) => FgStatus::ConfigMismatch,
        Error::SingularSystem(_) => FgStatus::SingularSystem,
        Error::StateSpaceViolation { .. } => FgStatus::StateSpaceViolation,
        Error::Sonic(_) => FgStatus::Sonic,
        Error::Parse { .. } | Error::Validation { .. } => FgStatus::InvalidArgument,
        Error::Io(_) => FgStatus::Internal,
    }
}

fn guard(body: impl FnOnce() -> Result<(), FgStatus>) -> FgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => FgStatus::Internal,
    }
}

fn lift<T>(r: filmgrp::Result<T>) -> Result<T, FgStatus> {
    r.map_err(|e| status_of(&e))
}

unsafe fn read<'a, T>(p: *const T) -> Result<&'a T, FgStatus> {
    p.as_ref().ok_or(FgStatus::NullPointer)
}

unsafe fn write<T>(p: *mut T, v: T) -> Result<(), FgStatus> {
    if p.is_null() {
        return Err(FgStatus::NullPointer);
    }
    p.write(v);
    Ok(())
}

/// Static description of a status code. Never NULL.
#[no_mangle]
pub extern "C" fn fg_status_message(status: FgStatus) -> *const c_char {
    let s: &'static CStr = match status {
        FgStatus::Ok => c"ok",
        FgStatus::NullPointer => c"null pointer argument",
        FgStatus::InvalidArgument => c"invalid argument",
        FgStatus::DegenerateState => c"degenerate state",
        FgStatus::OutsideDomain => c"state outside the admissible domain",
        FgStatus::NoRoot => c"no admissible star state",
        FgStatus::ConfigMismatch => c"wave configuration mismatch",
        FgStatus::SingularSystem => c"singular linear system",
        FgStatus::StateSpaceViolation => c"a cell left the state space",
        FgStatus::Sonic => c"sonic wave at the interface",
        FgStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Writes the physical flux of `state` to `out[0..4]`.
///
/// # Safety
/// `state` must be readable and `out` must point to four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fg_flux(state: *const FgState, out: *mut f64) -> FgStatus {
    guard(|| {
        let s = ConservedState::from(*read(state)?);
        write(out.cast::<[f64; 4]>(), flux(&s))
    })
}

/// Solves the Riemann problem and stores a new fan handle in `*out`.
///
/// # Safety
/// `left` and `right` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_riemann_solve(
    left: *const FgState,
    right: *const FgState,
    out: *mut *mut FgFan,
) -> FgStatus {
    guard(|| {
        let (l, r) = ((*read(left)?).into(), (*read(right)?).into());
        if out.is_null() {
            return Err(FgStatus::NullPointer);
        }
        let fan = lift(solve_star_states(&l, &r))?;
        write(out, Box::into_raw(Box::new(FgFan { fan })))
    })
}

/// Exact solution on the ray x/t = `s`.
///
/// # Safety
/// `fan` must come from [`fg_riemann_solve`] and not be freed; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_fan_sample(fan: *const FgFan, s: f64, out: *mut FgState) -> FgStatus {
    guard(|| {
        let fan = &read(fan)?.fan;
        if !s.is_finite() {
            return Err(FgStatus::InvalidArgument);
        }
        write(out, fan.sample(s).into())
    })
}

/// Left, middle and right star states, written to `out[0..3]`.
///
/// # Safety
/// `fan` must be a live handle; `out` must point to three writable states.
#[no_mangle]
pub unsafe extern "C" fn fg_fan_star_states(fan: *const FgFan, out: *mut FgState) -> FgStatus {
    guard(|| {
        let fan = &read(fan)?.fan;
        write(out.cast::<[FgState; 3]>(), [fan.star_l.into(), fan.star_m.into(), fan.star_r.into()])
    })
}

/// Releases a fan handle. NULL is ignored.
///
/// # Safety
/// `fan` must be NULL or a live handle from [`fg_riemann_solve`].
#[no_mangle]
pub unsafe extern "C" fn fg_fan_free(fan: *mut FgFan) {
    if !fan.is_null() {
        drop(Box::from_raw(fan));
    }
}

/// Interface state and its time derivative from piecewise-linear data with
/// slopes `dul[0..4]` and `dur[0..4]`.
///
/// # Safety
/// All pointers must be valid: states readable, slopes four readable doubles,
/// `state_out` writable, `dudt_out` four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fg_grp_interface(
    ul: *const FgState,
    dul: *const f64,
    ur: *const FgState,
    dur: *const f64,
    state_out: *mut FgState,
    dudt_out: *mut f64,
) -> FgStatus {
    guard(|| {
        let (l, r): (ConservedState, ConservedState) = ((*read(ul)?).into(), (*read(ur)?).into());
        let (dl, dr) = (read(dul.cast::<[f64; 4]>())?, read(dur.cast::<[f64; 4]>())?);
        if state_out.is_null() || dudt_out.is_null() {
            return Err(FgStatus::NullPointer);
        }
        let sol = lift(grp_interface(&l, dl, &r, dr))?;
        write(state_out, sol.state.into())?;
        write(dudt_out.cast::<[f64; 4]>(), sol.dudt)
    })
}

/// Creates a simulation of the built-in case `case_name` with `n` cells
/// (0 keeps the case default) and one of the `FG_SCHEME_*` schemes.
///
/// # Safety
/// `case_name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_new(
    case_name: *const c_char,
    scheme: u32,
    n: usize,
    out: *mut *mut FgSimulation,
) -> FgStatus {
    guard(|| {
        if case_name.is_null() || out.is_null() {
            return Err(FgStatus::NullPointer);
        }
        let name = CStr::from_ptr(case_name).to_str().map_err(|_| FgStatus::InvalidArgument)?;
        let mut case = builtin_case(name).ok_or(FgStatus::InvalidArgument)?;
        if n > 0 {
            case.n = n;
        }
        let kind = match scheme {
            FG_SCHEME_GRP => SchemeKind::Grp2,
            FG_SCHEME_GODUNOV => SchemeKind::Godunov,
            FG_SCHEME_MUSCL => SchemeKind::MusclRk2,
            _ => return Err(FgStatus::InvalidArgument),
        };
        let config = case.scheme_config(kind);
        let grid = lift(case.initial_grid(&config))?;
        write(out, Box::into_raw(Box::new(FgSimulation { grid, config })))
    })
}

/// Advances to time `t_end`, which must not lie before the current time.
///
/// # Safety
/// `sim` must be a live handle from [`fg_simulation_new`].
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_advance(sim: *mut FgSimulation, t_end: f64) -> FgStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or(FgStatus::NullPointer)?;
        if !(t_end.is_finite() && t_end >= sim.grid.t) {
            return Err(FgStatus::InvalidArgument);
        }
        let (grid, _) = lift(run_simulation(sim.grid.clone(), &sim.config, t_end))?;
        sim.grid = grid;
        Ok(())
    })
}

/// Number of cells and current time.
///
/// # Safety
/// `sim` must be a live handle; `n_out` and `t_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_info(
    sim: *const FgSimulation,
    n_out: *mut usize,
    t_out: *mut f64,
) -> FgStatus {
    guard(|| {
        let sim = read(sim)?;
        write(n_out, sim.grid.n)?;
        write(t_out, sim.grid.t)
    })
}

/// Copies the cell averages into `buf`, which holds `len` states; `len` must
/// equal the number of cells.
///
/// # Safety
/// `sim` must be a live handle; `buf` must point to `len` writable states.
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_copy_averages(
    sim: *const FgSimulation,
    buf: *mut FgState,
    len: usize,
) -> FgStatus {
    guard(|| {
        let sim = read(sim)?;
        if buf.is_null() {
            return Err(FgStatus::NullPointer);
        }
        if len != sim.grid.n {
            return Err(FgStatus::InvalidArgument);
        }
        let dst = std::slice::from_raw_parts_mut(buf, len);
        for (d, s) in dst.iter_mut().zip(&sim.grid.averages) {
            *d = (*s).into();
        }
        Ok(())
    })
}

/// Releases a simulation handle. NULL is ignored.
///
/// # Safety
/// `sim` must be NULL or a live handle from [`fg_simulation_new`].
#[no_mangle]
pub unsafe extern "C" fn fg_simulation_free(sim: *mut FgSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
