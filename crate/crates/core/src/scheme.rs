//! Finite-volume time marching: second-order GRP, first-order Godunov and
//! MUSCL with Heun time stepping.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::experiments::travelling_wave_exact;
use crate::grp::grp_interface_with;
use crate::riemann::{solve_star_states_with, Admissibility};
use crate::state::{flux, max_wave_speed, ConservedState, Vec4};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Periodic,
    Outflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimiterMode {
    Minmod,
    UnlimitedCentral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Grp2,
    Godunov,
    MusclRk2,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Grp2 => "grp",
            SchemeKind::Godunov => "godunov",
            SchemeKind::MusclRk2 => "muscl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub cfl: f64,
    pub theta: f64,
    pub limiter: LimiterMode,
    pub scheme: SchemeKind,
    /// Domain accepted by the interface solvers.
    pub admissibility: Admissibility,
    /// Record state-space violations instead of failing.
    pub continue_on_violation: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            theta: 1.0,
            limiter: LimiterMode::Minmod,
            scheme: SchemeKind::Grp2,
            admissibility: Admissibility::Signs,
            continue_on_violation: false,
        }
    }
}

impl SchemeConfig {
    pub fn new(scheme: SchemeKind, limiter: LimiterMode) -> Self {
        Self { scheme, limiter, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Validation { key: "cfl".into(), msg: "must lie in (0, 1]".into() });
        }
        if !(self.theta >= 0.0 && self.theta < 2.0) {
            return Err(Error::Validation { key: "theta".into(), msg: "must lie in [0, 2)".into() });
        }
        Ok(())
    }
}

/// Initial data descriptors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    Riemann { left: ConservedState, right: ConservedState, jump: f64 },
    TravellingWave,
    /// f = 1, b = -1 - e, g = 2, q = 2 + e with e = exp(-(x - 4)^2).
    Gaussian,
    Constant(ConservedState),
}

impl InitialData {
    pub fn value(&self, x: f64) -> ConservedState {
        match *self {
            InitialData::Riemann { left, right, jump } => {
                if x < jump {
                    left
                } else {
                    right
                }
            }
            InitialData::TravellingWave => travelling_wave_exact(x, 0.0),
            InitialData::Gaussian => {
                let e = (-(x - 4.0) * (x - 4.0)).exp();
                ConservedState::new(1.0, -1.0 - e, 2.0, 2.0 + e)
            }
            InitialData::Constant(s) => s,
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, InitialData::Riemann { .. })
    }

    /// Exact average over [a, b] by 5-point Gauss-Legendre, split at the jump.
    pub fn cell_average(&self, a: f64, b: f64) -> ConservedState {
        if let InitialData::Riemann { jump, .. } = *self {
            if jump > a && jump < b {
                let (wl, wr) = ((jump - a) / (b - a), (b - jump) / (b - a));
                let l = gauss5(|x| self.value(x), a, jump);
                let r = gauss5(|x| self.value(x), jump, b);
                return lin(&l, wl, &r, wr);
            }
        }
        gauss5(|x| self.value(x), a, b)
    }
}

fn lin(a: &ConservedState, wa: f64, b: &ConservedState, wb: f64) -> ConservedState {
    let (x, y) = (a.to_array(), b.to_array());
    ConservedState::from_array(std::array::from_fn(|i| wa * x[i] + wb * y[i]))
}

fn gauss5(f: impl Fn(f64) -> ConservedState, a: f64, b: f64) -> ConservedState {
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = [0.0; 4];
    for (x, w) in X.iter().zip(W) {
        let s = f(m + h * x).to_array();
        for i in 0..4 {
            acc[i] += 0.5 * w * s[i];
        }
    }
    ConservedState::from_array(acc)
}

/// Counters for non-fatal events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    /// Cell slopes reset to zero because a trace lost the sign conditions.
    pub zeroed_slopes: usize,
    /// Averages outside the sign conditions, recorded when continuing.
    pub violations: usize,
    /// Averages outside the closed state space (fb + gq < 0), informational.
    pub below_state_space: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
    pub dx: f64,
    pub t: f64,
    pub averages: Vec<ConservedState>,
    pub slopes: Vec<Vec4>,
    pub bc: Bc,
    pub diagnostics: Diagnostics,
}

pub fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

fn sub(a: &ConservedState, b: &ConservedState) -> Vec4 {
    [a.f - b.f, a.b - b.b, a.g - b.g, a.q - b.q]
}

impl GridState {
    pub fn new(x_lo: f64, x_hi: f64, n: usize, bc: Bc) -> Result<Self> {
        if n == 0 || !(x_hi > x_lo) {
            return Err(Error::Validation { key: "N".into(), msg: "empty grid".into() });
        }
        let dummy = ConservedState::new(1.0, -1.0, 1.0, 1.0);
        Ok(Self {
            x_lo,
            x_hi,
            n,
            dx: (x_hi - x_lo) / n as f64,
            t: 0.0,
            averages: vec![dummy; n],
            slopes: vec![[0.0; 4]; n],
            bc,
            diagnostics: Diagnostics::default(),
        })
    }

    /// Cell averages of the data with initial slopes.
    pub fn from_initial(
        init: &InitialData,
        x_lo: f64,
        x_hi: f64,
        n: usize,
        bc: Bc,
        config: &SchemeConfig,
    ) -> Result<Self> {
        let mut grid = Self::new(x_lo, x_hi, n, bc)?;
        let dx = grid.dx;
        for j in 0..n {
            let a = x_lo + j as f64 * dx;
            grid.averages[j] = init.cell_average(a, a + dx);
        }
        if config.scheme == SchemeKind::Godunov {
            return Ok(grid);
        }
        let minmod = SchemeConfig { limiter: LimiterMode::Minmod, ..*config };
        grid.slopes = grid.limited_slopes(&minmod);
        Ok(grid)
    }

    pub fn cell_center(&self, j: usize) -> f64 {
        self.x_lo + (j as f64 + 0.5) * self.dx
    }

    /// Average of cell `j` for j in -1..=n, using ghost cells.
    pub fn ghost_average(&self, j: isize) -> ConservedState {
        let n = self.n as isize;
        if (0..n).contains(&j) {
            return self.averages[j as usize];
        }
        match self.bc {
            Bc::Periodic => self.averages[j.rem_euclid(n) as usize],
            Bc::Outflow => self.averages[if j < 0 { 0 } else { (n - 1) as usize }],
        }
    }

    pub fn ghost_slope(&self, j: isize) -> Vec4 {
        let n = self.n as isize;
        if (0..n).contains(&j) {
            return self.slopes[j as usize];
        }
        match self.bc {
            Bc::Periodic => self.slopes[j.rem_euclid(n) as usize],
            Bc::Outflow => [0.0; 4],
        }
    }

    /// Domain integrals of the four conserved components.
    pub fn totals(&self) -> Vec4 {
        let mut t = [0.0; 4];
        for s in &self.averages {
            let a = s.to_array();
            for i in 0..4 {
                t[i] += a[i];
            }
        }
        t.map(|x| x * self.dx)
    }

    /// Slopes from minmod-θ of neighbour differences (central difference in
    /// unlimited mode).
    pub fn limited_slopes(&self, config: &SchemeConfig) -> Vec<Vec4> {
        let dx = self.dx;
        (0..self.n as isize)
            .map(|j| {
                let (um, u0, up) =
                    (self.ghost_average(j - 1), self.ghost_average(j), self.ghost_average(j + 1));
                let (dl, dr) = (sub(&u0, &um), sub(&up, &u0));
                std::array::from_fn(|i| {
                    let central = 0.5 * (dl[i] + dr[i]) / dx;
                    match config.limiter {
                        LimiterMode::UnlimitedCentral => central,
                        LimiterMode::Minmod => minmod3(
                            config.theta * dl[i] / dx,
                            central,
                            config.theta * dr[i] / dx,
                        ),
                    }
                })
            })
            .collect()
    }

    fn check_averages(&mut self, config: &SchemeConfig) -> Result<()> {
        for (j, s) in self.averages.iter().enumerate() {
            if !s.has_admissible_signs() {
                if config.continue_on_violation {
                    self.diagnostics.violations += 1;
                } else {
                    return Err(Error::StateSpaceViolation { cell: j, t: self.t });
                }
            } else if s.u() + s.v() < 0.0 {
                self.diagnostics.below_state_space += 1;
            }
        }
        Ok(())
    }
}

/// Largest stable step for the current averages.
pub fn cfl_dt(grid: &GridState, cfl: f64) -> Result<f64> {
    let smax = grid.averages.iter().fold(0.0f64, |m, s| m.max(max_wave_speed(s)));
    if !(smax > 0.0) || !smax.is_finite() {
        return Err(Error::DegenerateState(format!("maximum wave speed {smax}")));
    }
    if !(cfl > 0.0) {
        return Err(Error::Validation { key: "cfl".into(), msg: "must be positive".into() });
    }
    Ok(cfl * grid.dx / smax)
}

fn riemann_flux(ul: &ConservedState, ur: &ConservedState, adm: Admissibility) -> Result<Vec4> {
    if ul == ur {
        return Ok(flux(ul));
    }
    let fan = solve_star_states_with(ul, ur, adm)?;
    Ok(flux(&fan.sample(0.0)))
}

fn conservative_update(grid: &mut GridState, fluxes: &[Vec4], dt: f64) {
    let r = dt / grid.dx;
    for (j, s) in grid.averages.iter_mut().enumerate() {
        let (fl, fr) = (&fluxes[j], &fluxes[j + 1]);
        *s = ConservedState::new(
            s.f - r * (fr[0] - fl[0]),
            s.b - r * (fr[1] - fl[1]),
            s.g - r * (fr[2] - fl[2]),
            s.q - r * (fr[3] - fl[3]),
        );
    }
}

/// Interface traces from the current averages and slopes; cells whose traces
/// lose the sign conditions get a zero slope.
fn traces(grid: &mut GridState) -> Vec<(ConservedState, ConservedState)> {
    let h = 0.5 * grid.dx;
    for j in 0..grid.n {
        let (s, d) = (grid.averages[j], grid.slopes[j]);
        if d != [0.0; 4]
            && !(s.add_scaled(&d, -h).has_admissible_signs()
                && s.add_scaled(&d, h).has_admissible_signs())
        {
            grid.slopes[j] = [0.0; 4];
            grid.diagnostics.zeroed_slopes += 1;
        }
    }
    (0..=grid.n as isize)
        .map(|i| {
            let (a, da) = (grid.ghost_average(i - 1), grid.ghost_slope(i - 1));
            let (b, db) = (grid.ghost_average(i), grid.ghost_slope(i));
            (a.add_scaled(&da, h), b.add_scaled(&db, -h))
        })
        .collect()
}

pub fn grp_step(grid: &mut GridState, config: &SchemeConfig, dt: f64) -> Result<()> {
    let tr = traces(grid);
    let n = grid.n;
    let mut fluxes = Vec::with_capacity(n + 1);
    let mut ends = Vec::with_capacity(n + 1);
    for (i, (ul, ur)) in tr.iter().enumerate() {
        let dul = grid.ghost_slope(i as isize - 1);
        let dur = grid.ghost_slope(i as isize);
        let sol = grp_interface_with(ul, &dul, ur, &dur, config.admissibility)?;
        fluxes.push(flux(&sol.state.add_scaled(&sol.dudt, 0.5 * dt)));
        ends.push(sol.state.add_scaled(&sol.dudt, dt));
    }
    conservative_update(grid, &fluxes, dt);
    grid.t += dt;
    grid.check_averages(config)?;

    let dx = grid.dx;
    let slopes: Vec<Vec4> = (0..n)
        .map(|j| {
            let d_end = sub(&ends[j + 1], &ends[j]);
            match config.limiter {
                LimiterMode::UnlimitedCentral => d_end.map(|x| x / dx),
                LimiterMode::Minmod => {
                    let ji = j as isize;
                    let u0 = grid.averages[j];
                    let dl = sub(&u0, &grid.ghost_average(ji - 1));
                    let dr = sub(&grid.ghost_average(ji + 1), &u0);
                    std::array::from_fn(|k| {
                        minmod3(
                            config.theta * dl[k] / dx,
                            d_end[k] / dx,
                            config.theta * dr[k] / dx,
                        )
                    })
                }
            }
        })
        .collect();
    grid.slopes = slopes;
    Ok(())
}

pub fn godunov_step(grid: &mut GridState, config: &SchemeConfig, dt: f64) -> Result<()> {
    let n = grid.n as isize;
    let fluxes = (0..=n)
        .map(|i| {
            riemann_flux(&grid.ghost_average(i - 1), &grid.ghost_average(i), config.admissibility)
        })
        .collect::<Result<Vec<_>>>()?;
    conservative_update(grid, &fluxes, dt);
    grid.slopes.iter_mut().for_each(|s| *s = [0.0; 4]);
    grid.t += dt;
    grid.check_averages(config)
}

fn muscl_stage(grid: &mut GridState, config: &SchemeConfig, dt: f64) -> Result<()> {
    grid.slopes = grid.limited_slopes(config);
    let tr = traces(grid);
    let fluxes = tr
        .iter()
        .map(|(l, r)| riemann_flux(l, r, config.admissibility))
        .collect::<Result<Vec<_>>>()?;
    conservative_update(grid, &fluxes, dt);
    Ok(())
}

pub fn muscl_rk2_step(grid: &mut GridState, config: &SchemeConfig, dt: f64) -> Result<()> {
    let start = grid.averages.clone();
    muscl_stage(grid, config, dt)?;
    grid.check_averages(config)?;
    muscl_stage(grid, config, dt)?;
    for (s, s0) in grid.averages.iter_mut().zip(&start) {
        let (a, b) = (s.to_array(), s0.to_array());
        *s = ConservedState::from_array(std::array::from_fn(|i| 0.5 * (a[i] + b[i])));
    }
    grid.t += dt;
    grid.check_averages(config)
}

pub fn step(grid: &mut GridState, config: &SchemeConfig, dt: f64) -> Result<()> {
    match config.scheme {
        SchemeKind::Grp2 => grp_step(grid, config, dt),
        SchemeKind::Godunov => godunov_step(grid, config, dt),
        SchemeKind::MusclRk2 => muscl_rk2_step(grid, config, dt),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub totals: Vec4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub steps: Vec<StepRecord>,
    pub totals_start: Vec4,
    pub totals_end: Vec4,
    pub wall_seconds: f64,
}

/// Marches `grid` to `t_end`, clipping the last step to land on it exactly.
pub fn run_simulation(mut grid: GridState, config: &SchemeConfig, t_end: f64) -> Result<(GridState, RunLog)> {
    config.validate()?;
    if !(t_end >= 0.0) {
        return Err(Error::Validation { key: "t_end".into(), msg: "must be nonnegative".into() });
    }
    let clock = Instant::now();
    let totals_start = grid.totals();
    let mut steps = Vec::new();
    while grid.t < t_end {
        let mut dt = cfl_dt(&grid, config.cfl)?;
        let last = grid.t + dt >= t_end;
        if last {
            dt = t_end - grid.t;
        }
        step(&mut grid, config, dt)?;
        if last {
            grid.t = t_end;
        }
        steps.push(StepRecord { t: grid.t, dt, totals: grid.totals() });
    }
    let log = RunLog {
        steps,
        totals_start,
        totals_end: grid.totals(),
        wall_seconds: clock.elapsed().as_secs_f64(),
    };
    Ok((grid, log))
}

/// Runs a fixed number of steps with CFL-controlled time steps.
pub fn run_steps(grid: &mut GridState, config: &SchemeConfig, steps: usize) -> Result<()> {
    for _ in 0..steps {
        let dt = cfl_dt(grid, config.cfl)?;
        step(grid, config, dt)?;
    }
    Ok(())
}
