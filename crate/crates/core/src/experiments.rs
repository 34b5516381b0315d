//! Exact solutions, error norms, convergence studies, the fine-grid
//! derivative oracle and the built-in test cases.

use std::f64::consts::PI;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::grp::{assemble_and_solve, acoustic_solve, grp_interface, SlopeData, StarDerivatives};
use crate::riemann::{solve_star_states, solve_star_states_with, Admissibility, Region};
use crate::scheme::{
    run_simulation, Bc, GridState, InitialData, LimiterMode, SchemeConfig, SchemeKind,
};
use crate::state::{flux, jacobian, max_wave_speed, ConservedState, Vec4};

/// Travelling wave f = 2 + sin(x + t), b = -2/f, g = 2, q = 1.
pub fn travelling_wave_exact(x: f64, t: f64) -> ConservedState {
    let f = 2.0 + (x + t).sin();
    ConservedState::new(f, -2.0 / f, 2.0, 1.0)
}

/// Time derivative of the travelling wave.
pub fn travelling_wave_dt(x: f64, t: f64) -> Vec4 {
    let f = 2.0 + (x + t).sin();
    let c = (x + t).cos();
    [c, 2.0 * c / (f * f), 0.0, 0.0]
}

pub const VARS: [&str; 4] = ["f", "b", "g", "q"];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Per-variable error norms of one run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub vars: [Norms; 4],
    pub wall_seconds: f64,
}

/// Errors of the cell averages against exact values at cell midpoints.
pub fn error_norms(grid: &GridState, exact: impl Fn(f64) -> ConservedState) -> ErrorReport {
    let mut vars = [Norms::default(); 4];
    for (j, s) in grid.averages.iter().enumerate() {
        let e = exact(grid.cell_center(j)).to_array();
        let a = s.to_array();
        for i in 0..4 {
            let d = (a[i] - e[i]).abs();
            vars[i].l1 += d;
            vars[i].l2 += d * d;
            vars[i].linf = vars[i].linf.max(d);
        }
    }
    for v in &mut vars {
        v.l1 *= grid.dx;
        v.l2 = (v.l2 * grid.dx).sqrt();
    }
    ErrorReport { vars, wall_seconds: 0.0 }
}

/// log2(e_n / e_2n).
pub fn observed_order(e_n: f64, e_2n: f64) -> Result<f64> {
    if !(e_n > 0.0 && e_2n > 0.0) {
        return Err(Error::DomainError(format!("orders need positive errors: {e_n}, {e_2n}")));
    }
    Ok((e_n / e_2n).log2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub name: String,
    pub x_lo: f64,
    pub x_hi: f64,
    pub init: InitialData,
    pub t_end: f64,
    pub n: usize,
    pub cfl: f64,
    pub theta: f64,
    pub limiter: LimiterMode,
    pub bc: Bc,
    /// Output times for multi-snapshot cases.
    pub snapshots: Vec<f64>,
}

fn riemann_case(
    name: &str,
    left: Vec4,
    right: Vec4,
    jump: f64,
    domain: (f64, f64),
    t_end: f64,
    n: usize,
) -> TestCase {
    TestCase {
        name: name.into(),
        x_lo: domain.0,
        x_hi: domain.1,
        init: InitialData::Riemann {
            left: ConservedState::from_array(left),
            right: ConservedState::from_array(right),
            jump,
        },
        t_end,
        n,
        cfl: 0.4,
        theta: 1.0,
        limiter: LimiterMode::Minmod,
        bc: Bc::Outflow,
        snapshots: vec![t_end],
    }
}

pub fn builtin_cases() -> Vec<TestCase> {
    vec![
        TestCase {
            name: "example5.1".into(),
            x_lo: 0.0,
            x_hi: 2.0 * PI,
            init: InitialData::TravellingWave,
            t_end: 3.0,
            n: 80,
            cfl: 0.4,
            theta: 1.0,
            limiter: LimiterMode::UnlimitedCentral,
            bc: Bc::Periodic,
            snapshots: vec![3.0],
        },
        riemann_case(
            "example5.2",
            [2.0, -2.0, 16.0, 2.286],
            [1.0, -1.0, 4.0, 0.57143],
            0.0,
            (-20.0, 5.0),
            2.5,
            100,
        ),
        riemann_case(
            "example5.3",
            [1.57, -1.15, 2.5, 1.90],
            [1.9, -0.58, 2.4, 2.30],
            10.0,
            (-10.0, 40.0),
            3.5,
            200,
        ),
        riemann_case(
            "example5.4",
            [1.0, -1.5, 2.2, 1.3],
            [0.125, -1.5, 0.9, 0.9],
            0.0,
            (-15.0, 10.0),
            5.0,
            100,
        ),
        riemann_case(
            "example5.5",
            [1.57, -0.95, 3.1, 1.50],
            [1.45, -1.18, 3.6, 1.10],
            0.0,
            (-10.0, 15.0),
            2.5,
            100,
        ),
        TestCase {
            name: "example5.6".into(),
            x_lo: -20.0,
            x_hi: 40.0,
            init: InitialData::Gaussian,
            t_end: 5.0,
            n: 400,
            cfl: 0.4,
            theta: 1.0,
            limiter: LimiterMode::Minmod,
            bc: Bc::Outflow,
            snapshots: vec![1.0, 2.0, 3.0, 4.0, 5.0],
        },
    ]
}

pub fn builtin_case(name: &str) -> Option<TestCase> {
    builtin_cases().into_iter().find(|c| c.name == name)
}

impl TestCase {
    pub fn scheme_config(&self, scheme: SchemeKind) -> SchemeConfig {
        SchemeConfig {
            cfl: self.cfl,
            theta: self.theta,
            limiter: self.limiter,
            scheme,
            ..SchemeConfig::default()
        }
    }

    pub fn initial_grid(&self, config: &SchemeConfig) -> Result<GridState> {
        GridState::from_initial(&self.init, self.x_lo, self.x_hi, self.n, self.bc, config)
    }
}

/// Setup of the smooth convergence study.
pub fn travelling_wave_case(n: usize) -> TestCase {
    let mut c = builtin_case("example5.1").expect("builtin");
    c.n = n;
    c
}

pub const CONVERGENCE_NS: [usize; 6] = [20, 40, 80, 160, 320, 640];

/// Minmod parameter of the MUSCL baseline in the convergence study.
pub const MUSCL_THETA: f64 = 1.5;

/// Scheme settings used by the convergence study; MUSCL always reconstructs
/// with minmod-θ slopes.
pub fn convergence_config(case: &TestCase, scheme: SchemeKind) -> SchemeConfig {
    let mut cfg = case.scheme_config(scheme);
    if scheme == SchemeKind::MusclRk2 {
        cfg.limiter = LimiterMode::Minmod;
        cfg.theta = MUSCL_THETA;
    }
    cfg
}

/// Errors of one travelling-wave run.
pub fn travelling_wave_errors(scheme: SchemeKind, n: usize) -> Result<ErrorReport> {
    let case = travelling_wave_case(n);
    let cfg = convergence_config(&case, scheme);
    let clock = Instant::now();
    let (grid, _) = run_simulation(case.initial_grid(&cfg)?, &cfg, case.t_end)?;
    let mut rep = error_norms(&grid, |x| travelling_wave_exact(x, case.t_end));
    rep.wall_seconds = clock.elapsed().as_secs_f64();
    Ok(rep)
}

/// Runs the travelling-wave study for each N on up to `threads` workers;
/// results are ordered as `ns`.
pub fn convergence_study(scheme: SchemeKind, ns: &[usize], threads: usize) -> Result<Vec<ErrorReport>> {
    let threads = threads.max(1).min(ns.len().max(1));
    let mut out: Vec<Option<Result<ErrorReport>>> = vec![None; ns.len()];
    std::thread::scope(|scope| {
        let chunks: Vec<_> = out.chunks_mut(ns.len().div_ceil(threads)).collect();
        let mut start = 0;
        for chunk in chunks {
            let ids = start..start + chunk.len();
            start += chunk.len();
            scope.spawn(move || {
                for (slot, i) in chunk.iter_mut().zip(ids) {
                    *slot = Some(travelling_wave_errors(scheme, ns[i]));
                }
            });
        }
    });
    out.into_iter().map(|r| r.expect("filled")).collect()
}

/// One line of the convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub scheme: SchemeKind,
    pub var: &'static str,
    pub norms: Norms,
    /// Orders against the previous N (None for the coarsest).
    pub orders: Option<[f64; 3]>,
    pub wall_seconds: f64,
}

pub fn convergence_rows(scheme: SchemeKind, ns: &[usize], reports: &[ErrorReport]) -> Vec<ConvergenceRow> {
    let mut rows = Vec::new();
    for (k, rep) in reports.iter().enumerate() {
        for (i, var) in VARS.iter().enumerate() {
            let cur = rep.vars[i];
            let orders = if k == 0 {
                None
            } else {
                let prev = reports[k - 1].vars[i];
                let o = |a: f64, b: f64| observed_order(a, b).unwrap_or(f64::NAN);
                Some([o(prev.l1, cur.l1), o(prev.l2, cur.l2), o(prev.linf, cur.linf)])
            };
            rows.push(ConvergenceRow {
                n: ns[k],
                scheme,
                var,
                norms: cur,
                orders,
                wall_seconds: rep.wall_seconds,
            });
        }
    }
    rows
}

/// Parameters of the fine-grid derivative oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    /// Final time of the reference solve.
    pub delta: f64,
    /// Number of cells across the domain of dependence.
    pub n_ref: usize,
    pub cfl: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self { delta: 1e-2, n_ref: 2000, cfl: 0.45 }
    }
}

/// First-order Godunov solve of the piecewise-linear problem up to `delta`,
/// returning the state on the ray x = s t at t = delta for sloped and
/// constant data. Cells outside the domain of dependence of that point are
/// frozen.
fn godunov_ray_pair(
    ul: &ConservedState,
    dul: &Vec4,
    ur: &ConservedState,
    dur: &Vec4,
    s: f64,
    p: &OracleParams,
) -> Result<(ConservedState, ConservedState)> {
    let fan = solve_star_states(ul, ur)?;
    let smax = [ul, ur, &fan.star_l, &fan.star_m, &fan.star_r]
        .iter()
        .map(|x| max_wave_speed(x))
        .fold(0.0f64, f64::max)
        * 1.05;
    let xc = s * p.delta;
    let core = smax * p.delta * 1.02 + xc.abs();
    let dx = 2.0 * core / p.n_ref as f64;
    let dt = p.cfl * dx / smax;
    let steps = (p.delta / dt).ceil() as usize;
    let dt = p.delta / steps as f64;
    // numerical signals outrun the physical cone with a binomial tail
    let margin = (6.0 * (steps as f64).sqrt()).ceil() as usize + 4;
    let n = p.n_ref + p.n_ref % 2 + 2 * margin;
    let half = 0.5 * n as f64 * dx;
    let avg = |x0: f64, x1: f64, sloped: bool| -> ConservedState {
        let xm = 0.5 * (x0 + x1);
        let (base, d) = if xm < 0.0 { (ul, dul) } else { (ur, dur) };
        if sloped {
            base.add_scaled(d, xm)
        } else {
            *base
        }
    };
    let run = |sloped: bool| -> Result<ConservedState> {
        let mut u: Vec<ConservedState> = (0..n)
            .map(|j| {
                let x0 = -half + j as f64 * dx;
                avg(x0, x0 + dx, sloped)
            })
            .collect();
        let mut fl = vec![[0.0; 4]; n + 1];
        for k in 0..steps {
            let t = k as f64 * dt;
            let reach = smax * (p.delta - t) + margin as f64 * dx;
            let lo = (((xc - reach + half) / dx).floor().max(1.0)) as usize;
            let hi = (((xc + reach + half) / dx).ceil() as usize).min(n - 1);
            for i in lo..=hi {
                let (a, b) = (&u[i - 1], &u[i]);
                fl[i] = if a == b {
                    flux(a)
                } else {
                    flux(&solve_star_states_with(a, b, Admissibility::Signs)?.sample(0.0))
                };
            }
            let r = dt / dx;
            for j in lo..hi {
                let (a, b) = (fl[j], fl[j + 1]);
                let c = &mut u[j];
                *c = ConservedState::new(
                    c.f - r * (b[0] - a[0]),
                    c.b - r * (b[1] - a[1]),
                    c.g - r * (b[2] - a[2]),
                    c.q - r * (b[3] - a[3]),
                );
            }
        }
        let pos = (xc + half) / dx - 0.5;
        let j = pos.floor() as usize;
        let w = pos - j as f64;
        let (a, b) = (u[j].to_array(), u[j + 1].to_array());
        Ok(ConservedState::from_array(std::array::from_fn(|i| (1.0 - w) * a[i] + w * b[i])))
    };
    Ok((run(true)?, run(false)?))
}

/// Directional derivative d/dt U(s t, t) at t = 0+ from the fine-grid solve.
/// The constant-data solve with identical steps is subtracted, which removes
/// most of the discretisation error of the Riemann fan itself.
pub fn fd_ray_derivative(
    ul: &ConservedState,
    dul: &Vec4,
    ur: &ConservedState,
    dur: &Vec4,
    s: f64,
    p: &OracleParams,
) -> Result<Vec4> {
    let (a, b) = godunov_ray_pair(ul, dul, ur, dur, s, p)?;
    let (a, b) = (a.to_array(), b.to_array());
    Ok(std::array::from_fn(|i| (a[i] - b[i]) / p.delta))
}

/// Reference time derivative at x = 0 of the piecewise-linear problem.
pub fn fd_derivative_oracle(
    ul: &ConservedState,
    dul: &Vec4,
    ur: &ConservedState,
    dur: &Vec4,
    p: &OracleParams,
) -> Result<Vec4> {
    fd_ray_derivative(ul, dul, ur, dur, 0.0, p)
}

/// d/dt U(s t, t) implied by a time derivative in a smooth region around `state`.
pub fn ray_derivative(state: &ConservedState, dudt: &Vec4, s: f64) -> Result<Vec4> {
    if s == 0.0 {
        return Ok(*dudt);
    }
    let ux = solve4(&jacobian(state), dudt)?;
    Ok(std::array::from_fn(|i| dudt[i] - s * ux[i]))
}

/// Dense 4×4 solve with partial pivoting.
pub fn solve4(m: &[[f64; 4]; 4], rhs: &Vec4) -> Result<Vec4> {
    let mut a = *m;
    let mut b = *rhs;
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap_or(c);
        if a[p][c] == 0.0 {
            return Err(Error::SingularSystem("4x4 pivot vanished".into()));
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..4 {
            let k = a[r][c] / a[c][c];
            for k2 in c..4 {
                a[r][k2] -= k * a[c][k2];
            }
            b[r] -= k * b[c];
        }
    }
    let mut x = [0.0; 4];
    for r in (0..4).rev() {
        let mut acc = b[r];
        for c in r + 1..4 {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Ok(x)
}

/// One data set of the derivative check.
#[derive(Debug, Clone, PartialEq)]
pub struct GrpCheckCase {
    pub name: &'static str,
    pub ul: ConservedState,
    pub dul: Vec4,
    pub ur: ConservedState,
    pub dur: Vec4,
    /// Ray x = s t along which the derivative is compared.
    pub ray: f64,
}

/// Result of one check: solver value, oracle value and per-component pass flags.
#[derive(Debug, Clone, PartialEq)]
pub struct GrpCheckResult {
    pub case: GrpCheckCase,
    pub structure: String,
    pub region: Region,
    pub solver: Vec4,
    pub oracle: Vec4,
    pub pass: [bool; 4],
}

fn st(a: Vec4) -> ConservedState {
    ConservedState::from_array(a)
}

pub fn grp_check_suite() -> Vec<GrpCheckCase> {
    vec![
        GrpCheckCase {
            name: "R1+S4 (large ratio)",
            ul: st([1.0, -1.5, 2.2, 1.3]),
            dul: [0.01; 4],
            ur: st([0.125, -1.5, 0.9, 0.9]),
            dur: [0.01; 4],
            ray: 0.0,
        },
        GrpCheckCase {
            name: "R1+R4 (two rarefactions)",
            ul: st([1.57, -1.15, 2.5, 1.90]),
            dul: [0.01; 4],
            ur: st([1.9, -0.58, 2.4, 2.30]),
            dur: [0.01; 4],
            ray: 0.0,
        },
        GrpCheckCase {
            name: "S1+S4",
            ul: st([1.0, -0.5, 2.0, 1.0]),
            dul: [0.05, 0.02, -0.03, 0.04],
            ur: st([1.5, -1.0, 1.5, 1.0]),
            dur: [-0.02, 0.03, 0.05, -0.01],
            ray: 0.0,
        },
        GrpCheckCase {
            name: "S1+R4",
            ul: st([1.0, -0.5, 1.5, 1.0]),
            dul: [0.03, -0.02, 0.04, 0.02],
            ur: st([1.4, -1.0, 1.5, 2.0]),
            dur: [0.02, 0.01, -0.03, 0.05],
            ray: 0.0,
        },
        GrpCheckCase {
            name: "R1+S4 left star region",
            ul: st([1.0, -1.5, 2.2, 1.3]),
            dul: [0.02, -0.01, 0.03, 0.01],
            ur: st([0.125, -1.5, 0.9, 0.9]),
            dur: [0.01, 0.02, -0.01, 0.02],
            ray: -0.19,
        },
        GrpCheckCase {
            name: "S1+R4 right star region",
            ul: st([1.0, -0.5, 1.5, 1.0]),
            dul: [0.03, -0.02, 0.04, 0.02],
            ur: st([1.4, -1.0, 1.5, 2.0]),
            dur: [0.02, 0.01, -0.03, 0.05],
            ray: 1.2,
        },
        GrpCheckCase {
            name: "acoustic smooth",
            ul: st([1.2, -0.8, 1.8, 1.5]),
            dul: [0.05, -0.03, 0.02, 0.04],
            ur: st([1.2, -0.8, 1.8, 1.5]),
            dur: [0.05, -0.03, 0.02, 0.04],
            ray: 0.0,
        },
        GrpCheckCase {
            name: "acoustic unequal slopes",
            ul: st([1.0, -1.0, 2.0, 2.0]),
            dul: [0.1, 0.0, 0.0, 0.0],
            ur: st([1.0, -1.0, 2.0, 2.0]),
            dur: [0.0, 0.05, -0.05, 0.1],
            ray: 0.0,
        },
    ]
}

/// Star derivatives along the ray of a check case, from the GRP solver.
pub fn grp_ray_value(case: &GrpCheckCase) -> Result<(String, Region, Vec4)> {
    let slopes = SlopeData { dul: case.dul, dur: case.dur };
    let acoustic = case.ul == case.ur;
    let (structure, region, state, d): (String, Region, ConservedState, StarDerivatives) =
        if acoustic {
            let sol = grp_interface(&case.ul, &case.dul, &case.ur, &case.dur)?;
            let d = acoustic_solve(&case.ul, &case.dul, &case.dur)?;
            ("acoustic".into(), sol.region, case.ul, d)
        } else {
            let fan = solve_star_states(&case.ul, &case.ur)?;
            let region = fan.region(case.ray);
            let d = assemble_and_solve(&fan, &slopes)?;
            (fan.describe(), region, fan.sample(case.ray), d)
        };
    let dudt = match region {
        Region::StarLeft => d.dl,
        Region::StarMiddle => d.dm,
        Region::StarRight => d.dr,
        _ => {
            return Err(Error::ConfigMismatch(format!(
                "ray {} of `{}` is not in a star region",
                case.ray, case.name
            )))
        }
    };
    Ok((structure, region, ray_derivative(&state, &dudt, case.ray)?))
}

/// Relative 5% per component, absolute 1e-6 for components below 1e-8.
pub fn components_agree(solver: &Vec4, oracle: &Vec4, rel: f64) -> [bool; 4] {
    std::array::from_fn(|i| {
        let (a, b) = (solver[i], oracle[i]);
        if a.abs() < 1e-8 || b.abs() < 1e-8 {
            (a - b).abs() <= 1e-6
        } else {
            (a - b).abs() <= rel * b.abs()
        }
    })
}

pub fn run_grp_check(p: &OracleParams) -> Result<Vec<GrpCheckResult>> {
    grp_check_suite()
        .into_iter()
        .map(|case| {
            let (structure, region, solver) = grp_ray_value(&case)?;
            let oracle = fd_ray_derivative(&case.ul, &case.dul, &case.ur, &case.dur, case.ray, p)?;
            let pass = components_agree(&solver, &oracle, 0.05);
            Ok(GrpCheckResult { case, structure, region, solver, oracle, pass })
        })
        .collect()
}
