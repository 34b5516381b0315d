//! Config parsing and the artifact-writing commands behind the `filmgrp` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{
    builtin_case, convergence_rows, convergence_study, run_grp_check, ConvergenceRow,
    GrpCheckResult, OracleParams, TestCase, CONVERGENCE_NS,
};
use crate::riemann::{solve_star_states, WaveFan, WaveKind, WaveSpeeds};
use crate::scheme::{
    run_simulation, Bc, GridState, InitialData, LimiterMode, RunLog, SchemeConfig, SchemeKind,
};
use crate::state::ConservedState;

const KEYS: [&str; 15] = [
    "case", "scheme", "N", "cfl", "theta", "limiter", "t_end", "domain_lo", "domain_hi", "bc",
    "left", "right", "jump", "profile", "output",
];

/// A validated `run` configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: TestCase,
    pub scheme: SchemeConfig,
    pub output: Option<PathBuf>,
}

fn invalid(key: &str, msg: impl Into<String>) -> Error {
    Error::Validation { key: key.to_string(), msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, msg: format!("`{key}`: cannot parse `{v}` as a number") })
}

/// Parses `f,b,g,q`.
pub fn parse_state(v: &str) -> std::result::Result<ConservedState, String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected four comma-separated numbers, got `{v}`"));
    }
    let mut a = [0.0; 4];
    for (x, p) in a.iter_mut().zip(&parts) {
        *x = p.parse().map_err(|_| format!("cannot parse `{p}` as a number"))?;
    }
    Ok(ConservedState::from_array(a))
}

fn parse_scheme(v: &str) -> Option<SchemeKind> {
    match v {
        "grp" => Some(SchemeKind::Grp2),
        "godunov" => Some(SchemeKind::Godunov),
        "muscl" => Some(SchemeKind::MusclRk2),
        _ => None,
    }
}

/// Parses `key = value` lines. Keys not given fall back to the built-in case
/// (or, for `case = custom`, to cfl 0.4, θ 1, minmod limiter, outflow boundaries).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, msg: format!("expected `key = value`, got `{content}`") })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Parse { line, msg: "missing key".into() });
        }
        if !KEYS.contains(&k) {
            return Err(invalid(k, "unknown key"));
        }
        if entries.insert(k, (line, v)).is_some() {
            return Err(invalid(k, "given more than once"));
        }
    }

    let (_, case_name) = *entries.get("case").ok_or_else(|| invalid("case", "missing mandatory key"))?;
    let mut case = if case_name == "custom" {
        TestCase {
            name: "custom".into(),
            x_lo: f64::NAN,
            x_hi: f64::NAN,
            init: InitialData::Constant(ConservedState::new(1.0, -1.0, 1.0, 1.0)),
            t_end: f64::NAN,
            n: 0,
            cfl: 0.4,
            theta: 1.0,
            limiter: LimiterMode::Minmod,
            bc: Bc::Outflow,
            snapshots: Vec::new(),
        }
    } else {
        builtin_case(case_name).ok_or_else(|| invalid("case", format!("no built-in case `{case_name}`")))?
    };
    let custom = case_name == "custom";

    let get = |k: &str| entries.get(k).copied();
    let mut scheme_kind = SchemeKind::Grp2;
    if let Some((_, v)) = get("scheme") {
        scheme_kind = parse_scheme(v).ok_or_else(|| invalid("scheme", format!("`{v}` is not grp, godunov or muscl")))?;
    }
    if let Some((line, v)) = get("N") {
        case.n = parse_num(line, "N", v)?;
    }
    if let Some((line, v)) = get("cfl") {
        case.cfl = parse_num(line, "cfl", v)?;
    }
    if let Some((line, v)) = get("theta") {
        case.theta = parse_num(line, "theta", v)?;
    }
    if let Some((_, v)) = get("limiter") {
        case.limiter = match v {
            "minmod" => LimiterMode::Minmod,
            "central" => LimiterMode::UnlimitedCentral,
            _ => return Err(invalid("limiter", format!("`{v}` is not minmod or central"))),
        };
    }
    if let Some((line, v)) = get("t_end") {
        case.t_end = parse_num(line, "t_end", v)?;
        case.snapshots.retain(|&t| t < case.t_end);
        case.snapshots.push(case.t_end);
    }
    if let Some((line, v)) = get("domain_lo") {
        case.x_lo = parse_num(line, "domain_lo", v)?;
    }
    if let Some((line, v)) = get("domain_hi") {
        case.x_hi = parse_num(line, "domain_hi", v)?;
    }
    if let Some((_, v)) = get("bc") {
        case.bc = match v {
            "periodic" => Bc::Periodic,
            "outflow" => Bc::Outflow,
            _ => return Err(invalid("bc", format!("`{v}` is not periodic or outflow"))),
        };
    }

    let state = |k: &str| -> Result<Option<ConservedState>> {
        match get(k) {
            None => Ok(None),
            Some((_, v)) => {
                let s = parse_state(v).map_err(|m| invalid(k, m))?;
                if !s.in_state_space() {
                    return Err(invalid(k, format!("{v} is outside the state space")));
                }
                Ok(Some(s))
            }
        }
    };
    let (left, right) = (state("left")?, state("right")?);
    let profile = get("profile").map(|(_, v)| v);
    match (left, right, profile) {
        (Some(_), _, Some(_)) | (_, Some(_), Some(_)) => {
            return Err(invalid("profile", "cannot be combined with left/right states"))
        }
        (Some(l), Some(r), None) => {
            let jump = match get("jump") {
                Some((line, v)) => parse_num(line, "jump", v)?,
                None => match case.init {
                    InitialData::Riemann { jump, .. } => jump,
                    _ => 0.5 * (case.x_lo + case.x_hi),
                },
            };
            case.init = InitialData::Riemann { left: l, right: r, jump };
        }
        (Some(_), None, None) => return Err(invalid("right", "missing while `left` is given")),
        (None, Some(_), None) => return Err(invalid("left", "missing while `right` is given")),
        (None, None, Some(p)) => {
            case.init = match p {
                "travelling_wave" => InitialData::TravellingWave,
                "gaussian" => InitialData::Gaussian,
                _ => return Err(invalid("profile", format!("`{p}` is not travelling_wave or gaussian"))),
            };
        }
        (None, None, None) => {
            if custom {
                return Err(invalid("left", "custom cases need left/right states or a profile"));
            }
            if get("jump").is_some() {
                return Err(invalid("jump", "only meaningful together with left/right states"));
            }
        }
    }

    if custom {
        for k in ["N", "t_end", "domain_lo", "domain_hi"] {
            if get(k).is_none() {
                return Err(invalid(k, "required for custom cases"));
            }
        }
    }
    if case.n < 2 {
        return Err(invalid("N", "must be at least 2"));
    }
    if !(case.t_end > 0.0 && case.t_end.is_finite()) {
        return Err(invalid("t_end", "must be positive"));
    }
    if !(case.x_lo.is_finite() && case.x_hi.is_finite()) {
        return Err(invalid("domain_lo", "domain bounds must be finite"));
    }
    if !(case.x_lo < case.x_hi) {
        return Err(invalid("domain_hi", "must exceed domain_lo"));
    }
    if let InitialData::Riemann { jump, .. } = case.init {
        if !(jump > case.x_lo && jump < case.x_hi) {
            return Err(invalid("jump", "must lie inside the domain"));
        }
    }
    let scheme = SchemeConfig {
        cfl: case.cfl,
        theta: case.theta,
        limiter: case.limiter,
        scheme: scheme_kind,
        ..SchemeConfig::default()
    };
    scheme.validate()?;
    let output = get("output").map(|(_, v)| PathBuf::from(v));
    Ok(RunConfig { case, scheme, output })
}

/// Shortest round-trip decimal form of `x`, in exponent notation outside [1e-5, 1e16).
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(",")
}

pub fn solution_csv(grid: &GridState) -> String {
    let mut s = String::from("x,f,b,g,q\n");
    for (j, u) in grid.averages.iter().enumerate() {
        let _ = writeln!(s, "{},{}", fmt_num(grid.cell_center(j)), fmt_vec(&u.to_array()));
    }
    s
}

fn limiter_name(l: LimiterMode) -> &'static str {
    match l {
        LimiterMode::Minmod => "minmod",
        LimiterMode::UnlimitedCentral => "central",
    }
}

fn bc_name(b: Bc) -> &'static str {
    match b {
        Bc::Periodic => "periodic",
        Bc::Outflow => "outflow",
    }
}

fn run_metadata(cfg: &RunConfig, grid: &GridState, log: &RunLog, steps: usize) -> String {
    let c = &cfg.case;
    let s = &cfg.scheme;
    let mut m = String::new();
    let _ = writeln!(m, "case = {}", c.name);
    let _ = writeln!(m, "scheme = {}", s.scheme.name());
    let _ = writeln!(m, "N = {}", c.n);
    let _ = writeln!(m, "cfl = {}", fmt_num(s.cfl));
    let _ = writeln!(m, "theta = {}", fmt_num(s.theta));
    let _ = writeln!(m, "limiter = {}", limiter_name(s.limiter));
    let _ = writeln!(m, "bc = {}", bc_name(c.bc));
    let _ = writeln!(m, "domain = {},{}", fmt_num(c.x_lo), fmt_num(c.x_hi));
    let _ = writeln!(m, "t_end = {}", fmt_num(grid.t));
    let _ = writeln!(m, "steps = {steps}");
    let _ = writeln!(m, "wall_seconds = {}", fmt_num(log.wall_seconds));
    let _ = writeln!(m, "totals_start = {}", fmt_vec(&log.totals_start));
    let _ = writeln!(m, "totals_end = {}", fmt_vec(&log.totals_end));
    let _ = writeln!(m, "zeroed_slopes = {}", grid.diagnostics.zeroed_slopes);
    let _ = writeln!(m, "violations = {}", grid.diagnostics.violations);
    if let InitialData::Riemann { left, right, .. } = c.init {
        if let Ok(fan) = solve_star_states(&left, &right) {
            let _ = writeln!(m, "structure = {}", fan.describe());
        }
    }
    m
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn snapshot_path(path: &Path, t: f64) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("solution");
    path.with_file_name(format!("{stem}_t{}.csv", fmt_num(t)))
}

/// Runs the configured case and writes the solution CSV and its `.meta`
/// sidecar; intermediate snapshot times get their own files. Returns the
/// paths written.
pub fn cmd_run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let c = &cfg.case;
    let out = cfg.output.clone().unwrap_or_else(|| {
        PathBuf::from(format!("{}_{}_N{}.csv", c.name, cfg.scheme.scheme.name(), c.n))
    });
    let mut grid = c.initial_grid(&cfg.scheme)?;
    let mut written = Vec::new();
    let mut times: Vec<f64> = c.snapshots.iter().copied().filter(|&t| t < c.t_end).collect();
    times.push(c.t_end);
    let totals_start = grid.totals();
    let (mut steps, mut wall) = (0, 0.0);
    for t in times {
        let (g, log) = run_simulation(grid, &cfg.scheme, t)?;
        grid = g;
        steps += log.steps.len();
        wall += log.wall_seconds;
        let summary = RunLog { steps: Vec::new(), totals_start, totals_end: log.totals_end, wall_seconds: wall };
        let path = if t == c.t_end { out.clone() } else { snapshot_path(&out, t) };
        write_text(&path, &solution_csv(&grid))?;
        write_text(&sidecar(&path), &run_metadata(cfg, &grid, &summary, steps))?;
        written.push(path);
    }
    Ok(written)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("N,scheme,var,L1,L1_order,L2,L2_order,Linf,Linf_order,wall_seconds\n");
    for r in rows {
        let o = |i: usize| r.orders.map(|o| fmt_num(o[i])).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.scheme.name(),
            r.var,
            fmt_num(r.norms.l1),
            o(0),
            fmt_num(r.norms.l2),
            o(1),
            fmt_num(r.norms.linf),
            o(2),
            fmt_num(r.wall_seconds)
        );
    }
    s
}

/// Worker count from `GRP_THREADS`, defaulting to the available parallelism.
pub fn worker_threads() -> usize {
    std::env::var("GRP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Travelling-wave convergence study for GRP and MUSCL; writes `convergence.csv` into `dir`.
pub fn cmd_convergence(dir: &Path, threads: usize) -> Result<(PathBuf, Vec<ConvergenceRow>)> {
    let mut rows = Vec::new();
    for scheme in [SchemeKind::Grp2, SchemeKind::MusclRk2] {
        let reps = convergence_study(scheme, &CONVERGENCE_NS, threads)?;
        rows.extend(convergence_rows(scheme, &CONVERGENCE_NS, &reps));
    }
    let path = dir.join("convergence.csv");
    write_text(&path, &convergence_csv(&rows))?;
    Ok((path, rows))
}

fn wave_line(name: &str, kind: WaveKind, w: &WaveSpeeds, strength: f64) -> String {
    let k = match kind {
        WaveKind::Rarefaction => "rarefaction",
        WaveKind::Shock => "shock",
    };
    let zero = if strength == 0.0 { " (zero strength)" } else { "" };
    match *w {
        WaveSpeeds::Fan { lo, hi } => format!("{name} = {k} [{}, {}]{zero}", fmt_num(lo), fmt_num(hi)),
        WaveSpeeds::Jump(s) => format!("{name} = {k} speed {}{zero}", fmt_num(s)),
    }
}

/// Plain-text description of a solved fan.
pub fn riemann_summary(fan: &WaveFan) -> String {
    let st = fan.strengths();
    let zero = |x: f64| if x == 0.0 { " (zero strength)" } else { "" };
    let mut m = String::new();
    let _ = writeln!(m, "structure = {}", fan.describe());
    let _ = writeln!(m, "u_star = {}", fmt_num(fan.ustar));
    let _ = writeln!(m, "v_star = {}", fmt_num(fan.vstar));
    let _ = writeln!(m, "star_left = {}", fmt_vec(&fan.star_l.to_array()));
    let _ = writeln!(m, "star_middle = {}", fmt_vec(&fan.star_m.to_array()));
    let _ = writeln!(m, "star_right = {}", fmt_vec(&fan.star_r.to_array()));
    let _ = writeln!(m, "{}", wave_line("wave1", fan.config.wave1, &fan.wave1, st[0]));
    let _ = writeln!(m, "contact2 = speed {}{}", fmt_num(fan.sigma2), zero(st[1]));
    let _ = writeln!(m, "contact3 = speed {}{}", fmt_num(fan.sigma3), zero(st[2]));
    let _ = writeln!(m, "{}", wave_line("wave4", fan.config.wave4, &fan.wave4, st[3]));
    let _ = writeln!(m, "strengths = {}", fmt_vec(&st));
    m
}

/// Exact solution at time `t`, sampled at `samples` points spread evenly over
/// `[x_lo, x_hi]` (cell-centred).
pub fn riemann_csv(fan: &WaveFan, t: f64, samples: usize, x_lo: f64, x_hi: f64) -> String {
    let mut s = String::from("x,f,b,g,q\n");
    let h = (x_hi - x_lo) / samples as f64;
    for i in 0..samples {
        let x = x_lo + (i as f64 + 0.5) * h;
        let u = fan.sample(x / t);
        let _ = writeln!(s, "{},{}", fmt_num(x), fmt_vec(&u.to_array()));
    }
    s
}

/// Sampling window covering every wave at time `t` with 25% margin.
pub fn riemann_window(fan: &WaveFan, t: f64) -> (f64, f64) {
    let lo = fan.wave1.left_edge().min(0.0);
    let hi = fan.wave4.right_edge().max(0.0);
    let pad = 0.25 * (hi - lo).max(1e-3);
    ((lo - pad) * t, (hi + pad) * t)
}

/// Solves the Riemann problem, writes the sampled CSV to `out` with the
/// summary as sidecar, and returns the summary.
pub fn cmd_riemann(
    left: &ConservedState,
    right: &ConservedState,
    t: f64,
    samples: usize,
    out: &Path,
) -> Result<String> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("time", "must be positive"));
    }
    if samples == 0 {
        return Err(invalid("samples", "must be positive"));
    }
    let fan = solve_star_states(left, right)?;
    let (lo, hi) = riemann_window(&fan, t);
    let summary = riemann_summary(&fan);
    write_text(out, &riemann_csv(&fan, t, samples, lo, hi))?;
    write_text(&sidecar(out), &format!("time = {}\n{summary}", fmt_num(t)))?;
    Ok(summary)
}

pub fn grp_check_csv(results: &[GrpCheckResult]) -> String {
    let mut s = String::from("case,structure,region,ray,component,solver,oracle,rel_error,pass\n");
    for r in results {
        for i in 0..4 {
            let (a, b) = (r.solver[i], r.oracle[i]);
            let rel = if b != 0.0 { (a - b).abs() / b.abs() } else { (a - b).abs() };
            let _ = writeln!(
                s,
                "{},{},{:?},{},{},{},{},{},{}",
                r.case.name,
                r.structure,
                r.region,
                fmt_num(r.case.ray),
                ["f", "b", "g", "q"][i],
                fmt_num(a),
                fmt_num(b),
                fmt_num(rel),
                r.pass[i]
            );
        }
    }
    s
}

/// Runs the derivative check suite and writes `grp_check.csv` into `dir`.
pub fn cmd_grp_check(dir: &Path) -> Result<(PathBuf, Vec<GrpCheckResult>)> {
    let results = run_grp_check(&OracleParams::default())?;
    let path = dir.join("grp_check.csv");
    write_text(&path, &grp_check_csv(&results))?;
    Ok((path, results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_case_with_overrides() {
        let c = parse_config("case = example5.4\nscheme = grp\nN = 100").unwrap();
        assert_eq!(c.case.n, 100);
        assert_eq!(c.case.name, "example5.4");
        assert_eq!(c.scheme.scheme, SchemeKind::Grp2);
        assert_eq!(c.scheme.cfl, 0.4);
        assert_eq!(c.scheme.theta, 1.0);
        assert_eq!(c.case.bc, Bc::Outflow);
    }

    #[test]
    fn theta_out_of_range() {
        let e = parse_config("case = example5.4\ntheta = 2.5").unwrap_err();
        assert!(matches!(e, Error::Validation { ref key, .. } if key == "theta"), "{e}");
    }

    #[test]
    fn case_is_mandatory() {
        let e = parse_config("").unwrap_err();
        assert!(matches!(e, Error::Validation { ref key, .. } if key == "case"));
        let e = parse_config("# only a comment\nN = 10\n").unwrap_err();
        assert!(matches!(e, Error::Validation { ref key, .. } if key == "case"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let e = parse_config("case = example5.2\n\nN 100\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, msg: "expected `key = value`, got `N 100`".into() });
        let e = parse_config("case = example5.2\ncfl = fast\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        let e = parse_config("case = example5.2\ncolour = red\n").unwrap_err();
        assert!(matches!(e, Error::Validation { ref key, .. } if key == "colour"));
        let e = parse_config("case = example5.2\nN = 10\nN = 20\n").unwrap_err();
        assert!(matches!(e, Error::Validation { ref key, .. } if key == "N"));
    }

    #[test]
    fn custom_riemann_case() {
        let c = parse_config(
            "case = custom  # inline comment\nleft = 1,-1,2,2\nright = 1,-1,2,2\nN = 10\nt_end = 0.5\ndomain_lo = -1\ndomain_hi = 1\n",
        )
        .unwrap();
        assert_eq!(c.case.bc, Bc::Outflow);
        assert_eq!(c.scheme.limiter, LimiterMode::Minmod);
        assert!(matches!(c.case.init, InitialData::Riemann { jump, .. } if jump == 0.0));
        let e = parse_config("case = custom\nleft = 1,-1,2,2\nN = 10\nt_end = 1\ndomain_lo = 0\ndomain_hi = 1\n")
            .unwrap_err();
        assert!(matches!(e, Error::Validation { ref key, .. } if key == "right"));
        let e = parse_config("case = custom\nprofile = gaussian\nN = 10\ndomain_lo = 0\ndomain_hi = 1\n").unwrap_err();
        assert!(matches!(e, Error::Validation { ref key, .. } if key == "t_end"));
    }

    #[test]
    fn state_outside_space_rejected() {
        let e = parse_config("case = example5.2\nleft = 1,1,2,2\nright = 1,-1,2,2\n").unwrap_err();
        assert!(matches!(e, Error::Validation { ref key, .. } if key == "left"));
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-9, 6.02e23, 0.0, 123456.789, 1e-5] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(2.5e-9), "2.5e-9");
    }

    #[test]
    fn constant_riemann_summary() {
        let s = ConservedState::new(1.0, -1.0, 2.0, 2.0);
        let fan = solve_star_states(&s, &s).unwrap();
        let text = riemann_summary(&fan);
        assert_eq!(text.matches("zero strength").count(), 4, "{text}");
    }
}
