#![allow(dead_code)]

use filmgrp::riemann::{rh_residual, WaveFan, WaveKind, WaveSpeeds};
use filmgrp::state::{flux, to_invariants, ConservedState};

/// Interior state of the state space built from (f, -b, g) and the ratio v/|u| > 1.
pub fn interior_state(f: f64, minus_b: f64, g: f64, ratio: f64) -> ConservedState {
    let u = -f * minus_b;
    let q = ratio * u.abs() / g;
    ConservedState::new(f, -minus_b, g, q)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Rankine–Hugoniot, Lax, invariant and ordering checks on a solved fan.
pub fn validate_fan(fan: &WaveFan) -> Result<(), String> {
    for (l, r, s) in fan.discontinuities() {
        let scale = flux(&l)
            .iter()
            .chain(flux(&r).iter())
            .map(|x| x.abs())
            .chain(l.to_array().iter().chain(r.to_array().iter()).map(|x| (s * x).abs()))
            .fold(1.0f64, f64::max);
        let res = rh_residual(&l, &r, s);
        if res.iter().any(|x| x.abs() > 1e-10 * scale) {
            return Err(format!("RH residual {res:?} at speed {s}"));
        }
    }
    let ul = fan.ul.u();
    let (ur, vr) = (fan.ur.u(), fan.ur.v());
    let (us, vs) = (fan.ustar, fan.vstar);
    if let WaveSpeeds::Jump(s) = fan.wave1 {
        if !(1.5 * us < s && s < 1.5 * ul) {
            return Err(format!("1-shock Lax condition fails: {s}"));
        }
    }
    if let WaveSpeeds::Jump(s) = fan.wave4 {
        if !(ur + 1.5 * vr < s && s < us + 1.5 * vs) {
            return Err(format!("4-shock Lax condition fails: {s}"));
        }
    }
    let il = to_invariants(&fan.ul).map_err(|e| e.to_string())?;
    let ir = to_invariants(&fan.ur).map_err(|e| e.to_string())?;
    let sl = to_invariants(&fan.star_l).map_err(|e| e.to_string())?;
    let sr = to_invariants(&fan.star_r).map_err(|e| e.to_string())?;
    let tol = 1e-10;
    let mut checks = vec![
        ("xi across wave 1", il.xi, sl.xi),
        ("tau across wave 1", il.tau, sl.tau),
        ("u across contacts", sl.u, sr.u),
        ("v across contacts", sl.v, sr.v),
        ("u across wave 4", sr.u, ir.u),
        ("xi across wave 4", sr.xi, ir.xi),
        ("tau across wave 4", sr.tau, ir.tau),
    ];
    if fan.config.wave1 == WaveKind::Rarefaction {
        checks.push(("eta across R1", il.eta, sl.eta));
    }
    for (what, a, b) in checks {
        if !close(a, b, tol) {
            return Err(format!("{what}: {a} vs {b}"));
        }
    }
    let (c_lo, c_hi) = fan.contact_speeds();
    if !(fan.wave1.right_edge() <= c_lo && c_hi <= fan.wave4.left_edge()) {
        return Err("wave ordering".into());
    }
    if fan.config.wave1 == WaveKind::Rarefaction && us < ul {
        return Err("R1 with u* < u_L".into());
    }
    if fan.config.wave4 == WaveKind::Rarefaction && vs > vr * (1.0 + 1e-12) {
        return Err("R4 with v* > v_R".into());
    }
    Ok(())
}
