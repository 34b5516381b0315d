//! Generalized Riemann problem: instantaneous time derivatives at the
//! singularity for piecewise-linear data.
//!
//! Unknowns are the time derivatives in the star regions. They are obtained
//! from three 2×2 blocks: `(f, b)` on both sides of the contacts, then
//! `(g, q)` left of the contacts, then `(g, q)` right of the contacts.

use crate::error::{Error, Result};
use crate::riemann::{
    solve_star_states_with, Admissibility, Region, WaveFan, WaveKind,
};
use crate::state::{
    from_primitive_invariants, jacobian, mat_vec, to_invariants, ConservedState, Vec4,
};

/// Spatial slopes of the data on either side of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlopeData {
    pub dul: Vec4,
    pub dur: Vec4,
}

/// Time derivatives in the regions left of, between and right of the contacts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StarDerivatives {
    pub dl: Vec4,
    pub dm: Vec4,
    pub dr: Vec4,
}

/// Spatial derivatives of (u, ξ, τ, v, η).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantSlopes {
    pub u: f64,
    pub xi: f64,
    pub tau: f64,
    pub v: f64,
    pub eta: f64,
}

/// Time derivatives of (ξ, τ, η, u) from the diagonal form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantTimeDerivs {
    pub xi: f64,
    pub tau: f64,
    pub eta: f64,
    pub u: f64,
}

/// Three linear relations `matrix · U_t = rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRows {
    pub matrix: [Vec4; 3],
    pub rhs: [f64; 3],
}

/// Coefficients of the third 1-shock relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockCoefficients {
    /// ϑ₁, ϑ₂, ϑ₃ behind the shock.
    pub theta_star: [f64; 3],
    /// ϑ₁, ϑ₂, ϑ₃ ahead of the shock.
    pub theta_data: [f64; 3],
    /// Δ₁ … Δ₆.
    pub delta: [f64; 6],
    /// 𝒜*, ℬ*, 𝒞*, 𝒟* multiplying the star time derivatives.
    pub star: Vec4,
    /// 𝒜, ℬ, 𝒞, 𝒟 multiplying the data time derivatives.
    pub data: Vec4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Interface value and its instantaneous time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceSolution {
    pub state: ConservedState,
    pub dudt: Vec4,
    pub region: Region,
    pub acoustic: bool,
}

fn degenerate(what: &str) -> Error {
    Error::DegenerateState(what.to_string())
}

fn nonzero(x: f64, what: &str) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        Err(degenerate(what))
    } else {
        Ok(x)
    }
}

#[inline]
fn quarter_root(x: f64) -> f64 {
    x.sqrt().sqrt()
}

pub fn invariant_slopes(s: &ConservedState, ds: &Vec4) -> Result<InvariantSlopes> {
    let ConservedState { f, b, g, q } = *s;
    nonzero(b, "b = 0")?;
    nonzero(q, "q = 0")?;
    let (u, v) = (f * b, g * q);
    if !(v > 0.0) {
        return Err(degenerate("v <= 0"));
    }
    let [df, db, dg, dq] = *ds;
    let du = b * df + f * db;
    let dv = q * dg + g * dq;
    Ok(InvariantSlopes {
        u: du,
        xi: df / b - f * db / (b * b),
        tau: dg / q - g * dq / (q * q),
        v: dv,
        eta: (du + dv * (3.0 * v - u) / (4.0 * v)) / quarter_root(v),
    })
}

pub fn invariant_time_derivs(s: &ConservedState, ds: &Vec4) -> Result<InvariantTimeDerivs> {
    let d = invariant_slopes(s, ds)?;
    let (u, v) = (s.u(), s.v());
    Ok(InvariantTimeDerivs {
        xi: -0.5 * u * d.xi,
        tau: -(u + 0.5 * v) * d.tau,
        eta: -(u + 1.5 * v) * d.eta,
        u: -1.5 * u * d.u,
    })
}

/// Υ^τ_L as a function of v along the 1-rarefaction through `ul`.
pub fn upsilon_tau_left(v: f64, ul: &ConservedState) -> f64 {
    let vl = ul.v();
    let v34 = (v * v * v).sqrt().sqrt();
    v34 / vl.sqrt() * ((ul.u() + vl) / quarter_root(vl) - 2.0 * v34)
}

/// Expansion ratio of the characteristic through a fan point, identified by its value of v.
pub fn fan_expansion_ratio(side: Side, fan: &WaveFan, v: f64) -> Result<f64> {
    match side {
        Side::Left => {
            if fan.config.wave1 != WaveKind::Rarefaction {
                return Err(Error::ConfigMismatch("wave 1 is a shock".into()));
            }
            let r = fan.inv_l.v / nonzero(v, "v = 0")?;
            Ok((r * r * r).sqrt().sqrt())
        }
        Side::Right => {
            if fan.config.wave4 != WaveKind::Rarefaction {
                return Err(Error::ConfigMismatch("wave 4 is a shock".into()));
            }
            let ur = fan.inv_r.u;
            Ok((ur - 3.0 * fan.inv_r.v) / nonzero(ur - 3.0 * v, "u_R = 3v")?)
        }
    }
}

fn check_in_fan(v: f64, a: f64, b: f64) -> Result<()> {
    let (lo, hi) = (a.min(b), a.max(b));
    let tol = 1e-9 * hi.max(1.0);
    if v < lo - tol || v > hi + tol {
        return Err(Error::DomainError(format!("v = {v} outside fan [{lo}, {hi}]")));
    }
    Ok(())
}

/// Relations across the 1-rarefaction at the characteristic where v takes the given value.
pub fn rarefaction1_system(fan: &WaveFan, dul: &Vec4, v: f64) -> Result<LinearRows> {
    if fan.config.wave1 != WaveKind::Rarefaction {
        return Err(Error::ConfigMismatch("wave 1 is a shock".into()));
    }
    check_in_fan(v, fan.inv_l.v, fan.vstar)?;
    let w = &fan.inv_l;
    let (u, s) = if v == fan.vstar {
        (fan.ustar, fan.star_l)
    } else if v == w.v {
        (w.u, fan.ul)
    } else {
        let u = w.eta * quarter_root(v) - v;
        (u, from_primitive_invariants(u, w.xi, w.tau, v)?)
    };
    let d = invariant_slopes(&fan.ul, dul)?;
    let (ul, vl) = (w.u, w.v);
    let c = nonzero(3.0 * v - u, "3v = u")?;
    let umv = nonzero(u - v, "u = v")?;
    let ConservedState { f, b, g, q } = s;
    let xi_t = (u / ul).powf(1.5) * (-0.5 * ul * d.xi);
    let tau_t = (2.0 * u + v) / umv * upsilon_tau_left(v, &fan.ul) * (-0.5 * d.tau);
    let eta_t = (2.0 * u + 3.0 * v) * v / c * (3.0 * vl - ul) / (vl * vl * vl).sqrt().sqrt()
        * (-0.5 * d.eta);
    Ok(LinearRows {
        matrix: [
            [1.0 / b, -f / (b * b), 0.0, 0.0],
            [0.0, 0.0, 1.0 / q, -g / (q * q)],
            [b, f, c / (4.0 * g), c / (4.0 * q)],
        ],
        rhs: [xi_t, tau_t, eta_t],
    })
}

fn thetas(u: f64, v: f64) -> Vec4 {
    let a = 2.0 * u + 3.0 * v;
    let c = 2.0 * u + v;
    [2.0 / a, 2.0 / (a * c), 4.0 * (u + v) / (a * c), 0.0]
}

impl ShockCoefficients {
    pub fn new(fan: &WaveFan) -> Result<Self> {
        let sigma = match fan.wave1 {
            crate::riemann::WaveSpeeds::Jump(s) => s,
            _ => return Err(Error::ConfigMismatch("wave 1 is a rarefaction".into())),
        };
        let ConservedState { f: fl, b: bl, g: gl, q: ql } = fan.ul;
        let ConservedState { f: fs, b: bs, g: gs, q: qs } = fan.star_l;
        let (ul, vl) = (fl * bl, gl * ql);
        let (us, vs) = (fs * bs, gs * qs);
        nonzero(us, "u* = 0")?;
        nonzero(2.0 * us + vs, "2u* + v* = 0")?;
        nonzero(2.0 * us + 3.0 * vs, "2u* + 3v* = 0")?;
        let ts = thetas(us, vs);
        let td = thetas(ul, vl);
        let d1 = vl * gl + (ul - us) * (gl + 0.5 * gs) - fs * bl * (gl - 0.5 * gs);
        let d2 = bl * (gs + gl);
        let d3 = fl * (gs + gl) + fs * (gs - gl);
        let d4 = 2.0 * vl + ul - us - fs * bl;
        let d5 = bs * (gl + gs) + bl * (gl - gs);
        let d6 = fs * (gl + gs);

        let k = 1.0 - 4.0 * sigma / (3.0 * us);
        let w = 2.0 * sigma * ts[0] * (qs * gs * gs + 2.0 * d1) / 3.0;
        let star = [
            k * d5 + 2.0 * sigma * d6 / (3.0 * fs * fs) + w / fs,
            k * d6 + 2.0 * sigma * d5 / (3.0 * bs * bs) + w / bs,
            sigma * ts[1] * (gs * qs) * (gs * qs) + 2.0 * d1 / gs * (1.0 - sigma * ts[2]),
            gs * gs * (1.0 - sigma * ts[2]) + 2.0 * gs * sigma * d1 * ts[1],
        ];
        let kl = 1.0 - 4.0 * sigma / (3.0 * ul);
        let wl = 2.0 * sigma * td[0] * (ql * gl * gl + d4 * gl) / 3.0;
        let data = [
            d2 * kl + 2.0 * sigma * d3 / (3.0 * fl * fl) + wl / fl,
            2.0 * sigma * d2 / (3.0 * bl * bl) + d3 * kl + wl / bl,
            (gl * ql) * (gl * ql) * sigma * td[1] + (1.0 - sigma * td[2]) * d4,
            gl * gl * (1.0 - sigma * td[2] + sigma * td[1] * d4),
        ];
        Ok(Self {
            theta_star: [ts[0], ts[1], ts[2]],
            theta_data: [td[0], td[1], td[2]],
            delta: [d1, d2, d3, d4, d5, d6],
            star,
            data,
        })
    }

    /// Right side of the third relation, evaluated from the directional
    /// derivatives of the pre-shock data along the shock.
    pub fn rhs(&self, fan: &WaveFan, dul: &Vec4, sigma: f64) -> f64 {
        let jl = jacobian(&fan.ul);
        let flux_slope = mat_vec(&jl, dul);
        let mut dd = [0.0; 4];
        for i in 0..4 {
            dd[i] = sigma * dul[i] - flux_slope[i];
        }
        let gl = fan.ul.g;
        let [_, d2, d3, d4, _, _] = self.delta;
        d2 * dd[0] + d3 * dd[1] + d4 * dd[2] + gl * gl * dd[3]
    }
}

/// Relations across the 1-shock.
pub fn shock1_system(fan: &WaveFan, dul: &Vec4) -> Result<(LinearRows, ShockCoefficients)> {
    let coeffs = ShockCoefficients::new(fan)?;
    let sigma = fan.wave1.left_edge();
    let d = invariant_slopes(&fan.ul, dul)?;
    let (ul, vl) = (fan.inv_l.u, fan.inv_l.v);
    let (us, vs) = (fan.ustar, fan.vstar);
    let den = nonzero(2.0 * us + vs - 2.0 * sigma, "2u* + v* = 2σ₁")?;
    let ConservedState { f, b, g, q } = fan.star_l;
    let xi_t = (us / ul).powf(1.5) * (-0.5 * ul * d.xi);
    let tau_t = -(2.0 * us + vs) * (2.0 * ul + vl - 2.0 * sigma) / (2.0 * den) * d.tau;
    let rows = LinearRows {
        matrix: [
            [1.0 / b, -f / (b * b), 0.0, 0.0],
            [0.0, 0.0, 1.0 / q, -g / (q * q)],
            coeffs.star,
        ],
        rhs: [xi_t, tau_t, coeffs.rhs(fan, dul, sigma)],
    };
    Ok((rows, coeffs))
}

fn wave4_rows(fan: &WaveFan, dur: &Vec4, v: f64) -> Result<LinearRows> {
    let ur = &fan.ur;
    let d = invariant_slopes(ur, dur)?;
    let (u_r, v_r) = (fan.inv_r.u, fan.inv_r.v);
    let u = fan.ustar;
    let g = (v * fan.inv_r.tau).sqrt();
    let q = g / fan.inv_r.tau;
    let (f, b) = (ur.f, ur.b);
    Ok(LinearRows {
        matrix: [
            [b, f, 0.0, 0.0],
            [1.0 / b, -f / (b * b), 0.0, 0.0],
            [0.0, 0.0, 1.0 / q, -g / (q * q)],
        ],
        rhs: [
            -1.5 * u_r * d.u,
            -0.5 * u_r * d.xi,
            -0.5 * (2.0 * u + v) * (v / v_r).sqrt() * d.tau,
        ],
    })
}

/// Relations across the 4-shock, evaluated at the post-shock state.
pub fn shock4_relations(fan: &WaveFan, dur: &Vec4) -> Result<LinearRows> {
    if fan.config.wave4 != WaveKind::Shock {
        return Err(Error::ConfigMismatch("wave 4 is a rarefaction".into()));
    }
    wave4_rows(fan, dur, fan.vstar)
}

/// Relations across the 4-rarefaction at the characteristic where v takes the given value.
pub fn rarefaction4_relations(fan: &WaveFan, dur: &Vec4, v: f64) -> Result<LinearRows> {
    if fan.config.wave4 != WaveKind::Rarefaction {
        return Err(Error::ConfigMismatch("wave 4 is a shock".into()));
    }
    check_in_fan(v, fan.vstar, fan.inv_r.v)?;
    wave4_rows(fan, dur, v)
}

/// Solves a 2×2 system, rejecting pivots below 1e-14 relative.
pub fn solve2(a: [[f64; 2]; 2], r: [f64; 2]) -> Result<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = (a[0][0] * a[1][1]).abs() + (a[0][1] * a[1][0]).abs();
    if !(det.abs() > 1e-14 * scale) || !det.is_finite() {
        return Err(Error::SingularSystem(format!("2x2 determinant {det:e}")));
    }
    Ok([
        (r[0] * a[1][1] - a[0][1] * r[1]) / det,
        (a[0][0] * r[1] - a[1][0] * r[0]) / det,
    ])
}

fn middle(dl: Vec4, dr: Vec4, swapped: bool) -> Vec4 {
    if swapped {
        [dl[0], dl[1], dr[2], dr[3]]
    } else {
        [dr[0], dr[1], dl[2], dl[3]]
    }
}

/// Star-region time derivatives for a non-acoustic fan.
pub fn assemble_and_solve(fan: &WaveFan, slopes: &SlopeData) -> Result<StarDerivatives> {
    let right = wave4_rows(fan, &slopes.dur, fan.vstar)?;
    let left = match fan.config.wave1 {
        WaveKind::Rarefaction => rarefaction1_system(fan, &slopes.dul, fan.vstar)?,
        WaveKind::Shock => shock1_system(fan, &slopes.dul)?.0,
    };
    let u_t = right.rhs[0];

    let [ftr, btr] = solve2(
        [[right.matrix[0][0], right.matrix[0][1]], [right.matrix[1][0], right.matrix[1][1]]],
        [u_t, right.rhs[1]],
    )?;

    let sl = &fan.star_l;
    let [ftl, btl] = solve2(
        [[sl.b, sl.f], [left.matrix[0][0], left.matrix[0][1]]],
        [u_t, left.rhs[0]],
    )?;

    let m = &left.matrix;
    let r3 = left.rhs[2] - m[2][0] * ftl - m[2][1] * btl;
    let [gtl, qtl] = solve2([[m[1][2], m[1][3]], [m[2][2], m[2][3]]], [left.rhs[1], r3])?;

    let sr = &fan.star_r;
    let v_t = sl.q * gtl + sl.g * qtl;
    let [gtr, qtr] = solve2(
        [[sr.q, sr.g], [right.matrix[2][2], right.matrix[2][3]]],
        [v_t, right.rhs[2]],
    )?;

    let dl = [ftl, btl, gtl, qtl];
    let dr = [ftr, btr, gtr, qtr];
    Ok(StarDerivatives { dl, dm: middle(dl, dr, fan.contacts_swapped()), dr })
}

/// Star-region time derivatives when both traces equal `u0`.
pub fn acoustic_solve(u0: &ConservedState, dul: &Vec4, dur: &Vec4) -> Result<StarDerivatives> {
    let w = to_invariants(u0)?;
    let (u, v) = (w.u, w.v);
    let dl = invariant_slopes(u0, dul)?;
    let dr = invariant_slopes(u0, dur)?;
    let ConservedState { f, b, g, q } = *u0;
    let fb_rows = [[b, f], [1.0 / b, -f / (b * b)]];
    let gq_tau = [1.0 / q, -g / (q * q)];
    let u_t = -1.5 * u * dr.u;
    let c = nonzero(3.0 * v - u, "3v = u")?;
    let eta_l = -(u + 1.5 * v) * quarter_root(v) * dl.eta;
    let v_t = 4.0 * v / c * (eta_l - u_t);

    let [ftl, btl] = solve2(fb_rows, [u_t, -0.5 * u * dl.xi])?;
    let [ftr, btr] = solve2(fb_rows, [u_t, -0.5 * u * dr.xi])?;
    let [gtl, qtl] = solve2([[q, g], gq_tau], [v_t, -0.5 * (2.0 * u + v) * dl.tau])?;
    let [gtr, qtr] = solve2([[q, g], gq_tau], [v_t, -0.5 * (2.0 * u + v) * dr.tau])?;
    let dl = [ftl, btl, gtl, qtl];
    let dr = [ftr, btr, gtr, qtr];
    Ok(StarDerivatives { dl, dm: middle(dl, dr, u + v < 0.0), dr })
}

/// -DF(U) U', the time derivative of smooth data.
pub fn data_time_derivative(s: &ConservedState, ds: &Vec4) -> Vec4 {
    let r = mat_vec(&jacobian(s), ds);
    [-r[0], -r[1], -r[2], -r[3]]
}

fn pick(d: &StarDerivatives, region: Region) -> Vec4 {
    match region {
        Region::StarLeft => d.dl,
        Region::StarMiddle => d.dm,
        _ => d.dr,
    }
}

/// Interface state and time derivative in the strict state space.
pub fn grp_interface(
    ul: &ConservedState,
    dul: &Vec4,
    ur: &ConservedState,
    dur: &Vec4,
) -> Result<InterfaceSolution> {
    grp_interface_with(ul, dul, ur, dur, Admissibility::Strict)
}

pub fn grp_interface_with(
    ul: &ConservedState,
    dul: &Vec4,
    ur: &ConservedState,
    dur: &Vec4,
    adm: Admissibility,
) -> Result<InterfaceSolution> {
    let jump = ul
        .to_array()
        .iter()
        .zip(ur.to_array())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if jump <= 1e-12 * ul.max_abs().max(1.0) {
        let ok = match adm {
            Admissibility::Strict => ul.in_state_space(),
            Admissibility::Signs => ul.has_admissible_signs(),
        };
        if !ok {
            return Err(Error::DomainError(format!("trace {ul:?}")));
        }
        let (u, v) = (ul.u(), ul.v());
        let (c_lo, c_hi) = ((0.5 * u).min(u + 0.5 * v), (0.5 * u).max(u + 0.5 * v));
        let region = if 1.5 * u >= 0.0 {
            Region::Left
        } else if 0.0 < c_lo {
            Region::StarLeft
        } else if 0.0 < c_hi {
            Region::StarMiddle
        } else if 0.0 < u + 1.5 * v {
            Region::StarRight
        } else {
            Region::Right
        };
        let dudt = match region {
            Region::Left => data_time_derivative(ul, dul),
            Region::Right => data_time_derivative(ur, dur),
            r => pick(&acoustic_solve(ul, dul, dur)?, r),
        };
        return Ok(InterfaceSolution { state: *ul, dudt, region, acoustic: true });
    }

    let fan = solve_star_states_with(ul, ur, adm)?;
    let region = fan.region(0.0);
    let dudt = match region {
        Region::Left => data_time_derivative(ul, dul),
        Region::Right => data_time_derivative(ur, dur),
        Region::Fan1 | Region::Fan4 => {
            return Err(Error::Sonic(format!("fan straddles x = 0 for {ul:?} | {ur:?}")))
        }
        r => pick(&assemble_and_solve(&fan, &SlopeData { dul: *dul, dur: *dur })?, r),
    };
    Ok(InterfaceSolution { state: fan.sample(0.0), dudt, region, acoustic: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::solve_star_states;
    use approx::assert_relative_eq;

    fn st(a: [f64; 4]) -> ConservedState {
        ConservedState::from_array(a)
    }

    fn ex54() -> WaveFan {
        solve_star_states(&st([1.0, -1.5, 2.2, 1.3]), &st([0.125, -1.5, 0.9, 0.9])).unwrap()
    }

    fn ex53() -> WaveFan {
        solve_star_states(&st([1.57, -1.15, 2.5, 1.9]), &st([1.9, -0.58, 2.4, 2.3])).unwrap()
    }

    fn s1() -> WaveFan {
        solve_star_states(&st([1.0, -0.5, 2.0, 1.0]), &st([1.5, -1.0, 1.5, 1.0])).unwrap()
    }

    #[test]
    fn left_time_derivatives_by_hand() {
        let u0 = st([1.0, -1.0, 2.0, 2.0]);
        let d = invariant_time_derivs(&u0, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(d.xi, -0.5);
        assert_relative_eq!(d.u, -1.5);
        let d = invariant_time_derivs(&u0, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(d.tau, -0.5);
        let d = invariant_time_derivs(&u0, &[0.0; 4]).unwrap();
        assert_eq!([d.xi, d.tau, d.eta, d.u], [0.0; 4]);
    }

    #[test]
    fn eta_slope_matches_finite_difference() {
        let u0 = st([1.2, -0.7, 1.6, 1.1]);
        let ds = [0.3, -0.2, 0.5, 0.1];
        let eta = |s: &ConservedState| (s.u() + s.v()) / quarter_root(s.v());
        let h = 1e-6;
        let fd = (eta(&u0.add_scaled(&ds, h)) - eta(&u0.add_scaled(&ds, -h))) / (2.0 * h);
        assert_relative_eq!(invariant_slopes(&u0, &ds).unwrap().eta, fd, max_relative = 1e-8);
    }

    #[test]
    fn upsilon_values() {
        let ul = st([1.0, -1.0, 2.0, 2.0]);
        assert_relative_eq!(upsilon_tau_left(4.0, &ul), -5.0, epsilon = 1e-12);
        assert_relative_eq!(upsilon_tau_left(ul.v(), &ul), ul.u() - ul.v(), epsilon = 1e-12);
        assert!(upsilon_tau_left(1e-16, &ul).abs() < 1e-10);
    }

    #[test]
    fn fan_ratios() {
        let fan = ex54();
        assert_relative_eq!(fan_expansion_ratio(Side::Left, &fan, fan.inv_l.v).unwrap(), 1.0);
        let r = fan_expansion_ratio(Side::Left, &fan, fan.vstar).unwrap();
        assert_relative_eq!(r, (2.86 / fan.vstar).powf(0.75), max_relative = 1e-12);
        assert!((r - 1.80).abs() < 0.01, "{r}");
        assert!(matches!(fan_expansion_ratio(Side::Right, &fan, 1.0), Err(Error::ConfigMismatch(_))));
        let fan = ex53();
        assert_relative_eq!(fan_expansion_ratio(Side::Right, &fan, fan.inv_r.v).unwrap(), 1.0);
    }

    #[test]
    fn rarefaction_rows_at_data_end_are_unscaled() {
        let fan = ex53();
        let dul = [0.03, -0.02, 0.05, 0.01];
        let rows = rarefaction1_system(&fan, &dul, fan.inv_l.v).unwrap();
        let d = invariant_time_derivs(&fan.ul, &dul).unwrap();
        assert_relative_eq!(rows.rhs[0], d.xi, max_relative = 1e-12);
        assert_relative_eq!(rows.rhs[1], d.tau, max_relative = 1e-12);
        assert_relative_eq!(rows.rhs[2], quarter_root(fan.inv_l.v) * d.eta, max_relative = 1e-12);
        let zero = rarefaction1_system(&fan, &[0.0; 4], fan.vstar).unwrap();
        assert_eq!(zero.rhs, [0.0; 3]);
        assert!(rarefaction1_system(&fan, &dul, 10.0 * fan.vstar).is_err());
    }

    #[test]
    fn rarefaction4_rows_at_data_end_are_unscaled() {
        let fan = ex53();
        let dur = [0.03, -0.02, 0.05, 0.01];
        let rows = rarefaction4_relations(&fan, &dur, fan.inv_r.v).unwrap();
        let d = invariant_time_derivs(&fan.ur, &dur).unwrap();
        assert_relative_eq!(rows.rhs[0], d.u, max_relative = 1e-12);
        assert_relative_eq!(rows.rhs[1], d.xi, max_relative = 1e-12);
        assert_relative_eq!(rows.rhs[2], d.tau, max_relative = 1e-12);
    }

    #[test]
    fn wave4_systems_coincide_at_star() {
        let fan = ex53();
        let dur = [0.02, 0.01, -0.03, 0.05];
        let mut as_shock = fan;
        as_shock.config.wave4 = WaveKind::Shock;
        assert_eq!(
            rarefaction4_relations(&fan, &dur, fan.vstar).unwrap(),
            shock4_relations(&as_shock, &dur).unwrap()
        );
        assert!(shock4_relations(&fan, &dur).is_err());
        assert_eq!(shock4_relations(&as_shock, &[0.0; 4]).unwrap().rhs, [0.0; 3]);
    }

    #[test]
    fn shock_delta2_by_hand() {
        let mut fan = solve_star_states(&st([1.0, -1.0, 2.0, 2.0]), &st([1.5, -1.0, 2.0, 2.0])).unwrap();
        assert_eq!(fan.config.wave1, WaveKind::Shock);
        fan.star_l.g = 1.0;
        let c = ShockCoefficients::new(&fan).unwrap();
        assert_relative_eq!(c.delta[1], -3.0);
    }

    #[test]
    fn shock_system_homogeneous() {
        let fan = s1();
        let (rows, _) = shock1_system(&fan, &[0.0; 4]).unwrap();
        assert_eq!(rows.rhs, [0.0; 3]);
        assert!(shock1_system(&ex54(), &[0.0; 4]).is_err());
    }

    #[test]
    fn zero_slopes_give_zero_derivatives() {
        for fan in [ex53(), ex54(), s1()] {
            let d = assemble_and_solve(&fan, &SlopeData::default()).unwrap();
            assert_eq!(d, StarDerivatives::default());
        }
        let d = acoustic_solve(&st([1.0, -1.0, 2.0, 2.0]), &[0.0; 4], &[0.0; 4]).unwrap();
        assert_eq!(d, StarDerivatives::default());
    }

    #[test]
    fn contact_relations_hold() {
        let slopes = SlopeData { dul: [0.05, 0.02, -0.03, 0.04], dur: [-0.02, 0.03, 0.05, -0.01] };
        for fan in [ex53(), ex54(), s1()] {
            let d = assemble_and_solve(&fan, &slopes).unwrap();
            let (l, r) = (&fan.star_l, &fan.star_r);
            let ut = |s: &ConservedState, x: &Vec4| s.b * x[0] + s.f * x[1];
            let vt = |s: &ConservedState, x: &Vec4| s.q * x[2] + s.g * x[3];
            assert_relative_eq!(ut(l, &d.dl), ut(r, &d.dr), max_relative = 1e-12, epsilon = 1e-15);
            assert_relative_eq!(vt(l, &d.dl), vt(r, &d.dr), max_relative = 1e-12, epsilon = 1e-15);
            let m = if fan.contacts_swapped() {
                [d.dl[0], d.dl[1], d.dr[2], d.dr[3]]
            } else {
                [d.dr[0], d.dr[1], d.dl[2], d.dl[3]]
            };
            assert_eq!(d.dm, m);
        }
    }

    #[test]
    fn acoustic_smooth_data_is_lax_wendroff() {
        let x: f64 = 0.7;
        let f = 2.0 + x.sin();
        let u0 = st([f, -2.0 / f, 2.0, 1.0]);
        let slope = [x.cos(), 2.0 * x.cos() / (f * f), 0.0, 0.0];
        let exact = [x.cos(), 2.0 * x.cos() / (f * f), 0.0, 0.0];
        let d = acoustic_solve(&u0, &slope, &slope).unwrap();
        for v in [d.dl, d.dm, d.dr] {
            for i in 0..4 {
                assert!((v[i] - exact[i]).abs() < 1e-10, "{v:?}");
            }
        }
        let u0 = st([1.0, -1.0, 2.0, 2.0]);
        let slope = [0.1, 0.0, 0.0, 0.0];
        let expected = data_time_derivative(&u0, &slope);
        let d = acoustic_solve(&u0, &slope, &slope).unwrap();
        for v in [d.dl, d.dm, d.dr] {
            for i in 0..4 {
                assert_relative_eq!(v[i], expected[i], max_relative = 1e-12, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn general_path_approaches_acoustic() {
        let u0 = st([1.2, -0.8, 1.8, 1.5]);
        let slopes = SlopeData { dul: [0.05, -0.03, 0.02, 0.04], dur: [-0.02, 0.01, 0.03, -0.05] };
        let a = acoustic_solve(&u0, &slopes.dul, &slopes.dur).unwrap();
        for eps in [1e-7, -1e-7] {
            let ur = st(u0.to_array().map(|x| x * (1.0 + eps)));
            let fan = solve_star_states(&u0, &ur).unwrap();
            let g = assemble_and_solve(&fan, &slopes).unwrap();
            for (x, y) in [(g.dl, a.dl), (g.dm, a.dm), (g.dr, a.dr)] {
                for i in 0..4 {
                    assert!((x[i] - y[i]).abs() <= 1e-5 * y[i].abs().max(1e-3), "{eps}: {x:?} {y:?}");
                }
            }
        }
    }

    #[test]
    fn interface_equal_traces_zero_slope() {
        let u0 = st([1.0, -1.0, 2.0, 2.0]);
        let sol = grp_interface(&u0, &[0.0; 4], &u0, &[0.0; 4]).unwrap();
        assert!(sol.acoustic);
        assert_eq!(sol.state, u0);
        assert_eq!(sol.dudt, [0.0; 4]);
    }

    #[test]
    fn interface_picks_star_region() {
        let fan = ex54();
        let slopes = SlopeData { dul: [0.01; 4], dur: [0.01; 4] };
        let sol = grp_interface(&fan.ul, &slopes.dul, &fan.ur, &slopes.dur).unwrap();
        let d = assemble_and_solve(&fan, &slopes).unwrap();
        let expect = if fan.sigma3.max(fan.sigma2) > 0.0 { d.dm } else { d.dr };
        assert_eq!(sol.dudt, expect);
        assert_eq!(sol.state, fan.sample(0.0));
    }

    #[test]
    fn singular_block_is_rejected() {
        assert!(matches!(solve2([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0]), Err(Error::SingularSystem(_))));
        assert_eq!(solve2([[2.0, 0.0], [0.0, 4.0]], [1.0, 1.0]).unwrap(), [0.5, 0.25]);
    }
}
