//! Exact Riemann solver.
//!
//! The solution consists of a 1-wave, two contacts and a 4-wave. `u = fb` is
//! continuous across the last three waves, so `u* = f_R b_R` and the star
//! problem reduces to a scalar equation for `v* = g* q*`.

use crate::error::{Error, Result};
use crate::state::{
    flux, from_primitive_invariants, to_invariants, v_from_eta, ConservedState, InvariantState,
    Vec4,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Rarefaction,
    Shock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveConfig {
    pub wave1: WaveKind,
    pub wave4: WaveKind,
}

/// Location of a nonlinear wave in the similarity coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveSpeeds {
    /// Rarefaction fan between its left and right edge speeds.
    Fan { lo: f64, hi: f64 },
    /// Discontinuity travelling at the given speed.
    Jump(f64),
}

impl WaveSpeeds {
    pub fn left_edge(&self) -> f64 {
        match *self {
            WaveSpeeds::Fan { lo, .. } => lo,
            WaveSpeeds::Jump(s) => s,
        }
    }

    pub fn right_edge(&self) -> f64 {
        match *self {
            WaveSpeeds::Fan { hi, .. } => hi,
            WaveSpeeds::Jump(s) => s,
        }
    }
}

/// Which data are accepted by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Admissibility {
    /// Data and star states in the closed state space (fb + gq >= 0).
    #[default]
    Strict,
    /// Only the sign conditions f, g, q > 0, b < 0; the wave ordering is checked instead.
    Signs,
}

/// Constant region of the self-similar solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Left,
    Fan1,
    StarLeft,
    StarMiddle,
    StarRight,
    Fan4,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFan {
    pub ul: ConservedState,
    pub ur: ConservedState,
    pub star_l: ConservedState,
    pub star_m: ConservedState,
    pub star_r: ConservedState,
    pub config: WaveConfig,
    pub wave1: WaveSpeeds,
    pub sigma2: f64,
    pub sigma3: f64,
    pub wave4: WaveSpeeds,
    pub ustar: f64,
    pub vstar: f64,
    pub inv_l: InvariantState,
    pub inv_r: InvariantState,
}

const ZERO_STRENGTH: f64 = 1e-14;

impl WaveFan {
    /// True when u* + v* < 0, so the 3-contact travels left of the 2-contact.
    pub fn contacts_swapped(&self) -> bool {
        self.sigma3 < self.sigma2
    }

    pub fn contact_speeds(&self) -> (f64, f64) {
        (self.sigma2.min(self.sigma3), self.sigma2.max(self.sigma3))
    }

    pub fn region(&self, s: f64) -> Region {
        let (c_lo, c_hi) = self.contact_speeds();
        match self.wave1 {
            WaveSpeeds::Fan { lo, hi } => {
                if s < lo {
                    return Region::Left;
                }
                if s < hi {
                    return Region::Fan1;
                }
            }
            WaveSpeeds::Jump(sig) => {
                if s < sig {
                    return Region::Left;
                }
            }
        }
        if s < c_lo {
            return Region::StarLeft;
        }
        if s < c_hi {
            return Region::StarMiddle;
        }
        match self.wave4 {
            WaveSpeeds::Fan { lo, hi } => {
                if s < lo {
                    Region::StarRight
                } else if s < hi {
                    Region::Fan4
                } else {
                    Region::Right
                }
            }
            WaveSpeeds::Jump(sig) => {
                if s < sig {
                    Region::StarRight
                } else {
                    Region::Right
                }
            }
        }
    }

    /// State of the self-similar solution at x/t = s.
    pub fn sample(&self, s: f64) -> ConservedState {
        match self.region(s) {
            Region::Left => self.ul,
            Region::StarLeft => self.star_l,
            Region::StarMiddle => self.star_m,
            Region::StarRight => self.star_r,
            Region::Right => self.ur,
            Region::Fan1 => {
                let u = 2.0 * s / 3.0;
                let w = &self.inv_l;
                v_from_eta(u, w.eta, w.v)
                    .and_then(|v| from_primitive_invariants(u, w.xi, w.tau, v))
                    .unwrap_or(self.star_l)
            }
            Region::Fan4 => {
                let v = 2.0 * (s - self.ustar) / 3.0;
                let g = (v * self.inv_r.tau).sqrt();
                ConservedState::new(self.ur.f, self.ur.b, g, g / self.inv_r.tau)
            }
        }
    }

    /// Short description such as `R1 + J2 + J3 + S4`.
    pub fn describe(&self) -> String {
        let w1 = match self.config.wave1 {
            WaveKind::Rarefaction => "R1",
            WaveKind::Shock => "S1",
        };
        let w4 = match self.config.wave4 {
            WaveKind::Rarefaction => "R4",
            WaveKind::Shock => "S4",
        };
        if self.contacts_swapped() {
            format!("{w1} + J3 + J2 + {w4}")
        } else {
            format!("{w1} + J2 + J3 + {w4}")
        }
    }

    /// Strengths (u* - u_L, xi_R - xi_L, tau_R - tau_L, v_R - v*) of the four waves.
    pub fn strengths(&self) -> Vec4 {
        [
            self.ustar - self.inv_l.u,
            self.inv_r.xi - self.inv_l.xi,
            self.inv_r.tau - self.inv_l.tau,
            self.inv_r.v - self.vstar,
        ]
    }

    /// Discontinuities as (left state, right state, speed).
    pub fn discontinuities(&self) -> Vec<(ConservedState, ConservedState, f64)> {
        let mut out = Vec::with_capacity(4);
        if let WaveSpeeds::Jump(s) = self.wave1 {
            out.push((self.ul, self.star_l, s));
        }
        if self.contacts_swapped() {
            out.push((self.star_l, self.star_m, self.sigma3));
            out.push((self.star_m, self.star_r, self.sigma2));
        } else {
            out.push((self.star_l, self.star_m, self.sigma2));
            out.push((self.star_m, self.star_r, self.sigma3));
        }
        if let WaveSpeeds::Jump(s) = self.wave4 {
            out.push((self.star_r, self.ur, s));
        }
        out
    }
}

pub fn solve_star_states(ul: &ConservedState, ur: &ConservedState) -> Result<WaveFan> {
    solve_star_states_with(ul, ur, Admissibility::Strict)
}

pub fn solve_star_states_with(
    ul: &ConservedState,
    ur: &ConservedState,
    adm: Admissibility,
) -> Result<WaveFan> {
    let accept = |s: &ConservedState| match adm {
        Admissibility::Strict => s.in_state_space(),
        Admissibility::Signs => s.has_admissible_signs(),
    };
    for (side, s) in [("left", ul), ("right", ur)] {
        if !accept(s) {
            return Err(Error::DomainError(format!("{side} state {s:?}")));
        }
    }
    let inv_l = to_invariants(ul)?;
    let inv_r = to_invariants(ur)?;
    let ustar = ur.f * ur.b;
    let f1 = (ustar * inv_l.xi).sqrt();
    let b1 = ustar / f1;

    let weak1 = (ustar - inv_l.u).abs() <= ZERO_STRENGTH * inv_l.u.abs().max(1.0);
    let (vstar, wave1, kind1) = if ustar >= inv_l.u || weak1 {
        let v = v_from_eta(ustar, inv_l.eta, inv_l.v)?;
        (
            v,
            WaveSpeeds::Fan { lo: 1.5 * inv_l.u, hi: 1.5 * ustar },
            WaveKind::Rarefaction,
        )
    } else {
        let g = shock1_g(ul, &inv_l, ustar, f1)?;
        let sigma = ul.b * (ul.f * ul.f + ul.f * f1 + f1 * f1) / (2.0 * ul.f);
        (g * g / inv_l.tau, WaveSpeeds::Jump(sigma), WaveKind::Shock)
    };

    let g_l = (vstar * inv_l.tau).sqrt();
    let g_r = (vstar * inv_r.tau).sqrt();
    let star_l = ConservedState::new(f1, b1, g_l, g_l / inv_l.tau);
    let star_r = ConservedState::new(ur.f, ur.b, g_r, g_r / inv_r.tau);
    let sigma2 = 0.5 * ustar;
    let sigma3 = ustar + 0.5 * vstar;
    let star_m = if sigma3 < sigma2 {
        ConservedState::new(star_l.f, star_l.b, star_r.g, star_r.q)
    } else {
        ConservedState::new(ur.f, ur.b, star_l.g, star_l.q)
    };

    let weak4 = (vstar - inv_r.v).abs() <= ZERO_STRENGTH * inv_r.v.max(1.0);
    let (wave4, kind4) = if vstar <= inv_r.v || weak4 {
        (
            WaveSpeeds::Fan { lo: ustar + 1.5 * vstar, hi: ustar + 1.5 * inv_r.v },
            WaveKind::Rarefaction,
        )
    } else {
        let s = ustar + star_r.q * (g_r * g_r + g_r * ur.g + ur.g * ur.g) / (2.0 * g_r);
        (WaveSpeeds::Jump(s), WaveKind::Shock)
    };

    let fan = WaveFan {
        ul: *ul,
        ur: *ur,
        star_l,
        star_m,
        star_r,
        config: WaveConfig { wave1: kind1, wave4: kind4 },
        wave1,
        sigma2,
        sigma3,
        wave4,
        ustar,
        vstar,
        inv_l,
        inv_r,
    };

    for s in [&fan.star_l, &fan.star_m, &fan.star_r] {
        if !accept(s) {
            return Err(Error::DomainError(format!("star state {s:?}")));
        }
    }
    let (c_lo, c_hi) = fan.contact_speeds();
    if !(fan.wave1.right_edge() <= c_lo && c_hi <= fan.wave4.left_edge()) {
        return Err(Error::DomainError(format!(
            "wave ordering violated for {ul:?} | {ur:?}"
        )));
    }
    if let WaveSpeeds::Jump(s) = fan.wave1 {
        if !(1.5 * ustar < s && s < 1.5 * inv_l.u) {
            return Err(Error::DomainError(format!("1-shock violates Lax condition: {s}")));
        }
    }
    if let WaveSpeeds::Jump(s) = fan.wave4 {
        if !(inv_r.u + 1.5 * inv_r.v < s && s < ustar + 1.5 * vstar) {
            return Err(Error::DomainError(format!("4-shock violates Lax condition: {s}")));
        }
    }
    Ok(fan)
}

/// Film height g behind a 1-shock reaching u = ustar, on the branch that
/// continues the weak-shock limit g = g_L.
fn shock1_g(ul: &ConservedState, inv: &InvariantState, ustar: f64, fstar: f64) -> Result<f64> {
    let (f, b, g0, tau) = (ul.f, ul.b, ul.g, inv.tau);
    let k = 2.0 * f / (b * (f * f + f * fstar + fstar * fstar));
    let a = k / (2.0 * tau);
    let c = k * ustar - 1.0;
    let d = g0 - k * (g0 * g0 * g0 / (2.0 * tau) + inv.u * g0);
    let h = |g: f64| (a * g * g + c) * g + d;
    let dh = |g: f64| 3.0 * a * g * g + c;
    let scale = |g: f64| {
        [
            1.0,
            g0,
            g,
            (a * g * g * g).abs(),
            (k * ustar * g).abs(),
            (k * g0 * g0 * g0 / (2.0 * tau)).abs(),
            (k * inv.u * g0).abs(),
        ]
        .into_iter()
        .fold(0.0f64, f64::max)
    };

    if !(a < 0.0) {
        return Err(Error::NoRoot(format!("1-shock cubic has leading coefficient {a}")));
    }
    let mut lo = if c > 0.0 { (c / (-3.0 * a)).sqrt() } else { 0.0 };
    if h(lo) < 0.0 {
        return Err(Error::NoRoot("1-shock cubic has no positive decreasing root".into()));
    }
    let mut hi = (2.0 * lo).max(g0).max(1e-300);
    let mut n = 0;
    while h(hi) >= 0.0 {
        lo = hi;
        hi *= 2.0;
        n += 1;
        if n > 2000 {
            return Err(Error::NoRoot("1-shock cubic bracket expansion failed".into()));
        }
    }
    let mut g = if g0 > lo && g0 < hi { g0 } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let hg = h(g);
        if hg.abs() <= 1e-13 * scale(g) {
            return Ok(g);
        }
        if hg > 0.0 {
            lo = g;
        } else {
            hi = g;
        }
        let slope = dh(g);
        let newton = g - hg / slope;
        g = if slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            let hg = h(g);
            if hg.abs() <= 1e-13 * scale(g) {
                return Ok(g);
            }
            break;
        }
    }
    Err(Error::NoRoot("1-shock cubic did not converge".into()))
}

/// sigma (Ur - Ul) - (F(Ur) - F(Ul)).
pub fn rh_residual(ul: &ConservedState, ur: &ConservedState, sigma: f64) -> Vec4 {
    let (fl, fr) = (flux(ul), flux(ur));
    let (a, b) = (ul.to_array(), ur.to_array());
    let mut r = [0.0; 4];
    for i in 0..4 {
        r[i] = sigma * (b[i] - a[i]) - (fr[i] - fl[i]);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(f: f64, b: f64, g: f64, q: f64) -> ConservedState {
        ConservedState::new(f, b, g, q)
    }

    #[test]
    fn constant_data_gives_trivial_fan() {
        let u = s(1.0, -1.0, 2.0, 2.0);
        let fan = solve_star_states(&u, &u).unwrap();
        assert_eq!(fan.config.wave1, WaveKind::Rarefaction);
        assert_eq!(fan.config.wave4, WaveKind::Rarefaction);
        for st in [fan.star_l, fan.star_m, fan.star_r] {
            for (a, b) in st.to_array().iter().zip(u.to_array()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
        for x in [-10.0, -1.5, -0.5, 0.0, 1.0, 5.0, 10.0] {
            let w = fan.sample(x);
            for (a, b) in w.to_array().iter().zip(u.to_array()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn example_5_4_structure() {
        let fan = solve_star_states(&s(1.0, -1.5, 2.2, 1.3), &s(0.125, -1.5, 0.9, 0.9)).unwrap();
        assert_eq!(fan.ustar, -0.1875);
        assert_eq!(fan.config.wave1, WaveKind::Rarefaction);
        assert_eq!(fan.config.wave4, WaveKind::Shock);
        assert!((fan.vstar - 1.307).abs() < 2e-3);
        assert_eq!(fan.describe(), "R1 + J2 + J3 + S4");
    }

    #[test]
    fn example_5_3_structure() {
        let fan =
            solve_star_states(&s(1.57, -1.15, 2.5, 1.90), &s(1.9, -0.58, 2.4, 2.30)).unwrap();
        assert_eq!(fan.describe(), "R1 + J2 + J3 + R4");
    }

    #[test]
    fn shock_and_contact_residuals_vanish() {
        let fan = solve_star_states(&s(1.0, -1.5, 2.2, 1.3), &s(0.125, -1.5, 0.9, 0.9)).unwrap();
        for (l, r, sp) in fan.discontinuities() {
            let res = rh_residual(&l, &r, sp);
            assert!(res.iter().all(|x| x.abs() < 1e-12), "{res:?}");
        }
    }

    #[test]
    fn contact_ties_return_right_state() {
        let fan = solve_star_states(&s(1.0, -1.5, 2.2, 1.3), &s(0.125, -1.5, 0.9, 0.9)).unwrap();
        assert_eq!(fan.sample(fan.sigma2), fan.star_m);
        assert_eq!(fan.sample(fan.sigma3), fan.star_r);
    }

    #[test]
    fn shock1_branch() {
        let ul = s(1.0, -0.5, 2.0, 1.0);
        let ur = s(1.5, -1.0, 1.5, 1.0);
        let fan = solve_star_states(&ul, &ur).unwrap();
        assert_eq!(fan.config.wave1, WaveKind::Shock);
        let res = rh_residual(&fan.ul, &fan.star_l, fan.wave1.left_edge());
        assert!(res.iter().all(|x| x.abs() < 1e-12), "{res:?}");
    }

    #[test]
    fn rejects_data_outside_state_space() {
        let bad = s(1.0, 1.0, 2.0, 2.0);
        let good = s(1.0, -1.0, 2.0, 2.0);
        assert!(matches!(solve_star_states(&bad, &good), Err(Error::DomainError(_))));
    }
}
