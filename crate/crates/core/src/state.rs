//! State algebra: flux, Jacobian, eigenstructure, Riemann invariants and
//! state-space classification for U = (f, b, g, q).

use crate::error::{Error, Result};

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

/// Conserved variables: film heights `f`, `g` and concentration gradients `b`, `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    pub f: f64,
    pub b: f64,
    pub g: f64,
    pub q: f64,
}

impl ConservedState {
    pub const fn new(f: f64, b: f64, g: f64, q: f64) -> Self {
        Self { f, b, g, q }
    }

    pub const fn from_array(a: Vec4) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub const fn to_array(self) -> Vec4 {
        [self.f, self.b, self.g, self.q]
    }

    #[inline]
    pub fn u(&self) -> f64 {
        self.f * self.b
    }

    #[inline]
    pub fn v(&self) -> f64 {
        self.g * self.q
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Sign conditions f, g, q > 0 and b < 0.
    pub fn has_admissible_signs(&self) -> bool {
        self.is_finite() && self.f > 0.0 && self.g > 0.0 && self.q > 0.0 && self.b < 0.0
    }

    /// Membership in the closed state space: sign conditions plus fb + gq >= 0.
    pub fn in_state_space(&self) -> bool {
        self.has_admissible_signs() && self.u() + self.v() >= 0.0
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn add_scaled(&self, d: &Vec4, h: f64) -> Self {
        Self::new(
            self.f + h * d[0],
            self.b + h * d[1],
            self.g + h * d[2],
            self.q + h * d[3],
        )
    }
}

/// Riemann-invariant coordinates with `v = gq` carried alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantState {
    pub u: f64,
    pub xi: f64,
    pub tau: f64,
    pub eta: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition {
    pub lambdas: Vec4,
    /// `rvecs[i]` is the (unnormalised) right eigenvector for `lambdas[i]`.
    pub rvecs: [Vec4; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateSpaceClass {
    U,
    U1,
    U2,
    U3,
    U4,
    U5,
    Invalid,
}

pub fn flux(s: &ConservedState) -> Vec4 {
    let ConservedState { f, b, g, q } = *s;
    let u = f * b;
    [
        0.5 * f * f * b,
        0.5 * f * b * b,
        0.5 * g * g * q + u * g,
        0.5 * g * q * q + u * q,
    ]
}

pub fn jacobian(s: &ConservedState) -> Mat4 {
    let ConservedState { f, b, g, q } = *s;
    let (u, v) = (f * b, g * q);
    [
        [u, 0.5 * f * f, 0.0, 0.0],
        [0.5 * b * b, u, 0.0, 0.0],
        [g * b, f * g, u + v, 0.5 * g * g],
        [b * q, f * q, 0.5 * q * q, u + v],
    ]
}

pub fn mat_vec(m: &Mat4, x: &Vec4) -> Vec4 {
    let mut y = [0.0; 4];
    for (yi, row) in y.iter_mut().zip(m) {
        *yi = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    y
}

/// Characteristic speeds (3u/2, u/2, u + v/2, u + 3v/2).
#[inline]
pub fn eigenvalues(s: &ConservedState) -> Vec4 {
    let (u, v) = (s.u(), s.v());
    [1.5 * u, 0.5 * u, u + 0.5 * v, u + 1.5 * v]
}

pub fn max_wave_speed(s: &ConservedState) -> f64 {
    eigenvalues(s).iter().fold(0.0f64, |m, l| m.max(l.abs()))
}

pub fn eigen(s: &ConservedState) -> Result<EigenDecomposition> {
    let ConservedState { f, b, g, q } = *s;
    if f == 0.0 || b == 0.0 || g == 0.0 || q == 0.0 {
        return Err(Error::DegenerateState(format!(
            "eigenvectors undefined for {s:?}"
        )));
    }
    let (u, v) = (f * b, g * q);
    let w = u - 3.0 * v;
    Ok(EigenDecomposition {
        lambdas: eigenvalues(s),
        rvecs: [
            [w / (4.0 * q * b), w / (4.0 * q * f), g / q, 1.0],
            [-f / b, 1.0, 0.0, 0.0],
            [0.0, 0.0, -g / q, 1.0],
            [0.0, 0.0, g / q, 1.0],
        ],
    })
}

pub fn to_invariants(s: &ConservedState) -> Result<InvariantState> {
    let (u, v) = (s.u(), s.v());
    if s.b == 0.0 || s.q == 0.0 || !(v > 0.0) {
        return Err(Error::DegenerateState(format!(
            "invariants undefined for {s:?}"
        )));
    }
    Ok(InvariantState {
        u,
        xi: s.f / s.b,
        tau: s.g / s.q,
        eta: (u + v) / v.sqrt().sqrt(),
        v,
    })
}

/// Inverse of the invariant map on the branch f > 0, b < 0, written in terms of `v`.
pub fn from_primitive_invariants(u: f64, xi: f64, tau: f64, v: f64) -> Result<ConservedState> {
    if !(u < 0.0 && u * xi > 0.0 && v > 0.0 && tau > 0.0) {
        return Err(Error::DomainError(format!(
            "no state with u={u}, xi={xi}, tau={tau}, v={v}"
        )));
    }
    let f = (u * xi).sqrt();
    let g = (v * tau).sqrt();
    Ok(ConservedState::new(f, u / f, g, g / tau))
}

/// Solves u + v = eta * v^(1/4) for v > 0 on the increasing branch.
pub fn v_from_eta(u: f64, eta: f64, v_hint: f64) -> Result<f64> {
    if !(u < 0.0) || !eta.is_finite() {
        return Err(Error::NoRoot(format!("v_from_eta needs u < 0, got u={u}, eta={eta}")));
    }
    let h = |v: f64| u + v - eta * v.sqrt().sqrt();
    let mut lo = 1e-12;
    if h(lo) >= 0.0 {
        return Err(Error::NoRoot(format!("h(0+) >= 0 for u={u}, eta={eta}")));
    }
    let mut hi = if v_hint.is_finite() && v_hint > lo { v_hint } else { 1.0 };
    let mut expansions = 0;
    while h(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 2100 {
            return Err(Error::NoRoot(format!("no bracket for u={u}, eta={eta}")));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut v = 0.5 * (lo + hi);
    for _ in 0..5 {
        let dh = 1.0 - 0.25 * eta / (v * v * v).sqrt().sqrt();
        if dh == 0.0 || !dh.is_finite() {
            break;
        }
        let next = v - h(v) / dh;
        if next > 0.0 && next.is_finite() {
            v = next;
        }
    }
    let scale = 1.0f64.max(u.abs()).max(v);
    if h(v).abs() > 1e-12 * scale {
        return Err(Error::NoRoot(format!(
            "residual {} for u={u}, eta={eta}",
            h(v)
        )));
    }
    Ok(v)
}

pub fn classify(s: &ConservedState) -> StateSpaceClass {
    use StateSpaceClass::*;
    let ConservedState { f, b, g, q } = *s;
    if !s.is_finite() || !(f > 0.0 && g > 0.0 && q > 0.0) {
        return Invalid;
    }
    let (u, v) = (f * b, g * q);
    let tag = if b < 0.0 {
        if u + v >= 0.0 {
            U
        } else if u + 3.0 * v > 0.0 {
            U1
        } else if u + 3.0 * v < 0.0 {
            U2
        } else {
            Invalid
        }
    } else if b > 0.0 {
        if u < v {
            U3
        } else if u > v && u < 3.0 * v {
            U4
        } else if u > 3.0 * v {
            U5
        } else {
            Invalid
        }
    } else {
        Invalid
    };
    debug_assert!(ordering_consistent(tag, u, v));
    tag
}

fn ordering_consistent(tag: StateSpaceClass, u: f64, v: f64) -> bool {
    use StateSpaceClass::*;
    let [l1, l2, l3, l4] = [1.5 * u, 0.5 * u, u + 0.5 * v, u + 1.5 * v];
    match tag {
        U => l1 < l2 && l2 <= l3 && l3 < l4,
        U1 => l1 < l3 && l3 < l2 && l2 < l4,
        U2 => l1 < l3 && l3 < l4 && l4 < l2,
        U3 => l2 < l1 && l1 < l3 && l3 < l4,
        U4 => l2 < l3 && l3 < l1 && l1 < l4,
        U5 => l2 < l3 && l3 < l4 && l4 < l1,
        Invalid => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_examples() {
        assert_eq!(flux(&ConservedState::new(1.0, -1.0, 2.0, 2.0)), [-0.5, 0.5, 2.0, 2.0]);
        assert_eq!(flux(&ConservedState::new(2.0, -1.0, 2.0, 1.0)), [-2.0, 1.0, -2.0, -1.0]);
        assert_eq!(flux(&ConservedState::new(3.0, 0.0, 5.0, 0.0)), [0.0; 4]);
    }

    #[test]
    fn jacobian_examples() {
        let j = jacobian(&ConservedState::new(1.0, -1.0, 2.0, 2.0));
        assert_eq!(j[0], [-1.0, 0.5, 0.0, 0.0]);
        assert_eq!(j[2][2], 3.0);
        for r in 0..2 {
            assert_eq!(j[r][2], 0.0);
            assert_eq!(j[r][3], 0.0);
        }
    }

    #[test]
    fn eigen_examples() {
        let e = eigen(&ConservedState::new(1.0, -1.0, 2.0, 2.0)).unwrap();
        assert_eq!(e.lambdas, [-1.5, -0.5, 1.0, 5.0]);
        assert_eq!(e.rvecs[1], [1.0, 1.0, 0.0, 0.0]);
        let e = eigen(&ConservedState::new(2.0, -1.0, 2.0, 1.0)).unwrap();
        assert_eq!(e.lambdas, [-3.0, -1.0, -1.0, 1.0]);
        assert!(eigen(&ConservedState::new(1.0, 0.0, 2.0, 2.0)).is_err());
    }

    #[test]
    fn invariants_examples() {
        let w = to_invariants(&ConservedState::new(1.0, -1.0, 2.0, 2.0)).unwrap();
        assert_eq!((w.u, w.xi, w.tau, w.v), (-1.0, -1.0, 1.0, 4.0));
        assert!((w.eta - 3.0 / 4f64.powf(0.25)).abs() < 1e-15);
        let w = to_invariants(&ConservedState::new(2.0, -1.0, 2.0, 1.0)).unwrap();
        assert_eq!((w.u, w.xi, w.tau, w.v, w.eta), (-2.0, -2.0, 2.0, 2.0, 0.0));
    }

    #[test]
    fn inverse_map_examples() {
        assert_eq!(
            from_primitive_invariants(-1.0, -1.0, 1.0, 4.0).unwrap(),
            ConservedState::new(1.0, -1.0, 2.0, 2.0)
        );
        assert_eq!(
            from_primitive_invariants(-2.0, -2.0, 2.0, 2.0).unwrap(),
            ConservedState::new(2.0, -1.0, 2.0, 1.0)
        );
        assert!(from_primitive_invariants(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(from_primitive_invariants(-1.0, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn v_from_eta_examples() {
        let v = v_from_eta(-1.0, 2.1213203, 1.0).unwrap();
        assert!((v - 4.0).abs() < 1e-6);
        let v = v_from_eta(-2.0, 0.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        assert!(v_from_eta(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn classify_examples() {
        use StateSpaceClass::*;
        assert_eq!(classify(&ConservedState::new(1.0, -1.0, 2.0, 2.0)), U);
        assert_eq!(classify(&ConservedState::new(1.0, 1.0, 2.0, 2.0)), U3);
        assert_eq!(classify(&ConservedState::new(0.0, -1.0, 2.0, 2.0)), Invalid);
        assert_eq!(classify(&ConservedState::new(2.0, -1.0, 2.0, 1.0)), U);
        assert_eq!(classify(&ConservedState::new(4.0, -1.0, 1.0, 2.0)), U1);
        assert_eq!(classify(&ConservedState::new(8.0, -1.0, 1.0, 2.0)), U2);
        assert_eq!(classify(&ConservedState::new(6.0, -1.0, 1.0, 2.0)), Invalid);
        assert_eq!(classify(&ConservedState::new(1.0, 3.0, 1.0, 2.0)), U4);
        assert_eq!(classify(&ConservedState::new(1.0, 7.0, 1.0, 2.0)), U5);
        assert_eq!(classify(&ConservedState::new(1.0, 2.0, 1.0, 2.0)), Invalid);
    }
}
