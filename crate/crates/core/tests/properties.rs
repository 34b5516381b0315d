mod common;

use common::{interior_state, validate_fan};
use filmgrp::grp::grp_interface;
use filmgrp::riemann::{solve_star_states, Region};
use filmgrp::scheme::{
    godunov_step, grp_step, run_steps, Bc, GridState, LimiterMode, SchemeConfig, SchemeKind,
};
use filmgrp::state::{
    eigen, eigenvalues, flux, from_primitive_invariants, jacobian, to_invariants, v_from_eta,
    ConservedState,
};
use proptest::prelude::*;

fn state() -> impl Strategy<Value = ConservedState> {
    (0.3f64..2.5, 0.2f64..2.0, 0.3f64..2.5, 1.1f64..4.0)
        .prop_map(|(f, mb, g, r)| interior_state(f, mb, g, r))
}

fn direction() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eigenpairs_and_strict_hyperbolicity(s in state()) {
        let e = eigen(&s).unwrap();
        let j = jacobian(&s);
        for k in 0..4 {
            let r = e.rvecs[k];
            let scale = r.iter().fold(0.0f64, |m, x| m.max(x.abs())) * (1.0 + e.lambdas[k].abs() + s.max_abs().powi(2));
            for i in 0..4 {
                let jr: f64 = (0..4).map(|c| j[i][c] * r[c]).sum();
                prop_assert!((jr - e.lambdas[k] * r[i]).abs() <= 1e-10 * scale);
            }
        }
        let l = eigenvalues(&s);
        prop_assert!(l[0] < l[1] && l[1] < l[2] && l[2] < l[3], "{l:?}");
    }

    #[test]
    fn jacobian_matches_flux_differences(s in state(), d in direction()) {
        let h = 1e-6;
        let (fp, fm) = (flux(&s.add_scaled(&d, h)), flux(&s.add_scaled(&d, -h)));
        let j = jacobian(&s);
        for i in 0..4 {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            let jd: f64 = (0..4).map(|c| j[i][c] * d[c]).sum();
            prop_assert!((fd - jd).abs() <= 1e-6 * (1.0 + jd.abs()), "{i}: {fd} vs {jd}");
        }
    }

    #[test]
    fn genuine_nonlinearity_and_linear_degeneracy(s in state()) {
        let e = eigen(&s).unwrap();
        let h = 1e-6;
        for k in 0..4 {
            let r = e.rvecs[k];
            let n = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let dl = (eigenvalues(&s.add_scaled(&r, h / n))[k] - eigenvalues(&s.add_scaled(&r, -h / n))[k]) / (2.0 * h);
            match k {
                0 | 3 => prop_assert!(dl.abs() > 1e-6, "field {k}: {dl}"),
                _ => prop_assert!(dl.abs() < 1e-6, "field {k}: {dl}"),
            }
        }
    }

    #[test]
    fn invariants_round_trip(s in state()) {
        let w = to_invariants(&s).unwrap();
        let back = from_primitive_invariants(w.u, w.xi, w.tau, w.v).unwrap();
        for (a, b) in back.to_array().iter().zip(s.to_array()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        let v = v_from_eta(w.u, w.eta, 0.5 * w.v).unwrap();
        prop_assert!((v - w.v).abs() <= 1e-10 * w.v.max(1.0));
    }

    #[test]
    fn riemann_fans_are_valid(l in state(), r in state()) {
        if let Ok(fan) = solve_star_states(&l, &r) {
            prop_assert!(validate_fan(&fan).is_ok(), "{:?}", validate_fan(&fan));
            prop_assert_eq!(fan.sample(-1e6), l);
            prop_assert_eq!(fan.sample(1e6), r);
            for s in [-3.0, -1.0, -0.2, 0.0, 0.2, 1.0, 3.0] {
                prop_assert!(fan.sample(s).is_finite());
            }
        }
    }

    #[test]
    fn equal_data_give_constant_solution(s in state(), x in -5.0f64..5.0) {
        let fan = solve_star_states(&s, &s).unwrap();
        let p = fan.sample(x);
        for (a, b) in p.to_array().iter().zip(s.to_array()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        prop_assert!(fan.strengths().iter().all(|w| w.abs() < 1e-12));
    }

    #[test]
    fn rarefaction_fans_are_continuous(l in state(), r in state()) {
        if let Ok(fan) = solve_star_states(&l, &r) {
            for w in [fan.wave1, fan.wave4] {
                if let filmgrp::riemann::WaveSpeeds::Fan { lo, hi } = w {
                    let eps = 1e-9 * (1.0 + lo.abs() + hi.abs());
                    let (a, b) = (fan.sample(lo - eps), fan.sample(lo + eps));
                    let (c, d) = (fan.sample(hi - eps), fan.sample(hi + eps));
                    for (x, y) in a.to_array().iter().zip(b.to_array()).chain(c.to_array().iter().zip(d.to_array())) {
                        prop_assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{w:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn interface_with_equal_traces_and_zero_slopes(s in state()) {
        let sol = grp_interface(&s, &[0.0; 4], &s, &[0.0; 4]).unwrap();
        prop_assert_eq!(sol.dudt, [0.0; 4]);
        prop_assert!(sol.acoustic);
        prop_assert!(matches!(sol.region, Region::StarLeft | Region::StarMiddle | Region::StarRight));
    }
}

fn periodic_grid(n: usize, seed: &[f64]) -> GridState {
    let mut grid = GridState::new(0.0, 1.0, n, Bc::Periodic).unwrap();
    for j in 0..n {
        let x = grid.cell_center(j) * std::f64::consts::TAU;
        let a = 1.0 + 0.2 * (x + seed[0]).sin();
        let mb = 0.8 + 0.1 * (2.0 * x + seed[1]).cos();
        let g = 1.5 + 0.3 * (x + seed[2]).cos();
        grid.averages[j] = interior_state(a, mb, g, 1.5 + 0.3 * (x + seed[3]).sin());
    }
    grid
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn schemes_conserve_on_periodic_grids(seed in prop::array::uniform4(0.0f64..6.0)) {
        for scheme in [SchemeKind::Grp2, SchemeKind::Godunov, SchemeKind::MusclRk2] {
            let cfg = SchemeConfig::new(scheme, LimiterMode::Minmod);
            let mut grid = periodic_grid(40, &seed);
            grid.slopes = grid.limited_slopes(&cfg);
            let before = grid.totals();
            run_steps(&mut grid, &cfg, 20).unwrap();
            let after = grid.totals();
            for i in 0..4 {
                prop_assert!((after[i] - before[i]).abs() <= 1e-12 * before[i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn grp_without_slopes_is_godunov(seed in prop::array::uniform4(0.0f64..6.0)) {
        let cfg = SchemeConfig::new(SchemeKind::Grp2, LimiterMode::Minmod);
        let mut a = periodic_grid(30, &seed);
        let mut b = a.clone();
        grp_step(&mut a, &cfg, 1e-3).unwrap();
        godunov_step(&mut b, &SchemeConfig::new(SchemeKind::Godunov, LimiterMode::Minmod), 1e-3).unwrap();
        prop_assert_eq!(a.averages, b.averages);
    }
}
