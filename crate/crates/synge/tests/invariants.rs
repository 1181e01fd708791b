//! Property tests for the algebraic identities and the quantified shock and
//! piston invariants that go beyond single configurations.

use proptest::prelude::*;
use synge::bessel::{self, Order};
use synge::eos::GasKind;
use synge::flow::{denom_g, factor_a, factor_b, find_blowup_sbar, FlowState, SimParams};
use synge::piston::{solve_piston, PistonProblem};
use synge::shock::{lorentz_from_shock_frame, lorentz_to_shock_frame, scan_downstream, solve_downstream_full};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lorentz_round_trip(u in -0.99f64..0.99, s in 1.01f64..20.0) {
        let ut = lorentz_to_shock_frame(u, s).unwrap();
        prop_assert!(ut.abs() < 1.0);
        let back = lorentz_from_shock_frame(ut, s).unwrap();
        prop_assert!((back - u).abs() < 1e-14);
    }

    #[test]
    fn denominator_factorization(
        u in -0.95f64..0.95,
        s in 0.05f64..10.0,
        log_gamma in -2.0f64..2.0,
    ) {
        let gamma = 10f64.powf(log_gamma);
        let st = FlowState::new(u, gamma, 1.0).unwrap();
        for gas in [GasKind::Monatomic, GasKind::Diatomic] {
            let g = denom_g(s, &st, gas).unwrap();
            let a = factor_a(s, &st, gas).unwrap();
            let b = factor_b(s, &st, gas).unwrap();
            let scale = g.abs().max(1.0);
            prop_assert!((g - a * b).abs() <= 1e-11 * scale);
            // sign relations of the factorization
            if b >= 0.0 {
                prop_assert!(a > 0.0);
            }
            prop_assert_eq!(g < 0.0, a > 0.0 && b < 0.0);
            // inside the light cone the denominator is positive
            if s <= 1.0 {
                prop_assert!(g > 0.0);
            }
        }
    }

    #[test]
    fn bessel_ratio_and_ordering(log_gamma in -3.0f64..3.0) {
        let gamma = 10f64.powf(log_gamma);
        let ks: Vec<f64> = (0..=4)
            .map(|j| bessel::bessel_k_scaled(Order::new(j).unwrap(), gamma).unwrap())
            .collect();
        for j in 0..4 {
            prop_assert!(ks[j] < ks[j + 1]);
        }
        for i in 0..=1u8 {
            let h = bessel::ratio_h(i, gamma).unwrap();
            prop_assert!(h > 0.0 && h < 1.0);
            prop_assert!((h - ks[i as usize] / ks[i as usize + 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn downstream_depends_only_on_state_and_sigma(du in -1e-9f64..1e-9) {
        // transform round trip on the upstream leaves the solution unchanged
        let gas = GasKind::Monatomic;
        let upstream = FlowState::new(-0.3 + du, 2.0, 1.0).unwrap();
        let sigma = 0.55;
        let s = 1.0 / sigma;
        let round = FlowState::new(
            lorentz_from_shock_frame(lorentz_to_shock_frame(upstream.u, s).unwrap(), s).unwrap(),
            upstream.gamma,
            upstream.p,
        )
        .unwrap();
        let a = solve_downstream_full(&upstream, sigma, gas).unwrap();
        let b = solve_downstream_full(&round, sigma, gas).unwrap();
        prop_assert!((a.state.u - b.state.u).abs() < 1e-12);
        prop_assert!((a.state.gamma - b.state.gamma).abs() < 1e-12 * a.state.gamma);
        prop_assert!((a.state.p - b.state.p).abs() < 1e-11 * a.state.p);
    }
}

#[test]
fn shock_admissibility_quantified_over_gases_and_coldness() {
    // Lax ordering, entropy growth, compression, and acceleration at 50 sigma
    // samples per run for both gases and three reference coldness values.
    for gas in [GasKind::Monatomic, GasKind::Diatomic] {
        for (gamma0, u0) in [(0.3, -0.3), (3.0, -1.0 / 2.0_f64.sqrt()), (30.0, -1.0 / 2.0_f64.sqrt())] {
            let params = SimParams::new(gas);
            let initial = FlowState::new(u0, gamma0, 1.0).unwrap();
            let run = find_blowup_sbar(&initial, &params).unwrap();
            let scan = scan_downstream(&run, &params, 50).unwrap();
            assert_eq!(scan.len(), 50);
            for pt in &scan {
                let sigma = 1.0 / pt.s;
                assert!(
                    pt.solve.lambda_up < sigma && sigma < pt.solve.lambda_down,
                    "[{gas} gamma0={gamma0}] Lax ordering fails at s = {}",
                    pt.s
                );
                // the entropy jump is cubic in shock strength; at the
                // near-characteristic end of the scan it falls below noise
                if sigma - pt.solve.lambda_up > 1e-4 {
                    assert!(pt.solve.entropy_ratio > 1.0, "entropy at s = {}", pt.s);
                } else {
                    assert!(pt.solve.entropy_ratio > 1.0 - 1e-11);
                }
                assert!(pt.solve.state.p > pt.upstream.p);
                assert!(pt.solve.state.u > pt.upstream.u);
            }
        }
    }
}

#[test]
fn piston_full_coldness_coverage() {
    // solutions exist and pass the admissibility checks across the whole
    // relativistic range of the rest state
    for gas in [GasKind::Monatomic, GasKind::Diatomic] {
        for gamma0 in [0.1, 1.0, 10.0, 100.0] {
            let problem = PistonProblem { alpha: 0.5, p0: 1.0, gamma0, gas, d: 3 };
            let sol = solve_piston(&problem, 1e-8)
                .unwrap_or_else(|e| panic!("piston [{gas} gamma0={gamma0}] failed: {e}"));
            assert!(sol.residual < 1e-8);
            assert!(sol.shock.lax_margin > 0.0);
            assert!(sol.shock.entropy_ratio > 1.0);
            assert!((sol.s_tilde - 2.0).abs() < 1e-6);
        }
    }
}

#[test]
fn two_dimensional_flows_also_classify() {
    // d = 2 exercises the other allowed dimension end to end
    let mut params = SimParams::new(GasKind::Monatomic);
    params.d = 2;
    let initial = FlowState::new(-0.5, 3.0, 1.0).unwrap();
    let run = find_blowup_sbar(&initial, &params).unwrap();
    assert!(run.s_hat > 1.0 && run.s_hat < run.s_bar);
    let rec = synge::shock::find_shock_sstar(&run, &params).unwrap();
    assert!(rec.lax_margin > 0.0);
    assert!(rec.downstream.u.abs() < 1e-6);
}
