//! Grid certification of the structural properties of the Synge energies:
//! p e_pp < 0, e_p > 3, monotone decrease of the characteristic speed, the
//! two-sided bounds on K_0/K_1, and the admissibility structure of the shock
//! construction. This is numerical evidence on explicit grids, not a proof;
//! the report says so and is deterministic for a fixed grid specification.

use crate::bessel::{self, GAMMA_ZERO};
use crate::eos::{self, GasKind};
use crate::error::Result;
use crate::flow::{find_blowup_sbar, FlowState, SimParams};
use crate::shock::{jump_jacobian, lorentz_to_shock_frame, scan_downstream, RestFrameState};
use serde::Serialize;

/// Log-spaced grid with refinement windows around the proof-case boundaries.
#[derive(Debug, Clone, Serialize)]
pub struct GammaGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    /// (center, points) pairs; each adds points on [0.85 c, 1.15 c]
    pub refinements: Vec<(f64, usize)>,
}

impl GammaGrid {
    /// 2048 log-spaced points on [1e-3, 1e3] plus 256-point refinements at
    /// the case boundaries 1/2, 9/10, gamma_0, sqrt(2), 2, 3.
    pub fn standard() -> GammaGrid {
        GammaGrid {
            lo: 1e-3,
            hi: 1e3,
            n: 2048,
            refinements: [0.5, 0.9, GAMMA_ZERO, std::f64::consts::SQRT_2, 2.0, 3.0]
                .iter()
                .map(|&c| (c, 256))
                .collect(),
        }
    }

    pub fn plain(lo: f64, hi: f64, n: usize) -> GammaGrid {
        GammaGrid { lo, hi, n, refinements: Vec::new() }
    }

    pub fn points(&self) -> Vec<f64> {
        let mut pts = log_grid(self.lo, self.hi, self.n);
        for &(c, n) in &self.refinements {
            for k in 0..n {
                pts.push(c * (0.85 + 0.30 * k as f64 / (n - 1) as f64));
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn describe(&self) -> String {
        format!(
            "{} log points on [{:.3e}, {:.3e}] + {} refinement windows",
            self.n,
            self.lo,
            self.hi,
            self.refinements.len()
        )
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

/// One certified inequality: its worst margin over the grid and where it
/// occurred. The margin is oriented so that positive means the inequality
/// holds; `pass` is margin > 0 at every point.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gas: Option<GasKind>,
    pub grid: String,
    pub pass: bool,
    pub worst_margin: f64,
    pub arg_worst: f64,
}

fn check_over<'a>(
    name: &str,
    gas: Option<GasKind>,
    grid_desc: String,
    points: impl IntoIterator<Item = &'a f64>,
    mut margin: impl FnMut(f64) -> Result<f64>,
) -> Result<CheckResult> {
    let mut worst = f64::INFINITY;
    let mut arg = f64::NAN;
    for &g in points {
        let m = margin(g)?;
        if m < worst {
            worst = m;
            arg = g;
        }
    }
    Ok(CheckResult {
        name: name.to_string(),
        gas,
        grid: grid_desc,
        pass: worst > 0.0,
        worst_margin: worst,
        arg_worst: arg,
    })
}

/// p e_pp < 0 at every grid point, by both algebraic routes.
pub fn certify_epp_negative(gas: GasKind, grid: &GammaGrid) -> Result<Vec<CheckResult>> {
    let pts = grid.points();
    let desc = grid.describe();
    Ok(vec![
        check_over("p_epp_negative_closed_form", Some(gas), desc.clone(), &pts, |g| {
            Ok(-eos::p_epp(gas, g)?)
        })?,
        check_over("p_epp_negative_sigma_route", Some(gas), desc, &pts, |g| {
            Ok(-eos::p_epp_sigma_route(gas, g)?)
        })?,
    ])
}

/// e_p > 3 everywhere, lambda strictly decreasing across the grid, and the
/// ultra-relativistic limit lambda(1e-6) = 1/sqrt(3) within 1e-3.
pub fn certify_ep_gt3_and_monotone_lambda(gas: GasKind, grid: &GammaGrid) -> Result<Vec<CheckResult>> {
    let pts = grid.points();
    let desc = grid.describe();
    let ep_check = check_over("ep_above_three", Some(gas), desc.clone(), &pts, |g| {
        Ok(eos::e_p(gas, g)? - 3.0)
    })?;
    // consecutive differences of lambda
    let mut worst = f64::INFINITY;
    let mut arg = f64::NAN;
    let mut prev = eos::char_speed(gas, pts[0])?;
    for &g in &pts[1..] {
        let lam = eos::char_speed(gas, g)?;
        let m = prev - lam;
        if m < worst {
            worst = m;
            arg = g;
        }
        prev = lam;
    }
    let mono_check = CheckResult {
        name: "lambda_strictly_decreasing".to_string(),
        gas: Some(gas),
        grid: desc.clone(),
        pass: worst > 0.0,
        worst_margin: worst,
        arg_worst: arg,
    };
    let lam0 = eos::char_speed(gas, 1e-6)?;
    let limit_margin = 1e-3 - (lam0 - 1.0 / 3.0_f64.sqrt()).abs();
    let limit_check = CheckResult {
        name: "lambda_ultra_relativistic_limit".to_string(),
        gas: Some(gas),
        grid: "gamma = 1e-6".to_string(),
        pass: limit_margin > 0.0,
        worst_margin: limit_margin,
        arg_worst: 1e-6,
    };
    Ok(vec![ep_check, mono_check, limit_check])
}

/// Every regime bound on K_0/K_1 from the ratio estimates, including the
/// lower bound gamma/2 on (gamma_0, sqrt(2)] and the refined bounds past 2.
pub fn certify_bessel_bounds(points_per_interval: usize) -> Result<Vec<CheckResult>> {
    let n = points_per_interval;
    let mut out = Vec::new();
    let h0 = |g: f64| bessel::ratio_h(0, g);

    let seg = |name: &str, lo: f64, hi: f64, f: &mut dyn FnMut(f64) -> Result<f64>| -> Result<CheckResult> {
        let pts = log_grid(lo, hi, n);
        check_over(name, None, format!("{n} log points on [{lo:.6}, {hi:.6}]"), &pts, f)
    };

    // (0, gamma_0]: gamma/(sqrt(gamma^2+1)+1) <= h0 <= gamma(11/16 - ln(gamma/2) - C_E)
    out.push(seg("h0_lower_small_gamma", 1e-4, GAMMA_ZERO, &mut |g| {
        Ok(h0(g)? - g / ((g * g + 1.0).sqrt() + 1.0))
    })?);
    out.push(seg("h0_upper_small_gamma", 1e-4, GAMMA_ZERO, &mut |g| {
        Ok(g * (11.0 / 16.0 - (g / 2.0).ln() - bessel::EULER_GAMMA) - h0(g)?)
    })?);
    // h0^2 + (2/gamma) h0 - 1 > 0 for all gamma
    out.push(seg("h0_quadratic_lower", 1e-4, 1e3, &mut |g| {
        let h = h0(g)?;
        Ok(h * h + 2.0 * h / g - 1.0)
    })?);
    // (gamma_0, sqrt(2)]: upper 1 - (gamma_0 - 1)/gamma and lower gamma/2
    out.push(seg("h0_upper_mid", GAMMA_ZERO, std::f64::consts::SQRT_2, &mut |g| {
        Ok(1.0 - (GAMMA_ZERO - 1.0) / g - h0(g)?)
    })?);
    out.push(seg("h0_lower_half_gamma", GAMMA_ZERO * (1.0 + 1e-12), std::f64::consts::SQRT_2, &mut |g| {
        Ok(h0(g)? - g / 2.0)
    })?);
    // (sqrt(2), 50]: rough two-sided bound
    out.push(seg("h0_lower_rough", std::f64::consts::SQRT_2, 50.0, &mut |g| {
        Ok(h0(g)? - (1.0 - 1.0 / (2.0 * g)))
    })?);
    out.push(seg("h0_upper_rough", std::f64::consts::SQRT_2, 50.0, &mut |g| {
        Ok(1.0 - 1.0 / (2.0 * g) + 3.0 / (8.0 * g * g) + 3.0 / (16.0 * g * g * g) - h0(g)?)
    })?);
    // (2, 100]: refined two-sided bound
    out.push(seg("h0_lower_refined", 2.0, 100.0, &mut |g| {
        let b = 1.0 - 1.0 / (2.0 * g) + 3.0 / (8.0 * g * g) - 3.0 / (8.0 * g.powi(3))
            + 63.0 / (128.0 * g.powi(4))
            - 31.0 / (20.0 * g.powi(5));
        Ok(h0(g)? - b)
    })?);
    out.push(seg("h0_upper_refined", 2.0, 100.0, &mut |g| {
        let b = 1.0 - 1.0 / (2.0 * g) + 3.0 / (8.0 * g * g) - 3.0 / (8.0 * g.powi(3))
            + 63.0 / (128.0 * g.powi(4))
            + 7.0 / (8.0 * g.powi(5));
        Ok(b - h0(g)?)
    })?);
    Ok(out)
}

/// A shock scenario for the structural check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShockScenario {
    pub gas: GasKind,
    pub gamma0: f64,
    pub u0: f64,
}

pub fn standard_scenarios() -> Vec<ShockScenario> {
    let r = -1.0 / 2.0_f64.sqrt();
    vec![
        ShockScenario { gas: GasKind::Monatomic, gamma0: 3.0, u0: r },
        ShockScenario { gas: GasKind::Diatomic, gamma0: 30.0, u0: r },
        ShockScenario { gas: GasKind::Monatomic, gamma0: 0.3, u0: -0.3 },
    ]
}

/// For each scenario: a single sign change of the downstream velocity over
/// (sqrt(3), s_bar), admissibility at 50 sigma samples, monotone decrease of
/// u_delta, and a negative Jacobian determinant at the shock point.
pub fn certify_shock_structure(scenarios: &[ShockScenario]) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for sc in scenarios {
        let label = format!("{} gamma0={} u0={:.4}", sc.gas, sc.gamma0, sc.u0);
        let params = SimParams::new(sc.gas);
        let initial = FlowState::new(sc.u0, sc.gamma0, 1.0)?;
        let run = find_blowup_sbar(&initial, &params)?;
        let scan = scan_downstream(&run, &params, 50)?;

        let mut sign_changes = 0usize;
        let mut lax_worst = f64::INFINITY;
        let mut lax_arg = f64::NAN;
        let mut ent_worst = f64::INFINITY;
        let mut ent_floor_ok = true;
        let mut dec_worst = f64::INFINITY;
        let mut prev_u = f64::INFINITY;
        for pt in &scan {
            let sigma = 1.0 / pt.s;
            let margin = (sigma - pt.solve.lambda_up).min(pt.solve.lambda_down - sigma);
            if margin < lax_worst {
                lax_worst = margin;
                lax_arg = pt.s;
            }
            // the entropy jump is cubic in shock strength; demand strict
            // growth only where the strength is above quadrature noise
            if sigma - pt.solve.lambda_up > 1e-4 {
                ent_worst = ent_worst.min(pt.solve.entropy_ratio - 1.0);
            }
            ent_floor_ok &= pt.solve.entropy_ratio > 1.0 - 1e-11;
            if prev_u.is_finite() {
                dec_worst = dec_worst.min(prev_u - pt.solve.state.u);
                if prev_u > 0.0 && pt.solve.state.u <= 0.0 {
                    sign_changes += 1;
                }
            }
            prev_u = pt.solve.state.u;
        }
        out.push(CheckResult {
            name: format!("shock_single_sign_change [{label}]"),
            gas: Some(sc.gas),
            grid: "50 sigma samples".into(),
            pass: sign_changes == 1,
            worst_margin: sign_changes as f64,
            arg_worst: run.s_bar,
        });
        out.push(CheckResult {
            name: format!("shock_lax_margins [{label}]"),
            gas: Some(sc.gas),
            grid: "50 sigma samples".into(),
            pass: lax_worst > 0.0,
            worst_margin: lax_worst,
            arg_worst: lax_arg,
        });
        out.push(CheckResult {
            name: format!("shock_entropy_growth [{label}]"),
            gas: Some(sc.gas),
            grid: "50 sigma samples (strict above strength 1e-4)".into(),
            pass: ent_worst > 0.0 && ent_floor_ok,
            worst_margin: ent_worst,
            arg_worst: f64::NAN,
        });
        out.push(CheckResult {
            name: format!("shock_udelta_decreasing [{label}]"),
            gas: Some(sc.gas),
            grid: "50 sigma samples".into(),
            pass: dec_worst > 0.0,
            worst_margin: dec_worst,
            arg_worst: f64::NAN,
        });

        // Jacobian determinant at the located root
        let rec = crate::shock::find_shock_sstar(&run, &params)?;
        let down = RestFrameState::new(
            lorentz_to_shock_frame(rec.downstream.u, rec.s_star)?,
            rec.downstream.gamma,
            rec.downstream.p,
        )?;
        let j = jump_jacobian(&down, sc.gas)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        out.push(CheckResult {
            name: format!("shock_jacobian_det_negative [{label}]"),
            gas: Some(sc.gas),
            grid: format!("at s* = {:.9}", rec.s_star),
            pass: det < 0.0,
            worst_margin: -det,
            arg_worst: rec.s_star,
        });
    }
    Ok(out)
}

/// The machine-readable certification report.
#[derive(Debug, Serialize)]
pub struct CertReport {
    /// numerical evidence on explicit grids, never a proof
    pub kind: &'static str,
    pub checks: Vec<CheckResult>,
}

impl CertReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub struct CertifyOptions {
    pub grid: GammaGrid,
    pub bessel_points: usize,
    pub scenarios: Vec<ShockScenario>,
    /// test hook: negate one margin to exercise the failure path
    pub inject_fault: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            grid: GammaGrid::standard(),
            bessel_points: 1000,
            scenarios: standard_scenarios(),
            inject_fault: false,
        }
    }
}

/// Run all four certification families and assemble the report.
pub fn run_all(opts: &CertifyOptions) -> Result<CertReport> {
    let mut checks = Vec::new();
    for gas in [GasKind::Monatomic, GasKind::Diatomic] {
        checks.extend(certify_epp_negative(gas, &opts.grid)?);
        checks.extend(certify_ep_gt3_and_monotone_lambda(gas, &opts.grid)?);
    }
    checks.extend(certify_bessel_bounds(opts.bessel_points)?);
    checks.extend(certify_shock_structure(&opts.scenarios)?);
    if opts.inject_fault {
        if let Some(first) = checks.first_mut() {
            first.worst_margin = -first.worst_margin;
            first.pass = first.worst_margin > 0.0;
        }
    }
    Ok(CertReport {
        kind: "numerical evidence",
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid_has_refinements() {
        let grid = GammaGrid::standard();
        let pts = grid.points();
        assert!(pts.len() >= 2048 + 6 * 250);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        // refinement density near sqrt(2)
        let near: usize = pts.iter().filter(|&&g| (1.2..1.63).contains(&g)).count();
        assert!(near > 260, "only {near} points near sqrt(2)");
    }

    #[test]
    fn eos_families_pass_on_standard_grid() {
        let grid = GammaGrid::standard();
        for gas in [GasKind::Monatomic, GasKind::Diatomic] {
            for c in certify_epp_negative(gas, &grid).unwrap() {
                assert!(c.pass, "{}: margin {} at {}", c.name, c.worst_margin, c.arg_worst);
            }
            for c in certify_ep_gt3_and_monotone_lambda(gas, &grid).unwrap() {
                assert!(c.pass, "{}: margin {} at {}", c.name, c.worst_margin, c.arg_worst);
            }
        }
    }

    #[test]
    fn bessel_bounds_pass() {
        for c in certify_bessel_bounds(1000).unwrap() {
            assert!(c.pass, "{}: margin {} at {}", c.name, c.worst_margin, c.arg_worst);
        }
    }

    #[test]
    fn subset_grid_report() {
        let opts = CertifyOptions {
            grid: GammaGrid::plain(10.0, 20.0, 64),
            bessel_points: 100,
            scenarios: vec![],
            inject_fault: false,
        };
        let report = run_all(&opts).unwrap();
        assert!(report.all_pass());
        // no shock checks requested
        assert!(report.checks.iter().all(|c| !c.name.starts_with("shock_")));
    }

    #[test]
    fn fault_injection_fails_report() {
        let opts = CertifyOptions {
            grid: GammaGrid::plain(1.0, 2.0, 16),
            bessel_points: 50,
            scenarios: vec![],
            inject_fault: true,
        };
        let report = run_all(&opts).unwrap();
        assert!(!report.all_pass());
    }

    #[test]
    fn report_serializes_deterministically() {
        let opts = CertifyOptions {
            grid: GammaGrid::plain(1.0, 2.0, 16),
            bessel_points: 50,
            scenarios: vec![],
            inject_fault: false,
        };
        let a = serde_json::to_string(&run_all(&opts).unwrap()).unwrap();
        let b = serde_json::to_string(&run_all(&opts).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("numerical evidence"));
    }
}
