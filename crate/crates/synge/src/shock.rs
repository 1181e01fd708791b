//! Relativistic Rankine-Hugoniot conditions and the shock construction.
//!
//! In the rest frame of a shock of speed sigma = 1/s the jump conditions
//! reduce to the 2x2 system
//!
//! ```text
//!   G1 = chi(gd) Gamma_d / gd - chi(g) Gamma / g            = 0,
//!   G2 = (chi(gd) v_d^2 + 1)/(gd v_d) - (chi(g) v^2 + 1)/(g v) = 0,
//! ```
//!
//! for the downstream (perturbed) unknowns (u_tilde_d, gamma_d), with
//! v = u_tilde / sqrt(1 - u_tilde^2) and Gamma = 1/sqrt(1 - u_tilde^2);
//! the pressure then follows from mass conservation p gamma v = const.
//! The system is solved by Newton iteration on the analytic Jacobian, with a
//! damped fallback and a continuation in sigma from the weak-shock limit.
//!
//! `find_shock_sstar` walks the pre-shock arc of a u0 < 0 run: for every
//! candidate s the state of the arc is the unperturbed side, sigma = 1/s, and
//! the shock point s* is the unique zero of the downstream velocity.

use crate::eos::{self, GasKind, GasPoint};
use crate::error::{Error, Result};
use crate::flow::{BlowupRun, FlowState, SimParams};
use serde::Serialize;

/// Velocity in the rest frame of a shock at similarity coordinate s (c = 1):
/// u_tilde = (u s - 1)/(s - u).
pub fn lorentz_to_shock_frame(u: f64, s: f64) -> Result<f64> {
    if !(u.abs() < 1.0) {
        return Err(Error::domain("lorentz_to_shock_frame", format!("|u| must be < 1, got {u}")));
    }
    Ok((u * s - 1.0) / (s - u))
}

/// Inverse transform: u = (u_tilde s + 1)/(s + u_tilde).
pub fn lorentz_from_shock_frame(u_tilde: f64, s: f64) -> Result<f64> {
    if !(u_tilde.abs() < 1.0) {
        return Err(Error::domain("lorentz_from_shock_frame", format!("|u_tilde| must be < 1, got {u_tilde}")));
    }
    Ok((u_tilde * s + 1.0) / (s + u_tilde))
}

/// Forward characteristic speed lambda = (sqrt(e_p) u + 1)/(sqrt(e_p) + u).
pub fn lambda_forward(gas: GasKind, u: f64, gamma: f64) -> Result<f64> {
    let r = eos::e_p(gas, gamma)?.sqrt();
    Ok((r * u + 1.0) / (r + u))
}

/// One side of the shock expressed in the shock rest frame.
#[derive(Debug, Clone, Copy)]
pub struct RestFrameState {
    /// velocity in the shock rest frame
    pub u_tilde: f64,
    /// proper velocity v = u_tilde / sqrt(1 - u_tilde^2)
    pub v: f64,
    /// Lorentz factor 1/sqrt(1 - u_tilde^2)
    pub lorentz: f64,
    /// coldness
    pub gamma: f64,
    /// pressure
    pub p: f64,
}

impl RestFrameState {
    pub fn new(u_tilde: f64, gamma: f64, p: f64) -> Result<RestFrameState> {
        if !(u_tilde.abs() < 1.0) {
            return Err(Error::domain("RestFrameState", format!("|u_tilde| must be < 1, got {u_tilde}")));
        }
        if !(gamma > 0.0 && p > 0.0) {
            return Err(Error::domain(
                "RestFrameState",
                format!("need gamma > 0, p > 0; got gamma = {gamma}, p = {p}"),
            ));
        }
        let lorentz = 1.0 / (1.0 - u_tilde * u_tilde).sqrt();
        Ok(RestFrameState {
            u_tilde,
            v: u_tilde * lorentz,
            lorentz,
            gamma,
            p,
        })
    }

    /// Build from a lab-frame state and the shock coordinate s.
    pub fn from_lab(state: &FlowState, s: f64) -> Result<RestFrameState> {
        RestFrameState::new(lorentz_to_shock_frame(state.u, s)?, state.gamma, state.p)
    }
}

/// Residuals (G1, G2) of the rest-frame jump conditions with the mass flux
/// eliminated; zero exactly when the pair solves the jump conditions.
pub fn jump_residuals(up: &RestFrameState, down: &RestFrameState, gas: GasKind) -> Result<(f64, f64)> {
    if up.v == 0.0 || down.v == 0.0 {
        return Err(Error::domain("jump_residuals", "v = 0 is a degenerate (characteristic) configuration"));
    }
    let cu = eos::chi(gas, up.gamma)?;
    let cd = eos::chi(gas, down.gamma)?;
    let g1 = cd * down.lorentz / down.gamma - cu * up.lorentz / up.gamma;
    let g2 = (cd * down.v * down.v + 1.0) / (down.gamma * down.v) - (cu * up.v * up.v + 1.0) / (up.gamma * up.v);
    Ok((g1, g2))
}

/// Analytic partial derivatives of (G1, G2) with respect to the downstream
/// unknowns (u_tilde_d, gamma_d), row-major.
pub fn jump_jacobian(down: &RestFrameState, gas: GasKind) -> Result<[[f64; 2]; 2]> {
    if down.v == 0.0 {
        return Err(Error::domain("jump_jacobian", "v = 0 is degenerate"));
    }
    let pt = GasPoint::new(gas, down.gamma)?;
    let chi = pt.chi();
    let q = pt.q();
    let gm = down.gamma;
    let v = down.v;
    let lor = down.lorentz;
    let dchi = (gm * q - chi) / (gm * gm); // d/dgamma of chi/gamma times gamma... = (q gamma - chi)/gamma^2
    let du_g1 = chi / gm * v * lor * lor;
    let dg_g1 = dchi * lor;
    let du_g2 = lor * lor * lor / (gm * v * v) * (chi * v * v - 1.0);
    let dg_g2 = dchi * v - 1.0 / (gm * gm * v);
    Ok([[du_g1, dg_g1], [du_g2, dg_g2]])
}

/// Downstream state with solver diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct DownstreamSolve {
    pub state: FlowState,
    pub rest: RestFrameState,
    pub residual: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub entropy_ratio: f64,
    pub iterations: usize,
}

fn residual_scale(up: &RestFrameState, gas: GasKind) -> Result<(f64, f64)> {
    let cu = eos::chi(gas, up.gamma)?;
    Ok((
        (cu * up.lorentz / up.gamma).abs(),
        ((cu * up.v * up.v + 1.0) / (up.gamma * up.v)).abs(),
    ))
}

/// Newton iteration on (u_tilde_d, gamma_d) from the given start; returns the
/// scaled residual achieved.
fn newton_jump(
    up: &RestFrameState,
    gas: GasKind,
    mut ut: f64,
    mut gm: f64,
    scale: (f64, f64),
) -> Result<(f64, f64, f64, usize)> {
    for it in 0..80 {
        let down = RestFrameState::new(ut, gm, up.p)?;
        let (g1, g2) = jump_residuals(up, &down, gas)?;
        let res = (g1 / scale.0).abs().max((g2 / scale.1).abs());
        if res < 1e-13 {
            return Ok((ut, gm, res, it));
        }
        let j = jump_jacobian(&down, gas)?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let mut dut = -(g1 * j[1][1] - g2 * j[0][1]) / det;
        let mut dgm = -(j[0][0] * g2 - j[1][0] * g1) / det;
        // damped update staying inside the domain
        let mut lam = 1.0;
        for _ in 0..50 {
            let utn = ut + lam * dut;
            let gmn = gm + lam * dgm;
            if utn > -1.0 + 1e-12 && utn < 0.0 && gmn > 0.0 {
                if let Ok(dn) = RestFrameState::new(utn, gmn, up.p) {
                    if let Ok((h1, h2)) = jump_residuals(up, &dn, gas) {
                        let rn = (h1 / scale.0).abs().max((h2 / scale.1).abs());
                        if rn < res || lam < 1e-3 {
                            ut = utn;
                            gm = gmn;
                            dut = 0.0;
                            dgm = 0.0;
                            break;
                        }
                    }
                }
            }
            lam *= 0.5;
        }
        if dut != 0.0 || dgm != 0.0 {
            // no acceptable damped step found
            break;
        }
    }
    let down = RestFrameState::new(ut, gm, up.p)?;
    let (g1, g2) = jump_residuals(up, &down, gas)?;
    let res = (g1 / scale.0).abs().max((g2 / scale.1).abs());
    Ok((ut, gm, res, 80))
}

/// Assemble the lab-frame downstream state from solved rest-frame unknowns.
fn assemble(
    up_lab: &FlowState,
    up: &RestFrameState,
    gas: GasKind,
    s: f64,
    ut: f64,
    gm: f64,
    res: f64,
    iterations: usize,
) -> Result<DownstreamSolve> {
    let sigma = 1.0 / s;
    let down0 = RestFrameState::new(ut, gm, up.p)?;
    // mass flux: p gamma v continuous across the jump
    let p_down = up.p * (up.gamma * up.v) / (gm * down0.v);
    let down = RestFrameState::new(ut, gm, p_down)?;
    let u_lab = lorentz_from_shock_frame(ut, s)?;
    let state = FlowState { u: u_lab, gamma: gm, p: p_down };
    let lambda_up = lambda_forward(gas, up_lab.u, up_lab.gamma)?;
    let lambda_down = lambda_forward(gas, u_lab, gm)?;
    if !(lambda_up < sigma && sigma < lambda_down) {
        return Err(Error::LaxViolation { lambda_up, sigma, lambda_down });
    }
    if !(p_down > up.p) || !(u_lab > up_lab.u) {
        return Err(Error::Inconsistency {
            context: "shock::solve_downstream",
            message: format!("jump lacks compression: p {} -> {p_down}, u {} -> {u_lab}", up.p, up_lab.u),
        });
    }
    let ent_up = eos::entropy_label(gas, up.p, up.gamma)?;
    let ent_down = eos::entropy_label(gas, p_down, gm)?;
    let entropy_ratio = (ent_down - ent_up).exp();
    // the entropy jump is cubic in shock strength, so allow quadrature noise
    // to mask it for near-characteristic shocks
    if !(entropy_ratio > 1.0 - 1e-11) {
        return Err(Error::Inconsistency {
            context: "shock::solve_downstream",
            message: format!("entropy surrogate did not increase: ratio {entropy_ratio}"),
        });
    }
    Ok(DownstreamSolve {
        state,
        rest: down,
        residual: res,
        lambda_up,
        lambda_down,
        entropy_ratio,
        iterations,
    })
}

/// The G1 condition fixes the downstream Lorentz factor once gamma_d is
/// chosen: Gamma_d = K gamma_d / chi(gamma_d) with K = chi Gamma / gamma from
/// the unperturbed side. Returns (u_tilde_d, v_d) on the v < 0 branch, or None
/// where the Lorentz factor would fall below 1 (outside the physical domain).
fn branch_from_gamma(k_inv: f64, gm: f64, gas: GasKind) -> Result<Option<(f64, f64)>> {
    let chi = eos::chi(gas, gm)?;
    let lor = k_inv * gm / chi;
    if lor <= 1.0 {
        return Ok(None);
    }
    let v = -(lor * lor - 1.0).sqrt();
    Ok(Some((v / lor, v)))
}

/// Solve the jump conditions for the perturbed state behind a forward shock
/// of speed sigma, given the unperturbed state ahead. The 2x2 system is
/// reduced to a scalar equation in gamma_d (G1 eliminates u_tilde_d exactly),
/// bracketed between the degenerate point and the no-jump root, bisected, and
/// polished by Newton on the analytic Jacobian.
pub fn solve_downstream_full(upstream: &FlowState, sigma: f64, gas: GasKind) -> Result<DownstreamSolve> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::domain("solve_downstream", format!("sigma must be in (0,1), got {sigma}")));
    }
    let s = 1.0 / sigma;
    let lambda_up = lambda_forward(gas, upstream.u, upstream.gamma)?;
    if !(lambda_up < sigma) {
        return Err(Error::domain(
            "solve_downstream",
            format!("upstream is not supersonic relative to the shock: lambda = {lambda_up}, sigma = {sigma}"),
        ));
    }
    let up = RestFrameState::from_lab(upstream, s)?;
    let scale = residual_scale(&up, gas)?;
    let k_inv = eos::chi(gas, up.gamma)? * up.lorentz / up.gamma;
    let m_inv = (eos::chi(gas, up.gamma)? * up.v * up.v + 1.0) / (up.gamma * up.v);

    // lower end of the physical gamma_d domain: Gamma_d = 1
    let mut lo = up.gamma * 1e-8;
    let mut hi = up.gamma;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match branch_from_gamma(k_inv, mid, gas)? {
            Some(_) => hi = mid,
            None => lo = mid,
        }
    }
    let gm_low = hi;

    let f = |gm: f64| -> Result<Option<f64>> {
        match branch_from_gamma(k_inv, gm, gas)? {
            None => Ok(None),
            Some((_ut, v)) => {
                let chi = eos::chi(gas, gm)?;
                Ok(Some((chi * v * v + 1.0) / (gm * v) - m_inv))
            }
        }
    };

    // the scalar residual runs from -infinity at the degenerate end to its
    // trivial zero at gamma: the lowest sign change is the shock root. The
    // candidate list opens with a geometric ladder off the degenerate end,
    // where strong-shock roots concentrate, then sweeps uniformly.
    let gm_up = up.gamma;
    let width = gm_up - gm_low;
    let n_scan = 256;
    let mut candidates: Vec<f64> = (0..=12)
        .rev()
        .map(|j| gm_low + width * 10f64.powi(-j))
        .collect();
    candidates.extend((1..n_scan).map(|k| gm_low + width * k as f64 / n_scan as f64));
    // weak shocks park the root just under gamma, so ladder that end too
    candidates.extend((1..=12).map(|j| gm_up - width * 10f64.powi(-j)));
    candidates.sort_by(f64::total_cmp);
    let mut bracket: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    for &x in &candidates {
        if let Some(v) = f(x)? {
            if let Some((px, pv)) = prev {
                if pv < 0.0 && v >= 0.0 {
                    bracket = Some((px, x));
                    break;
                }
            }
            prev = Some((x, v));
        }
    }

    let gm0 = if let Some((mut lo, mut hi)) = bracket {
        let mut flo = f(lo)?.expect("bracket endpoint on branch");
        for _ in 0..200 {
            if hi - lo <= 1e-14 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match f(mid)? {
                Some(v) if v * flo <= 0.0 => hi = mid,
                Some(v) => {
                    lo = mid;
                    flo = v;
                }
                None => lo = mid,
            }
        }
        0.5 * (lo + hi)
    } else {
        // weak shock: the root has merged into an O(strength) neighborhood of
        // gamma where the scan cannot see it. Use the quadratic normal form
        // of the scalar residual at gamma to place the nontrivial root.
        let h = 1e-4 * up.gamma;
        let fm = f(up.gamma - h)?;
        let fp = f(up.gamma + h)?;
        let f0 = f(up.gamma)?;
        match (fm, f0, fp) {
            (Some(a), Some(b), Some(c)) => {
                let d1 = (c - a) / (2.0 * h);
                let d2 = (c - 2.0 * b + a) / (h * h);
                if d2.abs() < 1e-300 {
                    return Err(Error::Bracket { context: "solve_downstream", lo: gm_low, hi: gm_up });
                }
                let delta = -2.0 * d1 / d2;
                let cand = up.gamma + delta;
                if !(cand > gm_low && cand < up.gamma) {
                    return Err(Error::Bracket { context: "solve_downstream", lo: gm_low, hi: gm_up });
                }
                cand
            }
            _ => return Err(Error::Bracket { context: "solve_downstream", lo: gm_low, hi: gm_up }),
        }
    };
    let (ut0, _) = branch_from_gamma(k_inv, gm0, gas)?.ok_or_else(|| Error::Inconsistency {
        context: "shock::solve_downstream",
        message: "scalar root fell outside the physical branch".into(),
    })?;

    // Newton polish on the full 2x2 system
    let (ut, gm, res, iterations) = newton_jump(&up, gas, ut0, gm0, scale)?;
    if res > 1e-12 {
        return Err(Error::NewtonDiverged {
            context: "solve_downstream polish",
            residual: res,
            iterations,
            u_tilde: ut,
            gamma: gm,
        });
    }
    // reject convergence back to the no-jump root
    if (gm - up.gamma).abs() < 0.1 * (up.gamma - gm0).abs() {
        return Err(Error::NewtonDiverged {
            context: "solve_downstream polish (trivial root)",
            residual: res,
            iterations,
            u_tilde: ut,
            gamma: gm,
        });
    }
    assemble(upstream, &up, gas, s, ut, gm, res, iterations)
}

/// Solve the jump conditions for the perturbed state; plain interface.
pub fn solve_downstream(upstream: &FlowState, sigma: f64, gas: GasKind) -> Result<FlowState> {
    Ok(solve_downstream_full(upstream, sigma, gas)?.state)
}

/// Record of a located shock.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShockRecord {
    /// similarity coordinate of the shock
    pub s_star: f64,
    /// shock speed sigma = 1/s_star
    pub sigma: f64,
    /// unperturbed state ahead (from the smooth arc)
    pub upstream: FlowState,
    /// perturbed state behind; its velocity vanishes at s_star
    pub downstream: FlowState,
    /// min(sigma - lambda_up, lambda_down - sigma) > 0
    pub lax_margin: f64,
    /// exp of the entropy-surrogate jump, > 1 across an admissible shock
    pub entropy_ratio: f64,
}

/// One scanned point of the downstream-velocity curve.
pub struct ScanPoint {
    pub s: f64,
    pub upstream: FlowState,
    pub solve: DownstreamSolve,
}

/// Evaluate the downstream state along the pre-shock arc at n points of
/// (sqrt(3), s_bar); diagnostics for admissibility and monotonicity checks.
pub fn scan_downstream(run: &BlowupRun, params: &SimParams, n: usize) -> Result<Vec<ScanPoint>> {
    let lo = 3.0_f64.sqrt() * (1.0 + 1e-9);
    let hi = run.s_bar * (1.0 - 1e-9);
    if !(hi > lo) {
        return Err(Error::Bracket { context: "scan_downstream", lo, hi });
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let s = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let upstream = run.segment.state_at(s);
        let solve = solve_downstream_full(&upstream, 1.0 / s, params.gas)?;
        out.push(ScanPoint { s, upstream, solve });
    }
    Ok(out)
}

/// Locate the unique shock point s* where the downstream velocity vanishes,
/// by a pre-scan certifying a single sign change followed by bisection.
pub fn find_shock_sstar(run: &BlowupRun, params: &SimParams) -> Result<ShockRecord> {
    find_shock_sstar_opts(run, params, 1e-6, 64)
}

pub fn find_shock_sstar_opts(
    run: &BlowupRun,
    params: &SimParams,
    u_tol: f64,
    n_scan: usize,
) -> Result<ShockRecord> {
    params.validate()?;
    let scan = scan_downstream(run, params, n_scan.max(8))?;
    let mut changes = 0usize;
    let mut lo = scan[0].s;
    let mut hi = scan[scan.len() - 1].s;
    for w in scan.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.solve.state.u > 0.0 && b.solve.state.u <= 0.0 {
            changes += 1;
            lo = a.s;
            hi = b.s;
        }
    }
    if changes != 1 {
        return Err(Error::Inconsistency {
            context: "shock::find_shock_sstar",
            message: format!(
                "expected one sign change of the downstream velocity over ({:.6}, {:.6}), found {changes}",
                scan[0].s,
                scan[scan.len() - 1].s
            ),
        });
    }
    let u_delta_at = |s: f64| -> Result<f64> {
        let upstream = run.segment.state_at(s);
        Ok(solve_downstream_full(&upstream, 1.0 / s, params.gas)?.state.u)
    };
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if u_delta_at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_star = 0.5 * (lo + hi);
    let upstream = run.segment.state_at(s_star);
    let solve = solve_downstream_full(&upstream, 1.0 / s_star, params.gas)?;
    if solve.state.u.abs() > u_tol {
        return Err(Error::Inconsistency {
            context: "shock::find_shock_sstar",
            message: format!("bisection converged but |u_delta| = {:.3e} exceeds {u_tol:.1e}", solve.state.u.abs()),
        });
    }
    let sigma = 1.0 / s_star;
    Ok(ShockRecord {
        s_star,
        sigma,
        upstream,
        downstream: solve.state,
        lax_margin: (sigma - solve.lambda_up).min(solve.lambda_down - sigma),
        entropy_ratio: solve.entropy_ratio,
    })
}
