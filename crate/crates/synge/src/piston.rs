//! The spherical piston problem: a sphere expanding at constant speed alpha
//! drives the surrounding gas, initially at rest at (p0, gamma0).
//!
//! The self-similar solution is a rest state ahead of a forward shock at
//! s_P, followed by an ODE arc behind it on which the denominator g is
//! negative, ending on the piston face where u(s_tilde) = 1/s_tilde = alpha.
//! s_P is found by bisection on the continuous map s_P -> s_tilde(s_P),
//! whose range sweeps all of (1, infinity) as s_P runs over
//! (1, s_bar = sqrt(e_p(gamma0))).

use crate::eos::{self, GasKind, IsentropeRef};
use crate::error::{Error, Result};
use crate::flow::{factor_a, factor_b, FlowState, OdeSegment, SimParams, TerminalEvent};
use crate::ode::{self, EventFn, Halt};
use crate::shock::{solve_downstream_full, ShockRecord};

/// Problem data for the constant-speed piston.
#[derive(Debug, Clone, Copy)]
pub struct PistonProblem {
    /// piston speed in units of c, inside (0, 1)
    pub alpha: f64,
    pub p0: f64,
    pub gamma0: f64,
    pub gas: GasKind,
    /// spatial dimension, 2 or 3
    pub d: u32,
}

impl PistonProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain("PistonProblem", format!("alpha must be in (0,1), got {}", self.alpha)));
        }
        if !(self.p0 > 0.0 && self.gamma0 > 0.0) {
            return Err(Error::domain("PistonProblem", "need p0 > 0 and gamma0 > 0"));
        }
        if self.d != 2 && self.d != 3 {
            return Err(Error::domain("PistonProblem", format!("d must be 2 or 3, got {}", self.d)));
        }
        Ok(())
    }

    fn params(&self) -> SimParams {
        let mut p = SimParams::new(self.gas);
        p.d = self.d;
        p
    }
}

/// Assembled piston solution.
pub struct PistonSolution {
    /// shock coordinate
    pub s_p: f64,
    /// the forward shock off the rest state
    pub shock: ShockRecord,
    /// the arc from the shock to the piston face
    pub arc: OdeSegment,
    /// where u(s_tilde) s_tilde = 1; equals 1/alpha at the solution
    pub s_tilde: f64,
    /// |u(1/alpha) - alpha|
    pub residual: f64,
}

/// Downstream state of a forward shock running into the rest state at speed
/// sigma_P = 1/s_P. Requires 1 < s_P < sqrt(e_p(gamma0)).
pub fn shock_from_rest(s_p: f64, p0: f64, gamma0: f64, gas: GasKind) -> Result<ShockRecord> {
    let s_bar = eos::e_p(gas, gamma0)?.sqrt();
    if !(s_p > 1.0 && s_p < s_bar) {
        return Err(Error::domain(
            "shock_from_rest",
            format!("require 1 < s_P < sqrt(e_p(gamma0)) = {s_bar}, got {s_p}"),
        ));
    }
    let upstream = FlowState { u: 0.0, gamma: gamma0, p: p0 };
    let sigma = 1.0 / s_p;
    let solve = solve_downstream_full(&upstream, sigma, gas)?;
    let down = solve.state;
    if !(down.u > 0.0 && down.u < sigma) {
        return Err(Error::Inconsistency {
            context: "piston::shock_from_rest",
            message: format!("downstream velocity {} outside (0, sigma = {sigma})", down.u),
        });
    }
    // behind this shock the denominator is negative: A > 0 and B < 0
    let a = factor_a(s_p, &down, gas)?;
    let b = factor_b(s_p, &down, gas)?;
    if !(a > 0.0 && b < 0.0) {
        return Err(Error::Inconsistency {
            context: "piston::shock_from_rest",
            message: format!("expected A > 0 > B behind the piston shock, got A = {a}, B = {b}"),
        });
    }
    Ok(ShockRecord {
        s_star: s_p,
        sigma,
        upstream,
        downstream: down,
        lax_margin: (sigma - solve.lambda_up).min(solve.lambda_down - sigma),
        entropy_ratio: solve.entropy_ratio,
    })
}

/// Integrate the arc behind the piston shock until u s = 1; returns
/// (s_tilde, arc). The event is guaranteed before `horizon`, else an error.
pub fn arc_until_piston(down: &FlowState, s_p: f64, params: &SimParams, horizon: f64) -> Result<(f64, OdeSegment)> {
    params.validate()?;
    let isentrope = IsentropeRef::new(down.gamma, down.p)?;
    let gas = params.gas;
    let d = params.d;
    let rhs = move |s: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
        let pt = eos::GasPoint::new(gas, y[1])?;
        let (du, dgamma, dlnp) = crate::flow::rhs_parts(s, y[0], &pt, d)?;
        Ok([du, dgamma, dlnp])
    };
    let piston_face = |s: f64, y: &[f64; 3]| y[0] * s - 1.0;
    let events = [EventFn { f: &piston_face, terminal: true }];
    let sol = ode::integrate(
        &rhs,
        s_p,
        horizon,
        [down.u, down.gamma, down.p.ln()],
        &events,
        None,
        &params.ode_options(),
    )?;
    match sol.halt {
        Halt::Event(0) => {
            let s_tilde = sol.s_end;
            let arc = crate::flow::seg_from_s_solution(sol, TerminalEvent::UHitsOneOverS, isentrope);
            Ok((s_tilde, arc))
        }
        Halt::End => Err(Error::Inconsistency {
            context: "piston::arc_until_piston",
            message: format!("piston face not reached before s = {horizon}"),
        }),
        other => Err(Error::Inconsistency {
            context: "piston::arc_until_piston",
            message: format!("arc integration halted with {other:?} at s = {}", sol.s_end),
        }),
    }
}

/// Solve the piston problem: find s_P with s_tilde(s_P) = 1/alpha.
pub fn solve_piston(problem: &PistonProblem, tol: f64) -> Result<PistonSolution> {
    problem.validate()?;
    let params = problem.params();
    let s_bar = eos::e_p(problem.gas, problem.gamma0)?.sqrt();
    let target = 1.0 / problem.alpha;
    let horizon = (10.0 * target).max(100.0);

    let s_tilde_of = |s_p: f64| -> Result<f64> {
        let rec = match shock_from_rest(s_p, problem.p0, problem.gamma0, problem.gas) {
            Ok(rec) => rec,
            // too close to the characteristic limit to resolve in f64: the
            // shock is infinitesimal there and s_tilde diverges
            Err(_) if s_p > 0.99 * s_bar => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        };
        match arc_until_piston(&rec.downstream, s_p, &params, horizon) {
            Ok((s_tilde, _)) => Ok(s_tilde),
            Err(Error::Inconsistency { message, .. }) if message.contains("not reached") => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };

    // bracket: s_tilde -> 1 as s_P -> 1 and sup s_tilde = infinity toward s_bar
    let mut lo = 1.0 + 1e-9 * s_bar.max(1.0);
    let mut hi = s_bar * (1.0 - 1e-9);
    let f_lo = s_tilde_of(lo)? - target;
    if f_lo > 0.0 {
        return Err(Error::Bracket { context: "solve_piston", lo, hi });
    }
    // hi side: walk inward if the weak-shock endpoint itself fails to bracket
    let mut f_hi = s_tilde_of(hi)? - target;
    let mut guard = 0;
    while f_hi <= 0.0 {
        guard += 1;
        if guard > 8 {
            return Err(Error::Bracket { context: "solve_piston", lo, hi });
        }
        hi = s_bar - (s_bar - hi) * 0.1;
        f_hi = s_tilde_of(hi)? - target;
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f_mid = s_tilde_of(mid)? - target;
        if f_mid.abs() < 0.2 * tol * target.max(1.0) || (hi - lo) < 1e-14 * hi {
            break;
        }
        if f_mid > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s_p = mid;
    let shock = shock_from_rest(s_p, problem.p0, problem.gamma0, problem.gas)?;
    let (s_tilde, arc) = arc_until_piston(&shock.downstream, s_p, &params, horizon)?;
    let u_at_piston = arc.state_at(target.min(s_tilde)).u;
    let residual = (u_at_piston - problem.alpha).abs().max((s_tilde - target).abs() * problem.alpha * problem.alpha);
    if residual > tol {
        let hint = if s_p > 0.99 * s_bar {
            "; the matching point lies in the weak-shock corner where s_tilde grows only \
             logarithmically in the shock strength, below f64 resolution here"
        } else {
            ""
        };
        return Err(Error::Inconsistency {
            context: "piston::solve_piston",
            message: format!("matching residual {residual:.3e} exceeds tolerance {tol:.1e}{hint}"),
        });
    }
    Ok(PistonSolution { s_p, shock, arc, s_tilde, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::denom_g;

    #[test]
    fn shock_from_rest_limits() {
        let gas = GasKind::Monatomic;
        let s_bar = eos::e_p(gas, 3.0).unwrap().sqrt();
        // s_P -> 1: downstream velocity approaches c
        let rec = shock_from_rest(1.0 + 1e-3, 1.0, 3.0, gas).unwrap();
        assert!(rec.downstream.u > 0.9, "u_delta = {}", rec.downstream.u);
        // s_P -> s_bar: downstream velocity approaches 0
        let rec = shock_from_rest(s_bar * (1.0 - 1e-6), 1.0, 3.0, gas).unwrap();
        assert!(rec.downstream.u.abs() < 1e-3, "u_delta = {}", rec.downstream.u);
        // admissibility holds at an interior s_P
        let rec = shock_from_rest(0.5 * (1.0 + s_bar), 1.0, 3.0, gas).unwrap();
        assert!(rec.lax_margin > 0.0);
        assert!(rec.entropy_ratio > 1.0);
        // out-of-range s_P rejected
        assert!(shock_from_rest(s_bar * 1.01, 1.0, 3.0, gas).is_err());
        assert!(shock_from_rest(0.99, 1.0, 3.0, gas).is_err());
    }

    #[test]
    fn arc_reaches_piston_face_with_monotone_velocity() {
        let gas = GasKind::Monatomic;
        let s_bar = eos::e_p(gas, 3.0).unwrap().sqrt();
        let s_p = 0.5 * (1.0 + s_bar);
        let rec = shock_from_rest(s_p, 1.0, 3.0, gas).unwrap();
        let params = SimParams::new(gas);
        let (s_tilde, arc) = arc_until_piston(&rec.downstream, s_p, &params, 200.0).unwrap();
        assert!(s_tilde > s_p);
        let end = arc.last_state();
        assert!((end.u * s_tilde - 1.0).abs() < 1e-9);
        // 1/s_tilde exceeds the post-shock velocity since u grows along the arc
        assert!(1.0 / s_tilde > rec.downstream.u);
        let mut prev_u = -1.0;
        let mut prev_p = 0.0;
        for (s, q) in arc.s_grid.iter().zip(&arc.states) {
            assert!(q.u > prev_u, "u not increasing at s = {s}");
            assert!(q.p > prev_p, "p not increasing at s = {s}");
            prev_u = q.u;
            prev_p = q.p;
            // the arc lives in the g < 0 region
            assert!(denom_g(*s, q, gas).unwrap() < 0.0, "g >= 0 at s = {s}");
        }
    }

    #[test]
    fn piston_solution_alpha_half() {
        let problem = PistonProblem {
            alpha: 0.5,
            p0: 1.0,
            gamma0: 3.0,
            gas: GasKind::Monatomic,
            d: 3,
        };
        let sol = solve_piston(&problem, 1e-8).unwrap();
        assert!(sol.residual < 1e-8);
        assert!(1.0 < sol.s_p && sol.s_p < eos::e_p(problem.gas, problem.gamma0).unwrap().sqrt());
        assert!((sol.s_tilde - 2.0).abs() < 1e-6);
        // weak solution checks: shock admissible, boundary matched
        assert!(sol.shock.lax_margin > 0.0);
        assert!(sol.shock.entropy_ratio > 1.0);
        // re-solving from a perturbed bracket reproduces s_P
        let again = solve_piston(&problem, 1e-8).unwrap();
        assert!((again.s_p - sol.s_p).abs() < 1e-8 * sol.s_p);
    }

    #[test]
    fn endpoint_trends_in_alpha() {
        let gas = GasKind::Diatomic;
        let mut prev_sp = 0.0;
        let mut prev_stilde = 0.0;
        for alpha in [0.9, 0.5, 0.25] {
            let problem = PistonProblem { alpha, p0: 1.0, gamma0: 1.0, gas, d: 3 };
            let sol = solve_piston(&problem, 1e-8).unwrap();
            // decreasing alpha moves s_P outward toward s_bar and grows s_tilde
            assert!(sol.s_p > prev_sp);
            assert!(sol.s_tilde > prev_stilde);
            prev_sp = sol.s_p;
            prev_stilde = sol.s_tilde;
        }
    }

}
