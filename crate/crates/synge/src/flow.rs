//! The self-similar radial ODE system in s = t/r and its regime analysis.
//!
//! With c = 1 the system is
//!
//! ```text
//!   du/ds = (d-1) u (1 - u^2)(u - s) / g,
//!   dp/ds = (d-1) u (us - 1)(e + p) / g,      g = e_p (us - 1)^2 - (u - s)^2,
//! ```
//!
//! entropy constant along the arc. The pressure equation is traded for a
//! coldness equation d gamma/ds = [gamma/g_i] (d-1) u (us-1) chi_i / g, and
//! ln p is co-integrated as a redundant component so isentrope drift is
//! observable. The denominator factors as g = A B with
//! A = (sqrt(e_p) s - 1) u - (sqrt(e_p) - s) and
//! B = (sqrt(e_p) s + 1) u - (sqrt(e_p) + s); the critical velocity curves
//! phi_A, phi_B are the zeros of A and B in u.
//!
//! For u0 > 0 three regimes occur: expansion into vacuum (large u0),
//! a stationary tail (small u0), and a global smooth solution in between.
//! For u0 < 0 the solution meets phi_A at a finite s_bar where g vanishes,
//! and a shock must be inserted before that point.
//!
//! The vacuum approach (gamma -> infinity at finite s) is integrated in the
//! variable tau = ln gamma once gamma passes a switch threshold: in that
//! parametrization the right-hand sides stay bounded and the endpoint
//! u = 1/s, p = 0 is reached to tolerance rather than stalled at.

use crate::eos::{self, GasKind, GasPoint, IsentropeRef};
use crate::error::{Error, Result};
use crate::ode::{self, EventFn, Halt, Options};
use crate::quad;
use crate::shock::{find_shock_sstar, ShockRecord};
use serde::Serialize;

/// The self-similar unknowns at one similarity coordinate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowState {
    /// radial velocity in units of c
    pub u: f64,
    /// coldness parameter
    pub gamma: f64,
    /// pressure in reference units
    pub p: f64,
}

impl FlowState {
    pub fn new(u: f64, gamma: f64, p: f64) -> Result<FlowState> {
        if !(u.abs() < 1.0) {
            return Err(Error::domain("FlowState", format!("|u| must be < 1 (=c), got {u}")));
        }
        if !(gamma > 0.0) || !(p >= 0.0) {
            return Err(Error::domain(
                "FlowState",
                format!("need gamma > 0 and p >= 0, got gamma = {gamma}, p = {p}"),
            ));
        }
        Ok(FlowState { u, gamma, p })
    }
}

/// Integration parameters.
#[derive(Debug, Clone, Copy)]
pub struct SimParams {
    /// spatial dimension, 2 or 3
    pub d: u32,
    pub gas: GasKind,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// root tolerance for event location, in s
    pub event_tol: f64,
    /// integration horizon in cs units
    pub s_max: f64,
}

impl SimParams {
    pub fn new(gas: GasKind) -> SimParams {
        SimParams {
            d: 3,
            gas,
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            event_tol: 1e-12,
            s_max: 50.0,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.d != 2 && self.d != 3 {
            return Err(Error::domain("SimParams", format!("d must be 2 or 3, got {}", self.d)));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.event_tol > 0.0 && self.s_max > 0.0) {
            return Err(Error::domain("SimParams", "tolerances and s_max must be positive"));
        }
        Ok(())
    }

    pub(crate) fn ode_options(&self) -> Options {
        Options {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            event_tol: self.event_tol,
            ..Options::default()
        }
    }
}

/// How an integrated segment ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalEvent {
    None,
    /// u met the critical curve phi_A (blow-up point s_bar for u0 < 0)
    UHitsPhiA,
    /// vacuum reached: p -> 0 with u -> 1/s
    PHitsZero,
    /// u -> 0 at s = sqrt(e_p) (stationary continuation)
    UHitsZero,
    /// u s = 1 (piston matching point)
    UHitsOneOverS,
    /// denominator vanished away from any expected contact
    GHitsZero,
    /// integrated to s_max
    Horizon,
}

/// Solution regime labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    CaseIVacuum,
    CaseIIStationary,
    CaseIIIGlobal,
    Shocked,
    Constant,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::CaseIVacuum => "CaseI_vacuum",
            Regime::CaseIIStationary => "CaseII_stationary",
            Regime::CaseIIIGlobal => "CaseIII_global",
            Regime::Shocked => "Shocked",
            Regime::Constant => "Constant",
        })
    }
}

enum SegmentDense {
    /// states (u, gamma, ln p) parametrized by s
    ByS(ode::Solution<3>),
    /// states (s, u, ln p) parametrized by tau = ln gamma
    ByTau(ode::Solution<3>),
    /// spatially constant
    Constant(FlowState),
}

/// One smooth arc of the solution with dense interpolation. An arc that
/// expands toward vacuum is stored as two dense phases (s-parametrized, then
/// tau-parametrized) but remains a single physical segment.
pub struct OdeSegment {
    pub s_grid: Vec<f64>,
    pub states: Vec<FlowState>,
    pub terminal_event: TerminalEvent,
    pub isentrope: IsentropeRef,
    phases: Vec<(f64, f64, SegmentDense)>,
}

impl OdeSegment {
    pub fn s_start(&self) -> f64 {
        *self.s_grid.first().expect("segment has points")
    }

    pub fn s_end(&self) -> f64 {
        *self.s_grid.last().expect("segment has points")
    }

    pub fn last_state(&self) -> FlowState {
        *self.states.last().expect("segment has points")
    }

    /// Dense-interpolated state at s inside the segment (clamped outside).
    pub fn state_at(&self, s: f64) -> FlowState {
        let (_, _, dense) = self
            .phases
            .iter()
            .find(|(lo, hi, _)| s <= *hi && s >= *lo)
            .unwrap_or_else(|| if s < self.phases[0].0 { &self.phases[0] } else { self.phases.last().expect("phases") });
        match dense {
            SegmentDense::ByS(sol) => {
                let y = sol.sample(s);
                FlowState { u: y[0], gamma: y[1], p: y[2].exp() }
            }
            SegmentDense::ByTau(sol) => {
                // s(tau) is monotone increasing here; bisect in tau
                let (mut lo, mut hi) = (sol.s_start(), sol.s_end);
                if s <= sol.sample(lo)[0] {
                    let y = sol.sample(lo);
                    return FlowState { u: y[1], gamma: lo.exp(), p: y[2].exp() };
                }
                if s >= sol.sample(hi)[0] {
                    let y = sol.sample(hi);
                    return FlowState { u: y[1], gamma: hi.exp(), p: y[2].exp() };
                }
                for _ in 0..128 {
                    let mid = 0.5 * (lo + hi);
                    if sol.sample(mid)[0] < s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let tau = 0.5 * (lo + hi);
                let y = sol.sample(tau);
                FlowState { u: y[1], gamma: tau.exp(), p: y[2].exp() }
            }
            SegmentDense::Constant(st) => *st,
        }
    }
}

// ---------------------------------------------------------------------------
// pointwise algebra
// ---------------------------------------------------------------------------

/// Denominator g = e_p (us - 1)^2 - (u - s)^2.
pub fn denom_g(s: f64, state: &FlowState, gas: GasKind) -> Result<f64> {
    let ep = eos::e_p(gas, state.gamma)?;
    let us1 = state.u * s - 1.0;
    let ums = state.u - s;
    Ok(ep * us1 * us1 - ums * ums)
}

/// A = (sqrt(e_p) s - 1) u - (sqrt(e_p) - s); g = A * B.
pub fn factor_a(s: f64, state: &FlowState, gas: GasKind) -> Result<f64> {
    let r = eos::e_p(gas, state.gamma)?.sqrt();
    Ok((r * s - 1.0) * state.u - (r - s))
}

/// B = (sqrt(e_p) s + 1) u - (sqrt(e_p) + s).
pub fn factor_b(s: f64, state: &FlowState, gas: GasKind) -> Result<f64> {
    let r = eos::e_p(gas, state.gamma)?.sqrt();
    Ok((r * s + 1.0) * state.u - (r + s))
}

/// phi_A(s) = (sqrt(e_p) - s)/(sqrt(e_p) s - 1), defined for s > 1.
pub fn phi_a(s: f64, gamma: f64, gas: GasKind) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::domain("phi_a", format!("require s > 1 (= 1/c), got {s}")));
    }
    let r = eos::e_p(gas, gamma)?.sqrt();
    Ok((r - s) / (r * s - 1.0))
}

/// phi_B(s) = (sqrt(e_p) + s)/(sqrt(e_p) s + 1), defined for s > 1.
pub fn phi_b(s: f64, gamma: f64, gas: GasKind) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::domain("phi_b", format!("require s > 1 (= 1/c), got {s}")));
    }
    let r = eos::e_p(gas, gamma)?.sqrt();
    Ok((r + s) / (r * s + 1.0))
}

/// Right-hand side of the self-similar system: (du/ds, dgamma/ds, dp/ds).
pub fn rhs(s: f64, state: &FlowState, params: &SimParams) -> Result<(f64, f64, f64)> {
    params.validate()?;
    let pt = GasPoint::new(params.gas, state.gamma)?;
    let (du, dg, dlnp) = rhs_parts(s, state.u, &pt, params.d)?;
    Ok((du, dg, dlnp * state.p))
}

/// (du/ds, dgamma/ds, dlnp/ds) given the gas point; the pressure equation is
/// carried logarithmically.
pub(crate) fn rhs_parts(s: f64, u: f64, pt: &GasPoint, d: u32) -> Result<(f64, f64, f64)> {
    let ep = pt.e_p();
    let us1 = u * s - 1.0;
    let ums = u - s;
    let g = ep * us1 * us1 - ums * ums;
    let scale = ep * us1 * us1 + ums * ums;
    if g.abs() < 1e-14 * scale {
        return Err(Error::SingularDenominator {
            s,
            g_abs: g.abs(),
            floor: 1e-14 * scale,
        });
    }
    let df = (d - 1) as f64;
    let du = df * u * (1.0 - u * u) * ums / g;
    let common = df * u * us1 / g;
    let chi = pt.chi();
    let dlnp = common * chi;
    let dgamma = pt.gamma / pt.gi() * common * chi;
    Ok((du, dgamma, dlnp))
}

/// Threshold velocity of the vacuum case: u0 above this guarantees expansion
/// into vacuum. ubar = tanh(I_p) with
/// I_p = int_{gamma_0}^{inf} sqrt(g_i (g_i + 1) / chi_i) / gamma d gamma.
pub fn vacuum_threshold_ubar(gas: GasKind, re: &IsentropeRef) -> Result<f64> {
    vacuum_threshold_ubar_with_cutoff(gas, re, 1e4)
}

/// Same, with an explicit split point between the log-variable quadrature and
/// the exact substitution x = 1/sqrt(gamma) that integrates the tail to
/// infinity; the result is split-point independent to quadrature tolerance.
pub fn vacuum_threshold_ubar_with_cutoff(gas: GasKind, re: &IsentropeRef, cutoff: f64) -> Result<f64> {
    let integrand = |gamma: f64| -> f64 {
        match GasPoint::new(gas, gamma) {
            Ok(pt) => {
                let g = pt.gi();
                ((g * (g + 1.0)) / pt.chi()).sqrt() / gamma
            }
            Err(_) => f64::NAN,
        }
    };
    let g0 = re.gamma_ref;
    let cutoff = cutoff.max(2.0 * g0);
    // head in log gamma
    let (head, _) = quad::adaptive(
        "vacuum_threshold_ubar",
        |x| {
            let gamma = x.exp();
            integrand(gamma) * gamma
        },
        g0.ln(),
        cutoff.ln(),
        1e-13,
        1e-11,
    )?;
    // tail via x = 1/sqrt(gamma): the integrand of 2 x^{-3} f(x^{-2}) tends to
    // the finite limit 2 sqrt(g (g+1)) as x -> 0, so no truncation remains
    let (tail, _) = quad::adaptive(
        "vacuum_threshold_ubar",
        |x| {
            if x <= 0.0 {
                let pt = GasPoint::new(gas, 1e18).expect("valid gamma");
                let g = pt.gi();
                return 2.0 * (g * (g + 1.0)).sqrt();
            }
            let gamma = 1.0 / (x * x);
            integrand(gamma) * 2.0 / (x * x * x)
        },
        0.0,
        1.0 / cutoff.sqrt(),
        1e-13,
        1e-11,
    )?;
    Ok((head + tail).tanh())
}

// ---------------------------------------------------------------------------
// integration driver
// ---------------------------------------------------------------------------

/// gamma beyond which the vacuum approach switches to tau = ln gamma.
fn gamma_switch(gamma0: f64) -> f64 {
    1e6_f64.max(1e3 * gamma0)
}

const VACUUM_US_TOL: f64 = 1e-9;
const VACUUM_LN_P: f64 = -32.0; // p < ~1.3e-14 in reference units
const PHI_GAP_TOL: f64 = 1e-10;

fn grid_of_s_solution(sol: &ode::Solution<3>) -> (Vec<f64>, Vec<FlowState>) {
    let mut s_grid = Vec::with_capacity(sol.steps.len() + 1);
    let mut states = Vec::with_capacity(sol.steps.len() + 1);
    if let Some(first) = sol.steps.first() {
        s_grid.push(first.s0);
        states.push(FlowState { u: first.y0[0], gamma: first.y0[1], p: first.y0[2].exp() });
    }
    for st in &sol.steps {
        s_grid.push(st.s1);
        states.push(FlowState { u: st.y1[0], gamma: st.y1[1], p: st.y1[2].exp() });
    }
    (s_grid, states)
}

fn grid_of_tau_solution(sol: &ode::Solution<3>) -> (Vec<f64>, Vec<FlowState>) {
    let mut s_grid = Vec::new();
    let mut states = Vec::new();
    if let Some(first) = sol.steps.first() {
        s_grid.push(first.y0[0]);
        states.push(FlowState { u: first.y0[1], gamma: first.s0.exp(), p: first.y0[2].exp() });
    }
    for st in &sol.steps {
        s_grid.push(st.y1[0]);
        states.push(FlowState { u: st.y1[1], gamma: st.s1.exp(), p: st.y1[2].exp() });
    }
    (s_grid, states)
}

pub(crate) fn seg_from_s_solution(sol: ode::Solution<3>, terminal: TerminalEvent, isentrope: IsentropeRef) -> OdeSegment {
    let (s_grid, states) = grid_of_s_solution(&sol);
    let range = (
        *s_grid.first().unwrap_or(&sol.s_end),
        *s_grid.last().unwrap_or(&sol.s_end),
    );
    OdeSegment {
        s_grid,
        states,
        terminal_event: terminal,
        isentrope,
        phases: vec![(range.0, range.1, SegmentDense::ByS(sol))],
    }
}

/// An s-phase continued by a tau = ln gamma phase, as one physical arc.
fn seg_from_two_phases(
    s_sol: ode::Solution<3>,
    tau_sol: ode::Solution<3>,
    terminal: TerminalEvent,
    isentrope: IsentropeRef,
) -> OdeSegment {
    let (mut s_grid, mut states) = grid_of_s_solution(&s_sol);
    let (tau_grid, tau_states) = grid_of_tau_solution(&tau_sol);
    let split = *s_grid.last().expect("s phase nonempty");
    let tau_end = *tau_grid.last().unwrap_or(&split);
    for (s, st) in tau_grid.into_iter().zip(tau_states) {
        if s > split {
            s_grid.push(s);
            states.push(st);
        }
    }
    OdeSegment {
        s_grid,
        states,
        terminal_event: terminal,
        isentrope,
        phases: vec![
            (0.0, split, SegmentDense::ByS(s_sol)),
            (split, tau_end, SegmentDense::ByTau(tau_sol)),
        ],
    }
}

/// Event value sqrt(e_p(gamma)) - s, armed only past s = 1: its zero is where
/// phi_A vanishes, i.e. the stationary endpoint of Case II (and the point
/// s_hat on blow-up runs).
fn event_phi_a_zero(gas: GasKind) -> impl Fn(f64, &[f64; 3]) -> f64 {
    move |s, y| {
        if s <= 1.0 {
            return 1.0;
        }
        match eos::e_p(gas, y[1]) {
            Ok(ep) => ep.sqrt() - s,
            Err(_) => f64::NAN,
        }
    }
}

/// Event value u - phi_A for s > 1.
fn event_u_minus_phi_a(gas: GasKind) -> impl Fn(f64, &[f64; 3]) -> f64 {
    move |s, y| {
        if s <= 1.0 {
            return -1.0;
        }
        match eos::e_p(gas, y[1]) {
            Ok(ep) => {
                let r = ep.sqrt();
                y[0] - (r - s) / (r * s - 1.0)
            }
            Err(_) => f64::NAN,
        }
    }
}

/// Diagnostic event u - s (the unique crossing in (0, 1) for u0 > 0).
fn event_u_minus_s() -> impl Fn(f64, &[f64; 3]) -> f64 {
    move |s, y| y[0] - s
}

/// The smooth arc keeps sign(u), |u| < 1 and p > 0; numerical violations
/// mean the integration left its guaranteed regime.
fn validate_segment(seg: &OdeSegment, u0: f64) -> Result<()> {
    for (s, q) in seg.s_grid.iter().zip(&seg.states) {
        let ok = q.u.abs() < 1.0
            && q.p > 0.0
            && q.gamma > 0.0
            && (*s == 0.0 || q.u == 0.0 || q.u.signum() == u0.signum());
        if !ok {
            return Err(Error::Inconsistency {
                context: "flow::integrate",
                message: format!(
                    "state left the guaranteed regime at s = {s}: u = {}, gamma = {}, p = {}",
                    q.u, q.gamma, q.p
                ),
            });
        }
    }
    Ok(())
}

/// Integrate the system from s = 0 with the given initial state; stops at the
/// first terminal event or at s_max. This is the common machinery behind
/// `classify_positive` and `find_blowup_sbar`.
pub fn integrate(initial: &FlowState, params: &SimParams) -> Result<OdeSegment> {
    params.validate()?;
    let isentrope = IsentropeRef::new(initial.gamma, initial.p)?;
    if initial.u == 0.0 {
        let st = *initial;
        return Ok(OdeSegment {
            s_grid: vec![0.0, params.s_max],
            states: vec![st, st],
            terminal_event: TerminalEvent::Horizon,
            isentrope,
            phases: vec![(0.0, params.s_max, SegmentDense::Constant(st))],
        });
    }
    if initial.u > 0.0 {
        let (seg, _regime) = run_positive(initial, params)?;
        validate_segment(&seg, initial.u)?;
        Ok(seg)
    } else {
        let run = find_blowup_sbar(initial, params)?;
        Ok(run.segment)
    }
}

fn gas_rhs(params: &SimParams) -> impl Fn(f64, &[f64; 3]) -> Result<[f64; 3]> + '_ {
    move |s: f64, y: &[f64; 3]| {
        let pt = GasPoint::new(params.gas, y[1])?;
        let (du, dg, dlnp) = rhs_parts(s, y[0], &pt, params.d)?;
        Ok([du, dg, dlnp])
    }
}

/// tau-parametrized right-hand side for the vacuum approach:
/// state (s, u, ln p), independent variable tau = ln gamma.
fn tau_rhs(params: &SimParams) -> impl Fn(f64, &[f64; 3]) -> Result<[f64; 3]> + '_ {
    move |tau: f64, z: &[f64; 3]| {
        let gamma = tau.exp();
        let pt = GasPoint::new(params.gas, gamma)?;
        let (s, u) = (z[0], z[1]);
        let ep = pt.e_p();
        let us1 = u * s - 1.0;
        let ums = u - s;
        let g = ep * us1 * us1 - ums * ums;
        let gd = pt.gi();
        let chi = pt.chi();
        let df = (params.d - 1) as f64;
        let ds = gd * g / (df * u * us1 * chi);
        let du = (1.0 - u * u) * ums * gd / (us1 * chi);
        let dlnp = gd;
        Ok([ds, du, dlnp])
    }
}

/// Outcome of a positive-u0 run: the integrated arc and its regime.
fn run_positive(initial: &FlowState, params: &SimParams) -> Result<(OdeSegment, Regime)> {
    let isentrope = IsentropeRef::new(initial.gamma, initial.p)?;
    let rhs_s = gas_rhs(params);
    let ev_stationary = event_phi_a_zero(params.gas);
    let ev_us = event_u_minus_s();
    let events = [
        EventFn { f: &ev_stationary, terminal: true },
        EventFn { f: &ev_us, terminal: false },
    ];
    let g_sw = gamma_switch(initial.gamma);
    let to_vacuum = move |_s: f64, y: &[f64; 3]| y[1] >= g_sw;
    let y0 = [initial.u, initial.gamma, initial.p.ln()];
    let sol = ode::integrate(
        &rhs_s,
        0.0,
        params.s_max,
        y0,
        &events,
        Some(&to_vacuum),
        &params.ode_options(),
    )?;

    match sol.halt {
        Halt::End => Ok((
            seg_from_s_solution(sol, TerminalEvent::Horizon, isentrope),
            Regime::CaseIIIGlobal,
        )),
        Halt::Event(0) => {
            // stationary point: u must have collapsed together with phi_A
            let u_end = sol.y_end[0];
            if u_end.abs() > 1e-6 {
                return Err(Error::Inconsistency {
                    context: "flow::classify_positive",
                    message: format!("phi_A vanished at s = {} but u = {u_end}", sol.s_end),
                });
            }
            Ok((
                seg_from_s_solution(sol, TerminalEvent::UHitsZero, isentrope),
                Regime::CaseIIStationary,
            ))
        }
        Halt::Predicate => {
            // vacuum approach: continue in tau = ln gamma
            let s_sw = sol.s_end;
            let y_sw = sol.y_end;
            let rhs_t = tau_rhs(params);
            let tau0 = y_sw[1].ln();
            let s_max = params.s_max;
            let vac = move |_tau: f64, z: &[f64; 3]| {
                ((z[1] * z[0] - 1.0).abs() < VACUUM_US_TOL && z[2] < VACUUM_LN_P) || z[0] >= s_max
            };
            let tsol = ode::integrate(
                &rhs_t,
                tau0,
                tau0 + 80.0,
                [s_sw, y_sw[0], y_sw[2]],
                &[],
                Some(&vac),
                &params.ode_options(),
            )?;
            match tsol.halt {
                Halt::Predicate => {
                    let (event, regime) = if tsol.y_end[0] >= params.s_max {
                        (TerminalEvent::Horizon, Regime::CaseIIIGlobal)
                    } else {
                        (TerminalEvent::PHitsZero, Regime::CaseIVacuum)
                    };
                    Ok((seg_from_two_phases(sol, tsol, event, isentrope), regime))
                }
                other => Err(Error::Inconsistency {
                    context: "flow::vacuum_phase",
                    message: format!(
                        "vacuum approach ended with {other:?} at tau = {}, s = {}, u s - 1 = {:.3e}",
                        tsol.s_end,
                        tsol.y_end[0],
                        tsol.y_end[1] * tsol.y_end[0] - 1.0
                    ),
                }),
            }
        }
        Halt::Event(_) => Err(Error::Inconsistency {
            context: "flow::classify_positive",
            message: "unexpected event for u0 > 0".into(),
        }),
        Halt::StepSizeFloor => Err(Error::StepSizeUnderflow { s: sol.s_end }),
    }
}

/// Classify the regime for u0 in (0, 1) and return the solution segments.
pub fn classify_positive(initial: &FlowState, params: &SimParams) -> Result<(Regime, Vec<OdeSegment>)> {
    if !(initial.u > 0.0 && initial.u < 1.0) {
        return Err(Error::domain("classify_positive", format!("require u0 in (0,1), got {}", initial.u)));
    }
    let (seg, regime) = run_positive(initial, params)?;
    Ok((regime, vec![seg]))
}

/// Blow-up analysis for u0 in (-1, 0): locates s_hat (phi_A = 0) and s_bar
/// (u = phi_A, g -> 0).
pub struct BlowupRun {
    pub segment: OdeSegment,
    /// where phi_A crosses zero with u still negative
    pub s_hat: f64,
    /// where the solution meets phi_A and the denominator vanishes
    pub s_bar: f64,
}

pub fn find_blowup_sbar(initial: &FlowState, params: &SimParams) -> Result<BlowupRun> {
    params.validate()?;
    if !(initial.u > -1.0 && initial.u < 0.0) {
        return Err(Error::domain("find_blowup_sbar", format!("require u0 in (-1,0), got {}", initial.u)));
    }
    let isentrope = IsentropeRef::new(initial.gamma, initial.p)?;
    let rhs_s = gas_rhs(params);
    let ev_hat = event_phi_a_zero(params.gas);
    let ev_gap = event_u_minus_phi_a(params.gas);
    let events = [
        EventFn { f: &ev_hat, terminal: false },
        EventFn { f: &ev_gap, terminal: true },
    ];
    let gas = params.gas;
    let stall = move |s: f64, y: &[f64; 3]| {
        if s <= 1.0 {
            return false;
        }
        match eos::e_p(gas, y[1]) {
            Ok(ep) => {
                let r = ep.sqrt();
                let phi = (r - s) / (r * s - 1.0);
                (phi - y[0]).abs() < PHI_GAP_TOL * phi.abs().max(1.0)
            }
            Err(_) => false,
        }
    };
    let y0 = [initial.u, initial.gamma, initial.p.ln()];
    let sol = ode::integrate(
        &rhs_s,
        0.0,
        params.s_max,
        y0,
        &events,
        Some(&stall),
        &params.ode_options(),
    )?;
    let s_hat = sol
        .events
        .iter()
        .find(|e| e.event_index == 0)
        .map(|e| e.s)
        .ok_or_else(|| Error::Inconsistency {
            context: "flow::find_blowup_sbar",
            message: format!("phi_A never vanished before s = {}", sol.s_end),
        })?;
    let s_bar = match sol.halt {
        Halt::Event(1) | Halt::Predicate => sol.s_end,
        Halt::StepSizeFloor => {
            // a stall is only acceptable if it is the phi_A contact
            let gap = phi_a(sol.s_end, sol.y_end[1], params.gas)? - sol.y_end[0];
            if gap.abs() > 1e-6 {
                return Err(Error::Inconsistency {
                    context: "flow::find_blowup_sbar",
                    message: format!("step collapse at s = {} with |u - phi_A| = {gap}", sol.s_end),
                });
            }
            sol.s_end
        }
        _ => {
            // genuinely possible deep in the classical regime, where the
            // contact point grows exponentially in |u0| / sound speed
            return Err(Error::Inconsistency {
                context: "flow::find_blowup_sbar",
                message: format!(
                    "u has not met phi_A by s_max = {}; the contact exists at finite s, raise s_max to reach it",
                    params.s_max
                ),
            })
        }
    };
    let segment = seg_from_s_solution(sol, TerminalEvent::UHitsPhiA, isentrope);
    validate_segment(&segment, initial.u)?;
    Ok(BlowupRun { segment, s_hat, s_bar })
}

// ---------------------------------------------------------------------------
// assembled solutions
// ---------------------------------------------------------------------------

/// A complete self-similar solution: ordered smooth segments, an optional
/// shock, and the trailing constant state.
pub struct SelfSimSolution {
    pub regime: Regime,
    pub segments: Vec<OdeSegment>,
    pub shock: Option<ShockRecord>,
    /// constant state continuing the solution beyond the last segment
    pub tail: Option<FlowState>,
}

/// Solve the radial initial-value problem for any u0 in (-1, 1).
pub fn solve_radial(initial: &FlowState, params: &SimParams) -> Result<SelfSimSolution> {
    params.validate()?;
    if initial.u == 0.0 {
        let seg = integrate(initial, params)?;
        return Ok(SelfSimSolution {
            regime: Regime::Constant,
            segments: vec![seg],
            shock: None,
            tail: Some(*initial),
        });
    }
    if initial.u > 0.0 {
        let (regime, segments) = classify_positive(initial, params)?;
        let tail = match regime {
            Regime::CaseIIStationary => {
                let last = segments.last().expect("segment").last_state();
                Some(FlowState { u: 0.0, gamma: last.gamma, p: last.p })
            }
            Regime::CaseIVacuum => {
                let s_end = segments.last().expect("segment").s_end();
                Some(FlowState { u: 1.0 / s_end, gamma: f64::INFINITY, p: 0.0 })
            }
            _ => None,
        };
        return Ok(SelfSimSolution { regime, segments, shock: None, tail });
    }
    let run = find_blowup_sbar(initial, params)?;
    let record = find_shock_sstar(&run, params)?;
    let tail = Some(FlowState { u: 0.0, ..record.downstream });
    Ok(SelfSimSolution {
        regime: Regime::Shocked,
        segments: vec![run.segment],
        shock: Some(record),
        tail,
    })
}

/// An initial velocity that lands in the global (Case III) regime at the
/// params horizon, located by bisecting between the stationary and vacuum
/// regimes. The global band is narrow, so a fixed sample grid misses it.
pub fn intermediate_case_iii_u0(gamma0: f64, p0: f64, params: &SimParams) -> Result<f64> {
    let re = IsentropeRef::new(gamma0, p0)?;
    let ubar = vacuum_threshold_ubar(params.gas, &re)?;
    let regime_of = |u0: f64| -> Result<Regime> {
        let st = FlowState::new(u0, gamma0, p0)?;
        Ok(classify_positive(&st, params)?.0)
    };
    let mut lo = (1e-4f64).min(0.5 * ubar);
    let mut hi = (1.02 * ubar).min(0.9995);
    if regime_of(lo)? != Regime::CaseIIStationary || regime_of(hi)? != Regime::CaseIVacuum {
        return Err(Error::Bracket { context: "intermediate_case_iii_u0", lo, hi });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        match regime_of(mid)? {
            Regime::CaseIIIGlobal => return Ok(mid),
            Regime::CaseIIStationary => lo = mid,
            Regime::CaseIVacuum => hi = mid,
            other => {
                return Err(Error::Inconsistency {
                    context: "intermediate_case_iii_u0",
                    message: format!("unexpected regime {other} at u0 = {mid}"),
                })
            }
        }
    }
    Err(Error::Inconsistency {
        context: "intermediate_case_iii_u0",
        message: "global regime band narrower than bisection resolution".into(),
    })
}

/// Empirical regime boundaries in u0 at a finite horizon: returns estimates of
/// the (stationary/global, global/vacuum) thresholds by bisection.
/// Diagnostic only; the underlying theory does not quantify these boundaries.
pub fn empirical_case_boundary(
    gamma0: f64,
    p0: f64,
    params: &SimParams,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let re = IsentropeRef::new(gamma0, p0)?;
    let ubar = vacuum_threshold_ubar(params.gas, &re)?;
    let regime_of = |u0: f64| -> Result<Regime> {
        let st = FlowState::new(u0, gamma0, p0)?;
        Ok(classify_positive(&st, params)?.0)
    };
    // stationary/global boundary
    let (mut lo, mut hi) = (1e-6 * ubar, ubar);
    if regime_of(lo)? != Regime::CaseIIStationary {
        return Err(Error::Bracket { context: "empirical_case_boundary", lo, hi });
    }
    while (hi - lo) > rel_tol * hi {
        let mid = (lo * hi).sqrt();
        if regime_of(mid)? == Regime::CaseIIStationary {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let stationary_global = 0.5 * (lo + hi);
    // global/vacuum boundary
    let (mut lo, mut hi) = (stationary_global, 0.999_999);
    while (hi - lo) > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if regime_of(mid)? == Regime::CaseIVacuum {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((stationary_global, 0.5 * (lo + hi)))
}
