//! Embedded Dormand-Prince 5(4) integrator with dense output and event
//! location. Small and self-contained: the flow solver needs precise roots of
//! event functions along the trajectory and interpolation of stored runs at
//! arbitrary s, which rules out the coarser fixed-step approaches.

use crate::error::{Error, Result};

// Butcher tableau of DOPRI5 (FSAL).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights (the FSAL row) and 4th-order weights for the error estimate.
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];
// Dense-output coefficients (continuous 4th-order extension).
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

pub type Rhs<'a, const N: usize> = &'a dyn Fn(f64, &[f64; N]) -> Result<[f64; N]>;

/// A scalar function of (s, y) whose root along the trajectory is an event.
pub struct EventFn<'a, const N: usize> {
    pub f: &'a dyn Fn(f64, &[f64; N]) -> f64,
    /// Terminal events truncate the integration at the located root.
    pub terminal: bool,
}

/// One accepted step with everything needed for dense interpolation.
#[derive(Debug, Clone)]
pub struct Step<const N: usize> {
    pub s0: f64,
    pub s1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    k: [[f64; N]; 7],
}

impl<const N: usize> Step<N> {
    /// Interpolated state at s within [s0, s1].
    pub fn eval(&self, s: f64) -> [f64; N] {
        let h = self.s1 - self.s0;
        let theta = if h == 0.0 { 0.0 } else { (s - self.s0) / h };
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            let ydiff = self.y1[i] - self.y0[i];
            let bspl = h * self.k[0][i] - ydiff;
            let r1 = self.y0[i];
            let r2 = ydiff;
            let r3 = bspl;
            let r4 = ydiff - h * self.k[6][i] - bspl;
            let mut r5 = 0.0;
            for j in 0..7 {
                r5 += D[j] * self.k[j][i];
            }
            r5 *= h;
            out[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        }
        out
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Halt {
    /// Reached the end of the requested interval.
    End,
    /// A terminal event root was located (index into the event list).
    Event(usize),
    /// The user halt predicate fired at a step end.
    Predicate,
    /// The step size collapsed; state is at the last accepted point.
    StepSizeFloor,
}

/// An event root located during integration.
#[derive(Debug, Clone)]
pub struct EventHit<const N: usize> {
    pub event_index: usize,
    pub s: f64,
    pub y: [f64; N],
}

pub struct Solution<const N: usize> {
    pub steps: Vec<Step<N>>,
    pub events: Vec<EventHit<N>>,
    pub s_end: f64,
    pub y_end: [f64; N],
    pub halt: Halt,
}

impl<const N: usize> Solution<N> {
    /// Dense evaluation anywhere in the integrated range (clamped outside).
    pub fn sample(&self, s: f64) -> [f64; N] {
        if self.steps.is_empty() {
            return self.y_end;
        }
        if s <= self.steps[0].s0 {
            return self.steps[0].y0;
        }
        if s >= self.s_end {
            return self.y_end;
        }
        let idx = self
            .steps
            .partition_point(|st| st.s1 < s)
            .min(self.steps.len() - 1);
        self.steps[idx].eval(s)
    }

    pub fn s_start(&self) -> f64 {
        self.steps.first().map_or(self.s_end, |s| s.s0)
    }
}

pub struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Root-location tolerance in s for event detection.
    pub event_tol: f64,
    pub max_steps: usize,
    pub h_initial: Option<f64>,
    pub h_max: Option<f64>,
    /// Step-size floor relative to the local scale of s; hitting it halts
    /// with `Halt::StepSizeFloor` rather than erroring, so callers can decide
    /// whether the stall is a legitimate singular endpoint.
    pub h_floor: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            event_tol: 1e-12,
            max_steps: 200_000,
            h_initial: None,
            h_max: None,
            h_floor: 1e-14,
        }
    }
}

struct Attempt<const N: usize> {
    y1: [f64; N],
    k: [[f64; N]; 7],
    err: f64,
}

fn attempt_step<const N: usize>(
    rhs: Rhs<N>,
    s: f64,
    y: &[f64; N],
    k0: &[f64; N],
    h: f64,
    opts: &Options,
) -> Result<Attempt<N>> {
    let mut k = [[0.0; N]; 7];
    k[0] = *k0;
    for stage in 1..7 {
        let mut ys = *y;
        for j in 0..stage {
            let a = A[stage][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * k[j][i];
                }
            }
        }
        k[stage] = rhs(s + C[stage] * h, &ys)?;
    }
    let mut y1 = *y;
    for j in 0..7 {
        if B5[j] != 0.0 {
            for i in 0..N {
                y1[i] += h * B5[j] * k[j][i];
            }
        }
    }
    // error = y5 - y4
    let mut err: f64 = 0.0;
    for i in 0..N {
        let mut y4 = y[i];
        for j in 0..7 {
            y4 += h * B4[j] * k[j][i];
        }
        let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y1[i].abs());
        let e = (y1[i] - y4) / sc;
        err += e * e;
    }
    err = (err / N as f64).sqrt();
    Ok(Attempt { y1, k, err })
}

/// Integrate rhs from (s0, y0) toward s_end (s_end > s0).
pub fn integrate<const N: usize>(
    rhs: Rhs<N>,
    s0: f64,
    s_end: f64,
    y0: [f64; N],
    events: &[EventFn<N>],
    halt_predicate: Option<&dyn Fn(f64, &[f64; N]) -> bool>,
    opts: &Options,
) -> Result<Solution<N>> {
    assert!(s_end > s0, "integrate expects forward direction");
    let mut s = s0;
    let mut y = y0;
    let mut k0 = rhs(s, &y)?;
    let span = s_end - s0;
    let mut h = opts.h_initial.unwrap_or(1e-4 * span).min(span);
    let h_max = opts.h_max.unwrap_or(span);

    let mut steps: Vec<Step<N>> = Vec::new();
    let mut events_hit: Vec<EventHit<N>> = Vec::new();
    let mut ev_prev: Vec<f64> = events.iter().map(|e| (e.f)(s, &y)).collect();

    let mut n_steps = 0usize;
    let mut rejected_in_a_row = 0usize;
    loop {
        if n_steps >= opts.max_steps {
            return Err(Error::StepBudget { s, steps: n_steps });
        }
        n_steps += 1;

        let floor = opts.h_floor * s.abs().max(1.0);
        if h < floor {
            return Ok(Solution {
                steps,
                events: events_hit,
                s_end: s,
                y_end: y,
                halt: Halt::StepSizeFloor,
            });
        }
        let last = s + h >= s_end;
        let h_eff = if last { s_end - s } else { h };

        let attempt = match attempt_step(rhs, s, &y, &k0, h_eff, opts) {
            Ok(a) => a,
            Err(_) if rejected_in_a_row < 60 => {
                // RHS failed inside the step (singular denominator reached);
                // retreat and retry with a smaller step.
                h = 0.5 * h_eff;
                rejected_in_a_row += 1;
                continue;
            }
            Err(e) => return Err(e),
        };

        if attempt.err > 1.0 {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 200 {
                return Err(Error::Inconsistency {
                    context: "ode::integrate",
                    message: format!("persistent step rejection at s = {s}"),
                });
            }
            let scale = (0.9 * attempt.err.powf(-0.2)).clamp(0.1, 0.5);
            h = h_eff * scale;
            continue;
        }
        rejected_in_a_row = 0;

        let step = Step {
            s0: s,
            s1: s + h_eff,
            y0: y,
            y1: attempt.y1,
            k: attempt.k,
        };

        // event scan over the accepted step; all roots, in s-order
        let mut roots: Vec<(f64, usize)> = Vec::new();
        for (ie, ev) in events.iter().enumerate() {
            let f0 = ev_prev[ie];
            let f1 = (ev.f)(step.s1, &step.y1);
            if f0.is_nan() || f1.is_nan() || f0 == 0.0 {
                ev_prev[ie] = f1;
                continue;
            }
            if f0 * f1 < 0.0 {
                // bisect on the dense output
                let mut lo = step.s0;
                let mut hi = step.s1;
                let mut flo = f0;
                for _ in 0..200 {
                    if hi - lo <= opts.event_tol * hi.abs().max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    let fm = (ev.f)(mid, &step.eval(mid));
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                roots.push((0.5 * (lo + hi), ie));
            }
            ev_prev[ie] = f1;
        }
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));

        for (root, ie) in roots {
            let y_root = step.eval(root);
            events_hit.push(EventHit {
                event_index: ie,
                s: root,
                y: y_root,
            });
            if events[ie].terminal {
                let mut truncated = step.clone();
                truncated.s1 = root;
                truncated.y1 = y_root;
                steps.push(truncated);
                return Ok(Solution {
                    steps,
                    events: events_hit,
                    s_end: root,
                    y_end: y_root,
                    halt: Halt::Event(ie),
                });
            }
        }

        s = step.s1;
        y = step.y1;
        k0 = step.k[6]; // FSAL
        steps.push(step);

        if let Some(pred) = halt_predicate {
            if pred(s, &y) {
                return Ok(Solution {
                    steps,
                    events: events_hit,
                    s_end: s,
                    y_end: y,
                    halt: Halt::Predicate,
                });
            }
        }
        if s >= s_end {
            return Ok(Solution {
                steps,
                events: events_hit,
                s_end: s,
                y_end: y,
                halt: Halt::End,
            });
        }
        let scale = if attempt.err == 0.0 {
            5.0
        } else {
            (0.9 * attempt.err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h_eff * scale).min(h_max);
    }
}
