//! Adaptive Gauss–Legendre quadrature.
//!
//! Each interval is integrated with 7- and 15-point Gauss rules; their
//! difference drives bisection of the interval queue until the global
//! absolute-plus-relative tolerance is met. Nodes and weights are generated
//! once by Newton iteration on the Legendre polynomials, so no tabulated
//! constants are needed.

use crate::error::{Error, Result};
use std::sync::LazyLock;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre P_n(x) and its derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gauss_rule(n: usize) -> Rule {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    Rule { nodes, weights }
}

static G7: LazyLock<Rule> = LazyLock::new(|| gauss_rule(7));
static G15: LazyLock<Rule> = LazyLock::new(|| gauss_rule(15));

fn apply(rule: &Rule, f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Integrate f over [a, b] to the given absolute and relative tolerance.
/// Returns the value and an error estimate.
pub fn adaptive(
    context: &'static str,
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let eval = |f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64| -> Seg {
        let coarse = apply(&G7, f, a, b);
        let fine = apply(&G15, f, a, b);
        Seg {
            a,
            b,
            value: fine,
            err: (fine - coarse).abs(),
        }
    };

    let mut segs = vec![eval(&mut f, a, b)];
    for _ in 0..10_000 {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if err <= tol {
            return Ok((total, err));
        }
        // split the worst segment
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty");
        let seg = segs.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval is at f64 resolution; accept what we have
            segs.push(seg);
            let total: f64 = segs.iter().map(|s| s.value).sum();
            let err: f64 = segs.iter().map(|s| s.err).sum();
            return Ok((total, err));
        }
        segs.push(eval(&mut f, seg.a, mid));
        segs.push(eval(&mut f, mid, seg.b));
    }
    let total: f64 = segs.iter().map(|s| s.value).sum();
    let err: f64 = segs.iter().map(|s| s.err).sum();
    Err(Error::Quadrature {
        context,
        achieved: err,
        requested: abs_tol.max(rel_tol * total.abs()),
    })
}
