//! Modified Bessel functions of the second kind K_j and the ratios
//! h_i = K_i / K_{i+1} that the Synge energies are built from.
//!
//! Three representations cover the positive axis:
//!
//! * ascending series for small gamma,
//! * the same series carried in double-double arithmetic through the
//!   mid range, where cancellation grows like e^(2 gamma),
//! * the large-argument expansion beyond the asymptotic cutoff, summed
//!   adaptively to its smallest useful term.
//!
//! Higher orders (j >= 2) always come from the forward recurrence
//! K_{j+1} = 2j K_j / gamma + K_{j-1}, which is stable for K.
//!
//! An independent adaptive-quadrature evaluation of the defining integral
//! is provided for validation; it shares no code with the series paths.

use crate::dd::{self, Dd};
use crate::error::{check_gamma, Error, Result};
use crate::quad;

/// Euler's constant to 20 digits.
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// Root of ln(gamma/2) + C_E = 0, i.e. 2 e^{-C_E}; the case boundary gamma_0
/// in the K_0/K_1 ratio estimates.
pub const GAMMA_ZERO: f64 = 1.1229189671337703;

/// Bessel order, restricted to what the constitutive formulas use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Order(u8);

impl Order {
    pub const MAX: u8 = 4;

    pub fn new(j: u8) -> Result<Order> {
        if j > Self::MAX {
            return Err(Error::domain("bessel::Order", format!("order {j} exceeds {}", Self::MAX)));
        }
        Ok(Order(j))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

/// Switching rule between the three representations.
#[derive(Debug, Clone, Copy)]
pub struct EvalPolicy {
    /// Below this gamma the plain-f64 ascending series already meets rel_tol.
    pub series_cutoff: f64,
    /// At and above this gamma the large-argument expansion is used.
    pub asymptotic_cutoff: f64,
    /// Term budget for the ascending series.
    pub series_terms: usize,
    /// Target relative accuracy.
    pub rel_tol: f64,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy {
            series_cutoff: 2.0,
            asymptotic_cutoff: 20.0,
            series_terms: 220,
            rel_tol: 1e-12,
        }
    }
}

impl EvalPolicy {
    fn validate(&self) -> Result<()> {
        if !(self.series_cutoff > 0.0) || self.series_cutoff > self.asymptotic_cutoff {
            return Err(Error::domain(
                "bessel::EvalPolicy",
                "require 0 < series_cutoff <= asymptotic_cutoff",
            ));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("bessel::EvalPolicy", "rel_tol must be positive"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// ascending series, plain f64
// ---------------------------------------------------------------------------

/// K_0 and K_1 by the ascending series. Accurate to ~1e-14 for gamma <= 2;
/// cancellation degrades it beyond that.
fn series_k01_f64(gamma: f64, max_terms: usize) -> (f64, f64) {
    let half = 0.5 * gamma;
    let q = half * half;
    let lc = half.ln() + EULER_GAMMA; // ln(gamma/2) + C_E

    // K0 = -sum T_m (lc - H_m),  T_m = (gamma/2)^{2m} / (m!)^2
    // K1 = 1/gamma + sum U_m (lc - (H_m + H_{m+1})/2),
    //      U_m = (gamma/2)^{2m+1} / (m! (m+1)!)
    let mut t = 1.0;
    let mut u = half;
    let mut harm = 0.0; // H_m
    let mut k0 = 0.0;
    let mut k1 = 0.0;
    for m in 0..max_terms {
        let mf = m as f64;
        let harm_next = harm + 1.0 / (mf + 1.0); // H_{m+1}
        k0 -= t * (lc - harm);
        k1 += u * (lc - 0.5 * (harm + harm_next));
        let scale = k0.abs().max(1.0);
        if t.abs() * (lc.abs() + harm + 2.0) < 1e-18 * scale && m > 2 {
            break;
        }
        t *= q / ((mf + 1.0) * (mf + 1.0));
        u *= q / ((mf + 1.0) * (mf + 2.0));
        harm = harm_next;
    }
    (k0, 1.0 / gamma + k1)
}

// ---------------------------------------------------------------------------
// ascending series, double-double
// ---------------------------------------------------------------------------

fn series_k01_dd(gamma: f64, max_terms: usize) -> (Dd, Dd) {
    let half = Dd::from(gamma).mul_f64(0.5);
    let q = half.mul(half);
    let lc = dd::ln(0.5 * gamma).add(dd::EULER_GAMMA);

    let mut t = Dd::ONE;
    let mut u = half;
    let mut harm = Dd::ZERO;
    let mut k0 = Dd::ZERO;
    let mut k1 = Dd::ZERO;
    for m in 0..max_terms {
        let mf = m as f64;
        let harm_next = harm.add(Dd::from(1.0).div_f64(mf + 1.0));
        k0 = k0.sub(t.mul(lc.sub(harm)));
        k1 = k1.add(u.mul(lc.sub(harm.add(harm_next).mul_f64(0.5))));
        if m > 2 && t.abs() * (lc.abs() + harm.abs() + 2.0) < 1e-34 * k0.abs().max(1e-300) {
            break;
        }
        t = t.mul(q).div_f64((mf + 1.0) * (mf + 1.0));
        u = u.mul(q).div_f64((mf + 1.0) * (mf + 2.0));
        harm = harm_next;
    }
    (k0, Dd::from(gamma).recip().add(k1))
}

// ---------------------------------------------------------------------------
// large-argument expansion
// ---------------------------------------------------------------------------

const ASYM_MAX_TERMS: usize = 34;

/// Coefficients A_{j,m} of the expansion
/// K_j = sqrt(pi/(2 gamma)) e^{-gamma} sum_m A_{j,m} gamma^{-m},
/// generated by A_{j,m} = A_{j,m-1} (4j^2 - (2m-1)^2) / (8m).
fn asym_coeffs(j: u8) -> [f64; ASYM_MAX_TERMS] {
    let fj = 4.0 * (j as f64) * (j as f64);
    let mut a = [0.0; ASYM_MAX_TERMS];
    a[0] = 1.0;
    for m in 1..ASYM_MAX_TERMS {
        let tm = (2 * m - 1) as f64;
        a[m] = a[m - 1] * (fj - tm * tm) / (8.0 * m as f64);
    }
    a
}

/// Partial sum S_j(gamma) with adaptive truncation at the smallest useful
/// term; also returns the remainder estimate from the tail bound
/// |gamma_{j,n}| <= 2 e^{(j^2 - 1/4)/gamma} |A_{j,n}|.
fn asym_sum(j: u8, gamma: f64) -> (f64, f64) {
    let a = asym_coeffs(j);
    let mut sum = 1.0;
    let mut pow = 1.0;
    let mut last = 1.0f64;
    let mut n = ASYM_MAX_TERMS;
    for (m, &am) in a.iter().enumerate().skip(1) {
        pow /= gamma;
        let term = am * pow;
        if term.abs() > last {
            n = m; // divergent tail reached; stop at the smallest term
            break;
        }
        sum += term;
        last = term.abs();
        if term.abs() < 1e-17 * sum.abs() {
            n = m + 1;
            break;
        }
    }
    let jj = j as f64;
    let rem = if n < ASYM_MAX_TERMS {
        2.0 * ((jj * jj - 0.25) / gamma).exp() * a[n].abs() / gamma.powi(n as i32)
    } else {
        2.0 * last
    };
    (sum, rem)
}

#[cfg(test)]
fn asym_scaled(j: u8, gamma: f64) -> f64 {
    let pref = (std::f64::consts::PI / (2.0 * gamma)).sqrt();
    pref * asym_sum(j, gamma).0
}

/// S_j summed in double-double (coefficients regenerated in dd); used when a
/// ratio is needed beyond f64 accuracy.
fn asym_sum_dd(j: u8, gamma: f64) -> Dd {
    let fj = Dd::from(4.0 * (j as f64) * (j as f64));
    let mut a = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut pow = Dd::ONE;
    let inv_gamma = Dd::from(gamma).recip();
    let mut last = f64::INFINITY;
    for m in 1..ASYM_MAX_TERMS {
        let tm = (2 * m - 1) as f64;
        a = a.mul(fj.sub(Dd::from(tm * tm))).div_f64(8.0 * m as f64);
        pow = pow.mul(inv_gamma);
        let term = a.mul(pow);
        if term.abs() > last {
            break;
        }
        sum = sum.add(term);
        last = term.abs();
        if term.abs() < 1e-30 * sum.abs() {
            break;
        }
    }
    sum
}

/// h_i = K_i / K_{i+1} in double-double, for consumers whose algebra
/// amplifies an f64-rounded ratio beyond tolerance.
pub(crate) fn ratio_h_dd(i: u8, gamma: f64) -> Result<Dd> {
    check_gamma("ratio_h", gamma)?;
    if i > 1 {
        return Err(Error::domain("ratio_h", format!("ratio index must be 0 or 1, got {i}")));
    }
    let policy = EvalPolicy::default();
    if gamma >= policy.asymptotic_cutoff {
        Ok(asym_sum_dd(i, gamma).div(asym_sum_dd(i + 1, gamma)))
    } else {
        let (k0, k1) = series_k01_dd(gamma, policy.series_terms);
        Ok(if i == 0 {
            k0.div(k1)
        } else {
            k1.div(k1.mul_f64(2.0 / gamma).add(k0))
        })
    }
}

// ---------------------------------------------------------------------------
// public evaluation
// ---------------------------------------------------------------------------

/// e^gamma K_0 and e^gamma K_1, dispatching on the policy cutoffs. Errors if
/// the policy's representation cannot reach its own rel_tol (an asymptotic
/// cutoff placed too low, or an exhausted series term budget).
fn k01_scaled(gamma: f64, policy: &EvalPolicy) -> Result<(f64, f64)> {
    if gamma >= policy.asymptotic_cutoff {
        let mut out = [0.0; 2];
        for (j, slot) in out.iter_mut().enumerate() {
            let (sum, rem) = asym_sum(j as u8, gamma);
            if rem > policy.rel_tol * sum.abs() {
                return Err(Error::Quadrature {
                    context: "bessel_k asymptotic remainder",
                    achieved: rem / sum.abs(),
                    requested: policy.rel_tol,
                });
            }
            *slot = (std::f64::consts::PI / (2.0 * gamma)).sqrt() * sum;
        }
        Ok((out[0], out[1]))
    } else if gamma <= policy.series_cutoff {
        let (k0, k1) = series_k01_f64(gamma, policy.series_terms);
        let e = gamma.exp();
        Ok((k0 * e, k1 * e))
    } else {
        // the dd series needs roughly 2.2 gamma + 25 terms to converge
        if (policy.series_terms as f64) < 2.2 * gamma + 25.0 {
            return Err(Error::Quadrature {
                context: "bessel_k series term budget",
                achieved: f64::NAN,
                requested: policy.rel_tol,
            });
        }
        let (k0, k1) = series_k01_dd(gamma, policy.series_terms);
        let e = dd::exp(Dd::from(gamma));
        Ok((k0.mul(e).f64(), k1.mul(e).f64()))
    }
}

fn k_scaled_all(gamma: f64, policy: &EvalPolicy, up_to: u8) -> Result<[f64; 5]> {
    let (k0, k1) = k01_scaled(gamma, policy)?;
    let mut k = [0.0; 5];
    k[0] = k0;
    k[1] = k1;
    for j in 1..up_to.max(1) {
        let j = j as usize;
        k[j + 1] = 2.0 * j as f64 * k[j] / gamma + k[j - 1];
    }
    Ok(k)
}

/// K_j(gamma) with the given policy.
pub fn bessel_k_with(policy: &EvalPolicy, order: Order, gamma: f64) -> Result<f64> {
    check_gamma("bessel_k", gamma)?;
    policy.validate()?;
    let scaled = k_scaled_all(gamma, policy, order.0)?[order.0 as usize];
    if gamma > 700.0 {
        return Err(Error::Underflow {
            order: order.0,
            gamma,
            scaled,
        });
    }
    Ok(scaled * (-gamma).exp())
}

/// K_j(gamma). Errors for gamma <= 0 and reports the scaled value when the
/// plain value would underflow f64.
pub fn bessel_k(order: Order, gamma: f64) -> Result<f64> {
    bessel_k_with(&EvalPolicy::default(), order, gamma)
}

/// e^gamma K_j(gamma); finite far beyond the underflow point of `bessel_k`.
pub fn bessel_k_scaled(order: Order, gamma: f64) -> Result<f64> {
    check_gamma("bessel_k_scaled", gamma)?;
    Ok(k_scaled_all(gamma, &EvalPolicy::default(), order.0)?[order.0 as usize])
}

/// The ratio h_i = K_i / K_{i+1} together with the cancellation-free gap
/// quantities the equation of state needs at large gamma:
/// `t = gamma (h - 1)` and `zeta = 2 gamma (h - 1) + (2i + 1)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RatioPoint {
    pub h: f64,
    pub t: f64,
    pub zeta: f64,
}

pub(crate) fn ratio_point(i: u8, gamma: f64) -> Result<RatioPoint> {
    check_gamma("ratio_h", gamma)?;
    if i > 1 {
        return Err(Error::domain("ratio_h", format!("ratio index must be 0 or 1, got {i}")));
    }
    let policy = EvalPolicy::default();
    let two_i1 = (2 * i + 1) as f64;
    if gamma >= policy.asymptotic_cutoff {
        // h = S_i / S_{i+1}; the gap series start at the gamma^{-1} term, so
        // t and zeta keep full relative accuracy as gamma -> infinity.
        let ai = asym_coeffs(i);
        let aj = asym_coeffs(i + 1);
        let si = asym_sum(i, gamma).0;
        let sj = asym_sum(i + 1, gamma).0;
        let mut t_num = 0.0; // sum d_m gamma^{1-m}, d_m = A_{i,m} - A_{i+1,m}
        let mut z_num = 0.0; // sum (2 d_{m+1} + (2i+1) A_{i+1,m}) gamma^{-m}
        let mut pow = 1.0;
        for m in 1..ASYM_MAX_TERMS {
            let d = ai[m] - aj[m];
            let t_term = d * pow;
            t_num += t_term;
            if m + 1 < ASYM_MAX_TERMS {
                let c = 2.0 * (ai[m + 1] - aj[m + 1]) + two_i1 * aj[m];
                z_num += c * pow / gamma;
            }
            pow /= gamma;
            if t_term.abs() < 1e-17 * t_num.abs().max(1e-300) && m > 3 {
                break;
            }
        }
        Ok(RatioPoint {
            h: si / sj,
            t: t_num / sj,
            zeta: z_num / sj,
        })
    } else if gamma <= policy.series_cutoff {
        let (k0, k1) = series_k01_f64(gamma, policy.series_terms);
        let (knum, kden) = if i == 0 {
            (k0, k1)
        } else {
            (k1, 2.0 * k1 / gamma + k0)
        };
        let h = knum / kden;
        let t = gamma * (h - 1.0);
        Ok(RatioPoint { h, t, zeta: 2.0 * t + two_i1 })
    } else {
        let (k0, k1) = series_k01_dd(gamma, policy.series_terms);
        let (knum, kden) = if i == 0 {
            (k0, k1)
        } else {
            (k1, k1.mul_f64(2.0 / gamma).add(k0))
        };
        let h = knum.div(kden);
        let t = h.sub(Dd::ONE).mul_f64(gamma);
        let zeta = t.mul_f64(2.0).add(Dd::from(two_i1));
        Ok(RatioPoint {
            h: h.f64(),
            t: t.f64(),
            zeta: zeta.f64(),
        })
    }
}

/// h_i(gamma) = K_i(gamma) / K_{i+1}(gamma), strictly inside (0, 1).
pub fn ratio_h(i: u8, gamma: f64) -> Result<f64> {
    Ok(ratio_point(i, gamma)?.h)
}

/// h_i'(gamma) from the closed form h_i^2 + (2i+1) h_i / gamma - 1.
pub fn ratio_h_prime(i: u8, gamma: f64) -> Result<f64> {
    let p = ratio_point(i, gamma)?;
    let two_i1 = (2 * i + 1) as f64;
    Ok(p.h * p.h + two_i1 * p.h / gamma - 1.0)
}

// ---------------------------------------------------------------------------
// quadrature oracle
// ---------------------------------------------------------------------------

/// 1/(2j-1)!!, the prefactor of the defining integral after the
/// lambda = gamma cosh(theta) substitution.
fn integral_prefactor(j: u8) -> f64 {
    let mut c = 1.0;
    let mut odd = 1.0;
    for _ in 0..j {
        c /= odd;
        odd += 2.0;
    }
    // c = 1 / (1*3*...*(2j-1))
    c
}

/// e^gamma K_j by adaptive quadrature of the defining integral with the
/// substitution lambda = gamma cosh(theta), which removes the endpoint
/// singularity: e^gamma K_j = gamma^j/(2j-1)!! * int_0^inf
/// e^{-gamma (cosh theta - 1)} sinh^{2j}(theta) d theta.
pub fn quadrature_k_scaled(order: Order, gamma: f64) -> Result<f64> {
    check_gamma("quadrature_k", gamma)?;
    let j = order.0;
    // choose theta_max so the integrand has decayed below 1e-320
    let mut theta_max: f64 = 20.0;
    for _ in 0..4 {
        theta_max = (2.0 * (760.0 + 2.0 * j as f64 * theta_max) / gamma + 2.0).ln().max(1.0);
    }
    let jf = 2.0 * j as f64;
    let (value, _err) = quad::adaptive(
        "quadrature_k",
        |theta| {
            let sh = theta.sinh();
            let coshm1 = 2.0 * (0.5 * theta).sinh().powi(2);
            (-gamma * coshm1).exp() * sh.powf(jf)
        },
        0.0,
        theta_max,
        1e-300,
        1e-13,
    )?;
    Ok(integral_prefactor(j) * gamma.powi(j as i32) * value)
}

/// K_j by adaptive quadrature of the defining integral; the independent
/// reference the series/asymptotic evaluation is validated against.
pub fn quadrature_k(order: Order, gamma: f64) -> Result<f64> {
    let scaled = quadrature_k_scaled(order, gamma)?;
    if gamma > 700.0 {
        return Err(Error::Underflow {
            order: order.0,
            gamma,
            scaled,
        });
    }
    Ok(scaled * (-gamma).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k(j: u8, gamma: f64) -> f64 {
        bessel_k(Order::new(j).unwrap(), gamma).unwrap()
    }

    // reference values computed with 50-digit arithmetic
    const K0_1: f64 = 0.42102443824070834;
    const K1_1: f64 = 0.6019072301972346;
    const K2_1: f64 = 1.6248388986351774;
    const K0_10: f64 = 1.7780062316167652e-5;
    const K1_10: f64 = 1.8648773453825585e-5;
    const K0_700_SCALED: f64 = 0.04736236945461357;

    #[test]
    fn matches_high_precision_references() {
        assert_relative_eq!(k(0, 1.0), K0_1, max_relative = 1e-14);
        assert_relative_eq!(k(1, 1.0), K1_1, max_relative = 1e-14);
        assert_relative_eq!(k(2, 1.0), K2_1, max_relative = 1e-14);
        assert_relative_eq!(k(0, 10.0), K0_10, max_relative = 1e-13);
        assert_relative_eq!(k(1, 10.0), K1_10, max_relative = 1e-13);
        assert_relative_eq!(
            bessel_k_scaled(Order::new(0).unwrap(), 700.0).unwrap(),
            K0_700_SCALED,
            max_relative = 1e-13
        );
    }

    #[test]
    fn oracle_matches_series_at_unit_argument() {
        let q = quadrature_k(Order::new(1).unwrap(), 1.0).unwrap();
        assert_relative_eq!(q, 0.60190723019723457, max_relative = 1e-12);
        // cross-check against the ascending series truncated at 30 terms
        let (_, k1_series) = super::series_k01_f64(1.0, 30);
        assert_relative_eq!(q, k1_series, max_relative = 1e-12);
    }

    #[test]
    fn oracle_recurrence_consistency() {
        let k3 = quadrature_k(Order::new(3).unwrap(), 2.0).unwrap();
        let k2 = quadrature_k(Order::new(2).unwrap(), 2.0).unwrap();
        let k1 = quadrature_k(Order::new(1).unwrap(), 2.0).unwrap();
        assert_relative_eq!(k3, 4.0 * k2 / 2.0 + k1, max_relative = 1e-11);
    }

    #[test]
    fn oracle_small_gamma_log_behavior() {
        // K_0(gamma) ~ -ln(gamma/2) - C_E for small gamma
        let q = quadrature_k(Order::new(0).unwrap(), 0.01).unwrap();
        let lead = -(0.005f64).ln() - EULER_GAMMA;
        assert!((q - lead).abs() / q < 0.01, "q = {q}, leading = {lead}");
        assert_relative_eq!(q, 4.721244730161095, max_relative = 1e-12);
    }

    #[test]
    fn recurrence_forced_for_higher_orders() {
        let lhs = k(2, 1.0);
        let rhs = 2.0 * k(1, 1.0) / 1.0 + k(0, 1.0);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-15);
    }

    #[test]
    fn asymptotic_leading_terms_at_fifty() {
        // K_1(50) = sqrt(pi/100) e^{-50} (1 + 3/400 - 15/(128*2500) + ...)
        let v = k(1, 50.0);
        let pref = (std::f64::consts::PI / 100.0).sqrt() * (-50.0f64).exp();
        let partial = pref * (1.0 + 3.0 / 400.0 - 15.0 / (128.0 * 2500.0) - 105.0 / (1024.0 * 125000.0));
        assert_relative_eq!(v, partial, max_relative = 1e-6);
        let q = quadrature_k(Order::new(1).unwrap(), 50.0).unwrap();
        assert_relative_eq!(v, q, max_relative = 1e-12);
    }

    #[test]
    fn scaled_value_is_exp_times_plain() {
        for j in 0..=4u8 {
            let s = bessel_k_scaled(Order::new(j).unwrap(), 1.0).unwrap();
            assert_relative_eq!(s, std::f64::consts::E * k(j, 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn plain_value_underflows_at_large_gamma() {
        let err = bessel_k(Order::new(0).unwrap(), 720.0).unwrap_err();
        match err {
            Error::Underflow { scaled, .. } => assert!(scaled > 0.0 && scaled.is_finite()),
            other => panic!("expected underflow, got {other:?}"),
        }
        // scaled variant stays finite out to very large gamma
        let s = bessel_k_scaled(Order::new(1).unwrap(), 1e6).unwrap();
        assert!(s.is_finite() && s > 0.0);
    }

    #[test]
    fn ratio_matches_references_and_bounds() {
        assert_relative_eq!(ratio_h(0, 0.5).unwrap(), 0.5580754184765853, max_relative = 1e-13);
        assert_relative_eq!(ratio_h(1, 2.0).unwrap(), 0.5511744053177437, max_relative = 1e-13);

        // Prop bounds at gamma = 0.5: gamma/(sqrt(gamma^2+1)+1) <= h0 <= gamma(11/16 - ln(gamma/2) - C_E)
        let g: f64 = 0.5;
        let h0 = ratio_h(0, g).unwrap();
        let lo = g / ((g * g + 1.0).sqrt() + 1.0);
        let hi = g * (11.0 / 16.0 - (g / 2.0).ln() - EULER_GAMMA);
        assert!(lo <= h0 && h0 <= hi);

        // rough bounds at gamma = 3
        let g = 3.0;
        let h0 = ratio_h(0, g).unwrap();
        assert!(1.0 - 1.0 / (2.0 * g) <= h0);
        assert!(h0 <= 1.0 - 1.0 / (2.0 * g) + 3.0 / (8.0 * g * g) + 3.0 / (16.0 * g * g * g));

        // h1(100) ~ 1 - 3/200
        let h1 = ratio_h(1, 100.0).unwrap();
        assert!((h1 - (1.0 - 3.0 / 200.0)).abs() < 2e-4);
        for &g in &[1e-3, 0.1, 1.0, 10.0, 100.0, 1e4] {
            for i in 0..=1u8 {
                let h = ratio_h(i, g).unwrap();
                assert!(h > 0.0 && h < 1.0, "h_{i}({g}) = {h}");
            }
        }
    }

    #[test]
    fn ratio_monotone_in_gamma() {
        for i in 0..=1u8 {
            let mut prev = 0.0;
            for n in 0..200 {
                let g = 10f64.powf(-3.0 + 6.0 * n as f64 / 199.0);
                let h = ratio_h(i, g).unwrap();
                assert!(h > prev, "h_{i} not increasing at gamma = {g}");
                prev = h;
            }
        }
    }

    #[test]
    fn ratio_prime_matches_finite_differences() {
        let d = 1e-4;
        for &(i, g) in &[(0u8, 1.0), (1u8, 2.0), (0u8, 7.0), (1u8, 40.0)] {
            let fd = (ratio_h(i, g + d).unwrap() - ratio_h(i, g - d).unwrap()) / (2.0 * d);
            let an = ratio_h_prime(i, g).unwrap();
            assert_relative_eq!(an, fd, max_relative = 1e-6);
        }
        // large-gamma trend: h0' ~ 1/(2 gamma^2)
        let g = 1e3;
        let hp = ratio_h_prime(0, g).unwrap();
        assert!((hp - 1.0 / (2.0 * g * g)).abs() < 0.1 / (2.0 * g * g));
    }

    #[test]
    fn gap_quantities_consistent_across_representations() {
        // t and zeta must agree with their direct definitions where those are stable
        for &g in &[0.5, 3.0, 19.0, 21.0, 100.0] {
            for i in 0..=1u8 {
                let p = ratio_point(i, g).unwrap();
                assert_relative_eq!(p.t, g * (p.h - 1.0), max_relative = 1e-9, epsilon = 1e-12);
                assert_relative_eq!(
                    p.zeta,
                    2.0 * p.t + (2 * i + 1) as f64,
                    max_relative = 1e-7,
                    epsilon = 1e-10
                );
            }
        }
        // and remain O(1/gamma) without blowing up at extreme gamma
        let p = ratio_point(1, 1e15).unwrap();
        assert!((p.t + 1.5).abs() < 1e-10);
        assert!(p.zeta > 0.0 && p.zeta < 1e-13);
    }

    #[test]
    fn representation_overlap_agreement() {
        let policy = EvalPolicy::default();
        // f64 series vs dd series around the series cutoff
        for &g in &[1.8, 2.0, 2.2] {
            let (a0, a1) = series_k01_f64(g, policy.series_terms);
            let (b0, b1) = series_k01_dd(g, policy.series_terms);
            assert_relative_eq!(a0, b0.f64(), max_relative = 1e-11);
            assert_relative_eq!(a1, b1.f64(), max_relative = 1e-11);
        }
        // dd series vs asymptotic around the asymptotic cutoff
        for &g in &[19.0, 20.0, 21.0] {
            let (b0, b1) = series_k01_dd(g, policy.series_terms);
            let e = (-g as f64).exp();
            assert_relative_eq!(b0.f64(), asym_scaled(0, g) * e, max_relative = 1e-11);
            assert_relative_eq!(b1.f64(), asym_scaled(1, g) * e, max_relative = 1e-11);
        }
    }

    #[test]
    fn ordering_and_recurrence_on_log_grid() {
        for n in 0..60 {
            let g = 10f64.powf(-3.0 + 6.0 * n as f64 / 59.0);
            let ks: Vec<f64> = (0..=4).map(|j| bessel_k_scaled(Order::new(j).unwrap(), g).unwrap()).collect();
            for j in 0..4 {
                assert!(ks[j] < ks[j + 1], "ordering failed at gamma = {g}, j = {j}");
            }
            for j in 1..4 {
                let resid = (ks[j + 1] - (2.0 * j as f64 * ks[j] / g + ks[j - 1])).abs() / ks[j + 1];
                assert!(resid <= 1e-10, "recurrence residual {resid} at gamma = {g}");
            }
        }
    }

    #[test]
    fn derivative_identity_by_central_differences() {
        // d/dgamma (K_j / gamma^j) = -K_{j+1} / gamma^j
        for &g in &[0.5, 1.0, 5.0, 30.0] {
            for j in 0..=3u8 {
                let d = g * 1e-5;
                let f = |x: f64| k(j, x) / x.powi(j as i32);
                let fd = (f(g + d) - f(g - d)) / (2.0 * d);
                let rhs = -k(j + 1, g) / g.powi(j as i32);
                assert_relative_eq!(fd, rhs, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn custom_policy_reports_unreachable_tolerance() {
        // asymptotic cutoff far too low: the expansion cannot reach 1e-12 there
        let policy = EvalPolicy { asymptotic_cutoff: 4.0, ..EvalPolicy::default() };
        match bessel_k_with(&policy, Order::new(0).unwrap(), 5.0) {
            Err(Error::Quadrature { achieved, requested, .. }) => {
                assert!(achieved > requested);
            }
            other => panic!("expected an accuracy error, got {other:?}"),
        }
        // starved series budget in the mid range
        let policy = EvalPolicy { series_terms: 10, ..EvalPolicy::default() };
        assert!(bessel_k_with(&policy, Order::new(0).unwrap(), 10.0).is_err());
    }

    #[test]
    fn rejects_nonpositive_gamma() {
        assert!(bessel_k(Order::new(0).unwrap(), 0.0).is_err());
        assert!(bessel_k(Order::new(0).unwrap(), -1.0).is_err());
        assert!(ratio_h(0, f64::NAN).is_err());
        assert!(quadrature_k(Order::new(0).unwrap(), -2.0).is_err());
        assert!(Order::new(5).is_err());
    }
}
