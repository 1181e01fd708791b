//! Constitutive quantities for monatomic and diatomic Synge gases.
//!
//! Everything is a function of the dimensionless coldness gamma = mc^2/(k_B T)
//! through the Bessel ratio h_i = K_i/K_{i+1} (i = 1 monatomic, i = 0
//! diatomic), with c = 1 and pressures in reference units:
//!
//! * Phi_i = 3/gamma + h_i,   e = p gamma Phi_i,   rho = p gamma,
//! * g_i = gamma^2 (h_i^2 - 1) + (2i+1) gamma h_i - 4  (= gamma^2 Phi_i' - 1),
//! * e_p = 3 + sigma_i,   sigma_i = (gamma h_i + 4)/g_i + gamma h_i + 1,
//! * p e_pp = gamma sigma_i'/g_i, with closed rational forms per gas,
//! * characteristic speed lambda = 1/sqrt(e_p) <= 1/sqrt(3).
//!
//! Large-gamma evaluations route through the cancellation-free gap variables
//! t = gamma (h - 1) and zeta = 2t + (2i+1) supplied by the Bessel module, so
//! g_i and friends stay accurate out to the gamma ~ 1e18 reached when a flow
//! expands toward vacuum.
//!
//! Entropy never needs a numeric value: smooth flows carry an isentrope
//! reference (gamma_ref, p_ref) and shocks compare the monotone label
//! from `entropy_label`.

use crate::bessel::{self, RatioPoint};
use crate::error::{check_gamma, Error, Result};
use crate::quad;
use serde::{Deserialize, Serialize};

/// Gas selection: the index i of the Bessel ratio in the Synge energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GasKind {
    /// i = 0, five degrees of freedom (D = 5).
    #[serde(rename = "diat")]
    Diatomic,
    /// i = 1, three degrees of freedom (D = 3).
    #[serde(rename = "mono")]
    Monatomic,
}

impl GasKind {
    pub fn ratio_index(self) -> u8 {
        match self {
            GasKind::Diatomic => 0,
            GasKind::Monatomic => 1,
        }
    }

    /// Total molecular degrees of freedom D.
    pub fn degrees_of_freedom(self) -> f64 {
        match self {
            GasKind::Diatomic => 5.0,
            GasKind::Monatomic => 3.0,
        }
    }
}

impl std::fmt::Display for GasKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GasKind::Diatomic => "diat",
            GasKind::Monatomic => "mono",
        })
    }
}

impl std::str::FromStr for GasKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mono" | "monatomic" => Ok(GasKind::Monatomic),
            "diat" | "diatomic" => Ok(GasKind::Diatomic),
            other => Err(Error::domain("GasKind", format!("unknown gas '{other}' (expected mono|diat)"))),
        }
    }
}

/// A thermodynamic state: coldness and pressure, with the derived
/// rest-mass and energy densities.
#[derive(Debug, Clone, Copy)]
pub struct ThermoPoint {
    pub gamma: f64,
    pub p: f64,
    /// rho = p gamma (c = 1)
    pub rho: f64,
    /// e = p gamma Phi_i(gamma)
    pub e: f64,
}

impl ThermoPoint {
    pub fn new(gas: GasKind, gamma: f64, p: f64) -> Result<ThermoPoint> {
        check_gamma("ThermoPoint", gamma)?;
        if !(p > 0.0) {
            return Err(Error::domain("ThermoPoint", format!("pressure must be positive, got {p}")));
        }
        Ok(ThermoPoint {
            gamma,
            p,
            rho: p * gamma,
            e: e_of(gas, gamma, p)?,
        })
    }
}

/// Reference point fixing an isentrope; the entropy surrogate carried along
/// smooth solutions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IsentropeRef {
    pub gamma_ref: f64,
    pub p_ref: f64,
}

impl IsentropeRef {
    pub fn new(gamma_ref: f64, p_ref: f64) -> Result<IsentropeRef> {
        check_gamma("IsentropeRef", gamma_ref)?;
        if !(p_ref > 0.0) {
            return Err(Error::domain("IsentropeRef", format!("p_ref must be positive, got {p_ref}")));
        }
        Ok(IsentropeRef { gamma_ref, p_ref })
    }
}

/// Per-gamma bundle of the ratio and its gap variables; every constitutive
/// quantity below is formula-cheap once this is built.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GasPoint {
    pub gamma: f64,
    pub i: u8,
    /// h_i(gamma)
    pub h: f64,
    /// gamma (h - 1), O(1) as gamma -> infinity
    pub t: f64,
    /// 2 gamma (h - 1) + (2i+1), O(1/gamma) as gamma -> infinity
    pub zeta: f64,
}

impl GasPoint {
    pub fn new(gas: GasKind, gamma: f64) -> Result<GasPoint> {
        let i = gas.ratio_index();
        let RatioPoint { h, t, zeta } = bessel::ratio_point(i, gamma)?;
        Ok(GasPoint { gamma, i, h, t, zeta })
    }

    #[inline]
    fn two_i1(&self) -> f64 {
        (2 * self.i + 1) as f64
    }

    /// gamma h_i, evaluated as gamma + t.
    #[inline]
    pub fn gamma_h(&self) -> f64 {
        self.gamma + self.t
    }

    /// Phi_i = 3/gamma + h_i.
    #[inline]
    pub fn phi(&self) -> f64 {
        3.0 / self.gamma + self.h
    }

    /// g_i = gamma^2(h^2 - 1) + (2i+1) gamma h - 4, grouped so the large-gamma
    /// cancellation happens inside zeta: g = t^2 + gamma zeta + (2i+1) t - 4.
    #[inline]
    pub fn gi(&self) -> f64 {
        self.t * self.t + self.gamma * self.zeta + self.two_i1() * self.t - 4.0
    }

    /// Phi_i' = (g_i + 1) / gamma^2.
    #[inline]
    pub fn phi_prime(&self) -> f64 {
        (self.gi() + 1.0) / (self.gamma * self.gamma)
    }

    /// chi_i = gamma Phi_i + 1 = 4 + gamma h_i.
    #[inline]
    pub fn chi(&self) -> f64 {
        4.0 + self.gamma_h()
    }

    /// q_i = h(gamma h + 2(i+1)) - gamma = t(h+1) + 2(i+1) h.
    #[inline]
    pub fn q(&self) -> f64 {
        self.t * (self.h + 1.0) + (2 * (self.i + 1)) as f64 * self.h
    }

    /// gamma (q_i - 1) without loss at large gamma:
    /// q - 1 = zeta + (t^2 + 2(i+1) t)/gamma.
    #[inline]
    fn gamma_qm1(&self) -> f64 {
        self.gamma * self.zeta + self.t * self.t + (2 * (self.i + 1)) as f64 * self.t
    }

    /// sigma_i = (gamma h + 4)/g_i + gamma h + 1; e_p = 3 + sigma_i.
    #[inline]
    pub fn sigma(&self) -> f64 {
        let gh = self.gamma_h();
        (gh + 4.0) / self.gi() + gh + 1.0
    }

    #[inline]
    pub fn e_p(&self) -> f64 {
        3.0 + self.sigma()
    }

    /// sigma_i' = q(1 - 1/s) - (gamma h + 4)(q(2 gamma h + 2i + 1) - 2 gamma)/s^2
    /// with s = -g_i; the inner bracket is 2 gamma (q - 1) + q zeta.
    pub fn sigma_prime(&self) -> f64 {
        let s = -self.gi();
        let q = self.q();
        let inner = 2.0 * self.gamma_qm1() + q * self.zeta;
        q * (1.0 - 1.0 / s) - (self.gamma_h() + 4.0) * inner / (s * s)
    }

    /// p e_pp by the derivative route gamma sigma'_i / g_i.
    pub fn p_epp_sigma_route(&self) -> f64 {
        self.gamma * self.sigma_prime() / self.gi()
    }

    /// p e_pp by the closed rational forms. The polynomials cancel like
    /// gamma^3 at large gamma, so they are expanded in double-double on the
    /// same h the rest of the crate uses.
    pub fn p_epp(&self) -> f64 {
        use crate::dd::Dd;
        let g = Dd::from(self.gamma);
        let h = bessel::ratio_h_dd(self.i, self.gamma).expect("gamma validated at construction");
        let g2 = g.mul(g);
        let one = Dd::ONE;
        match self.i {
            1 => {
                let gh = g.mul(h);
                let i1 = gh.mul(gh.add(Dd::from(2.0))).sub(g2).sub(Dd::from(8.0));
                let base = h.mul(gh.add(Dd::from(4.0))).sub(g);
                let i2 = base.sub(one);
                let i3 = base.add(one);
                let den = gh.mul(gh.add(Dd::from(3.0))).sub(g2).sub(Dd::from(4.0));
                let num = g2.mul(i1).mul(i2).mul(i3);
                num.div(den.mul(den).mul(den)).f64()
            }
            _ => {
                let h2 = h.mul(h);
                let w = h2.sub(one); // h^2 - 1
                let g3 = g2.mul(g);
                let f_dia = g3.mul(g2).mul(w).mul(w).mul(w)
                    .add(g2.mul(g2).mul(h).mul(w).mul(w).mul_f64(4.0))
                    .sub(g2.mul(h).mul(w).mul_f64(32.0))
                    .sub(g.mul(h2).mul_f64(24.0))
                    .add(g3.mul(h2.mul(h2).mul_f64(-4.0).add(h2.mul_f64(11.0)).sub(Dd::from(7.0))))
                    .add(h.mul_f64(16.0));
                let den = g.mul(g.mul(w).add(h)).sub(Dd::from(4.0));
                g.mul(f_dia).div(den.mul(den).mul(den)).f64()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Phi_i(gamma) = 3/gamma + h_i(gamma).
pub fn phi(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.phi())
}

/// Phi_i'(gamma) = (h_i^2 - 1) + (2i+1) h_i/gamma - 3/gamma^2; negative everywhere.
pub fn phi_prime(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.phi_prime())
}

/// chi_i(gamma) = gamma Phi_i + 1 > 4; e + p = p chi_i.
pub fn chi(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.chi())
}

/// q_i = h_i (gamma h_i + 2(i+1)) - gamma = d chi_i / d gamma.
pub fn q_aux(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.q())
}

/// s_i = gamma^2 (1 - h_i^2) - (2i+1) gamma h_i + 4 = -g_i; positive everywhere.
pub fn s_aux(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(-GasPoint::new(gas, gamma)?.gi())
}

/// g_i = gamma^2 h_i' - 4 = gamma^2 Phi_i' - 1; negative everywhere.
pub fn gi(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.gi())
}

/// sigma_i(gamma) = e_p - 3 > 0.
pub fn sigma(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.sigma())
}

/// sigma_i'(gamma) > 0.
pub fn sigma_prime(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.sigma_prime())
}

/// e_p = (de/dp) at constant entropy = 3 + sigma_i(gamma) > 3.
pub fn e_p(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.e_p())
}

/// p e_pp by the closed rational forms; strictly negative.
pub fn p_epp(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.p_epp())
}

/// p e_pp by the sigma'/g route; agrees with `p_epp` and exists for
/// cross-validation of the two algebraic paths.
pub fn p_epp_sigma_route(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(GasPoint::new(gas, gamma)?.p_epp_sigma_route())
}

/// Characteristic speed in units of c: lambda = 1/sqrt(e_p) in (0, 1/sqrt(3)];
/// strictly decreasing in gamma, approaching 1/sqrt(3) ultra-relativistically.
pub fn char_speed(gas: GasKind, gamma: f64) -> Result<f64> {
    Ok(1.0 / GasPoint::new(gas, gamma)?.e_p().sqrt())
}

/// (d gamma / d p) at constant entropy = gamma / (p g_i); negative.
pub fn dgamma_dp_isentropic(gas: GasKind, gamma: f64, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::domain("dgamma_dp_isentropic", format!("pressure must be positive, got {p}")));
    }
    Ok(gamma / (p * GasPoint::new(gas, gamma)?.gi()))
}

/// Energy density e = p gamma Phi_i(gamma); e > 3p for p > 0, and 0 at vacuum.
pub fn e_of(gas: GasKind, gamma: f64, p: f64) -> Result<f64> {
    check_gamma("e_of", gamma)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    if !(p > 0.0) {
        return Err(Error::domain("e_of", format!("pressure must be nonnegative, got {p}")));
    }
    let pt = GasPoint::new(gas, gamma)?;
    Ok(p * (3.0 + pt.gamma_h()))
}

/// ln p(gamma) - ln p(gamma_ref) along an isentrope:
/// the integral of g_i(gamma')/gamma' d gamma', done in log-gamma.
pub(crate) fn isentrope_log_ratio(gas: GasKind, gamma_from: f64, gamma_to: f64) -> Result<f64> {
    check_gamma("isentrope_p", gamma_from)?;
    check_gamma("isentrope_p", gamma_to)?;
    let (value, _) = quad::adaptive(
        "isentrope_p",
        |x| match GasPoint::new(gas, x.exp()) {
            Ok(pt) => pt.gi(),
            Err(_) => f64::NAN,
        },
        gamma_from.ln(),
        gamma_to.ln(),
        1e-13,
        1e-11,
    )?;
    Ok(value)
}

/// Pressure along the isentrope through `(gamma_ref, p_ref)` at coldness
/// `gamma`; strictly decreasing in gamma.
pub fn isentrope_p(gas: GasKind, re: &IsentropeRef, gamma: f64) -> Result<f64> {
    Ok(re.p_ref * isentrope_log_ratio(gas, re.gamma_ref, gamma)?.exp())
}

/// Monotone entropy surrogate: constant on isentropes and strictly increasing
/// in physical entropy. Defined as
/// `int_{1}^{gamma} g_i(x)/x dx - ln(p)`,
/// i.e. the negated log of the pressure the state would have if brought
/// isentropically to the fixed reference coldness gamma = 1.
pub fn entropy_label(gas: GasKind, p: f64, gamma: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::domain("entropy_label", format!("pressure must be positive, got {p}")));
    }
    Ok(isentrope_log_ratio(gas, 1.0, gamma)? - p.ln())
}
