//! Compensated double-double arithmetic.
//!
//! The ascending Bessel series suffer cancellation that grows like e^(2*gamma),
//! which exhausts f64 precision above gamma ~ 5. Carrying the partial sums as
//! unevaluated hi+lo pairs (~32 significant digits) keeps the mid-range series
//! accurate to ~1e-14 relative up to the asymptotic handover at gamma = 20.
//!
//! Only the handful of operations the series need are implemented. Products use
//! the Dekker/Veltkamp split so no FMA hardware is assumed.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const SPLITTER: f64 = 134217729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        // full two-pass renormalization: keeps double-double accuracy even
        // when hi parts cancel, which the alternating Bessel series rely on
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    #[inline]
    pub fn div_f64(self, b: f64) -> Dd {
        self.div(Dd::from(b))
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    pub fn abs(self) -> f64 {
        self.hi.abs()
    }
}

// ln 2 and Euler's constant as hi+lo pairs (hi is the nearest f64, lo the residual).
pub(crate) const LN2: Dd = Dd { hi: 0.693_147_180_559_945_3, lo: 2.319_046_813_846_299_6e-17 };
pub(crate) const EULER_GAMMA: Dd = Dd { hi: 0.577_215_664_901_532_9, lo: -4.942_915_152_430_645e-18 };

/// exp(x) in double-double: range reduce by ln 2, Taylor on the remainder.
pub(crate) fn exp(x: Dd) -> Dd {
    if x.hi.abs() < 1e-300 {
        return Dd::ONE;
    }
    let k = (x.hi / LN2.hi).round();
    let r = x.sub(LN2.mul_f64(k));
    // |r| <= ln2/2; Taylor series converges in ~25 terms to 1e-33.
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for n in 1..40 {
        term = term.mul(r).div_f64(n as f64);
        sum = sum.add(term);
        if term.abs() < 1e-35 * sum.abs() {
            break;
        }
    }
    let scale = libm_exp2(k);
    Dd {
        hi: sum.hi * scale,
        lo: sum.lo * scale,
    }
}

#[inline]
fn libm_exp2(k: f64) -> f64 {
    // k is integral and |k| < 1100 for every argument we feed
    f64::powi(2.0, k as i32)
}

/// ln(x) in double-double: f64 seed plus one Newton step, y += x*exp(-y) - 1.
pub(crate) fn ln(x: f64) -> Dd {
    debug_assert!(x > 0.0);
    let y0 = x.ln();
    let e = exp(Dd::from(-y0));
    let correction = e.mul_f64(x).sub(Dd::ONE);
    Dd::from(y0).add(correction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_and_product_track_small_residuals() {
        let a = Dd::from(1.0).add(Dd::from(1e-20));
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, 1e-20);
        let b = a.mul(Dd::from(3.0));
        assert_eq!(b.hi, 3.0);
        assert!((b.lo - 3e-20).abs() < 1e-30);
    }

    #[test]
    fn division_round_trips() {
        let a = Dd::from(std::f64::consts::PI);
        let b = Dd::from(std::f64::consts::E);
        let q = a.div(b).mul(b);
        assert!((q.sub(a)).abs() < 1e-30);
    }

    #[test]
    fn exp_and_ln_are_inverse() {
        for &x in &[0.3, 1.0, 4.7, 19.5, 120.0] {
            let l = ln(x);
            let back = exp(l);
            assert!(
                (back.f64() - x).abs() < 1e-14 * x,
                "exp(ln({x})) = {}",
                back.f64()
            );
            // residual accuracy: exp(ln(x)) - x should be ~1e-30 relative
            let resid = back.sub(Dd::from(x));
            assert!(resid.abs() < 1e-28 * x, "dd residual {}", resid.abs());
        }
    }

    #[test]
    fn ln_half_matches_reference() {
        // ln(1/2) = -ln 2 to double-double accuracy
        let l = ln(0.5);
        let diff = l.add(LN2);
        assert!(diff.abs() < 1e-31);
    }
}
