//! Decimal arbitrary-precision floating point: `mantissa * 10^exponent`
//! with a per-context significant-digit budget.
//!
//! Rounding contract per primitive: add/sub/mul are exact-then-round
//! (<= 0.5 ulp), div computes >= 2 guard digits before rounding (<= 1 ulp),
//! `ln` carries 12 guard digits through an argument-reduced atanh series
//! (<= 2 ulp). Round-half-away-from-zero throughout.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Sign/mantissa/exponent decimal float; value is `mant * 10^exp`.
/// Zero is canonically `{mant: 0, exp: 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp }
    }

    fn digits(&self) -> u64 {
        decimal_digits(&self.mant)
    }

    /// Decimal exponent of the leading digit (`value ~ d.ddd * 10^mag`).
    /// Meaningless for zero (returns a large negative sentinel).
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN / 2;
        }
        self.digits() as i64 - 1 + self.exp
    }

    /// Compare absolute values.
    pub fn cmp_abs(&self, other: &BigFloat) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        if self.is_zero() || other.is_zero() {
            return self
                .mant
                .abs()
                .cmp(&other.mant.abs())
                .then(Ordering::Equal);
        }
        match self.magnitude().cmp(&other.magnitude()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // align exponents and compare mantissas
        let (a, b) = align(self, other);
        a.abs().cmp(&b.abs())
    }

    /// Best-effort conversion for reporting; saturates on extreme exponents.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // use the leading ~18 digits to avoid BigInt->f64 overflow
        let d = self.digits();
        let (mant, exp) = if d > 18 {
            let cut = d - 18;
            (&self.mant / pow10(cut), self.exp + cut as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m = mant.to_f64().unwrap_or(if self.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
        m * 10f64.powi(exp.clamp(-400, 400) as i32)
    }

    /// Render with `digits` significant decimal digits. Plain positional
    /// notation for moderate magnitudes, scientific otherwise.
    pub fn to_decimal(&self, digits: usize) -> String {
        assert!(digits >= 1);
        if self.is_zero() {
            return "0".to_string();
        }
        let rounded = round_to(self.clone(), digits);
        // re-read: rounding can carry (999.. -> 1000..)
        let neg = rounded.is_negative();
        let mut ds = rounded.mant.abs().to_string();
        // pad to exactly `digits` significant digits
        if ds.len() < digits {
            ds.push_str(&"0".repeat(digits - ds.len()));
        } else if ds.len() > digits {
            // carry produced an extra digit ending in zero
            ds.truncate(digits);
        }
        let mag = rounded.magnitude(); // value ~ d.ddd * 10^mag
        let body = if mag >= -6 && mag < digits as i64 + 6 {
            if mag >= 0 {
                let point = mag as usize + 1;
                if point >= ds.len() {
                    let mut s = ds.clone();
                    s.push_str(&"0".repeat(point - ds.len()));
                    s
                } else {
                    format!("{}.{}", &ds[..point], &ds[point..])
                }
            } else {
                format!("0.{}{}", "0".repeat((-mag - 1) as usize), ds)
            }
        } else {
            let mut s = String::new();
            s.push_str(&ds[..1]);
            if ds.len() > 1 {
                s.push('.');
                s.push_str(&ds[1..]);
            }
            s.push('e');
            s.push_str(&mag.to_string());
            s
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }
}

fn decimal_digits(x: &BigInt) -> u64 {
    if x.is_zero() {
        return 0;
    }
    // to_string is fine at these precisions (hundreds of digits)
    let s = x.abs().to_string();
    s.len() as u64
}

fn pow10(e: u64) -> BigInt {
    BigInt::from(10u32).pow(e as u32)
}

fn align(a: &BigFloat, b: &BigFloat) -> (BigInt, BigInt) {
    if a.exp >= b.exp {
        (&a.mant * pow10((a.exp - b.exp) as u64), b.mant.clone())
    } else {
        (a.mant.clone(), &b.mant * pow10((b.exp - a.exp) as u64))
    }
}

/// Arithmetic context carrying the significant-digit budget.
#[derive(Debug, Clone, Copy)]
pub struct FloatCtx {
    prec: usize,
}

/// Round-half-away-from-zero to `digits` significant digits.
fn round_to(x: BigFloat, digits: usize) -> BigFloat {
    let d = x.digits();
    if d <= digits as u64 {
        return x;
    }
    let cut = d - digits as u64;
    let div = pow10(cut);
    let (mut q, r) = x.mant.div_rem(&div);
    if &r.abs() * 2u32 >= div {
        if x.mant.sign() == Sign::Minus {
            q -= 1;
        } else {
            q += 1;
        }
    }
    if q.is_zero() {
        return BigFloat::zero();
    }
    BigFloat { mant: q, exp: x.exp + cut as i64 }
}

impl FloatCtx {
    pub fn new(prec: usize) -> Self {
        FloatCtx { prec: prec.max(5) }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Round-half-away-from-zero to the context precision.
    pub fn round(&self, x: BigFloat) -> BigFloat {
        round_to(x, self.prec)
    }

    pub fn from_i64(&self, v: i64) -> BigFloat {
        self.round(BigFloat { mant: BigInt::from(v), exp: 0 })
    }

    pub fn from_bigint(&self, v: BigInt) -> BigFloat {
        self.round(BigFloat { mant: v, exp: 0 })
    }

    /// Exact rational to float with <= 1 ulp error.
    pub fn from_rational(&self, v: &BigRational) -> BigFloat {
        if v.is_zero() {
            return BigFloat::zero();
        }
        let num = v.numer();
        let den = v.denom();
        // scale so the quotient has prec + 2 digits
        let want = self.prec as i64 + 2;
        let scale = want - (decimal_digits(num) as i64 - decimal_digits(den) as i64);
        let (scaled, exp) = if scale > 0 {
            (num * pow10(scale as u64), -scale)
        } else {
            (num.clone(), 0)
        };
        let q = rounded_div(&scaled, den);
        self.round(BigFloat { mant: q, exp })
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        if a.is_zero() {
            return self.round(b.clone());
        }
        if b.is_zero() {
            return self.round(a.clone());
        }
        // cap the alignment cost: an addend more than prec + 4 digits below
        // the other operand cannot move the correctly rounded sum by more
        // than a fraction of an ulp, so it is dropped
        let gap = a.magnitude() - b.magnitude();
        let window = self.prec as i64 + 4;
        if gap > window {
            return self.round(a.clone());
        }
        if gap < -window {
            return self.round(b.clone());
        }
        let exp = a.exp.min(b.exp);
        let (ma, mb) = align(a, b);
        self.round(BigFloat { mant: ma + mb, exp })
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        self.add(a, &b.neg())
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        if a.is_zero() || b.is_zero() {
            return BigFloat::zero();
        }
        self.round(BigFloat { mant: &a.mant * &b.mant, exp: a.exp + b.exp })
    }

    /// Division with two guard digits; error <= 1 ulp. Panics on zero divisor.
    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        assert!(!b.is_zero(), "division by zero BigFloat");
        if a.is_zero() {
            return BigFloat::zero();
        }
        let want = self.prec as i64 + 2;
        let scale = want - (a.digits() as i64 - b.digits() as i64);
        let (scaled, exp) = if scale > 0 {
            (&a.mant * pow10(scale as u64), a.exp - b.exp - scale)
        } else {
            (a.mant.clone(), a.exp - b.exp)
        };
        let q = rounded_div(&scaled, &b.mant);
        self.round(BigFloat { mant: q, exp })
    }

    pub fn powi(&self, a: &BigFloat, e: u32) -> BigFloat {
        let mut out = self.from_i64(1);
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        out
    }

    /// Natural logarithm of a positive value: reduce into `[0.75, 1.5]` by
    /// powers of two, then `ln y = 2 atanh((y-1)/(y+1))`.
    pub fn ln(&self, x: &BigFloat) -> Result<BigFloat, super::NumError> {
        if x.is_zero() || x.is_negative() {
            return Err(super::NumError::LnDomain);
        }
        let work = FloatCtx::new(self.prec + 12);
        let two = work.from_i64(2);
        let mut y = x.clone();
        let mut e2: i64 = 0;
        let three_halves = work.from_rational(&BigRational::new(3.into(), 2.into()));
        let three_quarters = work.from_rational(&BigRational::new(3.into(), 4.into()));
        while y.cmp_abs(&three_halves) == std::cmp::Ordering::Greater {
            y = work.div(&y, &two);
            e2 += 1;
        }
        while y.cmp_abs(&three_quarters) == std::cmp::Ordering::Less {
            y = work.mul(&y, &two);
            e2 -= 1;
        }
        let mut acc = work.atanh_small(&work.div(
            &work.sub(&y, &work.from_i64(1)),
            &work.add(&y, &work.from_i64(1)),
        ));
        acc = work.mul(&acc, &two);
        if e2 != 0 {
            let ln2 = work.ln2();
            let scaled = work.mul(&ln2, &work.from_i64(e2));
            acc = work.add(&acc, &scaled);
        }
        Ok(self.round(acc))
    }

    /// `atanh(t)` for `|t| <= 0.21` by the odd power series.
    fn atanh_small(&self, t: &BigFloat) -> BigFloat {
        let t2 = self.mul(t, t);
        let mut term = t.clone();
        let mut acc = t.clone();
        let mut denom: i64 = 1;
        let threshold = self.prec as i64 + 2;
        loop {
            term = self.mul(&term, &t2);
            denom += 2;
            let contrib = self.div(&term, &self.from_i64(denom));
            if contrib.is_zero() || acc.magnitude() - contrib.magnitude() > threshold {
                break;
            }
            acc = self.add(&acc, &contrib);
        }
        acc
    }

    /// `ln 2 = 2 atanh(1/3)`, computed at context precision.
    pub fn ln2(&self) -> BigFloat {
        let work = FloatCtx::new(self.prec + 8);
        let third = work.from_rational(&BigRational::new(1.into(), 3.into()));
        let v = work.mul(&work.atanh_small(&third), &work.from_i64(2));
        self.round(v)
    }
}

fn rounded_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (mut q, r) = num.div_rem(den);
    if &r.abs() * 2u32 >= den.abs() {
        if (num.sign() == Sign::Minus) ^ (den.sign() == Sign::Minus) {
            q -= 1;
        } else {
            q += 1;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn decimal_rendering() {
        let ctx = FloatCtx::new(40);
        let third = ctx.from_rational(&q(1, 3));
        assert_eq!(
            third.to_decimal(30),
            "0.333333333333333333333333333333"
        );
        assert_eq!(ctx.from_rational(&q(9, 20)).to_decimal(5), "0.45000");
        assert_eq!(ctx.from_i64(5).to_decimal(3), "5.00");
        assert_eq!(BigFloat::zero().to_decimal(10), "0");
        assert_eq!(ctx.from_rational(&q(-1, 8)).to_decimal(4), "-0.1250");
        // carry at the rendering boundary: 0.9999... -> 1.00
        assert_eq!(ctx.from_rational(&q(9999, 10000)).to_decimal(3), "1.00");
    }

    #[test]
    fn arithmetic_against_exact_rationals() {
        let ctx = FloatCtx::new(50);
        let a = q(355, 113);
        let b = q(-7, 97);
        let fa = ctx.from_rational(&a);
        let fb = ctx.from_rational(&b);
        for (exact, float) in [
            (&a + &b, ctx.add(&fa, &fb)),
            (&a - &b, ctx.sub(&fa, &fb)),
            (&a * &b, ctx.mul(&fa, &fb)),
            (&a / &b, ctx.div(&fa, &fb)),
        ] {
            let want = ctx.from_rational(&exact);
            let diff = ctx.sub(&float, &want);
            assert!(
                diff.is_zero() || want.magnitude() - diff.magnitude() >= 48,
                "diff {diff:?}"
            );
        }
    }

    #[test]
    fn powi_squares() {
        let ctx = FloatCtx::new(40);
        let x = ctx.from_rational(&q(10, 7));
        let got = ctx.powi(&x, 6);
        let want = ctx.from_rational(&q(1_000_000, 117_649));
        let diff = ctx.sub(&got, &want);
        assert!(diff.is_zero() || want.magnitude() - diff.magnitude() >= 37);
    }

    #[test]
    fn ln_functional_equation() {
        // ln(x*y) = ln x + ln y at 60 digits
        let ctx = FloatCtx::new(60);
        let x = ctx.from_rational(&q(17, 5));
        let y = ctx.from_rational(&q(23, 11));
        let lhs = ctx.ln(&ctx.mul(&x, &y)).unwrap();
        let rhs = ctx.add(&ctx.ln(&x).unwrap(), &ctx.ln(&y).unwrap());
        let diff = ctx.sub(&lhs, &rhs);
        assert!(diff.is_zero() || lhs.magnitude() - diff.magnitude() >= 58);
        // ln(4) = 2 ln 2
        let four = ctx.ln(&ctx.from_i64(4)).unwrap();
        let twice = ctx.mul(&ctx.ln2(), &ctx.from_i64(2));
        let diff = ctx.sub(&four, &twice);
        assert!(diff.is_zero() || four.magnitude() - diff.magnitude() >= 58);
    }

    #[test]
    fn ln_domain_errors() {
        let ctx = FloatCtx::new(30);
        assert!(ctx.ln(&BigFloat::zero()).is_err());
        assert!(ctx.ln(&ctx.from_i64(-2)).is_err());
    }

    #[test]
    fn far_magnitude_addition_drops_sub_ulp_addend() {
        let ctx = FloatCtx::new(30);
        let big = ctx.from_i64(1);
        let tiny = BigFloat { mant: BigInt::from(1), exp: -80 };
        // correctly rounded at 30 digits, 1 + 1e-80 is exactly 1
        assert_eq!(ctx.add(&big, &tiny), big);
        // but an addend inside the window is kept
        let near = BigFloat { mant: BigInt::from(1), exp: -20 };
        let sum = ctx.add(&big, &near);
        assert_eq!(sum.cmp_abs(&big), std::cmp::Ordering::Greater);
    }
}
