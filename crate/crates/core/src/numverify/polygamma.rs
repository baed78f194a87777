//! Arbitrary-precision polygamma evaluation.
//!
//! `psi_k(z)` for rational `z > 0`: shift `z` upward with the recurrence
//! `psi_k(z) = psi_k(z+1) - (-1)^k k! / z^{k+1}` until the argument clears a
//! precision-dependent threshold, then sum the asymptotic expansion with
//! Bernoulli-number coefficients. Guard digits keep the result accurate to
//! at least `prec - 5` significant digits.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::bigfloat::{BigFloat, FloatCtx};
use super::NumError;

static BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

/// `B_j` with the `B_1 = -1/2` convention, extending a shared cache.
pub fn bernoulli(j: usize) -> BigRational {
    let mut cache = BERNOULLI.lock().expect("bernoulli cache poisoned");
    if cache.is_empty() {
        cache.push(BigRational::one());
    }
    while cache.len() <= j {
        let n = cache.len(); // computing B_n from sum C(n+1, t) B_t = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(n+1, t) starting at t = 0
        for (t, b) in cache.iter().enumerate() {
            acc += b * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(n + 1 - t) / BigInt::from(t + 1);
        }
        // binom is now C(n+1, n)
        let val = -acc / BigRational::from_integer(binom);
        cache.push(val);
    }
    cache[j].clone()
}

fn factorial(k: u32) -> BigRational {
    let mut f = BigInt::one();
    for t in 2..=k as u64 {
        f *= BigInt::from(t);
    }
    BigRational::from_integer(f)
}

/// `psi_k(z)` to `prec` significant digits (accurate to `>= prec - 5`).
pub fn polygamma(k: u32, z: &BigRational, prec: usize) -> Result<BigFloat, NumError> {
    if !z.is_positive() {
        return Err(NumError::Domain);
    }
    let work_digits = prec + 10 + 2 * k as usize;
    let ctx = FloatCtx::new(work_digits);
    // threshold where the asymptotic series reaches ~work_digits digits:
    // its best accuracy is ~ e^(-2 pi x), so x >~ ln(10)/(2 pi) * digits
    let threshold = (2 + work_digits * 2 / 5) as i64 + 8;
    let shift = {
        let need = BigInt::from(threshold) - z.ceil().to_integer();
        need.to_u64().unwrap_or(0)
    };
    let x = z + BigRational::from_integer(BigInt::from(shift));
    let tail = asymptotic(k, &x, &ctx)?;
    // downward recurrence corrections: (-1)^k k! sum 1/(z+i)^(k+1)
    let kfac = factorial(k);
    let sign = if k % 2 == 0 { kfac } else { -kfac };
    let mut corr = BigRational::zero();
    for i in 0..shift {
        let base = z + BigRational::from_integer(BigInt::from(i));
        let mut p = BigRational::one();
        for _ in 0..=k {
            p *= &base;
        }
        corr += &sign / p;
    }
    let out = ctx.sub(&tail, &ctx.from_rational(&corr));
    Ok(FloatCtx::new(prec).round(out))
}

/// Asymptotic expansion at large `x`:
/// `psi_0(x) ~ ln x - 1/(2x) - sum B_2j/(2j x^2j)`;
/// `psi_k(x) ~ (-1)^(k-1) [ (k-1)!/x^k + k!/(2x^(k+1))
///             + sum B_2j (2j+k-1)!/((2j)! x^(2j+k)) ]`.
fn asymptotic(k: u32, x: &BigRational, ctx: &FloatCtx) -> Result<BigFloat, NumError> {
    let xf = ctx.from_rational(x);
    let inv = ctx.div(&ctx.from_i64(1), &xf);
    let inv2 = ctx.mul(&inv, &inv);
    let cutoff = ctx.prec() as i64 + 2;
    let mut acc;
    let mut power; // inv^(2j + k) iterate
    if k == 0 {
        acc = ctx.ln(&xf)?;
        acc = ctx.sub(&acc, &ctx.div(&inv, &ctx.from_i64(2)));
        power = inv2.clone();
    } else {
        let km1_fac = factorial(k - 1);
        let k_fac = factorial(k);
        let lead = ctx.mul(&ctx.from_rational(&km1_fac), &ctx.powi(&inv, k));
        let next = ctx.mul(
            &ctx.from_rational(&(k_fac / BigRational::from_integer(2.into()))),
            &ctx.powi(&inv, k + 1),
        );
        acc = ctx.add(&lead, &next);
        power = ctx.powi(&inv, k + 2);
    }
    let mut prev_mag: Option<i64> = None;
    for j in 1..=4000usize {
        // coefficient: k = 0 -> B_2j/(2j); k >= 1 -> B_2j (2j+1)...(2j+k-1)
        let b = bernoulli(2 * j);
        let coeff = if k == 0 {
            b / BigRational::from_integer(BigInt::from(2 * j))
        } else {
            let mut rising = BigRational::one();
            for t in 1..k as usize {
                rising *= BigRational::from_integer(BigInt::from(2 * j + t));
            }
            b * rising
        };
        let term = ctx.mul(&ctx.from_rational(&coeff), &power);
        if term.is_zero() {
            break;
        }
        let mag_now = term.magnitude();
        if let Some(pm) = prev_mag {
            if mag_now > pm + 1 {
                // terms growing again before reaching the target precision:
                // the shift threshold was too small (internal bug)
                return Err(NumError::SeriesDivergence);
            }
        }
        prev_mag = Some(mag_now);
        if k == 0 {
            acc = ctx.sub(&acc, &term);
        } else {
            acc = ctx.add(&acc, &term);
        }
        if acc.magnitude() - mag_now > cutoff {
            break;
        }
        power = ctx.mul(&power, &inv2);
    }
    if k % 2 == 0 && k > 0 {
        acc = acc.neg();
    }
    Ok(acc)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    /// Parse a plain decimal string into an exact rational.
    fn dec(s: &str) -> BigRational {
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        let digits: BigInt = format!("{int_part}{frac_part}").parse().unwrap();
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        BigRational::new(digits * BigInt::from(sign), den)
    }

    fn check_digits(got: &BigFloat, want: &str, digits: i64) {
        let ctx = FloatCtx::new(118);
        let w = ctx.from_rational(&dec(want));
        let diff = ctx.sub(got, &w);
        assert!(
            diff.is_zero() || w.magnitude() - diff.magnitude() >= digits,
            "agreement only to {} digits, want {digits}",
            w.magnitude() - diff.magnitude()
        );
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), BigRational::one());
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), BigRational::zero());
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    // Reference values computed independently at 120 digits.
    const PSI0_5: &str = "1.5061176684318004727268212432509309022911739973934097345275660984484656065556686623963862700415865838187018861";
    const PSI0_1: &str = "-0.57721566490153286060651209008240243104215933593992359880576723488486772677766467093694706329174674951463144725";
    const PSI1_1: &str = "1.6449340668482264364724151666460251892189499012067984377355582293700074704032008738336289006197587053040043190";
    const PSI2_HALF: &str = "-16.828796644234319995596334261160299870709808092766984345091801774785734881008383262610382230530693614046788209";
    const PSI1_10_3: &str = "0.34942365603933897975118777336190411562094493560750875418658116001469478193284057879324499775459144070866703568";
    const PSI3_7_4: &str = "0.80034957188763679729111622728376026427656115434076708820974769804021116357663171366473472321462829743301396237";
    const PSI5_13: &str = "0.000078020533309168826755656216648201782453402676252204974257157239159946232785869084944384641022365702845717067805";
    const PSI0_1_4: &str = "-4.2274535333762654080895301460966835773672444387082422716552795595189567958298533170685544569520613461317099336";

    #[test]
    fn digamma_reference_values() {
        // psi_0(5) = 25/12 - gamma: harmonic recurrence down from psi_0(1)
        check_digits(&polygamma(0, &rat(5, 1), 100).unwrap(), PSI0_5, 95);
        check_digits(&polygamma(0, &rat(1, 1), 100).unwrap(), PSI0_1, 95);
        check_digits(&polygamma(0, &rat(1, 4), 100).unwrap(), PSI0_1_4, 95);
        // harmonic relation psi_0(5) - psi_0(1) = 25/12 exactly
        let ctx = FloatCtx::new(100);
        let diff = ctx.sub(
            &polygamma(0, &rat(5, 1), 100).unwrap(),
            &polygamma(0, &rat(1, 1), 100).unwrap(),
        );
        let wanted = ctx.from_rational(&rat(25, 12));
        let err = ctx.sub(&diff, &wanted);
        assert!(err.is_zero() || err.to_f64().abs() < 1e-93);
    }

    #[test]
    fn higher_order_reference_values() {
        check_digits(&polygamma(1, &rat(1, 1), 100).unwrap(), PSI1_1, 95);
        check_digits(&polygamma(2, &rat(1, 2), 100).unwrap(), PSI2_HALF, 95);
        check_digits(&polygamma(1, &rat(10, 3), 100).unwrap(), PSI1_10_3, 95);
        check_digits(&polygamma(3, &rat(7, 4), 100).unwrap(), PSI3_7_4, 95);
        check_digits(&polygamma(5, &rat(13, 1), 100).unwrap(), PSI5_13, 95);
    }

    #[test]
    fn matches_hurwitz_zeta_oracle() {
        // independent exact-rational route for k >= 1
        let ctx = FloatCtx::new(80);
        for (k, z) in [(1u32, rat(10, 3)), (2, rat(7, 2)), (3, rat(1, 3)), (5, rat(29, 7))] {
            let got = polygamma(k, &z, 80).unwrap();
            let want = ctx.from_rational(&zeta_oracle::polygamma_via_zeta(k, &z, 85));
            let diff = ctx.sub(&got, &want);
            assert!(
                diff.is_zero() || diff.to_f64().abs() < want.to_f64().abs() * 1e-72,
                "k={k} diff={}",
                diff.to_decimal(5)
            );
        }
    }

    #[test]
    fn shift_recurrence_property() {
        // psi_k(z+s) - psi_k(z) = (-1)^k k! sum_{i<s} 1/(z+i)^(k+1) for
        // shifts up to 10 at scattered points z in [1, 50]
        let ctx = FloatCtx::new(60);
        for (k, z, s) in [
            (0u32, rat(7, 3), 1u32),
            (1, rat(12, 5), 4),
            (2, rat(97, 2), 10),
            (3, rat(31, 4), 7),
            (4, rat(41, 3), 2),
            (5, rat(9, 2), 10),
        ] {
            let up =
                polygamma(k, &(z.clone() + BigRational::from_integer(s.into())), 60).unwrap();
            let lo = polygamma(k, &z, 60).unwrap();
            let mut corr = BigRational::zero();
            for i in 0..s {
                let base = &z + BigRational::from_integer(i.into());
                let mut p = BigRational::one();
                for _ in 0..=k {
                    p *= &base;
                }
                corr += factorial(k) / p;
            }
            if k % 2 == 1 {
                corr = -corr;
            }
            let lhs = ctx.sub(&up, &lo);
            let rhs = ctx.from_rational(&corr);
            let diff = ctx.sub(&lhs, &rhs);
            assert!(
                diff.is_zero() || diff.to_f64().abs() < rhs.to_f64().abs() * 1e-54 + 1e-60,
                "k={k} shift={s}"
            );
        }
    }

    #[test]
    fn duplication_identity_digamma() {
        // psi_0(2z) = (psi_0(z) + psi_0(z + 1/2))/2 + ln 2; independent of
        // the shift recurrence used internally
        let ctx = FloatCtx::new(60);
        let z = rat(13, 7);
        let lhs = polygamma(0, &(z.clone() * rat(2, 1)), 60).unwrap();
        let sum = ctx.add(
            &polygamma(0, &z, 60).unwrap(),
            &polygamma(0, &(z + rat(1, 2)), 60).unwrap(),
        );
        let rhs = ctx.add(&ctx.div(&sum, &ctx.from_i64(2)), &ctx.ln2());
        let diff = ctx.sub(&lhs, &rhs);
        assert!(diff.is_zero() || diff.to_f64().abs() < 1e-54);
    }

    #[test]
    fn domain_error() {
        assert!(matches!(polygamma(0, &rat(0, 1), 30), Err(NumError::Domain)));
        assert!(matches!(polygamma(2, &rat(-3, 2), 30), Err(NumError::Domain)));
    }
}
