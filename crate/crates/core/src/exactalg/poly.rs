//! Sparse two-variable polynomials over arbitrary-precision rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ExactError, VarContext};

/// Exponent vector, one entry per context variable, graded-lex ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(pub [u32; 2]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0]);

    pub fn total_degree(&self) -> u32 {
        self.0[0] + self.0[1]
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0[0] <= other.0[0] && self.0[1] <= other.0[1]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial([self.0[0] + other.0[0], self.0[1] + other.0[1]])
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial([self.0[0] - other.0[0], self.0[1] - other.0[1]])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then(self.0[0].cmp(&other.0[0]))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: exponent vector -> nonzero rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Polynomial {
    ctx: VarContext,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(ctx: VarContext) -> Self {
        Polynomial { ctx, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: VarContext, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::ONE, c);
        }
        Polynomial { ctx, terms }
    }

    pub fn int(ctx: VarContext, c: i64) -> Self {
        Self::constant(ctx, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn rational(ctx: VarContext, p: i64, q: i64) -> Self {
        Self::constant(
            ctx,
            BigRational::new(BigInt::from(p), BigInt::from(q)),
        )
    }

    /// The `idx`-th context variable (0 or 1) to the first power.
    pub fn variable(ctx: VarContext, idx: usize) -> Self {
        assert!(idx < 2, "context has exactly two variables");
        let mut exp = [0u32; 2];
        exp[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(exp), BigRational::one());
        Polynomial { ctx, terms }
    }

    pub fn from_terms(
        ctx: VarContext,
        iter: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Self {
        let mut p = Polynomial::zero(ctx);
        for (mono, c) in iter {
            p.add_term(mono, c);
        }
        p
    }

    pub fn context(&self) -> VarContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::ONE)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Monomial::ONE))
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Leading (monomial, coefficient) under graded lex, `None` for zero.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, mono: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_ctx(&self, other: &Polynomial) -> Result<(), ExactError> {
        if self.ctx != other.ctx {
            return Err(ExactError::ContextMismatch(self.ctx, other.ctx));
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, ExactError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(*mono, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, ExactError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, ExactError> {
        self.check_ctx(other)?;
        let mut out = Polynomial::zero(self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.ctx);
        }
        Polynomial {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.ctx, BigRational::one());
        for _ in 0..e {
            out = out.mul(self).expect("same context");
        }
        out
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        if divisor.is_zero() {
            return None;
        }
        if self.ctx != divisor.ctx {
            return None;
        }
        let (lm_d, lc_d) = divisor.leading().expect("nonzero divisor");
        let lm_d = *lm_d;
        let lc_d = lc_d.clone();
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.ctx);
        while let Some((lm_r, lc_r)) = rem.leading() {
            if !lm_d.divides(lm_r) {
                return None;
            }
            let mono = lm_r.div(&lm_d);
            let coeff = lc_r / &lc_d;
            quot.add_term(mono, coeff.clone());
            // rem -= divisor * coeff X^mono
            for (md, cd) in &divisor.terms {
                rem.add_term(md.mul(&mono), -(cd * &coeff));
            }
        }
        Some(quot)
    }

    /// Componentwise minimum exponent vector over all terms (the largest
    /// monomial dividing the polynomial). Returns the unit monomial for zero.
    pub fn monomial_content(&self) -> Monomial {
        let mut min = [u32::MAX; 2];
        for mono in self.terms.keys() {
            min[0] = min[0].min(mono.0[0]);
            min[1] = min[1].min(mono.0[1]);
        }
        if min[0] == u32::MAX {
            Monomial::ONE
        } else {
            Monomial(min)
        }
    }

    /// Divide out a monomial that divides every term.
    pub fn div_monomial(&self, mono: &Monomial) -> Polynomial {
        Polynomial {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    debug_assert!(mono.divides(m));
                    (m.div(mono), c.clone())
                })
                .collect(),
        }
    }

    /// Signed rational content: `c` with `self = c * primitive(self)`, where
    /// the primitive part has coprime integer coefficients and a positive
    /// leading coefficient. Zero polynomial has content zero.
    pub fn content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&c.numer().abs());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.leading().expect("nonzero").1.is_negative() {
            content = -content;
        }
        content
    }

    /// `self / content(self)`; integer coefficients, positive leading.
    pub fn primitive_part(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        self.scale(&c.recip())
    }

    /// Substitute variable 0 (`m`) by `m + d`.
    pub fn shift_var0(&self, d: i64) -> Polynomial {
        let ctx = self.ctx;
        let shift = BigRational::from_integer(BigInt::from(d));
        let mut out = Polynomial::zero(ctx);
        for (mono, c) in &self.terms {
            let [e0, e1] = mono.0;
            // (m + d)^e0 expanded binomially
            let mut bin = BigRational::one();
            let mut pow = BigRational::one();
            for j in (0..=e0).rev() {
                // coefficient C(e0, j) * d^(e0-j), iterating j from e0 down
                out.add_term(Monomial([j, e1]), c * &bin * &pow);
                if j > 0 {
                    bin = bin * BigRational::from_integer(BigInt::from(j))
                        / BigRational::from_integer(BigInt::from(e0 - j + 1));
                    pow *= &shift;
                }
            }
        }
        out
    }

    /// Substitute variable 1 (`alpha`) by `n - m`, moving to the `MN` context.
    pub fn substitute_alpha(&self) -> Result<Polynomial, ExactError> {
        if self.ctx != VarContext::MAlpha {
            return Err(ExactError::ContextMismatch(self.ctx, VarContext::MAlpha));
        }
        let mut out = Polynomial::zero(VarContext::MN);
        for (mono, c) in &self.terms {
            let [e0, e1] = mono.0;
            // m^e0 (n - m)^e1 = sum_j C(e1, j) n^j (-m)^(e1-j) m^e0
            let mut bin = BigInt::one();
            for j in 0..=e1 {
                let sign = if (e1 - j) % 2 == 0 { 1 } else { -1 };
                let coeff = c * BigRational::from_integer(&bin * BigInt::from(sign));
                out.add_term(Monomial([e0 + e1 - j, j]), coeff);
                if j < e1 {
                    bin = bin * BigInt::from(e1 - j) / BigInt::from(j + 1);
                }
            }
        }
        Ok(out)
    }

    /// Substitute variable 0 (`m`) by 1, staying in the same context.
    pub fn substitute_var0_one(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.ctx);
        for (mono, c) in &self.terms {
            out.add_term(Monomial([0, mono.0[1]]), c.clone());
        }
        out
    }

    /// Partial derivative with respect to variable 1 (`alpha`).
    pub fn derivative_var1(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.ctx);
        for (mono, c) in &self.terms {
            let [e0, e1] = mono.0;
            if e1 > 0 {
                out.add_term(
                    Monomial([e0, e1 - 1]),
                    c * BigRational::from_integer(BigInt::from(e1)),
                );
            }
        }
        out
    }

    /// Exact evaluation at the point (variable 0, variable 1).
    pub fn eval(&self, x0: &BigRational, x1: &BigRational) -> BigRational {
        let max0 = self.terms.keys().map(|m| m.0[0]).max().unwrap_or(0);
        let max1 = self.terms.keys().map(|m| m.0[1]).max().unwrap_or(0);
        let pow = |x: &BigRational, top: u32| {
            let mut v = Vec::with_capacity(top as usize + 1);
            v.push(BigRational::one());
            for i in 1..=top {
                let next = &v[i as usize - 1] * x;
                v.push(next);
            }
            v
        };
        let p0 = pow(x0, max0);
        let p1 = pow(x1, max1);
        let mut acc = BigRational::zero();
        for (mono, c) in &self.terms {
            acc += c * &p0[mono.0[0] as usize] * &p1[mono.0[1] as usize];
        }
        acc
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let vars = self.ctx.variables();
        let mut first = true;
        for (mono, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || mono.total_degree() == 0 {
                parts.push(mag.to_string());
            }
            for (i, name) in vars.iter().enumerate() {
                match mono.0[i] {
                    0 => {}
                    1 => parts.push((*name).to_string()),
                    e => parts.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> VarContext {
        VarContext::MAlpha
    }

    fn m() -> Polynomial {
        Polynomial::variable(ctx(), 0)
    }

    fn al() -> Polynomial {
        Polynomial::variable(ctx(), 1)
    }

    #[test]
    fn add_mul_sub_basics() {
        let sum = m().add(&al()).unwrap();
        assert_eq!(sum.num_terms(), 2);
        // m * (m + alpha) = m^2 + m alpha
        let p = m().mul(&sum).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(
            p.terms().map(|(mo, _)| mo.0).collect::<Vec<_>>(),
            vec![[1, 1], [2, 0]]
        );
        // (m + alpha) - (m + alpha) = 0
        assert!(sum.sub(&sum).unwrap().is_zero());
    }

    #[test]
    fn context_mismatch_rejected() {
        let other = Polynomial::variable(VarContext::MN, 0);
        assert!(matches!(
            m().add(&other),
            Err(ExactError::ContextMismatch(_, _))
        ));
    }

    #[test]
    fn exact_division() {
        let sum = m().add(&al()).unwrap();
        let p = m().mul(&sum).unwrap(); // m^2 + m alpha
        assert_eq!(p.exact_div(&m()).unwrap(), sum);
        assert_eq!(p.exact_div(&sum).unwrap(), m());
        // not divisible
        assert!(p.exact_div(&m().add(&Polynomial::int(ctx(), 1)).unwrap()).is_none());
    }

    #[test]
    fn content_and_primitive() {
        // -4m - 6alpha: content -2, primitive 2m + 3alpha
        let p = m().scale(&BigRational::from_integer((-4).into())).add(
            &al().scale(&BigRational::from_integer((-6).into())),
        )
        .unwrap();
        assert_eq!(p.content(), BigRational::from_integer((-2).into()));
        let prim = p.primitive_part();
        assert!(prim.leading().unwrap().1 > &BigRational::zero());
        assert_eq!(prim.scale(&p.content()), p);
    }

    #[test]
    fn shift_var0_binomial() {
        // (m)^2 under m -> m+1 gives m^2 + 2m + 1
        let p = m().pow(2).shift_var0(1);
        assert_eq!(p.eval(&BigRational::from_integer(3.into()), &BigRational::zero()),
                   BigRational::from_integer(16.into()));
        assert_eq!(p.num_terms(), 3);
        // round trip
        assert_eq!(p.shift_var0(-1), m().pow(2));
    }

    #[test]
    fn substitute_alpha_examples() {
        // m(m+alpha) -> mn
        let p = m().mul(&m().add(&al()).unwrap()).unwrap();
        let s = p.substitute_alpha().unwrap();
        let mn = Polynomial::variable(VarContext::MN, 0)
            .mul(&Polynomial::variable(VarContext::MN, 1))
            .unwrap();
        assert_eq!(s, mn);
        // alpha^2 -> n^2 - 2mn + m^2
        let s2 = al().pow(2).substitute_alpha().unwrap();
        assert_eq!(s2.num_terms(), 3);
        let at = |mv: i64, nv: i64| {
            s2.eval(
                &BigRational::from_integer(mv.into()),
                &BigRational::from_integer(nv.into()),
            )
        };
        assert_eq!(at(2, 5), BigRational::from_integer(9.into()));
    }

    #[test]
    fn derivative_var1() {
        // d/dalpha (m alpha^3) = 3 m alpha^2
        let p = m().mul(&al().pow(3)).unwrap();
        let d = p.derivative_var1();
        assert_eq!(d, m().mul(&al().pow(2)).unwrap().scale(&BigRational::from_integer(3.into())));
    }
}
