//! The cumulant recursion: mean seeds from the dimension-shift recurrences,
//! the decoupled integrals `H`/`h`/`D` recast as lower-order joint cumulants,
//! the decoupled terms `delta_l(k)` and `delta_l^R(k)`, and the memoized
//! driver that yields closed-form cumulants of the induced entropy.

mod store;

pub use store::{list_dir, read_entry, CumulantKey, CumulantStore, StatKind, StoreError};

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::combinat::set_partitions;
use crate::exactalg::{Polynomial, RationalFunction, VarContext};
use crate::symexpr::{PolygammaBase, SymError, SymExpr};

/// Errors from the recursion driver.
#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("recursion depth exceeded while resolving {0}")]
    DepthExceeded(CumulantKey),
    #[error("final-form invariant violated for kappa_{order}(T): {detail}")]
    FinalForm { order: u32, detail: String },
}

/// Which decoupled integral a memo entry holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Decoupled {
    /// `H_s`: built from upward shifts `kappa^+ - kappa`.
    Upper,
    /// `h_s`: built from downward shifts `kappa - kappa^-`.
    Lower,
    /// `D_s`: the cumulant-derivative sum.
    Deriv,
}

const MAX_DEPTH: u32 = 64;

/// Memoized engine over the `MAlpha` context.
///
/// The store is the only mutable state; the recursive driver runs on a single
/// task, and completed entries are safe to share read-only.
pub struct Engine {
    store: CumulantStore,
    shifted: HashMap<(CumulantKey, i8), SymExpr>,
    decoupled: HashMap<(Decoupled, StatKind, u32, u32), SymExpr>,
    depth: u32,
}

impl Engine {
    pub fn new() -> Self {
        Engine::with_store(CumulantStore::in_memory())
    }

    pub fn with_cache_dir(dir: impl Into<std::path::PathBuf>) -> Result<Self, EngineError> {
        Ok(Engine::with_store(CumulantStore::with_dir(dir)?))
    }

    pub fn with_store(store: CumulantStore) -> Self {
        Engine { store, shifted: HashMap::new(), decoupled: HashMap::new(), depth: 0 }
    }

    pub fn store(&self) -> &CumulantStore {
        &self.store
    }

    fn ctx(&self) -> VarContext {
        VarContext::MAlpha
    }

    fn m_poly(&self) -> Polynomial {
        Polynomial::variable(self.ctx(), 0)
    }

    /// `2m + alpha`
    fn two_m_alpha(&self) -> RationalFunction {
        let m = self.m_poly();
        let al = Polynomial::variable(self.ctx(), 1);
        RationalFunction::from_poly(
            m.scale(&BigRational::from_integer(2.into())).add(&al).expect("ctx"),
        )
    }

    /// `kappa(R) = m(m + alpha)`
    pub fn kappa_r(&self) -> RationalFunction {
        RationalFunction::from_poly(
            self.m_poly().mul(&PolygammaBase::MPlusAlpha.poly()).expect("ctx"),
        )
    }

    /// Mean of `R_k` via the dimension-shift recurrence
    /// `(k+1) kappa(R_k) = (k-1)(2m+a) kappa(R_{k-1})
    ///                     + m(m+a)(kappa^+(R_{k-1}) - kappa^-(R_{k-1}))`.
    pub fn mean_r(&mut self, k: u32) -> Result<SymExpr, EngineError> {
        self.joint_cumulant(&CumulantKey::new(StatKind::Rk, k, 1))
    }

    fn mean_r_uncached(&mut self, k: u32) -> Result<SymExpr, EngineError> {
        if k == 0 {
            return Ok(SymExpr::from_poly(self.m_poly()));
        }
        let prev = self.mean_r(k - 1)?;
        let diff = prev.shift_m(1)?.sub(&prev.shift_m(-1)?)?;
        let val = prev
            .scale(&self.two_m_alpha())?
            .scale_rational(&BigRational::from_integer(BigInt::from(k as i64 - 1)))
            .add(&diff.scale(&self.kappa_r())?)?
            .scale_rational(&BigRational::new(1.into(), BigInt::from(k as i64 + 1)));
        Ok(val)
    }

    /// Mean of `R_k` via the three-term recurrence
    /// `(k+1) kappa(R_k) = (2k-1)(2m+a) kappa(R_{k-1})
    ///                     + (k-2)((k-1)^2 - a^2) kappa(R_{k-2})`,
    /// seeded with `kappa(R_0)` and `kappa(R_1)`. Used as a cross-check
    /// oracle for `mean_r`; intentionally not memoized.
    pub fn mean_r_alt(&self, k: u32) -> SymExpr {
        let ctx = self.ctx();
        let alpha = Polynomial::variable(ctx, 1);
        let mut prev2 = SymExpr::from_poly(self.m_poly()); // kappa(R_0)
        let mut prev1 = SymExpr::from_coeff(self.kappa_r()); // kappa(R_1)
        match k {
            0 => return prev2,
            1 => return prev1,
            _ => {}
        }
        for j in 2..=k {
            let ji = j as i64;
            let lin = prev1
                .scale(&self.two_m_alpha())
                .expect("ctx")
                .scale_rational(&BigRational::from_integer(BigInt::from(2 * ji - 1)));
            let quad_poly = Polynomial::int(ctx, (ji - 1) * (ji - 1))
                .sub(&alpha.pow(2))
                .expect("ctx")
                .scale(&BigRational::from_integer(BigInt::from(ji - 2)));
            let quad = prev2.scale(&RationalFunction::from_poly(quad_poly)).expect("ctx");
            let next = lin
                .add(&quad)
                .expect("ctx")
                .scale_rational(&BigRational::new(1.into(), BigInt::from(ji + 1)));
            prev2 = prev1;
            prev1 = next;
        }
        prev1
    }

    /// Mean of `T_k`; `k = 0` is the seed
    /// `(m+a) psi_0(m+a) - a psi_0(a) - m`, higher `k` follow the shifted
    /// recurrence coupled to `kappa(R_k)`.
    pub fn mean_t(&mut self, k: u32) -> Result<SymExpr, EngineError> {
        self.joint_cumulant(&CumulantKey::new(StatKind::Tk, k, 1))
    }

    fn mean_t_uncached(&mut self, k: u32) -> Result<SymExpr, EngineError> {
        let ctx = self.ctx();
        if k == 0 {
            let m_plus_alpha = RationalFunction::from_poly(PolygammaBase::MPlusAlpha.poly());
            let alpha = RationalFunction::from_poly(Polynomial::variable(ctx, 1));
            let e = SymExpr::psi(0, PolygammaBase::MPlusAlpha)
                .scale(&m_plus_alpha)?
                .sub(&SymExpr::psi(0, PolygammaBase::Alpha).scale(&alpha)?)?
                .sub(&SymExpr::from_poly(self.m_poly()))?;
            return Ok(e);
        }
        let prev = self.mean_t(k - 1)?;
        let diff = prev.shift_m(1)?.sub(&prev.shift_m(-1)?)?;
        let r_k = self.mean_r(k)?;
        let r_prev = self.mean_r(k - 1)?;
        let val = prev
            .scale(&self.two_m_alpha())?
            .scale_rational(&BigRational::from_integer(BigInt::from(k as i64 - 1)))
            .add(&diff.scale(&self.kappa_r())?)?
            .sub(&r_k)?
            .add(&r_prev.scale(&self.two_m_alpha())?)?
            .scale_rational(&BigRational::new(1.into(), BigInt::from(k as i64 + 1)));
        Ok(val)
    }

    /// `kappa_l(X_k, T, ..., T)` with `m -> m + dir`, memoized.
    pub fn shifted_cumulant(
        &mut self,
        key: &CumulantKey,
        dir: i64,
    ) -> Result<SymExpr, EngineError> {
        debug_assert!(dir == 1 || dir == -1);
        let memo_key = (*key, dir as i8);
        if let Some(v) = self.shifted.get(&memo_key) {
            return Ok(v.clone());
        }
        let base = self.joint_cumulant(key)?;
        let v = base.shift_m(dir)?;
        self.shifted.insert(memo_key, v.clone());
        Ok(v)
    }

    /// Decoupled integral `H_s(X_r, T, ..., T)`: sum over set partitions of
    /// the `s` slots of the product over blocks of `kappa^+ - kappa`.
    pub fn h_upper(&mut self, kind: StatKind, r: u32, s: u32) -> Result<SymExpr, EngineError> {
        self.h_integral(Decoupled::Upper, kind, r, s)
    }

    /// Mirrored integral `h_s(X_r, T, ..., T)`:
    /// `-sum over partitions of the product of (kappa^- - kappa)`.
    pub fn h_lower(&mut self, kind: StatKind, r: u32, s: u32) -> Result<SymExpr, EngineError> {
        self.h_integral(Decoupled::Lower, kind, r, s)
    }

    fn h_integral(
        &mut self,
        which: Decoupled,
        kind: StatKind,
        r: u32,
        s: u32,
    ) -> Result<SymExpr, EngineError> {
        debug_assert!(s >= 1);
        debug_assert!(which != Decoupled::Deriv);
        let memo_key = (which, kind, r, s);
        if let Some(v) = self.decoupled.get(&memo_key) {
            return Ok(v.clone());
        }
        let dir: i64 = if which == Decoupled::Upper { 1 } else { -1 };
        let mut total = SymExpr::zero(self.ctx());
        for part in set_partitions(s as usize) {
            let mut prod = SymExpr::int(self.ctx(), 1);
            for block in &part.blocks {
                let key = if block.contains(&1) {
                    CumulantKey::new(kind, r, block.len() as u32)
                } else {
                    CumulantKey::new(StatKind::Tk, 1, block.len() as u32)
                };
                let base = self.joint_cumulant(&key)?;
                let shifted = self.shifted_cumulant(&key, dir)?;
                // Upper: kappa^+ - kappa; Lower: kappa - kappa^-
                let diff = if dir == 1 { shifted.sub(&base)? } else { base.sub(&shifted)? };
                prod = prod.mul(&diff)?;
            }
            // h_s = -sum prod(kappa^- - kappa) = sum (-1)^(blocks+1) prod(kappa - kappa^-)
            if dir == -1 && part.num_blocks() % 2 == 0 {
                prod = prod.neg();
            }
            total = total.add(&prod)?;
        }
        self.decoupled.insert(memo_key, total.clone());
        Ok(total)
    }

    /// Decoupled integral `D_s(X_r, T, ..., T)` expanded into joint cumulants:
    /// for the `T` family
    /// `sum_{i=0}^{s-1} (s-1)!/(s-1-i)! ((r+s-1-i) kappa_{s-i}(T_r, ...)
    ///                                   + kappa_{s-i}(R_r, ...))`,
    /// and the `R`-only variant without the second summand.
    pub fn d_integral(&mut self, kind: StatKind, r: u32, s: u32) -> Result<SymExpr, EngineError> {
        debug_assert!(s >= 1);
        let memo_key = (Decoupled::Deriv, kind, r, s);
        if let Some(v) = self.decoupled.get(&memo_key) {
            return Ok(v.clone());
        }
        let mut total = SymExpr::zero(self.ctx());
        let mut falling: i64 = 1; // (s-1)!/(s-1-i)!
        for i in 0..s {
            if i > 0 {
                falling *= (s - i) as i64;
            }
            let weight = (r + s - 1 - i) as i64;
            let sub_order = s - i;
            let mut term = self
                .joint_cumulant(&CumulantKey::new(kind, r, sub_order))?
                .scale_rational(&BigRational::from_integer(BigInt::from(weight)));
            if kind == StatKind::Tk {
                term = term
                    .add(&self.joint_cumulant(&CumulantKey::new(StatKind::Rk, r, sub_order))?)?;
            }
            total =
                total.add(&term.scale_rational(&BigRational::from_integer(BigInt::from(falling))))?;
        }
        self.decoupled.insert(memo_key, total.clone());
        Ok(total)
    }

    fn binom_weight(l: u32, s: u32) -> BigRational {
        // (l-2)! / ((s-1)! (l-s-1)!)
        let mut num: i64 = 1;
        for t in 2..=(l as i64 - 2) {
            num *= t;
        }
        let mut d1: i64 = 1;
        for t in 2..=(s as i64 - 1) {
            d1 *= t;
        }
        let mut d2: i64 = 1;
        for t in 2..=(l as i64 - s as i64 - 1) {
            d2 *= t;
        }
        BigRational::new(BigInt::from(num), BigInt::from(d1 * d2))
    }

    /// Decoupled term
    /// `delta_l(k) = sum_s (l-2)!/((s-1)!(l-s-1)!)
    ///               (kappa(R) H_{l,s}(k) - D_{l,s}(k))`
    /// with `H_{l,s}(k) = sum_r H_s(T_r,..) h_{l-s}(T_{k-r-1},..)` and
    /// `D_{l,s}(k) = sum_r D_s(T_r,..) D_{l-s}(T_{k-r-1},..)`.
    pub fn delta_t(&mut self, l: u32, k: u32) -> Result<SymExpr, EngineError> {
        assert!(l >= 2, "delta_l(k) requires l >= 2");
        assert!(k >= 1, "delta_l(k) requires k >= 1");
        let kappa_r = self.kappa_r();
        let mut total = SymExpr::zero(self.ctx());
        for s in 1..l {
            let mut h_sum = SymExpr::zero(self.ctx());
            let mut d_sum = SymExpr::zero(self.ctx());
            for r in 0..k {
                let h_hi = self.h_upper(StatKind::Tk, r, s)?;
                let h_lo = self.h_lower(StatKind::Tk, k - r - 1, l - s)?;
                h_sum = h_sum.add(&h_hi.mul(&h_lo)?)?;
                let d_a = self.d_integral(StatKind::Tk, r, s)?;
                let d_b = self.d_integral(StatKind::Tk, k - r - 1, l - s)?;
                d_sum = d_sum.add(&d_a.mul(&d_b)?)?;
            }
            let contrib = h_sum.scale(&kappa_r)?.sub(&d_sum)?;
            total = total.add(&contrib.scale_rational(&Self::binom_weight(l, s)))?;
        }
        Ok(total)
    }

    /// Decoupled term for the `R_k` family:
    /// `delta_l^R(k) = sum_s (l-2)!/((s-1)!(l-s-1)!)
    ///                 (kappa(R) H^R_{l,s}(k) - 2 D^R_{l,s}(k))`,
    /// where `H^R` carries both `H*h` orderings because the slot-1 families
    /// `R_r` and `T_{k-r-1}` are not exchangeable.
    pub fn delta_r(&mut self, l: u32, k: u32) -> Result<SymExpr, EngineError> {
        assert!(l >= 2, "delta_l^R(k) requires l >= 2");
        assert!(k >= 2, "delta_l^R(k) requires k >= 2");
        let kappa_r = self.kappa_r();
        let mut total = SymExpr::zero(self.ctx());
        for s in 1..l {
            let mut h_sum = SymExpr::zero(self.ctx());
            let mut d_sum = SymExpr::zero(self.ctx());
            for r in 0..k {
                let h_r_up = self.h_upper(StatKind::Rk, r, s)?;
                let h_t_lo = self.h_lower(StatKind::Tk, k - r - 1, l - s)?;
                let h_r_lo = self.h_lower(StatKind::Rk, r, s)?;
                let h_t_up = self.h_upper(StatKind::Tk, k - r - 1, l - s)?;
                h_sum = h_sum
                    .add(&h_r_up.mul(&h_t_lo)?)?
                    .add(&h_r_lo.mul(&h_t_up)?)?;
                let d_a = self.d_integral(StatKind::Rk, r, s)?;
                let d_b = self.d_integral(StatKind::Tk, k - r - 1, l - s)?;
                d_sum = d_sum.add(&d_a.mul(&d_b)?)?;
            }
            let contrib = h_sum
                .scale(&kappa_r)?
                .sub(&d_sum.scale_rational(&BigRational::from_integer(2.into())))?;
            total = total.add(&contrib.scale_rational(&Self::binom_weight(l, s)))?;
        }
        Ok(total)
    }

    /// Memoized joint cumulant `kappa_l(X_k, T, ..., T)`.
    ///
    /// Resolution rules:
    /// (a) `l = 1`: the mean recurrences;
    /// (b) `T_k, l >= 2`: `delta_l(k) + d/dalpha kappa_{l-1}(T_{k+1}, ...)`;
    /// (c) `R_k, k >= 2, l >= 2`:
    ///     `delta_l^R(k) + d/dalpha kappa_{l-1}(R_{k+1}, ...) - D_{l-1}(T_k, ...)`;
    /// (d) `R_1, l >= 2`: `D_{l-1}(T_1, ...)`;
    /// (e) `R_0`: `m` for `l = 1`, zero otherwise (constant statistic);
    /// (f) `T_0, l >= 2`: `d/dalpha kappa_{l-1}(T, ..., T)`.
    pub fn joint_cumulant(&mut self, key: &CumulantKey) -> Result<SymExpr, EngineError> {
        if let Some(v) = self.store.fetch(key)? {
            return Ok(v.clone());
        }
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            self.depth -= 1;
            return Err(EngineError::DepthExceeded(*key));
        }
        let result = self.resolve(key);
        self.depth -= 1;
        let expr = result?;
        debug_assert!(expr.is_canonical());
        self.store.insert(*key, expr.clone())?;
        Ok(expr)
    }

    fn resolve(&mut self, key: &CumulantKey) -> Result<SymExpr, EngineError> {
        let CumulantKey { kind, k, order: l } = *key;
        if kind == StatKind::Rk && k == 0 {
            // joint cumulants involving the constant R_0 = m vanish
            return Ok(if l == 1 {
                SymExpr::from_poly(self.m_poly())
            } else {
                SymExpr::zero(self.ctx())
            });
        }
        if l == 1 {
            return match kind {
                StatKind::Tk => self.mean_t_uncached(k),
                StatKind::Rk => self.mean_r_uncached(k),
            };
        }
        match (kind, k) {
            (StatKind::Tk, 0) => {
                let inner = self.joint_cumulant(&CumulantKey::new(StatKind::Tk, 1, l - 1))?;
                Ok(inner.ddalpha()?)
            }
            (StatKind::Rk, 1) => self.d_integral(StatKind::Tk, 1, l - 1),
            (StatKind::Rk, _) => {
                let delta = self.delta_r(l, k)?;
                let up = self.joint_cumulant(&CumulantKey::new(StatKind::Rk, k + 1, l - 1))?;
                let correction = self.d_integral(StatKind::Tk, k, l - 1)?;
                Ok(delta.add(&up.ddalpha()?)?.sub(&correction)?)
            }
            (StatKind::Tk, _) => {
                let delta = self.delta_t(l, k)?;
                let up = self.joint_cumulant(&CumulantKey::new(StatKind::Tk, k + 1, l - 1))?;
                Ok(delta.add(&up.ddalpha()?)?)
            }
        }
    }

    /// Closed-form `kappa_l(T)`, scheduling the recursion exactly as the
    /// iteration `L = 2..l`, `k = l - L + 1`, and asserting the final-form
    /// invariant (polynomial coefficients, base `m+alpha` only).
    pub fn cumulant_t(&mut self, l: u32) -> Result<SymExpr, EngineError> {
        assert!(l >= 1);
        for big_l in 2..=l {
            let k = l - big_l + 1;
            self.joint_cumulant(&CumulantKey::new(StatKind::Tk, k, big_l))?;
        }
        let expr = self.joint_cumulant(&CumulantKey::new(StatKind::Tk, 1, l))?;
        if !expr.is_final_form() {
            return Err(EngineError::FinalForm {
                order: l,
                detail: "expected polynomial coefficients over base m+alpha".to_string(),
            });
        }
        Ok(expr)
    }
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::PolygammaFactor;

    fn ctx() -> VarContext {
        VarContext::MAlpha
    }

    fn m() -> Polynomial {
        Polynomial::variable(ctx(), 0)
    }

    fn al() -> Polynomial {
        Polynomial::variable(ctx(), 1)
    }

    fn m_plus_alpha() -> Polynomial {
        PolygammaBase::MPlusAlpha.poly()
    }

    fn rf(p: Polynomial) -> RationalFunction {
        RationalFunction::from_poly(p)
    }

    #[test]
    fn mean_r_initial_values() {
        let mut e = Engine::new();
        assert!(e.mean_r(0).unwrap().expr_equal(&SymExpr::from_poly(m())).unwrap());
        let r1 = SymExpr::from_poly(m().mul(&m_plus_alpha()).unwrap());
        assert!(e.mean_r(1).unwrap().expr_equal(&r1).unwrap());
        let two_m_a = m().scale(&BigRational::from_integer(2.into())).add(&al()).unwrap();
        let r2 = SymExpr::from_poly(
            m().mul(&m_plus_alpha()).unwrap().mul(&two_m_a).unwrap(),
        );
        assert!(e.mean_r(2).unwrap().expr_equal(&r2).unwrap());
    }

    #[test]
    fn mean_r_matches_three_term_recurrence() {
        let mut e = Engine::new();
        for k in 2..=6 {
            let a = e.mean_r(k).unwrap();
            let b = e.mean_r_alt(k);
            assert!(a.expr_equal(&b).unwrap(), "k={k}");
        }
    }

    #[test]
    fn mean_t_seed_and_first() {
        let mut e = Engine::new();
        // kappa(T_0) = (m+a) psi_0(m+a) - a psi_0(a) - m
        let t0 = SymExpr::psi(0, PolygammaBase::MPlusAlpha)
            .scale(&rf(m_plus_alpha()))
            .unwrap()
            .sub(&SymExpr::psi(0, PolygammaBase::Alpha).scale(&rf(al())).unwrap())
            .unwrap()
            .sub(&SymExpr::from_poly(m()))
            .unwrap();
        assert!(e.mean_t(0).unwrap().expr_equal(&t0).unwrap());
        // kappa(T) displayed as m(m+a) psi_0(m+a+1) + m(m-1)/2
        let displayed = SymExpr::term(
            rf(m().mul(&m_plus_alpha()).unwrap()),
            vec![PolygammaFactor::shifted(0, PolygammaBase::MPlusAlpha, 1)],
        )
        .unwrap()
        .add(&SymExpr::from_coeff(
            rf(m().mul(&m().sub(&Polynomial::int(ctx(), 1)).unwrap()).unwrap())
                .scale(&BigRational::new(1.into(), 2.into())),
        ))
        .unwrap()
        .canonicalize()
        .unwrap();
        assert!(e.mean_t(1).unwrap().expr_equal(&displayed).unwrap());
    }

    #[test]
    fn h_integrals_of_t0() {
        let mut e = Engine::new();
        // H_1(T_0) = kappa^+(T_0) - kappa(T_0) = psi_0(m+a) + 1/(m+a)
        let h = e.h_upper(StatKind::Tk, 0, 1).unwrap();
        let expect = SymExpr::psi(0, PolygammaBase::MPlusAlpha)
            .add(&SymExpr::from_coeff(
                RationalFunction::new(Polynomial::int(ctx(), 1), m_plus_alpha()).unwrap(),
            ))
            .unwrap();
        assert!(h.expr_equal(&expect).unwrap());
        // h_1(T_0) = kappa(T_0) - kappa^-(T_0) = psi_0(m+a)
        let hl = e.h_lower(StatKind::Tk, 0, 1).unwrap();
        assert!(hl
            .expr_equal(&SymExpr::psi(0, PolygammaBase::MPlusAlpha))
            .unwrap());
    }

    #[test]
    fn d_integral_special_cases() {
        let mut e = Engine::new();
        // D_1(T_0) = kappa(R_0) = m
        let d = e.d_integral(StatKind::Tk, 0, 1).unwrap();
        assert!(d.expr_equal(&SymExpr::from_poly(m())).unwrap());
        // D_1(R_0) = 0
        let d = e.d_integral(StatKind::Rk, 0, 1).unwrap();
        assert!(d.is_zero());
        // D_2(T_0, T) = d/dalpha kappa(T) + m
        let d = e.d_integral(StatKind::Tk, 0, 2).unwrap();
        let expect = e
            .mean_t(1)
            .unwrap()
            .ddalpha()
            .unwrap()
            .add(&SymExpr::from_poly(m()))
            .unwrap();
        assert!(d.expr_equal(&expect).unwrap());
    }

    #[test]
    fn kappa2_t_closed_form() {
        // displayed second cumulant of T:
        //   m(m+a)(2m+a) psi_1(m+a+1) + m(m+a) psi_0^2(m+a+1)
        //   + m(3m+2a-1) psi_0(m+a+1) + m(m-1)/2
        let mut e = Engine::new();
        let got = e.cumulant_t(2).unwrap();
        let two_m_a = m().scale(&BigRational::from_integer(2.into())).add(&al()).unwrap();
        let c1 = rf(m().mul(&m_plus_alpha()).unwrap().mul(&two_m_a).unwrap());
        let c2 = rf(m().mul(&m_plus_alpha()).unwrap());
        let c3 = rf(m()
            .mul(
                &m().scale(&BigRational::from_integer(3.into()))
                    .add(&al().scale(&BigRational::from_integer(2.into())))
                    .unwrap()
                    .sub(&Polynomial::int(ctx(), 1))
                    .unwrap(),
            )
            .unwrap());
        let c4 = rf(m().mul(&m().sub(&Polynomial::int(ctx(), 1)).unwrap()).unwrap())
            .scale(&BigRational::new(1.into(), 2.into()));
        let displayed = SymExpr::term(
            c1,
            vec![PolygammaFactor::shifted(1, PolygammaBase::MPlusAlpha, 1)],
        )
        .unwrap()
        .add(
            &SymExpr::term(
                c2,
                vec![PolygammaFactor {
                    order: 0,
                    base: PolygammaBase::MPlusAlpha,
                    shift: 1,
                    power: 2,
                }],
            )
            .unwrap(),
        )
        .unwrap()
        .add(
            &SymExpr::term(
                c3,
                vec![PolygammaFactor::shifted(0, PolygammaBase::MPlusAlpha, 1)],
            )
            .unwrap(),
        )
        .unwrap()
        .add(&SymExpr::from_coeff(c4))
        .unwrap()
        .canonicalize()
        .unwrap();
        assert!(got.expr_equal(&displayed).unwrap());
    }

    #[test]
    fn kappa_r1_t_is_mean_sum() {
        // kappa(R, T) = kappa(T) + kappa(R)
        let mut e = Engine::new();
        let got = e
            .joint_cumulant(&CumulantKey::new(StatKind::Rk, 1, 2))
            .unwrap();
        let expect = e
            .mean_t(1)
            .unwrap()
            .add(&SymExpr::from_coeff(e.kappa_r()))
            .unwrap();
        assert!(got.expr_equal(&expect).unwrap());
    }

    #[test]
    fn memo_independence_t22() {
        // kappa(T_2, T) = delta_2(2) + d/dalpha kappa(T_3) recomputed fresh
        let mut e1 = Engine::new();
        let via_store = e1
            .joint_cumulant(&CumulantKey::new(StatKind::Tk, 2, 2))
            .unwrap();
        let mut e2 = Engine::new();
        let delta = e2.delta_t(2, 2).unwrap();
        let scratch = delta.add(&e2.mean_t(3).unwrap().ddalpha().unwrap()).unwrap();
        assert!(via_store.expr_equal(&scratch).unwrap());
    }

    #[test]
    fn final_form_holds_low_orders() {
        let mut e = Engine::new();
        for l in 1..=3 {
            let expr = e.cumulant_t(l).unwrap();
            assert!(expr.is_final_form(), "l={l}");
        }
    }
}
