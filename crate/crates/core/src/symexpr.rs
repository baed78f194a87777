//! Symbolic expressions in polygamma functions over exact rational-function
//! coefficients, with the three operators the cumulant pipeline needs:
//! `d/dalpha`, dimension shifts `m -> m +- 1`, and canonicalization through
//! the polygamma shift recurrence
//! `psi_k(z+n) - psi_k(z) = (-1)^k k! sum_{i=0}^{n-1} 1/(z+i)^{k+1}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::{ExactError, Monomial, Polynomial, RationalFunction, VarContext};

/// Canonical polygamma argument bases.
///
/// The recursion provably generates only integer shifts of these five bases;
/// any other argument shape is an internal invariant violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PolygammaBase {
    /// `m + alpha` (context `MAlpha`)
    MPlusAlpha,
    /// `alpha` (context `MAlpha`)
    Alpha,
    /// `m n` (context `MN`)
    MN,
    /// `n` (context `MN`)
    N,
    /// `n - m` (context `MN`)
    NMinusM,
}

impl PolygammaBase {
    pub fn context(self) -> VarContext {
        match self {
            PolygammaBase::MPlusAlpha | PolygammaBase::Alpha => VarContext::MAlpha,
            PolygammaBase::MN | PolygammaBase::N | PolygammaBase::NMinusM => VarContext::MN,
        }
    }

    /// The base as a polynomial in its own context.
    pub fn poly(self) -> Polynomial {
        let ctx = self.context();
        let v0 = Polynomial::variable(ctx, 0);
        let v1 = Polynomial::variable(ctx, 1);
        match self {
            PolygammaBase::MPlusAlpha => v0.add(&v1).expect("same context"),
            PolygammaBase::Alpha => v1,
            PolygammaBase::MN => v0.mul(&v1).expect("same context"),
            PolygammaBase::N => v1,
            PolygammaBase::NMinusM => v1.sub(&v0).expect("same context"),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PolygammaBase::MPlusAlpha => "m+alpha",
            PolygammaBase::Alpha => "alpha",
            PolygammaBase::MN => "mn",
            PolygammaBase::N => "n",
            PolygammaBase::NMinusM => "n-m",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Some(match s {
            "m+alpha" => PolygammaBase::MPlusAlpha,
            "alpha" => PolygammaBase::Alpha,
            "mn" => PolygammaBase::MN,
            "n" => PolygammaBase::N,
            "n-m" => PolygammaBase::NMinusM,
            _ => return None,
        })
    }

    fn latex(self) -> &'static str {
        match self {
            PolygammaBase::MPlusAlpha => "m+\\alpha",
            PolygammaBase::Alpha => "\\alpha",
            PolygammaBase::MN => "mn",
            PolygammaBase::N => "n",
            PolygammaBase::NMinusM => "n-m",
        }
    }
}

/// A factor `psi_order(base + shift)^power`. Canonical form has `shift == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolygammaFactor {
    pub order: u32,
    pub base: PolygammaBase,
    pub shift: i32,
    pub power: u32,
}

impl PolygammaFactor {
    pub fn new(order: u32, base: PolygammaBase) -> Self {
        PolygammaFactor { order, base, shift: 0, power: 1 }
    }

    pub fn shifted(order: u32, base: PolygammaBase, shift: i32) -> Self {
        PolygammaFactor { order, base, shift, power: 1 }
    }
}

/// Sorted factor list keying a term; powers merged, no zero powers.
pub type FactorList = Vec<PolygammaFactor>;

fn merge_factor_lists(a: &FactorList, b: &FactorList) -> FactorList {
    let mut out: FactorList = Vec::with_capacity(a.len() + b.len());
    for f in a.iter().chain(b.iter()) {
        match out
            .iter_mut()
            .find(|g| g.order == f.order && g.base == f.base && g.shift == f.shift)
        {
            Some(g) => g.power += f.power,
            None => out.push(*f),
        }
    }
    out.sort();
    out
}

/// Errors from symbolic-expression operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("polygamma base {0:?} does not belong to context {1:?}")]
    BaseContext(PolygammaBase, VarContext),
    #[error("operation requires context {expected:?}, got {got:?}")]
    WrongContext { expected: VarContext, got: VarContext },
    #[error("expression is not canonical (shifted polygamma arguments present)")]
    NotCanonical,
    #[error("malformed expression JSON: {0}")]
    Json(String),
}

/// Finite sum of terms `coefficient * product of polygamma factors`.
/// The empty factor list denotes a pure rational term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymExpr {
    ctx: VarContext,
    terms: BTreeMap<FactorList, RationalFunction>,
}

impl SymExpr {
    pub fn zero(ctx: VarContext) -> Self {
        SymExpr { ctx, terms: BTreeMap::new() }
    }

    pub fn from_coeff(c: RationalFunction) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c.clone());
        }
        SymExpr { ctx: c.context(), terms }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self::from_coeff(RationalFunction::from_poly(p))
    }

    pub fn int(ctx: VarContext, c: i64) -> Self {
        Self::from_coeff(RationalFunction::int(ctx, c))
    }

    /// The single factor `psi_order(base)` with coefficient 1.
    pub fn psi(order: u32, base: PolygammaBase) -> Self {
        let ctx = base.context();
        let mut terms = BTreeMap::new();
        terms.insert(
            vec![PolygammaFactor::new(order, base)],
            RationalFunction::one(ctx),
        );
        SymExpr { ctx, terms }
    }

    /// A single term `coeff * prod factors` (factors may carry shifts).
    pub fn term(coeff: RationalFunction, factors: FactorList) -> Result<Self, SymError> {
        let ctx = coeff.context();
        for f in &factors {
            if f.base.context() != ctx {
                return Err(SymError::BaseContext(f.base, ctx));
            }
        }
        let mut out = SymExpr::zero(ctx);
        out.add_term(merge_factor_lists(&factors, &Vec::new()), coeff);
        Ok(out)
    }

    pub fn context(&self) -> VarContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FactorList, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn is_canonical(&self) -> bool {
        self.terms
            .keys()
            .all(|fs| fs.iter().all(|f| f.shift == 0))
    }

    /// Largest polygamma order appearing, `None` for pure rational expressions.
    pub fn max_order(&self) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|fs| fs.iter().map(|f| f.order))
            .max()
    }

    /// Keep only terms matching the predicate on the factor list.
    pub fn filter_terms(&self, mut pred: impl FnMut(&FactorList) -> bool) -> SymExpr {
        SymExpr {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter(|(fs, _)| pred(fs))
                .map(|(fs, c)| (fs.clone(), c.clone()))
                .collect(),
        }
    }

    fn add_term(&mut self, factors: FactorList, coeff: RationalFunction) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(factors) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coeff).expect("same context");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_ctx(&self, other: VarContext) -> Result<(), SymError> {
        if self.ctx != other {
            return Err(SymError::WrongContext { expected: self.ctx, got: other });
        }
        Ok(())
    }

    pub fn add(&self, other: &SymExpr) -> Result<SymExpr, SymError> {
        self.check_ctx(other.ctx)?;
        let mut out = self.clone();
        for (fs, c) in &other.terms {
            out.add_term(fs.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SymExpr) -> Result<SymExpr, SymError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymExpr {
        SymExpr {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(fs, c)| (fs.clone(), c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &SymExpr) -> Result<SymExpr, SymError> {
        self.check_ctx(other.ctx)?;
        let mut out = SymExpr::zero(self.ctx);
        for (fa, ca) in &self.terms {
            for (fb, cb) in &other.terms {
                out.add_term(merge_factor_lists(fa, fb), ca.mul(cb)?);
            }
        }
        Ok(out)
    }

    /// Multiply by a rational-function coefficient.
    pub fn scale(&self, c: &RationalFunction) -> Result<SymExpr, SymError> {
        self.check_ctx(c.context())?;
        let mut out = SymExpr::zero(self.ctx);
        for (fs, x) in &self.terms {
            out.add_term(fs.clone(), x.mul(c)?);
        }
        Ok(out)
    }

    pub fn scale_rational(&self, c: &BigRational) -> SymExpr {
        SymExpr {
            ctx: self.ctx,
            terms: if c.is_zero() {
                BTreeMap::new()
            } else {
                self.terms.iter().map(|(fs, x)| (fs.clone(), x.scale(c))).collect()
            },
        }
    }

    pub fn pow(&self, e: u32) -> Result<SymExpr, SymError> {
        let mut out = SymExpr::int(self.ctx, 1);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Eliminate all argument shifts via the polygamma recurrence, producing
    /// canonical bases plus rational-function correction terms.
    pub fn canonicalize(&self) -> Result<SymExpr, SymError> {
        let mut out = SymExpr::zero(self.ctx);
        for (factors, coeff) in &self.terms {
            let mut acc = SymExpr::from_coeff(coeff.clone());
            for f in factors {
                if f.base.context() != self.ctx {
                    return Err(SymError::BaseContext(f.base, self.ctx));
                }
                if f.shift == 0 {
                    let mut single = SymExpr::zero(self.ctx);
                    single.add_term(
                        vec![PolygammaFactor { shift: 0, ..*f }],
                        RationalFunction::one(self.ctx),
                    );
                    acc = acc.mul(&single)?;
                } else {
                    let expanded = Self::shifted_psi(f.order, f.base, f.shift)?;
                    acc = acc.mul(&expanded.pow(f.power)?)?;
                }
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// `psi_k(base + shift)` rewritten over the unshifted base.
    fn shifted_psi(order: u32, base: PolygammaBase, shift: i32) -> Result<SymExpr, SymError> {
        let ctx = base.context();
        let bp = base.poly();
        let mut kfac = BigRational::one();
        for i in 2..=order {
            kfac *= BigRational::from_integer(BigInt::from(i));
        }
        let sign = if order % 2 == 0 { kfac.clone() } else { -kfac.clone() };
        let mut corr = RationalFunction::zero(ctx);
        if shift > 0 {
            // psi_k(z + j) = psi_k(z) + (-1)^k k! sum_{i=0}^{j-1} (z+i)^-(k+1)
            for i in 0..shift {
                let den = bp.add(&Polynomial::int(ctx, i as i64)).expect("same context");
                let term = RationalFunction::with_den_power(
                    Polynomial::constant(ctx, sign.clone()),
                    den,
                    order + 1,
                )?;
                corr = corr.add(&term)?;
            }
        } else {
            // psi_k(z - j) = psi_k(z) - (-1)^k k! sum_{i=1}^{j} (z-i)^-(k+1)
            for i in 1..=(-shift) {
                let den = bp.sub(&Polynomial::int(ctx, i as i64)).expect("same context");
                let term = RationalFunction::with_den_power(
                    Polynomial::constant(ctx, -sign.clone()),
                    den,
                    order + 1,
                )?;
                corr = corr.add(&term)?;
            }
        }
        SymExpr::psi(order, base).add(&SymExpr::from_coeff(corr))
    }

    /// Dimension shift `m -> m + dir` (`dir` is +1 or -1), then canonicalize.
    /// Only defined before the `alpha := n - m` substitution.
    pub fn shift_m(&self, dir: i64) -> Result<SymExpr, SymError> {
        self.check_ctx(VarContext::MAlpha)
            .map_err(|_| SymError::WrongContext { expected: VarContext::MAlpha, got: self.ctx })?;
        assert!(dir == 1 || dir == -1, "shift direction must be +-1");
        let mut raw = SymExpr::zero(self.ctx);
        for (factors, coeff) in &self.terms {
            let shifted: FactorList = factors
                .iter()
                .map(|f| match f.base {
                    PolygammaBase::MPlusAlpha => PolygammaFactor {
                        shift: f.shift + dir as i32,
                        ..*f
                    },
                    _ => *f,
                })
                .collect();
            raw.add_term(merge_factor_lists(&shifted, &Vec::new()), coeff.shift_var0(dir));
        }
        raw.canonicalize()
    }

    /// Product-rule derivative `d/dalpha`; requires a canonical `MAlpha`
    /// expression. Both bases `m+alpha` and `alpha` have unit derivative.
    pub fn ddalpha(&self) -> Result<SymExpr, SymError> {
        self.check_ctx(VarContext::MAlpha)
            .map_err(|_| SymError::WrongContext { expected: VarContext::MAlpha, got: self.ctx })?;
        if !self.is_canonical() {
            return Err(SymError::NotCanonical);
        }
        let mut out = SymExpr::zero(self.ctx);
        for (factors, coeff) in &self.terms {
            // coefficient derivative
            out.add_term(factors.clone(), coeff.derivative_var1());
            // factor derivatives: psi_k(b)^p -> p psi_k(b)^(p-1) psi_{k+1}(b)
            for (i, f) in factors.iter().enumerate() {
                let mut fs: FactorList = Vec::with_capacity(factors.len() + 1);
                for (j, g) in factors.iter().enumerate() {
                    if i == j {
                        if g.power > 1 {
                            fs.push(PolygammaFactor { power: g.power - 1, ..*g });
                        }
                    } else {
                        fs.push(*g);
                    }
                }
                fs = merge_factor_lists(
                    &fs,
                    &vec![PolygammaFactor::new(f.order + 1, f.base)],
                );
                out.add_term(
                    fs,
                    coeff.scale(&BigRational::from_integer(BigInt::from(f.power))),
                );
            }
        }
        Ok(out)
    }

    /// Substitute `alpha := n - m`: coefficients move to the `MN` context,
    /// base `m+alpha` becomes `n`, base `alpha` becomes `n-m`.
    pub fn substitute_alpha(&self) -> Result<SymExpr, SymError> {
        self.check_ctx(VarContext::MAlpha)
            .map_err(|_| SymError::WrongContext { expected: VarContext::MAlpha, got: self.ctx })?;
        if !self.is_canonical() {
            return Err(SymError::NotCanonical);
        }
        let mut out = SymExpr::zero(VarContext::MN);
        for (factors, coeff) in &self.terms {
            let fs: FactorList = factors
                .iter()
                .map(|f| PolygammaFactor {
                    base: match f.base {
                        PolygammaBase::MPlusAlpha => PolygammaBase::N,
                        PolygammaBase::Alpha => PolygammaBase::NMinusM,
                        other => other,
                    },
                    ..*f
                })
                .collect();
            out.add_term(merge_factor_lists(&fs, &Vec::new()), coeff.substitute_alpha()?);
        }
        Ok(out)
    }

    /// Substitute `m := 1` in an `MN`-context expression. `psi_k(mn)` becomes
    /// `psi_k(n)` and `psi_k(n-m)` becomes `psi_k(n-1)`, then canonicalize.
    pub fn substitute_m_one(&self) -> Result<SymExpr, SymError> {
        self.check_ctx(VarContext::MN)
            .map_err(|_| SymError::WrongContext { expected: VarContext::MN, got: self.ctx })?;
        let mut raw = SymExpr::zero(VarContext::MN);
        for (factors, coeff) in &self.terms {
            let fs: FactorList = factors
                .iter()
                .map(|f| match f.base {
                    PolygammaBase::MN => PolygammaFactor { base: PolygammaBase::N, ..*f },
                    PolygammaBase::NMinusM => PolygammaFactor {
                        base: PolygammaBase::N,
                        shift: f.shift - 1,
                        ..*f
                    },
                    _ => *f,
                })
                .collect();
            raw.add_term(merge_factor_lists(&fs, &Vec::new()), coeff.substitute_var0_one()?);
        }
        raw.canonicalize()
    }

    /// Exact equality: the difference has an empty term list. Coefficient
    /// cancellation is exact cross-multiplication inside rational-function
    /// addition, so no normal-form coprimality is assumed.
    pub fn expr_equal(&self, other: &SymExpr) -> Result<bool, SymError> {
        Ok(self.sub(other)?.is_zero())
    }

    /// True when every coefficient is a polynomial and every base is
    /// `m+alpha`: the shape of finally reported cumulants of the induced
    /// entropy.
    pub fn is_final_form(&self) -> bool {
        self.terms.iter().all(|(fs, c)| {
            c.is_polynomial() && fs.iter().all(|f| f.base == PolygammaBase::MPlusAlpha)
        })
    }

    /// Deterministic term ordering for emission: highest polygamma order
    /// first, pure rational term last, ties by factor list.
    fn emission_order(&self) -> Vec<(&FactorList, &RationalFunction)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(fa, _), (fb, _)| {
            let oa = fa.iter().map(|f| f.order).max();
            let ob = fb.iter().map(|f| f.order).max();
            ob.cmp(&oa).then_with(|| fa.cmp(fb))
        });
        v
    }

    pub fn emit(&self, format: EmitFormat) -> String {
        match format {
            EmitFormat::Latex => self.emit_latex(),
            EmitFormat::Text => self.emit_text(),
            EmitFormat::Json => self.to_json_string(None),
        }
    }

    fn emit_latex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (factors, coeff)) in self.emission_order().into_iter().enumerate() {
            let part = render_term(coeff, factors, true);
            push_signed(&mut out, &part, i == 0);
        }
        out
    }

    fn emit_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (factors, coeff)) in self.emission_order().into_iter().enumerate() {
            let part = render_term(coeff, factors, false);
            push_signed(&mut out, &part, i == 0);
        }
        out
    }

    // ---- JSON expression schema (stable, versioned) ----

    pub fn to_json_string(&self, label: Option<&str>) -> String {
        serde_json::to_string(&self.to_json(label)).expect("serializable")
    }

    pub fn to_json(&self, label: Option<&str>) -> ExprJson {
        ExprJson {
            schema: 1,
            label: label.map(|s| s.to_string()),
            context: self.ctx.variables().iter().map(|s| s.to_string()).collect(),
            terms: self
                .emission_order()
                .into_iter()
                .map(|(fs, c)| TermJson {
                    coeff: coeff_json(c),
                    psis: fs
                        .iter()
                        .map(|f| PsiJson {
                            k: f.order,
                            base: f.base.label().to_string(),
                            shift: f.shift,
                            pow: f.power,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<SymExpr, SymError> {
        let j: ExprJson = serde_json::from_str(s).map_err(|e| SymError::Json(e.to_string()))?;
        Self::from_json(&j)
    }

    pub fn from_json(j: &ExprJson) -> Result<SymExpr, SymError> {
        let ctx = match j.context.iter().map(String::as_str).collect::<Vec<_>>()[..] {
            ["m", "alpha"] => VarContext::MAlpha,
            ["m", "n"] => VarContext::MN,
            _ => return Err(SymError::Json(format!("unknown context {:?}", j.context))),
        };
        if j.schema != 1 {
            return Err(SymError::Json(format!("unsupported schema {}", j.schema)));
        }
        let mut out = SymExpr::zero(ctx);
        for t in &j.terms {
            let num = poly_from_json(ctx, &t.coeff.num)?;
            let den = if t.coeff.den.is_empty() {
                Polynomial::int(ctx, 1)
            } else {
                poly_from_json(ctx, &t.coeff.den)?
            };
            let coeff = RationalFunction::new(num, den).map_err(SymError::Exact)?;
            let mut fs: FactorList = Vec::new();
            for p in &t.psis {
                let base = PolygammaBase::from_label(&p.base)
                    .ok_or_else(|| SymError::Json(format!("unknown base {:?}", p.base)))?;
                if base.context() != ctx {
                    return Err(SymError::BaseContext(base, ctx));
                }
                fs.push(PolygammaFactor { order: p.k, base, shift: p.shift, power: p.pow });
            }
            out.add_term(merge_factor_lists(&fs, &Vec::new()), coeff);
        }
        Ok(out)
    }
}

/// Output formats for `emit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Latex,
    Json,
    Text,
}

fn push_signed(out: &mut String, part: &str, first: bool) {
    if first {
        out.push_str(part);
    } else if let Some(rest) = part.strip_prefix('-') {
        out.push_str(" - ");
        out.push_str(rest);
    } else {
        out.push_str(" + ");
        out.push_str(part);
    }
}

fn render_term(coeff: &RationalFunction, factors: &FactorList, latex: bool) -> String {
    let mut psis = String::new();
    for f in factors {
        if latex {
            let arg = if f.shift == 0 {
                f.base.latex().to_string()
            } else if f.shift > 0 {
                format!("{}+{}", f.base.latex(), f.shift)
            } else {
                format!("{}{}", f.base.latex(), f.shift)
            };
            if f.power == 1 {
                write!(psis, "\\psi_{{{}}}({})", f.order, arg).unwrap();
            } else {
                write!(psis, "\\psi_{{{}}}^{{{}}}({})", f.order, f.power, arg).unwrap();
            }
        } else {
            let arg = if f.shift == 0 {
                f.base.label().to_string()
            } else if f.shift > 0 {
                format!("{}+{}", f.base.label(), f.shift)
            } else {
                format!("{}{}", f.base.label(), f.shift)
            };
            if !psis.is_empty() {
                psis.push('*');
            }
            if f.power == 1 {
                write!(psis, "psi_{}({})", f.order, arg).unwrap();
            } else {
                write!(psis, "psi_{}({})^{}", f.order, arg, f.power).unwrap();
            }
        }
    }
    let coeff_str = render_coeff(coeff, latex);
    if psis.is_empty() {
        return coeff_str;
    }
    // fold coefficients 1 and -1 into the factor product
    if coeff_str == "1" {
        psis
    } else if coeff_str == "-1" {
        format!("-{psis}")
    } else if latex {
        format!("{coeff_str}{psis}")
    } else {
        format!("{coeff_str}*{psis}")
    }
}

fn render_coeff(c: &RationalFunction, latex: bool) -> String {
    let num = c.numerator();
    if !latex {
        return if c.is_polynomial() {
            if num.num_terms() > 1 {
                format!("({num})")
            } else {
                num.to_string()
            }
        } else {
            format!("({})/({})", num, c.denominator_expanded())
        };
    }
    // latex: integerize as sign * (p * primitive(num)) / (q * den)
    let content = num.content();
    let prim = num.primitive_part();
    let neg = content.is_negative();
    let p = BigRational::from_integer(content.numer().abs());
    let q = content.denom();
    let num_disp = prim.scale(&p);
    let den_disp = c
        .denominator_expanded()
        .scale(&BigRational::from_integer(q.clone()));
    let body = if den_disp.is_one() {
        let rendered = poly_latex(&num_disp);
        if num_disp.num_terms() > 1 {
            format!("\\left({rendered}\\right)")
        } else {
            rendered
        }
    } else {
        format!("\\frac{{{}}}{{{}}}", poly_latex(&num_disp), poly_latex(&den_disp))
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn poly_latex(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let vars = p.context().variables();
    let latex_var = |name: &str| match name {
        "alpha" => "\\alpha".to_string(),
        other => other.to_string(),
    };
    let mut out = String::new();
    let terms: Vec<_> = p.terms().collect();
    for (i, (mono, c)) in terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mut body = String::new();
        if !mag.is_one() || mono.total_degree() == 0 {
            body.push_str(&mag.to_string());
        }
        for (idx, name) in vars.iter().enumerate() {
            match mono.0[idx] {
                0 => {}
                1 => body.push_str(&latex_var(name)),
                e => write!(body, "{}^{{{}}}", latex_var(name), e).unwrap(),
            }
        }
        out.push_str(&body);
    }
    out
}

// ---- serde schema types ----

/// Versioned JSON form of a `SymExpr`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExprJson {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub context: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: CoeffJson,
    pub psis: Vec<PsiJson>,
}

/// Rational-function coefficient as monomial lists; rationals are `p/q`
/// strings, exponent vectors follow context variable order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffJson {
    pub num: Vec<(String, [u32; 2])>,
    pub den: Vec<(String, [u32; 2])>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsiJson {
    pub k: u32,
    pub base: String,
    #[serde(default, skip_serializing_if = "shift_is_zero")]
    pub shift: i32,
    pub pow: u32,
}

fn shift_is_zero(s: &i32) -> bool {
    *s == 0
}

fn coeff_json(c: &RationalFunction) -> CoeffJson {
    let den = c.denominator_expanded();
    CoeffJson {
        num: poly_to_json(c.numerator()),
        den: if den.is_one() { Vec::new() } else { poly_to_json(&den) },
    }
}

fn poly_to_json(p: &Polynomial) -> Vec<(String, [u32; 2])> {
    // graded-lex descending (leading term first)
    p.terms()
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .map(|(m, c)| (c.to_string(), m.0))
        .collect()
}

fn poly_from_json(ctx: VarContext, terms: &[(String, [u32; 2])]) -> Result<Polynomial, SymError> {
    let mut parsed = Vec::with_capacity(terms.len());
    for (s, exp) in terms {
        let c: BigRational = s
            .parse()
            .map_err(|e| SymError::Json(format!("bad rational {s:?}: {e}")))?;
        parsed.push((Monomial(*exp), c));
    }
    Ok(Polynomial::from_terms(ctx, parsed))
}
