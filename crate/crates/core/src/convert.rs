//! Moment conversion from the induced entropy `T` to the entanglement
//! entropy `S`, assembly of `kappa_l(S)`, and the highest-order polygamma
//! term extractor.
//!
//! The conversion recursion is
//! `E[S^l] = (-1)^l E[T^l] / (mn)_l + sum_{j=0}^{l-1} A_j E[S^j]` with
//! `A_j = (-1)^(j+l+1) C(l,j) B_{l-j}(psi_0(mn+l), ..., psi_{l-j-1}(mn+l))`,
//! followed by the cumulant-from-moment map.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::combinat::{bell_complete, cumulants_from_moments, moments_from_cumulants};
use crate::engine::{Engine, EngineError};
use crate::exactalg::{Polynomial, RationalFunction, VarContext};
use crate::symexpr::{PolygammaBase, PolygammaFactor, SymError, SymExpr};

/// Errors from the conversion stage.
#[derive(Debug, thiserror::Error)]
pub enum ConvertError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("kappa_{order}(S) retains a psi(n-m) base; conversion is inconsistent")]
    ResidualBase { order: u32 },
}

/// Index-aligned intermediate results of a conversion up to `max_order`.
/// Entry `i` of each vector is order `i + 1`; everything is in the `MN`
/// context and canonical.
#[derive(Debug, Clone)]
pub struct ConversionState {
    pub max_order: u32,
    /// `kappa_j(T)` after the substitution `alpha := n - m`.
    pub cumulants_t: Vec<SymExpr>,
    /// `E[T^j]` assembled from the cumulants.
    pub moments_t: Vec<SymExpr>,
    /// `E[S^j]` from the conversion recursion.
    pub moments_s: Vec<SymExpr>,
    /// `kappa_j(S)`.
    pub cumulants_s: Vec<SymExpr>,
}

/// Rising factorial `(mn)_l = mn (mn+1) ... (mn+l-1)` as a polynomial.
pub fn pochhammer_mn(l: u32) -> Polynomial {
    let ctx = VarContext::MN;
    let mn = PolygammaBase::MN.poly();
    let mut p = Polynomial::int(ctx, 1);
    for i in 0..l {
        p = p.mul(&mn.add(&Polynomial::int(ctx, i as i64)).expect("ctx")).expect("ctx");
    }
    p
}

/// `1 / (mn)_l` with the rising-factorial terms kept as separate
/// denominator factors (better cancellation than the expanded product).
fn pochhammer_mn_inverse(l: u32) -> RationalFunction {
    let ctx = VarContext::MN;
    let mn = PolygammaBase::MN.poly();
    let mut p = RationalFunction::one(ctx);
    for i in 0..l {
        let factor = RationalFunction::from_poly(
            mn.add(&Polynomial::int(ctx, i as i64)).expect("ctx"),
        );
        p = p.div(&factor).expect("nonzero factor");
    }
    p
}

/// Conversion coefficient
/// `A_j = (-1)^(j+l+1) C(l,j) B_{l-j}(psi_0(mn+l), ..., psi_{l-j-1}(mn+l))`,
/// canonicalized to the base `mn`.
pub fn conversion_coefficient(j: u32, l: u32) -> Result<SymExpr, ConvertError> {
    assert!(j < l, "conversion coefficient requires 0 <= j <= l-1");
    let args: Vec<SymExpr> = (0..(l - j))
        .map(|i| {
            SymExpr::term(
                RationalFunction::one(VarContext::MN),
                vec![PolygammaFactor::shifted(i, PolygammaBase::MN, l as i32)],
            )
        })
        .collect::<Result<_, _>>()?;
    let bell = bell_complete(&args);
    let mut binom = BigInt::from(1);
    for t in 0..j.min(l - j) {
        binom = binom * BigInt::from(l - t) / BigInt::from(t + 1);
    }
    let sign = if (j + l + 1) % 2 == 0 { binom } else { -binom };
    let scaled = bell.scale_rational(&BigRational::from_integer(sign));
    Ok(scaled.canonicalize()?)
}

/// Run the full conversion up to order `l`.
pub fn convert(engine: &mut Engine, l: u32) -> Result<ConversionState, ConvertError> {
    assert!(l >= 1);
    let ctx = VarContext::MN;
    let mut cumulants_t = Vec::with_capacity(l as usize);
    for order in 1..=l {
        cumulants_t.push(engine.cumulant_t(order)?.substitute_alpha()?);
    }
    let moments_t = moments_from_cumulants(&cumulants_t);
    let one = SymExpr::int(ctx, 1);
    let mut moments_s: Vec<SymExpr> = Vec::with_capacity(l as usize + 1);
    moments_s.push(one.clone()); // E[S^0]
    for target in 1..=l {
        let poch = pochhammer_mn_inverse(target);
        let sign = if target % 2 == 0 { 1 } else { -1 };
        let mut v = moments_t[target as usize - 1]
            .scale(&poch)?
            .scale_rational(&BigRational::from_integer(sign.into()));
        for j in 0..target {
            let a = conversion_coefficient(j, target)?;
            v = v.add(&a.mul(&moments_s[j as usize])?)?;
        }
        moments_s.push(v);
    }
    let cumulants_s = cumulants_from_moments(&moments_s[1..]);
    for (i, ks) in cumulants_s.iter().enumerate() {
        let residual = ks.filter_terms(|fs| {
            fs.iter().any(|f| f.base == PolygammaBase::NMinusM)
        });
        if !residual.is_zero() {
            return Err(ConvertError::ResidualBase { order: i as u32 + 1 });
        }
    }
    Ok(ConversionState { max_order: l, cumulants_t, moments_t, moments_s, cumulants_s })
}

/// `kappa_l(S)` alone.
pub fn cumulant_s(engine: &mut Engine, l: u32) -> Result<SymExpr, ConvertError> {
    Ok(convert(engine, l)?.cumulants_s[l as usize - 1].clone())
}

/// The `psi_{l-1}` terms of `kappa_l(S)` in closed form:
/// `(-1)^(l-1) (psi_{l-1}(mn) - kappa(R_l)/(mn)_l psi_{l-1}(n))`.
pub fn leading_term(engine: &mut Engine, l: u32) -> Result<SymExpr, ConvertError> {
    assert!(l >= 2);
    let r_l = engine.mean_r(l)?.substitute_alpha()?;
    let coeff = pure_coefficient(&r_l);
    let ratio = coeff.mul(&pochhammer_mn_inverse(l)).expect("same context");
    let sign = if l % 2 == 1 { 1 } else { -1 };
    let e = SymExpr::psi(l - 1, PolygammaBase::MN)
        .sub(&SymExpr::psi(l - 1, PolygammaBase::N).scale(&ratio)?)?
        .scale_rational(&BigRational::from_integer(sign.into()));
    Ok(e)
}

/// The terms of `e` carrying a polygamma factor of order exactly `order`.
pub fn order_terms(e: &SymExpr, order: u32) -> SymExpr {
    e.filter_terms(|fs| fs.iter().any(|f| f.order == order))
}

fn pure_coefficient(e: &SymExpr) -> RationalFunction {
    debug_assert!(e.max_order().is_none(), "expected a pure rational expression");
    e.terms()
        .next()
        .map(|(_, c)| c.clone())
        .unwrap_or_else(|| RationalFunction::zero(e.context()))
}
