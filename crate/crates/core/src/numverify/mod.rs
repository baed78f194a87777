//! Arbitrary-precision numeric evaluation of polygamma expressions plus
//! Monte Carlo sampling with cumulant estimation and comparison reporting.

mod bigfloat;
mod estimate;
mod polygamma;
mod sample;

pub use bigfloat::{BigFloat, FloatCtx};
pub use estimate::{estimate_cumulants, CumulantEstimates, MAX_ORDER, MIN_SAMPLES};
pub use polygamma::{bernoulli, polygamma};
pub use sample::{
    jacobi_eigenvalues, sample_batch, sample_spectrum, SampleBatch, SampleStat, BLOCKS,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::exactalg::{ExactError, VarContext};
use crate::symexpr::SymExpr;

/// Default evaluation precision in decimal digits.
pub const DEFAULT_PRECISION: usize = 50;
/// Default pass threshold in jackknife standard errors.
pub const DEFAULT_THRESHOLD: f64 = 4.0;

/// Errors from numeric evaluation and sampling.
#[derive(Debug, thiserror::Error)]
pub enum NumError {
    #[error("polygamma argument must be positive")]
    Domain,
    #[error("logarithm of a non-positive value")]
    LnDomain,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("evaluation point must satisfy 1 <= m <= n")]
    BadPoint,
    #[error("eigensolver did not converge within the sweep cap")]
    NonConvergence,
    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: u64, got: u64 },
    #[error("asymptotic series failed to converge (internal)")]
    SeriesDivergence,
}

/// Evaluate a canonical expression at integer dimensions `(m, n)`:
/// exact-rational coefficient evaluation combined with big-float polygamma
/// factor values. `MAlpha`-context expressions are evaluated with
/// `alpha = n - m` supplied.
pub fn eval_expr(e: &SymExpr, m: u32, n: u32, prec: usize) -> Result<BigFloat, NumError> {
    if m < 1 || m > n {
        return Err(NumError::BadPoint);
    }
    let (x0, x1) = match e.context() {
        VarContext::MAlpha => (int_rat(m), int_rat(n) - int_rat(m)),
        VarContext::MN => (int_rat(m), int_rat(n)),
    };
    let work = FloatCtx::new(prec + 10);
    let mut acc = BigFloat::zero();
    for (factors, coeff) in e.terms() {
        let c = coeff.eval(&x0, &x1)?;
        let mut term = work.from_rational(&c);
        for f in factors {
            let base = f.base.poly().eval(&x0, &x1)
                + BigRational::from_integer(BigInt::from(f.shift));
            let psi = polygamma(f.order, &base, work.prec())?;
            term = work.mul(&term, &work.powi(&psi, f.power));
        }
        acc = work.add(&acc, &term);
    }
    Ok(FloatCtx::new(prec).round(acc))
}

/// Options for a Monte Carlo verification run.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub m: u32,
    pub n: u32,
    pub orders: Vec<u32>,
    pub samples: u64,
    pub seed: u64,
    pub threshold: f64,
    pub workers: usize,
    pub precision: usize,
}

/// Per-order comparison row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderReport {
    pub order: u32,
    /// High-precision decimal rendering of the exact value.
    pub exact: String,
    pub estimate: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

/// Monte Carlo vs exact comparison report. Wall time is tracked for
/// diagnostics but excluded from the serialized form, which must be
/// bit-identical across runs with equal `(seed, m, n, N)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub m: u32,
    pub n: u32,
    #[serde(rename = "N")]
    pub samples: u64,
    pub seed: u64,
    pub threshold: f64,
    pub orders: Vec<OrderReport>,
    #[serde(skip)]
    pub wall: std::time::Duration,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.orders.iter().all(|o| o.pass)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Compare Monte Carlo cumulant estimates of the entanglement entropy
/// against exact expressions, one per requested order.
///
/// `exact` pairs each order with its closed-form expression (context `MN`).
/// Fails are report contents, not errors.
pub fn verify(
    opts: &VerifyOptions,
    exact: &[(u32, SymExpr)],
) -> Result<VerificationReport, NumError> {
    let t0 = std::time::Instant::now();
    let max_order = opts.orders.iter().copied().max().unwrap_or(1);
    let batch = sample_batch(
        opts.m,
        opts.n,
        opts.samples,
        opts.seed,
        SampleStat::EntropyS,
        opts.workers,
    )?;
    let est = estimate_cumulants(&batch, max_order)?;
    let mut rows = Vec::with_capacity(opts.orders.len());
    for &order in &opts.orders {
        let expr = exact
            .iter()
            .find(|(o, _)| *o == order)
            .map(|(_, e)| e)
            .expect("exact expression supplied for every requested order");
        let exact_val = eval_expr(expr, opts.m, opts.n, opts.precision)?;
        let exact_f = exact_val.to_f64();
        let (estimate, stderr) = est.orders[order as usize - 1];
        let diff = estimate - exact_f;
        // pass iff |z| <= threshold; a zero standard error (constant
        // samples) gives z = 0 on exact agreement and infinity otherwise
        let z = if stderr == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / stderr
        };
        let pass = z.abs() <= opts.threshold;
        rows.push(OrderReport {
            order,
            exact: exact_val.to_decimal(opts.precision.min(50)),
            estimate,
            stderr,
            z,
            pass,
        });
    }
    Ok(VerificationReport {
        m: opts.m,
        n: opts.n,
        samples: opts.samples,
        seed: opts.seed,
        threshold: opts.threshold,
        orders: rows,
        wall: t0.elapsed(),
    })
}

fn int_rat(v: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert;
    use crate::engine::Engine;

    #[test]
    fn eval_mean_entropy_2_2_is_one_third() {
        let mut engine = Engine::new();
        let k1 = convert::cumulant_s(&mut engine, 1).unwrap();
        let v = eval_expr(&k1, 2, 2, 40).unwrap();
        assert_eq!(
            v.to_decimal(30),
            "0.333333333333333333333333333333"
        );
    }

    #[test]
    fn eval_mean_entropy_2_3_is_nine_twentieths() {
        // psi_0(7) - psi_0(4) - 1/6 = 9/20
        let mut engine = Engine::new();
        let k1 = convert::cumulant_s(&mut engine, 1).unwrap();
        let v = eval_expr(&k1, 2, 3, 40).unwrap();
        assert_eq!(v.to_decimal(20), "0.45000000000000000000");
    }

    #[test]
    fn eval_variance_2_2_reference() {
        // kappa_2(S) at m = n = 2 equals 13/36 - pi^2/30, frozen at 110 digits
        const WANT: &str = "0.032124297741465823816628077781906073267321130869751423563999465237109617030470936344385330987159370050310247319";
        let mut engine = Engine::new();
        let k2 = convert::cumulant_s(&mut engine, 2).unwrap();
        let v = eval_expr(&k2, 2, 2, 100).unwrap();
        // exact-rational comparison against the frozen decimal string
        let (int_part, frac) = WANT.split_once('.').unwrap();
        let digits: BigInt = format!("{int_part}{frac}").parse().unwrap();
        let want_rat = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
        let ctx = FloatCtx::new(110);
        let diff = ctx.sub(&v, &ctx.from_rational(&want_rat));
        assert!(
            diff.is_zero() || v.magnitude() - diff.magnitude() >= 90,
            "agreement only to {} digits",
            v.magnitude() - diff.magnitude()
        );
    }

    #[test]
    fn eval_t_context_with_alpha_supplied() {
        // kappa(T) at m=2, n=3 (alpha = 1): 6 psi_0(4) + 1
        //   = 6 (11/6 - gamma) + 1 = 12 - 6 gamma
        let mut engine = Engine::new();
        let kt = engine.cumulant_t(1).unwrap();
        let v = eval_expr(&kt, 2, 3, 60).unwrap();
        let gamma = polygamma(0, &BigRational::from_integer(1.into()), 60).unwrap();
        let ctx = FloatCtx::new(60);
        let want = ctx.add(
            &ctx.from_i64(12),
            &ctx.mul(&gamma, &ctx.from_i64(6)),
        );
        let diff = ctx.sub(&v, &want);
        assert!(diff.is_zero() || diff.to_f64().abs() < 1e-50);
    }

    #[test]
    fn eval_degenerate_m1_is_zero() {
        let mut engine = Engine::new();
        for l in 1..=2 {
            let ks = convert::cumulant_s(&mut engine, l).unwrap();
            let v = eval_expr(&ks, 1, 5, 40).unwrap();
            assert!(v.is_zero() || v.magnitude() < -30, "order {l}: {:?}", v);
        }
    }

    #[test]
    fn verify_small_run_passes() {
        let mut engine = Engine::new();
        let exprs: Vec<(u32, SymExpr)> = (1..=2)
            .map(|l| (l, convert::cumulant_s(&mut engine, l).unwrap()))
            .collect();
        let opts = VerifyOptions {
            m: 2,
            n: 2,
            orders: vec![1, 2],
            samples: 20_000,
            seed: 7,
            threshold: DEFAULT_THRESHOLD,
            workers: 2,
            precision: 40,
        };
        let report = verify(&opts, &exprs).unwrap();
        assert!(report.all_pass(), "{}", report.to_json_string());
    }

    #[test]
    fn verify_degenerate_all_zeros() {
        let mut engine = Engine::new();
        let exprs: Vec<(u32, SymExpr)> = (1..=2)
            .map(|l| (l, convert::cumulant_s(&mut engine, l).unwrap()))
            .collect();
        let opts = VerifyOptions {
            m: 1,
            n: 5,
            orders: vec![1, 2],
            samples: 1_000,
            seed: 7,
            threshold: DEFAULT_THRESHOLD,
            workers: 1,
            precision: 40,
        };
        let report = verify(&opts, &exprs).unwrap();
        assert!(report.all_pass());
        for row in &report.orders {
            assert_eq!(row.estimate, 0.0);
            assert_eq!(row.stderr, 0.0);
            assert_eq!(row.exact, "0");
        }
    }

    #[test]
    fn canonicalize_agrees_with_direct_evaluation() {
        // shifted-argument expressions evaluate identically before and after
        // canonicalization at 20 points with m + alpha >= 2
        use crate::exactalg::{Polynomial, RationalFunction, VarContext};
        use crate::symexpr::{PolygammaBase, PolygammaFactor};
        let ctx = VarContext::MAlpha;
        let coeff = RationalFunction::from_poly(
            Polynomial::variable(ctx, 0)
                .mul(&PolygammaBase::MPlusAlpha.poly())
                .unwrap(),
        );
        let raw = SymExpr::term(
            coeff,
            vec![
                PolygammaFactor { order: 1, base: PolygammaBase::MPlusAlpha, shift: 2, power: 2 },
                PolygammaFactor::shifted(0, PolygammaBase::MPlusAlpha, -1),
            ],
        )
        .unwrap()
        .add(
            &SymExpr::term(
                RationalFunction::int(ctx, -3),
                vec![PolygammaFactor::shifted(2, PolygammaBase::MPlusAlpha, 3)],
            )
            .unwrap(),
        )
        .unwrap();
        let canon = raw.canonicalize().unwrap();
        let fctx = FloatCtx::new(60);
        // simple deterministic point schedule covering 2 <= m <= n <= 12
        let mut checked = 0;
        let mut state = 12345u64;
        while checked < 20 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let m = 2 + (state >> 33) % 10;
            let n = m + (state >> 21) % (13 - m);
            let (m, n) = (m as u32, n.min(12) as u32);
            let a = eval_expr(&raw, m, n, 60).unwrap();
            let b = eval_expr(&canon, m, n, 60).unwrap();
            let diff = fctx.sub(&a, &b);
            assert!(
                diff.is_zero() || a.magnitude() - diff.magnitude() >= 50,
                "({m},{n}): {} vs {}",
                a.to_decimal(20),
                b.to_decimal(20)
            );
            checked += 1;
        }
    }

    #[test]
    fn verify_reports_are_deterministic() {
        let mut engine = Engine::new();
        let exprs: Vec<(u32, SymExpr)> =
            vec![(1, convert::cumulant_s(&mut engine, 1).unwrap())];
        let opts = VerifyOptions {
            m: 2,
            n: 3,
            orders: vec![1],
            samples: 5_000,
            seed: 123,
            threshold: DEFAULT_THRESHOLD,
            workers: 3,
            precision: 30,
        };
        let a = verify(&opts, &exprs).unwrap().to_json_string();
        let b = verify(&opts, &exprs).unwrap().to_json_string();
        assert_eq!(a, b);
    }
}
