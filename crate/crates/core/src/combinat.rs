//! Set partitions, complete/incomplete Bell polynomials, and
//! moment <-> cumulant conversions over arbitrary commutative-ring values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exactalg::RationalFunction;
use crate::symexpr::SymExpr;

/// Minimal commutative-ring interface used by the combinatorial kernels.
///
/// `zero_like`/`one_like` derive constants from an existing value so that
/// context-carrying types (symbolic expressions) can participate.
pub trait Ring: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale_i64(&self, k: i64) -> Self;
}

impl Ring for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_i64(&self, k: i64) -> Self {
        self * BigRational::from_integer(BigInt::from(k))
    }
}

impl Ring for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_i64(&self, k: i64) -> Self {
        self * k as f64
    }
}

impl Ring for SymExpr {
    fn zero_like(&self) -> Self {
        SymExpr::zero(self.context())
    }
    fn one_like(&self) -> Self {
        SymExpr::int(self.context(), 1)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other).expect("ring operands share a context")
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other).expect("ring operands share a context")
    }
    fn scale_i64(&self, k: i64) -> Self {
        self.scale_rational(&BigRational::from_integer(BigInt::from(k)))
    }
}

impl Ring for RationalFunction {
    fn zero_like(&self) -> Self {
        RationalFunction::zero(self.context())
    }
    fn one_like(&self) -> Self {
        RationalFunction::one(self.context())
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other).expect("ring operands share a context")
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other).expect("ring operands share a context")
    }
    fn scale_i64(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }
}

/// A partition of `{1, ..., l}` into disjoint non-empty blocks.
///
/// Blocks are internally sorted and listed by smallest element, which is the
/// natural order produced by restricted-growth-string enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

/// Largest supported ground-set size; `Bell(12) = 4213597` stays trivial.
pub const MAX_PARTITION_SIZE: usize = 12;

/// Iterator over all set partitions of `{1, ..., l}` in restricted-growth
/// string order.
pub struct SetPartitions {
    l: usize,
    rgs: Vec<usize>,
    done: bool,
}

/// Enumerate set partitions of `{1, ..., l}`. Panics outside `1..=12`.
pub fn set_partitions(l: usize) -> SetPartitions {
    assert!(
        (1..=MAX_PARTITION_SIZE).contains(&l),
        "set_partitions supports 1 <= l <= {MAX_PARTITION_SIZE}, got {l}"
    );
    SetPartitions { l, rgs: vec![0; l], done: false }
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let current = rgs_to_partition(&self.rgs);
        // advance the restricted growth string: a[i] <= max(a[..i]) + 1
        let mut i = self.l;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            let max_prefix = self.rgs[..i].iter().copied().max().unwrap_or(0);
            if self.rgs[i] <= max_prefix {
                self.rgs[i] += 1;
                for v in self.rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
        Some(current)
    }
}

fn rgs_to_partition(rgs: &[usize]) -> SetPartition {
    let nblocks = rgs.iter().copied().max().unwrap_or(0) + 1;
    let mut blocks = vec![Vec::new(); nblocks];
    for (i, &b) in rgs.iter().enumerate() {
        blocks[b].push(i + 1);
    }
    SetPartition { blocks }
}

/// Complete exponential Bell polynomial `B_k(z_1, ..., z_k)` via the
/// partition-sum definition: each block of size `s` contributes `z_s`.
pub fn bell_complete<R: Ring>(z: &[R]) -> R {
    assert!(!z.is_empty(), "bell input must be non-empty");
    let k = z.len();
    let mut total = z[0].zero_like();
    for part in set_partitions(k) {
        let mut prod = z[0].one_like();
        for block in &part.blocks {
            prod = prod.mul_ref(&z[block.len() - 1]);
        }
        total = total.add_ref(&prod);
    }
    total
}

/// Incomplete Bell polynomial `B_{k,j}`: partitions of `{1..k}` into exactly
/// `j` blocks. Panics unless `1 <= j <= k <= len(z) + j - 1` inputs suffice.
pub fn bell_incomplete<R: Ring>(k: usize, j: usize, z: &[R]) -> R {
    assert!(j >= 1 && j <= k, "bell_incomplete requires 1 <= j <= k");
    assert!(
        z.len() >= k - j + 1,
        "bell_incomplete needs z_1..z_(k-j+1): have {}, need {}",
        z.len(),
        k - j + 1
    );
    let mut total = z[0].zero_like();
    for part in set_partitions(k) {
        if part.num_blocks() != j {
            continue;
        }
        let mut prod = z[0].one_like();
        for block in &part.blocks {
            prod = prod.mul_ref(&z[block.len() - 1]);
        }
        total = total.add_ref(&prod);
    }
    total
}

/// Moments from cumulants: `mu_l = sum over partitions of prod kappa_|block|`.
pub fn moments_from_cumulants<R: Ring>(kappa: &[R]) -> Vec<R> {
    assert!(!kappa.is_empty());
    let mut mus = Vec::with_capacity(kappa.len());
    for l in 1..=kappa.len() {
        let mut total = kappa[0].zero_like();
        for part in set_partitions(l) {
            let mut prod = kappa[0].one_like();
            for block in &part.blocks {
                prod = prod.mul_ref(&kappa[block.len() - 1]);
            }
            total = total.add_ref(&prod);
        }
        mus.push(total);
    }
    mus
}

/// Cumulants from moments:
/// `kappa_l = sum over partitions (-1)^(s-1) (s-1)! prod mu_|block|`.
pub fn cumulants_from_moments<R: Ring>(mu: &[R]) -> Vec<R> {
    assert!(!mu.is_empty());
    let mut kappas = Vec::with_capacity(mu.len());
    for l in 1..=mu.len() {
        let mut total = mu[0].zero_like();
        for part in set_partitions(l) {
            let s = part.num_blocks();
            let mut prod = mu[0].one_like();
            for block in &part.blocks {
                prod = prod.mul_ref(&mu[block.len() - 1]);
            }
            let mut sign_fac: i64 = 1;
            for i in 1..s as i64 {
                sign_fac *= i;
            }
            if (s - 1) % 2 == 1 {
                sign_fac = -sign_fac;
            }
            total = total.add_ref(&prod.scale_i64(sign_fac));
        }
        kappas.push(total);
    }
    kappas
}
