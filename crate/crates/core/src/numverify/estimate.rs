//! Plug-in cumulant estimation with block-jackknife standard errors.
//!
//! Estimates come from central sample moments through the standard
//! moment-to-cumulant map; standard errors are leave-one-block-out
//! jackknife over the batch's fixed blocks. Plug-in estimators carry
//! `O(1/N)` bias, which the verification gate absorbs into its sigma
//! threshold at the supported orders.

use crate::combinat::cumulants_from_moments;

use super::sample::SampleBatch;
use super::NumError;

/// Minimum sample count accepted by the estimator.
pub const MIN_SAMPLES: u64 = 1_000;
/// Highest supported cumulant order.
pub const MAX_ORDER: u32 = 6;

/// Per-order `(estimate, standard_error)` pairs for orders `1..=max_order`.
#[derive(Debug, Clone)]
pub struct CumulantEstimates {
    pub orders: Vec<(f64, f64)>,
}

/// Power sums `sum x^r` for `r = 0..=max_order`.
fn power_sums(values: &[f64], max_order: u32) -> Vec<f64> {
    let mut sums = vec![0.0; max_order as usize + 1];
    for &x in values {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            *s += p;
            p *= x;
        }
    }
    sums
}

/// Cumulants from power sums: central moments via the binomial expansion
/// around the sample mean, then the moment-to-cumulant map (orders >= 2 are
/// shift invariant; order 1 is the mean itself).
fn cumulants_from_sums(sums: &[f64]) -> Vec<f64> {
    let l = sums.len() - 1;
    let count = sums[0];
    let mean = sums[1] / count;
    let mut central = vec![0.0; l + 1]; // central[j] = m_j, central[0] = 1
    central[0] = 1.0;
    for (j, c) in central.iter_mut().enumerate().skip(1) {
        // m_j = (1/N) sum (x - mean)^j = sum_t C(j,t) S_t (-mean)^(j-t) / N
        let mut acc = 0.0;
        let mut binom = 1.0f64;
        for t in 0..=j {
            acc += binom * sums[t] * (-mean).powi((j - t) as i32);
            binom = binom * (j - t) as f64 / (t + 1) as f64;
        }
        *c = acc / count;
    }
    let mut mu = vec![0.0f64; l];
    mu[..].copy_from_slice(&central[1..]);
    mu[0] = 0.0; // exactly centered
    let mut kappas = cumulants_from_moments(&mu);
    kappas[0] = mean;
    kappas
}

/// Plug-in cumulant estimates with jackknife standard errors over the
/// batch's blocks.
pub fn estimate_cumulants(
    batch: &SampleBatch,
    max_order: u32,
) -> Result<CumulantEstimates, NumError> {
    if batch.count < MIN_SAMPLES {
        return Err(NumError::InsufficientSamples { need: MIN_SAMPLES, got: batch.count });
    }
    assert!(
        (1..=MAX_ORDER).contains(&max_order),
        "supported orders are 1..={MAX_ORDER}"
    );
    let ranges = batch.block_ranges();
    let block_sums: Vec<Vec<f64>> = ranges
        .iter()
        .map(|&(start, len)| power_sums(&batch.values[start..start + len], max_order))
        .collect();
    let mut total = vec![0.0; max_order as usize + 1];
    for bs in &block_sums {
        for (t, v) in total.iter_mut().zip(bs) {
            *t += v;
        }
    }
    let full = cumulants_from_sums(&total);
    // leave-one-block-out estimates
    let nblocks = block_sums.len();
    let mut loo = Vec::with_capacity(nblocks);
    for bs in &block_sums {
        let reduced: Vec<f64> = total.iter().zip(bs).map(|(t, v)| t - v).collect();
        loo.push(cumulants_from_sums(&reduced));
    }
    let mut orders = Vec::with_capacity(max_order as usize);
    for l in 0..max_order as usize {
        let mean_loo = loo.iter().map(|k| k[l]).sum::<f64>() / nblocks as f64;
        let var = loo
            .iter()
            .map(|k| (k[l] - mean_loo).powi(2))
            .sum::<f64>()
            * (nblocks as f64 - 1.0)
            / nblocks as f64;
        orders.push((full[l], var.sqrt()));
    }
    Ok(CumulantEstimates { orders })
}
