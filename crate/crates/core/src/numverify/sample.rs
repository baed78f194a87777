//! Monte Carlo sampling of the Wishart-Laguerre / Hilbert-Schmidt ensembles.
//!
//! Spectra are eigenvalues of `Z Z^dagger` for an `m x n` matrix `Z` of
//! independent standard complex Gaussian entries, solved by cyclic Jacobi
//! rotations on the `m x m` Hermitian matrix. Sampling is split into fixed
//! jackknife blocks, each driven by its own counter-based RNG stream, so
//! results are reproducible independently of the worker count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::NumError;

/// Off-diagonal tolerance (relative to the matrix scale) for Jacobi sweeps.
const JACOBI_TOL: f64 = 1e-13;
/// Sweep cap; exceeding it signals a bug, not a hard input.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues below this threshold contribute `0` to `x ln x` sums.
const XLOGX_FLOOR: f64 = 1e-300;
/// Numerical floor for eigenvalue non-negativity.
const EIGEN_FLOOR: f64 = -1e-12;

/// Number of jackknife blocks; also the RNG stream granularity.
pub const BLOCKS: u64 = 50;

/// Which linear statistic a batch holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStat {
    /// Normalized-spectrum entropy `-sum lambda ln lambda`, support `[0, ln m]`.
    EntropyS,
    /// Unnormalized statistic `sum x ln x`.
    EntropyT,
}

/// A deterministic batch of entropy samples.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub m: u32,
    pub n: u32,
    pub count: u64,
    pub seed: u64,
    pub stat: SampleStat,
    /// Samples in block-major deterministic order.
    pub values: Vec<f64>,
}

impl SampleBatch {
    /// Boundaries of the jackknife blocks as (start, length) pairs.
    pub fn block_ranges(&self) -> Vec<(usize, usize)> {
        block_sizes(self.count)
            .into_iter()
            .scan(0usize, |acc, len| {
                let start = *acc;
                *acc += len;
                Some((start, len))
            })
            .collect()
    }
}

fn block_sizes(count: u64) -> Vec<usize> {
    (0..BLOCKS)
        .map(|b| (count / BLOCKS + u64::from(b < count % BLOCKS)) as usize)
        .collect()
}

/// Eigenvalues of one Wishart-Laguerre draw, ascending; tiny negative values
/// from rounding are clamped to zero.
pub fn sample_spectrum(m: u32, n: u32, rng: &mut impl Rng) -> Result<Vec<f64>, NumError> {
    assert!(m >= 1 && m <= n && n <= 64, "supported range 1 <= m <= n <= 64");
    let (m, n) = (m as usize, n as usize);
    // Z with independent CN(0,1) entries: re, im ~ N(0, 1/2)
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut z = vec![vec![Complex64::new(0.0, 0.0); n]; m];
    for row in z.iter_mut() {
        for entry in row.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *entry = Complex64::new(re * scale, im * scale);
        }
    }
    // A = Z Z^dagger (Hermitian, positive semidefinite)
    let mut a = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for i in 0..m {
        for j in i..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..n {
                acc += z[i][t] * z[j][t].conj();
            }
            a[i][j] = acc;
            a[j][i] = acc.conj();
        }
    }
    let mut eig = jacobi_eigenvalues(a)?;
    for v in eig.iter_mut() {
        debug_assert!(*v >= EIGEN_FLOOR, "eigenvalue below numerical floor: {v}");
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

/// Cyclic Jacobi eigenvalues of a Hermitian matrix (values only).
pub fn jacobi_eigenvalues(mut a: Vec<Vec<Complex64>>) -> Result<Vec<f64>, NumError> {
    let dim = a.len();
    if dim == 1 {
        return Ok(vec![a[0][0].re]);
    }
    let frob: f64 = a
        .iter()
        .flat_map(|r| r.iter().map(|c| c.norm_sqr()))
        .sum::<f64>()
        .sqrt();
    let tol = JACOBI_TOL * frob.max(1.0);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p][q].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            return Ok(a.iter().enumerate().map(|(i, r)| r[i].re).collect());
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let w = a[p][q];
                let wmag = w.norm();
                if wmag <= tol / (dim as f64 * 10.0) {
                    continue;
                }
                // phase e^{i phi} = w / |w|; rotation angle from the real
                // 2x2 problem after the phase transform
                let phase = w / wmag;
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let tau = (aqq - app) / (2.0 * wmag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // column update: col_q first absorbs the phase conjugate
                for r in 0..dim {
                    let arp = a[r][p];
                    let arq = a[r][q] * phase.conj();
                    a[r][p] = arp * c - arq * s;
                    a[r][q] = arp * s + arq * c;
                }
                // row update with the conjugate transform
                for r in 0..dim {
                    let apr = a[p][r];
                    let aqr = a[q][r] * phase;
                    a[p][r] = apr * c - aqr * s;
                    a[q][r] = apr * s + aqr * c;
                }
                // the rotation zeroes the pivot pair up to rounding drift
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
                a[p][p] = Complex64::new(a[p][p].re, 0.0);
                a[q][q] = Complex64::new(a[q][q].re, 0.0);
            }
        }
    }
    Err(NumError::NonConvergence)
}

/// `x ln x` with the `0 ln 0 = 0` convention.
fn x_log_x(x: f64) -> f64 {
    if x < XLOGX_FLOOR {
        0.0
    } else {
        x * x.ln()
    }
}

fn entropy_of_spectrum(eig: &[f64], stat: SampleStat) -> f64 {
    match stat {
        SampleStat::EntropyT => eig.iter().map(|&x| x_log_x(x)).sum(),
        SampleStat::EntropyS => {
            let r: f64 = eig.iter().sum();
            -eig.iter().map(|&x| x_log_x(x / r)).sum::<f64>()
        }
    }
}

/// Generate a deterministic sample batch. Block `b` draws from the ChaCha
/// stream `b` of `seed`, so any worker count yields identical output.
pub fn sample_batch(
    m: u32,
    n: u32,
    count: u64,
    seed: u64,
    stat: SampleStat,
    workers: usize,
) -> Result<SampleBatch, NumError> {
    let sizes = block_sizes(count);
    let gen_block = |b: usize| -> Result<Vec<f64>, NumError> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let mut out = Vec::with_capacity(sizes[b]);
        for _ in 0..sizes[b] {
            let eig = sample_spectrum(m, n, &mut rng)?;
            out.push(entropy_of_spectrum(&eig, stat));
        }
        Ok(out)
    };
    let blocks: Vec<Vec<f64>> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(|| {
            use rayon::prelude::*;
            (0..BLOCKS as usize)
                .into_par_iter()
                .map(gen_block)
                .collect::<Result<Vec<_>, _>>()
        })?
    } else {
        (0..BLOCKS as usize).map(gen_block).collect::<Result<Vec<_>, _>>()?
    };
    let mut values = Vec::with_capacity(count as usize);
    for b in blocks {
        values.extend(b);
    }
    Ok(SampleBatch { m, n, count, seed, stat, values })
}
