use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::EvalError;
use crate::keyed_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub alpha: f64,
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            alpha: 0.05,
            resamples: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcaInterval {
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
    pub resamples: usize,
}

impl BcaInterval {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }
}

/// Linear interpolation between order statistics of a sorted sample.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// BCa percentile interval for the mean of `values`.
///
/// Resampling indexes `values` by position, so callers that want order
/// independence must sort first. The result always satisfies
/// `lo <= mean <= hi`.
pub fn bca_interval(values: &[f64], opts: &BootstrapOptions) -> Result<BcaInterval, EvalError> {
    let n = values.len();
    if n < 2 {
        return Err(EvalError::TooFewValues(n));
    }
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(EvalError::InvalidAlpha(opts.alpha));
    }
    if opts.resamples < 2 {
        return Err(EvalError::TooFewResamples(opts.resamples));
    }
    let sum: f64 = values.iter().sum();
    let theta = sum / n as f64;
    let degenerate = BcaInterval {
        lo: theta,
        hi: theta,
        alpha: opts.alpha,
        resamples: opts.resamples,
    };
    if values.iter().all(|&v| v == values[0]) {
        return Ok(degenerate);
    }

    let b = opts.resamples;
    let mut rng = keyed_rng::keyed_rng("bootstrap.bca", opts.seed, "");
    let mut boots: Vec<f64> = (0..b)
        .map(|_| (0..n).map(|_| values[keyed_rng::index(&mut rng, n)]).sum::<f64>() / n as f64)
        .collect();
    boots.sort_by(f64::total_cmp);

    let normal = Normal::standard();
    let below = boots.iter().filter(|&&t| t < theta).count() as f64;
    let half = 0.5 / b as f64;
    let z0 = normal.inverse_cdf((below / b as f64).clamp(half, 1.0 - half));

    // Jackknife acceleration from leave-one-out means.
    let loo: Vec<f64> = values.iter().map(|v| (sum - v) / (n - 1) as f64).collect();
    let loo_mean = loo.iter().sum::<f64>() / n as f64;
    let (mut s2, mut s3) = (0.0, 0.0);
    for t in &loo {
        let d = loo_mean - t;
        s2 += d * d;
        s3 += d * d * d;
    }
    let a = if s2 > 0.0 { s3 / (6.0 * s2.powf(1.5)) } else { 0.0 };

    let adjusted = |z: f64| {
        let num = z0 + z;
        normal.cdf(z0 + num / (1.0 - a * num))
    };
    let lo = quantile(&boots, adjusted(normal.inverse_cdf(opts.alpha / 2.0)));
    let hi = quantile(&boots, adjusted(normal.inverse_cdf(1.0 - opts.alpha / 2.0)));
    Ok(BcaInterval {
        lo: lo.min(theta),
        hi: hi.max(theta),
        ..degenerate
    })
}
