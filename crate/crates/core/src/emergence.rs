//! Poisson emergence-process sampling, rate estimation and goodness of fit.
//!
//! Emergence times are modeled as a homogeneous Poisson arrival process over
//! an observation window. The module samples such sequences, estimates the
//! rate over sliding windows, tests a recorded sequence for Poisson-ness via
//! the Kolmogorov-Smirnov statistic on conditionally uniform arrival times,
//! and evaluates the closed-form probabilities of 0 / 1 / 2+ arrivals in a
//! one-second interval.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Arrival-count floor below which the KS test refuses to run: shorter
/// sequences lack the data points for statistical significance.
pub const MIN_KS_ARRIVALS: usize = 5;

/// An ordered emergence-time sequence within an observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmergenceSequence {
    /// Arrival times in seconds, non-decreasing, inside the window.
    pub times: Vec<f64>,
    /// Observation window `[start, end]` in seconds.
    pub window: (f64, f64),
}

impl EmergenceSequence {
    pub fn new(mut times: Vec<f64>, window: (f64, f64)) -> Result<Self> {
        if !(window.0.is_finite() && window.1.is_finite()) || window.1 < window.0 {
            return Err(Error::InvalidInput(format!(
                "bad observation window [{}, {}]",
                window.0, window.1
            )));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("non-finite arrival time".into()));
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if times
            .iter()
            .any(|&t| t < window.0 || t > window.1)
        {
            return Err(Error::InvalidInput(
                "arrival time outside observation window".into(),
            ));
        }
        Ok(EmergenceSequence { times, window })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Sample a homogeneous Poisson process by exponential inter-arrivals.
/// Deterministic per seed.
pub fn sample_poisson(rate: f64, window: (f64, f64), seed: u64) -> Result<EmergenceSequence> {
    sample_poisson_with(rate, window, &mut rng::stream(seed, rng::ARRIVALS_STREAM))
}

/// As [`sample_poisson`], drawing from a caller-provided generator.
pub fn sample_poisson_with<R: Rng>(
    rate: f64,
    window: (f64, f64),
    rng: &mut R,
) -> Result<EmergenceSequence> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidInput(format!("rate {rate} must be positive")));
    }
    if !(window.0.is_finite() && window.1.is_finite()) || window.1 < window.0 {
        return Err(Error::InvalidInput(format!(
            "bad observation window [{}, {}]",
            window.0, window.1
        )));
    }
    let exp = Exp::new(rate).expect("positive rate");
    let mut times = Vec::new();
    let mut t = window.0;
    loop {
        t += exp.sample(rng);
        if t >= window.1 {
            break;
        }
        times.push(t);
    }
    Ok(EmergenceSequence { times, window })
}

/// Sliding-window rate estimate: arrivals in `[t, t + window_len)` divided by
/// the window length.
pub fn sliding_rate(seq: &EmergenceSequence, t: f64, window_len: f64) -> f64 {
    assert!(window_len > 0.0, "window length must be positive");
    let count = seq
        .times
        .iter()
        .filter(|&&x| x >= t && x < t + window_len)
        .count();
    count as f64 / window_len
}

/// Rate curve over the observation window: `(t, rate)` at each stride until
/// the sliding window no longer fits.
pub fn sliding_rate_series(
    seq: &EmergenceSequence,
    window_len: f64,
    stride: f64,
) -> Vec<(f64, f64)> {
    assert!(window_len > 0.0 && stride > 0.0);
    let mut out = Vec::new();
    let mut t = seq.window.0;
    while t + window_len <= seq.window.1 + 1e-9 {
        out.push((t, sliding_rate(seq, t, window_len)));
        t += stride;
    }
    out
}

/// Result of the Poisson goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    /// One-sample KS statistic of the normalized arrival times vs Uniform(0,1).
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
    /// Whether the sequence passes at the 5% level.
    pub pass_5pct: bool,
}

/// Kolmogorov-Smirnov test of a sequence against a homogeneous Poisson model.
///
/// Conditioned on the arrival count, homogeneous Poisson arrival times are
/// uniform over the window, so the test compares the normalized times against
/// Uniform(0,1). This needs no rate estimate. The p-value comes from the
/// asymptotic Kolmogorov distribution.
pub fn ks_test_poisson(seq: &EmergenceSequence) -> Result<KsReport> {
    let n = seq.times.len();
    if n < MIN_KS_ARRIVALS {
        return Err(Error::InsufficientData(format!(
            "KS test needs at least {MIN_KS_ARRIVALS} arrivals, got {n}"
        )));
    }
    let span = seq.window.1 - seq.window.0;
    if span <= 0.0 {
        return Err(Error::InvalidInput("zero-length observation window".into()));
    }
    let mut u: Vec<f64> = seq
        .times
        .iter()
        .map(|t| ((t - seq.window.0) / span).clamp(0.0, 1.0))
        .collect();
    u.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let n_f = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in u.iter().enumerate() {
        d = d.max(x - i as f64 / n_f).max((i + 1) as f64 / n_f - x);
    }
    let p_value = kolmogorov_sf(n_f.sqrt() * d);
    Ok(KsReport {
        statistic: d,
        p_value,
        pass_5pct: p_value >= 0.05,
    })
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)`, series truncated once
/// terms fall below 1e-10.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=2000u64 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-10 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Probabilities of 0, 1 and 2-or-more arrivals in a one-second interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalProbabilities {
    pub p0: f64,
    pub p1: f64,
    pub p2_plus: f64,
}

/// Closed-form Poisson interval probabilities for a one-second interval:
/// `p0 = exp(-rate)`, `p1 = rate exp(-rate)`, `p2+ = 1 - p0 - p1`.
pub fn interval_probabilities(rate: f64) -> Result<IntervalProbabilities> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidInput(format!("rate {rate} must be positive")));
    }
    let p0 = (-rate).exp();
    let p1 = rate * p0;
    Ok(IntervalProbabilities {
        p0,
        p1,
        p2_plus: 1.0 - p0 - p1,
    })
}
