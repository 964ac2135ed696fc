//! The occupancy function
//!
//! `f(N, n, m) = Σ_{k=1}^{m} (-1)^{k+1} C(m, k) (1 - k/n)^N`,
//!
//! the probability that at least one of `m` disjoint cells of measure `1/n`
//! receives none of `N` independent points, together with its classical
//! lower bound and the asymptotic `(n, m)` regimes under which it tends to 1.

mod dd;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use dd::Dd;

/// Largest `N · bits(numerator of n)` handled by [`f_exact`].
pub const EXACT_BIT_BUDGET: u64 = 1 << 20;

/// Largest `N · m` evaluated by the occupancy chain in [`f_dp`].
pub const DP_WORK_LIMIT: f64 = 2e7;

/// Below this upper bound on `P(all cells occupied)` [`f_dp`] returns 1.
const ALL_OCCUPIED_CUTOFF: f64 = 5.551115123125783e-17; // 2^-54

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupancyParams {
    /// Number of points thrown.
    #[serde(rename = "N")]
    pub big_n: u64,
    /// Cells have measure `1/n`.
    pub n: f64,
    /// Number of cells.
    pub m: u64,
}

impl OccupancyParams {
    pub fn new(big_n: u64, n: f64, m: u64) -> Result<Self> {
        if big_n == 0 || m == 0 {
            return invalid("N and m must be positive");
        }
        if !(n.is_finite() && n > 0.0) {
            return invalid(format!("n must be positive and finite, got {n}"));
        }
        if !(m as f64 <= n && n <= big_n as f64) {
            return invalid(format!("need m ≤ n ≤ N, got m = {m}, n = {n}, N = {big_n}"));
        }
        Ok(OccupancyParams { big_n, n, m })
    }
}

/// Exact value for rational `n`.
pub fn f_exact_rational(big_n: u64, n: &BigRational, m: u64) -> Result<BigRational> {
    if big_n == 0 || m == 0 || !n.is_positive() {
        return invalid("N, n and m must be positive");
    }
    let m_rat = BigRational::from_integer(BigInt::from(m));
    if &m_rat > n || n > &BigRational::from_integer(BigInt::from(big_n)) {
        return invalid("need m ≤ n ≤ N");
    }
    let (p, q) = (n.numer().clone(), n.denom().clone());
    let bits = p.bits().max(1);
    if big_n.saturating_mul(bits) > EXACT_BIT_BUDGET {
        return Err(Error::ResourceLimit(format!("exact evaluation needs about {} bits per term", big_n * bits)));
    }
    let exp = usize::try_from(big_n).map_err(|_| Error::ResourceLimit("N too large".into()))?;
    let mut numer = BigInt::zero();
    let mut c = BigInt::one();
    for k in 1..=m {
        c = c * BigInt::from(m - k + 1) / BigInt::from(k);
        let base = &p - &q * BigInt::from(k);
        let term = &c * num_traits::pow(base, exp);
        if k % 2 == 1 {
            numer += term;
        } else {
            numer -= term;
        }
    }
    Ok(BigRational::new(numer, num_traits::pow(p, exp)))
}

/// Exact value; the `f64` parameter `n` is read as the rational it represents.
pub fn f_exact(params: &OccupancyParams) -> Result<BigRational> {
    let n = BigRational::from_float(params.n).ok_or_else(|| Error::InvalidArgument("n is not finite".into()))?;
    f_exact_rational(params.big_n, &n, params.m)
}

/// `f(N, n, m)` in floating point without catastrophic cancellation.
///
/// Small instances run the occupancy chain over the points: with `j` of the
/// `m` cells occupied, the next point occupies a new one with probability
/// `(m - j)/n`, and `f` is the mass left below state `m`.
///
/// Large instances use the alternating sum in double-double arithmetic.
/// By negative association of the occupancy indicators,
/// `P(all occupied) ≤ (1 - (1 - 1/n)^N)^m`; when that is below `2^-54` the
/// result rounds to 1. Otherwise `mq ≤ 38` with `q = (1 - 1/n)^N`, the terms
/// are below `e^{mq}`, and 32-digit arithmetic leaves an absolute error
/// near `1e-17`.
pub fn f_dp(params: &OccupancyParams) -> f64 {
    if params.big_n as f64 * params.m as f64 <= DP_WORK_LIMIT {
        occupancy_chain(params)
    } else {
        alternating_sum(params)
    }
}

fn occupancy_chain(p: &OccupancyParams) -> f64 {
    let m = p.m as usize;
    let n = p.n;
    let mut prob = vec![0.0f64; m + 1];
    prob[0] = 1.0;
    let (mut lo, mut hi) = (0usize, 0usize);
    for _ in 0..p.big_n {
        let top = (hi + 1).min(m);
        for j in (lo..=hi.min(m - 1)).rev() {
            let mass = prob[j];
            let free = (m - j) as f64;
            prob[j + 1] += mass * (free / n);
            prob[j] = mass * ((n - free) / n);
        }
        hi = top;
        while lo < hi && prob[lo] < 1e-300 {
            prob[lo] = 0.0;
            lo += 1;
        }
    }
    prob[..m].iter().sum::<f64>().clamp(0.0, 1.0)
}

fn alternating_sum(p: &OccupancyParams) -> f64 {
    let big_n = Dd::from_f64(p.big_n as f64);
    let n = Dd::from_f64(p.n);
    let log_q = p.big_n as f64 * (-1.0 / p.n).ln_1p();
    let q = log_q.exp();
    let all_occupied_bound = (p.m as f64 * (-q).ln_1p()).exp();
    if all_occupied_bound < ALL_OCCUPIED_CUTOFF {
        return 1.0;
    }
    // t_k = C(m, k) exp(L_k) with L_k = N log(1 - k/n)
    let log_term = |k: u64| -> Option<Dd> {
        if k as f64 >= p.n {
            None
        } else {
            Some(big_n * (-(Dd::from_f64(k as f64) / n)).ln_1p())
        }
    };
    let mut prev_log = Dd::ZERO;
    let mut term = Dd::ONE;
    let mut sum = Dd::ZERO;
    let mut largest = 0.0f64;
    for k in 1..=p.m {
        let Some(lk) = log_term(k) else { break };
        let ratio = Dd::from_f64((p.m - k + 1) as f64) / Dd::from_f64(k as f64) * (lk - prev_log).exp();
        prev_log = lk;
        term = term * ratio;
        if term.hi == 0.0 {
            break;
        }
        sum = if k % 2 == 1 { sum + term } else { sum - term };
        largest = largest.max(term.hi);
        if ratio.hi < 1.0 && term.hi < 1e-36 * largest {
            break;
        }
    }
    sum.to_f64().clamp(0.0, 1.0)
}

/// `1 - [1 - (1-1/n)^N]^m - (N/n²) · m(m-1)/2 · (1-1/n)^{2(N-1)} · [1 + (1-1/n)^{N-1}]^{m-2}`,
/// evaluated in log space.
pub fn f_lower_bound(params: &OccupancyParams) -> f64 {
    let big_n = params.big_n as f64;
    let (n, m) = (params.n, params.m as f64);
    let log_keep = (-1.0 / n).ln_1p();
    // 1 - (1 - 1/n)^N without cancellation
    let hit = -(big_n * log_keep).exp_m1();
    let first = if hit <= 0.0 { 0.0 } else { (m * hit.ln()).exp() };
    let second = if params.m < 2 {
        0.0
    } else {
        let log_pairs = (m * (m - 1.0) / 2.0).ln();
        let tail = ((big_n - 1.0) * log_keep).exp();
        (big_n.ln() - 2.0 * n.ln() + log_pairs + 2.0 * (big_n - 1.0) * log_keep + (m - 2.0) * tail.ln_1p()).exp()
    };
    1.0 - first - second
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeVariant {
    /// `n = N/(log N - α log log N)`, `m = ⌊κ n⌋`.
    I,
    /// `n = N/((d-1)/d · log N - α log log N)`, `m = ⌊κ n^{(d-1)/d}⌋`.
    II,
    /// `n = N/((1/d) · log N - α log log N)`, `m = ⌊κ n^{1/d}⌋`.
    III,
}

pub const DEFAULT_ALPHA: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub variant: RegimeVariant,
    pub kappa: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Dimension for variants II and III.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

impl RegimeSpec {
    pub fn new(variant: RegimeVariant, kappa: f64, alpha: f64, d: Option<u32>) -> Result<Self> {
        let spec = RegimeSpec { variant, kappa, alpha, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) || !self.alpha.is_finite() {
            return invalid("kappa must be positive and alpha finite");
        }
        match (self.variant, self.d) {
            (RegimeVariant::I, _) if self.kappa > 1.0 => invalid("variant I needs kappa ≤ 1"),
            (RegimeVariant::I, _) => Ok(()),
            (_, Some(d)) if d >= 2 => Ok(()),
            _ => invalid("variants II and III need a dimension d ≥ 2"),
        }
    }
}

/// Occupancy parameters of the regime at sample size `big_n`.
pub fn regime_params(spec: &RegimeSpec, big_n: u64) -> Result<OccupancyParams> {
    spec.validate()?;
    let nf = big_n as f64;
    if big_n < 3 {
        return invalid("N must be at least 3 so that log log N is defined and positive");
    }
    let (log_n, log_log_n) = (nf.ln(), nf.ln().ln());
    let (weight, exponent) = match spec.variant {
        RegimeVariant::I => (1.0, 1.0),
        RegimeVariant::II => {
            let d = spec.d.unwrap_or(2) as f64;
            ((d - 1.0) / d, (d - 1.0) / d)
        }
        RegimeVariant::III => {
            let d = spec.d.unwrap_or(2) as f64;
            (1.0 / d, 1.0 / d)
        }
    };
    let denom = weight * log_n - spec.alpha * log_log_n;
    if !(denom > 0.0) {
        return invalid(format!("N = {big_n} is too small for this regime (denominator {denom:.4})"));
    }
    let n = nf / denom;
    let m = (spec.kappa * n.powf(exponent)).floor();
    if m < 1.0 {
        return invalid(format!("N = {big_n} gives no cells (m = 0)"));
    }
    OccupancyParams::new(big_n, n, m as u64)
}

/// Converts an exact value to `f64`.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
