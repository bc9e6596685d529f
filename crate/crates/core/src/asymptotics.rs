//! Large-deck behaviour of the two-pile θ-shuffle.
//!
//! Write `θ_j = θ^j + (1-θ)^j` and `ℓ(k,n) = n!·P^{*k}(id)`, so that the ℓ∞
//! distance is `ℓ(k,n) - 1`. For `M = Σ_{j≥2} n^j θ_j^k` small compared with
//! `√n / (10 log n)`,
//! `ℓ(k,n) ≈ exp(Σ_{j≥2} n^j θ_j^k / j)` with relative error
//! `O((1+M)/√n)`. Cutoff happens at
//! `k = ⌊(2 log n - log 2 + c) / -log θ_2⌋`.

use serde::Serialize;

use crate::distances::linf_partition;
use crate::error::{Error, Result};
use crate::shuffle::BiasVector;
use crate::Caps;

/// `θ^j + (1-θ)^j`.
pub fn theta_j(theta: f64, j: u32) -> f64 {
    theta.powi(j as i32) + (1.0 - theta).powi(j as i32)
}

/// Relative truncation tolerance for the `j`-series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-15;

/// Hard stop for the `j`-series.
const MAX_TERMS: u32 = 100_000;

/// A truncated `Σ_{j≥2}` with a certified bound on the neglected tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSum {
    /// `Σ_{j=2}^{J} n^j θ_j^k`.
    pub m: f64,
    /// `Σ_{j=2}^{J} n^j θ_j^k / j`.
    pub log_ell: f64,
    /// Last index summed.
    pub last_j: u32,
    /// Upper bound on `Σ_{j>J} n^j θ_j^k` (which also bounds the neglected
    /// part of `log_ell`).
    pub tail_bound: f64,
}

/// Sums `n^j θ_j^k` (and the same over `j`) for `j ≥ 2` until a term falls
/// below `tol` times the running sum while decreasing.
///
/// Successive ratios `n (θ_{j+1}/θ_j)^k` increase towards
/// `ρ = n·max(θ,1-θ)^k`, so the series converges iff `ρ < 1`, and the tail
/// after term `t_J` is at most `t_J ρ / (1 - ρ)`.
pub fn series(n: usize, theta: f64, k: f64, tol: f64) -> Result<SeriesSum> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::invalid(format!("θ = {theta} outside [0,1]")));
    }
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let ln_n = (n as f64).ln();
    let top = theta.max(1.0 - theta);
    let rho = (ln_n + k * top.ln()).exp();
    if rho >= 1.0 {
        return Err(Error::Divergence(format!(
            "Σ n^j θ_j^k diverges for n={n}, θ={theta}, k={k}: ratio n·max(θ,1-θ)^k = {rho:.4} ≥ 1 (increase k)"
        )));
    }
    let mut m = 0.0;
    let mut log_ell = 0.0;
    let mut prev = f64::INFINITY;
    for j in 2..=MAX_TERMS {
        let term = (j as f64 * ln_n + k * theta_j(theta, j).ln()).exp();
        m += term;
        log_ell += term / j as f64;
        if (term <= tol * m && term < prev) || term == 0.0 {
            return Ok(SeriesSum {
                m,
                log_ell,
                last_j: j,
                tail_bound: term * rho / (1.0 - rho),
            });
        }
        prev = term;
    }
    Err(Error::Divergence(format!(
        "Σ n^j θ_j^k did not settle within {MAX_TERMS} terms (n={n}, θ={theta}, k={k})"
    )))
}

/// `M(k,n) = Σ_{j≥2} n^j θ_j^k`.
pub fn big_m(n: usize, theta: f64, k: f64, tol: f64) -> Result<SeriesSum> {
    series(n, theta, k, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub n: usize,
    pub theta: f64,
    pub k: f64,
    pub m: f64,
    /// `exp(Σ_{j≥2} n^j θ_j^k / j)`.
    pub ell_approx: f64,
    /// `√n / (10 log n)`.
    pub threshold: f64,
    /// `M ≤ threshold`; the estimate is reported either way.
    pub valid: bool,
    pub last_j: u32,
    pub tail_bound: f64,
}

impl AsymptoticEstimate {
    /// Error scale `(1+M)/√n`.
    pub fn error_scale(&self) -> f64 {
        (1.0 + self.m) / (self.n as f64).sqrt()
    }
}

pub fn ell_approx(n: usize, theta: f64, k: f64) -> Result<AsymptoticEstimate> {
    let s = series(n, theta, k, DEFAULT_SERIES_TOL)?;
    let threshold = (n as f64).sqrt() / (10.0 * (n as f64).ln());
    Ok(AsymptoticEstimate {
        n,
        theta,
        k,
        m: s.m,
        ell_approx: s.log_ell.exp(),
        threshold,
        valid: s.m <= threshold,
        last_j: s.last_j,
        tail_bound: s.tail_bound,
    })
}

/// `ℓ(k,n) = ℓ∞(k) + 1`. All conversions between the two go through here.
pub fn ell_from_linf(linf: f64) -> f64 {
    linf + 1.0
}

/// `ℓ(k,n)` from the partition closed form.
pub fn ell_exact(n: usize, theta: f64, k: u32, caps: &Caps) -> Result<f64> {
    let th = BiasVector::two_pile(theta)?;
    Ok(ell_from_linf(linf_partition(n, &th, k, caps)?))
}

/// `⌊(2 log n - log 2 + c) / -log(θ² + (1-θ)²)⌋`.
pub fn cutoff_k(n: usize, theta: f64, c: f64) -> Result<i64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!(
            "θ = {theta} must lie strictly between 0 and 1"
        )));
    }
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let nf = n as f64;
    let k = (2.0 * nf.ln() - 2f64.ln() + c) / -theta_j(theta, 2).ln();
    Ok(k.floor() as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "lowercase")]
pub enum Regime {
    /// θ fixed, `k` from [`cutoff_k`].
    Fixed { c: f64 },
    /// `(1-θ) log n = κ`, `k` from [`cutoff_k`]; needs `c > log 2 - κ`.
    Kappa { kappa: f64, c: f64 },
    /// `θ = 1 - 1/n`, `k = n log n + c n`; needs `c > 0`.
    Extreme { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimePrediction {
    pub ell: f64,
    pub linf: f64,
    /// Only the fixed-θ regime predicts separation.
    pub sep: Option<f64>,
}

/// Limiting values of `ℓ(k,n)` and the derived distances.
pub fn regime_prediction(regime: Regime) -> Result<RegimePrediction> {
    let ell = match regime {
        Regime::Fixed { c } => {
            let ell = (-c).exp().exp();
            return Ok(RegimePrediction {
                ell,
                linf: ell - 1.0,
                sep: Some(1.0 - (-(-c).exp()).exp()),
            });
        }
        Regime::Kappa { kappa, c } => {
            if c <= 2f64.ln() - kappa {
                return Err(Error::Validity(format!(
                    "kappa regime needs c > log 2 - κ (c = {c}, κ = {kappa})"
                )));
            }
            // Σ_{j≥3} r^j / j = -log(1-r) - r - r²/2
            let r = ((-kappa + 2f64.ln() - c) / 2.0).exp();
            let tail = -(1.0 - r).ln() - r - r * r / 2.0;
            ((-c).exp() + tail).exp()
        }
        Regime::Extreme { c } => {
            if c <= 0.0 {
                return Err(Error::Validity(format!("extreme regime needs c > 0 (c = {c})")));
            }
            let x = (-c).exp();
            (-x).exp() / (1.0 - x)
        }
    };
    Ok(RegimePrediction {
        ell,
        linf: ell - 1.0,
        sep: None,
    })
}
