//! Binary entropy, asymptotic rate bounds for CSS triples, and the
//! probability that a block survives `T` rounds of independent defections.

use serde::Serialize;
use statrs::function::erf::{erf, erfc};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

/// Bisection tolerance of [`inverse_entropy`].
pub const INVERSE_ENTROPY_TOL: f64 = 1e-13;

/// `H(x) = -x log2 x - (1-x) log2 (1-x)`, with `H(0) = H(1) = 0`.
pub fn entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Usage(format!("entropy argument {x} outside [0, 1]")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// `H` on `[0, ½]`, taken as 1 beyond.
fn entropy_rising(x: f64) -> Result<f64> {
    entropy(x.min(0.5))
}

/// The `x ≤ ½` with `H(x) = y`.
pub fn inverse_entropy(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Usage(format!(
            "inverse entropy argument {y} outside [0, 1]"
        )));
    }
    if y == 1.0 {
        // H is flat at its maximum, so bisection cannot resolve this end
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > INVERSE_ENTROPY_TOL {
        let mid = 0.5 * (lo + hi);
        if entropy(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Asymptotic rate window for `K` logical qubits in `n` with distances
/// `d1`, `d2`. The entropy terms saturate at 1 once their argument passes ½.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateWindow {
    pub n: usize,
    pub k: usize,
    pub d1: usize,
    pub d2: usize,
    pub rate: f64,
    /// `1 - H(d1/2n) - H(d2/2n)`: no code beats this rate.
    pub upper: f64,
    /// `1 - H(d1/n) - H(d2/n)`: codes at this rate exist.
    pub lower: f64,
    /// `rate ≤ upper`.
    pub possible: bool,
    /// `rate ≤ lower`.
    pub achievable: bool,
}

pub fn rate_window(n: usize, k: usize, d1: usize, d2: usize) -> Result<RateWindow> {
    if n == 0 || d1 == 0 || d2 == 0 || d1 > n || d2 > n {
        return Err(Error::Usage(format!(
            "need 0 < d1, d2 <= n (n={n}, d1={d1}, d2={d2})"
        )));
    }
    let nf = n as f64;
    let (a, b) = (d1 as f64 / nf, d2 as f64 / nf);
    let upper = 1.0 - entropy_rising(a / 2.0)? - entropy_rising(b / 2.0)?;
    let lower = 1.0 - entropy_rising(a)? - entropy_rising(b)?;
    let rate = k as f64 / nf;
    Ok(RateWindow {
        n,
        k,
        d1,
        d2,
        rate,
        upper,
        lower,
        possible: rate <= upper,
        achievable: rate <= lower,
    })
}

/// Range of `d/n` (equal distances, vanishing rate): achievable up to
/// `H⁻¹(½)`, impossible beyond `2H⁻¹(½)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceLimits {
    pub achievable: f64,
    pub impossible_above: f64,
}

pub fn distance_limits() -> Result<DistanceLimits> {
    let h = inverse_entropy(0.5)?;
    Ok(DistanceLimits {
        achievable: h,
        impossible_above: 2.0 * h,
    })
}

/// Per-qubit defection probabilities below which recovery is guaranteed and
/// above which it is impossible, for vanishing rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub guaranteed: f64,
    pub impossible: f64,
}

pub fn threshold_summary() -> Result<Thresholds> {
    let h = inverse_entropy(0.5)?;
    Ok(Thresholds {
        guaranteed: h / 2.0,
        impossible: h,
    })
}

/// `ln Σ exp(v)`.
fn log_sum_exp(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = v.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln P(X = i)` for `X ~ Binomial(n, p)`, `0 < p < 1`.
fn ln_binomial_pmf(n: u64, p: f64, i: u64) -> f64 {
    ln_binomial(n, i) + i as f64 * p.ln() + (n - i) as f64 * (-p).ln_1p()
}

/// `(ln P(X ≤ x), ln P(X > x))`, each summed in log space.
pub fn ln_binomial_cdf_split(n: u64, p: f64, x: u64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Usage(format!("probability {p} outside [0, 1]")));
    }
    let x = x.min(n);
    if p == 0.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    if p == 1.0 {
        return Ok(if x >= n {
            (0.0, f64::NEG_INFINITY)
        } else {
            (f64::NEG_INFINITY, 0.0)
        });
    }
    let head = log_sum_exp((0..=x).map(|i| ln_binomial_pmf(n, p, i)));
    let tail = log_sum_exp((x + 1..=n).map(|i| ln_binomial_pmf(n, p, i)));
    Ok((head, tail))
}

/// `P(X ≤ x)` and `P(X > x)`; the smaller of the two is computed directly so
/// that a tail far below machine epsilon keeps its precision.
pub fn binomial_cdf(n: u64, p: f64, x: u64) -> Result<(f64, f64)> {
    let (head, tail) = ln_binomial_cdf_split(n, p, x)?;
    Ok(if tail < head {
        let t = tail.exp();
        (1.0 - t, t)
    } else {
        let h = head.exp();
        (h, 1.0 - h)
    })
}

/// Survival of one block over `T` correction rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalReport {
    pub n: u64,
    pub p: f64,
    pub d: u64,
    #[serde(rename = "T")]
    pub t: u64,
    /// Correctable defections per round, `⌊(d-1)/2⌋`.
    pub x: u64,
    pub mu: f64,
    pub sigma: f64,
    /// Binomial `P(at most x defect)`.
    pub f_exact: f64,
    /// `1 - f_exact`, computed without cancellation.
    pub tail_exact: f64,
    /// `erf((x - μ) / (σ√2))`.
    pub f_erf: f64,
    /// `1 - f_erf`.
    pub tail_erf: f64,
    /// Leading terms of the large-`z` expansion of `1 - erf(z)`; `None`
    /// unless `z > 1`.
    pub tail_asymptotic: Option<f64>,
    /// `f_exact^T`.
    pub p_exact: f64,
    /// `f_erf^T`.
    pub p_erf: f64,
}

/// `1 - erf(z) ≈ e^{-z²} / (z√π) · (1 - 1/(2z²))` for `z ≫ 1`.
pub fn erfc_asymptotic(z: f64) -> f64 {
    (-z * z).exp() / (z * std::f64::consts::PI.sqrt()) * (1.0 - 1.0 / (2.0 * z * z))
}

pub fn survival(n: u64, p: f64, d: u64, t: u64) -> Result<SurvivalReport> {
    if d == 0 || d > n {
        return Err(Error::Usage(format!("need 0 < d <= n (n={n}, d={d})")));
    }
    if t == 0 {
        return Err(Error::Usage("T must be at least 1".into()));
    }
    let x = (d - 1) / 2;
    let (head, tail) = ln_binomial_cdf_split(n, p, x)?;
    let (f_exact, tail_exact) = binomial_cdf(n, p, x)?;
    // ln F, taken from whichever side is not subject to cancellation
    let ln_f = if tail < head {
        (-tail.exp()).ln_1p()
    } else {
        head
    };
    let p_exact = (t as f64 * ln_f).exp();

    let mu = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    let (f_erf, tail_erf, tail_asymptotic) = if sigma > 0.0 {
        let z = (x as f64 - mu) / (sigma * std::f64::consts::SQRT_2);
        (erf(z), erfc(z), (z > 1.0).then(|| erfc_asymptotic(z)))
    } else {
        // degenerate distribution: all mass at μ
        let f = if x as f64 >= mu { 1.0 } else { 0.0 };
        (f, 1.0 - f, None)
    };
    let p_erf = if f_erf <= 0.0 {
        0.0
    } else {
        (t as f64 * (-tail_erf).ln_1p()).exp()
    };
    Ok(SurvivalReport {
        n,
        p,
        d,
        t,
        x,
        mu,
        sigma,
        f_exact,
        tail_exact,
        f_erf,
        tail_erf,
        tail_asymptotic,
        p_exact,
        p_erf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateCurveRow {
    pub d_over_n: f64,
    /// `1 - 2H(d/2n)`.
    pub upper: f64,
    /// `1 - 2H(d/n)`.
    pub lower: f64,
    /// `1 - H(d/2n)`.
    pub classical: f64,
}

pub fn emit_rate_curves(grid: &[f64]) -> Result<Vec<RateCurveRow>> {
    grid.iter()
        .map(|&r| {
            if !(r > 0.0 && r < 0.5) {
                return Err(Error::Usage(format!("grid value {r} outside (0, 1/2)")));
            }
            let half = entropy(r / 2.0)?;
            Ok(RateCurveRow {
                d_over_n: r,
                upper: 1.0 - 2.0 * half,
                lower: 1.0 - 2.0 * entropy(r)?,
                classical: 1.0 - half,
            })
        })
        .collect()
}

/// CSV with a header row and 17 significant digits.
pub fn rate_curves_csv(rows: &[RateCurveRow]) -> String {
    let mut out = String::from("d_over_n,upper,lower,classical\n");
    for r in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.d_over_n, r.upper, r.lower, r.classical
        ));
    }
    out
}

/// `m` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    match m {
        0 => vec![],
        1 => vec![a],
        _ => (0..m)
            .map(|i| a + (b - a) * i as f64 / (m - 1) as f64)
            .collect(),
    }
}
