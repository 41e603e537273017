//! Closed-form maximizers built on W0.
//!
//! Every maximizer below has the shape `x = scale·(e^t - 1)` with
//! `t = W0(a/e - 1/e) + 1`, where `a >= 0` is a product of hardware and
//! channel constants. `a` is assembled as a sum of logarithms because
//! β·ν/N0 alone spans some twenty decades.
//!
//! None of these formulas involve η, so their argmax outputs do not depend
//! on it.

use serde::Serialize;

use crate::error::{ensure, Degeneracy, Error, Result};
use crate::lambertw::lambert_w0_shifted_ln;
use crate::model::{ChannelGain, HardwareProfile, LOG2_E};

/// Optimal power spectral density for a given antenna count in the
/// large-bandwidth regime where μ/B and D0·M/B vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSolution {
    pub m: f64,
    /// Optimal P/B (W/Hz).
    pub z_star: f64,
    pub u: f64,
    /// SNR at the optimum, e^u - 1.
    pub snr_star: f64,
    pub degenerate: Option<Degeneracy>,
}

impl RatioSolution {
    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr_star.log10()
    }
}

/// Lambert-W exponents produced by the fixed-B maximizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSolution {
    /// Optimal transmit power (W).
    pub p: f64,
    pub v: f64,
    pub degenerate: Option<Degeneracy>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntennaSolution {
    /// Unclamped, real-valued stationary antenna count.
    pub m: f64,
    pub w: f64,
}

/// (e^t - 1)·e^{ln_scale}, without overflowing for large t.
fn scaled_expm1(t: f64, ln_scale: f64) -> f64 {
    if t < 700.0 {
        t.exp_m1() * ln_scale.exp()
    } else {
        (t + ln_scale).exp()
    }
}

fn ensure_antennas(m: f64) -> Result<()> {
    ensure(m >= 1.0 && m.is_finite(), "m", m, ">= 1")
}

fn ensure_bandwidth(b: f64) -> Result<()> {
    ensure(b > 0.0 && b.is_finite(), "b", b, "> 0")
}

/// Optimal P/B for `m` antennas: u = W0(κM²βν/(N0e) - 1/e) + 1 and
/// z* = N0(e^u - 1)/(Mβ).
pub fn optimal_psd_ratio(m: f64, hw: &HardwareProfile, ch: &ChannelGain) -> Result<RatioSolution> {
    ensure_antennas(m)?;
    let ln_a = hw.kappa.ln() + 2.0 * m.ln() + ch.beta.ln() + hw.nu.ln() - hw.n0.ln();
    let u = lambert_w0_shifted_ln(ln_a)? + 1.0;
    let snr_star = u.exp_m1();
    Ok(RatioSolution {
        m,
        z_star: snr_star * hw.n0 / (m * ch.beta),
        u,
        snr_star,
        degenerate: (hw.nu == 0.0).then_some(Degeneracy::ZeroProcessingEnergy),
    })
}

/// Large-bandwidth EE upper bound for `m` antennas at the optimal P/B.
///
/// When ν = 0 the optimum is the limit P/B → 0 and the returned value is
/// that supremum.
pub fn ee_max_asymptotic(m: f64, hw: &HardwareProfile, ch: &ChannelGain) -> Result<f64> {
    let r = optimal_psd_ratio(m, hw, ch)?;
    if r.u == 0.0 {
        return Ok(LOG2_E / (hw.n0 / (hw.kappa * m * ch.beta) + hw.eta * LOG2_E));
    }
    let rate = r.u * LOG2_E;
    Ok(rate / (r.z_star / hw.kappa + hw.nu * m + hw.eta * rate))
}

/// Integer antenna count in `1..=m_max` maximizing [`ee_max_asymptotic`].
/// Ties go to the smaller count.
pub fn optimal_m_asymptotic(hw: &HardwareProfile, ch: &ChannelGain, m_max: u32) -> Result<u32> {
    ensure(m_max >= 1, "m_max", m_max as f64, ">= 1")?;
    let mut best = (1, f64::NEG_INFINITY);
    for m in 1..=m_max {
        let ee = ee_max_asymptotic(m as f64, hw, ch)?;
        if ee > best.1 {
            best = (m, ee);
        }
    }
    Ok(best.0)
}

/// Data rate B·u·log2(e) achieved on the optimal-ratio line.
pub fn rate_at_optimal_ratio(b: f64, u: f64) -> Result<f64> {
    ensure_bandwidth(b)?;
    ensure(u > 0.0 && u.is_finite(), "u", u, "> 0")?;
    Ok(b * u * LOG2_E)
}

/// EE-maximizing transmit power for fixed bandwidth and antenna count.
pub fn optimal_power(
    b: f64,
    m: f64,
    hw: &HardwareProfile,
    ch: &ChannelGain,
) -> Result<PowerSolution> {
    ensure_bandwidth(b)?;
    ensure_antennas(m)?;
    power_stationary(b, m, hw, ch)
}

/// [`optimal_power`] without the `m >= 1` precondition.
pub(crate) fn power_stationary(
    b: f64,
    m: f64,
    hw: &HardwareProfile,
    ch: &ChannelGain,
) -> Result<PowerSolution> {
    let circuit = hw.mu + hw.chain_power(b) * m;
    let ln_a = hw.kappa.ln() + m.ln() + ch.beta.ln() + circuit.ln() - b.ln() - hw.n0.ln();
    let v = lambert_w0_shifted_ln(ln_a)? + 1.0;
    let p = scaled_expm1(v, b.ln() + hw.n0.ln() - m.ln() - ch.beta.ln());
    Ok(PowerSolution {
        p,
        v,
        degenerate: (circuit == 0.0).then_some(Degeneracy::ZeroCircuitPower),
    })
}

/// EE-maximizing real-valued antenna count for fixed bandwidth and power.
///
/// The result is the unclamped stationary point and may be below one.
pub fn optimal_antennas(
    b: f64,
    p: f64,
    hw: &HardwareProfile,
    ch: &ChannelGain,
) -> Result<AntennaSolution> {
    ensure_bandwidth(b)?;
    ensure(p > 0.0 && p.is_finite(), "p", p, "> 0")?;
    let chain = hw.chain_power(b);
    if chain == 0.0 {
        return Err(Error::Degenerate(Degeneracy::ZeroTransceiverPower));
    }
    let ln_a =
        p.ln() + ch.beta.ln() + (p / hw.kappa + hw.mu).ln() - b.ln() - hw.n0.ln() - chain.ln();
    let w = lambert_w0_shifted_ln(ln_a)? + 1.0;
    let m = scaled_expm1(w, b.ln() + hw.n0.ln() - p.ln() - ch.beta.ln());
    Ok(AntennaSolution { m, w })
}

/// Transmit power per antenna κ(D0 + νB) at the interior (P, M) optimum.
pub fn power_per_antenna_ratio(b: f64, hw: &HardwareProfile) -> Result<f64> {
    ensure_bandwidth(b)?;
    Ok(hw.kappa * hw.chain_power(b))
}

/// Joint interior (P, M) stationary point for fixed `b`, reached by
/// alternating the power and antenna maximizers without clamping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteriorOptimum {
    pub p: f64,
    pub m: f64,
    pub iterations: usize,
}

pub fn alternate_power_antennas(
    b: f64,
    hw: &HardwareProfile,
    ch: &ChannelGain,
    rel_tol: f64,
    max_iterations: usize,
) -> Result<InteriorOptimum> {
    ensure_bandwidth(b)?;
    let mut m = 1.0;
    let mut p = power_stationary(b, m, hw, ch)?.p;
    for it in 1..=max_iterations {
        let m_next = optimal_antennas(b, p, hw, ch)?.m;
        let p_next = power_stationary(b, m_next, hw, ch)?.p;
        let done = ((m_next - m) / m).abs() <= rel_tol && ((p_next - p) / p).abs() <= rel_tol;
        m = m_next;
        p = p_next;
        if done {
            return Ok(InteriorOptimum {
                p,
                m,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
        trace: Vec::new(),
    })
}
