//! Link model: hardware constants, channel gain, and the three scalar
//! functions everything else is built on (capacity, power consumption and
//! energy efficiency).
//!
//! All quantities are strict SI. dB/dBm conversions live at the boundary
//! ([`ChannelGain::from_db`], [`dbm_to_watt`]).

use serde::Serialize;

use crate::error::{ensure, Result};

/// log2(e); capacity is evaluated with natural logs and converted once.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Converts a power level in dBm to Watt.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Hardware power-consumption constants of the base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardwareProfile {
    /// Power-amplifier efficiency κ ∈ (0, 1].
    pub kappa: f64,
    /// Fixed circuit power μ (W).
    pub mu: f64,
    /// Per transceiver chain power D0 (W).
    pub d0: f64,
    /// Processing energy per sample and antenna ν (J/sample).
    pub nu: f64,
    /// Coding/backhaul energy per bit η (J/bit).
    pub eta: f64,
    /// Receiver noise power spectral density N0 (W/Hz).
    pub n0: f64,
}

impl HardwareProfile {
    pub fn new(kappa: f64, mu: f64, d0: f64, nu: f64, eta: f64, n0: f64) -> Result<Self> {
        let hw = Self {
            kappa,
            mu,
            d0,
            nu,
            eta,
            n0,
        };
        hw.validate()?;
        Ok(hw)
    }

    /// Builds a profile from the split fixed power P_FIX + P_SYN.
    pub fn with_fixed_split(
        kappa: f64,
        p_fix: f64,
        p_syn: f64,
        d0: f64,
        nu: f64,
        eta: f64,
        n0: f64,
    ) -> Result<Self> {
        ensure(p_fix >= 0.0, "p_fix", p_fix, ">= 0")?;
        ensure(p_syn >= 0.0, "p_syn", p_syn, ">= 0")?;
        Self::new(kappa, p_fix + p_syn, d0, nu, eta, n0)
    }

    /// Reference constants: κ = 0.4, μ = 100 mW, D0 = 20 mW, ν = 1e-10 J/sample,
    /// η = 1e-11 J/bit, N0 = -174 dBm/Hz.
    pub fn baseline() -> Self {
        Self {
            kappa: 0.4,
            mu: 0.1,
            d0: 0.02,
            nu: 1e-10,
            eta: 1e-11,
            n0: dbm_to_watt(-174.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.kappa > 0.0 && self.kappa <= 1.0,
            "kappa",
            self.kappa,
            "in (0, 1]",
        )?;
        ensure(self.mu >= 0.0 && self.mu.is_finite(), "mu", self.mu, ">= 0")?;
        ensure(self.d0 >= 0.0 && self.d0.is_finite(), "d0", self.d0, ">= 0")?;
        ensure(self.nu >= 0.0 && self.nu.is_finite(), "nu", self.nu, ">= 0")?;
        ensure(
            self.eta >= 0.0 && self.eta.is_finite(),
            "eta",
            self.eta,
            ">= 0",
        )?;
        ensure(self.n0 > 0.0 && self.n0.is_finite(), "n0", self.n0, "> 0")
    }

    /// Per-antenna transceiver power D0 + νB at bandwidth `b`.
    pub fn chain_power(&self, b: f64) -> f64 {
        self.d0 + self.nu * b
    }
}

impl Default for HardwareProfile {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Linear per-antenna channel gain β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelGain {
    pub beta: f64,
}

impl ChannelGain {
    pub fn new(beta: f64) -> Result<Self> {
        ensure(beta > 0.0 && beta.is_finite(), "beta", beta, "> 0")?;
        Ok(Self { beta })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::new(db_to_linear(db))
    }

    pub fn to_db(&self) -> f64 {
        linear_to_db(self.beta)
    }
}

impl Default for ChannelGain {
    /// -110 dB.
    fn default() -> Self {
        Self { beta: 1e-11 }
    }
}

/// Candidate operating point. `m` is real-valued while optimizing and an
/// integer once finalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignPoint {
    /// Transmit power (W).
    pub p: f64,
    /// Bandwidth (Hz).
    pub b: f64,
    /// Antenna count.
    pub m: f64,
}

impl DesignPoint {
    pub fn new(p: f64, b: f64, m: f64) -> Result<Self> {
        let dp = Self { p, b, m };
        dp.validate()?;
        Ok(dp)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.p > 0.0 && self.p.is_finite(), "p", self.p, "> 0")?;
        ensure(self.b > 0.0 && self.b.is_finite(), "b", self.b, "> 0")?;
        ensure(self.m > 0.0 && self.m.is_finite(), "m", self.m, "> 0")
    }

    pub fn is_finalized(&self) -> bool {
        self.m >= 1.0 && self.m.fract() == 0.0
    }
}

/// Box constraints on the design variables plus the ascent threshold δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Limits {
    pub p_max: f64,
    pub b_max: f64,
    pub m_max: u32,
    /// Stop once an iteration improves EE by no more than this (bit/J).
    pub delta: f64,
}

impl Limits {
    pub fn new(p_max: f64, b_max: f64, m_max: u32, delta: f64) -> Result<Self> {
        let l = Self {
            p_max,
            b_max,
            m_max,
            delta,
        };
        l.validate()?;
        Ok(l)
    }

    /// P_max = 40 dBm, B_max = 10 GHz, M_max = 512, δ = 0.1 bit/J.
    pub fn baseline() -> Self {
        Self {
            p_max: dbm_to_watt(40.0),
            b_max: 1e10,
            m_max: 512,
            delta: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.p_max > 0.0 && self.p_max.is_finite(),
            "p_max",
            self.p_max,
            "> 0",
        )?;
        ensure(
            self.b_max > 0.0 && self.b_max.is_finite(),
            "b_max",
            self.b_max,
            "> 0",
        )?;
        ensure(self.m_max >= 1, "m_max", self.m_max as f64, ">= 1")?;
        ensure(
            self.delta > 0.0 && self.delta.is_finite(),
            "delta",
            self.delta,
            "> 0",
        )
    }

    pub fn contains(&self, dp: &DesignPoint) -> bool {
        dp.p <= self.p_max && dp.b <= self.b_max && dp.m <= self.m_max as f64
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Received SNR M·P·β / (B·N0).
pub fn snr(dp: &DesignPoint, hw: &HardwareProfile, ch: &ChannelGain) -> f64 {
    dp.m * dp.p * ch.beta / (dp.b * hw.n0)
}

/// MISO capacity B·log2(1 + SNR) in bit/s.
pub fn capacity(dp: &DesignPoint, hw: &HardwareProfile, ch: &ChannelGain) -> f64 {
    dp.b * snr(dp, hw, ch).ln_1p() * LOG2_E
}

/// Total consumed power P/κ + μ + (D0 + νB)M + η·C in Watt.
pub fn power_consumption(dp: &DesignPoint, hw: &HardwareProfile, ch: &ChannelGain) -> f64 {
    dp.p / hw.kappa + hw.mu + hw.chain_power(dp.b) * dp.m + hw.eta * capacity(dp, hw, ch)
}

/// Energy efficiency in bit/J.
pub fn energy_efficiency(dp: &DesignPoint, hw: &HardwareProfile, ch: &ChannelGain) -> f64 {
    let c = capacity(dp, hw, ch);
    c / (dp.p / hw.kappa + hw.mu + hw.chain_power(dp.b) * dp.m + hw.eta * c)
}

/// Individual consumption terms, in Watt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBreakdown {
    pub amplifier: f64,
    pub fixed: f64,
    pub transceiver: f64,
    pub processing: f64,
    pub coding: f64,
}

impl PowerBreakdown {
    pub fn total(&self) -> f64 {
        self.amplifier + self.fixed + self.transceiver + self.processing + self.coding
    }
}

pub fn power_breakdown(dp: &DesignPoint, hw: &HardwareProfile, ch: &ChannelGain) -> PowerBreakdown {
    PowerBreakdown {
        amplifier: dp.p / hw.kappa,
        fixed: hw.mu,
        transceiver: hw.d0 * dp.m,
        processing: hw.nu * dp.b * dp.m,
        coding: hw.eta * capacity(dp, hw, ch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dp(p: f64, b: f64, m: f64) -> DesignPoint {
        DesignPoint::new(p, b, m).unwrap()
    }

    #[test]
    fn snr_unity_by_construction() {
        let hw = HardwareProfile::baseline();
        let ch = ChannelGain::new(1e-11).unwrap();
        let b = 1e9;
        let p = b * hw.n0 / ch.beta;
        assert_relative_eq!(snr(&dp(p, b, 1.0), &hw, &ch), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn snr_baseline_point() {
        let hw = HardwareProfile::baseline();
        let ch = ChannelGain::new(1e-11).unwrap();
        let s = snr(&dp(1.0, 1e10, 6.0), &hw, &ch);
        // 6e-11 / (1e10 * 10^-20.4)
        assert_relative_eq!(s, 6e-11 / (1e10 * 10f64.powf(-20.4)), max_relative = 1e-12);
        assert!((s - 1.507).abs() < 1e-3);
    }

    #[test]
    fn snr_invariant_under_joint_scaling() {
        let hw = HardwareProfile::baseline();
        let ch = ChannelGain::default();
        let a = snr(&dp(0.7, 3e8, 4.0), &hw, &ch);
        let b = snr(&dp(1.4, 6e8, 4.0), &hw, &ch);
        assert_relative_eq!(a, b, max_relative = 1e-15);
    }

    #[test]
    fn capacity_values() {
        let hw = HardwareProfile::baseline();
        let ch = ChannelGain::new(1e-11).unwrap();
        let b = 1e9;
        let p = b * hw.n0 / ch.beta;
        assert_relative_eq!(
            capacity(&dp(p, b, 1.0), &hw, &ch),
            1e9,
            max_relative = 1e-12
        );
        assert!(capacity(&dp(1e-300, b, 1.0), &hw, &ch) < 1e-200);
        let c = capacity(&dp(1.0, 1e10, 6.0), &hw, &ch);
        assert!((c / 1.33e10 - 1.0).abs() < 5e-3, "{c}");
    }

    #[test]
    fn power_consumption_hand_value() {
        let hw = HardwareProfile::new(0.4, 0.1, 0.02, 1e-10, 0.0, 1e-20).unwrap();
        let ch = ChannelGain::default();
        let pc = power_consumption(&dp(0.4, 1e10, 6.0), &hw, &ch);
        assert_relative_eq!(pc, 7.22, max_relative = 1e-12);
    }

    #[test]
    fn power_consumption_amplifier_only() {
        let hw = HardwareProfile::new(0.25, 0.0, 0.0, 0.0, 0.0, 1e-20).unwrap();
        let ch = ChannelGain::default();
        let pc = power_consumption(&dp(0.25 * 3.0, 1e6, 2.0), &hw, &ch);
        assert_relative_eq!(pc, 3.0, max_relative = 1e-15);
    }

    #[test]
    fn power_consumption_matches_term_sum() {
        let hw = HardwareProfile::baseline();
        let ch = ChannelGain::new(1e-11).unwrap();
        let point = dp(1.0, 1e10, 6.0);
        let terms = power_breakdown(&point, &hw, &ch);
        assert_relative_eq!(
            power_consumption(&point, &hw, &ch),
            terms.total(),
            max_relative = 1e-14
        );
        assert_relative_eq!(terms.amplifier, 2.5);
        assert_relative_eq!(terms.transceiver, 0.12, max_relative = 1e-14);
        assert_relative_eq!(terms.processing, 6.0, max_relative = 1e-14);
    }

    #[test]
    fn ee_limits() {
        let hw = HardwareProfile::baseline();
        let ch = ChannelGain::default();
        assert!(energy_efficiency(&dp(1e-30, 1e9, 4.0), &hw, &ch) < 1e-10);
        let far = energy_efficiency(&dp(1.0, 1e20, 4.0), &hw, &ch);
        let near = energy_efficiency(&dp(1.0, 1e9, 4.0), &hw, &ch);
        assert!(far < near * 1e-6);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(HardwareProfile::new(1.5, 0.1, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(HardwareProfile::new(0.0, 0.1, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(HardwareProfile::new(0.5, -0.1, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(HardwareProfile::new(0.5, 0.1, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(ChannelGain::new(0.0).is_err());
        assert!(DesignPoint::new(1.0, f64::NAN, 1.0).is_err());
        assert!(Limits::new(10.0, 1e10, 0, 0.1).is_err());
        assert!(Limits::new(10.0, 1e10, 4, 0.0).is_err());
    }

    #[test]
    fn fixed_split_sums_exactly() {
        let hw =
            HardwareProfile::with_fixed_split(0.4, 0.07, 0.03, 0.02, 1e-10, 0.0, 1e-20).unwrap();
        assert_eq!(hw.mu, 0.07 + 0.03);
    }

    #[test]
    fn baseline_conversions() {
        assert_relative_eq!(Limits::baseline().p_max, 10.0, max_relative = 1e-15);
        assert_relative_eq!(
            HardwareProfile::baseline().n0,
            10f64.powf(-20.4),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            ChannelGain::from_db(-100.0).unwrap().beta,
            1e-10,
            max_relative = 1e-15
        );
    }

    fn baseline_scaled(scale: f64) -> HardwareProfile {
        let hw = HardwareProfile::baseline();
        HardwareProfile {
            mu: hw.mu * scale,
            d0: hw.d0 * scale,
            nu: hw.nu * scale,
            eta: hw.eta * scale,
            n0: hw.n0 * scale,
            ..hw
        }
    }

    proptest! {
        #[test]
        fn db_round_trip(beta_db in -200.0f64..50.0) {
            let ch = ChannelGain::from_db(beta_db).unwrap();
            let back = ChannelGain::from_db(ch.to_db()).unwrap();
            prop_assert!((back.beta / ch.beta - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn ee_times_pc_is_capacity(
            lp in -4.0f64..2.0, lb in 3.0f64..12.0, m in 1.0f64..512.0, lbeta in -14.0f64..-8.0
        ) {
            let hw = HardwareProfile::baseline();
            let ch = ChannelGain::new(10f64.powf(lbeta)).unwrap();
            let point = dp(10f64.powf(lp), 10f64.powf(lb), m);
            let lhs = energy_efficiency(&point, &hw, &ch) * power_consumption(&point, &hw, &ch);
            let c = capacity(&point, &hw, &ch);
            prop_assert!((lhs / c - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn capacity_monotone_in_p_and_m(
            p1 in 1e-4f64..10.0, p2 in 1e-4f64..10.0, m1 in 1.0f64..512.0, m2 in 1.0f64..512.0
        ) {
            let hw = HardwareProfile::baseline();
            let ch = ChannelGain::default();
            let (plo, phi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let (mlo, mhi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
            prop_assert!(capacity(&dp(plo, 1e9, m1), &hw, &ch) <= capacity(&dp(phi, 1e9, m1), &hw, &ch));
            prop_assert!(capacity(&dp(p1, 1e9, mlo), &hw, &ch) <= capacity(&dp(p1, 1e9, mhi), &hw, &ch));
        }

        #[test]
        fn ee_invariant_to_milliwatt_units(lp in -3.0f64..1.0, lb in 6.0f64..10.0, m in 1.0f64..64.0) {
            let ch = ChannelGain::default();
            let w = energy_efficiency(&dp(10f64.powf(lp), 10f64.powf(lb), m), &baseline_scaled(1.0), &ch);
            // Every power-valued input in mW; EE comes out in bit/mJ.
            let mw = energy_efficiency(
                &dp(1e3 * 10f64.powf(lp), 10f64.powf(lb), m),
                &baseline_scaled(1e3),
                &ch,
            );
            prop_assert!((mw * 1e3 / w - 1.0).abs() <= 1e-12);
        }
    }
}
