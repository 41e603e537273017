//! Joint EE maximization over (P, B, M) under box constraints.
//!
//! The constrained optimum always has P = P_max or B = B_max, so each
//! iteration solves the power problem at B_max and the bandwidth problem at
//! P_max, keeps the better of the two, then updates the (real-valued)
//! antenna count. Once the ascent stalls the two integers around M are
//! tried, each with its own boundary choice of (P, B).

use std::fmt;

use serde::Serialize;

use crate::closedform::{optimal_antennas, optimal_power, power_per_antenna_ratio};
use crate::error::{Error, Result};
use crate::model::{
    capacity, energy_efficiency, linear_to_db, snr, ChannelGain, DesignPoint, HardwareProfile,
    Limits,
};
use crate::numericopt::{bandwidth_stationarity, optimal_bandwidth, BracketSearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub p: f64,
    pub b: f64,
    pub m: f64,
    pub ee: f64,
}

/// Which variable the boundary step pinned at its maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// P = P_max, bandwidth from bisection.
    MaxPower,
    /// B = B_max, power from the closed form.
    MaxBandwidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ActiveConstraints {
    pub p_max: bool,
    pub b_max: bool,
    pub m_max: bool,
}

impl ActiveConstraints {
    pub fn at(dp: &DesignPoint, limits: &Limits) -> Self {
        Self {
            p_max: dp.p >= limits.p_max,
            b_max: dp.b >= limits.b_max,
            m_max: dp.m >= limits.m_max as f64,
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        [
            (self.p_max, "p_max"),
            (self.b_max, "b_max"),
            (self.m_max, "m_max"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect()
    }
}

/// One integer-M candidate considered during finalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub point: DesignPoint,
    pub ee: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    /// Finalized operating point; `m` is an integer.
    pub point: DesignPoint,
    /// bit/J
    pub ee: f64,
    /// bit/s
    pub capacity: f64,
    pub snr_db: f64,
    pub active_constraints: ActiveConstraints,
    pub trace: Vec<TraceEntry>,
    pub iterations: usize,
    /// Point the ascent converged to before M was rounded.
    pub continuous_point: DesignPoint,
    /// Branch kept for the returned point (None for grid-oracle results).
    pub branch: Option<Branch>,
    /// The integer candidate that lost during finalization, if distinct.
    pub rejected: Option<Candidate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOptions {
    pub max_iterations: usize,
    /// Also stop when an iteration improves EE by at most this fraction.
    pub rel_tol: f64,
    /// Bracket for the bandwidth bisection; the upper end is replaced by B_max.
    pub bracket: BracketSearchConfig,
}

impl Default for JointOptions {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            rel_tol: 1e-10,
            bracket: BracketSearchConfig::default(),
        }
    }
}

/// Runs the joint optimizer with default options.
pub fn joint_optimize(
    hw: &HardwareProfile,
    ch: &ChannelGain,
    limits: &Limits,
) -> Result<OptimizationResult> {
    joint_optimize_with(hw, ch, limits, &JointOptions::default())
}

pub fn joint_optimize_with(
    hw: &HardwareProfile,
    ch: &ChannelGain,
    limits: &Limits,
    opts: &JointOptions,
) -> Result<OptimizationResult> {
    hw.validate()?;
    limits.validate()?;
    let solver = Boundary {
        hw,
        ch,
        limits,
        bracket: BracketSearchConfig {
            upper: limits.b_max,
            lower: opts.bracket.lower.min(limits.b_max * 1e-3),
            ..opts.bracket
        },
    };

    let mut m = 1.0;
    let mut previous = 0.0;
    let mut trace = Vec::new();
    let mut converged = false;
    for iteration in 1..=opts.max_iterations {
        let step = solver.best_for(m)?;
        let m_next = optimal_antennas(step.point.b, step.point.p, hw, ch)?
            .m
            .clamp(1.0, limits.m_max as f64);
        let point = DesignPoint {
            m: m_next,
            ..step.point
        };
        let ee = energy_efficiency(&point, hw, ch);
        if ee < previous * (1.0 - 1e-12) {
            return Err(Error::AscentViolation {
                iteration,
                previous,
                current: ee,
            });
        }
        trace.push(TraceEntry {
            iteration,
            p: point.p,
            b: point.b,
            m: point.m,
            ee,
        });
        let gain = ee - previous;
        m = m_next;
        previous = ee;
        if gain <= limits.delta || gain <= opts.rel_tol * ee {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: opts.max_iterations,
            trace,
        });
    }

    let last = trace.last().expect("at least one iteration");
    let continuous_point = DesignPoint {
        p: last.p,
        b: last.b,
        m: last.m,
    };
    let lo = m.floor().max(1.0);
    let hi = m.ceil().min(limits.m_max as f64);
    let first = solver.best_for(lo)?;
    let (chosen, rejected) = if hi == lo {
        (first, None)
    } else {
        let second = solver.best_for(hi)?;
        if second.ee > first.ee {
            (second, Some(first))
        } else {
            (first, Some(second))
        }
    };

    let point = chosen.point;
    Ok(OptimizationResult {
        point,
        ee: energy_efficiency(&point, hw, ch),
        capacity: capacity(&point, hw, ch),
        snr_db: linear_to_db(snr(&point, hw, ch)),
        active_constraints: ActiveConstraints::at(&point, limits),
        iterations: trace.len(),
        trace,
        continuous_point,
        branch: Some(chosen.branch),
        rejected,
    })
}

struct Boundary<'a> {
    hw: &'a HardwareProfile,
    ch: &'a ChannelGain,
    limits: &'a Limits,
    bracket: BracketSearchConfig,
}

impl Boundary<'_> {
    /// Best of the B = B_max and P = P_max faces for a fixed antenna count.
    /// Equal EE keeps the P = P_max branch.
    fn best_for(&self, m: f64) -> Result<Candidate> {
        let (hw, ch, limits) = (self.hw, self.ch, self.limits);

        let power = optimal_power(limits.b_max, m, hw, ch)?;
        if let Some(d) = power.degenerate {
            return Err(Error::Degenerate(d));
        }
        let at_b_max = DesignPoint {
            p: power.p.min(limits.p_max),
            b: limits.b_max,
            m,
        };

        // EE still rising at B_max means the stationary bandwidth lies beyond it.
        let b = if bandwidth_stationarity(limits.b_max, limits.p_max, m, hw, ch).g() >= 0.0 {
            limits.b_max
        } else {
            optimal_bandwidth(limits.p_max, m, hw, ch, &self.bracket)?
                .b
                .min(limits.b_max)
        };
        let at_p_max = DesignPoint {
            p: limits.p_max,
            b,
            m,
        };

        let ee_p_max = energy_efficiency(&at_p_max, hw, ch);
        let ee_b_max = energy_efficiency(&at_b_max, hw, ch);
        Ok(if ee_p_max >= ee_b_max {
            Candidate {
                point: at_p_max,
                ee: ee_p_max,
                branch: Branch::MaxPower,
            }
        } else {
            Candidate {
                point: at_b_max,
                ee: ee_b_max,
                branch: Branch::MaxBandwidth,
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    PowerLimited,
    BandwidthLimited,
    PowerAndBandwidthLimited,
    /// Neither P nor B at its limit; only possible for non-optimal points.
    Interior,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::PowerLimited => "power-limited",
            Regime::BandwidthLimited => "bandwidth-limited",
            Regime::PowerAndBandwidthLimited => "power- and bandwidth-limited",
            Regime::Interior => "interior",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub regime: Regime,
    pub branch: Option<Branch>,
    /// Transmit power per antenna at the returned point (W).
    pub power_per_antenna_w: f64,
    /// κ(D0 + νB) at the returned bandwidth (W).
    pub interior_ratio_w: f64,
    /// power_per_antenna / interior_ratio - 1.
    pub ratio_gap: f64,
}

impl fmt::Display for BoundaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: P/M = {:.4e} W vs kappa*(D0+nu*B) = {:.4e} W (gap {:+.2}%)",
            self.regime,
            self.power_per_antenna_w,
            self.interior_ratio_w,
            100.0 * self.ratio_gap
        )
    }
}

/// Classifies which limit the optimum sits on and how far P/M is from the
/// interior power-per-antenna ratio.
pub fn boundary_diagnosis(result: &OptimizationResult, hw: &HardwareProfile) -> BoundaryReport {
    let a = result.active_constraints;
    let regime = match (a.p_max, a.b_max) {
        (true, true) => Regime::PowerAndBandwidthLimited,
        (true, false) => Regime::PowerLimited,
        (false, true) => Regime::BandwidthLimited,
        (false, false) => Regime::Interior,
    };
    let per_antenna = result.point.p / result.point.m;
    let target = power_per_antenna_ratio(result.point.b, hw).unwrap_or(f64::NAN);
    BoundaryReport {
        regime,
        branch: result.branch,
        power_per_antenna_w: per_antenna,
        interior_ratio_w: target,
        ratio_gap: per_antenna / target - 1.0,
    }
}
