//! Numerical solvers: bisection for the optimal bandwidth, a refined
//! exhaustive grid oracle, and EE surfaces for sweeps.
//!
//! The grid oracle only ever calls [`energy_efficiency`]; it never touches
//! the closed forms, so it can be used to check them.

use rayon::prelude::*;
use serde::Serialize;

use crate::closedform::optimal_psd_ratio;
use crate::error::{ensure, Error, Result};
use crate::jointopt::{ActiveConstraints, OptimizationResult, TraceEntry};
use crate::model::{
    capacity, energy_efficiency, linear_to_db, snr, ChannelGain, DesignPoint, HardwareProfile,
    Limits,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketSearchConfig {
    /// Initial lower end of the bandwidth bracket (Hz).
    pub lower: f64,
    /// Initial upper end of the bandwidth bracket (Hz).
    pub upper: f64,
    pub expansion: f64,
    pub max_expansions: usize,
    /// Relative bracket width at which bisection stops.
    pub tolerance: f64,
}

impl Default for BracketSearchConfig {
    fn default() -> Self {
        Self {
            lower: 1e3,
            upper: 1e10,
            expansion: 10.0,
            max_expansions: 12,
            tolerance: 1e-12,
        }
    }
}

impl BracketSearchConfig {
    pub fn with_upper(upper: f64) -> Self {
        Self {
            upper,
            lower: 1e3_f64.min(upper * 1e-3),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.lower > 0.0, "lower", self.lower, "> 0")?;
        ensure(
            self.upper > self.lower && self.upper.is_finite(),
            "upper",
            self.upper,
            "> lower",
        )?;
        ensure(self.expansion > 1.0, "expansion", self.expansion, "> 1")?;
        ensure(
            self.tolerance > 0.0 && self.tolerance <= 1e-3,
            "tolerance",
            self.tolerance,
            "in (0, 1e-3]",
        )
    }
}

/// Both sides of the bandwidth stationarity equation
/// `(BN0/(MPβ)·c + c)·ln(1 + MPβ/(BN0)) = MκνB + c`, with c = κμ + κD0M + P.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    pub lhs: f64,
    pub rhs: f64,
}

impl Stationarity {
    /// Positive while EE is still increasing in B.
    pub fn g(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn relative_residual(&self) -> f64 {
        (self.g() / self.rhs).abs()
    }
}

pub fn bandwidth_stationarity(
    b: f64,
    p: f64,
    m: f64,
    hw: &HardwareProfile,
    ch: &ChannelGain,
) -> Stationarity {
    let c = hw.kappa * hw.mu + hw.d0 * m * hw.kappa + p;
    let x = m * p * ch.beta / (b * hw.n0);
    Stationarity {
        lhs: (c / x + c) * x.ln_1p(),
        rhs: m * hw.kappa * hw.nu * b + c,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthSolution {
    pub b: f64,
    /// |g(B)| / |RHS| at the returned bandwidth.
    pub residual: f64,
    pub bisection_steps: usize,
    pub expansions: usize,
}

/// Unique EE-maximizing bandwidth for fixed power and antenna count, by
/// bisection on the sign change of the stationarity function.
pub fn optimal_bandwidth(
    p: f64,
    m: f64,
    hw: &HardwareProfile,
    ch: &ChannelGain,
    cfg: &BracketSearchConfig,
) -> Result<BandwidthSolution> {
    ensure(p > 0.0 && p.is_finite(), "p", p, "> 0")?;
    ensure(m >= 1.0 && m.is_finite(), "m", m, ">= 1")?;
    cfg.validate()?;
    let g = |b: f64| bandwidth_stationarity(b, p, m, hw, ch).g();

    let (mut lo, mut hi) = (cfg.lower, cfg.upper);
    let mut expansions = 0;
    while g(lo).is_nan() || g(lo) <= 0.0 {
        if expansions == cfg.max_expansions {
            return Err(Error::BracketFailure { expansions, lo, hi });
        }
        lo /= cfg.expansion;
        expansions += 1;
    }
    let mut upward = 0;
    while g(hi).is_nan() || g(hi) >= 0.0 {
        if upward == cfg.max_expansions || !hi.is_finite() {
            return Err(Error::BracketFailure {
                expansions: expansions + upward,
                lo,
                hi,
            });
        }
        hi *= cfg.expansion;
        upward += 1;
    }
    let expansions = expansions + upward;
    assert!(g(lo) > 0.0 && g(hi) < 0.0, "bracket without sign change");

    let mut steps = 0;
    while hi / lo - 1.0 > cfg.tolerance {
        let mid = (lo * hi).sqrt();
        let gm = g(mid);
        if gm > 0.0 {
            lo = mid;
        } else if gm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
        steps += 1;
    }
    let b = (lo * hi).sqrt();
    Ok(BandwidthSolution {
        b,
        residual: bandwidth_stationarity(b, p, m, hw, ch).relative_residual(),
        bisection_steps: steps,
        expansions,
    })
}

type F64Map = fn(f64) -> f64;

/// One grid axis; log-spaced axes must have a positive lower end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub log: bool,
}

impl GridAxis {
    pub fn log(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            log: true,
        }
    }

    pub fn linear(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            log: false,
        }
    }

    pub fn single(x: f64) -> Self {
        Self::log(x, x, 1)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidGrid(format!("{name} axis: {why}")));
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return bad("need finite lo <= hi");
        }
        if self.log && self.lo <= 0.0 {
            return bad("log axis needs lo > 0");
        }
        if self.points == 1 && self.lo != self.hi {
            return bad("a single point needs lo == hi");
        }
        if self.points != 1 && self.points < 3 {
            return bad("need at least 3 points");
        }
        Ok(())
    }

    /// Grid values with both end points reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    self.lo
                } else if i == n {
                    self.hi
                } else if self.log {
                    let t = i as f64 / n as f64;
                    (self.lo.ln() + t * (self.hi / self.lo).ln()).exp()
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / n as f64
                }
            })
            .collect()
    }

    /// Axis shrunk by `factor` around `center`, shifted back inside `bounds`.
    fn zoom(&self, center: f64, factor: f64, bounds: &GridAxis) -> GridAxis {
        if self.points == 1 {
            return *self;
        }
        let (fwd, inv): (F64Map, F64Map) = if self.log {
            (f64::ln, f64::exp)
        } else {
            (|x| x, |x| x)
        };
        let half = 0.5 * (fwd(self.hi) - fwd(self.lo)) / factor;
        let (blo, bhi) = (fwd(bounds.lo), fwd(bounds.hi));
        let mut lo = fwd(center) - half;
        let mut hi = fwd(center) + half;
        if lo < blo {
            hi += blo - lo;
            lo = blo;
        }
        if hi > bhi {
            lo -= hi - bhi;
            hi = bhi;
        }
        let lo = if lo <= blo { bounds.lo } else { inv(lo) };
        let hi = if hi >= bhi { bounds.hi } else { inv(hi) };
        GridAxis { lo, hi, ..*self }
    }
}

/// Antenna axis of the oracle: every integer in a range, or a real grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AntennaGrid {
    Integer { lo: u32, hi: u32 },
    Continuous(GridAxis),
}

impl AntennaGrid {
    fn values(&self) -> Vec<f64> {
        match self {
            AntennaGrid::Integer { lo, hi } => (*lo..=*hi).map(f64::from).collect(),
            AntennaGrid::Continuous(axis) => axis.values(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOracleConfig {
    pub p: GridAxis,
    pub b: GridAxis,
    pub m: AntennaGrid,
    /// Rounds of 10x zoom around the incumbent after the initial pass.
    pub refine_rounds: usize,
}

/// Integer antenna axes are exhaustive up to this many antennas.
const EXHAUSTIVE_M_LIMIT: u32 = 1024;

impl GridOracleConfig {
    /// 50 log points over nine decades below P_max and B_max, every
    /// integer antenna count, three refinement rounds.
    pub fn for_limits(limits: &Limits) -> Self {
        let m = if limits.m_max <= EXHAUSTIVE_M_LIMIT {
            AntennaGrid::Integer {
                lo: 1,
                hi: limits.m_max,
            }
        } else {
            AntennaGrid::Continuous(GridAxis::log(1.0, limits.m_max as f64, 512))
        };
        Self {
            p: GridAxis::log(limits.p_max * 1e-9, limits.p_max, 50),
            b: GridAxis::log(limits.b_max * 1e-9, limits.b_max, 50),
            m,
            refine_rounds: 3,
        }
    }

    pub fn validate(&self, limits: &Limits) -> Result<()> {
        self.p.validate("p")?;
        self.b.validate("b")?;
        if self.p.lo <= 0.0 || self.b.lo <= 0.0 {
            return Err(Error::InvalidGrid("p and b must be positive".into()));
        }
        if self.p.hi > limits.p_max || self.b.hi > limits.b_max {
            return Err(Error::InvalidGrid("p/b ranges exceed the limits".into()));
        }
        match self.m {
            AntennaGrid::Integer { lo, hi } => {
                if lo < 1 || lo > hi || hi > limits.m_max {
                    return Err(Error::InvalidGrid(format!(
                        "integer m range {lo}..={hi} outside 1..={}",
                        limits.m_max
                    )));
                }
            }
            AntennaGrid::Continuous(axis) => {
                axis.validate("m")?;
                if axis.lo <= 0.0 || axis.hi > limits.m_max as f64 {
                    return Err(Error::InvalidGrid("m range outside (0, m_max]".into()));
                }
            }
        }
        Ok(())
    }
}

/// Best grid point by EE; ties keep the lexicographically first index.
fn grid_argmax(
    ps: &[f64],
    bs: &[f64],
    ms: &[f64],
    hw: &HardwareProfile,
    ch: &ChannelGain,
) -> (DesignPoint, f64) {
    let per_p: Vec<(DesignPoint, f64)> = ps
        .par_iter()
        .map(|&p| {
            let mut best = (
                DesignPoint {
                    p,
                    b: bs[0],
                    m: ms[0],
                },
                f64::NEG_INFINITY,
            );
            for &b in bs {
                for &m in ms {
                    let dp = DesignPoint { p, b, m };
                    let ee = energy_efficiency(&dp, hw, ch);
                    if ee > best.1 {
                        best = (dp, ee);
                    }
                }
            }
            best
        })
        .collect();
    per_p
        .into_iter()
        .fold(None, |acc: Option<(DesignPoint, f64)>, cur| match acc {
            Some(a) if a.1 >= cur.1 => Some(a),
            _ => Some(cur),
        })
        .expect("grid has at least one point")
}

/// Refined exhaustive search over (P, B, M).
pub fn brute_force_optimum(
    hw: &HardwareProfile,
    ch: &ChannelGain,
    limits: &Limits,
    cfg: &GridOracleConfig,
) -> Result<OptimizationResult> {
    limits.validate()?;
    cfg.validate(limits)?;
    let (mut p_axis, mut b_axis, mut m_axis) = (cfg.p, cfg.b, cfg.m);
    let ms_int = m_axis.values();
    let mut trace = Vec::with_capacity(cfg.refine_rounds + 1);
    let mut incumbent: Option<(DesignPoint, f64)> = None;

    for round in 0..=cfg.refine_rounds {
        let ms = match m_axis {
            AntennaGrid::Integer { .. } => ms_int.clone(),
            AntennaGrid::Continuous(axis) => axis.values(),
        };
        let (dp, ee) = grid_argmax(&p_axis.values(), &b_axis.values(), &ms, hw, ch);
        if incumbent.is_none_or(|(_, best)| ee > best) {
            incumbent = Some((dp, ee));
        }
        let (best, best_ee) = incumbent.unwrap();
        trace.push(TraceEntry {
            iteration: round,
            p: best.p,
            b: best.b,
            m: best.m,
            ee: best_ee,
        });
        p_axis = p_axis.zoom(best.p, 10.0, &cfg.p);
        b_axis = b_axis.zoom(best.b, 10.0, &cfg.b);
        if let (AntennaGrid::Continuous(axis), AntennaGrid::Continuous(bounds)) = (m_axis, cfg.m) {
            m_axis = AntennaGrid::Continuous(axis.zoom(best.m, 10.0, &bounds));
        }
    }

    let (point, ee) = incumbent.expect("at least one round");
    Ok(OptimizationResult {
        point,
        ee,
        capacity: capacity(&point, hw, ch),
        snr_db: linear_to_db(snr(&point, hw, ch)),
        active_constraints: ActiveConstraints::at(&point, limits),
        iterations: trace.len(),
        trace,
        continuous_point: point,
        branch: None,
        rejected: None,
    })
}

/// How one coordinate of a sweep surface is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceAxis {
    Fixed(f64),
    Swept(GridAxis),
    /// Power set to P = z*(M)·B from the optimal P/B ratio (power axis only).
    OptimalRatio,
}

impl SurfaceAxis {
    fn values(&self) -> Vec<f64> {
        match self {
            SurfaceAxis::Fixed(x) => vec![*x],
            SurfaceAxis::Swept(axis) => axis.values(),
            SurfaceAxis::OptimalRatio => vec![f64::NAN],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSpec {
    pub p: SurfaceAxis,
    pub b: SurfaceAxis,
    pub m: SurfaceAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceRow {
    pub p_w: f64,
    pub b_hz: f64,
    pub m: f64,
    pub ee_bit_per_j: f64,
}

/// EE over the swept axes, rows ordered lexicographically by (p, b, m) index.
pub fn ee_surface(
    spec: &SurfaceSpec,
    hw: &HardwareProfile,
    ch: &ChannelGain,
) -> Result<Vec<SurfaceRow>> {
    for (name, axis) in [("p", &spec.p), ("b", &spec.b), ("m", &spec.m)] {
        match axis {
            SurfaceAxis::Swept(a) => a.validate(name)?,
            SurfaceAxis::Fixed(x) => {
                ensure(*x > 0.0 && x.is_finite(), "fixed axis value", *x, "> 0")?
            }
            SurfaceAxis::OptimalRatio if name != "p" => {
                return Err(Error::InvalidGrid(format!(
                    "{name} axis cannot follow the optimal ratio"
                )))
            }
            SurfaceAxis::OptimalRatio => {}
        }
    }
    let (ps, bs, ms) = (spec.p.values(), spec.b.values(), spec.m.values());
    let tied = matches!(spec.p, SurfaceAxis::OptimalRatio);
    let z_by_m: Vec<f64> = if tied {
        ms.iter()
            .map(|&m| optimal_psd_ratio(m, hw, ch).map(|r| r.z_star))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let (nb, nm) = (bs.len(), ms.len());
    let rows = (0..ps.len() * nb * nm)
        .into_par_iter()
        .map(|k| {
            let (i, j, l) = (k / (nb * nm), (k / nm) % nb, k % nm);
            let (b, m) = (bs[j], ms[l]);
            let p = if tied { z_by_m[l] * b } else { ps[i] };
            let dp = DesignPoint::new(p, b, m)?;
            Ok(SurfaceRow {
                p_w: p,
                b_hz: b,
                m,
                ee_bit_per_j: energy_efficiency(&dp, hw, ch),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{optimal_antennas, optimal_power};
    use approx::assert_relative_eq;

    fn baseline() -> (HardwareProfile, ChannelGain) {
        (HardwareProfile::baseline(), ChannelGain::default())
    }

    fn ee(p: f64, b: f64, m: f64, hw: &HardwareProfile, ch: &ChannelGain) -> f64 {
        energy_efficiency(&DesignPoint { p, b, m }, hw, ch)
    }

    fn log_grid_argmax(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let axis = GridAxis::log(lo, hi, n);
        axis.values()
            .into_iter()
            .max_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap()
    }

    #[test]
    fn bandwidth_matches_dense_grid() {
        let (hw, ch) = baseline();
        let (p, m) = (10.0, 20.0);
        let sol = optimal_bandwidth(p, m, &hw, &ch, &BracketSearchConfig::default()).unwrap();
        let oracle = log_grid_argmax(|b| ee(p, b, m, &hw, &ch), 1e3, 1e16, 1_000_000);
        assert!((sol.b / oracle - 1.0).abs() < 1e-3, "{} vs {oracle}", sol.b);
    }

    #[test]
    fn bandwidth_is_local_max() {
        let (hw, ch) = baseline();
        for &(p, m) in &[(1.0, 6.0), (10.0, 20.0), (0.01, 1.0)] {
            let b = optimal_bandwidth(p, m, &hw, &ch, &BracketSearchConfig::default())
                .unwrap()
                .b;
            let at = ee(p, b, m, &hw, &ch);
            assert!(ee(p, b * (1.0 + 1e-3), m, &hw, &ch) <= at);
            assert!(ee(p, b * (1.0 - 1e-3), m, &hw, &ch) <= at);
        }
    }

    #[test]
    fn bandwidth_residual() {
        let (hw, ch) = baseline();
        let sol = optimal_bandwidth(1.0, 6.0, &hw, &ch, &BracketSearchConfig::default()).unwrap();
        assert!(sol.residual <= 1e-8, "{:e}", sol.residual);
    }

    #[test]
    fn bandwidth_bracket_expands_both_ways() {
        let (hw, ch) = baseline();
        let cfg = BracketSearchConfig {
            lower: 1e12,
            upper: 1e13,
            ..Default::default()
        };
        let sol = optimal_bandwidth(1.0, 6.0, &hw, &ch, &cfg).unwrap();
        assert!(sol.expansions > 0);
        let reference =
            optimal_bandwidth(1.0, 6.0, &hw, &ch, &BracketSearchConfig::default()).unwrap();
        assert_relative_eq!(sol.b, reference.b, max_relative = 1e-10);
    }

    #[test]
    fn bandwidth_bracket_failure_is_reported() {
        let (hw, ch) = baseline();
        let cfg = BracketSearchConfig {
            lower: 1e15,
            upper: 1e16,
            max_expansions: 1,
            ..Default::default()
        };
        match optimal_bandwidth(1.0, 6.0, &hw, &ch, &cfg) {
            Err(Error::BracketFailure { lo, hi, .. }) => assert!(lo < hi),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn stationarity_structure_on_log_grid() {
        // LHS nonincreasing in B and RHS affine in B.
        let (hw, ch) = baseline();
        let (p, m) = (1.0, 6.0);
        let bs = GridAxis::log(1e3, 1e15, 2000).values();
        let sides: Vec<_> = bs
            .iter()
            .map(|&b| bandwidth_stationarity(b, p, m, &hw, &ch))
            .collect();
        for w in sides.windows(2) {
            assert!(w[1].lhs <= w[0].lhs * (1.0 + 1e-12));
        }
        let slope = m * hw.kappa * hw.nu;
        for (b, s) in bs.iter().zip(&sides) {
            let c = s.rhs - slope * b;
            assert_relative_eq!(
                c,
                hw.kappa * hw.mu + hw.d0 * m * hw.kappa + p,
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn grid_values_hit_end_points() {
        let v = GridAxis::log(1e-9 * 10.0, 10.0, 50).values();
        assert_eq!(v.len(), 50);
        assert_eq!(*v.last().unwrap(), 10.0);
        assert_eq!(v[0], 1e-8);
        let lin = GridAxis::linear(1.0, 100.0, 100).values();
        assert!(lin.iter().enumerate().all(|(i, &x)| x == (i + 1) as f64));
    }

    #[test]
    fn zoom_stays_inside_bounds() {
        let bounds = GridAxis::log(1e-3, 10.0, 50);
        let z = bounds.zoom(10.0, 10.0, &bounds);
        assert_eq!(z.hi, 10.0);
        assert!(z.lo > 1e-3);
        assert_relative_eq!((z.hi / z.lo).log10(), 0.4, max_relative = 1e-12);
        let z = bounds.zoom(0.1, 10.0, &bounds);
        assert!(z.lo < 0.1 && z.hi > 0.1);
    }

    #[test]
    fn single_point_grid_returns_that_point() {
        let (hw, ch) = baseline();
        let limits = Limits::baseline();
        let cfg = GridOracleConfig {
            p: GridAxis::single(2.0),
            b: GridAxis::single(1e9),
            m: AntennaGrid::Integer { lo: 4, hi: 4 },
            refine_rounds: 3,
        };
        let r = brute_force_optimum(&hw, &ch, &limits, &cfg).unwrap();
        assert_eq!(
            r.point,
            DesignPoint {
                p: 2.0,
                b: 1e9,
                m: 4.0
            }
        );
        assert_eq!(r.ee, ee(2.0, 1e9, 4.0, &hw, &ch));
    }

    #[test]
    fn grid_rejects_bad_configs() {
        let (hw, ch) = baseline();
        let limits = Limits::baseline();
        let mut cfg = GridOracleConfig::for_limits(&limits);
        cfg.p.hi = 20.0;
        assert!(brute_force_optimum(&hw, &ch, &limits, &cfg).is_err());
        let mut cfg = GridOracleConfig::for_limits(&limits);
        cfg.b.points = 2;
        assert!(brute_force_optimum(&hw, &ch, &limits, &cfg).is_err());
    }

    #[test]
    fn corner_at_optimal_ratio() {
        // P_max placed exactly on the optimal P/B line at B_max.
        let (hw, ch) = baseline();
        let m = 6.0;
        let z = optimal_psd_ratio(m, &hw, &ch).unwrap().z_star;
        let b_max = 1e12;
        let limits = Limits::new(z * b_max, b_max, 6, 0.1).unwrap();
        let cfg = GridOracleConfig {
            m: AntennaGrid::Integer { lo: 6, hi: 6 },
            ..GridOracleConfig::for_limits(&limits)
        };
        let r = brute_force_optimum(&hw, &ch, &limits, &cfg).unwrap();
        assert!(
            r.active_constraints.p_max && r.active_constraints.b_max,
            "{:?}",
            r.point
        );
    }

    #[test]
    fn closed_form_outputs_match_refined_oracle() {
        let (hw, ch) = baseline();
        let oracle = |cfg: GridOracleConfig| {
            let limits = Limits::new(cfg.p.hi, cfg.b.hi, 1 << 20, 0.1).unwrap();
            brute_force_optimum(&hw, &ch, &limits, &cfg).unwrap().point
        };
        let p = optimal_power(1e10, 6.0, &hw, &ch).unwrap().p;
        let o = oracle(GridOracleConfig {
            p: GridAxis::log(1e-9, 1e6, 300),
            b: GridAxis::single(1e10),
            m: AntennaGrid::Continuous(GridAxis::single(6.0)),
            refine_rounds: 3,
        });
        assert!((p / o.p - 1.0).abs() < 2e-3);
        let m = optimal_antennas(1e10, 10.0, &hw, &ch).unwrap().m;
        let o = oracle(GridOracleConfig {
            p: GridAxis::single(10.0),
            b: GridAxis::single(1e10),
            m: AntennaGrid::Continuous(GridAxis::log(1e-3, 1e6, 300)),
            refine_rounds: 3,
        });
        assert!((m / o.m - 1.0).abs() < 2e-3);
    }

    #[test]
    fn surface_single_cell() {
        let (hw, ch) = baseline();
        let spec = SurfaceSpec {
            p: SurfaceAxis::Fixed(1.0),
            b: SurfaceAxis::Fixed(1e9),
            m: SurfaceAxis::Fixed(3.0),
        };
        let rows = ee_surface(&spec, &hw, &ch).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].ee_bit_per_j, ee(1.0, 1e9, 3.0, &hw, &ch));
    }

    #[test]
    fn surface_order_and_count() {
        let (hw, ch) = baseline();
        let spec = SurfaceSpec {
            p: SurfaceAxis::Swept(GridAxis::log(0.1, 10.0, 4)),
            b: SurfaceAxis::Swept(GridAxis::log(1e8, 1e10, 3)),
            m: SurfaceAxis::Swept(GridAxis::linear(1.0, 5.0, 5)),
        };
        let rows = ee_surface(&spec, &hw, &ch).unwrap();
        assert_eq!(rows.len(), 60);
        assert_eq!(rows[1].m, 2.0);
        assert_eq!(rows[5].b_hz, rows[6].b_hz);
        assert!(rows[15].p_w > rows[14].p_w);
        for r in &rows {
            let direct = ee(r.p_w, r.b_hz, r.m, &hw, &ch);
            assert!((r.ee_bit_per_j / direct - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn surface_rejects_ratio_on_other_axes() {
        let (hw, ch) = baseline();
        let spec = SurfaceSpec {
            p: SurfaceAxis::Fixed(1.0),
            b: SurfaceAxis::OptimalRatio,
            m: SurfaceAxis::Fixed(1.0),
        };
        assert!(ee_surface(&spec, &hw, &ch).is_err());
    }

    #[test]
    fn figure1_sweep_maxima() {
        let hw = HardwareProfile::baseline();
        for (db, expected) in [(-100.0, 2.0), (-110.0, 6.0), (-120.0, 20.0)] {
            let ch = ChannelGain::from_db(db).unwrap();
            let spec = SurfaceSpec {
                p: SurfaceAxis::OptimalRatio,
                b: SurfaceAxis::Fixed(1e10),
                m: SurfaceAxis::Swept(GridAxis::linear(1.0, 100.0, 100)),
            };
            let rows = ee_surface(&spec, &hw, &ch).unwrap();
            let best = rows
                .iter()
                .max_by(|a, b| a.ee_bit_per_j.total_cmp(&b.ee_bit_per_j))
                .unwrap();
            assert_eq!(best.m, expected);
        }
    }
}
