//! Lower and upper capacity bounds for the symmetric Gaussian C-RAN downlink,
//! and the fronthaul thresholds at which they provably coincide.
//!
//! All rates are in bits per channel use with unit-variance receiver noise.
//!
//! The lower bound maximizes over the input correlation `rho` the minimum of
//! a fronthaul constraint (total fronthaul minus the inputs' multi-information)
//! and the coherent MAC rate. The upper bound, for each `rho`, takes the
//! infimum over auxiliary noise variances `N` of the largest `R` satisfying
//! the implicit constraint `R <= ub_rhs(R, rho, N)`, caps it with the coherent
//! MAC rate, and maximizes over `rho`.

use std::f64::consts::LN_2;
use std::fmt;

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::gaussian::gaussian_multi_information;
use crate::solve::{bisect, golden_max, safeguarded_newton};

/// Symmetric Gaussian network: `M` relays of power `P`, each fed by a
/// fronthaul link of capacity `C` bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianNetwork {
    relays: usize,
    power: f64,
    fronthaul: f64,
}

impl GaussianNetwork {
    pub fn new(relays: usize, power: f64, fronthaul: f64) -> Result<Self> {
        if relays < 2 {
            return domain(format!("need at least 2 relays, got {relays}"));
        }
        if !(power > 0.0 && power.is_finite()) {
            return domain(format!("power {power} must be positive and finite"));
        }
        if !(fronthaul >= 0.0 && fronthaul.is_finite()) {
            return domain(format!("fronthaul capacity {fronthaul} must be non-negative"));
        }
        Ok(Self {
            relays,
            power,
            fronthaul,
        })
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn fronthaul(&self) -> f64 {
        self.fronthaul
    }

    /// `M * C`, the fronthaul cut.
    pub fn total_fronthaul(&self) -> f64 {
        self.relays as f64 * self.fronthaul
    }

    /// `(1/2) log2(1 + M^2 P)`, the fully coherent MAC rate.
    pub fn full_cooperation(&self) -> f64 {
        let m = self.relays as f64;
        0.5 * (m * m * self.power).ln_1p() / LN_2
    }

    fn m(&self) -> f64 {
        self.relays as f64
    }

    /// `(1/2) log2(1 + P M (1 + (M - 1) rho))`.
    pub fn coherent_rate(&self, rho: f64) -> f64 {
        let m = self.m();
        0.5 * (self.power * m * (1.0 + (m - 1.0) * rho)).ln_1p() / LN_2
    }
}

/// Solver tolerances and search grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Absolute residual for every root solve, in bits.
    pub residual_tol: f64,
    /// Width at which golden-section refinement of `rho` stops.
    pub rho_tol: f64,
    /// Number of `rho` grid points on `[0, 1]`.
    pub rho_grid: usize,
    /// Number of log-spaced auxiliary noise variances.
    pub n_grid: usize,
    pub n_min: f64,
    pub n_max: f64,
    /// How many local maxima of the `rho` grid get refined.
    pub refine_peaks: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            rho_tol: 1e-7,
            rho_grid: 512,
            n_grid: 64,
            n_min: 1e-6,
            n_max: 1e6,
            refine_peaks: 3,
        }
    }
}

/// The two lower-bound constraints at correlation `rho`:
/// `(M C - I(X_M), (1/2) log2(1 + P M (1 + (M - 1) rho)))`.
pub fn lb_constraints(net: &GaussianNetwork, rho: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&rho) {
        return domain(format!("correlation {rho} outside [0, 1)"));
    }
    let penalty = gaussian_multi_information(net.relays, rho)?;
    Ok((net.total_fronthaul() - penalty, net.coherent_rate(rho)))
}

/// Which lower-bound constraint limits the rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbBinding {
    /// Independent inputs already exhaust the fronthaul: `rate = M C`.
    Fronthaul,
    /// Both constraints are equal at the optimal correlation.
    Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundResult {
    pub rate: f64,
    pub rho_l: f64,
    pub binding: LbBinding,
    /// `|c1 - c2|` at `rho_l` for a crossing, zero otherwise.
    pub solver_residual: f64,
}

pub fn lower_bound(net: &GaussianNetwork) -> LowerBoundResult {
    lower_bound_with(net, &SolverConfig::default())
}

pub fn lower_bound_with(net: &GaussianNetwork, cfg: &SolverConfig) -> LowerBoundResult {
    let mc = net.total_fronthaul();
    if mc <= net.coherent_rate(0.0) {
        return LowerBoundResult {
            rate: mc,
            rho_l: 0.0,
            binding: LbBinding::Fronthaul,
            solver_residual: 0.0,
        };
    }
    // Solve in u = -ln(1 - rho) so correlations within 1e-300 of one stay
    // resolvable.
    let m = net.m();
    let gap = |u: f64| {
        let rho = -(-u).exp_m1();
        let log_det = -(m - 1.0) * u + ((m - 1.0) * rho).ln_1p();
        mc + 0.5 * log_det / LN_2 - net.coherent_rate(rho)
    };
    let mut hi = 1.0;
    while gap(hi) > 0.0 && hi < 700.0 {
        hi *= 2.0;
    }
    let root = bisect(gap, 0.0, hi.min(700.0), cfg.residual_tol);
    let rho_l = -(-root.x).exp_m1();
    LowerBoundResult {
        rate: net.coherent_rate(rho_l),
        rho_l,
        binding: LbBinding::Crossing,
        solver_residual: root.residual,
    }
}

/// `log2(2^(2R) + N)` without overflow for large `R`.
fn log2_exp_plus(r: f64, noise: f64) -> f64 {
    2.0 * r + (noise * (-2.0 * r * LN_2).exp()).ln_1p() / LN_2
}

/// Right-hand side of the implicit upper-bound constraint `R <= ub_rhs(R)`:
///
/// `M C - (M-1)/2 log2(2^(2R) + N) - 1/2 log2(1 + N)
///  + M/2 log2(1 + N + P (M-1)(1-rho)(1+(M-1)rho))`.
pub fn ub_rhs(net: &GaussianNetwork, rate: f64, rho: f64, noise: f64) -> f64 {
    let m = net.m();
    let spread = net.power * (m - 1.0) * (1.0 - rho) * (1.0 + (m - 1.0) * rho);
    net.total_fronthaul() - 0.5 * (m - 1.0) * log2_exp_plus(rate, noise)
        - 0.5 * noise.ln_1p() / LN_2
        + 0.5 * m * (noise + spread).ln_1p() / LN_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub rate: f64,
    pub residual: f64,
}

/// The unique `R*` with `R* = ub_rhs(R*)`; the constraint holds iff `R <= R*`.
pub fn ub_fixed_point(net: &GaussianNetwork, rho: f64, noise: f64) -> FixedPoint {
    ub_fixed_point_tol(net, rho, noise, SolverConfig::default().residual_tol)
}

fn ub_fixed_point_tol(net: &GaussianNetwork, rho: f64, noise: f64, tol: f64) -> FixedPoint {
    let m = net.m();
    let hi = net.total_fronthaul()
        + 0.5 * m * (noise + m * m * net.power).ln_1p() / LN_2;
    let h = |r: f64| {
        let slope = -(m - 1.0) / (1.0 + noise * (-2.0 * r * LN_2).exp()) - 1.0;
        (ub_rhs(net, r, rho, noise) - r, slope)
    };
    let root = safeguarded_newton(h, 0.0, hi, tol);
    FixedPoint {
        rate: root.x,
        residual: root.residual,
    }
}

/// Auxiliary noise variance that makes equicorrelated Gaussian inputs
/// conditionally independent given `U = Y + Z_N`:
/// `N = P (1 - rho)(1 + (M - 1) rho) / rho - 1`.
///
/// May be negative; callers must reject `N < 0`.
pub fn n_choice(relays: usize, power: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return domain(format!("correlation {rho} outside (0, 1]"));
    }
    let m = relays as f64;
    Ok(power * (1.0 - rho) * (1.0 + (m - 1.0) * rho) / rho - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridStats {
    pub rho_grid: usize,
    pub n_grid: usize,
    pub rho_resolution: f64,
    pub refined_peaks: usize,
    pub fixed_point_solves: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBoundResult {
    pub rate: f64,
    pub rho_star: f64,
    /// Minimizing auxiliary noise variance; `+inf` when the `N -> inf` limit
    /// (the fronthaul cut `M C`) is the binding member.
    pub n_star: f64,
    /// True when the coherent MAC cap, not the auxiliary constraint, binds.
    pub cut_binding: bool,
    pub grid_stats: GridStats,
}

struct InnerInf {
    value: f64,
    noise: f64,
}

struct UpperSearch<'a> {
    net: &'a GaussianNetwork,
    cfg: &'a SolverConfig,
    grid: Vec<f64>,
    extra: Vec<f64>,
    solves: usize,
}

impl UpperSearch<'_> {
    fn fixed_point(&mut self, rho: f64, noise: f64) -> f64 {
        self.solves += 1;
        ub_fixed_point_tol(self.net, rho, noise, self.cfg.residual_tol).rate
    }

    /// Infimum over the candidate noise set of the fixed point at `rho`.
    fn inner(&mut self, rho: f64, refine: bool) -> InnerInf {
        let mut best = InnerInf {
            value: self.net.total_fronthaul(),
            noise: f64::INFINITY,
        };
        let mut best_grid = None;
        for k in 0..self.grid.len() {
            let noise = self.grid[k];
            let v = self.fixed_point(rho, noise);
            if v < best.value {
                best = InnerInf { value: v, noise };
                best_grid = Some(k);
            }
        }
        let mut candidates = self.extra.clone();
        if rho > 0.0 {
            if let Ok(n) = n_choice(self.net.relays, self.net.power, rho) {
                if n >= 0.0 {
                    candidates.push(n);
                }
            }
        }
        for noise in candidates {
            let v = self.fixed_point(rho, noise);
            if v < best.value {
                best = InnerInf { value: v, noise };
                best_grid = None;
            }
        }
        if refine {
            if let Some(k) = best_grid.filter(|&k| k > 0) {
                // grid[0] is N = 0; refine in ln N between the neighbours
                let lo = self.grid[k - 1].max(self.cfg.n_min * 1e-3).ln();
                let hi = self.grid[(k + 1).min(self.grid.len() - 1)].ln();
                let m = golden_max(|t| -self.fixed_point(rho, t.exp()), lo, hi, 1e-9);
                if -m.value < best.value {
                    best = InnerInf {
                        value: -m.value,
                        noise: m.x.exp(),
                    };
                }
            }
        }
        best
    }

    fn objective(&mut self, rho: f64, refine: bool) -> (f64, InnerInf) {
        let cap = self.net.coherent_rate(rho);
        let inner = self.inner(rho, refine);
        (cap.min(inner.value), inner)
    }
}

pub fn upper_bound(net: &GaussianNetwork) -> UpperBoundResult {
    upper_bound_with(net, &SolverConfig::default())
}

pub fn upper_bound_with(net: &GaussianNetwork, cfg: &SolverConfig) -> UpperBoundResult {
    let lb = lower_bound_with(net, cfg);
    let mut grid = vec![0.0];
    let n_grid = cfg.n_grid.max(2);
    let (ln_lo, ln_hi) = (cfg.n_min.ln(), cfg.n_max.ln());
    grid.extend(
        (0..n_grid).map(|k| (ln_lo + (ln_hi - ln_lo) * k as f64 / (n_grid - 1) as f64).exp()),
    );
    let mut extra = Vec::new();
    if lb.rho_l > 0.0 {
        if let Ok(n) = n_choice(net.relays, net.power, lb.rho_l) {
            if n >= 0.0 {
                extra.push(n);
            }
        }
    }
    let mut search = UpperSearch {
        net,
        cfg,
        grid,
        extra,
        solves: 0,
    };

    // Coarse scan from rho = 1 downward. The coherent cap is increasing in
    // rho, so once it drops below the best value every smaller rho is
    // dominated.
    let points = cfg.rho_grid.max(2);
    let rhos: Vec<f64> = (0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect();
    let mut values = vec![f64::NEG_INFINITY; points];
    let mut best = (f64::NEG_INFINITY, 0.0, f64::INFINITY, false);
    for k in (0..points).rev() {
        let rho = rhos[k];
        let cap = net.coherent_rate(rho);
        if cap <= best.0 {
            values[k] = cap;
            break;
        }
        let (v, inner) = search.objective(rho, false);
        values[k] = v;
        if v > best.0 {
            best = (v, rho, inner.noise, cap < inner.value);
        }
    }

    let mut peaks: Vec<usize> = (0..points)
        .filter(|&k| values[k].is_finite())
        .filter(|&k| {
            (k == 0 || values[k] >= values[k - 1])
                && (k + 1 == points || values[k] >= values[k + 1])
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(cfg.refine_peaks);

    let consider = |search: &mut UpperSearch, rho: f64, best: &mut (f64, f64, f64, bool)| {
        let (v, inner) = search.objective(rho, true);
        if v > best.0 {
            let cap = net.coherent_rate(rho);
            *best = (v, rho, inner.noise, cap < inner.value);
        }
    };
    for &k in &peaks {
        let lo = rhos[k.saturating_sub(1)];
        let hi = rhos[(k + 1).min(points - 1)];
        let m = golden_max(|rho| search.objective(rho, true).0, lo, hi, cfg.rho_tol);
        consider(&mut search, m.x, &mut best);
    }
    consider(&mut search, lb.rho_l, &mut best);

    UpperBoundResult {
        rate: best.0.max(0.0),
        rho_star: best.1,
        n_star: best.2,
        cut_binding: best.3,
        grid_stats: GridStats {
            rho_grid: points,
            n_grid,
            rho_resolution: cfg.rho_tol,
            refined_peaks: peaks.len(),
            fixed_point_solves: search.solves,
        },
    }
}

/// Where a fronthaul capacity falls relative to the tightness thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `C <= C_C`: capacity is `M C`.
    CutsetTight,
    /// `C_C < C < C_L`.
    GapUnknownLow,
    /// `C_L <= C <= C_U`: lower and upper bounds coincide.
    WindowTight,
    /// Above the tight window and below full cooperation.
    GapUnknownHigh,
    /// `C >= C_coop`: capacity is the fully coherent MAC rate.
    FullCoopTight,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::CutsetTight => "cutset-tight",
            Regime::GapUnknownLow => "gap-unknown-low",
            Regime::WindowTight => "thm5-tight",
            Regime::GapUnknownHigh => "gap-unknown-high",
            Regime::FullCoopTight => "full-coop-tight",
        }
    }

    /// Whether the lower and upper bounds computed here are predicted to meet.
    pub fn bounds_meet(&self) -> bool {
        matches!(self, Regime::CutsetTight | Regime::WindowTight)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub relays: usize,
    pub power: f64,
    pub c_c: f64,
    pub c_l: f64,
    pub c_u: f64,
    pub c_coop: f64,
    pub rho2: f64,
}

impl RegimeReport {
    /// True when `C_L <= C_U`, i.e. the tight window is non-empty.
    pub fn has_window(&self) -> bool {
        self.c_l <= self.c_u
    }

    pub fn classify(&self, fronthaul: f64) -> Regime {
        if fronthaul <= self.c_c {
            Regime::CutsetTight
        } else if self.c_l <= fronthaul && fronthaul <= self.c_u {
            Regime::WindowTight
        } else if fronthaul >= self.c_coop {
            Regime::FullCoopTight
        } else if fronthaul < self.c_l {
            Regime::GapUnknownLow
        } else {
            Regime::GapUnknownHigh
        }
    }
}

pub fn regimes(relays: usize, power: f64) -> Result<RegimeReport> {
    // validates M >= 2 and P > 0
    GaussianNetwork::new(relays, power, 0.0)?;
    let m = relays as f64;
    let p = power;
    let log2 = |x: f64| x.log2();
    let scale = 1.0 / (2.0 * m);
    let c_c = scale * (p * m).ln_1p() / LN_2;
    let c_l = scale
        * log2((1.0 + m * m * p / 2.0) / ((m / (2.0 * (m - 1.0))).powf(m - 1.0) * m / 2.0));
    let b = m - 2.0 - 1.0 / p;
    let rho2 = (b + (b * b + 4.0 * (m - 1.0)).sqrt()) / (2.0 * (m - 1.0));
    let c_u = scale
        * log2(
            (1.0 + m * p * (1.0 + (m - 1.0) * rho2))
                / ((1.0 - rho2).powf(m - 1.0) * (1.0 + (m - 1.0) * rho2)),
        );
    let c_coop = 0.5 * (m * m * p).ln_1p() / LN_2;
    Ok(RegimeReport {
        relays,
        power,
        c_c,
        c_l,
        c_u,
        c_coop,
        rho2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessReport {
    pub lower: f64,
    pub upper: f64,
    /// `upper - lower`.
    pub gap: f64,
    /// `gap <= tol`.
    pub tight: bool,
    /// Whether the thresholds predict the bounds meet at this `C`.
    pub predicted: bool,
}

impl TightnessReport {
    /// False only when tightness was predicted but the solvers disagree.
    pub fn consistent(&self) -> bool {
        !self.predicted || self.tight
    }
}

pub fn tightness_check(net: &GaussianNetwork, tol: f64) -> Result<TightnessReport> {
    if !(tol > 0.0) {
        return domain(format!("tolerance {tol} must be positive"));
    }
    let report = regimes(net.relays, net.power)?;
    let lower = lower_bound(net).rate;
    let upper = upper_bound(net).rate;
    let gap = upper - lower;
    Ok(TightnessReport {
        lower,
        upper,
        gap,
        tight: gap <= tol,
        predicted: report.classify(net.fronthaul).bounds_meet(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub fronthaul: f64,
    pub lower: LowerBoundResult,
    pub upper: UpperBoundResult,
    pub regime: Regime,
}

/// Both bounds at every fronthaul value, in input order.
pub fn sweep(
    relays: usize,
    power: f64,
    fronthauls: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<SweepRow>> {
    let report = regimes(relays, power)?;
    let nets = fronthauls
        .iter()
        .map(|&c| GaussianNetwork::new(relays, power, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(nets
        .par_iter()
        .map(|net| SweepRow {
            fronthaul: net.fronthaul,
            lower: lower_bound_with(net, cfg),
            upper: upper_bound_with(net, cfg),
            regime: report.classify(net.fronthaul),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(m: usize, p: f64, c: f64) -> GaussianNetwork {
        GaussianNetwork::new(m, p, c).unwrap()
    }

    #[test]
    fn constraints_at_independence() {
        let n = net(4, 2.0, 0.7);
        let (c1, c2) = lb_constraints(&n, 0.0).unwrap();
        assert!((c1 - 2.8).abs() < 1e-14);
        assert!((c2 - 0.5 * 9f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn constraints_hand_values() {
        let (c1, c2) = lb_constraints(&net(3, 1.0, 1.0), 0.5).unwrap();
        assert!((c1 - 2.5).abs() < 1e-12);
        assert!((c2 - 0.5 * 7f64.log2()).abs() < 1e-12);
        assert!((c2 - 1.4037).abs() < 1e-4);
        let (c1, c2) = lb_constraints(&net(2, 1.0, 0.5), 0.5).unwrap();
        assert!((c1 - (1.0 - 0.5 * (4.0f64 / 3.0).log2())).abs() < 1e-12);
        assert!((c2 - 1.0).abs() < 1e-12);
        assert!(lb_constraints(&net(2, 1.0, 0.5), 1.0).is_err());
    }

    #[test]
    fn lower_bound_fronthaul_branch() {
        let lb = lower_bound(&net(3, 1.0, 0.3));
        assert_eq!(lb.rho_l, 0.0);
        assert_eq!(lb.binding, LbBinding::Fronthaul);
        assert!((lb.rate - 0.9).abs() < 1e-15);
        assert_eq!(lower_bound(&net(3, 1.0, 0.0)).rate, 0.0);
    }

    #[test]
    fn lower_bound_crossing_residual() {
        let lb = lower_bound(&net(2, 1.0, 10.0));
        assert_eq!(lb.binding, LbBinding::Crossing);
        assert!(lb.solver_residual <= 1e-10);
        assert!(lb.rate < 0.5 * 5f64.log2());
        assert!(lb.rate > 0.5 * 5f64.log2() - 1e-6);
    }

    #[test]
    fn lower_bound_survives_huge_fronthaul() {
        let lb = lower_bound(&net(3, 2.0, 200.0));
        assert!(lb.rate.is_finite());
        assert!(lb.rate <= net(3, 2.0, 200.0).full_cooperation());
    }

    #[test]
    fn rhs_hand_value_and_limits() {
        let n = net(2, 1.0, 1.0);
        assert!((ub_rhs(&n, 0.0, 0.0, 0.0) - 3.0).abs() < 1e-14);
        assert!((ub_rhs(&n, 0.7, 0.3, 1e12) - 2.0).abs() < 1e-3);
        let m = 2.0;
        let (r, noise) = (0.4, 2.5);
        let expect = 2.0 - (m - 1.0) * 0.5 * (2f64.powf(2.0 * r) + noise).log2()
            - 0.5 * (1.0 + noise).log2()
            + m / 2.0 * (1.0 + noise).log2();
        assert!((ub_rhs(&n, r, 1.0, noise) - expect).abs() < 1e-13);
    }

    #[test]
    fn fixed_point_solves_its_equation() {
        let n = net(3, 2.0, 0.8);
        for &(rho, noise) in &[(0.0, 0.0), (0.5, 1.0), (0.9, 1e4), (1.0, 3.0)] {
            let fp = ub_fixed_point(&n, rho, noise);
            assert!(fp.residual <= 1e-10);
            assert!((ub_rhs(&n, fp.rate, rho, noise) - fp.rate).abs() <= 1e-10);
        }
        let far = ub_fixed_point(&n, 0.3, 1e12);
        assert!((far.rate - 2.4).abs() < 1e-3);
    }

    #[test]
    fn n_choice_values() {
        assert_eq!(n_choice(3, 1.0, 1.0).unwrap(), -1.0);
        assert!((n_choice(2, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(n_choice(2, 1.0, 1e-9).unwrap() > 1e8);
        assert!(n_choice(2, 1.0, 0.0).is_err());
    }

    #[test]
    fn regimes_closed_forms() {
        let r = regimes(3, 1.0).unwrap();
        assert!((r.c_c - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.rho2 - 8f64.sqrt() / 4.0).abs() < 1e-12);
        assert!((r.c_coop - 0.5 * 10f64.log2()).abs() < 1e-12);
        assert!((r.c_l - 0.4507).abs() < 2e-4);
        assert!((r.c_u - 0.8858).abs() < 1e-4);
        let r2 = regimes(2, 1.0).unwrap();
        assert!((r2.rho2 - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        assert!(regimes(1, 1.0).is_err());
    }

    #[test]
    fn classification() {
        let r = regimes(3, 1.0).unwrap();
        assert_eq!(r.classify(0.2), Regime::CutsetTight);
        assert_eq!(r.classify(0.4), Regime::GapUnknownLow);
        assert_eq!(r.classify(0.6), Regime::WindowTight);
        assert_eq!(r.classify(1.2), Regime::GapUnknownHigh);
        assert_eq!(r.classify(2.0), Regime::FullCoopTight);
        // M=3, P=0.1 has an empty window
        let thin = regimes(3, 0.1).unwrap();
        assert!(!thin.has_window());
        assert_eq!(thin.classify(0.1), Regime::GapUnknownLow);
    }

    #[test]
    fn upper_bound_small_cases() {
        let zero = upper_bound(&net(3, 1.0, 0.0));
        assert_eq!(zero.rate, 0.0);
        let cut = upper_bound(&net(3, 1.0, 0.3));
        assert!((cut.rate - 0.9).abs() < 1e-9);
    }

    #[test]
    fn window_point_is_tight() {
        let n = net(3, 1.0, 0.6);
        let lb = lower_bound(&n);
        let ub = upper_bound(&n);
        assert!((ub.rate - lb.rate).abs() < 1e-4, "lb {} ub {}", lb.rate, ub.rate);
    }

    #[test]
    fn gap_above_window() {
        let report = tightness_check(&net(3, 1.0, 1.2), 1e-4).unwrap();
        assert!(!report.predicted);
        assert!(report.consistent());
        assert!(report.gap > -1e-6);
    }
}
