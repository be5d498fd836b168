//! Randomized self-checks of the identities and inequalities the bounds rely
//! on. Every instance is drawn from stream `index` of the suite seed, so a
//! failure is reproduced by `(seed, index)` alone.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::gaussian::{gaussian_conditional_multi_information, gaussian_det, GaussianCov};
use crate::gaussian_bounds::{
    lower_bound, n_choice, regimes, upper_bound, GaussianNetwork, RegimeReport,
};
use crate::info::JointPmf;
use crate::random::{random_joint, random_symmetric, random_symmetric_mac, stream_rng};

/// Absolute tolerance for the discrete identities and inequalities.
pub const INFO_TOL: f64 = 1e-9;
/// Slack for the Gaussian sandwich.
pub const SANDWICH_TOL: f64 = 1e-6;
/// Largest gap accepted inside the tight window.
pub const WINDOW_GAP_TOL: f64 = 1e-4;
pub const DET_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Identities,
    SubsetDominance,
    Sandwich,
    TightWindow,
    Determinant,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Identities,
        Suite::SubsetDominance,
        Suite::Sandwich,
        Suite::TightWindow,
        Suite::Determinant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::SubsetDominance => "subset-dominance",
            Suite::Sandwich => "sandwich",
            Suite::TightWindow => "tight-window",
            Suite::Determinant => "det",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Instances checked by a default run.
    pub fn default_instances(&self) -> usize {
        match self {
            Suite::Identities => 500,
            Suite::SubsetDominance => 1000,
            Suite::Sandwich => 200,
            Suite::TightWindow => 20,
            Suite::Determinant => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub index: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub instances: usize,
    /// Individual assertions evaluated over all instances.
    pub checks: usize,
    /// Largest violation (or gap / error, depending on the suite) seen.
    pub worst: f64,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Outcome of one instance: assertions made, worst value, failure details.
type Instance = (usize, f64, Vec<String>);

pub fn run_suite(suite: Suite, instances: usize, seed: u64) -> SuiteReport {
    let check: fn(u64, u64) -> Instance = match suite {
        Suite::Identities => identities_instance,
        Suite::SubsetDominance => dominance_instance,
        Suite::Sandwich => sandwich_instance,
        Suite::TightWindow => window_instance,
        Suite::Determinant => det_instance,
    };
    let results: Vec<(u64, Instance)> = (0..instances as u64)
        .into_par_iter()
        .map(|i| (i, check(seed, i)))
        .collect();
    let mut report = SuiteReport {
        suite,
        seed,
        instances,
        checks: 0,
        worst: 0.0,
        failures: Vec::new(),
    };
    for (index, (checks, worst, details)) in results {
        report.checks += checks;
        report.worst = report.worst.max(worst);
        report
            .failures
            .extend(details.into_iter().map(|detail| Failure { index, detail }));
    }
    report
}

fn subsets(m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0usize..1 << m).map(move |mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u
}

struct Tally {
    checks: usize,
    worst: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            worst: 0.0,
            failures: Vec::new(),
        }
    }

    /// Record `excess <= tol`, where `excess` is how far the check is off.
    fn check(&mut self, excess: f64, tol: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if excess.is_nan() || excess > tol {
            self.failures.push(format!("{} (off by {excess:e})", what()));
        }
        if excess.is_finite() {
            self.worst = self.worst.max(excess);
        }
    }

    fn done(self) -> Instance {
        (self.checks, self.worst, self.failures)
    }
}

fn mi(p: &JointPmf, s: &[usize]) -> f64 {
    p.multi_information(s).expect("valid subset")
}

fn cross(p: &JointPmf, a: &[usize], b: &[usize], given: &[usize]) -> f64 {
    p.mutual_information(a, b, given).expect("valid subsets")
}

/// Split and chain rules for multi-information on arbitrary random pmfs.
fn identities_instance(seed: u64, index: u64) -> Instance {
    let mut rng = stream_rng(seed, index);
    let m = rng.random_range(2..=4usize);
    let dims: Vec<usize> = (0..m).map(|_| rng.random_range(2..=3usize)).collect();
    let p = random_joint(&mut rng, &dims);
    let mut t = Tally::new();
    for s in subsets(m) {
        t.check(-mi(&p, &s), INFO_TOL, || format!("I(X_{s:?}) negative"));
        for tt in subsets(m) {
            if s.is_empty() || tt.is_empty() || s.iter().any(|i| tt.contains(i)) {
                continue;
            }
            let lhs = mi(&p, &union(&s, &tt));
            let rhs = mi(&p, &s) + mi(&p, &tt) + cross(&p, &s, &tt, &[]);
            t.check((lhs - rhs).abs(), INFO_TOL, || {
                format!("split rule fails for S={s:?}, T={tt:?}")
            });
        }
        if s.len() >= 2 {
            let chain: f64 = (1..s.len())
                .map(|j| cross(&p, &s[..j], &s[j..=j], &[]))
                .sum();
            t.check((mi(&p, &s) - chain).abs(), INFO_TOL, || {
                format!("chain rule fails for S={s:?}")
            });
        }
    }
    t.done()
}

/// Per-relay covering and packing limits on a symmetric pmf and channel are
/// tightest for the full relay set.
fn dominance_instance(seed: u64, index: u64) -> Instance {
    let mut rng = stream_rng(seed, index);
    let m = rng.random_range(2..=4usize);
    let nx = rng.random_range(2..=3usize);
    let ny = rng.random_range(2..=4usize);
    let pmf = random_symmetric(&mut rng, m, nx);
    let mac = random_symmetric_mac(&mut rng, m, nx, ny);
    let joint = mac.joint(pmf.joint()).expect("matching shapes");
    let y = [m];
    let all: Vec<usize> = (0..m).collect();
    let dep_all = mi(&joint, &all);
    let packing = |s: &[usize], rest: &[usize]| {
        (cross(&joint, s, &y, rest) + dep_all - mi(&joint, rest)) / s.len() as f64
    };
    let mut t = Tally::new();
    for s in subsets(m) {
        if s.len() == m {
            continue;
        }
        for s0 in (0..m).filter(|i| !s.contains(i)) {
            let grown = union(&s, &[s0]);
            let rest: Vec<usize> = (0..m).filter(|i| !grown.contains(i)).collect();
            if !s.is_empty() {
                let small = mi(&joint, &s) / s.len() as f64;
                let large = mi(&joint, &grown) / grown.len() as f64;
                t.check(small - large, INFO_TOL, || {
                    format!("covering dominance fails for S={s:?}, s0={s0}")
                });
                let rest_with = union(&rest, &[s0]);
                let wide = packing(&grown, &rest);
                let narrow = packing(&s, &rest_with);
                t.check(wide - narrow, INFO_TOL, || {
                    format!("packing dominance fails for S={s:?}, s0={s0}")
                });
            }
        }
    }
    t.done()
}

fn sample_network<R: Rng>(rng: &mut R) -> GaussianNetwork {
    let m = rng.random_range(2..=6usize);
    let p = rng.random_range(0.1..=10.0);
    let c = rng.random_range(0.0..=3.0);
    GaussianNetwork::new(m, p, c).expect("sampled in range")
}

/// `lower <= upper <= min(M C, full cooperation)`.
fn sandwich_instance(seed: u64, index: u64) -> Instance {
    let net = sample_network(&mut stream_rng(seed, index));
    let lb = lower_bound(&net).rate;
    let ub = upper_bound(&net).rate;
    let cap = net.total_fronthaul().min(net.full_cooperation());
    let mut t = Tally::new();
    let label = || {
        format!(
            "M={} P={} C={}: lb={lb} ub={ub} cap={cap}",
            net.relays(),
            net.power(),
            net.fronthaul()
        )
    };
    t.check(lb - ub, SANDWICH_TOL, label);
    t.check(ub - cap, SANDWICH_TOL, label);
    t.done()
}

/// Draw `(M, P)` with a non-empty tight window.
pub fn sample_window<R: Rng>(rng: &mut R) -> RegimeReport {
    loop {
        let m = rng.random_range(2..=5usize);
        let p = rng.random_range(0.25..=8.0);
        let report = regimes(m, p).expect("sampled in range");
        if report.has_window() && report.c_u - report.c_l > 1e-6 {
            return report;
        }
    }
}

/// Bounds meet inside `[C_L, C_U]`, and the auxiliary noise from the window
/// proof makes the inputs conditionally independent at the optimizer.
fn window_instance(seed: u64, index: u64) -> Instance {
    let mut rng = stream_rng(seed, index);
    let report = sample_window(&mut rng);
    let c = rng.random_range(report.c_l..=report.c_u);
    let net = GaussianNetwork::new(report.relays, report.power, c).expect("sampled in range");
    let lb = lower_bound(&net);
    let ub = upper_bound(&net);
    let mut t = Tally::new();
    let label = |what: &str| format!("M={} P={} C={c}: {what}", report.relays, report.power);
    t.check((ub.rate - lb.rate).abs(), WINDOW_GAP_TOL, || {
        label(&format!("lb={} ub={}", lb.rate, ub.rate))
    });
    let residual = n_choice(report.relays, report.power, lb.rho_l)
        .and_then(|n| gaussian_conditional_multi_information(report.relays, report.power, lb.rho_l, n))
        .unwrap_or(f64::NAN);
    t.check(residual.abs(), INFO_TOL, || {
        label(&format!("conditional dependence {residual} at rho={}", lb.rho_l))
    });
    t.done()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn direct_determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .expect("non-empty range");
        if a[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            a.swap(pivot, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

fn det_instance(seed: u64, index: u64) -> Instance {
    let mut rng = stream_rng(seed, index);
    let p = rng.random_range(0.1..=10.0);
    let rho = rng.random_range(0.0..1.0);
    let mut t = Tally::new();
    for m in 1..=8 {
        let closed = gaussian_det(m, p, rho).expect("sampled in range");
        let direct = direct_determinant(GaussianCov::new(m, p, rho).expect("in range").matrix());
        let rel = ((closed - direct) / direct).abs();
        t.check(rel, DET_REL_TOL, || {
            format!("M={m} P={p} rho={rho}: closed {closed} direct {direct}")
        });
    }
    t.done()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("nope"), None);
    }

    #[test]
    fn small_runs_pass() {
        for s in [Suite::Identities, Suite::SubsetDominance, Suite::Determinant] {
            let r = run_suite(s, 30, 9);
            assert!(r.passed(), "{s}: {:?}", r.failures);
            assert!(r.checks >= 30);
        }
    }

    #[test]
    fn direct_determinant_of_permutation() {
        let a = vec![vec![0.0, 2.0], vec![3.0, 0.0]];
        assert_eq!(direct_determinant(a), -6.0);
    }

    #[test]
    fn failures_carry_instance_index() {
        let mut t = Tally::new();
        t.check(1.0, 0.5, || "x".into());
        let (checks, worst, fails) = t.done();
        assert_eq!((checks, worst, fails.len()), (1, 1.0, 1));
    }
}
