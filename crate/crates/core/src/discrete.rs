//! Marton-coding lower bound for symmetric discrete MACs and the rate region
//! it is derived from.

use std::cmp::Ordering;
use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::error::{domain, CoreError, Result};
use crate::info::{entropy_nats, JointPmf, Orbits, SymmetricPmf};
use crate::mac::DiscreteMac;
use crate::random::{dirichlet, stream_rng};
use crate::solve::golden_max;

/// Largest `|X|^M` the discrete optimizers accept.
pub const MAX_INPUT_TUPLES: usize = 4096;

const IMPROVE_TOL: f64 = 1e-12;

/// Per-relay message rate `r` and binning rate `r_prime`, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartonRates {
    pub r: f64,
    pub r_prime: f64,
}

impl MartonRates {
    pub fn new(r: f64, r_prime: f64) -> Result<Self> {
        if !(r >= 0.0 && r_prime >= 0.0) {
            return domain(format!("rates must be non-negative, got ({r}, {r_prime})"));
        }
        Ok(Self { r, r_prime })
    }

    pub fn total(&self) -> f64 {
        self.r + self.r_prime
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Converged,
    GridLimited,
}

impl SearchStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchStatus::Converged => "converged",
            SearchStatus::GridLimited => "grid-limited",
        }
    }
}

/// Auxiliary channels reported by the upper-bound search.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxChannels {
    pub u_size: usize,
    /// `p(u | y)`, row-major `|Y| x |U|`.
    pub u_given_y: Vec<f64>,
    pub q_size: usize,
    /// `p(q | x_1..x_M)`, row-major `|X|^M x |Q|`.
    pub q_given_x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBoundResult {
    pub value: f64,
    pub achieving_pmf: JointPmf,
    pub aux: Option<AuxChannels>,
    pub status: SearchStatus,
}

pub(crate) fn check_symmetric_pair(mac: &DiscreteMac, pmf: &SymmetricPmf) -> Result<()> {
    if !mac.is_symmetric() {
        return Err(CoreError::NotSymmetric(
            "channel law is not permutation invariant".into(),
        ));
    }
    if pmf.relays() != mac.relays() || pmf.alphabet() != mac.input_alphabet() {
        return domain(format!(
            "pmf over {} relays with |X|={} does not match channel with {} relays, |X|={}",
            pmf.relays(),
            pmf.alphabet(),
            mac.relays(),
            mac.input_alphabet()
        ));
    }
    Ok(())
}

pub(crate) fn check_size(mac: &DiscreteMac) -> Result<()> {
    let tuples = mac
        .input_alphabet()
        .checked_pow(mac.relays() as u32)
        .unwrap_or(usize::MAX);
    if tuples > MAX_INPUT_TUPLES {
        return Err(CoreError::Capacity(format!(
            "|X|^M = {tuples} exceeds the desk-scale limit {MAX_INPUT_TUPLES}"
        )));
    }
    Ok(())
}

/// `min(M C - I(X_M), I(X_M; Y))`, clamped at zero.
pub fn thm1_rate(mac: &DiscreteMac, pmf: &SymmetricPmf, fronthaul: f64) -> Result<f64> {
    check_symmetric_pair(mac, pmf)?;
    if !(fronthaul >= 0.0) {
        return domain(format!("fronthaul {fronthaul} must be non-negative"));
    }
    let relays: Vec<usize> = (0..mac.relays()).collect();
    let dependence = pmf.joint().multi_information(&relays)?;
    let through = mac.mutual_information(pmf.joint())?;
    let cut = mac.relays() as f64 * fronthaul - dependence;
    Ok(cut.min(through).max(0.0))
}

/// Fast evaluation of the lower-bound objective on orbit weights.
struct Thm1Objective<'a> {
    mac: &'a DiscreteMac,
    orbits: &'a Orbits,
    fronthaul: f64,
    /// `H(Y | X = x)` per input tuple, nats.
    row_entropy: Vec<f64>,
    /// Flat index of `x_1` for each tuple.
    first: Vec<usize>,
}

impl<'a> Thm1Objective<'a> {
    fn new(mac: &'a DiscreteMac, orbits: &'a Orbits, fronthaul: f64) -> Self {
        let rows = mac.rows();
        let stride = rows / mac.input_alphabet();
        Self {
            mac,
            orbits,
            fronthaul,
            row_entropy: (0..rows).map(|r| entropy_nats(mac.row(r))).collect(),
            first: (0..rows).map(|r| r / stride).collect(),
        }
    }

    fn eval(&self, weights: &[f64]) -> f64 {
        let p = self.orbits.expand(weights);
        let mut marginal = vec![0.0; self.mac.input_alphabet()];
        let mut out = vec![0.0; self.mac.output_alphabet()];
        let mut noise = 0.0;
        for (r, &px) in p.iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            marginal[self.first[r]] += px;
            noise += px * self.row_entropy[r];
            for (o, &w) in out.iter_mut().zip(self.mac.row(r)) {
                *o += px * w;
            }
        }
        let m = self.mac.relays() as f64;
        let dependence = (m * entropy_nats(&marginal) - entropy_nats(&p)) / LN_2;
        let through = (entropy_nats(&out) - noise) / LN_2;
        (m * self.fronthaul - dependence).min(through).max(0.0)
    }
}

/// Budget for the symmetric-pmf search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Golden-section width for each pairwise mass transfer.
    pub line_tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_sweeps: 60,
            line_tol: 1e-10,
            seed: 0,
        }
    }
}

struct LocalSearch {
    weights: Vec<f64>,
    value: f64,
    converged: bool,
}

/// Coordinate ascent over orbit masses: each step moves mass between two
/// orbits along the best point of a golden-section line search.
fn pairwise_ascent(
    f: &impl Fn(&[f64]) -> f64,
    mut w: Vec<f64>,
    cfg: &SearchConfig,
) -> LocalSearch {
    let mut value = f(&w);
    let n = w.len();
    for _ in 0..cfg.max_sweeps {
        let start = value;
        for i in 0..n {
            for j in i + 1..n {
                let (wi, wj) = (w[i], w[j]);
                if wi + wj == 0.0 {
                    continue;
                }
                let mut trial = w.clone();
                let m = golden_max(
                    |t| {
                        trial[i] = wi + t;
                        trial[j] = wj - t;
                        f(&trial)
                    },
                    -wi,
                    wj,
                    cfg.line_tol,
                );
                if m.value > value + IMPROVE_TOL {
                    w[i] = (wi + m.x).max(0.0);
                    w[j] = (wj - m.x).max(0.0);
                    value = m.value;
                }
            }
        }
        if value - start <= IMPROVE_TOL {
            return LocalSearch {
                weights: w,
                value,
                converged: true,
            };
        }
    }
    LocalSearch {
        weights: w,
        value,
        converged: false,
    }
}

fn better(a: &LocalSearch, b: &LocalSearch) -> Ordering {
    // higher value wins; near-ties go to the lexicographically smaller vector
    if (a.value - b.value).abs() > IMPROVE_TOL {
        return a.value.total_cmp(&b.value);
    }
    for (x, y) in a.weights.iter().zip(&b.weights) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Starting points: independent uniform inputs, uniform over constant tuples,
/// then seeded simplex samples over the orbit masses.
fn starts(orbits: &Orbits, cfg: &SearchConfig) -> Vec<Vec<f64>> {
    let alphabet = orbits.alphabet();
    let uniform = SymmetricPmf::iid(orbits.relays(), &vec![1.0 / alphabet as f64; alphabet])
        .expect("uniform marginal");
    let mut out = vec![orbits.weights_of(&uniform)];
    let diagonal: Vec<f64> = orbits
        .representatives()
        .iter()
        .map(|rep| {
            if rep.iter().all(|&s| s == rep[0]) {
                1.0 / alphabet as f64
            } else {
                0.0
            }
        })
        .collect();
    out.push(diagonal);
    for k in 0..cfg.restarts {
        let mut rng = stream_rng(cfg.seed, k as u64);
        out.push(dirichlet(&mut rng, orbits.len()));
    }
    out
}

/// Maximize `thm1_rate` over symmetric input pmfs.
pub fn optimize_thm1(
    mac: &DiscreteMac,
    fronthaul: f64,
    cfg: &SearchConfig,
) -> Result<DiscreteBoundResult> {
    check_size(mac)?;
    if !mac.is_symmetric() {
        return Err(CoreError::NotSymmetric(
            "channel law is not permutation invariant".into(),
        ));
    }
    if !(fronthaul >= 0.0) {
        return domain(format!("fronthaul {fronthaul} must be non-negative"));
    }
    let orbits = Orbits::new(mac.relays(), mac.input_alphabet());
    let objective = Thm1Objective::new(mac, &orbits, fronthaul);
    let f = |w: &[f64]| objective.eval(w);
    let best = starts(&orbits, cfg)
        .into_par_iter()
        .map(|w| pairwise_ascent(&f, w, cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| if better(&b, &a) == Ordering::Greater { b } else { a })
        .expect("at least two starting points");
    let mut weights = best.weights;
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let pmf = orbits.to_pmf(&weights)?;
    let value = thm1_rate(mac, &pmf, fronthaul)?;
    Ok(DiscreteBoundResult {
        value,
        achieving_pmf: pmf.into_joint(),
        aux: None,
        status: if best.converged {
            SearchStatus::Converged
        } else {
            SearchStatus::GridLimited
        },
    })
}

/// Constraint of the Marton region that a rate assignment violates.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NegativeRate { relay: usize },
    Fronthaul { relay: usize, used: f64 },
    SumRate { declared: f64, sum: f64 },
    /// Binning too small to find a jointly typical tuple for subset `S`.
    Covering { subset: Vec<usize>, binning: f64, needed: f64 },
    /// Codebook rates too large to decode for subset `S`.
    Packing { subset: Vec<usize>, rate: f64, limit: f64 },
}

/// Slack allowed on every region inequality.
pub const REGION_TOL: f64 = 1e-9;

/// Every violated constraint of the Marton region for a general pmf and channel.
pub fn marton_violations(
    mac: &DiscreteMac,
    pmf: &JointPmf,
    fronthaul: f64,
    rate: f64,
    rates: &[MartonRates],
) -> Result<Vec<Violation>> {
    let m = mac.relays();
    if m > 4 {
        return Err(CoreError::Capacity(format!(
            "subset enumeration is limited to 4 relays, got {m}"
        )));
    }
    if rates.len() != m {
        return domain(format!("expected {m} rate pairs, got {}", rates.len()));
    }
    let joint = mac.joint(pmf)?;
    let mut out = Vec::new();
    for (relay, r) in rates.iter().enumerate() {
        if r.r < 0.0 || r.r_prime < 0.0 {
            out.push(Violation::NegativeRate { relay });
        }
        if r.total() > fronthaul + REGION_TOL {
            out.push(Violation::Fronthaul {
                relay,
                used: r.total(),
            });
        }
    }
    let sum: f64 = rates.iter().map(|r| r.r).sum();
    if (sum - rate).abs() > REGION_TOL {
        out.push(Violation::SumRate {
            declared: rate,
            sum,
        });
    }
    let all: Vec<usize> = (0..m).collect();
    let dependence_all = joint.multi_information(&all)?;
    for mask in 1usize..(1 << m) {
        let subset: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let rest: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 0).collect();
        let binning: f64 = subset.iter().map(|&i| rates[i].r_prime).sum();
        let needed = joint.multi_information(&subset)?;
        if binning < needed - REGION_TOL {
            out.push(Violation::Covering {
                subset: subset.clone(),
                binning,
                needed,
            });
        }
        let used: f64 = subset.iter().map(|&i| rates[i].total()).sum();
        let limit = joint.mutual_information(&subset, &[m], &rest)? + dependence_all
            - joint.multi_information(&rest)?;
        if used > limit + REGION_TOL {
            out.push(Violation::Packing {
                subset,
                rate: used,
                limit,
            });
        }
    }
    Ok(out)
}

pub fn marton_region_feasible(
    mac: &DiscreteMac,
    pmf: &JointPmf,
    fronthaul: f64,
    rate: f64,
    rates: &[MartonRates],
) -> Result<bool> {
    Ok(marton_violations(mac, pmf, fronthaul, rate, rates)?.is_empty())
}

/// Feasibility of equal rates `(r, r_prime)` at every relay, checking only the
/// full-set constraints: `M r' >= I(X_M)` and
/// `M (r + r') <= I(X_M; Y) + I(X_M)`, plus `r + r' <= C`.
pub fn symmetric_full_set_feasible(
    mac: &DiscreteMac,
    pmf: &SymmetricPmf,
    fronthaul: f64,
    rates: MartonRates,
) -> Result<bool> {
    check_symmetric_pair(mac, pmf)?;
    let m = mac.relays() as f64;
    let all: Vec<usize> = (0..mac.relays()).collect();
    let dependence = pmf.joint().multi_information(&all)?;
    let through = mac.mutual_information(pmf.joint())?;
    Ok(rates.total() <= fronthaul + REGION_TOL
        && m * rates.r_prime >= dependence - REGION_TOL
        && m * rates.total() <= through + dependence + REGION_TOL)
}
