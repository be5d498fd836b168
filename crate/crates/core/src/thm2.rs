//! Desk-scale evaluation of the auxiliary-variable upper bound for small
//! symmetric discrete MACs:
//!
//! ```text
//! max_{p(x)} min_{p(u|y)} max_{p(q|x)} min {
//!     M C - (M-1) H(U|Q) + sum_m H(U|X_m Q) - H(U|X_M),
//!     min_S |S| C + I(X_{S^c}; Y | X_S Q)
//! }
//! ```
//!
//! with `Q - X_M - Y - U` Markov. There is no known algorithm for this
//! max-min-max; the search below alternates seeded restarts with pairwise
//! coordinate moves and reports a convergence status instead of a guarantee.

use std::f64::consts::LN_2;

use rand::Rng;
use rayon::prelude::*;

use crate::discrete::{
    check_size, optimize_thm1, AuxChannels, DiscreteBoundResult, SearchConfig, SearchStatus,
};
use crate::error::{domain, CoreError, Result};
use crate::info::{decode_index, entropy_nats, JointPmf};
use crate::mac::DiscreteMac;
use crate::random::{dirichlet, stream_rng};
use crate::solve::golden_max;

/// Largest `|X|^M * |Y|` accepted.
pub const MAX_THM2_CELLS: usize = 512;

/// Improvement below which extra `Q` restarts count as converged.
pub const Q_CONVERGENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AuxConfig {
    /// `|U|`; at most `|Y| + 2`. `None` uses `|Y|`.
    pub u_size: Option<usize>,
    /// `|Q|`; at most `|X|^M + 2^M - 1`.
    pub q_size: usize,
    /// Random input pmfs tried besides the lower-bound optimizer and uniform.
    pub outer_restarts: usize,
    pub u_restarts: usize,
    pub u_sweeps: usize,
    pub q_restarts: usize,
    pub q_sweeps: usize,
    /// Golden-section iterations per pairwise move.
    pub line_iters: usize,
    pub seed: u64,
}

impl Default for AuxConfig {
    fn default() -> Self {
        Self {
            u_size: None,
            q_size: 2,
            outer_restarts: 2,
            u_restarts: 2,
            u_sweeps: 2,
            q_restarts: 3,
            q_sweeps: 2,
            line_iters: 30,
            seed: 0,
        }
    }
}

/// Precomputed state for a fixed input pmf.
struct Evaluator<'a> {
    mac: &'a DiscreteMac,
    px: Vec<f64>,
    fronthaul: f64,
    coords: Vec<Vec<usize>>,
    /// `(|S|, sub-tuple index of every x, number of sub-tuples)` per subset.
    subsets: Vec<(usize, Vec<usize>, usize)>,
    /// `H(Y | X_M)`, nats.
    h_y_given_x: f64,
}

impl<'a> Evaluator<'a> {
    fn new(mac: &'a DiscreteMac, px: Vec<f64>, fronthaul: f64) -> Self {
        let m = mac.relays();
        let nx = mac.input_alphabet();
        let dims = vec![nx; m];
        let coords: Vec<Vec<usize>> = (0..mac.rows())
            .map(|r| {
                let mut c = vec![0; m];
                decode_index(r, &dims, &mut c);
                c
            })
            .collect();
        let subsets = (0usize..1 << m)
            .map(|mask| {
                let members: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                let index = coords
                    .iter()
                    .map(|c| members.iter().fold(0, |acc, &i| acc * nx + c[i]))
                    .collect();
                (members.len(), index, nx.pow(members.len() as u32))
            })
            .collect();
        let h_y_given_x = px
            .iter()
            .enumerate()
            .map(|(r, &p)| p * entropy_nats(mac.row(r)))
            .sum();
        Self {
            mac,
            px,
            fronthaul,
            coords,
            subsets,
            h_y_given_x,
        }
    }

    /// `p(u | x)` through the channel then `p(u | y)`, plus `H(U | X_M)`.
    fn through(&self, v: &[f64], nu: usize) -> (Vec<f64>, f64) {
        let ny = self.mac.output_alphabet();
        let rows = self.mac.rows();
        let mut t = vec![0.0; rows * nu];
        let mut h = 0.0;
        for r in 0..rows {
            let row = &mut t[r * nu..(r + 1) * nu];
            for (y, &w) in self.mac.row(r).iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for (slot, &vu) in row.iter_mut().zip(&v[y * nu..(y + 1) * nu]) {
                    *slot += w * vu;
                }
            }
            h += self.px[r] * entropy_nats(row);
        }
        debug_assert_eq!(v.len(), ny * nu);
        (t, h)
    }

    /// Both branches, in bits, for given `p(u|x)` and `p(q|x)`.
    fn branches(&self, t: &[f64], h_u_given_x: f64, nu: usize, a: &[f64], nq: usize) -> (f64, f64) {
        let m = self.mac.relays();
        let nx = self.mac.input_alphabet();
        let ny = self.mac.output_alphabet();
        let rows = self.mac.rows();

        let mut pq = vec![0.0; nq];
        let mut puq = vec![0.0; nq * nu];
        let mut pmqu = vec![0.0; m * nx * nq * nu];
        for r in 0..rows {
            for q in 0..nq {
                let pxq = self.px[r] * a[r * nq + q];
                if pxq == 0.0 {
                    continue;
                }
                pq[q] += pxq;
                for u in 0..nu {
                    let v = pxq * t[r * nu + u];
                    puq[q * nu + u] += v;
                    for (i, &xi) in self.coords[r].iter().enumerate() {
                        pmqu[((i * nx + xi) * nq + q) * nu + u] += v;
                    }
                }
            }
        }
        let h_q = entropy_nats(&pq);
        let h_u_q = entropy_nats(&puq) - h_q;
        let block = nx * nq * nu;
        let mut sum_h_u_xq = 0.0;
        for i in 0..m {
            let slice = &pmqu[i * block..(i + 1) * block];
            let pxq: Vec<f64> = slice.chunks(nu).map(|c| c.iter().sum()).collect();
            sum_h_u_xq += entropy_nats(slice) - entropy_nats(&pxq);
        }
        let mc = m as f64 * self.fronthaul;
        let first = mc + (-(m as f64 - 1.0) * h_u_q + sum_h_u_xq - h_u_given_x) / LN_2;

        let mut second = f64::INFINITY;
        for (size, index, count) in &self.subsets {
            let mut psqy = vec![0.0; count * nq * ny];
            let mut psq = vec![0.0; count * nq];
            for r in 0..rows {
                let s = index[r];
                for q in 0..nq {
                    let pxq = self.px[r] * a[r * nq + q];
                    if pxq == 0.0 {
                        continue;
                    }
                    psq[s * nq + q] += pxq;
                    for (y, &w) in self.mac.row(r).iter().enumerate() {
                        psqy[(s * nq + q) * ny + y] += pxq * w;
                    }
                }
            }
            let h_y_given_sq = entropy_nats(&psqy) - entropy_nats(&psq);
            let info = ((h_y_given_sq - self.h_y_given_x) / LN_2).max(0.0);
            second = second.min(*size as f64 * self.fronthaul + info);
        }
        (first, second)
    }
}

/// Move mass between entries `i` and `j` of the distribution `row` of `table`
/// to the best point of a golden-section line search of `f`.
fn pairwise_move(
    table: &mut [f64],
    row_start: usize,
    i: usize,
    j: usize,
    iters: usize,
    maximize: bool,
    f: &mut impl FnMut(&[f64]) -> f64,
    current: f64,
) -> f64 {
    let (a, b) = (table[row_start + i], table[row_start + j]);
    if a + b == 0.0 {
        return current;
    }
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut trial = table.to_vec();
    let width = (a + b) * 0.618_f64.powi(iters as i32);
    let m = golden_max(
        |t| {
            trial[row_start + i] = a + t;
            trial[row_start + j] = b - t;
            sign * f(&trial)
        },
        -a,
        b,
        width,
    );
    if sign * m.value > sign * current + 1e-13 {
        table[row_start + i] = (a + m.x).max(0.0);
        table[row_start + j] = (b - m.x).max(0.0);
        sign * m.value
    } else {
        current
    }
}

/// Coordinate search over a row-stochastic table.
fn coordinate_search(
    table: &mut [f64],
    width: usize,
    sweeps: usize,
    iters: usize,
    maximize: bool,
    f: &mut impl FnMut(&[f64]) -> f64,
) -> f64 {
    let mut value = f(table);
    let rows = table.len() / width;
    for _ in 0..sweeps {
        let start = value;
        for r in 0..rows {
            for i in 0..width {
                for j in i + 1..width {
                    value = pairwise_move(table, r * width, i, j, iters, maximize, f, value);
                }
            }
        }
        if (value - start).abs() <= 1e-13 {
            break;
        }
    }
    value
}

fn random_stochastic<R: Rng + ?Sized>(rng: &mut R, rows: usize, width: usize) -> Vec<f64> {
    (0..rows).flat_map(|_| dirichlet(rng, width)).collect()
}

struct QBest {
    value: f64,
    table: Vec<f64>,
    size: usize,
}

impl Evaluator<'_> {
    /// Innermost maximization over `p(q | x)` for fixed `p(u | y)`.
    fn max_over_q(&self, v: &[f64], nu: usize, cfg: &AuxConfig, restarts: usize, salt: u64) -> QBest {
        let (t, h) = self.through(v, nu);
        let rows = self.mac.rows();
        let objective = |a: &[f64], nq: usize| {
            let (b1, b2) = self.branches(&t, h, nu, a, nq);
            b1.min(b2)
        };
        let constant = vec![1.0; rows];
        let mut best = QBest {
            value: objective(&constant, 1),
            table: constant,
            size: 1,
        };
        let nq = cfg.q_size;
        if nq < 2 {
            return best;
        }
        for k in 0..restarts {
            let mut rng = stream_rng(cfg.seed ^ 0x51, salt.wrapping_mul(1 << 20) + k as u64);
            let mut a = random_stochastic(&mut rng, rows, nq);
            let value = coordinate_search(
                &mut a,
                nq,
                cfg.q_sweeps,
                cfg.line_iters,
                true,
                &mut |a| objective(a, nq),
            );
            if value > best.value {
                best = QBest {
                    value,
                    table: a,
                    size: nq,
                };
            }
        }
        best
    }
}

impl Evaluator<'_> {
    /// Inner objective at constant `Q` and at one given `p(q | x)`.
    fn value_at(&self, v: &[f64], nu: usize, table: &[f64], nq: usize) -> f64 {
        let (t, h) = self.through(v, nu);
        let (b1, b2) = self.branches(&t, h, nu, &vec![1.0; self.mac.rows()], 1);
        let (c1, c2) = self.branches(&t, h, nu, table, nq);
        b1.min(b2).max(c1.min(c2))
    }
}

struct Inner {
    value: f64,
    v: Vec<f64>,
    q: QBest,
    nu: usize,
}

/// Inner minimization over `p(u | y)` for a fixed input pmf.
fn min_over_u(eval: &Evaluator, cfg: &AuxConfig, nu: usize) -> Inner {
    let ny = eval.mac.output_alphabet();
    let mut starts: Vec<Vec<f64>> = Vec::new();
    // constant U
    starts.push((0..ny).flat_map(|_| (0..nu).map(|u| if u == 0 { 1.0 } else { 0.0 })).collect());
    // U = Y (or Y folded onto the first |U| symbols)
    starts.push(
        (0..ny)
            .flat_map(|y| (0..nu).map(move |u| if u == y.min(nu - 1) { 1.0 } else { 0.0 }))
            .collect(),
    );
    for k in 0..cfg.u_restarts {
        let mut rng = stream_rng(cfg.seed ^ 0xa5, k as u64);
        starts.push(random_stochastic(&mut rng, ny, nu));
    }
    let mut best: Option<Inner> = None;
    for mut v in starts {
        // Full Q searches only between sweeps; within a sweep the inner max
        // is estimated from constant Q and the last maximizing table.
        let mut q = eval.max_over_q(&v, nu, cfg, cfg.q_restarts, 0);
        for sweep in 0..cfg.u_sweeps {
            let (table, nq) = (q.table.clone(), q.size);
            let mut f = |v: &[f64]| eval.value_at(v, nu, &table, nq);
            let before = f(&v);
            let after = coordinate_search(&mut v, nu, 1, cfg.line_iters, false, &mut f);
            q = eval.max_over_q(&v, nu, cfg, cfg.q_restarts, sweep as u64 + 1);
            if before - after <= 1e-12 {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| q.value < b.value) {
            best = Some(Inner {
                value: q.value,
                v,
                q,
                nu,
            });
        }
    }
    best.expect("at least two starting points")
}

/// Approximate the auxiliary-variable upper bound on a small symmetric MAC.
///
/// The result is flagged `GridLimited` unless doubling the `Q` restarts at
/// the reported point changes the value by less than [`Q_CONVERGENCE_TOL`].
/// In either case it is an approximation of the bound, not a certificate.
pub fn thm2_upper(mac: &DiscreteMac, fronthaul: f64, cfg: &AuxConfig) -> Result<DiscreteBoundResult> {
    check_size(mac)?;
    if !mac.is_symmetric() {
        return Err(CoreError::NotSymmetric(
            "channel law is not permutation invariant".into(),
        ));
    }
    if !(fronthaul >= 0.0) {
        return domain(format!("fronthaul {fronthaul} must be non-negative"));
    }
    let m = mac.relays();
    let rows = mac.rows();
    let ny = mac.output_alphabet();
    if rows * ny > MAX_THM2_CELLS {
        return Err(CoreError::Capacity(format!(
            "|X|^M * |Y| = {} exceeds the limit {MAX_THM2_CELLS}",
            rows * ny
        )));
    }
    let nu = cfg.u_size.unwrap_or(ny);
    if nu == 0 || nu > ny + 2 {
        return domain(format!("|U| = {nu} must be in [1, |Y| + 2 = {}]", ny + 2));
    }
    let q_cap = rows + (1 << m) - 1;
    if cfg.q_size == 0 || cfg.q_size > q_cap {
        return domain(format!("|Q| = {} must be in [1, {q_cap}]", cfg.q_size));
    }

    let thm1 = optimize_thm1(
        mac,
        fronthaul,
        &SearchConfig {
            seed: cfg.seed,
            ..SearchConfig::default()
        },
    )?;
    let mut candidates = vec![thm1.achieving_pmf.probs().to_vec(), vec![1.0 / rows as f64; rows]];
    for k in 0..cfg.outer_restarts {
        let mut rng = stream_rng(cfg.seed ^ 0x0f, k as u64);
        candidates.push(dirichlet(&mut rng, rows));
    }

    let evaluated: Vec<(Vec<f64>, Inner)> = candidates
        .into_par_iter()
        .map(|px| {
            let eval = Evaluator::new(mac, px.clone(), fronthaul);
            let inner = min_over_u(&eval, cfg, nu);
            (px, inner)
        })
        .collect();
    let (px, inner) = evaluated
        .into_iter()
        .reduce(|a, b| if b.1.value > a.1.value { b } else { a })
        .expect("candidates are non-empty");

    let eval = Evaluator::new(mac, px.clone(), fronthaul);
    let recheck = eval.max_over_q(&inner.v, inner.nu, cfg, 2 * cfg.q_restarts + 2, 7);
    let status = if recheck.value - inner.value < Q_CONVERGENCE_TOL {
        SearchStatus::Converged
    } else {
        SearchStatus::GridLimited
    };
    let (value, q) = if recheck.value > inner.q.value {
        (recheck.value, recheck)
    } else {
        (inner.value, inner.q)
    };
    let pmf = JointPmf::new(vec![mac.input_alphabet(); m], px)?;
    Ok(DiscreteBoundResult {
        value: value.max(0.0),
        achieving_pmf: pmf,
        aux: Some(AuxChannels {
            u_size: inner.nu,
            u_given_y: inner.v,
            q_size: q.size,
            q_given_x: q.table,
        }),
        status,
    })
}

/// Both branch values for explicit auxiliary channels; exposed for checks.
pub fn thm2_branches(
    mac: &DiscreteMac,
    pmf: &JointPmf,
    fronthaul: f64,
    aux: &AuxChannels,
) -> Result<(f64, f64)> {
    if pmf.probs().len() != mac.rows() {
        return domain("pmf does not match the channel input tuples");
    }
    let ny = mac.output_alphabet();
    if aux.u_given_y.len() != ny * aux.u_size || aux.q_given_x.len() != mac.rows() * aux.q_size {
        return domain("auxiliary tables have the wrong shape");
    }
    let eval = Evaluator::new(mac, pmf.probs().to_vec(), fronthaul);
    let (t, h) = eval.through(&aux.u_given_y, aux.u_size);
    Ok(eval.branches(&t, h, aux.u_size, &aux.q_given_x, aux.q_size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::thm1_rate;
    use crate::info::SymmetricPmf;

    fn constant_aux(mac: &DiscreteMac) -> AuxChannels {
        let ny = mac.output_alphabet();
        AuxChannels {
            u_size: 1,
            u_given_y: vec![1.0; ny],
            q_size: 1,
            q_given_x: vec![1.0; mac.rows()],
        }
    }

    #[test]
    fn constant_u_gives_total_fronthaul() {
        let mac = DiscreteMac::binary_adder(2);
        let pmf = JointPmf::new(vec![2, 2], vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let (b1, _) = thm2_branches(&mac, &pmf, 0.7, &constant_aux(&mac)).unwrap();
        assert!((b1 - 1.4).abs() < 1e-12);
    }

    #[test]
    fn second_branch_is_cut_set_minimum() {
        let mac = DiscreteMac::binary_adder(2);
        let pmf = JointPmf::new(vec![2, 2], vec![0.25; 4]).unwrap();
        // S = {} gives I(X;Y) = 1.5, S = {m} gives C + H(X) = C + 1, S = M gives 2C
        let (_, b2) = thm2_branches(&mac, &pmf, 0.3, &constant_aux(&mac)).unwrap();
        assert!((b2 - 0.6).abs() < 1e-12);
        let (_, b2) = thm2_branches(&mac, &pmf, 2.0, &constant_aux(&mac)).unwrap();
        assert!((b2 - 1.5).abs() < 1e-12);
    }

    #[test]
    fn first_branch_dominates_thm1_cut() {
        // with Q constant the first branch is M C - I(X_M) + I(X_M | U)
        let mac = DiscreteMac::binary_adder(2);
        let sym = SymmetricPmf::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let aux = AuxChannels {
            u_size: 2,
            u_given_y: vec![0.9, 0.1, 0.5, 0.5, 0.2, 0.8],
            q_size: 1,
            q_given_x: vec![1.0; 4],
        };
        let (b1, _) = thm2_branches(&mac, sym.joint(), 1.0, &aux).unwrap();
        let dependence = sym.joint().multi_information(&[0, 1]).unwrap();
        assert!(b1 >= 2.0 - dependence - 1e-12);
    }

    #[test]
    fn upper_dominates_lower_and_stays_below_cut() {
        let mac = DiscreteMac::binary_adder(2);
        for &c in &[0.2, 0.6, 1.0] {
            let ub = thm2_upper(&mac, c, &AuxConfig::default()).unwrap();
            let lb = optimize_thm1(&mac, c, &SearchConfig::default()).unwrap();
            assert!(ub.value >= lb.value - 1e-9, "C={c}: {} < {}", ub.value, lb.value);
            assert!(ub.value <= 2.0 * c + 1e-9);
            assert!(ub.value <= 3f64.log2() + 1e-9);
            let pmf = SymmetricPmf::new(2, 2, lb.achieving_pmf.probs().to_vec()).unwrap();
            assert!((thm1_rate(&mac, &pmf, c).unwrap() - lb.value).abs() < 1e-12);
        }
    }

    #[test]
    fn config_guards() {
        let mac = DiscreteMac::binary_adder(2);
        let cfg = AuxConfig {
            u_size: Some(6),
            ..AuxConfig::default()
        };
        assert!(thm2_upper(&mac, 1.0, &cfg).is_err());
        let cfg = AuxConfig {
            q_size: 8,
            ..AuxConfig::default()
        };
        assert!(thm2_upper(&mac, 1.0, &cfg).is_err());
        let big = DiscreteMac::deterministic(4, 3, 9, |x| x.iter().sum()).unwrap();
        assert!(matches!(
            thm2_upper(&big, 1.0, &AuxConfig::default()),
            Err(CoreError::Capacity(_))
        ));
    }
}
