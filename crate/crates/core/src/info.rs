//! Discrete information measures over joint probability tables.
//!
//! Tables are flat arrays in mixed-radix order with the first variable most
//! significant: for dimensions `[d0, d1, d2]` the entry for `(a, b, c)` lives
//! at `(a * d1 + b) * d2 + c`. Entropies are accumulated in nats and
//! converted to bits once at the API boundary; `0 log 0 = 0` throughout.

use std::f64::consts::LN_2;

use crate::error::{domain, CoreError, Result};

/// Absolute tolerance for normalization and symmetry checks.
pub const TABLE_TOL: f64 = 1e-12;

/// Shannon entropy of a probability vector, in nats.
pub fn entropy_nats(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

pub fn entropy_bits(probs: &[f64]) -> f64 {
    entropy_nats(probs) / LN_2
}

/// Decode a flat mixed-radix index into per-variable coordinates.
pub fn decode_index(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

pub fn encode_index(coords: &[usize], dims: &[usize]) -> usize {
    coords.iter().zip(dims).fold(0, |acc, (&c, &d)| acc * d + c)
}

/// Joint pmf over a tuple of finite random variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(CoreError::InvalidTable(format!(
                "dimensions must be non-empty and positive, got {dims:?}"
            )));
        }
        let len: usize = dims.iter().product();
        if probs.len() != len {
            return Err(CoreError::InvalidTable(format!(
                "expected {len} entries for dimensions {dims:?}, got {}",
                probs.len()
            )));
        }
        check_distribution(&probs)?;
        Ok(Self { dims, probs })
    }

    /// Product of independent marginals.
    pub fn product(marginals: &[Vec<f64>]) -> Result<Self> {
        let dims: Vec<usize> = marginals.iter().map(Vec::len).collect();
        let len: usize = dims.iter().product();
        let mut coords = vec![0; dims.len()];
        let probs = (0..len)
            .map(|i| {
                decode_index(i, &dims, &mut coords);
                coords
                    .iter()
                    .zip(marginals)
                    .map(|(&c, m)| m[c])
                    .product()
            })
            .collect();
        Self::new(dims, probs)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_vars(&self) -> usize {
        self.dims.len()
    }

    fn check_vars(&self, vars: &[usize]) -> Result<()> {
        let n = self.dims.len();
        for (i, &v) in vars.iter().enumerate() {
            if v >= n {
                return domain(format!("variable index {v} out of range for {n} variables"));
            }
            if vars[..i].contains(&v) {
                return domain(format!("variable index {v} repeated"));
            }
        }
        Ok(())
    }

    /// Marginal table over `vars`, in the order given.
    pub fn marginal(&self, vars: &[usize]) -> Result<JointPmf> {
        self.check_vars(vars)?;
        let sub_dims: Vec<usize> = vars.iter().map(|&v| self.dims[v]).collect();
        let probs = self.marginal_unchecked(vars, &sub_dims);
        Ok(JointPmf {
            dims: sub_dims,
            probs,
        })
    }

    fn marginal_unchecked(&self, vars: &[usize], sub_dims: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; sub_dims.iter().product()];
        let mut coords = vec![0; self.dims.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            decode_index(i, &self.dims, &mut coords);
            let j = vars
                .iter()
                .zip(sub_dims)
                .fold(0, |acc, (&v, &d)| acc * d + coords[v]);
            out[j] += p;
        }
        out
    }

    /// Joint entropy of the variables in `vars`, in nats. Empty set gives 0.
    pub fn entropy_nats_of(&self, vars: &[usize]) -> Result<f64> {
        self.check_vars(vars)?;
        if vars.is_empty() {
            return Ok(0.0);
        }
        let sub_dims: Vec<usize> = vars.iter().map(|&v| self.dims[v]).collect();
        Ok(entropy_nats(&self.marginal_unchecked(vars, &sub_dims)))
    }

    pub fn entropy(&self, vars: &[usize]) -> Result<f64> {
        Ok(self.entropy_nats_of(vars)? / LN_2)
    }

    /// `I(A; B | G)` in bits.
    pub fn mutual_information(&self, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
        let ag = union(a, given);
        let bg = union(b, given);
        let abg = union(&ag, b);
        let h = self.entropy_nats_of(&ag)? + self.entropy_nats_of(&bg)?
            - self.entropy_nats_of(&abg)?
            - self.entropy_nats_of(given)?;
        Ok((h / LN_2).max(0.0))
    }

    /// Multi-information `sum_{m in S} H(X_m) - H(X_S)` in bits.
    pub fn multi_information(&self, subset: &[usize]) -> Result<f64> {
        self.conditional_multi_information(subset, &[])
    }

    /// Multi-information of `subset` with every term conditioned on `given`.
    pub fn conditional_multi_information(&self, subset: &[usize], given: &[usize]) -> Result<f64> {
        self.check_vars(subset)?;
        self.check_vars(given)?;
        if let Some(v) = subset.iter().find(|v| given.contains(v)) {
            return domain(format!("variable {v} is both measured and conditioned on"));
        }
        if subset.len() <= 1 {
            return Ok(0.0);
        }
        let h_given = self.entropy_nats_of(given)?;
        let mut sum = 0.0;
        for &m in subset {
            sum += self.entropy_nats_of(&union(&[m], given))? - h_given;
        }
        let joint = self.entropy_nats_of(&union(subset, given))? - h_given;
        Ok(((sum - joint) / LN_2).max(0.0))
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = a.to_vec();
    out.extend(b.iter().copied().filter(|v| !a.contains(v)));
    out
}

pub(crate) fn check_distribution(probs: &[f64]) -> Result<()> {
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(CoreError::InvalidTable(format!(
            "entry {i} is {p}, expected a finite non-negative probability"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > TABLE_TOL {
        return Err(CoreError::InvalidTable(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..m).collect();
    let mut out = vec![perm.clone()];
    // next lexicographic permutation
    loop {
        let Some(i) = (1..m).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
        out.push(perm.clone());
    }
}

/// Joint pmf of `M` relay inputs over a common alphabet, invariant under every
/// permutation of the relay indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPmf {
    joint: JointPmf,
    relays: usize,
    alphabet: usize,
}

impl SymmetricPmf {
    pub fn new(relays: usize, alphabet: usize, probs: Vec<f64>) -> Result<Self> {
        if relays == 0 || alphabet == 0 {
            return domain("relay count and alphabet size must be positive");
        }
        let joint = JointPmf::new(vec![alphabet; relays], probs)?;
        let dims = joint.dims().to_vec();
        let mut coords = vec![0; relays];
        let mut permuted = vec![0; relays];
        let perms = permutations(relays);
        for (i, &p) in joint.probs().iter().enumerate() {
            decode_index(i, &dims, &mut coords);
            for perm in &perms {
                for (dst, &src) in permuted.iter_mut().zip(perm) {
                    *dst = coords[src];
                }
                let q = joint.probs()[encode_index(&permuted, &dims)];
                if (p - q).abs() > TABLE_TOL {
                    return Err(CoreError::NotSymmetric(format!(
                        "p{coords:?} = {p} but p{permuted:?} = {q}"
                    )));
                }
            }
        }
        Ok(Self {
            joint,
            relays,
            alphabet,
        })
    }

    /// Independent, identically distributed relay inputs.
    pub fn iid(relays: usize, marginal: &[f64]) -> Result<Self> {
        let joint = JointPmf::product(&vec![marginal.to_vec(); relays])?;
        Ok(Self {
            joint,
            relays,
            alphabet: marginal.len(),
        })
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        self.joint.probs()
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    /// Per-relay marginal; identical for every relay.
    pub fn marginal(&self) -> Vec<f64> {
        self.joint.marginal(&[0]).expect("relay 0 exists").probs
    }

    pub fn into_joint(self) -> JointPmf {
        self.joint
    }
}

/// Average a joint pmf over all permutations of its variables.
pub fn symmetrize(pmf: &JointPmf) -> Result<SymmetricPmf> {
    let dims = pmf.dims();
    let alphabet = dims[0];
    if dims.iter().any(|&d| d != alphabet) {
        return domain(format!("symmetrization needs a common alphabet, got {dims:?}"));
    }
    let relays = dims.len();
    let perms = permutations(relays);
    let weight = 1.0 / perms.len() as f64;
    let mut out = vec![0.0; pmf.probs().len()];
    let mut coords = vec![0; relays];
    let mut permuted = vec![0; relays];
    for (i, &p) in pmf.probs().iter().enumerate() {
        decode_index(i, dims, &mut coords);
        for perm in &perms {
            for (dst, &src) in permuted.iter_mut().zip(perm) {
                *dst = coords[src];
            }
            out[encode_index(&permuted, dims)] += weight * p;
        }
    }
    SymmetricPmf::new(relays, alphabet, out)
}

/// `I(X_S)` in bits for the relay indices in `subset` (0-based).
pub fn multi_information(pmf: &JointPmf, subset: &[usize]) -> Result<f64> {
    pmf.multi_information(subset)
}

/// `I(X_S | U)` where `U` is the last variable of `joint`.
pub fn conditional_multi_information(joint: &JointPmf, subset: &[usize]) -> Result<f64> {
    let u = joint.num_vars() - 1;
    if subset.contains(&u) {
        return domain("subset must not contain the conditioning variable");
    }
    joint.conditional_multi_information(subset, &[u])
}

/// The equivalence classes of `X^M` under relay permutations.
///
/// Each class is identified by its sorted representative tuple; a symmetric
/// pmf is fully described by one mass per class.
#[derive(Debug, Clone)]
pub struct Orbits {
    relays: usize,
    alphabet: usize,
    /// Class id of every flat index of `X^M`.
    class_of: Vec<usize>,
    sizes: Vec<usize>,
    representatives: Vec<Vec<usize>>,
}

impl Orbits {
    pub fn new(relays: usize, alphabet: usize) -> Self {
        let dims = vec![alphabet; relays];
        let len: usize = dims.iter().product();
        let mut representatives: Vec<Vec<usize>> = Vec::new();
        let mut coords = vec![0; relays];
        for i in 0..len {
            decode_index(i, &dims, &mut coords);
            coords.sort_unstable();
            if let Err(k) = representatives.binary_search(&coords) {
                representatives.insert(k, coords.clone());
            }
        }
        let class_of: Vec<usize> = (0..len)
            .map(|i| {
                decode_index(i, &dims, &mut coords);
                coords.sort_unstable();
                representatives.binary_search(&coords).unwrap()
            })
            .collect();
        let mut sizes = vec![0; representatives.len()];
        for &c in &class_of {
            sizes[c] += 1;
        }
        Self {
            relays,
            alphabet,
            class_of,
            sizes,
            representatives,
        }
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn representatives(&self) -> &[Vec<usize>] {
        &self.representatives
    }

    pub fn class_of(&self, flat_index: usize) -> usize {
        self.class_of[flat_index]
    }

    /// Build the symmetric pmf that puts mass `weights[k]` on class `k`, spread
    /// evenly across the tuples of the class.
    pub fn to_pmf(&self, weights: &[f64]) -> Result<SymmetricPmf> {
        if weights.len() != self.len() {
            return domain(format!(
                "expected {} orbit weights, got {}",
                self.len(),
                weights.len()
            ));
        }
        let probs = self.expand(weights);
        SymmetricPmf::new(self.relays, self.alphabet, probs)
    }

    /// Expand orbit masses to a flat table without validation.
    pub fn expand(&self, weights: &[f64]) -> Vec<f64> {
        self.class_of
            .iter()
            .map(|&c| weights[c] / self.sizes[c] as f64)
            .collect()
    }

    /// Orbit masses of a symmetric pmf.
    pub fn weights_of(&self, pmf: &SymmetricPmf) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        for (i, &p) in pmf.probs().iter().enumerate() {
            w[self.class_of[i]] += p;
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn identical_uniform_bits_share_one_bit() {
        let pmf = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(close(multi_information(&pmf, &[0, 1]).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn independent_pair_has_zero_multi_information() {
        let pmf = JointPmf::new(vec![2, 2], vec![0.25; 4]).unwrap();
        assert!(close(multi_information(&pmf, &[0, 1]).unwrap(), 0.0, 1e-15));
    }

    #[test]
    fn singleton_and_empty_subsets_give_zero() {
        let pmf = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(multi_information(&pmf, &[1]).unwrap(), 0.0);
        assert_eq!(multi_information(&pmf, &[]).unwrap(), 0.0);
    }

    #[test]
    fn bad_subset_is_a_domain_error() {
        let pmf = JointPmf::new(vec![2, 2], vec![0.25; 4]).unwrap();
        assert!(matches!(
            multi_information(&pmf, &[0, 2]),
            Err(CoreError::Domain(_))
        ));
        assert!(matches!(
            multi_information(&pmf, &[1, 1]),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn conditioning_on_a_full_copy_gives_zero() {
        // (X1, X2, U) with U = index of (X1, X2)
        let base = [0.4, 0.1, 0.1, 0.4];
        let mut probs = vec![0.0; 16];
        for (i, &p) in base.iter().enumerate() {
            probs[i * 4 + i] = p;
        }
        let joint = JointPmf::new(vec![2, 2, 4], probs).unwrap();
        let v = conditional_multi_information(&joint, &[0, 1]).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn conditioning_on_independent_variable_changes_nothing() {
        let base = [0.4, 0.1, 0.1, 0.4];
        let u = [0.3, 0.7];
        let probs: Vec<f64> = base
            .iter()
            .flat_map(|&p| u.iter().map(move |&q| p * q))
            .collect();
        let joint = JointPmf::new(vec![2, 2, 2], probs).unwrap();
        let plain = JointPmf::new(vec![2, 2], base.to_vec()).unwrap();
        let a = conditional_multi_information(&joint, &[0, 1]).unwrap();
        let b = multi_information(&plain, &[0, 1]).unwrap();
        assert!(close(a, b, 1e-12));
    }

    #[test]
    fn symmetrize_averages_with_transpose() {
        let pmf = JointPmf::new(vec![2, 2], vec![0.5, 0.3, 0.1, 0.1]).unwrap();
        let sym = symmetrize(&pmf).unwrap();
        let expect = [0.5, 0.2, 0.2, 0.1];
        for (a, b) in sym.probs().iter().zip(expect) {
            assert!(close(*a, b, 1e-15));
        }
    }

    #[test]
    fn symmetrize_is_identity_on_symmetric_input() {
        let probs = vec![0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1];
        let pmf = JointPmf::new(vec![2, 2, 2], probs.clone()).unwrap();
        let sym = symmetrize(&pmf).unwrap();
        for (a, b) in sym.probs().iter().zip(&probs) {
            assert!(close(*a, *b, 1e-15));
        }
    }

    #[test]
    fn asymmetric_table_is_rejected() {
        let err = SymmetricPmf::new(2, 2, vec![0.5, 0.3, 0.1, 0.1]).unwrap_err();
        assert!(matches!(err, CoreError::NotSymmetric(_)));
    }

    #[test]
    fn unnormalized_table_is_rejected() {
        assert!(JointPmf::new(vec![2], vec![0.5, 0.6]).is_err());
        assert!(JointPmf::new(vec![2], vec![1.5, -0.5]).is_err());
        assert!(JointPmf::new(vec![3], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn permutations_enumerate_factorial_count() {
        assert_eq!(permutations(1).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(3)[5], vec![2, 1, 0]);
    }

    #[test]
    fn orbits_count_multisets() {
        // multisets of size M from k symbols: C(M + k - 1, M)
        assert_eq!(Orbits::new(2, 2).len(), 3);
        assert_eq!(Orbits::new(3, 3).len(), 10);
        assert_eq!(Orbits::new(4, 3).len(), 15);
        let orbits = Orbits::new(3, 2);
        assert_eq!(orbits.sizes(), &[1, 3, 3, 1]);
        let pmf = orbits.to_pmf(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(orbits.weights_of(&pmf).len(), 4);
        assert!(close(orbits.weights_of(&pmf)[2], 0.3, 1e-15));
    }
}
