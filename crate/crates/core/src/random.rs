//! Seeded random instances: pmfs, symmetric pmfs, symmetric channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::info::{symmetrize, JointPmf, Orbits, SymmetricPmf};
use crate::mac::DiscreteMac;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform sample from the probability simplex with `len` vertices.
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    normalize(&mut v);
    v
}

/// Simplex sample with a fraction of entries zeroed, so supports vary.
pub fn sparse_dirichlet<R: Rng + ?Sized>(rng: &mut R, len: usize, zero_prob: f64) -> Vec<f64> {
    let mut v = dirichlet(rng, len);
    for x in v.iter_mut() {
        if rng.random::<f64>() < zero_prob {
            *x = 0.0;
        }
    }
    if v.iter().all(|&x| x == 0.0) {
        v[rng.random_range(0..len)] = 1.0;
    }
    normalize(&mut v);
    v
}

pub(crate) fn normalize(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
}

pub fn random_joint<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> JointPmf {
    let len = dims.iter().product();
    JointPmf::new(dims.to_vec(), dirichlet(rng, len)).expect("simplex sample is a pmf")
}

/// Symmetrized random pmf over `X^M`.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, relays: usize, alphabet: usize) -> SymmetricPmf {
    let joint = JointPmf::new(
        vec![alphabet; relays],
        sparse_dirichlet(rng, alphabet.pow(relays as u32), 0.2),
    )
    .expect("simplex sample is a pmf");
    symmetrize(&joint).expect("common alphabet")
}

/// Random channel whose rows depend only on the multiset of inputs.
pub fn random_symmetric_mac<R: Rng + ?Sized>(
    rng: &mut R,
    relays: usize,
    inputs: usize,
    outputs: usize,
) -> DiscreteMac {
    let orbits = Orbits::new(relays, inputs);
    let rows: Vec<Vec<f64>> = (0..orbits.len())
        .map(|_| sparse_dirichlet(rng, outputs, 0.3))
        .collect();
    let table = (0..inputs.pow(relays as u32))
        .flat_map(|r| rows[orbits.class_of(r)].iter().copied())
        .collect();
    DiscreteMac::new(relays, inputs, outputs, table).expect("rows are distributions")
}
