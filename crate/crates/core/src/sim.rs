//! Monte Carlo simulation of the Marton scheme on tiny discrete MACs.
//!
//! Each relay gets an i.i.d. codebook of `2^{n(r + r')}` words arranged as
//! `2^{nr}` bins of `2^{nr'}` words. The encoder picks, for the message tuple,
//! a word in every bin such that the tuple is jointly typical with the target
//! pmf; the receiver scans for word tuples jointly typical with `y`.
//!
//! Typicality is the strong kind: every joint symbol frequency must lie within
//! `epsilon * p` of its target `p`, and symbols with `p = 0` must not occur.
//! Joint typicality implies typicality of every marginal, which lets both
//! searches prune each relay's candidates exactly before the product scan.

use std::ops::ControlFlow;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::discrete::MartonRates;
use crate::error::{domain, CoreError, Result};
use crate::info::SymmetricPmf;
use crate::mac::DiscreteMac;
use crate::random::stream_rng;

pub const MAX_BLOCKLENGTH: usize = 20;
/// Limit on the total number of codewords over all relays.
pub const MAX_CODEWORDS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub epsilon: f64,
    /// One entry per relay.
    pub rates: Vec<MartonRates>,
    pub trials: usize,
    pub seed: u64,
    /// Sample the channel output; when false the most likely output is used.
    pub noise: bool,
}

impl SimConfig {
    /// Equal rates at every relay.
    pub fn symmetric(relays: usize, n: usize, epsilon: f64, rates: MartonRates, trials: usize, seed: u64) -> Self {
        Self {
            n,
            epsilon,
            rates: vec![rates; relays],
            trials,
            seed,
            noise: true,
        }
    }

    /// `(bins, words per bin)` for every relay.
    pub fn codebook_shape(&self) -> Vec<(usize, usize)> {
        self.rates
            .iter()
            .map(|r| (words(self.n, r.r), words(self.n, r.r_prime)))
            .collect()
    }

    /// Sum of per-relay message rates actually simulated, after rounding the
    /// bin counts to integers.
    pub fn effective_rate(&self) -> f64 {
        self.codebook_shape()
            .iter()
            .map(|&(bins, _)| (bins as f64).log2() / self.n as f64)
            .sum()
    }

    fn validate(&self, relays: usize) -> Result<()> {
        if self.n == 0 || self.n > MAX_BLOCKLENGTH {
            return domain(format!("blocklength {} must be in [1, {MAX_BLOCKLENGTH}]", self.n));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return domain(format!("epsilon {} must be positive and finite", self.epsilon));
        }
        if self.rates.len() != relays {
            return domain(format!("expected {relays} rate pairs, got {}", self.rates.len()));
        }
        for r in &self.rates {
            if !(r.r >= 0.0 && r.r_prime >= 0.0 && r.total() <= 64.0) {
                return domain(format!("rates ({}, {}) out of range", r.r, r.r_prime));
            }
        }
        let total = self
            .rates
            .iter()
            .map(|r| 2f64.powf(self.n as f64 * r.total()).round().max(1.0))
            .sum::<f64>();
        if total > MAX_CODEWORDS as f64 {
            return Err(CoreError::Capacity(format!(
                "{total} codewords exceed the limit {MAX_CODEWORDS}"
            )));
        }
        Ok(())
    }
}

/// The scheme needs a symmetric input pmf but any channel law.
fn check_dims(mac: &DiscreteMac, pmf: &SymmetricPmf) -> Result<()> {
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

fn words(n: usize, rate: f64) -> usize {
    2f64.powf(n as f64 * rate).round().max(1.0) as usize
}

/// Codewords of every relay, flat `bins * per_bin * n` symbols; word
/// `(w, w')` sits at index `w * per_bin + w'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebooks {
    n: usize,
    books: Vec<Book>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Book {
    bins: usize,
    per_bin: usize,
    symbols: Vec<u8>,
}

impl Codebooks {
    pub fn blocklength(&self) -> usize {
        self.n
    }

    pub fn relays(&self) -> usize {
        self.books.len()
    }

    pub fn bins(&self, relay: usize) -> usize {
        self.books[relay].bins
    }

    pub fn per_bin(&self, relay: usize) -> usize {
        self.books[relay].per_bin
    }

    pub fn word(&self, relay: usize, bin: usize, index: usize) -> &[u8] {
        self.word_at(relay, bin * self.books[relay].per_bin + index)
    }

    fn word_at(&self, relay: usize, flat: usize) -> &[u8] {
        &self.books[relay].symbols[flat * self.n..(flat + 1) * self.n]
    }

    fn len(&self, relay: usize) -> usize {
        self.books[relay].bins * self.books[relay].per_bin
    }
}

fn sample<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left a sliver above the last cumulative sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn draw_codebooks<R: Rng + ?Sized>(rng: &mut R, marginal: &[f64], config: &SimConfig) -> Codebooks {
    let books = config
        .codebook_shape()
        .into_iter()
        .map(|(bins, per_bin)| Book {
            bins,
            per_bin,
            symbols: (0..bins * per_bin * config.n)
                .map(|_| sample(rng, marginal) as u8)
                .collect(),
        })
        .collect();
    Codebooks { n: config.n, books }
}

/// I.i.d. codebooks for trial `trial`, drawn from `marginal` on every relay.
pub fn build_codebooks(mac: &DiscreteMac, marginal: &[f64], config: &SimConfig, trial: u64) -> Result<Codebooks> {
    config.validate(mac.relays())?;
    if marginal.len() != mac.input_alphabet() {
        return domain(format!(
            "marginal has {} entries, channel input alphabet has {}",
            marginal.len(),
            mac.input_alphabet()
        ));
    }
    crate::info::JointPmf::new(vec![marginal.len()], marginal.to_vec())?;
    Ok(draw_codebooks(&mut stream_rng(config.seed, trial), marginal, config))
}

/// Strong typicality of a sequence of symbol indices against `target`.
pub fn is_typical(symbols: impl IntoIterator<Item = usize>, target: &[f64], n: usize, epsilon: f64) -> bool {
    let mut counts = vec![0usize; target.len()];
    for s in symbols {
        if target[s] == 0.0 {
            return false;
        }
        counts[s] += 1;
    }
    counts_typical(&counts, target, n, epsilon)
}

fn counts_typical(counts: &[usize], target: &[f64], n: usize, epsilon: f64) -> bool {
    let n = n as f64;
    counts.iter().zip(target).all(|(&c, &p)| {
        if p == 0.0 {
            c == 0
        } else {
            (c as f64 / n - p).abs() <= epsilon * p * (1.0 + 1e-12)
        }
    })
}

/// Visit every tuple of the candidate lists, first list most significant.
fn for_each_tuple(lists: &[Vec<usize>], mut f: impl FnMut(&[usize]) -> ControlFlow<()>) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut pos = vec![0usize; lists.len()];
    let mut tuple: Vec<usize> = lists.iter().map(|l| l[0]).collect();
    loop {
        if f(&tuple).is_break() {
            return;
        }
        let mut k = lists.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < lists[k].len() {
                tuple[k] = lists[k][pos[k]];
                break;
            }
            pos[k] = 0;
            tuple[k] = lists[k][0];
        }
    }
}

/// Target distributions used by the typicality tests.
struct Targets {
    relays: usize,
    nx: usize,
    ny: usize,
    /// `p(x_1..x_M)`.
    inputs: Vec<f64>,
    /// `p(x_1..x_M, y)`.
    joint: Vec<f64>,
    /// `p(x)`, common to all relays.
    marginal: Vec<f64>,
    /// `p(x_m, y)` per relay.
    pairs: Vec<Vec<f64>>,
}

impl Targets {
    fn new(mac: &DiscreteMac, pmf: &SymmetricPmf) -> Result<Self> {
        let joint = mac.joint(pmf.joint())?;
        let m = mac.relays();
        let pairs = (0..m)
            .map(|i| Ok(joint.marginal(&[i, m])?.probs().to_vec()))
            .collect::<Result<_>>()?;
        Ok(Self {
            relays: m,
            nx: mac.input_alphabet(),
            ny: mac.output_alphabet(),
            inputs: pmf.probs().to_vec(),
            joint: joint.probs().to_vec(),
            marginal: pmf.marginal(),
            pairs,
        })
    }

    fn input_index(&self, words: &[&[u8]], t: usize) -> usize {
        words.iter().fold(0, |acc, w| acc * self.nx + w[t] as usize)
    }
}

/// Result of the bin search at the encoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Encoded {
    /// Chosen in-bin index per relay.
    Found(Vec<usize>),
    Failure,
}

/// Search the bins of `messages` for a jointly typical word tuple; the first
/// hit in lexicographic order of the in-bin indices wins.
pub fn encode(
    codebooks: &Codebooks,
    mac: &DiscreteMac,
    pmf: &SymmetricPmf,
    messages: &[usize],
    epsilon: f64,
) -> Result<Encoded> {
    check_dims(mac, pmf)?;
    check_messages(codebooks, messages)?;
    Ok(encode_with(codebooks, &Targets::new(mac, pmf)?, messages, epsilon))
}

fn check_messages(codebooks: &Codebooks, messages: &[usize]) -> Result<()> {
    if messages.len() != codebooks.relays() {
        return domain(format!(
            "expected {} messages, got {}",
            codebooks.relays(),
            messages.len()
        ));
    }
    for (m, &w) in messages.iter().enumerate() {
        if w >= codebooks.bins(m) {
            return domain(format!("message {w} of relay {m} out of range"));
        }
    }
    Ok(())
}

fn encode_with(codebooks: &Codebooks, targets: &Targets, messages: &[usize], epsilon: f64) -> Encoded {
    let n = codebooks.n;
    let lists: Vec<Vec<usize>> = messages
        .iter()
        .enumerate()
        .map(|(m, &w)| {
            (0..codebooks.per_bin(m))
                .filter(|&j| {
                    let word = codebooks.word(m, w, j);
                    is_typical(word.iter().map(|&s| s as usize), &targets.marginal, n, epsilon)
                })
                .collect()
        })
        .collect();
    let mut found = None;
    let mut counts = vec![0usize; targets.inputs.len()];
    for_each_tuple(&lists, |tuple| {
        let words: Vec<&[u8]> = tuple
            .iter()
            .enumerate()
            .map(|(m, &j)| codebooks.word(m, messages[m], j))
            .collect();
        counts.iter_mut().for_each(|c| *c = 0);
        for t in 0..n {
            counts[targets.input_index(&words, t)] += 1;
        }
        if counts_typical(&counts, &targets.inputs, n, epsilon) {
            found = Some(tuple.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found.map_or(Encoded::Failure, Encoded::Found)
}

/// Result of the receiver's scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    /// The unique message tuple with a jointly typical word tuple.
    Messages(Vec<usize>),
    /// No word tuple is jointly typical with `y`.
    NotFound,
    /// Two different message tuples pass.
    Ambiguous,
}

/// Exhaustive joint-typicality decoding of `y`.
pub fn decode(
    codebooks: &Codebooks,
    mac: &DiscreteMac,
    pmf: &SymmetricPmf,
    y: &[usize],
    epsilon: f64,
) -> Result<Decoded> {
    check_dims(mac, pmf)?;
    if y.len() != codebooks.n || y.iter().any(|&s| s >= mac.output_alphabet()) {
        return domain("output sequence has the wrong length or alphabet");
    }
    Ok(decode_with(codebooks, &Targets::new(mac, pmf)?, y, epsilon))
}

fn decode_with(codebooks: &Codebooks, targets: &Targets, y: &[usize], epsilon: f64) -> Decoded {
    let n = codebooks.n;
    let ny = targets.ny;
    let lists: Vec<Vec<usize>> = (0..targets.relays)
        .map(|m| {
            (0..codebooks.len(m))
                .filter(|&c| {
                    let word = codebooks.word_at(m, c);
                    is_typical(
                        word.iter().zip(y).map(|(&x, &y)| x as usize * ny + y),
                        &targets.pairs[m],
                        n,
                        epsilon,
                    )
                })
                .collect()
        })
        .collect();
    let mut first: Option<Vec<usize>> = None;
    let mut ambiguous = false;
    let mut counts = vec![0usize; targets.joint.len()];
    for_each_tuple(&lists, |tuple| {
        let words: Vec<&[u8]> = tuple
            .iter()
            .enumerate()
            .map(|(m, &c)| codebooks.word_at(m, c))
            .collect();
        counts.iter_mut().for_each(|c| *c = 0);
        for t in 0..n {
            counts[targets.input_index(&words, t) * ny + y[t]] += 1;
        }
        if !counts_typical(&counts, &targets.joint, n, epsilon) {
            return ControlFlow::Continue(());
        }
        let messages: Vec<usize> = tuple
            .iter()
            .enumerate()
            .map(|(m, &c)| c / codebooks.per_bin(m))
            .collect();
        match &first {
            None => {
                first = Some(messages);
                ControlFlow::Continue(())
            }
            Some(f) if *f == messages => ControlFlow::Continue(()),
            Some(_) => {
                ambiguous = true;
                ControlFlow::Break(())
            }
        }
    });
    match (first, ambiguous) {
        (_, true) => Decoded::Ambiguous,
        (Some(m), false) => Decoded::Messages(m),
        (None, false) => Decoded::NotFound,
    }
}

/// Aggregated Monte Carlo counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trials: usize,
    /// No jointly typical tuple in the message bins.
    pub encode_failures: usize,
    /// The transmitted tuple was not recognised.
    pub not_found: usize,
    /// A wrong message tuple also passed.
    pub ambiguous: usize,
    /// Trials whose decoded messages differ from the sent ones.
    pub decode_errors: usize,
}

impl TrialOutcome {
    /// `decode_errors / trials`; `None` when no trials ran.
    pub fn error_rate(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.decode_errors as f64 / self.trials as f64)
    }

    pub fn encode_failure_rate(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.encode_failures as f64 / self.trials as f64)
    }

    fn merge(self, other: Self) -> Self {
        Self {
            trials: self.trials + other.trials,
            encode_failures: self.encode_failures + other.encode_failures,
            not_found: self.not_found + other.not_found,
            ambiguous: self.ambiguous + other.ambiguous,
            decode_errors: self.decode_errors + other.decode_errors,
        }
    }
}

fn run_one(mac: &DiscreteMac, targets: &Targets, config: &SimConfig, trial: u64) -> TrialOutcome {
    let mut rng: ChaCha8Rng = stream_rng(config.seed, trial);
    let codebooks = draw_codebooks(&mut rng, &targets.marginal, config);
    let messages: Vec<usize> = (0..targets.relays)
        .map(|m| rng.random_range(0..codebooks.bins(m)))
        .collect();
    let mut outcome = TrialOutcome {
        trials: 1,
        ..TrialOutcome::default()
    };
    let chosen = match encode_with(&codebooks, targets, &messages, config.epsilon) {
        Encoded::Found(j) => j,
        Encoded::Failure => {
            outcome.encode_failures = 1;
            vec![0; targets.relays]
        }
    };
    let words: Vec<&[u8]> = (0..targets.relays)
        .map(|m| codebooks.word(m, messages[m], chosen[m]))
        .collect();
    let y: Vec<usize> = (0..config.n)
        .map(|t| {
            let row = mac.row(targets.input_index(&words, t));
            if config.noise {
                sample(&mut rng, row)
            } else {
                // first maximum, for reproducibility
                row.iter()
                    .enumerate()
                    .fold(0, |best, (i, &p)| if p > row[best] { i } else { best })
            }
        })
        .collect();
    match decode_with(&codebooks, targets, &y, config.epsilon) {
        Decoded::Messages(m) if m == messages => {}
        Decoded::Messages(_) => outcome.decode_errors = 1,
        Decoded::NotFound => {
            outcome.not_found = 1;
            outcome.decode_errors = 1;
        }
        Decoded::Ambiguous => {
            outcome.ambiguous = 1;
            outcome.decode_errors = 1;
        }
    }
    outcome
}

/// Run `config.trials` independent trials, each with a fresh codebook and
/// uniformly random messages. Trial `k` draws everything from stream `k` of
/// the seed, so the outcome does not depend on thread scheduling.
pub fn run_trials(mac: &DiscreteMac, pmf: &SymmetricPmf, config: &SimConfig) -> Result<TrialOutcome> {
    check_dims(mac, pmf)?;
    config.validate(mac.relays())?;
    if mac.input_alphabet() > u8::MAX as usize {
        return domain("input alphabets above 255 symbols are not supported");
    }
    let targets = Targets::new(mac, pmf)?;
    Ok((0..config.trials as u64)
        .into_par_iter()
        .map(|k| run_one(mac, &targets, config, k))
        .reduce(TrialOutcome::default, TrialOutcome::merge))
}
