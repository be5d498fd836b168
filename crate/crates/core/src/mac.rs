//! Discrete memoryless multiple-access channels.

use crate::error::{domain, CoreError, Result};
use crate::info::{decode_index, encode_index, permutations, JointPmf, TABLE_TOL};

/// Channel law `p(y | x_1, ..., x_M)` over a common input alphabet.
///
/// Rows are indexed by the relay-major mixed-radix index of the input tuple;
/// each row holds `|Y|` probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMac {
    relays: usize,
    inputs: usize,
    outputs: usize,
    table: Vec<f64>,
    symmetric: bool,
}

impl DiscreteMac {
    pub fn new(relays: usize, inputs: usize, outputs: usize, table: Vec<f64>) -> Result<Self> {
        if relays == 0 || inputs == 0 || outputs == 0 {
            return domain("relay count and alphabet sizes must be positive");
        }
        let rows = inputs.checked_pow(relays as u32).ok_or_else(|| {
            CoreError::Capacity(format!("|X|^M overflows for |X|={inputs}, M={relays}"))
        })?;
        if table.len() != rows * outputs {
            return Err(CoreError::InvalidTable(format!(
                "expected {} channel entries ({rows} rows of {outputs}), got {}",
                rows * outputs,
                table.len()
            )));
        }
        for (r, row) in table.chunks(outputs).enumerate() {
            if let Some(p) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
                return Err(CoreError::InvalidTable(format!(
                    "row {r} has entry {p}, expected a non-negative probability"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > TABLE_TOL {
                return Err(CoreError::InvalidTable(format!(
                    "row {r} sums to {total}, expected 1"
                )));
            }
        }
        let symmetric = is_permutation_invariant(relays, inputs, outputs, &table);
        Ok(Self {
            relays,
            inputs,
            outputs,
            table,
            symmetric,
        })
    }

    /// Deterministic channel `y = f(x_1, ..., x_M)`.
    pub fn deterministic(
        relays: usize,
        inputs: usize,
        outputs: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let dims = vec![inputs; relays];
        let rows: usize = dims.iter().product();
        let mut table = vec![0.0; rows * outputs];
        let mut coords = vec![0; relays];
        for r in 0..rows {
            decode_index(r, &dims, &mut coords);
            let y = f(&coords);
            if y >= outputs {
                return domain(format!("output {y} out of range for input {coords:?}"));
            }
            table[r * outputs + y] = 1.0;
        }
        Self::new(relays, inputs, outputs, table)
    }

    /// Binary adder MAC: `Y = X_1 + ... + X_M` over the integers.
    pub fn binary_adder(relays: usize) -> Self {
        Self::deterministic(relays, 2, relays + 1, |x| x.iter().sum())
            .expect("adder outputs fit the alphabet")
    }

    /// Noiseless channel that reveals the whole input tuple.
    pub fn identity(relays: usize, inputs: usize) -> Result<Self> {
        let dims = vec![inputs; relays];
        let outputs: usize = dims.iter().product();
        Self::deterministic(relays, inputs, outputs, |x| encode_index(x, &dims))
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn input_alphabet(&self) -> usize {
        self.inputs
    }

    pub fn output_alphabet(&self) -> usize {
        self.outputs
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Number of input tuples, `|X|^M`.
    pub fn rows(&self) -> usize {
        self.table.len() / self.outputs
    }

    pub fn row(&self, input_index: usize) -> &[f64] {
        &self.table[input_index * self.outputs..(input_index + 1) * self.outputs]
    }

    /// True iff the law is invariant under every permutation of the inputs.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Joint pmf of `(X_1, ..., X_M, Y)` for the given input pmf.
    pub fn joint(&self, input: &JointPmf) -> Result<JointPmf> {
        if input.dims() != vec![self.inputs; self.relays].as_slice() {
            return domain(format!(
                "input pmf dimensions {:?} do not match the channel ({} relays, |X|={})",
                input.dims(),
                self.relays,
                self.inputs
            ));
        }
        let probs = input
            .probs()
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| self.row(r).iter().map(move |&w| p * w))
            .collect();
        let mut dims = input.dims().to_vec();
        dims.push(self.outputs);
        JointPmf::new(dims, probs)
    }

    /// `I(X_1 ... X_M; Y)` in bits.
    pub fn mutual_information(&self, input: &JointPmf) -> Result<f64> {
        let joint = self.joint(input)?;
        let xs: Vec<usize> = (0..self.relays).collect();
        joint.mutual_information(&xs, &[self.relays], &[])
    }
}

fn is_permutation_invariant(relays: usize, inputs: usize, outputs: usize, table: &[f64]) -> bool {
    let dims = vec![inputs; relays];
    let rows = table.len() / outputs;
    let perms = permutations(relays);
    let mut coords = vec![0; relays];
    let mut permuted = vec![0; relays];
    (0..rows).all(|r| {
        decode_index(r, &dims, &mut coords);
        perms.iter().all(|perm| {
            for (dst, &src) in permuted.iter_mut().zip(perm) {
                *dst = coords[src];
            }
            let q = encode_index(&permuted, &dims);
            (0..outputs).all(|y| {
                (table[r * outputs + y] - table[q * outputs + y]).abs() <= TABLE_TOL
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adder_is_symmetric() {
        let mac = DiscreteMac::binary_adder(3);
        assert!(mac.is_symmetric());
        assert_eq!(mac.rows(), 8);
        assert_eq!(mac.row(0b011), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn ordered_channel_is_not_symmetric() {
        // y = x_1 (ignores relay 2)
        let mac = DiscreteMac::deterministic(2, 2, 2, |x| x[0]).unwrap();
        assert!(!mac.is_symmetric());
    }

    #[test]
    fn identity_channel_is_not_symmetric_for_two_relays() {
        let mac = DiscreteMac::identity(2, 2).unwrap();
        assert!(!mac.is_symmetric());
    }

    #[test]
    fn adder_output_entropy() {
        let mac = DiscreteMac::binary_adder(2);
        let input = JointPmf::new(vec![2, 2], vec![0.25; 4]).unwrap();
        let mi = mac.mutual_information(&input).unwrap();
        assert!((mi - 1.5).abs() < 1e-12);
    }

    #[test]
    fn malformed_rows_rejected() {
        let err = DiscreteMac::new(1, 2, 2, vec![0.5, 0.5, 0.7, 0.2]).unwrap_err();
        assert!(err.to_string().contains("row 1"));
        assert!(DiscreteMac::new(1, 2, 2, vec![0.5; 3]).is_err());
    }
}
