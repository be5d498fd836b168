//! Text format for small discrete channels.
//!
//! ```text
//! # binary adder, two relays
//! relays 2
//! inputs 2
//! outputs 3
//! channel
//! 1 0 0      # x = (0, 0)
//! 0 1 0      # x = (0, 1)
//! 0 1 0
//! 0 0 1
//! pmf        # optional, |X|^M entries over any number of lines
//! 0.25 0.25 0.25 0.25
//! ```
//!
//! Channel rows follow the input tuples in mixed-radix order with relay 1 most
//! significant. `#` starts a comment.

use std::fmt;
use std::path::Path;

use cran_core::{DiscreteMac, SymmetricPmf};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFile {
    pub mac: DiscreteMac,
    pub pmf: Option<SymmetricPmf>,
}

#[derive(Clone, Copy, PartialEq)]
enum Block {
    Header,
    Channel,
    Pmf,
}

pub fn read(path: &Path) -> Result<ChannelFile, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ChannelFile, ParseError> {
    let mut relays = None;
    let mut inputs = None;
    let mut outputs = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut pmf: Vec<f64> = Vec::new();
    let mut pmf_line = 0;
    let mut block = Block::Header;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let first = words.next().expect("non-empty line");
        match first {
            "relays" | "inputs" | "outputs" => {
                let value: usize = match (words.next().map(str::parse), words.next()) {
                    (Some(Ok(v)), None) if v > 0 => v,
                    _ => return err(line, format!("`{first}` needs one positive integer")),
                };
                let slot = match first {
                    "relays" => &mut relays,
                    "inputs" => &mut inputs,
                    _ => &mut outputs,
                };
                if slot.replace(value).is_some() {
                    return err(line, format!("`{first}` given twice"));
                }
                block = Block::Header;
            }
            "channel" | "pmf" => {
                if words.next().is_some() {
                    return err(line, format!("`{first}` takes no arguments"));
                }
                block = if first == "channel" {
                    Block::Channel
                } else {
                    pmf_line = line;
                    Block::Pmf
                };
            }
            _ => {
                let values = content
                    .split_whitespace()
                    .map(|w| {
                        w.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| ParseError {
                                line,
                                message: format!("`{w}` is not a number"),
                            })
                    })
                    .collect::<Result<Vec<f64>, _>>()?;
                match block {
                    Block::Header => return err(line, format!("unexpected `{first}`")),
                    Block::Channel => rows.push((line, values)),
                    Block::Pmf => pmf.extend(values),
                }
            }
        }
    }

    let (Some(m), Some(nx), Some(ny)) = (relays, inputs, outputs) else {
        return err(0, "`relays`, `inputs` and `outputs` are all required");
    };
    let tuples = nx
        .checked_pow(m as u32)
        .filter(|&t| t <= 1 << 16)
        .ok_or_else(|| ParseError {
            line: 0,
            message: format!("{nx}^{m} input tuples is too many"),
        })?;
    if rows.len() != tuples {
        let line = rows.last().map_or(0, |r| r.0);
        return err(line, format!("expected {tuples} channel rows, found {}", rows.len()));
    }
    let mut table = Vec::with_capacity(tuples * ny);
    for (line, row) in &rows {
        if row.len() != ny {
            return err(*line, format!("expected {ny} entries, found {}", row.len()));
        }
        let sum: f64 = row.iter().sum();
        if row.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return err(*line, format!("row is not a distribution (sum {sum})"));
        }
        table.extend(row.iter().map(|p| p / sum));
    }
    let mac = DiscreteMac::new(m, nx, ny, table).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })?;
    let pmf = if pmf_line == 0 {
        None
    } else {
        if pmf.len() != tuples {
            return err(pmf_line, format!("pmf needs {tuples} entries, found {}", pmf.len()));
        }
        let sum: f64 = pmf.iter().sum();
        if pmf.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return err(pmf_line, format!("pmf is not a distribution (sum {sum})"));
        }
        let probs = pmf.iter().map(|p| p / sum).collect();
        Some(SymmetricPmf::new(m, nx, probs).map_err(|e| ParseError {
            line: pmf_line,
            message: e.to_string(),
        })?)
    };
    Ok(ChannelFile { mac, pmf })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ADDER: &str = "relays 2\ninputs 2\noutputs 3\nchannel\n1 0 0\n0 1 0\n0 1 0\n0 0 1\n";

    #[test]
    fn parses_adder() {
        let file = parse(ADDER).unwrap();
        assert_eq!(file.mac, DiscreteMac::binary_adder(2));
        assert!(file.pmf.is_none());
    }

    #[test]
    fn parses_pmf_over_lines() {
        let text = format!("{ADDER}pmf\n0.4 0.1\n0.1 0.4 # correlated\n");
        let file = parse(&text).unwrap();
        assert_eq!(file.pmf.unwrap().probs(), &[0.4, 0.1, 0.1, 0.4]);
    }

    #[test]
    fn reports_line_numbers() {
        let bad = ADDER.replace("0 1 0\n0 0 1", "0 1 0\n0 0.5 0.4");
        assert_eq!(parse(&bad).unwrap_err().line, 8);
        let bad = ADDER.replace("1 0 0\n", "1 0 x\n");
        let e = parse(&bad).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.message.contains("`x`"));
        let bad = ADDER.replace("0 0 1", "0 1");
        assert_eq!(parse(&bad).unwrap_err().line, 8);
        assert_eq!(parse("relays 2\n2 3\n").unwrap_err().line, 2);
        assert_eq!(parse("relays 2\nrelays 3\n").unwrap_err().line, 2);
    }

    #[test]
    fn asymmetric_pmf_is_rejected() {
        let text = format!("{ADDER}pmf\n0.4 0.2 0.0 0.4\n");
        assert_eq!(parse(&text).unwrap_err().line, 9);
    }

    #[test]
    fn missing_rows() {
        let text = "relays 2\ninputs 2\noutputs 3\nchannel\n1 0 0\n";
        assert!(parse(text).unwrap_err().message.contains("expected 4 channel rows"));
    }
}
