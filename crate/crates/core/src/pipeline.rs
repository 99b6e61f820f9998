//! Fourfold coincidence counts: parsing, background subtraction,
//! normalization, synthetic generation and bootstrap errors.
//!
//! Count file format, one record per line:
//!
//! ```text
//! # comment
//! basis ZZ
//! input 00 counts 812 3 5 1 acc 1.2 0.8 1.0 0.9 t 600
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::LogicalBasis;
use crate::metrics::{fmt_sig12, label_index, logical_fidelity, TruthTable, LOGICAL_LABELS};

/// Counts for one logical input in one basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub basis: LogicalBasis,
    /// Logical input index, 0..4 for 00, 01, 10, 11.
    pub input: usize,
    /// Raw fourfold counts per logical output.
    pub counts: [u64; 4],
    /// Estimated background counts per logical output.
    pub accidentals: [f64; 4],
    pub integration_time: f64,
}

impl CountRecord {
    pub fn validate(&self) -> Result<()> {
        if self.input >= 4 {
            return Err(Error::InvalidParameter(format!("input index {}", self.input)));
        }
        if self.accidentals.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidParameter(
                "accidental counts must be finite and non-negative".into(),
            ));
        }
        if !(self.integration_time > 0.0) || !self.integration_time.is_finite() {
            return Err(Error::InvalidParameter(
                "integration time must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn input_label(&self) -> &'static str {
        LOGICAL_LABELS[self.input]
    }
}

/// Background-subtracted counts for one record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corrected {
    pub counts: [f64; 4],
    /// Outputs where the subtraction went negative and was clamped to zero.
    pub clamped: [bool; 4],
}

/// `max(0, counts − accidentals)` per output.
pub fn subtract_accidentals(record: &CountRecord) -> Corrected {
    let mut counts = [0.0; 4];
    let mut clamped = [false; 4];
    for o in 0..4 {
        let diff = record.counts[o] as f64 - record.accidentals[o];
        if diff < 0.0 {
            clamped[o] = true;
        } else {
            counts[o] = diff;
        }
    }
    Corrected { counts, clamped }
}

/// Records keyed by `(basis, input)`; a present basis has all four inputs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CountSet {
    records: Vec<CountRecord>,
}

impl CountSet {
    /// Builds a set, rejecting duplicates and incomplete bases.
    pub fn from_records(records: Vec<CountRecord>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (n, r) in records.iter().enumerate() {
            r.validate()?;
            if seen.insert((r.basis, r.input), n).is_some() {
                return Err(Error::DuplicateRecord {
                    line: n + 1,
                    basis: r.basis.to_string(),
                    input: r.input_label().to_string(),
                });
            }
        }
        let set = Self::sorted(records);
        set.check_complete()?;
        Ok(set)
    }

    fn sorted(mut records: Vec<CountRecord>) -> Self {
        records.sort_by_key(|r| (r.basis, r.input));
        Self { records }
    }

    fn check_complete(&self) -> Result<()> {
        for basis in self.bases() {
            for input in 0..4 {
                if self.record(basis, input).is_none() {
                    return Err(Error::MissingRecord {
                        basis: basis.to_string(),
                        input: LOGICAL_LABELS[input].to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn records(&self) -> &[CountRecord] {
        &self.records
    }

    pub fn bases(&self) -> Vec<LogicalBasis> {
        let mut b: Vec<LogicalBasis> = self.records.iter().map(|r| r.basis).collect();
        b.dedup();
        b
    }

    pub fn has_basis(&self, basis: LogicalBasis) -> bool {
        self.records.iter().any(|r| r.basis == basis)
    }

    pub fn record(&self, basis: LogicalBasis, input: usize) -> Option<&CountRecord> {
        self.records
            .iter()
            .find(|r| r.basis == basis && r.input == input)
    }

    fn rows(&self, basis: LogicalBasis) -> Result<[&CountRecord; 4]> {
        if !self.has_basis(basis) {
            return Err(Error::MissingBasis(basis.to_string()));
        }
        let mut out = Vec::with_capacity(4);
        for input in 0..4 {
            out.push(self.record(basis, input).ok_or_else(|| Error::MissingRecord {
                basis: basis.to_string(),
                input: LOGICAL_LABELS[input].to_string(),
            })?);
        }
        Ok(out.try_into().expect("four rows"))
    }

    /// Writes the line-oriented count file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for basis in self.bases() {
            let _ = writeln!(s, "basis {basis}");
            for r in self.records.iter().filter(|r| r.basis == basis) {
                let c = r.counts;
                let a: Vec<String> = r.accidentals.iter().map(|&v| fmt_sig12(v)).collect();
                let _ = writeln!(
                    s,
                    "input {} counts {} {} {} {} acc {} t {}",
                    r.input_label(),
                    c[0],
                    c[1],
                    c[2],
                    c[3],
                    a.join(" "),
                    fmt_sig12(r.integration_time)
                );
            }
        }
        s
    }
}

/// Splits a line into `(1-based column, token)`.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, t)| (line[..s].chars().count() + 1, t))
        .collect()
}

struct LineCursor<'a> {
    line: usize,
    toks: Vec<(usize, &'a str)>,
    pos: usize,
    end_col: usize,
}

impl<'a> LineCursor<'a> {
    fn err(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let t = self
            .toks
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err(self.end_col, format!("expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let (col, t) = self.next(kw)?;
        if t != kw {
            return Err(self.err(col, format!("expected `{kw}`, found {t:?}")));
        }
        Ok(())
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<(usize, T)> {
        let (col, t) = self.next(what)?;
        t.parse::<T>()
            .map(|v| (col, v))
            .map_err(|_| self.err(col, format!("invalid {what}: {t:?}")))
    }
}

/// Parses a count file into a [`CountSet`].
pub fn parse_counts(text: &str) -> Result<CountSet> {
    let mut basis: Option<LogicalBasis> = None;
    let mut records: Vec<CountRecord> = Vec::new();
    let mut lines_of: BTreeMap<(LogicalBasis, usize), usize> = BTreeMap::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        let mut cur = LineCursor {
            line: line_no,
            end_col: content.chars().count() + 1,
            toks,
            pos: 0,
        };
        let (col, head) = cur.next("keyword")?;
        match head {
            "basis" => {
                let (col, b) = cur.next("basis name")?;
                basis = Some(
                    b.parse()
                        .map_err(|_| cur.err(col, format!("unknown basis {b:?}")))?,
                );
            }
            "input" => {
                let current = basis.ok_or_else(|| cur.err(col, "data line before `basis` header"))?;
                let (col, label) = cur.next("input label")?;
                let input = label_index(label)
                    .ok_or_else(|| cur.err(col, format!("unknown input {label:?}")))?;
                cur.keyword("counts")?;
                let mut counts = [0u64; 4];
                for c in counts.iter_mut() {
                    *c = cur.number::<u64>("count")?.1;
                }
                cur.keyword("acc")?;
                let mut accidentals = [0.0; 4];
                for a in accidentals.iter_mut() {
                    let (col, v) = cur.number::<f64>("accidental count")?;
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(cur.err(col, "accidental count must be non-negative"));
                    }
                    *a = v;
                }
                cur.keyword("t")?;
                let (col, t) = cur.number::<f64>("integration time")?;
                if !(t > 0.0) || !t.is_finite() {
                    return Err(cur.err(col, "integration time must be positive"));
                }
                if let Some(&(c, extra)) = cur.toks.get(cur.pos) {
                    return Err(cur.err(c, format!("unexpected trailing token {extra:?}")));
                }
                if lines_of.insert((current, input), line_no).is_some() {
                    return Err(Error::DuplicateRecord {
                        line: line_no,
                        basis: current.to_string(),
                        input: label.to_string(),
                    });
                }
                records.push(CountRecord {
                    basis: current,
                    input,
                    counts,
                    accidentals,
                    integration_time: t,
                });
            }
            other => return Err(cur.err(col, format!("unknown keyword {other:?}"))),
        }
    }
    let set = CountSet::sorted(records);
    set.check_complete()?;
    Ok(set)
}

fn rows_to_table(
    basis: LogicalBasis,
    rows: [[f64; 4]; 4],
    provenance: Vec<String>,
) -> Result<TruthTable> {
    let mut probs = [[0.0; 4]; 4];
    for (input, row) in rows.iter().enumerate() {
        let total: f64 = row.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ZeroTotal {
                basis: basis.to_string(),
                input: LOGICAL_LABELS[input].to_string(),
            });
        }
        for o in 0..4 {
            probs[input][o] = row[o] / total;
        }
    }
    let mut t = TruthTable::new(basis, probs)?;
    t.provenance = provenance;
    Ok(t)
}

fn corrected_rows(set: &CountSet, basis: LogicalBasis) -> Result<([[f64; 4]; 4], Vec<String>)> {
    let mut rows = [[0.0; 4]; 4];
    let mut notes = Vec::new();
    for (input, rec) in set.rows(basis)?.iter().enumerate() {
        let c = subtract_accidentals(rec);
        rows[input] = c.counts;
        for o in 0..4 {
            if c.clamped[o] {
                notes.push(format!(
                    "input {} output {}: accidentals exceed counts, clamped to zero",
                    LOGICAL_LABELS[input], LOGICAL_LABELS[o]
                ));
            }
        }
    }
    Ok((rows, notes))
}

/// Row-normalized background-subtracted counts. Success probabilities are
/// not recoverable from conditional counts and are left absent.
pub fn counts_to_truth_table(set: &CountSet, basis: LogicalBasis) -> Result<TruthTable> {
    let (rows, notes) = corrected_rows(set, basis)?;
    rows_to_table(basis, rows, notes)
}

/// Draws multinomial counts from `table` plus Poisson background with mean
/// `accidental_rate` per output. Deterministic for a fixed seed.
pub fn synth_counts(
    table: &TruthTable,
    trials_per_input: u64,
    accidental_rate: f64,
    seed: u64,
) -> Result<CountSet> {
    if trials_per_input == 0 {
        return Err(Error::InvalidParameter("trials per input must be positive".into()));
    }
    if !(accidental_rate >= 0.0) || !accidental_rate.is_finite() {
        return Err(Error::InvalidParameter(
            "accidental rate must be finite and non-negative".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let background = if accidental_rate > 0.0 {
        Some(Poisson::new(accidental_rate).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };
    let mut records = Vec::with_capacity(4);
    for input in 0..4 {
        let counts = multinomial(&mut rng, trials_per_input, &table.probs[input])?;
        let mut noisy = counts;
        if let Some(bg) = &background {
            for c in noisy.iter_mut() {
                *c += bg.sample(&mut rng) as u64;
            }
        }
        records.push(CountRecord {
            basis: table.basis,
            input,
            counts: noisy,
            accidentals: [accidental_rate; 4],
            integration_time: 1.0,
        });
    }
    CountSet::from_records(records)
}

/// Merges sets covering different bases.
pub fn merge(sets: impl IntoIterator<Item = CountSet>) -> Result<CountSet> {
    CountSet::from_records(sets.into_iter().flat_map(|s| s.records).collect())
}

fn multinomial(rng: &mut ChaCha8Rng, n: u64, probs: &[f64; 4]) -> Result<[u64; 4]> {
    let mut out = [0u64; 4];
    let mut remaining = n;
    let mut mass = 1.0f64;
    for k in 0..3 {
        if remaining == 0 {
            break;
        }
        let p = if mass > 0.0 {
            (probs[k] / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining, p)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(rng);
        out[k] = draw;
        remaining -= draw;
        mass -= probs[k];
    }
    out[3] = remaining;
    Ok(out)
}

/// Poisson-resampled standard error of the logical fidelity.
///
/// Resample `i` uses ChaCha stream `i` of `seed`, so the result does not
/// depend on how the resamples are scheduled across threads.
pub fn bootstrap_fidelity_error(
    set: &CountSet,
    basis: LogicalBasis,
    ideal: &TruthTable,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    if resamples < 100 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least 100 resamples, got {resamples}"
        )));
    }
    let (rows, _) = corrected_rows(set, basis)?;
    rows_to_table(basis, rows, Vec::new())?;

    let fidelities: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut resampled = [[0.0; 4]; 4];
            for (input, row) in rows.iter().enumerate() {
                for (o, &mean) in row.iter().enumerate() {
                    resampled[input][o] = if mean > 0.0 {
                        Poisson::new(mean)
                            .map_err(|e| Error::InvalidParameter(e.to_string()))?
                            .sample(&mut rng)
                    } else {
                        0.0
                    };
                }
            }
            let t = rows_to_table(basis, resampled, Vec::new())?;
            logical_fidelity(&t, ideal)
        })
        .collect::<Result<_>>()?;

    let n = fidelities.len() as f64;
    let mean = fidelities.iter().sum::<f64>() / n;
    let var = fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}
