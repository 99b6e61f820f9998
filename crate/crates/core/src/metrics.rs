//! Logical truth tables and the figures of merit computed from them.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{coincidence_probabilities, evolve_pair};
use crate::error::{Error, Result};
use crate::gate::{build_model_circuit, GateParams, LogicalBasis, LogicalPorts};
use crate::modes::{Block2, CircuitUnitary};

/// Logical input/output labels in row-major order.
pub const LOGICAL_LABELS: [&str; 4] = ["00", "01", "10", "11"];

/// Dimension used for the average-gate-fidelity conversion (two qubits).
pub const GATE_DIMENSION: f64 = 4.0;

pub fn label_index(label: &str) -> Option<usize> {
    LOGICAL_LABELS.iter().position(|&l| l == label)
}

/// Conditional output probabilities for each logical input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub basis: LogicalBasis,
    /// `probs[input][output]`, inputs and outputs ordered 00, 01, 10, 11.
    pub probs: [[f64; 4]; 4],
    /// Post-selection success probability per input, when known.
    pub success: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
}

/// Table being assembled by the parser: basis, success, notes, rows so far.
type Partial = (LogicalBasis, Option<[f64; 4]>, Vec<String>, Vec<[f64; 4]>);

impl TruthTable {
    pub fn new(basis: LogicalBasis, probs: [[f64; 4]; 4]) -> Result<Self> {
        let t = Self {
            basis,
            probs,
            success: None,
            provenance: Vec::new(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn with_success(mut self, success: [f64; 4]) -> Result<Self> {
        for (i, &s) in success.iter().enumerate() {
            if !(s > 0.0 && s <= 1.0 + 1e-12) {
                return Err(Error::InvalidTable(format!(
                    "success probability {s} for input {} outside (0, 1]",
                    LOGICAL_LABELS[i]
                )));
            }
        }
        self.success = Some(success);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.probs.iter().enumerate() {
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::InvalidTable(format!(
                    "row {} has a negative or non-finite entry",
                    LOGICAL_LABELS[i]
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidTable(format!(
                    "row {} sums to {sum}, expected 1",
                    LOGICAL_LABELS[i]
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.probs[input][output]
    }

    /// Max absolute element difference.
    pub fn max_difference(&self, other: &TruthTable) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for o in 0..4 {
                worst = worst.max((self.probs[i][o] - other.probs[i][o]).abs());
            }
        }
        worst
    }

    /// Plain-text matrix with a `# basis:` header line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# basis: {}\n", self.basis);
        if let Some(succ) = self.success {
            let _ = writeln!(s, "# success: {}", join_sig(&succ));
        }
        for note in &self.provenance {
            let _ = writeln!(s, "# note: {note}");
        }
        for row in &self.probs {
            let _ = writeln!(s, "{}", join_sig(row));
        }
        s
    }

    /// Parses every table in a text document.
    pub fn parse_text_all(text: &str) -> Result<Vec<TruthTable>> {
        let mut tables = Vec::new();
        let mut current: Option<Partial> = None;
        let finish = |cur: Option<Partial>,
                      line: usize,
                      tables: &mut Vec<TruthTable>|
         -> Result<()> {
            if let Some((basis, success, provenance, rows)) = cur {
                let probs: [[f64; 4]; 4] = rows.try_into().map_err(|_| Error::Parse {
                    line,
                    column: 1,
                    message: "truth table needs exactly 4 rows".into(),
                })?;
                let mut t = TruthTable::new(basis, probs)?;
                t.provenance = provenance;
                if let Some(s) = success {
                    t = t.with_success(s)?;
                }
                tables.push(t);
            }
            Ok(())
        };
        let lines: Vec<&str> = text.lines().collect();
        for (n, raw) in lines.iter().enumerate() {
            let line_no = n + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(b) = rest.strip_prefix("basis:") {
                    finish(current.take(), line_no, &mut tables)?;
                    let basis = b.trim().parse().map_err(|_| Error::Parse {
                        line: line_no,
                        column: 1,
                        message: format!("unknown basis {:?}", b.trim()),
                    })?;
                    current = Some((basis, None, Vec::new(), Vec::new()));
                } else if let Some(s) = rest.strip_prefix("success:") {
                    let cur = current.as_mut().ok_or_else(|| header_missing(line_no))?;
                    cur.1 = Some(parse_four(s, line_no)?);
                } else if let Some(note) = rest.strip_prefix("note:") {
                    let cur = current.as_mut().ok_or_else(|| header_missing(line_no))?;
                    cur.2.push(note.trim().to_string());
                }
                continue;
            }
            let cur = current.as_mut().ok_or_else(|| header_missing(line_no))?;
            cur.3.push(parse_four(line, line_no)?);
        }
        finish(current, lines.len(), &mut tables)?;
        Ok(tables)
    }

    pub fn parse_text(text: &str) -> Result<TruthTable> {
        let mut all = Self::parse_text_all(text)?;
        match all.len() {
            1 => Ok(all.remove(0)),
            n => Err(Error::InvalidTable(format!("expected one table, found {n}"))),
        }
    }
}

fn header_missing(line: usize) -> Error {
    Error::Parse {
        line,
        column: 1,
        message: "data before a `# basis:` header".into(),
    }
}

fn parse_four(s: &str, line: usize) -> Result<[f64; 4]> {
    let vals: Vec<f64> = s
        .split_whitespace()
        .enumerate()
        .map(|(i, tok)| {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line,
                column: i + 1,
                message: format!("not a number: {tok:?}"),
            })
        })
        .collect::<Result<_>>()?;
    vals.try_into().map_err(|v: Vec<f64>| Error::Parse {
        line,
        column: 1,
        message: format!("expected 4 values, found {}", v.len()),
    })
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal that round-trips the 12-significant-digit value.
pub fn fmt_sig12(x: f64) -> String {
    let r = round_sig12(x);
    if r != 0.0 && r.abs() < 1e-4 {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

/// Probabilities below this are rounding noise and print as 0.
const PRINT_FLOOR: f64 = 1e-15;

fn join_sig(vals: &[f64]) -> String {
    vals.iter()
        .map(|&v| fmt_sig12(if v.abs() < PRINT_FLOOR { 0.0 } else { v }))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Ideal logical action in each basis.
///
/// ZZ is CNOT; XX is CNOT with control and target roles exchanged,
/// `(a, b) → (a ⊕ b, b)`.
pub fn ideal_table(basis: LogicalBasis) -> TruthTable {
    let mut probs = [[0.0; 4]; 4];
    for (input, row) in probs.iter_mut().enumerate() {
        let (a, b) = (input >> 1, input & 1);
        let out = match basis {
            LogicalBasis::ZZ => (a << 1) | (a ^ b),
            LogicalBasis::XX => ((a ^ b) << 1) | b,
        };
        row[out] = 1.0;
    }
    TruthTable::new(basis, probs).expect("permutation table")
}

/// Truth table with inputs prepared and outputs analysed in H/V.
///
/// Use this for circuits whose mixers already implement the basis change,
/// such as [`build_model_circuit`] output. The result is tagged `basis`.
pub fn polarization_truth_table(
    circuit: &CircuitUnitary,
    basis: LogicalBasis,
    ports: &LogicalPorts,
) -> Result<TruthTable> {
    let mut probs = [[0.0; 4]; 4];
    let mut success = [0.0; 4];
    for input in 0..4 {
        let (a, b) = (input >> 1, input & 1);
        let state = evolve_pair(circuit, ports.control_in[a], ports.target_in[b])?;
        let coinc = coincidence_probabilities(&state, ports.post_selection()).map_err(|e| match e {
            Error::DegeneratePostSelection(p) => Error::DegenerateRow {
                input: LOGICAL_LABELS[input].to_string(),
                probability: p,
            },
            other => other,
        })?;
        for (&(cm, tm), &p) in &coinc.outcomes {
            let (ca, tb) = match (ports.control_bit(cm), ports.target_bit(tm)) {
                (Some(ca), Some(tb)) => (ca, tb),
                _ => continue,
            };
            probs[input][(ca << 1) | tb] += p / coinc.success_probability;
        }
        success[input] = coinc.success_probability;
    }
    TruthTable::new(basis, probs)?.with_success(success)
}

/// Basis-change unitary on every analyser pair: `V → |0⟩_basis`, `H → |1⟩_basis`.
fn encoder(circuit: &CircuitUnitary, basis: LogicalBasis, ports: &LogicalPorts) -> Result<CircuitUnitary> {
    let mut u = CircuitUnitary::identity(Arc::clone(circuit.layout()));
    if basis == LogicalBasis::XX {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Columns (H, V) map to (H − V)/√2 and (H + V)/√2.
        let w = Block2::real([[s, s], [-s, s]]);
        for &(h, v) in &ports.analysers {
            u.then_block(&w, h, v)?;
        }
    }
    Ok(u)
}

/// Truth table with logical states encoded and analysed in `basis`.
pub fn truth_table(
    circuit: &CircuitUnitary,
    basis: LogicalBasis,
    ports: &LogicalPorts,
) -> Result<TruthTable> {
    let enc = encoder(circuit, basis, ports)?;
    let full = enc.then(circuit)?.then(&enc.adjoint())?;
    polarization_truth_table(&full, basis, ports)
}

/// Truth table of the imperfection model in one basis configuration.
pub fn model_truth_table(params: &GateParams, basis: LogicalBasis) -> Result<TruthTable> {
    let circuit = build_model_circuit(params, basis)?;
    let ports = LogicalPorts::for_layout(circuit.layout())?;
    polarization_truth_table(&circuit, basis, &ports)
}

fn same_basis(a: &TruthTable, b: &TruthTable) -> Result<()> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch {
            left: a.basis.to_string(),
            right: b.basis.to_string(),
        });
    }
    Ok(())
}

/// Mean probability of the ideal output: `(1/4) Σ ideal·measured`.
pub fn logical_fidelity(measured: &TruthTable, ideal: &TruthTable) -> Result<f64> {
    same_basis(measured, ideal)?;
    let mut f = 0.0;
    for i in 0..4 {
        for o in 0..4 {
            f += ideal.probs[i][o] * measured.probs[i][o];
        }
    }
    Ok(f / 4.0)
}

/// Process-fidelity bounds from two complementary logical fidelities:
/// `F_ZZ + F_XX − 1 ≤ F_P ≤ min(F_ZZ, F_XX)`. The lower bound is not clamped.
pub fn process_fidelity_bounds(f_zz: f64, f_xx: f64) -> (f64, f64) {
    (f_zz + f_xx - 1.0, f_zz.min(f_xx))
}

/// `(d·F_P + 1)/(d + 1)` with `d = 4`.
pub fn average_fidelity(f_p: f64) -> f64 {
    (GATE_DIMENSION * f_p + 1.0) / (GATE_DIMENSION + 1.0)
}

pub fn average_fidelity_bounds(low: f64, high: f64) -> (f64, f64) {
    (average_fidelity(low), average_fidelity(high))
}

/// `(Σ √(M_ij E_ij))² / 16`.
pub fn similarity(model: &TruthTable, experiment: &TruthTable) -> Result<f64> {
    same_basis(model, experiment)?;
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let (m, e) = (model.probs[i][j], experiment.probs[i][j]);
            if m < 0.0 || e < 0.0 {
                return Err(Error::InvalidTable(format!(
                    "negative entry at ({}, {})",
                    LOGICAL_LABELS[i], LOGICAL_LABELS[j]
                )));
            }
            sum += (m * e).sqrt();
        }
    }
    Ok(sum * sum / 16.0)
}

/// Logical fidelities and the bounds derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub f_zz: Option<f64>,
    pub f_xx: Option<f64>,
    pub f_zz_error: Option<f64>,
    pub f_xx_error: Option<f64>,
    pub f_p_low: Option<f64>,
    pub f_p_high: Option<f64>,
    pub f_avg_low: Option<f64>,
    pub f_avg_high: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl FidelityReport {
    pub fn new(
        f_zz: Option<(f64, Option<f64>)>,
        f_xx: Option<(f64, Option<f64>)>,
    ) -> Self {
        let mut r = FidelityReport {
            f_zz: f_zz.map(|f| f.0),
            f_xx: f_xx.map(|f| f.0),
            f_zz_error: f_zz.and_then(|f| f.1),
            f_xx_error: f_xx.and_then(|f| f.1),
            f_p_low: None,
            f_p_high: None,
            f_avg_low: None,
            f_avg_high: None,
            notes: Vec::new(),
        };
        if let (Some(zz), Some(xx)) = (r.f_zz, r.f_xx) {
            let (lo, hi) = process_fidelity_bounds(zz, xx);
            let (alo, ahi) = average_fidelity_bounds(lo, hi);
            r.f_p_low = Some(lo);
            r.f_p_high = Some(hi);
            r.f_avg_low = Some(alo);
            r.f_avg_high = Some(ahi);
            if lo < 0.0 {
                r.notes
                    .push("process-fidelity lower bound is negative and reported unclamped".into());
            }
        } else {
            r.notes
                .push("process-fidelity bounds need both ZZ and XX tables".into());
        }
        r
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, f, e) in [
            ("F_ZZ", self.f_zz, self.f_zz_error),
            ("F_XX", self.f_xx, self.f_xx_error),
        ] {
            if let Some(f) = f {
                match e {
                    Some(e) => {
                        let _ = writeln!(s, "{name} = {f:.4} +/- {e:.4}");
                    }
                    None => {
                        let _ = writeln!(s, "{name} = {f:.4}");
                    }
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.f_p_low, self.f_p_high) {
            let _ = writeln!(s, "{lo:.4} <= F_P <= {hi:.4}");
        }
        if let (Some(lo), Some(hi)) = (self.f_avg_low, self.f_avg_high) {
            let _ = writeln!(s, "{lo:.4} <= F_avg <= {hi:.4}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// Bar heights for plotting: one row per (basis, input, output).
pub fn plot_csv(tables: &[TruthTable]) -> String {
    let mut s = String::from("basis,input,output,probability\n");
    for t in tables {
        for (i, row) in t.probs.iter().enumerate() {
            for (o, p) in row.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    t.basis,
                    LOGICAL_LABELS[i],
                    LOGICAL_LABELS[o],
                    fmt_sig12(*p)
                );
            }
        }
    }
    s
}
