//! Fitting the imperfection model to measured truth tables.
//!
//! The objective combines the similarities of both bases. A coarse grid over
//! the free parameters picks a starting point, which a compass search then
//! refines until the objective stops improving.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{apply_param, parse_entries, parse_f64};
use crate::error::{Error, Result};
use crate::gate::{overlap_to_visibility, relative_visibility, GateParams, LogicalBasis, Param};
use crate::metrics::{model_truth_table, similarity, TruthTable};

/// Scalarization of the two per-basis similarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// `S_ZZ · S_XX`
    Product,
    /// `ln S_ZZ + ln S_XX`; same maximizer as the product.
    LogSum,
}

impl Objective {
    fn combine(self, s_zz: f64, s_xx: f64) -> f64 {
        match self {
            Objective::Product => s_zz * s_xx,
            Objective::LogSum => s_zz.ln() + s_xx.ln(),
        }
    }
}

/// What to fit and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSpec {
    /// Free parameters of the full-model stage.
    pub free: Vec<Param>,
    pub bounds: Vec<(Param, f64, f64)>,
    /// Grid points per free parameter in the coarse stage.
    pub grid_points: usize,
    /// Refinement stops once a sweep improves the objective by less than this.
    pub tolerance: f64,
    pub objective: Objective,
    /// Values of the parameters that are held fixed.
    pub base: GateParams,
}

impl Default for FitSpec {
    fn default() -> Self {
        let mut free = vec![Param::Overlap];
        free.extend(Param::ETAS);
        Self {
            free,
            bounds: Vec::new(),
            grid_points: 5,
            tolerance: 1e-12,
            objective: Objective::Product,
            base: GateParams::ideal(),
        }
    }
}

fn default_bounds(p: Param) -> (f64, f64) {
    if p == Param::Overlap {
        return (0.0, 1.0);
    }
    if p.is_phase() {
        return (-0.5, 0.5);
    }
    let v = GateParams::ideal().get(p);
    ((v - 0.15).max(0.0), (v + 0.15).min(1.0))
}

impl FitSpec {
    pub fn bounds_of(&self, p: Param) -> (f64, f64) {
        self.bounds
            .iter()
            .rev()
            .find(|b| b.0 == p)
            .map(|&(_, lo, hi)| (lo, hi))
            .unwrap_or_else(|| default_bounds(p))
    }

    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::Fit("no free parameters".into()));
        }
        if self.grid_points < 2 {
            return Err(Error::Fit("grid needs at least 2 points per parameter".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Fit("tolerance must be positive".into()));
        }
        for &p in &self.free {
            let (lo, hi) = self.bounds_of(p);
            let (dlo, dhi) = p.domain();
            if !(lo <= hi) || lo < dlo || hi > dhi {
                return Err(Error::Fit(format!(
                    "bounds [{lo}, {hi}] for {} leave its domain [{dlo}, {dhi}]",
                    p.key()
                )));
            }
        }
        self.base.validate()
    }

    /// Reads a spec from the `key = value` format. GateParams keys set the
    /// fixed base values.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut spec = FitSpec::default();
        for e in parse_entries(text)? {
            if apply_param(&mut spec.base, &e)? {
                continue;
            }
            let bad = |message: String| Error::Config {
                line: e.line,
                message,
            };
            match e.key.as_str() {
                "free" => {
                    spec.free = e
                        .value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|k| {
                            Param::from_key(k).ok_or_else(|| bad(format!("unknown parameter {k:?}")))
                        })
                        .collect::<Result<_>>()?;
                    spec.free.dedup();
                }
                "grid_points" => {
                    spec.grid_points = e
                        .value
                        .parse()
                        .map_err(|_| bad(format!("invalid grid_points {:?}", e.value)))?;
                }
                "tolerance" => spec.tolerance = parse_f64(&e)?,
                "objective" => {
                    spec.objective = match e.value.as_str() {
                        "product" => Objective::Product,
                        "log_sum" => Objective::LogSum,
                        other => return Err(bad(format!("unknown objective {other:?}"))),
                    }
                }
                key => {
                    let Some(name) = key.strip_prefix("bound.") else {
                        return Err(bad(format!("unknown key {key:?}")));
                    };
                    let p = Param::from_key(name)
                        .ok_or_else(|| bad(format!("unknown parameter {name:?}")))?;
                    let vals: Vec<f64> = e
                        .value
                        .split_whitespace()
                        .map(|v| v.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad(format!("invalid bounds {:?}", e.value)))?;
                    let [lo, hi] = vals[..] else {
                        return Err(bad("bounds need two numbers: lo hi".into()));
                    };
                    spec.bounds.push((p, lo, hi));
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// One line of the similarity table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub s_zz: f64,
    pub s_xx: f64,
    pub objective: f64,
    pub params: Option<GateParams>,
}

/// Similarities of three nested models against the same data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    /// IDEAL, INTERFERENCE, FULL MODEL
    pub rows: [ReportRow; 3],
    pub fitted: Option<GateParams>,
    pub objective: f64,
    /// Dip visibility implied by the fitted overlap.
    pub visibility: Option<f64>,
    /// The same visibility as a fraction of its maximum.
    pub relative_visibility: Option<f64>,
}

pub const ROW_LABELS: [&str; 3] = ["IDEAL", "INTERFERENCE", "FULL MODEL"];

impl SimilarityReport {
    /// A report carrying only similarity values, without fitted parameters.
    pub fn from_similarities(s_zz: [f64; 3], s_xx: [f64; 3]) -> Self {
        let rows = std::array::from_fn(|i| ReportRow {
            label: ROW_LABELS[i].to_string(),
            s_zz: s_zz[i],
            s_xx: s_xx[i],
            objective: s_zz[i] * s_xx[i],
            params: None,
        });
        Self {
            rows,
            fitted: None,
            objective: s_zz[2] * s_xx[2],
            visibility: None,
            relative_visibility: None,
        }
    }

    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<14}{:>8}{:>8}", "MODEL TYPE", "S_ZZ", "S_XX");
        for r in &self.rows {
            let _ = writeln!(s, "{:<14}{:>8.3}{:>8.3}", r.label, r.s_zz, r.s_xx);
        }
        if let Some(p) = &self.fitted {
            let _ = writeln!(s, "\nfitted parameters:");
            for param in Param::ALL {
                let _ = writeln!(s, "  {:<18}{:.6}", param.key(), p.get(param));
            }
        }
        if let (Some(v), Some(rel)) = (self.visibility, self.relative_visibility) {
            let _ = writeln!(s, "visibility {v:.4} ({:.2}% of maximum)", rel * 100.0);
        }
        s
    }
}

/// Similarity gains between successive rows, in percentage points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    /// `(INTERFERENCE − IDEAL, FULL − INTERFERENCE)` for ZZ.
    pub zz: (f64, f64),
    pub xx: (f64, f64),
}

impl ErrorBreakdown {
    pub fn to_text(&self) -> String {
        format!(
            "imperfect interference: {:.1} (ZZ) {:.1} (XX) percentage points\n\
             encoding/analysis:      {:.1} (ZZ) {:.1} (XX) percentage points\n",
            self.zz.0, self.xx.0, self.zz.1, self.xx.1
        )
    }
}

pub fn report_errors_breakdown(report: &SimilarityReport) -> ErrorBreakdown {
    let [ideal, inter, full] = &report.rows;
    ErrorBreakdown {
        zz: (
            (inter.s_zz - ideal.s_zz) * 100.0,
            (full.s_zz - inter.s_zz) * 100.0,
        ),
        xx: (
            (inter.s_xx - ideal.s_xx) * 100.0,
            (full.s_xx - inter.s_xx) * 100.0,
        ),
    }
}

/// Result of [`fit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutcome {
    pub params: GateParams,
    pub report: SimilarityReport,
}

struct Problem<'a> {
    e_zz: &'a TruthTable,
    e_xx: &'a TruthTable,
    objective: Objective,
}

impl Problem<'_> {
    fn similarities(&self, p: &GateParams) -> Result<(f64, f64)> {
        let m_zz = model_truth_table(p, LogicalBasis::ZZ)?;
        let m_xx = model_truth_table(p, LogicalBasis::XX)?;
        Ok((similarity(&m_zz, self.e_zz)?, similarity(&m_xx, self.e_xx)?))
    }

    fn value(&self, p: &GateParams) -> Result<f64> {
        let (zz, xx) = self.similarities(p)?;
        let v = self.objective.combine(zz, xx);
        if v.is_nan() {
            return Err(Error::Fit("objective evaluated to NaN".into()));
        }
        Ok(v)
    }

    fn row(&self, label: &str, p: &GateParams) -> Result<ReportRow> {
        let (s_zz, s_xx) = self.similarities(p)?;
        Ok(ReportRow {
            label: label.to_string(),
            s_zz,
            s_xx,
            objective: self.objective.combine(s_zz, s_xx),
            params: Some(p.clone()),
        })
    }
}

fn with_values(base: &GateParams, free: &[Param], x: &[f64]) -> GateParams {
    let mut p = base.clone();
    for (&param, &v) in free.iter().zip(x) {
        p.set(param, v);
    }
    p
}

fn grid_value(lo: f64, hi: f64, points: usize, k: usize) -> f64 {
    if k + 1 == points {
        hi
    } else {
        lo + (hi - lo) * k as f64 / (points - 1) as f64
    }
}

/// Maximizes over `free` starting from the coarse grid and `warm`.
fn optimize(
    problem: &Problem<'_>,
    base: &GateParams,
    free: &[Param],
    bounds: &[(f64, f64)],
    grid_points: usize,
    tolerance: f64,
    warm: Option<&GateParams>,
) -> Result<(GateParams, f64)> {
    let dims = free.len();
    let total = grid_points
        .checked_pow(dims as u32)
        .filter(|&t| t <= 10_000_000)
        .ok_or_else(|| Error::Fit("coarse grid is too large".into()))?;

    let point = |mut idx: usize| -> Vec<f64> {
        // Last parameter varies fastest, so index order is lexicographic.
        let mut x = vec![0.0; dims];
        for d in (0..dims).rev() {
            let (lo, hi) = bounds[d];
            x[d] = grid_value(lo, hi, grid_points, idx % grid_points);
            idx /= grid_points;
        }
        x
    };

    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|i| problem.value(&with_values(base, free, &point(i))))
        .collect::<Result<_>>()?;

    // Strictly-greater scan: lowest index wins ties.
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let mut x = point(best);
    let mut fx = values[best];

    if let Some(w) = warm {
        let wx: Vec<f64> = free.iter().map(|&p| w.get(p)).collect();
        let inside = wx
            .iter()
            .zip(bounds)
            .all(|(&v, &(lo, hi))| (lo..=hi).contains(&v));
        if inside {
            let fw = problem.value(&with_values(base, free, &wx))?;
            if fw >= fx {
                x = wx;
                fx = fw;
            }
        }
    }

    // Compass search with step halving.
    let mut steps: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (grid_points - 1) as f64)
        .collect();
    let min_steps: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| ((hi - lo) * 1e-9).max(1e-12))
        .collect();
    for _ in 0..100_000 {
        let start = fx;
        let mut moved = false;
        for d in 0..dims {
            for dir in [1.0, -1.0] {
                let (lo, hi) = bounds[d];
                let cand_v = (x[d] + dir * steps[d]).clamp(lo, hi);
                if cand_v == x[d] {
                    continue;
                }
                let mut cand = x.clone();
                cand[d] = cand_v;
                let fc = problem.value(&with_values(base, free, &cand))?;
                if fc > fx {
                    x = cand;
                    fx = fc;
                    moved = true;
                    break;
                }
            }
        }
        let fine = steps.iter().zip(&min_steps).all(|(s, m)| s <= m);
        if !moved {
            if fine {
                break;
            }
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
        } else if fx - start < tolerance && steps.iter().zip(&min_steps).all(|(s, m)| *s <= m * 1e3)
        {
            break;
        }
    }

    if !fx.is_finite() {
        return Err(Error::Fit(format!("best objective is not finite ({fx})")));
    }
    Ok((with_values(base, free, &x), fx))
}

/// Fits the model to a pair of measured truth tables and builds the
/// three-row similarity report.
///
/// The interference stage frees only `overlap`; the full stage frees
/// `spec.free` together with `overlap` and starts from the interference
/// optimum, so its objective is never lower.
pub fn fit(e_zz: &TruthTable, e_xx: &TruthTable, spec: &FitSpec) -> Result<FitOutcome> {
    spec.validate()?;
    if e_zz.basis != LogicalBasis::ZZ || e_xx.basis != LogicalBasis::XX {
        return Err(Error::BasisMismatch {
            left: format!("{}/{}", e_zz.basis, e_xx.basis),
            right: "ZZ/XX".into(),
        });
    }
    e_zz.validate()?;
    e_xx.validate()?;
    let problem = Problem {
        e_zz,
        e_xx,
        objective: spec.objective,
    };

    let ideal = GateParams::ideal();
    let ideal_row = problem.row(ROW_LABELS[0], &ideal)?;

    let overlap_only = [Param::Overlap];
    let (inter, _) = optimize(
        &problem,
        &spec.base,
        &overlap_only,
        &[spec.bounds_of(Param::Overlap)],
        spec.grid_points.max(11),
        spec.tolerance,
        Some(&ideal),
    )?;
    let inter_row = problem.row(ROW_LABELS[1], &inter)?;

    let mut free = vec![Param::Overlap];
    free.extend(spec.free.iter().copied().filter(|&p| p != Param::Overlap));
    let bounds: Vec<(f64, f64)> = free.iter().map(|&p| spec.bounds_of(p)).collect();
    let (full, objective) = optimize(
        &problem,
        &spec.base,
        &free,
        &bounds,
        spec.grid_points,
        spec.tolerance,
        Some(&inter),
    )?;
    let full_row = problem.row(ROW_LABELS[2], &full)?;

    let report = SimilarityReport {
        rows: [ideal_row, inter_row, full_row],
        fitted: Some(full.clone()),
        objective,
        visibility: Some(overlap_to_visibility(full.overlap)?),
        relative_visibility: Some(relative_visibility(full.overlap)?),
    };
    Ok(FitOutcome {
        params: full,
        report,
    })
}
