//! Beamsplitter networks for the post-selected CNOT gate.
//!
//! The control photon's logical `1` is horizontal polarization and `0` is
//! vertical. Each fibre carries an H and a V mode; loss ports feed dump
//! modes that are never detected.
//!
//! The imperfection model duplicates the whole network on "twin" modes
//! (suffix `2`). The control photon enters in its ordinary modes with
//! amplitude `overlap` and in the twin modes with amplitude
//! `√(1 − overlap²)`; twin modes are orthogonal to the target photon's modes
//! and so never interfere with it. Detectors do not resolve twins.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{coincidence_probabilities, evolve_pair, PostSelection};
use crate::error::{Error, Result};
use crate::modes::{beamsplitter_block, Block2, CircuitUnitary, ModeId, ModeLayout, SignedSide};

/// Logical measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LogicalBasis {
    /// `|0⟩ = |V⟩`, `|1⟩ = |H⟩`
    ZZ,
    /// `|0⟩ = (|H⟩ + |V⟩)/√2`, `|1⟩ = (|H⟩ − |V⟩)/√2`
    XX,
}

impl LogicalBasis {
    pub const ALL: [LogicalBasis; 2] = [LogicalBasis::ZZ, LogicalBasis::XX];

    pub fn name(self) -> &'static str {
        match self {
            LogicalBasis::ZZ => "ZZ",
            LogicalBasis::XX => "XX",
        }
    }

    /// Rows whose logical input turns on the gate's conditional action.
    ///
    /// In the diagonal basis the gate acts with control and target roles
    /// exchanged, so the effective control bit is the target photon's.
    pub fn control_one_rows(self) -> [usize; 2] {
        match self {
            LogicalBasis::ZZ => [0b10, 0b11],
            LogicalBasis::XX => [0b01, 0b11],
        }
    }

    pub fn control_zero_rows(self) -> [usize; 2] {
        match self {
            LogicalBasis::ZZ => [0b00, 0b01],
            LogicalBasis::XX => [0b00, 0b10],
        }
    }
}

impl std::fmt::Display for LogicalBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LogicalBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ZZ" | "zz" => Ok(LogicalBasis::ZZ),
            "XX" | "xx" => Ok(LogicalBasis::XX),
            other => Err(Error::InvalidParameter(format!(
                "unknown basis {other:?} (expected ZZ or XX)"
            ))),
        }
    }
}

/// Ideal encoding/analysis mixer reflectivities `(η3a, η3b, η4a, η4b)`.
pub fn ideal_eta(basis: LogicalBasis) -> (f64, f64, f64, f64) {
    match basis {
        LogicalBasis::ZZ => (1.0, 0.5, 1.0, 0.5),
        LogicalBasis::XX => (0.5, 1.0, 0.5, 1.0),
    }
}

/// Physical parameters of the gate model.
///
/// Outer-coupler reflectivities are those of the physical coupler; the 90°
/// splices around it exchange which polarization sees which value. The η
/// values describe the computational-basis configuration. In the diagonal
/// basis the same four mixers are used with control and target exchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub r_h_central: f64,
    pub r_v_central: f64,
    pub r_h_outer1: f64,
    pub r_v_outer1: f64,
    pub r_h_outer2: f64,
    pub r_v_outer2: f64,
    pub overlap: f64,
    pub eta_3a: f64,
    pub eta_3b: f64,
    pub eta_4a: f64,
    pub eta_4b: f64,
    pub residual_phase_c: f64,
    pub residual_phase_t: f64,
}

impl Default for GateParams {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Mixer reflectivities actually placed on each photon for one basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixers {
    pub control_in: f64,
    pub target_in: f64,
    pub control_out: f64,
    pub target_out: f64,
}

impl GateParams {
    pub fn ideal() -> Self {
        let (eta_3a, eta_3b, eta_4a, eta_4b) = ideal_eta(LogicalBasis::ZZ);
        Self {
            r_h_central: 1.0 / 3.0,
            r_v_central: 1.0,
            r_h_outer1: 1.0 / 3.0,
            r_v_outer1: 1.0,
            r_h_outer2: 1.0 / 3.0,
            r_v_outer2: 1.0,
            overlap: 1.0,
            eta_3a,
            eta_3b,
            eta_4a,
            eta_4b,
            residual_phase_c: 0.0,
            residual_phase_t: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in Param::ALL {
            let v = self.get(p);
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{} is not finite", p.key())));
            }
            if !p.is_phase() && !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain {
                    what: p.key(),
                    value: v,
                    domain: "[0, 1]",
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::RHCentral => self.r_h_central,
            Param::RVCentral => self.r_v_central,
            Param::RHOuter1 => self.r_h_outer1,
            Param::RVOuter1 => self.r_v_outer1,
            Param::RHOuter2 => self.r_h_outer2,
            Param::RVOuter2 => self.r_v_outer2,
            Param::Overlap => self.overlap,
            Param::Eta3a => self.eta_3a,
            Param::Eta3b => self.eta_3b,
            Param::Eta4a => self.eta_4a,
            Param::Eta4b => self.eta_4b,
            Param::ResidualPhaseC => self.residual_phase_c,
            Param::ResidualPhaseT => self.residual_phase_t,
        }
    }

    pub fn set(&mut self, p: Param, v: f64) {
        let slot = match p {
            Param::RHCentral => &mut self.r_h_central,
            Param::RVCentral => &mut self.r_v_central,
            Param::RHOuter1 => &mut self.r_h_outer1,
            Param::RVOuter1 => &mut self.r_v_outer1,
            Param::RHOuter2 => &mut self.r_h_outer2,
            Param::RVOuter2 => &mut self.r_v_outer2,
            Param::Overlap => &mut self.overlap,
            Param::Eta3a => &mut self.eta_3a,
            Param::Eta3b => &mut self.eta_3b,
            Param::Eta4a => &mut self.eta_4a,
            Param::Eta4b => &mut self.eta_4b,
            Param::ResidualPhaseC => &mut self.residual_phase_c,
            Param::ResidualPhaseT => &mut self.residual_phase_t,
        };
        *slot = v;
    }

    pub fn mixers(&self, basis: LogicalBasis) -> Mixers {
        match basis {
            LogicalBasis::ZZ => Mixers {
                control_in: self.eta_3a,
                target_in: self.eta_3b,
                control_out: self.eta_4a,
                target_out: self.eta_4b,
            },
            LogicalBasis::XX => Mixers {
                control_in: self.eta_3b,
                target_in: self.eta_3a,
                control_out: self.eta_4b,
                target_out: self.eta_4a,
            },
        }
    }
}

/// Named scalar fields of [`GateParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Param {
    RHCentral,
    RVCentral,
    RHOuter1,
    RVOuter1,
    RHOuter2,
    RVOuter2,
    Overlap,
    Eta3a,
    Eta3b,
    Eta4a,
    Eta4b,
    ResidualPhaseC,
    ResidualPhaseT,
}

impl Param {
    pub const ALL: [Param; 13] = [
        Param::RHCentral,
        Param::RVCentral,
        Param::RHOuter1,
        Param::RVOuter1,
        Param::RHOuter2,
        Param::RVOuter2,
        Param::Overlap,
        Param::Eta3a,
        Param::Eta3b,
        Param::Eta4a,
        Param::Eta4b,
        Param::ResidualPhaseC,
        Param::ResidualPhaseT,
    ];

    pub const ETAS: [Param; 4] = [Param::Eta3a, Param::Eta3b, Param::Eta4a, Param::Eta4b];

    /// Config-file key.
    pub fn key(self) -> &'static str {
        match self {
            Param::RHCentral => "R_H_central",
            Param::RVCentral => "R_V_central",
            Param::RHOuter1 => "R_H_outer1",
            Param::RVOuter1 => "R_V_outer1",
            Param::RHOuter2 => "R_H_outer2",
            Param::RVOuter2 => "R_V_outer2",
            Param::Overlap => "overlap",
            Param::Eta3a => "eta_3a",
            Param::Eta3b => "eta_3b",
            Param::Eta4a => "eta_4a",
            Param::Eta4b => "eta_4b",
            Param::ResidualPhaseC => "residual_phase_c",
            Param::ResidualPhaseT => "residual_phase_t",
        }
    }

    pub fn from_key(key: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.key() == key)
    }

    pub fn is_phase(self) -> bool {
        matches!(self, Param::ResidualPhaseC | Param::ResidualPhaseT)
    }

    /// Largest interval the parameter may take.
    pub fn domain(self) -> (f64, f64) {
        if self.is_phase() {
            (-std::f64::consts::PI, std::f64::consts::PI)
        } else {
            (0.0, 1.0)
        }
    }
}

/// Labels of one copy of the gate network.
#[derive(Debug, Clone)]
struct NetworkModes {
    c_h: String,
    c_v: String,
    t_h: String,
    t_v: String,
    /// Dump partner of the control fibre's attenuated polarization.
    d1: String,
    /// Dump partner of the other polarization; absent when it is fully reflected.
    d1b: Option<String>,
    d2: String,
    d2b: Option<String>,
}

impl NetworkModes {
    fn ideal() -> Self {
        Self {
            c_h: "C_H".into(),
            c_v: "C_V".into(),
            t_h: "T_H".into(),
            t_v: "T_V".into(),
            d1: "D1".into(),
            d1b: None,
            d2: "D2".into(),
            d2b: None,
        }
    }

    fn full(suffix: &str, dump_suffix: &str) -> Self {
        Self {
            c_h: format!("C_H{suffix}"),
            c_v: format!("C_V{suffix}"),
            t_h: format!("T_H{suffix}"),
            t_v: format!("T_V{suffix}"),
            d1: format!("D1{dump_suffix}"),
            d1b: Some(format!("D1b{dump_suffix}")),
            d2: format!("D2{dump_suffix}"),
            d2b: Some(format!("D2b{dump_suffix}")),
        }
    }

    fn labels(&self) -> Vec<String> {
        let mut v = vec![
            self.c_h.clone(),
            self.c_v.clone(),
            self.t_h.clone(),
            self.t_v.clone(),
            self.d1.clone(),
        ];
        v.extend(self.d1b.clone());
        v.push(self.d2.clone());
        v.extend(self.d2b.clone());
        v
    }
}

fn matched_modes() -> NetworkModes {
    NetworkModes::full("", "")
}

fn twin_modes() -> NetworkModes {
    NetworkModes::full("2", "_2")
}

/// Modes of the ideal network: the two fibres plus one dump per outer coupler.
pub fn ideal_layout() -> Arc<ModeLayout> {
    Arc::new(ModeLayout::new(NetworkModes::ideal().labels()).expect("static labels"))
}

/// Modes of the imperfection model: two full copies of the network.
pub fn model_layout() -> Arc<ModeLayout> {
    let mut labels = matched_modes().labels();
    labels.extend(twin_modes().labels());
    Arc::new(ModeLayout::new(labels).expect("static labels"))
}

/// Incrementally composed network on a fixed layout.
struct Builder {
    layout: Arc<ModeLayout>,
    u: CircuitUnitary,
}

impl Builder {
    fn new(layout: &Arc<ModeLayout>) -> Self {
        Self {
            layout: Arc::clone(layout),
            u: CircuitUnitary::identity(Arc::clone(layout)),
        }
    }

    fn block(&mut self, block: &Block2, a: &str, b: &str) -> Result<()> {
        let (a, b) = (self.layout.mode(a)?, self.layout.mode(b)?);
        self.u.then_block(block, a, b)
    }

    fn splitter(&mut self, r: f64, signed: SignedSide, a: &str, b: &str) -> Result<()> {
        self.block(&beamsplitter_block(r, signed)?, a, b)
    }

    fn swap(&mut self, a: &str, b: &str) -> Result<()> {
        self.block(&Block2::real([[0.0, 1.0], [1.0, 0.0]]), a, b)
    }

    fn phase(&mut self, mode: &str, phi: f64) -> Result<()> {
        if phi != 0.0 {
            let m = self.layout.mode(mode)?;
            self.u.then_phase(m, phi)?;
        }
        Ok(())
    }

    /// Polarization mixer with reflectivity η between one photon's H and V.
    fn mixer(&mut self, eta: f64, h: &str, v: &str) -> Result<()> {
        self.splitter(eta, SignedSide::First, h, v)
    }

    /// Coupler joining control and target fibres; the control side is signed.
    fn central(&mut self, m: &NetworkModes, r_h: f64, r_v: f64) -> Result<()> {
        self.splitter(r_h, SignedSide::First, &m.c_h, &m.t_h)?;
        self.splitter(r_v, SignedSide::First, &m.c_v, &m.t_v)
    }

    /// Outer coupler between a gate fibre and its dump fibre, spliced in with
    /// a 90° rotation on each side. The dump side is signed.
    fn outer(
        &mut self,
        (h, v): (&str, &str),
        (d, db): (&str, Option<&str>),
        r_h: f64,
        r_v: f64,
    ) -> Result<()> {
        self.swap(h, v)?;
        self.splitter(r_h, SignedSide::Second, h, d)?;
        match db {
            Some(db) => self.splitter(r_v, SignedSide::Second, v, db)?,
            None if r_v == 1.0 => {}
            None => {
                return Err(Error::Layout(
                    "outer coupler with R_V < 1 needs a second dump mode".into(),
                ))
            }
        }
        self.swap(h, v)
    }

    fn outers(&mut self, m: &NetworkModes, p: &GateParams) -> Result<()> {
        self.outer(
            (&m.c_h, &m.c_v),
            (&m.d1, m.d1b.as_deref()),
            p.r_h_outer1,
            p.r_v_outer1,
        )?;
        self.outer(
            (&m.t_h, &m.t_v),
            (&m.d2, m.d2b.as_deref()),
            p.r_h_outer2,
            p.r_v_outer2,
        )
    }
}

/// Ideal post-selected CNOT: target Hadamard, central 1/3 coupler, two
/// balancing 1/3 couplers, target Hadamard.
pub fn build_ideal_cnot(layout: &Arc<ModeLayout>) -> Result<CircuitUnitary> {
    let m = NetworkModes::ideal();
    let p = GateParams::ideal();
    let mut b = Builder::new(layout);
    b.mixer(0.5, &m.t_h, &m.t_v)?;
    b.central(&m, p.r_h_central, p.r_v_central)?;
    b.outers(&m, &p)?;
    b.mixer(0.5, &m.t_h, &m.t_v)?;
    Ok(b.u)
}

/// Imperfection model on [`model_layout`] for one basis configuration.
pub fn build_model_circuit(params: &GateParams, basis: LogicalBasis) -> Result<CircuitUnitary> {
    build_model_circuit_on(params, basis, &model_layout())
}

pub fn build_model_circuit_on(
    params: &GateParams,
    basis: LogicalBasis,
    layout: &Arc<ModeLayout>,
) -> Result<CircuitUnitary> {
    params.validate()?;
    let copies = [matched_modes(), twin_modes()];
    let mix = params.mixers(basis);
    let mut b = Builder::new(layout);

    // Source mismatch: reflection keeps amplitude `overlap` in the matched mode.
    let x2 = params.overlap * params.overlap;
    b.splitter(x2, SignedSide::Second, &copies[0].c_h, &copies[1].c_h)?;
    b.splitter(x2, SignedSide::Second, &copies[0].c_v, &copies[1].c_v)?;

    for m in &copies {
        b.mixer(mix.control_in, &m.c_h, &m.c_v)?;
        b.mixer(mix.target_in, &m.t_h, &m.t_v)?;
        b.central(m, params.r_h_central, params.r_v_central)?;
        b.outers(m, params)?;
        b.phase(&m.c_v, params.residual_phase_c)?;
        b.phase(&m.t_v, params.residual_phase_t)?;
        b.mixer(mix.control_out, &m.c_h, &m.c_v)?;
        b.mixer(mix.target_out, &m.t_h, &m.t_v)?;
    }
    Ok(b.u)
}

/// Input and detector modes with their logical meaning.
#[derive(Debug, Clone)]
pub struct LogicalPorts {
    /// Input mode for logical `[0, 1]` of the control photon.
    pub control_in: [ModeId; 2],
    pub target_in: [ModeId; 2],
    /// Detector modes `(mode, bit)` for each photon, twins included.
    pub control_out: Vec<(ModeId, usize)>,
    pub target_out: Vec<(ModeId, usize)>,
    /// `(H, V)` mode pairs seen by the polarization analysers.
    pub analysers: Vec<(ModeId, ModeId)>,
    post_selection: PostSelection,
}

impl LogicalPorts {
    /// Ports found on `layout`; twin modes are included when present.
    pub fn for_layout(layout: &ModeLayout) -> Result<Self> {
        let id = |s: &str| layout.mode(s);
        let control_in = [id("C_V")?, id("C_H")?];
        let target_in = [id("T_V")?, id("T_H")?];
        let mut control_out = vec![(id("C_V")?, 0), (id("C_H")?, 1)];
        let mut target_out = vec![(id("T_V")?, 0), (id("T_H")?, 1)];
        let mut analysers = vec![(id("C_H")?, id("C_V")?), (id("T_H")?, id("T_V")?)];
        for (h, v, out) in [
            ("C_H2", "C_V2", &mut control_out),
            ("T_H2", "T_V2", &mut target_out),
        ] {
            if layout.contains(h) && layout.contains(v) {
                out.push((id(v)?, 0));
                out.push((id(h)?, 1));
                analysers.push((id(h)?, id(v)?));
            }
        }
        let post_selection = PostSelection::new(
            control_out.iter().map(|&(m, _)| m),
            target_out.iter().map(|&(m, _)| m),
        )?;
        Ok(Self {
            control_in,
            target_in,
            control_out,
            target_out,
            analysers,
            post_selection,
        })
    }

    pub fn post_selection(&self) -> &PostSelection {
        &self.post_selection
    }

    pub fn control_bit(&self, mode: ModeId) -> Option<usize> {
        self.control_out.iter().find(|&&(m, _)| m == mode).map(|&(_, b)| b)
    }

    pub fn target_bit(&self, mode: ModeId) -> Option<usize> {
        self.target_out.iter().find(|&&(m, _)| m == mode).map(|&(_, b)| b)
    }
}

/// Central-coupler network used to define the two-photon dip visibility.
fn dip_coincidence(overlap: f64, reflectivity: f64) -> Result<f64> {
    let layout = Arc::new(ModeLayout::new(["C_H", "T_H", "C_H2", "T_H2"])?);
    let mut b = Builder::new(&layout);
    b.splitter(overlap * overlap, SignedSide::Second, "C_H", "C_H2")?;
    b.splitter(reflectivity, SignedSide::First, "C_H", "T_H")?;
    b.splitter(reflectivity, SignedSide::First, "C_H2", "T_H2")?;
    let id = |s: &str| layout.mode(s);
    let ps = PostSelection::new([id("C_H")?, id("C_H2")?], [id("T_H")?, id("T_H2")?])?;
    let state = evolve_pair(&b.u, id("C_H")?, id("T_H")?)?;
    match coincidence_probabilities(&state, &ps) {
        Ok(c) => Ok(c.success_probability),
        Err(Error::DegeneratePostSelection(p)) => Ok(p),
        Err(e) => Err(e),
    }
}

fn check_overlap(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "overlap",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

/// Dip visibility `(C_dist − C(x)) / C_dist` at a coupler of reflectivity `r`.
pub fn overlap_to_visibility_at(x: f64, reflectivity: f64) -> Result<f64> {
    check_overlap(x)?;
    let distinguishable = dip_coincidence(0.0, reflectivity)?;
    if distinguishable <= 0.0 {
        return Err(Error::Domain {
            what: "reflectivity",
            value: reflectivity,
            domain: "(0, 1) for a defined visibility",
        });
    }
    Ok((distinguishable - dip_coincidence(x, reflectivity)?) / distinguishable)
}

/// Dip visibility at the nominal central coupler (`R_H = 1/3`).
pub fn overlap_to_visibility(x: f64) -> Result<f64> {
    overlap_to_visibility_at(x, 1.0 / 3.0)
}

/// Largest visibility reachable at a coupler of reflectivity `r`.
pub fn max_visibility_at(reflectivity: f64) -> Result<f64> {
    overlap_to_visibility_at(1.0, reflectivity)
}

/// Inverse of [`overlap_to_visibility_at`].
///
/// The coincidence rate is a mixture of the matched and the fully
/// distinguishable rates weighted by `x²` and `1 − x²`, so the visibility is
/// `x²` times its maximum.
pub fn visibility_to_overlap_at(v: f64, reflectivity: f64) -> Result<f64> {
    let v_max = max_visibility_at(reflectivity)?;
    if !(0.0..=v_max + 1e-12).contains(&v) || v_max <= 0.0 {
        return Err(Error::Domain {
            what: "visibility",
            value: v,
            domain: "[0, V_max]",
        });
    }
    Ok((v / v_max).clamp(0.0, 1.0).sqrt())
}

pub fn visibility_to_overlap(v: f64) -> Result<f64> {
    visibility_to_overlap_at(v, 1.0 / 3.0)
}

/// Visibility expressed as a fraction of its maximum, `V / V_max`.
pub fn relative_visibility(x: f64) -> Result<f64> {
    Ok(overlap_to_visibility(x)? / max_visibility_at(1.0 / 3.0)?)
}

/// Overlap that yields a given relative visibility `V / V_max`.
pub fn overlap_for_relative_visibility(rel: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rel) {
        return Err(Error::Domain {
            what: "relative visibility",
            value: rel,
            domain: "[0, 1]",
        });
    }
    visibility_to_overlap(rel * max_visibility_at(1.0 / 3.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_eta_values() {
        assert_eq!(ideal_eta(LogicalBasis::ZZ), (1.0, 0.5, 1.0, 0.5));
        assert_eq!(ideal_eta(LogicalBasis::XX), (0.5, 1.0, 0.5, 1.0));
        let p = GateParams::ideal();
        let m = p.mixers(LogicalBasis::XX);
        let (a3, b3, a4, b4) = ideal_eta(LogicalBasis::XX);
        assert_eq!(
            (m.control_in, m.target_in, m.control_out, m.target_out),
            (a3, b3, a4, b4)
        );
    }

    #[test]
    fn networks_are_unitary() {
        let l = ideal_layout();
        assert!(build_ideal_cnot(&l).unwrap().unitarity_error() < 1e-12);
        let mut p = GateParams::ideal();
        p.overlap = 0.7;
        p.r_v_outer1 = 0.9;
        p.residual_phase_t = 0.3;
        for basis in LogicalBasis::ALL {
            assert!(build_model_circuit(&p, basis).unwrap().unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = GateParams::ideal();
        p.overlap = 1.2;
        assert!(build_model_circuit(&p, LogicalBasis::ZZ).is_err());
        let mut p = GateParams::ideal();
        p.eta_3b = f64::NAN;
        assert!(p.validate().is_err());
    }

    #[test]
    fn ideal_builder_needs_dumps() {
        let l = Arc::new(ModeLayout::new(["C_H", "C_V", "T_H", "T_V"]).unwrap());
        assert!(build_ideal_cnot(&l).is_err());
    }

    #[test]
    fn visibility_endpoints() {
        // C_dist = R² + T² = 5/9 and C_match = (T − R)² = 1/9 at R = 1/3.
        let v_max = overlap_to_visibility(1.0).unwrap();
        assert!((v_max - 0.8).abs() < 1e-12);
        assert!(overlap_to_visibility(0.0).unwrap().abs() < 1e-15);
        assert!(overlap_to_visibility(1.1).is_err());
        assert!(visibility_to_overlap(0.9).is_err());
        assert!(visibility_to_overlap(-0.1).is_err());
        // Balanced coupler reaches full visibility.
        assert!((max_visibility_at(0.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn param_keys_round_trip() {
        for p in Param::ALL {
            assert_eq!(Param::from_key(p.key()), Some(p));
        }
        assert_eq!(Param::from_key("bogus"), None);
    }
}
