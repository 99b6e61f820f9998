//! Named optical modes and the unitary transformations acting on them.
//!
//! Matrices act on creation operators: `U[(k, i)]` is the amplitude for a
//! photon entering mode `i` to leave in mode `k`. All beamsplitters use a
//! real convention with one signed reflection side, and "reflection" means
//! the photon stays in its input fibre.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum deviation of `U†U` from the identity accepted as unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Index of a mode inside a [`ModeLayout`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId(pub usize);

impl ModeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Ordered set of uniquely labelled modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeLayout {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl ModeLayout {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::Layout("empty mode label".into()));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::Layout(format!("duplicate mode label {label}")));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    /// Looks up a mode by label.
    pub fn mode(&self, label: &str) -> Result<ModeId> {
        self.index
            .get(label)
            .map(|&i| ModeId(i))
            .ok_or_else(|| Error::Layout(format!("unknown mode {label}")))
    }

    pub fn label(&self, mode: ModeId) -> Result<&str> {
        self.labels
            .get(mode.0)
            .map(String::as_str)
            .ok_or_else(|| Error::Layout(format!("mode index {} out of range", mode.0)))
    }

    pub fn check(&self, mode: ModeId) -> Result<ModeId> {
        self.label(mode).map(|_| mode)
    }
}

impl fmt::Display for ModeLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.labels.join(", "))
    }
}

/// Which port of a two-mode block carries the sign flip on reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignedSide {
    First,
    Second,
}

/// A 2×2 complex block acting on an ordered pair of modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block2(pub [[Complex64; 2]; 2]);

impl Block2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Block2([[one, zero], [zero, one]])
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Block2(m.map(|row| row.map(|v| Complex64::new(v, 0.0))))
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let m = &self.0;
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Real beamsplitter block with reflectivity `reflectivity`.
///
/// Reflection amplitudes are `±√R` on the diagonal (negative on the signed
/// side), transmission amplitudes are `+√(1−R)` off the diagonal.
pub fn beamsplitter_block(reflectivity: f64, signed_side: SignedSide) -> Result<Block2> {
    if !(0.0..=1.0).contains(&reflectivity) || reflectivity.is_nan() {
        return Err(Error::Domain {
            what: "reflectivity",
            value: reflectivity,
            domain: "[0, 1]",
        });
    }
    let r = reflectivity.sqrt();
    let t = (1.0 - reflectivity).sqrt();
    let (ra, rb) = match signed_side {
        SignedSide::First => (-r, r),
        SignedSide::Second => (r, -r),
    };
    Ok(Block2::real([[ra, t], [t, rb]]))
}

/// A unitary acting on every mode of a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitUnitary {
    layout: Arc<ModeLayout>,
    matrix: DMatrix<Complex64>,
}

impl CircuitUnitary {
    pub fn identity(layout: Arc<ModeLayout>) -> Self {
        let n = layout.len();
        Self {
            layout,
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Wraps a matrix after checking its shape and unitarity.
    pub fn from_matrix(layout: Arc<ModeLayout>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = layout.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Layout(format!(
                "matrix is {}x{} but layout has {n} modes",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let u = Self { layout, matrix };
        let dev = u.unitarity_error();
        if !(dev < UNITARITY_TOLERANCE) {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unitary (max |U†U - I| = {dev:e})"
            )));
        }
        Ok(u)
    }

    pub fn layout(&self) -> &Arc<ModeLayout> {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Amplitude for input mode `input` to exit in mode `output`.
    pub fn amplitude(&self, output: ModeId, input: ModeId) -> Complex64 {
        self.matrix[(output.0, input.0)]
    }

    /// Max-norm of `U†U − I`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - expected).norm());
            }
        }
        worst
    }

    pub fn adjoint(&self) -> Self {
        Self {
            layout: Arc::clone(&self.layout),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Applies `self` and then `next`.
    pub fn then(&self, next: &CircuitUnitary) -> Result<Self> {
        compose(self, next)
    }

    /// In-place equivalent of `compose(self, embed_ids(block, a, b))`.
    pub fn then_block(&mut self, block: &Block2, a: ModeId, b: ModeId) -> Result<()> {
        self.layout.check(a)?;
        self.layout.check(b)?;
        if a == b {
            return Err(Error::Layout("block needs two distinct modes".into()));
        }
        for col in 0..self.dim() {
            let (xa, xb) = (self.matrix[(a.0, col)], self.matrix[(b.0, col)]);
            self.matrix[(a.0, col)] = block.get(0, 0) * xa + block.get(0, 1) * xb;
            self.matrix[(b.0, col)] = block.get(1, 0) * xa + block.get(1, 1) * xb;
        }
        Ok(())
    }

    /// In-place equivalent of composing with a phase plate on `mode`.
    pub fn then_phase(&mut self, mode: ModeId, phi: f64) -> Result<()> {
        self.layout.check(mode)?;
        let z = Complex64::from_polar(1.0, phi);
        for col in 0..self.dim() {
            self.matrix[(mode.0, col)] *= z;
        }
        Ok(())
    }

    /// Max-norm distance to another unitary on the same layout.
    pub fn distance(&self, other: &CircuitUnitary) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Places `block` on the `(mode_a, mode_b)` subspace, identity elsewhere.
pub fn embed(
    block: &Block2,
    mode_a: &str,
    mode_b: &str,
    layout: &Arc<ModeLayout>,
) -> Result<CircuitUnitary> {
    let a = layout.mode(mode_a)?;
    let b = layout.mode(mode_b)?;
    embed_ids(block, a, b, layout)
}

pub fn embed_ids(
    block: &Block2,
    a: ModeId,
    b: ModeId,
    layout: &Arc<ModeLayout>,
) -> Result<CircuitUnitary> {
    layout.check(a)?;
    layout.check(b)?;
    if a == b {
        return Err(Error::Layout(format!(
            "block needs two distinct modes, got {} twice",
            layout.label(a)?
        )));
    }
    let mut u = CircuitUnitary::identity(Arc::clone(layout));
    let idx = [a.0, b.0];
    for (r, &row) in idx.iter().enumerate() {
        for (c, &col) in idx.iter().enumerate() {
            u.matrix[(row, col)] = block.get(r, c);
        }
    }
    Ok(u)
}

/// Matrix product in application order: `first` acts before `then`.
pub fn compose(first: &CircuitUnitary, then: &CircuitUnitary) -> Result<CircuitUnitary> {
    if first.layout != then.layout {
        return Err(Error::Layout(format!(
            "cannot compose unitaries on layouts {} and {}",
            first.layout, then.layout
        )));
    }
    Ok(CircuitUnitary {
        layout: Arc::clone(&first.layout),
        matrix: &then.matrix * &first.matrix,
    })
}

/// One of the two photons' fibres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Control,
    Target,
}

impl Side {
    pub fn h_label(self) -> &'static str {
        match self {
            Side::Control => "C_H",
            Side::Target => "T_H",
        }
    }

    pub fn v_label(self) -> &'static str {
        match self {
            Side::Control => "C_V",
            Side::Target => "T_V",
        }
    }
}

/// Permutation exchanging two modes.
pub fn swap_modes(mode_a: &str, mode_b: &str, layout: &Arc<ModeLayout>) -> Result<CircuitUnitary> {
    embed(&Block2::real([[0.0, 1.0], [1.0, 0.0]]), mode_a, mode_b, layout)
}

/// 90° splice rotation: exchanges the H and V modes of one fibre.
pub fn hv_swap(side: Side, layout: &Arc<ModeLayout>) -> Result<CircuitUnitary> {
    swap_modes(side.h_label(), side.v_label(), layout)
}

/// Diagonal unitary applying `e^{iφ}` to one mode.
pub fn phase_plate(mode: &str, phi: f64, layout: &Arc<ModeLayout>) -> Result<CircuitUnitary> {
    let id = layout.mode(mode)?;
    let mut u = CircuitUnitary::identity(Arc::clone(layout));
    u.matrix[(id.0, id.0)] = Complex64::from_polar(1.0, phi);
    Ok(u)
}
