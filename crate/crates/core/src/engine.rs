//! Two-photon evolution through linear-optical unitaries.
//!
//! States live in the two-photon Fock sector and are stored as amplitudes
//! over unordered mode pairs; `{k, k}` denotes double occupancy `|2_k⟩`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::{CircuitUnitary, ModeId};

/// Post-selection success below this is treated as exactly zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Unordered pair of modes, stored with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModePair {
    lo: ModeId,
    hi: ModeId,
}

impl ModePair {
    pub fn new(a: ModeId, b: ModeId) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn lo(self) -> ModeId {
        self.lo
    }

    pub fn hi(self) -> ModeId {
        self.hi
    }

    pub fn is_bunched(self) -> bool {
        self.lo == self.hi
    }
}

/// Two-photon state as amplitudes over canonical mode pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhotonPairState {
    amplitudes: BTreeMap<ModePair, Complex64>,
}

impl PhotonPairState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Single occupied pair with unit amplitude.
    pub fn basis(a: ModeId, b: ModeId) -> Self {
        let mut s = Self::new();
        s.add(ModePair::new(a, b), Complex64::new(1.0, 0.0));
        s
    }

    pub fn add(&mut self, pair: ModePair, amp: Complex64) {
        *self.amplitudes.entry(pair).or_default() += amp;
    }

    pub fn amplitude(&self, a: ModeId, b: ModeId) -> Complex64 {
        self.amplitudes
            .get(&ModePair::new(a, b))
            .copied()
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModePair, Complex64)> + '_ {
        self.amplitudes.iter().map(|(&p, &a)| (p, a))
    }

    pub fn total_probability(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest per-amplitude difference to another state.
    pub fn max_difference(&self, other: &PhotonPairState) -> f64 {
        let keys: BTreeSet<ModePair> = self
            .amplitudes
            .keys()
            .chain(other.amplitudes.keys())
            .copied()
            .collect();
        keys.into_iter()
            .map(|p| (self.amplitude(p.lo, p.hi) - other.amplitude(p.lo, p.hi)).norm())
            .fold(0.0, f64::max)
    }
}

fn check_input(u: &CircuitUnitary, a: ModeId, b: ModeId) -> Result<()> {
    u.layout().check(a)?;
    u.layout().check(b)?;
    Ok(())
}

/// Evolves `a†_i a†_j |0⟩` (normalized) through `u`.
///
/// Amplitude on `{k, l}` is `U[k,i]U[l,j] + U[k,j]U[l,i]` for distinct
/// outputs and `√2·U[k,i]U[k,j]` for bunched outputs, scaled by `1/√2` when
/// the input itself is bunched.
pub fn evolve_pair(u: &CircuitUnitary, i: ModeId, j: ModeId) -> Result<PhotonPairState> {
    check_input(u, i, j)?;
    let n = u.dim();
    let m = u.matrix();
    let input_norm = if i == j { 1.0 / SQRT_2 } else { 1.0 };
    let (i, j) = (i.0, j.0);
    let mut state = PhotonPairState::new();
    for k in 0..n {
        let (uki, ukj) = (m[(k, i)], m[(k, j)]);
        let bunched = uki * ukj * SQRT_2 * input_norm;
        if bunched.norm_sqr() > 0.0 {
            state.add(ModePair::new(ModeId(k), ModeId(k)), bunched);
        }
        for l in (k + 1)..n {
            let amp = (uki * m[(l, j)] + ukj * m[(l, i)]) * input_norm;
            if amp.norm_sqr() > 0.0 {
                state.add(ModePair::new(ModeId(k), ModeId(l)), amp);
            }
        }
    }
    Ok(state)
}

/// Evolves an arbitrary two-photon superposition by linearity.
pub fn evolve_state(u: &CircuitUnitary, input: &PhotonPairState) -> Result<PhotonPairState> {
    let mut out = PhotonPairState::new();
    for (pair, coeff) in input.iter() {
        for (p, a) in evolve_pair(u, pair.lo, pair.hi)?.iter() {
            out.add(p, coeff * a);
        }
    }
    Ok(out)
}

/// Reference evolution by explicit creation-operator algebra on occupation
/// vectors. Shares no formula with [`evolve_pair`].
pub fn brute_force_oracle(u: &CircuitUnitary, i: ModeId, j: ModeId) -> Result<PhotonPairState> {
    check_input(u, i, j)?;
    let n = u.dim();
    let m = u.matrix();

    // |n⟩ → amplitude, starting from the vacuum.
    let mut fock: HashMap<Vec<u8>, Complex64> = HashMap::new();
    fock.insert(vec![0; n], Complex64::new(1.0, 0.0));

    for input in [j.0, i.0] {
        let mut next: HashMap<Vec<u8>, Complex64> = HashMap::new();
        for (occ, amp) in &fock {
            for out in 0..n {
                let coeff = m[(out, input)];
                if coeff == Complex64::new(0.0, 0.0) {
                    continue;
                }
                // a†|n⟩ = √(n+1)|n+1⟩
                let mut raised = occ.clone();
                let factor = ((raised[out] + 1) as f64).sqrt();
                raised[out] += 1;
                *next.entry(raised).or_default() += amp * coeff * factor;
            }
        }
        fock = next;
    }

    // Normalize the input state a†_i a†_j |0⟩ by its own norm.
    let input_norm = if i == j { 2f64.sqrt() } else { 1.0 };

    let mut state = PhotonPairState::new();
    for (occ, amp) in fock {
        let occupied: Vec<usize> = occ
            .iter()
            .enumerate()
            .flat_map(|(mode, &c)| std::iter::repeat_n(mode, c as usize))
            .collect();
        debug_assert_eq!(occupied.len(), 2);
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        state.add(
            ModePair::new(ModeId(occupied[0]), ModeId(occupied[1])),
            amp / input_norm,
        );
    }
    Ok(state)
}

/// Disjoint sets of detector modes for the two photons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostSelection {
    control: BTreeSet<ModeId>,
    target: BTreeSet<ModeId>,
}

impl PostSelection {
    pub fn new(
        control: impl IntoIterator<Item = ModeId>,
        target: impl IntoIterator<Item = ModeId>,
    ) -> Result<Self> {
        let control: BTreeSet<ModeId> = control.into_iter().collect();
        let target: BTreeSet<ModeId> = target.into_iter().collect();
        if control.is_empty() || target.is_empty() {
            return Err(Error::InvalidParameter(
                "post-selection needs non-empty control and target mode sets".into(),
            ));
        }
        if !control.is_disjoint(&target) {
            return Err(Error::InvalidParameter(
                "control and target post-selection modes overlap".into(),
            ));
        }
        Ok(Self { control, target })
    }

    pub fn control(&self) -> &BTreeSet<ModeId> {
        &self.control
    }

    pub fn target(&self) -> &BTreeSet<ModeId> {
        &self.target
    }
}

/// Probabilities of the accepted coincidence outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Coincidences {
    /// `(control mode, target mode) → probability`
    pub outcomes: BTreeMap<(ModeId, ModeId), f64>,
    pub success_probability: f64,
}

impl Coincidences {
    /// Outcome probabilities conditioned on post-selection success.
    pub fn conditional(&self) -> Result<BTreeMap<(ModeId, ModeId), f64>> {
        if self.success_probability < DEGENERACY_THRESHOLD {
            return Err(Error::DegeneratePostSelection(self.success_probability));
        }
        Ok(self
            .outcomes
            .iter()
            .map(|(&k, &p)| (k, p / self.success_probability))
            .collect())
    }
}

/// Keeps outcomes with exactly one photon in each detector set.
pub fn coincidence_probabilities(
    state: &PhotonPairState,
    ps: &PostSelection,
) -> Result<Coincidences> {
    let mut outcomes = BTreeMap::new();
    for (pair, amp) in state.iter() {
        let (a, b) = (pair.lo(), pair.hi());
        let key = if ps.control.contains(&a) && ps.target.contains(&b) {
            (a, b)
        } else if ps.control.contains(&b) && ps.target.contains(&a) {
            (b, a)
        } else {
            continue;
        };
        *outcomes.entry(key).or_insert(0.0) += amp.norm_sqr();
    }
    let success_probability = outcomes.values().sum();
    if success_probability < DEGENERACY_THRESHOLD {
        return Err(Error::DegeneratePostSelection(success_probability));
    }
    Ok(Coincidences {
        outcomes,
        success_probability,
    })
}
