//! Qubit noise channels in Kraus form.
//!
//! Catalogue (all parameters live in [0, 1]):
//! - phase damping: {√(1−p)·I, √p·|0⟩⟨0|, √p·|1⟩⟨1|}
//! - phase flip: {√(1−p)·I, √p·σz}
//! - bit flip: {√(1−p)·I, √p·σx}
//! - bit-phase flip: {√(1−p)·I, √p·σy}
//! - depolarizing: {√(1−3p/4)·I, √(p/4)·σx, √(p/4)·σy, √(p/4)·σz}
//! - amplitude damping: {`[[1,0],[0,√(1−γ)]]`, `[[0,√γ],[0,0]]`}
//!
//! A channel acts on a register qubit as ρ ↦ Σᵢ Ẽᵢ ρ Ẽᵢ†, with Ẽᵢ the Kraus
//! operator embedded at that factor. `sample_kraus_branch` unravels the sum
//! into a stochastic trajectory whose expectation is the deterministic map.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, QubitIndex};
use crate::states;

/// Completeness tolerance for Σ Eᵢ†Eᵢ = I.
const CPTP_TOL: f64 = 1e-12;

/// Branch probabilities below this floor are treated as impossible; it also
/// guards the normalization of post-branch states.
pub const BRANCH_PROBABILITY_FLOOR: f64 = 1e-15;

/// Identifier of a catalogue channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    PhaseDamping,
    PhaseFlip,
    BitFlip,
    BitPhaseFlip,
    Depolarizing,
    AmplitudeDamping,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 6] = [
        ChannelKind::PhaseDamping,
        ChannelKind::PhaseFlip,
        ChannelKind::BitFlip,
        ChannelKind::BitPhaseFlip,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::PhaseDamping => "phase_damping",
            ChannelKind::PhaseFlip => "phase_flip",
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::BitPhaseFlip => "bit_phase_flip",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::AmplitudeDamping => "amplitude_damping",
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownChannel(s.to_string()))
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A named set of single-qubit Kraus operators with its channel parameter.
///
/// Construction verifies the completeness relation, so every value of this
/// type is a CPTP map.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kind: ChannelKind,
    parameter: f64,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    fn new(kind: ChannelKind, parameter: f64, operators: Vec<CMatrix>) -> Result<Self> {
        if !(0.0..=1.0).contains(&parameter) {
            return Err(Error::Domain {
                name: "channel parameter",
                range: "[0, 1]",
                value: parameter,
            });
        }
        let ch = Self {
            kind,
            parameter,
            operators,
        };
        let deviation = ch.completeness_deviation();
        if deviation > CPTP_TOL {
            return Err(Error::KrausCompleteness { deviation });
        }
        Ok(ch)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn parameter(&self) -> f64 {
        self.parameter
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// Max-entry deviation of Σ Eᵢ†Eᵢ from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = CMatrix::zeros(2);
        for op in &self.operators {
            sum = &sum + &(&op.dagger() * op);
        }
        sum.max_abs_diff(&CMatrix::identity(2))
    }

    /// Serializable view: operator entries as [re, im] pairs, row-major.
    pub fn record(&self) -> ChannelRecord {
        ChannelRecord {
            name: self.name(),
            parameter: self.parameter,
            operators: self
                .operators
                .iter()
                .map(|op| {
                    (0..2)
                        .map(|r| (0..2).map(|c| [op.get(r, c).re, op.get(r, c).im]).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

/// JSON form of a channel: name, parameter, and each 2×2 operator as rows
/// of [re, im] pairs.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelRecord {
    pub name: &'static str,
    pub parameter: f64,
    pub operators: Vec<Vec<Vec<[f64; 2]>>>,
}

/// The phase-damping channel: {√(1−p)·I, √p·|0⟩⟨0|, √p·|1⟩⟨1|}.
///
/// Leaves populations untouched and scales single-qubit coherences by 1−p.
pub fn phase_damping(p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            range: "[0, 1]",
            value: p,
        });
    }
    let e0 = states::identity2().scale_re((1.0 - p).sqrt());
    let e1 = CMatrix::from_real_row_slice(2, &[p.sqrt(), 0.0, 0.0, 0.0]).unwrap();
    let e2 = CMatrix::from_real_row_slice(2, &[0.0, 0.0, 0.0, p.sqrt()]).unwrap();
    KrausChannel::new(ChannelKind::PhaseDamping, p, vec![e0, e1, e2])
}

/// Builds any catalogue channel from its identifier and parameter.
pub fn standard_channel(kind: ChannelKind, parameter: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&parameter) {
        return Err(Error::Domain {
            name: "channel parameter",
            range: "[0, 1]",
            value: parameter,
        });
    }
    let p = parameter;
    match kind {
        ChannelKind::PhaseDamping => phase_damping(p),
        ChannelKind::PhaseFlip => KrausChannel::new(
            kind,
            p,
            vec![
                states::identity2().scale_re((1.0 - p).sqrt()),
                states::sigma_z().scale_re(p.sqrt()),
            ],
        ),
        ChannelKind::BitFlip => KrausChannel::new(
            kind,
            p,
            vec![
                states::identity2().scale_re((1.0 - p).sqrt()),
                states::sigma_x().scale_re(p.sqrt()),
            ],
        ),
        ChannelKind::BitPhaseFlip => KrausChannel::new(
            kind,
            p,
            vec![
                states::identity2().scale_re((1.0 - p).sqrt()),
                states::sigma_y().scale_re(p.sqrt()),
            ],
        ),
        ChannelKind::Depolarizing => KrausChannel::new(
            kind,
            p,
            vec![
                states::identity2().scale_re((1.0 - 0.75 * p).sqrt()),
                states::sigma_x().scale_re((0.25 * p).sqrt()),
                states::sigma_y().scale_re((0.25 * p).sqrt()),
                states::sigma_z().scale_re((0.25 * p).sqrt()),
            ],
        ),
        ChannelKind::AmplitudeDamping => KrausChannel::new(
            kind,
            p,
            vec![
                CMatrix::from_real_row_slice(2, &[1.0, 0.0, 0.0, (1.0 - p).sqrt()]).unwrap(),
                CMatrix::from_real_row_slice(2, &[0.0, p.sqrt(), 0.0, 0.0]).unwrap(),
            ],
        ),
    }
}

fn register_size(rho: &CMatrix) -> Result<usize> {
    let n = rho.dim().trailing_zeros() as usize;
    if rho.dim() != 1 << n {
        return Err(Error::Shape(format!(
            "density matrix dim {} is not a power of two",
            rho.dim()
        )));
    }
    Ok(n)
}

/// A channel's Kraus operators embedded at one register qubit, with the
/// Gram matrices Ẽᵢ†Ẽᵢ that price the branches: Tr(Ẽᵢ ρ Ẽᵢ†) = Tr(Ẽᵢ†Ẽᵢ ρ).
/// Built once and reused across many states (the Monte Carlo engine holds
/// one per noisy leg).
#[derive(Debug, Clone)]
pub struct EmbeddedChannel {
    operators: Vec<CMatrix>,
    adjoints: Vec<CMatrix>,
    grams: Vec<CMatrix>,
}

impl EmbeddedChannel {
    pub fn new(ch: &KrausChannel, n_qubits: usize, q: QubitIndex) -> Result<Self> {
        let operators: Vec<CMatrix> = ch
            .operators()
            .iter()
            .map(|op| linalg::embed_on_qubit(op, n_qubits, q))
            .collect::<Result<_>>()?;
        let adjoints: Vec<CMatrix> = operators.iter().map(CMatrix::dagger).collect();
        let grams = operators
            .iter()
            .zip(&adjoints)
            .map(|(op, adj)| adj * op)
            .collect();
        Ok(Self {
            operators,
            adjoints,
            grams,
        })
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.dim());
        for (op, adj) in self.operators.iter().zip(&self.adjoints) {
            out = &out + &(&(op * rho) * adj);
        }
        out
    }

    /// Selects branch i with probability Tr(Ẽᵢ ρ Ẽᵢ†) and returns the
    /// normalized post-branch state.
    pub fn sample<R: Rng>(&self, rho: &CMatrix, rng: &mut R) -> Result<(usize, CMatrix)> {
        let probabilities: Vec<f64> = self
            .grams
            .iter()
            .map(|g| linalg::trace_of_product(g, rho).re.max(0.0))
            .collect();

        let total: f64 = probabilities.iter().sum();
        if total < BRANCH_PROBABILITY_FLOOR {
            return Err(Error::DegenerateBranches);
        }

        let draw: f64 = rng.gen::<f64>() * total;
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (i, &pr) in probabilities.iter().enumerate() {
            if pr < BRANCH_PROBABILITY_FLOOR {
                continue;
            }
            cumulative += pr;
            chosen = Some(i);
            if draw < cumulative {
                break;
            }
        }
        // Falls through to the last viable branch when rounding pushes the
        // draw past the cumulative sum.
        let index = chosen.ok_or(Error::DegenerateBranches)?;
        let post = (&(&self.operators[index] * rho) * &self.adjoints[index])
            .scale_re(1.0 / probabilities[index]);
        Ok((index, post))
    }
}

/// Applies the channel to qubit `q`: ρ ↦ Σᵢ Ẽᵢ ρ Ẽᵢ†.
pub fn apply_channel(rho: &CMatrix, ch: &KrausChannel, q: QubitIndex) -> Result<CMatrix> {
    let n = register_size(rho)?;
    Ok(EmbeddedChannel::new(ch, n, q)?.apply(rho))
}

/// Samples one Kraus branch: branch `i` is selected with probability
/// Tr(Ẽᵢ ρ Ẽᵢ†) and the normalized post-branch state is returned. Averaged
/// over branches this reproduces [`apply_channel`].
pub fn sample_kraus_branch<R: Rng>(
    rho: &CMatrix,
    ch: &KrausChannel,
    q: QubitIndex,
    rng: &mut R,
) -> Result<(usize, CMatrix)> {
    let n = register_size(rho)?;
    EmbeddedChannel::new(ch, n, q)?.sample(rho, rng)
}

/// Structural facts about a channel relevant to coherence-based protocols:
/// whether its Kraus operators are diagonal, and whether a GHZ state sent
/// through it (one pass per leg) keeps its support on {|0…0⟩, |1…1⟩} with a
/// real off-diagonal term.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelStructureReport {
    pub name: &'static str,
    pub all_kraus_diagonal: bool,
    pub ghz_form_preserved: bool,
    /// Surviving |0…0⟩⟨1…1| magnitude relative to the noiseless ½.
    pub coherence_factor: f64,
}

const STRUCTURE_TOL: f64 = 1e-10;
const DIAGONAL_TOL: f64 = 1e-12;

/// Classifies the channel's structure by inspecting its Kraus operators and
/// by evolving a GHZ state through the channel on all three legs.
pub fn classify_channel_structure(ch: &KrausChannel) -> Result<ChannelStructureReport> {
    let all_kraus_diagonal = ch
        .operators()
        .iter()
        .all(|op| op.get(0, 1).norm() <= DIAGONAL_TOL && op.get(1, 0).norm() <= DIAGONAL_TOL);

    let mut rho = states::ghz3().density();
    for q in 0..3 {
        rho = apply_channel(&rho, ch, QubitIndex(q))?;
    }

    let mut off_support: f64 = 0.0;
    for r in 0..8 {
        for c in 0..8 {
            if (r == 0 || r == 7) && (c == 0 || c == 7) {
                continue;
            }
            off_support = off_support.max(rho.get(r, c).norm());
        }
    }
    let coherence = rho.get(0, 7);
    let ghz_form_preserved = off_support < STRUCTURE_TOL && coherence.im.abs() < STRUCTURE_TOL;
    let coherence_factor = (coherence.norm() / 0.5).clamp(0.0, 1.0);

    Ok(ChannelStructureReport {
        name: ch.name(),
        all_kraus_diagonal,
        ghz_form_preserved,
        coherence_factor,
    })
}
