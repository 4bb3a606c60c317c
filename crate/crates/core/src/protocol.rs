//! End-to-end execution of the secret-sharing protocol, noiseless and
//! noisy, with analytic figures of merit and Monte Carlo estimation.
//!
//! Noiseless flow: the three parties share (|000⟩+|111⟩)/√2, Alice encodes
//! two bits with one of {I, σx, iσy, σz} on her qubit and relays it to Bob,
//! Charlie measures his qubit in the Hadamard basis and announces the
//! outcome, and Bob's Bell measurement then decodes the secret exactly:
//!
//! | Bob's pair | Charlie + | Charlie − |
//! |------------|-----------|-----------|
//! | Φ⁺         | I  (00)   | Z  (11)   |
//! | Φ⁻         | Z  (11)   | I  (00)   |
//! | Ψ⁺         | X  (01)   | Y  (10)   |
//! | Ψ⁻         | Y  (10)   | X  (01)   |
//!
//! Noisy flow: the two distributed legs and Alice's relay each traverse the
//! same noisy channel (Charlie's own qubit stays clean). Charlie measures in
//! the tilted {|+⟩, |−⟩} basis, Bob projects his pair onto a parity block,
//! which always identifies the class {I, Z} vs {X, Y}, and a binary POVM
//! discriminates within the class, succeeding with probability
//! ½ + αβ(1−p)³ per trial. Analytically, for phase damping:
//!
//! ```text
//! E_R = ½(1 − 2αβ(1−p)³)     error rate of the in-class discrimination
//! P_S = 2αβ(1−p)³            overall success probability, 1 − 2·E_R
//! B   = 1 + P_S              classical bits Bob extracts (2 at p=0, 1 at p=1)
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{apply_channel, standard_channel, ChannelKind, EmbeddedChannel};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, QubitIndex};
use crate::measurement::{
    bell_measure, coherence_sign_povm, measure_qubit, parity_projectors, EmbeddedQubitMeasurement,
    MeasurementBasis, ParitySubspace, Povm,
};
use crate::states::{apply_unitary_on_qubit, ghz3, pauli, BellOutcome, Encoding};

/// Charlie's announced measurement outcome; transmitted as one classical
/// bit, 0 for |+⟩ and 1 for |−⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharlieOutcome {
    Plus,
    Minus,
}

impl CharlieOutcome {
    pub const ALL: [CharlieOutcome; 2] = [CharlieOutcome::Plus, CharlieOutcome::Minus];

    pub fn index(self) -> usize {
        match self {
            CharlieOutcome::Plus => 0,
            CharlieOutcome::Minus => 1,
        }
    }

    pub fn classical_bit(self) -> u8 {
        self.index() as u8
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            0 => Some(CharlieOutcome::Plus),
            1 => Some(CharlieOutcome::Minus),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CharlieOutcome::Plus => "+",
            CharlieOutcome::Minus => "-",
        }
    }
}

/// The parity class an encoding belongs to: {I, Z} collapse onto the even
/// block, {X, Y} onto the odd block.
pub fn class_of(secret: Encoding) -> ParitySubspace {
    match secret {
        Encoding::I | Encoding::Z => ParitySubspace::Even,
        Encoding::X | Encoding::Y => ParitySubspace::Odd,
    }
}

/// Bell label equivalent to a coherence-sign outcome within a parity block:
/// outcome 0 is the +coherence projector (Φ⁺ or Ψ⁺), outcome 1 the −.
pub fn bell_label_for(subspace: ParitySubspace, povm_outcome: usize) -> BellOutcome {
    match (subspace, povm_outcome) {
        (ParitySubspace::Even, 0) => BellOutcome::PhiPlus,
        (ParitySubspace::Even, _) => BellOutcome::PhiMinus,
        (ParitySubspace::Odd, 0) => BellOutcome::PsiPlus,
        (ParitySubspace::Odd, _) => BellOutcome::PsiMinus,
    }
}

/// Bob's decoding rule: Bell outcome × Charlie's bit → Alice's secret.
pub fn decode(bell: BellOutcome, charlie: CharlieOutcome) -> Encoding {
    match (bell, charlie) {
        (BellOutcome::PhiPlus, CharlieOutcome::Plus) => Encoding::I,
        (BellOutcome::PhiPlus, CharlieOutcome::Minus) => Encoding::Z,
        (BellOutcome::PhiMinus, CharlieOutcome::Plus) => Encoding::Z,
        (BellOutcome::PhiMinus, CharlieOutcome::Minus) => Encoding::I,
        (BellOutcome::PsiPlus, CharlieOutcome::Plus) => Encoding::X,
        (BellOutcome::PsiPlus, CharlieOutcome::Minus) => Encoding::Y,
        (BellOutcome::PsiMinus, CharlieOutcome::Plus) => Encoding::Y,
        (BellOutcome::PsiMinus, CharlieOutcome::Minus) => Encoding::X,
    }
}

/// One row of the decoding table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeTableEntry {
    pub bell_outcome: BellOutcome,
    pub charlie_outcome: CharlieOutcome,
    pub decoded: Encoding,
}

/// The full eight-row decoding table.
pub fn decode_table() -> [DecodeTableEntry; 8] {
    let mut rows = Vec::with_capacity(8);
    for bell in BellOutcome::ALL {
        for charlie in CharlieOutcome::ALL {
            rows.push(DecodeTableEntry {
                bell_outcome: bell,
                charlie_outcome: charlie,
                decoded: decode(bell, charlie),
            });
        }
    }
    rows.try_into().expect("exactly eight rows")
}

/// One deterministic branch of the noiseless protocol.
#[derive(Debug, Clone, Copy)]
pub struct PureBranch {
    pub charlie: CharlieOutcome,
    pub bell: BellOutcome,
    pub decoded: Encoding,
}

/// Runs the noiseless protocol for both of Charlie's outcomes, returning
/// the Bell result and decoded secret of each branch. Every branch is
/// deterministic: Bob's pair collapses onto exactly one Bell state.
pub fn enumerate_pure_branches(secret: Encoding) -> Result<Vec<PureBranch>> {
    let encoded = apply_unitary_on_qubit(&ghz3().density(), &pauli(secret), QubitIndex(0))?;
    let outcomes = measure_qubit(&encoded, &MeasurementBasis::hadamard(), QubitIndex(2))?;

    let mut branches = Vec::with_capacity(2);
    for outcome in outcomes {
        let charlie = CharlieOutcome::from_index(outcome.outcome_index).expect("two outcomes");
        let pair = outcome
            .post_state
            .ok_or(Error::DegenerateOutcome(outcome.outcome_index))?;
        let bell_outcomes = bell_measure(&pair)?;
        let best = bell_outcomes
            .iter()
            .max_by(|a, b| a.probability.total_cmp(&b.probability))
            .expect("four outcomes");
        let bell = BellOutcome::ALL[best.outcome_index];
        branches.push(PureBranch {
            charlie,
            bell,
            decoded: decode(bell, charlie),
        });
    }
    Ok(branches)
}

/// Runs the noiseless protocol and returns the decoded secret, which equals
/// the input for every encoding and either of Charlie's outcomes.
pub fn run_pure_protocol(secret: Encoding) -> Result<Encoding> {
    let branches = enumerate_pure_branches(secret)?;
    let decoded = branches[0].decoded;
    assert!(
        branches.iter().all(|b| b.decoded == decoded),
        "pure-protocol branches disagree; decoding table is inconsistent"
    );
    Ok(decoded)
}

/// Prepares a GHZ state and sends the two distributed legs (qubits 0 and 1)
/// through the channel; Charlie's qubit 2 stays noiseless. For phase
/// damping the result keeps its diagonal ½ terms and the |000⟩⟨111|
/// coherence becomes (1−p)²/2.
pub fn evolve_noisy_ghz(p: f64, channel: ChannelKind) -> Result<CMatrix> {
    let ch = standard_channel(channel, p)?;
    let mut rho = ghz3().density();
    rho = apply_channel(&rho, &ch, QubitIndex(0))?;
    rho = apply_channel(&rho, &ch, QubitIndex(1))?;
    Ok(rho)
}

/// Alice's encoding: conjugates qubit 0 by the secret's unitary.
pub fn encode_secret(rho: &CMatrix, secret: Encoding) -> Result<CMatrix> {
    apply_unitary_on_qubit(rho, &pauli(secret), QubitIndex(0))
}

/// Alice relays her qubit to Bob through the channel once more; for phase
/// damping the coherence coefficient becomes ±(1−p)³/2.
pub fn alice_sends_to_bob(rho: &CMatrix, p: f64, channel: ChannelKind) -> Result<CMatrix> {
    let ch = standard_channel(channel, p)?;
    apply_channel(rho, &ch, QubitIndex(0))
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "p",
            range: "[0, 1]",
            value: p,
        })
    }
}

// The analytic formulas extend continuously to α ∈ {0, 1} (P_S → 0), so the
// closed endpoints are accepted here even though samplers reject them.
fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "alpha",
            range: "[0, 1]",
            value: alpha,
        })
    }
}

/// Error rate of the in-class discrimination: ½(1 − 2αβ(1−p)³).
pub fn analytic_error_rate(p: f64, alpha: f64) -> Result<f64> {
    Ok(0.5 * (1.0 - analytic_success(p, alpha)?))
}

/// Success probability of the in-class discrimination: 2αβ(1−p)³ with
/// β = √(1−α²).
pub fn analytic_success(p: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    check_alpha(alpha)?;
    let beta = (1.0 - alpha * alpha).sqrt();
    Ok(2.0 * alpha * beta * (1.0 - p).powi(3))
}

/// Classical bits Bob extracts: B = 1 + 2αβ(1−p)³. At the Hadamard basis
/// this is 1 + (1−p)³, spanning 2 at p = 0 down to 1 at p = 1.
pub fn analytic_bits(p: f64, alpha: f64) -> Result<f64> {
    Ok(1.0 + analytic_success(p, alpha)?)
}

/// Parameters of a Monte Carlo campaign.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolConfig {
    /// Channel parameter in [0, 1].
    pub p: f64,
    /// Charlie's basis parameter in (0, 1).
    pub alpha: f64,
    /// Which catalogue channel the three noisy passes use.
    pub channel: ChannelKind,
    /// Number of Monte Carlo trials.
    pub trials: u64,
    /// Base seed; trial t draws from an independent stream (seed, t).
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(p: f64, alpha: f64, channel: ChannelKind, trials: u64, seed: u64) -> Result<Self> {
        let config = Self {
            p,
            alpha,
            channel,
            trials,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    /// Phase damping and 10⁵ trials, the protocol's standard setting.
    pub fn with_defaults(p: f64, alpha: f64, seed: u64) -> Result<Self> {
        Self::new(p, alpha, ChannelKind::PhaseDamping, 100_000, seed)
    }

    pub fn validate(&self) -> Result<()> {
        check_p(self.p)?;
        MeasurementBasis::new(self.alpha)?;
        if self.trials == 0 {
            return Err(Error::Domain {
                name: "trials",
                range: "[1, ..)",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Aggregate results of a campaign, with the analytic values alongside the
/// Monte Carlo estimates. Serializes with fixed field names.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolReport {
    pub analytic_error_rate: f64,
    pub analytic_success: f64,
    pub analytic_bits: f64,
    /// Within-class discrimination accuracy mapped to P_S = 2·accuracy − 1.
    pub empirical_success: Option<f64>,
    /// Standard error of `empirical_success`.
    pub stderr: Option<f64>,
    /// counts[true encoding][decoded encoding], both in two-bit order.
    pub confusion_matrix: Option<[[u64; 4]; 4]>,
    /// Observed frequency of Charlie's (+, −) outcomes.
    pub charlie_outcome_frequencies: Option<[f64; 2]>,
}

impl ProtocolReport {
    /// Report holding only the analytic figures (no trials run).
    pub fn analytic(p: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            analytic_error_rate: analytic_error_rate(p, alpha)?,
            analytic_success: analytic_success(p, alpha)?,
            analytic_bits: analytic_bits(p, alpha)?,
            empirical_success: None,
            stderr: None,
            confusion_matrix: None,
            charlie_outcome_frequencies: None,
        })
    }
}

/// Pre-built operators shared by every trial of a campaign.
struct TrialContext {
    initial: CMatrix,
    channel_q0: EmbeddedChannel,
    channel_q1: EmbeddedChannel,
    /// Embedded encoding unitaries and their adjoints, indexed by secret.
    encoders: Vec<(CMatrix, CMatrix)>,
    charlie: EmbeddedQubitMeasurement,
    parity: Povm,
    discriminators: [Povm; 2],
}

impl TrialContext {
    fn new(config: &ProtocolConfig) -> Result<Self> {
        let ch = standard_channel(config.channel, config.p)?;
        let encoders = Encoding::ALL
            .iter()
            .map(|&e| {
                let u = crate::linalg::embed_on_qubit(&pauli(e), 3, QubitIndex(0))?;
                let u_dag = u.dagger();
                Ok((u, u_dag))
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = MeasurementBasis::new(config.alpha)?;
        Ok(Self {
            initial: ghz3().density(),
            channel_q0: EmbeddedChannel::new(&ch, 3, QubitIndex(0))?,
            channel_q1: EmbeddedChannel::new(&ch, 3, QubitIndex(1))?,
            encoders,
            charlie: EmbeddedQubitMeasurement::new(&basis, 3, QubitIndex(2))?,
            parity: parity_projectors(),
            discriminators: [
                coherence_sign_povm(ParitySubspace::Even),
                coherence_sign_povm(ParitySubspace::Odd),
            ],
        })
    }

    fn run_trial<R: Rng>(&self, secret: Encoding, rng: &mut R) -> Result<TrialRecord> {
        // Distribution: both of Bob's and Alice's legs pass the channel.
        let (_, rho) = self.channel_q0.sample(&self.initial, rng)?;
        let (_, rho) = self.channel_q1.sample(&rho, rng)?;

        // Alice encodes, then relays her qubit through the channel again.
        let (u, u_dag) = &self.encoders[secret.index()];
        let rho = &(u * &rho) * u_dag;
        let (_, rho) = self.channel_q0.sample(&rho, rng)?;

        // Charlie measures and announces one classical bit.
        let (charlie_idx, pair) = self.charlie.sample(&rho, rng)?;
        let charlie = CharlieOutcome::from_index(charlie_idx).expect("binary outcome");

        // Bob: parity projection picks the class, then the in-class POVM.
        let (class_idx, pair) = self.parity.sample_collapse(&pair, rng)?;
        let subspace = ParitySubspace::from_index(class_idx).expect("binary outcome");
        let povm_outcome = self.discriminators[class_idx].sample(&pair, rng)?;

        let decoded = decode(bell_label_for(subspace, povm_outcome), charlie);
        Ok(TrialRecord {
            decoded,
            charlie,
            class: subspace,
        })
    }
}

struct TrialRecord {
    decoded: Encoding,
    charlie: CharlieOutcome,
    class: ParitySubspace,
}

/// One full stochastic pass of the noisy protocol: channel branches on the
/// two distributed legs, encoding, a branch on Alice's relayed qubit,
/// Charlie's sampled measurement, Bob's parity projection and in-class
/// discrimination. Returns the decoded secret and Charlie's outcome.
pub fn run_noisy_protocol_trial<R: Rng>(
    config: &ProtocolConfig,
    secret: Encoding,
    rng: &mut R,
) -> Result<(Encoding, CharlieOutcome)> {
    check_p(config.p)?;
    MeasurementBasis::new(config.alpha)?;
    let ctx = TrialContext::new(config)?;
    let record = ctx.run_trial(secret, rng)?;
    Ok((record.decoded, record.charlie))
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    confusion: [[u64; 4]; 4],
    charlie: [u64; 2],
    class_correct: u64,
    decoded_correct: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..4 {
            for j in 0..4 {
                self.confusion[i][j] += other.confusion[i][j];
            }
        }
        self.charlie[0] += other.charlie[0];
        self.charlie[1] += other.charlie[1];
        self.class_correct += other.class_correct;
        self.decoded_correct += other.decoded_correct;
        self
    }
}

/// Runs `config.trials` trials, cycling uniformly through the four secrets,
/// and aggregates them into a [`ProtocolReport`].
///
/// Trial t draws from the ChaCha stream (seed, t), so the report is
/// identical for identical configs regardless of how many worker threads
/// execute the trials.
pub fn run_campaign(config: &ProtocolConfig) -> Result<ProtocolReport> {
    config.validate()?;
    let ctx = TrialContext::new(config)?;

    let tally = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let secret = Encoding::ALL[(t % 4) as usize];
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(t);
            let record = ctx.run_trial(secret, &mut rng)?;
            let mut tally = Tally::default();
            tally.confusion[secret.index()][record.decoded.index()] = 1;
            tally.charlie[record.charlie.index()] = 1;
            if record.class == class_of(secret) {
                tally.class_correct = 1;
                if record.decoded == secret {
                    tally.decoded_correct = 1;
                }
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let trials = config.trials as f64;
    // Within-class accuracy; the class bit itself is deterministic for
    // diagonal channels, so n is the full trial count there.
    let n = tally.class_correct as f64;
    let accuracy = if tally.class_correct > 0 {
        tally.decoded_correct as f64 / n
    } else {
        0.0
    };
    let empirical_success = 2.0 * accuracy - 1.0;
    // The per-trial success variable 2·[correct] − 1 has sample variance
    // 4·a(1−a); its mean's standard error is √(v/n).
    let stderr = if tally.class_correct > 0 {
        (4.0 * accuracy * (1.0 - accuracy) / n).sqrt()
    } else {
        f64::NAN
    };

    Ok(ProtocolReport {
        analytic_error_rate: analytic_error_rate(config.p, config.alpha)?,
        analytic_success: analytic_success(config.p, config.alpha)?,
        analytic_bits: analytic_bits(config.p, config.alpha)?,
        empirical_success: Some(empirical_success),
        stderr: Some(stderr),
        confusion_matrix: Some(tally.confusion),
        charlie_outcome_frequencies: Some([
            tally.charlie[0] as f64 / trials,
            tally.charlie[1] as f64 / trials,
        ]),
    })
}

pub mod closed_form {
    //! Closed-form phase-damping states of the protocol pipeline, built by
    //! direct index arithmetic rather than channel simulation. They serve
    //! as an independent reference for the simulated states: each
    //! phase-damping pass scales the GHZ coherence by (1−p), giving
    //! (1−p)²/2 after distribution and (1−p)³/2 after Alice's relay.

    use num_complex::Complex64;

    use super::{class_of, CharlieOutcome};
    use crate::linalg::CMatrix;
    use crate::measurement::ParitySubspace;
    use crate::states::Encoding;

    /// Basis indices carrying the populations of an encoded state, and the
    /// sign of its coherence term: {I, Z} live on {|000⟩, |111⟩}, {X, Y} on
    /// {|100⟩, |011⟩}; Y and Z carry negative coherence.
    fn support_and_sign(secret: Encoding) -> ([usize; 2], f64) {
        match secret {
            Encoding::I => ([0, 7], 1.0),
            Encoding::X => ([4, 3], 1.0),
            Encoding::Y => ([4, 3], -1.0),
            Encoding::Z => ([0, 7], -1.0),
        }
    }

    fn ghz_like(support: [usize; 2], coherence: f64) -> CMatrix {
        let mut m = CMatrix::zeros(8);
        let half = Complex64::new(0.5, 0.0);
        let [a, b] = support;
        m.set(a, a, half);
        m.set(b, b, half);
        m.set(a, b, Complex64::new(coherence, 0.0));
        m.set(b, a, Complex64::new(coherence, 0.0));
        m
    }

    /// The shared state after the two distributed legs each passed the
    /// phase-damping channel: ½ populations on {|000⟩, |111⟩} with
    /// coherence (1−p)²/2.
    pub fn distributed_state(p: f64) -> CMatrix {
        ghz_like([0, 7], 0.5 * (1.0 - p).powi(2))
    }

    /// The distributed state after Alice's encoding unitary.
    pub fn encoded_state(secret: Encoding, p: f64) -> CMatrix {
        let (support, sign) = support_and_sign(secret);
        ghz_like(support, sign * 0.5 * (1.0 - p).powi(2))
    }

    /// The encoded state after Alice's qubit passed the channel once more
    /// on its way to Bob: coherence ±(1−p)³/2.
    pub fn relayed_state(secret: Encoding, p: f64) -> CMatrix {
        let (support, sign) = support_and_sign(secret);
        ghz_like(support, sign * 0.5 * (1.0 - p).powi(3))
    }

    /// Bob's two-qubit state after Charlie's measurement: an α²/β² mixture
    /// over the parity block with coherence ±αβ(1−p)³.
    pub fn collapsed_pair(
        secret: Encoding,
        charlie: CharlieOutcome,
        p: f64,
        alpha: f64,
    ) -> CMatrix {
        let beta = (1.0 - alpha * alpha).sqrt();
        let coherence = alpha * beta * (1.0 - p).powi(3);
        let (a, b) = match class_of(secret) {
            ParitySubspace::Even => (0, 3), // |00⟩, |11⟩
            ParitySubspace::Odd => (2, 1),  // |10⟩, |01⟩
        };
        let (_, base_sign) = support_and_sign(secret);
        let (weight_a, weight_b, sign) = match charlie {
            CharlieOutcome::Plus => (alpha * alpha, beta * beta, base_sign),
            CharlieOutcome::Minus => (beta * beta, alpha * alpha, -base_sign),
        };
        let mut m = CMatrix::zeros(4);
        m.set(a, a, Complex64::new(weight_a, 0.0));
        m.set(b, b, Complex64::new(weight_b, 0.0));
        m.set(a, b, Complex64::new(sign * coherence, 0.0));
        m.set(b, a, Complex64::new(sign * coherence, 0.0));
        m
    }
}
