//! Projective measurements and minimum-error POVM discrimination.
//!
//! Charlie measures his qubit in the tilted basis
//! {|+⟩ = α|0⟩ + β|1⟩, |−⟩ = β|0⟩ − α|1⟩} with α² + β² = 1; Bob measures his
//! pair either in the Bell basis (noiseless protocol) or with the two-stage
//! parity-projection + binary POVM of the noisy protocol. The Helstrom
//! construction provides the optimal binary discriminator and serves as the
//! oracle the fixed POVM is checked against.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, QubitIndex};
use crate::states::{bell_states, PureState};

const PSD_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-12;
const SUPPORT_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-12;

/// Probabilities below this floor cannot be collapsed onto.
pub const OUTCOME_PROBABILITY_FLOOR: f64 = 1e-15;

/// Charlie's measurement basis, parameterized by α ∈ (0, 1) with
/// β = √(1 − α²).
///
/// Endpoints are rejected: at α ∈ {0, 1} the outcome carries no coherence
/// information and the collapse becomes degenerate.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementBasis {
    alpha: f64,
    beta: f64,
}

impl MeasurementBasis {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain {
                name: "alpha",
                range: "(0, 1)",
                value: alpha,
            });
        }
        Ok(Self {
            alpha,
            beta: (1.0 - alpha * alpha).sqrt(),
        })
    }

    /// The balanced basis α = β = 1/√2.
    pub fn hadamard() -> Self {
        Self::new(std::f64::consts::FRAC_1_SQRT_2).expect("1/√2 lies in (0,1)")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// |+⟩ = α|0⟩ + β|1⟩
    pub fn plus_state(&self) -> PureState {
        PureState::from_real(&[self.alpha, self.beta]).expect("unit norm by construction")
    }

    /// |−⟩ = β|0⟩ − α|1⟩
    pub fn minus_state(&self) -> PureState {
        PureState::from_real(&[self.beta, -self.alpha]).expect("unit norm by construction")
    }

    pub fn states(&self) -> [PureState; 2] {
        [self.plus_state(), self.minus_state()]
    }
}

/// One outcome of a projective measurement.
///
/// `post_state` is the normalized state conditioned on the outcome; it is
/// `None` when the outcome probability is below the collapse floor.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state: Option<CMatrix>,
}

/// Measures qubit `q` of `rho` in an arbitrary orthonormal single-qubit
/// basis. For each basis vector |v⟩ the probability is Tr((…⊗|v⟩⟨v|⊗…)ρ) and
/// the post-state is the normalized partial trace over `q` of the projected
/// state, so the measured qubit leaves the register.
pub fn measure_qubit_in(
    rho: &CMatrix,
    basis_states: &[PureState; 2],
    q: QubitIndex,
) -> Result<[MeasurementOutcome; 2]> {
    if basis_states.iter().any(|s| s.dim() != 2) {
        return Err(Error::Shape("basis states must be single-qubit".into()));
    }
    let overlap = basis_states[0].inner(&basis_states[1]).norm();
    if overlap > ORTHO_TOL {
        return Err(Error::NotOrthonormal { deviation: overlap });
    }
    let n = rho.dim().trailing_zeros() as usize;
    if rho.dim() != 1 << n {
        return Err(Error::Shape(format!(
            "density matrix dim {} is not a power of two",
            rho.dim()
        )));
    }
    let keep: Vec<QubitIndex> = (0..n).filter(|&k| k != q.0).map(QubitIndex).collect();
    let dims = vec![2usize; n];

    let mut outcomes = Vec::with_capacity(2);
    for (index, state) in basis_states.iter().enumerate() {
        let projector = linalg::embed_on_qubit(&state.density(), n, q)?;
        let probability = (&projector * rho).trace().re.clamp(0.0, 1.0);
        let post_state = if probability >= OUTCOME_PROBABILITY_FLOOR {
            if keep.is_empty() {
                // Measuring the register's only qubit leaves the trivial
                // (scalar) state behind.
                Some(CMatrix::identity(1))
            } else {
                let projected = &(&projector * rho) * &projector;
                let reduced = linalg::partial_trace(&projected, &dims, &keep)?;
                Some(reduced.scale_re(1.0 / probability))
            }
        } else {
            None
        };
        outcomes.push(MeasurementOutcome {
            outcome_index: index,
            probability,
            post_state,
        });
    }
    Ok([outcomes.remove(0), outcomes.remove(0)])
}

/// Measures qubit `q` in Charlie's {|+⟩, |−⟩} basis.
pub fn measure_qubit(
    rho: &CMatrix,
    basis: &MeasurementBasis,
    q: QubitIndex,
) -> Result<[MeasurementOutcome; 2]> {
    measure_qubit_in(rho, &basis.states(), q)
}

/// A single-qubit projective measurement with its projectors already
/// embedded in the register, so repeated sampling (the Monte Carlo engine)
/// skips the per-call tensor products.
#[derive(Debug, Clone)]
pub struct EmbeddedQubitMeasurement {
    projectors: [CMatrix; 2],
    dims: Vec<usize>,
    keep: Vec<QubitIndex>,
}

impl EmbeddedQubitMeasurement {
    pub fn new(basis: &MeasurementBasis, n_qubits: usize, q: QubitIndex) -> Result<Self> {
        let [plus, minus] = basis.states();
        Ok(Self {
            projectors: [
                linalg::embed_on_qubit(&plus.density(), n_qubits, q)?,
                linalg::embed_on_qubit(&minus.density(), n_qubits, q)?,
            ],
            dims: vec![2; n_qubits],
            keep: (0..n_qubits)
                .filter(|&k| k != q.0)
                .map(QubitIndex)
                .collect(),
        })
    }

    /// Picks an outcome with its Born probability and returns the
    /// normalized post-state with the measured qubit traced out.
    pub fn sample<R: Rng>(&self, rho: &CMatrix, rng: &mut R) -> Result<(usize, CMatrix)> {
        let probabilities: [f64; 2] = [
            linalg::trace_of_product(&self.projectors[0], rho)
                .re
                .max(0.0),
            linalg::trace_of_product(&self.projectors[1], rho)
                .re
                .max(0.0),
        ];
        let total = probabilities[0] + probabilities[1];
        if total < OUTCOME_PROBABILITY_FLOOR {
            return Err(Error::DegenerateBranches);
        }
        let draw = rng.gen::<f64>() * total;
        let selected = usize::from(draw >= probabilities[0]);
        if probabilities[selected] < OUTCOME_PROBABILITY_FLOOR {
            return Err(Error::DegenerateOutcome(selected));
        }
        let projector = &self.projectors[selected];
        let projected = &(projector * rho) * projector;
        let post = if self.keep.is_empty() {
            CMatrix::identity(1)
        } else {
            linalg::partial_trace(&projected, &self.dims, &self.keep)?
                .scale_re(1.0 / probabilities[selected])
        };
        Ok((selected, post))
    }
}

/// Samples a single-qubit measurement: picks an outcome with its Born
/// probability and returns the collapsed state. Collapsing onto an outcome
/// below the probability floor is a degenerate-outcome error.
pub fn sample_measurement<R: Rng>(
    rho: &CMatrix,
    basis: &MeasurementBasis,
    q: QubitIndex,
    rng: &mut R,
) -> Result<(usize, CMatrix)> {
    let n = rho.dim().trailing_zeros() as usize;
    if rho.dim() != 1 << n {
        return Err(Error::Shape(format!(
            "density matrix dim {} is not a power of two",
            rho.dim()
        )));
    }
    EmbeddedQubitMeasurement::new(basis, n, q)?.sample(rho, rng)
}

/// Projective measurement of a two-qubit state in the Bell basis, outcomes
/// ordered Φ⁺, Φ⁻, Ψ⁺, Ψ⁻. The post-state of outcome s is |s⟩⟨s|.
pub fn bell_measure(rho2: &CMatrix) -> Result<[MeasurementOutcome; 4]> {
    if rho2.dim() != 4 {
        return Err(Error::Shape(format!(
            "Bell measurement needs a two-qubit state, got dim {}",
            rho2.dim()
        )));
    }
    let bells = bell_states();
    let mut outcomes = Vec::with_capacity(4);
    for (index, bell) in bells.iter().enumerate() {
        let projector = bell.density();
        let probability = (&projector * rho2).trace().re.clamp(0.0, 1.0);
        let post_state = (probability >= OUTCOME_PROBABILITY_FLOOR).then(|| projector.clone());
        outcomes.push(MeasurementOutcome {
            outcome_index: index,
            probability,
            post_state,
        });
    }
    Ok([
        outcomes.remove(0),
        outcomes.remove(0),
        outcomes.remove(0),
        outcomes.remove(0),
    ])
}

/// The two-dimensional block of the two-qubit space a parity projection
/// selects: even parity is span{|00⟩, |11⟩}, odd parity span{|01⟩, |10⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParitySubspace {
    Even,
    Odd,
}

impl ParitySubspace {
    /// The computational-basis indices spanning the block.
    pub fn basis_indices(self) -> [usize; 2] {
        match self {
            ParitySubspace::Even => [0, 3],
            ParitySubspace::Odd => [1, 2],
        }
    }

    pub fn index(self) -> usize {
        match self {
            ParitySubspace::Even => 0,
            ParitySubspace::Odd => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            0 => Some(ParitySubspace::Even),
            1 => Some(ParitySubspace::Odd),
            _ => None,
        }
    }
}

/// A complete set of positive operators.
///
/// Completeness is checked against `support`, a projector that defaults to
/// the identity. Subspace-supported POVMs (the binary discriminators below)
/// carry the parity projector as their support and may only be applied to
/// states already collapsed into that subspace.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<CMatrix>,
    /// Lüders square roots √Πᵢ, built from the same eigendecompositions the
    /// positivity check runs.
    roots: Vec<CMatrix>,
    support: CMatrix,
}

impl Povm {
    /// A POVM complete over the full space: Σ elements = I.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .ok_or_else(|| Error::Shape("POVM needs at least one element".into()))?
            .dim();
        Self::with_support(elements, CMatrix::identity(dim))
    }

    /// A POVM complete over the range of the projector `support`.
    pub fn with_support(elements: Vec<CMatrix>, support: CMatrix) -> Result<Self> {
        let dim = support.dim();
        let projector_dev = (&(&support * &support) - &support).max_abs_diff(&CMatrix::zeros(dim));
        if support.hermiticity_deviation() > COMPLETENESS_TOL || projector_dev > COMPLETENESS_TOL {
            return Err(Error::Shape("support must be a Hermitian projector".into()));
        }
        let mut sum = CMatrix::zeros(dim);
        let mut roots = Vec::with_capacity(elements.len());
        for (index, element) in elements.iter().enumerate() {
            if element.dim() != dim {
                return Err(Error::Shape(format!(
                    "POVM element {index} has dim {}, expected {dim}",
                    element.dim()
                )));
            }
            if element.hermiticity_deviation() > PSD_TOL {
                return Err(Error::NotPositiveSemidefinite {
                    index,
                    min_eigenvalue: f64::NAN,
                });
            }
            let (values, vectors) = element.hermitian_eigen();
            let min_eigenvalue = values.iter().copied().fold(f64::INFINITY, f64::min);
            if min_eigenvalue < -PSD_TOL {
                return Err(Error::NotPositiveSemidefinite {
                    index,
                    min_eigenvalue,
                });
            }
            let mut root = CMatrix::zeros(dim);
            for (k, &lambda) in values.iter().enumerate() {
                let factor = lambda.max(0.0).sqrt();
                if factor == 0.0 {
                    continue;
                }
                let v = vectors.inner().column(k).clone_owned();
                let outer = &v * v.adjoint();
                root =
                    &root + &CMatrix::from_fn(dim, |r, c| outer[(r, c)] * factor).expect("finite");
            }
            roots.push(root);
            sum = &sum + element;
        }
        let deviation = sum.max_abs_diff(&support);
        if deviation > COMPLETENESS_TOL {
            return Err(Error::PovmIncomplete { deviation });
        }
        Ok(Self {
            elements,
            roots,
            support,
        })
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn support(&self) -> &CMatrix {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Outcome distribution Tr(Πᵢ ρ). Errors if `rho` carries weight outside
    /// the POVM's support, i.e. the POVM is not complete for this state.
    pub fn probabilities(&self, rho: &CMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.support.dim() {
            return Err(Error::Shape(format!(
                "state dim {} does not match POVM dim {}",
                rho.dim(),
                self.support.dim()
            )));
        }
        let mass = linalg::trace_of_product(&self.support, rho).re;
        if (mass - 1.0).abs() > SUPPORT_TOL {
            return Err(Error::PovmIncomplete {
                deviation: (mass - 1.0).abs(),
            });
        }
        Ok(self
            .elements
            .iter()
            .map(|e| linalg::trace_of_product(e, rho).re.clamp(0.0, 1.0))
            .collect())
    }

    /// Samples one outcome index from [`Self::probabilities`].
    pub fn sample<R: Rng>(&self, rho: &CMatrix, rng: &mut R) -> Result<usize> {
        let probabilities = self.probabilities(rho)?;
        let total: f64 = probabilities.iter().sum();
        if total < OUTCOME_PROBABILITY_FLOOR {
            return Err(Error::DegenerateBranches);
        }
        let draw = rng.gen::<f64>() * total;
        let mut cumulative = 0.0;
        let mut selected = None;
        for (i, &pr) in probabilities.iter().enumerate() {
            if pr < OUTCOME_PROBABILITY_FLOOR {
                continue;
            }
            cumulative += pr;
            selected = Some(i);
            if draw < cumulative {
                break;
            }
        }
        selected.ok_or(Error::DegenerateBranches)
    }

    /// Samples an outcome and collapses the state by the Lüders rule
    /// ρ ↦ √Πᵢ ρ √Πᵢ / p. For projector elements √Π = Π.
    pub fn sample_collapse<R: Rng>(&self, rho: &CMatrix, rng: &mut R) -> Result<(usize, CMatrix)> {
        let index = self.sample(rho, rng)?;
        let root = &self.roots[index];
        let unnormalized = &(root * rho) * root;
        let probability = unnormalized.trace().re;
        if probability < OUTCOME_PROBABILITY_FLOOR {
            return Err(Error::DegenerateOutcome(index));
        }
        Ok((index, unnormalized.scale_re(1.0 / probability)))
    }
}

/// The two-qubit parity projectors P₁ = |00⟩⟨00| + |11⟩⟨11| and
/// P₂ = |01⟩⟨01| + |10⟩⟨10|; P₁ + P₂ = I exactly.
pub fn parity_projectors() -> Povm {
    let mut p1 = CMatrix::zeros(4);
    let mut p2 = CMatrix::zeros(4);
    for idx in ParitySubspace::Even.basis_indices() {
        p1.set(idx, idx, Complex64::new(1.0, 0.0));
    }
    for idx in ParitySubspace::Odd.basis_indices() {
        p2.set(idx, idx, Complex64::new(1.0, 0.0));
    }
    Povm::new(vec![p1, p2]).expect("parity projectors are a complete POVM")
}

/// The binary POVM that discriminates the sign of the coherence between the
/// two basis vectors |a⟩, |b⟩ of a parity block: in that block
///
/// ```text
/// Π₁ = ½ [[1, 1], [1, 1]],   Π₂ = ½ [[1, −1], [−1, 1]]
/// ```
///
/// i.e. Π₁ projects onto (|a⟩+|b⟩)/√2 and Π₂ onto (|a⟩−|b⟩)/√2: the Bell
/// states Φ± (even block) or Ψ± (odd block). The operators are embedded as
/// 4×4 matrices supported on the block, with the parity projector as the
/// POVM support: they apply after a parity projection has collapsed the
/// state into the block, where Π₁ + Π₂ resolve the identity.
pub fn coherence_sign_povm(subspace: ParitySubspace) -> Povm {
    let [a, b] = subspace.basis_indices();
    let half = Complex64::new(0.5, 0.0);
    let mut plus = CMatrix::zeros(4);
    let mut minus = CMatrix::zeros(4);
    for &(r, c, sign) in &[(a, a, 1.0), (a, b, 1.0), (b, a, 1.0), (b, b, 1.0)] {
        plus.set(r, c, half * Complex64::new(sign, 0.0));
    }
    for &(r, c, sign) in &[(a, a, 1.0), (a, b, -1.0), (b, a, -1.0), (b, b, 1.0)] {
        minus.set(r, c, half * Complex64::new(sign, 0.0));
    }
    let mut support = CMatrix::zeros(4);
    support.set(a, a, Complex64::new(1.0, 0.0));
    support.set(b, b, Complex64::new(1.0, 0.0));
    Povm::with_support(vec![plus, minus], support)
        .expect("block discriminators are complete on their block")
}

/// Minimum-error discrimination of ρa (prior πa) against ρb (prior 1 − πa).
///
/// Builds Γ = πa·ρa − (1−πa)·ρb, takes the projector onto its strictly
/// positive eigenspace as the "a" outcome (zero eigenvalues are assigned to
/// "b"), and returns the POVM together with the Helstrom error
/// ½(1 − ‖Γ‖₁), clamped into [0, ½].
pub fn helstrom(rho_a: &CMatrix, rho_b: &CMatrix, prior_a: f64) -> Result<(Povm, f64)> {
    if rho_a.dim() != rho_b.dim() {
        return Err(Error::Shape(format!(
            "cannot discriminate states of dims {} and {}",
            rho_a.dim(),
            rho_b.dim()
        )));
    }
    if !(0.0..=1.0).contains(&prior_a) {
        return Err(Error::Domain {
            name: "prior_a",
            range: "[0, 1]",
            value: prior_a,
        });
    }
    let gamma = &rho_a.scale_re(prior_a) - &rho_b.scale_re(1.0 - prior_a);
    let (values, vectors) = gamma.hermitian_eigen();
    let dim = gamma.dim();
    let mut pi_a = CMatrix::zeros(dim);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda > 0.0 {
            let v = vectors.inner().column(k).clone_owned();
            let outer = &v * v.adjoint();
            pi_a = &pi_a + &CMatrix::from_fn(dim, |r, c| outer[(r, c)]).expect("finite");
        }
    }
    let pi_b = &CMatrix::identity(dim) - &pi_a;
    let min_error = (0.5 * (1.0 - linalg::trace_norm(&gamma))).clamp(0.0, 0.5);
    Ok((Povm::new(vec![pi_a, pi_b])?, min_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_density_matrix;
    use crate::protocol::closed_form;
    use crate::protocol::CharlieOutcome;
    use crate::states::{ghz3, Encoding};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn computational_basis() -> [PureState; 2] {
        [
            PureState::from_real(&[1.0, 0.0]).unwrap(),
            PureState::from_real(&[0.0, 1.0]).unwrap(),
        ]
    }

    #[test]
    fn hadamard_basis_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let basis = MeasurementBasis::hadamard();
        assert!((basis.plus_state().amplitude(0) - c(s, 0.0)).norm() < EPS);
        assert!((basis.plus_state().amplitude(1) - c(s, 0.0)).norm() < EPS);
        assert!((basis.minus_state().amplitude(0) - c(s, 0.0)).norm() < EPS);
        assert!((basis.minus_state().amplitude(1) - c(-s, 0.0)).norm() < EPS);
    }

    #[test]
    fn basis_states_are_orthonormal_and_complete() {
        let basis = MeasurementBasis::new(0.3).unwrap();
        let [plus, minus] = basis.states();
        assert!(plus.inner(&minus).norm() < 1e-14);
        let sum = &plus.density() + &minus.density();
        assert!(sum.max_abs_diff(&CMatrix::identity(2)) < 1e-14);
        assert!((basis.alpha().powi(2) + basis.beta().powi(2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn basis_rejects_endpoints() {
        for alpha in [0.0, 1.0, -0.2, 1.5] {
            assert!(matches!(
                MeasurementBasis::new(alpha),
                Err(Error::Domain { .. })
            ));
        }
    }

    #[test]
    fn measuring_ground_state_in_computational_basis() {
        let mut rho = CMatrix::zeros(2);
        rho.set(0, 0, c(1.0, 0.0));
        let outcomes = measure_qubit_in(&rho, &computational_basis(), QubitIndex(0)).unwrap();
        assert!((outcomes[0].probability - 1.0).abs() < EPS);
        assert!(outcomes[1].probability < EPS);
        assert!(outcomes[1].post_state.is_none());
    }

    #[test]
    fn ghz_charlie_outcomes_are_balanced() {
        let rho = ghz3().density();
        let outcomes = measure_qubit(&rho, &MeasurementBasis::hadamard(), QubitIndex(2)).unwrap();
        assert!((outcomes[0].probability - 0.5).abs() < EPS);
        assert!((outcomes[1].probability - 0.5).abs() < EPS);
    }

    #[test]
    fn collapse_matches_closed_form_pair_states() {
        // Measuring Charlie's qubit of the relayed state collapses Bob's pair
        // onto the closed-form α²/β² mixture with ±αβ(1−p)³ coherence.
        let (p, alpha) = (0.35, 0.6);
        let basis = MeasurementBasis::new(alpha).unwrap();
        for secret in Encoding::ALL {
            let rho = closed_form::relayed_state(secret, p);
            let outcomes = measure_qubit(&rho, &basis, QubitIndex(2)).unwrap();
            for (outcome, charlie) in outcomes
                .iter()
                .zip([CharlieOutcome::Plus, CharlieOutcome::Minus])
            {
                let expected = closed_form::collapsed_pair(secret, charlie, p, alpha);
                let post = outcome.post_state.as_ref().expect("non-degenerate");
                assert!(
                    post.max_abs_diff(&expected) < EPS,
                    "collapse mismatch for {:?}/{:?}",
                    secret,
                    charlie
                );
                assert!(is_density_matrix(post, 1e-10));
            }
        }
    }

    #[test]
    fn collapse_probabilities_sum_to_one_for_relayed_states() {
        let basis = MeasurementBasis::new(0.82).unwrap();
        for secret in Encoding::ALL {
            let rho = closed_form::relayed_state(secret, 0.4);
            let outcomes = measure_qubit(&rho, &basis, QubitIndex(2)).unwrap();
            let total: f64 = outcomes.iter().map(|o| o.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
            // The reduced state of Charlie's qubit is I/2, so the tilted
            // basis still gives balanced outcomes.
            assert!((outcomes[0].probability - 0.5).abs() < EPS);
        }
    }

    #[test]
    fn bell_measure_on_maximally_mixed() {
        let rho = CMatrix::identity(4).scale_re(0.25);
        let outcomes = bell_measure(&rho).unwrap();
        for o in &outcomes {
            assert!((o.probability - 0.25).abs() < EPS);
        }
    }

    #[test]
    fn bell_measure_identifies_collapsed_noiseless_states() {
        // At p = 0 with the Hadamard basis every collapsed pair is a pure
        // Bell state; the Bell measurement must name it with certainty.
        let expected = [
            (Encoding::I, CharlieOutcome::Plus, 0usize),
            (Encoding::I, CharlieOutcome::Minus, 1),
            (Encoding::X, CharlieOutcome::Plus, 2),
            (Encoding::X, CharlieOutcome::Minus, 3),
            (Encoding::Y, CharlieOutcome::Plus, 3),
            (Encoding::Y, CharlieOutcome::Minus, 2),
            (Encoding::Z, CharlieOutcome::Plus, 1),
            (Encoding::Z, CharlieOutcome::Minus, 0),
        ];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (secret, charlie, bell_idx) in expected {
            let rho = closed_form::collapsed_pair(secret, charlie, 0.0, s);
            let outcomes = bell_measure(&rho).unwrap();
            assert!(
                (outcomes[bell_idx].probability - 1.0).abs() < 1e-10,
                "{:?}/{:?} should collapse onto Bell outcome {bell_idx}",
                secret,
                charlie
            );
        }
    }

    #[test]
    fn parity_projectors_are_complete_and_deterministic_on_blocks() {
        let parity = parity_projectors();
        let sum = &parity.elements()[0] + &parity.elements()[1];
        assert!(sum.max_abs_diff(&CMatrix::identity(4)) == 0.0);

        let (p, alpha) = (0.25, 0.7);
        let even = closed_form::collapsed_pair(Encoding::I, CharlieOutcome::Plus, p, alpha);
        let odd = closed_form::collapsed_pair(Encoding::X, CharlieOutcome::Plus, p, alpha);
        assert!((parity.probabilities(&even).unwrap()[0] - 1.0).abs() < EPS);
        assert!((parity.probabilities(&odd).unwrap()[1] - 1.0).abs() < EPS);

        let mixed = CMatrix::identity(4).scale_re(0.25);
        assert!((parity.probabilities(&mixed).unwrap()[0] - 0.5).abs() < EPS);
    }

    #[test]
    fn coherence_povm_projects_onto_bell_states() {
        let bells = bell_states();
        let even = coherence_sign_povm(ParitySubspace::Even);
        assert!(even.elements()[0].max_abs_diff(&bells[0].density()) < EPS);
        assert!(even.elements()[1].max_abs_diff(&bells[1].density()) < EPS);
        let odd = coherence_sign_povm(ParitySubspace::Odd);
        assert!(odd.elements()[0].max_abs_diff(&bells[2].density()) < EPS);
        assert!(odd.elements()[1].max_abs_diff(&bells[3].density()) < EPS);

        // completeness restricted to the block
        for povm in [&even, &odd] {
            let sum = &povm.elements()[0] + &povm.elements()[1];
            assert!(sum.max_abs_diff(povm.support()) < EPS);
        }
    }

    #[test]
    fn coherence_povm_error_rate_matches_formula() {
        // Tr(Π₂ ρ⁺_I) = ½(1 − 2αβ(1−p)³), the misidentification weight.
        let (p, alpha) = (0.3, 0.55);
        let beta = (1.0f64 - alpha * alpha).sqrt();
        let rho_plus_i = closed_form::collapsed_pair(Encoding::I, CharlieOutcome::Plus, p, alpha);
        let povm = coherence_sign_povm(ParitySubspace::Even);
        let probs = povm.probabilities(&rho_plus_i).unwrap();
        let expected = 0.5 * (1.0 - 2.0 * alpha * beta * (1.0 - p).powi(3));
        assert!((probs[1] - expected).abs() < EPS);
        assert!((probs[0] - (1.0 - expected)).abs() < EPS);
    }

    #[test]
    fn error_functional_is_symmetric_between_the_two_states() {
        // Tr(Π₁ ρ⁺_Z) = Tr(Π₂ ρ⁺_I) over a (p, α) grid.
        let povm = coherence_sign_povm(ParitySubspace::Even);
        for pi in 0..=10 {
            let p = pi as f64 / 10.0;
            for ai in 1..=9 {
                let alpha = ai as f64 / 10.0;
                let rho_i =
                    closed_form::collapsed_pair(Encoding::I, CharlieOutcome::Plus, p, alpha);
                let rho_z =
                    closed_form::collapsed_pair(Encoding::Z, CharlieOutcome::Plus, p, alpha);
                let wrong_on_z = povm.probabilities(&rho_z).unwrap()[0];
                let wrong_on_i = povm.probabilities(&rho_i).unwrap()[1];
                assert!((wrong_on_z - wrong_on_i).abs() < EPS);
            }
        }
    }

    #[test]
    fn helstrom_on_identical_states_is_a_coin_flip() {
        let rho = CMatrix::identity(2).scale_re(0.5);
        let (_, err) = helstrom(&rho, &rho, 0.5).unwrap();
        assert!((err - 0.5).abs() < EPS);
    }

    #[test]
    fn helstrom_on_orthogonal_states_is_error_free() {
        let mut zero = CMatrix::zeros(2);
        zero.set(0, 0, c(1.0, 0.0));
        let mut one = CMatrix::zeros(2);
        one.set(1, 1, c(1.0, 0.0));
        let (povm, err) = helstrom(&zero, &one, 0.5).unwrap();
        assert!(err < EPS);
        assert!((povm.probabilities(&zero).unwrap()[0] - 1.0).abs() < EPS);
        assert!((povm.probabilities(&one).unwrap()[1] - 1.0).abs() < EPS);
    }

    #[test]
    fn helstrom_matches_coherence_povm_on_collapsed_pairs() {
        let (p, alpha) = (0.5, std::f64::consts::FRAC_1_SQRT_2);
        let beta = (1.0f64 - alpha * alpha).sqrt();
        let rho_i = closed_form::collapsed_pair(Encoding::I, CharlieOutcome::Plus, p, alpha);
        let rho_z = closed_form::collapsed_pair(Encoding::Z, CharlieOutcome::Plus, p, alpha);
        let (_, err) = helstrom(&rho_i, &rho_z, 0.5).unwrap();
        let expected = 0.5 * (1.0 - 2.0 * alpha * beta * (1.0 - p).powi(3));
        assert!((err - expected).abs() < 1e-10);
    }

    #[test]
    fn helstrom_handles_unequal_priors() {
        // Two pure states with overlap ½; the minimum error is
        // ½(1 − ‖πa·ρa − πb·ρb‖₁) with ‖Γ‖₁ = √(1 − 4·πa·πb·|⟨a|b⟩|²).
        let mut zero = CMatrix::zeros(2);
        zero.set(0, 0, c(1.0, 0.0));
        let plus = CMatrix::from_real_row_slice(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        for prior in [0.2, 0.5, 0.8] {
            let (povm, err) = helstrom(&zero, &plus, prior).unwrap();
            let expected = 0.5 * (1.0 - (1.0f64 - 4.0 * prior * (1.0 - prior) * 0.5).sqrt());
            assert!(
                (err - expected).abs() < EPS,
                "prior {prior}: {err} vs {expected}"
            );
            // the constructed POVM attains the bound
            let wrong = prior * povm.probabilities(&zero).unwrap()[1]
                + (1.0 - prior) * povm.probabilities(&plus).unwrap()[0];
            assert!((wrong - expected).abs() < EPS);
        }
        // a certain prior makes guessing "a" unbeatable
        let (_, err) = helstrom(&zero, &plus, 1.0).unwrap();
        assert!(err < EPS);
    }

    #[test]
    fn trace_norm_of_pair_difference() {
        // ‖ρ⁺_I − ρ⁺_Z‖₁ = 4αβ(1−p)³: the difference is a pure coherence
        // term with eigenvalues ±2αβ(1−p)³.
        let (p, alpha) = (0.2, 0.4);
        let beta = (1.0f64 - alpha * alpha).sqrt();
        let rho_i = closed_form::collapsed_pair(Encoding::I, CharlieOutcome::Plus, p, alpha);
        let rho_z = closed_form::collapsed_pair(Encoding::Z, CharlieOutcome::Plus, p, alpha);
        let diff = &rho_i - &rho_z;
        let expected = 4.0 * alpha * beta * (1.0 - p).powi(3);
        assert!((linalg::trace_norm(&diff) - expected).abs() < EPS);
        // cross-check through the eigenvalues
        let eigs = diff.hermitian_eigenvalues();
        let sum_abs: f64 = eigs.iter().map(|l| l.abs()).sum();
        assert!((sum_abs - expected).abs() < EPS);
    }

    #[test]
    fn apply_trivial_povm() {
        let povm = Povm::new(vec![CMatrix::identity(4)]).unwrap();
        let rho = CMatrix::identity(4).scale_re(0.25);
        let probs = povm.probabilities(&rho).unwrap();
        assert_eq!(probs.len(), 1);
        assert!((probs[0] - 1.0).abs() < EPS);
    }

    #[test]
    fn povm_rejects_incomplete_sets() {
        let mut half = CMatrix::zeros(2);
        half.set(0, 0, c(1.0, 0.0));
        assert!(matches!(
            Povm::new(vec![half]),
            Err(Error::PovmIncomplete { .. })
        ));
    }

    #[test]
    fn povm_rejects_states_outside_its_support() {
        let povm = coherence_sign_povm(ParitySubspace::Even);
        let odd_state = closed_form::collapsed_pair(Encoding::X, CharlieOutcome::Plus, 0.3, 0.6);
        assert!(matches!(
            povm.probabilities(&odd_state),
            Err(Error::PovmIncomplete { .. })
        ));
    }

    #[test]
    fn sampled_frequencies_match_probabilities() {
        let (p, alpha) = (0.4, 0.6);
        let rho = closed_form::collapsed_pair(Encoding::I, CharlieOutcome::Plus, p, alpha);
        let povm = coherence_sign_povm(ParitySubspace::Even);
        let probs = povm.probabilities(&rho).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(12345);
        let trials = 100_000usize;
        let mut counts = [0usize; 2];
        for _ in 0..trials {
            counts[povm.sample(&rho, &mut rng).unwrap()] += 1;
        }
        let freq0 = counts[0] as f64 / trials as f64;
        let sigma = (probs[0] * (1.0 - probs[0]) / trials as f64).sqrt();
        assert!(
            (freq0 - probs[0]).abs() < 3.0 * sigma,
            "sampled frequency {freq0} vs probability {}",
            probs[0]
        );
    }

    #[test]
    fn sample_collapse_projects_into_the_block() {
        let parity = parity_projectors();
        let rho = CMatrix::identity(4).scale_re(0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (idx, post) = parity.sample_collapse(&rho, &mut rng).unwrap();
        let block = ParitySubspace::from_index(idx).unwrap().basis_indices();
        for r in 0..4 {
            for col in 0..4 {
                let inside = block.contains(&r) && block.contains(&col);
                if !inside {
                    assert!(post.get(r, col).norm() < EPS);
                }
            }
        }
        assert!(is_density_matrix(&post, 1e-10));
    }
}
