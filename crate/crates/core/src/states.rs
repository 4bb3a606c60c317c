//! Protocol states and operators: the three-qubit GHZ state, the Bell
//! basis, the Pauli set and the two-bit encoding unitaries.
//!
//! Basis-index convention: |abc⟩ ↦ 4a + 2b + c, so qubit 0 is the leftmost
//! ket symbol (Alice's qubit in |ABC⟩).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, QubitIndex};

const UNITARY_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-12;

/// A pure state as a complex amplitude vector of unit 2-norm.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a state, verifying finiteness and unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Shape(
                "state must have at least one amplitude".into(),
            ));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain {
                name: "state norm²",
                range: "1 ± 1e-12",
                value: norm_sq,
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            amplitudes
                .iter()
                .map(|&re| Complex64::new(re, 0.0))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product of unequal dims");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Density matrix |ψ⟩⟨ψ|.
    pub fn density(&self) -> CMatrix {
        let v = linalg::column(&self.amplitudes);
        let outer = &v * v.adjoint();
        CMatrix::from_fn(self.dim(), |r, c| outer[(r, c)]).expect("finite amplitudes")
    }
}

/// Alice's two-bit secret: which local unitary she applies.
///
/// The unitary set is {I, σx, iσy, σz} with the two-bit labels
/// I↦00, X↦01, Y↦10, Z↦11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    I,
    X,
    Y,
    Z,
}

impl Encoding {
    pub const ALL: [Encoding; 4] = [Encoding::I, Encoding::X, Encoding::Y, Encoding::Z];

    /// Two-bit value, most significant bit first.
    pub fn bits(self) -> [u8; 2] {
        match self {
            Encoding::I => [0, 0],
            Encoding::X => [0, 1],
            Encoding::Y => [1, 0],
            Encoding::Z => [1, 1],
        }
    }

    /// Index 0..4 in two-bit order (00, 01, 10, 11).
    pub fn index(self) -> usize {
        let [hi, lo] = self.bits();
        (hi as usize) * 2 + lo as usize
    }

    pub fn from_index(index: usize) -> Option<Encoding> {
        Encoding::ALL.get(index).copied()
    }

    /// Parses a two-bit string such as "01".
    pub fn from_bit_str(s: &str) -> Option<Encoding> {
        match s {
            "00" => Some(Encoding::I),
            "01" => Some(Encoding::X),
            "10" => Some(Encoding::Y),
            "11" => Some(Encoding::Z),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Encoding::I => "I",
            Encoding::X => "X",
            Encoding::Y => "Y",
            Encoding::Z => "Z",
        }
    }

    pub fn bit_str(self) -> &'static str {
        match self {
            Encoding::I => "00",
            Encoding::X => "01",
            Encoding::Y => "10",
            Encoding::Z => "11",
        }
    }
}

/// Label of a Bell-measurement outcome, in the fixed order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn index(self) -> usize {
        match self {
            BellOutcome::PhiPlus => 0,
            BellOutcome::PhiMinus => 1,
            BellOutcome::PsiPlus => 2,
            BellOutcome::PsiMinus => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "Phi+",
            BellOutcome::PhiMinus => "Phi-",
            BellOutcome::PsiPlus => "Psi+",
            BellOutcome::PsiMinus => "Psi-",
        }
    }
}

/// The three-qubit GHZ state (|000⟩ + |111⟩)/√2.
pub fn ghz3() -> PureState {
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![0.0; 8];
    v[0] = amp;
    v[7] = amp;
    PureState::from_real(&v).expect("unit norm by construction")
}

/// The identity on a single qubit.
pub fn identity2() -> CMatrix {
    CMatrix::identity(2)
}

/// Pauli σx.
pub fn sigma_x() -> CMatrix {
    CMatrix::from_real_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

/// Pauli σy = [[0, −i], [i, 0]].
pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .unwrap()
}

/// Pauli σz.
pub fn sigma_z() -> CMatrix {
    CMatrix::from_real_row_slice(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

/// The encoding unitary for a two-bit secret: I, σx, iσy or σz.
///
/// Note the factor i on σy, which makes the whole set real:
/// iσy = [[0, 1], [−1, 0]].
pub fn pauli(label: Encoding) -> CMatrix {
    match label {
        Encoding::I => identity2(),
        Encoding::X => sigma_x(),
        Encoding::Y => CMatrix::from_real_row_slice(2, &[0.0, 1.0, -1.0, 0.0]).unwrap(),
        Encoding::Z => sigma_z(),
    }
}

/// The four Bell states in the order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻ where
/// |Φ±⟩ = (|00⟩ ± |11⟩)/√2 and |Ψ±⟩ = (|01⟩ ± |10⟩)/√2.
pub fn bell_states() -> [PureState; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        PureState::from_real(&[s, 0.0, 0.0, s]).unwrap(),
        PureState::from_real(&[s, 0.0, 0.0, -s]).unwrap(),
        PureState::from_real(&[0.0, s, s, 0.0]).unwrap(),
        PureState::from_real(&[0.0, s, -s, 0.0]).unwrap(),
    ]
}

/// Conjugates an n-qubit density matrix by a single-qubit unitary placed at
/// factor `q`: ρ ↦ Ũ ρ Ũ† with Ũ = I⊗…⊗u⊗…⊗I. The trace is preserved.
pub fn apply_unitary_on_qubit(rho: &CMatrix, u: &CMatrix, q: QubitIndex) -> Result<CMatrix> {
    if u.dim() != 2 {
        return Err(Error::Shape(format!(
            "expected a 2x2 unitary, got dim {}",
            u.dim()
        )));
    }
    let uu = &(u.dagger()) * u;
    let deviation = uu.max_abs_diff(&CMatrix::identity(2));
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let n_qubits = rho.dim().trailing_zeros() as usize;
    if rho.dim() != 1 << n_qubits {
        return Err(Error::Shape(format!(
            "density matrix dim {} is not a power of two",
            rho.dim()
        )));
    }
    let embedded = linalg::embed_on_qubit(u, n_qubits, q)?;
    Ok(&(&embedded * rho) * &embedded.dagger())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::partial_trace;

    const EPS: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ghz_amplitudes() {
        let ghz = ghz3();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ghz.amplitude(0) - c(s, 0.0)).norm() < EPS);
        assert!((ghz.amplitude(7) - c(s, 0.0)).norm() < EPS);
        for k in 1..7 {
            assert_eq!(ghz.amplitude(k), c(0.0, 0.0));
        }
    }

    #[test]
    fn ghz_is_normalized() {
        let n: f64 = ghz3().amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < EPS);
    }

    #[test]
    fn ghz_single_qubit_marginals_are_maximally_mixed() {
        let rho = ghz3().density();
        let half_identity = CMatrix::identity(2).scale_re(0.5);
        for q in 0..3 {
            let reduced = partial_trace(&rho, &[2, 2, 2], &[QubitIndex(q)]).unwrap();
            assert!(reduced.max_abs_diff(&half_identity) < EPS);
        }
    }

    #[test]
    fn pauli_identity_and_z() {
        assert!(pauli(Encoding::I).max_abs_diff(&CMatrix::identity(2)) == 0.0);
        let z = pauli(Encoding::Z);
        assert_eq!(z.get(0, 0), c(1.0, 0.0));
        assert_eq!(z.get(1, 1), c(-1.0, 0.0));
    }

    #[test]
    fn pauli_y_is_real_rotation() {
        // iσy = [[0, 1], [−1, 0]]
        let y = pauli(Encoding::Y);
        assert_eq!(y.get(0, 0), c(0.0, 0.0));
        assert_eq!(y.get(0, 1), c(1.0, 0.0));
        assert_eq!(y.get(1, 0), c(-1.0, 0.0));
        assert_eq!(y.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn pauli_z_squares_to_identity() {
        let z = pauli(Encoding::Z);
        assert!((&z * &z).max_abs_diff(&CMatrix::identity(2)) < EPS);
    }

    #[test]
    fn encoding_unitaries_are_unitary() {
        for enc in Encoding::ALL {
            let u = pauli(enc);
            let dev = (&u * &u.dagger()).max_abs_diff(&CMatrix::identity(2));
            assert!(dev < 1e-14, "{:?} unitarity deviation {dev}", enc);
        }
    }

    #[test]
    fn encoding_bits_roundtrip() {
        for enc in Encoding::ALL {
            assert_eq!(Encoding::from_bit_str(enc.bit_str()), Some(enc));
            assert_eq!(Encoding::from_index(enc.index()), Some(enc));
        }
        assert_eq!(Encoding::from_bit_str("2x"), None);
    }

    #[test]
    fn bell_states_are_orthonormal_and_complete() {
        let bells = bell_states();
        for (i, a) in bells.iter().enumerate() {
            for (j, b) in bells.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - c(expected, 0.0)).norm() < EPS);
            }
        }
        let mut sum = CMatrix::zeros(4);
        for s in &bells {
            sum = &sum + &s.density();
        }
        assert!(sum.max_abs_diff(&CMatrix::identity(4)) < EPS);
    }

    #[test]
    fn phi_plus_amplitudes() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi_plus = &bell_states()[0];
        assert!((phi_plus.amplitude(0) - c(s, 0.0)).norm() < EPS);
        assert!((phi_plus.amplitude(3) - c(s, 0.0)).norm() < EPS);
        assert_eq!(phi_plus.amplitude(1), c(0.0, 0.0));
        assert_eq!(phi_plus.amplitude(2), c(0.0, 0.0));
    }

    #[test]
    fn apply_identity_leaves_state_unchanged() {
        let rho = ghz3().density();
        for q in 0..3 {
            let out = apply_unitary_on_qubit(&rho, &identity2(), QubitIndex(q)).unwrap();
            assert!(out.max_abs_diff(&rho) == 0.0);
        }
    }

    #[test]
    fn apply_sigma_x_flips_ghz_support() {
        // σx on qubit 0 maps the GHZ density onto ½(|100⟩+|011⟩)(⟨100|+⟨011|).
        let out = apply_unitary_on_qubit(&ghz3().density(), &sigma_x(), QubitIndex(0)).unwrap();
        let mut expected = CMatrix::zeros(8);
        for r in [3usize, 4] {
            for col in [3usize, 4] {
                expected.set(r, col, c(0.5, 0.0));
            }
        }
        assert!(out.max_abs_diff(&expected) < EPS);
    }

    #[test]
    fn apply_rejects_non_unitary() {
        let m = CMatrix::from_real_row_slice(2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let err = apply_unitary_on_qubit(&ghz3().density(), &m, QubitIndex(0)).unwrap_err();
        assert!(matches!(err, Error::NotUnitary { .. }));
    }

    #[test]
    fn encoded_pure_states_are_mutually_orthogonal() {
        // The four encoded GHZ variants are perfectly distinguishable.
        let ghz_rho = ghz3().density();
        let encoded: Vec<CMatrix> = Encoding::ALL
            .iter()
            .map(|&e| apply_unitary_on_qubit(&ghz_rho, &pauli(e), QubitIndex(0)).unwrap())
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                let overlap = (&encoded[i] * &encoded[j]).trace().norm();
                if i == j {
                    assert!((overlap - 1.0).abs() < EPS);
                } else {
                    assert!(overlap < EPS, "encodings {i} and {j} overlap: {overlap}");
                }
            }
        }
    }

    #[test]
    fn encoded_states_match_bell_decomposition() {
        // Each encoded GHZ state rewrites over the Bell basis on qubits (0,1)
        // and a ± superposition on qubit 2:
        //   I: ½[Φ⁺(|0⟩+|1⟩) + Φ⁻(|0⟩−|1⟩)]
        //   X: ½[Ψ⁺(|0⟩+|1⟩) − Ψ⁻(|0⟩−|1⟩)]
        //   Y: ½[Ψ⁺(|0⟩−|1⟩) − Ψ⁻(|0⟩+|1⟩)]
        //   Z: ½[Φ⁺(|0⟩−|1⟩) + Φ⁻(|0⟩+|1⟩)]
        let bells = bell_states();
        let plus = [0.5, 0.5]; // amplitudes of (|0⟩+|1⟩)/2 folded into the ½ prefactor
        let minus = [0.5, -0.5];

        let combine = |first: &PureState,
                       first_c: &[f64; 2],
                       second: &PureState,
                       second_c: &[f64; 2],
                       sign: f64| {
            let mut amps = vec![c(0.0, 0.0); 8];
            for bell_idx in 0..4 {
                for charlie in 0..2 {
                    let idx = bell_idx * 2 + charlie;
                    amps[idx] += first.amplitude(bell_idx) * c(first_c[charlie], 0.0);
                    amps[idx] += second.amplitude(bell_idx) * c(sign * second_c[charlie], 0.0);
                }
            }
            PureState::new(amps).unwrap()
        };

        let cases = [
            (
                Encoding::I,
                combine(&bells[0], &plus, &bells[1], &minus, 1.0),
            ),
            (
                Encoding::X,
                combine(&bells[2], &plus, &bells[3], &minus, -1.0),
            ),
            (
                Encoding::Y,
                combine(&bells[2], &minus, &bells[3], &plus, -1.0),
            ),
            (
                Encoding::Z,
                combine(&bells[0], &minus, &bells[1], &plus, 1.0),
            ),
        ];

        let ghz_rho = ghz3().density();
        for (enc, rewritten) in cases {
            let encoded = apply_unitary_on_qubit(&ghz_rho, &pauli(enc), QubitIndex(0)).unwrap();
            assert!(
                encoded.max_abs_diff(&rewritten.density()) < EPS,
                "Bell decomposition mismatch for {:?}",
                enc
            );
        }
    }
}
