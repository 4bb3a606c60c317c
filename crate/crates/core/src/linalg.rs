//! Dense complex-matrix kernel for small multi-qubit registers.
//!
//! Everything in this crate lives in Hilbert spaces of dimension at most
//! [`MAX_DIM`] (four qubits), so matrices are stored dense and all
//! decompositions run in negligible time. The kernel provides the tensor
//! product, the partial trace, the trace norm and density-matrix
//! verification; heavier factorizations (Hermitian eigendecomposition,
//! SVD) are delegated to `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported matrix dimension (a four-qubit register).
pub const MAX_DIM: usize = 16;

/// Position of a tensor factor in a register.
///
/// Index 0 is the leftmost ket label: in |abc⟩ qubit 0 carries `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitIndex(pub usize);

/// A dense complex square matrix.
///
/// Carrier for every operator and state in the crate: density matrices,
/// Kraus operators, unitaries, projectors. Entries are `f64` pairs and are
/// guaranteed finite by every constructor.
#[derive(Debug, Clone)]
pub struct CMatrix {
    data: DMatrix<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from a row-major slice of entries.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::from_inner(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Builds a matrix with real entries from a row-major slice.
    pub fn from_real_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        let complex: Vec<Complex64> = entries.iter().map(|&re| Complex64::new(re, 0.0)).collect();
        Self::from_row_slice(dim, &complex)
    }

    /// Builds a matrix by evaluating `f(row, col)` for every entry.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be at least 1".into()));
        }
        Self::from_inner(DMatrix::from_fn(dim, dim, f))
    }

    fn from_inner(data: DMatrix<Complex64>) -> Result<Self> {
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[(row, col)] = value;
    }

    /// Borrows the underlying `nalgebra` matrix.
    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        CMatrix {
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            data: &self.data * factor,
        }
    }

    pub fn scale_re(&self, factor: f64) -> CMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "comparing matrices of unequal dim");
        (&self.data - &other.data)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Deviation from Hermiticity: max |m(i,j) − conj(m(j,i))|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                dev = dev.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// Returns the (real) eigenvalues and, as matrix columns, an orthonormal
    /// set of eigenvectors. The input is hermitized first so that floating
    /// noise of order 1e-15 does not disturb the solver.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMatrix) {
        let herm = (&self.data + self.data.adjoint()).scale(0.5);
        let eig = herm.symmetric_eigen();
        (
            eig.eigenvalues.iter().copied().collect(),
            CMatrix {
                data: eig.eigenvectors,
            },
        )
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let (mut vals, _) = self.hermitian_eigen();
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }
}

impl std::ops::Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

/// Kronecker product `a ⊗ b`.
///
/// Entry convention: `(a⊗b)[(i·dim_b + k), (j·dim_b + l)] = a[i,j] · b[k,l]`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let dim = a.dim() * b.dim();
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
    }
    Ok(CMatrix {
        data: a.data.kronecker(&b.data),
    })
}

/// Kronecker product of a list of factors, left to right.
pub fn tensor_all(factors: &[&CMatrix]) -> Result<CMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Shape("tensor_all needs at least one factor".into()))?;
    let mut out = (*first).clone();
    for f in rest {
        out = tensor(&out, f)?;
    }
    Ok(out)
}

/// Embeds a single-qubit operator at factor `q` of an `n_qubits` register:
/// `I ⊗ … ⊗ op ⊗ … ⊗ I`.
pub fn embed_on_qubit(op: &CMatrix, n_qubits: usize, q: QubitIndex) -> Result<CMatrix> {
    if op.dim() != 2 {
        return Err(Error::Shape(format!(
            "expected a single-qubit (2x2) operator, got dim {}",
            op.dim()
        )));
    }
    if q.0 >= n_qubits {
        return Err(Error::Shape(format!(
            "qubit index {} out of range for {n_qubits} qubits",
            q.0
        )));
    }
    let id = CMatrix::identity(2);
    let factors: Vec<&CMatrix> = (0..n_qubits)
        .map(|k| if k == q.0 { op } else { &id })
        .collect();
    tensor_all(&factors)
}

/// Partial trace over the factors *not* listed in `keep`.
///
/// `register_dims` gives the dimension of each tensor factor (all 2 for
/// qubit registers); kept factors retain their register order in the
/// result. The trace is preserved: Tr(result) = Tr(rho).
pub fn partial_trace(
    rho: &CMatrix,
    register_dims: &[usize],
    keep: &[QubitIndex],
) -> Result<CMatrix> {
    let total: usize = register_dims.iter().product();
    if total != rho.dim() {
        return Err(Error::Shape(format!(
            "register dims {:?} give total dimension {total}, but matrix has dim {}",
            register_dims,
            rho.dim()
        )));
    }
    let mut kept: Vec<usize> = keep.iter().map(|q| q.0).collect();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::Shape("keep set must be non-empty".into()));
    }
    if kept.len() != keep.len() {
        return Err(Error::Shape("keep set contains duplicate factors".into()));
    }
    if *kept.last().unwrap() >= register_dims.len() {
        return Err(Error::Shape(format!(
            "keep factor {} out of range for {} factors",
            kept.last().unwrap(),
            register_dims.len()
        )));
    }

    let n = register_dims.len();
    let traced: Vec<usize> = (0..n).filter(|k| !kept.contains(k)).collect();
    let out_dim: usize = kept.iter().map(|&k| register_dims[k]).product();

    // Decompose a flat index into per-factor digits (factor 0 most significant).
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0; n];
        for k in (0..n).rev() {
            out[k] = idx % register_dims[k];
            idx /= register_dims[k];
        }
        out
    };
    let compose = |digits: &[usize], which: &[usize]| -> usize {
        which
            .iter()
            .fold(0, |acc, &k| acc * register_dims[k] + digits[k])
    };

    let mut out = DMatrix::<Complex64>::zeros(out_dim, out_dim);
    for row in 0..rho.dim() {
        let rd = digits(row);
        for col in 0..rho.dim() {
            let cd = digits(col);
            if traced.iter().all(|&k| rd[k] == cd[k]) {
                out[(compose(&rd, &kept), compose(&cd, &kept))] += rho.data[(row, col)];
            }
        }
    }
    Ok(CMatrix { data: out })
}

/// Trace norm: the sum of singular values. For Hermitian matrices this is
/// the sum of absolute eigenvalues.
pub fn trace_norm(a: &CMatrix) -> f64 {
    a.data
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .sum()
}

/// Tr(a·b) in O(dim²), without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    debug_assert_eq!(a.dim(), b.dim());
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            sum += a.data[(i, j)] * b.data[(j, i)];
        }
    }
    sum
}

/// Outcome of checking the density-matrix axioms on a candidate ρ.
#[derive(Debug, Clone)]
pub struct DensityCheck {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub tol: f64,
}

impl DensityCheck {
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation <= self.tol
    }

    pub fn has_unit_trace(&self) -> bool {
        self.trace_deviation <= self.tol
    }

    pub fn is_positive(&self) -> bool {
        self.min_eigenvalue >= -self.tol
    }

    pub fn is_valid(&self) -> bool {
        self.is_hermitian() && self.has_unit_trace() && self.is_positive()
    }

    /// Names of the properties that failed, for diagnostics.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.is_hermitian() {
            out.push("hermitian");
        }
        if !self.has_unit_trace() {
            out.push("unit trace");
        }
        if !self.is_positive() {
            out.push("positive semidefinite");
        }
        out
    }
}

impl std::fmt::Display for DensityCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            write!(f, "valid density matrix (tol {:.1e})", self.tol)
        } else {
            write!(
                f,
                "not a density matrix: failed {{{}}} (hermiticity dev {:.3e}, trace dev {:.3e}, min eigenvalue {:.3e})",
                self.failures().join(", "),
                self.hermiticity_deviation,
                self.trace_deviation,
                self.min_eigenvalue
            )
        }
    }
}

/// Checks Hermiticity, unit trace and positive semidefiniteness of `rho`
/// within `tol`, reporting how far each property deviates.
pub fn density_check(rho: &CMatrix, tol: f64) -> DensityCheck {
    let trace = rho.trace();
    let trace_deviation = (trace - Complex64::new(1.0, 0.0)).norm();
    let min_eigenvalue = rho
        .hermitian_eigenvalues()
        .first()
        .copied()
        .unwrap_or(f64::NAN);
    DensityCheck {
        hermiticity_deviation: rho.hermiticity_deviation(),
        trace_deviation,
        min_eigenvalue,
        tol,
    }
}

/// True iff `rho` is Hermitian, unit-trace and PSD within `tol`.
pub fn is_density_matrix(rho: &CMatrix, tol: f64) -> bool {
    density_check(rho, tol).is_valid()
}

/// Column vector helper used by state types.
pub(crate) fn column(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}
