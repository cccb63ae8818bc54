//! Dense complex linear algebra for one- and two-qubit operators and states.
//!
//! Two-qubit basis order is fixed as `(|++>, |+->, |-+>, |-->)`: qubit A is
//! the first tensor factor, `|+>` is the `sigma_z` eigenstate with eigenvalue
//! `+1` (the excited state for positive frequency). Every 4x4 matrix in the
//! crate, including the closed-form relaxation solutions in [`crate::dynamics`],
//! uses this layout. Basis index = `2a + b` with `a, b = 0` for `|+>`.
//!
//! All types are immutable values after construction and safe to share
//! across threads.

mod eigen;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance enforced on construction of states and Hamiltonians.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Unit-trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue a density matrix may carry (clamped positivity).
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// Residual allowed when reconstructing a matrix from its eigensystem.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Which qubit of the pair an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    A,
    B,
}

/// Dense complex square matrix of dimension 2 or 4, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexSquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexSquareMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexSquareMatrix(dim={})", self.dim)?;
        for r in 0..self.dim {
            write!(f, "  [")?;
            for c in 0..self.dim {
                let z = self.at(r, c);
                write!(f, " {:+.6e}{:+.6e}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl ComplexSquareMatrix {
    /// Build from row-major entries; `dim` must be 2 or 4 and all entries finite.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::Dimension { expected: 4, got: dim });
        }
        if data.len() != dim * dim {
            return Err(Error::validation(format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("matrix entries must be finite"));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a function of (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, Complex64::new(e, 0.0));
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.at(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    let v = out.at(r, c) + a * rhs.at(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self { dim: self.dim, data }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.at(c, r).conj())
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        let data = self.data.iter().map(|a| a.conj()).collect();
        Self { dim: self.dim, data }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, c| 0.5 * (self.at(r, c) + self.at(c, r).conj()))
    }

    /// Largest `|M[i][j] - conj(M[j][i])|` over all entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((self.at(r, c) - self.at(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Kronecker product of two single-qubit operators, A-major block layout.
pub fn kron(a: &ComplexSquareMatrix, b: &ComplexSquareMatrix) -> Result<ComplexSquareMatrix> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: a.dim().max(b.dim()) });
    }
    let mut out = ComplexSquareMatrix::zeros(4);
    for ia in 0..2 {
        for ja in 0..2 {
            for ib in 0..2 {
                for jb in 0..2 {
                    out.set(2 * ia + ib, 2 * ja + jb, a.at(ia, ja) * b.at(ib, jb));
                }
            }
        }
    }
    Ok(out)
}

/// `sigma_z` in the `(|+>, |->)` basis.
pub fn sigma_z() -> ComplexSquareMatrix {
    ComplexSquareMatrix::diagonal(&[1.0, -1.0])
}

/// `sigma_y` in the `(|+>, |->)` basis.
pub fn sigma_y() -> ComplexSquareMatrix {
    let mut m = ComplexSquareMatrix::zeros(2);
    m.set(0, 1, Complex64::new(0.0, -1.0));
    m.set(1, 0, Complex64::new(0.0, 1.0));
    m
}

/// Lowering operator: `sigma_- |+> = |->`.
pub fn sigma_minus() -> ComplexSquareMatrix {
    let mut m = ComplexSquareMatrix::zeros(2);
    m.set(1, 0, Complex64::new(1.0, 0.0));
    m
}

/// Raising operator: `sigma_+ |-> = |+>`.
pub fn sigma_plus() -> ComplexSquareMatrix {
    let mut m = ComplexSquareMatrix::zeros(2);
    m.set(0, 1, Complex64::new(1.0, 0.0));
    m
}

/// Eigenvalues (ascending) with orthonormal eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexSquareMatrix,
}

impl SpectralDecomposition {
    /// Reverse to descending eigenvalue order (the density-matrix convention).
    pub fn into_descending(self) -> Self {
        let n = self.eigenvalues.len();
        let eigenvalues: Vec<f64> = self.eigenvalues.iter().rev().copied().collect();
        let mut eigenvectors = ComplexSquareMatrix::zeros(n);
        for col in 0..n {
            for row in 0..n {
                eigenvectors.set(row, col, self.eigenvectors.at(row, n - 1 - col));
            }
        }
        Self { eigenvalues, eigenvectors }
    }

    /// `sum_n lambda_n v_n v_n†`.
    pub fn reconstruct(&self) -> ComplexSquareMatrix {
        let n = self.eigenvalues.len();
        ComplexSquareMatrix::from_fn(n, |r, c| {
            (0..n)
                .map(|k| {
                    self.eigenvectors.at(r, k)
                        * self.eigenvectors.at(c, k).conj()
                        * self.eigenvalues[k]
                })
                .sum()
        })
    }

    /// Largest deviation of `V† V` from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.eigenvalues.len();
        let gram = self.eigenvectors.adjoint().mul(&self.eigenvectors);
        gram.max_abs_diff(&ComplexSquareMatrix::identity(n))
    }

    /// Column `k` as a ket.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvalues.len())
            .map(|r| self.eigenvectors.at(r, k))
            .collect()
    }
}

/// Hermitian eigendecomposition, eigenvalues ascending.
///
/// Rejects inputs whose Hermiticity residual exceeds `1e-10`, naming the
/// largest asymmetry. Eigenvectors within degenerate clusters are
/// orthonormal with a deterministic (index-stable) ordering.
pub fn eigen_hermitian(m: &ComplexSquareMatrix) -> Result<SpectralDecomposition> {
    let asym = m.hermiticity_residual();
    if asym > 1e-10 {
        return Err(Error::NotHermitian { max_asymmetry: asym });
    }
    let (eigenvalues, eigenvectors) = eigen::jacobi_hermitian(m);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Two-qubit density matrix (or single-qubit after a partial trace).
///
/// Construction enforces Hermiticity, unit trace and clamped positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexSquareMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexSquareMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_residual();
        if herm > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_asymmetry: herm });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::validation(format!(
                "density matrix trace is {:+.6e}{:+.6e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let spectrum = eigen_hermitian(&matrix)?;
        if let Some(&min) = spectrum
            .eigenvalues
            .iter()
            .min_by(|a, b| a.partial_cmp(b).expect("finite"))
            .as_ref()
        {
            if *min < EIGENVALUE_FLOOR {
                return Err(Error::validation(format!(
                    "density matrix has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Projector onto a normalized ket.
    pub fn from_pure(ket: &[Complex64]) -> Result<Self> {
        let dim = ket.len();
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::validation(format!(
                "ket norm^2 is {norm_sq:.6e}, expected 1"
            )));
        }
        let m = ComplexSquareMatrix::from_fn(dim, |r, c| ket[r] * ket[c].conj());
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexSquareMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        Self { matrix: m }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.at(row, col)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).trace().re
    }

    /// Spectrum in descending order.
    pub fn spectral_decomposition(&self) -> SpectralDecomposition {
        eigen_hermitian(&self.matrix)
            .expect("validated density matrix is Hermitian")
            .into_descending()
    }

    /// Eigenvalues descending, clamped to `[0, 1]`.
    pub fn populations_descending(&self) -> Vec<f64> {
        self.spectral_decomposition()
            .eigenvalues
            .iter()
            .map(|&p| p.clamp(0.0, 1.0))
            .collect()
    }

    /// PSD square root via the eigensystem, negative roundoff clamped to zero.
    pub fn sqrt_matrix(&self) -> ComplexSquareMatrix {
        let mut dec = eigen_hermitian(&self.matrix).expect("validated density matrix");
        for ev in dec.eigenvalues.iter_mut() {
            *ev = ev.max(0.0).sqrt();
        }
        dec.reconstruct()
    }
}

/// Hermitian operator stored together with its sorted spectral decomposition.
#[derive(Debug, Clone)]
pub struct HamiltonianOperator {
    matrix: ComplexSquareMatrix,
    spectrum: SpectralDecomposition,
}

impl HamiltonianOperator {
    /// Validate Hermiticity, decompose, and check the eigensystem
    /// reconstructs the input.
    pub fn from_matrix(matrix: ComplexSquareMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_residual();
        if herm > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_asymmetry: herm });
        }
        let spectrum = eigen_hermitian(&matrix)?;
        let scale = 1.0 + matrix.max_abs();
        let residual = spectrum.reconstruct().max_abs_diff(&matrix);
        if residual > RECONSTRUCTION_TOL * scale {
            return Err(Error::validation(format!(
                "eigensystem reconstruction residual {residual:.3e} exceeds tolerance"
            )));
        }
        Ok(Self { matrix, spectrum })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    /// Energies in ascending order.
    pub fn energies(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// Eigenvectors as columns, aligned with [`Self::energies`].
    pub fn eigenvectors(&self) -> &ComplexSquareMatrix {
        &self.spectrum.eigenvectors
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// `tr(rho H)`; real part (the imaginary part is roundoff for valid inputs).
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        self.matrix.mul(rho.matrix()).trace().re
    }
}

/// Two-qubit system Hamiltonian `(omega_a/2) sz x I + (omega_b/2) I x sz`.
///
/// Diagonal in the product basis; requires positive frequencies and logs a
/// warning outside the `omega_a > omega_b` regime the experiment assumes.
pub fn system_hamiltonian(omega_a: f64, omega_b: f64) -> Result<HamiltonianOperator> {
    if !(omega_a > 0.0) || !(omega_b > 0.0) {
        return Err(Error::domain(format!(
            "qubit frequencies must be positive, got omega_a={omega_a:e}, omega_b={omega_b:e}"
        )));
    }
    if omega_a <= omega_b {
        log::warn!(
            "system_hamiltonian: omega_a={omega_a:e} <= omega_b={omega_b:e}; \
             outside the assumed omega_a > omega_b regime"
        );
    }
    let d = ComplexSquareMatrix::diagonal(&[
        0.5 * (omega_a + omega_b),
        0.5 * (omega_a - omega_b),
        0.5 * (omega_b - omega_a),
        -0.5 * (omega_a + omega_b),
    ]);
    HamiltonianOperator::from_matrix(d)
}

/// Single-qubit Hamiltonian `(omega/2) sigma_z`.
pub fn qubit_hamiltonian(omega: f64) -> Result<HamiltonianOperator> {
    if !(omega > 0.0) {
        return Err(Error::domain(format!("qubit frequency must be positive, got {omega:e}")));
    }
    HamiltonianOperator::from_matrix(ComplexSquareMatrix::diagonal(&[0.5 * omega, -0.5 * omega]))
}

/// The singlet `(|+-> - |-+>) / sqrt(2)` as a density matrix.
pub fn singlet_state() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ket = [
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    DensityMatrix::from_pure(&ket).expect("singlet ket is normalized")
}

/// Reduced state of one qubit of a two-qubit density matrix.
pub fn partial_trace(rho: &DensityMatrix, keep: Qubit) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::Dimension { expected: 4, got: rho.dim() });
    }
    let m = ComplexSquareMatrix::from_fn(2, |r, c| match keep {
        Qubit::A => rho.at(2 * r, 2 * c) + rho.at(2 * r + 1, 2 * c + 1),
        Qubit::B => rho.at(r, c) + rho.at(2 + r, 2 + c),
    });
    DensityMatrix::new(m)
}

/// Product state `rho_a x rho_b`.
pub fn product_state(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<DensityMatrix> {
    let m = kron(rho_a.matrix(), rho_b.matrix())?;
    DensityMatrix::new(m)
}

/// Two-qubit concurrence.
///
/// Computed from the Hermitian form `sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho)`,
/// whose spectrum matches the conventional non-Hermitian product, so the
/// in-house Hermitian eigensolver applies.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Dimension { expected: 4, got: rho.dim() });
    }
    let sy2 = kron(&sigma_y(), &sigma_y())?;
    let spun = sy2.mul(&rho.matrix().conj()).mul(&sy2);
    let root = rho.sqrt_matrix();
    let core = root.mul(&spun).mul(&root).hermitian_part();
    let dec = eigen_hermitian(&core)?;
    let mut lambdas: Vec<f64> = dec.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension { expected: rho.dim(), got: sigma.dim() });
    }
    let root = rho.sqrt_matrix();
    let core = root.mul(sigma.matrix()).mul(&root).hermitian_part();
    let dec = eigen_hermitian(&core)?;
    let tr: f64 = dec.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_identity_is_all_ones() {
        let dec = eigen_hermitian(&ComplexSquareMatrix::identity(4)).unwrap();
        for ev in &dec.eigenvalues {
            assert!((ev - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_sigma_z_spectrum() {
        let dec = eigen_hermitian(&sigma_z()).unwrap();
        assert!((dec.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((dec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = ComplexSquareMatrix::zeros(2);
        m.set(0, 1, c(1.0, 0.0));
        let err = eigen_hermitian(&m).unwrap_err();
        match err {
            Error::NotHermitian { max_asymmetry } => assert!((max_asymmetry - 1.0).abs() < 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn eigen_reconstructs_fixed_hermitian() {
        let m = ComplexSquareMatrix::new(
            4,
            vec![
                c(1.0, 0.0), c(0.3, 0.2), c(0.0, -0.5), c(0.1, 0.0),
                c(0.3, -0.2), c(-0.7, 0.0), c(0.25, 0.0), c(0.0, 0.1),
                c(0.0, 0.5), c(0.25, 0.0), c(0.4, 0.0), c(-0.3, 0.3),
                c(0.1, 0.0), c(0.0, -0.1), c(-0.3, -0.3), c(2.0, 0.0),
            ],
        )
        .unwrap();
        let dec = eigen_hermitian(&m).unwrap();
        assert!(dec.reconstruct().max_abs_diff(&m) < 1e-12);
        assert!(dec.orthonormality_residual() < 1e-12);
        for w in dec.eigenvalues.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn system_hamiltonian_diagonal_entries() {
        let h = system_hamiltonian(2e12, 1e12).unwrap();
        let expect = [1.5e12, 0.5e12, -0.5e12, -1.5e12];
        for (i, &e) in expect.iter().enumerate() {
            assert!((h.matrix().at(i, i).re - e).abs() < 1e-3 * e.abs().max(1.0));
        }
        let spectrum = h.energies();
        assert!((spectrum[0] + 1.5e12).abs() < 1.0);
        assert!((spectrum[3] - 1.5e12).abs() < 1.0);
    }

    #[test]
    fn system_hamiltonian_small_units() {
        let h = system_hamiltonian(2.0, 1.0).unwrap();
        let expect = [-1.5, -0.5, 0.5, 1.5];
        for (ev, e) in h.energies().iter().zip(expect) {
            assert!((ev - e).abs() < 1e-14);
        }
    }

    #[test]
    fn system_hamiltonian_degenerate_case() {
        let w = 3.0;
        let h = system_hamiltonian(w, w).unwrap();
        let expect = [-w, 0.0, 0.0, w];
        for (ev, e) in h.energies().iter().zip(expect) {
            assert!((ev - e).abs() < 1e-14);
        }
    }

    #[test]
    fn system_hamiltonian_ground_state() {
        let h = system_hamiltonian(1.7, 0.4).unwrap();
        assert!((h.energies()[0] + 0.5 * (1.7 + 0.4)).abs() < 1e-14);
        // Ground eigenvector is |--> (last basis vector).
        let v = h.spectrum().vector(0);
        assert!((v[3].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn system_hamiltonian_rejects_nonpositive_frequency() {
        assert!(matches!(system_hamiltonian(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(system_hamiltonian(1.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn singlet_invariants() {
        let rho = singlet_state();
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!((rho.at(1, 1).re - 0.5).abs() < 1e-14);
        assert!((rho.at(2, 2).re - 0.5).abs() < 1e-14);
        assert!((rho.at(1, 2).re + 0.5).abs() < 1e-14);
        assert!((rho.at(2, 1).re + 0.5).abs() < 1e-14);
        assert!(rho.at(0, 0).norm() < 1e-14);
        assert!(rho.at(3, 3).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_of_singlet_is_maximally_mixed() {
        let rho = singlet_state();
        for keep in [Qubit::A, Qubit::B] {
            let r = partial_trace(&rho, keep).unwrap();
            assert!(r.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        // |+-><+-|: keep B must give |-><-|.
        let ket = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let rho = DensityMatrix::from_pure(&ket).unwrap();
        let rb = partial_trace(&rho, Qubit::B).unwrap();
        assert!(rb.at(0, 0).norm() < 1e-14);
        assert!((rb.at(1, 1).re - 1.0).abs() < 1e-14);
        let ra = partial_trace(&rho, Qubit::A).unwrap();
        assert!((ra.at(0, 0).re - 1.0).abs() < 1e-14);
        assert!((ra.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_wrong_dimension() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(partial_trace(&rho, Qubit::A), Err(Error::Dimension { .. })));
    }

    #[test]
    fn concurrence_of_singlet_is_one() {
        let value = concurrence(&singlet_state()).unwrap();
        assert!((value - 1.0).abs() < 1e-10, "concurrence {value}");
    }

    #[test]
    fn concurrence_of_product_state_is_zero() {
        let rho_a = DensityMatrix::maximally_mixed(2);
        let mut mb = ComplexSquareMatrix::zeros(2);
        mb.set(0, 0, c(0.75, 0.0));
        mb.set(1, 1, c(0.25, 0.0));
        mb.set(0, 1, c(0.1, 0.05));
        mb.set(1, 0, c(0.1, -0.05));
        let rho_b = DensityMatrix::new(mb).unwrap();
        let rho = product_state(&rho_a, &rho_b).unwrap();
        assert!(concurrence(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn density_matrix_rejects_bad_inputs() {
        // Wrong trace.
        let m = ComplexSquareMatrix::identity(2);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Validation(_))));
        // Negative eigenvalue.
        let m = ComplexSquareMatrix::diagonal(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Validation(_))));
        // Non-Hermitian.
        let mut m = ComplexSquareMatrix::diagonal(&[0.5, 0.5]);
        m.set(0, 1, c(0.2, 0.0));
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn matrix_constructor_guards() {
        assert!(ComplexSquareMatrix::new(3, vec![c(0.0, 0.0); 9]).is_err());
        assert!(ComplexSquareMatrix::new(2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(ComplexSquareMatrix::new(2, vec![c(f64::NAN, 0.0); 4]).is_err());
        assert!(matches!(
            kron(&ComplexSquareMatrix::identity(4), &ComplexSquareMatrix::identity(2)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn fidelity_limits() {
        let rho = singlet_state();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        let mixed = DensityMatrix::maximally_mixed(4);
        let f = fidelity(&rho, &mixed).unwrap();
        assert!((f - 0.25).abs() < 1e-10, "fidelity {f}");
    }
}
