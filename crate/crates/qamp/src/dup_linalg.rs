//! Complex linear algebra for doubled-up operators.
//!
//! A doubled-up matrix acts on channel operators stacked as (a, a^#) and has
//! the block form [[A1, A2], [A2^#, A1^#]], so the top block row determines
//! the whole matrix. The indefinite metric J = diag(I, -I) turns the
//! commutation-preserving maps into the Bogoliubov group: G is symplectic
//! exactly when G^dag J G = J.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type ComplexMatrix = DMatrix<Complex<f64>>;

pub type C64 = Complex<f64>;

/// Frobenius norm of the difference of two matrices.
pub fn diff_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

/// The metric J = diag(I_half, -I_half) as a dense matrix.
pub fn j_matrix(half: usize) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(2 * half, 2 * half);
    for i in 0..half {
        j[(i, i)] = C64::new(1.0, 0.0);
        j[(half + i, half + i)] = C64::new(-1.0, 0.0);
    }
    j
}

/// Entrywise complex conjugate (no transpose).
pub fn conj(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}

/// Doubled-up matrix stored by its top block row (block1, block2).
///
/// Invariant: the two blocks have identical shape, and the expanded matrix is
/// [[block1, block2], [block2^#, block1^#]].
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledUpMatrix {
    block1: ComplexMatrix,
    block2: ComplexMatrix,
}

impl DoubledUpMatrix {
    pub fn new(block1: ComplexMatrix, block2: ComplexMatrix) -> Result<Self> {
        if block1.shape() != block2.shape() {
            return Err(Error::Dimension(format!(
                "doubled-up blocks must share a shape, got {}x{} and {}x{}",
                block1.nrows(),
                block1.ncols(),
                block2.nrows(),
                block2.ncols()
            )));
        }
        Ok(Self { block1, block2 })
    }

    /// Doubled-up zero matrix with blocks of shape rows x cols.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            block1: ComplexMatrix::zeros(rows, cols),
            block2: ComplexMatrix::zeros(rows, cols),
        }
    }

    /// Doubled-up identity on `half` channels (expands to I_{2*half}).
    pub fn identity(half: usize) -> Self {
        Self {
            block1: ComplexMatrix::identity(half, half),
            block2: ComplexMatrix::zeros(half, half),
        }
    }

    /// Block-diagonal doubled-up form of a plain matrix: expands to
    /// [[m, 0], [0, m^#]].
    pub fn block_diagonal(m: &ComplexMatrix) -> Self {
        Self {
            block1: m.clone(),
            block2: ComplexMatrix::zeros(m.nrows(), m.ncols()),
        }
    }

    pub fn block1(&self) -> &ComplexMatrix {
        &self.block1
    }

    pub fn block2(&self) -> &ComplexMatrix {
        &self.block2
    }

    /// Shape of each block.
    pub fn block_shape(&self) -> (usize, usize) {
        self.block1.shape()
    }

    /// Expand to the full 2r x 2c matrix [[A1, A2], [A2^#, A1^#]].
    pub fn expand(&self) -> ComplexMatrix {
        let (r, c) = self.block1.shape();
        let mut full = ComplexMatrix::zeros(2 * r, 2 * c);
        for i in 0..r {
            for j in 0..c {
                let a1 = self.block1[(i, j)];
                let a2 = self.block2[(i, j)];
                full[(i, j)] = a1;
                full[(i, c + j)] = a2;
                full[(r + i, j)] = a2.conj();
                full[(r + i, c + j)] = a1.conj();
            }
        }
        full
    }

    /// Read a doubled-up matrix back off a full matrix, checking that the
    /// bottom block row is the conjugate of the top one to within `tol`
    /// (Frobenius, absolute).
    pub fn from_full(full: &ComplexMatrix, tol: f64) -> Result<Self> {
        let (rows, cols) = full.shape();
        if rows % 2 != 0 || cols % 2 != 0 {
            return Err(Error::Dimension(format!(
                "doubled-up matrices have even dimensions, got {rows}x{cols}"
            )));
        }
        let (r, c) = (rows / 2, cols / 2);
        let block1 = full.view((0, 0), (r, c)).into_owned();
        let block2 = full.view((0, c), (r, c)).into_owned();
        let lower_left = full.view((r, 0), (r, c)).into_owned();
        let lower_right = full.view((r, c), (r, c)).into_owned();
        let residual = ((&lower_left - conj(&block2)).norm_squared()
            + (&lower_right - conj(&block1)).norm_squared())
        .sqrt();
        if residual > tol {
            return Err(Error::Contract(format!(
                "matrix is not doubled-up: lower block row deviates by {residual:.3e} (tolerance {tol:.3e})"
            )));
        }
        Ok(Self { block1, block2 })
    }

    /// Adjoint in doubled-up form: (Δ(A1, A2))^dag = Δ(A1^dag, A2^T).
    pub fn adjoint(&self) -> Self {
        Self {
            block1: self.block1.adjoint(),
            block2: self.block2.transpose(),
        }
    }

    /// Frobenius norm of the expanded matrix.
    pub fn norm(&self) -> f64 {
        (2.0 * (self.block1.norm_squared() + self.block2.norm_squared())).sqrt()
    }
}

/// Product of doubled-up matrices stays doubled-up:
/// Δ(A1, A2) Δ(B1, B2) = Δ(A1 B1 + A2 B2^#, A1 B2 + A2 B1^#).
impl std::ops::Mul<&DoubledUpMatrix> for &DoubledUpMatrix {
    type Output = DoubledUpMatrix;

    fn mul(self, rhs: &DoubledUpMatrix) -> DoubledUpMatrix {
        assert_eq!(
            self.block1.ncols(),
            rhs.block1.nrows(),
            "doubled-up product requires compatible block shapes"
        );
        DoubledUpMatrix {
            block1: &self.block1 * &rhs.block1 + &self.block2 * conj(&rhs.block2),
            block2: &self.block1 * &rhs.block2 + &self.block2 * conj(&rhs.block1),
        }
    }
}

impl std::ops::Add<&DoubledUpMatrix> for &DoubledUpMatrix {
    type Output = DoubledUpMatrix;

    fn add(self, rhs: &DoubledUpMatrix) -> DoubledUpMatrix {
        DoubledUpMatrix {
            block1: &self.block1 + &rhs.block1,
            block2: &self.block2 + &rhs.block2,
        }
    }
}

impl std::ops::Neg for &DoubledUpMatrix {
    type Output = DoubledUpMatrix;

    fn neg(self) -> DoubledUpMatrix {
        DoubledUpMatrix {
            block1: -&self.block1,
            block2: -&self.block2,
        }
    }
}

/// Frobenius norm of G^dag J G - J, the defect from the Bogoliubov
/// (symplectic) condition. Zero exactly for commutation-preserving maps.
pub fn bogoliubov_residual(g: &ComplexMatrix) -> Result<f64> {
    let (rows, cols) = g.shape();
    if rows != cols || rows % 2 != 0 {
        return Err(Error::Dimension(format!(
            "symplectic test needs a square even-dimensional matrix, got {rows}x{cols}"
        )));
    }
    let j = j_matrix(rows / 2);
    Ok((g.adjoint() * &j * g - &j).norm())
}

/// Permutation that regroups m two-level channel stacks from per-channel
/// order (a_1, a_1^#, ..., a_m, a_m^#) to doubled-up order
/// (a_1, ..., a_m, a_1^#, ..., a_m^#): P[2c, c] = 1 and P[2c+1, m+c] = 1.
pub fn channel_permutation(m: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(2 * m, 2 * m);
    for c in 0..m {
        p[(2 * c, c)] = C64::new(1.0, 0.0);
        p[(2 * c + 1, m + c)] = C64::new(1.0, 0.0);
    }
    p
}

/// Real embedding [[Re, -Im], [Im, Re]] of a complex matrix.
fn real_embedding(m: &ComplexMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i / r, j / c) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// Eigenvalues of a Hermitian matrix, ascending. The Hermitian part is used;
/// callers are expected to pass matrices that are Hermitian up to roundoff.
///
/// Computed on the real embedding, whose spectrum is that of the complex
/// matrix with every eigenvalue doubled.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {r}x{c}"
        )));
    }
    let herm = (m + m.adjoint()).map(|z| z * 0.5);
    let embedded = real_embedding(&herm);
    let sym = (&embedded + embedded.transpose()) * 0.5;
    let mut eigs: Vec<f64> = nalgebra::SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).expect("real eigenvalues"));
    // Embedding doubles each eigenvalue; keep one copy of each pair.
    Ok(eigs.into_iter().step_by(2).collect())
}

/// Eigenvalues of a general complex matrix together with their conjugates.
///
/// The real embedding has spectrum eig(M) together with conj(eig(M)), so the
/// returned list has 2n entries and is closed under conjugation. That is
/// enough for stability tests and for locating spectra of doubled-up
/// matrices, whose spectra are conjugation-closed to begin with.
pub fn eigenvalues_with_conjugates(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {r}x{c}"
        )));
    }
    if m.norm() == 0.0 {
        // Trivial spectrum; the Schur iteration below stalls on the
        // all-zero matrix.
        return Ok(vec![C64::new(0.0, 0.0); 2 * r]);
    }
    let embedded = real_embedding(m);
    let schur = nalgebra::linalg::Schur::try_new(embedded, f64::EPSILON, 10_000).ok_or_else(
        || Error::Decomposition("eigenvalue iteration did not converge within 10000 steps".into()),
    )?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Spectral condition number, estimated from the Hermitian eigenvalues of
/// M^dag M. Returns +inf when the smallest singular value underflows.
pub fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    let gram = m.adjoint() * m;
    let eigs = hermitian_eigenvalues(&gram)?;
    let max = eigs.last().copied().unwrap_or(0.0).max(0.0);
    let min = eigs.first().copied().unwrap_or(0.0).max(0.0);
    if min <= max * 1e-300 || min == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((max / min).sqrt())
}

/// Smallest singular value, via the Hermitian eigenvalues of M^dag M.
pub fn smallest_singular_value(m: &ComplexMatrix) -> Result<f64> {
    let gram = m.adjoint() * m;
    let eigs = hermitian_eigenvalues(&gram)?;
    Ok(eigs.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Frobenius norm of S^dag S - I; zero exactly for unitary matrices.
pub fn unitarity_defect(s: &ComplexMatrix) -> f64 {
    let n = s.ncols();
    (s.adjoint() * s - ComplexMatrix::identity(n, n)).norm()
}

/// Solve M X = RHS by LU with partial pivoting.
pub fn lu_solve(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Singular("LU solve failed: matrix is singular".into()))
}

/// JSON representation of a complex matrix: row-major real and imaginary
/// parts with explicit dimensions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (rows, cols) = m.shape();
        let re = (0..rows)
            .map(|i| (0..cols).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..rows)
            .map(|i| (0..cols).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { rows, cols, re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let check = |name: &str, part: &Vec<Vec<f64>>| -> Result<()> {
            if part.len() != self.rows || part.iter().any(|row| row.len() != self.cols) {
                return Err(Error::Parse(format!(
                    "matrix field '{name}' does not match declared shape {}x{}",
                    self.rows, self.cols
                )));
            }
            Ok(())
        };
        check("re", &self.re)?;
        check("im", &self.im)?;
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}
