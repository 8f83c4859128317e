//! Doubled-up state-space models of quantum linear systems and their
//! physical-realizability checks.
//!
//! A system (A, B, C, D) with n internal modes and m transport channels is
//! physically realizable when some Hermitian storage metric Theta, congruent
//! to J, satisfies A Theta + Theta A^dag + B J B^dag = 0 and
//! B = -Theta C^dag J with D = I. Equivalently the system derives from a
//! quadratic Hamiltonian M and a linear coupling N. Both views are
//! implemented here, together with a frequency-sampled probe that tests the
//! symplectic property of the transfer function directly.

use serde::{Deserialize, Serialize};

use crate::dup_linalg::{
    bogoliubov_residual, condition_number, conj, eigenvalues_with_conjugates,
    hermitian_eigenvalues, j_matrix, lu_solve, smallest_singular_value, ComplexMatrix,
    DoubledUpMatrix, MatrixJson, C64,
};
use crate::error::{Error, Result};

/// Base tolerance for realizability residuals, scaled by max(1, ||A||_F).
pub const DEFAULT_REALIZABILITY_TOL: f64 = 1e-8;

/// Condition-number ceiling beyond which resolvent and Lyapunov solves are
/// reported as singular.
pub const MAX_SOLVE_CONDITION: f64 = 1e12;

/// Eigenvalues of the storage metric closer to zero than this count as
/// singular and fail the inertia test.
pub const INERTIA_ZERO_TOL: f64 = 1e-10;

/// Real parts must clear this margin below zero for a mode to count as decaying.
pub const STABILITY_MARGIN: f64 = 1e-12;

/// State-space model in doubled-up form.
///
/// Invariants: A has n x n blocks, B has n x m blocks, C has m x n blocks,
/// and D has m x m blocks, all stored as doubled-up matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStateSpace {
    modes: usize,
    channels: usize,
    a: DoubledUpMatrix,
    b: DoubledUpMatrix,
    c: DoubledUpMatrix,
    d: DoubledUpMatrix,
}

/// Residuals from the storage-metric realizability test.
#[derive(Debug, Clone)]
pub struct RealizabilityCertificate {
    /// Candidate storage metric (Hermitian, 2n x 2n).
    pub theta: ComplexMatrix,
    /// Frobenius norm of A Theta + Theta A^dag + B J B^dag.
    pub residual_lyapunov: f64,
    /// Frobenius norm of B + Theta C^dag J.
    pub residual_coupling: f64,
    /// Frobenius norm of D - I.
    pub residual_direct: f64,
    /// Theta has n positive and n negative eigenvalues, none within
    /// INERTIA_ZERO_TOL of zero.
    pub inertia_ok: bool,
    /// Residual tolerance the certificate was judged against.
    pub tolerance: f64,
}

impl RealizabilityCertificate {
    pub fn passes(&self) -> bool {
        self.inertia_ok
            && self.residual_lyapunov <= self.tolerance
            && self.residual_coupling <= self.tolerance
            && self.residual_direct <= self.tolerance
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "theta": MatrixJson::from_matrix(&self.theta),
            "residual_lyapunov": self.residual_lyapunov,
            "residual_coupling": self.residual_coupling,
            "residual_direct": self.residual_direct,
            "inertia_ok": self.inertia_ok,
            "tolerance": self.tolerance,
            "pass": self.passes(),
        })
    }
}

/// Hamiltonian and coupling recovered from a realizable system.
#[derive(Debug, Clone)]
pub struct HamiltonianCoupling {
    /// Quadratic Hamiltonian matrix M (Hermitian, 2n x 2n).
    pub hamiltonian: ComplexMatrix,
    /// Coupling matrix N (2m x 2n).
    pub coupling: ComplexMatrix,
    /// Frobenius norm of M - M^dag before symmetrization was applied.
    pub hermiticity_residual: f64,
}

/// Frequency-sampled symplectic test of the transfer function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfRealizabilityReport {
    /// Number of frequencies sampled.
    pub samples: usize,
    /// Largest Bogoliubov residual of G(i omega) over the samples.
    pub max_symplectic_residual: f64,
    /// Frobenius distance of D from block-diagonal doubled-up form.
    pub infinity_offdiagonal_residual: f64,
    /// Frobenius norm of S^dag S - I for the block-diagonal part S of D.
    pub infinity_unitarity_residual: f64,
    /// Tolerance the residuals were judged against.
    pub tolerance: f64,
}

impl TfRealizabilityReport {
    pub fn passes(&self) -> bool {
        self.max_symplectic_residual <= self.tolerance
            && self.infinity_offdiagonal_residual <= self.tolerance
            && self.infinity_unitarity_residual <= self.tolerance
    }
}

impl QuantumStateSpace {
    pub fn new(
        a: DoubledUpMatrix,
        b: DoubledUpMatrix,
        c: DoubledUpMatrix,
        d: DoubledUpMatrix,
    ) -> Result<Self> {
        let (n, n2) = a.block_shape();
        if n != n2 {
            return Err(Error::Dimension(format!(
                "dynamics blocks must be square, got {n}x{n2}"
            )));
        }
        let (bn, m) = b.block_shape();
        let (cm, cn) = c.block_shape();
        let (dm, dm2) = d.block_shape();
        if bn != n || cn != n || cm != m || dm != m || dm2 != m {
            return Err(Error::Dimension(format!(
                "inconsistent system shapes: A {n}x{n}, B {bn}x{m}, C {cm}x{cn}, D {dm}x{dm2}"
            )));
        }
        if n == 0 || m == 0 {
            return Err(Error::Dimension(
                "systems need at least one mode and one channel".into(),
            ));
        }
        Ok(Self {
            modes: n,
            channels: m,
            a,
            b,
            c,
            d,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn a(&self) -> &DoubledUpMatrix {
        &self.a
    }

    pub fn b(&self) -> &DoubledUpMatrix {
        &self.b
    }

    pub fn c(&self) -> &DoubledUpMatrix {
        &self.c
    }

    pub fn d(&self) -> &DoubledUpMatrix {
        &self.d
    }

    /// Transfer function G(s) = C (sI - A)^{-1} B + D.
    ///
    /// The resolvent counts as singular when the smallest singular value of
    /// sI - A drops below max(1, ||A||_F, |s|) / MAX_SOLVE_CONDITION; the
    /// error names the nearest dynamics eigenvalue.
    pub fn transfer_at(&self, s: C64) -> Result<ComplexMatrix> {
        let a = self.a.expand();
        let dim = 2 * self.modes;
        let shifted = ComplexMatrix::identity(dim, dim) * s - &a;
        let scale = a.norm().max(s.norm()).max(1.0);
        let sigma_min = smallest_singular_value(&shifted)?;
        if sigma_min <= scale / MAX_SOLVE_CONDITION {
            let nearest = eigenvalues_with_conjugates(&a)?
                .into_iter()
                .min_by(|x, y| {
                    (x - s)
                        .norm()
                        .partial_cmp(&(y - s).norm())
                        .expect("finite eigenvalue distances")
                })
                .unwrap_or_else(|| C64::new(0.0, 0.0));
            return Err(Error::Singular(format!(
                "resolvent at s = {s} is singular to working precision (smallest singular value {sigma_min:.3e} against scale {scale:.3e}); nearest dynamics eigenvalue is {nearest}"
            )));
        }
        let x = lu_solve(&shifted, &self.b.expand())?;
        Ok(self.c.expand() * x + self.d.expand())
    }

    /// True when every dynamics eigenvalue has real part below
    /// -STABILITY_MARGIN. Marginal modes count as unstable.
    pub fn is_stable(&self) -> bool {
        eigenvalues_with_conjugates(&self.a.expand())
            .map(|eigs| eigs.iter().all(|e| e.re < -STABILITY_MARGIN))
            .unwrap_or(false)
    }

    /// Storage-metric realizability test with the default tolerance.
    pub fn check_realizability(&self, theta: &ComplexMatrix) -> Result<RealizabilityCertificate> {
        self.check_realizability_with(theta, DEFAULT_REALIZABILITY_TOL)
    }

    /// Storage-metric realizability test with tolerance
    /// base_tol * max(1, ||A||_F).
    pub fn check_realizability_with(
        &self,
        theta: &ComplexMatrix,
        base_tol: f64,
    ) -> Result<RealizabilityCertificate> {
        let dim = 2 * self.modes;
        if theta.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "storage metric must be {dim}x{dim}, got {}x{}",
                theta.nrows(),
                theta.ncols()
            )));
        }
        let herm_res = (theta - theta.adjoint()).norm();
        if herm_res > 1e-8 * theta.norm().max(1.0) {
            return Err(Error::Contract(format!(
                "storage metric is not Hermitian: ||Theta - Theta^dag|| = {herm_res:.3e}"
            )));
        }

        let a = self.a.expand();
        let b = self.b.expand();
        let c = self.c.expand();
        let d = self.d.expand();
        let j = j_matrix(self.channels);

        let residual_lyapunov = (&a * theta + theta * a.adjoint() + &b * &j * b.adjoint()).norm();
        let residual_coupling = (&b + theta * c.adjoint() * &j).norm();
        let residual_direct = (&d - ComplexMatrix::identity(dim_d(&d), dim_d(&d))).norm();

        let eigs = hermitian_eigenvalues(theta)?;
        let negative = eigs.iter().filter(|e| **e < -INERTIA_ZERO_TOL).count();
        let positive = eigs.iter().filter(|e| **e > INERTIA_ZERO_TOL).count();
        let inertia_ok = positive == self.modes && negative == self.modes;

        Ok(RealizabilityCertificate {
            theta: theta.clone(),
            residual_lyapunov,
            residual_coupling,
            residual_direct,
            inertia_ok,
            tolerance: base_tol * a.norm().max(1.0),
        })
    }

    /// Solve A Theta + Theta A^dag = -B J B^dag for the storage metric.
    ///
    /// The Lyapunov operator is inverted through its Kronecker form; it is
    /// singular exactly when A and -A^dag share an eigenvalue.
    pub fn solve_theta(&self) -> Result<ComplexMatrix> {
        let a = self.a.expand();
        let b = self.b.expand();
        let dim = 2 * self.modes;
        let identity = ComplexMatrix::identity(dim, dim);
        // Column-stacking vec: vec(A X + X A^dag) = (I (x) A + A^# (x) I) vec(X).
        let k = identity.kronecker(&a) + conj(&a).kronecker(&identity);
        let scale = a.norm().max(1.0);
        let sigma_min = smallest_singular_value(&k)?;
        if sigma_min <= scale / MAX_SOLVE_CONDITION {
            return Err(Error::Singular(format!(
                "Lyapunov operator for the storage metric is singular to working precision (smallest singular value {sigma_min:.3e} against scale {scale:.3e}); A and -A^dag share an eigenvalue"
            )));
        }
        let rhs_mat = -(&b * j_matrix(self.channels) * b.adjoint());
        let rhs = ComplexMatrix::from_column_slice(dim * dim, 1, rhs_mat.as_slice());
        let sol = lu_solve(&k, &rhs)?;
        let theta = ComplexMatrix::from_column_slice(dim, dim, sol.as_slice());
        // The exact solution is Hermitian; symmetrize away solver roundoff.
        Ok((&theta + theta.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Build the system determined by a quadratic-Hamiltonian matrix M and a
    /// coupling matrix N against the canonical storage metric Theta = J:
    /// A = -i J M - J N^dag J N / 2, B = -J N^dag J, C = N, D = I.
    ///
    /// M must be Hermitian and both M and N must be doubled-up; the result
    /// then passes check_realizability with Theta = J, and
    /// hamiltonian_coupling inverts this construction.
    pub fn from_hamiltonian(
        hamiltonian: &ComplexMatrix,
        coupling: &ComplexMatrix,
    ) -> Result<Self> {
        let two_n = hamiltonian.nrows();
        let two_m = coupling.nrows();
        if hamiltonian.ncols() != two_n || two_n == 0 || two_n % 2 != 0 {
            return Err(Error::Dimension(format!(
                "Hamiltonian matrix must be square with even dimension, got {}x{}",
                hamiltonian.nrows(),
                hamiltonian.ncols()
            )));
        }
        if coupling.ncols() != two_n || two_m == 0 || two_m % 2 != 0 {
            return Err(Error::Dimension(format!(
                "coupling matrix must have even row count and {} columns, got {}x{}",
                two_n,
                coupling.nrows(),
                coupling.ncols()
            )));
        }
        let defect = (hamiltonian - hamiltonian.adjoint()).norm();
        if defect > 1e-9 * hamiltonian.norm().max(1.0) {
            return Err(Error::Contract(format!(
                "Hamiltonian matrix must be Hermitian; defect {defect:.3e}"
            )));
        }
        let n = two_n / 2;
        let m = two_m / 2;
        let theta = j_matrix(n);
        let j_out = j_matrix(m);
        let a_full = &theta * hamiltonian * C64::new(0.0, -1.0)
            - &theta * coupling.adjoint() * &j_out * coupling * C64::new(0.5, 0.0);
        let b_full = -(&theta * coupling.adjoint() * &j_out);
        let a = DoubledUpMatrix::from_full(&a_full, 1e-9 * a_full.norm().max(1.0))?;
        let b = DoubledUpMatrix::from_full(&b_full, 1e-9 * b_full.norm().max(1.0))?;
        let c = DoubledUpMatrix::from_full(coupling, 1e-9 * coupling.norm().max(1.0))?;
        Self::new(a, b, c, DoubledUpMatrix::identity(m))
    }

    /// Recover the Hamiltonian matrix M and coupling N from a realizable
    /// system: N = C and M = i Theta^{-1} (A + Theta N^dag J N / 2).
    ///
    /// The returned M is symmetrized; hermiticity_residual records the
    /// pre-symmetrization defect, which must stay below
    /// 1e-9 * max(1, ||M||_F).
    pub fn hamiltonian_coupling(&self, theta: &ComplexMatrix) -> Result<HamiltonianCoupling> {
        let cert = self.check_realizability(theta)?;
        if !cert.passes() {
            return Err(Error::Contract(format!(
                "system fails realizability against the supplied metric (lyapunov {:.3e}, coupling {:.3e}, direct {:.3e}, inertia_ok {})",
                cert.residual_lyapunov, cert.residual_coupling, cert.residual_direct, cert.inertia_ok
            )));
        }
        let cond = condition_number(theta)?;
        if !cond.is_finite() || cond > MAX_SOLVE_CONDITION {
            return Err(Error::Singular(format!(
                "storage metric is ill conditioned (condition {cond:.3e}); cannot recover the Hamiltonian"
            )));
        }
        let a = self.a.expand();
        let n = self.c.expand();
        let j = j_matrix(self.channels);
        let half_damping = &a + theta * n.adjoint() * &j * &n * C64::new(0.5, 0.0);
        let m = lu_solve(theta, &half_damping)? * C64::new(0.0, 1.0);
        let hermiticity_residual = (&m - m.adjoint()).norm();
        if hermiticity_residual > 1e-9 * m.norm().max(1.0) {
            return Err(Error::Decomposition(format!(
                "recovered Hamiltonian is not Hermitian: defect {hermiticity_residual:.3e}"
            )));
        }
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Ok(HamiltonianCoupling {
            hamiltonian: m,
            coupling: n,
            hermiticity_residual,
        })
    }

    /// Sample the transfer function on the imaginary axis and test the
    /// symplectic property at every point, plus block-diagonal unitarity of
    /// the direct-feed term.
    pub fn tf_realizability_probe(
        &self,
        omegas: &[f64],
        tolerance: f64,
    ) -> Result<TfRealizabilityReport> {
        let mut max_residual: f64 = 0.0;
        for &omega in omegas {
            let g = self.transfer_at(C64::new(0.0, omega))?;
            max_residual = max_residual.max(bogoliubov_residual(&g)?);
        }
        let s = self.d.block1();
        let m = self.channels;
        let infinity_offdiagonal_residual = self.d.block2().norm() * 2f64.sqrt();
        let infinity_unitarity_residual =
            (s.adjoint() * s - ComplexMatrix::identity(m, m)).norm();
        Ok(TfRealizabilityReport {
            samples: omegas.len(),
            max_symplectic_residual: max_residual,
            infinity_offdiagonal_residual,
            infinity_unitarity_residual,
            tolerance,
        })
    }
}

fn dim_d(d: &ComplexMatrix) -> usize {
    d.nrows()
}

/// JSON carrier for a state-space model: mode/channel counts plus the four
/// expanded matrices.
#[derive(Debug, Serialize, Deserialize)]
pub struct SystemJson {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B")]
    pub b: MatrixJson,
    #[serde(rename = "C")]
    pub c: MatrixJson,
    #[serde(rename = "D")]
    pub d: MatrixJson,
}

pub fn system_to_json(sys: &QuantumStateSpace) -> String {
    let carrier = SystemJson {
        n: sys.modes(),
        m: sys.channels(),
        a: MatrixJson::from_matrix(&sys.a().expand()),
        b: MatrixJson::from_matrix(&sys.b().expand()),
        c: MatrixJson::from_matrix(&sys.c().expand()),
        d: MatrixJson::from_matrix(&sys.d().expand()),
    };
    serde_json::to_string_pretty(&carrier).expect("system serialization cannot fail")
}

pub fn system_from_json(text: &str) -> Result<QuantumStateSpace> {
    let carrier: SystemJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state-space JSON: {e}")))?;
    let field = |name: &str, mj: &MatrixJson, rows: usize, cols: usize| -> Result<DoubledUpMatrix> {
        let full = mj
            .to_matrix()
            .map_err(|e| Error::Parse(format!("field '{name}': {e}")))?;
        if full.shape() != (2 * rows, 2 * cols) {
            return Err(Error::Parse(format!(
                "field '{name}' must be {}x{}, got {}x{}",
                2 * rows,
                2 * cols,
                full.nrows(),
                full.ncols()
            )));
        }
        let tol = 1e-8 * full.norm().max(1.0);
        DoubledUpMatrix::from_full(&full, tol)
            .map_err(|e| Error::Parse(format!("field '{name}': {e}")))
    };
    let (n, m) = (carrier.n, carrier.m);
    if n == 0 || m == 0 {
        return Err(Error::Parse(
            "fields 'n' and 'm' must both be positive".into(),
        ));
    }
    let a = field("A", &carrier.a, n, n)?;
    let b = field("B", &carrier.b, n, m)?;
    let c = field("C", &carrier.c, m, n)?;
    let d = field("D", &carrier.d, m, m)?;
    QuantumStateSpace::new(a, b, c, d)
}
