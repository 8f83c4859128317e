//! Added-noise floor for phase-insensitive amplifiers and the transfer
//! matrix that attains it.
//!
//! For a two-channel symplectic transfer matrix [[G, H], [H^#, G^#]] whose
//! primary channel amplifies with complex gain g11, the noise power fed from
//! the auxiliary channel into the primary output, |g12|^2 + |h12|^2, is
//! bounded below by |g11|^2 - 1. An explicit matrix attains the bound by
//! leaving the primary row otherwise empty and filling the auxiliary row
//! with the weakest couplings the symplectic constraints allow.

use crate::dup_linalg::{bogoliubov_residual, ComplexMatrix, DoubledUpMatrix, C64};
use crate::error::{Error, Result};

/// Requested zero-frequency gain of the primary channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierDcSpec {
    pub g11: C64,
}

impl AmplifierDcSpec {
    /// Gains with |g11| >= 1 describe amplification; smaller magnitudes have
    /// no noise-minimal realization in this family.
    pub fn new(g11: C64) -> Result<Self> {
        if g11.norm() < 1.0 {
            return Err(Error::Domain(format!(
                "requested gain magnitude {:.6} is below 1; phase-insensitive amplification needs |g11| >= 1",
                g11.norm()
            )));
        }
        Ok(Self { g11 })
    }

    pub fn power_gain_db(&self) -> f64 {
        20.0 * self.g11.norm().log10()
    }
}

/// Two-channel gain matrix, stored as the direct block G and the
/// conjugating block H of the doubled-up form [[G, H], [H^#, G^#]].
///
/// Channel 1 is the signal path, channel 2 the auxiliary (noise) port.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplifierGainMatrix {
    g: ComplexMatrix,
    h: ComplexMatrix,
}

impl AmplifierGainMatrix {
    pub fn new(g: ComplexMatrix, h: ComplexMatrix) -> Result<Self> {
        if g.shape() != (2, 2) || h.shape() != (2, 2) {
            return Err(Error::Dimension(format!(
                "gain matrices are 2x2 per block, got {}x{} and {}x{}",
                g.nrows(),
                g.ncols(),
                h.nrows(),
                h.ncols()
            )));
        }
        Ok(Self { g, h })
    }

    pub fn from_doubled(m: &DoubledUpMatrix) -> Result<Self> {
        Self::new(m.block1().clone(), m.block2().clone())
    }

    pub fn g(&self) -> &ComplexMatrix {
        &self.g
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn to_doubled(&self) -> DoubledUpMatrix {
        DoubledUpMatrix::new(self.g.clone(), self.h.clone()).expect("blocks share the 2x2 shape")
    }

    /// Expanded 4x4 matrix [[G, H], [H^#, G^#]].
    pub fn full(&self) -> ComplexMatrix {
        self.to_doubled().expand()
    }

    /// Symplectic defect of the expanded matrix.
    pub fn bogoliubov_residual(&self) -> f64 {
        bogoliubov_residual(&self.full()).expect("4x4 expansion is square and even")
    }
}

/// Least possible auxiliary-channel noise power |g12|^2 + |h12|^2 at the
/// given primary gain: |g11|^2 - 1.
pub fn min_added_noise(spec: &AmplifierDcSpec) -> f64 {
    spec.g11.norm_sqr() - 1.0
}

/// Noise power the matrix feeds from the auxiliary input into the primary
/// output: |g12|^2 + |h12|^2.
pub fn noise_figure(m: &AmplifierGainMatrix) -> f64 {
    m.g()[(0, 1)].norm_sqr() + m.h()[(0, 1)].norm_sqr()
}

/// True when the primary output carries no conjugated copy of the primary
/// input: |h11| <= tol.
pub fn is_phase_insensitive(m: &AmplifierGainMatrix, tol: f64) -> bool {
    m.h()[(0, 0)].norm() <= tol
}

/// Transfer matrix attaining the added-noise bound for the requested gain.
///
/// The primary row carries only g11 and a conjugating coupling h12 with
/// |h12|^2 = |g11|^2 - 1; the auxiliary row is filled in so the whole matrix
/// is symplectic. All square roots take the principal branch on radicands
/// that are non-negative because |g11| >= 1. Only h12 depends on the phase
/// of g11; the other entries are functions of its magnitude alone.
pub fn optimal_dc_matrix(spec: &AmplifierDcSpec) -> AmplifierGainMatrix {
    let g11 = spec.g11;
    let mag2 = g11.norm_sqr();

    let g21 = ((mag2 - 1.0) / mag2).sqrt();
    let g22 = (1.0 + mag2).sqrt();
    let h12 = (mag2 * (mag2 - 1.0)).sqrt() / g11.conj();
    let h21 = ((mag2 * mag2 - 1.0) / mag2).sqrt();

    let zero = C64::new(0.0, 0.0);
    let g = ComplexMatrix::from_row_slice(
        2,
        2,
        &[g11, zero, C64::new(g21, 0.0), C64::new(g22, 0.0)],
    );
    let h = ComplexMatrix::from_row_slice(
        2,
        2,
        &[zero, h12, C64::new(h21, 0.0), C64::new(1.0, 0.0)],
    );
    AmplifierGainMatrix::new(g, h).expect("blocks are 2x2 by construction")
}

/// Residuals of the five scalar identities obtained by expanding the
/// symplectic condition in matrix entries.
///
/// Writing c1, c2 for the expanded matrix's two direct input columns and c4
/// for the conjugate auxiliary column, the entries are the J-inner products
/// [<c1,c4>, <c2,c4>, <c1,c1> - 1, <c1,c2>, <c2,c2> - 1]. The second entry
/// cancels identically for any doubled-up matrix and is kept as a
/// consistency guard; the remaining four vanish exactly when the matrix is
/// symplectic, and together they force the added-noise bound.
pub fn pr_equation_residuals(m: &AmplifierGainMatrix) -> [f64; 5] {
    let g = m.g();
    let h = m.h();
    let (g11, g12, g21, g22) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let (h11, h12, h21, h22) = (h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);

    let signal_vs_conj_noise = g11.conj() * h12 + g21.conj() * h22 - h11 * g12.conj() - h21 * g22.conj();
    let noise_vs_conj_noise = g12.conj() * h12 + g22.conj() * h22 - h12 * g12.conj() - h22 * g22.conj();
    let signal_normalization =
        g11.conj() * g11 + g21.conj() * g21 - h11 * h11.conj() - h21 * h21.conj() - C64::new(1.0, 0.0);
    let signal_vs_noise = g11.conj() * g12 + g21.conj() * g22 - h11 * h12.conj() - h21 * h22.conj();
    let noise_normalization =
        g12.conj() * g12 + g22.conj() * g22 - h12 * h12.conj() - h22 * h22.conj() - C64::new(1.0, 0.0);

    [
        signal_vs_conj_noise.norm(),
        noise_vs_conj_noise.norm(),
        signal_normalization.norm(),
        signal_vs_noise.norm(),
        noise_normalization.norm(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_subunit_gain() {
        assert!(matches!(
            AmplifierDcSpec::new(c(0.5, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(AmplifierDcSpec::new(c(0.6, 0.8)).is_ok());
    }

    #[test]
    fn noise_floor_values() {
        let unit = AmplifierDcSpec::new(c(1.0, 0.0)).unwrap();
        assert_eq!(min_added_noise(&unit), 0.0);

        let double = AmplifierDcSpec::new(c(2.0, 0.0)).unwrap();
        assert!((min_added_noise(&double) - 3.0).abs() < 1e-15);

        let complex = AmplifierDcSpec::new(c(1.0, 1.0)).unwrap();
        assert!((min_added_noise(&complex) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_gain_in_decibels() {
        let double = AmplifierDcSpec::new(c(2.0, 0.0)).unwrap();
        assert!((double.power_gain_db() - 20.0 * 2f64.log10()).abs() < 1e-15);
    }

    #[test]
    fn optimal_matrix_for_gain_two() {
        let spec = AmplifierDcSpec::new(c(2.0, 0.0)).unwrap();
        let matrix = optimal_dc_matrix(&spec);
        let g = matrix.g();
        let h = matrix.h();

        let g_expected = [
            c(2.0, 0.0),
            c(0.0, 0.0),
            c(3f64.sqrt() / 2.0, 0.0),
            c(5f64.sqrt(), 0.0),
        ];
        let h_expected = [
            c(0.0, 0.0),
            c(3f64.sqrt(), 0.0),
            c(15f64.sqrt() / 2.0, 0.0),
            c(1.0, 0.0),
        ];
        for (idx, (i, j)) in [(0, 0), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
            assert!((g[(*i, *j)] - g_expected[idx]).norm() < 1e-15);
            assert!((h[(*i, *j)] - h_expected[idx]).norm() < 1e-15);
        }
        assert!(matrix.bogoliubov_residual() < 1e-12);
    }

    #[test]
    fn optimal_matrix_for_unit_gain_is_noiseless() {
        let spec = AmplifierDcSpec::new(c(1.0, 0.0)).unwrap();
        let matrix = optimal_dc_matrix(&spec);
        let mut g_expected = ComplexMatrix::identity(2, 2);
        g_expected[(1, 1)] = c(2f64.sqrt(), 0.0);
        let mut h_expected = ComplexMatrix::zeros(2, 2);
        h_expected[(1, 1)] = c(1.0, 0.0);
        assert!((matrix.g() - g_expected).norm() < 1e-15);
        assert!((matrix.h() - h_expected).norm() < 1e-15);
        assert_eq!(noise_figure(&matrix), 0.0);
    }

    #[test]
    fn noise_figure_values() {
        let spec = AmplifierDcSpec::new(c(2.0, 0.0)).unwrap();
        assert!((noise_figure(&optimal_dc_matrix(&spec)) - 3.0).abs() < 1e-12);

        let spec3 = AmplifierDcSpec::new(c(3.0, 0.0)).unwrap();
        assert!((noise_figure(&optimal_dc_matrix(&spec3)) - 8.0).abs() < 1e-12);

        let identity =
            AmplifierGainMatrix::new(ComplexMatrix::identity(2, 2), ComplexMatrix::zeros(2, 2))
                .unwrap();
        assert_eq!(noise_figure(&identity), 0.0);

        let mut g = ComplexMatrix::identity(2, 2);
        g[(0, 1)] = c(1.0, 0.0);
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 1)] = c(2.0, 0.0);
        let mixed = AmplifierGainMatrix::new(g, h).unwrap();
        assert!((noise_figure(&mixed) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn phase_insensitivity_checks_the_conjugating_diagonal() {
        let spec = AmplifierDcSpec::new(c(2.0, 0.0)).unwrap();
        assert!(is_phase_insensitive(&optimal_dc_matrix(&spec), 1e-12));

        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 0)] = c(0.1, 0.0);
        let sensitive = AmplifierGainMatrix::new(ComplexMatrix::identity(2, 2), h).unwrap();
        assert!(!is_phase_insensitive(&sensitive, 1e-3));
    }

    #[test]
    fn optimal_matrix_is_symplectic_and_attains_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let magnitude = 1.0 + 9.0 * rng.gen::<f64>();
            let phase = std::f64::consts::PI * (2.0 * rng.gen::<f64>() - 1.0);
            let g11 = C64::from_polar(magnitude, phase);
            let spec = AmplifierDcSpec::new(g11).unwrap();
            let matrix = optimal_dc_matrix(&spec);

            let residual = matrix.bogoliubov_residual();
            assert!(residual < 1e-10, "residual {residual} for g11 {g11}");

            let gap = noise_figure(&matrix) - min_added_noise(&spec);
            assert!(gap.abs() <= 1e-10, "gap {gap} for g11 {g11}");

            // Primary channel carries the requested gain untouched.
            assert_eq!(matrix.g()[(0, 0)], g11);
            assert_eq!(matrix.g()[(0, 1)], c(0.0, 0.0));
            assert_eq!(matrix.h()[(0, 0)], c(0.0, 0.0));
        }
    }

    #[test]
    fn expanded_identities_vanish_on_symplectic_matrices() {
        let identity =
            AmplifierGainMatrix::new(ComplexMatrix::identity(2, 2), ComplexMatrix::zeros(2, 2))
                .unwrap();
        assert_eq!(pr_equation_residuals(&identity), [0.0; 5]);

        let spec = AmplifierDcSpec::new(c(1.5, -2.5)).unwrap();
        let matrix = optimal_dc_matrix(&spec);
        for r in pr_equation_residuals(&matrix) {
            assert!(r < 1e-12, "identity residual {r}");
        }
    }

    #[test]
    fn expanded_identities_flag_uniform_scaling() {
        // G = 2I, H = 0: both normalization identities read |2|^2 - 1 = 3,
        // the pairing identities stay zero.
        let two = AmplifierGainMatrix::new(
            ComplexMatrix::identity(2, 2) * c(2.0, 0.0),
            ComplexMatrix::zeros(2, 2),
        )
        .unwrap();
        let residuals = pr_equation_residuals(&two);
        assert_eq!(residuals[0], 0.0);
        assert_eq!(residuals[1], 0.0);
        assert!((residuals[2] - 3.0).abs() < 1e-15);
        assert_eq!(residuals[3], 0.0);
        assert!((residuals[4] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn expanded_identities_track_the_full_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let g11 = C64::from_polar(1.0 + rng.gen::<f64>(), rng.gen::<f64>());
            let matrix = optimal_dc_matrix(&AmplifierDcSpec::new(g11).unwrap());
            assert!(matrix.bogoliubov_residual() < 1e-12);
            for r in pr_equation_residuals(&matrix) {
                assert!(r < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_two_channel_blocks() {
        assert!(matches!(
            AmplifierGainMatrix::new(ComplexMatrix::identity(3, 3), ComplexMatrix::zeros(3, 3)),
            Err(Error::Dimension(_))
        ));
    }
}
