//! Factorization of a two-channel symplectic transfer matrix into two
//! static unitaries around a diagonal squeezing core, and the beamsplitter
//! parametrization of those unitaries.
//!
//! Every doubled-up 4x4 matrix Gbar satisfying the symplectic condition
//! factors as
//!
//!   Gbar = blkdiag(S1, S1^#) . [[-cosh R, -sinh R], [-sinh R, -cosh R]]
//!                            . blkdiag(S2, S2^#)
//!
//! with S1, S2 unitary 2x2 and R = diag(r1, r2) real. The unitaries are
//! implemented as beamsplitters; the core is implemented by two single-mode
//! squeezers. The factor set is unique only up to diagonal phase gauges, so
//! factor comparisons should go through reconstruction and |r| values.

use crate::dup_linalg::{
    bogoliubov_residual, conj, unitarity_defect, ComplexMatrix, DoubledUpMatrix, C64,
};
use crate::error::{Error, Result};

/// Frobenius tolerance for the unitarity of the S factors.
pub const UNITARY_TOL: f64 = 1e-10;

/// Symplectic-defect ceiling accepted by the decomposition.
pub const SYMPLECTIC_TOL: f64 = 1e-8;

/// Off-diagonal leakage allowed in the recovered squeezing core before the
/// decomposition is declared inconsistent.
const CORE_OFFDIAG_TOL: f64 = 1e-6;

/// Singular-value gap below which the two squeeze channels are treated as
/// degenerate and the gauge is fixed by rediagonalizing the core.
const DEGENERATE_GAP: f64 = 1e-9;

/// Squeeze magnitudes below this count as zero; their phase gauge is fixed
/// by normalizing the corresponding column of S1 instead.
const PASSIVE_SINH: f64 = 1e-8;

/// Factors of the squeezing decomposition: unitaries S1 (output side) and
/// S2 (input side) around squeeze parameters r1, r2.
///
/// Construction canonicalizes the channel order to |r1| >= |r2| by permuting
/// the factors, which leaves the reconstruction unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct ShaleFactors {
    s1: ComplexMatrix,
    s2: ComplexMatrix,
    r1: f64,
    r2: f64,
}

impl ShaleFactors {
    pub fn new(s1: ComplexMatrix, s2: ComplexMatrix, r1: f64, r2: f64) -> Result<Self> {
        if s1.shape() != (2, 2) || s2.shape() != (2, 2) {
            return Err(Error::Dimension(format!(
                "factors are 2x2 unitaries, got {}x{} and {}x{}",
                s1.nrows(),
                s1.ncols(),
                s2.nrows(),
                s2.ncols()
            )));
        }
        for (name, s) in [("S1", &s1), ("S2", &s2)] {
            let defect = unitarity_defect(s);
            if defect > UNITARY_TOL {
                return Err(Error::Contract(format!(
                    "{name} is not unitary: ||S^dag S - I|| = {defect:.3e}"
                )));
            }
        }
        if r1.abs() >= r2.abs() {
            Ok(Self { s1, s2, r1, r2 })
        } else {
            // Swap channels: permute S1 columns and S2 rows along with r.
            let s1p = ComplexMatrix::from_columns(&[
                s1.column(1).into_owned(),
                s1.column(0).into_owned(),
            ]);
            let s2p =
                ComplexMatrix::from_rows(&[s2.row(1).into_owned(), s2.row(0).into_owned()]);
            Ok(Self {
                s1: s1p,
                s2: s2p,
                r1: r2,
                r2: r1,
            })
        }
    }

    pub fn s1(&self) -> &ComplexMatrix {
        &self.s1
    }

    pub fn s2(&self) -> &ComplexMatrix {
        &self.s2
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }
}

/// Rebuild the 4x4 doubled-up matrix from its factors.
pub fn shale_reconstruct(f: &ShaleFactors) -> ComplexMatrix {
    let cosh = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        C64::new(-f.r1.cosh(), 0.0),
        C64::new(-f.r2.cosh(), 0.0),
    ]));
    let sinh = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        C64::new(-f.r1.sinh(), 0.0),
        C64::new(-f.r2.sinh(), 0.0),
    ]));
    let core = DoubledUpMatrix::new(cosh, sinh).expect("core blocks are 2x2");
    let left = DoubledUpMatrix::block_diagonal(&f.s1);
    let right = DoubledUpMatrix::block_diagonal(&f.s2);
    (&(&left * &core) * &right).expand()
}

/// Factor a symplectic doubled-up 4x4 matrix into (S1, R, S2).
///
/// The direct block G = -S1 cosh(R) S2 is diagonalized by singular value
/// decomposition; the symplectic identities force the singular values to be
/// cosh(r_i) >= 1 and make the conjugating block diagonal in the same bases,
/// which pins sinh(r_i) up to a per-channel phase gauge. The gauge is fixed
/// by making the recovered sinh entries real with the smallest phase
/// rotation, which also selects the sign of each r_i.
pub fn shale_decompose(gbar: &ComplexMatrix) -> Result<ShaleFactors> {
    if gbar.shape() != (4, 4) {
        return Err(Error::Dimension(format!(
            "decomposition expects a 4x4 matrix, got {}x{}",
            gbar.nrows(),
            gbar.ncols()
        )));
    }
    let dup = DoubledUpMatrix::from_full(gbar, 1e-8 * gbar.norm().max(1.0))?;
    let residual = bogoliubov_residual(gbar)?;
    if residual > SYMPLECTIC_TOL {
        return Err(Error::NotSymplectic {
            residual,
            tolerance: SYMPLECTIC_TOL,
        });
    }

    let g = dup.block1();
    let h = dup.block2();

    let svd = svd2(g)?;
    for sigma in [svd.sigma1, svd.sigma2] {
        // The symplectic row normalizations force every direct-block
        // singular value to reach at least 1.
        if sigma < 1.0 - 1e-10 {
            return Err(Error::Decomposition(format!(
                "direct block has singular value {sigma:.12}, below the symplectic floor of 1"
            )));
        }
    }

    let (mut u, mut v) = (svd.u, svd.v);
    // Diagonal of U^dag H V^# carries sinh(r_i) e^{2i psi_i} for the phase
    // gauge psi applied below.
    let mut core_h = u.adjoint() * h * conj(&v);

    if (svd.sigma1 - svd.sigma2).abs() < DEGENERATE_GAP {
        let s = (svd.sigma1.max(1.0).powi(2) - 1.0).sqrt();
        if s >= PASSIVE_SINH {
            // Degenerate squeezing: the SVD bases are only defined up to a
            // joint rotation W -> (UW, VW). core_h / s is then a symmetric
            // unitary; rediagonalizing it fixes W and makes the core real.
            let w = symmetric_unitary_half_rotation(&(&core_h / C64::new(s, 0.0)))?;
            u *= &w;
            v *= &w;
            core_h = u.adjoint() * h * conj(&v);
        }
    }

    // Phase gauge: sinh entries become real via the smallest rotation, the
    // rotation's direction selecting sign(r_i).
    let mut phases = [C64::new(1.0, 0.0); 2];
    for i in 0..2 {
        let d = core_h[(i, i)];
        if d.norm() < PASSIVE_SINH {
            continue;
        }
        let theta = d.arg();
        let psi = if theta.abs() <= std::f64::consts::FRAC_PI_2 {
            theta / 2.0
        } else {
            (theta - std::f64::consts::PI.copysign(theta)) / 2.0
        };
        phases[i] = C64::from_polar(1.0, psi);
    }
    let phi = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases.to_vec()));

    let mut s1 = -(&u * &phi);
    let mut s2 = phi.adjoint() * v.adjoint();

    // Channels without squeezing leave the phase gauge free; pin it by
    // making the first significant entry of the S1 column real positive.
    let core_scale = core_h.norm().max(1.0);
    for i in 0..2 {
        if core_h[(i, i)].norm() < PASSIVE_SINH {
            let lead = (0..2)
                .map(|k| s1[(k, i)])
                .find(|z| z.norm() > 1e-8)
                .unwrap_or(C64::new(1.0, 0.0));
            let d = C64::from_polar(1.0, -lead.arg());
            for k in 0..2 {
                s1[(k, i)] *= d;
                s2[(i, k)] *= d.conj();
            }
        }
    }

    // Final core extraction: cosh block -S1^dag G S2^dag must be the
    // singular values, sinh block -S1^dag H S2^T must be real diagonal.
    let core_cosh = -(s1.adjoint() * g * s2.adjoint());
    let core_sinh = -(s1.adjoint() * h * s2.transpose());
    let offdiag = (core_sinh[(0, 1)].norm().max(core_sinh[(1, 0)].norm()))
        .max(core_cosh[(0, 1)].norm().max(core_cosh[(1, 0)].norm()));
    let imag = core_sinh[(0, 0)]
        .im
        .abs()
        .max(core_sinh[(1, 1)].im.abs());
    if offdiag > CORE_OFFDIAG_TOL * core_scale || imag > CORE_OFFDIAG_TOL * core_scale {
        return Err(Error::Decomposition(format!(
            "recovered core is not real diagonal: off-diagonal {offdiag:.3e}, imaginary part {imag:.3e}"
        )));
    }

    let mut r = [0.0f64; 2];
    for i in 0..2 {
        let sinh_val = core_sinh[(i, i)].re;
        let cosh_val = core_cosh[(i, i)].re;
        // cosh^2 - sinh^2 = 1 must hold before the conversion to r.
        let defect = (cosh_val * cosh_val - sinh_val * sinh_val - 1.0).abs();
        if defect > 1e-12 * cosh_val.powi(2).max(1.0) {
            return Err(Error::Decomposition(format!(
                "recovered core violates cosh^2 - sinh^2 = 1 by {defect:.3e}"
            )));
        }
        r[i] = sinh_val.asinh();
    }

    let factors = ShaleFactors::new(s1, s2, r[0], r[1])?;
    let rebuilt = shale_reconstruct(&factors);
    let recon_residual = (&rebuilt - gbar).norm();
    if recon_residual > 1e-9 * gbar.norm().max(1.0) {
        return Err(Error::Decomposition(format!(
            "reconstruction from recovered factors misses the input by {recon_residual:.3e}"
        )));
    }
    Ok(factors)
}

struct Svd2 {
    u: ComplexMatrix,
    v: ComplexMatrix,
    sigma1: f64,
    sigma2: f64,
}

/// Analytic SVD of a 2x2 complex matrix through the Hermitian eigenproblem
/// of G^dag G. The smaller eigenvalue comes from det/lambda_max for
/// stability. Both singular values must stay well away from zero, which the
/// symplectic floor guarantees for callers here.
fn svd2(g: &ComplexMatrix) -> Result<Svd2> {
    let gg = g.adjoint() * g;
    let p = gg[(0, 0)].re;
    let t = gg[(1, 1)].re;
    let q = gg[(0, 1)];

    let half_spread = 0.5 * (p - t);
    let disc = (half_spread * half_spread + q.norm_sqr()).sqrt();
    let lambda1 = 0.5 * (p + t) + disc;
    if !(lambda1 > 0.0) {
        return Err(Error::Decomposition(
            "direct block is numerically zero; no singular basis".into(),
        ));
    }
    let det = p * t - q.norm_sqr();
    let lambda2 = (det / lambda1).max(0.0);

    // Eigenvector of G^dag G for lambda1, from whichever row of
    // (G^dag G - lambda1) is better conditioned.
    let cand_a = [q, C64::new(lambda1 - p, 0.0)];
    let cand_b = [C64::new(lambda1 - t, 0.0), q.conj()];
    let norm_a = (cand_a[0].norm_sqr() + cand_a[1].norm_sqr()).sqrt();
    let norm_b = (cand_b[0].norm_sqr() + cand_b[1].norm_sqr()).sqrt();
    let scale = lambda1.max(1.0);
    let v1 = if norm_a.max(norm_b) <= 1e-14 * scale {
        // G^dag G is a scalar matrix; any orthonormal basis works.
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    } else if norm_a >= norm_b {
        [cand_a[0] / C64::new(norm_a, 0.0), cand_a[1] / C64::new(norm_a, 0.0)]
    } else {
        [cand_b[0] / C64::new(norm_b, 0.0), cand_b[1] / C64::new(norm_b, 0.0)]
    };
    let v2 = [-v1[1].conj(), v1[0].conj()];

    let v = ComplexMatrix::from_row_slice(2, 2, &[v1[0], v2[0], v1[1], v2[1]]);
    let sigma1 = lambda1.sqrt();
    let sigma2 = lambda2.sqrt();
    if sigma2 <= 1e-14 * sigma1.max(1.0) {
        return Err(Error::Decomposition(
            "direct block is singular; squeezing factors need an invertible direct block".into(),
        ));
    }
    let u1 = g * v.column(0) / C64::new(sigma1, 0.0);
    let u2 = g * v.column(1) / C64::new(sigma2, 0.0);
    let u = ComplexMatrix::from_columns(&[u1, u2]);
    Ok(Svd2 {
        u,
        v,
        sigma1,
        sigma2,
    })
}

/// For a symmetric unitary Q, return W = O diag(e^{i delta_k / 2}) built
/// from a real orthogonal eigenbasis O and the eigenphases delta_k, so that
/// W^dag Q W^# = I.
///
/// Q = A + iB with A, B commuting real symmetric matrices; any basis that
/// diagonalizes the less degenerate of the two diagonalizes Q.
fn symmetric_unitary_half_rotation(q: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sym_defect = (q - q.transpose()).norm();
    if sym_defect > 1e-6 {
        return Err(Error::Decomposition(format!(
            "degenerate squeezing core is not symmetric (defect {sym_defect:.3e}); input is too far from symplectic"
        )));
    }
    let a = [q[(0, 0)].re, q[(0, 1)].re, q[(1, 1)].re];
    let b = [q[(0, 0)].im, q[(0, 1)].im, q[(1, 1)].im];
    let weight = |m: &[f64; 3]| m[1].abs() + (m[0] - m[2]).abs();
    let m = if weight(&a) >= weight(&b) { a } else { b };
    let o = if weight(&m) <= 1e-14 {
        ComplexMatrix::identity(2, 2)
    } else {
        let angle = 0.5 * (2.0 * m[1]).atan2(m[0] - m[2]);
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(angle.cos(), 0.0),
                C64::new(-angle.sin(), 0.0),
                C64::new(angle.sin(), 0.0),
                C64::new(angle.cos(), 0.0),
            ],
        )
    };
    let qd = o.transpose() * q * &o;
    let phase_half = |z: C64| C64::from_polar(1.0, z.arg() / 2.0);
    let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        phase_half(qd[(0, 0)]),
        phase_half(qd[(1, 1)]),
    ]));
    Ok(o * d)
}

/// Beamsplitter angles: transmission angle theta and phases phi1..phi3.
///
/// The realized scattering matrix is
/// [[e^{i phi1} sin(theta),        e^{i (phi1+phi3)} cos(theta)],
///  [e^{i phi2} cos(theta),       -e^{i (phi2+phi3)} sin(theta)]].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BeamsplitterParams {
    pub theta: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

/// Scattering matrix of a beamsplitter; unitary for any parameters.
pub fn bs_matrix(p: &BeamsplitterParams) -> ComplexMatrix {
    let (sin, cos) = (p.theta.sin(), p.theta.cos());
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from_polar(sin, p.phi1),
            C64::from_polar(cos, p.phi1 + p.phi3),
            C64::from_polar(cos, p.phi2),
            -C64::from_polar(sin, p.phi2 + p.phi3),
        ],
    )
}

/// Recover beamsplitter angles from a 2x2 unitary.
///
/// Every 2x2 unitary is exactly representable: theta comes from the moduli
/// of the first row, the phases from entry arguments, and the remaining
/// entry is then matched automatically by row orthogonality. No global
/// phase correction is ever needed.
pub fn beamsplitter_params(s: &ComplexMatrix) -> Result<BeamsplitterParams> {
    if s.shape() != (2, 2) {
        return Err(Error::Dimension(format!(
            "beamsplitter extraction expects a 2x2 matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let defect = unitarity_defect(s);
    if defect > UNITARY_TOL {
        return Err(Error::Contract(format!(
            "beamsplitter extraction needs a unitary input: ||S^dag S - I|| = {defect:.3e}"
        )));
    }

    let (s11, s12, s21, s22) = (s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]);
    let theta = s11.norm().atan2(s12.norm());

    const DEGENERATE: f64 = 1e-12;
    let (phi1, phi2, phi3) = if s11.norm() < DEGENERATE {
        // Pure cross coupling: the diagonal phase is unconstrained.
        (0.0, s21.arg(), s12.arg())
    } else if s12.norm() < DEGENERATE {
        // Pure transmission: only phi2 + phi3 is determined; pin phi3 = 0.
        (s11.arg(), (-s22).arg(), 0.0)
    } else {
        let phi1 = s11.arg();
        (phi1, s21.arg(), wrap_angle(s12.arg() - phi1))
    };

    Ok(BeamsplitterParams {
        theta,
        phi1: wrap_angle(phi1),
        phi2: wrap_angle(phi2),
        phi3: wrap_angle(phi3),
    })
}

/// Wrap an angle into (-pi, pi]. In-range values pass through unchanged so
/// atan2 outputs keep their exact bits.
fn wrap_angle(a: f64) -> f64 {
    if a > -std::f64::consts::PI && a <= std::f64::consts::PI {
        return a;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = (a + std::f64::consts::PI).rem_euclid(two_pi);
    if x == 0.0 {
        x = two_pi;
    }
    x - std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caves_bound::{optimal_dc_matrix, AmplifierDcSpec};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_unitary(rng: &mut ChaCha8Rng) -> ComplexMatrix {
        // Gram-Schmidt on a random complex matrix, with a random phase on
        // the second column so determinants cover the whole unit circle.
        let raw = ComplexMatrix::from_fn(2, 2, |_, _| {
            c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
        });
        let mut u1 = raw.column(0).into_owned();
        u1 /= c(u1.norm(), 0.0);
        let mut u2 = raw.column(1).into_owned();
        let overlap = u1.dotc(&u2);
        u2 -= &u1 * overlap;
        u2 /= c(u2.norm(), 0.0);
        u2 *= C64::from_polar(1.0, rng.gen::<f64>() * 6.0 - 3.0);
        ComplexMatrix::from_columns(&[u1, u2])
    }

    fn random_factors(rng: &mut ChaCha8Rng, r1: f64, r2: f64) -> ShaleFactors {
        ShaleFactors::new(random_unitary(rng), random_unitary(rng), r1, r2).unwrap()
    }

    #[test]
    fn reconstruct_identity_factors() {
        let f = ShaleFactors::new(
            ComplexMatrix::identity(2, 2),
            ComplexMatrix::identity(2, 2),
            0.0,
            0.0,
        )
        .unwrap();
        let full = shale_reconstruct(&f);
        assert!((full + ComplexMatrix::identity(4, 4)).norm() < 1e-15);
    }

    #[test]
    fn reconstruct_is_always_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let r1 = 6.0 * rng.gen::<f64>() - 3.0;
            let r2 = 6.0 * rng.gen::<f64>() - 3.0;
            let f = random_factors(&mut rng, r1, r2);
            let full = shale_reconstruct(&f);
            assert!(bogoliubov_residual(&full).unwrap() < 1e-10);
        }
    }

    #[test]
    fn factors_reject_non_unitary_blocks() {
        let err = ShaleFactors::new(
            ComplexMatrix::identity(2, 2) * c(1.1, 0.0),
            ComplexMatrix::identity(2, 2),
            0.5,
            0.0,
        );
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn factors_canonicalize_channel_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let s1 = random_unitary(&mut rng);
        let s2 = random_unitary(&mut rng);
        let unordered = ShaleFactors::new(s1.clone(), s2.clone(), 0.3, -1.2).unwrap();
        assert_eq!(unordered.r1(), -1.2);
        assert_eq!(unordered.r2(), 0.3);
        // Reordering preserves the reconstruction.
        let reference = ShaleFactors {
            s1,
            s2,
            r1: 0.3,
            r2: -1.2,
        };
        assert!(
            (shale_reconstruct(&unordered) - shale_reconstruct(&reference)).norm() < 1e-12
        );
    }

    #[test]
    fn decompose_gain_two_matrix_matches_reference_factors() {
        let spec = AmplifierDcSpec::new(c(2.0, 0.0)).unwrap();
        let gbar = optimal_dc_matrix(&spec).full();
        let f = shale_decompose(&gbar).unwrap();

        // Squeeze parameters, including signs, printed to 4 decimals in the
        // reference design.
        assert!((f.r1() - 1.6139).abs() < 1e-3, "r1 = {}", f.r1());
        assert!((f.r2() + 1.1327).abs() < 1e-3, "r2 = {}", f.r2());

        // The unitaries match the reference up to a diagonal sign gauge, so
        // compare entry moduli.
        let s1_ref = [[0.5240, 0.8517], [0.8517, 0.5240]];
        let s2_ref = [[0.6840, 0.7295], [0.7295, 0.6840]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((f.s1()[(i, j)].norm() - s1_ref[i][j]).abs() < 1e-3);
                assert!((f.s2()[(i, j)].norm() - s2_ref[i][j]).abs() < 1e-3);
            }
        }

        let rebuilt = shale_reconstruct(&f);
        assert!((rebuilt - gbar).norm() < 1e-9);
    }

    #[test]
    fn decompose_identity() {
        let id = ComplexMatrix::identity(4, 4);
        let f = shale_decompose(&id).unwrap();
        assert!(f.r1().abs() < 1e-12);
        assert!(f.r2().abs() < 1e-12);
        // S1 S2 = -I because the core at r = 0 is -I.
        let product = f.s1() * f.s2();
        assert!((product + ComplexMatrix::identity(2, 2)).norm() < 1e-12);
        assert!((shale_reconstruct(&f) - id).norm() < 1e-12);
    }

    #[test]
    fn decompose_round_trips_random_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for trial in 0..50 {
            let r1 = 6.0 * rng.gen::<f64>() - 3.0;
            let r2 = 6.0 * rng.gen::<f64>() - 3.0;
            let f = random_factors(&mut rng, r1, r2);
            let gbar = shale_reconstruct(&f);
            let recovered = shale_decompose(&gbar).unwrap();
            let residual = (shale_reconstruct(&recovered) - &gbar).norm();
            assert!(residual < 1e-9, "trial {trial}: residual {residual}");

            // |r| values are gauge-invariant singular data.
            let mut expected = [f.r1().abs(), f.r2().abs()];
            let mut got = [recovered.r1().abs(), recovered.r2().abs()];
            expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
            got.sort_by(|a, b| b.partial_cmp(a).unwrap());
            assert!((expected[0] - got[0]).abs() < 1e-9);
            assert!((expected[1] - got[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn decompose_handles_degenerate_squeezing() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for &(r1, r2) in &[(1.5, 1.5), (1.5, -1.5), (-0.7, -0.7), (0.0, 0.0)] {
            for _ in 0..5 {
                let f = random_factors(&mut rng, r1, r2);
                let gbar = shale_reconstruct(&f);
                let recovered = shale_decompose(&gbar).unwrap();
                let residual = (shale_reconstruct(&recovered) - &gbar).norm();
                assert!(
                    residual < 1e-9,
                    "(r1, r2) = ({r1}, {r2}): residual {residual}"
                );
                assert!((recovered.r1().abs() - r1.abs()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn decompose_rejects_non_symplectic_input() {
        let two = ComplexMatrix::identity(4, 4) * c(2.0, 0.0);
        assert!(matches!(
            shale_decompose(&two),
            Err(Error::NotSymplectic { .. })
        ));
    }

    #[test]
    fn decompose_rejects_non_doubled_input() {
        let mut m = ComplexMatrix::identity(4, 4);
        m[(2, 0)] = c(0.5, 0.0);
        assert!(matches!(shale_decompose(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn bs_matrix_examples() {
        let p = BeamsplitterParams {
            theta: std::f64::consts::FRAC_PI_2,
            phi1: 0.0,
            phi2: 0.0,
            phi3: 0.0,
        };
        let m = bs_matrix(&p);
        let mut expected = ComplexMatrix::identity(2, 2);
        expected[(1, 1)] = c(-1.0, 0.0);
        assert!((m - expected).norm() < 1e-15);
    }

    #[test]
    fn bs_matrix_is_always_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..50 {
            let p = BeamsplitterParams {
                theta: 7.0 * rng.gen::<f64>() - 3.5,
                phi1: 7.0 * rng.gen::<f64>() - 3.5,
                phi2: 7.0 * rng.gen::<f64>() - 3.5,
                phi3: 7.0 * rng.gen::<f64>() - 3.5,
            };
            assert!(unitarity_defect(&bs_matrix(&p)) < 1e-14);
        }
    }

    #[test]
    fn bs_determinant_bookkeeping() {
        // det = -e^{i (phi1 + phi2 + phi3)} for any parameters.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..50 {
            let p = BeamsplitterParams {
                theta: 7.0 * rng.gen::<f64>() - 3.5,
                phi1: 7.0 * rng.gen::<f64>() - 3.5,
                phi2: 7.0 * rng.gen::<f64>() - 3.5,
                phi3: 7.0 * rng.gen::<f64>() - 3.5,
            };
            let m = bs_matrix(&p);
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let expected = -C64::from_polar(1.0, p.phi1 + p.phi2 + p.phi3);
            assert!((det - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn beamsplitter_params_of_identity() {
        let p = beamsplitter_params(&ComplexMatrix::identity(2, 2)).unwrap();
        assert!((p.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(p.phi1.abs() < 1e-15);
        assert!((p.phi2 - std::f64::consts::PI).abs() < 1e-15);
        assert!(p.phi3.abs() < 1e-15);
        assert!((bs_matrix(&p) - ComplexMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn beamsplitter_params_reference_unitaries() {
        // Factors of the gain-2 design: theta values 0.5515 and 0.7532 in
        // magnitude, with exact reconstruction.
        let spec = AmplifierDcSpec::new(c(2.0, 0.0)).unwrap();
        let f = shale_decompose(&optimal_dc_matrix(&spec).full()).unwrap();

        let p1 = beamsplitter_params(f.s1()).unwrap();
        assert!((p1.theta.abs() - 0.5515).abs() < 1e-3, "theta1 {}", p1.theta);
        assert!((bs_matrix(&p1) - f.s1()).norm() < 1e-10);

        let p2 = beamsplitter_params(f.s2()).unwrap();
        assert!((p2.theta.abs() - 0.7532).abs() < 1e-3, "theta2 {}", p2.theta);
        assert!((bs_matrix(&p2) - f.s2()).norm() < 1e-10);
    }

    #[test]
    fn beamsplitter_round_trip_random_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for trial in 0..100 {
            let s = random_unitary(&mut rng);
            let p = beamsplitter_params(&s).unwrap();
            let residual = (bs_matrix(&p) - &s).norm();
            assert!(residual < 1e-10, "trial {trial}: residual {residual}");
            assert!(p.theta >= 0.0 && p.theta <= std::f64::consts::FRAC_PI_2);
            for phi in [p.phi1, p.phi2, p.phi3] {
                assert!(phi > -std::f64::consts::PI && phi <= std::f64::consts::PI);
            }
        }
    }

    #[test]
    fn beamsplitter_round_trip_degenerate_angles() {
        // Diagonal and antidiagonal unitaries hit the degenerate branches.
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..20 {
            let a = C64::from_polar(1.0, rng.gen::<f64>() * 6.0 - 3.0);
            let b = C64::from_polar(1.0, rng.gen::<f64>() * 6.0 - 3.0);
            let diag = ComplexMatrix::from_row_slice(2, 2, &[a, c(0.0, 0.0), c(0.0, 0.0), b]);
            let p = beamsplitter_params(&diag).unwrap();
            assert!((bs_matrix(&p) - &diag).norm() < 1e-12);

            let anti = ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), a, b, c(0.0, 0.0)]);
            let p = beamsplitter_params(&anti).unwrap();
            assert!((bs_matrix(&p) - &anti).norm() < 1e-12);
        }
    }

    #[test]
    fn beamsplitter_params_rejects_non_unitary() {
        let m = ComplexMatrix::identity(2, 2) * c(1.5, 0.0);
        assert!(matches!(beamsplitter_params(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(std::f64::consts::PI), std::f64::consts::PI);
        assert_eq!(wrap_angle(-std::f64::consts::PI), std::f64::consts::PI);
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!(wrap_angle(0.1) == 0.1);
    }
}
