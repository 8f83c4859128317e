//! Shared generators for integration tests. All randomness is seeded
//! ChaCha8 so failures reproduce exactly.

#![allow(dead_code)]

use qamp::dup_linalg::{ComplexMatrix, DoubledUpMatrix, C64};
use qamp::shale::{bs_matrix, shale_reconstruct, BeamsplitterParams, ShaleFactors};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    std::f64::consts::PI * (2.0 * rng.gen::<f64>() - 1.0)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    c(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0)
}

/// Random 2x2 unitary. The beamsplitter family covers all of U(2), so
/// sampling its parameters uniformly gives exactly unitary matrices.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    bs_matrix(&BeamsplitterParams {
        theta: std::f64::consts::FRAC_PI_2 * rng.gen::<f64>(),
        phi1: random_angle(rng),
        phi2: random_angle(rng),
        phi3: random_angle(rng),
    })
}

/// Random doubled-up symplectic 4x4 built from known factors.
pub fn random_symplectic(rng: &mut ChaCha8Rng, r_max: f64) -> (ComplexMatrix, ShaleFactors) {
    let r1 = r_max * (2.0 * rng.gen::<f64>() - 1.0);
    let r2 = r_max * (2.0 * rng.gen::<f64>() - 1.0);
    let f = ShaleFactors::new(random_unitary(rng), random_unitary(rng), r1, r2)
        .expect("generated factors are unitary");
    (shale_reconstruct(&f), f)
}

/// Random doubled-up symplectic 4x4 with vanishing signal-conjugate
/// coupling h11, i.e. a valid phase-insensitive amplifier response.
///
/// With core sinh weights w_k = sinh(r_k) conj(S2[k,0]), choosing the first
/// row of S1 proportional to (w_1, -w_0) zeroes the (1,1) entry of
/// -S1 sinh(R) S2^#; the second row completes the unitary.
pub fn random_phase_insensitive(rng: &mut ChaCha8Rng, r_max: f64) -> ComplexMatrix {
    let s2 = random_unitary(rng);
    let r1 = r_max * (2.0 * rng.gen::<f64>() - 1.0);
    let r2 = r_max * (2.0 * rng.gen::<f64>() - 1.0);
    let w0 = s2[(0, 0)].conj() * r1.sinh();
    let w1 = s2[(1, 0)].conj() * r2.sinh();
    let norm = (w0.norm_sqr() + w1.norm_sqr()).sqrt();
    let s1 = if norm < 1e-9 {
        // Both squeeze factors are essentially passive; any unitary keeps
        // h11 at zero.
        random_unitary(rng)
    } else {
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                w1 / norm,
                -w0 / norm,
                w0.conj() / norm,
                w1.conj() / norm,
            ],
        )
    };
    let f = ShaleFactors::new(s1, s2, r1, r2).expect("constructed factors are unitary");
    shale_reconstruct(&f)
}

/// Random doubled-up Hermitian matrix (2n x 2n), suitable as a quadratic
/// Hamiltonian: block1 Hermitian, block2 complex symmetric.
pub fn random_doubled_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let x1 = ComplexMatrix::from_fn(n, n, |_, _| random_complex(rng));
    let x2 = ComplexMatrix::from_fn(n, n, |_, _| random_complex(rng));
    let herm = (&x1 + x1.adjoint()) * c(0.5, 0.0);
    let sym = (&x2 + x2.transpose()) * c(0.5, 0.0);
    DoubledUpMatrix::new(herm, sym)
        .expect("square blocks")
        .expand()
}

/// Random doubled-up matrix (2r x 2c) with independent complex blocks.
pub fn random_doubled(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let b1 = ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(rng));
    let b2 = ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(rng));
    DoubledUpMatrix::new(b1, b2)
        .expect("matching blocks")
        .expand()
}
