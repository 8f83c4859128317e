//! Single-mode dynamic squeezer: a decaying cavity with a nonlinear element
//! of complex strength chi, plus the design rule that picks cavity
//! parameters to realize a requested squeeze parameter r at a bandwidth
//! scale epsilon.
//!
//! The cavity realizes the state-space model
//! A = [[-kappa/2, -chi], [-chi^*, -kappa/2]], B = -sqrt(kappa) I,
//! C = sqrt(kappa) I, D = I, which is physically realizable with storage
//! metric J. Its zero-frequency gain depends only on alpha = 2 chi / kappa,
//! and scaling (kappa, chi) together by epsilon dilates the frequency axis
//! without moving the DC gain.

use serde::{Deserialize, Serialize};

use crate::dup_linalg::{ComplexMatrix, DoubledUpMatrix, C64};
use crate::error::{Error, Result};
use crate::qsys::QuantumStateSpace;

/// Cavity parameters of a dynamic squeezer, all in rad/s.
///
/// Construction requires positive kappa and epsilon; stability
/// (kappa^2 > 4 |chi|^2) is a property, not a construction constraint, so
/// unstable parameter sets can be built and then rejected by is_stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezerParams {
    kappa: f64,
    chi: C64,
    epsilon: f64,
}

impl SqueezerParams {
    pub fn new(kappa: f64, chi: C64, epsilon: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::Domain(format!(
                "cavity decay kappa must be positive, got {kappa}"
            )));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!(
                "bandwidth scale epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            kappa,
            chi,
            epsilon,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn chi(&self) -> C64 {
        self.chi
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Normalized nonlinearity alpha = 2 chi / kappa.
    pub fn alpha(&self) -> C64 {
        self.chi * 2.0 / self.kappa
    }

    /// The cavity decays iff kappa^2 > 4 |chi|^2.
    pub fn is_stable(&self) -> bool {
        self.kappa * self.kappa > 4.0 * self.chi.norm_sqr()
    }
}

/// State-space model of the squeezer cavity.
pub fn squeezer_system(p: &SqueezerParams) -> QuantumStateSpace {
    let one = |z: C64| ComplexMatrix::from_row_slice(1, 1, &[z]);
    let a = DoubledUpMatrix::new(one(C64::new(-p.kappa / 2.0, 0.0)), one(-p.chi))
        .expect("1x1 blocks");
    let b = DoubledUpMatrix::new(one(C64::new(-p.kappa.sqrt(), 0.0)), one(C64::new(0.0, 0.0)))
        .expect("1x1 blocks");
    let c = DoubledUpMatrix::new(one(C64::new(p.kappa.sqrt(), 0.0)), one(C64::new(0.0, 0.0)))
        .expect("1x1 blocks");
    let d = DoubledUpMatrix::identity(1);
    QuantumStateSpace::new(a, b, c, d).expect("squeezer shapes are consistent")
}

/// Zero-frequency gain of a squeezer with real normalized nonlinearity
/// alpha: [[-(1+a^2), 2a], [2a, -(1+a^2)]] / (1 - a^2).
pub fn dc_gain_from_alpha(alpha: f64) -> Result<ComplexMatrix> {
    if alpha.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "|alpha| = {} >= 1 puts the cavity at or past its instability threshold",
            alpha.abs()
        )));
    }
    let denom = 1.0 - alpha * alpha;
    let diag = C64::new(-(1.0 + alpha * alpha) / denom, 0.0);
    let off = C64::new(2.0 * alpha / denom, 0.0);
    Ok(ComplexMatrix::from_row_slice(2, 2, &[diag, off, off, diag]))
}

/// Nonlinearity that realizes squeeze parameter r at DC: alpha = -tanh(r/2).
///
/// The DC matching condition is quadratic in alpha with roots -tanh(r/2)
/// and -coth(r/2); only the first satisfies |alpha| < 1.
pub fn alpha_from_r(r: f64) -> f64 {
    -(r / 2.0).tanh()
}

/// Cavity parameters realizing squeeze parameter r at bandwidth scale
/// epsilon, under the convention that the normalized decay is 1 (so
/// kappa = epsilon) and chi is real.
pub fn design_squeezer(r: f64, epsilon: f64) -> Result<SqueezerParams> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "bandwidth scale epsilon must be positive, got {epsilon}"
        )));
    }
    let alpha = alpha_from_r(r);
    SqueezerParams::new(epsilon, C64::new(alpha * epsilon / 2.0, 0.0), epsilon)
}

/// JSON carrier for squeezer parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SqueezerJson {
    pub kappa_rad_s: f64,
    pub chi_re_rad_s: f64,
    pub chi_im_rad_s: f64,
    pub epsilon_rad_s: f64,
}

impl From<&SqueezerParams> for SqueezerJson {
    fn from(p: &SqueezerParams) -> Self {
        Self {
            kappa_rad_s: p.kappa(),
            chi_re_rad_s: p.chi().re,
            chi_im_rad_s: p.chi().im,
            epsilon_rad_s: p.epsilon(),
        }
    }
}

impl TryFrom<&SqueezerJson> for SqueezerParams {
    type Error = Error;

    fn try_from(j: &SqueezerJson) -> Result<Self> {
        SqueezerParams::new(
            j.kappa_rad_s,
            C64::new(j.chi_re_rad_s, j.chi_im_rad_s),
            j.epsilon_rad_s,
        )
    }
}
