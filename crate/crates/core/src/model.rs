//! Physical parameters, coupling shapes, dispersion relations, and the
//! reservoir correlation function f'(tau).
//!
//! The reservoir correlation function is
//!
//! ```text
//! f'(tau) = int dk |kappa(k)|^2 e^{-i (w_k - w0) tau}
//! ```
//!
//! For a Gaussian coupling of width sigma_k with the quadratic atomic
//! dispersion w_k = hbar k^2 / (2 m) this evaluates to
//! Gamma e^{i w0 tau} / sqrt(1 + i alpha tau) with alpha = hbar sigma_k^2 / m.
//! The broadband (flat-coupling) limit decays as 1/sqrt(tau). The photonic
//! broadband limit collapses to a delta function and is represented only
//! through its analytic consequences, never pointwise.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special;

/// CODATA value of the reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C_LIGHT: f64 = 2.997_924_58e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c_light: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            c_light: C_LIGHT,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) || !(self.c_light > 0.0) {
            return Err(Error::InvalidParameter(
                "physical constants must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// Single-mode system parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Trap angular frequency w0, rad/s.
    pub omega0: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Initial mean atom number <a+(0) a(0)>.
    pub n0: f64,
    /// Initial coherent amplitude <a(0)>; <a+(0)> is its conjugate.
    pub a0: Complex64,
}

impl SystemParams {
    pub fn new(omega0: f64, mass: f64, n0: f64, a0: Complex64) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be > 0, got {omega0}"
            )));
        }
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be > 0, got {mass}"
            )));
        }
        if !(n0 >= 0.0) {
            return Err(Error::InvalidParameter(format!("n0 must be >= 0, got {n0}")));
        }
        if a0.norm_sqr() > n0 * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "|a0|^2 = {} exceeds n0 = {n0}",
                a0.norm_sqr()
            )));
        }
        Ok(Self {
            omega0,
            mass,
            n0,
            a0,
        })
    }
}

/// Shape of the coupling in momentum space.
///
/// Coupling strengths are allowed to be zero (the uncoupled limit, in which
/// every dynamical curve is constant); widths must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingSpec {
    /// kappa(k) Gaussian of width sigma_k; Gamma (s^-2) sets the strength.
    Gaussian { gamma: f64, sigma_k: f64 },
    /// Flat coupling; kappa0_sq = |kappa(k0)|^2 in m s^-2.
    Broadband { kappa0_sq: f64 },
    /// Photonic delta-kernel limit with decay rate C (s^-1).
    PhotonDelta { rate_c: f64 },
}

impl CouplingSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CouplingSpec::Gaussian { .. } => "Gaussian",
            CouplingSpec::Broadband { .. } => "Broadband",
            CouplingSpec::PhotonDelta { .. } => "PhotonDelta",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            CouplingSpec::Gaussian { gamma, sigma_k } => {
                if !(gamma >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "gamma must be >= 0, got {gamma}"
                    )));
                }
                if !(sigma_k > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "sigma_k must be > 0, got {sigma_k}"
                    )));
                }
            }
            CouplingSpec::Broadband { kappa0_sq } => {
                if !(kappa0_sq >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "kappa0_sq must be >= 0, got {kappa0_sq}"
                    )));
                }
            }
            CouplingSpec::PhotonDelta { rate_c } => {
                if !(rate_c >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "rate_c must be >= 0, got {rate_c}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dispersion {
    /// w_k = hbar k^2 / (2 m)
    Atomic,
    /// w_k = c_L |k|
    Photonic,
}

/// A fully specified reservoir correlation function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub constants: PhysicalConstants,
    pub system: SystemParams,
    pub coupling: CouplingSpec,
    pub dispersion: Dispersion,
}

impl KernelSpec {
    pub fn new(
        constants: PhysicalConstants,
        system: SystemParams,
        coupling: CouplingSpec,
        dispersion: Dispersion,
    ) -> Result<Self> {
        constants.validate()?;
        coupling.validate()?;
        match (&coupling, dispersion) {
            (CouplingSpec::PhotonDelta { .. }, Dispersion::Photonic) => {}
            (CouplingSpec::PhotonDelta { .. }, Dispersion::Atomic) => {
                return Err(Error::InvalidParameter(
                    "PhotonDelta coupling requires Photonic dispersion".into(),
                ))
            }
            (_, Dispersion::Photonic) => {
                return Err(Error::InvalidParameter(
                    "Gaussian/Broadband couplings require Atomic dispersion".into(),
                ))
            }
            (_, Dispersion::Atomic) => {}
        }
        Ok(Self {
            constants,
            system,
            coupling,
            dispersion,
        })
    }

    pub fn gaussian(system: SystemParams, gamma: f64, sigma_k: f64) -> Result<Self> {
        Self::new(
            PhysicalConstants::default(),
            system,
            CouplingSpec::Gaussian { gamma, sigma_k },
            Dispersion::Atomic,
        )
    }

    pub fn broadband(system: SystemParams, kappa0_sq: f64) -> Result<Self> {
        Self::new(
            PhysicalConstants::default(),
            system,
            CouplingSpec::Broadband { kappa0_sq },
            Dispersion::Atomic,
        )
    }

    pub fn photon_delta(system: SystemParams, rate_c: f64) -> Result<Self> {
        Self::new(
            PhysicalConstants::default(),
            system,
            CouplingSpec::PhotonDelta { rate_c },
            Dispersion::Photonic,
        )
    }

    /// Kernel chirp rate alpha = hbar sigma_k^2 / m (Gaussian coupling only).
    pub fn alpha(&self) -> Result<f64> {
        match self.coupling {
            CouplingSpec::Gaussian { sigma_k, .. } => {
                Ok(self.constants.hbar * sigma_k * sigma_k / self.system.mass)
            }
            ref other => Err(Error::VariantMismatch {
                expected: "Gaussian",
                found: other.name(),
            }),
        }
    }

    /// Prefactor of the broadband kernel: f'(tau) = B (1-i) e^{i w0 tau} / sqrt(tau)
    /// with B = |kappa0|^2 sqrt(m pi / hbar).
    pub(crate) fn broadband_prefactor(&self) -> Result<Complex64> {
        match self.coupling {
            CouplingSpec::Broadband { kappa0_sq } => {
                let b = kappa0_sq * (self.system.mass * PI / self.constants.hbar).sqrt();
                Ok(Complex64::new(b, -b))
            }
            ref other => Err(Error::VariantMismatch {
                expected: "Broadband",
                found: other.name(),
            }),
        }
    }

    /// Pointwise value of f'(tau).
    pub fn eval(&self, tau: f64) -> Result<Complex64> {
        if !(tau >= 0.0) {
            return Err(Error::KernelDomain {
                tau,
                reason: "tau must be >= 0",
            });
        }
        let w0 = self.system.omega0;
        match self.coupling {
            CouplingSpec::Gaussian { gamma, .. } => {
                let alpha = self.alpha()?;
                let rot = (Complex64::i() * w0 * tau).exp();
                Ok(gamma * rot / Complex64::new(1.0, alpha * tau).sqrt())
            }
            CouplingSpec::Broadband { .. } => {
                if tau == 0.0 {
                    return Err(Error::KernelDomain {
                        tau,
                        reason: "broadband kernel diverges as 1/sqrt(tau) at tau = 0",
                    });
                }
                let b = self.broadband_prefactor()?;
                let rot = (Complex64::i() * w0 * tau).exp();
                Ok(b * rot / tau.sqrt())
            }
            CouplingSpec::PhotonDelta { .. } => Err(Error::DeltaKernelPointwise),
        }
    }

    /// Cumulative kernel integral int_0^T f'(tau) dtau.
    ///
    /// `t_upper` may be `f64::INFINITY`. Closed forms are used for the
    /// broadband kernel and for the Gaussian kernel at infinity; the finite
    /// Gaussian case falls back to adaptive quadrature at 1e-8 relative
    /// accuracy. For the delta kernel the analytic limit is returned: the
    /// full weight C for any T > 0.
    pub fn integral(&self, t_upper: f64) -> Result<Complex64> {
        if !(t_upper >= 0.0) {
            return Err(Error::KernelDomain {
                tau: t_upper,
                reason: "upper limit must be >= 0 (or infinity)",
            });
        }
        if t_upper == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w0 = self.system.omega0;
        match self.coupling {
            CouplingSpec::PhotonDelta { rate_c } => Ok(Complex64::new(rate_c, 0.0)),
            CouplingSpec::Broadband { .. } => {
                let b = self.broadband_prefactor()?;
                // int_0^T tau^{-1/2} e^{i w0 tau} dtau
                //   = sqrt(pi / (-i w0)) erf(sqrt(-i w0 T))
                let sq = Complex64::from_polar(w0.sqrt(), -PI / 4.0); // sqrt(-i w0)
                let pref = PI.sqrt() / sq;
                if t_upper.is_infinite() {
                    return Ok(b * pref);
                }
                let arg = sq * t_upper.sqrt();
                Ok(b * pref * special::erf(arg)?)
            }
            CouplingSpec::Gaussian { gamma, .. } => {
                if gamma == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let alpha = self.alpha()?;
                if t_upper.is_infinite() {
                    // Gamma sqrt(2 pi) e^{-w0/alpha} / sqrt(2 w0 alpha)
                    //   * (1 + erf(i sqrt(w0/alpha)))
                    let beta = (w0 / alpha).sqrt();
                    let pref = gamma * (2.0 * PI).sqrt() * (-w0 / alpha).exp()
                        / (2.0 * w0 * alpha).sqrt();
                    let erf_ib = special::erf(Complex64::new(0.0, beta))?;
                    return Ok(pref * (1.0 + erf_ib));
                }
                let f = |tau: f64| {
                    let rot = (Complex64::i() * w0 * tau).exp();
                    gamma * rot / Complex64::new(1.0, alpha * tau).sqrt()
                };
                // Rough magnitude for the absolute tolerance, then refine.
                let rough = quadrature::gk15(&f, 0.0, t_upper).0.norm();
                let scale = rough.max(gamma * t_upper.min(1.0 / w0.max(alpha)));
                let seg = PI / w0;
                let val =
                    quadrature::adaptive_segmented(&f, 0.0, t_upper, seg, 1e-9 * scale)?;
                Ok(val)
            }
        }
    }

    /// Full integral to infinity by quadrature plus an integration-by-parts
    /// tail, independent of the closed forms used by [`KernelSpec::integral`].
    ///
    /// This is the cross-check route behind the Markov-constant consistency
    /// error; it targets ~1e-7 relative accuracy.
    pub fn integral_to_infinity_via_quadrature(&self) -> Result<Complex64> {
        let w0 = self.system.omega0;
        match self.coupling {
            CouplingSpec::PhotonDelta { rate_c } => Ok(Complex64::new(rate_c, 0.0)),
            CouplingSpec::Gaussian { gamma, .. } => {
                if gamma == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let alpha = self.alpha()?;
                // |R| <= (3 Gamma alpha^2 / (4 w0^3)) (alpha T)^{-5/2}; solve for T
                // so the truncation sits below ~3e-8 of the magnitude scale.
                let scale = gamma / (w0 * alpha).sqrt() * (-w0 / alpha).exp() + 1e-300;
                let tol = 3e-8 * scale;
                let bound = 0.75 * gamma * alpha * alpha / (w0 * w0 * w0 * tol);
                let t_cut = (bound.powf(0.4) / alpha).max(8.0 / alpha).max(8.0 / w0);
                let f = |tau: f64| {
                    let rot = (Complex64::i() * w0 * tau).exp();
                    gamma * rot / Complex64::new(1.0, alpha * tau).sqrt()
                };
                let head =
                    quadrature::adaptive_segmented(&f, 0.0, t_cut, PI / w0, 1e-8 * scale)?;
                // Tail by parts: -e^{i w0 T} [ g/(i w0) - g'/(i w0)^2 + g''/(i w0)^3 ]
                let u = Complex64::new(1.0, alpha * t_cut);
                let g0 = gamma / u.sqrt();
                let g1 = gamma * Complex64::new(0.0, -0.5 * alpha) * u.powf(-1.5);
                let g2 = gamma * Complex64::new(-0.75 * alpha * alpha, 0.0) * u.powf(-2.5);
                let e = (Complex64::i() * w0 * t_cut).exp();
                let iw = Complex64::new(0.0, w0);
                let tail = -e * (g0 / iw - g1 / (iw * iw) + g2 / (iw * iw * iw));
                Ok(head + tail)
            }
            CouplingSpec::Broadband { .. } => {
                let b = self.broadband_prefactor()?;
                if b.norm() == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let scale = b.norm() / w0.sqrt();
                let tol = 3e-8 * scale;
                let bound = 0.75 * b.norm() / (w0 * w0 * w0 * tol);
                let t_cut = bound.powf(0.4).max(8.0 / w0);
                // Head with the tau = v^2 substitution to absorb the endpoint
                // singularity: int_0^T = int_0^sqrt(T) 2 v f(v^2) dv.
                let f = |v: f64| {
                    let tau = v * v;
                    let rot = (Complex64::i() * w0 * tau).exp();
                    2.0 * b * rot // 2 v * (b / sqrt(tau)) = 2 b
                };
                let v_max = t_cut.sqrt();
                let seg = (PI / (2.0 * w0 * v_max)).min(v_max);
                let head = quadrature::adaptive_segmented(&f, 0.0, v_max, seg, 1e-8 * scale)?;
                let g0 = b / t_cut.sqrt();
                let g1 = -0.5 * b * t_cut.powf(-1.5);
                let g2 = 0.75 * b * t_cut.powf(-2.5);
                let e = (Complex64::i() * w0 * t_cut).exp();
                let iw = Complex64::new(0.0, w0);
                let tail = -e * (g0 / iw - g1 / (iw * iw) + g2 / (iw * iw * iw));
                Ok(head + tail)
            }
        }
    }

    /// Validates the Hermiticity identity f(-tau) = f(tau)* of the reservoir
    /// correlation function f(tau) = f'(tau) e^{-i w0 tau} on the given grid.
    pub fn hermiticity_check(&self, taus: &[f64]) -> Result<bool> {
        let (gamma, alpha) = match self.coupling {
            CouplingSpec::Gaussian { gamma, .. } => (gamma, self.alpha()?),
            ref other => {
                return Err(Error::VariantMismatch {
                    expected: "Gaussian",
                    found: other.name(),
                })
            }
        };
        let w0 = self.system.omega0;
        for &tau in taus {
            if !(tau >= 0.0) {
                return Err(Error::KernelDomain {
                    tau,
                    reason: "tau must be >= 0",
                });
            }
            let f_plus = self.eval(tau)? * (Complex64::i() * (-w0) * tau).exp();
            // f(-tau): evaluate with the sign of the imaginary branch flipped.
            let f_minus = gamma / Complex64::new(1.0, -alpha * tau).sqrt();
            let lhs = f_plus.conj();
            if (lhs - f_minus).norm() > 1e-12 * lhs.norm().max(1e-300) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
