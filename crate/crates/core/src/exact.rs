//! Exact decay amplitude u(t) and the observables built on it.
//!
//! u solves the memory-kernel equation u' = -(f' * u), u(0) = 1; then
//! <a+(t)> = a0* e^{i w0 t} u(t)* and <a+ a>(t) = n0 |u(t)|^2. For broadband
//! coupling u also has a closed form as a sum of three exponential-erfc
//! terms over the roots of a complex cubic, which doubles as the module's
//! central cross-check.

use num_complex::Complex64;

use crate::cubic::cubic_roots;
use crate::error::{Error, Result};
use crate::model::{CouplingSpec, KernelSpec};
use crate::series::SeriesTable;
use crate::special::scaled_erfc;
use crate::volterra;

/// Self-convergence contract for the Volterra solve: doubling the number of
/// steps must move the solution by less than this, in max-norm.
pub const REFINEMENT_LIMIT: f64 = 1e-3;

/// Uniform time grid on [0, t_max] with n_steps intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_max must be > 0, got {t_max}"
            )));
        }
        if n_steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_steps must be >= 2, got {n_steps}"
            )));
        }
        Ok(Self { t_max, n_steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|i| i as f64 * self.dt()).collect()
    }
}

/// The complex decay amplitude on a uniform grid; u[0] = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub grid: TimeGrid,
    pub u: Vec<Complex64>,
}

impl AmplitudeTrajectory {
    fn checked(grid: TimeGrid, u: Vec<Complex64>) -> Result<Self> {
        let max_abs = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max_abs > 1.0 + 1e-9 {
            return Err(Error::UnitarityViolation { max_abs });
        }
        Ok(Self { grid, u })
    }
}

/// Solves the Volterra equation for u on `grid`, verifying the
/// self-convergence contract by re-solving on the doubled grid.
pub fn solve_amplitude(kernel: &KernelSpec, grid: &TimeGrid) -> Result<AmplitudeTrajectory> {
    if let CouplingSpec::PhotonDelta { .. } = kernel.coupling {
        // The delta kernel is exactly exponential; no quadrature involved.
        return Err(Error::DeltaKernelPointwise);
    }
    let n = grid.n_steps;
    let u = solve_on(kernel, n, grid.dt())?;
    let u2 = solve_on(kernel, 2 * n, 0.5 * grid.dt())?;
    let change = u
        .iter()
        .zip(u2.iter().step_by(2))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if change >= REFINEMENT_LIMIT {
        return Err(Error::RefinementFailure {
            change,
            limit: REFINEMENT_LIMIT,
        });
    }
    AmplitudeTrajectory::checked(*grid, u)
}

fn solve_on(kernel: &KernelSpec, n: usize, h: f64) -> Result<Vec<Complex64>> {
    let w = volterra::kernel_weights(kernel, n, h)?;
    Ok(volterra::solve(&w, n))
}

/// Analytic amplitude for the photonic delta kernel: u(t) = e^{-C t}.
pub fn photon_delta_amplitude(kernel: &KernelSpec, grid: &TimeGrid) -> Result<AmplitudeTrajectory> {
    let rate_c = match kernel.coupling {
        CouplingSpec::PhotonDelta { rate_c } => rate_c,
        ref other => {
            return Err(Error::VariantMismatch {
                expected: "PhotonDelta",
                found: other.name(),
            })
        }
    };
    let u = grid
        .times()
        .iter()
        .map(|&t| Complex64::new((-rate_c * t).exp(), 0.0))
        .collect();
    AmplitudeTrajectory::checked(*grid, u)
}

/// <a+(t)> at a grid index: a0* e^{i w0 t} u(t)*.
///
/// Identically zero whenever a0 = 0.
pub fn expected_adag(
    traj: &AmplitudeTrajectory,
    system: &crate::model::SystemParams,
    t_index: usize,
) -> Result<Complex64> {
    if t_index >= traj.u.len() {
        return Err(Error::IndexOutOfRange {
            index: t_index,
            len: traj.u.len(),
        });
    }
    if system.a0.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let t = t_index as f64 * traj.grid.dt();
    let rot = (Complex64::i() * system.omega0 * t).exp();
    Ok(system.a0.conj() * rot * traj.u[t_index].conj())
}

/// N(t) = n0 |u(t)|^2 as a series table.
pub fn atom_number_exact(traj: &AmplitudeTrajectory, n0: f64) -> Result<SeriesTable> {
    if !(n0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("n0 must be >= 0, got {n0}")));
    }
    let values: Vec<f64> = traj.u.iter().map(|z| n0 * z.norm_sqr()).collect();
    SeriesTable::real("atom_number_exact", traj.grid.times(), values)
}

/// The three roots of z^3 + i w0 z + K = 0, where K is the branch constant
/// of the broadband kernel's Laplace transform:
/// L{f'}(s) = K / sqrt(s - i w0), K = |kappa0|^2 pi sqrt(m/hbar) (1 - i).
pub fn broadband_cubic_roots(kernel: &KernelSpec) -> Result<[Complex64; 3]> {
    let kappa0_sq = match kernel.coupling {
        CouplingSpec::Broadband { kappa0_sq } => kappa0_sq,
        ref other => {
            return Err(Error::VariantMismatch {
                expected: "Broadband",
                found: other.name(),
            })
        }
    };
    let m_over_h = kernel.system.mass / kernel.constants.hbar;
    let b = kappa0_sq * std::f64::consts::PI * m_over_h.sqrt();
    let k_const = Complex64::new(b, -b);
    let p = Complex64::new(0.0, kernel.system.omega0);
    let roots = cubic_roots(p, k_const);
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    for i in 0..3 {
        for j in (i + 1)..3 {
            let sep = (roots[i] - roots[j]).norm();
            if sep < 1e-12 * scale.max(1e-300) {
                return Err(Error::DegenerateRoots { separation: sep });
            }
        }
    }
    Ok(roots)
}

/// Closed-form broadband amplitude
/// u(t) = e^{i w0 t} [W(a,b,c) + W(b,a,c) + W(c,b,a)],
/// W(a,b,c) = a^2 e^{a^2 t} (1 + erf(a sqrt t)) / ((a-b)(a-c)),
/// evaluated through the scaled complement so growing exponentials and
/// vanishing erfc factors never meet in the open.
pub fn broadband_closed_form(kernel: &KernelSpec, t: f64) -> Result<Complex64> {
    let roots = broadband_cubic_roots(kernel)?;
    closed_form_at(kernel, &roots, t)
}

/// Closed form evaluated on a whole grid with the cubic solved once.
pub fn broadband_closed_form_series(
    kernel: &KernelSpec,
    grid: &TimeGrid,
) -> Result<Vec<Complex64>> {
    let kappa0_sq = match kernel.coupling {
        CouplingSpec::Broadband { kappa0_sq } => kappa0_sq,
        ref other => {
            return Err(Error::VariantMismatch {
                expected: "Broadband",
                found: other.name(),
            })
        }
    };
    if kappa0_sq == 0.0 {
        return Ok(vec![Complex64::new(1.0, 0.0); grid.n_steps + 1]);
    }
    let roots = broadband_cubic_roots(kernel)?;
    grid.times()
        .iter()
        .map(|&t| closed_form_at(kernel, &roots, t))
        .collect()
}

fn closed_form_at(kernel: &KernelSpec, roots: &[Complex64; 3], t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::KernelDomain {
            tau: t,
            reason: "closed form requires t >= 0",
        });
    }
    let [a, b, c] = *roots;
    let sqrt_t = t.sqrt();
    let mut total = Complex64::new(0.0, 0.0);
    for (r, o1, o2) in [(a, b, c), (b, a, c), (c, a, b)] {
        // e^{r^2 t} (1 + erf(r sqrt t)) = e^{r^2 t} erfc(-r sqrt t)
        let w = scaled_erfc(-r * sqrt_t)?;
        total += r * r * w / ((r - o1) * (r - o2));
    }
    let rot = (Complex64::i() * kernel.system.omega0 * t).exp();
    Ok(rot * total)
}
