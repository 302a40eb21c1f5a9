//! Position-space model: a discrete cavity amplitude coupled to a 1-D
//! continuum wavefunction, with optional gravity and mean-field repulsion.
//!
//! The state (c_a, psi(x)) evolves under
//!
//! ```text
//! i hbar dc_a/dt  = hbar w0 c_a + int g*(x) psi(x) dx
//! i hbar dpsi/dt  = [P^2/2M + M g sin(theta) x + V_int(x)] psi + g(x) c_a
//! ```
//!
//! advanced by Strang splitting: half kinetic steps in momentum space
//! around position-space potential steps and an exactly integrated 2x2
//! rotation between c_a and the normalized coupling mode. Every substep is
//! unitary, so the total norm is conserved to rounding.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{CouplingSpec, KernelSpec};
use crate::series::SeriesTable;

/// Probability allowed within ten cells of either boundary before the run
/// aborts with a domain-escape error.
const BOUNDARY_BAND_LIMIT: f64 = 1e-8;
/// Norm drift that aborts a run.
const NORM_DRIFT_LIMIT: f64 = 1e-4;

/// Uniform position grid; n_points a power of two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(Error::InvalidParameter(format!(
                "need x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 256 || !n_points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "n_points must be a power of two >= 256, got {n_points}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points).map(|j| self.x_min + j as f64 * dx).collect()
    }

    /// Angular wavenumbers in FFT ordering.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let dk = 2.0 * PI / (self.x_max - self.x_min);
        (0..n)
            .map(|j| {
                let jj = if j < n / 2 { j } else { j - n };
                jj as f64 * dk
            })
            .collect()
    }
}

/// Discrete cavity amplitude plus continuum wavefunction (units m^-1/2).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub c_a: Complex64,
    pub psi: Vec<Complex64>,
}

impl HybridState {
    /// The initial condition of every run here: full cavity, empty continuum.
    pub fn cavity_only(grid: &SpatialGrid) -> Self {
        Self {
            c_a: Complex64::new(1.0, 0.0),
            psi: vec![Complex64::new(0.0, 0.0); grid.n_points],
        }
    }
}

/// Total norm |c_a|^2 + int |psi|^2 dx.
pub fn norm_check(state: &HybridState, grid: &SpatialGrid) -> f64 {
    let cont: f64 = state.psi.iter().map(|z| z.norm_sqr()).sum();
    state.c_a.norm_sqr() + cont * grid.dx()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub gravity_on: bool,
    /// Gravitational acceleration, m/s^2.
    pub g_accel: f64,
    /// Tilt angle of the waveguide against the horizontal, rad.
    pub theta: f64,
    pub interactions_on: bool,
    /// Number of atoms entering the mean field.
    pub n_atoms: f64,
    /// Interaction strength U0, J m.
    pub u0: f64,
    /// Record observables every this many steps.
    pub record_stride: usize,
    /// Dump |psi|^2 every this many steps; 0 disables snapshots.
    pub snapshot_stride: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            dt: 1e-7,
            n_steps: 50_000,
            gravity_on: false,
            g_accel: 9.8,
            theta: PI / 20.0,
            interactions_on: false,
            n_atoms: 1.0,
            u0: 7.59e-37,
            record_stride: 10,
            snapshot_stride: 0,
        }
    }
}

impl PropagationConfig {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.n_steps == 0 || self.record_stride == 0 {
            return Err(Error::InvalidParameter(
                "n_steps and record_stride must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Time series recorded along a propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialTrajectory {
    pub n0: f64,
    pub times: Vec<f64>,
    pub c_a: Vec<Complex64>,
    /// |c_a(t)|^2 (unscaled single-particle probability).
    pub population: Vec<f64>,
    pub continuum_norm: Vec<f64>,
    /// Probability centroid of the continuum part; zero until populated.
    pub centroid: Vec<f64>,
    /// (t, |psi|^2 dump) pairs when snapshots are enabled.
    pub snapshots: Vec<(f64, Vec<f64>)>,
    pub final_state: HybridState,
}

/// The coupling profile g(x) = int dk i hbar kappa*(k) e^{ikx} / sqrt(2 pi).
///
/// For the Gaussian kappa this is the real Gaussian
/// hbar sqrt(Gamma) (2/pi)^{1/4} sqrt(sigma_k) e^{-sigma_k^2 x^2}.
pub fn coupling_in_position(kernel: &KernelSpec, grid: &SpatialGrid) -> Result<Vec<Complex64>> {
    let (gamma, sigma_k) = match kernel.coupling {
        CouplingSpec::Gaussian { gamma, sigma_k } => (gamma, sigma_k),
        ref other => {
            return Err(Error::VariantMismatch {
                expected: "Gaussian",
                found: other.name(),
            })
        }
    };
    let support = 6.0 / sigma_k;
    if grid.x_min > -support || grid.x_max < support {
        return Err(Error::InvalidParameter(format!(
            "grid [{}, {}] too small for the coupling support +-{support:e}",
            grid.x_min, grid.x_max
        )));
    }
    let amp = kernel.constants.hbar * gamma.sqrt() * (2.0 / PI).powf(0.25) * sigma_k.sqrt();
    Ok(grid
        .positions()
        .iter()
        .map(|&x| Complex64::new(amp * (-sigma_k * sigma_k * x * x).exp(), 0.0))
        .collect())
}

struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl FftPair {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            scale: 1.0 / n as f64,
        }
    }
}

/// Propagates the hybrid state, recording population, continuum norm and
/// centroid. `state0` must be normalized; the standard initial condition is
/// [`HybridState::cavity_only`].
pub fn propagate(
    state0: &HybridState,
    kernel: &KernelSpec,
    grid: &SpatialGrid,
    cfg: &PropagationConfig,
) -> Result<SpatialTrajectory> {
    cfg.validate()?;
    if state0.psi.len() != grid.n_points {
        return Err(Error::InvalidParameter(
            "state length does not match grid".into(),
        ));
    }
    let norm0 = norm_check(state0, grid);
    if (norm0 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "initial state norm is {norm0}, expected 1"
        )));
    }

    let hbar = kernel.constants.hbar;
    let mass = kernel.system.mass;
    let omega0 = kernel.system.omega0;
    let dx = grid.dx();
    let g = coupling_in_position(kernel, grid)?;
    let g_norm_sq: f64 = g.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
    let g_norm = g_norm_sq.sqrt();
    // Unit-normalized coupling mode; real for the Gaussian profile.
    let ghat: Vec<Complex64> = if g_norm > 0.0 {
        g.iter().map(|v| v / g_norm).collect()
    } else {
        vec![Complex64::new(0.0, 0.0); grid.n_points]
    };

    let ks = grid.wavenumbers();
    let k_phase_max = ks
        .iter()
        .map(|k| hbar * k * k / (2.0 * mass) * cfg.dt)
        .fold(0.0, f64::max);
    if k_phase_max > PI {
        log::warn!(
            "kinetic phase per step reaches {k_phase_max:.2} rad at the grid edge; \
             dt is coarse for the highest momenta"
        );
    }
    let kin_half: Vec<Complex64> = ks
        .iter()
        .map(|k| (-Complex64::i() * (hbar * k * k / (2.0 * mass)) * (0.5 * cfg.dt)).exp())
        .collect();

    let xs = grid.positions();
    // The gravity phase is step-independent; bake it once.
    let grav_phase_half: Vec<Complex64> = if cfg.gravity_on {
        xs.iter()
            .map(|&x| {
                let v = mass * cfg.g_accel * cfg.theta.sin() * x;
                (-Complex64::i() * v * 0.5 * cfg.dt / hbar).exp()
            })
            .collect()
    } else {
        Vec::new()
    };
    let ghat_sq: Vec<f64> = ghat.iter().map(|v| v.norm_sqr()).collect();
    let nu0 = cfg.n_atoms * cfg.u0;

    let theta_c = g_norm * cfg.dt / hbar;
    let (cos_c, sin_c) = (theta_c.cos(), theta_c.sin());
    let cavity_phase_half = (-Complex64::i() * omega0 * 0.5 * cfg.dt).exp();

    let fft = FftPair::new(grid.n_points);
    let mut psi = state0.psi.clone();
    let mut c_a = state0.c_a;
    let mut traj = SpatialTrajectory {
        n0: kernel.system.n0,
        times: Vec::new(),
        c_a: Vec::new(),
        population: Vec::new(),
        continuum_norm: Vec::new(),
        centroid: Vec::new(),
        snapshots: Vec::new(),
        final_state: state0.clone(),
    };

    let band = 10.min(grid.n_points / 2);
    let check_stride = 200;

    for step in 0..=cfg.n_steps {
        let t = step as f64 * cfg.dt;
        if step % cfg.record_stride == 0 || step == cfg.n_steps {
            record(&mut traj, t, c_a, &psi, &xs, dx);
        }
        if cfg.snapshot_stride > 0 && (step % cfg.snapshot_stride == 0 || step == cfg.n_steps) {
            traj.snapshots
                .push((t, psi.iter().map(|z| z.norm_sqr()).collect()));
        }
        if step % check_stride == 0 || step == cfg.n_steps {
            let state = HybridState {
                c_a,
                psi: psi.clone(),
            };
            let norm = norm_check(&state, grid);
            if (norm - 1.0).abs() > NORM_DRIFT_LIMIT {
                return Err(Error::NormDrift {
                    drift: (norm - 1.0).abs(),
                    limit: NORM_DRIFT_LIMIT,
                    t,
                });
            }
            let band_prob: f64 = psi[..band]
                .iter()
                .chain(psi[grid.n_points - band..].iter())
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                * dx;
            if band_prob > BOUNDARY_BAND_LIMIT {
                return Err(Error::DomainEscape { t, band_prob });
            }
        }
        if step == cfg.n_steps {
            break;
        }

        kinetic_half(&mut psi, &kin_half, &fft);
        potential_half(
            &mut psi, &mut c_a, &grav_phase_half, &ghat_sq, nu0, cfg, hbar, dx, cavity_phase_half,
        );
        // Exact rotation between c_a and the coupling mode.
        if g_norm > 0.0 {
            let p: Complex64 = ghat
                .iter()
                .zip(psi.iter())
                .map(|(gh, ps)| gh.conj() * ps)
                .sum::<Complex64>()
                * dx;
            let c_new = cos_c * c_a - Complex64::i() * sin_c * p;
            let p_new = cos_c * p - Complex64::i() * sin_c * c_a;
            let dp = p_new - p;
            for (ps, gh) in psi.iter_mut().zip(ghat.iter()) {
                *ps += dp * gh;
            }
            c_a = c_new;
        }
        potential_half(
            &mut psi, &mut c_a, &grav_phase_half, &ghat_sq, nu0, cfg, hbar, dx, cavity_phase_half,
        );
        kinetic_half(&mut psi, &kin_half, &fft);
    }

    traj.final_state = HybridState { c_a, psi };
    Ok(traj)
}

fn kinetic_half(psi: &mut [Complex64], kin_half: &[Complex64], fft: &FftPair) {
    fft.forward.process(psi);
    for (z, ph) in psi.iter_mut().zip(kin_half.iter()) {
        *z *= ph;
    }
    fft.inverse.process(psi);
    for z in psi.iter_mut() {
        *z *= fft.scale;
    }
}

/// Half-step of the position-space diagonal terms. The mean field uses the
/// total single-particle density, counting the cavity fraction on the
/// normalized coupling profile, and shifts the cavity level by the matching
/// overlap so the trapped and output components stay energetically
/// consistent.
#[allow(clippy::too_many_arguments)]
fn potential_half(
    psi: &mut [Complex64],
    c_a: &mut Complex64,
    grav_phase_half: &[Complex64],
    ghat_sq: &[f64],
    nu0: f64,
    cfg: &PropagationConfig,
    hbar: f64,
    dx: f64,
    cavity_phase_half: Complex64,
) {
    let half_dt = 0.5 * cfg.dt;
    if cfg.interactions_on && nu0 != 0.0 {
        let ca_sq = c_a.norm_sqr();
        let mut overlap = 0.0f64;
        for (j, z) in psi.iter_mut().enumerate() {
            let density = z.norm_sqr() + ca_sq * ghat_sq[j];
            *z *= (-Complex64::i() * nu0 * density * half_dt / hbar).exp();
            if cfg.gravity_on {
                *z *= grav_phase_half[j];
            }
            overlap += ghat_sq[j] * density;
        }
        let shift = nu0 * overlap * dx;
        *c_a *= cavity_phase_half * (-Complex64::i() * shift * half_dt / hbar).exp();
    } else {
        if cfg.gravity_on {
            for (z, ph) in psi.iter_mut().zip(grav_phase_half.iter()) {
                *z *= ph;
            }
        }
        *c_a *= cavity_phase_half;
    }
}

fn record(
    traj: &mut SpatialTrajectory,
    t: f64,
    c_a: Complex64,
    psi: &[Complex64],
    xs: &[f64],
    dx: f64,
) {
    let cont: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
    let centroid = if cont > 1e-12 {
        let weighted: f64 = xs
            .iter()
            .zip(psi.iter())
            .map(|(&x, z)| x * z.norm_sqr())
            .sum::<f64>()
            * dx;
        weighted / cont
    } else {
        0.0
    };
    traj.times.push(t);
    traj.c_a.push(c_a);
    traj.population.push(c_a.norm_sqr());
    traj.continuum_norm.push(cont);
    traj.centroid.push(centroid);
}

/// Cavity population scaled by n0, as a series table comparable with the
/// abstract-model number curves.
pub fn cavity_population(traj: &SpatialTrajectory) -> Result<SeriesTable> {
    let values = traj.population.iter().map(|p| traj.n0 * p).collect();
    SeriesTable::real("cavity_population", traj.times.clone(), values)
}

/// First collapse-revival pair in a population series: an interior running
/// minimum followed by a later value exceeding it by more than `min_gain`.
/// Returns (index_of_min, index_of_revival) of the strongest such pair.
pub fn detect_revival(values: &[f64], min_gain: f64) -> Option<(usize, usize)> {
    let mut run_min = f64::INFINITY;
    let mut run_min_idx = 0usize;
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v < run_min {
            run_min = v;
            run_min_idx = i;
        } else if run_min_idx > 0 {
            let gain = v - run_min;
            if gain > min_gain && best.map_or(true, |(_, _, g)| gain > g) {
                best = Some((run_min_idx, i, gain));
            }
        }
    }
    best.map(|(a, b, _)| (a, b))
}
