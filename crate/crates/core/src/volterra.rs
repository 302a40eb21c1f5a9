//! Product-integration solver for memory-kernel Volterra equations
//!
//! ```text
//! u'(t) = - int_0^t K(tau) u(t - tau) dtau,     u(0) = 1.
//! ```
//!
//! The history integral is discretised by integrating the kernel exactly
//! (or to quadrature accuracy far below the time-stepping error) against a
//! piecewise-linear interpolant of u, which keeps full accuracy through the
//! integrable 1/sqrt(tau) singularity of the broadband kernel. Time stepping
//! is trapezoidal, with the implicit diagonal weight solved in closed form.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{CouplingSpec, KernelSpec};
use crate::special;

// 12-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 12] = [
    -0.981_560_634_246_719_3,
    -0.904_117_256_370_474_9,
    -0.769_902_674_194_304_7,
    -0.587_317_954_286_617_4,
    -0.367_831_498_998_180_2,
    -0.125_233_408_511_468_9,
    0.125_233_408_511_468_9,
    0.367_831_498_998_180_2,
    0.587_317_954_286_617_4,
    0.769_902_674_194_304_7,
    0.904_117_256_370_474_9,
    0.981_560_634_246_719_3,
];
const GL_W: [f64; 12] = [
    0.047_175_336_386_511_83,
    0.106_939_325_995_318_4,
    0.160_078_328_543_346_2,
    0.203_167_426_723_065_9,
    0.233_492_536_538_354_8,
    0.249_147_045_813_402_8,
    0.249_147_045_813_402_8,
    0.233_492_536_538_354_8,
    0.203_167_426_723_065_9,
    0.160_078_328_543_346_2,
    0.106_939_325_995_318_4,
    0.047_175_336_386_511_83,
];

/// Per-interval kernel moments against the linear hat functions.
///
/// `p[j]` multiplies the sample at the younger end of interval j (lag j h),
/// `q[j]` the sample at the older end (lag (j+1) h).
#[derive(Debug, Clone)]
pub struct ProductWeights {
    pub p: Vec<Complex64>,
    pub q: Vec<Complex64>,
    pub h: f64,
}

impl ProductWeights {
    /// Weights for the kernel 2 Re K, which drives the Born-only number
    /// equation. Moments are linear in the kernel, so this is just the
    /// doubled real part.
    pub fn doubled_real_part(&self) -> ProductWeights {
        let re = |v: &Vec<Complex64>| {
            v.iter()
                .map(|m| Complex64::new(2.0 * m.re, 0.0))
                .collect()
        };
        ProductWeights {
            p: re(&self.p),
            q: re(&self.q),
            h: self.h,
        }
    }

    /// Weights for the conjugated kernel K*; moments over real intervals
    /// against real hats conjugate along with the kernel. The conjugate
    /// kernel drives the amplitude v = u* of the rotating-frame <a+>.
    pub fn conjugated(&self) -> ProductWeights {
        ProductWeights {
            p: self.p.iter().map(|m| m.conj()).collect(),
            q: self.q.iter().map(|m| m.conj()).collect(),
            h: self.h,
        }
    }
}

/// Builds the moments of f' for `n` uniform intervals of length `h`.
pub fn kernel_weights(kernel: &KernelSpec, n: usize, h: f64) -> Result<ProductWeights> {
    match kernel.coupling {
        CouplingSpec::Gaussian { .. } => gaussian_weights(kernel, n, h),
        CouplingSpec::Broadband { .. } => broadband_weights(kernel, n, h),
        CouplingSpec::PhotonDelta { .. } => Err(Error::DeltaKernelPointwise),
    }
}

fn smooth_weights<F: Fn(f64) -> Complex64>(f: &F, n: usize, h: f64) -> ProductWeights {
    let mut p = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for j in 0..n {
        let a = j as f64 * h;
        let b = a + h;
        let mid = 0.5 * (a + b);
        let half = 0.5 * h;
        let mut mp = Complex64::new(0.0, 0.0);
        let mut mq = Complex64::new(0.0, 0.0);
        for (x, w) in GL_X.iter().zip(GL_W.iter()) {
            let tau = mid + half * x;
            let v = f(tau);
            mp += w * v * (b - tau) / h;
            mq += w * v * (tau - a) / h;
        }
        p.push(mp * half);
        q.push(mq * half);
    }
    ProductWeights { p, q, h }
}

fn gaussian_weights(kernel: &KernelSpec, n: usize, h: f64) -> Result<ProductWeights> {
    let (gamma, alpha) = match kernel.coupling {
        CouplingSpec::Gaussian { gamma, .. } => (gamma, kernel.alpha()?),
        _ => unreachable!(),
    };
    let w0 = kernel.system.omega0;
    let f = |tau: f64| {
        let rot = (Complex64::i() * w0 * tau).exp();
        gamma * rot / Complex64::new(1.0, alpha * tau).sqrt()
    };
    Ok(smooth_weights(&f, n, h))
}

fn broadband_weights(kernel: &KernelSpec, n: usize, h: f64) -> Result<ProductWeights> {
    let b = kernel.broadband_prefactor()?;
    let w0 = kernel.system.omega0;
    let sq = Complex64::from_polar(w0.sqrt(), -PI / 4.0); // sqrt(-i w0)
    let pref = PI.sqrt() / sq;
    let iw = Complex64::new(0.0, w0);

    // Exact moments on [a, b]:
    //   M0 = int tau^{-1/2} e^{i w0 tau} = pref [erf(sq sqrt(b)) - erf(sq sqrt(a))]
    //   M1 = int tau^{+1/2} e^{i w0 tau}
    //      = [sqrt(tau) e^{i w0 tau}/(i w0)] - M0 / (2 i w0)
    let erf_at = |t: f64| -> Result<Complex64> { special::erf(sq * t.sqrt()) };
    let mut erf_lo = Complex64::new(0.0, 0.0);
    let mut p = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for j in 0..n {
        let a = j as f64 * h;
        let bnd = (j + 1) as f64 * h;
        let erf_hi = erf_at(bnd)?;
        let m0 = pref * (erf_hi - erf_lo);
        let e_hi = bnd.sqrt() * (Complex64::i() * w0 * bnd).exp();
        let e_lo = a.sqrt() * (Complex64::i() * w0 * a).exp();
        let m1 = (e_hi - e_lo) / iw - m0 / (2.0 * iw);
        p.push(b * (bnd * m0 - m1) / h);
        q.push(b * (m1 - a * m0) / h);
        erf_lo = erf_hi;
    }
    Ok(ProductWeights { p, q, h })
}

/// March the trapezoidal scheme; returns u on the n+1 grid points.
pub fn solve(weights: &ProductWeights, n: usize) -> Vec<Complex64> {
    let h = weights.h;
    let p = &weights.p;
    let q = &weights.q;
    // Folded weight for the interior lags: sample at lag j h enters interval
    // j with p[j] and interval j-1 with q[j-1].
    let folded: Vec<Complex64> = (1..n).map(|j| p[j] + q[j - 1]).collect();

    let mut u = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
    u[0] = Complex64::new(1.0, 0.0);
    let a0 = p[0];
    let denom = 1.0 + 0.5 * h * a0;
    for m in 1..=n {
        // history sum: folded[j-1] * u[m-j] for j = 1..m-1, plus the oldest tail
        let mut s = q[m - 1] * u[0];
        for j in 1..m {
            s += folded[j - 1] * u[m - j];
        }
        let rhs = u[m - 1] - 0.5 * h * (v[m - 1] + s);
        u[m] = rhs / denom;
        v[m] = a0 * u[m] + s;
    }
    u
}
