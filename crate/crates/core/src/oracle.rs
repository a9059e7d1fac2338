//! Shooting oracle: integrates the differential systems directly with
//! fixed-step RK4 from `-x0` to `x0`. Shares nothing with the series solver
//! beyond the parameter types, so agreement of the two root sets is a real
//! check on the recurrences.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::params::{RootSource, SpectralParams};
use crate::rootfind::{scan_real_roots, ScanConfig, ScanOutcome};

type C64 = Complex64;

/// Renormalize once any component passes this magnitude.
const RENORM_AT: f64 = 1e50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    pub steps: usize,
    /// Also integrate with half the steps and report the difference.
    pub richardson: bool,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self { steps: 2000, richardson: true }
    }
}

/// Boundary residual at `x0`, equal to `value * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootResidual {
    pub value: C64,
    pub log_scale: f64,
    pub step_count: usize,
    /// RK4 Richardson estimate `|r(h) - r(2h)| / 15`, in the units of `value`.
    pub richardson_error: f64,
}

impl ShootResidual {
    /// `value * exp(log_scale)`, possibly infinite.
    pub fn unscaled(&self) -> C64 {
        if self.log_scale == 0.0 {
            self.value
        } else {
            self.value * self.log_scale.exp()
        }
    }
}

/// Integrate several trajectories of `y' = f(x, y)` jointly, renormalizing
/// all of them by a common factor. Returns the accumulated log factor.
fn integrate<const D: usize, F>(f: F, states: &mut [[C64; D]], a: f64, b: f64, steps: usize) -> Result<f64>
where
    F: Fn(f64, &[C64; D]) -> [C64; D],
{
    let h = (b - a) / steps as f64;
    let mut log_scale = 0.0;
    let axpy = |y: &[C64; D], k: &[C64; D], c: f64| -> [C64; D] { std::array::from_fn(|i| y[i] + k[i] * c) };
    for i in 0..steps {
        let x = a + i as f64 * h;
        let mut peak: f64 = 0.0;
        let mut finite = true;
        for y in states.iter_mut() {
            let k1 = f(x, y);
            let k2 = f(x + 0.5 * h, &axpy(y, &k1, 0.5 * h));
            let k3 = f(x + 0.5 * h, &axpy(y, &k2, 0.5 * h));
            let k4 = f(x + h, &axpy(y, &k3, h));
            for j in 0..D {
                y[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
                finite &= y[j].re.is_finite() && y[j].im.is_finite();
                peak = peak.max(y[j].norm());
            }
        }
        if !finite || !peak.is_finite() {
            return Err(SpectraError::StepUnstable { x: x + h });
        }
        if peak > RENORM_AT {
            for y in states.iter_mut() {
                for v in y.iter_mut() {
                    *v /= peak;
                }
            }
            log_scale += peak.ln();
        }
    }
    Ok(log_scale)
}

fn check_interval(x0: f64) -> Result<()> {
    if x0 > 0.0 && x0 < 1.0 {
        Ok(())
    } else {
        Err(SpectraError::InvalidParams(format!("shooting needs 0 < x0 < 1, got {x0}")))
    }
}

/// Run `shot` at `steps` (and `steps / 2` for the error estimate).
fn with_richardson<G>(cfg: &ShootConfig, shot: G) -> Result<ShootResidual>
where
    G: Fn(usize) -> Result<(C64, f64)>,
{
    if cfg.steps < 2 {
        return Err(SpectraError::InvalidParams("shooting needs at least 2 steps".into()));
    }
    let (value, log_scale) = shot(cfg.steps)?;
    let richardson_error = if cfg.richardson {
        let (coarse, coarse_log) = shot(cfg.steps / 2)?;
        (value - coarse * (coarse_log - log_scale).exp()).norm() / 15.0
    } else {
        0.0
    };
    Ok(ShootResidual { value, log_scale, step_count: cfg.steps, richardson_error })
}

/// `k != 0`: determinant of `[Psi(x0), Psi'(x0)]` over the two solutions
/// with `Psi(-x0) = Psi'(-x0) = 0` and `(Phi, Phi')(-x0)` = `(1, 0)`, `(0, 1)`.
pub fn shoot_k(params: &SpectralParams, s: C64, cfg: &ShootConfig) -> Result<ShootResidual> {
    if params.k == 0 {
        return Err(SpectraError::InvalidParams("shoot_k requires k != 0".into()));
    }
    check_interval(params.x0)?;
    let mu = -s * (s + 1.0);
    let (k2, eps, x0) = (params.k2(), params.eps, params.x0);
    let rhs = move |x: f64, y: &[C64; 4]| -> [C64; 4] {
        let w2 = 1.0 - x * x;
        let psi2 = (y[2] + y[1] * (2.0 * x) + y[0] * (k2 / w2)) / w2;
        let phi2 = (mu * y[2] + y[3] * (2.0 * x - eps) + y[2] * (k2 / w2)) / w2;
        [y[1], psi2, y[3], phi2]
    };
    with_richardson(cfg, |steps| {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let mut states = [[zero, zero, one, zero], [zero, zero, zero, one]];
        let log = integrate(rhs, &mut states, -x0, x0, steps)?;
        let det = states[0][0] * states[1][1] - states[1][0] * states[0][1];
        Ok((det, 2.0 * log))
    })
}

/// `k = 0`: `Psi0'(x0)` for the solution with `Psi0'(-x0) = 0`,
/// `Phi0(-x0) = 1`.
pub fn shoot_k0(params: &SpectralParams, s: C64, cfg: &ShootConfig) -> Result<ShootResidual> {
    if params.k != 0 {
        return Err(SpectraError::InvalidParams("shoot_k0 requires k = 0".into()));
    }
    check_interval(params.x0)?;
    let mu = -s * (s + 1.0);
    if mu.norm() == 0.0 {
        return Err(SpectraError::TrivialEigenvalue(mu));
    }
    let (eps, x0) = (params.eps, params.x0);
    let rhs = move |x: f64, y: &[C64; 3]| -> [C64; 3] {
        let w2 = 1.0 - x * x;
        [y[1], (y[2] + y[1] * (2.0 * x)) / w2, mu * y[1] - y[2] * (eps / w2)]
    };
    with_richardson(cfg, |steps| {
        let zero = C64::new(0.0, 0.0);
        let mut states = [[zero, zero, C64::new(1.0, 0.0)]];
        let log = integrate(rhs, &mut states, -x0, x0, steps)?;
        Ok((states[0][1], log))
    })
}

/// Dirichlet problem for the self-adjoint form,
/// `((1 - x^2) chi')' - (eps^2 + 4 + 4 eps x)/(4(1 - x^2)) chi = mu chi`:
/// `chi(x0)` for the solution with `chi(-x0) = 0`, `chi'(-x0) = 1`.
pub fn shoot_chi(eps: f64, x0: f64, s: C64, cfg: &ShootConfig) -> Result<ShootResidual> {
    check_interval(x0)?;
    if !(eps >= 0.0) {
        return Err(SpectraError::InvalidParams(format!("eps must be >= 0, got {eps}")));
    }
    let big_s = s * (s + 1.0);
    let rhs = move |x: f64, y: &[C64; 2]| -> [C64; 2] {
        let w2 = 1.0 - x * x;
        let potential = (eps * eps + 4.0 + 4.0 * eps * x) / (4.0 * w2);
        [y[1], (y[1] * (2.0 * x) + y[0] * potential - big_s * y[0]) / w2]
    };
    with_richardson(cfg, |steps| {
        let mut states = [[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
        let log = integrate(rhs, &mut states, -x0, x0, steps)?;
        Ok((states[0][0], log))
    })
}

/// Real roots of a shooting residual, with the same contract as
/// [`scan_real_roots`].
pub fn oracle_roots<F>(shot: F, cfg: &ScanConfig) -> Result<ScanOutcome>
where
    F: Fn(f64) -> Result<ShootResidual> + Sync,
{
    scan_real_roots(|s| Ok(shot(s)?.unscaled().re), cfg, RootSource::Oracle)
}

/// Oracle roots of the full system, dispatching on `k`.
pub fn system_roots(params: &SpectralParams, scan: &ScanConfig, shoot: &ShootConfig) -> Result<ScanOutcome> {
    let shoot = ShootConfig { richardson: false, ..*shoot };
    if params.k == 0 {
        oracle_roots(|s| shoot_k0(params, C64::new(s, 0.0), &shoot), scan)
    } else {
        oracle_roots(|s| shoot_k(params, C64::new(s, 0.0), &shoot), scan)
    }
}

/// Oracle roots of the `chi` problem.
pub fn chi_roots(eps: f64, x0: f64, scan: &ScanConfig, shoot: &ShootConfig) -> Result<ScanOutcome> {
    let shoot = ShootConfig { richardson: false, ..*shoot };
    oracle_roots(|s| shoot_chi(eps, x0, C64::new(s, 0.0), &shoot), scan)
}
