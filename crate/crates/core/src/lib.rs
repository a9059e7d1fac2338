//! Eigenvalue spectra of the linearized Navier-Stokes equations on a sphere
//! truncated to the band `|x| <= x0`, `x = cos(theta)`.
//!
//! Eigenvalues are written `mu = -s(s+1)`. The solver expands the stream
//! function and vorticity in power series about the equator ([`series`]),
//! imposes the no-slip conditions at `x = +-x0` ([`boundary`]) and finds the
//! zeros of the resulting determinant in `s` ([`rootfind`]). Closed-form
//! spectra of the full sphere ([`analytic`]) and a shooting integrator
//! ([`oracle`]) serve as independent references; [`verify`] bundles the
//! cross-checks and [`cli`] the command-line front end.

pub mod analytic;
pub mod boundary;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod params;
pub mod rootfind;
pub mod series;
pub mod verify;
