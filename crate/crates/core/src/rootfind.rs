//! Root location for the determinant functions.
//!
//! Real roots are bracketed on a grid and refined by bisection followed by an
//! Illinois secant. Complex roots are refined by Muller's method, which needs
//! no derivative of the determinant. Parameter sweeps re-scan the real axis at
//! every step, align the new roots with the previous ones, and continue pairs
//! of real roots that disappear together as complex roots.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{self, Determinant};
use crate::error::{Result, SpectraError};
use crate::params::{Root, RootKind, RootSource, SpectralParams};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub s_min: f64,
    pub s_max: f64,
    pub step: f64,
    /// Refinement tolerance on `|s|` updates.
    pub tol: f64,
    pub max_iter: usize,
    /// Largest accepted relative residual (see [`Root`]).
    pub residual_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { s_min: 0.0, s_max: 8.0, step: 0.05, tol: 1e-10, max_iter: 200, residual_tol: 1e-6 }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SpectraError::InvalidParams(msg));
        if !(self.s_min >= -0.5) {
            return bad(format!("s_min must be >= -0.5, got {}", self.s_min));
        }
        if !(self.s_max > self.s_min) {
            return bad(format!("s_max ({}) must exceed s_min ({})", self.s_max, self.s_min));
        }
        if !(self.step > 0.0) || !(self.tol > 0.0) || !(self.residual_tol > 0.0) {
            return bad("step, tol and residual_tol must be positive".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.s_max - self.s_min) / self.step - 1e-9).ceil().max(1.0) as usize;
        (0..=n).map(|i| (self.s_min + i as f64 * self.step).min(self.s_max)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanWarning {
    /// More than one sign change inside a single grid cell.
    GridTooCoarse { left: f64, right: f64 },
    /// A bracketed root whose residual exceeded `residual_tol`; not returned.
    ResidualTooLarge { s: f64, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanOutcome {
    pub roots: Vec<Root>,
    pub warnings: Vec<ScanWarning>,
}

impl ScanOutcome {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.s().re).collect()
    }
}

/// Evaluate `f`, turning the excluded trivial point into a gap.
fn sample<F>(f: &F, s: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    match f(s) {
        Ok(v) => Ok(Some(v)),
        Err(SpectraError::TrivialEigenvalue(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Refine a sign change on `[lo, hi]`: bisection down to a small fraction of
/// the cell, then a safeguarded Illinois secant.
fn refine_bracket<F>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64, cfg: &ScanConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let coarse = (hi - lo) * 1e-3;
    let mut iter = 0;
    while hi - lo > coarse.max(cfg.tol) && iter < cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        iter += 1;
    }
    // Illinois false position
    let mut side = 0i8;
    let mut last = 0.5 * (lo + hi);
    while iter < cfg.max_iter {
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        if !x.is_finite() || x <= lo || x >= hi {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        iter += 1;
        if fx == 0.0 || (x - last).abs() < cfg.tol || hi - lo < cfg.tol {
            return Ok(x);
        }
        last = x;
        if (fx < 0.0) == (flo < 0.0) {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locate the real roots of `f` on the configured interval.
///
/// Roots are canonicalized, deduplicated within `10 tol`, and carry the
/// residual `|f(root)| / max(|f|)` over the two bracketing grid points.
pub fn scan_real_roots<F>(f: F, cfg: &ScanConfig, source: RootSource) -> Result<ScanOutcome>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let grid = cfg.grid();
    let values = grid.par_iter().map(|&s| sample(&f, s)).collect::<Result<Vec<_>>>()?;

    let cells: Vec<usize> = (0..grid.len() - 1)
        .filter(|&i| match (values[i], values[i + 1]) {
            (Some(a), Some(b)) => (a == 0.0 && i == 0) || (a < 0.0) != (b < 0.0) && b != 0.0 || b == 0.0,
            _ => false,
        })
        .collect();

    let refined = cells
        .par_iter()
        .map(|&i| {
            let (lo, hi) = (grid[i], grid[i + 1]);
            let (flo, fhi) = (values[i].unwrap_or(0.0), values[i + 1].unwrap_or(0.0));
            let root = if fhi == 0.0 {
                hi
            } else if flo == 0.0 {
                lo
            } else {
                refine_bracket(&f, lo, hi, flo, fhi, cfg)?
            };
            let residual = f(root)?.abs() / flo.abs().max(fhi.abs());
            // interior sampling for a second sign change inside the cell
            let mut signs = vec![flo];
            for q in 1..4 {
                signs.push(f(lo + (hi - lo) * q as f64 / 4.0)?);
            }
            signs.push(fhi);
            let changes = signs.windows(2).filter(|w| w[0] != 0.0 && w[1] != 0.0 && (w[0] < 0.0) != (w[1] < 0.0)).count();
            Ok((root, residual, changes > 1, lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = ScanOutcome::default();
    for (root, residual, coarse, lo, hi) in refined {
        if coarse {
            log::warn!("more than one sign change in [{lo}, {hi}]; refine the scan step");
            out.warnings.push(ScanWarning::GridTooCoarse { left: lo, right: hi });
        }
        if !(residual <= cfg.residual_tol) {
            out.warnings.push(ScanWarning::ResidualTooLarge { s: root, residual });
            continue;
        }
        out.roots.push(Root::new(C64::new(root, 0.0), residual, source));
    }
    out.roots.sort_by(|a, b| a.s().re.total_cmp(&b.s().re));
    out.roots.dedup_by(|b, a| (a.s() - b.s()).norm() < 10.0 * cfg.tol);
    Ok(out)
}

/// Log scale of `family` at the middle of the scan window, used as a fixed
/// reference so that the scanned function is the analytic `det A` up to a
/// constant. The column-normalized value alone jumps where a column vanishes.
fn reference_scale<F>(family: &F, cfg: &ScanConfig) -> f64
where
    F: Fn(C64) -> Result<Determinant>,
{
    let mid = 0.5 * (cfg.s_min + cfg.s_max);
    [mid, mid + 0.5 * cfg.step, cfg.s_max].iter().find_map(|&s| family(C64::new(s, 0.0)).ok().map(|d| d.log_scale)).unwrap_or(0.0)
}

/// Real roots of the series determinant `F_k(s)`.
pub fn series_roots(params: &SpectralParams, cfg: &ScanConfig) -> Result<ScanOutcome> {
    let family = |s: C64| boundary::determinant(params, s);
    let reference = reference_scale(&family, cfg);
    scan_real_roots(|s| Ok(family(C64::new(s, 0.0))?.rescaled(reference).re), cfg, RootSource::Series)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MullerConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Spacing of the starting triple and of the residual probes.
    pub probe: f64,
}

impl Default for MullerConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100, probe: 1e-2 }
    }
}

/// Muller iteration from `seed`; the result is canonicalized.
pub fn refine_complex<F>(f: F, seed: C64, cfg: &MullerConfig, source: RootSource) -> Result<Root>
where
    F: Fn(C64) -> Result<C64>,
{
    let h = C64::new(cfg.probe, 0.0);
    let (mut x0, mut x1, mut x2) = (seed - h, seed + h, seed);
    let (mut f0, mut f1, mut f2) = (f(x0)?, f(x1)?, f(x2)?);
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        if f2.norm() == 0.0 {
            converged = true;
            break;
        }
        let q = (x2 - x1) / (x1 - x0);
        let a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        let b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
        let c = (1.0 + q) * f2;
        let disc = (b * b - 4.0 * a * c).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        let x3 = if den.norm() == 0.0 {
            // flat triple: nudge off it
            x2 + C64::new(cfg.probe, cfg.probe)
        } else {
            x2 - (x2 - x1) * 2.0 * c / den
        };
        if !(x3.re.is_finite() && x3.im.is_finite()) {
            break;
        }
        let step = (x3 - x2).norm();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = f(x2)?;
        if step < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpectraError::NoConvergence { iterations: cfg.max_iter, last: x2 });
    }
    let probes = [C64::new(cfg.probe, 0.0), C64::new(0.0, cfg.probe)];
    let mut reference: f64 = 0.0;
    for p in probes {
        reference = reference.max(f(x2 + p)?.norm()).max(f(x2 - p)?.norm());
    }
    let residual = if reference > 0.0 { f2.norm() / reference } else { 0.0 };
    Ok(Root::new(x2, residual, source))
}

/// Seed and refine the complex continuation of two real roots that merged
/// between the previous and the current parameter value.
///
/// `f` is the determinant at the current parameter value; the seed is the
/// midpoint of the merged pair pushed `delta` off the real axis. Larger
/// offsets (2 and 4 `delta`) are tried before the seed is rejected.
pub fn detect_coalescence<F>(f: F, merged: (f64, f64), delta: f64, cfg: &MullerConfig, source: RootSource) -> Result<(C64, Root)>
where
    F: Fn(C64) -> Result<C64>,
{
    let mid = 0.5 * (merged.0 + merged.1);
    let mut last = None;
    for factor in [1.0, 2.0, 4.0] {
        let seed = C64::new(mid, factor * delta);
        match refine_complex(&f, seed, cfg, source) {
            Ok(root) if root.kind == RootKind::ComplexPair => return Ok((seed, root)),
            Ok(root) => last = Some(SpectraError::SeedRejected { seed, root: root.s() }),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Number of zeros of an analytic `f` inside the rectangle
/// `[re.0, re.1] x [im.0, im.1]`, by the argument principle.
///
/// Each edge starts with `n_per_side` segments, which are bisected until the
/// phase changes by less than `pi/4` across every segment. Fails if `f`
/// vanishes on the contour or the bisection depth runs out.
pub fn count_zeros_in_rect<F>(f: F, re: (f64, f64), im: (f64, f64), n_per_side: usize) -> Result<i64>
where
    F: Fn(C64) -> Result<C64>,
{
    let corners = [C64::new(re.0, im.0), C64::new(re.1, im.0), C64::new(re.1, im.1), C64::new(re.0, im.1)];
    let mut total = 0.0;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let n = n_per_side.max(1);
        let mut z0 = a;
        let mut f0 = f(z0)?;
        for i in 1..=n {
            let z1 = a + (b - a) * (i as f64 / n as f64);
            let f1 = f(z1)?;
            total += phase_change(&f, z0, f0, z1, f1, 0)?;
            z0 = z1;
            f0 = f1;
        }
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

fn phase_change<F>(f: &F, z0: C64, f0: C64, z1: C64, f1: C64, depth: usize) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    if f0.norm() == 0.0 || f1.norm() == 0.0 {
        return Err(SpectraError::NoConvergence { iterations: depth, last: if f0.norm() == 0.0 { z0 } else { z1 } });
    }
    let d = (f1 / f0).arg();
    if d.abs() < std::f64::consts::FRAC_PI_4 {
        return Ok(d);
    }
    if depth >= 40 {
        return Err(SpectraError::NoConvergence { iterations: depth, last: z0 });
    }
    let zm = 0.5 * (z0 + z1);
    let fm = f(zm)?;
    Ok(phase_change(f, z0, f0, zm, fm, depth + 1)? + phase_change(f, zm, fm, z1, f1, depth + 1)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    X0,
    Eps,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::X0 => "x0",
            SweepParam::Eps => "eps",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample {
    pub param: f64,
    pub root: Root,
}

/// Two real branches meeting and leaving the axis as a complex pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalescenceEvent {
    /// Parameter value at which the pair was first found complex.
    pub param: f64,
    /// Last real values of the two branches before they merged.
    pub merged: (f64, f64),
    /// Branch ids of the pair.
    pub branches: (usize, usize),
    pub seed: C64,
    /// The refined complex root, or the reason the seed was rejected.
    pub continued: std::result::Result<Root, SpectraError>,
    /// Id of the complex branch carrying the continuation.
    pub complex_branch: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: usize,
    pub parameter: SweepParam,
    pub samples: Vec<BranchSample>,
    pub events: Vec<CoalescenceEvent>,
    /// Continuation failures; the sweep carries on without this branch.
    pub failures: Vec<(f64, SpectraError)>,
}

impl Branch {
    fn new(id: usize, parameter: SweepParam) -> Self {
        Self { id, parameter, samples: Vec::new(), events: Vec::new(), failures: Vec::new() }
    }

    pub fn is_complex(&self) -> bool {
        self.samples.first().map(|s| s.root.kind == RootKind::ComplexPair).unwrap_or(false)
    }

    fn last_s(&self) -> C64 {
        self.samples.last().expect("branches are created with a sample").root.s()
    }

    fn predicted(&self, param: f64) -> C64 {
        let n = self.samples.len();
        if n < 2 {
            return self.last_s();
        }
        let (a, b) = (&self.samples[n - 2], &self.samples[n - 1]);
        let dp = b.param - a.param;
        if dp == 0.0 {
            return b.root.s();
        }
        b.root.s() + (b.root.s() - a.root.s()) * ((param - b.param) / dp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig {
    pub parameter: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub scan: ScanConfig,
    pub muller: MullerConfig,
    /// Distance a real root may always move between consecutive parameter
    /// values and still be considered the same branch. Isolated roots may move
    /// up to `SPACING_FRACTION` of the distance to their nearest neighbour.
    pub max_jump: f64,
    pub max_halvings: usize,
    /// Follow merged pairs into the complex plane.
    pub follow_complex: bool,
}

impl TraceConfig {
    pub fn new(parameter: SweepParam, start: f64, stop: f64, step: f64, scan: ScanConfig) -> Self {
        Self { parameter, start, stop, step, scan, muller: MullerConfig::default(), max_jump: 0.5, max_halvings: 6, follow_complex: true }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) {
            return Err(SpectraError::InvalidParams(format!(
                "sweep needs start <= stop and step > 0, got {}:{}:{}",
                self.start, self.stop, self.step
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        let mut v: Vec<f64> = (0..=n).map(|i| self.start + i as f64 * self.step).collect();
        if self.stop - v[n] > 1e-9 * self.step.max(1.0) {
            v.push(self.stop);
        }
        Ok(v)
    }
}

const SPACING_FRACTION: f64 = 0.4;

/// Match window of each predicted root.
fn match_windows(old: &[f64], max_jump: f64) -> Vec<f64> {
    (0..old.len())
        .map(|i| {
            let left = if i > 0 { (old[i] - old[i - 1]).abs() } else { f64::INFINITY };
            let right = if i + 1 < old.len() { (old[i + 1] - old[i]).abs() } else { f64::INFINITY };
            let spacing = left.min(right);
            if spacing.is_finite() {
                max_jump.max(SPACING_FRACTION * spacing)
            } else {
                max_jump
            }
        })
        .collect()
}

/// Optimal order-preserving alignment of old (predicted) and new roots.
/// Old root `i` matches within `windows[i]` and costs that much to drop;
/// an unmatched new root costs `gap`.
fn align(old: &[f64], new: &[f64], windows: &[f64], gap: f64) -> Vec<(Option<usize>, Option<usize>)> {
    let (n, m) = (old.len(), new.len());
    let mut cost = vec![vec![0.0f64; m + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=m {
            cost[i][j] = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cost[0][j - 1] + gap,
                (_, 0) => cost[i - 1][0] + windows[i - 1],
                _ => {
                    let d = (old[i - 1] - new[j - 1]).abs();
                    let matched = if d <= windows[i - 1] { cost[i - 1][j - 1] + d } else { f64::INFINITY };
                    matched.min(cost[i - 1][j] + windows[i - 1]).min(cost[i][j - 1] + gap)
                }
            };
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 {
            let d = (old[i - 1] - new[j - 1]).abs();
            if d <= windows[i - 1] && (cost[i][j] - (cost[i - 1][j - 1] + d)).abs() <= 1e-12 * (1.0 + cost[i][j]) {
                out.push((Some(i - 1), Some(j - 1)));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && (j == 0 || (cost[i][j] - (cost[i - 1][j] + windows[i - 1])).abs() <= 1e-12 * (1.0 + cost[i][j])) {
            out.push((Some(i - 1), None));
            i -= 1;
        } else {
            out.push((None, Some(j - 1)));
            j -= 1;
        }
    }
    out.reverse();
    out
}

/// Follow every root of a one-parameter family over the configured sweep.
///
/// `family(p, s)` returns the scaled determinant at parameter `p`. If
/// `initial` is `None` the starting roots come from a real scan at `start`.
/// Real roots are rescanned at every parameter value (in parallel), complex
/// branches are continued by Muller with step halving on failure.
pub fn trace_parameter<F>(family: F, cfg: &TraceConfig, initial: Option<Vec<Root>>, source: RootSource) -> Result<Vec<Branch>>
where
    F: Fn(f64, C64) -> Result<Determinant> + Sync,
{
    let params = cfg.values()?;
    let scans = params
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            if i == 0 {
                if let Some(init) = &initial {
                    return Ok(init.iter().filter(|r| r.kind == RootKind::Real).copied().collect());
                }
            }
            let at_p = |s: C64| family(p, s);
            let reference = reference_scale(&at_p, &cfg.scan);
            scan_real_roots(|s| Ok(at_p(C64::new(s, 0.0))?.rescaled(reference).re), &cfg.scan, source).map(|o| o.roots)
        })
        .collect::<Result<Vec<Vec<Root>>>>()?;

    let mut branches: Vec<Branch> = Vec::new();
    // ids of live real branches in ascending order of s
    let mut live_real: Vec<usize> = Vec::new();
    let mut live_complex: Vec<usize> = Vec::new();

    for root in scans[0].iter() {
        let mut b = Branch::new(branches.len(), cfg.parameter);
        b.samples.push(BranchSample { param: params[0], root: *root });
        live_real.push(b.id);
        branches.push(b);
    }
    if let Some(init) = &initial {
        for root in init.iter().filter(|r| r.kind == RootKind::ComplexPair) {
            let mut b = Branch::new(branches.len(), cfg.parameter);
            b.samples.push(BranchSample { param: params[0], root: *root });
            live_complex.push(b.id);
            branches.push(b);
        }
    }

    let edge = 2.0 * cfg.scan.step;
    for i in 1..params.len() {
        let (p_prev, p) = (params[i - 1], params[i]);
        let new_roots = &scans[i];
        let predicted: Vec<f64> = live_real.iter().map(|&id| branches[id].predicted(p).re).collect();
        let new_s: Vec<f64> = new_roots.iter().map(|r| r.s().re).collect();
        let pairs = align(&predicted, &new_s, &match_windows(&predicted, cfg.max_jump), cfg.max_jump);

        let mut next_live = Vec::new();
        let mut lost: Vec<usize> = Vec::new();
        for (o, n) in pairs {
            match (o, n) {
                (Some(oi), Some(ni)) => {
                    let id = live_real[oi];
                    branches[id].samples.push(BranchSample { param: p, root: new_roots[ni] });
                    next_live.push(id);
                }
                (Some(oi), None) => lost.push(oi),
                (None, Some(ni)) => {
                    let mut b = Branch::new(branches.len(), cfg.parameter);
                    b.samples.push(BranchSample { param: p, root: new_roots[ni] });
                    next_live.push(b.id);
                    branches.push(b);
                }
                (None, None) => unreachable!(),
            }
        }

        // adjacent pairs lost together, away from the scan window edges, merged
        let mut k = 0;
        while k < lost.len() {
            let oi = lost[k];
            let adjacent = k + 1 < lost.len() && lost[k + 1] == oi + 1;
            if adjacent {
                let (ida, idb) = (live_real[oi], live_real[oi + 1]);
                let (sa, sb) = (branches[ida].last_s().re, branches[idb].last_s().re);
                let inside = sa > cfg.scan.s_min + edge && sb < cfg.scan.s_max - edge;
                if inside && cfg.follow_complex {
                    let f = |s: C64| -> Result<C64> {
                        let reference = family(p, C64::new(0.5 * (sa + sb), 0.0))?.log_scale;
                        Ok(family(p, s)?.rescaled(reference))
                    };
                    let outcome = detect_coalescence(f, (sa, sb), cfg.scan.step, &cfg.muller, source);
                    let seed = C64::new(0.5 * (sa + sb), cfg.scan.step);
                    let mut event = CoalescenceEvent {
                        param: p,
                        merged: (sa, sb),
                        branches: (ida, idb),
                        seed,
                        continued: outcome.clone().map(|(_, r)| r),
                        complex_branch: None,
                    };
                    if let Ok((seed, root)) = outcome {
                        event.seed = seed;
                        let mut cb = Branch::new(branches.len(), cfg.parameter);
                        cb.samples.push(BranchSample { param: p, root });
                        event.complex_branch = Some(cb.id);
                        live_complex.push(cb.id);
                        branches.push(cb);
                    }
                    for id in [ida, idb] {
                        if let Ok(root) = &event.continued {
                            branches[id].samples.push(BranchSample { param: p, root: *root });
                        }
                        branches[id].events.push(event.clone());
                    }
                    k += 2;
                    continue;
                }
            }
            k += 1;
        }
        live_real = next_live;

        // complex continuation, skipping branches born at this step
        let mut still = Vec::new();
        for &id in &live_complex {
            if branches[id].samples.last().map(|s| s.param) == Some(p) {
                still.push(id);
                continue;
            }
            match continue_complex(&family, &branches[id], p_prev, p, cfg, source) {
                Ok(samples) => {
                    let back_on_axis = samples.last().map(|s| s.root.kind == RootKind::Real).unwrap_or(true);
                    branches[id].samples.extend(samples.into_iter().filter(|s| s.root.kind == RootKind::ComplexPair));
                    if !back_on_axis {
                        still.push(id);
                    }
                }
                Err(e) => branches[id].failures.push((p, e)),
            }
        }
        live_complex = still;
    }
    Ok(branches)
}

/// Advance a complex branch from `p_prev` to `p`, halving the parameter step
/// when Muller fails or jumps further than `max_jump`.
fn continue_complex<F>(family: &F, branch: &Branch, p_prev: f64, p: f64, cfg: &TraceConfig, source: RootSource) -> Result<Vec<BranchSample>>
where
    F: Fn(f64, C64) -> Result<Determinant> + Sync,
{
    let mut work = branch.clone();
    let mut out = Vec::new();
    let mut from = p_prev;
    let mut dp = p - p_prev;
    let mut halvings = 0;
    while from < p - 1e-12 * dp.abs().max(1.0) {
        let target = (from + dp).min(p);
        let seed = work.predicted(target);
        let attempt = (|| {
            let reference = family(target, seed)?.log_scale;
            refine_complex(|s| Ok(family(target, s)?.rescaled(reference)), seed, &cfg.muller, source)
        })();
        match attempt {
            Ok(root) if (root.s() - work.last_s()).norm() <= cfg.max_jump && root.residual <= cfg.scan.residual_tol => {
                let sample = BranchSample { param: target, root };
                work.samples.push(sample);
                out.push(sample);
                from = target;
                if root.kind == RootKind::Real {
                    return Ok(out);
                }
            }
            other => {
                if halvings >= cfg.max_halvings {
                    return Err(match other {
                        Err(e) => e,
                        Ok(root) => SpectraError::NoConvergence { iterations: cfg.muller.max_iter, last: root.s() },
                    });
                }
                dp *= 0.5;
                halvings += 1;
            }
        }
    }
    Ok(out)
}
