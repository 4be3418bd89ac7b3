//! Crank-Nicolson evolution of `i dΨ/dt = -Ψ'' + V Ψ` in a hard-walled box.
//!
//! This module shares nothing with the Siegert solver beyond the initial
//! condition, so decay rates measured here are an independent check on
//! `2 |Im E|`. The scheme is exactly unitary in the box; fits must stay
//! inside the window before the outgoing front returns from the walls.
//!
//! Region norms are node sums `h Σ |ψ_i|²` and the discrete current between
//! nodes is `J_{i+1/2} = (2/h) Im(ψ_i* ψ_{i+1})`, which makes the
//! semi-discrete continuity equation telescope exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{PotentialSpec, UnitSystem};
use crate::siegert_solver::{lowest_resonances, SiegertRoot};
use crate::wavefunc::WaveState;

/// Largest norm change allowed in a single step.
pub const STEP_DRIFT_LIMIT: f64 = 1e-8;

/// Fits with `R²` below this are rejected unless the log residuals are tiny.
pub const MIN_R_SQUARED: f64 = 0.99;

/// A constant log-survival has `R² = 0/0`; residuals below this pass.
const FLAT_FIT_RMS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
    pub dt: f64,
    /// Keep every `record_every`-th step in the series.
    pub record_every: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: 20.0,
            points: 8001,
            dt: 2e-4,
            record_every: 4,
        }
    }
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize, dt: f64) -> Result<Self> {
        let g = Self {
            half_width,
            points,
            dt,
            record_every: 1,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_record_every(mut self, n: usize) -> Self {
        self.record_every = n.max(1);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0) || self.points < 5 || !(self.dt > 0.0) || self.record_every == 0
        {
            return Err(Error::InvalidArgument(format!("bad grid {self:?}")));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Node range `[first, last]` with `lo <= x <= hi`.
    fn nodes_in(&self, lo: f64, hi: f64) -> (usize, usize) {
        let h = self.spacing();
        let eps = 1e-9 * h;
        let first = ((lo + self.half_width - eps) / h).ceil().max(0.0) as usize;
        let last = (((hi + self.half_width + eps) / h).floor() as usize).min(self.points - 1);
        (first, last)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdseField {
    pub psi: Vec<Complex64>,
    pub t: f64,
}

impl TdseField {
    /// Samples `f` on the grid, pinning the wall nodes to zero.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let mut psi: Vec<Complex64> = (0..grid.points).map(|i| f(grid.x(i))).collect();
        psi[0] = Complex64::new(0.0, 0.0);
        psi[grid.points - 1] = Complex64::new(0.0, 0.0);
        Self { psi, t: 0.0 }
    }

    pub fn norm(&self, grid: &GridSpec) -> f64 {
        grid.spacing() * self.psi.iter().map(|p| p.norm_sqr()).sum::<f64>()
    }

    pub fn normalized(mut self, grid: &GridSpec) -> Self {
        let s = self.norm(grid).sqrt();
        if s > 0.0 {
            self.psi.iter_mut().for_each(|p| *p /= s);
        }
        self
    }

    /// `h Σ |ψ_i|²` over nodes in `[lo, hi]`.
    pub fn region_norm(&self, grid: &GridSpec, lo: f64, hi: f64) -> f64 {
        let (a, b) = grid.nodes_in(lo, hi);
        if a > b {
            return 0.0;
        }
        grid.spacing() * self.psi[a..=b].iter().map(|p| p.norm_sqr()).sum::<f64>()
    }

    /// Discrete current `J_{i+1/2}` on the link from node `i` to `i + 1`.
    pub fn link_current(&self, grid: &GridSpec, i: usize) -> f64 {
        UnitSystem::VELOCITY / grid.spacing() * (self.psi[i].conj() * self.psi[i + 1]).im
    }

    /// Net outflow `J(hi+) - J(lo-)` through the links bounding `[lo, hi]`.
    pub fn region_outflow(&self, grid: &GridSpec, lo: f64, hi: f64) -> f64 {
        let (a, b) = grid.nodes_in(lo, hi);
        let right = if b + 1 < grid.points {
            self.link_current(grid, b)
        } else {
            0.0
        };
        let left = if a > 0 {
            self.link_current(grid, a - 1)
        } else {
            0.0
        };
        right - left
    }

    /// Mean and standard deviation of `x` under `|ψ|²`.
    pub fn position_moments(&self, grid: &GridSpec) -> (f64, f64) {
        let n: f64 = self.psi.iter().map(|p| p.norm_sqr()).sum();
        let mean = (0..grid.points)
            .map(|i| grid.x(i) * self.psi[i].norm_sqr())
            .sum::<f64>()
            / n;
        let var = (0..grid.points)
            .map(|i| (grid.x(i) - mean).powi(2) * self.psi[i].norm_sqr())
            .sum::<f64>()
            / n;
        (mean, var.sqrt())
    }
}

/// Half-cosine cutoff: 1 for `|x| <= 2l`, 0 for `|x| >= 3l`.
pub fn truncation_window(x: f64, l: f64) -> f64 {
    let a = x.abs();
    if a <= 2.0 * l {
        1.0
    } else if a >= 3.0 * l {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * (a - 2.0 * l) / l).cos())
    }
}

/// A Siegert state at `t = 0`, truncated smoothly beyond `|x| = 3l` and
/// normalized in the box.
pub fn truncated_eigenfunction(state: &WaveState, grid: &GridSpec) -> TdseField {
    let l = state.potential().half_width;
    TdseField::from_fn(grid, |x| state.eval(x, 0.0) * truncation_window(x, l)).normalized(grid)
}

/// `exp(-(x - x0)² / (4 σ0²) + i k0 x)`, so that `σ0` is the position spread.
pub fn gaussian_packet(grid: &GridSpec, x0: f64, sigma0: f64, k0: f64) -> TdseField {
    TdseField::from_fn(grid, |x| {
        Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma0 * sigma0)).exp(), k0 * x)
    })
    .normalized(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdseSeries {
    pub grid: GridSpec,
    pub snapshots: Vec<TdseField>,
    pub max_step_drift: f64,
    /// `|N(t_end) - N(0)| / N(0)` for the whole box.
    pub total_drift: f64,
}

/// Precomputed LU factors of the constant implicit matrix.
struct Thomas {
    off: Complex64,
    c_prime: Vec<Complex64>,
    inv_denominator: Vec<Complex64>,
}

impl Thomas {
    fn new(diag: &[Complex64], off: Complex64) -> Self {
        let n = diag.len();
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_denominator = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let d = if i == 0 {
                diag[0]
            } else {
                diag[i] - off * c_prime[i - 1]
            };
            inv_denominator[i] = d.inv();
            c_prime[i] = off * inv_denominator[i];
        }
        Self {
            off,
            c_prime,
            inv_denominator,
        }
    }

    fn solve(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_denominator[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.off * rhs[i - 1]) * self.inv_denominator[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= self.c_prime[i] * next;
        }
    }
}

/// Potential on the grid, averaged to `-V0/2` on nodes exactly at `|x| = l`.
fn grid_potential(pot: &PotentialSpec, grid: &GridSpec) -> Vec<f64> {
    (0..grid.points)
        .map(|i| {
            let x = grid.x(i);
            if (x.abs() - pot.half_width).abs() <= 1e-9 * grid.spacing() {
                -0.5 * pot.depth
            } else {
                pot.value(x)
            }
        })
        .collect()
}

/// Crank-Nicolson evolution up to `t_end`, recording the initial field and
/// every `record_every`-th step. The last step is always recorded.
pub fn evolve(
    initial: &TdseField,
    pot: &PotentialSpec,
    grid: &GridSpec,
    t_end: f64,
) -> Result<TdseSeries> {
    grid.validate()?;
    if initial.psi.len() != grid.points {
        return Err(Error::InvalidArgument(format!(
            "field has {} points, grid has {}",
            initial.psi.len(),
            grid.points
        )));
    }
    if grid.half_width <= 5.0 * pot.half_width {
        return Err(Error::InvalidArgument(format!(
            "box half-width {} must exceed 5 l = {}",
            grid.half_width,
            5.0 * pot.half_width
        )));
    }
    if initial.psi[0].norm() != 0.0 || initial.psi[grid.points - 1].norm() != 0.0 {
        return Err(Error::InvalidArgument(
            "wall amplitudes must be zero".into(),
        ));
    }
    if !(t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_end must be >= 0, got {t_end}"
        )));
    }

    let h = grid.spacing();
    let v = grid_potential(pot, grid);
    let n_inner = grid.points - 2;
    let half = Complex64::new(0.0, 0.5 * grid.dt / UnitSystem::HBAR);
    let kinetic = UnitSystem::KINETIC / (h * h);
    let diag: Vec<Complex64> = (1..=n_inner)
        .map(|i| 1.0 + half * (2.0 * kinetic + v[i]))
        .collect();
    let off = -half * kinetic;
    let lu = Thomas::new(&diag, off);

    let steps = (t_end / grid.dt).round() as usize;
    let mut psi = initial.psi.clone();
    let mut rhs = vec![Complex64::new(0.0, 0.0); n_inner];
    let norm0 = initial.norm(grid);
    let mut previous = norm0;
    let mut max_step_drift: f64 = 0.0;
    let mut snapshots = vec![TdseField {
        psi: psi.clone(),
        t: initial.t,
    }];

    for step in 1..=steps {
        for (j, r) in rhs.iter_mut().enumerate() {
            let i = j + 1;
            let hpsi = kinetic * (2.0 * psi[i] - psi[i - 1] - psi[i + 1]) + v[i] * psi[i];
            *r = psi[i] - half * hpsi;
        }
        lu.solve(&mut rhs);
        psi[1..=n_inner].copy_from_slice(&rhs);
        let t = initial.t + step as f64 * grid.dt;
        let field = TdseField { psi, t };
        let norm = field.norm(grid);
        let drift = (norm - previous).abs() / norm0;
        if !(drift <= STEP_DRIFT_LIMIT) {
            return Err(Error::SchemeFailure { step, drift });
        }
        max_step_drift = max_step_drift.max(drift);
        previous = norm;
        psi = field.psi;
        if step % grid.record_every == 0 || step == steps {
            snapshots.push(TdseField {
                psi: psi.clone(),
                t,
            });
        }
    }
    Ok(TdseSeries {
        grid: *grid,
        snapshots,
        max_step_drift,
        total_drift: (previous - norm0).abs() / norm0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalFit {
    /// Decay rate `Γ = -d ln N / dt`.
    pub rate: f64,
    pub r_squared: f64,
    /// RMS residual of the log fit.
    pub rms: f64,
    pub points: usize,
}

/// Least-squares slope of `ln N_region(t)` over the snapshots in `window`.
pub fn survival_decay_rate(
    series: &TdseSeries,
    region: (f64, f64),
    window: (f64, f64),
) -> Result<SurvivalFit> {
    let pts: Vec<(f64, f64)> = series
        .snapshots
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1)
        .map(|s| (s.t, s.region_norm(&series.grid, region.0, region.1).ln()))
        .collect();
    if pts.len() < 3 || pts.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "fit window {window:?} holds {} usable samples",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sty / stt;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mt)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let rms = (ss_res / n).sqrt();
    if r_squared < MIN_R_SQUARED && rms >= FLAT_FIT_RMS {
        return Err(Error::FitQuality { r_squared, rms });
    }
    Ok(SurvivalFit {
        rate: -slope,
        r_squared,
        rms,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxCheck {
    /// Largest `|dN/dt + outflow| / |outflow|` over the window.
    pub max_rel_error: f64,
    pub samples: usize,
}

/// Compares central differences of `N_region` between snapshots with the
/// discrete outflow through the region edges.
pub fn region_flux_check(
    series: &TdseSeries,
    region: (f64, f64),
    window: (f64, f64),
) -> Result<FluxCheck> {
    let g = &series.grid;
    let s = &series.snapshots;
    let mut max_rel_error: f64 = 0.0;
    let mut samples = 0;
    for k in 1..s.len().saturating_sub(1) {
        if s[k].t < window.0 || s[k].t > window.1 {
            continue;
        }
        let dn = (s[k + 1].region_norm(g, region.0, region.1)
            - s[k - 1].region_norm(g, region.0, region.1))
            / (s[k + 1].t - s[k - 1].t);
        let outflow = s[k].region_outflow(g, region.0, region.1);
        max_rel_error = max_rel_error.max((dn + outflow).abs() / outflow.abs());
        samples += 1;
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(format!(
            "no interior snapshots in {window:?}"
        )));
    }
    Ok(FluxCheck {
        max_rel_error,
        samples,
    })
}

/// Fit window used for the deep-well check, before the initial transient
/// from the truncation spreads back into the well.
pub const DEEP_WELL_WINDOW: (f64, f64) = (0.02, 0.14);

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCrossCheck {
    pub root: SiegertRoot,
    /// `2 |Im E|` of the root.
    pub siegert_rate: f64,
    pub fit: SurvivalFit,
    pub flux: FluxCheck,
    pub total_drift: f64,
    pub max_step_drift: f64,
}

impl DecayCrossCheck {
    pub fn relative_error(&self) -> f64 {
        (self.fit.rate - self.siegert_rate).abs() / self.siegert_rate
    }
}

/// Evolves the truncated lowest resonance of `pot` and fits its survival in
/// the well.
pub fn resonance_decay_check(
    pot: &PotentialSpec,
    grid: &GridSpec,
    window: (f64, f64),
) -> Result<DecayCrossCheck> {
    let root = *lowest_resonances(pot, 1)?
        .first()
        .ok_or_else(|| Error::InvalidArgument("no resonance found".into()))?;
    let state = WaveState::pure(root, pot)?;
    let series = evolve(
        &truncated_eigenfunction(&state, grid),
        pot,
        grid,
        window.1 + 2.0 * grid.dt * grid.record_every as f64,
    )?;
    let region = (-pot.half_width, pot.half_width);
    Ok(DecayCrossCheck {
        root,
        siegert_rate: 2.0 * root.energy.im.abs() / UnitSystem::HBAR,
        fit: survival_decay_rate(&series, region, window)?,
        flux: region_flux_check(&series, region, window)?,
        total_drift: series.total_drift,
        max_step_drift: series.max_step_drift,
    })
}
