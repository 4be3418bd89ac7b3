//! Integration regions `[-L(t), L(t)]` that expand with the fleeing
//! particles.
//!
//! The norm over a moving interval changes by the boundary flux plus the
//! density swept in by the moving edges:
//!
//! ```text
//! dN/dt = -[j(L) - j(-L)] + L'(t) [ρ(L) + ρ(-L)]
//! ```
//!
//! For a pure resonance the edge speed `2 Re K` cancels both the prefactor
//! and the time dependence of the edge density, so `N` is constant. For a
//! general state the edge must follow the local speed `j/ρ`. Two rules are
//! provided: the single-edge rule `L' = j(L)/ρ(L)`, which conserves `N`
//! whenever `|Ψ|` is even, and the two-edge balance
//! `L' = [j(L) - j(-L)] / [ρ(L) + ρ(-L)]`, which conserves it for any state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flux_identities::boundary_momentum_leak;
use crate::model::UnitSystem;
use crate::quadrature::QuadSpec;
use crate::siegert_solver::SiegertRoot;
use crate::wavefunc::WaveState;

/// Default RK4 step in reduced time units.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Relative change of `L(t_end)` allowed between step `h` and `h/2`.
pub const HALVING_TOLERANCE: f64 = 1e-8;

/// Densities below this fraction of the local term scale count as nodes.
const NODE_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleeingSpeed {
    pub speed: f64,
    /// Set for anti-resonant roots: the region shrinks instead.
    pub shrinking: bool,
}

/// `v = (hbar/m) Re K`.
pub fn fleeing_speed_pure(root: &SiegertRoot) -> FleeingSpeed {
    let speed = UnitSystem::VELOCITY * root.k.re;
    FleeingSpeed {
        speed,
        shrinking: speed < 0.0,
    }
}

/// `L(t) = v t + L0`.
pub fn linear_domain(root: &SiegertRoot, initial_half_width: f64, t: f64) -> f64 {
    fleeing_speed_pure(root).speed * t + initial_half_width
}

/// The two terms of `dN/dt` for a pure state on `L(t) = v t + L0`, up to the
/// common positive factor: the prefactor `-2 Re K (hbar/m)/2 + L'` and the
/// time-dependent part of the edge exponent `Im(K L(t) - E t) - Im(K L0)`.
/// Both vanish identically.
pub fn pure_conservation_terms(root: &SiegertRoot, initial_half_width: f64, t: f64) -> (f64, f64) {
    let v = fleeing_speed_pure(root).speed;
    let coefficient = -UnitSystem::VELOCITY * root.k.re + v;
    let l = linear_domain(root, initial_half_width, t);
    let exponent =
        (root.k * l - root.energy * (t / UnitSystem::HBAR)).im - (root.k * initial_half_width).im;
    (coefficient, exponent)
}

/// `v̄(x) = j(x) / ρ(x)`.
pub fn vbar(state: &WaveState, x: f64, t: f64) -> Result<f64> {
    let (rho, j) = state.density_current(x, t);
    if !(rho >= 1e-300) || rho < NODE_FRACTION * term_scale(state, x, t) {
        return Err(Error::SingularNode { x, t });
    }
    Ok(j / rho)
}

/// `(Σ |a_n Φ_n(x, t)|)^2`, the density a state would have without
/// destructive interference.
fn term_scale(state: &WaveState, x: f64, t: f64) -> f64 {
    let s: f64 = state
        .terms()
        .iter()
        .map(|(a, f)| {
            (a.norm() * (f.root.energy.im * t / UnitSystem::HBAR).exp()) * f.value(x).norm()
        })
        .sum();
    s * s
}

/// Phases of a two-resonance superposition at the edge `x = L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFunctions {
    /// `Δ = (E1 - E2) t / hbar - (K1 - K2) L`.
    pub delta: Complex64,
    /// `Θ = Re Δ - (arg a1 - arg a2)`.
    pub theta: f64,
}

impl PhaseFunctions {
    pub fn new(
        a1: Complex64,
        a2: Complex64,
        root1: &SiegertRoot,
        root2: &SiegertRoot,
        half_width: f64,
        t: f64,
    ) -> Self {
        let delta = (root1.energy - root2.energy) * (t / UnitSystem::HBAR)
            - (root1.k - root2.k) * half_width;
        Self {
            delta,
            theta: delta.re - (a1.arg() - a2.arg()),
        }
    }
}

/// Closed-form edge speed of `a1 Φ1 + a2 Φ2` at `x = L` outside the well.
pub fn rhs_two_state(
    a1: Complex64,
    a2: Complex64,
    root1: &SiegertRoot,
    root2: &SiegertRoot,
    half_width: f64,
    t: f64,
    well_half_width: f64,
) -> Result<f64> {
    if half_width < well_half_width {
        return Err(Error::InvalidArgument(format!(
            "closed form needs L >= {well_half_width}, got {half_width}"
        )));
    }
    let PhaseFunctions { delta, theta } = PhaseFunctions::new(a1, a2, root1, root2, half_width, t);
    // every weight carries exp(±Im Δ) or 1; divide through by exp(|Im Δ|)
    let s = delta.im;
    let w1 = a1.norm_sqr() * (s - s.abs()).exp();
    let w2 = a2.norm_sqr() * (-s - s.abs()).exp();
    let c = (a1 * a2).norm() * (-s.abs()).exp();
    let (k1, k2) = (root1.k, root2.k);
    let denominator = w1 + w2 + 2.0 * c * theta.cos();
    let numerator =
        w1 * k1.re + w2 * k2.re + c * ((k1 + k2).re * theta.cos() + (k1 - k2).im * theta.sin());
    let scale = w1 + w2 + 2.0 * c;
    if !(denominator > NODE_FRACTION * scale) {
        return Err(Error::SingularNode { x: half_width, t });
    }
    Ok(UnitSystem::VELOCITY * numerator / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainMode {
    /// `L' = v̄(L)` evaluated at the right edge only.
    PaperSingleEdge,
    /// `L' = [j(L) - j(-L)] / [ρ(L) + ρ(-L)]`.
    TwoEdgeExact,
}

impl DomainMode {
    pub fn label(self) -> &'static str {
        match self {
            DomainMode::PaperSingleEdge => "single-edge",
            DomainMode::TwoEdgeExact => "two-edge",
        }
    }
}

/// Edge speed for the given mode.
pub fn edge_speed(state: &WaveState, mode: DomainMode, half_width: f64, t: f64) -> Result<f64> {
    match mode {
        DomainMode::PaperSingleEdge => vbar(state, half_width, t),
        DomainMode::TwoEdgeExact => {
            let (rho_r, j_r) = state.density_current(half_width, t);
            let (rho_l, j_l) = state.density_current(-half_width, t);
            let denominator = rho_r + rho_l;
            let scale = term_scale(state, half_width, t) + term_scale(state, -half_width, t);
            if !(denominator >= 1e-300) || denominator < NODE_FRACTION * scale {
                return Err(Error::SingularNode { x: half_width, t });
            }
            Ok((j_r - j_l) / denominator)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSample {
    pub t: f64,
    pub half_width: f64,
    pub speed: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainTrajectory {
    pub samples: Vec<DomainSample>,
    /// "rk4", "linear", "frozen" or "schedule".
    pub method: &'static str,
    pub step: f64,
    /// Relative change of the final half-width under step halving (RK4 only).
    pub halving_change: Option<f64>,
    pub quad: QuadSpec,
}

impl DomainTrajectory {
    /// Samples a prescribed edge motion `t -> (L, L')` at the given times.
    pub fn from_schedule(
        state: &WaveState,
        times: &[f64],
        schedule: impl Fn(f64) -> (f64, f64),
        quad: &QuadSpec,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(times.len());
        for &t in times {
            let (l, ldot) = schedule(t);
            samples.push(DomainSample {
                t,
                half_width: l,
                speed: ldot,
                norm: state.norm_over(-l, l, t, quad)?,
            });
        }
        let step = if times.len() > 1 {
            times[1] - times[0]
        } else {
            0.0
        };
        Ok(Self {
            samples,
            method: "schedule",
            step,
            halving_change: None,
            quad: *quad,
        })
    }

    /// `L(t) = 2 Re K t + L0` sampled every `step` up to `t_end`.
    pub fn linear(
        state: &WaveState,
        root: &SiegertRoot,
        initial_half_width: f64,
        t_end: f64,
        step: f64,
        quad: &QuadSpec,
    ) -> Result<Self> {
        let v = fleeing_speed_pure(root).speed;
        let mut traj = Self::from_schedule(
            state,
            &time_grid(t_end, step)?,
            |t| (v * t + initial_half_width, v),
            quad,
        )?;
        traj.method = "linear";
        Ok(traj)
    }

    /// Fixed interval `[-L0, L0]`.
    pub fn frozen(
        state: &WaveState,
        half_width: f64,
        t_end: f64,
        step: f64,
        quad: &QuadSpec,
    ) -> Result<Self> {
        let mut traj =
            Self::from_schedule(state, &time_grid(t_end, step)?, |_| (half_width, 0.0), quad)?;
        traj.method = "frozen";
        Ok(traj)
    }

    pub fn last(&self) -> &DomainSample {
        self.samples.last().expect("trajectories are nonempty")
    }
}

fn time_grid(t_end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need step > 0 and t_end >= 0, got step {step}, t_end {t_end}"
        )));
    }
    let n = (t_end / step).ceil().max(0.0) as usize;
    let h = if n == 0 { 0.0 } else { t_end / n as f64 };
    Ok((0..=n).map(|i| i as f64 * h).collect())
}

fn rk4_path(
    state: &WaveState,
    mode: DomainMode,
    initial_half_width: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    let h = if steps == 0 {
        0.0
    } else {
        t_end / steps as f64
    };
    let f = |t: f64, l: f64| edge_speed(state, mode, l, t);
    let mut t = 0.0;
    let mut l = initial_half_width;
    let mut path = Vec::with_capacity(steps + 1);
    path.push((t, l, f(t, l)?));
    for i in 0..steps {
        let k1 = f(t, l)?;
        let k2 = f(t + 0.5 * h, l + 0.5 * h * k1)?;
        let k3 = f(t + 0.5 * h, l + 0.5 * h * k2)?;
        let k4 = f(t + h, l + h * k3)?;
        l += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (i + 1) as f64 * h;
        path.push((t, l, f(t, l)?));
    }
    Ok(path)
}

/// Integrates `L' = edge_speed(L, t)` from `L(0) = L0` with classical RK4,
/// sampling `(t, L, L', N)` after every step. The run is repeated with half
/// the step and must agree in `L(t_end)` to [`HALVING_TOLERANCE`].
pub fn integrate_domain(
    state: &WaveState,
    initial_half_width: f64,
    t_end: f64,
    step: f64,
    mode: DomainMode,
    quad: &QuadSpec,
) -> Result<DomainTrajectory> {
    let l = state.potential().half_width;
    if !(initial_half_width >= l) {
        return Err(Error::InvalidArgument(format!(
            "initial half-width {initial_half_width} is inside the well (l = {l})"
        )));
    }
    let times = time_grid(t_end, step)?;
    let steps = times.len() - 1;
    let path = rk4_path(state, mode, initial_half_width, t_end, steps)?;
    let halved = rk4_path(state, mode, initial_half_width, t_end, 2 * steps)?;
    let coarse = path.last().expect("nonempty").1;
    let fine = halved.last().expect("nonempty").1;
    let change = (coarse - fine).abs() / fine.abs();
    if change > HALVING_TOLERANCE {
        return Err(Error::Accuracy { relative: change });
    }
    let samples = path
        .into_iter()
        .map(|(t, hw, speed)| {
            Ok(DomainSample {
                t,
                half_width: hw,
                speed,
                norm: state.norm_over(-hw, hw, t, quad)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DomainTrajectory {
        samples,
        method: "rk4",
        step: if steps == 0 {
            0.0
        } else {
            t_end / steps as f64
        },
        halving_change: Some(change),
        quad: *quad,
    })
}

/// Per-sample balance of the norm over a moving region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceSample {
    pub t: f64,
    /// `-(1/m) Re <p_n>` over the current edges.
    pub flux_term: f64,
    /// `L' [ρ(L) + ρ(-L)]`, from the moving edges.
    pub measure_term: f64,
    pub net: f64,
    /// `|N(t) - N(0)| / N(0)`.
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub max_drift: f64,
    pub rms_drift: f64,
    /// Trapezoid integral of `net` over the run, relative to `N(0)`.
    pub integrated_net: f64,
    pub samples: Vec<BalanceSample>,
}

pub fn conservation_report(
    state: &WaveState,
    traj: &DomainTrajectory,
) -> Result<ConservationReport> {
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let n0 = first.norm;
    let well = state.potential().half_width;
    let mut samples = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let flux_term = if s.half_width > well {
            -boundary_momentum_leak(state, s.half_width, s.t)? / UnitSystem::MASS
        } else {
            -(state.current(s.half_width, s.t) - state.current(-s.half_width, s.t))
        };
        let measure_term =
            s.speed * (state.density(s.half_width, s.t) + state.density(-s.half_width, s.t));
        samples.push(BalanceSample {
            t: s.t,
            flux_term,
            measure_term,
            net: flux_term + measure_term,
            drift: (s.norm - n0).abs() / n0,
        });
    }
    let max_drift = samples.iter().map(|s| s.drift).fold(0.0, f64::max);
    let rms_drift =
        (samples.iter().map(|s| s.drift * s.drift).sum::<f64>() / samples.len() as f64).sqrt();
    let integrated_net = samples
        .windows(2)
        .map(|w| 0.5 * (w[0].net + w[1].net) * (w[1].t - w[0].t))
        .sum::<f64>()
        / n0;
    Ok(ConservationReport {
        max_drift,
        rms_drift,
        integrated_net,
        samples,
    })
}
