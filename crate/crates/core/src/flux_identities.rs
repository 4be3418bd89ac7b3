//! Non-Hermiticity as a boundary momentum leak.
//!
//! Over `Ω = [-L, L]` with `L` outside the well:
//!
//! ```text
//! Im <Ψ|H|Ψ>_Ω   = -(hbar/2m) Re <Ψ|p_n|Ψ>_∂Ω
//! d/dt <Ψ|Ψ>_Ω   = -(1/m)     Re <Ψ|p_n|Ψ>_∂Ω
//! Im E           =  (hbar^2/m) Re K Im K
//! ```
//!
//! where `p_n` is the outward normal momentum (`p` at `x = L`, `-p` at
//! `x = -L`). In reduced units the prefactors are `hbar/2m = 1`, `1/m = 2`
//! and `hbar^2/m = 2`; each report carries the prefactor it used.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::UnitSystem;
use crate::quadrature::{integrate_with_breaks, QuadSpec};
use crate::siegert_solver::SiegertRoot;
use crate::wavefunc::WaveState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `Im <H> = -(hbar/2m) Re <p_n>`.
    HamiltonianLeak,
    /// `dN/dt = -(1/m) Re <p_n>`.
    NormLeak,
    /// `Im E = (hbar^2/m) Re K Im K`.
    DispersionImaginaryPart,
}

impl Identity {
    pub fn label(self) -> &'static str {
        match self {
            Identity::HamiltonianLeak => "im-hamiltonian-vs-leak",
            Identity::NormLeak => "norm-rate-vs-leak",
            Identity::DispersionImaginaryPart => "im-energy-vs-dispersion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakReport {
    pub identity: Identity,
    /// Half-width `L` of `Ω`; `None` for the dispersion identity.
    pub half_width: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    /// Reduced-unit prefactor applied on the right-hand side.
    pub prefactor: f64,
}

impl LeakReport {
    fn new(
        identity: Identity,
        half_width: Option<f64>,
        lhs: f64,
        rhs: f64,
        prefactor: f64,
    ) -> Self {
        let abs_error = (lhs - rhs).abs();
        let rel_error = abs_error / lhs.abs().max(rhs.abs()).max(1e-300);
        Self {
            identity,
            half_width,
            lhs,
            rhs,
            abs_error,
            rel_error,
            prefactor,
        }
    }

    /// Passes when either the relative or the absolute error is below `tol`.
    pub fn passes(&self, rel_tol: f64, abs_tol: f64) -> bool {
        self.rel_error < rel_tol || self.abs_error < abs_tol
    }
}

fn check_half_width(state: &WaveState, half_width: f64) -> Result<()> {
    let l = state.potential().half_width;
    if half_width > l {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "region half-width {half_width} must exceed the well half-width {l}"
        )))
    }
}

/// `∫_{-L}^{L} Ψ* H Ψ dx` with `HΨ` from the analytic second derivative.
pub fn hamiltonian_expectation(
    state: &WaveState,
    half_width: f64,
    t: f64,
    quad: &QuadSpec,
) -> Result<Complex64> {
    check_half_width(state, half_width)?;
    let l = state.potential().half_width;
    integrate_with_breaks(
        |x| state.eval(x, t).conj() * state.apply_hamiltonian(x, t),
        -half_width,
        half_width,
        &[-l, l],
        quad,
    )
}

/// `Re <Ψ|p_n|Ψ>` summed over both edges with the outward normal.
pub fn boundary_momentum_leak(state: &WaveState, half_width: f64, t: f64) -> Result<f64> {
    check_half_width(state, half_width)?;
    let edge = |x: f64| {
        let (v, d, _) = state.eval_all(x, t);
        // Re[Ψ* (-i hbar) Ψ'] = hbar Im(Ψ* Ψ')
        UnitSystem::HBAR * (v.conj() * d).im
    };
    Ok(edge(half_width) - edge(-half_width))
}

pub fn check_identity_140(
    state: &WaveState,
    half_width: f64,
    t: f64,
    quad: &QuadSpec,
) -> Result<LeakReport> {
    let prefactor = UnitSystem::HBAR / (2.0 * UnitSystem::MASS);
    let lhs = hamiltonian_expectation(state, half_width, t, quad)?.im;
    let rhs = -prefactor * boundary_momentum_leak(state, half_width, t)?;
    Ok(LeakReport::new(
        Identity::HamiltonianLeak,
        Some(half_width),
        lhs,
        rhs,
        prefactor,
    ))
}

/// `dN/dt` over the fixed region `[-L, L]` by central differences in time,
/// Richardson-extrapolated from steps `dt` and `dt/2`.
pub fn norm_rate(
    state: &WaveState,
    half_width: f64,
    t: f64,
    dt: f64,
    quad: &QuadSpec,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let n = |s: f64| state.norm_over(-half_width, half_width, s, quad);
    let central = |h: f64| -> Result<f64> { Ok((n(t + h)? - n(t - h)?) / (2.0 * h)) };
    let coarse = central(dt)?;
    let fine = central(0.5 * dt)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

pub fn check_identity_170(
    state: &WaveState,
    half_width: f64,
    quad: &QuadSpec,
    t: f64,
    dt: f64,
) -> Result<LeakReport> {
    check_half_width(state, half_width)?;
    let prefactor = 1.0 / UnitSystem::MASS;
    let lhs = norm_rate(state, half_width, t, dt, quad)?;
    let rhs = -prefactor * boundary_momentum_leak(state, half_width, t)?;
    Ok(LeakReport::new(
        Identity::NormLeak,
        Some(half_width),
        lhs,
        rhs,
        prefactor,
    ))
}

pub fn check_identity_180(root: &SiegertRoot) -> LeakReport {
    let prefactor = UnitSystem::HBAR * UnitSystem::HBAR / UnitSystem::MASS;
    let lhs = root.energy.im;
    let rhs = prefactor * root.k.re * root.k.im;
    LeakReport::new(Identity::DispersionImaginaryPart, None, lhs, rhs, prefactor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Parity, PotentialSpec};
    use crate::siegert_solver::{find_bound_states, refine_root};

    fn pot() -> PotentialSpec {
        PotentialSpec::default()
    }

    fn k1() -> SiegertRoot {
        refine_root(Complex64::new(2.36, -1.91), Parity::Even, &pot(), 1e-12, 50).unwrap()
    }

    fn k2() -> SiegertRoot {
        refine_root(Complex64::new(4.12, -2.3), Parity::Odd, &pot(), 1e-12, 50).unwrap()
    }

    fn pair() -> WaveState {
        let one = Complex64::new(1.0, 0.0);
        WaveState::superposition(&[(one, k1()), (one, k2())], &pot()).unwrap()
    }

    fn tight() -> QuadSpec {
        QuadSpec::with_rel_tol(1e-12)
    }

    #[test]
    fn bound_state_expectation_is_real_and_tends_to_energy() {
        let b = find_bound_states(&pot(), 1e-12).unwrap()[0];
        let s = WaveState::pure(b, &pot()).unwrap();
        let near = hamiltonian_expectation(&s, 2.0, 0.0, &tight()).unwrap();
        assert!(near.im.abs() < 1e-10);
        let far = hamiltonian_expectation(&s, 30.0, 0.0, &tight()).unwrap();
        let n = s.norm_over(-30.0, 30.0, 0.0, &tight()).unwrap();
        assert!((far.re / n - b.energy.re).abs() < 1e-10);
    }

    #[test]
    fn resonance_expectation_leaks() {
        let s = WaveState::pure(k1(), &pot()).unwrap();
        let h = hamiltonian_expectation(&s, 5.0, 0.0, &tight()).unwrap();
        assert!(h.im < 0.0);
        let n = s.norm_over(-10.0, 10.0, 0.0, &tight()).unwrap();
        let ratio = hamiltonian_expectation(&s, 10.0, 0.0, &tight()).unwrap() / n;
        assert!((ratio - k1().energy).norm() < 1e-3);
    }

    #[test]
    fn leak_signs() {
        let r = k1();
        let s = WaveState::pure(r, &pot()).unwrap();
        let out = boundary_momentum_leak(&s, 3.0, 0.0).unwrap();
        assert!(out > 0.0);
        let mirror = WaveState::pure(r.mirror(&pot()).unwrap(), &pot()).unwrap();
        let inward = boundary_momentum_leak(&mirror, 3.0, 0.0).unwrap();
        assert!((inward + out).abs() < 1e-12 * out);
        let b = WaveState::pure(find_bound_states(&pot(), 1e-12).unwrap()[0], &pot()).unwrap();
        assert!(boundary_momentum_leak(&b, 3.0, 0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn region_must_enclose_the_well() {
        let s = pair();
        assert!(hamiltonian_expectation(&s, 1.0, 0.0, &tight()).is_err());
        assert!(boundary_momentum_leak(&s, 0.5, 0.0).is_err());
        assert!(check_identity_170(&s, 0.9, &tight(), 0.0, 1e-4).is_err());
    }

    #[test]
    fn identity_140_examples() {
        let r = check_identity_140(&WaveState::pure(k1(), &pot()).unwrap(), 3.0, 0.0, &tight())
            .unwrap();
        assert!(r.rel_error < 1e-8, "{r:?}");
        let r = check_identity_140(&pair(), 4.0, 0.1, &tight()).unwrap();
        assert!(r.rel_error < 1e-8, "{r:?}");
        let b = WaveState::pure(find_bound_states(&pot(), 1e-12).unwrap()[0], &pot()).unwrap();
        let r = check_identity_140(&b, 3.0, 0.0, &tight()).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
    }

    #[test]
    fn identity_170_examples() {
        let r1 = k1();
        let s = WaveState::pure(r1, &pot()).unwrap();
        let rep = check_identity_170(&s, 3.0, &tight(), 0.0, 1e-4).unwrap();
        assert!(rep.rel_error < 1e-6, "{rep:?}");
        let n = s.norm_over(-3.0, 3.0, 0.0, &tight()).unwrap();
        assert!((rep.lhs / (2.0 * r1.energy.im * n) - 1.0).abs() < 1e-6);
        let b = WaveState::pure(find_bound_states(&pot(), 1e-12).unwrap()[0], &pot()).unwrap();
        let rep = check_identity_170(&b, 3.0, &tight(), 0.0, 1e-4).unwrap();
        assert!(rep.lhs.abs() < 1e-10 && rep.rhs.abs() < 1e-10);
    }

    #[test]
    fn norm_rate_is_twice_imaginary_hamiltonian() {
        let s = pair();
        for l in [2.0, 3.5] {
            let rate = norm_rate(&s, l, 0.05, 1e-4, &tight()).unwrap();
            let h = hamiltonian_expectation(&s, l, 0.05, &tight()).unwrap();
            let expect = 2.0 / UnitSystem::HBAR * h.im;
            assert!((rate / expect - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn decay_and_growth_signs() {
        let r = k2();
        let decaying = WaveState::pure(r, &pot()).unwrap();
        assert!(norm_rate(&decaying, 3.0, 0.0, 1e-4, &tight()).unwrap() < 0.0);
        let growing = WaveState::pure(r.mirror(&pot()).unwrap(), &pot()).unwrap();
        assert!(norm_rate(&growing, 3.0, 0.0, 1e-4, &tight()).unwrap() > 0.0);
    }

    #[test]
    fn identity_180() {
        for r in [k1(), k2()] {
            let rep = check_identity_180(&r);
            assert!(rep.abs_error < 1e-9);
        }
        let b = find_bound_states(&pot(), 1e-12).unwrap()[0];
        let rep = check_identity_180(&b);
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.rhs, 0.0);
    }
}
