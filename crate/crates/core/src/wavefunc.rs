//! Siegert eigenfunctions and their superpositions.
//!
//! Eigenfunctions use unit outgoing amplitude: `Φ(x) = exp(iKx)` for
//! `x >= l` and `Φ(x) = ±exp(-iKx)` for `x <= -l` (sign from the parity).
//! Inside the well the even/odd solutions are `cos(K'x)` / `sin(K'x)`
//! scaled to match at `x = l`. This differs from the `exp(iK(|x| - l))`
//! outer form with inner amplitude `cos K'l` only by the constant factor
//! `exp(iKl) / cos(K'l)` (odd: `/ sin(K'l)`), which is absorbed into the
//! normalization.
//!
//! Time dependence is `Φ(x) exp(-iEt)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{dispersion_inner, Parity, PotentialSpec, UnitSystem};
use crate::quadrature::{integrate_with_breaks, QuadSpec};
use crate::siegert_solver::SiegertRoot;
use crate::trig::{scaled_cos_sin, scaled_sinc};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenFunction {
    pub root: SiegertRoot,
    pot: PotentialSpec,
    inner_k: Complex64,
    /// `exp(iKl)` divided by the scaled inner function at `x = l`
    /// (`cos K'l` for even, `l sinc K'l` for odd).
    inner_amp: Complex64,
}

impl EigenFunction {
    pub fn new(root: SiegertRoot, pot: &PotentialSpec) -> Result<Self> {
        let l = pot.half_width;
        let inner_k = dispersion_inner(root.k, pot);
        let z = inner_k * l;
        let at_edge = match root.parity {
            Parity::Even => scaled_cos_sin(z).0,
            Parity::Odd => scaled_sinc(z) * l,
        };
        if !(at_edge.norm() > 1e-300) {
            return Err(Error::InvalidArgument(format!(
                "inner {} solution vanishes at the well edge for K = {}",
                root.parity, root.k
            )));
        }
        Ok(Self {
            root,
            pot: *pot,
            inner_k,
            inner_amp: (I * root.k * l).exp() / at_edge,
        })
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.pot
    }

    pub fn parity(&self) -> Parity {
        self.root.parity
    }

    /// `exp(-(l - |x|) |Im K'|)`, the ratio of scale factors between `x` and `l`.
    fn inner_scale(&self, x: f64) -> f64 {
        (-(self.pot.half_width - x.abs()) * self.inner_k.im.abs()).exp()
    }

    /// `(Φ(x), Φ'(x), Φ''(x))` at `t = 0`.
    pub fn value_and_derivatives(&self, x: f64) -> (Complex64, Complex64, Complex64) {
        let l = self.pot.half_width;
        let k = self.root.k;
        if x >= l {
            let v = (I * k * x).exp();
            (v, I * k * v, -k * k * v)
        } else if x <= -l {
            let s = self.root.parity.sign();
            let v = (-I * k * x).exp() * s;
            (v, -I * k * v, -k * k * v)
        } else {
            let kp = self.inner_k;
            let z = kp * x;
            let scale = self.inner_amp * self.inner_scale(x);
            let (c, s) = scaled_cos_sin(z);
            let (v, d) = match self.root.parity {
                Parity::Even => (c * scale, -kp * s * scale),
                Parity::Odd => (scaled_sinc(z) * x * scale, c * scale),
            };
            (v, d, -kp * kp * v)
        }
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.value_and_derivatives(x).0
    }
}

/// Finite superposition `Σ a_n Φ_n(x) exp(-i E_n t)` of eigenfunctions of
/// the same well.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    terms: Vec<(Complex64, EigenFunction)>,
}

impl WaveState {
    pub fn new(terms: Vec<(Complex64, EigenFunction)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidArgument(
                "a wave state needs at least one term".into(),
            ));
        };
        let pot = *first.potential();
        for (a, f) in &terms {
            if !a.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {a} is not finite"
                )));
            }
            if *f.potential() != pot {
                return Err(Error::InvalidArgument(
                    "all terms must be eigenfunctions of the same well".into(),
                ));
            }
        }
        Ok(Self { terms })
    }

    pub fn pure(root: SiegertRoot, pot: &PotentialSpec) -> Result<Self> {
        Self::new(vec![(
            Complex64::new(1.0, 0.0),
            EigenFunction::new(root, pot)?,
        )])
    }

    pub fn superposition(terms: &[(Complex64, SiegertRoot)], pot: &PotentialSpec) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(a, r)| Ok((*a, EigenFunction::new(*r, pot)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(Complex64, EigenFunction)] {
        &self.terms
    }

    pub fn potential(&self) -> &PotentialSpec {
        self.terms[0].1.potential()
    }

    fn coefficient(a: Complex64, f: &EigenFunction, t: f64) -> Complex64 {
        a * (-I * f.root.energy * (t / UnitSystem::HBAR)).exp()
    }

    /// `(Ψ, Ψ', Ψ'')` at `(x, t)`.
    pub fn eval_all(&self, x: f64, t: f64) -> (Complex64, Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.terms
            .iter()
            .fold((zero, zero, zero), |(v, d, dd), (a, f)| {
                let c = Self::coefficient(*a, f, t);
                let (fv, fd, fdd) = f.value_and_derivatives(x);
                (v + c * fv, d + c * fd, dd + c * fdd)
            })
    }

    pub fn eval(&self, x: f64, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(a, f)| Self::coefficient(*a, f, t) * f.value(x))
            .sum()
    }

    /// Spatial derivative. At exactly `x = ±l` the outer one-sided value is
    /// returned; for a genuine root it equals the inner one.
    pub fn eval_deriv(&self, x: f64, t: f64) -> Complex64 {
        self.eval_all(x, t).1
    }

    pub fn eval_second_deriv(&self, x: f64, t: f64) -> Complex64 {
        self.eval_all(x, t).2
    }

    /// `(H Ψ)(x, t) = -Ψ'' + V Ψ` in reduced units.
    pub fn apply_hamiltonian(&self, x: f64, t: f64) -> Complex64 {
        let (v, _, dd) = self.eval_all(x, t);
        -dd * UnitSystem::KINETIC + v * self.potential().value(x)
    }

    pub fn density(&self, x: f64, t: f64) -> f64 {
        self.eval(x, t).norm_sqr()
    }

    /// Probability current `(1/m) Re[Ψ* p Ψ]`.
    pub fn current(&self, x: f64, t: f64) -> f64 {
        let (v, d, _) = self.eval_all(x, t);
        current_from(v, d)
    }

    /// `(density, current)` at one point.
    pub fn density_current(&self, x: f64, t: f64) -> (f64, f64) {
        let (v, d, _) = self.eval_all(x, t);
        (v.norm_sqr(), current_from(v, d))
    }

    /// `∫ |Ψ(x, t)|^2 dx` over `[lo, hi]` by adaptive quadrature split at the
    /// well edges.
    pub fn norm_over(&self, lo: f64, hi: f64, t: f64, quad: &QuadSpec) -> Result<f64> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "empty interval [{lo}, {hi}]"
            )));
        }
        let l = self.potential().half_width;
        integrate_with_breaks(|x| self.density(x, t), lo, hi, &[-l, l], quad)
    }

    /// Closed-form `∫ |Ψ|^2` over an interval lying entirely outside the
    /// well, from the plane-wave form of every term.
    pub fn norm_outside_closed_form(&self, lo: f64, hi: f64, t: f64) -> Result<f64> {
        let l = self.potential().half_width;
        let side = if lo >= l {
            1.0
        } else if hi <= -l {
            -1.0
        } else {
            return Err(Error::InvalidArgument(format!(
                "[{lo}, {hi}] is not outside the well"
            )));
        };
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "empty interval [{lo}, {hi}]"
            )));
        }
        // right: Ψ = Σ c_n e^{iK_n x}; left: Ψ = Σ c_n s_n e^{-iK_n x}
        let amps: Vec<(Complex64, Complex64)> = self
            .terms
            .iter()
            .map(|(a, f)| {
                let c = Self::coefficient(*a, f, t);
                if side > 0.0 {
                    (c, f.root.k)
                } else {
                    (c * f.parity().sign(), -f.root.k)
                }
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (cn, kn) in &amps {
            for (cm, km) in &amps {
                let kappa = km - kn.conj();
                total += cn.conj() * cm * exp_integral(I * kappa, lo, hi);
            }
        }
        Ok(total.re)
    }
}

fn current_from(v: Complex64, d: Complex64) -> f64 {
    // (hbar/m) Im(Ψ* Ψ')
    UnitSystem::VELOCITY * (v.conj() * d).im
}

/// `∫_lo^hi exp(w x) dx`.
fn exp_integral(w: Complex64, lo: f64, hi: f64) -> Complex64 {
    let span = hi - lo;
    let u = w * span;
    let ratio = if u.norm() < 1e-5 {
        span * (1.0 + u / 2.0 + u * u / 6.0)
    } else {
        (u.exp() - 1.0) / w
    };
    (w * lo).exp() * ratio
}
