//! Units, the square-well potential, the dispersion relation and spectral
//! classification.
//!
//! Everything in this crate works in reduced units: `hbar = 1`, `2m = 1` and
//! the well half-width sets the length scale. Energies are then `E = K^2`,
//! the Laplacian coefficient of the Hamiltonian is `-1`, and a plane wave
//! `exp(iKx)` carries the speed `2 Re K`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Marker for the reduced unit convention shared by every module.
///
/// | quantity    | unit            |
/// |-------------|-----------------|
/// | length      | `l`             |
/// | wave number | `1/l`           |
/// | energy      | `hbar^2/(2ml^2)`|
/// | time        | `2ml^2/hbar`    |
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnitSystem;

impl UnitSystem {
    pub const HBAR: f64 = 1.0;
    pub const MASS: f64 = 0.5;

    /// `hbar^2 / 2m`, the coefficient of `-d^2/dx^2`.
    pub const KINETIC: f64 = Self::HBAR * Self::HBAR / (2.0 * Self::MASS);

    /// `hbar / m`, converts `Re K` into a speed.
    pub const VELOCITY: f64 = Self::HBAR / Self::MASS;

    /// Energy of a free wave number.
    pub fn energy(k: Complex64) -> Complex64 {
        k * k * Self::KINETIC
    }
}

/// Square well `V(x) = -depth` for `|x| < half_width`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub depth: f64,
    pub half_width: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            depth: 1.0,
            half_width: 1.0,
        }
    }
}

impl PotentialSpec {
    pub fn new(depth: f64, half_width: f64) -> Result<Self> {
        if !(depth.is_finite() && depth > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "well depth must be positive, got {depth}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "well half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self { depth, half_width })
    }

    /// Unit half-width well of the given depth.
    pub fn with_depth(depth: f64) -> Result<Self> {
        Self::new(depth, 1.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        if x.abs() < self.half_width {
            -self.depth
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `+1` for even, `-1` for odd: the factor relating `Phi(-x)` to `Phi(x)`.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Spectral class of a Siegert root, fixed by its quadrant in the K plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateClass {
    /// Positive imaginary axis.
    Bound,
    /// Fourth quadrant.
    Resonant,
    /// Third quadrant.
    AntiResonant,
    /// Negative imaginary axis (virtual state).
    AntiBound,
}

impl StateClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StateClass::Bound => "bound",
            StateClass::Resonant => "resonant",
            StateClass::AntiResonant => "anti-resonant",
            StateClass::AntiBound => "anti-bound",
        }
    }
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inner wave number `K' = sqrt(K^2 + V0)` on the principal branch.
///
/// Every downstream use of `K'` is even in `K'`, so the branch choice does
/// not affect residuals or wave functions.
pub fn dispersion_inner(k: Complex64, pot: &PotentialSpec) -> Complex64 {
    (k * k + pot.depth / UnitSystem::KINETIC).sqrt()
}

pub fn energy_of(k: Complex64) -> Complex64 {
    UnitSystem::energy(k)
}

/// Roots whose real part is below this (relative to `max(1, |K|)`) are
/// treated as lying on the imaginary axis.
pub const AXIS_TOLERANCE: f64 = 1e-9;

pub fn classify(k: Complex64) -> Result<StateClass> {
    let on_axis = k.re.abs() <= AXIS_TOLERANCE * k.norm().max(1.0);
    if on_axis {
        if k.im > 0.0 {
            Ok(StateClass::Bound)
        } else if k.im < 0.0 {
            Ok(StateClass::AntiBound)
        } else {
            Err(Error::InconsistentRoot { k })
        }
    } else if k.im < 0.0 {
        if k.re > 0.0 {
            Ok(StateClass::Resonant)
        } else {
            Ok(StateClass::AntiResonant)
        }
    } else {
        Err(Error::InconsistentRoot { k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const K1: Complex64 = Complex64::new(2.356987, -1.909078);

    #[test]
    fn inner_wave_number_vanishes_at_threshold() {
        let pot = PotentialSpec::default();
        let kp = dispersion_inner(Complex64::new(0.0, 1.0), &pot);
        assert!(kp.norm() < 1e-15);
    }

    #[test]
    fn inner_wave_number_at_first_resonance() {
        let pot = PotentialSpec::default();
        let kp = dispersion_inner(K1, &pot);
        // squaring back recovers K^2 + V0
        let back = kp * kp - K1 * K1 - 1.0;
        assert!(back.norm() < 1e-14);
        // independent high-precision evaluation of sqrt(K1^2 + 1)
        assert!((kp.re - 2.486_884_751_658).abs() < 1e-11, "{kp}");
        assert!((kp.im + 1.809_360_898_202).abs() < 1e-11, "{kp}");
    }

    #[test]
    fn zero_depth_well_is_identity() {
        let pot = PotentialSpec {
            depth: 0.0,
            half_width: 1.0,
        };
        for k in [Complex64::new(1.5, -0.3), Complex64::new(0.2, 2.0)] {
            assert!((dispersion_inner(k, &pot) - k).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_potential() {
        assert!(PotentialSpec::new(0.0, 1.0).is_err());
        assert!(PotentialSpec::new(1.0, -1.0).is_err());
        assert!(PotentialSpec::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn energies_of_reported_roots() {
        let e1 = energy_of(K1);
        assert!((e1.re - 1.910812).abs() < 2e-5, "{e1}");
        assert!((e1.im + 8.999349).abs() < 2e-5, "{e1}");
        let e2 = energy_of(Complex64::new(4.119962, -2.301222));
        assert!((e2.re - 11.678469).abs() < 2e-5, "{e2}");
        assert!((e2.im + 18.961903).abs() < 2e-5, "{e2}");
        let eb = energy_of(Complex64::new(0.0, 0.7));
        assert_eq!(eb.im, 0.0);
        assert!((eb.re + 0.49).abs() < 1e-15);
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify(Complex64::new(0.0, 0.67)).unwrap(),
            StateClass::Bound
        );
        assert_eq!(classify(K1).unwrap(), StateClass::Resonant);
        assert_eq!(classify(-K1.conj()).unwrap(), StateClass::AntiResonant);
        assert_eq!(
            classify(Complex64::new(0.0, -1.0)).unwrap(),
            StateClass::AntiBound
        );
        assert!(matches!(
            classify(Complex64::new(1.0, 0.5)),
            Err(Error::InconsistentRoot { .. })
        ));
        assert!(classify(Complex64::new(0.0, 0.0)).is_err());
    }

    fn complex() -> impl Strategy<Value = Complex64> {
        (-20.0..20.0f64, -20.0..20.0f64).prop_map(|(re, im)| Complex64::new(re, im))
    }

    proptest! {
        #[test]
        fn energy_mirror_symmetry(k in complex()) {
            let lhs = energy_of(-k.conj());
            let rhs = energy_of(k).conj();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }

        #[test]
        fn dispersion_squares_back(k in complex(), depth in 0.0..100.0f64) {
            let pot = PotentialSpec { depth, half_width: 1.0 };
            let kp = dispersion_inner(k, &pot);
            let target = k * k + depth;
            prop_assert!((kp * kp - target).norm() <= 1e-14 * target.norm().max(1e-300) * 4.0);
        }

        #[test]
        fn imaginary_energy_from_dispersion(k in complex()) {
            let e = energy_of(k);
            prop_assert!((e.im - 2.0 * k.re * k.im).abs() <= 1e-12 * e.norm().max(1.0));
        }
    }
}
