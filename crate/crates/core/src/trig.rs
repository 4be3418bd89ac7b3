//! Complex trigonometry with the exponential growth factored out.
//!
//! `cos z` and `sin z` grow like `exp(|Im z|)`; the helpers below return
//! `cos z * exp(-|Im z|)` and `sin z * exp(-|Im z|)` so that residuals and
//! wave-function ratios can be formed deep in the lower half-plane without
//! overflow.

use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this `|z|` the sinc and `z cot z` series are used.
const SERIES_RADIUS: f64 = 1e-3;

/// `(cos z, sin z) * exp(-|Im z|)`.
pub(crate) fn scaled_cos_sin(z: Complex64) -> (Complex64, Complex64) {
    let y = z.im;
    if y.abs() < 30.0 {
        let f = (-y.abs()).exp();
        return (z.cos() * f, z.sin() * f);
    }
    let phase = Complex64::from_polar(1.0, z.re);
    let (a, b) = if y >= 0.0 {
        // e^{iz} e^{-y} = e^{ix} e^{-2y},  e^{-iz} e^{-y} = e^{-ix}
        (phase * (-2.0 * y).exp(), phase.conj())
    } else {
        (phase, phase.conj() * (2.0 * y).exp())
    };
    ((a + b) * 0.5, (a - b) / (2.0 * I))
}

/// `sin(z)/z * exp(-|Im z|)`, regular at `z = 0`.
pub(crate) fn scaled_sinc(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        let z2 = z * z;
        (1.0 - z2 / 6.0 + z2 * z2 / 120.0) * (-z.im.abs()).exp()
    } else {
        scaled_cos_sin(z).1 / z
    }
}

/// `z tan z`, or `None` within `1e-12` of a pole of `tan`.
pub(crate) fn z_tan_z(z: Complex64) -> Option<Complex64> {
    let (c, s) = scaled_cos_sin(z);
    if c.norm() < 1e-12 {
        return None;
    }
    Some(z * s / c)
}

/// `z cot z`, regular at `z = 0`, or `None` within `1e-12` of a nonzero pole.
pub(crate) fn z_cot_z(z: Complex64) -> Option<Complex64> {
    if z.norm() < SERIES_RADIUS {
        let z2 = z * z;
        return Some(1.0 - z2 / 3.0 - z2 * z2 / 45.0);
    }
    let (c, s) = scaled_cos_sin(z);
    if s.norm() < 1e-12 {
        return None;
    }
    Some(z * c / s)
}
