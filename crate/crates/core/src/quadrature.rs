//! Globally adaptive Gauss-Kronrod (7/15) quadrature for real and complex
//! integrands, with optional break points where the integrand has kinks.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_segments: 2000,
        }
    }
}

impl QuadSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

pub trait QuadValue:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    let mut abs_sum = fc.magnitude() * WGK[7];
    let mut values = [(T::zero(), T::zero()); 7];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let (f1, f2) = (f(center - dx), f(center + dx));
        values[j] = (f1, f2);
        kron = kron + (f1 + f2) * WGK[j];
        abs_sum += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).magnitude();
    for (j, (f1, f2)) in values.iter().enumerate() {
        asc += WGK[j] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    let scale = half.abs();
    let res_abs = abs_sum * scale;
    let res_asc = asc * scale;

    // QUADPACK error rescaling
    let mut err = (kron - gauss).magnitude() * scale;
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        a,
        b,
        value: kron * half,
        error: err,
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: QuadValue>(f: impl Fn(f64) -> T, a: f64, b: f64, spec: &QuadSpec) -> Result<T> {
    integrate_with_breaks(f, a, b, &[], spec)
}

/// Integrates `f` over `[a, b]`, starting from panels split at every break
/// point strictly inside the interval.
pub fn integrate_with_breaks<T: QuadValue>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    if a > b {
        return integrate_with_breaks(f, b, a, breaks, spec).map(|v| v * -1.0);
    }
    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(b);

    let mut segments: Vec<Segment<T>> =
        points.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    loop {
        let total = sum_ordered(&mut segments);
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = spec.abs_tol.max(spec.rel_tol * total.magnitude());
        if error <= target {
            return Ok(total);
        }
        if segments.len() >= spec.max_segments {
            return Err(Error::QuadratureFailure {
                lo: a,
                hi: b,
                estimate: total.magnitude(),
                error,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one segment");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::QuadratureFailure {
                lo: a,
                hi: b,
                estimate: total.magnitude(),
                error,
            });
        }
        segments.push(kronrod(&f, s.a, mid));
        segments.push(kronrod(&f, mid, s.b));
    }
}

/// Deterministic sum in order of position, independent of refinement order.
fn sum_ordered<T: QuadValue>(segments: &mut [Segment<T>]) -> T {
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    pairwise(segments)
}

fn pairwise<T: QuadValue>(segments: &[Segment<T>]) -> T {
    match segments.len() {
        0 => T::zero(),
        1 => segments[0].value,
        n => pairwise(&segments[..n / 2]) + pairwise(&segments[n / 2..]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(
            |x: f64| x.powi(5) - 3.0 * x * x,
            -1.0,
            2.0,
            &QuadSpec::default(),
        )
        .unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn exponential_growth() {
        let spec = QuadSpec::with_rel_tol(1e-12);
        let v = integrate(|x: f64| (7.0 * x).exp(), 0.0, 5.0, &spec).unwrap();
        let exact = ((35.0f64).exp() - 1.0) / 7.0;
        assert!((v / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_oscillatory() {
        let k = Complex64::new(3.0, -0.5);
        let v = integrate(
            |x: f64| (Complex64::i() * k * x).exp(),
            0.0,
            4.0,
            &QuadSpec::default(),
        )
        .unwrap();
        let exact = ((Complex64::i() * k * 4.0).exp() - 1.0) / (Complex64::i() * k);
        assert!((v - exact).norm() < 1e-10 * exact.norm());
    }

    #[test]
    fn kink_is_handled_with_breaks() {
        let f = |x: f64| (x - 0.3).abs();
        let spec = QuadSpec::with_rel_tol(1e-13);
        let v = integrate_with_breaks(f, -1.0, 1.0, &[0.3], &spec).unwrap();
        let exact = 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7;
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn empty_and_reversed_intervals() {
        assert_eq!(
            integrate(|x: f64| x, 2.0, 2.0, &QuadSpec::default()).unwrap(),
            0.0
        );
        let v = integrate(|x: f64| x, 1.0, 0.0, &QuadSpec::default()).unwrap();
        assert!((v + 0.5).abs() < 1e-15);
    }

    #[test]
    fn impossible_tolerance_fails() {
        let spec = QuadSpec {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_segments: 4,
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &spec);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
