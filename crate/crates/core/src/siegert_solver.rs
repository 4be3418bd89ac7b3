//! Siegert roots of the square well.
//!
//! Outgoing-wave boundary conditions turn the matching conditions at
//! `x = ±l` into the parity equations
//!
//! ```text
//! odd:   K + i K' cot(K' l) = 0
//! even:  K - i K' tan(K' l) = 0,      K'^2 = K^2 + V0
//! ```
//!
//! Roots in a rectangle of the K plane are located by a grid of cells,
//! argument-principle counting on each cell and Newton refinement. Counting
//! uses the pole-free forms obtained by clearing the `cos`/`sin` denominator,
//! which are entire in `K` and share the zeros of the residuals above.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{classify, dispersion_inner, energy_of, Parity, PotentialSpec, StateClass};
use crate::trig::{scaled_cos_sin, scaled_sinc, z_cot_z, z_tan_z};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default tolerance on `|ΔK|` and `|residual|`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Roots closer than this are considered the same root.
pub const MERGE_DISTANCE: f64 = 1e-6;

const MAX_SUBDIVISION_DEPTH: usize = 12;
const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiegertRoot {
    pub k: Complex64,
    pub energy: Complex64,
    pub parity: Parity,
    pub class: StateClass,
    pub residual: f64,
}

impl SiegertRoot {
    /// Wraps a wave number without checking that it solves the parity
    /// equation; `residual` records how far off it is.
    pub fn from_k(k: Complex64, parity: Parity, pot: &PotentialSpec) -> Result<Self> {
        let residual = parity_residual(k, parity, pot)?.norm();
        Ok(Self {
            k,
            energy: energy_of(k),
            parity,
            class: classify(k)?,
            residual,
        })
    }

    /// The time-reversed partner `-K*`.
    pub fn mirror(&self, pot: &PotentialSpec) -> Result<Self> {
        Self::from_k(-self.k.conj(), self.parity, pot)
    }
}

/// Closed rectangle of the K plane with a grid of `re_points x im_points`
/// nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub re_points: usize,
    pub im_points: usize,
}

impl ScanRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        Self::with_resolution(re_min, re_max, im_min, im_max, 0, 0)
    }

    /// `re_points`/`im_points` of zero pick a resolution of about four
    /// cells per unit length.
    pub fn with_resolution(
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        re_points: usize,
        im_points: usize,
    ) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::InvalidArgument(format!(
                "scan region [{re_min}, {re_max}] x [{im_min}, {im_max}] is empty"
            )));
        }
        let auto = |span: f64| ((4.0 * span).ceil() as usize + 1).max(2);
        let re_points = if re_points == 0 {
            auto(re_max - re_min)
        } else {
            re_points
        };
        let im_points = if im_points == 0 {
            auto(im_max - im_min)
        } else {
            im_points
        };
        if re_points < 2 || im_points < 2 {
            return Err(Error::InvalidArgument(
                "scan resolution must be at least 2 points per axis".into(),
            ));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
            re_points,
            im_points,
        })
    }

    pub fn contains(&self, k: Complex64, margin: f64) -> bool {
        k.re >= self.re_min - margin
            && k.re <= self.re_max + margin
            && k.im >= self.im_min - margin
            && k.im <= self.im_max + margin
    }

    /// The region reflected through the imaginary axis.
    pub fn mirrored(&self) -> Self {
        Self {
            re_min: -self.re_max,
            re_max: -self.re_min,
            ..*self
        }
    }

    fn rect(&self) -> Rect {
        Rect {
            re: (self.re_min, self.re_max),
            im: (self.im_min, self.im_max),
        }
    }
}

/// Residual of the parity equation; zero exactly at a Siegert root.
pub fn parity_residual(k: Complex64, parity: Parity, pot: &PotentialSpec) -> Result<Complex64> {
    let l = pot.half_width;
    let z = dispersion_inner(k, pot) * l;
    match parity {
        Parity::Even => z_tan_z(z).map(|t| k - I * t / l),
        Parity::Odd => z_cot_z(z).map(|c| k + I * c / l),
    }
    .ok_or(Error::PoleProximity { k })
}

/// Entire counterpart of [`parity_residual`], scaled by `exp(-|Im K' l|)`.
fn counting_function(k: Complex64, parity: Parity, pot: &PotentialSpec) -> Complex64 {
    let l = pot.half_width;
    let kp = dispersion_inner(k, pot);
    let z = kp * l;
    let (c, s) = scaled_cos_sin(z);
    match parity {
        Parity::Even => k * c - I * kp * s,
        Parity::Odd => k * l * scaled_sinc(z) + I * c,
    }
}

/// Newton refinement of a Siegert root starting from `k0`.
///
/// The derivative is a central difference with step `1e-7 max(1, |K|)`.
/// Iterates that leave the disc of radius `max(2, |K0|/2)` around `k0` are
/// treated as non-converging, since the start was then not in a basin.
pub fn refine_root(
    k0: Complex64,
    parity: Parity,
    pot: &PotentialSpec,
    tol: f64,
    max_iter: usize,
) -> Result<SiegertRoot> {
    let radius = (0.5 * k0.norm()).max(2.0);
    let eval = |k: Complex64| parity_residual(k, parity, pot).map_err(|_| Error::PoleCapture { k });
    let mut k = k0;
    for _ in 0..max_iter {
        let f = eval(k)?;
        let h = 1e-7 * k.norm().max(1.0);
        let df = (eval(k + h)? - eval(k - h)?) / (2.0 * h);
        let step = f / df;
        if !step.is_finite() {
            return Err(Error::NonConvergence {
                last: k,
                iterations: max_iter,
            });
        }
        k -= step;
        if (k - k0).norm() > radius {
            return Err(Error::NonConvergence {
                last: k,
                iterations: max_iter,
            });
        }
        if step.norm() < tol {
            let k = snap_to_axis(k, tol);
            let root = SiegertRoot::from_k(k, parity, pot)?;
            if root.residual < tol {
                return Ok(root);
            }
        }
    }
    Err(Error::NonConvergence {
        last: k,
        iterations: max_iter,
    })
}

fn snap_to_axis(k: Complex64, tol: f64) -> Complex64 {
    if k.re.abs() < 10.0 * tol * k.norm().max(1.0) {
        Complex64::new(0.0, k.im)
    } else {
        k
    }
}

/// All Siegert roots of one parity in `region`, each exactly once, sorted
/// by `Re K` (then `Im K`).
///
/// The region is closed: roots on its edges are included. The number of
/// roots is checked against the winding number of the counting function
/// around the whole region and around every cell that was refined.
pub fn scan_roots(
    region: &ScanRegion,
    parity: Parity,
    pot: &PotentialSpec,
    tol: f64,
) -> Result<Vec<SiegertRoot>> {
    let extent = (region.re_max - region.re_min).max(region.im_max - region.im_min);
    let mut margin = 1e-7 * extent.max(1.0);
    let scanner = Scanner { parity, pot, tol };

    // Outer contour: grow the margin until it avoids every root.
    let mut outer = region.rect().grow(margin);
    let mut total = None;
    for _ in 0..4 {
        match scanner.winding(&outer) {
            Ok(w) => {
                total = Some(w);
                break;
            }
            Err(_) => {
                margin *= 10.0;
                outer = region.rect().grow(margin);
            }
        }
    }
    let total = total.ok_or_else(|| Error::IncompleteScan {
        region: *region,
        detail: "a root sits on the region boundary".into(),
    })?;

    let mut last_err = None;
    for attempt in 0..4 {
        match scanner.scan_grid(&outer, region, attempt) {
            Ok(found) => {
                let roots = finalize(found, region, margin, parity, pot)?;
                if roots.len() as i64 != total {
                    return Err(Error::IncompleteScan {
                        region: *region,
                        detail: format!("winding number {total} but {} roots refined", roots.len()),
                    });
                }
                return Ok(roots);
            }
            Err(ScanFailure::OnContour(_)) if attempt < 3 => continue,
            Err(ScanFailure::OnContour(k)) => {
                last_err = Some(Error::IncompleteScan {
                    region: *region,
                    detail: format!("grid line passes through a root near {k}"),
                })
            }
            Err(ScanFailure::Fatal(e)) => return Err(e),
        }
    }
    Err(last_err.expect("loop exits through return or error"))
}

fn finalize(
    found: Vec<Complex64>,
    region: &ScanRegion,
    margin: f64,
    parity: Parity,
    pot: &PotentialSpec,
) -> Result<Vec<SiegertRoot>> {
    let mut ks: Vec<Complex64> = Vec::with_capacity(found.len());
    for k in found {
        if !ks.iter().any(|q| (q - k).norm() < MERGE_DISTANCE) {
            ks.push(k);
        }
    }
    ks.retain(|k| region.contains(*k, margin));
    ks.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ks.into_iter()
        .map(|k| SiegertRoot::from_k(k, parity, pot))
        .collect()
}

/// Bound states by bisection along the positive imaginary axis, ordered
/// from the deepest upwards.
///
/// On `K = iκ` both residuals are real up to a factor of `i`; the search
/// variable is the inner wave number `k' = sqrt(V0 - κ^2)`, in which the
/// bound states are spaced by roughly `π / 2l`.
pub fn find_bound_states(pot: &PotentialSpec, tol: f64) -> Result<Vec<SiegertRoot>> {
    if !(pot.depth > 0.0) {
        return Err(Error::InvalidArgument(
            "bound states need a positive depth".into(),
        ));
    }
    let kmax = dispersion_inner(Complex64::new(0.0, 0.0), pot).re;
    let l = pot.half_width;
    let kappa = |kp: f64| (kmax * kmax - kp * kp).max(0.0).sqrt();
    let sector = |parity: Parity, kp: f64| {
        let g = counting_function(Complex64::new(0.0, kappa(kp)), parity, pot);
        g.im
    };

    let samples = 400 * (1 + (kmax * l).ceil() as usize);
    let mut roots = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let mut prev_kp = 0.0;
        let mut prev = sector(parity, prev_kp);
        for j in 1..=samples {
            let kp = kmax * j as f64 / samples as f64;
            let cur = sector(parity, kp);
            if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
                let (mut lo, mut hi, mut flo) = (prev_kp, kp, prev);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = sector(parity, mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                let k = Complex64::new(0.0, kappa(0.5 * (lo + hi)));
                let root = SiegertRoot::from_k(k, parity, pot)?;
                if root.residual >= tol.max(1e-13) {
                    return Err(Error::NonConvergence {
                        last: k,
                        iterations: 200,
                    });
                }
                roots.push(root);
            }
            prev_kp = kp;
            prev = cur;
        }
    }
    assert!(
        roots.iter().any(|r| r.parity == Parity::Even),
        "an attractive well always binds an even state"
    );
    roots.sort_by(|a, b| a.energy.re.total_cmp(&b.energy.re));
    Ok(roots)
}

/// Resonances of both parities in `region`, sorted by `Re K`.
pub fn scan_both_parities(
    region: &ScanRegion,
    pot: &PotentialSpec,
    tol: f64,
) -> Result<Vec<SiegertRoot>> {
    let mut roots = scan_roots(region, Parity::Even, pot, tol)?;
    roots.extend(scan_roots(region, Parity::Odd, pot, tol)?);
    roots.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    Ok(roots)
}

/// The `count` resonances with the smallest `Re K` (fourth quadrant).
pub fn lowest_resonances(pot: &PotentialSpec, count: usize) -> Result<Vec<SiegertRoot>> {
    let mut re_max = 6.0;
    loop {
        let region = ScanRegion::new(0.05, re_max, -(2.0 + 0.25 * re_max), -0.02)?;
        let roots: Vec<_> = scan_both_parities(&region, pot, DEFAULT_TOL)?
            .into_iter()
            .filter(|r| r.class == StateClass::Resonant)
            .collect();
        if roots.len() >= count {
            return Ok(roots.into_iter().take(count).collect());
        }
        if re_max > 200.0 {
            return Err(Error::InvalidArgument(format!(
                "fewer than {count} resonances with Re K < {re_max}"
            )));
        }
        re_max *= 2.0;
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    re: (f64, f64),
    im: (f64, f64),
}

impl Rect {
    fn grow(&self, m: f64) -> Self {
        Self {
            re: (self.re.0 - m, self.re.1 + m),
            im: (self.im.0 - m, self.im.1 + m),
        }
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re.0 + self.re.1), 0.5 * (self.im.0 + self.im.1))
    }

    fn contains(&self, k: Complex64, margin: f64) -> bool {
        k.re >= self.re.0 - margin
            && k.re <= self.re.1 + margin
            && k.im >= self.im.0 - margin
            && k.im <= self.im.1 + margin
    }

    fn diag(&self) -> f64 {
        (self.re.1 - self.re.0).hypot(self.im.1 - self.im.0)
    }

    /// Splits into four at fractional position `f` along each axis.
    fn quarter(&self, f: f64) -> [Rect; 4] {
        let xm = self.re.0 + f * (self.re.1 - self.re.0);
        let ym = self.im.0 + f * (self.im.1 - self.im.0);
        [
            Rect {
                re: (self.re.0, xm),
                im: (self.im.0, ym),
            },
            Rect {
                re: (xm, self.re.1),
                im: (self.im.0, ym),
            },
            Rect {
                re: (self.re.0, xm),
                im: (ym, self.im.1),
            },
            Rect {
                re: (xm, self.re.1),
                im: (ym, self.im.1),
            },
        ]
    }

    fn as_region(&self) -> ScanRegion {
        ScanRegion {
            re_min: self.re.0,
            re_max: self.re.1,
            im_min: self.im.0,
            im_max: self.im.1,
            re_points: 2,
            im_points: 2,
        }
    }
}

enum ScanFailure {
    OnContour(Complex64),
    Fatal(Error),
}

impl From<Error> for ScanFailure {
    fn from(e: Error) -> Self {
        ScanFailure::Fatal(e)
    }
}

struct Scanner<'a> {
    parity: Parity,
    pot: &'a PotentialSpec,
    tol: f64,
}

const SPLIT_FRACTIONS: [f64; 3] = [0.513_7, 0.473_1, 0.559_3];

impl Scanner<'_> {
    fn g(&self, k: Complex64) -> Complex64 {
        counting_function(k, self.parity, self.pot)
    }

    fn zero_floor(&self, k: Complex64) -> f64 {
        1e-12 * (1.0 + k.norm() + dispersion_inner(k, self.pot).norm())
    }

    /// Argument-principle zero count of the counting function inside `rect`.
    fn winding(&self, rect: &Rect) -> std::result::Result<i64, Complex64> {
        let corners = [
            Complex64::new(rect.re.0, rect.im.0),
            Complex64::new(rect.re.1, rect.im.0),
            Complex64::new(rect.re.1, rect.im.1),
            Complex64::new(rect.re.0, rect.im.1),
        ];
        let scale = self.pot.half_width.max(1.0);
        let mut total = 0.0;
        for i in 0..4 {
            let (a, b) = (corners[i], corners[(i + 1) % 4]);
            let n = 8 + (16.0 * (b - a).norm() * scale).ceil() as usize;
            let mut za = a;
            let mut ga = self.g(a);
            if ga.norm() < self.zero_floor(a) {
                return Err(a);
            }
            for j in 1..=n {
                let zb = a + (b - a) * (j as f64 / n as f64);
                let gb = self.g(zb);
                total += self.arg_change(za, zb, ga, gb, 40)?;
                za = zb;
                ga = gb;
            }
        }
        let turns = total / std::f64::consts::TAU;
        let w = turns.round();
        if (turns - w).abs() > 0.1 {
            return Err(rect.center());
        }
        Ok(w as i64)
    }

    fn arg_change(
        &self,
        a: Complex64,
        b: Complex64,
        ga: Complex64,
        gb: Complex64,
        depth: usize,
    ) -> std::result::Result<f64, Complex64> {
        if gb.norm() < self.zero_floor(b) {
            return Err(b);
        }
        let d = (gb / ga).arg();
        if d.abs() < 0.4 {
            return Ok(d);
        }
        if depth == 0 {
            return Err(0.5 * (a + b));
        }
        let m = 0.5 * (a + b);
        let gm = self.g(m);
        Ok(self.arg_change(a, m, ga, gm, depth - 1)? + self.arg_change(m, b, gm, gb, depth - 1)?)
    }

    fn scan_grid(
        &self,
        outer: &Rect,
        region: &ScanRegion,
        attempt: usize,
    ) -> std::result::Result<Vec<Complex64>, ScanFailure> {
        let nx = region.re_points - 1;
        let ny = region.im_points - 1;
        // Internal grid lines are shifted on retries to dodge roots.
        let jitter = 0.0173 * attempt as f64;
        let line = |lo: f64, hi: f64, n: usize, i: usize| {
            if i == 0 {
                lo
            } else if i == n {
                hi
            } else {
                lo + (hi - lo) * (i as f64 + jitter) / n as f64
            }
        };
        let mut found = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let cell = Rect {
                    re: (
                        line(outer.re.0, outer.re.1, nx, ix),
                        line(outer.re.0, outer.re.1, nx, ix + 1),
                    ),
                    im: (
                        line(outer.im.0, outer.im.1, ny, iy),
                        line(outer.im.0, outer.im.1, ny, iy + 1),
                    ),
                };
                found.extend(self.resolve(&cell, 0)?);
            }
        }
        Ok(found)
    }

    fn resolve(
        &self,
        cell: &Rect,
        depth: usize,
    ) -> std::result::Result<Vec<Complex64>, ScanFailure> {
        let w = self.winding(cell).map_err(ScanFailure::OnContour)?;
        if w < 0 {
            return Err(ScanFailure::Fatal(Error::IncompleteScan {
                region: cell.as_region(),
                detail: format!("negative winding number {w}"),
            }));
        }
        if w == 0 {
            return Ok(Vec::new());
        }
        let slack = 1e-6 * cell.diag();
        if w == 1 {
            let c = cell.center();
            let dx = 0.25 * (cell.re.1 - cell.re.0);
            let dy = 0.25 * (cell.im.1 - cell.im.0);
            let starts = [
                c,
                c + Complex64::new(dx, dy),
                c + Complex64::new(-dx, dy),
                c + Complex64::new(dx, -dy),
                c + Complex64::new(-dx, -dy),
            ];
            for start in starts {
                if let Ok(root) =
                    refine_root(start, self.parity, self.pot, self.tol, DEFAULT_MAX_ITER)
                {
                    if cell.contains(root.k, slack) {
                        return Ok(vec![root.k]);
                    }
                }
            }
        }
        if depth >= MAX_SUBDIVISION_DEPTH {
            return Err(ScanFailure::Fatal(Error::IncompleteScan {
                region: cell.as_region(),
                detail: format!("winding number {w} unresolved at maximum subdivision depth"),
            }));
        }
        let mut last = None;
        for f in SPLIT_FRACTIONS {
            match self.subdivide(cell, f, depth, w) {
                Err(ScanFailure::OnContour(k)) => last = Some(k),
                other => return other,
            }
        }
        Err(ScanFailure::OnContour(last.unwrap_or(cell.center())))
    }

    fn subdivide(
        &self,
        cell: &Rect,
        f: f64,
        depth: usize,
        w: i64,
    ) -> std::result::Result<Vec<Complex64>, ScanFailure> {
        let mut roots = Vec::new();
        for sub in cell.quarter(f) {
            roots.extend(self.resolve(&sub, depth + 1)?);
        }
        if roots.len() as i64 != w {
            return Err(ScanFailure::Fatal(Error::IncompleteScan {
                region: cell.as_region(),
                detail: format!("winding number {w} but {} roots in sub-cells", roots.len()),
            }));
        }
        Ok(roots)
    }
}
