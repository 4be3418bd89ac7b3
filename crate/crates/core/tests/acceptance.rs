//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the
//! process exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use siegert_core::expanding_domain::{
    conservation_report, integrate_domain, rhs_two_state, vbar, DomainMode, DomainTrajectory,
};
use siegert_core::flux_identities::{check_identity_140, check_identity_170, check_identity_180};
use siegert_core::quadrature::QuadSpec;
use siegert_core::siegert_solver::{
    lowest_resonances, parity_residual, scan_both_parities, scan_roots, DEFAULT_TOL,
};
use siegert_core::tdse_oracle::{resonance_decay_check, GridSpec, DEEP_WELL_WINDOW};
use siegert_core::{Parity, PotentialSpec, ScanRegion, SiegertRoot, StateClass, WaveState};

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn nearest(roots: &[SiegertRoot], k: Complex64) -> SiegertRoot {
    *roots
        .iter()
        .min_by(|a, b| (a.k - k).norm().total_cmp(&(b.k - k).norm()))
        .expect("no roots")
}

fn componentwise(a: Complex64, b: Complex64) -> f64 {
    (a.re - b.re).abs().max((a.im - b.im).abs())
}

fn first_two() -> (SiegertRoot, SiegertRoot) {
    let r = lowest_resonances(&PotentialSpec::default(), 2).unwrap();
    (r[0], r[1])
}

fn paper_pair() -> WaveState {
    let (k1, k2) = first_two();
    WaveState::superposition(
        &[(c(1.0, 0.0), k1), (c(1.0, 0.0), k2)],
        &PotentialSpec::default(),
    )
    .unwrap()
}

fn root_reproduction() -> Outcome {
    let pot = PotentialSpec::default();
    let region = ScanRegion::new(0.0, 6.0, -3.0, -0.1).unwrap();
    let even = scan_roots(&region, Parity::Even, &pot, DEFAULT_TOL).unwrap();
    let odd = scan_roots(&region, Parity::Odd, &pot, DEFAULT_TOL).unwrap();
    let r1 = nearest(&even, c(2.356987, -1.909078));
    let r2 = nearest(&odd, c(4.119962, -2.301222));
    let errs = [
        componentwise(r1.k, c(2.356987, -1.909078)),
        componentwise(r2.k, c(4.119962, -2.301222)),
        componentwise(r1.energy, c(1.910812, -8.999349)),
        componentwise(r2.energy, c(11.678469, -18.961903)),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    Outcome {
        pass: worst < 1e-5,
        detail: format!(
            "K1 = {:.6}, K2 = {:.6}, E1 = {:.6}, E2 = {:.6}; worst component error {worst:.2e} (< 1e-5)",
            r1.k, r2.k, r1.energy, r2.energy
        ),
    }
}

fn spectrum_symmetry() -> Outcome {
    let pot = PotentialSpec::default();
    let region = ScanRegion::new(0.05, 12.0, -4.0, -0.05).unwrap();
    let resonances = scan_both_parities(&region, &pot, DEFAULT_TOL).unwrap();
    let mirrored = scan_both_parities(&region.mirrored(), &pot, DEFAULT_TOL).unwrap();
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for r in resonances
        .iter()
        .filter(|r| r.class == StateClass::Resonant)
    {
        let partner = -r.k.conj();
        worst = worst.max(parity_residual(partner, r.parity, &pot).unwrap().norm());
        let found = mirrored.iter().any(|m| {
            m.parity == r.parity
                && m.class == StateClass::AntiResonant
                && (m.k - partner).norm() < 1e-8
        });
        if found {
            matched += 1;
        }
    }
    let total = resonances
        .iter()
        .filter(|r| r.class == StateClass::Resonant)
        .count();
    Outcome {
        pass: total > 0 && matched == total && worst < 1e-10,
        detail: format!(
            "{matched}/{total} resonances have a scanned partner at -K*; max partner residual {worst:.2e} (< 1e-10)"
        ),
    }
}

fn leak_identities() -> Outcome {
    let pot = PotentialSpec::default();
    let (k1, k2) = first_two();
    let quad = QuadSpec::with_rel_tol(1e-12);
    let states = [
        ("K1", WaveState::pure(k1, &pot).unwrap()),
        ("K1+K2", paper_pair()),
    ];
    let mut worst: f64 = 0.0;
    for (_, s) in &states {
        for l in [2.0, 3.0, 5.0] {
            let a = check_identity_140(s, l, 0.1, &quad).unwrap();
            let b = check_identity_170(s, l, &quad, 0.1, 1e-4).unwrap();
            worst = worst.max(a.rel_error).max(b.rel_error);
        }
    }
    let disp = check_identity_180(&k1)
        .rel_error
        .max(check_identity_180(&k2).rel_error);
    Outcome {
        pass: worst < 1e-6 && disp < 1e-9,
        detail: format!(
            "max relative error of the two leak identities {worst:.2e} (< 1e-6); Im E consistency {disp:.2e} (< 1e-9)"
        ),
    }
}

fn pure_state_conservation() -> Outcome {
    let pot = PotentialSpec::default();
    let (k1, _) = first_two();
    let s = WaveState::pure(k1, &pot).unwrap();
    let traj = DomainTrajectory::linear(&s, &k1, 1.0, 0.3, 0.01, &QuadSpec::default()).unwrap();
    let report = conservation_report(&s, &traj).unwrap();
    let last = traj.last();
    Outcome {
        pass: report.max_drift < 1e-8,
        detail: format!(
            "max drift {:.2e} over t in [0, 0.3] (< 1e-8); L(0.3) = {:.4}",
            report.max_drift, last.half_width
        ),
    }
}

fn superposition_trajectory() -> Outcome {
    let target = 8.239924;
    let s = paper_pair();
    let traj = integrate_domain(
        &s,
        1.0,
        2.5,
        1e-3,
        DomainMode::PaperSingleEdge,
        &QuadSpec::default(),
    )
    .unwrap();
    let last = traj.last();
    let n = traj.samples.len();
    let tail = &traj.samples[3 * n / 4..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.speed), b.max(p.speed))
        });
    let variation = (hi - lo) / last.speed.abs();
    let off = (last.speed - target).abs() / target;
    Outcome {
        pass: last.half_width >= 10.0 && off < 0.01 && variation < 0.01,
        detail: format!(
            "L({:.1}) = {:.3}, final L' = {:.6} vs 2 Re K2 = {target} ({:.1}% off, need < 1%); slope variation over last quarter {:.2e}",
            last.t,
            last.half_width,
            last.speed,
            100.0 * off,
            variation
        ),
    }
}

fn speed_profile() -> Outcome {
    let target = 8.239924;
    let s = paper_pair();
    let negative = (0..=1000)
        .map(|i| -0.999 + 1.998 * i as f64 / 1000.0)
        .filter_map(|x| vbar(&s, x, 0.0).ok())
        .any(|v| v < 0.0);
    let (mut worst, mut at) = (0.0, 0.0);
    for i in 0..=3400 {
        let x = 6.0 + 0.01 * i as f64;
        let dev = (vbar(&s, x, 0.0).unwrap() - target).abs() / target;
        if dev > worst {
            worst = dev;
            at = x;
        }
    }
    Outcome {
        pass: negative && worst < 0.01,
        detail: format!(
            "negative inside the well: {negative}; max deviation from {target} for x in [6, 40] is {:.2}% at x = {at:.2} (need < 1%)",
            100.0 * worst
        ),
    }
}

fn two_edge_exact() -> Outcome {
    let pot = PotentialSpec::default();
    let roots = lowest_resonances(&pot, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let quad = QuadSpec::default();
    let mut worst: f64 = 0.0;
    let mut single_edge = Vec::new();
    let mut errors = Vec::new();
    for _ in 0..20 {
        let i = rng.gen_range(0..4);
        let j = (i + rng.gen_range(1..4)) % 4;
        let a = |rng: &mut ChaCha8Rng| {
            Complex64::from_polar(
                rng.gen_range(0.2..2.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        };
        let (a1, a2) = (a(&mut rng), a(&mut rng));
        let s = WaveState::superposition(&[(a1, roots[i]), (a2, roots[j])], &pot).unwrap();
        match integrate_domain(&s, 1.0, 0.5, 2.5e-4, DomainMode::TwoEdgeExact, &quad)
            .and_then(|t| conservation_report(&s, &t))
        {
            Ok(r) => worst = worst.max(r.max_drift),
            Err(e) => errors.push(e.to_string()),
        }
        let paper = integrate_domain(&s, 1.0, 0.5, 2.5e-4, DomainMode::PaperSingleEdge, &quad)
            .and_then(|t| conservation_report(&s, &t));
        if let Ok(r) = paper {
            single_edge.push(r.max_drift);
        }
    }
    let paper_worst = single_edge.iter().cloned().fold(0.0, f64::max);
    Outcome {
        pass: errors.is_empty() && worst < 1e-6,
        detail: format!(
            "20 random pairs, step 2.5e-4, max two-edge drift {worst:.2e} (< 1e-6), {} failures{}; single-edge drift up to {paper_worst:.2e} over {} runs (reported only)",
            errors.len(),
            errors.first().map(|e| format!(" ({e})")).unwrap_or_default(),
            single_edge.len()
        ),
    }
}

fn tdse_cross_validation() -> Outcome {
    let pot = PotentialSpec::with_depth(50.0).unwrap();
    let check = resonance_decay_check(&pot, &GridSpec::default(), DEEP_WELL_WINDOW).unwrap();
    let rel = check.relative_error();
    Outcome {
        pass: rel < 0.2 && check.total_drift < 1e-7,
        detail: format!(
            "V0 = 50, K = {:.5}: survival rate {:.3} vs 2|Im E| = {:.3} ({:.1}% off, < 20%); R^2 {:.5}; box norm drift {:.1e} (< 1e-7)",
            check.root.k,
            check.fit.rate,
            check.siegert_rate,
            100.0 * rel,
            check.fit.r_squared,
            check.total_drift
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let pot = PotentialSpec::default();
    let (k1, k2) = first_two();
    let one = c(1.0, 0.0);
    let s = paper_pair();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let l = rng.gen_range(1.0..30.0);
        let t = rng.gen_range(0.0..3.0);
        let a = rhs_two_state(one, one, &k1, &k2, l, t, pot.half_width).unwrap();
        let b = vbar(&s, l, t).unwrap();
        worst = worst.max((a - b).abs() / b.abs());
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("200 random (L, t), max relative difference {worst:.2e} (< 1e-10)"),
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "root reproduction",
            root_reproduction,
            Duration::from_secs(1),
        ),
        (
            "spectrum symmetry",
            spectrum_symmetry,
            Duration::from_secs(1),
        ),
        ("leak identities", leak_identities, Duration::from_secs(5)),
        (
            "pure-state conservation",
            pure_state_conservation,
            Duration::from_secs(10),
        ),
        (
            "superposition trajectory",
            superposition_trajectory,
            Duration::from_secs(30),
        ),
        ("speed profile", speed_profile, Duration::from_secs(1)),
        (
            "two-edge exact mode",
            two_edge_exact,
            Duration::from_secs(120),
        ),
        (
            "TDSE cross-validation",
            tdse_cross_validation,
            Duration::from_secs(120),
        ),
        (
            "oracle equivalence",
            oracle_equivalence,
            Duration::from_secs(1),
        ),
    ];
    let mut failed = 0;
    for (n, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            n + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
