use siegert_core::expanding_domain::{conservation_report, integrate_domain, vbar, DomainMode};
use siegert_core::flux_identities::{
    check_identity_140, check_identity_170, check_identity_180, LeakReport,
};
use siegert_core::quadrature::QuadSpec;
use siegert_core::siegert_solver::{
    find_bound_states, lowest_resonances, scan_roots, MERGE_DISTANCE,
};
use siegert_core::tdse_oracle::{resonance_decay_check, GridSpec, DEEP_WELL_WINDOW};
use siegert_core::{Error, Parity, PotentialSpec, SiegertRoot, WaveState};

use crate::args::{Common, ExpandArgs, ModeArg, ParityArg, RootsArgs, VerifyArgs};
use crate::output::{fmt_num, Cell, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Check(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
            _ => CliError::Check(e.to_string()),
        }
    }
}

pub struct Report {
    pub table: Table,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
    pub passed: bool,
}

fn potential(common: &Common) -> Result<PotentialSpec, CliError> {
    if common.tol.is_nan() || common.tol <= 0.0 {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            common.tol
        )));
    }
    Ok(PotentialSpec::with_depth(common.v0)?)
}

fn parities(p: ParityArg) -> Vec<Parity> {
    match p {
        ParityArg::Even => vec![Parity::Even],
        ParityArg::Odd => vec![Parity::Odd],
        ParityArg::Both => vec![Parity::Even, Parity::Odd],
    }
}

fn root_row(r: &SiegertRoot) -> Vec<Cell> {
    vec![
        r.parity.as_str().into(),
        r.k.re.into(),
        r.k.im.into(),
        r.energy.re.into(),
        r.energy.im.into(),
        r.class.as_str().into(),
        r.residual.into(),
    ]
}

pub fn roots(a: &RootsArgs) -> Result<Report, CliError> {
    let pot = potential(&a.common)?;
    let wanted = parities(a.parity);
    let mut found: Vec<SiegertRoot> = Vec::new();
    for &p in &wanted {
        found.extend(scan_roots(&a.region, p, &pot, a.common.tol)?);
    }
    for b in find_bound_states(&pot, a.common.tol)? {
        let duplicate = found
            .iter()
            .any(|r| r.parity == b.parity && (r.k - b.k).norm() < MERGE_DISTANCE);
        if wanted.contains(&b.parity) && !duplicate {
            found.push(b);
        }
    }
    found.sort_by(|x, y| {
        x.parity
            .as_str()
            .cmp(y.parity.as_str())
            .then(x.k.re.total_cmp(&y.k.re))
            .then(x.k.im.total_cmp(&y.k.im))
    });
    let mut table = Table::new(
        "roots",
        &[
            "parity", "re_k", "im_k", "re_e", "im_e", "class", "residual",
        ],
    );
    table.summary.push(("v0", pot.depth.into()));
    for r in &found {
        table.push(root_row(r));
    }
    Ok(Report {
        notes: vec![format!("{} roots (V0 = {})", found.len(), pot.depth)],
        table,
        passed: true,
    })
}

fn expand_state(a: &ExpandArgs, pot: &PotentialSpec) -> Result<(WaveState, String), CliError> {
    match a.pure {
        Some(0) => Err(CliError::Usage("--pure counts from 1".into())),
        Some(n) => {
            let r = lowest_resonances(pot, n)?[n - 1];
            Ok((WaveState::pure(r, pot)?, format!("pure K = {}", r.k)))
        }
        None => {
            let r = lowest_resonances(pot, 2)?;
            let state = WaveState::superposition(&[(a.coeffs.0, r[0]), (a.coeffs.1, r[1])], pot)?;
            Ok((
                state,
                format!(
                    "a1 = {}, a2 = {}, K1 = {}, K2 = {}",
                    a.coeffs.0, a.coeffs.1, r[0].k, r[1].k
                ),
            ))
        }
    }
}

pub fn expand(a: &ExpandArgs) -> Result<Report, CliError> {
    let pot = potential(&a.common)?;
    let (state, label) = expand_state(a, &pot)?;
    let mut notes = vec![label];

    if a.vbar_profile {
        if a.points < 2 || a.x_max.is_nan() || a.x_max <= 0.0 {
            return Err(CliError::Usage(
                "--points must be >= 2 and --x-max > 0".into(),
            ));
        }
        let mut table = Table::new("vbar-profile", &["x", "vbar"]);
        table.summary.push(("t", a.time.into()));
        let mut skipped = 0;
        let mut min = f64::INFINITY;
        for i in 0..a.points {
            let x = -a.x_max + 2.0 * a.x_max * i as f64 / (a.points - 1) as f64;
            match vbar(&state, x, a.time) {
                Ok(v) => {
                    min = min.min(v);
                    table.push(vec![x.into(), v.into()]);
                }
                Err(Error::SingularNode { .. }) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
        notes.push(format!(
            "minimum v̄ = {}, {skipped} nodes skipped",
            fmt_num(min)
        ));
        return Ok(Report {
            table,
            notes,
            passed: true,
        });
    }

    let modes = match a.mode {
        ModeArg::Paper => vec![DomainMode::PaperSingleEdge],
        ModeArg::TwoEdge => vec![DomainMode::TwoEdgeExact],
        ModeArg::Both => vec![DomainMode::PaperSingleEdge, DomainMode::TwoEdgeExact],
    };
    let quad = QuadSpec::default();
    let mut table = Table::new("expand", &["mode", "t", "l", "ldot", "n", "drift"]);
    for mode in modes {
        let traj = integrate_domain(&state, a.l0, a.t_end, a.step, mode, &quad)?;
        let report = conservation_report(&state, &traj)?;
        for (s, b) in traj.samples.iter().zip(&report.samples) {
            table.push(vec![
                mode.label().into(),
                s.t.into(),
                s.half_width.into(),
                s.speed.into(),
                s.norm.into(),
                b.drift.into(),
            ]);
        }
        let last = traj.last();
        let n = traj.samples.len();
        let tail = &traj.samples[3 * n / 4..];
        let asymptote = tail.iter().map(|s| s.speed).sum::<f64>() / tail.len() as f64;
        let (drift_key, speed_key) = match mode {
            DomainMode::PaperSingleEdge => ("single_edge_max_drift", "single_edge_final_ldot"),
            DomainMode::TwoEdgeExact => ("two_edge_max_drift", "two_edge_final_ldot"),
        };
        table.summary.push((drift_key, report.max_drift.into()));
        table.summary.push((speed_key, last.speed.into()));
        notes.push(format!(
            "{}: max drift {}, L({}) = {}, final L' = {}, mean L' over last quarter {}",
            mode.label(),
            fmt_num(report.max_drift),
            fmt_num(last.t),
            fmt_num(last.half_width),
            fmt_num(last.speed),
            fmt_num(asymptote)
        ));
    }
    Ok(Report {
        table,
        notes,
        passed: true,
    })
}

const LEAK_TOL: f64 = 1e-6;
const DISPERSION_TOL: f64 = 1e-9;

fn leak_row(table: &mut Table, notes: &mut Vec<String>, state: &str, r: &LeakReport, pass: bool) {
    let l = r.half_width.map(Cell::from).unwrap_or_else(|| "".into());
    table.push(vec![
        r.identity.label().into(),
        state.into(),
        l,
        r.lhs.into(),
        r.rhs.into(),
        r.rel_error.into(),
        pass.into(),
    ]);
    notes.push(format!(
        "{} {} {}{} relative error {:.2e}",
        if pass { "PASS" } else { "FAIL" },
        r.identity.label(),
        state,
        r.half_width.map(|l| format!(" L={l}")).unwrap_or_default(),
        r.rel_error
    ));
}

pub fn verify(a: &VerifyArgs) -> Result<Report, CliError> {
    let pot = potential(&a.common)?;
    let quad = QuadSpec::with_rel_tol(1e-12);
    let r = lowest_resonances(&pot, 2)?;
    let (k1, k2) = (r[0], r[1]);
    let states = [
        ("K1", WaveState::pure(k1, &pot)?),
        ("K2", WaveState::pure(k2, &pot)?),
        (
            "K1+K2",
            WaveState::superposition(&[(a.coeffs.0, k1), (a.coeffs.1, k2)], &pot)?,
        ),
    ];
    let mut table = Table::new(
        "verify",
        &[
            "check",
            "state",
            "half_width",
            "lhs",
            "rhs",
            "rel_error",
            "pass",
        ],
    );
    let mut notes = Vec::new();
    let mut passed = true;

    for (name, s) in &states {
        for m in [2.0, 3.0, 5.0] {
            let l = m * pot.half_width;
            for report in [
                check_identity_140(s, l, 0.1, &quad)?,
                check_identity_170(s, l, &quad, 0.1, 1e-4)?,
            ] {
                let ok = report.rel_error < LEAK_TOL;
                passed &= ok;
                leak_row(&mut table, &mut notes, name, &report, ok);
            }
        }
    }

    let mut dispersion: Vec<(String, Result<SiegertRoot, Error>)> =
        vec![("K1".into(), Ok(k1)), ("K2".into(), Ok(k2))];
    if let Some(k) = a.inject_k {
        let parity = match a.parity {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
            ParityArg::Both => {
                return Err(CliError::Usage(
                    "--inject-k needs --parity even or odd".into(),
                ))
            }
        };
        dispersion.push((
            format!("injected {k}"),
            SiegertRoot::from_k(k, parity, &pot),
        ));
    }
    for (name, root) in dispersion {
        match root {
            Ok(root) => {
                let report = check_identity_180(&root);
                let is_root = root.residual <= a.common.tol;
                let ok = report.rel_error < DISPERSION_TOL && is_root;
                passed &= ok;
                leak_row(&mut table, &mut notes, &name, &report, ok);
                if !is_root {
                    notes.push(format!(
                        "  {name} is not an {} root: residual {:.2e}",
                        root.parity, root.residual
                    ));
                }
            }
            Err(e) => {
                passed = false;
                table.push(vec![
                    "im-energy-vs-dispersion".into(),
                    name.clone().into(),
                    "".into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    false.into(),
                ]);
                notes.push(format!("FAIL im-energy-vs-dispersion {name}: {e}"));
            }
        }
    }

    if a.tdse_deep_well {
        let deep = PotentialSpec::with_depth(50.0)?;
        let check = resonance_decay_check(&deep, &GridSpec::default(), DEEP_WELL_WINDOW)?;
        let rel = check.relative_error();
        let ok = rel < 0.2 && check.total_drift < 1e-7;
        passed &= ok;
        let name = format!("V0=50 K={}", check.root.k);
        table.push(vec![
            "tdse-decay-rate".into(),
            name.clone().into(),
            pot.half_width.into(),
            check.fit.rate.into(),
            check.siegert_rate.into(),
            rel.into(),
            ok.into(),
        ]);
        notes.push(format!(
            "{} tdse-decay-rate {name}: fitted {:.4} vs 2|Im E| {:.4}, relative error {:.2e}, R^2 {:.5}, box drift {:.1e}",
            if ok { "PASS" } else { "FAIL" },
            check.fit.rate,
            check.siegert_rate,
            rel,
            check.fit.r_squared,
            check.total_drift
        ));
        let flux_ok = check.flux.max_rel_error < 0.05;
        passed &= flux_ok;
        table.push(vec![
            "tdse-region-flux".into(),
            name.clone().into(),
            pot.half_width.into(),
            f64::NAN.into(),
            f64::NAN.into(),
            check.flux.max_rel_error.into(),
            flux_ok.into(),
        ]);
        notes.push(format!(
            "{} tdse-region-flux {name}: max relative error {:.2e}",
            if flux_ok { "PASS" } else { "FAIL" },
            check.flux.max_rel_error
        ));
    }

    table.summary.push(("passed", passed.into()));
    Ok(Report {
        table,
        notes,
        passed,
    })
}
