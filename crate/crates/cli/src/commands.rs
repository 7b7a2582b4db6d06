use std::fmt::Write as _;

use anyhow::{bail, Result};
use serde_json::{json, to_value};

use gconvex_core::{
    build_support, certify_corollary1, certify_theorem_a, classify_on_grid, gdd, gdd_fast, interpolate, scan_theorem2,
    uniform_grid, verify_definition, CertVerdict, ChebyshevSystem, ConvexityCertificate, Expression, FunctionSource,
    Interval, PointTuple, SupportResult, Verdict,
};

use crate::args::{Command, Common, MethodArg};
use crate::inputs;
use crate::report::{ColumnRow, Config, Report, Status, SystemInfo, DISCLAIMER};

/// Coefficients the cubic example must reproduce.
pub const EXAMPLE_COEFFICIENTS: [f64; 3] = [0.0, -1.0, 2.0];
pub const EXAMPLE_COEFFICIENT_TOL: f64 = 1e-6;

pub fn common(command: &Command) -> &Common {
    match command {
        Command::Classify { common, .. }
        | Command::Dd { common, .. }
        | Command::Certify { common, .. }
        | Command::Support { common, .. }
        | Command::ReproducePaperExample { common } => common,
    }
}

pub fn run(command: &Command) -> Result<Report> {
    let common = common(command);
    inputs::check_common(common)?;
    let mut config = Config::new(common);
    match command {
        Command::Classify { system, grid, .. } => {
            let system = inputs::system(system)?;
            let (grid, desc) = inputs::grid(grid, &system)?;
            set_inputs(&mut config, &system, None, Some((&grid, desc)));
            classify(config, &system, &grid)
        }
        Command::Dd {
            system,
            target,
            points,
            fast,
            ..
        } => {
            let system = inputs::system(system)?;
            let f = inputs::target(target)?;
            set_inputs(&mut config, &system, Some(&f), None);
            divided_difference(config, &system, &f, points, *fast)
        }
        Command::Certify {
            method,
            system,
            target,
            grid,
            knots,
            nodes,
            ..
        } => {
            let system = inputs::system(system)?;
            let f = inputs::target(target)?;
            let (grid, desc) = inputs::grid(grid, &system)?;
            set_inputs(&mut config, &system, Some(&f), Some((&grid, desc)));
            certify(config, *method, &system, &f, &grid, knots, nodes)
        }
        Command::Support {
            system,
            target,
            knots,
            grid,
            ..
        } => {
            let system = inputs::system(system)?;
            let f = inputs::target(target)?;
            let (grid, desc) = inputs::grid(grid, &system)?;
            set_inputs(&mut config, &system, Some(&f), Some((&grid, desc)));
            let res = build_support(
                &system,
                &f,
                &PointTuple::new(knots.clone())?,
                &grid,
                &config.sampling(),
                &config.tolerances(),
            )?;
            support_report("support", config, &system, &f, &grid, res, None)
        }
        Command::ReproducePaperExample { .. } => reproduce_example(config),
    }
}

fn set_inputs(
    config: &mut Config,
    system: &ChebyshevSystem,
    f: Option<&FunctionSource>,
    grid: Option<(&[f64], String)>,
) {
    config.system = Some(SystemInfo::from(system));
    config.f = f.map(|f| f.describe());
    if let Some((g, desc)) = grid {
        config.grid = Some(desc);
        config.grid_points = Some(g.len());
    }
}

fn classify(config: Config, system: &ChebyshevSystem, grid: &[f64]) -> Result<Report> {
    let c = classify_on_grid(system, grid, &config.sampling())?;
    let mut human = String::new();
    writeln!(human, "verdict: {:?} ({} tuples checked)", c.verdict, c.tuples_checked)?;
    if let Some(w) = &c.witness {
        writeln!(human, "witness: {:?}", w.points())?;
    }
    human.push_str(DISCLAIMER);
    let status = if c.verdict == Verdict::NonChebyshev {
        Status::Failed
    } else {
        Status::Ok
    };
    Ok(Report {
        command: "classify",
        config,
        status,
        result: to_value(&c)?,
        human,
        columns: None,
    })
}

fn divided_difference(
    config: Config,
    system: &ChebyshevSystem,
    f: &FunctionSource,
    points: &[f64],
    fast: bool,
) -> Result<Report> {
    let pts = PointTuple::new(points.to_vec())?;
    let d = if fast {
        gdd_fast(system, &pts, f)?
    } else {
        gdd(system, &pts, f)?
    };
    let mut human = String::new();
    writeln!(human, "[{:?}; f] = {}", points, d.value)?;
    writeln!(human, "conditioning: {:e}", d.conditioning)?;
    if d.ill_conditioned {
        writeln!(human, "warning: ill-conditioned, treat the value with care")?;
    }
    Ok(Report {
        command: "dd",
        config,
        status: Status::Ok,
        result: json!({ "method": if fast { "tableau" } else { "ratio" }, "divided_difference": d }),
        human,
        columns: None,
    })
}

fn certify(
    config: Config,
    method: MethodArg,
    system: &ChebyshevSystem,
    f: &FunctionSource,
    grid: &[f64],
    knots: &[f64],
    nodes: &[f64],
) -> Result<Report> {
    let sampling = config.sampling();
    let tol = config.tolerances();
    match method {
        MethodArg::TheoremA | MethodArg::Corollary1 => {
            let cert = if method == MethodArg::TheoremA {
                certify_theorem_a(system, f, grid, &sampling, &tol)?
            } else {
                certify_corollary1(system, f, grid, &sampling, &tol)?
            };
            Ok(certificate_report(config, cert, None))
        }
        MethodArg::Definition => {
            if nodes.is_empty() {
                bail!("--method definition needs --nodes");
            }
            let nodes = PointTuple::ordered(nodes.to_vec())?;
            let cert = verify_definition(system, f, &nodes, grid, &tol)?;
            let values = nodes
                .points()
                .iter()
                .map(|&x| f.eval(x))
                .collect::<Result<Vec<_>, _>>()?;
            let omega = interpolate(system, &nodes, &values)?;
            let rows = column_rows(system, f, grid, nodes.points(), |x| omega.eval(x))?;
            Ok(certificate_report(config, cert, Some(rows)))
        }
        MethodArg::Theorem2 => {
            if knots.is_empty() {
                bail!("--method theorem2 needs --knots");
            }
            let knots = PointTuple::ordered(knots.to_vec())?;
            let scan = scan_theorem2(system, f, &knots, grid, &tol)?;
            let mut human = String::new();
            writeln!(
                human,
                "scan of [knots, x; f] at {} points: {} decreases",
                scan.scan.len(),
                scan.violations.len()
            )?;
            for v in scan.violations.iter().take(5) {
                writeln!(
                    human,
                    "  decrease between x = {} ({}) and x = {} ({})",
                    v.x0, v.value0, v.x1, v.value1
                )?;
            }
            human.push_str(DISCLAIMER);
            Ok(Report {
                command: "certify",
                config,
                status: if scan.is_monotone() { Status::Ok } else { Status::Failed },
                result: json!({ "method": "theorem2", "report": scan }),
                human,
                columns: None,
            })
        }
    }
}

fn certificate_report(config: Config, cert: ConvexityCertificate, columns: Option<Vec<ColumnRow>>) -> Report {
    let mut human = String::new();
    let verdict = match cert.verdict {
        CertVerdict::CertifiedOnSample => "certified on sample",
        CertVerdict::Violated => "violated",
    };
    writeln!(human, "method: {:?}", cert.method).unwrap();
    writeln!(
        human,
        "verdict: {verdict} ({} checked, {} skipped, min {})",
        cert.tuples_checked, cert.skipped, cert.min_value
    )
    .unwrap();
    if let Some(w) = &cert.witness {
        writeln!(
            human,
            "witness: {:?} value {} tolerance {:e}",
            w.points.points(),
            w.quantity,
            w.tolerance
        )
        .unwrap();
    }
    if cert.linear_interpolation {
        writeln!(human, "warning: f is a linearly interpolated table").unwrap();
    }
    human.push_str(DISCLAIMER);
    Report {
        command: "certify",
        config,
        status: match cert.verdict {
            CertVerdict::CertifiedOnSample => Status::Ok,
            CertVerdict::Violated => Status::Failed,
        },
        result: to_value(&cert).expect("certificate serializes"),
        human,
        columns,
    }
}

/// Grid points inside the interval with `f`, `ω` and the 1-based segment cut out by `cuts`.
fn column_rows(
    system: &ChebyshevSystem,
    f: &FunctionSource,
    grid: &[f64],
    cuts: &[f64],
    omega: impl Fn(f64) -> gconvex_core::Result<f64>,
) -> Result<Vec<ColumnRow>> {
    grid.iter()
        .filter(|&&x| system.interval().contains(x))
        .map(|&x| {
            Ok(ColumnRow {
                x,
                f: f.eval(x)?,
                omega: omega(x)?,
                segment: cuts.partition_point(|&k| k < x) + 1,
            })
        })
        .collect()
}

fn support_report(
    command: &'static str,
    config: Config,
    system: &ChebyshevSystem,
    f: &FunctionSource,
    grid: &[f64],
    res: SupportResult,
    self_check: Option<(String, bool)>,
) -> Result<Report> {
    let mut human = String::new();
    writeln!(human, "knots: {:?}", res.knots.points())?;
    writeln!(
        human,
        "c_n = {} (converged: {}, monotone: {}, {} steps)",
        res.c_n.estimate,
        res.c_n.converged,
        res.c_n.monotone_ok,
        res.c_n.h_sequence.len()
    )?;
    writeln!(human, "coefficients:")?;
    for (b, c) in system.basis().iter().zip(res.omega.coefficients()) {
        writeln!(human, "  {c:>24}  {b}")?;
    }
    writeln!(human, "sign pattern of f - omega:")?;
    for seg in &res.pattern.segments {
        writeln!(
            human,
            "  I{} [{}, {}] {:?}: {} points, {} violations",
            seg.index,
            seg.lo,
            seg.hi,
            seg.required,
            seg.points_checked,
            seg.violations.len()
        )?;
    }
    writeln!(human, "excluded near knots: {}", res.pattern.excluded)?;
    if res.linear_interpolation {
        writeln!(human, "warning: f is a linearly interpolated table")?;
    }
    let checks_ok = self_check.as_ref().is_none_or(|c| c.1);
    if let Some((notes, _)) = &self_check {
        human.push_str(notes);
    }
    human.push_str(DISCLAIMER);
    let rows = column_rows(system, f, grid, res.knots.points(), |x| res.omega.eval(x))?;
    let status = if res.pattern.overall && checks_ok {
        Status::Ok
    } else {
        Status::Failed
    };
    Ok(Report {
        command,
        config,
        status,
        result: to_value(&res)?,
        human,
        columns: Some(rows),
    })
}

fn reproduce_example(mut config: Config) -> Result<Report> {
    let system = ChebyshevSystem::monomial(3, Interval::real_line())?;
    let f = FunctionSource::expression(Expression::Monomial(3));
    let knots = PointTuple::ordered(vec![0.0, 1.0])?;
    let grid = uniform_grid(-2.0, 3.0, 100);
    set_inputs(&mut config, &system, Some(&f), Some((&grid, "-2:3:100".into())));
    let res = build_support(&system, &f, &knots, &grid, &config.sampling(), &config.tolerances())?;

    let err = res
        .omega
        .coefficients()
        .iter()
        .zip(EXAMPLE_COEFFICIENTS)
        .map(|(c, want)| (c - want).abs())
        .fold(0.0, f64::max);
    let coefficients_ok = err <= EXAMPLE_COEFFICIENT_TOL;
    let limit_ok = res.c_n.converged && res.c_n.monotone_ok;
    let pattern_ok = res.pattern.overall;
    let pass = coefficients_ok && limit_ok && pattern_ok;
    let mut extra = String::new();
    writeln!(
        extra,
        "expected coefficients {:?}, max error {:e}",
        EXAMPLE_COEFFICIENTS, err
    )?;
    writeln!(extra, "self-check: {}", if pass { "PASS" } else { "FAIL" })?;

    let mut report = support_report(
        "reproduce-paper-example",
        config,
        &system,
        &f,
        &grid,
        res,
        Some((extra, coefficients_ok && limit_ok)),
    )?;
    report.result = json!({
        "support": report.result,
        "expected_coefficients": EXAMPLE_COEFFICIENTS,
        "max_coefficient_error": err,
        "checks": {
            "coefficients": coefficients_ok,
            "limit": limit_ok,
            "sign_pattern": pattern_ok,
        },
        "self_check": pass,
    });
    Ok(report)
}
