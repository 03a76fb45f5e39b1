//! Command execution and report emission.

use crate::{Cli, Command, EXIT_CHECK_FAILED, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE};
use euler_primitive::euler_integral::{
    coarea_check, euler_primitive_direct, euler_primitive_integral, kac_rice_1d, Profile1D, QuadratureSpec,
};
use euler_primitive::fields::{field_from_descriptor, Descriptor, Field, TestFunction};
use euler_primitive::moments::{moment_check, MomentReport, ShotWindow};
use euler_primitive::seed::derive_seed;
use euler_primitive::shotnoise::{
    empirical_cf, mc_gamma_at_origin, sample_germs, stationary_limit_density, BesselQuadrature, CfQuadrature,
    CharacteristicFunction, ImproperSpec, KernelModel,
};
use euler_primitive::topology::{
    euler_char_bicov_grid, euler_char_cubical, euler_char_morse, find_critical_points, CriticalPointConfig,
    EcMethod, GridSpec, SampledGrid,
};
use euler_primitive::validation::run_validation;
use euler_primitive::Error;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;

/// A failure, split by exit status.
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Parse(_) => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

struct Outcome {
    result: Value,
    csv: String,
    passed: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    version: &'static str,
    command: &'a str,
    config: Value,
    passed: bool,
    error: Option<String>,
    result: Value,
}

fn list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| Failure::Usage(format!("bad {what} `{s}`"))))
        .collect()
}

fn field(text: &str) -> Result<Field, Failure> {
    Ok(field_from_descriptor(&Descriptor::parse(text)?)?)
}

fn ec(a: &crate::EcArgs) -> Result<Outcome, Failure> {
    let f = field(&a.field)?;
    let levels: Vec<f64> = list(&a.level, "level")?;
    let methods: Vec<EcMethod> = if a.method == "all" {
        vec![EcMethod::Cubical, EcMethod::Bicov, EcMethod::Morse]
    } else {
        vec![a.method.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?]
    };
    let bbox = f.bbox();
    let grid = if methods.iter().any(|m| *m != EcMethod::Morse) {
        Some(SampledGrid::sample(f.as_ref(), GridSpec::covering(&bbox, bbox.center(), a.spacing)?))
    } else {
        None
    };
    let points = if methods.contains(&EcMethod::Morse) {
        find_critical_points(f.as_ref(), &bbox, &CriticalPointConfig::default())?
    } else {
        Vec::new()
    };
    let mut rows = Vec::new();
    let mut csv = String::from("level,method,euler\n");
    let mut agree = true;
    for &u in &levels {
        let mut counts = serde_json::Map::new();
        let mut seen = Vec::new();
        for m in &methods {
            let chi = match m {
                EcMethod::Morse => euler_char_morse(&points, u, 1e-9)?,
                EcMethod::Cubical => euler_char_cubical(&grid.as_ref().expect("grid").threshold(u)?),
                EcMethod::Bicov => euler_char_bicov_grid(&grid.as_ref().expect("grid").threshold(u)?),
            };
            seen.push(chi);
            counts.insert(m.to_string(), json!(chi));
            let _ = writeln!(csv, "{u},{m},{chi}");
        }
        let level_agrees = seen.windows(2).all(|w| w[0] == w[1]);
        agree &= level_agrees;
        rows.push(json!({ "level": u, "euler": counts, "agree": level_agrees }));
    }
    Ok(Outcome { result: json!({ "levels": rows, "methods_agree": agree }), csv, passed: agree })
}

fn primitive(a: &crate::PrimitiveArgs) -> Result<Outcome, Failure> {
    let f = field(&a.field)?;
    let h = TestFunction::parse(&a.testfn)?;
    let method: EcMethod = a.method.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let q = QuadratureSpec {
        spatial_resolution: a.resolution,
        level_count: a.levels,
        ec_resolution: a.ec_resolution,
        ..QuadratureSpec::default()
    };
    q.validate()?;
    let i = euler_primitive_integral(f.as_ref(), &h, &q)?;
    let d = euler_primitive_direct(f.as_ref(), &h, &q, method)?;
    let gap = (i.value - d.value).norm();
    let csv = format!(
        "field,testfn,i_f_re,i_f_im,i_f_error,chi,chi_error,gap\n\"{}\",{},{},{},{},{},{},{}\n",
        a.field, a.testfn, i.value.re, i.value.im, i.error, d.value, d.error, gap
    );
    Ok(Outcome {
        result: json!({
            "i_f": { "re": i.value.re, "im": i.value.im, "error": i.error },
            "chi": { "value": d.value, "error": d.error, "method": method.to_string() },
            "gap": gap,
        }),
        csv,
        passed: true,
    })
}

fn kacrice(a: &crate::KacRiceArgs) -> Result<Outcome, Failure> {
    let profile = match a.profile.as_str() {
        "tent" => Profile1D::Tent,
        "gaussian" => Profile1D::Gaussian { amplitude: 1.0, width: 1.0 },
        "two_gaussians" => Profile1D::TwoGaussians { separation: 3.0 },
        other => return Err(Failure::Usage(format!("unknown profile `{other}` (tent, gaussian, two_gaussians)"))),
    };
    let h = TestFunction::parse(&a.testfn)?;
    let (lhs, rhs) = kac_rice_1d(&profile, &h, a.levels)?;
    let csv = format!("profile,testfn,lhs,rhs,ratio\n{},{},{lhs},{rhs},{}\n", a.profile, a.testfn, rhs / lhs);
    Ok(Outcome { result: json!({ "lhs": lhs, "rhs": rhs, "ratio": rhs / lhs }), csv, passed: true })
}

fn coarea(a: &crate::CoareaArgs) -> Result<Outcome, Failure> {
    let f = field(&a.field)?;
    let h = TestFunction::parse(&a.testfn)?;
    let q = QuadratureSpec { spatial_resolution: a.resolution, level_count: a.levels, ..QuadratureSpec::default() };
    let (lhs, rhs) = coarea_check(f.as_ref(), &h, &q)?;
    let rel = (lhs - rhs).abs() / rhs.abs();
    let csv = format!("field,testfn,lhs,rhs,rel_gap\n\"{}\",{},{lhs},{rhs},{rel}\n", a.field, a.testfn);
    Ok(Outcome { result: json!({ "lhs": lhs, "rhs": rhs, "rel_gap": rel }), csv, passed: true })
}

fn shotnoise(a: &crate::ShotnoiseArgs, seed: u64) -> Result<Outcome, Failure> {
    let model = KernelModel::named(&a.model)?;
    let ts: Vec<f64> = list(&a.t, "frequency")?;
    let radius = a.window_radius.unwrap_or(5.0 * model.max_truncation_radius());
    if let Some(path) = &a.germs_out {
        let sample = sample_germs(radius, a.intensity, &model, derive_seed(seed, 0))?;
        std::fs::write(path, sample.to_text()).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))?;
    }
    let cf = CharacteristicFunction::new(&model, a.intensity, &CfQuadrature::default())?;
    let mut rows = Vec::new();
    let mut csv = String::from(
        "t,psi_re,psi_im,cf_re,cf_im,cf_stderr,gamma_re,gamma_im,gamma_stderr,limit_re,limit_im,limit_error\n",
    );
    for (k, &t) in ts.iter().enumerate() {
        let p = cf.psi(1, t, [0.0, 0.0], 0.0)?;
        let e = empirical_cf(&model, radius, a.intensity, t, a.reps, derive_seed(seed, 2 * k as u64))?;
        let g = mc_gamma_at_origin(t, &model, radius, a.intensity, a.reps, derive_seed(seed, 2 * k as u64 + 1))?;
        let limit = if a.stationary {
            Some(stationary_limit_density(t, &model, a.intensity, &BesselQuadrature::default(), &ImproperSpec::default())?)
        } else {
            None
        };
        let (lr, li, le) = limit.map_or((f64::NAN, f64::NAN, f64::NAN), |l| (l.value.re, l.value.im, l.error));
        let _ = writeln!(
            csv,
            "{t},{},{},{},{},{},{},{},{},{lr},{li},{le}",
            p.re, p.im, e.mean.re, e.mean.im, e.stderr, g.mean.re, g.mean.im, g.stderr
        );
        rows.push(json!({
            "t": t,
            "psi": { "re": p.re, "im": p.im },
            "empirical_cf": e,
            "mc_gamma": g,
            "stationary": limit,
        }));
    }
    Ok(Outcome { result: json!({ "window_radius": radius, "rows": rows }), csv, passed: true })
}

fn moments(a: &crate::MomentsArgs, seed: u64) -> Result<Outcome, Failure> {
    let h = TestFunction::parse(&a.testfn)?;
    let qs: Vec<u32> = list(&a.q, "moment order")?;
    let pairs: Vec<(u32, f64)> = qs.iter().map(|&q| (q, a.p)).collect();
    let window = ShotWindow { radius: a.window_radius, intensity: a.intensity, resolution: a.resolution };
    let reports = moment_check(&a.model, &h, &pairs, &window, &QuadratureSpec::default(), a.reps, seed)?;
    let mut csv = format!("{}\n", MomentReport::CSV_HEADER);
    for r in &reports {
        let _ = writeln!(csv, "{}", r.csv_row());
    }
    let passed = reports.iter().all(|r| r.holds);
    Ok(Outcome { result: json!({ "reports": reports }), csv, passed })
}

fn validate(a: &crate::ValidateArgs, seed: u64) -> Result<Outcome, Failure> {
    let ids: Vec<u32> = match &a.only {
        Some(s) => list(s, "criterion")?,
        None => Vec::new(),
    };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > euler_primitive::validation::CRITERION_COUNT) {
        return Err(Failure::Usage(format!("no criterion {bad}")));
    }
    let report = run_validation(seed, &ids);
    let mut csv = String::from("id,name,passed,tolerance,wall_time_ms\n");
    for c in &report.checks {
        let _ = writeln!(csv, "{},{},{},{},{}", c.id, c.name, c.passed, c.tolerance, c.wall_time_ms);
        eprintln!("[{}] {:>2} {} ({} ms)", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.wall_time_ms);
    }
    let passed = report.summary.all_passed;
    Ok(Outcome { result: serde_json::to_value(&report).map_err(|e| Failure::Internal(e.to_string()))?, csv, passed })
}

fn resolved_config(cli: &Cli) -> Value {
    json!({
        "seed": cli.seed,
        "workers": cli.workers.unwrap_or_else(rayon::current_num_threads),
        "command": cli.command,
    })
}

/// Runs the command, writes the report and returns the exit status.
pub fn execute(cli: &Cli) -> u8 {
    let seed = cli.seed;
    let run = match &cli.command {
        Command::Ec(a) => ec(a),
        Command::Primitive(a) => primitive(a),
        Command::Kacrice(a) => kacrice(a),
        Command::Coarea(a) => coarea(a),
        Command::Shotnoise(a) => shotnoise(a, seed),
        Command::Moments(a) => moments(a, seed),
        Command::Validate(a) => validate(a, seed),
    };
    let (report, code, csv) = match run {
        Ok(o) => {
            let code = if o.passed { EXIT_OK } else { EXIT_CHECK_FAILED };
            (Report { version: env!("CARGO_PKG_VERSION"), command: cli.command.name(), config: resolved_config(cli), passed: o.passed, error: None, result: o.result }, code, Some(o.csv))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            (Report { version: env!("CARGO_PKG_VERSION"), command: cli.command.name(), config: resolved_config(cli), passed: false, error: Some(msg), result: Value::Null }, EXIT_INTERNAL, None)
        }
    };
    let text = match serde_json::to_string_pretty(&report) {
        Ok(t) => t + "\n",
        Err(e) => {
            eprintln!("error: report serialization: {e}");
            return EXIT_INTERNAL;
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    let written = written.and_then(|_| match (&cli.csv, csv) {
        (Some(path), Some(table)) => std::fs::write(path, table).map_err(|e| format!("{}: {e}", path.display())),
        _ => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error: cannot write output {e}");
        return EXIT_INTERNAL;
    }
    code
}
