use std::path::Path;

use serde::Serialize;
use spin7::closed_form_solutions::{
    classify, g2_limit_coefficients, metric_at, phase_field, trajectory_points, BoltData, Branch, Constant, SolutionParams,
};
use spin7::gradient_flow::{integrate_flow, FlowOptions, FlowState};
use spin7::harmonic_forms::{closed_form_u, l2_integral, norm_squared, Duality, HarmonicFamily};
use spin7::metric_families::{sample, Family, MetricFamily};
use spin7::report::{run_selected, AcceptanceReport, ReportOptions};

use crate::cli::{Cli, Command, FlowArgs, HarmonicArgs, PhaseArgs, VerifyTarget};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt17, sibling, write_text, Csv};

pub fn dispatch(cli: &Cli, out_dir: Option<&Path>) -> Result<(), CliError> {
    let t_end = match &cli.command {
        Command::Flow(f) => f.t_end,
        _ => None,
    };
    let cfg = RunConfig::resolve(&cli.common, t_end, out_dir)?;
    match &cli.command {
        Command::Flow(args) => flow(&cfg, args),
        Command::Classify => classify_cmd(&cfg),
        Command::Metric => metric(&cfg),
        Command::Verify { what } => verify(&cfg, *what),
        Command::Harmonic(args) => harmonic(&cfg, args),
        Command::PhasePortrait(args) => phase_portrait(&cfg, args, out_dir),
        Command::Report => report(&cfg, &(1..=12).collect::<Vec<u8>>()),
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn family_with_triad(cfg: &RunConfig) -> Result<MetricFamily, CliError> {
    let family = cfg.family.unwrap_or(Family::A8);
    if family == Family::G2xS1 {
        return usage("G2xS1 has no R₃ leg to flow; use A8, B8 or BryantSalamon");
    }
    Ok(MetricFamily::new(family, cfg.scale.unwrap_or(1.0)))
}

fn flow(cfg: &RunConfig, args: &FlowArgs) -> Result<(), CliError> {
    let s0 = match (args.a, args.b, args.c) {
        (Some(a), Some(b), Some(c)) => {
            if cfg.family.is_some() {
                return usage("give either --family or --a/--b/--c");
            }
            if ![a, b, c].iter().all(|x| x.is_finite() && *x != 0.0) {
                return usage(format!("initial data ({a}, {b}, {c}) must be finite and non-zero"));
            }
            FlowState { t: 0.0, a, b, c }
        }
        (None, None, None) => {
            let fam = family_with_triad(cfg)?;
            let r0 = cfg.r_min.unwrap_or(fam.bolt() + 0.5 * fam.scale);
            if !(r0 > fam.bolt()) {
                return usage(format!("--r-min must exceed the bolt radius {}", fam.bolt()));
            }
            let m = sample(&fam, r0)?;
            let [a, b, c] = m.triad.expect("families with an R₃ leg carry a triad").values();
            FlowState { t: 0.0, a, b, c }
        }
        _ => return usage("give all three of --a, --b, --c"),
    };
    let t_end = cfg.t_end.unwrap_or(10.0);
    let tr = integrate_flow(s0, t_end, &FlowOptions { variant: cfg.variant, ..FlowOptions::default() })?;
    let mut csv = Csv::create(cfg.out.as_deref(), &["t", "a", "b", "c", "ricci_residual", "el_residual", "TplusV"])?;
    for p in &tr.points {
        let s = p.state;
        csv.row(&[s.t, s.a, s.b, s.c, p.ricci_residual, p.el_residual, p.t_plus_v])?;
    }
    csv.finish()?;
    if let Some(d) = &tr.diagnostic {
        return Err(CliError::Numerical(format!("trajectory stopped at t = {}: {d}", tr.last().state.t)));
    }
    let worst = tr.max_ricci().max(tr.max_el()).max(tr.max_constraint());
    let nan = tr.points.iter().any(|p| p.ricci_residual.is_nan() || p.el_residual.is_nan() || p.t_plus_v.is_nan());
    if nan || worst >= cfg.tol {
        return Err(CliError::Numerical(format!("largest residual {worst:e} is not below --tol {:e}", cfg.tol)));
    }
    Ok(())
}

fn solution_params(cfg: &RunConfig) -> Result<SolutionParams, CliError> {
    let params = match (cfg.k, cfg.kappa) {
        (Some(k), None) => SolutionParams::k(k),
        (None, Some(kappa)) => SolutionParams::kappa(kappa),
        _ => return usage("give --k or --kappa"),
    };
    let params = params.with_f_norm(cfg.scale.unwrap_or(1.0));
    match cfg.family {
        None => Ok(params),
        Some(Family::A8) => Ok(params.with_branch(Branch::A8)),
        Some(Family::B8) => Ok(params.with_branch(Branch::B8)),
        Some(f) => usage(format!("--family {} does not select a branch of the general solution", f.name())),
    }
}

#[derive(Serialize)]
struct ClassifyOutput {
    branch: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    z0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bolt: Option<BoltData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptotic_circle_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostic: Option<String>,
}

fn classify_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let cls = classify(&solution_params(cfg)?)?;
    let out = ClassifyOutput {
        branch: cls.branch.name(),
        z0: cls.z0,
        y0: cls.y0,
        bolt: cls.bolt,
        asymptotic_circle_radius: cls.asymptotic_circle_radius(),
        diagnostic: cls.diagnostic.clone(),
    };
    write_json(cfg.out.as_deref(), &out)
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    s.push('\n');
    write_text(path, &s)
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn radial_range(cfg: &RunConfig, bolt: f64, scale: f64) -> Result<(f64, f64), CliError> {
    let lo = cfg.r_min.unwrap_or(bolt + 0.01 * scale);
    let hi = cfg.r_max.unwrap_or(bolt + 20.0 * scale);
    if !(lo > bolt) {
        return usage(format!("--r-min must exceed the bolt radius {bolt}"));
    }
    if !(hi > lo) {
        return usage(format!("empty radial range [{lo}, {hi}]"));
    }
    Ok((lo, hi))
}

fn metric(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n.unwrap_or(50);
    if cfg.k.is_some() || cfg.kappa.is_some() {
        return general_metric(cfg, n);
    }
    let fam = MetricFamily::new(cfg.family.unwrap_or(Family::A8), cfg.scale.unwrap_or(1.0));
    let (lo, hi) = radial_range(cfg, fam.bolt(), fam.scale)?;
    let mut csv = Csv::create(cfg.out.as_deref(), &["r", "g_rr", "coef_r12", "coef_r3", "coef_s4"])?;
    for r in linspace(lo, hi, n) {
        let m = sample(&fam, r)?;
        csv.row(&[m.r, m.g_rr, m.coef_r12, m.coef_r3, m.coef_s4])?;
    }
    csv.finish()
}

/// The general solution from just outside its bolt towards the asymptotic
/// end, in the offset `u` of its chart (`z = 1 − u` or `y = 1 − u`).
fn general_metric(cfg: &RunConfig, n: usize) -> Result<(), CliError> {
    let params = solution_params(cfg)?;
    let cls = classify(&params)?;
    let (coord, u0) = match cls.branch {
        Branch::B8Minus => ("z", 1.0 - cls.z0.expect("bolt position")),
        Branch::B8Plus => ("y", (1.0 - cls.y0.expect("bolt position")).min(2.0 - 1e-9)),
        Branch::G2Limit => ("z", 1.0),
        Branch::A8 | Branch::B8 => return usage("k = 0 has no z coordinate; sample with --family A8 or B8 instead"),
        Branch::Singular => return Err(CliError::Numerical(cls.diagnostic.unwrap_or_default())),
    };
    let mut csv = Csv::create(cfg.out.as_deref(), &["u", coord, "g_uu", "coef_r12", "coef_r3", "coef_s4"])?;
    for i in 0..n {
        let u = u0 * 10f64.powf(-8.0 * (i + 1) as f64 / n as f64);
        let m = match params.constant {
            Constant::K(k) if k.is_infinite() => g2_limit_coefficients(1.0 - u),
            _ => metric_at(&params, u)?,
        };
        csv.row(&[u, 1.0 - u, m.g, m.r12, m.r3, m.s4])?;
    }
    csv.finish()
}

fn verify(cfg: &RunConfig, what: VerifyTarget) -> Result<(), CliError> {
    let ids: &[u8] = match what {
        VerifyTarget::Superpotential => &[1],
        VerifyTarget::Ricci => &[2, 3],
        VerifyTarget::Holonomy => &[7],
        VerifyTarget::Cayley => &[8, 9],
    };
    report(cfg, ids)
}

fn report(cfg: &RunConfig, ids: &[u8]) -> Result<(), CliError> {
    let opts = ReportOptions { variant: cfg.variant, ..ReportOptions::default() };
    let rep = run_selected(&opts, ids);
    if cfg.json {
        write_json(cfg.out.as_deref(), &rep)?;
    } else {
        write_text(cfg.out.as_deref(), &report_text(&rep))?;
    }
    if rep.passed() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("failing criteria: {:?}", rep.failing())))
    }
}

fn report_text(rep: &AcceptanceReport) -> String {
    let mut s: String = rep.criteria.iter().map(|c| c.line() + "\n").collect();
    if let Some(c) = rep.measure_calibration {
        s.push_str(&format!("measure calibration constant: {}\n", fmt17(c)));
    }
    s
}

#[derive(Serialize)]
struct HarmonicOutput {
    family: &'static str,
    duality: &'static str,
    integral: f64,
    error_estimate: f64,
    quoted: String,
    relative_error: f64,
}

fn harmonic(cfg: &RunConfig, args: &HarmonicArgs) -> Result<(), CliError> {
    let family = match cfg.family.unwrap_or(Family::A8) {
        Family::A8 => HarmonicFamily::A8,
        Family::B8 => HarmonicFamily::B8,
        f => return usage(format!("harmonic forms are tabulated on A8 and B8, not {}", f.name())),
    };
    let duality = Duality::from_name(&args.duality).ok_or_else(|| CliError::Usage(format!("unknown duality {:?}", args.duality)))?;
    let rep = l2_integral(family, duality)?;
    let summary = HarmonicOutput {
        family: family.name(),
        duality: duality.name(),
        integral: rep.value,
        error_estimate: rep.error_estimate,
        quoted: format!("{}/{}", rep.quoted.0, rep.quoted.1),
        relative_error: rep.relative_error(),
    };
    if cfg.json {
        write_json(None, &summary)?;
    } else {
        write_text(
            None,
            &format!(
                "{} {}: integral {} (quoted {}, relative error {:e})\n",
                summary.family, summary.duality, fmt17(summary.integral), summary.quoted, summary.relative_error
            ),
        )?;
    }
    if let Some(path) = cfg.out.as_deref() {
        let bolt = family.bolt() as f64;
        let (lo, hi) = radial_range(cfg, bolt, 1.0)?;
        let mut csv = Csv::create(Some(path), &["r", "u1", "u2", "u3", "norm_squared"])?;
        for r in linspace(lo, hi, cfg.n.unwrap_or(200)) {
            let u = closed_form_u(family, duality, &r)?;
            csv.row(&[r, u.u1, u.u2, u.u3, norm_squared(&u)])?;
        }
        csv.finish()?;
    }
    if rep.relative_error() < cfg.tol.max(1e-6) {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("relative error {:e} against {}", rep.relative_error(), summary.quoted)))
    }
}

fn phase_portrait(cfg: &RunConfig, args: &PhaseArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let (z_lo, z_hi) = (args.z_min.unwrap_or(0.05), args.z_max.unwrap_or(3.0));
    let (v_lo, v_hi) = (args.v_min.unwrap_or(-6.0), args.v_max.unwrap_or(6.0));
    let (nz, nv) = (args.nz.unwrap_or(40), args.nv.unwrap_or(40));
    if !(z_lo < z_hi && v_lo < v_hi) || nz < 2 || nv < 2 {
        return usage("phase-portrait grid needs z-min < z-max, v-min < v-max and at least 2 points per axis");
    }
    let zs: Vec<f64> = linspace(z_lo, z_hi, nz).collect();
    if let Some(z) = zs.iter().find(|z| [-1.0, 0.0, 1.0].contains(*z)) {
        return usage(format!("grid point z = {z} lies on a fixed line of the field; shift the grid"));
    }
    let mut csv = Csv::create(cfg.out.as_deref(), &["z", "v", "dz_dtau", "dv_dtau"])?;
    for &z in &zs {
        for v in linspace(v_lo, v_hi, nv) {
            let (dz, dv) = phase_field(&z, &v);
            csv.row(&[z, v, dz, dv])?;
        }
    }
    csv.finish()?;

    let traj_path = match (&args.trajectories, &cfg.out) {
        (Some(p), _) => Some(match out_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.clone(),
        }),
        (None, Some(out)) => Some(sibling(out, "trajectories.csv")),
        (None, None) => None,
    };
    if let Some(path) = traj_path {
        let classes = [
            ("A8", SolutionParams::k(0.0).with_branch(Branch::A8)),
            ("B8", SolutionParams::k(0.0).with_branch(Branch::B8)),
            ("B8minus", SolutionParams::k(1.0)),
            ("B8plus", SolutionParams::kappa(0.0)),
        ];
        let mut csv = Csv::create(Some(&path), &["class", "z", "v", "dz_dtau", "dv_dtau"])?;
        for (name, params) in classes {
            for (z, v) in trajectory_points(&params, cfg.n.unwrap_or(40))? {
                let (dz, dv) = phase_field(&z, &v);
                csv.labelled_row(name, &[z, v, dz, dv])?;
            }
        }
        csv.finish()?;
    }
    Ok(())
}
