use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use sea_core::experiments::{
    self, run_sweep, tune_gains, Assertion, RunStatus, SweepReport, SweepSpec, Tunable, TuneOptions,
};
use sea_core::model::{make_preset, parse_config, PresetParams};
use sea_core::passivity::{analyze_config, closed_form_condition, grid_check};
use sea_core::sim::{self, metrics, DEFAULT_BAND};
use sea_core::{impedance_tf, stiffness_tf, ParamPath, PresetId, SeaConfig, SimScenario};

use crate::output::OutDir;
use crate::svg::{line_plot, Plot};
use crate::{FreqArgs, Input, RunArgs, EXIT_ASSERTION, EXIT_NOT_PASSIVE};

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Apply `path=value` edits in order; each must name a known parameter and
/// leave a valid configuration.
pub fn apply_overrides(mut config: SeaConfig, overrides: &[String]) -> Result<SeaConfig> {
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| anyhow!("override `{o}` is not of the form path=value"))?;
        let path: ParamPath = k.trim().parse()?;
        let value: f64 = v
            .trim()
            .parse()
            .with_context(|| format!("override `{o}`: value is not a number"))?;
        if !value.is_finite() {
            bail!("override `{o}`: value must be finite");
        }
        config = config
            .with(path, value)
            .with_context(|| format!("override `{o}`"))?;
    }
    Ok(config)
}

fn read_config(path: &Path, overrides: &[String]) -> Result<SeaConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let config = parse_config(&text).with_context(|| format!("{}", path.display()))?;
    apply_overrides(config, overrides)
}

fn load(input: &Input) -> Result<SeaConfig> {
    read_config(&input.config, &input.overrides)
}

/// Log-spaced grid with exact endpoints.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// `start:stop:step` (inclusive) or `a,b,c`.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t
            .trim()
            .parse()
            .with_context(|| format!("`{t}` is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            bail!("`{t}` is not finite")
        }
    };
    if let [a, b, step] = s.split(':').collect::<Vec<_>>()[..] {
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step <= 0.0 || b < a {
            bail!("range `{s}` needs start <= stop and a positive step");
        }
        let n = ((b - a) / step + 1e-9).floor();
        if n > 1e6 {
            bail!("range `{s}` has too many points");
        }
        return Ok((0..=n as usize).map(|i| a + i as f64 * step).collect());
    }
    s.split(',').map(num).collect()
}

/// `path=lo:hi`.
pub fn parse_tunable(s: &str) -> Result<Tunable> {
    let (p, range) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("gain `{s}` is not of the form path=lo:hi"))?;
    let path: ParamPath = p.trim().parse()?;
    let (lo, hi) = range
        .split_once(':')
        .ok_or_else(|| anyhow!("gain `{s}`: range must be lo:hi"))?;
    let lo: f64 = lo.trim().parse().with_context(|| format!("gain `{s}`"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("gain `{s}`"))?;
    Ok(Tunable {
        path,
        lo,
        hi,
        log: lo > 0.0,
    })
}

pub fn analyze(input: &Input, out: Option<&Path>) -> Result<u8> {
    let config = load(input)?;
    let verdict = analyze_config(&config)?;
    let tf = stiffness_tf(&config);
    let report = json!({
        "label": config.label,
        "stiffness_tf": tf.to_string(),
        "impedance_tf": impedance_tf(&tf).to_string(),
        "verdict": verdict,
        "closed_form": closed_form_condition(&config),
        "grid_check": grid_check(&impedance_tf(&tf), 1e-2, 1e4, 400),
    });
    let text = to_json(&report);
    print!("{text}");
    if let Some(dir) = out {
        OutDir::create(dir)?.write("analysis.json", text.as_bytes())?;
    }
    Ok(if verdict.passive { 0 } else { EXIT_NOT_PASSIVE })
}

pub fn bode_csv(config: &SeaConfig, freq: &FreqArgs) -> Result<(String, Vec<(f64, f64)>)> {
    if !(freq.omega_min > 0.0 && freq.omega_min < freq.omega_max && freq.omega_max.is_finite()) {
        bail!("need 0 < omega-min < omega-max");
    }
    if freq.points < 2 {
        bail!("need at least 2 points");
    }
    let tf = stiffness_tf(config);
    let mut csv = String::from("omega,magnitude,phase_deg\n");
    let mut mag = Vec::with_capacity(freq.points);
    for w in log_grid(freq.omega_min, freq.omega_max, freq.points) {
        match tf.eval_jw(w) {
            Ok(z) => {
                csv.push_str(&format!("{w},{},{}\n", z.norm(), z.arg().to_degrees()));
                mag.push((w, z.norm()));
            }
            Err(_) => {
                csv.push_str(&format!("{w},,\n"));
                mag.push((w, f64::NAN));
            }
        }
    }
    Ok((csv, mag))
}

pub fn bode(input: &Input, freq: &FreqArgs, out: Option<&Path>, svg: bool) -> Result<u8> {
    if svg && out.is_none() {
        bail!("--svg needs --out");
    }
    let config = load(input)?;
    let (csv, mag) = bode_csv(&config, freq)?;
    match out {
        None => print!("{csv}"),
        Some(dir) => {
            let dir = OutDir::create(dir)?;
            let p = dir.write("bode.csv", csv.as_bytes())?;
            if svg {
                let plot = Plot {
                    title: "Rendered stiffness magnitude",
                    x_label: "omega (rad/s)",
                    y_label: "|K(jw)| (N/m)",
                    x_log: true,
                    y_log: true,
                };
                dir.write("bode.svg", line_plot(&plot, &mag).as_bytes())?;
            }
            println!("{} frequencies -> {}", freq.points, p.display());
        }
    }
    Ok(0)
}

fn fmt_opt(v: Option<f64>, unit: &str) -> String {
    v.map_or("n/a".into(), |x| format!("{x:.4} {unit}"))
}

pub fn simulate(input: &Input, run: &RunArgs, duration: f64, out: &Path, svg: bool) -> Result<u8> {
    let config = load(input)?;
    if run.step == 0.0 {
        bail!("--step (initial displacement) must be nonzero");
    }
    let sc = SimScenario::displaced_load(config, run.mass, run.step).with_timing(duration, run.dt);
    let traj = sim::simulate(&sc)?;
    let m = metrics(&traj, 0.0, DEFAULT_BAND)?;
    let dir = OutDir::create(out)?;
    let p = dir.write_with("trajectory.csv", |w| traj.write_csv(w))?;
    let report = json!({
        "load_mass": run.mass,
        "initial_displacement": run.step,
        "duration": duration,
        "dt": run.dt,
        "band": DEFAULT_BAND,
        "metrics": m,
    });
    dir.write("metrics.json", to_json(&report).as_bytes())?;
    if svg {
        let pts: Vec<(f64, f64)> = traj
            .times
            .iter()
            .zip(&traj.states)
            .step_by(10)
            .map(|(t, s)| (*t, s.x_l))
            .collect();
        let plot = Plot {
            title: "Load position",
            x_label: "t (s)",
            y_label: "x_L (m)",
            x_log: false,
            y_log: false,
        };
        dir.write("trajectory.svg", line_plot(&plot, &pts).as_bytes())?;
    }
    println!(
        "settling time {}, steady-state error {}, {} oscillations -> {}",
        fmt_opt(m.settling_time, "s"),
        fmt_opt(m.steady_state_error, "m"),
        m.oscillation_count,
        p.display()
    );
    Ok(0)
}

pub fn stiffness(input: &Input, mass: f64, forces: &[f64], out: &Path) -> Result<u8> {
    let config = load(input)?;
    let study = experiments::reproduce_stiffness_study(&config, mass, forces)?;
    let p = OutDir::create(out)?.write("stiffness.json", to_json(&study).as_bytes())?;
    println!(
        "rendered stiffness {:.6} N/m (static prediction {:.6} N/m, relative error {:.2e}) -> {}",
        study.mean,
        study.dc_prediction,
        study.relative_error,
        p.display()
    );
    Ok(0)
}

pub struct SweepArgs<'a> {
    pub param: &'a str,
    pub values: &'a str,
    pub masses: Vec<f64>,
    pub dt: f64,
    pub duration: f64,
    pub x0: f64,
}

fn settling_plot(report: &SweepReport, mass: f64, title: &str) -> String {
    let pts: Vec<(f64, f64)> = report
        .rows_for_mass(mass)
        .map(|r| (r.param, r.settling_time().unwrap_or(f64::NAN)))
        .collect();
    let x_label = report.spec.parameter.to_string();
    let plot = Plot {
        title,
        x_label: &x_label,
        y_label: "settling time (s)",
        x_log: false,
        y_log: false,
    };
    line_plot(&plot, &pts)
}

fn write_settling_plots(dir: &OutDir, report: &SweepReport, prefix: &str) -> Result<()> {
    let mut masses: Vec<f64> = report.rows.iter().map(|r| r.mass).collect();
    masses.dedup();
    for m in masses {
        let title = format!("{prefix} settling time, load {m} kg");
        dir.write(
            &format!("{prefix}_m{m}.svg"),
            settling_plot(report, m, &title).as_bytes(),
        )?;
    }
    Ok(())
}

pub fn sweep(input: &Input, args: &SweepArgs, out: &Path, svg: bool) -> Result<u8> {
    let base = load(input)?;
    let parameter: ParamPath = args.param.parse()?;
    let mut spec = SweepSpec::new(
        base,
        parameter,
        parse_values(args.values)?,
        args.masses.clone(),
    );
    spec.dt = args.dt;
    spec.duration = args.duration;
    spec.x0 = args.x0;
    let report = run_sweep(&spec)?;
    let dir = OutDir::create(out)?;
    let p = dir.write("sweep.csv", report.to_csv().as_bytes())?;
    dir.write("sweep.json", report.to_json().as_bytes())?;
    if svg {
        write_settling_plots(&dir, &report, "sweep")?;
    }
    let count = |s: RunStatus| report.rows.iter().filter(|r| r.status == s).count();
    println!(
        "{} runs: {} settled, {} did not settle, {} diverged, {} errors -> {}",
        report.rows.len(),
        count(RunStatus::Settled),
        count(RunStatus::DidNotSettle),
        count(RunStatus::Diverged),
        count(RunStatus::Error),
        p.display()
    );
    Ok(0)
}

pub fn tune(
    input: &Input,
    gains: &[String],
    points: usize,
    run: &RunArgs,
    duration: f64,
    out: &Path,
) -> Result<u8> {
    let template = load(input)?;
    let tunables = gains
        .iter()
        .map(|g| parse_tunable(g))
        .collect::<Result<Vec<_>>>()?;
    let opts = TuneOptions {
        points_per_axis: points,
        x0: run.step,
        duration,
        dt: run.dt,
        ..TuneOptions::default()
    };
    let result = tune_gains(&template, &tunables, run.mass, opts)?;
    let p = OutDir::create(out)?.write("tune.json", to_json(&result).as_bytes())?;
    let gains: Vec<String> = result
        .best_gains
        .iter()
        .map(|(k, v)| format!("{k}={v:.6}"))
        .collect();
    println!(
        "best {} settles in {:.4} s ({} candidates) -> {}",
        gains.join(" "),
        result.objective_value,
        result.search_trace.len(),
        p.display()
    );
    Ok(0)
}

fn assertion_summary(what: &str, assertions: &[Assertion]) -> (String, u8) {
    let failed: Vec<&str> = assertions
        .iter()
        .filter(|a| !a.passed)
        .map(|a| a.name.as_str())
        .collect();
    let passed = assertions.len() - failed.len();
    let mut line = format!("{what}: {passed}/{} assertions passed", assertions.len());
    if !failed.is_empty() {
        line.push_str(&format!(" (failed: {})", failed.join(", ")));
    }
    (line, if failed.is_empty() { 0 } else { EXIT_ASSERTION })
}

pub fn reproduce_fig3(points: usize, out: &Path) -> Result<u8> {
    let report = experiments::reproduce_fig3(points)?;
    let dir = OutDir::create(out)?;
    let controllers: Vec<_> = report
        .controllers
        .iter()
        .map(|c| {
            let runs: Vec<_> = c
                .evaluation
                .rows
                .iter()
                .map(|r| json!({"mass": r.mass, "status": r.status, "metrics": r.metrics}))
                .collect();
            json!({"name": c.name, "gains": c.tune.best_gains, "passivity_margin": c.tune.passivity_margin, "runs": runs})
        })
        .collect();
    let summary = json!({
        "all_passed": report.all_passed(),
        "assertions": report.assertions,
        "controllers": controllers,
        "points_per_axis": points,
    });
    let p = dir.write("fig3_summary.json", to_json(&summary).as_bytes())?;
    dir.write("fig3_report.json", to_json(&report).as_bytes())?;
    for c in &report.controllers {
        dir.write(
            &format!("fig3_{}.csv", c.name.to_lowercase()),
            c.evaluation.to_csv().as_bytes(),
        )?;
    }
    let (line, code) = assertion_summary("fig3", &report.assertions);
    println!("{line} -> {}", p.display());
    Ok(code)
}

pub fn reproduce_fig4(out: &Path, svg: bool) -> Result<u8> {
    let report = experiments::reproduce_fig4()?;
    let dir = OutDir::create(out)?;
    let thresholds: Vec<_> = report
        .lp_thresholds
        .iter()
        .map(|(m, kd)| json!({"mass": m, "kd": kd}))
        .collect();
    let summary = json!({
        "all_passed": report.all_passed(),
        "assertions": report.assertions,
        "lp_thresholds": thresholds,
    });
    let p = dir.write("fig4_summary.json", to_json(&summary).as_bytes())?;
    dir.write("fig4_report.json", to_json(&report).as_bytes())?;
    dir.write("fig4_lp.csv", report.lp.to_csv().as_bytes())?;
    dir.write("fig4_ours.csv", report.ours.to_csv().as_bytes())?;
    if svg {
        write_settling_plots(&dir, &report.lp, "fig4_lp")?;
        write_settling_plots(&dir, &report.ours, "fig4_ours")?;
    }
    let (line, code) = assertion_summary("fig4", &report.assertions);
    println!("{line} -> {}", p.display());
    Ok(code)
}

/// Damped transmission under actuator-side PD.
pub fn default_stiffness_config() -> SeaConfig {
    let p: PresetParams = [
        ("m", 1.0),
        ("b", 10.0),
        ("k1", 1000.0),
        ("b1", 50.0),
        ("kd", 1000.0),
        ("bd", 25.0),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), *v))
    .collect();
    make_preset(PresetId::CombinedApd, &p).expect("valid preset")
}

/// Largest relative gap between measured and static stiffness accepted by
/// the stiffness reproduction.
const STIFFNESS_REL_TOL: f64 = 1e-2;

pub fn reproduce_stiffness(
    config: Option<&Path>,
    overrides: &[String],
    mass: f64,
    forces: &[f64],
    out: &Path,
) -> Result<u8> {
    let config = match config {
        Some(p) => read_config(p, overrides)?,
        None => apply_overrides(default_stiffness_config(), overrides)?,
    };
    let study = experiments::reproduce_stiffness_study(&config, mass, forces)?;
    let assertions = [
        Assertion {
            name: "rendered_matches_static_stiffness".into(),
            passed: study.relative_error <= STIFFNESS_REL_TOL,
            detail: format!(
                "measured {:.6} N/m vs {:.6} N/m (relative error {:.2e})",
                study.mean, study.dc_prediction, study.relative_error
            ),
        },
        Assertion {
            name: "independent_of_force".into(),
            passed: study.stdev <= STIFFNESS_REL_TOL * study.mean.abs(),
            detail: format!("standard deviation {:.3e} N/m", study.stdev),
        },
    ];
    let summary = json!({
        "all_passed": assertions.iter().all(|a| a.passed),
        "assertions": assertions,
        "config": config,
        "load_mass": mass,
        "study": study,
    });
    let p = OutDir::create(out)?.write("stiffness_summary.json", to_json(&summary).as_bytes())?;
    let (line, code) = assertion_summary("stiffness", &assertions);
    println!("{line} -> {}", p.display());
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_ranges() {
        assert_eq!(
            parse_values("0:2000:500").unwrap(),
            [0.0, 500.0, 1000.0, 1500.0, 2000.0]
        );
        assert_eq!(parse_values("1, 2.5,3").unwrap(), [1.0, 2.5, 3.0]);
        assert_eq!(parse_values("0:0.3:0.1").unwrap().len(), 4);
        assert!(parse_values("5:1:1").is_err());
        assert!(parse_values("0:1:0").is_err());
        assert!(parse_values("a,b").is_err());
        assert!(parse_values("1,inf").is_err());
    }

    #[test]
    fn tunable_syntax() {
        let t = parse_tunable("ca.kp=1:1e4").unwrap();
        assert_eq!(
            (t.path, t.lo, t.hi, t.log),
            (ParamPath::CaKp, 1.0, 1e4, true)
        );
        assert!(!parse_tunable("cl.kp=0:10").unwrap().log);
        assert!(parse_tunable("ca.kp").is_err());
        assert!(parse_tunable("nope=1:2").is_err());
    }

    #[test]
    fn overrides_validate() {
        let c = default_stiffness_config();
        let c2 = apply_overrides(c.clone(), &["ca.kp=750".into(), "d1.c = 10".into()]).unwrap();
        assert_eq!(c2.ca.kp, 750.0);
        assert_eq!(c2.d1.c, 10.0);
        assert!(apply_overrides(c.clone(), &["ca.kp=-1".into()]).is_err());
        assert!(apply_overrides(c.clone(), &["ca.kq=1".into()]).is_err());
        assert!(apply_overrides(c.clone(), &["ca.kp".into()]).is_err());
        assert!(apply_overrides(c, &["ca.kp=nan".into()]).is_err());
    }

    #[test]
    fn grid_has_exact_endpoints() {
        let g = log_grid(1e-2, 1e4, 7);
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[6], 1e4);
        assert!((g[3] - 10.0).abs() < 1e-12);
    }
}
