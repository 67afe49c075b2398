use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use milnor_core::config::Settings;
use milnor_core::germ::{builtin_germ, GermSpec};
use milnor_core::harness::{self, VerifyReport};
use milnor_core::path::Path;
use milnor_core::section::{build_section_s1_with, CrossSection};
use milnor_core::sphere_geom::SpherePoint;
use milnor_core::sphere_planner;
use milnor_core::taskplan::{end_residual, plan_task};
use milnor_core::trace::{export_trace, TraceFile};
use milnor_core::transport::{circle_arc, horizontal_lift};
use milnor_core::tube::TubePoint;

#[derive(Parser)]
#[command(name = "milnor", version, about = "Sphere and Milnor-tube motion planners")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Global seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Samples in emitted traces.
    #[arg(long, global = true, default_value_t = 256)]
    samples: usize,
    /// Trace destination (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// JSON settings overriding radii, tolerances and step counts.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Custom germ document used instead of `--germ`.
    #[arg(long, global = true)]
    germ_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Plan on the unit sphere Sᵐ.
    PlanSphere {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// Plan a task (a, A) in the Milnor tube.
    PlanTask {
        #[arg(long)]
        germ: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Build the cross-section over the base circle.
    CrossSection {
        #[arg(long)]
        germ: Option<String>,
    },
    /// Lift a base loop or arc horizontally.
    Lift {
        #[arg(long)]
        germ: Option<String>,
        /// Loop the base circle once from the angle of f(start).
        #[arg(long = "loop", conflicts_with = "arc")]
        full_loop: bool,
        /// `phi0,sweep` in radians.
        #[arg(long, allow_hyphen_values = true)]
        arc: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
    },
    /// Run verification suites; exit 0 iff all pass.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum Suite {
    Sphere {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: Option<usize>,
    },
    Tube {
        #[arg(long)]
        germ: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    Transport {
        #[arg(long)]
        germ: Option<String>,
    },
    Task {
        #[arg(long)]
        germ: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    Section {
        #[arg(long)]
        germ: Option<String>,
        /// Shift every section value by this amount along x1.
        #[arg(long)]
        perturb: Option<f64>,
    },
    All,
}

fn parse_vec(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().with_context(|| format!("bad number `{c}`")))
        .collect()
}

struct Ctx {
    common: Common,
    settings: Settings,
}

impl Ctx {
    fn germ(&self, name: Option<&str>) -> anyhow::Result<GermSpec> {
        let base = match (&self.common.germ_file, name) {
            (Some(file), _) => {
                let text = std::fs::read_to_string(file)
                    .with_context(|| format!("reading {}", file.display()))?;
                GermSpec::from_json(&text)?
            }
            (None, Some(n)) => builtin_germ(n)?,
            (None, None) => bail!("either --germ or --germ-file is required"),
        };
        Ok(self.settings.apply(&base)?)
    }

    fn emit_trace(&self, trace: TraceFile) -> anyhow::Result<()> {
        let mut w: Box<dyn Write> = match &self.common.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        };
        match self.common.format {
            Format::Csv => trace.write_csv(&mut w)?,
            Format::Json => {
                trace.write_json(&mut w)?;
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reports go to stdout when the trace went to a file, else stderr.
    fn emit_report(&self, value: &serde_json::Value) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        if self.common.out.is_some() {
            println!("{text}");
        } else {
            eprintln!("{text}");
        }
        Ok(())
    }
}

fn print_reports(reports: &[VerifyReport], pass: bool) -> anyhow::Result<bool> {
    let v = if reports.len() == 1 {
        serde_json::to_value(&reports[0])?
    } else {
        json!({ "reports": reports, "pass": pass })
    };
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(pass)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut settings = match &cli.common.config {
        Some(p) => Settings::from_json(
            &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => Settings::default(),
    };
    if let Some(s) = cli.common.seed {
        settings.seed = s;
    }
    let ctx = Ctx {
        common: cli.common,
        settings,
    };
    let samples = ctx.common.samples;

    match cli.cmd {
        Cmd::PlanSphere { m, from, to } => {
            let a = SpherePoint::new(parse_vec(&from)?)?;
            let b = SpherePoint::new(parse_vec(&to)?)?;
            if a.m() != m || b.m() != m {
                bail!("points must lie on S^{m} (length {})", m + 1);
            }
            let res = sphere_planner::plan(&a, &b)?;
            let trace = export_trace(&res.path, samples, None)?
                .with_meta("planner", "sphere")
                .with_meta("m", m)
                .with_meta("region", res.region);
            ctx.emit_trace(trace)?;
            ctx.emit_report(&json!({ "region": res.region, "margin": res.margin }))?;
            Ok(true)
        }
        Cmd::PlanTask { germ, start, target } => {
            let g = ctx.germ(germ.as_deref())?;
            let a = TubePoint::new(&g, parse_vec(&start)?)?;
            let target = parse_vec(&target)?;
            let plan = plan_task(&g, &a, &target, ctx.settings.lift_steps)?;
            let res = end_residual(&g, &plan, &target);
            let trace = export_trace(&plan.path.to_path(), samples, Some(&g.map))?
                .with_meta("germ", &g.name)
                .with_meta("region", plan.region);
            ctx.emit_trace(trace)?;
            ctx.emit_report(&json!({
                "region": plan.region,
                "margin": plan.margin,
                "residuals": {
                    "end": res,
                    "level": plan.report.max_level_residual,
                    "ball_excess": plan.report.max_ball_excess,
                },
            }))?;
            Ok(res <= ctx.settings.task_end_tol)
        }
        Cmd::CrossSection { germ } => {
            let g = ctx.germ(germ.as_deref())?;
            let s = build_section_s1_with(&g, ctx.settings.seed, ctx.settings.lift_steps)?;
            let count = ctx.settings.section_samples.max(2);
            let mut rows = Vec::with_capacity(count + 1);
            let mut worst: f64 = 0.0;
            for k in 0..=count {
                let theta = TAU * k as f64 / count as f64;
                let x = s.eval_angle(theta)?;
                let fx = g.map.eval(&x)?;
                let b = [g.delta * theta.cos(), g.delta * theta.sin()];
                worst = worst.max(((fx[0] - b[0]).powi(2) + (fx[1] - b[1]).powi(2)).sqrt());
                let mut row = vec![k as f64 / count as f64];
                row.extend_from_slice(&x);
                row.extend(fx);
                rows.push(row);
            }
            let mut columns = vec!["t".to_string()];
            columns.extend((1..=g.n()).map(|i| format!("x{i}")));
            columns.extend((1..=g.p()).map(|i| format!("f{i}")));
            let trace = TraceFile {
                meta: Default::default(),
                columns,
                rows,
            }
            .with_meta("germ", &g.name)
            .with_meta("section", "s1");
            ctx.emit_trace(trace)?;
            let check = milnor_core::section::verify_section(&s, ctx.settings.section_samples)?;
            ctx.emit_report(&json!({ "max_residual": worst, "check": check }))?;
            Ok(check.max_residual <= ctx.settings.section_residual_tol
                && check.closure_defect <= ctx.settings.section_closure_tol)
        }
        Cmd::Lift {
            germ,
            full_loop,
            arc,
            start,
        } => {
            let g = ctx.germ(germ.as_deref())?;
            if g.p() != 2 {
                bail!("lift supports base circles only (p = 2)");
            }
            let x0 = TubePoint::new(&g, parse_vec(&start)?)?;
            let phi0 = x0.fx[1].atan2(x0.fx[0]);
            let base: Path = match (full_loop, arc) {
                (true, _) => circle_arc(g.delta, phi0, TAU),
                (false, Some(spec)) => {
                    let v = parse_vec(&spec)?;
                    if v.len() != 2 {
                        bail!("--arc expects `phi0,sweep`");
                    }
                    circle_arc(g.delta, v[0], v[1])
                }
                (false, None) => bail!("one of --loop or --arc is required"),
            };
            let (path, report) = horizontal_lift(&g, &base, &x0, ctx.settings.lift_steps)?;
            let trace = export_trace(&path.to_path(), samples, Some(&g.map))?.with_meta("germ", &g.name);
            ctx.emit_trace(trace)?;
            ctx.emit_report(&serde_json::to_value(&report)?)?;
            Ok(true)
        }
        Cmd::Verify { suite } => {
            let s = &ctx.settings;
            let report = match suite {
                Suite::Sphere { m, trials } => {
                    harness::verify_sphere(m, trials.unwrap_or(s.sphere_trials), s.seed, s.path_samples)
                }
                Suite::Tube { germ, trials } => {
                    harness::verify_tube(&ctx.germ(germ.as_deref())?, trials.unwrap_or(s.tube_trials), s.seed)
                }
                Suite::Transport { germ } => {
                    harness::verify_transport(&ctx.germ(germ.as_deref())?, s.lift_steps, s.seed)
                }
                Suite::Task { germ, trials } => {
                    harness::verify_task(&ctx.germ(germ.as_deref())?, s, trials.unwrap_or(s.task_trials))
                }
                Suite::Section { germ, perturb } => {
                    harness::verify_section_suite(&ctx.germ(germ.as_deref())?, s, perturb)
                }
                Suite::All => {
                    let agg = harness::verify_all(s)?;
                    return print_reports(&agg.reports, agg.pass);
                }
            };
            let pass = report.pass;
            print_reports(&[report], pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
