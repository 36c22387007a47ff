use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use levy_sym::classify::{classify, compact_set_potential, Classification};
use levy_sym::exponent::{cosine_form_discrepancy, exponent_table, ExponentTable};
use levy_sym::group::GroupId;
use levy_sym::io;
use levy_sym::presets;
use levy_sym::semigroup::{green_energy, harmonic_transience_integral};
use levy_sym::simulate::simulate_path;
use levy_sym::spherical::RadialFunction;
use levy_sym::{Error, Result, RunConfig, TransformPlan};

#[derive(Parser)]
#[command(
    name = "levy-sym",
    version,
    about = "Bi-invariant Levy processes on SL(2,R)/SO(2) and SU(2): exponents, spherical transform, simulation, recurrence/transience classification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration file
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset (see `--preset help`)
    #[arg(long)]
    preset: Option<String>,
    /// RNG seed for simulation
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Dotted-key config override, e.g. --override process.a=2.0
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the characteristic exponent on the spectral grid
    Exponent(Common),
    /// Run the spherical transform demo: forward, inverse, Parseval
    Transform(Common),
    /// Simulate paths and occupation statistics
    Simulate(Common),
    /// Classify the process as recurrent or transient
    Classify(Common),
    /// Full report: exponent, transform checks, simulation, verdict
    Report(Common),
}

fn load_config(c: &Common) -> Result<RunConfig> {
    match (&c.preset, &c.config) {
        (Some(name), _) => {
            if name == "help" {
                return Err(Error::Config(format!(
                    "available presets: {}",
                    presets::PRESET_NAMES.join(", ")
                )));
            }
            presets::preset(name, &c.overrides)
        }
        (None, Some(path)) => RunConfig::from_path(path, &c.overrides),
        (None, None) => Err(Error::Config("provide --config <path> or --preset <name>".into())),
    }
}

fn echo_config(out: &Path, cfg: &RunConfig) -> Result<()> {
    io::atomic_write(&out.join("config.toml"), cfg.to_toml_string().as_bytes())
}

fn build_spectral(cfg: &RunConfig) -> Result<(TransformPlan, ExponentTable)> {
    let plan = cfg.build_plan()?;
    let table = exponent_table(&cfg.process, &plan.grid)?;
    Ok((plan, table))
}

fn cmd_exponent(c: &Common) -> Result<()> {
    let cfg = load_config(c)?;
    let (plan, table) = build_spectral(&cfg)?;
    echo_config(&c.out, &cfg)?;
    io::write_exponent_csv(&c.out.join("exponent.csv"), &table)?;
    io::write_json(&c.out.join("spectral_grid.json"), &plan.grid)?;
    let ratios = table.growth_ratios();
    println!(
        "exponent: {} nodes, min Re eta = {:.6e}, growth ratio at lambda_max = {:.6}",
        table.lambdas.len(),
        table.min_re_eta(),
        ratios.last().unwrap()
    );
    Ok(())
}

/// Demo input for the transform pipeline: a smooth bump well inside the
/// radial window.
fn demo_bump(plan: &TransformPlan) -> RadialFunction {
    let t_max = plan.radial.t_max;
    let width = (t_max / 4.0).min(1.5);
    let center = (t_max / 3.0).min(2.0);
    RadialFunction::smooth_bump(plan.radial.clone(), center, width)
}

fn cmd_transform(c: &Common) -> Result<()> {
    let cfg = load_config(c)?;
    if cfg.process.group != GroupId::Sl2r {
        return Err(Error::UnsupportedGroup(cfg.process.group));
    }
    let plan = cfg.build_plan()?;
    echo_config(&c.out, &cfg)?;
    let f = demo_bump(&plan);
    let fhat = plan.transform(&f)?;
    let rec = plan.inverse_samples(&fhat, None)?;
    let sup_err = f
        .samples
        .iter()
        .zip(rec.samples.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let (lhs, rhs) = plan.parseval(&f, &f)?;
    io::write_radial_csv(&c.out.join("radial.csv"), &f)?;
    io::write_spectral_csv(&c.out.join("spectral.csv"), &plan, &fhat)?;
    io::write_radial_csv(&c.out.join("reconstruction.csv"), &rec)?;
    io::write_json(&c.out.join("spectral_grid.json"), &plan.grid)?;
    io::write_json(
        &c.out.join("transform_summary.json"),
        &serde_json::json!({
            "kappa": plan.grid.kappa,
            "round_trip_sup_error": sup_err,
            "parseval_lhs": lhs,
            "parseval_rhs": rhs,
            "parseval_rel_gap": (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE),
            "max_imag": fhat.max_imag(),
        }),
    )?;
    println!(
        "transform: kappa = {:.8}, round-trip sup error = {:.3e}, Parseval rel gap = {:.3e}",
        plan.grid.kappa,
        sup_err,
        (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE)
    );
    Ok(())
}

const MAX_RECORDED_PATHS: usize = 10;

fn cmd_simulate(c: &Common) -> Result<()> {
    let cfg = load_config(c)?;
    let sim = cfg.sim_config(c.seed);
    sim.validate()?;
    echo_config(&c.out, &cfg)?;
    let stats = levy_sym::simulate::potential_estimate(&sim)?;
    let recorded: Vec<_> = (0..sim.n_paths.min(MAX_RECORDED_PATHS))
        .map(|p| simulate_path(&sim, p))
        .collect::<Result<_>>()?;
    io::write_occupation_csv(&c.out.join("occupation.csv"), &stats)?;
    io::write_paths_bin(&c.out.join("paths.bin"), sim.params.group, &recorded)?;
    io::write_json(
        &c.out.join("simulation_summary.json"),
        &serde_json::json!({
            "seed": c.seed,
            "n_paths": sim.n_paths,
            "recorded_paths": recorded.len(),
            "occupation": &stats,
        }),
    )?;
    println!(
        "simulate: {} paths, occupation at horizons {:?} = {:?} (se {:?})",
        sim.n_paths, stats.horizons, stats.mean, stats.std_err
    );
    Ok(())
}

fn run_classification(
    cfg: &RunConfig,
    seed: u64,
) -> Result<(levy_sym::Verdict, Option<(TransformPlan, ExponentTable)>)> {
    let sim = cfg.sim_config(seed);
    let spectral = if cfg.process.group == GroupId::Sl2r && !cfg.process.is_degenerate() {
        Some(build_spectral(cfg)?)
    } else {
        None
    };
    let verdict = classify(
        &sim,
        spectral.as_ref().map(|(p, _)| p),
        cfg.spectral.lambda0,
        cfg.thresholds(),
    )?;
    Ok((verdict, spectral))
}

fn write_classification_outputs(
    out: &Path,
    cfg: &RunConfig,
    verdict: &levy_sym::Verdict,
    spectral: &Option<(TransformPlan, ExponentTable)>,
) -> Result<()> {
    io::write_json(&out.join("verdict.json"), verdict)?;
    if let Some(p) = &verdict.probabilistic {
        io::write_occupation_csv(&out.join("occupation.csv"), &p.stats)?;
    }
    if let Some((plan, table)) = spectral {
        io::write_exponent_csv(&out.join("exponent.csv"), table)?;
        io::write_harmonic_csv(
            &out.join("harmonic_integrand.csv"),
            plan,
            table,
            cfg.spectral.lambda0,
        )?;
    }
    Ok(())
}

fn cmd_classify(c: &Common) -> Result<()> {
    let cfg = load_config(c)?;
    let (verdict, spectral) = run_classification(&cfg, c.seed)?;
    echo_config(&c.out, &cfg)?;
    write_classification_outputs(&c.out, &cfg, &verdict, &spectral)?;
    println!("classification: {:?}", verdict.classification);
    for n in &verdict.notes {
        println!("note: {n}");
    }
    Ok(())
}

fn fmt_classification(c: Classification) -> &'static str {
    match c {
        Classification::Recurrent => "recurrent",
        Classification::Transient => "transient",
        Classification::Inconclusive => "inconclusive",
        Classification::Degenerate => "degenerate",
    }
}

fn cmd_report(c: &Common) -> Result<()> {
    let cfg = load_config(c)?;
    let (verdict, spectral) = run_classification(&cfg, c.seed)?;
    echo_config(&c.out, &cfg)?;
    write_classification_outputs(&c.out, &cfg, &verdict, &spectral)?;

    let mut text = String::new();
    let mut push = |s: String| {
        text.push_str(&s);
        text.push('\n');
    };
    push("levy-sym run report".into());
    push("===================".into());
    push(format!("group: {:?}", cfg.process.group));
    push(format!(
        "process: a = {}, levy = {:?}, symmetric = {}",
        cfg.process.a, cfg.process.levy, cfg.process.symmetric
    ));
    push(format!("seed: {}", c.seed));
    push(String::new());
    push(format!("classification: {}", fmt_classification(verdict.classification)));
    if let Some(p) = &verdict.probabilistic {
        push(format!(
            "  probabilistic channel ({}): mean occupation of B(o, {}) at horizons {:?} is {:?};",
            fmt_classification(p.classification),
            p.stats.ball_radius,
            p.stats.horizons,
            p.stats.mean,
        ));
        push(format!(
            "    slope {:.4} (se {:.4}, recurrence needs z > {}), final-doubling gain {:.4} (se {:.4}, transience needs gain < {} se)",
            p.stats.slope_mean,
            p.stats.slope_se,
            verdict.thresholds.recurrent_z,
            p.stats.last_increment_mean,
            p.stats.last_increment_se,
            verdict.thresholds.transient_se,
        ));
    }
    if let Some(h) = &verdict.harmonic {
        push(format!(
            "  harmonic channel ({}): integral of the Plancherel density over Re(eta) on [0, {}] = {:.6}",
            fmt_classification(h.classification),
            h.lambda0,
            h.report.value,
        ));
        push(format!(
            "    refinement delta {:.3e}, divergent: {}, symmetrized input: {} (finiteness of this low-frequency integral is equivalent to transience)",
            h.report.grid_refinement_delta, h.report.divergent, h.symmetrized,
        ));
    }
    if let Some(a) = verdict.agreement {
        push(format!("  channel agreement: {}", if a { "yes" } else { "no" }));
    }
    for n in &verdict.notes {
        push(format!("  note: {n}"));
    }

    let mut report_json = serde_json::json!({
        "seed": c.seed,
        "verdict": &verdict,
    });

    if let Some((plan, table)) = &spectral {
        push(String::new());
        push("spectral checks".into());
        push("---------------".into());
        let f = demo_bump(plan);
        let fhat = plan.transform(&f)?;
        let rec = plan.inverse_samples(&fhat, None)?;
        let sup_err = f
            .samples
            .iter()
            .zip(rec.samples.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let (lhs, rhs) = plan.parseval(&f, &f)?;
        let parseval_gap = (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE);
        push(format!(
            "  Plancherel constant kappa = {:.8} (calibrated; 1 in this normalization)",
            plan.grid.kappa
        ));
        push(format!("  transform round-trip sup error on a smooth bump: {sup_err:.3e}"));
        push(format!("  Parseval identity relative gap: {parseval_gap:.3e}"));
        push(format!(
            "  exponent: min Re eta = {:.6e}, growth ratio eta/(lambda^2 + rho^2) at lambda_max = {:.6}",
            table.min_re_eta(),
            table.growth_ratios().last().unwrap()
        ));
        let disc = cosine_form_discrepancy(&cfg.process, &[0.0, 0.5, 1.0, 2.0], 256)?;
        let max_disc = disc.iter().cloned().fold(0.0, f64::max);
        push(format!(
            "  cosine-form jump diagnostic: max |phi-form - cosine-form| over sample frequencies = {max_disc:.3e} (reported, not assumed equal)"
        ));
        let horizon = 4.0 * cfg.simulation.horizon;
        let energy = green_energy(plan, table, &fhat, horizon)?;
        push(format!(
            "  Green energy of the bump: {:.6} (tail beyond t = {horizon}: {:.3e}, divergent: {})",
            energy.value, energy.tail_estimate, energy.divergent
        ));
        let harmonic = harmonic_transience_integral(plan, table, cfg.spectral.lambda0)?;
        io::write_json(&c.out.join("spectral_grid.json"), &plan.grid)?;
        io::write_spectral_csv(&c.out.join("spectral.csv"), plan, &fhat)?;
        if verdict.classification == Classification::Transient {
            let base = levy_sym::group::base_point::<f64>(GroupId::Sl2r);
            let u = compact_set_potential(plan, table, verdict.classification, &[base], 0.5)?;
            push(format!("  potential of the unit-center ball bump at the base point: {u:.6}"));
            report_json["compact_set_potential"] = serde_json::json!(u);
        }
        report_json["transform"] = serde_json::json!({
            "kappa": plan.grid.kappa,
            "round_trip_sup_error": sup_err,
            "parseval_rel_gap": parseval_gap,
        });
        report_json["green_energy"] = serde_json::json!(energy);
        report_json["harmonic_integral"] = serde_json::json!(harmonic);
        report_json["cosine_form_max_discrepancy"] = serde_json::json!(max_disc);
    }

    io::write_json(&c.out.join("report.json"), &report_json)?;
    io::atomic_write(&c.out.join("summary.txt"), text.as_bytes())?;
    print!("{text}");
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Exponent(c) => cmd_exponent(c),
        Cmd::Transform(c) => cmd_transform(c),
        Cmd::Simulate(c) => cmd_simulate(c),
        Cmd::Classify(c) => cmd_classify(c),
        Cmd::Report(c) => cmd_report(c),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
