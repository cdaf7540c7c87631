use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use restoration::scenario::{
    self, export_heatmap, export_ranking, import_tables, load_dataset, load_observed_damage,
    run_assessment, wind_sweep, write_sweep_csv, DamageInput, ExportFormat, ScenarioConfig,
    ScenarioError,
};
use restoration::valuation::AggregationMode;
use restoration::Rounding;

#[derive(Parser)]
#[command(
    name = "restore-rank",
    version,
    about = "Storm damage estimation and repair prioritization for radial feeders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a dataset and report whether it is valid.
    Validate { dataset: PathBuf },
    /// Estimate (or ingest) damage, value every line and rank lines and feeders.
    Assess {
        #[arg(long)]
        dataset: PathBuf,
        /// Wind speed in m/s; required unless damage is observed.
        #[arg(long)]
        wind: Option<f64>,
        #[arg(long, default_value = "nearest")]
        rounding: Rounding,
        #[arg(long, default_value = "literal")]
        mode: AggregationMode,
        /// Observed damage file (JSON) to use instead of estimating.
        #[arg(long, conflicts_with = "observed")]
        damage: Option<PathBuf>,
        /// Use the observed damage records embedded in the dataset.
        #[arg(long)]
        observed: bool,
        /// Average per-pole repair time in hours.
        #[arg(long, default_value_t = 4.0)]
        t_rep_av: f64,
        #[arg(long)]
        out_ranking: Option<PathBuf>,
        /// Ranking format; inferred from the file extension when omitted.
        #[arg(long)]
        format: Option<ExportFormat>,
        #[arg(long)]
        out_dot: Option<PathBuf>,
    },
    /// Damaged-pole counts over a range of wind speeds.
    Sweep {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        v_min: f64,
        #[arg(long)]
        v_max: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, default_value = "nearest")]
        rounding: Rounding,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a directory of per-table CSV files into a dataset document.
    Import {
        #[arg(long)]
        tables: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        t_rep_av: f64,
        #[arg(long)]
        name: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn run(command: Command) -> Result<(), ScenarioError> {
    match command {
        Command::Validate { dataset } => {
            let data: scenario::Dataset<f64> = load_dataset(&dataset)?;
            println!(
                "{}: ok ({} buses, {} lines, {} feeders, {} classes, {} poles)",
                dataset.display(),
                data.network.buses().len(),
                data.network.lines().len(),
                data.network.feeders().count(),
                data.classes.len(),
                data.total_poles()
            );
        }
        Command::Assess {
            dataset,
            wind,
            rounding,
            mode,
            damage,
            observed,
            t_rep_av,
            out_ranking,
            format,
            out_dot,
        } => {
            let data: scenario::Dataset<f64> = load_dataset(&dataset)?;
            let damage = match (damage, observed) {
                (Some(path), _) => DamageInput::Observed(load_observed_damage(&path)?),
                (None, true) => DamageInput::Observed(data.observed.clone()),
                (None, false) => DamageInput::Estimate,
            };
            let v_real = match (wind, &damage) {
                (Some(v), _) => v,
                (None, DamageInput::Observed(_)) => 0.0,
                (None, DamageInput::Estimate) => {
                    return Err(ScenarioError::Config(
                        "--wind is required when damage is estimated".into(),
                    ))
                }
            };
            let config = ScenarioConfig {
                v_real,
                rounding,
                mode,
                t_rep_av_h: t_rep_av,
                damage,
                pole_durations: Default::default(),
            };
            let assessment = run_assessment(&data, &config)?;

            println!("feeder priority (mode {mode}):");
            for f in &assessment.feeders {
                println!("  {:>3}  {:<8} w_f = {:.6e}", f.rank, f.feeder, f.w_f);
            }
            if let Some(top) = assessment.feeders.first() {
                println!("lines of feeder {} by priority:", top.feeder);
                for l in assessment.lines_of(&top.feeder) {
                    println!(
                        "  {:>3}  line {:<5} bt = {:<2} t_rep = {:<5} v_line_dyn = {:.6e}  {}",
                        l.rank, l.line, l.damaged_poles, l.t_rep_h, l.v_line_dyn, l.tier
                    );
                }
            }

            if let Some(path) = out_ranking {
                let format =
                    format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
                        Some("json") => ExportFormat::Json,
                        _ => ExportFormat::Csv,
                    });
                export_ranking(&assessment, &path, format)?;
            }
            if let Some(path) = out_dot {
                export_heatmap(&assessment, &data.network, &path)?;
            }
        }
        Command::Sweep {
            dataset,
            v_min,
            v_max,
            step,
            rounding,
            out,
        } => {
            let data: scenario::Dataset<f64> = load_dataset(&dataset)?;
            let rows = wind_sweep(&data, v_min, v_max, step, rounding)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(io_error(&path))?;
                    write_sweep_csv(&rows, std::io::BufWriter::new(file))
                        .map_err(io_error(&path))?;
                }
                None => {
                    let stdout = std::io::stdout();
                    write_sweep_csv(&rows, stdout.lock())
                        .map_err(io_error(Path::new("<stdout>")))?;
                }
            }
        }
        Command::Import {
            tables,
            out,
            t_rep_av,
            name,
        } => {
            let mut doc = import_tables::<f64>(&tables, t_rep_av)?;
            doc.name = name;
            // validate before writing
            scenario::Dataset::from_file(doc.clone(), &out)?;
            let mut text = serde_json::to_string_pretty(&doc).expect("dataset serializes");
            text.push('\n');
            std::fs::write(&out, text).map_err(io_error(&out))?;
        }
    }
    Ok(())
}
