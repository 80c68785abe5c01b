use clap::{Parser, Subcommand, ValueEnum};
use glenostatics::cli::{self, CalibrationAnchors, CliError, StabilityKind};
use glenostatics::config::RunConfig;
use glenostatics::torque::{ArmMode, Motion};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "glenostatics",
    version,
    about = "Statics and stability analysis for a tendon-driven ball-and-socket shoulder joint"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MotionArg {
    Flexion,
    Extension,
    Abduction,
    Adduction,
    Rotation,
}

impl From<MotionArg> for Motion {
    fn from(m: MotionArg) -> Self {
        match m {
            MotionArg::Flexion => Motion::Flexion,
            MotionArg::Extension => Motion::Extension,
            MotionArg::Abduction => Motion::Abduction,
            MotionArg::Adduction => Motion::Adduction,
            MotionArg::Rotation => Motion::Rotation,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Verbatim,
    Corrected,
}

impl From<ModeArg> for ArmMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Verbatim => ArmMode::Verbatim,
            ModeArg::Corrected => ArmMode::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Selflock,
    Coupling,
}

#[derive(Subcommand)]
enum Command {
    /// Axial dislocation-force curves and their peaks per contact arc.
    Dislocation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Contact arcs in degrees, comma separated (defaults to the config sweep).
        #[arg(long, value_delimiter = ',')]
        theta_h: Option<Vec<f64>>,
        /// Points per curve.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Torque map for one motion group.
    Torque {
        /// Motion group to evaluate.
        #[arg(value_enum)]
        motion: MotionArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Points per axis (overrides the config sweep).
        #[arg(long)]
        grid: Option<usize>,
        /// Moment-arm variant for flexion/extension.
        #[arg(long, value_enum, default_value_t = ModeArg::Verbatim)]
        mode: ModeArg,
    },
    /// Stability classification for self-lock or coupling configurations.
    Stability {
        /// Criterion to evaluate.
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scapula angles in degrees, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        theta_d: Vec<f64>,
        /// Socket half-arcs in degrees (coupling; zipped with --theta-d).
        #[arg(long, value_delimiter = ',')]
        theta_s: Option<Vec<f64>>,
        /// Humerus angles in degrees (coupling; zipped with --theta-d).
        #[arg(long, value_delimiter = ',')]
        theta_e: Option<Vec<f64>>,
        /// Socket half-arc in degrees (self-lock; defaults to 0).
        #[arg(long)]
        socket_half: Option<f64>,
        /// Marginal band in degrees (defaults to the config tolerance).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Lowest-potential pose of the coupled shoulder-elbow system.
    Equilibrium {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Solver interval tolerance in radians.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Range-of-motion table and contact-angle subtable.
    Rom {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Back-solve geometry values from anchor targets and write a new config.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Peak dislocation force target in newtons.
        #[arg(long)]
        dislocation_peak: Option<f64>,
        /// Contact arc (degrees) at which the dislocation peak applies.
        #[arg(long, default_value_t = 30.0)]
        peak_theta_h: f64,
        /// Peak flexion torque target in newton metres.
        #[arg(long)]
        flexion_max: Option<f64>,
        /// Peak extension torque target in newton metres.
        #[arg(long)]
        extension_max: Option<f64>,
        /// Peak abduction torque target in newton metres.
        #[arg(long)]
        abduction_max: Option<f64>,
        /// Peak adduction torque target in newton metres.
        #[arg(long)]
        adduction_max: Option<f64>,
        /// Peak rotation torque target in newton metres.
        #[arg(long)]
        rotation_max: Option<f64>,
        /// Moment-arm variant the torque anchors are calibrated against.
        #[arg(long, value_enum, default_value_t = ModeArg::Verbatim)]
        mode: ModeArg,
    },
}

fn run() -> Result<(), CliError> {
    let args = Args::parse();
    match args.command {
        Command::Dislocation {
            config,
            out,
            theta_h,
            grid,
        } => {
            let cfg = RunConfig::load(&config)?;
            let setup = cfg.setup()?;
            let out_dir = cli::resolve_out_dir(&cfg, out.as_deref());
            let summary = cli::cmd_dislocation(&cfg, &setup, theta_h.as_deref(), grid, &out_dir)?;
            for e in &summary.entries {
                println!(
                    "theta_h {:6.2} deg: peak {:10.3} N at theta_c {:6.3} deg",
                    e.theta_h_deg, e.fe_max_n, e.theta_c_star_deg
                );
            }
            println!("wrote {}", out_dir.join("dislocation.csv").display());
            Ok(())
        }
        Command::Torque {
            motion,
            config,
            out,
            grid,
            mode,
        } => {
            let cfg = RunConfig::load(&config)?;
            let setup = cfg.setup()?;
            let out_dir = cli::resolve_out_dir(&cfg, out.as_deref());
            let summary =
                cli::cmd_torque(&cfg, &setup, motion.into(), grid, mode.into(), &out_dir)?;
            match summary.argmax_axis2_deg {
                Some(a2) => println!(
                    "{}: max {:.3} N·m at ({:.1}°, {:.1}°)",
                    summary.motion.name(),
                    summary.max_torque_nm,
                    summary.argmax_axis1_deg,
                    a2
                ),
                None => println!(
                    "{}: max {:.3} N·m at {:.1}°",
                    summary.motion.name(),
                    summary.max_torque_nm,
                    summary.argmax_axis1_deg
                ),
            }
            println!("wrote {}", out_dir.join("torque.csv").display());
            Ok(())
        }
        Command::Stability {
            kind,
            config,
            out,
            theta_d,
            theta_s,
            theta_e,
            socket_half,
            tol,
        } => {
            let cfg = RunConfig::load(&config)?;
            let setup = cfg.setup()?;
            let out_dir = cli::resolve_out_dir(&cfg, out.as_deref());
            let kind = match kind {
                KindArg::Selflock => StabilityKind::SelfLock,
                KindArg::Coupling => StabilityKind::Coupling,
            };
            cli::cmd_stability(
                &setup,
                kind,
                &theta_d,
                theta_s.as_deref(),
                theta_e.as_deref(),
                socket_half,
                tol,
                &out_dir,
            )?;
            println!("wrote {}", out_dir.join("summary.json").display());
            Ok(())
        }
        Command::Equilibrium { config, out, tol } => {
            let cfg = RunConfig::load(&config)?;
            let setup = cfg.setup()?;
            let out_dir = cli::resolve_out_dir(&cfg, out.as_deref());
            let summary = cli::cmd_equilibrium(&cfg, &setup, tol, &out_dir)?;
            println!(
                "equilibrium at theta_e {:.3}°, theta_f {:.3}°, height {:.6} m{}",
                summary.theta_e_deg,
                summary.theta_f_deg,
                summary.height_m,
                if summary.at_boundary {
                    " (bracket boundary)"
                } else {
                    ""
                }
            );
            println!("wrote {}", out_dir.join("summary.json").display());
            Ok(())
        }
        Command::Rom { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let setup = cfg.setup()?;
            let out_dir = cli::resolve_out_dir(&cfg, out.as_deref());
            let summary = cli::cmd_rom(&cfg, &setup, &out_dir)?;
            print!("{}", cli::rom_table(&summary));
            println!("wrote {}", out_dir.join("rom.csv").display());
            Ok(())
        }
        Command::Calibrate {
            config,
            out,
            dislocation_peak,
            peak_theta_h,
            flexion_max,
            extension_max,
            abduction_max,
            adduction_max,
            rotation_max,
            mode,
        } => {
            let cfg = RunConfig::load(&config)?;
            let out_dir = cli::resolve_out_dir(&cfg, out.as_deref());
            let anchors = CalibrationAnchors {
                dislocation_peak_n: dislocation_peak,
                peak_theta_h_deg: peak_theta_h,
                flexion_max_nm: flexion_max,
                extension_max_nm: extension_max,
                abduction_max_nm: abduction_max,
                adduction_max_nm: adduction_max,
                rotation_max_nm: rotation_max,
            };
            let summary = cli::cmd_calibrate(&config, &cfg, &anchors, mode.into(), &out_dir)?;
            if summary.changed.is_empty() {
                println!("no anchors given; copied config to {}", summary.output);
            } else {
                println!(
                    "calibrated {} -> {}",
                    summary.changed.join(", "),
                    summary.output
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}
