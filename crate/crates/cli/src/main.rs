//! Command-line front end for the corevariety solver.
//!
//! All data files are exact-fraction TOML (see the library's `io` module);
//! clouds are plain text with one point per line. Results go to stdout
//! unless `-o` names a file; diagnostics and timings go to stderr.
//!
//! Exit codes: 0 for any well-formed answer (including "no measure" and
//! "no extension"), 1 for domain errors such as an unknown label or a
//! missing precondition, 2 for unreadable or unparsable input, 3 for an
//! internal invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgAction, Parser, Subcommand};

use corevariety::corevar::{self, DecideOptions};
use corevariety::exact::{extreme_rays, Rat};
use corevariety::extend::{self, EXTENSION_SCOPE_NOTE, TOWER_SCOPE_NOTE};
use corevariety::faces;
use corevariety::io::{
    parse_cloud, DecisionFile, ExtensionFile, ExtensionResultFile, FaceFile, InstanceFile,
    MeasureFile, TowerFile, TowerResultFile,
};
use corevariety::measure::{self, cloud_moments};
use corevariety::Error;

#[derive(Parser)]
#[command(
    name = "corevariety",
    version,
    about = "Exact truncated-moment solver on finite ground sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide existence of a representing measure and emit the iteration trace.
    Solve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Allow analyzing the negated functional when the sign test asks.
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        flip_allowed: bool,
        /// Also classify against the cone of the first iterate and report
        /// whether that shortcut agrees with the full iteration.
        #[arg(long)]
        fastpath: bool,
    },
    /// Extract a finitely atomic representing measure.
    Extract {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Add a decimal rendering column next to exact weights.
        #[arg(long)]
        float: bool,
    },
    /// Compress a weighted point cloud, preserving all moments up to a degree.
    Compress {
        /// Cloud file: one point per line, coordinates then optional weight.
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Number of coordinates per point.
        #[arg(long)]
        vars: usize,
        /// Cap on worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        float: bool,
    },
    /// Describe the face of the moment cone determined by the functional.
    Faces {
        #[arg(short, long)]
        input: PathBuf,
        /// Second instance over the same system: report relative-interior
        /// equality and face membership of its functional.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether the sub-space functional admits a positive extension.
    Extend {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide every level of a truncation tower.
    Tower {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a staircase instance file.
    Staircase {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse(_) => 2,
                Error::InternalInfeasible(_) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Solve {
            input,
            output,
            flip_allowed,
            fastpath,
        } => {
            let (system, l) = InstanceFile::parse(&read_file(&input)?)?.to_instance()?;
            let decision = corevar::decide_with(&system, &l, DecideOptions { flip_allowed });
            let file = if fastpath {
                let fp = faces::finite_fastpath(&system, &l, &system.full_view());
                let consistent = &fp.core == decision.trace.core();
                let mut f = DecisionFile::from_decision(&system, &decision, Some(fp.class));
                f.fastpath_consistent = Some(consistent);
                f
            } else {
                DecisionFile::from_decision(&system, &decision, None)
            };
            emit(output.as_deref(), &file.render())
        }
        Command::Extract {
            input,
            output,
            float,
        } => {
            let (system, l) = InstanceFile::parse(&read_file(&input)?)?.to_instance()?;
            let m = measure::extract(&system, &l)?;
            let file = MeasureFile::from_measure(&system, &m, float);
            emit(output.as_deref(), &file.render())
        }
        Command::Compress {
            input,
            degree,
            vars,
            threads,
            output,
            float,
        } => {
            let (points, weights) = parse_cloud(&read_file(&input)?, vars)?;
            let start = Instant::now();
            let m = measure::compress_cloud(&points, &weights, degree, threads)?;
            let elapsed = start.elapsed();
            // Exact re-verification of every moment before anything is emitted.
            let expected = cloud_moments(&points, &weights, degree);
            let sub_points: Vec<Vec<Rat>> =
                m.atoms().iter().map(|(j, _)| points[*j].clone()).collect();
            let sub_weights: Vec<Rat> = m.atoms().iter().map(|(_, w)| w.clone()).collect();
            if cloud_moments(&sub_points, &sub_weights, degree) != expected {
                return Err(Error::InternalInfeasible(
                    "compressed cloud fails exact moment re-verification".into(),
                ));
            }
            eprintln!(
                "compress: {} points -> {} atoms in {:.3}s",
                points.len(),
                m.len(),
                elapsed.as_secs_f64()
            );
            let file = MeasureFile::from_cloud_measure(&points, &m, float);
            emit(output.as_deref(), &file.render())
        }
        Command::Faces {
            input,
            compare,
            output,
        } => {
            let (system, l) = InstanceFile::parse(&read_file(&input)?)?.to_instance()?;
            let face = faces::face_of(&system, &l)?;
            let generators = extreme_rays(&face.dual_face).len();
            let mut file = FaceFile::from_face(&system, &face, generators);
            if let Some(other_path) = compare {
                let other = InstanceFile::parse(&read_file(&other_path)?)?;
                let (other_system, other_l) = other.to_instance()?;
                if other_system != system {
                    return Err(Error::InvalidInput(
                        "comparison instance must share points, basis, and evaluations".into(),
                    ));
                }
                file.relint_equal_to_compare = Some(faces::in_relint(&system, &other_l, &l)?);
                file.compare_member_of_face = Some(faces::member(&system, &other_l, &face));
            }
            emit(output.as_deref(), &file.render())
        }
        Command::Extend { input, output } => {
            let ext = ExtensionFile::parse(&read_file(&input)?)?;
            let (system, problem) = ext.to_problem()?;
            let mut result = ExtensionResultFile {
                extension_exists: false,
                note: EXTENSION_SCOPE_NOTE.to_string(),
                extension: None,
                atoms: Vec::new(),
                separating: None,
                tail_ratios: Vec::new(),
            };
            match extend::v_positive_extension(&system, &problem)? {
                Some((extension, m)) => {
                    result.extension_exists = true;
                    result.atoms = MeasureFile::from_measure(&system, &m, false).atoms;
                    result.extension = Some(extension.coeffs().to_vec());
                }
                None => {
                    result.separating = extend::u_positivity_witness(&system, &problem);
                }
            }
            if let (Some(rho_row), Some(tail)) = (ext.rho_row(&system)?, ext.tail_indices(&system)?)
            {
                let report = extend::tail_diagnostic(&system, &problem, rho_row, &tail)?;
                result.tail_ratios = ExtensionResultFile::tail_entries(&report);
            }
            emit(output.as_deref(), &result.render())
        }
        Command::Tower { input, output } => {
            let tower = TowerFile::parse(&read_file(&input)?)?;
            let (system, top, spec) = tower.to_tower()?;
            let report = extend::tower_decide(&system, &top, &spec)?;
            let (intersection, _) = extend::tower_core_variety(&system, &top, &spec)?;
            let file = TowerResultFile::build(&system, &report, &intersection, TOWER_SCOPE_NOTE);
            emit(output.as_deref(), &file.render())
        }
        Command::Staircase { k, output } => {
            let (system, l) = corevar::make_staircase(k as usize);
            let file = InstanceFile::from_instance(&system, &l);
            emit(output.as_deref(), &file.render())
        }
    }
}
