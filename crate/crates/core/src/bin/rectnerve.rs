use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use rectnerve::counterexamples::{
    fill_bound, gen_3d_layered, gen_cubical_config, gen_planar_3balanced, gen_planar_lcycle, gen_planar_perturbed,
    square_fill,
};
use rectnerve::dual::build_dual;
use rectnerve::embed::{center_projection, classify_projection, VerdictKind};
use rectnerve::io;
use rectnerve::model::{partition_balance, IntBox, Partition};
use rectnerve::reduction::{
    assignment_from_projection, parse_grid3sat, projection_from_assignment, reduce, solve_reduced, GadgetMap, GadgetProfile,
};
use rectnerve::solver::{solve, verify_certificate, SolveStatus, SolverConfig};
use rectnerve::stab::{build_config_sets, line_stab, plane_stab, Kind, StabStatus};
use rectnerve::Error;

#[derive(Parser)]
#[command(name = "rectnerve", version, about = "Dual complexes of box partitions and their embeddings")]
struct Cli {
    /// Structured JSON on standard output instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a partition file.
    Validate {
        #[arg(long)]
        partition: PathBuf,
    },
    /// Dump the dual complex.
    Dual {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest side ratio over dual edges.
    Balance {
        #[arg(long)]
        partition: PathBuf,
    },
    /// Orientation test of a given projection.
    Check {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        projection: PathBuf,
    },
    /// Orientation test of the center projection.
    CenterCheck {
        #[arg(long)]
        partition: PathBuf,
    },
    /// Search for a half-integral embedding.
    Solve {
        #[arg(long)]
        partition: PathBuf,
        /// Enumerate every solution.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        nodes: Option<u64>,
        /// Time limit in seconds.
        #[arg(long)]
        time: Option<f64>,
        /// Certificate file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Gadget map of a reduced instance; guides branching on the
        /// variable cycles.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Build the gadget partition of a grid3sat instance.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "half")]
        profile: Profile,
        /// Override the number of refinement levels of the profile.
        #[arg(long)]
        levels: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Read an assignment off an embedding, or build the embedding of an
    /// assignment given as a 0/1 string.
    Extract {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, conflicts_with = "assignment")]
        projection: Option<PathBuf>,
        #[arg(long)]
        assignment: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counterexample generators.
    Generate {
        #[arg(value_enum)]
        what: Family,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        materialize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fill a box with cubes of the given sides.
    Fill {
        /// Box sides, e.g. 210x211.
        #[arg(long = "box")]
        dims: String,
        /// Comma-separated cube sides.
        #[arg(long, default_value = "2,3,5,7")]
        sides: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact hyperplane stabbing check.
    Stab {
        #[arg(long, value_enum)]
        kind: StabKind,
        #[arg(long)]
        b: String,
    },
    /// SVG drawing of a planar partition.
    Render {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, conflicts_with = "center")]
        projection: Option<PathBuf>,
        /// Draw the dual at the box centers.
        #[arg(long)]
        center: bool,
        #[arg(long, default_value_t = 20)]
        scale: u32,
        #[arg(long)]
        anchors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Half,
    Cont,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Lcycle,
    Planar3,
    Perturbed,
    Layered3d,
    Cubical,
}

#[derive(Clone, Copy, ValueEnum)]
enum StabKind {
    Regular,
    Singular,
    Planar,
}

/// Outcome of a subcommand: what to print and the exit code.
struct Report {
    text: String,
    json: serde_json::Value,
    code: u8,
}

fn report(text: String, json: serde_json::Value, code: u8) -> Report {
    Report { text, json, code }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<String, Error> {
    match out {
        Some(p) => {
            write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text.to_string()),
    }
}

fn load_partition(path: &Path) -> Result<Partition, Error> {
    io::parse_partition(&read(path)?)
}

fn verdict_code(k: VerdictKind) -> u8 {
    match k {
        VerdictKind::Embedding => 0,
        VerdictKind::NotEmbedding => 1,
        VerdictKind::Unsupported => 2,
    }
}

/// Errors that answer the question negatively rather than failing it.
fn is_invalid_partition(e: &Error) -> bool {
    matches!(
        e,
        Error::OutOfBounds(_) | Error::Overlap(..) | Error::CoverageGap(_) | Error::InvalidBox(_)
    )
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.cmd {
        Cmd::Validate { partition } => match load_partition(partition) {
            Ok(p) => Ok(report(
                format!("valid: {} boxes, d = {}\n", p.len(), p.dim()),
                json!({"valid": true, "boxes": p.len(), "d": p.dim()}),
                0,
            )),
            Err(e) if is_invalid_partition(&e) => {
                Ok(report(format!("invalid: {e}\n"), json!({"valid": false, "error": e.to_string()}), 1))
            }
            Err(e) => Err(e),
        },
        Cmd::Dual { partition, out } => {
            let p = load_partition(partition)?;
            let dc = build_dual(&p)?;
            let text = emit(out, &io::write_dual(&dc))?;
            let counts: Vec<usize> = (0..=dc.dim()).map(|k| dc.count(k)).collect();
            Ok(report(text, json!({"counts": counts}), 0))
        }
        Cmd::Balance { partition } => {
            let p = load_partition(partition)?;
            let dc = build_dual(&p)?;
            let b = partition_balance(&p, &dc);
            Ok(report(format!("balance: {}\n", io::fmt_ratio(&b.value)), io::balance_json(&b), 0))
        }
        Cmd::Check { partition, projection } => {
            let p = load_partition(partition)?;
            let proj = io::parse_projection(&read(projection)?, p.dim())?;
            let dc = build_dual(&p)?;
            let v = classify_projection(&p, &dc, &proj)?;
            Ok(report(io::verdict_text(&v), io::verdict_json(&v), verdict_code(v.kind)))
        }
        Cmd::CenterCheck { partition } => {
            let p = load_partition(partition)?;
            let dc = build_dual(&p)?;
            let v = classify_projection(&p, &dc, &center_projection(&p))?;
            Ok(report(io::verdict_text(&v), io::verdict_json(&v), verdict_code(v.kind)))
        }
        Cmd::Solve { partition, all, nodes, time, out, map } => {
            let p = load_partition(partition)?;
            let mut cfg = SolverConfig { enumerate_all: *all, ..SolverConfig::default() };
            if let Some(n) = nodes {
                cfg.node_limit = *n;
            }
            if let Some(t) = time {
                cfg.time_limit = Some(Duration::from_secs_f64(*t));
            }
            let result = match map {
                Some(m) => {
                    let g = GadgetMap::parse(&read(m)?)?;
                    if !g.consistent_with(&p) {
                        return Err(Error::InvalidArgument("gadget map does not match the partition".into()));
                    }
                    solve_reduced(&p, &g, &cfg)
                }
                None => solve(&p, &cfg),
            };
            let r = match result {
                Ok(r) => r,
                Err(Error::Unsupported(m)) => {
                    return Ok(report(format!("status: UNSUPPORTED\n# {m}\n"), json!({"status": "UNSUPPORTED"}), 2))
                }
                Err(e) => return Err(e),
            };
            let mut text = format!("status: {}\nnodes: {}\n", io::solve_status_str(r.status), r.stats.nodes);
            if *all {
                text += &format!("solutions: {}\ncomplete: {}\n", r.stats.solutions, r.complete);
            }
            if let Some(c) = &r.certificate {
                let cert = io::write_projection(c);
                match out {
                    Some(path) => write(path, &cert)?,
                    None => text += &cert,
                }
            }
            let code = match r.status {
                SolveStatus::Sat => 0,
                SolveStatus::Unsat => 1,
                SolveStatus::Timeout => 2,
            };
            Ok(report(text, io::solve_json(&r), code))
        }
        Cmd::Reduce { input, profile, levels, out, map } => {
            let inst = parse_grid3sat(&read(input)?)?;
            let mut prof = match profile {
                Profile::Half => GadgetProfile::HALF_INTEGRAL,
                Profile::Cont => GadgetProfile::CONTINUOUS,
            };
            if let Some(l) = levels {
                prof.refinement_levels = *l;
            }
            let (p, g) = reduce(&inst, prof)?;
            write(out, &io::write_partition(&p))?;
            write(map, &g.to_text())?;
            Ok(report(
                format!("boxes: {}\nside: {}\n", p.len(), p.domain().side(0)),
                json!({"boxes": p.len(), "side": p.domain().side(0)}),
                0,
            ))
        }
        Cmd::Extract { partition, map, projection, assignment, out } => {
            let p = load_partition(partition)?;
            let g = GadgetMap::parse(&read(map)?)?;
            if !g.consistent_with(&p) {
                return Err(Error::InvalidArgument("gadget map does not match the partition".into()));
            }
            if let Some(bits) = assignment {
                let a = bits
                    .chars()
                    .map(|c| match c {
                        '1' | 'T' | 't' => Ok(true),
                        '0' | 'F' | 'f' => Ok(false),
                        _ => Err(Error::InvalidArgument(format!("bad assignment character {c:?}"))),
                    })
                    .collect::<Result<Vec<bool>, Error>>()?;
                if a.len() != g.variables.len() {
                    return Err(Error::InvalidArgument(format!("expected {} values", g.variables.len())));
                }
                let proj = match projection_from_assignment(&a, &p, &g) {
                    Ok(x) => x,
                    Err(e @ Error::UnsatisfiedClause(_)) => {
                        return Ok(report(format!("unsatisfied: {e}\n"), json!({"error": e.to_string()}), 1))
                    }
                    Err(e) => return Err(e),
                };
                let v = verify_certificate(&p, &proj);
                let text = emit(out, &io::write_projection(&proj))?;
                return Ok(report(text, json!({"verified": v.valid}), if v.valid { 0 } else { 1 }));
            }
            let path = projection
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("give --projection or --assignment".into()))?;
            let proj = io::parse_projection(&read(path)?, 2)?;
            match assignment_from_projection(&proj, &g) {
                Ok(a) => {
                    let bits: String = a.iter().map(|&x| if x { '1' } else { '0' }).collect();
                    Ok(report(format!("assignment: {bits}\n"), json!({"assignment": a}), 0))
                }
                Err(e @ Error::InconsistentCycle(_)) => {
                    Ok(report(format!("inconsistent: {e}\n"), json!({"error": e.to_string()}), 1))
                }
                Err(e) => Err(e),
            }
        }
        Cmd::Generate { what, beta, d, materialize, out } => {
            let beta = beta.as_deref().map(io::parse_ratio).transpose()?;
            let need_beta = || beta.ok_or_else(|| Error::InvalidArgument("--beta is required".into()));
            let p = match what {
                Family::Lcycle => gen_planar_lcycle(),
                Family::Planar3 => gen_planar_3balanced(),
                Family::Perturbed => gen_planar_perturbed(),
                Family::Layered3d => gen_3d_layered(&need_beta()?)?,
                Family::Cubical => {
                    let r = gen_cubical_config(d.unwrap_or(3), &need_beta()?)?;
                    if *materialize {
                        return Err(if r.materializable {
                            Error::Unsupported("materializing cubical configurations".into())
                        } else {
                            Error::TooLarge(format!("box side {} in dimension {}", r.b, r.d))
                        });
                    }
                    let ok = r.det_sign.as_i8() < 0 && r.chain_holds && r.coprime;
                    let text = emit(out, &io::cubical_text(&r))?;
                    return Ok(report(text, io::cubical_json(&r), if ok { 0 } else { 1 }));
                }
            };
            let text = emit(out, &io::write_partition(&p))?;
            Ok(report(text, json!({"boxes": p.len(), "d": p.dim()}), 0))
        }
        Cmd::Fill { dims, sides, out } => {
            let hi = dims
                .split('x')
                .map(|t| t.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Error::InvalidArgument(format!("bad box {dims:?}")))?;
            let sides = sides
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Error::InvalidArgument(format!("bad side list {sides:?}")))?;
            let bx = IntBox::new(vec![0; hi.len()], hi)?;
            let bound = fill_bound(&sides);
            match square_fill(&bx, &sides) {
                Ok(p) => {
                    let text = emit(out, &io::write_partition(&p))?;
                    Ok(report(text, json!({"boxes": p.len(), "bound": bound.to_string()}), 0))
                }
                Err(e @ (Error::TooSmall { .. } | Error::NotRepresentable(_))) => Ok(report(
                    format!("not filled: {e}\nbound: {bound}\n"),
                    json!({"error": e.to_string(), "bound": bound.to_string()}),
                    1,
                )),
                Err(e) => Err(e),
            }
        }
        Cmd::Stab { kind, b } => {
            let r = io::parse_ratio(b)?;
            let bq = BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
            let k = match kind {
                StabKind::Regular => Kind::Regular,
                StabKind::Singular => Kind::Singular,
                StabKind::Planar => Kind::Planar,
            };
            let problem = build_config_sets(k, &bq)?;
            let v = match kind {
                StabKind::Planar => line_stab(&problem)?,
                _ => plane_stab(&problem)?,
            };
            let code = if v.status == StabStatus::Feasible { 0 } else { 1 };
            Ok(report(io::stab_text(&v), io::stab_json(&v), code))
        }
        Cmd::Render { partition, projection, center, scale, anchors, out } => {
            let p = load_partition(partition)?;
            let dc = build_dual(&p)?;
            let proj = match (projection, center) {
                (Some(path), _) => Some(io::parse_projection(&read(path)?, p.dim())?),
                (None, true) => Some(center_projection(&p)),
                (None, false) => None,
            };
            let mut spec = io::RenderSpec { scale: *scale, ..io::RenderSpec::default() };
            spec.layers.seed_anchors = *anchors;
            let svg = io::render_svg(&p, proj.as_ref(), &dc, &spec)?;
            let text = emit(out, &svg)?;
            Ok(report(text, json!({"bytes": svg.len()}), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                println!("{}", r.json);
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({"error": e.to_string()}));
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
