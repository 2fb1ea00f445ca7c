//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when an infeasibility proof was found
//! (machine-consumable), 1 on any error.  Every infeasibility verdict and
//! every bound value is printed together with a certificate block that
//! `verify-cert` re-validates, so reports can be saved and re-checked as-is.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::cert::{
    parse_certificate, serialize_certificate, CertError, Certificate, ScaleStep,
};
use crate::bounds::{
    bound_l2d, bound_l3d, bound_obpp, bound_spp, family_scales_2d, family_scales_3d,
    okp_relaxation_bound, ustep_scales, volume_criterion, BoundKind, BoundReport, BoundsError,
    FamilyScale, Witness,
};
use crate::dff::{parse_tuple, DffError, DffSpec};
use crate::model::format::{parse_instance, serialize_instance, InstanceFile, ParseError};
use crate::model::{normalize, BoxItem, Instance, NormalizedInstance};
use crate::oracle::{
    check_dff, exact_bin_count, exact_okp_value, find_packing, DffVerdict, OracleError,
    DEFAULT_PACK_LIMIT,
};
use crate::rational::Rational;
use crate::scales::{apply_scale, ConservativeScale, ScaleError};

const EXIT_INFEASIBLE: u8 = 2;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Cert { path: PathBuf, source: CertError },
    #[error("{0}")]
    Flags(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Dff(#[from] DffError),
}

#[derive(Parser, Debug)]
#[command(
    name = "packbounds",
    about = "Lower bounds and infeasibility certificates for orthogonal packing",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a bound for an instance and print its certificate.
    Bound {
        file: PathBuf,
        /// Which problem the bound targets.
        #[arg(long, value_enum, default_value_t = Problem::Obpp)]
        problem: Problem,
        /// Include the seven-family two-dimensional composite bound.
        #[arg(long)]
        l2d: bool,
        /// Include the nine-family three-dimensional composite bound.
        #[arg(long)]
        l3d: bool,
        /// Replace the default battery with these scales (semicolon-separated
        /// tuples, e.g. "(u(1), id); (u(2), u(2))").
        #[arg(long)]
        scales: Option<String>,
        /// Raise the maximum order of the uniform step scales in the battery.
        #[arg(long, value_name = "K")]
        extra_ustep: Option<u32>,
    },
    /// Run the volume criterion over the default scale battery.
    Check {
        file: PathBuf,
        #[arg(long, value_name = "K")]
        extra_ustep: Option<u32>,
    },
    /// Stretch one box using the instance's preset edges, then re-check.
    Stretch {
        file: PathBuf,
        /// The box to grow.
        #[arg(long = "box")]
        box_id: String,
        /// The dimension to grow it in (1-based).
        #[arg(long)]
        dim: usize,
    },
    /// Exhaustively test a dual feasible function on a denominator grid.
    VerifyDff {
        /// Function in canonical text form, e.g. "u(2)" or "compose(u(1), U(1/4))".
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 12)]
        max_den: u32,
    },
    /// Re-check a saved certificate.
    VerifyCert { file: PathBuf },
    /// Generate a reproducible random instance.
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_den: u64,
        /// Attach a value to every box.
        #[arg(long)]
        values: bool,
    },
    /// Ground-truth brute-force answers for tiny instances.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Problem {
    Spp,
    Obpp,
    Okp,
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Decide packability and print a placement if one exists.
    Pack { file: PathBuf },
    /// Exact minimum bin count.
    Bins { file: PathBuf },
    /// Exact maximum packable value.
    Okp { file: PathBuf },
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Bound {
            file,
            problem,
            l2d,
            l3d,
            scales,
            extra_ustep,
        } => cmd_bound(&file, problem, l2d, l3d, scales.as_deref(), extra_ustep),
        Command::Check { file, extra_ustep } => cmd_check(&file, extra_ustep),
        Command::Stretch { file, box_id, dim } => cmd_stretch(&file, &box_id, dim),
        Command::VerifyDff { spec, max_den } => cmd_verify_dff(&spec, max_den),
        Command::VerifyCert { file } => cmd_verify_cert(&file),
        Command::Gen {
            dim,
            n,
            seed,
            max_den,
            values,
        } => cmd_gen(dim, n, seed, max_den, values),
        Command::Oracle { which } => cmd_oracle(which),
    }
}

fn load(path: &Path) -> Result<(InstanceFile, NormalizedInstance), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file = parse_instance(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let normalized = normalize(&file.instance);
    Ok((file, normalized))
}

/// Identity plus the uniform step scales up to order `max(4, extra)`.
fn base_battery(dim: usize, extra_ustep: Option<u32>) -> Result<Vec<ConservativeScale>, CliError> {
    let top = extra_ustep.unwrap_or(4).max(4);
    let mut battery = vec![ConservativeScale::identity(dim)];
    battery.extend(ustep_scales(dim, &(1..=top).collect::<Vec<_>>())?);
    Ok(battery)
}

fn dimension_families(inst: &NormalizedInstance) -> Result<Vec<FamilyScale>, CliError> {
    Ok(match inst.dim() {
        2 => family_scales_2d(inst)?,
        3 => family_scales_3d(inst)?,
        _ => Vec::new(),
    })
}

fn parse_scale_list(text: &str) -> Result<Vec<ConservativeScale>, CliError> {
    let mut out = Vec::new();
    for piece in text.split(';') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        out.push(ConservativeScale::from_dffs(parse_tuple(piece)?));
    }
    if out.is_empty() {
        return Err(CliError::Flags("--scales lists no scales".into()));
    }
    Ok(out)
}

fn print_certificate(cert: &Certificate) {
    println!();
    print!("{}", serialize_certificate(cert));
}

fn report_certificate(file: &InstanceFile, report: &BoundReport) -> Result<Certificate, CliError> {
    Certificate::from_report(file.clone(), report).map_err(|source| CliError::Cert {
        path: PathBuf::from("<generated>"),
        source,
    })
}

fn cmd_bound(
    path: &Path,
    problem: Problem,
    l2d: bool,
    l3d: bool,
    scales: Option<&str>,
    extra_ustep: Option<u32>,
) -> Result<ExitCode, CliError> {
    let (file, inst) = load(path)?;
    let mut battery = match scales {
        Some(text) => parse_scale_list(text)?,
        None => base_battery(inst.dim(), extra_ustep)?,
    };
    let mut families = Vec::new();
    if l2d {
        families.extend(family_scales_2d(&inst)?);
    }
    if l3d {
        families.extend(family_scales_3d(&inst)?);
    }

    let report = match problem {
        Problem::Spp => {
            battery.extend(families.into_iter().map(|f| f.scale));
            bound_spp(&inst, &battery)?
        }
        Problem::Obpp => {
            let mut candidates = Vec::new();
            if l2d {
                candidates.push(bound_l2d(&inst)?);
            }
            if l3d {
                candidates.push(bound_l3d(&inst)?);
            }
            candidates.push(bound_obpp(&inst, &battery)?);
            candidates
                .into_iter()
                .reduce(|best, next| if next.value > best.value { next } else { best })
                .expect("at least the battery bound is present")
        }
        Problem::Okp => {
            battery.extend(families.into_iter().map(|f| f.scale));
            let mut best: Option<(Rational, &ConservativeScale)> = None;
            for scale in &battery {
                let bound = okp_relaxation_bound(&inst, scale)?;
                if best.as_ref().map_or(true, |(v, _)| bound < *v) {
                    best = Some((bound, scale));
                }
            }
            let (value, scale) = best.expect("battery is never empty");
            BoundReport {
                kind: BoundKind::Okp,
                value,
                witness: Witness {
                    scale: scale.clone(),
                    family: None,
                    params: Vec::new(),
                },
            }
        }
    };

    let direction = match report.kind {
        BoundKind::Okp => "upper",
        _ => "lower",
    };
    println!("{} {direction} bound: {}", report.kind, report.value);
    println!("witness scale: {}", report.witness.scale.provenance());
    if let Some(family) = report.witness.family {
        let params = report
            .witness
            .params
            .iter()
            .map(|(n, v)| format!("{n} = {v}"))
            .collect::<Vec<_>>()
            .join(", ");
        println!("family: {family} at {params}");
    }
    let cert = report_certificate(&file, &report)?;
    print_certificate(&cert);
    Ok(ExitCode::SUCCESS)
}

/// The first infeasibility found while scanning a battery, plus the printed
/// scan summary.
struct Scan {
    proof: Option<(ConservativeScale, Option<FamilyScale>, Rational)>,
}

fn scan_battery(
    inst: &NormalizedInstance,
    battery: &[ConservativeScale],
    families: &[FamilyScale],
) -> Result<Scan, CliError> {
    let mut proof = None;
    for scale in battery {
        let verdict = volume_criterion(inst, scale)?;
        let volume = verdict.volume();
        if verdict.is_infeasible() {
            println!("scale {}: volume {volume} > 1, INFEASIBLE", scale.provenance());
            if proof.is_none() {
                proof = Some((scale.clone(), None, volume.clone()));
            }
        } else {
            println!("scale {}: volume {volume}, pass", scale.provenance());
        }
    }
    if !families.is_empty() {
        let mut best: Option<(Rational, &FamilyScale)> = None;
        for fam in families {
            let verdict = volume_criterion(inst, &fam.scale)?;
            let volume = verdict.volume();
            if verdict.is_infeasible() && proof.is_none() {
                proof = Some((fam.scale.clone(), Some(fam.clone()), volume.clone()));
            }
            if best.as_ref().map_or(true, |(v, _)| volume > v) {
                best = Some((volume.clone(), fam));
            }
        }
        let (volume, fam) = best.expect("families is non-empty");
        let status = if volume > Rational::one() {
            "INFEASIBLE"
        } else {
            "pass"
        };
        println!(
            "families: best {} {} with volume {volume}, {status}",
            fam.family,
            fam.scale.provenance()
        );
    }
    Ok(Scan { proof })
}

fn cmd_check(path: &Path, extra_ustep: Option<u32>) -> Result<ExitCode, CliError> {
    let (file, inst) = load(path)?;
    println!(
        "instance {}: d={}, {} boxes, volume {}",
        path.display(),
        inst.dim(),
        inst.len(),
        inst.total_volume()
    );
    let battery = base_battery(inst.dim(), extra_ustep)?;
    let families = dimension_families(&inst)?;
    let scan = scan_battery(&inst, &battery, &families)?;
    match scan.proof {
        Some((scale, family, volume)) => {
            println!("verdict: INFEASIBLE — no packing exists");
            let steps = match scale.dffs() {
                Some(dffs) => vec![ScaleStep::Dffs(dffs.to_vec())],
                None => unreachable!("battery scales are built from dual feasible functions"),
            };
            let mut cert =
                Certificate::new(BoundKind::OppInfeasibility, volume, file.clone(), steps);
            if let Some(fam) = family {
                cert.family = Some(fam.family.to_string());
                cert.params = fam
                    .params
                    .iter()
                    .map(|(n, v)| (n.to_string(), v.clone()))
                    .collect();
            }
            print_certificate(&cert);
            Ok(ExitCode::from(EXIT_INFEASIBLE))
        }
        None => {
            println!("verdict: pass — no infeasibility proven");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_stretch(path: &Path, box_id: &str, dim: usize) -> Result<ExitCode, CliError> {
    let (file, inst) = load(path)?;
    if dim == 0 || dim > inst.dim() {
        return Err(CliError::Flags(format!(
            "--dim {dim} out of range 1..={}",
            inst.dim()
        )));
    }
    let axis = dim - 1;
    let outcome = crate::scales::stretch(&inst, &file.edges, box_id, axis)?;
    let exactness = if outcome.exact {
        "exact"
    } else {
        "upper bound"
    };
    println!("stretch box {box_id} along dimension {dim}");
    println!("factor lambda = {} ({exactness})", outcome.lambda);
    println!("stretched scale: {}", outcome.scale.provenance());
    let stretched = apply_scale(&inst, &outcome.scale)?;
    let grown = stretched.box_by_id(box_id).expect("box exists").1;
    println!(
        "new size of {box_id}: {}",
        grown
            .size()
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );

    println!("re-checking the stretched instance");
    let battery = base_battery(inst.dim(), None)?;
    let families = dimension_families(&stretched)?;
    let scan = scan_battery(&stretched, &battery, &families)?;
    match scan.proof {
        Some((scale, family, volume)) => {
            println!("verdict: INFEASIBLE — no packing respects the preset edges");
            let mut steps = vec![ScaleStep::Stretch {
                box_id: box_id.to_string(),
                axis,
                lambda: outcome.lambda.clone(),
            }];
            if let Some(dffs) = scale.dffs() {
                if dffs.iter().any(|f| *f != DffSpec::Identity) {
                    steps.push(ScaleStep::Dffs(dffs.to_vec()));
                }
            }
            let mut cert =
                Certificate::new(BoundKind::OppInfeasibility, volume, file.clone(), steps);
            if let Some(fam) = family {
                cert.family = Some(fam.family.to_string());
                cert.params = fam
                    .params
                    .iter()
                    .map(|(n, v)| (n.to_string(), v.clone()))
                    .collect();
            }
            print_certificate(&cert);
            Ok(ExitCode::from(EXIT_INFEASIBLE))
        }
        None => {
            println!("verdict: pass — no infeasibility proven");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_verify_dff(spec: &str, max_den: u32) -> Result<ExitCode, CliError> {
    let f: DffSpec = spec
        .parse()
        .map_err(|e: DffError| CliError::Flags(format!("bad --spec: {e}")))?;
    match check_dff(&f, max_den)? {
        DffVerdict::Holds => {
            println!("{f} holds on all multisets with denominators <= {max_den}");
            Ok(ExitCode::SUCCESS)
        }
        DffVerdict::Counterexample(xs) => {
            let total: Rational = xs.iter().sum();
            let images = xs
                .iter()
                .map(|x| f.eval(x))
                .collect::<Result<Vec<_>, _>>()?;
            let image_sum: Rational = images.iter().sum();
            let list = xs
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            println!("counterexample: {list}");
            println!("sum {total} <= 1, but image sum {image_sum} > 1");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_verify_cert(path: &Path) -> Result<ExitCode, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let wrap = |source| CliError::Cert {
        path: path.to_path_buf(),
        source,
    };
    let cert = parse_certificate(&text).map_err(wrap)?;
    let value = cert.verify().map_err(wrap)?;
    println!("certificate verified: kind {}, value {value}", cert.kind);
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(dim: usize, n: usize, seed: u64, max_den: u64, values: bool) -> Result<ExitCode, CliError> {
    if dim == 0 {
        return Err(CliError::Flags("--dim must be at least 1".into()));
    }
    if max_den == 0 {
        return Err(CliError::Flags("--max-den must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boxes = Vec::with_capacity(n);
    for i in 1..=n {
        let size: Vec<Rational> = (0..dim)
            .map(|_| {
                let den = rng.gen_range(1..=max_den) as i64;
                let num = rng.gen_range(1..=den);
                Rational::new(num, den)
            })
            .collect();
        let id = format!("b{i}");
        boxes.push(if values {
            BoxItem::with_value(id, size, Rational::from_int(rng.gen_range(1..=100)))
        } else {
            BoxItem::new(id, size)
        });
    }
    let instance = Instance::new(vec![Rational::one(); dim], boxes)
        .expect("generated sizes lie in (0, 1]");
    print!("{}", serialize_instance(&InstanceFile::plain(instance)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(which: OracleCmd) -> Result<ExitCode, CliError> {
    match which {
        OracleCmd::Pack { file } => {
            let (_, inst) = load(&file)?;
            match find_packing(&inst, DEFAULT_PACK_LIMIT)? {
                Some(positions) => {
                    println!("packable: yes");
                    for (b, pos) in inst.boxes().iter().zip(&positions) {
                        let coords = pos
                            .iter()
                            .map(|r| r.to_string())
                            .collect::<Vec<_>>()
                            .join(" ");
                        println!("{} at {coords}", b.id());
                    }
                }
                None => println!("packable: no"),
            }
            Ok(ExitCode::SUCCESS)
        }
        OracleCmd::Bins { file } => {
            let (_, inst) = load(&file)?;
            println!("bins: {}", exact_bin_count(&inst, DEFAULT_PACK_LIMIT)?);
            Ok(ExitCode::SUCCESS)
        }
        OracleCmd::Okp { file } => {
            let (_, inst) = load(&file)?;
            println!("value: {}", exact_okp_value(&inst, DEFAULT_PACK_LIMIT)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}
