//! Command-line front end: parses manifold description files and drives the
//! certified domain, spectrum, ortholength, tube-radius, and cover-report
//! pipelines.  All numeric work happens in the library; this shell only
//! handles formats and exit codes (0 success, 2 parse error, 3 undecidable
//! at the configured precision, 4 domain not closed).

mod input;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rug::Rational;
use tessella::cover::{build_report, CoverError, CoverInputs};
use tessella::dirichlet::{auto_pairings, build_domain, export_mesh, DirichletDomain, DirichletError};
use tessella::isometry::{IsomError, UhpPoint};
use tessella::ortho::{orthospectrum, tube_radius, OrthoError, Ortholine};
use tessella::rigor::{enclosure_from_decimal, Enclosure, Trichotomy, DEFAULT_PREC};
use tessella::spectrum::{length_spectrum, GeodesicClass, SpectrumError};
use tessella::ExecMode;

use input::{check_word, parse_manifold, ManifoldFile, ParseError};
use output::{parse_rational, Formatter};

#[derive(Parser)]
#[command(name = "tessella", about = "Certified spectra of hyperbolic 3-manifolds")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = DEFAULT_PREC)]
    bits: u32,
    /// Upper bound on precision escalation (informational; computations run
    /// at --bits and undecidable results exit with code 3).
    #[arg(long, global = true)]
    precision_cap: Option<u32>,
    /// Printed decimal places.
    #[arg(long, global = true, default_value_t = 5)]
    decimals: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the Dirichlet domain and report its combinatorics.
    Domain {
        file: PathBuf,
        /// Search for face pairings instead of using the file's words.
        #[arg(long)]
        auto: bool,
        /// Word-length cap for the automatic pairing search.
        #[arg(long, default_value_t = 40)]
        cap: usize,
        /// Write the face/vertex mesh to this path.
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
    /// Certified length spectrum up to a cutoff.
    Spectrum {
        file: PathBuf,
        /// Real-length cutoff (exact decimal or p/q).
        #[arg(long)]
        cutoff: String,
        /// Also write the table to this path.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Ortholines between two closed geodesics (or one, for the
    /// self-spectrum), given as words in the generators.
    Ortho {
        file: PathBuf,
        /// Real ortholength cutoff (exact decimal or p/q).
        #[arg(long)]
        cutoff: String,
        /// Source geodesic word.
        #[arg(long)]
        source: String,
        /// Target geodesic word (defaults to the source).
        #[arg(long)]
        target: Option<String>,
        /// Also write the table to this path.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Certified tube radius of a closed geodesic.
    Tube {
        file: PathBuf,
        /// Geodesic word.
        #[arg(long)]
        geodesic: String,
    },
    /// Covering-space obstruction report.
    CoverReport {
        file: PathBuf,
        /// Manifold volume (decimal; defaults to the file's volume line).
        #[arg(long)]
        volume: Option<String>,
        /// Smallest volume of a closed orientable hyperbolic 3-manifold.
        #[arg(long, default_value = "0.9427")]
        min_volume: String,
        /// Maximal tube density bound.
        #[arg(long, default_value = "91/100")]
        density: String,
        /// Length-spectrum cutoff.
        #[arg(long)]
        cutoff: String,
        /// Self-ortholength cutoff for the count criterion.
        #[arg(long, default_value = "2")]
        ortho_cutoff: String,
        /// Cross-ortholength cutoff for the distance criterion (must exceed
        /// log 3 for the criterion to certify absence).
        #[arg(long, default_value = "1.2")]
        cross_cutoff: String,
    },
}

enum CliError {
    Parse(String),
    Undecidable(String),
    NotClosed(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Undecidable(_) => 3,
            CliError::NotClosed(_) => 4,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Undecidable(m) | CliError::NotClosed(m) => m,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<DirichletError> for CliError {
    fn from(e: DirichletError) -> Self {
        match &e {
            DirichletError::NotClosed(_)
            | DirichletError::CapExceeded(_)
            | DirichletError::NoEdges
            | DirichletError::DegenerateVertex
            | DirichletError::Invariant(_) => CliError::NotClosed(e.to_string()),
            _ => CliError::Undecidable(e.to_string()),
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        CliError::Undecidable(e.to_string())
    }
}

impl From<OrthoError> for CliError {
    fn from(e: OrthoError) -> Self {
        CliError::Undecidable(e.to_string())
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        CliError::Undecidable(e.to_string())
    }
}

impl From<IsomError> for CliError {
    fn from(e: IsomError) -> Self {
        CliError::Undecidable(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}

fn cutoff_arg(s: &str) -> Result<Rational, CliError> {
    match parse_rational(s) {
        Some(q) if q > 0 => Ok(q),
        _ => Err(CliError::Parse(format!("invalid cutoff {s:?}"))),
    }
}

fn load(path: &PathBuf, cli: &Cli) -> Result<ManifoldFile, CliError> {
    if let Some(cap) = cli.precision_cap {
        if cap < cli.bits {
            return Err(CliError::Parse(format!(
                "--precision-cap {cap} is below --bits {}",
                cli.bits
            )));
        }
    }
    Ok(parse_manifold(path, cli.bits)?)
}

fn domain_of(mf: &ManifoldFile, auto: bool, cap: usize) -> Result<DirichletDomain, CliError> {
    let pairings = if auto || mf.facepairings.is_empty() {
        auto_pairings(&mf.generators, cap)?
    } else {
        let mut out = Vec::new();
        for w in &mf.facepairings {
            out.push(mf.generators.eval_word(w)?);
        }
        out
    };
    Ok(build_domain(&pairings)?)
}

fn class_of(mf: &ManifoldFile, word: &str, label: usize) -> Result<GeodesicClass, CliError> {
    check_word(word, &mf.generators)?;
    let rep = mf.generators.eval_word(word)?;
    let length = rep.complex_length()?;
    let axis_distance = rep.axis_basepoint_distance(&UhpPoint::basepoint(rep.prec()))?;
    Ok(GeodesicClass {
        axis_endpoints: rep.fixed_points().ok(),
        axis_distance,
        rep,
        length,
        label,
        warned: false,
    })
}

fn emit(text: &str, copy: &Option<PathBuf>) -> Result<(), CliError> {
    print!("{text}");
    if let Some(path) = copy {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn ortho_tsv(lines: &[Ortholine], fmt: &Formatter) -> String {
    let mut out = String::from(
        "length-re\tlength-im\tsrc-re\tsrc-im\ttgt-re\ttgt-im\tmultiplicity\twarnings\n",
    );
    for l in lines {
        let (cells, certified) = fmt.cells(&[
            &l.length.re,
            &l.length.im,
            &l.source.position.re,
            &l.source.position.im,
            &l.target.position.re,
            &l.target.position.im,
        ]);
        let mut warnings = Vec::new();
        if l.warned {
            warnings.push("frontier");
        }
        if !certified {
            warnings.push("wide");
        }
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            cells.join("\t"),
            l.lifts,
            warnings.join(",")
        ));
    }
    out
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let fmt = Formatter {
        decimals: cli.decimals,
    };
    let mode = ExecMode::Parallel;
    match &cli.cmd {
        Cmd::Domain {
            file,
            auto,
            cap,
            mesh,
        } => {
            let mf = load(file, cli)?;
            let dom = domain_of(&mf, *auto, *cap)?;
            let (spine, certified) = fmt.enc(&dom.spine_radius);
            let mut out = String::new();
            if !mf.name.is_empty() {
                out.push_str(&format!("name\t{}\n", mf.name));
            }
            out.push_str(&format!(
                "basepoint\t{}\t{}\t{}\n",
                fmt.enc(&mf.basepoint.x).0,
                fmt.enc(&mf.basepoint.y).0,
                fmt.enc(&mf.basepoint.z).0
            ));
            out.push_str(&format!("faces\t{}\n", dom.faces.len()));
            out.push_str(&format!("vertices\t{}\n", dom.vertices.len()));
            out.push_str(&format!("edges\t{}\n", dom.edges.len()));
            out.push_str(&format!("spine-radius\t{spine}"));
            if !certified {
                out.push_str("\twide");
            }
            out.push('\n');
            print!("{out}");
            if let Some(path) = mesh {
                std::fs::write(path, export_mesh(&dom, cli.decimals))?;
            }
            Ok(())
        }
        Cmd::Spectrum { file, cutoff, tsv } => {
            let mf = load(file, cli)?;
            let dom = domain_of(&mf, false, 40)?;
            let table = length_spectrum(&dom, &cutoff_arg(cutoff)?, mode)?;
            let mut out = String::from("group\tlength-re\tlength-im\tmultiplicity\twarnings\n");
            for (i, g) in table.groups.iter().enumerate() {
                let (cells, certified) = fmt.cells(&[&g.length.re, &g.length.im]);
                let mut warnings = Vec::new();
                if g.warned {
                    warnings.push("frontier");
                }
                if !certified {
                    warnings.push("wide");
                }
                out.push_str(&format!(
                    "{i}\t{}\t{}\t{}\n",
                    cells.join("\t"),
                    g.multiplicity(),
                    warnings.join(",")
                ));
            }
            emit(&out, tsv)
        }
        Cmd::Ortho {
            file,
            cutoff,
            source,
            target,
            tsv,
        } => {
            let mf = load(file, cli)?;
            let dom = domain_of(&mf, false, 40)?;
            let f = class_of(&mf, source, 0)?;
            let g = match target {
                Some(t) if t != source => class_of(&mf, t, 1)?,
                _ => f.clone(),
            };
            let lines = orthospectrum(&f, &g, &dom, &cutoff_arg(cutoff)?, mode)?;
            emit(&ortho_tsv(&lines, &fmt), tsv)
        }
        Cmd::Tube { file, geodesic } => {
            let mf = load(file, cli)?;
            let dom = domain_of(&mf, false, 40)?;
            let class = class_of(&mf, geodesic, 0)?;
            let radius = tube_radius(&class, &dom, mode)?;
            let (text, certified) = fmt.enc(&radius);
            print!("tube-radius\t{text}");
            if !certified {
                print!("\twide");
            }
            println!();
            Ok(())
        }
        Cmd::CoverReport {
            file,
            volume,
            min_volume,
            density,
            cutoff,
            ortho_cutoff,
            cross_cutoff,
        } => {
            let mf = load(file, cli)?;
            let vol = match volume {
                Some(v) => enclosure_from_decimal(v, cli.bits)
                    .ok_or_else(|| CliError::Parse(format!("invalid volume {v:?}")))?,
                None => mf.volume.clone().ok_or_else(|| {
                    CliError::Parse("no --volume given and the file has no volume line".into())
                })?,
            };
            let min_vol = enclosure_from_decimal(min_volume, cli.bits)
                .ok_or_else(|| CliError::Parse(format!("invalid min-volume {min_volume:?}")))?;
            let dens = parse_rational(density)
                .filter(|q| *q > 0 && *q <= 1)
                .ok_or_else(|| CliError::Parse(format!("invalid density {density:?}")))?;
            let dom = domain_of(&mf, false, 40)?;
            let table = length_spectrum(&dom, &cutoff_arg(cutoff)?, mode)?;

            // Classify geodesics by certified tube radius against log(3)/2;
            // only thick-tube geodesics feed the ortholine criteria.
            let half_log3 = {
                let three = Enclosure::exact_i64(3, cli.bits);
                three
                    .ln()
                    .map_err(|e| CliError::Undecidable(e.to_string()))?
                    .div(&Enclosure::exact_i64(2, cli.bits))
                    .map_err(|e| CliError::Undecidable(e.to_string()))?
            };
            let mut thick = Vec::new();
            let mut notes = String::new();
            for class in &table.classes {
                let radius = match tube_radius(class, &dom, mode) {
                    Ok(r) => r,
                    // No self-ortholine within the adaptive cutoff: the tube
                    // is far wider than log(3)/2.
                    Err(OrthoError::NoOrtholine) => {
                        thick.push(class.label);
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                match radius.cmp_enc(&half_log3) {
                    Trichotomy::Above => {
                        thick.push(class.label);
                        notes.push_str(&format!(
                            "class {}: tube radius {}\n",
                            class.label,
                            fmt.enc(&radius).0
                        ));
                    }
                    Trichotomy::Overlap => notes.push_str(&format!(
                        "class {}: tube radius undecided against log(3)/2\n",
                        class.label
                    )),
                    Trichotomy::Below => {}
                }
            }

            let self_delta = cutoff_arg(ortho_cutoff)?;
            let cross_delta = cutoff_arg(cross_cutoff)?;
            let mut self_orthos = Vec::new();
            let mut cross_orthos = Vec::new();
            for (i, &a) in thick.iter().enumerate() {
                let ca = &table.classes[a];
                self_orthos.push((a, orthospectrum(ca, ca, &dom, &self_delta, mode)?));
                for &b in &thick[i + 1..] {
                    let cb = &table.classes[b];
                    cross_orthos.push((a, b, orthospectrum(ca, cb, &dom, &cross_delta, mode)?));
                }
            }

            let inputs = CoverInputs {
                volume: vol,
                min_volume: min_vol,
                density: dens,
                spectrum: table,
                self_orthos,
                cross_orthos,
                notes,
            };
            let report = build_report(&inputs)?;
            print!("{report}");
            Ok(())
        }
    }
}
