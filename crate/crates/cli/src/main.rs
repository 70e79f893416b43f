use std::io::{stdin, stdout, BufReader};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skizze_core::deform::{DEFAULT_SAMPLES, DEFAULT_TOL_T};
use skizze_core::graph::CanonicalCode;
use skizze_core::poly::{parse_complex, DEFAULT_ROOT_TOL};
use skizze_core::tracer::{trace, TraceConfig};
use skizze_core::{Error, Result};
use skizze_cli::commands::{self, PathSpec, COMPOSE_CAP, POSET_CAP, TRACE_CAP};
use skizze_cli::record::Record;
use skizze_cli::render::{render_svg, RenderSpec};
use skizze_cli::service::{serve_tcp, Service};

#[derive(Parser)]
#[command(name = "skizze", version, about = "Gauss-skizze of complex polynomials")]
struct Cli {
    /// Write the result record to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Roots with multiplicities.
    Roots {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
        tol: f64,
    },
    /// Canonical code of the Gauss-graph.
    Classify {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = TRACE_CAP)]
        cap: usize,
    },
    /// Traced skizze: vertices, leaves, arcs and the extracted graph.
    Trace {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = TRACE_CAP)]
        cap: usize,
    },
    /// All generic codes of degree n.
    EnumerateGeneric {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = POSET_CAP)]
        cap: usize,
    },
    /// Whitehead-move poset of degree n.
    Poset {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = POSET_CAP)]
        cap: usize,
        /// Also write the catalog file.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Print only the neighbors of this code.
        #[arg(long)]
        neighbors: Option<String>,
    },
    /// Wall events and stratum timeline along a path.
    Deform {
        /// `P0..P1`
        #[arg(long, conflicts_with = "path_file")]
        path: Option<String>,
        /// Path file record (`path`, `mode`, `samples`).
        #[arg(long)]
        path_file: Option<PathBuf>,
        #[arg(long, default_value = "coeff")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_TOL_T)]
        tol: f64,
        #[arg(long, default_value_t = TRACE_CAP)]
        cap: usize,
        /// Write the path as a path file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Operadic insertion of parts into a base configuration.
    Compose {
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        /// One part per base point, in base order.
        #[arg(long = "part", allow_hyphen_values = true)]
        parts: Vec<String>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = COMPOSE_CAP)]
        cap: usize,
    },
    /// Doubling map: insert a copy of a point at offset eps along a direction.
    Double {
        #[arg(long, allow_hyphen_values = true)]
        config: String,
        #[arg(long)]
        label: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1:0")]
        dir: String,
        #[arg(long)]
        eps: f64,
    },
    /// Forgetting map: drop a labelled point.
    Forget {
        #[arg(long, allow_hyphen_values = true)]
        config: String,
        #[arg(long)]
        label: String,
    },
    /// Canonical coordinates, flat metric and potential.
    Frobenius {
        #[arg(long)]
        poly: String,
    },
    /// SVG diagram of the skizze.
    Render {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 512)]
        size: u32,
        #[arg(long, default_value_t = TRACE_CAP)]
        cap: usize,
    },
    /// Line-protocol service on standard streams or a TCP address.
    Serve {
        #[arg(long)]
        listen: Option<String>,
    },
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(e.to_string())
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(io_err)
}

fn run(cli: Cli) -> Result<Option<String>> {
    let record: Record = match cli.verb {
        Verb::Roots { poly, tol } => commands::roots(&commands::parse_poly(&poly)?, tol)?,
        Verb::Classify { poly, cap } => commands::classify_poly(&commands::parse_poly(&poly)?, cap)?,
        Verb::Trace { poly, cap } => commands::trace_poly(&commands::parse_poly(&poly)?, cap)?,
        Verb::EnumerateGeneric { n, cap } => commands::enumerate(n, cap)?,
        Verb::Poset { n, cap, catalog, neighbors } => {
            let poset = commands::build_poset(n, cap)?;
            if let Some(file) = catalog {
                std::fs::write(file, poset.catalog()).map_err(io_err)?;
            }
            match neighbors {
                Some(code) => commands::neighbors(&poset, &CanonicalCode(code))?,
                None => commands::poset_record(&poset),
            }
        }
        Verb::Deform { path, path_file, mode, samples, tol, cap, export } => {
            let spec = match (path, path_file) {
                (Some(p), None) => PathSpec::parse(&p, &mode, samples)?,
                (None, Some(f)) => PathSpec::from_record(&Record::parse(&read(&f)?)?)?,
                _ => return Err(Error::InvalidArgument("give exactly one of --path and --path-file".into())),
            };
            if let Some(f) = export {
                std::fs::write(f, spec.to_record().to_string()).map_err(io_err)?;
            }
            commands::deform(&spec, tol, cap)?
        }
        Verb::Compose { base, parts, eps, verify, cap } => {
            let base = commands::parse_config(&base)?;
            let parts = parts.iter().map(|p| commands::parse_config(p)).collect::<Result<Vec<_>>>()?;
            commands::compose(&base, &parts, eps, verify, cap)?
        }
        Verb::Double { config, label, dir, eps } => {
            commands::double(&commands::parse_config(&config)?, &label, parse_complex(&dir)?, eps)?
        }
        Verb::Forget { config, label } => commands::forget(&commands::parse_config(&config)?, &label)?,
        Verb::Frobenius { poly } => commands::frobenius(&commands::parse_poly(&poly)?)?,
        Verb::Render { poly, size, cap } => {
            let p = commands::parse_poly(&poly)?;
            commands::check_cap(p.degree(), cap)?;
            let s = trace(&p, &TraceConfig::default())?;
            let svg = render_svg(&s, &RenderSpec { size, ..RenderSpec::default() });
            return match cli.out {
                Some(f) => std::fs::write(f, svg).map(|_| None).map_err(io_err),
                None => Ok(Some(svg)),
            };
        }
        Verb::Serve { listen } => {
            match listen {
                Some(addr) => serve_tcp(addr.as_str(), |a| eprintln!("listening on {a}")).map_err(io_err)?,
                None => Service::new().run(BufReader::new(stdin()), stdout()).map_err(io_err)?,
            }
            return Ok(None);
        }
    };
    let text = record.to_string();
    match cli.out {
        Some(f) => std::fs::write(f, text).map(|_| None).map_err(io_err),
        None => Ok(Some(text)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Some(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(skizze_cli::exit_code(&e) as u8)
        }
    }
}
