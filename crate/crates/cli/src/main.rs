use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use sortnet_core::certificate::{check_certificate_parallel, generate_certificate, Certificate};
use sortnet_core::dump::Dump;
use sortnet_core::search::MEMO_WIDTH_LIMIT;
use sortnet_core::{
    memo_min_size, van_voorhis_chain, BoolSeqSet, ComparatorNetwork, Error, Search,
};

#[derive(Parser, Debug)]
#[command(name = "sortnet", version, about = "Minimal-size sorting networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Computes s(n) by successive approximation.
    Search {
        n: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Writes the final bounds to this directory.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Single-threaded, reproducible run.
        #[arg(long)]
        deterministic: bool,
    },
    /// Builds a certificate from a bounds dump.
    GenCert {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Checks a certificate and prints the certified `n k`.
    CheckCert {
        path: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// s(n) by plain memoized recursion, for small n.
    Oracle { n: usize },
    /// Chains a known s(n) up to a larger channel count.
    Bound {
        /// Known value as `n=s`.
        #[arg(long, value_parser = parse_known)]
        from: (usize, u32),
        #[arg(long)]
        to: usize,
    },
    /// Tests a network file with the zero-one principle.
    VerifyNetwork { path: PathBuf },
}

fn parse_known(s: &str) -> Result<(usize, u32), String> {
    let (n, v) = s.split_once('=').ok_or("expected n=s")?;
    Ok((
        n.trim()
            .parse()
            .map_err(|e| format!("channel count: {e}"))?,
        v.trim().parse().map_err(|e| format!("size: {e}"))?,
    ))
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Corrupt(_) => 3,
            Error::Internal(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn set_threads(threads: usize) -> Result<(), Failure> {
    if threads == 0 {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Search {
            n,
            threads,
            dump,
            deterministic,
        } => {
            let threads = if deterministic { 1 } else { threads };
            set_threads(threads)?;
            let search = Search::new().with_threads(threads)?;
            let started = Instant::now();
            let s = search.min_size(n)?;
            println!("s({n}) = {s}");
            eprintln!(
                "{} table entries, {:.2?}",
                search.table().len(),
                started.elapsed()
            );
            if let Some(dir) = dump {
                let dump = Dump::from_table(n, s, search.table());
                dump.write(&dir)?;
                eprintln!("dumped {} sets to {}", dump.set_count(), dir.display());
            }
            Ok(0)
        }
        Command::GenCert { dump, out, threads } => {
            set_threads(threads)?;
            let dump = Dump::read(&dump)?;
            let cert = generate_certificate(&dump)?;
            fs::write(&out, cert.encode()).map_err(|e| Failure {
                code: 3,
                message: format!("cannot write {}: {e}", out.display()),
            })?;
            println!("{} steps", cert.steps.len());
            Ok(0)
        }
        Command::CheckCert { path, threads } => {
            set_threads(threads)?;
            let cert = Certificate::decode(&read(&path)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            match check_certificate_parallel(&cert) {
                Ok((n, k)) => {
                    println!("{n} {k}");
                    Ok(0)
                }
                Err(e) => {
                    println!("rejected: {e}");
                    Ok(1)
                }
            }
        }
        Command::Oracle { n } => {
            if n == 0 || n > MEMO_WIDTH_LIMIT {
                return Err(Failure::usage(format!(
                    "oracle supports 1..={MEMO_WIDTH_LIMIT} channels"
                )));
            }
            println!("s({n}) = {}", memo_min_size(&BoolSeqSet::full(n)?)?);
            Ok(0)
        }
        Command::Bound { from: (n, s), to } => {
            println!("{}", van_voorhis_chain(n, s, to)?);
            Ok(0)
        }
        Command::VerifyNetwork { path } => {
            let text = String::from_utf8(read(&path)?)
                .map_err(|_| Failure::usage(format!("{} is not UTF-8", path.display())))?;
            let net: ComparatorNetwork = text
                .parse()
                .map_err(|e: Error| Failure::usage(format!("{}: {e}", path.display())))?;
            if net.is_sorting_network() {
                println!("SORTS");
                Ok(0)
            } else {
                println!("NOT-SORTING");
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
