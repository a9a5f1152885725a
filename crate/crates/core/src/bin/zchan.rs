use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use zchan::error::Error;
use zchan::harness::{
    emit_csv, emit_diversity_csv, estimate_diversity, read_config_file, write_csv, write_metadata, BerRecord,
    DiversityEstimate, Engine, Scheme, SchemeSel, SimConfig, Stream,
};
use zchan::selfcheck;

#[derive(Parser)]
#[command(name = "zchan", version, about = "Alamouti interference cancellation on the 2x2 MIMO Z channel")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// BER sweep over the SNR grid, one CSV row per (SNR, scheme, stream).
    Sweep(SimArgs),
    /// Sweep, then fit diversity slopes for every stream.
    Diversity {
        #[command(flatten)]
        sim: SimArgs,
        /// Fit window in dB, `lo:hi`.
        #[arg(long, default_value = "20:30")]
        window: String,
    },
    /// IC against TDMA at equal rate; prints user-average BERs.
    Compare(SimArgs),
    /// Quick internal consistency checks.
    Selfcheck,
}

#[derive(Args, Clone, Default)]
struct SimArgs {
    /// ic, tdma, both or oracle
    #[arg(long)]
    scheme: Option<String>,
    /// qpsk or qam16
    #[arg(long = "mod")]
    modulation: Option<String>,
    /// SNR grid in dB, `lo:step:hi`
    #[arg(long)]
    snr: Option<String>,
    #[arg(long = "min-errors")]
    min_errors: Option<String>,
    #[arg(long = "max-blocks")]
    max_blocks: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// Output CSV; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SimArgs {
    fn build(&self, base: SimConfig) -> zchan::Result<SimConfig> {
        let mut cfg = base;
        if let Some(path) = &self.config {
            for (k, v) in read_config_file(path)? {
                cfg.apply(&k, &v)?;
            }
        }
        let flags = [
            ("scheme", &self.scheme),
            ("mod", &self.modulation),
            ("snr", &self.snr),
            ("min-errors", &self.min_errors),
            ("max-blocks", &self.max_blocks),
            ("seed", &self.seed),
            ("workers", &self.workers),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.apply(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_window(s: &str) -> zchan::Result<(f64, f64)> {
    let bad = || Error::Config(format!("window '{s}' is not lo:hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn run_sweep(cfg: &SimConfig) -> zchan::Result<Vec<BerRecord>> {
    let engine = Engine::new(cfg.clone())?;
    engine.sweep_with(|r| {
        eprintln!(
            "{:>6} dB {:<6} blocks {:>10}  errors {:?}  degenerate {}",
            r.snr_db, r.scheme, r.blocks, r.bit_errors, r.degenerate
        )
    })
}

fn write_records(records: &[BerRecord], out: Option<&Path>) -> zchan::Result<()> {
    match out {
        Some(p) => emit_csv(records, p),
        None => write_csv(records, std::io::stdout().lock()),
    }
}

fn cmd_sweep(args: &SimArgs) -> zchan::Result<()> {
    let cfg = args.build(SimConfig::default())?;
    let records = run_sweep(&cfg)?;
    write_records(&records, args.out.as_deref())?;
    if let Some(p) = &args.out {
        write_metadata(p, &cfg, &[])?;
    }
    Ok(())
}

fn cmd_diversity(args: &SimArgs, window: &str) -> zchan::Result<()> {
    let window = parse_window(window)?;
    let cfg = args.build(SimConfig::default())?;
    let records = run_sweep(&cfg)?;
    let mut estimates: Vec<DiversityEstimate> = Vec::new();
    for &scheme in cfg.scheme.schemes() {
        let recs: Vec<BerRecord> = records.iter().filter(|r| r.scheme == scheme).cloned().collect();
        for s in Stream::ALL {
            match estimate_diversity(&recs, s, window, cfg.min_bit_errors) {
                Ok(d) => {
                    eprintln!("{scheme} {s}: d_hat = {:.3} over {} points", d.d_hat, d.points.len());
                    estimates.push(d);
                }
                Err(e @ Error::InsufficientData { .. }) => eprintln!("{scheme} {s}: {e}"),
                Err(e) => return Err(e),
            }
        }
    }
    match &args.out {
        Some(p) => {
            emit_diversity_csv(&estimates, p)?;
            let mut ber_path = p.as_os_str().to_owned();
            ber_path.push(".ber.csv");
            emit_csv(&records, Path::new(&ber_path))?;
            write_metadata(p, &cfg, &estimates)?;
        }
        None => zchan::harness::write_diversity_csv(&estimates, std::io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_compare(args: &SimArgs) -> zchan::Result<()> {
    let base = SimConfig { scheme: SchemeSel::Both, ..SimConfig::default() };
    let cfg = args.build(base)?;
    if cfg.scheme != SchemeSel::Both {
        return Err(Error::Config("compare needs scheme 'both'".into()));
    }
    let records = run_sweep(&cfg)?;
    if let Some(p) = &args.out {
        emit_csv(&records, p)?;
        write_metadata(p, &cfg, &[])?;
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "{:>8} {:>14} {:>14}  better", "snr_db", "ic_avg_ber", "tdma_avg_ber")?;
    for ic in records.iter().filter(|r| r.scheme == Scheme::Ic) {
        let Some(td) = records.iter().find(|r| r.scheme == Scheme::Tdma && r.snr_db == ic.snr_db) else {
            continue;
        };
        let (a, b) = (ic.user_average_ber(), td.user_average_ber());
        let better = if a < b {
            "ic"
        } else if b < a {
            "tdma"
        } else {
            "tie"
        };
        writeln!(out, "{:>8} {:>14.4e} {:>14.4e}  {better}", ic.snr_db, a, b)?;
    }
    Ok(())
}

fn cmd_selfcheck() -> bool {
    let mut ok = true;
    for r in selfcheck::run_all() {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        ok &= r.passed;
    }
    ok
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Io(_) | Error::Csv(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.cmd {
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Diversity { sim, window } => cmd_diversity(sim, window),
        Cmd::Compare(a) => cmd_compare(a),
        Cmd::Selfcheck => {
            return if cmd_selfcheck() { ExitCode::SUCCESS } else { ExitCode::from(3) };
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
