//! `polarsim`: construct polar codes, decode single frames, train QLBP tables
//! and run Monte Carlo sweeps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use polar_qlbp::channel::seeded_rng;
use polar_qlbp::sim::{code_sigma, emit_csv, random_frame, train_qlbp_driver, write_csv, DecoderKind, SimConfig, Simulator};
use polar_qlbp::PolarCode;

#[derive(Parser)]
#[command(name = "polarsim", version, about = "Polar code BP/QLBP link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code with the Bhattacharyya construction and write its frozen-set file.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = polar_qlbp::code::DEFAULT_DESIGN_EBN0_DB, allow_hyphen_values = true)]
        design_ebn0: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode one random frame and report what happened.
    Decode {
        #[command(flatten)]
        common: Overrides,
        /// Channel Eb/N0 in dB.
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        ebn0: f64,
        /// Write the BP message grid after every iteration as CSV.
        #[arg(long)]
        dump_messages: Option<PathBuf>,
    },
    /// Train a QLBP Q-table.
    Train {
        #[command(flatten)]
        common: Overrides,
        #[arg(long)]
        frames: Option<u64>,
        /// Training Eb/N0 in dB.
        #[arg(long, allow_hyphen_values = true)]
        ebn0: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an Eb/N0 sweep and write the curve as CSV.
    Simulate {
        #[command(flatten)]
        common: Overrides,
        /// Comma-separated Eb/N0 points in dB.
        #[arg(long, allow_hyphen_values = true)]
        ebn0: Option<String>,
        #[arg(long)]
        max_frames: Option<u64>,
        #[arg(long)]
        min_frame_errors: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags shared by the decoding subcommands. Each one overrides the
/// corresponding key of `--config`.
#[derive(Args)]
struct Overrides {
    /// `key=value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    decoder: Option<DecoderKind>,
    #[arg(long)]
    list_size: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long)]
    qtable: Option<PathBuf>,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    no_early_stop: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    design_ebn0: Option<f64>,
}

impl Overrides {
    fn load(&self) -> Result<SimConfig> {
        let mut c = match &self.config {
            Some(p) => SimConfig::load(p)?,
            None => SimConfig::default(),
        };
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.decoder {
            c.decoder = v;
        }
        if self.list_size.is_some() {
            c.list_size = self.list_size;
        }
        if self.beta.is_some() {
            c.beta = self.beta;
        }
        if self.qtable.is_some() {
            c.qtable_path = self.qtable.clone();
        }
        if let Some(v) = self.t_max {
            c.t_max = v;
        }
        if self.no_early_stop {
            c.early_stop = false;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.design_ebn0 {
            c.design_ebn0_db = v;
        }
        Ok(c)
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn bits(b: &[u8]) -> String {
    b.iter().map(|&x| char::from(b'0' + x)).collect()
}

fn construct(n: usize, k: usize, design: f64, out: &Option<PathBuf>) -> Result<()> {
    let code = PolarCode::construct(n, k, design)?;
    let mut w = output(out)?;
    w.write_all(code.to_frozen_file().as_bytes())?;
    w.flush()?;
    Ok(())
}

fn decode(common: &Overrides, ebn0: f64, dump: &Option<PathBuf>) -> Result<()> {
    let config = common.load()?;
    let sim = Simulator::new(config.clone())?;
    let code = sim.code();
    let sigma = code_sigma(code, ebn0);
    let mut rng = seeded_rng(config.seed);
    let (info, llrs) = random_frame(code, sigma, &mut rng)?;

    let mut dump_writer = match dump {
        Some(p) => {
            if !config.decoder.is_iterative() {
                bail!("--dump-messages needs a BP-family decoder, got {}", config.decoder);
            }
            let mut w = csv::Writer::from_path(p).with_context(|| format!("cannot create {}", p.display()))?;
            w.write_record(["iteration", "stage", "node", "L", "R"])?;
            Some(w)
        }
        None => None,
    };
    let mut dump_error = None;
    let (decoded, iterations) = sim.decode_observed(&llrs, |grid| {
        let Some(w) = dump_writer.as_mut() else { return };
        for stage in 0..=grid.stages() {
            for node in 0..grid.len() {
                let record = [
                    grid.iteration().to_string(),
                    stage.to_string(),
                    node.to_string(),
                    grid.left(stage, node).to_string(),
                    grid.right(stage, node).to_string(),
                ];
                if let Err(e) = w.write_record(&record) {
                    dump_error.get_or_insert(e);
                }
            }
        }
    })?;
    if let Some(e) = dump_error {
        return Err(e).context("writing message dump");
    }
    if let Some(mut w) = dump_writer {
        w.flush()?;
    }

    let errors = info.iter().zip(&decoded).filter(|(a, b)| a != b).count();
    println!("decoder        {}", config.decoder);
    println!("N, K           {}, {}", code.len(), code.k());
    println!("Eb/N0, sigma   {ebn0} dB, {sigma:.6}");
    println!("info set       {:?}", code.info_set());
    println!("sent           {}", bits(&info));
    println!("decoded        {}", bits(&decoded));
    println!("bit errors     {errors}");
    if config.decoder.is_iterative() {
        println!("iterations     {iterations}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn train(
    common: &Overrides,
    frames: Option<u64>,
    ebn0: Option<f64>,
    alpha: Option<f64>,
    gamma: Option<f64>,
    epsilon: Option<f64>,
    out: &PathBuf,
) -> Result<()> {
    let mut config = common.load()?;
    if common.decoder.is_some_and(|d| d != DecoderKind::Qlbp) {
        bail!("train only supports the qlbp decoder");
    }
    config.decoder = DecoderKind::Qlbp;
    config.qtable_path = None;
    if let Some(v) = frames {
        config.train_frames = v;
    }
    if let Some(v) = ebn0 {
        config.train_ebn0_db = v;
    }
    if let Some(v) = alpha {
        config.alpha = v;
    }
    if let Some(v) = gamma {
        config.gamma = v;
    }
    if let Some(v) = epsilon {
        config.epsilon = v;
    }
    let report = train_qlbp_driver(&config, out)?;
    let n = report.successes.len();
    let tail = n.min(1000);
    println!(
        "trained {} frames at {} dB; success rate over last {} frames {:.4}; wrote {}",
        n,
        config.train_ebn0_db,
        tail,
        report.success_rate(n - tail..n),
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    common: &Overrides,
    ebn0: &Option<String>,
    max_frames: Option<u64>,
    min_frame_errors: Option<u64>,
    workers: Option<usize>,
    out: &Option<PathBuf>,
) -> Result<()> {
    let mut config = common.load()?;
    if let Some(v) = ebn0 {
        config.set("ebn0_points", v)?;
    }
    if let Some(v) = max_frames {
        config.max_frames = v;
    }
    if let Some(v) = min_frame_errors {
        config.min_frame_errors = v;
    }
    if let Some(v) = workers {
        config.workers = v;
    }
    let sim = Simulator::new(config.clone())?;
    let points = sim.run_sweep()?;
    let mut extra = Vec::new();
    if let Some(b) = sim.beta() {
        extra.push(("effective_beta", b.to_string()));
    }
    match out {
        Some(p) => emit_csv(&config, &extra, &points, p)?,
        None => write_csv(std::io::stdout().lock(), &config, &extra, &points)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Construct { n, k, design_ebn0, out } => construct(*n, *k, *design_ebn0, out),
        Command::Decode {
            common,
            ebn0,
            dump_messages,
        } => decode(common, *ebn0, dump_messages),
        Command::Train {
            common,
            frames,
            ebn0,
            alpha,
            gamma,
            epsilon,
            out,
        } => train(common, *frames, *ebn0, *alpha, *gamma, *epsilon, out),
        Command::Simulate {
            common,
            ebn0,
            max_frames,
            min_frame_errors,
            workers,
            out,
        } => simulate(common, ebn0, *max_frames, *min_frame_errors, *workers, out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
