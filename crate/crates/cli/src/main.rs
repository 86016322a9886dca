//! `barscan`: UPC-A encoding, scan simulation, greedy decoding, recovery
//! diagnostics, and Monte-Carlo phase diagrams.

use barscan_core::analysis::{block_diagnostics, gterm_bound, noise_ceiling, sigma_bound};
use barscan_core::decoder::{estimate_alpha_with_map, greedy_decode, DecodeOptions};
use barscan_core::forward::{forward_map, make_grid, synthesize_clean_with_map};
use barscan_core::noise::{absolute_noise, relative_noise, trial_seed};
use barscan_core::phase::{
    parse_range, run_phase_diagram, write_csv, write_pgm, AlphaHandling, Axis2, PhaseDiagramSpec,
};
use barscan_core::signal_io::{read_signal, write_signal};
use barscan_core::symbology::{build_dictionary, encode_digits};
use barscan_core::{DigitString, GaussianParams};
use clap::{Args, Parser, Subcommand};
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "barscan", version, about = "UPC-A bar code scanning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the 95-character 0/1 bar string of a 12-digit code.
    Encode {
        /// The 12 digits, no separators.
        digits: String,
    },
    /// Synthesize a (possibly noisy) scan and write it as a signal file.
    Simulate(SimulateArgs),
    /// Greedily decode a signal file.
    Decode(DecodeArgs),
    /// Sweep recovery diagnostics over a blur grid; CSV on stdout.
    Analyze(AnalyzeArgs),
    /// Monte-Carlo success-probability grid over blur estimate and noise.
    PhaseDiagram(PhaseArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// The 12 digits to encode.
    #[arg(long, conflicts_with = "random_digits", required_unless_present = "random_digits")]
    digits: Option<String>,
    /// Draw the 12 digits uniformly at random from the seed.
    #[arg(long)]
    random_digits: bool,
    /// True blur standard deviation (unit bar widths).
    #[arg(long)]
    sigma: f64,
    /// Amplitude multiplier.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Samples per unit bar width.
    #[arg(long)]
    r: usize,
    /// Relative noise level (L2 fraction of the clean signal).
    #[arg(long, conflicts_with = "xi")]
    nu: Option<f64>,
    /// Absolute noise standard deviation.
    #[arg(long)]
    xi: Option<f64>,
    /// Master seed for digits and noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output signal file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    /// Input signal file.
    #[arg(long)]
    signal: PathBuf,
    /// Blur estimate used by the decoder.
    #[arg(long)]
    sigma_hat: f64,
    /// Known amplitude to decode with.
    #[arg(long, conflicts_with = "estimate_alpha", required_unless_present = "estimate_alpha")]
    alpha_hat: Option<f64>,
    /// Estimate the amplitude from the middle guard.
    #[arg(long)]
    estimate_alpha: bool,
    /// Restrict candidate scoring to each block's rows padded by this many
    /// bars on each side.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Samples per unit bar width.
    #[arg(long)]
    r: usize,
    /// Amplitude multiplier.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Blur grid start:stop:step.
    #[arg(long)]
    sigma_grid: String,
    /// Optional decoder-blur grid; adds sigma_hat, B, and gterm_bound
    /// columns, one row per (sigma, sigma_hat) pair.
    #[arg(long)]
    sigma_hat_grid: Option<String>,
}

#[derive(Args)]
struct PhaseArgs {
    /// True blur standard deviation.
    #[arg(long)]
    sigma: f64,
    /// True amplitude.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Samples per unit bar width.
    #[arg(long)]
    r: usize,
    /// Decoder blur grid start:stop:step.
    #[arg(long)]
    sigma_hat: String,
    /// Relative-noise grid start:stop:step.
    #[arg(long, conflicts_with = "xi", required_unless_present = "xi")]
    nu: Option<String>,
    /// Absolute-noise grid start:stop:step.
    #[arg(long)]
    xi: Option<String>,
    /// Trials per grid cell.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Estimate the amplitude per trial instead of using the true value.
    #[arg(long)]
    estimate_alpha: bool,
    /// CSV output path.
    #[arg(long)]
    csv: PathBuf,
    /// Optional PGM rendering path.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("barscan: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> barscan_core::Result<()> {
    match cli.command {
        Command::Encode { digits } => {
            let digits = DigitString::parse(&digits)?;
            println!("{}", encode_digits(&digits));
        }
        Command::Simulate(args) => simulate(args)?,
        Command::Decode(args) => decode(args)?,
        Command::Analyze(args) => analyze(args)?,
        Command::PhaseDiagram(args) => phase(args)?,
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> barscan_core::Result<()> {
    let digits = match &args.digits {
        Some(s) => DigitString::parse(s)?,
        None => {
            let mut rng = ChaCha12Rng::seed_from_u64(trial_seed(args.seed, 1, 0, 0));
            let mut d = [0u8; 12];
            for v in &mut d {
                *v = (rng.next_u64() % 10) as u8;
            }
            DigitString::new(d)?
        }
    };
    let dict = build_dictionary();
    let grid = make_grid(args.r)?;
    let map = forward_map(GaussianParams::new(args.sigma, args.alpha)?, &grid, &dict)?;
    let mut signal = synthesize_clean_with_map(&digits, &map);

    let noise_seed = trial_seed(args.seed, 2, 0, 0);
    let h = match (args.nu, args.xi) {
        (Some(nu), None) => Some(relative_noise(&signal, nu, noise_seed)?),
        (None, Some(xi)) => Some(absolute_noise(signal.len(), xi, noise_seed)?),
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap rejects --nu with --xi"),
    };
    if let Some(h) = h {
        for (s, n) in signal.samples.iter_mut().zip(&h) {
            *s += n;
        }
        signal.provenance.nu = args.nu;
        signal.provenance.xi = args.xi;
        signal.provenance.seed = Some(args.seed);
    }
    write_signal(&args.out, &signal)?;
    println!("wrote {} ({} samples, digits {})", args.out.display(), signal.len(), digits);
    Ok(())
}

fn decode(args: DecodeArgs) -> barscan_core::Result<()> {
    let signal = read_signal(&args.signal)?;
    let dict = build_dictionary();
    let grid = signal.grid();
    let unit = forward_map(GaussianParams::new(args.sigma_hat, 1.0)?, &grid, &dict)?;
    let alpha_hat = match args.alpha_hat {
        Some(a) => a,
        None => estimate_alpha_with_map(&signal, &unit)?,
    };
    let map = unit.with_alpha(alpha_hat)?;
    let options = DecodeOptions {
        window: args.window.map(|bars| bars * grid.oversampling()),
        order: None,
    };
    let result = greedy_decode(&signal, &map, &options)?;
    println!("digits: {}", result.digits);
    println!("alpha_hat: {alpha_hat}");
    println!("sigma_hat: {}", args.sigma_hat);
    let norms: Vec<String> = result
        .step_residual_l1
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect();
    println!("residual_l1: {}", norms.join(" "));
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> barscan_core::Result<()> {
    let sigmas = parse_range(&args.sigma_grid)?;
    let sigma_hats = args.sigma_hat_grid.as_deref().map(parse_range).transpose()?;
    let dict = build_dictionary();
    let grid = make_grid(args.r)?;
    match sigma_hats {
        None => {
            println!("sigma,epsilon,mu,noise_ceiling");
            for &sigma in &sigmas {
                let map = forward_map(GaussianParams::new(sigma, args.alpha)?, &grid, &dict)?;
                let d = block_diagnostics(&map);
                println!(
                    "{sigma},{:.6},{:.6},{:.6}",
                    d.epsilon,
                    d.mu,
                    noise_ceiling(sigma, args.alpha, args.r)
                );
            }
        }
        Some(hats) => {
            println!("sigma,epsilon,mu,noise_ceiling,sigma_hat,B,gterm_bound");
            for &sigma in &sigmas {
                let map = forward_map(GaussianParams::new(sigma, args.alpha)?, &grid, &dict)?;
                let d = block_diagnostics(&map);
                for &sh in &hats {
                    let sens = sigma_bound(sigma, sh)?;
                    println!(
                        "{sigma},{:.6},{:.6},{:.6},{sh},{:.6},{:.6}",
                        d.epsilon,
                        d.mu,
                        noise_ceiling(sigma, args.alpha, args.r),
                        sens.b,
                        gterm_bound(&sens, args.r)
                    );
                }
            }
        }
    }
    Ok(())
}

fn phase(args: PhaseArgs) -> barscan_core::Result<()> {
    let axis2 = match (&args.nu, &args.xi) {
        (Some(nu), None) => Axis2::Nu(parse_range(nu)?),
        (None, Some(xi)) => Axis2::Xi(parse_range(xi)?),
        _ => unreachable!("clap enforces exactly one of --nu/--xi"),
    };
    let spec = PhaseDiagramSpec {
        sigma: args.sigma,
        alpha: args.alpha,
        r: args.r,
        sigma_hat: parse_range(&args.sigma_hat)?,
        axis2,
        trials: args.trials,
        seed: args.seed,
        alpha_handling: if args.estimate_alpha {
            AlphaHandling::Estimated
        } else {
            AlphaHandling::Known
        },
    };
    let result = run_phase_diagram(&spec)?;
    write_csv(&result, &args.csv)?;
    if let Some(pgm) = &args.pgm {
        write_pgm(&result, pgm)?;
    }
    eprintln!(
        "{} cells x {} trials in {:.2}s",
        result.successes.len(),
        spec.trials,
        result.wall_time_s
    );
    Ok(())
}
