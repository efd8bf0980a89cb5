use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use irc_core::af::{af_rate, af_sum_rate_gain_with, optimal_gain, saturation_gain};
use irc_core::df::{df_rates, df_sum_rate_search, df_sum_rate_search_fixed_nu, DfParams};
use irc_core::discrete::{bi_level_bounds, conditional_mutual_information, single_level_bounds, DiscreteBounds};
use irc_core::ef::{
    ef_bi_min_noise, ef_bi_rate, ef_bi_scenario, ef_bi_sum_rate_search, ef_sl_params, ef_sl_rate, EfBiParams,
};
use irc_core::scenario::{PaPolicy, Protocol, ProtocolSet, ScenarioConfig, SweepGrid};
use irc_core::{ChannelInstance, RatePair, User};
use irc_sim::config::{parse_r0_exponent, ConfigFile};
use irc_sim::pmf::{Distribution, PmfFile};
use irc_sim::table::{format_g, write_compression, write_map, CompressionRow, MapRow, SIGNIFICANT_DIGITS};
use irc_sim::{random, sweep};

/// Achievable rates of the two-user Gaussian interference relay channel.
#[derive(Parser, Debug)]
#[command(name = "irc", version)]
struct Cli {
    /// Scenario config (TOML). The reference scenario is used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Protocol(s), comma separated. `rate` needs exactly one.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    protocol: Vec<ProtocolArg>,
    /// Relay power split policy (overrides the config).
    #[arg(long, global = true, value_enum)]
    pa: Option<PaArg>,
    /// Exponent k in the single-level bound 2^(k R0) - 1 (overrides the config).
    #[arg(long, global = true, value_parser = ["2", "1"])]
    r0_exponent: Option<String>,
    /// Grid points per d0 (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    resolution: Option<u32>,
    /// Seed for randomly drawn inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Af,
    Df,
    EfSl,
    EfBl,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Protocol {
        match p {
            ProtocolArg::Af => Protocol::Af,
            ProtocolArg::Df => Protocol::Df,
            ProtocolArg::EfSl => Protocol::EfSl,
            ProtocolArg::EfBl => Protocol::EfBl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PaArg {
    Uniform,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RandomKind {
    Bi,
    Single,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate pair of one protocol on one channel.
    Rate(RateArgs),
    /// Parameter search for each selected protocol on one channel.
    Optimize(PositionArgs),
    /// Protocol dominance map as CSV.
    Map(GridArgs),
    /// Sum rates along x at a fixed y as CSV.
    Slice {
        /// Relay y coordinate in units of d0 (default: `[sweep].slice_y`).
        #[arg(long, allow_hyphen_values = true)]
        y: Option<f64>,
    },
    /// Single-level against bi-level compression map as CSV.
    Slmap(GridArgs),
    /// Rate bounds of a discrete memoryless compression scheme.
    Discrete {
        /// Distribution file (TOML).
        #[arg(long, value_name = "FILE", conflicts_with = "random")]
        pmf: Option<PathBuf>,
        /// Draw a random factorization instead of reading one.
        #[arg(long, value_enum, required_unless_present = "pmf")]
        random: Option<RandomKind>,
        /// Largest alphabet of a random draw.
        #[arg(long, default_value_t = 2)]
        max_alphabet: usize,
        /// Also write the drawn distribution as TOML to this file.
        #[arg(long, value_name = "PATH", requires = "random")]
        save_pmf: Option<PathBuf>,
    },
    /// Print the reference scenario config.
    Defaults,
}

#[derive(Args, Debug)]
struct PositionArgs {
    /// Relay x coordinate in units of d0 (default: `[layout].relay`).
    #[arg(long, allow_hyphen_values = true, requires = "yr")]
    xr: Option<f64>,
    /// Relay y coordinate in units of d0.
    #[arg(long, allow_hyphen_values = true, requires = "xr")]
    yr: Option<f64>,
}

#[derive(Args, Debug)]
struct RateArgs {
    #[command(flatten)]
    position: PositionArgs,
    /// AF relay gain (default: the sum-rate optimal gain).
    #[arg(long)]
    gain: Option<f64>,
    /// DF cooperation degree of source 1 (default: searched).
    #[arg(long, requires = "tau2")]
    tau1: Option<f64>,
    /// DF cooperation degree of source 2.
    #[arg(long, requires = "tau1")]
    tau2: Option<f64>,
    /// Relay power share of user 1 (DF and bi-level EF).
    #[arg(long, requires = "nu2")]
    nu1: Option<f64>,
    /// Relay power share of user 2.
    #[arg(long, requires = "nu1")]
    nu2: Option<f64>,
    /// Single-level compression noise (default: smallest admissible).
    #[arg(long)]
    nwz: Option<f64>,
    /// Bi-level compression noise of user 1 (default: smallest admissible).
    #[arg(long)]
    nwz1: Option<f64>,
    /// Bi-level compression noise of user 2 (default: smallest admissible).
    #[arg(long)]
    nwz2: Option<f64>,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Grid bounds in units of d0 (default: the `[sweep]` bounds for `map`,
    /// `-2,3,-2,3` for `slmap`).
    #[arg(long, value_delimiter = ',', num_args = 4, allow_hyphen_values = true,
          value_names = ["XMIN", "XMAX", "YMIN", "YMAX"])]
    bounds: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let mut file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::defaults(),
    };
    if let Some(pa) = cli.pa {
        file.optimizer.pa_policy = match pa {
            PaArg::Uniform => irc_sim::config::PaPolicyName::Uniform,
            PaArg::Optimal => irc_sim::config::PaPolicyName::Optimal,
        };
    }
    if let Some(k) = &cli.r0_exponent {
        file.optimizer.r0_exponent = k.parse().expect("restricted by clap");
        parse_r0_exponent(file.optimizer.r0_exponent)?;
    }
    let mut scenario = file.scenario()?;
    if !cli.protocol.is_empty() {
        scenario.protocols = cli.protocol.iter().map(|&p| Protocol::from(p)).collect();
    }

    // Output is collected first so that a failing command writes nothing.
    let mut out: Vec<u8> = Vec::new();

    match &cli.command {
        Command::Defaults => {
            writeln!(out, "# Reference scenario: d0 = 5 m, path-loss exponent 2, relay height 0.1 m,")?;
            writeln!(out, "# source-destination distances 11.5 m and 10 m, cross distances 11 m and 14 m.")?;
            writeln!(out, "# Uniform transmit powers of 10 and unit noise variances.")?;
            writeln!(out)?;
            write!(out, "{}", ConfigFile::defaults().to_toml()?)?;
        }
        Command::Rate(args) => {
            let protocol = match cli.protocol.as_slice() {
                [p] => Protocol::from(*p),
                [] => bail!("rate needs --protocol"),
                _ => bail!("rate takes exactly one --protocol"),
            };
            let ch = channel(&file, &scenario, &args.position)?;
            rate(&mut out, &ch, &scenario, protocol, args)?;
        }
        Command::Optimize(pos) => {
            let ch = channel(&file, &scenario, pos)?;
            optimize(&mut out, &ch, &scenario)?;
        }
        Command::Map(grid) => {
            apply_grid(&mut scenario, grid, None, cli.resolution)?;
            let map = sweep::dominance_map(&scenario)?;
            let rows: Vec<MapRow> = map.cells.iter().map(MapRow::from).collect();
            write_map(&mut out, &rows)?;
            report_infeasible(map.cells.iter().map(|c| !c.infeasible.is_empty()));
        }
        Command::Slice { y } => {
            let y = y.unwrap_or(file.sweep.slice_y);
            let ppd = cli.resolution.unwrap_or(file.sweep.slice_points_per_d0);
            let cells = sweep::sum_rate_slice(&scenario, y, ppd)?;
            let rows: Vec<MapRow> = cells.iter().map(MapRow::from).collect();
            write_map(&mut out, &rows)?;
            report_infeasible(cells.iter().map(|c| !c.infeasible.is_empty()));
        }
        Command::Slmap(grid) => {
            apply_grid(&mut scenario, grid, Some(SweepGrid::compression_map()), cli.resolution)?;
            let map = sweep::sl_vs_bl_map(&scenario)?;
            let rows: Vec<CompressionRow> = map.cells.iter().map(CompressionRow::from).collect();
            write_compression(&mut out, &rows)?;
            report_infeasible(map.cells.iter().map(|c| !c.infeasible.is_empty()));
        }
        Command::Discrete {
            pmf,
            random: kind,
            max_alphabet,
            save_pmf,
        } => {
            let file = match (pmf, kind) {
                (Some(path), _) => PmfFile::load(path)?,
                (None, Some(kind)) => {
                    if *max_alphabet < 1 {
                        bail!("--max-alphabet must be at least 1");
                    }
                    let mut rng = random::rng(cli.seed);
                    let f = match kind {
                        RandomKind::Bi => PmfFile::from_bi_level(&random::bi_level(&mut rng, *max_alphabet)),
                        RandomKind::Single => {
                            PmfFile::from_single_level(&random::single_level(&mut rng, *max_alphabet))
                        }
                    };
                    if let Some(path) = save_pmf {
                        std::fs::write(path, f.to_toml()?)
                            .with_context(|| format!("cannot write {}", path.display()))?;
                    }
                    f
                }
                (None, None) => unreachable!("clap requires one of --pmf and --random"),
            };
            discrete(&mut out, &file.distribution()?)?;
        }
    }
    match &cli.out {
        Some(path) => {
            let mut f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            f.write_all(&out)?;
            f.flush()?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&out)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn g(x: f64) -> String {
    format_g(x, SIGNIFICANT_DIGITS)
}

fn channel(file: &ConfigFile, scenario: &ScenarioConfig, pos: &PositionArgs) -> Result<ChannelInstance> {
    match (pos.xr, pos.yr) {
        (Some(x), Some(y)) => {
            if file.gains.is_some() {
                bail!("--xr/--yr cannot be combined with explicit [gains]");
            }
            Ok(scenario.channel_at(x, y)?)
        }
        _ => file.channel(),
    }
}

fn apply_grid(
    scenario: &mut ScenarioConfig,
    args: &GridArgs,
    fallback: Option<SweepGrid>,
    resolution: Option<u32>,
) -> Result<()> {
    let ppd = scenario.grid.points_per_d0;
    if let Some(b) = &args.bounds {
        scenario.grid.x_min = b[0];
        scenario.grid.x_max = b[1];
        scenario.grid.y_min = b[2];
        scenario.grid.y_max = b[3];
    } else if let Some(f) = fallback {
        scenario.grid = f;
        scenario.grid.points_per_d0 = ppd;
    }
    if let Some(r) = resolution {
        scenario.grid.points_per_d0 = r;
    }
    scenario.grid.validate().context("invalid grid")?;
    Ok(())
}

fn report_infeasible(flags: impl Iterator<Item = bool>) {
    let n = flags.filter(|&f| f).count();
    if n > 0 {
        eprintln!("note: {n} cell(s) had an infeasible protocol, reported as rate 0");
    }
}

fn print_rates(out: &mut dyn Write, r: &RatePair) -> Result<()> {
    writeln!(out, "r1 = {}", g(r.r1))?;
    writeln!(out, "r2 = {}", g(r.r2))?;
    writeln!(out, "sum = {}", g(r.sum()))?;
    Ok(())
}

fn split(args: &RateArgs) -> Option<(f64, f64)> {
    args.nu1.zip(args.nu2)
}

fn rate(
    out: &mut dyn Write,
    ch: &ChannelInstance,
    scenario: &ScenarioConfig,
    protocol: Protocol,
    args: &RateArgs,
) -> Result<()> {
    let opt = &scenario.optimizer;
    let optimal_pa = scenario.pa_policy == PaPolicy::Optimal;
    writeln!(out, "protocol = {}", protocol.tag())?;
    match protocol {
        Protocol::Af => {
            let gain = match args.gain {
                Some(a) => a,
                None => af_sum_rate_gain_with(ch, opt.af_tolerance, opt.af_scan_points)?.0,
            };
            let r = RatePair::new(af_rate(ch, gain, User::One)?, af_rate(ch, gain, User::Two)?);
            writeln!(out, "gain = {}", g(gain))?;
            writeln!(out, "saturation_gain = {}", g(saturation_gain(ch)))?;
            print_rates(out, &r)?;
        }
        Protocol::Df => {
            let nu = split(args);
            let (params, r) = match (args.tau1.zip(args.tau2), nu) {
                (Some((t1, t2)), nu) => {
                    let (n1, n2) = nu.unwrap_or((0.5, 0.5));
                    let p = DfParams::new(t1, t2, n1, n2)?;
                    (p, df_rates(ch, &p))
                }
                (None, Some(nu)) => df_sum_rate_search_fixed_nu(ch, nu, opt.df_grid_points)?,
                (None, None) if optimal_pa => df_sum_rate_search(ch, opt.pa_grid_points)?,
                (None, None) => df_sum_rate_search_fixed_nu(ch, (0.5, 0.5), opt.df_grid_points)?,
            };
            writeln!(out, "tau1 = {}", g(params.tau1))?;
            writeln!(out, "tau2 = {}", g(params.tau2))?;
            writeln!(out, "nu1 = {}", g(params.nu1))?;
            writeln!(out, "nu2 = {}", g(params.nu2))?;
            print_rates(out, &r)?;
        }
        Protocol::EfSl => {
            let min = ef_sl_params(ch, opt.r0_exponent)?;
            let nwz = args.nwz.unwrap_or(min.nwz);
            let r = ef_sl_rate(ch, nwz, opt.r0_exponent)?;
            writeln!(out, "r0 = {}", g(min.r0))?;
            writeln!(out, "nwz_min = {}", g(min.nwz))?;
            writeln!(out, "nwz = {}", g(nwz))?;
            print_rates(out, &r)?;
        }
        Protocol::EfBl => {
            let (nu1, nu2) = match split(args) {
                Some(nu) => nu,
                None if optimal_pa && args.nwz1.is_none() && args.nwz2.is_none() => {
                    let (p, _, _) = ef_bi_sum_rate_search(ch, opt.pa_grid_points)?;
                    (p.nu1, p.nu2)
                }
                None => (0.5, 0.5),
            };
            let scenario = ef_bi_scenario(ch, nu1, nu2)?;
            let (min1, min2) = ef_bi_min_noise(ch, nu1, nu2, scenario)?;
            let params = EfBiParams {
                nu1,
                nu2,
                nwz1: args.nwz1.unwrap_or(min1),
                nwz2: args.nwz2.unwrap_or(min2),
            };
            let r = ef_bi_rate(ch, &params, scenario)?;
            writeln!(out, "scenario = {}", scenario.tag())?;
            writeln!(out, "nu1 = {}", g(nu1))?;
            writeln!(out, "nu2 = {}", g(nu2))?;
            writeln!(out, "nwz1_min = {}", g(min1))?;
            writeln!(out, "nwz2_min = {}", g(min2))?;
            writeln!(out, "nwz1 = {}", g(params.nwz1))?;
            writeln!(out, "nwz2 = {}", g(params.nwz2))?;
            print_rates(out, &r)?;
        }
    }
    Ok(())
}

/// Infeasible operating points are reported, not fatal, so that the other
/// protocols still print.
fn or_note<T>(out: &mut dyn Write, r: irc_core::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_infeasible() => {
            writeln!(out, "infeasible = \"{e}\"")?;
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn optimize(out: &mut dyn Write, ch: &ChannelInstance, scenario: &ScenarioConfig) -> Result<()> {
    let opt = &scenario.optimizer;
    let optimal_pa = scenario.pa_policy == PaPolicy::Optimal;
    let protocols: &ProtocolSet = &scenario.protocols;
    let mut first = true;
    for p in protocols.iter() {
        if !first {
            writeln!(out)?;
        }
        first = false;
        writeln!(out, "[{}]", p.tag())?;
        match p {
            Protocol::Af => {
                writeln!(out, "saturation_gain = {}", g(saturation_gain(ch)))?;
                for user in [User::One, User::Two] {
                    let a = optimal_gain(ch, user);
                    let k = user.number();
                    writeln!(out, "gain{k} = {}", g(a.optimal_gain))?;
                    writeln!(out, "rate{k} = {}", g(a.optimal_rate))?;
                    writeln!(out, "case{k} = \"{:?}\"", a.case)?;
                }
                let (gain, r) = af_sum_rate_gain_with(ch, opt.af_tolerance, opt.af_scan_points)?;
                writeln!(out, "sum_rate_gain = {}", g(gain))?;
                print_rates(out, &r)?;
            }
            Protocol::Df => {
                let (params, r) = if optimal_pa {
                    df_sum_rate_search(ch, opt.pa_grid_points)?
                } else {
                    df_sum_rate_search_fixed_nu(ch, (0.5, 0.5), opt.df_grid_points)?
                };
                writeln!(out, "tau1 = {}", g(params.tau1))?;
                writeln!(out, "tau2 = {}", g(params.tau2))?;
                writeln!(out, "nu1 = {}", g(params.nu1))?;
                writeln!(out, "nu2 = {}", g(params.nu2))?;
                print_rates(out, &r)?;
            }
            Protocol::EfBl => {
                let res = if optimal_pa {
                    ef_bi_sum_rate_search(ch, opt.pa_grid_points)
                } else {
                    irc_core::ef::ef_bi_rate_at_min_noise(ch, 0.5, 0.5)
                };
                if let Some((params, s, r)) = or_note(out, res)? {
                    writeln!(out, "scenario = {}", s.tag())?;
                    writeln!(out, "nu1 = {}", g(params.nu1))?;
                    writeln!(out, "nu2 = {}", g(params.nu2))?;
                    writeln!(out, "nwz1 = {}", g(params.nwz1))?;
                    writeln!(out, "nwz2 = {}", g(params.nwz2))?;
                    print_rates(out, &r)?;
                }
            }
            Protocol::EfSl => {
                if let Some(params) = or_note(out, ef_sl_params(ch, opt.r0_exponent))? {
                    writeln!(out, "r0 = {}", g(params.r0))?;
                    writeln!(out, "nwz = {}", g(params.nwz))?;
                    print_rates(out, &ef_sl_rate(ch, params.nwz, opt.r0_exponent)?)?;
                }
            }
        }
    }
    Ok(())
}

fn print_bounds(out: &mut dyn Write, kind: &str, b: &DiscreteBounds) -> Result<()> {
    writeln!(out, "kind = {kind}")?;
    writeln!(out, "r1_cap = {}", g(b.r1_cap))?;
    writeln!(out, "r2_cap = {}", g(b.r2_cap))?;
    for (i, (lhs, rhs)) in b.constraints.iter().enumerate() {
        let holds = lhs <= &(rhs + irc_core::discrete::FEASIBILITY_SLACK);
        writeln!(out, "constraint{} = {} <= {} ({})", i + 1, g(*lhs), g(*rhs), if holds { "holds" } else { "violated" })?;
    }
    writeln!(out, "feasible = {}", b.feasible)?;
    Ok(())
}

fn discrete(out: &mut dyn Write, d: &Distribution) -> Result<()> {
    match d {
        Distribution::BiLevel(f) => print_bounds(out, "bi-level", &bi_level_bounds(f)?),
        Distribution::SingleLevel(f) => print_bounds(out, "single-level", &single_level_bounds(f)?),
        Distribution::Joint(pmf, queries) => {
            writeln!(out, "kind = joint")?;
            for (i, q) in queries.iter().enumerate() {
                let v = conditional_mutual_information(pmf, &q.a, &q.b, &q.c)
                    .with_context(|| format!("query {}", i + 1))?;
                writeln!(out, "I({:?}; {:?} | {:?}) = {}", q.a, q.b, q.c, g(v))?;
            }
            Ok(())
        }
    }
}
