//! Command-line front end. [`run`] parses arguments, dispatches one
//! subcommand and maps failures to exit codes: 2 for usage and configuration
//! problems, 1 for computation errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{load, RegionConfig};
use crate::output::{aligned, fmt_f64, write_outputs, CsvTable, PlotSeries, PlotSpec, Results};
use crate::precode::{feeder_bandwidth, sinr_table, FeederScheme};
use crate::regions::{
    region_hk, region_noma_bc, region_orthogonal, region_two_user, unit_grid, BcNomaParams, DecodingMode, HkSplit,
    LinkPair, RateRegion,
};
use crate::sched::{MAX_ORACLE_BEAMS, MAX_ORACLE_CANDIDATES};
use crate::syssim::{
    build_drop, compare_schemes, drop_seed, multilayer_sum_bps, oracle_drop, schedule_drop, slot_precoder, Comparison,
    SimConfig,
};
use crate::{capacity, db_to_linear, Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "noma-sat", version, about = "NOMA over multibeam satellite forward links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML or JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set drops=10`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory.
    #[arg(long, env = "NOMA_SAT_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-user rate region boundaries, one CSV per strategy.
    Region {
        #[command(flatten)]
        common: Common,
    },
    /// Single-layer precoder and per-user SINR for one drop.
    Precode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Schedules of every configured scheduler for one drop, plus the
    /// exhaustive oracle on small instances.
    Pairing {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo comparison of schemes and schedulers.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        drops: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Feeder-link bandwidth of each transmission scheme.
    Feeder {
        #[arg(long)]
        k: u64,
        /// User bandwidth, Hz.
        #[arg(long)]
        b: f64,
    },
}

/// Parses `args` (program name first), runs, prints diagnostics to stderr and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            EXIT_COMPUTE
        }
    }
}

enum Failure {
    Usage(Error),
    Compute(Error),
}

fn usage<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn compute<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Compute)
}

fn sim_config(common: &Common, extra: &[(&str, Option<String>)]) -> std::result::Result<SimConfig, Failure> {
    let mut overrides = common.overrides.clone();
    overrides.extend(extra.iter().filter_map(|(k, v)| v.as_ref().map(|v| format!("{k}={v}"))));
    let cfg: SimConfig = usage(load(common.config.as_deref(), &overrides))?;
    usage(cfg.validate())?;
    Ok(cfg)
}

fn dispatch(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Region { common } => {
            let cfg: RegionConfig = usage(load(common.config.as_deref(), &common.overrides))?;
            let results = usage(region_results(&cfg))?;
            finish(&results, &common.out_dir)
        }
        Command::Precode { common, seed } => {
            let cfg = sim_config(&common, &[("seed", seed.map(|s| s.to_string()))])?;
            let results = compute(precode_results(&cfg))?;
            finish(&results, &common.out_dir)
        }
        Command::Pairing { common, seed } => {
            let cfg = sim_config(&common, &[("seed", seed.map(|s| s.to_string()))])?;
            let results = compute(pairing_results(&cfg))?;
            finish(&results, &common.out_dir)
        }
        Command::Simulate {
            common,
            seed,
            drops,
            threads,
        } => {
            let cfg = sim_config(
                &common,
                &[
                    ("seed", seed.map(|s| s.to_string())),
                    ("drops", drops.map(|d| d.to_string())),
                    ("threads", threads.map(|t| t.to_string())),
                ],
            )?;
            let cmp = compute(compare_schemes(&cfg))?;
            let results = simulate_results(&cmp);
            print!("{}", results.texts[0].1);
            finish(&results, &common.out_dir)
        }
        Command::Feeder { k, b } => {
            print!("{}", usage(feeder_table(k, b))?);
            Ok(())
        }
    }
}

fn finish(results: &Results, out_dir: &Path) -> std::result::Result<(), Failure> {
    let m = compute(write_outputs(results, out_dir))?;
    log::info!("wrote {} files to {}", m.files.len(), out_dir.display());
    Ok(())
}

/// Region for one strategy tag. `noma_bc` treats the stronger of the two
/// SNRs as the strong user's `p * g_s` with unit power.
pub fn region_for(link: &LinkPair, tag: &str, step: f64) -> Result<RateRegion> {
    match tag {
        "hk" => region_hk(link, &HkSplit::grid(step)?),
        "orthogonal" => region_orthogonal(link, &unit_grid(step)?),
        "noma_bc" => {
            let base = BcNomaParams {
                p: 1.0,
                g_s: link.s1.max(link.s2),
                g_w: link.s1.min(link.s2),
                beta: 0.0,
            };
            region_noma_bc(&base, &unit_grid(step)?)
        }
        other => region_two_user(link, other.parse::<DecodingMode>()?),
    }
}

pub fn region_results(cfg: &RegionConfig) -> Result<Results> {
    let link = LinkPair::new(
        db_to_linear(cfg.snr1_db),
        db_to_linear(cfg.snr2_db),
        db_to_linear(cfg.inr1_db),
        db_to_linear(cfg.inr2_db),
    )?;
    let mut results = Results::default();
    let mut plot = PlotSpec {
        title: format!(
            "SNR {}/{} dB, INR {}/{} dB",
            cfg.snr1_db, cfg.snr2_db, cfg.inr1_db, cfg.inr2_db
        ),
        xlabel: "R1 (b/s/Hz)".into(),
        ylabel: "R2 (b/s/Hz)".into(),
        series: Vec::new(),
    };
    for tag in &cfg.strategies {
        let region = region_for(&link, tag, cfg.grid_step)?;
        let mut t = CsvTable::new(format!("region_{tag}.csv"), &["r1_bps_hz", "r2_bps_hz"]);
        for p in region.boundary() {
            t.push(vec![fmt_f64(p.r1), fmt_f64(p.r2)]);
        }
        plot.series.push(PlotSeries {
            file: t.file.clone(),
            x: 1,
            y: 2,
            title: tag.clone(),
        });
        results.tables.push(t);
    }
    results.plot = Some(plot);
    Ok(results)
}

/// Single-layer precoder of the first slot (strongest user per beam).
pub fn precode_results(cfg: &SimConfig) -> Result<Results> {
    let d = build_drop(cfg, drop_seed(cfg.seed, 0))?;
    let sel: Vec<usize> = d
        .candidates
        .iter()
        .enumerate()
        .map(|(b, c)| {
            *c.iter()
                .max_by(|&&x, &&y| d.h.power(x, b).total_cmp(&d.h.power(y, b)).then(y.cmp(&x)))
                .expect("non-empty beam")
        })
        .collect();
    let hs = d.h.select_rows(&sel);
    let pre = slot_precoder(cfg, &hs)?;
    let mut w = CsvTable::new("precoder.csv", &["stream", "feed", "real", "imag", "stream_power"]);
    for s in 0..pre.streams() {
        for f in 0..pre.feeds() {
            let z = pre.matrix()[(s, f)];
            w.push(vec![
                s.to_string(),
                f.to_string(),
                fmt_f64(z.re),
                fmt_f64(z.im),
                fmt_f64(pre.stream_power()[s]),
            ]);
        }
    }
    let t = sinr_table(&hs, &pre, 1.0)?;
    let mut s = CsvTable::new("sinr.csv", &["user", "beam", "sinr", "rate_bps_hz"]);
    for (i, &u) in sel.iter().enumerate() {
        let x = t.sinr(i, i);
        s.push(vec![u.to_string(), i.to_string(), fmt_f64(x), fmt_f64(capacity(x))]);
    }
    Ok(Results {
        tables: vec![w, s],
        plot: Some(PlotSpec {
            title: "Single-layer precoded rate per beam".into(),
            xlabel: "beam".into(),
            ylabel: "rate (b/s/Hz)".into(),
            series: vec![PlotSeries {
                file: "sinr.csv".into(),
                x: 2,
                y: 4,
                title: "rate".into(),
            }],
        }),
        texts: vec![],
    })
}

pub fn pairing_results(cfg: &SimConfig) -> Result<Results> {
    let d = build_drop(cfg, drop_seed(cfg.seed, 0))?;
    let mut sched = CsvTable::new(
        "schedule.csv",
        &["beam", "slot", "strong_user", "weak_user", "strategy"],
    );
    let mut oracle = CsvTable::new("oracle.csv", &["strategy", "sum_bps", "gap_to_oracle_pct"]);
    let mut sums = Vec::new();
    for &p in &cfg.schedulers {
        let s = schedule_drop(cfg, &d, p)?;
        for e in &s.entries {
            sched.push(vec![
                e.beam.to_string(),
                e.slot.to_string(),
                e.strong.to_string(),
                e.weak.map_or(String::new(), |w| w.to_string()),
                s.strategy.clone(),
            ]);
        }
        sums.push((p.tag().to_string(), multilayer_sum_bps(cfg, &d.h, &s, cfg.decoder)?));
    }
    let small = cfg.k <= MAX_ORACLE_BEAMS && cfg.users_per_beam <= MAX_ORACLE_CANDIDATES;
    let mut tables = vec![sched];
    if small {
        let best = oracle_drop(cfg, &d)?;
        for e in &best.schedule.entries {
            tables[0].push(vec![
                e.beam.to_string(),
                e.slot.to_string(),
                e.strong.to_string(),
                e.weak.map_or(String::new(), |w| w.to_string()),
                "oracle".into(),
            ]);
        }
        for (tag, sum) in &sums {
            oracle.push(vec![
                tag.clone(),
                fmt_f64(*sum),
                fmt_f64(100.0 * (best.sum_rate - sum) / best.sum_rate),
            ]);
        }
        oracle.push(vec!["oracle".into(), fmt_f64(best.sum_rate), fmt_f64(0.0)]);
        tables.push(oracle);
    }
    Ok(Results {
        tables,
        plot: None,
        texts: vec![],
    })
}

const SUMMARY_HEADER: [&str; 8] = [
    "scheme",
    "scheduler",
    "drops",
    "mean_bps",
    "median_bps",
    "p10_bps",
    "mean_jain",
    "gain_vs_four_color_pct",
];

pub fn simulate_results(cmp: &Comparison) -> Results {
    let mut summary = CsvTable::new("summary.csv", &SUMMARY_HEADER);
    for r in &cmp.rows {
        summary.push(vec![
            r.scheme.tag().into(),
            r.scheduler_tag().into(),
            r.drops.to_string(),
            fmt_f64(r.mean_bps),
            fmt_f64(r.median_bps),
            fmt_f64(r.p10_bps),
            fmt_f64(r.mean_jain),
            r.gain_vs_four_color_pct.map_or(String::new(), fmt_f64),
        ]);
    }
    let mut drops = CsvTable::new(
        "drops.csv",
        &[
            "drop",
            "seed",
            "retries",
            "scheme",
            "scheduler",
            "sum_bps",
            "jain",
            "slots",
        ],
    );
    for d in &cmp.drops {
        for r in &d.results {
            drops.push(vec![
                d.index.to_string(),
                d.seed.to_string(),
                d.retries.to_string(),
                r.scheme.tag().into(),
                r.scheduler_tag().into(),
                fmt_f64(r.sum_bps),
                fmt_f64(r.jain),
                r.slots.to_string(),
            ]);
        }
    }
    let rows: Vec<Vec<String>> = cmp
        .rows
        .iter()
        .map(|r| {
            vec![
                r.scheme.tag().into(),
                r.scheduler_tag().into(),
                r.drops.to_string(),
                format!("{:.4e}", r.mean_bps),
                format!("{:.4e}", r.median_bps),
                format!("{:.4e}", r.p10_bps),
                format!("{:.4}", r.mean_jain),
                r.gain_vs_four_color_pct.map_or(String::new(), |g| format!("{g:.1}")),
            ]
        })
        .collect();
    let header: Vec<String> = SUMMARY_HEADER.iter().map(|s| s.to_string()).collect();
    let mut text = aligned(&header, &rows);
    if cmp.skipped > 0 {
        text += &format!("skipped drops: {}\n", cmp.skipped);
    }
    Results {
        tables: vec![summary, drops],
        plot: Some(PlotSpec {
            title: "Mean sum rate".into(),
            xlabel: "summary.csv row (scheme, scheduler)".into(),
            ylabel: "mean sum rate (b/s)".into(),
            series: vec![PlotSeries {
                file: "summary.csv".into(),
                x: 0,
                y: 4,
                title: "mean per scheme and scheduler".into(),
            }],
        }),
        texts: vec![("summary.txt".into(), text)],
    }
}

pub fn feeder_table(k: u64, b: f64) -> Result<String> {
    let header = ["scheme", "formula", "total_hz"].map(String::from).to_vec();
    let rows = FeederScheme::ALL
        .into_iter()
        .map(|s| {
            let plan = feeder_bandwidth(s, k, b)?;
            let formula = match s {
                FeederScheme::SingleLayer => "B*K",
                FeederScheme::Ldm => "2*B*K",
                FeederScheme::BroadcastMulticast => "2*B*(K+1)",
            };
            Ok(vec![
                s.tag().to_string(),
                formula.to_string(),
                format!("{:e}", plan.total_hz),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aligned(&header, &rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feeder_rows() {
        let t = feeder_table(245, 5e8).unwrap();
        assert!(t.contains("1.225e11"));
        assert!(t.contains("2.45e11"));
        assert!(t.contains("2.46e11"));
        assert!(feeder_table(0, 1.0).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["noma-sat", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["noma-sat", "feeder", "--k", "2", "--b", "1"]), EXIT_OK);
        assert_eq!(run(["noma-sat", "feeder", "--k", "0", "--b", "1"]), EXIT_USAGE);
        assert_eq!(
            run(["noma-sat", "simulate", "--config", "/nonexistent.toml"]),
            EXIT_USAGE
        );
        assert_eq!(run(["noma-sat", "simulate", "--set", "drops=0"]), EXIT_USAGE);
    }

    #[test]
    fn region_tags() {
        let link = LinkPair::symmetric(10.0, 3.0).unwrap();
        for tag in ["ian", "sd", "snd", "hk", "orthogonal", "noma_bc", "sud"] {
            assert!(!region_for(&link, tag, 0.1).unwrap().is_empty(), "{tag}");
        }
        assert!(region_for(&link, "dpc", 0.1).is_err());
    }
}
