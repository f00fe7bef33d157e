use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use phi4::graphs::{
    aggregate_topologies, counterterms, double_factorial_odd, enumerate_all, enumerate_connected, logZ_series,
};
use phi4::lattice::{bound_report, covariance_band, covariance_cumulative, write_kernel_csv, LatticeSpec};
use phi4::potential::{integrate_down, bare_potential, run_flow, summability_check};
use phi4::power::{divergence_scan, scale_sum, NodeStats, TreeTopology};
use phi4::sampler::{assemble, classify_regions, sample_layer, tail_stats, threshold_for_coupling, write_snapshot};
use phi4::stability::{
    calibrate, fit_tail, stability_envelope, stability_report, ExperimentConfig, Manifest, Method, Source,
};
use phi4::Error;

#[derive(Parser, Debug)]
#[command(name = "phi4", version, about = "Multiscale φ⁴ workbench")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Global {
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,
    #[arg(long, global = true, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    mass: f64,
    /// Physical box side L.
    #[arg(long = "box", global = true, default_value_t = 1.0)]
    box_side: f64,
    /// Ultraviolet cutoff N.
    #[arg(long, global = true, default_value_t = 2)]
    cutoff: usize,
    #[arg(long, global = true, default_value_t = 0.05)]
    lambda: f64,
    /// Truncation order j.
    #[arg(long, global = true, default_value_t = 1)]
    order: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 4096)]
    samples: usize,
    #[arg(long, global = true, default_value = "phi4-out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with status 4 when the command's self-check fails.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    Quadrature,
    Qmc,
    Mc,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Kernel tables for C^{(≤N)} and every band, with fitted bound constants.
    Propagator {
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Gaussian layers, layer-norm tails and small/large field regions.
    Sample {
        /// Scale for the tail statistics.
        #[arg(long, default_value_t = 1)]
        scale: usize,
        /// Multiplier of ln(e + 1/λ) in the region threshold.
        #[arg(long, default_value_t = 1.0)]
        b_scale: f64,
    },
    /// Graph enumeration, counterterms and the log Z series.
    Graphs {
        #[arg(long, default_value_t = 2)]
        couplings: usize,
        #[arg(long, default_value_t = 0)]
        masses: usize,
        #[arg(long, default_value_t = 0)]
        externals: usize,
        /// Source: `zero`, `const:<c>` or comma-separated site values.
        #[arg(long, default_value = "zero")]
        source: String,
    },
    /// Divergence catalog and scale-sum verdicts.
    Powercount {
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        n_max: Vec<usize>,
    },
    /// Truncated effective-potential recursion from N down to 0.
    Rgflow {
        #[arg(long, default_value = "zero")]
        source: String,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        c_j: f64,
    },
    /// Direct estimates of Z_N(f) against the truncated series.
    Stability {
        #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
        method: MethodArg,
        #[arg(long, default_value = "zero")]
        source: String,
        /// Cutoffs for an N sweep at fixed volume (default: --cutoff only).
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
        #[arg(long, default_value_t = 32)]
        nodes: usize,
        #[arg(long)]
        cumulant: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type Outcome = Result<(), Failure>;

struct Run {
    out: PathBuf,
    outputs: Vec<String>,
}

impl Run {
    fn create(&mut self, name: &str) -> std::io::Result<BufWriter<File>> {
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(File::create(self.out.join(name))?))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Outcome {
        let mut w = self.create(&format!("{name}.json"))?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.flush()?;
        Ok(())
    }
}

fn parse_source(s: &str) -> Result<Source, Error> {
    let bad = || Error::InvalidArgument(format!("cannot parse source `{s}`"));
    match s {
        "zero" => Ok(Source::Zero),
        _ if s.starts_with("const:") => s[6..].parse().map(Source::Constant).map_err(|_| bad()),
        _ => s
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map(Source::Table)
            .map_err(|_| bad()),
    }
}

fn check(ok: bool, what: impl Into<String>) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(what.into()))
    }
}

fn propagator(g: &Global, spec: &LatticeSpec, run: &mut Run, eps: f64) -> Outcome {
    let full = covariance_cumulative::<f64>(spec, spec.cutoff)?;
    let bands = (1..=spec.cutoff)
        .map(|h| covariance_band::<f64>(spec, h))
        .collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<serde_json::Value> = std::iter::once(&full)
        .chain(&bands)
        .map(|k| match bound_report(k, eps) {
            Ok(r) => serde_json::to_value(r).expect("serializable"),
            Err(e) => json!({ "band": k.band, "error": e.to_string() }),
        })
        .collect();
    if g.format == Format::Csv {
        write_kernel_csv(&full, run.create("cumulative.csv")?)?;
        for (h, b) in bands.iter().enumerate() {
            write_kernel_csv(b, run.create(&format!("band_{}.csv", h + 1))?)?;
        }
    } else {
        let table = json!({
            "cumulative": full.values(),
            "bands": bands.iter().map(|b| b.values()).collect::<Vec<_>>(),
        });
        run.json("kernels", &table)?;
    }
    run.json("bounds", &reports)?;
    let worst = full
        .values()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let s: f64 = bands.iter().map(|b| b.values()[i]).sum();
            (s - c).abs() / c.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    println!("telescoping max relative error {worst:.3e}");
    if g.check {
        check(worst < 1e-12, format!("telescoping error {worst:.3e}"))?;
    }
    Ok(())
}

fn sample(g: &Global, spec: &LatticeSpec, run: &mut Run, scale: usize, b_scale: f64) -> Outcome {
    let layers = (1..=spec.cutoff)
        .map(|h| sample_layer(spec, h, g.seed))
        .collect::<Result<Vec<_>, _>>()?;
    for l in &layers {
        write_snapshot(l, &run.out, &format!("layer_{}", l.h))?;
        run.outputs.push(format!("layer_{}.bin", l.h));
        run.outputs.push(format!("layer_{}.json", l.h));
    }
    let field = assemble(layers)?;
    let b = threshold_for_coupling(g.lambda.max(f64::MIN_POSITIVE), b_scale);
    let regions: Vec<_> = (1..=spec.cutoff).map(|h| classify_regions(&field, h, b)).collect();
    run.json("regions", &regions)?;
    let grid: Vec<f64> = (1..=24).map(|i| 0.25 * i as f64).collect();
    let tails = tail_stats(spec, scale, &grid, g.samples, g.seed)?;
    if g.format == Format::Csv {
        tails.write_csv(run.create("tails.csv")?)?;
    } else {
        run.json("tails", &tails)?;
    }
    println!("tail slope {:?} over {} points", tails.slope, tails.fit_points);
    if g.check {
        let monotone = tails.rows.windows(2).all(|w| w[1].count <= w[0].count);
        check(monotone, "tail counts not monotone in B")?;
    }
    Ok(())
}

fn graphs(g: &Global, spec: &LatticeSpec, run: &mut Run, n: usize, p: usize, r: usize, source: &str) -> Outcome {
    let all = enumerate_all(n, p, r)?;
    let connected = enumerate_connected(n, p, r)?;
    let tops = aggregate_topologies(&connected);
    let half = 4 * n + 2 * p + r;
    let expected = if half.is_multiple_of(2) { double_factorial_odd(half / 2) } else { 0 };
    let ct = counterterms(spec, g.lambda)?;
    let f = parse_source(source)?.on(spec)?;
    let series = logZ_series(spec, g.lambda, &f, g.order)?;
    if g.format == Format::Csv {
        series.kernels.write_csv(run.create("schwinger.csv")?)?;
    }
    let report = json!({
        "family": { "couplings": n, "masses": p, "externals": r },
        "matchings": all.len(),
        "expected_matchings": expected.to_string(),
        "connected": connected.len(),
        "topologies": tops,
        "counterterms": ct,
        "series": if g.format == Format::Json { serde_json::to_value(&series)? } else {
            json!({ "terms": series.terms, "coefficients": series.coefficients })
        },
    });
    run.json("graphs", &report)?;
    println!("{} matchings, {} connected, {} topologies", all.len(), connected.len(), tops.len());
    if g.check {
        check(all.len() as u128 == expected, "matching count differs from (2k-1)!!")?;
    }
    Ok(())
}

fn powercount(g: &Global, run: &mut Run, max_vertices: usize, n_max: &[usize]) -> Outcome {
    let catalog = divergence_scan(g.dim, max_vertices)?;
    let chain = TreeTopology::single(NodeStats { couplings: 2, externals: 0, external_lines: 2 });
    let improved = scale_sum(&chain, g.dim, g.gamma, n_max, true);
    let plain = scale_sum(&chain, g.dim, g.gamma, n_max, false);
    let report = json!({ "catalog": catalog, "chain": { "improved": improved, "plain": plain } });
    run.json("powercount", &report)?;
    println!("{}", catalog.verdict);
    if g.check && g.dim == 3 {
        let ok = improved.nodes[0].rho.0 == 0 && improved.nodes[0].rho_bar.0 == 1 && improved.infinite_sum.is_some();
        check(ok, "chain cluster lacks the half-unit improvement")?;
    }
    Ok(())
}

fn rgflow(g: &Global, spec: &LatticeSpec, run: &mut Run, source: &str, b: f64, c_j: f64) -> Outcome {
    let f = parse_source(source)?.on(spec)?;
    let report = run_flow(spec, g.lambda, &f, g.order, b, c_j)?;
    run.json("flow", &report)?;
    let summability: Vec<_> = (0..=4)
        .map(|j| summability_check(j, g.dim, g.lambda, b, g.gamma, c_j, 64))
        .collect::<Result<_, _>>()?;
    run.json("summability", &summability)?;
    if g.check {
        let ct = counterterms(spec, g.lambda)?;
        let v = bare_potential(spec, &ct, &f, g.order)?;
        let chain = integrate_down(&v, g.order, 0)?;
        let constant = chain.last().expect("nonempty").constant();
        let series = logZ_series(spec, g.lambda, &f, g.order)?;
        let ok = constant
            .iter()
            .zip(&series.terms)
            .all(|(c, s)| (c / spec.volume() - s).abs() <= 1e-8 * s.abs() + 1e-14);
        check(ok, "recursion constant differs from the series")?;
    }
    Ok(())
}

fn stability(g: &Global, spec: &LatticeSpec, run: &mut Run, method: MethodArg, source: &str, sweep: &[usize], nodes: usize, cumulant: bool) -> Outcome {
    let mut cfg = ExperimentConfig::new(spec.clone(), g.lambda, parse_source(source)?, g.order);
    cfg.method = match method {
        MethodArg::Quadrature => Method::ExactQuadrature,
        MethodArg::Qmc => Method::QuasiMonteCarlo,
        MethodArg::Mc => Method::MonteCarlo,
    };
    cfg.seed = g.seed;
    cfg.samples = g.samples;
    cfg.nodes = nodes;
    match sweep.first() {
        Some(&n) => cfg.with_cutoff(n)?.validate()?,
        None => cfg.validate()?,
    }
    let ok = if sweep.is_empty() {
        let cal = if g.lambda > 0.0 {
            Some(calibrate(&cfg, g.lambda, fit_tail(spec, g.samples.max(1000), g.seed)?)?)
        } else {
            None
        };
        let report = stability_report(&cfg, cal.as_ref(), cumulant)?;
        println!(
            "log Z/|Λ| = {:.12} ± {:.2e}, series {:.12}, half-width {:.3e}, inside {}",
            report.estimate.per_volume, report.estimate.per_volume_err, report.series, report.half_width, report.inside
        );
        run.json("stability", &report)?;
        report.inside
    } else {
        let result = stability_envelope(&cfg, sweep, None)?;
        println!("spread {:.3e}, max half-width {:.3e}, all inside {}", result.spread, result.max_half_width, result.all_inside);
        run.json("stability", &result)?;
        result.all_inside
    };
    if g.check {
        check(ok, "estimate outside the envelope")?;
    }
    Ok(())
}

fn execute(cli: &Cli, args: Vec<String>) -> Outcome {
    let g = &cli.global;
    std::fs::create_dir_all(&g.out)?;
    let mut run = Run { out: g.out.clone(), outputs: Vec::new() };
    let spec = match cli.command {
        Command::Powercount { .. } => None,
        _ => Some(LatticeSpec::new(g.dim, g.box_side, g.mass, g.gamma, g.cutoff)?),
    };
    let result = match (&cli.command, &spec) {
        (Command::Propagator { eps }, Some(s)) => propagator(g, s, &mut run, *eps),
        (Command::Sample { scale, b_scale }, Some(s)) => sample(g, s, &mut run, *scale, *b_scale),
        (Command::Graphs { couplings, masses, externals, source }, Some(s)) => {
            graphs(g, s, &mut run, *couplings, *masses, *externals, source)
        }
        (Command::Powercount { max_vertices, n_max }, _) => powercount(g, &mut run, *max_vertices, n_max),
        (Command::Rgflow { source, b, c_j }, Some(s)) => rgflow(g, s, &mut run, source, *b, *c_j),
        (Command::Stability { method, source, sweep, nodes, cumulant }, Some(s)) => {
            stability(g, s, &mut run, *method, source, sweep, *nodes, *cumulant)
        }
        _ => unreachable!("lattice built for every command that needs one"),
    };
    let name = serde_json::to_value(&cli.command)?;
    let command = name
        .as_object()
        .and_then(|o| o.keys().next().cloned())
        .or_else(|| name.as_str().map(String::from))
        .unwrap_or_default()
        .to_lowercase();
    let mut manifest = Manifest::new(
        &command,
        args,
        json!({ "global": g, "command": cli.command }),
        spec.as_ref().map(|s| s.canonical_hash()),
    );
    manifest.outputs = run.outputs.clone();
    manifest.write(Path::new(&g.out))?;
    result
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match execute(&cli, args.into_iter().skip(1).collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::SizeGuard(_) => 3,
                Error::Io(_) | Error::Json(_) => 1,
                _ => 2,
            })
        }
    }
}
