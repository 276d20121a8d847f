use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use burnlab::burn::{simulate, BurnSchedule, Strictness};
use burnlab::drunk::{drunk_estimate, DrunkVariant, Instance};
use burnlab::experiments::{run_sweep, SweepConfig};
use burnlab::generators::{critical_radius, gen_gnp_with, gen_rgg, gen_structured, GnpOptions, PointSet, Structure};
use burnlab::predict::{predict_gnp, predict_grid, predict_path_drunk};
use burnlab::solver::{
    b_two_certificate, burning_number_bruteforce_capped, burning_number_exact_with, certificates, greedy_schedule,
    lower_bound_ballsum, upper_bound_center, verify_witness, SolveOutcome, SolverConfig, DEFAULT_BRUTE_FORCE_CAP,
    DEFAULT_NODE_BUDGET,
};
use burnlab::strategies::{
    grid_narrow_schedule, grid_strip_schedule, path_schedule, path_schedule_rounds, rgg_cell_schedule,
    DEFAULT_CELL_COEFFICIENT,
};
use burnlab::Graph;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "burnlab", version, about = "Graph burning experiments")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenModel {
    Gnp,
    Rgg,
    Path,
    Grid,
    Torus,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Ballsum,
    Center,
    Greedy,
    B2,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyKind {
    Path,
    GridStrips,
    GridNarrow,
    RggCells,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Gnp,
    Grid,
    PathDrunk,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph and write it as an edge list.
    Gen {
        #[arg(long, value_enum)]
        model: GenModel,
        #[arg(long)]
        n: usize,
        /// Rows for grid and torus.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        /// Connection radius; or use --r-mult for a multiple of the critical radius.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        r_mult: Option<f64>,
        /// Sample the complement when p > 1/2.
        #[arg(long)]
        complement_dense: bool,
        #[arg(long)]
        out: PathBuf,
        /// Point file for rgg.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Run a schedule and report the completion round.
    Burn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        /// Treat ignitions of burned vertices as no-ops instead of errors.
        #[arg(long)]
        permissive: bool,
        /// Write the newly burned vertices of each round, one round per line.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Compute the burning number exactly.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Use exhaustive enumeration instead of branch and bound.
        #[arg(long)]
        brute: bool,
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
        brute_cap: usize,
        /// Write the witness schedule.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified bounds on the burning number.
    Bound {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        kind: BoundKind,
    },
    /// Build a constructive schedule.
    Strategy {
        #[arg(long, value_enum)]
        kind: StrategyKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        /// Edge list for rgg-cells.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Point file for rgg-cells.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CELL_COEFFICIENT)]
        a: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo estimate of random-ignition burning times.
    Drunk {
        #[arg(long)]
        variant: DrunkVariant,
        /// Path length; runs the path kernel.
        #[arg(long, conflicts_with = "input")]
        n: Option<usize>,
        /// Edge list; runs the general kernel.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Write the raw per-trial round counts, one per line.
        #[arg(long)]
        samples_csv: Option<PathBuf>,
    },
    /// Closed-form predictions.
    Predict {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        variant: Option<DrunkVariant>,
        #[arg(long, default_value_t = burnlab::predict::DEFAULT_EPS)]
        eps: f64,
        #[arg(long, default_value_t = burnlab::predict::DEFAULT_DELTA)]
        delta: f64,
    },
    /// Run a parameter sweep from a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn read_graph(path: &Path) -> Result<Graph> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Graph::read_edge_list(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn read_points(path: &Path) -> Result<PointSet> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(PointSet::read_from(BufReader::new(f))?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_schedule(path: &Path, s: &BurnSchedule) -> Result<()> {
    let mut w = create(path)?;
    s.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.with_context(|| format!("--{flag} is required here"))
}

fn run(cli: Cli) -> Result<Value> {
    let seed = cli.seed;
    Ok(match cli.cmd {
        Cmd::Gen {
            model,
            n,
            m,
            p,
            r,
            r_mult,
            complement_dense,
            out,
            points,
        } => {
            let mut extra = json!({});
            let g = match model {
                GenModel::Gnp => {
                    let s = gen_gnp_with(n, need(p, "p")?, seed, GnpOptions { complement_dense })?;
                    extra = json!({ "p": s.p, "d": s.d });
                    s.graph
                }
                GenModel::Rgg => {
                    let r = match (r, r_mult) {
                        (Some(r), None) => r,
                        (None, Some(k)) => k * critical_radius(n)?,
                        _ => bail!("give exactly one of --r and --r-mult"),
                    };
                    let (g, pts) = gen_rgg(n, r, seed)?;
                    if let Some(path) = &points {
                        let mut w = create(path)?;
                        pts.write_to(&mut w)?;
                        w.flush()?;
                    }
                    extra = json!({ "r": r });
                    g
                }
                GenModel::Path => gen_structured(Structure::Path, 1, n)?,
                GenModel::Grid => gen_structured(Structure::Grid, need(m, "m")?, n)?,
                GenModel::Torus => gen_structured(Structure::Torus, need(m, "m")?, n)?,
            };
            let mut w = create(&out)?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
            let mut v = json!({ "n": g.n(), "edges": g.m(), "seed": seed, "out": out });
            v.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
            v
        }
        Cmd::Burn {
            input,
            schedule,
            permissive,
            dump,
        } => {
            let g = read_graph(&input)?;
            let strictness = if permissive { Strictness::Permissive } else { Strictness::Strict };
            let f = File::open(&schedule).with_context(|| format!("opening {}", schedule.display()))?;
            let s = BurnSchedule::read_from(BufReader::new(f), strictness)?;
            let trace = simulate(&g, &s)?;
            if let Some(path) = dump {
                let mut w = create(&path)?;
                trace.write_dump(&mut w)?;
                w.flush()?;
            }
            json!({
                "completion": trace.completion,
                "burned": trace.burned_final.count(),
                "n": g.n(),
                "schedule_length": s.len(),
            })
        }
        Cmd::Solve {
            input,
            budget,
            brute,
            brute_cap,
            out,
        } => {
            let g = read_graph(&input)?;
            let certs = certificates(&g);
            let result = if brute {
                SolveOutcome::Solved(burning_number_bruteforce_capped(&g, brute_cap)?)
            } else {
                burning_number_exact_with(&g, SolverConfig { node_budget: budget })
            };
            if let SolveOutcome::Solved(r) = &result {
                if !verify_witness(&g, r)? {
                    bail!("witness failed re-simulation");
                }
                if let Some(path) = out {
                    write_schedule(&path, &r.witness)?;
                }
            }
            let mut v = serde_json::to_value(&result)?;
            v["certificates"] = serde_json::to_value(&certs)?;
            v
        }
        Cmd::Bound { input, kind } => {
            let g = read_graph(&input)?;
            let certs = match kind {
                BoundKind::Ballsum => vec![lower_bound_ballsum(&g)],
                BoundKind::Center => vec![upper_bound_center(&g)?],
                BoundKind::Greedy => vec![greedy_schedule(&g).1],
                BoundKind::B2 => b_two_certificate(&g)?.into_iter().collect(),
                BoundKind::All => certificates(&g),
            };
            let rechecked = certs.iter().map(|c| c.recheck(&g)).collect::<burnlab::Result<Vec<bool>>>()?;
            json!({ "certificates": certs, "rechecked": rechecked })
        }
        Cmd::Strategy {
            kind,
            n,
            m,
            c,
            input,
            points,
            a,
            out,
        } => {
            let (schedule, v) = match kind {
                StrategyKind::Path => {
                    let n = need(n, "n")?;
                    let s = path_schedule(n)?;
                    let rounds = path_schedule_rounds(n)?;
                    let v = json!({ "kind": "path", "n": n, "schedule": s, "achieved_rounds": rounds });
                    (s, v)
                }
                StrategyKind::GridStrips => {
                    let plan = grid_strip_schedule(need(m, "m")?, need(n, "n")?, c)?;
                    (plan.schedule.clone(), serde_json::to_value(&plan)?)
                }
                StrategyKind::GridNarrow => {
                    let plan = grid_narrow_schedule(need(m, "m")?, need(n, "n")?)?;
                    (plan.schedule.clone(), serde_json::to_value(&plan)?)
                }
                StrategyKind::RggCells => {
                    let g = read_graph(&need(input, "input")?)?;
                    let pts = read_points(&need(points, "points")?)?;
                    let plan = rgg_cell_schedule(&g, &pts, a)?;
                    (plan.schedule.clone(), serde_json::to_value(&plan)?)
                }
            };
            if let Some(path) = out {
                write_schedule(&path, &schedule)?;
            }
            v
        }
        Cmd::Drunk {
            variant,
            n,
            input,
            trials,
            samples_csv,
        } => {
            let graph;
            let inst = match (n, &input) {
                (Some(n), None) => Instance::Path(n),
                (None, Some(path)) => {
                    graph = read_graph(path)?;
                    Instance::Graph(&graph)
                }
                _ => bail!("give exactly one of --n and --input"),
            };
            let stats = drunk_estimate(inst, variant, trials, seed)?;
            if let Some(path) = samples_csv {
                let mut w = create(&path)?;
                for s in &stats.samples {
                    writeln!(w, "{s}")?;
                }
                w.flush()?;
            }
            serde_json::to_value(&stats)?
        }
        Cmd::Predict {
            model,
            n,
            m,
            p,
            variant,
            eps,
            delta,
        } => match model {
            Model::Gnp => serde_json::to_value(predict_gnp(n, need(p, "p")?, eps, delta)?)?,
            Model::Grid => serde_json::to_value(predict_grid(need(m, "m")?, n)?)?,
            Model::PathDrunk => {
                let variant = need(variant, "variant")?;
                json!({
                    "n": n,
                    "variant": variant,
                    "prediction": predict_path_drunk(n, variant)?,
                })
            }
        },
        Cmd::Sweep { config, output } => {
            let mut cfg = SweepConfig::from_file(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            serde_json::to_value(run_sweep(&cfg)?)?
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = std::env::var("BURNLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if k >= 1 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    match run(cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
