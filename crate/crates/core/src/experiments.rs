//! Parameter sweeps streamed to CSV.
//!
//! A config file holds `key = value` lines; lists are written `[a, b, c]`
//! and `#` starts a comment. Every cell of the cartesian parameter grid gets
//! a seed derived from the master seed and the cell's instance id, so rows
//! do not depend on which worker ran them or in what order. Rows are written
//! in cell order; cells whose instance id is already in the output file are
//! skipped, which makes an interrupted sweep resumable.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::Serialize;

use crate::burn::{simulate, BurnSchedule, Completion};
use crate::drunk::{drunk_estimate, DrunkVariant, Instance};
use crate::error::{invalid, Error, Result};
use crate::generators::{critical_radius, gen_gnp, gen_rgg, grid};
use crate::predict::{predict_gnp, predict_grid, predict_path_drunk, PathDrunkPrediction, DEFAULT_DELTA, DEFAULT_EPS};
use crate::rng::mix;
use crate::solver::{
    b_two_certificate, burning_number_bruteforce, burning_number_exact, lower_bound_ballsum, upper_bound_center,
    BoundCertificate,
};
use crate::strategies::{grid_strip_schedule, rgg_cell_schedule, rgg_lower_bound, DEFAULT_C0, DEFAULT_CELL_COEFFICIENT};

/// Bumped whenever a study's column set changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    GnpCases,
    GridRatio,
    RggTheta,
    DrunkPath,
    OracleEquivalence,
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gnp-cases" => Study::GnpCases,
            "grid-ratio" => Study::GridRatio,
            "rgg-theta" => Study::RggTheta,
            "drunk-path" => Study::DrunkPath,
            "oracle-equivalence" => Study::OracleEquivalence,
            other => return Err(invalid(format!("unknown study {other:?}"))),
        })
    }
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::GnpCases => "gnp-cases",
            Study::GridRatio => "grid-ratio",
            Study::RggTheta => "rgg-theta",
            Study::DrunkPath => "drunk-path",
            Study::OracleEquivalence => "oracle-equivalence",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Study::GnpCases => &["n", "p", "samples", "eps", "delta"],
            Study::GridRatio => &["m", "n", "C"],
            Study::RggTheta => &["n", "r_mult", "samples", "a", "C0"],
            Study::DrunkPath => &["n", "variants", "trials"],
            Study::OracleEquivalence => &["n", "p", "samples"],
        }
    }

    /// `(params, measured, predicted, cert)` column names, unprefixed.
    fn columns(self) -> [&'static [&'static str]; 4] {
        match self {
            Study::GnpCases => [
                &["n", "p", "sample"],
                &["d", "connected", "b_two", "lower", "upper", "b"],
                &["case", "i", "set"],
                &["lower", "upper", "b_two"],
            ],
            Study::GridRatio => [
                &["m", "n", "C"],
                &["regime", "achieved", "lower", "ratio", "strips", "repair_balls"],
                &["leading", "k2", "within_k2"],
                &["schedule"],
            ],
            Study::RggTheta => [
                &["n", "r_mult", "sample", "a"],
                &["r", "components", "giant", "ignitions", "achieved", "scaled"],
                &["t", "claim_at_least"],
                &[],
            ],
            Study::DrunkPath => [
                &["n", "variant", "trials"],
                &["mean", "stddev", "ci95", "min", "max", "p50", "cost", "ratio"],
                &["value", "lo", "hi"],
                &[],
            ],
            Study::OracleEquivalence => [
                &["n", "p", "sample"],
                &["exact", "brute", "equal", "nodes"],
                &[],
                &["lower", "witness"],
            ],
        }
    }

    pub fn header(self) -> Vec<String> {
        let [params, measured, predicted, cert] = self.columns();
        let mut h = vec!["study".to_string(), "instance_id".to_string()];
        h.extend(params.iter().map(|c| format!("param:{c}")));
        h.push("seed".into());
        h.extend(measured.iter().map(|c| format!("measured:{c}")));
        h.extend(predicted.iter().map(|c| format!("predicted:{c}")));
        h.extend(cert.iter().map(|c| format!("cert:{c}")));
        h.push("ms".into());
        h
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub study: Study,
    pub master_seed: u64,
    pub output: PathBuf,
    pub params: BTreeMap<String, Vec<String>>,
}

fn parse_value(v: &str) -> Vec<String> {
    let v = v.trim();
    match v.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
        Some(inner) => inner
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        None => vec![v.to_string()],
    }
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<SweepConfig> {
        let mut raw: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: "expected `key = value`".into(),
            })?;
            let k = k.trim().to_string();
            if raw.insert(k.clone(), parse_value(v)).is_some() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("duplicate key {k:?}"),
                });
            }
        }
        let single = |raw: &mut BTreeMap<String, Vec<String>>, k: &str| -> Result<Option<String>> {
            match raw.remove(k) {
                None => Ok(None),
                Some(mut v) if v.len() == 1 => Ok(v.pop()),
                Some(_) => Err(invalid(format!("{k} takes a single value"))),
            }
        };
        let study: Study = single(&mut raw, "study")?.ok_or_else(|| invalid("missing `study`"))?.parse()?;
        let master_seed = match single(&mut raw, "master_seed")? {
            Some(s) => s.parse().map_err(|_| invalid(format!("bad master_seed {s:?}")))?,
            None => 0,
        };
        let output = single(&mut raw, "output")?
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", study.name())));
        for k in raw.keys() {
            if !study.keys().contains(&k.as_str()) {
                return Err(invalid(format!("key {k:?} does not apply to study {}", study.name())));
            }
        }
        for (k, v) in &raw {
            if v.is_empty() {
                return Err(invalid(format!("empty list for {k:?}")));
            }
        }
        Ok(SweepConfig {
            study,
            master_seed,
            output,
            params: raw,
        })
    }

    pub fn from_file(path: &Path) -> Result<SweepConfig> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.params
            .get(key)
            .map(|vals| {
                vals.iter()
                    .map(|v| v.parse::<T>().map_err(|_| invalid(format!("bad value {v:?} for {key}"))))
                    .collect()
            })
            .transpose()
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.list(key)?.ok_or_else(|| invalid(format!("missing `{key}` for study {}", self.study.name())))
    }

    fn scalar<T: FromStr + Copy>(&self, key: &str, default: T) -> Result<T> {
        match self.list::<T>(key)? {
            None => Ok(default),
            Some(v) if v.len() == 1 => Ok(v[0]),
            Some(_) => Err(invalid(format!("{key} takes a single value"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Job {
    Gnp { n: usize, p: f64, eps: f64, delta: f64 },
    Grid { m: usize, n: usize, c: f64 },
    Rgg { n: usize, mult: f64, a: f64, c0: f64 },
    Drunk { n: usize, variant: DrunkVariant, trials: usize },
    Oracle { n: usize, p: f64 },
}

#[derive(Debug, Clone)]
struct Cell {
    id: String,
    params: Vec<String>,
    job: Job,
}

fn cells(cfg: &SweepConfig) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    match cfg.study {
        Study::GnpCases => {
            let (eps, delta) = (cfg.scalar("eps", DEFAULT_EPS)?, cfg.scalar("delta", DEFAULT_DELTA)?);
            let samples: usize = cfg.scalar("samples", 1)?;
            for n in cfg.required::<usize>("n")? {
                for p in cfg.required::<f64>("p")? {
                    for s in 0..samples {
                        out.push(Cell {
                            id: format!("n={n};p={p};s={s}"),
                            params: vec![n.to_string(), p.to_string(), s.to_string()],
                            job: Job::Gnp { n, p, eps, delta },
                        });
                    }
                }
            }
        }
        Study::GridRatio => {
            let c = cfg.scalar("C", 1.0)?;
            let ms = cfg.required::<usize>("m")?;
            let ns = cfg.list::<usize>("n")?;
            for &m in &ms {
                let cols = ns.clone().unwrap_or_else(|| vec![m]);
                for n in cols {
                    out.push(Cell {
                        id: format!("m={m};n={n};C={c}"),
                        params: vec![m.to_string(), n.to_string(), c.to_string()],
                        job: Job::Grid { m, n, c },
                    });
                }
            }
        }
        Study::RggTheta => {
            let a = cfg.scalar("a", DEFAULT_CELL_COEFFICIENT)?;
            let c0 = cfg.scalar("C0", DEFAULT_C0)?;
            let samples: usize = cfg.scalar("samples", 1)?;
            for n in cfg.required::<usize>("n")? {
                for mult in cfg.required::<f64>("r_mult")? {
                    for s in 0..samples {
                        out.push(Cell {
                            id: format!("n={n};r_mult={mult};a={a};s={s}"),
                            params: vec![n.to_string(), mult.to_string(), s.to_string(), a.to_string()],
                            job: Job::Rgg { n, mult, a, c0 },
                        });
                    }
                }
            }
        }
        Study::DrunkPath => {
            let trials = cfg.scalar("trials", 100)?;
            let variants = cfg.list::<DrunkVariant>("variants")?.unwrap_or(DrunkVariant::ALL.to_vec());
            for n in cfg.required::<usize>("n")? {
                for &variant in &variants {
                    out.push(Cell {
                        id: format!("n={n};variant={variant};trials={trials}"),
                        params: vec![n.to_string(), variant.to_string(), trials.to_string()],
                        job: Job::Drunk { n, variant, trials },
                    });
                }
            }
        }
        Study::OracleEquivalence => {
            let samples: usize = cfg.scalar("samples", 1)?;
            let ps = cfg.list::<f64>("p")?.unwrap_or(vec![0.5]);
            for n in cfg.required::<usize>("n")? {
                for &p in &ps {
                    for s in 0..samples {
                        out.push(Cell {
                            id: format!("n={n};p={p};s={s}"),
                            params: vec![n.to_string(), p.to_string(), s.to_string()],
                            job: Job::Oracle { n, p },
                        });
                    }
                }
            }
        }
    }
    if out.is_empty() {
        return Err(invalid("parameter grid is empty"));
    }
    Ok(out)
}

/// FNV-1a, so seeds survive changes to the rest of the grid.
fn id_hash(id: &str) -> u64 {
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn cell_seed(master: u64, instance_id: &str) -> u64 {
    mix(master, id_hash(instance_id))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cert_json(c: &BoundCertificate) -> String {
    serde_json::to_string(c).expect("certificates serialize")
}

fn ids(xs: &[usize]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
    }
    s
}

type Parts = (Vec<String>, Vec<String>, Vec<String>);

fn run_job(job: &Job, seed: u64) -> Result<Parts> {
    Ok(match *job {
        Job::Gnp { n, p, eps, delta } => {
            let sample = gen_gnp(n, p, seed)?;
            let g = &sample.graph;
            let pred = predict_gnp(n, p, eps, delta)?;
            let lb = lower_bound_ballsum(g);
            let ub = upper_bound_center(g).ok();
            let b2 = if n >= 2 { b_two_certificate(g)? } else { None };
            let mut lower = lb.value;
            if n >= 3 && b2.is_none() {
                lower = lower.max(3);
            }
            let mut upper = ub.as_ref().map(|c| c.value);
            if b2.is_some() {
                upper = Some(upper.map_or(2, |u| u.min(2)));
            }
            let settled = upper.filter(|&u| u == lower);
            (
                vec![
                    format!("{:.6}", sample.d),
                    g.is_connected().to_string(),
                    b2.is_some().to_string(),
                    lower.to_string(),
                    opt(upper),
                    opt(settled),
                ],
                vec![
                    serde_json::to_value(pred.case).unwrap().as_str().unwrap().to_string(),
                    opt(pred.i),
                    pred.predicted.iter().map(usize::to_string).collect::<Vec<_>>().join("|"),
                ],
                vec![cert_json(&lb), ub.as_ref().map(cert_json).unwrap_or_default(), b2.as_ref().map(cert_json).unwrap_or_default()],
            )
        }
        Job::Grid { m, n, c } => {
            let plan = grid_strip_schedule(m, n, c)?;
            let pred = predict_grid(m, n)?;
            let achieved = plan.achieved_rounds.round();
            (
                vec![
                    serde_json::to_value(plan.regime).unwrap().as_str().unwrap().to_string(),
                    opt(achieved),
                    plan.lower_bound.to_string(),
                    opt(achieved.map(|a| format!("{:.6}", a as f64 / pred.leading))),
                    plan.strips.to_string(),
                    plan.repair_balls.to_string(),
                ],
                vec![format!("{:.6}", pred.leading), format!("{:.6}", plan.k2), plan.within_k2.to_string()],
                vec![ids(&plan.schedule.sources)],
            )
        }
        Job::Rgg { n, mult, a, c0 } => {
            let r = mult * critical_radius(n)?;
            let (g, pts) = gen_rgg(n, r, seed)?;
            let comps = g.components();
            let giant = comps.iter().max_by_key(|c| c.len()).expect("n >= 1");
            let sub = g.induced_subgraph(giant)?;
            let plan = rgg_cell_schedule(&sub, &pts.subset(giant), a)?;
            let bound = rgg_lower_bound(r, c0)?;
            let achieved = plan.achieved_rounds.round();
            (
                vec![
                    format!("{r:.9}"),
                    comps.len().to_string(),
                    giant.len().to_string(),
                    plan.ignitions.len().to_string(),
                    opt(achieved),
                    opt(achieved.map(|t| format!("{:.6}", t as f64 * r.powf(2.0 / 3.0)))),
                ],
                vec![bound.t.to_string(), bound.claim_at_least.to_string()],
                vec![],
            )
        }
        Job::Drunk { n, variant, trials } => {
            let stats = drunk_estimate(Instance::Path(n), variant, trials, seed)?;
            let pred = if n >= 2 { Some(predict_path_drunk(n, variant)?) } else { None };
            let (value, lo, hi, scale) = match pred {
                Some(PathDrunkPrediction::Point { value }) => (Some(value), None, None, value),
                Some(PathDrunkPrediction::Interval { lo, hi }) => (None, Some(lo), Some(hi), lo),
                None => (None, None, None, 1.0),
            };
            let f = |x: Option<f64>| opt(x.map(|v| format!("{v:.6}")));
            (
                vec![
                    format!("{:.6}", stats.mean),
                    format!("{:.6}", stats.stddev),
                    format!("{:.6}", stats.ci95),
                    stats.min.to_string(),
                    stats.max.to_string(),
                    format!("{}", stats.quantiles.p50),
                    f(stats.cost),
                    format!("{:.6}", stats.mean / scale),
                ],
                vec![f(value), f(lo), f(hi)],
                vec![],
            )
        }
        Job::Oracle { n, p } => {
            let g = gen_gnp(n, p, seed)?.graph;
            let brute = burning_number_bruteforce(&g)?;
            let exact = burning_number_exact(&g)
                .solved()
                .ok_or_else(|| invalid(format!("exact solver exhausted its budget on n={n}")))?;
            (
                vec![
                    exact.b.to_string(),
                    brute.b.to_string(),
                    (exact.b == brute.b).to_string(),
                    exact.nodes_explored.to_string(),
                ],
                vec![],
                vec![cert_json(&lower_bound_ballsum(&g)), ids(&exact.witness.sources)],
            )
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub study: Study,
    pub schema_version: u32,
    pub output: PathBuf,
    pub cells: usize,
    pub run: usize,
    pub skipped: usize,
}

fn existing_ids(path: &Path, header: &[String]) -> Result<Option<HashSet<String>>> {
    if !path.exists() || std::fs::metadata(path)?.len() == 0 {
        return Ok(None);
    }
    let mut rdr = csv::Reader::from_path(path)?;
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(invalid(format!("{} has a different column set; refusing to append", path.display())));
    }
    let mut out = HashSet::new();
    for rec in rdr.records() {
        let rec = rec?;
        if let Some(id) = rec.get(1) {
            out.insert(id.to_string());
        }
    }
    Ok(Some(out))
}

fn worker_count() -> usize {
    let hw = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("BURNLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(cap) if cap >= 1 => cap.min(hw.max(1)),
        _ => hw,
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    let all = cells(cfg)?;
    let header = cfg.study.header();
    let done = existing_ids(&cfg.output, &header)?;
    let fresh = done.is_none();
    let done = done.unwrap_or_default();
    let todo: Vec<&Cell> = all.iter().filter(|c| !done.contains(&c.id)).collect();

    let file = OpenOptions::new().create(true).append(true).open(&cfg.output)?;
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        wtr.write_record(&header)?;
        wtr.flush()?;
    }

    let workers = worker_count().min(todo.len()).max(1);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Result<Vec<String>>)>();
    let study = cfg.study;
    let master = cfg.master_seed;
    let result = std::thread::scope(|scope| -> Result<()> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, todo) = (&next, &todo);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = todo.get(i) else { break };
                let seed = cell_seed(master, &cell.id);
                let start = Instant::now();
                let row = run_job(&cell.job, seed).map(|(measured, predicted, cert)| {
                    let mut row = vec![study.name().to_string(), cell.id.clone()];
                    row.extend(cell.params.iter().cloned());
                    row.push(seed.to_string());
                    row.extend(measured);
                    row.extend(predicted);
                    row.extend(cert);
                    row.push(format!("{:.3}", start.elapsed().as_secs_f64() * 1e3));
                    row
                });
                if tx.send((i, row)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        // single sink; rows leave in cell order whatever order they finish in
        let mut pending: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        let mut emit = 0;
        for (i, row) in rx {
            pending.insert(i, row?);
            while let Some(row) = pending.remove(&emit) {
                wtr.write_record(&row)?;
                wtr.flush()?;
                emit += 1;
            }
        }
        Ok(())
    });
    // an early error drops the receiver, so workers stop at their next send
    result?;
    wtr.flush()?;
    Ok(SweepSummary {
        study: cfg.study,
        schema_version: SCHEMA_VERSION,
        output: cfg.output.clone(),
        cells: all.len(),
        run: todo.len(),
        skipped: all.len() - todo.len(),
    })
}

/// A result row keyed by column name.
pub type Row = BTreeMap<String, String>;

pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let mut rdr = csv::Reader::from_reader(std::io::BufReader::new(File::open(path)?));
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.push(header.iter().cloned().zip(rec.iter().map(str::to_string)).collect());
    }
    Ok(out)
}

/// Regenerate the row's instance from its parameters and seed, then recheck
/// every certificate it carries. Rows without certificates pass trivially.
pub fn recheck_row(row: &Row) -> Result<bool> {
    let get = |k: &str| row.get(k).map(String::as_str).unwrap_or("");
    let num = |k: &str| -> Result<f64> { get(k).parse().map_err(|_| invalid(format!("bad {k}"))) };
    let seed: u64 = get("seed").parse().map_err(|_| invalid("bad seed"))?;
    let study: Study = get("study").parse()?;
    match study {
        Study::GnpCases | Study::OracleEquivalence => {
            let g = gen_gnp(num("param:n")? as usize, num("param:p")?, seed)?.graph;
            for col in ["cert:lower", "cert:upper", "cert:b_two"] {
                let text = get(col);
                if text.is_empty() {
                    continue;
                }
                let cert: BoundCertificate =
                    serde_json::from_str(text).map_err(|e| invalid(format!("{col}: {e}")))?;
                if !cert.recheck(&g)? {
                    return Ok(false);
                }
            }
            if study == Study::OracleEquivalence {
                let sources = parse_ids(get("cert:witness"))?;
                let b: usize = num("measured:exact")? as usize;
                let t = simulate(&g, &BurnSchedule::strict(sources))?;
                return Ok(matches!(t.completion, Completion::Round(r) if r <= b));
            }
            Ok(true)
        }
        Study::GridRatio => {
            let g = grid(num("param:m")? as usize, num("param:n")? as usize)?;
            let t = simulate(&g, &BurnSchedule::strict(parse_ids(get("cert:schedule"))?))?;
            Ok(t.completion.round().map(|r| r.to_string()).unwrap_or_default() == get("measured:achieved"))
        }
        Study::RggTheta | Study::DrunkPath => Ok(true),
    }
}

fn parse_ids(s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|x| x.parse().map_err(|_| invalid(format!("bad vertex id {x:?}"))))
        .collect()
}

/// Convenience for callers holding a config on disk.
pub fn run_sweep_file(path: &Path) -> Result<SweepSummary> {
    run_sweep(&SweepConfig::from_file(path)?)
}
