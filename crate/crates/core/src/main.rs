//! `plbc` command-line front end.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use plbc::alloc::{allocate, enumerate_candidates, Method};
use plbc::bound::{capacities, decoding_failure_bound, AwMethod, WeightDistribution};
use plbc::channel::{table2, ChannelParams};
use plbc::codec::{construct_pbch, field_degree, PlbcParams};
use plbc::sim::{run_trials_with, SimOptions};
use plbc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "plbc",
    version,
    about = "Partitioned BCH codes for stuck-at defect memories"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "PLBC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct one PBCH code and print its JSON descriptor.
    Code(CodeArgs),
    /// List every (l, r) redundancy split with its designed distances.
    Candidates(CandidatesArgs),
    /// Capacities with and without defect side information.
    Capacity(CapacityArgs),
    /// Monte Carlo failure rates.
    Simulate(SimulateArgs),
    /// Analytical upper bound on the decoding-failure probability.
    Bound(BoundArgs),
    /// Pick the redundancy split minimizing the failure metric.
    Allocate(AllocateArgs),
}

#[derive(Args, Clone)]
struct CodeShape {
    /// Code length, 2^m - 1.
    #[arg(long, default_value_t = 1023)]
    n: usize,
    /// Message length.
    #[arg(long, default_value_t = 923)]
    k: usize,
    /// Field degree (derived from n when omitted).
    #[arg(long)]
    m: Option<u32>,
}

impl CodeShape {
    fn m(&self) -> Result<u32> {
        let derived = field_degree(self.n)?;
        match self.m {
            Some(m) if m != derived => Err(Error::Usage(format!(
                "m={m} does not match n={} (expected m={derived})",
                self.n
            ))),
            _ => Ok(derived),
        }
    }
}

#[derive(Args, Clone)]
struct ChannelArgs {
    /// Defect probability.
    #[arg(long, requires = "p", conflicts_with = "preset")]
    epsilon: Option<f64>,
    /// Random-error probability on normal cells.
    #[arg(long, requires = "epsilon", conflicts_with = "preset")]
    p: Option<f64>,
    /// Named channel list.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// The seven channels sharing C_min = 0.9624.
    Table2,
}

impl ChannelArgs {
    /// `(id, channel)` pairs; a single explicit channel gets id 1.
    fn channels(&self) -> Result<Vec<(usize, ChannelParams)>> {
        match (self.preset, self.epsilon, self.p) {
            (Some(Preset::Table2), _, _) => Ok(table2()),
            (None, Some(e), Some(p)) => Ok(vec![(1, ChannelParams::new(e, p)?)]),
            _ => Err(Error::Usage(
                "give --epsilon and --p, or --preset table2".into(),
            )),
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CodeArgs {
    #[command(flatten)]
    shape: CodeShape,
    /// Masking redundancy.
    #[arg(long)]
    l: usize,
    /// Include G1, G0, H and the message inverse as hex rows.
    #[arg(long)]
    matrices: bool,
    /// Also compute the true distances by enumeration (small codes only).
    #[arg(long)]
    verify: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CandidatesArgs {
    #[command(flatten)]
    shape: CodeShape,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CapacityArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum AwArg {
    Exact,
    Macwilliams,
    Binomial,
}

impl From<AwArg> for AwMethod {
    fn from(a: AwArg) -> Self {
        match a {
            AwArg::Exact => AwMethod::ExactEnumeration,
            AwArg::Macwilliams => AwMethod::Macwilliams,
            AwArg::Binomial => AwMethod::BinomialApprox,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    shape: CodeShape,
    /// Masking redundancy; every candidate when omitted.
    #[arg(long)]
    l: Option<usize>,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Trials per (code, channel) pair.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stop once this many decoding failures are seen (100 when given without a value).
    #[arg(long, num_args = 0..=1, default_missing_value = "100")]
    stop_after: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    shape: CodeShape,
    /// Masking redundancy; every candidate when omitted.
    #[arg(long)]
    l: Option<usize>,
    #[command(flatten)]
    channel: ChannelArgs,
    /// How the weight distribution A_w is obtained.
    #[arg(long, value_enum, default_value_t = AwArg::Binomial)]
    aw: AwArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Bound,
    Simulation,
}

#[derive(Args)]
struct AllocateArgs {
    #[command(flatten)]
    shape: CodeShape,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Failure metric to minimize.
    #[arg(long, value_enum, default_value_t = MethodArg::Bound)]
    method: MethodArg,
    /// Weight distribution for the bound metric.
    #[arg(long, value_enum, default_value_t = AwArg::Binomial)]
    aw: AwArg,
    /// Trials per candidate for the simulation metric.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Master seed for the simulation metric.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stop once this many decoding failures are seen (100 when given without a value).
    #[arg(long, num_args = 0..=1, default_missing_value = "100")]
    stop_after: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// `%.12g`-style rendering.
fn g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{x:.*}", (11 - exp) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds every float in a JSON tree to 12 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            if let Some(r) = g12(x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
            {
                *num = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

struct Table {
    schema: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(schema: &'static str, header: &[&'static str]) -> Self {
        Self {
            schema,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>> {
        let mut buf = format!("# schema: {}\n", self.schema).into_bytes();
        let mut w = csv::Writer::from_writer(&mut buf);
        let csv_err = |e: csv::Error| Error::Numeric(format!("csv output: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush()
            .map_err(|e| Error::Numeric(format!("csv output: {e}")))?;
        drop(w);
        Ok(buf)
    }

    /// Rows as objects; cells that parse as numbers stay numeric.
    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, cell)| {
                        let v = serde_json::from_str::<Value>(cell)
                            .ok()
                            .filter(Value::is_number)
                            .unwrap_or_else(|| Value::String(cell.clone()));
                        (h.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "schema": self.schema, "rows": rows })
    }
}

fn emit(output: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Error::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn emit_json(output: Option<&PathBuf>, mut v: Value) -> Result<()> {
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Numeric(e.to_string()))?;
    s.push('\n');
    emit(output, s.as_bytes())
}

fn emit_table(o: &OutputArgs, t: &Table) -> Result<()> {
    match o.format {
        Format::Csv => emit(o.out.as_ref(), &t.to_csv()?),
        Format::Json => emit_json(o.out.as_ref(), t.to_json()),
    }
}

/// Masking redundancies to evaluate: the one given, or every candidate.
fn selected_l(shape: &CodeShape, l: Option<usize>) -> Result<Vec<(usize, usize)>> {
    let m = shape.m()?;
    let all = enumerate_candidates(shape.n, shape.k, m)?;
    match l {
        None => Ok(all.iter().map(|c| (c.index, c.l)).collect()),
        Some(l) => {
            // Fails with the construction constraint when l is not admissible.
            PlbcParams::new(shape.n, shape.k, l)?;
            Ok(vec![(l / m as usize, l)])
        }
    }
}

fn cmd_code(a: &CodeArgs) -> Result<()> {
    a.shape.m()?;
    let code = construct_pbch(a.shape.n, a.shape.k, a.l)?;
    let mut v = serde_json::to_value(code.descriptor(a.matrices))
        .map_err(|e| Error::Numeric(e.to_string()))?;
    if a.verify {
        let (d0, d1) = code.verify_distances()?;
        v["verified_d0"] = json!(d0);
        v["verified_d1"] = json!(d1);
    }
    v["schema"] = json!("code/1");
    emit_json(a.out.as_ref(), v)
}

fn cmd_candidates(a: &CandidatesArgs) -> Result<()> {
    let cands = enumerate_candidates(a.shape.n, a.shape.k, a.shape.m()?)?;
    let mut t = Table::new("candidates/1", &["index", "l", "r", "d0", "d1"]);
    for c in cands {
        t.push(vec![
            c.index.to_string(),
            c.l.to_string(),
            c.r.to_string(),
            c.d0.to_string(),
            c.d1.to_string(),
        ]);
    }
    emit_table(&a.output, &t)
}

fn cmd_capacity(a: &CapacityArgs) -> Result<()> {
    let mut t = Table::new(
        "capacity/1",
        &["channel_id", "epsilon", "p", "p_tilde", "c_min", "c_max"],
    );
    for (id, ch) in a.channel.channels()? {
        let c = capacities(&ch);
        t.push(vec![
            id.to_string(),
            g12(c.epsilon),
            g12(c.p),
            g12(c.p_tilde),
            g12(c.c_min),
            g12(c.c_max),
        ]);
    }
    emit_table(&a.output, &t)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let channels = a.channel.channels()?;
    let ls = selected_l(&a.shape, a.l)?;
    if a.trials == 0 {
        return Err(Error::Usage("--trials must be at least 1".into()));
    }
    let mut t = Table::new(
        "simulate/1",
        &[
            "channel_id",
            "epsilon",
            "p",
            "l",
            "r",
            "trials",
            "mask_fails",
            "dec_fails",
            "rate",
            "ci_lo",
            "ci_hi",
            "seed",
        ],
    );
    for &(lane, l) in &ls {
        let code = construct_pbch(a.shape.n, a.shape.k, l)?;
        for &(id, ch) in &channels {
            let opts = SimOptions {
                threads: None,
                stop_after_failures: a.stop_after,
                lane: lane as u64,
            };
            let s = run_trials_with(&code, &ch, a.trials, a.seed, &opts)?;
            t.push(vec![
                id.to_string(),
                g12(ch.epsilon),
                g12(ch.p),
                l.to_string(),
                code.params().r.to_string(),
                s.trials.to_string(),
                s.masking_failures.to_string(),
                s.decoding_failures.to_string(),
                g12(s.failure_rate),
                g12(s.ci95.0),
                g12(s.ci95.1),
                s.seed.to_string(),
            ]);
        }
    }
    // Keep rows grouped by channel, then l.
    t.rows.sort_by_key(|r| {
        (
            r[0].parse::<usize>().unwrap_or(0),
            r[3].parse::<usize>().unwrap_or(0),
        )
    });
    emit_table(&a.output, &t)
}

fn cmd_bound(a: &BoundArgs) -> Result<()> {
    let channels = a.channel.channels()?;
    let ls = selected_l(&a.shape, a.l)?;
    let aw: AwMethod = a.aw.into();
    let mut t = Table::new(
        "bound/1",
        &[
            "channel_id",
            "epsilon",
            "p",
            "l",
            "r",
            "d0",
            "d1",
            "aw_method",
            "bound_mask_fail",
            "bound_maskok_fail",
            "bound_total",
            "bound_total_clamped",
            "regime",
        ],
    );
    for &(id, ch) in &channels {
        for &(_, l) in &ls {
            let params = PlbcParams::new(a.shape.n, a.shape.k, l)?;
            let wd = match aw {
                AwMethod::BinomialApprox => {
                    WeightDistribution::binomial_approx(params.n, params.l, params.d0)
                }
                exact => {
                    WeightDistribution::for_code(&construct_pbch(params.n, params.k, l)?, exact)?
                }
            };
            let b = decoding_failure_bound(&params, &wd, &ch)?;
            let regime =
                serde_json::to_value(b.regime).map_err(|e| Error::Numeric(e.to_string()))?;
            t.push(vec![
                id.to_string(),
                g12(ch.epsilon),
                g12(ch.p),
                l.to_string(),
                params.r.to_string(),
                params.d0.to_string(),
                params.d1.to_string(),
                aw.to_string(),
                g12(b.p_mask_and_fail),
                g12(b.p_maskok_and_fail),
                g12(b.total),
                g12(b.clamped_total()),
                regime.as_str().unwrap_or_default().to_string(),
            ]);
        }
    }
    emit_table(&a.output, &t)
}

fn cmd_allocate(a: &AllocateArgs) -> Result<()> {
    let channels = a.channel.channels()?;
    let m = a.shape.m()?;
    enumerate_candidates(a.shape.n, a.shape.k, m)?;
    let method = match a.method {
        MethodArg::Bound => Method::Bound { aw: a.aw.into() },
        MethodArg::Simulation => {
            if a.trials == 0 {
                return Err(Error::Usage("--trials must be at least 1".into()));
            }
            Method::Simulation {
                trials: a.trials,
                seed: a.seed,
                stop_after_failures: a.stop_after,
            }
        }
    };
    let mut reports = Vec::new();
    for &(id, ch) in &channels {
        reports.push((id, allocate(a.shape.n, a.shape.k, m, &ch, &method)?));
    }
    match a.output.format {
        Format::Json => {
            let list: Vec<Value> = reports
                .iter()
                .map(|(id, r)| {
                    let mut v = serde_json::to_value(r).expect("report serializes");
                    v["channel_id"] = json!(id);
                    v
                })
                .collect();
            emit_json(
                a.output.out.as_ref(),
                json!({ "schema": "allocate/1", "reports": list }),
            )
        }
        Format::Csv => {
            let mut t = Table::new(
                "allocate/1",
                &[
                    "channel_id",
                    "epsilon",
                    "p",
                    "method",
                    "l",
                    "r",
                    "d0",
                    "d1",
                    "metric",
                    "ci_lo",
                    "ci_hi",
                    "estimable",
                    "is_best",
                ],
            );
            for (id, r) in &reports {
                for c in &r.candidates {
                    let (lo, hi) = c.ci.map_or((String::new(), String::new()), |(lo, hi)| {
                        (g12(lo), g12(hi))
                    });
                    t.push(vec![
                        id.to_string(),
                        g12(r.channel.epsilon),
                        g12(r.channel.p),
                        r.method.clone(),
                        c.l.to_string(),
                        c.r.to_string(),
                        c.d0.to_string(),
                        c.d1.to_string(),
                        g12(c.metric),
                        lo,
                        hi,
                        c.estimable.to_string(),
                        (c.l == r.best_l).to_string(),
                    ]);
                }
            }
            emit_table(&a.output, &t)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot start {t} worker threads: {e}")))?;
    }
    match &cli.command {
        Command::Code(a) => cmd_code(a),
        Command::Candidates(a) => cmd_candidates(a),
        Command::Capacity(a) => cmd_capacity(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Allocate(a) => cmd_allocate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
