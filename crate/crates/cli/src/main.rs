//! `ipir`: run, audit and tabulate the private-retrieval protocol from the command line.
//!
//! Exit codes: 0 pass, 1 usage or parameter error, 2 correctness failure, 3 budget exceeded.

use std::collections::BTreeMap;
use std::hash::{BuildHasher, Hasher};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ipir_core::audit::{
    audit_support, branch_balance_sides, decodability_report, monte_carlo_privacy, privacy_report,
    rate_row, JointDistribution, DEFAULT_BUDGET,
};
use ipir_core::exact::fmt_ratio;
use ipir_core::ff::MessageVec;
use ipir_core::goodrel::{
    check_cover_bound, min_cover_size, relation_from_graph, validate_good, GoodVariant, SetRelation,
};
use ipir_core::gpcip::{
    achievable_rate, answer_query, branch_weights, build_query, count_corrected_weights,
    measured_rate, recover, sample_partition, DemandSideInfo, Instance, Mutation,
};
use ipir_core::motherset::{scan_d_graphs_with_budget, Digraph, ScanMode};
use ipir_core::rng::{ProtocolRng, RNG_ALGORITHM};

#[derive(Parser)]
#[command(
    name = "ipir",
    version,
    about = "Single-server private retrieval with side information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derived block layout, branch weights and achievable rate.
    Params(InstanceArgs),
    /// One end-to-end protocol run with random messages.
    Run(RunArgs),
    /// Exact (or sampled) check that every index is a demand with probability D/K given the query.
    AuditPrivacy(PrivacyArgs),
    /// Every reachable query needs at least ceil(K/D) indices to hit all possible demand sets.
    AuditSupport(ExactArgs),
    /// Every index of every reachable query belongs to some decodable demand set.
    AuditDecodability(ExactArgs),
    /// Achievable against measured rate over a parameter grid.
    RateTable(RateTableArgs),
    /// Closed-form balance identities for every valid instance up to a size.
    #[command(name = "theta-balance")]
    BranchBalance(BalanceArgs),
    /// Scan digraphs for D-graphs whose external mother set exceeds floor(K/(D+1)).
    Conj2(Conj2Args),
    /// Validate a set relation and check its minimum cover against the bound.
    GoodrelCheck(GoodrelArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Number of messages.
    #[arg(long = "K")]
    k: usize,
    /// Side-information size.
    #[arg(long = "M")]
    side: usize,
    /// Demand size.
    #[arg(long = "D")]
    demand: usize,
    /// Prime field order; defaults to the smallest prime >= M + D.
    #[arg(long)]
    q: Option<u64>,
    /// Symbols per message.
    #[arg(long, default_value_t = 1)]
    m: usize,
}

impl InstanceArgs {
    fn instance(&self) -> ipir_core::Result<Instance> {
        let base = Instance::with_default_field(self.k, self.side, self.demand)?;
        Instance::new(
            self.k,
            self.side,
            self.demand,
            self.q.unwrap_or(base.q),
            self.m,
        )
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// PRNG seed; 0 draws one from the operating system.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Demand indices (1-based, comma separated); sampled if absent.
    #[arg(long, value_delimiter = ',', requires = "side_info")]
    demand_set: Option<Vec<usize>>,
    /// Side-information indices (1-based, comma separated).
    #[arg(long, value_delimiter = ',', requires = "demand_set")]
    side_info: Option<Vec<usize>>,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Maximum number of enumerated placements.
    #[arg(long, env = "IPIR_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    Honest,
    AlwaysSpread,
    DoubledSpread,
    NoShuffle,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::Honest => Mutation::Honest,
            MutationArg::AlwaysSpread => Mutation::AlwaysSpread,
            MutationArg::DoubledSpread => Mutation::DoubledSpreadWeight,
            MutationArg::NoShuffle => Mutation::NoShuffle,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightsArg {
    /// Branch weights exactly as in the protocol definition.
    Standard,
    /// Residual-block count C(rho-1, D-1) in place of C(rho, D) when rho > D.
    CountCorrected,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AuditMode {
    Exact,
    Sample,
}

#[derive(Args)]
struct PrivacyArgs {
    #[command(flatten)]
    exact: ExactArgs,
    #[arg(long, value_enum, default_value_t = MutationArg::Honest)]
    mutation: MutationArg,
    #[arg(long, value_enum, default_value_t = WeightsArg::Standard)]
    weights: WeightsArg,
    #[arg(long, value_enum, default_value_t = AuditMode::Exact)]
    mode: AuditMode,
    /// Protocol runs in sample mode.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// PRNG seed for sample mode; 0 draws one from the operating system.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RateTableArgs {
    #[arg(long, default_value_t = 3)]
    k_min: usize,
    #[arg(long, default_value_t = 12)]
    k_max: usize,
    /// Side-information sizes (comma separated).
    #[arg(long = "M", value_delimiter = ',', default_value = "1")]
    side: Vec<usize>,
    /// Demand sizes (comma separated).
    #[arg(long = "D", value_delimiter = ',', default_value = "2")]
    demand: Vec<usize>,
    /// Seeded runs per instance.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// First seed; run `i` uses `seed + i`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct BalanceArgs {
    /// Largest K checked; every valid (K, M, D) with K at most this is included.
    #[arg(long, default_value_t = 30)]
    k_max: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanModeArg {
    Exhaustive,
    Sample,
}

#[derive(Args)]
struct Conj2Args {
    #[arg(long = "K")]
    k: usize,
    #[arg(long = "D")]
    demand: usize,
    #[arg(long, value_enum, default_value_t = ScanModeArg::Exhaustive)]
    mode: ScanModeArg,
    /// Graphs drawn in sample mode.
    #[arg(long, default_value_t = 1_000_000)]
    count: u64,
    /// PRNG seed for sample mode; 0 draws one from the operating system.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum number of graphs in exhaustive mode.
    #[arg(long, env = "IPIR_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Literal,
    ExcludingI,
}

impl From<VariantArg> for GoodVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Literal => GoodVariant::Literal,
            VariantArg::ExcludingI => GoodVariant::ExcludingI,
        }
    }
}

#[derive(Args)]
struct GoodrelArgs {
    /// Relation JSON: {"K","M","D","f":[{"I":[..],"J":[..]}]}.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    file: Option<PathBuf>,
    /// Graph JSON {"n","edges"}; the relation maps each node to its reach set.
    #[arg(long, requires = "demand")]
    graph: Option<PathBuf>,
    /// Demand size for a graph relation.
    #[arg(long = "D")]
    demand: Option<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::Literal)]
    variant: VariantArg,
}

fn effective_seed(seed: u64) -> u64 {
    if seed != 0 {
        return seed;
    }
    // RandomState is keyed from operating-system entropy
    let h = std::collections::hash_map::RandomState::new()
        .build_hasher()
        .finish();
    h.max(1)
}

fn emit<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn zero_based(v: &[usize], k: usize) -> anyhow::Result<Vec<usize>> {
    v.iter()
        .map(|&i| {
            if i == 0 || i > k {
                bail!("index {i} outside 1..={k}")
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

fn cmd_params(args: &InstanceArgs) -> anyhow::Result<bool> {
    let inst = args.instance()?;
    let w = branch_weights(&inst);
    emit(&json!({
        "instance": inst,
        "params": inst.params(),
        "weights": w,
        "spread_probability": fmt_ratio(&w.spread_probability()),
        "achievable_rate": fmt_ratio(&achievable_rate(inst.k, inst.side, inst.demand)?),
    }))?;
    Ok(true)
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<bool> {
    let inst = args.inst.instance()?;
    let seed = effective_seed(args.seed);
    let mut rng = ProtocolRng::from_seed(seed);
    let messages: Vec<MessageVec> = (0..inst.k)
        .map(|_| MessageVec::new((0..inst.m).map(|_| rng.below(inst.q)).collect()))
        .collect();
    let ws = match (&args.demand_set, &args.side_info) {
        (Some(w), Some(s)) => {
            DemandSideInfo::new(&inst, &zero_based(w, inst.k)?, &zero_based(s, inst.k)?)?
        }
        _ => DemandSideInfo::sample(&inst, &mut rng),
    };
    let partition = sample_partition(&inst, &ws, &mut rng);
    let query = build_query(&partition, &inst, &mut rng);
    let answer = answer_query(&query, &messages)?;
    let side_values: BTreeMap<usize, MessageVec> =
        ws.side.iter().map(|&i| (i, messages[i].clone())).collect();
    let recovered = recover(&query, &answer, &ws, &side_values)?;
    let ok = ws
        .demand
        .iter()
        .all(|j| recovered.get(j) == Some(&messages[*j]));
    let recovered_json: Vec<Value> = recovered
        .iter()
        .map(|(j, x)| json!({"index": j + 1, "symbols": x.symbols}))
        .collect();
    emit(&json!({
        "rng": RNG_ALGORITHM,
        "seed": seed,
        "instance": inst,
        "demand": one_based(&ws.demand),
        "side": one_based(&ws.side),
        "query": query,
        "answer": answer,
        "recovered": recovered_json,
        "planted_match": ok,
        "rate": fmt_ratio(&measured_rate(&query)?),
    }))?;
    Ok(ok)
}

fn joint(
    args: &ExactArgs,
    mutation: Mutation,
    weights: WeightsArg,
) -> anyhow::Result<JointDistribution> {
    let inst = args.inst.instance()?;
    let joint = match weights {
        WeightsArg::Standard => JointDistribution::build(&inst, mutation, args.budget)?,
        WeightsArg::CountCorrected => {
            if mutation != Mutation::Honest && mutation != Mutation::NoShuffle {
                bail!("--weights count-corrected only combines with honest or no-shuffle");
            }
            let p = count_corrected_weights(&inst).spread_probability();
            JointDistribution::build_with_spread(&inst, mutation, &p, args.budget)?
        }
    };
    Ok(joint)
}

fn cmd_audit_privacy(args: &PrivacyArgs) -> anyhow::Result<bool> {
    match args.mode {
        AuditMode::Exact => {
            let report = privacy_report(&joint(&args.exact, args.mutation.into(), args.weights)?);
            emit(&report)?;
            Ok(report.pass)
        }
        AuditMode::Sample => {
            if !matches!(args.mutation, MutationArg::Honest) || args.weights != WeightsArg::Standard
            {
                bail!("sample mode audits the honest protocol with standard weights only");
            }
            let inst = args.exact.inst.instance()?;
            let seed = effective_seed(args.seed);
            let report = monte_carlo_privacy(&inst, args.samples, seed);
            emit(&json!({"rng": RNG_ALGORITHM, "seed": seed, "report": report}))?;
            Ok(report.pass)
        }
    }
}

fn cmd_audit_support(args: &ExactArgs) -> anyhow::Result<bool> {
    let report = audit_support(&joint(args, Mutation::Honest, WeightsArg::Standard)?);
    emit(&report)?;
    Ok(report.pass)
}

fn cmd_audit_decodability(args: &ExactArgs) -> anyhow::Result<bool> {
    let report = decodability_report(&joint(args, Mutation::Honest, WeightsArg::Standard)?)?;
    emit(&report)?;
    Ok(report.pass)
}

fn cmd_rate_table(args: &RateTableArgs) -> anyhow::Result<bool> {
    let mut rows = Vec::new();
    for k in args.k_min..=args.k_max {
        for &side in &args.side {
            for &demand in &args.demand {
                if side + demand > k || side == 0 || demand < 2 {
                    continue;
                }
                let inst = Instance::with_default_field(k, side, demand)?;
                rows.push(rate_row(&inst, args.seeds, args.seed)?);
            }
        }
    }
    match args.format {
        Format::Json => emit(&rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["K", "M", "D", "achievable", "measured", "match"])?;
            for r in &rows {
                let measured = r
                    .measured
                    .as_ref()
                    .map(fmt_ratio)
                    .unwrap_or_else(|| "inconsistent".into());
                w.write_record([
                    r.k.to_string(),
                    r.side.to_string(),
                    r.demand.to_string(),
                    fmt_ratio(&r.achievable),
                    measured,
                    r.matches.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(rows.iter().all(|r| r.matches))
}

fn cmd_branch_balance(args: &BalanceArgs) -> anyhow::Result<bool> {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for k in 3..=args.k_max.min(63) {
        for demand in 2..k {
            for side in 1..=k - demand {
                let inst = Instance::with_default_field(k, side, demand)?;
                let (lhs, rhs) = branch_balance_sides(&inst, &branch_weights(&inst));
                checked += 1;
                if lhs != rhs {
                    failures.push(json!({
                        "K": k, "M": side, "D": demand,
                        "residual_side": fmt_ratio(&lhs), "block_side": fmt_ratio(&rhs),
                    }));
                }
            }
        }
    }
    let pass = failures.is_empty();
    emit(&json!({"instances_checked": checked, "pass": pass, "failures": failures}))?;
    Ok(pass)
}

fn cmd_conj2(args: &Conj2Args) -> anyhow::Result<bool> {
    let mode = match args.mode {
        ScanModeArg::Exhaustive => ScanMode::Exhaustive,
        ScanModeArg::Sample => ScanMode::Sample {
            count: args.count,
            seed: effective_seed(args.seed),
        },
    };
    let report = scan_d_graphs_with_budget(args.k, args.demand, mode, args.budget)?;
    emit(&report)?;
    Ok(report.pass())
}

fn cmd_goodrel(args: &GoodrelArgs) -> anyhow::Result<bool> {
    let relation = match (&args.file, &args.graph) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            SetRelation::from_json(&text)?
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let demand = args.demand.context("--D is required with --graph")?;
            relation_from_graph(&Digraph::from_json(&text)?, demand)
        }
        (None, None) => bail!("one of --file or --graph is required"),
    };
    let variant: GoodVariant = args.variant.into();
    let report = validate_good(&relation, variant);
    let cover = min_cover_size(&relation);
    let bound_check = if report.good {
        Some(check_cover_bound(&relation, variant)?)
    } else {
        None
    };
    let pass = bound_check.as_ref().is_none_or(|c| c.ok);
    emit(&json!({
        "K": relation.k(),
        "M": relation.side(),
        "D": relation.demand(),
        "report": report,
        "min_cover": cover.map(|(size, set)| json!({"size": size, "cover": one_based(&set)})),
        "cover_bound": bound_check,
    }))?;
    Ok(pass)
}

fn dispatch(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Params(a) => cmd_params(a),
        Command::Run(a) => cmd_run(a),
        Command::AuditPrivacy(a) => cmd_audit_privacy(a),
        Command::AuditSupport(a) => cmd_audit_support(a),
        Command::AuditDecodability(a) => cmd_audit_decodability(a),
        Command::RateTable(a) => cmd_rate_table(a),
        Command::BranchBalance(a) => cmd_branch_balance(a),
        Command::Conj2(a) => cmd_conj2(a),
        Command::GoodrelCheck(a) => cmd_goodrel(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = matches!(
                e.downcast_ref::<ipir_core::Error>(),
                Some(ipir_core::Error::BudgetExceeded { .. })
            );
            ExitCode::from(if budget { 3 } else { 1 })
        }
    }
}
