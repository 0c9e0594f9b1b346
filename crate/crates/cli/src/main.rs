use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use spatial_align::generate::{gen_random, GenParams};
use spatial_align::io::{
    alignment_to_json, instance_to_json, load_instance, parse_alignment, parse_multiset,
};
use spatial_align::multialign::align_multi;
use spatial_align::oracle::{
    brute_force_align, generate_gadget, verify_partition_equivalence, Equivalence, OracleLimits,
    OracleMode,
};
use spatial_align::pairalign::{
    align_pair, build_shared_units_graph, max_weight_matching, Part, PartitionTrace,
};
use spatial_align::render::render_svg;
use spatial_align::solver1d::solve_1d;
use spatial_align::{
    disagreement_set, unit_distance, weighted_distance, Alignment, Instance, LabelMap,
};

/// Align collections of contiguous spatial supports.
#[derive(Parser)]
#[command(name = "spalign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact separator scan for path instances.
    #[command(name = "align-1d")]
    Align1d {
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Two-collection heuristic with bound report.
    AlignPair {
        input: PathBuf,
        /// Print the greedy partition steps to stderr.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Heuristic for any number of collections.
    AlignMulti {
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Brute-force optimum for small instances.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value = "restricted", value_parser = ["restricted", "full"])]
        mode: String,
        #[command(flatten)]
        output: Output,
    },
    /// Reduction instance for a multiset of positive integers.
    GenGadget {
        /// Comma-separated values, e.g. 3,5,7.
        #[arg(long)]
        x: String,
        #[command(flatten)]
        output: Output,
    },
    /// Seeded random grid instance.
    GenRandom {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        width: usize,
        #[arg(long, default_value_t = 4)]
        height: usize,
        /// Number of collections.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Supports per collection.
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        pop_min: u64,
        #[arg(long, default_value_t = 20)]
        pop_max: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Check the partition/alignment correspondence of a gadget.
    VerifyGadget {
        #[arg(long)]
        x: String,
        #[arg(long)]
        delta: u64,
        #[command(flatten)]
        output: Output,
    },
    /// SVG map of the collections, and of an alignment if given.
    Render {
        input: PathBuf,
        #[arg(long)]
        alignment: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Distances between collections, or to an alignment.
    Metrics {
        input: PathBuf,
        #[arg(long)]
        alignment: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Align1d { input, output } => {
            let inst = load(&input)?;
            let sol = solve_1d(&inst)?;
            let mut v = alignment_to_json(&inst, &sol.alignment);
            v["separators"] = sol
                .choices
                .iter()
                .map(|c| {
                    json!({
                        "window": c.window,
                        "left": c.span.left,
                        "right": c.span.right,
                        "position": c.position,
                        "cost": c.cost,
                        "costs": c.costs,
                    })
                })
                .collect();
            v["summed_cost"] = json!(sol.summed_cost);
            emit_json(&output, &v)
        }
        Command::AlignPair {
            input,
            trace,
            output,
        } => {
            let inst = load(&input)?;
            let r = align_pair(&inst)?;
            if trace {
                eprint!("{}", trace_table(&inst, &r.partition.trace));
            }
            let mut v = alignment_to_json(&inst, &r.alignment);
            v["report"] = serde_json::to_value(&r.report)?;
            v["matching"] = json!({
                "pairs": r.matching.pairs.iter().map(|&(s, t)| [&r.graph.left[s], &r.graph.right[t]]).collect::<Vec<_>>(),
                "weight": r.matching.weight,
            });
            emit_json(&output, &v)
        }
        Command::AlignMulti { input, output } => {
            let inst = load(&input)?;
            let r = align_multi(&inst)?;
            for w in &r.report.warnings {
                eprintln!("warning: {w}");
            }
            let mut v = alignment_to_json(&inst, &r.alignment);
            v["report"] = serde_json::to_value(&r.report)?;
            emit_json(&output, &v)
        }
        Command::Oracle {
            input,
            mode,
            output,
        } => {
            let inst = load(&input)?;
            let mode: OracleMode = mode.parse()?;
            let r = brute_force_align(&inst, mode, OracleLimits::default())?;
            let mut v = alignment_to_json(&inst, &r.alignment);
            v["oracle"] = json!({
                "optimum": r.optimum,
                "examined": r.examined,
                "feasible": r.feasible,
            });
            emit_json(&output, &v)
        }
        Command::GenGadget { x, output } => {
            let inst = generate_gadget(&parse_multiset(&x)?)?;
            emit_json(&output, &instance_to_json(&inst))
        }
        Command::GenRandom {
            seed,
            width,
            height,
            k,
            m,
            pop_min,
            pop_max,
            output,
        } => {
            let params = GenParams {
                width,
                height,
                k,
                m,
                population: pop_min..=pop_max,
            };
            emit_json(&output, &instance_to_json(&gen_random(seed, &params)?))
        }
        Command::VerifyGadget { x, delta, output } => {
            let v = match verify_partition_equivalence(&parse_multiset(&x)?, delta)? {
                Equivalence::Consistent {
                    partitions,
                    alignments,
                } => {
                    json!({"consistent": true, "partitions": partitions, "alignments": alignments})
                }
                Equivalence::Counterexample(why) => {
                    json!({"consistent": false, "counterexample": why})
                }
            };
            emit_json(&output, &v)
        }
        Command::Render {
            input,
            alignment,
            output,
        } => {
            let inst = load(&input)?;
            let a = alignment.map(|p| load_alignment(&inst, &p)).transpose()?;
            emit(&output, &render_svg(&inst, a.as_ref())?)
        }
        Command::Metrics {
            input,
            alignment,
            output,
        } => {
            let inst = load(&input)?;
            let v = match alignment {
                Some(p) => alignment_metrics(&inst, &load_alignment(&inst, &p)?)?,
                None => pair_metrics(&inst)?,
            };
            emit_json(&output, &v)
        }
    }
}

fn load(path: &Path) -> Result<Instance> {
    load_instance(path).with_context(|| format!("loading {}", path.display()))
}

fn load_alignment(inst: &Instance, path: &Path) -> Result<Alignment> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_alignment(inst, &text).with_context(|| format!("loading {}", path.display()))
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(output: &Output, v: &Value) -> Result<()> {
    emit(output, &format!("{}\n", serde_json::to_string_pretty(v)?))
}

fn trace_table(inst: &Instance, trace: &PartitionTrace) -> String {
    let names = |us: &[spatial_align::UnitId]| {
        us.iter()
            .map(|&u| inst.unit_name(u))
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = format!(
        "{:>4}  {:<16}  {:>5}  {:>5}  part S / part T\n",
        "step", "action", "S", "T"
    );
    for (i, s) in trace.steps.iter().enumerate() {
        let side = match s.part {
            Part::S => "S",
            Part::T => "T",
        };
        let action = format!("{side} <- {} ({})", inst.unit_name(s.unit), s.value);
        out.push_str(&format!(
            "{:>4}  {:<16}  {:>5}  {:>5}  {{{}}} / {{{}}}\n",
            i + 1,
            action,
            s.sum_s,
            s.sum_t,
            names(&s.part_s),
            names(&s.part_t)
        ));
    }
    out
}

/// Pairwise distances under the best overlap matching of supports.
fn pair_metrics(inst: &Instance) -> Result<Value> {
    let cs = inst.collections();
    if cs.len() < 2 {
        bail!("metrics need at least two collections or an alignment");
    }
    let mut pairs = Vec::new();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            let (a, b) = (&cs[i], &cs[j]);
            let g = build_shared_units_graph(a, b);
            let m = max_weight_matching(&g);
            let map = LabelMap::from_pairs(
                &a.name,
                g.left.iter().enumerate().map(|(s, l)| {
                    let t = m
                        .pairs
                        .iter()
                        .find(|p| p.0 == s)
                        .map(|p| g.right[p.1].clone());
                    (l.clone(), t)
                }),
            )?;
            let back = map.inverse(&b.partition);
            let d = disagreement_set(&a.partition, &b.partition, &map)?.len();
            pairs.push(json!({
                "a": a.name,
                "b": b.name,
                "d": d,
                format!("dw_{}_{}", a.name, b.name): weighted_distance(a, &b.partition, &map)?,
                format!("dw_{}_{}", b.name, a.name): weighted_distance(b, &a.partition, &back)?,
                "correspondence": map.iter().collect::<std::collections::BTreeMap<_, _>>(),
            }));
        }
    }
    Ok(if pairs.len() == 1 {
        pairs.pop().expect("one pair")
    } else {
        json!({ "pairs": pairs })
    })
}

fn alignment_metrics(inst: &Instance, a: &Alignment) -> Result<Value> {
    let mut per = serde_json::Map::new();
    for c in inst.collections() {
        let map = a.correspondence.get(&c.name)?;
        per.insert(
            c.name.clone(),
            json!({
                "d": unit_distance(&c.partition, &a.result, map)?,
                "dw": weighted_distance(c, &a.result, map)?,
            }),
        );
    }
    let problems = spatial_align::validate_alignment(inst, a);
    Ok(json!({ "collections": per, "objective": a.objective(), "problems": problems }))
}
