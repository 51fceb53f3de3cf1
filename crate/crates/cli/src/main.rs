//! Batch CLI over the exact p-adic kernels. All inputs and outputs are
//! JSON; output key order is deterministic so runs are byte-stable.
//!
//! JSON arguments accept an inline literal, `@path` to read a file, or `-`
//! to read stdin. `--out` redirects the JSON result to a file. The default
//! working precision comes from `IWASAWA_PREC` (fallback 32) and can be
//! overridden per command with `--prec`.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use iwasawa_core::function::integrate;
use iwasawa_core::gln;
use iwasawa_core::induction::{
    completed_tensor_action, duality_check, induce_functions, induce_measures, BorelModule,
};
use iwasawa_core::measure::Measure;
use iwasawa_core::padic::{PadicNumber, DEFAULT_PREC};
use iwasawa_core::rep::{simplicity, Certification, LatticeRep, Subgroup, Verdict};
use iwasawa_core::selftest;
use iwasawa_core::tower::QuotientTower;
use iwasawa_core::{Error, PadicMatrix, Result};

#[derive(Parser)]
#[command(name = "iwasawa", about = "exact p-adic measures, representations, and GL_n decompositions", version)]
struct Cli {
    /// Write the JSON result to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar arithmetic over Q_p.
    Padic {
        #[command(subcommand)]
        sub: PadicCmd,
    },
    /// Integral measures at a working level.
    Measure {
        #[command(subcommand)]
        sub: MeasureCmd,
    },
    /// Lattice representations.
    Rep {
        #[command(subcommand)]
        sub: RepCmd,
    },
    /// Induction models and the completed-tensor action.
    Induce {
        #[command(subcommand)]
        sub: InduceCmd,
    },
    /// Normalized LUP decomposition of GL_n(Q_p).
    Gln {
        #[command(subcommand)]
        sub: GlnCmd,
    },
    /// Run the full verification suite and print a pass/fail table.
    Selftest,
}

#[derive(Args)]
struct PrecArgs {
    /// Working precision in p-adic digits (default: IWASAWA_PREC or 32).
    #[arg(long)]
    prec: Option<u32>,
}

#[derive(Subcommand)]
enum PadicCmd {
    /// Evaluate one arithmetic operation; values are JSON literals or
    /// rational shorthand strings.
    Eval {
        #[arg(long)]
        op: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        prec: PrecArgs,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Convolution of two measures on the same group tower and level.
    Convolve {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        prec: PrecArgs,
    },
    /// Push a measure down to a coarser level.
    Project {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        level: u32,
        #[command(flatten)]
        prec: PrecArgs,
    },
    /// Integrate a locally constant function against a measure.
    Integrate {
        #[arg(long)]
        f: String,
        #[arg(long)]
        mu: String,
        #[command(flatten)]
        prec: PrecArgs,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// Replace the lattice by the intersection of its group translates.
    Unitarize {
        #[arg(long)]
        rep: String,
        #[command(flatten)]
        prec: PrecArgs,
    },
    /// Probe-based simplicity semidecision.
    Simplicity {
        #[arg(long)]
        rep: String,
        /// JSON array of probe vectors.
        #[arg(long)]
        probes: Option<String>,
        /// Enable the residue-cover certificate.
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        prec: PrecArgs,
    },
}

#[derive(Subcommand)]
enum InduceCmd {
    /// Certify the duality pairing between the induced function model and
    /// the induced measure module built from the dual base datum.
    DualCheck {
        /// Tower descriptor of the ambient group.
        #[arg(long)]
        group: String,
        /// JSON array of level element indices forming the subgroup.
        #[arg(long)]
        subgroup: String,
        /// Base representation of the subgroup; action keys are parent
        /// element keys.
        #[arg(long)]
        rep: String,
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[command(flatten)]
        prec: PrecArgs,
    },
    /// One step of the completed-tensor action on GL_n(Q_p).
    Act {
        #[arg(long)]
        g: String,
        #[arg(long)]
        k: String,
        #[arg(long)]
        m: String,
        #[arg(long)]
        p: u64,
        /// Torus character exponents, e.g. [1,-2].
        #[arg(long)]
        exponents: String,
        #[command(flatten)]
        prec: PrecArgs,
    },
}

#[derive(Subcommand)]
enum GlnCmd {
    /// Decompose g = b * u * s with u normalized and s a permutation.
    Decompose {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        prec: PrecArgs,
    },
}

fn default_prec(args: &PrecArgs) -> u32 {
    args.prec
        .or_else(|| std::env::var("IWASAWA_PREC").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(DEFAULT_PREC)
}

fn read_json_arg(s: &str) -> Result<Value> {
    let text = if s == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::ParseError(format!("stdin: {e}")))?;
        buf
    } else if let Some(path) = s.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| Error::ParseError(format!("{path}: {e}")))?
    } else {
        s.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Error::ParseError(format!("{e}")))
}

fn parse_vector(v: &Value, p: u64, prec: u32) -> Result<Vec<PadicNumber>> {
    v.as_array()
        .ok_or_else(|| Error::ParseError("expected a JSON array of values".into()))?
        .iter()
        .map(|x| PadicNumber::from_json(x, p, prec))
        .collect()
}

fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Command::Padic { sub } => match sub {
            PadicCmd::Eval { op, x, y, p, prec } => {
                let prec = default_prec(&prec);
                let xv = PadicNumber::from_json(&read_json_arg(&x)?, p, prec)?;
                let need_y = || -> Result<PadicNumber> {
                    let ys = y
                        .as_ref()
                        .ok_or_else(|| Error::ParseError(format!("operation {op} needs --y")))?;
                    PadicNumber::from_json(&read_json_arg(ys)?, p, prec)
                };
                let result = match op.as_str() {
                    "add" => xv.add(&need_y()?)?,
                    "sub" => xv.sub(&need_y()?)?,
                    "mul" => xv.mul(&need_y()?)?,
                    "div" => xv.div(&need_y()?)?,
                    "abs" => {
                        let a = xv.abs()?;
                        return Ok(json!({"abs": a.to_string()}));
                    }
                    other => return Err(Error::ParseError(format!("unknown op {other:?}"))),
                };
                let abs = result
                    .abs()
                    .map(|a| Value::String(a.to_string()))
                    .unwrap_or(Value::Null);
                Ok(json!({"result": result.to_json(), "abs": abs, "display": result.to_string()}))
            }
        },
        Command::Measure { sub } => match sub {
            MeasureCmd::Convolve { a, b, prec } => {
                let prec = default_prec(&prec);
                let ma = Measure::from_json(&read_json_arg(&a)?, prec)?;
                let mb = Measure::from_json(&read_json_arg(&b)?, prec)?;
                Ok(ma.convolve(&mb)?.to_json())
            }
            MeasureCmd::Project { mu, level, prec } => {
                let prec = default_prec(&prec);
                let m = Measure::from_json(&read_json_arg(&mu)?, prec)?;
                Ok(m.project(level)?.to_json())
            }
            MeasureCmd::Integrate { f, mu, prec } => {
                let prec = default_prec(&prec);
                let func =
                    iwasawa_core::function::LCFunction::from_json(&read_json_arg(&f)?, prec)?;
                let m = Measure::from_json(&read_json_arg(&mu)?, prec)?;
                let v = integrate(&func, &m)?;
                Ok(json!({"result": v.to_json(), "display": v.to_string()}))
            }
        },
        Command::Rep { sub } => match sub {
            RepCmd::Unitarize { rep, prec } => {
                let prec = default_prec(&prec);
                let r = LatticeRep::from_json(&read_json_arg(&rep)?, prec)?;
                let (fixed, r1, r2) = r.unitarize()?;
                Ok(json!({
                    "lattice": fixed.lattice().to_json(),
                    "r1": r1.to_string(),
                    "r2": r2.to_string(),
                    "unitary": fixed.is_unitary(),
                }))
            }
            RepCmd::Simplicity { rep, probes, certify, prec } => {
                let prec = default_prec(&prec);
                let r = LatticeRep::from_json(&read_json_arg(&rep)?, prec)?;
                let p = r.prime();
                let probe_vecs: Vec<Vec<PadicNumber>> = match probes {
                    Some(s) => read_json_arg(&s)?
                        .as_array()
                        .ok_or_else(|| Error::ParseError("probes must be an array".into()))?
                        .iter()
                        .map(|v| parse_vector(v, p, prec))
                        .collect::<Result<_>>()?,
                    None => {
                        // default probes: standard basis plus the all-ones
                        // vector
                        let mut out = Vec::new();
                        for i in 0..r.dim() {
                            let mut v = vec![PadicNumber::zero(p); r.dim()];
                            v[i] = PadicNumber::one(p, prec);
                            out.push(v);
                        }
                        out.push(vec![PadicNumber::one(p, prec); r.dim()]);
                        out
                    }
                };
                let cert = if certify { Certification::ResidueProbeCover } else { Certification::None };
                let verdict = simplicity(&r, &probe_vecs, cert)?;
                Ok(match verdict {
                    Verdict::NotSimple { witness } => json!({
                        "verdict": "not_simple",
                        "witness": witness
                            .iter()
                            .map(|row| Value::Array(row.iter().map(|x| x.to_json()).collect()))
                            .collect::<Vec<_>>(),
                    }),
                    Verdict::SimpleCertified => json!({"verdict": "simple_certified"}),
                    Verdict::Unknown => json!({"verdict": "unknown"}),
                })
            }
        },
        Command::Induce { sub } => match sub {
            InduceCmd::DualCheck { group, subgroup, rep, level, prec } => {
                let prec = default_prec(&prec);
                let tower = QuotientTower::from_json(&read_json_arg(&group)?)?;
                let indices: Vec<usize> = read_json_arg(&subgroup)?
                    .as_array()
                    .ok_or_else(|| Error::ParseError("subgroup must be an index array".into()))?
                    .iter()
                    .map(|v| {
                        v.as_u64()
                            .map(|x| x as usize)
                            .ok_or_else(|| Error::ParseError("subgroup indices must be integers".into()))
                    })
                    .collect::<Result<_>>()?;
                let sub = Subgroup::new(tower.clone(), level, indices)?;
                let base = parse_subgroup_rep(&read_json_arg(&rep)?, &sub, prec)?;
                let ind_f = induce_functions(&sub, &base)?;
                let ind_m = induce_measures(&sub, &base.dual()?)?;
                let cert = duality_check(&ind_f, &ind_m)?;
                Ok(json!({
                    "status": "PASS",
                    "gram": cert.gram.to_json(),
                    "rank": cert.rank,
                }))
            }
            InduceCmd::Act { g, k, m, p, exponents, prec } => {
                let prec = default_prec(&prec);
                let gm = PadicMatrix::from_json(&read_json_arg(&g)?, p, prec)?;
                let km = PadicMatrix::from_json(&read_json_arg(&k)?, p, prec)?;
                let mv = parse_vector(&read_json_arg(&m)?, p, prec)?;
                let exps: Vec<i64> = read_json_arg(&exponents)?
                    .as_array()
                    .ok_or_else(|| Error::ParseError("exponents must be an array".into()))?
                    .iter()
                    .map(|v| {
                        v.as_i64()
                            .ok_or_else(|| Error::ParseError("exponents must be integers".into()))
                    })
                    .collect::<Result<_>>()?;
                let module = BorelModule::TorusCharacter { exponents: exps };
                let (k_next, m_next) = completed_tensor_action(&gm, &km, &mv, &module)?;
                Ok(json!({
                    "k": k_next.to_json(),
                    "m": Value::Array(m_next.iter().map(|x| x.to_json()).collect()),
                }))
            }
        },
        Command::Gln { sub } => match sub {
            GlnCmd::Decompose { p, matrix, prec } => {
                let prec = default_prec(&prec);
                let g = PadicMatrix::from_json(&read_json_arg(&matrix)?, p, prec)?;
                let d = gln::decompose_bks(&g)?;
                if !d.reconstruct()?.agrees(&g) {
                    return Err(Error::TheoremCheckFailed("reconstruction mismatch".into()));
                }
                Ok(json!({
                    "b": d.b.to_json(),
                    "u": d.u.to_json(),
                    "s": d.perm,
                    "certificate": format!("b*u*s == g @prec{prec}"),
                }))
            }
        },
        Command::Selftest => {
            let reports = selftest::run_all();
            let mut all_pass = true;
            let mut table = Vec::new();
            for r in &reports {
                all_pass &= r.pass;
                println!("{} {} - {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
                table.push(json!({"suite": r.name, "pass": r.pass, "detail": r.detail}));
            }
            if !all_pass {
                return Err(Error::TheoremCheckFailed("selftest failures".into()));
            }
            Ok(json!({"suites": table, "pass": all_pass}))
        }
    }
}

/// Parse a base representation of a subgroup whose action table is keyed by
/// parent element keys.
fn parse_subgroup_rep(v: &Value, sub: &Subgroup, default_prec: u32) -> Result<LatticeRep> {
    let p = v
        .get("p")
        .and_then(|x| x.as_u64())
        .ok_or_else(|| Error::ParseError("rep needs an explicit p".into()))?;
    let prec = v.get("prec").and_then(|x| x.as_u64()).map(|x| x as u32).unwrap_or(default_prec);
    let dim = v
        .get("dim")
        .and_then(|x| x.as_u64())
        .ok_or_else(|| Error::ParseError("rep needs a dim".into()))? as usize;
    let action_map = v
        .get("action")
        .and_then(|x| x.as_object())
        .ok_or_else(|| Error::ParseError("rep needs an action table".into()))?;
    let mut action: Vec<Option<PadicMatrix>> = vec![None; sub.order()];
    for (key, mv) in action_map {
        let parent_idx = sub.parent().parse_key(sub.level(), key)?;
        let local = sub
            .local_index(parent_idx)
            .ok_or_else(|| Error::BadElement(format!("{key} is not in the subgroup")))?;
        action[local] = Some(PadicMatrix::from_json(mv, p, prec)?);
    }
    let action: Result<Vec<PadicMatrix>> = action
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            m.ok_or_else(|| {
                Error::NotARepresentation(format!("missing action for subgroup element {i}"))
            })
        })
        .collect();
    let lattice = match v.get("lattice") {
        Some(lv) => PadicMatrix::from_json(lv, p, prec)?,
        None => PadicMatrix::identity(p, dim, prec),
    };
    LatticeRep::new(sub.tower().clone(), 0, action?, lattice)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = cli.out.clone();
    match run(cli) {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("serializable value");
            match out_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text + "\n") {
                        eprintln!("cannot write {path}: {e}");
                        return ExitCode::from(1);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let payload = json!({"error": e.name(), "message": e.to_string()});
            println!("{}", serde_json::to_string_pretty(&payload).expect("serializable error"));
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
