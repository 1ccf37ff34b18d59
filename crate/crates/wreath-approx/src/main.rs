//! Batch front end: builds pipelines from JSON configs, emits
//! certificates, and runs the seeded property suite.
//!
//! Exit codes: 0 pass, 1 certificate or property failure, 2 config
//! error, 3 construction error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use wreath_approx::amenable::{
    boundary_ratio, folner_for, AmenableGroup, AmenableGroupDesc, FolnerReport, HElement,
    TargetRatio,
};
use wreath_approx::certify::{certify_lift, Certificate};
use wreath_approx::coamenable::{
    build_phi_coamenable, certify_coamenable, stabilizer_restriction_approx, CosetSpace,
    FiniteGroup, GElem, Subgroup,
};
use wreath_approx::context::MetricGroupContext;
use wreath_approx::embeddings::{psi_block_trace, psi_lin, psi_sym, psi_uni};
use wreath_approx::lift::{build_phi, build_phi_hyperlinear, ApproxClass, GApprox, UwpGroup};
use wreath_approx::matrix::{hs_distance, rank_distance};
use wreath_approx::perm::Permutation;
use wreath_approx::rational::{rat, rat_from_str, Dist};
use wreath_approx::table::{cyclic_discrete, validate_table_group, GroupTable};
use wreath_approx::wreath::WreathContext;
use wreath_approx::{Error, Result};

#[derive(Parser)]
#[command(name = "wreath-approx", about = "Wreath-product metric approximation pipelines")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a Følner set and per-target boundary ratios for an amenable backend.
    Folner {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a wreath lift for an amenable acting group and certify it.
    Lift {
        config: PathBuf,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the coset-section map for a co-amenable subgroup and certify it.
    Coamenable {
        config: PathBuf,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suite for the metric-controlling embeddings.
    Props {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
}

// ---------- config schemas ----------

#[derive(Deserialize)]
struct FolnerConfig {
    group: AmenableGroupDesc,
    targets: Vec<serde_json::Value>,
    bound: String,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum GroupSpec {
    Cyclic {
        n: usize,
    },
    Table {
        order: usize,
        mul_table: Vec<usize>,
        #[serde(default)]
        metric_table: Option<Vec<String>>,
    },
}

#[derive(Deserialize)]
struct FElemSpec {
    #[serde(default)]
    support: Vec<(serde_json::Value, usize)>,
    h: serde_json::Value,
}

#[derive(Deserialize)]
struct LiftConfig {
    class: ApproxClass,
    g: GroupSpec,
    h: AmenableGroupDesc,
    f: Vec<FElemSpec>,
    epsilon: String,
    #[serde(default)]
    seed: u64,
    /// Field characteristic for the linear sofic class.
    #[serde(default)]
    linear_prime: Option<u64>,
    #[serde(default)]
    out: Option<String>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CoGroupSpec {
    Symmetric { n: usize },
    Cyclic { n: usize },
    Table { order: usize, mul_table: Vec<usize> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SubgroupSpec {
    Stabilizer { point: usize },
    Indices { indices: Vec<usize> },
}

fn default_phi_kind() -> String {
    "cayley".into()
}

#[derive(Deserialize)]
struct CoamenableConfig {
    group: CoGroupSpec,
    subgroup: SubgroupSpec,
    f: Vec<serde_json::Value>,
    epsilon: String,
    /// "restriction" (stabilizer of a symmetric backend) or "cayley".
    #[serde(default = "default_phi_kind")]
    phi: String,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    out: Option<String>,
}

// ---------- element parsing ----------

fn parse_h_element(group: &AmenableGroup, v: &serde_json::Value) -> Result<HElement> {
    let bad = || Error::Config(format!("cannot interpret {v} as an element of the acting group"));
    match group {
        AmenableGroup::IntegerLine => v.as_i64().map(HElement::Int).ok_or_else(bad),
        AmenableGroup::IntegerLattice { d } => {
            let arr = v.as_array().ok_or_else(bad)?;
            if arr.len() != *d {
                return Err(bad());
            }
            Ok(HElement::Vector(
                arr.iter().map(|x| x.as_i64().ok_or_else(bad)).collect::<Result<_>>()?,
            ))
        }
        AmenableGroup::Finite(t) => {
            let i = v.as_u64().ok_or_else(bad)? as usize;
            if i >= t.order {
                return Err(bad());
            }
            Ok(HElement::Index(i))
        }
    }
}

fn parse_g_element(group: &FiniteGroup, v: &serde_json::Value) -> Result<GElem> {
    let bad = || Error::Config(format!("cannot interpret {v} as a group element"));
    match group {
        FiniteGroup::Symmetric { .. } => {
            let arr = v.as_array().ok_or_else(bad)?;
            let images = arr
                .iter()
                .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?;
            Ok(GElem::Perm(Permutation::from_images(images)?))
        }
        FiniteGroup::Table(t) => {
            let i = v.as_u64().ok_or_else(bad)? as usize;
            if i >= t.order {
                return Err(bad());
            }
            Ok(GElem::Index(i))
        }
    }
}

// ---------- command implementations ----------

fn read_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config: {e}")))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn cmd_folner(config: PathBuf, out: Option<PathBuf>) -> Result<bool> {
    let cfg: FolnerConfig = read_config(&config)?;
    let group = cfg.group.build()?;
    let bound = rat_from_str(&cfg.bound)?;
    let targets = cfg
        .targets
        .iter()
        .map(|v| parse_h_element(&group, v))
        .collect::<Result<Vec<_>>>()?;
    let folner = folner_for(&group, &targets, &bound)?;
    let report = FolnerReport {
        elements: folner.elements.clone(),
        targets: targets
            .iter()
            .map(|t| {
                Ok(TargetRatio {
                    target: t.clone(),
                    ratio: boundary_ratio(&group, &folner.elements, t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        bound,
    };
    eprintln!("Folner set: {} elements, bound {}", folner.len(), cfg.bound);
    write_output(&out, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    Ok(true)
}

fn build_coord_approx(cfg: &LiftConfig, g_table: &Arc<GroupTable>) -> Result<GApprox> {
    match cfg.class {
        ApproxClass::Sofic => GApprox::cayley(g_table.clone()),
        ApproxClass::WeaklySofic => {
            let tg = match &cfg.g {
                GroupSpec::Cyclic { n } => cyclic_discrete(*n),
                GroupSpec::Table {
                    order,
                    mul_table,
                    metric_table,
                } => {
                    let metric = metric_table
                        .as_ref()
                        .ok_or_else(|| Error::Config("weakly sofic needs metric_table".into()))?
                        .iter()
                        .map(|s| rat_from_str(s))
                        .collect::<Result<Vec<_>>>()?;
                    validate_table_group(*order, mul_table.clone(), metric)?
                }
            };
            GApprox::table_identity(Arc::new(tg))
        }
        ApproxClass::LinearSofic => {
            let p = cfg
                .linear_prime
                .ok_or_else(|| Error::Config("linear sofic needs linear_prime".into()))?;
            GApprox::regular_linear(g_table.clone(), p)
        }
        ApproxClass::Hyperlinear => match &cfg.g {
            GroupSpec::Cyclic { n } => GApprox::unitary_diag_cyclic(*n),
            _ => Err(Error::Config(
                "the hyperlinear pipeline requires a cyclic coordinate group".into(),
            )),
        },
    }
}

fn print_summary(cert: &Certificate) {
    eprintln!("class            : {:?}", cert.class);
    eprintln!("epsilon          : {}", cert.epsilon);
    eprintln!("Folner size      : {}", cert.folner_size);
    eprintln!("defect           : {:?} (bound {:?})", cert.measured_defect, cert.theoretical_defect_bound);
    eprintln!("freeness         : {:?} (bound {:?})", cert.measured_freeness, cert.theoretical_freeness_bound);
    if let Some(t) = cert.measured_trace_max {
        eprintln!("max |trace|      : {t:e}");
    }
    eprintln!("pass             : {}", cert.pass);
}

fn cmd_lift(
    config: PathBuf,
    epsilon: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<bool> {
    let mut cfg: LiftConfig = read_config(&config)?;
    if let Some(e) = epsilon {
        cfg.epsilon = e;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let eps = rat_from_str(&cfg.epsilon)?;
    let g_table = Arc::new(match &cfg.g {
        GroupSpec::Cyclic { n } => GroupTable::cyclic(*n),
        GroupSpec::Table { order, mul_table, .. } => GroupTable::new(*order, mul_table.clone())?,
    });
    let h = cfg.h.build()?;
    let uwp = UwpGroup {
        g: g_table.clone(),
        h,
    };
    let f = cfg
        .f
        .iter()
        .map(|e| {
            let support = e
                .support
                .iter()
                .map(|(pos, g)| Ok((parse_h_element(&uwp.h, pos)?, *g)))
                .collect::<Result<Vec<_>>>()?;
            uwp.element(support, parse_h_element(&uwp.h, &e.h)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let coord = build_coord_approx(&cfg, &g_table)?;
    let lifted = if cfg.class == ApproxClass::Hyperlinear {
        build_phi_hyperlinear(&uwp, &f, &eps, coord)?
    } else {
        build_phi(&uwp, &f, &eps, coord)?
    };
    let desc = format!("{} elements of G wr H from {}", f.len(), config.display());
    let cert = certify_lift(&lifted, &desc, cfg.seed)?;
    print_summary(&cert);
    let out = out.or(cfg.out.map(PathBuf::from));
    write_output(&out, &cert.to_json())?;
    Ok(cert.pass)
}

fn cmd_coamenable(
    config: PathBuf,
    epsilon: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<bool> {
    let mut cfg: CoamenableConfig = read_config(&config)?;
    if let Some(e) = epsilon {
        cfg.epsilon = e;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let eps = rat_from_str(&cfg.epsilon)?;
    let group = match &cfg.group {
        CoGroupSpec::Symmetric { n } => FiniteGroup::Symmetric { n: *n },
        CoGroupSpec::Cyclic { n } => FiniteGroup::Table(Arc::new(GroupTable::cyclic(*n))),
        CoGroupSpec::Table { order, mul_table } => {
            FiniteGroup::Table(Arc::new(GroupTable::new(*order, mul_table.clone())?))
        }
    };
    let subgroup = match &cfg.subgroup {
        SubgroupSpec::Stabilizer { point } => Subgroup::Stabilizer { point: *point },
        SubgroupSpec::Indices { indices } => Subgroup::Indices(indices.clone()),
    };
    let space = Arc::new(CosetSpace::new(group, subgroup)?);
    let f = cfg
        .f
        .iter()
        .map(|v| parse_g_element(&space.group, v))
        .collect::<Result<Vec<_>>>()?;
    let phi = match cfg.phi.as_str() {
        "restriction" => stabilizer_restriction_approx(&space)?,
        "cayley" => GApprox::cayley(space.h_table.clone())?,
        other => return Err(Error::Config(format!("unknown phi kind {other:?}"))),
    };
    let pipeline = build_phi_coamenable(space, &f, &eps, phi)?;
    let desc = format!("{} elements of G from {}", f.len(), config.display());
    let cert = certify_coamenable(&pipeline, &desc, cfg.seed)?;
    print_summary(&cert);
    let out = out.or(cfg.out.map(PathBuf::from));
    write_output(&out, &cert.to_json())?;
    Ok(cert.pass)
}

// ---------- property suite ----------

type PropResult = std::result::Result<(), String>;

fn prop_psi_sym(seed: u64, pairs: usize) -> PropResult {
    let ctx = WreathContext::new(MetricGroupContext::Symmetric { n: 3 }, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..pairs {
        let x = ctx.random_element(&mut rng).map_err(|e| e.to_string())?;
        let y = ctx.random_element(&mut rng).map_err(|e| e.to_string())?;
        let px = psi_sym(&ctx, &x).map_err(|e| e.to_string())?;
        let py = psi_sym(&ctx, &y).map_err(|e| e.to_string())?;
        let dh = Dist::Exact(px.hamming(&py).map_err(|e| e.to_string())?);
        let dt = ctx.tilde_distance(&x, &y).map_err(|e| e.to_string())?;
        if dh != dt {
            return Err(format!("isometry fails at pair {k}: {dh:?} vs {dt:?}\n  x = {x:?}\n  y = {y:?}"));
        }
        let hom_lhs = psi_sym(&ctx, &ctx.mul(&x, &y).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let hom_rhs = px.compose(&py).map_err(|e| e.to_string())?;
        if hom_lhs != hom_rhs {
            return Err(format!("homomorphism fails at pair {k}: x = {x:?}, y = {y:?}"));
        }
    }
    Ok(())
}

fn prop_psi_lin(seed: u64, pairs: usize) -> PropResult {
    let ctx = WreathContext::new(MetricGroupContext::GeneralLinearPrime { n: 2, p: 5 }, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
    for k in 0..pairs {
        let x = ctx.random_element(&mut rng).map_err(|e| e.to_string())?;
        let y = ctx.random_element(&mut rng).map_err(|e| e.to_string())?;
        let dr = rank_distance(
            &psi_lin(&ctx, &x).map_err(|e| e.to_string())?,
            &psi_lin(&ctx, &y).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let Dist::Exact(dt) = ctx.tilde_distance(&x, &y).map_err(|e| e.to_string())? else {
            return Err("expected exact distance".into());
        };
        if !(&dt / rat(2, 1) <= dr && dr <= dt) {
            return Err(format!(
                "rank sandwich fails at pair {k}: d_rk = {dr}, d_tilde = {dt}\n  x = {x:?}\n  y = {y:?}"
            ));
        }
    }
    Ok(())
}

fn prop_psi_uni(seed: u64, pairs: usize) -> PropResult {
    let ctx = WreathContext::new(MetricGroupContext::Unitary { n: 2 }, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
    for k in 0..pairs {
        let x = ctx.random_element(&mut rng).map_err(|e| e.to_string())?;
        let y = ctx.random_element(&mut rng).map_err(|e| e.to_string())?;
        let px = psi_uni(&ctx, &x).map_err(|e| e.to_string())?;
        let py = psi_uni(&ctx, &y).map_err(|e| e.to_string())?;
        let dhs = hs_distance(&px, &py).map_err(|e| e.to_string())?;
        let dt = ctx.tilde_distance(&x, &y).map_err(|e| e.to_string())?.to_f64();
        if !(dt <= dhs + 1e-9 && dhs <= 2.0 * dt.sqrt() + 1e-9) {
            return Err(format!(
                "HS sandwich fails at pair {k}: d_HS = {dhs}, d_tilde = {dt}"
            ));
        }
        let tr = psi_block_trace(&ctx, &x).map_err(|e| e.to_string())?;
        if (px.normalized_trace() - tr).norm() > 1e-9 {
            return Err(format!("block trace formula fails at pair {k}"));
        }
    }
    Ok(())
}

fn prop_degenerate_sizes() -> PropResult {
    // |B| = 1 wreath over each base collapses to the base itself
    let ctx = WreathContext::new(MetricGroupContext::Symmetric { n: 1 }, 1);
    let e = ctx.identity();
    if psi_sym(&ctx, &e).map_err(|e| e.to_string())?.len() != 1 {
        return Err("size-1 psi_sym has the wrong degree".into());
    }
    let ctx = WreathContext::new(MetricGroupContext::Unitary { n: 1 }, 1);
    let tr = psi_block_trace(&ctx, &ctx.identity()).map_err(|e| e.to_string())?;
    if (tr.re - 1.0).abs() > 1e-12 {
        return Err("size-1 identity trace should be 1".into());
    }
    Ok(())
}

fn cmd_props(seed: u64, pairs: usize) -> Result<bool> {
    let checks: Vec<(&str, PropResult)> = vec![
        ("psi_sym isometry + homomorphism", prop_psi_sym(seed, pairs)),
        ("psi_lin rank sandwich", prop_psi_lin(seed, pairs)),
        ("psi_uni HS sandwich + block trace", prop_psi_uni(seed, pairs)),
        ("degenerate size-1 cases", prop_degenerate_sizes()),
    ];
    let mut all_ok = true;
    for (name, r) in checks {
        match r {
            Ok(()) => println!("PASS {name}"),
            Err(witness) => {
                all_ok = false;
                println!("FAIL {name}\n  {witness}");
            }
        }
    }
    Ok(all_ok)
}

fn run(cli: Cli) -> Result<bool> {
    // WREATH_APPROX_THREADS caps parallelism; all measurements currently
    // run sequentially, so any positive value is accepted as-is
    if let Ok(v) = std::env::var("WREATH_APPROX_THREADS") {
        if v.parse::<usize>().map(|n| n == 0).unwrap_or(true) {
            return Err(Error::Config("WREATH_APPROX_THREADS must be a positive integer".into()));
        }
    }
    match cli.cmd {
        Cmd::Folner { config, out } => cmd_folner(config, out),
        Cmd::Lift {
            config,
            epsilon,
            seed,
            out,
        } => cmd_lift(config, epsilon, seed, out),
        Cmd::Coamenable {
            config,
            epsilon,
            seed,
            out,
        } => cmd_coamenable(config, epsilon, seed, out),
        Cmd::Props { seed, pairs } => cmd_props(seed, pairs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("construction error: {e}");
            ExitCode::from(3)
        }
    }
}
