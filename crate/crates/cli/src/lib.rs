//! Command-line front end. `execute` does the work and returns the text for
//! stdout with an exit code, so the binary stays a thin wrapper.

pub mod config;
pub mod render;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use euclid_core::algebra;
use euclid_core::closure::{self, Budget, ClosureError, Configuration, Step};
use euclid_core::dsl::{self, PointOracle, Program, ScriptedOracle, SeededOracle};
use euclid_core::field::{Rational, Session};
use euclid_core::game::{self, BobPolicy, ConstructiblePlane, Outcome, ProgramAlice, RationalPlane};
use euclid_core::geom::{GeomObject, Point};
use euclid_core::stdlib::{self, VerifyOptions};

use config::{parse_config, Config};
use render::{render_svg, Figure, Viewport};

#[derive(Debug, Parser)]
#[command(name = "euclid", version, about = "Exact compass-and-straightedge constructions")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a construction program on the objects of a config file.
    Run {
        program: PathBuf,
        config: PathBuf,
        /// `seed:N`, a bare seed, or `script:FILE` with one `(x, y)` per line.
        #[arg(long, default_value = "seed:0")]
        oracle: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Expand the closure of a configuration round by round.
    Closure {
        config: PathBuf,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 5000)]
        max_objects: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Play the request game.
    Game {
        config: PathBuf,
        #[arg(long)]
        target: String,
        /// A corpus entry name or a program file.
        #[arg(long)]
        alice: String,
        /// `sampling:SEED`, `certificate:rational` or `certificate:constructible`.
        #[arg(long, default_value = "sampling:0")]
        bob: String,
        #[arg(long, default_value_t = 100)]
        max_moves: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Degree test for a polynomial such as `x^3 - 2` or a preset name.
    Wantzel { poly: String },
    /// Straightedge grid point near a target; the first four points of the
    /// config are the triangle A, B, C and the inner point D.
    Densify {
        config: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
    },
    /// Check corpus entries on sampled inputs and oracles.
    VerifyCorpus {
        entry: Option<String>,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
    Resource(String),
    Check(String, String),
}

type Res = Result<String, Failure>;

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

pub fn execute(cli: &Cli) -> Output {
    let session = Session::from_env();
    let res = match &cli.command {
        Command::Run {
            program,
            config,
            oracle,
            svg,
        } => cmd_run(&session, program, config, oracle, svg.as_deref(), cli.json),
        Command::Closure {
            config,
            rounds,
            target,
            max_objects,
            svg,
        } => cmd_closure(&session, config, *rounds, target.as_deref(), *max_objects, svg.as_deref(), cli.json),
        Command::Game {
            config,
            target,
            alice,
            bob,
            max_moves,
            svg,
        } => cmd_game(&session, config, target, alice, bob, *max_moves, svg.as_deref(), cli.json),
        Command::Wantzel { poly } => cmd_wantzel(poly, cli.json),
        Command::Densify {
            config,
            target,
            eps,
            max_iterations,
        } => cmd_densify(&session, config, target, eps, *max_iterations, cli.json),
        Command::VerifyCorpus { entry, trials, seeds } => cmd_verify(entry.as_deref(), *trials, *seeds, cli.json),
    };
    match res {
        Ok(stdout) => Output {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(Failure::Check(stdout, why)) => Output {
            code: 1,
            stdout,
            stderr: format!("error: {why}\n"),
        },
        Err(Failure::Input(m)) => Output {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {m}\n"),
        },
        Err(Failure::Resource(m)) => Output {
            code: 3,
            stdout: String::new(),
            stderr: format!("resource limit: {m}\n"),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_config(session: &Session, path: &Path) -> Result<Config, Failure> {
    parse_config(session, &read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    dsl::parse(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Program inputs by parameter name, or else the config's objects in order.
fn bind_inputs(prog: &Program, cfg: &Config) -> Result<Vec<GeomObject>, Failure> {
    let by_name: Option<Vec<GeomObject>> = prog.params.iter().map(|p| cfg.get(&p.name).cloned()).collect();
    if let Some(v) = by_name {
        return Ok(v);
    }
    let start = cfg.start();
    let kind_ok = |p: &dsl::Param, o: &GeomObject| o.kind() == p.ty.to_string();
    if start.len() >= prog.params.len() && prog.params.iter().zip(&start).all(|(p, o)| kind_ok(p, o)) {
        return Ok(start[..prog.params.len()].to_vec());
    }
    let want: Vec<String> = prog.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
    Err(Failure::Input(format!(
        "config objects do not match the parameters ({})",
        want.join(", ")
    )))
}

fn write_svg(path: Option<&Path>, fig: &Figure) -> Result<(), Failure> {
    if let Some(path) = path {
        let svg = render_svg(fig, &Viewport::around(fig)).map_err(input)?;
        std::fs::write(path, svg).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn to_json(v: &serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json"))
}

fn oracle_from(session: &Session, spec: &str) -> Result<Box<dyn PointOracle>, Failure> {
    let seed = |s: &str| s.parse::<u64>().map_err(|_| Failure::Input(format!("bad oracle seed `{s}`")));
    if let Some(path) = spec.strip_prefix("script:") {
        let text = read(Path::new(path))?;
        let mut pts = vec![];
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cfg = parse_config(session, &format!("point P = {line}"))
                .map_err(|e| Failure::Input(format!("{path}:{}: {}", i + 1, e.message)))?;
            pts.push(cfg.objects[0].1.as_point().expect("point").clone());
        }
        return Ok(Box::new(ScriptedOracle::new(pts)));
    }
    let s = spec.strip_prefix("seed:").unwrap_or(spec);
    Ok(Box::new(SeededOracle::new(seed(s)?)))
}

fn cmd_run(session: &Session, prog: &Path, cfg: &Path, oracle: &str, svg: Option<&Path>, json: bool) -> Res {
    let prog = load_program(prog)?;
    let cfg = load_config(session, cfg)?;
    let inputs = bind_inputs(&prog, &cfg)?;
    let mut oracle = oracle_from(session, oracle)?;
    let res = dsl::run(&prog, &inputs, oracle.as_mut()).map_err(|e| {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Input(format!("run failed at {e}"))
        }
    })?;
    let target = cfg.target.as_ref().map(|(_, o)| o).or_else(|| res.outputs.first().map(|(_, o)| o));
    write_svg(svg, &Figure::from_run(&res.trace, target))?;
    if json {
        let outputs: serde_json::Map<String, serde_json::Value> = res
            .outputs
            .iter()
            .map(|(n, o)| (n.clone(), serde_json::to_value(o).expect("json")))
            .collect();
        return Ok(to_json(&json!({ "outputs": outputs, "trace": res.trace })));
    }
    Ok(res.outputs.iter().map(|(n, o)| format!("{n} = {}\n", plain(o))).collect())
}

/// Points print bare; curves keep their kind.
fn plain(o: &GeomObject) -> String {
    match o {
        GeomObject::Point(p) => p.to_string(),
        other => other.to_string(),
    }
}

fn start_of(cfg: &Config) -> Configuration {
    let mut e = Configuration::new();
    for o in cfg.start() {
        e.insert(o);
    }
    e
}

fn closure_failure(e: ClosureError) -> Failure {
    if e.is_resource() {
        Failure::Resource(e.to_string())
    } else {
        input(e)
    }
}

fn cmd_closure(
    session: &Session,
    cfg: &Path,
    rounds: usize,
    target: Option<&str>,
    max_objects: usize,
    svg: Option<&Path>,
    json: bool,
) -> Res {
    let cfg = load_config(session, cfg)?;
    let e = start_of(&cfg);
    let budget = Budget::new(rounds, max_objects).map_err(input)?;
    if let Some(name) = target {
        let x = cfg
            .target_named(name)
            .ok_or_else(|| Failure::Input(format!("no object named `{name}`")))?;
        let d = closure::derivable(&e, x, budget).map_err(closure_failure)?;
        if svg.is_some() {
            let trace = closure::closure_trace(&e, budget).or_else(|err| match err.partial() {
                Some(p) if err.is_resource() => Ok(p.clone()),
                _ => Err(closure_failure(err)),
            })?;
            write_svg(svg, &Figure::from_closure(&trace, Some(x)))?;
        }
        if json {
            return Ok(to_json(&json!({ "target": name, "derivation": d, "display": d.to_string() })));
        }
        return Ok(format!("{d}\n"));
    }
    let trace = closure::closure_trace(&e, budget).map_err(closure_failure)?;
    write_svg(svg, &Figure::from_closure(&trace, None))?;
    let gens: Vec<Vec<(GeomObject, closure::Provenance)>> = {
        let mut out = vec![vec![]; trace.generation_ends.len()];
        for (o, p) in trace.objects.iter().zip(&trace.provenance) {
            out[p.generation].push((o.clone(), p.clone()));
        }
        out
    };
    if json {
        let v: Vec<_> = gens
            .iter()
            .enumerate()
            .map(|(g, objs)| {
                let objs: Vec<_> = objs.iter().map(|(o, p)| json!({ "object": o, "provenance": p })).collect();
                json!({ "generation": g, "objects": objs })
            })
            .collect();
        return Ok(to_json(&json!({ "generations": v })));
    }
    let mut out = String::new();
    for (g, objs) in gens.iter().enumerate() {
        out.push_str(&format!("generation {g}: {} new\n", objs.len()));
        for (o, _) in objs {
            out.push_str(&format!("  {o}\n"));
        }
    }
    Ok(out)
}

fn bob_from(spec: &str) -> Result<Box<dyn BobPolicy>, Failure> {
    Ok(match spec {
        "certificate:rational" => Box::new(game::certificate_bob(&RationalPlane)),
        "certificate:constructible" => Box::new(game::certificate_bob(&ConstructiblePlane)),
        s => {
            let seed = s
                .strip_prefix("sampling:")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| Failure::Input(format!("unknown bob `{s}`")))?;
            Box::new(game::sampling_bob(seed))
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_game(
    session: &Session,
    cfg: &Path,
    target: &str,
    alice: &str,
    bob: &str,
    max_moves: usize,
    svg: Option<&Path>,
    json: bool,
) -> Res {
    let cfg = load_config(session, cfg)?;
    let x = cfg
        .target_named(target)
        .ok_or_else(|| Failure::Input(format!("no object named `{target}`")))?
        .clone();
    let prog = match stdlib::entry(alice) {
        Some(e) => e.program(),
        None => load_program(Path::new(alice))?,
    };
    let inputs = bind_inputs(&prog, &cfg)?;
    let mut alice = ProgramAlice::new(prog, inputs);
    let mut bob = bob_from(bob)?;
    let res = game::play(&start_of(&cfg), &x, &mut alice, bob.as_mut(), max_moves);
    if let Outcome::Aborted(game::Abort::Resource(m)) = &res.outcome {
        return Err(Failure::Resource(m.clone()));
    }
    write_svg(svg, &Figure::from_game(&res.trace))?;
    if json {
        return Ok(to_json(&serde_json::to_value(&res.trace).expect("json")));
    }
    Ok(res.trace.transcript())
}

fn cmd_wantzel(poly: &str, json: bool) -> Res {
    let p = if algebra::PRESETS.contains(&poly) {
        algebra::preset(poly)
    } else {
        algebra::parse_poly(poly)
    }
    .map_err(input)?;
    let v = algebra::wantzel_check(&p).map_err(input)?;
    if json {
        return Ok(to_json(&json!({ "poly": poly, "result": v, "display": v.to_string() })));
    }
    Ok(format!("{v}\n"))
}

fn cmd_densify(session: &Session, cfg: &Path, target: &str, eps: &str, max_iterations: usize, json: bool) -> Res {
    let cfg = load_config(session, cfg)?;
    let eps: Rational = eps
        .trim()
        .parse()
        .map_err(|_| Failure::Input(format!("bad eps `{eps}`, expected a rational such as 1/64")))?;
    let pts: Vec<Point> = cfg.objects.iter().filter_map(|(_, o)| o.as_point().cloned()).collect();
    let [a, b, c, d] = <[Point; 4]>::try_from(pts.into_iter().take(4).collect::<Vec<_>>())
        .map_err(|_| Failure::Input("densify needs four points A, B, C, D in the config".into()))?;
    let t = match cfg.target_named(target) {
        Some(GeomObject::Point(p)) => p.clone(),
        Some(_) => return Err(Failure::Input(format!("`{target}` is not a point"))),
        None => return Err(Failure::Input(format!("no object named `{target}`"))),
    };
    let r = game::densify(&a, &b, &c, &d, &t, &eps, max_iterations).map_err(|e| {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            input(e)
        }
    })?;
    let k = &r.scaffold.construction;
    let steps = k.ancestors(r.index);
    if json {
        let list: Vec<_> = steps
            .iter()
            .map(|&i| json!({ "index": i, "object": k.object(i), "step": k.step(i) }))
            .collect();
        return Ok(to_json(&json!({
            "point": r.point,
            "iterations": r.iterations,
            "straightedge_only": k.straightedge_only(),
            "steps": list,
        })));
    }
    Ok(format!(
        "{} = {} after {} iterations, {} straightedge steps\n",
        target,
        r.point,
        r.iterations,
        steps.iter().filter(|&&i| !matches!(k.step(i), Step::Given)).count()
    ))
}

fn cmd_verify(entry: Option<&str>, trials: u64, seeds: u64, json: bool) -> Res {
    let entries: Vec<&stdlib::CorpusEntry> = match entry {
        Some(n) => vec![stdlib::entry(n).ok_or_else(|| Failure::Input(format!("no corpus entry `{n}`")))?],
        None => stdlib::corpus().iter().collect(),
    };
    let opts = VerifyOptions {
        trials,
        seeds,
        ..VerifyOptions::default()
    };
    let mut out = String::new();
    let mut rows = vec![];
    let mut surprises = vec![];
    for e in entries {
        let r = stdlib::verify(e, opts);
        let note = if r.passed() == e.expect_pass {
            ""
        } else {
            surprises.push(e.name);
            " (unexpected)"
        };
        let note = if !e.expect_pass && !r.passed() { " (expected)" } else { note };
        out.push_str(&format!("{:<26} {}{note}\n", e.name, r.verdict()));
        rows.push(json!({
            "name": e.name,
            "passed": r.passed(),
            "expected_pass": e.expect_pass,
            "runs": r.runs,
            "verdict": r.verdict(),
            "failure": r.failure.as_ref().map(|f| json!({
                "trial": f.trial, "seed": f.seed, "reason": f.reason, "inputs": f.inputs, "trace": f.trace,
            })),
        }));
    }
    if json {
        out = to_json(&json!({ "entries": rows }));
    }
    if surprises.is_empty() {
        Ok(out)
    } else {
        Err(Failure::Check(out, format!("unexpected verdicts: {}", surprises.join(", "))))
    }
}
