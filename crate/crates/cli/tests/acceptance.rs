//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::collections::{BTreeSet, VecDeque};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbt_core::dsl::{compile, parse_source, pretty_print};
use sbt_core::generate::{random_ast, random_formula, random_kripke, random_lasso_kripke, random_model, GenConfig};
use sbt_core::ltl::{model_check, ExplicitKripke, Kripke, Ltl, Verdict};
use sbt_core::oracle::{find_violation, naive_enumerate, simple_path_count};
use sbt_core::small_step::{begin_tick, run_to_completion};
use sbt_core::smv::{cross_check, OptLevel};
use sbt_core::ts::{enumerate, Limits, TransitionSystem};
use sbt_core::{tick_big_step, Atom, SbtModel, Status};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus() -> Vec<(String, PathBuf, SbtModel)> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sbt"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let m = compile(&fs::read_to_string(&p).unwrap()).unwrap().model;
            (p.file_stem().unwrap().to_string_lossy().into_owned(), p, m)
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fast_forwarding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let (mut pairs, mut sampled) = (0usize, 0usize);
    for i in 0..200 {
        let m = random_model(&mut rng, GenConfig::small());
        let ts = enumerate(&m, Limits::default()).map_err(|e| e.to_string())?;
        let mut all = Vec::new();
        for id in 0..ts.states().len() {
            let c = ts.configuration(id);
            for env in m.next_env_choices(&c.vars.env) {
                all.push((id, env));
            }
        }
        if all.len() > 100_000 {
            sampled += 1;
            all = (0..10_000).map(|_| all[rng.gen_range(0..all.len())].clone()).collect();
        }
        for (id, env) in &all {
            let c = ts.configuration(*id);
            let big = tick_big_step(&m, &c, env).map_err(|e| e.to_string())?;
            let machine = begin_tick(&m, &c, env).map_err(|e| e.to_string())?;
            let (config, status, _) = run_to_completion(&m, machine).map_err(|e| e.to_string())?;
            ensure(config == big.config && status == big.root_status, || {
                format!("model {i}: engines differ on state {id} env {env:?}\n{}", m.name)
            })?;
        }
        pairs += all.len();
    }
    Ok(format!("200 models, {pairs} (configuration, env) pairs, {sampled} sampled, 0 mismatches"))
}

fn ltl_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let run = |k: &ExplicitKripke, f: &Ltl<usize>, max_len: usize, simple: bool| -> Result<bool, String> {
        let v = model_check(k, f).map_err(|e| e.to_string())?;
        if let Verdict::Violated(l) = &v {
            ensure(l.replays_in(k), || format!("lasso does not replay: {f:?} {k:?}"))?;
            ensure(!l.satisfies(k, f), || format!("lasso satisfies the formula: {f:?} {k:?}"))?;
        }
        let oracle = find_violation(k, f, max_len, simple);
        ensure(v.holds() == oracle.is_none(), || format!("verdicts differ: {f:?} on {k:?}"))?;
        Ok(v.holds())
    };
    let (mut a, mut b, mut holds, mut largest) = (0, 0, 0, 0);
    // lasso-shaped systems: every path is a simple lasso, so the oracle is exact
    while a < 300 {
        let n = if rng.gen_bool(0.3) { rng.gen_range(20..=200) } else { rng.gen_range(1..=12) };
        let k = random_lasso_kripke(&mut rng, n, 3);
        if simple_path_count(&k, 20_000) >= 20_000 {
            continue;
        }
        let f = random_formula(&mut rng, 3, 3);
        holds += run(&k, &f, n, true)? as usize;
        largest = largest.max(n);
        a += 1;
    }
    // tiny dense systems with repeated states on the lasso
    while b < 250 {
        let n = rng.gen_range(1..=3);
        let (out, depth) = if n == 3 { (2, 2) } else { (n, 3) };
        let k = random_kripke(&mut rng, n, out, 3);
        let f = random_formula(&mut rng, depth, 3);
        holds += run(&k, &f, n * (f.depth() + 2), false)? as usize;
        b += 1;
    }
    Ok(format!("{} instances ({a} lasso-shaped up to {largest} states, {b} dense), {holds} hold, 100% agreement", a + b))
}

fn level_equivalence() -> Outcome {
    let mut summary = Vec::new();
    for (name, _, m) in corpus() {
        let mut vars = Vec::new();
        let mut verdicts = None;
        for level in OptLevel::ALL {
            let r = cross_check(&m, level, Limits::default()).map_err(|e| format!("{name} {level}: {e}"))?;
            if let Some(v) = &verdicts {
                ensure(*v == r.verdicts, || format!("{name} {level}: verdicts changed"))?;
            }
            verdicts = Some(r.verdicts);
            vars.push(r.var_count);
        }
        ensure(vars.windows(2).all(|w| w[0] >= w[1]), || format!("{name}: VAR counts {vars:?}"))?;
        summary.push(format!("{name} {vars:?}"));
    }
    Ok(format!("VAR counts {}", summary.join(", ")))
}

/// A system seen from a subset of its initial states.
struct From<'a>(&'a TransitionSystem, Vec<usize>);

impl Kripke<Atom> for From<'_> {
    fn state_count(&self) -> usize {
        self.0.state_count()
    }
    fn initial_states(&self) -> &[usize] {
        &self.1
    }
    fn successors(&self, s: usize) -> &[usize] {
        self.0.successors(s)
    }
    fn holds(&self, s: usize, a: &Atom) -> bool {
        self.0.holds(s, a)
    }
}

fn grid_world() -> Outcome {
    let m = compile(&fs::read_to_string(corpus_dir().join("grid.sbt")).unwrap()).unwrap().model;
    let ts = enumerate(&m, Limits::default()).map_err(|e| e.to_string())?;
    let spec = &m.specs.iter().find(|s| s.name == "reach_goal").ok_or("no reach_goal spec")?.formula;
    ensure(ts.initials().len() == 25, || format!("{} goal choices", ts.initials().len()))?;
    for &i in ts.initials() {
        let v = model_check(&From(&ts, vec![i]), spec).map_err(|e| e.to_string())?;
        ensure(v.holds(), || format!("violated for goal {:?}", ts.configuration(i).vars.env))?;
    }
    let start = *ts
        .initials()
        .iter()
        .find(|&&i| ts.configuration(i).vars.env == [4, 4])
        .ok_or("no (4,4) goal")?;
    let success = Atom::Status(m.root(), Status::Success);
    let mut dist = vec![usize::MAX; ts.states().len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut first = None;
    while let Some(s) = queue.pop_front() {
        if ts.eval_atom(s, &success) {
            first = Some(dist[s]);
            break;
        }
        for &t in ts.edges(s) {
            if dist[t] == usize::MAX {
                dist[t] = dist[s] + 1;
                queue.push_back(t);
            }
        }
    }
    ensure(first == Some(8), || format!("(4,4) first succeeds at {first:?}"))?;
    Ok("25/25 goals HOLD, (4,4) first succeeds at tick 8".into())
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    for i in 0..1000 {
        let ast = random_ast(&mut rng, GenConfig::syntax());
        let text = pretty_print(&ast);
        let back = parse_source(&text).map_err(|d| format!("case {i}: {d:?}\n{text}"))?;
        ensure(back == ast, || format!("case {i} differs:\n{text}"))?;
    }
    Ok("1000 random programs, 0 failures".into())
}

/// Runs every command on `model` with outputs under `dir`; returns all
/// produced bytes in a fixed order.
fn run_all(model: &Path, dir: &Path) -> Vec<(String, Vec<u8>)> {
    let m = model.to_str().unwrap();
    let file = |n: &str| dir.join(n).to_str().unwrap().to_string();
    let mut commands: Vec<Vec<String>> = vec![
        vec!["check".into(), m.into()],
        vec!["simulate".into(), m.into(), "--seed".into(), "7".into(), "--ticks".into(), "20".into()],
        vec!["simulate".into(), m.into(), "--seed".into(), "7".into(), "--ticks".into(), "20".into(), "--engine".into(), "small".into()],
        vec!["enumerate".into(), m.into(), "--dump".into(), file("graph.txt")],
        vec!["verify".into(), m.into()],
    ];
    for level in OptLevel::ALL {
        commands.push(vec!["emit".into(), m.into(), "--level".into(), level.name().into(), "-o".into(), file(&format!("{}.smv", level.name()))]);
    }
    let mut produced = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let report = file(&format!("report{i}.json"));
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("sbt").chain(args.iter().map(String::as_str)).chain(["--report", report.as_str()]);
        let code = sbt_cli::run(argv, &mut out, &mut err);
        produced.push((format!("{} exit", args[0]), code.to_string().into_bytes()));
        produced.push((format!("{} stdout", args[0]), out));
        produced.push((format!("{} stderr", args[0]), err));
    }
    let mut names: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for n in names {
        produced.push((n.to_string_lossy().into_owned(), fs::read(dir.join(&n)).unwrap()));
    }
    produced
}

fn determinism() -> Outcome {
    let mut outputs = 0;
    for (name, path, _) in corpus() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let first = run_all(&path, a.path());
        let second = run_all(&path, b.path());
        ensure(first.len() == second.len(), || format!("{name}: different file sets"))?;
        for ((what, x), (_, y)) in first.iter().zip(&second) {
            ensure(x == y, || format!("{name}: {what} differs between runs"))?;
        }
        outputs += first.len();
    }
    Ok(format!("{outputs} outputs byte-identical across two runs"))
}

fn enumeration_oracle() -> Outcome {
    let mut summary = Vec::new();
    for (name, _, m) in corpus() {
        let ts = enumerate(&m, Limits::default()).map_err(|e| e.to_string())?;
        let naive = naive_enumerate(&m, 10_000).ok_or_else(|| format!("{name}: more than 10^4 states"))?;
        let states: BTreeSet<Vec<i64>> = ts.states().iter().map(|s| s.0.clone()).collect();
        let mut edges = BTreeSet::new();
        for s in 0..ts.states().len() {
            for &t in ts.edges(s) {
                edges.insert((ts.state(s).0.clone(), ts.state(t).0.clone()));
            }
        }
        ensure(states == naive.states, || format!("{name}: state sets differ"))?;
        ensure(edges == naive.edges, || format!("{name}: edge sets differ"))?;
        summary.push(format!("{name} {}", states.len()));
    }
    Ok(format!("state and edge sets equal ({})", summary.join(", ")))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("fast-forwarding equivalence", fast_forwarding),
        ("LTL checker vs lasso oracle", ltl_oracle),
        ("optimization-level equivalence", level_equivalence),
        ("grid-world regression", grid_world),
        ("parser round-trip", round_trip),
        ("CLI determinism", determinism),
        ("enumeration oracle", enumeration_oracle),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name}: {e} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
