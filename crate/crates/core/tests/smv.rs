mod common;

use std::fs;
use std::path::PathBuf;

use common::corpus;
use sbt_core::smv::{
    cross_check, cross_check_text, emit, emit_spec, CrossError, OptLevel,
};
use sbt_core::ts::Limits;

#[test]
fn every_corpus_model_agrees_at_every_level() {
    for (name, model) in corpus() {
        let mut vars = Vec::new();
        let mut verdicts = None;
        for level in OptLevel::ALL {
            let r = cross_check(&model, level, Limits::default())
                .unwrap_or_else(|e| panic!("{name} at {level}: {e}"));
            vars.push(r.var_count);
            match &verdicts {
                None => verdicts = Some(r.verdicts.clone()),
                Some(v) => assert_eq!(v, &r.verdicts, "{name} at {level}"),
            }
        }
        assert!(vars.windows(2).all(|w| w[0] >= w[1]), "{name}: {vars:?}");
    }
}

/// Regenerates the golden files when `SBT_BLESS` is set.
#[test]
fn goldens_match() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (name, model) in corpus() {
        if !["grid", "single_check", "resume"].contains(&name.as_str()) {
            continue;
        }
        for level in OptLevel::ALL {
            let text = emit(&model, level).render();
            let path = dir.join(format!("{name}.{level}.smv"));
            if std::env::var_os("SBT_BLESS").is_some() {
                fs::write(&path, &text).unwrap();
            }
            let golden = fs::read_to_string(&path).unwrap();
            assert_eq!(text, golden, "{}", path.display());
        }
    }
}

use common::model;

#[test]
fn spec_lines() {
    let m = model(
        "tree T { blackboard { x: int[0..4] = 0; at_goal: bool = false; p: bool = true; q: bool = false; } root: check c { x == 0 }
         spec a: G (x <= 4);
         spec b: F at_goal;
         spec c: p M q; }",
    );
    let lines: Vec<String> = m.specs.iter().map(|s| emit_spec(&m, &s.formula)).collect();
    assert_eq!(lines, vec!["LTLSPEC G (x <= 4)", "LTLSPEC F (at_goal)", "LTLSPEC q U (p & q)"]);
}

#[test]
fn single_check_has_two_states_everywhere() {
    let m = model("tree T { blackboard { x: int[0..4] = 0; } root: check c { x == 0 } }");
    for level in OptLevel::ALL {
        let r = cross_check(&m, level, Limits::default()).unwrap();
        assert_eq!((r.ts_states, r.smv_states), (2, 2), "{level}");
    }
    let doc = emit(&m, OptLevel::FullOpt);
    let vars: Vec<&str> = doc.vars.iter().map(|(v, _)| v.as_str()).collect();
    // the blackboard variable plus the pre-tick bookkeeping flag
    assert_eq!(vars, vec!["__started", "__pre_x"]);
    assert!(doc.defines.iter().any(|(d, _)| d == "__status___root"));
}

#[test]
fn emission_is_deterministic() {
    for (_, m) in corpus() {
        for level in OptLevel::ALL {
            assert_eq!(emit(&m, level).render(), emit(&m, level).render());
        }
    }
}

#[test]
fn corrupted_define_is_caught() {
    let (_, grid) = corpus().into_iter().find(|(n, _)| n == "grid_small").unwrap();
    let text = emit(&grid, OptLevel::FullOpt).render();
    let bad = text.replace("__pre_x < x_g : running", "__pre_x < x_g : failure");
    assert_ne!(bad, text);
    match cross_check_text(&grid, &bad, Limits::default()) {
        Err(CrossError::Divergence(d)) => assert!(!d.witness.is_empty()),
        other => panic!("expected a divergence, got {other:?}"),
    }
    // a wrong blackboard update is caught too
    let bad = text.replace("next(__pre_y) := y;", "next(__pre_y) := __pre_y;");
    assert!(matches!(
        cross_check_text(&grid, &bad, Limits::default()),
        Err(CrossError::Divergence(_))
    ));
}

#[test]
fn random_models_agree_at_every_level() {
    use rand::SeedableRng;
    use sbt_core::generate::{random_model, GenConfig};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for i in 0..150 {
        let m = random_model(&mut rng, GenConfig::small());
        for level in OptLevel::ALL {
            if let Err(e) = cross_check(&m, level, Limits::default()) {
                panic!("model {i} at {level}: {e}\n{}", emit(&m, level).render());
            }
        }
    }
}
