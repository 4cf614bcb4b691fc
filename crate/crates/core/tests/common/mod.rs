#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use sbt_core::dsl::compile;
use sbt_core::SbtModel;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn source(name: &str) -> String {
    fs::read_to_string(corpus_dir().join(format!("{name}.sbt"))).unwrap()
}

pub fn load(name: &str) -> SbtModel {
    compile(&source(name))
        .unwrap_or_else(|e| panic!("{name}: {e:?}"))
        .model
}

pub fn model(src: &str) -> SbtModel {
    compile(src).unwrap_or_else(|e| panic!("{e:?}")).model
}

/// Every corpus model, by file stem, in name order.
pub fn corpus() -> Vec<(String, SbtModel)> {
    let mut names: Vec<String> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sbt"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), load(&n))).collect()
}
