use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tracediag::cli::RunManifest;
use tracediag::diagnose::export;
use tracediag::hls::Formula;
use tracediag::search::delta::read_delta;

const FRAGMENT: &str = "\
timestamp,v_pos_x,d_pos_x,d2obs
0,-0.15,-0.15,6.05
1.0,-0.16,-0.16,7.05
5.0,5.66,7.86,0.007
11.0,11.87,14.56,2.23
12.5,17.49,19.09,8.44
15.0,19.31,19.31,8.15
";
const PHI: &str =
    "forall t0 in [0, inf) such that d_pos_x @t (t0) - v_pos_x @t (t0) < 0.20 and d2obs @t (t0) > 0.50\n";
const RAMP_REQ: &str = "forall t0 in [0, 20] such that speed @t (t0) < 120\n---\nslot 0 at 120 op OP13 range [100, 140]\n";
const CONNECTIVES_REQ: &str = "forall t0 in [0, 20] such that speed @t (t0) <= 120 and speed @t (t0) >= 0\n---\n\
slot 0 at and op OP4 set {and, or}\nslot 1 at <= op OP2 set {<=, <}\nslot 2 at forall op OP5\n";

fn tracediag(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracediag"))
        .args(args)
        .current_dir(dir)
        .env_remove("TRACE_DIAG_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture { dir: tempfile::tempdir().unwrap() };
        f.write("fragment.csv", FRAGMENT);
        f.write("phi.req", PHI);
        f.write("ramp.req", RAMP_REQ);
        f.write("connectives.req", CONNECTIVES_REQ);
        let o = f.run(&["synth", "ramp peak=120.0226", "--seed", "4", "ramp.csv"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn run(&self, args: &[&str]) -> Output {
        tracediag(args, self.dir.path())
    }
}

#[test]
fn check_reports_verdicts_through_exit_codes() {
    let fx = Fixture::new();
    let o = fx.run(&["check", "fragment.csv", "phi.req"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "Violated\n"));

    fx.write("true.req", "exists t0 in [0, 1] such that 1 = 1\n");
    let o = fx.run(&["check", "--trace", "fragment.csv", "--req", "true.req"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "Satisfied\n"));

    fx.write("real.req", "forall r0 such that d2obs @t (0) > r0\n");
    let o = fx.run(&["check", "fragment.csv", "real.req"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("Unknown"));
}

#[test]
fn check_input_errors_exit_3() {
    let fx = Fixture::new();
    fx.write("ghost.req", "forall t0 in [0, 1] such that ghost @t (t0) > 0\n");
    let o = fx.run(&["check", "fragment.csv", "ghost.req"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unknown signal `ghost`"), "{}", stderr(&o));

    fx.write("broken.req", "forall t0 in [0, 1] such that\n");
    assert_eq!(fx.run(&["check", "fragment.csv", "broken.req"]).status.code(), Some(3));
    assert_eq!(fx.run(&["check", "missing.csv", "phi.req"]).status.code(), Some(3));
    assert_eq!(fx.run(&["check", "fragment.csv"]).status.code(), Some(3));
    assert_eq!(fx.run(&["check", "--bogus"]).status.code(), Some(3));
}

#[test]
fn diagnose_writes_all_artifacts() {
    let fx = Fixture::new();
    let o = fx.run(&["diagnose", "ramp.csv", "ramp.req", "--desk", "--seed", "3", "--out", "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["delta.csv", "dataset.csv", "tree.txt", "tree.dot", "tree.json", "manifest.json"] {
        assert!(fx.path("run").join(name).is_file(), "{name}");
    }
    assert!(!fx.path("run").join("manifest.tmp").exists());
    let text = fs::read_to_string(fx.path("run/tree.txt")).unwrap();
    assert_eq!(stdout(&o), text);
    assert!(text.starts_with("slot_0 <= 1"), "{text}");

    let tree = export::from_json(&fs::read_to_string(fx.path("run/tree.json")).unwrap()).unwrap();
    assert_eq!(export::to_text(&tree), text);
    assert!(fs::read_to_string(fx.path("run/tree.dot")).unwrap().starts_with("digraph"));

    let f = Formula::parse(RAMP_REQ).unwrap();
    let delta = read_delta(fs::File::open(fx.path("run/delta.csv")).unwrap(), &f).unwrap();
    let m = RunManifest::load(&fx.path("run/manifest.json")).unwrap();
    assert_eq!(m.seed, 3);
    assert_eq!((m.config.ps, m.config.mg), (20, 100));
    assert_eq!(m.checked.satisfied + m.checked.violated + m.checked.unknown, delta.len());
    assert_eq!(m.termination.to_string(), "satisfied-target");
    assert_eq!(m.original_verdict, "violated");
    assert!(m.finished_unix >= m.started_unix);
    assert_eq!(m.trace.sha256.len(), 64);
    assert!(m.not_found.is_none());

    let ds = fs::read_to_string(fx.path("run/dataset.csv")).unwrap();
    let sat = ds.lines().filter(|l| l.ends_with(",satisfied")).count();
    let vio = ds.lines().filter(|l| l.ends_with(",violated")).count();
    assert_eq!(ds.lines().next(), Some("slot_0,class"));
    assert!(sat > 0 && sat == vio);
}

#[test]
fn manifest_rerun_reproduces_delta() {
    let fx = Fixture::new();
    let o = fx.run(&["diagnose", "ramp.csv", "ramp.req", "--desk", "--seed", "8", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = fx.run(&["diagnose", "--manifest", "a/manifest.json", "--out", "b", "--jobs", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["delta.csv", "tree.json", "dataset.csv"] {
        assert_eq!(fs::read(fx.path("a").join(name)).unwrap(), fs::read(fx.path("b").join(name)).unwrap(), "{name}");
    }

    fx.write("ramp.req", &RAMP_REQ.replace("< 120", "< 119"));
    let o = fx.run(&["diagnose", "--manifest", "a/manifest.json", "--out", "c"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("inputs changed"));
}

#[test]
fn config_file_and_flag_overrides() {
    let fx = Fixture::new();
    fx.write("run.cfg", "ps = 12\nmg = 40\nsa = elitism\nseed = 5\n");
    let o = fx.run(&["diagnose", "ramp.csv", "ramp.req", "--config", "run.cfg", "--mg", "30", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = RunManifest::load(&fx.path("r/manifest.json")).unwrap();
    assert_eq!((m.config.ps, m.config.mg, m.config.seed), (12, 30, 5));
    assert_eq!(m.config.sa.to_string(), "elitism");

    fx.write("bad.cfg", "ps = 0\n");
    let o = fx.run(&["diagnose", "ramp.csv", "ramp.req", "--config", "bad.cfg", "--out", "x"]);
    assert_eq!(o.status.code(), Some(3));
    fx.write("bad.cfg", "colour = blue\n");
    let o = fx.run(&["diagnose", "ramp.csv", "ramp.req", "--config", "bad.cfg", "--out", "x"]);
    assert_eq!(o.status.code(), Some(3));
    let o = fx.run(&["diagnose", "ramp.csv", "ramp.req", "--cr", "1.5", "--out", "x"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn zero_budget_is_not_found() {
    let fx = Fixture::new();
    let o = fx.run(&["diagnose", "ramp.csv", "ramp.req", "--pgto", "0", "--out", "z"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).starts_with("Not found: "), "{}", stdout(&o));
    assert!(stdout(&o).contains("timeout"));
    let m = RunManifest::load(&fx.path("z/manifest.json")).unwrap();
    assert!(m.not_found.is_some());
    assert_eq!(m.outputs, vec!["delta.csv", "manifest.json"]);
    let f = Formula::parse(RAMP_REQ).unwrap();
    assert!(read_delta(fs::File::open(fx.path("z/delta.csv")).unwrap(), &f).unwrap().is_empty());
}

#[test]
fn all_categorical_space_diagnosed_from_eight_mutants() {
    let fx = Fixture::new();
    let o = fx.run(&["diagnose", "ramp.csv", "connectives.req", "--desk", "--out", "c"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let m = RunManifest::load(&fx.path("c/manifest.json")).unwrap();
    assert_eq!(m.termination.to_string(), "domain-exhausted");
    assert!(m.checked.satisfied + m.checked.violated + m.checked.unknown <= 8);
}

#[test]
fn jobs_from_environment() {
    let fx = Fixture::new();
    let run = |out: &str, env: &str| {
        Command::new(env!("CARGO_BIN_EXE_tracediag"))
            .args(["diagnose", "ramp.csv", "ramp.req", "--desk", "--seed", "2", "--out", out])
            .current_dir(fx.dir.path())
            .env("TRACE_DIAG_JOBS", env)
            .output()
            .unwrap()
    };
    assert_eq!(run("e1", "1").status.code(), Some(0));
    assert_eq!(run("e4", "4").status.code(), Some(0));
    assert_eq!(fs::read(fx.path("e1/delta.csv")).unwrap(), fs::read(fx.path("e4/delta.csv")).unwrap());
    assert_eq!(run("e0", "zero").status.code(), Some(3));
}

#[test]
fn synth_writes_csv_and_rejects_bad_specs() {
    let fx = Fixture::new();
    let o = fx.run(&["synth", "pursuit gap_min=0.6864", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("timestamp,y1,y2,y3,y4,y5\n"));
    let o = fx.run(&["synth", "obstacle", "--out", "obs.csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(fx.path("obs.csv")).unwrap().starts_with("timestamp,d_pos_x,v_pos_x,d2obs\n"));
    for spec in ["sawtooth", "ramp dt=30 duration=20", "ramp peak=nan", "ramp speed=3"] {
        let o = fx.run(&["synth", spec]);
        assert_eq!(o.status.code(), Some(3), "{spec}");
    }
}

#[test]
fn agreement_reports_confusion() {
    let fx = Fixture::new();
    let o = fx.run(&["diagnose", "ramp.csv", "ramp.req", "--desk", "--seed", "1", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0));
    let o = fx.run(&["agreement", "a/tree.json", "a/tree.json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("points 101\n") && out.contains("FP 0\n") && out.contains("FN 0\n"), "{out}");
    assert!(out.contains("precision 1\n") && out.contains("recall 1\n"), "{out}");

    let o = fx.run(&["diagnose", "ramp.csv", "connectives.req", "--desk", "--out", "c"]);
    assert_eq!(o.status.code(), Some(0));
    let o = fx.run(&["agreement", "a/tree.json", "c/tree.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("same slot schema"));
    let o = fx.run(&["agreement", "a/tree.json", "a/tree.json", "--limit", "10"]);
    assert_eq!(o.status.code(), Some(3));
}
