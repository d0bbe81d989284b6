use stairlam_cli::{cmd_build, cmd_report, level_dir, resolve, Auto, CliError, DomainKind, Origin, RunConfig, RunManifest, SourceKind, DEFAULT_LEVELS};
use std::path::PathBuf;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stairlam-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn demo_config(levels: usize) -> RunConfig {
    RunConfig {
        p: Some(3.0),
        i_start: Auto::Value(32),
        levels: Some(levels),
        source: SourceKind::Demo,
        ..Default::default()
    }
}

#[test]
fn config_accepts_auto_and_rejects_unknown_keys() {
    let cfg: RunConfig = serde_json::from_str(r#"{"p": 1.5, "c": "auto", "I": 40, "domain": "ball", "P": "center"}"#).unwrap();
    assert_eq!(cfg.c, Auto::Auto);
    assert_eq!(cfg.i_start, Auto::Value(40));
    assert_eq!(cfg.domain, DomainKind::Ball);
    assert!(serde_json::from_str::<RunConfig>(r#"{"p": 3, "colour": 1}"#).is_err());
    assert!(serde_json::from_str::<RunConfig>(r#"{"p": 3, "c": "automatic"}"#).is_err());
    assert!(serde_json::from_str::<RunConfig>(r#"{"p": 3, "tolerances": {"cells": 5}}"#).is_err());
}

#[test]
fn resolve_fills_auto_values() {
    let cfg = RunConfig {
        p: Some(3.0),
        i_start: Auto::Value(32),
        ..Default::default()
    };
    let r = resolve(&cfg, false).unwrap();
    assert_eq!(r.model.c, 0.125);
    assert_eq!(r.model.i_start, 32);
    assert_eq!(r.origins.c, Origin::Auto);
    assert_eq!(r.origins.i_start, Origin::Explicit);
    assert_eq!(r.levels, DEFAULT_LEVELS);
    assert_eq!(r.threshold, 2.0);
    assert!(r.g_bounds.0 > r.threshold);
    assert!(!r.diagnostic);
}

#[test]
fn p2_is_refused_unless_diagnostic() {
    let cfg = RunConfig {
        p: Some(2.0),
        ..Default::default()
    };
    assert!(matches!(resolve(&cfg, false), Err(CliError::P2)));
    let r = resolve(&cfg, true).unwrap();
    assert!(r.diagnostic);
    // G_2 ≡ 1 equals the threshold, so the gate cannot hold
    assert!((r.g_bounds.0 - 1.0).abs() < 1e-12 && (r.g_bounds.1 - 1.0).abs() < 1e-12);
}

#[test]
fn bad_inputs_are_rejected() {
    let cfg = RunConfig {
        p: Some(3.0),
        c: Auto::Value(5.0),
        ..Default::default()
    };
    assert!(resolve(&cfg, false).is_err());
    assert!(matches!(resolve(&RunConfig::default(), false), Err(CliError::Config(_))));
    let cfg = RunConfig {
        p: Some(0.5),
        ..Default::default()
    };
    assert!(matches!(resolve(&cfg, false), Err(CliError::Config(_))));
    let cfg = RunConfig {
        p: Some(3.0),
        levels: Some(0),
        ..Default::default()
    };
    assert!(matches!(resolve(&cfg, false), Err(CliError::Config(_))));
}

#[test]
fn demo_build_report_and_resume() {
    let r = resolve(&demo_config(2), false).unwrap();
    let out = scratch("demo");
    let built = cmd_build(&r, &out, false, false).unwrap();
    let m = &built.manifest;
    assert_eq!(m.stopped, None);
    assert_eq!(m.levels.len(), 2);
    assert!(m.levels.iter().all(|l| l.audit.failures().is_empty()));
    for f in &m.files {
        assert_eq!(std::fs::metadata(out.join(&f.path)).unwrap().len(), f.bytes, "{}", f.path);
    }
    let rep = cmd_report(&out).unwrap();
    assert_eq!(rep.levels, vec![1, 2]);
    assert_eq!(rep.energy.len(), 4);
    assert_eq!(rep.residuals.len(), 18);
    assert!(rep.m12.iter().all(|r| r.3));
    for name in [
        "energy.csv",
        "residuals.csv",
        "witness.csv",
        "inclusion.csv",
        "m12.csv",
        "grad_u.pgm",
        "dist_kp.pgm",
        "summary.json",
    ] {
        assert!(out.join("report").join(name).exists(), "{name}");
    }

    // cut the run back to one level and resume it
    let straight_map = std::fs::read(level_dir(&out, 2).join("map.jsonl")).unwrap();
    let straight_manifest = std::fs::read(out.join("manifest.json")).unwrap();
    let mut cut: RunManifest = serde_json::from_slice(&straight_manifest).unwrap();
    cut.levels.truncate(1);
    cut.files.retain(|f| !f.path.starts_with("level_02"));
    std::fs::write(out.join("manifest.json"), serde_json::to_vec_pretty(&cut).unwrap()).unwrap();
    std::fs::remove_dir_all(level_dir(&out, 2)).unwrap();
    cmd_build(&r, &out, false, true).unwrap();
    assert_eq!(std::fs::read(level_dir(&out, 2).join("map.jsonl")).unwrap(), straight_map);
    assert_eq!(std::fs::read(out.join("manifest.json")).unwrap(), straight_manifest);

    // resuming under another configuration is refused
    let other = resolve(
        &RunConfig {
            i_start: Auto::Value(33),
            ..demo_config(2)
        },
        false,
    )
    .unwrap();
    assert!(matches!(cmd_build(&other, &out, false, true), Err(CliError::Config(_))));
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn demo_build_is_deterministic_and_clears_stale_levels() {
    let r = resolve(&demo_config(1), false).unwrap();
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    std::fs::create_dir_all(level_dir(&b, 7)).unwrap();
    cmd_build(&r, &a, false, false).unwrap();
    cmd_build(&r, &b, false, false).unwrap();
    assert!(!level_dir(&b, 7).exists());
    for f in ["manifest.json", "level_01/map.jsonl", "level_01/owners.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    std::fs::remove_dir_all(&a).unwrap();
    std::fs::remove_dir_all(&b).unwrap();
}

#[test]
fn demo_build_on_the_disc() {
    let cfg = RunConfig {
        domain: DomainKind::Ball,
        ..demo_config(1)
    };
    let r = resolve(&cfg, false).unwrap();
    let out = scratch("ball");
    let m = cmd_build(&r, &out, false, false).unwrap().manifest;
    assert_eq!(m.levels.len(), 1);
    assert!(m.levels[0].audit.failures().is_empty());
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn staircase_build_stops_on_budget() {
    let cfg = RunConfig {
        p: Some(1.5),
        i_start: Auto::Value(128),
        levels: Some(2),
        ..Default::default()
    };
    let mut r = resolve(&cfg, false).unwrap();
    r.options.max_cells = 100_000;
    let out = scratch("budget");
    let m = cmd_build(&r, &out, true, false).unwrap().manifest;
    assert!(m.levels.is_empty());
    assert!(m.stopped.as_deref().is_some_and(|s| s.contains("level 1")), "{:?}", m.stopped);
    std::fs::remove_dir_all(&out).unwrap();
}
