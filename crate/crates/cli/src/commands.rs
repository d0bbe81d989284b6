use crate::config::{Resolved, SourceKind};
use crate::files::{level_dir, write_atomic};
use crate::CliError;
use serde::{Deserialize, Serialize};
use stairlam_analysis::{
    bump_battery, grad_statistics, inclusion_residual, lq_energy_domain, plap_residual, sample_field, write_csv, write_pgm, EnergyRow, ResidualRow, WitnessRow,
};
use stairlam_construct::{
    grid_family, resume_construction_with, ConstructError, DemoSource, InductionState, LaminateSource, LevelManifest, PAMap, Point, RunOutcome, StaircaseSource,
};
use stairlam_core::{dist_to_kp, Mat2};
use stairlam_verify::{run_battery, Battery};
use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Level of the reference grid for the lineage statistics.
pub const LEVEL_ORDER_REF: usize = 2;
/// Width in pixels of the exported rasters.
pub const RASTER_WIDTH: usize = 256;

/// What `params` prints.
pub type ParamsReport = Resolved;

pub fn cmd_params(resolved: &Resolved) -> ParamsReport {
    resolved.clone()
}

pub fn cmd_verify(resolved: &Resolved) -> Result<Battery, CliError> {
    Ok(run_battery(&resolved.model)?)
}

/// One persisted file and its size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
}

/// The run manifest, rewritten after every level. Wall-times live in `timing.json` so that
/// identical runs give identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: Resolved,
    pub versions: BTreeMap<String, String>,
    /// `(M, b0)` of the boundary datum.
    pub boundary_affine: (Mat2, Point),
    pub fitted_c: Option<(f64, f64, Option<f64>)>,
    pub recursion_violations: Vec<usize>,
    pub levels: Vec<LevelManifest>,
    pub stopped: Option<String>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    fn outcome(&self) -> RunOutcome {
        RunOutcome {
            levels: self.levels.clone(),
            stopped: self.stopped.clone(),
            fitted_c: self.fitted_c,
            recursion_violations: self.recursion_violations.clone(),
        }
    }
}

/// Result of `build`.
#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub manifest: RunManifest,
    pub out_dir: PathBuf,
}

fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([("stairlam".to_string(), env!("CARGO_PKG_VERSION").to_string())])
}

fn rel(out: &Path, path: &Path) -> String {
    path.strip_prefix(out).unwrap_or(path).to_string_lossy().replace('\\', "/")
}

fn persist_level(out: &Path, state: &InductionState, manifest: &LevelManifest, files: &mut Vec<FileEntry>) -> Result<(), CliError> {
    let dir = level_dir(out, state.n);
    let mut map = Vec::new();
    state.w.write_jsonl(&mut map)?;
    let owners = serde_json::to_vec(&state.owners)?;
    let man = serde_json::to_vec_pretty(manifest)?;
    for (name, bytes) in [("map.jsonl", &map), ("owners.json", &owners), ("manifest.json", &man)] {
        let path = dir.join(name);
        write_atomic(&path, bytes)?;
        let entry = FileEntry {
            path: rel(out, &path),
            bytes: bytes.len() as u64,
        };
        files.retain(|f| f.path != entry.path);
        files.push(entry);
    }
    Ok(())
}

fn write_manifest(out: &Path, m: &RunManifest) -> Result<(), CliError> {
    write_atomic(&out.join("manifest.json"), &serde_json::to_vec_pretty(m)?)
}

/// Reads the map of level `n` of a run.
pub fn load_level(out: &Path, n: usize, m: &RunManifest) -> Result<PAMap, CliError> {
    let path = level_dir(out, n).join("map.jsonl");
    let f = std::fs::File::open(&path).map_err(|_| CliError::Missing(path.display().to_string()))?;
    Ok(PAMap::read_jsonl(BufReader::new(f), m.config.domain.polygon(), m.boundary_affine)?)
}

fn load_state(out: &Path, m: &RunManifest) -> Result<Option<InductionState>, CliError> {
    let Some(last) = m.levels.last() else { return Ok(None) };
    let w = load_level(out, last.n, m)?;
    let path = level_dir(out, last.n).join("owners.json");
    let text = std::fs::read(&path).map_err(|_| CliError::Missing(path.display().to_string()))?;
    let owners: Vec<usize> = serde_json::from_slice(&text)?;
    Ok(Some(InductionState::restore(last.n, w, last.delta, owners, last.occupancy.clone())?))
}

fn read_manifest(out: &Path) -> Result<RunManifest, CliError> {
    let path = out.join("manifest.json");
    let text = std::fs::read(&path).map_err(|_| CliError::Missing(path.display().to_string()))?;
    Ok(serde_json::from_slice(&text)?)
}

fn build_with<S: LaminateSource>(resolved: &Resolved, source: &S, out: &Path, resume: bool) -> Result<RunManifest, CliError> {
    let domain = resolved.domain.polygon();
    let root = source.initial()?.root;
    let mut manifest = RunManifest {
        config: resolved.clone(),
        versions: versions(),
        boundary_affine: (root, [0.0, 0.0]),
        fitted_c: None,
        recursion_violations: Vec::new(),
        levels: Vec::new(),
        stopped: None,
        files: Vec::new(),
    };
    let mut state = None;
    if resume && out.join("manifest.json").exists() {
        let prior = read_manifest(out)?;
        if prior.config != *resolved || prior.boundary_affine != manifest.boundary_affine {
            return Err(CliError::Config(format!("{} was built with a different configuration", out.display())));
        }
        state = load_state(out, &prior)?;
        manifest = prior;
    } else if out.exists() {
        // stale levels of an earlier run would contradict the new manifest
        for e in std::fs::read_dir(out)? {
            let e = e?;
            let name = e.file_name().to_string_lossy().to_string();
            if e.path().is_dir() && name.len() == 8 && name.starts_with("level_") && name[6..].chars().all(|c| c.is_ascii_digit()) {
                std::fs::remove_dir_all(e.path())?;
            }
        }
    }
    std::fs::create_dir_all(out)?;
    write_atomic(&out.join("config.json"), &serde_json::to_vec_pretty(resolved)?)?;
    let mut timing: BTreeMap<usize, f64> = BTreeMap::new();
    let mut files = std::mem::take(&mut manifest.files);
    let prior = manifest.outcome();
    let mut clock = Instant::now();
    let mut levels_so_far = prior.levels.clone();
    let outcome = resume_construction_with(&domain, source, resolved.levels, &resolved.options, state, prior, |s, m| {
        let wrap = |e: CliError| ConstructError::Io(e.to_string());
        persist_level(out, s, m, &mut files).map_err(wrap)?;
        levels_so_far.push(m.clone());
        let snapshot = RunManifest {
            levels: levels_so_far.clone(),
            files: files.clone(),
            stopped: None,
            ..manifest.clone()
        };
        write_manifest(out, &snapshot).map_err(wrap)?;
        timing.insert(s.n, clock.elapsed().as_secs_f64());
        clock = Instant::now();
        Ok(())
    })?;
    manifest.levels = outcome.levels;
    manifest.stopped = outcome.stopped;
    manifest.fitted_c = outcome.fitted_c;
    manifest.recursion_violations = outcome.recursion_violations;
    manifest.files = files;
    write_manifest(out, &manifest)?;
    write_atomic(&out.join("timing.json"), &serde_json::to_vec_pretty(&timing)?)?;
    Ok(manifest)
}

/// Runs the construction into `out`. Unless `force`, the check battery must pass first. With
/// `resume`, a run in `out` with the same configuration continues after its last level.
pub fn cmd_build(resolved: &Resolved, out: &Path, force: bool, resume: bool) -> Result<BuildOutcome, CliError> {
    if !force && resolved.source == SourceKind::Staircase {
        let b = run_battery(&resolved.model)?;
        if !b.pass() {
            return Err(CliError::VerifyFailed(b.failures.join("; ")));
        }
    }
    let manifest = match resolved.source {
        SourceKind::Staircase => {
            let src = StaircaseSource::new(resolved.point, resolved.model, resolved.levels)?;
            build_with(resolved, &src, out, resume)?
        }
        SourceKind::Demo => build_with(resolved, &DemoSource { carry: false }, out, resume)?,
    };
    Ok(BuildOutcome {
        manifest,
        out_dir: out.to_path_buf(),
    })
}

/// Measurements of a run, level by level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub levels: Vec<usize>,
    /// Energy exponents: `p` and `(1 + eps) max{1, p−1}`.
    pub q_high: f64,
    pub q_low: f64,
    pub energy: Vec<EnergyRow>,
    pub residuals: Vec<ResidualRow>,
    pub witness: Vec<WitnessRow>,
    /// `(level, area-weighted mean, max)` of the distance to `K_p`.
    pub inclusion: Vec<(usize, f64, f64)>,
    /// `(level, min m12, max m12, inside (3/4, 5/4))`.
    pub m12: Vec<(usize, f64, f64, bool)>,
    /// `(level, witness c0, separation violations)`.
    pub lineage: Vec<(usize, f64, usize)>,
    pub residual_max: Vec<(usize, f64)>,
    pub stopped: Option<String>,
}

#[derive(Serialize)]
struct InclusionRow {
    level: usize,
    mean: f64,
    max: f64,
}

#[derive(Serialize)]
struct M12Row {
    level: usize,
    m12_min: f64,
    m12_max: f64,
    pass: bool,
}

/// Measures every persisted level of the run in `run_dir` and writes tables, rasters of the
/// last level and `report/summary.json`.
pub fn cmd_report(run_dir: &Path) -> Result<Report, CliError> {
    let m = read_manifest(run_dir)?;
    let p = m.config.model.p;
    let q_low = (1.0 + m.config.model.eps) * m.config.threshold;
    let domain = m.config.domain.polygon();
    let bumps = bump_battery(&domain)?;
    let reference = grid_family(&domain, LEVEL_ORDER_REF);
    let mut r = Report {
        levels: Vec::new(),
        q_high: p,
        q_low,
        energy: Vec::new(),
        residuals: Vec::new(),
        witness: Vec::new(),
        inclusion: Vec::new(),
        m12: Vec::new(),
        lineage: Vec::new(),
        residual_max: Vec::new(),
        stopped: m.stopped.clone(),
    };
    let mut last = None;
    for lm in &m.levels {
        let n = lm.n;
        let w = load_level(run_dir, n, &m)?;
        r.levels.push(n);
        for q in [p, q_low] {
            r.energy.push(EnergyRow {
                level: n,
                q,
                energy: lq_energy_domain(&w, q),
            });
        }
        let mut worst: f64 = 0.0;
        for (k, phi) in bumps.iter().enumerate() {
            let v = plap_residual(&w, phi, p);
            worst = worst.max(v);
            r.residuals.push(ResidualRow {
                level: n,
                bump_id: k,
                residual: v,
            });
        }
        r.residual_max.push((n, worst));
        let inc = inclusion_residual(&w, p);
        r.inclusion.push((n, inc.mean, inc.max));
        let g = grad_statistics(&w, &reference);
        for c in &g.cells {
            r.witness.push(WitnessRow {
                level: n,
                cell_id: c.cell,
                u1_mass: c.u1,
                u2_mass: c.u2,
                u3_mass: c.u3,
                m12_min: c.m12_min,
                m12_max: c.m12_max,
            });
        }
        r.m12.push((n, g.m12_range.0, g.m12_range.1, g.m12_range.0 > 0.75 && g.m12_range.1 < 1.25));
        r.lineage.push((n, g.witness, g.separation_violations));
        last = Some(w);
    }
    let dir = run_dir.join("report");
    std::fs::create_dir_all(&dir)?;
    let csv = |name: &str, f: &dyn Fn(&mut Vec<u8>) -> Result<(), CliError>| -> Result<(), CliError> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        write_atomic(&dir.join(name), &buf)
    };
    csv("energy.csv", &|b| Ok(write_csv(b, &r.energy)?))?;
    csv("residuals.csv", &|b| Ok(write_csv(b, &r.residuals)?))?;
    csv("witness.csv", &|b| Ok(write_csv(b, &r.witness)?))?;
    let inc: Vec<InclusionRow> = r.inclusion.iter().map(|&(level, mean, max)| InclusionRow { level, mean, max }).collect();
    csv("inclusion.csv", &|b| Ok(write_csv(b, &inc)?))?;
    let m12: Vec<M12Row> = r
        .m12
        .iter()
        .map(|&(level, m12_min, m12_max, pass)| M12Row { level, m12_min, m12_max, pass })
        .collect();
    csv("m12.csv", &|b| Ok(write_csv(b, &m12)?))?;
    if let Some(w) = last {
        let grad = sample_field(&w, RASTER_WIDTH, |c| c.a.m11.hypot(c.a.m12));
        write_pgm(&grad, "|Du|", &dir.join("grad_u.pgm"), &dir.join("grad_u.json"))?;
        let kp = sample_field(&w, RASTER_WIDTH, |c| dist_to_kp(c.a, p));
        write_pgm(&kp, "dist_to_Kp", &dir.join("dist_kp.pgm"), &dir.join("dist_kp.json"))?;
    }
    write_atomic(&dir.join("summary.json"), &serde_json::to_vec_pretty(&r)?)?;
    Ok(r)
}
