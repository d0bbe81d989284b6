//! The inductive scheme: `w_1` from the base laminate on `F_1`, then one replacement per
//! affine piece and level, with occupancy tables and audits per level.

use crate::geometry::Polygon;
use crate::grid::{grid_family, GridFamily};
use crate::mollify::{choose_delta, MollifyMethod};
use crate::order::realize_laminate;
use crate::pamap::{AffineCell, CellTag, PAMap};
use crate::simple::MAX_CELLS;
use crate::ConstructError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stairlam_core::{gamma, Mat2, ModelParams, Params, SetKind, SetTag};
use stairlam_laminate::Laminate;
use stairlam_staircase::{t0_margins, v_n_tags, Stair};

/// Supplies the laminates used at each level.
pub trait LaminateSource: Sync {
    /// Laminate realized on every cell of `F_1`; its root is the boundary gradient `M`.
    fn initial(&self) -> Result<Laminate, ConstructError>;
    /// Laminate replacing a piece with gradient `gradient` tagged `tag` when passing from
    /// level `n` to `n + 1`; `None` keeps the piece.
    fn replacement(&self, tag: SetTag, gradient: Mat2, n: usize) -> Result<Option<Laminate>, ConstructError>;
    /// Tags whose union is `V_n`.
    fn level_tags(&self, n: usize) -> Vec<SetTag>;
    /// Minimal distance between target sets of different indices.
    fn separation(&self) -> f64;
    /// `(I, γ, min G_p)` for the occupancy recursions.
    fn rates(&self) -> (usize, f64, f64);
}

/// Staircase laminates at one parameter point.
pub struct StaircaseSource {
    pub stair: Stair,
    pub separation: f64,
}

impl StaircaseSource {
    /// Prepares the ladder up to level `n_max`.
    pub fn new(params: Params, model: ModelParams, n_max: usize) -> Result<Self, ConstructError> {
        let i0 = model.i_start;
        let stair = Stair::new(params, model, i0 + n_max + 3)?;
        let separation = t0_margins(&model, i0, i0 + n_max + 1, &[params])?.index_gap;
        Ok(StaircaseSource { stair, separation })
    }
}

impl LaminateSource for StaircaseSource {
    fn initial(&self) -> Result<Laminate, ConstructError> {
        let i0 = self.stair.model.i_start;
        Ok(self.stair.base_laminate(i0, i0)?)
    }

    fn replacement(&self, tag: SetTag, _gradient: Mat2, n: usize) -> Result<Option<Laminate>, ConstructError> {
        let i0 = self.stair.model.i_start;
        let top = i0 + n + 1;
        Ok(Some(match (tag.kind, tag.q) {
            (SetKind::U1, Some(q)) => self.stair.boundary_laminate(1, tag.i, top, q)?,
            (SetKind::U2, Some(q)) => self.stair.boundary_laminate(2, tag.i, top, q)?,
            (SetKind::U3, _) => self.stair.base_laminate(tag.i, i0 + n)?,
            _ => return Ok(None),
        }))
    }

    fn level_tags(&self, n: usize) -> Vec<SetTag> {
        v_n_tags(self.stair.model.i_start, n)
    }

    fn separation(&self) -> f64 {
        self.separation
    }

    fn rates(&self) -> (usize, f64, f64) {
        let m = &self.stair.model;
        (m.i_start, gamma(m.p), m.g_bounds().0)
    }
}

/// Knobs of a construction run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructOptions {
    pub max_cells: usize,
    /// Cells replaced concurrently between two budget checks.
    pub chunk: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            max_cells: MAX_CELLS,
            chunk: 64,
        }
    }
}

/// Areas carried by one grid cell, per tag of `V_n` and for everything else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyRow {
    pub cell: usize,
    pub area: f64,
    /// Area per tag, in the order of [`LaminateSource::level_tags`].
    pub tagged: Vec<f64>,
    /// Tagged with a set outside `V_n`, or untagged.
    pub outside: f64,
    pub layer: f64,
}

/// Areas per grid cell of `grid` and per tag of `tags`.
pub fn occupancy(map: &PAMap, owners: &[usize], grid: &GridFamily, tags: &[SetTag]) -> Vec<OccupancyRow> {
    let mut rows: Vec<OccupancyRow> = grid
        .cells
        .iter()
        .enumerate()
        .map(|(k, c)| OccupancyRow {
            cell: k,
            area: c.2.area(),
            tagged: vec![0.0; tags.len()],
            outside: 0.0,
            layer: 0.0,
        })
        .collect();
    for (c, &o) in map.cells.iter().zip(owners) {
        let a = c.poly.area();
        let row = &mut rows[o];
        match c.tag {
            CellTag::BoundaryLayer => row.layer += a,
            CellTag::Set(t) => match tags.iter().position(|x| *x == t) {
                Some(k) => row.tagged[k] += a,
                None => row.outside += a,
            },
            CellTag::Untagged => row.outside += a,
        }
    }
    rows
}

/// Constants needed by the occupancy recursions between two consecutive levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionFit {
    /// Smallest `C` in `(1 − C/2ⁿ) old ≤ new` for the carried-over `U¹, U²` sets.
    pub lower_c: f64,
    /// Smallest `C` in `new ≤ old + C n/2ⁿ |Ω_j|`.
    pub upper_c: f64,
    /// Range of `n · new/old` for the sets born from `U³_{I+n}`.
    pub born_ratio: Option<(f64, f64)>,
    /// Smallest `C` in `new ≤ e^{C/n^γ} e^{−2 min G/(I+n)} old` for the `U³` set.
    pub u3_c: Option<f64>,
    /// `U³_{I+n+1}` has positive area wherever `U³_{I+n}` had.
    pub u3_positive: bool,
}

/// Per-level audit numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAudit {
    pub value_scale: f64,
    pub boundary_deviation: f64,
    pub continuity_gap: f64,
    pub stage_eps: f64,
    pub gradient_drift: f64,
    pub m12_range: (f64, f64),
    pub sup_step: f64,
    pub sup_bound: f64,
    pub layer_area: f64,
    pub layer_budget: f64,
    pub area_defect: f64,
    pub outside_area: f64,
    pub recursion: Option<RecursionFit>,
}

impl LevelAudit {
    /// Failed checks, empty when the level is sound.
    pub fn failures(&self) -> Vec<String> {
        let mut f = Vec::new();
        let tol = 1e-9 * self.value_scale;
        if self.boundary_deviation > tol {
            f.push(format!("boundary deviation {:.3e}", self.boundary_deviation));
        }
        if self.continuity_gap > tol {
            f.push(format!("continuity gap {:.3e}", self.continuity_gap));
        }
        if self.gradient_drift > self.stage_eps {
            f.push(format!("gradient drift {:.3e} above stage epsilon {:.3e}", self.gradient_drift, self.stage_eps));
        }
        if !(self.m12_range.0 > 0.75 && self.m12_range.1 < 1.25) {
            f.push(format!("m12 range {:?} leaves (0.75, 1.25)", self.m12_range));
        }
        if self.sup_step > self.sup_bound {
            f.push(format!("sup step {:.3e} above {:.3e}", self.sup_step, self.sup_bound));
        }
        if self.layer_area > self.layer_budget {
            f.push(format!("boundary-layer area {:.3e} above {:.3e}", self.layer_area, self.layer_budget));
        }
        if self.area_defect > 1e-9 {
            f.push(format!("area defect {:.3e}", self.area_defect));
        }
        if let Some(r) = self.recursion {
            if !r.u3_positive {
                f.push("U3 area vanishes in some grid cell".into());
            }
        }
        f
    }
}

/// The state after level `n`.
#[derive(Debug, Clone)]
pub struct InductionState {
    pub n: usize,
    pub w: PAMap,
    pub delta: f64,
    pub grid: GridFamily,
    /// Grid cell of every map cell.
    pub owners: Vec<usize>,
    pub occupancy: Vec<OccupancyRow>,
}

impl InductionState {
    /// Rebuilds a persisted state; the grid is recomputed from the domain.
    pub fn restore(n: usize, w: PAMap, delta: f64, owners: Vec<usize>, occupancy: Vec<OccupancyRow>) -> Result<Self, ConstructError> {
        if owners.len() != w.len() {
            return Err(ConstructError::Precondition(format!("{} owners for {} cells", owners.len(), w.len())));
        }
        let grid = grid_family(&w.domain, n);
        Ok(InductionState {
            n,
            w,
            delta,
            grid,
            owners,
            occupancy,
        })
    }
}

/// Summary of one level, as persisted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelManifest {
    pub n: usize,
    pub delta: f64,
    pub mollify_distance: f64,
    pub mollify_method: MollifyMethod,
    pub cell_count: usize,
    pub tags: Vec<SetTag>,
    pub occupancy: Vec<OccupancyRow>,
    pub audit: LevelAudit,
}

/// `ε_n = min(2^{−n−2}, separation/2)`.
pub fn stage_eps(n: usize, separation: f64) -> f64 {
    2f64.powi(-(n as i32) - 2).min(0.5 * separation)
}

fn replace_all(
    map: &PAMap,
    jobs: &[Option<Laminate>],
    eps: f64,
    floor_scale: f64,
    opts: &ConstructOptions,
) -> Result<(Vec<AffineCell>, Vec<usize>), ConstructError> {
    let mut cells = Vec::with_capacity(map.cells.len());
    let mut parents = Vec::with_capacity(map.cells.len());
    let idx: Vec<usize> = (0..map.cells.len()).collect();
    for chunk in idx.chunks(opts.chunk.max(1)) {
        let room = opts.max_cells as f64 - cells.len() as f64 - (map.cells.len() - chunk[0]) as f64;
        let out: Vec<Result<Vec<AffineCell>, ConstructError>> = chunk
            .par_iter()
            .map(|&k| {
                let c = &map.cells[k];
                match &jobs[k] {
                    Some(lam) => realize_laminate(&c.poly, lam, c.a, c.b, eps, floor_scale, room),
                    None => Ok(vec![c.clone()]),
                }
            })
            .collect();
        for (k, r) in chunk.iter().zip(out) {
            let r = r?;
            parents.extend(std::iter::repeat(*k).take(r.len()));
            cells.extend(r);
        }
        if cells.len() > opts.max_cells {
            return Err(ConstructError::BudgetExceeded {
                projected: cells.len() as f64,
                limit: opts.max_cells as f64,
            });
        }
    }
    Ok((cells, parents))
}

fn audit(w: &PAMap, old: Option<(&PAMap, &[usize])>, stage: f64, sup_bound: f64, layer_budget: f64, outside: f64) -> LevelAudit {
    LevelAudit {
        value_scale: w.value_scale(),
        boundary_deviation: w.boundary_deviation(),
        continuity_gap: w.continuity_gap(),
        stage_eps: stage,
        gradient_drift: w.gradient_drift(),
        m12_range: w.m12_range(),
        sup_step: old.map_or(0.0, |(o, p)| w.sup_distance(o, p)),
        sup_bound,
        layer_area: w.boundary_layer_area(),
        layer_budget,
        area_defect: w.area_defect(),
        outside_area: outside,
        recursion: None,
    }
}

/// `w_0 = M x` followed by the initial laminate on every cell of `F_1`.
pub fn init_map<S: LaminateSource>(domain: &Polygon, source: &S, opts: &ConstructOptions) -> Result<(InductionState, LevelManifest), ConstructError> {
    let lam = source.initial()?;
    let w0 = PAMap::affine(domain.clone(), lam.root, [0.0, 0.0], lam.root_tag.into());
    let grid = grid_family(domain, 1);
    let (w0s, _, _) = grid.subdivide(&w0);
    let eps = stage_eps(1, source.separation()).min(0.5);
    let jobs: Vec<Option<Laminate>> = w0s.cells.iter().map(|_| Some(lam.clone())).collect();
    let (cells, parents) = replace_all(&w0s, &jobs, eps, grid.side, opts)?;
    let w1 = PAMap {
        cells,
        domain: domain.clone(),
        boundary_affine: w0.boundary_affine,
    };
    let (delta, dist, how) = choose_delta(&w1, 1.0, 0.5)?;
    let owners: Vec<usize> = parents.iter().map(|&p| owner_of(&grid, &w0s.cells[p])).collect();
    let tags = source.level_tags(1);
    let occ = occupancy(&w1, &owners, &grid, &tags);
    let outside = occ.iter().map(|r| r.outside).sum();
    let a = audit(&w1, Some((&w0s, &parents)), eps, 0.5, 0.5 * domain.area(), outside);
    let manifest = LevelManifest {
        n: 1,
        delta,
        mollify_distance: dist,
        mollify_method: how,
        cell_count: w1.len(),
        tags,
        occupancy: occ.clone(),
        audit: a,
    };
    Ok((
        InductionState {
            n: 1,
            w: w1,
            delta,
            grid,
            owners,
            occupancy: occ,
        },
        manifest,
    ))
}

fn owner_of(grid: &GridFamily, c: &AffineCell) -> usize {
    grid.locate(c.poly.centroid()).unwrap_or(0)
}

fn recursion_fit(old: &[OccupancyRow], new: &[OccupancyRow], old_tags: &[SetTag], new_tags: &[SetTag], n: usize, rates: (usize, f64, f64)) -> RecursionFit {
    let (i0, gam, min_g) = rates;
    let two_n = 2f64.powi(n as i32);
    let nf = n as f64;
    let mut fit = RecursionFit {
        lower_c: 0.0,
        upper_c: 0.0,
        born_ratio: None,
        u3_c: None,
        u3_positive: true,
    };
    let find = |tags: &[SetTag], t: SetTag| tags.iter().position(|x| *x == t);
    for (ro, rn) in old.iter().zip(new) {
        for t in old_tags.iter().filter(|t| t.kind != SetKind::U3) {
            let moved = SetTag { q: t.q.map(|q| q + 1), ..*t };
            let (Some(ko), Some(kn)) = (find(old_tags, *t), find(new_tags, moved)) else {
                continue;
            };
            let (o, nw) = (ro.tagged[ko], rn.tagged[kn]);
            if o > 0.0 {
                fit.lower_c = fit.lower_c.max(two_n * (1.0 - nw / o));
            }
            fit.upper_c = fit.upper_c.max((nw - o) * two_n / (nf * rn.area));
        }
        let Some(k3) = find(old_tags, SetTag::u3(i0 + n)) else { continue };
        let o3 = ro.tagged[k3];
        if o3 <= 0.0 {
            continue;
        }
        for kind in [SetKind::U1, SetKind::U2] {
            if let Some(kn) = find(
                new_tags,
                SetTag {
                    kind,
                    i: i0 + n,
                    q: Some(i0 + n),
                },
            ) {
                let r = nf * rn.tagged[kn] / o3;
                fit.born_ratio = Some(fit.born_ratio.map_or((r, r), |(lo, hi)| (lo.min(r), hi.max(r))));
            }
        }
        if let Some(kn) = find(new_tags, SetTag::u3(i0 + n + 1)) {
            let n3 = rn.tagged[kn];
            fit.u3_positive &= n3 > 0.0;
            if n3 > 0.0 {
                let c = nf.powf(gam) * ((n3 / o3).ln() + 2.0 * min_g / (i0 + n) as f64);
                fit.u3_c = Some(fit.u3_c.map_or(c, |u| u.max(c)));
            }
        }
    }
    fit
}

/// One level of the scheme: every piece tagged in `V_n` is replaced by the realization of the
/// matching laminate, with sup-distance below `δ_n 2^{−n−1}`.
pub fn induction_step<S: LaminateSource>(
    state: &InductionState,
    source: &S,
    opts: &ConstructOptions,
) -> Result<(InductionState, LevelManifest), ConstructError> {
    let n = state.n;
    let grid = grid_family(&state.w.domain, n + 1);
    let (ws, _, owners_old) = grid.subdivide(&state.w);
    let old_tags = source.level_tags(n);
    let old_occ = occupancy(&ws, &owners_old, &grid, &old_tags);
    let sup_bound = state.delta * 2f64.powi(-(n as i32) - 1);
    let eps = stage_eps(n + 1, source.separation()).min(sup_bound);
    let jobs: Vec<Option<Laminate>> = ws
        .cells
        .iter()
        .map(|c| match c.tag {
            CellTag::Set(t) if old_tags.contains(&t) => source.replacement(t, c.a, n),
            _ => Ok(None),
        })
        .collect::<Result<_, _>>()?;
    let (cells, parents) = replace_all(&ws, &jobs, eps, grid.side, opts)?;
    let w = PAMap {
        cells,
        domain: ws.domain.clone(),
        boundary_affine: ws.boundary_affine,
    };
    let upper = state.delta.min(2f64.powi(-(n as i32) - 1));
    let (delta, dist, how) = choose_delta(&w, upper, 2f64.powi(-(n as i32) - 1))?;
    let owners: Vec<usize> = parents.iter().map(|&p| owners_old[p]).collect();
    let tags = source.level_tags(n + 1);
    let occ = occupancy(&w, &owners, &grid, &tags);
    let outside = occ.iter().map(|r| r.outside).sum();
    // boundary layers created at this level only
    let mut a = audit(&w, Some((&ws, &parents)), eps, sup_bound, 2f64.powi(-(n as i32) - 1) * w.domain.area(), outside);
    a.layer_area -= ws.boundary_layer_area();
    a.recursion = Some(recursion_fit(&old_occ, &occ, &old_tags, &tags, n, source.rates()));
    let manifest = LevelManifest {
        n: n + 1,
        delta,
        mollify_distance: dist,
        mollify_method: how,
        cell_count: w.len(),
        tags,
        occupancy: occ.clone(),
        audit: a,
    };
    Ok((
        InductionState {
            n: n + 1,
            w,
            delta,
            grid,
            owners,
            occupancy: occ,
        },
        manifest,
    ))
}

/// Outcome of a run: the manifests of the completed levels and why it stopped early, if it did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub levels: Vec<LevelManifest>,
    pub stopped: Option<String>,
    /// The recursion constants `(lower, upper, U³)` fitted at the first step and the levels
    /// that need more.
    pub fitted_c: Option<(f64, f64, Option<f64>)>,
    pub recursion_violations: Vec<usize>,
}

impl RunOutcome {
    pub fn completed(&self) -> usize {
        self.levels.len()
    }
}

/// Runs levels `1..=n_max`, handing every completed state to `sink`. A budget failure ends
/// the run and is recorded with its level; other errors propagate.
pub fn run_construction_with<S, F>(domain: &Polygon, source: &S, n_max: usize, opts: &ConstructOptions, sink: F) -> Result<RunOutcome, ConstructError>
where
    S: LaminateSource,
    F: FnMut(&InductionState, &LevelManifest) -> Result<(), ConstructError>,
{
    let out = RunOutcome {
        levels: Vec::new(),
        stopped: None,
        fitted_c: None,
        recursion_violations: Vec::new(),
    };
    resume_construction_with(domain, source, n_max, opts, None, out, sink)
}

/// Continues a run from `state`, whose levels are already recorded in `out`; `None` starts
/// from level 1.
pub fn resume_construction_with<S, F>(
    domain: &Polygon,
    source: &S,
    n_max: usize,
    opts: &ConstructOptions,
    mut state: Option<InductionState>,
    mut out: RunOutcome,
    mut sink: F,
) -> Result<RunOutcome, ConstructError>
where
    S: LaminateSource,
    F: FnMut(&InductionState, &LevelManifest) -> Result<(), ConstructError>,
{
    out.stopped = None;
    let first = state.as_ref().map_or(1, |s| s.n + 1);
    for level in first..=n_max {
        let step = match &state {
            None => init_map(domain, source, opts),
            Some(s) => induction_step(s, source, opts),
        };
        let (next, manifest) = match step {
            Ok(v) => v,
            Err(e @ ConstructError::BudgetExceeded { .. }) => {
                out.stopped = Some(format!("level {level}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        if let Some(r) = manifest.audit.recursion {
            match out.fitted_c {
                None => out.fitted_c = Some((r.lower_c, r.upper_c, r.u3_c)),
                Some((l, u, c3)) => {
                    let slack = |c: f64| c.abs() * 1e-9 + 1e-12;
                    let u3_over = match (r.u3_c, c3) {
                        (Some(x), Some(y)) => x > y + slack(y),
                        (Some(_), None) => true,
                        _ => false,
                    };
                    if r.lower_c > l + slack(l) || r.upper_c > u + slack(u) || u3_over {
                        out.recursion_violations.push(level);
                    }
                }
            }
        }
        sink(&next, &manifest)?;
        out.levels.push(manifest);
        state = Some(next);
    }
    Ok(out)
}

/// As [`run_construction_with`], keeping every state.
pub fn run_construction<S: LaminateSource>(
    domain: &Polygon,
    source: &S,
    n_max: usize,
    opts: &ConstructOptions,
) -> Result<(Vec<InductionState>, RunOutcome), ConstructError> {
    let mut states = Vec::new();
    let out = run_construction_with(domain, source, n_max, opts, |s, _| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok((states, out))
}
