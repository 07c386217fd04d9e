//! Command execution: each public function maps one validated run
//! configuration onto the numeric engine and returns a finished table.
//! Everything here is deterministic for a fixed configuration, including
//! the header notes, so reruns reproduce output files byte for byte.

use std::fmt;

use rayon::prelude::*;

use decoprobe_core::analysis::{
    chern_number, edge_localization, locate_nodes, momentum_path_scan, sweep_parameter, zak_phase,
    SweepDiagnostic,
};
use decoprobe_core::decoherence::{lk_series, product_series, realspace_series, FillingRule};
use decoprobe_core::models::{
    km_ribbon, momentum_grid, qwz_bloch, qwz_strip, ssh_bloch, ssh_open_chain, weyl_bloch,
    BlochModel, Boundary, TwoBandBloch, WeylParams,
};
use decoprobe_core::numkit::{eig_hermitian, NumericPolicy};
use decoprobe_core::Error as CoreError;

use crate::config::{allowed_params, ConfigError, RunConfig};
use crate::output::{Cell, DataTable};

const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

// ═══════════════════════════════════════════════════════════════════════
// Failure modes
// ═══════════════════════════════════════════════════════════════════════

/// Anything that can stop a run, split by exit code: configuration
/// problems (including invalid numeric parameters caught downstream) exit
/// with 2, genuine numeric or I/O failures with 3.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Run(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Run(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) | RunError::Run(m) => write!(f, "{m}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::InvalidParameter(_) => RunError::Config(e.to_string()),
            _ => RunError::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Run(format!("output write failed: {e}"))
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Config(msg.into()))
}

// ═══════════════════════════════════════════════════════════════════════
// Shared construction helpers
// ═══════════════════════════════════════════════════════════════════════

fn warn_regime(model: &TwoBandBloch) {
    if let Some(warning) = model.regime_warning() {
        eprintln!("warning: {warning}");
    }
}

/// Bulk Bloch Hamiltonian for the momentum-space commands. Finite-size
/// models have no bulk momentum description and are rejected by name.
fn bloch_model(config: &RunConfig) -> Result<BlochModel, RunError> {
    match config.model.as_str() {
        "ssh" => {
            let model = ssh_bloch(config.require_param("phi")?);
            warn_regime(&model);
            Ok(BlochModel::TwoBand(model))
        }
        "qwz" => {
            let model = qwz_bloch(config.require_param("m")?);
            warn_regime(&model);
            Ok(BlochModel::TwoBand(model))
        }
        "weyl" => Ok(BlochModel::MultiBand(weyl_bloch(weyl_params(config)))),
        other => config_err(format!(
            "field `model`: {other:?} has no bulk Bloch Hamiltonian; this command needs ssh, qwz, or weyl"
        )),
    }
}

/// Semimetal parameters: the defaults overridden by whatever `[params]`
/// sets. Unknown names were already rejected by validation.
fn weyl_params(config: &RunConfig) -> WeylParams {
    let mut p = WeylParams::default();
    for (key, &value) in &config.params {
        match key.as_str() {
            "lambda" => p.lambda = value,
            "lambda_z" => p.lambda_z = value,
            "t" => p.t = value,
            "eps" => p.eps = value,
            "b0" => p.b0 = value,
            "b1" => p.b1 = value,
            "b2" => p.b2 = value,
            "b3" => p.b3 = value,
            other => unreachable!("parameter {other:?} passed validation for model weyl"),
        }
    }
    p
}

fn set_weyl_param(mut p: WeylParams, name: &str, value: f64) -> WeylParams {
    match name {
        "lambda" => p.lambda = value,
        "lambda_z" => p.lambda_z = value,
        "t" => p.t = value,
        "eps" => p.eps = value,
        "b0" => p.b0 = value,
        "b1" => p.b1 = value,
        "b2" => p.b2 = value,
        "b3" => p.b3 = value,
        other => unreachable!("sweep parameter {other:?} passed validation for model weyl"),
    }
    p
}

/// Column names for momentum components, by zone dimension.
fn k_names(dim_k: usize) -> &'static [&'static str] {
    match dim_k {
        1 => &["k"],
        2 => &["kx", "ky"],
        3 => &["kx", "ky", "kz"],
        other => unreachable!("no model exposes a {other}-dimensional zone"),
    }
}

/// Sweep parameter names interned to static strings for the scan result.
fn static_param_name(name: &str) -> Result<&'static str, RunError> {
    const NAMES: [&str; 10] = [
        "phi", "m", "lambda", "lambda_z", "t", "eps", "b0", "b1", "b2", "b3",
    ];
    NAMES
        .iter()
        .copied()
        .find(|n| *n == name)
        .ok_or_else(|| RunError::Config(format!("field `scan.parameter`: unknown parameter {name:?}")))
}

/// Inclusive uniform grid over `[range[0], range[1]]`; the last point is
/// exactly the upper bound.
fn linspace(range: [f64; 2], points: usize) -> Vec<f64> {
    let step = (range[1] - range[0]) / (points - 1) as f64;
    (0..points)
        .map(|i| if i == points - 1 { range[1] } else { range[0] + step * i as f64 })
        .collect()
}

/// All grid points in ascending lexicographic order (first axis slowest).
fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.len());
        for p in &points {
            for &x in axis {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

fn check_momentum_dim(config: &RunConfig, field: &str, got: usize, dim_k: usize) -> Result<(), RunError> {
    if got != dim_k {
        return config_err(format!(
            "field `{field}`: model {:?} has {dim_k} momentum axes, got {got}",
            config.model
        ));
    }
    Ok(())
}

// ═══════════════════════════════════════════════════════════════════════
// sweep
// ═══════════════════════════════════════════════════════════════════════

/// Sweep one model parameter and accumulate the decoherence diagnostic
/// with cusp candidates marked. Columns: `<parameter>, diagnostic, is_cusp`.
pub fn sweep(config: &RunConfig) -> Result<DataTable, RunError> {
    let scan = config.require_scan()?;
    let grid = config.require_grid()?;
    let time = config.require_time()?;
    let times = time.grid();

    let diagnostic = match scan.snapshot_index {
        Some(index) => {
            if index >= times.len() {
                return config_err(format!(
                    "field `scan.snapshot_index`: index {index} is outside the time grid of {} samples",
                    times.len()
                ));
            }
            SweepDiagnostic::SnapshotLog10(index)
        }
        None => SweepDiagnostic::MinModulusSq,
    };

    let parameter = static_param_name(&scan.parameter)?;
    let values = linspace(scan.range, scan.points);
    let result = match config.model.as_str() {
        "ssh" if parameter == "phi" => sweep_parameter(
            parameter,
            &values,
            |v| BlochModel::TwoBand(ssh_bloch(v)),
            &grid.sizes,
            config.delta,
            &times,
            diagnostic,
            &POLICY,
        )?,
        "qwz" if parameter == "m" => sweep_parameter(
            parameter,
            &values,
            |v| BlochModel::TwoBand(qwz_bloch(v)),
            &grid.sizes,
            config.delta,
            &times,
            diagnostic,
            &POLICY,
        )?,
        "weyl" if allowed_params("weyl").contains(&parameter) => {
            let base = weyl_params(config);
            sweep_parameter(
                parameter,
                &values,
                move |v| BlochModel::MultiBand(weyl_bloch(set_weyl_param(base, parameter, v))),
                &grid.sizes,
                config.delta,
                &times,
                diagnostic,
                &POLICY,
            )?
        }
        model => {
            return config_err(format!(
                "field `scan.parameter`: model {model:?} cannot sweep {:?}; allowed: {}",
                scan.parameter,
                allowed_params(model).join(", ")
            ))
        }
    };

    let mut table = DataTable::new("sweep", &config.model)
        .column(parameter, "1")
        .column("diagnostic", if scan.snapshot_index.is_some() { "log10" } else { "1" })
        .column("is_cusp", "1");
    table.notes.push(match diagnostic {
        SweepDiagnostic::MinModulusSq => "diagnostic: min |L(t)|^2 over the time window".to_string(),
        SweepDiagnostic::SnapshotLog10(index) => {
            format!("diagnostic: log10 |L(t)|^2 at t = {}", times[index])
        }
    });
    table.notes.push(format!("momentum grid: {:?}", grid.sizes));
    for (i, (&v, &d)) in result.grid.iter().zip(&result.diagnostic).enumerate() {
        let cusp = result.cusp_candidates.contains(&i);
        table.push(vec![Cell::Real(v), Cell::Real(d), Cell::Int(i64::from(cusp))]);
    }
    Ok(table)
}

// ═══════════════════════════════════════════════════════════════════════
// kmap
// ═══════════════════════════════════════════════════════════════════════

/// Per-momentum overlap snapshot `|L_k(t_max)|^2` over a full zone grid,
/// in long form with momenta ascending lexicographically.
pub fn kmap(config: &RunConfig) -> Result<DataTable, RunError> {
    let model = bloch_model(config)?;
    let grid = config.require_grid()?;
    let time = config.require_time()?;
    check_momentum_dim(config, "grid.sizes", grid.sizes.len(), model.dim_k())?;

    let axes: Vec<Vec<f64>> = grid.sizes.iter().map(|&n| momentum_grid(n)).collect();
    let points = cartesian(&axes);
    let sampled: Result<Vec<(f64, bool)>, CoreError> = points
        .par_iter()
        .map(|k| {
            let series = lk_series(
                &model,
                k,
                config.delta,
                &[time.t_max],
                FillingRule::NegativeEnergy,
                &POLICY,
            )?;
            Ok((series.modulus_sq()[0], series.degenerate_filling))
        })
        .collect();
    let sampled = sampled?;

    let mut table = DataTable::new("kmap", &config.model);
    for name in k_names(model.dim_k()) {
        table = table.column(*name, "rad");
    }
    let mut table = table.column("lk2", "1");
    table.notes.push(format!("overlap snapshot at t = {}", time.t_max));
    let degenerate = sampled.iter().filter(|(_, d)| *d).count();
    if degenerate > 0 {
        table
            .notes
            .push(format!("{degenerate} momenta hit a degenerate Fermi level"));
    }
    for (k, (lk2, _)) in points.iter().zip(&sampled) {
        let row = k.iter().map(|&c| Cell::Real(c)).chain([Cell::Real(*lk2)]).collect();
        table.push(row);
    }
    Ok(table)
}

// ═══════════════════════════════════════════════════════════════════════
// path
// ═══════════════════════════════════════════════════════════════════════

/// Band energies and the overlap snapshot along a straight-segment
/// momentum path; vertex arclengths land in the header notes.
pub fn path(config: &RunConfig) -> Result<DataTable, RunError> {
    let model = bloch_model(config)?;
    let spec = config.require_path()?;
    let time = config.require_time()?;
    check_momentum_dim(config, "path.vertex", spec.vertex[0].k.len(), model.dim_k())?;

    let vertices: Vec<(&str, Vec<f64>)> = spec
        .vertex
        .iter()
        .map(|v| (v.label.as_str(), v.k.clone()))
        .collect();
    let scan = momentum_path_scan(
        &model,
        &vertices,
        spec.samples_per_segment,
        config.delta,
        time.t_max,
        &POLICY,
    )?;

    let n_bands = scan.bands[0].len();
    let mut table = DataTable::new("path", &config.model).column("s", "rad");
    for band in 0..n_bands {
        table = table.column(format!("band_{band}"), "t");
    }
    let mut table = table.column("lk2", "1").column("degenerate", "1");
    table.notes.push(format!("overlap snapshot at t = {}", time.t_max));
    for (label, s) in &scan.labels {
        table.notes.push(format!("vertex {label} at s = {s}"));
    }
    for (i, &s) in scan.arclength.iter().enumerate() {
        let mut row = Vec::with_capacity(n_bands + 3);
        row.push(Cell::Real(s));
        row.extend(scan.bands[i].iter().map(|&e| Cell::Real(e)));
        row.push(Cell::Real(scan.overlap_sq[i]));
        row.push(Cell::Int(i64::from(scan.degenerate[i])));
        table.push(row);
    }
    Ok(table)
}

// ═══════════════════════════════════════════════════════════════════════
// series
// ═══════════════════════════════════════════════════════════════════════

/// Decoherence factor against time: a single momentum sector, a
/// full-lattice momentum product, or a real-space finite system,
/// depending on the model and on whether `series.k` is given.
pub fn series(config: &RunConfig) -> Result<DataTable, RunError> {
    let time = config.require_time()?;
    let times = time.grid();
    let delta = config.delta;

    let (series, source) = match config.model.as_str() {
        "ssh" | "qwz" | "weyl" => {
            let model = bloch_model(config)?;
            if let Some(spec) = &config.series {
                check_momentum_dim(config, "series.k", spec.k.len(), model.dim_k())?;
                let s = lk_series(&model, &spec.k, delta, &times, FillingRule::NegativeEnergy, &POLICY)?;
                (s, format!("single momentum sector at k = {:?}", spec.k))
            } else {
                let grid = config.grid.as_ref().ok_or_else(|| {
                    ConfigError(
                        "field `grid` (or `series.k`): the series command needs a momentum grid for the full product or one fixed momentum".into(),
                    )
                })?;
                check_momentum_dim(config, "grid.sizes", grid.sizes.len(), model.dim_k())?;
                let s = product_series(&model, &grid.sizes, delta, &times, FillingRule::NegativeEnergy, &POLICY)?;
                (s, format!("momentum product over a {:?} grid", grid.sizes))
            }
        }
        "ssh-open" => {
            let grid = config.require_grid()?;
            if grid.sizes.len() != 1 {
                return config_err(format!(
                    "field `grid.sizes`: a chain has one axis [n_sites], got {:?}",
                    grid.sizes
                ));
            }
            let chain = ssh_open_chain(grid.sizes[0], config.require_param("phi")?)?;
            let s = realspace_series(&chain.h, &chain.coupling, delta, &times, FillingRule::NegativeEnergy, &POLICY)?;
            (s, format!("open chain of {} sites", grid.sizes[0]))
        }
        "qwz-strip" => {
            let grid = config.require_grid()?;
            let spec = config.series.as_ref().ok_or_else(|| {
                ConfigError("field `series.k`: a strip series needs the one transverse momentum of the slice".into())
            })?;
            if spec.k.len() != 1 {
                return config_err(format!(
                    "field `series.k`: a strip slice has one transverse momentum, got {}",
                    spec.k.len()
                ));
            }
            let strip = qwz_strip(grid.sizes[0], config.require_param("m")?, Boundary::Open)?;
            let h = strip.h_at(spec.k[0]);
            let s = realspace_series(&h, &strip.coupling, delta, &times, FillingRule::NegativeEnergy, &POLICY)?;
            (s, format!("strip of width {} at transverse k = {}", grid.sizes[0], spec.k[0]))
        }
        "km-ribbon" => {
            let grid = config.require_grid()?;
            let spec = config.series.as_ref().ok_or_else(|| {
                ConfigError("field `series.k`: a ribbon series needs the one transverse momentum of the slice".into())
            })?;
            if spec.k.len() != 1 {
                return config_err(format!(
                    "field `series.k`: a ribbon slice has one transverse momentum, got {}",
                    spec.k.len()
                ));
            }
            let ribbon = km_ribbon(
                grid.sizes[0],
                config.require_param("lambda_so")?,
                config.require_param("lambda_r")?,
                config.require_param("lambda_v")?,
            )?;
            let h = ribbon.h_at(spec.k[0]);
            // Half filling by state count: the slice spectrum is not
            // symmetric about zero once the staggered potential is on.
            let filling = FillingRule::LowestM(ribbon.dim / 2);
            let s = realspace_series(&h, &ribbon.coupling, delta, &times, filling, &POLICY)?;
            (s, format!("ribbon of width {} at transverse k = {}", grid.sizes[0], spec.k[0]))
        }
        other => unreachable!("model {other:?} passed validation"),
    };

    let mut table = DataTable::new("series", &config.model)
        .column("t", "1/t")
        .column("lk2", "1")
        .column("log10_lk2", "log10");
    table.notes.push(source);
    if series.degenerate_filling {
        table
            .notes
            .push("degenerate Fermi level: the filled set was fixed by deterministic tie-breaking".to_string());
    }
    let moduli = series.modulus_sq();
    let logs = series.log10_modulus_sq();
    for ((&t, &m2), &l10) in times.iter().zip(&moduli).zip(&logs) {
        table.push(vec![Cell::Real(t), Cell::Real(m2), Cell::Real(l10)]);
    }
    Ok(table)
}

// ═══════════════════════════════════════════════════════════════════════
// nodes
// ═══════════════════════════════════════════════════════════════════════

/// Locate direct-gap minima in the zone. All refined local minima are
/// reported; a gap indistinguishable from zero marks a band touching.
pub fn nodes(config: &RunConfig) -> Result<DataTable, RunError> {
    let model = bloch_model(config)?;
    let (coarse, rounds) = match &config.nodes {
        Some(spec) => (
            spec.coarse.clone().unwrap_or_else(|| vec![16; model.dim_k()]),
            spec.refine_rounds.unwrap_or(3),
        ),
        None => (vec![16; model.dim_k()], 3),
    };
    if coarse.len() != model.dim_k() {
        return config_err(format!(
            "field `nodes.coarse`: model {:?} has {} momentum axes, got {}",
            config.model,
            model.dim_k(),
            coarse.len()
        ));
    }
    let report = locate_nodes(&model, &coarse, rounds, &POLICY)?;

    let mut table = DataTable::new("nodes", &config.model);
    for name in k_names(model.dim_k()) {
        table = table.column(*name, "rad");
    }
    let mut table = table.column("gap", "t").column("degenerate", "1");
    table.notes.push(format!(
        "coarse grid {:?}, {} refinement rounds, final radius {}",
        coarse, rounds, report.refinement_radius
    ));
    table
        .notes
        .push("every refined direct-gap local minimum is listed; gap near zero marks a touching".to_string());
    for ((k, &gap), &flag) in report.momenta.iter().zip(&report.gaps).zip(&report.degenerate) {
        let mut row: Vec<Cell> = k.iter().map(|&c| Cell::Real(c)).collect();
        row.push(Cell::Real(gap));
        row.push(Cell::Int(i64::from(flag)));
        table.push(row);
    }
    Ok(table)
}

// ═══════════════════════════════════════════════════════════════════════
// topo
// ═══════════════════════════════════════════════════════════════════════

/// Quantized invariant of a two-band bulk model: the Berry phase of the
/// occupied band in one dimension, the Chern number in two.
pub fn topo(config: &RunConfig) -> Result<DataTable, RunError> {
    let (model, default_invariant) = match config.model.as_str() {
        "ssh" => (ssh_bloch(config.require_param("phi")?), "zak"),
        "qwz" => (qwz_bloch(config.require_param("m")?), "chern"),
        other => {
            return config_err(format!(
                "field `model`: invariants are defined for the two-band bulk models ssh and qwz, not {other:?}"
            ))
        }
    };
    warn_regime(&model);

    let spec = config.topo.as_ref();
    let invariant = spec
        .and_then(|t| t.invariant.as_deref())
        .unwrap_or(default_invariant);
    let n_k_override = spec.and_then(|t| t.n_k);

    let mut table = DataTable::new("topo", &config.model);
    match invariant {
        "zak" => {
            if model.dim_k != 1 {
                return config_err(format!(
                    "field `topo.invariant`: the Berry phase needs one momentum axis, model {:?} has {}",
                    config.model, model.dim_k
                ));
            }
            let n_k = n_k_override.unwrap_or(256);
            let value = zak_phase(&model, n_k, &POLICY)?;
            table = table
                .column("invariant", "1")
                .column("value", "rad")
                .column("n_k", "1");
            table.notes.push("value is the occupied-band Berry phase, snapped to its quantized value".to_string());
            table.push(vec![
                Cell::Text("zak".to_string()),
                Cell::Real(value),
                Cell::Int(n_k as i64),
            ]);
        }
        "chern" => {
            if model.dim_k != 2 {
                return config_err(format!(
                    "field `topo.invariant`: the Chern number needs two momentum axes, model {:?} has {}",
                    config.model, model.dim_k
                ));
            }
            let n_k = n_k_override.unwrap_or(40);
            let value = chern_number(&model, n_k, &POLICY)?;
            table = table
                .column("invariant", "1")
                .column("value", "1")
                .column("n_k", "1");
            table.push(vec![
                Cell::Text("chern".to_string()),
                Cell::Int(value),
                Cell::Int(n_k as i64),
            ]);
        }
        other => {
            return config_err(format!(
                "field `topo.invariant`: expected \"zak\" or \"chern\", got {other:?}"
            ))
        }
    }
    Ok(table)
}

// ═══════════════════════════════════════════════════════════════════════
// spectrum
// ═══════════════════════════════════════════════════════════════════════

/// Eigenvalue spectra: per-state localization for an open chain,
/// long-form transverse dispersion for strips and ribbons, and long-form
/// bands along a path for bulk models.
pub fn spectrum(config: &RunConfig) -> Result<DataTable, RunError> {
    match config.model.as_str() {
        "ssh-open" => {
            let grid = config.require_grid()?;
            if grid.sizes.len() != 1 {
                return config_err(format!(
                    "field `grid.sizes`: a chain has one axis [n_sites], got {:?}",
                    grid.sizes
                ));
            }
            let chain = ssh_open_chain(grid.sizes[0], config.require_param("phi")?)?;
            let states = eig_hermitian(&chain.h, &POLICY)?;
            let profiles = edge_localization(&states, &chain.geometry)?;
            let mut table = DataTable::new("spectrum", &config.model)
                .column("index", "1")
                .column("energy", "t")
                .column("ipr", "1")
                .column("edge_weight", "1");
            table
                .notes
                .push(format!("open chain of {} sites, eigenstates ascending in energy", grid.sizes[0]));
            for (i, (&e, profile)) in states.values.iter().zip(&profiles).enumerate() {
                table.push(vec![
                    Cell::Int(i as i64),
                    Cell::Real(e),
                    Cell::Real(profile.ipr),
                    Cell::Real(profile.edge_weight()),
                ]);
            }
            Ok(table)
        }
        "qwz-strip" | "km-ribbon" => {
            let grid = config.require_grid()?;
            if grid.sizes.len() != 2 {
                return config_err(format!(
                    "field `grid.sizes`: a strip spectrum needs [width, transverse_samples], got {:?}",
                    grid.sizes
                ));
            }
            let (width, n_k) = (grid.sizes[0], grid.sizes[1]);
            let ribbon = if config.model == "qwz-strip" {
                qwz_strip(width, config.require_param("m")?, Boundary::Open)?
            } else {
                km_ribbon(
                    width,
                    config.require_param("lambda_so")?,
                    config.require_param("lambda_r")?,
                    config.require_param("lambda_v")?,
                )?
            };
            let momenta = momentum_grid(n_k);
            let spectra: Result<Vec<Vec<f64>>, CoreError> = momenta
                .par_iter()
                .map(|&k| Ok(eig_hermitian(&ribbon.h_at(k), &POLICY)?.values))
                .collect();
            let spectra = spectra?;

            let mut table = DataTable::new("spectrum", &config.model)
                .column("k", "rad")
                .column("band", "1")
                .column("energy", "t");
            table.notes.push(format!(
                "strip of width {width} ({} states per transverse momentum)",
                ribbon.dim
            ));
            for (&k, values) in momenta.iter().zip(&spectra) {
                for (band, &e) in values.iter().enumerate() {
                    table.push(vec![Cell::Real(k), Cell::Int(band as i64), Cell::Real(e)]);
                }
            }
            Ok(table)
        }
        "ssh" | "qwz" | "weyl" => {
            let model = bloch_model(config)?;
            let spec = config.require_path()?;
            check_momentum_dim(config, "path.vertex", spec.vertex[0].k.len(), model.dim_k())?;
            let vertices: Vec<(&str, Vec<f64>)> = spec
                .vertex
                .iter()
                .map(|v| (v.label.as_str(), v.k.clone()))
                .collect();
            // The band structure does not involve time; t only feeds the
            // overlap column of the scan, which this command discards.
            let t = config.time.as_ref().map_or(0.0, |t| t.t_max);
            let scan = momentum_path_scan(
                &model,
                &vertices,
                spec.samples_per_segment,
                config.delta,
                t,
                &POLICY,
            )?;
            let n_bands = scan.bands[0].len();

            let mut table = DataTable::new("spectrum", &config.model)
                .column("s", "rad")
                .column("band", "1")
                .column("energy", "t");
            for (label, s) in &scan.labels {
                table.notes.push(format!("vertex {label} at s = {s}"));
            }
            for (i, &s) in scan.arclength.iter().enumerate() {
                for band in 0..n_bands {
                    table.push(vec![
                        Cell::Real(s),
                        Cell::Int(band as i64),
                        Cell::Real(scan.bands[i][band]),
                    ]);
                }
            }
            Ok(table)
        }
        other => unreachable!("model {other:?} passed validation"),
    }
}
