//! Degeneracy diagnostics distilled from decoherence data and spectra.
//!
//! The measurement chain is always: build a model, accumulate its
//! decoherence factor, then reduce the result to something a phase diagram
//! can be read from.
//!
//! * [`sweep_parameter`] scans a model family and flags discrete-curvature
//!   spikes of the chosen diagnostic; the spikes sit at gap closings.
//! * [`locate_nodes`] finds local minima of the direct band gap on a
//!   momentum grid and sharpens them by local subdivision.
//! * [`momentum_path_scan`] walks a piecewise-linear momentum path and
//!   reports band energies next to the per-momentum overlap.
//! * [`zak_phase`] and [`chern_number`] are the quantized invariants of the
//!   two-band models, used to cross-check the decoherence diagnostics.
//! * [`edge_localization`] measures how strongly eigenstates of an open
//!   geometry cling to its ends.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::decoherence::{lk_series, product_series, FillingRule};
use crate::models::{momentum_grid, BlochModel, FourVector, SiteTag, TwoBandBloch};
use crate::numkit::{cx, eig_hermitian, EigenSystem, NumericPolicy};
use crate::{Error, Result};

// ═══════════════════════════════════════════════════════════════════════
// Parameter sweeps with cusp detection
// ═══════════════════════════════════════════════════════════════════════

/// How a whole decoherence series is reduced to one number per swept
/// parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDiagnostic {
    /// Deepest excursion `min_t |L(t)|^2` over the time grid.
    MinModulusSq,
    /// `log10 |L(t_j)|^2` at the given index into the time grid.
    SnapshotLog10(usize),
}

/// One diagnostic value per parameter value, plus the indices where the
/// diagnostic has a curvature spike (a kink marking a gap closing).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub parameter: &'static str,
    pub grid: Vec<f64>,
    pub diagnostic: Vec<f64>,
    pub cusp_candidates: Vec<usize>,
}

/// Scan a one-parameter family of Bloch models: for every value in `values`
/// the full-lattice decoherence factor is accumulated over `momentum` and
/// reduced by `diagnostic`. Cusp candidates are the indices where the
/// diagnostic (log-compressed for the min-modulus variant) has an upward
/// curvature spike well above the sweep's median curvature, the signature
/// of a coherence collapse at a gap closing. Parameter points run in
/// parallel; the output order and every value are independent of the
/// thread count.
#[allow(clippy::too_many_arguments)]
pub fn sweep_parameter<F>(
    parameter: &'static str,
    values: &[f64],
    family: F,
    momentum: &[usize],
    delta: f64,
    times: &[f64],
    diagnostic: SweepDiagnostic,
    policy: &NumericPolicy,
) -> Result<ScanResult>
where
    F: Fn(f64) -> BlochModel + Sync,
{
    if values.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "a sweep needs at least 5 parameter values to resolve curvature, got {}",
            values.len()
        )));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "sweep values must be strictly ascending".into(),
        ));
    }
    if times.is_empty() {
        return Err(Error::InvalidParameter("sweep needs a non-empty time grid".into()));
    }
    if let SweepDiagnostic::SnapshotLog10(idx) = diagnostic {
        if idx >= times.len() {
            return Err(Error::InvalidParameter(format!(
                "snapshot index {idx} outside the time grid of length {}",
                times.len()
            )));
        }
    }

    let reduced: Vec<f64> = values
        .par_iter()
        .map(|&value| -> Result<f64> {
            let model = family(value);
            let series =
                product_series(&model, momentum, delta, times, FillingRule::NegativeEnergy, policy)?;
            Ok(match diagnostic {
                SweepDiagnostic::MinModulusSq => series
                    .modulus_sq()
                    .into_iter()
                    .fold(f64::INFINITY, f64::min),
                SweepDiagnostic::SnapshotLog10(idx) => series.log10_modulus_sq()[idx],
            })
        })
        .collect::<Result<_>>()?;

    // The curvature test runs on a log-compressed copy of the min-modulus
    // diagnostic: the full-lattice factor is a product over momenta, so its
    // collapse at a gap closing spans decades, and the log is the scale on
    // which that collapse is a sharp V against a quiet background. The
    // snapshot diagnostic is already a log.
    let signal: Vec<f64> = match diagnostic {
        SweepDiagnostic::MinModulusSq => reduced
            .iter()
            .map(|&v| v.max(f64::MIN_POSITIVE).log10())
            .collect(),
        SweepDiagnostic::SnapshotLog10(_) => reduced.clone(),
    };
    let cusps = cusp_candidates(&signal, policy.cusp_chi);
    Ok(ScanResult {
        parameter,
        grid: values.to_vec(),
        diagnostic: reduced,
        cusp_candidates: cusps,
    })
}

/// Interior indices where the signed second central difference of the
/// detection signal rises above `chi` times the median absolute curvature.
/// Only upward spikes count: a coherence collapse bends the signal into a
/// V whose bottom has large positive curvature, while the benign kinks of
/// a min-over-window envelope (the global argmin hopping between two local
/// minima as the parameter moves) bend the curve the other way, as do the
/// shoulders flanking a genuine V. A spike contaminates the second
/// difference at its immediate neighbors, so flagged indices closer than
/// three grid steps merge into one candidate at the strongest spike. The
/// absolute floor keeps a flat (or numerically flat) signal from flagging
/// its own rounding noise.
fn cusp_candidates(signal: &[f64], chi: f64) -> Vec<usize> {
    let n = signal.len();
    if n < 3 {
        return Vec::new();
    }
    let d2: Vec<f64> = (1..n - 1)
        .map(|i| signal[i + 1] - 2.0 * signal[i] + signal[i - 1])
        .collect();

    let mut sorted: Vec<f64> = d2.iter().map(|v| v.abs()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite curvature"));
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    let scale = signal.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let threshold = (chi * median).max(1e-12 * scale);

    let mut out = Vec::new();
    let mut cluster: Option<(usize, usize)> = None; // (argmax j, last j)
    for (j, &v) in d2.iter().enumerate() {
        if v <= threshold {
            continue;
        }
        cluster = Some(match cluster {
            Some((best, last)) if j - last <= 2 => {
                (if d2[best] >= v { best } else { j }, j)
            }
            Some((best, _)) => {
                out.push(best + 1);
                (j, j)
            }
            None => (j, j),
        });
    }
    if let Some((best, _)) = cluster {
        out.push(best + 1);
    }
    out
}

// ═══════════════════════════════════════════════════════════════════════
// Gap-closing location
// ═══════════════════════════════════════════════════════════════════════

/// Local minima of the direct band gap, each refined by local subdivision.
/// Momenta are reported in `(-pi, pi]` per component, sorted
/// lexicographically; `degenerate[i]` is set when `gaps[i]` fell below the
/// node tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeReport {
    pub momenta: Vec<Vec<f64>>,
    pub gaps: Vec<f64>,
    pub degenerate: Vec<bool>,
    pub refinement_radius: f64,
}

/// Search the zone for direct-gap minima: evaluate the gap on the coarse
/// grid, keep local minima under periodic neighbor comparison, then refine
/// each by `refine_rounds` rounds of 5x subdivision (an 11-point stencil
/// per axis covering one coarse cell, re-centered on its argmin). The
/// reported gap never exceeds the coarse one because the incumbent stays in
/// every stencil.
pub fn locate_nodes(
    model: &BlochModel,
    coarse: &[usize],
    refine_rounds: usize,
    policy: &NumericPolicy,
) -> Result<NodeReport> {
    let dim_k = model.dim_k();
    if coarse.len() != dim_k {
        return Err(Error::DimensionMismatch {
            context: "coarse grid axes",
            expected: dim_k,
            got: coarse.len(),
        });
    }
    if coarse.iter().any(|&n| n < 8) {
        return Err(Error::InvalidParameter(format!(
            "node search needs at least 8 points per axis, got {coarse:?}"
        )));
    }

    let axes: Vec<Vec<f64>> = coarse.iter().map(|&n| momentum_grid(n)).collect();
    let spacing: Vec<f64> = coarse.iter().map(|&n| 2.0 * PI / n as f64).collect();
    // duplicates closer than half a coarse cell on the torus are one node
    let merge_tol: Vec<f64> = spacing.iter().map(|h| 0.5 * h).collect();
    let total: usize = coarse.iter().product();

    let unflatten = |flat: usize| -> Vec<usize> {
        let mut rem = flat;
        let mut idx = vec![0usize; dim_k];
        for a in (0..dim_k).rev() {
            idx[a] = rem % coarse[a];
            rem /= coarse[a];
        }
        idx
    };
    let flatten = |idx: &[usize]| -> usize {
        idx.iter()
            .zip(coarse)
            .fold(0usize, |acc, (i, n)| acc * n + i)
    };
    let k_of = |idx: &[usize]| -> Vec<f64> {
        idx.iter().zip(&axes).map(|(&i, axis)| axis[i]).collect()
    };

    let gaps: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| direct_gap(model, &k_of(&unflatten(flat)), policy))
        .collect::<Result<_>>()?;

    // non-strict comparison keeps exact ties; the merge pass below collapses
    // any plateau to a single representative
    let mut candidates: Vec<(Vec<f64>, f64)> = Vec::new();
    for flat in 0..total {
        let idx = unflatten(flat);
        let g = gaps[flat];
        let is_minimum = (0..dim_k).all(|a| {
            let mut up = idx.clone();
            up[a] = (idx[a] + 1) % coarse[a];
            let mut dn = idx.clone();
            dn[a] = (idx[a] + coarse[a] - 1) % coarse[a];
            g <= gaps[flatten(&up)] && g <= gaps[flatten(&dn)]
        });
        if is_minimum {
            candidates.push((k_of(&idx), g));
        }
    }
    candidates.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .expect("finite gaps")
            .then_with(|| lex_cmp(&a.0, &b.0))
    });
    let seeds = merge_near_duplicates(candidates, &merge_tol);

    let refined: Vec<(Vec<f64>, f64)> = seeds
        .par_iter()
        .map(|(k0, g0)| -> Result<(Vec<f64>, f64)> {
            let mut center = k0.clone();
            let mut best_gap = *g0;
            let mut cell = spacing.clone();
            for _ in 0..refine_rounds {
                let step: Vec<f64> = cell.iter().map(|h| h / 5.0).collect();
                let stencil = 11usize.pow(dim_k as u32);
                let mut best = (center.clone(), best_gap);
                for s in 0..stencil {
                    let mut rem = s;
                    let mut k = vec![0.0; dim_k];
                    for a in (0..dim_k).rev() {
                        let off = (rem % 11) as i64 - 5;
                        rem /= 11;
                        k[a] = center[a] + off as f64 * step[a];
                    }
                    let g = direct_gap(model, &k, policy)?;
                    if g < best.1 {
                        best = (k, g);
                    }
                }
                center = best.0;
                best_gap = best.1;
                cell = step;
            }
            Ok((center, best_gap))
        })
        .collect::<Result<_>>()?;

    let mut nodes: Vec<(Vec<f64>, f64)> = refined
        .into_iter()
        .map(|(k, g)| (k.into_iter().map(principal_momentum).collect(), g))
        .collect();
    nodes.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .expect("finite gaps")
            .then_with(|| lex_cmp(&a.0, &b.0))
    });
    let mut nodes = merge_near_duplicates(nodes, &merge_tol);
    nodes.sort_by(|a, b| lex_cmp(&a.0, &b.0));

    let refinement_radius = spacing
        .iter()
        .map(|h| h / 5f64.powi(refine_rounds as i32))
        .fold(0.0f64, f64::max);
    let (momenta, gaps): (Vec<_>, Vec<_>) = nodes.into_iter().unzip();
    let degenerate = gaps.iter().map(|g| *g < policy.node_gap_tol).collect();
    Ok(NodeReport {
        momenta,
        gaps,
        degenerate,
        refinement_radius,
    })
}

/// Direct gap at `k`: distance between the highest filled and lowest empty
/// band at half filling.
fn direct_gap(model: &BlochModel, k: &[f64], policy: &NumericPolicy) -> Result<f64> {
    match model {
        BlochModel::TwoBand(tb) => Ok(2.0 * tb.r_at(k).magnitude()),
        BlochModel::MultiBand(mb) => {
            let es = eig_hermitian(&mb.h_at(k), policy)?;
            let m = mb.dim / 2;
            Ok(es.values[m] - es.values[m - 1])
        }
    }
}

/// Fold a momentum component into `(-pi, pi]`.
fn principal_momentum(k: f64) -> f64 {
    let p = k.rem_euclid(2.0 * PI);
    if p > PI + 1e-9 {
        p - 2.0 * PI
    } else {
        p
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("finite momenta") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Greedily keep entries whose torus distance to every kept entry exceeds
/// the per-axis tolerance on at least one axis; input order decides which
/// duplicate survives, so callers sort best-first beforehand.
fn merge_near_duplicates(entries: Vec<(Vec<f64>, f64)>, tol: &[f64]) -> Vec<(Vec<f64>, f64)> {
    let mut kept: Vec<(Vec<f64>, f64)> = Vec::new();
    'outer: for entry in entries {
        for prior in &kept {
            let same = entry.0.iter().zip(&prior.0).zip(tol).all(|((&x, &y), &t)| {
                let d = (x - y).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d) <= t
            });
            if same {
                continue 'outer;
            }
        }
        kept.push(entry);
    }
    kept
}

// ═══════════════════════════════════════════════════════════════════════
// Momentum-path scans
// ═══════════════════════════════════════════════════════════════════════

/// Band energies and per-momentum overlap along a piecewise-linear path,
/// indexed by arclength. `labels` holds the vertex names at their arclength
/// positions; `degenerate[i]` marks samples whose Fermi-level filling was
/// ambiguous (a touching at the Fermi surface).
#[derive(Debug, Clone, PartialEq)]
pub struct PathScan {
    pub arclength: Vec<f64>,
    pub bands: Vec<Vec<f64>>,
    pub overlap_sq: Vec<f64>,
    pub degenerate: Vec<bool>,
    pub labels: Vec<(String, f64)>,
}

/// Sample `|L_k(t)|^2` and the band energies along the path through the
/// given vertices, with `samples_per_segment` equal steps per segment
/// (segment endpoints are shared, so the scan has
/// `1 + segments * samples_per_segment` samples).
pub fn momentum_path_scan(
    model: &BlochModel,
    path: &[(&str, Vec<f64>)],
    samples_per_segment: usize,
    delta: f64,
    t: f64,
    policy: &NumericPolicy,
) -> Result<PathScan> {
    let dim_k = model.dim_k();
    if path.len() < 2 {
        return Err(Error::InvalidParameter(
            "a momentum path needs at least two vertices".into(),
        ));
    }
    if samples_per_segment == 0 {
        return Err(Error::InvalidParameter(
            "a momentum path needs at least one sample per segment".into(),
        ));
    }
    for (name, vertex) in path {
        if vertex.len() != dim_k {
            return Err(Error::DimensionMismatch {
                context: "path vertex components",
                expected: dim_k,
                got: vertex.len(),
            });
        }
        if vertex.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "path vertex {name} has non-finite components"
            )));
        }
    }

    let mut samples: Vec<Vec<f64>> = vec![path[0].1.clone()];
    let mut arclength = vec![0.0f64];
    let mut labels = vec![(path[0].0.to_string(), 0.0f64)];
    for pair in path.windows(2) {
        let (a, b) = (&pair[0].1, &pair[1].1);
        let seg_len = a
            .iter()
            .zip(b)
            .map(|(x, y)| (y - x).powi(2))
            .sum::<f64>()
            .sqrt();
        let base = *arclength.last().expect("non-empty");
        for i in 1..=samples_per_segment {
            let frac = i as f64 / samples_per_segment as f64;
            let k: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + frac * (y - x)).collect();
            samples.push(k);
            arclength.push(base + frac * seg_len);
        }
        labels.push((pair[1].0.to_string(), base + seg_len));
    }

    let scanned: Vec<(Vec<f64>, f64, bool)> = samples
        .par_iter()
        .map(|k| -> Result<(Vec<f64>, f64, bool)> {
            let es = eig_hermitian(&model.h_at(k), policy)?;
            let series = lk_series(model, k, delta, &[t], FillingRule::NegativeEnergy, policy)?;
            let overlap = series.modulus_sq()[0];
            Ok((es.values, overlap, series.degenerate_filling))
        })
        .collect::<Result<_>>()?;

    let mut bands = Vec::with_capacity(scanned.len());
    let mut overlap_sq = Vec::with_capacity(scanned.len());
    let mut degenerate = Vec::with_capacity(scanned.len());
    for (b, o, d) in scanned {
        bands.push(b);
        overlap_sq.push(o);
        degenerate.push(d);
    }
    Ok(PathScan {
        arclength,
        bands,
        overlap_sq,
        degenerate,
        labels,
    })
}

// ═══════════════════════════════════════════════════════════════════════
// Quantized invariants of the two-band models
// ═══════════════════════════════════════════════════════════════════════

/// Normalized lower-band spinor of `r . sigma`. The two closed forms each
/// lose their normalization at one pole of the Bloch sphere, so the branch
/// is picked by the sign of `rz`; any per-point branch choice is a gauge
/// and cancels from the link products below.
fn lower_eigenvector(r: &FourVector) -> [Complex64; 2] {
    let rr = r.magnitude();
    debug_assert!(rr > 0.0, "callers guard the gapless case");
    let (a, b) = if r.rz >= 0.0 {
        (cx(-r.rx, r.ry), cx(r.rz + rr, 0.0))
    } else {
        (cx(r.rz - rr, 0.0), cx(r.rx, r.ry))
    };
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / norm, b / norm]
}

fn spinor_overlap(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Berry phase of the lower band around the one-dimensional zone, from the
/// discrete link product, snapped to `{0, pi}` when within the policy's
/// snap window. Use [`zak_phase_raw`] for the unsnapped value.
pub fn zak_phase(model: &TwoBandBloch, n_k: usize, policy: &NumericPolicy) -> Result<f64> {
    let raw = zak_phase_raw(model, n_k, policy)?;
    let w = policy.zak_snap_window;
    if (raw - PI).abs() <= w {
        Ok(PI)
    } else if raw <= w || raw >= 2.0 * PI - w {
        Ok(0.0)
    } else {
        Ok(raw)
    }
}

/// Unsnapped discrete Berry phase `-arg prod_j <u(k_j)|u(k_{j+1})>` with
/// wrap-around, reduced into `[0, 2 pi)`. Gauge invariant: every spinor
/// enters once as a bra and once as a ket, so per-point phases cancel.
pub fn zak_phase_raw(model: &TwoBandBloch, n_k: usize, policy: &NumericPolicy) -> Result<f64> {
    if model.dim_k != 1 {
        return Err(Error::DimensionMismatch {
            context: "Berry-phase momentum axes",
            expected: 1,
            got: model.dim_k,
        });
    }
    if n_k < 32 {
        return Err(Error::InvalidParameter(format!(
            "Berry phase needs at least 32 momentum points, got {n_k}"
        )));
    }
    let ks = momentum_grid(n_k);
    let spinors: Vec<[Complex64; 2]> = ks
        .iter()
        .map(|&k| {
            let r = model.r_at(&[k]);
            if r.magnitude() <= policy.gap_floor {
                return Err(Error::GaplessPoint {
                    k: vec![k],
                    gap: r.magnitude(),
                    floor: policy.gap_floor,
                });
            }
            Ok(lower_eigenvector(&r))
        })
        .collect::<Result<_>>()?;

    let mut product = cx(1.0, 0.0);
    for j in 0..n_k {
        let link = spinor_overlap(&spinors[j], &spinors[(j + 1) % n_k]);
        let norm = link.norm();
        if norm < 1e-12 {
            return Err(Error::InvalidParameter(
                "vanishing link overlap: the momentum grid is too coarse for this model".into(),
            ));
        }
        product *= link / norm;
    }
    Ok((-product.arg()).rem_euclid(2.0 * PI))
}

/// Integer topological charge of the lower band on the two-dimensional
/// zone, from plaquette link phases. The plaquette loop is traversed in the
/// orientation for which the checkerboard model reports `-1` on its
/// `-2 < M < 0` side, matching the published phase diagram of that model;
/// the opposite traversal is an equally valid global sign convention.
pub fn chern_number(model: &TwoBandBloch, n_k: usize, policy: &NumericPolicy) -> Result<i64> {
    if model.dim_k != 2 {
        return Err(Error::DimensionMismatch {
            context: "Chern-number momentum axes",
            expected: 2,
            got: model.dim_k,
        });
    }
    if n_k < 20 {
        return Err(Error::InvalidParameter(format!(
            "Chern number needs at least 20 momentum points per axis, got {n_k}"
        )));
    }
    let ks = momentum_grid(n_k);
    let mut spinors: Vec<Vec<[Complex64; 2]>> = Vec::with_capacity(n_k);
    for &kx in &ks {
        let mut row = Vec::with_capacity(n_k);
        for &ky in &ks {
            let r = model.r_at(&[kx, ky]);
            if r.magnitude() <= policy.gap_floor {
                return Err(Error::GaplessPoint {
                    k: vec![kx, ky],
                    gap: r.magnitude(),
                    floor: policy.gap_floor,
                });
            }
            row.push(lower_eigenvector(&r));
        }
        spinors.push(row);
    }

    let mut total = 0.0f64;
    for j in 0..n_k {
        for l in 0..n_k {
            let jp = (j + 1) % n_k;
            let lp = (l + 1) % n_k;
            let ux = spinor_overlap(&spinors[j][l], &spinors[jp][l]);
            let uy_shift = spinor_overlap(&spinors[jp][l], &spinors[jp][lp]);
            let ux_shift = spinor_overlap(&spinors[j][lp], &spinors[jp][lp]);
            let uy = spinor_overlap(&spinors[j][l], &spinors[j][lp]);
            let plaquette = ux * uy_shift * ux_shift.conj() * uy.conj();
            if plaquette.norm() < 1e-24 {
                return Err(Error::InvalidParameter(
                    "vanishing plaquette product: the momentum grid is too coarse".into(),
                ));
            }
            total += plaquette.arg();
        }
    }

    let charge = -total / (2.0 * PI);
    let rounded = charge.round();
    let residue = (charge - rounded).abs();
    if residue >= policy.chern_residue_tol {
        return Err(Error::ChernResidue {
            residue,
            tol: policy.chern_residue_tol,
        });
    }
    Ok(rounded as i64)
}

// ═══════════════════════════════════════════════════════════════════════
// Edge localization
// ═══════════════════════════════════════════════════════════════════════

/// Localization measures of one eigenstate on an open geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeProfile {
    /// Inverse participation ratio `sum_i |psi_i|^4`: `1/n` for a uniform
    /// state, `1` for a state on a single site.
    pub ipr: f64,
    /// Weight within 10% of the x-span from the left end.
    pub left_weight: f64,
    /// Weight within 10% of the x-span from the right end.
    pub right_weight: f64,
}

impl EdgeProfile {
    /// Combined weight in both edge regions. A hybridized pair of end
    /// states splits evenly between the ends, so the combined weight is the
    /// robust localization signal.
    pub fn edge_weight(&self) -> f64 {
        self.left_weight + self.right_weight
    }
}

/// Per-state inverse participation ratio and edge weights for an
/// eigensystem over the given geometry (one tag per matrix index; spin or
/// orbital copies of a site simply repeat the coordinates).
pub fn edge_localization(states: &EigenSystem, geometry: &[SiteTag]) -> Result<Vec<EdgeProfile>> {
    let n = states.vectors.nrows();
    if geometry.len() != n {
        return Err(Error::DimensionMismatch {
            context: "geometry tags",
            expected: n,
            got: geometry.len(),
        });
    }
    let x_min = geometry.iter().map(|t| t.x).fold(f64::INFINITY, f64::min);
    let x_max = geometry.iter().map(|t| t.x).fold(f64::NEG_INFINITY, f64::max);
    let span = x_max - x_min;
    if !(span > 0.0) {
        return Err(Error::InvalidParameter(
            "geometry does not extend along x, so edge regions are undefined".into(),
        ));
    }
    let left_cut = x_min + 0.1 * span;
    let right_cut = x_max - 0.1 * span;

    let mut profiles = Vec::with_capacity(states.vectors.ncols());
    for j in 0..states.vectors.ncols() {
        let mut total = 0.0f64;
        let mut quartic = 0.0f64;
        let mut left = 0.0f64;
        let mut right = 0.0f64;
        for (i, tag) in geometry.iter().enumerate() {
            let w = states.vectors[[i, j]].norm_sqr();
            total += w;
            quartic += w * w;
            if tag.x <= left_cut {
                left += w;
            }
            if tag.x >= right_cut {
                right += w;
            }
        }
        profiles.push(EdgeProfile {
            ipr: quartic / (total * total),
            left_weight: left / total,
            right_weight: right / total,
        });
    }
    Ok(profiles)
}

// ═══════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════
