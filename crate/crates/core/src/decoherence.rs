//! Decoherence-factor engines.
//!
//! A probe qubit couples diagonally to a free-fermion bath: switching the
//! qubit state shifts the bath Hamiltonian from `h` to `h + delta * v`. The
//! overlap `L(t) = <g| exp(-i (h + delta v) t) |g>` between the shifted
//! evolution and the original Fermi sea `|g>` controls how fast the qubit
//! loses phase coherence, and its collapses expose band degeneracies of `h`.
//!
//! Three evaluation strategies, all agreeing where their domains overlap:
//!
//! * [`lk_closed_form`]: analytic expression for one traceless two-band
//!   momentum sector, valid strictly away from a band degeneracy;
//! * [`lk_exact`] / [`realspace_series`]: determinant engine
//!   `det(Phi^H U'(t) Phi)` over the occupied-orbital matrix `Phi`, valid
//!   for any Hermitian pair and any filling;
//! * [`product_series`]: Brillouin-zone product over momentum sectors,
//!   accumulated in the log domain (base 10) in a fixed ascending-momentum
//!   order so huge suppressions neither underflow nor depend on the thread
//!   schedule.
//!
//! The identity component of a two-band sector contributes only the global
//! phase `exp(-i r0 t)`; it is tracked in the product phase and excluded
//! from every modulus output.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::models::{momentum_grid, BlochModel, FourVector, TwoBandBloch};
use crate::numkit::{
    adjoint_times, check_hermitian, cx, det_complex, eig_hermitian, CMatrix, NumericPolicy,
};
use crate::{Error, Result};

/// Momenta are dispatched to worker threads in fixed-size runs; partial sums
/// are folded back in run order, so the result is bit-identical for every
/// thread count.
const PAR_CHUNK: usize = 64;

/// Slack allowed on `log10 |L|^2 <= 0` for product series, absorbing the
/// rounding of many per-momentum factors that each sit within 1e-12 of the
/// unit disk.
const PRODUCT_LOG_SLACK: f64 = 1e-8;

// ═══════════════════════════════════════════════════════════════════════════
// Series container
// ═══════════════════════════════════════════════════════════════════════════

/// What a [`DecoherenceSeries`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// One momentum sector of a Bloch model.
    PerMomentum,
    /// Product over a full momentum grid, stored in the log domain.
    Product,
    /// Many-body overlap of an open or periodic real-space system.
    Realspace,
}

/// Time-series payload. Products are kept as `log10 |L|^2` plus an
/// accumulated phase because the raw modulus underflows already for modest
/// grids; everything else stores the complex overlap directly.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesValues {
    Complex(Vec<Complex64>),
    LogProduct {
        log10_mag_sq: Vec<f64>,
        /// Sum of per-sector principal arguments minus the global-phase
        /// contribution of the identity component; not unwrapped in time.
        phase: Vec<f64>,
    },
}

/// Decoherence factor sampled on an ascending time grid.
#[derive(Debug, Clone)]
pub struct DecoherenceSeries {
    pub kind: SeriesKind,
    pub times: Vec<f64>,
    pub values: SeriesValues,
    /// True when a filling ambiguity at the Fermi level was resolved by
    /// policy anywhere in the computation.
    pub degenerate_filling: bool,
}

impl DecoherenceSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `|L(t)|^2` per time, leaving the log domain when necessary.
    pub fn modulus_sq(&self) -> Vec<f64> {
        match &self.values {
            SeriesValues::Complex(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            SeriesValues::LogProduct { log10_mag_sq, .. } => {
                log10_mag_sq.iter().map(|x| 10f64.powf(*x)).collect()
            }
        }
    }

    /// `log10 |L(t)|^2` per time, floored at the smallest positive f64.
    pub fn log10_modulus_sq(&self) -> Vec<f64> {
        match &self.values {
            SeriesValues::Complex(v) => v
                .iter()
                .map(|z| z.norm_sqr().max(f64::MIN_POSITIVE).log10())
                .collect(),
            SeriesValues::LogProduct { log10_mag_sq, .. } => log10_mag_sq.clone(),
        }
    }

    /// Enforce the container invariants: matching lengths, finite strictly
    /// ascending times, overlaps inside the unit disk (within slack), and
    /// the exact value 1 at `t = 0`.
    pub fn validate(&self, policy: &NumericPolicy) -> Result<()> {
        validate_times(&self.times)?;
        let expected = self.times.len();
        match &self.values {
            SeriesValues::Complex(values) => {
                if values.len() != expected {
                    return Err(Error::DimensionMismatch {
                        context: "series values",
                        expected,
                        got: values.len(),
                    });
                }
                for (z, t) in values.iter().zip(&self.times) {
                    if !z.re.is_finite() || !z.im.is_finite() {
                        return Err(Error::NonFinite);
                    }
                    let norm = z.norm();
                    if norm > 1.0 + policy.modulus_slack {
                        return Err(Error::InvalidParameter(format!(
                            "overlap modulus {norm} at t={t} exceeds 1"
                        )));
                    }
                    if *t == 0.0 && (z - cx(1.0, 0.0)).norm() > policy.time_zero_tol {
                        return Err(Error::InvalidParameter(format!(
                            "overlap at t=0 must be 1, got {z}"
                        )));
                    }
                }
            }
            SeriesValues::LogProduct {
                log10_mag_sq,
                phase,
            } => {
                for (name, arr) in [("log magnitude", log10_mag_sq), ("phase", phase)] {
                    if arr.len() != expected {
                        return Err(Error::DimensionMismatch {
                            context: "series values",
                            expected,
                            got: arr.len(),
                        });
                    }
                    if arr.iter().any(|x| !x.is_finite()) {
                        let _ = name;
                        return Err(Error::NonFinite);
                    }
                }
                for (x, t) in log10_mag_sq.iter().zip(&self.times) {
                    if *x > PRODUCT_LOG_SLACK {
                        return Err(Error::InvalidParameter(format!(
                            "product log10 |L|^2 = {x} at t={t} exceeds 0"
                        )));
                    }
                    if *t == 0.0 && x.abs() > 1e-9 {
                        return Err(Error::InvalidParameter(format!(
                            "product at t=0 must be 1, got log10 |L|^2 = {x}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite);
    }
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(format!(
                "times must be strictly ascending, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Uniform time grid 0..=20 in 400 steps, the default observation window.
pub fn default_time_grid() -> Vec<f64> {
    (0..=400).map(|i| 20.0 * i as f64 / 400.0).collect()
}

// ═══════════════════════════════════════════════════════════════════════════
// Filling
// ═══════════════════════════════════════════════════════════════════════════

/// How the Fermi sea is selected from a sorted single-particle spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillingRule {
    /// Fill every strictly negative level. Levels within the zero-mode
    /// window around E = 0 are then filled in ascending index order until
    /// half filling is reached; exercising that tie-break marks the result
    /// as degenerate.
    NegativeEnergy,
    /// Fill the given number of lowest levels.
    LowestM(usize),
}

/// Occupied-orbital choice together with an ambiguity flag.
#[derive(Debug, Clone)]
pub struct FillingSelection {
    /// Indices into the ascending spectrum; always a prefix `0..m`.
    pub indices: Vec<usize>,
    /// True when the highest occupied and lowest empty level coincide
    /// within the zero-mode window, so the Fermi sea was fixed by the
    /// ascending-index convention rather than by the spectrum.
    pub degenerate: bool,
}

/// Apply a [`FillingRule`] to an ascending spectrum.
pub fn select_filling(
    energies: &[f64],
    rule: FillingRule,
    policy: &NumericPolicy,
) -> Result<FillingSelection> {
    debug_assert!(
        energies.windows(2).all(|w| w[0] <= w[1]),
        "spectrum must be sorted ascending"
    );
    let n = energies.len();
    let tol = policy.zero_mode_tol;
    let m = match rule {
        FillingRule::LowestM(m) => {
            if m > n {
                return Err(Error::InvalidParameter(format!(
                    "cannot fill {m} of {n} orbitals"
                )));
            }
            m
        }
        FillingRule::NegativeEnergy => {
            let negative = energies.iter().take_while(|e| **e < -tol).count();
            let zero_modes = energies[negative..]
                .iter()
                .take_while(|e| e.abs() <= tol)
                .count();
            let half = n / 2;
            negative + zero_modes.min(half.saturating_sub(negative))
        }
    };
    let degenerate = m > 0 && m < n && (energies[m] - energies[m - 1]).abs() <= tol;
    Ok(FillingSelection {
        indices: (0..m).collect(),
        degenerate,
    })
}

// ═══════════════════════════════════════════════════════════════════════════
// Single-sector engines
// ═══════════════════════════════════════════════════════════════════════════

/// Overlap of one momentum sector together with the filling flag.
#[derive(Debug, Clone, Copy)]
pub struct LkResult {
    pub value: Complex64,
    pub degenerate_filling: bool,
}

/// Closed form for one traceless two-band sector `h = r . sigma` perturbed
/// by `delta * sigma_z`:
///
/// ```text
/// L_k(t) = cos(R_d t) + i * A * sin(R_d t),
/// R_d = |R + delta z|,  A = (R^2 + delta R_z) / (R R_d)
/// ```
///
/// The amplitude `A` is the cosine of the angle between the bare and shifted
/// Bloch vectors, so `|L_k| <= 1` identically. With `delta = 0` this reduces
/// to the pure phase `exp(i R t)` of an evolved eigenstate. The identity
/// component `r0` is deliberately excluded; it only contributes the global
/// phase handled at product level.
///
/// The expression degenerates at a band touching, so `R = 0` is rejected and
/// callers below the gap floor must use the exact engine instead.
pub fn lk_closed_form(r: &FourVector, delta: f64, t: f64) -> Result<Complex64> {
    let big_r = r.magnitude();
    if big_r == 0.0 {
        return Err(Error::InvalidParameter(
            "closed form is singular at a band degeneracy (R = 0); use the exact engine".into(),
        ));
    }
    let r_d = r.magnitude_shifted(delta);
    if r_d == 0.0 {
        // the shift cancels the whole traceless part; nothing evolves
        return Ok(cx(1.0, 0.0));
    }
    let amplitude = (big_r * big_r + delta * r.rz) / (big_r * r_d);
    let (s, c) = (r_d * t).sin_cos();
    Ok(cx(c, amplitude * s))
}

/// A momentum sector prepared for repeated time evaluation: the occupied
/// orbitals are projected once onto the eigenbasis of the shifted
/// Hamiltonian, after which each time costs one `m x m` determinant of
/// `P diag(exp(-i lambda t)) P^H` with `P = Phi^H V'`.
struct ExactSector {
    proj: CMatrix,
    proj_adj: CMatrix,
    shifted_evals: Vec<f64>,
    degenerate: bool,
}

impl ExactSector {
    fn new(
        h: &CMatrix,
        v: &CMatrix,
        delta: f64,
        filling: FillingRule,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        ensure_same_shape(h, v)?;
        check_hermitian(h, policy)?;
        check_hermitian(v, policy)?;
        let es = eig_hermitian(h, policy)?;
        let sel = select_filling(&es.values, filling, policy)?;
        let phi = es.columns(&sel.indices);
        Self::from_occupied(h, v, delta, &phi, sel.degenerate, policy)
    }

    fn with_state(
        h: &CMatrix,
        v: &CMatrix,
        delta: f64,
        occupied: &CMatrix,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        ensure_same_shape(h, v)?;
        check_hermitian(h, policy)?;
        check_hermitian(v, policy)?;
        if occupied.nrows() != h.nrows() || occupied.ncols() > h.nrows() {
            return Err(Error::DimensionMismatch {
                context: "occupied orbital matrix",
                expected: h.nrows(),
                got: occupied.nrows(),
            });
        }
        let gram = adjoint_times(occupied, occupied);
        let worst = gram
            .indexed_iter()
            .map(|((i, j), z)| {
                let target = if i == j { cx(1.0, 0.0) } else { cx(0.0, 0.0) };
                (z - target).norm()
            })
            .fold(0.0, f64::max);
        if worst > policy.orthonormality_tol {
            return Err(Error::InvalidParameter(format!(
                "occupied orbitals are not orthonormal (deviation {worst:.3e})"
            )));
        }
        Self::from_occupied(h, v, delta, occupied, false, policy)
    }

    fn from_occupied(
        h: &CMatrix,
        v: &CMatrix,
        delta: f64,
        occupied: &CMatrix,
        degenerate: bool,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let shifted = h + &v.mapv(|z| z * delta);
        let es = eig_hermitian(&shifted, policy)?;
        let proj = adjoint_times(occupied, &es.vectors);
        let proj_adj = proj.t().mapv(|z| z.conj());
        Ok(Self {
            proj,
            proj_adj,
            shifted_evals: es.values,
            degenerate,
        })
    }

    fn value(&self, t: f64) -> Result<Complex64> {
        let mut scaled = self.proj.clone();
        for (j, lambda) in self.shifted_evals.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * t);
            scaled.column_mut(j).mapv_inplace(|z| z * phase);
        }
        det_complex(&scaled.dot(&self.proj_adj))
    }
}

fn ensure_same_shape(h: &CMatrix, v: &CMatrix) -> Result<()> {
    if h.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            context: "qubit coupling matrix",
            expected: h.nrows(),
            got: v.nrows(),
        });
    }
    Ok(())
}

/// Exact sector overlap `det(Phi^H exp(-i (h + delta v) t) Phi)` with the
/// Fermi sea `Phi` chosen by the filling rule from the spectrum of `h`.
/// Valid at any band degeneracy; this is the ground truth the closed form
/// is validated against.
pub fn lk_exact(
    h: &CMatrix,
    v: &CMatrix,
    delta: f64,
    t: f64,
    filling: FillingRule,
    policy: &NumericPolicy,
) -> Result<LkResult> {
    let sector = ExactSector::new(h, v, delta, filling, policy)?;
    Ok(LkResult {
        value: sector.value(t)?,
        degenerate_filling: sector.degenerate,
    })
}

/// Exact sector overlap with a caller-supplied occupied-orbital matrix
/// (columns must be orthonormal). Used for directional-limit ground states
/// at band touchings and for checking invariance under remixing of
/// degenerate occupied orbitals.
pub fn lk_exact_with_state(
    h: &CMatrix,
    v: &CMatrix,
    delta: f64,
    t: f64,
    occupied: &CMatrix,
    policy: &NumericPolicy,
) -> Result<Complex64> {
    ExactSector::with_state(h, v, delta, occupied, policy)?.value(t)
}

// ═══════════════════════════════════════════════════════════════════════════
// Two-band sector dispatch
// ═══════════════════════════════════════════════════════════════════════════

enum TwoBandEval {
    /// Analytic fast path, valid above the gap floor.
    Closed(FourVector),
    /// Determinant engine on the 2x2 sector.
    Exact(ExactSector),
    /// Zero or both bands occupied: the overlap is identically 1 because
    /// the traceless evolution has unit determinant.
    Unit,
}

/// One momentum sector of a two-band model with the evaluation strategy
/// fixed up front. The identity component `r0` is excluded from values and
/// reported separately for product-level phase tracking.
struct TwoBandSector {
    r0: f64,
    delta: f64,
    eval: TwoBandEval,
    degenerate: bool,
}

impl TwoBandSector {
    fn new(
        model: &TwoBandBloch,
        k: &[f64],
        delta: f64,
        filling: FillingRule,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let r = model.r_at(k);
        let big_r = r.magnitude();
        let sel = select_filling(&[-big_r, big_r], filling, policy)?;
        let (eval, degenerate) = match sel.indices.len() {
            0 | 2 => (TwoBandEval::Unit, sel.degenerate),
            _ if big_r > policy.gap_floor => (TwoBandEval::Closed(r), sel.degenerate),
            _ => {
                let h = traceless_matrix(&r);
                let v = crate::models::pauli(3);
                if model.chiral {
                    // A chiral sector has equal weight on both orbitals at
                    // every momentum, so the ground state has a directional
                    // limit into the touching point. The leftover relative
                    // phase cancels from the overlap because the shifted
                    // Hamiltonian is diagonal-dominant in the same basis.
                    let planar = r.rx.hypot(r.ry);
                    let w = if planar > 0.0 {
                        -cx(r.rx, r.ry) / planar
                    } else {
                        cx(-1.0, 0.0)
                    };
                    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
                    let occupied = Array2::from_shape_vec(
                        (2, 1),
                        vec![cx(inv_sqrt2, 0.0), w * inv_sqrt2],
                    )
                    .expect("2x1 shape");
                    let sector = ExactSector::with_state(&h, &v, delta, &occupied, policy)?;
                    (TwoBandEval::Exact(sector), false)
                } else {
                    let sector = ExactSector::new(&h, &v, delta, filling, policy)?;
                    let flag = sector.degenerate;
                    (TwoBandEval::Exact(sector), flag)
                }
            }
        };
        Ok(Self {
            r0: r.r0,
            delta,
            eval,
            degenerate,
        })
    }

    fn value(&self, t: f64) -> Result<Complex64> {
        match &self.eval {
            TwoBandEval::Closed(r) => lk_closed_form(r, self.delta, t),
            TwoBandEval::Exact(sector) => sector.value(t),
            TwoBandEval::Unit => Ok(cx(1.0, 0.0)),
        }
    }
}

fn traceless_matrix(r: &FourVector) -> CMatrix {
    let mut h = CMatrix::zeros((2, 2));
    h[[0, 0]] = cx(r.rz, 0.0);
    h[[0, 1]] = cx(r.rx, -r.ry);
    h[[1, 0]] = cx(r.rx, r.ry);
    h[[1, 1]] = cx(-r.rz, 0.0);
    h
}

// ═══════════════════════════════════════════════════════════════════════════
// Series drivers
// ═══════════════════════════════════════════════════════════════════════════

/// Overlap of a single momentum sector on a time grid.
///
/// Two-band sectors exclude the identity component (a pure global phase);
/// multi-band sectors evolve the full Bloch matrix, so their phase carries
/// whatever trace the model has. Moduli are unaffected either way.
pub fn lk_series(
    model: &BlochModel,
    k: &[f64],
    delta: f64,
    times: &[f64],
    filling: FillingRule,
    policy: &NumericPolicy,
) -> Result<DecoherenceSeries> {
    validate_times(times)?;
    let (values, degenerate) = match model {
        BlochModel::TwoBand(tb) => {
            let sector = TwoBandSector::new(tb, k, delta, filling, policy)?;
            let values: Result<Vec<_>> = times.iter().map(|&t| sector.value(t)).collect();
            (values?, sector.degenerate)
        }
        BlochModel::MultiBand(mb) => {
            let h = mb.h_at(k);
            let sector = ExactSector::new(&h, &mb.coupling, delta, filling, policy)?;
            let values: Result<Vec<_>> = times.iter().map(|&t| sector.value(t)).collect();
            (values?, sector.degenerate)
        }
    };
    let series = DecoherenceSeries {
        kind: SeriesKind::PerMomentum,
        times: times.to_vec(),
        values: SeriesValues::Complex(values),
        degenerate_filling: degenerate,
    };
    series.validate(policy)?;
    Ok(series)
}

struct ChunkAcc {
    log10_mag_sq: Vec<f64>,
    phase: Vec<f64>,
    degenerate: bool,
}

/// Full-lattice decoherence factor as a product over a momentum grid with
/// `grid[axis]` points per axis (momenta `2 pi n / N`, `n = 1..=N`).
///
/// Per momentum the closed form is used above the gap floor and the exact
/// engine below it. Accumulation happens in the log domain in ascending
/// lexicographic momentum order (first axis slowest); see the module notes
/// on determinism.
pub fn product_series(
    model: &BlochModel,
    grid: &[usize],
    delta: f64,
    times: &[f64],
    filling: FillingRule,
    policy: &NumericPolicy,
) -> Result<DecoherenceSeries> {
    if grid.len() != model.dim_k() {
        return Err(Error::DimensionMismatch {
            context: "momentum grid axes",
            expected: model.dim_k(),
            got: grid.len(),
        });
    }
    if grid.iter().any(|n| *n == 0) {
        return Err(Error::InvalidParameter(
            "momentum grid needs at least one point per axis".into(),
        ));
    }
    validate_times(times)?;

    let axes: Vec<Vec<f64>> = grid.iter().map(|&n| momentum_grid(n)).collect();
    let total: usize = grid.iter().map(|n| *n).product();
    let nt = times.len();
    let k_at = |flat: usize| -> Vec<f64> {
        let mut rest = flat;
        let mut k = vec![0.0; axes.len()];
        for axis in (0..axes.len()).rev() {
            let n = axes[axis].len();
            k[axis] = axes[axis][rest % n];
            rest /= n;
        }
        k
    };

    let starts: Vec<usize> = (0..total).step_by(PAR_CHUNK).collect();
    let chunks: Result<Vec<ChunkAcc>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + PAR_CHUNK).min(total);
            let mut acc = ChunkAcc {
                log10_mag_sq: vec![0.0; nt],
                phase: vec![0.0; nt],
                degenerate: false,
            };
            for flat in start..end {
                let k = k_at(flat);
                match model {
                    BlochModel::TwoBand(tb) => {
                        let sector = TwoBandSector::new(tb, &k, delta, filling, policy)?;
                        acc.degenerate |= sector.degenerate;
                        for (i, &t) in times.iter().enumerate() {
                            let z = sector.value(t)?;
                            acc.log10_mag_sq[i] += z.norm_sqr().max(f64::MIN_POSITIVE).log10();
                            acc.phase[i] += z.arg() - sector.r0 * t;
                        }
                    }
                    BlochModel::MultiBand(mb) => {
                        let h = mb.h_at(&k);
                        let sector = ExactSector::new(&h, &mb.coupling, delta, filling, policy)?;
                        acc.degenerate |= sector.degenerate;
                        for (i, &t) in times.iter().enumerate() {
                            let z = sector.value(t)?;
                            acc.log10_mag_sq[i] += z.norm_sqr().max(f64::MIN_POSITIVE).log10();
                            acc.phase[i] += z.arg();
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let chunks = chunks?;

    let mut log10_mag_sq = vec![0.0; nt];
    let mut phase = vec![0.0; nt];
    let mut degenerate = false;
    for chunk in &chunks {
        for i in 0..nt {
            log10_mag_sq[i] += chunk.log10_mag_sq[i];
            phase[i] += chunk.phase[i];
        }
        degenerate |= chunk.degenerate;
    }

    let series = DecoherenceSeries {
        kind: SeriesKind::Product,
        times: times.to_vec(),
        values: SeriesValues::LogProduct {
            log10_mag_sq,
            phase,
        },
        degenerate_filling: degenerate,
    };
    series.validate(policy)?;
    Ok(series)
}

/// Many-body overlap `det(Phi^H exp(-i (h + delta v) t) Phi)` of a
/// real-space system on a time grid. `h` and `v` are the Hamiltonian and
/// qubit-coupling matrices of a lattice model, or of a ribbon slice at
/// fixed transverse momentum.
pub fn realspace_series(
    h: &CMatrix,
    v: &CMatrix,
    delta: f64,
    times: &[f64],
    filling: FillingRule,
    policy: &NumericPolicy,
) -> Result<DecoherenceSeries> {
    validate_times(times)?;
    let sector = ExactSector::new(h, v, delta, filling, policy)?;
    let values: Result<Vec<_>> = times.iter().map(|&t| sector.value(t)).collect();
    let series = DecoherenceSeries {
        kind: SeriesKind::Realspace,
        times: times.to_vec(),
        values: SeriesValues::Complex(values?),
        degenerate_filling: sector.degenerate,
    };
    series.validate(policy)?;
    Ok(series)
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{pauli, qwz_bloch, qwz_lattice, ssh_bloch, ssh_chain, weyl_bloch, Boundary, WeylParams};
    use crate::numkit::evolve_unitary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    const POLICY: NumericPolicy = NumericPolicy::DEFAULT;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = CMatrix::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = cx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        let adj = a.t().mapv(|z| z.conj());
        (&a + &adj).mapv(|z| z * 0.5)
    }

    fn random_four_vector(rng: &mut ChaCha8Rng) -> FourVector {
        FourVector {
            r0: 4.0 * rng.random::<f64>() - 2.0,
            rx: 6.0 * rng.random::<f64>() - 3.0,
            ry: 6.0 * rng.random::<f64>() - 3.0,
            rz: 6.0 * rng.random::<f64>() - 3.0,
        }
    }

    // ── closed form ──────────────────────────────────────────────────────

    #[test]
    fn closed_form_is_exactly_one_at_time_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let r = random_four_vector(&mut rng);
            if r.magnitude() == 0.0 {
                continue;
            }
            let l = lk_closed_form(&r, 0.3, 0.0).unwrap();
            assert_eq!(l, cx(1.0, 0.0));
        }
    }

    #[test]
    fn closed_form_without_coupling_is_a_pure_phase() {
        let r = FourVector {
            r0: 0.0,
            rx: 0.8,
            ry: -0.4,
            rz: 1.1,
        };
        let big_r = r.magnitude();
        for t in [0.3, 2.0, 11.7] {
            let l = lk_closed_form(&r, 0.0, t).unwrap();
            let expect = cx((big_r * t).cos(), (big_r * t).sin());
            assert!(
                (l - expect).norm() < 1e-14,
                "delta = 0 must evolve as exp(iRt), got {l} vs {expect}"
            );
            assert!((l.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_rejects_a_band_degeneracy() {
        let r = FourVector {
            r0: 0.5,
            rx: 0.0,
            ry: 0.0,
            rz: 0.0,
        };
        assert!(matches!(
            lk_closed_form(&r, 0.1, 1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn closed_form_survives_a_shift_that_cancels_the_field() {
        let r = FourVector {
            r0: 0.0,
            rx: 0.0,
            ry: 0.0,
            rz: 0.7,
        };
        let l = lk_closed_form(&r, -0.7, 3.0).unwrap();
        assert_eq!(l, cx(1.0, 0.0), "shifted Hamiltonian vanishes, so L = 1");
    }

    #[test]
    fn closed_form_matches_determinant_engine_on_a_chain_sector() {
        let model = ssh_bloch(0.3);
        let r = model.r_at(&[2.0]);
        let closed = lk_closed_form(&r, 0.1, 7.5).unwrap();
        let exact = lk_exact(&model.h_at(&[2.0]), &pauli(3), 0.1, 7.5, FillingRule::NegativeEnergy, &POLICY)
            .unwrap();
        assert!(
            (closed - exact.value).norm() < 1e-10,
            "closed {closed} vs exact {}",
            exact.value
        );
        assert!(!exact.degenerate_filling);
    }

    #[test]
    fn closed_form_matches_determinant_engine_on_random_sectors() {
        // the analytic fast path must agree with the determinant ground
        // truth on a large random family of gapped sectors
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut checked = 0usize;
        while checked < 1000 {
            let r = random_four_vector(&mut rng);
            if r.magnitude() <= 1e-3 {
                continue;
            }
            let delta = 2.0 * rng.random::<f64>() - 1.0;
            let t = 20.0 * rng.random::<f64>();
            let closed = lk_closed_form(&r, delta, t).unwrap();
            let exact = lk_exact(
                &traceless_matrix(&r),
                &pauli(3),
                delta,
                t,
                FillingRule::NegativeEnergy,
                &POLICY,
            )
            .unwrap();
            assert!(
                (closed - exact.value).norm() < 1e-10,
                "sample {checked}: closed {closed} vs exact {} at delta={delta}, t={t}",
                exact.value
            );
            assert!(closed.norm() <= 1.0 + 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn closed_form_matches_determinant_engine_across_a_checkerboard_zone() {
        let model = qwz_bloch(-1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let k = [2.0 * PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()];
            let r = model.r_at(&k);
            assert!(r.magnitude() > 1e-3, "gapped regime expected");
            let delta = 2.0 * rng.random::<f64>() - 1.0;
            let t = 20.0 * rng.random::<f64>();
            let closed = lk_closed_form(&r, delta, t).unwrap();
            let exact = lk_exact(
                &model.h_at(&k),
                &pauli(3),
                delta,
                t,
                FillingRule::NegativeEnergy,
                &POLICY,
            )
            .unwrap();
            assert!(
                (closed - exact.value).norm() < 1e-10,
                "k = {k:?}: {closed} vs {}",
                exact.value
            );
        }
    }

    // ── exact engine ─────────────────────────────────────────────────────

    #[test]
    fn exact_engine_is_one_at_time_zero_and_stays_in_the_unit_disk() {
        let h = random_hermitian(4, 5);
        let v = random_hermitian(4, 6);
        let at_zero = lk_exact(&h, &v, 0.37, 0.0, FillingRule::NegativeEnergy, &POLICY).unwrap();
        assert!((at_zero.value - cx(1.0, 0.0)).norm() < 1e-12);
        for t in [0.5, 3.3, 17.0] {
            let l = lk_exact(&h, &v, 0.37, t, FillingRule::NegativeEnergy, &POLICY).unwrap();
            assert!(
                l.value.norm() <= 1.0 + 1e-9,
                "|L| = {} escapes the unit disk at t={t}",
                l.value.norm()
            );
        }
    }

    /// Independent many-body oracle: build the antisymmetric two-particle
    /// space (dimension d(d-1)/2), evolve the Slater state directly with
    /// the two-particle Hamiltonian, and compare with the determinant
    /// engine.
    fn two_particle_overlap(
        h_shifted: &CMatrix,
        occupied: &CMatrix,
        t: f64,
    ) -> Complex64 {
        let d = h_shifted.nrows();
        let pairs: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
            .collect();
        let n = pairs.len();
        let mut h2 = CMatrix::zeros((n, n));
        for (row, &(k, l)) in pairs.iter().enumerate() {
            for (col, &(i, j)) in pairs.iter().enumerate() {
                let mut z = cx(0.0, 0.0);
                if l == j {
                    z += h_shifted[[k, i]];
                }
                if k == i {
                    z += h_shifted[[l, j]];
                }
                if l == i {
                    z -= h_shifted[[k, j]];
                }
                if k == j {
                    z -= h_shifted[[l, i]];
                }
                h2[[row, col]] = z;
            }
        }
        assert!(
            crate::numkit::hermiticity_violation(&h2) < 1e-12,
            "two-particle Hamiltonian must inherit hermiticity"
        );
        let mut g = ndarray::Array1::<Complex64>::zeros(n);
        for (row, &(i, j)) in pairs.iter().enumerate() {
            g[row] = occupied[[i, 0]] * occupied[[j, 1]] - occupied[[j, 0]] * occupied[[i, 1]];
        }
        let u2 = evolve_unitary(&h2, t, &POLICY).unwrap();
        let evolved = u2.dot(&g);
        g.iter().zip(evolved.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    #[test]
    fn exact_engine_matches_the_antisymmetric_subspace_oracle() {
        let params = WeylParams {
            b3: 1.8,
            ..WeylParams::default()
        };
        let model = weyl_bloch(params);
        let k = [0.9, 1.7, 2.3];
        let h = model.h_at(&k);
        let delta = 0.5;
        let shifted = &h + &model.coupling.mapv(|z| z * delta);
        let es = eig_hermitian(&h, &POLICY).unwrap();
        assert!(es.values[1] < -1e-6 && es.values[2] > 1e-6, "gapped, half filled");
        let occupied = es.columns(&[0, 1]);
        for t in [0.0, 1.3, 7.9] {
            let engine = lk_exact(&h, &model.coupling, delta, t, FillingRule::NegativeEnergy, &POLICY)
                .unwrap();
            let oracle = two_particle_overlap(&shifted, &occupied, t);
            assert!(
                (engine.value - oracle).norm() < 1e-9,
                "t = {t}: engine {} vs two-particle oracle {oracle}",
                engine.value
            );
        }
    }

    #[test]
    fn exact_engine_is_invariant_under_remixing_degenerate_orbitals() {
        // the crossing-free default regime has exactly doubly degenerate
        // bands, so the occupied pair carries a full U(2) gauge freedom
        let model = weyl_bloch(WeylParams::default());
        let k = [0.8, 0.3, 1.9];
        let h = model.h_at(&k);
        let es = eig_hermitian(&h, &POLICY).unwrap();
        assert!(
            (es.values[0] - es.values[1]).abs() < 1e-10,
            "occupied bands should be degenerate: {:?}",
            es.values
        );
        let phi = es.columns(&[0, 1]);
        let (theta, alpha, beta) = (0.7f64, 1.1f64, -0.6f64);
        let mut w = CMatrix::zeros((2, 2));
        w[[0, 0]] = Complex64::from_polar(theta.cos(), alpha);
        w[[0, 1]] = -Complex64::from_polar(theta.sin(), beta);
        w[[1, 0]] = Complex64::from_polar(theta.sin(), -beta);
        w[[1, 1]] = Complex64::from_polar(theta.cos(), -alpha);
        let remixed = phi.dot(&w);
        for t in [0.7, 4.2, 13.0] {
            let a = lk_exact_with_state(&h, &model.coupling, 0.5, t, &phi, &POLICY).unwrap();
            let b = lk_exact_with_state(&h, &model.coupling, 0.5, t, &remixed, &POLICY).unwrap();
            assert!(
                (a - b).norm() < 1e-9,
                "t = {t}: overlap depends on the occupied gauge: {a} vs {b}"
            );
        }
    }

    #[test]
    fn equal_weight_sector_at_a_chiral_touching_decays_as_cos_squared() {
        // at the gap-closing momentum of the critical dimerized chain the
        // directional-limit ground state has equal orbital weights, so
        // |L|^2 = cos^2(delta t) exactly
        let model = BlochModel::TwoBand(ssh_bloch(0.0));
        let delta = 0.1;
        let times = [0.0, 1.0, 2.5, 5.0 * PI, 20.0];
        let series = lk_series(&model, &[PI], delta, &times, FillingRule::NegativeEnergy, &POLICY)
            .unwrap();
        assert!(!series.degenerate_filling, "directional limit exists");
        let mod_sq = series.modulus_sq();
        for (m, t) in mod_sq.iter().zip(&times) {
            let law = (delta * t).cos().powi(2);
            assert!(
                (m - law).abs() < 1e-10,
                "|L|^2 = {m} vs cos^2 = {law} at t = {t}"
            );
        }
        assert!(mod_sq[3] < 1e-10, "quarter-period time should fully dephase");
    }

    #[test]
    fn per_momentum_series_flags_a_true_node() {
        // the checkerboard model at its critical mass has a genuine band
        // touching with no chiral structure; the policy picks the
        // lowest-index eigenvector and must say so
        let model = BlochModel::TwoBand(qwz_bloch(0.0));
        let times = [0.0, 1.0, 4.0];
        let series = lk_series(
            &model,
            &[2.0 * PI, 2.0 * PI],
            0.2,
            &times,
            FillingRule::NegativeEnergy,
            &POLICY,
        )
        .unwrap();
        assert!(series.degenerate_filling, "node must be flagged");
        if let SeriesValues::Complex(values) = &series.values {
            for z in values {
                assert!((z.norm() - 1.0).abs() < 1e-12, "sigma_z eigenstate dephases as a pure phase");
            }
        } else {
            panic!("per-momentum series stores complex values");
        }
    }

    // ── filling ──────────────────────────────────────────────────────────

    #[test]
    fn filling_follows_the_half_filling_convention() {
        let sel = select_filling(&[-2.0, -1.0, 1.0, 2.0], FillingRule::NegativeEnergy, &POLICY)
            .unwrap();
        assert_eq!(sel.indices, vec![0, 1]);
        assert!(!sel.degenerate);

        // zero modes filled ascending until half filling, flagged
        let sel = select_filling(
            &[-2.0, -5e-11, 3e-11, 2.0],
            FillingRule::NegativeEnergy,
            &POLICY,
        )
        .unwrap();
        assert_eq!(sel.indices, vec![0, 1]);
        assert!(sel.degenerate, "partially filled zero multiplet");

        // more strictly negative states than half filling: keep the full
        // Fermi sea, no flag
        let sel = select_filling(&[-3.0, -2.0, -1.0, 4.0], FillingRule::NegativeEnergy, &POLICY)
            .unwrap();
        assert_eq!(sel.indices, vec![0, 1, 2]);
        assert!(!sel.degenerate);

        // zero multiplet fully absorbed: unambiguous, no flag
        let sel = select_filling(
            &[-2.0, -3e-11, 1.0, 2.0],
            FillingRule::NegativeEnergy,
            &POLICY,
        )
        .unwrap();
        assert_eq!(sel.indices, vec![0, 1]);
        assert!(!sel.degenerate);
    }

    #[test]
    fn fixed_count_filling_flags_a_degenerate_boundary() {
        let sel = select_filling(
            &[-1.0, -0.5, -0.5, 2.0],
            FillingRule::LowestM(2),
            &POLICY,
        )
        .unwrap();
        assert_eq!(sel.indices, vec![0, 1]);
        assert!(sel.degenerate);
        assert!(select_filling(&[0.0; 4], FillingRule::LowestM(5), &POLICY).is_err());
    }

    // ── product series ───────────────────────────────────────────────────

    #[test]
    fn product_without_coupling_stays_on_the_unit_circle() {
        let model = BlochModel::TwoBand(ssh_bloch(0.3));
        let times = [0.0, 2.0, 9.5];
        let series = product_series(&model, &[6], 0.0, &times, FillingRule::NegativeEnergy, &POLICY)
            .unwrap();
        if let SeriesValues::LogProduct { log10_mag_sq, .. } = &series.values {
            for x in log10_mag_sq {
                assert!(x.abs() < 1e-12, "log10 |L|^2 = {x} should vanish at delta = 0");
            }
        } else {
            panic!("product series stores log values");
        }
    }

    #[test]
    fn product_over_momenta_matches_the_periodic_chain() {
        // momentum factorization against the real-space many-body overlap
        // on the same closed chain: one momentum per unit cell
        let times = [0.0, 1.1, 3.7, 6.4];
        for cells in [4usize, 8] {
            let product = product_series(
                &BlochModel::TwoBand(ssh_bloch(0.4)),
                &[cells],
                0.1,
                &times,
                FillingRule::NegativeEnergy,
                &POLICY,
            )
            .unwrap();
            let chain = ssh_chain(2 * cells, 0.4, Boundary::Periodic).unwrap();
            let real = realspace_series(&chain.h, &chain.coupling, 0.1, &times, FillingRule::NegativeEnergy, &POLICY)
                .unwrap();
            let lhs = product.modulus_sq();
            let rhs = real.modulus_sq();
            for i in 0..times.len() {
                assert!(
                    (lhs[i].sqrt() - rhs[i].sqrt()).abs() < 1e-8,
                    "cells = {cells}, t = {}: product modulus {} vs real-space {}",
                    times[i],
                    lhs[i].sqrt(),
                    rhs[i].sqrt()
                );
            }
        }
    }

    #[test]
    fn product_over_momenta_matches_the_periodic_lattice() {
        let times = [0.0, 2.2, 5.5];
        let product = product_series(
            &BlochModel::TwoBand(qwz_bloch(-1.0)),
            &[3, 3],
            0.3,
            &times,
            FillingRule::NegativeEnergy,
            &POLICY,
        )
        .unwrap();
        let lattice = qwz_lattice(3, 3, -1.0, Boundary::Periodic).unwrap();
        let real = realspace_series(
            &lattice.h,
            &lattice.coupling,
            0.3,
            &times,
            FillingRule::NegativeEnergy,
            &POLICY,
        )
        .unwrap();
        let lhs = product.modulus_sq();
        let rhs = real.modulus_sq();
        for i in 0..times.len() {
            assert!(
                (lhs[i].sqrt() - rhs[i].sqrt()).abs() < 1e-8,
                "t = {}: {} vs {}",
                times[i],
                lhs[i].sqrt(),
                rhs[i].sqrt()
            );
        }
    }

    #[test]
    fn weak_coupling_response_vanishes_linearly_or_faster() {
        let model = BlochModel::TwoBand(ssh_bloch(0.5));
        let times: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
        let worst = |delta: f64| -> f64 {
            let series = product_series(&model, &[16], delta, &times, FillingRule::NegativeEnergy, &POLICY)
                .unwrap();
            series
                .modulus_sq()
                .iter()
                .map(|m| 1.0 - m)
                .fold(0.0, f64::max)
        };
        let d2 = worst(1e-2);
        let d3 = worst(1e-3);
        let d4 = worst(1e-4);
        assert!(
            d3 <= 0.15 * d2 && d4 <= 0.15 * d3,
            "response must shrink at least linearly: {d2:e}, {d3:e}, {d4:e}"
        );
    }

    #[test]
    fn product_accumulation_is_deterministic() {
        let model = BlochModel::TwoBand(qwz_bloch(-1.0));
        let times = [0.0, 1.0, 2.0, 3.0];
        let run = || {
            product_series(&model, &[9, 9], 0.25, &times, FillingRule::NegativeEnergy, &POLICY)
                .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.values, b.values, "repeated runs must agree bitwise");
    }

    // ── real-space series ────────────────────────────────────────────────

    #[test]
    fn realspace_series_passes_the_trivial_checks() {
        let chain = ssh_chain(8, 0.3, Boundary::Open).unwrap();
        let times = [0.0, 1.5, 4.0];
        let series = realspace_series(&chain.h, &chain.coupling, 0.2, &times, FillingRule::NegativeEnergy, &POLICY)
            .unwrap();
        if let SeriesValues::Complex(values) = &series.values {
            assert!((values[0] - cx(1.0, 0.0)).norm() < 1e-12);
        }
        let free = realspace_series(&chain.h, &chain.coupling, 0.0, &times, FillingRule::NegativeEnergy, &POLICY)
            .unwrap();
        for m in free.modulus_sq() {
            assert!((m - 1.0).abs() < 1e-11, "no coupling, no decoherence: {m}");
        }
    }

    #[test]
    fn open_chain_decoherence_separates_the_two_dimerization_regions() {
        // edge modes on the topological side resonate with the qubit and
        // collapse the overlap; the trivial side only dephases weakly
        let times: Vec<f64> = (0..=160).map(|i| 0.25 * i as f64).collect();
        let min_mod_sq = |phi: f64| -> f64 {
            let chain = ssh_chain(40, phi, Boundary::Open).unwrap();
            let series = realspace_series(&chain.h, &chain.coupling, 0.1, &times, FillingRule::NegativeEnergy, &POLICY)
                .unwrap();
            series.modulus_sq().into_iter().fold(f64::INFINITY, f64::min)
        };
        let trivial = min_mod_sq(-0.5);
        let topological = min_mod_sq(0.5);
        assert!(
            topological < 0.25 && trivial > 0.5,
            "expected a clear split, got topological {topological} vs trivial {trivial}"
        );
    }

    // ── container validation ─────────────────────────────────────────────

    #[test]
    fn series_validation_rejects_malformed_input() {
        let good = DecoherenceSeries {
            kind: SeriesKind::Realspace,
            times: vec![0.0, 1.0],
            values: SeriesValues::Complex(vec![cx(1.0, 0.0), cx(0.5, 0.0)]),
            degenerate_filling: false,
        };
        assert!(good.validate(&POLICY).is_ok());

        let descending = DecoherenceSeries {
            times: vec![1.0, 0.5],
            ..good.clone()
        };
        assert!(descending.validate(&POLICY).is_err());

        let short = DecoherenceSeries {
            values: SeriesValues::Complex(vec![cx(1.0, 0.0)]),
            ..good.clone()
        };
        assert!(short.validate(&POLICY).is_err());

        let too_big = DecoherenceSeries {
            values: SeriesValues::Complex(vec![cx(1.0, 0.0), cx(1.5, 0.0)]),
            ..good.clone()
        };
        assert!(too_big.validate(&POLICY).is_err());

        let off_at_zero = DecoherenceSeries {
            values: SeriesValues::Complex(vec![cx(0.9, 0.0), cx(0.5, 0.0)]),
            ..good
        };
        assert!(off_at_zero.validate(&POLICY).is_err());
    }

    #[test]
    fn default_time_grid_spans_the_observation_window() {
        let grid = default_time_grid();
        assert_eq!(grid.len(), 401);
        assert_eq!(grid[0], 0.0);
        assert_eq!(*grid.last().unwrap(), 20.0);
        assert!((grid[1] - 0.05).abs() < 1e-15);
    }
}
