//! Joint-space simulation of the five-step conditional-gate construction:
//! `n + 1` qubits coupled through one phonon mode, dressed on the first blue
//! sideband, driven by a narrowband sequence on the second sideband of the
//! target ion, then undressed and projected back onto the initial Fock
//! sector.
//!
//! Step 1 (preparation of `|v0>`) and step 5 (its reversal) carry no
//! conditional dynamics and are idealized as exact: columns start in
//! `|q>|v0>` and the realized gate is read out in the `|v0>` phonon sector.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::io::Write;

use crate::coupling::{sideband_coupling, LambDicke};
use crate::design::catalog;
use crate::error::{Error, Result};
use crate::su2::{target_phase, CompositeSequence};

/// Population allowed on the top two Fock levels before the cutoff counts as
/// violated.
pub const TRUNCATION_TOL: f64 = 1e-12;

/// Ion-chain configuration for a C^n-NOT gate: `n` controls plus one target
/// share a phonon mode prepared with `v0` quanta.
#[derive(Debug, Clone, Copy)]
pub struct ChainSpec {
    n_controls: usize,
    v0: usize,
    eta: LambDicke,
    phonon_cutoff: usize,
}

impl ChainSpec {
    /// `v0 >= n + 1` so the dressed ladder never runs off the bottom. The
    /// default cutoff `v0 + n + 6` leaves guard levels above the reachable
    /// sector `[v0 - n - 3, v0 + n + 3]`.
    pub fn new(n_controls: usize, v0: usize, eta: f64) -> Result<Self> {
        Self::with_cutoff(n_controls, v0, eta, v0 + n_controls + 6)
    }

    pub fn with_cutoff(n_controls: usize, v0: usize, eta: f64, phonon_cutoff: usize) -> Result<Self> {
        if n_controls < 1 {
            return Err(Error::InvalidChainSpec(format!(
                "need at least one control ion, got {n_controls}"
            )));
        }
        if v0 < n_controls + 1 {
            return Err(Error::InvalidChainSpec(format!(
                "v0 = {v0} must be at least n + 1 = {}",
                n_controls + 1
            )));
        }
        if phonon_cutoff < v0 + n_controls + 4 {
            return Err(Error::InvalidChainSpec(format!(
                "phonon cutoff {phonon_cutoff} below v0 + n + 4 = {}",
                v0 + n_controls + 4
            )));
        }
        Ok(ChainSpec {
            n_controls,
            v0,
            eta: LambDicke::new(eta)?,
            phonon_cutoff,
        })
    }

    pub fn n_controls(&self) -> usize {
        self.n_controls
    }

    pub fn n_ions(&self) -> usize {
        self.n_controls + 1
    }

    pub fn v0(&self) -> usize {
        self.v0
    }

    pub fn eta(&self) -> LambDicke {
        self.eta
    }

    pub fn phonon_cutoff(&self) -> usize {
        self.phonon_cutoff
    }

    /// Dimension of the computational register, `2^{n+1}`.
    pub fn dim(&self) -> usize {
        1 << self.n_ions()
    }

    fn grown(&self) -> ChainSpec {
        let mut out = *self;
        out.phonon_cutoff += self.phonon_cutoff / 2 + 1;
        out
    }
}

/// Dense amplitudes over `(configuration, Fock level)`; configuration bits
/// follow `|q_1 q_2 ... q_{n+1}>` with ion 1 as the most significant bit and
/// the target ion `n + 1` as the least significant.
#[derive(Debug, Clone)]
pub struct JointState {
    n_ions: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
}

impl JointState {
    pub fn basis(n_ions: usize, cutoff: usize, config: usize, v: usize) -> Self {
        let dim = 1 << n_ions;
        assert!(config < dim && v < cutoff, "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim * cutoff];
        amps[config * cutoff + v] = Complex64::new(1.0, 0.0);
        JointState {
            n_ions,
            cutoff,
            amps,
        }
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitude(&self, config: usize, v: usize) -> Complex64 {
        self.amps[config * self.cutoff + v]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of finding exactly `v` phonons, any configuration.
    pub fn phonon_population(&self, v: usize) -> f64 {
        let dim = 1 << self.n_ions;
        (0..dim)
            .map(|c| self.amps[c * self.cutoff + v].norm_sqr())
            .sum()
    }

    pub fn population(&self, config: usize, v: usize) -> f64 {
        self.amplitude(config, v).norm_sqr()
    }

    fn top_two_population(&self) -> f64 {
        self.phonon_population(self.cutoff - 1) + self.phonon_population(self.cutoff - 2)
    }
}

/// Apply one resonant pulse on the s-th blue sideband of `ion` (1-based,
/// target ion is `n + 1`). Every pair `|0>_ion |v>  <->  |1>_ion |v + s>`
/// rotates under the pulse propagator at area
/// `base_area * sideband_coupling(eta, v, s)`; the caller folds the
/// calibration into `base_area`.
pub fn apply_sideband_pulse(
    state: &mut JointState,
    spec: &ChainSpec,
    ion: usize,
    s: u8,
    base_area: f64,
    phase: f64,
) -> Result<()> {
    if ion < 1 || ion > state.n_ions {
        return Err(Error::InvalidChainSpec(format!(
            "ion index {ion} outside 1..={}",
            state.n_ions
        )));
    }
    let cutoff = state.cutoff;
    let stride = s as usize;
    let i = Complex64::new(0.0, 1.0);
    let rotations: Vec<(f64, Complex64, Complex64)> = (0..cutoff - stride)
        .map(|v| {
            let area = base_area * sideband_coupling(spec.eta, v, s)?;
            let (sin, cos) = (area / 2.0).sin_cos();
            let up = i * Complex64::from_polar(1.0, phase) * sin;
            let down = i * Complex64::from_polar(1.0, -phase) * sin;
            Ok((cos, up, down))
        })
        .collect::<Result<_>>()?;

    let dim = 1 << state.n_ions;
    let bit = 1usize << (state.n_ions - ion);
    for config in 0..dim {
        if config & bit != 0 {
            continue;
        }
        let lower = config * cutoff;
        let upper = (config | bit) * cutoff;
        for (v, &(cos, up, down)) in rotations.iter().enumerate() {
            let a0 = state.amps[lower + v];
            let a1 = state.amps[upper + v + stride];
            state.amps[lower + v] = cos * a0 + down * a1;
            state.amps[upper + v + stride] = up * a0 + cos * a1;
        }
    }

    let top = state.top_two_population();
    if top > TRUNCATION_TOL {
        return Err(Error::Truncation {
            cutoff,
            population: top,
        });
    }
    Ok(())
}

/// Apply a composite sequence on one ion's sideband. The sequence is the
/// matrix product `U_{phi_1} ... U_{phi_N}`, so the last listed phase acts
/// first on the state.
fn apply_composite(
    state: &mut JointState,
    spec: &ChainSpec,
    ion: usize,
    s: u8,
    base_area: f64,
    seq: &CompositeSequence,
) -> Result<()> {
    for &phase in seq.phases().iter().rev() {
        apply_sideband_pulse(state, spec, ion, s, base_area, phase)?;
    }
    Ok(())
}

/// Step 2 (and 4): the broadband sequence on the first blue sideband of every
/// ion, ascending order, target last. The per-pulse area is calibrated so the
/// transition with `v = v0 - 1` sees exactly pi.
pub fn dressing_step(state: &mut JointState, spec: &ChainSpec, bb: &CompositeSequence) -> Result<()> {
    let calibration = sideband_coupling(spec.eta, spec.v0 - 1, 1)?;
    let base = PI / calibration;
    for ion in 1..=spec.n_ions() {
        apply_composite(state, spec, ion, 1, base, bb)?;
    }
    Ok(())
}

/// Step 3: the narrowband sequence on the second blue sideband of the target
/// ion. `area_scale = 1` calibrates the weakest-coupled transition
/// `(v0 - n - 1  ->  v0 - n + 1)` to a per-pulse area of pi.
pub fn conditional_step(
    state: &mut JointState,
    spec: &ChainSpec,
    nb: &CompositeSequence,
    area_scale: f64,
) -> Result<()> {
    let calibration = sideband_coupling(spec.eta, spec.v0 - spec.n_controls - 1, 2)?;
    let base = area_scale * PI / calibration;
    apply_composite(state, spec, spec.n_ions(), 2, base, nb)
}

/// The realized gate restricted to the `|v0>` phonon sector.
#[derive(Debug, Clone)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    /// Mean and maximum over columns of the population lost out of the
    /// tracked sector.
    pub leakage_mean: f64,
    pub leakage_max: f64,
}

impl GateMatrix {
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        let mut leak_sum = 0.0;
        let mut leak_max = 0.0f64;
        for col in 0..dim {
            let weight: f64 = (0..dim).map(|r| entries[r * dim + col].norm_sqr()).sum();
            let leak = (1.0 - weight).max(0.0);
            leak_sum += leak;
            leak_max = leak_max.max(leak);
        }
        GateMatrix {
            dim,
            entries,
            leakage_mean: leak_sum / dim as f64,
            leakage_max: leak_max,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    /// `Tr(self^dagger * other)`.
    pub fn adjoint_product_trace(&self, other: &GateMatrix) -> Complex64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.get(r, c) * v[c])
                    .sum::<Complex64>()
            })
            .collect()
    }

    /// Debug dump: complex entries as `re,im` pairs, row-major, 12
    /// significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for row in 0..self.dim {
            for col in 0..self.dim {
                if col > 0 {
                    write!(w, ",")?;
                }
                let e = self.get(row, col);
                write!(w, "{:.11e},{:.11e}", e.re, e.im)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn simulate_gate_fixed(
    spec: &ChainSpec,
    nb: &CompositeSequence,
    bb: &CompositeSequence,
    area_scale: f64,
) -> Result<GateMatrix> {
    let dim = spec.dim();
    let cutoff = spec.phonon_cutoff();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut state = JointState::basis(spec.n_ions(), cutoff, col, spec.v0());
        dressing_step(&mut state, spec, bb)?;
        conditional_step(&mut state, spec, nb, area_scale)?;
        dressing_step(&mut state, spec, bb)?;
        for row in 0..dim {
            entries[row * dim + col] = state.amplitude(row, spec.v0());
        }
    }
    Ok(GateMatrix::from_entries(dim, entries))
}

/// Simulate steps 2-4 on every computational basis state tensored with
/// `|v0>` and project back onto the `|v0>` sector. The phonon cutoff grows
/// geometrically if population ever reaches the guard levels.
pub fn simulate_gate(
    spec: &ChainSpec,
    nb: &CompositeSequence,
    area_scale: f64,
) -> Result<GateMatrix> {
    let bb = catalog("B3")?;
    let mut attempt = *spec;
    for _ in 0..6 {
        match simulate_gate_fixed(&attempt, nb, &bb, area_scale) {
            Err(Error::Truncation { .. }) => attempt = attempt.grown(),
            other => return other,
        }
    }
    simulate_gate_fixed(&attempt, nb, &bb, area_scale)
}

/// Phase-adjusted ideal C^n-NOT: `e^{i beta}` on every non-conditional
/// diagonal entry, `<1..10| C |1..11> = e^{-i alpha}` and
/// `<1..11| C |1..10> = e^{+i alpha}` on the conditional pair. `(0, 0)` is
/// the plain truth-table gate.
pub fn reference_gate(n_controls: usize, alpha: f64, beta: f64) -> GateMatrix {
    let dim = 1 << (n_controls + 1);
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for q in 0..dim - 2 {
        entries[q * dim + q] = Complex64::from_polar(1.0, beta);
    }
    entries[(dim - 2) * dim + (dim - 1)] = Complex64::from_polar(1.0, -alpha);
    entries[(dim - 1) * dim + (dim - 2)] = Complex64::from_polar(1.0, alpha);
    GateMatrix::from_entries(dim, entries)
}

/// Closed form of the uniform average of `|<psi| S^dagger C |psi>|^2` over
/// Haar-random states: `F = (d + |Tr(S^dagger C)|^2) / (d (d + 1))`.
pub fn average_fidelity(s: &GateMatrix, c: &GateMatrix) -> Result<f64> {
    if s.dim() != c.dim() {
        return Err(Error::DimensionMismatch(s.dim(), c.dim()));
    }
    let d = s.dim() as f64;
    let t = s.adjoint_product_trace(c);
    Ok((d + t.norm_sqr()) / (d * (d + 1.0)))
}

/// Monte-Carlo estimate of the same average over `samples` Haar-random
/// states (normalized complex-Gaussian vectors); returns `(mean, std_err)`.
pub fn monte_carlo_average_fidelity(
    s: &GateMatrix,
    c: &GateMatrix,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if s.dim() != c.dim() {
        return Err(Error::DimensionMismatch(s.dim(), c.dim()));
    }
    let dim = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = move || {
        // Box-Muller on open-interval uniforms.
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..TAU);
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::new(r * u2.cos(), r * u2.sin())
    };
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let mut psi: Vec<Complex64> = (0..dim).map(|_| gaussian()).collect();
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|a| *a /= norm);
        let s_psi = s.apply(&psi);
        let c_psi = c.apply(&psi);
        let overlap: Complex64 = s_psi
            .iter()
            .zip(&c_psi)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let value = overlap.norm_sqr();
        sum += value;
        sum_sq += value * value;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(0.0);
    Ok((mean, (variance / n).sqrt()))
}

/// Haar-ish random unitary: complex Ginibre matrix orthonormalized by
/// modified Gram-Schmidt. Used to exercise the fidelity oracle.
pub fn random_unitary(dim: usize, seed: u64) -> GateMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = move || {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..TAU);
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::new(r * u2.cos(), r * u2.sin())
    };
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| gaussian()).collect())
        .collect();
    for c in 0..dim {
        for prev in 0..c {
            let overlap: Complex64 = cols[prev]
                .iter()
                .zip(&cols[c])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for r in 0..dim {
                let correction = overlap * cols[prev][r];
                cols[c][r] -= correction;
            }
        }
        let norm = cols[c].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        cols[c].iter_mut().for_each(|a| *a /= norm);
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (c, col) in cols.iter().enumerate() {
        for (r, &a) in col.iter().enumerate() {
            entries[r * dim + c] = a;
        }
    }
    GateMatrix::from_entries(dim, entries)
}

/// Reference phases predicted by the ideal-limit algebra of the construction:
/// each control ion contributes `-1` across the two dressings, the target
/// accumulates the broadband phase twice plus the narrowband transition
/// phase, giving `alpha = 2 phi_BB - phi_NB - pi/2` and `beta = pi/2` up to a
/// global phase.
pub fn analytic_reference_phases(
    nb: &CompositeSequence,
    bb: &CompositeSequence,
) -> Result<(f64, f64)> {
    let phi_nb = target_phase(nb)?;
    let phi_bb = target_phase(bb)?;
    let alpha = (2.0 * phi_bb - phi_nb - PI / 2.0).rem_euclid(TAU);
    Ok((alpha, PI / 2.0))
}

/// Fidelity of one simulated gate against the phase-adjusted ideal.
#[derive(Debug, Clone, Copy)]
pub struct FidelityReport {
    /// Closed-form maximum of the average fidelity over `(alpha, beta)`.
    pub maximized: f64,
    /// Average fidelity at the analytic phase prediction.
    pub analytic: f64,
    pub alpha_analytic: f64,
    pub beta_analytic: f64,
    pub leakage_mean: f64,
    pub leakage_max: f64,
}

/// Simulate and score one gate. The `(alpha, beta)` maximization is closed
/// form: `|Tr(S^dagger C)|` is largest when the two conditional entries are
/// phase-aligned by `alpha` and the non-conditional diagonal partial trace is
/// aligned by `beta`, giving `|T_d| + |T_a| + |T_b|`.
pub fn gate_fidelity(
    spec: &ChainSpec,
    nb: &CompositeSequence,
    area_scale: f64,
) -> Result<FidelityReport> {
    let gate = simulate_gate(spec, nb, area_scale)?;
    fidelity_report(spec, &gate, nb)
}

pub fn fidelity_report(
    spec: &ChainSpec,
    gate: &GateMatrix,
    nb: &CompositeSequence,
) -> Result<FidelityReport> {
    let d = gate.dim();
    let diag_partial: Complex64 = (0..d - 2).map(|q| gate.get(q, q)).sum();
    let flip_up = gate.get(d - 1, d - 2);
    let flip_down = gate.get(d - 2, d - 1);
    let aligned = diag_partial.norm() + flip_up.norm() + flip_down.norm();
    let dd = d as f64;
    let maximized = (dd + aligned * aligned) / (dd * (dd + 1.0));

    let bb = catalog("B3")?;
    let (alpha, beta) = analytic_reference_phases(nb, &bb)?;
    let analytic = average_fidelity(gate, &reference_gate(spec.n_controls(), alpha, beta))?;
    Ok(FidelityReport {
        maximized,
        analytic,
        alpha_analytic: alpha,
        beta_analytic: beta,
        leakage_mean: gate.leakage_mean,
        leakage_max: gate.leakage_max,
    })
}
