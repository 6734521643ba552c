//! Exact algebra of resonant pulses on a two-level system: single-pulse and
//! composite-sequence propagators, excitation profiles, and the residual
//! phase imprinted on the target transition.
//!
//! A resonant pulse of area `A` and phase `phi` acts as
//!
//! ```text
//!         | cos(A/2)              i e^{-i phi} sin(A/2) |
//!  U    = |                                             |
//!   phi   | i e^{i phi} sin(A/2)  cos(A/2)              |
//! ```
//!
//! and a composite sequence is the ordered matrix product
//! `U_{phi_1} U_{phi_2} ... U_{phi_N}` with every constituent pulse at the
//! same area. All angles are radians; the `pi`-unit convention is a CLI/file
//! concern only.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Matching tolerance for the palindromic-phase check.
const ANAGRAM_TOL: f64 = 1e-12;

/// A 2x2 complex propagator. Products of resonant pulses stay in SU(2):
/// `u22 = conj(u11)`, `u21 = -conj(u12)`, `|u11|^2 + |u21|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Matrix {
    e: [[Complex64; 2]; 2],
}

impl Su2Matrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Su2Matrix {
            e: [[one, zero], [zero, one]],
        }
    }

    pub fn from_entries(e: [[Complex64; 2]; 2]) -> Self {
        Su2Matrix { e }
    }

    pub fn u11(&self) -> Complex64 {
        self.e[0][0]
    }

    pub fn u12(&self) -> Complex64 {
        self.e[0][1]
    }

    pub fn u21(&self) -> Complex64 {
        self.e[1][0]
    }

    pub fn u22(&self) -> Complex64 {
        self.e[1][1]
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Su2Matrix) -> Su2Matrix {
        let a = &self.e;
        let b = &rhs.e;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Su2Matrix { e: out }
    }

    /// Largest entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                let mut v = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    v += self.e[k][r].conj() * self.e[k][c];
                }
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }
}

/// Ordered phases of a composite pulse train; all pulses share one area.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSequence {
    phases: Vec<f64>,
    label: String,
}

impl CompositeSequence {
    /// Sequence from an explicit phase list (radians).
    pub fn new(label: impl Into<String>, phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidGrid("sequence needs at least one pulse".into()));
        }
        Ok(CompositeSequence {
            phases,
            label: label.into(),
        })
    }

    /// Anagram (palindromic) sequence of `N = 2m + 1` pulses built from the
    /// free half `(phi_2 ... phi_{m+1})` in radians, with `phi_1 = phi_N = 0`
    /// and `phi_k = phi_{N+1-k}`.
    pub fn anagram(label: impl Into<String>, half: &[f64]) -> Self {
        let m = half.len();
        let mut phases = Vec::with_capacity(2 * m + 1);
        phases.push(0.0);
        phases.extend_from_slice(half);
        if m > 0 {
            phases.extend(half[..m - 1].iter().rev());
        }
        phases.push(0.0);
        if m == 0 {
            // N = 1 degenerates to the single zero-phase pulse.
            phases.truncate(1);
        }
        CompositeSequence {
            phases,
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn is_anagram(&self) -> bool {
        let n = self.phases.len();
        if n % 2 == 0 {
            return false;
        }
        self.phases
            .iter()
            .zip(self.phases.iter().rev())
            .all(|(a, b)| (a - b).abs() <= ANAGRAM_TOL)
    }

    /// Number of free phases `m` for an anagram sequence of `N = 2m + 1` pulses.
    pub fn half_count(&self) -> Result<usize> {
        if !self.is_anagram() {
            return Err(Error::NotAnagram(self.label.clone()));
        }
        Ok((self.phases.len() - 1) / 2)
    }

    /// The free half `(phi_2 ... phi_{m+1})` of an anagram sequence, radians.
    pub fn half_phases(&self) -> Result<Vec<f64>> {
        let m = self.half_count()?;
        Ok(self.phases[1..=m].to_vec())
    }
}

/// Propagator of a single resonant pulse, Eq.-(4)-form.
pub fn pulse_propagator(area: f64, phase: f64) -> Su2Matrix {
    let c = Complex64::new((area / 2.0).cos(), 0.0);
    let s = (area / 2.0).sin();
    let up = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, phase) * s;
    let down = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, -phase) * s;
    Su2Matrix::from_entries([[c, down], [up, c]])
}

/// Full propagator of a composite sequence at common per-pulse area `area`:
/// the matrix product `U_{phi_1} U_{phi_2} ... U_{phi_N}`.
pub fn sequence_propagator(seq: &CompositeSequence, area: f64) -> Su2Matrix {
    seq.phases()
        .iter()
        .fold(Su2Matrix::identity(), |acc, &phi| {
            acc.mul(&pulse_propagator(area, phi))
        })
}

/// Transition probability `p = |u21|^2`. Defined from the off-diagonal entry
/// so that values near p = 0 do not suffer cancellation.
pub fn transition_probability(u: &Su2Matrix) -> f64 {
    u.u21().norm_sqr()
}

/// Excitation profile sampled on a uniform area grid.
#[derive(Debug, Clone)]
pub struct TransitionProfile {
    pub areas: Vec<f64>,
    pub probabilities: Vec<f64>,
}

pub fn excitation_profile(
    seq: &CompositeSequence,
    area_min: f64,
    area_max: f64,
    points: usize,
) -> Result<TransitionProfile> {
    if points < 2 {
        return Err(Error::InvalidGrid(format!(
            "profile needs at least 2 points, got {points}"
        )));
    }
    if !(area_min < area_max) {
        return Err(Error::InvalidGrid(format!(
            "profile needs area_min < area_max, got {area_min}..{area_max}"
        )));
    }
    let step = (area_max - area_min) / (points - 1) as f64;
    let areas: Vec<f64> = (0..points).map(|i| area_min + step * i as f64).collect();
    let probabilities = areas
        .iter()
        .map(|&a| transition_probability(&sequence_propagator(seq, a)))
        .collect();
    Ok(TransitionProfile {
        areas,
        probabilities,
    })
}

/// Residual phase of the target transition for an anagram sequence seen as an
/// effective pi pulse:
///
/// `phi = (-1)^m (pi/2 + phi_{m+1}) - 2 sum_{k=2}^{m} (-1)^k phi_k`,
///
/// reduced to `[0, 2pi)`. Equivalently `u21(A = pi) = e^{i phi}`.
pub fn target_phase(seq: &CompositeSequence) -> Result<f64> {
    let m = seq.half_count()?;
    let phases = seq.phases();
    let middle = phases[m]; // phi_{m+1}, 1-based
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut sum = 0.0;
    // k runs over 1-based pulse indices; the k = 1 term vanishes for the
    // catalog convention phi_1 = 0 but is kept so shifted sequences stay exact.
    for k in 1..=m {
        let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sk * phases[k - 1];
    }
    let phi = sign * (PI / 2.0 + middle) - 2.0 * sum;
    Ok(phi.rem_euclid(TAU))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "expected {b}, got {a} (|diff| = {:.3e})",
            (a - b).norm()
        );
    }

    #[test]
    fn pi_pulse_is_fully_off_diagonal() {
        let u = pulse_propagator(PI, 0.0);
        let i = Complex64::new(0.0, 1.0);
        assert_close(u.u11(), Complex64::new(0.0, 0.0), 1e-15);
        assert_close(u.u12(), i, 1e-15);
        assert_close(u.u21(), i, 1e-15);
        assert_close(u.u22(), Complex64::new(0.0, 0.0), 1e-15);
    }

    #[test]
    fn zero_area_is_identity_and_two_pi_is_minus_identity() {
        for phi in [0.0, 0.3, -2.1, 5.0] {
            let u0 = pulse_propagator(0.0, phi);
            assert_close(u0.u11(), Complex64::new(1.0, 0.0), 1e-15);
            assert_close(u0.u21(), Complex64::new(0.0, 0.0), 1e-15);
            let u2 = pulse_propagator(TAU, phi);
            assert_close(u2.u11(), Complex64::new(-1.0, 0.0), 1e-15);
            assert!(u2.u21().norm() < 1e-15);
        }
    }

    #[test]
    fn same_axis_pulses_compose_by_area() {
        let seq = CompositeSequence::new("zeros", vec![0.0; 4]).unwrap();
        let a = 0.7;
        let u = sequence_propagator(&seq, a);
        let direct = pulse_propagator(4.0 * a, 0.0);
        for r in 0..2 {
            for c in 0..2 {
                assert_close(u.e[r][c], direct.e[r][c], 1e-14);
            }
        }
    }

    #[test]
    fn single_pulse_sequence_matches_pulse_propagator() {
        let seq = CompositeSequence::new("one", vec![1.234]).unwrap();
        let u = sequence_propagator(&seq, 0.456);
        let v = pulse_propagator(0.456, 1.234);
        for r in 0..2 {
            for c in 0..2 {
                assert_close(u.e[r][c], v.e[r][c], 0.0);
            }
        }
    }

    #[test]
    fn odd_sequences_are_fully_transferring_at_pi() {
        for phases in [vec![0.0, 0.65 * PI, 0.0], vec![0.0, 1.16 * PI, 0.58 * PI, 1.16 * PI, 0.0]] {
            let seq = CompositeSequence::new("odd", phases).unwrap();
            let u = sequence_propagator(&seq, PI);
            assert!((u.u21().norm() - 1.0).abs() < 1e-14);
            assert!((transition_probability(&u) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn bb3_off_diagonal_phase_at_pi() {
        // Direct 2x2 multiplication gives u21 = -i e^{-i 0.65 pi}, u12 = -i e^{+i 0.65 pi}.
        let seq = CompositeSequence::anagram("B3", &[0.65 * PI]);
        let u = sequence_propagator(&seq, PI);
        let minus_i = Complex64::new(0.0, -1.0);
        assert_close(u.u21(), minus_i * Complex64::from_polar(1.0, -0.65 * PI), 1e-14);
        assert_close(u.u12(), minus_i * Complex64::from_polar(1.0, 0.65 * PI), 1e-14);
    }

    #[test]
    fn transition_probability_examples() {
        assert!((transition_probability(&pulse_propagator(PI, 0.0)) - 1.0).abs() < 1e-15);
        assert!(transition_probability(&pulse_propagator(TAU, 0.0)) < 1e-29);
        assert!((transition_probability(&pulse_propagator(PI / 2.0, 0.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn profile_of_single_pulse_is_sin_squared() {
        let seq = CompositeSequence::new("single", vec![0.0]).unwrap();
        let profile = excitation_profile(&seq, 0.0, TAU, 101).unwrap();
        for (a, p) in profile.areas.iter().zip(&profile.probabilities) {
            assert!((p - (a / 2.0).sin().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn profile_rejects_bad_grids() {
        let seq = CompositeSequence::new("single", vec![0.0]).unwrap();
        assert!(matches!(
            excitation_profile(&seq, 0.0, 1.0, 1),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            excitation_profile(&seq, 2.0, 1.0, 10),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn anagram_constructor_expands_the_half_list() {
        let seq = CompositeSequence::anagram("N5", &[1.16 * PI, 0.58 * PI]);
        assert_eq!(seq.len(), 5);
        let expect = [0.0, 1.16 * PI, 0.58 * PI, 1.16 * PI, 0.0];
        for (a, b) in seq.phases().iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(seq.is_anagram());
        assert_eq!(seq.half_phases().unwrap(), vec![1.16 * PI, 0.58 * PI]);
    }

    #[test]
    fn target_phase_examples() {
        // N = 1: pi/2.
        let single = CompositeSequence::anagram("N1", &[]);
        assert!((target_phase(&single).unwrap() - PI / 2.0).abs() < 1e-14);
        // B3: -(pi/2 + 0.65 pi) mod 2 pi = 0.85 pi.
        let b3 = CompositeSequence::anagram("B3", &[0.65 * PI]);
        assert!((target_phase(&b3).unwrap() - 0.85 * PI).abs() < 1e-13);
        // N5 with Table-1 phases: 0.76 pi.
        let n5 = CompositeSequence::anagram("N5", &[1.16 * PI, 0.58 * PI]);
        assert!((target_phase(&n5).unwrap() - 0.76 * PI).abs() < 1e-13);
    }

    #[test]
    fn target_phase_matches_u21_at_pi() {
        // Independent route: u21(pi) = e^{i phi} for any anagram sequence.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 0..6 {
            let half: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TAU)).collect();
            let seq = CompositeSequence::anagram("rand", &half);
            let phi = target_phase(&seq).unwrap();
            let u = sequence_propagator(&seq, PI);
            assert_close(u.u21(), Complex64::from_polar(1.0, phi), 1e-12);
        }
    }

    #[test]
    fn target_phase_rejects_non_anagram() {
        let seq = CompositeSequence::new("junk", vec![0.0, 0.3, 0.1]).unwrap();
        assert!(matches!(target_phase(&seq), Err(Error::NotAnagram(_))));
    }

    #[test]
    fn propagators_stay_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(1..26);
            let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
            let seq = CompositeSequence::new("rand", phases).unwrap();
            let area = rng.gen_range(0.0..4.0 * TAU);
            assert!(sequence_propagator(&seq, area).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn anagram_profiles_are_symmetric_about_two_pi() {
        let seq = CompositeSequence::anagram("N5", &[1.16 * PI, 0.58 * PI]);
        for k in 0..200 {
            let d = 1e-3 + k as f64 * 0.015;
            let lo = transition_probability(&sequence_propagator(&seq, TAU - d));
            let hi = transition_probability(&sequence_propagator(&seq, TAU + d));
            assert!((lo - hi).abs() < 1e-10, "asymmetry {:.2e} at d = {d}", (lo - hi).abs());
        }
    }

    #[test]
    fn global_phase_shift_leaves_profile_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phases: Vec<f64> = (0..7).map(|_| rng.gen_range(0.0..TAU)).collect();
        let shifted: Vec<f64> = phases.iter().map(|p| p + 0.8371).collect();
        let a = CompositeSequence::new("a", phases).unwrap();
        let b = CompositeSequence::new("b", shifted).unwrap();
        for k in 0..100 {
            let area = k as f64 * 0.12;
            let pa = transition_probability(&sequence_propagator(&a, area));
            let pb = transition_probability(&sequence_propagator(&b, area));
            assert!((pa - pb).abs() < 1e-12);
        }
    }
}
