//! Fidelity landscapes over the `(eta, area-scale)` control plane:
//! parallel scans, high-fidelity region summaries, gate-level phase
//! optimization, and the addressing-selectivity profile.

use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

use crate::engine::{gate_fidelity, ChainSpec};
use crate::error::{Error, Result};
use crate::su2::{
    sequence_propagator, transition_probability, CompositeSequence,
};

/// A validated closed sampling interval with at least two points.
#[derive(Debug, Clone, Copy)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!(
                "axis needs at least 2 points, got {count}"
            )));
        }
        if !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "axis needs min < max, got {min}..{max}"
            )));
        }
        Ok(Axis { min, max, count })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + step * i as f64).collect()
    }
}

/// Maximized average fidelity sampled over an `(eta, area_scale)` rectangle.
#[derive(Debug, Clone)]
pub struct FidelityGrid {
    pub etas: Vec<f64>,
    pub area_scales: Vec<f64>,
    /// Row-major over eta then area_scale: `values[i * n_area + j]`.
    pub values: Vec<f64>,
    pub descriptor: String,
}

impl FidelityGrid {
    pub fn value(&self, i_eta: usize, j_area: usize) -> f64 {
        self.values[i_eta * self.area_scales.len() + j_area]
    }

    /// Location and value of the best cell.
    pub fn max_cell(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for i in 0..self.etas.len() {
            for j in 0..self.area_scales.len() {
                let v = self.value(i, j);
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        best
    }

    /// CSV with header `eta,area_scale,fidelity`, row-major over eta then
    /// area_scale, 10 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "eta,area_scale,fidelity")?;
        for (i, eta) in self.etas.iter().enumerate() {
            for (j, a) in self.area_scales.iter().enumerate() {
                writeln!(w, "{eta:.9e},{a:.9e},{:.9e}", self.value(i, j))?;
            }
        }
        Ok(())
    }
}

/// Scan the maximized gate fidelity over the control plane. Cells are
/// independent and evaluated in parallel; results land in pre-sized storage
/// by index, so the outcome does not depend on scheduling.
pub fn scan_fidelity(
    n_controls: usize,
    v0: usize,
    nb: &CompositeSequence,
    eta_axis: Axis,
    area_axis: Axis,
) -> Result<FidelityGrid> {
    if eta_axis.min <= 0.0 {
        return Err(Error::InvalidGrid(
            "eta axis must start above zero".into(),
        ));
    }
    let etas = eta_axis.values();
    let areas = area_axis.values();
    let cells: Vec<(usize, usize)> = (0..etas.len())
        .flat_map(|i| (0..areas.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| {
            let eta = etas[i];
            let area_scale = areas[j];
            let run = || -> Result<f64> {
                let spec = ChainSpec::new(n_controls, v0, eta)?;
                Ok(gate_fidelity(&spec, nb, area_scale)?.maximized)
            };
            run().map_err(|e| Error::ScanCell {
                eta,
                area_scale,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(FidelityGrid {
        etas,
        area_scales: areas,
        values,
        descriptor: format!("n={n_controls} v0={v0} nb={}", nb.label()),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct GridPoint {
    pub eta: f64,
    pub area_scale: f64,
    pub fidelity: f64,
}

/// Connected super-threshold component around the best cell.
#[derive(Debug, Clone)]
pub struct RegionSummary {
    pub threshold: f64,
    pub best: Option<GridPoint>,
    pub eta_range: Option<(f64, f64)>,
    pub area_range: Option<(f64, f64)>,
    pub cell_count: usize,
    /// Mean eta over the component's cells.
    pub eta_centroid: Option<f64>,
}

impl RegionSummary {
    pub fn is_empty(&self) -> bool {
        self.cell_count == 0
    }
}

/// 4-connected component analysis around the argmax cell. All cells below
/// `threshold` yields an explicit empty summary, not an error.
pub fn best_region(grid: &FidelityGrid, threshold: f64) -> RegionSummary {
    let (bi, bj, best_value) = grid.max_cell();
    if best_value < threshold {
        return RegionSummary {
            threshold,
            best: None,
            eta_range: None,
            area_range: None,
            cell_count: 0,
            eta_centroid: None,
        };
    }
    let (ne, na) = (grid.etas.len(), grid.area_scales.len());
    let mut seen = vec![false; ne * na];
    let mut stack = vec![(bi, bj)];
    seen[bi * na + bj] = true;
    let mut cells = Vec::new();
    while let Some((i, j)) = stack.pop() {
        cells.push((i, j));
        let mut push = |i2: usize, j2: usize| {
            if !seen[i2 * na + j2] && grid.value(i2, j2) >= threshold {
                seen[i2 * na + j2] = true;
                stack.push((i2, j2));
            }
        };
        if i > 0 {
            push(i - 1, j);
        }
        if i + 1 < ne {
            push(i + 1, j);
        }
        if j > 0 {
            push(i, j - 1);
        }
        if j + 1 < na {
            push(i, j + 1);
        }
    }
    let eta_min = cells.iter().map(|&(i, _)| grid.etas[i]).fold(f64::INFINITY, f64::min);
    let eta_max = cells.iter().map(|&(i, _)| grid.etas[i]).fold(f64::NEG_INFINITY, f64::max);
    let a_min = cells
        .iter()
        .map(|&(_, j)| grid.area_scales[j])
        .fold(f64::INFINITY, f64::min);
    let a_max = cells
        .iter()
        .map(|&(_, j)| grid.area_scales[j])
        .fold(f64::NEG_INFINITY, f64::max);
    let centroid = cells.iter().map(|&(i, _)| grid.etas[i]).sum::<f64>() / cells.len() as f64;
    RegionSummary {
        threshold,
        best: Some(GridPoint {
            eta: grid.etas[bi],
            area_scale: grid.area_scales[bj],
            fidelity: best_value,
        }),
        eta_range: Some((eta_min, eta_max)),
        area_range: Some((a_min, a_max)),
        cell_count: cells.len(),
        eta_centroid: Some(centroid),
    }
}

/// Optimization window in the control plane.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub eta: (f64, f64),
    pub area: (f64, f64),
}

impl Window {
    pub fn from_region(region: &RegionSummary) -> Option<Window> {
        Some(Window {
            eta: region.eta_range?,
            area: region.area_range?,
        })
    }
}

/// Result of a gate-level phase optimization.
#[derive(Debug, Clone)]
pub struct PhaseOptimization {
    pub sequence: CompositeSequence,
    pub seed_objective: f64,
    pub final_objective: f64,
    pub evaluations: usize,
}

/// Sub-grid resolution of the optimization objective.
const OBJECTIVE_GRID: usize = 8;
/// Default objective-evaluation budget.
pub const DEFAULT_OPTIMIZER_BUDGET: usize = 2000;

/// Minimize the mean infidelity `1 - F*` over a fixed window by a
/// derivative-free simplex search on the `m` free half-phases of an anagram
/// sequence. Best-effort: the returned sequence is never worse than the seed
/// on the stated objective.
pub fn optimize_phases(
    n_controls: usize,
    v0: usize,
    window: Window,
    seed: &CompositeSequence,
    budget: usize,
) -> Result<PhaseOptimization> {
    if !(window.eta.0 < window.eta.1 && window.area.0 < window.area.1) {
        return Err(Error::InvalidGrid("degenerate optimization window".into()));
    }
    let seed_half = seed.half_phases()?;
    let m = seed_half.len();
    if m == 0 {
        return Err(Error::InvalidGrid("optimization needs at least one free phase".into()));
    }
    let eta_axis = Axis::new(window.eta.0, window.eta.1, OBJECTIVE_GRID)?;
    let area_axis = Axis::new(window.area.0, window.area.1, OBJECTIVE_GRID)?;

    let evaluations = std::cell::Cell::new(0usize);
    let objective = |half: &[f64]| -> Result<f64> {
        evaluations.set(evaluations.get() + 1);
        let seq = CompositeSequence::anagram("candidate", half);
        let grid = scan_fidelity(n_controls, v0, &seq, eta_axis, area_axis)?;
        let mean_infidelity =
            grid.values.iter().map(|f| 1.0 - f).sum::<f64>() / grid.values.len() as f64;
        Ok(mean_infidelity)
    };

    // Nelder-Mead with standard coefficients and a best-ever record.
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<Vec<f64>> = vec![seed_half.clone()];
    for i in 0..m {
        let mut p = seed_half.clone();
        p[i] += 0.05 * PI;
        simplex.push(p);
    }
    let mut scores: Vec<f64> = simplex
        .iter()
        .map(|p| objective(p))
        .collect::<Result<_>>()?;
    let seed_objective = scores[0];
    let mut best_point = seed_half.clone();
    let mut best_score = seed_objective;
    let note_best = |p: &[f64], s: f64, best_point: &mut Vec<f64>, best_score: &mut f64| {
        if s < *best_score {
            *best_score = s;
            *best_point = p.to_vec();
        }
    };
    for (p, &s) in simplex.iter().zip(&scores) {
        note_best(p, s, &mut best_point, &mut best_score);
    }

    while evaluations.get() < budget {
        let mut order: Vec<usize> = (0..=m).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        let best = order[0];
        let worst = order[m];
        let second_worst = order[m - 1];
        if (scores[worst] - scores[best]).abs() < 1e-14 {
            break;
        }
        let mut centroid = vec![0.0; m];
        for &k in &order[..m] {
            for d in 0..m {
                centroid[d] += simplex[k][d] / m as f64;
            }
        }
        let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        };
        // Reflection.
        let reflected = blend(&centroid, &simplex[worst], -alpha);
        let reflected_score = objective(&reflected)?;
        note_best(&reflected, reflected_score, &mut best_point, &mut best_score);
        if reflected_score < scores[second_worst] && reflected_score >= scores[best] {
            simplex[worst] = reflected;
            scores[worst] = reflected_score;
            continue;
        }
        if reflected_score < scores[best] {
            // Expansion.
            let expanded = blend(&centroid, &reflected, gamma);
            let expanded_score = objective(&expanded)?;
            note_best(&expanded, expanded_score, &mut best_point, &mut best_score);
            if expanded_score < reflected_score {
                simplex[worst] = expanded;
                scores[worst] = expanded_score;
            } else {
                simplex[worst] = reflected;
                scores[worst] = reflected_score;
            }
            continue;
        }
        // Contraction toward the centroid.
        let contracted = blend(&centroid, &simplex[worst], rho);
        let contracted_score = objective(&contracted)?;
        note_best(&contracted, contracted_score, &mut best_point, &mut best_score);
        if contracted_score < scores[worst] {
            simplex[worst] = contracted;
            scores[worst] = contracted_score;
            continue;
        }
        // Shrink toward the best vertex.
        let anchor = simplex[best].clone();
        for k in 0..=m {
            if k == best {
                continue;
            }
            simplex[k] = blend(&anchor, &simplex[k], sigma);
            scores[k] = objective(&simplex[k])?;
            let p = simplex[k].clone();
            note_best(&p, scores[k], &mut best_point, &mut best_score);
        }
        if evaluations.get() >= budget {
            break;
        }
    }

    let label = format!("{}-opt", seed.label());
    Ok(PhaseOptimization {
        sequence: CompositeSequence::anagram(label, &best_point),
        seed_objective,
        final_objective: best_score,
        evaluations: evaluations.get(),
    })
}

/// Excitation probability of a neighbor ion that sees the fraction `r` of
/// the addressed ion's per-pulse area `area_scale * pi`. Pure profile
/// evaluation; no spatial beam model.
pub fn addressing_selectivity(seq: &CompositeSequence, leak_fraction: f64, area_scale: f64) -> f64 {
    let area = leak_fraction * area_scale * PI;
    transition_probability(&sequence_propagator(seq, area))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::catalog;

    #[test]
    fn axis_validation_and_values() {
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        assert!(Axis::new(1.0, 0.5, 4).is_err());
        let axis = Axis::new(0.0, 1.0, 5).unwrap();
        assert_eq!(axis.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn scan_rejects_zero_eta() {
        let nb = catalog("N5").unwrap();
        let err = scan_fidelity(
            2,
            4,
            &nb,
            Axis::new(0.0, 0.5, 4).unwrap(),
            Axis::new(0.9, 1.1, 4).unwrap(),
        );
        assert!(matches!(err, Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn scan_layout_and_range() {
        let nb = catalog("N5").unwrap();
        let grid = scan_fidelity(
            2,
            4,
            &nb,
            Axis::new(0.05, 0.3, 4).unwrap(),
            Axis::new(0.9, 1.1, 3).unwrap(),
        )
        .unwrap();
        assert_eq!(grid.values.len(), 12);
        assert!(grid.values.iter().all(|f| (0.0..=1.0).contains(f)));
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "eta,area_scale,fidelity");
        assert_eq!(text.lines().count(), 13);
        // Row-major over eta then area_scale.
        let second = text.lines().nth(1).unwrap();
        assert!(second.starts_with("5.0"), "first row is eta-min: {second}");
    }

    #[test]
    fn scan_is_deterministic_across_thread_counts() {
        let nb = catalog("N5").unwrap();
        let eta = Axis::new(0.05, 0.4, 5).unwrap();
        let area = Axis::new(0.8, 1.2, 5).unwrap();
        let baseline = scan_fidelity(2, 4, &nb, eta, area).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let threaded = pool.install(|| scan_fidelity(2, 4, &nb, eta, area)).unwrap();
        assert_eq!(baseline.values, threaded.values, "bitwise identical scans");
    }

    #[test]
    fn monotone_refinement_of_the_maximum() {
        let nb = catalog("N5").unwrap();
        let coarse = scan_fidelity(
            2,
            4,
            &nb,
            Axis::new(0.1, 0.4, 4).unwrap(),
            Axis::new(0.9, 1.1, 4).unwrap(),
        )
        .unwrap();
        // 2k - 1 points nest the k-point grid.
        let fine = scan_fidelity(
            2,
            4,
            &nb,
            Axis::new(0.1, 0.4, 7).unwrap(),
            Axis::new(0.9, 1.1, 7).unwrap(),
        )
        .unwrap();
        let c = coarse.max_cell().2;
        let f = fine.max_cell().2;
        assert!(c <= f + 1e-12, "coarse {c} vs fine {f}");
    }

    fn synthetic_grid(values: Vec<f64>, ne: usize, na: usize) -> FidelityGrid {
        FidelityGrid {
            etas: (0..ne).map(|i| 0.1 + i as f64 * 0.1).collect(),
            area_scales: (0..na).map(|j| 0.9 + j as f64 * 0.1).collect(),
            values,
            descriptor: "synthetic".into(),
        }
    }

    #[test]
    fn region_of_a_single_cell() {
        let mut values = vec![0.5; 9];
        values[4] = 0.995;
        let grid = synthetic_grid(values, 3, 3);
        let region = best_region(&grid, 0.99);
        assert_eq!(region.cell_count, 1);
        assert_eq!(region.eta_range, Some((0.2, 0.2)));
        assert_eq!(region.area_range, Some((1.0, 1.0)));
        assert!((region.eta_centroid.unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn empty_region_is_explicit() {
        let grid = synthetic_grid(vec![0.3; 9], 3, 3);
        let region = best_region(&grid, 0.99);
        assert!(region.is_empty());
        assert!(region.best.is_none());
    }

    #[test]
    fn region_is_connected_component_not_global_mask() {
        // Two islands above threshold; only the one holding the argmax counts.
        let values = vec![
            0.999, 0.2, 0.995, //
            0.2, 0.2, 0.994, //
            0.3, 0.2, 0.2,
        ];
        let grid = synthetic_grid(values, 3, 3);
        let region = best_region(&grid, 0.99);
        assert_eq!(region.cell_count, 1);
        assert_eq!(region.eta_range, Some((0.1, 0.1)));
    }

    #[test]
    fn selectivity_examples() {
        let single = CompositeSequence::new("single", vec![0.0]).unwrap();
        let p = addressing_selectivity(&single, 0.5, 1.0);
        assert!((p - 0.5).abs() < 1e-14);
        assert_eq!(addressing_selectivity(&single, 0.0, 1.0), 0.0);
        // A neighbor at half the drive sits deep in the narrowband skirt:
        // N13 leaks ~4e-3 where a single pulse transfers 0.5.
        let n13 = catalog("N13").unwrap();
        let leak = addressing_selectivity(&n13, 0.5, 1.0);
        assert!(leak <= 5e-3, "N13 neighbor leak {leak:.2e}");
        assert!(leak < 0.01 * 0.5);
    }

    #[test]
    fn optimizer_never_regresses_and_respects_budget() {
        let seed = catalog("N5").unwrap();
        let window = Window {
            eta: (0.15, 0.35),
            area: (0.95, 1.1),
        };
        let out = optimize_phases(2, 4, window, &seed, 40).unwrap();
        assert!(out.final_objective <= out.seed_objective);
        assert!(out.evaluations <= 40 + 2);
        assert!(out.sequence.is_anagram());
        assert_eq!(out.sequence.len(), 5);
    }

    #[test]
    fn optimizer_validates_window_and_seed() {
        let seed = catalog("N5").unwrap();
        let bad = Window {
            eta: (0.3, 0.3),
            area: (0.9, 1.1),
        };
        assert!(optimize_phases(2, 4, bad, &seed, 10).is_err());
        let window = Window {
            eta: (0.1, 0.3),
            area: (0.9, 1.1),
        };
        let non_anagram = CompositeSequence::new("x", vec![0.1, 0.2, 0.3]).unwrap();
        assert!(optimize_phases(2, 4, window, &non_anagram, 10).is_err());
    }
}
