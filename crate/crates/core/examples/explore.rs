//! Scratch exploration of the fidelity landscapes (not part of the build).

use iongate_core::*;
use std::f64::consts::TAU;
use std::time::Instant;

fn scan_report(n: usize, v0: usize, name: &str, ne: usize, na: usize) {
    let nb = catalog(name).unwrap();
    let t0 = Instant::now();
    let grid = scan_fidelity(
        n,
        v0,
        &nb,
        Axis::new(0.005, 0.5, ne).unwrap(),
        Axis::new(0.7, 1.3, na).unwrap(),
    )
    .unwrap();
    let (i, j, f) = grid.max_cell();
    println!(
        "n={n} v0={v0} {name}: max F* = {f:.6} at eta={:.4}, a={:.4}  [{:?}] ",
        grid.etas[i],
        grid.area_scales[j],
        t0.elapsed()
    );
    // Analytic-phase consistency at the best cell.
    let spec = ChainSpec::new(n, v0, grid.etas[i]).unwrap();
    let rep = gate_fidelity(&spec, &nb, grid.area_scales[j]).unwrap();
    println!(
        "    analytic F = {:.6} (alpha = {:.4} pi, beta = {:.4} pi), diff = {:.2e}, leak_mean = {:.2e}",
        rep.analytic,
        rep.alpha_analytic / std::f64::consts::PI,
        rep.beta_analytic / std::f64::consts::PI,
        (rep.maximized - rep.analytic).abs(),
        rep.leakage_mean
    );
    let region = best_region(&grid, 0.99);
    println!(
        "    0.99-region: {} cells, eta centroid {:?}",
        region.cell_count, region.eta_centroid
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let what = args.get(1).map(String::as_str).unwrap_or("toffoli");

    match what {
        "toffoli" => {
            for name in ["N5", "N5o", "N9", "N9o"] {
                for v0 in [4usize, 5] {
                    scan_report(2, v0, name, 100, 100);
                }
            }
        }
        "slopes" => {
            for (m, name) in [(2, "N5"), (4, "N9"), (6, "N13")] {
                let seed: Vec<f64> = catalog_entry(name)
                    .unwrap()
                    .half_phases_pi
                    .iter()
                    .map(|p| p * std::f64::consts::PI)
                    .collect();
                let solved = solve_nb_phases(m, &seed).unwrap();
                let norm = residual_norm(&nb_residuals(&solved).unwrap());
                println!("{name}: residual norm {norm:.3e}");
                for (lo, hi) in [(1e-3f64, 1e-2f64), (1e-2, 1e-1), (0.05, 0.2), (0.1, 0.4)] {
                    let pts = 12;
                    let mut xs = Vec::new();
                    let mut ys = Vec::new();
                    for k in 0..pts {
                        let d = lo * (hi / lo).powf(k as f64 / (pts - 1) as f64);
                        let p = iongate_core::design::bottom_probability(&solved, TAU + d);
                        xs.push(d.ln());
                        ys.push(p.ln());
                    }
                    let nf = pts as f64;
                    let sx: f64 = xs.iter().sum();
                    let sy: f64 = ys.iter().sum();
                    let sxx: f64 = xs.iter().map(|x| x * x).sum();
                    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
                    let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
                    println!("   [{lo:.0e}, {hi:.0e}]: slope {slope:.3} (want {})", 2 * m + 2);
                }
            }
        }
        "higher" => {
            for n in [3usize, 4] {
                scan_report(n, n + 1, "N13o", 60, 60);
            }
        }
        "higher2" => {
            for n in [5usize, 6] {
                scan_report(n, n + 1, "N13o", 60, 60);
            }
        }
        other => eprintln!("unknown mode {other}"),
    }
}
