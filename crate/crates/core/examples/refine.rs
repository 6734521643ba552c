use iongate_core::*;
use std::time::Instant;
fn main() {
    let nb = catalog("N13o").unwrap();
    for n in [4usize, 5, 6] {
        for dv in [1usize, 2, 3, 4] {
            let v0 = n + dv;
            let t = Instant::now();
            let grid = scan_fidelity(n, v0, &nb, Axis::new(0.2, 0.9, 30).unwrap(), Axis::new(0.9, 1.1, 30).unwrap()).unwrap();
            let (i, j, f) = grid.max_cell();
            println!("n={n} v0={v0}: max = {f:.6} at eta={:.4} a={:.5}  [{:?}]", grid.etas[i], grid.area_scales[j], t.elapsed());
        }
    }
}
