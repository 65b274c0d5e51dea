//! Fixtures shared by the benchmarks.

use oxide_fv::scheme::BorderedMatrix;
use oxide_fv::{discretize_initial, InitialMode, Mesh, ModelParams, State};

/// Travelling-wave parameters on a uniform mesh with the initial state.
pub fn testcase1(cells: usize) -> (ModelParams, Mesh, State) {
    let params = ModelParams::testcase1();
    let mesh = Mesh::uniform(cells).expect("cells > 0");
    let state = discretize_initial(&params, &mesh, InitialMode::CellAverage).expect("valid preset");
    (params, mesh, state)
}

/// Diagonally dominant bordered system with a deterministic right-hand side,
/// shaped like the Newton matrices (`k = 3` border unknowns).
pub fn bordered_system(n: usize, k: usize) -> (BorderedMatrix, Vec<f64>) {
    let mut m = BorderedMatrix::zeros(n, k);
    let dim = n + k;
    for i in 0..n {
        let w = 1.0 + (i as f64 * 0.37).sin().abs();
        m.add(i, i, 4.0 * w);
        if i > 0 {
            m.add(i, i - 1, -w);
        }
        if i + 1 < n {
            m.add(i, i + 1, -1.5);
        }
        for j in 0..k {
            m.add(i, n + j, 0.01 * ((i + j) as f64).cos());
            m.add(n + j, i, 0.5 / n as f64);
        }
    }
    for j in 0..k {
        m.add(n + j, n + j, 2.0 + j as f64);
    }
    let rhs = (0..dim).map(|i| (i as f64 * 0.11).cos()).collect();
    (m, rhs)
}

/// Arguments spanning the series, moderate and saturated branches of `B`.
pub fn bernoulli_arguments(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let s = i as f64 / (count - 1).max(1) as f64;
            let r = 10f64.powf(-8.0 + 11.0 * s);
            if i % 2 == 0 {
                r
            } else {
                -r
            }
        })
        .collect()
}
