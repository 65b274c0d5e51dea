use crate::mesh::Mesh;

/// Discrete norms of one field, plus the space-time norm of a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteNorms {
    pub h1: f64,
    pub l2h1: f64,
    pub l2: f64,
}

impl DiscreteNorms {
    /// Norms of `levels.last()` and the `L2(H1)` norm of `levels[1..]`.
    pub fn of(levels: &[Vec<f64>], dt: f64, mesh: &Mesh) -> Self {
        let last = levels.last().expect("at least one level");
        Self {
            h1: h1_norm(last, mesh),
            l2h1: l2h1_norm(&levels[1..], dt, mesh),
            l2: l2_norm(last, mesh),
        }
    }
}

/// `(sum_{i=1}^{I+1} (z_i - z_{i-1})^2 / h_{i-1/2} + z_0^2)^{1/2}` for a
/// vector of length `I + 2` (traces included).
pub fn h1_norm(z: &[f64], mesh: &Mesh) -> f64 {
    assert_eq!(z.len(), mesh.cells() + 2);
    let jumps: f64 = z
        .windows(2)
        .zip(mesh.gaps())
        .map(|(w, g)| (w[1] - w[0]).powi(2) / g)
        .sum();
    (jumps + z[0] * z[0]).sqrt()
}

/// `L2(0, 1)` norm of the piecewise-constant reconstruction on the cells.
pub fn l2_norm(z: &[f64], mesh: &Mesh) -> f64 {
    let interior = &z[1..=mesh.cells()];
    mesh.sizes()
        .iter()
        .zip(interior)
        .map(|(h, v)| h * v * v)
        .sum::<f64>()
        .sqrt()
}

/// `(sum_n dt ||z^n||_1^2)^{1/2}`.
pub fn l2h1_norm(levels: &[Vec<f64>], dt: f64, mesh: &Mesh) -> f64 {
    levels
        .iter()
        .map(|z| dt * h1_norm(z, mesh).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_vector() {
        let mesh = Mesh::uniform(7).unwrap();
        assert!((h1_norm(&[-2.5; 9], &mesh) - 2.5).abs() < 1e-15);
        assert!((l2_norm(&[-2.5; 9], &mesh) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn hat_on_two_cells() {
        let mesh = Mesh::uniform(2).unwrap();
        assert!((h1_norm(&[0.0, 1.0, 0.0, 0.0], &mesh) - 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn space_time_norm_of_constant_sequence() {
        let mesh = Mesh::uniform(4).unwrap();
        let levels = vec![vec![0.0; 6], vec![2.0; 6], vec![2.0; 6]];
        let n = DiscreteNorms::of(&levels, 0.5, &mesh);
        assert!((n.l2h1 - 2.0).abs() < 1e-14);
        assert!((n.h1 - 2.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn poincare(z in prop::collection::vec(-10.0f64..10.0, 3..60)) {
            let mesh = Mesh::uniform(z.len() - 2).unwrap();
            prop_assert!(l2_norm(&z, &mesh) <= 2f64.sqrt() * h1_norm(&z, &mesh) + 1e-12);
        }

        #[test]
        fn poincare_nonuniform(
            z in prop::collection::vec(-10.0f64..10.0, 12),
            w in prop::collection::vec(0.1f64..1.0, 10),
        ) {
            let total: f64 = w.iter().sum();
            let mut edges = vec![0.0];
            let mut acc = 0.0;
            for x in &w[..9] {
                acc += x / total;
                edges.push(acc);
            }
            edges.push(1.0);
            let mesh = Mesh::from_edges(edges).unwrap();
            prop_assert!(l2_norm(&z, &mesh) <= 2f64.sqrt() * h1_norm(&z, &mesh) + 1e-12);
        }
    }
}
