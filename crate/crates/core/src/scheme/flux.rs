//! Scharfetter-Gummel fluxes and ALE edge velocities.

use crate::bernoulli::{bernoulli, bernoulli_prime};
use crate::error::{check_positive, Result};
use crate::mesh::Mesh;
use crate::state::State;

/// Numerical fluxes `F_{i+1/2}`, `i = 0..=I`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField {
    pub values: Vec<f64>,
}

/// Edge velocities `v_{i+1/2}`, `i = 0..=I`, of the reference mesh relative
/// to the oxide frame.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub values: Vec<f64>,
}

/// Discrete interface rates `(d[X0], d[X1], d[L])` between two levels.
pub fn interface_rates(prev: &State, next: &State, dt: f64) -> (f64, f64, f64) {
    (
        (next.x0 - prev.x0) / dt,
        (next.x1 - prev.x1) / dt,
        (next.width - prev.width) / dt,
    )
}

/// `v_{i+1/2} = (1 - R) d[X1] - xi_{i+1/2} d[L] - d[X0]` at every edge.
pub fn velocities(prev: &State, next: &State, mesh: &Mesh, dt: f64, r: f64) -> VelocityField {
    let (dx0, dx1, dl) = interface_rates(prev, next, dt);
    VelocityField {
        values: mesh
            .edges()
            .iter()
            .map(|&xi| (1.0 - r) * dx1 - xi * dl - dx0)
            .collect(),
    }
}

/// Scharfetter-Gummel flux between two neighbouring values.
///
/// Reduces to the centered diffusive flux `(u_left - u_right) / (L h)` when
/// `v = 0`.
pub fn sg_flux(u_left: f64, u_right: f64, v: f64, width: f64, gap: f64) -> Result<f64> {
    check_positive("L", width)?;
    check_positive("h", gap)?;
    Ok(sg_flux_unchecked(u_left, u_right, v, width, gap))
}

#[inline]
pub(crate) fn sg_flux_unchecked(u_left: f64, u_right: f64, v: f64, width: f64, gap: f64) -> f64 {
    let lh = width * gap;
    let arg = lh * v;
    (bernoulli(-arg) * u_left - bernoulli(arg) * u_right) / lh
}

/// Fluxes of `next` with the velocities of the step `prev -> next`.
pub fn fluxes(prev: &State, next: &State, mesh: &Mesh, dt: f64, r: f64) -> Result<FluxField> {
    check_positive("L", next.width)?;
    let v = velocities(prev, next, mesh, dt, r);
    Ok(FluxField {
        values: (0..=mesh.cells())
            .map(|i| sg_flux_unchecked(next.u[i], next.u[i + 1], v.values[i], next.width, mesh.gaps()[i]))
            .collect(),
    })
}

/// Flux on one edge together with its partial derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EdgeFlux {
    pub value: f64,
    pub d_left: f64,
    pub d_right: f64,
    /// Derivative with respect to the Bernoulli argument `L h v`.
    pub d_arg: f64,
    /// Derivative with respect to `L` at fixed argument.
    pub d_width: f64,
}

#[inline]
pub(crate) fn edge_flux(u_left: f64, u_right: f64, v: f64, width: f64, gap: f64) -> EdgeFlux {
    let lh = width * gap;
    let arg = lh * v;
    let (bm, bp) = (bernoulli(-arg), bernoulli(arg));
    let value = (bm * u_left - bp * u_right) / lh;
    EdgeFlux {
        value,
        d_left: bm / lh,
        d_right: -bp / lh,
        d_arg: (-bernoulli_prime(-arg) * u_left - bernoulli_prime(arg) * u_right) / lh,
        d_width: -value / width,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;
    use crate::tw::{classify, wave_profile_on_mesh, DEFAULT_TOLERANCE};

    #[test]
    fn constant_state_without_drift_has_zero_flux() {
        assert_eq!(sg_flux(2.0, 2.0, 0.0, 1.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn pure_diffusion() {
        assert_eq!(sg_flux(1.0, 0.0, 0.0, 2.0, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn rejects_degenerate_geometry() {
        assert!(sg_flux(1.0, 0.0, 0.0, 0.0, 0.5).is_err());
        assert!(sg_flux(1.0, 0.0, 0.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn velocity_examples() {
        let mesh = Mesh::uniform(4).unwrap();
        let a = State::new(vec![1.0; 6], 0.0, 1.0);
        assert!(velocities(&a, &a, &mesh, 0.1, 2.0).values.iter().all(|&v| v == 0.0));

        // d[X0] = 0, d[X1] = d[L] = 1, R = 2 gives v = -1 - xi.
        let b = State::new(vec![1.0; 6], 0.0, 2.0);
        let v = velocities(&a, &b, &mesh, 1.0, 2.0);
        for (vi, xi) in v.values.iter().zip(mesh.edges()) {
            assert!((vi - (-1.0 - xi)).abs() < 1e-15);
        }
    }

    #[test]
    fn velocity_increments_telescope() {
        let mesh = Mesh::from_edges(vec![0.0, 0.2, 0.5, 0.9, 1.0]).unwrap();
        let a = State::new(vec![1.0; 6], 0.1, 1.3);
        let b = State::new(vec![1.0; 6], 0.15, 1.2);
        let dt = 0.05;
        let v = velocities(&a, &b, &mesh, dt, 1.7);
        let dl = (b.width - a.width) / dt;
        for i in 1..=mesh.cells() {
            let diff = v.values[i] - v.values[i - 1];
            assert!((diff + dl * mesh.h(i)).abs() < 1e-13);
        }
    }

    #[test]
    fn wave_fluxes_vanish() {
        let p = ModelParams::testcase1();
        let w = *classify(&p, DEFAULT_TOLERANCE).unwrap().wave().unwrap();
        let mesh = Mesh::uniform(50).unwrap();
        let u = wave_profile_on_mesh(&w, &mesh);
        let dt = 1e-2;
        let prev = State::new(u.clone(), 0.0, w.l_hat);
        let next = State::new(u, w.c_hat * dt, w.l_hat + w.c_hat * dt);
        let v = velocities(&prev, &next, &mesh, dt, p.r);
        assert!(v.values.iter().all(|&vi| (vi + p.r * w.c_hat).abs() < 1e-12));
        let f = fluxes(&prev, &next, &mesh, dt, p.r).unwrap();
        assert!(f.values.iter().all(|&fi| fi.abs() < 1e-12), "{:?}", f.values);
    }

    #[test]
    fn edge_flux_derivatives() {
        let (ul, ur, v, l, h) = (1.3, 0.7, -2.1, 1.4, 0.05);
        let e = edge_flux(ul, ur, v, l, h);
        let eps = 1e-7;
        let fd_left = (sg_flux_unchecked(ul + eps, ur, v, l, h) - sg_flux_unchecked(ul - eps, ur, v, l, h)) / (2.0 * eps);
        assert!((fd_left - e.d_left).abs() < 1e-6);
        let fd_right = (sg_flux_unchecked(ul, ur + eps, v, l, h) - sg_flux_unchecked(ul, ur - eps, v, l, h)) / (2.0 * eps);
        assert!((fd_right - e.d_right).abs() < 1e-6);
        // Varying v at fixed L and h changes the argument by L h dv.
        let fd_v = (sg_flux_unchecked(ul, ur, v + eps, l, h) - sg_flux_unchecked(ul, ur, v - eps, l, h)) / (2.0 * eps);
        assert!((fd_v - e.d_arg * l * h).abs() < 1e-6);
    }
}
