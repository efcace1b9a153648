use std::sync::Arc;

use super::density::CutoffDensity;
use super::space::FiberedGSpace;
use crate::{Error, Result};

/// Symmetric-matrix-valued field on the fibers, row-major `r×r`.
pub type MetricFn = Arc<dyn Fn(usize, &[f64]) -> Vec<f64> + Send + Sync>;

/// Leafwise metric obtained by cut-off averaging; invariant under the action.
#[derive(Clone)]
pub struct LeafwiseMetric {
    rho: MetricFn,
    cutoff: CutoffDensity,
}

fn is_positive_definite(m: &[f64], r: usize) -> bool {
    let sym = (0..r).all(|i| {
        (0..r).all(|j| (m[i * r + j] - m[j * r + i]).abs() <= 1e-12 * (1.0 + m[i * r + j].abs()))
    });
    sym && match r {
        1 => m[0] > 0.0,
        _ => m[0] > 0.0 && m[0] * m[3] - m[1] * m[2] > 0.0,
    }
}

/// `η(z) = Σ_{g ∈ G^{μ(z)}} Aᵀ ρ(g⁻¹z) A · c(g⁻¹z)` with `A` the linear part of `act(g⁻¹)`.
pub fn average_metric(
    space: &FiberedGSpace,
    rho: MetricFn,
    cutoff: &CutoffDensity,
) -> Result<LeafwiseMetric> {
    let m = LeafwiseMetric {
        rho,
        cutoff: cutoff.clone(),
    };
    let r = space.dim();
    for x in 0..space.n_base() {
        for z in space.grid.points() {
            let raw = (m.rho)(x, &z);
            if raw.len() != r * r || !is_positive_definite(&raw, r) {
                return Err(Error::Metric(format!(
                    "input metric at base point {x}, z = {z:?}"
                )));
            }
            let eta = m.eval(space, x, &z)?;
            if !is_positive_definite(&eta, r) {
                return Err(Error::Metric(format!("averaged metric at base point {x}")));
            }
        }
    }
    Ok(m)
}

impl LeafwiseMetric {
    pub fn eval(&self, space: &FiberedGSpace, x: usize, z: &[f64]) -> Result<Vec<f64>> {
        let r = space.dim();
        let gp = &space.groupoid;
        let mut eta = vec![0.0; r * r];
        for g in gp.from_object(x) {
            let phi = space.act(gp.inverse(g));
            let w = phi.apply(z);
            let y = gp.target(g);
            let c = self.cutoff.eval(space, y, &w)?;
            let rho = (self.rho)(y, &w);
            let a = phi.jacobian();
            for i in 0..r {
                for j in 0..r {
                    let mut s = 0.0;
                    for k in 0..r {
                        for l in 0..r {
                            s += a[k * r + i] * rho[k * r + l] * a[l * r + j];
                        }
                    }
                    eta[i * r + j] += c * s;
                }
            }
        }
        Ok(eta)
    }

    /// Largest entry of `act(g)^* η − η` over arrows and grid points.
    pub fn invariance_defect(&self, space: &FiberedGSpace) -> Result<f64> {
        let r = space.dim();
        let gp = &space.groupoid;
        let mut worst: f64 = 0.0;
        for g in 0..gp.n_arrows() {
            let phi = space.act(g);
            let a = phi.jacobian();
            for z in space.grid.points() {
                let here = self.eval(space, gp.target(g), &z)?;
                let there = self.eval(space, gp.source(g), &phi.apply(&z))?;
                for i in 0..r {
                    for j in 0..r {
                        let mut s = 0.0;
                        for k in 0..r {
                            for l in 0..r {
                                s += a[k * r + i] * there[k * r + l] * a[l * r + j];
                            }
                        }
                        worst = worst.max((s - here[i * r + j]).abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{compute_cutoff, AffineMap, BaseModel, FiniteGroup, Seed, TorusGrid};

    fn swap_space() -> FiberedGSpace {
        let g = FiniteGroup::cyclic(2);
        let maps = [
            AffineMap::identity(2),
            AffineMap::linear(2, vec![0, 1, 1, 0]).unwrap(),
        ];
        FiberedGSpace::from_group_action(
            BaseModel::uniform(1),
            &g,
            &[vec![0], vec![0]],
            &maps,
            TorusGrid::new(2, 4).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn swap_averages_diag_1_4() {
        let s = swap_space();
        let c = compute_cutoff(&s, Seed::Uniform).unwrap();
        let m = average_metric(&s, Arc::new(|_, _: &[f64]| vec![1.0, 0.0, 0.0, 4.0]), &c).unwrap();
        let eta = m.eval(&s, 0, &[0.3, 0.1]).unwrap();
        for (a, b) in eta.iter().zip([2.5, 0.0, 0.0, 2.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(m.invariance_defect(&s).unwrap() < 1e-14);
    }

    #[test]
    fn indefinite_metric_rejected() {
        let s = swap_space();
        let c = compute_cutoff(&s, Seed::Uniform).unwrap();
        let res = average_metric(&s, Arc::new(|_, _: &[f64]| vec![1.0, 0.0, 0.0, -1.0]), &c);
        assert!(matches!(res, Err(Error::Metric(_))));
    }
}
