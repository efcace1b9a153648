use num_rational::Rational64;

use super::group::FiniteGroup;
use super::groupoid::{BaseModel, GroupoidModel};
use crate::{Error, Result};

pub const MAX_GRID: usize = 128;

/// Uniform grid on the flat torus `[0,1)^r`, point index `i0 + n*i1 + ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    pub dim: usize,
    pub n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Unsupported(format!(
                "torus fibers of dimension {dim}"
            )));
        }
        if n == 0 || n > MAX_GRID {
            return Err(Error::Parameter(format!(
                "grid size {n} outside 1..={MAX_GRID}"
            )));
        }
        Ok(Self { dim, n })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of each point (the torus has volume 1).
    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn multi_index(&self, p: usize) -> [usize; 2] {
        [p % self.n, (p / self.n) % self.n]
    }

    pub fn flat_index(&self, idx: &[i64]) -> usize {
        let n = self.n as i64;
        let mut p = 0usize;
        let mut stride = 1usize;
        for &i in idx.iter().take(self.dim) {
            p += (i.rem_euclid(n) as usize) * stride;
            stride *= self.n;
        }
        p
    }

    pub fn point(&self, p: usize) -> Vec<f64> {
        let m = self.multi_index(p);
        (0..self.dim).map(|k| m[k] as f64 / self.n as f64).collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|p| self.point(p)).collect()
    }

    /// Minimal-image difference `b − a` per coordinate, in `[−½, ½)`.
    pub fn min_image(a: f64, b: f64) -> f64 {
        let d = b - a;
        d - (d + 0.5).floor()
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| Self::min_image(*x, *y).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Affine self-map `z ↦ A z + θ (mod 1)` of `T^r` with integer `A` and rational `θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub dim: usize,
    pub a: Vec<i64>,
    pub shift: Vec<Rational64>,
}

fn frac(q: Rational64) -> Rational64 {
    q - q.floor()
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        num_integer_gcd(b, a % b)
    }
}

impl AffineMap {
    pub fn new(dim: usize, a: Vec<i64>, shift: Vec<Rational64>) -> Result<Self> {
        if a.len() != dim * dim || shift.len() != dim {
            return Err(Error::Dimension("affine map shape".into()));
        }
        let m = Self {
            dim,
            a,
            shift: shift.into_iter().map(frac).collect(),
        };
        let det = m.det();
        if det.abs() != 1 {
            return Err(Error::Parameter(format!(
                "linear part has determinant {det}, not ±1"
            )));
        }
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        let mut a = vec![0; dim * dim];
        for i in 0..dim {
            a[i * dim + i] = 1;
        }
        Self {
            dim,
            a,
            shift: vec![Rational64::from_integer(0); dim],
        }
    }

    pub fn translation(shift: Vec<Rational64>) -> Self {
        let dim = shift.len();
        let id = Self::identity(dim);
        Self {
            shift: shift.into_iter().map(frac).collect(),
            ..id
        }
    }

    pub fn linear(dim: usize, a: Vec<i64>) -> Result<Self> {
        Self::new(dim, a, vec![Rational64::from_integer(0); dim])
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.dim + j]
    }

    pub fn det(&self) -> i64 {
        match self.dim {
            1 => self.a[0],
            2 => self.a[0] * self.a[3] - self.a[1] * self.a[2],
            _ => unreachable!(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut a = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = (0..d).map(|k| self.entry(i, k) * other.entry(k, j)).sum();
            }
        }
        let shift = (0..d)
            .map(|i| {
                let s: Rational64 = (0..d)
                    .map(|k| Rational64::from_integer(self.entry(i, k)) * other.shift[k])
                    .sum();
                frac(s + self.shift[i])
            })
            .collect();
        Self { dim: d, a, shift }
    }

    pub fn inverse(&self) -> Self {
        let d = self.dim;
        let det = self.det();
        let ainv = match d {
            1 => vec![self.a[0]],
            _ => vec![
                self.a[3] * det,
                -self.a[1] * det,
                -self.a[2] * det,
                self.a[0] * det,
            ],
        };
        let lin = Self {
            dim: d,
            a: ainv,
            shift: vec![Rational64::from_integer(0); d],
        };
        let back = lin.compose(&Self::translation(self.shift.clone()));
        Self {
            shift: back.shift.iter().map(|s| frac(-*s)).collect(),
            ..lin
        }
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let s = (0..d).map(|k| self.entry(i, k) as f64 * z[k]).sum::<f64>()
                    + *self.shift[i].numer() as f64 / *self.shift[i].denom() as f64;
                s - s.floor()
            })
            .collect()
    }

    /// Whether the map permutes the points of `grid`.
    pub fn preserves(&self, grid: &TorusGrid) -> bool {
        let n = grid.n as i64;
        self.shift
            .iter()
            .all(|s| (*s * Rational64::from_integer(n)).is_integer())
    }

    /// Image of grid point `p`, when the map preserves the grid.
    pub fn apply_index(&self, grid: &TorusGrid, p: usize) -> Option<usize> {
        if !self.preserves(grid) {
            return None;
        }
        let n = grid.n as i64;
        let m = grid.multi_index(p);
        let d = self.dim;
        let idx: Vec<i64> = (0..d)
            .map(|i| {
                (0..d).map(|k| self.entry(i, k) * m[k] as i64).sum::<i64>()
                    + (self.shift[i] * Rational64::from_integer(n)).to_integer()
            })
            .collect();
        Some(grid.flat_index(&idx))
    }

    /// Linear part as a real matrix, row-major.
    pub fn jacobian(&self) -> Vec<f64> {
        self.a.iter().map(|&v| v as f64).collect()
    }

    /// Whether `A z + θ ≡ z (mod 1)` has a solution.
    pub fn has_fixed_point(&self) -> bool {
        let d = self.dim;
        let m: Vec<i64> = (0..d * d)
            .map(|k| {
                if k / d == k % d {
                    1 - self.a[k]
                } else {
                    -self.a[k]
                }
            })
            .collect();
        let rank = if m.iter().all(|&v| v == 0) {
            0
        } else if d == 1 || m[0] * m[3] - m[1] * m[2] != 0 {
            d
        } else {
            1
        };
        if rank == d {
            return true;
        }
        if rank == 0 {
            return self.shift.iter().all(|s| *s.numer() == 0);
        }
        // image of I − A is the rational line spanned by a nonzero column v;
        // θ lies on it modulo Z² iff w·θ ∈ Z for the primitive normal w
        let (v0, v1) = if m[0] != 0 || m[2] != 0 {
            (m[0], m[2])
        } else {
            (m[1], m[3])
        };
        let g = num_integer_gcd(v0.abs(), v1.abs());
        let (w0, w1) = (-v1 / g, v0 / g);
        (Rational64::from_integer(w0) * self.shift[0]
            + Rational64::from_integer(w1) * self.shift[1])
            .is_integer()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }
}

/// Proper fibered G-space: a torus fiber over each base point, with each arrow `g`
/// acting by an affine map from the fiber over `target(g)` to the fiber over `source(g)`,
/// so that `act(g1 g2) = act(g1) ∘ act(g2)`.
#[derive(Clone, Debug)]
pub struct FiberedGSpace {
    pub base: BaseModel,
    pub groupoid: GroupoidModel,
    pub grid: TorusGrid,
    maps: Vec<AffineMap>,
}

impl FiberedGSpace {
    pub fn new(
        base: BaseModel,
        groupoid: GroupoidModel,
        grid: TorusGrid,
        maps: Vec<AffineMap>,
    ) -> Result<Self> {
        if groupoid.n_objects() != base.len() {
            return Err(Error::Dimension(
                "groupoid objects and base points differ".into(),
            ));
        }
        if maps.len() != groupoid.n_arrows() {
            return Err(Error::Dimension(
                "one fiber map per arrow is required".into(),
            ));
        }
        if maps.iter().any(|m| m.dim != grid.dim) {
            return Err(Error::Dimension("fiber map dimension".into()));
        }
        for x in 0..base.len() {
            if !maps[groupoid.unit(x)].is_identity() {
                return Err(Error::GroupoidRelation(format!(
                    "unit at {x} acts nontrivially"
                )));
            }
        }
        for g1 in 0..groupoid.n_arrows() {
            for g2 in 0..groupoid.n_arrows() {
                if let Some(p) = groupoid.compose(g1, g2) {
                    if maps[p] != maps[g1].compose(&maps[g2]) {
                        return Err(Error::GroupoidRelation(format!(
                            "action is not functorial at ({g1},{g2})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            base,
            groupoid,
            grid,
            maps,
        })
    }

    /// Space from a group action: `perm[h][x] = h·x` on the base and `fiber[h]` the map
    /// `z ↦ h·z` between fibers. The arrow `(h, x)` then acts by `fiber[h⁻¹]`.
    pub fn from_group_action(
        base: BaseModel,
        group: &FiniteGroup,
        perm: &[Vec<usize>],
        fiber: &[AffineMap],
        grid: TorusGrid,
    ) -> Result<Self> {
        let groupoid = GroupoidModel::action(group, perm)?;
        if fiber.len() != group.order() {
            return Err(Error::Dimension(
                "one fiber map per group element is required".into(),
            ));
        }
        let n = base.len();
        let maps = (0..groupoid.n_arrows())
            .map(|g| fiber[group.inv(g / n)].clone())
            .collect();
        Self::new(base, groupoid, grid, maps)
    }

    /// A single torus fiber with no symmetry.
    pub fn single_torus(dim: usize, n: usize) -> Result<Self> {
        let grid = TorusGrid::new(dim, n)?;
        Self::new(
            BaseModel::uniform(1),
            GroupoidModel::trivial(1),
            grid,
            vec![AffineMap::identity(dim)],
        )
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn n_base(&self) -> usize {
        self.base.len()
    }

    pub fn fiber_len(&self) -> usize {
        self.grid.len()
    }

    pub fn act(&self, g: usize) -> &AffineMap {
        &self.maps[g]
    }

    /// Whether every arrow maps grid points to grid points.
    pub fn grid_preserving(&self) -> bool {
        self.maps.iter().all(|m| m.preserves(&self.grid))
    }

    /// Grid permutation of `act(g)` (fiber `target(g)` → fiber `source(g)`).
    pub fn grid_perm(&self, g: usize) -> Result<Vec<usize>> {
        let m = &self.maps[g];
        (0..self.grid.len())
            .map(|p| {
                m.apply_index(&self.grid, p).ok_or_else(|| {
                    Error::Unsupported(format!("arrow {g} does not preserve the grid"))
                })
            })
            .collect()
    }

    /// Fails unless no non-unit isotropy arrow fixes a point of the fiber grid.
    pub fn check_free(&self) -> Result<()> {
        let gp = &self.groupoid;
        for x in 0..self.n_base() {
            for g in gp.isotropy(x) {
                if g == gp.unit(x) {
                    continue;
                }
                if self.maps[g].has_fixed_point() {
                    return Err(Error::NotFree(format!(
                        "arrow {g} over base point {x} has a fixed point"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn compose_and_inverse_exact() {
        let m = AffineMap::new(2, vec![0, 1, 1, 0], vec![q(1, 3), q(1, 2)]).unwrap();
        let id = m.compose(&m.inverse());
        assert!(id.is_identity());
        assert!(m.inverse().compose(&m).is_identity());
    }

    #[test]
    fn half_shift_permutes_grid() {
        let g = TorusGrid::new(2, 6).unwrap();
        let m = AffineMap::translation(vec![q(1, 2), q(0, 1)]);
        assert_eq!(m.apply_index(&g, 0), Some(3));
        assert!(!AffineMap::translation(vec![q(1, 4), q(0, 1)]).preserves(&g));
    }

    #[test]
    fn free_z2_on_torus() {
        let grid = TorusGrid::new(2, 6).unwrap();
        let g = FiniteGroup::cyclic(2);
        let maps = [
            AffineMap::identity(2),
            AffineMap::translation(vec![q(1, 2), q(0, 1)]),
        ];
        let s = FiberedGSpace::from_group_action(
            BaseModel::uniform(1),
            &g,
            &[vec![0], vec![0]],
            &maps,
            grid,
        )
        .unwrap();
        assert!(s.check_free().is_ok());
        let flip = [
            AffineMap::identity(2),
            AffineMap::linear(2, vec![-1, 0, 0, -1]).unwrap(),
        ];
        let s = FiberedGSpace::from_group_action(
            BaseModel::uniform(1),
            &g,
            &[vec![0], vec![0]],
            &flip,
            grid,
        )
        .unwrap();
        assert!(matches!(s.check_free(), Err(Error::NotFree(_))));
    }

    #[test]
    fn glide_reflection_is_free() {
        let m = AffineMap::new(2, vec![1, 0, 0, -1], vec![q(1, 2), q(0, 1)]).unwrap();
        assert!(!m.has_fixed_point());
        let r = AffineMap::new(2, vec![1, 0, 0, -1], vec![q(0, 1), q(1, 2)]).unwrap();
        assert!(r.has_fixed_point());
    }

    #[test]
    fn non_functorial_maps_rejected() {
        let grid = TorusGrid::new(1, 4).unwrap();
        let g = FiniteGroup::cyclic(2);
        let maps = [
            AffineMap::identity(1),
            AffineMap::translation(vec![q(1, 3)]),
        ];
        let res = FiberedGSpace::from_group_action(
            BaseModel::uniform(1),
            &g,
            &[vec![0], vec![0]],
            &maps,
            grid,
        );
        assert!(matches!(res, Err(Error::GroupoidRelation(_))));
    }
}
