use super::group::FiniteGroup;
use crate::{Error, Result};

/// Finite set of base points with positive quadrature weights and orientation classes.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseModel {
    pub weights: Vec<f64>,
    pub orientation: Vec<i8>,
}

impl BaseModel {
    pub fn new(weights: Vec<f64>, orientation: Vec<i8>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Parameter("base must have at least one point".into()));
        }
        if weights.len() != orientation.len() {
            return Err(Error::Dimension(
                "weights and orientation lengths differ".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Density(format!("base weight {w} is not positive")));
        }
        if orientation.iter().any(|o| *o != 1 && *o != -1) {
            return Err(Error::Orientation("orientation classes must be ±1".into()));
        }
        Ok(Self {
            weights,
            orientation,
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(vec![1.0; n], vec![1; n]).expect("uniform base")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Arrows of a finite groupoid.
///
/// Composition `g1 g2` is defined when `target(g1) == source(g2)`, and then
/// `source(g1 g2) = source(g1)`, `target(g1 g2) = target(g2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidModel {
    n_objects: usize,
    source: Vec<usize>,
    target: Vec<usize>,
    unit: Vec<usize>,
    inverse: Vec<usize>,
    comp: Vec<Vec<Option<usize>>>,
}

impl GroupoidModel {
    /// Builds a groupoid from explicit tables and checks every relation.
    pub fn from_tables(
        n_objects: usize,
        source: Vec<usize>,
        target: Vec<usize>,
        unit: Vec<usize>,
        inverse: Vec<usize>,
        comp: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let n = source.len();
        let rel = |m: String| Err(Error::GroupoidRelation(m));
        if target.len() != n || inverse.len() != n || comp.len() != n || unit.len() != n_objects {
            return rel("table sizes are inconsistent".into());
        }
        if source.iter().chain(target.iter()).any(|&x| x >= n_objects) {
            return rel("source/target out of range".into());
        }
        for g1 in 0..n {
            if comp[g1].len() != n {
                return rel(format!("composition row {g1} has wrong length"));
            }
            for g2 in 0..n {
                let composable = target[g1] == source[g2];
                match (composable, comp[g1][g2]) {
                    (true, None) => {
                        return rel(format!("composable pair ({g1},{g2}) has no product"))
                    }
                    (false, Some(_)) => {
                        return rel(format!("non-composable pair ({g1},{g2}) has a product"))
                    }
                    (true, Some(p)) => {
                        if p >= n {
                            return rel(format!("product of ({g1},{g2}) out of range"));
                        }
                        if source[p] != source[g1] || target[p] != target[g2] {
                            return rel(format!("source/target of product ({g1},{g2})"));
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for g1 in 0..n {
            for g2 in 0..n {
                let Some(a) = comp[g1][g2] else { continue };
                for g3 in 0..n {
                    let Some(b) = comp[g2][g3] else { continue };
                    if comp[a][g3] != comp[g1][b] {
                        return rel(format!("associativity at ({g1},{g2},{g3})"));
                    }
                }
            }
        }
        for x in 0..n_objects {
            let u = unit[x];
            if u >= n || source[u] != x || target[u] != x {
                return rel(format!("unit of object {x}"));
            }
            for g in 0..n {
                if source[g] == x && comp[u][g] != Some(g) {
                    return rel(format!("left unit law at object {x}, arrow {g}"));
                }
                if target[g] == x && comp[g][u] != Some(g) {
                    return rel(format!("right unit law at object {x}, arrow {g}"));
                }
            }
        }
        for g in 0..n {
            let h = inverse[g];
            if h >= n || comp[g][h] != Some(unit[source[g]]) || comp[h][g] != Some(unit[target[g]])
            {
                return rel(format!("inverse of arrow {g}"));
            }
        }
        Ok(Self {
            n_objects,
            source,
            target,
            unit,
            inverse,
            comp,
        })
    }

    /// Action groupoid of `group` acting on `n` points by `perm[h][x] = h·x`.
    ///
    /// Arrow `(h, x)` has index `h * n + x`, source `x` and target `h·x`.
    pub fn action(group: &FiniteGroup, perm: &[Vec<usize>]) -> Result<Self> {
        let m = group.order();
        if perm.len() != m {
            return Err(Error::Dimension(format!(
                "{} permutations for a group of order {m}",
                perm.len()
            )));
        }
        let n = perm[0].len();
        for (h, p) in perm.iter().enumerate() {
            let mut seen = vec![false; n];
            if p.len() != n {
                return Err(Error::Dimension(format!(
                    "permutation {h} has wrong length"
                )));
            }
            for &y in p {
                if y >= n || seen[y] {
                    return Err(Error::GroupoidRelation(format!(
                        "element {h} does not act by a permutation"
                    )));
                }
                seen[y] = true;
            }
        }
        for h1 in 0..m {
            for h2 in 0..m {
                for x in 0..n {
                    if perm[group.mul(h2, h1)][x] != perm[h2][perm[h1][x]] {
                        return Err(Error::GroupoidRelation(format!(
                            "action law fails for ({h2}·{h1})·{x}"
                        )));
                    }
                }
            }
        }
        if perm[group.identity()]
            .iter()
            .enumerate()
            .any(|(x, &y)| x != y)
        {
            return Err(Error::GroupoidRelation(
                "identity does not act trivially".into(),
            ));
        }
        let idx = |h: usize, x: usize| h * n + x;
        let arrows = m * n;
        let mut source = vec![0; arrows];
        let mut target = vec![0; arrows];
        let mut inverse = vec![0; arrows];
        let mut comp = vec![vec![None; arrows]; arrows];
        for h in 0..m {
            for x in 0..n {
                let g = idx(h, x);
                source[g] = x;
                target[g] = perm[h][x];
                inverse[g] = idx(group.inv(h), perm[h][x]);
            }
        }
        for h1 in 0..m {
            for x in 0..n {
                let y = perm[h1][x];
                for h2 in 0..m {
                    comp[idx(h1, x)][idx(h2, y)] = Some(idx(group.mul(h2, h1), x));
                }
            }
        }
        let unit = (0..n).map(|x| idx(group.identity(), x)).collect();
        Self::from_tables(n, source, target, unit, inverse, comp)
    }

    pub fn trivial(n_objects: usize) -> Self {
        let id: Vec<usize> = (0..n_objects).collect();
        Self::action(&FiniteGroup::trivial(), &[id]).expect("trivial groupoid")
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_arrows(&self) -> usize {
        self.source.len()
    }

    pub fn source(&self, g: usize) -> usize {
        self.source[g]
    }

    pub fn target(&self, g: usize) -> usize {
        self.target[g]
    }

    pub fn unit(&self, x: usize) -> usize {
        self.unit[x]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn compose(&self, g1: usize, g2: usize) -> Option<usize> {
        self.comp[g1][g2]
    }

    /// Arrows with source `x`.
    pub fn from_object(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_arrows()).filter(move |&g| self.source[g] == x)
    }

    /// Arrows with source and target `x`.
    pub fn isotropy(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.from_object(x).filter(move |&g| self.target[g] == x)
    }

    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut o: Vec<usize> = self.from_object(x).map(|g| self.target[g]).collect();
        o.sort_unstable();
        o.dedup();
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_rejects_bad_weight() {
        assert!(BaseModel::new(vec![1.0, 0.0], vec![1, 1]).is_err());
        assert!(BaseModel::new(vec![1.0], vec![0]).is_err());
    }

    #[test]
    fn z2_swapping_two_points() {
        let g = FiniteGroup::cyclic(2);
        let gp = GroupoidModel::action(&g, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(gp.n_arrows(), 4);
        assert_eq!(gp.orbit(0), vec![0, 1]);
        assert_eq!(gp.isotropy(0).count(), 1);
    }

    #[test]
    fn bad_action_law_is_named() {
        let g = FiniteGroup::cyclic(3);
        let perm = vec![vec![0, 1, 2], vec![1, 0, 2], vec![0, 1, 2]];
        match GroupoidModel::action(&g, &perm) {
            Err(Error::GroupoidRelation(m)) => assert!(m.contains("action law")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_product_table_rejected() {
        // two loops at one object where a·a = a but a is declared its own inverse
        let res = GroupoidModel::from_tables(
            1,
            vec![0, 0],
            vec![0, 0],
            vec![0],
            vec![0, 1],
            vec![vec![Some(0), Some(1)], vec![Some(1), Some(1)]],
        );
        assert!(matches!(res, Err(Error::GroupoidRelation(_))));
    }
}
