use crate::{Error, Result};

/// Finite group given by its multiplication table; element 0 need not be the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::GroupLaw("empty group".into()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::GroupLaw(format!("row {a} has length {}", row.len())));
            }
            if let Some(&b) = row.iter().find(|&&b| b >= n) {
                return Err(Error::GroupLaw(format!(
                    "closure: product {b} out of range"
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::GroupLaw(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::GroupLaw("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::GroupLaw(format!("element {a} has no inverse")))?;
        }
        Ok(Self {
            table,
            identity,
            inverse,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(table).expect("cyclic group table")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// Closes a set of generators under a multiplication given as a callback,
    /// returning the elements and the table. Used for groups generated by maps.
    pub fn close<T: Clone + PartialEq>(
        generators: &[T],
        identity: T,
        mul: impl Fn(&T, &T) -> T,
        max_order: usize,
    ) -> Result<(Vec<T>, Self)> {
        let mut elems = vec![identity];
        let mut frontier = 0;
        while frontier < elems.len() {
            let a = elems[frontier].clone();
            for g in generators {
                let p = mul(&a, g);
                if !elems.contains(&p) {
                    if elems.len() >= max_order {
                        return Err(Error::NotProper(format!(
                            "generated group exceeds {max_order} elements"
                        )));
                    }
                    elems.push(p);
                }
            }
            frontier += 1;
        }
        let n = elems.len();
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let p = mul(&elems[i], &elems[j]);
                table[i][j] = elems
                    .iter()
                    .position(|e| *e == p)
                    .ok_or_else(|| Error::GroupLaw("generated set not closed".into()))?;
            }
        }
        let g = Self::from_table(table)?;
        Ok((elems, g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_inverses() {
        let g = FiniteGroup::cyclic(5);
        for a in 0..5 {
            assert_eq!(g.mul(a, g.inv(a)), g.identity());
        }
    }

    #[test]
    fn rejects_non_associative() {
        let t = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 2, 0]];
        assert!(FiniteGroup::from_table(t).is_err());
    }

    #[test]
    fn closes_permutations_of_three() {
        let swap = vec![1usize, 0, 2];
        let cyc = vec![1usize, 2, 0];
        let comp = |a: &Vec<usize>, b: &Vec<usize>| (0..3).map(|i| a[b[i]]).collect::<Vec<_>>();
        let (elems, g) = FiniteGroup::close(&[swap, cyc], vec![0, 1, 2], comp, 100).unwrap();
        assert_eq!(elems.len(), 6);
        assert_eq!(g.order(), 6);
    }

    #[test]
    fn infinite_generator_is_not_proper() {
        let res = FiniteGroup::close(&[1i64], 0i64, |a, b| a + b, 64);
        assert!(matches!(res, Err(Error::NotProper(_))));
    }
}
