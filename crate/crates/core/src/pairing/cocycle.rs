use num_complex::Complex64;

use crate::calculus::{Circulant, IndexIdempotent, KernelBlock};
use crate::cohomology::{ASCochain, Factor, Term};
use crate::groupoid::{CutoffDensity, FiberedGSpace, TorusGrid, TransversalDensity};
use crate::linalg::{e_grid, CMat};
use crate::{Error, Result};

const INVARIANCE_TOL: f64 = 1e-8;

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // insert n−1 at position i; each step past an element flips the sign
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            let sign = if (n - 1 - i) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// Alternating projection `(1/(k+1)!) Σ_σ sgn σ · φ∘σ`, computed slotwise on tensors.
///
/// Lifts stay relative to the first point of the tuple, which is exact for cochains
/// whose monomial parts are translation invariant as a whole (such as the area cocycle).
pub fn alternate(phi: &ASCochain) -> ASCochain {
    let n = phi.degree + 1;
    let perms = permutations(n);
    let norm = 1.0 / perms.len() as f64;
    let mut terms = Vec::with_capacity(phi.terms.len() * perms.len());
    for t in &phi.terms {
        for (p, s) in &perms {
            terms.push(Term {
                coeff: t.coeff * s * norm,
                factors: p.iter().map(|&i| t.factors[i].clone()).collect(),
            });
        }
    }
    ASCochain {
        dim: phi.dim,
        degree: phi.degree,
        terms,
    }
}

/// Largest `|φ(g·z) − φ(z)|` over arrows `g` and a deterministic set of small grid tuples.
pub fn cochain_invariance_defect(phi: &ASCochain, space: &FiberedGSpace) -> Result<f64> {
    let grid = space.grid;
    let g = grid.len();
    let n = phi.degree + 1;
    let mut worst: f64 = 0.0;
    for base in (0..g).step_by((g / 7).max(1)) {
        let idx = grid.multi_index(base);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let off: Vec<i64> = (0..grid.dim)
                    .map(|j| idx[j] as i64 + ((i * (j + 2)) % 3) as i64)
                    .collect();
                grid.point(grid.flat_index(&off))
            })
            .collect();
        let v = phi.eval(&pts)?;
        for a in 0..space.groupoid.n_arrows() {
            let m = space.act(a);
            let moved: Vec<Vec<f64>> = pts.iter().map(|z| m.apply(z)).collect();
            worst = worst.max((phi.eval(&moved)? - v).norm());
        }
    }
    Ok(worst)
}

/// A factor split as `Σ A(z_0) B(Δ)` with `Δ` the minimal-image offset from `z_0`.
struct Piece {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn pieces(f: &Factor, grid: &TorusGrid) -> Vec<Piece> {
    let pts = grid.points();
    let offs: Vec<Vec<f64>> = pts
        .iter()
        .map(|z| z.iter().map(|v| TorusGrid::min_image(0.0, *v)).collect())
        .collect();
    let dim = grid.dim;
    // all exponent splits l ≤ p per coordinate
    let mut splits: Vec<Vec<u32>> = vec![Vec::new()];
    for j in 0..dim {
        splits = splits
            .into_iter()
            .flat_map(|s| (0..=f.powers[j]).map(move |l| [s.clone(), vec![l]].concat()))
            .collect();
    }
    let mut out = Vec::new();
    for (mu, coeff) in &f.trig.terms {
        for l in &splits {
            let c: f64 = (0..dim).map(|j| binomial(f.powers[j], l[j])).product();
            let phase = |z: &[f64]| {
                let t: f64 = mu.iter().zip(z).map(|(m, v)| *m as f64 * v).sum();
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
            };
            let a = pts
                .iter()
                .map(|z| {
                    *coeff
                        * c
                        * phase(z)
                        * (0..dim)
                            .map(|j| z[j].powi((f.powers[j] - l[j]) as i32))
                            .product::<f64>()
                })
                .collect();
            let b = offs
                .iter()
                .map(|d| phase(d) * (0..dim).map(|j| d[j].powi(l[j] as i32)).product::<f64>())
                .collect();
            out.push(Piece { a, b });
        }
    }
    out
}

/// `(P̃ ⋆ R)(Δ) = Σ_Δ' P̃(Δ − Δ') R(Δ')` through the DFT symbol `phat` of `P̃`.
fn convolve(grid: TorusGrid, phat: &[CMat], r: &[CMat]) -> Vec<CMat> {
    let mut c = Circulant::from_position(grid, r);
    for (s, p) in c.sym.iter_mut().zip(phat) {
        *s = p * &*s;
    }
    c.cols = c.sym[0].ncols();
    c.position()
}

/// `Σ_{Δ_1..Δ_n} Π B_i(Δ_i) tr[P̃(−Δ_1) P̃(Δ_1 − Δ_2) ⋯ P̃(Δ_n)]` for a translation-invariant `P`.
fn circulant_chain(
    grid: TorusGrid,
    phat: &[CMat],
    ppos: &[CMat],
    bs: &[&[Complex64]],
) -> Complex64 {
    let g = grid.len();
    let Some((last, rest)) = bs.split_last() else {
        return ppos[0].trace();
    };
    let mut r: Vec<CMat> = ppos.iter().zip(last.iter()).map(|(p, b)| p * *b).collect();
    for b in rest.iter().rev() {
        r = convolve(grid, phat, &r);
        for (m, v) in r.iter_mut().zip(b.iter()) {
            *m *= *v;
        }
    }
    (0..g)
        .map(|p| {
            let idx = grid.multi_index(p);
            let neg: Vec<i64> = idx.iter().take(grid.dim).map(|v| -(*v as i64)).collect();
            (&ppos[grid.flat_index(&neg)] * &r[p]).trace()
        })
        .sum()
}

fn support_mask(grid: &TorusGrid, radius: Option<f64>) -> Vec<f64> {
    let zero = vec![0.0; grid.dim];
    grid.points()
        .iter()
        .map(|z| {
            if radius.is_none_or(|r| grid.distance(&zero, z) < r) {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

fn raw_circulant(
    phi: &ASCochain,
    c: &Circulant,
    e: &CMat,
    weights: &[f64],
    mask: &[f64],
) -> Complex64 {
    let grid = c.grid;
    let phat: Vec<CMat> = c.sym.iter().map(|s| s + e).collect();
    let mut ppos = c.position();
    ppos[0] += e;
    let mut total = Complex64::new(0.0, 0.0);
    for t in &phi.terms {
        let slots: Vec<Vec<Piece>> = t
            .factors
            .iter()
            .map(|f| {
                let mut ps = pieces(f, &grid);
                for p in ps.iter_mut() {
                    for (b, m) in p.b.iter_mut().zip(mask) {
                        *b *= *m;
                    }
                }
                ps
            })
            .collect();
        // slot 0 sits at Δ = 0
        let mut slots = slots;
        for p in slots[0].iter_mut() {
            let b0 = p.b[0];
            p.a.iter_mut().for_each(|v| *v *= b0);
        }
        // enumerate one piece per slot
        let mut choice = vec![0usize; slots.len()];
        loop {
            let a: Complex64 = (0..grid.len())
                .map(|p| {
                    let prod: Complex64 =
                        slots.iter().zip(&choice).map(|(s, &i)| s[i].a[p]).product();
                    prod * weights[p]
                })
                .sum();
            if a.norm() > 0.0 {
                let bs: Vec<&[Complex64]> = slots
                    .iter()
                    .zip(&choice)
                    .skip(1)
                    .map(|(s, &i)| s[i].b.as_slice())
                    .collect();
                total += t.coeff * a * circulant_chain(grid, &phat, &ppos, &bs);
            }
            let mut j = 0;
            while j < choice.len() {
                choice[j] += 1;
                if choice[j] < slots[j].len() {
                    break;
                }
                choice[j] = 0;
                j += 1;
            }
            if j == choice.len() {
                break;
            }
        }
    }
    total
}

fn raw_dense(
    phi: &ASCochain,
    p: &CMat,
    grid: &TorusGrid,
    r: usize,
    weights: &[f64],
    radius: Option<f64>,
) -> Complex64 {
    let pts = grid.points();
    let g = grid.len();
    let mut total = Complex64::new(0.0, 0.0);
    for t in &phi.terms {
        let f0: Vec<Complex64> = pts.iter().map(|z| t.factors[0].eval(z)).collect();
        let mut y = p.clone();
        for (i, f) in t.factors.iter().enumerate().skip(1) {
            if i > 1 {
                y = &y * p;
            }
            for a in 0..g {
                for b in 0..g {
                    let inside = radius.is_none_or(|rad| grid.distance(&pts[a], &pts[b]) < rad);
                    let w = if inside {
                        let lifted: Vec<f64> = pts[a]
                            .iter()
                            .zip(&pts[b])
                            .map(|(u, v)| u + TorusGrid::min_image(*u, *v))
                            .collect();
                        f.eval(&lifted)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    y.view_mut((a * r, b * r), (r, r))
                        .iter_mut()
                        .for_each(|v| *v *= w);
                }
            }
        }
        if t.factors.len() > 1 {
            y = &y * p;
        }
        let s: Complex64 = (0..g)
            .map(|a| {
                f0[a] * weights[a] * (0..r).map(|i| y[(a * r + i, a * r + i)]).sum::<Complex64>()
            })
            .sum();
        total += t.coeff * s;
    }
    total
}

/// Normalization `(2k)!/k!` of the pairing of a degree-`2k` cochain.
pub fn pairing_normalization(k: usize) -> f64 {
    ((k + 1)..=(2 * k)).map(|i| i as f64).product()
}

/// Pairing of an invariant even-degree cochain with the class of `(P, e)`.
pub fn pair_cocycle(
    phi: &ASCochain,
    idem: &IndexIdempotent,
    space: &FiberedGSpace,
    cutoff: &CutoffDensity,
    omega: &TransversalDensity,
) -> Result<Complex64> {
    pair_cocycle_within(phi, idem, space, cutoff, omega, None)
}

/// As [`pair_cocycle`], with `φ` cut down to tuples whose points lie within `radius`
/// of the first one.
pub fn pair_cocycle_within(
    phi: &ASCochain,
    idem: &IndexIdempotent,
    space: &FiberedGSpace,
    cutoff: &CutoffDensity,
    omega: &TransversalDensity,
    radius: Option<f64>,
) -> Result<Complex64> {
    if phi.degree % 2 != 0 {
        return Err(Error::Degree(format!(
            "pairing needs an even-degree cochain, got {}",
            phi.degree
        )));
    }
    if phi.dim != space.dim() || idem.grid != space.grid || idem.s.blocks.len() != space.n_base() {
        return Err(Error::Dimension(
            "cochain, idempotent and space disagree".into(),
        ));
    }
    if let Some(r) = radius {
        if !(r > 0.0 && r <= 0.5) {
            return Err(Error::Parameter(format!(
                "support radius {r} outside (0, 1/2]: lifts are undefined beyond 1/2"
            )));
        }
    }
    let defect = cochain_invariance_defect(phi, space)?;
    if defect > INVARIANCE_TOL {
        return Err(Error::NotInvariant { defect });
    }
    let k = phi.degree / 2;
    let alt = alternate(phi);
    let e = idem.e_point();
    let grid = space.grid;
    let mask = support_mask(&grid, radius);
    let mut raw = Complex64::new(0.0, 0.0);
    for (x, block) in idem.s.blocks.iter().enumerate() {
        let scale = space.base.weights[x] * omega.values[x];
        let weights = &cutoff.values[x];
        let chain = match block {
            KernelBlock::Circulant(c) => raw_circulant(&alt, c, &e, weights, &mask),
            KernelBlock::Dense(s) => {
                let p = s + e_grid(idem.rank_dom, idem.rank_cod, grid.len());
                raw_dense(&alt, &p, &grid, idem.rank(), weights, radius)
            }
        };
        // e-term: only the diagonal tuple survives
        let pts = grid.points();
        let e_term: Complex64 = pts
            .iter()
            .zip(weights)
            .map(|(z, w)| {
                alt.eval(&vec![z.clone(); phi.degree + 1])
                    .map(|v| v * *w * e.trace())
            })
            .sum::<Result<Complex64>>()?;
        raw += (chain - e_term) * scale;
    }
    Ok(raw * pairing_normalization(k))
}
