use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use leafwise_core::calculus::{
    analytic_index, index_idempotent, parametrix, read_dense, write_dense, LeafwiseOperatorFamily,
    OperatorMatrix, SectionBasis,
};
use leafwise_core::cohomology::{van_est_lambda, ASCochain, Factor, Term, TrigPoly};
use leafwise_core::groupoid::{
    compute_cutoff, modular_cocycle, AffineMap, BaseModel, FiberedGSpace, FiniteGroup,
    GroupoidModel, Seed, TorusGrid, TransversalDensity,
};
use leafwise_core::linalg::CMat;
use leafwise_core::pairing::{
    base_cutoff, default_calibration, family_index_orbifold, free_action_reduction, pair_cocycle,
    topological_index, CotangentModel, FamilyIndex, PolySymbol, SymbolClass, TopologicalOptions,
};
use leafwise_core::{Complex64, Error};

use crate::error::{HarnessError, Result, StageExt};
use crate::scenario::{parse_rational, CocycleSpec, GroupKind, OperatorSpec, Scenario, SymbolTerm};

/// Outcome of one scenario.
#[derive(Clone, Debug)]
pub struct ResultRecord {
    pub scenario: Scenario,
    /// Index of the fiber operator over each base point.
    pub per_point: Vec<i64>,
    /// `Σ_x c(x) w(x) Ω(x) ind(x)` with the base cut-off `c`.
    pub analytic: f64,
    pub pairing: Complex64,
    pub topological: Complex64,
    /// Quotient-side integral, present when the action is free and nontrivial.
    pub free_reduction: Option<Complex64>,
    /// Family index data, present when the base has more than one point.
    pub family: Option<FamilyIndex>,
    pub wall: Duration,
}

impl ResultRecord {
    pub fn abs_err(&self) -> f64 {
        (self.pairing - self.topological).norm()
    }

    /// Every comparison the scenario supports, as `(label, deviation)`.
    pub fn checks(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("pairing-topological", self.abs_err())];
        if cocycle_degree(&self.scenario.cocycle) == 0 {
            out.push(("pairing-analytic", (self.pairing - self.analytic).norm()));
        }
        if let Some(q) = self.free_reduction {
            out.push(("free-reduction", (q - self.topological).norm()));
        }
        if let Some(f) = &self.family {
            out.push(("family", f.difference()));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.checks()
            .iter()
            .all(|(_, d)| *d <= self.scenario.tolerances.pairing_tol)
    }
}

fn cocycle_degree(c: &CocycleSpec) -> usize {
    match c.builtin.as_deref() {
        Some("unit") => 0,
        Some("area") => 2,
        _ => c.degree,
    }
}

/// Fiber map of the generator `z ↦ A z + shift`.
fn generator_map(s: &Scenario) -> Result<AffineMap> {
    let g = &s.groupoid;
    let dim = s.fiber.dim;
    let shift = if g.fiber_shift.is_empty() {
        vec![num_rational::Rational64::from_integer(0); dim]
    } else {
        g.fiber_shift
            .iter()
            .map(|r| {
                parse_rational(r).map_err(|m| HarnessError::validation("groupoid.fiber_shift", m))
            })
            .collect::<Result<_>>()?
    };
    let lin = if g.fiber_linear.is_empty() {
        AffineMap::identity(dim).a
    } else {
        g.fiber_linear.clone()
    };
    AffineMap::new(dim, lin, shift).stage("groupoid")
}

pub fn build_space(s: &Scenario) -> Result<FiberedGSpace> {
    let g = &s.groupoid;
    let grid = TorusGrid::new(s.fiber.dim, s.fiber.grid).stage("groupoid")?;
    let base = BaseModel::uniform(g.base_size);
    match g.group {
        GroupKind::Trivial => FiberedGSpace::new(
            base,
            GroupoidModel::trivial(g.base_size),
            grid,
            vec![AffineMap::identity(s.fiber.dim); g.base_size],
        )
        .stage("groupoid"),
        GroupKind::Cyclic => {
            let gen = generator_map(s)?;
            let step: Vec<usize> = if g.base_action.is_empty() {
                (0..g.base_size).collect()
            } else {
                g.base_action.clone()
            };
            let mut perms = vec![(0..g.base_size).collect::<Vec<_>>()];
            let mut maps = vec![AffineMap::identity(s.fiber.dim)];
            for k in 1..g.order {
                perms.push(perms[k - 1].iter().map(|x| step[*x]).collect());
                maps.push(gen.compose(&maps[k - 1]));
            }
            if !maps[g.order - 1].compose(&gen).is_identity()
                || perms[g.order - 1]
                    .iter()
                    .map(|x| step[*x])
                    .enumerate()
                    .any(|(i, y)| i != y)
            {
                return Err(HarnessError::validation(
                    "groupoid.order",
                    "generator does not have the stated order",
                ));
            }
            FiberedGSpace::from_group_action(
                base,
                &FiniteGroup::cyclic(g.order),
                &perms,
                &maps,
                grid,
            )
            .stage("groupoid")
        }
    }
}

pub fn build_density(s: &Scenario, space: &FiberedGSpace) -> Result<TransversalDensity> {
    let om = if s.density.omega.is_empty() {
        TransversalDensity::uniform(space.n_base())
    } else {
        TransversalDensity::new(s.density.omega.clone()).stage("density")?
    };
    if s.density.invariant {
        let delta = modular_cocycle(&space.groupoid, &space.base, &om).stage("density")?;
        let worst = delta.iter().fold(0.0f64, |m, d| m.max((d - 1.0).abs()));
        if worst > s.tolerances.invariant_tol {
            return Err(HarnessError::Stage {
                stage: "density",
                source: Error::NotInvariant { defect: worst },
            });
        }
    }
    Ok(om)
}

fn complex(c: [f64; 2]) -> Complex64 {
    Complex64::new(c[0], c[1])
}

fn poly_symbol(dim: usize, terms: &[SymbolTerm]) -> Result<PolySymbol> {
    PolySymbol::new(
        dim,
        1,
        terms
            .iter()
            .map(|t| (t.power.clone(), CMat::from_element(1, 1, complex(t.coeff))))
            .collect(),
    )
    .stage("operator")
}

/// K-theory class of the principal symbol used on the topological side.
pub fn symbol_class(s: &Scenario) -> Result<SymbolClass> {
    Ok(match &s.operator {
        OperatorSpec::Dolbeault { twist_degree } => SymbolClass::TwistedDolbeault {
            degree: *twist_degree,
        },
        OperatorSpec::Multiplier { symbol } | OperatorSpec::Custom { symbol, .. } => {
            SymbolClass::Polynomial(poly_symbol(s.fiber.dim, symbol)?)
        }
    })
}

/// Operator family before any cache substitution; `out` resolves custom files.
pub fn build_operator(
    s: &Scenario,
    space: &FiberedGSpace,
    out: &Path,
) -> Result<LeafwiseOperatorFamily> {
    let n = s.fiber.fourier_cutoff;
    match &s.operator {
        OperatorSpec::Dolbeault { twist_degree } => {
            LeafwiseOperatorFamily::dolbeault(space.clone(), *twist_degree, n).stage("operator")
        }
        OperatorSpec::Multiplier { symbol } => poly_symbol(s.fiber.dim, symbol)?
            .operator(space.clone(), n)
            .stage("operator"),
        OperatorSpec::Custom { file, symbol } => {
            let path = out.join(file);
            let f = std::fs::File::open(&path).map_err(|e| HarnessError::io(&path, e))?;
            let m = read_dense(std::io::BufReader::new(f)).stage("operator-file")?;
            let basis = SectionBasis::fourier(s.fiber.dim, n, 1).stage("operator")?;
            let order = poly_symbol(s.fiber.dim, symbol)?.order() as f64;
            LeafwiseOperatorFamily::new(
                space.clone(),
                basis.clone(),
                basis,
                vec![OperatorMatrix::Dense(m); space.n_base()],
                order,
            )
            .stage("operator-file")
        }
    }
}

/// Fingerprint of the resolved scenario, used to key cache files.
pub fn fingerprint(s: &Scenario) -> String {
    let mut h = DefaultHasher::new();
    s.to_toml().hash(&mut h);
    format!("{:016x}", h.finish())
}

pub fn cache_path(out: &Path, s: &Scenario, x: usize) -> PathBuf {
    out.join("cache")
        .join(format!("{}-{}.x{x}.lwd", s.name, fingerprint(s)))
}

/// Multiplier blocks are stacked vertically, mode by mode.
fn block_to_matrix(b: &OperatorMatrix) -> CMat {
    match b {
        OperatorMatrix::Dense(m) => m.clone(),
        OperatorMatrix::Diagonal(v) => {
            let (r, c) = v[0].shape();
            let mut m = CMat::zeros(r * v.len(), c);
            for (k, blk) in v.iter().enumerate() {
                m.view_mut((k * r, 0), (r, c)).copy_from(blk);
            }
            m
        }
    }
}

fn matrix_to_block(like: &OperatorMatrix, m: CMat) -> Option<OperatorMatrix> {
    match like {
        OperatorMatrix::Dense(d) => (d.shape() == m.shape()).then_some(OperatorMatrix::Dense(m)),
        OperatorMatrix::Diagonal(v) => {
            let (r, c) = v[0].shape();
            (m.shape() == (r * v.len(), c)).then(|| {
                OperatorMatrix::Diagonal(
                    (0..v.len())
                        .map(|k| m.view((k * r, 0), (r, c)).into_owned())
                        .collect(),
                )
            })
        }
    }
}

/// Replace the operator blocks by cached coefficients when present, otherwise write them.
pub fn apply_cache(op: &mut LeafwiseOperatorFamily, s: &Scenario, out: &Path) -> Result<()> {
    let dir = out.join("cache");
    std::fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
    for x in 0..op.n_base() {
        let path = cache_path(out, s, x);
        if path.exists() {
            let f = std::fs::File::open(&path).map_err(|e| HarnessError::io(&path, e))?;
            let m = read_dense(std::io::BufReader::new(f)).stage("cache")?;
            op.blocks[x] =
                matrix_to_block(&op.blocks[x], m).ok_or_else(|| HarnessError::Stage {
                    stage: "cache",
                    source: Error::Format(format!("{} has the wrong shape", path.display())),
                })?;
        } else {
            let f = std::fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
            let mut w = std::io::BufWriter::new(f);
            write_dense(&block_to_matrix(&op.blocks[x]), &mut w)
                .and_then(|_| std::io::Write::flush(&mut w))
                .map_err(|e| HarnessError::io(&path, e))?;
        }
    }
    Ok(())
}

pub fn build_cocycle(s: &Scenario) -> Result<ASCochain> {
    let dim = s.fiber.dim;
    let c = &s.cocycle;
    match c.builtin.as_deref() {
        Some("unit") => Ok(ASCochain::constant(dim)),
        Some("area") => Ok(ASCochain::area()),
        _ => {
            let terms = c
                .terms
                .iter()
                .map(|t| Term {
                    coeff: complex(t.coeff),
                    factors: t
                        .factors
                        .iter()
                        .map(|f| Factor {
                            trig: if f.modes.is_empty() {
                                TrigPoly::one(dim)
                            } else {
                                TrigPoly {
                                    dim,
                                    terms: f
                                        .modes
                                        .iter()
                                        .map(|m| (m.nu.clone(), complex(m.coeff)))
                                        .collect(),
                                }
                            },
                            powers: if f.powers.is_empty() {
                                vec![0; dim]
                            } else {
                                f.powers.clone()
                            },
                        })
                        .collect(),
                })
                .collect();
            ASCochain::from_terms(dim, c.degree, terms).stage("cocycle")
        }
    }
}

/// Both sides of the index pairing for one scenario; `out` holds the cache and any
/// custom operator files.
pub fn run_scenario(s: &Scenario, out: &Path) -> Result<ResultRecord> {
    let start = Instant::now();
    s.validate()?;
    let space = build_space(s)?;
    let omega = build_density(s, &space)?;
    let cutoff = compute_cutoff(&space, Seed::Uniform).stage("cutoff")?;
    let mut op = build_operator(s, &space, out)?;
    apply_cache(&mut op, s, out)?;
    op.check_invariance(s.tolerances.invariant_tol)
        .stage("operator")?;
    let per_point = analytic_index(&op).stage("analytic")?;
    let cm = base_cutoff(&space);
    let analytic = (0..space.n_base())
        .map(|x| cm[x] * space.base.weights[x] * omega.values[x] * per_point[x] as f64)
        .sum();
    let par = parametrix(&op, None).stage("parametrix")?;
    let idem = index_idempotent(&op, &par, None).stage("idempotent")?;
    let phi = build_cocycle(s)?;
    let pairing = pair_cocycle(&phi, &idem, &space, &cutoff, &omega).stage("pairing")?;
    let alpha = van_est_lambda(&phi, &space).stage("van-est")?;
    let symbol = symbol_class(s)?;
    let model = CotangentModel::for_cutoff(s.fiber.fourier_cutoff);
    let cal = default_calibration().stage("calibration")?;
    let opts = TopologicalOptions::default();
    let topological = topological_index(
        &alpha, &symbol, &model, &space, &cutoff, &omega, &cal, &opts,
    )
    .stage("topological")?;
    let nontrivial = space.groupoid.n_arrows() > space.n_base();
    let free_reduction = if nontrivial && space.check_free().is_ok() {
        Some(
            free_action_reduction(&alpha, &symbol, &model, &space, &omega, &cal, &opts)
                .stage("free-reduction")?,
        )
    } else {
        None
    };
    let family = if space.n_base() > 1 {
        Some(
            family_index_orbifold(&op, &symbol, &model, &cutoff, &omega, &cal, &opts)
                .stage("family")?,
        )
    } else {
        None
    };
    Ok(ResultRecord {
        scenario: s.clone(),
        per_point,
        analytic,
        pairing,
        topological,
        free_reduction,
        family,
        wall: start.elapsed(),
    })
}
