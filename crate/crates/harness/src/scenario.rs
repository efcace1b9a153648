use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const MAX_CUTOFF: usize = 32;
pub const MAX_GRID: usize = 128;
pub const MAX_BASE: usize = 64;
pub const MAX_ORDER: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    #[serde(default)]
    pub groupoid: GroupoidSpec,
    pub fiber: FiberSpec,
    pub operator: OperatorSpec,
    #[serde(default)]
    pub cocycle: CocycleSpec,
    #[serde(default)]
    pub density: DensitySpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Trivial,
    Cyclic,
}

/// A cyclic group acting through one generator: a permutation of the base points and
/// an affine map `z ↦ A z + shift` of the fibers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidSpec {
    pub group: GroupKind,
    #[serde(default = "one")]
    pub order: usize,
    #[serde(default = "one")]
    pub base_size: usize,
    /// Image of each base point under the generator; identity when empty.
    #[serde(default)]
    pub base_action: Vec<usize>,
    /// Rational translation of the generator, e.g. `["1/2", "0"]`; zero when empty.
    #[serde(default)]
    pub fiber_shift: Vec<String>,
    /// Row-major integer matrix of the generator; identity when empty.
    #[serde(default)]
    pub fiber_linear: Vec<i64>,
}

fn one() -> usize {
    1
}

impl Default for GroupoidSpec {
    fn default() -> Self {
        Self {
            group: GroupKind::Trivial,
            order: 1,
            base_size: 1,
            base_action: Vec::new(),
            fiber_shift: Vec::new(),
            fiber_linear: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    #[serde(default = "torus")]
    pub kind: String,
    pub dim: usize,
    pub fourier_cutoff: usize,
    pub grid: usize,
}

fn torus() -> String {
    "torus".into()
}

/// `coeff · ξ^power` with `ξ` in lattice units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolTerm {
    pub power: Vec<u32>,
    pub coeff: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OperatorSpec {
    Dolbeault {
        twist_degree: i64,
    },
    Multiplier {
        symbol: Vec<SymbolTerm>,
    },
    /// Dense operator matrix on the rank-one Fourier basis, read from `file` (relative
    /// to the output directory); `symbol` is its principal symbol.
    Custom {
        file: String,
        symbol: Vec<SymbolTerm>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub nu: Vec<i64>,
    pub coeff: [f64; 2],
}

/// Trigonometric polynomial (constant 1 when `modes` is empty) times `∏ z_j^{powers_j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    #[serde(default)]
    pub modes: Vec<ModeSpec>,
    #[serde(default)]
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub coeff: [f64; 2],
    pub factors: Vec<FactorSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSpec {
    /// `unit` or `area`; overrides `terms` when present.
    #[serde(default)]
    pub builtin: Option<String>,
    #[serde(default)]
    pub degree: usize,
    #[serde(default)]
    pub terms: Vec<TensorSpec>,
}

impl Default for CocycleSpec {
    fn default() -> Self {
        Self {
            builtin: Some("unit".into()),
            degree: 0,
            terms: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    /// `Ω` per base point; all ones when empty.
    #[serde(default)]
    pub omega: Vec<f64>,
    /// Require the modular cocycle of `Ω` to be trivial.
    #[serde(default = "yes")]
    pub invariant: bool,
}

fn yes() -> bool {
    true
}

impl Default for DensitySpec {
    fn default() -> Self {
        Self {
            omega: Vec::new(),
            invariant: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "pairing_tol")]
    pub pairing_tol: f64,
    #[serde(default = "invariant_tol")]
    pub invariant_tol: f64,
}

fn pairing_tol() -> f64 {
    1e-6
}

fn invariant_tol() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pairing_tol: pairing_tol(),
            invariant_tol: invariant_tol(),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl Scenario {
    /// Parse and validate scenario text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| HarnessError::Parse {
            line: e.span().map(|r| line_of(text, r.start)).unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }

    /// Resolved scenario as structured text, defaults included.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\', ',']) {
            return Err(v("name", "must be non-empty without '/', '\\' or ','"));
        }
        let f = &self.fiber;
        if f.kind != "torus" {
            return Err(v(
                "fiber.kind",
                format!("unsupported fiber kind {:?}", f.kind),
            ));
        }
        if !(1..=2).contains(&f.dim) {
            return Err(v("fiber.dim", "must be 1 or 2"));
        }
        if f.fourier_cutoff > MAX_CUTOFF {
            return Err(v("fiber.fourier_cutoff", format!("exceeds {MAX_CUTOFF}")));
        }
        if f.grid > MAX_GRID {
            return Err(v("fiber.grid", format!("exceeds {MAX_GRID}")));
        }
        if f.grid < 2 * f.fourier_cutoff + 2 {
            return Err(v(
                "fiber.grid",
                format!(
                    "grid {} below 2N+2 = {}: quadrature not exact on the truncated basis",
                    f.grid,
                    2 * f.fourier_cutoff + 2
                ),
            ));
        }
        let g = &self.groupoid;
        if g.base_size == 0 || g.base_size > MAX_BASE {
            return Err(v(
                "groupoid.base_size",
                format!("must lie in 1..={MAX_BASE}"),
            ));
        }
        match g.group {
            GroupKind::Trivial if g.order != 1 => {
                return Err(v("groupoid.order", "trivial group has order 1"));
            }
            GroupKind::Cyclic if g.order == 0 || g.order > MAX_ORDER => {
                return Err(v("groupoid.order", format!("must lie in 1..={MAX_ORDER}")));
            }
            _ => {}
        }
        if !g.base_action.is_empty() {
            let mut seen = vec![false; g.base_size];
            if g.base_action.len() != g.base_size {
                return Err(v("groupoid.base_action", "needs one image per base point"));
            }
            for &i in &g.base_action {
                if i >= g.base_size || std::mem::replace(&mut seen[i], true) {
                    return Err(v("groupoid.base_action", "not a permutation"));
                }
            }
        }
        if !g.fiber_shift.is_empty() {
            if g.fiber_shift.len() != f.dim {
                return Err(v(
                    "groupoid.fiber_shift",
                    "needs one entry per fiber dimension",
                ));
            }
            for r in &g.fiber_shift {
                parse_rational(r).map_err(|m| v("groupoid.fiber_shift", m))?;
            }
        }
        if !g.fiber_linear.is_empty() && g.fiber_linear.len() != f.dim * f.dim {
            return Err(v("groupoid.fiber_linear", "needs dim² integer entries"));
        }
        match &self.operator {
            OperatorSpec::Dolbeault { twist_degree } => {
                if f.dim != 2 {
                    return Err(v(
                        "operator.kind",
                        "dolbeault needs a two-dimensional fiber",
                    ));
                }
                if twist_degree.unsigned_abs() > 8 {
                    return Err(v("operator.twist_degree", "must lie in -8..=8"));
                }
            }
            OperatorSpec::Multiplier { symbol } | OperatorSpec::Custom { symbol, .. } => {
                if symbol.is_empty() {
                    return Err(v("operator.symbol", "needs at least one term"));
                }
                if symbol
                    .iter()
                    .any(|t| t.power.len() != f.dim || t.power.iter().sum::<u32>() > 8)
                {
                    return Err(v(
                        "operator.symbol",
                        "powers need one entry per dimension, total ≤ 8",
                    ));
                }
            }
        }
        if let OperatorSpec::Custom { file, .. } = &self.operator {
            if file.is_empty() {
                return Err(v("operator.file", "empty path"));
            }
        }
        let c = &self.cocycle;
        match c.builtin.as_deref() {
            Some("unit") | Some("area") => {}
            Some(other) => return Err(v("cocycle.builtin", format!("unknown builtin {other:?}"))),
            None => {
                if !c.degree.is_multiple_of(2) || c.degree > 2 * f.dim {
                    return Err(v("cocycle.degree", "must be even and at most 2·dim"));
                }
                for t in &c.terms {
                    if t.factors.len() != c.degree + 1 {
                        return Err(v("cocycle.terms", "each term needs degree + 1 factors"));
                    }
                    for fac in &t.factors {
                        if !fac.powers.is_empty() && fac.powers.len() != f.dim {
                            return Err(v("cocycle.terms.powers", "one entry per dimension"));
                        }
                        if fac.modes.iter().any(|m| m.nu.len() != f.dim) {
                            return Err(v("cocycle.terms.modes", "one frequency per dimension"));
                        }
                    }
                }
            }
        }
        if c.builtin.as_deref() == Some("area") && f.dim != 2 {
            return Err(v(
                "cocycle.builtin",
                "area cocycle needs a two-dimensional fiber",
            ));
        }
        let d = &self.density;
        if !d.omega.is_empty() {
            if d.omega.len() != g.base_size {
                return Err(v("density.omega", "needs one value per base point"));
            }
            if d.omega.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(v("density.omega", "values must be positive"));
            }
        }
        let t = &self.tolerances;
        for (name, x) in [
            ("tolerances.pairing_tol", t.pairing_tol),
            ("tolerances.invariant_tol", t.invariant_tol),
        ] {
            if !(x.is_finite() && x > 0.0) {
                return Err(v(name, "must be positive"));
            }
        }
        Ok(())
    }
}

pub fn parse_rational(s: &str) -> std::result::Result<num_rational::Rational64, String> {
    s.trim()
        .parse::<num_rational::Rational64>()
        .map_err(|e| format!("{s:?}: {e}"))
}

fn dolbeault_s1(d: i64) -> Scenario {
    Scenario {
        name: format!("S1-dolbeault-d{d}"),
        seed: 1,
        groupoid: GroupoidSpec::default(),
        fiber: FiberSpec {
            kind: torus(),
            dim: 2,
            fourier_cutoff: 8,
            grid: 18,
        },
        operator: OperatorSpec::Dolbeault { twist_degree: d },
        cocycle: CocycleSpec::default(),
        density: DensitySpec::default(),
        tolerances: Tolerances::default(),
    }
}

fn half_shift_groupoid(base_size: usize, base_action: Vec<usize>) -> GroupoidSpec {
    GroupoidSpec {
        group: GroupKind::Cyclic,
        order: 2,
        base_size,
        base_action,
        fiber_shift: vec!["1/2".into(), "0".into()],
        fiber_linear: Vec::new(),
    }
}

/// The builtin scenario catalog, in run order.
pub fn catalog() -> Vec<Scenario> {
    let mut out: Vec<Scenario> = (-2..=2).map(dolbeault_s1).collect();
    out.push(Scenario {
        name: "S2-free-z2-d2".into(),
        seed: 2,
        groupoid: half_shift_groupoid(1, vec![0]),
        ..dolbeault_s1(2)
    });
    let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    out.push(Scenario {
        name: "S3-invertible-multiplier".into(),
        seed: 3,
        operator: OperatorSpec::Multiplier {
            symbol: vec![
                SymbolTerm {
                    power: vec![0, 0],
                    coeff: [1.0, 0.0],
                },
                SymbolTerm {
                    power: vec![2, 0],
                    coeff: [four_pi2, 0.0],
                },
                SymbolTerm {
                    power: vec![0, 2],
                    coeff: [four_pi2, 0.0],
                },
            ],
        },
        ..dolbeault_s1(0)
    });
    out.push(Scenario {
        name: "S4-area-cocycle".into(),
        seed: 4,
        fiber: FiberSpec {
            kind: torus(),
            dim: 2,
            fourier_cutoff: 32,
            grid: 66,
        },
        cocycle: CocycleSpec {
            builtin: Some("area".into()),
            degree: 2,
            terms: Vec::new(),
        },
        ..dolbeault_s1(0)
    });
    out.push(Scenario {
        name: "S5-orbifold-family".into(),
        seed: 5,
        groupoid: half_shift_groupoid(4, vec![1, 0, 2, 3]),
        fiber: FiberSpec {
            kind: torus(),
            dim: 2,
            fourier_cutoff: 6,
            grid: 14,
        },
        density: DensitySpec {
            omega: vec![0.5; 4],
            invariant: true,
        },
        ..dolbeault_s1(2)
    });
    out
}

pub fn builtin(name: &str) -> Result<Scenario> {
    catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| HarnessError::UnknownBuiltin(name.into()))
}

/// Builtin name or path to a scenario file.
pub fn load_scenario(spec: &str) -> Result<Scenario> {
    if let Ok(s) = builtin(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(HarnessError::UnknownBuiltin(spec.into()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Scenario::from_toml(&text)
}

fn v(field: &str, msg: impl Into<String>) -> HarnessError {
    HarnessError::validation(field, msg)
}
