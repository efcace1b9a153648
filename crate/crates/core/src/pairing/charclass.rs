use std::f64::consts::PI;

use num_complex::Complex64;

use super::exterior::{wedge_sign, FormMatrix, Grassmann, MAX_GENERATORS};
use crate::linalg::{idempotent_defect, CMat};
use crate::{Error, Result};

const IDEMPOTENT_INPUT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharKind {
    AHat,
    Chern,
}

/// Even-degree characteristic form at a point of the cotangent model.
#[derive(Clone, Debug, PartialEq)]
pub struct CharClassForm {
    pub kind: CharKind,
    pub form: Grassmann,
}

impl CharClassForm {
    pub fn degree_part(&self, deg: usize) -> Grassmann {
        self.form.degree_part(deg)
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.form.c[0]
    }
}

/// Taylor coefficients of `log((x/2)/sinh(x/2))` in `x²`: `−1/24, 1/2880, −1/181440, …`.
pub fn a_hat_log_coefficients(n: usize) -> Vec<f64> {
    // log(sinh y / y) = Σ_{k≥1} 2^{2k} B_{2k} y^{2k} / (2k (2k)!)
    let bernoulli = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    (1..=n.min(bernoulli.len()))
        .map(|k| {
            let fact: f64 = (1..=2 * k).map(|i| i as f64).product();
            let y2k = 4f64.powi(k as i32) * bernoulli[k - 1] / (2.0 * k as f64 * fact);
            // y = x/2
            -y2k / 4f64.powi(k as i32)
        })
        .collect()
}

/// `exp(Σ_k b_k p_k)` with `p_k = Σ_i x_i^{2k}`.
fn a_hat_from_power_sums(power_sums: &[Grassmann], n: usize) -> Result<Grassmann> {
    let b = a_hat_log_coefficients(power_sums.len());
    let mut log = Grassmann::zero(n);
    for (p, bk) in power_sums.iter().zip(&b) {
        log = log.add(&p.scale(Complex64::new(*bk, 0.0)));
    }
    log.exp()
}

/// `Π_i (x_i/2)/sinh(x_i/2)` for Chern roots given as even nilpotent forms.
pub fn a_hat_from_roots(roots: &[Grassmann], n: usize) -> Result<CharClassForm> {
    let kmax = n / 4 + 1;
    let mut sums = vec![Grassmann::zero(n); kmax];
    for x in roots {
        if !x.is_even() || x.c[0].norm() != 0.0 {
            return Err(Error::Parameter(
                "Chern roots must be nilpotent even forms".into(),
            ));
        }
        let x2 = x.wedge(x);
        let mut pow = x2.clone();
        for s in sums.iter_mut() {
            *s = s.add(&pow);
            pow = pow.wedge(&x2);
        }
    }
    Ok(CharClassForm {
        kind: CharKind::AHat,
        form: a_hat_from_power_sums(&sums, n)?,
    })
}

/// Â of a real antisymmetric curvature matrix of 2-forms, truncated at `max_degree`.
///
/// Chern roots are those of `Θ/2π`, so `Σ x_i^{2k} = (−1)^k tr((Θ/2π)^{2k}) / 2`.
pub fn a_hat_form(curvature: &FormMatrix, max_degree: usize) -> Result<CharClassForm> {
    let n = curvature.entries.first().map(|g| g.n).unwrap_or(0);
    for i in 0..curvature.dim {
        for j in 0..curvature.dim {
            let s = curvature.get(i, j).add(curvature.get(j, i));
            if s.max_abs() > 1e-12 {
                return Err(Error::Parameter("curvature must be antisymmetric".into()));
            }
            if curvature
                .get(i, j)
                .sub(&curvature.get(i, j).degree_part(2))
                .max_abs()
                > 0.0
            {
                return Err(Error::Degree("curvature entries must be 2-forms".into()));
            }
        }
    }
    let scaled = FormMatrix {
        dim: curvature.dim,
        entries: curvature
            .entries
            .iter()
            .map(|g| g.scale(Complex64::new(1.0 / (2.0 * PI), 0.0)))
            .collect(),
    };
    let sq = scaled.mul(&scaled);
    let kmax = n / 4 + 1;
    let mut sums = Vec::with_capacity(kmax);
    let mut pow = sq.clone();
    for k in 1..=kmax {
        let sign = if k % 2 == 0 { 0.5 } else { -0.5 };
        sums.push(pow.trace().scale(Complex64::new(sign, 0.0)));
        pow = pow.mul(&sq);
    }
    let full = a_hat_from_power_sums(&sums, n)?;
    let mut out = Grassmann::zero(n);
    for d in (0..=max_degree.min(n)).step_by(2) {
        out = out.add(&full.degree_part(d));
    }
    Ok(CharClassForm {
        kind: CharKind::AHat,
        form: out,
    })
}

/// Matrix-valued 1-form `ω = Σ_i ω_i dx_i` with partials `dω[j][i] = ∂_j ω_i`.
#[derive(Clone, Debug)]
pub struct ConnectionForm {
    pub omega: Vec<CMat>,
    pub d_omega: Vec<Vec<CMat>>,
}

/// Matrix-valued form: one coefficient matrix per generator mask.
struct MatForm {
    n: usize,
    dim: usize,
    c: Vec<Option<CMat>>,
}

impl MatForm {
    fn zero(n: usize, dim: usize) -> Self {
        Self { n, dim, c: vec![None; 1 << n] }
    }

    fn scalar(n: usize, a: &CMat) -> Self {
        let mut f = Self::zero(n, a.nrows());
        f.c[0] = Some(a.clone());
        f
    }

    fn one_form(n: usize, comps: &[CMat]) -> Self {
        let mut f = Self::zero(n, comps[0].nrows());
        for (k, a) in comps.iter().enumerate() {
            f.c[1 << k] = Some(a.clone());
        }
        f
    }

    fn accumulate(&mut self, mask: usize, m: CMat) {
        match &mut self.c[mask] {
            Some(v) => *v += m,
            slot => *slot = Some(m),
        }
    }

    fn add(mut self, o: &Self, sign: f64) -> Self {
        for (mask, v) in o.c.iter().enumerate() {
            if let Some(v) = v {
                self.accumulate(mask, v * Complex64::new(sign, 0.0));
            }
        }
        self
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.n, self.dim);
        for (a, x) in self.c.iter().enumerate() {
            let Some(x) = x else { continue };
            for (b, y) in o.c.iter().enumerate() {
                let Some(y) = y else { continue };
                if a & b != 0 {
                    continue;
                }
                out.accumulate(a | b, x * y * Complex64::new(wedge_sign(a, b), 0.0));
            }
        }
        out
    }

    fn trace(&self) -> Grassmann {
        let mut g = Grassmann::zero(self.n);
        for (mask, v) in self.c.iter().enumerate() {
            if let Some(v) = v {
                g.c[mask] = v.trace();
            }
        }
        g
    }
}

/// Chern–Weil form `tr(p exp(κ F))` of the idempotent field `p` at a point, given its
/// partials along the `n` coordinates.
///
/// `F` is the curvature of the projected connection `p∘(d + ω)∘p`; with `ω = 0` it is
/// `p dp ∧ dp`.
pub fn chern_character_form(
    p: &CMat,
    partials: &[CMat],
    kappa: Complex64,
    connection: Option<&ConnectionForm>,
) -> Result<CharClassForm> {
    let defect = idempotent_defect(p);
    if defect > IDEMPOTENT_INPUT_TOL * (1.0 + p.norm()) {
        return Err(Error::NotIdempotent { defect });
    }
    let n = partials.len();
    if n > MAX_GENERATORS {
        return Err(Error::Dimension(format!("{n} coordinates exceed {MAX_GENERATORS}")));
    }
    let pm = MatForm::scalar(n, p);
    let dp = MatForm::one_form(n, partials);
    let mut f = pm.mul(&dp).mul(&dp).mul(&pm);
    if let Some(c) = connection {
        // A = pωp, F' = F + p dA p + A ∧ A
        let w = MatForm::one_form(n, &c.omega);
        let a = pm.mul(&w).mul(&pm);
        let mut dw = MatForm::zero(n, p.nrows());
        for (j, row) in c.d_omega.iter().enumerate() {
            for (i, m) in row.iter().enumerate() {
                if i != j {
                    dw.accumulate((1 << j) | (1 << i), m * Complex64::new(wedge_sign(1 << j, 1 << i), 0.0));
                }
            }
        }
        // d(pωp) = dp∧ω p + p dω p − p ω∧dp
        let da = dp.mul(&w).mul(&pm).add(&pm.mul(&dw).mul(&pm), 1.0).add(&pm.mul(&w).mul(&dp), -1.0);
        f = f.add(&pm.mul(&da).mul(&pm), 1.0).add(&a.mul(&a), 1.0);
    }
    let mut total = pm.trace();
    let mut pow = pm;
    let mut coeff = Complex64::new(1.0, 0.0);
    for j in 1..=n / 2 {
        pow = pow.mul(&f);
        coeff = coeff * kappa / j as f64;
        total = total.add(&pow.trace().scale(coeff));
    }
    Ok(CharClassForm { kind: CharKind::Chern, form: total })
}
