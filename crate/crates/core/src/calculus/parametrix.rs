use num_complex::Complex64;

use super::basis::SectionBasis;
use super::operator::{LeafwiseOperatorFamily, OperatorMatrix};
use crate::linalg::{max_abs, CMat};
use crate::{Error, Result};

/// `Q` with `QD = 1 − R0`, `DQ = 1 − R1`, built by heat functional calculus:
/// `Q = (1 − e^{−tD*D}) (D*D)⁻¹ D*`, so `R0 = e^{−tD*D}` and `R1 = e^{−tDD*}`.
///
/// For Fourier multipliers this is the quantized inverse symbol with the cut-off
/// `χ(ν) = e^{−t|σ(ν)|²}` near the zero section.
#[derive(Clone, Debug)]
pub struct Parametrix {
    pub heat_time: f64,
    pub q: Vec<OperatorMatrix>,
    pub r0: Vec<OperatorMatrix>,
    pub r1: Vec<OperatorMatrix>,
}

struct Parts {
    q: CMat,
    r0: CMat,
    r1: CMat,
}

fn calculus(d: &CMat, t: f64) -> Result<Parts> {
    let (m, n) = d.shape();
    let svd = d.clone().svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| Error::Convergence("SVD failed".into()))?;
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Convergence("SVD failed".into()))?;
    let k = svd.singular_values.len();
    let mut q = CMat::zeros(n, m);
    let mut r0 = CMat::identity(n, n);
    let mut r1 = CMat::identity(m, m);
    for i in 0..k {
        let s = svd.singular_values[i];
        let damp = -(-t * s * s).exp_m1();
        if damp == 0.0 {
            continue;
        }
        let v = vt.row(i).adjoint();
        let ui = u.column(i);
        q += &v * ui.adjoint() * Complex64::new(damp / s, 0.0);
        r0 -= &v * v.adjoint() * Complex64::new(damp, 0.0);
        r1 -= ui * ui.adjoint() * Complex64::new(damp, 0.0);
    }
    Ok(Parts { q, r0, r1 })
}

/// Heat time making `e^{−tσ²}` negligible (`e^{−30}`) at the truncation edge.
pub fn default_heat_time(op: &LeafwiseOperatorFamily) -> f64 {
    let mut edge = f64::INFINITY;
    for x in 0..op.n_base() {
        match &op.blocks[x] {
            OperatorMatrix::Diagonal(v) => {
                let SectionBasis::Fourier { cutoff, .. } = op.domain else {
                    unreachable!()
                };
                for (m, s) in v.iter().enumerate() {
                    if op
                        .domain
                        .mode(m)
                        .iter()
                        .map(|a| a.unsigned_abs() as usize)
                        .max()
                        == Some(cutoff)
                    {
                        let smin = s
                            .clone()
                            .singular_values()
                            .iter()
                            .cloned()
                            .fold(f64::INFINITY, f64::min);
                        edge = edge.min(smin);
                    }
                }
            }
            OperatorMatrix::Dense(m) => {
                let smax = m
                    .clone()
                    .singular_values()
                    .iter()
                    .cloned()
                    .fold(0.0, f64::max);
                edge = edge.min(smax);
            }
        }
    }
    if !(edge.is_finite() && edge > 0.0) {
        return 1.0;
    }
    30.0 / (edge * edge)
}

pub fn parametrix(op: &LeafwiseOperatorFamily, heat_time: Option<f64>) -> Result<Parametrix> {
    let t = heat_time.unwrap_or_else(|| default_heat_time(op));
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("heat time {t}")));
    }
    let mut out = Parametrix {
        heat_time: t,
        q: Vec::new(),
        r0: Vec::new(),
        r1: Vec::new(),
    };
    for b in &op.blocks {
        match b {
            OperatorMatrix::Dense(d) => {
                let p = calculus(d, t)?;
                out.q.push(OperatorMatrix::Dense(p.q));
                out.r0.push(OperatorMatrix::Dense(p.r0));
                out.r1.push(OperatorMatrix::Dense(p.r1));
            }
            OperatorMatrix::Diagonal(v) => {
                let parts = v
                    .iter()
                    .map(|d| calculus(d, t))
                    .collect::<Result<Vec<_>>>()?;
                out.q.push(OperatorMatrix::Diagonal(
                    parts.iter().map(|p| p.q.clone()).collect(),
                ));
                out.r0.push(OperatorMatrix::Diagonal(
                    parts.iter().map(|p| p.r0.clone()).collect(),
                ));
                out.r1.push(OperatorMatrix::Diagonal(
                    parts.iter().map(|p| p.r1.clone()).collect(),
                ));
            }
        }
    }
    Ok(out)
}

impl Parametrix {
    /// Largest of `‖QD + R0 − 1‖`, `‖DQ + R1 − 1‖` (entrywise) over base points.
    pub fn residual(&self, op: &LeafwiseOperatorFamily) -> f64 {
        let (dom, cod) = (&op.domain, &op.codomain);
        let mut worst: f64 = 0.0;
        for x in 0..op.n_base() {
            let d = op.dense(x);
            let q = self.q[x].to_dense(cod, dom);
            let r0 = self.r0[x].to_dense(dom, dom);
            let r1 = self.r1[x].to_dense(cod, cod);
            let a = &q * &d + r0 - CMat::identity(dom.len(), dom.len());
            let b = &d * &q + r1 - CMat::identity(cod.len(), cod.len());
            worst = worst.max(max_abs(&a)).max(max_abs(&b));
        }
        worst
    }
}
