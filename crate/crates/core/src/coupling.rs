//! Lamb-Dicke sideband coupling strengths through generalized Laguerre
//! polynomials, and the pulse-area ratio curves they induce.
//!
//! The relative strength of the s-th blue sideband on the transition
//! `|0>|v> <-> |1>|v+s>` is
//!
//! `Omega_{v,v+s} / Omega_0 = eta^s e^{-eta^2/2} L_v^s(eta^2) sqrt(v!/(v+s)!)`.
//!
//! For s = 2 the square-root factor is `1/sqrt((v+1)(v+2))`; the s = 1 case is
//! the same expression one rung down the ladder. Only ratios of couplings ever
//! enter the gate simulation: the base Rabi frequency and pulse duration are
//! folded into a single calibrated area.

use std::io::Write;

use crate::error::{Error, Result};

/// Dimensionless Lamb-Dicke parameter, finite and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambDicke(f64);

impl LambDicke {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidChainSpec(format!(
                "Lamb-Dicke parameter must be finite and positive, got {eta}"
            )));
        }
        Ok(LambDicke(eta))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Generalized Laguerre polynomial `L_n^a(x)` by the three-term recurrence
/// `k L_k^a = (2k - 1 + a - x) L_{k-1}^a - (k - 1 + a) L_{k-2}^a`, stable for
/// the small arguments `x = eta^2 <= 1` used here.
pub fn laguerre(n: usize, a: usize, x: f64) -> f64 {
    let a = a as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0; // L_0
    let mut cur = 1.0 + a - x; // L_1
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0 + a - x) * cur - (k - 1.0 + a) * prev) / k;
        prev = cur;
        cur = next;
    }
    cur
}

/// Relative coupling `Omega_{v,v+s} / Omega_0` of the s-th blue sideband.
pub fn sideband_coupling(ld: LambDicke, v: usize, s: u8) -> Result<f64> {
    if !(s == 1 || s == 2) {
        return Err(Error::UnsupportedSideband(s));
    }
    let eta = ld.value();
    let x = eta * eta;
    // sqrt(v!/(v+s)!) = 1/sqrt((v+1)...(v+s))
    let mut denom = 1.0;
    for j in 1..=s as usize {
        denom *= (v + j) as f64;
    }
    Ok(eta.powi(s as i32) * (-x / 2.0).exp() * laguerre(v, s as usize, x) / denom.sqrt())
}

/// Pulse-area ratio curves `A_{v,v+s} / A_{v_ref,v_ref+s}` over a grid of
/// Lamb-Dicke parameters. Samples where the reference coupling sits on a
/// Laguerre node are reported as absent rather than as infinities.
#[derive(Debug, Clone)]
pub struct CouplingRatioCurve {
    pub etas: Vec<f64>,
    pub labels: Vec<String>,
    /// `ratios[t][i]` is the ratio for transition `t` at `etas[i]`.
    pub ratios: Vec<Vec<Option<f64>>>,
}

/// Threshold below which the reference Laguerre value counts as a node.
const NODE_TOL: f64 = 1e-12;

pub fn area_ratio_curve(
    etas: &[f64],
    s: u8,
    transitions: &[usize],
    v_ref: usize,
) -> Result<CouplingRatioCurve> {
    if !(s == 1 || s == 2) {
        return Err(Error::UnsupportedSideband(s));
    }
    if etas.is_empty() {
        return Err(Error::InvalidGrid("eta grid is empty".into()));
    }
    let labels = transitions
        .iter()
        .map(|&v| format!("A{}-{}/A{}-{}", v, v + s as usize, v_ref, v_ref + s as usize))
        .collect();
    let mut ratios = vec![Vec::with_capacity(etas.len()); transitions.len()];
    for &eta in etas {
        let ld = LambDicke::new(eta)?;
        let reference = sideband_coupling(ld, v_ref, s)?;
        let on_node = laguerre(v_ref, s as usize, eta * eta).abs() < NODE_TOL;
        for (t, &v) in transitions.iter().enumerate() {
            if on_node {
                ratios[t].push(None);
                continue;
            }
            let r = sideband_coupling(ld, v, s)? / reference;
            ratios[t].push(r.is_finite().then_some(r));
        }
    }
    Ok(CouplingRatioCurve {
        etas: etas.to_vec(),
        labels,
        ratios,
    })
}

impl CouplingRatioCurve {
    /// CSV with header `eta,<label1>,...`, one row per eta sample, 10
    /// significant digits; node samples are left empty.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "eta")?;
        for label in &self.labels {
            write!(w, ",{label}")?;
        }
        writeln!(w)?;
        for (i, eta) in self.etas.iter().enumerate() {
            write!(w, "{eta:.9e}")?;
            for t in 0..self.labels.len() {
                match self.ratios[t][i] {
                    Some(r) => write!(w, ",{r:.9e}")?,
                    None => write!(w, ",")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
