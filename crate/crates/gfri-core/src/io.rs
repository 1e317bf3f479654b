//! File formats: graph JSON, signal and sample CSV, filterbank export.
//!
//! CSV output uses 17-significant-digit scientific notation so reruns are
//! byte-identical and round trips lose nothing.

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::error::{GfriError, Result};
use crate::filterbank::{FilterBank, FilterBankKind};
use crate::graph::{CirculantGraph, PathGraph, C64};
use crate::multires::{MultilevelPlan, WaveletCoefficients};
use crate::sampling::{SparseSignal, SpectralSamples};
use crate::spectral::BasisKind;

/// 17 significant digits, scientific; enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| GfriError::InvalidGraph(format!("malformed number '{s}'")))
}

/// Either graph flavor accepted by the CLI.
#[derive(Debug, Clone)]
pub enum GraphDescription {
    Circulant(CirculantGraph),
    Path(PathGraph),
}

impl GraphDescription {
    pub fn n(&self) -> usize {
        match self {
            Self::Circulant(g) => g.n(),
            Self::Path(g) => g.n(),
        }
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        match self {
            Self::Circulant(g) => g.adjacency(),
            Self::Path(g) => g.adjacency(),
        }
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        match self {
            Self::Circulant(g) => g.laplacian(),
            Self::Path(g) => g.laplacian(),
        }
    }
}

/// Parses `{"n": N, "generators": [[s, w], ...]}` or
/// `{"type": "path", "n": N}`.
pub fn parse_graph_json(text: &str) -> Result<GraphDescription> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| GfriError::InvalidGraph(format!("malformed graph JSON: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| GfriError::InvalidGraph("graph JSON must be an object".into()))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| GfriError::InvalidGraph("missing positive integer field 'n'".into()))?
        as usize;
    if let Some(t) = obj.get("type") {
        match t.as_str() {
            Some("path") => return Ok(GraphDescription::Path(PathGraph::new(n)?)),
            Some(other) => {
                return Err(GfriError::InvalidGraph(format!(
                    "unknown graph type '{other}'"
                )))
            }
            None => return Err(GfriError::InvalidGraph("'type' must be a string".into())),
        }
    }
    let gens = obj
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| GfriError::InvalidGraph("missing array field 'generators'".into()))?;
    let mut pairs = Vec::with_capacity(gens.len());
    for g in gens {
        let pair = g
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| GfriError::InvalidGraph("generator entries are [s, weight]".into()))?;
        let s = pair[0]
            .as_u64()
            .ok_or_else(|| GfriError::InvalidGraph("generator offset must be an integer".into()))?
            as usize;
        let w = pair[1]
            .as_f64()
            .ok_or_else(|| GfriError::InvalidGraph("generator weight must be a number".into()))?;
        pairs.push((s, w));
    }
    Ok(GraphDescription::Circulant(CirculantGraph::new(n, pairs)?))
}

pub fn graph_json(g: &GraphDescription) -> String {
    let v = match g {
        GraphDescription::Circulant(c) => json!({
            "n": c.n(),
            "generators": c.generators().iter().map(|&(s, w)| json!([s, w])).collect::<Vec<_>>(),
        }),
        GraphDescription::Path(p) => json!({ "type": "path", "n": p.n() }),
    };
    serde_json::to_string_pretty(&v).unwrap()
}

/// Signal rows "re,im" with a header line.
pub fn write_signal_csv(x: &DVector<C64>) -> String {
    let mut out = String::from("re,im\n");
    for v in x.iter() {
        out.push_str(&fmt_float(v.re));
        out.push(',');
        out.push_str(&fmt_float(v.im));
        out.push('\n');
    }
    out
}

pub fn read_signal_csv(text: &str) -> Result<DVector<C64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.eq_ignore_ascii_case("re,im")) {
            continue;
        }
        let mut parts = line.split(',');
        let re = parse_float(parts.next().unwrap_or(""))?;
        let im = parse_float(parts.next().ok_or_else(|| {
            GfriError::InvalidGraph(format!("signal row {i} needs two columns"))
        })?)?;
        values.push(C64::new(re, im));
    }
    if values.is_empty() {
        return Err(GfriError::InvalidGraph("signal CSV has no rows".into()));
    }
    Ok(DVector::from_vec(values))
}

/// Sample rows "m,re,im" with a header line.
pub fn write_samples_csv(s: &SpectralSamples) -> String {
    let mut out = String::from("m,re,im\n");
    for (m, v) in s.y.iter().enumerate() {
        out.push_str(&format!("{m},{},{}\n", fmt_float(v.re), fmt_float(v.im)));
    }
    out
}

/// Rows must carry consecutive indices from 0; `n` and the basis come from
/// the caller since the CSV does not store them.
pub fn read_samples_csv(text: &str, n: usize, basis: BasisKind) -> Result<SpectralSamples> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.eq_ignore_ascii_case("m,re,im")) {
            continue;
        }
        let mut parts = line.split(',');
        let m = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse::<usize>()
            .map_err(|_| GfriError::InvalidGraph(format!("bad sample index on row {i}")))?;
        if m != values.len() {
            return Err(GfriError::InvalidGraph(format!(
                "sample rows must be consecutive from 0, found {m} at position {}",
                values.len()
            )));
        }
        let re = parse_float(parts.next().unwrap_or(""))?;
        let im = parse_float(parts.next().ok_or_else(|| {
            GfriError::InvalidGraph(format!("sample row {i} needs three columns"))
        })?)?;
        values.push(C64::new(re, im));
    }
    if values.is_empty() {
        return Err(GfriError::InvalidGraph("sample CSV has no rows".into()));
    }
    Ok(SpectralSamples {
        y: DVector::from_vec(values),
        n,
        basis,
    })
}

/// Sparse signal rows "c,re,im" with a header line.
pub fn write_sparse_csv(x: &SparseSignal) -> String {
    let mut out = String::from("c,re,im\n");
    for (c, v) in x.support.iter().zip(x.amplitudes.iter()) {
        out.push_str(&format!("{c},{},{}\n", fmt_float(v.re), fmt_float(v.im)));
    }
    out
}

pub fn read_sparse_csv(text: &str, n: usize) -> Result<SparseSignal> {
    let mut support = Vec::new();
    let mut amplitudes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.eq_ignore_ascii_case("c,re,im")) {
            continue;
        }
        let mut parts = line.split(',');
        let c = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse::<usize>()
            .map_err(|_| GfriError::InvalidGraph(format!("bad location on row {i}")))?;
        let re = parse_float(parts.next().unwrap_or(""))?;
        let im = parse_float(parts.next().ok_or_else(|| {
            GfriError::InvalidGraph(format!("sparse row {i} needs three columns"))
        })?)?;
        support.push(c);
        amplitudes.push(C64::new(re, im));
    }
    SparseSignal::new(n, support, amplitudes)
}

/// Wavelet coefficients as "band,re,im": band 0 is the low-pass channel,
/// band `j + 1` holds the level-`j` high-pass outputs in level order.
pub fn write_coefficients_csv(w: &WaveletCoefficients) -> String {
    let mut out = String::from("band,re,im\n");
    for v in w.lowpass.iter() {
        out.push_str(&format!("0,{},{}\n", fmt_float(v.re), fmt_float(v.im)));
    }
    for (j, band) in w.highpass.iter().enumerate() {
        for v in band.iter() {
            out.push_str(&format!("{},{},{}\n", j + 1, fmt_float(v.re), fmt_float(v.im)));
        }
    }
    out
}

pub fn read_coefficients_csv(text: &str, plan: &MultilevelPlan) -> Result<WaveletCoefficients> {
    let mut rows: Vec<(usize, C64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.eq_ignore_ascii_case("band,re,im")) {
            continue;
        }
        let mut parts = line.split(',');
        let band = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse::<usize>()
            .map_err(|_| GfriError::InvalidGraph(format!("bad band index on row {i}")))?;
        let re = parse_float(parts.next().unwrap_or(""))?;
        let im = parse_float(parts.next().ok_or_else(|| {
            GfriError::InvalidGraph(format!("coefficient row {i} needs three columns"))
        })?)?;
        rows.push((band, C64::new(re, im)));
    }
    let j = plan.j_levels();
    let lowpass: Vec<C64> = rows.iter().filter(|r| r.0 == 0).map(|r| r.1).collect();
    if lowpass.len() != plan.lowpass_len() {
        return Err(GfriError::DimensionMismatch {
            expected: plan.lowpass_len(),
            actual: lowpass.len(),
        });
    }
    let mut highpass = Vec::with_capacity(j);
    for lvl in 0..j {
        let band: Vec<C64> = rows.iter().filter(|r| r.0 == lvl + 1).map(|r| r.1).collect();
        highpass.push(DVector::from_vec(band));
    }
    if rows.iter().any(|r| r.0 > j) {
        return Err(GfriError::InvalidGraph(format!(
            "band index exceeds the plan's {j} levels"
        )));
    }
    Ok(WaveletCoefficients {
        lowpass: DVector::from_vec(lowpass),
        highpass,
    })
}

/// Dense matrix CSV, one row per line.
pub fn write_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| fmt_float(m[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> = line.split(',').map(parse_float).collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(GfriError::InvalidGraph("matrix CSV has no rows".into()));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(GfriError::InvalidGraph("ragged matrix CSV".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

fn matrix_first_row(m: &DMatrix<f64>) -> Vec<f64> {
    (0..m.ncols()).map(|c| m[(0, c)]).collect()
}

/// Filterbank summary: design parameters plus the first rows of every filter.
pub fn filterbank_json(fb: &FilterBank) -> String {
    let kind = match fb.spec.kind {
        FilterBankKind::Hgswt => "hgswt",
        FilterBankKind::Hgeswt => "hgeswt",
        FilterBankKind::Hcgeswt => "hcgeswt",
        FilterBankKind::NormalizedPath => "path",
    };
    let mut v = json!({
        "kind": kind,
        "n": fb.n,
        "k": fb.spec.k,
        "alphas": fb.spec.alphas,
        "betas": fb.spec.betas,
        "c1": fb.c1,
        "c2": fb.c2,
        "bipartite": fb.bipartite,
        "lowpass_first_row": matrix_first_row(&fb.lp_analysis),
        "highpass_first_row": matrix_first_row(&fb.hp_analysis),
    });
    if let Some(lp) = &fb.lp_synthesis {
        v["synthesis_lowpass_first_row"] = json!(matrix_first_row(lp));
    }
    if let Some(hp) = &fb.hp_synthesis {
        v["synthesis_highpass_first_row"] = json!(matrix_first_row(hp));
    }
    serde_json::to_string_pretty(&v).unwrap()
}

/// Default tolerance, overridable through the GFRI_TOL environment
/// variable; silently keeps the default on parse failure.
pub fn tol_from_env(default: f64) -> f64 {
    match std::env::var("GFRI_TOL") {
        Ok(s) => s.trim().parse::<f64>().ok().filter(|t| *t > 0.0).unwrap_or(default),
        Err(_) => default,
    }
}
