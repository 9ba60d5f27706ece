//! On-disk representations: symbol and noise JSON, the `CMAT1` binary
//! matrix format, and small CSV/JSONL record sinks.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use toepspec_core::noise::{NoiseKind, NoiseModel};
use toepspec_core::{ComplexMatrix, Symbol, C64};

use crate::error::{AppError, AppResult};

/// `{"d1":2,"d2":0,"coeffs":[[re,im],...]}` with coefficients listed from
/// `k = -d2` to `k = d1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolJson {
    pub d1: usize,
    pub d2: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl SymbolJson {
    pub fn to_symbol(&self) -> AppResult<Symbol> {
        let coeffs = self.coeffs.iter().map(|c| C64::new(c[0], c[1])).collect();
        Symbol::new(coeffs, self.d1, self.d2).map_err(|e| AppError::config(format!("symbol: {e}")))
    }

    pub fn from_symbol(s: &Symbol) -> Self {
        Self {
            d1: s.d1(),
            d2: s.d2(),
            coeffs: s.coeffs().iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

pub fn parse_symbol(text: &str) -> AppResult<Symbol> {
    let js: SymbolJson = serde_json::from_str(text).map_err(|e| AppError::config(format!("symbol JSON: {e}")))?;
    js.to_symbol()
}

/// `{"kind":"gaussian_complex","gamma":0.75}`; `p` is read by
/// `sparse_bernoulli_gaussian`, `gamma_star`/`transpose` by `corner_delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseJson {
    pub kind: String,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transpose: Option<bool>,
}

impl NoiseJson {
    pub fn new(kind: &str, gamma: f64) -> Self {
        Self {
            kind: kind.to_string(),
            gamma,
            p: None,
            gamma_star: None,
            transpose: None,
        }
    }

    pub fn corner(gamma_star: f64) -> Self {
        Self {
            gamma_star: Some(gamma_star),
            ..Self::new("corner_delta", 1.0)
        }
    }

    pub fn to_model(&self) -> AppResult<NoiseModel> {
        let kind = match self.kind.as_str() {
            "gaussian_real" => NoiseKind::GaussianReal,
            "gaussian_complex" => NoiseKind::GaussianComplex,
            "rademacher" => NoiseKind::Rademacher,
            "sparse_bernoulli_gaussian" => NoiseKind::SparseBernoulliGaussian {
                p: self
                    .p
                    .ok_or_else(|| AppError::config("sparse_bernoulli_gaussian needs \"p\""))?,
            },
            "haar_scaled" => NoiseKind::HaarScaled,
            "corner_delta" => NoiseKind::CornerDelta {
                gamma_star: self
                    .gamma_star
                    .ok_or_else(|| AppError::config("corner_delta needs \"gamma_star\""))?,
                transpose: self.transpose.unwrap_or(false),
            },
            other => return Err(AppError::config(format!("unknown noise kind {other:?}"))),
        };
        NoiseModel::new(kind, self.gamma).map_err(|e| AppError::config(format!("noise: {e}")))
    }

    pub fn from_model(m: &NoiseModel) -> Self {
        let base = |kind: &str| Self::new(kind, m.gamma);
        match m.kind {
            NoiseKind::GaussianReal => base("gaussian_real"),
            NoiseKind::GaussianComplex => base("gaussian_complex"),
            NoiseKind::Rademacher => base("rademacher"),
            NoiseKind::SparseBernoulliGaussian { p } => Self {
                p: Some(p),
                ..base("sparse_bernoulli_gaussian")
            },
            NoiseKind::HaarScaled => base("haar_scaled"),
            NoiseKind::CornerDelta { gamma_star, transpose } => Self {
                gamma_star: Some(gamma_star),
                transpose: Some(transpose),
                ..base("corner_delta")
            },
        }
    }
}

pub const CMAT_MAGIC: &[u8; 5] = b"CMAT1";

/// Magic `CMAT1`, rows and cols as `u64` LE, then `re, im` pairs as `f64`
/// LE in row-major order.
pub fn write_cmat<W: Write>(m: &ComplexMatrix, mut w: W) -> AppResult<()> {
    w.write_all(CMAT_MAGIC)?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    for z in m.as_slice() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_cmat<R: Read>(mut r: R) -> AppResult<ComplexMatrix> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != CMAT_MAGIC {
        return Err(AppError::Format("bad CMAT1 magic".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| AppError::Format("CMAT1 dimensions overflow".into()))?;
    let mut data = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        r.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        data.push(C64::new(re, f64::from_le_bytes(word)));
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(AppError::Format("trailing bytes after CMAT1 payload".into()));
    }
    Ok(ComplexMatrix::from_row_major(rows, cols, data)?)
}

pub fn save_cmat(m: &ComplexMatrix, path: &Path) -> AppResult<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_cmat(m, f)
}

pub fn load_cmat(path: &Path) -> AppResult<ComplexMatrix> {
    read_cmat(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    #[default]
    Csv,
    Jsonl,
}

impl RecordFormat {
    pub fn extension(self) -> &'static str {
        match self {
            RecordFormat::Csv => "csv",
            RecordFormat::Jsonl => "jsonl",
        }
    }
}

/// Writes serializable flat records as CSV (header from field names) or
/// as one JSON object per line.
pub fn write_records<T: Serialize>(path: &Path, format: RecordFormat, records: &[T]) -> AppResult<()> {
    match format {
        RecordFormat::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        RecordFormat::Jsonl => {
            let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
            for r in records {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
