//! Declarative experiment configuration, dotted-path overrides and the
//! config hash stamped on every artifact.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use toepspec_core::noise::NoiseModel;
use toepspec_core::{Symbol, C64};

use crate::error::{AppError, AppResult};
use crate::formats::{NoiseJson, RecordFormat, SymbolJson};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZGrid {
    /// `[re_min, re_max, im_min, im_max]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub res: Option<usize>,
    /// Explicit `[re, im]` points; pointwise runs use these when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
    #[serde(default)]
    pub format: RecordFormat,
    #[serde(default)]
    pub svg: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("toepspec-out"),
            format: RecordFormat::Csv,
            svg: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub symbol: SymbolJson,
    pub sizes: Vec<usize>,
    /// Noise exponent; overrides `noise.gamma`.
    pub gamma: f64,
    pub noise: NoiseJson,
    /// Second ensemble for replacement comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_b: Option<NoiseJson>,
    pub trials: usize,
    pub z_grid: ZGrid,
    pub mu_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            symbol: SymbolJson {
                d1: 2,
                d2: 0,
                coeffs: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]],
            },
            sizes: vec![100, 200, 400],
            gamma: 0.75,
            noise: NoiseJson::new("gaussian_complex", 0.75),
            noise_b: None,
            trials: 10,
            z_grid: ZGrid {
                rect: Some([-2.5, 3.5, -3.0, 3.0]),
                res: Some(200),
                points: Some(vec![[3.0, 0.0], [1.0, 0.0], [-0.1, 0.0]]),
            },
            mu_samples: 10_000,
            seed: 1,
            outputs: Outputs::default(),
        }
    }
}

/// A validated configuration with core types resolved.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub symbol: Symbol,
    pub noise: NoiseModel,
    pub noise_b: Option<NoiseModel>,
    pub hash: String,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> AppResult<Self> {
        serde_json::from_str(text).map_err(|e| AppError::config(format!("config JSON: {e}")))
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Applies `path=value` overrides; `value` is parsed as JSON and falls
    /// back to a plain string.
    pub fn with_overrides(&self, overrides: &[String]) -> AppResult<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut root = serde_json::to_value(self)?;
        for item in overrides {
            let (path, raw) = item
                .split_once('=')
                .ok_or_else(|| AppError::config(format!("override {item:?} is not path=value")))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            set_path(&mut root, path, value)?;
        }
        serde_json::from_value(root).map_err(|e| AppError::config(format!("after overrides: {e}")))
    }

    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn validate(&self) -> AppResult<Experiment> {
        let symbol = self.symbol.to_symbol()?;
        if !(self.gamma > 0.5) || !self.gamma.is_finite() {
            return Err(AppError::config("gamma must be > 1/2"));
        }
        if self.sizes.is_empty() {
            return Err(AppError::config("sizes must be nonempty"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AppError::config("sizes must be strictly ascending"));
        }
        if self.sizes[0] == 0 {
            return Err(AppError::config("sizes must be >= 1"));
        }
        if self.trials == 0 {
            return Err(AppError::config("trials must be >= 1"));
        }
        if self.mu_samples == 0 {
            return Err(AppError::config("mu_samples must be >= 1"));
        }
        let g = &self.z_grid;
        if g.rect.is_none() && g.points.as_ref().is_none_or(|p| p.is_empty()) {
            return Err(AppError::config("z_grid needs a rect or points"));
        }
        if let Some(r) = g.rect {
            if !(r[0] < r[1] && r[2] < r[3]) || r.iter().any(|v| !v.is_finite()) {
                return Err(AppError::config("z_grid.rect must be [re_min, re_max, im_min, im_max]"));
            }
            if g.res.is_none_or(|n| n < 2) {
                return Err(AppError::config("z_grid.res must be >= 2"));
            }
        }
        let with_gamma = |n: &NoiseJson| {
            let mut n = n.clone();
            n.gamma = self.gamma;
            n.to_model()
        };
        Ok(Experiment {
            config: self.clone(),
            symbol,
            noise: with_gamma(&self.noise)?,
            noise_b: self.noise_b.as_ref().map(with_gamma).transpose()?,
            hash: self.hash(),
        })
    }
}

impl Experiment {
    /// Explicit points when given, otherwise every node of the rectangle.
    pub fn z_points(&self) -> Vec<C64> {
        let g = &self.config.z_grid;
        match &g.points {
            Some(p) if !p.is_empty() => p.iter().map(|p| C64::new(p[0], p[1])).collect(),
            _ => grid_nodes(g.rect.expect("validated"), g.res.expect("validated")),
        }
    }
}

/// Nodes of a `res x res` grid, row by row from `im_max` down, left to
/// right within a row.
pub fn grid_nodes(rect: [f64; 4], res: usize) -> Vec<C64> {
    let [x0, x1, y0, y1] = rect;
    let step = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (res - 1) as f64;
    let mut out = Vec::with_capacity(res * res);
    for r in 0..res {
        let im = step(y1, y0, r);
        for c in 0..res {
            out.push(C64::new(step(x0, x1, c), im));
        }
    }
    out
}

fn set_path(root: &mut Value, path: &str, value: Value) -> AppResult<()> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(AppError::config(format!("bad override path {path:?}")));
    }
    let mut cur = root;
    for (i, key) in keys.iter().enumerate() {
        let last = i + 1 == keys.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert((*key).to_string(), value);
                    return Ok(());
                }
                map.entry((*key).to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| AppError::config(format!("{path:?}: {key:?} is not an index")))?;
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| AppError::config(format!("{path:?}: index {idx} out of range")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(AppError::config(format!("{path:?}: cannot descend into {key:?}"))),
        };
    }
    unreachable!("loop returns on the last key")
}
