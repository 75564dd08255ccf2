//! TOML manifold descriptions.
//!
//! ```toml
//! name = "glued-balls"
//! level = 2            # optional, a caller may override
//! dim = 1              # m, charts land in A_r^m
//! model_dim = 2        # points of M live in A_r^model_dim
//! seed = 0             # landmark sampling seed, optional
//!
//! [[charts]]
//! id = "a"
//! radius = 1.0
//! forward = ["(mul 0.5 (mul z0 (inv (sub 1 z1))))"]
//! inverse = ["...", "..."]
//!
//! [[transitions]]      # optional, checked against forward_to . inverse_from
//! from = "a"
//! to = "b"
//! map = ["(mul (conj z0) (inv (mul 4 (mul (conj z0) z0))))"]
//! ```
//!
//! A file may instead name a builtin: `builtin = "sphere"` with `level`
//! and `dim`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Chart, Manifold, Transition};
use crate::error::{Error, Result};
use crate::holomorphy::{text, PhraseMap};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub name: Option<String>,
    pub builtin: Option<String>,
    pub level: Option<u32>,
    pub dim: Option<usize>,
    pub model_dim: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub charts: Vec<ChartConfig>,
    #[serde(default)]
    pub transitions: Vec<TransitionConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    pub id: String,
    pub radius: f64,
    pub forward: Vec<String>,
    pub inverse: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionConfig {
    pub from: String,
    pub to: String,
    pub map: Vec<String>,
}

impl ManifoldConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&src)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Build the atlas. `level` overrides the file's value; `dim` may only
    /// differ from the file's for builtins.
    pub fn build(&self, level: Option<u32>, dim: Option<usize>) -> Result<Manifold> {
        let level = level.or(self.level).ok_or_else(|| Error::Config("missing `level`".into()))?;
        if let Some(name) = &self.builtin {
            let dim = dim.or(self.dim).unwrap_or(1);
            return Manifold::builtin(name, level, dim);
        }
        let file_dim = self.dim.ok_or_else(|| Error::Config("missing `dim`".into()))?;
        if let Some(d) = dim.filter(|&d| d != file_dim) {
            return Err(Error::Config(format!("charts are written for dim = {file_dim}, not {d}")));
        }
        let dim = file_dim;
        let model_dim = self.model_dim.ok_or_else(|| Error::Config("missing `model_dim`".into()))?;
        if dim == 0 || model_dim == 0 {
            return Err(Error::Config("`dim` and `model_dim` must be at least 1".into()));
        }
        if self.charts.is_empty() {
            return Err(Error::Config("no charts".into()));
        }
        let parse_map = |what: &str, input: usize, output: usize, src: &[String]| -> Result<PhraseMap<f64>> {
            if src.len() != output {
                return Err(Error::Config(format!("{what}: expected {output} components, got {}", src.len())));
            }
            let comps = src
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    text::parse::<f64>(s, level).map_err(|e| Error::Config(format!("{what}[{k}]: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            PhraseMap::new(input, level, comps).map_err(|e| Error::Config(format!("{what}: {e}")))
        };
        let mut charts = Vec::with_capacity(self.charts.len());
        for c in &self.charts {
            let forward = parse_map(&format!("chart {} forward", c.id), model_dim, dim, &c.forward)?;
            let inverse = parse_map(&format!("chart {} inverse", c.id), dim, model_dim, &c.inverse)?;
            charts.push(Chart::new(&c.id, c.radius, forward, inverse)?);
        }
        let index = |id: &str| {
            charts
                .iter()
                .position(|c| c.id() == id)
                .ok_or_else(|| Error::Config(format!("transition names unknown chart `{id}`")))
        };
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            let from = index(&t.from)?;
            let to = index(&t.to)?;
            let map = parse_map(&format!("transition {} -> {}", t.from, t.to), dim, dim, &t.map)?;
            transitions.push(Transition { from, to, map });
        }
        let name = self.name.clone().unwrap_or_else(|| "custom".into());
        Manifold::new(name, level, dim, model_dim, charts, transitions, self.seed)
    }
}

fn norm_sqr_text(m: usize) -> String {
    let terms: Vec<String> = (0..m).map(|k| format!("(mul (conj z{k}) z{k})")).collect();
    if m == 1 {
        terms[0].clone()
    } else {
        format!("(add {})", terms.join(" "))
    }
}

/// Two balls of radius 1 glued along an annulus: the sphere `S^{2^r m}` with
/// chart coordinates `w = u / 2` of the stereographic `u`.
pub fn glued_balls_toml(level: u32, m: usize) -> String {
    let s = norm_sqr_text(m);
    let quote = |v: Vec<String>| v.iter().map(|x| format!("\"{x}\"")).collect::<Vec<_>>().join(", ");
    let fwd = |conj: bool, denom: &str| {
        quote(
            (0..m)
                .map(|k| {
                    let head = if conj { format!("(conj z{k})") } else { format!("z{k}") };
                    format!("(mul 0.5 (mul {head} (inv ({denom} 1 z{m}))))")
                })
                .collect(),
        )
    };
    let inv = |conj: bool| {
        let mut v: Vec<String> = (0..m)
            .map(|k| {
                let head = if conj { format!("(conj z{k})") } else { format!("z{k}") };
                format!("(mul (mul 4 {head}) (inv (add 1 (mul 4 {s}))))")
            })
            .collect();
        v.push(if conj {
            format!("(mul (sub 1 (mul 4 {s})) (inv (add 1 (mul 4 {s}))))")
        } else {
            format!("(mul (sub (mul 4 {s}) 1) (inv (add 1 (mul 4 {s}))))")
        });
        quote(v)
    };
    let transition = quote((0..m).map(|k| format!("(mul (conj z{k}) (inv (mul 4 {s})))")).collect());
    format!(
        r#"name = "glued-balls"
level = {level}
dim = {m}
model_dim = {model}

[[charts]]
id = "a"
radius = 1.0
forward = [{fa}]
inverse = [{ia}]

[[charts]]
id = "b"
radius = 1.0
forward = [{fb}]
inverse = [{ib}]

[[transitions]]
from = "a"
to = "b"
map = [{transition}]

[[transitions]]
from = "b"
to = "a"
map = [{transition}]
"#,
        model = m + 1,
        fa = fwd(false, "sub"),
        ia = inv(false),
        fb = fwd(true, "add"),
        ib = inv(true),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glued_balls_parses_at_several_levels() {
        for (level, m) in [(2, 1), (2, 2), (3, 1)] {
            let cfg = ManifoldConfig::from_toml(&glued_balls_toml(level, m)).unwrap();
            let man = cfg.build(None, None).unwrap();
            assert_eq!(man.level(), level);
            assert_eq!(man.dim(), m);
            assert_eq!(man.charts().len(), 2);
            assert_eq!(man.transitions().len(), 2);
        }
    }

    #[test]
    fn builtin_reference() {
        let cfg = ManifoldConfig::from_toml("builtin = \"sphere\"\nlevel = 3\ndim = 1\n").unwrap();
        let man = cfg.build(None, None).unwrap();
        assert_eq!((man.level(), man.dim(), man.model_dim()), (3, 1, 2));
        assert_eq!(cfg.build(Some(2), Some(2)).unwrap().model_dim(), 3);
        let bad = ManifoldConfig::from_toml("builtin = \"torus\"\nlevel = 2\n").unwrap();
        assert!(matches!(bad.build(None, None), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn errors_name_the_problem() {
        assert!(matches!(ManifoldConfig::from_toml("level = \"x\""), Err(Error::Config(_))));
        assert!(matches!(ManifoldConfig::from_toml("colour = 1"), Err(Error::Config(_))));
        let mut cfg = ManifoldConfig::from_toml(&glued_balls_toml(2, 1)).unwrap();
        cfg.charts[0].forward[0] = "(mul z0".into();
        let err = cfg.build(None, None).unwrap_err().to_string();
        assert!(err.contains("chart a forward[0]"), "{err}");
        let mut cfg = ManifoldConfig::from_toml(&glued_balls_toml(2, 1)).unwrap();
        cfg.transitions[0].to = "c".into();
        assert!(cfg.build(None, None).unwrap_err().to_string().contains("`c`"));
        let mut cfg = ManifoldConfig::from_toml(&glued_balls_toml(2, 1)).unwrap();
        cfg.level = None;
        assert!(cfg.build(None, None).is_err());
        assert!(cfg.build(Some(2), None).is_ok());
        assert!(cfg.build(Some(2), Some(2)).unwrap_err().to_string().contains("dim = 1"));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ManifoldConfig::from_toml(&glued_balls_toml(2, 1)).unwrap();
        assert_eq!(ManifoldConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }
}
