use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::closed_form::{enstrophy_split, h3_split};
use crate::dynamics::{ComplexTriad, CoupledTriads, IntegratorOptions, RealTriad, System, VectorField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemId {
    Real,
    Complex,
    Coupled,
}

/// Coupling constants; all default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    #[serde(rename = "C", default = "one")]
    pub c: f64,
    #[serde(rename = "Gamma", default = "one")]
    pub gamma: f64,
    #[serde(rename = "GammaTilde", default = "one")]
    pub gamma_tilde: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings {
            c: 1.0,
            gamma: 1.0,
            gamma_tilde: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct H3Split {
    #[serde(rename = "W0")]
    pub w0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnstrophySplit {
    #[serde(rename = "Xi0")]
    pub xi0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NearSaddle {
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    1e-4
}

/// Initial-condition recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialSpec {
    /// Flat state vector; complex amplitudes as `(re, im)` pairs.
    #[serde(rename = "explicit")]
    Explicit(Vec<f64>),
    /// `λ⁶p₀² = μ⁶q₀² = W₀/2`, `r₀ = 0`.
    #[serde(rename = "thm3.9 split")]
    H3Split(H3Split),
    /// `λ²p₀² = μ²q₀² = Ξ₀/2`, `r₀ = 0`.
    #[serde(rename = "thm3.11 split")]
    EnstrophySplit(EnstrophySplit),
    /// `(0, √E₀(1−ε), ε√E₀)` next to the saddle on the middle axis.
    #[serde(rename = "near_saddle")]
    NearSaddle(NearSaddle),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Trajectory CSV; the metadata sidecar sits next to it as `<stem>.meta.json`.
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub report: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    pub system: SystemId,
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub couplings: Couplings,
    pub initial: InitialSpec,
    pub t_end: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default)]
    pub sample_dt: Option<f64>,
    #[serde(default = "default_s_list")]
    pub s_list: Vec<f64>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub renormalize_energy: bool,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

fn default_rtol() -> f64 {
    1e-10
}

fn default_atol() -> f64 {
    1e-12
}

fn default_s_list() -> Vec<f64> {
    vec![1.0, 3.0]
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub t_end: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub sample_dt: Option<f64>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::domain(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(v) = o.t_end {
            self.t_end = v;
        }
        if let Some(v) = o.rtol {
            self.rtol = v;
        }
        if let Some(v) = o.atol {
            self.atol = v;
        }
        if let Some(v) = o.sample_dt {
            self.sample_dt = Some(v);
        }
        self.validate()
    }

    pub fn build_system(&self) -> Result<System> {
        let l = &self.lambdas;
        let want = match self.system {
            SystemId::Real | SystemId::Complex => 3,
            SystemId::Coupled => 5,
        };
        if l.len() != want {
            return Err(Error::domain(format!(
                "{:?} system needs {want} eigenvalues, got {}",
                self.system,
                l.len()
            )));
        }
        let c = self.couplings;
        Ok(match self.system {
            SystemId::Real => System::Real(RealTriad::new(l[0], l[1], l[2])?),
            SystemId::Complex => System::Complex(ComplexTriad::new([l[0], l[1], l[2]], c.c)?),
            SystemId::Coupled => {
                System::Coupled(CoupledTriads::new([l[0], l[1], l[2], l[3], l[4]], c.gamma, c.gamma_tilde)?)
            }
        })
    }

    pub fn initial_state(&self) -> Result<Vec<f64>> {
        let sys = self.build_system()?;
        let real = |what: &str| -> Result<RealTriad> {
            match sys {
                System::Real(b) => Ok(b),
                _ => Err(Error::domain(format!("initial recipe '{what}' applies to the real system only"))),
            }
        };
        let y = match &self.initial {
            InitialSpec::Explicit(v) => {
                if v.len() != sys.dim() {
                    return Err(Error::domain(format!(
                        "explicit initial state needs {} values, got {}",
                        sys.dim(),
                        v.len()
                    )));
                }
                v.clone()
            }
            InitialSpec::H3Split(s) => {
                let b = real("thm3.9 split")?;
                h3_split(b.lambda, b.mu, s.w0)?.to_vec()
            }
            InitialSpec::EnstrophySplit(s) => {
                let b = real("thm3.11 split")?;
                enstrophy_split(b.lambda, b.mu, s.xi0)?.to_vec()
            }
            InitialSpec::NearSaddle(s) => {
                let b = real("near_saddle")?;
                if !(b.lambda > b.mu && b.mu > b.nu) {
                    return Err(Error::domain("near_saddle needs lambda > mu > nu so that q is the saddle axis"));
                }
                if !(s.e0 > 0.0) || !(s.epsilon > 0.0 && s.epsilon < 1.0) {
                    return Err(Error::domain("near_saddle needs E0 > 0 and 0 < epsilon < 1"));
                }
                let a = s.e0.sqrt();
                vec![0.0, a * (1.0 - s.epsilon), s.epsilon * a]
            }
        };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("initial state must be finite"));
        }
        Ok(y)
    }

    pub fn integrator_options(&self) -> IntegratorOptions {
        let mut o = IntegratorOptions::with_tolerances(self.rtol, self.atol);
        o.sample_dt = self.sample_dt;
        o.renormalize_energy = self.renormalize_energy;
        if let Some(m) = self.max_steps {
            o.max_steps = m;
        }
        o
    }

    /// Full validation, run before any computation.
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.schema {
            if s != crate::SCHEMA_VERSION {
                return Err(Error::domain(format!("unsupported config schema '{s}'")));
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::domain(format!("t_end must be positive, got {}", self.t_end)));
        }
        for &s in &self.s_list {
            if !(s >= 1.0 && s.is_finite()) {
                return Err(Error::domain(format!("s_list entries must be >= 1, got {s}")));
            }
        }
        self.integrator_options().validate()?;
        self.initial_state()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_recipes() {
        let cfg = RunConfig::from_json(
            r#"{"system":"real","lambdas":[50,1,-49],"initial":{"thm3.9 split":{"W0":1}},"t_end":1}"#,
        )
        .unwrap();
        let y = cfg.initial_state().unwrap();
        assert_eq!(y[2], 0.0);
        let cfg = RunConfig::from_json(
            r#"{"system":"real","lambdas":[2,1,-1],"initial":{"near_saddle":{"E0":4}},"t_end":1}"#,
        )
        .unwrap();
        assert_eq!(cfg.initial_state().unwrap(), vec![0.0, 2.0 * (1.0 - 1e-4), 2e-4]);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#"{"system":"real","lambdas":[2,1,-1],"initial":{"explicit":[1,0,0]},"t_end":1,"extra":1}"#,
            r#"{"system":"real","lambdas":[2,1],"initial":{"explicit":[1,0,0]},"t_end":1}"#,
            r#"{"system":"real","lambdas":[2,1,-1],"initial":{"explicit":[1,0]},"t_end":1}"#,
            r#"{"system":"real","lambdas":[2,1,-1],"initial":{"explicit":[1,0,0]},"t_end":-1}"#,
            r#"{"system":"coupled","lambdas":[1,-1,2,-2,3],"initial":{"thm3.9 split":{"W0":1}},"t_end":1}"#,
            r#"{"system":"real","lambdas":[2,1,-1],"initial":{"explicit":[1,0,0]},"t_end":1,"rtol":0.1}"#,
        ];
        for b in bad {
            assert!(RunConfig::from_json(b).is_err(), "{b}");
        }
    }
}
