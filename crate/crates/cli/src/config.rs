//! The `--config` JSON document. Every section is optional; unknown keys are
//! rejected with the path of the offending field.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;
use wsn_boundary::ecbr::EcBrParams;
use wsn_boundary::geometry::Polygon;
use wsn_boundary::mdsbr::MdsBrParams;
use wsn_boundary::presets::HolePreset;
use wsn_boundary::sim::AlgorithmSpec;
use wsn_boundary::truth::DEFAULT_H_MIN;
use wsn_boundary::{CommModel, NetworkConfig, Placement};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliConfig {
    pub network: NetworkSection,
    pub mdsbr: MdsBrParams,
    /// Absent means the defaults for the configured comm model.
    pub ecbr: Option<EcBrParams>,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSection {
    pub area_width: f64,
    pub area_height: f64,
    pub placement: Placement,
    pub comm_model: CommModel,
    pub target_avg_degree: f64,
    /// Added to `hole_mask`, scaled to the area.
    pub hole_preset: HolePreset,
    pub hole_mask: Vec<Polygon>,
    pub seed: u64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            area_width: 30.0,
            area_height: 30.0,
            placement: Placement::PerturbedGrid { spacing: None },
            comm_model: CommModel::Udg,
            target_avg_degree: 12.0,
            hole_preset: HolePreset::Cross,
            hole_mask: Vec::new(),
            seed: 1,
        }
    }
}

impl NetworkSection {
    pub fn to_config(&self) -> NetworkConfig {
        let mut hole_mask = self.hole_preset.polygons(self.area_width, self.area_height);
        hole_mask.extend(self.hole_mask.iter().cloned());
        NetworkConfig {
            area_width: self.area_width,
            area_height: self.area_height,
            placement: self.placement,
            comm_model: self.comm_model,
            target_avg_degree: self.target_avg_degree,
            hole_mask,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub trials: usize,
    pub base_seed: u64,
    pub h_min: f64,
    /// Labels such as `EC-BR-Ref`.
    pub algorithms: Vec<String>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            trials: 100,
            base_seed: 1,
            h_min: DEFAULT_H_MIN,
            algorithms: ["MDS-BR", "MDS-BR-Ref", "EC-BR", "EC-BR-Ref"].map(String::from).to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub csv_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            anyhow::anyhow!("config field `{path}`: {}", e.into_inner())
        })
    }

    pub fn ecbr_params(&self) -> EcBrParams {
        self.ecbr.unwrap_or_else(|| EcBrParams::for_model(&self.network.comm_model))
    }

    pub fn algorithms(&self) -> Result<Vec<AlgorithmSpec>> {
        let ecbr = self.ecbr_params();
        self.experiment
            .algorithms
            .iter()
            .map(|l| AlgorithmSpec::from_label(l, self.mdsbr, ecbr).map_err(Into::into))
            .collect()
    }

    /// Checks everything that can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        self.network.to_config().validate()?;
        self.mdsbr.validate()?;
        self.ecbr_params().validate()?;
        self.algorithms()?;
        if self.experiment.trials == 0 {
            anyhow::bail!("experiment.trials must be at least 1");
        }
        if !(self.experiment.h_min > 0.0) {
            anyhow::bail!("experiment.h_min must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        let c = CliConfig::parse("{}").unwrap();
        assert_eq!(c.network.target_avg_degree, 12.0);
        assert_eq!(c.mdsbr, MdsBrParams::default());
        assert_eq!(c.algorithms().unwrap().len(), 4);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_key_names_its_path() {
        let err = CliConfig::parse(r#"{"mdsbr": {"alpha": 90}}"#).unwrap_err().to_string();
        assert!(err.contains("mdsbr.alpha"), "{err}");
        let err = CliConfig::parse(r#"{"network": {"comm_model": {"kind": "qudg", "d": "x"}}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("network.comm_model"), "{err}");
    }

    #[test]
    fn qudg_picks_model_defaults() {
        let c = CliConfig::parse(r#"{"network": {"comm_model": {"kind": "qudg", "d": 0.75}}}"#).unwrap();
        assert_eq!(c.ecbr_params().gamma, 0.7);
    }
}
