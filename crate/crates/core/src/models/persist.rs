//! Model directories: `model.json` sidecar, `schema.json`, and one `.spzn`
//! parameter file per network.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    AnyModel, MarginalModel, ModelKind, Synthesizer, TrainConfig, UniformModel, VaeModel, WganModel,
};
use crate::data::Schema;
use crate::error::{Error, Result};
use crate::nn::{read_mlp, write_mlp};

pub const SIDECAR_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSidecar {
    pub format_version: u32,
    pub kind: ModelKind,
    pub schema_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<TrainConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginals: Option<Vec<Vec<f64>>>,
}

pub fn save_model(
    model: &AnyModel,
    config: Option<&TrainConfig>,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let schema = model.schema();
    schema.save(dir.join("schema.json"))?;
    let mut sidecar = ModelSidecar {
        format_version: SIDECAR_VERSION,
        kind: model.kind(),
        schema_hash: schema.hash(),
        config: config.cloned(),
        marginals: None,
    };
    match model {
        AnyModel::Vae(m) => {
            write_mlp(&m.encoder, dir.join("encoder.spzn"))?;
            write_mlp(&m.decoder, dir.join("decoder.spzn"))?;
        }
        AnyModel::Wgan(m) => {
            write_mlp(&m.generator, dir.join("generator.spzn"))?;
            write_mlp(&m.critic, dir.join("critic.spzn"))?;
        }
        AnyModel::Marginal(m) => sidecar.marginals = Some(m.frequencies().to_vec()),
        AnyModel::Uniform(_) => {}
    }
    let path = dir.join("model.json");
    std::fs::write(&path, serde_json::to_string_pretty(&sidecar)?).map_err(|e| Error::io(&path, e))
}

pub fn load_model(dir: impl AsRef<Path>) -> Result<AnyModel> {
    let dir = dir.as_ref();
    let path = dir.join("model.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let sidecar: ModelSidecar = serde_json::from_str(&text)?;
    if sidecar.format_version != SIDECAR_VERSION {
        return Err(Error::Format(format!(
            "unsupported model sidecar version {}",
            sidecar.format_version
        )));
    }
    let schema = Schema::load(dir.join("schema.json"))?;
    if schema.hash() != sidecar.schema_hash {
        return Err(Error::Schema(
            "schema.json does not match the model's schema hash".into(),
        ));
    }
    let config = sidecar.config.clone().unwrap_or_default();
    Ok(match sidecar.kind {
        ModelKind::Vae => AnyModel::Vae(VaeModel::from_parts(
            schema,
            read_mlp(dir.join("encoder.spzn"))?,
            read_mlp(dir.join("decoder.spzn"))?,
            config.kl_weight,
        )?),
        ModelKind::Wgan => AnyModel::Wgan(WganModel::from_parts(
            schema,
            read_mlp(dir.join("generator.spzn"))?,
            read_mlp(dir.join("critic.spzn"))?,
            &config,
        )?),
        ModelKind::Marginal => {
            let freqs = sidecar
                .marginals
                .ok_or_else(|| Error::Format("marginal model without frequencies".into()))?;
            AnyModel::Marginal(MarginalModel::from_frequencies(schema, freqs)?)
        }
        ModelKind::Uniform => AnyModel::Uniform(UniformModel::new(schema)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CodedTable;

    #[test]
    fn every_kind_round_trips_through_disk() {
        let schema = Schema::from_cardinalities(&[3, 2]).unwrap();
        let rows: Vec<Vec<u32>> = (0..30).map(|i| vec![i % 3, i % 2]).collect();
        let train = CodedTable::from_rows(schema, &rows).unwrap();
        let config = TrainConfig {
            epochs: 1,
            batch_size: 10,
            latent_dim: 2,
            hidden_encoder: vec![4],
            hidden_decoder: vec![4],
            hidden_generator: vec![4],
            hidden_critic: vec![4],
            ..TrainConfig::default()
        };
        let tmp = tempfile::tempdir().unwrap();
        for kind in [
            ModelKind::Vae,
            ModelKind::Wgan,
            ModelKind::Marginal,
            ModelKind::Uniform,
        ] {
            let (model, _) = AnyModel::train(kind, &train, &config).unwrap();
            let dir = tmp.path().join(kind.to_string());
            save_model(&model, Some(&config), &dir).unwrap();
            let back = load_model(&dir).unwrap();
            assert_eq!(back.kind(), kind);
            assert_eq!(back.sample(200, 3).unwrap(), model.sample(200, 3).unwrap());
        }
    }

    #[test]
    fn tampered_schema_detected() {
        let schema = Schema::from_cardinalities(&[2]).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        save_model(
            &AnyModel::Uniform(UniformModel::new(schema)),
            None,
            tmp.path(),
        )
        .unwrap();
        Schema::from_cardinalities(&[3])
            .unwrap()
            .save(tmp.path().join("schema.json"))
            .unwrap();
        assert!(matches!(load_model(tmp.path()), Err(Error::Schema(_))));
    }
}
