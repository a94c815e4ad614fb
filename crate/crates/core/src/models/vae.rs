use rand::seq::SliceRandom;
use rand::Rng;

use super::config::TrainConfig;
use super::losses::gaussian_kl;
use super::sampling::{blocks, normal_matrix, sample_through};
use super::{EpochLog, ModelKind, Synthesizer};
use crate::data::{CodedTable, EncodedMatrix, Schema};
use crate::error::{Error, Result};
use crate::nn::{cross_entropy_blocks, Activation, AdamState, Gradients, Matrix, Mlp};

/// Variational autoencoder over one-hot agent rows.
///
/// The encoder maps a row to `2 * latent_dim` linear outputs (means, then
/// log-variances); the decoder maps a latent vector to block-softmax
/// probabilities, one block per variable.
#[derive(Debug, Clone)]
pub struct VaeModel {
    schema: Schema,
    pub encoder: Mlp,
    pub decoder: Mlp,
    latent_dim: usize,
    pub kl_weight: f64,
}

/// Loss value, its two terms, and gradients for both networks.
#[derive(Debug, Clone)]
pub struct VaeLoss {
    pub loss: f64,
    pub reconstruction: f64,
    pub kl: f64,
    pub encoder: Gradients,
    pub decoder: Gradients,
}

impl VaeModel {
    pub fn new<R: Rng + ?Sized>(schema: Schema, config: &TrainConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let width = schema.width();
        let latent = config.latent_dim;
        let encoder = Mlp::build(
            width,
            &config.hidden_encoder,
            2 * latent,
            Activation::Relu,
            Activation::Linear,
            rng,
        )?;
        let decoder = Mlp::build(
            latent,
            &config.hidden_decoder,
            width,
            Activation::Relu,
            Activation::SoftmaxBlocks(blocks(&schema)),
            rng,
        )?;
        Self::from_parts(schema, encoder, decoder, config.kl_weight)
    }

    pub fn from_parts(schema: Schema, encoder: Mlp, decoder: Mlp, kl_weight: f64) -> Result<Self> {
        let width = schema.width();
        if encoder.input_dim() != width || !encoder.output_dim().is_multiple_of(2) {
            return Err(Error::Shape(
                "encoder must map one-hot rows to 2 * latent_dim".into(),
            ));
        }
        let latent_dim = encoder.output_dim() / 2;
        if decoder.input_dim() != latent_dim
            || decoder.output_activation().blocks() != blocks(&schema).as_slice()
        {
            return Err(Error::Shape(
                "decoder must map latent_dim to the schema's softmax blocks".into(),
            ));
        }
        Ok(Self {
            schema,
            encoder,
            decoder,
            latent_dim,
            kl_weight,
        })
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    /// Reconstruction cross-entropy plus weighted KL, both batch-averaged, with
    /// the latent sample reparameterised as `mu + exp(logvar / 2) * noise`.
    pub fn loss(&self, batch: &Matrix, noise: &Matrix) -> Result<VaeLoss> {
        let n = batch.rows();
        let l = self.latent_dim;
        if noise.shape() != (n, l) {
            return Err(Error::Shape(format!(
                "noise is {:?}, expected ({n}, {l})",
                noise.shape()
            )));
        }
        let enc = self.encoder.forward(batch)?;
        let stats = enc.output();
        let mut z = Matrix::zeros(n, l);
        let mut kl = 0.0;
        for r in 0..n {
            let s = stats.row(r);
            let (mu, logvar) = s.split_at(l);
            kl += gaussian_kl(mu, logvar);
            let e = noise.row(r);
            for (d, zd) in z.row_mut(r).iter_mut().enumerate() {
                *zd = mu[d] + (0.5 * logvar[d]).exp() * e[d];
            }
        }
        let inv = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        kl *= inv;

        let dec = self.decoder.forward(&z)?;
        let (reconstruction, dlogits) =
            cross_entropy_blocks(dec.output(), batch, &blocks(&self.schema))?;
        let loss = reconstruction + self.kl_weight * kl;
        if !loss.is_finite() {
            return Err(Error::diverged("VAE loss"));
        }
        let decoder = self.decoder.backward_from_logits(&dec, &dlogits)?;
        let dz = &decoder.input;

        let mut dstats = Matrix::zeros(n, 2 * l);
        for r in 0..n {
            let s = stats.row(r);
            let e = noise.row(r);
            let g = dz.row(r);
            let out = dstats.row_mut(r);
            for d in 0..l {
                let (mu, logvar) = (s[d], s[l + d]);
                let sd = (0.5 * logvar).exp();
                out[d] = g[d] + self.kl_weight * mu * inv;
                out[l + d] =
                    g[d] * e[d] * 0.5 * sd + self.kl_weight * 0.5 * (logvar.exp() - 1.0) * inv;
            }
        }
        let encoder = self.encoder.backward(&enc, &dstats)?;
        Ok(VaeLoss {
            loss,
            reconstruction,
            kl,
            encoder,
            decoder,
        })
    }

    /// Mini-batch training; one log entry per epoch with batch-size-weighted
    /// means of the loss terms.
    pub fn fit<R: Rng + ?Sized>(
        &mut self,
        train: &EncodedMatrix,
        config: &TrainConfig,
        rng: &mut R,
    ) -> Result<Vec<EpochLog>> {
        config.validate()?;
        if train.schema != self.schema {
            return Err(Error::Schema(
                "training data schema differs from the model's".into(),
            ));
        }
        let n = train.n_rows();
        if n == 0 {
            return Err(Error::Config("cannot train on an empty table".into()));
        }
        let mut enc_opt = AdamState::new(
            &self.encoder,
            config.lr_vae,
            config.adam_beta1,
            config.adam_beta2,
            1e-8,
        )?;
        let mut dec_opt = AdamState::new(
            &self.decoder,
            config.lr_vae,
            config.adam_beta1,
            config.adam_beta2,
            1e-8,
        )?;
        let mut order: Vec<usize> = (0..n).collect();
        let mut logs = Vec::with_capacity(config.epochs);
        for epoch in 1..=config.epochs {
            order.shuffle(rng);
            let (mut tot, mut rec, mut kl) = (0.0, 0.0, 0.0);
            for chunk in order.chunks(config.batch_size) {
                let batch = train.matrix.select_rows(chunk);
                let noise = normal_matrix(chunk.len(), self.latent_dim, rng);
                let out = self.loss(&batch, &noise)?;
                enc_opt.step(&mut self.encoder, &out.encoder)?;
                dec_opt.step(&mut self.decoder, &out.decoder)?;
                let w = chunk.len() as f64 / n as f64;
                tot += w * out.loss;
                rec += w * out.reconstruction;
                kl += w * out.kl;
            }
            logs.push(EpochLog::new(
                epoch,
                vec![("loss", tot), ("reconstruction", rec), ("kl", kl)],
            ));
        }
        Ok(logs)
    }
}

impl Synthesizer for VaeModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Vae
    }

    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn sample(&self, n: usize, seed: u64) -> Result<CodedTable> {
        let mut rng = crate::rng::seeded(seed);
        sample_through(&self.decoder, self.latent_dim, &self.schema, n, &mut rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::one_hot_encode;

    fn tiny_config() -> TrainConfig {
        TrainConfig {
            latent_dim: 2,
            hidden_encoder: vec![5],
            hidden_decoder: vec![4],
            ..TrainConfig::default()
        }
    }

    fn toy_batch() -> (Schema, Matrix) {
        let schema = Schema::from_cardinalities(&[3, 2]).unwrap();
        let t =
            CodedTable::from_rows(schema.clone(), &[vec![0, 1], vec![2, 0], vec![1, 1]]).unwrap();
        (schema, one_hot_encode(&t).unwrap().matrix)
    }

    fn weight_mut(m: &mut VaeModel, net: usize, layer: usize, k: usize) -> &mut f64 {
        let net = if net == 0 {
            &mut m.encoder
        } else {
            &mut m.decoder
        };
        &mut net.layers_mut()[layer].weights.as_mut_slice()[k]
    }

    #[test]
    fn gradients_match_finite_differences() {
        let (schema, batch) = toy_batch();
        let mut rng = crate::rng::seeded(4);
        let model = VaeModel::new(schema, &tiny_config(), &mut rng).unwrap();
        let noise = normal_matrix(3, 2, &mut rng);
        let out = model.loss(&batch, &noise).unwrap();
        let h = 1e-6;
        for (net_idx, grads) in [(0, &out.encoder), (1, &out.decoder)] {
            for (li, lg) in grads.layers.iter().enumerate() {
                for k in 0..lg.weights.as_slice().len() {
                    let mut plus = model.clone();
                    let mut minus = model.clone();
                    *weight_mut(&mut plus, net_idx, li, k) += h;
                    *weight_mut(&mut minus, net_idx, li, k) -= h;
                    let fd = (plus.loss(&batch, &noise).unwrap().loss
                        - minus.loss(&batch, &noise).unwrap().loss)
                        / (2.0 * h);
                    let an = lg.weights.as_slice()[k];
                    let err = (fd - an).abs() / (fd.abs() + an.abs()).max(1e-6);
                    assert!(
                        err < 1e-4,
                        "net {net_idx} layer {li} weight {k}: fd {fd} vs {an}"
                    );
                }
            }
        }
    }

    #[test]
    fn kl_term_is_batch_mean() {
        let (schema, batch) = toy_batch();
        let mut rng = crate::rng::seeded(2);
        let mut model = VaeModel::new(schema, &tiny_config(), &mut rng).unwrap();
        // zero the encoder's output layer so mu = 0 and logvar = 0
        let last = model.encoder.layers_mut().last_mut().unwrap();
        last.weights.as_mut_slice().fill(0.0);
        last.bias.fill(0.0);
        let out = model.loss(&batch, &Matrix::zeros(3, 2)).unwrap();
        assert_eq!(out.kl, 0.0);
        // mu = 1 on one dimension gives KL 0.5 per row
        model.encoder.layers_mut().last_mut().unwrap().bias[0] = 1.0;
        let out = model.loss(&batch, &Matrix::zeros(3, 2)).unwrap();
        assert!((out.kl - 0.5).abs() < 1e-12);
    }

    #[test]
    fn samples_are_valid_and_seeded() {
        let (schema, _) = toy_batch();
        let mut rng = crate::rng::seeded(1);
        let model = VaeModel::new(schema, &tiny_config(), &mut rng).unwrap();
        let a = model.sample(500, 7).unwrap();
        assert_eq!(a.n_rows(), 500);
        assert_eq!(a, model.sample(500, 7).unwrap());
        assert_ne!(a, model.sample(500, 8).unwrap());
        CodedTable::from_flat(a.schema().clone(), a.as_flat().to_vec()).unwrap();
    }

    #[test]
    fn forced_decoder_block_gives_constant_variable() {
        let (schema, _) = toy_batch();
        let mut rng = crate::rng::seeded(1);
        let mut model = VaeModel::new(schema, &tiny_config(), &mut rng).unwrap();
        let last = model.decoder.layers_mut().last_mut().unwrap();
        for o in 0..3 {
            last.weights.row_mut(o).fill(0.0);
        }
        last.bias[0] = 1e3;
        last.bias[1] = -1e3;
        last.bias[2] = -1e3;
        let s = model.sample(2_000, 3).unwrap();
        assert!(s.column(0).iter().all(|&c| c == 0));
    }
}
