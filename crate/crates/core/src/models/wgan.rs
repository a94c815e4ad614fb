use rand::seq::SliceRandom;
use rand::Rng;

use super::config::{Relaxation, TrainConfig};
use super::losses::wgan_losses;
use super::sampling::{blocks, normal_matrix, sample_through};
use super::{EpochLog, ModelKind, Synthesizer};
use crate::data::{CodedTable, EncodedMatrix, Schema};
use crate::error::{Error, Result};
use crate::nn::{softmax_blocks_in_place, Activation, AdamState, Matrix, Mlp};

/// Wasserstein GAN with weight clipping.
///
/// The generator maps latent noise to block-softmax probabilities; during
/// training those are relaxed into near-one-hot rows so the critic's gradient
/// reaches the generator. The critic has a linear output and, after every
/// update, all its parameters lie in `[-clip_c, clip_c]`.
#[derive(Debug, Clone)]
pub struct WganModel {
    schema: Schema,
    pub generator: Mlp,
    pub critic: Mlp,
    latent_dim: usize,
    pub clip_c: f64,
    pub n_critic: usize,
    pub temperature: f64,
    pub relaxation: Relaxation,
    generator_opt: AdamState,
    critic_opt: AdamState,
}

/// Losses observed during one [`WganModel::train_step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLosses {
    /// Critic loss at the last critic update.
    pub critic: f64,
    pub generator: f64,
    /// `mean D(real) - mean D(fake)` at the last critic update.
    pub score_gap: f64,
}

struct Relaxed {
    rows: Matrix,
    temperature: f64,
}

impl WganModel {
    pub fn new<R: Rng + ?Sized>(schema: Schema, config: &TrainConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let width = schema.width();
        let generator = Mlp::build(
            config.latent_dim,
            &config.hidden_generator,
            width,
            Activation::Relu,
            Activation::SoftmaxBlocks(blocks(&schema)),
            rng,
        )?;
        let mut critic = Mlp::build(
            width,
            &config.hidden_critic,
            1,
            Activation::Relu,
            Activation::Linear,
            rng,
        )?;
        critic.clip_weights(config.clip_c);
        Self::from_parts(schema, generator, critic, config)
    }

    pub fn from_parts(
        schema: Schema,
        generator: Mlp,
        critic: Mlp,
        config: &TrainConfig,
    ) -> Result<Self> {
        config.validate()?;
        if generator.output_dim() != schema.width()
            || generator.output_activation().blocks() != blocks(&schema).as_slice()
        {
            return Err(Error::Shape(
                "generator must emit the schema's softmax blocks".into(),
            ));
        }
        if critic.input_dim() != schema.width() || critic.output_dim() != 1 {
            return Err(Error::Shape(
                "critic must map one-hot rows to a single score".into(),
            ));
        }
        let generator_opt = AdamState::new(
            &generator,
            config.lr_generator,
            config.adam_beta1,
            config.adam_beta2,
            1e-8,
        )?;
        let critic_opt = AdamState::new(
            &critic,
            config.lr_critic,
            config.adam_beta1,
            config.adam_beta2,
            1e-8,
        )?;
        Ok(Self {
            latent_dim: generator.input_dim(),
            schema,
            generator,
            critic,
            clip_c: config.clip_c,
            n_critic: config.n_critic,
            temperature: config.gumbel_temperature,
            relaxation: config.relaxation,
            generator_opt,
            critic_opt,
        })
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn generator_opt(&self) -> &AdamState {
        &self.generator_opt
    }

    pub fn critic_opt(&self) -> &AdamState {
        &self.critic_opt
    }

    /// Relaxed fake rows from generator logits.
    fn relax<R: Rng + ?Sized>(&self, logits: &Matrix, rng: &mut R) -> Relaxed {
        let blocks = blocks(&self.schema);
        let mut rows = logits.clone();
        let temperature = match self.relaxation {
            Relaxation::Softmax => 1.0,
            Relaxation::Gumbel => {
                for v in rows.as_mut_slice() {
                    let u: f64 = rng.random::<f64>().clamp(1e-12, 1.0 - 1e-12);
                    *v += -(-u.ln()).ln();
                }
                self.temperature
            }
        };
        for r in 0..rows.rows() {
            let row = rows.row_mut(r);
            row.iter_mut().for_each(|v| *v /= temperature);
            softmax_blocks_in_place(row, &blocks);
        }
        Relaxed { rows, temperature }
    }

    /// Gradient w.r.t. the generator logits given the gradient w.r.t. the
    /// relaxed rows.
    fn relax_backward(&self, relaxed: &Relaxed, grad: &Matrix) -> Matrix {
        let blocks = blocks(&self.schema);
        let mut out = grad.clone();
        for r in 0..out.rows() {
            let y = relaxed.rows.row(r);
            let g = out.row_mut(r);
            let mut start = 0;
            for &size in &blocks {
                let ys = &y[start..start + size];
                let gs = &mut g[start..start + size];
                let dot: f64 = ys.iter().zip(gs.iter()).map(|(a, b)| a * b).sum();
                for (gi, &yi) in gs.iter_mut().zip(ys) {
                    *gi = yi * (*gi - dot) / relaxed.temperature;
                }
                start += size;
            }
        }
        out
    }

    fn fake_batch<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Matrix> {
        let z = normal_matrix(n, self.latent_dim, rng);
        let trace = self.generator.forward(&z)?;
        Ok(self.relax(trace.logits(), rng).rows)
    }

    /// One critic update on `real`: Wasserstein critic loss, Adam, clip.
    /// Returns (critic loss, score gap).
    fn critic_update<R: Rng + ?Sized>(&mut self, real: &Matrix, rng: &mut R) -> Result<(f64, f64)> {
        let n = real.rows();
        let fake = self.fake_batch(n, rng)?;
        let both = real.vstack(&fake)?;
        let trace = self.critic.forward(&both)?;
        let scores = trace.output().as_slice();
        let inv = 1.0 / n as f64;
        let mean_real = scores[..n].iter().sum::<f64>() * inv;
        let mean_fake = scores[n..].iter().sum::<f64>() * inv;
        let (loss, _) = wgan_losses(mean_real, mean_fake);
        if !loss.is_finite() {
            return Err(Error::diverged("critic update"));
        }
        let grad_data = (0..2 * n).map(|i| if i < n { -inv } else { inv }).collect();
        let grad = Matrix::from_vec(2 * n, 1, grad_data)?;
        let grads = self.critic.backward(&trace, &grad)?;
        self.critic_opt
            .step(&mut self.critic, &grads)
            .map_err(|_| Error::diverged("critic update"))?;
        self.critic.clip_weights(self.clip_c);
        Ok((loss, mean_real - mean_fake))
    }

    /// One generator update through the (frozen) critic. Returns the
    /// generator loss.
    fn generator_update<R: Rng + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<f64> {
        let z = normal_matrix(n, self.latent_dim, rng);
        let gen_trace = self.generator.forward(&z)?;
        let relaxed = self.relax(gen_trace.logits(), rng);
        let critic_trace = self.critic.forward(&relaxed.rows)?;
        let inv = 1.0 / n as f64;
        let mean_fake = critic_trace.output().as_slice().iter().sum::<f64>() * inv;
        let (_, loss) = wgan_losses(0.0, mean_fake);
        if !loss.is_finite() {
            return Err(Error::diverged("generator update"));
        }
        let grad = Matrix::from_vec(n, 1, vec![-inv; n])?;
        let through_critic = self.critic.backward(&critic_trace, &grad)?;
        let dlogits = self.relax_backward(&relaxed, &through_critic.input);
        let grads = self.generator.backward_from_logits(&gen_trace, &dlogits)?;
        self.generator_opt
            .step(&mut self.generator, &grads)
            .map_err(|_| Error::diverged("generator update"))?;
        Ok(loss)
    }

    /// `n_critic` critic updates (one per real batch) followed by one
    /// generator update with the size of the last real batch.
    pub fn train_step<R: Rng + ?Sized>(
        &mut self,
        real_batches: &[Matrix],
        rng: &mut R,
    ) -> Result<StepLosses> {
        if real_batches.len() != self.n_critic {
            return Err(Error::Config(format!(
                "{} real batches for n_critic = {}",
                real_batches.len(),
                self.n_critic
            )));
        }
        let mut last = (0.0, 0.0);
        for batch in real_batches {
            if batch.cols() != self.schema.width() || batch.rows() == 0 {
                return Err(Error::Shape(format!("real batch is {:?}", batch.shape())));
            }
            last = self.critic_update(batch, rng)?;
        }
        let n = real_batches[real_batches.len() - 1].rows();
        let generator = self.generator_update(n, rng)?;
        Ok(StepLosses {
            critic: last.0,
            generator,
            score_gap: last.1,
        })
    }

    /// Trains for `config.epochs` epochs. An epoch is `ceil(N / batch)` critic
    /// batches drawn from a reshuffled stream of the training rows, grouped
    /// into generator steps of `n_critic` batches.
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
        let batch = config.batch_size.min(n);
        let steps = n.div_ceil(batch * self.n_critic).max(1);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut cursor = 0;
        let mut logs = Vec::with_capacity(config.epochs);
        for epoch in 1..=config.epochs {
            let (mut critic, mut generator, mut gap) = (0.0, 0.0, 0.0);
            for _ in 0..steps {
                let mut batches = Vec::with_capacity(self.n_critic);
                for _ in 0..self.n_critic {
                    if cursor + batch > n {
                        order.shuffle(rng);
                        cursor = 0;
                    }
                    batches.push(train.matrix.select_rows(&order[cursor..cursor + batch]));
                    cursor += batch;
                }
                let losses = self.train_step(&batches, rng)?;
                critic += losses.critic;
                generator += losses.generator;
                gap += losses.score_gap;
            }
            let k = steps as f64;
            logs.push(EpochLog::new(
                epoch,
                vec![
                    ("critic_loss", critic / k),
                    ("generator_loss", generator / k),
                    ("score_gap", gap / k),
                ],
            ));
        }
        Ok(logs)
    }
}

impl Synthesizer for WganModel {
    fn kind(&self) -> ModelKind {
        ModelKind::Wgan
    }

    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn sample(&self, n: usize, seed: u64) -> Result<CodedTable> {
        let mut rng = crate::rng::seeded(seed);
        sample_through(&self.generator, self.latent_dim, &self.schema, n, &mut rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::one_hot_encode;

    fn config() -> TrainConfig {
        TrainConfig {
            latent_dim: 3,
            hidden_generator: vec![6],
            hidden_critic: vec![5],
            ..TrainConfig::default()
        }
    }

    fn data() -> EncodedMatrix {
        let schema = Schema::from_cardinalities(&[3, 2]).unwrap();
        let rows: Vec<Vec<u32>> = (0..40).map(|i| vec![i % 3, (i % 3 == 0) as u32]).collect();
        one_hot_encode(&CodedTable::from_rows(schema, &rows).unwrap()).unwrap()
    }

    #[test]
    fn step_counts_and_clipping() {
        let data = data();
        let mut rng = crate::rng::seeded(1);
        let mut model = WganModel::new(data.schema.clone(), &config(), &mut rng).unwrap();
        let batches: Vec<Matrix> = (0..5)
            .map(|i| data.matrix.select_rows(&[i, i + 1, i + 2]))
            .collect();
        model.train_step(&batches, &mut rng).unwrap();
        assert_eq!(model.critic_opt().t(), 5);
        assert_eq!(model.generator_opt().t(), 1);
        assert!(model.critic.max_abs_param() <= model.clip_c);
        assert!(model.train_step(&batches[..4], &mut rng).is_err());
    }

    #[test]
    fn generator_update_leaves_critic_alone() {
        let data = data();
        let mut rng = crate::rng::seeded(2);
        let mut model = WganModel::new(data.schema.clone(), &config(), &mut rng).unwrap();
        let critic = model.critic.clone();
        let generator = model.generator.clone();
        model.generator_update(8, &mut rng).unwrap();
        assert_eq!(model.critic, critic);
        assert_ne!(model.generator, generator);
    }

    /// Generator gradient through relaxation and critic against central
    /// differences of the generator loss at fixed noise.
    #[test]
    fn generator_gradient_matches_finite_differences() {
        let data = data();
        for relaxation in [Relaxation::Gumbel, Relaxation::Softmax] {
            let mut rng = crate::rng::seeded(3);
            let cfg = TrainConfig {
                relaxation,
                clip_c: 0.5,
                ..config()
            };
            let model = WganModel::new(data.schema.clone(), &cfg, &mut rng).unwrap();
            let z = normal_matrix(4, 3, &mut rng);
            let seed = 99;
            let loss_of = |m: &WganModel| {
                let mut r = crate::rng::seeded(seed);
                let t = m.generator.forward(&z).unwrap();
                let relaxed = m.relax(t.logits(), &mut r);
                let s = m.critic.predict(&relaxed.rows).unwrap();
                1.0 - s.as_slice().iter().sum::<f64>() / 4.0
            };
            let mut r = crate::rng::seeded(seed);
            let gt = model.generator.forward(&z).unwrap();
            let relaxed = model.relax(gt.logits(), &mut r);
            let ct = model.critic.forward(&relaxed.rows).unwrap();
            let back = model
                .critic
                .backward(&ct, &Matrix::from_vec(4, 1, vec![-0.25; 4]).unwrap())
                .unwrap();
            let dlogits = model.relax_backward(&relaxed, &back.input);
            let grads = model.generator.backward_from_logits(&gt, &dlogits).unwrap();
            let h = 1e-6;
            for (li, lg) in grads.layers.iter().enumerate() {
                for k in 0..lg.weights.as_slice().len() {
                    let mut p = model.clone();
                    let mut m = model.clone();
                    p.generator.layers_mut()[li].weights.as_mut_slice()[k] += h;
                    m.generator.layers_mut()[li].weights.as_mut_slice()[k] -= h;
                    let fd = (loss_of(&p) - loss_of(&m)) / (2.0 * h);
                    let an = lg.weights.as_slice()[k];
                    let err = (fd - an).abs() / (fd.abs() + an.abs()).max(1e-7);
                    assert!(
                        err < 1e-4,
                        "{relaxation:?} layer {li} weight {k}: {fd} vs {an}"
                    );
                }
            }
        }
    }

    #[test]
    fn fit_logs_every_epoch_and_samples() {
        let data = data();
        let mut rng = crate::rng::seeded(4);
        let cfg = TrainConfig {
            epochs: 3,
            batch_size: 8,
            ..config()
        };
        let mut model = WganModel::new(data.schema.clone(), &cfg, &mut rng).unwrap();
        let logs = model.fit(&data, &cfg, &mut rng).unwrap();
        assert_eq!(logs.len(), 3);
        assert!(model.critic.max_abs_param() <= cfg.clip_c);
        let s = model.sample(100, 5).unwrap();
        assert_eq!(s, model.sample(100, 5).unwrap());
        assert_eq!(model.sample(0, 5).unwrap().n_rows(), 0);
    }
}
