use super::{Gradients, Matrix, Mlp};
use crate::error::{Error, Result};

/// Adam moments for one [`Mlp`], with bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<(Matrix, Vec<f64>)>,
    v: Vec<(Matrix, Vec<f64>)>,
    t: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(mlp: &Mlp, lr: f64, beta1: f64, beta2: f64, epsilon: f64) -> Result<Self> {
        if !(lr > 0.0)
            || !(0.0..1.0).contains(&beta1)
            || !(0.0..1.0).contains(&beta2)
            || !(epsilon > 0.0)
        {
            return Err(Error::Config(format!(
                "invalid Adam settings lr={lr} beta1={beta1} beta2={beta2} eps={epsilon}"
            )));
        }
        let zeros: Vec<(Matrix, Vec<f64>)> = mlp
            .layers()
            .iter()
            .map(|l| {
                let (r, c) = l.weights.shape();
                (Matrix::zeros(r, c), vec![0.0; l.bias.len()])
            })
            .collect();
        Ok(Self {
            m: zeros.clone(),
            v: zeros,
            t: 0,
            lr,
            beta1,
            beta2,
            epsilon,
        })
    }

    pub fn with_lr(mlp: &Mlp, lr: f64) -> Result<Self> {
        Self::new(mlp, lr, 0.9, 0.999, 1e-8)
    }

    /// Number of updates applied so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Applies one Adam update to `mlp`. Nothing is modified when `grads`
    /// contains a non-finite entry.
    pub fn step(&mut self, mlp: &mut Mlp, grads: &Gradients) -> Result<()> {
        if grads.layers.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "{} gradient layers for {} parameter layers",
                grads.layers.len(),
                self.m.len()
            )));
        }
        for (g, (m, _)) in grads.layers.iter().zip(&self.m) {
            if g.weights.shape() != m.shape() || g.bias.len() != m.rows() {
                return Err(Error::Shape(
                    "gradient shapes do not mirror parameters".into(),
                ));
            }
        }
        if !grads.is_finite() {
            return Err(Error::diverged("optimizer step"));
        }
        self.t += 1;
        let t = self.t as f64;
        let c1 = 1.0 - self.beta1.powf(t);
        let c2 = 1.0 - self.beta2.powf(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.epsilon);
        let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let mh = m[i] / c1;
                let vh = v[i] / c2;
                p[i] -= lr * mh / (vh.sqrt() + eps);
            }
        };
        for (((layer, g), (mw, mb)), (vw, vb)) in mlp
            .layers_mut()
            .iter_mut()
            .zip(&grads.layers)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            update(
                layer.weights.as_mut_slice(),
                g.weights.as_slice(),
                mw.as_mut_slice(),
                vw.as_mut_slice(),
            );
            update(&mut layer.bias, &g.bias, mb, vb);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, DenseLayer, LayerGrad};

    fn scalar_net(w: f64) -> Mlp {
        let layer = DenseLayer::new(
            Matrix::from_vec(1, 1, vec![w]).unwrap(),
            vec![0.0],
            Activation::Linear,
        )
        .unwrap();
        Mlp::new(vec![layer]).unwrap()
    }

    fn grads(g: f64) -> Gradients {
        Gradients {
            layers: vec![LayerGrad {
                weights: Matrix::from_vec(1, 1, vec![g]).unwrap(),
                bias: vec![g],
            }],
            input: Matrix::zeros(0, 1),
        }
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut mlp = scalar_net(0.3);
        let mut adam = AdamState::new(&mlp, 0.001, 0.9, 0.999, 1e-8).unwrap();
        adam.step(&mut mlp, &grads(1.0)).unwrap();
        let delta = mlp.layers()[0].weights.get(0, 0) - 0.3;
        assert!((delta + 0.001).abs() < 1e-9, "delta {delta}");
        assert!((mlp.layers()[0].bias[0] + 0.001).abs() < 1e-9);
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut mlp = scalar_net(0.3);
        let mut adam = AdamState::with_lr(&mlp, 0.001).unwrap();
        adam.step(&mut mlp, &grads(0.0)).unwrap();
        assert_eq!(mlp, scalar_net(0.3));
    }

    #[test]
    fn counter_increments() {
        let mut mlp = scalar_net(0.3);
        let mut adam = AdamState::with_lr(&mlp, 0.001).unwrap();
        adam.step(&mut mlp, &grads(0.5)).unwrap();
        adam.step(&mut mlp, &grads(0.5)).unwrap();
        assert_eq!(adam.t(), 2);
    }

    #[test]
    fn non_finite_gradient_is_divergence() {
        let mut mlp = scalar_net(0.3);
        let mut adam = AdamState::with_lr(&mlp, 0.001).unwrap();
        let err = adam.step(&mut mlp, &grads(f64::NAN)).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
        assert_eq!(adam.t(), 0);
        assert_eq!(mlp, scalar_net(0.3));
    }
}
