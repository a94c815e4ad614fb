use rand::Rng;

use super::{Activation, DenseLayer, Matrix};
use crate::error::{Error, Result};

/// A stack of dense layers whose dimensions chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
}

/// Everything [`Mlp::forward`] computed, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct Trace {
    pub input: Matrix,
    /// Pre-activations `W a + b`, one per layer.
    pub pre: Vec<Matrix>,
    /// Layer outputs after the activation, one per layer.
    pub outputs: Vec<Matrix>,
}

impl Trace {
    pub fn output(&self) -> &Matrix {
        self.outputs.last().unwrap_or(&self.input)
    }

    pub fn logits(&self) -> &Matrix {
        self.pre.last().unwrap_or(&self.input)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Parameter gradients for every layer plus the gradient w.r.t. the input batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
    pub input: Matrix,
}

impl Gradients {
    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|g| g.weights.is_finite() && g.bias.iter().all(|v| v.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.layers.iter().fold(0.0, |m, g| {
            g.bias
                .iter()
                .fold(m.max(g.weights.max_abs()), |m, b| m.max(b.abs()))
        })
    }
}

impl Mlp {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("an MLP needs at least one layer".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::Shape(format!(
                    "layer {i} outputs {} but layer {} expects {}",
                    pair[0].output_dim(),
                    i + 1,
                    pair[1].input_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Glorot-initialised network `input -> hidden... -> output`, with
    /// `hidden_activation` on every hidden layer.
    pub fn build<R: Rng + ?Sized>(
        input: usize,
        hidden: &[usize],
        output: usize,
        hidden_activation: Activation,
        output_activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut prev = input;
        for &h in hidden {
            layers.push(DenseLayer::glorot(prev, h, hidden_activation.clone(), rng)?);
            prev = h;
        }
        layers.push(DenseLayer::glorot(prev, output, output_activation, rng)?);
        Self::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    pub fn output_activation(&self) -> &Activation {
        &self.layers[self.layers.len() - 1].activation
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.bias.len())
            .sum()
    }

    fn check_input(&self, batch: &Matrix) -> Result<()> {
        if batch.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "batch has {} columns, network expects {}",
                batch.cols(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, batch: &Matrix) -> Result<Trace> {
        self.check_input(batch)?;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut outputs: Vec<Matrix> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let z = layer.affine(outputs.last().unwrap_or(batch));
            let mut a = z.clone();
            layer.activation.apply(&mut a);
            pre.push(z);
            outputs.push(a);
        }
        Ok(Trace {
            input: batch.clone(),
            pre,
            outputs,
        })
    }

    /// Final-layer output only.
    pub fn predict(&self, batch: &Matrix) -> Result<Matrix> {
        self.check_input(batch)?;
        let mut current: Option<Matrix> = None;
        for layer in &self.layers {
            let mut z = layer.affine(current.as_ref().unwrap_or(batch));
            layer.activation.apply(&mut z);
            current = Some(z);
        }
        Ok(current.expect("at least one layer"))
    }

    /// Backpropagates `output_grad`, the loss gradient w.r.t. the network
    /// output (after the final activation).
    pub fn backward(&self, trace: &Trace, output_grad: &Matrix) -> Result<Gradients> {
        self.check_grad(trace, output_grad)?;
        let last = self.layers.len() - 1;
        let mut grad = output_grad.clone();
        self.layers[last]
            .activation
            .backprop(&trace.pre[last], &trace.outputs[last], &mut grad);
        self.backward_inner(trace, grad)
    }

    /// Backpropagates `logit_grad`, the loss gradient w.r.t. the final
    /// pre-activation (what a fused softmax + cross-entropy produces).
    pub fn backward_from_logits(&self, trace: &Trace, logit_grad: &Matrix) -> Result<Gradients> {
        self.check_grad(trace, logit_grad)?;
        self.backward_inner(trace, logit_grad.clone())
    }

    fn check_grad(&self, trace: &Trace, grad: &Matrix) -> Result<()> {
        if trace.outputs.len() != self.layers.len() {
            return Err(Error::Shape(format!(
                "trace has {} layers, network has {}",
                trace.outputs.len(),
                self.layers.len()
            )));
        }
        if grad.shape() != trace.output().shape() {
            return Err(Error::Shape(format!(
                "output gradient is {:?}, network output is {:?}",
                grad.shape(),
                trace.output().shape()
            )));
        }
        Ok(())
    }

    /// `delta` is the gradient w.r.t. the last layer's pre-activation.
    fn backward_inner(&self, trace: &Trace, mut delta: Matrix) -> Result<Gradients> {
        let mut grads: Vec<LayerGrad> = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let (out_dim, in_dim) = layer.weights.shape();
            let input = if l == 0 {
                &trace.input
            } else {
                &trace.outputs[l - 1]
            };

            let mut dw = Matrix::zeros(out_dim, in_dim);
            let mut db = vec![0.0; out_dim];
            let mut dx = Matrix::zeros(delta.rows(), in_dim);
            let w = layer.weights.as_slice();
            for r in 0..delta.rows() {
                let d = delta.row(r);
                let x = input.row(r);
                let dxr = dx.row_mut(r);
                for o in 0..out_dim {
                    let g = d[o];
                    if g == 0.0 {
                        continue;
                    }
                    db[o] += g;
                    let dwo = &mut dw.as_mut_slice()[o * in_dim..(o + 1) * in_dim];
                    for (acc, &xi) in dwo.iter_mut().zip(x) {
                        *acc += g * xi;
                    }
                    let wo = &w[o * in_dim..(o + 1) * in_dim];
                    for (acc, &wi) in dxr.iter_mut().zip(wo) {
                        *acc += g * wi;
                    }
                }
            }
            grads.push(LayerGrad {
                weights: dw,
                bias: db,
            });
            if l > 0 {
                let below = &self.layers[l - 1];
                below
                    .activation
                    .backprop(&trace.pre[l - 1], &trace.outputs[l - 1], &mut dx);
            }
            delta = dx;
        }
        grads.reverse();
        Ok(Gradients {
            layers: grads,
            input: delta,
        })
    }

    /// Clamps every weight and bias into `[-c, c]`.
    pub fn clip_weights(&mut self, c: f64) {
        for layer in &mut self.layers {
            layer.for_each_param_mut(|w| *w = w.clamp(-c, c));
        }
    }

    pub fn max_abs_param(&self) -> f64 {
        self.layers.iter().fold(0.0, |m, l| {
            l.bias
                .iter()
                .fold(m.max(l.weights.max_abs()), |m, b| m.max(b.abs()))
        })
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.is_finite() && l.bias.iter().all(|b| b.is_finite()))
    }
}
