use rand::Rng;
use rand_distr::{Distribution, Uniform};

use super::Matrix;
use crate::error::{Error, Result};

/// Element-wise (or block-wise) output non-linearity of a dense layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Relu,
    Tanh,
    Sigmoid,
    /// Independent softmax over each contiguous block; the sizes sum to the
    /// layer width.
    SoftmaxBlocks(Vec<usize>),
}

impl Activation {
    pub(crate) fn tag(&self) -> u8 {
        match self {
            Activation::Linear => 0,
            Activation::Relu => 1,
            Activation::Tanh => 2,
            Activation::Sigmoid => 3,
            Activation::SoftmaxBlocks(_) => 4,
        }
    }

    pub(crate) fn from_tag(tag: u8, blocks: Vec<usize>) -> Result<Self> {
        Ok(match tag {
            0 => Activation::Linear,
            1 => Activation::Relu,
            2 => Activation::Tanh,
            3 => Activation::Sigmoid,
            4 => Activation::SoftmaxBlocks(blocks),
            other => return Err(Error::Format(format!("unknown activation tag {other}"))),
        })
    }

    pub fn blocks(&self) -> &[usize] {
        match self {
            Activation::SoftmaxBlocks(b) => b,
            _ => &[],
        }
    }

    /// Applies the activation to a batch of pre-activations in place.
    pub fn apply(&self, m: &mut Matrix) {
        match self {
            Activation::Linear => {}
            Activation::Relu => m.as_mut_slice().iter_mut().for_each(|v| *v = v.max(0.0)),
            Activation::Tanh => m.as_mut_slice().iter_mut().for_each(|v| *v = v.tanh()),
            Activation::Sigmoid => m.as_mut_slice().iter_mut().for_each(|v| *v = sigmoid(*v)),
            Activation::SoftmaxBlocks(blocks) => {
                for r in 0..m.rows() {
                    softmax_blocks_in_place(m.row_mut(r), blocks);
                }
            }
        }
    }

    /// Turns `grad` (w.r.t. the activation output) into the gradient w.r.t.
    /// the pre-activation, given the layer's pre-activation and output.
    pub(crate) fn backprop(&self, pre: &Matrix, out: &Matrix, grad: &mut Matrix) {
        match self {
            Activation::Linear => {}
            Activation::Relu => {
                for (g, &z) in grad.as_mut_slice().iter_mut().zip(pre.as_slice()) {
                    if z <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            Activation::Tanh => {
                for (g, &y) in grad.as_mut_slice().iter_mut().zip(out.as_slice()) {
                    *g *= 1.0 - y * y;
                }
            }
            Activation::Sigmoid => {
                for (g, &y) in grad.as_mut_slice().iter_mut().zip(out.as_slice()) {
                    *g *= y * (1.0 - y);
                }
            }
            Activation::SoftmaxBlocks(blocks) => {
                for r in 0..grad.rows() {
                    let y = out.row(r);
                    let g = grad.row_mut(r);
                    let mut start = 0;
                    for &size in blocks {
                        let ys = &y[start..start + size];
                        let gs = &mut g[start..start + size];
                        let dot: f64 = ys.iter().zip(gs.iter()).map(|(a, b)| a * b).sum();
                        for (gi, &yi) in gs.iter_mut().zip(ys) {
                            *gi = yi * (*gi - dot);
                        }
                        start += size;
                    }
                }
            }
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Softmax over each block of `row`, with per-block max subtraction.
pub fn softmax_blocks_in_place(row: &mut [f64], blocks: &[usize]) {
    let mut start = 0;
    for &size in blocks {
        let seg = &mut row[start..start + size];
        let max = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in seg.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in seg.iter_mut() {
            *v /= sum;
        }
        start += size;
    }
}

/// One dense layer `activation(W x + b)` with `W` of shape `(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::Shape(format!(
                "bias has {} entries for {} outputs",
                bias.len(),
                weights.rows()
            )));
        }
        if let Activation::SoftmaxBlocks(blocks) = &activation {
            if blocks.contains(&0) || blocks.iter().sum::<usize>() != weights.rows() {
                return Err(Error::Shape(format!(
                    "softmax blocks {blocks:?} do not partition {} outputs",
                    weights.rows()
                )));
            }
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot<R: Rng + ?Sized>(
        input: usize,
        output: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        if input == 0 || output == 0 {
            return Err(Error::Shape("layer dimensions must be positive".into()));
        }
        let limit = (6.0 / (input + output) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit)
            .map_err(|e| Error::Config(format!("bad init range: {e}")))?;
        let data = (0..input * output).map(|_| dist.sample(rng)).collect();
        Self::new(
            Matrix::from_vec(output, input, data)?,
            vec![0.0; output],
            activation,
        )
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        self.weights.rows()
    }

    /// Pre-activation `x W^T + b` for a batch.
    pub(crate) fn affine(&self, x: &Matrix) -> Matrix {
        let (out_dim, in_dim) = self.weights.shape();
        let mut z = Matrix::zeros(x.rows(), out_dim);
        for r in 0..x.rows() {
            let xr = x.row(r);
            let zr = z.row_mut(r);
            for (o, slot) in zr.iter_mut().enumerate() {
                let w = &self.weights.as_slice()[o * in_dim..(o + 1) * in_dim];
                let mut acc = self.bias[o];
                for (a, b) in w.iter().zip(xr) {
                    acc += a * b;
                }
                *slot = acc;
            }
        }
        z
    }

    pub(crate) fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        self.weights.as_mut_slice().iter_mut().for_each(&mut f);
        self.bias.iter_mut().for_each(f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_blocks_sum_to_one() {
        let mut row = vec![1000.0, -1000.0, 0.5, 3.0, 3.0, 3.0];
        softmax_blocks_in_place(&mut row, &[2, 1, 3]);
        assert!((row[0] + row[1] - 1.0).abs() < 1e-12);
        assert_eq!(row[2], 1.0);
        for v in &row[3..] {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_of_ln3_and_zero() {
        let mut row = vec![3f64.ln(), 0.0];
        softmax_blocks_in_place(&mut row, &[2]);
        assert!((row[0] - 0.75).abs() < 1e-12);
        assert!((row[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bad_block_partition_rejected() {
        let w = Matrix::zeros(3, 2);
        assert!(
            DenseLayer::new(w.clone(), vec![0.0; 3], Activation::SoftmaxBlocks(vec![2])).is_err()
        );
        assert!(DenseLayer::new(
            w.clone(),
            vec![0.0; 3],
            Activation::SoftmaxBlocks(vec![3, 0])
        )
        .is_err());
        assert!(DenseLayer::new(w, vec![0.0; 2], Activation::Linear).is_err());
    }

    #[test]
    fn glorot_bounds() {
        let mut rng = crate::rng::seeded(1);
        let layer = DenseLayer::glorot(10, 14, Activation::Relu, &mut rng).unwrap();
        let limit = (6.0f64 / 24.0).sqrt();
        assert!(layer.weights.max_abs() <= limit);
        assert!(layer.bias.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(0.0), 0.5);
    }
}
