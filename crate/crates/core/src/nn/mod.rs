//! Dense feed-forward networks with hand-written backpropagation.
//!
//! Only the fixed multilayer-perceptron structure the synthesizers need is
//! supported: every layer is `activation(W x + b)` with `W` stored row-major as
//! `(out, in)`. Batches are row-per-sample [`Matrix`] values. Loss functions
//! average over the batch, so the output gradients they return already carry
//! the `1 / batch` factor and [`Mlp::backward`] simply sums over rows.

mod adam;
mod io;
mod layer;
mod loss;
mod matrix;
mod mlp;

pub use adam::AdamState;
pub use io::{read_mlp, read_mlp_from, write_mlp, write_mlp_to, FORMAT_VERSION, MAGIC};
pub use layer::{softmax_blocks_in_place, Activation, DenseLayer};
pub use loss::{cross_entropy_blocks, PROB_FLOOR};
pub use matrix::Matrix;
pub use mlp::{Gradients, LayerGrad, Mlp, Trace};
