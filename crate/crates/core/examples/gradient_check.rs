//! Backpropagation against central finite differences on random networks.
//!
//! `cargo run --release --example gradient_check -- [networks]`

use rand::Rng;
use synthpop::nn::{Activation, Matrix, Mlp};
use synthpop::rng::seeded;

fn main() -> synthpop::Result<()> {
    let networks: usize = std::env::args()
        .nth(1)
        .map_or(20, |s| s.parse().expect("count"));
    let mut rng = seeded(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..networks {
        let input = rng.random_range(2..6);
        let hidden = [rng.random_range(2..7)];
        let output = rng.random_range(2..5);
        let out_act = match rng.random_range(0..3) {
            0 => Activation::Linear,
            1 => Activation::Sigmoid,
            _ => Activation::SoftmaxBlocks(vec![1, output - 1]),
        };
        let mut net = Mlp::build(input, &hidden, output, Activation::Tanh, out_act, &mut rng)?;
        let batch = Matrix::from_vec(
            3,
            input,
            (0..3 * input)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
        )?;
        let weights = Matrix::from_vec(
            3,
            output,
            (0..3 * output)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
        )?;
        // loss = sum(output * weights), so d loss / d output = weights
        let loss = |net: &Mlp| -> synthpop::Result<f64> {
            let out = net.predict(&batch)?;
            Ok(out
                .as_slice()
                .iter()
                .zip(weights.as_slice())
                .map(|(a, b)| a * b)
                .sum())
        };
        let trace = net.forward(&batch)?;
        let grads = net.backward(&trace, &weights)?;
        let h = 1e-6;
        for l in 0..net.layers().len() {
            for i in 0..net.layers()[l].weights.as_slice().len() {
                let original = net.layers()[l].weights.as_slice()[i];
                net.layers_mut()[l].weights.as_mut_slice()[i] = original + h;
                let up = loss(&net)?;
                net.layers_mut()[l].weights.as_mut_slice()[i] = original - h;
                let down = loss(&net)?;
                net.layers_mut()[l].weights.as_mut_slice()[i] = original;
                let numeric = (up - down) / (2.0 * h);
                let analytic = grads.layers[l].weights.as_slice()[i];
                let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-7);
                worst = worst.max(rel);
            }
        }
    }
    println!("{networks} networks, worst relative error {worst:.3e}");
    Ok(())
}
