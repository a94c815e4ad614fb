//! The two reference samplers: independent marginals and uniform over the
//! universe of combinations.

use synthpop::eval::{empirical_joint, srmse};
use synthpop::models::{MarginalModel, Synthesizer, UniformModel};
use synthpop::oracle::default_benchmark;

fn main() -> synthpop::Result<()> {
    let spec = default_benchmark();
    let train = spec.generate_population(20_000, 1)?;
    let names = spec.schema().names();
    let exact = spec.exact_joint(&names)?;
    let marginal = MarginalModel::fit(&train)?;
    let uniform = UniformModel::new(train.schema().clone());
    for (name, model) in [
        ("marginal", &marginal as &dyn Synthesizer),
        ("uniform", &uniform),
    ] {
        let sample = model.sample(200_000, 9)?;
        let mut in_zero = 0usize;
        for row in sample.rows() {
            in_zero += spec.is_zero_cell(row)? as usize;
        }
        println!(
            "{name:>8}: SRMSE to exact joint {:.4}, {:.1}% of agents in structural zeros",
            srmse(&empirical_joint(&sample, &names)?, &exact)?,
            100.0 * in_zero as f64 / sample.n_rows() as f64
        );
    }
    println!("x0 marginal learned: {:?}", marginal.frequencies()[0]);
    Ok(())
}
