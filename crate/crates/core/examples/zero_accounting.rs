//! Sampling-zero recovery and structural-zero proxies as more agents are
//! generated, for the uniform sampler on the oracle benchmark.

use synthpop::eval::ratio_curve;
use synthpop::models::{Synthesizer, UniformModel};
use synthpop::oracle::default_benchmark;

fn main() -> synthpop::Result<()> {
    let spec = default_benchmark();
    let train = spec.generate_population(20_000, 1)?;
    let test = spec.generate_population(20_000, 2)?;
    let generated = UniformModel::new(train.schema().clone()).sample(50_000, 3)?;
    let report = ratio_curve(&train, &test, &generated, &spec.schema().names(), 5_000)?;
    println!(
        "{} sampling zeros (combos in test but not train)",
        report.n_sampling_zeros
    );
    println!(
        "{:>9} {:>10} {:>11} {:>8}",
        "generated", "recovered", "structural", "ratio"
    );
    for p in &report.curve {
        println!(
            "{:>9} {:>10} {:>11} {:>8}",
            p.generated,
            p.n_recovered,
            p.n_structural_proxy,
            p.ratio.map_or("-".into(), |r| format!("{r:.2}"))
        );
    }
    let true_zeros = generated
        .rows()
        .filter(|r| spec.is_zero_cell(r).unwrap_or(false))
        .count();
    println!("agents in true structural zeros: {true_zeros}");
    Ok(())
}
