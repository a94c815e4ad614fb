//! The built-in ground truth: structural zeros, ancestral sampling, and
//! convergence of the empirical joint to the exact one.

use synthpop::eval::{empirical_joint, srmse};
use synthpop::oracle::{default_benchmark, BENCHMARK_VERSION};

fn main() -> synthpop::Result<()> {
    let spec = default_benchmark();
    println!("benchmark v{BENCHMARK_VERSION} hash {}", spec.hash());
    println!(
        "{} cells, {:.1}% structurally zero",
        spec.n_cells(),
        100.0 * spec.structural_zero_fraction()?
    );
    let names = spec.schema().names();
    let exact = spec.exact_joint(&names)?;
    for n in [2_000, 20_000, 200_000] {
        let population = spec.generate_population(n, 42)?;
        let hits = population
            .rows()
            .filter(|r| spec.is_zero_cell(r).unwrap_or(true))
            .count();
        let error = srmse(&empirical_joint(&population, &names)?, &exact)?;
        println!("n = {n:>7}: SRMSE to exact joint {error:.4}, rows in zero cells {hits}");
    }
    Ok(())
}
