//! Nine prior choices around the anticipated values: the first process's
//! percentile and the common shape each scaled by 0.5, 1 and 1.5.

use weibull_ratio::simulator::{prior_sensitivity_grid, GridBase};

fn main() -> weibull_ratio::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cells = prior_sensitivity_grid(&GridBase::bundled(), &[0.5, 1.0, 1.5], &[0.5, 1.0, 1.5], seed)?;
    println!("x_R factor  beta factor  run length        LCL      UCL");
    for c in cells {
        println!(
            "{:>10} {:>12} {:>11} {:>10.4} {:>8.4}",
            c.percentile_factor,
            c.beta_factor,
            c.run_length.to_string(),
            c.limits.lcl,
            c.limits.ucl
        );
    }
    Ok(())
}
