//! The building blocks of one chart step for a single pair of samples:
//! shape posterior means, the pooled shape, percentile estimates and limits.

use weibull_ratio::distributions::ReliabilityLevel;
use weibull_ratio::posterior::{
    beta_interval_update, beta_posterior_mean, control_limits, ln_accumulator, percentile_posterior_mean,
    IntervalFactors, ProcessHistory,
};

fn main() -> weibull_ratio::Result<()> {
    let r = ReliabilityLevel::new(0.95)?;
    let x = ProcessHistory::from_samples(4, &[vec![3.7, 3.3, 4.9, 4.3]])?;
    let y = ProcessHistory::from_samples(4, &[vec![6.6, 4.5, 5.8, 6.5]])?;
    let (px, py, prior_beta) = (2.9, 3.8, 5.0);

    let interval = beta_interval_update(prior_beta, IntervalFactors::default())?;
    let bx = beta_posterior_mean(&x, px, r, interval)?;
    let by = beta_posterior_mean(&y, py, r, interval)?;
    let beta_bar = 0.5 * (bx + by);
    println!("shape interval [{}, {}]: beta_x = {bx:.4}, beta_y = {by:.4}", interval.lo(), interval.hi());

    let xr = percentile_posterior_mean(&x, px, r, beta_bar)?;
    let yr = percentile_posterior_mean(&y, py, r, beta_bar)?;
    let c = (ln_accumulator(&y, py, r, beta_bar) - ln_accumulator(&x, px, r, beta_bar)).exp();
    let limits = control_limits(c, beta_bar, 4, 0.0027)?;
    println!("x_R = {xr:.4}, y_R = {yr:.4}, u = {:.4}", xr / yr);
    println!("limits [{:.4}, {:.4}]", limits.lcl, limits.ucl);
    Ok(())
}
