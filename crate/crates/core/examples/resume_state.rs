//! Saving a trained chart, reloading it, and continuing to monitor gives the
//! same points as an uninterrupted run.

use weibull_ratio::experiments::BundledData;
use weibull_ratio::{phase1_train, phase2_step, state, ChartConfig};

fn main() -> weibull_ratio::Result<()> {
    let d = BundledData::load();
    let (mut live, _) = phase1_train(&d.x_phase1, &d.y_phase1, ChartConfig::new(4, 10), d.prior)?;
    let saved = state::serialize(&live);
    println!("state document: {} bytes", saved.len());
    let mut resumed = state::deserialize(&saved)?;
    for (x, y) in d.x_phase2.iter().zip(&d.y_phase2) {
        let a = phase2_step(&mut live, x, y)?;
        let b = phase2_step(&mut resumed, x, y)?;
        assert_eq!(a, b);
        println!("k = {:>2}  u = {:.6}{}", a.index, a.u_hat, if a.signal { "  signal" } else { "" });
    }
    Ok(())
}
