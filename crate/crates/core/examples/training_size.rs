//! Longer training narrows the limits: Phase I extended to m = 20 and m = 30
//! by resampling the ten in-control sample pairs.

use weibull_ratio::chart::Window;
use weibull_ratio::experiments::{extended_training, fig1a};

fn main() -> weibull_ratio::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    println!("m = 10: width {:.4}, run length {}", fig1a()?.width(), fig1a()?.run_length);
    for m in [20, 30] {
        let r = extended_training(m, Window::All, seed)?;
        println!("m = {m}: width {:.4}, run length {}", r.width(), r.run_length);
    }
    Ok(())
}
