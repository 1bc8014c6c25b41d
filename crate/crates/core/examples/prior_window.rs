//! Carrying only the last ten training samples into Phase II makes the chart
//! react faster to the shift than the full posterior does.

use weibull_ratio::chart::Window;
use weibull_ratio::experiments::extended_training;

fn main() -> weibull_ratio::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    println!("{:>4} {:>12} {:>12}", "m", "window all", "last(10)");
    for m in [20, 30] {
        let full = extended_training(m, Window::All, seed)?;
        let windowed = extended_training(m, Window::Last(10), seed)?;
        println!("{m:>4} {:>12} {:>12}", full.run_length.to_string(), windowed.run_length.to_string());
    }
    Ok(())
}
