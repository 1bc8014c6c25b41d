//! Run lengths without any shift. Phase II plots cumulative estimates, which
//! settle near the true ratio, so most in-control runs never signal; the
//! censored count is the interesting number here.

use weibull_ratio::simulator::{estimate_arl, ArlScenario};

fn main() -> weibull_ratio::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_runs = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let cap = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let scenario = ArlScenario {
        rl_cap: cap,
        ..ArlScenario::in_control(n_runs, 20_150_617)
    };
    let e = estimate_arl(&scenario, 1)?;
    println!("runs {}, censored at {cap}: {}", e.runs_used, e.censored);
    println!("mean of signalled run lengths: {:.1}", e.arl);
    println!("ARL lower bound (censored counted at cap): {:.1}", e.arl_lower_bound);
    Ok(())
}
