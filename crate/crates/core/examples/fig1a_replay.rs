//! Trains on the ten bundled sample pairs and monitors the fifteen shifted ones.

use weibull_ratio::experiments::fig1a;

fn main() -> weibull_ratio::Result<()> {
    let t = std::time::Instant::now();
    let replay = fig1a()?;
    for p in replay.trace() {
        println!(
            "{:>3} {} u = {:.5}  [{:.5}, {:.5}]{}",
            p.index,
            p.phase.as_str(),
            p.u_hat,
            p.lcl,
            p.ucl,
            if p.signal { "  <- signal" } else { "" }
        );
    }
    println!("UCL - LCL = {:.4}", replay.width());
    println!("run length: {:?}", replay.run_length);
    eprintln!("elapsed {:?}", t.elapsed());
    Ok(())
}
