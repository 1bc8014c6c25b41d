//! Writes the replayed chart and its ratio densities as an SVG file.

use weibull_ratio::experiments::fig1a;
use weibull_ratio::io::plot::{render_svg, PlotOptions};

fn main() -> weibull_ratio::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "chart.svg".into());
    let svg = render_svg(&fig1a()?.trace(), PlotOptions { density_overlay: Some(4) })?;
    std::fs::write(&path, svg).map_err(|e| weibull_ratio::Error::Io { path: path.clone().into(), source: e })?;
    println!("wrote {path}");
    Ok(())
}
