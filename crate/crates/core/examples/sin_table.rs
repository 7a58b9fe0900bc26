//! Prints the uniform-grid error tables for sin(πx).
//!
//! `cargo run --release -p adaptive-mls --example sin_table [uniform|random SEED]`

use adaptive_mls::experiments::{run_convergence_pair, GridKind, OperatorParams};
use adaptive_mls::format::{rate, sci5};
use adaptive_mls::{KernelKind, WeightKernel};

fn main() -> adaptive_mls::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (grid, levels): (GridKind, Vec<u32>) = match args.first().map(String::as_str) {
        Some("random") => {
            let seed = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
            (GridKind::Random { seed }, (7..=12).collect())
        }
        _ => (GridKind::Uniform, (7..=10).collect()),
    };
    for kind in [KernelKind::Wendland2, KernelKind::Wendland4, KernelKind::Gaussian] {
        for degree in [2, 3] {
            let params = OperatorParams::new(WeightKernel::new(kind)?, degree);
            let (lin, nl) = run_convergence_pair(&params, &levels, grid)?;
            println!("{:<14} {:<14}", lin.label(), nl.label());
            for (a, b) in lin.rows.iter().zip(&nl.rows) {
                println!(
                    "{:>2}  {} {:>7}   {} {:>7}",
                    a.level,
                    sci5(a.mae),
                    a.rate.map(rate).unwrap_or_default(),
                    sci5(b.mae),
                    b.rate.map(rate).unwrap_or_default()
                );
            }
        }
    }
    Ok(())
}
