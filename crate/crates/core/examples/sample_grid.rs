//! Writes the plume-like sample grid shipped in `data/`.
//!
//! `cargo run -p pareto-mcts --example sample_grid -- data/plume_120.csv`

use std::fs::File;
use std::io::BufWriter;

use pareto_mcts::environment::{Extent, FieldGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIZE: usize = 120;
const SEED: u64 = 2018;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/plume_120.csv".into());
    let extent = Extent::new(0.0, 0.0, 10.0, 10.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    // Elongated blobs drifting away from an inflow along the western edge.
    let blobs: Vec<[f64; 6]> = (0..7)
        .map(|_| {
            let cx = rng.random_range(0.5..7.0);
            let cy = rng.random_range(1.0..9.0);
            let amp = rng.random_range(0.4..1.2);
            let sx = rng.random_range(0.6..2.2);
            let sy = rng.random_range(0.4..1.2);
            let angle = rng.random_range(-0.6..0.6);
            [cx, cy, amp, sx, sy, angle]
        })
        .collect();
    let ripples: Vec<[f64; 4]> = (0..4)
        .map(|_| {
            let k = rng.random_range(0.8..2.0);
            let dir = rng.random_range(0.0..std::f64::consts::TAU);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            [k * dir.cos(), k * dir.sin(), phase, rng.random_range(0.02..0.06)]
        })
        .collect();

    let template = FieldGrid::new(SIZE, SIZE, extent, vec![0.0; SIZE * SIZE])?;
    let cells = template
        .cell_centers()
        .iter()
        .map(|&[x, y]| {
            let inflow = 1.5 * (-x / 2.5).exp() * (1.0 + 0.3 * (y / 1.7).sin());
            let plume: f64 = blobs
                .iter()
                .map(|&[cx, cy, amp, sx, sy, a]| {
                    let (dx, dy) = (x - cx, y - cy);
                    let u = dx * a.cos() + dy * a.sin();
                    let v = -dx * a.sin() + dy * a.cos();
                    amp * (-(u * u) / (2.0 * sx * sx) - (v * v) / (2.0 * sy * sy)).exp()
                })
                .sum();
            let ripple: f64 = ripples
                .iter()
                .map(|&[kx, ky, ph, amp]| amp * (kx * x + ky * y + ph).sin())
                .sum();
            // Scaled to a CDOM-like range in ppb.
            2.0 + 3.0 * (inflow + plume + ripple)
        })
        .collect();
    let grid = template.with_cells(cells)?;
    grid.write_to(BufWriter::new(File::create(&path)?))?;
    let (lo, hi) = grid.range();
    println!("wrote {path}: {SIZE}x{SIZE}, values {lo:.3}..{hi:.3}");
    Ok(())
}
