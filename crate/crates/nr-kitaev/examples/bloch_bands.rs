//! Analytic Bloch bands of the dynamical matrix along the Brillouin zone.
//!
//! Below the transition of the fully non-reciprocal line (Γ_p = 2Δ) the two
//! bands trace a circle of radius 2 sqrt(w^2 - Δ^2) around -2i(w + Δ); above
//! it the radicand changes sign structure and a real-axis gap opens. This
//! example prints both bands on a coarse grid and verifies the circle law.

use nr_kitaev::model::{Boundary, ModelParams};
use nr_kitaev::{bloch_bands_continuous, kstar};

fn main() -> nr_kitaev::Result<()> {
    let n_k = 24;
    let ks: Vec<f64> = (0..=n_k)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n_k as f64)
        .collect();

    for delta in [0.4, 2.0] {
        let params = ModelParams::nonreciprocal_pairing(delta, 64, Boundary::Periodic);
        let (plus, minus) = bloch_bands_continuous(&params, &ks)?;
        println!("# delta = {delta}  (non-reciprocal line, Gamma_p = 2 delta)");
        println!("{:>8} {:>22} {:>22}", "k", "h_k^+", "h_k^-");
        for ((&k, p), m) in ks.iter().zip(&plus).zip(&minus) {
            println!("{k:8.4} {:>10.4}{:+.4}i {:>10.4}{:+.4}i", p.re, p.im, m.re, m.im);
        }

        // Circle law check below the transition (delta < w).
        if delta < params.w {
            let center = nr_kitaev::C64::new(0.0, -2.0 * (params.w + delta));
            let radius = 2.0 * (params.w * params.w - delta * delta).sqrt();
            let worst = plus
                .iter()
                .chain(&minus)
                .map(|e| ((e - center).norm() - radius).abs())
                .fold(0.0, f64::max);
            println!("circle law |E - center| = r: worst deviation {worst:.2e}");
        }
        println!("slowest-decaying momentum k* = {:.4}\n", kstar(&params)?);
    }
    Ok(())
}
