//! Multi-antenna OFDM channel with two paths, and one received pilot.

use gasloc::geometry::AnglePair;
use gasloc::radio::{received_symbol, synth_channel, AntennaArray, PathSpec, RadioConfig};
use gasloc::rng::stream_rng;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn main() -> gasloc::Result<()> {
    let cfg = RadioConfig { subcarriers: 8, symbols: 4, ..Default::default() };
    let half = cfg.wavelength() / 2.0;
    let tx = AntennaArray::ula_x(4, half)?;
    let rx = AntennaArray::ura_xz(2, 2, half)?;

    let los = PathSpec {
        gain: 1.0,
        delay_s: 1.0e-6,
        frequency_shift: 2.0e-7,
        departure: AnglePair::new(0.3, -0.1),
        arrival: AnglePair::new(-0.3, 0.1),
        scatterers: vec![],
    };
    let reflected = PathSpec { gain: -0.3, delay_s: 1.4e-6, departure: AnglePair::new(0.9, 0.0), ..los.clone() };
    let h = synth_channel(&cfg, &tx, &rx, &[los, reflected])?;
    let (k, l, nr, nt) = h.dims();
    println!("tensor {k} subcarriers x {l} symbols x {nr}x{nt}");
    println!("|H[0][0]| per element:");
    let h00 = h.at(0, 0);
    for r in 0..nr {
        let row: Vec<String> = (0..nt).map(|c| format!("{:.3}", h00[(r, c)].norm())).collect();
        println!("  {}", row.join(" "));
    }

    // Uniform unit-power precoder, identity combiner.
    let f = DVector::from_element(nt, Complex64::new(1.0 / (nt as f64).sqrt(), 0.0));
    let w = DMatrix::<Complex64>::identity(nr, nr);
    let mut rng = stream_rng(1, 0);
    let y = received_symbol(&w, h00, &f, Complex64::new(1.0, 0.0), 0.05, &mut rng)?;
    for (i, v) in y.iter().enumerate() {
        println!("y[{i}] = {:.3} {:+.3}i", v.re, v.im);
    }
    Ok(())
}
