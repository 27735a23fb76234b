//! Seeded random sampling shared by the randomized identity tests and the
//! Newton multistart. ChaCha8 keeps streams identical across platforms.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::LatticeConfig;
use crate::potential::Potential;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the square `[-half, half]²` of the complex plane.
pub fn complex_in_box<R: Rng>(rng: &mut R, half: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-half..=half), rng.gen_range(-half..=half))
}

/// Uniform on the closed disc of the given radius.
pub fn complex_in_disc<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

pub fn random_complex_potential<R: Rng>(rng: &mut R, cfg: &LatticeConfig, half: f64) -> Potential {
    let values = (0..cfg.cell_size())
        .map(|_| complex_in_box(rng, half))
        .collect();
    Potential::new(cfg.clone(), values).expect("length matches cell size")
}

pub fn random_real_potential<R: Rng>(rng: &mut R, cfg: &LatticeConfig, half: f64) -> Potential {
    let values: Vec<f64> = (0..cfg.cell_size())
        .map(|_| rng.gen_range(-half..=half))
        .collect();
    Potential::from_real(cfg.clone(), &values).expect("length matches cell size")
}
