//! Serde adapters writing complex numbers as `{"re": .., "im": ..}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct ReIm {
    re: f64,
    im: f64,
}

impl From<Complex64> for ReIm {
    fn from(z: Complex64) -> Self {
        ReIm { re: z.re, im: z.im }
    }
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    ReIm::from(*z).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let ReIm { re, im } = ReIm::deserialize(d)?;
    Ok(Complex64::new(re, im))
}

pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
        [ReIm::from(z[0]), ReIm::from(z[1])].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
        let [a, b] = <[ReIm; 2]>::deserialize(d)?;
        Ok([Complex64::new(a.re, a.im), Complex64::new(b.re, b.im)])
    }
}
