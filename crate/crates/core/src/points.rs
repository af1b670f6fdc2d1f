//! Point configurations in `[0,1)^d`.
//!
//! The text format is one point per line with whitespace-separated decimal
//! coordinates. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Largest `k` accepted by the van der Corput generators.
pub const MAX_VDC_K: u32 = 20;

/// Cap on `N·d` for generated random sets.
pub const MAX_RANDOM_COORDS: usize = 1 << 26;

/// `N ≥ 1` points in `[0,1)^d`, stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Points from a flat coordinate buffer, `dim` coordinates each.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidInput("a point set needs at least one point".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        if let Some(&v) = coords.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(Error::Domain(format!("coordinate {v} outside [0, 1)")));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        Self::new(dim, points.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    /// Parse the text format. The dimension is taken from the first point.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = 0;
        let mut coords = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut found = 0;
            for token in body.split_whitespace() {
                let value: f64 = token.parse().map_err(|_| Error::Parse {
                    line,
                    token: token.to_string(),
                })?;
                if !(0.0..1.0).contains(&value) {
                    return Err(Error::OutOfRange { line, value });
                }
                coords.push(value);
                found += 1;
            }
            if dim == 0 {
                dim = found;
            } else if found != dim {
                return Err(Error::InconsistentDimension {
                    line,
                    expected: dim,
                    found,
                });
            }
        }
        if dim == 0 {
            return Err(Error::InvalidInput("no points found".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Text form; coordinates use the shortest representation that reads
    /// back to the same double.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.coords.len() * 20);
        for p in self.iter() {
            for (j, v) in p.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                write!(out, "{v:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// The `k`-bit base-2 radical inverse of `i`.
pub fn radical_inverse(i: u64, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let reversed = i.reverse_bits() >> (64 - k);
    reversed as f64 / (1u64 << k) as f64
}

fn check_k(k: u32) -> Result<()> {
    if k > MAX_VDC_K {
        return Err(Error::budget(
            format!("van der Corput set with k = {k} has 2^{k} points"),
            format!("use k <= {MAX_VDC_K}"),
        ));
    }
    Ok(())
}

/// `{(i/N, φ₂(i)) : 0 ≤ i < N}` with `N = 2^k`.
pub fn van_der_corput(k: u32) -> Result<PointSet> {
    shifted_van_der_corput(k, 0)
}

/// Van der Corput set whose second coordinate is `φ₂(i XOR shift)`.
pub fn shifted_van_der_corput(k: u32, shift: u64) -> Result<PointSet> {
    check_k(k)?;
    let n = 1u64 << k;
    if shift >= n {
        return Err(Error::InvalidInput(format!("shift {shift} is not a {k}-bit mask")));
    }
    let mut coords = Vec::with_capacity(2 * n as usize);
    for i in 0..n {
        coords.push(i as f64 / n as f64);
        coords.push(radical_inverse(i ^ shift, k));
    }
    Ok(PointSet { dim: 2, coords })
}

/// `n` i.i.d. uniform points in `[0,1)^d`, deterministic in `seed`.
pub fn random_uniform(n: usize, d: usize, seed: u64) -> Result<PointSet> {
    let total = n.checked_mul(d).filter(|&t| t <= MAX_RANDOM_COORDS);
    let Some(total) = total else {
        return Err(Error::budget(
            format!("random set with N = {n}, d = {d}"),
            format!("keep N·d <= {MAX_RANDOM_COORDS}"),
        ));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..total).map(|_| rng.random::<f64>()).collect();
    PointSet::new(d, coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vdc_small() {
        assert_eq!(van_der_corput(0).unwrap().coords(), &[0.0, 0.0]);
        assert_eq!(van_der_corput(1).unwrap().coords(), &[0.0, 0.0, 0.5, 0.5]);
        assert_eq!(
            van_der_corput(2).unwrap().coords(),
            &[0.0, 0.0, 0.25, 0.5, 0.5, 0.25, 0.75, 0.75]
        );
        assert!(van_der_corput(MAX_VDC_K + 1).is_err());
    }

    #[test]
    fn shifted() {
        assert_eq!(shifted_van_der_corput(3, 0).unwrap(), van_der_corput(3).unwrap());
        assert_eq!(shifted_van_der_corput(1, 1).unwrap().coords(), &[0.0, 0.5, 0.5, 0.0]);
        assert!(shifted_van_der_corput(2, 4).is_err());
        let a = shifted_van_der_corput(2, 3).unwrap();
        assert_ne!(a, van_der_corput(2).unwrap());
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_uniform(10, 3, 7).unwrap();
        assert_eq!(a, random_uniform(10, 3, 7).unwrap());
        assert_ne!(a, random_uniform(10, 3, 8).unwrap());
        let one = random_uniform(1, 3, 0).unwrap();
        assert_eq!((one.len(), one.dim()), (1, 3));
        assert!(random_uniform(0, 2, 0).is_err());
    }

    #[test]
    fn parse_examples() {
        let p = PointSet::parse("0 0\n0.5 0.25\n").unwrap();
        assert_eq!((p.len(), p.dim()), (2, 2));
        assert!(matches!(
            PointSet::parse("0.5\n0.25 0.75\n"),
            Err(Error::InconsistentDimension { line: 2, expected: 1, found: 2 })
        ));
        assert!(matches!(
            PointSet::parse("1.0 0.0\n"),
            Err(Error::OutOfRange { line: 1, value }) if value == 1.0
        ));
        assert!(matches!(
            PointSet::parse("# c\n0.1 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(PointSet::parse("\n# nothing\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = random_uniform(50, 3, 1).unwrap();
        assert_eq!(PointSet::parse(&p.to_text()).unwrap(), p);
    }
}
