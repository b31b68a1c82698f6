//! Flat binary instance format: the magic `CKIT1`, then little-endian `f64`
//! values with matrices in row-major order.
//!
//! Quadratic: `[1, d, L, μ, σ, R, f*]`, `A`, `b`, `x*`, eigenvalues, `Q`.
//! Saddle: `[2, dx, dy, L, μ_p, μ_d, σ, R_x, R_y, f*]`, `B`, `c`, `d`, `x*`, `y*`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{QuadraticInstance, SaddleInstance};
use crate::catalyst_min::MinReference;
use crate::catalyst_minimax::MinimaxReference;
use crate::error::{Error, Result};
use crate::objective::{SaddleObjective, SmoothObjective};
use crate::Scalar;

pub const MAGIC: &[u8; 5] = b"CKIT1";

const QUADRATIC_TAG: f64 = 1.0;
const SADDLE_TAG: f64 = 2.0;

/// Either testbed instance kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance<S> {
    Quadratic(QuadraticInstance<S>),
    Saddle(SaddleInstance<S>),
}

struct Encoder<W> {
    w: W,
}

impl<W: Write> Encoder<W> {
    fn put<S: Scalar>(&mut self, v: S) -> Result<()> {
        self.w.write_all(&v.as_f64().to_le_bytes())?;
        Ok(())
    }

    fn put_all<S: Scalar>(&mut self, vs: &[S]) -> Result<()> {
        vs.iter().try_for_each(|&v| self.put(v))
    }
}

struct Decoder<R> {
    r: R,
}

impl<R: Read> Decoder<R> {
    fn get<S: Scalar>(&mut self) -> Result<S> {
        let mut buf = [0u8; 8];
        self.r.read_exact(&mut buf)?;
        Ok(S::of(f64::from_le_bytes(buf)))
    }

    fn get_vec<S: Scalar>(&mut self, n: usize) -> Result<Vec<S>> {
        (0..n).map(|_| self.get()).collect()
    }

    fn get_dim(&mut self, what: &'static str) -> Result<usize> {
        let v: f64 = self.get()?;
        if v >= 1.0 && v.fract() == 0.0 && v < 1e7 {
            Ok(v as usize)
        } else {
            Err(Error::Io(format!("invalid {what} {v} in CKIT1 header")))
        }
    }
}

/// Serializes `inst` to `w`.
pub fn write_instance<S: Scalar, W: Write>(inst: &Instance<S>, w: W) -> Result<()> {
    let mut e = Encoder { w };
    e.w.write_all(MAGIC)?;
    match inst {
        Instance::Quadratic(q) => {
            e.put(QUADRATIC_TAG)?;
            e.put_all(&[
                S::of_usize(q.dim()),
                q.smoothness(),
                q.strong_convexity(),
                q.noise(),
                q.radius(),
                q.optimal_value(),
            ])?;
            e.put_all(q.matrix())?;
            e.put_all(q.linear_term())?;
            e.put_all(q.minimizer())?;
            e.put_all(q.eigenvalues())?;
            e.put_all(q.eigenvectors())?;
        }
        Instance::Saddle(s) => {
            let (dx, dy) = s.dims();
            let (rx, ry) = s.radii();
            e.put(SADDLE_TAG)?;
            e.put_all(&[
                S::of_usize(dx),
                S::of_usize(dy),
                s.lipschitz(),
                s.primal_modulus(),
                s.dual_modulus(),
                s.noise(),
                rx,
                ry,
                s.optimal_value(),
            ])?;
            e.put_all(s.coupling())?;
            e.put_all(s.primal_linear())?;
            e.put_all(s.dual_linear())?;
            let (x, y) = s.saddle_point();
            e.put_all(x)?;
            e.put_all(y)?;
        }
    }
    e.w.flush()?;
    Ok(())
}

/// Deserializes an instance written by [`write_instance`].
pub fn read_instance<S: Scalar, R: Read>(r: R) -> Result<Instance<S>> {
    let mut d = Decoder { r };
    let mut magic = [0u8; 5];
    d.r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Io("missing CKIT1 magic header".into()));
    }
    let tag: f64 = d.get()?;
    if tag == QUADRATIC_TAG {
        let n = d.get_dim("dimension")?;
        let (l, mu, sigma, radius, f_star) = (d.get()?, d.get()?, d.get()?, d.get()?, d.get()?);
        let a = d.get_vec(n * n)?;
        let b = d.get_vec(n)?;
        let x = d.get_vec(n)?;
        let eig = d.get_vec(n)?;
        let q = d.get_vec(n * n)?;
        Ok(Instance::Quadratic(QuadraticInstance::from_stored(
            n, l, mu, sigma, radius, f_star, a, b, x, eig, q,
        )?))
    } else if tag == SADDLE_TAG {
        let dx = d.get_dim("primal dimension")?;
        let dy = d.get_dim("dual dimension")?;
        let (l, mp, md, sigma, rx, ry, f_star) = (d.get()?, d.get()?, d.get()?, d.get()?, d.get()?, d.get()?, d.get()?);
        let b = d.get_vec(dx * dy)?;
        let c = d.get_vec(dx)?;
        let dd = d.get_vec(dy)?;
        let x = d.get_vec(dx)?;
        let y = d.get_vec(dy)?;
        Ok(Instance::Saddle(SaddleInstance::from_stored(
            dx,
            dy,
            l,
            mp,
            md,
            sigma,
            rx,
            ry,
            b,
            c,
            dd,
            x,
            y,
            Some(f_star),
        )?))
    } else {
        Err(Error::Io(format!("unknown CKIT1 instance tag {tag}")))
    }
}

pub fn save<S: Scalar>(inst: &Instance<S>, path: impl AsRef<Path>) -> Result<()> {
    write_instance(inst, BufWriter::new(File::create(path)?))
}

pub fn load<S: Scalar>(path: impl AsRef<Path>) -> Result<Instance<S>> {
    read_instance(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::{gen_quadratic, gen_saddle};

    fn round_trip(inst: Instance<f64>) {
        let mut buf = Vec::new();
        write_instance(&inst, &mut buf).unwrap();
        assert_eq!(&buf[..5], MAGIC);
        assert_eq!((buf.len() - 5) % 8, 0);
        let back = read_instance::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn quadratic_round_trip_is_bitwise() {
        round_trip(Instance::Quadratic(
            gen_quadratic(5, 10.0, 0.1, 1).unwrap().with_noise(0.3).unwrap(),
        ));
    }

    #[test]
    fn saddle_round_trip_is_bitwise() {
        round_trip(Instance::Saddle(gen_saddle(3, 4, 10.0, 0.0, 1.0, 2).unwrap()));
    }

    #[test]
    fn layout_of_quadratic_header() {
        let q = gen_quadratic(2, 4.0, 1.0, 0).unwrap();
        let mut buf = Vec::new();
        write_instance(&Instance::Quadratic(q), &mut buf).unwrap();
        let word = |i: usize| f64::from_le_bytes(buf[5 + 8 * i..13 + 8 * i].try_into().unwrap());
        assert_eq!(word(0), 1.0);
        assert_eq!(word(1), 2.0);
        assert_eq!(word(2), 4.0);
        assert_eq!(word(3), 1.0);
        // header 7, A 4, b 2, x* 2, eigenvalues 2, Q 4
        assert_eq!(buf.len(), 5 + 8 * 21);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_instance::<f64, _>(&b"CKIT2xxxxxxxx"[..]).is_err());
        let mut buf = MAGIC.to_vec();
        buf.extend(7.0f64.to_le_bytes());
        assert!(read_instance::<f64, _>(buf.as_slice()).is_err());
        let mut short = MAGIC.to_vec();
        short.extend(1.0f64.to_le_bytes());
        short.extend(3.0f64.to_le_bytes());
        assert!(read_instance::<f64, _>(short.as_slice()).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("ckit-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("q.ckit");
        let inst = Instance::Quadratic(gen_quadratic(3, 2.0, 1.0, 4).unwrap());
        save(&inst, &path).unwrap();
        assert_eq!(load::<f64>(&path).unwrap(), inst);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
