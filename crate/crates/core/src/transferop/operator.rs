//! Galerkin matrices of averaging operators f ↦ Av_g w_g·(f ∘ τ_g).

use std::f64::consts::PI;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{FourierVector, TransferOpError};
use crate::cocycle::{fp_frame, project, transfer_matrix, Mat2, Sign};

/// Entries of A_M and A_2M may differ by at most this much.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
/// apply_power fails once the top 10% of modes carry this fraction of ‖f‖₂.
pub const LEAK_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    /// Composition weighted by (τ′)^{1/2}, an isometry of L².
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Raw,
    Tilde,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorMeta {
    pub energy: f64,
    pub lambda: f64,
    pub n_max: usize,
    pub quadrature: usize,
    pub variant: Variant,
    pub frame: Frame,
    /// max |A_M − A_2M| over all entries.
    pub quadrature_change: f64,
}

impl OperatorMeta {
    /// Content key over the defining parameters (not the measured change).
    pub fn cache_key(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"ABTO/1");
        h.update(self.energy.to_le_bytes());
        h.update(self.lambda.to_le_bytes());
        h.update((self.n_max as u64).to_le_bytes());
        h.update((self.quadrature as u64).to_le_bytes());
        h.update([self.variant as u8, self.frame as u8]);
        hex(&h.finalize())
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Dense matrix A[n, n′] on modes |n|, |n′| ≤ n_max, indexed at n + n_max.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub meta: OperatorMeta,
    entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn from_parts(meta: OperatorMeta, entries: DMatrix<Complex64>) -> Self {
        assert_eq!(entries.nrows(), 2 * meta.n_max + 1);
        assert_eq!(entries.ncols(), 2 * meta.n_max + 1);
        Self { meta, entries }
    }

    pub fn identity(n_max: usize) -> Self {
        Self::from_parts(
            OperatorMeta {
                energy: f64::NAN,
                lambda: 0.0,
                n_max,
                quadrature: 0,
                variant: Variant::Plain,
                frame: Frame::Raw,
                quadrature_change: 0.0,
            },
            DMatrix::identity(2 * n_max + 1, 2 * n_max + 1),
        )
    }

    pub fn n_max(&self) -> usize {
        self.meta.n_max
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// A[n, n′] for |n|, |n′| ≤ n_max.
    pub fn get(&self, n: i64, n_prime: i64) -> Complex64 {
        let off = self.meta.n_max as i64;
        self.entries[((n + off) as usize, (n_prime + off) as usize)]
    }

    /// The Galerkin matrix of the same operator at a smaller cutoff.
    pub fn truncated(&self, n_max: usize) -> Self {
        assert!(n_max <= self.meta.n_max);
        let start = self.meta.n_max - n_max;
        let dim = 2 * n_max + 1;
        let mut meta = self.meta.clone();
        meta.n_max = n_max;
        Self::from_parts(meta, self.entries.view((start, start), (dim, dim)).into_owned())
    }

    /// Matrix–vector product, padding `f` up to the operator cutoff.
    pub fn apply(&self, f: &FourierVector) -> FourierVector {
        assert!(f.n_max() <= self.meta.n_max, "vector cutoff exceeds operator cutoff");
        let f = f.resized(self.meta.n_max);
        let v = DVector::from_column_slice(f.coeffs());
        FourierVector::from_coeffs((&self.entries * v).as_slice().to_vec())
    }

    /// Product with the conjugate transpose.
    pub fn apply_adjoint(&self, f: &FourierVector) -> FourierVector {
        let f = f.resized(self.meta.n_max);
        let v = DVector::from_column_slice(f.coeffs());
        FourierVector::from_coeffs(self.entries.ad_mul(&v).as_slice().to_vec())
    }

    /// Largest |A[−n, −n′] − conj(A[n, n′])|.
    pub fn hermitian_defect(&self) -> f64 {
        let dim = self.entries.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let d = self.entries[(dim - 1 - i, dim - 1 - j)] - self.entries[(i, j)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Spectral norm via singular values.
    pub fn spectral_norm(&self) -> f64 {
        self.entries.clone().singular_values().max()
    }

    /// Serialize: magic "ABTO", version, metadata, payload length, SHA-256 of
    /// the payload, then row-major little-endian (re, im) doubles.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let payload = self.payload_bytes();
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.meta.energy.to_le_bytes())?;
        w.write_all(&self.meta.lambda.to_le_bytes())?;
        w.write_all(&(self.meta.n_max as u64).to_le_bytes())?;
        w.write_all(&(self.meta.quadrature as u64).to_le_bytes())?;
        w.write_all(&[self.meta.variant as u8, self.meta.frame as u8])?;
        w.write_all(&self.meta.quadrature_change.to_le_bytes())?;
        w.write_all(&(payload.len() as u64).to_le_bytes())?;
        w.write_all(&Sha256::digest(&payload))?;
        w.write_all(&payload)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_binary(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self, TransferOpError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)
            .map_err(|e| TransferOpError::CacheCorrupt(e.to_string()))?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, TransferOpError> {
        let corrupt = |m: &str| TransferOpError::CacheCorrupt(m.to_string());
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4).ok_or_else(|| corrupt("truncated header"))? != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let header = (|| {
            let version = u32::from_le_bytes(cur.array()?);
            let energy = f64::from_le_bytes(cur.array()?);
            let lambda = f64::from_le_bytes(cur.array()?);
            let n_max = u64::from_le_bytes(cur.array()?) as usize;
            let quadrature = u64::from_le_bytes(cur.array()?) as usize;
            let [v, f] = cur.array::<2>()?;
            let change = f64::from_le_bytes(cur.array()?);
            let len = u64::from_le_bytes(cur.array()?) as usize;
            let digest: [u8; 32] = cur.array()?;
            Some((version, energy, lambda, n_max, quadrature, v, f, change, len, digest))
        })()
        .ok_or_else(|| corrupt("truncated header"))?;
        let (version, energy, lambda, n_max, quadrature, v, f, change, len, digest) = header;
        if version != FORMAT_VERSION {
            return Err(corrupt("unsupported version"));
        }
        let variant = match v {
            0 => Variant::Plain,
            1 => Variant::Unitary,
            _ => return Err(corrupt("bad variant tag")),
        };
        let frame = match f {
            0 => Frame::Raw,
            1 => Frame::Tilde,
            _ => return Err(corrupt("bad frame tag")),
        };
        let dim = 2 * n_max + 1;
        if len != dim * dim * 16 {
            return Err(corrupt("payload length does not match n_max"));
        }
        let payload = cur.take(len).ok_or_else(|| corrupt("truncated payload"))?;
        if cur.pos != bytes.len() {
            return Err(corrupt("trailing bytes"));
        }
        if Sha256::digest(payload).as_slice() != digest {
            return Err(corrupt("payload hash mismatch"));
        }
        let mut entries = DMatrix::zeros(dim, dim);
        for (k, chunk) in payload.chunks_exact(16).enumerate() {
            let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
            entries[(k / dim, k % dim)] = Complex64::new(re, im);
        }
        let meta = OperatorMeta {
            energy,
            lambda,
            n_max,
            quadrature,
            variant,
            frame,
            quadrature_change: change,
        };
        Ok(Self { meta, entries })
    }

    fn payload_bytes(&self) -> Vec<u8> {
        let dim = self.entries.nrows();
        let mut out = Vec::with_capacity(dim * dim * 16);
        for i in 0..dim {
            for j in 0..dim {
                let z = self.entries[(i, j)];
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }
}

const MAGIC: &[u8; 4] = b"ABTO";
const FORMAT_VERSION: u32 = 1;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos.checked_add(n)?)?;
        self.pos += n;
        Some(s)
    }

    fn array<const N: usize>(&mut self) -> Option<[u8; N]> {
        self.take(N).map(|s| s.try_into().unwrap())
    }
}

/// The two matrices the operator averages over, in the requested frame.
pub fn frame_matrices(energy: f64, lambda: f64, frame: Frame) -> Result<[Mat2<f64>; 2], TransferOpError> {
    Ok(match frame {
        Frame::Raw => [
            transfer_matrix(energy, lambda, Sign::Plus),
            transfer_matrix(energy, lambda, Sign::Minus),
        ],
        Frame::Tilde => {
            let f = fp_frame(energy, lambda)?;
            [f.g_plus_tilde, f.g_minus_tilde]
        }
    })
}

/// Smallest M accepted by [`build_operator`] for a given cutoff.
pub fn min_quadrature(n_max: usize) -> usize {
    4 * (2 * n_max + 1)
}

/// T = (1/3)(I + C_{g₊} + C_{g₋}) with C_g f = w_g·(f ∘ τ_g), w_g = 1 (plain)
/// or (τ′_g)^{1/2} (unitary).
pub fn build_operator(
    energy: f64,
    lambda: f64,
    n_max: usize,
    quadrature: usize,
    variant: Variant,
    frame: Frame,
) -> Result<OperatorMatrix, TransferOpError> {
    let maps = frame_matrices(energy, lambda, frame)?;
    let (entries, change) = galerkin_average(&maps, 1.0, n_max, quadrature, variant)?;
    Ok(OperatorMatrix {
        meta: OperatorMeta {
            energy,
            lambda,
            n_max,
            quadrature,
            variant,
            frame,
            quadrature_change: change,
        },
        entries,
    })
}

/// Galerkin matrix of (identity_weight·I + Σ_g C_g) / (identity_weight + #maps),
/// with the max entry change from M to 2M.
pub fn galerkin_average(
    maps: &[Mat2<f64>],
    identity_weight: f64,
    n_max: usize,
    quadrature: usize,
    variant: Variant,
) -> Result<(DMatrix<Complex64>, f64), TransferOpError> {
    if quadrature < min_quadrature(n_max) {
        return Err(TransferOpError::InvalidParameters(format!(
            "quadrature M = {quadrature} below 4(2·n_max + 1) = {}",
            min_quadrature(n_max)
        )));
    }
    let dim = 2 * n_max + 1;
    let m = quadrature;
    // Nodes x_j = j/M and the half-shifted x_j + 1/(2M); A_2M is their average.
    let samples: Vec<[Vec<(f64, f64)>; 2]> = maps
        .iter()
        .map(|g| {
            [0.0, 0.5].map(|shift| {
                (0..m)
                    .map(|j| {
                        let (y, jac) = project(g, (j as f64 + shift) / m as f64);
                        let w = match variant {
                            Variant::Plain => 1.0,
                            Variant::Unitary => jac.sqrt(),
                        };
                        (y, w)
                    })
                    .collect()
            })
        })
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let norm = 1.0 / (identity_weight + maps.len() as f64);
    let inv_m = 1.0 / m as f64;

    let columns: Vec<(Vec<Complex64>, f64)> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let n_prime = col as f64 - n_max as f64;
            let mut column = vec![Complex64::new(0.0, 0.0); dim];
            let mut shifted = vec![Complex64::new(0.0, 0.0); dim];
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for map in &samples {
                for (half, nodes) in map.iter().enumerate() {
                    for (b, &(y, w)) in buf.iter_mut().zip(nodes) {
                        *b = Complex64::from_polar(w, 2.0 * PI * n_prime * y);
                    }
                    fft.process_with_scratch(&mut buf, &mut scratch);
                    let target = if half == 0 { &mut column } else { &mut shifted };
                    for (row, t) in target.iter_mut().enumerate() {
                        let n = row as i64 - n_max as i64;
                        let mut z = buf[n.rem_euclid(m as i64) as usize] * inv_m;
                        if half == 1 {
                            z *= Complex64::from_polar(1.0, -PI * n as f64 * inv_m);
                        }
                        *t += z;
                    }
                }
            }
            let change = column
                .iter()
                .zip(&shifted)
                .map(|(a, b)| (a - b).norm() * 0.5 * norm)
                .fold(0.0, f64::max);
            for (row, c) in column.iter_mut().enumerate() {
                if row == col {
                    *c += identity_weight;
                }
                *c *= norm;
            }
            (column, change)
        })
        .collect();

    let change = columns.iter().map(|c| c.1).fold(0.0, f64::max);
    if change > QUADRATURE_TOLERANCE {
        return Err(TransferOpError::QuadratureUnderResolved { m, change });
    }
    let entries = DMatrix::from_fn(dim, dim, |i, j| columns[j].0[i]);
    Ok((entries, change))
}

/// Rigorous bound for the plain variant: ‖C_g‖₂ ≤ sup (1/τ′_g)^{1/2} ≤ ‖g‖.
pub fn plain_norm_bound(maps: &[Mat2<f64>], identity_weight: f64) -> f64 {
    (identity_weight + maps.iter().map(|g| g.norm()).sum::<f64>()) / (identity_weight + maps.len() as f64)
}

/// Iterates A^j f for j = 0..=m with per-step truncation leakage.
#[derive(Clone, Debug)]
pub struct PowerOrbit {
    pub iterates: Vec<FourierVector>,
    /// ℓ² mass on the top 10% of modes, relative to ‖f‖₂.
    pub leakage: Vec<f64>,
}

impl PowerOrbit {
    pub fn last(&self) -> &FourierVector {
        self.iterates.last().unwrap()
    }

    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }
}

fn leak_cutoff(n_max: usize) -> usize {
    n_max - n_max / 10
}

/// A^j f for j ≤ m without failing on leakage.
pub fn power_orbit(a: &OperatorMatrix, f: &FourierVector, m: usize) -> PowerOrbit {
    let f0 = f.resized(a.n_max());
    let base = f0.l2_norm().max(f64::MIN_POSITIVE);
    let cut = leak_cutoff(a.n_max()) + 1;
    let mut iterates = Vec::with_capacity(m + 1);
    let mut leakage = Vec::with_capacity(m + 1);
    leakage.push(f0.tail_norm(cut) / base);
    iterates.push(f0);
    for _ in 0..m {
        let next = a.apply(iterates.last().unwrap());
        leakage.push(next.tail_norm(cut) / base);
        iterates.push(next);
    }
    PowerOrbit { iterates, leakage }
}

/// A^m f, failing once the top 10% of modes hold more than 10⁻⁴ of ‖f‖₂.
pub fn apply_power(a: &OperatorMatrix, f: &FourierVector, m: usize) -> Result<FourierVector, TransferOpError> {
    if f.n_max() > a.n_max() {
        return Err(TransferOpError::InvalidParameters(
            "vector cutoff exceeds operator cutoff".into(),
        ));
    }
    let orbit = power_orbit(a, f, m);
    if let Some((step, &leak)) = orbit.leakage.iter().enumerate().find(|(_, &l)| l > LEAK_TOLERANCE) {
        return Err(TransferOpError::TruncationLeak { step, leakage: leak });
    }
    Ok(orbit.iterates.into_iter().last().unwrap())
}
