//! Directory-based on-disk format.
//!
//! Every artifact is a directory holding `manifest.json` plus raw binary
//! arrays. Complex arrays are interleaved `(re, im)` little-endian f64
//! (`dtype = "c128le"`), row-major in exactly the declared index order, so
//! round trips are bit-exact:
//!
//! * Hamiltonians: `h.bin` as `[k][p][q]`, `v.bin` as `[Q][k][k'][p][q][r][s]`.
//! * Gram factors: `l.bin` as `[Q][n][k][p][q]` with per-Q ranks in the
//!   manifest.
//! * THC factors: `chi.bin` as `[k][p][μ]`, `zeta.bin` as
//!   `[Q][g1][g2][μ][ν]`, `norms.bin` (f64) as `[k][μ]`.
//! * Sparse entries: `two_body.bin` records of seven `u32` indices, a `u32`
//!   multiplicity, and a c128 value; `one_body.bin` records of three `u32`
//!   indices, a `u32` multiplicity, and a c128 value.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array3, ArrayD, IxDyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::{CholeskyFactors, OneBodyEntry, SparseEntries, SparseEntry, ThcFactors};
use crate::hamiltonian::KHamiltonian;
use crate::kmesh::Mesh;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub kind: String,
    pub dims: [i64; 3],
    pub n_spatial: usize,
    pub dtype: String,
    pub arrays: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_rank: Option<usize>,
}

impl Manifest {
    fn base(kind: &str, mesh: &Mesh, n_spatial: usize) -> Manifest {
        Manifest {
            format_version: FORMAT_VERSION,
            kind: kind.to_string(),
            dims: mesh.dims(),
            n_spatial,
            dtype: "c128le".to_string(),
            arrays: BTreeMap::new(),
            seed: None,
            config_hash: None,
            threshold: None,
            tol: None,
            ranks: None,
            m_rank: None,
        }
    }

    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::new(self.dims[0], self.dims[1], self.dims[2])
    }
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(manifest)?;
    fs::write(dir.join("manifest.json"), json + "\n")?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::Data(format!(
            "unsupported format version {} in {}",
            manifest.format_version,
            dir.display()
        )));
    }
    if manifest.dtype != "c128le" {
        return Err(Error::Data(format!("unsupported dtype {}", manifest.dtype)));
    }
    Ok(manifest)
}

fn write_complex(path: &Path, values: impl Iterator<Item = Complex64>) -> Result<()> {
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    for v in values {
        file.write_all(&v.re.to_le_bytes())?;
        file.write_all(&v.im.to_le_bytes())?;
    }
    file.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(())
}

fn read_complex(path: &Path, count: usize) -> Result<Vec<Complex64>> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * count {
        return Err(Error::Data(format!(
            "{}: expected {} complex values, found {} bytes",
            path.display(),
            count,
            bytes.len()
        )));
    }
    Ok((0..count)
        .map(|i| {
            let re = f64::from_le_bytes(bytes[16 * i..16 * i + 8].try_into().expect("8 bytes"));
            let im =
                f64::from_le_bytes(bytes[16 * i + 8..16 * i + 16].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect())
}

pub fn write_hamiltonian(
    dir: &Path,
    ham: &KHamiltonian,
    seed: Option<u64>,
    config_hash: Option<String>,
) -> Result<()> {
    ham.check_shapes()?;
    let mut manifest = Manifest::base("hamiltonian", &ham.mesh, ham.n_spatial);
    manifest.seed = seed;
    manifest.config_hash = config_hash;
    manifest
        .arrays
        .insert("h".into(), ham.h.shape().to_vec());
    manifest
        .arrays
        .insert("v".into(), ham.v.shape().to_vec());
    write_manifest(dir, &manifest)?;
    write_complex(&dir.join("h.bin"), ham.h.iter().cloned())?;
    write_complex(&dir.join("v.bin"), ham.v.iter().cloned())?;
    Ok(())
}

pub fn read_hamiltonian(dir: &Path) -> Result<KHamiltonian> {
    let manifest = read_manifest(dir)?;
    if manifest.kind != "hamiltonian" {
        return Err(Error::Data(format!(
            "{} holds '{}', expected a hamiltonian",
            dir.display(),
            manifest.kind
        )));
    }
    let mesh = manifest.mesh()?;
    let n = manifest.n_spatial;
    let nk = mesh.num_kpoints();

    let h_count = nk * n * n;
    let h_vals = read_complex(&dir.join("h.bin"), h_count)?;
    let h = Array3::from_shape_vec((nk, n, n), h_vals)
        .map_err(|e| Error::Data(format!("one-body array: {e}")))?;

    let v_shape = KHamiltonian::v_shape(&mesh, n);
    let v_count: usize = v_shape.iter().product();
    let v_vals = read_complex(&dir.join("v.bin"), v_count)?;
    let v = ArrayD::from_shape_vec(IxDyn(&v_shape), v_vals)
        .map_err(|e| Error::Data(format!("two-body array: {e}")))?;

    let ham = KHamiltonian {
        mesh,
        n_spatial: n,
        h,
        v,
    };
    ham.check_shapes()?;
    Ok(ham)
}

pub fn write_cholesky(dir: &Path, fac: &CholeskyFactors, config_hash: Option<String>) -> Result<()> {
    let mut manifest = Manifest::base("factors:sf", &fac.mesh, fac.n_spatial);
    manifest.tol = Some(fac.tol);
    manifest.ranks = Some(fac.ranks());
    manifest.m_rank = Some(fac.m_rank());
    manifest.config_hash = config_hash;
    let block = fac.mesh.num_kpoints() * fac.n_spatial * fac.n_spatial;
    manifest.arrays.insert(
        "l".into(),
        vec![fac.vectors.iter().map(Vec::len).sum::<usize>(), block],
    );
    write_manifest(dir, &manifest)?;
    write_complex(
        &dir.join("l.bin"),
        fac.vectors.iter().flatten().flatten().cloned(),
    )?;
    Ok(())
}

pub fn read_cholesky(dir: &Path) -> Result<CholeskyFactors> {
    let manifest = read_manifest(dir)?;
    if manifest.kind != "factors:sf" {
        return Err(Error::Data(format!("{} holds '{}'", dir.display(), manifest.kind)));
    }
    let mesh = manifest.mesh()?;
    let n = manifest.n_spatial;
    let ranks = manifest
        .ranks
        .clone()
        .ok_or_else(|| Error::Data("factor manifest lacks per-Q ranks".into()))?;
    let block = mesh.num_kpoints() * n * n;
    let total: usize = ranks.iter().sum::<usize>() * block;
    let vals = read_complex(&dir.join("l.bin"), total)?;
    let mut vectors = Vec::with_capacity(ranks.len());
    let mut offset = 0;
    for &rank in &ranks {
        let mut per_q = Vec::with_capacity(rank);
        for _ in 0..rank {
            per_q.push(vals[offset..offset + block].to_vec());
            offset += block;
        }
        vectors.push(per_q);
    }
    Ok(CholeskyFactors {
        mesh,
        n_spatial: n,
        tol: manifest.tol.unwrap_or(0.0),
        vectors,
    })
}

pub fn write_thc(dir: &Path, fac: &ThcFactors, config_hash: Option<String>) -> Result<()> {
    let mut manifest = Manifest::base("factors:thc", &fac.mesh, fac.n_spatial);
    manifest.m_rank = Some(fac.m_rank);
    manifest.config_hash = config_hash;
    manifest
        .arrays
        .insert("chi".into(), fac.chi.shape().to_vec());
    manifest
        .arrays
        .insert("zeta".into(), fac.zeta.shape().to_vec());
    manifest
        .arrays
        .insert("norms".into(), fac.norms.shape().to_vec());
    write_manifest(dir, &manifest)?;
    write_complex(&dir.join("chi.bin"), fac.chi.iter().cloned())?;
    write_complex(&dir.join("zeta.bin"), fac.zeta.iter().cloned())?;
    let mut file = std::io::BufWriter::new(fs::File::create(dir.join("norms.bin"))?);
    for v in fac.norms.iter() {
        file.write_all(&v.to_le_bytes())?;
    }
    drop(file);
    Ok(())
}

pub fn read_thc(dir: &Path) -> Result<ThcFactors> {
    let manifest = read_manifest(dir)?;
    if manifest.kind != "factors:thc" {
        return Err(Error::Data(format!("{} holds '{}'", dir.display(), manifest.kind)));
    }
    let mesh = manifest.mesh()?;
    let n = manifest.n_spatial;
    let m = manifest
        .m_rank
        .ok_or_else(|| Error::Data("thc manifest lacks m_rank".into()))?;
    let nk = mesh.num_kpoints();
    let chi_vals = read_complex(&dir.join("chi.bin"), nk * n * m)?;
    let chi = Array3::from_shape_vec((nk, n, m), chi_vals)
        .map_err(|e| Error::Data(format!("chi array: {e}")))?;
    let zeta_vals = read_complex(&dir.join("zeta.bin"), nk * 64 * m * m)?;
    let zeta = ndarray::Array5::from_shape_vec((nk, 8, 8, m, m), zeta_vals)
        .map_err(|e| Error::Data(format!("zeta array: {e}")))?;
    // norms are re-derived by ingestion; the stored copy is for consumers
    crate::factorize::ingest_thc(mesh, chi, zeta, 1e-9)
}

pub fn write_sparse(dir: &Path, entries: &SparseEntries, config_hash: Option<String>) -> Result<()> {
    let mut manifest = Manifest::base("factors:sparse", &entries.mesh, entries.n_spatial);
    manifest.threshold = Some(entries.threshold);
    manifest.config_hash = config_hash;
    manifest
        .arrays
        .insert("two_body".into(), vec![entries.two_body.len()]);
    manifest
        .arrays
        .insert("one_body".into(), vec![entries.one_body.len()]);
    write_manifest(dir, &manifest)?;

    let mut file = std::io::BufWriter::new(fs::File::create(dir.join("two_body.bin"))?);
    for e in &entries.two_body {
        let (q, k, kp, a, b, c, d) = e.index;
        for idx in [q, k, kp, a, b, c, d] {
            file.write_all(&(idx as u32).to_le_bytes())?;
        }
        file.write_all(&e.multiplicity.to_le_bytes())?;
        file.write_all(&e.value.re.to_le_bytes())?;
        file.write_all(&e.value.im.to_le_bytes())?;
    }
    drop(file);

    let mut file = std::io::BufWriter::new(fs::File::create(dir.join("one_body.bin"))?);
    for e in &entries.one_body {
        for idx in [e.k, e.p, e.q] {
            file.write_all(&(idx as u32).to_le_bytes())?;
        }
        file.write_all(&e.multiplicity.to_le_bytes())?;
        file.write_all(&e.value.re.to_le_bytes())?;
        file.write_all(&e.value.im.to_le_bytes())?;
    }
    drop(file);
    Ok(())
}

pub fn read_sparse(dir: &Path) -> Result<SparseEntries> {
    let manifest = read_manifest(dir)?;
    if manifest.kind != "factors:sparse" {
        return Err(Error::Data(format!("{} holds '{}'", dir.display(), manifest.kind)));
    }
    let mesh = manifest.mesh()?;
    let two_count = manifest.arrays.get("two_body").map_or(0, |s| s[0]);
    let one_count = manifest.arrays.get("one_body").map_or(0, |s| s[0]);

    let mut bytes = Vec::new();
    fs::File::open(dir.join("two_body.bin"))?.read_to_end(&mut bytes)?;
    let rec = 8 * 4 + 16;
    if bytes.len() != rec * two_count {
        return Err(Error::Data("two_body.bin length mismatch".into()));
    }
    let u32_at = |b: &[u8], o: usize| u32::from_le_bytes(b[o..o + 4].try_into().expect("4 bytes"));
    let f64_at = |b: &[u8], o: usize| f64::from_le_bytes(b[o..o + 8].try_into().expect("8 bytes"));
    let mut two_body = Vec::with_capacity(two_count);
    for i in 0..two_count {
        let b = &bytes[rec * i..rec * (i + 1)];
        two_body.push(SparseEntry {
            index: (
                u32_at(b, 0) as usize,
                u32_at(b, 4) as usize,
                u32_at(b, 8) as usize,
                u32_at(b, 12) as usize,
                u32_at(b, 16) as usize,
                u32_at(b, 20) as usize,
                u32_at(b, 24) as usize,
            ),
            multiplicity: u32_at(b, 28),
            value: Complex64::new(f64_at(b, 32), f64_at(b, 40)),
        });
    }

    let mut bytes = Vec::new();
    fs::File::open(dir.join("one_body.bin"))?.read_to_end(&mut bytes)?;
    let rec = 4 * 4 + 16;
    if bytes.len() != rec * one_count {
        return Err(Error::Data("one_body.bin length mismatch".into()));
    }
    let mut one_body = Vec::with_capacity(one_count);
    for i in 0..one_count {
        let b = &bytes[rec * i..rec * (i + 1)];
        one_body.push(OneBodyEntry {
            k: u32_at(b, 0) as usize,
            p: u32_at(b, 4) as usize,
            q: u32_at(b, 8) as usize,
            multiplicity: u32_at(b, 12),
            value: Complex64::new(f64_at(b, 16), f64_at(b, 24)),
        });
    }

    Ok(SparseEntries {
        mesh,
        n_spatial: manifest.n_spatial,
        threshold: manifest.threshold.unwrap_or(0.0),
        two_body,
        one_body,
    })
}
