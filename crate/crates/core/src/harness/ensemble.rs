//! Shared landscape ensembles, in memory and on disk.
//!
//! On disk an ensemble is a directory `<root>/<spec dir>/` (e.g. `N12_K3`)
//! holding `landscape_000.nkl …` for NK landscapes and a `manifest.csv`
//! with one row per landscape. Ising landscapes are deterministic, so their
//! ensembles consist of the manifest alone.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::landscape::io::{load_from_path, save_to_path};
use crate::landscape::{
    count_local_maxima, generate_nk, AnyLandscape, Family, IsingLandscape, IsingVariant, Landscape,
    LandscapeSpec,
};
use crate::rng::{self, purpose};

pub const MANIFEST_FILE: &str = "manifest.csv";

/// Local maxima are counted for manifests up to this length.
const COUNT_MAXIMA_MAX_N: usize = 24;

/// Landscapes that every algorithm in an experiment shares.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub spec: LandscapeSpec,
    pub landscapes: Vec<AnyLandscape>,
    pub seeds: Vec<u64>,
}

/// Seed of landscape `index` in an ensemble keyed by `master_seed`.
pub fn landscape_seed(master_seed: u64, spec: &LandscapeSpec, index: usize) -> u64 {
    rng::derive_seed(master_seed, purpose::ENSEMBLE, &[spec.n as u64, spec.k as u64, index as u64])
}

fn make_landscape(spec: &LandscapeSpec, seed: u64) -> Result<AnyLandscape> {
    Ok(match spec.family {
        Family::Nk => generate_nk(spec.n, spec.k, seed)?.into(),
        Family::IsingNoninteracting => IsingLandscape::new(spec.n, IsingVariant::Noninteracting)?.into(),
        Family::IsingFerromagnetic => IsingLandscape::new(spec.n, IsingVariant::Ferromagnetic)?.into(),
    })
}

impl Ensemble {
    /// Generate `count` landscapes in memory. Produces exactly the landscapes
    /// that [`build_ensemble`] would write for the same arguments.
    pub fn generate(spec: LandscapeSpec, count: usize, master_seed: u64) -> Result<Self> {
        spec.validate()?;
        if count == 0 {
            return Err(Error::param("ensemble must contain at least one landscape"));
        }
        let seeds: Vec<u64> = (0..count).map(|i| landscape_seed(master_seed, &spec, i)).collect();
        let landscapes = seeds
            .par_iter()
            .map(|&s| make_landscape(&spec, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            spec,
            landscapes,
            seeds,
        })
    }

    pub fn len(&self) -> usize {
        self.landscapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landscapes.is_empty()
    }

    /// The first `count` landscapes.
    pub fn truncated(&self, count: usize) -> Ensemble {
        Ensemble {
            spec: self.spec,
            landscapes: self.landscapes[..count.min(self.len())].to_vec(),
            seeds: self.seeds[..count.min(self.len())].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub id: usize,
    pub seed: u64,
    /// Empty for Ising landscapes.
    pub file: String,
    /// Formatted with 17 significant digits.
    pub global_fitness: String,
    /// Empty when the landscape is too large to enumerate.
    pub local_maxima: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub spec: LandscapeSpec,
    pub dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
    /// Hex SHA-256 of the manifest file.
    pub digest: String,
}

impl Manifest {
    pub fn mean_local_maxima(&self) -> Option<f64> {
        let counts: Option<Vec<u64>> = self.entries.iter().map(|e| e.local_maxima).collect();
        counts.map(|c| c.iter().sum::<u64>() as f64 / c.len() as f64)
    }

    pub fn mean_maxima_density(&self) -> Option<f64> {
        self.mean_local_maxima().map(|m| m / 2f64.powi(self.spec.n as i32))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn format_fitness(f: f64) -> String {
    format!("{f:.16e}")
}

fn landscape_file(id: usize) -> String {
    format!("landscape_{id:03}.nkl")
}

/// Generate and persist an ensemble under `root`. Refuses to write into a
/// non-empty directory unless `overwrite` is set.
pub fn build_ensemble(
    spec: LandscapeSpec,
    count: usize,
    master_seed: u64,
    root: &Path,
    overwrite: bool,
) -> Result<Manifest> {
    let dir = root.join(spec.dir_name());
    if dir.exists() {
        let non_empty = fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .next()
            .is_some();
        if non_empty {
            if !overwrite {
                return Err(Error::Exists(dir));
            }
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let ensemble = Ensemble::generate(spec, count, master_seed)?;
    let entries = ensemble
        .landscapes
        .par_iter()
        .zip(&ensemble.seeds)
        .enumerate()
        .map(|(id, (l, &seed))| {
            let file = match l {
                AnyLandscape::Nk(nk) => {
                    let name = landscape_file(id);
                    save_to_path(nk, &dir.join(&name))?;
                    name
                }
                AnyLandscape::Ising(_) => String::new(),
            };
            let local_maxima = if spec.n <= COUNT_MAXIMA_MAX_N {
                Some(count_local_maxima(l)?.local_maxima_count)
            } else {
                None
            };
            Ok(ManifestEntry {
                family: spec.family,
                n: spec.n,
                k: spec.k,
                id,
                seed,
                file,
                global_fitness: format_fitness(l.global_max_fitness()),
                local_maxima,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let path = dir.join(MANIFEST_FILE);
    let mut writer = csv::Writer::from_writer(Vec::new());
    for e in &entries {
        writer.serialize(e).map_err(|e| Error::csv(&path, e))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::io(&path, e.into_error()))?;
    fs::File::create(&path)
        .and_then(|mut f| f.write_all(&bytes))
        .map_err(|e| Error::io(&path, e))?;

    Ok(Manifest {
        spec,
        dir,
        entries,
        digest: hex(&Sha256::digest(&bytes)),
    })
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = csv::Reader::from_reader(&bytes[..]);
    let entries = reader
        .deserialize()
        .collect::<std::result::Result<Vec<ManifestEntry>, _>>()
        .map_err(|e| Error::csv(&path, e))?;
    let first = entries.first().ok_or_else(|| Error::Malformed {
        path: path.clone(),
        message: "manifest has no landscapes".into(),
    })?;
    let spec = LandscapeSpec {
        family: first.family,
        n: first.n,
        k: first.k,
    };
    if entries.iter().any(|e| e.family != spec.family || e.n != spec.n || e.k != spec.k) {
        return Err(Error::Malformed {
            path,
            message: "manifest mixes landscape parameters".into(),
        });
    }
    Ok(Manifest {
        spec,
        dir: dir.to_path_buf(),
        entries,
        digest: hex(&Sha256::digest(&bytes)),
    })
}

/// Load an ensemble directory written by [`build_ensemble`].
pub fn load_ensemble(dir: &Path) -> Result<Ensemble> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "ensemble directory not found"),
        ));
    }
    let manifest = read_manifest(dir)?;
    let spec = manifest.spec;
    spec.validate()?;
    let landscapes = manifest
        .entries
        .par_iter()
        .map(|e| {
            let l: AnyLandscape = match spec.family {
                Family::Nk => load_from_path(&dir.join(&e.file))?.into(),
                _ => make_landscape(&spec, e.seed)?,
            };
            if format_fitness(l.global_max_fitness()) != e.global_fitness {
                return Err(Error::Malformed {
                    path: dir.join(MANIFEST_FILE),
                    message: format!("landscape {} global fitness disagrees with manifest", e.id),
                });
            }
            Ok(l)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble {
        spec,
        landscapes,
        seeds: manifest.entries.iter().map(|e| e.seed).collect(),
    })
}
