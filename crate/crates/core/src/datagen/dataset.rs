//! Balanced dataset assembly and on-disk layout.
//!
//! A dataset directory holds four files:
//!
//! * `manifest.json`: format version, generator parameter ranges, noise
//!   parameters per regime, and one record per sample (seed, class, regime,
//!   split). The manifest alone reproduces the dataset bit for bit.
//! * `points.bin`: little-endian `f32` coordinates, sample-major then
//!   point-major then `x y z`.
//! * `labels.bin`: one class byte per sample (0 level, 1 up, 2 down).
//! * `split.bin`: one split byte per sample (0 train, 1 test).
//!
//! Coordinates are quantized to `f32` at build time, so the in-memory cloud,
//! the saved bytes, and a rebuild from the manifest all agree exactly.
//!
//! Samples rotate through the six (class, regime) cells in a fixed order
//! chosen so that any prefix is as balanced as possible: classes stay within
//! one sample of each other, the two regimes split evenly, and alternating
//! train/test assignment inside each cell keeps the split at exactly half
//! for even cell sizes, with the odd cells' leftovers cancelling pairwise.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{downsample, PointCloud, TerrainClass};
use crate::rng::derive_seed;

use super::{
    add_noise_and_outliers, gen_level_ground, gen_stairs, GenRanges, NoiseParams, Regime,
    StairDirection, TerrainParams,
};

pub const MANIFEST_VERSION: u32 = 1;

/// Train/test membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_byte(self) -> u8 {
        match self {
            Split::Train => 0,
            Split::Test => 1,
        }
    }

    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Split::Train),
            1 => Ok(Split::Test),
            _ => Err(Error::Manifest(format!("invalid split byte {b}"))),
        }
    }
}

/// Everything needed to regenerate one sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub class: TerrainClass,
    pub regime: Regime,
    pub split: Split,
}

/// Dataset description stored as `manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub num_samples: usize,
    pub points_per_sample: usize,
    pub class_names: Vec<String>,
    pub master_seed: u64,
    pub ranges: GenRanges,
    pub clean_noise: NoiseParams,
    pub noisy_noise: NoiseParams,
    pub samples: Vec<SampleRecord>,
}

impl Manifest {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != MANIFEST_VERSION {
            return Err(Error::Manifest(format!(
                "unsupported manifest version {} (expected {MANIFEST_VERSION})",
                self.format_version
            )));
        }
        if self.samples.len() != self.num_samples {
            return Err(Error::Manifest(format!(
                "manifest lists {} samples but declares {}",
                self.samples.len(),
                self.num_samples
            )));
        }
        let expected: Vec<String> = TerrainClass::ALL.iter().map(|c| c.name().to_string()).collect();
        if self.class_names != expected {
            return Err(Error::Manifest(format!(
                "unexpected class names {:?}",
                self.class_names
            )));
        }
        if self.points_per_sample == 0 {
            return Err(Error::Manifest("points_per_sample must be positive".into()));
        }
        self.ranges.validate()?;
        self.clean_noise.validate()?;
        self.noisy_noise.validate()?;
        Ok(())
    }
}

/// Build-time knobs for a new dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub num_samples: usize,
    pub points_per_sample: usize,
    pub seed: u64,
    pub ranges: GenRanges,
    pub clean_noise: NoiseParams,
    pub noisy_noise: NoiseParams,
}

impl DatasetSpec {
    /// Full corpus: 4016 clouds of 2048 points.
    pub fn full(seed: u64) -> Self {
        DatasetSpec {
            num_samples: 4016,
            points_per_sample: 2048,
            seed,
            ranges: GenRanges::default(),
            clean_noise: NoiseParams::clean(),
            noisy_noise: NoiseParams::noisy(),
        }
    }

    /// Desk-scale corpus for fast iteration: 600 clouds of 512 points.
    pub fn desk(seed: u64) -> Self {
        DatasetSpec {
            num_samples: 600,
            points_per_sample: 512,
            seed,
            ranges: GenRanges {
                points_raw: 1024,
                ..GenRanges::default()
            },
            clean_noise: NoiseParams::clean(),
            noisy_noise: NoiseParams::noisy(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_samples < 6 {
            return Err(Error::InvalidParam(
                "num_samples must be at least 6 (one per class and regime)".into(),
            ));
        }
        if self.points_per_sample == 0 {
            return Err(Error::InvalidParam("points_per_sample must be positive".into()));
        }
        self.ranges.validate()?;
        self.clean_noise.validate()?;
        self.noisy_noise.validate()?;
        Ok(())
    }
}

/// Labeled clouds plus the manifest that reproduces them.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    manifest: Manifest,
    clouds: Vec<PointCloud<f64>>,
}

/// Cell rotation order. Classes advance every sample while regimes alternate
/// with period two, so truncating at any length leaves classes within one of
/// each other and regimes within one of each other.
const CELLS: [(TerrainClass, Regime); 6] = [
    (TerrainClass::LevelGround, Regime::CleanSim),
    (TerrainClass::UpStairs, Regime::NoisySim),
    (TerrainClass::DownStairs, Regime::CleanSim),
    (TerrainClass::LevelGround, Regime::NoisySim),
    (TerrainClass::UpStairs, Regime::CleanSim),
    (TerrainClass::DownStairs, Regime::NoisySim),
];

/// Generates a balanced dataset from scratch.
pub fn build_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut samples = Vec::with_capacity(spec.num_samples);
    for i in 0..spec.num_samples {
        let cell = i % CELLS.len();
        let occurrence = i / CELLS.len();
        let (class, regime) = CELLS[cell];
        let split = if (cell + occurrence) % 2 == 0 {
            Split::Train
        } else {
            Split::Test
        };
        samples.push(SampleRecord {
            seed: derive_seed(spec.seed, i as u64),
            class,
            regime,
            split,
        });
    }
    let manifest = Manifest {
        format_version: MANIFEST_VERSION,
        num_samples: spec.num_samples,
        points_per_sample: spec.points_per_sample,
        class_names: TerrainClass::ALL.iter().map(|c| c.name().to_string()).collect(),
        master_seed: spec.seed,
        ranges: spec.ranges.clone(),
        clean_noise: spec.clean_noise.clone(),
        noisy_noise: spec.noisy_noise.clone(),
        samples,
    };
    Dataset::from_manifest(&manifest)
}

/// Snaps every coordinate to the nearest `f32` so memory and disk agree.
fn quantize(cloud: &PointCloud<f64>) -> PointCloud<f64> {
    let points = cloud
        .points()
        .iter()
        .map(|p| [p[0] as f32 as f64, p[1] as f32 as f64, p[2] as f32 as f64])
        .collect();
    PointCloud::new(points)
}

impl Dataset {
    /// Regenerates every cloud from its manifest record. Each sample's seed
    /// feeds four fixed sub-streams (parameter draw, surface sampling,
    /// corruption, downsampling).
    pub fn from_manifest(manifest: &Manifest) -> Result<Dataset> {
        manifest.validate()?;
        let mut clouds = Vec::with_capacity(manifest.num_samples);
        for rec in &manifest.samples {
            let mut prng = crate::rng::DetRng::seed(derive_seed(rec.seed, 0));
            let params: TerrainParams = manifest.ranges.sample(&mut prng);
            let raw = match rec.class {
                TerrainClass::LevelGround => gen_level_ground(&params, derive_seed(rec.seed, 1))?,
                TerrainClass::UpStairs => {
                    gen_stairs(&params, StairDirection::Up, derive_seed(rec.seed, 1))?
                }
                TerrainClass::DownStairs => {
                    gen_stairs(&params, StairDirection::Down, derive_seed(rec.seed, 1))?
                }
            };
            let noise = match rec.regime {
                Regime::CleanSim => &manifest.clean_noise,
                Regime::NoisySim => &manifest.noisy_noise,
            };
            let corrupted = add_noise_and_outliers(&raw, noise, derive_seed(rec.seed, 2))?;
            let sampled = downsample(
                &corrupted,
                manifest.points_per_sample,
                derive_seed(rec.seed, 3),
            )?;
            clouds.push(quantize(&sampled));
        }
        Ok(Dataset {
            manifest: manifest.clone(),
            clouds,
        })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn len(&self) -> usize {
        self.clouds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clouds.is_empty()
    }

    pub fn points_per_sample(&self) -> usize {
        self.manifest.points_per_sample
    }

    pub fn cloud(&self, i: usize) -> &PointCloud<f64> {
        &self.clouds[i]
    }

    pub fn class(&self, i: usize) -> TerrainClass {
        self.manifest.samples[i].class
    }

    pub fn regime(&self, i: usize) -> Regime {
        self.manifest.samples[i].regime
    }

    pub fn split(&self, i: usize) -> Split {
        self.manifest.samples[i].split
    }

    pub fn split_indices(&self, split: Split) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.split(i) == split).collect()
    }

    /// Borrowed clouds and labels for one split, in index order.
    pub fn split_view(&self, split: Split) -> (Vec<&PointCloud<f64>>, Vec<TerrainClass>) {
        let idx = self.split_indices(split);
        (
            idx.iter().map(|&i| self.cloud(i)).collect(),
            idx.iter().map(|&i| self.class(i)).collect(),
        )
    }

    /// Writes the four dataset files into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut json = serde_json::to_vec_pretty(&self.manifest)?;
        json.push(b'\n');
        fs::write(dir.join("manifest.json"), json)?;

        let mut points = Vec::with_capacity(self.len() * self.points_per_sample() * 12);
        for cloud in &self.clouds {
            for p in cloud.points() {
                for c in p {
                    points.extend_from_slice(&(*c as f32).to_le_bytes());
                }
            }
        }
        fs::write(dir.join("points.bin"), points)?;

        let labels: Vec<u8> = self.manifest.samples.iter().map(|r| r.class.as_byte()).collect();
        fs::write(dir.join("labels.bin"), labels)?;
        let split: Vec<u8> = self.manifest.samples.iter().map(|r| r.split.as_byte()).collect();
        fs::write(dir.join("split.bin"), split)?;
        Ok(())
    }

    /// Reads a dataset directory, checking the binary files against the
    /// manifest (sizes, label bytes, split bytes).
    pub fn load(dir: &Path) -> Result<Dataset> {
        let manifest: Manifest = serde_json::from_slice(&read_file(dir, "manifest.json")?)?;
        manifest.validate()?;
        let n = manifest.num_samples;
        let m = manifest.points_per_sample;

        let points = read_file(dir, "points.bin")?;
        if points.len() != n * m * 12 {
            return Err(Error::Manifest(format!(
                "points.bin holds {} bytes, manifest implies {}",
                points.len(),
                n * m * 12
            )));
        }
        let mut clouds = Vec::with_capacity(n);
        let mut offset = 0;
        for _ in 0..n {
            let mut pts = Vec::with_capacity(m);
            for _ in 0..m {
                let mut p = [0.0f64; 3];
                for c in p.iter_mut() {
                    let bytes: [u8; 4] = points[offset..offset + 4].try_into().expect("4 bytes");
                    *c = f32::from_le_bytes(bytes) as f64;
                    offset += 4;
                }
                pts.push(p);
            }
            clouds.push(PointCloud::new(pts));
        }

        let labels = read_file(dir, "labels.bin")?;
        if labels.len() != n {
            return Err(Error::Manifest(format!(
                "labels.bin holds {} bytes, manifest implies {n}",
                labels.len()
            )));
        }
        let split = read_file(dir, "split.bin")?;
        if split.len() != n {
            return Err(Error::Manifest(format!(
                "split.bin holds {} bytes, manifest implies {n}",
                split.len()
            )));
        }
        for (i, rec) in manifest.samples.iter().enumerate() {
            if TerrainClass::from_byte(labels[i])? != rec.class {
                return Err(Error::Manifest(format!("label byte {i} disagrees with manifest")));
            }
            if Split::from_byte(split[i])? != rec.split {
                return Err(Error::Manifest(format!("split byte {i} disagrees with manifest")));
            }
        }

        Ok(Dataset { manifest, clouds })
    }
}

fn read_file(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    fs::File::open(dir.join(name))?.read_to_end(&mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec(num: usize) -> DatasetSpec {
        DatasetSpec {
            num_samples: num,
            points_per_sample: 64,
            seed: 11,
            ranges: GenRanges {
                points_raw: 128,
                ..GenRanges::default()
            },
            clean_noise: NoiseParams::clean(),
            noisy_noise: NoiseParams::noisy(),
        }
    }

    fn class_counts(d: &Dataset, split: Option<Split>) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for i in 0..d.len() {
            if split.map_or(true, |s| d.split(i) == s) {
                counts[d.class(i).index()] += 1;
            }
        }
        counts
    }

    #[test]
    fn six_samples_cover_every_cell_once() {
        let d = build_dataset(&tiny_spec(6)).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..6 {
            seen.insert((d.class(i).index(), d.regime(i) == Regime::CleanSim));
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(d.split_indices(Split::Train).len(), 3);
        assert_eq!(d.split_indices(Split::Test).len(), 3);
    }

    #[test]
    fn balance_holds_at_odd_sizes() {
        for num in [6usize, 7, 20, 45, 96] {
            let d = build_dataset(&tiny_spec(num)).unwrap();
            let counts = class_counts(&d, None);
            let max = *counts.iter().max().unwrap();
            let min = *counts.iter().min().unwrap();
            assert!(max - min <= 1, "classes {counts:?} at {num}");
            let clean = (0..num).filter(|&i| d.regime(i) == Regime::CleanSim).count();
            assert!(clean.abs_diff(num - clean) <= 1, "regimes {clean} at {num}");
            let train = d.split_indices(Split::Train).len();
            assert!(train.abs_diff(num - train) <= 1, "split {train} at {num}");
            for split in [Split::Train, Split::Test] {
                let c = class_counts(&d, Some(split));
                let max = *c.iter().max().unwrap();
                let min = *c.iter().min().unwrap();
                assert!(max - min <= 1, "split classes {c:?} at {num}");
            }
        }
    }

    #[test]
    fn even_multiple_of_twelve_splits_exactly_in_half() {
        let d = build_dataset(&tiny_spec(96)).unwrap();
        assert_eq!(d.split_indices(Split::Train).len(), 48);
        assert_eq!(d.split_indices(Split::Test).len(), 48);
    }

    #[test]
    fn clouds_have_requested_size_and_f32_exact_coordinates() {
        let d = build_dataset(&tiny_spec(12)).unwrap();
        for i in 0..d.len() {
            assert_eq!(d.cloud(i).len(), 64);
            for p in d.cloud(i).points() {
                for c in p {
                    assert_eq!(*c, *c as f32 as f64);
                }
            }
        }
    }

    #[test]
    fn save_load_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let d = build_dataset(&tiny_spec(12)).unwrap();
        d.save(dir.path()).unwrap();
        let loaded = Dataset::load(dir.path()).unwrap();
        assert_eq!(d, loaded);
    }

    #[test]
    fn rebuild_from_manifest_is_byte_identical() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let d = build_dataset(&tiny_spec(12)).unwrap();
        d.save(dir_a.path()).unwrap();

        let manifest: Manifest =
            serde_json::from_slice(&fs::read(dir_a.path().join("manifest.json")).unwrap()).unwrap();
        let rebuilt = Dataset::from_manifest(&manifest).unwrap();
        rebuilt.save(dir_b.path()).unwrap();

        for name in ["manifest.json", "points.bin", "labels.bin", "split.bin"] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs after rebuild");
        }
    }

    #[test]
    fn tampered_labels_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        build_dataset(&tiny_spec(12)).unwrap().save(dir.path()).unwrap();
        let path = dir.path().join("labels.bin");
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] = (bytes[0] + 1) % 3;
        fs::write(&path, bytes).unwrap();
        assert!(matches!(Dataset::load(dir.path()), Err(Error::Manifest(_))));
    }

    #[test]
    fn undersized_spec_is_rejected() {
        assert!(build_dataset(&tiny_spec(5)).is_err());
    }
}
