//! Uniform sampling of shapes.
//!
//! One-backbone shapes are drawn by a uniform index into a complete,
//! canonically sorted table. Two-backbone shapes of genus `g` come from a
//! one-backbone shape of genus `g + 1`: A-shapes go through `eta_inv`,
//! B-shapes through `theta_inv` first. Every two-backbone shape is hit by
//! exactly two table entries, so rejecting disconnected results leaves the
//! uniform distribution.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bijection::{eta_inv, theta_inv};
use crate::diagram::Diagram;
use crate::enumerate::{enumerate_shapes_with, ShapeEnumOptions};
use crate::error::{Error, Result};
use crate::fatgraph::{classify_loops, LoopKind, LoopSide};
use crate::series::{shape_poly_1bb, shape_poly_2bb};
use crate::shape::{shape_class, Shape, ShapeClass};

pub const CACHE_DIR_ENV: &str = "BISHAPE_CACHE_DIR";

/// Complete list of shapes over `backbones` backbones of genus `genus`.
#[derive(Clone, Debug)]
pub struct ShapeTable {
    backbones: usize,
    genus: usize,
    shapes: Vec<Shape>,
    digest: String,
}

#[derive(Serialize, Deserialize)]
struct CachedTable {
    backbones: usize,
    genus: usize,
    digest: String,
    shapes: Vec<String>,
}

fn table_digest(backbones: usize, genus: usize, codes: &[String]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("{backbones}:{genus}\n"));
    for code in codes {
        hasher.update(code.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

fn expected_size(backbones: usize, genus: usize) -> Result<BigInt> {
    let poly = match backbones {
        1 => shape_poly_1bb(genus)?,
        _ => shape_poly_2bb(genus)?,
    };
    Ok(poly.eval(&BigInt::from(1)))
}

/// Cache directory: the explicit one, else the environment variable, else
/// a directory under the system temp dir.
pub fn cache_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(dir) = explicit {
        return dir.to_path_buf();
    }
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => std::env::temp_dir().join("bishape-cache"),
    }
}

impl ShapeTable {
    /// Enumerates the table without touching the cache.
    pub fn build(backbones: usize, genus: usize, best_effort: bool) -> Result<ShapeTable> {
        let options = ShapeEnumOptions {
            best_effort,
            ..ShapeEnumOptions::default()
        };
        Self::from_shapes(backbones, genus, enumerate_shapes_with(backbones, genus, &options)?)
    }

    /// Wraps an already enumerated list, which must be canonically sorted
    /// and contain shapes of the stated type only.
    pub fn from_shapes(backbones: usize, genus: usize, shapes: Vec<Shape>) -> Result<ShapeTable> {
        if shapes.iter().any(|s| s.backbone_count() != backbones || s.genus() != genus as i64) {
            return Err(Error::Precondition(format!("table entries must have {backbones} backbone(s) and genus {genus}")));
        }
        if !shapes.windows(2).all(|w| w[0].canonical_key() < w[1].canonical_key()) {
            return Err(Error::Precondition("table entries must be canonically sorted and distinct".into()));
        }
        let codes: Vec<String> = shapes.iter().map(|s| s.canonical_code()).collect();
        Ok(ShapeTable {
            backbones,
            genus,
            digest: table_digest(backbones, genus, &codes),
            shapes,
        })
    }

    /// Loads the table from `dir`, or builds it and writes it there.
    pub fn load_or_build(backbones: usize, genus: usize, dir: &Path, best_effort: bool) -> Result<ShapeTable> {
        let path = Self::cache_path(dir, backbones, genus);
        if path.exists() {
            return Self::load(&path, backbones, genus);
        }
        let table = Self::build(backbones, genus, best_effort)?;
        table.store(&path)?;
        Ok(table)
    }

    pub fn cache_path(dir: &Path, backbones: usize, genus: usize) -> PathBuf {
        dir.join(format!("shapes-b{backbones}-g{genus}.json"))
    }

    pub fn store(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let cached = CachedTable {
            backbones: self.backbones,
            genus: self.genus,
            digest: self.digest.clone(),
            shapes: self.shapes.iter().map(|s| s.canonical_code()).collect(),
        };
        let text = serde_json::to_string(&cached).map_err(|e| Error::Internal(e.to_string()))?;
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Reads a cached table, checking its digest, its size against the
    /// shape polynomial at `z = 1`, and every entry.
    pub fn load(path: &Path, backbones: usize, genus: usize) -> Result<ShapeTable> {
        let corrupt = |why: String| Error::Cache(format!("{}: {why}", path.display()));
        let text = fs::read_to_string(path)?;
        let cached: CachedTable = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        if cached.backbones != backbones || cached.genus != genus {
            return Err(corrupt(format!(
                "holds backbones {} genus {}",
                cached.backbones, cached.genus
            )));
        }
        let digest = table_digest(backbones, genus, &cached.shapes);
        if digest != cached.digest {
            return Err(corrupt("digest mismatch".into()));
        }
        let expected = expected_size(backbones, genus)?;
        if BigInt::from(cached.shapes.len()) != expected {
            return Err(corrupt(format!("{} entries, expected {expected}", cached.shapes.len())));
        }
        let shapes = cached
            .shapes
            .iter()
            .map(|code| {
                let d = Diagram::from_canonical_code(code)?;
                let s = Shape::new(d)?;
                if s.backbone_count() != backbones || s.genus() != genus as i64 {
                    return Err(Error::Cache(format!("entry {code} has the wrong type")));
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| corrupt(e.to_string()))?;
        Ok(ShapeTable {
            backbones,
            genus,
            shapes,
            digest,
        })
    }

    pub fn backbones(&self) -> usize {
        self.backbones
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Position of `s` in the canonical order.
    pub fn index_of(&self, s: &Shape) -> Option<usize> {
        let key = s.canonical_key();
        self.shapes.binary_search_by_key(&key, |t| t.canonical_key()).ok()
    }

    /// Number of entries per total arc count.
    pub fn arc_profile(&self) -> BTreeMap<usize, u64> {
        let mut profile = BTreeMap::new();
        for s in &self.shapes {
            *profile.entry(s.arc_count()).or_insert(0) += 1;
        }
        profile
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub genus: usize,
    /// Restrict to two-backbone shapes with this many arcs, rainbows included.
    pub arcs: Option<usize>,
    pub count: usize,
}

impl SamplerConfig {
    /// Generator for stream `stream` of this seed. Distinct streams of one
    /// seed are independent.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Uniform draw from a one-backbone table.
pub fn uniform_shape_1bb<'t, R: Rng + ?Sized>(table: &'t ShapeTable, rng: &mut R) -> Result<&'t Shape> {
    if table.backbones != 1 || table.is_empty() {
        return Err(Error::Precondition("a non-empty one-backbone table is required".into()));
    }
    Ok(&table.shapes[rng.random_range(0..table.len())])
}

/// Rejection sampler for connected two-backbone shapes of a fixed genus.
#[derive(Clone, Debug)]
pub struct BishapeSampler<'t> {
    table: &'t ShapeTable,
    classes: Vec<ShapeClass>,
    pool: Vec<usize>,
    attempts: u64,
    accepted: u64,
}

impl<'t> BishapeSampler<'t> {
    /// `table` must hold the one-backbone shapes of genus `g + 1`. With
    /// `arcs = Some(m)` only preimages of `m`-arc shapes are drawn.
    pub fn new(table: &'t ShapeTable, arcs: Option<usize>) -> Result<Self> {
        if table.backbones != 1 || table.genus == 0 {
            return Err(Error::Precondition("a one-backbone table of positive genus is required".into()));
        }
        let classes = table.shapes.iter().map(shape_class).collect::<Result<Vec<_>>>()?;
        let pool: Vec<usize> = (0..table.len())
            .filter(|&i| match arcs {
                None => true,
                Some(m) => match classes[i] {
                    ShapeClass::A => table.shapes[i].arc_count() == m + 1,
                    ShapeClass::B => table.shapes[i].arc_count() == m,
                },
            })
            .collect();
        if pool.is_empty() {
            return Err(Error::Precondition(format!(
                "no shapes of genus {} with {} arcs",
                table.genus - 1,
                arcs.unwrap_or(0)
            )));
        }
        Ok(BishapeSampler {
            table,
            classes,
            pool,
            attempts: 0,
            accepted: 0,
        })
    }

    pub fn genus(&self) -> usize {
        self.table.genus - 1
    }

    /// One proposal; `None` if it was rejected as disconnected.
    pub fn propose<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<Shape>> {
        let i = self.pool[rng.random_range(0..self.pool.len())];
        let s1 = &self.table.shapes[i];
        let s2 = match self.classes[i] {
            ShapeClass::A => eta_inv(s1)?,
            ShapeClass::B => eta_inv(&theta_inv(s1)?)?,
        };
        self.attempts += 1;
        if !s2.is_connected() {
            return Ok(None);
        }
        self.accepted += 1;
        Ok(Some(s2))
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Shape> {
        loop {
            if let Some(s) = self.propose(rng)? {
                return Ok(s);
            }
        }
    }

    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }
}

/// Draws one connected two-backbone shape of genus `table.genus() - 1`.
pub fn uniform_bishape<R: Rng + ?Sized>(table: &ShapeTable, rng: &mut R) -> Result<Shape> {
    BishapeSampler::new(table, None)?.sample(rng)
}

/// Sums over a run of samples. Merging adds fields, so the order in which
/// partial runs are merged does not matter.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SampleStats {
    pub samples: u64,
    pub attempts: u64,
    pub accepted: u64,
    pub alpha_sum: u64,
    pub alpha_sq_sum: u64,
    pub beta_sum: u64,
    pub beta_sq_sum: u64,
    pub multi_sum: u64,
    pub arc_histogram: BTreeMap<usize, u64>,
    pub loop_length_histogram: BTreeMap<usize, u64>,
}

fn mean_var(sum: u64, sq: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = sum as f64 / n as f64;
    (mean, sq as f64 / n as f64 - mean * mean)
}

impl SampleStats {
    pub fn record(&mut self, s: &Shape) {
        let profile = classify_loops(s);
        let alpha = profile.alpha as u64;
        let beta = profile.beta as u64;
        self.samples += 1;
        self.alpha_sum += alpha;
        self.alpha_sq_sum += alpha * alpha;
        self.beta_sum += beta;
        self.beta_sq_sum += beta * beta;
        self.multi_sum += profile.multi as u64;
        *self.arc_histogram.entry(s.arc_count()).or_insert(0) += 1;
        for l in profile.loops.iter().filter(|l| l.kind != LoopKind::Plant) {
            *self.loop_length_histogram.entry(l.length).or_insert(0) += 1;
        }
        debug_assert!(profile.loops.iter().all(|l| l.kind == LoopKind::Plant || l.side == LoopSide::Beta
            || l.side == LoopSide::Alpha));
    }

    pub fn merge(&mut self, other: &SampleStats) {
        self.samples += other.samples;
        self.attempts += other.attempts;
        self.accepted += other.accepted;
        self.alpha_sum += other.alpha_sum;
        self.alpha_sq_sum += other.alpha_sq_sum;
        self.beta_sum += other.beta_sum;
        self.beta_sq_sum += other.beta_sq_sum;
        self.multi_sum += other.multi_sum;
        for (k, v) in &other.arc_histogram {
            *self.arc_histogram.entry(*k).or_insert(0) += v;
        }
        for (k, v) in &other.loop_length_histogram {
            *self.loop_length_histogram.entry(*k).or_insert(0) += v;
        }
    }

    pub fn alpha(&self) -> (f64, f64) {
        mean_var(self.alpha_sum, self.alpha_sq_sum, self.samples)
    }

    pub fn beta(&self) -> (f64, f64) {
        mean_var(self.beta_sum, self.beta_sq_sum, self.samples)
    }

    pub fn acceptance(&self) -> f64 {
        if self.attempts == 0 {
            return 0.0;
        }
        self.accepted as f64 / self.attempts as f64
    }

    /// Rows of `section,key,value`.
    pub fn to_csv(&self) -> String {
        let (am, av) = self.alpha();
        let (bm, bv) = self.beta();
        let mut out = String::from("section,key,value\n");
        out += &format!("summary,samples,{}\n", self.samples);
        out += &format!("summary,attempts,{}\n", self.attempts);
        out += &format!("summary,accepted,{}\n", self.accepted);
        out += &format!("summary,alpha_mean,{am}\n");
        out += &format!("summary,alpha_var,{av}\n");
        out += &format!("summary,beta_mean,{bm}\n");
        out += &format!("summary,beta_var,{bv}\n");
        for (k, v) in &self.arc_histogram {
            out += &format!("arcs,{k},{v}\n");
        }
        for (k, v) in &self.loop_length_histogram {
            out += &format!("loop_length,{k},{v}\n");
        }
        out
    }
}

/// Draws `n` shapes of genus `table.genus() - 1` and summarizes them.
pub fn sample_stats<R: Rng + ?Sized>(table: &ShapeTable, n: usize, arcs: Option<usize>, rng: &mut R) -> Result<SampleStats> {
    let mut sampler = BishapeSampler::new(table, arcs)?;
    let mut stats = SampleStats::default();
    for _ in 0..n {
        let s = sampler.sample(rng)?;
        stats.record(&s);
    }
    stats.attempts = sampler.attempts();
    stats.accepted = sampler.accepted();
    Ok(stats)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` against probabilities `expected`.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::Precondition("need at least two matching categories".into()));
    }
    let n: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

pub fn chi_square_uniform(observed: &[u64]) -> Result<ChiSquare> {
    let k = observed.len() as f64;
    chi_square(observed, &vec![1.0 / k; observed.len()])
}
