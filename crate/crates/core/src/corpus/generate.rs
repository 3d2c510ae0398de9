//! Synthetic corpus generation from a ground-truth HMM: Dirichlet-drawn
//! parameters, segment-indexed state paths, two emission streams, and a
//! decode step back to element sets. The returned ground truth doubles as a
//! test oracle for encoding round trips and parameter-recovery experiments.

use super::{
    build_alphabet, encode_video, segment_index, Alphabet, AlphabetPair, Corpus, CorpusError, ElementRegistry,
    EncodedSequence, Modality, Scene, VideoAnnotation, OOV_AUDIO, OOV_VISUAL,
};
use crate::mat::Matrix;
use crate::rng::substream;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

fn default_segment_seconds() -> f64 {
    3.0
}

fn default_concentration() -> f64 {
    0.5
}

fn default_genre() -> String {
    "synthetic".to_string()
}

/// Generator spec. `v1`/`v2` count the distinct real combinations the
/// generator emits per modality; alphabets built from the output additionally
/// carry the reserved OOV symbol, so their sizes are `v1 + 1` / `v2 + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub k: usize,
    pub m: usize,
    pub v1: usize,
    pub v2: usize,
    pub videos: usize,
    pub scenes_min: usize,
    pub scenes_max: usize,
    #[serde(default = "default_segment_seconds")]
    pub segment_seconds: f64,
    #[serde(default = "default_concentration")]
    pub concentration: f64,
    #[serde(default = "default_genre")]
    pub genre: String,
}

impl GenSpec {
    fn validate(&self, registry: &ElementRegistry) -> Result<(), CorpusError> {
        let fail = |msg: String| Err(CorpusError::DegenerateSpec(msg));
        if self.k == 0 {
            return fail("k must be >= 1".into());
        }
        if self.m == 0 {
            return fail("m must be >= 1".into());
        }
        if self.v1 == 0 || self.v2 == 0 {
            return fail("v1 and v2 must be >= 1".into());
        }
        if self.videos == 0 {
            return fail("videos must be >= 1".into());
        }
        if self.scenes_min == 0 || self.scenes_min > self.scenes_max {
            return fail("need 1 <= scenes_min <= scenes_max".into());
        }
        if !(self.segment_seconds > 0.0) {
            return fail("segment_seconds must be > 0".into());
        }
        if !(self.concentration > 0.0) {
            return fail("concentration must be > 0".into());
        }
        for (v, modality) in [(self.v1, Modality::Visual), (self.v2, Modality::Audio)] {
            let n = registry.ids(modality).len();
            if n == 0 || n > 20 {
                return fail(format!("registry must have 1..=20 {modality} elements"));
            }
            if v > 1usize << n {
                return fail(format!("{modality}: {v} combinations exceed 2^{n} possible"));
            }
        }
        Ok(())
    }
}

/// The true model and encodings behind a generated corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Row-stochastic visual emissions, K x (v1 + 1); the OOV column is zero.
    pub a1: Matrix,
    /// Row-stochastic audio emissions, K x (v2 + 1); the OOV column is zero.
    pub a2: Matrix,
    /// Per-segment transition matrices, each K x K row-stochastic.
    pub b: Vec<Matrix>,
    /// Initial state distribution.
    pub d: Vec<f64>,
    /// The generator's own symbol tables (real combos in index order + OOV).
    pub alphabets: AlphabetPair,
    /// Post-generation encoded sequences, aligned with the corpus videos.
    pub sequences: Vec<EncodedSequence>,
    pub spec: GenSpec,
    pub seed: u64,
}

impl GroundTruth {
    pub fn save(&self, path: &std::path::Path) -> Result<(), CorpusError> {
        let text = serde_json::to_string(self).expect("ground truth serializes");
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CorpusError::MalformedJson {
            line: 0,
            detail: e.to_string(),
        })
    }
}

fn dirichlet_row(rng: &mut impl Rng, len: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("valid gamma shape");
    loop {
        let mut row: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = row.iter().sum();
        if sum > 1e-12 {
            for v in &mut row {
                *v /= sum;
            }
            return row;
        }
    }
}

fn sample_categorical(rng: &mut impl Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Distinct element combinations: the empty set first, then a seeded shuffle
/// of the non-empty subsets.
fn combo_table(rng: &mut impl Rng, element_ids: &[&str], count: usize) -> Vec<BTreeSet<String>> {
    let n = element_ids.len();
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.shuffle(rng);
    let mut combos = Vec::with_capacity(count);
    combos.push(BTreeSet::new());
    for mask in masks {
        if combos.len() == count {
            break;
        }
        let set: BTreeSet<String> = element_ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, id)| id.to_string())
            .collect();
        combos.push(set);
    }
    combos
}

struct CoveragePatcher {
    counts: Vec<usize>,
}

impl CoveragePatcher {
    fn new(v: usize, sequences: &[EncodedSequence], pick: fn(&EncodedSequence) -> &Vec<usize>) -> Self {
        let mut counts = vec![0usize; v];
        for seq in sequences {
            for &o in pick(seq) {
                counts[o] += 1;
            }
        }
        Self { counts }
    }

    /// Replaces observations so every symbol in `0..v` occurs at least once,
    /// only touching scenes whose current symbol occurs more than once.
    fn patch(
        &mut self,
        videos: &mut [VideoAnnotation],
        sequences: &mut [EncodedSequence],
        modality: Modality,
        combos: &[BTreeSet<String>],
    ) -> Result<(), CorpusError> {
        let unused: Vec<usize> = (0..self.counts.len()).filter(|&s| self.counts[s] == 0).collect();
        let mut cursor = (0usize, 0usize);
        'symbols: for symbol in unused {
            loop {
                let (vi, si) = cursor;
                if vi >= videos.len() {
                    return Err(CorpusError::DegenerateSpec(
                        "corpus too small to cover the configured alphabet".into(),
                    ));
                }
                if si >= videos[vi].scenes.len() {
                    cursor = (vi + 1, 0);
                    continue;
                }
                cursor = (vi, si + 1);
                let obs = match modality {
                    Modality::Visual => &mut sequences[vi].obs_visual,
                    Modality::Audio => &mut sequences[vi].obs_audio,
                };
                let old = obs[si];
                if self.counts[old] < 2 {
                    continue;
                }
                self.counts[old] -= 1;
                self.counts[symbol] += 1;
                obs[si] = symbol;
                match modality {
                    Modality::Visual => videos[vi].scenes[si].visual = combos[symbol].clone(),
                    Modality::Audio => videos[vi].scenes[si].audio = combos[symbol].clone(),
                }
                continue 'symbols;
            }
        }
        Ok(())
    }
}

/// Samples a corpus and its generating model; deterministic per seed.
pub fn generate_corpus(spec: &GenSpec, seed: u64) -> Result<(Corpus, GroundTruth), CorpusError> {
    let registry = ElementRegistry::default();
    spec.validate(&registry)?;
    let mut rng = substream(seed, "syngen");

    let visual_ids = registry.ids(Modality::Visual);
    let audio_ids = registry.ids(Modality::Audio);
    let visual_combos = combo_table(&mut rng, &visual_ids, spec.v1);
    let audio_combos = combo_table(&mut rng, &audio_ids, spec.v2);

    // Emission rows are drawn over the real combos; the trailing OOV column
    // stays at zero probability.
    let draw_emissions = |rng: &mut rand_chacha::ChaCha8Rng, v: usize| {
        let rows: Vec<Vec<f64>> = (0..spec.k)
            .map(|_| {
                let mut row = dirichlet_row(rng, v, spec.concentration);
                row.push(0.0);
                row
            })
            .collect();
        Matrix::from_rows(&rows)
    };
    let a1 = draw_emissions(&mut rng, spec.v1);
    let a2 = draw_emissions(&mut rng, spec.v2);
    let b: Vec<Matrix> = (0..spec.m)
        .map(|_| {
            let rows: Vec<Vec<f64>> = (0..spec.k)
                .map(|_| dirichlet_row(&mut rng, spec.k, spec.concentration))
                .collect();
            Matrix::from_rows(&rows)
        })
        .collect();
    let d = dirichlet_row(&mut rng, spec.k, spec.concentration);

    let duration = spec.m as f64 * spec.segment_seconds;
    let mut videos = Vec::with_capacity(spec.videos);
    let mut sequences = Vec::with_capacity(spec.videos);
    for vi in 0..spec.videos {
        let video_id = format!("{}-{vi:05}", spec.genre);
        let t_len = rng.random_range(spec.scenes_min..=spec.scenes_max);
        let mut scenes = Vec::with_capacity(t_len);
        let mut obs_visual = Vec::with_capacity(t_len);
        let mut obs_audio = Vec::with_capacity(t_len);
        let mut segment_of = Vec::with_capacity(t_len);
        let mut state = 0usize;
        for si in 0..t_len {
            let scene = Scene {
                index: si,
                start_sec: duration * si as f64 / t_len as f64,
                end_sec: duration * (si + 1) as f64 / t_len as f64,
                visual: BTreeSet::new(),
                audio: BTreeSet::new(),
            };
            let seg = segment_index(&scene, duration, spec.segment_seconds);
            state = if si == 0 {
                sample_categorical(&mut rng, &d)
            } else {
                sample_categorical(&mut rng, b[seg].row(state))
            };
            let o1 = sample_categorical(&mut rng, &a1.row(state)[..spec.v1]);
            let o2 = sample_categorical(&mut rng, &a2.row(state)[..spec.v2]);
            obs_visual.push(o1);
            obs_audio.push(o2);
            segment_of.push(seg);
            let mut scene = scene;
            scene.visual = visual_combos[o1].clone();
            scene.audio = audio_combos[o2].clone();
            scenes.push(scene);
        }
        videos.push(VideoAnnotation {
            video_id: video_id.clone(),
            genre: spec.genre.clone(),
            duration_sec: duration,
            scenes,
        });
        sequences.push(EncodedSequence {
            video_id,
            obs_visual,
            obs_audio,
            segment_of,
        });
    }

    CoveragePatcher::new(spec.v1, &sequences, |s| &s.obs_visual).patch(
        &mut videos,
        &mut sequences,
        Modality::Visual,
        &visual_combos,
    )?;
    CoveragePatcher::new(spec.v2, &sequences, |s| &s.obs_audio).patch(
        &mut videos,
        &mut sequences,
        Modality::Audio,
        &audio_combos,
    )?;

    let symbol_list = |combos: &[BTreeSet<String>], modality: Modality, oov: &str| -> Result<Alphabet, CorpusError> {
        let mut symbols = Vec::with_capacity(combos.len() + 1);
        for combo in combos {
            symbols.push(super::canonical_symbol(&registry, modality, combo)?);
        }
        symbols.push(oov.to_string());
        Alphabet::try_from(symbols).map_err(CorpusError::DegenerateSpec)
    };
    let alphabets = AlphabetPair {
        visual: symbol_list(&visual_combos, Modality::Visual, OOV_VISUAL)?,
        audio: symbol_list(&audio_combos, Modality::Audio, OOV_AUDIO)?,
    };

    let corpus = Corpus { videos };
    let truth = GroundTruth {
        a1,
        a2,
        b,
        d,
        alphabets,
        sequences,
        spec: spec.clone(),
        seed,
    };
    Ok((corpus, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{validate_video, write_corpus};

    fn small_spec() -> GenSpec {
        GenSpec {
            k: 2,
            m: 5,
            v1: 3,
            v2: 3,
            videos: 50,
            scenes_min: 6,
            scenes_max: 6,
            segment_seconds: 3.0,
            concentration: 0.5,
            genre: "synthetic".into(),
        }
    }

    #[test]
    fn generates_requested_shape() {
        let (corpus, truth) = generate_corpus(&small_spec(), 11).unwrap();
        assert_eq!(corpus.len(), 50);
        assert_eq!(truth.sequences.len(), 50);
        for (video, seq) in corpus.videos.iter().zip(&truth.sequences) {
            assert_eq!(video.scenes.len(), 6);
            assert_eq!(seq.len(), 6);
            validate_video(video, &ElementRegistry::default()).unwrap();
        }
        assert_eq!(truth.a1.rows(), 2);
        assert_eq!(truth.a1.cols(), 4); // v1 + OOV
        assert_eq!(truth.b.len(), 5);
    }

    #[test]
    fn same_seed_is_byte_identical() {
        let (c1, _) = generate_corpus(&small_spec(), 7).unwrap();
        let (c2, _) = generate_corpus(&small_spec(), 7).unwrap();
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        write_corpus(&c1, &mut b1).unwrap();
        write_corpus(&c2, &mut b2).unwrap();
        assert_eq!(b1, b2);
        let (c3, _) = generate_corpus(&small_spec(), 8).unwrap();
        assert_ne!(c1, c3);
    }

    #[test]
    fn encode_round_trips_against_ground_truth() {
        let registry = ElementRegistry::default();
        let (corpus, truth) = generate_corpus(&small_spec(), 3).unwrap();
        for (video, expected) in corpus.videos.iter().zip(&truth.sequences) {
            let enc = encode_video(video, &truth.alphabets, &registry, truth.spec.segment_seconds).unwrap();
            assert_eq!(&enc, expected);
        }
    }

    #[test]
    fn corpus_alphabet_matches_configured_sizes() {
        let registry = ElementRegistry::default();
        let (corpus, truth) = generate_corpus(&small_spec(), 5).unwrap();
        let built = build_alphabet(&corpus, &registry).unwrap();
        assert_eq!(built.visual.len(), truth.spec.v1 + 1);
        assert_eq!(built.audio.len(), truth.spec.v2 + 1);
    }

    #[test]
    fn degenerate_specs_rejected() {
        let mut spec = small_spec();
        spec.k = 0;
        assert!(matches!(generate_corpus(&spec, 0), Err(CorpusError::DegenerateSpec(_))));
        let mut spec = small_spec();
        spec.v1 = 1000;
        assert!(generate_corpus(&spec, 0).is_err());
        let mut spec = small_spec();
        spec.scenes_min = 0;
        assert!(generate_corpus(&spec, 0).is_err());
    }

    #[test]
    fn truth_rows_are_stochastic() {
        let (_, truth) = generate_corpus(&small_spec(), 9).unwrap();
        for i in 0..truth.a1.rows() {
            let s: f64 = truth.a1.row(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert_eq!(truth.a1.row(i)[truth.spec.v1], 0.0);
        }
        let sd: f64 = truth.d.iter().sum();
        assert!((sd - 1.0).abs() < 1e-12);
    }
}
