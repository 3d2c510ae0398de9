//! Annotation data model: element registry, scene-annotated videos,
//! observation alphabets, categorical encoding, and synthetic generation.

mod alphabet;
mod encode;
mod generate;
mod parse;
mod registry;

pub use alphabet::{build_alphabet, canonical_symbol, Alphabet, AlphabetPair, OOV_AUDIO, OOV_VISUAL};
pub use encode::{encode_corpus, encode_video, num_segments, required_segments, segment_index, EncodedSequence};
pub use generate::{generate_corpus, GenSpec, GroundTruth};
pub use parse::{parse_corpus, read_corpus_str, write_corpus, ParseOptions, ParsedCorpus};
pub use registry::{Category, ElementDef, ElementRegistry, Modality};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// One annotated scene: time span plus the active expression elements per
/// modality (presence/absence sets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub index: usize,
    pub start_sec: f64,
    pub end_sec: f64,
    #[serde(default)]
    pub visual: BTreeSet<String>,
    #[serde(default)]
    pub audio: BTreeSet<String>,
}

impl Scene {
    pub fn midpoint_sec(&self) -> f64 {
        0.5 * (self.start_sec + self.end_sec)
    }
}

/// One video: ordered, non-overlapping scenes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoAnnotation {
    pub video_id: String,
    pub genre: String,
    pub duration_sec: f64,
    pub scenes: Vec<Scene>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub videos: Vec<VideoAnnotation>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.videos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.videos.is_empty()
    }

    pub fn total_scenes(&self) -> usize {
        self.videos.iter().map(|v| v.scenes.len()).sum()
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed JSON: {detail}")]
    MalformedJson { line: usize, detail: String },
    #[error("video {video_id}: unknown element id '{element}'")]
    UnknownElement { video_id: String, element: String },
    #[error("video {video_id}: element '{element}' is {actual}, expected {expected}")]
    WrongModality {
        video_id: String,
        element: String,
        expected: Modality,
        actual: Modality,
    },
    #[error("video {video_id}: scene {scene} has start_sec {start} >= end_sec {end}")]
    SceneTiming {
        video_id: String,
        scene: usize,
        start: f64,
        end: f64,
    },
    #[error("video {video_id}: scene {scene} overlaps the previous scene")]
    OverlappingScenes { video_id: String, scene: usize },
    #[error("video {video_id}: scene indices must be non-negative and strictly increasing")]
    NonMonotonicIndex { video_id: String },
    #[error("video {video_id}: has no scenes")]
    NoScenes { video_id: String },
    #[error("video {video_id}: last scene ends at {end} but duration is {duration}")]
    DurationOverrun {
        video_id: String,
        end: f64,
        duration: f64,
    },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("registry error: {0}")]
    Registry(String),
    #[error("degenerate generator spec: {0}")]
    DegenerateSpec(String),
}

impl CorpusError {
    /// Everything in this module is input validation, except I/O failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, CorpusError::Io(_))
    }
}

/// Validates the per-video invariants against the registry.
pub fn validate_video(video: &VideoAnnotation, registry: &ElementRegistry) -> Result<(), CorpusError> {
    if video.scenes.is_empty() {
        return Err(CorpusError::NoScenes {
            video_id: video.video_id.clone(),
        });
    }
    let mut prev_end = f64::NEG_INFINITY;
    let mut prev_index: Option<usize> = None;
    for scene in &video.scenes {
        if let Some(p) = prev_index {
            if scene.index <= p {
                return Err(CorpusError::NonMonotonicIndex {
                    video_id: video.video_id.clone(),
                });
            }
        }
        prev_index = Some(scene.index);
        if !(scene.start_sec >= 0.0 && scene.start_sec < scene.end_sec) {
            return Err(CorpusError::SceneTiming {
                video_id: video.video_id.clone(),
                scene: scene.index,
                start: scene.start_sec,
                end: scene.end_sec,
            });
        }
        if scene.start_sec < prev_end - 1e-9 {
            return Err(CorpusError::OverlappingScenes {
                video_id: video.video_id.clone(),
                scene: scene.index,
            });
        }
        prev_end = scene.end_sec;
        for (ids, modality) in [(&scene.visual, Modality::Visual), (&scene.audio, Modality::Audio)] {
            for id in ids {
                match registry.get(id) {
                    None => {
                        return Err(CorpusError::UnknownElement {
                            video_id: video.video_id.clone(),
                            element: id.clone(),
                        })
                    }
                    Some(def) if def.modality != modality => {
                        return Err(CorpusError::WrongModality {
                            video_id: video.video_id.clone(),
                            element: id.clone(),
                            expected: modality,
                            actual: def.modality,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
    }
    if prev_end > video.duration_sec + 0.5 {
        return Err(CorpusError::DurationOverrun {
            video_id: video.video_id.clone(),
            end: prev_end,
            duration: video.duration_sec,
        });
    }
    Ok(())
}
