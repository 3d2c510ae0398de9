//! Categorical encoding of videos: per-scene symbol indices for both
//! modalities plus the fixed-length segment index of each scene.

use super::{canonical_symbol, AlphabetPair, Corpus, CorpusError, ElementRegistry, Modality, Scene, VideoAnnotation};
use serde::{Deserialize, Serialize};

/// Number of fixed-length segments covering a video (at least 1).
pub fn num_segments(duration_sec: f64, segment_seconds: f64) -> usize {
    debug_assert!(segment_seconds > 0.0);
    ((duration_sec / segment_seconds).ceil() as usize).max(1)
}

/// Segment index of a scene by its midpoint, clamped into `[0, M-1]`.
pub fn segment_index(scene: &Scene, duration_sec: f64, segment_seconds: f64) -> usize {
    let m_total = num_segments(duration_sec, segment_seconds);
    let raw = (scene.midpoint_sec() / segment_seconds).floor() as usize;
    raw.min(m_total - 1)
}

/// Smallest segment count that covers every video in the corpus.
pub fn required_segments(corpus: &Corpus, segment_seconds: f64) -> usize {
    corpus
        .videos
        .iter()
        .map(|v| num_segments(v.duration_sec, segment_seconds))
        .max()
        .unwrap_or(1)
}

/// A video as two aligned categorical observation streams plus per-scene
/// segment indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedSequence {
    pub video_id: String,
    pub obs_visual: Vec<usize>,
    pub obs_audio: Vec<usize>,
    pub segment_of: Vec<usize>,
}

impl EncodedSequence {
    pub fn len(&self) -> usize {
        self.obs_visual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs_visual.is_empty()
    }
}

/// Encodes one video against the alphabets; unseen combinations map to the
/// OOV index.
pub fn encode_video(
    video: &VideoAnnotation,
    alphabets: &AlphabetPair,
    registry: &ElementRegistry,
    segment_seconds: f64,
) -> Result<EncodedSequence, CorpusError> {
    let mut obs_visual = Vec::with_capacity(video.scenes.len());
    let mut obs_audio = Vec::with_capacity(video.scenes.len());
    let mut segment_of = Vec::with_capacity(video.scenes.len());
    for scene in &video.scenes {
        let vs = canonical_symbol(registry, Modality::Visual, &scene.visual)?;
        let au = canonical_symbol(registry, Modality::Audio, &scene.audio)?;
        obs_visual.push(alphabets.visual.index_of(&vs));
        obs_audio.push(alphabets.audio.index_of(&au));
        segment_of.push(segment_index(scene, video.duration_sec, segment_seconds));
    }
    Ok(EncodedSequence {
        video_id: video.video_id.clone(),
        obs_visual,
        obs_audio,
        segment_of,
    })
}

pub fn encode_corpus(
    corpus: &Corpus,
    alphabets: &AlphabetPair,
    registry: &ElementRegistry,
    segment_seconds: f64,
) -> Result<Vec<EncodedSequence>, CorpusError> {
    corpus
        .videos
        .iter()
        .map(|v| encode_video(v, alphabets, registry, segment_seconds))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_alphabet;
    use std::collections::BTreeSet;

    fn scene(index: usize, start: f64, end: f64) -> Scene {
        Scene {
            index,
            start_sec: start,
            end_sec: end,
            visual: BTreeSet::new(),
            audio: BTreeSet::new(),
        }
    }

    #[test]
    fn segment_indices_follow_midpoints() {
        // Midpoint 7.4 s in a 15 s video with 3 s segments.
        let s = scene(0, 7.0, 7.8);
        assert_eq!(segment_index(&s, 15.0, 3.0), 2);
        assert_eq!(num_segments(15.0, 3.0), 5);
        assert_eq!(num_segments(30.0, 3.0), 10);
        // Midpoint 14.9 s clamps to the last segment.
        let last = scene(0, 14.8, 15.0);
        assert_eq!(segment_index(&last, 15.0, 3.0), 4);
    }

    #[test]
    fn encode_maps_scenes_and_unknown_combos() {
        let reg = ElementRegistry::default();
        let mut sc = scene(0, 0.0, 5.0);
        sc.visual.insert("logo".to_string());
        let video = VideoAnnotation {
            video_id: "v".into(),
            genre: "g".into(),
            duration_sec: 15.0,
            scenes: vec![sc, scene(1, 5.0, 10.0), scene(2, 10.0, 15.0)],
        };
        let corpus = Corpus {
            videos: vec![video.clone()],
        };
        let alphabets = build_alphabet(&corpus, &reg).unwrap();
        let enc = encode_video(&video, &alphabets, &reg, 3.0).unwrap();
        assert_eq!(enc.len(), 3);
        assert_eq!(enc.obs_visual, vec![0, 1, 1]); // V[logo], V[], V[]
        assert_eq!(enc.obs_audio, vec![0, 0, 0]);
        assert_eq!(enc.segment_of, vec![0, 2, 4]);

        // A video with a combination absent from the alphabet hits OOV.
        let mut other = video;
        other.scenes[1].visual.insert("characters".to_string());
        let enc2 = encode_video(&other, &alphabets, &reg, 3.0).unwrap();
        assert_eq!(enc2.obs_visual[1], alphabets.visual.oov_index());
    }
}
