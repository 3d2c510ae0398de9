//! JSONL corpus ingestion: one `VideoAnnotation` per line, validated against
//! the element registry.

use super::{validate_video, Corpus, CorpusError, ElementRegistry, VideoAnnotation};
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Merge adjacent scenes whose visual and audio element sets are both
    /// identical (the same expression continuing across a scene cut).
    pub merge_adjacent: bool,
}

#[derive(Debug)]
pub struct ParsedCorpus {
    pub corpus: Corpus,
    /// Non-fatal findings (duplicate video ids resolved last-wins).
    pub warnings: Vec<String>,
}

fn merge_adjacent_scenes(video: &mut VideoAnnotation) {
    let scenes = std::mem::take(&mut video.scenes);
    let mut merged: Vec<_> = Vec::with_capacity(scenes.len());
    for scene in scenes {
        match merged.last_mut() {
            Some(prev) if same_expression(prev, &scene) => {
                let prev: &mut super::Scene = prev;
                prev.end_sec = scene.end_sec;
            }
            _ => merged.push(scene),
        }
    }
    for (i, scene) in merged.iter_mut().enumerate() {
        scene.index = i;
    }
    video.scenes = merged;
}

fn same_expression(a: &super::Scene, b: &super::Scene) -> bool {
    a.visual == b.visual && a.audio == b.audio
}

/// Parses newline-delimited JSON from a reader. Duplicate video ids resolve
/// last-wins with a warning; any invariant violation is a hard error naming
/// the video.
pub fn read_corpus(
    reader: impl BufRead,
    registry: &ElementRegistry,
    options: &ParseOptions,
) -> Result<ParsedCorpus, CorpusError> {
    let mut videos: Vec<VideoAnnotation> = Vec::new();
    let mut position: HashMap<String, usize> = HashMap::new();
    let mut duplicates: usize = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut video: VideoAnnotation =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedJson {
                line: lineno + 1,
                detail: e.to_string(),
            })?;
        if options.merge_adjacent {
            merge_adjacent_scenes(&mut video);
        }
        validate_video(&video, registry)?;
        match position.get(&video.video_id) {
            Some(&at) => {
                duplicates += 1;
                videos[at] = video;
            }
            None => {
                position.insert(video.video_id.clone(), videos.len());
                videos.push(video);
            }
        }
    }
    if videos.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut warnings = Vec::new();
    if duplicates > 0 {
        warnings.push(format!("{duplicates} duplicate video_id line(s) resolved last-wins"));
    }
    Ok(ParsedCorpus {
        corpus: Corpus { videos },
        warnings,
    })
}

/// Parses a JSONL string; convenience for tests and the generator round trip.
pub fn read_corpus_str(
    text: &str,
    registry: &ElementRegistry,
    options: &ParseOptions,
) -> Result<ParsedCorpus, CorpusError> {
    read_corpus(text.as_bytes(), registry, options)
}

pub fn parse_corpus(
    path: &Path,
    registry: &ElementRegistry,
    options: &ParseOptions,
) -> Result<ParsedCorpus, CorpusError> {
    let file = std::fs::File::open(path)?;
    read_corpus(BufReader::new(file), registry, options)
}

/// Writes a corpus as JSONL, one video per line, stable field order.
pub fn write_corpus(corpus: &Corpus, mut writer: impl Write) -> Result<(), CorpusError> {
    for video in &corpus.videos {
        let line = serde_json::to_string(video).expect("video serializes");
        writeln!(writer, "{line}")?;
    }
    Ok(())
}
