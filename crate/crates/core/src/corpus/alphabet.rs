//! Observation alphabets: canonical symbols for element combinations, one
//! alphabet per modality, with a reserved out-of-vocabulary slot.

use super::{Corpus, CorpusError, ElementRegistry, Modality};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Symbol reserved for visual combinations never seen at alphabet-build time.
pub const OOV_VISUAL: &str = "V[?]";
/// Symbol reserved for audio combinations never seen at alphabet-build time.
pub const OOV_AUDIO: &str = "A[?]";

/// Canonical symbol string for a set of same-modality element ids: ids sorted
/// lexicographically, joined by `|`, wrapped as `V[...]` or `A[...]`. The
/// empty set maps to `V[]` / `A[]`.
pub fn canonical_symbol(
    registry: &ElementRegistry,
    modality: Modality,
    active: &BTreeSet<String>,
) -> Result<String, CorpusError> {
    for id in active {
        match registry.get(id) {
            None => {
                return Err(CorpusError::UnknownElement {
                    video_id: String::new(),
                    element: id.clone(),
                })
            }
            Some(def) if def.modality != modality => {
                return Err(CorpusError::WrongModality {
                    video_id: String::new(),
                    element: id.clone(),
                    expected: modality,
                    actual: def.modality,
                })
            }
            Some(_) => {}
        }
    }
    let prefix = match modality {
        Modality::Visual => 'V',
        Modality::Audio => 'A',
    };
    // BTreeSet iterates in lexicographic order already.
    let joined: Vec<&str> = active.iter().map(String::as_str).collect();
    Ok(format!("{prefix}[{}]", joined.join("|")))
}

/// Dense symbol table for one modality. Index = position; the OOV symbol is
/// always last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = String;

    fn try_from(symbols: Vec<String>) -> Result<Self, String> {
        if symbols.is_empty() {
            return Err("alphabet must not be empty".to_string());
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(format!("duplicate symbol '{s}'"));
            }
        }
        Ok(Self { symbols, index })
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Vec<String> {
        a.symbols
    }
}

impl Alphabet {
    /// Builds from observed symbols in first-occurrence order plus the OOV
    /// symbol appended last.
    fn from_observed(observed: Vec<String>, oov: &str) -> Self {
        let mut symbols = observed;
        symbols.push(oov.to_string());
        Alphabet::try_from(symbols).expect("observed symbols are distinct")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn oov_index(&self) -> usize {
        self.symbols.len() - 1
    }

    /// Index of `symbol`, or the OOV index when unseen.
    pub fn index_of(&self, symbol: &str) -> usize {
        self.index.get(symbol).copied().unwrap_or_else(|| self.oov_index())
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }
}

/// The visual/audio alphabet pair built from a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphabetPair {
    pub visual: Alphabet,
    pub audio: Alphabet,
}

impl AlphabetPair {
    pub fn save(&self, path: &std::path::Path) -> Result<(), CorpusError> {
        let text = serde_json::to_string_pretty(self).expect("alphabet serializes");
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

/// One symbol per distinct canonical combination observed per modality, in
/// first-occurrence order (videos in corpus order, scenes in order), plus the
/// OOV symbol at the last index. Idempotent and order-stable for a fixed
/// corpus.
pub fn build_alphabet(corpus: &Corpus, registry: &ElementRegistry) -> Result<AlphabetPair, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut visual_seen: HashMap<String, usize> = HashMap::new();
    let mut audio_seen: HashMap<String, usize> = HashMap::new();
    let mut visual: Vec<String> = Vec::new();
    let mut audio: Vec<String> = Vec::new();
    for video in &corpus.videos {
        for scene in &video.scenes {
            let vs = canonical_symbol(registry, Modality::Visual, &scene.visual)?;
            if !visual_seen.contains_key(&vs) {
                visual_seen.insert(vs.clone(), visual.len());
                visual.push(vs);
            }
            let au = canonical_symbol(registry, Modality::Audio, &scene.audio)?;
            if !audio_seen.contains_key(&au) {
                audio_seen.insert(au.clone(), audio.len());
                audio.push(au);
            }
        }
    }
    Ok(AlphabetPair {
        visual: Alphabet::from_observed(visual, OOV_VISUAL),
        audio: Alphabet::from_observed(audio, OOV_AUDIO),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Scene, VideoAnnotation};

    fn ids(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn scene(index: usize, start: f64, end: f64, visual: &[&str], audio: &[&str]) -> Scene {
        Scene {
            index,
            start_sec: start,
            end_sec: end,
            visual: ids(visual),
            audio: ids(audio),
        }
    }

    #[test]
    fn canonical_symbol_sorts_and_wraps() {
        let reg = ElementRegistry::default();
        let s = canonical_symbol(&reg, Modality::Visual, &ids(&["logo", "characters"])).unwrap();
        assert_eq!(s, "V[characters|logo]");
        let empty = canonical_symbol(&reg, Modality::Visual, &ids(&[])).unwrap();
        assert_eq!(empty, "V[]");
        let single = canonical_symbol(&reg, Modality::Audio, &ids(&["catchphrase"])).unwrap();
        assert_eq!(single, "A[catchphrase]");
        assert_eq!(canonical_symbol(&reg, Modality::Audio, &ids(&[])).unwrap(), "A[]");
    }

    #[test]
    fn mixed_modality_set_rejected() {
        let reg = ElementRegistry::default();
        let err = canonical_symbol(&reg, Modality::Visual, &ids(&["logo", "catchphrase"])).unwrap_err();
        assert!(matches!(err, CorpusError::WrongModality { .. }));
        let err = canonical_symbol(&reg, Modality::Visual, &ids(&["nope"])).unwrap_err();
        assert!(matches!(err, CorpusError::UnknownElement { .. }));
    }

    #[test]
    fn build_counts_distinct_combos_plus_oov() {
        let reg = ElementRegistry::default();
        let corpus = Corpus {
            videos: vec![VideoAnnotation {
                video_id: "a".into(),
                genre: "g".into(),
                duration_sec: 6.0,
                scenes: vec![
                    scene(0, 0.0, 2.0, &[], &[]),
                    scene(1, 2.0, 4.0, &["logo"], &[]),
                    scene(2, 4.0, 6.0, &[], &[]),
                ],
            }],
        };
        let pair = build_alphabet(&corpus, &reg).unwrap();
        assert_eq!(pair.visual.len(), 3); // V[], V[logo], OOV
        assert_eq!(pair.audio.len(), 2); // A[], OOV
        assert_eq!(pair.visual.oov_index(), 2);
        assert_eq!(pair.visual.symbol(2), OOV_VISUAL);
        // First-occurrence order.
        assert_eq!(pair.visual.index_of("V[]"), 0);
        assert_eq!(pair.visual.index_of("V[logo]"), 1);
        // Unseen combination maps to OOV.
        assert_eq!(pair.visual.index_of("V[characters]"), 2);
    }

    #[test]
    fn build_is_idempotent() {
        let reg = ElementRegistry::default();
        let corpus = Corpus {
            videos: vec![VideoAnnotation {
                video_id: "a".into(),
                genre: "g".into(),
                duration_sec: 4.0,
                scenes: vec![scene(0, 0.0, 2.0, &["product"], &["brand_name"]), scene(1, 2.0, 4.0, &[], &[])],
            }],
        };
        let a = build_alphabet(&corpus, &reg).unwrap();
        let b = build_alphabet(&corpus, &reg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_corpus_rejected() {
        let reg = ElementRegistry::default();
        assert!(matches!(
            build_alphabet(&Corpus::default(), &reg),
            Err(CorpusError::EmptyCorpus)
        ));
    }
}
