//! Expression element registry: which binary elements exist, their modality,
//! and their message-type category.

use super::CorpusError;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Visual,
    Audio,
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modality::Visual => f.write_str("visual"),
            Modality::Audio => f.write_str("audio"),
        }
    }
}

/// Message-type category of an expression element. `Other` marks elements
/// outside the four predefined categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Attract,
    Brand,
    Connect,
    Direct,
    Other,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Attract,
        Category::Brand,
        Category::Connect,
        Category::Direct,
        Category::Other,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Category::Attract => "Attract",
            Category::Brand => "Brand",
            Category::Connect => "Connect",
            Category::Direct => "Direct",
            Category::Other => "Other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDef {
    pub id: String,
    pub modality: Modality,
    pub category: Category,
    pub label: String,
}

/// Validated element registry with unique ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RegistryFile", into = "RegistryFile")]
pub struct ElementRegistry {
    elements: Vec<ElementDef>,
    by_id: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct RegistryFile {
    elements: Vec<ElementDef>,
}

impl TryFrom<RegistryFile> for ElementRegistry {
    type Error = String;

    fn try_from(file: RegistryFile) -> Result<Self, String> {
        ElementRegistry::new(file.elements).map_err(|e| e.to_string())
    }
}

impl From<ElementRegistry> for RegistryFile {
    fn from(reg: ElementRegistry) -> Self {
        RegistryFile {
            elements: reg.elements,
        }
    }
}

impl ElementRegistry {
    pub fn new(elements: Vec<ElementDef>) -> Result<Self, CorpusError> {
        let mut by_id = HashMap::with_capacity(elements.len());
        for (i, el) in elements.iter().enumerate() {
            if by_id.insert(el.id.clone(), i).is_some() {
                return Err(CorpusError::Registry(format!("duplicate element id '{}'", el.id)));
            }
        }
        Ok(Self { elements, by_id })
    }

    pub fn from_path(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CorpusError::Registry(e.to_string()))
    }

    pub fn get(&self, id: &str) -> Option<&ElementDef> {
        self.by_id.get(id).map(|i| &self.elements[*i])
    }

    pub fn elements(&self) -> &[ElementDef] {
        &self.elements
    }

    pub fn ids(&self, modality: Modality) -> Vec<&str> {
        self.elements
            .iter()
            .filter(|e| e.modality == modality)
            .map(|e| e.id.as_str())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn def(id: &str, modality: Modality, category: Category, label: &str) -> ElementDef {
    ElementDef {
        id: id.to_string(),
        modality,
        category,
        label: label.to_string(),
    }
}

impl Default for ElementRegistry {
    /// The stock registry: 8 visual and 9 audio binary expression elements
    /// with their message-type categories.
    fn default() -> Self {
        use Category::*;
        use Modality::*;
        Self::new(vec![
            def("logo", Visual, Brand, "company logo mark on screen"),
            def("product", Visual, Brand, "image of the product"),
            def("characters", Visual, Connect, "people or characters on screen"),
            def("product_closeup", Visual, Attract, "close-up shot of the product"),
            def("character_closeup", Visual, Attract, "close-up shot of people or characters"),
            def("product_text", Visual, Direct, "text describing the product"),
            def("purchase_text", Visual, Direct, "text encouraging purchase"),
            def("motivation_text", Visual, Direct, "text motivating purchase consideration"),
            def("brand_name", Audio, Brand, "brand name spoken"),
            def("product_name", Audio, Brand, "product name spoken"),
            def("company_name", Audio, Brand, "company name spoken"),
            def("product_description", Audio, Direct, "spoken product description"),
            def("purchase_prompt", Audio, Direct, "spoken purchase encouragement"),
            def("purchase_motivation", Audio, Direct, "spoken purchase motivation"),
            def("direct_address", Audio, Connect, "speech addressing the viewer"),
            def("positive_wording", Audio, Connect, "positive feelings or values in speech"),
            def("catchphrase", Audio, Attract, "catchphrase emphasizing appeal"),
        ])
        .expect("stock registry ids are unique")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_shape() {
        let reg = ElementRegistry::default();
        assert_eq!(reg.ids(Modality::Visual).len(), 8);
        assert_eq!(reg.ids(Modality::Audio).len(), 9);
        // Category tallies per modality.
        let count = |m: Modality, c: Category| {
            reg.elements()
                .iter()
                .filter(|e| e.modality == m && e.category == c)
                .count()
        };
        assert_eq!(count(Modality::Visual, Category::Attract), 2);
        assert_eq!(count(Modality::Visual, Category::Brand), 2);
        assert_eq!(count(Modality::Visual, Category::Connect), 1);
        assert_eq!(count(Modality::Visual, Category::Direct), 3);
        assert_eq!(count(Modality::Audio, Category::Attract), 1);
        assert_eq!(count(Modality::Audio, Category::Brand), 3);
        assert_eq!(count(Modality::Audio, Category::Connect), 2);
        assert_eq!(count(Modality::Audio, Category::Direct), 3);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let e = def("x", Modality::Visual, Category::Other, "x");
        assert!(ElementRegistry::new(vec![e.clone(), e]).is_err());
    }

    #[test]
    fn registry_roundtrips_through_json() {
        let reg = ElementRegistry::default();
        let text = serde_json::to_string(&reg).unwrap();
        let back: ElementRegistry = serde_json::from_str(&text).unwrap();
        assert_eq!(back.len(), reg.len());
        assert_eq!(back.get("logo").unwrap().category, Category::Brand);
    }
}
