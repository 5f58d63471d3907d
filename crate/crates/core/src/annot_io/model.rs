use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;

/// The five layout classes, in their canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutClass {
    Text,
    Title,
    List,
    Table,
    Figure,
}

impl LayoutClass {
    pub const ALL: [LayoutClass; 5] = [
        LayoutClass::Text,
        LayoutClass::Title,
        LayoutClass::List,
        LayoutClass::Table,
        LayoutClass::Figure,
    ];
    pub const COUNT: usize = 5;

    /// Position in [`LayoutClass::ALL`].
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            LayoutClass::Text => "text",
            LayoutClass::Title => "title",
            LayoutClass::List => "list",
            LayoutClass::Table => "table",
            LayoutClass::Figure => "figure",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            LayoutClass::Text => "Text",
            LayoutClass::Title => "Title",
            LayoutClass::List => "List",
            LayoutClass::Table => "Table",
            LayoutClass::Figure => "Figure",
        }
    }
}

impl fmt::Display for LayoutClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for LayoutClass {
    type Err = String;

    /// Case-insensitive match on the canonical names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        LayoutClass::ALL
            .into_iter()
            .find(|c| c.name() == lower)
            .ok_or_else(|| format!("unknown layout class '{s}'"))
    }
}

/// One value per layout class, serialized as a map keyed by class name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PerClass<T>(pub [T; 5]);

impl<T> PerClass<T> {
    pub fn get(&self, class: LayoutClass) -> &T {
        &self.0[class.index()]
    }

    pub fn get_mut(&mut self, class: LayoutClass) -> &mut T {
        &mut self.0[class.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (LayoutClass, &T)> {
        LayoutClass::ALL.into_iter().zip(self.0.iter())
    }
}

impl<T: Serialize> Serialize for PerClass<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(5))?;
        for (class, v) in self.iter() {
            map.serialize_entry(class.name(), v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de> + Default> Deserialize<'de> for PerClass<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<LayoutClass, T>::deserialize(deserializer)?;
        let mut out: [T; 5] = Default::default();
        for (class, v) in map {
            out[class.index()] = v;
        }
        Ok(PerClass(out))
    }
}

/// Bijection between layout classes and the integer ids used on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMap {
    ids: BTreeMap<LayoutClass, u32>,
}

impl Default for ClassMap {
    /// Text=0, Title=1, List=2, Table=3, Figure=4.
    fn default() -> Self {
        Self {
            ids: LayoutClass::ALL
                .into_iter()
                .map(|c| (c, c.index() as u32))
                .collect(),
        }
    }
}

impl ClassMap {
    /// Fails when two classes share an id.
    pub fn new(pairs: impl IntoIterator<Item = (LayoutClass, u32)>) -> Result<Self, String> {
        let mut ids = BTreeMap::new();
        let mut seen = BTreeMap::new();
        for (class, id) in pairs {
            if let Some(other) = seen.insert(id, class) {
                if other != class {
                    return Err(format!("id {id} assigned to both {other} and {class}"));
                }
            }
            if let Some(prev) = ids.insert(class, id) {
                if prev != id {
                    return Err(format!("{class} assigned to both {prev} and {id}"));
                }
            }
        }
        Ok(Self { ids })
    }

    pub fn id(&self, class: LayoutClass) -> Option<u32> {
        self.ids.get(&class).copied()
    }

    pub fn class(&self, id: u32) -> Option<LayoutClass> {
        self.ids.iter().find(|(_, &v)| v == id).map(|(&c, _)| c)
    }

    pub fn contains(&self, class: LayoutClass) -> bool {
        self.ids.contains_key(&class)
    }

    pub fn iter(&self) -> impl Iterator<Item = (LayoutClass, u32)> + '_ {
        self.ids.iter().map(|(&c, &i)| (c, i))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Where a crop or generated element came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub image_path: String,
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutElement {
    pub bbox: BBox,
    pub label: LayoutClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Provenance>,
}

impl LayoutElement {
    pub fn new(bbox: BBox, label: LayoutClass) -> Self {
        Self {
            bbox,
            label,
            source: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedPage {
    /// Image location relative to the dataset's image root.
    pub image_path: String,
    pub width: u32,
    pub height: u32,
    pub elements: Vec<LayoutElement>,
}

impl AnnotatedPage {
    pub fn new(image_path: impl Into<String>, width: u32, height: u32) -> Self {
        Self {
            image_path: image_path.into(),
            width,
            height,
            elements: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub pages: Vec<AnnotatedPage>,
    pub class_map: ClassMap,
}

impl Dataset {
    pub fn new(pages: Vec<AnnotatedPage>, class_map: ClassMap) -> Self {
        Self { pages, class_map }
    }

    pub fn element_count(&self) -> usize {
        self.pages.iter().map(|p| p.elements.len()).sum()
    }

    pub fn page(&self, image_path: &str) -> Option<&AnnotatedPage> {
        self.pages.iter().find(|p| p.image_path == image_path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_names_parse_case_insensitively() {
        assert_eq!("TABLE".parse::<LayoutClass>(), Ok(LayoutClass::Table));
        assert_eq!(" figure ".parse::<LayoutClass>(), Ok(LayoutClass::Figure));
        assert!("caption".parse::<LayoutClass>().is_err());
    }

    #[test]
    fn default_class_map() {
        let m = ClassMap::default();
        assert_eq!(m.id(LayoutClass::Text), Some(0));
        assert_eq!(m.id(LayoutClass::Figure), Some(4));
        assert_eq!(m.class(3), Some(LayoutClass::Table));
        assert_eq!(m.class(5), None);
    }

    #[test]
    fn class_map_rejects_non_bijection() {
        assert!(ClassMap::new([(LayoutClass::Text, 1), (LayoutClass::Title, 1)]).is_err());
        assert!(ClassMap::new([(LayoutClass::Text, 1), (LayoutClass::Text, 2)]).is_err());
        assert!(ClassMap::new([(LayoutClass::Text, 1), (LayoutClass::Title, 2)]).is_ok());
    }
}
