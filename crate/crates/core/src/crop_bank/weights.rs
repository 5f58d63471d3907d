use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::annot_io::LayoutClass;

/// Element counts of the reference five-class distribution
/// (Text, Title, List, Table, Figure).
pub const REFERENCE_COUNTS: [u64; 5] = [95_227, 45_306, 23_090, 22_146, 23_493];

/// Per-class sampling weights, summing to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightTable", into = "WeightTable")]
pub struct ClassWeights([f64; 5]);

impl Default for ClassWeights {
    /// Proportional to [`REFERENCE_COUNTS`].
    fn default() -> Self {
        Self::from_counts(REFERENCE_COUNTS).expect("reference counts are positive")
    }
}

impl ClassWeights {
    /// Weights must be finite, non-negative, and sum to 1 within 1e-9.
    pub fn new(weights: [f64; 5]) -> Result<Self, String> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(format!("weights must be finite and non-negative: {weights:?}"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(format!("weights sum to {sum}, expected 1"));
        }
        Ok(Self(weights))
    }

    /// Normalizes arbitrary non-negative weights.
    pub fn normalized(raw: [f64; 5]) -> Result<Self, String> {
        if raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(format!("weights must be finite and non-negative: {raw:?}"));
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err("at least one class needs a positive weight".into());
        }
        Ok(Self(raw.map(|w| w / sum)))
    }

    pub fn from_counts(counts: [u64; 5]) -> Result<Self, String> {
        Self::normalized(counts.map(|c| c as f64))
    }

    /// All weight on one class.
    pub fn only(class: LayoutClass) -> Self {
        let mut w = [0.0; 5];
        w[class.index()] = 1.0;
        Self(w)
    }

    pub fn weight(&self, class: LayoutClass) -> f64 {
        self.0[class.index()]
    }

    pub fn as_array(&self) -> [f64; 5] {
        self.0
    }

    pub fn positive_classes(&self) -> impl Iterator<Item = LayoutClass> + '_ {
        LayoutClass::ALL.into_iter().filter(|c| self.weight(*c) > 0.0)
    }
}

/// Inverse-CDF draw over the fixed class order Text, Title, List, Table,
/// Figure. Consumes exactly one `f64` from `rng`.
pub fn sample_class<R: Rng + ?Sized>(weights: &ClassWeights, rng: &mut R) -> LayoutClass {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for class in LayoutClass::ALL {
        let w = weights.weight(class);
        if w <= 0.0 {
            continue;
        }
        cumulative += w;
        last_positive = Some(class);
        if u < cumulative {
            return class;
        }
    }
    // u landed in the rounding slack above the final cumulative sum
    last_positive.expect("weights have a positive entry")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightTable {
    #[serde(default)]
    text: f64,
    #[serde(default)]
    title: f64,
    #[serde(default)]
    list: f64,
    #[serde(default)]
    table: f64,
    #[serde(default)]
    figure: f64,
}

impl TryFrom<WeightTable> for ClassWeights {
    type Error = String;

    fn try_from(t: WeightTable) -> Result<Self, Self::Error> {
        ClassWeights::normalized([t.text, t.title, t.list, t.table, t.figure])
    }
}

impl From<ClassWeights> for WeightTable {
    fn from(w: ClassWeights) -> Self {
        let [text, title, list, table, figure] = w.0;
        WeightTable {
            text,
            title,
            list,
            table,
            figure,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation() {
        assert!(ClassWeights::new([0.2; 5]).is_ok());
        assert!(ClassWeights::new([0.3; 5]).is_err());
        assert!(ClassWeights::new([1.5, -0.5, 0.0, 0.0, 0.0]).is_err());
        assert!(ClassWeights::normalized([0.0; 5]).is_err());
        let w = ClassWeights::normalized([2.0, 2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(w.as_array(), [0.5, 0.5, 0.0, 0.0, 0.0]);
        let sum: f64 = ClassWeights::default().as_array().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = ClassWeights::only(LayoutClass::Text);
        assert!((0..1000).all(|_| sample_class(&w, &mut rng) == LayoutClass::Text));
        let w = ClassWeights::only(LayoutClass::Figure);
        assert!((0..1000).all(|_| sample_class(&w, &mut rng) == LayoutClass::Figure));
    }

    #[test]
    fn zero_weight_never_drawn() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = ClassWeights::normalized([1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        for _ in 0..10_000 {
            let c = sample_class(&w, &mut rng);
            assert!(c != LayoutClass::Title && c != LayoutClass::Table);
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let w = ClassWeights::default();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200).map(|_| sample_class(&w, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn toml_table_round_trip() {
        let w: ClassWeights = toml::from_str::<toml::Table>("text = 3\nfigure = 1\n")
            .unwrap()
            .try_into()
            .unwrap();
        assert_eq!(w.as_array(), [0.75, 0.0, 0.0, 0.0, 0.25]);
    }
}
