//! Loading, binarization and iterative p-core filtering of raw interactions.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One (user, item) event from a raw file. Unary datasets carry rating 1.0;
/// timestamps are kept for provenance but ignored by the protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct Interaction {
    pub user: String,
    pub item: String,
    pub rating: f64,
    pub timestamp: Option<i64>,
}

/// A deduplicated list of interactions, in first-appearance order.
#[derive(Clone, Debug, Default)]
pub struct RawDataset {
    pub interactions: Vec<Interaction>,
    /// Number of duplicate (user, item) pairs collapsed at load time.
    /// Policy: the last occurrence wins.
    pub duplicates_collapsed: usize,
}

impl RawDataset {
    pub fn from_interactions(interactions: Vec<Interaction>) -> Self {
        RawDataset {
            interactions,
            duplicates_collapsed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }
}

/// Column layout of a delimiter-separated interaction file.
///
/// `delimiter` may be several characters (MovieLens uses `::`). Column indices
/// are zero-based. A missing rating column means the file is unary and every
/// interaction gets rating 1.0.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct InputFormat {
    pub delimiter: String,
    #[serde(default)]
    pub has_header: bool,
    #[serde(default)]
    pub user_col: usize,
    #[serde(default = "default_item_col")]
    pub item_col: usize,
    #[serde(default)]
    pub rating_col: Option<usize>,
    #[serde(default)]
    pub timestamp_col: Option<usize>,
}

fn default_item_col() -> usize {
    1
}

impl InputFormat {
    /// `user,item,rating,timestamp` comma-separated.
    pub fn csv() -> Self {
        InputFormat {
            delimiter: ",".into(),
            has_header: false,
            user_col: 0,
            item_col: 1,
            rating_col: Some(2),
            timestamp_col: Some(3),
        }
    }

    /// `user<TAB>item<TAB>rating<TAB>timestamp`.
    pub fn tsv() -> Self {
        InputFormat {
            delimiter: "\t".into(),
            ..InputFormat::csv()
        }
    }

    /// `user::item::rating::timestamp`, the MovieLens layout.
    pub fn movielens() -> Self {
        InputFormat {
            delimiter: "::".into(),
            ..InputFormat::csv()
        }
    }

    /// Unary `truster<TAB>trustee` edges; trustees become the item catalog.
    pub fn trust_edges() -> Self {
        InputFormat {
            delimiter: "\t".into(),
            has_header: false,
            user_col: 0,
            item_col: 1,
            rating_col: None,
            timestamp_col: None,
        }
    }

    pub fn unary(mut self) -> Self {
        self.rating_col = None;
        self.timestamp_col = None;
        self
    }

    fn max_col(&self) -> usize {
        self.user_col
            .max(self.item_col)
            .max(self.rating_col.unwrap_or(0))
            .max(self.timestamp_col.unwrap_or(0))
    }
}

/// Reads a delimiter-separated interaction file, collapsing duplicate
/// (user, item) pairs so that the last occurrence wins.
pub fn load_interactions(path: impl AsRef<Path>, format: &InputFormat) -> Result<RawDataset> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut interactions: Vec<Interaction> = Vec::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    let mut duplicates = 0usize;

    let min_fields = format.max_col() + 1;
    for (line_no, line) in content.lines().enumerate() {
        let line_no = line_no + 1;
        if format.has_header && line_no == 1 {
            continue;
        }
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(format.delimiter.as_str()).collect();
        if fields.len() < min_fields {
            return Err(Error::Parse {
                path: path.into(),
                line: line_no,
                message: format!(
                    "expected at least {min_fields} fields separated by {:?}, found {}",
                    format.delimiter,
                    fields.len()
                ),
            });
        }
        let user = fields[format.user_col].trim();
        let item = fields[format.item_col].trim();
        if user.is_empty() || item.is_empty() {
            return Err(Error::Parse {
                path: path.into(),
                line: line_no,
                message: "empty user or item id".into(),
            });
        }
        let rating = match format.rating_col {
            None => 1.0,
            Some(col) => {
                let raw = fields[col].trim();
                let value: f64 = raw.parse().map_err(|_| Error::Parse {
                    path: path.into(),
                    line: line_no,
                    message: format!("invalid rating {raw:?}"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        path: path.into(),
                        line: line_no,
                        message: format!("non-finite rating {raw:?}"),
                    });
                }
                value
            }
        };
        let timestamp = match format.timestamp_col {
            None => None,
            Some(col) => {
                let raw = fields[col].trim();
                Some(raw.parse::<i64>().map_err(|_| Error::Parse {
                    path: path.into(),
                    line: line_no,
                    message: format!("invalid timestamp {raw:?}"),
                })?)
            }
        };

        let key = (user.to_string(), item.to_string());
        match seen.get(&key) {
            Some(&idx) => {
                duplicates += 1;
                interactions[idx].rating = rating;
                interactions[idx].timestamp = timestamp;
            }
            None => {
                seen.insert(key, interactions.len());
                interactions.push(Interaction {
                    user: user.to_string(),
                    item: item.to_string(),
                    rating,
                    timestamp,
                });
            }
        }
    }

    if interactions.is_empty() {
        return Err(Error::EmptyInput { path: path.into() });
    }
    Ok(RawDataset {
        interactions,
        duplicates_collapsed: duplicates,
    })
}

/// Keeps interactions with rating strictly above `threshold` and rewrites the
/// kept ratings to 1.0. Ties at the threshold are dropped.
pub fn binarize(raw: RawDataset, threshold: f64) -> RawDataset {
    let interactions = raw
        .interactions
        .into_iter()
        .filter(|it| it.rating > threshold)
        .map(|mut it| {
            it.rating = 1.0;
            it
        })
        .collect();
    RawDataset {
        interactions,
        duplicates_collapsed: raw.duplicates_collapsed,
    }
}

/// Iteratively removes users and items with fewer than `p` interactions until
/// both constraints hold simultaneously (the unique maximal p-core).
pub fn pcore_filter(raw: RawDataset, p: u32) -> Result<RawDataset> {
    assert!(p >= 1, "p-core requires p >= 1");
    let duplicates = raw.duplicates_collapsed;
    let mut interactions = raw.interactions;
    let p = p as usize;

    loop {
        let mut changed = false;

        let mut user_counts: HashMap<&str, usize> = HashMap::new();
        for it in &interactions {
            *user_counts.entry(it.user.as_str()).or_default() += 1;
        }
        let keep: Vec<bool> = interactions
            .iter()
            .map(|it| user_counts[it.user.as_str()] >= p)
            .collect();
        if keep.iter().any(|k| !k) {
            changed = true;
            let mut idx = 0;
            interactions.retain(|_| {
                let k = keep[idx];
                idx += 1;
                k
            });
        }

        let mut item_counts: HashMap<&str, usize> = HashMap::new();
        for it in &interactions {
            *item_counts.entry(it.item.as_str()).or_default() += 1;
        }
        let keep: Vec<bool> = interactions
            .iter()
            .map(|it| item_counts[it.item.as_str()] >= p)
            .collect();
        if keep.iter().any(|k| !k) {
            changed = true;
            let mut idx = 0;
            interactions.retain(|_| {
                let k = keep[idx];
                idx += 1;
                k
            });
        }

        if !changed {
            break;
        }
        if interactions.is_empty() {
            return Err(Error::DatasetVanished { p: p as u32 });
        }
    }

    if interactions.is_empty() {
        return Err(Error::DatasetVanished { p: p as u32 });
    }
    Ok(RawDataset {
        interactions,
        duplicates_collapsed: duplicates,
    })
}
