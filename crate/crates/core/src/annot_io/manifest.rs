//! Source manifest CSV.
//!
//! Schema (header row mandatory, UTF-8, comma-separated):
//!
//! ```text
//! image_path,image_width,image_height,class_label,x_min,y_min,x_max,y_max
//! ```
//!
//! Rows are grouped into pages by `image_path`, in order of first
//! appearance. Line numbers in errors are 1-based file lines (the header is
//! line 1).

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{fit_to_page, AnnotError, AnnotatedPage, BoxIssue, ClassMap, Dataset, LayoutClass, LayoutElement};

pub const MANIFEST_HEADER: [&str; 8] = [
    "image_path",
    "image_width",
    "image_height",
    "class_label",
    "x_min",
    "y_min",
    "x_max",
    "y_max",
];

pub fn parse_manifest(path: impl AsRef<Path>) -> Result<Dataset, AnnotError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AnnotError::io(path, e))?;
    parse_manifest_reader(file)
}

pub fn parse_manifest_reader<R: Read>(reader: R) -> Result<Dataset, AnnotError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != MANIFEST_HEADER {
        return Err(AnnotError::BadHeader {
            expected: MANIFEST_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut pages: Vec<AnnotatedPage> = Vec::new();
    let mut page_index: HashMap<String, usize> = HashMap::new();

    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_error(e, i as u64 + 2))?;
        let line = record.position().map_or(i as u64 + 2, |p| p.line());
        if record.len() != MANIFEST_HEADER.len() {
            return Err(AnnotError::MalformedRow {
                line,
                message: format!("expected {} columns, found {}", MANIFEST_HEADER.len(), record.len()),
            });
        }

        let image_path = &record[0];
        if image_path.is_empty() {
            return Err(AnnotError::MalformedRow {
                line,
                message: "empty image_path".into(),
            });
        }
        let width = parse_dim(&record[1], line)?;
        let height = parse_dim(&record[2], line)?;
        let label: LayoutClass = record[3]
            .parse()
            .map_err(|_| AnnotError::UnknownClassLabel {
                line,
                label: record[3].to_string(),
            })?;
        let mut coords = [0.0; 4];
        for (k, slot) in coords.iter_mut().enumerate() {
            let field = &record[4 + k];
            *slot = field.parse().map_err(|_| AnnotError::MalformedRow {
                line,
                message: format!("column {} is not a number: '{field}'", MANIFEST_HEADER[4 + k]),
            })?;
        }
        let bbox = fit_to_page(coords, width, height).map_err(|issue| match issue {
            BoxIssue::NegativeOrInverted => AnnotError::NegativeOrInvertedBox { line, coords },
            BoxIssue::OutOfPage => AnnotError::BoxOutOfPage {
                line,
                coords,
                width,
                height,
            },
        })?;

        let idx = match page_index.get(image_path) {
            Some(&idx) => {
                let page = &pages[idx];
                if (page.width, page.height) != (width, height) {
                    return Err(AnnotError::MalformedRow {
                        line,
                        message: format!(
                            "{image_path} declared as {width}x{height}, earlier rows say {}x{}",
                            page.width, page.height
                        ),
                    });
                }
                idx
            }
            None => {
                pages.push(AnnotatedPage::new(image_path, width, height));
                page_index.insert(image_path.to_string(), pages.len() - 1);
                pages.len() - 1
            }
        };
        pages[idx].elements.push(LayoutElement::new(bbox, label));
    }

    Ok(Dataset::new(pages, ClassMap::default()))
}

/// Writes one row per element. Pages without elements have no rows and are
/// therefore not represented.
pub fn write_manifest(d: &Dataset, path: impl AsRef<Path>) -> Result<(), AnnotError> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(&MANIFEST_HEADER.join(","));
    out.push('\n');
    for page in &d.pages {
        let image_path = quote_field(&page.image_path);
        for el in &page.elements {
            let [x0, y0, x1, y1] = el.bbox.to_xyxy();
            out.push_str(&format!(
                "{image_path},{},{},{},{x0},{y0},{x1},{y1}\n",
                page.width,
                page.height,
                el.label.name()
            ));
        }
    }
    let mut f = File::create(path).map_err(|e| AnnotError::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| AnnotError::io(path, e))
}

fn quote_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.trim() != s {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn parse_dim(field: &str, line: u64) -> Result<u32, AnnotError> {
    if field.is_empty() {
        return Err(AnnotError::MissingImageDimension { line });
    }
    match field.parse::<u32>() {
        Ok(0) => Err(AnnotError::MissingImageDimension { line }),
        Ok(v) => Ok(v),
        Err(_) => Err(AnnotError::MalformedRow {
            line,
            message: format!("image dimension is not a positive integer: '{field}'"),
        }),
    }
}

fn csv_error(e: csv::Error, fallback_line: u64) -> AnnotError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => AnnotError::Io {
            path: "<manifest>".into(),
            source,
        },
        kind => AnnotError::MalformedRow {
            line,
            message: format!("{kind:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "image_path,image_width,image_height,class_label,x_min,y_min,x_max,y_max\n";

    fn parse(body: &str) -> Result<Dataset, AnnotError> {
        parse_manifest_reader(format!("{HEADER}{body}").as_bytes())
    }

    #[test]
    fn groups_rows_by_image() {
        let d = parse("a.png,800,600,Text,10,10,100,50\na.png,800,600,table,10,60,400,300\n").unwrap();
        assert_eq!(d.pages.len(), 1);
        let page = &d.pages[0];
        assert_eq!((page.width, page.height), (800, 600));
        assert_eq!(page.elements.len(), 2);
        assert_eq!(page.elements[0].label, LayoutClass::Text);
        assert_eq!(page.elements[1].label, LayoutClass::Table);
        assert_eq!(page.elements[1].bbox.to_xyxy(), [10.0, 60.0, 400.0, 300.0]);
    }

    #[test]
    fn empty_manifest_is_empty_dataset() {
        let d = parse("").unwrap();
        assert!(d.pages.is_empty());
    }

    #[test]
    fn inverted_box_names_line() {
        let err = parse("a.png,800,600,Text,10,10,100,50\na.png,800,600,Text,100,10,50,50\n").unwrap_err();
        assert!(matches!(err, AnnotError::NegativeOrInvertedBox { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(
            parse("a.png,800,600,Caption,10,10,100,50\n").unwrap_err(),
            AnnotError::UnknownClassLabel { line: 2, .. }
        ));
        assert!(matches!(
            parse("a.png,,600,Text,10,10,100,50\n").unwrap_err(),
            AnnotError::MissingImageDimension { line: 2 }
        ));
        assert!(matches!(
            parse("a.png,800,600,Text,10,10,100\n").unwrap_err(),
            AnnotError::MalformedRow { line: 2, .. }
        ));
        assert!(matches!(
            parse("a.png,800,600,Text,10,ten,100,50\n").unwrap_err(),
            AnnotError::MalformedRow { line: 2, .. }
        ));
        assert!(matches!(
            parse("a.png,800,600,Text,10,10,900,50\n").unwrap_err(),
            AnnotError::BoxOutOfPage { line: 2, .. }
        ));
        assert!(matches!(
            parse("a.png,800,600,Text,0,0,10,10\na.png,801,600,Text,0,0,10,10\n").unwrap_err(),
            AnnotError::MalformedRow { line: 3, .. }
        ));
        assert!(matches!(
            parse_manifest_reader("path,w,h\n".as_bytes()).unwrap_err(),
            AnnotError::BadHeader { .. }
        ));
    }

    #[test]
    fn clamps_half_pixel_overshoot() {
        let d = parse("a.png,800,600,Figure,0,0,800.5,600\n").unwrap();
        assert_eq!(d.pages[0].elements[0].bbox.x_max(), 800.0);
    }

    #[test]
    fn write_then_parse() {
        let d = parse("a b.png,800,600,Text,10.25,10,100,50\n\"c,d.png\",80,60,figure,0,0,80,60\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_manifest(&d, &p).unwrap();
        assert_eq!(parse_manifest(&p).unwrap(), d);
    }
}
