//! Landmark table: UTF-8 CSV `image_id,landmark_index,x,y` with 1-based
//! landmark indices and decimal pixel coordinates.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::landmarks::LandmarkSet;
use crate::point::Point2;

pub const LANDMARK_TABLE_HEADER: [&str; 4] = ["image_id", "landmark_index", "x", "y"];

/// Parses a landmark table into one set per image, sorted by `image_id`.
/// Every image must list landmarks `1..=N` with the same N.
pub fn read_landmark_table<R: Read>(r: R) -> Result<Vec<LandmarkSet>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(r);
    let header = rdr.headers().map_err(|e| csv_error(&e, 1))?.clone();
    if header.iter().ne(LANDMARK_TABLE_HEADER) {
        return Err(Error::MalformedRow {
            line: 1,
            msg: format!("header must be {}", LANDMARK_TABLE_HEADER.join(",")),
        });
    }

    let mut images: BTreeMap<String, BTreeMap<usize, Point2>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(&e, 0))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |msg: String| Error::MalformedRow { line, msg };
        if rec.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", rec.len())));
        }
        let image_id = rec[0].to_string();
        if image_id.is_empty() {
            return Err(bad("empty image_id".into()));
        }
        let index: usize = rec[1]
            .parse()
            .map_err(|_| bad(format!("landmark_index {:?} is not a positive integer", &rec[1])))?;
        if index == 0 {
            return Err(bad("landmark_index is 1-based".into()));
        }
        let coord = |s: &str, name: &str| -> Result<f64> {
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(bad(format!("{name} {s:?} is not a finite number"))),
            }
        };
        let p = Point2::new(coord(&rec[2], "x")?, coord(&rec[3], "y")?);
        match images.entry(image_id.clone()).or_default().entry(index) {
            Entry::Occupied(_) => return Err(Error::DuplicateKey { image_id, index }),
            Entry::Vacant(v) => {
                v.insert(p);
            }
        }
    }

    let mut out = Vec::with_capacity(images.len());
    let mut expected: Option<usize> = None;
    for (image_id, pts) in images {
        let n = pts.len();
        if let Some((&last, _)) = pts.last_key_value() {
            if last != n {
                return Err(Error::InvalidInput(format!(
                    "image {image_id}: landmark indices are not 1..={n}"
                )));
            }
        }
        match expected {
            None => expected = Some(n),
            Some(e) if e != n => {
                return Err(Error::InvalidInput(format!(
                    "image {image_id} has {n} landmarks, others have {e}"
                )))
            }
            _ => {}
        }
        out.push(LandmarkSet::new(image_id, pts.into_values().collect()));
    }
    Ok(out)
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::MalformedRow {
        line,
        msg: e.to_string(),
    }
}

/// Writes rows sorted by `image_id`, then landmark index.
pub fn write_landmark_table<W: Write>(w: W, sets: &[LandmarkSet]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let io_err = |e: csv::Error| Error::io("<landmark table>", std::io::Error::other(e));
    wtr.write_record(LANDMARK_TABLE_HEADER).map_err(io_err)?;
    let mut order: Vec<&LandmarkSet> = sets.iter().collect();
    order.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    for s in order {
        for (i, p) in s.points.iter().enumerate() {
            wtr.write_record([
                s.image_id.as_str(),
                &(i + 1).to_string(),
                &p.x.to_string(),
                &p.y.to_string(),
            ])
            .map_err(io_err)?;
        }
    }
    wtr.flush().map_err(|e| Error::io("<landmark table>", e))
}

pub fn load_landmark_table(path: impl AsRef<Path>) -> Result<Vec<LandmarkSet>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_landmark_table(std::io::BufReader::new(f))
}

pub fn save_landmark_table(path: impl AsRef<Path>, sets: &[LandmarkSet]) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_landmark_table(std::io::BufWriter::new(f), sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<LandmarkSet>> {
        read_landmark_table(s.as_bytes())
    }

    #[test]
    fn one_image_two_landmarks() {
        let sets = parse("image_id,landmark_index,x,y\nimg1,1,10,20\nimg1,2,123.45,7\n").unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].points.len(), 2);
        assert_eq!(sets[0].points[1].x, 123.45);
    }

    #[test]
    fn rows_may_come_in_any_order() {
        let sets = parse("image_id,landmark_index,x,y\nb,2,1,1\na,1,0,0\nb,1,0,0\na,2,3,3\n").unwrap();
        let ids: Vec<&str> = sets.iter().map(|s| s.image_id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(sets[1].points[1], Point2::new(1., 1.));
    }

    #[test]
    fn duplicate_key_is_named() {
        let err = parse("image_id,landmark_index,x,y\nimg1,1,0,0\nimg1,1,5,5\n").unwrap_err();
        match err {
            Error::DuplicateKey { image_id, index } => assert_eq!((image_id.as_str(), index), ("img1", 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_rows_report_line() {
        let err = parse("image_id,landmark_index,x,y\nimg1,1,0,0\nimg1,2,abc,0\n").unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 3, .. }), "{err:?}");
        assert!(matches!(parse("id,k,x,y\n"), Err(Error::MalformedRow { line: 1, .. })));
        assert!(matches!(
            parse("image_id,landmark_index,x,y\nimg1,0,0,0\n"),
            Err(Error::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            parse("image_id,landmark_index,x,y\nimg1,1,0\n"),
            Err(Error::MalformedRow { .. })
        ));
    }

    #[test]
    fn gaps_and_inconsistent_counts() {
        assert!(parse("image_id,landmark_index,x,y\na,1,0,0\na,3,0,0\n").is_err());
        assert!(parse("image_id,landmark_index,x,y\na,1,0,0\na,2,0,0\nb,1,0,0\n").is_err());
    }

    #[test]
    fn write_is_canonical() {
        let sets = vec![
            LandmarkSet::new("b", vec![Point2::new(1.5, -2.0)]),
            LandmarkSet::new("a", vec![Point2::new(0.1, 123.45)]),
        ];
        let mut buf = Vec::new();
        write_landmark_table(&mut buf, &sets).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "image_id,landmark_index,x,y\na,1,0.1,123.45\nb,1,1.5,-2\n"
        );
    }
}
