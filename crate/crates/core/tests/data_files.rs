use std::io::Write;

use copula_gof::experiments::{load_csv, write_csv, CsvData};
use copula_gof::Error;

fn file_with(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn claims_sized_file_with_header() {
    let mut text = String::from("loss,alae\n");
    for i in 0..1466 {
        text.push_str(&format!("{}.5,{}\r\n", 1000 + i * 7, 300 + (i * 13) % 997));
    }
    let f = file_with(&text);
    match load_csv(f.path()).unwrap() {
        CsvData::Single(s) => {
            assert_eq!(s.len(), 1466);
            assert_eq!(s.pairs()[0], (1000.5, 300.0));
        }
        other => panic!("expected one sample, got {other:?}"),
    }
}

#[test]
fn malformed_and_short_files_fail() {
    let f = file_with("1,2\n3,4\n1.0,abc\n5,6\n7,8\n");
    assert!(matches!(
        load_csv(f.path()),
        Err(Error::Parse { line: 3, .. })
    ));
    let f = file_with("1,2\n3,4\n5,6\n");
    assert!(matches!(load_csv(f.path()), Err(Error::Size(_))));
    assert!(load_csv(std::path::Path::new("/nonexistent/data.csv")).is_err());
}

#[test]
fn reload_after_write_is_idempotent() {
    let pairs: Vec<(f64, f64)> = (0..50)
        .map(|i| (0.1 * i as f64 + 1e-17, (i as f64).sqrt()))
        .collect();
    let first = tempfile::NamedTempFile::new().unwrap();
    write_csv(
        std::fs::File::create(first.path()).unwrap(),
        Some(["u", "v"]),
        &pairs,
    )
    .unwrap();
    let loaded = load_csv(first.path()).unwrap();
    let CsvData::Single(sample) = &loaded else {
        panic!("expected one sample")
    };
    assert_eq!(sample.pairs(), pairs.as_slice());
    let second = tempfile::NamedTempFile::new().unwrap();
    write_csv(
        std::fs::File::create(second.path()).unwrap(),
        Some(["u", "v"]),
        sample.pairs(),
    )
    .unwrap();
    assert_eq!(load_csv(second.path()).unwrap(), loaded);
    assert_eq!(
        std::fs::read(first.path()).unwrap(),
        std::fs::read(second.path()).unwrap()
    );
}
