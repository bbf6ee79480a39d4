use nlsx_core::snapshot::{decode, encode};
use nlsx_core::*;
use num_complex::Complex64;

fn sample(n: usize) -> Field {
    let g = make_grid(n, 4.0).unwrap();
    Field::from_fn(&g, |x, y| Complex64::new((-(x * x + y * y)).exp(), 0.1 * x * y)).unwrap().with_time(1.5)
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("nlsx-snapshot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn save_then_load_gives_identical_bytes() {
    let f = sample(32);
    let path = scratch("a.nlsx");
    save_snapshot(&f, Mu::One, &path).unwrap();
    let on_disk = std::fs::read(&path).unwrap();
    assert_eq!(on_disk, encode(&f, Mu::One));
    let (back, mu) = load_snapshot(&path).unwrap();
    assert_eq!(mu, Mu::One);
    assert_eq!(back, f);
    save_snapshot(&back, mu, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), on_disk);
    let leftovers: Vec<_> = std::fs::read_dir(path.parent().unwrap())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains("tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn truncated_payload_reports_length() {
    let bytes = encode(&sample(16), Mu::Zero);
    let cut = &bytes[..bytes.len() - 17];
    let err = decode(cut).unwrap_err();
    assert_eq!(err, NlsError::TruncatedPayload(cut.len()));
    assert_eq!(err.to_string(), format!("truncated payload at byte {}", cut.len()));
}

#[test]
fn header_with_bad_n_is_rejected() {
    let bytes = encode(&sample(16), Mu::Zero);
    let text = String::from_utf8_lossy(&bytes[..20]).replace("n=16", "n=17");
    let mut bad = text.into_bytes();
    bad.extend_from_slice(&bytes[20..]);
    assert!(matches!(decode(&bad), Err(NlsError::MalformedHeader(_))));
}

#[test]
fn trailing_bytes_are_rejected() {
    let mut bytes = encode(&sample(16), Mu::Zero);
    bytes.push(0);
    assert!(matches!(decode(&bytes), Err(NlsError::MalformedHeader(_))));
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_snapshot(&scratch("absent.nlsx")), Err(NlsError::Io(_))));
}
