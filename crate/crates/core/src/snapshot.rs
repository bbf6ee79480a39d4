//! `NLSX1` field snapshots: an ASCII header followed by little-endian `f64` pairs.
//!
//! ```text
//! NLSX1
//! n=<int>
//! L=<float>
//! t=<float>
//! mu=<0|1>
//! <blank line>
//! n*n*2 little-endian f64 (re, im), row-major
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::grid::{Field, Grid2D};
use crate::kernels::Mu;

pub const MAGIC: &str = "NLSX1";

/// Serializes `field` with its `mu` tag.
pub fn encode(field: &Field, mu: Mu) -> Vec<u8> {
    let g = field.grid();
    let header = format!(
        "{MAGIC}\nn={}\nL={}\nt={}\nmu={}\n\n",
        g.n(),
        g.half_width(),
        field.time(),
        mu
    );
    let mut out = Vec::with_capacity(header.len() + 16 * field.values().len());
    out.extend_from_slice(header.as_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn header_line<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a str> {
    let rest = &bytes[*pos..];
    let end = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| NlsError::MalformedHeader("unterminated header line".into()))?;
    let line = std::str::from_utf8(&rest[..end])
        .map_err(|_| NlsError::MalformedHeader("header is not ASCII".into()))?;
    *pos += end + 1;
    Ok(line)
}

fn keyed<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| NlsError::MalformedHeader(format!("expected `{key}=`, found {line:?}")))
}

/// Parses an `NLSX1` byte stream.
pub fn decode(bytes: &[u8]) -> Result<(Field, Mu)> {
    let mut pos = 0;
    let magic = header_line(bytes, &mut pos)?;
    if magic != MAGIC {
        return Err(NlsError::MalformedHeader(format!("bad magic {magic:?}")));
    }
    let n_text = keyed(header_line(bytes, &mut pos)?, "n")?;
    let n: usize = n_text
        .parse()
        .map_err(|_| NlsError::MalformedHeader(format!("n={n_text} is not an integer")))?;
    if n < 16 || !n.is_power_of_two() {
        return Err(NlsError::MalformedHeader(format!("n={n} is not a power of two >= 16")));
    }
    let parse_f = |key: &str, text: &str| -> Result<f64> {
        text.parse::<f64>()
            .map_err(|_| NlsError::MalformedHeader(format!("{key}={text} is not a number")))
    };
    let l_text = keyed(header_line(bytes, &mut pos)?, "L")?;
    let half_width = parse_f("L", l_text)?;
    let t_text = keyed(header_line(bytes, &mut pos)?, "t")?;
    let time = parse_f("t", t_text)?;
    let mu_text = keyed(header_line(bytes, &mut pos)?, "mu")?;
    let mu = match mu_text {
        "0" => Mu::Zero,
        "1" => Mu::One,
        other => return Err(NlsError::MalformedHeader(format!("mu={other}"))),
    };
    if !header_line(bytes, &mut pos)?.is_empty() {
        return Err(NlsError::MalformedHeader("missing blank line after header".into()));
    }
    let grid = Grid2D::new(n, half_width).map_err(|e| NlsError::MalformedHeader(e.to_string()))?;
    let need = n * n * 16;
    let payload = &bytes[pos..];
    if payload.len() < need {
        return Err(NlsError::TruncatedPayload(bytes.len()));
    }
    if payload.len() > need {
        return Err(NlsError::MalformedHeader(format!(
            "{} trailing bytes after payload",
            payload.len() - need
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Ok((Field::new(grid, values, time)?, mu))
}

/// Writes atomically through a temporary file in the same directory.
pub fn save_snapshot(field: &Field, mu: Mu, path: &Path) -> Result<()> {
    let bytes = encode(field, mu);
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<(Field, Mu)> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn header_layout() {
        let g = make_grid(16, 1.5).unwrap();
        let f = Field::zeros(&g).with_time(0.25);
        let bytes = encode(&f, Mu::One);
        let head = "NLSX1\nn=16\nL=1.5\nt=0.25\nmu=1\n\n";
        assert!(bytes.starts_with(head.as_bytes()));
        assert_eq!(bytes.len(), head.len() + 16 * 16 * 16);
    }

    #[test]
    fn rejects_bad_inputs() {
        let good = encode(&Field::zeros(&make_grid(16, 2.0).unwrap()), Mu::Zero);
        let bad_n = String::from_utf8_lossy(&good[..30]).replace("n=16", "n=17");
        assert!(matches!(decode(bad_n.as_bytes()), Err(NlsError::MalformedHeader(_))));
        let cut = &good[..good.len() - 5];
        assert_eq!(decode(cut).unwrap_err(), NlsError::TruncatedPayload(cut.len()));
        assert!(matches!(decode(b"NLSX2\n"), Err(NlsError::MalformedHeader(_))));
    }
}
