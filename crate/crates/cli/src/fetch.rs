use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use crate::args::{DatasetArg, FetchArgs};

pub struct Dataset {
    pub file: &'static str,
    pub url: &'static str,
}

pub const CIT_PATENTS: Dataset = Dataset {
    file: "cit-Patents.txt.gz",
    url: "https://snap.stanford.edu/data/cit-Patents.txt.gz",
};

pub const ORKUT: Dataset = Dataset {
    file: "com-orkut.ungraph.txt.gz",
    url: "https://snap.stanford.edu/data/bigdata/communities/com-orkut.ungraph.txt.gz",
};

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".sha256");
    PathBuf::from(name)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn download(url: &str, dest: &Path) -> Result<String> {
    let partial = dest.with_extension("part");
    let response = ureq::get(url)
        .call()
        .with_context(|| format!("downloading {url}"))?;
    let mut body = response.into_body().into_reader();
    let mut out = BufWriter::new(File::create(&partial)?);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = body.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        out.write_all(&buf[..n])?;
    }
    out.flush()?;
    drop(out);
    fs::rename(&partial, dest)?;
    Ok(hex::encode(hasher.finalize()))
}

/// Compares `actual` against `--sha256` if given, else against the sidecar
/// file; records the digest in the sidecar when there is nothing to compare.
pub fn verify(path: &Path, actual: &str, expected: Option<&str>) -> Result<&'static str> {
    let side = sidecar(path);
    let expected = match expected {
        Some(e) => Some(e.trim().to_lowercase()),
        None if side.exists() => Some(
            fs::read_to_string(&side)?
                .split_whitespace()
                .next()
                .unwrap_or_default()
                .to_lowercase(),
        ),
        None => None,
    };
    match expected {
        Some(e) if e != actual => {
            bail!(
                "checksum mismatch for {}: expected {e}, got {actual}",
                path.display()
            )
        }
        Some(_) => {
            fs::write(&side, format!("{actual}\n"))?;
            Ok("verified")
        }
        None => {
            fs::write(&side, format!("{actual}\n"))?;
            Ok("recorded")
        }
    }
}

pub fn fetch(args: &FetchArgs) -> Result<()> {
    let sets: Vec<&Dataset> = match args.dataset {
        DatasetArg::CitPatents => vec![&CIT_PATENTS],
        DatasetArg::Orkut => vec![&ORKUT],
        DatasetArg::All => vec![&CIT_PATENTS, &ORKUT],
    };
    if args.sha256.is_some() && sets.len() > 1 {
        bail!("--sha256 needs a single --dataset");
    }
    fs::create_dir_all(&args.dir)?;
    for set in sets {
        let dest = args.dir.join(set.file);
        let digest = if dest.exists() && !args.force {
            sha256_file(&dest)?
        } else {
            eprintln!("fetching {}", set.url);
            download(set.url, &dest)?
        };
        let status = verify(&dest, &digest, args.sha256.as_deref())?;
        println!("{}  {}  ({status})", digest, dest.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_records_then_verifies() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt.gz");
        fs::write(&path, b"abc").unwrap();
        let digest = sha256_file(&path).unwrap();
        assert_eq!(
            digest,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(verify(&path, &digest, None).unwrap(), "recorded");
        assert_eq!(verify(&path, &digest, None).unwrap(), "verified");
        fs::write(&path, b"abd").unwrap();
        let changed = sha256_file(&path).unwrap();
        assert!(verify(&path, &changed, None).is_err());
        assert!(verify(&path, &changed, Some(&digest)).is_err());
        assert_eq!(
            verify(&path, &changed, Some(&changed.to_uppercase())).unwrap(),
            "verified"
        );
    }
}
