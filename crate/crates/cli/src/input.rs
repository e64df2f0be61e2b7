use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use setfusion::constructions::{parse_certificate, Certificate};
use setfusion::sets::{DiscreteSpace, Subset};
use setfusion::spaces::{catalog_target, space_from_descriptor, SpaceKind};

/// Anything wrong with what the user passed in (exit code 1).
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub fn fail<T>(msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError(msg.into()))
}

pub fn space(descriptor: &str) -> Result<Arc<DiscreteSpace>, InputError> {
    Ok(Arc::new(space_from_descriptor(descriptor)?))
}

pub fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// A file path, a catalog name (`neq:4`, `chess:5x5`) or a 0/1 string.
pub fn target(spec: &str, space: &DiscreteSpace) -> Result<Subset, InputError> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(space.parse_subset(&read(path)?)?);
    }
    if spec.contains(':') {
        return Ok(catalog_target(spec, space)?);
    }
    Ok(space.parse_subset(spec)?)
}

pub fn certificate(path: &Path) -> Result<Certificate, InputError> {
    Ok(parse_certificate(&read(path)?)?)
}

/// Rejects a `--space` flag that disagrees with a certificate header.
pub fn check_space(flag: Option<&str>, space: &DiscreteSpace) -> Result<(), InputError> {
    match flag {
        Some(d) if Some(d.parse::<SpaceKind>()?) != space.kind() => {
            fail(format!("--space {d} does not match the certificate"))
        }
        _ => Ok(()),
    }
}

/// `"1,2,3;2,3,1"` into rule triples.
pub fn rules(text: &str) -> Result<Vec<(usize, usize, usize)>, InputError> {
    text.split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| {
            let parts: Vec<usize> = r
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| InputError(format!("malformed rule {r:?}")))?;
            match parts[..] {
                [a, b, c] => Ok((a, b, c)),
                _ => fail(format!("rule {r:?} needs three entries")),
            }
        })
        .collect()
}
