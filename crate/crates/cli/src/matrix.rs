//! Loading unitaries from files or generator strings.

use std::collections::BTreeMap;

use resource_engine::coherence::{examples, fourier, fractional_fourier, UnitaryMatrix};
use resource_engine::matrix_io::parse_matrix;
use resource_engine::rng::rng_for;

use crate::config::{Loaded, MatrixSource};
use crate::error::{CliError, CliResult};

pub const GENERATORS: &str = "two_step_dense_6, block_diagonal_4, interleaved_blocks_4, \
cyclic_shift_4, permuted_blocks_4, identity d=N, fourier d=N [alpha=X], \
qubit_family phi=X [a=Y b=Z], haar d=N";

fn args(rest: &[&str]) -> CliResult<BTreeMap<String, f64>> {
    rest.iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                CliError::Config(format!("generator argument `{kv}` is not key=value"))
            })?;
            let x: f64 = v.parse().map_err(|_| {
                CliError::Config(format!("generator argument `{kv}` is not a number"))
            })?;
            Ok((k.to_string(), x))
        })
        .collect()
}

fn take(a: &mut BTreeMap<String, f64>, key: &str) -> Option<f64> {
    a.remove(key)
}

fn dim(a: &mut BTreeMap<String, f64>, name: &str) -> CliResult<usize> {
    let d =
        take(a, "d").ok_or_else(|| CliError::Config(format!("generator `{name}` needs d=N")))?;
    if d.fract() != 0.0 || !(1.0..=64.0).contains(&d) {
        return Err(CliError::Config(format!(
            "generator `{name}`: d must be an integer in 1..=64"
        )));
    }
    Ok(d as usize)
}

/// Builds the matrix named by `spec`; `index` picks one of several random
/// draws from the same seed.
pub fn generate(spec: &str, seed: u64, index: u64) -> CliResult<UnitaryMatrix> {
    let words: Vec<&str> = spec.split_whitespace().collect();
    let Some((&name, rest)) = words.split_first() else {
        return Err(CliError::Config("empty generator".into()));
    };
    let mut a = args(rest)?;
    let u = match name {
        "two_step_dense_6" => examples::two_step_dense_6(),
        "block_diagonal_4" => examples::block_diagonal_4(),
        "interleaved_blocks_4" => examples::interleaved_blocks_4(),
        "cyclic_shift_4" => examples::cyclic_shift_4(),
        "permuted_blocks_4" => examples::permuted_blocks_4(),
        "identity" => UnitaryMatrix::identity(dim(&mut a, name)?),
        "fourier" => {
            let d = dim(&mut a, name)?;
            match take(&mut a, "alpha") {
                Some(alpha) => fractional_fourier(d, alpha)?,
                None => fourier(d),
            }
        }
        "qubit_family" => {
            let phi = take(&mut a, "phi")
                .ok_or_else(|| CliError::Config("generator `qubit_family` needs phi=X".into()))?;
            let x = take(&mut a, "a").unwrap_or(0.0);
            let y = take(&mut a, "b").unwrap_or(0.0);
            examples::qubit_family(phi, x, y)
        }
        "haar" => {
            let d = dim(&mut a, name)?;
            UnitaryMatrix::haar_random(d, &mut rng_for(seed, &[index]))
        }
        _ => {
            return Err(CliError::Config(format!(
                "unknown generator `{name}`; known: {GENERATORS}"
            )))
        }
    };
    if let Some(k) = a.keys().next() {
        return Err(CliError::Config(format!(
            "generator `{name}` does not take `{k}`"
        )));
    }
    Ok(u)
}

pub fn load(
    src: MatrixSource<'_>,
    loaded: &Loaded,
    default: &str,
    index: u64,
) -> CliResult<UnitaryMatrix> {
    let seed = loaded.config.seed;
    match (src.matrix_file, src.generator) {
        (Some(f), _) => {
            let path = loaded.resolve(f);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::Config(format!("cannot read matrix {}: {e}", path.display()))
            })?;
            let m = parse_matrix(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if m.nrows() != m.ncols() {
                return Err(CliError::Config(format!(
                    "{}: matrix is {}x{}, not square",
                    path.display(),
                    m.nrows(),
                    m.ncols()
                )));
            }
            Ok(UnitaryMatrix::new(m)?)
        }
        (None, Some(g)) => generate(g, seed, index),
        (None, None) => generate(default, seed, index),
    }
}
