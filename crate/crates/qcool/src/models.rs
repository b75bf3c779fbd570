//! Benchmark Hamiltonians and initial states.
//!
//! Qubit `q` is the `q`-th letter of a Pauli string and the `q`-th character
//! of a bitstring, and corresponds to bit `n-1-q` of a basis index (qubit 0 is
//! the most significant bit). Bit value 1 is the `-1` eigenstate of `Z`.

use std::collections::HashSet;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::StateVector;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum, MAX_QUBITS};
use crate::scalar::Real;

fn push_term<T: Real>(
    terms: &mut Vec<(T, PauliString)>,
    weight: T,
    letters: Vec<Pauli>,
) -> Result<()> {
    if weight == T::zero() {
        return Ok(());
    }
    let p = PauliString::new(letters, weight < T::zero())?;
    terms.push((num_traits::Float::abs(weight), p));
    Ok(())
}

/// XXZ chain `J Σ (XX + YY + a·ZZ) + h Σ Z` on nearest-neighbour bonds.
///
/// `periodic` adds the bond `(n-1, 0)` for `n > 2`; on two sites that bond
/// coincides with `(0, 1)` and is not added twice. Zero weights are omitted.
pub fn heisenberg<T: Real>(
    n: usize,
    j: T,
    zz_anisotropy: T,
    h: T,
    periodic: bool,
) -> Result<PauliSum<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Heisenberg chain needs n >= 2, got {n}"
        )));
    }
    if n > MAX_QUBITS {
        return Err(Error::DimensionOverflow { n, max: MAX_QUBITS });
    }
    if !(j.is_finite() && zz_anisotropy.is_finite() && h.is_finite()) {
        return Err(Error::InvalidArgument(
            "Heisenberg parameters must be finite".into(),
        ));
    }
    let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if periodic && n > 2 {
        bonds.push((n - 1, 0));
    }
    let mut terms = Vec::new();
    for &(a, b) in &bonds {
        for (p, w) in [(Pauli::X, j), (Pauli::Y, j), (Pauli::Z, j * zz_anisotropy)] {
            let mut letters = vec![Pauli::I; n];
            letters[a] = p;
            letters[b] = p;
            push_term(&mut terms, w, letters)?;
        }
    }
    for q in 0..n {
        let mut letters = vec![Pauli::I; n];
        letters[q] = Pauli::Z;
        push_term(&mut terms, h, letters)?;
    }
    PauliSum::new(n, terms)
}

/// Computational basis state from a bitstring such as `"0101"`.
pub fn basis_state<T: Real>(bits: &str) -> Result<StateVector<T>> {
    let n = bits.chars().count();
    if n == 0 {
        return Err(Error::InvalidArgument("empty bitstring".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::DimensionOverflow { n, max: MAX_QUBITS });
    }
    let mut index = 0usize;
    for (q, c) in bits.chars().enumerate() {
        let bit = match c {
            '0' => 0,
            '1' => 1,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "bitstring character {q} is '{c}', expected 0 or 1"
                )))
            }
        };
        index = (index << 1) | bit;
    }
    StateVector::basis(n, index)
}

/// [`basis_state`] with a required length.
pub fn basis_state_n<T: Real>(bits: &str, n: usize) -> Result<StateVector<T>> {
    let found = bits.chars().count();
    if found != n {
        return Err(Error::DimensionMismatch { expected: n, found });
    }
    basis_state(bits)
}

/// `m` distinct non-identity Pauli strings on `n` qubits with magnitudes
/// uniform in `(0, 1]` and random signs, determined by `seed`.
pub fn random_pauli_hamiltonian<T: Real>(n: usize, m: usize, seed: u64) -> Result<PauliSum<T>> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::DimensionOverflow { n, max: MAX_QUBITS });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    let available = 4u128.pow(n as u32) - 1;
    if m as u128 > available {
        return Err(Error::InvalidArgument(format!(
            "{m} terms requested but only {available} non-identity strings exist on {n} qubits"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut terms = Vec::with_capacity(m);
    while terms.len() < m {
        let letters: Vec<Pauli> = (0..n)
            .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)])
            .collect();
        if letters.iter().all(|&p| p == Pauli::I) || !seen.insert(letters.clone()) {
            continue;
        }
        let magnitude = 1.0 - rng.random::<f64>();
        let negative = rng.random::<bool>();
        terms.push((T::lit(magnitude), PauliString::new(letters, negative)?));
    }
    PauliSum::new(n, terms)
}

/// A Hamiltonian family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    HeisenbergXxz {
        n: usize,
        #[serde(default = "one")]
        j: f64,
        #[serde(default = "two")]
        zz_anisotropy: f64,
        #[serde(default)]
        h: f64,
        #[serde(default = "yes")]
        periodic: bool,
    },
    PauliFile {
        path: PathBuf,
    },
    RandomPauli {
        n: usize,
        terms: usize,
        seed: u64,
    },
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn yes() -> bool {
    true
}

impl ModelSpec {
    pub fn build<T: Real>(&self) -> Result<PauliSum<T>> {
        match self {
            ModelSpec::HeisenbergXxz {
                n,
                j,
                zz_anisotropy,
                h,
                periodic,
            } => heisenberg(
                *n,
                T::lit(*j),
                T::lit(*zz_anisotropy),
                T::lit(*h),
                *periodic,
            ),
            ModelSpec::PauliFile { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
                })?;
                PauliSum::parse(&text)
            }
            ModelSpec::RandomPauli { n, terms, seed } => {
                random_pauli_hamiltonian(*n, *terms, *seed)
            }
        }
    }
}
