//! Pauli strings, real-weighted Pauli sums and their dense realization.
//!
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of a basis index, so
//! the leftmost letter of a string acts on the most significant bit. A set
//! bit is the `-1` eigenstate of `Z`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register realized as a dense matrix.
pub const MAX_QUBITS: usize = 14;

/// Single-qubit Pauli operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis with an absorbed `±1` sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    negative: bool,
    flip_mask: usize,
    phase_mask: usize,
    y_count: u32,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, negative: bool) -> Result<Self> {
        let n = letters.len();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "Pauli string must act on at least one qubit".into(),
            ));
        }
        if n > MAX_QUBITS {
            return Err(Error::DimensionOverflow { n, max: MAX_QUBITS });
        }
        let mut flip_mask = 0usize;
        let mut phase_mask = 0usize;
        let mut y_count = 0u32;
        for (q, &p) in letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip_mask |= bit,
                Pauli::Y => {
                    flip_mask |= bit;
                    phase_mask |= bit;
                    y_count += 1;
                }
                Pauli::Z => phase_mask |= bit,
            }
        }
        Ok(PauliString {
            letters,
            negative,
            flip_mask,
            phase_mask,
            y_count,
        })
    }

    /// Parses letters such as `"XZI"`, optionally prefixed by `-`.
    pub fn parse(text: &str) -> Result<Self> {
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let letters = body
            .chars()
            .map(|c| {
                Pauli::from_char(c).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "'{c}' is not a Pauli letter (expected I, X, Y or Z)"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters, negative)
    }

    pub fn identity(n: usize) -> Result<Self> {
        PauliString::new(vec![Pauli::I; n], false)
    }

    /// Single non-identity letter `p` on qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        if q >= n {
            return Err(Error::InvalidArgument(format!(
                "qubit {q} out of range for {n} qubits"
            )));
        }
        let mut letters = vec![Pauli::I; n];
        letters[q] = p;
        PauliString::new(letters, false)
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn negated(&self) -> Self {
        PauliString {
            negative: !self.negative,
            ..self.clone()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.flip_mask == 0 && self.phase_mask == 0
    }

    /// Image of basis state `index`: `P|index> = phase |out>`.
    #[inline]
    pub fn apply_basis<T: Real>(&self, index: usize) -> (usize, Complex<T>) {
        let mut quarter = self.y_count + 2 * ((index & self.phase_mask).count_ones() & 1);
        if self.negative {
            quarter += 2;
        }
        let (one, zero) = (T::one(), T::zero());
        let phase = match quarter % 4 {
            0 => Complex::new(one, zero),
            1 => Complex::new(zero, one),
            2 => Complex::new(-one, zero),
            _ => Complex::new(zero, -one),
        };
        (index ^ self.flip_mask, phase)
    }

    /// `P|ψ>` for a dense amplitude vector of length `2^n`.
    pub fn apply<T: Real>(&self, amps: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let dim = 1usize << self.n();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
        for (j, &a) in amps.iter().enumerate() {
            let (k, ph) = self.apply_basis::<T>(j);
            out[k] = ph * a;
        }
        Ok(out)
    }

    /// Dense `2^n x 2^n` realization.
    pub fn to_matrix<T: Real>(&self) -> Result<DMatrix<Complex<T>>> {
        let n = self.n();
        if n > MAX_QUBITS {
            return Err(Error::DimensionOverflow { n, max: MAX_QUBITS });
        }
        let dim = 1usize << n;
        let mut m = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
        for j in 0..dim {
            let (k, ph) = self.apply_basis::<T>(j);
            m[(k, j)] = ph;
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PauliString::parse(s)
    }
}

/// Cumulative-weight table for drawing an index with probability proportional
/// to its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedIndex<T> {
    cumulative: Vec<T>,
}

impl<T: Real> WeightedIndex<T> {
    pub fn new(weights: impl IntoIterator<Item = T>) -> Self {
        let mut acc = T::zero();
        let cumulative = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        WeightedIndex { cumulative }
    }

    pub fn total(&self) -> T {
        self.cumulative.last().copied().unwrap_or_else(T::zero)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let total = self.total();
        if self.cumulative.is_empty() || !(total > T::zero()) {
            return None;
        }
        let u = T::lit(rng.random::<f64>()) * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        Some(idx.min(self.cumulative.len() - 1))
    }
}

/// `Σ_l o_l P_l` with every `o_l > 0`; signs live in the strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T> {
    n: usize,
    terms: Vec<(T, PauliString)>,
    one_norm: T,
    index: WeightedIndex<T>,
}

/// Dense realization of a Pauli sum.
#[derive(Clone, Debug)]
pub struct DenseRealization<T: Real> {
    pub matrix: DMatrix<Complex<T>>,
    /// Set when the sum had no terms and the matrix is identically zero.
    pub empty: bool,
}

impl<T: Real> PauliSum<T> {
    pub fn new(n: usize, terms: Vec<(T, PauliString)>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::DimensionOverflow { n, max: MAX_QUBITS });
        }
        for (i, (c, p)) in terms.iter().enumerate() {
            if !(c.is_finite() && *c > T::zero()) {
                return Err(Error::InvalidArgument(format!(
                    "term {i}: coefficient {c} must be finite and strictly positive"
                )));
            }
            if p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
        }
        let one_norm = terms.iter().map(|(c, _)| *c).sum();
        let index = WeightedIndex::new(terms.iter().map(|(c, _)| *c));
        Ok(PauliSum {
            n,
            terms,
            one_norm,
            index,
        })
    }

    /// Builds from signed coefficients; a negative coefficient flips the
    /// string's sign. Zero coefficients are rejected.
    pub fn from_signed(n: usize, terms: &[(T, &str)]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for (c, s) in terms {
            if *c == T::zero() {
                return Err(Error::InvalidArgument(format!(
                    "zero coefficient on term {s}"
                )));
            }
            let p = PauliString::parse(s)?;
            if *c < T::zero() {
                out.push((-*c, p.negated()));
            } else {
                out.push((*c, p));
            }
        }
        PauliSum::new(n, out)
    }

    pub fn empty(n: usize) -> Result<Self> {
        PauliSum::new(n, Vec::new())
    }

    /// Parses one `<coefficient> <letters>` term per line. Blank lines and
    /// lines starting with `#` are skipped. A leading `-` on the coefficient
    /// negates the string.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut fields = line.split_whitespace();
            let (coef_tok, letters_tok) = match (fields.next(), fields.next(), fields.next()) {
                (Some(c), Some(l), None) => (c, l),
                _ => {
                    return Err(err(format!(
                        "expected `<coefficient> <letters>`, found `{line}`"
                    )))
                }
            };
            let (negative, magnitude_tok) = match coef_tok.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, coef_tok.strip_prefix('+').unwrap_or(coef_tok)),
            };
            let magnitude: f64 = magnitude_tok
                .parse()
                .map_err(|_| err(format!("`{coef_tok}` is not a number")))?;
            if !magnitude.is_finite() || magnitude <= 0.0 {
                return Err(err(format!(
                    "coefficient `{coef_tok}` must be finite and nonzero"
                )));
            }
            if magnitude_tok.starts_with('-') || magnitude_tok.starts_with('+') {
                return Err(err(format!("`{coef_tok}` has more than one sign")));
            }
            let letters = letters_tok
                .chars()
                .map(|c| {
                    Pauli::from_char(c).ok_or_else(|| err(format!("'{c}' is not a Pauli letter")))
                })
                .collect::<Result<Vec<_>>>()?;
            match n {
                None => n = Some(letters.len()),
                Some(m) if m != letters.len() => {
                    return Err(err(format!(
                        "string `{letters_tok}` has {} qubits, expected {m}",
                        letters.len()
                    )))
                }
                _ => {}
            }
            let ps = PauliString::new(letters, negative).map_err(|e| err(e.to_string()))?;
            terms.push((T::lit(magnitude), ps));
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "no terms found".into(),
        })?;
        PauliSum::new(n, terms)
    }

    /// Inverse of [`PauliSum::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (c, p) in &self.terms {
            let sign = if p.is_negative() { "-" } else { "" };
            let letters: String = p.letters().iter().map(|l| l.as_char()).collect();
            s.push_str(&format!("{sign}{} {letters}\n", c.as_f64()));
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `‖O‖₁ = Σ o_l`.
    pub fn one_norm(&self) -> T {
        self.one_norm
    }

    /// `Pr_O(l) = o_l / ‖O‖₁`.
    pub fn probability(&self, l: usize) -> T {
        self.terms[l].0 / self.one_norm
    }

    /// Term list of `self` followed by the terms of `other`.
    pub fn concat(&self, other: &PauliSum<T>) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        PauliSum::new(self.n, terms)
    }

    /// Draws term `l` with probability `o_l / ‖O‖₁`.
    pub fn sample_term<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        self.index.sample(rng).ok_or(Error::EmptyObservable)
    }

    /// `H|ψ>` without building the matrix.
    pub fn apply(&self, amps: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let dim = 1usize << self.n;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
        for (c, p) in &self.terms {
            for (j, &a) in amps.iter().enumerate() {
                let (k, ph) = p.apply_basis::<T>(j);
                out[k] += ph * a * *c;
            }
        }
        Ok(out)
    }

    /// Dense `Σ o_l P_l`.
    pub fn to_matrix(&self) -> Result<DenseRealization<T>> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
        for (c, p) in &self.terms {
            for j in 0..dim {
                let (k, ph) = p.apply_basis::<T>(j);
                m[(k, j)] += ph * *c;
            }
        }
        Ok(DenseRealization {
            matrix: m,
            empty: self.terms.is_empty(),
        })
    }
}

impl<T: Real> FromStr for PauliSum<T> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PauliSum::parse(s)
    }
}
