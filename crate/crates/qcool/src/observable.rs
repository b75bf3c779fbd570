//! Observables expressed as positive-weighted sums of Hermitian involutions.
//!
//! Besides signed Pauli strings, a term may be the reflection
//! `R_j = I - 2|u_j><u_j|` about an eigenvector of the Hamiltonian. Both are
//! unitary, so every term can be fed to a Hadamard test, and the projector
//! `|u_j><u_j| = I/2 - R_j/2` has one-norm 1.

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum, WeightedIndex};
use crate::scalar::Real;

/// One unitary, Hermitian term.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Pauli(PauliString),
    /// `±(I - 2|u_index><u_index|)`, `-` when `negative`.
    EigenReflection {
        index: usize,
        negative: bool,
    },
}

impl Term {
    pub fn is_identity(&self) -> bool {
        matches!(self, Term::Pauli(p) if p.is_identity() && !p.is_negative())
    }
}

/// `Σ_l o_l T_l` with `o_l > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable<T> {
    n: usize,
    terms: Vec<(T, Term)>,
    one_norm: T,
    index: WeightedIndex<T>,
}

impl<T: Real> Observable<T> {
    pub fn new(n: usize, terms: Vec<(T, Term)>) -> Result<Self> {
        for (i, (c, t)) in terms.iter().enumerate() {
            if !(c.is_finite() && *c > T::zero()) {
                return Err(Error::InvalidArgument(format!(
                    "term {i}: coefficient {c} must be positive"
                )));
            }
            if let Term::Pauli(p) = t {
                if p.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: p.n(),
                    });
                }
            }
        }
        let one_norm = terms.iter().map(|(c, _)| *c).sum();
        let index = WeightedIndex::new(terms.iter().map(|(c, _)| *c));
        Ok(Observable {
            n,
            terms,
            one_norm,
            index,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Observable::new(n, vec![(T::one(), Term::Pauli(PauliString::identity(n)?))])
    }

    /// `|u_j><u_j|` for eigenvector `j` of the Hamiltonian the observable is
    /// later evaluated against.
    pub fn eigen_projector(n: usize, j: usize) -> Result<Self> {
        let half = T::lit(0.5);
        Observable::new(
            n,
            vec![
                (half, Term::Pauli(PauliString::identity(n)?)),
                (
                    half,
                    Term::EigenReflection {
                        index: j,
                        negative: true,
                    },
                ),
            ],
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(T, Term)] {
        &self.terms
    }

    pub fn one_norm(&self) -> T {
        self.one_norm
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Draws term `l` with probability `o_l / ‖O‖₁`.
    pub fn sample_term<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        self.index.sample(rng).ok_or(Error::EmptyObservable)
    }
}

impl<T: Real> From<&PauliSum<T>> for Observable<T> {
    fn from(s: &PauliSum<T>) -> Self {
        let terms = s
            .terms()
            .iter()
            .map(|(c, p)| (*c, Term::Pauli(p.clone())))
            .collect();
        Observable::new(s.n(), terms).expect("Pauli sum terms are valid observable terms")
    }
}

impl<T: Real> From<PauliSum<T>> for Observable<T> {
    fn from(s: PauliSum<T>) -> Self {
        Observable::from(&s)
    }
}
