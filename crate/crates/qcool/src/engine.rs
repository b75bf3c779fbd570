//! Exact diagonalization and eigenbasis evaluation of the cooling quantities.
//!
//! All time evolution uses the shifted spectrum `E_i + shift ≥ 0`, and trial
//! energies passed to the cooling quantities are in the same shifted frame.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;

use crate::cooling::CoolingFunction;
use crate::error::{Error, Result};
use crate::observable::{Observable, Term};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::{cis, norm_sqr, Real};

/// Normalized `n`-qubit state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Accepts amplitudes whose squared norm is 1 within `1e-10`.
    pub fn new(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, amps.len())?;
        let nrm: T = amps.iter().map(|z| norm_sqr(*z)).sum();
        if Float::abs(nrm - T::one()) > T::tolerance(1e-10) {
            return Err(Error::InvalidArgument(format!(
                "state has squared norm {nrm}, expected 1"
            )));
        }
        Ok(StateVector { n, amps })
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(n: usize, mut amps: Vec<Complex<T>>) -> Result<Self> {
        check_len(n, amps.len())?;
        let nrm = Float::sqrt(amps.iter().map(|z| norm_sqr(*z)).sum::<T>());
        if !(nrm > T::zero()) {
            return Err(Error::InvalidArgument(
                "cannot normalize the zero vector".into(),
            ));
        }
        for z in &mut amps {
            *z /= nrm;
        }
        Ok(StateVector { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > crate::pauli::MAX_QUBITS {
            return Err(Error::DimensionOverflow {
                n,
                max: crate::pauli::MAX_QUBITS,
            });
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|z| norm_sqr(*z)).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `<ψ|P|ψ>` for a Pauli string.
    pub fn expectation(&self, p: &PauliString) -> Result<T> {
        let pv = p.apply(&self.amps)?;
        Ok(inner(&self.amps, &pv).re)
    }
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n == 0 || n > crate::pauli::MAX_QUBITS {
        return Err(Error::DimensionOverflow {
            n,
            max: crate::pauli::MAX_QUBITS,
        });
    }
    if len != 1usize << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: len,
        });
    }
    Ok(())
}

fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        })
}

/// The unitary whose overlap a Hadamard test measures.
#[derive(Clone, Copy, Debug)]
pub enum UnitarySpec<'a, T> {
    /// `e^{i y τ H}`.
    Evolution { y: T },
    /// `e^{-i x' τ H} O_l e^{i x τ H}`.
    Sandwich { x_prime: T, term: &'a Term, x: T },
}

/// Spectrum, eigenvectors and the overlaps of an attached initial state.
#[derive(Clone, Debug)]
pub struct EigenSystem<T: Real> {
    n: usize,
    energies: Vec<T>,
    shift: T,
    shifted: Vec<T>,
    vectors: DMatrix<Complex<T>>,
    coeffs: Vec<Complex<T>>,
    overlaps: Vec<T>,
    initial: StateVector<T>,
}

impl<T: Real> EigenSystem<T> {
    /// Diagonalizes `h` and attaches `psi0`.
    pub fn eigendecompose(h: &PauliSum<T>, psi0: &StateVector<T>) -> Result<Self> {
        let m = h.to_matrix()?.matrix;
        EigenSystem::from_matrix(h.n(), m, psi0)
    }

    /// Diagonalizes a dense Hermitian matrix.
    pub fn from_matrix(n: usize, m: DMatrix<Complex<T>>, psi0: &StateVector<T>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || dim != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: dim,
            });
        }
        if psi0.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: psi0.dim(),
            });
        }
        let mut asym = T::zero();
        for r in 0..dim {
            for c in r..dim {
                asym = Float::max(asym, (m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        if asym > T::tolerance(1e-10) {
            return Err(Error::NonHermitian(asym.as_f64()));
        }
        let (energies, vectors) = T::hermitian_eigen(m);
        let shift = Float::max(T::zero(), -energies[0]);
        let shifted = energies.iter().map(|&e| e + shift).collect();
        let coeffs: Vec<Complex<T>> = (0..dim)
            .map(|i| {
                let col = vectors.column(i);
                (0..dim).fold(Complex::new(T::zero(), T::zero()), |acc, r| {
                    acc + col[r].conj() * psi0.amps[r]
                })
            })
            .collect();
        let overlaps = coeffs.iter().map(|c| norm_sqr(*c)).collect();
        Ok(EigenSystem {
            n,
            energies,
            shift,
            shifted,
            vectors,
            coeffs,
            overlaps,
            initial: psi0.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Eigenvalues in the original frame, ascending.
    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    /// Eigenvalues after adding [`EigenSystem::shift`], all nonnegative.
    pub fn shifted_energies(&self) -> &[T] {
        &self.shifted
    }

    /// `max(0, -E_min)`.
    pub fn shift(&self) -> T {
        self.shift
    }

    pub fn vectors(&self) -> &DMatrix<Complex<T>> {
        &self.vectors
    }

    /// `c_i = <u_i|ψ₀>`.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `p_i = |<u_i|ψ₀>|²`.
    pub fn overlaps(&self) -> &[T] {
        &self.overlaps
    }

    pub fn initial_state(&self) -> &StateVector<T> {
        &self.initial
    }

    pub fn eigenvector(&self, i: usize) -> StateVector<T> {
        StateVector {
            n: self.n,
            amps: self.vectors.column(i).iter().copied().collect(),
        }
    }

    /// Index of the eigenvector with the largest overlap.
    pub fn largest_overlap_index(&self) -> usize {
        self.overlaps
            .iter()
            .enumerate()
            .fold(
                (0, T::neg_infinity()),
                |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc },
            )
            .0
    }

    /// Distance from `E_j` to the nearest other eigenvalue whose overlap
    /// exceeds `overlap_floor`, ignoring eigenvalues within `1e-9` of `E_j`.
    pub fn gap(&self, j: usize, overlap_floor: T) -> Option<T> {
        let ej = self.energies[j];
        self.energies
            .iter()
            .zip(&self.overlaps)
            .filter(|(&e, &p)| p > overlap_floor && Float::abs(e - ej) > T::lit(1e-9))
            .map(|(&e, _)| Float::abs(e - ej))
            .fold(None, |acc: Option<T>, d| {
                Some(acc.map_or(d, |a| Float::min(a, d)))
            })
    }

    /// Indices of eigenvectors with `|c_i| > threshold`.
    pub fn support(&self, threshold: T) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.coeffs[i].norm() > threshold)
            .collect()
    }

    /// `U†ψ`.
    pub fn to_eigenbasis(&self, psi: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let dim = self.dim();
        if psi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: psi.len(),
            });
        }
        Ok((0..dim)
            .map(|i| {
                let col = self.vectors.column(i);
                (0..dim).fold(Complex::new(T::zero(), T::zero()), |acc, r| {
                    acc + col[r].conj() * psi[r]
                })
            })
            .collect())
    }

    /// `Σ_i a_i u_i`.
    pub fn from_eigenbasis(&self, a: &[Complex<T>]) -> Vec<Complex<T>> {
        let dim = self.dim();
        let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
        for (i, &ai) in a.iter().enumerate() {
            if ai == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let col = self.vectors.column(i);
            for r in 0..dim {
                out[r] += col[r] * ai;
            }
        }
        out
    }

    /// `Σ_i E_i u_i u_i†` in the original frame.
    pub fn reconstruct(&self) -> DMatrix<Complex<T>> {
        let dim = self.dim();
        let mut m = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
        for i in 0..dim {
            let col = self.vectors.column(i);
            let e = self.energies[i];
            for r in 0..dim {
                let left = col[r] * e;
                for c in 0..dim {
                    m[(r, c)] += left * col[c].conj();
                }
            }
        }
        m
    }

    /// `e^{iHt}|ψ>` using the shifted spectrum.
    pub fn evolve(&self, psi: &StateVector<T>, t: T) -> Result<StateVector<T>> {
        let mut a = self.to_eigenbasis(&psi.amps)?;
        for (ai, &e) in a.iter_mut().zip(&self.shifted) {
            *ai *= cis(e * t);
        }
        Ok(StateVector {
            n: self.n,
            amps: self.from_eigenbasis(&a),
        })
    }

    /// Applies one observable term.
    pub fn apply_term(&self, term: &Term, amps: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        match term {
            Term::Pauli(p) => p.apply(amps),
            Term::EigenReflection { index, negative } => {
                if *index >= self.dim() {
                    return Err(Error::InvalidArgument(format!(
                        "eigen index {index} out of range"
                    )));
                }
                if amps.len() != self.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim(),
                        found: amps.len(),
                    });
                }
                let col = self.vectors.column(*index);
                let proj = (0..amps.len()).fold(Complex::new(T::zero(), T::zero()), |acc, r| {
                    acc + col[r].conj() * amps[r]
                });
                let two = T::lit(2.0);
                let sign = if *negative { -T::one() } else { T::one() };
                Ok(amps
                    .iter()
                    .enumerate()
                    .map(|(r, &a)| (a - col[r] * proj * two) * sign)
                    .collect())
            }
        }
    }

    /// `O|ψ>` for a weighted observable.
    pub fn apply_observable(
        &self,
        obs: &Observable<T>,
        amps: &[Complex<T>],
    ) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); amps.len()];
        for (c, term) in obs.terms() {
            let v = self.apply_term(term, amps)?;
            for (o, x) in out.iter_mut().zip(v) {
                *o += x * *c;
            }
        }
        Ok(out)
    }

    /// Dense `<ψ₀|U|ψ₀>` with an explicitly supplied initial state.
    pub fn matrix_element(
        &self,
        psi0: &StateVector<T>,
        spec: &UnitarySpec<'_, T>,
        tau: T,
    ) -> Result<Complex<T>> {
        match *spec {
            UnitarySpec::Evolution { y } => {
                let phi = self.evolve(psi0, y * tau)?;
                psi0.inner(&phi)
            }
            UnitarySpec::Sandwich { x_prime, term, x } => {
                let ket = self.evolve(psi0, x * tau)?;
                let bra = self.evolve(psi0, x_prime * tau)?;
                let pk = self.apply_term(term, &ket.amps)?;
                Ok(inner(&bra.amps, &pk))
            }
        }
    }

    /// `Σ_i p_i w_i²`: the squared norm of `w(H)|ψ₀>` for eigen-weights `w`.
    pub fn filtered_norm(&self, weights: &[T]) -> T {
        self.overlaps
            .iter()
            .zip(weights)
            .map(|(&p, &w)| p * w * w)
            .sum()
    }

    /// `<v|O|v>` with `v = Σ_i w_i c_i u_i`.
    pub fn filtered_expectation(&self, weights: &[T], obs: &Observable<T>) -> Result<T> {
        let a: Vec<Complex<T>> = self
            .coeffs
            .iter()
            .zip(weights)
            .map(|(&c, &w)| c * w)
            .collect();
        let v = self.from_eigenbasis(&a);
        let ov = self.apply_observable(obs, &v)?;
        Ok(inner(&v, &ov).re)
    }

    fn cooling_weights(&self, cf: &CoolingFunction<T>, tau: T, e: T) -> Vec<T> {
        self.shifted
            .iter()
            .map(|&ei| cf.g(tau * (ei - e)))
            .collect()
    }

    /// `<u_j|O|u_j>`.
    pub fn eigen_expectation(&self, j: usize, obs: &Observable<T>) -> Result<T> {
        let u: Vec<Complex<T>> = self.vectors.column(j).iter().copied().collect();
        let ou = self.apply_observable(obs, &u)?;
        Ok(inner(&u, &ou).re)
    }

    /// `D_τ(E) = <ψ₀|g(τ(H-E))²|ψ₀>`, `E` in the shifted frame.
    pub fn exact_d(&self, cf: &CoolingFunction<T>, tau: T, e: T) -> T {
        self.filtered_norm(&self.cooling_weights(cf, tau, e))
    }

    /// `N_τ(O) = <ψ₀|g(τ(H-E)) O g(τ(H-E))|ψ₀>`.
    pub fn exact_n(&self, cf: &CoolingFunction<T>, tau: T, e: T, obs: &Observable<T>) -> Result<T> {
        self.filtered_expectation(&self.cooling_weights(cf, tau, e), obs)
    }

    /// Normalized `g(τ(H-E))|ψ₀>`.
    pub fn cooled_state(&self, cf: &CoolingFunction<T>, tau: T, e: T) -> Result<CooledState<T>> {
        let w = self.cooling_weights(cf, tau, e);
        let mut a: Vec<Complex<T>> = self.coeffs.iter().zip(&w).map(|(&c, &wi)| c * wi).collect();
        let nrm = Float::sqrt(a.iter().map(|z| norm_sqr(*z)).sum::<T>());
        if !(nrm > T::lit(1e-14)) {
            return Err(Error::VanishingNorm(nrm.as_f64()));
        }
        for z in &mut a {
            *z /= nrm;
        }
        let state = StateVector {
            n: self.n,
            amps: self.from_eigenbasis(&a),
        };
        Ok(CooledState {
            state,
            eigen_amplitudes: a,
        })
    }

    /// Restriction to the initial state's support, for fast repeated overlaps.
    pub fn kernel(&self) -> SupportKernel<T> {
        SupportKernel::new(self)
    }
}

/// Output of [`EigenSystem::cooled_state`].
#[derive(Clone, Debug)]
pub struct CooledState<T> {
    pub state: StateVector<T>,
    /// Normalized amplitudes in the eigenbasis.
    pub eigen_amplitudes: Vec<Complex<T>>,
}

impl<T: Real> CooledState<T> {
    /// `1 - |<u_j|ψ(τ)>|²`.
    pub fn infidelity(&self, j: usize) -> T {
        T::one() - norm_sqr(self.eigen_amplitudes[j])
    }
}

/// Eigen-data restricted to `S = {i : |c_i| > 1e-14}`.
///
/// Overlaps of the form `<ψ₀|e^{-ix'τH} O e^{ixτH}|ψ₀>` only involve matrix
/// elements of `O` between eigenvectors in `S`.
#[derive(Clone, Debug)]
pub struct SupportKernel<T: Real> {
    indices: Vec<usize>,
    energies: Vec<T>,
    coeffs: Vec<Complex<T>>,
    overlaps: Vec<T>,
}

/// `<u_a|O|u_b>` for `a, b` in the support.
#[derive(Clone, Debug)]
pub struct ReducedOperator<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> SupportKernel<T> {
    fn new(es: &EigenSystem<T>) -> Self {
        let indices = es.support(T::lit(1e-14));
        SupportKernel {
            energies: indices.iter().map(|&i| es.shifted[i]).collect(),
            coeffs: indices.iter().map(|&i| es.coeffs[i]).collect(),
            overlaps: indices.iter().map(|&i| es.overlaps[i]).collect(),
            indices,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `<ψ₀|e^{iyτH}|ψ₀> = Σ_i p_i e^{iyτE_i}`.
    pub fn evolution_overlap(&self, y: T, tau: T) -> Complex<T> {
        let yt = y * tau;
        self.energies
            .iter()
            .zip(&self.overlaps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&e, &p)| {
                acc + cis(e * yt) * p
            })
    }

    /// Reduces an observable term.
    pub fn reduce_term(&self, es: &EigenSystem<T>, term: &Term) -> Result<ReducedOperator<T>> {
        let k = self.len();
        let cols: Vec<Vec<Complex<T>>> = self
            .indices
            .iter()
            .map(|&i| es.vectors.column(i).iter().copied().collect())
            .collect();
        let images = cols
            .iter()
            .map(|c| es.apply_term(term, c))
            .collect::<Result<Vec<_>>>()?;
        let matrix = DMatrix::from_fn(k, k, |a, b| inner(&cols[a], &images[b]));
        Ok(ReducedOperator { matrix })
    }

    /// Reduces a full observable `Σ o_l T_l`.
    pub fn reduce_observable(
        &self,
        es: &EigenSystem<T>,
        obs: &Observable<T>,
    ) -> Result<ReducedOperator<T>> {
        let k = self.len();
        let mut matrix = DMatrix::from_element(k, k, Complex::new(T::zero(), T::zero()));
        for (c, term) in obs.terms() {
            let r = self.reduce_term(es, term)?;
            matrix += r.matrix * Complex::new(*c, T::zero());
        }
        Ok(ReducedOperator { matrix })
    }

    /// `<ψ₀|e^{-ix'τH} O e^{ixτH}|ψ₀>`.
    pub fn sandwich(&self, op: &ReducedOperator<T>, x_prime: T, x: T, tau: T) -> Complex<T> {
        let k = self.len();
        let ket: Vec<Complex<T>> = self
            .coeffs
            .iter()
            .zip(&self.energies)
            .map(|(&c, &e)| c * cis(e * x * tau))
            .collect();
        let mut acc = Complex::new(T::zero(), T::zero());
        for a in 0..k {
            let bra = self.coeffs[a] * cis(self.energies[a] * x_prime * tau);
            let row = ket
                .iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |s, (b, &v)| {
                    s + op.matrix[(a, b)] * v
                });
            acc += bra.conj() * row;
        }
        acc
    }
}
