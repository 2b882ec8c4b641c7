#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nqe {

using Complex = std::complex<double>;

// Central numeric tolerances. Every module and every test references these
// constants instead of re-stating literals.
namespace tol {
inline constexpr double kStateNorm = 1e-10;         // |sum of |amp|^2 - 1|
inline constexpr double kDensityHermitian = 1e-10;  // entrywise, density matrices
inline constexpr double kDensityTrace = 1e-10;
inline constexpr double kPsdFloor = -1e-9;       // eigenvalue floor for PSD checks
inline constexpr double kEigHermitian = 1e-8;    // eigensolver input Hermiticity
inline constexpr double kJacobiOffNorm = 1e-12;  // off-diagonal Frobenius threshold
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kUnitary = 1e-10;  // entrywise |U U^dag - I|
}  // namespace tol

// Dense row-major complex matrix. Dimensions in this toolkit stay tiny
// (at most 2^6 for the probe-extended register), so there is no sparsity
// and no attempt at blocking; clarity and determinism win.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);
  // Row-major construction helper, mostly for tests and gate tables.
  static ComplexMatrix from_rows(
      std::initializer_list<std::initializer_list<Complex>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::span<const Complex> entries() const { return entries_; }
  std::span<Complex> entries() { return entries_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

// --- elementwise helpers -------------------------------------------------

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& a, Complex factor);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_norm(const ComplexMatrix& a);
bool all_finite(const ComplexMatrix& a);

// --- core operations ------------------------------------------------------

// Standard matrix product; throws ShapeError when a.cols != b.rows.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product with `a` as the leading factor:
// (a (x) b)[i*p + k, j*q + l] = a[i,j] * b[k,l] for b of shape p x q.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Conjugate transpose.
ComplexMatrix adjoint(const ComplexMatrix& a);

// Tr(a) / dim for a square matrix whose dimension is a power of two.
// This is the quantity a DQC1 probe estimates for unitary `a`.
Complex normalized_trace(const ComplexMatrix& a);

// Eigenvalues of a Hermitian matrix, ascending. Cyclic Jacobi rotations,
// iterated until the off-diagonal Frobenius norm drops below
// tol::kJacobiOffNorm, capped at tol::kJacobiMaxSweeps sweeps.
// Throws DomainError when the input is not Hermitian within
// tol::kEigHermitian, NumericError on non-convergence.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a);

// Diagonal unitary diag(e^{i phase_0}, ..., e^{i phase_{d-1}}).
// The input length must be a power of two (a register dimension).
ComplexMatrix matrix_exp_diagonal(std::span<const double> phases);

// Entrywise check of U U^dag = I.
bool is_unitary(const ComplexMatrix& u, double tolerance = tol::kUnitary);

// --- quantum state values --------------------------------------------------

// Pure state on n qubits; 2^n amplitudes, unit norm within tol::kStateNorm.
class StateVector {
 public:
  static StateVector computational_basis(int n_qubits, std::size_t index);
  // Validates dimension, finiteness and normalization.
  static StateVector from_amplitudes(int n_qubits, std::vector<Complex> amps);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }

 private:
  StateVector(int n_qubits, std::vector<Complex> amps)
      : n_qubits_(n_qubits), amplitudes_(std::move(amps)) {}

  int n_qubits_ = 0;
  std::vector<Complex> amplitudes_;
};

// <a|b>
Complex inner_product(const StateVector& a, const StateVector& b);

// m |psi>; m must be unitary for the result to satisfy the norm invariant.
StateVector apply(const ComplexMatrix& m, const StateVector& psi);

// Mixed state on n qubits. Construction validates all invariants:
// Hermitian within tol::kDensityHermitian entrywise, unit trace within
// tol::kDensityTrace, eigenvalues >= tol::kPsdFloor.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(int n_qubits, ComplexMatrix m);
  static DensityMatrix from_pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(int n_qubits);
  // Equal-weight mixture of pure states sharing one register size.
  static DensityMatrix equal_mixture(std::span<const StateVector> states);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  DensityMatrix(int n_qubits, ComplexMatrix m)
      : n_qubits_(n_qubits), matrix_(std::move(m)) {}

  int n_qubits_ = 0;
  ComplexMatrix matrix_;
};

// Re Tr(obs * rho) for a Hermitian observable.
double real_expectation(const ComplexMatrix& obs, const DensityMatrix& rho);

// --- fixed gate tables ------------------------------------------------------

namespace gates {
ComplexMatrix identity(std::size_t n);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();
}  // namespace gates

}  // namespace nqe
