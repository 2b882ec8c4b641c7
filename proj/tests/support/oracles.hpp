// Test-only reference computations, written independently of the library
// paths they check.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "nqe/qmath.hpp"
#include "nqe/rng.hpp"

namespace nqe::test {

// Naive triple-loop product, the oracle for matmul.
inline ComplexMatrix matmul_naive(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

// Closed-form normalized trace of V(phi1) V(phi2)^dag for single-layer maps:
// the product is diagonal with phases theta_b(phi1) - theta_b(phi2), where
// theta_b(phi) = sum_k phi_k z_k(b) + sum_k phi_{n+k} z_k(b) z_{k+1}(b) and
// z_k(b) is the Pauli-Z eigenvalue of qubit k (MSB-first) on basis state b.
inline Complex hs_overlap_closed_form(int n, const std::vector<double>& phi1,
                                      const std::vector<double>& phi2) {
  const std::size_t dim = std::size_t{1} << n;
  const auto theta = [n](const std::vector<double>& phi, std::size_t b) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double zk = ((b >> (n - k)) & 1u) ? -1.0 : 1.0;
      acc += phi[static_cast<std::size_t>(k - 1)] * zk;
    }
    for (int k = 1; k < n; ++k) {
      const double zk = ((b >> (n - k)) & 1u) ? -1.0 : 1.0;
      const double zk1 = ((b >> (n - k - 1)) & 1u) ? -1.0 : 1.0;
      acc += phi[static_cast<std::size_t>(n + k - 1)] * zk * zk1;
    }
    return acc;
  };
  Complex sum = 0.0;
  for (std::size_t b = 0; b < dim; ++b) {
    const double delta = theta(phi1, b) - theta(phi2, b);
    sum += Complex{std::cos(delta), std::sin(delta)};
  }
  return sum / static_cast<double>(dim);
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = Complex{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = rng.uniform(-1.0, 1.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex v{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

// Random unitary via Gram-Schmidt on a random complex matrix.
inline ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
  ComplexMatrix m = random_matrix(n, n, rng);
  // Orthonormalize columns.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t prev = 0; prev < j; ++prev) {
      Complex dot = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        dot += std::conj(m(i, prev)) * m(i, j);
      for (std::size_t i = 0; i < n; ++i) m(i, j) -= dot * m(i, prev);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::norm(m(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) m(i, j) /= norm;
  }
  return m;
}

inline std::vector<double> random_angles(std::size_t count, Rng& rng) {
  std::vector<double> out(count);
  for (double& v : out) v = rng.uniform(-3.141592653589793, 3.141592653589793);
  return out;
}

// Random mixed state: mixture of a few random pure states.
inline DensityMatrix random_density(int n_qubits, Rng& rng) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<StateVector> pures;
  const int n_components = 1 + static_cast<int>(rng.below(3));
  for (int c = 0; c < n_components; ++c) {
    std::vector<Complex> amps(dim);
    double norm = 0.0;
    for (Complex& a : amps) {
      a = Complex{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      norm += std::norm(a);
    }
    norm = std::sqrt(norm);
    for (Complex& a : amps) a /= norm;
    pures.push_back(StateVector::from_amplitudes(n_qubits, std::move(amps)));
  }
  return DensityMatrix::equal_mixture(pures);
}

}  // namespace nqe::test
