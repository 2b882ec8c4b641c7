#include "nqe/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nqe/errors.hpp"

namespace nqe {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::string shape_str(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  ComplexMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("from_rows: ragged row lengths");
    std::size_t j = 0;
    for (const Complex& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("add: shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    out.entries()[i] = a.entries()[i] + b.entries()[i];
  return out;
}

ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("sub: shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    out.entries()[i] = a.entries()[i] - b.entries()[i];
  return out;
}

ComplexMatrix scale(const ComplexMatrix& a, Complex factor) {
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    out.entries()[i] = factor * a.entries()[i];
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
  return worst;
}

double frobenius_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (const Complex& v : a.entries()) sum += std::norm(v);
  return std::sqrt(sum);
}

bool all_finite(const ComplexMatrix& a) {
  for (const Complex& v : a.entries())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + shape_str(a) + " times " + shape_str(b));
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

Complex normalized_trace(const ComplexMatrix& a) {
  if (!a.is_square())
    throw ShapeError("normalized_trace: non-square matrix " + shape_str(a));
  if (!is_power_of_two(a.rows()))
    throw ShapeError("normalized_trace: dimension " + std::to_string(a.rows()) +
                     " is not a power of two");
  Complex tr = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) tr += a(i, i);
  return tr / static_cast<double>(a.rows());
}

namespace {

double off_diagonal_norm(const ComplexMatrix& m) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j) sum += std::norm(m(i, j));
  return std::sqrt(sum);
}

// One Jacobi rotation zeroing m(p, q) of a Hermitian matrix, applied as
// R^dag m R with R the identity except
//   R(p,p) = c, R(p,q) = s e^{i phi}, R(q,p) = -s e^{-i phi}, R(q,q) = c,
// where phi = arg m(p,q). Rows and columns p, q are updated in place.
void jacobi_rotate(ComplexMatrix& m, std::size_t p, std::size_t q) {
  const Complex apq = m(p, q);
  const double abs_apq = std::abs(apq);
  if (abs_apq == 0.0) return;
  const Complex phase = apq / abs_apq;
  const double app = m(p, p).real();
  const double aqq = m(q, q).real();
  const double tau = (aqq - app) / (2.0 * abs_apq);
  const double sign = tau >= 0.0 ? 1.0 : -1.0;
  const double t = sign / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {  // right-multiplication: columns p, q
    const Complex aip = m(i, p);
    const Complex aiq = m(i, q);
    m(i, p) = c * aip - s * std::conj(phase) * aiq;
    m(i, q) = s * phase * aip + c * aiq;
  }
  for (std::size_t j = 0; j < n; ++j) {  // left-multiplication: rows p, q
    const Complex apj = m(p, j);
    const Complex aqj = m(q, j);
    m(p, j) = c * apj - s * phase * aqj;
    m(q, j) = s * std::conj(phase) * apj + c * aqj;
  }
  // The rotation annihilates the target pair exactly; the updates above only
  // drive it to roundoff, so pin it.
  m(p, q) = 0.0;
  m(q, p) = 0.0;
  m(p, p) = Complex{m(p, p).real(), 0.0};
  m(q, q) = Complex{m(q, q).real(), 0.0};
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  if (!a.is_square())
    throw ShapeError("hermitian_eigenvalues: non-square " + shape_str(a));
  if (!all_finite(a))
    throw DomainError("hermitian_eigenvalues: non-finite entries");
  double herm_defect = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      herm_defect = std::max(herm_defect, std::abs(a(i, j) - std::conj(a(j, i))));
  if (herm_defect > tol::kEigHermitian)
    throw DomainError("hermitian_eigenvalues: input deviates from Hermitian by " +
                      std::to_string(herm_defect));

  const std::size_t n = a.rows();
  // Work on the exactly Hermitian part so the rotations stay well-posed.
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));

  for (int sweep = 0; sweep < tol::kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(m) < tol::kJacobiOffNorm) {
      std::vector<double> eigs(n);
      for (std::size_t i = 0; i < n; ++i) eigs[i] = m(i, i).real();
      std::sort(eigs.begin(), eigs.end());
      return eigs;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(m, p, q);
  }
  if (off_diagonal_norm(m) < tol::kJacobiOffNorm) {
    std::vector<double> eigs(n);
    for (std::size_t i = 0; i < n; ++i) eigs[i] = m(i, i).real();
    std::sort(eigs.begin(), eigs.end());
    return eigs;
  }
  throw NumericError("hermitian_eigenvalues: no convergence after " +
                     std::to_string(tol::kJacobiMaxSweeps) + " sweeps");
}

ComplexMatrix matrix_exp_diagonal(std::span<const double> phases) {
  if (!is_power_of_two(phases.size()))
    throw ShapeError("matrix_exp_diagonal: length " +
                     std::to_string(phases.size()) + " is not a power of two");
  ComplexMatrix out(phases.size(), phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i)
    out(i, i) = Complex{std::cos(phases[i]), std::sin(phases[i])};
  return out;
}

bool is_unitary(const ComplexMatrix& u, double tolerance) {
  if (!u.is_square()) return false;
  const ComplexMatrix gram = matmul(u, adjoint(u));
  return max_abs_diff(gram, ComplexMatrix::identity(u.rows())) <= tolerance;
}

StateVector StateVector::computational_basis(int n_qubits, std::size_t index) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (index >= dim)
    throw DomainError("computational_basis: index out of range");
  std::vector<Complex> amps(dim);
  amps[index] = 1.0;
  return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::from_amplitudes(int n_qubits, std::vector<Complex> amps) {
  if (n_qubits < 0) throw DomainError("StateVector: negative qubit count");
  if (amps.size() != (std::size_t{1} << n_qubits))
    throw ShapeError("StateVector: expected " +
                     std::to_string(std::size_t{1} << n_qubits) +
                     " amplitudes, got " + std::to_string(amps.size()));
  double norm2 = 0.0;
  for (const Complex& v : amps) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DomainError("StateVector: non-finite amplitude");
    norm2 += std::norm(v);
  }
  if (std::abs(norm2 - 1.0) > tol::kStateNorm)
    throw DomainError("StateVector: squared norm " + std::to_string(norm2) +
                      " deviates from 1");
  return StateVector(n_qubits, std::move(amps));
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw ShapeError("inner_product: dimension mismatch");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    sum += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  return sum;
}

StateVector apply(const ComplexMatrix& m, const StateVector& psi) {
  if (m.cols() != psi.dim())
    throw ShapeError("apply: matrix " + shape_str(m) + " on state of dim " +
                     std::to_string(psi.dim()));
  if (m.rows() != psi.dim())
    throw ShapeError("apply: operator must preserve the register dimension");
  std::vector<Complex> out(psi.dim());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j)
      acc += m(i, j) * psi.amplitudes()[j];
    out[i] = acc;
  }
  return StateVector::from_amplitudes(psi.n_qubits(), std::move(out));
}

DensityMatrix DensityMatrix::from_matrix(int n_qubits, ComplexMatrix m) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (!m.is_square() || m.rows() != dim)
    throw ShapeError("DensityMatrix: expected " + std::to_string(dim) + "x" +
                     std::to_string(dim) + ", got " + shape_str(m));
  if (!all_finite(m)) throw DomainError("DensityMatrix: non-finite entries");
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol::kDensityHermitian)
        throw DomainError("DensityMatrix: not Hermitian within tolerance");
  Complex tr = 0.0;
  for (std::size_t i = 0; i < dim; ++i) tr += m(i, i);
  if (std::abs(tr - Complex{1.0}) > tol::kDensityTrace)
    throw DomainError("DensityMatrix: trace deviates from 1 by " +
                      std::to_string(std::abs(tr - Complex{1.0})));
  const std::vector<double> eigs = hermitian_eigenvalues(m);
  if (eigs.front() < tol::kPsdFloor)
    throw DomainError("DensityMatrix: negative eigenvalue " +
                      std::to_string(eigs.front()));
  return DensityMatrix(n_qubits, std::move(m));
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  ComplexMatrix m(psi.dim(), psi.dim());
  for (std::size_t i = 0; i < psi.dim(); ++i)
    for (std::size_t j = 0; j < psi.dim(); ++j)
      m(i, j) = psi.amplitudes()[i] * std::conj(psi.amplitudes()[j]);
  return from_matrix(psi.n_qubits(), std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0 / static_cast<double>(dim);
  return DensityMatrix(n_qubits, std::move(m));
}

DensityMatrix DensityMatrix::equal_mixture(std::span<const StateVector> states) {
  if (states.empty()) throw DomainError("equal_mixture: empty state list");
  const int n = states.front().n_qubits();
  const std::size_t dim = states.front().dim();
  ComplexMatrix m(dim, dim);
  for (const StateVector& psi : states) {
    if (psi.n_qubits() != n)
      throw ShapeError("equal_mixture: mixed register sizes");
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        m(i, j) += psi.amplitudes()[i] * std::conj(psi.amplitudes()[j]);
  }
  const double w = 1.0 / static_cast<double>(states.size());
  for (Complex& v : m.entries()) v *= w;
  return from_matrix(n, std::move(m));
}

double real_expectation(const ComplexMatrix& obs, const DensityMatrix& rho) {
  if (!obs.is_square() || obs.rows() != rho.dim())
    throw ShapeError("real_expectation: observable shape mismatch");
  // Tr(obs * rho) without forming the product.
  Complex tr = 0.0;
  for (std::size_t i = 0; i < obs.rows(); ++i)
    for (std::size_t k = 0; k < obs.cols(); ++k)
      tr += obs(i, k) * rho.matrix()(k, i);
  return tr.real();
}

namespace gates {

ComplexMatrix identity(std::size_t n) { return ComplexMatrix::identity(n); }

ComplexMatrix pauli_x() {
  return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
}

ComplexMatrix pauli_y() {
  return ComplexMatrix::from_rows({{0.0, Complex{0.0, -1.0}},
                                   {Complex{0.0, 1.0}, 0.0}});
}

ComplexMatrix pauli_z() {
  return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
}

ComplexMatrix hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  return ComplexMatrix::from_rows({{r, r}, {r, -r}});
}

}  // namespace gates

}  // namespace nqe
