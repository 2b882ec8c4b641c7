#pragma once

#include <vector>

#include "nqe/qmath.hpp"

namespace nqe {

// Register geometry of the ZZ feature map.
//
// Qubit indexing convention, used everywhere in this toolkit: qubit 1 is the
// most significant bit of a computational basis index. The Pauli-Z eigenvalue
// of qubit k on basis state b is therefore +1 when bit (n - k) of b is clear
// and -1 when it is set. ZZ couplings run along the open chain (k, k+1);
// there is no periodic wrap term, which is what makes 2n-1 angles drive an
// n-qubit map.
struct FeatureMapConfig {
  int n_qubits = 3;
  int layers = 1;

  void validate() const;
};

// The 2n-1 rotation angles of one feature-map layer: entries [0, n) multiply
// single-Z terms, entries [n, 2n-1) multiply neighboring ZZ terms. Radians.
struct FeatureAngles {
  std::vector<double> values;

  FeatureAngles() = default;
  explicit FeatureAngles(std::vector<double> v);
};

// Phase picked up by basis state b under the diagonal exponent:
//   theta_b = sum_k phi_k z_k(b) + sum_k phi_{n+k} z_k(b) z_{k+1}(b).
// Returned for every b in [0, 2^n). Shared by the map construction and by
// closed-form diagnostics.
std::vector<double> diagonal_phases(const FeatureMapConfig& cfg,
                                    const FeatureAngles& phi);

// The embedding unitary: {exp[i sum_k phi_k Z_k + phi_{n+k} Z_k Z_{k+1}]
// H^(x)n}^layers. Each layer reuses the same angles. The exponent is diagonal
// in the computational basis, so a layer is a diagonal phase matrix times a
// Hadamard on every qubit.
ComplexMatrix build_feature_map(const FeatureMapConfig& cfg,
                                const FeatureAngles& phi);

// The embedded pure state: feature map applied to |0...0>.
StateVector embed_state(const FeatureMapConfig& cfg, const FeatureAngles& phi);

}  // namespace nqe
