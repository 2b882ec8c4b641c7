#pragma once

#include <cstdint>
#include <optional>

#include "nqe/feature_map.hpp"
#include "nqe/qmath.hpp"

namespace nqe {

// Result of one probe-qubit estimation run. shots == 0 marks exact mode;
// expectation_y is only available in exact mode, where it is a diagnostic
// (training consumes the real part alone).
struct Dqc1Outcome {
  double expectation_z = 0.0;
  std::optional<double> expectation_y;
  std::uint64_t shots = 0;
  double std_error = 0.0;
};

// Shot budget meeting a Hoeffding accuracy guarantee, see plan_shots.
struct ShotPlan {
  double epsilon = 0.0;
  double failure_prob = 0.0;
  std::uint64_t shots = 0;
};

// Normalized Hilbert-Schmidt overlap Tr(v1 v2^dag) / dim for unitaries of
// equal power-of-two dimension. This ordering matches what the probe circuit
// below estimates.
Complex hs_inner_exact(const ComplexMatrix& v1, const ComplexMatrix& v2);

// The interferometric gate sequence on the probe-extended register
// (probe = most significant qubit, encoding register below it):
//   H_probe . controlled-V(phi2)^dag . controlled-V(phi1) . H_probe,
// applied right to left. Controlled maps act on probe state |1>.
ComplexMatrix build_dqc1_sequence(const FeatureMapConfig& cfg,
                                  const FeatureAngles& phi1,
                                  const FeatureAngles& phi2);

// Evolves rho_0 = |0><0| (x) I/2^n through the sequence and reads the probe:
//   expectation_z = Re Tr[V(phi1) V(phi2)^dag] / 2^n.
// expectation_y reports the imaginary part. Sign convention: the closing
// Hadamard conjugates sigma_y to -sigma_y, so the raw probe moment is negated
// to make expectation_y equal +Im of the overlap; a dedicated test documents
// this choice.
Dqc1Outcome dqc1_exact(const FeatureMapConfig& cfg, const FeatureAngles& phi1,
                       const FeatureAngles& phi2);

// Draws `shots` independent +/-1 probe readouts with
// P(+1) = (1 + exact expectation_z) / 2 and returns their mean together with
// the standard error of the mean. Deterministic for a fixed seed.
Dqc1Outcome dqc1_sampled(const FeatureMapConfig& cfg, const FeatureAngles& phi1,
                         const FeatureAngles& phi2, std::uint64_t shots,
                         std::uint64_t seed);

// Shot count guaranteeing |estimate - mean| <= epsilon with probability at
// least 1 - failure_prob for +/-1 outcomes (Hoeffding):
//   shots = ceil(2 ln(2 / failure_prob) / epsilon^2).
// Requires 0 < epsilon <= 2 and 0 < failure_prob < 1.
ShotPlan plan_shots(double epsilon, double failure_prob);

}  // namespace nqe
