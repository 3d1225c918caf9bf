#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "elmsol/dataset.hpp"

namespace elmsol {

// Synthetic stand-in for the experimental databank (generator version 1).
//
// Target:
//   eta = K * s(idx) * P/(P + 40) * (0.5 + T/300) * exp(-I/10) * (0.2 + c_idx)
// with K = 4e-3 and s = [1, 0.3, 0.1, 0.03], which puts eta below ~5e-3.
// Noise is multiplicative: eta * (1 + noise * z), z standard normal.
//
// Per point, from Rng(seed), in this order:
//   T   uniform [1.4, 245.15) degC
//   P   uniform [0.3, 100) MPa
//   I   uniform [0, 37.35) mol/kg
//   e1..e5 = -log(1 - u), each redrawn while 0; c_k = e_k / sum(e), k = 1..4
//       (flat Dirichlet; e5 is the non-hydrocarbon remainder)
//   idx 1 + below(4)
//   z   normal(), always drawn (so inputs do not depend on the noise level);
//       redrawn while the noisy value falls outside (0, 1)

inline constexpr int kSynthVersion = 1;
inline constexpr double kSynthScale = 4e-3;
inline constexpr std::array<double, 4> kSynthGasScale = {1.0, 0.3, 0.1, 0.03};

struct SynthSpec {
  std::size_t count = 1000;
  std::uint64_t seed = 42;
  double noise = 0.05;  // relative standard deviation

  /// Throws InvalidInputError on count < 2 or negative / non-finite noise.
  void validate() const;
};

/// Noise-free target for a record's inputs.
double synth_clean_target(const SolubilityRecord& record);

Dataset gen_synth(const SynthSpec& spec);

}  // namespace elmsol
