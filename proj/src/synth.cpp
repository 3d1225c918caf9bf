#include "elmsol/synth.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "elmsol/error.hpp"
#include "elmsol/numfmt.hpp"
#include "elmsol/random.hpp"

namespace elmsol {

void SynthSpec::validate() const {
  if (count < 2) throw InvalidInputError("synthetic dataset needs at least 2 points");
  if (!std::isfinite(noise) || noise < 0.0) throw InvalidInputError("noise level must be finite and >= 0");
}

double synth_clean_target(const SolubilityRecord& r) {
  const double s = kSynthGasScale.at(static_cast<std::size_t>(r.idx - 1));
  return kSynthScale * s * (r.pressure / (r.pressure + 40.0)) * (0.5 + r.temperature / 300.0) *
         std::exp(-r.ionic_strength / 10.0) * (0.2 + r.gas_fraction(r.idx));
}

Dataset gen_synth(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  auto exponential = [&rng] {
    double e = 0.0;
    while (e == 0.0) e = -std::log(1.0 - rng.uniform01());
    return e;
  };

  std::vector<SolubilityRecord> records;
  records.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    SolubilityRecord r;
    r.temperature = rng.uniform(kTemperatureMinC, kTemperatureMaxC);
    r.pressure = rng.uniform(kPressureMinMpa, kPressureMaxMpa);
    r.ionic_strength = rng.uniform(0.0, kIonicStrengthMax);
    std::array<double, 5> e{};
    double total = 0.0;
    for (auto& v : e) {
      v = exponential();
      total += v;
    }
    r.c1 = e[0] / total;
    r.c2 = e[1] / total;
    r.c3 = e[2] / total;
    r.c4 = e[3] / total;
    r.idx = 1 + static_cast<int>(rng.below(4));

    const double clean = synth_clean_target(r);
    double noisy = 0.0;
    do {
      noisy = clean * (1.0 + spec.noise * rng.normal());
    } while (!(noisy > 0.0 && noisy < 1.0));
    r.solubility = noisy;
    records.push_back(r);
  }
  return Dataset(std::move(records), "synthetic v" + std::to_string(kSynthVersion) + " (n=" +
                                         std::to_string(spec.count) + ", seed=" + std::to_string(spec.seed) +
                                         ", noise=" + format_exact(spec.noise) + ")");
}

}  // namespace elmsol
