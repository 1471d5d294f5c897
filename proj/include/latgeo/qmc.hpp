#pragma once

// Deterministic quasi-Monte Carlo integration: Halton points with a fixed
// number of random-shift replicas (Cranley-Patterson rotation).  The shifts
// come from a seeded generator, so every run reproduces the same estimate and
// the spread of per-shift means yields an honest standard error.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace latgeo {

struct QmcEstimate {
  double value = 0;
  double stderr_est = 0;
  int64_t samples = 0;
};

// Integrates f over the axis-aligned box (per-dimension [lo, hi] pairs).
QmcEstimate qmc_integrate(const std::vector<std::pair<double, double>>& box,
                          const std::function<double(const std::vector<double>&)>& f,
                          int64_t samples = int64_t(1) << 16, int shifts = 16,
                          uint64_t seed = 0x5EED);

}  // namespace latgeo
