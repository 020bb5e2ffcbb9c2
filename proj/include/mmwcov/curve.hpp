// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mmwcov {

struct CurveRow {
  double x = 0.0;       ///< threshold in dB, or a power level, or a sector exponent
  double value = 0.0;   ///< probability
  double stderr_ = 0.0; ///< 0 for deterministic engines
  std::size_t n = 0;    ///< trials behind the row; 0 for deterministic engines
};

struct CoverageCurve {
  std::string engine;  ///< "mc", "analytic" or "dominant"
  std::string policy;  ///< "P1", "P2", "P3"
  std::vector<CurveRow> rows;
};

}  // namespace mmwcov
