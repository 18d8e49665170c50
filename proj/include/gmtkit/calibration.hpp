#pragma once

#include <limits>

// Frozen regression values, measured once on the fixed seeded corpora of the
// verification suites and pinned here. A NaN means "not yet calibrated": the
// affected suite then prints the measured value and fails, so an
// uncalibrated build cannot pass silently. Reruns are deterministic, so the
// measured quantities must reproduce the frozen values exactly (see the
// per-suite tolerances).
namespace gmtkit::calibration {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// max over the 20-measure corpus of |cauchy - curvature/6| / (c0^2 * mass)
constexpr double kMelnikovK = kNaN;

// packing ratio band for the Cantor family, k = 2..5, diagonal cone
constexpr double kPackingRatio[4] = {kNaN, kNaN, kNaN, kNaN};
constexpr double kPackingBandRel = 0.20;

// corona verification item (c): frozen cap on max Theta(2B_Q)/Theta(2B_R)
// over the corona corpus
constexpr double kCoronaThetaRatioMax = kNaN;

// appendix reverse-inequality constant on the segment fixture
constexpr double kReverseC = kNaN;

}  // namespace gmtkit::calibration
