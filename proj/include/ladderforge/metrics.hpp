#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ladderforge/assembler.hpp"
#include "ladderforge/model.hpp"

// Rate-quality curve comparison.
//
// bd_rate reports the average bitrate difference (percent) between two curves
// at equal quality: both curves are interpolated as ln(rate) over quality
// with a monotone piecewise cubic (Fritsch-Carlson), integrated in closed
// form over the shared quality range, and the mean log difference is mapped
// back through exp.  Negative values mean the test curve needs fewer bits.
namespace ladderforge {

struct RdCurvePoint {
    double rate_kbps = 0.0;
    double quality_db = 0.0;
};

// Rate-quality samples sorted by ascending rate.  Valid curves for bd_rate
// need at least four points, strictly increasing rates and strictly
// increasing qualities.
struct RdCurve {
    std::vector<RdCurvePoint> points;
};

struct RdCurveResult {
    RdCurve curve;
    std::vector<std::string> warnings;  // e.g. quality drops while rate grows
};

// Builds a curve from ladder representations: rate is the weighted aggregate
// rate, quality the PSNR of the weighted aggregate distortion.  Points are
// sorted by rate; duplicate rates raise NumericError naming the offending
// value, fewer than four points raise NumericError, and non-monotone quality
// is reported as a warning, not an error.
RdCurveResult curve_from_representations(const std::vector<Representation>& reps,
                                         int bit_depth);

// Average bitrate change of test versus anchor at equal quality, in percent.
// Throws NumericError on invalid curves (see RdCurve) or when the quality
// ranges do not overlap in an interval of positive length.
double bd_rate(const RdCurve& test, const RdCurve& anchor);

// Ladder-versus-ladder summary over the rungs present in both.
struct ComparisonReport {
    double bd_rate_pct = 0.0;           // bitrate change at equal quality
    double complexity_ratio_pct = 0.0;  // total CPU of ours over reference
    std::size_t rungs_compared = 0;
};

// Both ladders must share the same target list (InputError otherwise); rungs
// found in both ladders form the comparison set, which must have at least
// four entries (NumericError otherwise).
ComparisonReport comparison_report(const std::vector<LadderEntry>& ours,
                                   const std::vector<LadderEntry>& reference,
                                   int bit_depth = 10);

}  // namespace ladderforge
