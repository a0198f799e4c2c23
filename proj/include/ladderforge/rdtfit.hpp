#pragma once

#include <string>
#include <vector>

#include "ladderforge/model.hpp"

// Power-law surface fitting and multiplier derivation.
//
// On a shot's hull the distortion is modelled as d = c * r^k1 * t^k2.  The
// fit is ordinary least squares on ln d = ln c + k1 ln r + k2 ln t.  Marginal
// prices of the surface at a hull point (r, t) are
//   lambda = -c * k1 * r^(k1-1) * t^k2,
//   mu     = -c * k2 * r^k1     * t^(k2-1),
// both positive exactly when k1 < 0 and k2 < 0.
namespace ladderforge {

// One fitting observation.  All three values must be positive and finite.
struct RdtSample {
    double rate = 0.0;
    double mse = 0.0;
    double time = 0.0;
};

// Least-squares fit of the power law.  Needs at least three samples with
// genuine spread in both ln rate and ln time; throws NumericError on
// insufficient data or a rank-deficient design (all rates equal, all times
// equal, or log-rates collinear with log-times).  r_squared is computed in
// the log domain and clamped to [0, 1]; a zero-variance target gives 1.
RdtFit fit_rdt(const std::vector<RdtSample>& samples);

// Marginal prices of the fitted surface at (rate, time).  Throws NumericError
// when the fit is not monotone (k1 >= 0 or k2 >= 0) — prices are never
// clamped into validity — or when rate/time are not positive and finite.
MultiplierPair multipliers(const RdtFit& fit, double rate, double time);

// analyze_shot output: the enriched record plus any per-shot warnings.
struct AnalyzeOutcome {
    ShotRecord shot;
    std::vector<std::string> warnings;
};

// Full per-shot analysis: hull filter, surface fit on the hull survivors,
// multipliers at every hull point.  Fit-quality problems (fewer than three
// hull points, degenerate design, non-monotone exponents) do not throw; they
// leave the affected fields empty and add a warning naming the shot.  Invalid
// point data throws, annotated with the shot id.  Re-running on its own
// output yields the same result.
AnalyzeOutcome analyze_shot(ShotRecord shot);

// analyze_shot over a whole dataset, parallel across shots with deterministic
// output order.  Does not validate structure; run validate_dataset first.
std::vector<AnalyzeOutcome> analyze_dataset(std::vector<ShotRecord> shots);

}  // namespace ladderforge
