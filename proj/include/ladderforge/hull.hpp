#pragma once

#include <cstddef>
#include <vector>

#include "ladderforge/model.hpp"

// Operating-point filters in (rate, distortion, time) space.
//
// A point is worth encoding only if some positive price pair (lambda, mu)
// makes it a cheapest choice under the cost J = mse + lambda * rate_kbps +
// mu * cpu_s.  filter_hull_3d keeps exactly those points; filter_pareto is
// the cheaper dominance-only prefilter.
namespace ladderforge {

// Price search box.  Prices below kLambdaMin are treated as zero (which would
// admit the whole Pareto front); kLambdaMax bounds the search so feasibility
// is decidable.  Both bounds apply to lambda and mu alike.
inline constexpr double kLambdaMin = 1e-9;
inline constexpr double kLambdaMax = 1e15;

// Indices of points not dominated by any other point, ascending.  q dominates
// p when q is <= p in all of (rate, mse, cpu) and strictly better in at least
// one.  Of exactly identical points only the lowest index survives.
// Preconditions: all metrics positive and finite.  O(n^2).
std::vector<std::size_t> filter_pareto(const std::vector<OperatingPoint>& points);

// Indices of points that minimise J = mse + lambda * rate + mu * cpu for at
// least one price pair in [kLambdaMin, kLambdaMax]^2, ascending.  Ties count:
// a point that merely equals the minimum somewhere still survives.  Always a
// subset of filter_pareto; of identical points only the lowest index
// survives.  Preconditions as for filter_pareto.
std::vector<std::size_t> filter_hull_3d(const std::vector<OperatingPoint>& points);

}  // namespace ladderforge
