#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ladderforge/model.hpp"

// Cross-shot assembly: sweep price pairs over analyzed shots, pick the
// cheapest point per shot at each pair, and query the resulting table for
// bitrate-ladder rungs.
namespace ladderforge {

// Sorted, deduplicated lambda and mu axes gathered from per-shot multipliers.
struct MultiplierGrid {
    std::vector<double> lambdas;  // strictly increasing, positive
    std::vector<double> mus;      // strictly increasing, positive
    double dedup_tolerance = 1e-3;
};

// Collects every per-point multiplier across shots into the two axes.  Values
// within dedup_tol of each other in log space merge, keeping the smaller;
// tolerance 0 keeps all distinct values exactly.  Shots without multipliers
// contribute nothing; throws NumericError when no shot contributes at all.
MultiplierGrid build_multiplier_grid(const std::vector<ShotRecord>& shots,
                                     double dedup_tol = 1e-3);

// Picks, for each shot, the hull point minimising J = mse + lambda * rate +
// mu * cpu, and returns the combined representation.  Exact cost ties break
// by smaller cpu, then smaller rate, then lower point index, so results do
// not depend on hull ordering quirks.  Every shot must be analyzed with a
// non-empty hull (NumericError naming the first offender otherwise); the
// pair must be positive and finite (InputError).
Representation assemble(const std::vector<ShotRecord>& shots, const MultiplierPair& pair);

// One assemble per grid pair, rows ordered lexicographically by (lambda, mu).
// Work is parallel across lambda values; output is identical for any worker
// count.
std::vector<RdtTableRow> generate_table(const std::vector<ShotRecord>& shots,
                                        const MultiplierGrid& grid);

// Streaming variant: emits rows in the same lexicographic order without
// holding the whole table.  Rows are computed in parallel batches of lambda
// values; emit is called on the calling thread.
void for_each_table_row(const std::vector<ShotRecord>& shots, const MultiplierGrid& grid,
                        const std::function<void(const RdtTableRow&)>& emit);

// Ladder lookup request: bitrate targets (ascending, positive), the relative
// half-width of the acceptance band around each target, an optional cap on
// total CPU seconds, and an optional reference for complexity reporting.
struct LadderQuery {
    std::vector<double> target_rates;
    double rate_tolerance = 0.10;
    std::optional<double> time_budget;
    std::optional<Representation> reference;
};

// Result for one target: the chosen row, or nothing when no row qualifies.
struct LadderEntry {
    double target = 0.0;
    std::optional<RdtTableRow> row;
};

// For each target picks, among rows whose weighted rate lies within
// [target*(1-tol), target*(1+tol)] and whose total time respects the budget,
// the row with minimal weighted distortion; ties break by smaller time, then
// smaller rate, then smaller (lambda, mu).  Targets that match no row yield
// an empty entry rather than an error.
std::vector<LadderEntry> query_ladder(const std::vector<RdtTableRow>& table,
                                      const LadderQuery& query);

// Total-CPU ratio of candidate over reference, in percent.  Both
// representations must be non-empty; a zero reference time is a NumericError.
double complexity_ratio(const Representation& candidate, const Representation& reference);

// Consistency diagnostic for one table row.  t_prime is the mean of
// c_prime_i * t_i over the selected points; at a true Lagrangian optimum of
// the fitted surfaces, lambda * mean(r_i) equals mu * t_prime, so ratio is 1.
struct TangencyReport {
    double t_prime = 0.0;
    double ratio = 0.0;
};

// Requires a fit on every shot (NumericError otherwise).
TangencyReport tangency_diagnostic(const std::vector<ShotRecord>& shots,
                                   const RdtTableRow& row);

}  // namespace ladderforge
