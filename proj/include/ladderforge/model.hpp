#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain types for the ladderforge toolkit: operating points measured per
// shot, per-shot analysis results (hull membership, fitted surface, pricing
// multipliers), and cross-shot representations selected by a (lambda, mu) pair.
namespace ladderforge {

// Bad user input or a violated call contract: malformed files, inconsistent
// configs, out-of-range arguments.  Maps to process exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Degenerate or numerically unusable data: rank-deficient fits, empty grids,
// non-overlapping curves.  Maps to process exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Encoder knob settings for one encode of one shot.
struct EncodeParams {
    int preset_idx = 0;  // rank in the configured preset list; 0 = fastest
    int width = 0;       // coded luma width, pixels
    int height = 0;      // coded luma height, pixels
    int crf = 0;         // constant-rate-factor quality index
};

// One measured encode: params plus the three observed metrics.  Distortion is
// MSE after upsampling back to the source resolution, so points at different
// coded resolutions are directly comparable.
struct OperatingPoint {
    EncodeParams params;
    double rate_kbps = 0.0;  // average bitrate
    double mse = 0.0;        // mean squared error at source resolution
    double cpu_s = 0.0;      // single-threaded user-space CPU seconds
};

// Fitted power-law surface d = c * r^k1 * t^k2 over a shot's hull points,
// estimated by least squares in the log domain.
struct RdtFit {
    double c = 0.0;          // scale; positive
    double k1 = 0.0;         // rate exponent; negative for monotone data
    double k2 = 0.0;         // time exponent; negative for monotone data
    double r_squared = 0.0;  // log-domain goodness of fit, in [0, 1]
    double c_prime = 0.0;    // k1 / k2, the rate-time exchange ratio
};

// Prices for one operating point: lambda prices rate, mu prices time.  Both
// are strictly positive when derived from a monotone fit.
struct MultiplierPair {
    double lambda = 0.0;
    double mu = 0.0;
};

// All measurements for one shot, plus analysis results once populated.
// hull_indices index into points, ascending; multipliers (when present) align
// one-to-one with hull_indices.  multipliers are only present when fit is.
struct ShotRecord {
    std::string shot_id;
    double duration_s = 1.0;
    std::vector<OperatingPoint> points;
    std::optional<std::vector<std::size_t>> hull_indices;
    std::optional<RdtFit> fit;
    std::optional<std::vector<MultiplierPair>> multipliers;
};

// Unweighted per-selection totals, kept alongside the duration-weighted
// aggregates because cost minimisation and cap checks work on plain sums.
struct MetricSums {
    double rate = 0.0;        // sum of selected rate_kbps
    double distortion = 0.0;  // sum of selected mse
    double time = 0.0;        // sum of selected cpu_s
};

// One cross-shot operating choice: exactly one point index per shot, in shot
// order, plus cached aggregates.  agg_rate / agg_distortion are
// duration-weighted means; agg_time is the total CPU cost of the selection.
struct Representation {
    std::vector<std::size_t> selection;
    double agg_rate = 0.0;
    double agg_distortion = 0.0;
    double agg_time = 0.0;
    MetricSums sums;
};

// One row of the sweep table: the price pair and the representation it picks.
struct RdtTableRow {
    MultiplierPair multipliers;
    Representation representation;
};

// PSNR (dB) for an MSE measured on samples with the given bit depth.
// mse must be positive and finite; bit_depth one of 8, 10, 12.
double psnr_from_mse(double mse, int bit_depth);

// Inverse of psnr_from_mse.
double mse_from_psnr(double psnr_db, int bit_depth);

// One problem found by validate_dataset.  Hard issues make the dataset
// unusable downstream; soft ones are advisories.
struct ValidationIssue {
    bool hard = false;
    std::string shot_id;  // empty for dataset-level issues
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const;                          // true when no hard issue exists
    std::vector<std::string> messages() const;  // "shot 'x': ..." formatted
};

// Checks structural invariants: unique shot ids, positive durations, positive
// finite metrics, positive dimensions, no duplicate (preset, size, crf)
// triples within a shot, at least one point per shot.
ValidationReport validate_dataset(const std::vector<ShotRecord>& shots);

// Builds a Representation from an explicit choice of one point per shot and
// recomputes every aggregate from the underlying points.  selection must have
// exactly one valid point index per shot, in shot order.
Representation make_representation(const std::vector<ShotRecord>& shots,
                                   std::vector<std::size_t> selection);

}  // namespace ladderforge
