#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ladderforge/model.hpp"

// Synthetic dataset generation with known ground truth, plus brute-force
// oracles used to check the fast implementations.
//
// Generated points lie on (or, with noise, log-normally around) an exact
// power-law surface d = c * r^k1 * t^k2, over a full preset x resolution x
// quality grid.  Rates fall with the quality index and rise with resolution;
// times rise with preset slowness and resolution.  Generation is a pure
// function of (config, shot_id): the generator never consults platform
// defaults or global state.
namespace ladderforge {

// One encoder preset: its index (rank in speed order), a display name, and a
// CPU-time factor relative to the fastest preset.
struct PresetSpec {
    int index = 0;
    std::string name;
    double time_factor = 1.0;
};

// Quality sweep: crf values min, min+step, ..., up to and including max when
// the step lands on it.
struct CrfRange {
    int min = 0;
    int max = 0;
    int step = 1;
};

struct SynthConfig {
    double c = 100.0;   // surface scale; positive
    double k1 = -0.8;   // rate exponent; negative
    double k2 = -0.3;   // time exponent; negative
    std::vector<PresetSpec> presets;            // strictly increasing index & factor
    std::vector<std::pair<int, int>> resolutions;  // (width, height), distinct areas
    CrfRange crf_range{19, 41, 2};
    double r0_kbps = 20000.0;  // rate of the largest resolution at crf min
    double t0_s = 30.0;        // time of the largest resolution on the fastest preset
    double noise_sigma = 0.0;  // log-normal distortion noise; 0 = exact surface
    std::uint64_t seed = 0;
    double duration_s = 1.0;   // duration stamped on generated shots
};

// Seven presets spanning a ~113x time range, four resolutions from 2160p down
// to 540p, twelve crf steps: a 336-point grid per shot.
SynthConfig default_synth_config();

// Throws InputError on any violated config invariant.
void validate_synth_config(const SynthConfig& cfg);

// Generates the full grid for one shot.  Point order is presets (config
// order), then resolutions (config order), then crf ascending.  Noise draws
// come from a portable generator seeded by (seed, shot_id), so output is
// identical across runs and thread counts.  Generator self-checks verify the
// documented rate/time monotonicity and throw NumericError if violated.
ShotRecord gen_shot(const SynthConfig& cfg, const std::string& shot_id);

// Reference implementation of the hull filter, by brute force: for each
// point, enumerate every candidate vertex of its feasible price region (all
// pairwise intersections of constraint and box boundary lines) and test them
// against all constraints.  Deliberately shares no search logic with
// filter_hull_3d.  Throws InputError on more than 400 points (cost grows as
// n^3 per point).
std::vector<std::size_t> oracle_hull(const std::vector<OperatingPoint>& points);

// Reference constrained optimiser: enumerates every cross-shot combination of
// hull points and returns the representation minimising total distortion
// subject to total rate <= rate_cap and total time <= time_cap (plain sums,
// like the Lagrangian cost).  Ties break by smaller total time, then total
// rate, then lexicographic selection.  Requires every shot analyzed with a
// non-empty hull and the product of hull sizes at most 10^6 (InputError
// otherwise).  Returns nullopt when no combination satisfies the caps.
std::optional<Representation> oracle_best_constrained(
    const std::vector<ShotRecord>& shots, double rate_cap, double time_cap);

}  // namespace ladderforge
