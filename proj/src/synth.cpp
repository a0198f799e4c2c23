#include "ladderforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string_view>

#include "ladderforge/hull.hpp"

namespace ladderforge {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform draw in (0, 1] from the top 53 bits of the engine output.
double uniform_open01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller, cosine branch only.  std::normal_distribution is not used
// because its algorithm is implementation-defined and would break the
// same-output-everywhere contract of gen_shot.
double standard_normal(std::mt19937_64& rng) {
    const double u1 = uniform_open01(rng);
    const double u2 = uniform_open01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

long pixels_of(const std::pair<int, int>& res) {
    return static_cast<long>(res.first) * res.second;
}

}  // namespace

SynthConfig default_synth_config() {
    SynthConfig cfg;
    // Time factors follow a 2.2x-per-rank curve; skipped ranks (2, 5) widen
    // the gaps like real encoder ladders do.
    cfg.presets = {{0, "ultrafast", 1.0},      {1, "superfast", 2.2},
                   {3, "faster", 4.84},        {4, "fast", 10.648},
                   {6, "slow", 23.4256},       {7, "slower", 51.5363},
                   {8, "veryslow", 113.3799}};
    cfg.resolutions = {{3840, 2160}, {1920, 1080}, {1280, 720}, {960, 540}};
    return cfg;
}

void validate_synth_config(const SynthConfig& cfg) {
    auto fail = [](const std::string& msg) { throw InputError("synth config: " + msg); };
    if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) fail("c must be positive");
    if (!(cfg.k1 < 0.0)) fail("k1 must be negative");
    if (!(cfg.k2 < 0.0)) fail("k2 must be negative");
    if (!(cfg.r0_kbps > 0.0) || !std::isfinite(cfg.r0_kbps)) fail("r0_kbps must be positive");
    if (!(cfg.t0_s > 0.0) || !std::isfinite(cfg.t0_s)) fail("t0_s must be positive");
    if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
        fail("noise_sigma must be non-negative");
    }
    if (!(cfg.duration_s > 0.0) || !std::isfinite(cfg.duration_s)) {
        fail("duration_s must be positive");
    }
    if (cfg.crf_range.step <= 0) fail("crf step must be positive");
    if (cfg.crf_range.min > cfg.crf_range.max) fail("crf min must not exceed max");
    if (cfg.presets.empty()) fail("at least one preset required");
    for (std::size_t i = 0; i < cfg.presets.size(); ++i) {
        const auto& p = cfg.presets[i];
        if (!(p.time_factor > 0.0) || !std::isfinite(p.time_factor)) {
            fail("preset time factors must be positive");
        }
        if (i > 0) {
            if (cfg.presets[i - 1].index >= p.index) {
                fail("preset indices must be strictly increasing");
            }
            if (!(cfg.presets[i - 1].time_factor < p.time_factor)) {
                fail("preset time factors must be strictly increasing");
            }
        }
    }
    if (cfg.resolutions.empty()) fail("at least one resolution required");
    std::set<long> areas;
    for (const auto& res : cfg.resolutions) {
        if (res.first <= 0 || res.second <= 0) fail("resolutions must be positive");
        if (!areas.insert(pixels_of(res)).second) {
            fail("resolution areas must be distinct");
        }
    }
}

ShotRecord gen_shot(const SynthConfig& cfg, const std::string& shot_id) {
    validate_synth_config(cfg);
    if (shot_id.empty()) throw InputError("synth: shot id must not be empty");

    std::mt19937_64 rng(splitmix64(splitmix64(cfg.seed) ^ fnv1a64(shot_id)));

    long max_pixels = 0;
    for (const auto& res : cfg.resolutions) max_pixels = std::max(max_pixels, pixels_of(res));

    std::vector<int> crfs;
    for (int q = cfg.crf_range.min; q <= cfg.crf_range.max; q += cfg.crf_range.step) {
        crfs.push_back(q);
    }

    ShotRecord shot;
    shot.shot_id = shot_id;
    shot.duration_s = cfg.duration_s;
    shot.points.reserve(cfg.presets.size() * cfg.resolutions.size() * crfs.size());
    for (const auto& preset : cfg.presets) {
        for (const auto& res : cfg.resolutions) {
            const double px_ratio =
                static_cast<double>(pixels_of(res)) / static_cast<double>(max_pixels);
            for (const int crf : crfs) {
                OperatingPoint op;
                op.params = {preset.index, res.first, res.second, crf};
                op.rate_kbps = cfg.r0_kbps * std::pow(px_ratio, 0.9) *
                               std::exp2(-(crf - cfg.crf_range.min) / 6.0);
                op.cpu_s = cfg.t0_s * px_ratio * preset.time_factor;
                const double noise = std::exp(cfg.noise_sigma * standard_normal(rng));
                op.mse = cfg.c * std::pow(op.rate_kbps, cfg.k1) *
                         std::pow(op.cpu_s, cfg.k2) * noise;
                shot.points.push_back(op);
            }
        }
    }

    // Generator self-checks: the documented monotonicity must hold exactly.
    const std::size_t nr = cfg.resolutions.size();
    const std::size_t nq = crfs.size();
    auto at = [&](std::size_t p, std::size_t r, std::size_t q) -> const OperatingPoint& {
        return shot.points[(p * nr + r) * nq + q];
    };
    std::vector<std::size_t> res_by_area(nr);
    for (std::size_t i = 0; i < nr; ++i) res_by_area[i] = i;
    std::sort(res_by_area.begin(), res_by_area.end(), [&](std::size_t a, std::size_t b) {
        return pixels_of(cfg.resolutions[a]) < pixels_of(cfg.resolutions[b]);
    });
    for (std::size_t p = 0; p < cfg.presets.size(); ++p) {
        for (std::size_t r = 0; r < nr; ++r) {
            for (std::size_t q = 1; q < nq; ++q) {
                if (!(at(p, r, q).rate_kbps < at(p, r, q - 1).rate_kbps)) {
                    throw NumericError("synth: rate not decreasing in crf");
                }
            }
        }
        for (std::size_t q = 0; q < nq; ++q) {
            for (std::size_t r = 1; r < nr; ++r) {
                const auto& smaller = at(p, res_by_area[r - 1], q);
                const auto& larger = at(p, res_by_area[r], q);
                if (!(smaller.rate_kbps < larger.rate_kbps)) {
                    throw NumericError("synth: rate not increasing in resolution");
                }
                if (!(smaller.cpu_s < larger.cpu_s)) {
                    throw NumericError("synth: time not increasing in resolution");
                }
            }
        }
    }
    for (std::size_t p = 1; p < cfg.presets.size(); ++p) {
        for (std::size_t r = 0; r < nr; ++r) {
            for (std::size_t q = 0; q < nq; ++q) {
                if (!(at(p - 1, r, q).cpu_s < at(p, r, q).cpu_s)) {
                    throw NumericError("synth: time not increasing in preset rank");
                }
            }
        }
    }
    return shot;
}

namespace {

struct Line {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;  // a * l + b * m = c
};

// Matches the slack scaling of the production filter (see hull.cpp): wide
// enough to absorb vertex rounding, narrow enough that no true margin of the
// price box falls inside it.
double oracle_slack_tol(double a, double b, double c, double l, double m) {
    return 1e-12 * (std::fabs(a * l) + std::fabs(b * m) + std::fabs(c));
}

}  // namespace

std::vector<std::size_t> oracle_hull(const std::vector<OperatingPoint>& points) {
    const std::size_t n = points.size();
    if (n > 400) throw InputError("oracle_hull: too many points (limit 400)");
    for (const auto& op : points) {
        if (!(op.rate_kbps > 0.0) || !std::isfinite(op.rate_kbps) || !(op.mse > 0.0) ||
            !std::isfinite(op.mse) || !(op.cpu_s > 0.0) || !std::isfinite(op.cpu_s)) {
            throw NumericError("oracle_hull: metrics must be positive and finite");
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < n; ++p) {
        // Of identical points only the first can be selected.
        bool duplicate_of_earlier = false;
        for (std::size_t i = 0; i < p && !duplicate_of_earlier; ++i) {
            duplicate_of_earlier = points[i].rate_kbps == points[p].rate_kbps &&
                                   points[i].mse == points[p].mse &&
                                   points[i].cpu_s == points[p].cpu_s;
        }
        if (duplicate_of_earlier) continue;

        // p beats q at (l, m) iff a*l + b*m <= c with these coefficients.
        std::vector<Line> constraints;
        constraints.reserve(n - 1);
        for (std::size_t q = 0; q < n; ++q) {
            if (q == p) continue;
            constraints.push_back({points[p].rate_kbps - points[q].rate_kbps,
                                   points[p].cpu_s - points[q].cpu_s,
                                   points[q].mse - points[p].mse});
        }

        std::vector<Line> lines = constraints;
        lines.push_back({1.0, 0.0, kLambdaMin});
        lines.push_back({1.0, 0.0, kLambdaMax});
        lines.push_back({0.0, 1.0, kLambdaMin});
        lines.push_back({0.0, 1.0, kLambdaMax});

        auto feasible_at = [&](double l, double m) {
            if (!std::isfinite(l) || !std::isfinite(m)) return false;
            if (l < kLambdaMin * (1.0 - 1e-12) || l > kLambdaMax * (1.0 + 1e-12) ||
                m < kLambdaMin * (1.0 - 1e-12) || m > kLambdaMax * (1.0 + 1e-12)) {
                return false;
            }
            for (const auto& h : constraints) {
                if (h.a * l + h.b * m > h.c + oracle_slack_tol(h.a, h.b, h.c, l, m)) {
                    return false;
                }
            }
            return true;
        };

        // If the feasible region is non-empty it has a point where two of the
        // boundary lines meet, so testing every pairwise intersection decides
        // feasibility.
        bool feasible = false;
        for (std::size_t i = 0; i < lines.size() && !feasible; ++i) {
            for (std::size_t j = i + 1; j < lines.size() && !feasible; ++j) {
                const Line& u = lines[i];
                const Line& v = lines[j];
                const double det = u.a * v.b - v.a * u.b;
                const double det_scale = std::fabs(u.a * v.b) + std::fabs(v.a * u.b);
                if (std::fabs(det) <= 1e-14 * det_scale) continue;  // parallel
                const double l = (u.c * v.b - v.c * u.b) / det;
                const double m = (u.a * v.c - v.a * u.c) / det;
                feasible = feasible_at(l, m);
            }
        }
        if (feasible) out.push_back(p);
    }
    return out;
}

std::optional<Representation> oracle_best_constrained(
    const std::vector<ShotRecord>& shots, double rate_cap, double time_cap) {
    if (shots.empty()) throw InputError("oracle_best_constrained: no shots");
    if (!(rate_cap > 0.0) || !std::isfinite(rate_cap) || !(time_cap > 0.0) ||
        !std::isfinite(time_cap)) {
        throw InputError("oracle_best_constrained: caps must be positive and finite");
    }
    double combos = 1.0;
    for (const auto& shot : shots) {
        if (!shot.hull_indices || shot.hull_indices->empty()) {
            throw InputError("oracle_best_constrained: shot '" + shot.shot_id +
                             "' has no hull");
        }
        combos *= static_cast<double>(shot.hull_indices->size());
        if (combos > 1e6) {
            throw InputError("oracle_best_constrained: combination count exceeds 10^6");
        }
    }

    const std::size_t m = shots.size();
    std::vector<std::size_t> counter(m, 0);  // position within each hull list
    std::vector<std::size_t> best;
    double best_d = 0.0, best_t = 0.0, best_r = 0.0;
    bool found = false;
    while (true) {
        double sum_r = 0.0, sum_d = 0.0, sum_t = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& op = shots[i].points[(*shots[i].hull_indices)[counter[i]]];
            sum_r += op.rate_kbps;
            sum_d += op.mse;
            sum_t += op.cpu_s;
        }
        if (sum_r <= rate_cap && sum_t <= time_cap) {
            bool better = !found;
            if (found) {
                if (sum_d != best_d) {
                    better = sum_d < best_d;
                } else if (sum_t != best_t) {
                    better = sum_t < best_t;
                } else if (sum_r != best_r) {
                    better = sum_r < best_r;
                } else {
                    std::vector<std::size_t> sel(m);
                    for (std::size_t i = 0; i < m; ++i) {
                        sel[i] = (*shots[i].hull_indices)[counter[i]];
                    }
                    better = sel < best;
                }
            }
            if (better) {
                found = true;
                best_d = sum_d;
                best_t = sum_t;
                best_r = sum_r;
                best.resize(m);
                for (std::size_t i = 0; i < m; ++i) {
                    best[i] = (*shots[i].hull_indices)[counter[i]];
                }
            }
        }
        // Odometer increment over the hull lists.
        std::size_t pos = 0;
        while (pos < m) {
            if (++counter[pos] < shots[pos].hull_indices->size()) break;
            counter[pos] = 0;
            ++pos;
        }
        if (pos == m) break;
    }
    if (!found) return std::nullopt;
    return make_representation(shots, std::move(best));
}

}  // namespace ladderforge
