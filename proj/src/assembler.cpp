#include "ladderforge/assembler.hpp"

#include <algorithm>
#include <cmath>

#include "ladderforge/util.hpp"

namespace ladderforge {

namespace {

std::vector<double> dedup_sorted(std::vector<double> values, double tol) {
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    for (const double v : values) {
        // Merge into the current anchor while within tol in log space; the
        // anchor is the smallest member of its cluster by construction.
        if (out.empty() || std::log(v / out.back()) > tol) out.push_back(v);
    }
    return out;
}

void require_analyzed(const std::vector<ShotRecord>& shots) {
    if (shots.empty()) throw InputError("assemble: no shots");
    for (const auto& shot : shots) {
        if (!shot.hull_indices || shot.hull_indices->empty()) {
            throw NumericError("assemble: shot '" + shot.shot_id +
                               "' has an empty hull (not analyzed?)");
        }
    }
}

void require_pair(const MultiplierPair& pair) {
    if (!(pair.lambda > 0.0) || !std::isfinite(pair.lambda) || !(pair.mu > 0.0) ||
        !std::isfinite(pair.mu)) {
        throw InputError("assemble: lambda and mu must be positive and finite");
    }
}

// assemble without revalidation, for the table inner loop.
Representation assemble_checked(const std::vector<ShotRecord>& shots,
                                const MultiplierPair& pair) {
    std::vector<std::size_t> selection;
    selection.reserve(shots.size());
    for (const auto& shot : shots) {
        const auto& hull = *shot.hull_indices;
        std::size_t best = hull[0];
        double best_j = 0.0;
        bool first = true;
        for (const std::size_t idx : hull) {
            const auto& op = shot.points[idx];
            const double j = op.mse + pair.lambda * op.rate_kbps + pair.mu * op.cpu_s;
            bool better = first;
            if (!first && j != best_j) better = j < best_j;
            if (!first && j == best_j) {
                const auto& cur = shot.points[best];
                if (op.cpu_s != cur.cpu_s) {
                    better = op.cpu_s < cur.cpu_s;
                } else if (op.rate_kbps != cur.rate_kbps) {
                    better = op.rate_kbps < cur.rate_kbps;
                }  // else keep the lower index already held
            }
            if (better) {
                best = idx;
                best_j = j;
                first = false;
            }
        }
        selection.push_back(best);
    }
    return make_representation(shots, std::move(selection));
}

}  // namespace

MultiplierGrid build_multiplier_grid(const std::vector<ShotRecord>& shots,
                                     double dedup_tol) {
    if (!(dedup_tol >= 0.0) || !std::isfinite(dedup_tol)) {
        throw InputError("grid: dedup tolerance must be non-negative");
    }
    std::vector<double> lambdas;
    std::vector<double> mus;
    for (const auto& shot : shots) {
        if (!shot.multipliers) continue;
        for (const auto& pair : *shot.multipliers) {
            if (!(pair.lambda > 0.0) || !std::isfinite(pair.lambda) ||
                !(pair.mu > 0.0) || !std::isfinite(pair.mu)) {
                throw NumericError("grid: shot '" + shot.shot_id +
                                   "' has a non-positive multiplier");
            }
            lambdas.push_back(pair.lambda);
            mus.push_back(pair.mu);
        }
    }
    if (lambdas.empty()) {
        throw NumericError("grid: no shot contributes multipliers");
    }
    MultiplierGrid grid;
    grid.dedup_tolerance = dedup_tol;
    grid.lambdas = dedup_sorted(std::move(lambdas), dedup_tol);
    grid.mus = dedup_sorted(std::move(mus), dedup_tol);
    return grid;
}

Representation assemble(const std::vector<ShotRecord>& shots, const MultiplierPair& pair) {
    require_analyzed(shots);
    require_pair(pair);
    return assemble_checked(shots, pair);
}

namespace {

void generate_rows(const std::vector<ShotRecord>& shots, const MultiplierGrid& grid,
                   const std::function<void(std::vector<RdtTableRow>&&)>& emit_batch) {
    require_analyzed(shots);
    if (grid.lambdas.empty() || grid.mus.empty()) {
        throw InputError("table: multiplier grid is empty");
    }
    for (const double v : grid.lambdas) require_pair({v, 1.0});
    for (const double v : grid.mus) require_pair({1.0, v});

    const std::size_t n_mu = grid.mus.size();
    // Batches of lambda values bound memory while keeping all workers busy.
    const std::size_t batch = std::max<std::size_t>(worker_count() * 4, 1);
    for (std::size_t l0 = 0; l0 < grid.lambdas.size(); l0 += batch) {
        const std::size_t l1 = std::min(grid.lambdas.size(), l0 + batch);
        std::vector<RdtTableRow> rows((l1 - l0) * n_mu);
        parallel_for(l1 - l0, [&](std::size_t dl) {
            const double lambda = grid.lambdas[l0 + dl];
            for (std::size_t j = 0; j < n_mu; ++j) {
                const MultiplierPair pair{lambda, grid.mus[j]};
                rows[dl * n_mu + j] = {pair, assemble_checked(shots, pair)};
            }
        });
        emit_batch(std::move(rows));
    }
}

}  // namespace

std::vector<RdtTableRow> generate_table(const std::vector<ShotRecord>& shots,
                                        const MultiplierGrid& grid) {
    std::vector<RdtTableRow> table;
    table.reserve(grid.lambdas.size() * grid.mus.size());
    generate_rows(shots, grid, [&](std::vector<RdtTableRow>&& rows) {
        for (auto& row : rows) table.push_back(std::move(row));
    });
    return table;
}

void for_each_table_row(const std::vector<ShotRecord>& shots, const MultiplierGrid& grid,
                        const std::function<void(const RdtTableRow&)>& emit) {
    generate_rows(shots, grid, [&](std::vector<RdtTableRow>&& rows) {
        for (const auto& row : rows) emit(row);
    });
}

std::vector<LadderEntry> query_ladder(const std::vector<RdtTableRow>& table,
                                      const LadderQuery& query) {
    if (table.empty()) throw InputError("ladder: table is empty");
    if (!(query.rate_tolerance > 0.0) || !(query.rate_tolerance < 1.0)) {
        throw InputError("ladder: rate tolerance must lie in (0, 1)");
    }
    if (query.time_budget && (!std::isfinite(*query.time_budget))) {
        throw InputError("ladder: time budget must be finite");
    }
    for (std::size_t i = 0; i < query.target_rates.size(); ++i) {
        const double t = query.target_rates[i];
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw InputError("ladder: targets must be positive and finite");
        }
        if (i > 0 && !(query.target_rates[i - 1] < t)) {
            throw InputError("ladder: targets must be strictly increasing");
        }
    }

    std::vector<LadderEntry> out;
    out.reserve(query.target_rates.size());
    for (const double target : query.target_rates) {
        const double lo = target * (1.0 - query.rate_tolerance);
        const double hi = target * (1.0 + query.rate_tolerance);
        LadderEntry entry;
        entry.target = target;
        const RdtTableRow* best = nullptr;
        for (const auto& row : table) {
            const auto& rep = row.representation;
            if (rep.agg_rate < lo || rep.agg_rate > hi) continue;
            if (query.time_budget && rep.agg_time > *query.time_budget) continue;
            if (best == nullptr) {
                best = &row;
                continue;
            }
            const auto& cur = best->representation;
            bool better = false;
            if (rep.agg_distortion != cur.agg_distortion) {
                better = rep.agg_distortion < cur.agg_distortion;
            } else if (rep.agg_time != cur.agg_time) {
                better = rep.agg_time < cur.agg_time;
            } else if (rep.agg_rate != cur.agg_rate) {
                better = rep.agg_rate < cur.agg_rate;
            }  // else: table is in (lambda, mu) order, keep the earlier row
            if (better) best = &row;
        }
        if (best != nullptr) entry.row = *best;
        out.push_back(std::move(entry));
    }
    return out;
}

double complexity_ratio(const Representation& candidate, const Representation& reference) {
    if (candidate.selection.empty() || reference.selection.empty()) {
        throw InputError("complexity ratio: representations must be non-empty");
    }
    if (!(reference.agg_time > 0.0)) {
        throw NumericError("complexity ratio: reference time is not positive");
    }
    return 100.0 * candidate.agg_time / reference.agg_time;
}

TangencyReport tangency_diagnostic(const std::vector<ShotRecord>& shots,
                                   const RdtTableRow& row) {
    if (shots.empty()) throw InputError("diagnostic: no shots");
    if (row.representation.selection.size() != shots.size()) {
        throw InputError("diagnostic: selection size does not match shot count");
    }
    double t_prime = 0.0;
    double r_mean = 0.0;
    for (std::size_t i = 0; i < shots.size(); ++i) {
        const auto& shot = shots[i];
        if (!shot.fit) {
            throw NumericError("diagnostic: shot '" + shot.shot_id + "' has no fit");
        }
        const auto& op = shot.points.at(row.representation.selection[i]);
        t_prime += shot.fit->c_prime * op.cpu_s;
        r_mean += op.rate_kbps;
    }
    const double m = static_cast<double>(shots.size());
    t_prime /= m;
    r_mean /= m;
    TangencyReport report;
    report.t_prime = t_prime;
    report.ratio = (row.multipliers.lambda * r_mean) / (row.multipliers.mu * t_prime);
    return report;
}

}  // namespace ladderforge
