#include "ladderforge/model.hpp"

#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace ladderforge {

namespace {

double peak_value(int bit_depth) {
    if (bit_depth != 8 && bit_depth != 10 && bit_depth != 12) {
        throw InputError("psnr: bit depth must be 8, 10 or 12");
    }
    return static_cast<double>((1 << bit_depth) - 1);
}

}  // namespace

double psnr_from_mse(double mse, int bit_depth) {
    const double peak = peak_value(bit_depth);
    if (!(mse > 0.0) || !std::isfinite(mse)) {
        throw NumericError("psnr: mse must be positive and finite");
    }
    return 10.0 * std::log10(peak * peak / mse);
}

double mse_from_psnr(double psnr_db, int bit_depth) {
    const double peak = peak_value(bit_depth);
    if (!std::isfinite(psnr_db)) {
        throw NumericError("psnr: psnr must be finite");
    }
    return peak * peak * std::pow(10.0, -psnr_db / 10.0);
}

bool ValidationReport::ok() const {
    for (const auto& issue : issues) {
        if (issue.hard) return false;
    }
    return true;
}

std::vector<std::string> ValidationReport::messages() const {
    std::vector<std::string> out;
    out.reserve(issues.size());
    for (const auto& issue : issues) {
        std::string line = issue.hard ? "error: " : "warning: ";
        if (!issue.shot_id.empty()) line += "shot '" + issue.shot_id + "': ";
        line += issue.message;
        out.push_back(std::move(line));
    }
    return out;
}

ValidationReport validate_dataset(const std::vector<ShotRecord>& shots) {
    ValidationReport report;
    auto hard = [&](const std::string& id, std::string msg) {
        report.issues.push_back({true, id, std::move(msg)});
    };

    std::set<std::string> seen_ids;
    for (const auto& shot : shots) {
        if (!seen_ids.insert(shot.shot_id).second) {
            hard("", "duplicate shot id '" + shot.shot_id + "'");
        }
        if (shot.shot_id.empty()) {
            hard("", "empty shot id");
        }
        if (!(shot.duration_s > 0.0) || !std::isfinite(shot.duration_s)) {
            hard(shot.shot_id, "non-positive duration");
        }
        if (shot.points.empty()) {
            hard(shot.shot_id, "no operating points");
        }
        std::map<std::tuple<int, int, int, int>, std::size_t> seen_params;
        for (std::size_t i = 0; i < shot.points.size(); ++i) {
            const auto& op = shot.points[i];
            const std::string at = "point " + std::to_string(i) + ": ";
            if (!(op.rate_kbps > 0.0) || !std::isfinite(op.rate_kbps)) {
                hard(shot.shot_id, at + "non-positive rate");
            }
            if (!(op.mse > 0.0) || !std::isfinite(op.mse)) {
                hard(shot.shot_id, at + "non-positive distortion");
            }
            if (!(op.cpu_s > 0.0) || !std::isfinite(op.cpu_s)) {
                hard(shot.shot_id, at + "non-positive time");
            }
            if (op.params.width <= 0 || op.params.height <= 0) {
                hard(shot.shot_id, at + "non-positive frame size");
            }
            const auto key = std::make_tuple(op.params.preset_idx, op.params.width,
                                             op.params.height, op.params.crf);
            auto [it, fresh] = seen_params.emplace(key, i);
            if (!fresh) {
                hard(shot.shot_id, at + "duplicate params (same as point " +
                                       std::to_string(it->second) + ")");
            }
        }
    }
    return report;
}

Representation make_representation(const std::vector<ShotRecord>& shots,
                                   std::vector<std::size_t> selection) {
    if (selection.size() != shots.size()) {
        throw InputError("representation: selection size does not match shot count");
    }
    Representation rep;
    double total_duration = 0.0;
    for (std::size_t i = 0; i < shots.size(); ++i) {
        const auto& shot = shots[i];
        if (selection[i] >= shot.points.size()) {
            throw InputError("representation: point index out of range for shot '" +
                             shot.shot_id + "'");
        }
        const auto& op = shot.points[selection[i]];
        rep.sums.rate += op.rate_kbps;
        rep.sums.distortion += op.mse;
        rep.sums.time += op.cpu_s;
        rep.agg_rate += shot.duration_s * op.rate_kbps;
        rep.agg_distortion += shot.duration_s * op.mse;
        total_duration += shot.duration_s;
    }
    if (!(total_duration > 0.0)) {
        throw NumericError("representation: total duration is not positive");
    }
    rep.agg_rate /= total_duration;
    rep.agg_distortion /= total_duration;
    rep.agg_time = rep.sums.time;
    rep.selection = std::move(selection);
    return rep;
}

}  // namespace ladderforge
