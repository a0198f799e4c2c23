#include "ladderforge/rdtfit.hpp"

#include <cmath>
#include <utility>

#include "ladderforge/hull.hpp"
#include "ladderforge/util.hpp"

namespace ladderforge {

RdtFit fit_rdt(const std::vector<RdtSample>& samples) {
    const std::size_t n = samples.size();
    if (n < 3) {
        throw NumericError("fit: insufficient data (need at least 3 samples, got " +
                           std::to_string(n) + ")");
    }
    std::vector<double> x(n), y(n), z(n);  // ln rate, ln time, ln mse
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[i];
        if (!(s.rate > 0.0) || !std::isfinite(s.rate) || !(s.mse > 0.0) ||
            !std::isfinite(s.mse) || !(s.time > 0.0) || !std::isfinite(s.time)) {
            throw NumericError("fit: samples must be positive and finite");
        }
        x[i] = std::log(s.rate);
        y[i] = std::log(s.time);
        z[i] = std::log(s.mse);
    }
    double xm = 0.0, ym = 0.0, zm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
        zm += z[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    zm /= static_cast<double>(n);

    // Centered normal equations for z ~ 1 + x + y.
    double sxx = 0.0, sxy = 0.0, syy = 0.0, sxz = 0.0, syz = 0.0, szz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - xm, dy = y[i] - ym, dz = z[i] - zm;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        sxz += dx * dz;
        syz += dy * dz;
        szz += dz * dz;
    }
    const double det = sxx * syy - sxy * sxy;
    if (!(sxx > 0.0) || !(syy > 0.0) || det <= 1e-12 * sxx * syy) {
        throw NumericError(
            "fit: degenerate design (rates and times must both vary, independently)");
    }

    RdtFit fit;
    fit.k1 = (syy * sxz - sxy * syz) / det;
    fit.k2 = (sxx * syz - sxy * sxz) / det;
    fit.c = std::exp(zm - fit.k1 * xm - fit.k2 * ym);
    fit.c_prime = fit.k1 / fit.k2;

    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = (z[i] - zm) - fit.k1 * (x[i] - xm) - fit.k2 * (y[i] - ym);
        ss_res += resid * resid;
    }
    fit.r_squared = szz > 0.0 ? 1.0 - ss_res / szz : 1.0;
    if (fit.r_squared < 0.0) fit.r_squared = 0.0;
    if (fit.r_squared > 1.0) fit.r_squared = 1.0;
    return fit;
}

MultiplierPair multipliers(const RdtFit& fit, double rate, double time) {
    if (!(fit.k1 < 0.0) || !(fit.k2 < 0.0)) {
        throw NumericError("multipliers: non-monotone fit (k1 and k2 must be negative)");
    }
    if (!(rate > 0.0) || !std::isfinite(rate) || !(time > 0.0) || !std::isfinite(time)) {
        throw NumericError("multipliers: rate and time must be positive and finite");
    }
    MultiplierPair pair;
    pair.lambda = -fit.c * fit.k1 * std::pow(rate, fit.k1 - 1.0) * std::pow(time, fit.k2);
    pair.mu = -fit.c * fit.k2 * std::pow(rate, fit.k1) * std::pow(time, fit.k2 - 1.0);
    if (!std::isfinite(pair.lambda) || !std::isfinite(pair.mu) || !(pair.lambda > 0.0) ||
        !(pair.mu > 0.0)) {
        throw NumericError("multipliers: derived prices are not positive finite");
    }
    return pair;
}

AnalyzeOutcome analyze_shot(ShotRecord shot) {
    AnalyzeOutcome outcome;
    std::vector<std::size_t> hull;
    try {
        hull = filter_hull_3d(shot.points);
    } catch (const NumericError& e) {
        throw NumericError("shot '" + shot.shot_id + "': " + e.what());
    }
    shot.hull_indices = hull;
    shot.fit.reset();
    shot.multipliers.reset();

    auto warn = [&](const std::string& msg) {
        outcome.warnings.push_back("shot '" + shot.shot_id + "': " + msg);
    };

    if (hull.size() < 3) {
        warn("only " + std::to_string(hull.size()) +
             " hull point(s); surface fit skipped");
    } else {
        std::vector<RdtSample> samples;
        samples.reserve(hull.size());
        for (const std::size_t idx : hull) {
            const auto& op = shot.points[idx];
            samples.push_back({op.rate_kbps, op.mse, op.cpu_s});
        }
        try {
            const RdtFit fit = fit_rdt(samples);
            shot.fit = fit;
            if (fit.k1 < 0.0 && fit.k2 < 0.0) {
                std::vector<MultiplierPair> pairs;
                pairs.reserve(hull.size());
                for (const auto& s : samples) {
                    pairs.push_back(multipliers(fit, s.rate, s.time));
                }
                shot.multipliers = std::move(pairs);
            } else {
                warn("non-monotone fit (k1 or k2 not negative); multipliers skipped");
            }
        } catch (const NumericError& e) {
            warn(e.what());
        }
    }
    outcome.shot = std::move(shot);
    return outcome;
}

std::vector<AnalyzeOutcome> analyze_dataset(std::vector<ShotRecord> shots) {
    std::vector<AnalyzeOutcome> out(shots.size());
    parallel_for(shots.size(),
                 [&](std::size_t i) { out[i] = analyze_shot(std::move(shots[i])); });
    return out;
}

}  // namespace ladderforge
