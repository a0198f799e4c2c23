#include "ladderforge/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ladderforge {

namespace {

void require_curve(const RdCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 4) {
        throw NumericError("bd-rate: curve needs at least 4 points, got " +
                           std::to_string(pts.size()));
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(pts[i].rate_kbps > 0.0) || !std::isfinite(pts[i].rate_kbps) ||
            !std::isfinite(pts[i].quality_db)) {
            throw NumericError("bd-rate: curve points must be positive finite rates");
        }
        if (i > 0) {
            if (!(pts[i - 1].rate_kbps < pts[i].rate_kbps)) {
                throw NumericError("bd-rate: rates must be strictly increasing");
            }
            if (!(pts[i - 1].quality_db < pts[i].quality_db)) {
                throw NumericError("bd-rate: qualities must be strictly increasing");
            }
        }
    }
}

// Fritsch-Carlson slopes for a monotone piecewise-cubic interpolant of
// y over strictly increasing x.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    std::vector<double> m(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // One-sided three-point endpoint slopes, clamped for shape preservation.
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double m0 = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m0 * d0 <= 0.0) {
            m0 = 0.0;
        } else if (d0 * d1 < 0.0 && std::fabs(m0) > 3.0 * std::fabs(d0)) {
            m0 = 3.0 * d0;
        }
        return m0;
    };
    m[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return m;
}

// Exact integral of the Hermite cubic on knot interval i over [a, b], both
// inside [x_i, x_{i+1}].
double segment_integral(double xi, double h, double yi, double di, double mi,
                        double mi1, double a, double b) {
    const double c2 = (3.0 * di - 2.0 * mi - mi1) / h;
    const double c3 = (mi + mi1 - 2.0 * di) / (h * h);
    auto antiderivative = [&](double x) {
        const double s = x - xi;
        return ((c3 / 4.0 * s + c2 / 3.0) * s + mi / 2.0) * s * s + yi * s;
    };
    return antiderivative(b) - antiderivative(a);
}

// Integral of the PCHIP interpolant of y(x) over [lo, hi], which must lie
// within [x.front(), x.back()].
double pchip_integral(const std::vector<double>& x, const std::vector<double>& y,
                      double lo, double hi) {
    const std::vector<double> m = pchip_slopes(x, y);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = std::max(lo, x[i]);
        const double b = std::min(hi, x[i + 1]);
        if (a >= b) continue;
        const double h = x[i + 1] - x[i];
        const double delta = (y[i + 1] - y[i]) / h;
        total += segment_integral(x[i], h, y[i], delta, m[i], m[i + 1], a, b);
    }
    return total;
}

}  // namespace

RdCurveResult curve_from_representations(const std::vector<Representation>& reps,
                                         int bit_depth) {
    if (reps.size() < 4) {
        throw NumericError("curve: need at least 4 representations, got " +
                           std::to_string(reps.size()));
    }
    RdCurveResult result;
    result.curve.points.reserve(reps.size());
    for (const auto& rep : reps) {
        result.curve.points.push_back(
            {rep.agg_rate, psnr_from_mse(rep.agg_distortion, bit_depth)});
    }
    auto& pts = result.curve.points;
    std::sort(pts.begin(), pts.end(), [](const RdCurvePoint& a, const RdCurvePoint& b) {
        return a.rate_kbps < b.rate_kbps;
    });
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].rate_kbps == pts[i - 1].rate_kbps) {
            throw NumericError("curve: duplicate rate " + std::to_string(pts[i].rate_kbps) +
                               " kbps");
        }
        if (pts[i].quality_db <= pts[i - 1].quality_db) {
            result.warnings.push_back("curve: quality does not increase from " +
                                      std::to_string(pts[i - 1].rate_kbps) + " to " +
                                      std::to_string(pts[i].rate_kbps) + " kbps");
        }
    }
    return result;
}

double bd_rate(const RdCurve& test, const RdCurve& anchor) {
    require_curve(test);
    require_curve(anchor);
    // Interpolate ln(rate) over quality for each curve.
    auto knots = [](const RdCurve& c) {
        std::pair<std::vector<double>, std::vector<double>> xy;
        for (const auto& p : c.points) {
            xy.first.push_back(p.quality_db);
            xy.second.push_back(std::log(p.rate_kbps));
        }
        return xy;
    };
    const auto [xt, yt] = knots(test);
    const auto [xa, ya] = knots(anchor);
    const double lo = std::max(xt.front(), xa.front());
    const double hi = std::min(xt.back(), xa.back());
    if (!(hi > lo)) {
        throw NumericError("bd-rate: quality ranges do not overlap");
    }
    const double mean_diff =
        (pchip_integral(xt, yt, lo, hi) - pchip_integral(xa, ya, lo, hi)) / (hi - lo);
    return 100.0 * std::expm1(mean_diff);
}

ComparisonReport comparison_report(const std::vector<LadderEntry>& ours,
                                   const std::vector<LadderEntry>& reference,
                                   int bit_depth) {
    if (ours.size() != reference.size()) {
        throw InputError("comparison: ladders have different rung counts");
    }
    std::vector<Representation> ours_reps, ref_reps;
    double ours_time = 0.0, ref_time = 0.0;
    for (std::size_t i = 0; i < ours.size(); ++i) {
        if (ours[i].target != reference[i].target) {
            throw InputError("comparison: ladders have different targets");
        }
        if (!ours[i].row || !reference[i].row) continue;
        ours_reps.push_back(ours[i].row->representation);
        ref_reps.push_back(reference[i].row->representation);
        ours_time += ours[i].row->representation.agg_time;
        ref_time += reference[i].row->representation.agg_time;
    }
    if (ours_reps.size() < 4) {
        throw NumericError("comparison: fewer than 4 rungs present in both ladders");
    }
    if (!(ref_time > 0.0)) {
        throw NumericError("comparison: reference ladder has no CPU time");
    }
    ComparisonReport report;
    report.rungs_compared = ours_reps.size();
    report.bd_rate_pct = bd_rate(curve_from_representations(ours_reps, bit_depth).curve,
                                 curve_from_representations(ref_reps, bit_depth).curve);
    report.complexity_ratio_pct = 100.0 * ours_time / ref_time;
    return report;
}

}  // namespace ladderforge
