#include "ladderforge/hull.hpp"

#include <cmath>

namespace ladderforge {

namespace {

void require_valid(const std::vector<OperatingPoint>& points) {
    for (const auto& op : points) {
        if (!(op.rate_kbps > 0.0) || !std::isfinite(op.rate_kbps) ||
            !(op.mse > 0.0) || !std::isfinite(op.mse) ||
            !(op.cpu_s > 0.0) || !std::isfinite(op.cpu_s)) {
            throw NumericError("hull: metrics must be positive and finite");
        }
    }
}

struct Vertex {
    double l = 0.0;  // lambda
    double m = 0.0;  // mu
};

// Half-plane a*l + b*m <= c in price space.  Point p beats point q at prices
// (l, m) exactly when l*(r_p - r_q) + m*(t_p - t_q) <= d_q - d_p.
struct HalfPlane {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

// Slack tolerance scaled to the magnitudes involved, so boundary vertices
// (ties) are classified consistently regardless of the units of the data.
// 1e-12 sits four decades above the rounding error of a boundary vertex and
// three below the smallest true margin the price box can produce, so both
// sides of the comparison land well clear of it.
double slack_tol(const HalfPlane& h, double l, double m) {
    return 1e-12 * (std::fabs(h.a * l) + std::fabs(h.b * m) + std::fabs(h.c));
}

// Clips a convex polygon against one half-plane (Sutherland-Hodgman step).
// Vertices exactly on the boundary are kept, so a feasible region that is a
// segment or a single point still reports as non-empty.
std::vector<Vertex> clip(const std::vector<Vertex>& poly, const HalfPlane& h) {
    std::vector<Vertex> out;
    out.reserve(poly.size() + 1);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vertex& v = poly[i];
        const Vertex& w = poly[(i + 1) % n];
        const double fv = h.a * v.l + h.b * v.m - h.c;
        const double fw = h.a * w.l + h.b * w.m - h.c;
        const bool v_in = fv <= slack_tol(h, v.l, v.m);
        const bool w_in = fw <= slack_tol(h, w.l, w.m);
        if (v_in) out.push_back(v);
        // A crossing exists only where the raw signs straddle the boundary.
        // When classifications differ merely through slack (same sign), the
        // edge runs along the boundary and interpolating would divide by a
        // cancelled difference and extrapolate far outside the box.
        if (v_in != w_in && (fv < 0.0) != (fw < 0.0)) {
            // Interpolate from the endpoint nearest the boundary: on edges
            // spanning many orders of magnitude the parameter from the far
            // endpoint rounds to 1 and would collapse the crossing onto it.
            if (std::fabs(fv) <= std::fabs(fw)) {
                const double t = fv / (fv - fw);
                out.push_back({v.l + t * (w.l - v.l), v.m + t * (w.m - v.m)});
            } else {
                const double t = fw / (fw - fv);
                out.push_back({w.l + t * (v.l - w.l), w.m + t * (v.m - w.m)});
            }
        }
    }
    return out;
}

// True when some price pair in the box makes candidate point p a (possibly
// tied) minimiser of J against every point in rivals.
bool selectable(const std::vector<OperatingPoint>& points,
                const std::vector<std::size_t>& rivals, std::size_t p) {
    std::vector<Vertex> poly = {{kLambdaMin, kLambdaMin},
                                {kLambdaMax, kLambdaMin},
                                {kLambdaMax, kLambdaMax},
                                {kLambdaMin, kLambdaMax}};
    const auto& op = points[p];
    for (const std::size_t q : rivals) {
        if (q == p) continue;
        const auto& rival = points[q];
        const HalfPlane h{op.rate_kbps - rival.rate_kbps, op.cpu_s - rival.cpu_s,
                          rival.mse - op.mse};
        poly = clip(poly, h);
        if (poly.empty()) return false;
    }
    return true;
}

}  // namespace

std::vector<std::size_t> filter_pareto(const std::vector<OperatingPoint>& points) {
    require_valid(points);
    std::vector<std::size_t> out;
    const std::size_t n = points.size();
    for (std::size_t j = 0; j < n; ++j) {
        const auto& p = points[j];
        bool dominated = false;
        for (std::size_t i = 0; i < n && !dominated; ++i) {
            if (i == j) continue;
            const auto& q = points[i];
            if (q.rate_kbps > p.rate_kbps || q.mse > p.mse || q.cpu_s > p.cpu_s) {
                continue;  // q not uniformly <= p
            }
            const bool identical = q.rate_kbps == p.rate_kbps && q.mse == p.mse &&
                                   q.cpu_s == p.cpu_s;
            dominated = identical ? i < j : true;
        }
        if (!dominated) out.push_back(j);
    }
    return out;
}

std::vector<std::size_t> filter_hull_3d(const std::vector<OperatingPoint>& points) {
    // Dominated points can be dropped up front: if q' dominates q then, at any
    // non-negative prices, J(q') <= J(q), so beating q' implies beating q.
    const std::vector<std::size_t> candidates = filter_pareto(points);
    std::vector<std::size_t> out;
    for (const std::size_t p : candidates) {
        if (selectable(points, candidates, p)) out.push_back(p);
    }
    return out;
}

}  // namespace ladderforge
