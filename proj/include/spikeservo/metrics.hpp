#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spikeservo/arm.hpp"
#include "spikeservo/controller.hpp"

namespace spikeservo {

inline double point_segment_distance(const Vec2& p, const Vec2& a,
                                     const Vec2& b)
{
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) {
        return norm(p - a);
    }
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

inline double point_polyline_distance(const Vec2& p,
                                      const std::vector<Vec2>& poly)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        best = std::min(best, point_segment_distance(p, poly[i], poly[i + 1]));
    }
    return best;
}

struct ReachMetrics {
    double max_deviation = 0.0;  // m, from the straight start->target path
    double reach_time_s = 0.0;
    bool reached = false;
};

// Metrics are pure functions of the cycle records so they can be recomputed
// offline from the CSV alone.
inline ReachMetrics compute_reach_metrics(
    const std::vector<ControlCycleRecord>& recs, const Vec2& start,
    const Vec2& target, double cycle_ms)
{
    if (recs.empty()) {
        throw std::invalid_argument("no records");
    }
    ReachMetrics m;
    for (const auto& r : recs) {
        m.max_deviation = std::max(
            m.max_deviation, point_segment_distance(r.x_s, start, target));
        if (r.reached) {
            m.reached = true;
            break;
        }
    }
    long n = 0;
    for (const auto& r : recs) {
        ++n;
        if (r.reached) break;
    }
    m.reach_time_s = n * cycle_ms * 1e-3;
    return m;
}

struct ContourMetrics {
    std::vector<double> error;           // m, per cycle
    std::vector<double> filtered_error;  // first-order low-pass
    double max_error = 0.0;
    double max_filtered_error = 0.0;
    double completion_time_s = 0.0;
    int skipped_points = 0;
};

inline ContourMetrics compute_contour_metrics(
    const std::vector<ControlCycleRecord>& recs,
    const std::vector<Vec2>& contour, double cycle_ms, double beta = 0.1)
{
    if (recs.empty()) {
        throw std::invalid_argument("no records");
    }
    ContourMetrics m;
    double y = 0.0;
    for (const auto& r : recs) {
        const double e = point_polyline_distance(r.x_s, contour);
        y += beta * (e - y);
        m.error.push_back(e);
        m.filtered_error.push_back(y);
        m.max_error = std::max(m.max_error, e);
        m.max_filtered_error = std::max(m.max_filtered_error, y);
    }
    m.completion_time_s = recs.size() * cycle_ms * 1e-3;
    return m;
}

}  // namespace spikeservo
