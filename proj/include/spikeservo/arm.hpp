#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <deque>
#include <random>

namespace spikeservo {

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b)
{
    return {a[0] + b[0], a[1] + b[1]};
}
inline Vec2 operator-(const Vec2& a, const Vec2& b)
{
    return {a[0] - b[0], a[1] - b[1]};
}
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b)
{
    return a[0] * b[0] + a[1] * b[1];
}
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

constexpr double deg2rad(double d) { return d * M_PI / 180.0; }

// Planar shoulder+elbow arm, roughly UR3 upper-arm/forearm scale.
struct ArmModel {
    double l1 = 0.24;  // m
    double l2 = 0.21;  // m
    Vec2 theta_min{deg2rad(-110.0), deg2rad(60.0)};
    Vec2 theta_max{deg2rad(-30.0), deg2rad(150.0)};
    double theta_dot_limit = 0.5;  // rad/s, per joint
};

struct ArmState {
    Vec2 theta{0.0, 0.0};      // rad
    Vec2 theta_dot{0.0, 0.0};  // rad/s
    Vec2 x{0.0, 0.0};          // m
    Vec2 x_dot{0.0, 0.0};      // m/s
    double t_ms = 0.0;
};

inline Vec2 forward_kinematics(const ArmModel& m, const Vec2& theta)
{
    const double t12 = theta[0] + theta[1];
    return {m.l1 * std::cos(theta[0]) + m.l2 * std::cos(t12),
            m.l1 * std::sin(theta[0]) + m.l2 * std::sin(t12)};
}

// 2x2 analytic Jacobian, J[i][j] = d x_i / d theta_j
inline std::array<Vec2, 2> jacobian(const ArmModel& m, const Vec2& theta)
{
    const double t12 = theta[0] + theta[1];
    const double s1 = std::sin(theta[0]), c1 = std::cos(theta[0]);
    const double s12 = std::sin(t12), c12 = std::cos(t12);
    return {Vec2{-m.l1 * s1 - m.l2 * s12, -m.l2 * s12},
            Vec2{m.l1 * c1 + m.l2 * c12, m.l2 * c12}};
}

inline Vec2 apply_jacobian(const std::array<Vec2, 2>& j, const Vec2& v)
{
    return {dot(j[0], v), dot(j[1], v)};
}

inline ArmState make_state(const ArmModel& m, const Vec2& theta)
{
    ArmState s;
    s.theta = theta;
    s.x = forward_kinematics(m, theta);
    return s;
}

// Explicit Euler step with velocity and joint-limit clamping; velocity is
// zeroed on the joint that hits its limit.
inline ArmState step(const ArmModel& m, const ArmState& s,
                     const Vec2& theta_dot_cmd, double dt_ms)
{
    assert(dt_ms > 0.0);
    const double dt = dt_ms * 1e-3;
    ArmState out = s;
    for (int j = 0; j < 2; ++j) {
        double qd = std::clamp(theta_dot_cmd[j], -m.theta_dot_limit,
                               m.theta_dot_limit);
        double q = s.theta[j] + dt * qd;
        if (q <= m.theta_min[j]) {
            q = m.theta_min[j];
            qd = 0.0;
        } else if (q >= m.theta_max[j]) {
            q = m.theta_max[j];
            qd = 0.0;
        }
        out.theta[j] = q;
        out.theta_dot[j] = qd;
    }
    out.x = forward_kinematics(m, out.theta);
    out.x_dot = apply_jacobian(jacobian(m, out.theta), out.theta_dot);
    out.t_ms = s.t_ms + dt_ms;
    return out;
}

// Closed-form two-link IK; returns false when no elbow branch satisfies
// the joint limits. On success theta holds the first in-limit solution.
inline bool inverse_kinematics(const ArmModel& m, const Vec2& x, Vec2& theta)
{
    const double r2 = dot(x, x);
    const double c2 =
        (r2 - m.l1 * m.l1 - m.l2 * m.l2) / (2.0 * m.l1 * m.l2);
    if (c2 < -1.0 || c2 > 1.0) {
        return false;
    }
    const double base = std::acos(std::clamp(c2, -1.0, 1.0));
    for (double t2 : {base, -base}) {
        const double t1 = std::atan2(x[1], x[0]) -
                          std::atan2(m.l2 * std::sin(t2),
                                     m.l1 + m.l2 * std::cos(t2));
        for (double wrap : {0.0, 2.0 * M_PI, -2.0 * M_PI}) {
            const Vec2 cand{t1 + wrap, t2};
            if (cand[0] >= m.theta_min[0] && cand[0] <= m.theta_max[0] &&
                cand[1] >= m.theta_min[1] && cand[1] <= m.theta_max[1]) {
                theta = cand;
                return true;
            }
        }
    }
    return false;
}

inline bool in_workspace(const ArmModel& m, const Vec2& x)
{
    Vec2 tmp;
    return inverse_kinematics(m, x, tmp);
}

struct SensorReading {
    Vec2 x;          // m, noisy
    Vec2 x_dot;      // m/s, noisy
    Vec2 theta;      // rad, encoder (noiseless)
    Vec2 theta_dot;  // rad/s, encoder (noiseless)
    double t_ms = 0.0;
};

// Sensor channel standing in for camera + encoders: returns the snapshot
// exactly D cycles old (oldest available until primed) with zero-mean
// Gaussian noise on the task-space quantities.
class DelayLine {
public:
    DelayLine(int delay_cycles, double sigma_pos, double sigma_vel,
              unsigned seed)
        : delay_(delay_cycles),
          sigma_pos_(sigma_pos),
          sigma_vel_(sigma_vel),
          rng_(seed)
    {
        assert(delay_cycles >= 0);
    }

    void push(const ArmState& s)
    {
        buf_.push_back(s);
        const std::size_t keep = static_cast<std::size_t>(delay_) + 1;
        while (buf_.size() > keep) {
            buf_.pop_front();
        }
    }

    bool empty() const { return buf_.empty(); }

    SensorReading read()
    {
        assert(!buf_.empty());
        const std::size_t back = buf_.size() - 1;
        const std::size_t idx =
            back >= static_cast<std::size_t>(delay_) ? back - delay_ : 0;
        const ArmState& s = buf_[idx];
        SensorReading r{s.x, s.x_dot, s.theta, s.theta_dot, s.t_ms};
        if (sigma_pos_ > 0.0) {
            std::normal_distribution<double> np(0.0, sigma_pos_);
            r.x[0] += np(rng_);
            r.x[1] += np(rng_);
        }
        if (sigma_vel_ > 0.0) {
            std::normal_distribution<double> nv(0.0, sigma_vel_);
            r.x_dot[0] += nv(rng_);
            r.x_dot[1] += nv(rng_);
        }
        return r;
    }

private:
    int delay_;
    double sigma_pos_;
    double sigma_vel_;
    std::mt19937 rng_;
    std::deque<ArmState> buf_;
};

}  // namespace spikeservo
