#pragma once

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikeservo/cerebellum.hpp"
#include "spikeservo/config.hpp"
#include "spikeservo/controller.hpp"
#include "spikeservo/diffmap.hpp"
#include "spikeservo/metrics.hpp"

namespace spikeservo {

struct ExperimentSpec {
    std::string task;  // babble | random-reach | radial-reach | contour
    unsigned seed = 1;
    long iterations = 0;  // 0 selects the per-task default
    bool cb_on = true;
    double contour_radius = 0.07;  // m
    int contour_points = 80;
    std::string out_dir = "out";

    void validate() const
    {
        if (iterations < 0) {
            throw std::invalid_argument("iterations must be positive");
        }
        if (contour_radius <= 0.0 || contour_points <= 0) {
            throw std::invalid_argument("contour parameters must be positive");
        }
    }
};

inline Vec2 center_angles(const ArmModel& m)
{
    return {0.5 * (m.theta_min[0] + m.theta_max[0]),
            0.5 * (m.theta_min[1] + m.theta_max[1])};
}

// ---------------------------------------------------------------- babbling

struct BabbleRow {
    Vec2 theta;
    Vec2 xdot;
    Vec2 thetadot;
};

inline void write_babble_csv(std::ostream& os,
                             const std::vector<BabbleRow>& rows)
{
    os << "iter,theta1,theta2,xdot_x,xdot_y,thetadot1,thetadot2\n";
    os << std::setprecision(17);
    long i = 0;
    for (const auto& r : rows) {
        os << i++ << ',' << r.theta[0] << ',' << r.theta[1] << ','
           << r.xdot[0] << ',' << r.xdot[1] << ',' << r.thetadot[0] << ','
           << r.thetadot[1] << '\n';
    }
}

inline void write_trajectory_csv(std::ostream& os,
                                 const std::vector<ArmState>& traj)
{
    os << "t_ms,theta1,theta2,x,y,xdot,ydot\n";
    os << std::setprecision(17);
    for (const auto& s : traj) {
        os << s.t_ms << ',' << s.theta[0] << ',' << s.theta[1] << ','
           << s.x[0] << ',' << s.x[1] << ',' << s.x_dot[0] << ','
           << s.x_dot[1] << '\n';
    }
}

// Random joint-velocity exploration: a direction is held until a joint
// limit clips it, then resampled. Each 80 ms iteration contributes one
// kinematically consistent (theta, xdot, thetadot) sample to the map.
inline std::vector<BabbleRow> babble(DMNetwork& dm, const ArmModel& arm,
                                     long iterations, unsigned seed,
                                     std::vector<ArmState>* trajectory =
                                         nullptr)
{
    if (iterations <= 0) {
        throw std::invalid_argument("iterations must be positive");
    }
    std::mt19937 rng(seed);
    const double range = dm.config().thetadot_range;
    std::uniform_real_distribution<double> draw(-range, range);

    ArmState s = make_state(arm, center_angles(arm));
    if (trajectory) trajectory->push_back(s);
    Vec2 qd_cmd{0.0, 0.0};
    bool resample = true;

    std::vector<BabbleRow> rows;
    rows.reserve(iterations);
    for (long it = 0; it < iterations; ++it) {
        if (resample) {
            qd_cmd = {draw(rng), draw(rng)};
        }
        const ArmState next = step(arm, s, qd_cmd, dm.config().window_ms);
        const Vec2 applied = next.theta_dot;  // post joint-limit clamping
        resample = applied[0] != qd_cmd[0] || applied[1] != qd_cmd[1];

        BabbleRow row;
        row.theta = s.theta;
        row.thetadot = applied;
        row.xdot = apply_jacobian(jacobian(arm, s.theta), applied);
        rows.push_back(row);
        dm.train_step({row.theta[0], row.theta[1]},
                      {row.xdot[0], row.xdot[1]},
                      {row.thetadot[0], row.thetadot[1]});

        s = next;
        if (trajectory) trajectory->push_back(s);
    }
    return rows;
}

// ----------------------------------------------------- workspace sampling

// Uniform rejection sampling over the image of the joint limits.
class WorkspaceSampler {
public:
    WorkspaceSampler(const ArmModel& m, unsigned seed) : m_(m), rng_(seed)
    {
        const int grid = 48;
        for (int i = 0; i <= grid; ++i) {
            for (int j = 0; j <= grid; ++j) {
                const Vec2 th{
                    m.theta_min[0] +
                        (m.theta_max[0] - m.theta_min[0]) * i / grid,
                    m.theta_min[1] +
                        (m.theta_max[1] - m.theta_min[1]) * j / grid};
                const Vec2 x = forward_kinematics(m, th);
                lo_[0] = std::min(lo_[0], x[0]);
                lo_[1] = std::min(lo_[1], x[1]);
                hi_[0] = std::max(hi_[0], x[0]);
                hi_[1] = std::max(hi_[1], x[1]);
            }
        }
    }

    Vec2 sample()
    {
        std::uniform_real_distribution<double> dx(lo_[0], hi_[0]);
        std::uniform_real_distribution<double> dy(lo_[1], hi_[1]);
        for (int tries = 0; tries < 10000; ++tries) {
            const Vec2 x{dx(rng_), dy(rng_)};
            if (in_workspace(m_, x)) {
                return x;
            }
        }
        throw std::runtime_error("workspace sampling failed");
    }

    // start/target pair with a minimum separation so metrics are meaningful
    std::pair<Vec2, Vec2> sample_pair(double min_dist = 0.03)
    {
        for (int tries = 0; tries < 10000; ++tries) {
            const Vec2 a = sample();
            const Vec2 b = sample();
            if (norm(b - a) >= min_dist) {
                return {a, b};
            }
        }
        throw std::runtime_error("workspace pair sampling failed");
    }

private:
    ArmModel m_;
    std::mt19937 rng_;
    Vec2 lo_{1e9, 1e9};
    Vec2 hi_{-1e9, -1e9};
};

// --------------------------------------------------- cerebellar training

struct TrainCbResult {
    std::vector<double> epred_mean;  // mean |e_pred| over DOF, per cycle
    std::vector<std::vector<ControlCycleRecord>> reps;
    Vec2 target{};
};

// Repeated reaching toward one fixed target with cerebellar learning on;
// the prediction-error trace is the training diagnostic.
inline TrainCbResult train_cb(const HarnessConfig& h, DMNetwork& dm,
                              CBNetwork& cb, long repetitions, unsigned seed)
{
    if (repetitions <= 0) {
        throw std::invalid_argument("iterations must be positive");
    }
    const Vec2 start_th = center_angles(h.arm);
    const Vec2 start = forward_kinematics(h.arm, start_th);
    TrainCbResult out;
    out.target = start + Vec2{0.05, 0.04};
    if (!in_workspace(h.arm, out.target)) {
        throw std::runtime_error("training target outside workspace");
    }

    SpikingPredictor pred(cb, h.delay_cycles);
    for (long r = 0; r < repetitions; ++r) {
        ControlLoop loop(h.arm, make_state(h.arm, start_th), dm, pred,
                         h.control, h.delay_cycles, h.sigma_pos, h.sigma_vel,
                         seed + static_cast<unsigned>(r));
        loop.set_learning(true);
        auto recs = loop.run_reach(out.target);
        for (const auto& rec : recs) {
            out.epred_mean.push_back(
                0.5 * (std::abs(rec.e_pred[0]) + std::abs(rec.e_pred[1])));
        }
        out.reps.push_back(std::move(recs));
    }
    return out;
}

// ------------------------------------------------------- random reaching

struct ReachPair {
    Vec2 start{}, target{};
    ReachMetrics off, on;
    std::vector<ControlCycleRecord> recs_off, recs_on;
};

struct RandomReachResult {
    long training_cycles = 0;
    std::vector<double> train_epred;  // mean |e_pred| per training cycle
    std::vector<ReachPair> pairs;
    double mean_dev_reduction = 0.0;   // fraction of CB-off deviation
    double mean_time_reduction = 0.0;  // fraction of CB-off reach time
    double time_ratio = 0.0;           // CB-off time / CB-on time
};

inline ReachMetrics eval_reach(const HarnessConfig& h, DMNetwork& dm,
                               Predictor& pred, double k_c,
                               const Vec2& start_th, const Vec2& target,
                               unsigned sensor_seed,
                               std::vector<ControlCycleRecord>* recs_out)
{
    ControlConfig cc = h.control;
    cc.k_c = k_c;
    ControlLoop loop(h.arm, make_state(h.arm, start_th), dm, pred, cc,
                     h.delay_cycles, h.sigma_pos, h.sigma_vel, sensor_seed);
    auto recs = loop.run_reach(target);
    auto m = compute_reach_metrics(recs, forward_kinematics(h.arm, start_th),
                                   target, cc.cycle_ms);
    if (recs_out) *recs_out = std::move(recs);
    return m;
}

// Free exploration training over random targets, then paired evaluation:
// the same start/target/sensor seed is run with the cerebellum active and
// with the plain (k_c = 0) map-only loop.
inline RandomReachResult run_random_reach(const HarnessConfig& h,
                                          DMNetwork& dm, CBNetwork& cb,
                                          const ExperimentSpec& spec,
                                          int eval_pairs = 40)
{
    const long budget = spec.iterations > 0 ? spec.iterations : 10000;
    HarnessConfig hr = h;
    hr.control.k_c = 0.8;  // protocol gain; calibrated for the eval regime
    WorkspaceSampler sampler(hr.arm, spec.seed);
    RandomReachResult out;

    SpikingPredictor pred(cb, hr.delay_cycles);
    {
        ControlLoop loop(hr.arm, make_state(hr.arm, center_angles(hr.arm)),
                         dm, pred, hr.control, hr.delay_cycles, hr.sigma_pos,
                         hr.sigma_vel, spec.seed);
        loop.set_learning(true);
        Vec2 target = sampler.sample();
        loop.set_target(target);
        long since_target = 0;
        while (out.training_cycles < budget) {
            auto rec = loop.run_cycle();
            ++out.training_cycles;
            ++since_target;
            out.train_epred.push_back(
                0.5 * (std::abs(rec.e_pred[0]) + std::abs(rec.e_pred[1])));
            // next target once reached, or after 10 s if stuck
            if (rec.reached || since_target > 125) {
                target = sampler.sample();
                loop.set_target(target);
                since_target = 0;
            }
        }
    }

    std::vector<double> dev_red, time_red;
    double t_off_sum = 0.0, t_on_sum = 0.0;
    for (int i = 0; i < eval_pairs; ++i) {
        auto [start, target] = sampler.sample_pair();
        Vec2 start_th;
        inverse_kinematics(hr.arm, start, start_th);

        ReachPair p;
        p.start = forward_kinematics(hr.arm, start_th);
        p.target = target;
        const unsigned sseed = spec.seed + 7919u * (i + 1);

        NullPredictor off;
        p.off = eval_reach(hr, dm, off, 0.0, start_th, target, sseed,
                           &p.recs_off);
        p.on = eval_reach(hr, dm, pred, hr.control.k_c, start_th, target,
                          sseed, &p.recs_on);

        if (p.off.max_deviation > 0.0) {
            dev_red.push_back((p.off.max_deviation - p.on.max_deviation) /
                              p.off.max_deviation);
        }
        if (p.off.reach_time_s > 0.0) {
            time_red.push_back((p.off.reach_time_s - p.on.reach_time_s) /
                               p.off.reach_time_s);
        }
        t_off_sum += p.off.reach_time_s;
        t_on_sum += p.on.reach_time_s;
        out.pairs.push_back(std::move(p));
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / v.size();
    };
    out.mean_dev_reduction = mean(dev_red);
    out.mean_time_reduction = mean(time_red);
    out.time_ratio = t_on_sum > 0.0 ? t_off_sum / t_on_sum : 0.0;
    return out;
}

// ------------------------------------------------------- radial reaching

struct RadialTargetResult {
    double angle_deg = 0.0;
    Vec2 target{};
    ReachMetrics rep0, rep4, rep8;  // map-only / after 4 / after 8 reps
    double dev_reduction = 0.0;
    bool monotone = false;
};

struct RadialResult {
    std::vector<RadialTargetResult> targets;
    double mean_dev_reduction = 0.0;
    int monotone_count = 0;
};

// Eight targets 10 cm from the central posture, 45 degrees apart. Each
// target gets a fresh cerebellum trained only on that direction. The
// repetition-0 baseline is the map-only loop (cerebellum inactive); the
// 4- and 8-repetition evaluations run with the trained predictor and
// learning frozen. Training repetitions observe the uncorrected loop
// (k_c = 0) and are capped at ~300 cycles each, so the 8 repetitions
// total ~2400 training cycles. The commanded speed follows the slow
// regime implied by that per-reach cycle count.
inline RadialResult run_radial_reach(const HarnessConfig& h, DMNetwork& dm,
                                     const ExperimentSpec& spec,
                                     double radius = 0.10)
{
    HarnessConfig hr = h;
    hr.control.v_ref = 0.01;  // m/s; ~300 cycles per 10 cm repetition
    HarnessConfig ht = hr;
    ht.control.k_c = 0.0;
    ht.control.target_time_limit_s = 24.0;  // ~300 cycles per repetition

    const Vec2 start_th = center_angles(hr.arm);
    const Vec2 center = forward_kinematics(hr.arm, start_th);
    const int eval_seeds = 3;
    RadialResult out;

    for (int k = 0; k < 8; ++k) {
        const double ang = deg2rad(45.0 * k);
        RadialTargetResult tr;
        tr.angle_deg = 45.0 * k;
        tr.target = center + Vec2{radius * std::cos(ang),
                                  radius * std::sin(ang)};
        if (!in_workspace(hr.arm, tr.target)) {
            throw std::runtime_error("radial target at " +
                                     std::to_string(tr.angle_deg) +
                                     " deg outside workspace");
        }

        CBNetwork cb(hr.cb, spec.seed + static_cast<unsigned>(k));
        SpikingPredictor pred(cb, hr.delay_cycles);
        const unsigned sseed = spec.seed + 104729u * (k + 1);

        auto train_once = [&](unsigned salt) {
            ControlLoop loop(ht.arm, make_state(ht.arm, start_th), dm, pred,
                             ht.control, ht.delay_cycles, ht.sigma_pos,
                             ht.sigma_vel, sseed + salt);
            loop.set_learning(true);
            loop.run_reach(tr.target);
        };
        auto avg_eval = [&](Predictor& p, double kc) {
            ReachMetrics acc{};
            for (int e = 0; e < eval_seeds; ++e) {
                auto m = eval_reach(hr, dm, p, kc, start_th, tr.target,
                                    sseed + 17u * e, nullptr);
                acc.max_deviation += m.max_deviation / eval_seeds;
                acc.reach_time_s += m.reach_time_s / eval_seeds;
                acc.reached = acc.reached || m.reached;
            }
            return acc;
        };

        NullPredictor off;
        tr.rep0 = avg_eval(off, 0.0);
        for (unsigned r = 0; r < 4; ++r) train_once(1000 + r);
        tr.rep4 = avg_eval(pred, hr.control.k_c);
        for (unsigned r = 4; r < 8; ++r) train_once(1000 + r);
        tr.rep8 = avg_eval(pred, hr.control.k_c);

        if (tr.rep0.max_deviation > 0.0) {
            tr.dev_reduction =
                (tr.rep0.max_deviation - tr.rep8.max_deviation) /
                tr.rep0.max_deviation;
        }
        tr.monotone = tr.rep0.max_deviation >= tr.rep4.max_deviation &&
                      tr.rep4.max_deviation >= tr.rep8.max_deviation;
        out.targets.push_back(tr);
    }

    double s = 0.0;
    for (const auto& t : out.targets) {
        s += t.dev_reduction;
        if (t.monotone) ++out.monotone_count;
    }
    out.mean_dev_reduction = s / out.targets.size();
    return out;
}

// ------------------------------------------------------ contour following

inline std::vector<Vec2> contour_points(const Vec2& center, double r_t,
                                        int n_points)
{
    std::vector<Vec2> pts;
    pts.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double g = 2.0 * M_PI * i / n_points;
        pts.push_back(center + Vec2{0.5 * r_t * std::sin(2.0 * g),
                                    r_t * std::cos(g)});
    }
    return pts;
}

struct ContourRunResult {
    std::vector<ControlCycleRecord> records;
    ContourMetrics metrics;
};

struct ContourResult {
    std::vector<Vec2> contour;  // open list; the path closes on itself
    ContourRunResult off, on;
};

// Follow the discretized figure-eight point by point; a point that is not
// reached within the per-point time limit is skipped.
inline ContourRunResult follow_contour(const HarnessConfig& h, DMNetwork& dm,
                                       Predictor& pred, double k_c,
                                       bool learning,
                                       const std::vector<Vec2>& pts,
                                       int warmup_laps, unsigned sensor_seed,
                                       double point_tol = 0.001,
                                       double point_limit_s = 1.0)
{
    Vec2 start_th;
    if (!inverse_kinematics(h.arm, pts.at(0), start_th)) {
        throw std::runtime_error("contour start outside workspace");
    }
    ControlConfig cc = h.control;
    cc.k_c = k_c;
    cc.reach_tol = point_tol;
    ControlLoop loop(h.arm, make_state(h.arm, start_th), dm, pred, cc,
                     h.delay_cycles, h.sigma_pos, h.sigma_vel, sensor_seed);
    loop.set_learning(learning);
    const long limit_cycles =
        static_cast<long>(point_limit_s * 1000.0 / cc.cycle_ms);

    ContourRunResult out;
    int skipped = 0;
    for (int lap = 0; lap <= warmup_laps; ++lap) {
        const bool measured = lap == warmup_laps;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Vec2 target = pts[(i + 1) % pts.size()];
            loop.set_target(target);
            bool reached = false;
            for (long c = 0; c < limit_cycles && !reached; ++c) {
                auto rec = loop.run_cycle();
                reached = rec.reached;
                if (measured) out.records.push_back(std::move(rec));
            }
            if (!reached && measured) ++skipped;
        }
    }

    std::vector<Vec2> closed = pts;
    closed.push_back(pts.front());
    out.metrics =
        compute_contour_metrics(out.records, closed, cc.cycle_ms);
    out.metrics.skipped_points = skipped;
    return out;
}

inline ContourResult run_contour(const HarnessConfig& h, DMNetwork& dm,
                                 CBNetwork& cb, const ExperimentSpec& spec)
{
    // The contour runs in the slow regime implied by the reference
    // completion times (~0.01 m/s mean speed along the path).
    HarnessConfig hc = h;
    hc.control.v_ref = 0.01;

    const Vec2 center =
        forward_kinematics(hc.arm, center_angles(hc.arm));
    ContourResult out;
    out.contour =
        contour_points(center, spec.contour_radius, spec.contour_points);
    for (const auto& p : out.contour) {
        if (!in_workspace(hc.arm, p)) {
            throw std::runtime_error("contour point outside workspace");
        }
    }
    const int warmup = spec.iterations > 0
                           ? static_cast<int>(spec.iterations)
                           : 2;  // learning laps before the measured one

    NullPredictor off;
    out.off = follow_contour(hc, dm, off, 0.0, false, out.contour, 0,
                             spec.seed + 31u);
    SpikingPredictor pred(cb, hc.delay_cycles);
    out.on = follow_contour(hc, dm, pred, hc.control.k_c, true, out.contour,
                            warmup, spec.seed + 31u);
    return out;
}

}  // namespace spikeservo
