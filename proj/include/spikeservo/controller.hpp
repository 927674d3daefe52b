#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <vector>

#include "spikeservo/arm.hpp"
#include "spikeservo/cerebellum.hpp"
#include "spikeservo/diffmap.hpp"

namespace spikeservo {

struct ControlConfig {
    double cycle_ms = 80.0;
    double v_ref = 0.03;      // m/s commanded speed
    double k_c = 0.6;         // correction gain
    double reach_tol = 0.002;  // m
    double target_time_limit_s = 60.0;
};

struct SmithState {
    Vec2 last_xdot_cereb{0.0, 0.0};
    Vec2 last_e_pred{0.0, 0.0};
};

struct ControlCycleRecord {
    long cycle = 0;
    double t_ms = 0.0;
    Vec2 x_s{}, x_d{};
    Vec2 xdot_ref{}, xdot_cereb{}, e_pred{}, xdot_pred{}, xdot_dm_in{};
    Vec2 theta{}, thetadot_cmd{};
    bool reached = false;
};

inline void write_records_csv(std::ostream& os,
                              const std::vector<ControlCycleRecord>& recs)
{
    os << "cycle,t_ms,xs_x,xs_y,xd_x,xd_y,xref_x,xref_y,xcereb_x,xcereb_y,"
          "epred_x,epred_y,xpred_x,xpred_y,xdmin_x,xdmin_y,th1,th2,thd1,"
          "thd2\n";
    os << std::setprecision(17);
    for (const auto& r : recs) {
        os << r.cycle << ',' << r.t_ms << ',' << r.x_s[0] << ',' << r.x_s[1]
           << ',' << r.x_d[0] << ',' << r.x_d[1] << ',' << r.xdot_ref[0]
           << ',' << r.xdot_ref[1] << ',' << r.xdot_cereb[0] << ','
           << r.xdot_cereb[1] << ',' << r.e_pred[0] << ',' << r.e_pred[1]
           << ',' << r.xdot_pred[0] << ',' << r.xdot_pred[1] << ','
           << r.xdot_dm_in[0] << ',' << r.xdot_dm_in[1] << ',' << r.theta[0]
           << ',' << r.theta[1] << ',' << r.thetadot_cmd[0] << ','
           << r.thetadot_cmd[1] << '\n';
    }
}

// Control-law pieces, kept free so records can be audited offline.

inline Vec2 target_direction(const Vec2& x_d, const Vec2& x_s, double v_ref,
                             double reach_tol, bool& reached)
{
    const Vec2 d = x_d - x_s;
    const double dist = norm(d);
    if (dist <= reach_tol) {
        reached = true;
        return {0.0, 0.0};
    }
    reached = false;
    return (v_ref / dist) * d;
}

inline Vec2 prediction_error(const Vec2& xdot_sensed,
                             const Vec2& xdot_cereb_prev)
{
    return xdot_sensed - xdot_cereb_prev;
}

inline Vec2 corrected_reference(const Vec2& xdot_ref,
                                const Vec2& xdot_cereb_now,
                                const Vec2& e_pred, double k_c,
                                double clamp_range)
{
    const Vec2 xdot_pred = xdot_cereb_now + e_pred;
    Vec2 out = xdot_ref + k_c * (xdot_ref - xdot_pred);
    for (auto& v : out) {
        v = std::clamp(v, -clamp_range, clamp_range);
    }
    return out;
}

// Forward-model stand-ins the loop can run with.
class Predictor {
public:
    virtual ~Predictor() = default;
    // theta: sensed joint angles; cmd_prev: command computed last cycle
    // (the one in flight).
    virtual Vec2 predict_cycle(const Vec2& theta, const Vec2& cmd_prev,
                               const Vec2& xdot_sensed) = 0;
    // teaching pass: e_pred compares the delayed measurement against the
    // prediction issued for the same instant, so the learner replays the
    // equally old input context
    virtual void teach_cycle(const Vec2&) {}
};

class NullPredictor : public Predictor {
public:
    Vec2 predict_cycle(const Vec2&, const Vec2&, const Vec2&) override
    {
        return {0.0, 0.0};
    }
};

class SpikingPredictor : public Predictor {
public:
    SpikingPredictor(CBNetwork& cb, int delay_cycles = 1)
        : cb_(cb), lag_(std::max(delay_cycles, 1))
    {
    }

    Vec2 predict_cycle(const Vec2& theta, const Vec2& cmd_prev,
                       const Vec2& xdot_sensed) override
    {
        auto out = cb_.predict({theta[0], theta[1]},
                               {cmd_prev[0], cmd_prev[1]},
                               {xdot_sensed[0], xdot_sensed[1]});
        ctx_.push_back({theta, cmd_prev, xdot_sensed});
        if (ctx_.size() > 64) ctx_.pop_front();
        return {out[0], out[1]};
    }

    void teach_cycle(const Vec2& e_pred) override
    {
        if (ctx_.size() < static_cast<std::size_t>(lag_)) return;
        const auto& c = ctx_[ctx_.size() - lag_];
        cb_.cycle({c[0][0], c[0][1]}, {c[1][0], c[1][1]},
                  {c[2][0], c[2][1]}, {e_pred[0], e_pred[1]}, true);
    }

    CBNetwork& cb() { return cb_; }

private:
    CBNetwork& cb_;
    int lag_;
    std::deque<std::array<Vec2, 3>> ctx_;
};

// Ideal forward model: the plant's own Jacobian applied to the command in
// flight. Used to validate the predictor wiring independent of learning.
class OraclePredictor : public Predictor {
public:
    explicit OraclePredictor(const ArmModel& m) : model_(m) {}

    Vec2 predict_cycle(const Vec2& theta, const Vec2& cmd_prev,
                       const Vec2&) override
    {
        return apply_jacobian(jacobian(model_, theta), cmd_prev);
    }

private:
    ArmModel model_;
};

class ControlLoop {
public:
    ControlLoop(const ArmModel& model, const ArmState& initial,
                DMNetwork& dm, Predictor& predictor,
                const ControlConfig& cfg, int delay_cycles,
                double sigma_pos, double sigma_vel, unsigned sensor_seed)
        : model_(model),
          arm_(initial),
          dm_(dm),
          predictor_(&predictor),
          cfg_(cfg),
          delay_cycles_(delay_cycles),
          delay_(delay_cycles, sigma_pos, sigma_vel, sensor_seed)
    {
        delay_.push(arm_);
    }

    void set_target(const Vec2& x_d) { x_d_ = x_d; }
    void set_learning(bool on) { learning_ = on; }
    const ArmState& arm() const { return arm_; }
    const ControlConfig& config() const { return cfg_; }
    const SmithState& smith() const { return smith_; }

    ControlCycleRecord run_cycle()
    {
        SensorReading s = delay_.read();

        ControlCycleRecord rec;
        rec.cycle = cycle_++;
        rec.t_ms = arm_.t_ms;
        rec.x_s = s.x;
        rec.x_d = x_d_;
        rec.theta = s.theta;

        // compare the delayed measurement against the prediction issued for
        // the same instant: the sensor path returns the state from delay + 1
        // pushes back, and a prediction is made from the command of the
        // cycle before it, so the two meet at a lag of delay cycles
        const std::size_t lag =
            static_cast<std::size_t>(std::max(delay_cycles_, 1));
        const Vec2 cereb_then = cereb_hist_.size() >= lag
                                    ? cereb_hist_[cereb_hist_.size() - lag]
                                    : Vec2{0.0, 0.0};
        rec.e_pred = prediction_error(s.x_dot, cereb_then);
        if (learning_) {
            predictor_->teach_cycle(rec.e_pred);
        }
        rec.xdot_ref = target_direction(x_d_, s.x, cfg_.v_ref,
                                        cfg_.reach_tol, rec.reached);
        rec.xdot_cereb =
            predictor_->predict_cycle(s.theta, last_cmd_, s.x_dot);
        rec.xdot_pred = rec.xdot_cereb + rec.e_pred;
        rec.xdot_dm_in =
            corrected_reference(rec.xdot_ref, rec.xdot_cereb, rec.e_pred,
                                cfg_.k_c, dm_.config().xdot_range);

        if (rec.reached) {
            rec.thetadot_cmd = {0.0, 0.0};
        } else {
            auto cmd = dm_.infer({s.theta[0], s.theta[1]},
                                 {rec.xdot_dm_in[0], rec.xdot_dm_in[1]});
            rec.thetadot_cmd = {cmd[0], cmd[1]};
        }

        arm_ = step(model_, arm_, rec.thetadot_cmd, cfg_.cycle_ms);
        delay_.push(arm_);

        smith_.last_xdot_cereb = rec.xdot_cereb;
        smith_.last_e_pred = rec.e_pred;
        cereb_hist_.push_back(rec.xdot_cereb);
        if (cereb_hist_.size() > 64) cereb_hist_.pop_front();
        last_cmd_ = rec.thetadot_cmd;
        return rec;
    }

    // Run until the target is reached (and sensed as reached) or the time
    // limit expires.
    std::vector<ControlCycleRecord> run_reach(const Vec2& x_d)
    {
        set_target(x_d);
        const long max_cycles = static_cast<long>(
            cfg_.target_time_limit_s * 1000.0 / cfg_.cycle_ms);
        std::vector<ControlCycleRecord> recs;
        for (long i = 0; i < max_cycles; ++i) {
            recs.push_back(run_cycle());
            if (recs.back().reached) break;
        }
        return recs;
    }

private:
    ArmModel model_;
    ArmState arm_;
    DMNetwork& dm_;
    Predictor* predictor_;
    ControlConfig cfg_;
    int delay_cycles_;
    DelayLine delay_;
    SmithState smith_;
    std::deque<Vec2> cereb_hist_;
    Vec2 x_d_{0.0, 0.0};
    Vec2 last_cmd_{0.0, 0.0};
    bool learning_ = false;
    long cycle_ = 0;
};

}  // namespace spikeservo
