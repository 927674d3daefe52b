// Acceptance gate: one PASS/FAIL line per criterion, pinned tolerances.
// Run with an optional substring filter, e.g. `acceptance C7`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spikeservo/experiments.hpp"

using namespace spikeservo;

namespace {

int g_failures = 0;
const char* g_filter = nullptr;

bool selected(const char* id)
{
    return !g_filter || std::strstr(id, g_filter) != nullptr;
}

void report(const char* id, const char* what, bool pass,
            const std::string& detail)
{
    std::printf("%-4s %-34s %s  (%s)\n", id, what, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

// least-squares slope of y against its index
double linear_slope(const std::vector<double>& y)
{
    const double n = static_cast<double>(y.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sx += i;
        sy += y[i];
        sxx += double(i) * i;
        sxy += i * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ------------------------------------------------------------------ C1

int reference_spike_count(const NeuronParams& p, double i_const,
                          double duration_ms, double dt)
{
    double v, u;
    if (!rest_state(p, v, u)) {
        v = p.c;
        u = p.b * p.c;
    }
    int spikes = 0;
    const long n = static_cast<long>(duration_ms / dt);
    for (long k = 0; k < n; ++k) {
        const double dv = 0.04 * v * v + 5.0 * v + 140.0 - u + i_const;
        const double du = p.a * (p.b * v - u);
        v += dt * dv;
        u += dt * du;
        if (v >= 30.0) {
            ++spikes;
            v = p.c;
            u += p.d;
        }
    }
    return spikes;
}

void c1_neuron_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    NeuronParams rs{0.02, 0.2, -65.0, 8.0};
    const int ref = reference_spike_count(rs, 10.0, 1000.0, 0.01);
    NeuronState s = initial_state(rs);
    int got = 0, rest = 0;
    for (int t = 0; t < 1000; ++t) {
        s.i_ext = 10.0;
        if (step_neuron(s, rs, 1.0)) ++got;
    }
    NeuronState r = initial_state(rs);
    for (int t = 0; t < 1000; ++t) {
        r.i_ext = 0.0;
        if (step_neuron(r, rs, 1.0)) ++rest;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    report("C1", "Izhikevich RS spike-count oracle",
           std::abs(ref - got) <= 1 && ref > 0 && rest == 0 && secs < 1.0,
           fmt("ref=%d engine=%d rest=%d %.2fs", ref, got, rest, secs));
}

// ------------------------------------------------------------------ C2

void c2_stdp()
{
    PlasticityRule sym;
    sym.kind = PlasticityKind::symmetric;
    sym.s = 0.05;
    sym.tau1 = 20.0;
    sym.tau2 = 18.0;
    sym.window = 50.0;
    PlasticityRule anti;
    anti.kind = PlasticityKind::anti_symmetric;
    anti.s_a = 0.03;
    anti.s_b = 0.02;
    anti.tau_a = 20.0;
    anti.tau_b = 25.0;
    anti.window = 50.0;

    bool ok = true;
    auto near = [&](double a, double b, double tol = 1e-12) {
        if (std::abs(a - b) > tol) ok = false;
    };
    near(stdp_delta_symmetric(0.0, sym), 0.05);
    near(stdp_delta_symmetric(20.0, sym), 0.0);
    near(stdp_delta_symmetric(40.0, sym),
         0.05 * -3.0 * std::exp(-40.0 / 18.0));
    near(stdp_delta_antisymmetric(0.0, anti), -0.03);
    near(stdp_delta_antisymmetric(25.0, anti), 0.02 * std::exp(-1.0));
    near(stdp_delta_antisymmetric(-20.0, anti), -0.03 * std::exp(-1.0));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dts(-60.0, 60.0);
    const double w_min = -4.0, w_max = 4.0;
    double w1 = 0.0, w2 = 0.0;
    bool clamped = true;
    for (int i = 0; i < 100000; ++i) {
        const double dt = dts(rng);
        w1 = std::clamp(w1 + stdp_delta(dt, sym), w_min, w_max);
        w2 = std::clamp(w2 + stdp_delta(dt, anti), w_min, w_max);
        clamped = clamped && w1 >= w_min && w1 <= w_max && w2 >= w_min &&
                  w2 <= w_max;
    }
    report("C2", "STDP examples + clamp fuzz", ok && clamped,
           fmt("examples=%s fuzz=%s", ok ? "ok" : "bad",
               clamped ? "ok" : "bad"));
}

// ------------------------------------------------------------------ C3

void c3_coding_roundtrip()
{
    Codec c{-2.0, 3.0, 20};
    std::mt19937 rng(11);
    const double range = c.hi - c.lo;
    // central 90% of the range
    std::uniform_real_distribution<double> vals(c.lo + 0.05 * range,
                                                c.hi - 0.05 * range);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double v = vals(rng);
        const double got = c.decode(c.encode(v)).value();
        worst = std::max(worst, std::abs(got - v));
    }
    report("C3", "population-coding round-trip", worst <= 0.05 * range,
           fmt("worst=%.4f limit=%.4f", worst, 0.05 * range));
}

// ------------------------------------------------------------------ C4

void c4_jacobian()
{
    ArmModel m;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u1(m.theta_min[0], m.theta_max[0]);
    std::uniform_real_distribution<double> u2(m.theta_min[1], m.theta_max[1]);
    const double h = 1e-6;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Vec2 th{u1(rng), u2(rng)};
        const auto j = jacobian(m, th);
        for (int c = 0; c < 2; ++c) {
            Vec2 tp = th, tm = th;
            tp[c] += h;
            tm[c] -= h;
            const auto xp = forward_kinematics(m, tp);
            const auto xm = forward_kinematics(m, tm);
            for (int r = 0; r < 2; ++r) {
                const double fd = (xp[r] - xm[r]) / (2.0 * h);
                const double scale = std::max(1e-3, std::abs(j[r][c]));
                worst = std::max(worst, std::abs(fd - j[r][c]) / scale);
            }
        }
    }
    report("C4", "analytic Jacobian vs central FD", worst < 1e-6,
           fmt("worst rel err=%.2e", worst));
}

// ------------------------------------------------------------------ C5

void c5_dm_quality(const HarnessConfig& h, DMNetwork& dm, double babble_secs)
{
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int pos = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        const Vec2 th{
            h.arm.theta_min[0] +
                (h.arm.theta_max[0] - h.arm.theta_min[0]) * u01(rng),
            h.arm.theta_min[1] +
                (h.arm.theta_max[1] - h.arm.theta_min[1]) * u01(rng)};
        const double ang = 2.0 * M_PI * u01(rng);
        const Vec2 xd{0.03 * std::cos(ang), 0.03 * std::sin(ang)};
        const auto cmd = dm.infer({th[0], th[1]}, {xd[0], xd[1]});
        const Vec2 got = apply_jacobian(jacobian(h.arm, th), {cmd[0], cmd[1]});
        if (dot(got, xd) > 0.0) ++pos;
    }
    report("C5", "DM directional fidelity after babble",
           pos >= 80 && babble_secs <= 300.0,
           fmt("positive %d/100, babble %.1fs", pos, babble_secs));
}

// ------------------------------------------------------------------ C6

void c6_prediction_convergence(const HarnessConfig& h)
{
    DMNetwork dm(h.dm, 1);
    babble(dm, h.arm, 3000, 1);
    CBNetwork cb(h.cb, 1);
    const auto tr = train_cb(h, dm, cb, 50, 1);

    const auto& e = tr.epred_mean;
    const std::size_t tenth = e.size() / 10;
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < tenth; ++i) {
        head += e[i];
        tail += e[e.size() - tenth + i];
    }
    head /= tenth;
    tail /= tenth;

    std::vector<double> e0, e1;
    for (const auto& rep : tr.reps) {
        for (const auto& r : rep) {
            e0.push_back(std::abs(r.e_pred[0]));
            e1.push_back(std::abs(r.e_pred[1]));
        }
    }
    const double s0 = linear_slope(e0), s1 = linear_slope(e1);
    report("C6", "prediction-error convergence",
           tail < 0.5 * head && s0 < 0.0 && s1 < 0.0,
           fmt("tail/head=%.1f%% slopes=%.2e/%.2e over %zu cycles",
               100.0 * tail / head, s0, s1, e.size()));
}

// ------------------------------------------------------------------ C7

void c7_random_reach(const HarnessConfig& h)
{
    DMNetwork dm(h.dm, 1);
    babble(dm, h.arm, 3000, 1);
    CBNetwork cb(h.cb, 1);
    ExperimentSpec spec;
    spec.seed = 1;
    const auto res = run_random_reach(h, dm, cb, spec);
    // time criterion on the reduction of the mean reach time
    const double time_red = 1.0 - 1.0 / res.time_ratio;
    report("C7", "random-reach paired improvement",
           res.pairs.size() >= 20 && res.mean_dev_reduction >= 0.20 &&
               time_red >= 0.40,
           fmt("%zu pairs, dev red %.1f%%, time red %.1f%% "
               "(per-pair mean %.1f%%)",
               res.pairs.size(), 100.0 * res.mean_dev_reduction,
               100.0 * time_red, 100.0 * res.mean_time_reduction));
}

// ------------------------------------------------------------------ C8

void c8_radial(const HarnessConfig& h)
{
    DMNetwork dm(h.dm, 1);
    babble(dm, h.arm, 3000, 1);
    ExperimentSpec spec;
    spec.seed = 1;
    const auto res = run_radial_reach(h, dm, spec);
    report("C8", "radial mean deviation reduction",
           res.mean_dev_reduction >= 0.30,
           fmt("mean red %.1f%%", 100.0 * res.mean_dev_reduction));
    report("C8", "radial monotone 0->4->8 in >=6/8",
           res.monotone_count >= 6,
           fmt("monotone %d/8", res.monotone_count));
}

// ------------------------------------------------------------------ C9

void c9_contour(const HarnessConfig& h)
{
    DMNetwork dm(h.dm, 1);
    babble(dm, h.arm, 3000, 1);
    CBNetwork cb(h.cb, 1);
    ExperimentSpec spec;
    spec.seed = 1;
    spec.task = "contour";
    const auto res = run_contour(h, dm, cb, spec);
    const double off_e = res.off.metrics.max_error;
    const double on_e = res.on.metrics.max_error;
    const double off_t = res.off.metrics.completion_time_s;
    const double on_t = res.on.metrics.completion_time_s;
    report("C9", "contour max error on <= 0.5x off", on_e <= 0.5 * off_e,
           fmt("off %.4f on %.4f ratio %.2f", off_e, on_e, on_e / off_e));
    report("C9", "contour completion time red >= 15%",
           (off_t - on_t) / off_t >= 0.15,
           fmt("off %.1fs on %.1fs red %.1f%%", off_t, on_t,
               100.0 * (off_t - on_t) / off_t));
}

// ----------------------------------------------------------------- C10

void c10_smith_wiring(const HarnessConfig& h, DMNetwork& dm)
{
    HarnessConfig hb = h;  // baseline: no sensor delay, no correction
    hb.delay_cycles = 0;
    HarnessConfig ho = h;  // oracle predictor against one cycle of delay
    ho.delay_cycles = 1;

    WorkspaceSampler sampler(h.arm, 33);
    std::vector<double> dev_base, dev_orac;
    for (int i = 0; i < 8; ++i) {
        auto [start, target] = sampler.sample_pair(0.05);
        Vec2 start_th;
        inverse_kinematics(h.arm, start, start_th);
        const unsigned sseed = 500 + i;
        NullPredictor null;
        OraclePredictor oracle(h.arm);
        dev_base.push_back(eval_reach(hb, dm, null, 0.0, start_th, target,
                                      sseed, nullptr)
                               .max_deviation);
        dev_orac.push_back(eval_reach(ho, dm, oracle, h.control.k_c,
                                      start_th, target, sseed, nullptr)
                               .max_deviation);
    }
    const double mb = mean(dev_base), mo = mean(dev_orac);
    report("C10", "Smith wiring: oracle D=1 vs D=0/kc=0", mo <= mb,
           fmt("oracle %.4f baseline %.4f over %zu reaches", mo, mb,
               dev_base.size()));
}

// ----------------------------------------------------------------- C11

void c11_determinism(const HarnessConfig& h)
{
    auto run_once = [&]() {
        DMNetwork dm(h.dm, 5);
        std::ostringstream os;
        os << std::setprecision(17);
        auto rows = babble(dm, h.arm, 200, 5);
        write_babble_csv(os, rows);
        NullPredictor off;
        CBNetwork cb(h.cb, 5);
        SpikingPredictor pred(cb, h.delay_cycles);
        const Vec2 start_th = center_angles(h.arm);
        const Vec2 target =
            forward_kinematics(h.arm, start_th) + Vec2{0.05, 0.04};
        std::vector<ControlCycleRecord> r1, r2;
        eval_reach(h, dm, off, 0.0, start_th, target, 77, &r1);
        eval_reach(h, dm, pred, h.control.k_c, start_th, target, 77, &r2);
        write_records_csv(os, r1);
        write_records_csv(os, r2);
        return os.str();
    };
    const std::string a = run_once();
    const std::string b = run_once();
    report("C11", "byte-identical CSV re-runs", a == b,
           fmt("%zu bytes compared", a.size()));
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc > 1) g_filter = argv[1];
    const HarnessConfig h = load_config("");

    if (selected("C1")) c1_neuron_oracle();
    if (selected("C2")) c2_stdp();
    if (selected("C3")) c3_coding_roundtrip();
    if (selected("C4")) c4_jacobian();

    if (selected("C5") || selected("C10")) {
        const auto t0 = std::chrono::steady_clock::now();
        DMNetwork dm(h.dm, 42);
        babble(dm, h.arm, 3000, 42);
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        if (selected("C5")) c5_dm_quality(h, dm, secs);
        if (selected("C10")) c10_smith_wiring(h, dm);
    }

    if (selected("C6")) c6_prediction_convergence(h);
    if (selected("C7")) c7_random_reach(h);
    if (selected("C8")) c8_radial(h);
    if (selected("C9")) c9_contour(h);
    if (selected("C11")) c11_determinism(h);

    std::printf("%d criterion check(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
