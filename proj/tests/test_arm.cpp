#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spikeservo/arm.hpp"

using namespace spikeservo;

TEST_CASE("extended arm reaches L1 + L2 along x")
{
    ArmModel m;
    auto x = forward_kinematics(m, {0.0, 0.0});
    CHECK(x[0] == Catch::Approx(0.45));
    CHECK(x[1] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("right-angle elbow")
{
    ArmModel m;
    auto x = forward_kinematics(m, {0.0, deg2rad(90.0)});
    CHECK(x[0] == Catch::Approx(0.24));
    CHECK(x[1] == Catch::Approx(0.21));
}

TEST_CASE("shoulder up, elbow back")
{
    ArmModel m;
    auto x = forward_kinematics(m, {deg2rad(90.0), deg2rad(-90.0)});
    CHECK(x[0] == Catch::Approx(0.21));
    CHECK(x[1] == Catch::Approx(0.24));
}

TEST_CASE("jacobian at zero configuration")
{
    ArmModel m;
    auto j = jacobian(m, {0.0, 0.0});
    CHECK(j[0][0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(j[0][1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(j[1][0] == Catch::Approx(0.45));
    CHECK(j[1][1] == Catch::Approx(0.21));
}

TEST_CASE("jacobian matches central finite differences")
{
    ArmModel m;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u1(m.theta_min[0], m.theta_max[0]);
    std::uniform_real_distribution<double> u2(m.theta_min[1], m.theta_max[1]);
    const double h = 1e-6;
    for (int k = 0; k < 1000; ++k) {
        Vec2 th{u1(rng), u2(rng)};
        auto j = jacobian(m, th);
        for (int c = 0; c < 2; ++c) {
            Vec2 tp = th, tm = th;
            tp[c] += h;
            tm[c] -= h;
            auto xp = forward_kinematics(m, tp);
            auto xm = forward_kinematics(m, tm);
            for (int r = 0; r < 2; ++r) {
                const double fd = (xp[r] - xm[r]) / (2.0 * h);
                const double scale = std::max(1e-3, std::abs(j[r][c]));
                REQUIRE(std::abs(fd - j[r][c]) / scale < 1e-6);
            }
        }
    }
}

TEST_CASE("aligned links are singular")
{
    ArmModel m;
    auto j = jacobian(m, {0.4, 0.0});
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    CHECK(det == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("zero command leaves state unchanged except time")
{
    ArmModel m;
    auto s = make_state(m, {-1.0, 1.5});
    auto s2 = step(m, s, {0.0, 0.0}, 80.0);
    CHECK(s2.theta == s.theta);
    CHECK(s2.x == s.x);
    CHECK(s2.t_ms == Catch::Approx(80.0));
}

TEST_CASE("joint limit pins angle and zeroes velocity")
{
    ArmModel m;
    auto s = make_state(m, {m.theta_max[0] - 1e-4, 1.5});
    auto s2 = step(m, s, {0.4, 0.0}, 80.0);
    CHECK(s2.theta[0] == m.theta_max[0]);
    CHECK(s2.theta_dot[0] == 0.0);
}

TEST_CASE("constant command advances linearly without clamping")
{
    ArmModel m;
    auto s = make_state(m, {-1.2, 1.8});
    const Vec2 cmd{0.1, -0.05};
    for (int k = 0; k < 10; ++k) {
        s = step(m, s, cmd, 80.0);
    }
    CHECK(s.theta[0] == Catch::Approx(-1.2 + 10 * 0.08 * 0.1));
    CHECK(s.theta[1] == Catch::Approx(1.8 - 10 * 0.08 * 0.05));
}

TEST_CASE("kinematic consistency after stepping")
{
    ArmModel m;
    auto s = make_state(m, {-1.2, 1.8});
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> cmds(-0.3, 0.3);
    for (int k = 0; k < 200; ++k) {
        s = step(m, s, {cmds(rng), cmds(rng)}, 80.0);
        auto v = apply_jacobian(jacobian(m, s.theta), s.theta_dot);
        REQUIRE(norm(v - s.x_dot) <= 1e-9);
        REQUIRE(norm(forward_kinematics(m, s.theta) - s.x) <= 1e-12);
        REQUIRE(s.theta[0] >= m.theta_min[0]);
        REQUIRE(s.theta[0] <= m.theta_max[0]);
    }
}

TEST_CASE("delay line returns the exact snapshot D cycles old")
{
    ArmModel m;
    DelayLine d0(0, 0.0, 0.0, 1);
    DelayLine d2(2, 0.0, 0.0, 1);
    auto s = make_state(m, {-1.0, 1.5});
    std::vector<ArmState> hist;
    for (int k = 0; k < 6; ++k) {
        s = step(m, s, {0.05, 0.02}, 80.0);
        hist.push_back(s);
        d0.push(s);
        d2.push(s);
        CHECK(d0.read().t_ms == s.t_ms);
        const int want = std::max(0, k - 2);
        CHECK(d2.read().t_ms == hist[want].t_ms);
    }
}

TEST_CASE("sensor noise has the configured standard deviation")
{
    ArmModel m;
    DelayLine d(0, 1e-3, 0.0, 99);
    auto s = make_state(m, {-1.0, 1.5});
    d.push(s);
    double sum = 0.0, sum2 = 0.0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        auto r = d.read();
        const double e = r.x[0] - s.x[0];
        sum += e;
        sum2 += e * e;
    }
    const double var = sum2 / n - (sum / n) * (sum / n);
    CHECK(std::sqrt(var) == Catch::Approx(1e-3).epsilon(0.05));
}
