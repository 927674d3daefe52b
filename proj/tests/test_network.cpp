#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "spikeservo/network.hpp"

using namespace spikeservo;

namespace {

NeuronParams rs() { return {0.02, 0.2, -65.0, 8.0}; }

}  // namespace

TEST_CASE("window with zero input from rest yields an empty record")
{
    Network net;
    net.add_population("a", rs(), 5);
    net.add_population("b", rs(), 3);
    auto rec = net.run_window({}, 160.0);
    CHECK(rec.total() == 0);
}

TEST_CASE("driven pre neuron makes one-to-one post neuron spike")
{
    Network net;
    int a = net.add_population("a", rs(), 1);
    int b = net.add_population("b", rs(), 1);
    auto g = make_one_to_one(a, b, 1, 1, 30.0);
    net.add_synapses(std::move(g));

    WindowInput in;
    in.set_current(a, {20.0});
    auto rec = net.run_window(in, 80.0);
    CHECK_FALSE(rec.spikes[a].empty());
    CHECK_FALSE(rec.spikes[b].empty());
    // transmission delay is one step: first post spike strictly after pre
    CHECK(rec.spikes[b].front().second > rec.spikes[a].front().second);
}

TEST_CASE("spike times are multiples of the step and non-decreasing")
{
    Network net;
    int a = net.add_population("a", rs(), 4);
    WindowInput in;
    in.set_current(a, {12.0, 15.0, 20.0, 25.0});
    auto rec = net.run_window(in, 200.0);
    REQUIRE(rec.total() > 0);
    double prev = -1.0;
    for (auto [n, t] : rec.spikes[a]) {
        CHECK(std::fmod(t, 1.0) == 0.0);
        CHECK(t >= prev);
        prev = t;
    }
}

TEST_CASE("identical network and inputs reproduce identical records")
{
    auto build = [] {
        Network net;
        int a = net.add_population("a", rs(), 10);
        int b = net.add_population("b", rs(), 10);
        std::mt19937 rng(42);
        auto g = make_probabilistic(a, b, 10, 10, 0.5, 5.0, rng);
        g.rule.kind = PlasticityKind::symmetric;
        g.rule.s = 0.05;
        g.w_min = 0.0;
        g.w_max = 8.0;
        net.add_synapses(std::move(g));
        return net;
    };
    WindowInput in;
    in.set_current(0, std::vector<double>(10, 15.0));
    Network n1 = build(), n2 = build();
    auto r1 = n1.run_window(in, 80.0);
    auto r2 = n2.run_window(in, 80.0);
    CHECK(r1.spikes == r2.spikes);
    CHECK(n1.synapses(0).w == n2.synapses(0).w);
}

TEST_CASE("plasticity gated by a silent population leaves weights unchanged")
{
    Network net;
    int a = net.add_population("a", rs(), 2);
    int b = net.add_population("b", rs(), 2);
    int gate = net.add_population("gate", rs(), 2);
    auto g = make_all_to_all(a, b, 2, 2, 10.0);
    g.rule.kind = PlasticityKind::symmetric;
    g.rule.s = 0.05;
    g.rule.tau1 = 20.0;
    g.rule.tau2 = 18.0;
    g.rule.gate_population = gate;
    g.w_min = 0.0;
    g.w_max = 20.0;
    int gi = net.add_synapses(std::move(g));

    WindowInput in;
    in.set_current(a, {20.0, 20.0});
    in.set_current(b, {20.0, 20.0});
    const auto before = net.synapses(gi).w;
    auto rec = net.run_window(in, 80.0);
    CHECK(rec.total() > 0);  // pre/post pairs do exist
    CHECK(net.synapses(gi).w == before);
}

TEST_CASE("gated plasticity applies when the gate population is active")
{
    Network net;
    int a = net.add_population("a", rs(), 2);
    int b = net.add_population("b", rs(), 2);
    int gate = net.add_population("gate", rs(), 2);
    auto g = make_all_to_all(a, b, 2, 2, 10.0);
    g.rule.kind = PlasticityKind::symmetric;
    g.rule.s = 0.05;
    g.rule.gate_population = gate;
    g.w_min = 0.0;
    g.w_max = 20.0;
    int gi = net.add_synapses(std::move(g));

    WindowInput in;
    in.set_current(a, {20.0, 20.0});
    in.set_current(b, {20.0, 20.0});
    in.set_current(gate, {20.0, 20.0});
    const auto before = net.synapses(gi).w;
    net.run_window(in, 80.0);
    CHECK(net.synapses(gi).w != before);
}

TEST_CASE("weights of groups with silent pre and post are untouched")
{
    Network net;
    int a = net.add_population("a", rs(), 2);
    int b = net.add_population("b", rs(), 2);
    int c = net.add_population("c", rs(), 2);
    auto g1 = make_all_to_all(a, b, 2, 2, 1.0);
    g1.rule.kind = PlasticityKind::symmetric;
    g1.rule.s = 0.05;
    g1.w_min = 0.0;
    g1.w_max = 4.0;
    auto g2 = make_all_to_all(b, c, 2, 2, 1.0);
    g2.rule.kind = PlasticityKind::symmetric;
    g2.rule.s = 0.05;
    g2.w_min = 0.0;
    g2.w_max = 4.0;
    net.add_synapses(std::move(g1));
    int quiet = net.add_synapses(std::move(g2));
    const auto before = net.synapses(quiet).w;

    WindowInput in;
    in.set_current(a, {20.0, 20.0});  // b stays silent: weight 1.0 too weak
    net.run_window(in, 80.0);
    CHECK(net.synapses(quiet).w == before);
}

TEST_CASE("plastic weights stay clamped while co-driven")
{
    Network net;
    int a = net.add_population("a", rs(), 4);
    int b = net.add_population("b", rs(), 4);
    auto g = make_all_to_all(a, b, 4, 4, 2.0);
    g.rule.kind = PlasticityKind::symmetric;
    g.rule.s = 0.5;
    g.w_min = 0.0;
    g.w_max = 3.0;
    int gi = net.add_synapses(std::move(g));

    WindowInput in;
    in.set_current(a, std::vector<double>(4, 20.0));
    in.set_current(b, std::vector<double>(4, 20.0));
    for (int i = 0; i < 20; ++i) {
        net.run_window(in, 80.0);
        for (double w : net.synapses(gi).w) {
            REQUIRE(w >= 0.0);
            REQUIRE(w <= 3.0);
        }
    }
    // heavy co-activation saturates at the clamp
    CHECK(*std::max_element(net.synapses(gi).w.begin(),
                            net.synapses(gi).w.end()) ==
          Catch::Approx(3.0));
}

TEST_CASE("firing rates are spike count over window")
{
    SpikeRecord rec;
    rec.pop_ids = {"a"};
    rec.pop_sizes = {3};
    rec.spikes.resize(1);
    for (int i = 0; i < 8; ++i) {
        rec.spikes[0].emplace_back(0, i * 10.0);
    }
    rec.spikes[0].emplace_back(2, 40.0);
    auto rates = firing_rates(rec, 0, 80.0);
    CHECK(rates[0] == Catch::Approx(100.0));
    CHECK(rates[1] == 0.0);
    CHECK(rates[2] == Catch::Approx(12.5));
}

TEST_CASE("spike record serializes to population,neuron,t_ms CSV")
{
    SpikeRecord rec;
    rec.pop_ids = {"a", "b"};
    rec.pop_sizes = {1, 1};
    rec.spikes.resize(2);
    rec.spikes[0].emplace_back(0, 3.0);
    rec.spikes[1].emplace_back(0, 5.0);
    std::ostringstream os;
    rec.write_csv(os);
    CHECK(os.str() == "population,neuron,t_ms\na,0,3\nb,0,5\n");
}

TEST_CASE("pulse trains fire the population at the requested rate")
{
    Network net;
    int a = net.add_population("a", rs(), 3);
    WindowInput in;
    WindowInput::Pulse p;
    p.pop = a;
    p.amplitude = 300.0;
    p.period_steps = 20;
    in.pulses.push_back(p);
    auto rec = net.run_window(in, 80.0);
    auto rates = firing_rates(rec, a, 80.0);
    for (double r : rates) {
        CHECK(r == Catch::Approx(50.0));  // 4 spikes / 80 ms
    }
}
