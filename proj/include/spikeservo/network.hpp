#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "spikeservo/izhikevich.hpp"
#include "spikeservo/stdp.hpp"

namespace spikeservo {

struct Population {
    std::string id;
    NeuronParams params{};
    int size = 0;
    std::vector<NeuronState> states;
    double bias = 0.0;  // tonic current applied every step
};

enum class Topology { one_to_one, all_to_all, random_fan_in, probabilistic };

// Directed weighted connections between two populations. The edge list is
// fixed after construction; plasticity only changes magnitudes.
struct SynapseGroup {
    std::string id;
    int pre = -1;
    int post = -1;
    std::vector<int> src;  // per edge: pre neuron index
    std::vector<int> dst;  // per edge: post neuron index
    std::vector<double> w;
    double w_min = -std::numeric_limits<double>::infinity();
    double w_max = std::numeric_limits<double>::infinity();
    PlasticityRule rule;

    std::vector<std::vector<int>> out_edges;  // per pre neuron
    std::vector<std::vector<int>> in_edges;   // per post neuron

    void add_edge(int s, int d, double weight)
    {
        src.push_back(s);
        dst.push_back(d);
        w.push_back(weight);
    }

    void build_index(int n_pre, int n_post)
    {
        out_edges.assign(n_pre, {});
        in_edges.assign(n_post, {});
        for (std::size_t e = 0; e < src.size(); ++e) {
            out_edges[src[e]].push_back(static_cast<int>(e));
            in_edges[dst[e]].push_back(static_cast<int>(e));
        }
    }

    bool plastic() const { return rule.kind != PlasticityKind::none; }
};

struct SpikeRecord {
    std::vector<std::string> pop_ids;
    std::vector<int> pop_sizes;
    // per population: (neuron index, spike time ms), times non-decreasing
    std::vector<std::vector<std::pair<int, double>>> spikes;
    double t_begin = 0.0;
    double t_end = 0.0;

    std::size_t total() const
    {
        std::size_t n = 0;
        for (const auto& s : spikes) n += s.size();
        return n;
    }

    void write_csv(std::ostream& os) const
    {
        os << "population,neuron,t_ms\n";
        for (std::size_t p = 0; p < spikes.size(); ++p) {
            for (const auto& [n, t] : spikes[p]) {
                os << pop_ids[p] << ',' << n << ',' << t << '\n';
            }
        }
    }
};

// rate in Hz per neuron of one population
inline std::vector<double> firing_rates(const SpikeRecord& rec, int pop,
                                        double window_ms)
{
    assert(window_ms > 0.0);
    std::vector<double> rates(rec.pop_sizes[pop], 0.0);
    for (const auto& [n, t] : rec.spikes[pop]) {
        rates[n] += 1.0;
    }
    for (auto& r : rates) {
        r *= 1000.0 / window_ms;
    }
    return rates;
}

// Inputs held constant over one window: per-population per-neuron currents
// plus optional periodic pulse trains (used to drive populations at an
// exact rate, e.g. error-encoding assemblies).
struct WindowInput {
    std::vector<std::vector<double>> currents;  // empty vector = all zero

    struct Pulse {
        int pop = -1;
        std::vector<int> neurons;  // empty = whole population
        double amplitude = 0.0;
        int period_steps = 1;
    };
    std::vector<Pulse> pulses;

    void set_current(int pop, std::vector<double> c)
    {
        if (static_cast<int>(currents.size()) <= pop) {
            currents.resize(pop + 1);
        }
        currents[pop] = std::move(c);
    }
};

class Network {
public:
    double dt = 1.0;  // ms
    int n_sub = 4;
    bool plasticity_enabled = true;

    int add_population(std::string id, NeuronParams params, int size,
                       double bias = 0.0)
    {
        Population p;
        p.id = std::move(id);
        p.params = params;
        p.size = size;
        p.states.assign(size, initial_state(params));
        p.bias = bias;
        pops_.push_back(std::move(p));
        return static_cast<int>(pops_.size()) - 1;
    }

    int add_synapses(SynapseGroup g)
    {
        g.build_index(pops_[g.pre].size, pops_[g.post].size);
        syns_.push_back(std::move(g));
        return static_cast<int>(syns_.size()) - 1;
    }

    Population& pop(int i) { return pops_[i]; }
    const Population& pop(int i) const { return pops_[i]; }
    std::size_t n_populations() const { return pops_.size(); }
    SynapseGroup& synapses(int i) { return syns_[i]; }
    const SynapseGroup& synapses(int i) const { return syns_[i]; }
    std::size_t n_synapse_groups() const { return syns_.size(); }
    double now_ms() const { return now_ms_; }

    int find_population(const std::string& id) const
    {
        for (std::size_t i = 0; i < pops_.size(); ++i) {
            if (pops_[i].id == id) return static_cast<int>(i);
        }
        return -1;
    }

    // Reset all membrane states to rest and clear pending input. Weights
    // are untouched.
    void reset_states()
    {
        for (auto& p : pops_) {
            for (auto& s : p.states) {
                s = initial_state(p.params);
            }
        }
    }

    SpikeRecord run_window(const WindowInput& in, double duration_ms)
    {
        const int n_steps = static_cast<int>(duration_ms / dt + 0.5);
        assert(n_steps > 0 && std::abs(n_steps * dt - duration_ms) < 1e-9);

        const std::size_t np = pops_.size();
        SpikeRecord rec;
        rec.t_begin = now_ms_;
        rec.t_end = now_ms_ + duration_ms;
        rec.spikes.resize(np);
        for (const auto& p : pops_) {
            rec.pop_ids.push_back(p.id);
            rec.pop_sizes.push_back(p.size);
        }

        // last spike times, fresh per window (pairing never crosses windows)
        constexpr double kNever = -1e18;
        last_spike_.assign(np, {});
        pop_last_spike_.assign(np, kNever);
        for (std::size_t p = 0; p < np; ++p) {
            last_spike_[p].assign(pops_[p].size, kNever);
        }

        std::vector<std::vector<double>> syn_cur(np), syn_next(np);
        for (std::size_t p = 0; p < np; ++p) {
            syn_cur[p].assign(pops_[p].size, 0.0);
            syn_next[p].assign(pops_[p].size, 0.0);
        }

        std::vector<std::vector<int>> spikers(np);

        for (int step = 0; step < n_steps; ++step) {
            const double t = now_ms_ + step * dt;

            // integrate
            for (std::size_t p = 0; p < np; ++p) {
                spikers[p].clear();
                Population& pop = pops_[p];
                for (int n = 0; n < pop.size; ++n) {
                    double i = pop.bias + syn_cur[p][n];
                    if (p < in.currents.size() && !in.currents[p].empty()) {
                        i += in.currents[p][n];
                    }
                    pop.states[n].i_ext = i;
                }
            }
            for (const auto& pulse : in.pulses) {
                if (step % pulse.period_steps != 0) continue;
                auto& pop = pops_[pulse.pop];
                if (pulse.neurons.empty()) {
                    for (int n = 0; n < pop.size; ++n) {
                        pop.states[n].i_ext += pulse.amplitude;
                    }
                } else {
                    for (int n : pulse.neurons) {
                        pop.states[n].i_ext += pulse.amplitude;
                    }
                }
            }
            for (std::size_t p = 0; p < np; ++p) {
                Population& pop = pops_[p];
                for (int n = 0; n < pop.size; ++n) {
                    if (step_neuron(pop.states[n], pop.params, dt, n_sub)) {
                        spikers[p].push_back(n);
                        last_spike_[p][n] = t;
                        pop_last_spike_[p] = t;
                        rec.spikes[p].emplace_back(n, t);
                    }
                }
            }

            // deliver spikes (effective next step) and apply plasticity
            for (auto& g : syns_) {
                const auto& pre_spk = spikers[g.pre];
                for (int n : pre_spk) {
                    for (int e : g.out_edges[n]) {
                        syn_next[g.post][g.dst[e]] += g.w[e];
                    }
                }
                if (!plasticity_enabled || !g.plastic()) continue;
                if (g.rule.gate_population >= 0 &&
                    t - pop_last_spike_[g.rule.gate_population] >
                        g.rule.gate_window) {
                    if (g.rule.gate_population_ltp >= 0 &&
                        t - pop_last_spike_[g.rule.gate_population_ltp] <=
                            g.rule.gate_window) {
                        for (int n : pre_spk) {
                            for (int e : g.out_edges[n]) {
                                apply_delta(g, e, g.rule.s_b);
                            }
                        }
                    }
                    continue;
                }
                // nearest-neighbor pairing: each post spike pairs with the
                // most recent pre spike (dt >= 0); each pre spike pairs with
                // the most recent strictly-earlier post spike (dt < 0)
                for (int n : spikers[g.post]) {
                    for (int e : g.in_edges[n]) {
                        const double tp = last_spike_[g.pre][g.src[e]];
                        const double d = t - tp;
                        if (d <= g.rule.window) {
                            apply_delta(g, e, stdp_delta(d, g.rule));
                        }
                    }
                }
                for (int n : pre_spk) {
                    for (int e : g.out_edges[n]) {
                        const double tq = last_spike_[g.post][g.dst[e]];
                        if (tq >= t) continue;  // dt = 0 handled above
                        const double d = tq - t;
                        if (-d <= g.rule.window) {
                            apply_delta(g, e, stdp_delta(d, g.rule));
                        }
                    }
                }
            }

            for (std::size_t p = 0; p < np; ++p) {
                std::swap(syn_cur[p], syn_next[p]);
                std::fill(syn_next[p].begin(), syn_next[p].end(), 0.0);
            }
        }

        now_ms_ += n_steps * dt;
        return rec;
    }

private:
    static void apply_delta(SynapseGroup& g, int e, double delta)
    {
        g.w[e] = std::clamp(g.w[e] + delta, g.w_min, g.w_max);
    }

    std::vector<Population> pops_;
    std::vector<SynapseGroup> syns_;
    double now_ms_ = 0.0;
    std::vector<std::vector<double>> last_spike_;
    std::vector<double> pop_last_spike_;
};

// ---- topology helpers ----

inline SynapseGroup make_one_to_one(int pre, int post, int n_pre, int n_post,
                                    double w)
{
    SynapseGroup g;
    g.pre = pre;
    g.post = post;
    // sizes may differ (e.g. 8 error neurons onto 4 output neurons);
    // map i -> i mod n_post so every source lands on a matched target
    for (int i = 0; i < n_pre; ++i) {
        g.add_edge(i, i % n_post, w);
    }
    return g;
}

inline SynapseGroup make_all_to_all(int pre, int post, int n_pre, int n_post,
                                    double w)
{
    SynapseGroup g;
    g.pre = pre;
    g.post = post;
    for (int i = 0; i < n_pre; ++i) {
        for (int j = 0; j < n_post; ++j) {
            g.add_edge(i, j, w);
        }
    }
    return g;
}

inline SynapseGroup make_probabilistic(int pre, int post, int n_pre,
                                       int n_post, double p, double w,
                                       std::mt19937& rng)
{
    SynapseGroup g;
    g.pre = pre;
    g.post = post;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n_pre; ++i) {
        for (int j = 0; j < n_post; ++j) {
            if (unit(rng) < p) {
                g.add_edge(i, j, w);
            }
        }
    }
    return g;
}

}  // namespace spikeservo
