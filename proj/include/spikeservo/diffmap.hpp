#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikeservo/coding.hpp"
#include "spikeservo/network.hpp"

namespace spikeservo {

// Differential-mapping network: input assemblies encode task-space velocity
// and joint angles, output assemblies encode joint velocities. All-to-all
// plastic excitatory and inhibitory synapses form the map during babbling.
struct DMConfig {
    int n = 2;  // task-space DOF
    int m = 2;  // joint-space DOF
    int neurons_per_assembly = 68;

    NeuronParams input_params{0.1, 0.2, -65.0, 2.0};
    NeuronParams output_params{0.02, 0.15, -55.0, 6.0};

    double s = 0.005;  // symmetric STDP magnitude
    double tau1 = 20.0;
    double tau2 = 18.0;
    double stdp_window = 30.0;

    double c_e = 4.0;   // excitatory clamp [0, c_e]
    double c_i = -4.0;  // inhibitory clamp [c_i, 0]
    double w_init = 0.02;  // excitatory weights start uniform in (0, w_init)
    double w_init_inh = 0.02;  // inhibitory start uniform in (-w_init_inh, 0)

    double local_inhibition_gain = 2.0;

    // synaptic scaling: each output neuron's summed excitatory in-weight is
    // rescaled down to this budget after a training sample, keeping the map
    // competitive instead of saturating every co-active pair
    double w_budget = 120.0;

    double input_gain = 30.0;   // encoding current at activation 1
    double output_gain = 30.0;  // teacher current during training

    std::vector<double> theta_lo{-1.91986, 1.04720};  // rad
    std::vector<double> theta_hi{-0.52360, 2.61799};
    double xdot_range = 0.2;       // m/s, symmetric
    double thetadot_range = 0.3;   // rad/s, symmetric

    double window_ms = 80.0;
};

class DMNetwork {
public:
    DMNetwork(const DMConfig& cfg, unsigned seed) : cfg_(cfg)
    {
        if (cfg.n < 1 || cfg.m < 1 || cfg.neurons_per_assembly < 2) {
            throw std::invalid_argument("invalid DM config");
        }
        std::mt19937 rng(seed);
        const int na = cfg.neurons_per_assembly;

        for (int j = 0; j < cfg.n; ++j) {
            input_pops_.push_back(net_.add_population(
                "xdot" + std::to_string(j + 1), cfg.input_params, na));
            input_codecs_.push_back(Codec{-cfg.xdot_range, cfg.xdot_range, na,
                                          0.0, cfg.input_gain});
        }
        for (int j = 0; j < cfg.m; ++j) {
            input_pops_.push_back(net_.add_population(
                "theta" + std::to_string(j + 1), cfg.input_params, na));
            input_codecs_.push_back(Codec{cfg.theta_lo[j], cfg.theta_hi[j],
                                          na, 0.0, cfg.input_gain});
        }
        for (int j = 0; j < cfg.m; ++j) {
            output_pops_.push_back(net_.add_population(
                "thetadot" + std::to_string(j + 1), cfg.output_params, na));
            output_codecs_.push_back(Codec{-cfg.thetadot_range,
                                           cfg.thetadot_range, na, 0.0,
                                           cfg.output_gain});
        }

        PlasticityRule rule;
        rule.kind = PlasticityKind::symmetric;
        rule.s = cfg.s;
        rule.tau1 = cfg.tau1;
        rule.tau2 = cfg.tau2;
        rule.window = cfg.stdp_window;

        std::uniform_real_distribution<double> init(0.0, cfg.w_init);
        for (int in : input_pops_) {
            for (int out : output_pops_) {
                auto exc = make_all_to_all(in, out, na, na, 0.0);
                for (auto& w : exc.w) w = init(rng);
                exc.id = net_.pop(in).id + "->" + net_.pop(out).id + ":exc";
                exc.w_min = 0.0;
                exc.w_max = cfg.c_e;
                exc.rule = rule;
                plastic_groups_.push_back(net_.add_synapses(std::move(exc)));

                std::uniform_real_distribution<double> init_inh(
                    0.0, cfg.w_init_inh);
                auto inh = make_all_to_all(in, out, na, na, 0.0);
                for (auto& w : inh.w) w = -init_inh(rng);
                inh.id = net_.pop(in).id + "->" + net_.pop(out).id + ":inh";
                inh.w_min = cfg.c_i;
                inh.w_max = 0.0;
                inh.rule = rule;
                plastic_groups_.push_back(net_.add_synapses(std::move(inh)));
            }
        }

        // fixed local inhibition inside each output assembly, growing with
        // intra-assembly distance
        for (int out : output_pops_) {
            SynapseGroup loc;
            loc.pre = out;
            loc.post = out;
            loc.id = net_.pop(out).id + ":local";
            for (int i = 0; i < na; ++i) {
                for (int j = 0; j < na; ++j) {
                    if (i == j) continue;
                    const double d = std::abs(i - j) / double(na);
                    loc.add_edge(i, j, -cfg.local_inhibition_gain * d);
                }
            }
            net_.add_synapses(std::move(loc));
        }
    }

    const DMConfig& config() const { return cfg_; }
    Network& network() { return net_; }
    const Network& network() const { return net_; }

    // One babbling sample: clamp inputs and outputs to the sample and let
    // the symmetric rule bind co-active pairs.
    void train_step(const std::vector<double>& theta,
                    const std::vector<double>& xdot,
                    const std::vector<double>& thetadot)
    {
        check_range(theta, xdot, &thetadot);
        WindowInput in;
        fill_inputs(in, theta, xdot);
        for (int j = 0; j < cfg_.m; ++j) {
            in.set_current(output_pops_[j],
                           output_codecs_[j].encode_currents(thetadot[j]));
        }
        net_.plasticity_enabled = true;
        net_.reset_states();
        net_.run_window(in, cfg_.window_ms);
        scale_weights();
        ++train_count_;
    }

    // Decode a joint-velocity command; plasticity stays off. A silent
    // output assembly decodes to zero (safe stop).
    std::vector<double> infer(const std::vector<double>& theta,
                              const std::vector<double>& xdot,
                              SpikeRecord* record = nullptr)
    {
        WindowInput in;
        fill_inputs(in, theta, xdot);
        net_.plasticity_enabled = false;
        net_.reset_states();
        SpikeRecord rec = net_.run_window(in, cfg_.window_ms);
        std::vector<double> out(cfg_.m, 0.0);
        for (int j = 0; j < cfg_.m; ++j) {
            auto rates =
                firing_rates(rec, output_pops_[j], cfg_.window_ms);
            out[j] = output_codecs_[j].decode(rates).value_or(0.0);
        }
        if (record) *record = std::move(rec);
        return out;
    }

    long train_count() const { return train_count_; }

    void export_weights(std::ostream& os) const
    {
        os << "pre_assembly,pre_idx,post_assembly,post_idx,weight\n";
        os << std::setprecision(17);
        for (int gi : plastic_groups_) {
            const auto& g = net_.synapses(gi);
            const std::string suffix = g.w_max > 0.0 ? "" : ":inh";
            for (std::size_t e = 0; e < g.w.size(); ++e) {
                os << net_.pop(g.pre).id << suffix << ',' << g.src[e] << ','
                   << net_.pop(g.post).id << ',' << g.dst[e] << ','
                   << g.w[e] << '\n';
            }
        }
    }

    void import_weights(std::istream& is)
    {
        std::map<std::string, int> lookup;
        for (int gi : plastic_groups_) {
            const auto& g = net_.synapses(gi);
            const std::string suffix = g.w_max > 0.0 ? "" : ":inh";
            lookup[net_.pop(g.pre).id + suffix + "|" + net_.pop(g.post).id] =
                gi;
        }
        std::string line;
        std::getline(is, line);  // header
        const int na = cfg_.neurons_per_assembly;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string pre, post, tok;
            int pi, qi;
            double w;
            std::getline(ss, pre, ',');
            std::getline(ss, tok, ',');
            pi = std::stoi(tok);
            std::getline(ss, post, ',');
            std::getline(ss, tok, ',');
            qi = std::stoi(tok);
            std::getline(ss, tok, ',');
            w = std::stod(tok);
            auto it = lookup.find(pre + "|" + post);
            if (it == lookup.end()) {
                throw std::runtime_error("unknown assembly pair in weights: " +
                                         pre + "->" + post);
            }
            auto& g = net_.synapses(it->second);
            // all-to-all layout: edge index is pre*na + post
            g.w.at(static_cast<std::size_t>(pi) * na + qi) = w;
        }
        train_count_ = std::max<long>(train_count_, 1);
    }

private:
    void scale_weights()
    {
        const int na = cfg_.neurons_per_assembly;
        for (int oi = 0; oi < cfg_.m; ++oi) {
            std::vector<int> exc;
            for (int gi : plastic_groups_) {
                const auto& g = net_.synapses(gi);
                if (g.post == output_pops_[oi] && g.w_max > 0.0) {
                    exc.push_back(gi);
                }
            }
            for (int j = 0; j < na; ++j) {
                double sum = 0.0;
                for (int gi : exc) {
                    const auto& g = net_.synapses(gi);
                    for (int i = 0; i < na; ++i) {
                        sum += g.w[static_cast<std::size_t>(i) * na + j];
                    }
                }
                if (sum > cfg_.w_budget) {
                    const double k = cfg_.w_budget / sum;
                    for (int gi : exc) {
                        auto& g = net_.synapses(gi);
                        for (int i = 0; i < na; ++i) {
                            g.w[static_cast<std::size_t>(i) * na + j] *= k;
                        }
                    }
                }
            }
        }
    }

    void check_range(const std::vector<double>& theta,
                     const std::vector<double>& xdot,
                     const std::vector<double>* thetadot) const
    {
        for (int j = 0; j < cfg_.m; ++j) {
            if (theta[j] < cfg_.theta_lo[j] - 1e-9 ||
                theta[j] > cfg_.theta_hi[j] + 1e-9) {
                throw std::out_of_range("theta sample outside encoding range");
            }
        }
        for (int j = 0; j < cfg_.n; ++j) {
            if (std::abs(xdot[j]) > cfg_.xdot_range + 1e-9) {
                throw std::out_of_range("xdot sample outside encoding range");
            }
        }
        if (thetadot) {
            for (int j = 0; j < cfg_.m; ++j) {
                if (std::abs((*thetadot)[j]) > cfg_.thetadot_range + 1e-9) {
                    throw std::out_of_range(
                        "thetadot sample outside encoding range");
                }
            }
        }
    }

    void fill_inputs(WindowInput& in, const std::vector<double>& theta,
                     const std::vector<double>& xdot) const
    {
        for (int j = 0; j < cfg_.n; ++j) {
            in.set_current(input_pops_[j],
                           input_codecs_[j].encode_currents(xdot[j]));
        }
        for (int j = 0; j < cfg_.m; ++j) {
            in.set_current(
                input_pops_[cfg_.n + j],
                input_codecs_[cfg_.n + j].encode_currents(theta[j]));
        }
    }

    DMConfig cfg_;
    Network net_;
    std::vector<int> input_pops_;   // xdot assemblies first, then theta
    std::vector<int> output_pops_;
    std::vector<Codec> input_codecs_;
    std::vector<Codec> output_codecs_;
    std::vector<int> plastic_groups_;
    long train_count_ = 0;
};

}  // namespace spikeservo
