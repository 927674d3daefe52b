#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikeservo/coding.hpp"
#include "spikeservo/network.hpp"

namespace spikeservo {

// Cerebellar forward model: mossy fibers encode joint state, motor command
// and delayed sensed velocity; granule cells sparsify; parallel-fiber
// (GC->PC) synapses learn under climbing-fiber error spikes from the
// inferior olive; deep-nuclei rates decode to a predicted velocity.
struct CBConfig {
    int n_ts = 2;  // task-space DOF
    int m_js = 2;  // joint-space DOF

    NeuronParams mf_params{0.1, 0.2, -65.0, 2.0};
    NeuronParams gc_params{0.02, 0.25, -65.0, 2.0};
    NeuronParams pc_params{1.0, 1.5, -60.0, 0.0};
    NeuronParams io_params{0.1, 0.2, -65.0, 2.0};
    NeuronParams dcn_params{0.05, 0.1, -65.0, 2.0};

    int mf_per_assembly = 20;
    int gc_total = 1000;
    int pc_per_assembly = 8;
    int io_per_assembly = 8;
    int dcn_per_assembly = 4;

    double w_mf_gc = 2.5;
    double gc_bias = -2.0;  // tonic Golgi-like inhibition; sparsifies GC
    double w_mf_dcn = 2.5;
    double gc_pc_p = 0.8;
    double gc_pc_init = 0.4;
    double gc_pc_max = 8.0;
    double w_io_pc = 500.0;
    double w_io_dcn = 1.7;
    double w_pc_dcn = -5.0;

    double s_a = 0.01;  // depression per climbing-fiber-paired granule spike
    double s_b = 0.002;  // potentiation magnitude
    double tau_a = 20.0;
    double tau_b = 20.0;
    double stdp_window = 30.0;
    double gate_window = 50.0;

    double alpha_io_max = 50.0;    // Hz
    double io_err_sat = 0.01;      // m/s error giving alpha_io_max
    double alpha_dcn_max = 140.0;  // Hz, decode saturation
    double xdot_max = 0.08;        // m/s full-scale prediction per DOF

    double pc_bias = -64.0;  // tonic inhibition substituting molecular-layer
                             // interneurons; holds PC at rest without input
    double mf_gain = 60.0;

    std::vector<double> theta_lo{-1.91986, 1.04720};
    std::vector<double> theta_hi{-0.52360, 2.61799};
    double thetadot_range = 0.3;
    double xdot_range = 0.06;

    double window_ms = 80.0;
};

class CBNetwork {
public:
    CBNetwork(const CBConfig& cfg, unsigned seed) : cfg_(cfg)
    {
        std::mt19937 rng(seed);
        const int n = cfg.n_ts, m = cfg.m_js;

        // MF_JS: theta and commanded theta-dot; MF_TS: sensed task velocity
        for (int j = 0; j < m; ++j) {
            mf_pops_.push_back(net_.add_population(
                "mf_theta" + std::to_string(j + 1), cfg.mf_params,
                cfg.mf_per_assembly));
            mf_codecs_.push_back(Codec{cfg.theta_lo[j], cfg.theta_hi[j],
                                       cfg.mf_per_assembly, 0.0,
                                       cfg.mf_gain});
        }
        for (int j = 0; j < m; ++j) {
            mf_pops_.push_back(net_.add_population(
                "mf_thetadot" + std::to_string(j + 1), cfg.mf_params,
                cfg.mf_per_assembly));
            mf_codecs_.push_back(Codec{-cfg.thetadot_range,
                                       cfg.thetadot_range,
                                       cfg.mf_per_assembly, 0.0,
                                       cfg.mf_gain});
        }
        for (int j = 0; j < n; ++j) {
            mf_pops_.push_back(net_.add_population(
                "mf_xdot" + std::to_string(j + 1), cfg.mf_params,
                cfg.mf_per_assembly));
            mf_codecs_.push_back(Codec{-cfg.xdot_range, cfg.xdot_range,
                                       cfg.mf_per_assembly, 0.0,
                                       cfg.mf_gain});
        }

        gc_pop_ = net_.add_population("gc", cfg.gc_params, cfg.gc_total,
                                      cfg.gc_bias);

        for (int j = 0; j < n; ++j) {
            for (const char* sign : {"+", "-"}) {
                const std::string dof = std::to_string(j + 1) + sign;
                pc_pops_.push_back(net_.add_population(
                    "pc" + dof, cfg.pc_params, cfg.pc_per_assembly,
                    cfg.pc_bias));
                io_pops_.push_back(net_.add_population(
                    "io" + dof, cfg.io_params, cfg.io_per_assembly));
                dcn_pops_.push_back(net_.add_population(
                    "dcn" + dof, cfg.dcn_params, cfg.dcn_per_assembly));
            }
        }

        // each granule cell receives one afferent from every MF assembly
        {
            std::uniform_int_distribution<int> pick(0,
                                                    cfg.mf_per_assembly - 1);
            std::vector<SynapseGroup> groups(mf_pops_.size());
            for (std::size_t a = 0; a < mf_pops_.size(); ++a) {
                groups[a].pre = mf_pops_[a];
                groups[a].post = gc_pop_;
                groups[a].id = net_.pop(mf_pops_[a]).id + "->gc";
            }
            for (int g = 0; g < cfg.gc_total; ++g) {
                for (std::size_t a = 0; a < mf_pops_.size(); ++a) {
                    groups[a].add_edge(pick(rng), g, cfg.w_mf_gc);
                }
            }
            for (auto& g : groups) {
                net_.add_synapses(std::move(g));
            }
        }

        // jittered weights keep the nucleus neurons out of lockstep so the
        // assembly rate, and hence the decoded prediction, moves in finer
        // steps than one synchronous spike
        // the +/- assemblies of a pair share the pattern so their baselines
        // stay balanced and the untrained prediction decodes to zero
        {
            std::uniform_real_distribution<double> jitter(0.5, 1.5);
            for (int mf : mf_pops_) {
                for (int j = 0; j < n; ++j) {
                    std::vector<double> scale(static_cast<std::size_t>(
                        cfg.mf_per_assembly * cfg.dcn_per_assembly));
                    for (auto& s : scale) s = jitter(rng);
                    for (int sign = 0; sign < 2; ++sign) {
                        const int dcn = dcn_pops_[2 * j + sign];
                        auto g = make_all_to_all(mf, dcn,
                                                 cfg.mf_per_assembly,
                                                 cfg.dcn_per_assembly,
                                                 cfg.w_mf_dcn);
                        for (std::size_t e = 0; e < g.w.size(); ++e) {
                            g.w[e] *= scale[e];
                        }
                        g.id = net_.pop(mf).id + "->" + net_.pop(dcn).id;
                        net_.add_synapses(std::move(g));
                    }
                }
            }
        }

        // parallel fibers: plastic, gated by the matched IO assembly
        PlasticityRule rule;
        rule.kind = PlasticityKind::anti_symmetric;
        rule.s_a = cfg.s_a;
        rule.s_b = cfg.s_b;
        rule.tau_a = cfg.tau_a;
        rule.tau_b = cfg.tau_b;
        rule.window = cfg.stdp_window;
        rule.gate_window = cfg.gate_window;
        for (std::size_t k = 0; k < pc_pops_.size(); ++k) {
            auto g = make_probabilistic(gc_pop_, pc_pops_[k], cfg.gc_total,
                                        cfg.pc_per_assembly, cfg.gc_pc_p,
                                        cfg.gc_pc_init, rng);
            g.id = "gc->" + net_.pop(pc_pops_[k]).id;
            g.w_min = 0.0;
            g.w_max = cfg.gc_pc_max;
            g.rule = rule;
            g.rule.gate_population = io_pops_[k];
            // error of the opposite sign potentiates this side so both
            // nuclei move and depressed fibers can recover
            g.rule.gate_population_ltp = io_pops_[k ^ 1];
            pf_groups_.push_back(net_.add_synapses(std::move(g)));
        }

        for (std::size_t k = 0; k < pc_pops_.size(); ++k) {
            auto cf = make_one_to_one(io_pops_[k], pc_pops_[k],
                                      cfg.io_per_assembly,
                                      cfg.pc_per_assembly, cfg.w_io_pc);
            cf.id = net_.pop(io_pops_[k]).id + "->" + net_.pop(pc_pops_[k]).id;
            net_.add_synapses(std::move(cf));

            auto id = make_one_to_one(io_pops_[k], dcn_pops_[k],
                                      cfg.io_per_assembly,
                                      cfg.dcn_per_assembly, cfg.w_io_dcn);
            id.id = net_.pop(io_pops_[k]).id + "->" +
                    net_.pop(dcn_pops_[k]).id;
            net_.add_synapses(std::move(id));

            // the whole PC assembly converges onto each nucleus neuron
            auto pd = make_all_to_all(pc_pops_[k], dcn_pops_[k],
                                      cfg.pc_per_assembly,
                                      cfg.dcn_per_assembly, cfg.w_pc_dcn);
            pd.id = net_.pop(pc_pops_[k]).id + "->" +
                    net_.pop(dcn_pops_[k]).id;
            net_.add_synapses(std::move(pd));
        }
    }

    const CBConfig& config() const { return cfg_; }
    Network& network() { return net_; }
    const Network& network() const { return net_; }
    const std::vector<int>& pf_groups() const { return pf_groups_; }
    int gc_population() const { return gc_pop_; }
    int pc_population(int k) const { return pc_pops_[k]; }
    int io_population(int k) const { return io_pops_[k]; }
    int dcn_population(int k) const { return dcn_pops_[k]; }

    // One 80 ms pass: MF encodes (theta, commanded theta-dot, delayed sensed
    // x-dot); when learning, the IO assemblies matching the sign of e_pred
    // fire at alpha_io_max and gate parallel-fiber plasticity. Returns the
    // decoded DCN prediction.
    std::vector<double> cycle(const std::vector<double>& theta,
                              const std::vector<double>& thetadot_cmd,
                              const std::vector<double>& xdot_sensed,
                              const std::vector<double>& e_pred, bool learn,
                              SpikeRecord* record = nullptr)
    {
        last_theta_ = theta;
        last_cmd_ = thetadot_cmd;
        last_xdot_ = xdot_sensed;

        WindowInput in;
        for (int j = 0; j < cfg_.m_js; ++j) {
            in.set_current(mf_pops_[j],
                           mf_codecs_[j].encode_currents(theta[j]));
            in.set_current(
                mf_pops_[cfg_.m_js + j],
                mf_codecs_[cfg_.m_js + j].encode_currents(thetadot_cmd[j]));
        }
        for (int j = 0; j < cfg_.n_ts; ++j) {
            const std::size_t a = 2 * cfg_.m_js + j;
            in.set_current(mf_pops_[a],
                           mf_codecs_[a].encode_currents(xdot_sensed[j]));
        }

        if (learn) {
            for (double e : e_pred) {
                if (!std::isfinite(e)) {
                    throw std::invalid_argument("non-finite teaching signal");
                }
            }
            for (int j = 0; j < cfg_.n_ts; ++j) {
                if (e_pred[j] == 0.0) continue;
                // climbing-fiber rate scales with error magnitude; errors
                // too small for one pulse per window teach nothing
                const double rate =
                    cfg_.alpha_io_max *
                    std::min(1.0, std::abs(e_pred[j]) / cfg_.io_err_sat);
                if (rate < 1000.0 / cfg_.window_ms) continue;
                const int period =
                    static_cast<int>(std::lround(1000.0 / rate));
                const int k = 2 * j + (e_pred[j] > 0.0 ? 0 : 1);
                WindowInput::Pulse p;
                p.pop = io_pops_[k];
                p.amplitude = 300.0;  // one guaranteed spike per pulse
                p.period_steps = period;
                in.pulses.push_back(p);
            }
        }

        net_.plasticity_enabled = learn;
        net_.reset_states();
        SpikeRecord rec = net_.run_window(in, cfg_.window_ms);

        SignedPairDecode dec{cfg_.dcn_per_assembly, cfg_.alpha_dcn_max,
                             cfg_.xdot_max};
        std::vector<double> out(cfg_.n_ts, 0.0);
        for (int j = 0; j < cfg_.n_ts; ++j) {
            auto rp = firing_rates(rec, dcn_pops_[2 * j], cfg_.window_ms);
            auto rn = firing_rates(rec, dcn_pops_[2 * j + 1], cfg_.window_ms);
            out[j] = dec.decode(rp, rn);
        }
        if (record) *record = std::move(rec);
        return out;
    }

    // Prediction only: plasticity off, IO silent.
    std::vector<double> predict(const std::vector<double>& theta,
                                const std::vector<double>& thetadot_cmd,
                                const std::vector<double>& xdot_sensed,
                                SpikeRecord* record = nullptr)
    {
        return cycle(theta, thetadot_cmd, xdot_sensed,
                     std::vector<double>(cfg_.n_ts, 0.0), false, record);
    }

    // Teaching pass over the context of the last prediction.
    void teach(const std::vector<double>& e_pred)
    {
        if (last_theta_.empty()) {
            throw std::logic_error("teach called before any predict");
        }
        cycle(last_theta_, last_cmd_, last_xdot_, e_pred, true);
    }

    void export_weights(std::ostream& os) const
    {
        os << "pre_assembly,pre_idx,post_assembly,post_idx,weight\n";
        os << std::setprecision(17);
        for (int gi : pf_groups_) {
            const auto& g = net_.synapses(gi);
            for (std::size_t e = 0; e < g.w.size(); ++e) {
                os << net_.pop(g.pre).id << ',' << g.src[e] << ','
                   << net_.pop(g.post).id << ',' << g.dst[e] << ','
                   << g.w[e] << '\n';
            }
        }
    }

    void import_weights(std::istream& is)
    {
        std::string line;
        std::getline(is, line);
        // edge order within each group is stable, so rows are positional
        std::vector<std::size_t> cursor(pf_groups_.size(), 0);
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto last_comma = line.rfind(',');
            const double w = std::stod(line.substr(last_comma + 1));
            std::size_t p1 = line.find(',');
            std::size_t p2 = line.find(',', p1 + 1);
            std::size_t p3 = line.find(',', p2 + 1);
            const std::string post = line.substr(p2 + 1, p3 - p2 - 1);
            for (std::size_t k = 0; k < pf_groups_.size(); ++k) {
                if (net_.pop(pc_pops_[k]).id == post) {
                    net_.synapses(pf_groups_[k]).w.at(cursor[k]++) = w;
                    break;
                }
            }
        }
    }

private:
    CBConfig cfg_;
    Network net_;
    std::vector<int> mf_pops_;
    std::vector<Codec> mf_codecs_;
    int gc_pop_ = -1;
    std::vector<int> pc_pops_;   // [dof1+, dof1-, dof2+, dof2-]
    std::vector<int> io_pops_;
    std::vector<int> dcn_pops_;
    std::vector<int> pf_groups_;
    std::vector<double> last_theta_, last_cmd_, last_xdot_;
};

}  // namespace spikeservo
