#pragma once

#include <cmath>
#include <stdexcept>

namespace spikeservo {

// Izhikevich simple-model parameters, shared across a population.
struct NeuronParams {
    double a;  // recovery time scale (1/ms)
    double b;  // sub-threshold sensitivity
    double c;  // after-spike reset potential (mV)
    double d;  // after-spike recovery increment (mV)
};

struct NeuronState {
    double v = -65.0;  // membrane potential (mV)
    double u = -13.0;  // recovery variable (mV)
    double i_ext = 0.0;  // summed input current for the current step
};

constexpr double kSpikeThreshold = 30.0;  // mV

struct SimulationFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Analytic rest state for a given b: 0.04 v^2 + (5-b) v + 140 = 0, u = b v.
// Returns false when no real fixed point exists (intrinsically tonic regime).
inline bool rest_state(const NeuronParams& p, double& v_rest, double& u_rest,
                       double i_const = 0.0)
{
    const double qa = 0.04, qb = 5.0 - p.b, qc = 140.0 + i_const;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) {
        return false;
    }
    // the more hyperpolarized root is the stable one
    v_rest = (-qb - std::sqrt(disc)) / (2.0 * qa);
    u_rest = p.b * v_rest;
    return true;
}

inline NeuronState initial_state(const NeuronParams& p)
{
    NeuronState s;
    double v, u;
    if (rest_state(p, v, u)) {
        s.v = v;
        s.u = u;
    } else {
        s.v = p.c;
        s.u = p.b * p.c;
    }
    s.i_ext = 0.0;
    return s;
}

// Advance one dt. The v-equation is integrated with n_sub equal sub-steps
// (4 by default, the usual stability trick at dt = 1 ms); u is updated once
// per dt. If v crosses 30 mV in any sub-step the neuron spikes and the
// after-spike reset v <- c, u <- u + d is applied.
inline bool step_neuron(NeuronState& s, const NeuronParams& p, double dt,
                        int n_sub = 4)
{
    if (s.v >= kSpikeThreshold) {
        // state already at/above threshold (e.g. set externally): reset only
        s.v = p.c;
        s.u += p.d;
        return true;
    }
    const double h = dt / n_sub;
    bool spiked = false;
    double v = s.v, u = s.u;
    for (int k = 0; k < n_sub; ++k) {
        v += h * (0.04 * v * v + 5.0 * v + 140.0 - u + s.i_ext);
        if (v >= kSpikeThreshold) {
            spiked = true;
            v = p.c;
            u += p.d;
        }
    }
    u += dt * p.a * (p.b * v - u);
    if (!std::isfinite(v) || !std::isfinite(u)) {
        throw SimulationFault("neuron state diverged (non-finite v/u)");
    }
    s.v = v;
    s.u = u;
    return spiked;
}

}  // namespace spikeservo
