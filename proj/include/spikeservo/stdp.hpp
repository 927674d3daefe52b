#pragma once

#include <cmath>
#include <cstdint>

namespace spikeservo {

enum class PlasticityKind : std::uint8_t { none, symmetric, anti_symmetric };

// Pair-based STDP rule. Delta-t is t_post - t_pre in ms.
//
// symmetric:       dw = S * (1 - (dt/tau1)^2) * exp(-|dt|/tau2)
// anti-symmetric:  dw = -S_a * exp(-|dt|/tau_a)  for dt <= 0
//                  dw =  S_b * exp(-|dt|/tau_b)  for dt >  0
//
// Both exponentials decay with |dt|. The literature prints the exponents
// without the sign flip on one or both branches, which grows without bound;
// `printed_form` switches to that literal variant for comparison runs.
struct PlasticityRule {
    PlasticityKind kind = PlasticityKind::none;
    double s = 0.0;       // symmetric magnitude
    double tau1 = 20.0;   // symmetric zero-crossing (ms)
    double tau2 = 18.0;   // symmetric decay (ms)
    double s_a = 0.0;     // anti-symmetric depression magnitude
    double s_b = 0.0;     // anti-symmetric potentiation magnitude
    double tau_a = 20.0;  // depression time constant (ms)
    double tau_b = 20.0;  // potentiation time constant (ms)
    double window = 30.0;  // max |dt| considered for pairing (ms)
    int gate_population = -1;   // index of gating population, -1 = ungated
    // complementary gate: while this population is active (and the primary
    // gate is not), pre spikes potentiate by s_b without pairing. Gives
    // depressed synapses a recovery path even when the post neuron is
    // silent; with both gates quiet nothing changes.
    int gate_population_ltp = -1;
    double gate_window = 50.0;  // ms within which the gate must have spiked
    bool printed_form = false;
};

inline double stdp_delta_symmetric(double dt, const PlasticityRule& r)
{
    if (std::abs(dt) > r.window) {
        return 0.0;
    }
    const double ratio = dt / r.tau1;
    const double expo = r.printed_form ? std::abs(dt) / r.tau2
                                       : -std::abs(dt) / r.tau2;
    return r.s * (1.0 - ratio * ratio) * std::exp(expo);
}

inline double stdp_delta_antisymmetric(double dt, const PlasticityRule& r)
{
    if (std::abs(dt) > r.window) {
        return 0.0;
    }
    if (dt <= 0.0) {
        const double expo = r.printed_form ? -dt / r.tau_a
                                           : -std::abs(dt) / r.tau_a;
        return -r.s_a * std::exp(expo);
    }
    return r.s_b * std::exp(-dt / r.tau_b);
}

inline double stdp_delta(double dt, const PlasticityRule& r)
{
    switch (r.kind) {
    case PlasticityKind::symmetric:
        return stdp_delta_symmetric(dt, r);
    case PlasticityKind::anti_symmetric:
        return stdp_delta_antisymmetric(dt, r);
    default:
        return 0.0;
    }
}

}  // namespace spikeservo
