#pragma once

#include <cassert>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace spikeservo {

// Gaussian receptive-field population code over a scalar range. Centers are
// evenly spaced, endpoints inclusive; sigma defaults to range/n, which puts
// neighboring fields at ~0.6 mutual activation.
struct Codec {
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;
    double sigma = 0.0;  // <= 0 means use (hi - lo) / n
    double gain = 20.0;  // input current at activation 1

    double width() const { return sigma > 0.0 ? sigma : (hi - lo) / n; }

    double center(int i) const
    {
        assert(n >= 2);
        return lo + (hi - lo) * i / (n - 1);
    }

    // activations in [0, 1]; out-of-range values simply fall off
    std::vector<double> encode(double value) const
    {
        const double s2 = 2.0 * width() * width();
        std::vector<double> act(n);
        for (int i = 0; i < n; ++i) {
            const double d = value - center(i);
            act[i] = std::exp(-d * d / s2);
        }
        return act;
    }

    std::vector<double> encode_currents(double value) const
    {
        auto act = encode(value);
        for (auto& a : act) a *= gain;
        return act;
    }

    // rate-weighted mean of centers; nullopt when the assembly is silent
    std::optional<double> decode(const std::vector<double>& rates) const
    {
        assert(static_cast<int>(rates.size()) == n);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            num += rates[i] * center(i);
            den += rates[i];
        }
        if (den <= 0.0) {
            return std::nullopt;
        }
        return num / den;
    }
};

// Signed two-assembly rate decode: scales the normalized rate difference of
// a positive and a negative assembly into a symmetric output range.
struct SignedPairDecode {
    int n_per_assembly = 4;
    double rate_max = 100.0;  // Hz, saturation rate per neuron
    double x_max = 0.05;      // full-scale output

    double decode(const std::vector<double>& rates_pos,
                  const std::vector<double>& rates_neg) const
    {
        assert(static_cast<int>(rates_pos.size()) == n_per_assembly);
        assert(static_cast<int>(rates_neg.size()) == n_per_assembly);
        const double sp =
            std::accumulate(rates_pos.begin(), rates_pos.end(), 0.0);
        const double sn =
            std::accumulate(rates_neg.begin(), rates_neg.end(), 0.0);
        return (sp - sn) / (rate_max * n_per_assembly) * x_max;
    }
};

}  // namespace spikeservo
