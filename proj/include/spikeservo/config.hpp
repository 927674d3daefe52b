#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "spikeservo/arm.hpp"
#include "spikeservo/cerebellum.hpp"
#include "spikeservo/controller.hpp"
#include "spikeservo/diffmap.hpp"

namespace spikeservo {

// Everything an experiment needs, with the calibrated defaults.
struct HarnessConfig {
    ArmModel arm;
    DMConfig dm;
    CBConfig cb;
    ControlConfig control;
    int delay_cycles = 4;
    double sigma_pos = 0.0005;  // m
    double sigma_vel = 0.001;   // m/s
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

// Minimal TOML subset: [section] headers and scalar key = value pairs
// (numbers, booleans, bare/quoted strings; '#' comments).
inline std::map<std::string, std::map<std::string, std::string>>
parse_toml_lite(std::istream& is)
{
    std::map<std::string, std::map<std::string, std::string>> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::runtime_error("config line " +
                                         std::to_string(lineno) +
                                         ": malformed section header");
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
            val = val.substr(1, val.size() - 2);
        }
        out[section][key] = val;
    }
    return out;
}

// Applies a parsed config onto the defaults. Unknown keys are an error so
// typos do not silently fall back to defaults.
inline void apply_config(
    HarnessConfig& c,
    const std::map<std::string, std::map<std::string, std::string>>& t)
{
    auto num = [](const std::string& v) { return std::stod(v); };
    auto flag = [](const std::string& v) {
        if (v == "true") return true;
        if (v == "false") return false;
        throw std::runtime_error("expected true/false, got " + v);
    };

    for (const auto& [section, kv] : t) {
        for (const auto& [key, val] : kv) {
            bool ok = true;
            if (section == "arm") {
                if (key == "l1") c.arm.l1 = num(val);
                else if (key == "l2") c.arm.l2 = num(val);
                else if (key == "theta1_min_deg")
                    c.arm.theta_min[0] = deg2rad(num(val));
                else if (key == "theta1_max_deg")
                    c.arm.theta_max[0] = deg2rad(num(val));
                else if (key == "theta2_min_deg")
                    c.arm.theta_min[1] = deg2rad(num(val));
                else if (key == "theta2_max_deg")
                    c.arm.theta_max[1] = deg2rad(num(val));
                else if (key == "theta_dot_limit")
                    c.arm.theta_dot_limit = num(val);
                else if (key == "delay_cycles")
                    c.delay_cycles = static_cast<int>(num(val));
                else if (key == "sigma_pos") c.sigma_pos = num(val);
                else if (key == "sigma_vel") c.sigma_vel = num(val);
                else ok = false;
            } else if (section == "dm") {
                if (key == "neurons_per_assembly")
                    c.dm.neurons_per_assembly = static_cast<int>(num(val));
                else if (key == "s") c.dm.s = num(val);
                else if (key == "tau1") c.dm.tau1 = num(val);
                else if (key == "tau2") c.dm.tau2 = num(val);
                else if (key == "stdp_window") c.dm.stdp_window = num(val);
                else if (key == "c_e") c.dm.c_e = num(val);
                else if (key == "c_i") c.dm.c_i = num(val);
                else if (key == "w_init") c.dm.w_init = num(val);
                else if (key == "w_init_inh") c.dm.w_init_inh = num(val);
                else if (key == "local_inhibition_gain")
                    c.dm.local_inhibition_gain = num(val);
                else if (key == "w_budget") c.dm.w_budget = num(val);
                else if (key == "input_gain") c.dm.input_gain = num(val);
                else if (key == "output_gain") c.dm.output_gain = num(val);
                else if (key == "xdot_range") c.dm.xdot_range = num(val);
                else if (key == "thetadot_range")
                    c.dm.thetadot_range = num(val);
                else ok = false;
            } else if (section == "cb") {
                if (key == "mf_per_assembly")
                    c.cb.mf_per_assembly = static_cast<int>(num(val));
                else if (key == "gc_total")
                    c.cb.gc_total = static_cast<int>(num(val));
                else if (key == "pc_per_assembly")
                    c.cb.pc_per_assembly = static_cast<int>(num(val));
                else if (key == "io_per_assembly")
                    c.cb.io_per_assembly = static_cast<int>(num(val));
                else if (key == "dcn_per_assembly")
                    c.cb.dcn_per_assembly = static_cast<int>(num(val));
                else if (key == "w_mf_gc") c.cb.w_mf_gc = num(val);
                else if (key == "gc_bias") c.cb.gc_bias = num(val);
                else if (key == "w_mf_dcn") c.cb.w_mf_dcn = num(val);
                else if (key == "gc_pc_p") c.cb.gc_pc_p = num(val);
                else if (key == "gc_pc_init") c.cb.gc_pc_init = num(val);
                else if (key == "gc_pc_max") c.cb.gc_pc_max = num(val);
                else if (key == "w_io_pc") c.cb.w_io_pc = num(val);
                else if (key == "w_io_dcn") c.cb.w_io_dcn = num(val);
                else if (key == "w_pc_dcn") c.cb.w_pc_dcn = num(val);
                else if (key == "s_a") c.cb.s_a = num(val);
                else if (key == "s_b") c.cb.s_b = num(val);
                else if (key == "tau_a") c.cb.tau_a = num(val);
                else if (key == "tau_b") c.cb.tau_b = num(val);
                else if (key == "stdp_window") c.cb.stdp_window = num(val);
                else if (key == "gate_window") c.cb.gate_window = num(val);
                else if (key == "alpha_io_max") c.cb.alpha_io_max = num(val);
                else if (key == "io_err_sat") c.cb.io_err_sat = num(val);
                else if (key == "alpha_dcn_max")
                    c.cb.alpha_dcn_max = num(val);
                else if (key == "xdot_max") c.cb.xdot_max = num(val);
                else if (key == "pc_bias") c.cb.pc_bias = num(val);
                else if (key == "mf_gain") c.cb.mf_gain = num(val);
                else if (key == "thetadot_range")
                    c.cb.thetadot_range = num(val);
                else if (key == "xdot_range") c.cb.xdot_range = num(val);
                else ok = false;
            } else if (section == "control") {
                if (key == "cycle_ms") c.control.cycle_ms = num(val);
                else if (key == "v_ref") c.control.v_ref = num(val);
                else if (key == "k_c") c.control.k_c = num(val);
                else if (key == "reach_tol") c.control.reach_tol = num(val);
                else if (key == "target_time_limit_s")
                    c.control.target_time_limit_s = num(val);
                else ok = false;
            } else if (section == "task") {
                // handled by the experiment spec; accept known keys here
                ok = key == "iterations" || key == "cb" || key == "seed" ||
                     key == "contour_radius" || key == "contour_points";
                (void)flag;
            } else {
                throw std::runtime_error("unknown config section [" +
                                         section + "]");
            }
            if (!ok) {
                throw std::runtime_error("unknown config key " + section +
                                         "." + key);
            }
        }
    }

    // keep encoding ranges aligned with the arm limits
    c.dm.theta_lo = {c.arm.theta_min[0], c.arm.theta_min[1]};
    c.dm.theta_hi = {c.arm.theta_max[0], c.arm.theta_max[1]};
    c.cb.theta_lo = c.dm.theta_lo;
    c.cb.theta_hi = c.dm.theta_hi;
    c.control.cycle_ms = c.dm.window_ms;
}

inline HarnessConfig load_config(const std::string& path)
{
    HarnessConfig c;
    c.dm.theta_lo = {c.arm.theta_min[0], c.arm.theta_min[1]};
    c.dm.theta_hi = {c.arm.theta_max[0], c.arm.theta_max[1]};
    c.cb.theta_lo = c.dm.theta_lo;
    c.cb.theta_hi = c.dm.theta_hi;
    if (path.empty()) {
        return c;
    }
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open config file " + path);
    }
    auto t = parse_toml_lite(f);
    apply_config(c, t);
    return c;
}

}  // namespace spikeservo
