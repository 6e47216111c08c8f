// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>
#include <fstream>
#include <string>

#include "wdio/approx.hpp"
#include "wdio/dynamics.hpp"
#include "wdio/parse.hpp"

namespace wdio {

/// Reproducibility envelope for a run. Every emitted report embeds the config;
/// equal configs (and seed) give byte-identical primary payloads.
struct RunConfig {
    unsigned precision_bits = kDefaultPrecisionBits;
    std::int64_t q_max = 100000;
    double t_max = 12.0;
    double t_step = 0.25;
    double tail_fraction = 0.2;   // tail window for gap/grid estimators
    int tail_min = 2;             // minimum gaps in the window
    int grid_tail_min = 4;        // minimum grid points in the window
    double grid_ratio = 1.25;
    std::int64_t grid_start = 10;
    double t_tail_fraction = 0.25; // tail window for rate traces
    Rat mesh = Rat(1, 32);         // default weight-grid mesh
    std::uint64_t seed = 0;
    std::string format = "json";   // json | csv
    unsigned digits = 30;          // significant digits in decimal payloads
    std::int64_t enum_budget = (std::int64_t(1) << 25);
    std::uint64_t witness_cap = 256, failure_cap = 1000;
    double slack = 0.1;

    EstimatorConfig estimator() const {
        EstimatorConfig e;
        e.tail_fraction = tail_fraction;
        e.tail_min = tail_min;
        e.grid_tail_min = grid_tail_min;
        e.grid_ratio = grid_ratio;
        e.grid_start = grid_start;
        return e;
    }
    FlowConfig flow() const {
        FlowConfig f;
        f.t_step = t_step;
        f.tail_fraction = t_tail_fraction;
        f.enum_budget = enum_budget;
        return f;
    }

    void apply_kv(const std::string& key, const std::string& value) {
        try {
            if (key == "precision_bits") precision_bits = static_cast<unsigned>(std::stoul(value));
            else if (key == "q_max") q_max = std::stoll(value);
            else if (key == "t_max") t_max = std::stod(value);
            else if (key == "t_step") t_step = std::stod(value);
            else if (key == "tail_fraction") tail_fraction = std::stod(value);
            else if (key == "tail_min") tail_min = std::stoi(value);
            else if (key == "grid_tail_min") grid_tail_min = std::stoi(value);
            else if (key == "grid_ratio") grid_ratio = std::stod(value);
            else if (key == "grid_start") grid_start = std::stoll(value);
            else if (key == "t_tail_fraction") t_tail_fraction = std::stod(value);
            else if (key == "mesh") mesh = parse_rational(value);
            else if (key == "seed") seed = std::stoull(value);
            else if (key == "format") format = value;
            else if (key == "digits") digits = static_cast<unsigned>(std::stoul(value));
            else if (key == "enum_budget") enum_budget = std::stoll(value);
            else if (key == "witness_cap") witness_cap = std::stoull(value);
            else if (key == "failure_cap") failure_cap = std::stoull(value);
            else if (key == "slack") slack = std::stod(value);
            else throw input_error("unknown config key '" + key + "'");
        } catch (const input_error&) {
            throw;
        } catch (...) {
            throw input_error("bad value '" + value + "' for config key '" + key + "'");
        }
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw input_error("cannot open config file '" + path + "'");
        std::string line;
        while (std::getline(in, line)) {
            std::string t = detail::trimmed(line);
            if (t.empty() || t[0] == '#') continue;
            size_t eq = t.find('=');
            if (eq == std::string::npos) throw input_error("config line without '=': " + t);
            apply_kv(detail::trimmed(t.substr(0, eq)), detail::trimmed(t.substr(eq + 1)));
        }
    }

    void load_env() {
        if (const char* p = std::getenv("WDIO_PRECISION")) {
            precision_bits = static_cast<unsigned>(std::strtoul(p, nullptr, 10));
            if (precision_bits < 32) throw input_error("WDIO_PRECISION must be at least 32");
        }
    }
};

} // namespace wdio
