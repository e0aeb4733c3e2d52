// Copyright 2026 The ionsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subcommand bodies. Each returns data; tools/ionsim.cpp owns I/O.

#ifndef IONSIM_CLI_COMMANDS_HPP
#define IONSIM_CLI_COMMANDS_HPP

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ionsim/cli/config.hpp"
#include "ionsim/cli/pulse_script.hpp"
#include "ionsim/cli/table.hpp"
#include "ionsim/protocol.hpp"

namespace ionsim::cli {

/// Worker count: IONSIM_THREADS if set and positive, else the hardware concurrency.
inline unsigned sweep_threads() {
    if (const char *env = std::getenv("IONSIM_THREADS")) {
        try {
            const std::size_t n = parse_count(env);
            if (n > 0) {
                return static_cast<unsigned>(n);
            }
        } catch (const ConfigError &) {
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count). Results must be written to slot i by the
/// caller, so the output order never depends on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)> &fn,
                         unsigned threads = sweep_threads()) {
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline std::vector<real> linspace(Range r, std::size_t steps) {
    if (steps == 1) {
        return {r.lo};
    }
    std::vector<real> v(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        v[i] = r.lo + (r.hi - r.lo) * static_cast<real>(i) / static_cast<real>(steps - 1);
    }
    return v;
}

inline std::vector<std::pair<std::string, std::string>> command_meta(const std::string &command,
                                                                     const RunConfig &cfg) {
    auto meta = cfg.echo();
    meta.insert(meta.begin(), {"command", command});
    return meta;
}

inline ModeParams mode_params(const RunConfig &cfg, real default_eta) {
    ModeParams p = ModeParams::from_eta(cfg.eta.value_or(default_eta));
    if (cfg.eta_r) {
        p.eta_r = *cfg.eta_r;
    }
    return p;
}

// ---------------------------------------------------------------------------

inline constexpr real rabi_surface_default_eta = 0.15;
inline constexpr std::size_t rabi_surface_default_grid = 25;

/// Rows (n, n_r, Omega^k_{n n_r}/Omega_k, |.|) over 0..grid in both modes.
inline Table cmd_rabi_surface(const RunConfig &cfg) {
    const ModeParams p = mode_params(cfg, rabi_surface_default_eta);
    const std::size_t grid = cfg.grid.value_or(rabi_surface_default_grid);
    Table t;
    t.meta = command_meta("rabi-surface", cfg);
    t.columns = {"n", "n_r", "rabi", "magnitude"};
    for (std::size_t n = 0; n <= grid; ++n) {
        for (std::size_t m = 0; m <= grid; ++m) {
            const real w = rabi_frequency(cfg.k, static_cast<int>(n), static_cast<int>(m), p);
            t.rows.push_back({static_cast<std::int64_t>(n), static_cast<std::int64_t>(m), w, std::abs(w)});
        }
    }
    return t;
}

inline constexpr real channel_default_eta = 0.2;

/// Bell-channel fidelity per nbar, with the temperature-matched stretch occupation.
inline Table cmd_channel_fidelity(const RunConfig &cfg) {
    const ModeParams p = mode_params(cfg, channel_default_eta);
    const std::vector<real> nbars = cfg.nbar.empty() ? std::vector<real>{0.2, 1.0, 5.0} : cfg.nbar;
    PulseSpec pulse;
    pulse.k = 1;
    pulse.phi = cfg.phi.value_or(pi - cfg.phi0 / 2.0);
    pulse.phi0 = cfg.phi0;
    pulse.epsilon = cfg.eps.empty() ? 0.0 : cfg.eps.front();

    Table t;
    t.meta = command_meta("channel-fidelity", cfg);
    t.columns = {"nbar", "nbar_r", "eta", "eta_r", "cutoff", "cutoff_r", "tail_mass", "fidelity",
                 "fidelity_pipeline"};
    for (real nbar : nbars) {
        const real nr = matched_nbar_r(nbar, p.nu_ratio);
        const ThermalSpec th = cfg.cutoff ? thermal_distribution(nbar, nr, *cfg.cutoff)
                                          : thermal_distribution_auto(nbar, nr, cfg.tail_tol);
        t.rows.push_back({nbar, nr, p.eta, p.eta_r, static_cast<std::int64_t>(th.cutoff),
                          static_cast<std::int64_t>(th.cutoff_r), th.tail_mass, channel_fidelity(th, pulse, p),
                          channel_fidelity_pipeline(th, pulse, p)});
    }
    return t;
}

inline constexpr real teleport_default_eta = 0.15;

inline FidelityReport cmd_teleport(const RunConfig &cfg) {
    const real nbar = cfg.nbar.empty() ? 0.0 : cfg.nbar.front();
    const real eps = cfg.eps.empty() ? 0.0 : cfg.eps.front();
    TeleportParams params = teleport_params(cfg, nbar, cfg.eta.value_or(teleport_default_eta), eps);
    return teleport_fidelity(parse_input_state(cfg.input_state), params);
}

/// Fidelity surface over (nbar, eta) for each eps (default {0, 0.05}), in grid order.
inline Table cmd_fidelity_surface(const RunConfig &cfg) {
    const std::size_t steps = cfg.grid.value_or(20);
    const std::vector<real> eps_list = cfg.eps.empty() ? std::vector<real>{0.0, 0.05} : cfg.eps;
    const auto nbars = linspace(cfg.nbar_range, steps);
    const auto etas = linspace(cfg.eta_range, steps);
    const auto input = parse_input_state(cfg.input_state);

    const std::size_t count = eps_list.size() * nbars.size() * etas.size();
    std::vector<real> fid(count);
    parallel_for(count, [&](std::size_t i) {
        const std::size_t e = i / (nbars.size() * etas.size());
        const std::size_t a = (i / etas.size()) % nbars.size();
        const std::size_t b = i % etas.size();
        fid[i] = teleport_fidelity(input, teleport_params(cfg, nbars[a], etas[b], eps_list[e])).aggregate;
    });

    Table t;
    t.meta = command_meta("fidelity-surface", cfg);
    t.columns = {"eps", "nbar", "eta", "fidelity"};
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t e = i / (nbars.size() * etas.size());
        const std::size_t a = (i / etas.size()) % nbars.size();
        const std::size_t b = i % etas.size();
        t.rows.push_back({eps_list[e], nbars[a], etas[b], fid[i]});
    }
    return t;
}

inline std::array<SwapOutcome, 4> cmd_swap(const RunConfig &cfg) {
    SwapParams p;
    p.mode = mode_params(cfg, teleport_default_eta);
    p.phases = PhaseConfig::matched(cfg.phi0);
    if (cfg.phi) {
        p.phases.phi_A = p.phases.phi_B = *cfg.phi;
    }
    p.epsilon = cfg.eps.empty() ? 0.0 : cfg.eps.front();
    p.nbar = cfg.nbar.empty() ? 0.0 : cfg.nbar.front();
    p.tail_tol = cfg.tail_tol;
    p.k = cfg.k;
    return entanglement_swap(p);
}

inline ScriptResult cmd_run_script(const RunConfig &cfg, std::string_view script_text) {
    const PulseScript script = parse_pulse_script(script_text);
    const real nbar = cfg.nbar.empty() ? 0.0 : cfg.nbar.front();
    const real eps = cfg.eps.empty() ? 0.0 : cfg.eps.front();
    const auto input = parse_input_state(cfg.input_state);
    if (!input) {
        throw ConfigError("invalid-amplitudes", "run-script needs a single input state, not 'average'");
    }
    return execute_pulse_script(script, *input,
                                teleport_params(cfg, nbar, cfg.eta.value_or(teleport_default_eta), eps));
}

// ---------------------------------------------------------------------------
// Serialization of reports

inline nlohmann::ordered_json matrix_json(const ComplexMatrix &m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Seeded draw of one readout, for demonstration output only.
inline Outcome sample_outcome(const std::array<real, 4> &probs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<real> u(0.0, 1.0);
    const real x = u(rng);
    real acc = 0.0;
    for (std::size_t o = 0; o < 4; ++o) {
        acc += probs[o];
        if (x < acc) {
            return static_cast<Outcome>(o);
        }
    }
    return Outcome::UpUp;
}

inline nlohmann::ordered_json report_json(const FidelityReport &r, const RunConfig &cfg,
                                          const std::string &command = "teleport") {
    nlohmann::ordered_json j;
    j["meta"] = meta_json(command_meta(command, cfg));
    j["params"] = {{"nbar", r.nbar},       {"nbar_r", r.nbar_r},   {"nbar_B", r.nbar_B},
                   {"eta", r.eta},         {"eta_r", r.eta_r},     {"eta_B", r.eta_B},
                   {"eps", r.epsilon},     {"phi_A", r.phases.phi_A}, {"phi_B", r.phases.phi_B},
                   {"phi0_A", r.phases.phi0_A}, {"phi0_B", r.phases.phi0_B}};
    j["input"] = r.input;
    nlohmann::ordered_json outcomes = nlohmann::ordered_json::array();
    for (std::size_t o = 0; o < 4; ++o) {
        const auto axis = correction_axis(static_cast<Outcome>(o));
        nlohmann::ordered_json e;
        e["outcome"] = outcome_label(static_cast<Outcome>(o));
        e["probability"] = r.outcome_probs[o];
        e["correction"] = axis ? std::string("pi-") + axis_name(*axis) : std::string("none");
        e["fidelity"] = r.outcome_fidelities[o];
        if (!r.conditional_states[o].empty()) {
            e["state"] = matrix_json(r.conditional_states[o]);
            e["corrected_state"] = matrix_json(r.corrected_states[o]);
        }
        outcomes.push_back(std::move(e));
    }
    j["outcomes"] = std::move(outcomes);
    j["fidelity"] = r.aggregate;
    if (cfg.seed) {
        j["sampled_outcome"] = outcome_label(sample_outcome(r.outcome_probs, *cfg.seed));
    }
    return j;
}

inline std::string report_text(const FidelityReport &r, const RunConfig &cfg) {
    std::ostringstream os;
    os << "teleport: input=" << r.input << " nbar=" << r.nbar << " nbar_r=" << r.nbar_r << " nbar_B=" << r.nbar_B
       << " eta=" << r.eta << " eta_r=" << r.eta_r << " eps=" << r.epsilon << '\n';
    for (std::size_t o = 0; o < 4; ++o) {
        const auto axis = correction_axis(static_cast<Outcome>(o));
        os << "  outcome " << outcome_label(static_cast<Outcome>(o)) << ": p=" << r.outcome_probs[o]
           << " correction=" << (axis ? std::string("pi-") + axis_name(*axis) : std::string("none"))
           << " F=" << r.outcome_fidelities[o];
        if (!r.corrected_states[o].empty() && r.corrected_states[o].rows() == 2) {
            const auto &s = r.corrected_states[o];
            os << " rho3=[[" << s(0, 0).real() << ", " << s(0, 1) << "], [" << s(1, 0) << ", " << s(1, 1).real()
               << "]]";
        }
        os << '\n';
    }
    os << "  fidelity " << r.aggregate << '\n';
    if (cfg.seed) {
        os << "  sampled outcome (seed " << *cfg.seed << "): "
           << outcome_label(sample_outcome(r.outcome_probs, *cfg.seed)) << '\n';
    }
    return os.str();
}

inline nlohmann::ordered_json swap_json(const std::array<SwapOutcome, 4> &outs, const RunConfig &cfg) {
    nlohmann::ordered_json j;
    j["meta"] = meta_json(command_meta("swap", cfg));
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t o = 0; o < 4; ++o) {
        arr.push_back({{"outcome", outcome_label(static_cast<Outcome>(o))},
                       {"label", bell_label_name(outs[o].label)},
                       {"probability", outs[o].probability},
                       {"fidelity", outs[o].fidelity}});
    }
    j["outcomes"] = std::move(arr);
    return j;
}

inline std::string swap_text(const std::array<SwapOutcome, 4> &outs) {
    std::ostringstream os;
    for (std::size_t o = 0; o < 4; ++o) {
        os << "outcome " << outcome_label(static_cast<Outcome>(o)) << " -> " << bell_label_name(outs[o].label)
           << "_14 p=" << outs[o].probability << " F=" << outs[o].fidelity << '\n';
    }
    return os.str();
}

inline std::string outcome_history(const std::vector<Outcome> &os) {
    std::string s;
    for (std::size_t i = 0; i < os.size(); ++i) {
        s += (i ? "," : "") + std::string(outcome_label(os[i]));
    }
    return s.empty() ? "-" : s;
}

inline nlohmann::ordered_json script_json(const ScriptResult &r, const RunConfig &cfg) {
    nlohmann::ordered_json j;
    j["meta"] = meta_json(command_meta("run-script", cfg));
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &b : r.branches) {
        nlohmann::ordered_json e;
        e["outcomes"] = outcome_history(b.outcomes);
        e["probability"] = b.probability;
        e["unmeasured_ions"] = b.unmeasured_ions;
        e["state"] = matrix_json(b.state);
        if (b.fidelity) {
            e["fidelity"] = *b.fidelity;
        }
        arr.push_back(std::move(e));
    }
    j["branches"] = std::move(arr);
    if (r.aggregate) {
        j["fidelity"] = *r.aggregate;
    }
    return j;
}

inline std::string script_text(const ScriptResult &r) {
    std::ostringstream os;
    for (const auto &b : r.branches) {
        os << "branch " << outcome_history(b.outcomes) << ": p=" << b.probability;
        if (b.fidelity) {
            os << " F=" << *b.fidelity;
        }
        os << '\n';
    }
    if (r.aggregate) {
        os << "fidelity " << *r.aggregate << '\n';
    }
    return os.str();
}

} // namespace ionsim::cli

#endif // IONSIM_CLI_COMMANDS_HPP
