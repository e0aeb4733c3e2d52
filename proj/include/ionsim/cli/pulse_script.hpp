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

// Line-oriented pulse scripts.
//
//   pulse   ions=<i,j> [k=<int>] [area=<real>] [phi=<real>] [phi0=<real>] [eps=<real>]
//   rotate  ion=<i> axis=<x|y|z|auto> angle=<real> [eps=<real>]
//   measure ions=<i,j>
//
// '#' starts a comment. Reals accept multiples of pi ("pi/4", "3pi/2").
// axis=auto applies the Pauli correction selected by the most recent
// measurement of the branch (uu: none, dd: z, ud: x, du: y).
//
// Scripts run on a three-ion register: ion 1 holds the input qubit and ions
// 2-3 the ideal Bell channel. Pair pulses see the two-mode thermal state of
// their trap; single-ion rotations see the trap-B single-mode thermal state.

#ifndef IONSIM_CLI_PULSE_SCRIPT_HPP
#define IONSIM_CLI_PULSE_SCRIPT_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ionsim/cli/config.hpp"
#include "ionsim/protocol.hpp"

namespace ionsim::cli {

/// Syntax or semantic error tied to a script location (1-based line and column).
class ScriptError : public std::runtime_error {
  public:
    ScriptError(int line, int column, std::string token, const std::string &message)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                             message + (token.empty() ? "" : " (at '" + token + "')")),
          line_(line), column_(column), token_(std::move(token)), message_(message) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string &token() const noexcept { return token_; }
    const std::string &message() const noexcept { return message_; }

  private:
    int line_;
    int column_;
    std::string token_;
    std::string message_;
};

struct PulseStatement {
    int ion_a = 0;
    int ion_b = 0;
    std::optional<int> k;
    std::optional<real> area;
    std::optional<real> phi;
    std::optional<real> phi0;
    std::optional<real> eps;
    int line = 0;
};

struct RotateStatement {
    int ion = 0;
    std::optional<Axis> axis; ///< nullopt means axis=auto
    real angle = 0.0;
    std::optional<real> eps;
    int line = 0;
};

struct MeasureStatement {
    int ion_a = 0;
    int ion_b = 0;
    int line = 0;
};

using Statement = std::variant<PulseStatement, RotateStatement, MeasureStatement>;

struct PulseScript {
    std::vector<Statement> statements;
};

namespace detail {

struct Token {
    std::string text;
    int column = 0;
};

inline std::vector<Token> split_tokens(const std::string &line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        if (i >= line.size()) {
            break;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

struct Field {
    std::string value;
    Token token;
};

inline std::vector<int> parse_ion_list(const Field &f, int line) {
    std::vector<int> ions;
    std::stringstream ss(f.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t v = 0;
        try {
            v = parse_count(item);
        } catch (const ConfigError &) {
            throw ScriptError(line, f.token.column, f.token.text, "ion indices must be positive integers");
        }
        if (v == 0) {
            throw ScriptError(line, f.token.column, f.token.text, "ion indices start at 1");
        }
        ions.push_back(static_cast<int>(v));
    }
    return ions;
}

inline real field_real(const Field &f, int line) {
    try {
        return parse_real(f.value);
    } catch (const ConfigError &) {
        throw ScriptError(line, f.token.column, f.token.text, "expected a number");
    }
}

inline std::pair<int, int> ion_pair(const std::map<std::string, Field> &fields, const std::string &keyword,
                                    int line, int keyword_col) {
    const auto it = fields.find("ions");
    if (it == fields.end()) {
        throw ScriptError(line, keyword_col, keyword, keyword + " requires two ions");
    }
    const auto ions = parse_ion_list(it->second, line);
    if (ions.size() != 2) {
        throw ScriptError(line, it->second.token.column, it->second.token.text, keyword + " requires two ions");
    }
    if (ions[0] == ions[1]) {
        throw ScriptError(line, it->second.token.column, it->second.token.text,
                          keyword + " requires two distinct ions");
    }
    return {ions[0], ions[1]};
}

} // namespace detail

inline PulseScript parse_pulse_script(std::string_view text) {
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"pulse", {"ions", "k", "area", "phi", "phi0", "eps"}},
        {"rotate", {"ion", "axis", "angle", "eps"}},
        {"measure", {"ions"}},
    };

    PulseScript script;
    std::stringstream ss{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const auto tokens = detail::split_tokens(raw);
        if (tokens.empty()) {
            continue;
        }
        const detail::Token &kw = tokens.front();
        const auto spec = allowed.find(kw.text);
        if (spec == allowed.end()) {
            throw ScriptError(line, kw.column, kw.text, "unknown statement");
        }

        std::map<std::string, detail::Field> fields;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            const detail::Token &t = tokens[i];
            const auto eq = t.text.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == t.text.size()) {
                throw ScriptError(line, t.column, t.text, "expected key=value");
            }
            const std::string key = t.text.substr(0, eq);
            if (!spec->second.count(key)) {
                throw ScriptError(line, t.column, t.text, "unknown parameter '" + key + "' for " + kw.text);
            }
            if (fields.count(key)) {
                throw ScriptError(line, t.column, t.text, "duplicate parameter '" + key + "'");
            }
            fields.emplace(key, detail::Field{t.text.substr(eq + 1), t});
        }

        auto opt_real = [&](const char *key) -> std::optional<real> {
            const auto it = fields.find(key);
            if (it == fields.end()) {
                return std::nullopt;
            }
            return detail::field_real(it->second, line);
        };

        if (kw.text == "pulse") {
            PulseStatement p;
            std::tie(p.ion_a, p.ion_b) = detail::ion_pair(fields, "pulse", line, kw.column);
            if (const auto it = fields.find("k"); it != fields.end()) {
                std::size_t k = 0;
                try {
                    k = parse_count(it->second.value);
                } catch (const ConfigError &) {
                    throw ScriptError(line, it->second.token.column, it->second.token.text,
                                      "k must be a positive integer");
                }
                if (k < 1) {
                    throw ScriptError(line, it->second.token.column, it->second.token.text,
                                      "k must be a positive integer");
                }
                p.k = static_cast<int>(k);
            }
            p.area = opt_real("area");
            if (p.area && !(*p.area > 0.0)) {
                const auto &f = fields.at("area");
                throw ScriptError(line, f.token.column, f.token.text, "area must be positive");
            }
            p.phi = opt_real("phi");
            p.phi0 = opt_real("phi0");
            p.eps = opt_real("eps");
            if (p.eps && !(*p.eps > -1.0)) {
                const auto &f = fields.at("eps");
                throw ScriptError(line, f.token.column, f.token.text, "eps must exceed -1");
            }
            p.line = line;
            script.statements.emplace_back(p);
        } else if (kw.text == "rotate") {
            RotateStatement r;
            const auto ion = fields.find("ion");
            if (ion == fields.end()) {
                throw ScriptError(line, kw.column, kw.text, "rotate requires ion=<i>");
            }
            const auto ions = detail::parse_ion_list(ion->second, line);
            if (ions.size() != 1) {
                throw ScriptError(line, ion->second.token.column, ion->second.token.text,
                                  "rotate acts on exactly one ion");
            }
            r.ion = ions[0];
            const auto axis = fields.find("axis");
            if (axis == fields.end()) {
                throw ScriptError(line, kw.column, kw.text, "rotate requires axis=<x|y|z|auto>");
            }
            if (axis->second.value != "auto") {
                try {
                    r.axis = parse_axis(axis->second.value);
                } catch (const std::invalid_argument &) {
                    throw ScriptError(line, axis->second.token.column, axis->second.token.text,
                                      "axis must be x, y, z or auto");
                }
            }
            const auto angle = opt_real("angle");
            if (!angle) {
                throw ScriptError(line, kw.column, kw.text, "rotate requires angle=<real>");
            }
            r.angle = *angle;
            r.eps = opt_real("eps");
            r.line = line;
            script.statements.emplace_back(r);
        } else {
            MeasureStatement m;
            std::tie(m.ion_a, m.ion_b) = detail::ion_pair(fields, "measure", line, kw.column);
            m.line = line;
            script.statements.emplace_back(m);
        }
    }
    return script;
}

/// One readout history of a script run.
struct ScriptBranch {
    std::vector<Outcome> outcomes;
    real probability = 0.0;
    std::vector<int> unmeasured_ions;
    ComplexMatrix state; ///< normalized, over the unmeasured ions
    std::optional<real> fidelity; ///< against the input, when only ion 3 is left
};

struct ScriptResult {
    std::vector<ScriptBranch> branches;
    std::optional<real> aggregate;
};

inline constexpr int script_register_ions = 3;

/// Runs a script as a weighted ensemble of pure register states.
inline ScriptResult execute_pulse_script(const PulseScript &script, const InputQubit &input,
                                         const TeleportParams &params) {
    params.validate();
    input.validate(1e-10);
    const int n_ions = script_register_ions;
    const ThermalSpec trap_a = params.trap_a();
    const TrapB trap_b = params.trap_b();

    struct Member {
        real weight = 1.0;
        std::map<std::string, std::size_t> labels;
        std::vector<Outcome> outcomes;
        StateVec psi;
    };
    std::vector<Member> members{{1.0, {}, {}, tensor(input.ket(), bell_channel_target(params.phases.phi_B))}};
    std::set<int> measured;

    auto check_ion = [&](int ion, int line) {
        if (ion > n_ions) {
            throw ScriptError(line, 1, "", "ion " + std::to_string(ion) + " is outside the " +
                                               std::to_string(n_ions) + "-ion register");
        }
    };

    for (const auto &stmt : script.statements) {
        std::vector<Member> next;
        if (const auto *p = std::get_if<PulseStatement>(&stmt)) {
            check_ion(p->ion_a, p->line);
            check_ion(p->ion_b, p->line);
            PulseSpec pulse;
            pulse.k = p->k.value_or(params.k);
            pulse.area = p->area.value_or(pi / 4.0);
            pulse.phi = p->phi.value_or(params.phases.phi_A);
            pulse.phi0 = p->phi0.value_or(params.phases.phi0_A);
            pulse.epsilon = p->eps.value_or(params.epsilon);
            real t = 0.0;
            try {
                t = pulse_duration(pulse, params.mode);
            } catch (const std::domain_error &e) {
                throw ScriptError(p->line, 1, "", e.what());
            }
            const std::string key = "pair:" + std::to_string(std::min(p->ion_a, p->ion_b)) + "," +
                                    std::to_string(std::max(p->ion_a, p->ion_b));
            for (auto &m : members) {
                std::vector<Member> split;
                if (m.labels.count(key)) {
                    split.push_back(std::move(m));
                } else {
                    for (std::size_t idx = 0; idx < trap_a.weights.size(); ++idx) {
                        Member c = m;
                        c.weight *= trap_a.weights[idx];
                        c.labels[key] = idx;
                        split.push_back(std::move(c));
                    }
                }
                for (auto &c : split) {
                    const std::size_t idx = c.labels[key];
                    const int n = static_cast<int>(idx / (trap_a.cutoff_r + 1));
                    const int n_r = static_cast<int>(idx % (trap_a.cutoff_r + 1));
                    const ComplexMatrix u =
                        sector_unitary(pulse.k, pulse.phi, pulse.phi0, sector_rate(pulse.k, n, n_r, params.mode), t);
                    c.psi = apply_two_ion(c.psi, u, p->ion_a, p->ion_b, n_ions);
                    next.push_back(std::move(c));
                }
            }
        } else if (const auto *r = std::get_if<RotateStatement>(&stmt)) {
            check_ion(r->ion, r->line);
            const std::string key = "ion:" + std::to_string(r->ion);
            const real eps = r->eps.value_or(params.epsilon);
            for (auto &m : members) {
                std::optional<Axis> axis = r->axis;
                if (!axis) {
                    if (m.outcomes.empty()) {
                        throw ScriptError(r->line, 1, "", "axis=auto requires a preceding measure");
                    }
                    axis = correction_axis(m.outcomes.back());
                    if (!axis) {
                        next.push_back(std::move(m));
                        continue;
                    }
                }
                std::vector<Member> split;
                if (m.labels.count(key)) {
                    split.push_back(std::move(m));
                } else {
                    for (std::size_t nb = 0; nb < trap_b.weights.size(); ++nb) {
                        Member c = m;
                        c.weight *= trap_b.weights[nb];
                        c.labels[key] = nb;
                        split.push_back(std::move(c));
                    }
                }
                for (auto &c : split) {
                    const int nb = static_cast<int>(c.labels[key]);
                    c.psi = apply_one_ion(c.psi, carrier_rotation(*axis, r->angle, nb, trap_b.eta, eps), r->ion,
                                          n_ions);
                    next.push_back(std::move(c));
                }
            }
        } else {
            const auto &ms = std::get<MeasureStatement>(stmt);
            check_ion(ms.ion_a, ms.line);
            check_ion(ms.ion_b, ms.line);
            const std::size_t ba = ion_bit(ms.ion_a, n_ions);
            const std::size_t bb = ion_bit(ms.ion_b, n_ions);
            for (const auto &m : members) {
                for (std::size_t o = 0; o < 4; ++o) {
                    Member c = m;
                    for (std::size_t i = 0; i < c.psi.dim(); ++i) {
                        const std::size_t got = (((i >> ba) & 1U) << 1) | ((i >> bb) & 1U);
                        if (got != o) {
                            c.psi[i] = 0.0;
                        }
                    }
                    if (c.weight * c.psi.norm_squared() <= 1e-300) {
                        continue;
                    }
                    c.outcomes.push_back(static_cast<Outcome>(o));
                    next.push_back(std::move(c));
                }
            }
            measured.insert(ms.ion_a);
            measured.insert(ms.ion_b);
        }
        members = std::move(next);
    }

    // Group by readout history, in lexicographic outcome order.
    std::vector<int> keep_ions;
    std::vector<std::size_t> keep_idx;
    for (int ion = 1; ion <= n_ions; ++ion) {
        if (!measured.count(ion)) {
            keep_ions.push_back(ion);
            keep_idx.push_back(static_cast<std::size_t>(ion - 1));
        }
    }
    const std::vector<std::size_t> dims(n_ions, 2);
    std::map<std::vector<int>, std::pair<std::vector<Outcome>, ComplexMatrix>> groups;
    real total = 0.0;
    for (const auto &m : members) {
        std::vector<int> key;
        for (auto o : m.outcomes) {
            key.push_back(static_cast<int>(o));
        }
        ComplexMatrix reduced = keep_idx.empty()
                                    ? ComplexMatrix(1, 1, {m.weight * m.psi.norm_squared()})
                                    : partial_trace(m.psi.projector() * m.weight, keep_idx, dims);
        total += reduced.trace().real();
        auto it = groups.find(key);
        if (it == groups.end()) {
            groups.emplace(key, std::make_pair(m.outcomes, std::move(reduced)));
        } else {
            it->second.second += reduced;
        }
    }

    ScriptResult result;
    const ComplexMatrix ideal = input.ket().projector();
    const bool scored = keep_ions == std::vector<int>{3};
    real aggregate = 0.0;
    for (auto &[key, group] : groups) {
        ScriptBranch b;
        b.outcomes = group.first;
        const real mass = group.second.trace().real();
        b.probability = mass / total;
        b.unmeasured_ions = keep_ions;
        b.state = group.second * (1.0 / mass);
        if (scored) {
            b.fidelity = fidelity(ideal, b.state);
            aggregate += b.probability * *b.fidelity;
        }
        result.branches.push_back(std::move(b));
    }
    if (scored) {
        result.aggregate = aggregate;
    }
    return result;
}

} // namespace ionsim::cli

#endif // IONSIM_CLI_PULSE_SCRIPT_HPP
