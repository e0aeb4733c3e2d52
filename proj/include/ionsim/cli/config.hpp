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

#ifndef IONSIM_CLI_CONFIG_HPP
#define IONSIM_CLI_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ionsim/protocol.hpp"

namespace ionsim::cli {

/// A user-facing configuration problem. `kind` is a short machine-readable tag.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(std::string kind, const std::string &message)
        : std::invalid_argument(message), kind_(std::move(kind)) {}
    const std::string &kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

struct Range {
    real lo = 0.0;
    real hi = 0.0;
};

enum class Format { Csv, Json };

/// All subcommand parameters. Unset optionals take the subcommand's default.
struct RunConfig {
    std::optional<real> eta;
    std::optional<real> eta_r;
    std::vector<real> nbar;
    std::vector<real> eps;
    int k = 1;
    std::optional<real> phi;
    real phi0 = 1.5 * pi;
    std::optional<std::size_t> grid;
    std::optional<std::size_t> cutoff;
    real tail_tol = default_tail_tol;
    std::string input_state = "average";
    Format format = Format::Csv;
    std::string out;
    std::optional<std::uint64_t> seed;
    Range nbar_range{0.0, 0.2};
    Range eta_range{0.05, 0.25};
    std::optional<real> nbar_b;
    std::optional<real> eta_b;

    /// Ordered key=value echo of every field, for table metadata.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string fmt_real(real x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::string join_reals(const std::vector<real> &xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s += (i ? "," : "") + fmt_real(xs[i]);
    }
    return s;
}

} // namespace detail

/// Parses a real, accepting plain numbers and multiples of pi:
/// "0.3", "pi", "pi/4", "3pi/2", "0.5*pi", "-pi/2".
inline real parse_real(std::string_view text) {
    const std::string s = detail::trim(text);
    auto plain = [](std::string_view v, real &out) {
        if (v.empty()) {
            return false;
        }
        if (v.front() == '+') {
            v.remove_prefix(1);
        }
        auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        return res.ec == std::errc() && res.ptr == v.data() + v.size() && std::isfinite(out);
    };
    real value = 0.0;
    if (plain(s, value)) {
        return value;
    }
    const auto p = s.find("pi");
    if (p != std::string::npos) {
        std::string_view head(s.data(), p);
        std::string_view tail(s.data() + p + 2, s.size() - p - 2);
        real scale = 1.0;
        if (!head.empty() && head.back() == '*') {
            head.remove_suffix(1);
        }
        if (head == "-") {
            scale = -1.0;
        } else if (!head.empty() && head != "+" && !plain(head, scale)) {
            throw ConfigError("bad-number", "cannot parse number '" + s + "'");
        }
        real div = 1.0;
        if (!tail.empty()) {
            if (tail.front() != '/' || !plain(tail.substr(1), div) || div == 0.0) {
                throw ConfigError("bad-number", "cannot parse number '" + s + "'");
            }
        }
        return scale * pi / div;
    }
    throw ConfigError("bad-number", "cannot parse number '" + s + "'");
}

inline std::vector<real> parse_real_list(std::string_view text) {
    std::vector<real> out;
    std::string item;
    std::stringstream ss{std::string(text)};
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_real(item));
    }
    if (out.empty()) {
        throw ConfigError("bad-number", "empty list");
    }
    return out;
}

inline std::size_t parse_count(std::string_view text) {
    const std::string s = detail::trim(text);
    std::size_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("bad-integer", "cannot parse non-negative integer '" + s + "'");
    }
    return v;
}

/// "lo:hi"
inline Range parse_range(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError("bad-range", "range must be written lo:hi");
    }
    Range r{parse_real(text.substr(0, colon)), parse_real(text.substr(colon + 1))};
    if (r.hi < r.lo) {
        throw ConfigError("bad-range", "range upper bound is below lower bound");
    }
    return r;
}

/// "average", a cardinal name (up, down, plus, minus, plus-i, minus-i),
/// or four numbers "re(alpha),im(alpha),re(beta),im(beta)".
inline std::optional<InputQubit> parse_input_state(std::string_view text) {
    const std::string s = detail::trim(text);
    const auto card = InputQubit::cardinal_states();
    if (s == "average") {
        return std::nullopt;
    }
    if (s == "down") {
        return card[0];
    }
    if (s == "up") {
        return card[1];
    }
    if (s == "plus") {
        return card[2];
    }
    if (s == "minus") {
        return card[3];
    }
    if (s == "plus-i") {
        return card[4];
    }
    if (s == "minus-i") {
        return card[5];
    }
    std::vector<real> v;
    try {
        v = parse_real_list(s);
    } catch (const ConfigError &) {
        throw ConfigError("invalid-amplitudes", "unrecognized input state '" + s + "'");
    }
    if (v.size() != 4) {
        throw ConfigError("invalid-amplitudes", "input state needs four numbers re_a,im_a,re_b,im_b");
    }
    InputQubit q{complex(v[0], v[1]), complex(v[2], v[3])};
    if (std::abs(std::norm(q.alpha) + std::norm(q.beta) - 1.0) > 1e-9) {
        throw ConfigError("invalid-amplitudes", "input amplitudes are not normalized: |alpha|^2+|beta|^2 = " +
                                                    detail::fmt_real(std::norm(q.alpha) + std::norm(q.beta)));
    }
    return q;
}

namespace detail {

inline void check_eta(real v, const char *name) {
    if (!(v > 0.0 && v < 1.0)) {
        throw ConfigError("out-of-range", std::string(name) + " must lie in (0, 1)");
    }
}

inline void check_nbar(real v, const char *name) {
    if (!(v >= 0.0)) {
        throw ConfigError("out-of-range", std::string(name) + " must be non-negative");
    }
}

} // namespace detail

/// Applies one setting. Keys use the long flag spelling without dashes
/// ("eta-r"); underscores are accepted in place of dashes.
inline void apply_setting(RunConfig &cfg, std::string key, std::string_view value) {
    for (auto &c : key) {
        if (c == '_') {
            c = '-';
        }
    }
    if (key == "eta") {
        cfg.eta = parse_real(value);
        detail::check_eta(*cfg.eta, "eta");
    } else if (key == "eta-r") {
        cfg.eta_r = parse_real(value);
        detail::check_eta(*cfg.eta_r, "eta-r");
    } else if (key == "nbar") {
        cfg.nbar = parse_real_list(value);
        for (real v : cfg.nbar) {
            detail::check_nbar(v, "nbar");
        }
    } else if (key == "eps") {
        cfg.eps = parse_real_list(value);
        for (real v : cfg.eps) {
            if (!(std::abs(v) < 1.0)) {
                throw ConfigError("out-of-range", "eps must satisfy |eps| < 1");
            }
        }
    } else if (key == "k") {
        const std::size_t k = parse_count(value);
        if (k < 1 || k > 16) {
            throw ConfigError("out-of-range", "k must lie in 1..16");
        }
        cfg.k = static_cast<int>(k);
    } else if (key == "phi") {
        cfg.phi = parse_real(value);
    } else if (key == "phi0") {
        cfg.phi0 = parse_real(value);
    } else if (key == "grid") {
        cfg.grid = parse_count(value);
        if (*cfg.grid == 0) {
            throw ConfigError("out-of-range", "grid must be positive");
        }
    } else if (key == "cutoff") {
        cfg.cutoff = parse_count(value);
    } else if (key == "tail-tol") {
        cfg.tail_tol = parse_real(value);
        if (!(cfg.tail_tol > 0.0 && cfg.tail_tol < 1.0)) {
            throw ConfigError("out-of-range", "tail-tol must lie in (0, 1)");
        }
    } else if (key == "input-state") {
        parse_input_state(value);
        cfg.input_state = detail::trim(value);
    } else if (key == "format") {
        const std::string f = detail::trim(value);
        if (f == "csv") {
            cfg.format = Format::Csv;
        } else if (f == "json") {
            cfg.format = Format::Json;
        } else {
            throw ConfigError("bad-format", "format must be csv or json");
        }
    } else if (key == "out") {
        cfg.out = detail::trim(value);
    } else if (key == "seed") {
        cfg.seed = parse_count(value);
    } else if (key == "nbar-range") {
        cfg.nbar_range = parse_range(value);
        detail::check_nbar(cfg.nbar_range.lo, "nbar-range");
    } else if (key == "eta-range") {
        cfg.eta_range = parse_range(value);
        detail::check_eta(cfg.eta_range.lo, "eta-range");
        detail::check_eta(cfg.eta_range.hi, "eta-range");
    } else if (key == "nbar-b") {
        cfg.nbar_b = parse_real(value);
        detail::check_nbar(*cfg.nbar_b, "nbar-b");
    } else if (key == "eta-b") {
        cfg.eta_b = parse_real(value);
        detail::check_eta(*cfg.eta_b, "eta-b");
    } else {
        throw ConfigError("unknown-key", "unknown setting '" + key + "'");
    }
}

/// Flat key=value text; '#' starts a comment. Errors carry the line number.
inline void apply_config_text(RunConfig &cfg, std::string_view text) {
    std::stringstream ss{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string t = detail::trim(line);
        if (t.empty()) {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config-syntax", "config line " + std::to_string(lineno) + ": expected key=value");
        }
        try {
            apply_setting(cfg, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError(e.kind(), "config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("eta", eta ? detail::fmt_real(*eta) : "default");
    kv.emplace_back("eta-r", eta_r ? detail::fmt_real(*eta_r) : "eta*3^(-1/4)");
    kv.emplace_back("nbar", nbar.empty() ? "default" : detail::join_reals(nbar));
    kv.emplace_back("eps", eps.empty() ? "default" : detail::join_reals(eps));
    kv.emplace_back("k", std::to_string(k));
    kv.emplace_back("phi", phi ? detail::fmt_real(*phi) : "pi-phi0/2");
    kv.emplace_back("phi0", detail::fmt_real(phi0));
    kv.emplace_back("grid", grid ? std::to_string(*grid) : "default");
    kv.emplace_back("cutoff", cutoff ? std::to_string(*cutoff) : "auto");
    kv.emplace_back("tail-tol", detail::fmt_real(tail_tol));
    kv.emplace_back("input-state", input_state);
    kv.emplace_back("nbar-range", detail::fmt_real(nbar_range.lo) + ":" + detail::fmt_real(nbar_range.hi));
    kv.emplace_back("eta-range", detail::fmt_real(eta_range.lo) + ":" + detail::fmt_real(eta_range.hi));
    kv.emplace_back("nbar-b", nbar_b ? detail::fmt_real(*nbar_b) : "nbar");
    kv.emplace_back("eta-b", eta_b ? detail::fmt_real(*eta_b) : "eta");
    kv.emplace_back("seed", seed ? std::to_string(*seed) : "none");
    return kv;
}

/// Teleport parameters for one (nbar, eta, eps) point under this config.
inline TeleportParams teleport_params(const RunConfig &cfg, real nbar, real eta, real eps) {
    TeleportParams p;
    p.mode = ModeParams::from_eta(eta);
    if (cfg.eta_r) {
        p.mode.eta_r = *cfg.eta_r;
    }
    p.nbar = nbar;
    p.nbar_B = cfg.nbar_b;
    p.eta_B = cfg.eta_b;
    p.epsilon = eps;
    p.k = cfg.k;
    p.phases = PhaseConfig::matched(cfg.phi0);
    if (cfg.phi) {
        p.phases.phi_A = *cfg.phi;
        p.phases.phi_B = *cfg.phi;
    }
    p.tail_tol = cfg.tail_tol;
    p.cutoff = cfg.cutoff;
    return p;
}

} // namespace ionsim::cli

#endif // IONSIM_CLI_CONFIG_HPP
