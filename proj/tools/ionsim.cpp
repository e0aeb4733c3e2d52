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

// ionsim: command-line front end.
//
//   ionsim rabi-surface     [--eta 0.15] [--k 1] [--grid 25]
//   ionsim channel-fidelity [--nbar 0.2,1,5] [--eta 0.2]
//   ionsim teleport         [--nbar 0.11] [--eps 0.05] [--input-state plus]
//   ionsim fidelity-surface [--grid 20] [--eps 0,0.05]
//   ionsim swap             [--nbar 0.2]
//   ionsim run-script FILE  [--input-state ...]
//
// Settings are resolved as: flags > --config file > built-in defaults.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ionsim/cli/commands.hpp"

namespace {

using namespace ionsim;
using namespace ionsim::cli;

const char *const setting_flags[] = {"eta",  "eta-r",     "nbar",   "eps",         "k",          "phi",
                                     "phi0", "grid",      "cutoff", "tail-tol",    "input-state", "format",
                                     "out",  "seed",      "nbar-range", "eta-range", "nbar-b",   "eta-b"};

struct Flags {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> options;
    std::string config_path;
    std::string script_path;
};

void add_setting_flags(CLI::App *sub, Flags &flags) {
    for (const char *name : setting_flags) {
        flags.options[std::string(sub->get_name()) + "/" + name] =
            sub->add_option(std::string("--") + name, flags.values[name]);
    }
    sub->add_option("--config", flags.config_path, "flat key=value configuration file");
}

std::string read_file(const std::string &path, const char *what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("unreadable-file", std::string("cannot read ") + what + " '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes `body` to cfg.out, or stdout when unset.
void emit(const RunConfig &cfg, const std::string &body) {
    if (cfg.out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) {
        throw ConfigError("unwritable-output", "cannot write output file '" + cfg.out + "'");
    }
    out << body;
    if (!out) {
        throw ConfigError("unwritable-output", "failed writing output file '" + cfg.out + "'");
    }
}

std::string table_body(const Table &t, Format f) {
    std::ostringstream os;
    write_table(os, t, f);
    return os.str();
}

int fail(const std::string &kind, const std::string &message) {
    std::string flat = message;
    for (auto &c : flat) {
        if (c == '\n') {
            c = ' ';
        }
    }
    std::cerr << "error kind=" << kind << " message=" << std::quoted(flat) << '\n';
    return kind == "usage" ? 2 : 1;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Trapped-ion reliable teleportation simulator"};
    app.require_subcommand(1);
    Flags flags;

    CLI::App *rabi = app.add_subcommand("rabi-surface", "sector Rabi frequencies over a Fock grid");
    CLI::App *channel = app.add_subcommand("channel-fidelity", "Bell-channel preparation fidelity");
    CLI::App *teleport = app.add_subcommand("teleport", "one full teleportation run");
    CLI::App *surface = app.add_subcommand("fidelity-surface", "teleportation fidelity over (nbar, eta)");
    CLI::App *swap = app.add_subcommand("swap", "entanglement swapping");
    CLI::App *script = app.add_subcommand("run-script", "execute a pulse script");
    script->add_option("script", flags.script_path, "pulse script file")->required();
    for (CLI::App *sub : {rabi, channel, teleport, surface, swap, script}) {
        add_setting_flags(sub, flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return fail("usage", e.what());
    }

    CLI::App *active = app.get_subcommands().front();
    try {
        RunConfig cfg;
        if (!flags.config_path.empty()) {
            apply_config_text(cfg, read_file(flags.config_path, "config file"));
        }
        for (const char *name : setting_flags) {
            const auto *opt = flags.options.at(std::string(active->get_name()) + "/" + name);
            if (opt->count() > 0) {
                apply_setting(cfg, name, flags.values[name]);
            }
        }

        if (active == rabi) {
            emit(cfg, table_body(cmd_rabi_surface(cfg), cfg.format));
        } else if (active == channel) {
            emit(cfg, table_body(cmd_channel_fidelity(cfg), cfg.format));
        } else if (active == surface) {
            emit(cfg, table_body(cmd_fidelity_surface(cfg), cfg.format));
        } else if (active == teleport) {
            const FidelityReport r = cmd_teleport(cfg);
            const std::string json = report_json(r, cfg).dump(2) + "\n";
            if (cfg.format == Format::Json) {
                emit(cfg, json);
            } else {
                std::cout << report_text(r, cfg);
                if (!cfg.out.empty()) {
                    emit(cfg, json);
                }
            }
        } else if (active == swap) {
            const auto outs = cmd_swap(cfg);
            const std::string json = swap_json(outs, cfg).dump(2) + "\n";
            if (cfg.format == Format::Json) {
                emit(cfg, json);
            } else {
                std::cout << swap_text(outs);
                if (!cfg.out.empty()) {
                    emit(cfg, json);
                }
            }
        } else if (active == script) {
            const ScriptResult r = cmd_run_script(cfg, read_file(flags.script_path, "script"));
            const std::string json = script_json(r, cfg).dump(2) + "\n";
            if (cfg.format == Format::Json) {
                emit(cfg, json);
            } else {
                std::cout << script_text(r);
                if (!cfg.out.empty()) {
                    emit(cfg, json);
                }
            }
        }
    } catch (const ConfigError &e) {
        return fail(e.kind(), e.what());
    } catch (const ScriptError &e) {
        return fail("script", e.what());
    } catch (const std::exception &e) {
        return fail("runtime", e.what());
    }
    return 0;
}
