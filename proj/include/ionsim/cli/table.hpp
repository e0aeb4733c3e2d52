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

#ifndef IONSIM_CLI_TABLE_HPP
#define IONSIM_CLI_TABLE_HPP

#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ionsim/cli/config.hpp"

namespace ionsim::cli {

using Cell = std::variant<std::int64_t, real, std::string>;

/// Column-named rows plus a metadata block echoing the configuration.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column(const std::string &name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) {
                return i;
            }
        }
        throw std::out_of_range("Table: no column '" + name + "'");
    }

    real number(std::size_t row, const std::string &name) const {
        const Cell &c = rows.at(row).at(column(name));
        if (const auto *d = std::get_if<real>(&c)) {
            return *d;
        }
        if (const auto *i = std::get_if<std::int64_t>(&c)) {
            return static_cast<real>(*i);
        }
        throw std::invalid_argument("Table: column '" + name + "' is not numeric");
    }
};

/// RFC-4180 field quoting.
inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

inline std::string cell_text(const Cell &c) {
    return std::visit(
        [](const auto &v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, real>) {
                return detail::fmt_real(v);
            } else {
                return std::to_string(v);
            }
        },
        c);
}

inline void write_csv(std::ostream &os, const Table &t) {
    for (const auto &[k, v] : t.meta) {
        os << "# " << k << '=' << v << '\n';
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << (i ? "," : "") << csv_field(t.columns[i]);
    }
    os << '\n';
    for (const auto &row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << csv_field(cell_text(row[i]));
        }
        os << '\n';
    }
}

inline nlohmann::ordered_json meta_json(const std::vector<std::pair<std::string, std::string>> &meta) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto &[k, v] : meta) {
        m[k] = v;
    }
    return m;
}

/// {"meta": {...}, "rows": [{column: value, ...}, ...]}
inline nlohmann::ordered_json to_json(const Table &t) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit([&](const auto &v) { r[t.columns[i]] = v; }, row[i]);
        }
        rows.push_back(std::move(r));
    }
    return {{"meta", meta_json(t.meta)}, {"rows", std::move(rows)}};
}

inline void write_table(std::ostream &os, const Table &t, Format f) {
    if (f == Format::Json) {
        os << to_json(t).dump(2) << '\n';
    } else {
        write_csv(os, t);
    }
}

} // namespace ionsim::cli

#endif // IONSIM_CLI_TABLE_HPP
