#pragma once

// Tabular report model with deterministic CSV and JSON emission. Every
// report carries the effective run configuration; identical inputs and
// configuration produce byte-identical output.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mtaudit {

// monostate renders as an empty CSV cell / JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Report {
    std::vector<std::pair<std::string, std::string>> config;  // ordered key/value
    std::vector<Table> tables;
};

// Shortest decimal representation that round-trips, matching the JSON
// emission so CSV and JSON carry identical values.
std::string format_number(double v);

// Leading "# key=value" comment lines, then one CSV block per table.
// Multi-table reports separate blocks with "## <name>" headers.
std::string to_csv(const Report& r);

// {"config": {...}, "tables": [{"name", "columns", "rows"}, ...]},
// insertion-ordered keys, 2-space indent, trailing newline.
std::string to_json(const Report& r);

}  // namespace mtaudit
