#include "mtaudit/report.hpp"

#include <sstream>

#include "json.hpp"

namespace mtaudit {

namespace {

// Quotes a CSV field only when it needs it; embedded quotes are doubled.
std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string cell_to_csv(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return "";
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return csv_escape(std::get<std::string>(c));
}

nlohmann::ordered_json cell_to_json(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return nullptr;
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    return std::get<std::string>(c);
}

}  // namespace

std::string format_number(double v) {
    // nlohmann emits the shortest decimal form that parses back to the same
    // double (and "null" for non-finite values), keeping CSV and JSON output
    // value-identical.
    return nlohmann::json(v).dump();
}

std::string to_csv(const Report& r) {
    std::ostringstream out;
    for (const auto& [k, v] : r.config) out << "# " << k << "=" << v << "\n";
    bool first = true;
    for (const auto& t : r.tables) {
        if (!first) out << "\n";
        first = false;
        if (r.tables.size() > 1) out << "## " << t.name << "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            if (i) out << ",";
            out << csv_escape(t.columns[i]);
        }
        out << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ",";
                out << cell_to_csv(row[i]);
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string to_json(const Report& r) {
    nlohmann::ordered_json root;
    auto& config = root["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.config) config[k] = v;
    auto& tables = root["tables"] = nlohmann::ordered_json::array();
    for (const auto& t : r.tables) {
        nlohmann::ordered_json jt;
        jt["name"] = t.name;
        jt["columns"] = t.columns;
        auto& rows = jt["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            nlohmann::ordered_json jr = nlohmann::ordered_json::array();
            for (const auto& cell : row) jr.push_back(cell_to_json(cell));
            rows.push_back(std::move(jr));
        }
        tables.push_back(std::move(jt));
    }
    return root.dump(2) + "\n";
}

}  // namespace mtaudit
