#include "svev/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "svev/errors.hpp"

namespace svev::io {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

// nlohmann prints shortest round-trip floats; numbers here always get %.17g.
void emit(std::ostream& os, const json& j, int indent, int depth) {
    const std::string pad(std::size_t(indent * (depth + 1)), ' ');
    const std::string close(std::size_t(indent * depth), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) { os << "{}"; return; }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << json(it.key()).dump() << ": ";
                emit(os, it.value(), indent, depth + 1);
            }
            os << "\n" << close << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) { os << "[]"; return; }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                emit(os, j[i], indent, depth + 1);
            }
            os << "\n" << close << "]";
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (std::isfinite(x)) os << format_double(x);
            else os << json(format_double(x)).dump();  // JSON has no inf/nan literals
            return;
        }
        default: os << j.dump();
    }
}

double number_of(const json& j) {
    if (j.is_string()) return parse_double(j.get<std::string>());
    if (j.is_number()) return j.get<double>();
    throw ConfigError("expected a number in JSON");
}

}  // namespace

void write_spectra_csv(std::ostream& os, const std::vector<SpectralRecord>& records) {
    os << "sample_id,kind,index,re,im\n";
    for (const auto& r : records) {
        for (std::size_t i = 0; i < r.ev.values.size(); ++i)
            os << r.id << ",ev," << i << ',' << format_double(r.ev.values[i].real()) << ','
               << format_double(r.ev.values[i].imag()) << '\n';
        for (std::size_t i = 0; i < r.sv.values.size(); ++i)
            os << r.id << ",sv," << i << ',' << format_double(r.sv.values[i].real()) << ",0\n";
    }
}

std::vector<SpectralRecord> read_spectra_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || strip_cr(line) != "sample_id,kind,index,re,im")
        throw ConfigError("spectra CSV: bad header");
    std::vector<SpectralRecord> out;
    while (std::getline(is, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 5) throw ConfigError("spectra CSV: expected 5 fields in '" + line + "'");
        const long id = std::stol(f[0]);
        if (out.empty() || out.back().id != id) {
            SpectralRecord r;
            r.id = id;
            r.ev.kind = SpectrumKind::Eigenvalues;
            r.sv.kind = SpectrumKind::SquaredSingularValues;
            out.push_back(std::move(r));
        }
        const cplx v(parse_double(f[3]), parse_double(f[4]));
        if (f[1] == "ev") out.back().ev.values.push_back(v);
        else if (f[1] == "sv") out.back().sv.values.push_back(v);
        else throw ConfigError("spectra CSV: unknown kind '" + f[1] + "'");
    }
    return out;
}

void write_table_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size()) throw std::logic_error("table row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

Table read_table_csv(std::istream& is) {
    Table t;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("CSV: empty input");
    t.header = split(strip_cr(line));
    while (std::getline(is, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != t.header.size()) throw ConfigError("CSV: row width differs from header");
        std::vector<double> row;
        for (const auto& s : f) row.push_back(parse_double(s));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_report_json(std::ostream& os, const Report& r) {
    json root = json::object();
    root["suite"] = r.suite;
    root["pass"] = r.pass;
    json list = json::array();
    for (const auto& e : r.entries) {
        json j = json::object();
        j["test"] = e.test;
        j["family"] = e.family;
        json p = json::object();
        for (const auto& [k, v] : e.params) p[k] = v;
        j["params"] = p;
        j["n"] = e.n;
        j["count"] = e.count;
        j["statistic"] = e.statistic;
        j["critical"] = e.critical;
        j["p_boot"] = e.p_boot;
        j["pass"] = e.pass;
        j["seed"] = e.seed;
        j["runtime_s"] = e.runtime_s;
        if (!e.note.empty()) j["note"] = e.note;
        list.push_back(std::move(j));
    }
    root["results"] = list;
    emit(os, root, 2, 0);
    os << '\n';
}

Report read_report_json(std::istream& is) {
    json root;
    try {
        root = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report JSON: ") + e.what());
    }
    Report r;
    r.suite = root.at("suite").get<std::string>();
    r.pass = root.at("pass").get<bool>();
    for (const auto& j : root.at("results")) {
        ReportEntry e;
        e.test = j.at("test").get<std::string>();
        e.family = j.at("family").get<std::string>();
        for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it) e.params[it.key()] = number_of(*it);
        e.n = j.at("n").get<int>();
        e.count = j.at("count").get<long>();
        e.statistic = number_of(j.at("statistic"));
        e.critical = number_of(j.at("critical"));
        e.p_boot = number_of(j.at("p_boot"));
        e.pass = j.at("pass").get<bool>();
        e.seed = j.at("seed").get<std::uint64_t>();
        e.runtime_s = number_of(j.at("runtime_s"));
        if (j.contains("note")) e.note = j.at("note").get<std::string>();
        r.entries.push_back(std::move(e));
    }
    return r;
}

void write_values_json(std::ostream& os, const std::map<std::string, double>& values) {
    json j = json::object();
    for (const auto& [k, v] : values) j[k] = v;
    emit(os, j, 2, 0);
    os << '\n';
}

std::map<std::string, double> read_values_json(std::istream& is) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("values JSON: ") + e.what());
    }
    std::map<std::string, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = number_of(*it);
    return out;
}

}  // namespace svev::io
