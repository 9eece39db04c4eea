#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "svev/mc.hpp"

namespace svev::io {

// 17 significant digits, enough to recover every double exactly.
std::string format_double(double x);

// spectra.csv: sample_id,kind,index,re,im  (kind ev|sv, sv rows carry im = 0)
void write_spectra_csv(std::ostream& os, const std::vector<SpectralRecord>& records);
std::vector<SpectralRecord> read_spectra_csv(std::istream& is);

// Plain numeric table with a header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
void write_table_csv(std::ostream& os, const Table& t);
Table read_table_csv(std::istream& is);

// One line of report.json.
struct ReportEntry {
    std::string test;
    std::string family;
    std::map<std::string, double> params;
    int n = 0;
    long count = 0;
    double statistic = 0.0;
    double critical = 0.0;
    double p_boot = 1.0;
    bool pass = false;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
    std::string note;  // optional free text (what was compared, failure reason)
};

struct Report {
    std::string suite;
    bool pass = false;
    std::vector<ReportEntry> entries;
};

void write_report_json(std::ostream& os, const Report& r);
Report read_report_json(std::istream& is);

// Flat key/value JSON object (transform and deform outputs).
void write_values_json(std::ostream& os, const std::map<std::string, double>& values);
std::map<std::string, double> read_values_json(std::istream& is);

}  // namespace svev::io
