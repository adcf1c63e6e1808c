#ifndef SANTALO_REPORT_IO_HPP
#define SANTALO_REPORT_IO_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "santalo/counterexample.hpp"
#include "santalo/report.hpp"

namespace santalo {

/*
 * Serialization of check reports and sweep rows.  CSV is the primary format
 * (one fixed column order, quoted fields where needed, full double
 * precision so files round trip bit for bit); JSON mirrors the same fields.
 */

inline const char* report_csv_header() {
    return "id,n,subject,params,lhs,rhs,margin,rel_margin,tol,pass,grid,seed,millis";
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace detail {

inline std::string full_precision(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/* One CSV record honoring quotes; embedded newlines are not supported. */
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

}  // namespace detail

inline std::string report_csv_row(const InequalityReport& r) {
    std::ostringstream os;
    os << csv_escape(r.id) << ',' << r.n << ',' << csv_escape(r.subject) << ','
       << csv_escape(r.params) << ',' << detail::full_precision(r.lhs) << ','
       << detail::full_precision(r.rhs) << ',' << detail::full_precision(r.margin) << ','
       << detail::full_precision(r.rel_margin) << ',' << detail::full_precision(r.tol) << ','
       << (r.pass ? "true" : "false") << ',' << csv_escape(r.grid) << ',' << r.seed << ','
       << r.millis;
    return os.str();
}

inline void write_reports_csv(std::ostream& os, std::span<const InequalityReport> reports) {
    os << report_csv_header() << '\n';
    for (const InequalityReport& r : reports) os << report_csv_row(r) << '\n';
}

inline void write_reports_csv(const std::filesystem::path& path,
                              std::span<const InequalityReport> reports) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_reports_csv(os, reports);
}

inline std::vector<InequalityReport> read_reports_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open report file: " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty report file: " + path.string());
    std::vector<InequalityReport> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 13)
            throw std::runtime_error("malformed report row in " + path.string() + ": " + line);
        InequalityReport r;
        r.id = f[0];
        r.n = std::stoi(f[1]);
        r.subject = f[2];
        r.params = f[3];
        r.lhs = std::stod(f[4]);
        r.rhs = std::stod(f[5]);
        r.margin = std::stod(f[6]);
        r.rel_margin = std::stod(f[7]);
        r.tol = std::stod(f[8]);
        r.pass = f[9] == "true";
        r.grid = f[10];
        r.seed = std::stoull(f[11]);
        r.millis = std::stol(f[12]);
        out.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::json report_to_json(const InequalityReport& r) {
    return nlohmann::json{{"id", r.id},
                          {"n", r.n},
                          {"subject", r.subject},
                          {"params", r.params},
                          {"lhs", r.lhs},
                          {"rhs", r.rhs},
                          {"margin", r.margin},
                          {"rel_margin", r.rel_margin},
                          {"tol", r.tol},
                          {"pass", r.pass},
                          {"grid", r.grid},
                          {"seed", r.seed},
                          {"millis", r.millis}};
}

inline void write_reports_json(const std::filesystem::path& path,
                               std::span<const InequalityReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const InequalityReport& r : reports) arr.push_back(report_to_json(r));
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << arr.dump(2) << '\n';
}

inline const char* divergence_csv_header() { return "n,c,closed_form,pipeline,ratio"; }

inline void write_divergence_csv(std::ostream& os, std::span<const DivergenceRow> rows) {
    os << divergence_csv_header() << '\n';
    for (const DivergenceRow& r : rows)
        os << r.n << ',' << detail::full_precision(r.c) << ','
           << detail::full_precision(r.closed_form) << ',' << detail::full_precision(r.pipeline)
           << ',' << detail::full_precision(r.ratio) << '\n';
}

inline void write_divergence_csv(const std::filesystem::path& path,
                                 std::span<const DivergenceRow> rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_divergence_csv(os, rows);
}

/* Whitespace-separated columns with a comment header, ready for gnuplot. */
inline void write_divergence_plot(const std::filesystem::path& path,
                                  std::span<const DivergenceRow> rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << "# c closed_form pipeline ratio\n";
    for (const DivergenceRow& r : rows)
        os << detail::full_precision(r.c) << ' ' << detail::full_precision(r.closed_form) << ' '
           << detail::full_precision(r.pipeline) << ' ' << detail::full_precision(r.ratio) << '\n';
}

/* FNV-1a fingerprint of a file's bytes, as fixed-width hex. */
inline std::string file_content_hash(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for hashing: " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char c;
    while (is.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

struct IdSummary {
    std::string id;
    int count = 0;
    int passed = 0;
    double worst_rel_margin = 0.0;
    std::string worst_subject;
};

/* Per-id pass counts and the most negative relative margin seen. */
inline std::vector<IdSummary> summarize_reports(std::span<const InequalityReport> reports) {
    std::map<std::string, IdSummary> by_id;
    for (const InequalityReport& r : reports) {
        auto [it, fresh] = by_id.try_emplace(r.id);
        IdSummary& s = it->second;
        if (fresh) {
            s.id = r.id;
            s.worst_rel_margin = r.rel_margin;
            s.worst_subject = r.subject;
        } else if (r.rel_margin < s.worst_rel_margin) {
            s.worst_rel_margin = r.rel_margin;
            s.worst_subject = r.subject;
        }
        ++s.count;
        if (r.pass) ++s.passed;
    }
    std::vector<IdSummary> out;
    out.reserve(by_id.size());
    for (auto& [_, s] : by_id) out.push_back(std::move(s));
    return out;
}

inline nlohmann::json summary_to_json(std::span<const IdSummary> summary) {
    nlohmann::json arr = nlohmann::json::array();
    for (const IdSummary& s : summary)
        arr.push_back(nlohmann::json{{"id", s.id},
                                     {"count", s.count},
                                     {"passed", s.passed},
                                     {"worst_rel_margin", s.worst_rel_margin},
                                     {"worst_subject", s.worst_subject}});
    return arr;
}

}  // namespace santalo

#endif
