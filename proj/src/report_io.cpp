#include "afm/report_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "afm/error.hpp"

namespace afm {

std::string format_number(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path temporary = path;
    temporary += ".tmp";
    {
        std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + temporary.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw Error("write to " + temporary.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(temporary, path, ec);
    if (ec) {
        std::filesystem::remove(temporary, ec);
        throw Error("cannot move " + temporary.string() + " to " + path.string());
    }
}

namespace {

const MetricVerdict* find_verdict(const RateReport& report, const std::string& metric) {
    for (const auto& v : report.verdicts) {
        if (v.metric == metric) return &v;
    }
    return nullptr;
}

}  // namespace

std::string report_csv(const RateReport& report) {
    std::ostringstream out;
    out << "metric,n,T,replications,rms,mse,slope,stderr,verdict\n";
    for (const auto& row : report.rows) {
        const MetricVerdict* v = find_verdict(report, row.metric);
        out << row.metric << ',' << row.n << ',' << row.T << ',' << row.replications << ',' << format_number(row.rms)
            << ',' << format_number(row.mse) << ',';
        if (v != nullptr) {
            out << format_number(v->slope) << ',' << format_number(v->slope_stderr) << ',' << (v->pass ? "pass" : "fail");
        } else {
            out << "nan,nan,none";
        }
        out << '\n';
    }
    return out.str();
}

std::string plot_data(const RateReport& report) {
    std::ostringstream out;
    std::string current;
    for (const auto& row : report.rows) {
        const MetricVerdict* v = find_verdict(report, row.metric);
        const std::string axis = v != nullptr ? v->axis : "n";
        if (row.metric != current) {
            if (!current.empty()) out << "\n\n";
            current = row.metric;
            out << "# metric " << row.metric << " x=" << axis << '\n';
        }
        const Index x = axis == "T" ? row.T : row.n;
        out << x << ' ' << format_number(row.rms) << '\n';
    }
    if (!current.empty()) out << '\n';
    return out.str();
}

std::string verdict_summary(const RateReport& report) {
    std::ostringstream out;
    for (const auto& v : report.verdicts) {
        out << (v.pass ? "pass " : "FAIL ") << v.metric << ": " << v.detail << "  [" << v.rule << "]\n";
    }
    return out.str();
}

}  // namespace afm
