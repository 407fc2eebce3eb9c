#include "afm/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "afm/error.hpp"
#include "afm/panel_io.hpp"

namespace afm {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

struct Line {
    std::string source;
    std::size_t number;
    std::string key;

    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError(source + ":" + std::to_string(number) + ": " + key + ": " + message);
    }
};

double to_double(const std::string& text, const Line& line) {
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(value)) {
        line.fail("expected a number, got '" + text + "'");
    }
    return value;
}

long long to_integer(const std::string& text, const Line& line) {
    char* end = nullptr;
    errno = 0;
    const long long value = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || *end != '\0' || errno == ERANGE) line.fail("expected an integer, got '" + text + "'");
    return value;
}

std::uint64_t to_unsigned(const std::string& text, const Line& line) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long value = std::strtoull(text.c_str(), &end, 10);
    if (text.empty() || text[0] == '-' || *end != '\0' || errno == ERANGE) {
        line.fail("expected a nonnegative integer, got '" + text + "'");
    }
    return value;
}

Index to_positive(const std::string& text, const Line& line) {
    const long long value = to_integer(text, line);
    if (value < 1) line.fail("must be positive, got " + text);
    return static_cast<Index>(value);
}

bool to_bool(const std::string& text, const Line& line) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    line.fail("expected true or false, got '" + text + "'");
}

std::vector<std::string> to_list(const std::string& text) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) items.push_back(trim(item));
    return items;
}

std::vector<Index> to_index_list(const std::string& text, const Line& line) {
    std::vector<Index> values;
    for (const auto& item : to_list(text)) values.push_back(to_positive(item, line));
    if (values.empty()) line.fail("empty list");
    return values;
}

std::vector<double> to_double_list(const std::string& text, const Line& line) {
    std::vector<double> values;
    for (const auto& item : to_list(text)) values.push_back(to_double(item, line));
    if (values.empty()) line.fail("empty list");
    return values;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Line&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table{
        {"r", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.config.r = static_cast<int>(to_positive(v, l));
         }},
        {"n_max", [](RunConfig& c, const std::string& v, const Line& l) { c.settings.config.n_max = to_positive(v, l); }},
        {"loading_half_widths", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.config.loading_half_widths = to_double_list(v, l);
         }},
        {"loading_rotation", [](RunConfig& c, const std::string& v, const Line& l) {
             const auto values = to_double_list(v, l);
             const auto k = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(values.size()))));
             if (k * k != static_cast<Index>(values.size())) l.fail("needs r*r values in row-major order");
             Eigen::MatrixXd rotation(k, k);
             for (Index i = 0; i < k; ++i) {
                 for (Index j = 0; j < k; ++j) rotation(i, j) = values[static_cast<std::size_t>(i * k + j)];
             }
             c.settings.config.loading_rotation = rotation;
         }},
        {"idio_rho", [](RunConfig& c, const std::string& v, const Line& l) { c.settings.config.idio_rho = to_double(v, l); }},
        {"idio_sigma", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.config.idio_sigma = to_double(v, l);
         }},
        {"seed", [](RunConfig& c, const std::string& v, const Line& l) { c.settings.config.seed = to_unsigned(v, l); }},
        {"n", [](RunConfig& c, const std::string& v, const Line& l) { c.n = to_positive(v, l); }},
        {"T", [](RunConfig& c, const std::string& v, const Line& l) { c.T = to_positive(v, l); }},
        {"factors", [](RunConfig& c, const std::string& v, const Line& l) {
             c.factors = static_cast<int>(to_positive(v, l));
         }},
        {"out", [](RunConfig& c, const std::string& v, const Line& l) {
             if (v.empty()) l.fail("empty path");
             c.out = v;
         }},
        {"demean", [](RunConfig& c, const std::string& v, const Line& l) { c.demean = to_bool(v, l); }},
        {"metrics", [](RunConfig& c, const std::string& v, const Line& l) {
             c.metrics = to_list(v);
             const auto& stems = metric_stems();
             for (const auto& m : c.metrics) {
                 const bool known = std::any_of(stems.begin(), stems.end(), [&](const std::string& s) {
                     return !m.empty() && (s.rfind(m, 0) == 0 || m.rfind(s, 0) == 0);
                 });
                 if (!known) l.fail("unknown metric '" + m + "'");
             }
         }},
        {"n_values", [](RunConfig& c, const std::string& v, const Line& l) { c.settings.n_values = to_index_list(v, l); }},
        {"replications", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.replications = static_cast<int>(to_positive(v, l));
         }},
        {"redraw_loadings", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.redraw_loadings = to_bool(v, l);
         }},
        {"theorem1_t", [](RunConfig& c, const std::string& v, const Line& l) { c.settings.theorem1_t = to_positive(v, l); }},
        {"unit_indices", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.unit_indices = to_index_list(v, l);
         }},
        {"fixed_t", [](RunConfig& c, const std::string& v, const Line& l) { c.settings.fixed_t = to_positive(v, l); }},
        {"fixed_t_replications", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.fixed_t_replications = static_cast<int>(to_positive(v, l));
         }},
        {"floor_t", [](RunConfig& c, const std::string& v, const Line& l) { c.settings.floor_t = to_positive(v, l); }},
        {"floor_n_values", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.floor_n_values = to_index_list(v, l);
         }},
        {"fixed_n", [](RunConfig& c, const std::string& v, const Line& l) { c.settings.fixed_n = to_positive(v, l); }},
        {"fixed_n_t_values", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.fixed_n_t_values = to_index_list(v, l);
         }},
        {"lemma2_n_values", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.lemma2_n_values = to_index_list(v, l);
         }},
        {"lemma2_t_values", [](RunConfig& c, const std::string& v, const Line& l) {
             c.settings.lemma2_t_values = to_index_list(v, l);
         }},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> names;
        for (const auto& [name, setter] : setters()) names.push_back(name);
        return names;
    }();
    return keys;
}

const std::vector<std::string>& metric_stems() {
    static const std::vector<std::string> stems{
        "lemma1.weyl_gap",          "lemma1.eigvec_gap_sqrt_n", "lemma1.eigval_over_n_error",
        "lemma1.scaled_eigval_diff", "theorem1.npc_y",           "theorem1.npc_c",
        "theorem2.loading_y",       "theorem2.loading_c",       "theorem2.gram_gap",
        "theorem3.coupled",         "theorem3.fixed_t_floor",   "theorem3.fixed_n",
        "theorem3.factor_space_fixed_t", "lemma2.eigvec",       "lemma2.eigval_over_n",
        "lemma2.coef_row_sqrt_n",   "lemma2.coef_row_level_ratio"};
    return stems;
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
    RunConfig config;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const auto hash = raw.find('#');
        const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        Line line{source, number, trim(content.substr(0, eq == std::string::npos ? content.size() : eq))};
        if (eq == std::string::npos) line.fail("expected key = value");
        if (line.key.empty()) line.fail("empty key");
        const auto& table = setters();
        const auto found = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == line.key; });
        if (found == table.end()) line.fail("unknown key");
        if (!seen.insert(line.key).second) line.fail("duplicate key");
        found->second(config, trim(content.substr(eq + 1)), line);
    }
    // Cross-field checks (e.g. r against the widths list) run once all keys are in.
    try {
        config.settings.config.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_text(path), path.string());
}

RateReport select_metrics(const RateReport& report, const std::vector<std::string>& prefixes) {
    if (prefixes.empty()) return report;
    auto keep = [&](const std::string& metric) {
        return std::any_of(prefixes.begin(), prefixes.end(),
                           [&](const std::string& p) { return metric.rfind(p, 0) == 0; });
    };
    RateReport selected;
    selected.suite = report.suite;
    for (const auto& row : report.rows) {
        if (keep(row.metric)) selected.rows.push_back(row);
    }
    for (const auto& v : report.verdicts) {
        if (keep(v.metric)) selected.verdicts.push_back(v);
    }
    return selected;
}

}  // namespace afm
