#include "afm/panel_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "afm/error.hpp"
#include "afm/report_io.hpp"

namespace afm {

using Eigen::MatrixXd;

std::string panel_csv(const MatrixXd& observations) {
    std::string out = "t";
    for (Index i = 0; i < observations.cols(); ++i) out += ",series_" + std::to_string(i + 1);
    out += '\n';
    for (Index t = 0; t < observations.rows(); ++t) {
        out += std::to_string(t + 1);
        for (Index i = 0; i < observations.cols(); ++i) {
            out += ',';
            out += format_number(observations(t, i));
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t column) {
    const char* begin = cell.c_str();
    while (*begin == ' ' || *begin == '\t') ++begin;
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    while (end != nullptr && (*end == ' ' || *end == '\t')) ++end;
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(value)) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(column) +
                             ": not a finite number: '" + cell + "'",
                         row, column);
    }
    return value;
}

}  // namespace

MatrixXd parse_panel_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t row = 1;
    if (!std::getline(in, line)) throw ParseError("empty panel file", 1, 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_cells(line);
    if (header.size() < 2 || header[0] != "t") {
        throw ParseError("row 1: header must be t,series_1,...,series_n", 1, 1);
    }
    const std::size_t width = header.size();
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_cells(line);
        if (cells.size() != width) {
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(width) + " cells, found " +
                                 std::to_string(cells.size()),
                             row, std::min(cells.size(), width) + 1);
        }
        std::vector<double> values(width - 1);
        parse_cell(cells[0], row, 1);
        for (std::size_t c = 1; c < width; ++c) values[c - 1] = parse_cell(cells[c], row, c + 1);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ParseError("panel has no data rows", 2, 0);
    MatrixXd panel(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t c = 0; c + 1 < width; ++c) panel(static_cast<Index>(t), static_cast<Index>(c)) = rows[t][c];
    }
    return panel;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

MatrixXd read_panel_csv(const std::filesystem::path& path) {
    return parse_panel_csv(read_text(path));
}

std::string matrix_csv(const MatrixXd& m, const std::string& index_name, const std::string& column_stem) {
    std::string out = index_name;
    for (Index j = 0; j < m.cols(); ++j) out += "," + column_stem + "_" + std::to_string(j + 1);
    out += '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        out += std::to_string(i + 1);
        for (Index j = 0; j < m.cols(); ++j) {
            out += ',';
            out += format_number(m(i, j));
        }
        out += '\n';
    }
    return out;
}

std::filesystem::path truth_path_for(const std::filesystem::path& panel) {
    std::filesystem::path path = panel;
    path += ".truth.json";
    return path;
}

namespace {

nlohmann::json to_json(const MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd matrix_from_json(const nlohmann::json& rows, const char* name) {
    if (!rows.is_array()) throw ParseError(std::string("truth field '") + name + "' is not an array");
    const auto n_rows = static_cast<Index>(rows.size());
    const Index n_cols = n_rows == 0 ? 0 : static_cast<Index>(rows[0].size());
    MatrixXd m(n_rows, n_cols);
    for (Index i = 0; i < n_rows; ++i) {
        if (static_cast<Index>(rows[i].size()) != n_cols) {
            throw ParseError(std::string("truth field '") + name + "' is ragged", static_cast<std::size_t>(i + 1));
        }
        for (Index j = 0; j < n_cols; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

}  // namespace

std::string truth_json(const PanelTruth& truth) {
    nlohmann::json doc;
    doc["config"] = {{"r", truth.config.r},
                     {"n_max", truth.config.n_max},
                     {"loading_half_widths", truth.config.loading_half_widths},
                     {"idio_rho", truth.config.idio_rho},
                     {"idio_sigma", truth.config.idio_sigma},
                     {"seed", truth.config.seed},
                     {"loading_rotation", to_json(truth.config.loading_rotation)}};
    doc["replicate"] = truth.replicate;
    doc["factors"] = to_json(truth.factors);
    doc["loadings"] = to_json(truth.loadings);
    doc["f_infinity"] = to_json(truth.f_infinity);
    doc["p_lambda"] = to_json(truth.p_lambda);
    return doc.dump(1) + "\n";
}

PanelTruth parse_truth_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        PanelTruth truth;
        const auto& config = doc.at("config");
        truth.config.r = config.at("r").get<int>();
        truth.config.n_max = config.at("n_max").get<Index>();
        truth.config.loading_half_widths = config.at("loading_half_widths").get<std::vector<double>>();
        truth.config.idio_rho = config.at("idio_rho").get<double>();
        truth.config.idio_sigma = config.at("idio_sigma").get<double>();
        truth.config.seed = config.at("seed").get<std::uint64_t>();
        truth.config.loading_rotation = matrix_from_json(config.at("loading_rotation"), "loading_rotation");
        truth.replicate = doc.at("replicate").get<std::uint32_t>();
        truth.factors = matrix_from_json(doc.at("factors"), "factors");
        truth.loadings = matrix_from_json(doc.at("loadings"), "loadings");
        truth.f_infinity = matrix_from_json(doc.at("f_infinity"), "f_infinity");
        truth.p_lambda = matrix_from_json(doc.at("p_lambda"), "p_lambda");
        return truth;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed truth file: ") + e.what());
    }
}

PanelTruth read_truth(const std::filesystem::path& path) {
    return parse_truth_json(read_text(path));
}

}  // namespace afm
