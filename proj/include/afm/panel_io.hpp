#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "afm/dgp.hpp"

namespace afm {

/// Panel CSV: header `t,series_1,...,series_n`, one row per period.
std::string panel_csv(const Eigen::MatrixXd& observations);

/// Throws ParseError naming the 1-based row and column of the first bad cell.
Eigen::MatrixXd parse_panel_csv(const std::string& text);
Eigen::MatrixXd read_panel_csv(const std::filesystem::path& path);

/// CSV with a leading 1-based index column and the given header.
std::string matrix_csv(const Eigen::MatrixXd& m, const std::string& index_name, const std::string& column_stem);

/// Known truth for a simulated panel, kept next to it for scoring.
struct PanelTruth {
    ModelConfig config;
    std::uint32_t replicate = 0;
    Eigen::MatrixXd factors;
    Eigen::MatrixXd loadings;
    Eigen::MatrixXd f_infinity;
    Eigen::MatrixXd p_lambda;
};

/// `<panel>.truth.json`.
std::filesystem::path truth_path_for(const std::filesystem::path& panel);

std::string truth_json(const PanelTruth& truth);
PanelTruth parse_truth_json(const std::string& text);
PanelTruth read_truth(const std::filesystem::path& path);

/// Whole file as a string; throws Error when unreadable.
std::string read_text(const std::filesystem::path& path);

}  // namespace afm
