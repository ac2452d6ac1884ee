#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rydmagic/tensor_core.hpp"

namespace rydmagic {

// Row-oriented table shared by every scan. status[i] is "ok" or the failure message of row i.
struct ScanResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> status;
    std::vector<std::pair<std::string, std::string>> meta;

    size_t size() const { return rows.size(); }
    size_t failures() const;
    int column_index(const std::string& name) const;  // -1 when absent
    Eigen::VectorXd column(const std::string& name) const;
    void add_row(std::vector<double> values, std::string row_status = "ok");
    // Rows of `other` appended; columns must match.
    void append(const ScanResult& other);
    void set_meta(const std::string& key, const std::string& value);

    // Header line, then one line per row; a trailing status column; NaN written as "nan".
    std::string to_csv(bool header = true) const;
    // {"meta": {...}, "columns": [...], "rows": [[...]], "status": [...]}
    std::string to_json() const;
};

struct GridAxis {
    double lo = -M_PI;
    double hi = M_PI;
    int n = 201;

    double at(int k) const { return n == 1 ? lo : lo + (hi - lo) * k / (n - 1); }
    void validate() const;
};

enum class ManifoldQuantity { m2, m2_long_range, m2_mixed, m2_unitary, rom };
std::string to_string(ManifoldQuantity q);
ManifoldQuantity manifold_quantity_from_string(const std::string& s);

struct ManifoldScanSpec {
    GridAxis theta_o, theta_e;
    std::vector<ManifoldQuantity> quantities{ManifoldQuantity::m2};
    int n = 2;
    int long_range_grid = 32;
    int threads = 1;
};

// Rows of the grid are theta_o values; each row is one task and warm-starts the replica
// eigensolver from its left neighbour. Columns: theta_o, theta_e, then one per quantity
// (rom is the log-free value ln(R + 1)). Failed points hold NaN and a status message.
ScanResult scan_manifold(const ManifoldScanSpec& spec, int row_begin = 0, int row_end = -1);

// Quantity grid as a theta_o x theta_e matrix (full scans only).
Eigen::MatrixXd scan_grid(const ScanResult& r, const std::string& quantity, int n_o, int n_e);

// Column indices of the local maxima of each row that reach rel_threshold times the row maximum.
// A plateau counts once (at its left end); NaN entries are skipped.
std::vector<std::vector<int>> row_local_maxima(const Eigen::MatrixXd& grid, double rel_threshold = 0.5);

}  // namespace rydmagic
