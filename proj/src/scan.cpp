#include "rydmagic/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rydmagic/dynamics.hpp"
#include "rydmagic/monotones.hpp"
#include "rydmagic/mps.hpp"
#include "rydmagic/parallel.hpp"
#include "rydmagic/sre.hpp"

namespace rydmagic {

size_t ScanResult::failures() const
{
    size_t k = 0;
    for (const auto& s : status)
        k += s != "ok";
    return k;
}

int ScanResult::column_index(const std::string& name) const
{
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return static_cast<int>(i);
    return -1;
}

Eigen::VectorXd ScanResult::column(const std::string& name) const
{
    const int c = column_index(name);
    if (c < 0)
        throw std::out_of_range("ScanResult: no column " + name);
    Eigen::VectorXd v(static_cast<Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        v(static_cast<Index>(i)) = rows[i][static_cast<size_t>(c)];
    return v;
}

void ScanResult::add_row(std::vector<double> values, std::string row_status)
{
    if (values.size() != columns.size())
        throw std::invalid_argument("ScanResult::add_row: width differs from the column count");
    rows.push_back(std::move(values));
    status.push_back(std::move(row_status));
}

void ScanResult::append(const ScanResult& other)
{
    if (other.columns != columns)
        throw std::invalid_argument("ScanResult::append: column mismatch");
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    status.insert(status.end(), other.status.begin(), other.status.end());
}

void ScanResult::set_meta(const std::string& key, const std::string& value)
{
    for (auto& kv : meta)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    meta.emplace_back(key, value);
}

namespace {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// status strings may hold commas; keep the CSV single-field
std::string csv_field(const std::string& s)
{
    std::string out;
    for (char ch : s)
        out.push_back(ch == ',' || ch == '\n' ? ';' : ch);
    return out;
}

}  // namespace

std::string ScanResult::to_csv(bool header) const
{
    std::ostringstream os;
    if (header) {
        for (const auto& c : columns)
            os << c << ',';
        os << "status\n";
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        for (double v : rows[i])
            os << format_number(v) << ',';
        os << csv_field(status[i]) << '\n';
    }
    return os.str();
}

std::string ScanResult::to_json() const
{
    nlohmann::ordered_json j;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& kv : meta)
        m[kv.first] = kv.second;
    j["meta"] = m;
    j["columns"] = columns;
    nlohmann::ordered_json rs = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (double v : r)
            row.push_back(std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v));
        rs.push_back(row);
    }
    j["rows"] = rs;
    j["status"] = status;
    return j.dump(1);
}

void GridAxis::validate() const
{
    if (n < 1 || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("GridAxis: need n >= 1 and finite bounds");
    if (n > 1 && !(hi > lo))
        throw std::invalid_argument("GridAxis: empty range");
}

std::string to_string(ManifoldQuantity q)
{
    switch (q) {
    case ManifoldQuantity::m2: return "m2";
    case ManifoldQuantity::m2_long_range: return "m2_long_range";
    case ManifoldQuantity::m2_mixed: return "m2_mixed";
    case ManifoldQuantity::m2_unitary: return "m2_unitary";
    case ManifoldQuantity::rom: return "rom";
    }
    return "unknown";
}

ManifoldQuantity manifold_quantity_from_string(const std::string& s)
{
    for (auto q : {ManifoldQuantity::m2, ManifoldQuantity::m2_long_range, ManifoldQuantity::m2_mixed,
                   ManifoldQuantity::m2_unitary, ManifoldQuantity::rom})
        if (to_string(q) == s)
            return q;
    throw std::invalid_argument("unknown manifold quantity: " + s);
}

ScanResult scan_manifold(const ManifoldScanSpec& spec, int row_begin, int row_end)
{
    spec.theta_o.validate();
    spec.theta_e.validate();
    if (spec.quantities.empty())
        throw std::invalid_argument("scan_manifold: no quantities requested");
    if (row_end < 0)
        row_end = spec.theta_o.n;
    if (row_begin < 0 || row_begin > row_end || row_end > spec.theta_o.n)
        throw std::invalid_argument("scan_manifold: bad row range");

    ScanResult out;
    out.columns = {"theta_o", "theta_e"};
    for (auto q : spec.quantities)
        out.columns.push_back(to_string(q));

    const int n_rows = row_end - row_begin;
    const int n_e = spec.theta_e.n;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> values(static_cast<size_t>(n_rows) * static_cast<size_t>(n_e));
    std::vector<std::string> status(values.size(), "ok");

    parallel_for(n_rows, spec.threads, [&](long r) {
        const double to = spec.theta_o.at(row_begin + static_cast<int>(r));
        std::optional<VectorXc> warm;
        for (int c = 0; c < n_e; ++c) {
            const double te = spec.theta_e.at(c);
            const size_t slot = static_cast<size_t>(r) * static_cast<size_t>(n_e) + static_cast<size_t>(c);
            std::vector<double> row{to, te};
            std::string msg;
            const UnitCellMPS mps = pxp_ansatz(to, te);
            for (auto q : spec.quantities) {
                double v = nan;
                try {
                    switch (q) {
                    case ManifoldQuantity::m2: {
                        ReplicaOptions opt;
                        opt.start = warm;
                        opt.keep_vector = true;
                        auto res = sre_replica_density(mps, spec.n, opt);
                        v = res.m;
                        if (res.replica_vector.size() > 0)
                            warm = std::move(res.replica_vector);
                        break;
                    }
                    case ManifoldQuantity::m2_long_range: v = sre_long_range(mps, spec.n, spec.long_range_grid).m_l; break;
                    case ManifoldQuantity::m2_mixed: v = sre_mixed(rdm(mps, 2, 0)); break;
                    case ManifoldQuantity::m2_unitary: v = m_u_cell(to, te); break;
                    case ManifoldQuantity::rom: v = rom(rdm(mps, 2, 0)).log_free; break;
                    }
                } catch (const std::exception& e) {
                    if (q == ManifoldQuantity::m2)
                        warm.reset();
                    if (!msg.empty())
                        msg += "; ";
                    msg += to_string(q) + ": " + e.what();
                }
                row.push_back(v);
            }
            values[slot] = std::move(row);
            if (!msg.empty())
                status[slot] = msg;
        }
    });

    out.rows = std::move(values);
    out.status = std::move(status);
    return out;
}

Eigen::MatrixXd scan_grid(const ScanResult& r, const std::string& quantity, int n_o, int n_e)
{
    if (static_cast<long>(r.rows.size()) != static_cast<long>(n_o) * n_e)
        throw std::invalid_argument("scan_grid: row count does not match the grid");
    const Eigen::VectorXd v = r.column(quantity);
    Eigen::MatrixXd g(n_o, n_e);
    for (int i = 0; i < n_o; ++i)
        for (int j = 0; j < n_e; ++j)
            g(i, j) = v(static_cast<Index>(i) * n_e + j);
    return g;
}

std::vector<std::vector<int>> row_local_maxima(const Eigen::MatrixXd& grid, double rel_threshold)
{
    std::vector<std::vector<int>> out(static_cast<size_t>(grid.rows()));
    const Index n = grid.cols();
    for (Index i = 0; i < grid.rows(); ++i) {
        double top = -std::numeric_limits<double>::infinity();
        for (Index j = 0; j < n; ++j)
            if (std::isfinite(grid(i, j)))
                top = std::max(top, grid(i, j));
        for (Index j = 0; j < n; ++j) {
            const double v = grid(i, j);
            if (!std::isfinite(v) || v < rel_threshold * top)
                continue;
            const bool left_ok = j == 0 || !std::isfinite(grid(i, j - 1)) || v > grid(i, j - 1);
            Index k = j + 1;
            while (k < n && grid(i, k) == v)
                ++k;
            const bool right_ok = k == n || !std::isfinite(grid(i, k)) || v > grid(i, k);
            if (left_ok && right_ok)
                out[static_cast<size_t>(i)].push_back(static_cast<int>(j));
        }
    }
    return out;
}

}  // namespace rydmagic
