#include "rydmagic/mps.hpp"

#include <json.hpp>

namespace rydmagic {

using nlohmann::json;

std::string mps_to_json(const UnitCellMPS& mps)
{
    mps.validate();
    json j;
    j["cell_size"] = mps.cell_size();
    j["chi"] = mps.max_chi();
    json tensors = json::array();
    for (const auto& site : mps.tensors) {
        json pair = json::array();
        for (const auto& m : site) {
            json rows = json::array();
            for (Index r = 0; r < m.rows(); ++r) {
                json row = json::array();
                for (Index c = 0; c < m.cols(); ++c)
                    row.push_back({m(r, c).real(), m(r, c).imag()});
                rows.push_back(row);
            }
            pair.push_back(rows);
        }
        tensors.push_back(pair);
    }
    j["tensors"] = tensors;
    return j.dump(2);
}

UnitCellMPS mps_from_json(const std::string& text)
{
    const json j = json::parse(text);
    const int cell = j.at("cell_size").get<int>();
    const auto& tensors = j.at("tensors");
    if (!tensors.is_array() || static_cast<int>(tensors.size()) != cell)
        throw std::invalid_argument("mps_from_json: tensors length differs from cell_size");
    UnitCellMPS mps;
    for (const auto& site : tensors) {
        if (site.size() != 2)
            throw std::invalid_argument("mps_from_json: each site needs A^0 and A^1");
        SiteTensor t;
        for (size_t s = 0; s < 2; ++s) {
            const auto& rows = site[s];
            const auto nr = static_cast<Index>(rows.size());
            const auto nc = nr > 0 ? static_cast<Index>(rows[0].size()) : 0;
            t[s].resize(nr, nc);
            for (Index r = 0; r < nr; ++r) {
                if (static_cast<Index>(rows[static_cast<size_t>(r)].size()) != nc)
                    throw std::invalid_argument("mps_from_json: ragged matrix");
                for (Index c = 0; c < nc; ++c) {
                    const auto& e = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
                    t[s](r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
                }
            }
        }
        mps.tensors.push_back(t);
    }
    mps.validate();
    return mps;
}

}  // namespace rydmagic
