#include "rydmagic/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace rydmagic {

std::string PauliString::str() const
{
    static const char names[4] = {'I', 'X', 'Y', 'Z'};
    std::string s;
    for (auto c : codes)
        s.push_back(names[c]);
    return s;
}

PauliString PauliString::parse(const std::string& s)
{
    PauliString p;
    for (char ch : s) {
        switch (ch) {
        case 'I': p.codes.push_back(0); break;
        case 'X': p.codes.push_back(1); break;
        case 'Y': p.codes.push_back(2); break;
        case 'Z': p.codes.push_back(3); break;
        default: throw std::invalid_argument("PauliString::parse: bad character");
        }
    }
    return p;
}

PauliMasks to_masks(const PauliString& p)
{
    const int n = p.size();
    if (n > 64)
        throw std::invalid_argument("to_masks: more than 64 sites");
    PauliMasks m;
    for (int j = 0; j < n; ++j) {
        const uint64_t bit = uint64_t{1} << (n - 1 - j);
        const auto c = p.codes[static_cast<size_t>(j)];
        if (c > 3)
            throw std::out_of_range("to_masks: code out of range");
        if (c == 1 || c == 2)
            m.x |= bit;
        if (c == 2 || c == 3)
            m.z |= bit;
    }
    return m;
}

PauliString from_masks(PauliMasks m, int n_sites)
{
    PauliString p;
    p.codes.resize(static_cast<size_t>(n_sites));
    for (int j = 0; j < n_sites; ++j) {
        const int xb = static_cast<int>((m.x >> (n_sites - 1 - j)) & 1u);
        const int zb = static_cast<int>((m.z >> (n_sites - 1 - j)) & 1u);
        p.codes[static_cast<size_t>(j)] = static_cast<uint8_t>(xb ? (zb ? 2 : 1) : (zb ? 3 : 0));
    }
    return p;
}

namespace {

cplx i_power(int k)
{
    switch (k & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
    }
}

}  // namespace

cplx pauli_expectation(const VectorXc& psi, PauliMasks m)
{
    cplx acc = 0.0;
    const auto dim = static_cast<uint64_t>(psi.size());
    for (uint64_t b = 0; b < dim; ++b) {
        const cplx term = std::conj(psi(static_cast<Index>(b ^ m.x))) * psi(static_cast<Index>(b));
        acc += (std::popcount(b & m.z) & 1) ? -term : term;
    }
    return i_power(std::popcount(m.x & m.z)) * acc;
}

cplx pauli_expectation(const VectorXc& psi, PauliMasks m, const std::vector<uint64_t>& support)
{
    cplx acc = 0.0;
    for (uint64_t b : support) {
        const cplx term = std::conj(psi(static_cast<Index>(b ^ m.x))) * psi(static_cast<Index>(b));
        acc += (std::popcount(b & m.z) & 1) ? -term : term;
    }
    return i_power(std::popcount(m.x & m.z)) * acc;
}

MatrixXc pauli_matrix(const PauliString& p)
{
    MatrixXc m = MatrixXc::Ones(1, 1);
    for (auto c : p.codes)
        m = kron(m, pauli_matrices::by_code(c));
    return m;
}

void fwht(std::vector<cplx>& a)
{
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fwht: length must be a power of two");
    for (size_t h = 1; h < n; h <<= 1)
        for (size_t i = 0; i < n; i += h << 1)
            for (size_t j = i; j < i + h; ++j) {
                const cplx u = a[j], v = a[j + h];
                a[j] = u + v;
                a[j + h] = u - v;
            }
}

}  // namespace rydmagic
