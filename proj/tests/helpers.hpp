#pragma once

#include <cmath>
#include <random>

#include "rydmagic/tensor_core.hpp"

namespace testing_util {

using namespace rydmagic;

inline MatrixXc random_matrix(Index rows, Index cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    MatrixXc m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline VectorXc random_state(int n_sites, std::mt19937_64& rng)
{
    return random_matrix(Index{1} << n_sites, 1, rng).col(0).normalized();
}

// Brute-force SRE: every Pauli string as a dense matrix.
inline double brute_sre_total(const VectorXc& psi, int n_sites, int n = 2)
{
    const Matrix2c paulis[4] = {pauli_matrices::id(), pauli_matrices::x(), pauli_matrices::y(), pauli_matrices::z()};
    const long total = 1L << (2 * n_sites);
    double sum = 0;
    for (long code = 0; code < total; ++code) {
        MatrixXc p = MatrixXc::Identity(1, 1);
        for (int j = 0; j < n_sites; ++j)
            p = kron(p, paulis[(code >> (2 * (n_sites - 1 - j))) & 3]);
        sum += std::pow(std::norm(psi.dot(p * psi)), n);
    }
    return std::log(sum / std::ldexp(1.0, n_sites)) / (1 - n);
}

}  // namespace testing_util
