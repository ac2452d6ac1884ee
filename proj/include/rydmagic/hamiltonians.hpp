#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "rydmagic/mps.hpp"
#include "rydmagic/tensor_core.hpp"

namespace rydmagic {

using SparseMatrixXc = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

enum class BC { open, periodic };

// Bitstrings over n sites; site j is bit n-1-j.
struct ConstrainedBasis {
    int n_sites = 0;
    BC bc = BC::open;
    std::vector<uint32_t> states;  // ascending
    std::unordered_map<uint32_t, Index> index;

    Index dim() const { return static_cast<Index>(states.size()); }
    // -1 when the bitstring is not in the basis
    Index find(uint32_t s) const;
};

ConstrainedBasis fib_basis(int n_sites, BC bc);
bool is_blockaded(uint32_t s, int n_sites, BC bc);
uint32_t reflect_bits(uint32_t s, int n_sites);

// |0101...>: site 0 empty, site 1 excited, alternating.
uint32_t z2_bits(int n_sites);

struct SparseHamiltonian {
    SparseMatrixXc matrix;
    std::optional<int> parity;  // set when projected onto a reflection sector
    std::string label;

    Index dim() const { return matrix.rows(); }
    MatrixXc dense() const { return MatrixXc(matrix); }
    void apply(const VectorXc& in, VectorXc& out) const { out = matrix * in; }
};

SparseHamiltonian build_pxp(const ConstrainedBasis& basis, double omega = 1.0);
SparseHamiltonian build_h0(const ConstrainedBasis& basis, double z);

struct RydbergParams {
    double omega = 1.0;
    double delta = 0.0;
    double v = 1.0;
    double alpha = 6.0;
    int range_cutoff = 2;
    void validate() const;
};

// Full 2^n space, open boundaries.
SparseHamiltonian build_rydberg(int n_sites, const RydbergParams& p);

// Rydberg parameters on the H0 family: Omega = 2V / (2^alpha z), Delta = -(2V / 2^alpha)(3 - 1/z^2).
RydbergParams rydberg_point_for_z(double z, double v = 1.0);

// Finite-state-machine MPO. ops[a * dr + b] is the 2x2 operator on bond pair (a, b).
struct MPOTensor {
    Index dl = 0, dr = 0;
    std::vector<Matrix2c> ops;
    const Matrix2c& op(Index a, Index b) const { return ops[static_cast<size_t>(a * dr + b)]; }
    Matrix2c& op(Index a, Index b) { return ops[static_cast<size_t>(a * dr + b)]; }
};

struct MPO {
    std::vector<MPOTensor> tensors;
    int n_sites() const { return static_cast<int>(tensors.size()); }
    MatrixXc dense() const;
};

MPO rydberg_mpo(int n_sites, const RydbergParams& p);
// <psi|H|psi> / <psi|psi> for an open chain
double mpo_expectation(const MPO& h, const FiniteMPS& psi);

struct ParentProjector {
    double theta = 0, phi = 0, z = 0;
    Eigen::Matrix<cplx, 5, 5> blockaded;  // basis {000, 001, 010, 100, 101}
    Eigen::Matrix<cplx, 8, 8> matrix;
    Eigen::Matrix<cplx, 5, 1> null_vector;
};

// 3-site index (MSB first) of the blockaded basis element k
int blockaded3_index(int k);

ParentProjector parent_projector(double theta, double phi = 0.0);
// (z/(1+z^2)) P(z P + n/z + cos(phi) Y - sin(phi) X)P on three sites.
Eigen::Matrix<cplx, 8, 8> parent_operator_form(double theta, double phi = 0.0);

// Sum of the 3-site operator over the interior windows of an open chain, acting on a full 2^n vector.
VectorXc apply_three_site_sum(const Eigen::Matrix<cplx, 8, 8>& op, const VectorXc& psi, int n_sites);

struct Spectrum {
    Eigen::VectorXd energies;
    MatrixXc vectors;                // columns in the original basis
    std::vector<int> parity;         // per eigenvector; 0 when not resolved
    std::vector<bool> degenerate;    // member of a block with |dE| < 1e-10
};

constexpr Index ed_dim_cap = 4000;

// Reflection-symmetric sector isometry (columns orthonormal) on an open basis.
SparseMatrixXc parity_isometry(const ConstrainedBasis& basis, int sector);

Spectrum ed(const SparseHamiltonian& h, Index dim_cap = ed_dim_cap);
Spectrum ed(const SparseHamiltonian& h, const ConstrainedBasis& basis, int parity_sector, Index dim_cap = ed_dim_cap);

EigenPair ground_state(const SparseHamiltonian& h, double tol = 1e-10);

enum class Status { ok, warning };

struct DmrgOptions {
    Index chi = 16;
    int max_sweeps = 30;
    double tol = 1e-10;
    double svd_tol = 1e-12;
    uint64_t seed = 1;
};

struct DmrgResult {
    FiniteMPS mps;
    double energy = 0;
    std::vector<double> sweep_energies;
    double max_discarded = 0;
    Status status = Status::ok;
};

DmrgResult dmrg_ground_state(const MPO& h, const DmrgOptions& opt = {});

}  // namespace rydmagic
