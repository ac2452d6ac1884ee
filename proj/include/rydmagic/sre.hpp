#pragma once

#include <optional>
#include <string>

#include "rydmagic/hamiltonians.hpp"
#include "rydmagic/mps.hpp"
#include "rydmagic/tensor_core.hpp"

namespace rydmagic {

enum class SREMethod { direct, replica, pauli_basis, mixed };
std::string to_string(SREMethod m);

struct SRERequest {
    int n = 2;
    SREMethod method = SREMethod::replica;
    Index chi_p = 64;
    double tol = 1e-12;
    double truncation_budget = 1e-6;
};

struct SREResult {
    double m = 0;      // nats per site
    double M = 0;      // total, finite chains only
    int n_sites = 0;
    SREMethod method = SREMethod::direct;
    Status status = Status::ok;
    double lambda0 = 0;        // dominant replica eigenvalue per cell, after normalisation
    double discarded_weight = 0;
    int iterations = 0;
    std::string note;
    VectorXc replica_vector;  // filled on request, used to warm-start neighbouring points
};

constexpr int sre_direct_max_sites = 12;

// M = (1-n)^{-1} ln sum_P <P>^{2n} / 2^N over the full Pauli group.
SREResult sre_direct(const VectorXc& psi, int n = 2);
// psi given in a constrained basis; embedded into 2^N first.
SREResult sre_direct(const VectorXc& psi, const ConstrainedBasis& basis, int n = 2);
VectorXc embed(const VectorXc& psi, const ConstrainedBasis& basis);

struct ReplicaOptions {
    double tol = 1e-12;
    int max_iter = 5000;
    std::optional<VectorXc> start;
    bool keep_vector = false;
    Index replica_dim_cap = 10000;
};

SREResult sre_replica_density(const UnitCellMPS& mps, int n = 2, const ReplicaOptions& opt = {});
SREResult sre_finite_replica(const FiniteMPS& mps, int n = 2);
SREResult sre_pauli_basis(const FiniteMPS& mps, int n = 2, Index chi_p = 64, double tol = 1e-12,
                          double truncation_budget = 1e-6);
SREResult sre_finite(const FiniteMPS& mps, const SRERequest& req);

// -ln(sum tr(rho P)^4 / sum tr(rho P)^2) over all k-qubit Paulis (not divided by k).
double mixed_sre_total(const MatrixXc& rho);
// Two-qubit density matrix: mixed_sre_total / 2.
double sre_mixed(const MatrixXc& rho2);
double sre_mixed_1q(const MatrixXc& rho1);
// Checks Hermitian, unit trace, PSD within tol; throws otherwise.
void validate_density_matrix(const MatrixXc& rho, double tol = 1e-8);
// All 4^k Pauli expectations tr(rho P), index = sum code_j 4^{k-1-j}.
Eigen::VectorXd pauli_vector(const MatrixXc& rho);

struct LongRangeResult {
    double m_l = 0;
    double m = 0;  // unrotated value
    double gamma_o = 0, gamma_e = 0;
    bool converged = true;
    int evaluations = 0;
};

// Local rotation exp(i g Y) in the frame where the ansatz amplitudes are real.
Matrix2c long_range_rotation(double gamma);
LongRangeResult sre_long_range(const UnitCellMPS& mps, int n = 2, int grid = 32);

}  // namespace rydmagic
