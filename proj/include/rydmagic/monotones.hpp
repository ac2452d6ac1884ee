#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rydmagic/hamiltonians.hpp"
#include "rydmagic/scan.hpp"
#include "rydmagic/tensor_core.hpp"

namespace rydmagic {

using Vector4c = Eigen::Matrix<cplx, 4, 1>;

struct StabilizerSet2Q {
    std::vector<Vector4c> states;  // first nonzero amplitude real positive
    Eigen::MatrixXd pauli_table;   // 16 x 60, A(4a+b, k) = <S_k| s^a (x) s^b |S_k>
};

// Closure of |00> under H, S on either qubit and CNOT in both directions.
StabilizerSet2Q enumerate_stabilizers_2q();
const StabilizerSet2Q& stabilizers_2q();  // computed once

struct LPResult {
    Eigen::VectorXd x;
    Eigen::VectorXd dual;  // y with A^T y <= c; b.y equals the optimum
    double objective = 0;
    int iterations = 0;
};

// min c.x subject to A x = b, x >= 0. Two-phase dense tableau simplex with Bland's rule.
// Throws std::runtime_error on infeasibility or unboundedness.
LPResult simplex_min(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c, double tol = 1e-10,
                     int max_iter = 100000);

struct RomResult {
    double R = 0;
    double log_free = 0;        // ln(R + 1)
    Eigen::VectorXd weights;    // signed weights on the 60 stabilizer states
    double dual_objective = 0;  // certificate: equals R + 1 at optimality
    double reconstruction_error = 0;
    int iterations = 0;
};

RomResult rom(const MatrixXc& rho2);

struct MCOptions {
    long n_samples = 300000;
    long burn_in = 10000;
    uint64_t seed = 1;
    int batches = 50;
};

struct MCEstimate {
    double mean = 0;     // m^(2) per site
    double stderr_ = 0;  // batch means propagated through the logarithm
    long n_samples = 0;
    long burn_in = 0;
    double acceptance_rate = 0;
    uint64_t seed = 0;
    double mean_p2 = 0;  // estimate of sum <P>^4 / 2^N
    double mean_p2_stderr = 0;
    int n_sites = 0;
    bool stalled = false;  // no move accepted
};

// Metropolis walk over Pauli strings with weight <P>^2 / 2^N; psi is a normalised 2^N vector.
MCEstimate mc_sre(const VectorXc& psi, int n_sites, const MCOptions& opt = {});
// Independent chains with seeds derived from opt.seed, merged by inverse-variance weighting.
MCEstimate mc_sre_parallel(const VectorXc& psi, int n_sites, const MCOptions& opt, int chains, int threads);
MCEstimate merge_estimates(const std::vector<MCEstimate>& parts);

struct ShotRecord {
    int n_shots = 0;
    Eigen::Matrix<double, 16, 1> estimates;  // index 4a + b
    Eigen::Matrix<double, 16, 1> errors;
    double m_estimate = 0;  // sre_mixed of the plug-in estimates
    double m_error = 0;     // first-order propagation
    double m_exact = 0;
};

ShotRecord shot_estimator(const MatrixXc& rho2, int n_shots, uint64_t seed);
// Two central sites of an n-site state (sites n/2 - 1 and n/2).
ShotRecord shot_estimator(const VectorXc& psi, int n_sites, int n_shots, uint64_t seed);
// Reduced density matrix of two adjacent sites (j, j+1) of a 2^n state.
MatrixXc two_site_rdm(const VectorXc& psi, int n_sites, int j);

struct EigenstateConfig {
    bool exact = true;  // sre_direct when N <= 12, otherwise MC
    MCOptions mc;
    int chains = 1;
    int threads = 1;
    double scar_window = 0.3;  // energy half-width for the local overlap maximum
    double scar_min_ratio = 5;  // overlap must exceed this multiple of 1/dim
    long first = 0, last = -1;  // eigenstate range to evaluate (resume support)
};

// Columns: index, energy, parity, overlap_z2, m2, m2_stderr, scar, degenerate.
ScanResult eigenstate_scan(const SparseHamiltonian& h, const ConstrainedBasis& basis, int parity_sector,
                           const EigenstateConfig& cfg);

// Scar flags from a Z2 overlap profile: local maximum within +-window in energy and above min_ratio / dim.
std::vector<bool> flag_scars(const Eigen::VectorXd& energies, const Eigen::VectorXd& overlaps, double window,
                             double min_ratio, Index dim);

}  // namespace rydmagic
