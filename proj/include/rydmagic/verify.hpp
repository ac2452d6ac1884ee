#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rydmagic {

// One invariant suite: passed when max_error <= tolerance over all checks.
struct SuiteResult {
    std::string name;
    double tolerance = 0;
    double max_error = 0;
    int checks = 0;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    uint64_t seed = 1;
    // Added to the state under test in the cross-method and parent-Hamiltonian suites.
    double perturb = 0;
    int random_states = 20;
    int parent_thetas = 20;
    int clifford_circuits = 200;
};

// sre_direct, sre_finite_replica and untruncated sre_pauli_basis on random open MPS (N <= 10, chi <= 3).
SuiteResult suite_cross_method(int count, uint64_t seed, double perturb = 0);
// Null vector of rho_3, idempotency, annihilation of the N=10 ansatz, operator form and the H0 term at phi=0.
SuiteResult suite_parent_hamiltonian(int count, double perturb = 0);
// Closed-form single-site fixed points (L| = (1,0,0,1), |R) ~ (1,cs,cs,s^2) on a 50-point grid.
SuiteResult suite_fixed_points(int count = 50);
// 60 vertices: Pauli entries in {0, +-1}, zero SRE, zero RoM.
SuiteResult suite_stabilizer_vertices();
// Random H/S/CNOT circuits on random N <= 6 states leave sre_direct unchanged.
SuiteResult suite_clifford_invariance(int count, uint64_t seed);
// No weight on adjacent excitations for every constructed state (N <= 12).
SuiteResult suite_blockade();
// sum_P <P>^2 / 2^N = 1 for random pure states, N <= 8.
SuiteResult suite_purity_identity(uint64_t seed);

std::vector<SuiteResult> run_verify_suites(const VerifyOptions& opt);

}  // namespace rydmagic
