#include "rydmagic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "rydmagic/dynamics.hpp"
#include "rydmagic/hamiltonians.hpp"
#include "rydmagic/monotones.hpp"
#include "rydmagic/mps.hpp"
#include "rydmagic/pauli.hpp"
#include "rydmagic/sre.hpp"

namespace rydmagic {

namespace {

SuiteResult start(const std::string& name, double tol)
{
    SuiteResult r;
    r.name = name;
    r.tolerance = tol;
    return r;
}

void record(SuiteResult& r, double err)
{
    ++r.checks;
    // NaN counts as a failure
    if (!(err <= r.max_error))
        r.max_error = std::isnan(err) ? std::numeric_limits<double>::infinity() : std::max(r.max_error, err);
}

SuiteResult finish(SuiteResult r, std::string detail = {})
{
    r.passed = r.checks > 0 && r.max_error <= r.tolerance;
    r.detail = std::move(detail);
    return r;
}

VectorXc random_state(int n_sites, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    VectorXc v(Index{1} << n_sites);
    for (Index k = 0; k < v.size(); ++k)
        v(k) = cplx(g(rng), g(rng));
    return v.normalized();
}

// Single-qubit gate on qubit q (qubit 0 is the most significant bit).
void apply_1q(VectorXc& psi, int n, int q, const Matrix2c& u)
{
    const Index bit = Index{1} << (n - 1 - q);
    for (Index b = 0; b < psi.size(); ++b)
        if (!(b & bit)) {
            const cplx a0 = psi(b), a1 = psi(b | bit);
            psi(b) = u(0, 0) * a0 + u(0, 1) * a1;
            psi(b | bit) = u(1, 0) * a0 + u(1, 1) * a1;
        }
}

void apply_cnot(VectorXc& psi, int n, int control, int target)
{
    const Index cb = Index{1} << (n - 1 - control), tb = Index{1} << (n - 1 - target);
    for (Index b = 0; b < psi.size(); ++b)
        if ((b & cb) && !(b & tb))
            std::swap(psi(b), psi(b | tb));
}

double blockade_leak(const VectorXc& psi, int n, bool periodic)
{
    double w = 0;
    for (Index b = 0; b < psi.size(); ++b)
        if (!is_blockaded(static_cast<uint32_t>(b), n, periodic ? BC::periodic : BC::open))
            w += std::norm(psi(b));
    return w;
}

}  // namespace

SuiteResult suite_cross_method(int count, uint64_t seed, double perturb)
{
    auto r = start("cross_method", 1e-8);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < count; ++k) {
        const int n = 4 + static_cast<int>(rng() % 7);
        const Index chi = 2 + static_cast<Index>(rng() % 2);
        const FiniteMPS mps = random_mps(n, chi, rng());
        VectorXc psi = mps_to_statevector(mps).psi;
        psi(0) += perturb;
        psi.normalize();
        const double direct = sre_direct(psi).m;
        const double replica = sre_finite_replica(mps).m;
        const double pauli = sre_pauli_basis(mps, 2, Index{1} << 20, 1e-14).m;
        record(r, std::abs(direct - replica));
        record(r, std::abs(direct - pauli));
        record(r, std::abs(replica - pauli));
    }
    return finish(r, std::to_string(count) + " random open MPS, N in [4,10], chi in {2,3}");
}

SuiteResult suite_parent_hamiltonian(int count, double perturb)
{
    auto r = start("parent_hamiltonian", 1e-10);
    Matrix2c p0 = Matrix2c::Zero(), n1 = Matrix2c::Zero();
    p0(0, 0) = 1.0;
    n1(1, 1) = 1.0;
    for (int k = 0; k < count; ++k) {
        const double theta = M_PI * (k + 0.5) / count;
        for (double phi : {0.0, 0.7}) {
            const ParentProjector p = parent_projector(theta, phi);
            const UnitCellMPS mps = pxp_ansatz(theta + perturb, theta + perturb, phi, phi);

            Eigen::Matrix<cplx, 8, 1> v = Eigen::Matrix<cplx, 8, 1>::Zero();
            for (int a = 0; a < 5; ++a)
                v(blockaded3_index(a)) = p.null_vector(a);
            const MatrixXc rho3 = rdm(mps, 3, 0);
            record(r, (rho3 * v).norm());
            record(r, (p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff());
            record(r, (parent_operator_form(theta, phi) - p.matrix).cwiseAbs().maxCoeff());

            const VectorXc psi = mps_to_statevector(mps, 10).psi;
            record(r, apply_three_site_sum(p.matrix, psi, 10).norm());

            if (phi == 0.0) {
                // H0 term P(Y + z P + n / z)P written out independently
                const double z = p.z;
                const Matrix2c mid = pauli_matrices::y() + z * p0 + n1 / z;
                const MatrixXc h0_term = kron(kron(p0, mid), p0);
                record(r, (h0_term * (z / (1 + z * z)) - p.matrix).cwiseAbs().maxCoeff());
            }
        }
    }
    return finish(r, std::to_string(count) + " theta values, phi in {0, 0.7}, N=10 annihilation");
}

SuiteResult suite_fixed_points(int count)
{
    auto r = start("fixed_points", 1e-10);
    for (int k = 0; k < count; ++k) {
        const double theta = 0.05 + (M_PI - 0.1) * k / (count - 1);
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        const TransferFixedPoints fp = fixed_points(single_site_cell(pxp_site(theta)));
        Eigen::Vector4cd l(1, 0, 0, 1), rr(1, c * s, c * s, s * s);
        record(r, (fp.left / fp.left(0) - l).cwiseAbs().maxCoeff());
        record(r, (fp.right / fp.right(0) - rr).cwiseAbs().maxCoeff());
    }
    return finish(r, std::to_string(count) + " theta values in [0.05, pi - 0.05]");
}

SuiteResult suite_stabilizer_vertices()
{
    auto r = start("stabilizer_vertices", 1e-10);
    const auto& st = stabilizers_2q();
    if (st.states.size() != 60)
        return finish(r, "expected 60 states, found " + std::to_string(st.states.size()));
    for (size_t k = 0; k < st.states.size(); ++k) {
        const Vector4c& v = st.states[k];
        for (Index a = 0; a < 16; ++a) {
            const double e = st.pauli_table(a, static_cast<Index>(k));
            record(r, std::min({std::abs(e), std::abs(e - 1), std::abs(e + 1)}));
        }
        record(r, std::abs(sre_direct(VectorXc(v)).m));
        record(r, rom(v * v.adjoint()).R);
    }
    return finish(r, "60 two-qubit stabilizer states");
}

SuiteResult suite_clifford_invariance(int count, uint64_t seed)
{
    auto r = start("clifford_invariance", 1e-10);
    std::mt19937_64 rng(seed);
    const double h = 1 / std::sqrt(2.0);
    Matrix2c had, sg;
    had << h, h, h, -h;
    sg << 1, 0, 0, cplx(0, 1);
    for (int k = 0; k < count; ++k) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const VectorXc psi = random_state(n, rng);
        VectorXc out = psi;
        for (int g = 0; g < 4 * n; ++g) {
            const int kind = static_cast<int>(rng() % 3);
            const int q = static_cast<int>(rng() % static_cast<uint64_t>(n));
            if (kind == 0)
                apply_1q(out, n, q, had);
            else if (kind == 1)
                apply_1q(out, n, q, sg);
            else {
                const int t = (q + 1 + static_cast<int>(rng() % static_cast<uint64_t>(n - 1))) % n;
                apply_cnot(out, n, q, t);
            }
        }
        record(r, std::abs(sre_direct(psi).M - sre_direct(out).M));
    }
    return finish(r, std::to_string(count) + " random circuits of 4N gates from {H, S, CNOT}, N in [2,6]");
}

SuiteResult suite_blockade()
{
    auto r = start("blockade", 1e-14);
    for (double to : {0.3, 1.1, 2.0, 2.9})
        for (double te : {0.5, 1.7, 2.6})
            for (int n : {7, 10, 12})
                record(r, blockade_leak(mps_to_statevector(pxp_ansatz(to, te, 0.4, -0.2), n).psi, n, false));
    for (int n : {6, 8, 10}) {
        const auto pair = scar_mps_pair(n);
        record(r, blockade_leak(mps_to_statevector(pair.first).psi, n, true));
        record(r, blockade_leak(mps_to_statevector(pair.second).psi, n, true));
    }
    for (int l : {3, 4, 5})
        record(r, blockade_leak(rainbow_state(l), 2 * l, false));
    for (double th : {0.4, 1.3, 2.2})
        record(r, blockade_leak(staircase_state(th, 0.3, 8), 8, false));
    return finish(r, "ansatz, scar pair, rainbow and staircase states");
}

SuiteResult suite_purity_identity(uint64_t seed)
{
    auto r = start("purity_identity", 1e-10);
    std::mt19937_64 rng(seed);
    for (int n = 1; n <= 8; ++n) {
        const VectorXc psi = random_state(n, rng);
        double sum = 0;
        const uint64_t total = uint64_t{1} << (2 * n);
        for (uint64_t code = 0; code < total; ++code) {
            PauliMasks m;
            m.x = code >> n;
            m.z = code & ((uint64_t{1} << n) - 1);
            sum += std::norm(pauli_expectation(psi, m));
        }
        record(r, std::abs(sum / std::ldexp(1.0, n) - 1.0));
    }
    return finish(r, "random pure states, N = 1..8, exhaustive Pauli sum");
}

std::vector<SuiteResult> run_verify_suites(const VerifyOptions& opt)
{
    return {suite_cross_method(opt.random_states, opt.seed, opt.perturb),
            suite_parent_hamiltonian(opt.parent_thetas, opt.perturb),
            suite_fixed_points(),
            suite_stabilizer_vertices(),
            suite_clifford_invariance(opt.clifford_circuits, opt.seed + 1),
            suite_blockade(),
            suite_purity_identity(opt.seed + 2)};
}

}  // namespace rydmagic
