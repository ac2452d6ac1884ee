#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "rydmagic/hamiltonians.hpp"
#include "rydmagic/monotones.hpp"
#include "rydmagic/pauli.hpp"
#include "rydmagic/sre.hpp"

using namespace rydmagic;
using testing_util::random_state;

namespace {

// Exhaustive sums over all 4^N Pauli strings: {sum <P>^2, sum <P>^4} / 2^N.
std::pair<double, double> pauli_moments(const VectorXc& psi, int n)
{
    double s2 = 0, s4 = 0;
    for (uint64_t x = 0; x < (1ull << n); ++x)
        for (uint64_t z = 0; z < (1ull << n); ++z) {
            const double e = pauli_expectation(psi, {x, z}).real();
            s2 += e * e;
            s4 += e * e * e * e;
        }
    const double d = std::ldexp(1.0, n);
    return {s2 / d, s4 / d};
}

MatrixXc t_tensor_zero()
{
    VectorXc t(2);
    t << 1 / std::sqrt(2.0), std::exp(cplx(0, M_PI / 4)) / std::sqrt(2.0);
    VectorXc zero = VectorXc::Zero(2);
    zero(0) = 1;
    const VectorXc psi = kron(t, zero);
    return psi * psi.adjoint();
}

}  // namespace

TEST_CASE("two-qubit stabilizer states: 60 distinct vertices with Pauli entries in {0, +-1}")
{
    const StabilizerSet2Q& s = stabilizers_2q();
    REQUIRE(s.states.size() == 60);
    // 2^n prod_{k=1..n} (2^k + 1) at n = 2
    CHECK(s.states.size() == 4 * 3 * 5);
    for (size_t a = 0; a < s.states.size(); ++a) {
        CHECK(std::abs(s.states[a].norm() - 1) < 1e-14);
        CHECK(std::abs(sre_direct(VectorXc(s.states[a])).M) < 1e-12);
        for (size_t b = a + 1; b < s.states.size(); ++b)
            CHECK(std::norm(s.states[a].dot(s.states[b])) < 1 - 1e-9);
    }
    for (Index i = 0; i < s.pauli_table.size(); ++i) {
        const double v = s.pauli_table.data()[i];
        CHECK(std::min({std::abs(v), std::abs(v - 1), std::abs(v + 1)}) < 1e-12);
    }
}

TEST_CASE("robustness of magic vanishes on stabilizer states and inside the polytope")
{
    for (const auto& v : stabilizers_2q().states) {
        const RomResult r = rom(v * v.adjoint());
        CHECK(std::abs(r.R) < 1e-9);
        CHECK(std::abs(r.log_free) < 1e-9);
    }
    CHECK(std::abs(rom(MatrixXc::Identity(4, 4) / 4.0).R) < 1e-9);
    const auto& st = stabilizers_2q().states;
    const MatrixXc mix = 0.3 * st[3] * st[3].adjoint() + 0.7 * st[41] * st[41].adjoint();
    CHECK(std::abs(rom(mix).R) < 1e-9);
}

TEST_CASE("robustness of magic of T (x) 0 equals the single-qubit l1 Bloch norm")
{
    // single qubit: R + 1 = |r_x| + |r_y| + |r_z| = sqrt(2) for the T state; a stabilizer factor leaves it unchanged
    const RomResult r = rom(t_tensor_zero());
    CHECK(std::abs(r.R + 1 - std::sqrt(2.0)) < 1e-8);
    CHECK(std::abs(r.log_free - 0.5 * std::log(2.0)) < 1e-8);
    CHECK(std::abs(r.log_free - 0.34657359027997264) < 1e-8);
    CHECK(r.reconstruction_error < 1e-8);
}

TEST_CASE("robustness of magic: primal weights reconstruct rho and the dual certifies optimality")
{
    std::mt19937_64 rng(61);
    const Eigen::MatrixXd& a = stabilizers_2q().pauli_table;
    for (int k = 0; k < 10; ++k) {
        const VectorXc psi = random_state(2, rng);
        const MatrixXc rho = psi * psi.adjoint();
        const RomResult r = rom(rho);
        const Eigen::VectorXd b = pauli_vector(rho);
        CHECK((a * r.weights - b).norm() < 1e-8);
        CHECK(std::abs(r.weights.lpNorm<1>() - (r.R + 1)) < 1e-8);
        CHECK(std::abs(r.dual_objective - (r.R + 1)) < 1e-8);
        CHECK(r.R > 0);
    }
}

TEST_CASE("simplex solves a small LP and certifies it with the dual")
{
    // min x0 + 2 x1 + 4 x2 s.t. x0 + x1 + x2 = 1, x0 - x2 = 0.2; on the feasible line the cost is 1.8 + x2
    Eigen::MatrixXd a(2, 3);
    a << 1, 1, 1, 1, 0, -1;
    const Eigen::Vector2d b(1, 0.2);
    const Eigen::Vector3d c(1, 2, 4);
    const LPResult r = simplex_min(a, b, c);
    CHECK(std::abs(r.objective - 1.8) < 1e-12);
    CHECK((r.x - Eigen::Vector3d(0.2, 0.8, 0)).norm() < 1e-12);
    CHECK((a * r.x - b).norm() < 1e-12);
    CHECK(std::abs(b.dot(r.dual) - r.objective) < 1e-12);
    CHECK(((c - a.transpose() * r.dual).array() >= -1e-12).all());
    // infeasible
    Eigen::MatrixXd bad(1, 2);
    bad << 1, 1;
    CHECK_THROWS(simplex_min(bad, Eigen::VectorXd::Constant(1, -1.0), Eigen::Vector2d(1, 1)));
}

TEST_CASE("purity identity: Pauli squares sum to 2^N for pure states")
{
    std::mt19937_64 rng(67);
    for (int n = 1; n <= 8; ++n)
        CHECK(std::abs(pauli_moments(random_state(n, rng), n).first - 1) < 1e-10);
}

TEST_CASE("Monte Carlo SRE of a computational basis state is exactly zero")
{
    VectorXc psi = VectorXc::Zero(1 << 8);
    psi(0) = 1;
    MCOptions o;
    o.n_samples = 20000;
    o.burn_in = 1000;
    const MCEstimate e = mc_sre(psi, 8, o);
    CHECK(e.mean == 0.0);
    CHECK(e.stderr_ == 0.0);
    CHECK(e.acceptance_rate >= 0.0);
    CHECK(e.acceptance_rate <= 1.0);
}

TEST_CASE("Monte Carlo estimator of the Pauli fourth moment is unbiased at N = 6")
{
    std::mt19937_64 rng(71);
    for (int k = 0; k < 3; ++k) {
        const VectorXc psi = random_state(6, rng);
        const double exact = pauli_moments(psi, 6).second;
        MCOptions o;
        o.n_samples = 200000;
        o.seed = 100 + static_cast<uint64_t>(k);
        const MCEstimate e = mc_sre(psi, 6, o);
        CHECK(std::abs(e.mean_p2 - exact) < 4 * e.mean_p2_stderr);
        CHECK(std::abs(e.mean - (-std::log(exact) / 6)) < 4 * e.stderr_);
        CHECK(e.stderr_ > 0);
    }
}

TEST_CASE("Monte Carlo SRE of real PXP eigenstates agrees with the exact value")
{
    // real states have <P> = 0 whenever P contains an odd number of Y; the sampler must still reach the rest
    const int n = 10;
    const ConstrainedBasis b = fib_basis(n, BC::open);
    const Spectrum sp = ed(build_pxp(b), b, 1);
    int within = 0, total = 0;
    for (Index k : {Index{0}, sp.energies.size() / 3, sp.energies.size() / 2, sp.energies.size() - 1}) {
        const VectorXc v = embed(sp.vectors.col(k).normalized(), b);
        MCOptions o;
        o.n_samples = 200000;
        o.seed = 7 + static_cast<uint64_t>(k);
        const MCEstimate e = mc_sre(v, n, o);
        const double exact = sre_direct(v).m;
        within += std::abs(e.mean - exact) < 3 * e.stderr_;
        ++total;
    }
    CHECK(within >= total - 1);
}

TEST_CASE("merged chains are reproducible and tighter than single chains")
{
    std::mt19937_64 rng(73);
    const VectorXc psi = random_state(6, rng);
    MCOptions o;
    o.n_samples = 50000;
    const MCEstimate a = mc_sre_parallel(psi, 6, o, 4, 2), b = mc_sre_parallel(psi, 6, o, 4, 1);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.stderr_ < mc_sre(psi, 6, o).stderr_);
}

TEST_CASE("shot estimator converges to the exact mixed SRE")
{
    std::mt19937_64 rng(79);
    const VectorXc psi = random_state(4, rng);
    const ShotRecord r = shot_estimator(psi, 4, 1000000, 5);
    CHECK(std::abs(r.m_exact - sre_mixed(two_site_rdm(psi, 4, 1))) < 1e-12);
    CHECK(std::abs(r.m_estimate - r.m_exact) < 1e-2);
    CHECK((r.estimates.array().abs() <= 1.0).all());
    const ShotRecord again = shot_estimator(psi, 4, 1000000, 5);
    CHECK(again.m_estimate == r.m_estimate);
}

TEST_CASE("shot estimator on stabilizer states")
{
    MatrixXc zero = MatrixXc::Zero(4, 4);
    zero(0, 0) = 1;
    const VectorXc bell = stabilizers_2q().states[17];
    for (const MatrixXc& rho : {zero, MatrixXc(bell * bell.adjoint())}) {
        const ShotRecord s = shot_estimator(rho, 1000, 3);
        // zero-mean Paulis only contribute at second order in the sampling noise
        CHECK(std::abs(s.m_exact) < 1e-12);
        CHECK(s.m_estimate < 1e-2);
        CHECK(s.m_estimate >= 0.0);
        // the +-1 Paulis are sampled without noise
        for (int k = 0; k < 16; ++k)
            if (std::abs(std::abs(pauli_vector(rho)(k)) - 1) < 1e-12)
                CHECK(s.estimates(k) == doctest::Approx(pauli_vector(rho)(k)).epsilon(1e-12));
    }
}

TEST_CASE("two_site_rdm agrees with a partial trace written out by hand")
{
    std::mt19937_64 rng(83);
    const int n = 5;
    const VectorXc psi = random_state(n, rng);
    for (int j = 0; j + 1 < n; ++j) {
        MatrixXc rho = MatrixXc::Zero(4, 4);
        for (Index a = 0; a < psi.size(); ++a)
            for (Index b = 0; b < psi.size(); ++b) {
                const int shift = n - 2 - j;
                if ((a & ~(Index{3} << shift)) != (b & ~(Index{3} << shift)))
                    continue;
                rho((a >> shift) & 3, (b >> shift) & 3) += psi(a) * std::conj(psi(b));
            }
        CHECK((two_site_rdm(psi, n, j) - rho).norm() < 1e-13);
    }
}

TEST_CASE("scar flags pick local overlap maxima above the floor")
{
    Eigen::VectorXd e(6), o(6);
    e << -2, -1.9, -1, 0, 0.1, 1;
    o << 0.2, 0.05, 0.001, 0.3, 0.4, 0.2;
    const auto f = flag_scars(e, o, 0.3, 5, 100);
    const std::vector<bool> expected = {true, false, false, false, true, true};
    CHECK(f == expected);
}

TEST_CASE("eigenstate scan: split ranges reproduce a full Monte Carlo run")
{
    const int n = 8;
    const ConstrainedBasis b = fib_basis(n, BC::open);
    const SparseHamiltonian h = build_pxp(b);
    EigenstateConfig cfg;
    cfg.exact = false;
    cfg.mc.n_samples = 4000;
    cfg.mc.burn_in = 500;
    cfg.mc.batches = 10;
    cfg.first = 0;
    cfg.last = 6;
    const ScanResult full = eigenstate_scan(h, b, 1, cfg);
    cfg.last = 3;
    ScanResult split = eigenstate_scan(h, b, 1, cfg);
    cfg.first = 3;
    cfg.last = 6;
    split.append(eigenstate_scan(h, b, 1, cfg));
    REQUIRE(full.size() == 6);
    CHECK(split.to_csv() == full.to_csv());
}

TEST_CASE("eigenstate scan: exact values, parity labels and the ground state")
{
    const int n = 10;
    const ConstrainedBasis b = fib_basis(n, BC::open);
    EigenstateConfig cfg;
    const ScanResult r = eigenstate_scan(build_pxp(b), b, 1, cfg);
    const Eigen::VectorXd m2 = r.column("m2"), parity = r.column("parity"), energy = r.column("energy");
    CHECK((parity.array() == 1.0).all());
    for (Index k = 1; k < energy.size(); ++k)
        CHECK(energy(k) >= energy(k - 1));
    CHECK(r.column("scar").sum() >= 3);
    // the ground state ties only with its Z-string partner at the top of the spectrum
    CHECK(m2(0) <= m2.minCoeff() + 1e-12);
    CHECK(std::abs(m2(0) - m2(m2.size() - 1)) < 1e-10);
}
