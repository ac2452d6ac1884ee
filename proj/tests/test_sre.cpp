#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "helpers.hpp"
#include "rydmagic/mps.hpp"
#include "rydmagic/pauli.hpp"
#include "rydmagic/sre.hpp"

using namespace rydmagic;
using testing_util::brute_sre_total;
using testing_util::random_state;

namespace {

const double ln_phi = std::log((1 + std::sqrt(5.0)) / 2);

// Replica transfer matrix of a one-site cell built densely: (1/2) sum_a E_a^{(x)4}, normalised by lambda(E)^4.
double dense_replica_m2(const SiteTensor& a)
{
    const Matrix2c paulis[4] = {pauli_matrices::id(), pauli_matrices::x(), pauli_matrices::y(), pauli_matrices::z()};
    // spectral radius from the real embedding [[Re, -Im], [Im, Re]] (real Schur, not the complex solver)
    auto top = [](const MatrixXc& m) {
        const Index d = m.rows();
        Eigen::MatrixXd real(2 * d, 2 * d);
        real << m.real(), -m.imag(), m.imag(), m.real();
        Eigen::EigenSolver<Eigen::MatrixXd> es(real, false);
        REQUIRE(es.info() == Eigen::Success);
        double best = 0;
        for (Index k = 0; k < es.eigenvalues().size(); ++k)
            best = std::max(best, std::abs(es.eigenvalues()(k)));
        return best;
    };
    MatrixXc tau;
    for (const auto& p : paulis) {
        const MatrixXc e = site_transfer(a, p);
        const MatrixXc e4 = kron(kron(e, e), kron(e, e));
        tau = tau.size() ? MatrixXc(tau + e4) : e4;
    }
    const double lam_e = top(site_transfer(a));
    return -std::log(top(tau / 2.0) / std::pow(lam_e, 4));
}

VectorXc apply_two_qubit(const VectorXc& psi, int n, int q, const Matrix4c& u)
{
    // u acts on sites q, q+1 (q is the more significant)
    VectorXc out = VectorXc::Zero(psi.size());
    const int shift = n - 2 - q;
    for (Index b = 0; b < psi.size(); ++b) {
        const Index k = (b >> shift) & 3, rest = b & ~(Index{3} << shift);
        for (Index kp = 0; kp < 4; ++kp)
            out(rest | (kp << shift)) += u(kp, k) * psi(b);
    }
    return out;
}

}  // namespace

TEST_CASE("sre_direct on stabilizer states and the T state")
{
    VectorXc zero = VectorXc::Zero(16);
    zero(0) = 1;
    CHECK(std::abs(sre_direct(zero).m) < 1e-14);

    VectorXc ghz = VectorXc::Zero(16);
    ghz(0) = ghz(15) = 1 / std::sqrt(2.0);
    CHECK(std::abs(sre_direct(ghz).M) < 1e-14);

    VectorXc t(2);
    t << 1 / std::sqrt(2.0), std::exp(cplx(0, M_PI / 4)) / std::sqrt(2.0);
    CHECK(std::abs(sre_direct(t).M - std::log(4.0 / 3.0)) < 1e-14);
    CHECK(std::abs(sre_direct(t).M - 0.28768207245178) < 1e-12);
}

TEST_CASE("sre_direct matches the dense Pauli-matrix oracle for several Renyi orders")
{
    std::mt19937_64 rng(31);
    for (int n_sites : {1, 2, 3, 4}) {
        const VectorXc psi = random_state(n_sites, rng);
        for (int n : {2, 3, 4})
            CHECK(std::abs(sre_direct(psi, n).M - brute_sre_total(psi, n_sites, n)) < 1e-11);
    }
}

TEST_CASE("sre_direct rejects oversized and unnormalised input")
{
    CHECK_THROWS(sre_direct(VectorXc::Zero(Index{1} << 13)));
    VectorXc v = VectorXc::Zero(4);
    v(0) = 1.1;
    CHECK_THROWS(sre_direct(v));
}

TEST_CASE("sre_direct is invariant under Clifford gates and additive under tensor products")
{
    std::mt19937_64 rng(37);
    const VectorXc psi = random_state(4, rng);
    const double m = sre_direct(psi).M;
    Matrix4c cnot = Matrix4c::Zero();
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
    Matrix2c h, s;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    s << 1, 0, 0, cplx(0, 1);
    VectorXc phi = apply_two_qubit(psi, 4, 1, cnot);
    phi = apply_two_qubit(phi, 4, 0, kron(h, s));
    phi = apply_two_qubit(phi, 4, 2, kron(s, h) * cnot);
    CHECK(std::abs(sre_direct(phi).M - m) < 1e-10);

    const VectorXc other = random_state(3, rng);
    CHECK(std::abs(sre_direct(kron(psi, other)).M - m - sre_direct(other).M) < 1e-10);
}

TEST_CASE("finite replica contraction agrees with sre_direct")
{
    for (auto m : {to_finite(pxp_ansatz(1.1, 2.3), 8), random_mps(8, 3, 5), scar_mps_pair(8).first}) {
        const VectorXc psi = mps_to_statevector(m).psi;
        CHECK(std::abs(sre_finite_replica(m).M - sre_direct(psi).M) < 1e-10);
    }
    // stabilizer product chain
    CHECK(std::abs(sre_finite_replica(to_finite(pxp_ansatz(0, 0), 10)).M) < 1e-12);
}

TEST_CASE("finite replica is additive under concatenation")
{
    const FiniteMPS a = random_mps(5, 2, 41), b = random_mps(4, 3, 43);
    const double ma = sre_finite_replica(a).M, mb = sre_finite_replica(b).M;
    CHECK(std::abs(sre_finite_replica(concatenate(a, b)).M - ma - mb) < 1e-10);
    CHECK(std::abs(sre_finite_replica(concatenate(a, a)).M - 2 * ma) < 1e-10);
}

TEST_CASE("Pauli-basis method agrees with the replica contraction")
{
    for (uint64_t seed : {1u, 2u, 3u}) {
        const FiniteMPS m = random_mps(10, 2, seed);
        const SREResult p = sre_pauli_basis(m, 2, 1 << 12);
        CHECK(std::abs(p.M - sre_finite_replica(m).M) < 1e-8);
        CHECK(p.discarded_weight < 1e-20);
    }
    CHECK(std::abs(sre_pauli_basis(to_finite(pxp_ansatz(0, 0), 12), 2, 2).M) < 1e-12);
}

TEST_CASE("Pauli-basis truncation at chi_p 16 stays within 1e-3 per site of chi_p 64 at the manifold maximum")
{
    // locate the diagonal maximum of the density first
    double best = -1, arg = 0;
    for (int k = 1; k < 60; ++k) {
        const double t = M_PI * k / 60;
        const double m = sre_replica_density(pxp_ansatz(t, t)).m;
        if (m > best) {
            best = m;
            arg = t;
        }
    }
    const FiniteMPS chain = to_finite(pxp_ansatz(arg, arg), 24);
    const double lo = sre_pauli_basis(chain, 2, 16, 1e-12, 1.0).m, hi = sre_pauli_basis(chain, 2, 64, 1e-12, 1.0).m;
    CHECK(std::abs(lo - hi) < 1e-3);
}

TEST_CASE("replica density at (pi/2, pi/2) matches a dense replica transfer matrix")
{
    const double m = sre_replica_density(pxp_ansatz(M_PI / 2, M_PI / 2)).m;
    CHECK(std::abs(m - dense_replica_m2(pxp_site(M_PI / 2))) < 1e-10);
    for (double t : {0.4, 1.7, 2.6, 3.05})
        CHECK(std::abs(sre_replica_density(single_site_cell(pxp_site(t))).m - dense_replica_m2(pxp_site(t))) < 1e-10);
}

TEST_CASE("replica density vanishes on the stabilizer lines")
{
    CHECK(std::abs(sre_replica_density(pxp_ansatz(0, 0)).m) < 1e-12);
    for (double te : {0.3, 1.2, 2.5}) {
        CHECK(std::abs(sre_replica_density(pxp_ansatz(M_PI, te)).m) < 1e-10);
        CHECK(std::abs(sre_replica_density(pxp_ansatz(te, M_PI)).m) < 1e-10);
    }
}

TEST_CASE("replica density approaches long finite chains")
{
    const UnitCellMPS cell = pxp_ansatz(1.3, 0.9);
    const double density = sre_replica_density(cell).m;
    // finite-size corrections are boundary terms: M(N+2) - M(N) converges to two sites' worth
    const double a = sre_finite_replica(to_finite(cell, 20)).M, b = sre_finite_replica(to_finite(cell, 22)).M;
    CHECK(std::abs((b - a) / 2 - density) < 1e-8);
}

TEST_CASE("every manifold point on a coarse grid respects the ln(phi) bound")
{
    for (int i = 0; i <= 12; ++i)
        for (int j = 0; j <= 12; ++j) {
            const double to = -M_PI + 2 * M_PI * (i + 0.5) / 13, te = -M_PI + 2 * M_PI * (j + 0.5) / 13;
            CHECK(sre_replica_density(pxp_ansatz(to, te)).m <= ln_phi + 1e-9);
        }
}

TEST_CASE("scar cell density")
{
    CHECK(std::abs(sre_replica_density(scar_cell()).m - 0.376) < 1e-3);
    const auto pair = scar_mps_pair(8);
    // the two states differ by a one-site translation
    CHECK(std::abs(sre_direct(mps_to_statevector(pair.second).psi).M - sre_direct(mps_to_statevector(pair.first).psi).M) <
          1e-10);
}

TEST_CASE("mixed-state SRE of simple two-qubit states")
{
    CHECK(std::abs(sre_mixed(MatrixXc::Identity(4, 4) / 4.0)) < 1e-15);
    MatrixXc zero = MatrixXc::Zero(4, 4);
    zero(0, 0) = 1;
    CHECK(std::abs(sre_mixed(zero)) < 1e-15);
    std::mt19937_64 rng(47);
    for (int k = 0; k < 5; ++k) {
        const VectorXc psi = random_state(2, rng);
        CHECK(std::abs(sre_mixed(psi * psi.adjoint()) - sre_direct(psi).m) < 1e-12);
    }
    MatrixXc bad = MatrixXc::Identity(4, 4) / 4.0;
    bad(0, 0) = -0.5;
    bad(1, 1) = 1.0;
    CHECK_THROWS(sre_mixed(bad));
}

TEST_CASE("pauli_vector lists the Pauli expectations in code order")
{
    std::mt19937_64 rng(53);
    const VectorXc psi = random_state(2, rng);
    const Eigen::VectorXd v = pauli_vector(psi * psi.adjoint());
    const char* letters = "IXYZ";
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const std::string s{letters[a], letters[b]};
            CHECK(std::abs(v(4 * a + b) - psi.dot(pauli_matrix(PauliString::parse(s)) * psi).real()) < 1e-14);
        }
}

TEST_CASE("long-range SRE: bounded by the full value and zero on the product line")
{
    for (double to : {0.7, 1.9, 2.8}) {
        const LongRangeResult r = sre_long_range(pxp_ansatz(to, 0.0), 2, 16);
        CHECK(std::abs(r.m_l) < 1e-8);
    }
    for (auto [to, te] : {std::pair{1.0, 1.0}, {2.0, -1.5}, {0.5, 2.7}}) {
        const LongRangeResult r = sre_long_range(pxp_ansatz(to, te), 2, 16);
        CHECK(r.m_l <= r.m + 1e-12);
        CHECK(r.m_l >= -1e-12);
        CHECK(std::abs(r.m - sre_replica_density(pxp_ansatz(to, te)).m) < 1e-12);
    }
}
