#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rydmagic/hamiltonians.hpp"
#include "rydmagic/mps.hpp"
#include "rydmagic/sre.hpp"

using namespace rydmagic;

namespace {

// Blockaded strings counted by brute force over all 2^n bitstrings.
long count_blockaded(int n, BC bc)
{
    long c = 0;
    for (uint32_t s = 0; s < (1u << n); ++s) {
        bool ok = true;
        for (int j = 0; j + 1 < n; ++j)
            ok = ok && !(((s >> j) & 1) && ((s >> (j + 1)) & 1));
        if (bc == BC::periodic && n > 2)
            ok = ok && !((s & 1) && ((s >> (n - 1)) & 1));
        c += ok;
    }
    return c;
}

// Lowest few gaps E_k - E_0.
Eigen::VectorXd gaps(const Eigen::VectorXd& e, int k)
{
    return (e.segment(1, k).array() - e(0)).matrix();
}

FiniteMPS periodic_chain(const UnitCellMPS& cell, int n)
{
    FiniteMPS m;
    m.boundary = Boundary::periodic;
    for (int j = 0; j < n; ++j)
        m.tensors.push_back(cell.tensors[static_cast<size_t>(j) % cell.tensors.size()]);
    return m;
}

}  // namespace

TEST_CASE("constrained basis sizes follow Fibonacci and Lucas numbers")
{
    CHECK(fib_basis(4, BC::open).dim() == 8);
    CHECK(fib_basis(14, BC::open).dim() == 987);
    CHECK(fib_basis(14, BC::periodic).dim() == 843);
    for (int n = 3; n <= 12; ++n) {
        CHECK(fib_basis(n, BC::open).dim() == count_blockaded(n, BC::open));
        CHECK(fib_basis(n, BC::periodic).dim() == count_blockaded(n, BC::periodic));
    }
    const ConstrainedBasis b = fib_basis(9, BC::open);
    for (Index k = 0; k < b.dim(); ++k)
        CHECK(b.find(b.states[static_cast<size_t>(k)]) == k);
    CHECK(b.find(0b110000000u) == -1);
}

TEST_CASE("two-site PXP matrix by hand")
{
    const ConstrainedBasis b = fib_basis(2, BC::open);
    REQUIRE(b.dim() == 3);
    const MatrixXc h = build_pxp(b, 1.0).dense();
    // basis {00, 01, 10}: |00> couples to both singly excited states with Omega/2
    MatrixXc expected = MatrixXc::Zero(3, 3);
    expected(0, 1) = expected(1, 0) = expected(0, 2) = expected(2, 0) = 0.5;
    CHECK((h - expected).norm() < 1e-15);
}

TEST_CASE("PXP spectrum is symmetric about zero and the Neel state has zero energy")
{
    for (BC bc : {BC::open, BC::periodic}) {
        const ConstrainedBasis b = fib_basis(10, bc);
        const SparseHamiltonian h = build_pxp(b);
        const MatrixXc d = h.dense();
        CHECK((d - d.adjoint()).norm() == 0.0);
        const Eigen::VectorXd e = hermitian_eigs(d).values;
        for (Index k = 0; k < e.size(); ++k)
            CHECK(std::abs(e(k) + e(e.size() - 1 - k)) < 1e-10);
        const Index z2 = b.find(z2_bits(10));
        REQUIRE(z2 >= 0);
        CHECK(std::abs(d(z2, z2)) == 0.0);
    }
}

TEST_CASE("H0 is positive semidefinite with a zero-energy ground state")
{
    for (double z : {0.5, 1.0, 2.0, 4.0}) {
        for (BC bc : {BC::open, BC::periodic}) {
            const ConstrainedBasis b = fib_basis(10, bc);
            const Eigen::VectorXd e = hermitian_eigs(build_h0(b, z).dense()).values;
            CHECK(e(0) > -1e-10);
            CHECK(std::abs(e(0)) < 1e-10);
        }
    }
    CHECK_THROWS(build_h0(fib_basis(4, BC::open), 0.0));
}

TEST_CASE("periodic H0 ground state is the uniform MPS")
{
    for (double z : {0.5, 1.0, 2.0, 4.0}) {
        const int n = 12;
        const ConstrainedBasis b = fib_basis(n, BC::periodic);
        const SparseHamiltonian h = build_h0(b, z);
        const HermitianSpectrum s = hermitian_eigs(h.dense());
        CHECK(s.values(1) - s.values(0) > 1e-3);
        const VectorXc psi = mps_to_statevector(periodic_chain(h0_ground_state(z), n)).psi;
        VectorXc ground = embed(s.vectors.col(0), b);
        CHECK(std::norm(ground.dot(psi)) > 1 - 1e-10);
    }
}

TEST_CASE("two-site Rydberg Hamiltonian by hand")
{
    RydbergParams p;
    p.omega = 0.7;
    p.delta = -0.3;
    p.v = 2.5;
    const MatrixXc h = build_rydberg(2, p).dense();
    const Matrix2c y = pauli_matrices::y(), id = Matrix2c::Identity();
    Matrix2c n1 = Matrix2c::Zero();
    n1(1, 1) = 1;
    const MatrixXc expected = p.omega / 2 * (kron(y, id) + kron(id, y)) + p.delta * (kron(n1, id) + kron(id, n1)) +
                              p.v * kron(n1, n1);
    CHECK((h - expected).norm() < 1e-14);
}

TEST_CASE("Rydberg Hamiltonian without drive is diagonal and its ground energy is the minimal configuration")
{
    RydbergParams p;
    p.omega = 0.0;
    p.delta = -1.0;
    p.v = 10.0;
    const MatrixXc h = build_rydberg(8, p).dense();
    CHECK((h - MatrixXc(h.diagonal().asDiagonal())).norm() == 0.0);
    double best = 1e300;
    for (uint32_t s = 0; s < 256; ++s) {
        double e = p.delta * std::popcount(s);
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8 && j - i <= p.range_cutoff; ++j)
                if (((s >> i) & 1) && ((s >> j) & 1))
                    e += p.v / std::pow(j - i, 6.0);
        best = std::min(best, e);
    }
    CHECK(std::abs(hermitian_eigs(h).values(0) - best) < 1e-12);
}

TEST_CASE("strong nearest-neighbour blockade reproduces the PXP low-energy gaps")
{
    RydbergParams p;
    p.v = 50.0;
    p.range_cutoff = 1;
    const int n = 8;
    const Eigen::VectorXd ry = hermitian_eigs(build_rydberg(n, p).dense()).values;
    const Eigen::VectorXd pxp = hermitian_eigs(build_pxp(fib_basis(n, BC::open)).dense()).values;
    const Eigen::VectorXd gr = gaps(ry, 5), gp = gaps(pxp, 5);
    for (Index k = 0; k < gp.size(); ++k)
        CHECK(std::abs(gr(k) - gp(k)) < 0.05 * gp(k));
}

TEST_CASE("Rydberg MPO reproduces the dense Hamiltonian")
{
    RydbergParams p;
    p.omega = 0.8;
    p.delta = 0.25;
    p.v = 3.0;
    CHECK((rydberg_mpo(8, p).dense() - build_rydberg(8, p).dense()).norm() < 1e-12);
    p.range_cutoff = 3;
    CHECK((rydberg_mpo(7, p).dense() - build_rydberg(7, p).dense()).norm() < 1e-12);
    p.omega = 0.0;
    p.delta = 0.0;
    p.range_cutoff = 1;
    p.v = 1e-300;
    CHECK(rydberg_mpo(5, p).dense().norm() < 1e-250);
    const MatrixXc h = rydberg_mpo(6, RydbergParams{}).dense();
    CHECK((h - h.adjoint()).norm() < 1e-14);
    CHECK_THROWS(build_rydberg(4, RydbergParams{1, 0, -1}));
}

TEST_CASE("mpo_expectation agrees with the dense expectation value")
{
    RydbergParams p;
    p.omega = 0.5;
    p.delta = -0.2;
    const FiniteMPS m = random_mps(7, 3, 21);
    const VectorXc psi = mps_to_statevector(m).psi;
    const double dense = psi.dot(build_rydberg(7, p).dense() * psi).real();
    CHECK(std::abs(mpo_expectation(rydberg_mpo(7, p), m) - dense) < 1e-12);
}

TEST_CASE("parent projector is a rank-one projector annihilating the three-site density matrix")
{
    for (int k = 0; k < 20; ++k) {
        const double theta = 0.1 + 2.9 * k / 19.0, phi = 0.3 * k;
        const ParentProjector p = parent_projector(theta, phi);
        CHECK((p.matrix * p.matrix - p.matrix).norm() < 1e-13);
        CHECK((p.matrix - p.matrix.adjoint()).norm() < 1e-14);
        CHECK(std::abs(p.matrix.trace() - 1.0) < 1e-13);
        // the three-site density matrix of the single-site cell, restricted to the blockaded basis
        const MatrixXc r3 = rdm(pxp_ansatz(theta, theta, phi, phi), 3);
        Eigen::Matrix<cplx, 5, 5> r5;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                r5(a, b) = r3(blockaded3_index(a), blockaded3_index(b));
        CHECK((p.blockaded * r5).norm() < 1e-12);
    }
    CHECK_THROWS(parent_projector(0.0));
    CHECK_THROWS(parent_projector(M_PI));
}

TEST_CASE("parent projector operator form equals the projector times its scale")
{
    for (double theta : {0.4, 1.3, 2.2, 2.9}) {
        const ParentProjector p = parent_projector(theta);
        CHECK((parent_operator_form(theta) - p.matrix).norm() < 1e-12 * (1 + p.z));
    }
}

TEST_CASE("reflection sectors partition the open-chain spectrum")
{
    const ConstrainedBasis b = fib_basis(14, BC::open);
    const SparseMatrixXc even = parity_isometry(b, 1), odd = parity_isometry(b, -1);
    CHECK(even.cols() + odd.cols() == 987);
    CHECK((MatrixXc(even.adjoint() * even) - MatrixXc::Identity(even.cols(), even.cols())).norm() < 1e-12);
    CHECK(MatrixXc(even.adjoint() * odd).norm() < 1e-12);

    const ConstrainedBasis s = fib_basis(10, BC::open);
    const SparseHamiltonian h = build_pxp(s);
    const Spectrum full = ed(h);
    const Spectrum pe = ed(h, s, 1), po = ed(h, s, -1);
    std::vector<double> merged(pe.energies.data(), pe.energies.data() + pe.energies.size());
    merged.insert(merged.end(), po.energies.data(), po.energies.data() + po.energies.size());
    std::sort(merged.begin(), merged.end());
    REQUIRE(static_cast<Index>(merged.size()) == full.energies.size());
    for (size_t k = 0; k < merged.size(); ++k)
        CHECK(std::abs(merged[k] - full.energies(static_cast<Index>(k))) < 1e-10);
    for (Index k = 0; k < pe.vectors.cols(); ++k)
        CHECK((MatrixXc(h.matrix) * pe.vectors.col(k) - pe.energies(k) * pe.vectors.col(k)).norm() < 1e-9);
    CHECK_THROWS(parity_isometry(fib_basis(6, BC::periodic), 1));
}

TEST_CASE("DMRG matches exact diagonalisation on the Rydberg chain")
{
    RydbergParams p;
    p.omega = 0.0156;
    p.delta = -0.0429;
    const int n = 11;
    const double exact = hermitian_eigs(build_rydberg(n, p).dense()).values(0);
    DmrgOptions opt;
    opt.chi = 16;
    const DmrgResult r = dmrg_ground_state(rydberg_mpo(n, p), opt);
    CHECK(r.status == Status::ok);
    CHECK(std::abs(r.energy - exact) < 1e-8);
    CHECK(r.energy >= exact - 1e-10);
    CHECK(std::abs(mpo_expectation(rydberg_mpo(n, p), r.mps) - r.energy) < 1e-10);
}

TEST_CASE("DMRG: product ground state at chi 1, variational bound and monotone in chi")
{
    // no interactions: the ground state is a product state
    RydbergParams free;
    free.omega = 1.0;
    free.delta = 0.4;
    free.v = 1e-300;
    const int n = 8;
    DmrgOptions one;
    one.chi = 1;
    const double exact_free = hermitian_eigs(build_rydberg(n, free).dense()).values(0);
    CHECK(std::abs(dmrg_ground_state(rydberg_mpo(n, free), one).energy - exact_free) < 1e-9);

    RydbergParams p;
    p.omega = 1.0;
    p.delta = -0.5;
    const double exact = hermitian_eigs(build_rydberg(n, p).dense()).values(0);
    double previous = 1e300;
    for (Index chi : {1, 2, 4, 8, 16}) {
        DmrgOptions opt;
        opt.chi = chi;
        const double e = dmrg_ground_state(rydberg_mpo(n, p), opt).energy;
        CHECK(e >= exact - 1e-10);
        CHECK(e <= previous + 1e-9);
        previous = e;
    }
    CHECK(std::abs(previous - exact) < 1e-8);
}
