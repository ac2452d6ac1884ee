#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rydmagic/hamiltonians.hpp"
#include "rydmagic/monotones.hpp"
#include "rydmagic/mps.hpp"

using namespace rydmagic;

namespace {

double blockade_weight(const VectorXc& psi, int n, BC bc)
{
    double w = 0;
    for (Index b = 0; b < psi.size(); ++b)
        if (!is_blockaded(static_cast<uint32_t>(b), n, bc))
            w += std::norm(psi(b));
    return w;
}

// Reference three-site density matrix in the basis {000, 001, 010, 100, 101}.
Eigen::Matrix<cplx, 5, 5> closed_form_rho3(double theta, double phi)
{
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const cplx i(0, 1), e = std::exp(i * phi), ec = std::conj(e);
    const double c2 = c * c, c4 = c2 * c2, s2 = s * s, s3 = s2 * s, s4 = s2 * s2;
    Eigen::Matrix<cplx, 5, 5> r;
    r << c4, -i * c4 * s * e, -i * c2 * s * e, -i * c4 * s * e, -c4 * s2 * e * e,
        i * c4 * s * ec, c2 * s2, c2 * s2, c4 * s2, -i * c2 * s3 * e,
        i * c2 * s * ec, c2 * s2, s2, c2 * s2, -i * c2 * s3 * e,
        i * c4 * s * ec, c4 * s2, c2 * s2, c2 * s2, -i * c2 * s3 * e,
        -c4 * s2 * ec * ec, i * c2 * s3 * ec, i * c2 * s3 * ec, i * c2 * s3 * ec, s4;
    return r / (1 + s2);
}

MatrixXc pxp_dense(int n, BC bc)
{
    const ConstrainedBasis basis = fib_basis(n, bc);
    const MatrixXc h = build_pxp(basis).dense();
    MatrixXc full = MatrixXc::Zero(Index{1} << n, Index{1} << n);
    for (Index a = 0; a < basis.dim(); ++a)
        for (Index b = 0; b < basis.dim(); ++b)
            full(basis.states[static_cast<size_t>(a)], basis.states[static_cast<size_t>(b)]) = h(a, b);
    return full;
}

}  // namespace

TEST_CASE("ansatz at the origin is the all-zero product state")
{
    // Only the A^0 path survives in the bulk. The default open contraction sums the right bond, which
    // lets the last site carry the dangling A^1; projecting both ends on e0 removes it.
    VectorXc e0 = VectorXc::Zero(2);
    e0(0) = 1;
    const VectorXc psi = mps_to_statevector(to_finite(pxp_ansatz(0, 0), 8, e0, e0)).psi;
    CHECK(std::abs(std::abs(psi(0)) - 1.0) < 1e-14);
    const VectorXc dflt = mps_to_statevector(pxp_ansatz(0, 0), 8).psi;
    CHECK(std::norm(dflt(0)) + std::norm(dflt(1)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ansatz at (pi, pi) is a Neel state with the odd sublattice (site 0) excited")
{
    for (int n : {6, 8, 10}) {
        const VectorXc psi = mps_to_statevector(pxp_ansatz(M_PI, M_PI), n).psi;
        const uint32_t neel = z2_bits(n) << 1 & ((1u << n) - 1);
        CHECK(std::abs(std::abs(psi(neel)) - 1.0) < 1e-12);
    }
}

TEST_CASE("ansatz respects the blockade at the tensor level and after contraction")
{
    for (double th : {0.4, 1.3, 2.8}) {
        const UnitCellMPS m = pxp_ansatz(th, 1.0 - th, 0.3, -0.6);
        CHECK((m.tensors[0][1] * m.tensors[1][1]).norm() == 0.0);
        CHECK((m.tensors[1][1] * m.tensors[0][1]).norm() == 0.0);
        CHECK(blockade_weight(mps_to_statevector(m, 9).psi, 9, BC::open) == 0.0);
    }
}

TEST_CASE("ansatz on the diagonal has equal density on both sublattices")
{
    const UnitCellMPS m = pxp_ansatz(M_PI / 2, M_PI / 2);
    const MatrixXc r0 = rdm(m, 1, 0), r1 = rdm(m, 1, 1);
    CHECK(std::abs(r0(1, 1) - r1(1, 1)) < 1e-12);
    CHECK(r0(1, 1).real() > 0.1);
}

TEST_CASE("h0 angle solves the defining quadratic")
{
    const double s = (-1 + std::sqrt(17.0)) / 4;
    CHECK(std::sin(h0_theta(2.0) / 2) == doctest::Approx(s).epsilon(1e-14));
    CHECK(h0_theta(2.0) == doctest::Approx(2 * std::asin(s)).epsilon(1e-14));
    CHECK(h0_theta(2.0) == doctest::Approx(1.791815).epsilon(1e-6));
    for (double z = 0.05; z < 10; z *= 1.3) {
        const double t = h0_theta(z), c = std::cos(t / 2);
        CHECK(std::abs(std::sin(t / 2) / (c * c) - z) < 1e-12 * std::max(1.0, z));
    }
    CHECK(h0_theta(1e-9) < 1e-8);
    CHECK_THROWS(h0_theta(0.0));
}

TEST_CASE("h0 ground state has zero energy under the parent projectors")
{
    for (double z : {0.5, 2.0, 4.0}) {
        const double theta = h0_theta(z);
        const VectorXc psi = mps_to_statevector(h0_ground_state(z), 10).psi;
        CHECK(apply_three_site_sum(parent_projector(theta).matrix, psi, 10).norm() < 1e-12);
    }
}

TEST_CASE("transfer matrix of the product state")
{
    const TransferFixedPoints fp = fixed_points(single_site_cell(pxp_site(0.0)));
    CHECK(std::abs(fp.lam - 1.0) < 1e-14);
    CHECK((fp.right / fp.right(0) - Eigen::Vector4cd(1, 0, 0, 0)).norm() < 1e-14);
}

TEST_CASE("single-site fixed points follow the closed forms")
{
    for (int k = 0; k < 50; ++k) {
        const double theta = 0.05 + (M_PI - 0.1) * k / 49.0;
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        const TransferFixedPoints fp = fixed_points(single_site_cell(pxp_site(theta)));
        CHECK((fp.left / fp.left(0) - Eigen::Vector4cd(1, 0, 0, 1)).norm() < 1e-10);
        CHECK((fp.right / fp.right(0) - Eigen::Vector4cd(1, c * s, c * s, s * s)).norm() < 1e-10);
    }
}

TEST_CASE("fixed points are normalised with a Hermitian positive right density")
{
    for (double to : {0.3, 1.7, 2.9})
        for (double te : {0.8, 2.2}) {
            const TransferFixedPoints fp = fixed_points(pxp_ansatz(to, te, 0.2, 0.5));
            CHECK(std::abs(fp.left.dot(fp.right) - 1.0) < 1e-10);
            const MatrixXc r = fp.right_matrix();
            CHECK((r - r.adjoint()).norm() < 1e-12);
            CHECK(hermitian_eigs((r + r.adjoint()) / 2).values.minCoeff() > -1e-12);
        }
}

TEST_CASE("random MPS has unit dominant eigenvalue after normalisation")
{
    const FiniteMPS f = random_mps(2, 3, 21, Boundary::periodic);
    UnitCellMPS cell;
    cell.tensors = f.tensors;
    const TransferFixedPoints fp = fixed_points(normalized(cell));
    CHECK(std::abs(fp.lam - 1.0) < 1e-10);
}

TEST_CASE("theta = pi single-site cell is degenerate; the two-site cell is not")
{
    CHECK_THROWS(fixed_points(single_site_cell(pxp_site(M_PI))));
    CHECK_NOTHROW(fixed_points(pxp_ansatz(M_PI, 1.0)));
}

TEST_CASE("two-site density matrices: product state, trace, positivity and purity")
{
    const MatrixXc r0 = rdm(pxp_ansatz(0, 0), 2);
    CHECK(std::abs(r0(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(r0.trace() - 1.0) < 1e-14);
    for (double to : {0.5, 1.5, 2.5})
        for (double te : {0.7, 2.0})
            for (int off : {0, 1}) {
                const MatrixXc r = rdm(pxp_ansatz(to, te), 2, off);
                CHECK(std::abs(r.trace() - 1.0) < 1e-10);
                CHECK((r - r.adjoint()).norm() < 1e-10);
                CHECK(hermitian_eigs((r + r.adjoint()) / 2).values.minCoeff() > -1e-10);
                CHECK((r * r).trace().real() < 1 - 1e-6);
                CHECK(r.row(3).norm() + r.col(3).norm() < 1e-14);
            }
}

TEST_CASE("three-site density matrix equals the closed form up to complex conjugation")
{
    // The reference matrix corresponds to A^1 = -i e^{-i phi}; with the A^1 = -i e^{i phi} tensors used
    // here every entry comes out conjugated.
    for (double theta : {0.4, 1.1, 1.9, 2.7})
        for (double phi : {0.0, 0.6}) {
            const MatrixXc r = rdm(pxp_ansatz(theta, theta, phi, phi), 3, 0);
            const auto cf = closed_form_rho3(theta, phi);
            double err = 0;
            for (int a = 0; a < 5; ++a)
                for (int b = 0; b < 5; ++b)
                    err = std::max(err, std::abs(r(blockaded3_index(a), blockaded3_index(b)) - std::conj(cf(a, b))));
            CHECK(err < 1e-10);
        }
}

TEST_CASE("scar pair: zero-energy eigenstates of the periodic chain")
{
    const auto pair = scar_mps_pair(8);
    const VectorXc a = mps_to_statevector(pair.first).psi, b = mps_to_statevector(pair.second).psi;
    const MatrixXc h = pxp_dense(8, BC::periodic);
    CHECK((h * a).norm() < 1e-10);
    CHECK((h * b).norm() < 1e-10);
    CHECK(blockade_weight(a, 8, BC::periodic) == 0.0);
    CHECK(blockade_weight(b, 8, BC::periodic) == 0.0);
    CHECK_THROWS(scar_mps_pair(7));
}

TEST_CASE("scar pair overlap matches brute-force amplitudes")
{
    const int n = 8;
    const auto pair = scar_mps_pair(n);
    // amplitude of |s> = Tr(prod_j M_j^{s_j}) written out directly
    auto amp = [&](const FiniteMPS& m, uint32_t s) {
        MatrixXc t = MatrixXc::Identity(m.tensors[0][0].rows(), m.tensors[0][0].rows());
        for (int j = 0; j < n; ++j)
            t = t * m.tensors[static_cast<size_t>(j)][(s >> (n - 1 - j)) & 1];
        return t.trace();
    };
    cplx dot = 0;
    double na = 0, nb = 0;
    for (uint32_t s = 0; s < (1u << n); ++s) {
        const cplx x = amp(pair.first, s), y = amp(pair.second, s);
        dot += std::conj(x) * y;
        na += std::norm(x);
        nb += std::norm(y);
    }
    const cplx brute = dot / std::sqrt(na * nb);
    const VectorXc a = mps_to_statevector(pair.first).psi, b = mps_to_statevector(pair.second).psi;
    CHECK(std::abs(a.dot(b) - brute) < 1e-12);
}

TEST_CASE("rainbow state: string count, normalisation and zero energy")
{
    CHECK(pbc_strings(4).size() == 7);
    // Lucas numbers phi_{L-1} + phi_{L+1}
    const int lucas[] = {0, 1, 3, 4, 7, 11, 18, 29};
    for (int l = 3; l <= 7; ++l)
        CHECK(static_cast<int>(pbc_strings(l).size()) == lucas[l]);
    const VectorXc e = rainbow_state(4);
    CHECK(std::abs(e.norm() - 1.0) < 1e-14);
    CHECK((pxp_dense(8, BC::periodic) * e).norm() < 1e-10);
    CHECK(blockade_weight(e, 8, BC::periodic) == 0.0);
}

TEST_CASE("statevector contraction agrees with MPS expectation values")
{
    for (uint64_t seed : {1, 2, 3}) {
        const FiniteMPS m = random_mps(7, 3, seed);
        const VectorXc psi = mps_to_statevector(m).psi;
        for (int site : {0, 3, 6}) {
            MatrixXc op = MatrixXc::Identity(1, 1);
            for (int j = 0; j < 7; ++j)
                op = kron(op, j == site ? pauli_matrices::y() : pauli_matrices::id());
            CHECK(std::abs(psi.dot(op * psi) - mps_expectation(m, site, pauli_matrices::y())) < 1e-12);
        }
    }
}

TEST_CASE("finite_rdm agrees with the dense reduced density matrix")
{
    for (uint64_t seed : {4, 5}) {
        const FiniteMPS m = random_mps(8, 3, seed);
        const VectorXc psi = mps_to_statevector(m).psi;
        for (int j : {0, 3, 6})
            CHECK((finite_rdm(m, j, 2) - two_site_rdm(psi, 8, j)).norm() < 1e-12);
    }
}

TEST_CASE("unit cell JSON round trip")
{
    const UnitCellMPS m = pxp_ansatz(0.7, 1.9, 0.1, -0.4);
    const UnitCellMPS back = mps_from_json(mps_to_json(m));
    REQUIRE(back.cell_size() == 2);
    for (int s = 0; s < 2; ++s)
        for (int p = 0; p < 2; ++p)
            CHECK((back.tensors[static_cast<size_t>(s)][static_cast<size_t>(p)] -
                   m.tensors[static_cast<size_t>(s)][static_cast<size_t>(p)])
                      .norm() == 0.0);
    CHECK_THROWS(mps_from_json("{\"cell_size\": 1}"));
}
