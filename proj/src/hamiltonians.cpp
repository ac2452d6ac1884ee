#include "rydmagic/hamiltonians.hpp"

#include <bit>
#include <cmath>

namespace rydmagic {

namespace {

using Triplets = std::vector<Eigen::Triplet<cplx>>;

int bit_at(uint32_t s, int site, int n) { return static_cast<int>((s >> (n - 1 - site)) & 1u); }

// Neighbour occupation; sites outside an open chain count as empty.
int neighbour(uint32_t s, int site, int n, BC bc)
{
    if (site < 0 || site >= n) {
        if (bc == BC::open)
            return 0;
        site = (site + n) % n;
    }
    return bit_at(s, site, n);
}

SparseMatrixXc from_triplets(Index dim, const Triplets& t)
{
    SparseMatrixXc m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

const cplx I(0.0, 1.0);

}  // namespace

Index ConstrainedBasis::find(uint32_t s) const
{
    const auto it = index.find(s);
    return it == index.end() ? -1 : it->second;
}

bool is_blockaded(uint32_t s, int n_sites, BC bc)
{
    if (s & (s >> 1))
        return false;
    if (bc == BC::periodic && n_sites > 2 && (s & 1u) && ((s >> (n_sites - 1)) & 1u))
        return false;
    return true;
}

uint32_t reflect_bits(uint32_t s, int n_sites)
{
    uint32_t r = 0;
    for (int j = 0; j < n_sites; ++j)
        r |= ((s >> j) & 1u) << (n_sites - 1 - j);
    return r;
}

uint32_t z2_bits(int n_sites)
{
    uint32_t s = 0;
    for (int j = 1; j < n_sites; j += 2)
        s |= 1u << (n_sites - 1 - j);
    return s;
}

ConstrainedBasis fib_basis(int n_sites, BC bc)
{
    if (n_sites < 2 || n_sites > 28)
        throw std::invalid_argument("fib_basis: n_sites must be in [2, 28]");
    ConstrainedBasis b;
    b.n_sites = n_sites;
    b.bc = bc;
    for (uint32_t s = 0; s < (1u << n_sites); ++s)
        if (is_blockaded(s, n_sites, bc))
            b.states.push_back(s);
    b.index.reserve(b.states.size());
    for (size_t k = 0; k < b.states.size(); ++k)
        b.index.emplace(b.states[k], static_cast<Index>(k));
    return b;
}

SparseHamiltonian build_pxp(const ConstrainedBasis& basis, double omega)
{
    const int n = basis.n_sites;
    Triplets t;
    for (Index k = 0; k < basis.dim(); ++k) {
        const uint32_t s = basis.states[static_cast<size_t>(k)];
        for (int j = 0; j < n; ++j) {
            if (neighbour(s, j - 1, n, basis.bc) || neighbour(s, j + 1, n, basis.bc))
                continue;
            const Index c = basis.find(s ^ (1u << (n - 1 - j)));
            t.emplace_back(c, k, cplx(omega / 2.0));
        }
    }
    return {from_triplets(basis.dim(), t), std::nullopt, "pxp"};
}

SparseHamiltonian build_h0(const ConstrainedBasis& basis, double z)
{
    if (!(z > 0))
        throw std::invalid_argument("build_h0: z must be positive");
    const int n = basis.n_sites;
    Triplets t;
    for (Index k = 0; k < basis.dim(); ++k) {
        const uint32_t s = basis.states[static_cast<size_t>(k)];
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (neighbour(s, j - 1, n, basis.bc) || neighbour(s, j + 1, n, basis.bc))
                continue;
            const int occ = bit_at(s, j, n);
            diag += occ ? 1.0 / z : z;
            const Index c = basis.find(s ^ (1u << (n - 1 - j)));
            // <1|Y|0> = i, <0|Y|1> = -i
            t.emplace_back(c, k, occ ? -I : I);
        }
        t.emplace_back(k, k, cplx(diag));
    }
    return {from_triplets(basis.dim(), t), std::nullopt, "h0"};
}

void RydbergParams::validate() const
{
    if (!(v > 0))
        throw std::invalid_argument("RydbergParams: v must be positive");
    if (range_cutoff < 1)
        throw std::invalid_argument("RydbergParams: range_cutoff must be >= 1");
}

SparseHamiltonian build_rydberg(int n_sites, const RydbergParams& p)
{
    p.validate();
    if (n_sites < 1 || n_sites > 20)
        throw std::invalid_argument("build_rydberg: n_sites must be in [1, 20]");
    const Index dim = Index{1} << n_sites;
    Triplets t;
    t.reserve(static_cast<size_t>(dim * (n_sites + 1)));
    for (Index k = 0; k < dim; ++k) {
        const auto s = static_cast<uint32_t>(k);
        double diag = p.delta * std::popcount(s);
        for (int d = 1; d <= p.range_cutoff && d < n_sites; ++d)
            diag += p.v / std::pow(static_cast<double>(d), p.alpha) * std::popcount(s & (s >> d));
        if (diag != 0.0)
            t.emplace_back(k, k, cplx(diag));
        for (int j = 0; j < n_sites; ++j) {
            const uint32_t m = 1u << (n_sites - 1 - j);
            t.emplace_back(static_cast<Index>(s ^ m), k, (s & m ? -I : I) * (p.omega / 2.0));
        }
    }
    return {from_triplets(dim, t), std::nullopt, "rydberg"};
}

RydbergParams rydberg_point_for_z(double z, double v)
{
    if (!(z > 0))
        throw std::invalid_argument("rydberg_point_for_z: z must be positive");
    RydbergParams p;
    p.v = v;
    const double scale = 2.0 * v / std::pow(2.0, p.alpha);
    p.omega = scale / z;
    p.delta = -scale * (3.0 - 1.0 / (z * z));
    return p;
}

MatrixXc MPO::dense() const
{
    if (tensors.empty())
        throw std::invalid_argument("MPO::dense: empty MPO");
    std::vector<MatrixXc> acc(static_cast<size_t>(tensors.front().dl), MatrixXc::Ones(1, 1));
    for (const auto& w : tensors) {
        std::vector<MatrixXc> next(static_cast<size_t>(w.dr));
        const Index d = acc.front().rows() * 2;
        for (auto& m : next)
            m = MatrixXc::Zero(d, d);
        for (Index a = 0; a < w.dl; ++a)
            for (Index b = 0; b < w.dr; ++b)
                if (!w.op(a, b).isZero(0.0))
                    next[static_cast<size_t>(b)] += kron(acc[static_cast<size_t>(a)], w.op(a, b));
        acc = std::move(next);
    }
    if (acc.size() != 1)
        throw std::invalid_argument("MPO::dense: open right boundary");
    return acc.front();
}

MPO rydberg_mpo(int n_sites, const RydbergParams& p)
{
    p.validate();
    if (n_sites < 2)
        throw std::invalid_argument("rydberg_mpo: n_sites must be >= 2");
    const int r = p.range_cutoff;
    const Index D = r + 2;
    Matrix2c num = Matrix2c::Zero();
    num(1, 1) = 1.0;
    const Matrix2c local = (p.omega / 2.0) * pauli_matrices::y() + p.delta * num;

    MPOTensor bulk{D, D, std::vector<Matrix2c>(static_cast<size_t>(D * D), Matrix2c::Zero())};
    bulk.op(0, 0) = Matrix2c::Identity();
    bulk.op(0, 1) = num;
    for (int k = 1; k < r; ++k)
        bulk.op(k, k + 1) = Matrix2c::Identity();
    for (int k = 1; k <= r; ++k)
        bulk.op(k, D - 1) = p.v / std::pow(static_cast<double>(k), p.alpha) * num;
    bulk.op(0, D - 1) = local;
    bulk.op(D - 1, D - 1) = Matrix2c::Identity();

    MPO mpo;
    for (int j = 0; j < n_sites; ++j) {
        const Index dl = j == 0 ? 1 : D;
        const Index dr = j == n_sites - 1 ? 1 : D;
        MPOTensor w{dl, dr, std::vector<Matrix2c>(static_cast<size_t>(dl * dr), Matrix2c::Zero())};
        for (Index a = 0; a < dl; ++a)
            for (Index b = 0; b < dr; ++b)
                w.op(a, b) = bulk.op(j == 0 ? 0 : a, j == n_sites - 1 ? D - 1 : b);
        mpo.tensors.push_back(std::move(w));
    }
    return mpo;
}

double mpo_expectation(const MPO& h, const FiniteMPS& psi)
{
    if (h.n_sites() != psi.n_sites())
        throw std::invalid_argument("mpo_expectation: size mismatch");
    const FiniteMPS open = open_boundary(psi);
    std::vector<MatrixXc> env{MatrixXc::Ones(1, 1)};
    for (int j = 0; j < h.n_sites(); ++j) {
        const auto& w = h.tensors[static_cast<size_t>(j)];
        const auto& a = open.tensors[static_cast<size_t>(j)];
        std::vector<MatrixXc> next(static_cast<size_t>(w.dr), MatrixXc::Zero(a[0].cols(), a[0].cols()));
        for (Index x = 0; x < w.dl; ++x)
            for (Index y = 0; y < w.dr; ++y) {
                const Matrix2c& op = w.op(x, y);
                for (int s = 0; s < 2; ++s)
                    for (int t = 0; t < 2; ++t)
                        if (op(t, s) != cplx(0.0))
                            next[static_cast<size_t>(y)] += op(t, s) * a[static_cast<size_t>(t)].adjoint() *
                                                            env[static_cast<size_t>(x)] * a[static_cast<size_t>(s)];
            }
        env = std::move(next);
    }
    return env.front()(0, 0).real() / mps_norm_squared(open);
}

int blockaded3_index(int k)
{
    static const int map[5] = {0, 1, 2, 4, 5};
    if (k < 0 || k > 4)
        throw std::out_of_range("blockaded3_index");
    return map[k];
}

ParentProjector parent_projector(double theta, double phi)
{
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    if (std::abs(c) < 1e-12 || std::abs(s) < 1e-12)
        throw std::invalid_argument("parent_projector: z undefined at theta = 0 or pi");
    ParentProjector p;
    p.theta = theta;
    p.phi = phi;
    p.z = s / (c * c);
    p.null_vector.setZero();
    p.null_vector(0) = -I * std::exp(-I * phi) * p.z;
    p.null_vector(2) = 1.0;
    p.null_vector /= std::sqrt(1.0 + p.z * p.z);
    p.blockaded = p.null_vector * p.null_vector.adjoint();
    p.matrix.setZero();
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            p.matrix(blockaded3_index(a), blockaded3_index(b)) = p.blockaded(a, b);
    return p;
}

Eigen::Matrix<cplx, 8, 8> parent_operator_form(double theta, double phi)
{
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    if (std::abs(c) < 1e-12 || std::abs(s) < 1e-12)
        throw std::invalid_argument("parent_operator_form: z undefined at theta = 0 or pi");
    const double z = s / (c * c);
    Matrix2c p0 = Matrix2c::Zero(), n1 = Matrix2c::Zero();
    p0(0, 0) = 1.0;
    n1(1, 1) = 1.0;
    const Matrix2c mid = z * p0 + n1 / z + std::cos(phi) * pauli_matrices::y() - std::sin(phi) * pauli_matrices::x();
    Eigen::Matrix<cplx, 8, 8> out = kron(kron(p0, mid), p0);
    return out * (z / (1.0 + z * z));
}

VectorXc apply_three_site_sum(const Eigen::Matrix<cplx, 8, 8>& op, const VectorXc& psi, int n_sites)
{
    if (psi.size() != (Index{1} << n_sites))
        throw std::invalid_argument("apply_three_site_sum: dimension mismatch");
    VectorXc out = VectorXc::Zero(psi.size());
    for (int j = 0; j + 2 < n_sites; ++j) {
        const int shift = n_sites - 3 - j;
        const Index mask = Index{7} << shift;
        for (Index b = 0; b < psi.size(); ++b) {
            if (psi(b) == cplx(0.0))
                continue;
            const Index k = (b & mask) >> shift;
            const Index rest = b & ~mask;
            for (Index kp = 0; kp < 8; ++kp)
                if (op(kp, k) != cplx(0.0))
                    out(rest | (kp << shift)) += op(kp, k) * psi(b);
        }
    }
    return out;
}

SparseMatrixXc parity_isometry(const ConstrainedBasis& basis, int sector)
{
    if (sector != 1 && sector != -1)
        throw std::invalid_argument("parity_isometry: sector must be +1 or -1");
    if (basis.bc != BC::open)
        throw std::invalid_argument("parity_isometry: reflection sectors are defined for open chains");
    Triplets t;
    Index col = 0;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (Index k = 0; k < basis.dim(); ++k) {
        const uint32_t s = basis.states[static_cast<size_t>(k)];
        const uint32_t r = reflect_bits(s, basis.n_sites);
        if (r == s) {
            if (sector == 1)
                t.emplace_back(k, col++, cplx(1.0));
        } else if (r > s) {
            t.emplace_back(k, col, cplx(r2));
            t.emplace_back(basis.find(r), col, cplx(sector * r2));
            ++col;
        }
    }
    SparseMatrixXc v(basis.dim(), col);
    v.setFromTriplets(t.begin(), t.end());
    v.makeCompressed();
    return v;
}

namespace {

Spectrum spectrum_from(const MatrixXc& h)
{
    auto eig = hermitian_eigs(h, 1e-10);
    Spectrum sp;
    sp.energies = eig.values;
    sp.vectors = std::move(eig.vectors);
    const Index n = sp.energies.size();
    sp.parity.assign(static_cast<size_t>(n), 0);
    sp.degenerate.assign(static_cast<size_t>(n), false);
    for (Index k = 0; k + 1 < n; ++k)
        if (std::abs(sp.energies(k + 1) - sp.energies(k)) < 1e-10)
            sp.degenerate[static_cast<size_t>(k)] = sp.degenerate[static_cast<size_t>(k + 1)] = true;
    return sp;
}

}  // namespace

Spectrum ed(const SparseHamiltonian& h, Index dim_cap)
{
    if (h.dim() > dim_cap)
        throw std::invalid_argument("ed: dimension " + std::to_string(h.dim()) + " exceeds the dense cap");
    Spectrum sp = spectrum_from(h.dense());
    if (h.parity)
        sp.parity.assign(sp.parity.size(), *h.parity);
    return sp;
}

Spectrum ed(const SparseHamiltonian& h, const ConstrainedBasis& basis, int parity_sector, Index dim_cap)
{
    if (h.dim() != basis.dim())
        throw std::invalid_argument("ed: Hamiltonian and basis dimensions differ");
    const SparseMatrixXc v = parity_isometry(basis, parity_sector);
    if (v.cols() > dim_cap)
        throw std::invalid_argument("ed: sector dimension exceeds the dense cap");
    const SparseMatrixXc hs = v.adjoint() * h.matrix * v;
    Spectrum sp = spectrum_from(MatrixXc(hs));
    sp.vectors = v * sp.vectors;
    sp.parity.assign(sp.parity.size(), parity_sector);
    return sp;
}

EigenPair ground_state(const SparseHamiltonian& h, double tol)
{
    const auto apply = [&h](const VectorXc& in, VectorXc& out) { out = h.matrix * in; };
    return lanczos_lowest(apply, h.dim(), tol);
}

}  // namespace rydmagic
