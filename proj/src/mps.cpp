#include "rydmagic/mps.hpp"

#include <bit>
#include <cmath>
#include <random>

namespace rydmagic {

Index UnitCellMPS::max_chi() const
{
    Index chi = 0;
    for (const auto& t : tensors)
        chi = std::max({chi, t[0].rows(), t[0].cols()});
    return chi;
}

void UnitCellMPS::validate() const
{
    if (tensors.empty())
        throw std::invalid_argument("UnitCellMPS: empty cell");
    const size_t n = tensors.size();
    for (size_t j = 0; j < n; ++j) {
        const auto& t = tensors[j];
        if (t[0].rows() != t[1].rows() || t[0].cols() != t[1].cols())
            throw std::invalid_argument("UnitCellMPS: A^0 and A^1 shapes differ");
        if (t[0].cols() != tensors[(j + 1) % n][0].rows())
            throw std::invalid_argument("UnitCellMPS: bond dimensions do not chain around the cell");
    }
}

Index FiniteMPS::max_chi() const
{
    Index chi = 0;
    for (const auto& t : tensors)
        chi = std::max({chi, t[0].rows(), t[0].cols()});
    return chi;
}

void FiniteMPS::validate() const
{
    if (tensors.empty())
        throw std::invalid_argument("FiniteMPS: no sites");
    for (size_t j = 0; j < tensors.size(); ++j) {
        const auto& t = tensors[j];
        if (t[0].rows() != t[1].rows() || t[0].cols() != t[1].cols())
            throw std::invalid_argument("FiniteMPS: A^0 and A^1 shapes differ");
        if (j + 1 < tensors.size() && t[0].cols() != tensors[j + 1][0].rows())
            throw std::invalid_argument("FiniteMPS: bond dimensions do not chain");
    }
    if (boundary == Boundary::open && (tensors.front()[0].rows() != 1 || tensors.back()[0].cols() != 1))
        throw std::invalid_argument("FiniteMPS: open chain needs unit boundary bonds");
    if (boundary == Boundary::periodic && tensors.front()[0].rows() != tensors.back()[0].cols())
        throw std::invalid_argument("FiniteMPS: periodic chain bond mismatch");
}

MatrixXc TransferFixedPoints::left_matrix() const
{
    const auto chi = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(left.size()))));
    return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(left.data(), chi, chi);
}

MatrixXc TransferFixedPoints::right_matrix() const
{
    const auto chi = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(right.size()))));
    return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(right.data(), chi, chi);
}

SiteTensor pxp_site(double theta, double phi)
{
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    SiteTensor a{MatrixXc::Zero(2, 2), MatrixXc::Zero(2, 2)};
    a[0](0, 0) = c;
    a[0](1, 0) = s;
    a[1](0, 1) = cplx(0, -1) * std::exp(cplx(0, phi));
    return a;
}

UnitCellMPS pxp_ansatz(double theta_o, double theta_e, double phi_o, double phi_e)
{
    return UnitCellMPS{{pxp_site(theta_o, phi_o), pxp_site(theta_e, phi_e)}};
}

UnitCellMPS single_site_cell(const SiteTensor& a) { return UnitCellMPS{{a}}; }

double h0_theta(double z)
{
    if (!(z > 0))
        throw std::invalid_argument("h0_theta: z must be positive");
    // rationalised root of z s^2 + s - z = 0, stable as z -> 0
    const double s = 2.0 * z / (1.0 + std::sqrt(1.0 + 4.0 * z * z));
    return 2.0 * std::asin(s);
}

UnitCellMPS h0_ground_state(double z)
{
    const double theta = h0_theta(z);
    return pxp_ansatz(theta, theta);
}

MatrixXc site_transfer(const SiteTensor& a, const Matrix2c& op)
{
    const Index chi_l = a[0].rows(), chi_r = a[0].cols();
    MatrixXc e = MatrixXc::Zero(chi_l * chi_l, chi_r * chi_r);
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            if (op(t, s) != cplx(0.0))
                e += op(t, s) * kron(a[s], a[t].conjugate());
    return e;
}

MatrixXc transfer_matrix(const UnitCellMPS& mps)
{
    mps.validate();
    MatrixXc e = site_transfer(mps.tensors[0]);
    for (int j = 1; j < mps.cell_size(); ++j)
        e = e * site_transfer(mps.tensors[static_cast<size_t>(j)]);
    return e;
}

namespace {

// Fix the phase so the reshaped matrix has positive real trace.
void fix_phase(VectorXc& v)
{
    const auto chi = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    cplx tr = 0.0;
    for (Index i = 0; i < chi; ++i)
        tr += v(i * chi + i);
    if (std::abs(tr) > 1e-300)
        v *= std::abs(tr) / tr;
}

MatrixXc unvec(const VectorXc& v, Index rows, Index cols)
{
    return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), rows, cols);
}

}  // namespace

TransferFixedPoints fixed_points(const UnitCellMPS& mps, double degeneracy_tol)
{
    const MatrixXc e = transfer_matrix(mps);
    EigenPair right, left;
    try {
        right = dominant_eigenpair_dense(e, degeneracy_tol);
        left = dominant_eigenpair_dense(e.transpose(), degeneracy_tol);
    } catch (const ConvergenceError&) {
        throw std::runtime_error("fixed_points: degenerate dominant eigenvalue (non-injective MPS)");
    }
    VectorXc r = right.vector, l = left.vector;
    fix_phase(r);
    fix_phase(l);
    const Index chi = mps.chi_left(0);
    cplx tr = 0.0;
    for (Index i = 0; i < chi; ++i)
        tr += r(i * chi + i);
    r /= tr;
    const cplx overlap = l.transpose() * r;
    if (std::abs(overlap) < 1e-14)
        throw std::runtime_error("fixed_points: orthogonal left/right fixed points");
    l /= overlap;
    return {right.value, l, r};
}

MatrixXc rdm(const UnitCellMPS& mps, int k, int offset)
{
    if (k < 1 || k > 6)
        throw std::invalid_argument("rdm: k out of range");
    const int cell = mps.cell_size();
    offset = ((offset % cell) + cell) % cell;
    const auto fp = fixed_points(mps);

    // left vector at the bond before site `offset`
    VectorXc l = fp.left;
    for (int j = 0; j < offset; ++j)
        l = (l.transpose() * site_transfer(mps.tensors[static_cast<size_t>(j)])).transpose();
    // right vector at the bond after site offset+k-1
    const int end = (offset + k) % cell;
    VectorXc r = fp.right;
    for (int j = cell - 1; j >= end && end != 0; --j)
        r = site_transfer(mps.tensors[static_cast<size_t>(j)]) * r;

    const Index chi_l = mps.chi_left(offset);
    const Index chi_r = mps.chi_right((offset + k - 1) % cell);
    const MatrixXc lm = unvec(l, chi_l, chi_l);
    const MatrixXc rm = unvec(r, chi_r, chi_r);

    const Index dim = Index{1} << k;
    std::vector<MatrixXc> strings(static_cast<size_t>(dim));
    for (Index s = 0; s < dim; ++s) {
        MatrixXc m = MatrixXc::Identity(chi_l, chi_l);
        for (int j = 0; j < k; ++j) {
            const int bit = static_cast<int>((s >> (k - 1 - j)) & 1);
            m = m * mps.tensors[static_cast<size_t>((offset + j) % cell)][static_cast<size_t>(bit)];
        }
        strings[static_cast<size_t>(s)] = m;
    }
    MatrixXc rho(dim, dim);
    const MatrixXc lt = lm.transpose();
    for (Index s = 0; s < dim; ++s) {
        const MatrixXc left_part = lt * strings[static_cast<size_t>(s)] * rm;
        for (Index t = 0; t < dim; ++t)
            rho(s, t) = (left_part * strings[static_cast<size_t>(t)].adjoint()).trace();
    }
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

MatrixXc bond_density(const UnitCellMPS& mps, int site)
{
    const int cell = mps.cell_size();
    const auto fp = fixed_points(mps);
    const int bond = (site + 1) % cell;
    VectorXc r = fp.right;
    for (int j = cell - 1; j >= bond && bond != 0; --j)
        r = site_transfer(mps.tensors[static_cast<size_t>(j)]) * r;
    const Index chi = mps.chi_left(bond);
    MatrixXc rho = unvec(r, chi, chi);
    rho = 0.5 * (rho + rho.adjoint());
    return rho / rho.trace();
}

UnitCellMPS normalized(const UnitCellMPS& mps)
{
    const auto fp = fixed_points(mps);
    const double lam = std::abs(fp.lam);
    if (!(lam > 0))
        throw std::runtime_error("normalized: zero transfer eigenvalue");
    const double scale = std::pow(lam, -0.5 / mps.cell_size());
    UnitCellMPS out = mps;
    for (auto& t : out.tensors) {
        t[0] *= scale;
        t[1] *= scale;
    }
    return out;
}

SiteTensor rotate_site(const SiteTensor& a, const Matrix2c& u)
{
    return SiteTensor{u(0, 0) * a[0] + u(0, 1) * a[1], u(1, 0) * a[0] + u(1, 1) * a[1]};
}

SiteTensor scar_b()
{
    const double r2 = std::sqrt(2.0);
    SiteTensor b{MatrixXc::Zero(2, 3), MatrixXc::Zero(2, 3)};
    b[0](0, 0) = 1;
    b[0](1, 1) = 1;
    b[1](1, 0) = r2;
    b[1](1, 2) = r2;
    return b;
}

SiteTensor scar_c()
{
    const double r2 = std::sqrt(2.0);
    SiteTensor c{MatrixXc::Zero(3, 2), MatrixXc::Zero(3, 2)};
    c[0](0, 1) = -1;
    c[0](1, 0) = 1;
    c[1](0, 0) = r2;
    c[1](2, 0) = -r2;
    return c;
}

UnitCellMPS scar_cell() { return UnitCellMPS{{scar_b(), scar_c()}}; }

std::pair<FiniteMPS, FiniteMPS> scar_mps_pair(int n_sites)
{
    if (n_sites < 2 || n_sites % 2 != 0)
        throw std::invalid_argument("scar_mps_pair: n_sites must be even and >= 2");
    FiniteMPS p1, p2;
    p1.boundary = p2.boundary = Boundary::periodic;
    for (int j = 0; j < n_sites; ++j) {
        p1.tensors.push_back(j % 2 == 0 ? scar_b() : scar_c());
        p2.tensors.push_back(j % 2 == 0 ? scar_c() : scar_b());
    }
    return {p1, p2};
}

std::vector<uint32_t> pbc_strings(int L)
{
    if (L < 1 || L > 30)
        throw std::invalid_argument("pbc_strings: L out of range");
    std::vector<uint32_t> out;
    const uint32_t top = 1u << (L - 1);
    for (uint32_t f = 0; f < (1u << L); ++f) {
        if (f & (f >> 1))
            continue;
        if (L > 1 && (f & 1u) && (f & top))
            continue;
        out.push_back(f);
    }
    return out;
}

VectorXc rainbow_state(int L)
{
    if (L < 3 || 2 * L > statevector_max_sites)
        throw std::invalid_argument("rainbow_state: L out of range");
    const auto strings = pbc_strings(L);
    VectorXc psi = VectorXc::Zero(Index{1} << (2 * L));
    const double amp = 1.0 / std::sqrt(static_cast<double>(strings.size()));
    for (uint32_t f : strings) {
        const uint64_t idx = (static_cast<uint64_t>(f) << L) | f;
        psi(static_cast<Index>(idx)) = (std::popcount(f) % 2 == 0 ? amp : -amp);
    }
    return psi;
}

FiniteMPS to_finite(const UnitCellMPS& mps, int n_sites, const VectorXc& left, const VectorXc& right)
{
    mps.validate();
    if (n_sites < 1)
        throw std::invalid_argument("to_finite: n_sites must be positive");
    const int cell = mps.cell_size();
    FiniteMPS out;
    out.boundary = Boundary::open;
    for (int j = 0; j < n_sites; ++j)
        out.tensors.push_back(mps.tensors[static_cast<size_t>(j % cell)]);
    if (left.size() != out.tensors.front()[0].rows() || right.size() != out.tensors.back()[0].cols())
        throw std::invalid_argument("to_finite: boundary vector dimension mismatch");
    for (auto& a : out.tensors.front())
        a = (left.transpose() * a).eval();
    for (auto& a : out.tensors.back())
        a = (a * right).eval();
    return out;
}

FiniteMPS to_finite(const UnitCellMPS& mps, int n_sites)
{
    const Index chi_l = mps.chi_left(0);
    const Index chi_r = mps.chi_right((n_sites - 1) % mps.cell_size());
    VectorXc left = VectorXc::Zero(chi_l);
    left(0) = 1.0;
    return to_finite(mps, n_sites, left, VectorXc::Ones(chi_r));
}

FiniteMPS open_boundary(const FiniteMPS& mps)
{
    mps.validate();
    if (mps.boundary == Boundary::open)
        return mps;
    const Index d0 = mps.tensors.front()[0].rows();
    const int n = mps.n_sites();
    FiniteMPS out;
    out.boundary = Boundary::open;
    out.tensors.resize(static_cast<size_t>(n));
    const MatrixXc id = MatrixXc::Identity(d0, d0);
    for (int j = 0; j < n; ++j) {
        const auto& a = mps.tensors[static_cast<size_t>(j)];
        for (int s = 0; s < 2; ++s) {
            const MatrixXc& m = a[static_cast<size_t>(s)];
            MatrixXc t;
            if (n == 1) {
                t = MatrixXc::Constant(1, 1, m.trace());
            } else if (j == 0) {
                // row index (j_right, a) with a the carried first bond
                t.resize(1, m.cols() * d0);
                for (Index jr = 0; jr < m.cols(); ++jr)
                    for (Index c = 0; c < d0; ++c)
                        t(0, jr * d0 + c) = m(c, jr);
            } else if (j == n - 1) {
                t.resize(m.rows() * d0, 1);
                for (Index jl = 0; jl < m.rows(); ++jl)
                    for (Index c = 0; c < d0; ++c)
                        t(jl * d0 + c, 0) = m(jl, c);
            } else {
                t = kron(m, id);
            }
            out.tensors[static_cast<size_t>(j)][static_cast<size_t>(s)] = t;
        }
    }
    return out;
}

VectorXc contract(const FiniteMPS& mps)
{
    const FiniteMPS open = open_boundary(mps);
    const int n = open.n_sites();
    if (n > statevector_max_sites)
        throw std::invalid_argument("contract: too many sites for a dense state vector");
    MatrixXc v = MatrixXc::Ones(1, 1);
    for (int j = 0; j < n; ++j) {
        const auto& a = open.tensors[static_cast<size_t>(j)];
        MatrixXc next(v.rows() * 2, a[0].cols());
        for (Index r = 0; r < v.rows(); ++r)
            for (int s = 0; s < 2; ++s)
                next.row(2 * r + s) = v.row(r) * a[static_cast<size_t>(s)];
        v = std::move(next);
    }
    return v.col(0);
}

StateVector mps_to_statevector(const FiniteMPS& mps)
{
    VectorXc psi = contract(mps);
    const double norm = psi.norm();
    if (!(norm > 0))
        throw std::runtime_error("mps_to_statevector: zero-norm state");
    return {psi / norm, norm};
}

StateVector mps_to_statevector(const UnitCellMPS& mps, int n_sites)
{
    if (n_sites > statevector_max_sites)
        throw std::invalid_argument("mps_to_statevector: too many sites for a dense state vector");
    return mps_to_statevector(to_finite(mps, n_sites));
}

FiniteMPS concatenate(const FiniteMPS& a, const FiniteMPS& b)
{
    if (a.boundary != Boundary::open || b.boundary != Boundary::open)
        throw std::invalid_argument("concatenate: open chains only");
    FiniteMPS out = a;
    out.tensors.insert(out.tensors.end(), b.tensors.begin(), b.tensors.end());
    return out;
}

FiniteMPS random_mps(int n_sites, Index chi, uint64_t seed, Boundary boundary)
{
    if (n_sites < 2 || chi < 1)
        throw std::invalid_argument("random_mps: bad size");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FiniteMPS out;
    out.boundary = boundary;
    for (int j = 0; j < n_sites; ++j) {
        Index chi_l = chi, chi_r = chi;
        if (boundary == Boundary::open) {
            chi_l = j == 0 ? 1 : chi;
            chi_r = j == n_sites - 1 ? 1 : chi;
        }
        SiteTensor a;
        for (auto& m : a) {
            m.resize(chi_l, chi_r);
            for (Index r = 0; r < chi_l; ++r)
                for (Index c = 0; c < chi_r; ++c) {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    m(r, c) = cplx(re, im) / std::sqrt(2.0 * static_cast<double>(chi));
                }
        }
        out.tensors.push_back(a);
    }
    return out;
}

namespace {

// Left environment X -> sum_s A^s' X A^s with an operator on one site.
MatrixXc env_step(const MatrixXc& x, const SiteTensor& a, const Matrix2c& op)
{
    MatrixXc out = MatrixXc::Zero(a[0].cols(), a[0].cols());
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            if (op(t, s) != cplx(0.0))
                out += op(t, s) * a[static_cast<size_t>(t)].adjoint() * x * a[static_cast<size_t>(s)];
    return out;
}

}  // namespace

double mps_norm_squared(const FiniteMPS& mps)
{
    const FiniteMPS open = open_boundary(mps);
    MatrixXc x = MatrixXc::Ones(1, 1);
    for (const auto& a : open.tensors)
        x = env_step(x, a, Matrix2c::Identity());
    return x(0, 0).real();
}

cplx mps_expectation(const FiniteMPS& mps, int site, const Matrix2c& op)
{
    const FiniteMPS open = open_boundary(mps);
    if (site < 0 || site >= open.n_sites())
        throw std::out_of_range("mps_expectation: site out of range");
    MatrixXc x = MatrixXc::Ones(1, 1), y = MatrixXc::Ones(1, 1);
    for (int j = 0; j < open.n_sites(); ++j) {
        const auto& a = open.tensors[static_cast<size_t>(j)];
        x = env_step(x, a, j == site ? op : Matrix2c::Identity());
        y = env_step(y, a, Matrix2c::Identity());
    }
    return x(0, 0) / y(0, 0);
}

MatrixXc finite_rdm(const FiniteMPS& mps, int site, int k)
{
    const FiniteMPS open = open_boundary(mps);
    const int n = open.n_sites();
    if (k < 1 || site < 0 || site + k > n)
        throw std::out_of_range("finite_rdm: window outside the chain");
    // environments rescaled at every step; the final trace fixes the norm
    MatrixXc left = MatrixXc::Ones(1, 1);
    for (int j = 0; j < site; ++j) {
        const auto& a = open.tensors[static_cast<size_t>(j)];
        MatrixXc next = a[0].transpose() * left * a[0].conjugate() + a[1].transpose() * left * a[1].conjugate();
        left = next / next.cwiseAbs().maxCoeff();
    }
    MatrixXc right = MatrixXc::Ones(1, 1);
    for (int j = n - 1; j >= site + k; --j) {
        const auto& a = open.tensors[static_cast<size_t>(j)];
        MatrixXc next = a[0] * right * a[0].adjoint() + a[1] * right * a[1].adjoint();
        right = next / next.cwiseAbs().maxCoeff();
    }
    const Index dim = Index{1} << k;
    std::vector<MatrixXc> strings(static_cast<size_t>(dim));
    for (Index s = 0; s < dim; ++s) {
        MatrixXc m = MatrixXc::Identity(left.rows(), left.rows());
        for (int j = 0; j < k; ++j)
            m = m * open.tensors[static_cast<size_t>(site + j)][static_cast<size_t>((s >> (k - 1 - j)) & 1)];
        strings[static_cast<size_t>(s)] = std::move(m);
    }
    MatrixXc rho(dim, dim);
    for (Index s = 0; s < dim; ++s)
        for (Index t = 0; t < dim; ++t)
            rho(s, t) = left.cwiseProduct(strings[static_cast<size_t>(s)] * right * strings[static_cast<size_t>(t)].adjoint()).sum();
    return rho / rho.trace();
}

}  // namespace rydmagic
