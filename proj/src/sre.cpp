#include "rydmagic/sre.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "rydmagic/pauli.hpp"

namespace rydmagic {

std::string to_string(SREMethod m)
{
    switch (m) {
    case SREMethod::direct: return "direct";
    case SREMethod::replica: return "replica";
    case SREMethod::pauli_basis: return "pauli_basis";
    case SREMethod::mixed: return "mixed";
    }
    return "unknown";
}

namespace {

void check_order(int n)
{
    if (n < 2)
        throw std::invalid_argument("SRE order n must be an integer >= 2");
}

double ipow(double x, int k)
{
    double r = 1.0;
    for (int i = 0; i < k; ++i)
        r *= x;
    return r;
}

}  // namespace

VectorXc embed(const VectorXc& psi, const ConstrainedBasis& basis)
{
    if (psi.size() != basis.dim())
        throw std::invalid_argument("embed: vector length differs from basis dimension");
    VectorXc full = VectorXc::Zero(Index{1} << basis.n_sites);
    for (Index k = 0; k < basis.dim(); ++k)
        full(static_cast<Index>(basis.states[static_cast<size_t>(k)])) = psi(k);
    return full;
}

SREResult sre_direct(const VectorXc& psi, int n)
{
    check_order(n);
    const Index dim = psi.size();
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw std::invalid_argument("sre_direct: length must be 2^N");
    const int nsites = std::countr_zero(static_cast<uint64_t>(dim));
    if (nsites > sre_direct_max_sites)
        throw std::invalid_argument("sre_direct: N exceeds the 4^N cost cap");
    if (std::abs(psi.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("sre_direct: state is not normalised");

    std::vector<uint64_t> support;
    for (Index b = 0; b < dim; ++b)
        if (std::norm(psi(b)) > 0.0)
            support.push_back(static_cast<uint64_t>(b));

    // For each X-mask, the Z-dependence of <P> is a Walsh-Hadamard transform.
    std::vector<cplx> f(static_cast<size_t>(dim));
    double total = 0.0;
    for (uint64_t x = 0; x < static_cast<uint64_t>(dim); ++x) {
        std::fill(f.begin(), f.end(), cplx(0.0));
        bool any = false;
        for (uint64_t b : support) {
            const cplx v = std::conj(psi(static_cast<Index>(b ^ x))) * psi(static_cast<Index>(b));
            if (v != cplx(0.0)) {
                f[b] = v;
                any = true;
            }
        }
        if (!any)
            continue;
        fwht(f);
        for (const auto& v : f)
            total += ipow(std::norm(v), n);
    }
    SREResult r;
    r.method = SREMethod::direct;
    r.n_sites = nsites;
    r.M = std::log(total / static_cast<double>(dim)) / (1.0 - n);
    if (std::abs(r.M) < 1e-13)
        r.M = 0.0;
    r.m = r.M / nsites;
    return r;
}

SREResult sre_direct(const VectorXc& psi, const ConstrainedBasis& basis, int n) { return sre_direct(embed(psi, basis), n); }

namespace {

// Per-site replica data: E_alpha = sum_{s,t} sigma^alpha(t,s) A^s (x) conj(A^t), chi_l^2 x chi_r^2.
struct ReplicaSite {
    std::array<MatrixXc, 4> e;
    Index dl = 0, dr = 0;
};

ReplicaSite make_replica_site(const SiteTensor& a)
{
    ReplicaSite r;
    for (int alpha = 0; alpha < 4; ++alpha)
        r.e[static_cast<size_t>(alpha)] = site_transfer(a, pauli_matrices::by_code(alpha));
    r.dl = r.e[0].rows();
    r.dr = r.e[0].cols();
    return r;
}

Index ipow_index(Index b, int k)
{
    Index r = 1;
    for (int i = 0; i < k; ++i)
        r *= b;
    return r;
}

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// in: [P][b][S] row-major, out: [P][a][S], out = E applied to the middle mode.
void mode_product(const MatrixXc& e, const cplx* in, cplx* out, Index p, Index s)
{
    const Index a = e.rows(), b = e.cols();
    if (s >= p) {
        for (Index k = 0; k < p; ++k) {
            Eigen::Map<const RowMat> src(in + k * b * s, b, s);
            Eigen::Map<RowMat> dst(out + k * a * s, a, s);
            dst.noalias() = e * src;
        }
    } else {
        using Stride = Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>;
        const MatrixXc et = e.transpose();
        for (Index q = 0; q < s; ++q) {
            Eigen::Map<const RowMat, 0, Stride> src(in + q, p, b, Stride(b * s, s));
            Eigen::Map<RowMat, 0, Stride> dst(out + q, p, a, Stride(a * s, s));
            dst.noalias() = src * et;
        }
    }
}

// out = tau in, with tau = (1/2) sum_alpha E_alpha^{(x) 2n}. `batch` trailing columns are independent.
void apply_tau(const ReplicaSite& site, int n, const VectorXc& in, VectorXc& out, Index batch = 1)
{
    const int modes = 2 * n;
    const Index out_dim = ipow_index(site.dl, modes) * batch;
    out.setZero(out_dim);
    std::vector<cplx> buf_a, buf_b;
    for (int alpha = 0; alpha < 4; ++alpha) {
        const MatrixXc& e = site.e[static_cast<size_t>(alpha)];
        if (e.isZero(0.0))
            continue;
        buf_a.assign(in.data(), in.data() + in.size());
        // modes before m already have dimension dl, modes after still dr
        for (int m = 0; m < modes; ++m) {
            const Index p = ipow_index(site.dl, m);
            const Index s = ipow_index(site.dr, modes - 1 - m) * batch;
            buf_b.resize(static_cast<size_t>(p * site.dl * s));
            mode_product(e, buf_a.data(), buf_b.data(), p, s);
            std::swap(buf_a, buf_b);
        }
        out += Eigen::Map<const VectorXc>(buf_a.data(), out_dim);
    }
    out *= 0.5;
}

// ln of the dominant eigenvalue of the ordinary cell transfer matrix
double log_norm_factor(const UnitCellMPS& mps)
{
    const MatrixXc e = transfer_matrix(mps);
    const EigenPair ep = dominant_eigenpair_dense(e);
    if (!(ep.value.real() > 0))
        throw std::runtime_error("transfer matrix dominant eigenvalue is not positive");
    return std::log(ep.value.real());
}

}  // namespace

SREResult sre_replica_density(const UnitCellMPS& mps, int n, const ReplicaOptions& opt)
{
    check_order(n);
    mps.validate();
    const int cell = mps.cell_size();
    std::vector<ReplicaSite> sites;
    Index largest = 0;
    for (const auto& t : mps.tensors) {
        sites.push_back(make_replica_site(t));
        largest = std::max(largest, ipow_index(sites.back().dl, 2 * n));
    }
    if (largest > opt.replica_dim_cap) {
        // too large for the replica transfer matrix: difference of finite Pauli-basis chains
        const int cells_a = 6, cells_b = 10;
        const auto fa = to_finite(mps, cells_a * cell), fb = to_finite(mps, cells_b * cell);
        const auto ra = sre_pauli_basis(fa, n), rb = sre_pauli_basis(fb, n);
        SREResult r;
        r.method = SREMethod::pauli_basis;
        r.m = (rb.M - ra.M) / ((cells_b - cells_a) * cell);
        r.discarded_weight = ra.discarded_weight + rb.discarded_weight;
        r.status = (ra.status == Status::ok && rb.status == Status::ok) ? Status::ok : Status::warning;
        r.note = "replica dimension above cap; finite-chain difference estimate";
        return r;
    }

    const double log_e = log_norm_factor(mps);
    const Index dim = ipow_index(sites.front().dl, 2 * n);
    VectorXc tmp;
    const auto apply = [&](const VectorXc& in, VectorXc& out) {
        VectorXc cur = in;
        for (int j = cell - 1; j >= 0; --j) {
            apply_tau(sites[static_cast<size_t>(j)], n, cur, tmp);
            cur.swap(tmp);
        }
        out = std::move(cur);
    };
    const auto apply_batch = [&](Index cols) {
        // identity batch: row-major [state][column] equals the materialised matrix
        VectorXc cur = VectorXc::Zero(dim * cols);
        for (Index k = 0; k < cols; ++k)
            cur(k * cols + k) = 1.0;
        for (int j = cell - 1; j >= 0; --j) {
            apply_tau(sites[static_cast<size_t>(j)], n, cur, tmp, cols);
            cur.swap(tmp);
        }
        return MatrixXc(Eigen::Map<const RowMat>(cur.data(), dim, cols));
    };

    EigenPair ep;
    std::string note;
    try {
        ep = dominant_eigenpair(apply, dim, opt.tol, opt.max_iter, opt.start);
    } catch (const ConvergenceError&) {
        if (dim > 7000)
            throw;
        ep = dominant_eigenpair_dense(apply_batch(dim));
        note = "dense fallback";
    }
    const double lam = ep.value.real();
    if (!(lam > 0) || std::abs(ep.value.imag()) > 1e-8 * std::abs(lam))
        throw std::runtime_error("sre_replica_density: dominant replica eigenvalue is not positive");

    SREResult r;
    r.method = SREMethod::replica;
    r.lambda0 = std::exp(std::log(lam) - 2.0 * n * log_e);
    double m = (std::log(lam) - 2.0 * n * log_e) / ((1.0 - n) * cell);
    if (std::abs(m) < 1e-13)
        m = 0.0;
    r.m = m;
    r.iterations = ep.iterations;
    r.note = note;
    if (opt.keep_vector)
        r.replica_vector = ep.vector;
    return r;
}

SREResult sre_finite_replica(const FiniteMPS& mps, int n)
{
    check_order(n);
    mps.validate();
    const int nsites = mps.n_sites();
    std::vector<ReplicaSite> sites;
    for (const auto& t : mps.tensors)
        sites.push_back(make_replica_site(t));

    const Index d0 = sites.front().dl;  // chi^2 of the cut bond, 1 for open chains
    const Index cols = ipow_index(d0, 2 * n);
    Index largest = 0;
    for (const auto& s : sites)
        largest = std::max(largest, ipow_index(s.dl, 2 * n));
    if (largest * cols > Index{60'000'000})
        throw std::invalid_argument("sre_finite_replica: replica contraction exceeds the memory guard");

    // Trace over the cut bond: start from the identity batch on the last bond.
    VectorXc cur = VectorXc::Zero(cols * cols), tmp;
    for (Index k = 0; k < cols; ++k)
        cur(k * cols + k) = 1.0;
    for (int j = nsites - 1; j >= 0; --j) {
        apply_tau(sites[static_cast<size_t>(j)], n, cur, tmp, cols);
        cur.swap(tmp);
    }
    cplx num = 0.0;
    for (Index k = 0; k < cols; ++k)
        num += cur(k * cols + k);

    // norm: same contraction with the plain transfer matrices
    MatrixXc env = MatrixXc::Identity(d0, d0);
    for (int j = nsites - 1; j >= 0; --j)
        env = sites[static_cast<size_t>(j)].e[0] * env;
    const double norm2 = env.trace().real();
    if (!(norm2 > 0))
        throw std::runtime_error("sre_finite_replica: zero-norm state");

    SREResult r;
    r.method = SREMethod::replica;
    r.n_sites = nsites;
    // tau carries a factor 1/2 per site already
    r.M = (std::log(num.real()) - 2.0 * n * std::log(norm2)) / (1.0 - n);
    if (std::abs(r.M) < 1e-13)
        r.M = 0.0;
    r.m = r.M / nsites;
    return r;
}

namespace {

// Pauli-basis MPS with four physical values per site.
using PauliSite = std::array<MatrixXc, 4>;

struct PauliMPS {
    std::vector<PauliSite> sites;
    double log_scale = 0.0;  // state = exp(log_scale) * normalised tensors
};

// Left-canonicalise with QR, then truncate right-to-left with SVD.
double compress(PauliMPS& p, Index chi_max, double tol)
{
    const size_t n = p.sites.size();
    for (size_t j = 0; j + 1 < n; ++j) {
        auto& s = p.sites[j];
        const Index cl = s[0].rows(), cr = s[0].cols();
        MatrixXc m(4 * cl, cr);
        for (int a = 0; a < 4; ++a)
            m.middleRows(a * cl, cl) = s[static_cast<size_t>(a)];
        Eigen::HouseholderQR<MatrixXc> qr(m);
        const Index k = std::min(4 * cl, cr);
        const MatrixXc q = qr.householderQ() * MatrixXc::Identity(4 * cl, k);
        MatrixXc rr = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        const double nr = rr.norm();
        if (!(nr > 0))
            throw std::runtime_error("sre_pauli_basis: zero Pauli vector");
        rr /= nr;
        p.log_scale += std::log(nr);
        for (int a = 0; a < 4; ++a)
            s[static_cast<size_t>(a)] = q.middleRows(a * cl, cl);
        for (auto& t : p.sites[j + 1])
            t = (rr * t).eval();
    }
    double discarded = 0.0;
    for (size_t j = n - 1; j > 0; --j) {
        auto& s = p.sites[j];
        const Index cl = s[0].rows(), cr = s[0].cols();
        MatrixXc m(cl, 4 * cr);
        for (int a = 0; a < 4; ++a)
            m.middleCols(a * cr, cr) = s[static_cast<size_t>(a)];
        auto svd = svd_truncate(m, chi_max, tol);
        const double total = svd.s.squaredNorm() + svd.discarded_weight;
        discarded += svd.discarded_weight / total;
        const double ns = svd.s.norm();
        p.log_scale += std::log(ns);
        svd.s /= ns;
        for (int a = 0; a < 4; ++a)
            s[static_cast<size_t>(a)] = svd.vh.middleCols(a * cr, cr);
        const MatrixXc us = svd.u * svd.s.asDiagonal();
        for (auto& t : p.sites[j - 1])
            t = (t * us).eval();
    }
    double n0 = 0.0;
    for (const auto& t : p.sites[0])
        n0 += t.squaredNorm();
    n0 = std::sqrt(n0);
    p.log_scale += std::log(n0);
    for (auto& t : p.sites[0])
        t /= n0;
    return discarded;
}

}  // namespace

SREResult sre_pauli_basis(const FiniteMPS& mps, int n, Index chi_p, double tol, double truncation_budget)
{
    check_order(n);
    const FiniteMPS open = open_boundary(mps);
    const int nsites = open.n_sites();
    const double norm2 = mps_norm_squared(open);
    if (!(norm2 > 0))
        throw std::runtime_error("sre_pauli_basis: zero-norm state");

    PauliMPS p;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const auto& t : open.tensors) {
        PauliSite s;
        for (int a = 0; a < 4; ++a)
            s[static_cast<size_t>(a)] = site_transfer(t, pauli_matrices::by_code(a)) * inv_sqrt2;
        p.sites.push_back(std::move(s));
    }
    // unnormalised psi scales every component by norm2
    p.log_scale -= std::log(norm2);
    double discarded = compress(p, chi_p, tol);

    const PauliMPS w = p;
    PauliMPS cur = p;
    for (int k = 1; k < n; ++k) {
        for (size_t j = 0; j < cur.sites.size(); ++j)
            for (int a = 0; a < 4; ++a)
                cur.sites[j][static_cast<size_t>(a)] =
                    kron(cur.sites[j][static_cast<size_t>(a)], w.sites[j][static_cast<size_t>(a)]);
        cur.log_scale += w.log_scale;
        discarded += compress(cur, chi_p, tol);
    }

    SREResult r;
    r.method = SREMethod::pauli_basis;
    r.n_sites = nsites;
    r.discarded_weight = discarded;
    r.M = (2.0 * cur.log_scale) / (1.0 - n) - nsites * std::log(2.0);
    if (std::abs(r.M) < 1e-12)
        r.M = 0.0;
    r.m = r.M / nsites;
    if (discarded > truncation_budget) {
        r.status = Status::warning;
        r.note = "discarded weight above budget";
    }
    return r;
}

SREResult sre_finite(const FiniteMPS& mps, const SRERequest& req)
{
    switch (req.method) {
    case SREMethod::direct: {
        const auto sv = mps_to_statevector(mps);
        return sre_direct(sv.psi, req.n);
    }
    case SREMethod::replica: return sre_finite_replica(mps, req.n);
    case SREMethod::pauli_basis: return sre_pauli_basis(mps, req.n, req.chi_p, req.tol, req.truncation_budget);
    case SREMethod::mixed: throw std::invalid_argument("sre_finite: mixed method needs a density matrix");
    }
    throw std::invalid_argument("sre_finite: unknown method");
}

void validate_density_matrix(const MatrixXc& rho, double tol)
{
    if (rho.rows() != rho.cols())
        throw std::invalid_argument("density matrix must be square");
    if (!is_hermitian(rho, tol))
        throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > tol)
        throw std::invalid_argument("density matrix does not have unit trace");
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("density matrix is not positive semidefinite");
}

Eigen::VectorXd pauli_vector(const MatrixXc& rho)
{
    const Index dim = rho.rows();
    const int k = std::countr_zero(static_cast<uint64_t>(dim));
    if (dim < 2 || (Index{1} << k) != dim || k > 6)
        throw std::invalid_argument("pauli_vector: dimension must be 2^k with k <= 6");
    const Index count = Index{1} << (2 * k);
    Eigen::VectorXd out(count);
    for (Index idx = 0; idx < count; ++idx) {
        PauliString p;
        for (int j = 0; j < k; ++j)
            p.codes.push_back(static_cast<uint8_t>((idx >> (2 * (k - 1 - j))) & 3));
        const PauliMasks m = to_masks(p);
        // tr(rho P) = sum_b <b^x| ... : P|b> = phase |b^x>, so tr = sum_b phase_b rho(b, b^x)
        cplx acc = 0.0;
        for (Index b = 0; b < dim; ++b) {
            const auto ub = static_cast<uint64_t>(b);
            const cplx term = rho(b, static_cast<Index>(ub ^ m.x));
            acc += (std::popcount(ub & m.z) & 1) ? -term : term;
        }
        static const cplx iphase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        acc *= iphase[std::popcount(m.x & m.z) & 3];
        out(idx) = acc.real();
    }
    return out;
}

double mixed_sre_total(const MatrixXc& rho)
{
    validate_density_matrix(rho);
    const Eigen::VectorXd v = pauli_vector(rho);
    const double s2 = v.squaredNorm();
    const double s4 = v.array().pow(4).sum();
    const double m = -std::log(s4 / s2);
    return std::abs(m) < 1e-13 ? 0.0 : m;
}

double sre_mixed(const MatrixXc& rho2)
{
    if (rho2.rows() != 4)
        throw std::invalid_argument("sre_mixed: expects a two-qubit density matrix");
    return 0.5 * mixed_sre_total(rho2);
}

double sre_mixed_1q(const MatrixXc& rho1)
{
    if (rho1.rows() != 2)
        throw std::invalid_argument("sre_mixed_1q: expects a one-qubit density matrix");
    return mixed_sre_total(rho1);
}

Matrix2c long_range_rotation(double gamma)
{
    // S^dag exp(i g Y) S with S = diag(1, i) equals exp(i g X)
    Matrix2c u;
    u << std::cos(gamma), cplx(0, std::sin(gamma)), cplx(0, std::sin(gamma)), std::cos(gamma);
    return u;
}

namespace {

double rotated_density(const UnitCellMPS& mps, int n, double go, double ge)
{
    UnitCellMPS r = mps;
    for (int j = 0; j < r.cell_size(); ++j)
        r.tensors[static_cast<size_t>(j)] = rotate_site(r.tensors[static_cast<size_t>(j)], long_range_rotation(j % 2 == 0 ? go : ge));
    return sre_replica_density(r, n).m;
}

double wrap_pi(double g)
{
    g = std::fmod(g, M_PI);
    return g < 0 ? g + M_PI : g;
}

}  // namespace

LongRangeResult sre_long_range(const UnitCellMPS& mps, int n, int grid)
{
    if (grid < 2)
        throw std::invalid_argument("sre_long_range: grid must be >= 2");
    LongRangeResult res;
    int evals = 0;
    const auto f = [&](double go, double ge) {
        ++evals;
        return rotated_density(mps, n, wrap_pi(go), wrap_pi(ge));
    };
    double best = std::numeric_limits<double>::infinity();
    double bo = 0, be = 0;
    const double step = M_PI / grid;
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            const double v = f(a * step, b * step);
            if (a == 0 && b == 0)
                res.m = v;
            if (v < best - 1e-14) {
                best = v;
                bo = a * step;
                be = b * step;
            }
        }

    // Nelder-Mead on the torus, seeded at the best grid point.
    std::array<std::array<double, 2>, 3> x{{{bo, be}, {bo + step / 2, be}, {bo, be + step / 2}}};
    std::array<double, 3> fx{best, f(x[1][0], x[1][1]), f(x[2][0], x[2][1])};
    res.converged = false;
    for (int it = 0; it < 200; ++it) {
        std::array<int, 3> ord{0, 1, 2};
        std::sort(ord.begin(), ord.end(), [&](int i, int j) { return fx[static_cast<size_t>(i)] < fx[static_cast<size_t>(j)]; });
        auto xs = x;
        auto fs = fx;
        for (int k = 0; k < 3; ++k) {
            x[static_cast<size_t>(k)] = xs[static_cast<size_t>(ord[static_cast<size_t>(k)])];
            fx[static_cast<size_t>(k)] = fs[static_cast<size_t>(ord[static_cast<size_t>(k)])];
        }
        const double size = std::max(std::abs(x[1][0] - x[0][0]) + std::abs(x[1][1] - x[0][1]),
                                     std::abs(x[2][0] - x[0][0]) + std::abs(x[2][1] - x[0][1]));
        if (fx[2] - fx[0] < 1e-11 && size < 1e-6) {
            res.converged = true;
            break;
        }
        const std::array<double, 2> c{(x[0][0] + x[1][0]) / 2, (x[0][1] + x[1][1]) / 2};
        const auto along = [&](double t) {
            return std::array<double, 2>{c[0] + t * (x[2][0] - c[0]), c[1] + t * (x[2][1] - c[1])};
        };
        const auto xr = along(-1.0);
        const double fr = f(xr[0], xr[1]);
        if (fr < fx[0]) {
            const auto xe = along(-2.0);
            const double fe = f(xe[0], xe[1]);
            if (fe < fr) {
                x[2] = xe;
                fx[2] = fe;
            } else {
                x[2] = xr;
                fx[2] = fr;
            }
        } else if (fr < fx[1]) {
            x[2] = xr;
            fx[2] = fr;
        } else {
            const auto xc = fr < fx[2] ? along(-0.5) : along(0.5);
            const double fc = f(xc[0], xc[1]);
            if (fc < std::min(fr, fx[2])) {
                x[2] = xc;
                fx[2] = fc;
            } else {
                for (int k = 1; k < 3; ++k) {
                    x[static_cast<size_t>(k)] = {(x[0][0] + x[static_cast<size_t>(k)][0]) / 2, (x[0][1] + x[static_cast<size_t>(k)][1]) / 2};
                    fx[static_cast<size_t>(k)] = f(x[static_cast<size_t>(k)][0], x[static_cast<size_t>(k)][1]);
                }
            }
        }
    }
    size_t arg = 0;
    for (size_t k = 1; k < 3; ++k)
        if (fx[k] < fx[arg])
            arg = k;
    if (fx[arg] < best) {
        best = fx[arg];
        bo = x[arg][0];
        be = x[arg][1];
    }
    res.m_l = std::max(best, 0.0);
    res.gamma_o = wrap_pi(bo);
    res.gamma_e = wrap_pi(be);
    res.evaluations = evals;
    return res;
}

}  // namespace rydmagic
