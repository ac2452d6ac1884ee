#include "rydmagic/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/QR>

namespace rydmagic {

namespace {

Index product(const std::vector<Index>& shape)
{
    return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<Index>());
}

}  // namespace

DenseTensor::DenseTensor(std::vector<Index> shape) : shape_(std::move(shape)), data_(product(shape_), cplx(0.0)) {}

DenseTensor::DenseTensor(std::vector<Index> shape, std::vector<cplx> data) : shape_(std::move(shape)), data_(std::move(data))
{
    if (product(shape_) != static_cast<Index>(data_.size()))
        throw std::invalid_argument("DenseTensor: shape does not match data length");
}

DenseTensor DenseTensor::from_matrix(const MatrixXc& m)
{
    std::vector<cplx> data(static_cast<size_t>(m.size()));
    Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(data.data(), m.rows(), m.cols()) = m;
    return DenseTensor({m.rows(), m.cols()}, std::move(data));
}

Index DenseTensor::offset(const std::vector<Index>& idx) const
{
    if (idx.size() != shape_.size())
        throw std::out_of_range("DenseTensor: index rank mismatch");
    Index off = 0;
    for (size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= shape_[k])
            throw std::out_of_range("DenseTensor: index out of range");
        off = off * shape_[k] + idx[k];
    }
    return off;
}

cplx& DenseTensor::operator()(const std::vector<Index>& idx) { return data_[static_cast<size_t>(offset(idx))]; }

cplx DenseTensor::operator()(const std::vector<Index>& idx) const { return data_[static_cast<size_t>(offset(idx))]; }

DenseTensor DenseTensor::reshape(std::vector<Index> shape) const
{
    if (product(shape) != size())
        throw std::invalid_argument("DenseTensor::reshape: element count changes");
    return DenseTensor(std::move(shape), data_);
}

MatrixXc DenseTensor::matrix() const
{
    if (rank() != 2)
        throw std::invalid_argument("DenseTensor::matrix: tensor is not rank 2");
    return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(data_.data(), shape_[0],
                                                                                                shape_[1]);
}

DenseTensor kron(const DenseTensor& a, const DenseTensor& b) { return DenseTensor::from_matrix(kron(a.matrix(), b.matrix())); }

SvdResult svd_truncate(const MatrixXc& m, Index chi_max, double tol)
{
    if (chi_max < 1)
        throw std::invalid_argument("svd_truncate: chi_max must be positive");
    if (!m.allFinite())
        throw std::invalid_argument("svd_truncate: non-finite input");
    // BDCSVD occasionally returns NaNs on highly degenerate spectra; Jacobi is the fallback
    MatrixXc u, v;
    Eigen::VectorXd s;
    bool ok = false;
    if (std::min(m.rows(), m.cols()) > 64) {
        Eigen::BDCSVD<MatrixXc> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() == Eigen::Success && svd.matrixU().allFinite() && svd.matrixV().allFinite()) {
            u = svd.matrixU();
            v = svd.matrixV();
            s = svd.singularValues();
            ok = true;
        }
    }
    if (!ok) {
        Eigen::JacobiSVD<MatrixXc> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success || !svd.matrixU().allFinite() || !svd.matrixV().allFinite())
            throw ConvergenceError("svd_truncate: SVD backend failed", std::nan(""), 0);
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
    }
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Index keep = 0;
    while (keep < s.size() && keep < chi_max && s(keep) > tol * smax)
        ++keep;
    keep = std::max<Index>(keep, std::min<Index>(1, s.size()));

    SvdResult r;
    r.u = u.leftCols(keep);
    r.s = s.head(keep);
    r.vh = v.leftCols(keep).adjoint();
    r.discarded_weight = s.tail(s.size() - keep).squaredNorm();
    return r;
}

EigenPair dominant_eigenpair(const LinearMap& apply, Index dim, double tol, int max_iter, const std::optional<VectorXc>& start)
{
    VectorXc v = start ? *start : VectorXc::Ones(dim);
    if (v.size() != dim)
        throw std::invalid_argument("dominant_eigenpair: start vector has wrong dimension");
    v.normalize();
    VectorXc w(dim);
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        apply(v, w);
        const cplx lam = v.dot(w);
        residual = (w - lam * v).norm();
        if (!std::isfinite(residual))
            break;
        if (residual < tol * std::abs(lam))
            return {lam, v, it, residual / std::abs(lam)};
        const double nw = w.norm();
        if (nw == 0.0)
            return {cplx(0.0), v, it, 0.0};
        v = w / nw;
    }
    throw ConvergenceError("dominant_eigenpair: power iteration did not converge", residual, max_iter);
}

EigenPair dominant_eigenpair_dense(const MatrixXc& m, double gap_tol)
{
    // The shifted QR can stall on sparse, highly structured replica matrices (and crawl through
    // subnormals while doing so). Conjugating by a fixed random unitary leaves the spectrum alone
    // and removes the structure.
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> g;
    MatrixXc r(m.rows(), m.cols());
    for (Index i = 0; i < r.rows(); ++i)
        for (Index j = 0; j < r.cols(); ++j)
            r(i, j) = cplx(g(rng), g(rng));
    const MatrixXc q = Eigen::HouseholderQR<MatrixXc>(r).householderQ();
    Eigen::ComplexEigenSolver<MatrixXc> es(q.adjoint() * m * q, true);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("dominant_eigenpair_dense: eigen solver failed", std::nan(""), 0);
    const auto& ev = es.eigenvalues();
    Index best = 0;
    for (Index k = 1; k < ev.size(); ++k)
        if (std::abs(ev(k)) > std::abs(ev(best)))
            best = k;
    if (gap_tol > 0.0) {
        for (Index k = 0; k < ev.size(); ++k)
            if (k != best && std::abs(std::abs(ev(k)) - std::abs(ev(best))) <= gap_tol * std::abs(ev(best)))
                throw ConvergenceError("dominant_eigenpair_dense: degenerate dominant eigenvalue", 0.0, 0);
    }
    const VectorXc v = (q * es.eigenvectors().col(best)).normalized();
    const double res = (m * v - ev(best) * v).norm() / std::max(std::abs(ev(best)), 1e-300);
    return {ev(best), v, 0, res};
}

MatrixXc materialise(const LinearMap& apply, Index dim)
{
    MatrixXc m(dim, dim);
    VectorXc e = VectorXc::Zero(dim), out(dim);
    for (Index k = 0; k < dim; ++k) {
        e(k) = 1.0;
        apply(e, out);
        m.col(k) = out;
        e(k) = 0.0;
    }
    return m;
}

EigenPair dominant_eigenpair_robust(const LinearMap& apply, Index dim, double tol, int max_iter,
                                    const std::optional<VectorXc>& start, Index dense_cap)
{
    try {
        return dominant_eigenpair(apply, dim, tol, max_iter, start);
    } catch (const ConvergenceError&) {
        if (dim > dense_cap)
            throw;
    }
    return dominant_eigenpair_dense(materialise(apply, dim));
}

bool is_hermitian(const MatrixXc& m, double tol)
{
    if (m.rows() != m.cols())
        return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

HermitianSpectrum hermitian_eigs(const MatrixXc& m, double herm_tol)
{
    if (!is_hermitian(m, herm_tol))
        throw std::invalid_argument("hermitian_eigs: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(m);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("hermitian_eigs: eigen solver failed", std::nan(""), 0);
    return {es.eigenvalues(), es.eigenvectors()};
}

EigenPair lanczos_lowest(const LinearMap& apply, Index dim, double tol, int krylov, int max_restarts,
                         const std::optional<VectorXc>& start)
{
    if (dim <= krylov) {
        auto spec = hermitian_eigs(materialise(apply, dim), 1e-10);
        return {cplx(spec.values(0)), spec.vectors.col(0), 0, 0.0};
    }
    VectorXc v = start ? *start : VectorXc::Ones(dim);
    if (!start) {
        // all-ones is orthogonal to odd-parity ground states; add a deterministic ramp
        for (Index k = 0; k < dim; ++k)
            v(k) += 0.01 * std::cos(0.37 * static_cast<double>(k));
    }
    v.normalize();
    MatrixXc basis(dim, krylov);
    VectorXc w(dim);
    double residual = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < max_restarts; ++restart) {
        Eigen::VectorXd alpha(krylov), beta(krylov);
        int m = 0;
        basis.col(0) = v;
        for (int j = 0; j < krylov; ++j) {
            apply(basis.col(j), w);
            alpha(j) = basis.col(j).dot(w).real();
            for (int pass = 0; pass < 2; ++pass)
                w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
            m = j + 1;
            beta(j) = w.norm();
            if (j + 1 == krylov || beta(j) < 1e-13)
                break;
            basis.col(j + 1) = w / beta(j);
        }
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            t(j, j) = alpha(j);
            if (j + 1 < m)
                t(j, j + 1) = t(j + 1, j) = beta(j);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        v = basis.leftCols(m) * es.eigenvectors().col(0).cast<cplx>();
        v.normalize();
        apply(v, w);
        const double e0 = v.dot(w).real();
        residual = (w - e0 * v).norm();
        if (residual < tol * std::max(1.0, std::abs(e0)))
            return {cplx(e0), v, restart + 1, residual};
    }
    throw ConvergenceError("lanczos_lowest: no convergence", residual, max_restarts);
}

namespace pauli_matrices {

Matrix2c id() { return Matrix2c::Identity(); }

Matrix2c x()
{
    Matrix2c m;
    m << 0, 1, 1, 0;
    return m;
}

Matrix2c y()
{
    Matrix2c m;
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}

Matrix2c z()
{
    Matrix2c m;
    m << 1, 0, 0, -1;
    return m;
}

Matrix2c by_code(int code)
{
    switch (code) {
    case 0: return id();
    case 1: return x();
    case 2: return y();
    case 3: return z();
    default: throw std::out_of_range("pauli code must be in 0..3");
    }
}

}  // namespace pauli_matrices

}  // namespace rydmagic
