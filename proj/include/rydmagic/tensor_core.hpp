#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace rydmagic {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

// Row-major complex tensor. Only a container: all arithmetic goes through Eigen maps.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(std::vector<Index> shape);
    DenseTensor(std::vector<Index> shape, std::vector<cplx> data);
    static DenseTensor from_matrix(const MatrixXc& m);

    const std::vector<Index>& shape() const { return shape_; }
    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }
    Index size() const { return static_cast<Index>(data_.size()); }
    Index rank() const { return static_cast<Index>(shape_.size()); }

    cplx& operator()(const std::vector<Index>& idx);
    cplx operator()(const std::vector<Index>& idx) const;

    // Same data, new shape. Throws if the element count changes.
    DenseTensor reshape(std::vector<Index> shape) const;
    // Rank-2 tensors only.
    MatrixXc matrix() const;

private:
    Index offset(const std::vector<Index>& idx) const;
    std::vector<Index> shape_;
    std::vector<cplx> data_;
};

struct EigenPair {
    cplx value;
    VectorXc vector;
    int iterations = 0;
    double residual = 0.0;
};

struct SvdResult {
    MatrixXc u;
    Eigen::VectorXd s;
    MatrixXc vh;  // u * s.asDiagonal() * vh approximates the input
    double discarded_weight = 0.0;
};

struct HermitianSpectrum {
    Eigen::VectorXd values;  // ascending
    MatrixXc vectors;
};

using LinearMap = std::function<void(const VectorXc& in, VectorXc& out)>;

template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    using Scalar = typename Eigen::ScalarBinaryOpTraits<typename A::Scalar, typename B::Scalar>::ReturnType;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::kroneckerProduct(a.template cast<Scalar>(), b.template cast<Scalar>());
    return out;
}

DenseTensor kron(const DenseTensor& a, const DenseTensor& b);

SvdResult svd_truncate(const MatrixXc& m, Index chi_max, double tol = 1e-12);

// Power iteration. Converged when |Av - lv| < tol |l|. `start` defaults to the normalized all-ones vector.
EigenPair dominant_eigenpair(const LinearMap& apply, Index dim, double tol = 1e-12, int max_iter = 20000,
                             const std::optional<VectorXc>& start = std::nullopt);

// Largest-modulus eigenpair of a dense nonsymmetric matrix. Throws if the top two moduli coincide within gap_tol.
EigenPair dominant_eigenpair_dense(const MatrixXc& m, double gap_tol = 0.0);

// Power iteration first; falls back to the dense solver when the map is materialisable (dim <= dense_cap).
EigenPair dominant_eigenpair_robust(const LinearMap& apply, Index dim, double tol = 1e-12, int max_iter = 20000,
                                    const std::optional<VectorXc>& start = std::nullopt, Index dense_cap = 7000);

HermitianSpectrum hermitian_eigs(const MatrixXc& m, double herm_tol = 1e-12);

// Lowest eigenpair of a Hermitian map via restarted Lanczos with full reorthogonalisation.
EigenPair lanczos_lowest(const LinearMap& apply, Index dim, double tol = 1e-10, int krylov = 60, int max_restarts = 200,
                         const std::optional<VectorXc>& start = std::nullopt);

MatrixXc materialise(const LinearMap& apply, Index dim);

bool is_hermitian(const MatrixXc& m, double tol);

namespace pauli_matrices {
Matrix2c id();
Matrix2c x();
Matrix2c y();
Matrix2c z();
// 0=I, 1=X, 2=Y, 3=Z
Matrix2c by_code(int code);
}  // namespace pauli_matrices

}  // namespace rydmagic
