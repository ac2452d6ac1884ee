#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "rydmagic/monotones.hpp"
#include "rydmagic/sre.hpp"

namespace rydmagic {

namespace {

Vector4c canonical_phase(Vector4c v)
{
    for (Index k = 0; k < 4; ++k)
        if (std::abs(v(k)) > 1e-9) {
            v *= std::abs(v(k)) / v(k);
            break;
        }
    return v;
}

bool same_state(const Vector4c& a, const Vector4c& b) { return (a - b).cwiseAbs().maxCoeff() < 1e-9; }

std::vector<Matrix4c> clifford_generators()
{
    const double r = 1 / std::sqrt(2.0);
    Matrix2c h;
    h << r, r, r, -r;
    Matrix2c s = Matrix2c::Identity();
    s(1, 1) = cplx(0, 1);
    const Matrix2c id = Matrix2c::Identity();
    Matrix4c cnot01 = Matrix4c::Zero(), cnot10 = Matrix4c::Zero();
    // basis index 2 q0 + q1
    for (int q0 = 0; q0 < 2; ++q0)
        for (int q1 = 0; q1 < 2; ++q1) {
            cnot01(2 * q0 + (q1 ^ q0), 2 * q0 + q1) = 1.0;
            cnot10(2 * (q0 ^ q1) + q1, 2 * q0 + q1) = 1.0;
        }
    return {kron(h, id), kron(id, h), kron(s, id), kron(id, s), cnot01, cnot10};
}

}  // namespace

StabilizerSet2Q enumerate_stabilizers_2q()
{
    const auto gens = clifford_generators();
    StabilizerSet2Q set;
    Vector4c start = Vector4c::Zero();
    start(0) = 1.0;
    std::deque<Vector4c> queue{start};
    set.states.push_back(start);
    while (!queue.empty()) {
        const Vector4c v = queue.front();
        queue.pop_front();
        for (const auto& g : gens) {
            const Vector4c w = canonical_phase(g * v);
            const bool seen = std::any_of(set.states.begin(), set.states.end(), [&](const Vector4c& u) { return same_state(u, w); });
            if (!seen) {
                set.states.push_back(w);
                queue.push_back(w);
            }
        }
    }
    const Index count = static_cast<Index>(set.states.size());
    set.pauli_table.resize(16, count);
    for (Index k = 0; k < count; ++k) {
        const Vector4c& v = set.states[static_cast<size_t>(k)];
        const MatrixXc rho = v * v.adjoint();
        set.pauli_table.col(k) = pauli_vector(rho);
    }
    return set;
}

const StabilizerSet2Q& stabilizers_2q()
{
    static const StabilizerSet2Q set = enumerate_stabilizers_2q();
    return set;
}

namespace {

class Tableau {
public:
    // rows 0..m-1 hold [A | I | b] with b >= 0; basis starts on the artificial columns
    Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol) : m_(a.rows()), n_(a.cols()), tol_(tol)
    {
        t_ = Eigen::MatrixXd::Zero(m_, n_ + m_ + 1);
        sign_ = Eigen::VectorXd::Ones(m_);
        for (Index i = 0; i < m_; ++i) {
            sign_(i) = b(i) < 0 ? -1.0 : 1.0;
            t_.row(i).head(n_) = sign_(i) * a.row(i);
            t_(i, n_ + i) = 1.0;
            t_(i, n_ + m_) = sign_(i) * b(i);
        }
        basis_.resize(static_cast<size_t>(m_));
        for (Index i = 0; i < m_; ++i)
            basis_[static_cast<size_t>(i)] = n_ + i;
    }

    // Minimise cost over the current basis. Columns >= allowed never enter.
    void optimise(const Eigen::VectorXd& cost, Index allowed, int max_iter, int& iterations)
    {
        for (;;) {
            if (++iterations > max_iter)
                throw std::runtime_error("simplex: iteration limit reached");
            // tableau columns already hold B^{-1} a_j
            const Eigen::RowVectorXd cb = basic_costs(cost);
            Index enter = -1;
            for (Index j = 0; j < allowed; ++j) {
                const double reduced = cost(j) - cb.dot(t_.col(j));
                if (reduced < -tol_) {
                    enter = j;  // Bland: smallest index
                    break;
                }
            }
            if (enter < 0)
                return;
            Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < m_; ++i) {
                const double piv = t_(i, enter);
                if (piv > tol_) {
                    const double ratio = t_(i, n_ + m_) / piv;
                    if (ratio < best - tol_ ||
                        (std::abs(ratio - best) <= tol_ && leave >= 0 &&
                         basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0)
                throw std::runtime_error("simplex: problem is unbounded");
            pivot(leave, enter);
        }
    }

    void pivot(Index r, Index c)
    {
        t_.row(r) /= t_(r, c);
        for (Index i = 0; i < m_; ++i)
            if (i != r && t_(i, c) != 0.0)
                t_.row(i) -= t_(i, c) * t_.row(r);
        basis_[static_cast<size_t>(r)] = c;
    }

    // Pivot artificial variables out of the basis where a structural column allows it.
    void expel_artificials()
    {
        for (Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<size_t>(i)] < n_)
                continue;
            for (Index j = 0; j < n_; ++j)
                if (std::abs(t_(i, j)) > 1e-8) {
                    pivot(i, j);
                    break;
                }
        }
    }

    Eigen::RowVectorXd basic_costs(const Eigen::VectorXd& cost) const
    {
        Eigen::RowVectorXd cb(m_);
        for (Index i = 0; i < m_; ++i)
            cb(i) = cost(basis_[static_cast<size_t>(i)]);
        return cb;
    }

    Eigen::VectorXd solution() const
    {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        for (Index i = 0; i < m_; ++i)
            if (basis_[static_cast<size_t>(i)] < n_)
                x(basis_[static_cast<size_t>(i)]) = t_(i, n_ + m_);
        return x;
    }

    double artificial_sum() const
    {
        double s = 0;
        for (Index i = 0; i < m_; ++i)
            if (basis_[static_cast<size_t>(i)] >= n_)
                s += t_(i, n_ + m_);
        return s;
    }

    // Multipliers of the original (unsigned) constraints.
    Eigen::VectorXd original_duals(const Eigen::VectorXd& cost) const
    {
        const Eigen::RowVectorXd cb = basic_costs(cost);
        const Eigen::MatrixXd binv = t_.block(0, n_, m_, m_);
        Eigen::VectorXd y = (cb * binv).transpose();
        return y.cwiseProduct(sign_);
    }

private:
    Index m_, n_;
    double tol_;
    Eigen::MatrixXd t_;
    Eigen::VectorXd sign_;
    std::vector<Index> basis_;
};

}  // namespace

LPResult simplex_min(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c, double tol, int max_iter)
{
    if (a.rows() != b.size() || a.cols() != c.size())
        throw std::invalid_argument("simplex_min: dimension mismatch");
    const Index m = a.rows(), n = a.cols();
    Tableau tab(a, b, tol);
    int iterations = 0;

    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
    phase1.tail(m).setOnes();
    tab.optimise(phase1, n + m, max_iter, iterations);
    if (tab.artificial_sum() > 1e-8 * std::max(1.0, b.cwiseAbs().maxCoeff()))
        throw std::runtime_error("simplex: infeasible");
    tab.expel_artificials();

    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
    phase2.head(n) = c;
    tab.optimise(phase2, n, max_iter, iterations);

    LPResult r;
    r.x = tab.solution();
    r.objective = c.dot(r.x);
    r.dual = tab.original_duals(phase2);
    r.iterations = iterations;
    return r;
}

RomResult rom(const MatrixXc& rho2)
{
    if (rho2.rows() != 4 || rho2.cols() != 4)
        throw std::invalid_argument("rom: expects a two-qubit density matrix");
    validate_density_matrix(rho2);
    const auto& stab = stabilizers_2q();
    const Index k = stab.pauli_table.cols();
    Eigen::MatrixXd a(16, 2 * k);
    a << stab.pauli_table, -stab.pauli_table;
    const Eigen::VectorXd b = pauli_vector(rho2);
    const Eigen::VectorXd c = Eigen::VectorXd::Ones(2 * k);
    LPResult lp;
    try {
        lp = simplex_min(a, b, c);
    } catch (const std::runtime_error& e) {
        throw std::logic_error(std::string("rom: internal LP failure: ") + e.what());
    }
    RomResult r;
    r.weights = lp.x.head(k) - lp.x.tail(k);
    r.R = std::max(0.0, lp.objective - 1.0);
    if (r.R < 1e-12)
        r.R = 0.0;
    r.log_free = std::log1p(r.R);
    r.dual_objective = b.dot(lp.dual);
    r.iterations = lp.iterations;
    MatrixXc recon = MatrixXc::Zero(4, 4);
    for (Index j = 0; j < k; ++j) {
        const Vector4c& v = stab.states[static_cast<size_t>(j)];
        recon += r.weights(j) * (v * v.adjoint());
    }
    r.reconstruction_error = (recon - rho2).cwiseAbs().maxCoeff();
    return r;
}

}  // namespace rydmagic
