#include "rydmagic/hamiltonians.hpp"

#include <cmath>

namespace rydmagic {

namespace {

using Env = std::vector<MatrixXc>;  // one matrix per MPO bond index

// L(bra, ket) -> sum W(t,s) A^t' L A^s
Env grow_left(const Env& l, const SiteTensor& a, const MPOTensor& w)
{
    Env out(static_cast<size_t>(w.dr), MatrixXc::Zero(a[0].cols(), a[0].cols()));
    for (Index x = 0; x < w.dl; ++x)
        for (Index y = 0; y < w.dr; ++y) {
            const Matrix2c& op = w.op(x, y);
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t)
                    if (op(t, s) != cplx(0.0))
                        out[static_cast<size_t>(y)] +=
                            op(t, s) * a[static_cast<size_t>(t)].adjoint() * l[static_cast<size_t>(x)] * a[static_cast<size_t>(s)];
        }
    return out;
}

// R(ket, bra) -> sum W(t,s) A^s R A^t'
Env grow_right(const Env& r, const SiteTensor& a, const MPOTensor& w)
{
    Env out(static_cast<size_t>(w.dl), MatrixXc::Zero(a[0].rows(), a[0].rows()));
    for (Index x = 0; x < w.dl; ++x)
        for (Index y = 0; y < w.dr; ++y) {
            const Matrix2c& op = w.op(x, y);
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t)
                    if (op(t, s) != cplx(0.0))
                        out[static_cast<size_t>(x)] +=
                            op(t, s) * a[static_cast<size_t>(s)] * r[static_cast<size_t>(y)] * a[static_cast<size_t>(t)].adjoint();
        }
    return out;
}

// Two-site wavefunction stored as four chi_l x chi_r blocks, block index 2*s1+s2.
struct TwoSite {
    Index chi_l, chi_r;
    Index block() const { return chi_l * chi_r; }
};

void apply_two_site(const Env& l, const MPOTensor& w1, const MPOTensor& w2, const Env& r, const TwoSite& g,
                    const VectorXc& in, VectorXc& out)
{
    out.setZero(in.size());
    const Index bs = g.block();
    for (Index a = 0; a < w1.dl; ++a)
        for (Index b = 0; b < w1.dr; ++b) {
            const Matrix2c& o1 = w1.op(a, b);
            if (o1.isZero(0.0))
                continue;
            for (Index c = 0; c < w2.dr; ++c) {
                const Matrix2c& o2 = w2.op(b, c);
                if (o2.isZero(0.0))
                    continue;
                for (int s = 0; s < 4; ++s) {
                    Eigen::Map<const MatrixXc> th(in.data() + s * bs, g.chi_l, g.chi_r);
                    if (th.isZero(0.0))
                        continue;
                    const MatrixXc lr = l[static_cast<size_t>(a)] * th * r[static_cast<size_t>(c)];
                    for (int t = 0; t < 4; ++t) {
                        const cplx coef = o1(t / 2, s / 2) * o2(t % 2, s % 2);
                        if (coef != cplx(0.0)) {
                            Eigen::Map<MatrixXc> dst(out.data() + t * bs, g.chi_l, g.chi_r);
                            dst += coef * lr;
                        }
                    }
                }
            }
        }
}

}  // namespace

DmrgResult dmrg_ground_state(const MPO& h, const DmrgOptions& opt)
{
    if (opt.chi < 1)
        throw std::invalid_argument("dmrg_ground_state: chi must be positive");
    const int n = h.n_sites();
    if (n < 2)
        throw std::invalid_argument("dmrg_ground_state: need at least two sites");

    FiniteMPS psi = random_mps(n, opt.chi, opt.seed, Boundary::open);
    // cap bonds at the exact Schmidt rank bound
    for (int j = 0; j < n; ++j) {
        auto& a = psi.tensors[static_cast<size_t>(j)];
        const Index cl = std::min<Index>(a[0].rows(), Index{1} << std::min(j, n - j));
        const Index cr = std::min<Index>(a[0].cols(), Index{1} << std::min(j + 1, n - j - 1));
        for (auto& m : a)
            m = m.topLeftCorner(cl, cr).eval();
    }
    // right-canonicalise
    for (int j = n - 1; j > 0; --j) {
        auto& a = psi.tensors[static_cast<size_t>(j)];
        MatrixXc m(a[0].rows(), 2 * a[0].cols());
        m << a[0], a[1];
        auto svd = svd_truncate(m, m.rows(), 0.0);
        a[0] = svd.vh.leftCols(a[0].cols());
        a[1] = svd.vh.rightCols(a[1].cols());
        const MatrixXc us = svd.u * svd.s.asDiagonal();
        for (auto& prev : psi.tensors[static_cast<size_t>(j - 1)])
            prev = (prev * us).eval();
    }

    std::vector<Env> left(static_cast<size_t>(n + 1)), right(static_cast<size_t>(n + 1));
    left[0] = Env{MatrixXc::Ones(1, 1)};
    right[static_cast<size_t>(n)] = Env{MatrixXc::Ones(1, 1)};
    for (int j = n - 1; j >= 1; --j)
        right[static_cast<size_t>(j)] = grow_right(right[static_cast<size_t>(j + 1)], psi.tensors[static_cast<size_t>(j)],
                                                   h.tensors[static_cast<size_t>(j)]);

    DmrgResult res;
    double energy = std::numeric_limits<double>::infinity();

    auto optimise = [&](int j, bool moving_right) {
        auto& a1 = psi.tensors[static_cast<size_t>(j)];
        auto& a2 = psi.tensors[static_cast<size_t>(j + 1)];
        const TwoSite g{a1[0].rows(), a2[0].cols()};
        VectorXc theta(4 * g.block());
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
                Eigen::Map<MatrixXc>(theta.data() + (2 * s1 + s2) * g.block(), g.chi_l, g.chi_r) = a1[s1] * a2[s2];
        const Env& l = left[static_cast<size_t>(j)];
        const Env& r = right[static_cast<size_t>(j + 2)];
        const auto& w1 = h.tensors[static_cast<size_t>(j)];
        const auto& w2 = h.tensors[static_cast<size_t>(j + 1)];
        const auto apply = [&](const VectorXc& in, VectorXc& out) { apply_two_site(l, w1, w2, r, g, in, out); };
        const VectorXc start = theta.norm() > 1e-300 ? VectorXc(theta) : VectorXc::Ones(theta.size());
        const EigenPair gs = lanczos_lowest(apply, theta.size(), 1e-11, 40, 400, start);
        energy = gs.value.real();

        MatrixXc m(2 * g.chi_l, 2 * g.chi_r);
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
                m.block(s1 * g.chi_l, s2 * g.chi_r, g.chi_l, g.chi_r) =
                    Eigen::Map<const MatrixXc>(gs.vector.data() + (2 * s1 + s2) * g.block(), g.chi_l, g.chi_r);
        auto svd = svd_truncate(m, opt.chi, opt.svd_tol);
        res.max_discarded = std::max(res.max_discarded, svd.discarded_weight / m.squaredNorm());
        const double snorm = svd.s.norm();
        svd.s /= snorm;
        if (moving_right) {
            const MatrixXc svh = svd.s.asDiagonal() * svd.vh;
            for (int s = 0; s < 2; ++s) {
                a1[s] = svd.u.middleRows(s * g.chi_l, g.chi_l);
                a2[s] = svh.middleCols(s * g.chi_r, g.chi_r);
            }
            left[static_cast<size_t>(j + 1)] = grow_left(l, a1, w1);
        } else {
            const MatrixXc us = svd.u * svd.s.asDiagonal();
            for (int s = 0; s < 2; ++s) {
                a1[s] = us.middleRows(s * g.chi_l, g.chi_l);
                a2[s] = svd.vh.middleCols(s * g.chi_r, g.chi_r);
            }
            right[static_cast<size_t>(j + 1)] = grow_right(r, a2, w2);
        }
    };

    res.status = Status::warning;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        for (int j = 0; j + 1 < n; ++j)
            optimise(j, true);
        for (int j = n - 2; j >= 0; --j)
            optimise(j, false);
        res.sweep_energies.push_back(energy);
        const size_t k = res.sweep_energies.size();
        if (k >= 2 && std::abs(res.sweep_energies[k - 1] - res.sweep_energies[k - 2]) < opt.tol) {
            res.status = Status::ok;
            break;
        }
    }
    res.energy = energy;
    res.mps = std::move(psi);
    return res;
}

}  // namespace rydmagic
