#include "rydmagic/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rydmagic/parallel.hpp"
#include "rydmagic/sre.hpp"

namespace rydmagic {

namespace {

constexpr double four_pi = 4.0 * M_PI;

double wrap_4pi(double x)
{
    x = std::fmod(x, four_pi);
    return x < 0 ? x + four_pi : x;
}

double wrap_delta(double d)
{
    d = std::fmod(d, four_pi);
    if (d > 2 * M_PI)
        d -= four_pi;
    if (d < -2 * M_PI)
        d += four_pi;
    return d;
}

// sin(x/2) tan(y/2) cos^2(x/2); the cos(y/2) -> 0 line uses the limit value 0.
double coupling_term(double x, double y, bool& singular)
{
    const double cy = std::cos(y / 2);
    if (std::abs(cy) < 1e-12) {
        singular = true;
        return 0.0;
    }
    const double cx = std::cos(x / 2);
    return std::sin(x / 2) * std::sin(y / 2) / cy * cx * cx;
}

struct Vec2 {
    double o, e;
};

Vec2 rhs(Vec2 p)
{
    const TdvpRhs r = tdvp_rhs({p.o, p.e});
    return {r.d_theta_o, r.d_theta_e};
}

Vec2 rk4_step(Vec2 p, double h)
{
    const Vec2 k1 = rhs(p);
    const Vec2 k2 = rhs({p.o + h / 2 * k1.o, p.e + h / 2 * k1.e});
    const Vec2 k3 = rhs({p.o + h / 2 * k2.o, p.e + h / 2 * k2.e});
    const Vec2 k4 = rhs({p.o + h * k3.o, p.e + h * k3.e});
    return {p.o + h / 6 * (k1.o + 2 * k2.o + 2 * k3.o + k4.o), p.e + h / 6 * (k1.e + 2 * k2.e + 2 * k3.e + k4.e)};
}

int cos_sign(double theta) { return std::cos(theta / 2) >= 0 ? 1 : -1; }

}  // namespace

ManifoldPoint ManifoldPoint::canonical() const { return {wrap_4pi(theta_o), wrap_4pi(theta_e)}; }

double manifold_distance(const ManifoldPoint& a, const ManifoldPoint& b)
{
    return std::hypot(wrap_delta(a.theta_o - b.theta_o), wrap_delta(a.theta_e - b.theta_e));
}

TdvpRhs tdvp_rhs(const ManifoldPoint& p)
{
    if (!std::isfinite(p.theta_o) || !std::isfinite(p.theta_e))
        throw std::invalid_argument("tdvp_rhs: non-finite angle");
    TdvpRhs r;
    r.d_theta_o = std::cos(p.theta_e / 2) + coupling_term(p.theta_o, p.theta_e, r.singular);
    r.d_theta_e = std::cos(p.theta_o / 2) + coupling_term(p.theta_e, p.theta_o, r.singular);
    return r;
}

Trajectory integrate_trajectory(const ManifoldPoint& init, double t_max, double dt, bool check_halving)
{
    if (!(dt > 0))
        throw std::invalid_argument("integrate_trajectory: dt must be positive");
    if (!(t_max >= 0))
        throw std::invalid_argument("integrate_trajectory: t_max must be non-negative");
    const long steps = std::lround(t_max / dt);
    Trajectory tr;
    tr.times.reserve(static_cast<size_t>(steps + 1));
    tr.points.reserve(static_cast<size_t>(steps + 1));
    Vec2 p{init.theta_o, init.theta_e};
    Vec2 fine = p;
    tr.times.push_back(0.0);
    tr.points.push_back(init);
    double halving = 0.0;
    for (long k = 1; k <= steps; ++k) {
        const Vec2 q = rk4_step(p, dt);
        if (cos_sign(q.o) != cos_sign(p.o) || cos_sign(q.e) != cos_sign(p.e))
            tr.singular_crossings.push_back(static_cast<double>(k) * dt);
        p = q;
        if (check_halving) {
            fine = rk4_step(rk4_step(fine, dt / 2), dt / 2);
            halving = std::max(halving, std::hypot(fine.o - p.o, fine.e - p.e));
        }
        tr.times.push_back(static_cast<double>(k) * dt);
        tr.points.push_back({p.o, p.e});
    }
    tr.halving_error = check_halving ? halving : -1.0;
    return tr;
}

FirstReturn first_return(const ManifoldPoint& init, double dt, double t_min, double t_max)
{
    if (!(dt > 0) || !(t_max > t_min))
        throw std::invalid_argument("first_return: need dt > 0 and t_max > t_min");
    const Vec2 start{init.theta_o, init.theta_e};
    const auto dist = [&](Vec2 q) { return manifold_distance({q.o, q.e}, init); };
    Vec2 prev = start, cur = start;
    Vec2 best_prev = start, best_cur = start;
    double best_d = std::numeric_limits<double>::infinity();
    long best_k = -1;
    const long steps = std::lround(t_max / dt);
    const long k_min = std::lround(t_min / dt);
    for (long k = 1; k <= steps; ++k) {
        prev = cur;
        cur = rk4_step(cur, dt);
        if (k < k_min)
            continue;
        const double d = dist(cur);
        if (d < best_d) {
            best_d = d;
            best_k = k;
            best_prev = prev;
            best_cur = cur;
        }
    }
    if (best_k < 0)
        throw std::runtime_error("first_return: empty search window");
    // offset h in [-dt, dt] around the best grid time
    const auto f = [&](double h) { return h >= 0 ? dist(rk4_step(best_cur, h)) : dist(rk4_step(best_prev, dt + h)); };
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = -dt, b = dt;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-15) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    const double h = (a + b) / 2;
    FirstReturn r;
    r.period = static_cast<double>(best_k) * dt + h;
    r.distance = std::min(f(h), best_d);
    return r;
}

double variational_energy(const ManifoldPoint& p)
{
    const UnitCellMPS mps = pxp_ansatz(p.theta_o, p.theta_e);
    Matrix2c p0 = Matrix2c::Zero();
    p0(0, 0) = 1.0;
    const MatrixXc term = kron(kron(p0, pauli_matrices::x()), p0);
    double e = 0.0;
    for (int offset = 0; offset < 2; ++offset)
        e += (rdm(mps, 3, offset) * term).trace().real();
    return 0.25 * e;  // (Omega/2) times the sublattice average
}

std::string to_string(TrajectoryQuantity q)
{
    switch (q) {
    case TrajectoryQuantity::m2: return "m2";
    case TrajectoryQuantity::m2_long_range: return "m2_long_range";
    case TrajectoryQuantity::m2_mixed: return "m2_mixed";
    case TrajectoryQuantity::m_u: return "m_u";
    }
    return "unknown";
}

void trajectory_observables(Trajectory& tr, const std::vector<TrajectoryQuantity>& quantities, int threads, int stride,
                            int long_range_grid)
{
    if (stride < 1)
        throw std::invalid_argument("trajectory_observables: stride must be >= 1");
    const size_t n = tr.points.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>*> slots;
    for (auto q : quantities) {
        auto& col = tr.observables[to_string(q)];
        col.assign(n, nan);
        slots.push_back(&col);
    }
    const long tasks = static_cast<long>((n + static_cast<size_t>(stride) - 1) / static_cast<size_t>(stride));
    parallel_for(tasks, threads, [&](long t) {
        const size_t i = static_cast<size_t>(t) * static_cast<size_t>(stride);
        const ManifoldPoint p = tr.points[i];
        const UnitCellMPS mps = pxp_ansatz(p.theta_o, p.theta_e);
        for (size_t qi = 0; qi < quantities.size(); ++qi) {
            const auto q = quantities[qi];
            double v = nan;
            try {
                switch (q) {
                case TrajectoryQuantity::m2: v = sre_replica_density(mps).m; break;
                case TrajectoryQuantity::m2_long_range: v = sre_long_range(mps, 2, long_range_grid).m_l; break;
                case TrajectoryQuantity::m2_mixed: v = sre_mixed(rdm(mps, 2, 0)); break;
                case TrajectoryQuantity::m_u: v = m_u_cell(p.theta_o, p.theta_e); break;
                }
            } catch (const std::exception&) {
                v = nan;
            }
            (*slots[qi])[i] = v;
        }
    });
}

QuenchSeries quench_ed(const SparseHamiltonian& h, const ConstrainedBasis& basis, const VectorXc& psi0,
                       const std::vector<double>& times, int n)
{
    if (h.dim() > ed_dim_cap)
        throw std::invalid_argument("quench_ed: dimension exceeds the dense ED cap");
    if (h.dim() != basis.dim() || psi0.size() != basis.dim())
        throw std::invalid_argument("quench_ed: Hamiltonian, basis and state dimensions differ");
    if (basis.n_sites > sre_direct_max_sites)
        throw std::invalid_argument("quench_ed: N exceeds the direct SRE cap");
    const auto spec = hermitian_eigs(h.dense());
    const VectorXc c = spec.vectors.adjoint() * psi0;
    QuenchSeries out;
    for (double t : times) {
        VectorXc phase(c.size());
        for (Index k = 0; k < c.size(); ++k)
            phase(k) = std::exp(cplx(0, -spec.values(k) * t)) * c(k);
        const VectorXc psi = spec.vectors * phase;
        const double nrm = psi.norm();
        out.times.push_back(t);
        out.norm_error.push_back(std::abs(nrm - psi0.norm()));
        out.fidelity.push_back(std::norm(psi0.dot(psi)));
        out.m2.push_back(sre_direct(psi / nrm, basis, n).m);
    }
    return out;
}

double precession_m2(double t)
{
    const double z = std::cos(t), y = std::sin(t);
    return std::log(2 / (1 + std::pow(z, 4) + std::pow(y, 4)));
}

Matrix4c gate_matrix(const Gate& g)
{
    Matrix4c m = Matrix4c::Zero();
    switch (g.kind) {
    case GateKind::swap:
        m(0, 0) = m(3, 3) = 1.0;
        m(1, 2) = m(2, 1) = 1.0;
        return m;
    case GateKind::cnot0:
        m(0, 1) = m(1, 0) = 1.0;
        m(2, 2) = m(3, 3) = 1.0;
        return m;
    case GateKind::rotation_second: {
        const double nx = std::sin(g.theta) * std::cos(g.phi), ny = std::sin(g.theta) * std::sin(g.phi);
        const double nz = std::cos(g.theta);
        const Matrix2c ns = nx * pauli_matrices::x() + ny * pauli_matrices::y() + nz * pauli_matrices::z();
        // exp(i pi/2 n.s) = i n.s since (n.s)^2 = 1
        return kron(Matrix2c::Identity(), cplx(0, 1) * ns);
    }
    }
    return m;
}

Matrix4c CircuitSpec::matrix() const
{
    Matrix4c u = Matrix4c::Identity();
    for (const auto& g : gates)
        u = gate_matrix(g) * u;
    return u;
}

CircuitSpec mps_unitary(double theta, double phi)
{
    CircuitSpec c;
    c.theta = theta;
    c.phi = phi;
    const Gate r{GateKind::rotation_second, theta / 4, phi / 4};
    c.gates = {{GateKind::swap}, r, {GateKind::cnot0}, r, {GateKind::cnot0}};
    return c;
}

SiteTensor circuit_tensors(const Matrix4c& u)
{
    SiteTensor t{MatrixXc(2, 2), MatrixXc(2, 2)};
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                t[static_cast<size_t>(s)](a, b) = u(2 * s + a, b);
    return t;
}

VectorXc staircase_state(double theta, double phi, int n_sites)
{
    const SiteTensor t = circuit_tensors(mps_unitary(theta, phi).matrix());
    VectorXc e0 = VectorXc::Zero(2);
    e0(0) = 1.0;
    return mps_to_statevector(to_finite(single_site_cell(t), n_sites, e0, e0)).psi;
}

namespace {

double site_mu(const Matrix4c& u, const MatrixXc& rho_r)
{
    MatrixXc zero = MatrixXc::Zero(2, 2);
    zero(0, 0) = 1.0;
    const MatrixXc rho_in = kron(zero, rho_r);
    MatrixXc out = u * rho_in * u.adjoint();
    out = 0.5 * (out + out.adjoint());
    return mixed_sre_total(out) - mixed_sre_total(rho_r);
}

}  // namespace

double m_u(double theta, double phi)
{
    const Matrix4c u = mps_unitary(theta, phi).matrix();
    const UnitCellMPS cell = single_site_cell(circuit_tensors(u));
    return site_mu(u, bond_density(cell, 0));
}

double m_u_cell(double theta_o, double theta_e, double phi_o, double phi_e)
{
    const Matrix4c uo = mps_unitary(theta_o, phi_o).matrix();
    const Matrix4c ue = mps_unitary(theta_e, phi_e).matrix();
    UnitCellMPS cell;
    cell.tensors = {circuit_tensors(uo), circuit_tensors(ue)};
    return 0.5 * (site_mu(uo, bond_density(cell, 0)) + site_mu(ue, bond_density(cell, 1)));
}

}  // namespace rydmagic
