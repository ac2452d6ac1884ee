#include "rydmagic/monotones.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "rydmagic/parallel.hpp"
#include "rydmagic/pauli.hpp"
#include "rydmagic/sre.hpp"

namespace rydmagic {

namespace {

// splitmix64, used to derive independent chain seeds
uint64_t mix_seed(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

void set_code(PauliMasks& m, int site, int n_sites, int code)
{
    const uint64_t bit = uint64_t{1} << (n_sites - 1 - site);
    m.x &= ~bit;
    m.z &= ~bit;
    if (code == 1 || code == 2)
        m.x |= bit;
    if (code == 2 || code == 3)
        m.z |= bit;
}

int get_code(const PauliMasks& m, int site, int n_sites)
{
    const int xb = static_cast<int>((m.x >> (n_sites - 1 - site)) & 1u);
    const int zb = static_cast<int>((m.z >> (n_sites - 1 - site)) & 1u);
    return xb ? (zb ? 2 : 1) : (zb ? 3 : 0);
}

}  // namespace

MCEstimate mc_sre(const VectorXc& psi, int n_sites, const MCOptions& opt)
{
    if (n_sites < 1 || n_sites > 30 || psi.size() != (Index{1} << n_sites))
        throw std::invalid_argument("mc_sre: state length must be 2^N with N <= 30");
    if (std::abs(psi.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("mc_sre: state is not normalised");
    if (opt.n_samples < opt.batches || opt.batches < 2 || opt.burn_in < 0)
        throw std::invalid_argument("mc_sre: need n_samples >= batches >= 2 and burn_in >= 0");

    std::vector<uint64_t> support;
    for (Index b = 0; b < psi.size(); ++b)
        if (std::abs(psi(b)) > 1e-14)
            support.push_back(static_cast<uint64_t>(b));

    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> pick_site(0, n_sites - 1);
    std::uniform_int_distribution<int> pick_shift(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    PauliMasks cur;  // identity, <I>^2 = 1
    double w = 1.0;
    long accepted = 0;
    const long total = opt.burn_in + opt.n_samples;
    const long batch_len = opt.n_samples / opt.batches;
    std::vector<double> batch_sum(static_cast<size_t>(opt.batches), 0.0);
    double sum = 0.0;
    for (long step = 0; step < total; ++step) {
        // Half the moves change two sites at once: for real states every string with an odd number
        // of Y factors has zero weight, so single-site moves alone never reach strings containing Y.
        PauliMasks prop = cur;
        const int site = pick_site(rng);
        set_code(prop, site, n_sites, (get_code(cur, site, n_sites) + pick_shift(rng)) % 4);
        if (n_sites > 1 && unit(rng) < 0.5) {
            int other = pick_site(rng);
            while (other == site)
                other = pick_site(rng);
            set_code(prop, other, n_sites, (get_code(cur, other, n_sites) + pick_shift(rng)) % 4);
        }
        const double ev = pauli_expectation(psi, prop, support).real();
        const double wp = ev * ev;
        if (wp >= w || unit(rng) * w < wp) {
            cur = prop;
            w = wp;
            ++accepted;
        }
        if (step >= opt.burn_in) {
            const long k = step - opt.burn_in;
            sum += w;
            const long b = k / batch_len;
            if (b < opt.batches)
                batch_sum[static_cast<size_t>(b)] += w;
        }
    }

    MCEstimate est;
    est.n_samples = opt.n_samples;
    est.burn_in = opt.burn_in;
    est.seed = opt.seed;
    est.n_sites = n_sites;
    est.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
    est.stalled = accepted == 0;
    est.mean_p2 = sum / static_cast<double>(opt.n_samples);
    double mb = 0, vb = 0;
    for (double s : batch_sum)
        mb += s / static_cast<double>(batch_len);
    mb /= opt.batches;
    for (double s : batch_sum) {
        const double d = s / static_cast<double>(batch_len) - mb;
        vb += d * d;
    }
    vb /= (opt.batches - 1);
    est.mean_p2_stderr = std::sqrt(vb / opt.batches);
    est.mean = -std::log(est.mean_p2) / n_sites;
    if (std::abs(est.mean) < 1e-13)
        est.mean = 0.0;
    est.stderr_ = est.mean_p2_stderr / (est.mean_p2 * n_sites);
    return est;
}

MCEstimate merge_estimates(const std::vector<MCEstimate>& parts)
{
    if (parts.empty())
        throw std::invalid_argument("merge_estimates: nothing to merge");
    const int n_sites = parts.front().n_sites;
    double wsum = 0, acc = 0;
    bool exact = false;
    MCEstimate out = parts.front();
    out.n_samples = 0;
    out.acceptance_rate = 0;
    out.stalled = false;
    for (const auto& p : parts) {
        out.n_samples += p.n_samples;
        out.acceptance_rate += p.acceptance_rate / static_cast<double>(parts.size());
        out.stalled = out.stalled || p.stalled;
        if (p.mean_p2_stderr == 0.0)
            exact = true;
    }
    if (exact) {
        // zero-variance chains (stabilizer-like states): plain average
        for (const auto& p : parts)
            acc += p.mean_p2;
        out.mean_p2 = acc / static_cast<double>(parts.size());
        out.mean_p2_stderr = 0.0;
    } else {
        for (const auto& p : parts) {
            const double wt = 1.0 / (p.mean_p2_stderr * p.mean_p2_stderr);
            wsum += wt;
            acc += wt * p.mean_p2;
        }
        out.mean_p2 = acc / wsum;
        out.mean_p2_stderr = std::sqrt(1.0 / wsum);
    }
    out.mean = -std::log(out.mean_p2) / n_sites;
    if (std::abs(out.mean) < 1e-13)
        out.mean = 0.0;
    out.stderr_ = out.mean_p2_stderr / (out.mean_p2 * n_sites);
    return out;
}

MCEstimate mc_sre_parallel(const VectorXc& psi, int n_sites, const MCOptions& opt, int chains, int threads)
{
    if (chains < 1)
        throw std::invalid_argument("mc_sre_parallel: chains must be >= 1");
    std::vector<MCEstimate> parts(static_cast<size_t>(chains));
    parallel_for(chains, threads, [&](long k) {
        MCOptions o = opt;
        o.seed = mix_seed(opt.seed + static_cast<uint64_t>(k));
        parts[static_cast<size_t>(k)] = mc_sre(psi, n_sites, o);
    });
    MCEstimate m = merge_estimates(parts);
    m.seed = opt.seed;
    return m;
}

MatrixXc two_site_rdm(const VectorXc& psi, int n_sites, int j)
{
    if (psi.size() != (Index{1} << n_sites) || j < 0 || j + 1 >= n_sites)
        throw std::invalid_argument("two_site_rdm: bad site or length");
    const int shift = n_sites - 2 - j;  // bits of sites j, j+1 start here
    const Index low = Index{1} << shift;
    const Index high = Index{1} << j;
    MatrixXc rho = MatrixXc::Zero(4, 4);
    for (Index h = 0; h < high; ++h)
        for (Index l = 0; l < low; ++l)
            for (Index a = 0; a < 4; ++a)
                for (Index b = 0; b < 4; ++b)
                    rho(a, b) += psi((h << (shift + 2)) | (a << shift) | l) * std::conj(psi((h << (shift + 2)) | (b << shift) | l));
    return rho / rho.trace();
}

ShotRecord shot_estimator(const MatrixXc& rho2, int n_shots, uint64_t seed)
{
    if (n_shots < 1)
        throw std::invalid_argument("shot_estimator: n_shots must be positive");
    validate_density_matrix(rho2);
    const Eigen::VectorXd exact = pauli_vector(rho2);
    std::mt19937_64 rng(seed);
    ShotRecord r;
    r.n_shots = n_shots;
    for (int k = 0; k < 16; ++k) {
        if (k == 0) {
            r.estimates(0) = 1.0;
            r.errors(0) = 0.0;
            continue;
        }
        const double p_plus = std::clamp((1.0 + exact(k)) / 2.0, 0.0, 1.0);
        std::binomial_distribution<int> draw(n_shots, p_plus);
        const int plus = draw(rng);
        const double e = (2.0 * plus - n_shots) / n_shots;
        r.estimates(k) = e;
        r.errors(k) = std::sqrt(std::max(0.0, 1.0 - e * e) / n_shots);
    }
    const double s2 = r.estimates.squaredNorm();
    const double s4 = r.estimates.array().pow(4).sum();
    r.m_estimate = -0.5 * std::log(s4 / s2);
    double var = 0;
    for (int k = 1; k < 16; ++k) {
        const double e = r.estimates(k);
        const double grad = -0.5 * (4 * e * e * e / s4 - 2 * e / s2);
        var += grad * grad * r.errors(k) * r.errors(k);
    }
    r.m_error = std::sqrt(var);
    r.m_exact = sre_mixed(rho2);
    return r;
}

ShotRecord shot_estimator(const VectorXc& psi, int n_sites, int n_shots, uint64_t seed)
{
    if (n_sites < 2)
        throw std::invalid_argument("shot_estimator: need at least two sites");
    return shot_estimator(two_site_rdm(psi, n_sites, n_sites / 2 - 1), n_shots, seed);
}

std::vector<bool> flag_scars(const Eigen::VectorXd& energies, const Eigen::VectorXd& overlaps, double window, double min_ratio,
                             Index dim)
{
    const Index n = energies.size();
    std::vector<bool> flags(static_cast<size_t>(n), false);
    const double floor = min_ratio / static_cast<double>(dim);
    for (Index i = 0; i < n; ++i) {
        if (overlaps(i) < floor)
            continue;
        bool top = true;
        for (Index j = 0; j < n && top; ++j)
            if (j != i && std::abs(energies(j) - energies(i)) <= window && overlaps(j) > overlaps(i))
                top = false;
        flags[static_cast<size_t>(i)] = top;
    }
    return flags;
}

ScanResult eigenstate_scan(const SparseHamiltonian& h, const ConstrainedBasis& basis, int parity_sector,
                           const EigenstateConfig& cfg)
{
    const Spectrum sp = parity_sector == 0 ? ed(h) : ed(h, basis, parity_sector);
    const Index count = sp.energies.size();
    const Index z2 = basis.find(z2_bits(basis.n_sites));
    Eigen::VectorXd overlaps(count);
    for (Index k = 0; k < count; ++k)
        overlaps(k) = z2 < 0 ? 0.0 : std::norm(sp.vectors(z2, k));
    const auto scars = flag_scars(sp.energies, overlaps, cfg.scar_window, cfg.scar_min_ratio, basis.dim());

    const long first = std::max<long>(0, cfg.first);
    const long last = cfg.last < 0 ? static_cast<long>(count) : std::min<long>(cfg.last, static_cast<long>(count));
    const bool exact = cfg.exact && basis.n_sites <= sre_direct_max_sites;
    ScanResult out;
    out.columns = {"index", "energy", "parity", "overlap_z2", "m2", "m2_stderr", "scar", "degenerate"};
    if (last <= first)
        return out;
    std::vector<std::vector<double>> rows(static_cast<size_t>(last - first));
    std::vector<std::string> status(rows.size(), "ok");
    // exact evaluations parallelise over states; MC chains parallelise inside each state
    const int outer = exact ? cfg.threads : 1;
    parallel_for(last - first, outer, [&](long t) {
        const Index k = first + t;
        const VectorXc v = sp.vectors.col(k).normalized();
        double m = std::numeric_limits<double>::quiet_NaN(), se = 0.0;
        std::string msg = "ok";
        try {
            if (exact) {
                m = sre_direct(v, basis).m;
            } else {
                // seed depends on the state only, so split ranges reproduce a full run
                MCOptions o = cfg.mc;
                o.seed = mix_seed(cfg.mc.seed ^ mix_seed(static_cast<uint64_t>(k) + 0x2545f4914f6cdd1dull));
                const auto est = mc_sre_parallel(embed(v, basis), basis.n_sites, o, cfg.chains, cfg.threads);
                m = est.mean;
                se = est.stderr_;
                if (est.stalled)
                    msg = "sampler stalled";
            }
        } catch (const std::exception& e) {
            msg = e.what();
        }
        rows[static_cast<size_t>(t)] = {static_cast<double>(k),
                                        sp.energies(k),
                                        static_cast<double>(sp.parity[static_cast<size_t>(k)]),
                                        overlaps(k),
                                        m,
                                        se,
                                        scars[static_cast<size_t>(k)] ? 1.0 : 0.0,
                                        sp.degenerate[static_cast<size_t>(k)] ? 1.0 : 0.0};
        status[static_cast<size_t>(t)] = msg;
    });
    out.rows = std::move(rows);
    out.status = std::move(status);
    return out;
}

}  // namespace rydmagic
