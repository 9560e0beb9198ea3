#include "nearcommute/harness.hpp"

#include "nearcommute/errors.hpp"
#include "nearcommute/matrix_io.hpp"
#include "nearcommute/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace nearcommute {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr int kMaxRegenerations = 16;

Matrix diagonal_phases(const std::vector<double>& angles) {
    const Index n = static_cast<Index>(angles.size());
    Eigen::VectorXcd d(n);
    for (Index j = 0; j < n; ++j) d(j) = std::polar(1.0, angles[static_cast<std::size_t>(j)]);
    return d.asDiagonal();
}

std::vector<double> gapped_angles(Index n, double gap, Rng& rng) {
    std::vector<double> a(static_cast<std::size_t>(n));
    for (double& x : a) x = gap + (kTwoPi - 2.0 * gap) * rng.uniform();
    return a;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = kTwoPi * uniform();
    spare_ = r * std::sin(t);
    return r * std::cos(t);
}

Complex Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * std::sqrt(0.5);
}

Matrix haar_unitary(Index n, Rng& rng) {
    Matrix z(n, n);
    for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r) z(r, c) = rng.complex_normal();
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix& packed = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const Complex rjj = packed(j, j);
        const double mag = std::abs(rjj);
        if (mag > 0.0) q.col(j) *= rjj / mag;
    }
    return q;
}

Matrix unit_hermitian(Index n, Rng& rng) {
    Matrix z(n, n);
    for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r) z(r, c) = rng.complex_normal();
    Matrix h = 0.5 * (z + z.adjoint());
    const double norm = operator_norm(h);
    return norm > 0.0 ? Matrix(h / norm) : h;
}

UnitaryMatrix gen_gapped_unitary(Index n, double gap, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("gen_gapped_unitary: n must be >= 1");
    if (!(gap > 0.0) || !(gap < kPi)) throw InvalidInput("gen_gapped_unitary: gap must lie in (0, pi)");
    Rng rng(seed);
    const std::vector<double> angles = gapped_angles(n, gap, rng);
    const Matrix w = haar_unitary(n, rng);
    return UnitaryMatrix(w * diagonal_phases(angles) * w.adjoint());
}

AlmostCommutingPair gen_almost_commuting_pair(Index n, double gap, double eps_target,
                                              std::uint64_t seed, bool perturb_both) {
    if (n < 1) throw InvalidInput("gen_almost_commuting_pair: n must be >= 1");
    if (!(gap > 0.0) || !(gap < kPi)) {
        throw InvalidInput("gen_almost_commuting_pair: gap must lie in (0, pi)");
    }
    if (!(eps_target >= 0.0) || !std::isfinite(eps_target)) {
        throw InvalidInput("gen_almost_commuting_pair: eps_target must be finite and >= 0");
    }
    for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        const Matrix w = haar_unitary(n, rng);
        const std::vector<double> phi = gapped_angles(n, gap, rng);
        const std::vector<double> psi = gapped_angles(n, gap, rng);
        const Matrix g_u = unit_hermitian(n, rng);
        const Matrix g_v = unit_hermitian(n, rng);

        Matrix u = w * diagonal_phases(phi) * w.adjoint();
        Matrix v = w * diagonal_phases(psi) * w.adjoint();
        if (eps_target > 0.0) {
            u = herm_exp(HermitianMatrix(eps_target * g_u)).matrix() * u;
            if (perturb_both) v = herm_exp(HermitianMatrix(eps_target * g_v)).matrix() * v;
        }
        UnitaryMatrix uu(std::move(u));
        UnitaryMatrix vv(std::move(v));
        const double gap_u = largest_gap(unitary_eigensystem(uu)).half_width;
        const double gap_v = largest_gap(unitary_eigensystem(vv)).half_width;
        if (gap_u < 0.5 * gap || gap_v < 0.5 * gap) continue;
        const double eps_actual = operator_norm(commutator(uu.matrix(), vv.matrix()));
        return AlmostCommutingPair{std::move(uu), std::move(vv), eps_actual, gap_u, gap_v, attempt + 1};
    }
    throw PreconditionError("gen_almost_commuting_pair: perturbation keeps closing the gap; "
                            "reduce eps_target or increase the gap");
}

std::pair<UnitaryMatrix, UnitaryMatrix> gen_voiculescu_pair(Index n) {
    if (n < 2) throw InvalidInput("gen_voiculescu_pair: n must be >= 2");
    Matrix clock = Matrix::Zero(n, n);
    Matrix shift = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        clock(j, j) = std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(n));
        shift((j + 1) % n, j) = 1.0;
    }
    return {UnitaryMatrix(std::move(clock)), UnitaryMatrix(std::move(shift))};
}

void ExperimentConfig::validate() const {
    if (n < 1) throw InvalidInput("ExperimentConfig: n must be >= 1");
    if (!(delta > 0.0) || !(delta < kPi)) throw InvalidInput("ExperimentConfig: delta must lie in (0, pi)");
    if (epsilons.empty()) throw InvalidInput("ExperimentConfig: no epsilons");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] >= 0.0) || !std::isfinite(epsilons[i])) {
            throw InvalidInput("ExperimentConfig: epsilons must be finite and nonnegative");
        }
        if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
            throw InvalidInput("ExperimentConfig: epsilons must be strictly descending");
        }
    }
    if (trials < 1) throw InvalidInput("ExperimentConfig: trials must be >= 1");
    if (threads < 1) throw InvalidInput("ExperimentConfig: threads must be >= 1");
    if (!(series_target > 0.0)) throw InvalidInput("ExperimentConfig: series_target must be positive");
}

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t eps_index, int trial_index) {
    TrialOutcome out;
    TrialRecord& rec = out.record;
    rec.n = config.n;
    rec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial_index));
    rec.eps_target = config.epsilons.at(eps_index);
    try {
        const AlmostCommutingPair pair = gen_almost_commuting_pair(
            config.n, config.delta, rec.eps_target, rec.seed, config.perturb_both);
        rec.eps_actual = pair.eps_actual;
        rec.delta1 = pair.gap_u;
        rec.delta2 = pair.gap_v;

        PipelineOptions opts;
        opts.min_gap = config.min_gap;
        opts.series_target = config.series_target;
        PipelineResult res = near_commuting_unitaries(pair.u, pair.v, opts);
        rec.delta1 = res.bound.delta1;
        rec.delta2 = res.bound.delta2;
        rec.log_comm = res.bound.measured_log_comm;
        rec.predicted_bound = res.bound.predicted;
        rec.truncation_slack = res.bound.truncation_slack;
        rec.herm_dist_a = res.herm_dist_a;
        rec.herm_dist_b = res.herm_dist_b;
        rec.dist_u = res.dist_u;
        rec.dist_v = res.dist_v;
        rec.comm_after = res.comm_after;
        rec.k_used = std::max(res.order_u, res.order_v);
        rec.converged = res.converged;
        rec.status = res.checks.all() ? "ok" : "failed";
        if (!res.checks.all()) out.error = "post-checks failed";
        out.result = std::move(res);
    } catch (const PreconditionError& e) {
        rec.status = "rejected";
        out.error = e.what();
    } catch (const std::exception& e) {
        rec.status = "failed";
        out.error = e.what();
    }
    return out;
}

std::vector<TrialOutcome> run_sweep_outcomes(const ExperimentConfig& config) {
    config.validate();
    const std::size_t per_eps = static_cast<std::size_t>(config.trials);
    const std::size_t total = config.epsilons.size() * per_eps;
    std::vector<TrialOutcome> outcomes(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            outcomes[i] = run_trial(config, i / per_eps, static_cast<int>(i % per_eps));
        }
    };
    const int threads = std::min<int>(config.threads, static_cast<int>(total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return outcomes;
}

std::vector<TrialRecord> run_sweep(const ExperimentConfig& config) {
    std::vector<TrialOutcome> outcomes = run_sweep_outcomes(config);
    std::vector<TrialRecord> records;
    records.reserve(outcomes.size());
    for (auto& o : outcomes) records.push_back(std::move(o.record));
    if (!config.output_path.empty()) {
        std::ofstream out(config.output_path);
        if (!out) throw std::runtime_error("run_sweep: cannot write '" + config.output_path + "'");
        write_sweep_csv(out, records, utc_timestamp());
        if (!out) throw std::runtime_error("run_sweep: write failed for '" + config.output_path + "'");
    }
    return records;
}

std::string trial_csv_header() {
    return "n,seed,delta1,delta2,eps_target,eps_actual,log_comm,predicted_bound,herm_dist_a,"
           "herm_dist_b,dist_u,dist_v,comm_after,K_used,converged,status";
}

std::string to_csv_row(const TrialRecord& r) {
    std::ostringstream os;
    const auto f = [](double v) { return format_double(v); };
    os << r.n << ',' << r.seed << ',' << f(r.delta1) << ',' << f(r.delta2) << ',' << f(r.eps_target)
       << ',' << f(r.eps_actual) << ',' << f(r.log_comm) << ',' << f(r.predicted_bound) << ','
       << f(r.herm_dist_a) << ',' << f(r.herm_dist_b) << ',' << f(r.dist_u) << ',' << f(r.dist_v)
       << ',' << f(r.comm_after) << ',' << r.k_used << ',' << (r.converged ? 1 : 0) << ','
       << r.status;
    return os.str();
}

void write_sweep_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                     const std::string& timestamp) {
    if (!timestamp.empty()) out << "# generated " << timestamp << '\n';
    out << trial_csv_header() << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double median(std::vector<double> values) {
    if (values.empty()) return std::nan("");
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nan("");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidInput("spearman: need two equally sized samples of length >= 2");
    }
    return pearson(average_ranks(x), average_ranks(y));
}

std::vector<double> log_spaced(double start, double end, int points) {
    if (points < 1 || !(start > 0.0) || !(end > 0.0)) {
        throw InvalidInput("log_spaced: need points >= 1 and positive endpoints");
    }
    if (points == 1) return {start};
    std::vector<double> out(static_cast<std::size_t>(points));
    const double ls = std::log(start);
    const double le = std::log(end);
    for (int i = 0; i < points; ++i) {
        out[static_cast<std::size_t>(i)] = std::exp(ls + (le - ls) * i / (points - 1));
    }
    out.front() = start;
    out.back() = end;
    return out;
}

SweepSummary summarize(const std::vector<TrialRecord>& records) {
    SweepSummary s;
    std::vector<double> order;
    for (const auto& r : records) {
        if (std::find(order.begin(), order.end(), r.eps_target) == order.end()) order.push_back(r.eps_target);
    }
    for (double eps : order) {
        EpsilonSummary e;
        e.eps_target = eps;
        std::vector<double> dists, actual;
        for (const auto& r : records) {
            if (r.eps_target != eps) continue;
            if (r.status == "ok") {
                ++e.accepted;
                dists.push_back(r.dist_u + r.dist_v);
                actual.push_back(r.eps_actual);
            } else if (r.status == "rejected") {
                ++e.rejected;
            } else {
                ++e.failed;
            }
        }
        e.median_dist = median(dists);
        e.median_eps_actual = median(actual);
        s.per_epsilon.push_back(e);
    }

    std::vector<double> lx, ly, ex, dy;
    for (const auto& e : s.per_epsilon) {
        if (e.accepted == 0) continue;
        ex.push_back(e.eps_target);
        dy.push_back(e.median_dist);
        if (e.median_eps_actual > 0.0 && e.median_dist > 0.0) {
            lx.push_back(std::log(e.median_eps_actual));
            ly.push_back(std::log(e.median_dist));
        }
    }
    s.spearman = ex.size() >= 2 ? spearman(ex, dy) : std::nan("");
    if (lx.size() >= 2) {
        const double n = static_cast<double>(lx.size());
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        s.slope = sxx > 0.0 ? sxy / sxx : std::nan("");
    } else {
        s.slope = std::nan("");
    }
    return s;
}

} // namespace nearcommute
