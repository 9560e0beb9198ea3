// nearcommute: command-line front end.
//
// Exit codes: 0 success, 2 precondition rejection or invalid input,
// 1 numerical failure (including failed post-checks).

#include "nearcommute/errors.hpp"
#include "nearcommute/gapped_log.hpp"
#include "nearcommute/harness.hpp"
#include "nearcommute/matrix_io.hpp"
#include "nearcommute/pipeline.hpp"
#include "nearcommute/spectral.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

namespace nc = nearcommute;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitRejected = 2;

void print_kv(const char* key, double value) {
    std::cout << key << '=' << nc::format_double(value) << '\n';
}

int cmd_gap(const std::string& path) {
    const nc::UnitaryMatrix u(nc::read_mtxc_file(path));
    const nc::GapInfo g = nc::largest_gap(nc::unitary_eigensystem(u));
    print_kv("center", g.center);
    print_kv("half_width", g.half_width);
    print_kv("lo", g.lo);
    print_kv("hi", g.hi);
    return kExitOk;
}

int cmd_log(const std::string& path, double gamma, double target, const std::string& out_path,
            const std::string& coeff_path) {
    const nc::UnitaryMatrix u(nc::read_mtxc_file(path));
    const nc::CenteredUnitary c = nc::center_gap(u);
    if (gamma <= 0.0) gamma = 0.5 * c.gap.half_width;
    nc::Tolerances tol = nc::Tolerances::for_dimension(u.dim());
    tol.series_target = target;
    const nc::GappedLog lg = nc::gapped_log(c.matrix, gamma, 0, tol);
    // Undo the centering so that e^{iH} = U with spec(H) in (phase, phase + 2 pi).
    const nc::Matrix h = lg.log.matrix() + c.phase * nc::Matrix::Identity(u.dim(), u.dim());
    nc::write_mtxc_file(out_path, h);
    if (!coeff_path.empty()) {
        std::ofstream cs(coeff_path);
        if (!cs) throw std::runtime_error("cannot write '" + coeff_path + "'");
        nc::write_coefficients_csv(cs, lg.coeffs);
    }
    print_kv("phase", c.phase);
    print_kv("gap", c.gap.half_width);
    print_kv("gamma", gamma);
    std::cout << "K=" << lg.coeffs.order << '\n';
    print_kv("tail", lg.coeffs.tail);
    print_kv("C_emp", lg.coeffs.decay_constant);
    std::cout << "out=" << out_path << '\n';
    return kExitOk;
}

int cmd_pair(const std::string& u_path, const std::string& v_path, double min_gap, double target,
             const std::string& x_path, const std::string& y_path, bool csv) {
    const nc::UnitaryMatrix u(nc::read_mtxc_file(u_path));
    const nc::UnitaryMatrix v(nc::read_mtxc_file(v_path));
    nc::PipelineOptions opts;
    opts.min_gap = min_gap;
    opts.series_target = target;
    const nc::PipelineResult r = nc::near_commuting_unitaries(u, v, opts);
    nc::write_mtxc_file(x_path, r.x.matrix());
    nc::write_mtxc_file(y_path, r.y.matrix());
    if (csv) {
        std::cout << nc::pipeline_csv_header() << '\n' << nc::to_csv_row(r) << '\n';
    } else {
        std::cout << nc::to_key_value(r);
    }
    if (!r.checks.all()) {
        std::cerr << "error: post-checks failed\n";
        return kExitNumerical;
    }
    return kExitOk;
}

struct SweepArgs {
    long n = 16;
    double delta = 1.0;
    double eps_start = 1e-1;
    double eps_end = 1e-4;
    int points = 4;
    int trials = 5;
    std::uint64_t seed = 0;
    std::string out = "sweep.csv";
    double target = 1e-6;
    double min_gap = 0.1;
    int threads = 1;
    bool include_zero = false;
    bool perturb_both = false;
};

int cmd_sweep(const SweepArgs& a) {
    nc::ExperimentConfig cfg;
    cfg.n = a.n;
    cfg.delta = a.delta;
    cfg.epsilons = nc::log_spaced(a.eps_start, a.eps_end, a.points);
    if (a.include_zero) cfg.epsilons.push_back(0.0);
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.series_target = a.target;
    cfg.min_gap = a.min_gap;
    cfg.threads = a.threads;
    cfg.perturb_both = a.perturb_both;
    cfg.output_path = a.out;
    const auto records = nc::run_sweep(cfg);
    const nc::SweepSummary s = nc::summarize(records);
    for (const auto& e : s.per_epsilon) {
        std::cout << "eps=" << nc::format_double(e.eps_target)
                  << " median_eps_actual=" << nc::format_double(e.median_eps_actual)
                  << " median_dist=" << nc::format_double(e.median_dist) << " accepted=" << e.accepted
                  << " rejected=" << e.rejected << " failed=" << e.failed << '\n';
    }
    print_kv("slope", s.slope);
    print_kv("spearman", s.spearman);
    std::cout << "out=" << a.out << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Commuting unitary pairs near almost-commuting gapped unitaries"};
    app.require_subcommand(1);

    std::string gap_path;
    auto* gap = app.add_subcommand("gap", "Print the widest spectral gap of a unitary");
    gap->add_option("matrix", gap_path, "MTXC file")->required();

    std::string log_path, log_out = "log.mtxc", log_coeffs;
    double log_gamma = 0.0, log_target = 1e-6;
    auto* log = app.add_subcommand("log", "Series logarithm of a gapped unitary");
    log->add_option("matrix", log_path, "MTXC file")->required();
    log->add_option("--gamma", log_gamma, "Mollifier width (default: half the gap)");
    log->add_option("--target", log_target, "Truncation tail target");
    log->add_option("--out", log_out, "Output MTXC file for H");
    log->add_option("--coeffs", log_coeffs, "Also dump the series coefficients as CSV");

    std::string u_path, v_path, x_path = "x.mtxc", y_path = "y.mtxc";
    double min_gap = 0.1, pair_target = 1e-6;
    bool pair_csv = false;
    auto* pair = app.add_subcommand("pair", "Commuting pair near (U, V)");
    pair->add_option("u", u_path, "MTXC file for U")->required();
    pair->add_option("v", v_path, "MTXC file for V")->required();
    pair->add_option("--min-gap", min_gap, "Reject inputs with a smaller gap half-width");
    pair->add_option("--target", pair_target, "Truncation tail target");
    pair->add_option("--out-x", x_path, "Output MTXC file for X");
    pair->add_option("--out-y", y_path, "Output MTXC file for Y");
    pair->add_flag("--csv", pair_csv, "Print the result as a CSV row");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Epsilon sweep over random almost-commuting pairs");
    sweep->add_option("--n", sw.n)->required();
    sweep->add_option("--delta", sw.delta)->required();
    sweep->add_option("--eps-start", sw.eps_start)->required();
    sweep->add_option("--eps-end", sw.eps_end)->required();
    sweep->add_option("--points", sw.points)->required();
    sweep->add_option("--trials", sw.trials)->required();
    sweep->add_option("--seed", sw.seed)->required();
    sweep->add_option("--out", sw.out)->required();
    sweep->add_option("--target", sw.target);
    sweep->add_option("--min-gap", sw.min_gap);
    sweep->add_option("--threads", sw.threads);
    sweep->add_flag("--include-zero", sw.include_zero, "Append an epsilon = 0 point");
    sweep->add_flag("--perturb-both", sw.perturb_both, "Perturb V as well as U");

    auto* generate = app.add_subcommand("generate", "Write random test matrices");
    generate->require_subcommand(1);
    long g_n = 8;
    double g_delta = 1.0, g_eps = 1e-3;
    std::uint64_t g_seed = 0;
    std::string g_out = "u.mtxc", g_out_v = "v.mtxc";
    bool g_both = false;

    auto* gen_gapped = generate->add_subcommand("gapped", "Unitary with a spectral gap around 0");
    gen_gapped->add_option("--n", g_n)->required();
    gen_gapped->add_option("--delta", g_delta)->required();
    gen_gapped->add_option("--seed", g_seed);
    gen_gapped->add_option("--out", g_out);

    auto* gen_pair = generate->add_subcommand("pair", "Almost-commuting gapped pair");
    gen_pair->add_option("--n", g_n)->required();
    gen_pair->add_option("--delta", g_delta)->required();
    gen_pair->add_option("--eps", g_eps)->required();
    gen_pair->add_option("--seed", g_seed);
    gen_pair->add_option("--out-u", g_out);
    gen_pair->add_option("--out-v", g_out_v);
    gen_pair->add_flag("--perturb-both", g_both);

    auto* gen_voic = generate->add_subcommand("voiculescu", "Clock and shift matrices");
    gen_voic->add_option("--n", g_n)->required();
    gen_voic->add_option("--out-u", g_out);
    gen_voic->add_option("--out-v", g_out_v);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gap->parsed()) return cmd_gap(gap_path);
        if (log->parsed()) return cmd_log(log_path, log_gamma, log_target, log_out, log_coeffs);
        if (pair->parsed()) return cmd_pair(u_path, v_path, min_gap, pair_target, x_path, y_path, pair_csv);
        if (sweep->parsed()) return cmd_sweep(sw);
        if (gen_gapped->parsed()) {
            nc::write_mtxc_file(g_out, nc::gen_gapped_unitary(g_n, g_delta, g_seed).matrix());
            std::cout << "out=" << g_out << '\n';
            return kExitOk;
        }
        if (gen_pair->parsed()) {
            const auto p = nc::gen_almost_commuting_pair(g_n, g_delta, g_eps, g_seed, g_both);
            nc::write_mtxc_file(g_out, p.u.matrix());
            nc::write_mtxc_file(g_out_v, p.v.matrix());
            print_kv("eps_actual", p.eps_actual);
            print_kv("gap_u", p.gap_u);
            print_kv("gap_v", p.gap_v);
            return kExitOk;
        }
        if (gen_voic->parsed()) {
            const auto [c, s] = nc::gen_voiculescu_pair(g_n);
            nc::write_mtxc_file(g_out, c.matrix());
            nc::write_mtxc_file(g_out_v, s.matrix());
            print_kv("comm", nc::operator_norm(nc::commutator(c.matrix(), s.matrix())));
            return kExitOk;
        }
    } catch (const nc::GapTooSmall& e) {
        std::cerr << "rejected: " << e.what() << '\n';
        return kExitRejected;
    } catch (const nc::PreconditionError& e) {
        std::cerr << "rejected: " << e.what() << '\n';
        return kExitRejected;
    } catch (const nc::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitRejected;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitNumerical;
}
