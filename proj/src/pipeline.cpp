#include "nearcommute/pipeline.hpp"

#include "nearcommute/errors.hpp"
#include "nearcommute/matrix_io.hpp"
#include "nearcommute/spectral.hpp"

#include <cmath>
#include <sstream>

namespace nearcommute {

namespace {

double weighted_sum(const LaurentCoefficients& c) {
    double s = 0.0;
    for (int k = 1; k <= c.order; ++k) s += k * (std::abs(c.at(k)) + std::abs(c.at(-k)));
    return s;
}

} // namespace

BoundReport log_commutator_bound(const LaurentCoefficients& coeffs_u,
                                 const LaurentCoefficients& coeffs_v, double epsilon) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw InvalidInput("log_commutator_bound: epsilon must be finite and nonnegative");
    }
    BoundReport r;
    r.epsilon = epsilon;
    r.sum_u = weighted_sum(coeffs_u);
    r.sum_v = weighted_sum(coeffs_v);
    r.alpha_emp = r.sum_u * r.sum_v;
    r.predicted = epsilon * r.alpha_emp;
    return r;
}

PipelineResult near_commuting_unitaries(const UnitaryMatrix& u, const UnitaryMatrix& v,
                                        const PipelineOptions& opts) {
    if (u.dim() != v.dim()) throw InvalidInput("near_commuting_unitaries: dimension mismatch");
    if (!(opts.gamma_fraction > 0.0) || !(opts.gamma_fraction < 1.0)) {
        throw InvalidInput("near_commuting_unitaries: gamma_fraction must lie in (0, 1)");
    }
    const Index n = u.dim();
    const double nd = static_cast<double>(n);
    Tolerances tol = Tolerances::for_dimension(n);
    tol.series_target = opts.series_target;
    if (opts.tolerances) tol = *opts.tolerances;
    tol.validate();

    const double comm_before = operator_norm(commutator(u.matrix(), v.matrix()));

    const CenteredUnitary cu = center_gap(u);
    const CenteredUnitary cv = center_gap(v);
    const double gap_u = cu.gap.half_width;
    const double gap_v = cv.gap.half_width;
    if (!(gap_u > opts.min_gap) || !(gap_v > opts.min_gap)) {
        std::ostringstream os;
        os << "near_commuting_unitaries: spectral gap half-widths " << gap_u << " and " << gap_v
           << " must both exceed min_gap = " << opts.min_gap;
        throw GapTooSmall(os.str(), gap_u, gap_v);
    }

    const double gamma_u = opts.gamma_fraction * gap_u;
    const double gamma_v = opts.gamma_fraction * gap_v;
    const GappedLog la = gapped_log(cu.matrix, gamma_u, 0, tol);
    const GappedLog lb = gapped_log(cv.matrix, gamma_v, 0, tol);
    const Matrix& a = la.log.matrix();
    const Matrix& b = lb.log.matrix();

    BoundReport bound = log_commutator_bound(la.coeffs, lb.coeffs, comm_before);
    bound.delta1 = gap_u;
    bound.delta2 = gap_v;
    bound.alpha_normalized = bound.alpha_emp * gap_u * gap_v;
    bound.measured_log_comm = operator_norm(commutator(a, b));
    bound.truncation_slack =
        2.0 * (la.coeffs.tail * operator_norm(b) + lb.coeffs.tail * operator_norm(a));

    // Spectra lie in (gap, 2 pi - gap); shift and scale into (-1, 1).
    const Matrix id = Matrix::Identity(n, n);
    const Matrix a_bar = (a - kPi * id) / kPi;
    const Matrix b_bar = (b - kPi * id) / kPi;
    const double herm_tol = std::max({tol.hermiticity, la.log.defect(), lb.log.defect()});

    PostChecks checks;
    checks.normalization_roundtrip = operator_norm(kPi * a_bar + kPi * id - a);

    const CommutingHermitianPair pair =
        nearest_commuting_pair(HermitianMatrix(a_bar, herm_tol), HermitianMatrix(b_bar, herm_tol), opts.jade);

    const HermitianMatrix a_prime(kPi * pair.a_prime.matrix() + kPi * id, herm_tol);
    const HermitianMatrix b_prime(kPi * pair.b_prime.matrix() + kPi * id, herm_tol);
    const double herm_dist_a = operator_norm(a_prime.matrix() - a);
    const double herm_dist_b = operator_norm(b_prime.matrix() - b);

    const UnitaryMatrix x_centered = herm_exp(a_prime);
    const UnitaryMatrix y_centered = herm_exp(b_prime);

    const double slack = 1e-10 * nd;
    checks.exp_gap_u = operator_norm(x_centered.matrix() - herm_exp(la.log).matrix());
    checks.exp_gap_v = operator_norm(y_centered.matrix() - herm_exp(lb.log).matrix());
    checks.exp_lipschitz =
        checks.exp_gap_u <= herm_dist_a + slack && checks.exp_gap_v <= herm_dist_b + slack;
    const double centered_dist_u = operator_norm(x_centered.matrix() - cu.matrix.matrix());
    const double centered_dist_v = operator_norm(y_centered.matrix() - cv.matrix.matrix());
    checks.distance_bound = centered_dist_u <= herm_dist_a + la.coeffs.tail + slack &&
                            centered_dist_v <= herm_dist_b + lb.coeffs.tail + slack;
    checks.log_comm_bound = bound.holds();
    checks.comm_centered = operator_norm(commutator(x_centered.matrix(), y_centered.matrix()));

    Matrix x = std::polar(1.0, cu.phase) * x_centered.matrix();
    Matrix y = std::polar(1.0, cv.phase) * y_centered.matrix();
    const double comm_after = operator_norm(commutator(x, y));
    checks.commutation = comm_after <= tol.commute;

    PipelineResult r{.x = UnitaryMatrix(std::move(x)), .y = UnitaryMatrix(std::move(y))};
    checks.unitarity = r.x.defect() <= 1e-8 * nd && r.y.defect() <= 1e-8 * nd;
    r.dist_u = operator_norm(u.matrix() - r.x.matrix());
    r.dist_v = operator_norm(v.matrix() - r.y.matrix());
    r.comm_before = comm_before;
    r.comm_after = comm_after;
    r.bound = bound;
    r.herm_dist_a = herm_dist_a;
    r.herm_dist_b = herm_dist_b;
    r.phase_u = cu.phase;
    r.phase_v = cv.phase;
    r.gamma_u = gamma_u;
    r.gamma_v = gamma_v;
    r.order_u = la.coeffs.order;
    r.order_v = lb.coeffs.order;
    r.tail_u = la.coeffs.tail;
    r.tail_v = lb.coeffs.tail;
    r.converged = pair.converged;
    r.sweeps = pair.sweeps;
    r.checks = checks;
    return r;
}

std::string to_key_value(const PipelineResult& r) {
    std::ostringstream os;
    auto kv = [&](const char* key, double value) { os << key << '=' << format_double(value) << '\n'; };
    kv("dist_u", r.dist_u);
    kv("dist_v", r.dist_v);
    kv("dist_sum", r.dist_u + r.dist_v);
    kv("comm_before", r.comm_before);
    kv("comm_after", r.comm_after);
    kv("herm_dist_a", r.herm_dist_a);
    kv("herm_dist_b", r.herm_dist_b);
    kv("delta1", r.bound.delta1);
    kv("delta2", r.bound.delta2);
    kv("phase_u", r.phase_u);
    kv("phase_v", r.phase_v);
    kv("gamma_u", r.gamma_u);
    kv("gamma_v", r.gamma_v);
    os << "order_u=" << r.order_u << '\n' << "order_v=" << r.order_v << '\n';
    kv("tail_u", r.tail_u);
    kv("tail_v", r.tail_v);
    kv("alpha_emp", r.bound.alpha_emp);
    kv("alpha_normalized", r.bound.alpha_normalized);
    kv("predicted_log_comm", r.bound.predicted);
    kv("measured_log_comm", r.bound.measured_log_comm);
    kv("truncation_slack", r.bound.truncation_slack);
    os << "converged=" << (r.converged ? 1 : 0) << '\n' << "sweeps=" << r.sweeps << '\n';
    os << "checks_passed=" << (r.checks.all() ? 1 : 0) << '\n';
    return os.str();
}

std::string pipeline_csv_header() {
    return "dist_u,dist_v,comm_before,comm_after,herm_dist_a,herm_dist_b,delta1,delta2,"
           "phase_u,phase_v,order_u,order_v,tail_u,tail_v,alpha_emp,predicted_log_comm,"
           "measured_log_comm,converged,checks_passed";
}

std::string to_csv_row(const PipelineResult& r) {
    std::ostringstream os;
    const auto f = [](double v) { return format_double(v); };
    os << f(r.dist_u) << ',' << f(r.dist_v) << ',' << f(r.comm_before) << ',' << f(r.comm_after) << ','
       << f(r.herm_dist_a) << ',' << f(r.herm_dist_b) << ',' << f(r.bound.delta1) << ','
       << f(r.bound.delta2) << ',' << f(r.phase_u) << ',' << f(r.phase_v) << ',' << r.order_u << ','
       << r.order_v << ',' << f(r.tail_u) << ',' << f(r.tail_v) << ',' << f(r.bound.alpha_emp) << ','
       << f(r.bound.predicted) << ',' << f(r.bound.measured_log_comm) << ',' << (r.converged ? 1 : 0)
       << ',' << (r.checks.all() ? 1 : 0);
    return os.str();
}

} // namespace nearcommute
