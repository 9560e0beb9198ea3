#pragma once

// End to end: two almost-commuting gapped unitaries in, an exactly commuting
// unitary pair out, with every intermediate bound measured and checked.
//
//   1. rotate each input so its widest gap sits around angle 0;
//   2. series logarithms A, B with gamma_i = gamma_fraction * gap_i;
//   3. map A, B affinely into the unit ball, (A - pi)/pi;
//   4. joint diagonalization gives commuting A', B'; map back;
//   5. exponentiate and undo the rotations.

#include "nearcommute/commuting_oracle.hpp"
#include "nearcommute/gapped_log.hpp"
#include "nearcommute/linalg.hpp"

#include <optional>
#include <string>

namespace nearcommute {

struct BoundReport {
    double epsilon = 0.0;          // ||[U, V]||
    double delta1 = 0.0;
    double delta2 = 0.0;
    double sum_u = 0.0;            // sum_j |j| |c_j|
    double sum_v = 0.0;            // sum_k |k| |d_k|
    double alpha_emp = 0.0;        // sum_u * sum_v
    double alpha_normalized = 0.0; // alpha_emp * delta1 * delta2
    double predicted = 0.0;        // epsilon * alpha_emp
    double measured_log_comm = 0.0;
    double truncation_slack = 0.0; // 2 (tail_A ||B|| + tail_B ||A||)

    bool holds() const { return measured_log_comm <= predicted + truncation_slack; }
};

/// Leibniz bound ||[A, B]|| <= epsilon * sum |j||c_j| * sum |k||d_k|.
/// delta1/delta2 and measured_log_comm are left for the caller to fill in.
BoundReport log_commutator_bound(const LaurentCoefficients& coeffs_u,
                                 const LaurentCoefficients& coeffs_v, double epsilon);

struct PipelineOptions {
    double min_gap = 0.1;
    double gamma_fraction = 0.5;
    double series_target = 1e-6;
    // Tolerances default to Tolerances::for_dimension(n) with series_target above.
    std::optional<Tolerances> tolerances;
    JadeOptions jade;
};

// Runtime checks of the inequalities the construction rests on.
struct PostChecks {
    // ||e^{iA'} - e^{iA}|| vs ||A' - A|| + 1e-10 n
    double exp_gap_u = 0.0;
    double exp_gap_v = 0.0;
    bool exp_lipschitz = false;
    // ||X~ - U~|| <= ||A' - A|| + tail + 1e-10 n
    bool distance_bound = false;
    bool log_comm_bound = false;
    bool commutation = false; // comm_after <= commute tolerance
    bool unitarity = false;   // defects of X, Y within 1e-8 n
    double comm_centered = 0.0; // ||[X~, Y~]|| before undoing the phases
    double normalization_roundtrip = 0.0;

    bool all() const {
        return exp_lipschitz && distance_bound && log_comm_bound && commutation && unitarity;
    }
};

struct PipelineResult {
    UnitaryMatrix x;
    UnitaryMatrix y;
    double dist_u = 0.0;
    double dist_v = 0.0;
    double comm_before = 0.0;
    double comm_after = 0.0;
    BoundReport bound{};
    double herm_dist_a = 0.0;
    double herm_dist_b = 0.0;
    double phase_u = 0.0;
    double phase_v = 0.0;
    double gamma_u = 0.0;
    double gamma_v = 0.0;
    int order_u = 0;
    int order_v = 0;
    double tail_u = 0.0;
    double tail_v = 0.0;
    bool converged = false;
    int sweeps = 0;
    PostChecks checks{};
};

/// Throws GapTooSmall when either centered gap is <= opts.min_gap.
PipelineResult near_commuting_unitaries(const UnitaryMatrix& u, const UnitaryMatrix& v,
                                        const PipelineOptions& opts = {});

std::string to_key_value(const PipelineResult& r);
std::string pipeline_csv_header();
std::string to_csv_row(const PipelineResult& r);

} // namespace nearcommute
