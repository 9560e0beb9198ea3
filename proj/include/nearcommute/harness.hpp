#pragma once

// Random test ensembles, epsilon sweeps and their CSV persistence.
//
// Every generator is a pure function of its parameters and a 64-bit seed.
// Trial seeds are derived from (sweep seed, trial index) with SplitMix64, so
// the schedule of a parallel sweep never changes its output.

#include "nearcommute/linalg.hpp"
#include "nearcommute/pipeline.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace nearcommute {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// mt19937_64 with portable uniform/normal conversions (the std distributions
// are implementation-defined, which would break cross-platform reproducibility).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();      // (0, 1)
    double normal();       // N(0, 1), Box-Muller
    Complex complex_normal(); // E|z|^2 = 1

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Haar-distributed unitary: QR of a complex Gaussian matrix, columns fixed
/// by the phases of R's diagonal.
Matrix haar_unitary(Index n, Rng& rng);

/// Hermitian matrix with unit operator norm (normalized GUE sample).
Matrix unit_hermitian(Index n, Rng& rng);

/// Eigenangles uniform on (gap, 2*pi - gap), Haar eigenbasis.
UnitaryMatrix gen_gapped_unitary(Index n, double gap, std::uint64_t seed);

struct AlmostCommutingPair {
    UnitaryMatrix u;
    UnitaryMatrix v;
    double eps_actual = 0.0; // ||[U, V]||
    double gap_u = 0.0;      // largest gap half-widths after perturbation
    double gap_v = 0.0;
    int attempts = 1;
};

/// Commuting base pair sharing a Haar basis, then U <- e^{i eps G} U with G a
/// unit-norm Hermitian (V likewise when perturb_both). Regenerates with a
/// fresh sub-seed if a perturbed gap falls below gap/2.
AlmostCommutingPair gen_almost_commuting_pair(Index n, double gap, double eps_target,
                                              std::uint64_t seed, bool perturb_both = false);

/// Clock diag(1, w, ..., w^{n-1}), w = e^{2 pi i/n}, and the cyclic shift.
std::pair<UnitaryMatrix, UnitaryMatrix> gen_voiculescu_pair(Index n);

struct ExperimentConfig {
    Index n = 16;
    double delta = 1.0;
    std::vector<double> epsilons; // nonnegative, strictly descending
    int trials = 1;
    std::uint64_t seed = 0;
    double series_target = 1e-6;
    double min_gap = 0.1;
    bool perturb_both = false;
    int threads = 1;
    std::string output_path; // CSV written here when non-empty

    void validate() const;
};

struct TrialRecord {
    Index n = 0;
    std::uint64_t seed = 0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double eps_target = 0.0;
    double eps_actual = 0.0;
    double log_comm = 0.0;
    double predicted_bound = 0.0;
    double herm_dist_a = 0.0;
    double herm_dist_b = 0.0;
    double dist_u = 0.0;
    double dist_v = 0.0;
    double comm_after = 0.0;
    int k_used = 0; // max of the two truncation orders
    bool converged = false;
    std::string status = "ok"; // ok | rejected | failed
    double truncation_slack = 0.0; // not persisted
};

struct TrialOutcome {
    TrialRecord record;
    std::optional<PipelineResult> result;
    std::string error;
};

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t eps_index, int trial_index);

/// All trials, ordered by (epsilon index, trial index).
std::vector<TrialOutcome> run_sweep_outcomes(const ExperimentConfig& config);
/// Records only; also persisted to config.output_path when set.
std::vector<TrialRecord> run_sweep(const ExperimentConfig& config);

std::string trial_csv_header();
std::string to_csv_row(const TrialRecord& r);
/// First line is a '#' comment carrying the timestamp (omitted when empty).
void write_sweep_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                     const std::string& timestamp);
std::string utc_timestamp();

struct EpsilonSummary {
    double eps_target = 0.0;
    double median_eps_actual = 0.0;
    double median_dist = 0.0; // median of dist_u + dist_v over accepted trials
    int accepted = 0;
    int rejected = 0;
    int failed = 0;
};

struct SweepSummary {
    std::vector<EpsilonSummary> per_epsilon;
    double slope = 0.0;    // least squares of log(median dist) vs log(median eps_actual)
    double spearman = 0.0; // rank correlation of eps_target vs median dist
};

SweepSummary summarize(const std::vector<TrialRecord>& records);

double median(std::vector<double> values);
double spearman(const std::vector<double>& x, const std::vector<double>& y);
/// Geometric progression from start to end inclusive.
std::vector<double> log_spaced(double start, double end, int points);

} // namespace nearcommute
