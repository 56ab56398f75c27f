#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ordpick/featgen.hpp"
#include "ordpick/oracle.hpp"

namespace ordpick {

enum class ModelFamily { knn, dt, mlp, lsvm };

// Report/CLI names: KNN, DT, MLP, SVM.
std::string family_name(ModelFamily f);
std::optional<ModelFamily> family_from_name(std::string_view name);

enum class KnnWeighting { uniform, inverse_distance };
enum class SplitCriterion { gini, entropy };

struct KnnParams {
    int k = 5;
    KnnWeighting weighting = KnnWeighting::uniform;
};

struct DtParams {
    int max_depth = 0;  // <= 0: unlimited
    int min_samples_split = 2;
    SplitCriterion criterion = SplitCriterion::gini;
};

struct MlpParams {
    int hidden_size = 16;
    double learning_rate = 0.01;
    int epochs = 100;
    double l2 = 0.0;
};

struct LsvmParams {
    double c = 1.0;
    int epochs = 200;
    double learning_rate = 0.01;
};

struct ModelSpec {
    ModelFamily family = ModelFamily::knn;
    std::variant<KnnParams, DtParams, MlpParams, LsvmParams> params = KnnParams{};
};

// "key=value ..." form used in hyperpar files; parse is its inverse.
std::string spec_params_to_string(const ModelSpec& spec);
ModelSpec spec_from_strings(ModelFamily family, std::string_view params_text);

// Per-feature mean and population stddev. Zero-variance columns keep
// scale 1 and are mapped to all-zeros on apply.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<std::uint8_t> zero_variance;
};

Standardizer standardize_fit(const FeatureMatrix& x);
FeatureMatrix standardize_apply(const Standardizer& st, const FeatureMatrix& x);

struct TreeNode {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;
};

struct KnnState {
    FeatureMatrix x;  // standardized training rows
    std::vector<int> y;
};

struct DtState {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct MlpState {
    int n_in = 0, n_hidden = 0, n_out = 0;
    std::vector<double> w1;  // n_hidden x n_in, row-major
    std::vector<double> b1;  // n_hidden
    std::vector<double> w2;  // n_out x n_hidden
    std::vector<double> b2;  // n_out
};

struct LsvmState {
    int n_in = 0, n_classes = 0;
    std::vector<double> w;  // n_classes x n_in, row-major (one-vs-rest)
    std::vector<double> b;  // n_classes
};

struct TrainedModel {
    ModelSpec spec;
    Standardizer standardizer;
    int n_labels = 0;
    std::variant<KnnState, DtState, MlpState, LsvmState> state;
};

// Training on an already-standardized matrix; deterministic given seed.
TrainedModel train(const ModelSpec& spec, const FeatureMatrix& x_std, const std::vector<int>& y,
                   int n_labels, std::uint64_t seed);
// Fits the standardizer on x_raw, then trains on the standardized matrix.
TrainedModel fit_model(const ModelSpec& spec, const FeatureMatrix& x_raw,
                       const std::vector<int>& y, int n_labels, std::uint64_t seed);
// Applies the stored standardizer, then the fitted classifier.
std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& x_raw);

// Full-batch objective and gradient at the given parameter point, for
// gradient verification. MLP: mean cross-entropy + 0.5*l2*(|w1|^2+|w2|^2),
// gradient packed [w1, b1, w2, b2]. LSVM: one binary one-vs-rest problem,
// 0.5*|w|^2 + (c/n) * sum hinge, targets in {-1,+1}.
double mlp_loss_and_grad(const MlpState& state, double l2, const FeatureMatrix& x,
                         const std::vector<int>& y, std::vector<double>* grad);
double lsvm_loss_and_grad(const std::vector<double>& w, double b, double c_penalty,
                          const FeatureMatrix& x, const std::vector<int>& targets,
                          std::vector<double>* grad_w, double* grad_b);

struct TrainingSet {
    FeatureMatrix x;                    // raw (unstandardized) features
    std::vector<int> y;                 // best-ordering labels
    std::vector<TimingRecord> timings;  // aligned with rows
};

enum class CvObjective { accuracy, time };

std::string objective_name(CvObjective o);

struct CVConfig {
    int folds = 5;
    int n_candidates = 20;
    CvObjective objective = CvObjective::accuracy;
    std::uint64_t seed = 0;
};

struct CvScores {
    double accuracy = 0.0;    // fraction of validation rows predicted exactly
    double total_time = 0.0;  // summed cost of predicted orderings
};

struct CvChoice {
    ModelSpec spec;
    double cv_score = 0.0;  // accuracy or total_time, per objective
    CvScores scores;
};

// The candidate list depends on (family, seed) only, never on the
// objective; both objectives therefore score the identical candidates.
std::vector<ModelSpec> sample_candidates(ModelFamily family, int count, std::uint64_t seed);

// K-fold evaluation of one candidate; folds derive from cfg.seed and are
// shared by every candidate and both objectives.
CvScores cv_evaluate(const ModelSpec& spec, const TrainingSet& data, const CVConfig& cfg);

// Randomized search: sample, evaluate, pick the best under cfg.objective
// (ties to the earliest candidate).
CvChoice cv_search(ModelFamily family, const TrainingSet& data, const CVConfig& cfg);

// Fraction of problems whose chosen cost is within x% of the minimum.
double metric_accuracy_within(const std::vector<int>& pred, const std::vector<TimingRecord>& t,
                              double x_percent);
double metric_total_time(const std::vector<int>& pred, const std::vector<TimingRecord>& t,
                         double prediction_seconds);

// Versioned text serialization; several models may be concatenated in one
// stream (the par_*.txt format).
void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in, const std::string& path_for_errors);

}  // namespace ordpick
