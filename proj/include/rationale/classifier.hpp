#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rationale/features.hpp"
#include "rationale/tokenize.hpp"

namespace rationale {

enum class Provenance { DocumentLevel, SnippetModel, IterativeSnippet };

std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& s);

struct TrainConfig {
    double learningRate = 0.1;   // initial step; adapted during descent
    int maxEpochs = 500;
    double l2Lambda = 1e-4;      // applied to weights, never the bias
    double gradTolerance = 1e-6; // stop on gradient infinity norm
    std::size_t k = 2000;
    int ngramMax = 3;
    std::uint64_t seed = 0;
};

struct TrainedModel {
    FeatureSpace space;
    std::vector<double> weights;  // one per feature column
    double bias = 0.0;
    TrainConfig config;
    Provenance provenance = Provenance::DocumentLevel;
    std::size_t snippetSize = 0;  // 0 = trained on whole documents
};

struct TrainDiagnostics {
    std::vector<double> epochLoss;  // after each accepted epoch
    double finalGradInf = 0.0;
    int epochs = 0;
    bool converged = false;
};

// Regularized negative log-likelihood over both classes:
//   J = -sum_i [y_i log p_i + (1-y_i) log(1-p_i)] + (l2/2) ||w||^2
double nll_loss(std::span<const FeatureVector> positives,
                std::span<const FeatureVector> negatives,
                std::span<const double> weights, double bias, double l2Lambda);

// Analytic gradient of nll_loss; gradW must have weights.size() entries.
void nll_gradient(std::span<const FeatureVector> positives,
                  std::span<const FeatureVector> negatives,
                  std::span<const double> weights, double bias, double l2Lambda,
                  std::span<double> gradW, double& gradBias);

// Full-batch gradient descent from zero init, diagonally preconditioned by
// the Hessian bound diag(0.25 sum x^2 + l2), with a grow/halve step-size
// rule that only accepts loss-decreasing epochs. No RNG anywhere.
TrainedModel train_logistic(const std::vector<FeatureVector>& positives,
                            const std::vector<FeatureVector>& negatives,
                            const FeatureSpace& space, const TrainConfig& config,
                            TrainDiagnostics* diag = nullptr);

double predict_proba(const TrainedModel& model, const FeatureVector& v);

// Convenience: tokenize-free scoring of a raw token sequence.
double predict_proba(const TrainedModel& model, const TokenSeq& seq);

// The Train(...) black box: n-gram extraction -> IG selection -> vectorize
// -> logistic fit. Units with no tokens are skipped with a warning.
TrainedModel fit_pipeline(std::span<const TokenSeq> respUnits,
                          std::span<const TokenSeq> nonrespUnits,
                          const TrainConfig& config,
                          Provenance provenance = Provenance::DocumentLevel,
                          std::size_t snippetSize = 0,
                          TrainDiagnostics* diag = nullptr);

// Versioned text format; scores round-trip exactly (hexfloat weights).
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

std::string model_to_string(const TrainedModel& model);

}  // namespace rationale
