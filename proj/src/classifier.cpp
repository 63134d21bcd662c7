#include "rationale/classifier.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rationale {

namespace {

double log_sigmoid(double z) {
    return z < 0.0 ? z - std::log1p(std::exp(z)) : -std::log1p(std::exp(-z));
}

double sigmoid(double z) {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    // keep scores strictly inside (0, 1) even when exp saturates
    if (p <= 0.0) return std::numeric_limits<double>::min();
    if (p >= 1.0) return 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return p;
}

double raw_score(std::span<const double> weights, double bias, const FeatureVector& v) {
    double z = bias;
    for (const auto& [col, val] : v.entries) {
        if (col < 0 || static_cast<std::size_t>(col) >= weights.size())
            throw std::out_of_range("feature column " + std::to_string(col) +
                                    " outside model space of " +
                                    std::to_string(weights.size()) + " features");
        z += weights[static_cast<std::size_t>(col)] * val;
    }
    return z;
}

void validate_vectors(const std::vector<FeatureVector>& vecs, std::size_t dim,
                      const char* side) {
    for (const auto& v : vecs) {
        for (const auto& [col, val] : v.entries) {
            if (col < 0 || static_cast<std::size_t>(col) >= dim)
                throw std::out_of_range(std::string(side) + " vector column " +
                                        std::to_string(col) + " outside feature space");
            if (!std::isfinite(val))
                throw std::invalid_argument(std::string(side) +
                                            " vector has a non-finite value");
        }
    }
}

std::string hexd(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", x);
    return buf;
}

double parse_hexd(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("model file: bad number for " + what + ": \"" + s + "\"");
    return v;
}

}  // namespace

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::DocumentLevel: return "document";
        case Provenance::SnippetModel: return "snippet";
        case Provenance::IterativeSnippet: return "iterative";
    }
    return "document";
}

Provenance parse_provenance(const std::string& s) {
    if (s == "document") return Provenance::DocumentLevel;
    if (s == "snippet") return Provenance::SnippetModel;
    if (s == "iterative") return Provenance::IterativeSnippet;
    throw std::runtime_error("unknown model provenance \"" + s + "\"");
}

double nll_loss(std::span<const FeatureVector> positives,
                std::span<const FeatureVector> negatives,
                std::span<const double> weights, double bias, double l2Lambda) {
    double loss = 0.0;
    for (const auto& v : positives) loss -= log_sigmoid(raw_score(weights, bias, v));
    for (const auto& v : negatives) loss -= log_sigmoid(-raw_score(weights, bias, v));
    double reg = 0.0;
    for (const double w : weights) reg += w * w;
    return loss + 0.5 * l2Lambda * reg;
}

void nll_gradient(std::span<const FeatureVector> positives,
                  std::span<const FeatureVector> negatives,
                  std::span<const double> weights, double bias, double l2Lambda,
                  std::span<double> gradW, double& gradBias) {
    std::fill(gradW.begin(), gradW.end(), 0.0);
    gradBias = 0.0;
    const auto accumulate = [&](const FeatureVector& v, double y) {
        const double residual = sigmoid(raw_score(weights, bias, v)) - y;
        gradBias += residual;
        for (const auto& [col, val] : v.entries)
            gradW[static_cast<std::size_t>(col)] += residual * val;
    };
    for (const auto& v : positives) accumulate(v, 1.0);
    for (const auto& v : negatives) accumulate(v, 0.0);
    for (std::size_t j = 0; j < gradW.size(); ++j) gradW[j] += l2Lambda * weights[j];
}

TrainedModel train_logistic(const std::vector<FeatureVector>& positives,
                            const std::vector<FeatureVector>& negatives,
                            const FeatureSpace& space, const TrainConfig& config,
                            TrainDiagnostics* diag) {
    if (positives.empty() || negatives.empty())
        throw std::invalid_argument("training requires examples of both classes");
    if (!(config.learningRate > 0.0))
        throw std::invalid_argument("learning rate must be positive");
    if (config.l2Lambda < 0.0) throw std::invalid_argument("l2 lambda must be >= 0");
    const std::size_t dim = space.size();
    validate_vectors(positives, dim, "positive");
    validate_vectors(negatives, dim, "negative");

    // Diagonal curvature bound: p(1-p) <= 1/4.
    std::vector<double> precond(dim, config.l2Lambda);
    for (const auto* side : {&positives, &negatives})
        for (const auto& v : *side)
            for (const auto& [col, val] : v.entries)
                precond[static_cast<std::size_t>(col)] += 0.25 * val * val;
    for (double& p : precond) p = std::max(p, 1e-12);
    const double precondBias =
        0.25 * static_cast<double>(positives.size() + negatives.size());

    std::vector<double> w(dim, 0.0), g(dim, 0.0), trial(dim, 0.0);
    double bias = 0.0, gBias = 0.0;
    double loss = nll_loss(positives, negatives, w, bias, config.l2Lambda);
    double step = config.learningRate;

    TrainDiagnostics local;
    TrainDiagnostics& d = diag ? *diag : local;
    d = TrainDiagnostics{};

    for (int epoch = 0; epoch < config.maxEpochs; ++epoch) {
        nll_gradient(positives, negatives, w, bias, config.l2Lambda, g, gBias);
        double gradInf = std::abs(gBias);
        for (const double gj : g) gradInf = std::max(gradInf, std::abs(gj));
        d.finalGradInf = gradInf;
        if (gradInf <= config.gradTolerance) {
            d.converged = true;
            break;
        }

        // Grow the step while it keeps strictly improving; halve on failure.
        bool accepted = false;
        while (step > 1e-250) {
            for (std::size_t j = 0; j < dim; ++j)
                trial[j] = w[j] - step * g[j] / precond[j];
            const double trialBias = bias - step * gBias / precondBias;
            const double trialLoss =
                nll_loss(positives, negatives, trial, trialBias, config.l2Lambda);
            if (trialLoss < loss) {
                w.swap(trial);
                bias = trialBias;
                loss = trialLoss;
                step *= 1.1;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            d.converged = true;  // no descent direction representable
            break;
        }
        d.epochLoss.push_back(loss);
        d.epochs = epoch + 1;
    }

    TrainedModel model;
    model.space = space;
    model.weights = std::move(w);
    model.bias = bias;
    model.config = config;
    return model;
}

double predict_proba(const TrainedModel& model, const FeatureVector& v) {
    return sigmoid(raw_score(model.weights, model.bias, v));
}

double predict_proba(const TrainedModel& model, const TokenSeq& seq) {
    return predict_proba(model, vectorize(seq, model.space));
}

TrainedModel fit_pipeline(std::span<const TokenSeq> respUnits,
                          std::span<const TokenSeq> nonrespUnits,
                          const TrainConfig& config, Provenance provenance,
                          std::size_t snippetSize, TrainDiagnostics* diag) {
    std::vector<TokenSeq> pos, neg;
    pos.reserve(respUnits.size());
    neg.reserve(nonrespUnits.size());
    std::size_t skipped = 0;
    for (const auto& u : respUnits) {
        if (u.empty()) ++skipped; else pos.push_back(u);
    }
    for (const auto& u : nonrespUnits) {
        if (u.empty()) ++skipped; else neg.push_back(u);
    }
    if (skipped > 0)
        std::fprintf(stderr, "warning: skipped %zu empty training unit(s)\n", skipped);
    if (pos.empty() || neg.empty())
        throw std::runtime_error("training requires nonempty units of both classes");

    FeatureSpace space = select_top_k(pos, neg, config.k, config.ngramMax);

    std::vector<FeatureVector> posVecs, negVecs;
    posVecs.reserve(pos.size());
    negVecs.reserve(neg.size());
    for (const auto& u : pos) posVecs.push_back(vectorize(u, space));
    for (const auto& u : neg) negVecs.push_back(vectorize(u, space));

    TrainedModel model = train_logistic(posVecs, negVecs, space, config, diag);
    model.provenance = provenance;
    model.snippetSize = snippetSize;
    return model;
}

std::string model_to_string(const TrainedModel& model) {
    std::ostringstream out;
    out << "rationale model v1\n";
    out << "provenance " << to_string(model.provenance) << '\n';
    out << "snippet_size " << model.snippetSize << '\n';
    out << "ngram_max " << model.space.ngramMax << '\n';
    out << "k " << model.config.k << '\n';
    out << "learning_rate " << hexd(model.config.learningRate) << '\n';
    out << "max_epochs " << model.config.maxEpochs << '\n';
    out << "l2_lambda " << hexd(model.config.l2Lambda) << '\n';
    out << "grad_tolerance " << hexd(model.config.gradTolerance) << '\n';
    out << "seed " << model.config.seed << '\n';
    out << "bias " << hexd(model.bias) << '\n';
    out << "features " << model.space.size() << '\n';
    for (std::size_t i = 0; i < model.space.size(); ++i)
        out << model.space.features[i] << '\t' << hexd(model.weights[i]) << '\n';
    out << "end\n";
    return out.str();
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_string(model);
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string expect_line(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("truncated model file: missing " + key);
    if (line.rfind(key + ' ', 0) != 0)
        throw std::runtime_error("model file: expected \"" + key + " ...\", got \"" +
                                 line + "\"");
    return line.substr(key.size() + 1);
}

}  // namespace

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("truncated model file: " + path);
    if (line != "rationale model v1")
        throw std::runtime_error("unsupported model file version: \"" + line + "\"");

    const auto parse_count = [&](const std::string& text, const char* what) {
        try {
            return std::stoull(text);
        } catch (const std::exception&) {
            throw std::runtime_error("model file: bad " + std::string(what) + ": \"" +
                                     text + "\"");
        }
    };

    TrainedModel model;
    model.provenance = parse_provenance(expect_line(in, "provenance"));
    model.snippetSize = parse_count(expect_line(in, "snippet_size"), "snippet_size");
    const int ngramMax =
        static_cast<int>(parse_count(expect_line(in, "ngram_max"), "ngram_max"));
    model.config.k = parse_count(expect_line(in, "k"), "k");
    model.config.ngramMax = ngramMax;
    model.config.learningRate = parse_hexd(expect_line(in, "learning_rate"), "learning_rate");
    model.config.maxEpochs =
        static_cast<int>(parse_count(expect_line(in, "max_epochs"), "max_epochs"));
    model.config.l2Lambda = parse_hexd(expect_line(in, "l2_lambda"), "l2_lambda");
    model.config.gradTolerance =
        parse_hexd(expect_line(in, "grad_tolerance"), "grad_tolerance");
    model.config.seed = parse_count(expect_line(in, "seed"), "seed");
    model.bias = parse_hexd(expect_line(in, "bias"), "bias");

    const std::size_t count = parse_count(expect_line(in, "features"), "feature count");
    std::vector<std::string> features;
    features.reserve(count);
    model.weights.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("truncated model file: expected " +
                                     std::to_string(count) + " features, got " +
                                     std::to_string(i));
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("model file: malformed feature line \"" + line + "\"");
        features.push_back(line.substr(0, tab));
        model.weights.push_back(parse_hexd(line.substr(tab + 1), "weight"));
    }
    if (!std::getline(in, line) || line != "end")
        throw std::runtime_error("truncated model file: missing end marker");

    model.space = make_feature_space(std::move(features), ngramMax);
    return model;
}

}  // namespace rationale
