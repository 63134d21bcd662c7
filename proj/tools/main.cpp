// Command-line surface for the rationale-detection pipeline. Every run
// writes a manifest (command, config, seeds, output digests) and `rerun`
// replays a manifest to reproduce its outputs byte for byte.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rationale/classifier.hpp"
#include "rationale/corpus.hpp"
#include "rationale/eval.hpp"
#include "rationale/parallel.hpp"
#include "rationale/snippets.hpp"
#include "rationale/synth.hpp"
#include "rationale/tokenize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::vector<std::string>& args);

std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot digest missing file: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

class Manifest {
public:
    Manifest(std::string command, std::vector<std::string> argv)
        : start_(std::chrono::steady_clock::now()) {
        j_["tool"] = "rationale";
        j_["version"] = 1;
        j_["command"] = std::move(command);
        j_["argv"] = std::move(argv);
        j_["inputs"] = json::array();
        j_["outputs"] = json::array();
        j_["warnings"] = json::array();
        j_["seeds"] = json::object();
        j_["config"] = json::object();
    }

    void input(const std::string& path) { j_["inputs"].push_back(path); }
    void output(const std::string& path) { outputs_.push_back(path); }
    void seed(const std::string& name, std::uint64_t value) { j_["seeds"][name] = value; }
    template <typename T>
    void config(const std::string& key, const T& value) {
        j_["config"][key] = value;
    }
    void warn(const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
        j_["warnings"].push_back(msg);
    }

    void write(const std::string& path) {
        for (const auto& p : outputs_)
            j_["outputs"].push_back(json{{"path", p}, {"fnv1a64", fnv1a64_file(p)}});
        j_["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write manifest: " + path);
        out << j_.dump(2) << '\n';
        if (!out) throw std::runtime_error("write failed: " + path);
    }

private:
    json j_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<rationale::TokenSeq> tokenize_docs(
    const std::vector<const rationale::Document*>& docs) {
    std::vector<rationale::TokenSeq> out;
    out.reserve(docs.size());
    for (const auto* d : docs) out.push_back(rationale::tokenize(d->text, d->id));
    return out;
}

std::string even_check(const std::string& value) {
    try {
        const long long v = std::stoll(value);
        if (v < 2 || v % 2 != 0) return "snippet sizes must be even and >= 2";
    } catch (...) {
        return "not a number";
    }
    return {};
}

struct TrainFlags {
    rationale::TrainConfig config;
    unsigned threads = 1;

    void add(CLI::App* cmd) {
        cmd->add_option("--features", config.k, "Number of n-gram features to select")
            ->capture_default_str();
        cmd->add_option("--ngram-max", config.ngramMax, "Largest n-gram order (1-3)")
            ->check(CLI::Range(1, 3))
            ->capture_default_str();
        cmd->add_option("--lr", config.learningRate, "Initial gradient-descent step")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--epochs", config.maxEpochs, "Maximum training epochs")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--l2", config.l2Lambda, "L2 penalty on the weights")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        cmd->add_option("--tol", config.gradTolerance, "Gradient infinity-norm stop")
            ->capture_default_str();
        cmd->add_option("--seed", config.seed, "Master seed for all sampling")
            ->capture_default_str();
        cmd->add_option("--threads", threads, "Parallel map width for scoring")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    void record(Manifest& m) const {
        m.config("features", config.k);
        m.config("ngram_max", config.ngramMax);
        m.config("lr", config.learningRate);
        m.config("epochs", config.maxEpochs);
        m.config("l2", config.l2Lambda);
        m.config("tol", config.gradTolerance);
        m.config("threads", threads);
        m.seed("seed", config.seed);
    }
};

std::string default_manifest(const std::string& primaryOutput) {
    return primaryOutput + ".manifest.json";
}

// ---------------------------------------------------------------- gen

void cmd_gen(const rationale::GenConfig& cfg, const std::string& out,
             const std::string& truthPath, const std::string& manifestPath,
             const std::vector<std::string>& argv) {
    Manifest m("gen", argv);
    const auto [corpus, truth] = rationale::generate(cfg);
    rationale::save_corpus(corpus, out);
    rationale::save_ground_truth(truth, truthPath);
    m.output(out);
    m.output(truthPath);
    m.seed("seed", cfg.seed);
    m.config("n_resp", cfg.nResp);
    m.config("n_nonresp", cfg.nNonresp);
    m.config("doc_len_min", cfg.docLenMin);
    m.config("doc_len_max", cfg.docLenMax);
    m.config("plant_length", cfg.plantLength);
    m.config("plants_per_doc", cfg.plantsPerRespDoc);
    m.config("bg_vocab", cfg.backgroundVocab);
    m.config("topic_vocab", cfg.topicVocab);
    m.config("signal", cfg.signalStrength);
    m.config("topic_in_nonresp", cfg.topicInNonresp);
    m.write(manifestPath.empty() ? default_manifest(out) : manifestPath);
}

// ---------------------------------------------------------------- split

void cmd_split(const std::string& in, const std::string& trainOut,
               const std::string& testOut, double fraction, std::uint64_t seed,
               const std::string& manifestPath, const std::vector<std::string>& argv) {
    Manifest m("split", argv);
    m.input(in);
    const auto corpus = rationale::load_corpus(in);
    const auto split = rationale::split_corpus(corpus, fraction, seed);
    rationale::save_corpus(split.train, trainOut);
    rationale::save_corpus(split.test, testOut);
    m.output(trainOut);
    m.output(testOut);
    m.seed("seed", seed);
    m.config("fraction", fraction);
    m.write(manifestPath.empty() ? default_manifest(trainOut) : manifestPath);
}

// ---------------------------------------------------------------- train-doc

void cmd_train_doc(const std::string& trainPath, const std::string& modelOut,
                   const TrainFlags& flags, const std::string& manifestPath,
                   const std::vector<std::string>& argv) {
    Manifest m("train-doc", argv);
    m.input(trainPath);
    const auto corpus = rationale::load_corpus(trainPath);
    const auto resp = tokenize_docs(corpus.with_label(rationale::Label::Responsive));
    const auto nonresp = tokenize_docs(corpus.with_label(rationale::Label::Nonresponsive));
    const auto model = rationale::fit_pipeline(resp, nonresp, flags.config,
                                               rationale::Provenance::DocumentLevel, 0);
    rationale::save_model(model, modelOut);
    m.output(modelOut);
    flags.record(m);
    m.write(manifestPath.empty() ? default_manifest(modelOut) : manifestPath);
}

// ------------------------------------------------- train-snippet / iterative

struct SnippetTrainArgs {
    std::string trainPath, modelOut, docModelIn, docModelOut, auditOut, manifestPath;
    TrainFlags flags;
    rationale::SelectionConfig selection;
    std::size_t snippetSize = 50;
    std::size_t startSnippetSize = 1000;
    std::optional<std::size_t> nonrespCount;
};

void cmd_train_snippets(const SnippetTrainArgs& a, bool iterative,
                        const std::vector<std::string>& argv) {
    Manifest m(iterative ? "train-iterative" : "train-snippet", argv);
    m.input(a.trainPath);
    const auto corpus = rationale::load_corpus(a.trainPath);

    rationale::MethodConfig cfg;
    cfg.train = a.flags.config;
    cfg.selection = a.selection;
    cfg.snippetSize = a.snippetSize;
    cfg.nonrespCount = a.nonrespCount;
    cfg.threads = a.flags.threads;

    std::optional<rationale::TrainedModel> pretrained;
    if (!a.docModelIn.empty()) {
        m.input(a.docModelIn);
        pretrained = rationale::load_model(a.docModelIn);
    }

    rationale::MethodResult result;
    if (iterative) {
        rationale::IterConfig iter{a.startSnippetSize, a.snippetSize};
        result = rationale::train_iterative_method(corpus, iter, cfg,
                                                   pretrained ? &*pretrained : nullptr);
    } else {
        result = rationale::train_snippet_method(corpus, cfg,
                                                 pretrained ? &*pretrained : nullptr);
    }

    rationale::save_model(result.model, a.modelOut);
    m.output(a.modelOut);
    const std::string audit =
        a.auditOut.empty() ? a.modelOut + ".selected.jsonl" : a.auditOut;
    rationale::save_selected_snippets(result.finalSelection, audit);
    m.output(audit);
    if (!a.docModelOut.empty()) {
        rationale::save_model(result.documentModel, a.docModelOut);
        m.output(a.docModelOut);
    }

    if (result.finalSelection.phase1ExceededMaxNum)
        m.warn("phase-1 selection (" + std::to_string(result.finalSelection.phase1Count) +
               " snippets) already exceeds --max-num " +
               std::to_string(a.selection.maxNum));

    a.flags.record(m);
    m.config("snippet_size", a.snippetSize);
    if (iterative) m.config("start_snippet_size", a.startSnippetSize);
    m.config("min_score_th", a.selection.minScoreTh);
    m.config("max_num", a.selection.maxNum);
    {
        json sizes = json::array();
        for (const auto s : result.snippetSizes) sizes.push_back(s);
        m.config("iteration_sizes", sizes);
    }
    m.write(a.manifestPath.empty() ? default_manifest(a.modelOut) : a.manifestPath);
}

// ---------------------------------------------------------------- extract

void cmd_extract(const std::string& in, const std::string& modelIn,
                 const std::string& docModelPath, const std::string& out,
                 std::size_t snippetSize, bool snippetSizeGiven, std::size_t topK,
                 unsigned threads, const std::string& manifestPath,
                 const std::vector<std::string>& argv) {
    Manifest m("extract", argv);
    m.input(in);
    m.input(modelIn);
    m.input(docModelPath);
    const auto corpus = rationale::load_corpus(in);
    const auto model = rationale::load_model(modelIn);
    const auto docModel = rationale::load_model(docModelPath);

    std::size_t n = snippetSize;
    if (!snippetSizeGiven) n = model.snippetSize != 0 ? model.snippetSize : 50;
    if (snippetSizeGiven && model.snippetSize != 0 && n != model.snippetSize)
        m.warn("--snippet-size " + std::to_string(n) + " does not match the model's " +
               "training snippet size " + std::to_string(model.snippetSize));

    std::vector<std::string> lines(corpus.size());
    rationale::parallel_for(corpus.size(), threads, [&](std::size_t i) {
        const auto& doc = corpus.docs()[i];
        const auto ranked = rationale::rank_rationales(doc, model, docModel, n);
        if (ranked.empty()) return;
        const double docScore =
            rationale::predict_proba(docModel, rationale::tokenize(doc.text, doc.id));
        std::string buf;
        const std::size_t top = topK == 0 ? ranked.size() : std::min(topK, ranked.size());
        for (std::size_t r = 0; r < top; ++r) {
            const auto& s = ranked[r];
            json rec{{"doc", doc.id},         {"doc_score", docScore},
                     {"rank", r + 1},         {"start", s.snippet.start},
                     {"length", s.snippet.length}, {"score", s.score}};
            buf += rec.dump();
            buf += '\n';
        }
        lines[i] = std::move(buf);
    });

    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write rationale file: " + out);
    for (const auto& l : lines) file << l;
    if (!file) throw std::runtime_error("write failed: " + out);

    m.output(out);
    m.config("snippet_size", n);
    m.config("top_k", topK);
    m.config("threads", threads);
    m.write(manifestPath.empty() ? default_manifest(out) : manifestPath);
}

// ---------------------------------------------------------------- evaluate

void cmd_evaluate(const std::string& testPath, const std::string& docModelPath,
                  const std::string& modelIn, const std::string& reportDir,
                  std::size_t snippetSize, bool snippetSizeGiven, std::size_t steps,
                  unsigned threads, const std::string& manifestPath,
                  const std::vector<std::string>& argv) {
    Manifest m("evaluate", argv);
    m.input(testPath);
    m.input(docModelPath);
    const auto test = rationale::load_corpus(testPath);
    const auto docModel = rationale::load_model(docModelPath);

    rationale::TrainedModel model = docModel;  // baseline scores with the doc model
    if (!modelIn.empty()) {
        m.input(modelIn);
        model = rationale::load_model(modelIn);
    }

    std::size_t n = snippetSize;
    if (!snippetSizeGiven) n = model.snippetSize != 0 ? model.snippetSize : 50;
    if (snippetSizeGiven && model.snippetSize != 0 && n != model.snippetSize)
        m.warn("--snippet-size " + std::to_string(n) + " does not match the model's " +
               "training snippet size " + std::to_string(model.snippetSize));

    fs::create_directories(reportDir);
    const auto report = rationale::score_reduction_report(docModel, model, test, n, threads);
    const auto curve = rationale::pr_curve(docModel, test, steps, threads);

    const std::string textPath = reportDir + "/report.txt";
    const std::string csvPath = reportDir + "/report.csv";
    const std::string prPath = reportDir + "/pr_curve.csv";
    {
        std::ofstream txt(textPath, std::ios::binary);
        if (!txt) throw std::runtime_error("cannot write report: " + textPath);
        const rationale::ScoreReductionReport one[] = {report};
        txt << rationale::render_report_text(one);
    }
    rationale::write_report_csv(report, csvPath);
    rationale::write_pr_csv(curve, prPath);
    m.output(textPath);
    m.output(csvPath);
    m.output(prPath);
    m.config("snippet_size", n);
    m.config("steps", steps);
    m.config("threads", threads);
    m.write(manifestPath.empty() ? reportDir + "/manifest.json" : manifestPath);
}

// ---------------------------------------------------------------- report

void cmd_report(const std::vector<std::string>& inputs, const std::string& out,
                const std::string& manifestPath, const std::vector<std::string>& argv) {
    Manifest m("report", argv);
    std::vector<rationale::ScoreReductionReport> reports;
    for (const auto& p : inputs) {
        m.input(p);
        reports.push_back(rationale::read_report_csv(p));
    }
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write report: " + out);
    file << rationale::render_report_text(reports);
    if (!file) throw std::runtime_error("write failed: " + out);
    m.output(out);
    m.write(manifestPath.empty() ? default_manifest(out) : manifestPath);
}

// ---------------------------------------------------------------- rerun

void cmd_rerun(const std::string& manifestPath, std::optional<unsigned> threads) {
    std::ifstream in(manifestPath);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifestPath);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed manifest " + manifestPath + ": " + e.what());
    }
    if (!j.contains("argv") || !j["argv"].is_array())
        throw std::runtime_error("manifest " + manifestPath + " has no argv to replay");

    std::vector<std::string> args;
    const auto& argv = j["argv"];
    for (std::size_t i = 0; i < argv.size(); ++i) {
        const auto s = argv[i].get<std::string>();
        if (threads) {
            if (s == "--threads") {
                ++i;  // drop the recorded value; the override is appended below
                continue;
            }
            if (s.rfind("--threads=", 0) == 0) continue;
        }
        args.push_back(s);
    }
    if (threads) {
        args.push_back("--threads");
        args.push_back(std::to_string(*threads));
    }
    if (run_cli(args) != 0) throw std::runtime_error("rerun failed");
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Snippet-level rationale detection for responsive-document review"};
    app.require_subcommand(1);

    // gen ------------------------------------------------------------
    rationale::GenConfig gen;
    std::string genOut, genTruth, genManifest;
    auto* cGen = app.add_subcommand("gen", "Generate a synthetic labeled corpus");
    cGen->add_option("--out", genOut, "Corpus output path")->required();
    cGen->add_option("--truth", genTruth, "Ground-truth sidecar path");
    cGen->add_option("--n-resp", gen.nResp, "Responsive documents")->capture_default_str();
    cGen->add_option("--n-nonresp", gen.nNonresp, "Nonresponsive documents")
        ->capture_default_str();
    cGen->add_option("--doc-len-min", gen.docLenMin, "Shortest document, tokens")
        ->capture_default_str();
    cGen->add_option("--doc-len-max", gen.docLenMax, "Longest document, tokens")
        ->capture_default_str();
    cGen->add_option("--plant-length", gen.plantLength, "Planted passage length")
        ->capture_default_str();
    cGen->add_option("--plants-per-doc", gen.plantsPerRespDoc, "Plants per responsive doc")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    cGen->add_option("--bg-vocab", gen.backgroundVocab, "Background vocabulary size")
        ->capture_default_str();
    cGen->add_option("--topic-vocab", gen.topicVocab, "Topic vocabulary size")
        ->capture_default_str();
    cGen->add_option("--signal", gen.signalStrength, "Topic density inside plants (0,1]")
        ->capture_default_str();
    cGen->add_option("--topic-in-nonresp", gen.topicInNonresp,
                     "Topic bleed into nonresponsive text [0,1)")
        ->capture_default_str();
    cGen->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    cGen->add_option("--id-prefix", gen.idPrefix, "Prefix for document ids");
    cGen->add_option("--manifest-out", genManifest, "Manifest path");
    cGen->callback([&] {
        cmd_gen(gen, genOut, genTruth.empty() ? genOut + ".truth.jsonl" : genTruth,
                genManifest, args);
    });

    // split ----------------------------------------------------------
    std::string splitIn, splitTrainOut, splitTestOut, splitManifest;
    double fraction = 0.8;
    std::uint64_t splitSeed = 0;
    auto* cSplit = app.add_subcommand("split", "Stratified train/test split");
    cSplit->add_option("--in", splitIn, "Corpus to split")->required();
    cSplit->add_option("--train-out", splitTrainOut, "Train output path")->required();
    cSplit->add_option("--test-out", splitTestOut, "Test output path")->required();
    cSplit->add_option("--fraction", fraction, "Train fraction, per class")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cSplit->add_option("--seed", splitSeed, "Shuffle seed")->capture_default_str();
    cSplit->add_option("--manifest-out", splitManifest, "Manifest path");
    cSplit->callback([&] {
        cmd_split(splitIn, splitTrainOut, splitTestOut, fraction, splitSeed,
                  splitManifest, args);
    });

    // train-doc -------------------------------------------------------
    std::string tdTrain, tdModelOut, tdManifest;
    TrainFlags tdFlags;
    auto* cTrainDoc = app.add_subcommand("train-doc", "Train the document-level model");
    cTrainDoc->add_option("--train", tdTrain, "Training corpus")->required();
    cTrainDoc->add_option("--model-out", tdModelOut, "Model output path")->required();
    tdFlags.add(cTrainDoc);
    cTrainDoc->add_option("--manifest-out", tdManifest, "Manifest path");
    cTrainDoc->callback([&] { cmd_train_doc(tdTrain, tdModelOut, tdFlags, tdManifest, args); });

    // train-snippet / train-iterative ----------------------------------
    SnippetTrainArgs ts;
    long long tsNonrespCount = -1;
    const auto addSnippetFlags = [&](CLI::App* cmd, bool iterative) {
        cmd->add_option("--train", ts.trainPath, "Training corpus")->required();
        cmd->add_option("--model-out", ts.modelOut, "Model output path")->required();
        cmd->add_option("--snippet-size", ts.snippetSize,
                        iterative ? "Final (minimum) snippet size, tokens"
                                  : "Snippet size, tokens")
            ->check(CLI::Validator(even_check, "EVEN"))
            ->capture_default_str();
        if (iterative)
            cmd->add_option("--start-snippet-size", ts.startSnippetSize,
                            "First-iteration snippet size, tokens")
                ->check(CLI::Validator(even_check, "EVEN"))
                ->capture_default_str();
        cmd->add_option("--min-score-th", ts.selection.minScoreTh,
                        "Phase-2 selection threshold")
            ->capture_default_str();
        cmd->add_option("--max-num", ts.selection.maxNum, "Phase-2 running-count cap")
            ->capture_default_str();
        cmd->add_option("--nonresp-count", tsNonrespCount,
                        "Nonresponsive snippet sample size (default: match selected)");
        cmd->add_option("--doc-model", ts.docModelIn,
                        "Reuse a pretrained document model instead of fitting one");
        cmd->add_option("--doc-model-out", ts.docModelOut,
                        "Also save the internal document model");
        cmd->add_option("--audit-out", ts.auditOut,
                        "Selected-snippet audit file (default <model>.selected.jsonl)");
        ts.flags.add(cmd);
        cmd->add_option("--manifest-out", ts.manifestPath, "Manifest path");
        cmd->callback([&, iterative] {
            ts.nonrespCount = tsNonrespCount >= 0
                                  ? std::optional<std::size_t>(
                                        static_cast<std::size_t>(tsNonrespCount))
                                  : std::nullopt;
            cmd_train_snippets(ts, iterative, args);
        });
    };
    addSnippetFlags(app.add_subcommand("train-snippet",
                                       "Train the snippet detection model"),
                    false);
    addSnippetFlags(app.add_subcommand("train-iterative",
                                       "Train the iterative snippet detection model"),
                    true);

    // extract ----------------------------------------------------------
    std::string exIn, exModelIn, exDocModel, exOut, exManifest;
    std::size_t exSnippetSize = 50, exTopK = 5;
    unsigned exThreads = 1;
    auto* cExtract =
        app.add_subcommand("extract", "Rank rationales for model-responsive documents");
    cExtract->add_option("--in", exIn, "Corpus to explain")->required();
    cExtract->add_option("--model-in", exModelIn, "Rationale (snippet) model")->required();
    cExtract->add_option("--doc-model", exDocModel, "Document-level gating model")
        ->required();
    auto* exSizeOpt = cExtract->add_option("--snippet-size", exSnippetSize,
                                           "Window size (default: model's)")
                          ->check(CLI::Validator(even_check, "EVEN"));
    cExtract->add_option("--out", exOut, "Rationale offsets output (jsonl)")->required();
    cExtract->add_option("--top-k", exTopK, "Snippets per document (0 = all)")
        ->capture_default_str();
    cExtract->add_option("--threads", exThreads, "Parallel map width")
        ->capture_default_str();
    cExtract->add_option("--manifest-out", exManifest, "Manifest path");
    cExtract->callback([&] {
        cmd_extract(exIn, exModelIn, exDocModel, exOut, exSnippetSize,
                    exSizeOpt->count() > 0, exTopK, exThreads, exManifest, args);
    });

    // evaluate ----------------------------------------------------------
    std::string evTest, evDocModel, evModelIn, evReportDir, evManifest;
    std::size_t evSnippetSize = 50, evSteps = 100;
    unsigned evThreads = 1;
    auto* cEval = app.add_subcommand(
        "evaluate", "Score-reduction report, token stats and PR curve");
    cEval->add_option("--test", evTest, "Test corpus")->required();
    cEval->add_option("--doc-model", evDocModel, "Document-level model")->required();
    cEval->add_option("--model-in", evModelIn,
                      "Rationale model (omit to evaluate the document-level baseline)");
    cEval->add_option("--report-dir", evReportDir, "Directory for the report files")
        ->required();
    auto* evSizeOpt = cEval->add_option("--snippet-size", evSnippetSize,
                                        "Window size (default: model's)")
                          ->check(CLI::Validator(even_check, "EVEN"));
    cEval->add_option("--steps", evSteps, "PR-curve threshold count")
        ->capture_default_str();
    cEval->add_option("--threads", evThreads, "Parallel map width")->capture_default_str();
    cEval->add_option("--manifest-out", evManifest, "Manifest path");
    cEval->callback([&] {
        cmd_evaluate(evTest, evDocModel, evModelIn, evReportDir, evSnippetSize,
                     evSizeOpt->count() > 0, evSteps, evThreads, evManifest, args);
    });

    // report ----------------------------------------------------------
    std::vector<std::string> repIn;
    std::string repOut, repManifest;
    auto* cReport = app.add_subcommand("report", "Render report CSVs side by side");
    cReport->add_option("--in", repIn, "report.csv files to combine")
        ->required()
        ->expected(1, 3);
    cReport->add_option("--out", repOut, "Rendered table output")->required();
    cReport->add_option("--manifest-out", repManifest, "Manifest path");
    cReport->callback([&] { cmd_report(repIn, repOut, repManifest, args); });

    // rerun ----------------------------------------------------------
    std::string rrManifest;
    unsigned rrThreads = 0;
    auto* cRerun = app.add_subcommand("rerun", "Replay a recorded manifest");
    auto* rrManifestOpt =
        cRerun->add_option("--manifest", rrManifest, "Manifest to replay")->required();
    auto* rrThreadsOpt =
        cRerun->add_option("--threads", rrThreads, "Override the recorded thread count");
    cRerun->callback([&] {
        (void)rrManifestOpt;
        cmd_rerun(rrManifest, rrThreadsOpt->count() > 0
                                  ? std::optional<unsigned>(rrThreads)
                                  : std::nullopt);
    });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("rationale");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    return run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
