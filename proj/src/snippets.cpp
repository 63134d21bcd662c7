#include "rationale/snippets.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "rationale/detail/rng.hpp"
#include "rationale/parallel.hpp"

namespace rationale {

namespace {

std::size_t stride_for(std::size_t n) { return std::max<std::size_t>(1, n / 2); }

std::vector<TokenSeq> tokenize_docs(std::span<const Document* const> docs) {
    std::vector<TokenSeq> out;
    out.reserve(docs.size());
    for (const Document* d : docs) out.push_back(tokenize(d->text, d->id));
    return out;
}

// Materialize the token sequences behind a snippet selection. Documents are
// tokenized once and shared across their snippets.
std::vector<TokenSeq> snippet_units(std::span<const ScoredSnippet> snippets,
                                    std::span<const Document* const> docs) {
    std::unordered_map<std::string, const Document*> byId;
    for (const Document* d : docs) byId.emplace(d->id, d);

    std::unordered_map<std::string, TokenSeq> cache;
    std::vector<TokenSeq> out;
    out.reserve(snippets.size());
    for (const auto& s : snippets) {
        auto it = cache.find(s.snippet.docId);
        if (it == cache.end()) {
            const auto doc = byId.find(s.snippet.docId);
            if (doc == byId.end())
                throw std::runtime_error("selected snippet references unknown document " +
                                         s.snippet.docId);
            it = cache.emplace(s.snippet.docId, tokenize(doc->second->text, doc->first)).first;
        }
        out.push_back(snippet_seq(it->second, s.snippet));
    }
    return out;
}

MethodResult run_snippet_iterations(const Corpus& train, const MethodConfig& cfg,
                                    const TrainedModel* pretrainedDoc,
                                    std::size_t startN, std::size_t minN,
                                    bool iterative) {
    const auto resp = train.with_label(Label::Responsive);
    const auto nonresp = train.with_label(Label::Nonresponsive);
    if (resp.empty() || nonresp.empty())
        throw std::invalid_argument("training corpus needs documents of both labels");

    MethodResult result;
    if (pretrainedDoc) {
        result.documentModel = *pretrainedDoc;
    } else {
        const auto respSeqs = tokenize_docs(resp);
        const auto nonrespSeqs = tokenize_docs(nonresp);
        result.documentModel = fit_pipeline(respSeqs, nonrespSeqs, cfg.train,
                                            Provenance::DocumentLevel, 0);
    }

    const Provenance prov =
        iterative ? Provenance::IterativeSnippet : Provenance::SnippetModel;
    const TrainedModel* scorer = &result.documentModel;
    std::size_t n = startN;
    std::uint64_t iteration = 0;
    while (true) {
        auto scored = score_all_snippets(*scorer, resp, n, cfg.threads);
        auto sel = select_responsive_snippets(std::move(scored), cfg.selection);
        if (sel.selected.empty())
            throw std::runtime_error(
                "no training rationales found: no responsive snippet scored >= 0.5 "
                "(snippet size " + std::to_string(n) + ", iteration " +
                std::to_string(iteration + 1) + ")");
        if (sel.phase1ExceededMaxNum)
            std::fprintf(stderr,
                         "warning: phase-1 selection (%zu snippets) already exceeds "
                         "maxNum=%d\n",
                         sel.phase1Count, cfg.selection.maxNum);

        const std::size_t count = cfg.nonrespCount.value_or(sel.selected.size());
        const auto negs = sample_nonresponsive_snippets(
            nonresp, n, count, detail::mix64(cfg.train.seed, iteration));

        const auto posUnits = snippet_units(sel.selected, resp);
        std::vector<TokenSeq> negUnits;
        negUnits.reserve(negs.size());
        {
            std::unordered_map<std::string, TokenSeq> cache;
            std::unordered_map<std::string, const Document*> byId;
            for (const Document* d : nonresp) byId.emplace(d->id, d);
            for (const auto& s : negs) {
                auto it = cache.find(s.docId);
                if (it == cache.end())
                    it = cache.emplace(s.docId, tokenize(byId.at(s.docId)->text, s.docId))
                             .first;
                negUnits.push_back(snippet_seq(it->second, s));
            }
        }

        result.model = fit_pipeline(posUnits, negUnits, cfg.train, prov, n);
        result.finalSelection = std::move(sel);
        result.snippetSizes.push_back(n);

        if (!iterative) break;
        if (n > minN) {
            n /= 2;
            if (n < minN) n = minN;
        } else {
            break;
        }
        scorer = &result.model;
        ++iteration;
    }
    return result;
}

}  // namespace

std::vector<ScoredSnippet> score_all_snippets(const TrainedModel& model,
                                              std::span<const Document* const> docs,
                                              std::size_t n, unsigned threads) {
    if (n < 2) throw std::invalid_argument("snippet size must be at least 2");

    std::vector<std::vector<ScoredSnippet>> perDoc(docs.size());
    std::atomic<std::size_t> skipped{0};
    parallel_for(docs.size(), threads, [&](std::size_t i) {
        const TokenSeq seq = tokenize(docs[i]->text, docs[i]->id);
        if (seq.empty()) {
            ++skipped;
            return;
        }
        auto& out = perDoc[i];
        for (const Snippet& w : window_snippets_stride(seq, n, stride_for(n))) {
            const double score = predict_proba(model, vectorize(snippet_tokens(seq, w),
                                                                model.space));
            out.push_back({w, score, model.provenance});
        }
    });
    if (skipped > 0)
        std::fprintf(stderr, "warning: skipped %zu empty document(s) while scoring\n",
                     skipped.load());

    std::vector<ScoredSnippet> all;
    for (auto& part : perDoc)
        all.insert(all.end(), part.begin(), part.end());
    std::sort(all.begin(), all.end(), [](const ScoredSnippet& a, const ScoredSnippet& b) {
        if (a.snippet.docId != b.snippet.docId) return a.snippet.docId < b.snippet.docId;
        return a.snippet.start < b.snippet.start;
    });
    return all;
}

SelectionResult select_responsive_snippets(std::vector<ScoredSnippet> scored,
                                           const SelectionConfig& cfg) {
    if (!(cfg.minScoreTh >= 0.5 && cfg.minScoreTh < 1.0))
        throw std::invalid_argument("minScoreTh must lie in [0.5, 1)");
    if (cfg.maxNum < 1) throw std::invalid_argument("maxNum must be at least 1");

    std::sort(scored.begin(), scored.end(),
              [](const ScoredSnippet& a, const ScoredSnippet& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.snippet.docId != b.snippet.docId)
                      return a.snippet.docId < b.snippet.docId;
                  return a.snippet.start < b.snippet.start;
              });

    SelectionResult out;
    std::vector<char> taken(scored.size(), 0);
    std::unordered_set<std::string> coveredDocs;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        const auto& s = scored[i];
        if (s.score >= SelectionConfig::kBaseThreshold &&
            coveredDocs.insert(s.snippet.docId).second) {
            out.selected.push_back(s);
            taken[i] = 1;
        }
    }
    out.phase1Count = out.selected.size();
    out.phase1ExceededMaxNum = out.phase1Count > static_cast<std::size_t>(cfg.maxNum);

    std::size_t nSelected = out.phase1Count;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        if (taken[i]) continue;
        if (scored[i].score >= cfg.minScoreTh &&
            nSelected <= static_cast<std::size_t>(cfg.maxNum)) {
            out.selected.push_back(scored[i]);
            ++nSelected;
        }
    }
    return out;
}

std::vector<Snippet> sample_nonresponsive_snippets(std::span<const Document* const> docs,
                                                   std::size_t n, std::size_t count,
                                                   std::uint64_t seed) {
    std::vector<Snippet> pool;
    for (const Document* d : docs) {
        const TokenSeq seq = tokenize(d->text, d->id);
        if (seq.empty()) continue;
        for (const Snippet& w : window_snippets_stride(seq, n, stride_for(n)))
            pool.push_back(w);
    }
    if (pool.empty())
        throw std::runtime_error("no nonresponsive snippets available to sample");
    if (count >= pool.size()) return pool;

    std::mt19937_64 rng(detail::mix64(seed, 0x4e524e44u));
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + detail::bounded(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

MethodResult train_snippet_method(const Corpus& train, const MethodConfig& cfg,
                                  const TrainedModel* docModel) {
    if (cfg.snippetSize < 2 || cfg.snippetSize % 2 != 0)
        throw std::invalid_argument("snippet size must be even and >= 2");
    return run_snippet_iterations(train, cfg, docModel, cfg.snippetSize,
                                  cfg.snippetSize, /*iterative=*/false);
}

MethodResult train_iterative_method(const Corpus& train, const IterConfig& iter,
                                    const MethodConfig& cfg,
                                    const TrainedModel* docModel) {
    if (iter.minN < 2 || iter.startN < iter.minN)
        throw std::invalid_argument("iteration sizes must satisfy startN >= minN >= 2");
    if (iter.startN % 2 != 0 || iter.minN % 2 != 0)
        throw std::invalid_argument("startN and minN must be even");
    return run_snippet_iterations(train, cfg, docModel, iter.startN, iter.minN,
                                  /*iterative=*/true);
}

std::vector<ScoredSnippet> rank_rationales(const Document& doc,
                                           const TrainedModel& rationaleModel,
                                           const TrainedModel& docModel, std::size_t n) {
    const TokenSeq seq = tokenize(doc.text, doc.id);
    if (seq.empty()) return {};
    if (predict_proba(docModel, seq) < 0.5) return {};

    std::vector<ScoredSnippet> ranked;
    for (const Snippet& w : window_snippets_stride(seq, n, stride_for(n))) {
        const double score =
            predict_proba(rationaleModel, vectorize(snippet_tokens(seq, w),
                                                    rationaleModel.space));
        ranked.push_back({w, score, rationaleModel.provenance});
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const ScoredSnippet& a, const ScoredSnippet& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.snippet.start < b.snippet.start;
              });
    return ranked;
}

void save_selected_snippets(const SelectionResult& sel, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snippet audit file: " + path);
    for (std::size_t i = 0; i < sel.selected.size(); ++i) {
        const auto& s = sel.selected[i];
        nlohmann::json rec{{"doc", s.snippet.docId},
                           {"start", s.snippet.start},
                           {"length", s.snippet.length},
                           {"score", s.score},
                           {"phase", i < sel.phase1Count ? 1 : 2}};
        out << rec.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rationale
