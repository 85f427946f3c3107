#include "erfusion/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "erfusion/error.hpp"

namespace erfusion {

void ModelParams::validate() const {
    auto check_mu = [](const std::optional<double>& mu, const char* name) {
        if (mu && !(std::isfinite(*mu) && *mu > 0.0)) {
            throw ParameterError(std::string(name) + " must be > 0 or auto");
        }
    };
    check_mu(mu_entity, "mu_entity");
    check_mu(mu_rel, "mu_rel");
    if (!(std::isfinite(k1) && k1 >= 0.0)) {
        throw ParameterError("k1 must be >= 0");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw ParameterError("b must be in [0, 1]");
    }
}

double ModelParams::resolve_mu(const Index& index) const {
    const auto& mu = index.kind() == IndexKind::entity ? mu_entity : mu_rel;
    if (mu) {
        return *mu;
    }
    if (index.stats().avg_len <= 0.0) {
        throw ParameterError("automatic mu needs a non-empty " +
                             std::string(to_string(index.kind())) + " index");
    }
    return index.stats().avg_len;
}

double score_lm(const MetaDocument& meta, std::span<const std::string> terms,
                const CollectionStats& stats, double mu) {
    if (!(mu > 0.0)) {
        throw ParameterError("Dirichlet mu must be > 0");
    }
    if (stats.total_terms == 0) {
        throw ParameterError("language model scoring needs a non-empty collection");
    }
    const double total = static_cast<double>(stats.total_terms);
    const double denominator = static_cast<double>(meta.length) + mu;
    double score = 0.0;
    for (const auto& term : terms) {
        const auto coll_tf = stats.coll_tf(term);
        if (coll_tf == 0) {
            continue;
        }
        const double smoothed =
            static_cast<double>(meta.term_freq(term)) + static_cast<double>(coll_tf) / total * mu;
        score += std::log(smoothed / denominator);
    }
    return score;
}

double bm25_idf(std::uint64_t num_docs, std::uint64_t doc_freq, IdfFloor idf_floor) {
    const double n = static_cast<double>(doc_freq);
    const double idf = std::log((static_cast<double>(num_docs) - n + 0.5) / (n + 0.5));
    return idf_floor == IdfFloor::clamp_zero ? std::max(0.0, idf) : idf;
}

double bm25_tf_weight(std::uint64_t tf, std::uint64_t length, double avg_len, double k1, double b) {
    if (tf == 0) {
        return 0.0;
    }
    const double f = static_cast<double>(tf);
    const double relative_len = avg_len > 0.0 ? static_cast<double>(length) / avg_len : 0.0;
    return f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * relative_len));
}

double score_bm25(const MetaDocument& meta, std::span<const std::string> terms,
                  const CollectionStats& stats, double k1, double b, IdfFloor idf_floor) {
    if (!(k1 >= 0.0) || !(b >= 0.0 && b <= 1.0)) {
        throw ParameterError("BM25 needs k1 >= 0 and b in [0, 1]");
    }
    double score = 0.0;
    for (const auto& term : terms) {
        const auto doc_freq = stats.doc_freq(term);
        if (doc_freq == 0) {
            continue;
        }
        const auto tf = meta.term_freq(term);
        if (tf == 0) {
            continue;
        }
        score += bm25_tf_weight(tf, meta.length, stats.avg_len, k1, b) *
                 bm25_idf(stats.num_meta_docs, doc_freq, idf_floor);
    }
    return score;
}

double score_meta(const MetaDocument& meta, const SubQuery& q, const Index& index,
                  const ModelParams& params) {
    if (params.model == Model::lm) {
        return score_lm(meta, q.terms, index.stats(), params.resolve_mu(index));
    }
    return score_bm25(meta, q.terms, index.stats(), params.k1, params.b, params.idf_floor);
}

bool candidate_before(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.key < b.key;
}

std::vector<Candidate> candidate_search(const Index& index, const SubQuery& q,
                                        const ModelParams& params, std::size_t k) {
    params.validate();
    if (k == 0) {
        throw ParameterError("candidate cutoff must be >= 1");
    }
    if (index.kind() != q.target) {
        throw ParameterError("sub-query targets the " + std::string(to_string(q.target)) +
                             " index but was run against the " +
                             std::string(to_string(index.kind())) + " index");
    }

    std::vector<std::uint32_t> matching;
    for (const auto& term : q.terms) {
        auto postings = index.postings(term);
        matching.insert(matching.end(), postings.begin(), postings.end());
    }
    std::sort(matching.begin(), matching.end());
    matching.erase(std::unique(matching.begin(), matching.end()), matching.end());
    if (matching.empty()) {
        return {};
    }

    const auto docs = index.meta_docs();
    const double mu = params.model == Model::lm ? params.resolve_mu(index) : 0.0;
    std::vector<Candidate> candidates;
    candidates.reserve(matching.size());
    for (auto pos : matching) {
        const auto& meta = docs[pos];
        const double score =
            params.model == Model::lm
                ? score_lm(meta, q.terms, index.stats(), mu)
                : score_bm25(meta, q.terms, index.stats(), params.k1, params.b, params.idf_floor);
        candidates.push_back(Candidate{meta.key, score});
    }

    if (k < candidates.size()) {
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                          candidates.end(), candidate_before);
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());
    } else {
        std::sort(candidates.begin(), candidates.end(), candidate_before);
    }
    return candidates;
}

}  // namespace erfusion
