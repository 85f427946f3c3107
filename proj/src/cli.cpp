#include "erfusion/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "erfusion/corpus.hpp"
#include "erfusion/error.hpp"
#include "erfusion/eval.hpp"
#include "erfusion/extract.hpp"
#include "erfusion/fusion.hpp"
#include "erfusion/index.hpp"
#include "erfusion/parallel.hpp"
#include "erfusion/retrieval.hpp"

namespace erfusion::cli {

namespace fs = std::filesystem;

namespace {

// Usage problems detected after argument parsing (missing input files).
class UsageError : public Error {
  public:
    using Error::Error;
};

struct BuildOptions {
    std::string entity_corpus;
    std::string rel_corpus;
    std::string out;
    std::string context = "separating-string";
    std::string stopwords;
    std::string pair_canon = "unordered";
    unsigned threads = 0;
};

struct SearchOptions {
    std::string index;
    std::string queries;
    std::string model = "lm";
    std::string mu_e = "auto";
    std::string mu_r = "auto";
    double k1 = 1.2;
    double b = 0.75;
    long long candidates = 20000;
    long long top = 100;
    std::string fusion = "shifted";
    std::string idf = "clamp";
    std::string out = "-";
    std::string tag = "erfusion";
    unsigned threads = 0;
};

struct EvalOptions {
    std::string run;
    std::string qrels;
    long long cutoff = 100;
    std::string pair_match = "unordered";
};

struct StatsOptions {
    std::string index;
};

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::ifstream open_input(const std::string& path) {
    if (!fs::is_regular_file(path)) {
        throw UsageError("no such file: " + path);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open " + path);
    }
    return in;
}

std::optional<double> parse_mu(const std::string& text, const char* flag) {
    if (text == "auto") {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        double mu = std::stod(text, &used);
        if (used == text.size()) {
            return mu;
        }
    } catch (const std::exception&) {
    }
    throw ParameterError(std::string(flag) + " must be \"auto\" or a positive number, got \"" +
                         text + "\"");
}

std::vector<AnnotatedDocument> read_corpus(const std::string& path) {
    auto in = open_input(path);
    try {
        return parse_corpus(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Index build_index(const std::vector<AnnotatedDocument>& docs, IndexKind kind, PairCanon canon,
                  ContextMode context, const Tokenizer& tokenizer, unsigned threads) {
    const std::size_t chunks = std::min<std::size_t>(std::max(1u, threads), docs.size());
    std::vector<IndexBuilder> builders(std::max<std::size_t>(chunks, 1), IndexBuilder(kind, canon));
    parallel_for(chunks, threads, [&](std::size_t c) {
        const auto begin = docs.size() * c / chunks;
        const auto end = docs.size() * (c + 1) / chunks;
        for (auto i = begin; i < end; ++i) {
            if (kind == IndexKind::entity) {
                for (const auto& e : extract_entity_contexts(docs[i], tokenizer)) {
                    builders[c].add(e);
                }
            } else {
                for (const auto& e : extract_relationship_contexts(docs[i], context, tokenizer)) {
                    builders[c].add(e);
                }
            }
        }
    });
    for (std::size_t c = 1; c < builders.size(); ++c) {
        builders.front().merge(std::move(builders[c]));
    }
    std::vector<std::string> stopwords(tokenizer.stopwords().begin(), tokenizer.stopwords().end());
    return std::move(builders.front()).finish(std::move(stopwords));
}

int cmd_build(const BuildOptions& opt, std::ostream& out) {
    const auto rel_path = opt.rel_corpus.empty() ? opt.entity_corpus : opt.rel_corpus;
    // Check both inputs before doing any work.
    open_input(opt.entity_corpus);
    open_input(rel_path);

    Tokenizer tokenizer;
    if (!opt.stopwords.empty()) {
        auto in = open_input(opt.stopwords);
        tokenizer = Tokenizer::from_stopword_stream(in);
    }
    const auto context =
        opt.context == "sentence" ? ContextMode::sentence : ContextMode::separating_string;
    const auto canon = opt.pair_canon == "ordered" ? PairCanon::ordered : PairCanon::unordered;
    const auto threads = resolve_threads(opt.threads);

    const auto entity_docs = read_corpus(opt.entity_corpus);
    std::optional<std::vector<AnnotatedDocument>> rel_docs;
    if (rel_path != opt.entity_corpus) {
        rel_docs = read_corpus(rel_path);
    }

    auto entity_index =
        build_index(entity_docs, IndexKind::entity, canon, context, tokenizer, threads);
    auto rel_index = build_index(rel_docs ? *rel_docs : entity_docs, IndexKind::relationship,
                                 canon, context, tokenizer, threads);
    save_index(entity_index, fs::path(opt.out) / "entity");
    save_index(rel_index, fs::path(opt.out) / "relationship");

    out << "documents: " << entity_docs.size() << '\n';
    if (rel_docs) {
        out << "relationship documents: " << rel_docs->size() << '\n';
    }
    out << "entities: " << entity_index.stats().num_meta_docs << '\n';
    out << "pairs: " << rel_index.stats().num_meta_docs << '\n';
    out << "entity terms: " << entity_index.stats().total_terms << '\n';
    out << "relationship terms: " << rel_index.stats().total_terms << '\n';
    return kExitOk;
}

int cmd_search(const SearchOptions& opt, std::ostream& out) {
    ModelParams model;
    model.model = opt.model == "bm25" ? Model::bm25 : Model::lm;
    model.mu_entity = parse_mu(opt.mu_e, "--mu-e");
    model.mu_rel = parse_mu(opt.mu_r, "--mu-r");
    model.k1 = opt.k1;
    model.b = opt.b;
    model.idf_floor = opt.idf == "raw" ? IdfFloor::raw : IdfFloor::clamp_zero;
    model.validate();

    if (opt.candidates < 1) {
        throw ParameterError("--candidates must be >= 1");
    }
    if (opt.top < 1) {
        throw ParameterError("--top must be >= 1");
    }
    FusionParams fusion;
    fusion.candidates = static_cast<std::size_t>(opt.candidates);
    fusion.top_m = static_cast<std::size_t>(opt.top);
    fusion.mode = opt.fusion == "raw" ? FusionMode::raw : FusionMode::shifted;
    if (opt.tag.empty() || opt.tag.find_first_of(" \t\n") != std::string::npos) {
        throw ParameterError("--tag must be a non-empty word");
    }

    auto query_in = open_input(opt.queries);
    const auto entity_index = load_index(fs::path(opt.index) / "entity");
    const auto rel_index = load_index(fs::path(opt.index) / "relationship");
    if (entity_index.kind() != IndexKind::entity || rel_index.kind() != IndexKind::relationship) {
        throw IndexFormatError(opt.index + ": entity/relationship subdirectories hold the wrong kind");
    }
    fusion.pair_match = rel_index.pair_canon() == PairCanon::ordered ? PairMatch::ordered
                                                                       : PairMatch::unordered;

    const Tokenizer tokenizer(std::unordered_set<std::string>(entity_index.stopwords().begin(),
                                                              entity_index.stopwords().end()));
    const auto queries = parse_queries(query_in, tokenizer);

    std::vector<QueryResult> results(queries.size());
    parallel_for(queries.size(), resolve_threads(opt.threads), [&](std::size_t i) {
        results[i].query_id = queries[i].query_id;
        results[i].tuples = answer_query(queries[i], entity_index, rel_index, model, fusion);
    });

    if (opt.out == "-") {
        write_run(results, opt.tag, out);
    } else {
        std::ofstream file(opt.out, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw IoError("cannot write " + opt.out);
        }
        write_run(results, opt.tag, file);
    }
    return kExitOk;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
    if (opt.cutoff < 1) {
        throw ParameterError("--cutoff must be >= 1");
    }
    const auto pair_match =
        opt.pair_match == "ordered" ? PairMatch::ordered : PairMatch::unordered;
    auto run_in = open_input(opt.run);
    auto qrels_in = open_input(opt.qrels);
    const auto run = load_run(run_in, pair_match);
    const auto qrels = load_qrels(qrels_in, pair_match);
    write_report(evaluate(run, qrels, static_cast<std::size_t>(opt.cutoff)), out);
    return kExitOk;
}

int cmd_stats(const StatsOptions& opt, std::ostream& out) {
    const fs::path root(opt.index);
    std::vector<fs::path> dirs;
    if (fs::exists(root / "meta.json")) {
        dirs.push_back(root);
    } else {
        dirs.push_back(root / "entity");
        dirs.push_back(root / "relationship");
    }
    out << "index\tN\ttotal_terms\tavg_len\tvocabulary\n";
    for (const auto& dir : dirs) {
        const auto index = load_index(dir);
        const auto& s = index.stats();
        char avg[64];
        std::snprintf(avg, sizeof avg, "%.4f", s.avg_len);
        out << to_string(index.kind()) << '\t' << s.num_meta_docs << '\t' << s.total_terms << '\t'
            << avg << '\t' << s.terms.size() << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entity-relationship retrieval over entity-linked text"};
    app.require_subcommand(1);

    BuildOptions build;
    auto* build_cmd = app.add_subcommand("build", "Build the entity and relationship indexes");
    build_cmd->add_option("--entity-corpus", build.entity_corpus, "Corpus for the entity index")
        ->required();
    build_cmd->add_option("--rel-corpus", build.rel_corpus,
                          "Corpus for the relationship index (default: the entity corpus)");
    build_cmd->add_option("--out", build.out, "Output directory")->required();
    build_cmd->add_option("--context", build.context, "Relationship context")
        ->check(CLI::IsMember({"separating-string", "sentence"}))
        ->capture_default_str();
    build_cmd->add_option("--stopwords", build.stopwords, "Stopword file, one word per line");
    build_cmd->add_option("--pair-canon", build.pair_canon, "Relationship pair keys")
        ->check(CLI::IsMember({"unordered", "ordered"}))
        ->capture_default_str();
    build_cmd->add_option("--threads", build.threads, "Worker threads (0: all cores)");

    SearchOptions search;
    auto* search_cmd = app.add_subcommand("search", "Answer queries and write a TREC run");
    search_cmd->add_option("--index", search.index, "Directory written by build")->required();
    search_cmd->add_option("--queries", search.queries, "Query file (JSON Lines)")->required();
    search_cmd->add_option("--model", search.model)
        ->check(CLI::IsMember({"lm", "bm25"}))
        ->capture_default_str();
    search_cmd->add_option("--mu-e", search.mu_e, "Entity Dirichlet prior")->capture_default_str();
    search_cmd->add_option("--mu-r", search.mu_r, "Relationship Dirichlet prior")
        ->capture_default_str();
    search_cmd->add_option("--k1", search.k1)->capture_default_str();
    search_cmd->add_option("--b", search.b)->capture_default_str();
    search_cmd->add_option("--candidates", search.candidates, "Candidates per sub-query")
        ->capture_default_str();
    search_cmd->add_option("--top", search.top, "Tuples per query")->capture_default_str();
    search_cmd->add_option("--fusion", search.fusion)
        ->check(CLI::IsMember({"shifted", "raw"}))
        ->capture_default_str();
    search_cmd->add_option("--idf", search.idf)
        ->check(CLI::IsMember({"clamp", "raw"}))
        ->capture_default_str();
    search_cmd->add_option("--out", search.out, "Run file ('-' for stdout)")->capture_default_str();
    search_cmd->add_option("--tag", search.tag)->capture_default_str();
    search_cmd->add_option("--threads", search.threads, "Worker threads (0: all cores)");

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score a run against relevance judgments");
    eval_cmd->add_option("--run", eval.run)->required();
    eval_cmd->add_option("--qrels", eval.qrels)->required();
    eval_cmd->add_option("--cutoff", eval.cutoff, "Rank cutoff for average precision")
        ->capture_default_str();
    eval_cmd->add_option("--pair-match", eval.pair_match, "Tuple id matching")
        ->check(CLI::IsMember({"unordered", "ordered"}))
        ->capture_default_str();

    StatsOptions stats;
    auto* stats_cmd = app.add_subcommand("stats", "Print collection statistics");
    stats_cmd->add_option("--index", stats.index)->required();

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build_cmd->parsed()) {
            return cmd_build(build, out);
        }
        if (search_cmd->parsed()) {
            return cmd_search(search, out);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval, out);
        }
        return cmd_stats(stats, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace erfusion::cli
