#pragma once

// Subcommand implementations behind the `lexsum` executable. Each returns a
// process exit code: 0 success, 1 partial or data failure, 2 usage or
// configuration failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lexsum/config.hpp"
#include "lexsum/corpus.hpp"
#include "lexsum/http_backend.hpp"
#include "lexsum/mock_backend.hpp"
#include "lexsum/mock_server.hpp"
#include "lexsum/pipeline.hpp"
#include "lexsum/planner.hpp"
#include "lexsum/report.hpp"

namespace lexsum::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

inline AppConfig load_app_config(const std::optional<std::filesystem::path>& path) {
  AppConfig cfg = path ? load_config(*path) : AppConfig{};
  apply_env_overrides(cfg.backend);
  return cfg;
}

inline std::unique_ptr<ModelBackend> make_backend(const AppConfig& cfg, bool mock,
                                                  mock::MockOptions mock_opts = {}) {
  if (mock) return std::make_unique<mock::MockBackend>(cfg.profiles, std::move(mock_opts));
  return std::make_unique<HttpBackend>(cfg.backend);
}

// ---------------------------------------------------------------- ingest/stats

struct IngestOptions {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::jsonl;
  std::filesystem::path out;
  bool filter_outliers = false;
  SdKind sd = SdKind::population;
};

inline int cmd_ingest(const IngestOptions& o, Streams io = {}) {
  std::vector<DocumentPair> pairs;
  try {
    pairs = load_corpus(o.corpus, o.format);
  } catch (const IoError& e) {
    io.err << "ingest: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CorpusError& e) {
    io.err << "ingest: " << o.corpus.string() << ": " << e.what() << '\n';
    return kExitData;
  }
  if (pairs.empty()) {
    io.err << "ingest: corpus is empty\n";
    return kExitData;
  }
  const CorpusStats stats = compute_stats(pairs, o.sd);
  FilterResult fr;
  if (o.filter_outliers)
    fr = filter_outliers(pairs, stats);
  else
    fr.kept = pairs;
  std::ofstream out(o.out);
  if (!out) {
    io.err << "ingest: cannot write " << o.out.string() << '\n';
    return kExitUsage;
  }
  write_jsonl_corpus(out, fr.kept);
  io.out << stats_report(stats, fr.removed).dump(2) << '\n';
  return kExitOk;
}

struct StatsOptions {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::jsonl;
  SdKind sd = SdKind::population;
};

/// Prints the stats report; removed_ids lists the documents the outlier
/// filter would remove. Split counts before and after filtering are added.
inline int cmd_stats(const StatsOptions& o, Streams io = {}) {
  try {
    const auto pairs = load_corpus(o.corpus, o.format);
    const auto stats = compute_stats(pairs, o.sd);
    const auto fr = filter_outliers(pairs, stats);
    auto j = stats_report(stats, fr.removed);
    auto splits = [](const std::vector<DocumentPair>& v) {
      nlohmann::json s;
      for (auto [split, n] : split_counts(v)) s[std::string(to_string(split))] = n;
      return s;
    };
    j["splits_before"] = splits(pairs);
    j["splits_after"] = splits(fr.kept);
    io.out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const IoError& e) {
    io.err << "stats: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    io.err << "stats: " << e.what() << '\n';
    return kExitData;
  }
}

// ------------------------------------------------------------------------ plan

struct PlanOptions {
  std::optional<std::int64_t> doc_tokens;
  std::optional<std::filesystem::path> text_file;
  std::optional<std::int64_t> context_length;
  std::string abstractive;
  std::string extractive;
  std::optional<std::string> strategy;
  std::optional<double> fixed_ratio;
  bool mock = false;
  std::optional<std::filesystem::path> config;
};

inline int cmd_plan(const PlanOptions& o, Streams io = {}) {
  try {
    AppConfig cfg = load_app_config(o.config);
    RatioStrategy strategy = cfg.pipeline.strategy;
    if (o.strategy) {
      auto k = parse_ratio_kind(*o.strategy);
      if (!k) throw ConfigError("unknown strategy " + *o.strategy);
      strategy.kind = *k;
    }
    if (o.fixed_ratio) strategy.fixed_ratio = *o.fixed_ratio;

    std::int64_t k = 0;
    if (o.context_length)
      k = *o.context_length;
    else if (!o.abstractive.empty())
      k = input_budget(cfg.profile(o.abstractive));
    else
      throw ConfigError("plan needs --context-length or --abstractive");

    std::int64_t d = 0;
    if (o.doc_tokens) {
      d = *o.doc_tokens;
    } else if (o.text_file) {
      const std::string ext_id = o.extractive.empty() ? cfg.pipeline.extractive : o.extractive;
      if (ext_id.empty()) throw ConfigError("--text needs --extractive to pick a tokenizer");
      const auto& ext = cfg.profile(ext_id);
      auto backend = make_backend(cfg, o.mock);
      std::ifstream in(*o.text_file);
      if (!in) throw ConfigError("cannot read " + o.text_file->string());
      std::ostringstream ss;
      ss << in.rdbuf();
      d = count_tokens(ss.str(), ext.tokenizer(), *backend);
    } else {
      throw ConfigError("plan needs --doc-tokens or --text");
    }
    io.out << plan_to_json(make_plan(strategy, d, k)).dump(2) << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    io.err << "plan: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    io.err << "plan: " << e.what() << '\n';
    return kExitUsage;
  }
}

// ------------------------------------------------------------------- summarize

struct SummarizeOptions {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::jsonl;
  std::string extractive;
  std::string abstractive;
  std::optional<std::string> strategy;
  std::optional<double> fixed_ratio;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> truncation;
  std::optional<bool> global_correction;
  std::optional<std::string> metric;
  std::filesystem::path out;
  bool mock = false;
  mock::GeneratorKind mock_generator = mock::GeneratorKind::lead;
  int jobs = 0;
  std::optional<std::filesystem::path> config;
};

inline PipelineConfig resolve_pipeline(const AppConfig& cfg, const SummarizeOptions& o) {
  PipelineConfig pc;
  const std::string ext = o.extractive.empty() ? cfg.pipeline.extractive : o.extractive;
  const std::string abs = o.abstractive.empty() ? cfg.pipeline.abstractive : o.abstractive;
  if (ext.empty()) throw ConfigError("no extractive profile given (--extractive)");
  if (abs.empty()) throw ConfigError("no abstractive profile given (--abstractive)");
  pc.extractive_profile = cfg.profile(ext);
  pc.abstractive_profile = cfg.profile(abs);
  pc.strategy = cfg.pipeline.strategy;
  if (o.strategy) {
    auto k = parse_ratio_kind(*o.strategy);
    if (!k) throw ConfigError("unknown strategy \"" + *o.strategy + "\"");
    pc.strategy.kind = *k;
  }
  if (o.fixed_ratio) pc.strategy.fixed_ratio = *o.fixed_ratio;
  pc.seed = o.seed.value_or(cfg.pipeline.seed);
  pc.truncation_policy = cfg.pipeline.truncation_policy;
  if (o.truncation) {
    auto p = parse_truncation_policy(*o.truncation);
    if (!p) throw ConfigError("unknown truncation policy \"" + *o.truncation + "\"");
    pc.truncation_policy = *p;
  }
  pc.global_budget_correction = o.global_correction.value_or(cfg.pipeline.global_budget_correction);
  pc.metric = cfg.pipeline.metric;
  if (o.metric) {
    if (*o.metric != "euclidean" && *o.metric != "cosine")
      throw ConfigError("metric must be euclidean or cosine");
    pc.metric = *o.metric == "cosine" ? Metric::cosine : Metric::euclidean;
  }
  pc.validate();
  return pc;
}

inline std::string trajectory(const RunRecord& r) {
  std::string s = std::to_string(r.doc_tokens_ext);
  for (const auto& st : r.steps) s += ">" + std::to_string(st.token_count);
  return s;
}

inline int cmd_summarize(const SummarizeOptions& o, Streams io = {}) {
  AppConfig cfg;
  PipelineConfig pc;
  try {
    cfg = load_app_config(o.config);
    pc = resolve_pipeline(cfg, o);
  } catch (const Error& e) {
    io.err << "summarize: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<DocumentPair> pairs;
  try {
    pairs = load_corpus(o.corpus, o.format);
  } catch (const IoError& e) {
    io.err << "summarize: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CorpusError& e) {
    io.err << "summarize: " << e.what() << '\n';
    return kExitData;
  }

  mock::MockOptions mo;
  mo.generator = o.mock_generator;
  auto backend = make_backend(cfg, o.mock, mo);
  CachedTokenCounter cache(*backend);
  Backends b{cache, *backend, *backend};
  int jobs = o.jobs > 0 ? o.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (!o.mock) jobs = std::min(jobs, std::max(1, cfg.backend.max_in_flight));
  const auto records = run_batch(pairs, pc, b, jobs);

  std::ofstream out(o.out);
  if (!out) {
    io.err << "summarize: cannot write " << o.out.string() << '\n';
    return kExitUsage;
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : records) {
    out << to_json(r).dump() << '\n';
    if (r.ok) {
      io.out << r.document_id << "\tsteps=" << r.steps.size() << "\ttokens=" << trajectory(r)
             << "\tabs_tokens=" << r.pre_abstractive_tokens_abs << "/" << r.abstractive_budget
             << "\tdropped=" << r.truncated_sentences << (r.empty_summary ? "\tEMPTY" : "")
             << '\n';
    } else {
      io.out << r.document_id << "\tFAILED\t" << r.error << '\n';
      failures.push_back({{"id", r.document_id}, {"error", r.error}});
    }
  }
  if (!failures.empty()) {
    const auto manifest = o.out.string() + ".failures.json";
    std::ofstream(manifest) << failures.dump(2) << '\n';
    io.err << "summarize: " << failures.size() << " of " << records.size()
           << " documents failed; see " << manifest << '\n';
    return kExitData;
  }
  return kExitOk;
}

// ------------------------------------------------------------ evaluate/compare

struct EvaluateOptions {
  std::vector<std::filesystem::path> records;
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::jsonl;
  std::optional<std::filesystem::path> out;
};

inline int cmd_evaluate(const EvaluateOptions& o, Streams io = {}) {
  std::vector<DocumentPair> pairs;
  std::vector<RunRecord> records;
  try {
    pairs = load_corpus(o.corpus, o.format);
    for (const auto& path : o.records) {
      std::ifstream in(path);
      if (!in || std::filesystem::is_directory(path))
        throw IoError("cannot read " + path.string());
      auto part = read_records(in);
      records.insert(records.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
  } catch (const IoError& e) {
    io.err << "evaluate: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    io.err << "evaluate: " << e.what() << '\n';
    return kExitData;
  }
  try {
    const auto reports = score_run(records, pairs);
    io.out << format_table(reports);
    if (o.out) {
      std::ofstream f(*o.out);
      if (!f) {
        io.err << "evaluate: cannot write " << o.out->string() << '\n';
        return kExitUsage;
      }
      f << reports_to_json(reports).dump(2) << '\n';
    }
    return kExitOk;
  } catch (const MissingGoldError& e) {
    io.err << "evaluate: orphan records without a matching document:";
    for (const auto& id : e.ids()) io.err << ' ' << id;
    io.err << '\n';
    return kExitData;
  } catch (const Error& e) {
    io.err << "evaluate: " << e.what() << '\n';
    return kExitData;
  }
}

// --------------------------------------------------------------- mock service

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> config;
  mock::GeneratorKind generator = mock::GeneratorKind::lead;
};

inline int cmd_mock_server(const ServeOptions& o, Streams io = {}) {
  try {
    AppConfig cfg = load_app_config(o.config);
    mock::MockOptions mo;
    mo.generator = o.generator;
    mock::MockBackend backend(cfg.profiles, mo);
    ProtocolServer server(backend);
    io.err << "serving /v1 on http://" << o.host << ":" << o.port << '\n';
    server.listen(o.host, o.port);
    return kExitOk;
  } catch (const Error& e) {
    io.err << "mock-server: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace lexsum::cli
