#include <map>
#include <string>

#include <CLI11.hpp>

#include "lexsum/cli.hpp"

namespace {

using lexsum::CorpusFormat;
using lexsum::SdKind;
using lexsum::mock::GeneratorKind;

const std::map<std::string, CorpusFormat> kFormats{{"jsonl", CorpusFormat::jsonl},
                                                   {"dir", CorpusFormat::directory}};
const std::map<std::string, SdKind> kSd{{"population", SdKind::population},
                                        {"sample", SdKind::sample}};
const std::map<std::string, GeneratorKind> kGenerators{
    {"lead", GeneratorKind::lead}, {"echo", GeneratorKind::echo}, {"empty", GeneratorKind::empty}};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = lexsum::cli;
  CLI::App app{"Multi-step extractive/abstractive summarisation of long legal documents"};
  app.require_subcommand(1);
  int rc = cli::kExitOk;

  cli::IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load, validate and optionally filter a corpus");
  c_ingest->add_option("corpus", ingest.corpus, "JSONL file or split directory")->required();
  c_ingest->add_option("--format", ingest.format)->transform(CLI::CheckedTransformer(kFormats));
  c_ingest->add_option("-o,--out", ingest.out, "Normalised JSONL output")->required();
  c_ingest->add_flag("--filter-outliers", ingest.filter_outliers,
                     "Drop documents longer than mean + 2 sd words");
  c_ingest->add_option("--sd", ingest.sd)->transform(CLI::CheckedTransformer(kSd));
  c_ingest->callback([&] { rc = cli::cmd_ingest(ingest); });

  cli::StatsOptions stats;
  auto* c_stats = app.add_subcommand("stats", "Length statistics and outlier report");
  c_stats->add_option("corpus", stats.corpus)->required();
  c_stats->add_option("--format", stats.format)->transform(CLI::CheckedTransformer(kFormats));
  c_stats->add_option("--sd", stats.sd)->transform(CLI::CheckedTransformer(kSd));
  c_stats->callback([&] { rc = cli::cmd_stats(stats); });

  cli::PlanOptions plan;
  auto* c_plan = app.add_subcommand("plan", "Print the compression plan for one document");
  c_plan->add_option("--doc-tokens", plan.doc_tokens);
  c_plan->add_option("--text", plan.text_file, "Count tokens of this file instead");
  c_plan->add_option("--context-length", plan.context_length, "Abstractive input budget K");
  c_plan->add_option("--abstractive", plan.abstractive, "Take K from this profile");
  c_plan->add_option("--extractive", plan.extractive, "Tokenizer source for --text");
  c_plan->add_option("--strategy", plan.strategy, "fixed, dependent or hybrid");
  c_plan->add_option("--fixed-ratio", plan.fixed_ratio);
  c_plan->add_flag("--mock", plan.mock, "Use the in-process mock backend");
  c_plan->add_option("--config", plan.config);
  c_plan->callback([&] { rc = cli::cmd_plan(plan); });

  cli::SummarizeOptions sum;
  auto* c_sum = app.add_subcommand("summarize", "Run the pipeline over a corpus");
  c_sum->add_option("corpus", sum.corpus)->required();
  c_sum->add_option("--format", sum.format)->transform(CLI::CheckedTransformer(kFormats));
  c_sum->add_option("--extractive", sum.extractive);
  c_sum->add_option("--abstractive", sum.abstractive);
  c_sum->add_option("--strategy", sum.strategy, "fixed, dependent or hybrid");
  c_sum->add_option("--fixed-ratio", sum.fixed_ratio);
  c_sum->add_option("--seed", sum.seed);
  c_sum->add_option("--truncation", sum.truncation,
                    "drop-trailing-sentences or hard-token-cut");
  c_sum->add_option("--global-correction", sum.global_correction,
                    "Correct per-chunk rounding against the step target (true/false)");
  c_sum->add_option("--metric", sum.metric, "euclidean or cosine");
  c_sum->add_option("-o,--out", sum.out, "RunRecord JSONL output")->required();
  c_sum->add_flag("--mock", sum.mock, "Use the in-process mock backend");
  c_sum->add_option("--mock-generator", sum.mock_generator)
      ->transform(CLI::CheckedTransformer(kGenerators));
  c_sum->add_option("-j,--jobs", sum.jobs, "Documents processed concurrently");
  c_sum->add_option("--config", sum.config);
  c_sum->callback([&] { rc = cli::cmd_summarize(sum); });

  cli::EvaluateOptions eval;
  auto* c_eval = app.add_subcommand("evaluate", "ROUGE scores for one or more runs");
  c_eval->add_option("records", eval.records, "RunRecord JSONL")->required();
  c_eval->add_option("--corpus", eval.corpus)->required();
  c_eval->add_option("--format", eval.format)->transform(CLI::CheckedTransformer(kFormats));
  c_eval->add_option("--compare", eval.records, "Additional runs to tabulate side by side");
  c_eval->add_option("-o,--out", eval.out, "Score report JSON");
  c_eval->callback([&] { rc = cli::cmd_evaluate(eval); });

  cli::EvaluateOptions cmp;
  auto* c_cmp = app.add_subcommand("compare", "Side-by-side ROUGE table for several runs");
  c_cmp->add_option("records", cmp.records)->required()->expected(1, -1);
  c_cmp->add_option("--corpus", cmp.corpus)->required();
  c_cmp->add_option("--format", cmp.format)->transform(CLI::CheckedTransformer(kFormats));
  c_cmp->add_option("-o,--out", cmp.out);
  c_cmp->callback([&] { rc = cli::cmd_evaluate(cmp); });

  cli::ServeOptions serve;
  auto* c_serve = app.add_subcommand("mock-server", "Serve the /v1 protocol with mock models");
  c_serve->add_option("--host", serve.host);
  c_serve->add_option("--port", serve.port);
  c_serve->add_option("--config", serve.config);
  c_serve->add_option("--generator", serve.generator)
      ->transform(CLI::CheckedTransformer(kGenerators));
  c_serve->callback([&] { rc = cli::cmd_mock_server(serve); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }
  return rc;
}
