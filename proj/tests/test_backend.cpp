#include <gtest/gtest.h>

#include "lexsum/backend.hpp"
#include "lexsum/mock_backend.hpp"
#include "support/synthetic.hpp"

using namespace lexsum;
using nlohmann::json;

TEST(Profile, DecoderOnlyBudgetReservesGeneration) {
  auto p = testsupport::profile("llama3", Role::abstractive, 8192);
  p.architecture = Architecture::decoder_only;
  EXPECT_EQ(input_budget(p), 6692);
  p.architecture = Architecture::encoder_decoder;
  EXPECT_EQ(input_budget(p), 8192);
}

TEST(Profile, JsonRoundTrip) {
  for (const auto& p : testsupport::fixture_profiles()) {
    const auto q = profile_from_json(to_json(p));
    EXPECT_EQ(to_json(q), to_json(p));
  }
  EXPECT_THROW(profile_from_json(json{{"model_id", "x"},
                                      {"role", "abstractive"},
                                      {"context_length", 0},
                                      {"architecture", "encoder"}}),
               ConfigError);
}

TEST(Prompt, Llama3LayoutIsExact) {
  EXPECT_EQ(apply_prompt_template(PromptTemplate::llama3_instruct, "X"),
            "Summarise the following text.\n### Text:\nX\n### Summary:\n");
  EXPECT_EQ(apply_prompt_template(PromptTemplate::plain, "X"), "X");
}

TEST(Prompt, StripKeepsTextAfterLastMarker) {
  EXPECT_EQ(strip_to_summary("junk ### Summary: a ### Summary:\n  The answer."), "The answer.");
  EXPECT_EQ(strip_to_summary("No marker here."), "No marker here.");
  EXPECT_EQ(strip_to_summary("### Summary:\n"), "");
}

TEST(Generate, TemplateAppliedAndOutputStripped) {
  class Recorder : public Generator {
   public:
    std::string complete(std::string_view, std::string_view prompt, int) override {
      seen = prompt;
      return std::string(prompt) + "Generated summary.";
    }
    std::string seen;
  } rec;
  GenerationRequest req;
  req.model_id = "m";
  req.input_text = "Body.";
  req.prompt_template = PromptTemplate::llama3_instruct;
  const auto r = generate(rec, req);
  EXPECT_EQ(rec.seen, apply_prompt_template(PromptTemplate::llama3_instruct, "Body."));
  EXPECT_EQ(r.text, "Generated summary.");
  EXPECT_FALSE(r.empty);
}

TEST(Generate, EmptyOutputIsFlagged) {
  mock::MockOptions o;
  o.generator = mock::GeneratorKind::empty;
  mock::MockBackend b(testsupport::fixture_profiles(), o);
  GenerationRequest req{"mock-abs", "Some input.", 10, PromptTemplate::plain};
  const auto r = generate(b, req);
  EXPECT_EQ(r.text, "");
  EXPECT_TRUE(r.empty);
}

TEST(Generate, RejectsNonPositiveMaxNewTokens) {
  mock::MockBackend b(testsupport::fixture_profiles());
  EXPECT_THROW(generate(b, GenerationRequest{"mock-abs", "x", 0, PromptTemplate::plain}), Error);
}

TEST(Generate, ContextOverflowIsRaisedNotTruncated) {
  mock::MockBackend b(testsupport::fixture_profiles());
  const auto profiles = testsupport::fixture_profiles();
  const auto& abs = profiles[1];  // char4, 1024
  GenerationRequest req{"mock-abs", std::string(4 * 1025, 'a'), 10, PromptTemplate::plain};
  try {
    checked_generate(b, b, abs, req);
    FAIL();
  } catch (const ContextOverflowError& e) {
    EXPECT_EQ(e.tokens(), 1025);
    EXPECT_EQ(e.limit(), 1024);
  }
  const auto& llm = profiles[2];  // decoder-only: input + max_new_tokens must fit
  GenerationRequest big{"mock-llm", std::string(4 * 6693, 'a'), 1500, PromptTemplate::llama3_instruct};
  EXPECT_THROW(checked_generate(b, b, llm, big), ContextOverflowError);
  big.input_text.resize(4 * 6692);
  EXPECT_NO_THROW(checked_generate(b, b, llm, big));
}

TEST(Mock, EchoReturnsLeadingTokens) {
  EXPECT_EQ(mock::echo("one two  three four", 2), "one two");
  EXPECT_EQ(mock::echo("one", 5), "one");
}

TEST(Mock, LeadGeneratorIgnoresInstructionScaffolding) {
  mock::MockOptions o;
  o.lead_sentences = 2;
  mock::MockBackend b(testsupport::fixture_profiles(), o);
  GenerationRequest req{"mock-llm", "First one. Second one. Third one.", 100,
                        PromptTemplate::llama3_instruct};
  EXPECT_EQ(generate(b, req).text, "First one. Second one.");
}

TEST(Mock, EmbedderIsDeterministicAndShaped) {
  mock::MockBackend b(testsupport::fixture_profiles());
  const std::vector<std::string> texts{"a", "b", "a"};
  const auto v = b.embed("mock-ext", texts);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].size(), 16u);
  EXPECT_EQ(v[0], v[2]);
  EXPECT_NE(v[0], v[1]);
  mock::MockBackend other(testsupport::fixture_profiles());
  EXPECT_EQ(other.embed("mock-ext", texts), v);
}

TEST(Mock, EmbedPreconditions) {
  mock::MockBackend b(testsupport::fixture_profiles());
  EXPECT_THROW(b.embed("mock-ext", std::vector<std::string>{}), Error);
  EXPECT_THROW(b.embed("mock-ext", std::vector<std::string>{""}), Error);
}

TEST(Mock, UnknownModelCarriesModelList) {
  mock::MockBackend b(testsupport::fixture_profiles());
  try {
    b.embed("nope", std::vector<std::string>{"x"});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::unknown_model);
    EXPECT_EQ(e.available_models(), (std::vector<std::string>{"mock-ext", "mock-abs", "mock-llm"}));
  }
}

TEST(Mock, TokenizerResolution) {
  mock::MockBackend b(testsupport::fixture_profiles());
  EXPECT_EQ(count_tokens("abcdefgh", "mock-ext", b), 1);
  EXPECT_EQ(count_tokens("abcdefgh", "mock-abs", b), 2);
  EXPECT_EQ(count_tokens("abcdefgh", "word", b), 1);
  EXPECT_EQ(count_tokens("abcdefgh", "char4", b), 2);
  EXPECT_EQ(count_tokens("", "nope", b), 0);
  EXPECT_THROW(count_tokens("x", "nope", b), BackendError);
}

// ----------------------------------------------------------------- wire format

TEST(Wire, RequestBuildersMatchProtocol) {
  const std::vector<std::string> texts{"a", "b"};
  EXPECT_EQ(wire::embed_request("m", texts).dump(), R"({"model":"m","texts":["a","b"]})");
  EXPECT_EQ(wire::generate_request("m", "p", 5).dump(),
            R"({"max_new_tokens":5,"model":"m","prompt":"p"})");
  EXPECT_EQ(wire::count_request("m", "t").dump(), R"({"model":"m","text":"t"})");
}

TEST(Wire, ResponsesRoundTrip) {
  const std::vector<std::vector<double>> vecs{{0.1, -2.5e-17, 3.0}, {1.0 / 3.0, 0.0, -7.25}};
  const auto reparsed = json::parse(wire::embed_response(vecs).dump());
  EXPECT_EQ(wire::parse_embed_response(reparsed, 2), vecs);
  EXPECT_EQ(wire::parse_generate_response(json::parse(wire::generate_response("é\n\"x\"").dump())),
            "é\n\"x\"");
  EXPECT_EQ(wire::parse_count_response(json::parse(wire::count_response(123456789012).dump())),
            123456789012);
  const auto profiles = testsupport::fixture_profiles();
  const auto back = wire::parse_models_response(json::parse(wire::models_response(profiles).dump()));
  ASSERT_EQ(back.size(), profiles.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(to_json(back[i]), to_json(profiles[i]));
}

TEST(Wire, ParsersAreStrict) {
  EXPECT_THROW(wire::parse_count_response(json{{"count", "3"}}), BackendError);
  EXPECT_THROW(wire::parse_count_response(json{{"count", 2.5}}), BackendError);
  EXPECT_THROW(wire::parse_generate_response(json{{"txt", "a"}}), BackendError);
  EXPECT_THROW(wire::parse_embed_response(json{{"vectors", {{1.0}, {1.0, 2.0}}}}, 2), BackendError);
  EXPECT_THROW(wire::parse_embed_response(json{{"vectors", {{1.0}}}}, 2), BackendError);
  EXPECT_THROW(wire::parse_embed_response(json{{"vectors", {{"1"}}}}, 1), BackendError);
  EXPECT_THROW(wire::parse_embed_response(json{{"vectors", {{1.0}}}, {"dim", 2}}, 1), BackendError);
  EXPECT_THROW(wire::parse_models_response(json::array()), BackendError);
}
