#include <atomic>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "lexsum/mock_backend.hpp"
#include "lexsum/text.hpp"
#include "lexsum/tokens.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace lexsum;

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

std::vector<Sentence> with_lengths(const std::vector<std::int64_t>& lens) {
  std::vector<Sentence> v;
  for (std::size_t i = 0; i < lens.size(); ++i) {
    Sentence s;
    s.index = i;
    s.text = "S" + std::to_string(i) + ".";
    s.token_count["t"] = lens[i];
    v.push_back(s);
  }
  return v;
}

class CountingTokenizer : public TokenCounter {
 public:
  std::int64_t count_tokens(std::string_view, std::string_view text) override {
    ++calls;
    return static_cast<std::int64_t>(mock::word_tokens(text));
  }
  std::atomic<int> calls{0};
};

}  // namespace

TEST(Segment, SplitsOnTerminatorsBeforeCapitals) {
  EXPECT_EQ(texts(segment_sentences("A. B! C?")), (std::vector<std::string>{"A.", "B!", "C?"}));
}

TEST(Segment, EmptyInput) {
  EXPECT_TRUE(segment_sentences("").empty());
  EXPECT_TRUE(segment_sentences("  \n ").empty());
}

TEST(Segment, AbbreviationsDoNotSplit) {
  EXPECT_EQ(segment_sentences("See Art. 5(2) of the Regulation.").size(), 1u);
  EXPECT_EQ(segment_sentences("Under para. 3 and No. 7 the Commission acts.").size(), 1u);
  EXPECT_EQ(segment_sentences("Goods, e.g. Cereals, are covered. Next sentence.").size(), 2u);
}

TEST(Segment, LowercaseContinuationIsNotABoundary) {
  EXPECT_EQ(segment_sentences("The value is 3.5 percent. it continues here.").size(), 1u);
}

TEST(Segment, ClosersStayWithTheirSentence) {
  const auto s = segment_sentences("He said \"Stop.\" Then (\"Go.\") Later.");
  EXPECT_EQ(texts(s), (std::vector<std::string>{"He said \"Stop.\"", "Then (\"Go.\")", "Later."}));
}

TEST(Segment, IndicesAreSequential) {
  const auto s = segment_sentences("One. Two. Three.");
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i].index, i);
}

TEST(Segment, CustomGuardList) {
  SentenceSplitter split({"foo"});
  EXPECT_EQ(split("Use foo. Bar here.").size(), 1u);
  EXPECT_EQ(split("See Art. Five.").size(), 2u);
}

TEST(Chunk, GreedyPacking) {
  const auto c = chunk_document(with_lengths({200, 200, 200}), 512, "t");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].sentences.size(), 2u);
  EXPECT_EQ(c[0].token_count, 400);
  EXPECT_EQ(c[1].sentences[0].index, 2u);
  EXPECT_EQ(c[1].chunk_index, 1u);
}

TEST(Chunk, OverlongSentenceIsTruncatedAlone) {
  const auto c = chunk_document(with_lengths({600}), 512, "t");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c[0].truncated);
  EXPECT_EQ(c[0].token_count, 512);
}

TEST(Chunk, EmptyInputGivesNoChunks) {
  EXPECT_TRUE(chunk_document({}, 512, "t").empty());
}

TEST(Chunk, MissingCountOrBadLimitThrows) {
  EXPECT_THROW(chunk_document(with_lengths({1}), 512, "other"), Error);
  EXPECT_THROW(chunk_document(with_lengths({1}), 0, "t"), Error);
}

TEST(Tokens, EmptyTextIsZero) {
  CountingTokenizer inner;
  EXPECT_EQ(count_tokens("", "any", inner), 0);
  EXPECT_EQ(inner.calls, 0);
}

TEST(Tokens, MockTokenizersDiffer) {
  EXPECT_EQ(mock::word_tokens("abcd efgh"), 2);
  EXPECT_EQ(mock::char4_tokens("abcd efgh"), 2);
  EXPECT_EQ(mock::word_tokens("abcdefgh"), 1);
  EXPECT_EQ(mock::char4_tokens("abcdefgh"), 2);
}

TEST(Tokens, AnnotationKeepsEveryTokenizer) {
  mock::MockBackend backend({});
  auto s = segment_sentences("Alpha beta gamma delta epsilon.");
  annotate_token_counts(s, "word", backend);
  annotate_token_counts(s, "char4", backend);
  EXPECT_EQ(s[0].token_count.at("word"), 5);
  EXPECT_EQ(s[0].token_count.at("char4"), 7);
}

TEST(Tokens, CacheReturnsStableCountsAndCallsOnce) {
  CountingTokenizer inner;
  CachedTokenCounter cache(inner);
  EXPECT_EQ(cache.count_tokens("w", "a b c"), 3);
  EXPECT_EQ(cache.count_tokens("w", "a b c"), 3);
  EXPECT_EQ(inner.calls, 1);
  EXPECT_EQ(cache.count_tokens("v", "a b c"), 3);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(Tokens, CacheIsConsistentUnderConcurrency) {
  CountingTokenizer inner;
  CachedTokenCounter cache(inner);
  std::vector<std::string> docs;
  for (int i = 0; i < 50; ++i) docs.push_back(testsupport::words(1 + i));
  std::atomic<bool> bad{false};
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t)
      threads.emplace_back([&] {
        for (int rep = 0; rep < 20; ++rep)
          for (int i = 0; i < 50; ++i)
            if (cache.count_tokens("w", docs[i]) != i + 1) bad = true;
      });
  }
  EXPECT_FALSE(bad);
  EXPECT_EQ(cache.size(), 50u);
}

// ----------------------------------------------------------------- properties

TEST(TextProperty, ChunkCoverageBudgetAndOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = rng() % 60;
    std::vector<std::int64_t> lens;
    for (std::size_t i = 0; i < n; ++i) lens.push_back(1 + static_cast<std::int64_t>(rng() % 300));
    const std::int64_t limit = 1 + static_cast<std::int64_t>(rng() % 600);
    const auto chunks = chunk_document(with_lengths(lens), limit, "t");
    std::vector<std::size_t> flat;
    std::vector<std::vector<std::size_t>> got;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      EXPECT_EQ(chunks[c].chunk_index, c);
      EXPECT_LE(chunks[c].token_count, limit);
      got.emplace_back();
      for (const auto& s : chunks[c].sentences) {
        flat.push_back(s.index);
        got.back().push_back(s.index);
      }
    }
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    ASSERT_EQ(flat, expect);
    EXPECT_EQ(got, oracle::greedy_chunks(lens, limit));
  }
}

TEST(TextProperty, LargerLimitNeverMoreChunks) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> lens;
    for (int i = 0; i < 40; ++i) lens.push_back(1 + static_cast<std::int64_t>(rng() % 200));
    const auto s = with_lengths(lens);
    std::size_t prev = SIZE_MAX;
    for (std::int64_t limit = 50; limit <= 2000; limit += 50) {
      const auto n = chunk_document(s, limit, "t").size();
      EXPECT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(TextProperty, SegmentationRoundTrip) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> pieces{"Art.", "5(2)", "the", "Commission.", "Member", "states!",
                                        "Why?", "e.g.", "No.", "data", "\n", "  ", "\t", "\"Quoted.\"",
                                        "(Bracketed.)", "x.y", "A.", "b"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const std::size_t n = rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      text += pieces[rng() % pieces.size()];
      text += (rng() % 3 == 0) ? "  " : " ";
    }
    const auto s = segment_sentences(text);
    EXPECT_EQ(normalize_whitespace(join_sentences(s)), normalize_whitespace(text)) << text;
    for (const auto& x : s) EXPECT_FALSE(x.text.empty());
  }
}
