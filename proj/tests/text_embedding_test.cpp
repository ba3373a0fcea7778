#include "argutopo/text_embedding.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

namespace argutopo {
namespace {

std::vector<std::string> words(std::string_view text, TokenizerPolicy policy = {}) {
  return tokenize(text, policy).tokens;
}

TEST(Tokenize, WhitespaceSplitWithLowercase) {
  EXPECT_EQ(words("They do not", {.lowercase = true}), (std::vector<std::string>{"they", "do", "not"}));
  EXPECT_EQ(words("They do not"), (std::vector<std::string>{"They", "do", "not"}));
}

TEST(Tokenize, StripsLeadingAndTrailingPunctuation) {
  EXPECT_EQ(words("win."), std::vector<std::string>{"win"});
  EXPECT_EQ(words("\"Hello,\" (world)!"), (std::vector<std::string>{"Hello", "world"}));
  EXPECT_EQ(words("don't"), std::vector<std::string>{"don't"});
  EXPECT_EQ(words("win.", {.strip_punctuation = false}), std::vector<std::string>{"win."});
}

TEST(Tokenize, EmptyAndPunctuationOnlyInput) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("   \t\n ").empty());
  EXPECT_TRUE(tokenize("... -- !").empty());
}

TEST(Tokenize, ProvenancePointsBackIntoTheText) {
  const std::string text = "  Is it? yes.";
  const auto seq = tokenize(text);
  ASSERT_EQ(seq.size(), 3u);
  ASSERT_EQ(seq.provenance.size(), 3u);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(text.substr(seq.provenance[i].offset, seq.provenance[i].length), seq.tokens[i]);
  }
}

TEST(Tokenize, UnicodeWhitespaceAndCaseFolding) {
  // U+00A0 no-break space separates, and non-ASCII letters are lowercased.
  EXPECT_EQ(words("\xC3\x89t\xC3\xA9\xC2\xA0\xCE\x9B\xCE\xA9", {.lowercase = true}),
            (std::vector<std::string>{"\xC3\xA9t\xC3\xA9", "\xCE\xBB\xCF\x89"}));
}

TEST(Tokenize, ConcatenationWithSeparatorConcatenatesTokens) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "ab ,.!xy\t";
  for (int trial = 0; trial < 200; ++trial) {
    std::string a, b;
    for (int k = 0; k < 12; ++k) a += alphabet[rng() % alphabet.size()];
    for (int k = 0; k < 12; ++k) b += alphabet[rng() % alphabet.size()];
    auto joined = words(a);
    const auto tail = words(b);
    joined.insert(joined.end(), tail.begin(), tail.end());
    EXPECT_EQ(words(a + " " + b), joined) << "a='" << a << "' b='" << b << "'";
  }
}

TEST(GloveText, LoadsFixture) {
  std::istringstream in("cat 0.1 0.2 0.3 0.4\ndog 1 2 3 4\r\n\nfish -1 -2 -3 -4e-2\n");
  const auto m = load_glove_text(in);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.dimension(), 4u);
  EXPECT_EQ(m.source_format(), EmbeddingFormat::glove_text);
  EXPECT_EQ(m.tokens(), (std::vector<std::string>{"cat", "dog", "fish"}));
  EXPECT_FLOAT_EQ(m.find("fish")[3], -0.04f);
  EXPECT_TRUE(m.find("bird").empty());
  EXPECT_TRUE(m.warnings().empty());
}

TEST(GloveText, WrongFieldCountNamesLine) {
  std::istringstream in("dog 1 2 3 4\ncat 0.1 0.2\n");
  try {
    (void)load_glove_text(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    EXPECT_EQ(e.exit_code(), 2);
  }
}

TEST(GloveText, RejectsMalformedInput) {
  for (const char* bad : {"", "\n\n", "cat 1 nan\n", "cat 1 inf\n", "cat 1 x\n", "cat 1 1e999\n", "cat\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW((void)load_glove_text(in), ParseError) << "input: " << bad;
  }
}

TEST(GloveText, DuplicateTokenLastWinsWithWarning) {
  std::istringstream in("a 1 1\nb 2 2\na 3 3\n");
  const auto m = load_glove_text(in);
  EXPECT_EQ(m.tokens(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.find("a")[0], 3.0f);
  ASSERT_EQ(m.warnings().size(), 1u);
  EXPECT_NE(m.warnings()[0].find("'a'"), std::string::npos);
}

EmbeddingModel random_model(std::uint64_t seed, std::size_t n, std::size_t dim, EmbeddingFormat fmt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 1.0f);
  EmbeddingModelBuilder b(dim, fmt);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> v(dim);
    for (float& x : v) x = g(rng);
    b.add("w" + std::to_string(i) + (i % 3 == 0 ? "\xC3\xA9" : ""), v);
  }
  return std::move(b).build();
}

void expect_bit_identical(const EmbeddingModel& a, const EmbeddingModel& b) {
  ASSERT_EQ(a.dimension(), b.dimension());
  ASSERT_EQ(a.tokens(), b.tokens());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto va = a.vector_at(i);
    const auto vb = b.vector_at(i);
    EXPECT_EQ(std::memcmp(va.data(), vb.data(), va.size_bytes()), 0) << "entry " << i;
  }
}

TEST(GloveText, RoundTripIsBitExact) {
  const auto m = random_model(3, 40, 7, EmbeddingFormat::glove_text);
  std::stringstream ss;
  save_glove_text(m, ss);
  expect_bit_identical(m, load_glove_text(ss));
}

std::string w2v_fixture(bool truncate) {
  std::string s = "2 3\n";
  auto entry = [&](const std::string& tok, std::initializer_list<float> v) {
    s += tok + ' ';
    for (float f : v) {
      const auto bits = std::bit_cast<std::uint32_t>(f);
      for (int k = 0; k < 4; ++k) s += static_cast<char>((bits >> (8 * k)) & 0xFF);
    }
    s += '\n';
  };
  entry("alpha", {1.0f, -2.5f, 0.25f});
  if (!truncate) entry("beta", {0.0f, 3.0f, -1.0f});
  return s;
}

TEST(Word2VecBinary, LoadsFixture) {
  std::istringstream in(w2v_fixture(false));
  const auto m = load_word2vec_binary(in);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.dimension(), 3u);
  EXPECT_EQ(m.source_format(), EmbeddingFormat::word2vec_binary);
  EXPECT_EQ(m.find("alpha")[1], -2.5f);
  EXPECT_EQ(m.find("beta")[2], -1.0f);
}

TEST(Word2VecBinary, TruncationReportsOffsetAndExpectedCount) {
  std::istringstream in(w2v_fixture(true));
  try {
    (void)load_word2vec_binary(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("expected 2 entries"), std::string::npos) << msg;
    EXPECT_NE(msg.find("byte"), std::string::npos) << msg;
  }
}

TEST(Word2VecBinary, RejectsBadHeaders) {
  for (const char* bad : {"", "2\n", "two 3\n", "2 3 4\n", "2 0\n", "-2 3\n", "2 3x\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW((void)load_word2vec_binary(in), ParseError) << "header: " << bad;
  }
}

TEST(Word2VecBinary, InvalidUtf8TokensAreReplaced) {
  std::string s = "1 1\n\xFF\x41 ";
  s.append("\0\0\x80\x3F", 4);  // 1.0f little-endian
  std::istringstream in(s);
  const auto m = load_word2vec_binary(in);
  EXPECT_EQ(m.tokens()[0], "\xEF\xBF\xBD" "A");
  EXPECT_EQ(m.vector_at(0)[0], 1.0f);
}

TEST(Word2VecBinary, RoundTripIsBitExact) {
  const auto m = random_model(5, 64, 11, EmbeddingFormat::word2vec_binary);
  std::stringstream ss;
  save_word2vec_binary(m, ss);
  expect_bit_identical(m, load_word2vec_binary(ss));
}

TEST(LoadModel, DispatchesOnFormat) {
  std::istringstream glove("a 1 2\n");
  EXPECT_EQ(load_model(glove, EmbeddingFormat::glove_text).dimension(), 2u);
  std::istringstream w2v(w2v_fixture(false));
  EXPECT_EQ(load_model(w2v, EmbeddingFormat::word2vec_binary).dimension(), 3u);
}

EmbeddingModel ab_model() {
  EmbeddingModelBuilder b(2, EmbeddingFormat::glove_text);
  b.add("a", {1.0f, 0.0f}).add("b", {0.0f, 1.0f});
  return std::move(b).build();
}

TokenSequence seq(std::vector<std::string> tokens) {
  TokenSequence s;
  s.tokens = std::move(tokens);
  s.provenance.resize(s.tokens.size());
  return s;
}

TEST(EmbedTokens, DirectLookup) {
  const auto v = embed_tokens(ab_model(), seq({"a", "b", "a"}));
  EXPECT_EQ(v.vectors, (std::vector<std::vector<double>>{{1, 0}, {0, 1}, {1, 0}}));
  EXPECT_TRUE(v.skipped.empty());
  EXPECT_EQ(v.dimension, 2u);
}

TEST(EmbedTokens, SkipPolicyRecordsPositions) {
  const auto v = embed_tokens(ab_model(), seq({"a", "z", "b"}), OovPolicy::skip);
  EXPECT_EQ(v.size(), 2u);
  ASSERT_EQ(v.skipped.size(), 1u);
  EXPECT_EQ(v.skipped[0].position, 1u);
  EXPECT_EQ(v.skipped[0].token, "z");
  EXPECT_EQ(v.kept_positions, (std::vector<std::size_t>{0, 2}));
}

TEST(EmbedTokens, FailPolicyListsMissingTokens) {
  try {
    (void)embed_tokens(ab_model(), seq({"a", "z"}), OovPolicy::fail);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("\"z\""), std::string::npos) << e.what();
  }
}

TEST(EmbedTokens, KeptVectorsMatchModelRows) {
  const auto m = random_model(9, 30, 5, EmbeddingFormat::glove_text);
  std::mt19937_64 rng(4);
  std::vector<std::string> toks;
  for (int k = 0; k < 100; ++k) toks.push_back(k % 7 == 0 ? "missing" : m.tokens()[rng() % m.size()]);
  const auto v = embed_tokens(m, seq(toks));
  EXPECT_EQ(v.size() + v.skipped.size(), toks.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto row = m.find(toks[v.kept_positions[i]]);
    for (std::size_t k = 0; k < row.size(); ++k) EXPECT_EQ(v.vectors[i][k], static_cast<double>(row[k]));
  }
}

}  // namespace
}  // namespace argutopo
