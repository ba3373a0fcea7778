#pragma once

// Pretrained embedding files, tokenization, and token -> vector lookup.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "argutopo/detail/numfmt.hpp"
#include "argutopo/detail/utf8.hpp"
#include "argutopo/error.hpp"

namespace argutopo {

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

struct TokenizerPolicy {
  bool lowercase = false;
  bool strip_punctuation = true;
};

/// Byte range of a token inside the source text, before any case folding or
/// punctuation stripping.
struct TextSpan {
  std::size_t offset = 0;
  std::size_t length = 0;

  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<TextSpan> provenance;

  [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
  [[nodiscard]] bool empty() const noexcept { return tokens.empty(); }
};

/// Splits on Unicode whitespace, then optionally trims leading/trailing
/// punctuation and lowercases each token. Tokens left empty are dropped.
/// Invalid UTF-8 bytes are carried through as U+FFFD.
inline TokenSequence tokenize(std::string_view text, const TokenizerPolicy& policy = {}) {
  TokenSequence out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    // Skip whitespace.
    while (pos < text.size()) {
      const auto d = detail::decode_utf8(text, pos);
      if (!detail::is_unicode_space(d.code_point)) break;
      pos += d.length;
    }
    if (pos >= text.size()) break;

    const std::size_t start = pos;
    std::vector<char32_t> cps;
    std::vector<std::size_t> cp_end;  // byte offset just past each code point
    while (pos < text.size()) {
      const auto d = detail::decode_utf8(text, pos);
      if (detail::is_unicode_space(d.code_point)) break;
      cps.push_back(d.code_point);
      pos += d.length;
      cp_end.push_back(pos);
    }

    std::size_t first = 0;
    std::size_t last = cps.size();
    if (policy.strip_punctuation) {
      while (first < last && detail::is_unicode_punctuation(cps[first])) ++first;
      while (last > first && detail::is_unicode_punctuation(cps[last - 1])) --last;
    }
    if (first == last) continue;

    std::string token;
    for (std::size_t k = first; k < last; ++k) {
      detail::append_utf8(token, policy.lowercase ? detail::to_lower(cps[k]) : cps[k]);
    }
    const std::size_t span_begin = first == 0 ? start : cp_end[first - 1];
    out.tokens.push_back(std::move(token));
    out.provenance.push_back({span_begin, cp_end[last - 1] - span_begin});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embedding model
// ---------------------------------------------------------------------------

enum class EmbeddingFormat { glove_text, word2vec_binary };

inline std::string_view to_string(EmbeddingFormat f) {
  return f == EmbeddingFormat::glove_text ? "glove-text" : "word2vec-bin";
}

class EmbeddingModelBuilder;

/// Immutable vocabulary -> vector map. Vectors are stored as float32, the
/// precision of both supported file formats, in file order.
class EmbeddingModel {
 public:
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::size_t size() const noexcept { return tokens_.size(); }
  [[nodiscard]] EmbeddingFormat source_format() const noexcept { return format_; }
  [[nodiscard]] const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  [[nodiscard]] bool contains(std::string_view token) const {
    return index_.find(std::string(token)) != index_.end();
  }

  /// Vector of the i-th token in file order.
  [[nodiscard]] std::span<const float> vector_at(std::size_t i) const {
    return {values_.data() + i * dimension_, dimension_};
  }

  /// Empty span when the token is out of vocabulary.
  [[nodiscard]] std::span<const float> find(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    if (it == index_.end()) return {};
    return vector_at(it->second);
  }

 private:
  friend class EmbeddingModelBuilder;
  EmbeddingModel() = default;

  std::size_t dimension_ = 0;
  EmbeddingFormat format_ = EmbeddingFormat::glove_text;
  std::vector<std::string> tokens_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
};

/// Incremental construction used by the loaders and by tests.
class EmbeddingModelBuilder {
 public:
  EmbeddingModelBuilder(std::size_t dimension, EmbeddingFormat format) {
    if (dimension == 0) throw DataError("embedding dimension must be positive");
    model_.dimension_ = dimension;
    model_.format_ = format;
  }

  /// Adds or replaces `token`. A replaced token keeps its original position
  /// and the replacement is recorded as a warning.
  EmbeddingModelBuilder& add(std::string token, std::span<const float> vec) {
    if (vec.size() != model_.dimension_) {
      throw DataError("vector for '" + token + "' has length " + std::to_string(vec.size()) +
                      ", expected " + std::to_string(model_.dimension_));
    }
    const auto [it, inserted] = model_.index_.try_emplace(token, model_.tokens_.size());
    if (inserted) {
      model_.tokens_.push_back(std::move(token));
      model_.values_.insert(model_.values_.end(), vec.begin(), vec.end());
    } else {
      model_.warnings_.push_back("duplicate token '" + token + "': last occurrence wins");
      std::copy(vec.begin(), vec.end(), model_.values_.begin() + it->second * model_.dimension_);
    }
    return *this;
  }

  EmbeddingModelBuilder& add(std::string token, std::initializer_list<float> vec) {
    return add(std::move(token), std::span<const float>(vec.begin(), vec.size()));
  }

  void warn(std::string message) { model_.warnings_.push_back(std::move(message)); }

  [[nodiscard]] std::size_t size() const noexcept { return model_.tokens_.size(); }

  EmbeddingModel build() && { return std::move(model_); }

 private:
  EmbeddingModel model_;
};

// ---------------------------------------------------------------------------
// GloVe text format: `token f_1 ... f_d\n`
// ---------------------------------------------------------------------------

inline EmbeddingModel load_glove_text(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dimension = 0;
  std::vector<float> vec;
  std::optional<EmbeddingModelBuilder> builder;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(' ') == std::string::npos) continue;

    std::string_view rest(line);
    const auto sp = rest.find(' ');
    if (sp == 0 || sp == std::string_view::npos) {
      throw ParseError("glove-text line " + std::to_string(line_no) +
                       ": expected a token followed by floats");
    }
    std::string token = detail::sanitize_utf8(rest.substr(0, sp));
    rest.remove_prefix(sp + 1);

    vec.clear();
    while (!rest.empty()) {
      const auto next = rest.find(' ');
      const auto field = rest.substr(0, next);
      rest.remove_prefix(next == std::string_view::npos ? rest.size() : next + 1);
      if (field.empty()) continue;
      const auto value = detail::parse_real<float>(field);
      if (!value) {
        throw ParseError("glove-text line " + std::to_string(line_no) + ": bad float '" +
                         std::string(field) + "'");
      }
      if (!std::isfinite(*value)) {
        throw ParseError("glove-text line " + std::to_string(line_no) + ": non-finite value '" +
                         std::string(field) + "'");
      }
      vec.push_back(*value);
    }

    if (!builder) {
      if (vec.empty()) {
        throw ParseError("glove-text line " + std::to_string(line_no) + ": no vector components");
      }
      dimension = vec.size();
      builder.emplace(dimension, EmbeddingFormat::glove_text);
    }
    if (vec.size() != dimension) {
      throw ParseError("glove-text line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dimension) + " values, found " + std::to_string(vec.size()));
    }
    builder->add(std::move(token), std::span<const float>(vec));
  }
  if (in.bad()) throw ParseError("glove-text: read failure");
  if (!builder) throw ParseError("glove-text: no entries");
  return std::move(*builder).build();
}

inline void save_glove_text(const EmbeddingModel& model, std::ostream& out) {
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.tokens()[i];
    for (float v : model.vector_at(i)) out << ' ' << detail::format_shortest(v);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Word2Vec binary format: `V D\n` then per entry `token 0x20 float32[D] [0x0A]`
// ---------------------------------------------------------------------------

namespace detail {

inline float load_le_float(const unsigned char* p) {
  std::uint32_t bits = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                       (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
  return std::bit_cast<float>(bits);
}

inline void store_le_float(float v, unsigned char* p) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  p[0] = static_cast<unsigned char>(bits);
  p[1] = static_cast<unsigned char>(bits >> 8);
  p[2] = static_cast<unsigned char>(bits >> 16);
  p[3] = static_cast<unsigned char>(bits >> 24);
}

}  // namespace detail

inline EmbeddingModel load_word2vec_binary(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("word2vec-bin: missing header");
  std::uint64_t offset = header.size() + 1;
  if (!header.empty() && header.back() == '\r') header.pop_back();

  auto parse_count = [&](std::string_view field) -> std::size_t {
    if (field.empty() || field.size() > 19 ||
        !std::all_of(field.begin(), field.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw ParseError("word2vec-bin: header must be two ASCII integers, got '" + header + "'");
    }
    std::size_t value = 0;
    std::from_chars(field.data(), field.data() + field.size(), value);
    return value;
  };
  std::string_view h(header);
  while (!h.empty() && h.front() == ' ') h.remove_prefix(1);
  while (!h.empty() && h.back() == ' ') h.remove_suffix(1);
  const auto sp = h.find(' ');
  if (sp == std::string_view::npos) {
    throw ParseError("word2vec-bin: header must be two ASCII integers, got '" + header + "'");
  }
  auto dim_field = h.substr(sp + 1);
  while (!dim_field.empty() && dim_field.front() == ' ') dim_field.remove_prefix(1);
  const std::size_t vocab_size = parse_count(h.substr(0, sp));
  const std::size_t dimension = parse_count(dim_field);
  if (dimension == 0) throw ParseError("word2vec-bin: dimension must be positive");

  EmbeddingModelBuilder builder(dimension, EmbeddingFormat::word2vec_binary);
  std::vector<unsigned char> raw(dimension * 4);
  std::vector<float> vec(dimension);
  std::string token;

  auto truncated = [&](std::size_t entry) {
    return ParseError("word2vec-bin: premature end of stream at byte " + std::to_string(offset) +
                      " while reading entry " + std::to_string(entry + 1) + "; expected " +
                      std::to_string(vocab_size) + " entries");
  };

  for (std::size_t entry = 0; entry < vocab_size; ++entry) {
    token.clear();
    for (;;) {
      const int c = in.get();
      if (c == std::char_traits<char>::eof()) throw truncated(entry);
      ++offset;
      if (c == ' ') break;
      // The separator newline after the previous entry, if present.
      if (c == '\n' && token.empty()) continue;
      token.push_back(static_cast<char>(c));
    }
    if (token.empty()) {
      throw ParseError("word2vec-bin: empty token at byte " + std::to_string(offset - 1));
    }
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    offset += static_cast<std::uint64_t>(in.gcount());
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw truncated(entry);
    for (std::size_t k = 0; k < dimension; ++k) {
      vec[k] = detail::load_le_float(raw.data() + 4 * k);
      if (!std::isfinite(vec[k])) {
        throw ParseError("word2vec-bin: non-finite value in entry " + std::to_string(entry + 1) +
                         " ('" + detail::sanitize_utf8(token) + "')");
      }
    }
    builder.add(detail::sanitize_utf8(token), std::span<const float>(vec));
  }
  return std::move(builder).build();
}

inline void save_word2vec_binary(const EmbeddingModel& model, std::ostream& out) {
  out << model.size() << ' ' << model.dimension() << '\n';
  std::vector<unsigned char> raw(model.dimension() * 4);
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.tokens()[i] << ' ';
    const auto vec = model.vector_at(i);
    for (std::size_t k = 0; k < vec.size(); ++k) detail::store_le_float(vec[k], raw.data() + 4 * k);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    out << '\n';
  }
}

inline EmbeddingModel load_model(std::istream& in, EmbeddingFormat format) {
  return format == EmbeddingFormat::glove_text ? load_glove_text(in) : load_word2vec_binary(in);
}

// ---------------------------------------------------------------------------
// Token -> vector lookup
// ---------------------------------------------------------------------------

enum class OovPolicy { skip, fail };

struct SkippedToken {
  std::size_t position = 0;
  std::string token;

  friend bool operator==(const SkippedToken&, const SkippedToken&) = default;
};

struct VectorSequence {
  std::size_t dimension = 0;
  std::vector<std::vector<double>> vectors;
  std::vector<SkippedToken> skipped;
  /// Input position of each kept vector.
  std::vector<std::size_t> kept_positions;

  [[nodiscard]] std::size_t size() const noexcept { return vectors.size(); }
};

inline VectorSequence embed_tokens(const EmbeddingModel& model, const TokenSequence& tokens,
                                   OovPolicy oov = OovPolicy::skip) {
  VectorSequence out;
  out.dimension = model.dimension();
  for (std::size_t i = 0; i < tokens.tokens.size(); ++i) {
    const auto vec = model.find(tokens.tokens[i]);
    if (vec.empty()) {
      out.skipped.push_back({i, tokens.tokens[i]});
      continue;
    }
    out.vectors.emplace_back(vec.begin(), vec.end());
    out.kept_positions.push_back(i);
  }
  if (oov == OovPolicy::fail && !out.skipped.empty()) {
    std::string missing;
    for (const auto& s : out.skipped) {
      if (!missing.empty()) missing += ", ";
      missing += '"' + s.token + '"';
    }
    throw DataError("out-of-vocabulary tokens: " + missing);
  }
  return out;
}

}  // namespace argutopo
