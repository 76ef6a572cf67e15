#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace camscout::html {

struct Attribute {
  std::string name;   // lowercased
  std::string value;  // entity-decoded
};

struct Token {
  enum class Type { StartTag, EndTag, Text, Comment } type = Type::Text;
  std::string name;  // lowercased tag name for tags
  std::vector<Attribute> attributes;
  std::string text;  // decoded text for Text, raw body for Comment
  bool self_closing = false;

  const std::string* attr(std::string_view key) const;
};

// Error-tolerant tokenizer. Never fails: unterminated tags, stray '<',
// unquoted or duplicate attributes, and unclosed comments are all recovered
// the way browsers do. Contents of <script>/<style>/<textarea>/<title> are
// emitted as a single Text token. CDATA sections become Text.
std::vector<Token> tokenize(std::string_view input);

// Streaming variant; the callback sees tokens in document order.
void tokenize(std::string_view input, const std::function<void(const Token&)>& sink);

std::string decode_entities(std::string_view text);

}  // namespace camscout::html
