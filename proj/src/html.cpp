#include "camscout/html.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>

namespace camscout::html {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

char lower_char(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_raw_text_element(std::string_view name) {
  return name == "script" || name == "style" || name == "textarea" || name == "title" ||
         name == "xmp";
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

struct NamedEntity {
  std::string_view name;
  std::uint32_t cp;
};

constexpr NamedEntity kEntities[] = {
    {"amp", '&'},   {"lt", '<'},     {"gt", '>'},     {"quot", '"'},   {"apos", '\''},
    {"nbsp", 0xA0}, {"copy", 0xA9},  {"reg", 0xAE},   {"deg", 0xB0},   {"middot", 0xB7},
    {"ndash", 0x2013}, {"mdash", 0x2014}, {"hellip", 0x2026}, {"laquo", 0xAB}, {"raquo", 0xBB},
};

class Tokenizer {
 public:
  Tokenizer(std::string_view in, const std::function<void(const Token&)>& sink)
      : in_(in), sink_(sink) {}

  void run() {
    while (pos_ < in_.size()) {
      std::size_t lt = in_.find('<', pos_);
      if (lt == std::string_view::npos) {
        text_.append(in_.substr(pos_));
        pos_ = in_.size();
        break;
      }
      text_.append(in_.substr(pos_, lt - pos_));
      pos_ = lt;
      if (!markup()) {
        text_ += '<';
        ++pos_;
      }
    }
    flush_text();
  }

 private:
  void flush_text() {
    if (text_.empty()) return;
    Token t;
    t.type = Token::Type::Text;
    t.text = decode_entities(text_);
    text_.clear();
    sink_(t);
  }

  // Handles the construct starting at in_[pos_] == '<'. Returns false when
  // the '<' is literal text.
  bool markup() {
    std::string_view rest = in_.substr(pos_);
    if (rest.starts_with("<!--")) {
      flush_text();
      std::size_t end = in_.find("-->", pos_ + 4);
      Token t;
      t.type = Token::Type::Comment;
      if (end == std::string_view::npos) {
        t.text = std::string(in_.substr(pos_ + 4));
        pos_ = in_.size();
      } else {
        t.text = std::string(in_.substr(pos_ + 4, end - pos_ - 4));
        pos_ = end + 3;
      }
      sink_(t);
      return true;
    }
    if (rest.starts_with("<![CDATA[")) {
      std::size_t end = in_.find("]]>", pos_ + 9);
      std::size_t stop = end == std::string_view::npos ? in_.size() : end;
      flush_text();
      Token t;
      t.type = Token::Type::Text;
      t.text = std::string(in_.substr(pos_ + 9, stop - pos_ - 9));
      sink_(t);
      pos_ = end == std::string_view::npos ? in_.size() : end + 3;
      return true;
    }
    if (rest.starts_with("<!") || rest.starts_with("<?")) {
      // Doctype, processing instruction or bogus comment: skip to '>'.
      flush_text();
      std::size_t end = in_.find('>', pos_ + 2);
      pos_ = end == std::string_view::npos ? in_.size() : end + 1;
      return true;
    }
    bool end_tag = rest.starts_with("</");
    std::size_t name_start = pos_ + (end_tag ? 2 : 1);
    if (name_start >= in_.size() || !std::isalpha(static_cast<unsigned char>(in_[name_start]))) {
      if (end_tag && name_start < in_.size() && in_[name_start] == '>') {
        pos_ = name_start + 1;  // "</>" is dropped
        return true;
      }
      return false;
    }
    flush_text();
    pos_ = name_start;
    Token t;
    t.type = end_tag ? Token::Type::EndTag : Token::Type::StartTag;
    while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '>' && in_[pos_] != '/') {
      t.name += lower_char(in_[pos_++]);
    }
    attributes(t);
    if (t.type == Token::Type::StartTag && !t.self_closing && is_raw_text_element(t.name)) {
      sink_(t);
      raw_text(t.name);
      return true;
    }
    sink_(t);
    return true;
  }

  void attributes(Token& t) {
    while (pos_ < in_.size()) {
      while (pos_ < in_.size() && (is_space(in_[pos_]) || in_[pos_] == '/')) {
        if (in_[pos_] == '/' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '>') t.self_closing = true;
        ++pos_;
      }
      if (pos_ >= in_.size()) return;
      if (in_[pos_] == '>') {
        ++pos_;
        return;
      }
      // A '<' inside a tag means the tag was never closed; the browser
      // treats it as the start of the next tag.
      if (in_[pos_] == '<') return;
      Attribute a;
      while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '>' && in_[pos_] != '=' &&
             !(in_[pos_] == '/' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '>') && in_[pos_] != '<') {
        a.name += lower_char(in_[pos_++]);
      }
      if (a.name.empty()) {  // stray '='
        ++pos_;
        continue;
      }
      while (pos_ < in_.size() && is_space(in_[pos_])) ++pos_;
      if (pos_ < in_.size() && in_[pos_] == '=') {
        ++pos_;
        while (pos_ < in_.size() && is_space(in_[pos_])) ++pos_;
        if (pos_ < in_.size() && (in_[pos_] == '"' || in_[pos_] == '\'')) {
          char quote = in_[pos_++];
          std::size_t end = in_.find(quote, pos_);
          if (end == std::string_view::npos) {
            // Unterminated quote: value runs to the next '>'.
            end = in_.find('>', pos_);
            if (end == std::string_view::npos) end = in_.size();
            a.value = decode_entities(in_.substr(pos_, end - pos_));
            pos_ = end;
          } else {
            a.value = decode_entities(in_.substr(pos_, end - pos_));
            pos_ = end + 1;
          }
        } else {
          std::size_t start = pos_;
          while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '>') ++pos_;
          a.value = decode_entities(in_.substr(start, pos_ - start));
        }
      }
      bool duplicate = std::any_of(t.attributes.begin(), t.attributes.end(),
                                   [&](const Attribute& x) { return x.name == a.name; });
      if (!duplicate) t.attributes.push_back(std::move(a));
    }
  }

  void raw_text(const std::string& name) {
    std::size_t search = pos_;
    while (true) {
      std::size_t lt = in_.find("</", search);
      if (lt == std::string_view::npos) {
        emit_raw(in_.substr(pos_));
        pos_ = in_.size();
        return;
      }
      std::size_t i = lt + 2;
      std::size_t j = 0;
      while (j < name.size() && i + j < in_.size() && lower_char(in_[i + j]) == name[j]) ++j;
      if (j == name.size() &&
          (i + j >= in_.size() || is_space(in_[i + j]) || in_[i + j] == '>' || in_[i + j] == '/')) {
        emit_raw(in_.substr(pos_, lt - pos_));
        pos_ = lt;
        return;
      }
      search = lt + 2;
    }
  }

  void emit_raw(std::string_view body) {
    if (body.empty()) return;
    Token t;
    t.type = Token::Type::Text;
    t.text = std::string(body);
    sink_(t);
  }

  std::string_view in_;
  const std::function<void(const Token&)>& sink_;
  std::size_t pos_ = 0;
  std::string text_;
};

}  // namespace

const std::string* Token::attr(std::string_view key) const {
  for (const auto& a : attributes)
    if (a.name == key) return &a.value;
  return nullptr;
}

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c != '&') {
      out += c;
      ++i;
      continue;
    }
    std::size_t semi = text.find(';', i + 1);
    if (semi != std::string_view::npos && semi - i <= 10) {
      std::string_view body = text.substr(i + 1, semi - i - 1);
      if (body.size() > 1 && body[0] == '#') {
        char* end = nullptr;
        std::string digits(body.substr(body[1] == 'x' || body[1] == 'X' ? 2 : 1));
        int base = (body[1] == 'x' || body[1] == 'X') ? 16 : 10;
        unsigned long cp = std::strtoul(digits.c_str(), &end, base);
        if (!digits.empty() && end && *end == '\0') {
          append_utf8(out, static_cast<std::uint32_t>(cp));
          i = semi + 1;
          continue;
        }
      } else {
        auto it = std::find_if(std::begin(kEntities), std::end(kEntities),
                               [&](const NamedEntity& e) { return e.name == body; });
        if (it != std::end(kEntities)) {
          append_utf8(out, it->cp);
          i = semi + 1;
          continue;
        }
      }
    }
    out += '&';
    ++i;
  }
  return out;
}

void tokenize(std::string_view input, const std::function<void(const Token&)>& sink) {
  Tokenizer(input, sink).run();
}

std::vector<Token> tokenize(std::string_view input) {
  std::vector<Token> tokens;
  tokenize(input, [&](const Token& t) { tokens.push_back(t); });
  return tokens;
}

}  // namespace camscout::html
