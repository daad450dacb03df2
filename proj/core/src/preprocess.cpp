#include "esg/preprocess.hpp"

#include <array>
#include <cctype>
#include <string>

namespace esg {

namespace {

bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool ascii_alnum(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
         (u >= 'A' && u <= 'Z');
}

bool retained_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == '\'' ||
         c == '"' || c == '-';
}

bool word_char(char c) { return ascii_alnum(c) || c == '_'; }

bool starts_with_icase(std::string_view s, std::size_t at,
                       std::string_view prefix) {
  if (s.size() - at < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[at + i])) != prefix[i]) {
      return false;
    }
  }
  return true;
}

// Length of the URL prefix starting at `at`, or 0 if none starts here.
std::size_t url_prefix_len(std::string_view s, std::size_t at) {
  static constexpr std::array<std::string_view, 3> schemes = {
      "https://", "http://", "ftp://"};
  for (const auto scheme : schemes) {
    if (starts_with_icase(s, at, scheme)) return scheme.size();
  }
  if (starts_with_icase(s, at, "www.") &&
      (at == 0 || !ascii_alnum(s[at - 1]))) {
    return 4;
  }
  return 0;
}

std::string strip_urls(std::string_view s, int& removed) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t prefix = url_prefix_len(s, i);
    if (prefix == 0) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t end = i + prefix;
    while (end < s.size() && !ascii_space(s[end])) ++end;
    // Sentence punctuation glued to the end of the span stays in the text.
    while (end > i + prefix && retained_punct(s[end - 1])) --end;
    // The whitespace run before the URL goes with it.
    while (!out.empty() && ascii_space(out.back())) out.pop_back();
    ++removed;
    i = end;
  }
  return out;
}

std::string replace_mentions(std::string_view s, int& replaced) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '@' && i + 1 < s.size() && word_char(s[i + 1])) {
      std::size_t end = i + 1;
      while (end < s.size() && word_char(s[end])) ++end;
      out += "user";
      ++replaced;
      i = end;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::string apply_retained_set(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    if (ascii_alnum(c) || ascii_space(c) || retained_punct(c)) {
      out.push_back(c);
    }
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (const char c : s) {
    if (ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && ascii_space(s[b])) ++b;
  while (e > b && ascii_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> tokenize_impl(std::string_view s, bool lowercase) {
  std::vector<std::string> tokens;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const unsigned char u = static_cast<unsigned char>(c);
    bool keep = false;
    if (u >= 0x80 || ascii_alnum(c)) {
      keep = true;
    } else if (c == '\'' || c == '-') {
      // Intra-word only: joins two word characters.
      const bool prev_ok = i > 0 && (ascii_alnum(s[i - 1]) ||
                                     static_cast<unsigned char>(s[i - 1]) >= 0x80);
      const bool next_ok =
          i + 1 < s.size() && (ascii_alnum(s[i + 1]) ||
                               static_cast<unsigned char>(s[i + 1]) >= 0x80);
      keep = prev_ok && next_ok;
    }
    if (keep) {
      cur.push_back(lowercase && u < 0x80
                        ? static_cast<char>(std::tolower(u))
                        : c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace

CleanText clean_text(std::string_view text) {
  CleanText result;
  result.original.assign(text);
  std::string cur(text);
  // Character removal can uncover a URL or mention that the first pass did
  // not see, so the pass repeats until the text stops changing.
  for (std::size_t guard = 0; guard <= text.size(); ++guard) {
    std::string next = strip_urls(cur, result.removed_urls);
    next = replace_mentions(next, result.replaced_mentions);
    next = apply_retained_set(next);
    next = collapse_whitespace(next);
    next = trim(next);
    if (next == cur) break;
    cur = std::move(next);
  }
  result.cleaned = std::move(cur);
  return result;
}

std::vector<std::string> split_paragraphs(std::string_view text) {
  std::vector<std::string> paragraphs;
  std::string current;
  bool current_has_content = false;

  const auto flush = [&] {
    if (current_has_content) {
      std::string p = trim(current);
      if (!p.empty()) paragraphs.push_back(std::move(p));
    }
    current.clear();
    current_has_content = false;
  };

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const bool blank = trim(line).empty();
    if (blank) {
      flush();
    } else {
      if (current_has_content) current.push_back('\n');
      current.append(line);
      current_has_content = true;
    }
    if (nl == text.size()) break;
    start = nl + 1;
  }
  flush();
  return paragraphs;
}

std::vector<std::string> tokenize(std::string_view text) {
  return tokenize_impl(text, /*lowercase=*/true);
}

std::vector<std::string> tokenize_preserving_case(std::string_view text) {
  return tokenize_impl(text, /*lowercase=*/false);
}

}  // namespace esg
