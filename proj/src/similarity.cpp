#include "ethoscan/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>

#include "ethoscan/errors.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::similarity {
namespace {

enum class CommentStyle { kNone, kSlash, kHash, kSlashAndHash };

CommentStyle comment_style(std::string_view ext) {
  static const std::set<std::string, std::less<>> slash = {
      "c", "h", "cc", "cpp", "hpp", "java", "js", "ts", "go", "rs",
      "cs", "kt", "swift", "scala", "m"};
  static const std::set<std::string, std::less<>> hash = {"py", "sh", "rb"};
  if (ext == "php") return CommentStyle::kSlashAndHash;
  if (slash.count(ext)) return CommentStyle::kSlash;
  if (hash.count(ext)) return CommentStyle::kHash;
  return CommentStyle::kNone;
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }
bool space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class CodeLexer {
 public:
  CodeLexer(std::string_view src, CommentStyle style, bool python)
      : s_(src), style_(style), python_(python) {}

  std::vector<std::string> run() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (space(c)) {
        ++i_;
      } else if (slash_comments() && c == '/' && at(1) == '/') {
        skip_line();
      } else if (slash_comments() && c == '/' && at(1) == '*') {
        size_t end = s_.find("*/", i_ + 2);
        i_ = end == std::string_view::npos ? s_.size() : end + 2;
      } else if (hash_comments() && c == '#') {
        skip_line();
      } else if (python_ && (c == '"' || c == '\'') && at(1) == c && at(2) == c) {
        std::string quote(3, c);
        size_t end = s_.find(quote, i_ + 3);
        size_t stop = end == std::string_view::npos ? s_.size() : end + 3;
        emit(i_, stop);
      } else if (c == '"' || c == '\'' || c == '`') {
        quoted(c);
      } else if (ident_start(c)) {
        size_t start = i_;
        while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
        out_.emplace_back(s_.substr(start, i_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = i_;
        while (i_ < s_.size() && (ident_char(s_[i_]) || s_[i_] == '.')) ++i_;
        out_.emplace_back(s_.substr(start, i_ - start));
      } else {
        out_.emplace_back(1, c);
        ++i_;
      }
    }
    return std::move(out_);
  }

 private:
  char at(size_t ahead) const { return i_ + ahead < s_.size() ? s_[i_ + ahead] : '\0'; }
  bool slash_comments() const {
    return style_ == CommentStyle::kSlash || style_ == CommentStyle::kSlashAndHash;
  }
  bool hash_comments() const {
    return style_ == CommentStyle::kHash || style_ == CommentStyle::kSlashAndHash;
  }
  void skip_line() {
    while (i_ < s_.size() && s_[i_] != '\n') ++i_;
  }
  void emit(size_t start, size_t stop) {
    out_.emplace_back(s_.substr(start, stop - start));
    i_ = stop;
  }

  // Ordinary quotes end at the line; backticks may span lines. An unclosed
  // quote (e.g. a Rust lifetime) is lexed as punctuation.
  void quoted(char q) {
    size_t j = i_ + 1;
    while (j < s_.size()) {
      char c = s_[j];
      if (c == '\\') {
        j += 2;
        continue;
      }
      if (c == q) {
        emit(i_, j + 1);
        return;
      }
      if (c == '\n' && q != '`') break;
      ++j;
    }
    out_.emplace_back(1, q);
    ++i_;
  }

  std::string_view s_;
  CommentStyle style_;
  bool python_;
  size_t i_ = 0;
  std::vector<std::string> out_;
};

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::uint64_t kSeed = 0x6574686f7363616eULL;  // fixed across runs and platforms

}  // namespace

const ExtensionSet& default_source_extensions() {
  static const ExtensionSet kSet = {"c",  "h",  "cc", "cpp", "hpp", "java", "py",
                                    "js", "ts", "go", "rs",  "rb",  "php",  "cs",
                                    "kt", "swift", "scala", "m", "sh"};
  return kSet;
}

bool is_source_path(std::string_view path, const ExtensionSet& extensions) {
  return extensions.count(text::extension_of(path)) != 0;
}

TokenStream tokenize(std::string_view input, std::string_view extension) {
  std::string ext = text::to_lower_ascii(extension);
  std::string normalized = text::normalize_line_endings(input);
  TokenStream ts;
  CommentStyle style = comment_style(ext);
  if (style == CommentStyle::kNone) {
    std::string_view s = normalized;
    size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && space(s[i])) ++i;
      size_t start = i;
      while (i < s.size() && !space(s[i])) ++i;
      if (i > start) ts.tokens.emplace_back(s.substr(start, i - start));
    }
    return ts;
  }
  ts.tokens = CodeLexer(normalized, style, ext == "py").run();
  return ts;
}

std::uint64_t hash_gram(std::span<const std::string> gram) {
  std::uint64_t h = kFnvOffset ^ kSeed;
  for (const auto& token : gram) {
    for (unsigned char c : token) {
      h ^= c;
      h *= kFnvPrime;
    }
    h ^= 0x1f;
    h *= kFnvPrime;
  }
  return h;
}

FingerprintSet fingerprint(const TokenStream& tokens, size_t k, size_t winnow_window) {
  if (k == 0) throw Error(ErrorCode::kSimilarity, "gram length must be positive");
  FingerprintSet fp;
  fp.k = k;
  const auto& t = tokens.tokens;
  if (t.size() < k) return fp;
  std::vector<std::uint64_t> seq;
  seq.reserve(t.size() - k + 1);
  for (size_t i = 0; i + k <= t.size(); ++i) {
    seq.push_back(hash_gram(std::span<const std::string>(t.data() + i, k)));
  }
  if (winnow_window <= 1) {
    fp.hashes = std::move(seq);
  } else {
    // Rightmost minimum per window, each selected position recorded once.
    std::deque<size_t> window;
    size_t last = seq.size();
    for (size_t i = 0; i < seq.size(); ++i) {
      while (!window.empty() && seq[window.back()] >= seq[i]) window.pop_back();
      window.push_back(i);
      if (window.front() + winnow_window <= i) window.pop_front();
      if (i + 1 >= winnow_window || i + 1 == seq.size()) {
        if (window.front() != last) {
          last = window.front();
          fp.hashes.push_back(seq[last]);
        }
      }
    }
  }
  std::sort(fp.hashes.begin(), fp.hashes.end());
  return fp;
}

Overlap overlap(const FingerprintSet& needle, const FingerprintSet& hay) {
  if (needle.k != hay.k) {
    throw Error(ErrorCode::kSimilarity, "gram length mismatch: " + std::to_string(needle.k) +
                                            " vs " + std::to_string(hay.k));
  }
  if (needle.hashes.empty()) throw Error(ErrorCode::kSimilarity, "empty needle fingerprint");
  Overlap o;
  o.total = needle.hashes.size();
  auto a = needle.hashes.begin();
  auto b = hay.hashes.begin();
  while (a != needle.hashes.end() && b != hay.hashes.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++o.shared;
      ++a;
      ++b;
    }
  }
  return o;
}

double containment(const FingerprintSet& needle, const FingerprintSet& hay) {
  Overlap o = overlap(needle, hay);
  return static_cast<double>(o.shared) / static_cast<double>(o.total);
}

TreeComparison compare_trees(const RepositoryFacts& a, const RepositoryFacts& b,
                             const ExtensionSet& extensions) {
  auto collect = [&](const RepositoryFacts& r) {
    std::map<std::string, const FileContent*> out;
    for (const auto& f : r.files) {
      if (!is_source_path(f.path, extensions)) continue;
      if (!f.content) {
        throw Error(ErrorCode::kIncompleteTree,
                    r.owner + "/" + r.name + ": source file '" + f.path + "' has no content");
      }
      out[f.path] = &f;
    }
    return out;
  };
  auto left = collect(a);
  auto right = collect(b);
  TreeComparison result;
  result.source_files = left.size();
  for (auto li = left.begin(), ri = right.begin(); li != left.end() || ri != right.end();) {
    if (ri == right.end() || (li != left.end() && li->first < ri->first)) {
      result.first_difference = "only in " + a.owner + "/" + a.name + ": " + li->first;
      return result;
    }
    if (li == left.end() || ri->first < li->first) {
      result.first_difference = "only in " + b.owner + "/" + b.name + ": " + ri->first;
      return result;
    }
    if (text::normalize_line_endings(*li->second->content) !=
        text::normalize_line_endings(*ri->second->content)) {
      result.first_difference = "content differs: " + li->first;
      return result;
    }
    ++li;
    ++ri;
  }
  result.identical = true;
  return result;
}

bool repos_identical(const RepositoryFacts& a, const RepositoryFacts& b,
                     const ExtensionSet& extensions) {
  return compare_trees(a, b, extensions).identical;
}

}  // namespace ethoscan::similarity
