#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ethoscan/fact_model.hpp"

namespace ethoscan::similarity {

inline constexpr size_t kDefaultGramLength = 5;

/// Extensions treated as source code (lower case, no dot).
using ExtensionSet = std::set<std::string>;
const ExtensionSet& default_source_extensions();
bool is_source_path(std::string_view path, const ExtensionSet& extensions);

struct TokenStream {
  std::vector<std::string> tokens;
  std::optional<std::string> sourcePath;
};

/// Lexes `text` for the language implied by `extension`. Comments are dropped
/// for known languages; anything else ("txt") splits on whitespace.
TokenStream tokenize(std::string_view text, std::string_view extension);

struct FingerprintSet {
  size_t k = kDefaultGramLength;
  std::vector<std::uint64_t> hashes;  // sorted multiset

  friend bool operator==(const FingerprintSet&, const FingerprintSet&) = default;
};

/// FNV-1a over the gram's tokens with a fixed seed and a unit separator.
std::uint64_t hash_gram(std::span<const std::string> gram);

/// All k-gram hashes. A non-zero `winnow_window` keeps only the rightmost
/// minimum of every window of that many consecutive grams.
FingerprintSet fingerprint(const TokenStream& tokens, size_t k = kDefaultGramLength,
                           size_t winnow_window = 0);

struct Overlap {
  size_t shared = 0;  // |needle ∩ hay| as multisets
  size_t total = 0;   // |needle|
};

/// Throws Error(kSimilarity) for an empty needle or differing k.
Overlap overlap(const FingerprintSet& needle, const FingerprintSet& hay);
/// Fraction of the needle's grams found in the hay.
double containment(const FingerprintSet& needle, const FingerprintSet& hay);

struct TreeComparison {
  bool identical = false;
  size_t source_files = 0;  // files compared on each side
  std::optional<std::string> first_difference;
};

/// Compares the source-file trees of two repositories: same relative paths
/// and byte-equal content after line-ending normalization. Non-source files
/// are ignored. Throws Error(kIncompleteTree) when a source file has no
/// fetched content.
TreeComparison compare_trees(const RepositoryFacts& a, const RepositoryFacts& b,
                             const ExtensionSet& extensions = default_source_extensions());
bool repos_identical(const RepositoryFacts& a, const RepositoryFacts& b,
                     const ExtensionSet& extensions = default_source_extensions());

}  // namespace ethoscan::similarity
