#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ethoscan/fact_model.hpp"

namespace ethoscan::links {

/// Stack Overflow links: `/questions/<id>[/slug][/<answer>][#<answer>]`
/// plus the short `/a/<id>` and `/q/<id>` forms.
const std::string& default_so_link_pattern();
/// Only the long `/questions/` form.
const std::string& strict_so_link_pattern();

/// Distinct regex matches in order of first appearance. Throws
/// Error(kUsage) for an invalid pattern.
std::vector<std::string> find_links(std::string_view text, const std::string& pattern);

/// Links to repository home pages (and deeper pages) on the code host.
std::vector<std::string> find_repo_links(std::string_view text);
/// Repository named by a code-host URL; nullopt for non-repository pages.
std::optional<RepoId> repo_of_link(std::string_view url);

/// Play Store listing links.
std::vector<std::string> find_store_links(std::string_view text);

/// Answer id addressed by a Stack Overflow link, when it names one.
std::optional<std::string> so_answer_id(std::string_view url);

/// Lower-cased host of an http(s) URL; empty when unparsable.
std::string host_of(std::string_view url);

struct UrlParts {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string target;  // path and query, fragment dropped
};
std::optional<UrlParts> split_url(std::string_view url);

}  // namespace ethoscan::links
