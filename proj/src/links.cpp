#include "ethoscan/links.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <regex>
#include <set>

#include "ethoscan/errors.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::links {
namespace {

const std::regex& compiled(const std::string& pattern) {
  static std::mutex mu;
  static std::map<std::string, std::regex> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(pattern);
  if (it == cache.end()) {
    try {
      it = cache.emplace(pattern, std::regex(pattern, std::regex::ECMAScript)).first;
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::kUsage, "invalid link pattern '" + pattern + "': " + e.what());
    }
  }
  return it->second;
}

std::string trim_trailing_punct(std::string s) {
  while (!s.empty() && std::string_view(".,;:!?").find(s.back()) != std::string_view::npos) {
    s.pop_back();
  }
  return s;
}

std::vector<std::string> distinct_matches(std::string_view text, const std::regex& re,
                                          bool trim) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator();
       ++it) {
    std::string m = it->str();
    if (trim) m = trim_trailing_punct(m);
    if (!m.empty() && seen.insert(m).second) out.push_back(m);
  }
  return out;
}

const std::set<std::string, std::less<>>& reserved_owners() {
  static const std::set<std::string, std::less<>> kNames = {
      "about", "apps", "collections", "contact", "customer-stories", "enterprise", "explore",
      "features", "login", "marketplace", "notifications", "orgs", "pricing", "pulls",
      "search", "settings", "site", "sponsors", "topics", "trending", "users"};
  return kNames;
}

}  // namespace

const std::string& default_so_link_pattern() {
  static const std::string kPattern =
      R"(https?://(?:www\.)?stackoverflow\.com/(?:questions/\d+(?:/[A-Za-z0-9_%-]+)*(?:#\d+)?|[aq]/\d+(?:/\d+)?))";
  return kPattern;
}

const std::string& strict_so_link_pattern() {
  static const std::string kPattern =
      R"(https?://(?:www\.)?stackoverflow\.com/questions/\d+(?:/[A-Za-z0-9_%-]+)*(?:#\d+)?)";
  return kPattern;
}

std::vector<std::string> find_links(std::string_view text, const std::string& pattern) {
  return distinct_matches(text, compiled(pattern), false);
}

std::vector<std::string> find_repo_links(std::string_view text) {
  static const std::regex re(
      R"(https?://(?:www\.)?github\.com/[A-Za-z0-9][A-Za-z0-9-]*/[A-Za-z0-9._-]+(?:/[^\s<>"'()\[\]]*)?)");
  std::vector<std::string> out;
  for (auto& link : distinct_matches(text, re, true)) {
    if (repo_of_link(link)) out.push_back(std::move(link));
  }
  return out;
}

std::optional<RepoId> repo_of_link(std::string_view url) {
  static const std::regex re(
      R"(^https?://(?:www\.)?github\.com/([A-Za-z0-9][A-Za-z0-9-]*)/([A-Za-z0-9._-]+))");
  std::string s(url);
  std::smatch m;
  if (!std::regex_search(s, m, re)) return std::nullopt;
  std::string owner = m[1].str();
  std::string name = m[2].str();
  if (name.size() > 4 && name.ends_with(".git")) name.resize(name.size() - 4);
  if (reserved_owners().count(text::to_lower_ascii(owner)) || name == "." || name == "..") {
    return std::nullopt;
  }
  return RepoId{owner, name};
}

std::vector<std::string> find_store_links(std::string_view text) {
  static const std::regex re(
      R"(https?://play\.google\.com/store/apps/details\?id=[A-Za-z0-9._]+(?:&[^\s<>"'()\[\]]*)?)");
  return distinct_matches(text, re, true);
}

std::optional<std::string> so_answer_id(std::string_view url) {
  static const std::regex fragment(R"(#(\d+)$)");
  static const std::regex short_answer(R"(stackoverflow\.com/a/(\d+))");
  static const std::regex long_answer(R"(stackoverflow\.com/questions/\d+/[^/#]+/(\d+))");
  std::string s(url);
  std::smatch m;
  if (std::regex_search(s, m, fragment)) return m[1].str();
  if (std::regex_search(s, m, short_answer)) return m[1].str();
  if (std::regex_search(s, m, long_answer)) return m[1].str();
  return std::nullopt;
}

std::optional<UrlParts> split_url(std::string_view url) {
  UrlParts p;
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  p.scheme = text::to_lower_ascii(url.substr(0, scheme_end));
  if (p.scheme != "http" && p.scheme != "https") return std::nullopt;
  std::string_view rest = url.substr(scheme_end + 3);
  size_t path_start = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, path_start);
  if (authority.find('@') != std::string_view::npos) return std::nullopt;
  size_t colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    std::string port(authority.substr(colon + 1));
    if (port.empty() || !std::all_of(port.begin(), port.end(), ::isdigit) || port.size() > 5) {
      return std::nullopt;
    }
    p.port = std::stoi(port);
    authority = authority.substr(0, colon);
  } else {
    p.port = p.scheme == "https" ? 443 : 80;
  }
  if (authority.empty()) return std::nullopt;
  p.host = text::to_lower_ascii(authority);
  std::string_view target =
      path_start == std::string_view::npos ? std::string_view() : rest.substr(path_start);
  target = target.substr(0, target.find('#'));
  p.target = target.empty() || target[0] != '/' ? "/" + std::string(target) : std::string(target);
  return p;
}

std::string host_of(std::string_view url) {
  auto p = split_url(url);
  return p ? p->host : std::string();
}

}  // namespace ethoscan::links
