#include "ethoscan/license.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ethoscan/errors.hpp"
#include "ethoscan/paths.hpp"
#include "ethoscan/text.hpp"

namespace ethoscan::license {
namespace {

bool name_in(std::string_view path, const std::vector<std::string>& names) {
  std::string base = text::to_lower_ascii(text::basename_of(path));
  return std::any_of(names.begin(), names.end(),
                     [&](const std::string& n) { return text::to_lower_ascii(n) == base; });
}

// First root-level file whose basename is in `names`, honouring the order of
// `names`.
const FileContent* root_file(const RepositoryFacts& repo, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    for (const auto& f : repo.files) {
      if (text::is_root_path(f.path) && text::to_lower_ascii(f.path) == text::to_lower_ascii(n)) {
        return &f;
      }
    }
  }
  return nullptr;
}

const FileContent* license_file_of(const RepositoryFacts& repo) {
  if (repo.licenseFile && text::is_root_path(repo.licenseFile->path)) return &*repo.licenseFile;
  return root_file(repo, license_file_names());
}

const FileContent* readme_of(const RepositoryFacts& repo) {
  if (repo.readmeFile && text::is_root_path(repo.readmeFile->path)) return &*repo.readmeFile;
  return root_file(repo, readme_file_names());
}

size_t phrase_weight(const LicenseEntry& e) {
  size_t w = 0;
  for (const auto& p : e.phrases) w += p.size();
  return w;
}

}  // namespace

LicenseCatalog LicenseCatalog::from_json(const nlohmann::json& j) {
  LicenseCatalog c;
  if (!j.is_object() || !j.contains("licenses") || !j["licenses"].is_array()) {
    throw Error(ErrorCode::kFormat, "license catalog: expected {\"licenses\": [...]}");
  }
  for (const auto& item : j["licenses"]) {
    LicenseEntry e;
    try {
      e.spdx = item.at("spdx").get<std::string>();
      e.name = item.at("name").get<std::string>();
      e.aliases = item.at("aliases").get<std::vector<std::string>>();
      e.phrases = item.at("phrases").get<std::vector<std::string>>();
      e.header = item.at("header").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kFormat, std::string("license catalog entry: ") + ex.what());
    }
    if (e.spdx.empty() || e.phrases.empty()) {
      throw Error(ErrorCode::kFormat, "license catalog entry without spdx id or phrases");
    }
    for (auto& p : e.phrases) p = text::to_lower_ascii(text::collapse_whitespace(p));
    c.entries_.push_back(std::move(e));
  }
  return c;
}

LicenseCatalog LicenseCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read license catalog " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

LicenseCatalog LicenseCatalog::load_default() { return load(data_dir() / "data" / "licenses.json"); }

const LicenseEntry* LicenseCatalog::find(std::string_view spdx) const {
  for (const auto& e : entries_) {
    if (e.spdx == spdx) return &e;
  }
  return nullptr;
}

const LicenseEntry* LicenseCatalog::match_text(std::string_view raw) const {
  std::string hay = text::to_lower_ascii(text::collapse_whitespace(raw));
  const LicenseEntry* best = nullptr;
  for (const auto& e : entries_) {
    bool all = std::all_of(e.phrases.begin(), e.phrases.end(),
                           [&](const std::string& p) { return hay.find(p) != std::string::npos; });
    if (all && (!best || phrase_weight(e) > phrase_weight(*best))) best = &e;
  }
  return best;
}

std::optional<LicenseCatalog::NameMatch> LicenseCatalog::match_name(std::string_view raw) const {
  std::string hay = text::collapse_whitespace(raw);
  std::optional<NameMatch> best;
  size_t best_pos = std::string::npos;
  for (const auto& e : entries_) {
    std::vector<std::string> names = e.aliases;
    names.push_back(e.spdx);
    for (const auto& n : names) {
      size_t pos = text::find_word_icase(hay, n);
      if (pos == std::string::npos) continue;
      if (!best || pos < best_pos || (pos == best_pos && n.size() > best->matched.size())) {
        best = NameMatch{&e, hay.substr(pos, n.size())};
        best_pos = pos;
      }
    }
  }
  return best;
}

const LicenseEntry* LicenseCatalog::identify(std::string_view text) const {
  if (const LicenseEntry* e = match_text(text)) return e;
  auto m = match_name(text);
  return m ? m->entry : nullptr;
}

std::string_view to_string(LicenseSource s) {
  return s == LicenseSource::kLicenseFile ? "licenseFile" : "readme";
}

const std::vector<std::string>& license_file_names() {
  static const std::vector<std::string> kNames = {"LICENSE", "LICENSE.md", "LICENSE.txt",
                                                  "COPYING", "COPYING.md"};
  return kNames;
}

bool is_license_file_name(std::string_view path) { return name_in(path, license_file_names()); }

const std::vector<std::string>& readme_file_names() {
  static const std::vector<std::string> kNames = {"README.md", "README", "README.txt",
                                                  "README.rst", "README.markdown"};
  return kNames;
}

bool is_readme_file_name(std::string_view path) { return name_in(path, readme_file_names()); }

const std::vector<std::string>& changelog_file_names() {
  static const std::vector<std::string> kNames = {"CHANGELOG.md", "CHANGELOG", "CHANGELOG.txt"};
  return kNames;
}

bool is_changelog_file_name(std::string_view path) { return name_in(path, changelog_file_names()); }

std::vector<std::string> license_search_paths(const RepositoryFacts& repo) {
  std::vector<std::string> out;
  if (const FileContent* f = license_file_of(repo)) out.push_back(f->path);
  if (const FileContent* f = readme_of(repo)) out.push_back(f->path);
  return out;
}

std::optional<LicenseInfo> detect_repo_license(const RepositoryFacts& repo,
                                               const LicenseCatalog& catalog) {
  if (const FileContent* f = license_file_of(repo)) {
    LicenseInfo info{"unknown", LicenseSource::kLicenseFile, "", f->path};
    std::string body = f->text();
    if (const LicenseEntry* e = catalog.match_text(body)) {
      info.spdxId = e->spdx;
      info.matchedName = e->name;
    } else if (auto m = catalog.match_name(body)) {
      info.spdxId = m->entry->spdx;
      info.matchedName = m->matched;
    }
    return info;
  }
  if (const FileContent* f = readme_of(repo)) {
    if (auto m = catalog.match_name(f->text())) {
      return LicenseInfo{m->entry->spdx, LicenseSource::kReadme, m->matched, f->path};
    }
  }
  return std::nullopt;
}

DiffSides split_diff(std::string_view diff) {
  DiffSides sides;
  for (const auto& line : text::split(text::normalize_line_endings(diff), '\n')) {
    if (line.rfind("+++ ", 0) == 0 || line.rfind("--- ", 0) == 0) continue;
    if (!line.empty() && line[0] == '+') sides.added += line.substr(1) + "\n";
    if (!line.empty() && line[0] == '-') sides.removed += line.substr(1) + "\n";
  }
  return sides;
}

std::vector<LicenseChangeEvent> extract_license_changes(const RepositoryFacts& repo,
                                                        const LicenseCatalog& catalog) {
  std::vector<LicenseChangeEvent> events;
  std::string current;
  for (size_t i = 0; i < repo.licenseCommits.size(); ++i) {
    const CommitInfo& c = repo.licenseCommits[i];
    if (!c.codeChange) {
      throw Error(ErrorCode::kMissingDiff, repo.owner + "/" + repo.name + ": commit " + c.sha +
                                               " has no diff text");
    }
    DiffSides sides = split_diff(*c.codeChange);
    const LicenseEntry* added = catalog.identify(sides.added);
    if (i == 0) {
      // Initial creation establishes the starting license.
      if (added) current = added->spdx;
      continue;
    }
    const LicenseEntry* removed = catalog.identify(sides.removed);
    std::string from = removed ? removed->spdx : current;
    if (added && !from.empty() && added->spdx != from) {
      events.push_back({c, from, added->spdx});
    }
    if (added) current = added->spdx;
  }
  return events;
}

}  // namespace ethoscan::license
