#!/usr/bin/env python3
"""Regenerates the offline fixture corpus.

Each case directory holds one or two snapshot files, a case.json with the
expected violation count per detector, and a README describing the scenario.
Run from anywhere: python3 fixtures/generate.py
"""

import copy
import json
import os
import shutil

ROOT = os.path.dirname(os.path.abspath(__file__))
LICENSES = json.load(open(os.path.join(ROOT, "..", "data", "licenses.json")))["licenses"]
EVAL_DATE = "2022-01-01"
CAPTURED = "2022-01-01T00:00:00Z"


def header(spdx):
    for e in LICENSES:
        if e["spdx"] == spdx:
            return e["header"]
    raise KeyError(spdx)


def file(path, content):
    if content is None:
        return {"path": path, "content": None, "contentCount": 0}
    return {"path": path, "content": content, "contentCount": len(content.encode("utf-8"))}


def repo(owner, name, files=(), contributors=(), is_fork=False, parent=None, forks=(),
         release=None, license_commits=(), links=()):
    files = [file(p, c) for p, c in files]
    by_name = {f["path"].lower(): f for f in files if "/" not in f["path"]}

    def pick(names):
        for n in names:
            if n.lower() in by_name:
                return by_name[n.lower()]
        return None

    return {
        "owner": owner,
        "name": name,
        "isFork": is_fork,
        "parentFullName": parent,
        "forkList": list(forks),
        "fileCount": len(files),
        "files": files,
        "licenseFile": pick(["LICENSE", "LICENSE.md", "LICENSE.txt", "COPYING", "COPYING.md"]),
        "readmeFile": pick(["README.md", "README", "README.txt", "README.rst", "README.markdown"]),
        "changelogFile": pick(["CHANGELOG.md", "CHANGELOG", "CHANGELOG.txt"]),
        "contributors": sorted(contributors),
        "latestRelease": {"tag": release[0], "publishedDate": release[1]} if release else None,
        "licenseCommits": list(license_commits),
        "externalLinks": list(links),
    }


def issue(repo_full, number, owner, posts, kind="issue"):
    return {
        "repo": repo_full,
        "number": number,
        "kind": kind,
        "owner": owner,
        "bodyAndComments": [{"author": a, "text": t} for a, t in posts],
        "linkedCommits": [],
    }


def snapshot(r, issues=(), related=(), pages=None, scope="both"):
    return {
        "formatVersion": 1,
        "capturedAt": CAPTURED,
        "scope": scope,
        "repo": r,
        "issues": list(issues),
        "relatedRepos": list(related),
        "externalPages": dict(pages or {}),
    }


def diff(removed, added, path="LICENSE"):
    lines = ["--- a/" + path, "+++ b/" + path,
             "@@ -1,%d +1,%d @@" % (len(removed.splitlines()), len(added.splitlines()))]
    lines += ["-" + l for l in removed.splitlines()]
    lines += ["+" + l for l in added.splitlines()]
    return "\n".join(lines) + "\n"


def commit(sha, ts, change, prs=0):
    return {"sha": sha, "timestamp": ts, "codeChange": change, "pullRequestCount": prs}


CASES = []


def case(name, snapshots, expected, readme, options=None, issue_no=None, fp_class=None):
    CASES.append(dict(name=name, snapshots=snapshots, expected=expected, readme=readme,
                      options=options or {"date": EVAL_DATE}, issue=issue_no, fpClass=fp_class,
                      falsifies=FALSIFIES.get(name, [])))


# Conditions each negative case breaks, keyed by case name.
FALSIFIES = {
    "s1_poster_owns_answer": ["S1.poster_is_not_answer_owner"],
    "s1_low_similarity": ["S1.code_is_copied"],
    "s1_link_in_file": ["S1.link_missing_from_code"],
    "s2_one_token_differs": ["S2.identical_contents"],
    "s2_registered_fork_parent": ["S2.not_official_fork"],
    "s2_registered_fork_list": ["S2.not_official_fork"],
    "s2_reverse_fork": ["S2.not_official_fork"],
    "s5_root_license": ["S5.no_root_license_file"],
    "s5_readme_license": ["S5.no_license_in_readme"],
    "s6_initial_commit_only": ["S6.license_changed"],
    "s6_announced_in_changelog": ["S6.not_in_changelog"],
    "s6_via_pull_request": ["S6.not_via_pull_request"],
    "s8_links_own_repository": ["S8.links_other_repository", "S8.opener_outside_project"],
    "s8_opener_is_contributor": ["S8.opener_outside_project"],
    "s8_opener_not_in_linked_repo": ["S8.opener_contributes_to_link"],
    "s9_fresh_release": ["S9.release_is_stale"],
    "s9_fork": ["S9.original_repository"],
    "s9_no_store_link": ["S9.store_listing"],
    "s9_no_paid_marker": ["S9.paid_features"],
}


# --- shared material -------------------------------------------------------

APP_JS = """import { render } from './view';

export function start(root) {
  const state = { items: [], filter: 'all' };
  render(root, state);
  return state;
}

export function addItem(state, text) {
  state.items.push({ text, done: false });
  return state.items.length;
}
"""

DEBOUNCE = """function debounce(fn, wait) {
  let timer = null;
  return function (...args) {
    clearTimeout(timer);
    timer = setTimeout(() => fn.apply(this, args), wait);
  };
}"""

THROTTLE = """function throttle(fn, limit) {
  let waiting = false;
  return function (...args) {
    if (waiting) return;
    fn.apply(this, args);
    waiting = true;
    setTimeout(() => { waiting = false; }, limit);
  };
}"""

ONCE = """function once(fn) {
  let called = false, result;
  return function (...args) {
    if (!called) { called = true; result = fn.apply(this, args); }
    return result;
  };
}"""

ANSWER_CODE = DEBOUNCE + "\n\n" + THROTTLE + "\n\n" + ONCE

SO_LONG = "https://stackoverflow.com/questions/24004791/what-is-the-debounce-function-in-javascript/24004942#24004942"
SO_SHORT = "https://stackoverflow.com/a/24004942"


def html_escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def so_page(answer_code, owner, answer_id="24004942"):
    return (
        "<!DOCTYPE html><html><head><title>What is the debounce function in JavaScript?</title></head><body>\n"
        "<div id=\"question\" class=\"question\" data-questionid=\"24004791\">\n"
        "<div class=\"s-prose js-post-body\"><p>I see <code>debounce</code> everywhere. What does it do?</p></div>\n"
        "<div class=\"post-signature owner\"><div class=\"user-details\"><a href=\"/users/1/curious-asker\">curious-asker</a></div></div>\n"
        "</div>\n"
        "<div id=\"answer-" + answer_id + "\" class=\"answer accepted-answer\" data-answerid=\"" + answer_id + "\">\n"
        "<div class=\"s-prose js-post-body\"><p>Here are the usual helpers:</p>\n"
        "<pre class=\"lang-js s-code-block\"><code class=\"hljs language-javascript\">"
        + html_escape(answer_code) +
        "</code></pre></div>\n"
        "<div class=\"post-signature\"><div class=\"user-action-time\">answered Jun 2, 2014</div>\n"
        "<div class=\"user-details\" itemprop=\"author\"><a href=\"/users/99/" + owner.replace(" ", "-").lower()
        + "\">" + owner + "</a><div class=\"-flair\">12,345</div></div></div>\n"
        "</div>\n"
        "<div id=\"answer-1\" class=\"answer\"><div class=\"s-prose js-post-body\"><p>Just use lodash.</p></div>"
        "<div class=\"post-signature\"><div class=\"user-details\"><a href=\"/users/5/other\">other</a></div></div></div>\n"
        "</body></html>\n")


def s1_snapshot(util_js, poster="alice", owner="so-helper", link=SO_LONG, comment=None,
                page_key=None, page=True):
    r = repo("acme", "widget",
             files=[("README.md", "# widget\nLicensed under MIT.\n"),
                    ("src/app.js", APP_JS),
                    ("src/util.js", util_js)],
             contributors=["maintainer", poster])
    text = comment or ("Added the helper from " + link + " to src/util.js so typing in the "
                       "search box no longer floods the API.")
    i = issue("acme/widget", 7, poster, [(poster, "Search box sends a request per keystroke."),
                                         (poster, text)], kind="pullRequest")
    pages = {}
    if page:
        pages[page_key or link] = so_page(ANSWER_CODE, owner)
    else:
        pages[page_key or link] = None
    return snapshot(r, [i], pages=pages)


UTIL_PREFIX = """// small helpers shared by the views
export const clamp = (v, lo, hi) => Math.min(hi, Math.max(lo, v));

"""
UTIL_PLANTED = UTIL_PREFIX + DEBOUNCE + "\n\nexport { debounce };\n"

# --- S1 --------------------------------------------------------------------

case("s1_all_conditions", [s1_snapshot(UTIL_PLANTED)], {"S1": 1},
     "A pull request comment by `alice` links a Stack Overflow answer owned by\n"
     "`so-helper`. One of the answer's three helpers is pasted into `src/util.js`\n"
     "(about a third of the answer's grams) and the file does not mention the link.\n"
     "All three conditions hold, so one violation is expected.", issue_no=None)

case("s1_poster_owns_answer", [s1_snapshot(UTIL_PLANTED, poster="so-helper")], {"S1": 0},
     "Same as `s1_all_conditions`, but the comment author is the answer owner.\n"
     "Condition 1 (poster is not the answer owner) fails, so nothing is reported.")

UTIL_LOW = UTIL_PREFIX + """export function cancel(timer) {
  clearTimeout(timer);
}
"""
case("s1_low_similarity", [s1_snapshot(UTIL_LOW)], {"S1": 0},
     "The file shares only a single statement with the answer, far below the 10%\n"
     "containment threshold. Condition 2 fails, so nothing is reported.")

UTIL_CITED = UTIL_PREFIX + "// from " + SO_LONG + "\n" + DEBOUNCE + "\n\nexport { debounce };\n"
case("s1_link_in_file", [s1_snapshot(UTIL_CITED)], {"S1": 0},
     "The copied helper is preceded by a comment containing the exact link from the\n"
     "pull request. Condition 3 (link absent from the file) fails.")

UTIL_GENERIC = """export function total(items) {
  let sum = 0;
  for (let i = 0; i < items.length; i++) {
    sum += items[i].price;
  }
  return sum;
}
"""
GENERIC_ANSWER = """for (let i = 0; i < items.length; i++) {
  console.log(items[i]);
}"""


def s1_reference_only():
    s = s1_snapshot(UTIL_GENERIC,
                    comment="Background reading on loops: " + SO_LONG + " (no code taken from it).")
    s["externalPages"][SO_LONG] = so_page(GENERIC_ANSWER, "so-helper")
    return s


case("s1_fp_reference_only", [s1_reference_only()], {"S1": 1},
     "The link is only cited as background reading; the answer shows a generic\n"
     "counting loop which the repository happens to contain as well. The tool still\n"
     "reports it because the loop overlaps well above 10%. Known false positive:\n"
     "no actual copying occurred, the link was a reference.",
     fp_class="S1: no actual copying, the link is only a reference")

UTIL_SHORT_CITE = UTIL_PREFIX + "// from " + SO_SHORT + "\n" + DEBOUNCE + "\n\nexport { debounce };\n"
case("s1_fp_short_link_citation", [s1_snapshot(UTIL_SHORT_CITE)], {"S1": 1},
     "The copied code credits the answer with the short `/a/<id>` form while the\n"
     "comment used the long `/questions/...` link. Only the exact link text counts\n"
     "as attribution, so the tool reports it. Known false positive: citation via a\n"
     "short link.",
     fp_class="S1: citation uses the short link form")

case("s1_fp_username_mismatch", [s1_snapshot(UTIL_PLANTED, poster="devinrhode2", owner="Devin Rhode")],
     {"S1": 1},
     "The code host login `devinrhode2` and the Stack Overflow display name\n"
     "`Devin Rhode` belong to the same person, but names are compared exactly, so the\n"
     "tool reports it. Known false positive: same author under different names.",
     fp_class="S1: same person with different user names")

case("s1_short_link_default", [s1_snapshot(UTIL_PLANTED, link=SO_SHORT)], {"S1": 1},
     "The comment uses the short `/a/<id>` link. The default link pattern accepts\n"
     "short links, so the copy is detected.")

case("s1_short_link_strict", [s1_snapshot(UTIL_PLANTED, link=SO_SHORT)], {"S1": 0},
     "Same input as `s1_short_link_default`, run with the strict link pattern that\n"
     "only accepts `/questions/` links. The short link is not extracted, so nothing\n"
     "is reported (the stricter historical behavior).",
     options={"date": EVAL_DATE, "strictSoLinks": True})

case("s1_page_unavailable", [s1_snapshot(UTIL_PLANTED, page=False)], {"S1": 0},
     "The cached answer page is marked unavailable. The link cannot be evaluated,\n"
     "which yields a diagnostic rather than a violation.")

# --- S2 --------------------------------------------------------------------

MAIN_C = """#include <stdio.h>
#include "util.h"

int main(int argc, char **argv) {
  for (int i = 1; i < argc; i++) {
    printf("%s -> %d\\n", argv[i], word_count(argv[i]));
  }
  return 0;
}
"""
UTIL_C = """#include <ctype.h>
#include "util.h"

/* counts whitespace separated words */
int word_count(const char *s) {
  int n = 0, in = 0;
  for (; *s; s++) {
    if (isspace((unsigned char)*s)) in = 0;
    else if (!in) { in = 1; n++; }
  }
  return n;
}
"""
UTIL_H = """#ifndef UTIL_H
#define UTIL_H
int word_count(const char *s);
#endif
"""


def c_files(readme="# wc\nCounts words.\n", util=UTIL_C):
    return [("README.md", readme), ("src/main.c", MAIN_C), ("src/util.c", util), ("src/util.h", UTIL_H)]


def s2_pair(a_kw=None, b_kw=None, b_files=None, a_files=None):
    a = repo("origin-dev", "wordcount", files=a_files or c_files(), contributors=["origin-dev"],
             **(a_kw or {}))
    b = repo("copycat", "wc-tool", files=b_files or c_files(), contributors=["copycat"],
             **(b_kw or {}))
    return [snapshot(a, scope="repoLevel"), snapshot(b, scope="repoLevel")]


case("s2_all_conditions", s2_pair(), {"S2": 1},
     "Two repositories with byte-identical source files and no fork relation in\n"
     "either direction. Both conditions hold: one violation.")
case("s2_one_token_differs", s2_pair(b_files=c_files(util=UTIL_C.replace("n++", "n += 1"))),
     {"S2": 0},
     "One source file differs by a single token. Similarity is not 100%, so\n"
     "condition 1 fails.")
case("s2_registered_fork_parent", s2_pair(b_kw={"is_fork": True, "parent": "origin-dev/wordcount"}),
     {"S2": 0},
     "Identical trees, but the second repository names the first as its parent.\n"
     "It is an official fork, so condition 2 fails.")
case("s2_registered_fork_list", s2_pair(a_kw={"forks": ["copycat/wc-tool"]}), {"S2": 0},
     "Identical trees, and the first repository's fork list contains the second.\n"
     "Condition 2 fails.")
case("s2_reverse_fork", s2_pair(a_kw={"is_fork": True, "parent": "copycat/wc-tool"}), {"S2": 0},
     "The pair is given fork first: the primary repository is the registered fork\n"
     "of the second. This is an official fork seen from the other side, so nothing\n"
     "is reported.")
case("s2_readme_only_difference", s2_pair(b_files=c_files(readme="# wc-tool\nMy word counter.\n")),
     {"S2": 1},
     "Only the README differs. Non-source files are not compared, so the source\n"
     "trees are identical and the copy is reported.")
case("s2_no_source_files",
     s2_pair(a_files=[("README.md", "# notes\n")], b_files=[("README.md", "# notes\n")]), {"S2": 0},
     "Neither repository contains source files. There is nothing to copy, so no\n"
     "soft fork is reported.")

# --- S5 --------------------------------------------------------------------

PY_MAIN = "import sys\n\n\ndef main():\n    print(' '.join(sys.argv[1:]))\n\n\nif __name__ == '__main__':\n    main()\n"


def s5_snapshot(files, name="tool", scope="both"):
    return snapshot(repo("student", name, files=files, contributors=["student"]), scope=scope)


case("s5_missing", [s5_snapshot([("README.md", "# tool\nA small command line tool.\n"),
                                 ("tool.py", PY_MAIN)], scope="repoLevel")],
     {"S5": 1},
     "No LICENSE file and a README without any license name. One violation.")
case("s5_readme_without_license_name",
     [s5_snapshot([("README.md", "# tool\n\n## License\n\nTo be decided.\n"), ("tool.py", PY_MAIN)])],
     {"S5": 1},
     "The README has a License heading but names no license. One violation.")
case("s5_root_license", [s5_snapshot([("LICENSE", header("MIT")), ("README.md", "# tool\n"),
                                      ("tool.py", PY_MAIN)])],
     {"S5": 0}, "A root LICENSE file with the MIT text. No violation.")
case("s5_readme_license",
     [s5_snapshot([("README.md", "# tool\n\nLicensed under Apache-2.0.\n"), ("tool.py", PY_MAIN)])],
     {"S5": 0}, "No LICENSE file, but the README says it is licensed under Apache-2.0.")
case("s5_fp_inner_license",
     [s5_snapshot([("README.md", "# tool\n"), ("docs/LICENSE", header("MIT")), ("tool.py", PY_MAIN)])],
     {"S5": 1},
     "The license file lives in `docs/`. Only the repository root is searched, so\n"
     "the tool reports it. Known false positive: license file not in the main\n"
     "directory.", fp_class="S5: license file outside the main directory")
case("s5_fp_readme_disclaimer",
     [s5_snapshot([("README.md", "# notes\n\nThis repository is for personal study and research "
                   "purposes only. Please DO NOT USE IT FOR COMMERCIAL PURPOSES.\n"),
                   ("tool.py", PY_MAIN)])],
     {"S5": 1},
     "The README carries a usage disclaimer instead of a license. The tool reports\n"
     "it. Known false positive: disclaimer in the README.",
     fp_class="S5: disclaimer in the README")
case("s5_fp_education",
     [s5_snapshot([("README.md", "# CS 101 exercises\n\nWeekly lab solutions for the introductory "
                   "course at Springfield High School.\n"), ("lab1.py", PY_MAIN)], name="cs101-labs")],
     {"S5": 1},
     "Course material for a school class, where a license is not expected. The\n"
     "tool reports it. Known false positive: education repository.",
     fp_class="S5: repository used for education")
case("s5_fp_no_source",
     [s5_snapshot([("README.md", "# reading list\n\nPapers I want to read.\n")], name="reading-list")],
     {"S5": 1},
     "The repository contains no source code or data, only a README. The tool\n"
     "reports it. Known false positive: nothing to license.",
     fp_class="S5: no source code or data")
case("s5_fp_org_license",
     [s5_snapshot([("README.md", "# tool\n\nPart of the Acme platform. Usage is governed by the "
                   "organization-wide terms.\n"), ("tool.py", PY_MAIN)])],
     {"S5": 1},
     "The repository relies on a license defined at organization level, which a\n"
     "single-repository snapshot cannot see. Known false positive: organization\n"
     "license.", fp_class="S5: organization-level license")

# --- S6 --------------------------------------------------------------------

APACHE = header("Apache-2.0")
GPL3 = header("GPL-3.0")


def s6_snapshot(commits, changelog=None):
    files = [("LICENSE", GPL3 if len(commits) % 2 == 0 else APACHE), ("README.md", "# lib\n"),
             ("lib.py", PY_MAIN)]
    if changelog is not None:
        files.append(("CHANGELOG.md", changelog))
    return snapshot(repo("acme", "lib", files=files, contributors=["maintainer"],
                         license_commits=commits))


C_CREATE = commit("a1b2c3d", "2021-02-10T09:00:00Z", diff("", APACHE))
C_SWITCH = commit("b2c3d4e", "2021-02-17T09:00:00Z", diff(APACHE, GPL3))
C_SWITCH_PR = commit("b2c3d4e", "2021-02-17T09:00:00Z", diff(APACHE, GPL3), prs=1)
C_RESTORE = commit("c3d4e5f", "2021-02-18T09:00:00Z", diff(GPL3, APACHE))

case("s6_all_conditions", [s6_snapshot([C_CREATE, C_SWITCH])], {"S6": 1},
     "The license file moves from Apache-2.0 to GPL-3.0 in a direct commit, with no\n"
     "changelog. Not announced and not via pull request: one violation.")
case("s6_announced_in_changelog",
     [s6_snapshot([C_CREATE, C_SWITCH], changelog="# Changelog\n\n## 2.0.0\n- Relicensed under GPL-3.0.\n")],
     {"S6": 0}, "The CHANGELOG mentions GPL-3.0, so the change was announced.")
case("s6_via_pull_request", [s6_snapshot([C_CREATE, C_SWITCH_PR])], {"S6": 0},
     "The switching commit belongs to one pull request, so the change was made in\n"
     "the open.")
case("s6_initial_commit_only", [s6_snapshot([C_CREATE])], {"S6": 0},
     "Only the commit that created the license exists. Creation is not a change.")
case("s6_fp_restored_license", [s6_snapshot([C_CREATE, C_SWITCH, C_RESTORE])], {"S6": 2},
     "Apache-2.0 becomes GPL-3.0 and is restored to Apache-2.0 one day later. Both\n"
     "changes are reported; the second carries `restores_previous_license`. Known\n"
     "false positive: restoring the old license is not a real change.",
     fp_class="S6: repository restored its previous license")

# --- S8 --------------------------------------------------------------------

PROMO = "https://github.com/promo-dev/fastcolors"


def s8_snapshot(body, opener="promo-dev", r1_contributors=("maintainer",), r2_contributors=("promo-dev",),
                extra_issues=(), related=True, r2_name="fastcolors"):
    r = repo("acme", "widget", files=[("README.md", "# widget\nLicensed under MIT.\n"), ("src/app.js", APP_JS)],
             contributors=r1_contributors)
    issues = [issue("acme/widget", 12, opener, [(opener, body)], kind="pullRequest")] + list(extra_issues)
    rel = [repo("promo-dev", r2_name, contributors=r2_contributors)] if related else []
    return snapshot(r, issues, related=rel)


case("s8_all_conditions",
     [s8_snapshot("Replace the color helpers with " + PROMO + ", it is 2x faster and has no dependencies.")],
     {"S8": 1},
     "An outsider opens a pull request that links a repository they contribute to.\n"
     "All three conditions hold: one violation.")
case("s8_links_own_repository",
     [s8_snapshot("See https://github.com/acme/widget for the current helpers.")], {"S8": 0},
     "The only link points back at the repository itself (r1 is r2). Condition 1\n"
     "fails. Because the opener would have to both contribute and not contribute to\n"
     "the same repository, this case necessarily falsifies more than one condition.")
case("s8_opener_is_contributor",
     [s8_snapshot("Replace the color helpers with " + PROMO + ".", r1_contributors=("maintainer", "promo-dev"))],
     {"S8": 0}, "The opener already contributes to the target repository. Condition 2 fails.")
case("s8_opener_not_in_linked_repo",
     [s8_snapshot("Replace the color helpers with " + PROMO + ".", r2_contributors=("someone-else",))],
     {"S8": 0}, "The opener does not contribute to the linked repository. Condition 3 fails.")

EXCLUDED_LINKS = [PROMO + "/issues/3", PROMO + "/pull/5", PROMO + "/commit/0a1b2c3",
                  PROMO + "/tree/main/src", PROMO + "/releases/tag/v1.0.0",
                  PROMO + "/blob/main/README.md", PROMO + "/actions/runs/42"]
case("s8_excluded_segments",
     [s8_snapshot("Same crash as " + EXCLUDED_LINKS[0] + ".",
                  extra_issues=[issue("acme/widget", 20 + i, "promo-dev",
                                      [("promo-dev", "Demo of the problem: " + l)])
                                for i, l in enumerate(EXCLUDED_LINKS[1:])])],
     {"S8": 0},
     "Seven issues by an outsider, each linking a page of their own repository\n"
     "whose URL contains one excluded segment (`/issues/`, `/pull/`, `/commit/`,\n"
     "`/tree/`, `/releases/`, `/blob/`, `/runs/`). Such links are demonstrations, so\n"
     "nothing is reported.")
case("s8_fp_disclosed_affiliation",
     [s8_snapshot("I am working on a project called fastcolors (" + PROMO + ") and hit the same "
                  "rounding problem, here is how I solved it.")],
     {"S8": 1},
     "The opener openly says the linked project is theirs. Prose is not analyzed,\n"
     "so the tool reports it. Known false positive: affiliation disclosed.",
     fp_class="S8: opener mentioned being a contributor of the linked repository")
case("s8_fp_asking_for_suggestion",
     [s8_snapshot("I'd like to try your widget module in a non-widget repo (https://github.com/promo-dev/colorlab). "
                  "Any advice?", r2_name="colorlab")],
     {"S8": 1},
     "The opener asks how to use the target project inside their own repository.\n"
     "The tool reports it. Known false positive: asking for a suggestion.",
     fp_class="S8: opener asks for advice on using r1 in r2")
case("s8_unresolved_repository",
     [s8_snapshot("Replace the color helpers with " + PROMO + ".", related=False)], {"S8": 0},
     "The linked repository is not part of the snapshot. The check cannot be\n"
     "evaluated and yields a diagnostic instead of a violation.")

# --- S9 --------------------------------------------------------------------

STORE = "https://play.google.com/store/apps/details?id=com.acme.pocket"
STORE_PAGE = ("<html><head><title>Pocket Budget - Apps on Google Play</title></head><body>"
              "<h1>Pocket Budget</h1><div>Acme Apps</div><div>Contains ads</div>"
              "<div>In-app purchases</div><p>Track spending on the go.</p></body></html>\n")
FREE_PAGE = ("<html><head><title>Pocket Budget - Apps on Google Play</title></head><body>"
             "<h1>Pocket Budget</h1><div>Acme Apps</div><p>Free and open source.</p></body></html>\n")
KOTLIN = "package com.acme.pocket\n\nfun main() {\n    println(\"pocket\")\n}\n"


def s9_snapshot(release=("v1.4.0", "2021-05-01"), is_fork=False, links=(STORE,), page=STORE_PAGE,
                name="pocket-budget", readme="# Pocket Budget\nLicensed under GPL-3.0.\n"):
    r = repo("acme", name, files=[("README.md", readme), ("app/src/main/Main.kt", KOTLIN)],
             contributors=["maintainer"], is_fork=is_fork,
             parent="upstream/pocket-budget" if is_fork else None, release=release, links=links)
    pages = {}
    for l in list(links) + ([STORE] if STORE in readme else []):
        pages[l] = page
    return snapshot(r, pages=pages)


case("s9_all_conditions", [s9_snapshot()], {"S9": 1},
     "Latest release 245 days before the evaluation date, original repository, a\n"
     "Play Store link whose listing mentions in-app purchases. One violation.")
case("s9_fresh_release", [s9_snapshot(release=("v2.0.0", "2021-12-02"))], {"S9": 0},
     "The latest release is 30 days old, so the project is maintained.")
case("s9_fork", [s9_snapshot(is_fork=True)], {"S9": 0},
     "The repository is a fork, not the original project.")
case("s9_no_store_link", [s9_snapshot(links=())], {"S9": 0},
     "No store listing is linked from the metadata or README.")
case("s9_no_paid_marker", [s9_snapshot(page=FREE_PAGE)], {"S9": 0},
     "The listing does not mention in-app purchases.")
case("s9_no_release", [s9_snapshot(release=None)], {"S9": 0},
     "The repository has never published a release, so staleness is undefined and\n"
     "nothing is reported.")
case("s9_page_unavailable", [s9_snapshot(page=None)], {"S9": 0},
     "The listing page is marked unavailable. A diagnostic replaces the verdict.")
case("s9_fp_library_of_app",
     [s9_snapshot(links=(), name="pocket-sdk",
                  readme="# pocket-sdk\nLibrary used by the Pocket Budget app: " + STORE + "\n")],
     {"S9": 1},
     "A stale library repository whose README links the app that uses it. The app\n"
     "itself is maintained elsewhere, but the tool reports the library. Known false\n"
     "positive: the unmaintained project is a library of a maintained app.",
     fp_class="S9: unmaintained library of an actively maintained app")

# --- whole-input cases -------------------------------------------------------


def clean_snapshot():
    r = repo("acme", "tidy", files=[("LICENSE", header("MIT")), ("README.md", "# tidy\n"),
                                    ("src/tidy.py", PY_MAIN)],
             contributors=["maintainer", "helper"], release=("v1.0.0", "2021-12-01"),
             license_commits=[commit("d4e5f6a", "2021-01-05T10:00:00Z", diff("", header("MIT")))])
    issues = [issue("acme/tidy", 1, "helper", [("helper", "Typo in the usage text."),
                                               ("maintainer", "Fixed, thanks!")]),
              issue("acme/tidy", 2, "helper", [("helper", "Fix the typo, see https://github.com/acme/tidy/issues/1")],
                    kind="pullRequest")]
    return snapshot(r, issues)


case("clean", [clean_snapshot()], {"S1": 0, "S5": 0, "S6": 0, "S8": 0, "S9": 0},
     "A well-kept repository: root MIT license, one license commit, a recent\n"
     "release, and issues without outside links. No detector fires.")


def write():
    for entry in os.listdir(ROOT):
        path = os.path.join(ROOT, entry)
        if os.path.isdir(path) and os.path.exists(os.path.join(path, "case.json")):
            shutil.rmtree(path)
    for c in CASES:
        d = os.path.join(ROOT, c["name"])
        os.makedirs(d)
        names = ["snapshot.json"] if len(c["snapshots"]) == 1 else ["a.json", "b.json"]
        for n, s in zip(names, c["snapshots"]):
            with open(os.path.join(d, n), "w", encoding="utf-8") as f:
                json.dump(s, f, indent=2, ensure_ascii=False)
                f.write("\n")
        meta = {"name": c["name"], "snapshots": names, "expected": c["expected"],
                "options": c["options"]}
        if c["issue"] is not None:
            meta["issue"] = c["issue"]
        if c["fpClass"]:
            meta["fpClass"] = c["fpClass"]
        if c["falsifies"]:
            meta["falsifies"] = c["falsifies"]
        with open(os.path.join(d, "case.json"), "w") as f:
            json.dump(meta, f, indent=2)
            f.write("\n")
        expected = ", ".join("%s: %d" % kv for kv in sorted(c["expected"].items()))
        with open(os.path.join(d, "README.md"), "w") as f:
            f.write("# " + c["name"] + "\n\n" + c["readme"] + "\n\n")
            f.write("Expected violations: " + expected + ".\n")
            if c["fpClass"]:
                f.write("\nKnown false positive class: " + c["fpClass"] + ".\n")
            opts = {k: v for k, v in c["options"].items() if k != "date"}
            f.write("\nEvaluation date: " + c["options"].get("date", EVAL_DATE) + ".")
            if opts:
                f.write(" Options: " + json.dumps(opts, sort_keys=True) + ".")
            f.write("\n")
    print("wrote %d cases" % len(CASES))


if __name__ == "__main__":
    write()
