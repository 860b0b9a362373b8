#include <gtest/gtest.h>

#include "ethoscan/errors.hpp"
#include "ethoscan/links.hpp"

using namespace ethoscan;
using namespace ethoscan::links;
using Strings = std::vector<std::string>;

TEST(SoLinks, DefaultAndStrict) {
  const std::string text =
      "see https://stackoverflow.com/a/123 and "
      "https://stackoverflow.com/questions/42/some-title/43#43, again https://stackoverflow.com/a/123";
  EXPECT_EQ(find_links(text, default_so_link_pattern()),
            (Strings{"https://stackoverflow.com/a/123",
                     "https://stackoverflow.com/questions/42/some-title/43#43"}));
  EXPECT_EQ(find_links(text, strict_so_link_pattern()),
            (Strings{"https://stackoverflow.com/questions/42/some-title/43#43"}));
}

TEST(SoLinks, BadPatternIsUsageError) {
  try {
    find_links("x", "(unclosed");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUsage);
  }
}

TEST(SoLinks, AnswerId) {
  EXPECT_EQ(so_answer_id("https://stackoverflow.com/a/123"), "123");
  EXPECT_EQ(so_answer_id("https://stackoverflow.com/questions/1/t/99#99"), "99");
  EXPECT_EQ(so_answer_id("https://stackoverflow.com/questions/1/t#77"), "77");
  EXPECT_EQ(so_answer_id("https://stackoverflow.com/questions/1/t/55"), "55");
  EXPECT_FALSE(so_answer_id("https://stackoverflow.com/questions/1/title").has_value());
  EXPECT_FALSE(so_answer_id("https://stackoverflow.com/q/1").has_value());
}

TEST(RepoLinks, FindAndResolve) {
  auto found = find_repo_links(
      "Try https://github.com/promo-dev/fastcolors. Also https://github.com/orgs/acme/people "
      "and https://github.com/acme/widget.git/ or https://github.com/a/b/pull/3");
  ASSERT_EQ(found.size(), 3u);
  EXPECT_EQ(found[0], "https://github.com/promo-dev/fastcolors");
  EXPECT_EQ(repo_of_link(found[1])->full(), "acme/widget");
  EXPECT_EQ(repo_of_link("https://github.com/a/b/pull/3")->full(), "a/b");
  EXPECT_FALSE(repo_of_link("https://github.com/settings/profile").has_value());
  EXPECT_FALSE(repo_of_link("https://gitlab.com/a/b").has_value());
}

TEST(StoreLinks, Find) {
  EXPECT_EQ(find_store_links("get it: https://play.google.com/store/apps/details?id=com.a.b&hl=en ok"),
            (Strings{"https://play.google.com/store/apps/details?id=com.a.b&hl=en"}));
  EXPECT_TRUE(find_store_links("https://apps.apple.com/app/id1").empty());
}

TEST(Urls, Split) {
  auto u = split_url("http://127.0.0.1:8080/repos/o/r?x=1#frag");
  ASSERT_TRUE(u);
  EXPECT_EQ(u->scheme, "http");
  EXPECT_EQ(u->host, "127.0.0.1");
  EXPECT_EQ(u->port, 8080);
  EXPECT_EQ(u->target, "/repos/o/r?x=1");
  EXPECT_EQ(split_url("https://Example.COM")->target, "/");
  EXPECT_EQ(split_url("https://Example.COM")->port, 443);
  EXPECT_EQ(host_of("https://Example.COM/x"), "example.com");
  EXPECT_FALSE(split_url("mailto:x@y").has_value());
}
