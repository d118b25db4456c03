#include "crossres/corpus.h"

#include <gtest/gtest.h>

#include <sstream>

#include "crossres/errors.h"
#include "crossres/random.h"

namespace crossres {
namespace {

IngestResult ingest_text(const std::string& text) {
  std::istringstream in(text);
  return ingest_stream(in, "test");
}

std::string line(const std::string& domain, const std::string& post_id, const std::string& user,
                 const std::string& extra = "") {
  return R"({"domain":")" + domain + R"(","post_id":")" + post_id + R"(","user_id":")" + user +
         R"(","username":")" + user + R"(","text":"hi")" + extra + "}\n";
}

TEST(Ingest, OneWellFormedLine) {
  const auto r = ingest_text(
      R"({"domain":"twitter","post_id":"1","user_id":"u1","username":"@Alice","full_name":"Alice A","text":"x #Tag","mentions":["@Bob"],"hashtags":["#Tag","Boston"],"link_target":"@alice_ig"})"
      "\n");
  ASSERT_EQ(r.posts.size(), 1u);
  const Post& p = r.posts[0];
  EXPECT_EQ(p.domain, Domain::twitter);
  EXPECT_EQ(p.username, "Alice");
  EXPECT_EQ(p.full_name, "Alice A");
  EXPECT_EQ(p.mentions, std::vector<std::string>{"bob"});
  EXPECT_EQ(p.hashtags, (std::vector<std::string>{"tag", "boston"}));
  EXPECT_EQ(p.link_target, "alice_ig");
  EXPECT_EQ(r.stats.accepted, 1u);
}

TEST(Ingest, MissingUsernameIsSkippedAndCounted) {
  const auto r = ingest_text(line("twitter", "1", "a") + line("twitter", "2", "b") +
                             R"({"domain":"twitter","post_id":"3","user_id":"c","text":"x"})" "\n");
  EXPECT_EQ(r.posts.size(), 2u);
  EXPECT_EQ(r.stats.malformed, 1u);
}

TEST(Ingest, DuplicatePostIdKeepsFirst) {
  const auto r = ingest_text(line("twitter", "1", "a") + line("twitter", "1", "b"));
  ASSERT_EQ(r.posts.size(), 1u);
  EXPECT_EQ(r.posts[0].user_id, "a");
  EXPECT_EQ(r.stats.duplicates, 1u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("duplicate"), std::string::npos);
}

TEST(Ingest, MostlyMalformedIsFatal) {
  EXPECT_THROW(ingest_text(line("twitter", "1", "a") + "{bad\n" + "[]\n"), DataError);
  EXPECT_NO_THROW(ingest_text(line("twitter", "1", "a") + "{bad\n"));
}

TEST(Ingest, CommentsAndBlankLinesIgnored) {
  const auto r = ingest_text("# header\n\n" + line("instagram", "1", "a"));
  EXPECT_EQ(r.posts.size(), 1u);
  EXPECT_EQ(r.stats.comments, 1u);
  EXPECT_EQ(r.stats.blank, 1u);
}

TEST(Ingest, UnreadableFileIsFatal) { EXPECT_THROW(ingest("/nonexistent/corpus.jsonl"), DataError); }

TEST(Ingest, ArbitraryBytesInTextNeverCrash) {
  Rng rng(1);
  for (int k = 0; k < 500; ++k) {
    std::string text;
    const size_t len = rng.below(40);
    for (size_t i = 0; i < len; ++i) {
      char c = static_cast<char>(rng.below(256));
      if (c == '"' || c == '\\' || c == '\n' || (c >= 0 && c < 0x20)) c = 'x';
      text += c;
    }
    const std::string l =
        R"({"domain":"twitter","post_id":"1","user_id":"u","username":"u","text":")" + text + "\"}\n";
    IngestResult r;
    ASSERT_NO_THROW(r = ingest_text(l));
    ASSERT_EQ(r.posts.size(), 1u);
    // The stored text is valid UTF-8 and re-serializes.
    ASSERT_NO_THROW(to_json(r.posts[0]).dump());
  }
}

TEST(Post, JsonRoundTrip) {
  Post p;
  p.domain = Domain::instagram;
  p.post_id = "p1";
  p.user_id = "u1";
  p.username = "bob";
  p.full_name = "Bob Smith";
  p.text = "héllo #x";
  p.mentions = {"ann"};
  p.hashtags = {"x"};
  const Post q = post_from_json(to_json(p));
  EXPECT_EQ(to_json(q), to_json(p));
  EXPECT_FALSE(q.link_target.has_value());
}

std::vector<Post> posts(Domain d, std::initializer_list<std::tuple<const char*, const char*, const char*>> rows) {
  std::vector<Post> out;
  int k = 0;
  for (const auto& [user, name, target] : rows) {
    Post p;
    p.domain = d;
    p.post_id = std::string(to_string(d)) + std::to_string(k++);
    p.user_id = std::string(to_string(d)).substr(0, 2) + "_" + user;
    p.username = user;
    if (target) p.link_target = target;
    out.push_back(p);
  }
  return out;
}

TEST(TruthLinks, LinkTargetResolvesAgainstOtherCorpus) {
  const auto tw = posts(Domain::twitter, {{"alice", "", "alice_ig"}, {"bob", "", nullptr}});
  const auto ig = posts(Domain::instagram, {{"alice_ig", "", nullptr}, {"bobby", "", nullptr}});
  const auto links = extract_truth_links(tw, ig);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].twitter_user, "tw_alice");
  EXPECT_EQ(links[0].instagram_user, "in_alice_ig");
}

TEST(TruthLinks, BothSidesUnion) {
  const auto tw = posts(Domain::twitter, {{"alice", "", "alice_ig"}, {"bob", "", nullptr}});
  const auto ig = posts(Domain::instagram, {{"alice_ig", "", "alice"}, {"bobby", "", "BOB"}});
  const auto links = extract_truth_links(tw, ig);
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[1].twitter_user, "tw_bob");
}

TEST(TruthLinks, MultipleAccountsDiscarded) {
  const auto tw = posts(Domain::twitter, {{"alice", "", "a1"}, {"alice", "", "a2"}, {"bob", "", "b1"}});
  const auto ig = posts(Domain::instagram, {{"a1", "", nullptr}, {"a2", "", nullptr}, {"b1", "", nullptr}});
  const auto links = extract_truth_links(tw, ig);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].twitter_user, "tw_bob");
}

TEST(TruthLinks, NoLinks) {
  EXPECT_TRUE(extract_truth_links(posts(Domain::twitter, {{"a", "", nullptr}}), {}).empty());
}

TEST(Profiles, LatestValuesWin) {
  auto tw = posts(Domain::twitter, {{"alice", "", nullptr}, {"alice2", "", nullptr}});
  tw[1].user_id = tw[0].user_id;
  tw[0].full_name = "Alice";
  const auto profiles = collect_profiles(tw);
  ASSERT_EQ(profiles.size(), 1u);
  EXPECT_EQ(profiles.begin()->second.username, "alice2");
  EXPECT_EQ(profiles.begin()->second.full_name, "Alice");
}

}  // namespace
}  // namespace crossres
