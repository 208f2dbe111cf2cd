#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <random>

#include "communitylens/communitylens.hpp"
#include "support/random_corpus.hpp"
#include "support/tempdir.hpp"

namespace cl = communitylens;
using testkit::TempDir;

namespace {

cl::PublicationInput pub(std::string id, cl::Year year, std::vector<std::string> authors,
                         std::vector<std::string> topics = {}, std::optional<std::string> cluster = std::nullopt) {
  cl::PublicationInput p;
  p.pub_id = std::move(id);
  p.year = year;
  p.authors = std::move(authors);
  p.topic_flags = std::move(topics);
  p.cluster_id = std::move(cluster);
  return p;
}

cl::LoadResult build(const std::vector<cl::PublicationInput>& pubs, bool strict = true,
                     cl::Horizon h = {2008, 2017}) {
  cl::CorpusBuilder b;
  for (const auto& p : pubs) b.add_publication(p);
  cl::BuildOptions o;
  o.horizon = h;
  o.strict = strict;
  return std::move(b).build(o);
}

cl::LoadResult load_files(const TempDir& dir, bool strict = true, unsigned threads = 1) {
  cl::BuildOptions o;
  o.horizon = {2008, 2017};
  o.strict = strict;
  return cl::load_corpus(cl::resolve_corpus_paths(dir.path()), o, cl::Executor(threads));
}

// Record-level equality of two corpora, including careers and clusters.
::testing::AssertionResult same_corpus(const cl::Corpus& a, const cl::Corpus& b) {
  if (a.author_ids != b.author_ids) return ::testing::AssertionFailure() << "author ids differ";
  if (a.careers != b.careers) return ::testing::AssertionFailure() << "careers differ";
  if (a.topics != b.topics) return ::testing::AssertionFailure() << "topics differ";
  if (a.clusters != b.clusters) return ::testing::AssertionFailure() << "clusters differ";
  if (a.publications.size() != b.publications.size()) return ::testing::AssertionFailure() << "record counts differ";
  for (std::size_t i = 0; i < a.publications.size(); ++i) {
    const auto& x = a.publications[i];
    const auto& y = b.publications[i];
    auto ax = a.authors_of(x);
    auto ay = b.authors_of(y);
    if (x.pub_id != y.pub_id || x.year != y.year || x.topics != y.topics || x.cluster != y.cluster ||
        !std::equal(ax.begin(), ax.end(), ay.begin(), ay.end()))
      return ::testing::AssertionFailure() << "record " << x.pub_id << " differs";
  }
  return ::testing::AssertionSuccess();
}

}  // namespace

// ---- loading -----------------------------------------------------------------------

TEST(LoadCorpus, EmptyFileIsValid) {
  TempDir dir;
  cl::write_text_file(dir / "publications.jsonl", "");
  auto r = load_files(dir);
  EXPECT_EQ(r.corpus.publications.size(), 0u);
  EXPECT_EQ(r.corpus.author_count(), 0u);
  EXPECT_TRUE(r.validation.clean());
}

TEST(LoadCorpus, SingleRecordDerivesCareer) {
  TempDir dir;
  cl::write_text_file(dir / "publications.jsonl",
                      R"({"pub_id":"p1","year":2012,"authors":["a1"],"topic_flags":["bd"]})"
                      "\n");
  auto r = load_files(dir);
  ASSERT_EQ(r.corpus.author_count(), 1u);
  const auto& c = r.corpus.careers[0];
  ASSERT_TRUE(c);
  EXPECT_EQ(c->yfp, 2012);
  ASSERT_EQ(c->pubs_per_year.size(), 1u);
  EXPECT_EQ(c->pubs_per_year[0], (cl::YearCount{2012, 1}));
  EXPECT_TRUE(r.report.careers_derived);
}

TEST(LoadCorpus, MalformedLineReportsLineNumber) {
  TempDir dir;
  cl::write_text_file(dir / "publications.jsonl",
                      "{\"pub_id\":\"p1\",\"year\":2012,\"authors\":[\"a\"]}\n"
                      "\n"
                      "{\"pub_id\":\"p2\",\"year\":2012,\"authors\":[\"a\"]\n");
  try {
    load_files(dir);
    FAIL() << "expected LoadError";
  } catch (const cl::LoadError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, RejectsSchemaViolations) {
  const char* bad[] = {
      R"({"pub_id":"p1","year":2012})",                                     // no authors
      R"({"pub_id":"p1","year":2012,"authors":[]})",                        // empty authors
      R"({"pub_id":"p1","year":2012,"authors":["a","a"]})",                 // duplicate author
      R"({"pub_id":"p1","year":"2012","authors":["a"]})",                   // year as string
      R"({"pub_id":"p1","year":2012,"authors":["a"],"venue":"x"})",         // unknown field
      R"({"year":2012,"authors":["a"]})",                                   // no pub_id
      R"(["p1",2012])",                                                     // not an object
  };
  for (const char* line : bad) {
    TempDir dir;
    cl::write_text_file(dir / "publications.jsonl", std::string(line) + "\n");
    EXPECT_THROW(load_files(dir), cl::LoadError) << line;
  }
}

TEST(LoadCorpus, AcceptsOptionalFields) {
  TempDir dir;
  cl::write_text_file(dir / "publications.jsonl",
                      R"({"pub_id":"p1","year":2012,"authors":["a"],"topic_flags":[],"cluster_id":null,)"
                      R"("doc_type":"article","title":"Big data","abstract":"x","keywords":["k"]})"
                      "\n");
  auto r = load_files(dir);
  ASSERT_EQ(r.corpus.publications.size(), 1u);
  const auto* t = r.corpus.text(r.corpus.publications[0]);
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->title, "Big data");
  EXPECT_EQ(t->keywords, std::vector<std::string>{"k"});
  EXPECT_EQ(r.corpus.doc_type(r.corpus.publications[0]), "article");
}

TEST(LoadCorpus, DuplicatePubIdFailsStrictLoad) {
  EXPECT_THROW(build({pub("p1", 2012, {"a"}), pub("p1", 2013, {"b"})}), cl::LoadError);
}

TEST(LoadCorpus, OutOfHorizonDroppedAndCounted) {
  auto r = build({pub("p1", 2005, {"a"}), pub("p2", 2012, {"a"}), pub("p3", 2018, {"b"})});
  EXPECT_EQ(r.report.out_of_horizon_dropped, 2u);
  EXPECT_EQ(r.report.records_kept, 1u);
  // Careers still see the dropped records.
  EXPECT_EQ(r.corpus.careers[*r.corpus.find_author("a")]->yfp, 2005);
}

TEST(LoadCorpus, UnknownClusterWarnsAndKeepsRecord) {
  cl::CorpusBuilder b;
  b.add_publication(pub("p1", 2012, {"a"}, {"bd"}, "c1"));
  b.add_publication(pub("p2", 2012, {"b"}, {"bd"}, "nope"));
  b.add_cluster({"c1", "one", cl::Area::kLifeEarthSciences, 10, std::nullopt, std::nullopt});
  cl::BuildOptions o;
  auto r = std::move(b).build(o);
  ASSERT_EQ(r.corpus.publications.size(), 2u);
  EXPECT_EQ(r.report.unknown_cluster_refs, 1u);
  ASSERT_EQ(r.report.warnings.size(), 1u);
  EXPECT_NE(r.report.warnings[0].find("nope"), std::string::npos);
  EXPECT_EQ(r.corpus.publications[1].cluster, cl::kNoCluster);
  EXPECT_EQ(r.corpus.publications[0].cluster, 0);
}

TEST(LoadCorpus, SuppliedCareerWithLateYfpNamesAuthor) {
  std::mt19937_64 rng(7);
  testkit::RandomOptions ro;
  ro.allow_out_of_horizon = false;
  ro.allow_unknown_clusters = false;
  testkit::RawCorpus raw;
  do {
    raw = testkit::random_corpus(rng, ro);
  } while (raw.pubs.size() < 10);
  // 500 records over 60 authors.
  raw.pubs.clear();
  for (int i = 0; i < 500; ++i) {
    testkit::RawPub p;
    p.id = "p" + std::to_string(i);
    p.year = static_cast<cl::Year>(raw.horizon.first + static_cast<int>(rng() % static_cast<unsigned>(raw.horizon.span())));
    p.authors = {"a" + std::to_string(rng() % 60)};
    p.topics = {"t"};
    raw.pubs.push_back(p);
  }
  std::map<std::string, testkit::RawCareer> careers;
  for (const auto& p : raw.pubs) ++careers[p.authors[0]].counts[p.year];
  for (auto& [a, c] : careers) c.yfp = c.counts.begin()->first;
  const std::string victim = careers.begin()->first;
  careers[victim].yfp = careers[victim].counts.begin()->first + 1;
  raw.careers = careers;

  auto lenient = testkit::load(raw, false);
  EXPECT_EQ(lenient.validation.career_inconsistencies, 1u);
  bool named = false;
  for (const auto& d : lenient.validation.defects)
    named = named || (d.kind == cl::DefectKind::kCareerInconsistency && d.subject == victim);
  EXPECT_TRUE(named);
  try {
    testkit::load(raw, true);
    FAIL() << "expected LoadError";
  } catch (const cl::LoadError& e) {
    EXPECT_NE(std::string(e.what()).find(victim), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, SuppliedCareersWinAndDifferencesCounted) {
  cl::CorpusBuilder b;
  b.add_publication(pub("p1", 2012, {"a"}, {"bd"}));
  b.add_publication(pub("p2", 2012, {"b"}, {"bd"}));
  b.add_career_row("a", 2000, 2000, 3);
  b.add_career_row("a", 2000, 2012, 4);
  b.add_career_row("b", 2012, 2012, 1);
  auto r = std::move(b).build({});
  EXPECT_FALSE(r.report.careers_derived);
  EXPECT_EQ(r.report.supplied_career_differences, 1u);
  EXPECT_EQ(r.corpus.careers[0]->yfp, 2000);
}

TEST(LoadCorpus, MissingCareerFailsStrictLoad) {
  cl::CorpusBuilder b;
  b.add_publication(pub("p1", 2012, {"a", "b"}, {"bd"}));
  b.add_career_row("a", 2012, 2012, 1);
  EXPECT_THROW(std::move(b).build({}), cl::LoadError);
}

TEST(LoadCorpus, CareerFileErrors) {
  TempDir dir;
  cl::write_text_file(dir / "publications.jsonl", R"({"pub_id":"p1","year":2012,"authors":["a"]})" "\n");
  cl::write_text_file(dir / "careers.csv", "author,yfp,year,count\n");
  EXPECT_THROW(load_files(dir), cl::LoadError);
  cl::write_text_file(dir / "careers.csv", "author_id,yfp,year,count\na,2012,2012\n");
  EXPECT_THROW(load_files(dir), cl::LoadError);
  cl::write_text_file(dir / "careers.csv", "author_id,yfp,year,count\na,2012,2012,x\n");
  EXPECT_THROW(load_files(dir), cl::LoadError);
  cl::write_text_file(dir / "careers.csv", "author_id,yfp,year,count\na,2012,2012,1\na,2011,2013,1\n");
  EXPECT_THROW(load_files(dir), cl::LoadError);
  cl::write_text_file(dir / "careers.csv", "author_id,yfp,year,count\na,2012,2012,1\na,2012,2012,2\n");
  EXPECT_THROW(load_files(dir), cl::LoadError);
  cl::write_text_file(dir / "careers.csv", "author_id,yfp,year,count\r\na,2010,2012,2\r\n");
  auto r = load_files(dir);
  EXPECT_EQ(r.corpus.careers[0]->yfp, 2010);
}

TEST(LoadCorpus, ClusterFile) {
  TempDir dir;
  cl::write_text_file(dir / "publications.jsonl", R"({"pub_id":"p1","year":2012,"authors":["a"],"cluster_id":"k2"})" "\n");
  cl::write_text_file(dir / "clusters.csv",
                      "cluster_id,label,area,total_authors,x,y\n"
                      "k2,\"deep, learning\",Mathematics & Computer Science,1000,1.5,-2\n"
                      "k1,plain,social sciences & humanities,0,,\n");
  auto r = load_files(dir);
  ASSERT_EQ(r.corpus.clusters.size(), 2u);
  EXPECT_EQ(r.corpus.clusters[0].cluster_id, "k1");
  EXPECT_EQ(r.corpus.clusters[0].area, cl::Area::kSocialSciencesHumanities);
  EXPECT_FALSE(r.corpus.clusters[0].x);
  EXPECT_EQ(r.corpus.clusters[1].label, "deep, learning");
  EXPECT_EQ(*r.corpus.clusters[1].y, -2.0);
  EXPECT_EQ(r.corpus.publications[0].cluster, 1);

  cl::write_text_file(dir / "clusters.csv", "cluster_id,label,area,total_authors,x,y\nk1,x,Astrology,5,,\n");
  EXPECT_THROW(load_files(dir), cl::LoadError);
  cl::write_text_file(dir / "clusters.csv", "cluster_id,label,area,total_authors,x,y\nk1,x,Life & Earth Sciences,-1,,\n");
  EXPECT_THROW(load_files(dir), cl::LoadError);
  cl::write_text_file(dir / "clusters.csv",
                      "cluster_id,label,area,total_authors,x,y\nk1,x,Life & Earth Sciences,1,,\nk1,y,Life & Earth Sciences,1,,\n");
  EXPECT_THROW(load_files(dir), cl::LoadError);
}

TEST(LoadCorpus, DocTypeFilter) {
  auto p1 = pub("p1", 2012, {"a"}, {"bd"});
  p1.doc_type = "article";
  auto p2 = pub("p2", 2012, {"a"}, {"bd"});
  p2.doc_type = "editorial";
  auto p3 = pub("p3", 2012, {"b"}, {"bd"});
  cl::CorpusBuilder b;
  for (const auto& p : {p1, p2, p3}) b.add_publication(p);
  cl::BuildOptions o;
  o.doc_types = {"article", "review", "letter"};
  auto r = std::move(b).build(o);
  ASSERT_EQ(r.corpus.publications.size(), 1u);
  EXPECT_EQ(r.corpus.publications[0].pub_id, "p1");
  EXPECT_EQ(r.report.doc_type_dropped, 2u);
}

TEST(LoadCorpus, DelineationRulesFlagRecords) {
  auto p1 = pub("p1", 2012, {"a"});
  p1.text = cl::TextFields{"Big Data analytics", "", {}};
  auto p2 = pub("p2", 2012, {"b"});
  p2.text = cl::TextFields{"bigdatabase indexing", "", {}};
  auto p3 = pub("p3", 2013, {"c"}, {"bd"});
  cl::CorpusBuilder b;
  for (const auto& p : {p1, p2, p3}) b.add_publication(p);
  cl::BuildOptions o;
  o.delineation = {{"bd", {"big data", "bigdata"}}};
  auto r = std::move(b).build(o);
  const int bit = r.corpus.require_topic("bd");
  EXPECT_TRUE(r.corpus.publications[0].has_topic(bit));
  EXPECT_FALSE(r.corpus.publications[1].has_topic(bit));
  EXPECT_TRUE(r.corpus.publications[2].has_topic(bit));
  EXPECT_EQ(r.report.delineated, 1u);
}

TEST(LoadCorpus, AuthorIndexIsIdRank) {
  auto r = build({pub("p1", 2012, {"zed", "amy"}), pub("p2", 2013, {"mia"})});
  EXPECT_EQ(r.corpus.author_ids, (std::vector<std::string>{"amy", "mia", "zed"}));
  auto authors = r.corpus.authors_of(r.corpus.publications[0]);
  EXPECT_EQ(authors[0], 2u);  // author order inside a record is preserved
  EXPECT_EQ(authors[1], 0u);
}

TEST(LoadCorpus, DeterministicAcrossThreadsAndBlocks) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 8; ++round) {
    testkit::RandomOptions ro;
    ro.max_pubs = 3000;
    ro.max_authors = 400;
    auto raw = testkit::random_corpus(rng, ro);
    TempDir dir;
    cl::write_text_file(dir / "publications.jsonl", testkit::publications_jsonl(raw));
    if (raw.careers) cl::write_text_file(dir / "careers.csv", testkit::careers_csv(raw));
    cl::write_text_file(dir / "clusters.csv", testkit::clusters_csv(raw));
    cl::BuildOptions o;
    o.horizon = raw.horizon;
    auto paths = cl::resolve_corpus_paths(dir.path());
    auto one = cl::load_corpus(paths, o, cl::Executor(1));
    for (unsigned threads : {2u, 4u, 16u}) {
      auto many = cl::load_corpus(paths, o, cl::Executor(threads));
      EXPECT_TRUE(same_corpus(one.corpus, many.corpus));
      EXPECT_EQ(one.report, many.report);
    }
    // Small read blocks exercise lines split across block boundaries.
    cl::CorpusBuilder b;
    cl::read_publications(paths.publications, b, cl::Executor(3), 97);
    if (paths.careers) cl::read_careers(*paths.careers, b);
    for (auto& c : cl::read_clusters(*paths.clusters)) b.add_cluster(std::move(c));
    auto blocked = std::move(b).build(o);
    EXPECT_TRUE(same_corpus(one.corpus, blocked.corpus));
    // And the builder path agrees with the file path.
    EXPECT_TRUE(same_corpus(one.corpus, testkit::load(raw).corpus));
  }
}

TEST(LoadCorpus, DerivedCareersRoundTrip) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 20; ++round) {
    auto raw = testkit::random_corpus(rng);
    raw.careers.reset();
    TempDir dir;
    cl::write_text_file(dir / "publications.jsonl", testkit::publications_jsonl(raw));
    cl::BuildOptions o;
    o.horizon = raw.horizon;
    auto first = cl::load_corpus(cl::resolve_corpus_paths(dir.path()), o);
    ASSERT_TRUE(first.report.careers_derived);
    cl::write_text_file(dir / "careers.csv", cl::careers_csv(first.corpus));
    auto second = cl::load_corpus(cl::resolve_corpus_paths(dir.path()), o);
    EXPECT_FALSE(second.report.careers_derived);
    EXPECT_EQ(second.report.supplied_career_differences, 0u);
    EXPECT_TRUE(same_corpus(first.corpus, second.corpus));
    EXPECT_EQ(cl::careers_csv(first.corpus), cl::careers_csv(second.corpus));
  }
}

// ---- delineation ------------------------------------------------------------------

namespace {

struct Case {
  std::string title, abstract;
  std::vector<std::string> keywords;
  bool expected;
};

// Hand-labelled strings for the terms "big data" and "bigdata".
std::vector<Case> hand_cases() {
  return {
      {"Big Data analytics in healthcare", "", {}, true},
      {"bigdatabase indexing", "", {}, false},
      {"BIG DATA", "", {}, true},
      {"big-data pipelines", "", {}, true},
      {"big  data", "", {}, true},
      {"big\tdata", "", {}, true},
      {"big\ndata", "", {}, true},
      {"Big Data.", "", {}, true},
      {"(big data)", "", {}, true},
      {"bigdata", "", {}, true},
      {"BigData platforms", "", {}, true},
      {"#bigdata", "", {}, true},
      {"bigdata2020", "", {}, false},
      {"big data2", "", {}, false},
      {"big_data", "", {}, true},
      {"big/data", "", {}, true},
      {"big databases", "", {}, false},
      {"a big dataset", "", {}, false},
      {"bigger data", "", {}, false},
      {"big, data", "", {}, true},
      {"data big", "", {}, false},
      {"big", "", {}, false},
      {"data", "", {}, false},
      {"", "", {}, false},
      {"big ... data", "", {}, true},
      {"big of data", "", {}, false},
      {"the big data era", "", {}, true},
      {"Big-Data-Driven", "", {}, true},
      {"megabigdata", "", {}, false},
      {"BIGDATA!", "", {}, true},
      {"", "we use big data", {}, true},
      {"", "we study large data", {}, false},
      {"", "Bigdata,Cloud", {}, true},
      {"", "", {"BigData"}, true},
      {"", "", {"Big", "Data"}, false},
      {"", "", {"cloud", "big data"}, true},
      {"", "", {"big data mining"}, true},
      {"", "", {"bigdatas"}, false},
      {"", "", {}, false},
      {"big", "data", {}, false},
      {"big", "", {"data"}, false},
      {"\xC3\x9c" "ber big data", "", {}, true},
      {"bigdata\xC3\xA9", "", {}, false},
      {"\xC3\xA9lan big data", "", {}, true},
      {"BiG dAtA", "", {}, true},
      {"big\r\ndata", "", {}, true},
      {"big data's role", "", {}, true},
      {"big4data", "", {}, false},
      {"smallbig data", "", {}, false},
      {"big datum", "", {}, false},
  };
}

// Independent matcher: lower-case, turn ASCII punctuation and whitespace into
// single spaces, then search for the space-delimited phrase.
bool naive_match(const std::string& field, const std::vector<std::string>& terms) {
  auto norm = [](const std::string& s) {
    std::string out = " ";
    for (unsigned char c : s) {
      bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
      if (word) out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
      else if (out.back() != ' ') out.push_back(' ');
    }
    if (out.back() != ' ') out.push_back(' ');
    return out;
  };
  const std::string hay = norm(field);
  for (const auto& t : terms) {
    std::string needle = norm(t);
    if (needle == " ") continue;
    if (hay.find(needle) != std::string::npos) return true;
  }
  return false;
}

bool naive_delineate(const Case& c, const std::vector<std::string>& terms) {
  if (naive_match(c.title, terms) || naive_match(c.abstract, terms)) return true;
  return std::any_of(c.keywords.begin(), c.keywords.end(), [&](const auto& k) { return naive_match(k, terms); });
}

}  // namespace

TEST(Delineate, SpecExamples) {
  const std::vector<std::string> terms{"big data", "bigdata"};
  EXPECT_TRUE(cl::delineate({"Big Data analytics in healthcare", "", {}}, terms));
  EXPECT_FALSE(cl::delineate({"bigdatabase indexing", "", {}}, terms));
  EXPECT_TRUE(cl::delineate({"", "", {"BigData"}}, std::vector<std::string>{"bigdata"}));
}

TEST(Delineate, HandLabelledStringsAgreeWithIndependentMatcher) {
  const std::vector<std::string> terms{"big data", "bigdata"};
  auto cases = hand_cases();
  ASSERT_EQ(cases.size(), 50u);
  for (const auto& c : cases) {
    // The hand label and the independent matcher must agree first.
    ASSERT_EQ(naive_delineate(c, terms), c.expected) << c.title << "|" << c.abstract;
    EXPECT_EQ(cl::delineate({c.title, c.abstract, c.keywords}, terms), c.expected) << c.title << "|" << c.abstract;
  }
}

TEST(Delineate, EmptyTermsRejected) {
  EXPECT_THROW(cl::delineate({"big data", "", {}}, std::vector<std::string>{}), cl::AnalysisError);
}

TEST(Delineate, CaseAndTermOrderInvariantOnRandomText) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> pieces{"big", "data", "Big", "DATA", "bigdata", "x", "cloud", "-", " ", ",", "AI",
                                        "artificial", "intelligence", "Intelligence", "\xC3\xA9", "2"};
  auto random_text = [&] {
    std::string s;
    for (int n = static_cast<int>(rng() % 8); n > 0; --n) {
      s += pieces[rng() % pieces.size()];
      if (rng() % 2) s += ' ';
    }
    return s;
  };
  auto flip = [&](std::string s) {
    for (char& c : s)
      if (std::isalpha(static_cast<unsigned char>(c)) && rng() % 2)
        c = static_cast<char>(std::isupper(static_cast<unsigned char>(c)) ? std::tolower(c) : std::toupper(c));
    return s;
  };
  for (int i = 0; i < 5000; ++i) {
    std::vector<std::string> terms;
    for (int n = 1 + static_cast<int>(rng() % 3); n > 0; --n) terms.push_back(random_text() + "data");
    Case c{random_text(), random_text(), {random_text()}, false};
    const bool base = cl::delineate({c.title, c.abstract, c.keywords}, terms);
    EXPECT_EQ(base, naive_delineate(c, terms));
    auto shuffled = terms;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto& t : shuffled) t = flip(t);
    EXPECT_EQ(cl::delineate({flip(c.title), flip(c.abstract), {flip(c.keywords[0])}}, shuffled), base);
  }
}

// ---- validation --------------------------------------------------------------------

TEST(Validate, CleanTenRecordFixture) {
  std::vector<cl::PublicationInput> pubs;
  for (int i = 0; i < 10; ++i) pubs.push_back(pub("p" + std::to_string(i), 2008 + i, {"a" + std::to_string(i % 3)}));
  auto r = build(pubs, false);
  EXPECT_TRUE(r.validation.clean());
  EXPECT_EQ(r.validation.total(), 0u);
}

TEST(Validate, CountsOutOfHorizon) {
  std::vector<cl::PublicationInput> pubs{pub("p1", 2005, {"a"}), pub("p2", 2005, {"b"}), pub("p3", 2010, {"a"})};
  auto r = build(pubs, false);
  EXPECT_EQ(r.validation.out_of_horizon, 2u);
  EXPECT_EQ(r.validation.total(), 2u);
  // Validation never mutates: the lenient corpus still holds every record.
  EXPECT_EQ(r.corpus.publications.size(), 3u);
  EXPECT_EQ(cl::validate(r.corpus).out_of_horizon, 2u);
}

TEST(Validate, InjectedDefectsMatchLedger) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 200; ++round) {
    // Clean base with supplied careers and clusters.
    cl::CorpusBuilder b;
    std::map<std::string, std::map<cl::Year, std::int64_t>> counts;
    std::vector<std::string> pub_ids;
    for (int i = 0; i < 40; ++i) {
      auto p = pub("p" + std::to_string(i), 2008 + static_cast<int>(rng() % 10), {"a" + std::to_string(rng() % 20)},
                   {"t"}, "c" + std::to_string(rng() % 4));
      ++counts[p.authors[0]][p.year];
      pub_ids.push_back(p.pub_id);
      b.add_publication(p);
    }
    for (int k = 0; k < 4; ++k)
      b.add_cluster({"c" + std::to_string(k), "l", cl::Area::kPhysicalSciencesEngineering, 100, std::nullopt, std::nullopt});

    std::array<std::size_t, 6> ledger{};
    auto career = [&](const std::string& a, cl::Year yfp, cl::Year year, std::int64_t n) {
      b.add_career_row(a, yfp, year, n);
    };
    for (int d = 0; d < 7; ++d) {
      const std::string fresh = "x" + std::to_string(d);
      const int kind = static_cast<int>(rng() % 6);
      ++ledger[static_cast<std::size_t>(kind)];
      switch (static_cast<cl::DefectKind>(kind)) {
        case cl::DefectKind::kOutOfHorizon:
          b.add_publication(pub("o" + std::to_string(d), 2005, {fresh}));
          career(fresh, 2005, 2005, 1);
          break;
        case cl::DefectKind::kUnknownCluster:
          b.add_publication(pub("u" + std::to_string(d), 2012, {fresh}, {}, "zz" + std::to_string(d)));
          career(fresh, 2012, 2012, 1);
          break;
        case cl::DefectKind::kCareerInconsistency:
          b.add_publication(pub("i" + std::to_string(d), 2012, {fresh}));
          career(fresh, 2013, 2013, 1);
          break;
        case cl::DefectKind::kDuplicateId:
          b.add_publication(pub(pub_ids[rng() % pub_ids.size()], 2012, {fresh}));
          career(fresh, 2012, 2012, 1);
          break;
        case cl::DefectKind::kMissingCareer:
          b.add_publication(pub("m" + std::to_string(d), 2012, {fresh}));
          break;
        case cl::DefectKind::kInvalidRecord:
          b.add_publication(pub("e" + std::to_string(d), 2012, {}));
          break;
      }
    }
    for (const auto& [a, years] : counts)
      for (const auto& [y, n] : years) career(a, years.begin()->first, y, n);

    cl::BuildOptions o;
    o.strict = false;
    auto r = std::move(b).build(o);
    const auto& v = r.validation;
    EXPECT_EQ(v.out_of_horizon, ledger[0]) << round;
    EXPECT_EQ(v.unknown_clusters, ledger[1]) << round;
    EXPECT_EQ(v.career_inconsistencies, ledger[2]) << round;
    EXPECT_EQ(v.duplicate_ids, ledger[3]) << round;
    EXPECT_EQ(v.missing_careers, ledger[4]) << round;
    EXPECT_EQ(v.invalid_records, ledger[5]) << round;
    EXPECT_EQ(v.total(), 7u);
    EXPECT_EQ(v.defects.size(), 7u);
  }
}
