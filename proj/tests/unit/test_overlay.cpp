#include <gtest/gtest.h>

#include <chrono>
#include <json.hpp>

#include "support/check.hpp"
#include "support/reference_fixtures.hpp"

namespace cl = communitylens;

namespace {

struct Scene {
  cl::CorpusBuilder builder;
  int next = 0;

  void cluster(const std::string& id, cl::Area area, std::int64_t total) {
    builder.add_cluster({id, "label " + id, area, total, 1.0, 2.0});
  }
  void pub(const std::string& author, cl::Year year, bool topic, std::optional<std::string> cluster = std::nullopt) {
    cl::PublicationInput p;
    p.pub_id = "p" + std::to_string(next++);
    p.year = year;
    p.authors = {author};
    if (topic) p.topic_flags = {"bd"};
    p.cluster_id = std::move(cluster);
    builder.add_publication(p);
  }
};

struct Analysis {
  cl::Corpus corpus;
  cl::TopicTimeline tl;
  cl::ProfileSet profiles;
  std::vector<cl::YearCohorts> series;
  cl::OverlayResult overlay;
  std::vector<cl::AreaRollup> areas;
};

Analysis analyze(Scene& s) {
  Analysis a;
  a.corpus = std::move(s.builder).build({}).corpus;
  a.tl = cl::build_timeline(a.corpus, "bd");
  a.profiles = cl::author_profiles(a.corpus, a.tl);
  a.series = cl::cohort_series(a.corpus, a.tl, cl::CohortOptions{});
  a.overlay = cl::cluster_overlay(a.corpus, a.tl, a.profiles, a.series);
  a.areas = cl::area_rollup(a.corpus, a.tl, a.profiles, a.series, a.overlay.rows);
  return a;
}

const cl::AreaRollup& area(const Analysis& a, cl::Area which) {
  for (const auto& r : a.areas)
    if (r.area == which) return r;
  throw std::runtime_error("area missing");
}

}  // namespace

TEST(Overlay, TopicAuthorShareOfCluster) {
  Scene s;
  s.cluster("k", cl::Area::kMathematicsComputerScience, 1000);
  for (int i = 0; i < 10; ++i) s.pub("a" + std::to_string(i), 2012, true, "k");
  auto a = analyze(s);
  ASSERT_EQ(a.overlay.rows.size(), 1u);
  EXPECT_EQ(a.overlay.rows[0].n_topic_authors, 10);
  EXPECT_EQ(cl::format_1dp(*a.overlay.rows[0].p_au), "1.0");
}

TEST(Overlay, AreaAveragesAreUnweightedClusterMeans) {
  Scene s;
  s.cluster("k1", cl::Area::kMathematicsComputerScience, 1000);
  s.cluster("k2", cl::Area::kMathematicsComputerScience, 1000);
  for (int i = 0; i < 5; ++i) s.pub("a" + std::to_string(i), 2012, true, "k1");
  for (int i = 0; i < 9; ++i) s.pub("b" + std::to_string(i), 2012, true, "k2");
  auto a = analyze(s);
  const auto& r = area(a, cl::Area::kMathematicsComputerScience);
  EXPECT_EQ(cl::format_1dp(*r.avg_p_au), "0.7");
  EXPECT_EQ(r.top_cluster, "k2");
  EXPECT_EQ(r.n_clusters, 2);
  EXPECT_EQ(r.n_authors, 14);
}

TEST(Overlay, AverageStayShare) {
  Scene s;
  s.cluster("k1", cl::Area::kLifeEarthSciences, 100);
  s.cluster("k2", cl::Area::kLifeEarthSciences, 100);
  // k1: 1 of 5 entrants stays; k2: 2 of 5.
  for (int i = 0; i < 5; ++i) {
    s.pub("a" + std::to_string(i), 2012, true, "k1");
    s.pub("b" + std::to_string(i), 2012, true, "k2");
  }
  s.pub("a0", 2013, true);
  s.pub("b0", 2014, true);
  s.pub("b1", 2013, true);
  s.pub("b2", 2016, true);  // outside the window
  auto a = analyze(s);
  EXPECT_EQ(a.overlay.rows[0].p_stay, (cl::Share{1, 5}));
  EXPECT_EQ(a.overlay.rows[1].p_stay, (cl::Share{2, 5}));
  const auto& r = area(a, cl::Area::kLifeEarthSciences);
  EXPECT_EQ(cl::format_1dp(*r.avg_p_stay), "30.0");
  EXPECT_EQ(r.pooled_p_stay, (cl::Share{3, 10}));
}

TEST(Overlay, AreaTimeLag) {
  Scene s;
  s.cluster("k", cl::Area::kMathematicsComputerScience, 500);
  // yfp: seven at 2009, three at 2010 -> 2009.3; entry: seven in 2016, three in 2015 -> 2015.7.
  for (int i = 0; i < 10; ++i) {
    const std::string id = "a" + std::to_string(i);
    s.pub(id, i < 7 ? 2009 : 2010, false);
    s.pub(id, i < 3 ? 2015 : 2016, true, "k");
  }
  auto a = analyze(s);
  const auto& r = area(a, cl::Area::kMathematicsComputerScience);
  EXPECT_EQ(cl::format_1dp(r.mean_yfp), "2009.3");
  EXPECT_EQ(cl::format_1dp(r.mean_yfp_topic), "2015.7");
  EXPECT_EQ(cl::format_1dp(r.mean_time_lag), "6.4");
}

TEST(Overlay, AuthorsInSeveralClustersOfOneArea) {
  Scene s;
  s.cluster("k1", cl::Area::kSocialSciencesHumanities, 10);
  s.cluster("k2", cl::Area::kSocialSciencesHumanities, 10);
  s.cluster("k3", cl::Area::kBiomedicalHealthSciences, 10);
  s.pub("a", 2012, true, "k1");
  s.pub("a", 2013, true, "k2");
  s.pub("a", 2013, true, "k3");
  s.pub("b", 2012, true, "k1");
  s.pub("c", 2012, true);  // unclustered
  auto a = analyze(s);
  const auto& soc = area(a, cl::Area::kSocialSciencesHumanities);
  EXPECT_EQ(soc.n_authors, 2);
  EXPECT_EQ(soc.n_authors_full, 3);
  EXPECT_EQ(soc.author_share, (cl::Share{2, 2}));
  // "a" entered in k1 only, so k2 has no eligible entrant.
  EXPECT_FALSE(a.overlay.rows[1].p_stay.defined());
  EXPECT_EQ(a.overlay.rows[0].p_stay, (cl::Share{1, 2}));
  const auto& bio = area(a, cl::Area::kBiomedicalHealthSciences);
  EXPECT_EQ(bio.author_share, (cl::Share{1, 2}));
  EXPECT_EQ(bio.pooled_p_stay.denominator, 0);
}

TEST(Overlay, ThreeClusterSchema) {
  Scene s;
  s.cluster("k1", cl::Area::kMathematicsComputerScience, 100);
  s.cluster("k2", cl::Area::kPhysicalSciencesEngineering, 50);
  s.cluster("k3", cl::Area::kLifeEarthSciences, 0);
  s.pub("a", 2012, true, "k1");
  s.pub("b", 2012, true, "k2");
  s.pub("c", 2012, true, "k3");
  auto a = analyze(s);
  ASSERT_EQ(a.overlay.rows.size(), 3u);
  auto csv = cl::map_csv(a.overlay.rows);
  EXPECT_EQ(csv,
            "cluster_id,label,area,x,y,size,color\n"
            "k1,label k1,Mathematics & Computer Science,1,2,1,1.0\n"
            "k2,label k2,Physical Sciences & Engineering,1,2,1,2.0\n"
            "k3,label k3,Life & Earth Sciences,1,2,1,\n");
  auto json = nlohmann::json::parse(cl::map_json(a.overlay.rows, cl::ColorMetric::kPStay));
  EXPECT_EQ(json["color_metric"], "p_stay");
  ASSERT_EQ(json["items"].size(), 3u);
  for (const auto& item : json["items"])
    for (const char* key : {"cluster_id", "label", "area", "x", "y", "size", "color"}) EXPECT_TRUE(item.contains(key));
  EXPECT_EQ(json["items"][0]["color"], 0.0);
  ASSERT_EQ(a.overlay.warnings.size(), 1u);
  EXPECT_NE(a.overlay.warnings[0].find("k3"), std::string::npos);
}

TEST(Overlay, EmptyMapIsHeaderOnly) {
  EXPECT_EQ(cl::map_csv({}), "cluster_id,label,area,x,y,size,color\n");
  auto json = nlohmann::json::parse(cl::map_json({}));
  EXPECT_TRUE(json["items"].empty());
}

TEST(Overlay, ExceedingTotalWarns) {
  Scene s;
  s.cluster("k", cl::Area::kMathematicsComputerScience, 1);
  s.pub("a", 2012, true, "k");
  s.pub("b", 2012, true, "k");
  auto a = analyze(s);
  ASSERT_EQ(a.overlay.warnings.size(), 1u);
  EXPECT_EQ(cl::format_1dp(*a.overlay.rows[0].p_au), "200.0");
}

TEST(Overlay, FullScaleMapIsFastAndDeterministic) {
  std::mt19937_64 rng(4047);
  Scene s;
  for (int k = 0; k < 4047; ++k) s.cluster("c" + std::to_string(k), static_cast<cl::Area>(k % 5), 100 + k);
  for (int i = 0; i < 60000; ++i)
    s.pub("a" + std::to_string(rng() % 20000), static_cast<cl::Year>(2008 + rng() % 10), rng() % 3 != 0,
          "c" + std::to_string(rng() % 4047));
  auto a = analyze(s);
  ASSERT_EQ(a.overlay.rows.size(), 4047u);
  const auto start = std::chrono::steady_clock::now();
  auto csv = cl::map_csv(a.overlay.rows);
  auto json = cl::map_json(a.overlay.rows);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 1.0);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4048);
  auto again = cl::cluster_overlay(a.corpus, a.tl, a.profiles, a.series);
  EXPECT_EQ(cl::map_csv(again.rows), csv);
  EXPECT_EQ(cl::map_json(again.rows), json);
}

TEST(Overlay, RandomCorporaMatchOracle) {
  std::mt19937_64 rng(50);
  testkit::RandomOptions ro;
  ro.max_clusters = 50;
  ro.max_authors = 150;
  for (int i = 0; i < 150; ++i) {
    auto raw = testkit::random_corpus(rng, ro);
    auto bad = check::against_oracle(raw, "t", 2);
    ASSERT_TRUE(bad.empty()) << "case " << i << ": " << bad.front();
  }
}
