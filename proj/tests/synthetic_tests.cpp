#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "wsc/coreset.hpp"
#include "wsc/synthetic.hpp"

using namespace wsc;

TEST_CASE("gaussian_blobs: sizes, labels, separation") {
  BlobsSpec bs;
  bs.sizes = {40, 25, 15};
  bs.separation = 50;
  bs.spread = 1.0;
  bs.seed = 3;
  Dataset ds = gaussian_blobs(bs);
  REQUIRE(ds.size() == 80);
  REQUIRE(ds.attribute_count() == 2);
  CHECK(ds.attribute_name(0) == "cluster");
  CHECK(ds.attribute_name(1) == "group");

  CHECK(ds.group_count(0) == 3);
  CHECK(ds.points_in_group(0, 0).size() == 40);
  CHECK(ds.points_in_group(0, 1).size() == 25);
  CHECK(ds.points_in_group(0, 2).size() == 15);

  // Blob labels follow generation order, so membership is contiguous.
  for (int i = 0; i < 40; ++i) CHECK(ds.group_of(i, 0) == 0);
  for (int i = 40; i < 65; ++i) CHECK(ds.group_of(i, 0) == 1);
  for (int i = 65; i < 80; ++i) CHECK(ds.group_of(i, 0) == 2);

  // With spread 1 and separation 50, blobs never blur into each other:
  // same-blob pairs stay far below the cross-blob floor.
  double same_max = 0, cross_min = 1e18;
  for (int i = 0; i < 80; ++i)
    for (int j = i + 1; j < 80; ++j) {
      double d = ds.distance(i, j);
      if (ds.group_of(i, 0) == ds.group_of(j, 0))
        same_max = std::max(same_max, d);
      else
        cross_min = std::min(cross_min, d);
    }
  CHECK(same_max < cross_min);

  // Both demographic groups are populated at skew 0.5.
  CHECK(ds.group_count(1) == 2);
  CHECK(ds.points_in_group(1, 0).size() > 10);
  CHECK(ds.points_in_group(1, 1).size() > 10);

  SUBCASE("deterministic in the seed") {
    Dataset again = gaussian_blobs(bs);
    REQUIRE(again.size() == ds.size());
    for (int i = 0; i < ds.size(); ++i) {
      CHECK(again.distance(0, i) == ds.distance(0, i));
      CHECK(again.group_of(i, 1) == ds.group_of(i, 1));
    }
    BlobsSpec other = bs;
    other.seed = 4;
    Dataset diff = gaussian_blobs(other);
    bool any = false;
    for (int i = 1; i < ds.size() && !any; ++i)
      any = diff.distance(0, i) != ds.distance(0, i);
    CHECK(any);
  }

  SUBCASE("cluster attribute can be dropped") {
    BlobsSpec no_cluster = bs;
    no_cluster.cluster_attribute = false;
    Dataset d2 = gaussian_blobs(no_cluster);
    REQUIRE(d2.attribute_count() == 1);
    CHECK(d2.attribute_name(0) == "group");
  }
}

TEST_CASE("planted_rings: occupancy is recovered exactly") {
  RingsSpec rs;
  rs.occupancy = {{5, 0, 7}, {3, 4, 0, 2}};
  rs.base_radius = 1.5;
  rs.factor = 2.0;
  rs.seed = 9;
  PlantedRings pr = planted_rings(rs);
  const int planted = 5 + 7 + 3 + 4 + 2;
  REQUIRE(pr.ds.size() == planted + 2);
  REQUIRE(pr.centers.size() == 2);
  CHECK(pr.centers[0] == 0);
  CHECK(pr.centers[1] == 1);
  CHECK(pr.base_radius == 1.5);
  CHECK(pr.factor == 2.0);

  // Every planted point lands in exactly the ring the plan prescribed, both
  // by the recorded labels and by recomputing ring_index from true distances.
  std::map<std::pair<int, int>, int> occ;
  for (int x = 0; x < pr.ds.size(); ++x) {
    int c = pr.true_center[size_t(x)];
    CHECK(c >= 0);
    CHECK(c < 2);
    if (pr.true_ring[size_t(x)] == -1) {
      CHECK(x == pr.centers[size_t(c)]);
      continue;
    }
    double d = pr.ds.distance(x, pr.centers[size_t(c)]);
    CHECK(ring_index(d, rs.base_radius, rs.factor) == pr.true_ring[size_t(x)]);
    occ[{c, pr.true_ring[size_t(x)]}]++;
  }
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < int(rs.occupancy[size_t(c)].size()); ++r) {
      int want = rs.occupancy[size_t(c)][size_t(r)];
      auto it = occ.find({c, r});
      CHECK((it == occ.end() ? 0 : it->second) == want);
    }

  // Points belong to their planted center: the other center is farther away.
  for (int x = 2; x < pr.ds.size(); ++x) {
    int c = pr.true_center[size_t(x)];
    CHECK(pr.ds.distance(x, pr.centers[size_t(c)]) <
          pr.ds.distance(x, pr.centers[size_t(1 - c)]));
  }
}

TEST_CASE("duplicate_heavy: even split over few sites") {
  Dataset ds = duplicate_heavy(10, 3, 5.0, 2);
  REQUIRE(ds.size() == 10);
  std::map<double, int> at;
  for (int i = 0; i < ds.size(); ++i) at[ds.distance(0, i)]++;
  // Locations are l * spacing apart; counts split 4/3/3.
  std::multiset<int> counts;
  for (auto& [d, c] : at) counts.insert(c);
  CHECK(counts == std::multiset<int>{3, 3, 4});

  Dataset one = duplicate_heavy(6, 1);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(one.distance(i, j) == 0.0);
}

TEST_CASE("imbalanced_pair: counts, sites, groups") {
  ImbalancedSpec is;
  is.majority = 90;
  is.minority = 10;
  is.majority_sites = 9;
  is.minority_sites = 2;
  is.separation = 60;
  is.seed = 5;
  Dataset ds = imbalanced_pair(is);
  REQUIRE(ds.size() == 100);
  REQUIRE(ds.attribute_count() == 1);
  CHECK(ds.attribute_name(0) == "cluster");
  REQUIRE(ds.group_count(0) == 2);
  CHECK(ds.points_in_group(0, 0).size() == 90);
  CHECK(ds.points_in_group(0, 1).size() == 10);

  // Minority points sit around (separation, 0), far from the majority mass,
  // and each side reuses only its prescribed number of sites.
  std::set<double> maj_sites, min_sites;
  for (int i = 0; i < 100; ++i) {
    double d = ds.distance(0, i);
    if (ds.group_of(i, 0) == 0) {
      maj_sites.insert(d);
      CHECK(d < is.separation / 2);
    } else {
      min_sites.insert(d);
      CHECK(d > is.separation / 2);
    }
  }
  CHECK(int(maj_sites.size()) <= is.majority_sites);
  CHECK(int(min_sites.size()) <= is.minority_sites);
  CHECK(int(min_sites.size()) >= 1);
}

TEST_CASE("uniform_baseline: weights rescale to the dataset mass") {
  BlobsSpec bs;
  bs.sizes = {60, 40};
  bs.seed = 7;
  Dataset ds = gaussian_blobs(bs);

  auto cs = uniform_baseline(ds, 20, 11);
  REQUIRE(cs.entries.size() == 20);
  std::set<int> seen;
  double total = 0;
  for (auto& e : cs.entries) {
    CHECK(e.weight == doctest::Approx(100.0 / 20.0));
    CHECK(seen.insert(e.point).second);  // without replacement
    CHECK(e.point >= 0);
    CHECK(e.point < 100);
    total += e.weight;
  }
  CHECK(total == doctest::Approx(100.0).epsilon(1e-12));

  // size = n keeps everything once at weight one.
  auto full = uniform_baseline(ds, 100, 11);
  REQUIRE(full.entries.size() == 100);
  std::set<int> all;
  for (auto& e : full.entries) {
    CHECK(e.weight == 1.0);
    all.insert(e.point);
  }
  CHECK(all.size() == 100);

  CHECK_THROWS_AS(uniform_baseline(ds, 0, 1), PreconditionError);
  CHECK_THROWS_AS(uniform_baseline(ds, 101, 1), PreconditionError);

  // Over many seeds the sample is unbiased across the two blobs.
  double first_blob = 0;
  for (std::uint64_t s = 1; s <= 200; ++s)
    for (auto& e : uniform_baseline(ds, 20, s).entries)
      if (e.point < 60) first_blob += 1;
  double frac = first_blob / (200.0 * 20.0);
  CHECK(frac > 0.5);
  CHECK(frac < 0.7);
}

TEST_CASE("meyerson_subsample: spread-out data keeps both sides") {
  BlobsSpec bs;
  bs.sizes = {50, 50};
  bs.separation = 100;
  bs.spread = 0.5;
  bs.seed = 1;
  Dataset ds = gaussian_blobs(bs);

  int both = 0;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    auto keep = meyerson_subsample(ds, 10, s);
    CHECK(std::is_sorted(keep.begin(), keep.end()));
    CHECK(keep.size() >= 8);   // within 20% of target
    CHECK(keep.size() <= 12);
    bool lo = false, hi = false;
    for (int x : keep) (x < 50 ? lo : hi) = true;
    if (lo && hi) both++;
  }
  // A distance-biased pick almost never drops an entire far-away cluster.
  CHECK(both >= 190);

  // target = n keeps every point.
  auto all = meyerson_subsample(ds, 100, 3);
  CHECK(all.size() == 100);

  // Duplicate-only data can never fill the band by distance alone; the
  // stream pads with uniform extras up to the target.
  Dataset dup = duplicate_heavy(50, 1);
  auto padded = meyerson_subsample(dup, 10, 4);
  CHECK(padded.size() == 10);
  CHECK(std::set<int>(padded.begin(), padded.end()).size() == 10);
}

TEST_CASE("subset_dataset: distances and attributes survive") {
  BlobsSpec bs;
  bs.sizes = {30, 30};
  bs.seed = 8;
  Dataset ds = gaussian_blobs(bs);
  std::vector<int> keep{3, 7, 11, 40, 55};
  Dataset sub = subset_dataset(ds, keep);
  REQUIRE(sub.size() == 5);
  REQUIRE(sub.attribute_count() == ds.attribute_count());
  for (size_t i = 0; i < keep.size(); ++i) {
    for (size_t j = 0; j < keep.size(); ++j)
      CHECK(sub.distance(int(i), int(j)) == doctest::Approx(ds.distance(keep[i], keep[j])));
    // Group ids are renumbered by first appearance in the subset, so the
    // stable thing is the label string.
    for (int a = 0; a < ds.attribute_count(); ++a)
      CHECK(sub.group_name(a, sub.group_of(int(i), a)) ==
            ds.group_name(a, ds.group_of(keep[i], a)));
    CHECK(sub.weight(int(i)) == ds.weight(keep[i]));
  }
}
