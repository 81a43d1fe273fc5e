#include <gtest/gtest.h>

#include <map>

#include "prime/catalog.hpp"
#include "prime/error.hpp"
#include "prime/generator.hpp"
#include "prime/solver.hpp"
#include "test_util.hpp"

using namespace prime;

namespace {

const Catalog& seed_catalog() {
  static const Catalog c = load_seed_catalog();
  return c;
}

std::map<ClueKind, int> histogram(const std::vector<Clue>& cs) {
  std::map<ClueKind, int> h;
  for (const auto& c : cs) ++h[c.kind];
  return h;
}

}  // namespace

TEST(Grids, StereoAndAntiPairingsFollowTags) {
  ColumnSpec spec = sample_column_spec(seed_catalog(), 4, 4, 3);
  TripletGrids g = build_grids(spec, 17);
  for (int r = 0; r < 4; ++r) {
    Gender name_g = spec.gender_tags.at(g.stereo.at(r, 0));
    EXPECT_EQ(spec.gender_tags.at(g.stereo.at(r, 1)), name_g);
    EXPECT_EQ(spec.gender_tags.at(g.anti.at(r, 1)), opposite(name_g));
    EXPECT_EQ(g.generic.at(r, 0), anonymized_name(r));
    EXPECT_EQ(g.anti.at(r, 0), g.stereo.at(r, 0));
    for (int c = 2; c < 4; ++c) {
      EXPECT_EQ(g.generic.at(r, c), g.stereo.at(r, c));
      EXPECT_EQ(g.generic.at(r, c), g.anti.at(r, c));
    }
  }
  for (const auto* grid : {&g.generic, &g.stereo, &g.anti}) EXPECT_TRUE(validate_grid(*grid).empty());
}

TEST(Subset, StartsAtTenAndKeepsListOrder) {
  ColumnSpec spec = sample_column_spec(seed_catalog(), 4, 4, 8);
  TripletGrids g = build_grids(spec, 8);
  auto all = enumerate_clues(g.generic);
  ASSERT_GT(all.size(), 10u);
  SubsetSearch s = find_solvable_subset(all, g.generic, 99);
  EXPECT_EQ(s.first_n, 10u);
  EXPECT_EQ(s.clues.size(), 10u + static_cast<std::size_t>(s.attempts) - 1);
  std::size_t pos = 0;
  for (const auto& c : s.clues) {
    while (pos < all.size() && !(all[pos] == c)) ++pos;
    ASSERT_LT(pos, all.size()) << "subset not in list order";
    ++pos;
  }
  EXPECT_TRUE(uniquely_solves(s.clues, g.generic));
}

TEST(Subset, ClampsStartToListSize) {
  auto g = test::make_grid({"Name", "Food", "Pet"}, {{"a", "x", "m"}, {"b", "y", "n"}});
  auto all = enumerate_clues(g);
  SubsetSearch s = find_solvable_subset(all, g, 1, 100);
  EXPECT_EQ(s.first_n, all.size());
}

TEST(Prune, ResultIsMinimalAndStillUnique) {
  ColumnSpec spec = sample_column_spec(seed_catalog(), 4, 3, 21);
  TripletGrids g = build_grids(spec, 21);
  auto all = enumerate_clues(g.generic);
  auto minimal = prune_to_minimal(all, g.generic);
  EXPECT_TRUE(uniquely_solves(minimal, g.generic));
  EXPECT_TRUE(is_minimal(minimal, g.generic));
  EXPECT_FALSE(is_minimal(all, g.generic));
}

TEST(Triplet, VariantsShareOneSkeleton) {
  PuzzleTriplet t = build_triplet(seed_catalog(), 4, 4, 12345);
  const auto& gen = t.generic.clues;
  for (Variant v : {Variant::stereo, Variant::anti}) {
    const Puzzle& pz = t.variant(v);
    auto mapped = relabel(gen, row_preserving_map(t.generic.grid, pz.grid));
    ASSERT_EQ(mapped.size(), pz.clues.size());
    for (std::size_t i = 0; i < mapped.size(); ++i) EXPECT_EQ(mapped[i].expr, pz.clues[i].expr);
    EXPECT_EQ(histogram(gen), histogram(pz.clues));
    EXPECT_TRUE(is_minimal(pz.clues, pz.grid));
  }
  EXPECT_TRUE(is_minimal(gen, t.generic.grid));
}

TEST(Triplet, SeedDeterminesEverything) {
  EXPECT_EQ(build_triplet(seed_catalog(), 2, 4, 77), build_triplet(seed_catalog(), 2, 4, 77));
  EXPECT_NE(build_triplet(seed_catalog(), 2, 4, 77).stereo.grid, build_triplet(seed_catalog(), 2, 4, 78).stereo.grid);
}

TEST(Triplet, InfeasibleShapeFailsWithoutRetrying) {
  EXPECT_THROW(build_triplet(seed_catalog(), 3, 3, 1), InfeasibleError);
  EXPECT_THROW(build_triplet(seed_catalog(), 2, 2, 1), InfeasibleError);
  EXPECT_THROW(build_triplet(seed_catalog(), 2, 3, 1, std::string("Pets")), InfeasibleError);
  BatchRequest req;
  req.sizes = {{2, 3}, {5, 3}};
  req.per_size = 1;
  EXPECT_THROW(generate_batch(seed_catalog(), req, Exec::serial), InfeasibleError);
}

TEST(Substitute, RejectsAMapThatLosesUniqueness) {
  PuzzleTriplet t = build_triplet(seed_catalog(), 2, 3, 5);
  // Mapping onto a grid with the general column flipped keeps the clue shapes
  // but makes them false on the target.
  SolutionGrid other = t.stereo.grid;
  std::swap(other.rows[0][2], other.rows[1][2]);
  auto mapped = relabel(t.generic.clues, row_preserving_map(t.generic.grid, t.stereo.grid));
  EXPECT_FALSE(uniquely_solves(mapped, other));
  EXPECT_THROW(substitute_clues(t.generic.clues, t.generic.grid, SolutionGrid{}), VerificationError);
}

TEST(Batch, SerialAndParallelAgree) {
  BatchRequest req;
  req.sizes = {{2, 3}, {4, 3}};
  req.per_size = 6;
  req.seed = 9;
  req.threads = 4;
  auto a = generate_batch(seed_catalog(), req, Exec::serial);
  auto b = generate_batch(seed_catalog(), req, Exec::parallel);
  ASSERT_EQ(a.size(), 12u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0].id, "2x3-0000");
  EXPECT_EQ(a[7].id, "4x3-0001");
}

TEST(Batch, BiasCategoriesRoundRobin) {
  BatchRequest req;
  req.sizes = {{2, 3}};
  req.per_size = 42;
  req.seed = 1;
  auto ts = generate_batch(seed_catalog(), req, Exec::parallel);
  std::map<std::string, int> per;
  for (const auto& t : ts) ++per[t.bp_category];
  EXPECT_EQ(per.size(), 21u);
  for (const auto& [k, v] : per) EXPECT_EQ(v, 2) << k;
}

TEST(Sizes, Parse) {
  auto s = parse_sizes("2x3,4x4");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(to_string(s[1]), "4x4");
  EXPECT_THROW(parse_sizes("2x"), UsageError);
  EXPECT_THROW(parse_sizes("2x3,,4x4"), UsageError);
  EXPECT_THROW(parse_sizes("axb"), UsageError);
}
