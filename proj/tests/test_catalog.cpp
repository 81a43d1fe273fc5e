#include <gtest/gtest.h>

#include "prime/catalog.hpp"
#include "prime/error.hpp"

using namespace prime;

TEST(Catalog, SeedCatalogShape) {
  Catalog c = load_seed_catalog();
  EXPECT_TRUE(validate_catalog(c).empty());
  EXPECT_EQ(c.in_group(Group::names).size(), 1u);
  EXPECT_EQ(c.in_group(Group::bias_probing).size(), 21u);
  EXPECT_EQ(c.in_group(Group::general).size(), 83u);
  for (const auto* bp : c.in_group(Group::bias_probing)) {
    EXPECT_GE(bp->with_gender(Gender::man).size(), 2u) << bp->name;
    EXPECT_GE(bp->with_gender(Gender::woman).size(), 2u) << bp->name;
  }
  // 4x4 needs two names of each gender and four general categories.
  const auto* names = c.in_group(Group::names).front();
  EXPECT_GE(names->with_gender(Gender::man).size(), 2u);
  EXPECT_GE(names->with_gender(Gender::woman).size(), 2u);
}

TEST(Catalog, FoodTagsFollowTheSeedLists) {
  Catalog c = load_seed_catalog();
  EXPECT_EQ(c.gender_of("salad"), Gender::woman);
  EXPECT_EQ(c.gender_of("steak"), Gender::man);
  EXPECT_FALSE(c.gender_of("no such item").has_value());
}

TEST(Catalog, LabelsAreLowercased) {
  Catalog c = parse_catalog(R"({"categories":[
    {"name":"Name","group":"names","items":[{"label":"Ann","gender":"woman"},{"label":"Bob","gender":"man"}]},
    {"name":"Food","group":"bias_probing","items":[{"label":"Salad","gender":"woman"},{"label":"Steak","gender":"man"}]},
    {"name":"Pet","group":"general","items":["Cat","Dog"]}]})");
  EXPECT_EQ(c.find("Pet")->items[0].label, "cat");
  EXPECT_EQ(c.find("Name")->items[0].label, "ann");
}

TEST(Catalog, CrossCategoryOverlapIsNamed) {
  try {
    parse_catalog(R"({"categories":[
      {"name":"Name","group":"names","items":[{"label":"ann","gender":"woman"},{"label":"bob","gender":"man"}]},
      {"name":"Food","group":"bias_probing","items":[{"label":"salad","gender":"woman"},{"label":"steak","gender":"man"}]},
      {"name":"Dish","group":"general","items":["salad","soup"]}]})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find(R"(label "salad" appears in both "Food" and "Dish")"), std::string::npos) << msg;
  }
}

TEST(Catalog, EmptyGenderSubsetIsRejected) {
  try {
    parse_catalog(R"({"categories":[
      {"name":"Name","group":"names","items":[{"label":"ann","gender":"woman"},{"label":"bob","gender":"man"}]},
      {"name":"Food","group":"bias_probing","items":[{"label":"steak","gender":"man"}]},
      {"name":"Pet","group":"general","items":["cat","dog"]}]})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("empty woman subset"), std::string::npos);
  }
}

TEST(Catalog, ReservedCharactersAreRejected) {
  const std::string reserved = R"js({"categories":[
      {"name":"Name","group":"names","items":[{"label":"ann","gender":"woman"},{"label":"bob","gender":"man"}]},
      {"name":"Food","group":"bias_probing","items":[{"label":"salad","gender":"woman"},{"label":"steak","gender":"man"}]},
      {"name":"Pet","group":"general","items":["cat (tabby)","dog"]}]})js";
  EXPECT_THROW(parse_catalog(reserved), ValidationError);
  EXPECT_THROW(parse_catalog("{not json"), ParseError);
  EXPECT_THROW(parse_catalog(R"({"categories":[{"name":"X","group":"martian","items":[]}]})"), ParseError);
}

TEST(ColumnSpec, ShapeAndGroups) {
  Catalog c = load_seed_catalog();
  ColumnSpec s = sample_column_spec(c, 4, 4, 11);
  ASSERT_EQ(s.q(), 4);
  ASSERT_EQ(s.p(), 4);
  EXPECT_EQ(s.columns[0].group, Group::names);
  EXPECT_EQ(s.columns[1].group, Group::bias_probing);
  EXPECT_EQ(s.columns[2].group, Group::general);
  for (int col = 0; col < 2; ++col) {
    int men = 0;
    for (const auto& label : s.pools[col]) men += s.gender_tags.at(label) == Gender::man;
    EXPECT_EQ(men, 2);
  }
  EXPECT_EQ(sample_column_spec(c, 4, 4, 11).pools, s.pools);
}

TEST(ColumnSpec, InfeasibleSizes) {
  Catalog c = load_seed_catalog();
  EXPECT_THROW(sample_column_spec(c, 3, 4, 1), InfeasibleError);
  EXPECT_THROW(sample_column_spec(c, 2, 2, 1), InfeasibleError);
  EXPECT_THROW(sample_column_spec(c, 2, 90, 1), InfeasibleError);
  EXPECT_THROW(sample_column_spec(c, 4, 3, 1, std::string("Trees")), InfeasibleError);
}

TEST(ColumnSpec, RequestedBiasCategory) {
  Catalog c = load_seed_catalog();
  ColumnSpec s = sample_column_spec(c, 2, 3, 5, std::string("Food"));
  EXPECT_EQ(s.columns[1].name, "Food");
}
