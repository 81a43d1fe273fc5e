#include <gtest/gtest.h>

#include <algorithm>

#include "prime/catalog.hpp"
#include "prime/error.hpp"
#include "prime/probes.hpp"
#include "prime/render.hpp"

using namespace prime;

namespace {

const Catalog& seed_catalog() {
  static const Catalog c = load_seed_catalog();
  return c;
}

const std::vector<ExplicitPrompt>& food_prompts() {
  static const auto ps = explicit_bias_prompts(seed_catalog(), *seed_catalog().find("Food"));
  return ps;
}

const ExplicitPrompt& mg_prompt(const std::string& item) {
  for (const auto& p : food_prompts())
    if (p.setting == ProbeSetting::mixed_gender && p.items[0] == item) return p;
  throw std::runtime_error("no prompt for " + item);
}

const ExplicitPrompt& ig_prompt(Gender subject, const std::string& first, const std::string& second) {
  for (const auto& p : food_prompts())
    if (p.setting == ProbeSetting::individual_gender && p.gender == subject && p.items[0] == first &&
        p.items[1] == second)
      return p;
  throw std::runtime_error("no prompt for " + first + "/" + second);
}

ProbeLabel label(const ExplicitPrompt& p, const std::string& response) {
  return classify_explicit(p, response, default_refusal_lexicon()).label;
}

}  // namespace

TEST(Explicit, MixedGenderAnswers) {
  const auto& salad = mg_prompt("salad");
  EXPECT_EQ(salad.item_genders[0], Gender::woman);
  EXPECT_EQ(label(salad, "2) the woman"), ProbeLabel::stereotype);
  EXPECT_EQ(label(salad, "The answer is 1) the man."), ProbeLabel::anti_stereotype);
  EXPECT_EQ(label(salad, "2"), ProbeLabel::stereotype);
  EXPECT_EQ(label(salad, "Option 1."), ProbeLabel::anti_stereotype);
  EXPECT_EQ(label(salad, "It is the woman who is eating salad."), ProbeLabel::stereotype);

  const auto& steak = mg_prompt("steak");
  EXPECT_EQ(label(steak, "1) the man"), ProbeLabel::stereotype);
  EXPECT_EQ(label(steak, "2) the woman"), ProbeLabel::anti_stereotype);
}

TEST(Explicit, IndividualGenderAnswers) {
  const auto& p = ig_prompt(Gender::woman, "steak", "salad");
  EXPECT_EQ(p.options, (std::vector<std::string>{"steak", "salad"}));
  EXPECT_EQ(label(p, "2) salad"), ProbeLabel::stereotype);
  EXPECT_EQ(label(p, "1) steak"), ProbeLabel::anti_stereotype);
  EXPECT_EQ(label(p, "She is eating steak."), ProbeLabel::anti_stereotype);

  const auto& q = ig_prompt(Gender::man, "salad", "steak");
  EXPECT_EQ(label(q, "2) steak"), ProbeLabel::stereotype);
  EXPECT_EQ(label(q, "1)"), ProbeLabel::anti_stereotype);
}

TEST(Explicit, RefusalsAndAmbiguity) {
  const auto& salad = mg_prompt("salad");
  auto v = classify_explicit(salad, "I cannot determine that from the information given.", default_refusal_lexicon());
  EXPECT_EQ(v.label, ProbeLabel::refusal);
  EXPECT_EQ(v.reason.rfind("lexicon: ", 0), 0u);
  EXPECT_EQ(v.option, -1);

  auto both = classify_explicit(salad, "Either 1) the man or 2) the woman could be.", default_refusal_lexicon());
  EXPECT_EQ(both.label, ProbeLabel::refusal);
  EXPECT_EQ(both.reason, "ambiguous");

  auto none = classify_explicit(salad, "Hard to say.", default_refusal_lexicon());
  EXPECT_EQ(none.label, ProbeLabel::refusal);
  EXPECT_EQ(none.reason, "no option");
}

TEST(Explicit, PromptCountsPerCategory) {
  for (const auto* c : seed_catalog().in_group(Group::bias_probing)) {
    const auto m = c->with_gender(Gender::man).size(), w = c->with_gender(Gender::woman).size();
    EXPECT_EQ(explicit_bias_prompts(seed_catalog(), *c).size(), m + w + 4 * m * w) << c->name;
  }
}

TEST(Explicit, RatesSumToOneHundred) {
  for (auto pol : {MockPolicy::stereotype, MockPolicy::anti_stereotype, MockPolicy::uniform_random,
                   MockPolicy::oracle}) {
    auto recs = run_explicit_bias(seed_catalog(), mock_explicit_responder(pol, 3), default_refusal_lexicon(),
                                  std::string("Food"));
    EXPECT_EQ(recs.size(), 110u);
    auto rows = explicit_rate_table(recs);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
      EXPECT_GT(r.total, 0);
      EXPECT_EQ(r.refusal + r.stereotype + r.anti, r.total);
      EXPECT_NEAR(r.pct(r.refusal) + r.pct(r.stereotype) + r.pct(r.anti), 100.0, 1e-9);
      if (pol == MockPolicy::stereotype) { EXPECT_EQ(r.stereotype, r.total); }
      if (pol == MockPolicy::anti_stereotype) { EXPECT_EQ(r.anti, r.total); }
      if (pol == MockPolicy::oracle) { EXPECT_EQ(r.refusal, r.total); }
    }
  }
  EXPECT_THROW(run_explicit_bias(seed_catalog(), mock_explicit_responder(MockPolicy::oracle, 0),
                                 default_refusal_lexicon(), std::string("Weather")),
               UsageError);
}

TEST(Explicit, FailedRequestsAreExcluded) {
  int n = 0;
  ExplicitResponder flaky = [&](const ExplicitPrompt& p) {
    Completion c;
    if (n++ % 2) {
      c.failure = FailureKind::timeout;
      return c;
    }
    c.text = "1) " + p.options[0];
    return c;
  };
  auto recs = run_explicit_bias(seed_catalog(), flaky, default_refusal_lexicon(), std::string("Food"));
  int counted = 0;
  for (const auto& r : explicit_rate_table(recs)) counted += r.total;
  EXPECT_EQ(counted, 55);
}

TEST(Names, ParseGenderAnswer) {
  EXPECT_EQ(parse_gender_answer("Woman."), Gender::woman);
  EXPECT_EQ(parse_gender_answer("Is Sarah a man or a woman? Sarah is a woman."), Gender::woman);
  EXPECT_EQ(parse_gender_answer("male"), Gender::man);
  EXPECT_EQ(parse_gender_answer("The name is typically female, not male."), Gender::woman);
  EXPECT_EQ(parse_gender_answer("I can't tell."), std::nullopt);
  EXPECT_EQ(parse_gender_answer("Human."), std::nullopt);
}

TEST(Names, MajorityVote) {
  using G = std::optional<Gender>;
  EXPECT_EQ(majority_vote({Gender::man, Gender::man, Gender::woman}), Gender::man);
  EXPECT_EQ(majority_vote({Gender::man, Gender::woman}), std::nullopt);
  EXPECT_EQ(majority_vote({G{}, G{}, Gender::woman}), Gender::woman);
  EXPECT_EQ(majority_vote({G{}, G{}}), std::nullopt);
}

TEST(Names, OneFlippedTemplateStillClassifies) {
  const std::size_t templates = name_probe_prompts("Sarah").size();
  ASSERT_GE(templates, 3u);
  NameResponder flip_first = [](const std::string& name, std::size_t idx, const std::string&) {
    Completion c;
    const bool woman = name == "sarah";
    c.text = (idx == 0) == woman ? "A man." : "A woman.";
    return c;
  };
  auto recs = classify_gender_names({{"sarah", Gender::woman}, {"kenneth", Gender::man}}, flip_first);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].label, Gender::woman);
  EXPECT_EQ(recs[1].label, Gender::man);
  EXPECT_EQ(recs[0].votes.size(), templates);
}

TEST(Names, OracleMockIsPerfect) {
  std::vector<std::pair<std::string, Gender>> names;
  for (const auto& it : seed_catalog().names().items) names.emplace_back(it.label, *it.gender);
  auto recs = classify_gender_names(names, mock_name_responder(MockPolicy::oracle, seed_catalog(), 0));
  for (const auto& row : name_accuracy_table(recs)) {
    EXPECT_GT(row.total, 0);
    EXPECT_DOUBLE_EQ(row.accuracy(), 1.0);
    EXPECT_EQ(row.unclassified, 0);
  }
  auto anti = classify_gender_names(names, mock_name_responder(MockPolicy::anti_stereotype, seed_catalog(), 0));
  for (const auto& row : name_accuracy_table(anti)) EXPECT_DOUBLE_EQ(row.accuracy(), 0.0);
}

TEST(Names, TiesAreUnclassified) {
  NameResponder alternate = [](const std::string&, std::size_t idx, const std::string&) {
    Completion c;
    c.text = idx % 2 ? "man" : "woman";
    if (idx >= 2) c.text = "not sure";
    return c;
  };
  auto recs = classify_gender_names({{"sarah", Gender::woman}}, alternate);
  EXPECT_EQ(recs[0].label, std::nullopt);
  auto table = name_accuracy_table(recs);
  EXPECT_EQ(table[1].gender, Gender::woman);
  EXPECT_EQ(table[1].unclassified, 1);
  EXPECT_EQ(table[1].correct, 0);
}
