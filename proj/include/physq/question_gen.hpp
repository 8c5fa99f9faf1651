#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "physq/physics.hpp"
#include "physq/program.hpp"
#include "physq/rng.hpp"
#include "physq/scene_gen.hpp"
#include "physq/types.hpp"

namespace physq {

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

struct QTemplate {
  std::string id;
  QuestionType qtype;
  std::string text_pattern;     // documentation form with _SA_, _DA_, ... slots
  std::string program_pattern;  // operation skeleton with matching slot holes
};

const std::vector<QTemplate>& question_templates();

// ---------------------------------------------------------------------------
// Object descriptors ("the blue metal cube", "the cyan object")
// ---------------------------------------------------------------------------

struct Descriptor {
  std::optional<Color> color;
  std::optional<Material> material;
  std::optional<Shape> shape;  // nullopt renders as "object"

  bool matches(const ObjectSpec& o) const;
  bool operator==(const Descriptor&) const = default;
};

std::string descriptor_text(const Descriptor& d, bool plural = false);
// shortest form that matches exactly one roster object
Descriptor unique_descriptor(const ObjectSpec& o,
                             const std::vector<ObjectSpec>& roster);
// nested filter_static_attr chain over (objects)
std::string selector_program(const Descriptor& d);

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

struct QuestionGenConfig {
  int factual_per_set = 5;
  int counterfactual_per_set = 6;
  int predictive_per_set = 1;
  int min_choices = 3;
  int max_choices = 4;
};

// Re-simulated counterfactual records for one set, keyed by (edit, object id).
// Shared between question generation and oracle answering.
using CounterfactualCache = std::map<std::pair<std::string, int>, SceneRecord>;

SceneRecord simulate_counterfactual(const VideoSet& set, const std::string& edit,
                                    int object_id, const PhysicsConfig& phys);

std::vector<Question> instantiate_factual(const VideoSet& set, RngStream& rng,
                                          int quota);
std::vector<Question> instantiate_counterfactual(const VideoSet& set,
                                                 const PhysicsConfig& phys,
                                                 RngStream& rng, int quota,
                                                 CounterfactualCache& cache,
                                                 const QuestionGenConfig& cfg);
std::vector<Question> instantiate_predictive(const VideoSet& set,
                                             RngStream& rng, int quota,
                                             const QuestionGenConfig& cfg);

// Full per-set question list (factual + counterfactual + predictive),
// deterministic in (set, seed). The cache receives every re-simulated world.
std::vector<Question> generate_questions(const VideoSet& set,
                                         const PhysicsConfig& phys,
                                         std::uint64_t question_seed,
                                         CounterfactualCache& cache,
                                         const QuestionGenConfig& cfg = {});

// ---------------------------------------------------------------------------
// Balancing and statistics
// ---------------------------------------------------------------------------

struct BalanceReport {
  std::map<std::string, int> before;  // counts per question type
  std::map<std::string, int> after;
  std::map<std::string, double> proportions;
  bool feasible = false;
};

// Deterministic subsampling toward the 42/50/8 factual/counterfactual/
// predictive mix; keeps the earliest questions of each type.
std::vector<Question> balance_corpus(const std::vector<Question>& pooled,
                                     double tolerance_pp,
                                     BalanceReport* report = nullptr);

nlohmann::json corpus_stats(const std::vector<Question>& questions);

// ---------------------------------------------------------------------------
// Exact NL-to-program matching (the generated corpus is closed)
// ---------------------------------------------------------------------------

Program parse_question_nl(const std::string& text);
// choice programs depend on the question context (hypothesis / future)
Program parse_choice_nl(const std::string& question_text,
                        const std::string& choice_text);

}  // namespace physq
