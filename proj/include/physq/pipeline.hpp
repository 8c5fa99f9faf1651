#pragma once

#include <optional>
#include <string>
#include <vector>

#include "physq/gnn.hpp"
#include "physq/json_io.hpp"
#include "physq/inference.hpp"
#include "physq/program.hpp"
#include "physq/question_gen.hpp"
#include "physq/scene_gen.hpp"
#include "physq/types.hpp"

namespace physq {

enum class AnswerMode { oracle, inferred, gnn };

AnswerMode answer_mode_from_string(const std::string& s);
std::string to_string(AnswerMode m);

struct CorpusSet {
  VideoSet set;
  std::vector<Question> questions;
};

// One generated problem set with its questions; the single entry point used
// by the CLI, the tests and the acceptance suite so corpora match bit for bit.
CorpusSet generate_corpus_set(const GenConfig& cfg, const PhysicsConfig& phys,
                              std::uint64_t set_index,
                              const QuestionGenConfig& qcfg = {});

// ---------------------------------------------------------------------------
// World construction per answering mode
// ---------------------------------------------------------------------------

struct WorldBundle {
  SceneRecord future;
  CounterfactualCache counterfactual;
  PropertiesView props;
  const VideoSet* set = nullptr;

  World world() const;
};

// Assembles the future and every counterfactual record the questions demand.
// `masses`/`signs` carry the properties the chosen mode believes in; oracle
// callers pass the ground truth, inferred callers the enumeration output.
WorldBundle build_worlds(const VideoSet& set,
                         const std::map<int, MassLevel>& masses,
                         const std::map<int, ChargeSign>& signs,
                         const std::vector<Question>& questions,
                         const PhysicsConfig& phys);

// Learned-dynamics variant: futures and counterfactuals come from the
// dynamics predictor rollout, events from the kinematic detector.
WorldBundle build_worlds_gnn(const VideoSet& set, const PropertyGraph& props,
                             const std::vector<Question>& questions,
                             const gnn::GnnBundle& bundle,
                             const PhysicsConfig& phys);

// ---------------------------------------------------------------------------
// Answering and metrics
// ---------------------------------------------------------------------------

struct AnswerRecord {
  std::string question_id;
  QuestionType qtype = QuestionType::factual;
  std::string predicted;              // factual
  std::string truth;                  // factual
  std::vector<bool> choice_predicted; // multiple choice
  std::vector<bool> choice_truth;
  bool correct = false;               // whole question
  int options_total = 0;
  int options_correct = 0;
  std::string error;                  // executor error category, if any
};

void to_json(json& j, const AnswerRecord& r);
void from_json(const json& j, AnswerRecord& r);

std::vector<AnswerRecord> answer(const CorpusSet& corpus_set, AnswerMode mode,
                                 const PhysicsConfig& phys,
                                 const gnn::GnnBundle* bundle = nullptr);

struct Metrics {
  double factual_accuracy = 0.0;
  double predictive_per_option = 0.0;
  double predictive_per_question = 0.0;
  double counterfactual_per_option = 0.0;
  double counterfactual_per_question = 0.0;
  int n_factual = 0;
  int n_predictive = 0;
  int n_counterfactual = 0;
  int n_errors = 0;
};

Metrics evaluate(const std::vector<AnswerRecord>& records);
json metrics_to_json(const Metrics& m);
std::string metrics_table(const Metrics& m);

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

json corpus_set_to_json(const CorpusSet& cs);
CorpusSet corpus_set_from_json(const json& j);

// combined checksum over serialized sets, order-independent input naming
std::string corpus_checksum(const std::vector<std::string>& file_payloads);

}  // namespace physq
