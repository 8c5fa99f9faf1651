#include "physq/pipeline.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "physq/json_io.hpp"

namespace physq {

AnswerMode answer_mode_from_string(const std::string& s) {
  if (s == "oracle") return AnswerMode::oracle;
  if (s == "inferred") return AnswerMode::inferred;
  if (s == "gnn") return AnswerMode::gnn;
  throw std::invalid_argument("unknown answer mode: " + s);
}

std::string to_string(AnswerMode m) {
  switch (m) {
    case AnswerMode::oracle: return "oracle";
    case AnswerMode::inferred: return "inferred";
    default: return "gnn";
  }
}

CorpusSet generate_corpus_set(const GenConfig& cfg, const PhysicsConfig& phys,
                              std::uint64_t set_index,
                              const QuestionGenConfig& qcfg) {
  CorpusSet cs;
  cs.set = generate_video_set(cfg, phys, set_index);
  CounterfactualCache cache;
  const std::uint64_t qseed =
      RngStream::derive(RngStream::derive(cfg.seed, set_index), 0x51);
  cs.questions = generate_questions(cs.set, phys, qseed, cache, qcfg);
  return cs;
}

// ---------------------------------------------------------------------------
// Worlds
// ---------------------------------------------------------------------------

namespace {

// (edit, object) pairs demanded by the questions' counterfactual operators
std::set<std::pair<std::string, int>> required_edits(
    const std::vector<Question>& questions, const VideoSet& set) {
  static const std::map<std::string, std::string> op_to_edit = {
      {"counterfactual_mass_heavy", "mass_heavy"},
      {"counterfactual_mass_light", "mass_light"},
      {"counterfactual_uncharged", "uncharged"},
      {"counterfactual_opposite_charged", "opposite_charged"}};

  World resolve_world;
  resolve_world.target = &set.target;
  resolve_world.future = &set.future;
  resolve_world.props = PropertiesView::from_roster(set.roster);

  std::set<std::pair<std::string, int>> out;
  auto scan_program = [&](const std::string& text) {
    Program p = parse_program(text);
    for (std::size_t k = 0; k < p.nodes.size(); ++k) {
      auto it = op_to_edit.find(p.nodes[k].op);
      if (it == op_to_edit.end()) continue;
      // resolve the hypothesis object by running only its selection cone
      const Program sel = subprogram(p, p.nodes[k].inputs[0]);
      const Value v = execute(sel, resolve_world);
      out.insert({it->second, std::get<ObjectVal>(v).id});
    }
  };
  for (const auto& q : questions) {
    scan_program(q.program);
    for (const auto& c : q.choices) scan_program(c.program);
  }
  return out;
}

std::vector<ObjectSpec> apply_beliefs(const std::vector<ObjectSpec>& roster,
                                      const std::map<int, MassLevel>& masses,
                                      const std::map<int, ChargeSign>& signs) {
  std::vector<ObjectSpec> out = roster;
  for (auto& o : out) {
    auto mit = masses.find(o.id);
    if (mit != masses.end()) o.mass = mit->second;
    auto sit = signs.find(o.id);
    if (sit != signs.end()) o.charge = sit->second;
  }
  return out;
}

std::vector<ObjectSpec> apply_edit(std::vector<ObjectSpec> roster,
                                   const std::string& edit, int object_id) {
  for (auto& o : roster) {
    if (o.id != object_id) continue;
    if (edit == "mass_heavy") o.mass = MassLevel::heavy;
    if (edit == "mass_light") o.mass = MassLevel::light;
    if (edit == "uncharged") o.charge = ChargeSign::neutral;
    if (edit == "opposite_charged") {
      o.charge = o.charge == ChargeSign::positive   ? ChargeSign::negative
                 : o.charge == ChargeSign::negative ? ChargeSign::positive
                                                    : ChargeSign::neutral;
    }
  }
  return roster;
}

std::vector<ObjectSpec> cast_of(const SceneRecord& rec,
                                const std::vector<ObjectSpec>& roster) {
  std::vector<ObjectSpec> cast;
  for (const auto& o : rec.objects) {
    for (const auto& r : roster) {
      if (r.id == o.id) cast.push_back(r);
    }
  }
  return cast;
}

}  // namespace

World WorldBundle::world() const {
  World w;
  w.target = &set->target;
  w.future = &future;
  for (const auto& [key, rec] : counterfactual) {
    w.counterfactual[key] = &rec;
  }
  w.props = props;
  return w;
}

WorldBundle build_worlds(const VideoSet& set,
                         const std::map<int, MassLevel>& masses,
                         const std::map<int, ChargeSign>& signs,
                         const std::vector<Question>& questions,
                         const PhysicsConfig& phys) {
  WorldBundle bundle;
  bundle.set = &set;

  const auto believed = apply_beliefs(set.roster, masses, signs);

  // future: continue the observed target under the believed properties
  {
    InitialConditions init{cast_of(set.target, believed),
                           set.target.frames.back()};
    bundle.future = simulate(init, set.future.duration_s, phys,
                             RecordKind::target_future);
  }

  // counterfactuals: restart the target with one property edited
  for (const auto& [edit, id] : required_edits(questions, set)) {
    const auto edited = apply_edit(believed, edit, id);
    InitialConditions init{cast_of(set.target, edited),
                           set.target.frames.front()};
    bundle.counterfactual[{edit, id}] =
        simulate(init, set.target.duration_s, phys, RecordKind::target);
  }

  bundle.props = PropertiesView::from_roster(believed);
  return bundle;
}

WorldBundle build_worlds_gnn(const VideoSet& set, const PropertyGraph& props,
                             const std::vector<Question>& questions,
                             const gnn::GnnBundle& bundle_params,
                             const PhysicsConfig& phys) {
  WorldBundle bundle;
  bundle.set = &set;
  bundle.props = PropertiesView::from_graph(props, set.roster);

  std::map<int, MassLevel> masses;
  for (const auto& [id, label] : props.node_mass) masses[id] = label.mass;
  std::map<std::pair<int, int>, ChargeRel> relations;
  for (const auto& [key, edge] : props.edge_charge) relations[key] = edge.rel;

  const auto& target = set.target;
  const std::vector<ObjectSpec> cast = target.objects;

  // future: roll forward from the last observed frames
  {
    std::vector<std::vector<BodyState>> seed(
        target.frames.end() - gnn::DynParams::kHistory, target.frames.end());
    const int n_steps =
        static_cast<int>(std::lround(set.future.duration_s * phys.record_fps));
    auto frames = gnn::rollout(seed, cast, masses, relations,
                               bundle_params.dyn, n_steps, phys);
    bundle.future.objects = cast;
    bundle.future.frames = std::move(frames);
    bundle.future.duration_s = set.future.duration_s;
    bundle.future.fps = phys.record_fps;
    bundle.future.kind = RecordKind::target_future;
    bundle.future.events =
        detect_events_kinematic(bundle.future, relations, phys);
  }

  // counterfactuals: first three observed frames, edited labels, rollout
  const auto signs = realize_signs(props, [&] {
    std::vector<int> ids;
    for (const auto& o : set.roster) ids.push_back(o.id);
    return ids;
  }());
  for (const auto& [edit, id] : required_edits(questions, set)) {
    auto edited_masses = masses;
    auto edited_signs = signs;
    if (edit == "mass_heavy") edited_masses[id] = MassLevel::heavy;
    if (edit == "mass_light") edited_masses[id] = MassLevel::light;
    if (edit == "uncharged") edited_signs[id] = ChargeSign::neutral;
    if (edit == "opposite_charged") {
      edited_signs[id] = edited_signs[id] == ChargeSign::positive
                             ? ChargeSign::negative
                         : edited_signs[id] == ChargeSign::negative
                             ? ChargeSign::positive
                             : ChargeSign::neutral;
    }
    std::map<std::pair<int, int>, ChargeRel> edited_relations;
    for (const auto& a : set.roster) {
      for (const auto& b : set.roster) {
        if (a.id >= b.id) continue;
        const double qq = charge_value(edited_signs.at(a.id)) *
                          charge_value(edited_signs.at(b.id));
        edited_relations[ordered_pair(a.id, b.id)] =
            qq > 0 ? ChargeRel::same : qq < 0 ? ChargeRel::opposite : ChargeRel::none;
      }
    }

    std::vector<std::vector<BodyState>> seed(
        target.frames.begin(), target.frames.begin() + gnn::DynParams::kHistory);
    const int n_steps = target.frame_count() - gnn::DynParams::kHistory;
    SceneRecord cf;
    cf.objects = cast;
    cf.frames = seed;
    auto frames = gnn::rollout(seed, cast, edited_masses, edited_relations,
                               bundle_params.dyn, n_steps, phys);
    for (auto& f : frames) cf.frames.push_back(std::move(f));
    cf.duration_s = target.duration_s;
    cf.fps = phys.record_fps;
    cf.kind = RecordKind::target;
    cf.events = detect_events_kinematic(cf, edited_relations, phys);
    bundle.counterfactual[{edit, id}] = std::move(cf);
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Answering
// ---------------------------------------------------------------------------

void to_json(json& j, const AnswerRecord& r) {
  j = json{{"question_id", r.question_id},
           {"qtype", to_string(r.qtype)},
           {"predicted", r.predicted},
           {"truth", r.truth},
           {"choice_predicted", r.choice_predicted},
           {"choice_truth", r.choice_truth},
           {"correct", r.correct},
           {"options_total", r.options_total},
           {"options_correct", r.options_correct},
           {"error", r.error}};
}

void from_json(const json& j, AnswerRecord& r) {
  r.question_id = j.at("question_id").get<std::string>();
  r.qtype = question_type_from_string(j.at("qtype").get<std::string>());
  r.predicted = j.value("predicted", std::string{});
  r.truth = j.value("truth", std::string{});
  r.choice_predicted = j.value("choice_predicted", std::vector<bool>{});
  r.choice_truth = j.value("choice_truth", std::vector<bool>{});
  r.correct = j.at("correct").get<bool>();
  r.options_total = j.value("options_total", 0);
  r.options_correct = j.value("options_correct", 0);
  r.error = j.value("error", std::string{});
}

std::vector<AnswerRecord> answer(const CorpusSet& corpus_set, AnswerMode mode,
                                 const PhysicsConfig& phys,
                                 const gnn::GnnBundle* bundle_params) {
  const VideoSet& set = corpus_set.set;

  WorldBundle bundle;
  switch (mode) {
    case AnswerMode::oracle: {
      std::map<int, MassLevel> masses;
      std::map<int, ChargeSign> signs;
      for (const auto& o : set.roster) {
        masses[o.id] = o.mass;
        signs[o.id] = o.charge;
      }
      bundle = build_worlds(set, masses, signs, corpus_set.questions, phys);
      break;
    }
    case AnswerMode::inferred: {
      const EnumerationResult inferred = infer_by_enumeration(set, phys);
      std::map<int, MassLevel> masses;
      for (const auto& [id, label] : inferred.graph.node_mass) {
        masses[id] = label.mass;
      }
      std::vector<int> ids;
      for (const auto& o : set.roster) ids.push_back(o.id);
      const auto signs = realize_signs(inferred.graph, ids);
      bundle = build_worlds(set, masses, signs, corpus_set.questions, phys);
      break;
    }
    case AnswerMode::gnn: {
      if (!bundle_params) {
        throw std::invalid_argument("gnn mode needs trained parameters");
      }
      const PropertyGraph props =
          gnn::ppl_predict_set(set, bundle_params->ppl, phys.arena_half_extent);
      bundle = build_worlds_gnn(set, props, corpus_set.questions,
                                *bundle_params, phys);
      break;
    }
  }
  const World w = bundle.world();

  std::vector<AnswerRecord> out;
  for (const auto& q : corpus_set.questions) {
    AnswerRecord r;
    r.question_id = q.id;
    r.qtype = q.qtype;
    if (q.qtype == QuestionType::factual) {
      r.truth = q.answer;
      try {
        r.predicted = value_to_answer(execute(parse_program(q.program), w));
      } catch (const ExecError& e) {
        r.error = to_string(e.kind);
      }
      r.correct = !r.predicted.empty() && r.predicted == r.truth;
    } else {
      r.options_total = static_cast<int>(q.choices.size());
      bool all = true;
      for (const auto& c : q.choices) {
        bool predicted = false;
        try {
          predicted =
              value_to_answer(execute(parse_program(c.program), w)) == "yes";
        } catch (const ExecError& e) {
          r.error = to_string(e.kind);
          predicted = !c.truth;  // executor failure scores as wrong
        }
        r.choice_predicted.push_back(predicted);
        r.choice_truth.push_back(c.truth);
        if (predicted == c.truth) {
          ++r.options_correct;
        } else {
          all = false;
        }
      }
      r.correct = all && r.options_total > 0;
    }
    out.push_back(std::move(r));
  }
  return out;
}

Metrics evaluate(const std::vector<AnswerRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("cannot evaluate an empty answer set");
  }
  Metrics m;
  int factual_correct = 0;
  int pred_opt_total = 0, pred_opt_correct = 0, pred_q_correct = 0;
  int cf_opt_total = 0, cf_opt_correct = 0, cf_q_correct = 0;
  for (const auto& r : records) {
    if (!r.error.empty()) ++m.n_errors;
    switch (r.qtype) {
      case QuestionType::factual:
        ++m.n_factual;
        if (r.correct) ++factual_correct;
        break;
      case QuestionType::predictive:
        ++m.n_predictive;
        pred_opt_total += r.options_total;
        pred_opt_correct += r.options_correct;
        if (r.correct) ++pred_q_correct;
        break;
      default:
        ++m.n_counterfactual;
        cf_opt_total += r.options_total;
        cf_opt_correct += r.options_correct;
        if (r.correct) ++cf_q_correct;
        break;
    }
  }
  if (m.n_factual) {
    m.factual_accuracy = static_cast<double>(factual_correct) / m.n_factual;
  }
  if (pred_opt_total) {
    m.predictive_per_option =
        static_cast<double>(pred_opt_correct) / pred_opt_total;
  }
  if (m.n_predictive) {
    m.predictive_per_question =
        static_cast<double>(pred_q_correct) / m.n_predictive;
  }
  if (cf_opt_total) {
    m.counterfactual_per_option =
        static_cast<double>(cf_opt_correct) / cf_opt_total;
  }
  if (m.n_counterfactual) {
    m.counterfactual_per_question =
        static_cast<double>(cf_q_correct) / m.n_counterfactual;
  }
  return m;
}

json metrics_to_json(const Metrics& m) {
  return json{{"factual", {{"accuracy", m.factual_accuracy},
                           {"count", m.n_factual}}},
              {"predictive", {{"per_option", m.predictive_per_option},
                              {"per_question", m.predictive_per_question},
                              {"count", m.n_predictive}}},
              {"counterfactual", {{"per_option", m.counterfactual_per_option},
                                  {"per_question", m.counterfactual_per_question},
                                  {"count", m.n_counterfactual}}},
              {"executor_errors", m.n_errors}};
}

std::string metrics_table(const Metrics& m) {
  std::ostringstream os;
  auto pct = [](double v) {
    std::ostringstream o;
    o.precision(1);
    o << std::fixed << v * 100.0;
    return o.str();
  };
  os << "                 Factual   Predictive          Counterfactual\n";
  os << "                           per opt. per ques.  per opt. per ques.\n";
  os << "accuracy (%)     " << pct(m.factual_accuracy) << "      "
     << pct(m.predictive_per_option) << "     " << pct(m.predictive_per_question)
     << "       " << pct(m.counterfactual_per_option) << "     "
     << pct(m.counterfactual_per_question) << "\n";
  os << "questions        " << m.n_factual << "       " << m.n_predictive
     << "                  " << m.n_counterfactual << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

json corpus_set_to_json(const CorpusSet& cs) {
  return json{{"video_set", cs.set}, {"questions", cs.questions}};
}

CorpusSet corpus_set_from_json(const json& j) {
  CorpusSet cs;
  cs.set = j.at("video_set").get<VideoSet>();
  cs.questions = j.at("questions").get<std::vector<Question>>();
  return cs;
}

std::string corpus_checksum(const std::vector<std::string>& file_payloads) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& payload : file_payloads) {
    const std::uint64_t fh = fnv1a64(payload);
    for (int shift = 56; shift >= 0; shift -= 8) {
      h ^= (fh >> shift) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return hex64(h);
}

}  // namespace physq
